//! Exact rational plane geometry for the Farey triangle.
//!
//! Everything here works over `BigRational`; there is no floating point in
//! any computation that feeds an area, a clip or a lattice count.

mod bcz;
mod cells;
mod lattice;

pub use bcz::{
    bcz_apply, branch_map, farey_triangle, in_triangle, kappa, kappa1, reflect, region_tk,
    region_tk_star, slab_halfplanes, star_halfplane,
};
pub use cells::{
    enumerate_cells, forced_itinerary, read_cell_cache, write_cell_cache, CylinderCell,
};
pub use lattice::{visible_count, visible_count_bruteforce};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse `p/q` or `p`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Domain(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(BigInt::from_str(s.trim()).map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: (i64, i64), y: (i64, i64)) -> Self {
        Self::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Closed half-plane `a·x + b·y ≤ c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl HalfPlane {
    pub fn new(a: Rat, b: Rat, c: Rat) -> Self {
        Self { a, b, c }
    }

    /// `a·x + b·y - c`; non-positive inside.
    fn excess(&self, p: &Point) -> Rat {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }
}

/// 2×2 integer matrix of determinant one acting on column vectors `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMap {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl UnimodularMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::from_entries(a.into(), b.into(), c.into(), d.into())
    }

    pub fn from_entries(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::Domain("matrix does not have determinant 1".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        let (a, b, c, d) = (
            Rat::from_integer(self.a.clone()),
            Rat::from_integer(self.b.clone()),
            Rat::from_integer(self.c.clone()),
            Rat::from_integer(self.d.clone()),
        );
        Point::new(&a * &p.x + &b * &p.y, &c * &p.x + &d * &p.y)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

/// A convex polygon with counterclockwise vertices, no repeated vertices and
/// no three consecutive collinear ones. Zero-area input normalizes to empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from the vertices of a convex polygon in either orientation.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let poly = Self::normalized(vertices);
        let n = poly.vertices.len();
        for i in 0..n {
            let (a, b, c) = (
                &poly.vertices[i],
                &poly.vertices[(i + 1) % n],
                &poly.vertices[(i + 2) % n],
            );
            if !cross(a, b, c).is_positive() {
                return Err(Error::Domain("vertices do not form a convex polygon".into()));
            }
        }
        Ok(poly)
    }

    fn normalized(mut v: Vec<Point>) -> Self {
        v.dedup();
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        // drop collinear middles until stable
        loop {
            let n = v.len();
            if n < 3 {
                return Self::empty();
            }
            let drop = (0..n).find(|&i| cross(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]).is_zero());
            match drop {
                Some(i) => {
                    v.remove(i);
                }
                None => break,
            }
        }
        let mut poly = Self { vertices: v };
        let twice = poly.signed_twice_area();
        if twice.is_zero() {
            return Self::empty();
        }
        if twice.is_negative() {
            poly.vertices.reverse();
        }
        poly
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn signed_twice_area(&self) -> Rat {
        let n = self.vertices.len();
        let mut s = Rat::zero();
        for i in 0..n {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            s += &p.x * &q.y - &q.x * &p.y;
        }
        s
    }

    /// Exact area by the shoelace formula.
    pub fn area(&self) -> Rat {
        self.signed_twice_area() / int(2)
    }

    /// Intersection with a closed half-plane.
    pub fn clip(&self, h: &HalfPlane) -> Self {
        let n = self.vertices.len();
        if n == 0 {
            return Self::empty();
        }
        let excess: Vec<Rat> = self.vertices.iter().map(|p| h.excess(p)).collect();
        if excess.iter().all(|e| !e.is_positive()) {
            return self.clone();
        }
        if excess.iter().all(|e| !e.is_negative()) {
            return Self::empty();
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (&self.vertices[i], &self.vertices[j]);
            let (ep, eq) = (&excess[i], &excess[j]);
            if !ep.is_positive() {
                out.push(p.clone());
            }
            if (ep.is_positive() && eq.is_negative()) || (ep.is_negative() && eq.is_positive()) {
                let t = ep / (ep - eq);
                out.push(Point::new(
                    &p.x + (&q.x - &p.x) * &t,
                    &p.y + (&q.y - &p.y) * &t,
                ));
            }
        }
        Self::normalized(out)
    }

    pub fn clip_all<'a>(&self, hs: impl IntoIterator<Item = &'a HalfPlane>) -> Self {
        hs.into_iter().fold(self.clone(), |p, h| p.clip(h))
    }

    /// Image under a unimodular linear map. Orientation and area are preserved.
    pub fn map(&self, m: &UnimodularMap) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| m.apply(p)).collect(),
        }
    }

    /// Swap coordinates, `(x, y) ↦ (y, x)`.
    pub fn reflect(&self) -> Self {
        let mut v: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point::new(p.y.clone(), p.x.clone()))
            .collect();
        v.reverse();
        Self { vertices: v }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::empty();
        }
        let mut v: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point::new(&p.x * s, &p.y * s))
            .collect();
        if s.is_negative() {
            v.reverse();
        }
        Self { vertices: v }
    }

    /// Area centroid; lies in the interior of a non-empty polygon.
    pub fn centroid(&self) -> Option<Point> {
        if self.is_empty() {
            return None;
        }
        let n = self.vertices.len();
        let (mut cx, mut cy) = (Rat::zero(), Rat::zero());
        for i in 0..n {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let w = &p.x * &q.y - &q.x * &p.y;
            cx += (&p.x + &q.x) * &w;
            cy += (&p.y + &q.y) * &w;
        }
        let six_a = self.signed_twice_area() * int(3);
        Some(Point::new(cx / &six_a, cy / six_a))
    }

    /// Whether `p` lies in the closed polygon.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        n > 0 && (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    /// Whether `p` lies in the open interior.
    pub fn contains_interior(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        n > 0 && (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_positive())
    }

    /// Equality as point sets (vertex lists may start at different vertices).
    pub fn same_region(&self, other: &Self) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|s| (0..n).all(|i| self.vertices[(i + s) % n] == other.vertices[i]))
    }

    /// Axis-aligned bounds `(xmin, xmax, ymin, ymax)`.
    pub fn bounds(&self) -> Option<(Rat, Rat, Rat, Rat)> {
        let first = self.vertices.first()?;
        let mut b = (first.x.clone(), first.x.clone(), first.y.clone(), first.y.clone());
        for p in &self.vertices[1..] {
            if p.x < b.0 {
                b.0 = p.x.clone();
            }
            if p.x > b.1 {
                b.1 = p.x.clone();
            }
            if p.y < b.2 {
                b.2 = p.y.clone();
            }
            if p.y > b.3 {
                b.3 = p.y.clone();
            }
        }
        Some(b)
    }
}

/// Intersection of two convex polygons.
pub fn intersect(a: &ConvexPolygon, b: &ConvexPolygon) -> ConvexPolygon {
    let v = b.vertices();
    let n = v.len();
    if n == 0 {
        return ConvexPolygon::empty();
    }
    // each CCW edge p→q of b keeps the left side: (q-p) × (z-p) ≥ 0
    let mut out = a.clone();
    for i in 0..n {
        let (p, q) = (&v[i], &v[(i + 1) % n]);
        let h = HalfPlane::new(
            &q.y - &p.y,
            &p.x - &q.x,
            (&q.y - &p.y) * &p.x + (&p.x - &q.x) * &p.y,
        );
        out = out.clip(&h);
    }
    out
}

pub(crate) fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub(crate) fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point::from_ints((0, 1), (0, 1)),
            Point::from_ints((1, 1), (0, 1)),
            Point::from_ints((1, 1), (1, 1)),
            Point::from_ints((0, 1), (1, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn normalization() {
        let p = ConvexPolygon::new(vec![
            Point::from_ints((0, 1), (1, 1)),
            Point::from_ints((0, 1), (0, 1)),
            Point::from_ints((1, 2), (0, 1)),
            Point::from_ints((1, 1), (0, 1)),
            Point::from_ints((1, 1), (1, 1)),
            Point::from_ints((1, 1), (1, 1)),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.area(), int(1));
        let line = ConvexPolygon::new(vec![
            Point::from_ints((0, 1), (0, 1)),
            Point::from_ints((1, 1), (1, 1)),
            Point::from_ints((2, 1), (2, 1)),
        ])
        .unwrap();
        assert!(line.is_empty());
        assert!(ConvexPolygon::new(vec![
            Point::from_ints((0, 1), (0, 1)),
            Point::from_ints((2, 1), (0, 1)),
            Point::from_ints((1, 1), (1, 4)),
            Point::from_ints((1, 1), (2, 1)),
        ])
        .is_err());
    }

    #[test]
    fn clipping_square() {
        let h = HalfPlane::new(int(1), int(1), int(1));
        let tri = sq().clip(&h);
        assert_eq!(tri.area(), rat(1, 2));
        assert_eq!(tri.vertices().len(), 3);
        let none = sq().clip(&HalfPlane::new(int(1), int(0), int(-1)));
        assert!(none.is_empty());
        let edge = sq().clip(&HalfPlane::new(int(1), int(0), int(0)));
        assert!(edge.is_empty());
    }

    #[test]
    fn maps_compose_and_invert() {
        let m = UnimodularMap::new(0, 1, -1, 3).unwrap();
        let n = UnimodularMap::new(2, 1, 1, 1).unwrap();
        let p = Point::from_ints((1, 3), (2, 5));
        assert_eq!(m.compose(&n).apply(&p), m.apply(&n.apply(&p)));
        assert_eq!(m.inverse().apply(&m.apply(&p)), p);
        assert!(UnimodularMap::new(1, 1, 1, 1).is_err());
        assert_eq!(sq().map(&m).area(), int(1));
    }

    #[test]
    fn centroid_and_containment() {
        let c = sq().centroid().unwrap();
        assert_eq!(c, Point::from_ints((1, 2), (1, 2)));
        assert!(sq().contains_interior(&c));
        assert!(sq().contains(&Point::from_ints((1, 1), (0, 1))));
        assert!(!sq().contains_interior(&Point::from_ints((1, 1), (0, 1))));
    }

    #[test]
    fn polygon_intersection() {
        let shifted = sq().map(&UnimodularMap::identity()).clip(&HalfPlane::new(int(-1), int(0), rat(-1, 2)));
        assert_eq!(intersect(&sq(), &shifted).area(), rat(1, 2));
        assert_eq!(sq().reflect().area(), int(1));
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), int(-4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
