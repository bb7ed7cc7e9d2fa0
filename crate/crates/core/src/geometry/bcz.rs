//! The Farey triangle, the BCZ map and its level sets.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{floor_int, int, ConvexPolygon, HalfPlane, Point, Rat, UnimodularMap};
use crate::error::{domain, Result};

/// `{(x, y) ∈ [0,1]² : x + y > 1}` as the closed triangle `(1,0), (1,1), (0,1)`.
/// The open edge `x + y = 1` only matters for point membership.
pub fn farey_triangle() -> ConvexPolygon {
    ConvexPolygon::new(vec![
        Point::new(int(1), int(0)),
        Point::new(int(1), int(1)),
        Point::new(int(0), int(1)),
    ])
    .expect("triangle is convex")
}

pub fn in_triangle(p: &Point) -> bool {
    let one = Rat::one();
    !p.x.is_negative() && p.x <= one && p.y <= one && &p.x + &p.y > one
}

fn require_in_triangle(p: &Point) -> Result<()> {
    if in_triangle(p) {
        Ok(())
    } else {
        domain(format!("({p}) is not in the Farey triangle"))
    }
}

/// `κ_1(x, y) = ⌊(1 + x) / y⌋` for a point already known to be in the triangle.
pub fn kappa1(p: &Point) -> u64 {
    floor_int(&((Rat::one() + &p.x) / &p.y))
        .to_u64()
        .expect("kappa is positive on the triangle")
}

/// Branch of the map on `T_k`: `(x, y) ↦ (y, k·y - x)`.
pub fn branch_map(k: u64) -> UnimodularMap {
    UnimodularMap {
        a: BigInt::zero(),
        b: BigInt::one(),
        c: -BigInt::one(),
        d: BigInt::from(k),
    }
}

/// `T(x, y) = (y, ⌊(1+x)/y⌋·y - x)`.
pub fn bcz_apply(p: &Point) -> Result<Point> {
    require_in_triangle(p)?;
    Ok(branch_map(kappa1(p)).apply(p))
}

/// `κ_i = κ_1 ∘ T^{i-1}`.
pub fn kappa(p: &Point, i: u64) -> Result<u64> {
    if i == 0 {
        return domain("kappa index starts at 1");
    }
    require_in_triangle(p)?;
    let mut cur = p.clone();
    for _ in 1..i {
        cur = branch_map(kappa1(&cur)).apply(&cur);
    }
    Ok(kappa1(&cur))
}

/// `k·y - x ≤ 1`, i.e. `κ_1 ≥ k` (up to the boundary line).
pub fn star_halfplane(k: u64) -> HalfPlane {
    HalfPlane::new(int(-1), Rat::from_integer(BigInt::from(k)), int(1))
}

/// The two half-planes bounding the slab `(1+x)/(k+1) ≤ y ≤ (1+x)/k`.
pub fn slab_halfplanes(k: u64) -> [HalfPlane; 2] {
    [
        star_halfplane(k),
        // (k+1)·y - x ≥ 1
        HalfPlane::new(int(1), -Rat::from_integer(BigInt::from(k + 1)), int(-1)),
    ]
}

/// `T_k = {p ∈ T : κ_1(p) = k}` as a closed polygon.
pub fn region_tk(k: u64) -> Result<ConvexPolygon> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    Ok(farey_triangle().clip_all(&slab_halfplanes(k)))
}

/// `T_k* = ∪_{ℓ ≥ k} T_ℓ = {p ∈ T : y ≤ (1+x)/k}`.
pub fn region_tk_star(k: u64) -> Result<ConvexPolygon> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    Ok(farey_triangle().clip(&star_halfplane(k)))
}

/// `(x, y) ↦ (y, x)`, which conjugates the map to its inverse.
pub fn reflect(p: &Point) -> Point {
    Point::new(p.y.clone(), p.x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, HalfPlane};

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn triangle() {
        let t = farey_triangle();
        assert_eq!(t.area(), rat(1, 2));
        assert!(in_triangle(&pt((2, 3), (1, 2))));
        assert!(!in_triangle(&pt((1, 2), (1, 2))));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(bcz_apply(&pt((2, 3), (1, 2))).unwrap(), pt((1, 2), (5, 6)));
        assert_eq!(bcz_apply(&pt((1, 1), (1, 1))).unwrap(), pt((1, 1), (1, 1)));
        assert_eq!(bcz_apply(&pt((3, 5), (4, 5))).unwrap(), pt((4, 5), (1, 1)));
        assert!(bcz_apply(&pt((1, 2), (1, 2))).is_err());
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&pt((1, 3), (1, 1)), 1).unwrap(), 1);
        assert_eq!(kappa(&pt((1, 3), (1, 1)), 2).unwrap(), 3);
        for i in 1..10 {
            assert_eq!(kappa(&pt((1, 1), (1, 1)), i).unwrap(), 2);
        }
        assert!(kappa(&pt((1, 3), (1, 3)), 1).is_err());
    }

    #[test]
    fn level_sets() {
        let t1 = region_tk(1).unwrap();
        assert_eq!(t1.area(), rat(1, 6));
        assert!(t1.contains(&pt((1, 3), (2, 3))));
        assert_eq!(t1.vertices().len(), 3);
        assert_eq!(region_tk(2).unwrap().area(), rat(1, 6));
        assert_eq!(region_tk(3).unwrap().area(), rat(1, 15));
        assert_eq!(region_tk_star(1).unwrap().area(), rat(1, 2));
        assert_eq!(region_tk_star(2).unwrap().area(), rat(1, 3));
        assert_eq!(region_tk_star(3).unwrap().area(), rat(1, 6));
    }

    #[test]
    fn clip_examples() {
        let t = farey_triangle();
        assert_eq!(t.clip(&HalfPlane::new(int(1), int(0), int(1))), t);
        assert!(t.clip(&HalfPlane::new(int(1), int(0), int(0))).is_empty());
        let q = t.clip(&HalfPlane::new(int(-1), int(2), int(1)));
        // (1,1) lies on the clipping line, so the result is a triangle
        assert_eq!(q.vertices().len(), 3);
        assert_eq!(q.area(), rat(1, 3));
    }

    #[test]
    fn branch_examples() {
        let t1 = region_tk(1).unwrap();
        let img = t1.map(&branch_map(1));
        assert_eq!(img.area(), rat(1, 6));
        let t2 = region_tk(2).unwrap();
        let img2 = t2.map(&branch_map(2));
        assert_eq!(img2.area(), rat(1, 6));
        for v in img2.vertices() {
            assert!(farey_triangle().contains(v));
        }
        assert_eq!(t1.map(&UnimodularMap::identity()), t1);
    }

    #[test]
    fn image_of_level_set_is_its_reflection() {
        for k in 1..12 {
            let tk = region_tk(k).unwrap();
            assert!(tk.map(&branch_map(k)).same_region(&tk.reflect()));
        }
    }
}
