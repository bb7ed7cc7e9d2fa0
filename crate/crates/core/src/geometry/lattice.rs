//! Counting primitive lattice points in dilated polygons.
//!
//! Points are counted in the closed polygon `Q·poly`, except that the line
//! `x + y = Q` and everything below it is excluded, matching the open edge
//! of the Farey triangle. With that convention the count for the triangle
//! itself is `N(Q)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{ceil_int, floor_int, ConvexPolygon, Point, Rat};

/// Rows narrower than this are counted with direct gcd tests.
const GCD_ROW_WIDTH: i64 = 48;

fn to_i64(b: &BigInt) -> i64 {
    b.to_i64().expect("lattice coordinate fits in i64")
}

/// `x`-extent of the polygon on the horizontal line at height `y`.
fn row_extent(vs: &[Point], y: &Rat) -> Option<(Rat, Rat)> {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let mut push = |x: Rat| {
        if lo.as_ref().map_or(true, |l| &x < l) {
            lo = Some(x.clone());
        }
        if hi.as_ref().map_or(true, |h| &x > h) {
            hi = Some(x);
        }
    };
    for (i, a) in vs.iter().enumerate() {
        let b = &vs[(i + 1) % vs.len()];
        let (ymin, ymax) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
        if y < ymin || y > ymax {
            continue;
        }
        if a.y == b.y {
            push(a.x.clone());
            push(b.x.clone());
        } else {
            push(&a.x + (y - &a.y) * (&b.x - &a.x) / (&b.y - &a.y));
        }
    }
    lo.zip(hi)
}

/// Smallest prime factor of every `n ≤ limit`.
fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn distinct_primes(mut n: usize, spf: &[u32]) -> Vec<i64> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        out.push(p as i64);
        while n % p == 0 {
            n /= p;
        }
    }
    out
}

/// `#{x ∈ [lo, hi] : gcd(x, y) = 1}` for `y ≥ 1` by inclusion-exclusion.
fn coprime_in_range(lo: i64, hi: i64, primes: &[i64]) -> i64 {
    let upto = |n: i64, d: i64| Integer::div_floor(&n, &d);
    let mut total = 0;
    for mask in 0u32..(1 << primes.len()) {
        let d: i64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .product();
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        total += sign * (upto(hi, d) - upto(lo - 1, d));
    }
    total
}

/// Number of coprime integer pairs in `Q·poly` (see the module docs for the
/// boundary convention).
pub fn visible_count(poly: &ConvexPolygon, order: u64) -> u64 {
    let scaled = poly.scale(&Rat::from_integer(BigInt::from(order)));
    let Some((_, _, ymin, ymax)) = scaled.bounds() else {
        return 0;
    };
    let vs = scaled.vertices();
    let q = order as i64;
    let (y0, y1) = (to_i64(&ceil_int(&ymin)), to_i64(&floor_int(&ymax)));
    let spf = spf_table(y0.unsigned_abs().max(y1.unsigned_abs()) as usize);
    let mut count = 0i64;
    for y in y0..=y1 {
        let Some((xl, xh)) = row_extent(vs, &Rat::from_integer(y.into())) else {
            continue;
        };
        let lo = to_i64(&ceil_int(&xl)).max(q - y + 1);
        let hi = to_i64(&floor_int(&xh));
        if lo > hi {
            continue;
        }
        count += if y == 0 {
            (lo..=hi).filter(|x| x.abs() == 1).count() as i64
        } else if hi - lo < GCD_ROW_WIDTH {
            (lo..=hi).filter(|x| x.gcd(&y) == 1).count() as i64
        } else {
            coprime_in_range(lo, hi, &distinct_primes(y.unsigned_abs() as usize, &spf))
        };
    }
    count as u64
}

/// Same count by testing every lattice point of the bounding box.
pub fn visible_count_bruteforce(poly: &ConvexPolygon, order: u64) -> u64 {
    let Some((xmin, xmax, ymin, ymax)) = poly.bounds() else {
        return 0;
    };
    let q = Rat::from_integer(BigInt::from(order));
    let qi = order as i64;
    let r = |v: Rat, up: bool| to_i64(&if up { ceil_int(&(v * &q)) } else { floor_int(&(v * &q)) });
    let (x0, x1, y0, y1) = (r(xmin, true), r(xmax, false), r(ymin, true), r(ymax, false));
    let mut count = 0;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if x + y <= qi || x.gcd(&y) != 1 {
                continue;
            }
            let p = Point::new(
                Rat::new(x.into(), BigInt::from(order.max(1))),
                Rat::new(y.into(), BigInt::from(order.max(1))),
            );
            if order > 0 && poly.contains(&p) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::count_farey;
    use crate::geometry::{farey_triangle, region_tk, region_tk_star};

    #[test]
    fn triangle_examples() {
        let t = farey_triangle();
        assert_eq!(visible_count(&t, 3), 4);
        assert_eq!(visible_count(&t, 5), 10);
        assert_eq!(visible_count(&t, 1), 1);
    }

    #[test]
    fn matches_farey_count() {
        let t = farey_triangle();
        for q in 1..=120 {
            assert_eq!(visible_count(&t, q), count_farey(q).unwrap(), "Q = {q}");
        }
    }

    #[test]
    fn matches_bruteforce() {
        let polys = [region_tk(1).unwrap(), region_tk(3).unwrap(), region_tk_star(2).unwrap()];
        for p in &polys {
            for q in [1, 2, 7, 40, 97, 150] {
                assert_eq!(visible_count(p, q), visible_count_bruteforce(p, q), "{p:?} Q = {q}");
            }
        }
    }

    #[test]
    fn inclusion_exclusion() {
        assert_eq!(coprime_in_range(1, 12, &[2, 3]), 4);
        assert_eq!(coprime_in_range(-5, 5, &[5]), 8);
    }
}
