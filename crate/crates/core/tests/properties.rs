use farey_lab::continuant::theorem1_rhs;
use farey_lab::farey::{count_farey, farey_stream, nu2_floor, nu_k, nu_k_values, seek, sum_nu_k, FareyFraction};
use farey_lab::geometry::{
    bcz_apply, enumerate_cells, farey_triangle, in_triangle, kappa, kappa1, rat, region_tk, region_tk_star,
    visible_count, Point, Rat,
};
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;

fn point(x: (i64, i64), y: (i64, i64)) -> Point {
    Point::from_ints(x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seek_agrees_with_stream(order in 1u64..300, num in 0u64..1000, den in 1u64..1000) {
        let x = Ratio::new(num % den, den);
        let (a, b) = seek(x, order).unwrap();
        prop_assert!(a.to_ratio() <= x && x < b.to_ratio());
        prop_assert_eq!(a.num() as u128 * b.den() as u128 + 1, b.num() as u128 * a.den() as u128);
        let mut s = farey_stream(order, Some((a, b))).unwrap();
        prop_assert_eq!(s.next(), Some(b));
    }

    #[test]
    fn consecutive_pairs_are_unimodular(order in 1u64..400) {
        let fr: Vec<FareyFraction> = std::iter::once(FareyFraction::ZERO)
            .chain(farey_stream(order, None).unwrap())
            .collect();
        prop_assert_eq!(fr.len() as u64, count_farey(order).unwrap() + 1);
        for w in fr.windows(2) {
            prop_assert_eq!(
                w[1].num() as i128 * w[0].den() as i128 - w[0].num() as i128 * w[1].den() as i128,
                1
            );
            prop_assert!(w[0].den() + w[1].den() > order);
        }
    }

    #[test]
    fn nu_values_use_the_periodic_extension(order in 1u64..60, k in 1u64..10) {
        let base: Vec<FareyFraction> = std::iter::once(FareyFraction::ZERO)
            .chain(farey_stream(order, None).unwrap())
            .collect();
        let n = base.len() - 1;
        let ext: Vec<FareyFraction> = (0..n + k as usize + 1)
            .map(|t| base[t % n].shifted((t / n) as u64))
            .collect();
        let vals = nu_k_values(order, k).unwrap();
        prop_assert_eq!(vals.len(), n);
        for (i, v) in vals.iter().enumerate() {
            prop_assert_eq!(*v, nu_k(ext[i], ext[i + k as usize]).unwrap());
        }
        prop_assert_eq!(vals.iter().sum::<u128>(), sum_nu_k(order, k, 3).unwrap());
    }

    #[test]
    fn signed_continuant_of_symbols(order in 3u64..80, k in 1usize..7, start in 0usize..1000) {
        let dens: Vec<u64> = std::iter::once(FareyFraction::ZERO)
            .chain(farey_stream(order, None).unwrap())
            .map(|f| f.den())
            .collect();
        let n = dens.len() - 1;
        let i = start % n;
        let q = |t: usize| dens[t % n];
        let p = point((q(i) as i64, order as i64), (q(i + 1) as i64, order as i64));
        let symbols: Vec<u64> = (1..k as u64).map(|t| kappa(&p, t).unwrap()).collect();
        let nu = nu_k_values(order, k as u64).unwrap()[i];
        prop_assert_eq!(theorem1_rhs(k, &symbols).unwrap(), BigInt::from(nu));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn conjugacy(d in 1i64..2000, a in 1i64..2000, t in 1i64..2000, i in 0u64..8) {
        // x = a/d, y = (d - a + t)/d with 1 ≤ a ≤ d, 1 ≤ t ≤ a lands in T
        let a = (a - 1) % d + 1;
        let t = (t - 1) % a + 1;
        let p = point((a, d), (d - a + t, d));
        prop_assert!(in_triangle(&p));
        let mut q = p.clone();
        for _ in 0..i {
            q = bcz_apply(&q).unwrap();
        }
        prop_assert_eq!(kappa1(&q), kappa(&p, i + 1).unwrap());
    }
}

#[test]
fn orbit_matches_farey_denominators() {
    for order in 2..=50u64 {
        let fr: Vec<FareyFraction> = std::iter::once(FareyFraction::ZERO)
            .chain(farey_stream(order, None).unwrap())
            .collect();
        let q = order as i64;
        for w in fr.windows(3) {
            let (a, b, c) = (w[0].den() as i64, w[1].den() as i64, w[2].den() as i64);
            let p = point((a, q), (b, q));
            assert_eq!(bcz_apply(&p).unwrap(), point((b, q), (c, q)), "Q = {order}");
            assert_eq!(nu2_floor(w[0], w[1], order).unwrap(), kappa1(&p));
        }
    }
}

#[test]
fn star_areas() {
    assert_eq!(farey_triangle().area(), rat(1, 2));
    for k in 2..=100i64 {
        assert_eq!(region_tk_star(k as u64).unwrap().area(), rat(2, k * (k + 1)));
    }
}

#[test]
fn level_sets_partition_the_triangle() {
    for l in 1..=40u64 {
        let covered: Rat = (1..=l).map(|k| region_tk(k).unwrap().area()).sum();
        assert_eq!(farey_triangle().area() - covered, region_tk_star(l + 1).unwrap().area());
    }
}

#[test]
fn visible_points_biject_with_farey_fractions() {
    let t = farey_triangle();
    for order in 1..=500 {
        assert_eq!(visible_count(&t, order), count_farey(order).unwrap(), "Q = {order}");
    }
}

#[test]
fn cells_respect_disjointness() {
    for cell in enumerate_cells(4, 25).unwrap() {
        let it = &cell.itinerary;
        for a in 0..it.len() {
            for b in a + 1..it.len() {
                let h = (b - a) as u64;
                assert!(it[a].min(it[b]) <= 4 * h + 2, "{it:?}");
            }
        }
        assert_eq!(cell.area(), cell.forward_image.area());
    }
}
