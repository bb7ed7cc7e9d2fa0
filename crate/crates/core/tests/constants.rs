use farey_lab::constants::{
    b3_cross_check, bk_empirical, bk_exact, bk_trivial_bound, calibrate_c, convergence_report, error_model,
    nu_k_distribution,
};
use farey_lab::geometry::{enumerate_cells, read_cell_cache, write_cell_cache, Rat};
use num_traits::{One, ToPrimitive};

fn f(x: &Rat) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

#[test]
fn empirical_averages_sit_near_the_geometric_values() {
    let c = calibrate_c(1000).unwrap();
    for k in 2..=5u64 {
        let iv = bk_exact(k, 60).unwrap();
        for q in [1_000u64, 10_000] {
            let e = bk_empirical(k, q, 8).unwrap();
            let d = f(&iv.distance(&e));
            assert!(d <= c * error_model(q), "k = {k}, Q = {q}: distance {d:e}");
        }
    }
}

#[test]
fn values_do_not_move_with_kappa_max() {
    for k in 2..=6u64 {
        let top = bk_exact(k, 60).unwrap();
        for l in [4 * (k - 2).max(1), 30, 45] {
            let b = bk_exact(k, l).unwrap();
            assert!(b.lo <= top.lo && top.hi <= b.hi, "k = {k}, L = {l}");
            assert_eq!(b.lo, b.hi);
            assert!(b.width() <= b.tail_bound.clone() * Rat::from_integer(2.into()));
        }
        assert!(Rat::from_integer(bk_trivial_bound(k).unwrap()) > top.hi);
    }
}

#[test]
fn b3_cross_check_at_larger_orders() {
    let c = calibrate_c(1000).unwrap();
    let a = b3_cross_check(1_000, 40, c, 8).unwrap();
    let b = b3_cross_check(10_000, 40, c, 8).unwrap();
    assert!(a.passed() && b.passed());
    assert!(b.distance_approx < a.distance_approx);
}

#[test]
fn distributions_are_normalised() {
    for k in 2..=5u64 {
        let l = 40;
        let t = nu_k_distribution(k, l, 300, 8).unwrap();
        let measure: Rat = t.entries.values().map(|e| e.measure.clone()).sum();
        let emp: Rat = t.entries.values().map(|e| e.empirical.clone()).sum();
        assert_eq!(emp, Rat::one());
        assert_eq!(measure + &t.deficit, Rat::one());
        let bound = Rat::new((4 * (k - 1)).into(), ((l + 1) * (l + 2)).into());
        assert!(t.deficit <= bound, "k = {k}");
    }
}

#[test]
fn convergence_for_k2() {
    let r = convergence_report(2, &[10, 100, 1000], 60, 4).unwrap();
    assert!(r.monotone);
    assert!(r.rows.iter().all(|row| row.distance > Rat::from_integer(0.into())));
}

#[test]
fn cached_cells_give_the_same_constants() {
    let cells = enumerate_cells(3, 30).unwrap();
    let path = std::env::temp_dir().join(format!("farey-lab-cells-{}", std::process::id()));
    std::fs::write(&path, {
        let mut buf = Vec::new();
        write_cell_cache(&mut buf, 3, 30, &cells).unwrap();
        buf
    })
    .unwrap();
    let file = std::io::BufReader::new(std::fs::File::open(&path).unwrap());
    let (_, _, back) = read_cell_cache(file).unwrap();
    std::fs::remove_file(&path).unwrap();
    let a = farey_lab::constants::bk_exact_from_cells(4, 30, &cells).unwrap();
    let b = farey_lab::constants::bk_exact_from_cells(4, 30, &back).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, bk_exact(4, 30).unwrap());
}
