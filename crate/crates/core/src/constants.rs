//! The averages `B(k)` of `ν_k` from the geometry of the BCZ map, and the
//! empirical quantities they are compared against.
//!
//! With `d = k - 1`, `ν_k(γ_i)` is the signed continuant of the symbols
//! `κ_1, ..., κ_d` at the point `(q_{i-1}/Q, q_i/Q)`, so
//! `B(k) = 2 ∫_T f(κ_1, ..., κ_d)` where `f` is that continuant. Cells whose
//! symbols are all at most `L` are integrated exactly. On the rest exactly
//! one symbol is large; once it is large enough, the symbols around it are
//! determined (see [`forced_itinerary`]) and the remaining integral is a
//! telescoping sum with a closed form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::continuant::{continuant_monomials, theorem1_rhs, SignedContinuantExpr};
use crate::error::{domain, Error, Result};
use crate::farey::{correlation_sum, count_farey, nu_k_histogram, sum_nu_k, totients};
use crate::geometry::{enumerate_cells, forced_itinerary, CylinderCell, Rat};

pub const DEFAULT_KAPPA_MAX: u64 = 60;

fn r(n: u64, d: u64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn ri(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// `area(T_{L+1}*) = Σ_{ℓ>L} area(T_ℓ) = 2/((L+1)(L+2))`.
fn tail_area(l: u64) -> Rat {
    r(2, (l + 1) * (l + 2))
}

/// `Σ_{ℓ>L} ℓ·area(T_ℓ) = 4/(L+2)`.
fn tail_first_moment(l: u64) -> Rat {
    r(4, l + 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BkInterval {
    pub k: u64,
    pub lo: Rat,
    pub hi: Rat,
    pub kappa_max: u64,
    pub depth: usize,
    /// Bound on the part of `B(k)` carried by cells with a symbol above `kappa_max`.
    pub tail_bound: Rat,
}

impl BkInterval {
    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance(&self, x: &Rat) -> Rat {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            Rat::zero()
        }
    }
}

fn itinerary_value(k: usize, itinerary: &[u64]) -> Result<BigInt> {
    theorem1_rhs(k, itinerary)
}

/// Symbols of the window when the large symbol sits at position `j`
/// (0-based); the entry at `j` itself is left as 0.
fn forced_window(depth: usize, j: usize, forced: &[u64]) -> Vec<u64> {
    let mut w = vec![0; depth];
    for i in 0..depth - 1 - j {
        w[j + 1 + i] = forced[i];
    }
    for i in 0..j {
        w[j - 1 - i] = forced[i];
    }
    w
}

fn check_cells(cells: &[CylinderCell], depth: usize) -> Result<()> {
    if cells.iter().any(|c| c.depth() != depth) {
        return Err(Error::Cache(format!("cells must all have depth {depth}")));
    }
    Ok(())
}

/// `B(k)` from the cells of depth `k - 1` with symbols up to `kappa_max`.
///
/// The tail is summed in closed form, so the interval is a single point.
/// This needs the symbols around one above `kappa_max` to be determined,
/// which holds from `kappa_max >= 4(k-2)`; below that the result is
/// [`Error::UnboundedTail`].
pub fn bk_exact(k: u64, kappa_max: u64) -> Result<BkInterval> {
    if k <= 1 {
        return bk_exact_from_cells(k, kappa_max, &[]);
    }
    let cells = enumerate_cells(k as usize - 1, kappa_max)?;
    bk_exact_from_cells(k, kappa_max, &cells)
}

/// As [`bk_exact`], reusing previously enumerated cells. Cells with a symbol
/// above `kappa_max` are ignored, so a cache built for a larger bound works.
pub fn bk_exact_from_cells(k: u64, kappa_max: u64, cells: &[CylinderCell]) -> Result<BkInterval> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    if kappa_max < 2 {
        return domain("kappa_max must be at least 2");
    }
    if k == 1 {
        return Ok(BkInterval {
            k,
            lo: Rat::one(),
            hi: Rat::one(),
            kappa_max,
            depth: 0,
            tail_bound: Rat::zero(),
        });
    }
    let depth = k as usize - 1;
    check_cells(cells, depth)?;
    let kept: Vec<&CylinderCell> = cells
        .iter()
        .filter(|c| c.itinerary.iter().all(|&s| s <= kappa_max))
        .collect();
    let mut body = Rat::zero();
    for c in &kept {
        body += ri(itinerary_value(depth + 1, &c.itinerary)?) * c.area();
    }
    let body = body * ri(2);

    if let Some(forced) = forced_itinerary(kappa_max + 1, depth - 1)? {
        let mut tail = Rat::zero();
        let mut tail_abs = Rat::zero();
        for j in 0..depth {
            let mut w = forced_window(depth, j, &forced);
            let f0 = itinerary_value(depth + 1, &w)?;
            w[j] = 1;
            let f1 = itinerary_value(depth + 1, &w)?;
            let slope = ri(&f1 - &f0);
            let t = slope * tail_first_moment(kappa_max) + ri(f0) * tail_area(kappa_max);
            tail_abs += t.abs();
            tail += t;
        }
        let value = body + tail * ri(2);
        let star = star_sum_form(depth + 1, kappa_max, &kept, &forced)?;
        if star != value {
            return Err(Error::Contract(format!(
                "cell form {value} and star-sum form {star} disagree for k = {k}"
            )));
        }
        return Ok(BkInterval {
            k,
            lo: value.clone(),
            hi: value,
            kappa_max,
            depth,
            tail_bound: tail_abs * ri(2),
        });
    }

    Err(Error::UnboundedTail(format!(
        "symbols next to one above {kappa_max} are not determined for k = {k}; \
         use kappa_max >= {}",
        4 * (k - 2)
    )))
}

/// `B(k)` as a signed sum over the monomials of `K_{k-1}`, each term being
/// twice the integral of a product of symbols written as a sum of areas of
/// intersected star regions `{κ_j ≥ t}`.
///
/// Thresholds up to `L` are summed from the cells (the integral of
/// `Π min(κ_j, L)`), and the thresholds above `L` are added in closed form.
fn star_sum_form(k: usize, l: u64, cells: &[&CylinderCell], forced: &[u64]) -> Result<Rat> {
    let depth = k - 1;
    let expr = SignedContinuantExpr::new(k)?;
    let lr = ri(l);
    let mut total = Rat::zero();
    for m in continuant_monomials(depth) {
        let mut part = Rat::zero();
        for c in cells {
            let prod: u64 = m.indices.iter().map(|&j| c.itinerary[j - 1].min(l)).product();
            part += ri(prod) * c.area();
        }
        for j in 0..depth {
            let w = forced_window(depth, j, forced);
            let others: u64 = m.indices.iter().filter(|&&i| i != j + 1).map(|&i| w[i - 1]).product();
            let cj = ri(others);
            if m.indices.contains(&(j + 1)) {
                // Π min(κ, L) on the tail, plus thresholds above L
                part += &cj * &lr * tail_area(l);
                part += &cj * (tail_first_moment(l) - &lr * tail_area(l));
            } else {
                part += &cj * tail_area(l);
            }
        }
        total += part * ri(2 * expr.monomial_sign(&m) as i64);
    }
    Ok(total)
}

/// `(1/N(Q)) Σ_i ν_k(γ_i)` over one period.
pub fn bk_empirical(k: u64, order: u64, chunks: usize) -> Result<Rat> {
    if k == 0 || order == 0 {
        return domain("k and Q must be at least 1");
    }
    let n = count_farey(order)?;
    Ok(Rat::new(sum_nu_k(order, k, chunks)?.into(), n.into()))
}

/// `(1/N(Q)) Σ_i ν_2(γ_i) ν_2(γ_{i+h})` over one period.
pub fn a_h_empirical(h: u64, order: u64, chunks: usize) -> Result<Rat> {
    if h == 0 || order == 0 {
        return domain("h and Q must be at least 1");
    }
    let n = count_farey(order)?;
    Ok(Rat::new(correlation_sum(order, h, chunks)?.into(), n.into()))
}

/// `F_{k-1}·(4k+2)^k`, a crude ceiling for `B(k)`.
pub fn bk_trivial_bound(k: u64) -> Result<BigInt> {
    if k < 2 {
        return domain("k must be at least 2");
    }
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 1..k - 1 {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    Ok(b * BigInt::from(4 * k + 2).pow(k as u32))
}

/// `(log Q)^2 / Q`, the shape of the error term.
pub fn error_model(order: u64) -> f64 {
    let q = order as f64;
    q.ln().powi(2) / q
}

/// Smallest `C` with `|bk_empirical(2, Q) - 3| ≤ C·(log Q)²/Q` for all
/// `2 ≤ Q ≤ q_max`. Uses `Σ ν_2 = 3N(Q) - 1`, so the error is exactly `1/N(Q)`.
pub fn calibrate_c(q_max: u64) -> Result<f64> {
    if q_max < 2 {
        return domain("calibration needs q_max >= 2");
    }
    let phi = totients(q_max as usize);
    let mut n = 1u64;
    let mut best = 0.0f64;
    for q in 1..=q_max {
        n += phi[q as usize] as u64;
        if q >= 2 {
            best = best.max(1.0 / n as f64 / error_model(q));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B3CrossCheck {
    #[serde(rename = "Q")]
    pub order: u64,
    pub kappa_max: u64,
    pub bk3: Rat,
    pub a1_minus_1: Rat,
    pub interval: BkInterval,
    pub c: f64,
    pub widening: f64,
    pub distance_approx: f64,
    pub identity_holds: bool,
    pub inside: bool,
}

impl B3CrossCheck {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.inside
    }
}

fn rat_f64(x: &Rat) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// `B(3) = A(1) - 1` at finite `Q`, and both against the geometric value.
/// `c` is the constant of the widening `c·(log Q)²/Q`.
pub fn b3_cross_check(order: u64, kappa_max: u64, c: f64, chunks: usize) -> Result<B3CrossCheck> {
    let interval = bk_exact(3, kappa_max)?;
    b3_cross_check_with(order, &interval, c, chunks)
}

/// As [`b3_cross_check`] with a precomputed `B(3)` interval.
pub fn b3_cross_check_with(order: u64, interval: &BkInterval, c: f64, chunks: usize) -> Result<B3CrossCheck> {
    if interval.k != 3 {
        return domain("interval must be for k = 3");
    }
    let bk3 = bk_empirical(3, order, chunks)?;
    let a1_minus_1 = a_h_empirical(1, order, chunks)? - Rat::one();
    let widening = c * error_model(order);
    let dist = rat_f64(&interval.distance(&bk3)).max(rat_f64(&interval.distance(&a1_minus_1)));
    Ok(B3CrossCheck {
        order,
        kappa_max: interval.kappa_max,
        identity_holds: bk3 == a1_minus_1,
        inside: dist <= widening,
        bk3,
        a1_minus_1,
        interval: interval.clone(),
        c,
        widening,
        distance_approx: dist,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionEntry {
    /// Twice the area of the cells on which `ν_k` takes this value.
    pub measure: Rat,
    /// Fraction of indices in one period of `F_Q` with this value.
    pub empirical: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub k: u64,
    pub kappa_max: u64,
    #[serde(rename = "Q")]
    pub order: u64,
    pub entries: BTreeMap<u128, DistributionEntry>,
    /// Measure carried by cells with a symbol above `kappa_max`.
    pub deficit: Rat,
}

/// Value distribution of `ν_k`: geometric measure against frequencies in `F_Q`.
pub fn nu_k_distribution(k: u64, kappa_max: u64, order: u64, chunks: usize) -> Result<DistributionTable> {
    if k < 2 {
        return domain("k must be at least 2");
    }
    if order == 0 {
        return domain("Q must be at least 1");
    }
    let cells = enumerate_cells(k as usize - 1, kappa_max)?;
    let mut entries: BTreeMap<u128, DistributionEntry> = BTreeMap::new();
    let mut covered = Rat::zero();
    for c in &cells {
        let v = itinerary_value(k as usize, &c.itinerary)?;
        let v = v
            .to_u128()
            .ok_or_else(|| Error::Contract(format!("non-positive value {v} on cell {:?}", c.itinerary)))?;
        let m = c.area() * ri(2);
        covered += &m;
        entries
            .entry(v)
            .or_insert_with(|| DistributionEntry {
                measure: Rat::zero(),
                empirical: Rat::zero(),
            })
            .measure += m;
    }
    let n = count_farey(order)?;
    for (v, count) in nu_k_histogram(order, k, chunks)? {
        entries
            .entry(v)
            .or_insert_with(|| DistributionEntry {
                measure: Rat::zero(),
                empirical: Rat::zero(),
            })
            .empirical = r(count, n);
    }
    Ok(DistributionTable {
        k,
        kappa_max,
        order,
        entries,
        deficit: Rat::one() - covered,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "Q")]
    pub order: u64,
    pub empirical: Rat,
    pub distance: Rat,
    pub model: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub interval: BkInterval,
    pub rows: Vec<ConvergenceRow>,
    /// Distances never increase from one row to the next.
    pub monotone: bool,
}

impl ConvergenceReport {
    /// Ratio of the first distance to the last.
    pub fn shrink_factor(&self) -> Option<f64> {
        let first = rat_f64(&self.rows.first()?.distance);
        let last = rat_f64(&self.rows.last()?.distance);
        Some(first / last)
    }
}

/// Empirical averages at increasing `Q` against the geometric interval.
pub fn convergence_report(k: u64, orders: &[u64], kappa_max: u64, chunks: usize) -> Result<ConvergenceReport> {
    if orders.is_empty() || orders.windows(2).any(|w| w[0] >= w[1]) {
        return domain("orders must be non-empty and strictly increasing");
    }
    let interval = bk_exact(k, kappa_max)?;
    let rows = orders
        .iter()
        .map(|&q| {
            let empirical = bk_empirical(k, q, chunks)?;
            Ok(ConvergenceRow {
                order: q,
                distance: interval.distance(&empirical),
                empirical,
                model: error_model(q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance);
    Ok(ConvergenceReport {
        interval,
        rows,
        monotone,
    })
}
