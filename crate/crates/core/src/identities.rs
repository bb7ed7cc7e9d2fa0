//! Exhaustive checks of the k-index identities over one full period of `F_Q`.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::continuant::SignedContinuantExpr;
use crate::error::{domain, Result};
use crate::farey::{count_farey, nu2_floor, sum_nu_k, windows};

/// Stored failures are capped; `failure_count` keeps the total.
pub const MAX_STORED_FAILURES: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: u64,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_name: String,
    #[serde(rename = "Q")]
    pub order: u64,
    /// Inclusive range of k that was checked.
    pub k_range: (u64, u64),
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    fn new(name: &str, order: u64, k_range: (u64, u64)) -> Self {
        Self {
            identity_name: name.to_string(),
            order,
            k_range,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn check<T: PartialEq + ToString>(&mut self, index: u64, expected: T, got: T) {
        self.checked += 1;
        if expected != got {
            self.failure_count += 1;
            if self.failures.len() < MAX_STORED_FAILURES {
                self.failures.push(Failure {
                    index,
                    expected: expected.to_string(),
                    got: got.to_string(),
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Combine reports for the same identity and order.
    pub fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        self.k_range = (
            self.k_range.0.min(other.k_range.0),
            self.k_range.1.max(other.k_range.1),
        );
        let room = MAX_STORED_FAILURES - self.failures.len();
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }
}

fn require_order(order: u64, min: u64) -> Result<()> {
    if order < min {
        return domain(format!("order must be at least {min}"));
    }
    Ok(())
}

fn require_k3(k: u64) -> Result<()> {
    if k < 3 {
        return domain("identity holds for k >= 3");
    }
    Ok(())
}

/// `ν_k(γ_i)` against the signed continuant of `ν_2(γ_i), ..., ν_2(γ_{i+k-2})`
/// for every `i` in one period and `1 ≤ k ≤ k_max`.
pub fn verify_theorem1(order: u64, k_max: u64) -> Result<VerificationReport> {
    require_order(order, 1)?;
    if k_max == 0 {
        return domain("k_max must be at least 1");
    }
    let exprs = (1..=k_max as usize)
        .map(SignedContinuantExpr::new)
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport::new("theorem1", order, (1, k_max));
    for w in windows(order, k_max as usize)? {
        let f = &w.fractions;
        let nu2 = (0..f.len().saturating_sub(2))
            .map(|t| nu2_floor(f[t], f[t + 1], order))
            .collect::<Result<Vec<u64>>>()?;
        for (k, expr) in (1..=k_max as usize).zip(&exprs) {
            let rhs = expr.eval(&nu2[..k - 1])?;
            report.check(w.start_index + 1, BigInt::from(w.nu(0, k)), rhs);
        }
    }
    Ok(report)
}

/// `ν_{k-1}(γ_i) ν_{k-1}(γ_{i+1}) - ν_k(γ_i) ν_{k-2}(γ_{i+1}) = 1`.
pub fn verify_sl2_lemma(order: u64, k: u64) -> Result<VerificationReport> {
    require_order(order, 2)?;
    require_k3(k)?;
    let k = k as usize;
    let mut report = VerificationReport::new("sl2_lemma", order, (k as u64, k as u64));
    for w in windows(order, k + 1)? {
        let d = BigInt::from(w.nu(0, k - 1)) * BigInt::from(w.nu(1, k - 1))
            - BigInt::from(w.nu(0, k)) * BigInt::from(w.nu(1, k - 2));
        report.check(w.start_index + 1, BigInt::one(), d);
    }
    Ok(report)
}

/// `ν_k(γ_i) = ν_2(γ_{i+k-2}) ν_{k-1}(γ_i) - ν_{k-2}(γ_i)`.
pub fn verify_three_term(order: u64, k: u64) -> Result<VerificationReport> {
    require_order(order, 2)?;
    require_k3(k)?;
    let k = k as usize;
    let mut report = VerificationReport::new("three_term", order, (k as u64, k as u64));
    for w in windows(order, k)? {
        let rhs = BigInt::from(w.nu(k - 2, 2)) * BigInt::from(w.nu(0, k - 1))
            - BigInt::from(w.nu(0, k - 2));
        report.check(w.start_index + 1, BigInt::from(w.nu(0, k)), rhs);
    }
    Ok(report)
}

/// `ν_k(γ_i) = (ν_{k-1}(γ_i) ν_{k-1}(γ_{i+1}) - 1) / ν_{k-2}(γ_{i+1})` with
/// exact division.
pub fn verify_division_form(order: u64, k: u64) -> Result<VerificationReport> {
    require_order(order, 2)?;
    require_k3(k)?;
    let k = k as usize;
    let mut report = VerificationReport::new("division_form", order, (k as u64, k as u64));
    for w in windows(order, k + 1)? {
        let num = BigInt::from(w.nu(0, k - 1)) * BigInt::from(w.nu(1, k - 1)) - 1;
        let den = BigInt::from(w.nu(1, k - 2));
        let expected = BigInt::from(w.nu(0, k));
        let got = if (&num % &den) == BigInt::from(0) {
            let quotient: BigInt = num / den;
            quotient.to_string()
        } else {
            format!("{num}/{den} (inexact)")
        };
        report.check(w.start_index + 1, expected.to_string(), got);
    }
    Ok(report)
}

/// `Σ ν_2(γ_i) = 3N(Q) - 1`.
pub fn verify_hall_shiu(order: u64, chunks: usize) -> Result<VerificationReport> {
    require_order(order, 1)?;
    let mut report = VerificationReport::new("hall_shiu", order, (2, 2));
    let n = count_farey(order)? as u128;
    report.check(0, 3 * n - 1, sum_nu_k(order, 2, chunks)?);
    Ok(report)
}

/// `(q_{i-1} + q_{i+1}) / q_i` (an exact integer), `p_{i+1} q_{i-1} - p_{i-1} q_{i+1}`
/// and `⌊(Q + q_{i-1}) / q_i⌋` all agree.
pub fn verify_index_formulas(order: u64) -> Result<VerificationReport> {
    require_order(order, 1)?;
    let mut report = VerificationReport::new("index_formulas", order, (2, 2));
    for w in windows(order, 2)? {
        let [a, b, c] = [w.fractions[0], w.fractions[1], w.fractions[2]];
        let i = w.start_index + 1;
        let floor = nu2_floor(a, b, order)? as u128;
        let s = a.den() + c.den();
        let ratio = if s % b.den() == 0 {
            (s / b.den()).to_string()
        } else {
            format!("{s}/{} (inexact)", b.den())
        };
        report.check(i, floor.to_string(), ratio);
        report.check(i, floor, w.nu(0, 2));
    }
    Ok(report)
}

/// Every verifier at one order, with k-dependent ones run for `3..=k_max`.
pub fn verify_all(order: u64, k_max: u64, chunks: usize) -> Result<Vec<VerificationReport>> {
    let mut out = vec![
        verify_index_formulas(order)?,
        verify_hall_shiu(order, chunks)?,
        verify_theorem1(order, k_max)?,
    ];
    if order >= 2 && k_max >= 3 {
        type Verifier = fn(u64, u64) -> Result<VerificationReport>;
        let per_k: [Verifier; 3] = [verify_sl2_lemma, verify_three_term, verify_division_form];
        for v in per_k {
            let merged = (3..=k_max)
                .map(|k| v(order, k))
                .reduce(|a, b| Ok(a?.merge(b?)))
                .expect("k range is non-empty")?;
            out.push(merged);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_examples() {
        let r = verify_theorem1(3, 3).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 12);
        assert!(verify_theorem1(1, 1).unwrap().passed());
        assert!(verify_theorem1(50, 6).unwrap().passed());
    }

    #[test]
    fn lemma_examples() {
        for (q, k) in [(3, 3), (2, 3), (100, 5)] {
            assert!(verify_sl2_lemma(q, k).unwrap().passed());
        }
        for (q, k) in [(3, 3), (3, 4), (200, 7)] {
            assert!(verify_three_term(q, k).unwrap().passed());
        }
        for (q, k) in [(3, 3), (5, 4), (2, 3)] {
            assert!(verify_division_form(q, k).unwrap().passed());
        }
        assert!(verify_sl2_lemma(10, 2).is_err());
        assert!(verify_three_term(10, 1).is_err());
        assert!(verify_division_form(1, 3).is_err());
    }

    #[test]
    fn hall_shiu_examples() {
        for q in [1, 3, 1000] {
            assert!(verify_hall_shiu(q, 4).unwrap().passed());
        }
    }

    #[test]
    fn index_formula_examples() {
        for q in [2, 3, 30] {
            let r = verify_index_formulas(q).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn failures_are_capped() {
        let mut r = VerificationReport::new("x", 1, (1, 1));
        for i in 0..250u64 {
            r.check(i, 0u64, 1u64);
        }
        assert_eq!(r.failure_count, 250);
        assert_eq!(r.failures.len(), MAX_STORED_FAILURES);
        assert!(!r.passed());
    }
}
