//! Continuant (convergent) polynomials and the signed continuant that
//! expresses `ν_k` through consecutive values of `ν_2`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// `K_n(x_1, ..., x_n)` by `K_n = x_n K_{n-1} + K_{n-2}`, `K_0 = 1`, `K_{-1} = 0`.
pub fn continuant_eval<T: Clone + Into<BigInt>>(args: &[T]) -> BigInt {
    let mut before = BigInt::zero();
    let mut cur = BigInt::one();
    for x in args {
        let next = x.clone().into() * &cur + &before;
        before = std::mem::replace(&mut cur, next);
    }
    cur
}

/// One monomial of `K_n`: the product of the variables at `indices` (1-based).
///
/// The complement of `indices` in `1..=n` is always a disjoint union of
/// adjacent pairs `{j, j+1}`. The empty monomial is the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContinuantMonomial {
    pub indices: Vec<usize>,
}

impl ContinuantMonomial {
    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    /// Whether this is a monomial of `K_n`.
    pub fn is_valid(&self, n: usize) -> bool {
        let mut expect = 1;
        for &j in &self.indices {
            if j < expect || j > n || (j - expect) % 2 == 1 {
                return false;
            }
            expect = j + 1;
        }
        (n + 1 - expect) % 2 == 0
    }

    pub fn eval<T: Clone + Into<BigInt>>(&self, args: &[T]) -> BigInt {
        self.indices
            .iter()
            .map(|&j| args[j - 1].clone().into())
            .product()
    }
}

/// Monomial expansion of `K_n`.
///
/// Ordered by indicator vector, present before absent, so the full product
/// comes first and the constant term (when `n` is even) last.
pub fn continuant_monomials(n: usize) -> Vec<ContinuantMonomial> {
    fn expand(start: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<ContinuantMonomial>) {
        if start > n {
            out.push(ContinuantMonomial {
                indices: prefix.clone(),
            });
            return;
        }
        prefix.push(start);
        expand(start + 1, n, prefix, out);
        prefix.pop();
        if start < n {
            expand(start + 2, n, prefix, out);
        }
    }
    let mut out = Vec::new();
    expand(1, n, &mut Vec::new(), &mut out);
    out
}

/// Kronecker symbol `(n/2)`.
pub fn kronecker2(n: i64) -> i8 {
    match n.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// The right-hand side of the k-index identity as a reusable expression:
/// `((2k-1)/2) · K_{k-1}(-v_1, v_2, ..., (-1)^{k-1} v_{k-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedContinuantExpr {
    pub k: usize,
    pub sign_prefactor: i8,
    /// `(-1)^j` for argument `j = 1..k-1`.
    pub argument_signs: Vec<i8>,
}

impl SignedContinuantExpr {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return domain("k must be at least 1");
        }
        Ok(Self {
            k,
            sign_prefactor: kronecker2(2 * k as i64 - 1),
            argument_signs: (1..k).map(|j| if j % 2 == 1 { -1 } else { 1 }).collect(),
        })
    }

    pub fn eval<T: Clone + Into<BigInt>>(&self, nu2_values: &[T]) -> Result<BigInt> {
        if nu2_values.len() != self.k - 1 {
            return domain(format!(
                "k = {} needs {} values of nu_2, got {}",
                self.k,
                self.k - 1,
                nu2_values.len()
            ));
        }
        let args: Vec<BigInt> = nu2_values
            .iter()
            .zip(&self.argument_signs)
            .map(|(v, &s)| v.clone().into() * s)
            .collect();
        Ok(continuant_eval(&args) * self.sign_prefactor)
    }

    /// Sign that a monomial of `K_{k-1}` carries once the alternating
    /// argument signs and the prefactor are pulled out.
    pub fn monomial_sign(&self, monomial: &ContinuantMonomial) -> i8 {
        let flips: usize = monomial.indices.iter().sum();
        if flips % 2 == 0 {
            self.sign_prefactor
        } else {
            -self.sign_prefactor
        }
    }
}

/// `ν_k(γ_i)` from `ν_2(γ_i), ..., ν_2(γ_{i+k-2})`.
pub fn theorem1_rhs<T: Clone + Into<BigInt>>(k: usize, nu2_values: &[T]) -> Result<BigInt> {
    SignedContinuantExpr::new(k)?.eval(nu2_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(v: &[&[usize]]) -> Vec<ContinuantMonomial> {
        v.iter()
            .map(|s| ContinuantMonomial { indices: s.to_vec() })
            .collect()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(continuant_eval::<i64>(&[]), BigInt::from(1));
        assert_eq!(continuant_eval(&[2i64, 3]), BigInt::from(7));
        assert_eq!(continuant_eval(&[1i64, 1, 1]), BigInt::from(3));
        assert_eq!(continuant_eval(&[5i64]), BigInt::from(5));
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(continuant_monomials(0), idx(&[&[]]));
        assert_eq!(continuant_monomials(1), idx(&[&[1]]));
        assert_eq!(continuant_monomials(2), idx(&[&[1, 2], &[]]));
        assert_eq!(continuant_monomials(3), idx(&[&[1, 2, 3], &[1], &[3]]));
    }

    #[test]
    fn monomial_counts_are_fibonacci() {
        let (mut a, mut b) = (1usize, 1usize);
        for n in 0..20 {
            let ms = continuant_monomials(n);
            assert_eq!(ms.len(), a, "n = {n}");
            assert!(ms.iter().all(|m| m.is_valid(n)));
            (a, b) = (b, a + b);
        }
    }

    #[test]
    fn validity_rejects_non_monomials() {
        assert!(!ContinuantMonomial { indices: vec![2] }.is_valid(3));
        assert!(!ContinuantMonomial { indices: vec![1, 2] }.is_valid(3));
        assert!(ContinuantMonomial { indices: vec![3] }.is_valid(3));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker2(4), 0);
        assert_eq!(kronecker2(7), 1);
        assert_eq!(kronecker2(3), -1);
        assert_eq!(kronecker2(-1), 1);
        assert_eq!(kronecker2(-3), -1);
    }

    #[test]
    fn kronecker_sign_collapse() {
        for k in -50i64..50 {
            assert_eq!(
                kronecker2(2 * k - 1) * kronecker2(4 * k - 3),
                kronecker2(2 * k - 3)
            );
            assert_eq!(kronecker2(2 * k - 1), -kronecker2(2 * k - 5));
        }
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(theorem1_rhs::<u64>(1, &[]).unwrap(), BigInt::from(1));
        assert_eq!(theorem1_rhs(2, &[5u64]).unwrap(), BigInt::from(5));
        assert_eq!(theorem1_rhs(3, &[1u64, 3]).unwrap(), BigInt::from(2));
        assert!(theorem1_rhs(3, &[1u64]).is_err());
        assert!(theorem1_rhs::<u64>(0, &[]).is_err());
    }

    #[test]
    fn prefactor_never_vanishes() {
        for k in 1..200 {
            assert_ne!(SignedContinuantExpr::new(k).unwrap().sign_prefactor, 0);
        }
    }

    proptest! {
        #[test]
        fn monomials_sum_to_recurrence(args in prop::collection::vec(-50i64..50, 0..=12)) {
            let total: BigInt = continuant_monomials(args.len()).iter().map(|m| m.eval(&args)).sum();
            prop_assert_eq!(total, continuant_eval(&args));
        }

        #[test]
        fn continuant_is_reversible(args in prop::collection::vec(-1000i64..1000, 0..=15)) {
            let mut rev = args.clone();
            rev.reverse();
            prop_assert_eq!(continuant_eval(&args), continuant_eval(&rev));
        }

        #[test]
        fn kronecker_has_period_eight(n in -1_000_000i64..1_000_000) {
            prop_assert_eq!(kronecker2(n), kronecker2(n + 8));
        }

        #[test]
        fn signed_monomials_match_rhs(vals in prop::collection::vec(1u64..40, 1..=9)) {
            let k = vals.len() + 1;
            let expr = SignedContinuantExpr::new(k).unwrap();
            let by_monomial: BigInt = continuant_monomials(k - 1)
                .iter()
                .map(|m| m.eval(&vals) * expr.monomial_sign(m))
                .sum();
            prop_assert_eq!(by_monomial, expr.eval(&vals).unwrap());
        }
    }
}
