//! Streaming enumeration of the Farey sequence `F_Q` and its k-indices.
//!
//! Fractions are indexed so that `γ_0 = 0/1`, `γ_1 = 1/Q`, ..., `γ_N = 1/1`,
//! and the sequence is extended periodically by `γ_{i+N} = γ_i + 1`. The
//! successor recurrence used throughout walks straight through the period
//! boundary, so windows that cross `1/1` see `γ_{N+j} = γ_j + 1` without any
//! special casing.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A reduced fraction `num/den` of the (periodically extended) Farey sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FareyFraction {
    num: u64,
    den: u64,
}

impl FareyFraction {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return domain("denominator must be positive");
        }
        if num.gcd(&den) != 1 {
            return domain(format!("{num}/{den} is not reduced"));
        }
        Ok(Self { num, den })
    }

    pub(crate) const fn raw(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub const ZERO: Self = Self::raw(0, 1);
    pub const ONE: Self = Self::raw(1, 1);

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// The same fraction shifted by an integer, as in the periodic extension.
    pub fn shifted(&self, periods: u64) -> Self {
        Self::raw(self.num + periods * self.den, self.den)
    }

    pub fn to_ratio(&self) -> Ratio<u64> {
        Ratio::new_raw(self.num, self.den)
    }
}

impl Ord for FareyFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The order `Q` of a Farey sequence together with its length `N(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FareyContext {
    pub order: u64,
    pub count: u64,
}

impl FareyContext {
    pub fn new(order: u64) -> Result<Self> {
        Ok(Self {
            order,
            count: count_farey(order)?,
        })
    }
}

/// Consecutive fractions `γ_{i-1}, ..., γ_{i+k-1}` of the extended sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyWindow {
    /// `i - 1`, the index of the first fraction in the window.
    pub start_index: u64,
    pub fractions: Vec<FareyFraction>,
}

impl FareyWindow {
    /// `ν_j(γ_{start+1+offset})` for a sub-window of this window.
    pub fn nu(&self, offset: usize, j: usize) -> u128 {
        det(self.fractions[offset], self.fractions[offset + j])
    }
}

/// Euler's totient for `0..=n` by a linear sieve.
pub fn totients(n: usize) -> Vec<u32> {
    let mut phi = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
    }
    for i in 2..=n {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let m = i * p as usize;
            if m > n {
                break;
            }
            if i % p as usize == 0 {
                phi[m] = phi[i] * p;
                break;
            }
            phi[m] = phi[i] * (p - 1);
        }
    }
    phi
}

/// `N(Q) = Σ_{q ≤ Q} φ(q)`, the number of fractions in `F_Q`.
pub fn count_farey(order: u64) -> Result<u64> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    let n = usize::try_from(order).map_err(|_| Error::Overflow("count_farey"))?;
    Ok(totients(n).iter().map(|&p| p as u64).sum())
}

/// `p_b q_a - p_a q_b`, the numerator of `b - a`.
#[inline]
pub(crate) fn det(a: FareyFraction, b: FareyFraction) -> u128 {
    b.num as u128 * a.den as u128 - a.num as u128 * b.den as u128
}

#[inline]
fn is_unimodular(prev: FareyFraction, cur: FareyFraction) -> bool {
    prev < cur && det(prev, cur) == 1
}

/// True iff `a` and `b` occur as consecutive denominators `q_i, q_{i+1}` in `F_Q`.
pub fn neighbor_criterion(a: u64, b: u64, order: u64) -> bool {
    (1..=order).contains(&a) && (1..=order).contains(&b) && a.gcd(&b) == 1 && a + b > order
}

fn check_pair(prev: FareyFraction, cur: FareyFraction, order: u64) -> Result<()> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    if !is_unimodular(prev, cur) {
        return Err(Error::Contract(format!(
            "{prev} and {cur} are not a unimodular increasing pair"
        )));
    }
    if !neighbor_criterion(prev.den, cur.den, order) {
        return Err(Error::Contract(format!(
            "{prev} and {cur} are not consecutive in F_{order}"
        )));
    }
    Ok(())
}

#[inline]
fn successor(prev: FareyFraction, cur: FareyFraction, order: u64) -> FareyFraction {
    let t = (order + prev.den) / cur.den;
    FareyFraction::raw(t * cur.num - prev.num, t * cur.den - prev.den)
}

/// The fraction following `cur` when `prev, cur` are consecutive in `F_Q`.
pub fn farey_next(prev: FareyFraction, cur: FareyFraction, order: u64) -> Result<FareyFraction> {
    check_pair(prev, cur, order)?;
    Ok(successor(prev, cur, order))
}

/// `ν_2(γ_i) = ⌊(Q + q_{i-1}) / q_i⌋` for the consecutive pair `(γ_{i-1}, γ_i)`.
pub fn nu2_floor(prev: FareyFraction, cur: FareyFraction, order: u64) -> Result<u64> {
    check_pair(prev, cur, order)?;
    Ok((order + prev.den) / cur.den)
}

/// `ν_k(γ_i) = p_{i+k-1} q_{i-1} - p_{i-1} q_{i+k-1}` with `first = γ_{i-1}`
/// and `last = γ_{i+k-1}`.
pub fn nu_k(first: FareyFraction, last: FareyFraction) -> Result<u128> {
    if first >= last {
        return domain(format!("{first} must precede {last}"));
    }
    Ok(det(first, last))
}

/// Iterator over the extended Farey sequence, stopping after `1/1`.
#[derive(Debug, Clone)]
pub struct FareyStream {
    order: u64,
    prev: FareyFraction,
    cur: FareyFraction,
    done: bool,
}

impl Iterator for FareyStream {
    type Item = FareyFraction;

    fn next(&mut self) -> Option<FareyFraction> {
        if self.done {
            return None;
        }
        let out = self.cur;
        if out == FareyFraction::ONE {
            self.done = true;
        } else {
            let next = successor(self.prev, self.cur, self.order);
            self.prev = self.cur;
            self.cur = next;
        }
        Some(out)
    }
}

/// Stream `F_Q` in increasing order.
///
/// Without a seed this yields `γ_1, ..., γ_N`. With a consecutive pair
/// `(γ_{i-1}, γ_i)` in `[0, 1]` it yields `γ_i, γ_{i+1}, ..., 1/1`.
pub fn farey_stream(order: u64, from: Option<(FareyFraction, FareyFraction)>) -> Result<FareyStream> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    let (prev, cur) = from.unwrap_or((FareyFraction::ZERO, FareyFraction::raw(1, order)));
    check_pair(prev, cur, order)?;
    if cur > FareyFraction::ONE {
        return Err(Error::Contract(format!("seed {cur} lies beyond 1/1")));
    }
    Ok(FareyStream {
        order,
        prev,
        cur,
        done: false,
    })
}

/// The consecutive pair `(γ_{i-1}, γ_i)` of `F_Q` with `γ_{i-1} ≤ x < γ_i`,
/// found by Stern–Brocot descent with batched steps.
pub fn seek(x: Ratio<u64>, order: u64) -> Result<(FareyFraction, FareyFraction)> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    if x.numer() >= x.denom() {
        return domain(format!("{x} is outside [0, 1)"));
    }
    let (xn, xd) = (*x.numer() as i128, *x.denom() as i128);
    let q = order as i128;
    // invariant: a/b <= x < c/d, bc - ad = 1
    let (mut a, mut b, mut c, mut d) = (0i128, 1i128, 1i128, 1i128);
    while b + d <= q {
        let below = xn * b - a * xd;
        let above = c * xd - xn * d;
        let t = (below / above).min((q - b) / d);
        if t > 0 {
            a += t * c;
            b += t * d;
            continue;
        }
        let t_x = if below == 0 { i128::MAX } else { (above - 1) / below };
        let t = t_x.min((q - d) / b);
        if t > 0 {
            c += t * a;
            d += t * b;
            continue;
        }
        break;
    }
    Ok((
        FareyFraction::raw(a as u64, b as u64),
        FareyFraction::raw(c as u64, d as u64),
    ))
}

/// Sequential iterator over all windows `γ_{i-1}, ..., γ_{i+k-1}` for `i = 1..=N`.
pub fn windows(order: u64, k: usize) -> Result<impl Iterator<Item = FareyWindow>> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    if k == 0 {
        return domain("k must be at least 1");
    }
    let mut buf = initial_window((FareyFraction::ZERO, FareyFraction::raw(1, order)), k + 1, order);
    let mut index = 0u64;
    Ok(std::iter::from_fn(move || {
        if buf[0] >= FareyFraction::ONE {
            return None;
        }
        let out = FareyWindow {
            start_index: index,
            fractions: buf.clone(),
        };
        advance_window(&mut buf, order);
        index += 1;
        Some(out)
    }))
}

fn initial_window(start: (FareyFraction, FareyFraction), width: usize, order: u64) -> Vec<FareyFraction> {
    let mut buf = Vec::with_capacity(width.max(2));
    buf.push(start.0);
    buf.push(start.1);
    while buf.len() < width {
        let n = buf.len();
        buf.push(successor(buf[n - 2], buf[n - 1], order));
    }
    buf
}

#[inline]
fn advance_window(buf: &mut Vec<FareyFraction>, order: u64) {
    let n = buf.len();
    let next = successor(buf[n - 2], buf[n - 1], order);
    buf.rotate_left(1);
    buf[n - 1] = next;
}

/// First consecutive pair whose left member is `≥ cut`.
fn pair_at_or_after(cut: Ratio<u64>, order: u64) -> Result<(FareyFraction, FareyFraction)> {
    let (l, r) = seek(cut, order)?;
    if l.to_ratio() == cut {
        Ok((l, r))
    } else {
        Ok((r, successor(l, r, order)))
    }
}

/// Run `f` over each chunk `j` of `0..chunks`, in parallel when enabled.
fn map_chunks<T, F>(chunks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(f).collect()
    }
}

/// Fold over every window `γ_{i-1}, ..., γ_{i+width-2}`, `i = 1..=N`, split
/// into `chunks` pieces at the cut points `j/chunks`. Chunk `j` owns the
/// windows whose first fraction lies in `[j/chunks, (j+1)/chunks)`.
pub(crate) fn fold_windows<A, F>(
    order: u64,
    width: usize,
    chunks: usize,
    init: impl Fn() -> A + Sync + Send,
    step: F,
) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut A, &[FareyFraction]) -> Result<()> + Sync + Send,
{
    if order == 0 {
        return domain("order must be at least 1");
    }
    if chunks == 0 {
        return domain("chunks must be at least 1");
    }
    let c = chunks as u64;
    map_chunks(chunks, |j| {
        let j = j as u64;
        let start = pair_at_or_after(Ratio::new(j, c), order)?;
        let end = (j + 1, c);
        let mut acc = init();
        let mut buf = initial_window(start, width, order);
        while (buf[0].num as u128) * (end.1 as u128) < (end.0 as u128) * (buf[0].den as u128) {
            step(&mut acc, &buf)?;
            advance_window(&mut buf, order);
        }
        Ok(acc)
    })
    .into_iter()
    .collect()
}

fn check_order_k(order: u64, k: u64) -> Result<()> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    if k == 0 {
        return domain("k must be at least 1");
    }
    Ok(())
}

/// `Σ_{i=1}^{N(Q)} ν_k(γ_i)`, exact. The result does not depend on `chunks`.
pub fn sum_nu_k(order: u64, k: u64, chunks: usize) -> Result<u128> {
    check_order_k(order, k)?;
    let width = k as usize + 1;
    let parts = fold_windows(order, width, chunks, || 0u128, |acc, w| {
        *acc = acc
            .checked_add(det(w[0], w[width - 1]))
            .ok_or(Error::Overflow("sum_nu_k"))?;
        Ok(())
    })?;
    parts
        .into_iter()
        .try_fold(0u128, |a, b| a.checked_add(b))
        .ok_or(Error::Overflow("sum_nu_k"))
}

/// Number of occurrences of each value of `ν_k` over one period.
pub fn nu_k_histogram(order: u64, k: u64, chunks: usize) -> Result<BTreeMap<u128, u64>> {
    check_order_k(order, k)?;
    let width = k as usize + 1;
    let parts = fold_windows(order, width, chunks, BTreeMap::new, |acc, w| {
        *acc.entry(det(w[0], w[width - 1])).or_insert(0u64) += 1;
        Ok(())
    })?;
    let mut out = BTreeMap::new();
    for part in parts {
        for (v, n) in part {
            *out.entry(v).or_insert(0) += n;
        }
    }
    Ok(out)
}

/// `ν_k(γ_1), ..., ν_k(γ_N)` in order.
pub fn nu_k_values(order: u64, k: u64) -> Result<Vec<u128>> {
    check_order_k(order, k)?;
    Ok(windows(order, k as usize)?
        .map(|w| det(w.fractions[0], w.fractions[k as usize]))
        .collect())
}

/// `Σ_{i=1}^{N(Q)} ν_2(γ_i) ν_2(γ_{i+h})`, exact.
///
/// `ν_2` depends only on denominators, which are periodic, so the lag is
/// reduced mod `N(Q)`. Each chunk walks a lead cursor `h mod N` steps ahead,
/// so the cost is `O(N + chunks·(h mod N))`.
pub fn correlation_sum(order: u64, h: u64, chunks: usize) -> Result<u128> {
    check_order_k(order, h.max(1))?;
    if h == 0 {
        return domain("h must be at least 1");
    }
    if chunks == 0 {
        return domain("chunks must be at least 1");
    }
    let lag = h % count_farey(order)?;
    let c = chunks as u64;
    let parts: Vec<Result<u128>> = map_chunks(chunks, |j| {
        let j = j as u64;
        let (mut p0, mut p1) = pair_at_or_after(Ratio::new(j, c), order)?;
        let (mut l0, mut l1) = (p0.den, p1.den);
        for _ in 0..lag {
            let t = (order + l0) / l1;
            (l0, l1) = (l1, t * l1 - l0);
        }
        let mut acc = 0u128;
        while (p0.num as u128) * (c as u128) < ((j + 1) as u128) * (p0.den as u128) {
            let a = (order + p0.den) / p1.den;
            let b = (order + l0) / l1;
            acc = acc
                .checked_add(a as u128 * b as u128)
                .ok_or(Error::Overflow("correlation_sum"))?;
            let next = successor(p0, p1, order);
            (p0, p1) = (p1, next);
            let t = (order + l0) / l1;
            (l0, l1) = (l1, t * l1 - l0);
        }
        Ok(acc)
    });
    parts.into_iter().try_fold(0u128, |a, b| {
        a.checked_add(b?).ok_or(Error::Overflow("correlation_sum"))
    })
}
