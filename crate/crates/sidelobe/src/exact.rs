//! Exhaustive computation over all `2^n` binary sequences at small `n`.
//!
//! Sequences of length `n <= 28` are u32 bit masks (bit `j` = element `j`,
//! bit value 0 meaning +1, matching the packed convention in [`crate::seq`]).
//! Enumeration comes in two independent routes that must agree: a Gray-code
//! walk with incremental spectrum updates over every mask, and a
//! symmetry-accelerated scan that evaluates only canonical orbit
//! representatives and weights them by exact orbit size.
//!
//! Proportions are exact rationals `count / 2^n`; floating point appears
//! only at the reporting boundary.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::seq::BinarySequence;

/// Cap for full scans (plain or symmetry-accelerated).
pub const PLAIN_MAX_N: u32 = 24;
/// Cap for the pruned prefix-extension search in [`mu_min_exact`].
pub const PRUNED_MAX_N: u32 = 28;
/// Cap for [`term_distribution_check`].
pub const TERM_CHECK_MAX_N: u32 = 16;
/// Cap for [`exceedance_union_bound_check`].
pub const UNION_BOUND_MAX_N: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("n must be in {min}..={max}, got {n}")]
    OutOfRange { n: u32, min: u32, max: u32 },
}

fn check_n(n: u32, max: u32) -> Result<(), ExactError> {
    if n < 2 || n > max {
        return Err(ExactError::OutOfRange { n, min: 2, max });
    }
    Ok(())
}

#[inline]
fn ones(n: u32) -> u32 {
    (1u32 << n) - 1
}

/// `c_k` of the mask-encoded sequence, via shifted XOR and popcount.
#[inline]
fn correlation(mask: u32, n: u32, k: u32) -> i32 {
    let overlap = n - k;
    let disagreements = ((mask ^ (mask >> k)) & ones(overlap)).count_ones();
    overlap as i32 - 2 * disagreements as i32
}

/// `mu` of the mask-encoded sequence.
#[inline]
fn psl_mask(mask: u32, n: u32) -> u32 {
    (1..n)
        .map(|k| correlation(mask, n, k).unsigned_abs())
        .max()
        .expect("n >= 2")
}

#[inline]
fn negate(mask: u32, n: u32) -> u32 {
    !mask & ones(n)
}

#[inline]
fn reverse(mask: u32, n: u32) -> u32 {
    mask.reverse_bits() >> (32 - n)
}

#[inline]
fn alternate(mask: u32, n: u32) -> u32 {
    mask ^ (0xaaaa_aaaa & ones(n))
}

/// The eight images of `mask` under the PSL-preserving group.
#[inline]
fn orbit_images(mask: u32, n: u32) -> [u32; 8] {
    let a = alternate(mask, n);
    let r = reverse(mask, n);
    let ra = reverse(a, n);
    [
        mask,
        a,
        r,
        ra,
        negate(mask, n),
        negate(a, n),
        negate(r, n),
        negate(ra, n),
    ]
}

/// Smallest image and exact orbit size (1, 2, 4, or 8: fixed points exist).
#[inline]
fn orbit_min_and_size(mask: u32, n: u32) -> (u32, u64) {
    let images = orbit_images(mask, n);
    let mut min = u32::MAX;
    let mut size = 0u64;
    for (i, &x) in images.iter().enumerate() {
        min = min.min(x);
        if images[..i].iter().all(|&y| y != x) {
            size += 1;
        }
    }
    (min, size)
}

fn mask_to_sequence(mask: u32, n: u32) -> BinarySequence {
    let elements: Vec<i8> = (0..n).map(|j| 1 - 2 * ((mask >> j) & 1) as i8).collect();
    BinarySequence::from_elements(&elements).expect("mask elements are valid")
}

/// Splits the mask space `0..2^n` into contiguous ranges (prefix partitions)
/// and scans them on separate threads. Per-mask work is independent and the
/// caller's merge is commutative integer arithmetic, so the outcome does not
/// depend on the worker count.
fn scan_mask_ranges<R: Send>(
    n: u32,
    body: impl Fn(std::ops::Range<u32>) -> R + Sync,
) -> Vec<R> {
    let total = 1u64 << n;
    let workers = std::thread::available_parallelism()
        .map(|t| t.get().min(8) as u64)
        .unwrap_or(1)
        .min(total);
    if workers <= 1 {
        return vec![body(0..total as u32)];
    }
    let per = total / workers;
    let extra = total % workers;
    let mut ranges = Vec::with_capacity(workers as usize);
    let mut start = 0u64;
    for w in 0..workers {
        let len = per + u64::from(w < extra);
        ranges.push(start as u32..(start + len) as u32);
        start += len;
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| scope.spawn(|| body(range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    })
}

/// Exact distribution of `mu` over all `2^n` sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PslDistribution {
    pub n: u32,
    /// `mu -> number of sequences with that PSL`; keys are >= 1.
    pub counts: BTreeMap<u64, u64>,
}

impl PslDistribution {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count_above(&self, threshold: f64) -> u64 {
        self.counts
            .iter()
            .filter(|(&mu, _)| mu as f64 > threshold)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn min_psl(&self) -> u64 {
        *self.counts.keys().next().expect("distribution is never empty")
    }
}

/// Full PSL distribution by the symmetry-accelerated scan: only canonical
/// representatives (orbit minima) are evaluated, each weighted by its exact
/// orbit size.
pub fn psl_distribution(n: u32) -> Result<PslDistribution, ExactError> {
    check_n(n, PLAIN_MAX_N)?;
    let partials = scan_mask_ranges(n, |range| {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for mask in range {
            let (min, size) = orbit_min_and_size(mask, n);
            if min != mask {
                continue;
            }
            let mu = u64::from(psl_mask(mask, n));
            *counts.entry(mu).or_insert(0) += size;
        }
        counts
    });
    let mut counts = BTreeMap::new();
    for partial in partials {
        for (mu, c) in partial {
            *counts.entry(mu).or_insert(0) += c;
        }
    }
    Ok(PslDistribution { n, counts })
}

/// Full PSL distribution by plain enumeration: a Gray-code walk where each
/// step flips one element and updates every `c_k` in O(1). Kept as the
/// independent oracle for the symmetry-accelerated scan.
pub fn psl_distribution_plain(n: u32) -> Result<PslDistribution, ExactError> {
    check_n(n, PLAIN_MAX_N)?;
    let n_us = n as usize;
    let mut elements = vec![1i8; n_us];
    let mut spectrum: Vec<i32> = (0..n as i32).map(|k| n as i32 - k).collect();
    let mut counts = BTreeMap::new();
    let psl_of = |spectrum: &[i32]| -> u64 {
        spectrum[1..].iter().map(|c| c.unsigned_abs()).max().unwrap() as u64
    };
    *counts.entry(psl_of(&spectrum)).or_insert(0) += 1u64;
    for i in 1..(1u64 << n) {
        let p = i.trailing_zeros() as usize;
        let old = i32::from(elements[p]);
        for k in 1..n_us {
            let mut removed = 0i32;
            if p + k < n_us {
                removed += old * i32::from(elements[p + k]);
            }
            if p >= k {
                removed += i32::from(elements[p - k]) * old;
            }
            spectrum[k] -= 2 * removed;
        }
        elements[p] = -elements[p];
        *counts.entry(psl_of(&spectrum)).or_insert(0) += 1;
    }
    Ok(PslDistribution { n, counts })
}

/// Exact exceedance count and proportion at one threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ExactExceedance {
    pub n: u32,
    pub threshold: f64,
    /// Number of sequences with `mu > threshold`.
    pub count: u64,
    /// `2^n`.
    pub denominator: u64,
    /// `count / 2^n` as a float; the rational pair above is exact.
    pub proportion: f64,
}

pub fn exact_exceedance(n: u32, threshold: f64) -> Result<ExactExceedance, ExactError> {
    let distribution = psl_distribution(n)?;
    Ok(exceedance_from_distribution(&distribution, threshold))
}

/// Same as [`exact_exceedance`] but reuses an already computed distribution,
/// for callers sweeping many thresholds at one `n`.
pub fn exceedance_from_distribution(
    distribution: &PslDistribution,
    threshold: f64,
) -> ExactExceedance {
    let count = distribution.count_above(threshold);
    let denominator = 1u64 << distribution.n;
    ExactExceedance {
        n: distribution.n,
        threshold,
        count,
        denominator,
        proportion: count as f64 / denominator as f64,
    }
}

/// Result of an exact `mu_min` search.
#[derive(Debug, Clone)]
pub struct MuMinResult {
    pub n: u32,
    pub mu_min: u64,
    /// A sequence attaining the minimum.
    pub witness: BinarySequence,
    /// States examined: canonical representatives for the plain scan,
    /// search-tree nodes for the pruned search.
    pub representatives_scanned: u64,
    pub elapsed: Duration,
}

/// Exact `mu_min(n)` with a witness.
///
/// Without pruning this scans every canonical representative (`n <= 24`).
/// With pruning it runs iterative deepening on the target `m = 1, 2, ...`;
/// for each `m` a two-ended prefix search places `a_0, a_{n-1}, a_1,
/// a_{n-2}, ...` and prunes as soon as a fully determined high-shift
/// correlation violates `|c_k| <= m`. After `p` placements the correlations
/// `c_k` with `k >= n - floor(p/2)` are fully determined, because `c_{n-t}`
/// only involves the first `t` and last `t` elements.
pub fn mu_min_exact(n: u32, prune: bool) -> Result<MuMinResult, ExactError> {
    let start = Instant::now();
    if prune {
        check_n(n, PRUNED_MAX_N)?;
        let mut nodes = 0u64;
        for m in 1..n {
            let mut search = PrefixSearch::new(n, m as i32);
            if let Some(mask) = search.run() {
                nodes += search.nodes;
                return Ok(MuMinResult {
                    n,
                    mu_min: u64::from(m),
                    witness: mask_to_sequence(mask, n),
                    representatives_scanned: nodes,
                    elapsed: start.elapsed(),
                });
            }
            nodes += search.nodes;
        }
        unreachable!("mu(A) <= n-1 always holds, so some m < n is feasible");
    } else {
        check_n(n, PLAIN_MAX_N)?;
        let partials = scan_mask_ranges(n, |range| {
            let mut best_mu = u32::MAX;
            let mut best_mask = 0u32;
            let mut scanned = 0u64;
            for mask in range {
                let (min, _) = orbit_min_and_size(mask, n);
                if min != mask {
                    continue;
                }
                scanned += 1;
                let mu = psl_mask(mask, n);
                if mu < best_mu {
                    best_mu = mu;
                    best_mask = mask;
                }
            }
            (best_mu, best_mask, scanned)
        });
        // Strict `<` over range-ordered partials keeps the lowest-mask
        // witness, matching a sequential scan exactly.
        let mut best_mu = u32::MAX;
        let mut best_mask = 0u32;
        let mut scanned = 0u64;
        for (mu, mask, partial_scanned) in partials {
            scanned += partial_scanned;
            if mu < best_mu {
                best_mu = mu;
                best_mask = mask;
            }
        }
        Ok(MuMinResult {
            n,
            mu_min: u64::from(best_mu),
            witness: mask_to_sequence(best_mask, n),
            representatives_scanned: scanned,
            elapsed: start.elapsed(),
        })
    }
}

/// Depth-first feasibility search for "does any sequence have `mu <= m`".
struct PrefixSearch {
    n: usize,
    m: i32,
    left: Vec<i8>,
    right: Vec<i8>, // right[i] = a_{n-1-i}
    nodes: u64,
}

impl PrefixSearch {
    fn new(n: u32, m: i32) -> Self {
        Self {
            n: n as usize,
            m,
            left: Vec::with_capacity(n as usize),
            right: Vec::with_capacity(n as usize),
            nodes: 0,
        }
    }

    fn run(&mut self) -> Option<u32> {
        // Negation symmetry: fix a_0 = +1.
        self.left.push(1);
        self.nodes += 1;
        self.extend(1)
    }

    fn extend(&mut self, placed: usize) -> Option<u32> {
        if placed == self.n {
            return self.finish();
        }
        let goes_left = placed.is_multiple_of(2);
        for sign in [1i8, -1] {
            self.nodes += 1;
            if goes_left {
                self.left.push(sign);
            } else {
                self.right.push(sign);
            }
            if self.determined_ok() {
                if let Some(mask) = self.extend(placed + 1) {
                    return Some(mask);
                }
            }
            if goes_left {
                self.left.pop();
            } else {
                self.right.pop();
            }
        }
        None
    }

    /// Checks the newest fully determined correlation, if this placement
    /// completed one: after both ends hold `t` elements,
    /// `c_{n-t} = sum_{j<t} left[j] * right[t-1-j]`.
    fn determined_ok(&self) -> bool {
        let t = self.left.len().min(self.right.len());
        if t == 0 || self.left.len() != self.right.len() {
            // min(L, R) only grows when the lagging side catches up.
            return true;
        }
        let c: i32 = (0..t)
            .map(|j| i32::from(self.left[j]) * i32::from(self.right[t - 1 - j]))
            .sum();
        c.abs() <= self.m
    }

    fn finish(&self) -> Option<u32> {
        let mut mask = 0u32;
        for (j, &e) in self.left.iter().enumerate() {
            if e == -1 {
                mask |= 1 << j;
            }
        }
        for (i, &e) in self.right.iter().enumerate() {
            if e == -1 {
                mask |= 1 << (self.n - 1 - i);
            }
        }
        (psl_mask(mask, self.n as u32) <= self.m as u32).then_some(mask)
    }
}

/// One mismatch in [`term_distribution_check`].
#[derive(Debug, Clone, Serialize)]
pub struct TermMismatch {
    pub k: u32,
    pub value: i32,
    pub observed: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TermDistributionReport {
    pub n: u32,
    pub shifts_checked: u32,
    pub pass: bool,
    pub mismatches: Vec<TermMismatch>,
}

/// For each `k` in `1..=n-1`, tabulates the exact distribution of `c_{n-k}`
/// (a sum of `k` product terms) over all `2^n` sequences and checks it equals
/// the distribution of `k` independent fair signs:
/// `#\{c_{n-k} = k - 2i\} = C(k, i) * 2^{n-k}`, as exact integers.
pub fn term_distribution_check(n: u32) -> Result<TermDistributionReport, ExactError> {
    check_n(n, TERM_CHECK_MAX_N)?;
    let mut tallies: Vec<Vec<u64>> = (0..n).map(|k| vec![0u64; k as usize + 1]).collect();
    for mask in 0..(1u64 << n) as u32 {
        for k in 1..n {
            let c = correlation(mask, n, n - k);
            let i = ((k as i32 - c) / 2) as usize;
            tallies[k as usize][i] += 1;
        }
    }
    let mut mismatches = Vec::new();
    for k in 1..n {
        for i in 0..=k {
            let observed = tallies[k as usize][i as usize];
            let expected = (binomial(k, i) << (n - k)) as u64;
            if observed != expected {
                mismatches.push(TermMismatch {
                    k,
                    value: k as i32 - 2 * i as i32,
                    observed,
                    expected,
                });
            }
        }
    }
    Ok(TermDistributionReport {
        n,
        shifts_checked: n - 1,
        pass: mismatches.is_empty(),
        mismatches,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionBoundReport {
    pub n: u32,
    pub lambda: f64,
    /// Exact count of sequences with `mu > lambda`.
    pub exceed_count: u64,
    /// `2^n`.
    pub denominator: u64,
    /// `sum_k tail_count(k, lambda) * 2^{n-k}`, the right side over denominator `2^n`.
    pub rhs_numerator: u128,
    pub lhs_proportion: f64,
    pub rhs_sum: f64,
    pub holds: bool,
}

/// Verifies the union-bound step exactly:
/// `P[mu(A) > lambda] <= sum_{k=1}^{n-1} P[|c_{n-k}| > lambda]`,
/// with the left side by enumeration and the right side by exact binomial
/// tails, both as rationals over the common denominator `2^n`.
pub fn exceedance_union_bound_check(n: u32, lambda: f64) -> Result<UnionBoundReport, ExactError> {
    check_n(n, UNION_BOUND_MAX_N)?;
    let distribution = psl_distribution(n)?;
    let exceed_count = distribution.count_above(lambda);
    let denominator = 1u64 << n;
    let mut rhs_numerator: u128 = 0;
    for k in 1..n {
        rhs_numerator += rademacher_tail_count(k, lambda) << (n - k);
    }
    Ok(UnionBoundReport {
        n,
        lambda,
        exceed_count,
        denominator,
        rhs_numerator,
        lhs_proportion: exceed_count as f64 / denominator as f64,
        rhs_sum: rhs_numerator as f64 / denominator as f64,
        holds: u128::from(exceed_count) <= rhs_numerator,
    })
}

/// Binomial coefficient `C(k, i)` as an exact integer.
pub fn binomial(k: u32, i: u32) -> u128 {
    if i > k {
        return 0;
    }
    let i = i.min(k - i);
    let mut result: u128 = 1;
    for j in 0..i {
        result = result * u128::from(k - j) / u128::from(j + 1);
    }
    result
}

/// Number of sign vectors of length `k` whose sum exceeds `lambda` in
/// absolute value: `sum_{i: |k-2i| > lambda} C(k, i)`.
pub fn rademacher_tail_count(k: u32, lambda: f64) -> u128 {
    (0..=k)
        .filter(|&i| f64::from(k as i32 - 2 * i as i32).abs() > lambda)
        .map(|i| binomial(k, i))
        .sum()
}

/// Exact `P[|S_k| > lambda]` for a sum of `k` independent fair signs.
pub fn rademacher_tail_probability(k: u32, lambda: f64) -> f64 {
    rademacher_tail_count(k, lambda) as f64 / 2f64.powi(k as i32)
}
