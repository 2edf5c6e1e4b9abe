//! Card-labelled pile processes driven by a shared Bernoulli matrix, and the
//! Chernoff bound used to control them.
//!
//! Cards of a pile of size `A₁` carry labels `1..=A₁` from the top. Entry
//! `X[i][k]` decides whether card `i` would be picked in move `k`:
//!
//! * the **q-process** removes card `i` in move `k` when `X[i][k] = 1` and
//!   `i` is among the `⌈q A_k⌉` top-most remaining cards;
//! * the **s-threshold process** removes it when `X[i][k] = 1` and
//!   `i ≤ ⌈s A₁⌉`, a window fixed at the start.
//!
//! Because both read the same matrix, their pile sizes can be compared
//! outcome by outcome.

use crate::dynamics::SolitaireParams;
use crate::error::{Error, Result};
use crate::proportion::Proportion;
use crate::rng::RngStream;
use crate::scalar::Real;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

fn bernoulli_from_word(word: u64, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        word < (p * TWO_POW_64) as u64
    }
}

fn label_stream(chunk: u32, label: u64) -> u64 {
    (chunk as u64) << 32 | label
}

/// `X[i][k] ∈ {0, 1}` for labels `i = 1..=labels` and moves `k = 1..=moves`.
///
/// Seeded matrices derive entry `(i, k)` from ChaCha stream
/// `(chunk << 32) | i` at word `2 (k − 1)`, so any single entry can be
/// recomputed with [`BernoulliMatrix::entry`] without materialising the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliMatrix {
    labels: u64,
    moves: u64,
    bits: Vec<bool>,
}

impl BernoulliMatrix {
    pub fn from_seed(seed: u64, labels: u64, moves: u64, p: f64) -> Self {
        Self::from_key(seed, 0, labels, moves, p)
    }

    /// Matrix for chunk `chunk` of a union process.
    pub fn from_key(seed: u64, chunk: u32, labels: u64, moves: u64, p: f64) -> Self {
        assert!(labels < 1 << 32, "labels must fit in 32 bits");
        let mut bits = Vec::with_capacity((labels * moves) as usize);
        for i in 1..=labels {
            let mut rng = RngStream::new(seed, label_stream(chunk, i));
            bits.extend((0..moves).map(|_| bernoulli_from_word(rng.next_u64(), p)));
        }
        BernoulliMatrix { labels, moves, bits }
    }

    /// Entry `(i, k)` of the seeded matrix, computed on its own.
    pub fn entry(seed: u64, chunk: u32, p: f64, i: u64, k: u64) -> bool {
        let mut rng = RngStream::new(seed, label_stream(chunk, i));
        rng.seek(2 * (k as u128 - 1));
        bernoulli_from_word(rng.next_u64(), p)
    }

    pub fn from_fn(labels: u64, moves: u64, mut f: impl FnMut(u64, u64) -> bool) -> Self {
        let mut bits = Vec::with_capacity((labels * moves) as usize);
        for i in 1..=labels {
            for k in 1..=moves {
                bits.push(f(i, k));
            }
        }
        BernoulliMatrix { labels, moves, bits }
    }

    pub fn labels(&self) -> u64 {
        self.labels
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    /// `X[i][k]`, both indices starting at 1.
    pub fn get(&self, i: u64, k: u64) -> bool {
        self.bits[((i - 1) * self.moves + (k - 1)) as usize]
    }

    fn check(&self, a1: u64, r: u64) -> Result<()> {
        if self.labels < a1 || self.moves < r {
            return Err(Error::Dimension {
                need_labels: a1,
                need_moves: r,
                have_labels: self.labels,
                have_moves: self.moves,
            });
        }
        Ok(())
    }
}

/// `⌈s A₁⌉`, clamped to `A₁`.
pub fn threshold_cutoff<T: Real>(s: T, a1: u64) -> u64 {
    let c = (s * T::of_u64(a1)).ceil().to_u64().unwrap_or(u64::MAX);
    c.min(a1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdProcessState {
    pub a1: u64,
    /// Labels `1..=cutoff` are removable.
    pub cutoff: u64,
    /// `A₁^{[s]}, …, A_{r+1}^{[s]}`.
    pub sizes: Vec<u64>,
    /// Labels still in the pile after `r` moves, ascending.
    pub remaining: Vec<u64>,
    /// Surviving labels `≤ cutoff`.
    pub survivors_below: u64,
}

fn check_process_args(a1: u64, r: u64) -> Result<()> {
    if a1 == 0 {
        return Err(Error::InvalidParams("initial pile size must be at least 1".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParams("need at least one move".into()));
    }
    Ok(())
}

pub fn run_threshold<T: Real>(a1: u64, s: T, r: u64, x: &BernoulliMatrix) -> Result<ThresholdProcessState> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::domain(format!("threshold s must be in [0, 1], got {s}")));
    }
    run_threshold_cutoff(a1, threshold_cutoff(s, a1), r, x)
}

/// Threshold process with an explicit integer cutoff.
pub fn run_threshold_cutoff(a1: u64, cutoff: u64, r: u64, x: &BernoulliMatrix) -> Result<ThresholdProcessState> {
    check_process_args(a1, r)?;
    x.check(a1, r)?;
    let cutoff = cutoff.min(a1);
    let mut alive = vec![true; a1 as usize + 1];
    alive[0] = false;
    let mut size = a1;
    let mut sizes = Vec::with_capacity(r as usize + 1);
    sizes.push(size);
    for k in 1..=r {
        for i in 1..=cutoff {
            if alive[i as usize] && x.get(i, k) {
                alive[i as usize] = false;
                size -= 1;
            }
        }
        sizes.push(size);
    }
    let remaining: Vec<u64> = (1..=a1).filter(|&i| alive[i as usize]).collect();
    let survivors_below = remaining.iter().take_while(|&&i| i <= cutoff).count() as u64;
    debug_assert_eq!(size, a1 - cutoff + survivors_below);
    Ok(ThresholdProcessState { a1, cutoff, sizes, remaining, survivors_below })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QProcessState {
    pub a1: u64,
    pub q: Proportion,
    /// `A₁, …, A_{r+1}`.
    pub sizes: Vec<u64>,
    pub remaining: Vec<u64>,
}

pub fn run_qprocess(a1: u64, q: Proportion, r: u64, x: &BernoulliMatrix) -> Result<QProcessState> {
    check_process_args(a1, r)?;
    x.check(a1, r)?;
    let mut remaining: Vec<u64> = (1..=a1).collect();
    let mut sizes = Vec::with_capacity(r as usize + 1);
    sizes.push(a1);
    for k in 1..=r {
        let window = q.ceil_mul(remaining.len() as u64) as usize;
        let mut seen = 0;
        remaining.retain(|&i| {
            seen += 1;
            !(seen <= window && x.get(i, k))
        });
        sizes.push(remaining.len() as u64);
    }
    Ok(QProcessState { a1, q, sizes, remaining })
}

/// Outcome counts of the domination check for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub a1: u64,
    pub r: u64,
    pub q: Proportion,
    pub s: f64,
    pub cutoff: u64,
    /// Matrices examined (seeds, or all `2^{A₁ r}` outcomes).
    pub runs: u64,
    /// Whether `⌈s A₁⌉ ≤ ⌈q A₁⌉`, the hypothesis of the overestimation part.
    pub overestimate_applies: bool,
    /// Runs with `A_k^{[s]} < A_k` for some `k` while the hypothesis holds.
    pub overestimate_violations: u64,
    /// Runs with `(1 − q) A_{r+1}^{[s]} ≥ A₁ − ⌈s A₁⌉`.
    pub underestimate_hypothesis: u64,
    /// Among those, runs with `A_k^{[s]} > A_k` for some `k`.
    pub underestimate_violations: u64,
    /// Runs with `A_k^{[s]} < A_k` for some `k`, hypothesis or not.
    pub below_runs: u64,
    /// Runs with `A_k^{[s]} > A_k` for some `k`, hypothesis or not.
    pub above_runs: u64,
}

impl DominationReport {
    fn empty(a1: u64, r: u64, q: Proportion, s: f64, cutoff: u64) -> Self {
        DominationReport {
            a1,
            r,
            q,
            s,
            cutoff,
            runs: 0,
            overestimate_applies: cutoff <= q.ceil_mul(a1),
            overestimate_violations: 0,
            underestimate_hypothesis: 0,
            underestimate_violations: 0,
            below_runs: 0,
            above_runs: 0,
        }
    }

    fn record(&mut self, weight: u64, final_threshold_size: u64, threshold_below: bool, threshold_above: bool) {
        self.runs += weight;
        if threshold_below {
            self.below_runs += weight;
        }
        if threshold_above {
            self.above_runs += weight;
        }
        if self.overestimate_applies && threshold_below {
            self.overestimate_violations += weight;
        }
        if self.q.complement_mul_ge(final_threshold_size, self.a1 - self.cutoff) {
            self.underestimate_hypothesis += weight;
            if threshold_above {
                self.underestimate_violations += weight;
            }
        }
    }

    pub fn violations(&self) -> u64 {
        self.overestimate_violations + self.underestimate_violations
    }
}

/// Compares the two processes on one matrix and folds the outcome into
/// `report`.
pub fn compare_on(report: &mut DominationReport, x: &BernoulliMatrix) -> Result<()> {
    let t = run_threshold_cutoff(report.a1, report.cutoff, report.r, x)?;
    let qp = run_qprocess(report.a1, report.q, report.r, x)?;
    let below = t.sizes.iter().zip(&qp.sizes).any(|(s, q)| s < q);
    let above = t.sizes.iter().zip(&qp.sizes).any(|(s, q)| s > q);
    report.record(1, *t.sizes.last().unwrap(), below, above);
    Ok(())
}

/// Runs both processes on seeded matrices.
pub fn check_domination<T: Real>(
    a1: u64,
    q: Proportion,
    s: T,
    p: f64,
    r: u64,
    seeds: &[u64],
) -> Result<DominationReport> {
    check_process_args(a1, r)?;
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::domain(format!("threshold s must be in [0, 1], got {s}")));
    }
    let mut report = DominationReport::empty(a1, r, q, s.as_f64(), threshold_cutoff(s, a1));
    for &seed in seeds {
        compare_on(&mut report, &BernoulliMatrix::from_seed(seed, a1, r, p))?;
    }
    Ok(report)
}

/// Largest `A₁ · r` accepted by [`exhaustive_domination`].
pub const EXHAUSTIVE_BIT_CAP: u64 = 32;

/// Accounts for every one of the `2^{A₁ r}` matrices.
///
/// Moves are processed column by column. Matrices that lead to the same pair
/// of remaining-card sets (and the same violation flags) are merged with a
/// multiplicity, and matrix bits that neither process can read in a move are
/// summed out, so each matrix is counted exactly once without being visited
/// individually.
pub fn exhaustive_domination(a1: u64, q: Proportion, s: Proportion, r: u64) -> Result<DominationReport> {
    check_process_args(a1, r)?;
    if a1 * r > EXHAUSTIVE_BIT_CAP {
        return Err(Error::capacity(format!(
            "exhaustive enumeration needs A1 * r <= {EXHAUSTIVE_BIT_CAP}, got {}",
            a1 * r
        )));
    }
    let cutoff = s.ceil_mul(a1);
    let cutoff_mask: u32 = ((1u64 << cutoff) - 1) as u32;
    let full: u32 = ((1u64 << a1) - 1) as u32;
    const BELOW: u8 = 1;
    const ABOVE: u8 = 2;

    let mut layer: HashMap<(u32, u32, u8), u64> = HashMap::from([((full, full, 0), 1)]);
    for _ in 0..r {
        let mut next: HashMap<(u32, u32, u8), u64> = HashMap::with_capacity(layer.len() * 4);
        for (&(alive_q, alive_s, flags), &count) in &layer {
            let window = lowest_bits(alive_q, q.ceil_mul(alive_q.count_ones() as u64) as u32);
            let removable_s = alive_s & cutoff_mask;
            let relevant = window | removable_s;
            let free = a1 as u32 - relevant.count_ones();
            let weight = count << free;
            let mut sub = relevant;
            loop {
                let nq = alive_q & !(sub & window);
                let ns = alive_s & !(sub & removable_s);
                let mut f = flags;
                if ns.count_ones() < nq.count_ones() {
                    f |= BELOW;
                }
                if ns.count_ones() > nq.count_ones() {
                    f |= ABOVE;
                }
                *next.entry((nq, ns, f)).or_insert(0) += weight;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & relevant;
            }
        }
        layer = next;
    }

    let mut report = DominationReport::empty(a1, r, q, s.to_f64(), cutoff);
    let mut keys: Vec<_> = layer.into_iter().collect();
    keys.sort_unstable();
    for ((_, alive_s, flags), count) in keys {
        report.record(count, alive_s.count_ones() as u64, flags & BELOW != 0, flags & ABOVE != 0);
    }
    debug_assert_eq!(report.runs as u128, 1u128 << (a1 * r));
    Ok(report)
}

fn lowest_bits(mask: u32, count: u32) -> u32 {
    let mut out = 0;
    let mut m = mask;
    for _ in 0..count {
        if m == 0 {
            break;
        }
        let low = m & m.wrapping_neg();
        out |= low;
        m &= !low;
    }
    out
}

/// Exhaustive check over `A₁ ≤ max_a1`, `r ≤ max_r`, and every `(s, q)`
/// pair drawn from `values`. Reports are in a fixed order.
pub fn domination_grid(max_a1: u64, max_r: u64, values: &[Proportion]) -> Result<Vec<DominationReport>> {
    let mut points = Vec::new();
    for a1 in 1..=max_a1 {
        for r in 1..=max_r {
            for &s in values {
                for &q in values {
                    points.push((a1, r, s, q));
                }
            }
        }
    }
    points.into_par_iter().map(|(a1, r, s, q)| exhaustive_domination(a1, q, s, r)).collect()
}

/// Concatenated `r`-chunks of threshold processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionProcess {
    pub r: u64,
    pub s_requested: f64,
    /// `s` after clamping into `[0, 1]`.
    pub s_used: f64,
    pub chunk_starts: Vec<u64>,
    /// Sizes chunk by chunk, `r + 1` per chunk: chunk `j` (from 0) holds its
    /// sizes after `0..=r` of its moves, i.e. after `j r + k` moves overall.
    pub sizes: Vec<u64>,
}

impl UnionProcess {
    pub fn clamped(&self) -> bool {
        self.s_used != self.s_requested
    }
}

/// `(r, s)`-union process: chunk `j` is an `(s, Γ_j)`-threshold process of
/// `r` moves with its own Bernoulli matrix.
pub fn run_union<T: Real>(gammas: &[u64], r: u64, s: T, p: f64, seed: u64) -> Result<UnionProcess> {
    if gammas.is_empty() {
        return Err(Error::InvalidParams("union process needs at least one chunk".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParams("need at least one move per chunk".into()));
    }
    let s_used = s.max(T::zero()).min(T::one());
    let mut sizes = Vec::with_capacity(gammas.len() * (r as usize + 1));
    for (j, &g) in gammas.iter().enumerate() {
        if g == 0 {
            sizes.extend(std::iter::repeat_n(0, r as usize + 1));
            continue;
        }
        let x = BernoulliMatrix::from_key(seed, j as u32, g, r, p);
        let t = run_threshold_cutoff(g, threshold_cutoff(s_used, g), r, &x)?;
        sizes.extend(t.sizes);
    }
    Ok(UnionProcess { r, s_requested: s.as_f64(), s_used: s_used.as_f64(), chunk_starts: gammas.to_vec(), sizes })
}

/// Chunk starts `Γ_j = ⌈A₁ (1 − pq)^{(j−1) r}⌉` that follow exponential
/// decay from `A₁`; chunk `j` covers moves `(j−1) r + 1 ..= j r`.
pub fn decaying_chunk_starts(a1: u64, params: &SolitaireParams, r: u64, chunks: usize) -> Vec<u64> {
    let pq = params.p * params.q.to_f64();
    (0..chunks).map(|j| expected_decay(a1 as f64, pq, 1.0, j as u64 * r).ceil() as u64).collect()
}

/// `A₁ (1 − p q)^k`.
pub fn expected_decay<T: Real>(a1: T, p: T, q: T, k: u64) -> T {
    a1 * (T::one() - p * q).powf(T::of_u64(k))
}

/// `2 exp(−γ² / (3 μ))` with `μ = m p`, valid for `0 < γ < μ`.
pub fn chernoff_bound<T: Real>(m: u64, p: T, gamma: T) -> Result<T> {
    let mu = T::of_u64(m) * p;
    if !(gamma > T::zero() && gamma < mu) {
        return Err(Error::domain(format!("Chernoff bound needs 0 < gamma < mu = {mu}, got gamma = {gamma}")));
    }
    Ok(T::of(2.0) * (-(gamma * gamma) / (T::of(3.0) * mu)).exp())
}

/// Exact `P(X = k)` for `X ~ Bin(m, p)`, `k = 0..=m`.
///
/// Ratios of consecutive terms are accumulated outward from the mode and the
/// table is normalised at the end.
pub fn binomial_pmf_table<T: Real>(m: u64, p: T) -> Vec<T> {
    let mut out = vec![T::zero(); m as usize + 1];
    if p <= T::zero() {
        out[0] = T::one();
        return out;
    }
    if p >= T::one() {
        out[m as usize] = T::one();
        return out;
    }
    let odds = p / (T::one() - p);
    let mode = ((T::of_u64(m + 1) * p).floor().to_u64().unwrap_or(m)).min(m) as usize;
    out[mode] = T::one();
    for k in mode..m as usize {
        let ratio = T::from_usize(m as usize - k).unwrap() / T::from_usize(k + 1).unwrap() * odds;
        out[k + 1] = out[k] * ratio;
    }
    for k in (0..mode).rev() {
        let ratio = T::from_usize(k + 1).unwrap() / T::from_usize(m as usize - k).unwrap() / odds;
        out[k] = out[k + 1] * ratio;
    }
    let total = out.iter().fold(T::zero(), |a, &b| a + b);
    out.iter_mut().for_each(|v| *v = *v / total);
    out
}

/// Exact `P(|X − μ| ≥ γ)` for `X ~ Bin(m, p)`.
pub fn binomial_two_sided_tail<T: Real>(m: u64, p: T, gamma: T) -> T {
    let mu = T::of_u64(m) * p;
    binomial_pmf_table(m, p)
        .into_iter()
        .enumerate()
        .filter(|&(k, _)| (T::from_usize(k).unwrap() - mu).abs() >= gamma)
        .fold(T::zero(), |acc, (_, v)| acc + v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernoffRow<T> {
    pub m: u64,
    pub p: T,
    pub gamma: T,
    pub mu: T,
    pub bound: T,
    pub exact_tail: T,
}

/// Bound and exact tail at `γ = μ j / steps` for `j = 1..steps`.
pub fn chernoff_table<T: Real>(m: u64, p: T, steps: u64) -> Result<Vec<ChernoffRow<T>>> {
    if steps < 2 {
        return Err(Error::InvalidParams("need at least two steps".into()));
    }
    let mu = T::of_u64(m) * p;
    let pmf = binomial_pmf_table(m, p);
    (1..steps)
        .map(|j| {
            let gamma = mu * T::of_u64(j) / T::of_u64(steps);
            let exact_tail = pmf
                .iter()
                .enumerate()
                .filter(|&(k, _)| (T::from_usize(k).unwrap() - mu).abs() >= gamma)
                .fold(T::zero(), |acc, (_, &v)| acc + v);
            Ok(ChernoffRow { m, p, gamma, mu, bound: chernoff_bound(m, p, gamma)?, exact_tail })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(num: u64, den: u64) -> Proportion {
        Proportion::new(num, den).unwrap()
    }

    fn ones(a1: u64, r: u64) -> BernoulliMatrix {
        BernoulliMatrix::from_fn(a1, r, |_, _| true)
    }

    #[test]
    fn threshold_examples() {
        let t = run_threshold(4, 0.5, 2, &ones(4, 2)).unwrap();
        assert_eq!(t.sizes, vec![4, 2, 2]);
        assert_eq!(t.survivors_below, 0);
        let t = run_threshold(4, 1.0, 1, &ones(4, 1)).unwrap();
        assert_eq!(t.sizes, vec![4, 0]);
        let zeros = BernoulliMatrix::from_seed(3, 6, 3, 0.0);
        assert_eq!(run_threshold(6, 0.5, 3, &zeros).unwrap().sizes, vec![6; 4]);
    }

    #[test]
    fn qprocess_examples() {
        assert_eq!(run_qprocess(4, q(1, 2), 2, &ones(4, 2)).unwrap().sizes, vec![4, 2, 1]);
        assert_eq!(run_qprocess(5, q(1, 1), 1, &ones(5, 1)).unwrap().sizes, vec![5, 0]);
        let zeros = BernoulliMatrix::from_seed(3, 6, 3, 0.0);
        assert_eq!(run_qprocess(6, q(1, 3), 3, &zeros).unwrap().sizes, vec![6; 4]);
    }

    #[test]
    fn hand_traced_domination() {
        let mut report = DominationReport::empty(4, 2, q(1, 2), 0.5, 2);
        compare_on(&mut report, &ones(4, 2)).unwrap();
        assert!(report.overestimate_applies);
        assert_eq!(report.overestimate_violations, 0);
    }

    #[test]
    fn dimension_and_domain_errors() {
        let x = ones(3, 2);
        assert!(matches!(run_threshold(4, 0.5, 2, &x), Err(Error::Dimension { .. })));
        assert!(matches!(run_qprocess(3, q(1, 2), 3, &x), Err(Error::Dimension { .. })));
        assert!(matches!(run_threshold(3, 1.5, 2, &x), Err(Error::Domain(_))));
    }

    #[test]
    fn lazy_entries_match_materialised_matrix() {
        let x = BernoulliMatrix::from_key(99, 2, 20, 7, 0.3);
        for i in 1..=20 {
            for k in 1..=7 {
                assert_eq!(x.get(i, k), BernoulliMatrix::entry(99, 2, 0.3, i, k));
            }
        }
        // Entries do not depend on the matrix dimensions.
        let wider = BernoulliMatrix::from_key(99, 2, 25, 9, 0.3);
        assert!((1..=20).all(|i| (1..=7).all(|k| wider.get(i, k) == x.get(i, k))));
    }

    #[test]
    fn threshold_equal_to_q_always_overestimates() {
        let report = exhaustive_domination(5, q(1, 2), q(1, 2), 3).unwrap();
        assert!(report.overestimate_applies);
        assert_eq!(report.runs, 1 << 15);
        assert_eq!(report.violations(), 0);
    }

    #[test]
    fn exhaustive_matches_matrix_by_matrix_enumeration() {
        let values = [q(1, 4), q(1, 2), q(3, 4), q(1, 1)];
        for a1 in 1..=4u64 {
            for r in 1..=3u64 {
                for &s in &values {
                    for &qq in &values {
                        let fast = exhaustive_domination(a1, qq, s, r).unwrap();
                        let mut slow = DominationReport::empty(a1, r, qq, s.to_f64(), s.ceil_mul(a1));
                        for mask in 0u64..1 << (a1 * r) {
                            let x = BernoulliMatrix::from_fn(a1, r, |i, k| mask >> ((i - 1) * r + k - 1) & 1 == 1);
                            compare_on(&mut slow, &x).unwrap();
                        }
                        assert_eq!(fast, slow, "a1={a1} r={r} s={s} q={qq}");
                    }
                }
            }
        }
    }

    #[test]
    fn unconditional_counts_see_failures_outside_the_hypotheses() {
        // A wide threshold window removes more than the q-process can.
        let wide = exhaustive_domination(4, q(1, 4), q(1, 1), 2).unwrap();
        assert!(!wide.overestimate_applies);
        assert!(wide.below_runs > 0);
        assert_eq!(wide.overestimate_violations, 0);
        // A narrow one removes less.
        let narrow = exhaustive_domination(4, q(1, 1), q(1, 4), 2).unwrap();
        assert!(narrow.above_runs > 0);
    }

    #[test]
    fn exhaustive_cap() {
        assert!(matches!(exhaustive_domination(9, q(1, 2), q(1, 2), 4), Err(Error::Capacity(_))));
    }

    #[test]
    fn union_chunks_restart_at_their_initial_size() {
        let u = run_union(&[1000, 1000], 24, 1.48, 0.01, 5).unwrap();
        assert_eq!(u.sizes.len(), 50);
        assert_eq!(u.sizes[0], 1000);
        assert_eq!(u.sizes[25], 1000);
        assert!(u.clamped());
        assert!(u.sizes[..25].windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn single_chunk_union_is_a_threshold_process() {
        let u = run_union(&[40], 6, 0.5, 0.2, 11).unwrap();
        let x = BernoulliMatrix::from_seed(11, 40, 6, 0.2);
        assert_eq!(u.sizes, run_threshold(40, 0.5, 6, &x).unwrap().sizes);
    }

    #[test]
    fn chernoff_examples() {
        let b: f64 = chernoff_bound(100, 0.5, 25.0).unwrap();
        assert!((b - 2.0 * (-625.0f64 / 150.0).exp()).abs() < 1e-15);
        assert!((b - 0.031008).abs() < 1e-6);
        let near_zero: f64 = chernoff_bound(100, 0.5, 1e-9).unwrap();
        assert!((near_zero - 2.0).abs() < 1e-12);
        assert!(chernoff_bound(100, 0.5, 50.0).is_err());
        assert!(chernoff_bound(100, 0.5, 0.0).is_err());
        let tail: f64 = binomial_two_sided_tail(100, 0.5, 25.0);
        assert!(tail < b);
        assert!(tail > 5.0e-7 && tail < 6.0e-7, "{tail}");
    }

    #[test]
    fn expected_decay_values() {
        assert_eq!(expected_decay(1000.0, 0.01, 1.0, 0), 1000.0);
        let v: f64 = expected_decay(1000.0, 0.01, 1.0, 100);
        assert!((v - 366.0323).abs() < 1e-3);
        for xi in 1..=50 {
            let x = xi as f64 * 0.1;
            let pq = 1e-3;
            let k = (x / pq).round() as u64;
            let approx: f64 = expected_decay(1.0, pq, 1.0, k);
            assert!((approx / (-x).exp() - 1.0).abs() <= pq * x);
        }
    }

    #[test]
    fn pmf_table_sums_to_one() {
        for (m, p) in [(10, 0.1), (1000, 0.9), (1000, 0.5), (7, 1.0)] {
            let s: f64 = binomial_pmf_table(m, p).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "m={m} p={p}: {s}");
        }
    }

    proptest! {
        #[test]
        fn coupled_processes_are_deterministic_in_the_matrix(seed in any::<u64>(), a1 in 1u64..40, r in 1u64..8) {
            let x = BernoulliMatrix::from_seed(seed, a1, r, 0.3);
            prop_assert_eq!(run_qprocess(a1, q(1, 3), r, &x).unwrap(), run_qprocess(a1, q(1, 3), r, &x).unwrap());
            let t = run_threshold(a1, 0.4, r, &x).unwrap();
            prop_assert_eq!(t.sizes.len() as u64, r + 1);
            prop_assert!(t.sizes.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(*t.sizes.last().unwrap() >= a1 - t.cutoff);
            prop_assert_eq!(*t.sizes.last().unwrap(), a1 - t.cutoff + t.survivors_below);
        }
    }
}
