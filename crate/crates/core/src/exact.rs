//! Exact transition kernel and stationary distribution of `B(n, p, q)` on
//! the partitions of a small `n`.

use crate::dynamics::{candidates, SolitaireParams};
use crate::error::{Error, Result};
use crate::partition::{Configuration, Partition};
use crate::scalar::Real;
use crate::shape::{pointwise_deviation, LimitShape, Scaling};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

/// Default largest `n` for which the state space is built (`p(26) = 2436`).
pub const DEFAULT_STATE_CAP: u64 = 26;

/// Default limit on enumerated pick configurations per kernel row.
pub const DEFAULT_ROW_BUDGET: u64 = 100_000_000;

/// Above this many states the solver switches from a dense solve to power
/// iteration.
pub const DENSE_STATE_LIMIT: usize = 5000;

/// Partitions of `n` in reverse-lexicographic order, with a reverse lookup.
#[derive(Debug, Clone)]
pub struct StateIndex {
    n: u64,
    states: Vec<Partition>,
    lookup: HashMap<Vec<u64>, usize>,
}

impl StateIndex {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &Partition {
        &self.states[i]
    }

    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    /// Index of the partition with these (sorted) parts.
    pub fn index_of(&self, parts: &[u64]) -> Option<usize> {
        self.lookup.get(parts).copied()
    }
}

pub fn enumerate_partitions(n: u64) -> Result<StateIndex> {
    enumerate_partitions_capped(n, DEFAULT_STATE_CAP)
}

pub fn enumerate_partitions_capped(n: u64, cap: u64) -> Result<StateIndex> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::capacity(format!("n = {n} exceeds the state-space cap of {cap}")));
    }
    fn rec(rest: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::new(prefix.clone()).expect("generated parts are sorted"));
            return;
        }
        for first in (1..=rest.min(max)).rev() {
            prefix.push(first);
            rec(rest - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut states = Vec::new();
    rec(n, n, &mut Vec::new(), &mut states);
    let lookup = states.iter().enumerate().map(|(i, s)| (s.parts().to_vec(), i)).collect();
    Ok(StateIndex { n, states, lookup })
}

fn binomial_pmf<T: Real>(trials: u64, p: T) -> Vec<T> {
    let mut coef = T::one();
    let q = T::one() - p;
    (0..=trials)
        .map(|x| {
            if x > 0 {
                coef = coef * T::of_u64(trials - x + 1) / T::of_u64(x);
            }
            coef * p.powi(x as i32) * q.powi((trials - x) as i32)
        })
        .collect()
}

struct PileGroup<T> {
    size: u64,
    count: u64,
    pmf: Vec<T>,
}

fn multiset_count(count: u64, outcomes: u64) -> u128 {
    // C(count + outcomes - 1, count)
    let mut acc: u128 = 1;
    for i in 1..=count as u128 {
        acc = acc.saturating_mul(outcomes as u128 + i - 1) / i;
    }
    acc
}

/// One row of the kernel: the distribution of the sorted state after one
/// move from `lambda`.
///
/// Equal piles are exchangeable, so each group of `m` piles of size `h` is
/// enumerated as a multiset of pick counts weighted by its multinomial
/// coefficient. `budget` caps the number of enumerated outcomes.
pub fn transition_row<T: Real>(
    index: &StateIndex,
    lambda: &Partition,
    params: &SolitaireParams,
    budget: u64,
) -> Result<Vec<(usize, T)>> {
    if lambda.total() != index.n() || params.n != index.n() {
        return Err(Error::InvalidParams(format!(
            "state space is for n = {}, got a state with {} cards and params with n = {}",
            index.n(),
            lambda.total(),
            params.n
        )));
    }
    let p = T::of(params.p);
    let mut groups: Vec<PileGroup<T>> = Vec::new();
    for &h in lambda.parts() {
        match groups.last_mut() {
            Some(g) if g.size == h => g.count += 1,
            _ => {
                let c = candidates(h, params.q);
                groups.push(PileGroup { size: h, count: 1, pmf: binomial_pmf(c, p) });
            }
        }
    }
    let work = groups.iter().fold(1u128, |acc, g| acc.saturating_mul(multiset_count(g.count, g.pmf.len() as u64)));
    if work > budget as u128 {
        return Err(Error::capacity(format!("row for {lambda} needs {work} enumerated outcomes, budget is {budget}")));
    }

    let mut acc: BTreeMap<usize, T> = BTreeMap::new();
    let mut remainders = Vec::with_capacity(lambda.len() + 1);
    let mut walk = RowWalk { index, groups: &groups, acc: &mut acc, remainders: &mut remainders };
    walk.group(0, T::one(), 0)?;
    Ok(acc.into_iter().collect())
}

struct RowWalk<'a, T> {
    index: &'a StateIndex,
    groups: &'a [PileGroup<T>],
    acc: &'a mut BTreeMap<usize, T>,
    remainders: &'a mut Vec<u64>,
}

impl<T: Real> RowWalk<'_, T> {
    fn group(&mut self, gi: usize, weight: T, picked: u64) -> Result<()> {
        if gi == self.groups.len() {
            let mut parts: Vec<u64> = self.remainders.iter().copied().filter(|&h| h > 0).collect();
            if picked > 0 {
                parts.push(picked);
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let idx = self
                .index
                .index_of(&parts)
                .ok_or_else(|| Error::domain(format!("move produced {parts:?}, which is not a state")))?;
            let entry = self.acc.entry(idx).or_insert(T::zero());
            *entry = *entry + weight;
            return Ok(());
        }
        let top = self.groups[gi].pmf.len() as u64 - 1;
        self.outcome(gi, top, self.groups[gi].count, weight, picked)
    }

    /// Distributes `left` piles of group `gi` over pick counts `0..=x`.
    fn outcome(&mut self, gi: usize, x: u64, left: u64, weight: T, picked: u64) -> Result<()> {
        let group = &self.groups[gi];
        if x == 0 {
            let w = weight * group.pmf[0].powi(left as i32);
            if w == T::zero() {
                return Ok(());
            }
            let mark = self.remainders.len();
            self.remainders.extend(std::iter::repeat_n(group.size, left as usize));
            self.group(gi + 1, w, picked)?;
            self.remainders.truncate(mark);
            return Ok(());
        }
        let px = group.pmf[x as usize];
        let mut coef = T::one();
        for k in 0..=left {
            if k > 0 {
                coef = coef * T::of_u64(left - k + 1) / T::of_u64(k);
            }
            let w = weight * coef * px.powi(k as i32);
            if w == T::zero() {
                continue;
            }
            let mark = self.remainders.len();
            self.remainders.extend(std::iter::repeat_n(group.size - x, k as usize));
            self.outcome(gi, x - 1, left - k, w, picked + k * x)?;
            self.remainders.truncate(mark);
        }
        Ok(())
    }
}

/// Sparse row-stochastic matrix over a [`StateIndex`].
#[derive(Debug, Clone)]
pub struct TransitionKernel<T> {
    index: Arc<StateIndex>,
    params: SolitaireParams,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> TransitionKernel<T> {
    /// Builds every row, in parallel.
    pub fn build(index: Arc<StateIndex>, params: SolitaireParams, budget: u64) -> Result<Self> {
        let rows = index
            .states()
            .par_iter()
            .map(|s| transition_row(&index, s, &params, budget))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitionKernel { index, params, rows })
    }

    pub fn index(&self) -> &Arc<StateIndex> {
        &self.index
    }

    pub fn params(&self) -> &SolitaireParams {
        &self.params
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.iter().fold(T::zero(), |s, &(_, v)| s + v)).collect()
    }

    /// `π P`.
    pub fn apply_left(&self, pi: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let w = pi[i];
            if w == T::zero() {
                continue;
            }
            for &(j, v) in row {
                out[j] = out[j] + w * v;
            }
        }
        out
    }

    /// `‖π P − π‖₁`.
    pub fn residual(&self, pi: &[T]) -> T {
        self.apply_left(pi).iter().zip(pi).fold(T::zero(), |s, (&a, &b)| s + (a - b).abs())
    }

    /// Strong connectivity of the transition graph.
    pub fn is_irreducible(&self) -> bool {
        let n = self.rows.len();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if v > T::zero() {
                    reverse[j].push(i);
                }
            }
        }
        let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(i) = queue.pop_front() {
                for j in adj(i) {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        let forward = |i: usize| self.rows[i].iter().filter(|&&(_, v)| v > T::zero()).map(|&(j, _)| j).collect();
        let backward = |i: usize| reverse[i].clone();
        n == 0 || (reach(&forward) && reach(&backward))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    PowerIteration,
}

#[derive(Debug, Clone)]
pub struct StationaryDistribution<T> {
    index: Arc<StateIndex>,
    pub probs: Vec<T>,
    pub method: SolveMethod,
    /// `‖π P − π‖₁` of the returned vector.
    pub residual: T,
    pub iterations: u64,
    /// Reachability check on the kernel, reported rather than enforced.
    pub irreducible: bool,
}

impl<T: Real> StationaryDistribution<T> {
    pub fn index(&self) -> &Arc<StateIndex> {
        &self.index
    }

    pub fn prob(&self, state: &Partition) -> Option<T> {
        self.index.index_of(state.parts()).map(|i| self.probs[i])
    }

    /// Iterates `(state, probability)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Partition, T)> {
        self.index.states().iter().zip(self.probs.iter().copied())
    }
}

/// Solves `π P = π`: dense linear solve up to [`DENSE_STATE_LIMIT`] states,
/// power iteration beyond.
pub fn stationary<T: Real>(kernel: &TransitionKernel<T>) -> Result<StationaryDistribution<T>> {
    if kernel.len() <= DENSE_STATE_LIMIT {
        stationary_dense(kernel)
    } else {
        stationary_power(kernel, T::of(1e-12), 1_000_000)
    }
}

fn reject_deterministic<T>(kernel: &TransitionKernel<T>) -> Result<()> {
    if kernel.params.p >= 1.0 {
        return Err(Error::domain(
            "p = 1 gives a deterministic game whose chain may be periodic or reducible; \
             a unique stationary distribution needs p < 1",
        ));
    }
    Ok(())
}

/// Solves `(Pᵀ − I) π = 0` with the last equation replaced by `Σ π = 1`.
pub fn stationary_dense<T: Real>(kernel: &TransitionKernel<T>) -> Result<StationaryDistribution<T>> {
    reject_deterministic(kernel)?;
    let s = kernel.len();
    let mut a = vec![T::zero(); s * s];
    for (i, row) in kernel.rows.iter().enumerate() {
        for &(j, v) in row {
            a[j * s + i] = a[j * s + i] + v;
        }
    }
    for i in 0..s {
        a[i * s + i] = a[i * s + i] - T::one();
    }
    for j in 0..s {
        a[(s - 1) * s + j] = T::one();
    }
    let mut b = vec![T::zero(); s];
    b[s - 1] = T::one();
    let mut pi = gaussian_solve(&mut a, &mut b, s)?;
    for v in pi.iter_mut() {
        *v = v.max(T::zero());
    }
    let total = pi.iter().fold(T::zero(), |acc, &v| acc + v);
    for v in pi.iter_mut() {
        *v = *v / total;
    }
    let residual = kernel.residual(&pi);
    Ok(StationaryDistribution {
        index: kernel.index.clone(),
        probs: pi,
        method: SolveMethod::Dense,
        residual,
        iterations: 0,
        irreducible: kernel.is_irreducible(),
    })
}

fn gaussian_solve<T: Real>(a: &mut [T], b: &mut [T], s: usize) -> Result<Vec<T>> {
    for col in 0..s {
        let pivot = (col..s)
            .max_by(|&i, &j| a[i * s + col].abs().partial_cmp(&a[j * s + col].abs()).unwrap())
            .expect("non-empty range");
        if a[pivot * s + col] == T::zero() {
            return Err(Error::domain("singular balance system; the chain is not irreducible"));
        }
        if pivot != col {
            for j in 0..s {
                a.swap(pivot * s + j, col * s + j);
            }
            b.swap(pivot, col);
        }
        let d = a[col * s + col];
        for i in col + 1..s {
            let f = a[i * s + col] / d;
            if f == T::zero() {
                continue;
            }
            for j in col..s {
                a[i * s + j] = a[i * s + j] - f * a[col * s + j];
            }
            b[i] = b[i] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); s];
    for i in (0..s).rev() {
        let mut acc = b[i];
        for j in i + 1..s {
            acc = acc - a[i * s + j] * x[j];
        }
        x[i] = acc / a[i * s + i];
    }
    Ok(x)
}

/// Power iteration from the uniform vector until `‖π P − π‖₁ ≤ tol`.
pub fn stationary_power<T: Real>(
    kernel: &TransitionKernel<T>,
    tol: T,
    max_iterations: u64,
) -> Result<StationaryDistribution<T>> {
    reject_deterministic(kernel)?;
    let s = kernel.len();
    let mut pi = vec![T::one() / T::from_usize(s).unwrap(); s];
    let mut residual = T::infinity();
    for it in 1..=max_iterations {
        let next = kernel.apply_left(&pi);
        residual = next.iter().zip(&pi).fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        pi = next;
        if residual <= tol {
            let residual = kernel.residual(&pi);
            return Ok(StationaryDistribution {
                index: kernel.index.clone(),
                probs: pi,
                method: SolveMethod::PowerIteration,
                residual,
                iterations: it,
                irreducible: kernel.is_irreducible(),
            });
        }
    }
    Err(Error::NonConvergence { iterations: max_iterations, residual: residual.as_f64() })
}

/// `π { λ : |ỹ_λ(x) − φ(x)| < ε }`.
pub fn stationary_shape_mass<T: Real>(
    dist: &StationaryDistribution<T>,
    shape: &LimitShape<T>,
    scaling: Scaling<T>,
    epsilon: T,
    x: T,
) -> Result<T> {
    if !(epsilon > T::zero()) || !(x >= T::zero()) {
        return Err(Error::domain(format!("need epsilon > 0 and x >= 0, got {epsilon}, {x}")));
    }
    let mut mass = T::zero();
    for (state, prob) in dist.iter() {
        let a = scaling.resolve(state)?;
        if pointwise_deviation(state, &a, shape, x)? < epsilon {
            mass = mass + prob;
        }
    }
    Ok(mass)
}

/// Total-variation distance between `π` and empirical counts over the same
/// state index.
pub fn total_variation<T: Real>(dist: &StationaryDistribution<T>, counts: &[u64]) -> Result<T> {
    if counts.len() != dist.probs.len() {
        return Err(Error::InvalidParams("count vector does not match the state index".into()));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::domain("no samples"));
    }
    let total = T::of_u64(total);
    let half = T::of(0.5);
    Ok(counts.iter().zip(&dist.probs).fold(T::zero(), |acc, (&c, &p)| acc + (T::of_u64(c) / total - p).abs()) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proportion::Proportion;

    fn params(n: u64, p: f64, q: &str) -> SolitaireParams {
        SolitaireParams::new(n, p, q.parse::<Proportion>().unwrap()).unwrap()
    }

    fn kernel(n: u64, p: f64, q: &str) -> TransitionKernel<f64> {
        let index = Arc::new(enumerate_partitions(n).unwrap());
        TransitionKernel::build(index, params(n, p, q), DEFAULT_ROW_BUDGET).unwrap()
    }

    fn row_of(k: &TransitionKernel<f64>, parts: &[u64]) -> Vec<(String, f64)> {
        let i = k.index().index_of(parts).unwrap();
        k.row(i).iter().map(|&(j, v)| (k.index().state(j).to_string(), v)).collect()
    }

    #[test]
    fn reverse_lexicographic_order() {
        let idx = enumerate_partitions(4).unwrap();
        let names: Vec<String> = idx.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["4", "3+1", "2+2", "2+1+1", "1+1+1+1"]);
        assert_eq!(enumerate_partitions(1).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(10).unwrap().len(), 42);
    }

    #[test]
    fn state_cap() {
        assert_eq!(enumerate_partitions(26).unwrap().len(), 2436);
        let err = enumerate_partitions(27).unwrap_err();
        assert!(matches!(err, Error::Capacity(ref m) if m.contains("26")));
        assert!(enumerate_partitions_capped(27, 30).is_ok());
    }

    #[test]
    fn single_candidate_row() {
        let k = kernel(2, 0.5, "1/2");
        assert_eq!(row_of(&k, &[2]), vec![("2".into(), 0.5), ("1+1".into(), 0.5)]);
    }

    #[test]
    fn two_singleton_piles_row() {
        let k = kernel(2, 0.5, "1/1");
        assert_eq!(row_of(&k, &[1, 1]), vec![("2".into(), 0.25), ("1+1".into(), 0.75)]);
    }

    #[test]
    fn full_sweep_with_p_one() {
        let k = kernel(6, 1.0, "1/1");
        for i in 0..k.len() {
            assert_eq!(row_of(&k, k.index().state(i).parts()), vec![("6".into(), 1.0)]);
        }
    }

    #[test]
    fn row_budget_is_enforced() {
        let index = enumerate_partitions(12).unwrap();
        let ones = Partition::new(vec![1; 12]).unwrap();
        // Twelve exchangeable singleton piles: 13 pick multisets.
        assert!(transition_row::<f64>(&index, &ones, &params(12, 0.5, "1/1"), 13).is_ok());
        let err = transition_row::<f64>(&index, &ones, &params(12, 0.5, "1/1"), 12).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn rows_are_stochastic() {
        for (n, p, q) in [(5, 0.3, "1/2"), (8, 0.7, "1/3"), (9, 0.5, "1/1"), (7, 0.9, "2/3")] {
            let k = kernel(n, p, q);
            for s in k.row_sums() {
                assert!((s - 1.0).abs() < 1e-12);
            }
            assert!(k.rows.iter().flatten().all(|&(_, v)| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn two_state_closed_form() {
        for p in [0.1, 0.5, 0.9] {
            let dist = stationary(&kernel(2, p, "1/2")).unwrap();
            let two = dist.prob(&Partition::new(vec![2]).unwrap()).unwrap();
            assert!((two - p / (1.0 + p)).abs() < 1e-12, "p = {p}: {two}");
            assert!(dist.irreducible);
        }
        let dist = stationary(&kernel(2, 0.1, "1/2")).unwrap();
        assert!((dist.probs[0] - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn single_state_chain() {
        let dist = stationary(&kernel(1, 0.5, "1/1")).unwrap();
        assert_eq!(dist.probs, vec![1.0]);
    }

    #[test]
    fn deterministic_chain_is_rejected() {
        let err = stationary(&kernel(4, 1.0, "1/1")).unwrap_err();
        assert!(err.to_string().contains("p < 1"));
    }

    #[test]
    fn dense_and_power_agree() {
        let k = kernel(9, 0.4, "1/2");
        let dense = stationary_dense(&k).unwrap();
        let power = stationary_power(&k, 1e-14, 1_000_000).unwrap();
        assert_eq!(power.method, SolveMethod::PowerIteration);
        assert!(dense.residual <= 1e-10);
        for (a, b) in dense.probs.iter().zip(&power.probs) {
            assert!((a - b).abs() < 1e-10);
        }
        let sum: f64 = dense.probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_reports_non_convergence() {
        let k = kernel(9, 0.4, "1/2");
        match stationary_power(&k, 1e-14, 3).unwrap_err() {
            Error::NonConvergence { iterations, residual } => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn single_precision_solver() {
        let index = Arc::new(enumerate_partitions(2).unwrap());
        let k = TransitionKernel::<f32>::build(index, params(2, 0.5, "1/2"), DEFAULT_ROW_BUDGET).unwrap();
        let dist = stationary(&k).unwrap();
        assert!((dist.probs[0] - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn shape_mass_examples() {
        let dist = stationary(&kernel(2, 0.5, "1/2")).unwrap();
        let exp = LimitShape::Exponential;
        // Height-normalised states start at 1 = e^0.
        let all = stationary_shape_mass(&dist, &exp, Scaling::ByFirstPart, 1.5, 0.0).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
        // With a = 1/(pq) = 4 at x = 0.1: (2) sits at height 4, (1,1) at 2.
        let a = Scaling::theoretical(0.5, 0.5).unwrap();
        let only_ones = stationary_shape_mass(&dist, &exp, a, 2.0, 0.1).unwrap();
        assert!((only_ones - 2.0 / 3.0).abs() < 1e-12);
        let tiny = stationary_shape_mass(&dist, &exp, Scaling::ByFirstPart, 1e-300, 0.5).unwrap();
        assert_eq!(tiny, 0.0);
    }

    #[test]
    fn shape_mass_is_monotone_in_epsilon() {
        let dist = stationary(&kernel(10, 0.3, "1/2")).unwrap();
        let mut last = 0.0;
        for i in 1..=40 {
            let eps = i as f64 * 0.025;
            let m = stationary_shape_mass(&dist, &LimitShape::Exponential, Scaling::ByFirstPart, eps, 0.7).unwrap();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn total_variation_of_exact_counts() {
        let dist = stationary(&kernel(2, 0.5, "1/2")).unwrap();
        let tv: f64 = total_variation(&dist, &[1, 2]).unwrap();
        assert!(tv < 1e-12);
        let tv: f64 = total_variation(&dist, &[1, 0]).unwrap();
        assert!((tv - 2.0 / 3.0).abs() < 1e-12);
    }
}
