//! Long runs of `B(n, p, q)`: burn-in schedule, windowed sampling, and
//! deviation statistics against a limit shape.

use crate::dynamics::{advance_random, triangular_start, SolitaireParams};
use crate::error::{Error, Result};
use crate::exact::StateIndex;
use crate::partition::{ord, Configuration, WeakComposition};
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::shape::{deviation, sup_distance, DeviationReport, LimitShape, Scaling};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Recorded-move count above which snapshots are thinned.
pub const MAX_AUTO_SNAPSHOTS: u64 = 1000;

/// Default cap on stored snapshots.
pub const DEFAULT_SNAPSHOT_BUDGET: usize = 100_000;

/// Environment variable capping the number of chains run at once.
pub const THREADS_ENV: &str = "BULSOL_THREADS";

/// Burn-in and window lengths for a parameter set (natural logarithm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule<T> {
    /// `D = ⌈14 ln n / (p q)⌉`, at least 1.
    pub burn_in: u64,
    /// `M = ⌈n² / p⌉`.
    pub window_full: u128,
    /// `max(10 D, 10⁴)`.
    pub window_practical: u64,
    /// `r = ⌈ρ^{-1/3} / p⌉`.
    pub chunk_length: u64,
    /// `ρ = p q² n / (1 + ln n)`.
    pub rho: T,
    /// `s = q (1 + 2 p r)`.
    pub s: T,
}

// Ceiling that ignores floating-point noise just above an integer.
fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= r.abs() * 1e-12 {
        r
    } else {
        x.ceil()
    }
}

pub fn make_schedule<T: Real>(params: &SolitaireParams) -> Schedule<T> {
    let n = params.n as f64;
    let p = params.p;
    let q = params.q.to_f64();
    let ln_n = n.ln();
    let burn_in = (ceil_tolerant(14.0 * ln_n / (p * q)) as u64).max(1);
    let window_full = ceil_tolerant(n * n / p) as u128;
    let rho = p * q * q * n / (1.0 + ln_n);
    let chunk_length = (ceil_tolerant(rho.powf(-1.0 / 3.0) / p) as u64).max(1);
    let s = q * (1.0 + 2.0 * p * chunk_length as f64);
    Schedule {
        burn_in,
        window_full,
        window_practical: (10 * burn_in).max(10_000),
        chunk_length,
        rho: T::of(rho),
        s: T::of(s),
    }
}

/// How a single chain is run and measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig<T> {
    /// Moves before recording starts; `None` uses the schedule's `D`.
    pub burn_in: Option<u64>,
    /// Recorded moves.
    pub window: u64,
    /// Moves between snapshots; `None` picks 1 for short windows and thins
    /// longer ones to at most [`MAX_AUTO_SNAPSHOTS`] snapshots.
    pub stride: Option<u64>,
    pub shape: LimitShape<T>,
    pub scaling: Scaling<T>,
    /// Points where pointwise deviation is tallied.
    pub grid: Vec<T>,
    /// Interval of the sup-deviation.
    pub interval: (T, T),
    pub epsilon: T,
    /// Measure the sorted configuration rather than the composition.
    pub sorted: bool,
    /// Keep every snapshot state.
    pub keep_states: bool,
    pub snapshot_budget: usize,
}

impl<T: Real> ChainConfig<T> {
    /// Grid `0, 0.01, …, 3`, interval `[0, 3]`, `ε = 0.1`, sorted states.
    pub fn new(window: u64, shape: LimitShape<T>, scaling: Scaling<T>) -> Self {
        let grid = (0..=300).map(|i| T::of(i as f64 / 100.0)).collect();
        ChainConfig {
            burn_in: None,
            window,
            stride: None,
            shape,
            scaling,
            grid,
            interval: (T::zero(), T::of(3.0)),
            epsilon: T::of(0.1),
            sorted: true,
            keep_states: false,
            snapshot_budget: DEFAULT_SNAPSHOT_BUDGET,
        }
    }

    pub fn resolved_stride(&self) -> u64 {
        self.stride.unwrap_or(if self.window <= MAX_AUTO_SNAPSHOTS {
            1
        } else {
            self.window.div_ceil(MAX_AUTO_SNAPSHOTS)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot<T> {
    /// Recorded-move index, starting at 1 after burn-in.
    pub at: u64,
    pub sup: T,
    pub fraction_within: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<WeakComposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStats<T> {
    pub seed: u64,
    pub stream: u64,
    pub params: SolitaireParams,
    pub burn_in: u64,
    pub window: u64,
    pub stride: u64,
    pub shape: LimitShape<T>,
    pub scaling: Scaling<T>,
    pub sorted: bool,
    pub interval: (T, T),
    pub epsilon: T,
    /// Nonempty piles after each recorded move.
    pub piles: Vec<u64>,
    /// New-pile size of each recorded move.
    pub new_pile: Vec<u64>,
    pub snapshots: Vec<Snapshot<T>>,
    pub grid: Vec<T>,
    /// Per grid point, the fraction of snapshots within `ε`.
    pub within_by_x: Vec<T>,
    pub mean_sup: Option<T>,
    pub max_sup: Option<T>,
    /// Deviation of the final state, when anything was recorded.
    pub final_deviation: Option<DeviationReport<T>>,
    pub final_state: WeakComposition,
}

impl<T: Real> ChainStats<T> {
    pub fn final_sup(&self) -> Option<T> {
        self.final_deviation.as_ref().map(|d| d.sup_on_interval)
    }

    /// Largest `|α₁ − pqn| / (pqn)` over recorded moves.
    pub fn max_new_pile_deviation(&self) -> Option<f64> {
        let target = self.params.p * self.params.q.to_f64() * self.params.n as f64;
        self.new_pile.iter().map(|&a| (a as f64 - target).abs() / target).reduce(f64::max)
    }

    /// Largest `N(α) / (qn)` over recorded moves.
    pub fn max_pile_ratio(&self) -> Option<f64> {
        let qn = self.params.q.to_f64() * self.params.n as f64;
        self.piles.iter().map(|&k| k as f64 / qn).reduce(f64::max)
    }
}

fn measure<T: Real>(state: &WeakComposition, cfg: &ChainConfig<T>) -> Result<DeviationReport<T>> {
    if cfg.sorted {
        let lambda = ord(state);
        let a = cfg.scaling.resolve(&lambda)?;
        deviation(&lambda, &a, &cfg.shape, &cfg.grid, cfg.interval, cfg.epsilon)
    } else {
        let a = cfg.scaling.resolve(state)?;
        deviation(state, &a, &cfg.shape, &cfg.grid, cfg.interval, cfg.epsilon)
    }
}

/// Runs burn-in and then `window` recorded moves from `start`.
///
/// The final recorded move is always snapshotted.
pub fn run_chain<T: Real>(
    start: &WeakComposition,
    params: &SolitaireParams,
    cfg: &ChainConfig<T>,
    seed: u64,
    stream: u64,
) -> Result<ChainStats<T>> {
    if start.total() != params.n {
        return Err(Error::InvalidParams(format!(
            "start has {} cards, parameters say n = {}",
            start.total(),
            params.n
        )));
    }
    let stride = cfg.resolved_stride();
    if stride == 0 {
        return Err(Error::InvalidParams("snapshot stride must be >= 1".into()));
    }
    let wanted = cfg.window / stride + 1;
    if wanted > cfg.snapshot_budget as u64 {
        return Err(Error::capacity(format!("{wanted} snapshots requested, budget is {}", cfg.snapshot_budget)));
    }
    let burn_in = cfg.burn_in.unwrap_or_else(|| make_schedule::<f64>(params).burn_in);
    let mut rng = RngStream::new(seed, stream);
    let mut state = start.clone();
    for _ in 0..burn_in {
        advance_random(&mut state, params, &mut rng);
    }

    let mut piles = Vec::with_capacity(cfg.window as usize);
    let mut new_pile = Vec::with_capacity(cfg.window as usize);
    let mut snapshots = Vec::new();
    let mut within = vec![0u64; cfg.grid.len()];
    let mut final_deviation = None;
    for t in 1..=cfg.window {
        let m = advance_random(&mut state, params, &mut rng);
        piles.push(state.nonempty_piles() as u64);
        new_pile.push(m.new_pile);
        if t % stride == 0 || t == cfg.window {
            let report = measure(&state, cfg)?;
            for (w, &(_, d)) in within.iter_mut().zip(&report.pointwise) {
                if d < cfg.epsilon {
                    *w += 1;
                }
            }
            snapshots.push(Snapshot {
                at: t,
                sup: report.sup_on_interval,
                fraction_within: report.fraction_within,
                state: cfg.keep_states.then(|| state.clone()),
            });
            if t == cfg.window {
                final_deviation = Some(report);
            }
        }
    }

    let count = T::from_usize(snapshots.len()).unwrap();
    let (mean_sup, max_sup) = if snapshots.is_empty() {
        (None, None)
    } else {
        let sum = snapshots.iter().fold(T::zero(), |a, s| a + s.sup);
        let max = snapshots.iter().fold(T::neg_infinity(), |a, s| a.max(s.sup));
        (Some(sum / count), Some(max))
    };
    let within_by_x =
        if snapshots.is_empty() { Vec::new() } else { within.iter().map(|&w| T::of_u64(w) / count).collect() };
    Ok(ChainStats {
        seed,
        stream,
        params: *params,
        burn_in,
        window: cfg.window,
        stride,
        shape: cfg.shape.clone(),
        scaling: cfg.scaling,
        sorted: cfg.sorted,
        interval: cfg.interval,
        epsilon: cfg.epsilon,
        piles,
        new_pile,
        snapshots,
        grid: cfg.grid.clone(),
        within_by_x,
        mean_sup,
        max_sup,
        final_deviation,
        final_state: state,
    })
}

/// Value of `BULSOL_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

/// Runs `chains` independent chains; chain `j` uses stream `j` of
/// `master_seed`. Results are in chain order whatever the thread count.
pub fn run_chains<T: Real>(
    start: &WeakComposition,
    params: &SolitaireParams,
    cfg: &ChainConfig<T>,
    master_seed: u64,
    chains: u64,
) -> Result<Vec<ChainStats<T>>> {
    let work = || -> Result<Vec<ChainStats<T>>> {
        (0..chains).into_par_iter().map(|j| run_chain(start, params, cfg, master_seed, j)).collect()
    };
    match thread_cap() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Fraction of snapshots whose sup-deviation on `interval` is below `epsilon`.
///
/// Uses the stored sup values when `interval` is the one the chain was
/// measured on, and otherwise needs stored states.
pub fn deviation_timeseries<T: Real>(stats: &ChainStats<T>, epsilon: T, interval: (T, T)) -> Result<T> {
    if stats.snapshots.is_empty() {
        return Err(Error::domain("no recorded snapshots"));
    }
    let mut hits = 0usize;
    for snap in &stats.snapshots {
        let sup = if interval == stats.interval {
            snap.sup
        } else {
            let state = snap
                .state
                .as_ref()
                .ok_or_else(|| Error::domain("a different interval needs snapshot states; run with keep_states"))?;
            let sorted = ord(state);
            let a = stats.scaling.resolve(&sorted)?;
            sup_distance(&sorted, &a, &stats.shape, interval.0, interval.1)?
        };
        if sup < epsilon {
            hits += 1;
        }
    }
    Ok(T::from_usize(hits).unwrap() / T::from_usize(stats.snapshots.len()).unwrap())
}

/// Visit counts of each sorted state over `samples` moves after `burn_in`.
pub fn sample_state_counts(
    index: &StateIndex,
    start: &WeakComposition,
    params: &SolitaireParams,
    burn_in: u64,
    samples: u64,
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    if start.total() != index.n() || params.n != index.n() {
        return Err(Error::InvalidParams("start, parameters and state index disagree on n".into()));
    }
    let mut state = start.clone();
    for _ in 0..burn_in {
        advance_random(&mut state, params, rng);
    }
    let mut counts = vec![0u64; index.len()];
    let mut buf = Vec::new();
    for _ in 0..samples {
        advance_random(&mut state, params, rng);
        buf.clear();
        buf.extend(state.parts().iter().copied().filter(|&h| h > 0));
        buf.sort_unstable_by(|a, b| b.cmp(a));
        let i =
            index.index_of(&buf).ok_or_else(|| Error::InvalidParams(format!("state {buf:?} is not in the index")))?;
        counts[i] += 1;
    }
    Ok(counts)
}

/// Number of moves until the pile at position `pile` of `start` is empty,
/// or `None` if it survives `limit` moves.
///
/// A pile never changes position relative to later piles, so after `t`
/// moves it sits at index `pile + t`.
pub fn consumption_time(
    start: &WeakComposition,
    pile: usize,
    params: &SolitaireParams,
    limit: u64,
    rng: &mut RngStream,
) -> Result<Option<u64>> {
    if start.part(pile) == 0 {
        return Err(Error::InvalidParams(format!("pile {pile} is empty")));
    }
    let mut state = start.clone();
    for t in 1..=limit {
        advance_random(&mut state, params, rng);
        if state.part(pile + t as usize) == 0 {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    pub n: u64,
    pub p: f64,
    /// `q` as `"num/den"`.
    pub q: crate::proportion::Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRunConfig {
    pub seeds: u64,
    pub master_seed: u64,
    /// Moves per chain: the schedule's `D`, capped here.
    pub max_moves: u64,
    pub interval: (f64, f64),
    /// Fits worse than this against both shapes are "intermediate".
    pub fit_epsilon: f64,
    /// Differences below this are "ambiguous".
    pub tie_window: f64,
}

impl Default for RegimeRunConfig {
    fn default() -> Self {
        RegimeRunConfig {
            seeds: 4,
            master_seed: 0,
            max_moves: 200_000,
            interval: (0.0, 3.0),
            fit_epsilon: 0.05,
            tie_window: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub n: u64,
    pub p: f64,
    pub q: crate::proportion::Proportion,
    /// `p q² n`.
    pub pq2n: f64,
    /// `p q² n / ln n`.
    pub pq2n_over_ln_n: f64,
    pub moves: u64,
    pub label: String,
    pub sup_exponential: f64,
    pub sup_triangle: f64,
}

/// Label for a pair of mean sup-deviations.
pub fn regime_label(sup_exp: f64, sup_tri: f64, fit_epsilon: f64, tie_window: f64) -> &'static str {
    if sup_exp.min(sup_tri) >= fit_epsilon {
        "intermediate"
    } else if (sup_exp - sup_tri).abs() < tie_window {
        "ambiguous"
    } else if sup_exp < sup_tri {
        "exponential"
    } else {
        "triangle"
    }
}

/// Compares exponential and triangular fits, under first-part scaling, at
/// each point. Reports only; nothing here is asserted.
pub fn regime_scan(points: &[RegimePoint], cfg: &RegimeRunConfig) -> Result<Vec<RegimeRow>> {
    points
        .iter()
        .map(|pt| {
            let params = SolitaireParams::new(pt.n, pt.p, pt.q)?;
            let moves = make_schedule::<f64>(&params).burn_in.min(cfg.max_moves);
            let start: WeakComposition = triangular_start(pt.n)?.into();
            let finals: Vec<WeakComposition> = (0..cfg.seeds)
                .into_par_iter()
                .map(|j| {
                    let mut rng = RngStream::new(cfg.master_seed, j);
                    let mut state = start.clone();
                    for _ in 0..moves {
                        advance_random(&mut state, &params, &mut rng);
                    }
                    state
                })
                .collect();
            let mut sums = [0.0f64; 2];
            for state in &finals {
                let lambda = ord(state);
                let a = Scaling::<f64>::ByFirstPart.resolve(&lambda)?;
                for (k, shape) in [LimitShape::Exponential, LimitShape::Triangle].iter().enumerate() {
                    sums[k] += sup_distance(&lambda, &a, shape, cfg.interval.0, cfg.interval.1)?;
                }
            }
            let seeds = cfg.seeds.max(1) as f64;
            let (sup_exponential, sup_triangle) = (sums[0] / seeds, sums[1] / seeds);
            let pq2n = params.regime_value();
            Ok(RegimeRow {
                n: pt.n,
                p: pt.p,
                q: pt.q,
                pq2n,
                pq2n_over_ln_n: pq2n / (pt.n as f64).ln(),
                moves,
                label: regime_label(sup_exponential, sup_triangle, cfg.fit_epsilon, cfg.tie_window).into(),
                sup_exponential,
                sup_triangle,
            })
        })
        .collect()
}
