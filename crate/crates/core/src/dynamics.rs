//! One-step and multi-step evolution of card configurations.
//!
//! Configurations evolve as weak compositions: each move takes cards from
//! every nonempty pile and puts them, possibly zero of them, in a new bowl
//! at the front. Per-pile draws are made front to back over nonempty piles.

use crate::error::{Error, Result};
use crate::partition::{Configuration, Partition, WeakComposition};
use crate::proportion::Proportion;
use crate::rng::RngStream;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

/// Parameters of the chain `B(n, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitaireParams {
    pub n: u64,
    pub p: f64,
    pub q: Proportion,
}

impl SolitaireParams {
    pub fn new(n: u64, p: f64, q: Proportion) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParams(format!("p must be in (0,1], got {p}")));
        }
        Ok(SolitaireParams { n, p, q })
    }

    /// `p q² n`, the quantity separating the regimes.
    pub fn regime_value(&self) -> f64 {
        let q = self.q.to_f64();
        self.p * q * q * self.n as f64
    }
}

/// Number of candidate cards `⌈q h⌉` in a pile of `h` cards.
pub fn candidates(h: u64, q: Proportion) -> u64 {
    q.ceil_mul(h)
}

/// Deterministic picking rule `σ(h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaRule {
    /// One card from every nonempty pile.
    Classic,
    /// `⌈q h⌉` cards.
    Proportion(Proportion),
}

impl SigmaRule {
    pub fn sigma(&self, h: u64) -> u64 {
        match *self {
            _ if h == 0 => 0,
            SigmaRule::Classic => 1,
            SigmaRule::Proportion(q) => candidates(h, q),
        }
    }

    /// `σ(1) = 1` and both `σ(h)` and `h − σ(h)` non-decreasing on `1..=max_h`.
    pub fn is_well_behaved(&self, max_h: u64) -> bool {
        if self.sigma(1) != 1 {
            return false;
        }
        (1..max_h).all(|h| {
            let (a, b) = (self.sigma(h), self.sigma(h + 1));
            b >= a && (h + 1 - b) >= (h - a)
        })
    }
}

/// What happened during one random move.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveOutcome {
    /// Cards picked from each pile of the pre-move composition (zero for
    /// empty bowls).
    pub picked_per_pile: Vec<u64>,
    /// Total number of candidate cards `κ`.
    pub kappa: u64,
    pub new_pile: u64,
    /// Total rounding effect `R = κ − q n_alive`.
    pub rounding_total: Ratio<i128>,
}

/// Draws `Binomial(trials, p)` exactly; consumes no randomness when the
/// outcome is certain.
pub fn sample_binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> u64 {
    if trials == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        trials
    } else {
        Binomial::new(trials, p).expect("p in (0,1)").sample(rng)
    }
}

/// Applies the deterministic rule `σ` once.
pub fn step_deterministic(alpha: &WeakComposition, sigma: SigmaRule) -> WeakComposition {
    let mut parts = Vec::with_capacity(alpha.len() + 1);
    parts.push(0);
    let mut picked = 0;
    for &h in alpha.parts() {
        let take = sigma.sigma(h);
        picked += take;
        parts.push(h - take);
    }
    parts[0] = picked;
    WeakComposition::new(parts)
}

/// Counters from an in-place random move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveSummary {
    pub kappa: u64,
    pub new_pile: u64,
    /// Nonempty piles before the move.
    pub piles_before: usize,
}

/// Applies one random move in place.
pub fn advance_random(alpha: &mut WeakComposition, params: &SolitaireParams, rng: &mut RngStream) -> MoveSummary {
    advance_random_with(alpha, params, rng, |_, _| {})
}

fn advance_random_with(
    alpha: &mut WeakComposition,
    params: &SolitaireParams,
    rng: &mut RngStream,
    mut on_pick: impl FnMut(usize, u64),
) -> MoveSummary {
    #[cfg(debug_assertions)]
    let before = alpha.total();
    let mut kappa = 0;
    let mut new_pile = 0;
    let mut piles_before = 0;
    let parts = alpha.parts_mut();
    for (i, h) in parts.iter_mut().enumerate() {
        if *h == 0 {
            continue;
        }
        piles_before += 1;
        let c = candidates(*h, params.q);
        kappa += c;
        let x = sample_binomial(c, params.p, rng);
        on_pick(i, x);
        *h -= x;
        new_pile += x;
    }
    parts.insert(0, new_pile);
    alpha.renormalize();
    #[cfg(debug_assertions)]
    debug_assert_eq!(alpha.total(), before, "card conservation");
    MoveSummary { kappa, new_pile, piles_before }
}

/// One move of `B(n, p, q)`, reporting per-pile picks.
pub fn step_random(
    alpha: &WeakComposition,
    params: &SolitaireParams,
    rng: &mut RngStream,
) -> (WeakComposition, MoveOutcome) {
    let mut next = alpha.clone();
    let mut picked_per_pile = vec![0; alpha.len()];
    let summary = advance_random_with(&mut next, params, rng, |i, x| picked_per_pile[i] = x);
    let alive: u64 = alpha.total();
    let rounding_total = Ratio::new(
        summary.kappa as i128 * params.q.denom() as i128 - params.q.numer() as i128 * alive as i128,
        params.q.denom() as i128,
    );
    let outcome = MoveOutcome { picked_per_pile, kappa: summary.kappa, new_pile: summary.new_pile, rounding_total };
    (next, outcome)
}

/// How a trajectory moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    Deterministic(SigmaRule),
    Random(SolitaireParams),
}

/// Which intermediate states a trajectory keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    FinalOnly,
    /// States at moves `0, k, 2k, ...`.
    Every(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub moves: u64,
    pub final_state: WeakComposition,
    /// `(move index, state)` pairs.
    pub snapshots: Vec<(u64, WeakComposition)>,
}

/// Plays `moves` moves from `start`.
///
/// Fails with a capacity error before doing any work if the snapshot policy
/// would keep more than `snapshot_budget` states.
pub fn play(
    start: &WeakComposition,
    dynamics: Dynamics,
    moves: u64,
    rng: &mut RngStream,
    policy: SnapshotPolicy,
    snapshot_budget: usize,
) -> Result<Trajectory> {
    let stride = match policy {
        SnapshotPolicy::FinalOnly => None,
        SnapshotPolicy::Every(0) => return Err(Error::InvalidParams("snapshot stride must be >= 1".into())),
        SnapshotPolicy::Every(k) => Some(k),
    };
    if let Some(k) = stride {
        let wanted = moves / k + 1;
        if wanted > snapshot_budget as u64 {
            return Err(Error::capacity(format!("{wanted} snapshots requested, budget is {snapshot_budget}")));
        }
    }
    if let Dynamics::Random(params) = dynamics {
        if start.total() != params.n {
            return Err(Error::InvalidParams(format!(
                "start has {} cards, parameters say n = {}",
                start.total(),
                params.n
            )));
        }
    }
    let mut state = start.clone();
    let mut snapshots = Vec::new();
    if stride.is_some() {
        snapshots.push((0, state.clone()));
    }
    for t in 1..=moves {
        match dynamics {
            Dynamics::Deterministic(sigma) => state = step_deterministic(&state, sigma),
            Dynamics::Random(params) => {
                advance_random(&mut state, &params, rng);
            }
        }
        debug_assert_eq!(state.total(), start.total());
        if stride.is_some_and(|k| t % k == 0) {
            snapshots.push((t, state.clone()));
        }
    }
    Ok(Trajectory { moves, final_state: state, snapshots })
}

/// Staircase `(K, K−1, …, 1)` with the remainder added to the largest part.
pub fn triangular_start(n: u64) -> Result<Partition> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let k = ((8 * n as u128 + 1).isqrt() as u64 - 1) / 2;
    let mut parts: Vec<u64> = (1..=k).rev().collect();
    parts[0] += n - k * (k + 1) / 2;
    Partition::new(parts)
}
