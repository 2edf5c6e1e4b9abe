//! Rescaled diagram-boundary functions, limit shapes and distances between
//! them.
//!
//! A configuration with parts `h_0, h_1, ...` and scaling factor `a` is drawn
//! as the right-continuous step function
//!
//! ```text
//! y(x) = (a / n) * h_{⌊a x⌋}
//! ```
//!
//! so piece `j` occupies `[j/a, (j+1)/a)`. Distances to a shape are computed
//! piece by piece: on each piece `y` is constant and the shape is monotone
//! between its knots, so the supremum is attained at piece edges, knots, or
//! one-sided limits there.

use crate::error::{Error, Result};
use crate::partition::Configuration;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// How the scaling factor `a_n` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling<T> {
    /// `a_n = n / λ₁`, so the rescaled height is exactly 1.
    ByFirstPart,
    /// A fixed `a_n`, typically `1 / (p q)`.
    Theoretical(T),
}

impl<T: Real> Scaling<T> {
    /// `a_n = (p q)^{-1}`.
    pub fn theoretical(p: T, q: T) -> Result<Self> {
        let a = (p * q).recip();
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::InvalidScaling(format!("need p q > 0, got p = {p}, q = {q}")));
        }
        Ok(Scaling::Theoretical(a))
    }

    /// Resolves the mode against a concrete configuration.
    pub fn resolve<C: Configuration + ?Sized>(&self, config: &C) -> Result<ScalingFactor<T>> {
        match *self {
            Scaling::ByFirstPart => ScalingFactor::by_first_part(config),
            Scaling::Theoretical(a) => ScalingFactor::theoretical(a, config.total()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    ByFirstPart,
    Theoretical,
}

/// A scaling factor bound to a card total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFactor<T> {
    mode: ScaleMode,
    value: T,
    /// Largest part; only meaningful for `ByFirstPart`.
    first_part: u64,
    total: u64,
}

impl<T: Real> ScalingFactor<T> {
    /// `a = n / λ₁` where `λ₁` is the largest part (for a composition, the
    /// largest part of its sorted version, so `α` and `ord α` share a scale).
    pub fn by_first_part<C: Configuration + ?Sized>(config: &C) -> Result<Self> {
        let first = config.largest_part();
        if first == 0 {
            return Err(Error::InvalidScaling("first-part scaling needs a nonempty configuration".into()));
        }
        let total = config.total();
        Ok(ScalingFactor {
            mode: ScaleMode::ByFirstPart,
            value: T::of_u64(total) / T::of_u64(first),
            first_part: first,
            total,
        })
    }

    pub fn theoretical(a: T, total: u64) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::InvalidScaling(format!("scaling factor must be positive, got {a}")));
        }
        if total == 0 {
            return Err(Error::InvalidScaling("card total must be positive".into()));
        }
        Ok(ScalingFactor { mode: ScaleMode::Theoretical, value: a, first_part: 0, total })
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn mode(&self) -> ScaleMode {
        self.mode
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Left edge of piece `j`, i.e. `j / a`.
    pub fn edge(&self, j: usize) -> T {
        let j = T::from_usize(j).expect("index representable");
        match self.mode {
            ScaleMode::ByFirstPart => j * T::of_u64(self.first_part) / T::of_u64(self.total),
            ScaleMode::Theoretical => j / self.value,
        }
    }

    /// Index of the piece containing `x`, i.e. `⌊a x⌋`.
    pub fn index_at(&self, x: T) -> usize {
        let scaled = match self.mode {
            ScaleMode::ByFirstPart => x * T::of_u64(self.total) / T::of_u64(self.first_part),
            ScaleMode::Theoretical => x * self.value,
        };
        scaled.floor().to_usize().unwrap_or(usize::MAX)
    }

    /// Rescaled height `(a / n) h`.
    pub fn height(&self, h: u64) -> T {
        match self.mode {
            ScaleMode::ByFirstPart => T::of_u64(h) / T::of_u64(self.first_part),
            ScaleMode::Theoretical => T::of_u64(h) * self.value / T::of_u64(self.total),
        }
    }

    fn check<C: Configuration + ?Sized>(&self, config: &C) -> Result<()> {
        if config.total() != self.total {
            return Err(Error::InvalidScaling(format!(
                "scaling bound to n = {} used on a configuration with n = {}",
                self.total,
                config.total()
            )));
        }
        Ok(())
    }
}

/// Evaluates `(a/n) ∂(a x)` for the configuration.
pub fn rescaled_boundary<C: Configuration + ?Sized, T: Real>(
    config: &C,
    scaling: &ScalingFactor<T>,
    x: T,
) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("x must be non-negative, got {x}")));
    }
    scaling.check(config)?;
    Ok(scaling.height(config.part(scaling.index_at(x))))
}

/// A non-negative function on `[0, ∞)` that is monotone between its knots.
pub trait Profile<T: Real> {
    fn value(&self, x: T) -> T;

    fn left_limit(&self, x: T) -> T {
        self.value(x)
    }

    fn right_limit(&self, x: T) -> T {
        self.value(x)
    }

    /// Sorted points splitting the half-line into pieces on which the
    /// profile is continuous and monotone.
    fn knots(&self) -> Vec<T> {
        Vec::new()
    }
}

/// Candidate limit shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitShape<T> {
    /// `e^{-x}`.
    Exponential,
    /// `max(0, 1 - x/2)`: height 1, area 1.
    Triangle,
    /// Linear interpolation through sample points, zero past the last one.
    Tabulated(Vec<(T, T)>),
}

impl<T: Real> LimitShape<T> {
    /// Builds a tabulated shape; `x` must be strictly increasing from a
    /// non-negative start and `y` non-negative and weakly decreasing.
    pub fn tabulated(points: Vec<(T, T)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("tabulated shape needs at least one point".into()));
        }
        if !(points[0].0 >= T::zero()) {
            return Err(Error::InvalidParams("tabulated shape must start at x >= 0".into()));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidParams("tabulated x must be strictly increasing".into()));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidParams("tabulated y must be weakly decreasing".into()));
            }
        }
        if points.iter().any(|&(_, y)| !(y >= T::zero())) {
            return Err(Error::InvalidParams("tabulated y must be non-negative".into()));
        }
        Ok(LimitShape::Tabulated(points))
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitShape::Exponential => "exponential",
            LimitShape::Triangle => "triangle",
            LimitShape::Tabulated(_) => "tabulated",
        }
    }

    fn interpolate(points: &[(T, T)], x: T) -> T {
        let (x0, y0) = points[0];
        if x <= x0 {
            return y0;
        }
        let k = points.partition_point(|&(px, _)| px <= x);
        if k >= points.len() {
            return T::zero();
        }
        let (xa, ya) = points[k - 1];
        let (xb, yb) = points[k];
        ya + (yb - ya) * (x - xa) / (xb - xa)
    }
}

impl<T: Real> Profile<T> for LimitShape<T> {
    fn value(&self, x: T) -> T {
        match self {
            LimitShape::Exponential => (-x).exp(),
            LimitShape::Triangle => (T::one() - x / T::of(2.0)).max(T::zero()),
            LimitShape::Tabulated(points) => {
                let last = points[points.len() - 1];
                if x == last.0 {
                    last.1
                } else {
                    Self::interpolate(points, x)
                }
            }
        }
    }

    fn left_limit(&self, x: T) -> T {
        match self {
            LimitShape::Tabulated(points) if x == points[points.len() - 1].0 => points[points.len() - 1].1,
            _ => self.value(x),
        }
    }

    fn right_limit(&self, x: T) -> T {
        match self {
            LimitShape::Tabulated(points) if x >= points[points.len() - 1].0 => T::zero(),
            _ => self.value(x),
        }
    }

    fn knots(&self) -> Vec<T> {
        match self {
            LimitShape::Exponential => Vec::new(),
            LimitShape::Triangle => vec![T::of(2.0)],
            LimitShape::Tabulated(points) => points.iter().map(|&(x, _)| x).collect(),
        }
    }
}

/// Evaluates a limit shape at `x`.
pub fn shape_eval<T: Real>(shape: &LimitShape<T>, x: T) -> T {
    shape.value(x)
}

/// A right-continuous, non-increasing step function:
/// `values[0]` on `[0, breaks[0])`, `values[j]` on `[breaks[j-1], breaks[j])`,
/// and `values[last]` after the last break.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> StepProfile<T> {
    pub fn new(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidParams("step profile needs one more value than breaks".into()));
        }
        if breaks.first().is_some_and(|&b| !(b > T::zero())) || breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParams("breaks must be positive and strictly increasing".into()));
        }
        if values.iter().any(|&v| !(v >= T::zero())) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParams("values must be non-negative and non-increasing".into()));
        }
        Ok(StepProfile { breaks, values })
    }
}

impl<T: Real> Profile<T> for StepProfile<T> {
    fn value(&self, x: T) -> T {
        self.values[self.breaks.partition_point(|&b| b <= x)]
    }

    fn left_limit(&self, x: T) -> T {
        self.values[self.breaks.partition_point(|&b| b < x)]
    }

    fn knots(&self) -> Vec<T> {
        self.breaks.clone()
    }
}

fn piece_sup<T: Real, P: Profile<T> + ?Sized>(y: T, profile: &P, knots: &[T], u: T, v: T, closed_right: bool) -> T {
    let gap = |f: T| (y - f).abs();
    let mut m = gap(profile.value(u));
    if u < v {
        m = m.max(gap(profile.right_limit(u)));
        let from = knots.partition_point(|&k| k <= u);
        let to = knots.partition_point(|&k| k < v);
        for &k in &knots[from..to] {
            m = m.max(gap(profile.left_limit(k))).max(gap(profile.value(k))).max(gap(profile.right_limit(k)));
        }
        m = m.max(gap(profile.left_limit(v)));
    }
    if closed_right {
        m = m.max(gap(profile.value(v)));
    }
    m
}

/// Exact `sup_{x ∈ [lo, hi]} |ỹ(x) − φ(x)|`, including one-sided limits at
/// every discontinuity of either function.
pub fn sup_distance<C, T, P>(config: &C, scaling: &ScalingFactor<T>, profile: &P, lo: T, hi: T) -> Result<T>
where
    C: Configuration + ?Sized,
    T: Real,
    P: Profile<T> + ?Sized,
{
    if !(lo >= T::zero()) || !(lo <= hi) {
        return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
    }
    scaling.check(config)?;
    let knots = profile.knots();
    let pieces = config.len();
    let mut sup = T::zero();
    for j in 0..=pieces {
        let start = scaling.edge(j);
        if start > hi {
            break;
        }
        let end = if j < pieces { scaling.edge(j + 1) } else { T::infinity() };
        if end <= lo {
            continue;
        }
        let u = start.max(lo);
        let closed_right = end > hi;
        let v = if closed_right { hi } else { end };
        let y = scaling.height(config.part(j));
        sup = sup.max(piece_sup(y, profile, &knots, u, v, closed_right));
    }
    Ok(sup)
}

/// Sup distance over the whole half-line. Assumes the profile is
/// non-negative and non-increasing, so beyond the last piece and the last
/// knot the gap can only shrink.
pub fn sup_distance_halfline<C, T, P>(config: &C, scaling: &ScalingFactor<T>, profile: &P) -> Result<T>
where
    C: Configuration + ?Sized,
    T: Real,
    P: Profile<T> + ?Sized,
{
    let last_knot = profile.knots().last().copied().unwrap_or(T::zero());
    let hi = scaling.edge(config.len()).max(last_knot);
    sup_distance(config, scaling, profile, T::zero(), hi)
}

/// Pointwise and interval deviation of a rescaled configuration from a shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport<T> {
    /// `(x, |ỹ(x) − φ(x)|)` at every grid point.
    pub pointwise: Vec<(T, T)>,
    pub sup_on_interval: T,
    pub interval: (T, T),
    pub epsilon: T,
    /// Fraction of grid points with deviation strictly below `epsilon`.
    pub fraction_within: T,
}

/// `|ỹ(x) − φ(x)|` at a single point.
pub fn pointwise_deviation<C, T>(config: &C, scaling: &ScalingFactor<T>, shape: &LimitShape<T>, x: T) -> Result<T>
where
    C: Configuration + ?Sized,
    T: Real,
{
    Ok((rescaled_boundary(config, scaling, x)? - shape.value(x)).abs())
}

pub fn deviation<C, T>(
    config: &C,
    scaling: &ScalingFactor<T>,
    shape: &LimitShape<T>,
    grid: &[T],
    interval: (T, T),
    epsilon: T,
) -> Result<DeviationReport<T>>
where
    C: Configuration + ?Sized,
    T: Real,
{
    if grid.is_empty() {
        return Err(Error::domain("deviation grid is empty"));
    }
    if !(grid[0] >= T::zero()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("grid must be non-negative and strictly increasing"));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let (lo, hi) = interval;
    let exact = sup_distance(config, scaling, shape, lo, hi)?;

    let mut pointwise = Vec::with_capacity(grid.len());
    let mut within = 0usize;
    let mut sup = exact;
    for &x in grid {
        let d = pointwise_deviation(config, scaling, shape, x)?;
        if d < epsilon {
            within += 1;
        }
        if x >= lo && x <= hi {
            sup = sup.max(d);
        }
        pointwise.push((x, d));
    }
    let fraction_within = T::from_usize(within).unwrap() / T::from_usize(grid.len()).unwrap();
    Ok(DeviationReport { pointwise, sup_on_interval: sup, interval, epsilon, fraction_within })
}

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn uniform_grid<T: Real>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(start >= T::zero()) || !(stop >= start) {
        return Err(Error::domain(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + T::of(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=count).map(|i| start + T::from_usize(i).unwrap() * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{Partition, WeakComposition};
    use proptest::prelude::*;

    fn staircase() -> Partition {
        Partition::new(vec![4, 3, 2, 1]).unwrap()
    }

    #[test]
    fn first_part_scaling_examples() {
        let l = staircase();
        let a = ScalingFactor::<f64>::by_first_part(&l).unwrap();
        assert_eq!(a.value(), 2.5);
        assert_eq!(rescaled_boundary(&l, &a, 0.0).unwrap(), 1.0);
        assert_eq!(rescaled_boundary(&l, &a, 0.5).unwrap(), 0.75);
    }

    #[test]
    fn theoretical_scaling_matches_equal_first_part_scaling() {
        let l = staircase();
        let by_first = ScalingFactor::<f64>::by_first_part(&l).unwrap();
        let theo = Scaling::theoretical(0.5, 0.8).unwrap().resolve(&l).unwrap();
        assert_eq!(theo.value(), 2.5);
        for i in 0..40 {
            let x = i as f64 * 0.05;
            let a = rescaled_boundary(&l, &by_first, x).unwrap();
            let b = rescaled_boundary(&l, &theo, x).unwrap();
            assert!((a - b).abs() < 1e-15, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn first_part_scaling_rejects_empty() {
        let empty = WeakComposition::new(vec![]);
        assert!(matches!(ScalingFactor::<f64>::by_first_part(&empty), Err(Error::InvalidScaling(_))));
    }

    #[test]
    fn scaling_bound_to_other_total_is_rejected() {
        let a = ScalingFactor::<f64>::theoretical(2.0, 11).unwrap();
        assert!(rescaled_boundary(&staircase(), &a, 0.0).is_err());
    }

    #[test]
    fn shape_values() {
        let e = LimitShape::<f64>::Exponential;
        assert_eq!(shape_eval(&e, 0.0), 1.0);
        assert!((shape_eval(&e, 1.0) - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(shape_eval(&LimitShape::<f64>::Triangle, 2.0), 0.0);
        assert_eq!(shape_eval(&LimitShape::<f64>::Triangle, 0.5), 0.75);
        assert_eq!(shape_eval(&LimitShape::<f64>::Triangle, 7.0), 0.0);
    }

    #[test]
    fn tabulated_shape_interpolates_and_clamps() {
        let t = LimitShape::tabulated(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.25)]).unwrap();
        assert_eq!(t.value(0.5), 0.75);
        assert_eq!(t.value(1.5), 0.375);
        assert_eq!(t.value(2.0), 0.25);
        assert_eq!(t.right_limit(2.0), 0.0);
        assert_eq!(t.value(2.5), 0.0);
        assert!(LimitShape::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(LimitShape::tabulated(vec![(1.0, 1.0), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn deviation_zero_at_height_normalised_origin() {
        let l = Partition::new(vec![2, 1, 1]).unwrap();
        let a = ScalingFactor::by_first_part(&l).unwrap();
        let r = deviation(&l, &a, &LimitShape::Exponential, &[0.0], (0.0, 0.0), 0.1).unwrap();
        assert_eq!(r.pointwise, vec![(0.0, 0.0)]);
        assert_eq!(r.fraction_within, 1.0);
    }

    #[test]
    fn deviation_against_triangle_at_half() {
        let l = staircase();
        let a = ScalingFactor::by_first_part(&l).unwrap();
        let r = deviation(&l, &a, &LimitShape::Triangle, &[0.5], (0.0, 4.0), 0.1).unwrap();
        assert_eq!(r.pointwise[0].1, 0.0);
    }

    #[test]
    fn deviation_of_matching_tabulated_shape_is_zero() {
        // A shape that agrees with the boundary at every grid point.
        let l = staircase();
        let a = ScalingFactor::by_first_part(&l).unwrap();
        let grid = [0.0, 0.4, 0.8, 1.2];
        let shape = LimitShape::tabulated(vec![(0.0, 1.0), (0.4, 0.75), (0.8, 0.5), (1.2, 0.25)]).unwrap();
        let r = deviation(&l, &a, &shape, &grid, (0.0, 0.0), 0.01).unwrap();
        assert!(r.pointwise.iter().all(|&(_, d)| d == 0.0));
        assert_eq!(r.fraction_within, 1.0);
        assert_eq!(r.sup_on_interval, 0.0);
    }

    #[test]
    fn sup_catches_left_limits_missed_by_grid() {
        // Single pile of 1 card: ỹ = 1 on [0, 1), 0 after. Against e^{-x}
        // the sup on [0, 2] is the left limit at x = 1: 1 - e^{-1}.
        let l = Partition::new(vec![1]).unwrap();
        let a = ScalingFactor::by_first_part(&l).unwrap();
        let s = sup_distance(&l, &a, &LimitShape::Exponential, 0.0, 2.0).unwrap();
        assert!((s - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let coarse = deviation(&l, &a, &LimitShape::Exponential, &[0.0, 2.0], (0.0, 2.0), 0.5).unwrap();
        assert_eq!(coarse.sup_on_interval, s);
    }

    #[test]
    fn deviation_input_validation() {
        let l = staircase();
        let a = ScalingFactor::by_first_part(&l).unwrap();
        let e = LimitShape::Exponential;
        assert!(deviation(&l, &a, &e, &[], (0.0, 1.0), 0.1).is_err());
        assert!(deviation(&l, &a, &e, &[0.5, 0.2], (0.0, 1.0), 0.1).is_err());
        assert!(deviation(&l, &a, &e, &[0.5], (2.0, 1.0), 0.1).is_err());
        assert!(deviation(&l, &a, &e, &[0.5], (0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let l = staircase();
        let a = ScalingFactor::<f32>::by_first_part(&l).unwrap();
        assert_eq!(rescaled_boundary(&l, &a, 0.5f32).unwrap(), 0.75f32);
        let s = sup_distance(&l, &a, &LimitShape::Triangle, 0.0f32, 3.0).unwrap();
        assert!(s > 0.0 && s <= 0.25);
    }

    #[test]
    fn step_profile_limits() {
        let f = StepProfile::new(vec![1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert_eq!(f.value(0.5), 1.0);
        assert_eq!(f.value(1.0), 0.5);
        assert_eq!(f.left_limit(1.0), 1.0);
        assert_eq!(f.value(2.0), 0.0);
        assert!(StepProfile::new(vec![1.0], vec![0.5, 1.0]).is_err());
    }

    fn dense_sup(l: &Partition, a: &ScalingFactor<f64>, lo: f64, hi: f64) -> f64 {
        let steps = 20_000;
        (0..=steps)
            .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
            .map(|x| pointwise_deviation(l, a, &LimitShape::Exponential, x).unwrap())
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn first_part_scaling_starts_at_one(parts in prop::collection::vec(1u64..500, 1..40)) {
            let l = Partition::from_unsorted(parts);
            let a = ScalingFactor::<f64>::by_first_part(&l).unwrap();
            prop_assert_eq!(rescaled_boundary(&l, &a, 0.0).unwrap(), 1.0);
        }

        #[test]
        fn exact_sup_dominates_dense_sampling(parts in prop::collection::vec(1u64..50, 1..15),
                                              hi in 0.1f64..4.0) {
            let l = Partition::from_unsorted(parts);
            let a = ScalingFactor::by_first_part(&l).unwrap();
            let exact = sup_distance(&l, &a, &LimitShape::Exponential, 0.0, hi).unwrap();
            let dense = dense_sup(&l, &a, 0.0, hi);
            prop_assert!(exact >= dense - 1e-12);
            // Dense sampling approaches the exact sup from below.
            prop_assert!(exact - dense < 1e-3);
        }

        #[test]
        fn fraction_within_is_monotone_in_epsilon(parts in prop::collection::vec(1u64..50, 1..15),
                                                   e1 in 0.001f64..1.0, e2 in 0.001f64..1.0) {
            let l = Partition::from_unsorted(parts);
            let a = ScalingFactor::by_first_part(&l).unwrap();
            let grid = uniform_grid(0.0, 3.0, 0.05).unwrap();
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let r1 = deviation(&l, &a, &LimitShape::Exponential, &grid, (0.0, 3.0), lo).unwrap();
            let r2 = deviation(&l, &a, &LimitShape::Exponential, &grid, (0.0, 3.0), hi).unwrap();
            prop_assert!(r1.fraction_within <= r2.fraction_within);
            prop_assert!(r1.pointwise.iter().all(|&(_, d)| d <= r1.sup_on_interval));
        }
    }
}
