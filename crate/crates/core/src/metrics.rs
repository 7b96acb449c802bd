//! Bohr and Stepanoff distances on tube sets, and ε-almost-period search.
//!
//! Suprema over `x in R^m` are replaced by a finite x-grid, so every
//! sampled distance is a lower bound of the true one. Each distance is
//! returned together with the coefficient majorant of `f - g`, an upper
//! bound on the sampled planes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::Cone;
use crate::error::{check_dim, Error, Result};
use crate::expsum::{ExponentialSum, GROWTH_LIMIT};
use crate::linalg::{dot, is_finite, sub};
use crate::quadrature::midpoints;

pub const DEFAULT_STEPANOFF_POINTS: usize = 32;
/// Upper limit on the number of translations scanned by the almost-period search.
pub const MAX_SEARCH_POINTS: usize = 10_000_000;
const POINT_TOL: f64 = 1e-12;

/// Base `K` of the tube `T_K = R^m + iK`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeBase {
    Cone(Cone),
    ShiftedCone { cone: Cone, shift: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Point(Vec<f64>),
}

impl TubeBase {
    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidInput("box needs lo <= hi".into()));
        }
        Ok(TubeBase::Box { lo, hi })
    }

    pub fn dimension(&self) -> usize {
        match self {
            TubeBase::Cone(c) => c.dimension(),
            TubeBase::ShiftedCone { cone, .. } => cone.dimension(),
            TubeBase::Box { lo, .. } => lo.len(),
            TubeBase::Point(y) => y.len(),
        }
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        check_dim(self.dimension(), y.len())?;
        match self {
            TubeBase::Cone(c) => c.contains(y, false),
            TubeBase::ShiftedCone { cone, shift } => {
                check_dim(cone.dimension(), shift.len())?;
                cone.contains(&sub(y, shift), false)
            }
            TubeBase::Box { lo, hi } => Ok(y
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)),
            TubeBase::Point(p) => Ok(crate::linalg::distance(p, y) <= POINT_TOL),
        }
    }

    /// Logarithm of `sup_{y in K} e^{-<y, lambda>}`; `None` when unbounded.
    pub fn log_damping_bound(&self, lambda: &[f64]) -> Result<Option<f64>> {
        check_dim(self.dimension(), lambda.len())?;
        Ok(match self {
            TubeBase::Cone(c) => c.dual()?.contains(lambda, false)?.then_some(0.0),
            TubeBase::ShiftedCone { cone, shift } => cone
                .dual()?
                .contains(lambda, false)?
                .then(|| -dot(shift, lambda)),
            TubeBase::Box { lo, hi } => Some(
                -lambda
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(l, (a, b))| (a * l).min(b * l))
                    .sum::<f64>(),
            ),
            TubeBase::Point(y) => Some(-dot(y, lambda)),
        })
    }
}

/// Discretization of `x in R^m` plus the heights `y` to visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub x_extent: f64,
    pub x_points: usize,
    pub y_samples: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SamplingSpec {
    pub fn new(x_extent: f64, x_points: usize, y_samples: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let spec = Self {
            x_extent,
            x_points,
            y_samples,
            seed,
        };
        spec.check_shape()?;
        Ok(spec)
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.x_extent > 0.0 && self.x_extent.is_finite()) {
            return Err(Error::InvalidInput("x extent must be positive".into()));
        }
        if self.x_points < 2 {
            return Err(Error::InvalidInput("need at least 2 x points per axis".into()));
        }
        if self.y_samples.is_empty() {
            return Err(Error::InvalidInput("need at least one y sample".into()));
        }
        if self.y_samples.iter().any(|y| !is_finite(y)) {
            return Err(Error::InvalidInput("non-finite y sample".into()));
        }
        Ok(())
    }

    /// Checks every y sample against `base`.
    pub fn validate(&self, base: &TubeBase) -> Result<()> {
        self.check_shape()?;
        for y in &self.y_samples {
            if !base.contains(y)? {
                return Err(Error::Precondition(format!(
                    "y sample {y:?} lies outside the tube base"
                )));
            }
        }
        Ok(())
    }

    /// Per-axis grid `o_j + L k / P`, `k = 0..P`, with a seeded offset
    /// `o_j in [0, L/P)`.
    pub fn axes(&self, dimension: usize) -> Vec<Vec<f64>> {
        self.axes_with_density(dimension, 1)
    }

    /// Same grid refined `factor` times; contains the points of [`Self::axes`].
    pub fn axes_with_density(&self, dimension: usize, factor: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let h = self.x_extent / self.x_points as f64;
        (0..dimension)
            .map(|_| {
                let offset = rng.gen_range(0.0..h);
                let points = self.x_points * factor.max(1);
                (0..points)
                    .map(|k| offset + self.x_extent * k as f64 / points as f64)
                    .collect()
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "x-grid {} pts/axis on [0,{}) seed {}; {} y samples",
            self.x_points,
            self.x_extent,
            self.seed,
            self.y_samples.len()
        )
    }
}

/// Sampled lower bound and majorant upper bound of a distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// Largest `|f(z) - g(z)|` over the sampled tube points.
pub fn sup_distance(f: &ExponentialSum, g: &ExponentialSum, base: &TubeBase, spec: &SamplingSpec) -> Result<Bracket> {
    let diff = f.sub(g)?;
    check_dim(diff.dimension(), base.dimension())?;
    spec.validate(base)?;
    let axes = spec.axes(diff.dimension());
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for y in &spec.y_samples {
        let values = diff.evaluate_on_grid(&axes, y)?;
        lower = values.iter().map(|v| v.norm()).fold(lower, f64::max);
        upper = upper.max(diff.majorant(y)?);
    }
    Ok(Bracket { lower, upper })
}

pub fn stepanoff_distance(
    f: &ExponentialSum,
    g: &ExponentialSum,
    p: f64,
    base: &TubeBase,
    spec: &SamplingSpec,
) -> Result<Bracket> {
    stepanoff_distance_with(f, g, p, base, spec, DEFAULT_STEPANOFF_POINTS)
}

/// `sup_z (∫_{[0,1]^m} |f(z+u) - g(z+u)|^p du)^{1/p}` with a tensor midpoint
/// rule of `inner_points` per axis; `p = inf` takes the maximum instead.
pub fn stepanoff_distance_with(
    f: &ExponentialSum,
    g: &ExponentialSum,
    p: f64,
    base: &TubeBase,
    spec: &SamplingSpec,
    inner_points: usize,
) -> Result<Bracket> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("Stepanoff order must be >= 1, got {p}")));
    }
    if inner_points == 0 {
        return Err(Error::InvalidInput("need at least one inner point".into()));
    }
    let diff = f.sub(g)?;
    let m = diff.dimension();
    check_dim(m, base.dimension())?;
    spec.validate(base)?;
    let axes = spec.axes(m);
    let total: usize = axes.iter().map(Vec::len).product();
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for y in &spec.y_samples {
        upper = upper.max(diff.majorant(y)?);
        for flat in 0..total {
            let corner = unflatten(flat, &axes);
            let inner: Vec<Vec<f64>> = corner
                .iter()
                .map(|&x| midpoints(x, x + 1.0, inner_points))
                .collect();
            let values = diff.evaluate_on_grid(&inner, y)?;
            let local = if p.is_infinite() {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            } else {
                let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
                mean.powf(1.0 / p)
            };
            lower = lower.max(local);
        }
    }
    Ok(Bracket { lower, upper })
}

fn unflatten(mut flat: usize, axes: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; axes.len()];
    for j in (0..axes.len()).rev() {
        let n = axes[j].len();
        out[j] = axes[j][flat % n];
        flat /= n;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodReport {
    pub epsilon: f64,
    pub window: f64,
    pub step: f64,
    pub taus: Vec<Vec<f64>>,
    /// `B(tau) = sum_n |a_n| w_n |e^{i<tau,lambda_n>} - 1|`, with `w_n` the
    /// largest damping `e^{-<y,lambda_n>}` over the base.
    pub bound_values: Vec<f64>,
    pub sampled_sups: Vec<f64>,
    /// Side of the largest grid-aligned τ-free cube in the window, measured
    /// between accepted neighbours.
    pub largest_gap: f64,
}

/// Scans `tau in step * Z^m ∩ [0, window]^m` and accepts every `tau` with
/// `B(tau) < epsilon`. Since `B(tau)` bounds `sup_{T_K} |f(z+tau) - f(z)|`,
/// every accepted `tau` is a true ε-almost period.
pub fn find_almost_periods(
    sum: &ExponentialSum,
    epsilon: f64,
    window: f64,
    step: f64,
    base: &TubeBase,
    spec: &SamplingSpec,
) -> Result<AlmostPeriodReport> {
    let m = sum.dimension();
    check_dim(m, base.dimension())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if !(step > 0.0 && step.is_finite() && window >= 0.0 && window.is_finite()) {
        return Err(Error::EmptyGrid);
    }
    spec.validate(base)?;
    let per_axis = (window / step * (1.0 + 1e-12)).floor() as usize + 1;
    let total = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(per_axis));
    let total = match total {
        Some(t) if t <= MAX_SEARCH_POINTS => t,
        _ => {
            return Err(Error::InvalidInput(format!(
                "search grid of {per_axis}^{m} points exceeds {MAX_SEARCH_POINTS}"
            )))
        }
    };

    let mut weights = Vec::with_capacity(sum.len());
    for t in sum.terms() {
        let log_w = base.log_damping_bound(&t.lambda)?.ok_or_else(|| {
            Error::Precondition(format!(
                "frequency {:?} escapes the dual of the base cone",
                t.lambda
            ))
        })?;
        if log_w > GROWTH_LIMIT {
            return Err(Error::GrowthOverflow {
                exponent: log_w,
                limit: GROWTH_LIMIT,
            });
        }
        weights.push(t.coeff.norm() * log_w.exp());
    }

    let mut accepted = vec![false; total];
    let mut taus = Vec::new();
    let mut bound_values = Vec::new();
    let mut index = vec![0usize; m];
    for flag in accepted.iter_mut() {
        let tau: Vec<f64> = index.iter().map(|&k| k as f64 * step).collect();
        let bound: f64 = sum
            .terms()
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * 2.0 * (0.5 * dot(&tau, &t.lambda)).sin().abs())
            .sum();
        if bound < epsilon {
            *flag = true;
            taus.push(tau);
            bound_values.push(bound);
        }
        for j in (0..m).rev() {
            index[j] += 1;
            if index[j] < per_axis {
                break;
            }
            index[j] = 0;
        }
    }

    let mut sampled_sups = Vec::with_capacity(taus.len());
    for tau in &taus {
        let shifted = sum.translate(tau)?;
        sampled_sups.push(sup_distance(&shifted, sum, base, spec)?.lower);
    }

    let largest_gap = (largest_empty_cube(&accepted, per_axis, m) + 1) as f64 * step;
    Ok(AlmostPeriodReport {
        epsilon,
        window,
        step,
        taus,
        bound_values,
        sampled_sups,
        largest_gap,
    })
}

/// Side (in grid points) of the largest axis-aligned cube of unflagged points.
fn largest_empty_cube(flags: &[bool], per_axis: usize, m: usize) -> usize {
    let mut dp = vec![0u32; flags.len()];
    let mut best = 0u32;
    let mut strides = vec![1usize; m];
    for j in (0..m.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * per_axis;
    }
    let mut index = vec![0usize; m];
    for flat in 0..flags.len() {
        if !flags[flat] {
            let value = if index.contains(&0) {
                1
            } else {
                let mut smallest = u32::MAX;
                for mask in 1..(1usize << m) {
                    let mut other = flat;
                    for (j, s) in strides.iter().enumerate() {
                        if mask & (1 << j) != 0 {
                            other -= s;
                        }
                    }
                    smallest = smallest.min(dp[other]);
                }
                smallest + 1
            };
            dp[flat] = value;
            best = best.max(value);
        }
        for j in (0..m).rev() {
            index[j] += 1;
            if index[j] < per_axis {
                break;
            }
            index[j] = 0;
        }
    }
    best as usize
}
