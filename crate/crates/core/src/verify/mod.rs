//! Numerical checks of the extension, uniqueness and growth statements for
//! finite sums, each producing a [`VerificationReport`].
//!
//! Sampled sups are lower bounds on both sides of a comparison, so the
//! sup-comparison checks carry a relative grid slack; checks against a
//! closed-form majorant use absolute slack `1e-12`. Where a statement's
//! hypothesis fails for the given instance the report is `skipped`.
//!
//! Boundary values at `y = 0` coincide with plain evaluation for finite
//! sums, so the uniqueness statement for boundary values is exercised by
//! [`verify_offspectrum_vanishing`].

pub mod instances;
pub mod report;
pub mod suite;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cones::Cone;
use crate::error::{check_dim, Error, Result};
use crate::expsum::{ExponentialSum, Term, TubePoint, DEFAULT_DEDUP_TOL};
use crate::fejer::{bochner_fejer_sum, FejerOrder, FejerScheme};
use crate::indicator::p_indicator_estimate;
use crate::linalg::{add, dot, is_finite, norm, scale};
use crate::meanvalue::{box_smooth, check_admissible, offspectrum_decay_probe, LinearMap};
use crate::metrics::{SamplingSpec, TubeBase};
use crate::quadrature::composite_gauss;

pub use report::{instance_digest, Status, VerificationReport};
pub use suite::{run_suite, CheckFamily, SuiteConfig};

pub const DEFAULT_GRID_SLACK: f64 = 5e-2;
pub const MAJORANT_SLACK: f64 = 1e-12;
pub const EXTENSION_END_LIMIT: f64 = 1e-6;
pub const INDICATOR_TOL: f64 = 1e-2;
pub const SMOOTHING_TOL: f64 = 1e-8;
pub const FEJER_TOL: f64 = 1e-12;
/// Refinement of the real-line grid against the tube grid in the max-modulus check.
pub const REAL_GRID_FACTOR: usize = 4;

fn spectrum_in(sum: &ExponentialSum, cone: &Cone, what: &str) -> Result<()> {
    check_dim(sum.dimension(), cone.dimension())?;
    for t in sum.terms() {
        if !cone.contains(&t.lambda, false)? {
            return Err(Error::Precondition(format!(
                "frequency {:?} escapes {what}",
                t.lambda
            )));
        }
    }
    Ok(())
}

fn grid_sup(sum: &ExponentialSum, axes: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    Ok(sum
        .evaluate_on_grid(axes, y)?
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Tube sup over `T_base` against the sup on the real space, both sampled.
///
/// Every y sample must lie in the dual of `gamma`; with `base` a shifted
/// dual cone this exercises the shifted-domain form of the statement.
pub fn verify_max_modulus(
    sum: &ExponentialSum,
    gamma: &Cone,
    base: &TubeBase,
    spec: &SamplingSpec,
    slack: f64,
) -> Result<VerificationReport> {
    spectrum_in(sum, gamma, "gamma")?;
    spec.validate(base)?;
    let dual = gamma.dual()?;
    for y in &spec.y_samples {
        if !dual.contains(y, false)? {
            return Err(Error::Precondition(format!(
                "y sample {y:?} lies outside the dual of gamma"
            )));
        }
    }
    let m = sum.dimension();
    let axes = spec.axes(m);
    let mut tube_sup: f64 = 0.0;
    for y in &spec.y_samples {
        tube_sup = tube_sup.max(grid_sup(sum, &axes, y)?);
    }
    let real_axes = spec.axes_with_density(m, REAL_GRID_FACTOR);
    let real_sup = grid_sup(sum, &real_axes, &vec![0.0; m])?;
    let violation = if real_sup > 0.0 {
        tube_sup / real_sup - 1.0
    } else if tube_sup > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(VerificationReport::judged("max_modulus", violation, slack)
        .with_grid(format!(
            "tube: {}; real: {} pts/axis",
            spec.describe(),
            spec.x_points * REAL_GRID_FACTOR
        ))
        .with_details(vec![format!(
            "tube sup {tube_sup:.17e}, real sup {real_sup:.17e}"
        )]))
}

/// `psi(y) = max over the x-grid of log |F(x + iy)|` along a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityProbe {
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    /// `(t, psi((1 - t) y0 + t y1))` for increasing `t`.
    pub samples: Vec<(f64, f64)>,
}

pub fn convexity_probe(
    sum: &ExponentialSum,
    y0: &[f64],
    y1: &[f64],
    n_samples: usize,
    spec: &SamplingSpec,
) -> Result<ConvexityProbe> {
    let m = sum.dimension();
    check_dim(m, y0.len())?;
    check_dim(m, y1.len())?;
    if n_samples < 2 {
        return Err(Error::EmptyGrid);
    }
    let axes = spec.axes(m);
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = k as f64 / (n_samples - 1) as f64;
        let y = add(&scale(y0, 1.0 - t), &scale(y1, t));
        samples.push((t, grid_sup(sum, &axes, &y)?.ln()));
    }
    Ok(ConvexityProbe {
        y0: y0.to_vec(),
        y1: y1.to_vec(),
        samples,
    })
}

/// Midpoint convexity of `psi` on consecutive sample triples. When `gamma`
/// is given, the spectrum lies in it, `y0 = 0` and `y1` is in its dual, also
/// checks `psi(y) <= psi(0)` along the segment.
pub fn verify_convexity(
    sum: &ExponentialSum,
    y0: &[f64],
    y1: &[f64],
    n_samples: usize,
    spec: &SamplingSpec,
    gamma: Option<&Cone>,
    slack: f64,
) -> Result<VerificationReport> {
    if n_samples < 3 {
        return Err(Error::EmptyGrid);
    }
    let probe = convexity_probe(sum, y0, y1, n_samples, spec)?;
    if probe.samples.iter().any(|(_, v)| !v.is_finite()) {
        return Ok(VerificationReport::skipped(
            "convexity",
            "F vanishes on the whole x-grid at some sample",
            slack,
        )
        .with_grid(spec.describe()));
    }
    let psi: Vec<f64> = probe.samples.iter().map(|s| s.1).collect();
    let mut violation = psi
        .windows(3)
        .map(|w| w[1] - 0.5 * (w[0] + w[2]))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut details = Vec::new();
    let lemma = match gamma {
        Some(g) => {
            let inside = sum
                .terms()
                .iter()
                .map(|t| g.contains(&t.lambda, false))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .all(|b| b);
            inside && norm(y0) == 0.0 && g.dual()?.contains(y1, false)?
        }
        None => false,
    };
    if lemma {
        let decrease = psi.iter().map(|v| v - psi[0]).fold(f64::NEG_INFINITY, f64::max);
        violation = violation.max(decrease);
        details.push(format!("decrease from psi(0) checked, worst {decrease:.6e}"));
    }
    details.push(format!("{n_samples} samples on the segment"));
    Ok(VerificationReport::judged("convexity", violation, slack)
        .with_grid(spec.describe())
        .with_details(details))
}

/// A ray `y = b + t u` of the extension check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub direction: Vec<f64>,
    pub times: Vec<f64>,
}

/// Along each ray, compares the sampled `sup_x |F(x + iy) - a_0|` with the
/// majorant `sum_{lambda_n != 0} |a_n| e^{-<y, lambda_n>}`, and requires the
/// majorant to fall below `1e-6` at the last time.
///
/// Only the x-grid of `spec` is used. `base` is the dual of `gamma`, possibly
/// shifted; the shift is the origin `b` of the rays.
pub fn verify_extension_limit(
    sum: &ExponentialSum,
    gamma: &Cone,
    gamma_prime: &Cone,
    base: &TubeBase,
    rays: &[Ray],
    spec: &SamplingSpec,
) -> Result<VerificationReport> {
    const CHECK: &str = "extension_limit";
    let m = sum.dimension();
    spectrum_in(sum, gamma, "gamma")?;
    check_dim(m, gamma_prime.dimension())?;
    let dual = gamma.dual()?;
    let origin = match base {
        TubeBase::Cone(_) => vec![0.0; m],
        TubeBase::ShiftedCone { shift, .. } => {
            check_dim(m, shift.len())?;
            if !dual.contains(shift, false)? {
                return Err(Error::Precondition("shift lies outside the dual of gamma".into()));
            }
            shift.clone()
        }
        _ => {
            return Err(Error::Precondition(
                "extension check needs a cone or shifted cone base".into(),
            ))
        }
    };
    if rays.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for ray in rays {
        check_dim(m, ray.direction.len())?;
        if !gamma_prime.contains(&ray.direction, false)? {
            return Err(Error::Precondition(format!(
                "ray direction {:?} lies outside gamma'",
                ray.direction
            )));
        }
        if !dual.contains(&ray.direction, false)? {
            return Err(Error::Precondition(format!(
                "ray direction {:?} lies outside the dual of gamma",
                ray.direction
            )));
        }
        if ray.times.is_empty()
            || ray.times.iter().any(|t| !(*t >= 0.0 && t.is_finite()))
            || ray.times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput("ray times must be nonnegative and increasing".into()));
        }
    }

    let zero = vec![0.0; m];
    let rest = ExponentialSum::new(
        m,
        sum.terms()
            .iter()
            .filter(|t| norm(&t.lambda) > DEFAULT_DEDUP_TOL)
            .cloned()
            .collect(),
    )?;
    let a0 = sum.coefficient_at(&zero, DEFAULT_DEDUP_TOL);

    let included = Cone::compactly_included(gamma_prime, &dual)?;
    let interior_spectrum = rest
        .terms()
        .iter()
        .map(|t| gamma.contains(&t.lambda, true))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    if !included && !interior_spectrum {
        return Ok(VerificationReport::skipped(
            CHECK,
            "gamma' is not compactly included in the dual of gamma and the spectrum meets the boundary of gamma",
            MAJORANT_SLACK,
        )
        .with_grid(spec.describe()));
    }

    let axes = spec.axes(m);
    let mut violation = f64::NEG_INFINITY;
    let mut worst_end: f64 = 0.0;
    for ray in rays {
        for &t in &ray.times {
            let y = add(&origin, &scale(&ray.direction, t));
            let sampled = grid_sup(&rest, &axes, &y)?;
            let majorant = rest.majorant(&y)?;
            violation = violation.max(sampled - majorant);
        }
        let t_end = *ray.times.last().expect("checked non-empty");
        let end = rest.majorant(&add(&origin, &scale(&ray.direction, t_end)))?;
        worst_end = worst_end.max(end);
        violation = violation.max(end - EXTENSION_END_LIMIT);
    }
    Ok(VerificationReport::judged(CHECK, violation, MAJORANT_SLACK)
        .with_grid(spec.describe())
        .with_details(vec![
            format!("a0 = {} {:+}i", a0.re, a0.im),
            format!("largest majorant at ray end {worst_end:.6e}"),
            format!("compactly included: {included}, interior spectrum: {interior_spectrum}"),
        ]))
}

/// Decay of the mean over `A([-N, N]^m)` at frequencies off the spectrum:
/// the value at the last `N` must be at most `0.02 sum |a_n|` and at most a
/// tenth of the value at the first `N`. The columns of `map` must lie in
/// the dual of `gamma_hat`. Probes with an identically-one sinc factor are
/// skipped.
pub fn verify_offspectrum_vanishing(
    sum: &ExponentialSum,
    gamma_hat: &Cone,
    probes: &[Vec<f64>],
    map: &LinearMap,
    schedule: &[f64],
) -> Result<VerificationReport> {
    const CHECK: &str = "offspectrum_vanishing";
    spectrum_in(sum, gamma_hat, "the given cone")?;
    check_dim(sum.dimension(), map.dimension())?;
    let dual = gamma_hat.dual()?;
    for c in map.columns() {
        if !dual.contains(&c, false)? {
            return Err(Error::Precondition(format!(
                "map column {c:?} lies outside the dual cone"
            )));
        }
    }
    if schedule.len() < 2 {
        return Err(Error::InvalidInput("schedule needs at least two widths".into()));
    }
    if probes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let total = sum.coefficient_l1();
    let mut violation = f64::NEG_INFINITY;
    let mut details = Vec::new();
    let mut checked = 0;
    for lambda in probes {
        let probe = offspectrum_decay_probe(sum, lambda, map, schedule)?;
        if probe.is_stalled() {
            details.push(format!("probe {lambda:?} skipped: stalled factors {:?}", probe.stalled));
            continue;
        }
        let first = probe.samples[0].1;
        let last = probe.samples[probe.samples.len() - 1].1;
        violation = violation.max(last - 0.02 * total).max(last - first / 10.0);
        details.push(format!("probe {lambda:?}: {first:.6e} -> {last:.6e}"));
        checked += 1;
    }
    let grid = format!("N schedule {schedule:?}");
    if checked == 0 {
        return Ok(VerificationReport::skipped(CHECK, "every probe has a stalled sinc factor", 0.0)
            .with_grid(grid)
            .with_details(details));
    }
    Ok(VerificationReport::judged(CHECK, violation, 0.0)
        .with_grid(grid)
        .with_details(details))
}

pub fn verify_indicator_equality(
    sum: &ExponentialSum,
    y_list: &[Vec<f64>],
    radii: &[f64],
    spec: &SamplingSpec,
) -> Result<VerificationReport> {
    if y_list.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut violation: f64 = 0.0;
    let mut details = Vec::new();
    for y in y_list {
        let est = p_indicator_estimate(sum, y, radii, spec)?;
        violation = violation.max(est.residual);
        details.push(format!(
            "y={:?}: slope {:.9e}, oracle {:.9e}, excluded {}",
            y, est.slope, est.oracle, est.excluded
        ));
    }
    Ok(VerificationReport::judged("indicator_equality", violation, INDICATOR_TOL)
        .with_grid(format!(
            "radii {:.3e}..{:.3e} ({} pts); x-grid {} pts/axis seed {}",
            radii[0],
            radii[radii.len() - 1],
            radii.len(),
            spec.x_points,
            spec.seed
        ))
        .with_details(details))
}

const GAUSS_ORDER: usize = 20;

/// Tensor Gauss-Legendre value of `N^-m ∫_{[0,N]^m} F(z + t) dt`.
///
/// The tensor rule is applied term by term, which by linearity gives the
/// same number as applying it to `F`, at a fraction of the cost.
pub fn box_average_quadrature(sum: &ExponentialSum, width: f64, z: &TubePoint) -> Result<Complex64> {
    check_dim(sum.dimension(), z.x.len())?;
    let largest = sum
        .terms()
        .iter()
        .flat_map(|t| t.lambda.iter().map(|l| l.abs()))
        .fold(0.0, f64::max);
    // at most two radians of phase per panel
    let panels = ((largest * width / 2.0).ceil() as usize).max(1);
    let (nodes, weights) = composite_gauss(0.0, width, panels, GAUSS_ORDER);
    let mut total = Complex64::new(0.0, 0.0);
    for t in sum.terms() {
        let value = sum_term(t, z)?;
        let factor: Complex64 = t
            .lambda
            .iter()
            .map(|&l| {
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(s, w)| Complex64::from_polar(*w, l * s))
                    .sum::<Complex64>()
                    / width
            })
            .product();
        total += value * factor;
    }
    Ok(total)
}

fn sum_term(t: &Term, z: &TubePoint) -> Result<Complex64> {
    let damp = -dot(&z.y, &t.lambda);
    if damp > crate::expsum::GROWTH_LIMIT {
        return Err(Error::GrowthOverflow {
            exponent: damp,
            limit: crate::expsum::GROWTH_LIMIT,
        });
    }
    Ok(t.coeff * Complex64::from_polar(damp.exp(), dot(&z.x, &t.lambda)))
}

/// Box smoothing by its multiplier against direct quadrature of the box
/// average, plus exact preservation of the spectrum.
pub fn verify_smoothing_identity(
    sum: &ExponentialSum,
    width: f64,
    z_samples: &[TubePoint],
) -> Result<VerificationReport> {
    check_admissible(sum, width)?;
    if z_samples.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let smoothed = box_smooth(sum, width)?;
    let same_spectrum = smoothed.spectrum() == sum.spectrum();
    let mut violation: f64 = if same_spectrum { 0.0 } else { f64::INFINITY };
    for z in z_samples {
        if !is_finite(&z.x) || !is_finite(&z.y) {
            return Err(Error::InvalidInput("non-finite sample point".into()));
        }
        let direct = box_average_quadrature(sum, width, z)?;
        let multiplied = smoothed.evaluate(z)?;
        violation = violation.max((direct - multiplied).norm());
    }
    Ok(VerificationReport::judged("smoothing_identity", violation, SMOOTHING_TOL)
        .with_grid(format!(
            "composite Gauss-Legendre order {GAUSS_ORDER}, {} points",
            z_samples.len()
        ))
        .with_details(vec![format!("spectrum preserved: {same_spectrum}")]))
}

/// Convergence of Bochner-Fejér sums on the real space: the sampled sup of
/// `|sigma_q - F|` must not increase along `orders`, must stay below
/// `sum |a_n| (1 - k_n^q)`, and every factor of a term with nonzero
/// coordinates must lie in `[0, 1)`.
pub fn verify_fejer_convergence(
    sum: &ExponentialSum,
    orders: &[u64],
    spec: &SamplingSpec,
) -> Result<VerificationReport> {
    if orders.is_empty() || orders.windows(2).any(|w| w[1] <= w[0]) || orders[0] == 0 {
        return Err(Error::InvalidInput("orders must be positive and increasing".into()));
    }
    let m = sum.dimension();
    let axes = spec.axes(m);
    let zero = vec![0.0; m];
    let mut errors = Vec::with_capacity(orders.len());
    let mut violation = f64::NEG_INFINITY;
    let mut details = Vec::new();
    for &q in orders {
        let scheme = FejerScheme::for_sum(sum, FejerOrder::Finite(q))?;
        let sigma = bochner_fejer_sum(sum, FejerOrder::Finite(q), Some(&scheme.base))?;
        let error = grid_sup(&sigma.sub(sum)?, &axes, &zero)?;
        let bound: f64 = sum
            .terms()
            .iter()
            .zip(&scheme.factors)
            .map(|(t, k)| t.coeff.norm() * (1.0 - k))
            .sum();
        violation = violation.max(error - bound);
        for (k, coords) in scheme.factors.iter().zip(&scheme.base.coords) {
            let damped = coords.iter().any(|r| *r != 0);
            if *k < 0.0 || *k > 1.0 || (damped && *k >= 1.0) {
                violation = f64::INFINITY;
            }
        }
        details.push(format!("q={q}: sup error {error:.9e}, bound {bound:.9e}"));
        errors.push(error);
    }
    for w in errors.windows(2) {
        violation = violation.max(w[1] - w[0]);
    }
    if sum.is_empty() {
        violation = 0.0;
    }
    Ok(VerificationReport::judged("fejer_convergence", violation, FEJER_TOL)
        .with_grid(spec.describe())
        .with_details(details))
}
