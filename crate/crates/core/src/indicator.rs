//! Growth indicator `h_F(y) = sup_x limsup_r (1/r) log |F(x + iry)|`.
//!
//! For a finite sum the indicator is `max_n -<y, lambda_n>`, the support
//! function of the spectrum at `-y`. The estimator fits the slope of
//! `log |F|` along rays, working with `log |F|` directly so that large
//! radii never overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::support_function;
use crate::error::{check_dim, Error, Result};
use crate::expsum::{ExponentialSum, TubePoint};
use crate::linalg::{dot, is_finite, scale};
use crate::metrics::SamplingSpec;
use crate::verify::report::VerificationReport;

pub const DEFAULT_GRID_SLACK: f64 = 5e-2;
/// `|F|` below this is treated as a zero of `F`.
pub const ZERO_MODULUS: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEstimate {
    pub y: Vec<f64>,
    pub slope: f64,
    pub oracle: f64,
    pub residual: f64,
    pub r_max: f64,
    pub x_star: Vec<f64>,
    /// `(x, r)` pairs dropped as zeros of `F`.
    pub excluded: usize,
}

pub fn indicator_oracle(sum: &ExponentialSum, y: &[f64]) -> Result<f64> {
    check_dim(sum.dimension(), y.len())?;
    support_function(&sum.spectrum(), &scale(y, -1.0))
}

/// `count` radii from `r_min` to `r_max`, equally spaced in `log r`.
pub fn geometric_radii(r_min: f64, r_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || count < 2 {
        return Err(Error::InvalidInput(
            "need 0 < r_min < r_max and at least two radii".into(),
        ));
    }
    let ratio = (r_max / r_min).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if k == count - 1 {
                r_max
            } else {
                r_min * (ratio * k as f64).exp()
            }
        })
        .collect())
}

/// Least-squares slope of `log |F(x + iry)|` against `r` over the upper half
/// of `radii`, maximized over the x-grid of `spec`. The y samples of `spec`
/// are not used.
pub fn p_indicator_estimate(
    sum: &ExponentialSum,
    y: &[f64],
    radii: &[f64],
    spec: &SamplingSpec,
) -> Result<IndicatorEstimate> {
    let m = sum.dimension();
    check_dim(m, y.len())?;
    if sum.is_empty() {
        return Err(Error::EmptySet);
    }
    if !is_finite(y) {
        return Err(Error::InvalidInput("non-finite direction".into()));
    }
    if radii.len() < 2
        || radii.iter().any(|r| !(*r > 0.0 && r.is_finite()))
        || radii.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidInput(
            "radii must be positive, increasing and at least two".into(),
        ));
    }
    let oracle = indicator_oracle(sum, y)?;
    let top = &radii[radii.len() / 2..];
    let top = if top.len() < 2 { &radii[radii.len() - 2..] } else { top };
    let r_max = *radii.last().expect("checked non-empty");

    let axes = spec.axes(m);
    let total: usize = axes.iter().map(Vec::len).product();
    let fits: Vec<(Option<f64>, usize, Vec<f64>)> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let x = grid_point(flat, &axes);
            let (slope, excluded) = ray_fit(sum, &x, y, top);
            (slope, excluded, x)
        })
        .collect();

    let excluded = fits.iter().map(|f| f.1).sum();
    let best = fits
        .into_iter()
        .filter_map(|(slope, _, x)| slope.map(|s| (s, x)))
        .fold(None::<(f64, Vec<f64>)>, |acc, (s, x)| match acc {
            Some((best, _)) if best >= s => acc,
            _ => Some((s, x)),
        });
    let (slope, x_star) = best.ok_or(Error::AllSamplesExcluded)?;
    Ok(IndicatorEstimate {
        y: y.to_vec(),
        slope,
        oracle,
        residual: (slope - oracle).abs(),
        r_max,
        x_star,
        excluded,
    })
}

/// Slope fit along one ray, and the number of radii dropped as zeros of `F`.
///
/// Zeros are judged relative to the largest term, `|F| < 1e-300 max_n |a_n
/// e^{i<z,lambda_n>}|`, since `|F|` itself legitimately leaves the double
/// range at large radii.
fn ray_fit(sum: &ExponentialSum, x: &[f64], y: &[f64], radii: &[f64]) -> (Option<f64>, usize) {
    let zero_log = ZERO_MODULUS.ln();
    let mut points = Vec::with_capacity(radii.len());
    let mut excluded = 0;
    for &r in radii {
        let ry = scale(y, r);
        let z = TubePoint {
            x: x.to_vec(),
            y: ry.clone(),
        };
        let value = sum.log_modulus(&z).expect("dimensions checked");
        let scale_log = sum
            .terms()
            .iter()
            .map(|t| t.coeff.norm().ln() - dot(&ry, &t.lambda))
            .fold(f64::NEG_INFINITY, f64::max);
        if !value.is_finite() || value - scale_log < zero_log {
            excluded += 1;
        } else {
            points.push((r, value));
        }
    }
    (least_squares_slope(&points), excluded)
}

fn grid_point(mut flat: usize, axes: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; axes.len()];
    for j in (0..axes.len()).rev() {
        let n = axes[j].len();
        out[j] = axes[j][flat % n];
        flat /= n;
    }
    out
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_r = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_r).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_r) * (p.1 - mean_v)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Checks `|a_n| <= sup_x |F(x+iy)| e^{<y,lambda_n>} (1 + slack)` for every
/// term and every y sample of `spec`, with the sup taken over the x-grid.
///
/// The violation is `max |a_n| e^{-<y,lambda_n>} / sup_x |F| - 1`, judged
/// against `slack`.
pub fn coefficient_bound_check(sum: &ExponentialSum, spec: &SamplingSpec, slack: f64) -> Result<VerificationReport> {
    let m = sum.dimension();
    if !(slack >= 0.0) {
        return Err(Error::InvalidInput("grid slack must be non-negative".into()));
    }
    for y in &spec.y_samples {
        check_dim(m, y.len())?;
        sum.check_growth(y)?;
    }
    let axes = spec.axes(m);
    let mut violation = f64::NEG_INFINITY;
    let mut details = Vec::new();
    for y in &spec.y_samples {
        let sup = sum
            .evaluate_on_grid(&axes, y)?
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        for t in sum.terms() {
            let damped = t.coeff.norm() * (-dot(y, &t.lambda)).exp();
            let ratio = if sup > 0.0 { damped / sup } else { f64::INFINITY };
            violation = violation.max(ratio - 1.0);
        }
        details.push(format!("y={y:?} sampled sup={sup:.6e}"));
    }
    if sum.is_empty() {
        violation = 0.0;
    }
    Ok(VerificationReport::judged("coefficient_bound", violation, slack)
        .with_grid(spec.describe())
        .with_details(details))
}
