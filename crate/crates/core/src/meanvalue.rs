//! Cube means: Fourier coefficients of a sum, off-spectrum decay of the
//! mean along a linear change of variables, and box smoothing.
//!
//! For a finite sum the cube mean has a closed form. With `d = lambda_n - lambda`,
//!
//! ```text
//! (2N)^-m ∫_{[-N,N]^m} F(x + x' + iy) e^{-i<x+x',lambda>} dx
//!     = sum_n a_n e^{-<y,lambda_n>} e^{i<x',d>} prod_j sinc(N d_j)
//! ```
//!
//! which is the primary path. The sampled mode (tensor midpoint rule) is
//! kept as an independent cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::expsum::{ExponentialSum, DEFAULT_DEDUP_TOL};
use crate::linalg::{det, dot, is_finite, sub};
use crate::quadrature::midpoints;

/// Tolerance for `lambda * N` hitting a nonzero multiple of `2*pi`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;
const STALL_TOL: f64 = 1e-12;

pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    ClosedForm,
    Sampled { points_per_axis: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSpec {
    pub half_width: f64,
    pub shift: Vec<f64>,
    pub height: Vec<f64>,
    pub quadrature: Quadrature,
}

impl MeanSpec {
    pub fn new(half_width: f64, shift: Vec<f64>, height: Vec<f64>, quadrature: Quadrature) -> Result<Self> {
        let spec = Self {
            half_width,
            shift,
            height,
            quadrature,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn closed_form(half_width: f64, dimension: usize) -> Result<Self> {
        Self::new(
            half_width,
            vec![0.0; dimension],
            vec![0.0; dimension],
            Quadrature::ClosedForm,
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cube half-width must be positive, got {}",
                self.half_width
            )));
        }
        check_dim(self.shift.len(), self.height.len())?;
        if !is_finite(&self.shift) || !is_finite(&self.height) {
            return Err(Error::InvalidInput("non-finite shift or height".into()));
        }
        if let Quadrature::Sampled { points_per_axis } = self.quadrature {
            if points_per_axis < 2 {
                return Err(Error::InvalidInput(
                    "sampled quadrature needs at least 2 points per axis".into(),
                ));
            }
        }
        Ok(())
    }
}

pub fn cube_mean_coefficient(sum: &ExponentialSum, lambda: &[f64], spec: &MeanSpec) -> Result<Complex64> {
    spec.validate()?;
    let m = sum.dimension();
    check_dim(m, lambda.len())?;
    check_dim(m, spec.shift.len())?;
    // growth guard at the requested height
    sum.majorant(&spec.height)?;
    match spec.quadrature {
        Quadrature::ClosedForm => Ok(sum
            .terms()
            .iter()
            .map(|t| {
                let d = sub(&t.lambda, lambda);
                let window: f64 = d.iter().map(|dj| sinc(spec.half_width * dj)).product();
                let damp = (-dot(&spec.height, &t.lambda)).exp();
                t.coeff * Complex64::from_polar(damp * window, dot(&spec.shift, &d))
            })
            .sum()),
        Quadrature::Sampled { points_per_axis } => {
            let n = spec.half_width;
            let axes: Vec<Vec<f64>> = spec
                .shift
                .iter()
                .map(|s| midpoints(s - n, s + n, points_per_axis))
                .collect();
            let values = sum.evaluate_on_grid(&axes, &spec.height)?;
            let phase = ExponentialSum::from_pairs(
                m,
                [(lambda.iter().map(|l| -l).collect(), Complex64::new(1.0, 0.0))],
            )?
            .evaluate_on_grid(&axes, &vec![0.0; m])?;
            let total: Complex64 = values.iter().zip(&phase).map(|(v, p)| v * p).sum();
            Ok(total / values.len() as f64)
        }
    }
}

/// Bound on `|sampled - closed form|` for the midpoint rule used by
/// [`Quadrature::Sampled`]: `sum_n |a_n| e^{-<y,lambda_n>} sum_j (h d_j)^2 / 24`
/// with cell width `h = 2N / points`.
pub fn midpoint_error_bound(sum: &ExponentialSum, lambda: &[f64], spec: &MeanSpec) -> Result<f64> {
    let points = match spec.quadrature {
        Quadrature::Sampled { points_per_axis } => points_per_axis,
        Quadrature::ClosedForm => return Ok(0.0),
    };
    check_dim(sum.dimension(), lambda.len())?;
    let h = 2.0 * spec.half_width / points as f64;
    let mut bound = 0.0;
    for t in sum.terms() {
        let d = sub(&t.lambda, lambda);
        let per_axis: f64 = d.iter().map(|dj| (h * dj).powi(2) / 24.0).sum();
        bound += t.coeff.norm() * (-dot(&spec.height, &t.lambda)).exp() * per_axis;
    }
    Ok(bound)
}

/// Multiplier `(e^{i lambda N} - 1) / (i lambda N)` of the box mean over
/// `[0, N]` for one coordinate; 1 when `lambda = 0`.
pub fn box_multiplier(lambda: f64, width: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let half = 0.5 * lambda * width;
    Complex64::from_polar(sinc(half), half)
}

/// Coefficients of `g(z) = N^-m ∫_{[0,N]^m} F(z + t) dt`. The spectrum is
/// unchanged because no `lambda_n^j N` may hit `2*pi*k`, `k != 0`.
pub fn box_smooth(sum: &ExponentialSum, width: f64) -> Result<ExponentialSum> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "smoothing width must be positive, got {width}"
        )));
    }
    check_admissible(sum, width)?;
    Ok(sum.map_coefficients(|t| t.lambda.iter().map(|&l| box_multiplier(l, width)).product()))
}

pub fn check_admissible(sum: &ExponentialSum, width: f64) -> Result<()> {
    for (n, t) in sum.terms().iter().enumerate() {
        for (j, &l) in t.lambda.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let product = l * width;
            let k = (product / std::f64::consts::TAU).round();
            if k != 0.0 && (product - k * std::f64::consts::TAU).abs() <= ADMISSIBILITY_TOL {
                return Err(Error::InadmissibleWidth {
                    width,
                    term: n,
                    axis: j,
                    product,
                    multiple: k as i64,
                });
            }
        }
    }
    Ok(())
}

/// Square matrix, row-major; column `j` is the image of the basis vector `e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub matrix: Vec<Vec<f64>>,
}

impl LinearMap {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let m = matrix.len();
        if m == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        for row in &matrix {
            check_dim(m, row.len())?;
            if !is_finite(row) {
                return Err(Error::InvalidInput("non-finite matrix entry".into()));
            }
        }
        Ok(Self { matrix })
    }

    pub fn identity(dimension: usize) -> Self {
        let matrix = (0..dimension)
            .map(|i| (0..dimension).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { matrix }
    }

    /// Builds the map whose columns are the given images of `e_1, ..., e_m`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let m = columns.len();
        let matrix = (0..m)
            .map(|i| columns.iter().map(|c| c.get(i).copied().unwrap_or(f64::NAN)).collect())
            .collect();
        Self::new(matrix)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    pub fn determinant(&self) -> f64 {
        det(&self.matrix)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.iter().map(|row| row[j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dimension()).map(|j| self.column(j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    /// `(N, |mean over A([-N, N]^m)|)` in schedule order.
    pub samples: Vec<(f64, f64)>,
    /// `(term, axis)` pairs with `<A e_j, lambda_n - lambda> = 0`; the
    /// corresponding sinc factor is identically 1.
    pub stalled: Vec<(usize, usize)>,
}

impl DecayProbe {
    pub fn is_stalled(&self) -> bool {
        !self.stalled.is_empty()
    }
}

/// `|(2N)^-m ∫_{[-N,N]^m} F(A xi) e^{-i<A xi, lambda>} d xi|` for each `N`
/// of the schedule, in closed form.
pub fn offspectrum_decay_probe(
    sum: &ExponentialSum,
    lambda: &[f64],
    map: &LinearMap,
    schedule: &[f64],
) -> Result<DecayProbe> {
    let m = sum.dimension();
    check_dim(m, lambda.len())?;
    check_dim(m, map.dimension())?;
    if sum.contains_frequency(lambda, DEFAULT_DEDUP_TOL) {
        return Err(Error::InSpectrum(lambda.to_vec()));
    }
    let d = map.determinant();
    if !(d.abs() > 1e-12) {
        return Err(Error::DegenerateMap(d.abs()));
    }
    if schedule.is_empty()
        || schedule.iter().any(|n| !(*n > 0.0 && n.is_finite()))
        || schedule.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidInput(
            "schedule must be positive and strictly increasing".into(),
        ));
    }
    let columns = map.columns();
    // projections[n][j] = <A e_j, lambda_n - lambda>
    let projections: Vec<Vec<f64>> = sum
        .terms()
        .iter()
        .map(|t| {
            let diff = sub(&t.lambda, lambda);
            columns.iter().map(|c| dot(c, &diff)).collect()
        })
        .collect();
    let stalled = projections
        .iter()
        .enumerate()
        .flat_map(|(n, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| p.abs() <= STALL_TOL)
                .map(move |(j, _)| (n, j))
        })
        .collect();
    let samples = schedule
        .iter()
        .map(|&n| {
            let value: Complex64 = sum
                .terms()
                .iter()
                .zip(&projections)
                .map(|(t, row)| t.coeff * row.iter().map(|p| sinc(n * p)).product::<f64>())
                .sum();
            (n, value.norm())
        })
        .collect();
    Ok(DecayProbe { samples, stalled })
}
