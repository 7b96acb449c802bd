//! Bochner–Fejér summation.
//!
//! The spectrum is written over a rational base `beta_1, ..., beta_k` as
//! `lambda_n = sum_j r_nj beta_j` with integer `r_nj`. The damped sum of
//! order `q` multiplies `a_n` by `k_n^q = prod_j max(0, 1 - |r_nj| / q)`,
//! a product of one-dimensional Fejér factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::expsum::ExponentialSum;
use crate::linalg::{distance, dot, norm, rank, scale, solve};

pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 1e-9;
/// Largest denominator tried by the continued-fraction search.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Relative accuracy a convergent must reach to count as an exact ratio.
const RATIONAL_TOL: f64 = 1e-13;
const MAX_COORDINATE: i64 = 1 << 52;

/// Best rational approximation `p/q` (`q <= MAX_DENOMINATOR`) that matches
/// `x` to relative accuracy `1e-13`, if any.
pub fn rationalize(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = RATIONAL_TOL * x.abs().max(1.0);
    let (mut h1, mut h2) = (1i128, 0i128);
    let (mut k1, mut k2) = (0i128, 1i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let (h, k) = (a * h1 + h2, a * k1 + k2);
        if k > MAX_DENOMINATOR as i128 {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((h as i64, k as i64));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (h2, h1, k2, k1) = (h1, h, k1, k);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalBase {
    pub base: Vec<Vec<f64>>,
    /// One row per spectrum element, one column per base vector.
    pub coords: Vec<Vec<i64>>,
}

impl RationalBase {
    pub fn reconstruct(&self, row: usize) -> Vec<f64> {
        let m = self.base.first().map_or(0, Vec::len);
        let mut v = vec![0.0; m];
        for (r, b) in self.coords[row].iter().zip(&self.base) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += *r as f64 * bi;
            }
        }
        v
    }

    /// Largest reconstruction error over `spectrum`; `None` when the shapes
    /// do not match.
    pub fn reconstruction_error(&self, spectrum: &[Vec<f64>]) -> Option<f64> {
        if self.coords.len() != spectrum.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (i, lambda) in spectrum.iter().enumerate() {
            if self.coords[i].len() != self.base.len() {
                return None;
            }
            if self.base.is_empty() {
                worst = worst.max(norm(lambda));
                continue;
            }
            if self.base[0].len() != lambda.len() {
                return None;
            }
            worst = worst.max(distance(&self.reconstruct(i), lambda));
        }
        Some(worst)
    }

    fn scale_column(&mut self, j: usize, q: i64, lambda: &[f64], tol: f64) -> Result<()> {
        if q == 1 {
            return Ok(());
        }
        for row in self.coords.iter_mut() {
            row[j] = row[j]
                .checked_mul(q)
                .filter(|v| v.abs() <= MAX_COORDINATE)
                .ok_or_else(|| Error::Reconstruction {
                    frequency: lambda.to_vec(),
                    tolerance: tol,
                })?;
        }
        self.base[j] = scale(&self.base[j], 1.0 / q as f64);
        Ok(())
    }
}

/// Finds a rational base for `spectrum` (processed in the given order).
///
/// A frequency joins an existing base vector when it is a rational multiple
/// of it, or a rational combination of a linearly independent base; the
/// base vectors are divided by the denominators found. Otherwise it becomes
/// a new base vector. `{1, 2} -> {1}`, `{1/2, 1/3} -> {1/6}`,
/// `{1, sqrt 2} -> {1, sqrt 2}`.
pub fn rational_base(spectrum: &[Vec<f64>], tol: f64) -> Result<RationalBase> {
    let Some(first) = spectrum.first() else {
        return Err(Error::EmptySet);
    };
    let m = first.len();
    let mut rb = RationalBase {
        base: Vec::new(),
        coords: Vec::new(),
    };
    for lambda in spectrum {
        check_dim(m, lambda.len())?;
        let k = rb.base.len();
        if norm(lambda) <= tol {
            rb.coords.push(vec![0; k]);
            continue;
        }
        if let Some(row) = join_parallel(&mut rb, lambda, tol)? {
            rb.coords.push(row);
            continue;
        }
        if let Some(row) = join_combination(&mut rb, lambda, tol)? {
            rb.coords.push(row);
            continue;
        }
        for row in rb.coords.iter_mut() {
            row.push(0);
        }
        rb.base.push(lambda.clone());
        let mut row = vec![0; k + 1];
        row[k] = 1;
        rb.coords.push(row);
    }
    for (i, lambda) in spectrum.iter().enumerate() {
        let err = if rb.base.is_empty() {
            norm(lambda)
        } else {
            distance(&rb.reconstruct(i), lambda)
        };
        if err > tol {
            return Err(Error::Reconstruction {
                frequency: lambda.clone(),
                tolerance: tol,
            });
        }
    }
    Ok(rb)
}

fn join_parallel(rb: &mut RationalBase, lambda: &[f64], tol: f64) -> Result<Option<Vec<i64>>> {
    for j in 0..rb.base.len() {
        let beta = &rb.base[j];
        let ratio = dot(lambda, beta) / dot(beta, beta);
        if distance(lambda, &scale(beta, ratio)) > tol {
            continue;
        }
        if let Some((p, q)) = rationalize(ratio) {
            rb.scale_column(j, q, lambda, tol)?;
            let mut row = vec![0; rb.base.len()];
            row[j] = p;
            return Ok(Some(row));
        }
    }
    Ok(None)
}

fn join_combination(rb: &mut RationalBase, lambda: &[f64], tol: f64) -> Result<Option<Vec<i64>>> {
    let k = rb.base.len();
    if k < 2 || k > lambda.len() || rank(&rb.base, 1e-9) < k {
        return Ok(None);
    }
    let gram: Vec<Vec<f64>> = rb
        .base
        .iter()
        .map(|a| rb.base.iter().map(|b| dot(a, b)).collect())
        .collect();
    let rhs: Vec<f64> = rb.base.iter().map(|b| dot(b, lambda)).collect();
    let Some(coef) = solve(&gram, &rhs, 1e-14) else {
        return Ok(None);
    };
    let mut fit = vec![0.0; lambda.len()];
    for (c, b) in coef.iter().zip(&rb.base) {
        for (f, bi) in fit.iter_mut().zip(b) {
            *f += c * bi;
        }
    }
    if distance(&fit, lambda) > tol {
        return Ok(None);
    }
    let Some(fractions) = coef.iter().map(|&c| rationalize(c)).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    for (j, &(_, q)) in fractions.iter().enumerate() {
        rb.scale_column(j, q, lambda, tol)?;
    }
    Ok(Some(fractions.iter().map(|&(p, _)| p).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FejerOrder {
    Finite(u64),
    /// The undamped sum (`q = infinity`).
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerScheme {
    pub base: RationalBase,
    pub order: FejerOrder,
    pub factors: Vec<f64>,
}

/// `prod_j max(0, 1 - |r_j| / q)`, each factor formed as the correctly
/// rounded quotient `(q - |r_j|) / q`.
pub fn fejer_factor(coords: &[i64], order: FejerOrder) -> f64 {
    match order {
        FejerOrder::Unbounded => 1.0,
        FejerOrder::Finite(q) => coords
            .iter()
            .map(|r| (q as f64 - r.unsigned_abs() as f64).max(0.0) / q as f64)
            .product(),
    }
}

impl FejerScheme {
    pub fn new(base: RationalBase, order: FejerOrder) -> Result<Self> {
        if order == FejerOrder::Finite(0) {
            return Err(Error::InvalidInput("Fejér order must be positive".into()));
        }
        let factors = base.coords.iter().map(|r| fejer_factor(r, order)).collect();
        Ok(Self {
            base,
            order,
            factors,
        })
    }

    pub fn for_sum(sum: &ExponentialSum, order: FejerOrder) -> Result<Self> {
        Self::new(rational_base(&sum.spectrum(), DEFAULT_RECONSTRUCTION_TOL)?, order)
    }
}

/// Damped sum `sigma_q` with coefficients `k_n^q a_n`; zero-factor terms are
/// dropped. The base is computed with [`rational_base`] when not given.
pub fn bochner_fejer_sum(
    sum: &ExponentialSum,
    order: FejerOrder,
    base: Option<&RationalBase>,
) -> Result<ExponentialSum> {
    if sum.is_empty() {
        return Ok(sum.clone());
    }
    let spectrum = sum.spectrum();
    let scheme = match base {
        Some(b) => {
            match b.reconstruction_error(&spectrum) {
                Some(err) if err <= DEFAULT_RECONSTRUCTION_TOL => {}
                _ => {
                    return Err(Error::Precondition(
                        "rational base does not reconstruct the spectrum".into(),
                    ))
                }
            }
            FejerScheme::new(b.clone(), order)?
        }
        None => FejerScheme::for_sum(sum, order)?,
    };
    let terms = sum
        .terms()
        .iter()
        .zip(&scheme.factors)
        .filter(|(_, k)| **k > 0.0)
        .map(|(t, k)| crate::expsum::Term::new(t.lambda.clone(), t.coeff * Complex64::new(*k, 0.0)))
        .collect();
    ExponentialSum::new(sum.dimension(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::TubePoint;
    use std::f64::consts::{PI, SQRT_2, TAU};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rationalize(2.0 / 3.0), Some((2, 3)));
        assert_eq!(rationalize(-1.5), Some((-3, 2)));
        assert_eq!(rationalize(7.0), Some((7, 1)));
        assert_eq!(rationalize(SQRT_2), None);
        assert_eq!(rationalize(PI), None);
    }

    #[test]
    fn integer_spectrum_has_unit_base() {
        let rb = rational_base(&[vec![1.0], vec![2.0]], 1e-9).unwrap();
        assert_eq!(rb.base, vec![vec![1.0]]);
        assert_eq!(rb.coords, vec![vec![1], vec![2]]);
    }

    #[test]
    fn rational_gcd() {
        let rb = rational_base(&[vec![0.5], vec![1.0 / 3.0]], 1e-9).unwrap();
        assert_eq!(rb.base.len(), 1);
        assert!((rb.base[0][0] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(rb.coords, vec![vec![3], vec![2]]);
    }

    #[test]
    fn incommensurable_pair_keeps_two_base_values() {
        let rb = rational_base(&[vec![1.0], vec![SQRT_2], vec![2.0 * SQRT_2]], 1e-9).unwrap();
        assert_eq!(rb.base, vec![vec![1.0], vec![SQRT_2]]);
        assert_eq!(rb.coords, vec![vec![1, 0], vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn planar_combination_joins_independent_base() {
        let b1 = vec![1.0, 0.3];
        let b2 = vec![-0.2, 0.9];
        let l3: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| 0.5 * a + 2.0 * b).collect();
        let rb = rational_base(&[b1.clone(), b2.clone(), l3.clone()], 1e-9).unwrap();
        assert_eq!(rb.base.len(), 2);
        assert_eq!(rb.coords[2], vec![1, 2]);
        assert!(rb.reconstruction_error(&[b1, b2, l3]).unwrap() < 1e-12);
        assert!(rational_base(&[], 1e-9).is_err());
    }

    #[test]
    fn classical_factors() {
        let s = ExponentialSum::from_pairs(1, [(vec![0.0], c(1.0)), (vec![1.0], c(1.0)), (vec![2.0], c(1.0))])
            .unwrap();
        let scheme = FejerScheme::for_sum(&s, FejerOrder::Finite(3)).unwrap();
        assert_eq!(scheme.factors, vec![1.0, 2.0 / 3.0, 1.0 / 3.0]);
        let one = bochner_fejer_sum(&s, FejerOrder::Finite(1), None).unwrap();
        assert_eq!(one.spectrum(), vec![vec![0.0]]);
        assert_eq!(bochner_fejer_sum(&s, FejerOrder::Unbounded, None).unwrap(), s);
        assert_eq!(fejer_factor(&[1, 1], FejerOrder::Finite(2)), 0.25);
    }

    #[test]
    fn factors_match_fejer_kernel_convolution() {
        // sigma_q(x) = (1/2pi) ∫ f(x - t) K_q(t) dt with the closed-form kernel
        // K_q(t) = (1/q) (sin(q t / 2) / sin(t / 2))^2.
        let s = ExponentialSum::from_pairs(
            1,
            [
                (vec![0.0], c(1.0)),
                (vec![1.0], Complex64::new(0.4, -0.7)),
                (vec![2.0], c(-1.3)),
                (vec![-3.0], Complex64::new(0.0, 0.5)),
            ],
        )
        .unwrap();
        let q = 3u64;
        let sigma = bochner_fejer_sum(&s, FejerOrder::Finite(q), None).unwrap();
        let kernel = |t: f64| {
            let den = (t / 2.0).sin();
            if den.abs() < 1e-12 {
                q as f64
            } else {
                ((q as f64 * t / 2.0).sin() / den).powi(2) / q as f64
            }
        };
        let points = 4096;
        for x in [0.0, 0.7, 2.9] {
            let conv: Complex64 = (0..points)
                .map(|k| {
                    let t = (k as f64 + 0.5) * TAU / points as f64;
                    s.evaluate(&TubePoint::real(vec![x - t])).unwrap() * kernel(t)
                })
                .sum::<Complex64>()
                / points as f64;
            let direct = sigma.evaluate(&TubePoint::real(vec![x])).unwrap();
            assert!((conv - direct).norm() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn rejects_foreign_base() {
        let s = ExponentialSum::from_pairs(1, [(vec![1.0], c(1.0))]).unwrap();
        let wrong = RationalBase {
            base: vec![vec![0.3]],
            coords: vec![vec![1]],
        };
        assert!(bochner_fejer_sum(&s, FejerOrder::Finite(2), Some(&wrong)).is_err());
    }
}
