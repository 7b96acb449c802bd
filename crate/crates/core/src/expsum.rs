//! Finite exponential sums `F(z) = sum_n a_n exp(i <z, lambda_n>)` on `C^m`.
//!
//! A sum is stored in canonical form: terms sorted lexicographically by
//! frequency, frequencies closer than the dedup tolerance merged by adding
//! their coefficients, and terms below the prune tolerance removed.
//! Every operation is pure and returns a new canonical value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{distance, dot, is_finite, lex_cmp, norm};

pub type ComplexScalar = Complex64;

/// Largest admissible value of `-<y, lambda>` for any term.
pub const GROWTH_LIMIT: f64 = 700.0;
pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;

/// Point `z = x + iy` of `C^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TubePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_dim(x.len(), y.len())?;
        if !is_finite(&x) || !is_finite(&y) {
            return Err(Error::InvalidInput("tube point has non-finite coordinates".into()));
        }
        Ok(Self { x, y })
    }

    pub fn real(x: Vec<f64>) -> Self {
        let y = vec![0.0; x.len()];
        Self { x, y }
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub lambda: Vec<f64>,
    pub coeff: Complex64,
}

impl Term {
    pub fn new(lambda: Vec<f64>, coeff: Complex64) -> Self {
        Self { lambda, coeff }
    }
}

/// Tolerances applied while canonicalizing a term list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalOptions {
    pub dedup_tol: f64,
    pub prune_tol: f64,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        Self {
            dedup_tol: DEFAULT_DEDUP_TOL,
            prune_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SumDocument", into = "SumDocument")]
pub struct ExponentialSum {
    dimension: usize,
    terms: Vec<Term>,
}

impl ExponentialSum {
    pub fn new(dimension: usize, terms: Vec<Term>) -> Result<Self> {
        Self::with_options(dimension, terms, CanonicalOptions::default())
    }

    pub fn with_options(
        dimension: usize,
        terms: Vec<Term>,
        options: CanonicalOptions,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        for t in &terms {
            check_dim(dimension, t.lambda.len())?;
            if !is_finite(&t.lambda) {
                return Err(Error::InvalidInput(format!(
                    "non-finite frequency {:?}",
                    t.lambda
                )));
            }
            if !(t.coeff.re.is_finite() && t.coeff.im.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite coefficient at frequency {:?}",
                    t.lambda
                )));
            }
        }
        Ok(Self {
            dimension,
            terms: canonicalize(terms, options),
        })
    }

    /// Convenience constructor from `(lambda, coefficient)` pairs.
    pub fn from_pairs<I>(dimension: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Complex64)>,
    {
        Self::new(
            dimension,
            pairs.into_iter().map(|(l, a)| Term::new(l, a)).collect(),
        )
    }

    pub fn empty(dimension: usize) -> Result<Self> {
        Self::new(dimension, Vec::new())
    }

    pub fn constant(dimension: usize, value: Complex64) -> Result<Self> {
        Self::new(dimension, vec![Term::new(vec![0.0; dimension], value)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn spectrum(&self) -> Vec<Vec<f64>> {
        self.terms.iter().map(|t| t.lambda.clone()).collect()
    }

    /// Coefficient stored at `lambda` (within `tol`), zero when absent.
    pub fn coefficient_at(&self, lambda: &[f64], tol: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| distance(&t.lambda, lambda) <= tol)
            .map(|t| t.coeff)
            .sum()
    }

    pub fn contains_frequency(&self, lambda: &[f64], tol: f64) -> bool {
        self.terms.iter().any(|t| distance(&t.lambda, lambda) <= tol)
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Canonical equality: same term count, frequencies and coefficients
    /// component-wise within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dimension == other.dimension
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| {
                a.lambda
                    .iter()
                    .zip(&b.lambda)
                    .all(|(p, q)| (p - q).abs() <= tol)
                    && (a.coeff.re - b.coeff.re).abs() <= tol
                    && (a.coeff.im - b.coeff.im).abs() <= tol
            })
    }

    pub fn check_growth(&self, y: &[f64]) -> Result<()> {
        for t in &self.terms {
            let exponent = -dot(y, &t.lambda);
            if !(exponent <= GROWTH_LIMIT) {
                return Err(Error::GrowthOverflow {
                    exponent,
                    limit: GROWTH_LIMIT,
                });
            }
        }
        Ok(())
    }

    /// `F(x + iy) = sum_n a_n e^{-<y,lambda_n>} e^{i<x,lambda_n>}`, summed in
    /// canonical term order.
    pub fn evaluate(&self, z: &TubePoint) -> Result<Complex64> {
        check_dim(self.dimension, z.x.len())?;
        check_dim(self.dimension, z.y.len())?;
        self.check_growth(&z.y)?;
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let damp = (-dot(&z.y, &t.lambda)).exp();
                t.coeff * Complex64::from_polar(damp, dot(&z.x, &t.lambda))
            })
            .sum())
    }

    /// `log |F(x + iy)|` computed with a shifted exponent so that it stays
    /// finite far outside the growth limit. Returns `-inf` where `F = 0`.
    pub fn log_modulus(&self, z: &TubePoint) -> Result<f64> {
        check_dim(self.dimension, z.x.len())?;
        check_dim(self.dimension, z.y.len())?;
        if self.terms.is_empty() {
            return Ok(f64::NEG_INFINITY);
        }
        let exps: Vec<f64> = self
            .terms
            .iter()
            .map(|t| -dot(&z.y, &t.lambda))
            .collect();
        let shift = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total: Complex64 = self
            .terms
            .iter()
            .zip(&exps)
            .map(|(t, e)| t.coeff * Complex64::from_polar((e - shift).exp(), dot(&z.x, &t.lambda)))
            .sum();
        Ok(shift + total.norm().ln())
    }

    /// Shifts every frequency by `shift` and multiplies every coefficient by
    /// `scale`.
    pub fn modulate(&self, shift: &[f64], scale: Complex64) -> Result<Self> {
        check_dim(self.dimension, shift.len())?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Term::new(
                    t.lambda.iter().zip(shift).map(|(l, s)| l + s).collect(),
                    t.coeff * scale,
                )
            })
            .collect();
        Self::new(self.dimension, terms)
    }

    /// The function `z -> F(z + x0)` for real `x0`.
    pub fn translate(&self, x0: &[f64]) -> Result<Self> {
        check_dim(self.dimension, x0.len())?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Term::new(
                    t.lambda.clone(),
                    t.coeff * Complex64::from_polar(1.0, dot(x0, &t.lambda)),
                )
            })
            .collect();
        Ok(Self {
            dimension: self.dimension,
            terms,
        })
    }

    /// Multiplies each coefficient by `factor(term)`; frequencies unchanged.
    pub fn map_coefficients<F>(&self, mut factor: F) -> Self
    where
        F: FnMut(&Term) -> Complex64,
    {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.lambda.clone(), t.coeff * factor(t)))
            .collect();
        Self {
            dimension: self.dimension,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dimension, other.dimension)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.dimension, terms)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dimension, other.dimension)?;
        let terms = self
            .terms
            .iter()
            .cloned()
            .chain(other.terms.iter().map(|t| Term::new(t.lambda.clone(), -t.coeff)))
            .collect();
        Self::new(self.dimension, terms)
    }

    /// `sum_n |a_n| e^{-<y,lambda_n>}`, an upper bound of `|F(x+iy)|` for all x.
    pub fn majorant(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dimension, y.len())?;
        self.check_growth(y)?;
        Ok(self
            .terms
            .iter()
            .map(|t| t.coeff.norm() * (-dot(y, &t.lambda)).exp())
            .sum())
    }

    /// Largest Euclidean norm of a frequency; 0 for the empty sum.
    pub fn exponential_type(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| norm(&t.lambda))
            .fold(0.0, f64::max)
    }

    /// Evaluates on the tensor grid `axes[0] x ... x axes[m-1]` at height `y`.
    /// Output is row-major with the last axis varying fastest.
    pub fn evaluate_on_grid(&self, axes: &[Vec<f64>], y: &[f64]) -> Result<Vec<Complex64>> {
        check_dim(self.dimension, axes.len())?;
        check_dim(self.dimension, y.len())?;
        self.check_growth(y)?;
        let n_terms = self.terms.len();
        let weights: Vec<Complex64> = self
            .terms
            .iter()
            .map(|t| t.coeff * (-dot(y, &t.lambda)).exp())
            .collect();
        // tables[j][k * n_terms + n] = exp(i * axes[j][k] * lambda_n[j])
        let tables: Vec<Vec<Complex64>> = axes
            .iter()
            .enumerate()
            .map(|(j, axis)| {
                axis.iter()
                    .flat_map(|&x| {
                        self.terms
                            .iter()
                            .map(move |t| Complex64::from_polar(1.0, x * t.lambda[j]))
                    })
                    .collect()
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        let mut index = vec![0usize; axes.len()];
        let mut partial = vec![Complex64::new(0.0, 0.0); n_terms];
        for _ in 0..total {
            partial.copy_from_slice(&weights);
            for (j, &k) in index.iter().enumerate() {
                let row = &tables[j][k * n_terms..(k + 1) * n_terms];
                for (p, r) in partial.iter_mut().zip(row) {
                    *p *= r;
                }
            }
            out.push(partial.iter().sum());
            for j in (0..index.len()).rev() {
                index[j] += 1;
                if index[j] < axes[j].len() {
                    break;
                }
                index[j] = 0;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sum serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn canonicalize(mut terms: Vec<Term>, options: CanonicalOptions) -> Vec<Term> {
    terms.sort_by(|a, b| lex_cmp(&a.lambda, &b.lambda));
    let n = terms.len();
    // union-find over pairs closer than the dedup tolerance
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if distance(&terms[i].lambda, &terms[j].lambda) <= options.dedup_tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut merged: Vec<Option<Term>> = vec![None; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        match &mut merged[r] {
            Some(t) => t.coeff += terms[i].coeff,
            slot @ None => *slot = Some(terms[i].clone()),
        }
    }
    merged
        .into_iter()
        .flatten()
        .filter(|t| !(t.coeff.norm() < options.prune_tol))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SumDocument {
    dimension: usize,
    terms: Vec<TermDocument>,
}

#[derive(Serialize, Deserialize)]
struct TermDocument {
    lambda: Vec<f64>,
    re: f64,
    im: f64,
}

impl TryFrom<SumDocument> for ExponentialSum {
    type Error = Error;

    fn try_from(doc: SumDocument) -> Result<Self> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| Term::new(t.lambda, Complex64::new(t.re, t.im)))
            .collect();
        ExponentialSum::new(doc.dimension, terms)
    }
}

impl From<ExponentialSum> for SumDocument {
    fn from(sum: ExponentialSum) -> Self {
        SumDocument {
            dimension: sum.dimension,
            terms: sum
                .terms
                .into_iter()
                .map(|t| TermDocument {
                    lambda: t.lambda,
                    re: t.coeff.re,
                    im: t.coeff.im,
                })
                .collect(),
        }
    }
}
