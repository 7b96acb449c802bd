//! Double description: generators of `{y : <n_i, y> >= 0 for all i}`.
//!
//! Incremental Motzkin scheme. The cone is carried as `L + cone(R)` where
//! `L` is the lineality space (the kernel of the constraints processed so
//! far) and `R` the extreme rays of the pointed part. A constraint that
//! is not orthogonal to `L` consumes one lineality direction; otherwise
//! rays are split by sign and adjacent pos/neg pairs are combined, with
//! adjacency decided by the algebraic rank test.

use crate::error::{Error, Result};
use crate::linalg::{dot, lex_cmp, normalized, rank, row_reduce, scale, sub};

pub const MAX_DIMENSION: usize = 8;
const EPS: f64 = 1e-10;

/// Generator description of a polyhedral cone.
#[derive(Debug, Clone, PartialEq)]
pub struct RayBasis {
    pub rays: Vec<Vec<f64>>,
    /// Canonical (reduced row echelon, then normalized) basis of the
    /// lineality space.
    pub lineality: Vec<Vec<f64>>,
}

impl RayBasis {
    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_full(&self, dimension: usize) -> bool {
        self.lineality.len() == dimension
    }

    /// Unit conic generators: rays plus both signs of each lineality vector,
    /// sorted lexicographically.
    pub fn conic_generators(&self) -> Vec<Vec<f64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(scale(l, -1.0));
        }
        out.iter_mut().for_each(|v| clean(v));
        out.sort_by(|a, b| lex_cmp(a, b));
        out
    }
}

fn clean(v: &mut [f64]) {
    for x in v.iter_mut() {
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
}

pub fn extreme_rays(dimension: usize, constraints: &[Vec<f64>]) -> Result<RayBasis> {
    if dimension == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if dimension > MAX_DIMENSION {
        return Err(Error::UnsupportedDimension {
            dimension,
            max: MAX_DIMENSION,
        });
    }
    let mut lineality: Vec<Vec<f64>> = (0..dimension)
        .map(|i| {
            let mut e = vec![0.0; dimension];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let mut processed: Vec<Vec<f64>> = Vec::new();

    for c in constraints {
        if c.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: c.len(),
            });
        }
        let Some(n) = normalized(c) else { continue };

        let pivot = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(&n, l).abs()))
            .filter(|(_, v)| *v > EPS)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i);

        if let Some(i) = pivot {
            let mut p = lineality.remove(i);
            if dot(&n, &p) < 0.0 {
                p = scale(&p, -1.0);
            }
            let np = dot(&n, &p);
            for l in lineality.iter_mut() {
                let f = dot(&n, l) / np;
                *l = sub(l, &scale(&p, f));
            }
            for r in rays.iter_mut() {
                let f = dot(&n, r) / np;
                *r = normalized(&sub(r, &scale(&p, f))).unwrap_or_else(|| r.clone());
            }
            rays.push(normalized(&p).expect("lineality vectors are nonzero"));
            processed.push(n);
            continue;
        }

        let signs: Vec<f64> = rays.iter().map(|r| dot(&n, r)).collect();
        let pointed_dim = dimension - lineality.len();
        let zero_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| dot(h, r).abs() <= EPS)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();

        let mut next: Vec<Vec<f64>> = rays
            .iter()
            .zip(&signs)
            .filter(|(_, s)| **s >= -EPS)
            .map(|(r, _)| r.clone())
            .collect();
        for (i, si) in signs.iter().enumerate().filter(|(_, s)| **s > EPS) {
            for (j, sj) in signs.iter().enumerate().filter(|(_, s)| **s < -EPS) {
                let common: Vec<Vec<f64>> = zero_sets[i]
                    .iter()
                    .filter(|k| zero_sets[j].contains(k))
                    .map(|&k| processed[k].clone())
                    .collect();
                if pointed_dim >= 2 && rank(&common, 1e-9) + 2 < pointed_dim {
                    continue;
                }
                let combo = sub(&scale(&rays[j], *si), &scale(&rays[i], *sj));
                if let Some(r) = normalized(&combo) {
                    next.push(r);
                }
            }
        }
        rays = dedup(next);
        processed.push(n);
    }

    // canonical lineality basis, rays projected onto its orthogonal complement
    let rank_l = row_reduce(&mut lineality, 1e-12);
    lineality.truncate(rank_l);
    let mut basis: Vec<Vec<f64>> = lineality
        .iter()
        .map(|l| normalized(l).expect("reduced rows are nonzero"))
        .collect();
    basis.iter_mut().for_each(|v| clean(v));
    let orthonormal = gram_schmidt(&basis);
    let mut out_rays = Vec::new();
    for r in rays {
        let mut v = r;
        for q in &orthonormal {
            v = sub(&v, &scale(q, dot(&v, q)));
        }
        if let Some(mut u) = normalized(&v) {
            if crate::linalg::norm(&v) > EPS {
                clean(&mut u);
                out_rays.push(u);
            }
        }
    }
    let mut out_rays = dedup(out_rays);
    out_rays.sort_by(|a, b| lex_cmp(a, b));
    Ok(RayBasis {
        rays: out_rays,
        lineality: basis,
    })
}

fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for q in &out {
            w = sub(&w, &scale(q, dot(&w, q)));
        }
        if let Some(u) = normalized(&w) {
            out.push(u);
        }
    }
    out
}

fn dedup(rays: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rays {
        if !out.iter().any(|o| crate::linalg::distance(o, &r) <= 1e-9) {
            out.push(r);
        }
    }
    out
}
