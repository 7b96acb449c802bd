//! Seeded random instances for the verification suite.
//!
//! Every generator draws from a caller-supplied ChaCha stream, so an
//! instance is a pure function of `(seed, family, index)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::f64::consts::{FRAC_PI_4, TAU};

use crate::cones::{orthonormal_complement, Cone};
use crate::error::Result;
use crate::expsum::{ExponentialSum, Term};
use crate::linalg::{add, dot, norm, normalized, scale, solve};
use crate::meanvalue::LinearMap;

/// Independent stream for one instance of one check family.
pub fn instance_rng(seed: u64, family: &str, index: usize) -> ChaCha8Rng {
    let hash = Sha256::digest(format!("{seed}:{family}:{index}").as_bytes());
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&hash);
    ChaCha8Rng::from_seed(bytes)
}

pub fn random_unit(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return scale(&v, 1.0 / n);
        }
    }
}

pub fn random_coefficient(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..TAU))
}

/// Pointed, full-dimensional cone: polyhedral with `m` to `m + 2` generators
/// around a random axis, or (for `m >= 2`, one time in four) circular.
pub fn random_cone(rng: &mut impl Rng, m: usize) -> Result<Cone> {
    if m == 1 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        return Cone::polyhedral(1, &[vec![sign]]);
    }
    loop {
        let axis = random_unit(rng, m);
        let cone = if rng.gen_bool(0.25) {
            Cone::circular(&axis, rng.gen_range(0.2..0.9))?
        } else {
            let count = rng.gen_range(m..=m + 2);
            let generators: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    let w = random_unit(rng, m);
                    let s = rng.gen_range(0.3..1.2);
                    add(&axis, &scale(&w, s))
                })
                .collect();
            Cone::polyhedral(m, &generators)?
        };
        let pointed = cone.dual()?.interior_direction().is_some();
        if cone.interior_direction().is_some() && pointed {
            return Ok(cone);
        }
    }
}

/// A unit vector of `cone` (which must have nonempty interior or be a ray).
pub fn random_direction_in(rng: &mut impl Rng, cone: &Cone) -> Vec<f64> {
    let m = cone.dimension();
    match cone {
        Cone::Polyhedral(p) => {
            let mut v = vec![0.0; m];
            for g in p.generators() {
                v = add(&v, &scale(g, rng.gen_range(0.05..1.0)));
            }
            normalized(&v).unwrap_or_else(|| p.generators()[0].clone())
        }
        Cone::Circular(c) => {
            if m == 1 {
                return c.axis().to_vec();
            }
            let theta = rng.gen_range(0.0..c.delta().acos());
            let basis = orthonormal_complement(c.axis());
            let w = random_unit(rng, m - 1);
            let mut v = scale(c.axis(), theta.cos());
            for (k, q) in basis.iter().enumerate() {
                v = add(&v, &scale(q, theta.sin() * w[k]));
            }
            v
        }
        Cone::Full { .. } => random_unit(rng, m),
        Cone::Zero { .. } => vec![0.0; m],
    }
}

/// Sum of `terms` terms with frequencies in `cone`, norms in `[0.2, max_norm]`;
/// with `constant` the first term sits at the origin.
pub fn random_sum_in_cone(
    rng: &mut impl Rng,
    cone: &Cone,
    terms: usize,
    max_norm: f64,
    constant: bool,
) -> Result<ExponentialSum> {
    let m = cone.dimension();
    let mut out = Vec::with_capacity(terms);
    for k in 0..terms {
        let lambda = if constant && k == 0 {
            vec![0.0; m]
        } else {
            let r = rng.gen_range(0.2..max_norm);
            scale(&random_direction_in(rng, cone), r)
        };
        out.push(Term::new(lambda, random_coefficient(rng)));
    }
    ExponentialSum::new(m, out)
}

/// Sum with frequencies uniform in `[-bound, bound]^m`.
pub fn random_sum_in_box(rng: &mut impl Rng, m: usize, terms: usize, bound: f64) -> Result<ExponentialSum> {
    let out = (0..terms)
        .map(|_| {
            let lambda = (0..m).map(|_| rng.gen_range(-bound..bound)).collect();
            Term::new(lambda, random_coefficient(rng))
        })
        .collect();
    ExponentialSum::new(m, out)
}

/// Instance for the off-spectrum check: a sum with spectrum in `gamma_hat`,
/// a map `A` with columns interior to the dual, and a probe `lambda` such
/// that every `|<A e_j, lambda_n - lambda>|` lies in `[0.06, 0.15]` and every
/// coefficient has argument within `pi/4`. These keep the mean at `N = 10`
/// away from zero and force a decay by more than ten at `N = 1000`.
pub struct OffspectrumInstance {
    pub gamma_hat: Cone,
    pub sum: ExponentialSum,
    pub map: LinearMap,
    pub probe: Vec<f64>,
}

pub fn offspectrum_instance(rng: &mut impl Rng, m: usize, terms: usize) -> Result<OffspectrumInstance> {
    loop {
        let gamma_hat = random_cone(rng, m)?;
        let dual = gamma_hat.dual()?;
        let centre = dual.interior_direction().expect("random cones are pointed");
        let columns: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let w = random_unit(rng, m);
                normalized(&add(&centre, &scale(&w, 0.3))).expect("nonzero")
            })
            .collect();
        if columns
            .iter()
            .any(|c| !dual.contains(c, true).unwrap_or(false))
        {
            continue;
        }
        let map = LinearMap::from_columns(&columns)?;
        if map.determinant().abs() < 0.05 {
            continue;
        }
        let offsets: Vec<Vec<f64>> = (0..terms)
            .map(|_| {
                let c: Vec<f64> = (0..m)
                    .map(|_| {
                        let v = rng.gen_range(0.06..0.15);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                solve(&columns, &c, 1e-12).expect("map is invertible")
            })
            .collect();
        let direction = gamma_hat.interior_direction().expect("random cones are solid");
        let mut radius = 1.0;
        let probe = loop {
            let probe = scale(&direction, radius);
            let inside = offsets
                .iter()
                .all(|o| gamma_hat.contains(&add(&probe, o), false).unwrap_or(false));
            if inside || radius > 1e6 {
                break probe;
            }
            radius *= 2.0;
        };
        let sum_terms: Vec<Term> = offsets
            .iter()
            .map(|o| {
                let coeff = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(-FRAC_PI_4..FRAC_PI_4));
                Term::new(add(&probe, o), coeff)
            })
            .collect();
        let sum = ExponentialSum::new(m, sum_terms)?;
        if sum.len() != terms || sum.terms().iter().any(|t| !gamma_hat.contains(&t.lambda, false).unwrap_or(false)) {
            continue;
        }
        return Ok(OffspectrumInstance {
            gamma_hat,
            sum,
            map,
            probe,
        });
    }
}

/// Indicator instance: `y` of norm in `[0.5, 1.5]` with the values
/// `<y, lambda_n>` pairwise at least `gap` apart.
pub fn indicator_instance(rng: &mut impl Rng, m: usize, terms: usize, gap: f64) -> Result<(ExponentialSum, Vec<f64>)> {
    loop {
        let sum = random_sum_in_box(rng, m, terms, 3.0)?;
        let y = scale(&random_unit(rng, m), rng.gen_range(0.5..1.5));
        let mut values: Vec<f64> = sum.terms().iter().map(|t| dot(&y, &t.lambda)).collect();
        values.sort_by(f64::total_cmp);
        if sum.len() == terms && values.windows(2).all(|w| w[1] - w[0] >= gap) {
            return Ok((sum, y));
        }
    }
}

/// One-dimensional sum `sum_n a_n e^{i r_n beta x}` with distinct integer
/// `r_n in [-3, 3]`; returns the sum and `beta`.
pub fn commensurable_sum(rng: &mut impl Rng, terms: usize) -> Result<(ExponentialSum, f64)> {
    let beta = rng.gen_range(0.3..1.5);
    let mut coords: Vec<i64> = (-3..=3).collect();
    let mut chosen = Vec::new();
    for _ in 0..terms.min(coords.len()) {
        let k = rng.gen_range(0..coords.len());
        chosen.push(coords.swap_remove(k));
    }
    let out = chosen
        .iter()
        .map(|&r| Term::new(vec![r as f64 * beta], random_coefficient(rng)))
        .collect();
    Ok((ExponentialSum::new(1, out)?, beta))
}
