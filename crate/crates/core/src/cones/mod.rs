//! Convex closed cones in `R^m`: polyhedral (generators and halfspaces),
//! circular (`{v : <v, axis> >= delta |v|}`), the full space and `{0}`.
//!
//! The conjugate cone of `C` is `{t : <t, y> >= 0 for all y in C}`.
//! Polyhedral duals are computed by double description, circular duals in
//! closed form (`delta -> sqrt(1 - delta^2)`), and `full` and `zero` swap.

pub mod dd;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, is_finite, lex_cmp, norm, normalized, scale, sub};

pub use dd::MAX_DIMENSION;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;
pub const DEFAULT_SPHERE_DIRECTIONS: usize = 10_000;
const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    dimension: usize,
    generators: Vec<Vec<f64>>,
    halfspaces: Vec<Vec<f64>>,
}

impl PolyhedralCone {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Unit generators (extreme rays, plus both signs of a lineality basis).
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Unit inward normals `n_i` of the halfspaces `<n_i, y> >= 0`.
    pub fn halfspaces(&self) -> &[Vec<f64>] {
        &self.halfspaces
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircularCone {
    dimension: usize,
    axis: Vec<f64>,
    delta: f64,
}

impl CircularCone {
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeDocument", into = "ConeDocument")]
pub enum Cone {
    Polyhedral(PolyhedralCone),
    Circular(CircularCone),
    Full { dimension: usize },
    Zero { dimension: usize },
}

fn unit_vectors(dimension: usize, vectors: &[Vec<f64>], what: &str) -> Result<Vec<Vec<f64>>> {
    vectors
        .iter()
        .map(|v| {
            check_dim(dimension, v.len())?;
            if !is_finite(v) {
                return Err(Error::InvalidInput(format!("non-finite {what} {v:?}")));
            }
            normalized(v).ok_or_else(|| Error::InvalidInput(format!("zero {what}")))
        })
        .collect()
}

fn check_dimension(dimension: usize) -> Result<()> {
    if dimension == 0 {
        Err(Error::InvalidInput("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl Cone {
    /// Conic hull of `generators`. Both descriptions are stored in minimal
    /// form; a hull equal to the whole space becomes `Full`.
    pub fn polyhedral(dimension: usize, generators: &[Vec<f64>]) -> Result<Cone> {
        check_dimension(dimension)?;
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "polyhedral cone needs at least one generator".into(),
            ));
        }
        let gens = unit_vectors(dimension, generators, "generator")?;
        let dual = dd::extreme_rays(dimension, &gens)?;
        if dual.is_zero() {
            return Ok(Cone::Full { dimension });
        }
        Self::from_halfspace_basis(dimension, dual.conic_generators())
    }

    /// `{y : <n_i, y> >= 0}` for the given normals.
    pub fn from_halfspaces(dimension: usize, normals: &[Vec<f64>]) -> Result<Cone> {
        check_dimension(dimension)?;
        let normals = unit_vectors(dimension, normals, "halfspace normal")?;
        if normals.is_empty() {
            return Ok(Cone::Full { dimension });
        }
        let primal = dd::extreme_rays(dimension, &normals)?;
        if primal.is_zero() {
            return Ok(Cone::Zero { dimension });
        }
        // minimal halfspace description: generators of the dual
        let minimal = dd::extreme_rays(dimension, &primal.conic_generators())?;
        if minimal.is_zero() {
            return Ok(Cone::Full { dimension });
        }
        Self::from_halfspace_basis(dimension, minimal.conic_generators())
    }

    fn from_halfspace_basis(dimension: usize, halfspaces: Vec<Vec<f64>>) -> Result<Cone> {
        let primal = dd::extreme_rays(dimension, &halfspaces)?;
        if primal.is_zero() {
            return Ok(Cone::Zero { dimension });
        }
        Ok(Cone::Polyhedral(PolyhedralCone {
            dimension,
            generators: primal.conic_generators(),
            halfspaces,
        }))
    }

    pub fn circular(axis: &[f64], delta: f64) -> Result<Cone> {
        check_dimension(axis.len())?;
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidInput(format!(
                "circular aperture delta = {delta} outside [0, 1]"
            )));
        }
        let axis = unit_vectors(axis.len(), &[axis.to_vec()], "axis")?.remove(0);
        Ok(Cone::Circular(CircularCone {
            dimension: axis.len(),
            axis,
            delta,
        }))
    }

    /// Nonnegative orthant, generated by the standard basis.
    pub fn orthant(dimension: usize) -> Result<Cone> {
        let basis: Vec<Vec<f64>> = (0..dimension)
            .map(|i| {
                let mut e = vec![0.0; dimension];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::polyhedral(dimension, &basis)
    }

    pub fn dimension(&self) -> usize {
        match self {
            Cone::Polyhedral(p) => p.dimension,
            Cone::Circular(c) => c.dimension,
            Cone::Full { dimension } | Cone::Zero { dimension } => *dimension,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Cone::Polyhedral(_) => "polyhedral",
            Cone::Circular(_) => "circular",
            Cone::Full { .. } => "full",
            Cone::Zero { .. } => "zero",
        }
    }

    /// Conjugate cone. Polyhedral: the dual's halfspace normals are this
    /// cone's generators and its generators come from double description.
    pub fn dual(&self) -> Result<Cone> {
        match self {
            Cone::Polyhedral(p) => {
                let rays = dd::extreme_rays(p.dimension, &p.generators)?;
                if rays.is_zero() {
                    return Ok(Cone::Zero {
                        dimension: p.dimension,
                    });
                }
                Ok(Cone::Polyhedral(PolyhedralCone {
                    dimension: p.dimension,
                    generators: rays.conic_generators(),
                    halfspaces: p.generators.clone(),
                }))
            }
            Cone::Circular(c) => Ok(Cone::Circular(CircularCone {
                dimension: c.dimension,
                axis: c.axis.clone(),
                delta: ((1.0 - c.delta) * (1.0 + c.delta)).sqrt(),
            })),
            Cone::Full { dimension } => Ok(Cone::Zero {
                dimension: *dimension,
            }),
            Cone::Zero { dimension } => Ok(Cone::Full {
                dimension: *dimension,
            }),
        }
    }

    pub fn contains(&self, v: &[f64], interior: bool) -> Result<bool> {
        self.contains_with_tol(v, interior, DEFAULT_MEMBERSHIP_TOL)
    }

    /// Membership with relative tolerance `tol`. Boundary membership accepts
    /// `<n_i, v> >= -tol |v|`; interior requires `<n_i, v> > tol |v|`.
    /// The origin is a member of every cone and interior only to `Full`.
    pub fn contains_with_tol(&self, v: &[f64], interior: bool, tol: f64) -> Result<bool> {
        check_dim(self.dimension(), v.len())?;
        let len = norm(v);
        if len == 0.0 {
            return Ok(!interior || matches!(self, Cone::Full { .. }));
        }
        Ok(match self {
            Cone::Full { .. } => true,
            Cone::Zero { .. } => !interior && len <= tol,
            Cone::Polyhedral(p) => p.halfspaces.iter().all(|n| {
                let s = dot(n, v);
                if interior {
                    s > tol * len
                } else {
                    s >= -tol * len
                }
            }),
            Cone::Circular(c) => {
                let s = dot(&c.axis, v);
                if interior {
                    s > (c.delta + tol) * len
                } else {
                    s >= (c.delta - tol) * len
                }
            }
        })
    }

    /// `inner ⊂⊂ outer` with the default sphere sampling density.
    pub fn compactly_included(inner: &Cone, outer: &Cone) -> Result<bool> {
        Self::compactly_included_with(inner, outer, DEFAULT_SPHERE_DIRECTIONS)
    }

    /// True iff every unit vector of `inner` lies in the interior of `outer`.
    /// Exact for polyhedral `inner` (unit generators suffice); for circular
    /// `inner` the boundary circle is sampled with `directions` points, plus
    /// the axis.
    pub fn compactly_included_with(inner: &Cone, outer: &Cone, directions: usize) -> Result<bool> {
        check_dim(inner.dimension(), outer.dimension())?;
        let probes: Vec<Vec<f64>> = match inner {
            Cone::Zero { .. } => {
                return Err(Error::Precondition(
                    "compact inclusion needs a nonzero inner cone".into(),
                ))
            }
            Cone::Full { .. } => return Ok(matches!(outer, Cone::Full { .. })),
            Cone::Polyhedral(p) => p.generators.clone(),
            Cone::Circular(c) => {
                let mut probes = c.boundary_directions(directions);
                probes.push(c.axis.clone());
                probes
            }
        };
        for v in &probes {
            if !outer.contains(v, true)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A unit vector in the interior, when the interior is nonempty.
    pub fn interior_direction(&self) -> Option<Vec<f64>> {
        let candidate = match self {
            Cone::Zero { .. } => return None,
            Cone::Full { dimension } => {
                let mut e = vec![0.0; *dimension];
                e[0] = 1.0;
                return Some(e);
            }
            Cone::Circular(c) => c.axis.clone(),
            Cone::Polyhedral(p) => {
                let mut s = vec![0.0; p.dimension];
                for g in &p.generators {
                    for (a, b) in s.iter_mut().zip(g) {
                        *a += b;
                    }
                }
                normalized(&s)?
            }
        };
        match self.contains(&candidate, true) {
            Ok(true) => Some(candidate),
            _ => None,
        }
    }

    pub fn generators(&self) -> Option<&[Vec<f64>]> {
        match self {
            Cone::Polyhedral(p) => Some(&p.generators),
            _ => None,
        }
    }

    /// Generator sets equal up to permutation within `gen_tol`, circular
    /// parameters within `delta_tol`.
    pub fn approx_eq(&self, other: &Cone, gen_tol: f64, delta_tol: f64) -> bool {
        match (self, other) {
            (Cone::Polyhedral(a), Cone::Polyhedral(b)) => {
                a.dimension == b.dimension
                    && same_vector_set(&a.generators, &b.generators, gen_tol)
            }
            (Cone::Circular(a), Cone::Circular(b)) => {
                a.dimension == b.dimension
                    && (a.delta - b.delta).abs() <= delta_tol
                    && crate::linalg::distance(&a.axis, &b.axis) <= gen_tol
            }
            (Cone::Full { dimension: a }, Cone::Full { dimension: b })
            | (Cone::Zero { dimension: a }, Cone::Zero { dimension: b }) => a == b,
            _ => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cone serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl CircularCone {
    /// Unit directions on the boundary `<v, axis> = delta |v|`.
    fn boundary_directions(&self, count: usize) -> Vec<Vec<f64>> {
        let m = self.dimension;
        let (c, s) = (self.delta, ((1.0 - self.delta) * (1.0 + self.delta)).sqrt());
        if m == 1 {
            return vec![self.axis.clone()];
        }
        let complement = orthonormal_complement(&self.axis);
        let tangent = |w: &[f64]| -> Vec<f64> {
            let mut v = scale(&self.axis, c);
            for (k, q) in complement.iter().enumerate() {
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi += s * w[k] * qi;
                }
            }
            v
        };
        match m {
            2 => vec![tangent(&[1.0]), tangent(&[-1.0])],
            3 => (0..count.max(4))
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / count.max(4) as f64;
                    tangent(&[t.cos(), t.sin()])
                })
                .collect(),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                (0..count.max(2 * m))
                    .map(|_| loop {
                        let w: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let n = norm(&w);
                        if n > 1e-3 && n <= 1.0 {
                            break tangent(&scale(&w, 1.0 / n));
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Orthonormal basis of the complement of the unit vector `u`.
pub(crate) fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let m = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        for q in &basis {
            e = sub(&e, &scale(q, dot(&e, q)));
        }
        if norm(&e) > 1e-8 {
            basis.push(normalized(&e).expect("nonzero"));
        }
        if basis.len() == m {
            break;
        }
    }
    basis.remove(0);
    basis
}

fn same_vector_set(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .all(|x| b.iter().any(|y| crate::linalg::distance(x, y) <= tol))
        && b
            .iter()
            .all(|y| a.iter().any(|x| crate::linalg::distance(x, y) <= tol))
}

/// `H_S(mu) = max_{s in S} <s, mu>`.
pub fn support_function(points: &[Vec<f64>], mu: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = f64::NEG_INFINITY;
    for p in points {
        check_dim(mu.len(), p.len())?;
        best = best.max(dot(p, mu));
    }
    Ok(best)
}

#[derive(Serialize, Deserialize)]
struct ConeDocument {
    dimension: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
}

impl TryFrom<ConeDocument> for Cone {
    type Error = Error;

    fn try_from(doc: ConeDocument) -> Result<Cone> {
        let m = doc.dimension;
        check_dimension(m)?;
        match doc.kind.as_str() {
            "full" => Ok(Cone::Full { dimension: m }),
            "zero" => Ok(Cone::Zero { dimension: m }),
            "circular" => {
                let axis = doc
                    .axis
                    .ok_or_else(|| Error::InvalidInput("circular cone needs an axis".into()))?;
                check_dim(m, axis.len())?;
                let delta = doc
                    .delta
                    .ok_or_else(|| Error::InvalidInput("circular cone needs delta".into()))?;
                Cone::circular(&axis, delta)
            }
            "polyhedral" => match (doc.generators, doc.halfspaces) {
                (Some(gens), halfspaces) => {
                    if let Some(hs) = halfspaces {
                        let gens_u = unit_vectors(m, &gens, "generator")?;
                        let hs_u = unit_vectors(m, &hs, "halfspace normal")?;
                        for g in &gens_u {
                            if let Some(n) = hs_u.iter().find(|n| dot(n, g) < -CONSISTENCY_TOL) {
                                return Err(Error::InvalidInput(format!(
                                    "generator {g:?} violates halfspace {n:?}"
                                )));
                            }
                        }
                    }
                    Cone::polyhedral(m, &gens)
                }
                (None, Some(hs)) => Cone::from_halfspaces(m, &hs),
                (None, None) => Err(Error::InvalidInput(
                    "polyhedral cone needs generators or halfspaces".into(),
                )),
            },
            other => Err(Error::InvalidInput(format!("unknown cone kind {other:?}"))),
        }
    }
}

impl From<Cone> for ConeDocument {
    fn from(cone: Cone) -> Self {
        let mut doc = ConeDocument {
            dimension: cone.dimension(),
            kind: cone.kind().to_string(),
            generators: None,
            halfspaces: None,
            axis: None,
            delta: None,
        };
        match cone {
            Cone::Polyhedral(p) => {
                doc.generators = Some(p.generators);
                doc.halfspaces = Some(p.halfspaces);
            }
            Cone::Circular(c) => {
                doc.axis = Some(c.axis);
                doc.delta = Some(c.delta);
            }
            Cone::Full { .. } | Cone::Zero { .. } => {}
        }
        doc
    }
}

/// Sorts vectors lexicographically (used to compare generator lists).
pub fn sorted_vectors(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| lex_cmp(a, b));
    v
}
