//! Seeded batch runs of every check family.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::instances::{
    commensurable_sum, indicator_instance, instance_rng, offspectrum_instance, random_cone, random_direction_in,
    random_sum_in_box, random_sum_in_cone,
};
use super::report::{instance_digest, VerificationReport};
use super::{
    verify_convexity, verify_extension_limit, verify_fejer_convergence, verify_indicator_equality,
    verify_max_modulus, verify_offspectrum_vanishing, verify_smoothing_identity, Ray, DEFAULT_GRID_SLACK,
};
use crate::cones::{Cone, MAX_DIMENSION};
use crate::error::{Error, Result};
use crate::expsum::{ExponentialSum, TubePoint};
use crate::indicator::geometric_radii;
use crate::linalg::{add, dot, scale};
use crate::meanvalue::check_admissible;
use crate::metrics::{SamplingSpec, TubeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckFamily {
    MaxModulus,
    Convexity,
    ExtensionLimit,
    OffspectrumVanishing,
    IndicatorEquality,
    SmoothingIdentity,
    FejerConvergence,
}

impl CheckFamily {
    pub const ALL: [CheckFamily; 7] = [
        CheckFamily::MaxModulus,
        CheckFamily::Convexity,
        CheckFamily::ExtensionLimit,
        CheckFamily::OffspectrumVanishing,
        CheckFamily::IndicatorEquality,
        CheckFamily::SmoothingIdentity,
        CheckFamily::FejerConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckFamily::MaxModulus => "max_modulus",
            CheckFamily::Convexity => "convexity",
            CheckFamily::ExtensionLimit => "extension_limit",
            CheckFamily::OffspectrumVanishing => "offspectrum_vanishing",
            CheckFamily::IndicatorEquality => "indicator_equality",
            CheckFamily::SmoothingIdentity => "smoothing_identity",
            CheckFamily::FejerConvergence => "fejer_convergence",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Instances per check family.
    pub instances: usize,
    pub dimensions: Vec<usize>,
    pub max_terms: usize,
    pub checks: Vec<CheckFamily>,
    /// Run every other max-modulus and extension instance on a shifted
    /// dual cone.
    pub shifted: bool,
    /// x-grid points per axis, indexed by dimension - 1; defaults apply
    /// beyond the list.
    pub grid: Vec<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 3,
            dimensions: vec![1, 2],
            max_terms: 4,
            checks: CheckFamily::ALL.to_vec(),
            shifted: true,
            grid: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() {
            return Err(Error::InvalidInput("suite needs at least one dimension".into()));
        }
        if let Some(&m) = self.dimensions.iter().find(|&&m| m == 0 || m > MAX_DIMENSION) {
            return Err(Error::InvalidInput(format!("unsupported suite dimension {m}")));
        }
        if self.max_terms == 0 || self.max_terms > 8 {
            return Err(Error::InvalidInput("max_terms must lie in 1..=8".into()));
        }
        if self.grid.iter().any(|&p| p < 2) {
            return Err(Error::InvalidInput("grid sizes must be at least 2".into()));
        }
        Ok(())
    }

    fn points(&self, m: usize) -> usize {
        self.grid.get(m - 1).copied().unwrap_or(match m {
            1 => 512,
            2 => 48,
            3 => 12,
            _ => 6,
        })
    }
}

/// Runs every configured family on `instances` seeded instances each.
/// Reports come back grouped by family in the configured order, then by
/// instance index, independent of thread scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let jobs: Vec<(CheckFamily, usize)> = config
        .checks
        .iter()
        .flat_map(|&f| (0..config.instances).map(move |i| (f, i)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(family, index)| run_instance(config, family, index))
        .collect())
}

/// One instance of one family; generator or check errors become failing
/// reports so that a batch always completes.
pub fn run_instance(config: &SuiteConfig, family: CheckFamily, index: usize) -> VerificationReport {
    let m = config.dimensions[index % config.dimensions.len()];
    let params = format!("seed={};family={};index={index};m={m}", config.seed, family.name());
    match generate_and_check(config, family, index, m) {
        Ok((report, instance)) => report.with_digest(instance_digest(&params, &instance)),
        Err(e) => {
            let mut report = VerificationReport::judged(family.name(), f64::INFINITY, 0.0);
            report.reason = Some(e.to_string());
            report.with_digest(instance_digest(&params, ""))
        }
    }
}

fn terms(rng: &mut impl Rng, config: &SuiteConfig) -> usize {
    rng.gen_range(1..=config.max_terms)
}

fn generate_and_check(
    config: &SuiteConfig,
    family: CheckFamily,
    index: usize,
    m: usize,
) -> Result<(VerificationReport, String)> {
    let mut rng = instance_rng(config.seed, family.name(), index);
    let points = config.points(m);
    let shifted = config.shifted && index % 2 == 1;
    match family {
        CheckFamily::MaxModulus => {
            let gamma = random_cone(&mut rng, m)?;
            let n = terms(&mut rng, config);
            let sum = {
                let constant = rng.gen_bool(0.3);
                random_sum_in_cone(&mut rng, &gamma, n, 3.0, constant)?
            };
            let dual = gamma.dual()?;
            let shift = if shifted {
                scale(&random_direction_in(&mut rng, &dual), rng.gen_range(0.1..1.0))
            } else {
                vec![0.0; m]
            };
            let mut ys = vec![shift.clone()];
            for _ in 0..3 {
                let y = scale(&random_direction_in(&mut rng, &dual), rng.gen_range(0.0..2.0));
                ys.push(add(&shift, &y));
            }
            let base = if shifted {
                TubeBase::ShiftedCone { cone: dual, shift }
            } else {
                TubeBase::Cone(dual)
            };
            let spec = SamplingSpec::new(4.0 * TAU, points, ys, rng.gen())?;
            let report = verify_max_modulus(&sum, &gamma, &base, &spec, DEFAULT_GRID_SLACK)?;
            Ok((report, instance_json(&sum, Some(&gamma))))
        }
        CheckFamily::Convexity => {
            let gamma = random_cone(&mut rng, m)?;
            let n = terms(&mut rng, config);
            let sum = {
                let constant = rng.gen_bool(0.3);
                random_sum_in_cone(&mut rng, &gamma, n, 3.0, constant)?
            };
            let spec = SamplingSpec::new(4.0 * TAU, points, vec![vec![0.0; m]], rng.gen())?;
            let report = if index % 2 == 0 {
                let dual = gamma.dual()?;
                let y1 = scale(&random_direction_in(&mut rng, &dual), rng.gen_range(0.5..3.0));
                verify_convexity(&sum, &vec![0.0; m], &y1, 11, &spec, Some(&gamma), DEFAULT_GRID_SLACK)?
            } else {
                let y0 = scale(&super::instances::random_unit(&mut rng, m), rng.gen_range(0.0..1.5));
                let y1 = scale(&super::instances::random_unit(&mut rng, m), rng.gen_range(0.0..1.5));
                verify_convexity(&sum, &y0, &y1, 11, &spec, None, DEFAULT_GRID_SLACK)?
            };
            Ok((report, instance_json(&sum, Some(&gamma))))
        }
        CheckFamily::ExtensionLimit => {
            let gamma = random_cone(&mut rng, m)?;
            let n = terms(&mut rng, config);
            let sum = {
                let constant = rng.gen_bool(0.5);
                random_sum_in_cone(&mut rng, &gamma, n, 3.0, constant)?
            };
            let dual = gamma.dual()?;
            let gamma_prime = compact_subcone(&dual)?;
            let shift = shifted.then(|| scale(&random_direction_in(&mut rng, &dual), rng.gen_range(0.1..1.0)));
            let rays: Vec<Ray> = (0..10)
                .map(|_| {
                    let u = random_direction_in(&mut rng, &gamma_prime);
                    let times = decay_schedule(&sum, &u, 16);
                    Ray { direction: u, times }
                })
                .collect();
            let base = match shift {
                Some(shift) => TubeBase::ShiftedCone { cone: dual, shift },
                None => TubeBase::Cone(dual),
            };
            let spec = SamplingSpec::new(4.0 * TAU, (points / 4).max(4), vec![vec![0.0; m]], rng.gen())?;
            let report = verify_extension_limit(&sum, &gamma, &gamma_prime, &base, &rays, &spec)?;
            Ok((report, instance_json(&sum, Some(&gamma))))
        }
        CheckFamily::OffspectrumVanishing => {
            let n = terms(&mut rng, config);
            let inst = offspectrum_instance(&mut rng, m, n)?;
            let report = verify_offspectrum_vanishing(
                &inst.sum,
                &inst.gamma_hat,
                std::slice::from_ref(&inst.probe),
                &inst.map,
                &[10.0, 100.0, 1000.0],
            )?;
            Ok((report, instance_json(&inst.sum, Some(&inst.gamma_hat))))
        }
        CheckFamily::IndicatorEquality => {
            let n = rng.gen_range(1..=config.max_terms.min(6));
            let (sum, y) = indicator_instance(&mut rng, m, n, 0.1)?;
            let radii = geometric_radii(1.0, 1e3, 40)?;
            let spec = SamplingSpec::new(TAU, 6, vec![vec![0.0; m]], rng.gen())?;
            let report = verify_indicator_equality(&sum, &[y], &radii, &spec)?;
            Ok((report, instance_json(&sum, None)))
        }
        CheckFamily::SmoothingIdentity => {
            let n = terms(&mut rng, config);
            let sum = random_sum_in_box(&mut rng, m, n, 3.0)?;
            let width = loop {
                let w = rng.gen_range(0.5..2.0);
                if check_admissible(&sum, w).is_ok() {
                    break w;
                }
            };
            let zs: Vec<TubePoint> = (0..20)
                .map(|_| TubePoint {
                    x: (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect(),
                    y: (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect(),
                })
                .collect();
            let report = verify_smoothing_identity(&sum, width, &zs)?;
            Ok((report, instance_json(&sum, None)))
        }
        CheckFamily::FejerConvergence => {
            let n = terms(&mut rng, config);
            let (sum, beta) = commensurable_sum(&mut rng, n)?;
            let spec = SamplingSpec::new(TAU / beta, 1000, vec![vec![0.0]], rng.gen())?;
            let report = verify_fejer_convergence(&sum, &[4, 16, 64, 256], &spec)?;
            Ok((report, instance_json(&sum, None)))
        }
    }
}

/// Circular cone around an interior direction of `outer`, narrowed until
/// it is compactly included; the half-line itself when `m = 1`.
fn compact_subcone(outer: &Cone) -> Result<Cone> {
    let axis = outer
        .interior_direction()
        .ok_or_else(|| Error::Precondition("dual cone has empty interior".into()))?;
    if axis.len() == 1 {
        return Cone::polyhedral(1, &[axis]);
    }
    let mut delta: f64 = 0.95;
    loop {
        let candidate = Cone::circular(&axis, delta)?;
        if Cone::compactly_included(&candidate, outer)? {
            return Ok(candidate);
        }
        if delta > 0.999_999 {
            return Err(Error::Precondition("no compactly included subcone found".into()));
        }
        delta = 0.5 * (1.0 + delta);
    }
}

/// Times `0..t_end` with the majorant of the nonconstant part below
/// `1e-7` at `t_end`.
fn decay_schedule(sum: &ExponentialSum, u: &[f64], count: usize) -> Vec<f64> {
    let slowest = sum
        .terms()
        .iter()
        .filter(|t| t.lambda.iter().any(|l| *l != 0.0))
        .map(|t| dot(u, &t.lambda))
        .fold(f64::INFINITY, f64::min);
    let mass = sum.coefficient_l1().max(1.0);
    let t_end = if slowest.is_finite() && slowest > 0.0 {
        (mass / 1e-7).ln() / slowest
    } else {
        1.0
    };
    (0..count).map(|k| t_end * k as f64 / (count - 1) as f64).collect()
}

fn instance_json(sum: &ExponentialSum, cone: Option<&Cone>) -> String {
    match cone {
        Some(c) => format!("{}\n{}", sum.to_json(), c.to_json()),
        None => sum.to_json(),
    }
}
