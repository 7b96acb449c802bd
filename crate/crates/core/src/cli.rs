//! Command-line front end.
//!
//! Exit codes: 0 when every check passes (or nothing was checked), 1 when a
//! violation was found, 2 for usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::cones::Cone;
use crate::expsum::{ExponentialSum, TubePoint};
use crate::fejer::{bochner_fejer_sum, FejerOrder};
use crate::indicator::{coefficient_bound_check, geometric_radii, p_indicator_estimate, DEFAULT_GRID_SLACK};
use crate::meanvalue::{box_smooth, cube_mean_coefficient, midpoint_error_bound, LinearMap, MeanSpec, Quadrature};
use crate::metrics::{find_almost_periods, SamplingSpec, TubeBase};
use crate::verify::{
    instance_digest, run_suite, verify_convexity, verify_extension_limit, verify_fejer_convergence,
    verify_indicator_equality, verify_max_modulus, verify_offspectrum_vanishing, verify_smoothing_identity, Ray,
    SuiteConfig, VerificationReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tubeap", version, about = "Exponential sums on tube domains over convex cones")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Tolerance or slack, where the command has one.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// x-grid points per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a sum at one point x + iy.
    Eval {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Conjugate cone.
    Dual {
        #[arg(long)]
        cone: PathBuf,
    },
    /// Bochner-Fejér sum of order q (`inf` for the undamped sum).
    Fejer {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        q: String,
    },
    /// Cube-mean Fourier coefficient.
    Mean {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Cube half-width N.
        #[arg(long)]
        n: f64,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        height: Option<String>,
        /// Midpoint points per axis; closed form when absent.
        #[arg(long)]
        sampled: Option<usize>,
    },
    /// Box smoothing with width N.
    Smooth {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        width: f64,
    },
    /// Epsilon-almost periods on a grid.
    AlmostPeriods {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        window: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Base cone of the tube; a single point `--y` otherwise.
        #[arg(long)]
        cone: Option<PathBuf>,
        /// Heights sampled for the distances (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        y: Vec<String>,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        extent: f64,
    },
    /// Growth indicator along a direction.
    Indicator {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        radii: usize,
    },
    /// Run one check on one instance.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Seeded batch of every check family.
    Suite {
        /// JSON suite configuration; defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        instances: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum Check {
    MaxModulus {
        #[arg(long)]
        sum: PathBuf,
        /// Cone containing the spectrum.
        #[arg(long)]
        cone: PathBuf,
        /// Heights in the dual cone (repeatable).
        #[arg(long, allow_hyphen_values = true, required = true)]
        y: Vec<String>,
        /// Shift b of the base: the tube over dual + b.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long, default_value_t = 4.0 * std::f64::consts::TAU)]
        extent: f64,
    },
    Convexity {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y0: String,
        #[arg(long, allow_hyphen_values = true)]
        y1: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        /// Cone containing the spectrum, enabling the decrease check.
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long, default_value_t = 4.0 * std::f64::consts::TAU)]
        extent: f64,
    },
    ExtensionLimit {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        cone_prime: PathBuf,
        /// Ray directions (repeatable).
        #[arg(long, allow_hyphen_values = true, required = true)]
        direction: Vec<String>,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 16)]
        times: usize,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long, default_value_t = 4.0 * std::f64::consts::TAU)]
        extent: f64,
    },
    Offspectrum {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        /// Probe frequencies (repeatable).
        #[arg(long, allow_hyphen_values = true, required = true)]
        probe: Vec<String>,
        /// Matrix rows separated by `;`; identity when absent.
        #[arg(long, allow_hyphen_values = true)]
        map: Option<String>,
        #[arg(long, default_value = "10,100,1000")]
        schedule: String,
    },
    Indicator {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true, required = true)]
        y: Vec<String>,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        radii: usize,
    },
    Smoothing {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long)]
        width: f64,
        /// Sample points as `x1,..,xm:y1,..,ym` (repeatable).
        #[arg(long, allow_hyphen_values = true, required = true)]
        z: Vec<String>,
    },
    Fejer {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, default_value = "4,16,64,256")]
        orders: String,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        extent: f64,
    },
    CoefficientBound {
        #[arg(long)]
        sum: PathBuf,
        #[arg(long, allow_hyphen_values = true, required = true)]
        y: Vec<String>,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        extent: f64,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => match emit(&cli.global, &outcome) {
            Ok(()) if outcome.violation => EXIT_VIOLATION,
            Ok(()) => EXIT_PASS,
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

struct Outcome {
    json: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    violation: bool,
}

impl Outcome {
    fn new<T: Serialize>(value: &T, header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<Self> {
        Ok(Self {
            json: serde_json::to_string_pretty(value)?,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            violation: false,
        })
    }

    fn reports(reports: Vec<VerificationReport>) -> anyhow::Result<Self> {
        let violation = reports.iter().any(VerificationReport::failed);
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    r.check.clone(),
                    serde_json::to_value(r.status)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    r.reason.clone().unwrap_or_default(),
                    num(r.max_violation),
                    num(r.tolerance),
                    r.instance_digest.clone(),
                    r.grid_provenance.clone(),
                ]
            })
            .collect();
        let mut out = Self::new(
            &reports,
            &[
                "check",
                "status",
                "reason",
                "max_violation",
                "tolerance",
                "instance_digest",
                "grid_provenance",
            ],
            rows,
        )?;
        out.violation = violation;
        Ok(out)
    }
}

/// 17 significant digits, independent of locale.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sum_rows(sum: &ExponentialSum) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = (0..sum.dimension()).map(|j| format!("lambda_{j}")).collect();
    header.push("re".into());
    header.push("im".into());
    let rows = sum
        .terms()
        .iter()
        .map(|t| {
            let mut row: Vec<String> = t.lambda.iter().map(|v| num(*v)).collect();
            row.push(num(t.coeff.re));
            row.push(num(t.coeff.im));
            row
        })
        .collect();
    (header, rows)
}

fn sum_outcome(sum: &ExponentialSum) -> Outcome {
    let (header, rows) = sum_rows(sum);
    Outcome {
        json: sum.to_json(),
        header,
        rows,
        violation: false,
    }
}

fn cone_outcome(cone: &Cone) -> Outcome {
    let m = cone.dimension();
    let mut header = vec!["kind".to_string(), "role".to_string()];
    header.extend((0..m).map(|j| format!("v_{j}")));
    header.push("delta".into());
    let mut rows = Vec::new();
    match cone {
        Cone::Polyhedral(p) => {
            for (role, list) in [("generator", p.generators()), ("halfspace", p.halfspaces())] {
                for v in list {
                    let mut row = vec![cone.kind().to_string(), role.to_string()];
                    row.extend(v.iter().map(|x| num(*x)));
                    row.push(String::new());
                    rows.push(row);
                }
            }
        }
        Cone::Circular(c) => {
            let mut row = vec![cone.kind().to_string(), "axis".to_string()];
            row.extend(c.axis().iter().map(|x| num(*x)));
            row.push(num(c.delta()));
            rows.push(row);
        }
        _ => {
            let mut row = vec![cone.kind().to_string(), String::new()];
            row.extend((0..m).map(|_| String::new()));
            row.push(String::new());
            rows.push(row);
        }
    }
    Outcome {
        json: cone.to_json(),
        header,
        rows,
        violation: false,
    }
}

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
    modulus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_bound: Option<f64>,
}

fn complex_outcome(v: Complex64, error_bound: Option<f64>) -> anyhow::Result<Outcome> {
    let value = ComplexValue {
        re: v.re,
        im: v.im,
        modulus: v.norm(),
        error_bound,
    };
    let mut row = vec![num(v.re), num(v.im), num(v.norm())];
    row.push(error_bound.map(num).unwrap_or_default());
    Outcome::new(&value, &["re", "im", "modulus", "error_bound"], vec![row])
}

fn emit(global: &GlobalArgs, outcome: &Outcome) -> anyhow::Result<()> {
    let text = match global.format {
        Format::Json => format!("{}\n", outcome.json),
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(&outcome.header)?;
            for row in &outcome.rows {
                writer.write_record(row)?;
            }
            String::from_utf8(writer.into_inner().map_err(|e| anyhow!("{e}"))?)?
        }
    };
    match &global.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_sum(path: &Path) -> anyhow::Result<ExponentialSum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExponentialSum::from_json(&text).with_context(|| format!("parsing sum {}", path.display()))
}

fn read_cone(path: &Path) -> anyhow::Result<Cone> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Cone::from_json(&text).with_context(|| format!("parsing cone {}", path.display()))
}

fn parse_vector(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?} in {text:?}"))
        })
        .collect()
}

fn parse_vectors(items: &[String]) -> anyhow::Result<Vec<Vec<f64>>> {
    items.iter().map(|s| parse_vector(s)).collect()
}

fn sized(v: Vec<f64>, m: usize, what: &str) -> anyhow::Result<Vec<f64>> {
    if v.len() != m {
        bail!("{what} has {} components, expected {m}", v.len());
    }
    Ok(v)
}

fn tolerance(global: &GlobalArgs, default: f64) -> anyhow::Result<f64> {
    let tol = global.tol.unwrap_or(default);
    if !(tol > 0.0) {
        bail!("--tol must be positive");
    }
    Ok(tol)
}

fn spec(global: &GlobalArgs, m: usize, extent: f64, ys: Vec<Vec<f64>>) -> anyhow::Result<SamplingSpec> {
    let points = global.grid.unwrap_or(match m {
        1 => 512,
        2 => 48,
        _ => 12,
    });
    let ys = if ys.is_empty() { vec![vec![0.0; m]] } else { ys };
    Ok(SamplingSpec::new(extent, points, ys, global.seed.unwrap_or(0))?)
}

fn digest(global: &GlobalArgs, sum: &ExponentialSum) -> String {
    instance_digest(&format!("seed={}", global.seed.unwrap_or(0)), &sum.to_json())
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval { sum, x, y } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let x = sized(parse_vector(x)?, m, "--x")?;
            let y = match y {
                Some(y) => sized(parse_vector(y)?, m, "--y")?,
                None => vec![0.0; m],
            };
            complex_outcome(sum.evaluate(&TubePoint::new(x, y)?)?, None)
        }
        Command::Dual { cone } => Ok(cone_outcome(&read_cone(cone)?.dual()?)),
        Command::Fejer { sum, q } => {
            let sum = read_sum(sum)?;
            let order = match q.as_str() {
                "inf" | "infinity" => FejerOrder::Unbounded,
                other => FejerOrder::Finite(other.parse().with_context(|| format!("bad order {other:?}"))?),
            };
            Ok(sum_outcome(&bochner_fejer_sum(&sum, order, None)?))
        }
        Command::Mean {
            sum,
            lambda,
            n,
            shift,
            height,
            sampled,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let lambda = sized(parse_vector(lambda)?, m, "--lambda")?;
            let shift = match shift {
                Some(s) => sized(parse_vector(s)?, m, "--shift")?,
                None => vec![0.0; m],
            };
            let height = match height {
                Some(s) => sized(parse_vector(s)?, m, "--height")?,
                None => vec![0.0; m],
            };
            let quadrature = match sampled {
                Some(p) => Quadrature::Sampled { points_per_axis: *p },
                None => Quadrature::ClosedForm,
            };
            let spec = MeanSpec::new(*n, shift, height, quadrature)?;
            let value = cube_mean_coefficient(&sum, &lambda, &spec)?;
            let bound = match quadrature {
                Quadrature::Sampled { .. } => Some(midpoint_error_bound(&sum, &lambda, &spec)?),
                Quadrature::ClosedForm => None,
            };
            complex_outcome(value, bound)
        }
        Command::Smooth { sum, width } => Ok(sum_outcome(&box_smooth(&read_sum(sum)?, *width)?)),
        Command::AlmostPeriods {
            sum,
            epsilon,
            window,
            step,
            cone,
            y,
            extent,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let ys = parse_vectors(y)?;
            let base = match cone {
                Some(path) => TubeBase::Cone(read_cone(path)?),
                None => TubeBase::Point(match ys.first() {
                    Some(y) => y.clone(),
                    None => vec![0.0; m],
                }),
            };
            let spec = spec(g, m, *extent, ys)?;
            let report = find_almost_periods(&sum, *epsilon, *window, *step, &base, &spec)?;
            let rows = report
                .taus
                .iter()
                .zip(report.bound_values.iter().zip(&report.sampled_sups))
                .map(|(tau, (b, s))| {
                    let mut row: Vec<String> = tau.iter().map(|v| num(*v)).collect();
                    row.push(num(*b));
                    row.push(num(*s));
                    row
                })
                .collect();
            let mut header: Vec<String> = (0..m).map(|j| format!("tau_{j}")).collect();
            header.push("bound".into());
            header.push("sampled_sup".into());
            let mut out = Outcome::new(&report, &[], rows)?;
            out.header = header;
            Ok(out)
        }
        Command::Indicator { sum, y, r_max, radii } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let y = sized(parse_vector(y)?, m, "--y")?;
            let radii = geometric_radii(1.0, *r_max, *radii)?;
            let spec = spec(g, m, std::f64::consts::TAU, Vec::new())?;
            let est = p_indicator_estimate(&sum, &y, &radii, &spec)?;
            let row = vec![num(est.slope), num(est.oracle), num(est.residual), num(est.r_max)];
            Outcome::new(&est, &["slope", "oracle", "residual", "r_max"], vec![row])
        }
        Command::Verify { check } => Outcome::reports(vec![run_check(g, check)?]),
        Command::Suite { config, instances } => {
            let mut config: SuiteConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => SuiteConfig::default(),
            };
            if let Some(seed) = g.seed {
                config.seed = seed;
            }
            if let Some(n) = instances {
                config.instances = *n;
            }
            if let Some(p) = g.grid {
                config.grid = vec![p; 8];
            }
            Outcome::reports(run_suite(&config)?)
        }
    }
}

fn run_check(g: &GlobalArgs, check: &Check) -> anyhow::Result<VerificationReport> {
    let report = match check {
        Check::MaxModulus {
            sum,
            cone,
            y,
            shift,
            extent,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let gamma = read_cone(cone)?;
            let dual = gamma.dual()?;
            let base = match shift {
                Some(b) => TubeBase::ShiftedCone {
                    cone: dual,
                    shift: sized(parse_vector(b)?, m, "--shift")?,
                },
                None => TubeBase::Cone(dual),
            };
            let spec = spec(g, m, *extent, parse_vectors(y)?)?;
            verify_max_modulus(&sum, &gamma, &base, &spec, tolerance(g, DEFAULT_GRID_SLACK)?)?
                .with_digest(digest(g, &sum))
        }
        Check::Convexity {
            sum,
            y0,
            y1,
            samples,
            cone,
            extent,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let gamma = cone.as_deref().map(read_cone).transpose()?;
            let spec = spec(g, m, *extent, Vec::new())?;
            verify_convexity(
                &sum,
                &sized(parse_vector(y0)?, m, "--y0")?,
                &sized(parse_vector(y1)?, m, "--y1")?,
                *samples,
                &spec,
                gamma.as_ref(),
                tolerance(g, DEFAULT_GRID_SLACK)?,
            )?
            .with_digest(digest(g, &sum))
        }
        Check::ExtensionLimit {
            sum,
            cone,
            cone_prime,
            direction,
            t_max,
            times,
            shift,
            extent,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let gamma = read_cone(cone)?;
            let gamma_prime = read_cone(cone_prime)?;
            if *times < 2 || !(*t_max > 0.0) {
                bail!("need --times >= 2 and a positive --t-max");
            }
            let schedule: Vec<f64> = (0..*times).map(|k| t_max * k as f64 / (*times - 1) as f64).collect();
            let rays = parse_vectors(direction)?
                .into_iter()
                .map(|u| {
                    let u = sized(u, m, "--direction")?;
                    let unit = crate::linalg::normalized(&u).ok_or_else(|| anyhow!("zero ray direction"))?;
                    Ok(Ray {
                        direction: unit,
                        times: schedule.clone(),
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let dual = gamma.dual()?;
            let base = match shift {
                Some(b) => TubeBase::ShiftedCone {
                    cone: dual,
                    shift: sized(parse_vector(b)?, m, "--shift")?,
                },
                None => TubeBase::Cone(dual),
            };
            let spec = spec(g, m, *extent, Vec::new())?;
            verify_extension_limit(&sum, &gamma, &gamma_prime, &base, &rays, &spec)?.with_digest(digest(g, &sum))
        }
        Check::Offspectrum {
            sum,
            cone,
            probe,
            map,
            schedule,
        } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let gamma_hat = read_cone(cone)?;
            let map = match map {
                Some(text) => LinearMap::new(
                    text.split(';')
                        .map(parse_vector)
                        .collect::<anyhow::Result<Vec<_>>>()?,
                )?,
                None => LinearMap::identity(m),
            };
            let probes = parse_vectors(probe)?;
            verify_offspectrum_vanishing(&sum, &gamma_hat, &probes, &map, &parse_vector(schedule)?)?
                .with_digest(digest(g, &sum))
        }
        Check::Indicator { sum, y, r_max, radii } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let radii = geometric_radii(1.0, *r_max, *radii)?;
            let spec = spec(g, m, std::f64::consts::TAU, Vec::new())?;
            verify_indicator_equality(&sum, &parse_vectors(y)?, &radii, &spec)?.with_digest(digest(g, &sum))
        }
        Check::Smoothing { sum, width, z } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let points = z
                .iter()
                .map(|item| {
                    let (x, y) = item
                        .split_once(':')
                        .ok_or_else(|| anyhow!("sample point {item:?} must be x:y"))?;
                    Ok(TubePoint::new(
                        sized(parse_vector(x)?, m, "x part of --z")?,
                        sized(parse_vector(y)?, m, "y part of --z")?,
                    )?)
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            verify_smoothing_identity(&sum, *width, &points)?.with_digest(digest(g, &sum))
        }
        Check::Fejer { sum, orders, extent } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let orders = orders
                .split(',')
                .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad order {s:?}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let spec = spec(g, m, *extent, Vec::new())?;
            verify_fejer_convergence(&sum, &orders, &spec)?.with_digest(digest(g, &sum))
        }
        Check::CoefficientBound { sum, y, extent } => {
            let sum = read_sum(sum)?;
            let m = sum.dimension();
            let spec = spec(g, m, *extent, parse_vectors(y)?)?;
            coefficient_bound_check(&sum, &spec, tolerance(g, DEFAULT_GRID_SLACK)?)?.with_digest(digest(g, &sum))
        }
    };
    Ok(report)
}
