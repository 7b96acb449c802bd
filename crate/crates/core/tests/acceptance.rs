//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line and asserts its runtime budget.

use std::f64::consts::{SQRT_2, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use tubeap::cones::Cone;
use tubeap::expsum::{ExponentialSum, Term};
use tubeap::fejer::{bochner_fejer_sum, fejer_factor, rational_base, FejerOrder, FejerScheme};
use tubeap::indicator::{geometric_radii, p_indicator_estimate};
use tubeap::meanvalue::{box_smooth, check_admissible, cube_mean_coefficient, MeanSpec, Quadrature};
use tubeap::metrics::{find_almost_periods, sup_distance, SamplingSpec, TubeBase};
use tubeap::verify::instances::{commensurable_sum, instance_rng, random_coefficient, random_cone, random_sum_in_cone, random_unit};
use tubeap::verify::{
    run_suite, verify_convexity, verify_fejer_convergence, CheckFamily, Status, SuiteConfig, VerificationReport,
};

fn verdict(n: usize, ok: bool, summary: &str, elapsed: Duration, budget_secs: f64) {
    let within = elapsed.as_secs_f64() < budget_secs;
    let tag = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {tag} {summary} ({:.2}s of {budget_secs}s)",
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {n}: {summary}");
    assert!(within, "criterion {n} over budget: {:?}", elapsed);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = dot(v, v).sqrt();
    v.iter().map(|x| x / n).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Max over `a` of the distance to the nearest member of `b`, both as unit
/// vectors, symmetrised.
fn set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |p: &[Vec<f64>], q: &[Vec<f64>]| {
        p.iter()
            .map(|u| {
                q.iter()
                    .map(|v| dist(&unit(u), &unit(v)))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    one_way(a, b).max(one_way(b, a))
}

fn suite(family: CheckFamily, instances: usize, dimensions: Vec<usize>) -> Vec<VerificationReport> {
    let config = SuiteConfig {
        seed: 20240611,
        instances,
        dimensions,
        checks: vec![family],
        ..SuiteConfig::default()
    };
    run_suite(&config).unwrap()
}

fn summarize(reports: &[VerificationReport]) -> (usize, usize, usize, f64) {
    let pass = reports.iter().filter(|r| r.status == Status::Pass).count();
    let fail = reports.iter().filter(|r| r.status == Status::Fail).count();
    let skip = reports.iter().filter(|r| r.status == Status::Skipped).count();
    let worst = reports
        .iter()
        .filter(|r| r.status != Status::Skipped)
        .map(|r| r.max_violation - r.tolerance)
        .fold(f64::NEG_INFINITY, f64::max);
    for r in reports.iter().filter(|r| r.status == Status::Fail) {
        eprintln!("{} failed: {:?} violation {:e} [{}]", r.check, r.reason, r.max_violation, r.instance_digest);
    }
    (pass, fail, skip, worst)
}

#[test]
fn criterion_01_dual_involution() {
    let start = Instant::now();
    let mut worst_gen = 0.0f64;
    let mut worst_delta = 0.0f64;
    let mut dual_ok = true;
    for i in 0..200 {
        let mut rng = instance_rng(1, "acceptance_dual", i);
        let m = 2 + i % 2;
        let axis = random_unit(&mut rng, m);
        let count = rng.gen_range(m..=m + 3);
        let generators: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let w = random_unit(&mut rng, m);
                let s = rng.gen_range(0.2..0.9);
                axis.iter().zip(&w).map(|(a, b)| a + s * b).collect()
            })
            .collect();
        let cone = Cone::polyhedral(m, &generators).unwrap();
        let dual = cone.dual().unwrap();
        let back = dual.dual().unwrap();
        let (orig, twice) = (cone.generators().unwrap(), back.generators().unwrap_or(&[]));
        worst_gen = worst_gen.max(set_distance(orig, twice));
        // every dual generator is nonnegative on every input generator
        for h in dual.generators().unwrap_or(&[]) {
            for g in &generators {
                dual_ok &= dot(h, g) >= -1e-9 * dot(h, h).sqrt() * dot(g, g).sqrt();
            }
        }
    }
    for i in 0..20 {
        let mut rng = instance_rng(1, "acceptance_circular", i);
        let m = 2 + i % 2;
        let axis = random_unit(&mut rng, m);
        let delta = rng.gen_range(0.05..0.95);
        let cone = Cone::circular(&axis, delta).unwrap();
        let back = cone.dual().unwrap().dual().unwrap();
        match back {
            Cone::Circular(c) => {
                worst_delta = worst_delta.max((c.delta() - delta).abs());
                worst_gen = worst_gen.max(dist(c.axis(), &unit(&axis)));
            }
            _ => worst_delta = f64::INFINITY,
        }
    }
    let ok = worst_gen <= 1e-9 && worst_delta <= 1e-12 && dual_ok;
    verdict(
        1,
        ok,
        &format!("200 polyhedral + 20 circular, generator distance {worst_gen:.2e}, delta error {worst_delta:.2e}"),
        start.elapsed(),
        10.0,
    );
}

#[test]
fn criterion_02_max_modulus() {
    let start = Instant::now();
    let reports = suite(CheckFamily::MaxModulus, 100, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);
    verdict(
        2,
        fail == 0 && skip == 0 && pass == 100,
        &format!("{pass} pass, {fail} fail, {skip} skipped; worst ratio excess over 1.05: {worst:.3e}"),
        start.elapsed(),
        60.0,
    );
}

#[test]
fn criterion_03_convexity() {
    let start = Instant::now();
    let reports = suite(CheckFamily::Convexity, 100, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);

    // single term: psi(y) = ln|a| - <y, lambda> is affine
    let mut single_worst = 0.0f64;
    for i in 0..20 {
        let mut rng = instance_rng(3, "acceptance_single", i);
        let m = 1 + i % 3;
        let cone = random_cone(&mut rng, m).unwrap();
        let sum = random_sum_in_cone(&mut rng, &cone, 1, 3.0, false).unwrap();
        let y0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y1: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = SamplingSpec::new(TAU, 16, vec![vec![0.0; m]], i as u64).unwrap();
        let report = verify_convexity(&sum, &y0, &y1, 11, &spec, None, 1e-12).unwrap();
        single_worst = single_worst.max(report.max_violation);
        let probe = tubeap::verify::convexity_probe(&sum, &y0, &y1, 11, &spec).unwrap();
        let t0 = &sum.terms()[0];
        for (t, psi) in probe.samples {
            let y: Vec<f64> = y0.iter().zip(&y1).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            let exact = t0.coeff.norm().ln() - dot(&y, &t0.lambda);
            single_worst = single_worst.max((psi - exact).abs());
        }
    }
    verdict(
        3,
        fail == 0 && pass + skip == 100 && pass > 0 && single_worst <= 1e-12,
        &format!(
            "{pass} pass, {fail} fail, {skip} skipped; worst excess {worst:.3e}; single-term error {single_worst:.2e}"
        ),
        start.elapsed(),
        60.0,
    );
}

#[test]
fn criterion_04_extension_limit() {
    let start = Instant::now();
    let reports = suite(CheckFamily::ExtensionLimit, 50, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);
    verdict(
        4,
        fail == 0 && skip == 0 && pass == 50,
        &format!("{pass} pass, {fail} fail, {skip} skipped; worst excess {worst:.3e}"),
        start.elapsed(),
        30.0,
    );
}

/// Direct midpoint rule on a tensor grid, written out termwise.
fn midpoint_mean(sum: &ExponentialSum, lambda: &[f64], n: f64, height: &[f64], points: usize) -> Complex64 {
    let h = 2.0 * n / points as f64;
    sum.terms()
        .iter()
        .map(|t| {
            let damp = (-dot(height, &t.lambda)).exp();
            let per_axis: Complex64 = t
                .lambda
                .iter()
                .zip(lambda)
                .map(|(a, b)| {
                    let d = a - b;
                    let s: Complex64 = (0..points)
                        .map(|k| Complex64::from_polar(1.0, d * (-n + h * (k as f64 + 0.5))))
                        .sum();
                    s / points as f64
                })
                .product();
            t.coeff * damp * per_axis
        })
        .sum()
}

#[test]
fn criterion_05_coefficient_recovery() {
    let start = Instant::now();
    let n = 1e3;
    let mut worst_ratio = 0.0f64;
    let mut worst_quadrature = 0.0f64;
    let mut worst_library_quadrature = 0.0f64;
    for i in 0..30 {
        let mut rng = instance_rng(5, "acceptance_recovery", i);
        let m = 1 + i % 3;
        let cone = random_cone(&mut rng, m).unwrap();
        let sum = random_sum_in_cone(&mut rng, &cone, 2 + i % 7, 2.0, i % 2 == 0).unwrap();
        let dual = cone.dual().unwrap();
        let y: Vec<f64> = dual
            .interior_direction()
            .unwrap()
            .iter()
            .map(|v| v * rng.gen_range(0.1..0.5))
            .collect();
        let spectrum = sum.spectrum();
        let delta_min = spectrum
            .iter()
            .enumerate()
            .flat_map(|(a, p)| {
                spectrum[a + 1..]
                    .iter()
                    .map(move |q| p.iter().zip(q).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
            })
            .fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = sum
            .terms()
            .iter()
            .map(|t| t.coeff.norm() * (-dot(&y, &t.lambda)).exp())
            .collect();
        let spec = MeanSpec::new(n, vec![0.0; m], y.clone(), Quadrature::ClosedForm).unwrap();
        for (k, t) in sum.terms().iter().enumerate() {
            let mean = cube_mean_coefficient(&sum, &t.lambda, &spec).unwrap();
            let target = t.coeff * (-dot(&y, &t.lambda)).exp();
            let others: f64 = weights.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, w)| w).sum();
            let bound = others / (n * delta_min);
            let err = (mean - target).norm();
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(err / bound);
            } else {
                worst_ratio = worst_ratio.max(if err <= 1e-14 { 0.0 } else { f64::INFINITY });
            }
            // one-dimensional grids fine enough for the midpoint rule
            if m == 1 {
                let closed = cube_mean_coefficient(&sum, &t.lambda, &spec).unwrap();
                let sampled = midpoint_mean(&sum, &t.lambda, n, &y, 100_000);
                worst_quadrature = worst_quadrature.max((closed - sampled).norm());
            }
        }
    }
    // the library's own sampled quadrature at moderate N in two dimensions
    for i in 0..5 {
        let mut rng = instance_rng(5, "acceptance_quadrature", i);
        let cone = random_cone(&mut rng, 2).unwrap();
        let sum = random_sum_in_cone(&mut rng, &cone, 3, 1.0, false).unwrap();
        let lambda = sum.terms()[0].lambda.clone();
        let closed = cube_mean_coefficient(&sum, &lambda, &MeanSpec::closed_form(10.0, 2).unwrap()).unwrap();
        let sampled = cube_mean_coefficient(
            &sum,
            &lambda,
            &MeanSpec::new(10.0, vec![0.0; 2], vec![0.0; 2], Quadrature::Sampled { points_per_axis: 2000 }).unwrap(),
        )
        .unwrap();
        worst_library_quadrature = worst_library_quadrature.max((closed - sampled).norm());
    }
    verdict(
        5,
        worst_ratio <= 1.0 && worst_quadrature <= 1e-6 && worst_library_quadrature <= 1e-6,
        &format!(
            "30 sums, worst error/bound {worst_ratio:.3e}; midpoint vs closed form {worst_quadrature:.2e} (m=1, N=1e3), {worst_library_quadrature:.2e} (m=2, N=10)"
        ),
        start.elapsed(),
        30.0,
    );
}

#[test]
fn criterion_06_offspectrum_vanishing() {
    let start = Instant::now();
    let reports = suite(CheckFamily::OffspectrumVanishing, 50, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);
    verdict(
        6,
        fail == 0 && skip == 0 && pass == 50,
        &format!("{pass} pass, {fail} fail, {skip} stalled; worst excess {worst:.3e}"),
        start.elapsed(),
        10.0,
    );
}

#[test]
fn criterion_07_indicator_identity() {
    let start = Instant::now();
    let reports = suite(CheckFamily::IndicatorEquality, 50, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);

    let radii = geometric_radii(1.0, 1e3, 40).unwrap();
    let mut single_worst = 0.0f64;
    for i in 0..20 {
        let mut rng = instance_rng(7, "acceptance_single", i);
        let m = 1 + i % 3;
        let lambda: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let sum = ExponentialSum::new(m, vec![Term::new(lambda.clone(), random_coefficient(&mut rng))]).unwrap();
        let y: Vec<f64> = random_unit(&mut rng, m).iter().map(|v| v * rng.gen_range(0.5..1.5)).collect();
        let spec = SamplingSpec::new(TAU, 6, vec![vec![0.0; m]], i as u64).unwrap();
        let est = p_indicator_estimate(&sum, &y, &radii, &spec).unwrap();
        single_worst = single_worst.max((est.slope + dot(&y, &lambda)).abs());
    }
    verdict(
        7,
        fail == 0 && skip == 0 && pass == 50 && single_worst <= 1e-6,
        &format!("{pass} pass, {fail} fail, {skip} skipped; worst excess {worst:.3e}; single-term error {single_worst:.2e}"),
        start.elapsed(),
        60.0,
    );
}

#[test]
fn criterion_08_smoothing_identity() {
    let start = Instant::now();
    let reports = suite(CheckFamily::SmoothingIdentity, 20, vec![1, 2, 3]);
    let (pass, fail, skip, worst) = summarize(&reports);

    let mut preserved = true;
    let mut rejected = true;
    for i in 0..20 {
        let mut rng = instance_rng(8, "acceptance_smoothing", i);
        let m = 1 + i % 3;
        let cone = random_cone(&mut rng, m).unwrap();
        let sum = random_sum_in_cone(&mut rng, &cone, 4, 2.0, false).unwrap();
        let width = rng.gen_range(0.5..2.0);
        if check_admissible(&sum, width).is_ok() {
            let smooth = box_smooth(&sum, width).unwrap();
            preserved &= smooth.spectrum() == sum.spectrum();
        }
        // a width with lambda_j N = 2 pi kills that term
        let t = &sum.terms()[0];
        let j = (0..m).max_by(|a, b| t.lambda[*a].abs().total_cmp(&t.lambda[*b].abs())).unwrap();
        let bad = TAU / t.lambda[j].abs();
        rejected &= check_admissible(&sum, bad).is_err() && box_smooth(&sum, bad).is_err();
    }
    verdict(
        8,
        fail == 0 && skip == 0 && pass == 20 && preserved && rejected,
        &format!(
            "{pass} pass, {fail} fail, {skip} skipped; worst excess {worst:.3e}; spectrum preserved {preserved}; inadmissible rejected {rejected}"
        ),
        start.elapsed(),
        30.0,
    );
}

#[test]
fn criterion_09_fejer() {
    let start = Instant::now();
    let mut exact = true;
    for q in 1..=64u64 {
        for p in -(q as i64) + 1..q as i64 {
            let expected = (q as f64 - p.unsigned_abs() as f64) / q as f64;
            exact &= fejer_factor(&[p], FejerOrder::Finite(q)) == expected;
            exact &= (fejer_factor(&[p], FejerOrder::Finite(q)) - (1.0 - p.abs() as f64 / q as f64)).abs() <= f64::EPSILON;
        }
    }
    let mut monotone = 0;
    let mut in_range = true;
    let mut coefficients_match = true;
    for i in 0..50 {
        let mut rng = instance_rng(9, "acceptance_fejer", i);
        let (sum, beta) = commensurable_sum(&mut rng, 2 + i % 6).unwrap();
        let base = rational_base(&sum.spectrum(), 1e-9).unwrap();
        let spec = SamplingSpec::new(TAU / beta, 1000, vec![vec![0.0]], i as u64).unwrap();
        let report = verify_fejer_convergence(&sum, &[4, 16, 64, 256], &spec).unwrap();
        if report.status == Status::Pass {
            monotone += 1;
        }
        for q in [4u64, 16, 64, 256] {
            let scheme = FejerScheme::for_sum(&sum, FejerOrder::Finite(q)).unwrap();
            let sigma = bochner_fejer_sum(&sum, FejerOrder::Finite(q), Some(&base)).unwrap();
            for ((t, k), coords) in sum.terms().iter().zip(&scheme.factors).zip(&scheme.base.coords) {
                if coords.iter().any(|r| *r != 0) {
                    in_range &= (0.0..1.0).contains(k);
                }
                // the frequency r * beta has coordinate r / g for the gcd g of the r's
                let r = (t.lambda[0] / beta).round() as i64;
                let expected = if r == 0 { 1.0 } else { fejer_factor(&[r / gcd_all(&sum, beta)], FejerOrder::Finite(q)) };
                let got = sigma.coefficient_at(&t.lambda, 1e-12);
                coefficients_match &= (got - t.coeff * expected).norm() <= 1e-15 * t.coeff.norm().max(1.0);
            }
        }
    }
    verdict(
        9,
        exact && monotone == 50 && in_range && coefficients_match,
        &format!(
            "factors exact {exact}; {monotone}/50 monotone; factors in [0,1) {in_range}; coefficients {coefficients_match}"
        ),
        start.elapsed(),
        30.0,
    );
}

fn gcd_all(sum: &ExponentialSum, beta: f64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    sum.terms()
        .iter()
        .map(|t| (t.lambda[0] / beta).round() as i64)
        .fold(0, gcd)
        .max(1)
}

#[test]
fn criterion_10_almost_periods() {
    let start = Instant::now();
    let base0 = TubeBase::Point(vec![0.0]);

    // {1, 2}: tau = 2 pi is an exact period
    let pair = ExponentialSum::from_pairs(1, [(vec![1.0], Complex64::new(1.0, 0.0)), (vec![2.0], Complex64::new(0.5, 0.3))]).unwrap();
    let spec = SamplingSpec::new(TAU, 256, vec![vec![0.0]], 10).unwrap();
    let report = find_almost_periods(&pair, 1e-9, 7.0, TAU / 1000.0, &base0, &spec).unwrap();
    let at_two_pi = report
        .taus
        .iter()
        .zip(&report.bound_values)
        .find(|(t, _)| (t[0] - TAU).abs() < 1e-9)
        .map(|(_, b)| *b);
    let exact_pair = matches!(at_two_pi, Some(b) if b <= 1e-12);

    // random commensurable spectra: 2 pi / (beta g) is an exact period
    let mut exact_random = true;
    for i in 0..10 {
        let mut rng = instance_rng(10, "acceptance_periods", i);
        let (sum, beta) = commensurable_sum(&mut rng, 3).unwrap();
        let period = TAU / (beta * gcd_all(&sum, beta) as f64);
        let report = find_almost_periods(&sum, 1e-9, 1.5 * period, period / 500.0, &base0, &spec).unwrap();
        exact_random &= report
            .taus
            .iter()
            .zip(&report.bound_values)
            .any(|(t, b)| (t[0] - period).abs() < 1e-9 && *b <= 1e-12);
    }

    // {1, sqrt 2} with epsilon 0.1 over [0, 1e3]
    let quasi = ExponentialSum::from_pairs(1, [(vec![1.0], Complex64::new(1.0, 0.0)), (vec![SQRT_2], Complex64::new(1.0, 0.0))]).unwrap();
    let spec = SamplingSpec::new(100.0, 512, vec![vec![0.0]], 11).unwrap();
    let report = find_almost_periods(&quasi, 0.1, 1e3, 1e-3, &base0, &spec).unwrap();
    let nontrivial = report.taus.iter().filter(|t| t[0] > 1.0).count();

    // revalidate on a grid the search never saw
    let fresh = SamplingSpec::new(137.0, 1024, vec![vec![0.0]], 0xfeed).unwrap();
    let mut revalidated = true;
    for tau in &report.taus {
        let shifted = quasi.translate(tau).unwrap();
        let d = sup_distance(&shifted, &quasi, &base0, &fresh).unwrap();
        revalidated &= d.lower <= 0.1;
        // independent evaluation of the bound
        let b = 2.0 * (tau[0] / 2.0).sin().abs() + 2.0 * (tau[0] * SQRT_2 / 2.0).sin().abs();
        revalidated &= b <= 0.1 + 1e-12;
    }
    verdict(
        10,
        exact_pair && exact_random && nontrivial > 0 && revalidated,
        &format!(
            "B(2pi) on {{1,2}}: {at_two_pi:?}; commensurable exact {exact_random}; {{1,sqrt2}}: {} taus ({nontrivial} beyond 1), revalidated {revalidated}",
            report.taus.len()
        ),
        start.elapsed(),
        60.0,
    );
}

#[test]
fn criterion_11_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_tubeap"))
            .args(["suite", "--seed", "7", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.code() == Some(0) || status.code() == Some(1));
        std::fs::read(path).unwrap()
    };
    let first = run("a.json");
    let second = run("b.json");
    let cli_same = first == second && !first.is_empty();

    let config = SuiteConfig {
        seed: 7,
        instances: 2,
        ..SuiteConfig::default()
    };
    let in_pool = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string(&run_suite(&config).unwrap()).unwrap())
    };
    let parallel_same = in_pool(1) == in_pool(4);
    verdict(
        11,
        cli_same && parallel_same,
        &format!("CLI runs identical {cli_same} ({} bytes); 1 vs 4 threads identical {parallel_same}", first.len()),
        start.elapsed(),
        120.0,
    );
}

