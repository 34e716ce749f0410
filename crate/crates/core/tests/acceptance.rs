//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits with status 1 if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use fuzzysphere::circle::verify_circle_relations;
use fuzzysphere::coherent::{
    check_angular_uncertainty, check_heisenberg_circle, circle_phi_bound, dispersion, l3_residual, minimize_dispersion,
    minimum_bound, random_admissible_omega, random_state, spin_cs, strong_scs_circle, strong_scs_sphere_phi,
    verify_identity_resolution_circle, verify_identity_resolution_sphere, MinimizeOptions, SphereFamily,
    STATIONARITY_TOL,
};
use fuzzysphere::lierep::{reconstruct_so4, reconstruct_su2, EulerAngles};
use fuzzysphere::linop::State;
use fuzzysphere::scan::{run_scan, ScanConfig, Suite};
use fuzzysphere::spectral::{
    check_nested_interlacing, eig_bisection, spectrum_invariance_under_phases, verify_circle_spectra,
    verify_sphere_spectra, TridiagSpec, BISECTION_TOL,
};
use fuzzysphere::sphere::{build_madore, verify_sphere_relations};
use fuzzysphere::{build_circle, build_sphere, Report};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn from_report(r: &Report) -> Outcome {
    let detail = match r.first_failure() {
        Some(c) => format!(
            "{} checks, first failure {} (lambda {:?}, m {:?}, value {:e})",
            r.checks.len(),
            c.tag,
            c.lambda,
            c.m,
            c.value
        ),
        None => format!("{} checks, max residual {:.2e}", r.checks.len(), r.max_residual()),
    };
    outcome(r.all_pass(), detail)
}

fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
    EulerAngles::new(
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..=PI),
        rng.random_range(0.0..TAU),
    )
    .unwrap()
}

fn relations() -> Outcome {
    let start = Instant::now();
    let mut report = Report::new();
    for lambda in 1..=40 {
        report.extend(verify_circle_relations(&build_circle(lambda, None).unwrap(), 1e-10));
    }
    for lambda in 1..=20 {
        report.extend(verify_sphere_relations(&build_sphere(lambda, None).unwrap(), 1e-10));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut o = from_report(&report);
    o.detail = format!("{}, runtime limit 60 s", o.detail);
    o.pass &= elapsed < 60.0;
    o
}

fn toeplitz_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 1..=201usize {
        let s = eig_bisection(&TridiagSpec::toeplitz(n, 0.5), BISECTION_TOL);
        for (h, v) in s.values().iter().enumerate() {
            let exact = ((h + 1) as f64 * PI / (n + 1) as f64).cos();
            worst = worst.max((v - exact).abs());
        }
    }
    outcome(worst <= 1e-10, format!("N = 1..201, max deviation {worst:.2e}"))
}

fn complex_tridiagonals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut invariant, mut interlaced, mut nested_tested) = (0usize, 0usize, 0usize);
    let samples = 1000;
    for _ in 0..samples {
        let n = rng.random_range(2..=15usize);
        let off: Vec<Complex64> = (0..n - 1)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let t = TridiagSpec::new(n, off).unwrap();
        if spectrum_invariance_under_phases(&t, &mut rng) {
            invariant += 1;
        }
        if t.moduli().iter().all(|&a| a > 0.0) {
            nested_tested += 1;
            if check_nested_interlacing(&t) {
                interlaced += 1;
            }
        }
    }
    outcome(
        invariant == samples && interlaced == nested_tested,
        format!("{samples} samples: phase-invariant {invariant}, nested interlacing {interlaced}/{nested_tested}"),
    )
}

fn lie() -> Outcome {
    let mut report = Report::new();
    let mut worst_trip = 0.0_f64;
    for lambda in 1..=40 {
        let c = build_circle(lambda, None).unwrap();
        let e = reconstruct_su2(&c).unwrap();
        report.extend(e.verify(1e-10));
        worst_trip = worst_trip.max(e.round_trip(&c).unwrap().global);
    }
    for lambda in 1..=20 {
        let s = build_sphere(lambda, None).unwrap();
        let g = reconstruct_so4(&s).unwrap();
        report.extend(g.verify(1e-9));
        worst_trip = worst_trip.max(g.round_trip(&s).global);
    }
    let mut o = from_report(&report);
    o.pass &= worst_trip <= 1e-10;
    o.detail = format!("{}, round trip {:.2e}", o.detail, worst_trip);
    o
}

fn resolutions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut report = Report::new();
    for lambda in 1..=30 {
        let c = build_circle(lambda, None).unwrap();
        let beta: Vec<f64> = (0..c.dim()).map(|_| rng.random_range(0.0..TAU)).collect();
        report.extend(verify_identity_resolution_circle(&c, &beta, None).unwrap());
    }
    for lambda in 1..=10 {
        let s = build_sphere(lambda, None).unwrap();
        report.extend(verify_identity_resolution_sphere(&s, &SphereFamily::Spin).unwrap());
        let omega = random_admissible_omega(&s, &mut rng);
        report.extend(verify_identity_resolution_sphere(&s, &SphereFamily::Omega(omega)).unwrap());
        let beta: Vec<f64> = (0..=lambda).map(|_| rng.random_range(0.0..TAU)).collect();
        report.extend(verify_identity_resolution_sphere(&s, &SphereFamily::Phi(beta)).unwrap());
    }
    from_report(&report)
}

fn uncertainty() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut random_checked = 0usize;
    for lambda in 1..=10u32 {
        let l = lambda as f64;
        let c = build_circle(lambda, None).unwrap();
        for n in c.labels() {
            let psi = State::basis(c.dim(), c.index(n));
            let r = check_heisenberg_circle(&c, &psi).unwrap();
            let d = dispersion(&c, &psi).unwrap();
            if !r.all_pass() || d.dispersion_l != 0.0 || r.checks.iter().any(|ch| ch.value.abs() > 1e-12) {
                failures.push(format!("psi_{n} on circle {lambda}"));
            }
        }
        let beta: Vec<f64> = (0..c.dim()).map(|_| rng.random_range(0.0..TAU)).collect();
        let omega = strong_scs_circle(&c, &beta, rng.random_range(0.0..TAU)).unwrap();
        let d = dispersion(&c, &omega).unwrap();
        if d.mean_l[0].abs() > 1e-12 || (d.dispersion_l - l * (l + 1.0) / 3.0).abs() > 1e-12 {
            failures.push(format!("omega on circle {lambda}"));
        }
        for _ in 0..500 {
            let psi = random_state(c.dim(), &mut rng);
            if !check_heisenberg_circle(&c, &psi).unwrap().all_pass() {
                failures.push(format!("random state on circle {lambda}"));
            }
            random_checked += 1;
        }

        let s = build_sphere(lambda, None).unwrap();
        let beta: Vec<f64> = (0..=lambda).map(|_| rng.random_range(0.0..TAU)).collect();
        let phi = strong_scs_sphere_phi(&s, &beta, &random_angles(&mut rng)).unwrap();
        if (dispersion(&s, &phi).unwrap().dispersion_l - l * (l + 2.0) / 2.0).abs() > 1e-10 {
            failures.push(format!("phi^beta on sphere {lambda}"));
        }
        for j in 0..=lambda {
            let d = dispersion(&s, &spin_cs(&s, j, &random_angles(&mut rng)).unwrap()).unwrap();
            if (d.dispersion_l - d.mean_l_norm()).abs() > 1e-9 {
                failures.push(format!("spin CS l = {j} on sphere {lambda}"));
            }
        }
        for _ in 0..500 {
            let psi = random_state(s.dim(), &mut rng);
            if !check_angular_uncertainty(&s, &psi).unwrap().pass {
                failures.push(format!("random state on sphere {lambda}"));
            }
            random_checked += 1;
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("Lambda = 1..10, {random_checked} random states")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn dispersion_bounds() -> Outcome {
    let opts = MinimizeOptions::default();
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0_f64;
    for lambda in 1..=30u32 {
        let c = build_circle(lambda, None).unwrap();
        let min = minimize_dispersion(&c, &opts);
        worst_ratio = worst_ratio.max(min.value / minimum_bound(1, lambda));
        if !(min.value < minimum_bound(1, lambda)) || min.stationarity > STATIONARITY_TOL {
            failures.push(format!("circle minimizer {lambda}: {}", min.value));
        }
        let phi = strong_scs_circle(&c, &vec![0.0; c.dim()], 0.0).unwrap();
        if !(dispersion(&c, &phi).unwrap().dispersion_x < circle_phi_bound(lambda)) {
            failures.push(format!("phi_alpha on circle {lambda}"));
        }
    }
    for lambda in 1..=20u32 {
        let s = build_sphere(lambda, None).unwrap();
        let min = minimize_dispersion(&s, &opts);
        worst_ratio = worst_ratio.max(min.value / minimum_bound(2, lambda));
        if !(min.value < minimum_bound(2, lambda)) || min.stationarity > STATIONARITY_TOL {
            failures.push(format!("sphere minimizer {lambda}: {}", min.value));
        }
        if l3_residual(&s, &min.state) > 1e-10 {
            failures.push(format!("L3 chi on sphere {lambda}"));
        }
        let phi = strong_scs_sphere_phi(
            &s,
            &vec![0.0; lambda as usize + 1],
            &EulerAngles::new(1.0, 2.0, 0.0).unwrap(),
        )
        .unwrap();
        if !(dispersion(&s, &phi).unwrap().dispersion_x < 1.0 / (lambda as f64 + 1.0)) {
            failures.push(format!("phi_g^0 on sphere {lambda}"));
        }
    }
    let mut worst_madore = 0.0_f64;
    for two_l in 1..=30u32 {
        let l = two_l as f64 / 2.0;
        let ms = build_madore(l).unwrap();
        let min = minimize_dispersion(&ms, &opts);
        worst_madore = worst_madore.max((min.value - 1.0 / (l + 1.0)).abs());
    }
    if worst_madore > 1e-8 {
        failures.push(format!("Madore deviation {worst_madore:e}"));
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("max minimum/bound {worst_ratio:.3}, Madore deviation {worst_madore:.1e}")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn determinism() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (d, lambda_max) in [(1u8, 10u32), (2, 5)] {
        let config = ScanConfig {
            d,
            lambda_min: 1,
            lambda_max,
            suites: Suite::ALL.to_vec(),
            seed: 7,
            ..ScanConfig::default()
        };
        let a = run_scan(&config).unwrap();
        let b = run_scan(&config).unwrap();
        let same = a.report.checks == b.report.checks
            && serde_json::to_string(&a.report).unwrap() == serde_json::to_string(&b.report).unwrap();
        pass &= same && a.report.all_pass();
        detail.push(format!("d = {d}: {} checks, identical {same}", a.report.checks.len()));
    }
    outcome(pass, detail.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("relation suites", relations),
        ("Toeplitz oracle", toeplitz_oracle),
        ("circle spectral structure", || {
            from_report(&verify_circle_spectra(1..=40))
        }),
        ("sphere spectral structure", || {
            from_report(&verify_sphere_spectra(2..=20))
        }),
        ("complex tridiagonals", complex_tridiagonals),
        ("Lie reconstructions", lie),
        ("resolutions of identity", resolutions),
        ("uncertainty results", uncertainty),
        ("dispersion bounds", dispersion_bounds),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {:<26} {}  ({}; {:.2} s)",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
