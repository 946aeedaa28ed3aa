//! Acceptance criteria. Each test prints one PASS/FAIL line with the
//! measured quantity and its wall-clock time against the budget.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use qca_cli::{run, Command as RunCommand, RunSpec};
use qca_core::metrics::{
    contraction_probe, fixed_point_residual, irreversibility_time, return_probability,
    reversibility_curve, TIrr, DEFAULT_DELTA,
};
use qca_core::oracle::compare_with_sector;
use qca_core::{AutomatonConfig, RuleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(n: usize, p: f64, q: f64, phi1: f64, phi2: f64, xi: f64) -> AutomatonConfig {
    AutomatonConfig::new(n, RuleParams::new(p, q, phi1, phi2).unwrap(), xi).unwrap()
}

/// Runs `body`, prints the verdict line and fails the test on a miss.
fn criterion(name: &str, budget: Duration, body: impl FnOnce() -> (bool, String)) {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "{verdict} {name}: {detail} [{:.2}s / budget {:.0}s]",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(ok, "{name}: {detail}");
    assert!(in_time, "{name}: took {elapsed:?}, budget {budget:?}");
}

fn t_irr(cfg: &AutomatonConfig) -> TIrr {
    irreversibility_time(cfg, DEFAULT_DELTA, 2000).unwrap()
}

#[test]
fn zero_noise_reversibility() {
    criterion("zero-noise reversibility", Duration::from_secs(5), || {
        let mut worst = 0.0f64;
        for n in [8, 32] {
            let rec = reversibility_curve(&config(n, 0.5, 0.5, 0.0, 0.0, 0.0), 200, 2).unwrap();
            assert_eq!(rec.times.len(), 101);
            for p1 in rec.p1_values {
                worst = worst.max((p1 - 1.0).abs());
            }
        }
        (
            worst <= 1e-9,
            format!("max |P1 - 1| = {worst:.3e} (tol 1e-9)"),
        )
    });
}

#[test]
fn dephasing_asymptote() {
    criterion("dephasing asymptote", Duration::from_secs(10), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for xi in [0.3, 1.0] {
            let rec = reversibility_curve(&config(8, 0.5, 0.5, 0.0, 0.0, xi), 2000, 2).unwrap();
            match rec.t_irr {
                TIrr::At(t) => {
                    let worst = rec
                        .times
                        .iter()
                        .zip(&rec.p1_values)
                        .filter(|(&tt, _)| tt >= t)
                        .map(|(_, p)| (p - 0.125).abs())
                        .fold(0.0, f64::max);
                    ok &= worst <= 1e-3;
                    parts.push(format!(
                        "xi={xi}: T_irr={t}, max |P1-1/8| after = {worst:.2e}"
                    ));
                }
                TIrr::NotReached => {
                    ok = false;
                    parts.push(format!("xi={xi}: T_irr not reached"));
                }
            }
        }
        (ok, parts.join("; "))
    });
}

#[test]
fn fixed_point() {
    criterion("fixed point", Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let n = rng.random_range(2..=32);
            let p = rng.random_range(0.0..=1.0);
            // (0, 1]
            let xi = 1.0 - rng.random_range(0.0..1.0);
            let phi1 = rng.random_range(-PI..PI);
            let phi2 = rng.random_range(-PI..PI);
            let cfg = config(n, p, p, phi1, phi2, xi);
            assert_eq!(cfg.noise().eta(), 0.0);
            worst = worst.max(fixed_point_residual(&cfg).unwrap());
        }
        (
            worst <= 1e-12,
            format!("max D(step(I/N), I/N) = {worst:.3e} over 20 configs (tol 1e-12)"),
        )
    });
}

#[test]
fn contraction() {
    criterion("contraction", Duration::from_secs(10), || {
        let rep = contraction_probe(&config(8, 0.5, 0.5, 0.0, 0.0, 0.3), 200, 7).unwrap();
        let ok = rep.evaluated == 200 && rep.max_ratio <= 1.0 + 1e-10 && rep.max_ratio < 1.0;
        (
            ok,
            format!(
                "max ratio {:.12} over {} pairs (must be < 1)",
                rep.max_ratio, rep.evaluated
            ),
        )
    });
}

#[test]
fn monotone_noise_trend() {
    criterion("monotone noise trend", Duration::from_secs(60), || {
        let xis = [0.2, 0.4, 0.6, 0.8];
        let times: Vec<TIrr> = xis
            .iter()
            .map(|&xi| t_irr(&config(16, 0.5, 0.5, 0.0, 0.0, xi)))
            .collect();
        let finite: Vec<Option<u64>> = times.iter().map(|t| t.time()).collect();
        let ok = finite.iter().all(Option::is_some) && finite.windows(2).all(|w| w[1] <= w[0]);
        let listing: Vec<String> = xis
            .iter()
            .zip(&finite)
            .map(|(xi, t)| format!("xi={xi}:{}", t.map_or("NR".into(), |t| t.to_string())))
            .collect();
        (
            ok,
            format!("T_irr {} (must be nonincreasing)", listing.join(" ")),
        )
    });
}

#[test]
fn localisation_ordering() {
    criterion("localisation ordering", Duration::from_secs(60), || {
        let local = t_irr(&config(16, 0.5, 0.5, 0.0, 0.0, 0.3)).time();
        let spread = t_irr(&config(16, 0.5, 0.5, PI, 0.0, 0.3)).time();
        let ok = matches!((local, spread), (Some(a), Some(b)) if a >= b);
        (
            ok,
            format!("T_irr(phi1+phi2=0) = {local:?}, T_irr(phi1+phi2=pi) = {spread:?}"),
        )
    });
}

#[test]
fn amplitude_damping_equilibrium() {
    criterion(
        "amplitude-damping equilibrium",
        Duration::from_secs(10),
        || {
            let cfg = config(16, 0.7, 0.3, 0.0, 0.0, 0.0);
            assert!((cfg.noise().eta() - 0.4).abs() < 1e-15);
            let p1 = return_probability(&cfg, 2000).unwrap();
            let excess = p1 - 1.0 / 16.0;
            (
                excess > 1e-3,
                format!("P1(2000) - 1/16 = {excess:.6} (must exceed 1e-3)"),
            )
        },
    );
}

#[test]
fn oracle_equivalence() {
    criterion("oracle equivalence", Duration::from_secs(30), || {
        let mut count = 0;
        let (mut diff, mut leak) = (0.0f64, 0.0f64);
        for n in [4, 6] {
            for xi in [0.0, 0.3, 1.0] {
                // eta = p - q in {-0.5, 0, 0.5}
                for (p, q) in [(0.25, 0.75), (0.5, 0.5), (0.75, 0.25)] {
                    // phi1 + phi2 in {0, pi}
                    for (phi1, phi2) in [(0.7, -0.7), (PI / 2.0, PI / 2.0)] {
                        let cmp =
                            compare_with_sector(&config(n, p, q, phi1, phi2, xi), 10).unwrap();
                        diff = diff.max(cmp.forward_diff).max(cmp.inverse_diff);
                        leak = leak.max(cmp.max_leak);
                        count += 1;
                    }
                }
            }
        }
        (
            count >= 20 && diff <= 1e-10 && leak <= 1e-12,
            format!("{count} configs, T<=10: max elementwise diff {diff:.2e} (tol 1e-10), max leak {leak:.2e} (tol 1e-12)"),
        )
    });
}

#[test]
fn determinism() {
    criterion("determinism", Duration::from_secs(60), || {
        let dir = tempfile::tempdir().unwrap();
        let mut outputs = Vec::new();
        for (i, jobs) in [1, 4, 4].into_iter().enumerate() {
            let mut spec = RunSpec::new(RunCommand::TirrSweep, dir.path().join(format!("{i}.csv")));
            spec.grid.n = vec![8, 16];
            spec.grid.phi1 = vec![0.0, PI];
            spec.grid.xi = vec![0.2, 0.4, 0.6, 0.8];
            spec.jobs = jobs;
            run(&spec).unwrap();
            outputs.push(fs::read(&spec.output_path).unwrap());
        }
        let ok = outputs.windows(2).all(|w| w[0] == w[1]);
        (
            ok,
            format!(
                "3 runs (jobs 1, 4, 4), {} bytes each, identical: {ok}",
                outputs[0].len()
            ),
        )
    });
}
