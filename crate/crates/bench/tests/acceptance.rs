//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use equilib::quantum::linalg::trace_product;
use equilib::quantum::{
    dephase, effective_dimension, equilibrium_distribution, evolve_density, max_gap_degeneracy,
    near_identity_povm, purify, quantum_probe, random_hamiltonian, random_mixed_state, random_povm,
    random_pure_state, second_moment_exact, SpectrumFamily,
};
use equilib::{
    distinguishability, multi_average_distinguishability, Estimate, SamplingScheme,
    TimeAverageConfig, TrajectoryProbe,
};
use equilib_bench::suite::BUILTIN;
use equilib_bench::{
    run_scenario, run_single, BoundStatus, RunRecord, Scenario, ScenarioKind, BOUND_SIGMAS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAP_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(name: &str) -> Scenario {
    let (_, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no built-in scenario {name}"));
    Scenario::from_toml(text, ".").unwrap()
}

fn run(names: &[&str]) -> (Vec<RunRecord>, Duration) {
    let start = Instant::now();
    let mut records = Vec::new();
    for name in names {
        records.extend(run_scenario(&scenario(name)).unwrap());
    }
    (records, start.elapsed())
}

fn errors(records: &[RunRecord]) -> usize {
    records.iter().filter(|r| r.error.is_some()).count()
}

fn qubit() -> Outcome {
    let start = Instant::now();
    let r = run_single(&scenario("qubit")).unwrap();
    let elapsed = start.elapsed();
    let report = r.report.as_ref().unwrap();
    let mean = report.mean_distinguishability;
    let bound = r.bounds.thm5.value.unwrap();
    let pass = (mean - 1.0 / PI).abs() <= 0.01
        && (bound - 0.5f64.sqrt() / 2.0).abs() < 1e-12
        && mean <= bound
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "<D> = {mean:.5} (1/pi = {:.5}), bound = {bound:.5}, {elapsed:.2?}",
            1.0 / PI
        ),
    )
}

fn quantum_sweep(records: &[RunRecord], elapsed: Duration) -> Outcome {
    let checked = records
        .iter()
        .filter(|r| r.bounds.thm5.value.is_some())
        .count();
    let violations = records
        .iter()
        .filter(|r| r.bounds.thm5.status == BoundStatus::Violated)
        .count();
    let worst = records
        .iter()
        .filter_map(|r| {
            let rep = r.report.as_ref()?;
            Some((rep.mean_distinguishability - r.bounds.thm5.value?) / rep.standard_error)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = checked >= 200
        && violations == 0
        && errors(records) == 0
        && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{checked} instances, {violations} violations, worst (mean - bound)/se = {worst:.1}, {elapsed:.2?}"
        ),
    )
}

fn second_moment_oracle() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut failures, mut degenerate) = (0, 0, 0);
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = rng.random_range(2..=8);
        let family = if seed % 2 == 0 {
            SpectrumFamily::EquallySpaced
        } else {
            SpectrumFamily::Uniform
        };
        let h = random_hamiltonian(d, family, &mut rng).unwrap();
        if max_gap_degeneracy(&h, GAP_TOL).unwrap() > 1 {
            degenerate += 1;
        }
        let rho = random_pure_state(d, &mut rng).unwrap();
        let p = random_povm(d, 2, &mut rng).unwrap().elements()[0].clone();
        let exact = second_moment_exact(&rho, &p, &h, GAP_TOL).unwrap();
        let omega = dephase(&rho, &h).unwrap();
        let cfg = TimeAverageConfig::new(
            h.default_horizon(),
            4000,
            SamplingScheme::StratifiedRandom,
            seed,
        )
        .unwrap();
        let series: Vec<f64> = cfg
            .sample_times()
            .unwrap()
            .iter()
            .map(|&t| {
                let rt = evolve_density(&rho, &h, t).unwrap();
                trace_product(&p, &(rt.matrix() - omega.matrix())).norm_sqr()
            })
            .collect();
        let mc = Estimate::from_series(&series);
        checked += 1;
        if (exact - mc.mean).abs() > BOUND_SIGMAS * mc.standard_error + 1e-12 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass =
        checked >= 50 && degenerate > 0 && failures == 0 && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!("{checked} instances ({degenerate} with degenerate gaps), {failures} outside 3se, {elapsed:.2?}"),
    )
}

fn closed_form(records: &[RunRecord]) -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    for r in records {
        let (Some(rep), Some(closed)) = (&r.report, r.closed_form) else {
            continue;
        };
        checked += 1;
        if (rep.mean_distinguishability - closed).abs() > BOUND_SIGMAS * rep.standard_error + 1e-12
        {
            failures += 1;
        }
    }
    let pass = checked >= 50 && failures == 0 && errors(records) == 0;
    outcome(
        pass,
        format!("{checked} rotation and cat runs, {failures} outside 3se"),
    )
}

fn necessity(records: &[RunRecord]) -> Outcome {
    let pure: Vec<_> = records
        .iter()
        .filter(|r| r.kind == ScenarioKind::ClassicalPure)
        .collect();
    let applicable = pure
        .iter()
        .filter(|r| r.bounds.thm2.status != BoundStatus::NotApplicable)
        .count();
    let counterexamples = pure
        .iter()
        .filter(|r| r.bounds.thm2.status == BoundStatus::Violated)
        .count();
    outcome(
        counterexamples == 0 && errors(records) == 0,
        format!("{} classical-pure runs, {applicable} meet the premise, {counterexamples} counterexamples", pure.len()),
    )
}

fn sufficiency(records: &[RunRecord]) -> Outcome {
    let mut applicable = [0usize; 3];
    let mut violations = 0;
    for r in records {
        let slot = match r.kind {
            ScenarioKind::SyntheticProbe => 0,
            ScenarioKind::ClassicalPure | ScenarioKind::ClassicalEnsemble => 1,
            ScenarioKind::Quantum => 2,
        };
        match r.bounds.thm1.status {
            BoundStatus::Satisfied => applicable[slot] += 1,
            BoundStatus::Violated => {
                applicable[slot] += 1;
                violations += 1;
            }
            BoundStatus::NotApplicable => {}
        }
    }
    let pass = violations == 0 && applicable.iter().all(|&n| n > 0) && errors(records) == 0;
    outcome(
        pass,
        format!(
            "premise met in {} synthetic, {} classical, {} quantum runs, {violations} violations",
            applicable[0], applicable[1], applicable[2]
        ),
    )
}

fn ensembles(records: &[RunRecord]) -> Outcome {
    let checked = records
        .iter()
        .filter(|r| r.bounds.thm3.value.is_some())
        .count();
    let violations = records
        .iter()
        .filter(|r| r.bounds.thm3.status == BoundStatus::Violated)
        .count();
    let (passed, sampled) = records
        .iter()
        .filter_map(|r| r.pair_audit)
        .fold((0, 0), |(p, s), a| (p + a.passed, s + a.sampled));
    let fraction = passed as f64 / sampled.max(1) as f64;
    let pass =
        checked > 0 && violations == 0 && sampled > 0 && fraction >= 0.99 && errors(records) == 0;
    outcome(
        pass,
        format!("{checked} ensembles, {violations} violations, audit {passed}/{sampled} = {fraction:.4}"),
    )
}

fn purification() -> Outcome {
    let (mut worst, mut preserved, mut count) = (0.0f64, true, 0);
    for seed in 0..24u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let d = rng.random_range(2..=6);
        let family = if seed % 2 == 0 {
            SpectrumFamily::EquallySpaced
        } else {
            SpectrumFamily::Uniform
        };
        let h = random_hamiltonian(d, family, &mut rng).unwrap();
        let rho = random_mixed_state(d, rng.random_range(2..=d), &mut rng).unwrap();
        let povm = random_povm(d, rng.random_range(2..=5), &mut rng).unwrap();
        let pur = purify(&rho).unwrap();
        let big = pur.state();
        let h2 = pur.extend_hamiltonian(&h).unwrap();
        let ext = povm.tensor_identity(pur.ancilla_dim);
        let dg = (
            max_gap_degeneracy(&h, GAP_TOL).unwrap(),
            max_gap_degeneracy(&h2, GAP_TOL).unwrap(),
        );
        let de = (
            effective_dimension(&rho, &h).unwrap(),
            effective_dimension(&big, &h2).unwrap(),
        );
        preserved &= dg.0 == dg.1 && (de.0 - de.1).abs() <= 1e-12 * de.0;
        let (q1, q2) = (
            quantum_probe(&rho, &h, &povm).unwrap(),
            quantum_probe(&big, &h2, &ext).unwrap(),
        );
        let o1 = equilibrium_distribution(&rho, &h, &povm).unwrap();
        let o2 = equilibrium_distribution(&big, &h2, &ext).unwrap();
        for k in 0..200 {
            let t = k as f64 * 0.377;
            let d1 = distinguishability(&q1.sample(t).unwrap(), &o1).unwrap();
            let d2 = distinguishability(&q2.sample(t).unwrap(), &o2).unwrap();
            worst = worst.max((d1 - d2).abs());
        }
        count += 1;
    }
    outcome(
        count >= 20 && worst <= 1e-9 && preserved,
        format!("{count} mixed states, max trajectory gap {worst:.1e}, d_eff and D_G preserved: {preserved}"),
    )
}

fn corollary(records: &[RunRecord]) -> Outcome {
    let applicable = records
        .iter()
        .filter(|r| r.bounds.corollary.status != BoundStatus::NotApplicable)
        .count();
    let failed = records
        .iter()
        .filter(|r| r.bounds.corollary.status == BoundStatus::Violated)
        .count();
    outcome(
        applicable > 0 && failed == 0,
        format!("{applicable} instances within the outcome budget, {failed} did not equilibrate"),
    )
}

fn multi_measurement() -> Outcome {
    let eps = 0.2;
    let mut summary = Vec::new();
    let mut pass = true;
    for k in [2usize, 3, 5] {
        let (mut premise, mut failures) = (0, 0);
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(3000 + 100 * k as u64 + seed);
            let d = rng.random_range(4..=16);
            let h = random_hamiltonian(d, SpectrumFamily::Uniform, &mut rng).unwrap();
            let rho = random_pure_state(d, &mut rng).unwrap();
            let strength = eps / (2.0 * k as f64);
            let probes: Vec<_> = (0..k)
                .map(|_| {
                    let povm = near_identity_povm(d, 3, strength, &mut rng).unwrap();
                    (
                        quantum_probe(&rho, &h, &povm).unwrap(),
                        equilibrium_distribution(&rho, &h, &povm).unwrap(),
                    )
                })
                .collect();
            let refs: Vec<&dyn TrajectoryProbe> = probes
                .iter()
                .map(|(p, _)| p as &dyn TrajectoryProbe)
                .collect();
            let omegas: Vec<_> = probes.iter().map(|(_, o)| o.clone()).collect();
            let cfg = TimeAverageConfig::new(
                h.default_horizon(),
                2000,
                SamplingScheme::StratifiedRandom,
                seed,
            )
            .unwrap();
            let m = multi_average_distinguishability(&refs, Some(&omegas), &cfg).unwrap();
            if m.per_measurement.iter().any(|e| e.mean > eps / k as f64) {
                continue;
            }
            premise += 1;
            if m.max.mean > eps + BOUND_SIGMAS * m.max.standard_error {
                failures += 1;
            }
        }
        pass &= premise >= 10 && failures == 0;
        summary.push(format!("K={k}: {premise} sets, {failures} failures"));
    }
    outcome(pass, summary.join("; "))
}

fn main() -> ExitCode {
    let (quantum, quantum_time) = run(&["quantum_povm", "quantum_projective"]);
    let (pure, _) = run(&[
        "classical_rotation",
        "classical_cat",
        "classical_baker",
        "classical_cat_dominant",
    ]);
    let (ensemble, _) = run(&["classical_ensemble"]);
    let (everything, _) = run(&["quantum_near_identity", "synthetic"]);
    let closed: Vec<RunRecord> = pure
        .iter()
        .filter(|r| r.scenario == "classical-rotation" || r.scenario == "classical-cat")
        .cloned()
        .collect();
    let all: Vec<RunRecord> = [&quantum, &pure, &ensemble, &everything]
        .into_iter()
        .flatten()
        .cloned()
        .collect();

    let results = [
        ("1 qubit benchmark", qubit()),
        (
            "2 quantum bound sweep",
            quantum_sweep(&quantum, quantum_time),
        ),
        ("3 second-moment oracle", second_moment_oracle()),
        ("4 classical closed form", closed_form(&closed)),
        ("5 necessity", necessity(&pure)),
        ("6 sufficiency", sufficiency(&all)),
        ("7 chaotic ensembles", ensembles(&ensemble)),
        ("8 purification", purification()),
        ("9 outcome budget", corollary(&quantum)),
        ("10 multiple measurements", multi_measurement()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
