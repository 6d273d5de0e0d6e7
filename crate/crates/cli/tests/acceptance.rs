//! End-to-end acceptance checks. Runs as a plain binary so each criterion prints
//! one visible PASS/FAIL line; the process fails if any criterion fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use frictionless::{run, RunConfig, Scenario, Value};
use frictionless_core::cd::{
    cd_cost_metrics, counterdiabatic_hamiltonian, evolve_tdse, geometric_tensor,
    predicted_variance_excess, spectral_frame, AffinePath, CMatrix, HamiltonianPath, Ramp,
    Schedule, UcdRoute, WorkMode,
};
use frictionless_core::ermakov::{q_star_sudden, solve_ermakov, FrequencyProtocol, SolverSettings};
use frictionless_core::media::{cs_oracle, cs_partition_function, oracle_cutoff, MediumSpec};
use frictionless_core::otto::{check_bounds, run_cycle, CycleSpec};
use frictionless_core::sta::{sta_stroke, verify_sta};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, Box<dyn Fn() -> Check>);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sta_stroke_is_friction_free() -> Check {
    let settings = SolverSettings::with_steps(20_000);
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for tau in [3.0, 10.0, 30.0] {
        let protocol = sta_stroke(1.0, 0.5, tau).map_err(|e| e.to_string())?;
        let check = verify_sta(&protocol, &settings, 1e-6).map_err(|e| e.to_string())?;
        let b_tau = check.b_final;
        if (b_tau - 2f64.sqrt()).abs() > 1e-6 {
            return Err(format!("tau={tau}: b(tau)={b_tau}, expected sqrt(2)"));
        }
        worst = worst.max(check.friction);
        write!(
            detail,
            "tau={tau}: |Q*-1|={:.1e}, |b-sqrt2|={:.1e}; ",
            check.friction,
            (b_tau - 2f64.sqrt()).abs()
        )
        .unwrap();
    }
    ensure(worst <= 1e-6, detail.trim_end_matches("; ").to_owned())
}

fn sudden_quench_matches_closed_form() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let w0 = rng.random_range(0.2..5.0);
        let w1 = rng.random_range(0.2..5.0);
        let tau = rng.random_range(0.5..10.0);
        let protocol = FrequencyProtocol::sudden_quench(w0, w1, tau).map_err(|e| e.to_string())?;
        let solution = solve_ermakov(&protocol, &SolverSettings::with_steps(20_000))
            .map_err(|e| e.to_string())?;
        let expected = (w0 * w0 + w1 * w1) / (2.0 * w0 * w1);
        let closed = q_star_sudden(w0, w1).map_err(|e| e.to_string())?;
        worst = worst.max((closed - expected).abs());
        for k in 1..=1000 {
            let t = tau * k as f64 / 1000.0;
            let q = solution.q_star(t).map_err(|e| e.to_string())?;
            worst = worst.max((q - expected).abs());
        }
    }
    ensure(
        worst <= 1e-8,
        format!("20 pairs x 1000 times, max |Q*-Q*_sq| = {worst:.2e}"),
    )
}

fn random_monotonic_cycle(rng: &mut ChaCha8Rng) -> Option<CycleSpec> {
    let w1 = rng.random_range(0.3..2.0);
    let w2 = w1 * rng.random_range(1.1..3.0);
    let bh = rng.random_range(0.1..2.0);
    // Engine regime: the cold bath must be cold enough that even a sudden cycle
    // takes heat from the hot bath.
    let bc = bh * (w2 / w1) * rng.random_range(1.5..4.0);
    let mut stroke = |a: f64, b: f64| {
        let tau = rng.random_range(0.05..8.0);
        match rng.random_range(0..3) {
            0 => FrequencyProtocol::linear_ramp(a, b, tau),
            1 => FrequencyProtocol::smooth_ramp(a, b, tau),
            _ => FrequencyProtocol::sudden_quench(a, b, tau),
        }
        .ok()
    };
    let compression = stroke(w1, w2)?;
    let expansion = stroke(w2, w1)?;
    let medium =
        MediumSpec::calogero_sutherland(rng.random_range(1..5), rng.random_range(0.0..2.0)).ok()?;
    CycleSpec::new(w1, w2, bc, bh, compression, expansion, medium).ok()
}

fn bound_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let settings = SolverSettings::with_steps(4000);
    let (mut checked, mut skipped) = (0, 0);
    while checked < 200 {
        let Some(spec) = random_monotonic_cycle(&mut rng) else {
            skipped += 1;
            continue;
        };
        let sudden_spec = CycleSpec::new(
            spec.omega_cold(),
            spec.omega_hot(),
            spec.beta_cold(),
            spec.beta_hot(),
            FrequencyProtocol::sudden_quench(spec.omega_cold(), spec.omega_hot(), 1.0).unwrap(),
            FrequencyProtocol::sudden_quench(spec.omega_hot(), spec.omega_cold(), 1.0).unwrap(),
            *spec.medium(),
        )
        .unwrap();
        let sudden = run_cycle(&sudden_spec, &settings).map_err(|e| e.to_string())?;
        if sudden.heat_hot.is_nan() || sudden.heat_hot <= 0.0 {
            skipped += 1;
            continue;
        }
        let report = run_cycle(&spec, &settings).map_err(|e| e.to_string())?;
        let bounds = check_bounds(&spec, &report, 1e-9);
        if !bounds.all_passed() || report.first_law_residual() != 0.0 {
            return Err(format!(
                "cycle {checked} violates a bound: {bounds:?}; {report:?}"
            ));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} cycles pass all bounds ({skipped} draws outside the engine regime redrawn)"
    ))
}

fn cycle_from_cli(config: &str) -> Result<Vec<(String, Value)>, String> {
    let cfg = RunConfig::parse(config).map_err(|e| format!("{e:#}"))?;
    let outcome = run(Scenario::Cycle, &cfg, 1).map_err(|e| format!("{e:#}"))?;
    let table = outcome.table;
    Ok(table
        .columns
        .iter()
        .cloned()
        .zip(table.rows[0].iter().cloned())
        .collect())
}

fn field(row: &[(String, Value)], name: &str) -> f64 {
    match row.iter().find(|(k, _)| k == name).map(|(_, v)| v) {
        Some(Value::Float(x)) => *x,
        other => panic!("column {name} missing or not a number: {other:?}"),
    }
}

fn efficiency_at_finite_power() -> Check {
    let mut detail = String::new();
    let mut ok = true;
    for (label, medium) in [
        ("single oscillator", r#"{"model": "single_oscillator"}"#),
        (
            "N=4, lambda=0",
            r#"{"model": "calogero_sutherland", "particles": 4, "lambda": 0}"#,
        ),
    ] {
        let config = format!(
            r#"{{"solver": {{"steps": 20000}}, "cycle": {{"omega_cold": 1, "omega_hot": 2,
                "beta_cold": 2, "beta_hot": 0.5,
                "compression": {{"kind": "sta", "tau": 20}}, "expansion": {{"kind": "sta", "tau": 20}},
                "medium": {medium}}}}}"#
        );
        let row = cycle_from_cli(&config)?;
        let (eta, eta_o, power) = (
            field(&row, "eta"),
            field(&row, "eta_O"),
            field(&row, "power"),
        );
        ok &= (eta - eta_o).abs() <= 1e-6 && power > 0.0 && eta_o == 0.5;
        write!(
            detail,
            "{label}: eta={eta:.12}, eta_O={eta_o}, P={power:.6}; "
        )
        .unwrap();
    }
    ensure(ok, detail.trim_end_matches("; ").to_owned())
}

fn calogero_sutherland_thermodynamics() -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for n in [2, 3, 4] {
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            for x in [0.2, 1.0, 5.0] {
                let n_max = oracle_cutoff(n, x, 1.0, 1.0);
                let oracle = cs_oracle(n, lambda, x, 1.0, 1.0, n_max).map_err(|e| e.to_string())?;
                if !oracle.truncation_ok {
                    return Err(format!("oracle truncation too coarse at N={n}, x={x}"));
                }
                let recursion = cs_partition_function(n, lambda, x, 1.0, 1.0).energy;
                worst = worst.max(rel(recursion, oracle.energy));

                let nf = n as f64;
                let shift = lambda * nf * (nf - 1.0) / 2.0;
                let bosons = cs_partition_function(n, 0.0, x, 1.0, 1.0).energy;
                worst_shift = worst_shift.max(((recursion - bosons) - shift).abs() / recursion);
            }
        }
    }
    ensure(
        worst <= 1e-10 && worst_shift <= 1e-12,
        format!("max relative recursion/oracle mismatch {worst:.2e}; lambda-shift residual {worst_shift:.1e}"),
    )
}

fn supremacy_sweep(jobs: usize) -> Check {
    let cfg = RunConfig::load(&configs_dir().join("acceptance-sweep.json"))
        .map_err(|e| format!("{e:#}"))?;
    let table = run(Scenario::Sweep, &cfg, jobs)
        .map_err(|e| format!("{e:#}"))?
        .table;
    if table.rows.len() != 125 {
        return Err(format!("expected 125 rows, got {}", table.rows.len()));
    }
    let col = |name: &str| table.column_index(name).unwrap();
    let (pr, er) = (col("power_ratio"), col("efficiency_ratio"));
    let mut hits = table
        .rows
        .iter()
        .filter_map(|row| match (&row[pr], &row[er]) {
            (Value::Float(p), Value::Float(e)) if *p > 1.0 && *e > 1.0 => Some((row, *p, *e)),
            _ => None,
        });
    let count = hits.clone().count();
    match hits.next() {
        Some((row, p, e)) => {
            let get = |name: &str| match &row[col(name)] {
                Value::Float(x) => *x,
                _ => f64::NAN,
            };
            Ok(format!(
                "{count}/125 points with both ratios > 1; first at beta_cold={}, beta_hot={}, tau={}: power ratio {p:.4}, efficiency ratio {e:.4}",
                get("beta_cold"),
                get("beta_hot"),
                get("tau_compression"),
            ))
        }
        None => Err("no sweep point with both ratios above 1".into()),
    }
}

fn cd_qubit_suite() -> Check {
    let tau = 5.0;
    let path = AffinePath::qubit_sweep(1.0, -4.0, 4.0, tau, Ramp::Smooth, 1.0)
        .map_err(|e| e.to_string())?;
    let occupations = [0.8, 0.2];
    let err = |e: frictionless_core::cd::CdError| e.to_string();

    // (a) H + H₁ carries the instantaneous ground state to the final one.
    let start = spectral_frame(&path.hamiltonian(0.0), 0.0, None).map_err(err)?;
    let end = spectral_frame(&path.hamiltonian(tau), tau, None).map_err(err)?;
    let traj = evolve_tdse(
        |t| counterdiabatic_hamiltonian(&path, t),
        &start.state(0),
        tau,
        4000,
        1.0,
    )
    .map_err(err)?;
    let fidelity = end.state(0).dotc(traj.final_state()).norm_sqr();

    // (b), (c) Mean work equality and variance excess at 50 interior times, with
    // U_CD assembled from the adiabatic states.
    let route = UcdRoute::Construction { steps: 2000 };
    let (mut mean_gap, mut var_rel): (f64, f64) = (0.0, 0.0);
    for k in 1..=50 {
        let t = tau * k as f64 / 51.0;
        let cd = frictionless_core::cd::work_distribution(
            &path,
            &occupations,
            t,
            WorkMode::Counterdiabatic,
            route,
        )
        .map_err(err)?;
        let ad = frictionless_core::cd::work_distribution(
            &path,
            &occupations,
            t,
            WorkMode::Adiabatic,
            route,
        )
        .map_err(err)?;
        mean_gap = mean_gap.max((cd.mean() - ad.mean()).abs());
        let predicted = predicted_variance_excess(&path, &occupations, t).map_err(err)?;
        var_rel = var_rel.max(rel(cd.variance() - ad.variance(), predicted));
    }

    // (d) Terminal transition probabilities, with U_CD from direct propagation.
    let route = UcdRoute::Tdse { steps: 4000 };
    let cd = frictionless_core::cd::work_distribution(
        &path,
        &occupations,
        tau,
        WorkMode::Counterdiabatic,
        route,
    )
    .map_err(err)?;
    let ad = frictionless_core::cd::work_distribution(
        &path,
        &occupations,
        tau,
        WorkMode::Adiabatic,
        route,
    )
    .map_err(err)?;
    let p_gap = cd
        .points
        .iter()
        .zip(&ad.points)
        .map(|(a, b)| (a.probability - b.probability).abs())
        .fold(0.0, f64::max);

    // (e) Doubling the duration quarters both cost measures at matching fractions of the path.
    let slow = path.with_duration(2.0 * tau).map_err(err)?;
    let fractions: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    let fast_times: Vec<f64> = fractions.iter().map(|s| s * tau).collect();
    let slow_times: Vec<f64> = fractions.iter().map(|s| s * 2.0 * tau).collect();
    let fast = cd_cost_metrics(&path, &occupations, &fast_times).map_err(err)?;
    let slow = cd_cost_metrics(&slow, &occupations, &slow_times).map_err(err)?;
    let ratio_gap = fast
        .samples
        .iter()
        .zip(&slow.samples)
        .map(|(f, s)| {
            ((f.hs_norm_sq / s.hs_norm_sq) - 4.0)
                .abs()
                .max((f.variance / s.variance - 4.0).abs())
        })
        .fold(0.0, f64::max);

    let detail = format!(
        "(a) 1-F={:.1e}; (b) max|dW|={mean_gap:.1e}; (c) max rel var excess error {var_rel:.1e}; (d) max|dP|={p_gap:.1e}; (e) max|ratio-4|={ratio_gap:.1e}",
        1.0 - fidelity
    );
    ensure(
        fidelity >= 1.0 - 1e-8
            && mean_gap <= 1e-8
            && var_rel <= 1e-6
            && p_gap <= 1e-8
            && ratio_gap <= 1e-6,
        detail,
    )
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(scale * rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..d {
            let z =
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// χ along `direction` from the overlap definition: the infidelity between the
/// eigenstate at λ and at λ ± δ·direction, divided by δ², averaged over both signs.
/// The infidelity 1 − |⟨n|n'⟩|² is evaluated as ‖(1 − |n⟩⟨n|)|n'⟩‖² to avoid cancellation.
fn overlap_susceptibility(path: &AffinePath, level: usize, at: &[f64], direction: &[f64]) -> f64 {
    let delta = 1e-4;
    let here = spectral_frame(&path.hamiltonian_at(at), 0.0, None)
        .unwrap()
        .state(level);
    let mut acc = 0.0;
    for sign in [1.0, -1.0] {
        let shifted: Vec<f64> = at
            .iter()
            .zip(direction)
            .map(|(a, v)| a + sign * delta * v)
            .collect();
        let there = spectral_frame(&path.hamiltonian_at(&shifted), 0.0, None)
            .unwrap()
            .state(level);
        let overlap = here.dotc(&there);
        acc += (&there - &here * overlap).norm_squared();
    }
    acc / (2.0 * delta * delta)
}

fn geometric_tensor_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    while points < 20 {
        let (path, params) = if points % 2 == 0 {
            let delta = rng.random_range(0.3..2.0);
            let path = AffinePath::qubit_sweep(delta, -3.0, 3.0, 1.0, Ramp::Smooth, 1.0).unwrap();
            (path, vec![rng.random_range(-3.0..3.0)])
        } else {
            let offset = random_hermitian(&mut rng, 3, 1.0);
            let generators = vec![
                random_hermitian(&mut rng, 3, 0.7),
                random_hermitian(&mut rng, 3, 0.7),
            ];
            let schedule =
                Schedule::new(vec![0.0, 0.0], vec![1.0, 1.0], 1.0, Ramp::Smooth).unwrap();
            let path = AffinePath::new(offset, generators, schedule, 1.0).unwrap();
            (
                path,
                vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            )
        };
        let energies = spectral_frame(&path.hamiltonian_at(&params), 0.0, None)
            .unwrap()
            .energies()
            .to_vec();
        if energies.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let direction: Vec<f64> = (0..params.len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        for level in 0..path.dimension() {
            let tensor = geometric_tensor(&path, level, &params).map_err(|e| e.to_string())?;
            let chi = tensor.metric_along(&direction);
            worst = worst.max(rel(
                chi,
                overlap_susceptibility(&path, level, &params, &direction),
            ));
        }
        points += 1;
    }
    ensure(
        worst <= 1e-6,
        format!("20 points (10 qubit, 10 three-level), max relative error {worst:.2e}"),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_binary(scenario: &str, config: &Path, out: &Path, jobs: usize) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_frictionless"))
        .args([scenario, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--jobs", &jobs.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!(
            "{scenario} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = Vec::new();
    for scenario in ["stroke", "sta-design", "cycle", "sweep", "cd", "acceptance"] {
        let (name, config) = match scenario {
            "acceptance" => ("sweep", configs_dir().join("acceptance-sweep.json")),
            s => (s, configs_dir().join(format!("{s}.json"))),
        };
        let a = run_binary(name, &config, &dir.path().join(format!("{scenario}-a")), 1)?;
        let b = run_binary(name, &config, &dir.path().join(format!("{scenario}-b")), 8)?;
        let c = run_binary(name, &config, &dir.path().join(format!("{scenario}-c")), 8)?;
        if a != b || b != c {
            return Err(format!("{scenario}: outputs differ between runs"));
        }
        compared.push(format!("{scenario} ({} bytes)", a.len()));
    }
    Ok(format!(
        "byte-identical across --jobs 1/8/8: {}",
        compared.join(", ")
    ))
}

fn main() -> ExitCode {
    let jobs = std::thread::available_parallelism().map_or(2, |n| n.get());
    let criteria: Vec<Criterion> = vec![
        (
            "STA friction-free stroke",
            Duration::from_secs(1),
            Box::new(sta_stroke_is_friction_free),
        ),
        (
            "sudden-quench oracle",
            Duration::from_secs(1),
            Box::new(sudden_quench_matches_closed_form),
        ),
        (
            "efficiency bound suite",
            Duration::from_secs(30),
            Box::new(bound_suite),
        ),
        (
            "maximum efficiency at finite power",
            Duration::from_secs(5),
            Box::new(efficiency_at_finite_power),
        ),
        (
            "Calogero-Sutherland thermodynamics",
            Duration::from_secs(10),
            Box::new(calogero_sutherland_thermodynamics),
        ),
        (
            "many-particle supremacy sweep",
            Duration::from_secs(120),
            Box::new(move || supremacy_sweep(jobs)),
        ),
        (
            "counterdiabatic qubit suite",
            Duration::from_secs(30),
            Box::new(cd_qubit_suite),
        ),
        (
            "geometric tensor oracle",
            Duration::from_secs(5),
            Box::new(geometric_tensor_oracle),
        ),
        (
            "determinism",
            Duration::from_secs(120),
            Box::new(determinism),
        ),
    ];
    let mut failures = 0;
    for (index, (name, budget, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = check();
        let elapsed = started.elapsed();
        let (verdict, detail) = match result {
            Ok(detail) if elapsed <= *budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the {budget:?} budget")),
            Err(detail) => ("FAIL", detail),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {}: {verdict} {name} [{:.2} s] {detail}",
            index + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
