use anyhow::{bail, Context, Result};
use frictionless_core::cd::{
    cd_cost_metrics, predicted_variance_excess, uniform_grid, work_distribution, HamiltonianPath,
    UcdRoute, WorkMode,
};
use frictionless_core::ermakov::{
    adiabatic_reference, nonadiabatic_energy, solve_ermakov, InitialMoments, SolverSettings,
};
use frictionless_core::media::{thermal_energy, ThermalState};
use frictionless_core::otto::{
    check_bounds, evaluate_cycle, stroke_factors, supremacy_ratios_with,
};
use frictionless_core::sta::{verify_sta, DEFAULT_STA_THRESHOLD};
use rayon::prelude::*;

use crate::config::{
    CdConfig, CdReport, CycleConfig, ProtocolConfig, RouteConfig, StaDesignConfig, StrokeConfig,
};
use crate::output::{Table, Value};

/// Tolerance of the efficiency and friction bounds reported in the `bounds_ok` column.
pub const BOUNDS_TOLERANCE: f64 = 1e-9;

/// A scenario's table plus human-readable diagnostics for stderr. `failure` is set
/// when the run produced output but did not meet its own acceptance check.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub diagnostics: Vec<String>,
    pub failure: Option<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self {
            table,
            diagnostics: Vec::new(),
            failure: None,
        }
    }
}

fn sample_times(tau: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        bail!("samples must be at least 2");
    }
    Ok(uniform_grid(tau, samples - 1))
}

pub fn stroke(cfg: &StrokeConfig, settings: &SolverSettings) -> Result<Table> {
    let protocol = cfg.protocol.build()?;
    let solution = solve_ermakov(&protocol, settings)?;
    let initial = match &cfg.initial {
        Some(init) => {
            let medium = init.medium.build()?;
            let state = ThermalState::new(init.beta, protocol.omega0(), medium)?;
            Some(InitialMoments::thermal(
                thermal_energy(&state),
                protocol.omega0(),
                medium.mass(),
                medium.hbar(),
            ))
        }
        None => None,
    };
    let mut columns = vec!["t", "omega_sq", "b", "bdot", "bddot", "q_star", "b_ad"];
    if initial.is_some() {
        columns.push("energy");
    }
    let mut table = Table::new(columns);
    for t in sample_times(protocol.tau(), cfg.samples)? {
        let p = solution.at(t)?;
        let mut row = vec![
            t.into(),
            protocol.omega_sq(t).into(),
            p.b.into(),
            p.bdot.into(),
            p.bddot.into(),
            solution.q_star(t).ok().into(),
            adiabatic_reference(&protocol, t)
                .ok()
                .map(|(b_ad, _)| b_ad)
                .into(),
        ];
        if let Some(moments) = &initial {
            row.push(nonadiabatic_energy(&solution, t, moments)?.into());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn sta_design(cfg: &StaDesignConfig, settings: &SolverSettings) -> Result<Outcome> {
    let protocol = cfg.protocol()?;
    let solution = solve_ermakov(&protocol, settings)?;
    let mut table = Table::new(["t", "omega_sq", "b", "bdot", "bddot", "q_star"]);
    for t in sample_times(protocol.tau(), cfg.samples)? {
        let p = solution.at(t)?;
        table.push(vec![
            t.into(),
            protocol.omega_sq(t).into(),
            p.b.into(),
            p.bdot.into(),
            p.bddot.into(),
            solution.q_star(t).ok().into(),
        ]);
    }
    let threshold = cfg.threshold.unwrap_or(DEFAULT_STA_THRESHOLD);
    let check = verify_sta(&protocol, settings, threshold)?;
    let line = format!(
        "verification: Q*(tau) = {:.17e}, |Q*(tau) - 1| = {:.3e}, threshold {:.1e}, min omega^2 = {:.6e}: {}",
        check.q_star_final,
        check.friction,
        threshold,
        protocol.min_omega_sq(1001),
        if check.passed { "passed" } else { "FAILED" }
    );
    let failure = (!check.passed).then(|| format!("designed stroke is not friction-free ({line})"));
    Ok(Outcome {
        table,
        diagnostics: vec![line],
        failure,
    })
}

pub const CYCLE_COLUMNS: &[&str] = &[
    "status",
    "omega_cold",
    "omega_hot",
    "beta_cold",
    "beta_hot",
    "compression",
    "tau_compression",
    "expansion",
    "tau_expansion",
    "tau_hot",
    "tau_cold",
    "particles",
    "lambda",
    "H_A",
    "H_B",
    "H_C",
    "H_D",
    "W1",
    "W3",
    "Q2",
    "Q4",
    "Qstar_AB",
    "Qstar_CD",
    "Qstar_sq",
    "eta",
    "power",
    "cycle_time",
    "eta_O",
    "eta_C",
    "eta_CA",
    "eta_sq",
    "eta_nonad_bound",
    "is_engine",
    "adiabatic_engine",
    "bounds_ok",
    "power_ratio",
    "efficiency_ratio",
];

fn cycle_parameters(cfg: &CycleConfig) -> Vec<Value> {
    vec![
        cfg.omega_cold.into(),
        cfg.omega_hot.into(),
        cfg.beta_cold.into(),
        cfg.beta_hot.into(),
        cfg.compression.kind_name().into(),
        cfg.compression.tau().into(),
        cfg.expansion.kind_name().into(),
        cfg.expansion.tau().into(),
        cfg.isochores.hot.into(),
        cfg.isochores.cold.into(),
        cfg.medium.particles.into(),
        cfg.medium.lambda.into(),
    ]
}

fn cycle_results(cfg: &CycleConfig, settings: &SolverSettings) -> Result<Vec<Value>> {
    let spec = cfg.spec()?;
    let factors = stroke_factors(&spec, settings)?;
    let r = evaluate_cycle(&spec, factors)?;
    let bounds = check_bounds(&spec, &r, BOUNDS_TOLERANCE);
    // Ratios are only meaningful when both the many-body and the single-particle
    // cycles are engines; otherwise they are left empty.
    let ratios = supremacy_ratios_with(&spec, factors).ok();
    Ok(vec![
        r.energy_a.into(),
        r.energy_b.into(),
        r.energy_c.into(),
        r.energy_d.into(),
        r.work_compression.into(),
        r.work_expansion.into(),
        r.heat_hot.into(),
        r.heat_cold.into(),
        r.q_star_compression.into(),
        r.q_star_expansion.into(),
        r.q_star_sudden.into(),
        r.efficiency.into(),
        r.power.into(),
        r.cycle_time.into(),
        r.eta_otto.into(),
        r.eta_carnot.into(),
        r.eta_curzon_ahlborn.into(),
        r.eta_sudden.into(),
        r.eta_nonadiabatic_bound.into(),
        r.is_engine.into(),
        r.adiabatic_engine.into(),
        bounds.all_passed().into(),
        ratios.map(|x| x.power_ratio).into(),
        ratios.map(|x| x.efficiency_ratio).into(),
    ])
}

/// One cycle row. Failures are reported in the status column with empty results.
pub fn cycle_row(cfg: &CycleConfig, settings: &SolverSettings) -> Vec<Value> {
    let mut row = vec![Value::Null];
    row.extend(cycle_parameters(cfg));
    match cycle_results(cfg, settings) {
        Ok(results) => {
            row[0] = "ok".into();
            row.extend(results);
        }
        Err(e) => {
            row[0] = format!("error: {e:#}").into();
            row.resize(CYCLE_COLUMNS.len(), Value::Null);
        }
    }
    debug_assert_eq!(row.len(), CYCLE_COLUMNS.len());
    row
}

pub fn cycle(cfg: &CycleConfig, settings: &SolverSettings) -> Result<Table> {
    let row = cycle_row(cfg, settings);
    if let Value::Text(status) = &row[0] {
        if status != "ok" {
            bail!("{}", status.trim_start_matches("error: "));
        }
    }
    let mut table = Table::new(CYCLE_COLUMNS.iter().copied());
    table.push(row);
    Ok(table)
}

pub const STROKE_SUMMARY_COLUMNS: &[&str] = &[
    "status",
    "kind",
    "omega_start",
    "omega_end",
    "tau",
    "q_star_final",
    "friction",
    "b_final",
    "bdot_final",
    "min_omega_sq",
];

/// Terminal diagnostics of one stroke, used by stroke-based sweeps.
pub fn stroke_summary_row(cfg: &ProtocolConfig, settings: &SolverSettings) -> Vec<Value> {
    let (omega_start, omega_end, tau) = cfg.endpoints();
    let mut row = vec![
        Value::Null,
        cfg.kind_name().into(),
        omega_start.into(),
        omega_end.into(),
        tau.into(),
    ];
    let results = (|| -> Result<Vec<Value>> {
        let protocol = cfg.build()?;
        let check = verify_sta(&protocol, settings, DEFAULT_STA_THRESHOLD)?;
        Ok(vec![
            check.q_star_final.into(),
            check.friction.into(),
            check.b_final.into(),
            check.bdot_final.into(),
            protocol.min_omega_sq(1001).into(),
        ])
    })();
    match results {
        Ok(values) => {
            row[0] = "ok".into();
            row.extend(values);
        }
        Err(e) => {
            row[0] = format!("error: {e:#}").into();
            row.resize(STROKE_SUMMARY_COLUMNS.len(), Value::Null);
        }
    }
    row
}

fn route(cfg: &CdConfig) -> UcdRoute {
    match cfg.route {
        RouteConfig::Construction => UcdRoute::Construction { steps: cfg.steps },
        RouteConfig::Tdse => UcdRoute::Tdse { steps: cfg.steps },
    }
}

/// Cumulative trapezoid of √(‖H₁‖²) over the sample times.
fn cumulative_norm(times: &[f64], hs_norm_sq: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        if k > 0 {
            let (a, b) = (
                hs_norm_sq[k - 1].max(0.0).sqrt(),
                hs_norm_sq[k].max(0.0).sqrt(),
            );
            acc += 0.5 * (times[k] - times[k - 1]) * (a + b);
        }
        out.push(acc);
    }
    out
}

/// Runs per-time CD work. Must be called inside the rayon pool chosen by the caller.
pub fn cd(cfg: &CdConfig) -> Result<Table> {
    let path = cfg.path()?;
    let occupations = cfg.occupations(path.dimension());
    let times = sample_times(path.duration(), cfg.samples)?;
    let route = route(cfg);

    let cost = cd_cost_metrics(&path, &occupations, &times).context("counterdiabatic cost")?;
    let hs: Vec<f64> = cost.samples.iter().map(|s| s.hs_norm_sq).collect();
    let integral = cumulative_norm(&times, &hs);

    if cfg.report == CdReport::Cost {
        let mut table = Table::new(["t", "hs_norm_sq", "variance", "norm_integral"]);
        for (s, i) in cost.samples.iter().zip(&integral) {
            table.push(vec![
                s.time.into(),
                s.hs_norm_sq.into(),
                s.variance.into(),
                (*i).into(),
            ]);
        }
        return Ok(table);
    }

    let distributions = times
        .par_iter()
        .map(|&t| -> Result<_> {
            let with_cd =
                work_distribution(&path, &occupations, t, WorkMode::Counterdiabatic, route)?;
            let adiabatic = work_distribution(&path, &occupations, t, WorkMode::Adiabatic, route)?;
            let predicted = predicted_variance_excess(&path, &occupations, t)?;
            Ok((with_cd, adiabatic, predicted))
        })
        .collect::<Result<Vec<_>>>()
        .context("work statistics")?;

    if cfg.report == CdReport::Work {
        let mut table = Table::new(["t", "mode", "initial_level", "final_level", "W", "p"]);
        for (t, (with_cd, adiabatic, _)) in times.iter().zip(&distributions) {
            for (mode, dist) in [("cd", with_cd), ("adiabatic", adiabatic)] {
                for p in &dist.points {
                    table.push(vec![
                        (*t).into(),
                        mode.into(),
                        p.initial_level.into(),
                        p.final_level.into(),
                        p.work.into(),
                        p.probability.into(),
                    ]);
                }
            }
        }
        return Ok(table);
    }

    let mut table = Table::new([
        "t",
        "mean_cd",
        "mean_ad",
        "var_cd",
        "var_ad",
        "excess",
        "predicted",
        "hs_norm_sq",
        "variance",
        "norm_integral",
    ]);
    for (k, (with_cd, adiabatic, predicted)) in distributions.iter().enumerate() {
        let (var_cd, var_ad) = (with_cd.variance(), adiabatic.variance());
        table.push(vec![
            times[k].into(),
            with_cd.mean().into(),
            adiabatic.mean().into(),
            var_cd.into(),
            var_ad.into(),
            (var_cd - var_ad).into(),
            (*predicted).into(),
            cost.samples[k].hs_norm_sq.into(),
            cost.samples[k].variance.into(),
            integral[k].into(),
        ]);
    }
    Ok(table)
}
