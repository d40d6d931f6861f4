use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use serde_json::json;

use super::config::{need, Settings};
use super::{CommandKind, Report};
use crate::dynamics::{Simulation, SteadyConfig, SteadyRun, SteadyState};
use crate::error::{invalid, Error, Result};
use crate::graph::io::{write_edge_list, write_node_table};
use crate::graph::{AcceptanceProfile, DiskParams, GeneratorKind, GeneratorSpec};
use crate::observables::phase::{
    estimate_crossing, estimate_threshold, is_monotone, sweep_phase_diagram, write_phase_csv, PhaseTemplate,
};
use crate::observables::stats::{mean_stderr, power_law_cutoff_fit};
use crate::observables::{write_ell_csv, LengthHistogram, SizeDistribution};
use crate::output::{fmt_sig9, write_csv, write_json};
use crate::replicas::run_replicas;
use crate::rng::seeded;
use crate::smoluchowski::{
    critical_alpha_closed_form, predict_removed_length_distribution, predict_removed_lengths, select_tau,
    solve_steady_state, AlphaScaling, SolverConfig,
};

pub(super) fn dispatch(kind: CommandKind, cfg: &Settings, out: &Path) -> Result<Report> {
    std::fs::create_dir_all(out)?;
    match kind {
        CommandKind::Generate => generate(cfg, out),
        CommandKind::Run => run(cfg, out),
        CommandKind::Steady => steady(cfg, out),
        CommandKind::Sweep => sweep(cfg, out),
        CommandKind::Threshold => threshold(cfg, out),
        CommandKind::Solve => solve(cfg, out),
        CommandKind::Predict => predict(cfg, out),
    }
}

fn disk(cfg: &Settings) -> Result<DiskParams> {
    Ok(DiskParams {
        radius_km: need(&cfg.radius_km, "radius_km")?,
        n_photons: need(&cfg.photons, "photons")?,
        profile: AcceptanceProfile::Gaussian { amplitude: need(&cfg.accept_amplitude, "accept_amplitude")? },
    })
}

fn topology(cfg: &Settings, n: usize) -> Result<GeneratorSpec> {
    let kind = need(&cfg.kind, "kind")?;
    Ok(GeneratorSpec {
        kind,
        n,
        mean_degree: cfg.mean_degree,
        disk: if kind == GeneratorKind::Satellite { Some(disk(cfg)?) } else { None },
    })
}

fn steady_run(cfg: &Settings) -> Result<SteadyRun> {
    let n = need(&cfg.n, "n")?;
    Ok(SteadyRun {
        topology: topology(cfg, n)?,
        scheme: need(&cfg.scheme, "scheme")?,
        alpha: need(&cfg.alpha, "alpha")?,
        disk: disk(cfg)?,
        on_reject: need(&cfg.on_reject, "on_reject")?,
        steady: SteadyConfig {
            burn_in: need(&cfg.burn_in, "burn_in")?,
            window: need(&cfg.window, "window")?,
            stationarity_tol: need(&cfg.stationarity_tol, "stationarity_tol")?,
            snapshot_every: need(&cfg.snapshot_every, "snapshot_every")?,
            max_extensions: need(&cfg.max_extensions, "max_extensions")?,
            ell_pairs: Some(need(&cfg.ell_pairs, "ell_pairs")?),
            keep_records: false,
        },
    })
}

/// Burn-in and window scale with each size of a sweep.
fn template(cfg: &Settings) -> Result<PhaseTemplate> {
    let n = need(&cfg.n, "n")? as f64;
    Ok(PhaseTemplate {
        topology: need(&cfg.kind, "kind")?,
        mean_degree: cfg.mean_degree,
        scheme: need(&cfg.scheme, "scheme")?,
        disk: disk(cfg)?,
        on_reject: need(&cfg.on_reject, "on_reject")?,
        burn_in_per_node: need(&cfg.burn_in, "burn_in")? as f64 / n,
        window_per_node: need(&cfg.window, "window")? as f64 / n,
        stationarity_tol: need(&cfg.stationarity_tol, "stationarity_tol")?,
        max_extensions: need(&cfg.max_extensions, "max_extensions")?,
    })
}

fn generate(cfg: &Settings, out: &Path) -> Result<Report> {
    let spec = topology(cfg, need(&cfg.n, "n")?)?;
    let generated = spec.generate(&mut seeded(need(&cfg.seed, "seed")?))?;
    let net = &generated.network;
    write_edge_list(net, BufWriter::new(File::create(out.join("network.edges"))?))?;
    let mut outputs = vec!["network.edges".to_string()];
    if let (Some(pos), Some(p)) = (&generated.positions, &generated.accept_prob) {
        write_node_table(pos, p, BufWriter::new(File::create(out.join("nodes.csv"))?))?;
        outputs.push("nodes.csv".into());
    }
    Ok(Report {
        outputs,
        summary: json!({ "nodes": net.node_count(), "edges": net.edge_count(), "components": net.component_count() }),
        converged: true,
        failures: Vec::new(),
    })
}

struct Trajectory {
    rows: Vec<Vec<String>>,
    dismantled_at: Option<u64>,
    final_eta: f64,
}

fn run(cfg: &Settings, out: &Path) -> Result<Report> {
    let spec = steady_run(cfg)?;
    let steps = need(&cfg.steps, "steps")?;
    let every = need(&cfg.record_every, "record_every")?;
    let results = run_replicas(need(&cfg.replicas, "replicas")?, need(&cfg.seed, "seed")?, |r, mut rng| {
        let (net, scheme) = spec.prepare(&mut rng)?;
        let mut sim = Simulation::new(net, scheme, rng)?;
        let mut traj = Trajectory { rows: Vec::new(), dismantled_at: None, final_eta: 0.0 };
        for i in 1..=steps {
            let rec = sim.step();
            if rec.eta == 0.0 && traj.dismantled_at.is_none() {
                traj.dismantled_at = Some(rec.step);
            }
            let frozen = spec.alpha == 0.0 && sim.network().edge_count() == 0;
            if i % every == 0 || i == steps || frozen {
                traj.rows.push(vec![
                    r.to_string(),
                    rec.step.to_string(),
                    rec.removed_path_length.to_string(),
                    rec.links_added.to_string(),
                    rec.n_components.to_string(),
                    rec.s_max.to_string(),
                    fmt_sig9(rec.eta),
                ]);
            }
            traj.final_eta = rec.eta;
            if frozen {
                break;
            }
        }
        Ok(traj)
    });
    let mut rows = Vec::new();
    let mut per_replica = Vec::new();
    let mut failures = Vec::new();
    for res in results {
        match res {
            Ok(t) => {
                per_replica.push(json!({ "dismantled_at": t.dismantled_at, "final_eta": t.final_eta }));
                rows.extend(t.rows);
            }
            Err(f) => failures.push(format!("replica {}: {}", f.index, f.message)),
        }
    }
    if per_replica.is_empty() {
        return Err(Error::Empty("successful replicas"));
    }
    write_csv(
        out.join("trajectory.csv"),
        "replica,step,removed_length,links_added,n_components,s_max,eta",
        rows,
    )?;
    Ok(Report {
        outputs: vec!["trajectory.csv".into()],
        summary: json!({ "replicas": per_replica }),
        converged: true,
        failures,
    })
}

fn steady(cfg: &Settings, out: &Path) -> Result<Report> {
    let spec = steady_run(cfg)?;
    let results = run_replicas(need(&cfg.replicas, "replicas")?, need(&cfg.seed, "seed")?, |_, rng| spec.run(rng));
    let mut states: Vec<(usize, SteadyState)> = Vec::new();
    let mut failures = Vec::new();
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok(s) => states.push((i, s)),
            Err(f) => failures.push(format!("replica {}: {}", f.index, f.message)),
        }
    }
    if states.is_empty() {
        return Err(Error::Empty("successful replicas"));
    }
    let parts: Vec<SizeDistribution> = states.iter().map(|(_, s)| s.sizes.clone()).collect();
    let vs = SizeDistribution::pool(&parts)?;
    vs.write_csv(out.join("vs.csv"))?;

    let ell: Vec<(usize, f64)> = states.iter().flat_map(|(_, s)| s.ell_samples.iter().copied()).collect();
    write_ell_csv(out.join("ell.csv"), &ell)?;

    let mut counts: Vec<u64> = Vec::new();
    for (_, s) in &states {
        if counts.len() < s.removed_lengths.len() {
            counts.resize(s.removed_lengths.len(), 0);
        }
        for (c, x) in counts.iter_mut().zip(&s.removed_lengths) {
            *c += x;
        }
    }
    let mut outputs = vec!["vs.csv".to_string(), "ell.csv".to_string()];
    let mut mean_removed = None;
    if let Ok(hist) = LengthHistogram::from_counts(counts) {
        hist.write_csv(out.join("pl.csv"))?;
        outputs.push("pl.csv".into());
        mean_removed = Some(hist.mean());
    }
    if let Ok(pred) = predict_removed_length_distribution(&vs, need(&cfg.law, "law")?) {
        pred.write_csv(out.join("pl_theory.csv"))?;
        outputs.push("pl_theory.csv".into());
    }

    write_csv(
        out.join("steady.csv"),
        "replica,eta_mean,eta_stderr,converged,burn_in_steps,mean_removed_length,mean_links_added",
        states.iter().map(|(i, s)| {
            vec![
                i.to_string(),
                fmt_sig9(s.eta_mean),
                fmt_sig9(s.eta_stderr),
                s.converged.to_string(),
                s.burn_in_steps.to_string(),
                fmt_sig9(s.mean_removed_length),
                fmt_sig9(s.mean_links_added),
            ]
        }),
    )?;
    outputs.push("steady.csv".into());

    let etas: Vec<f64> = states.iter().map(|(_, s)| s.eta_mean).collect();
    let (eta_mean, eta_stderr) = mean_stderr(&etas);
    Ok(Report {
        outputs,
        summary: json!({
            "eta_mean": eta_mean,
            "eta_stderr": eta_stderr,
            "mean_removed_length": mean_removed,
            "all_stationary": states.iter().all(|(_, s)| s.converged),
        }),
        converged: true,
        failures,
    })
}

fn sweep(cfg: &Settings, out: &Path) -> Result<Report> {
    let ns = need(&cfg.ns, "ns")?;
    let mut grid = Vec::new();
    for &n in &ns {
        match &cfg.alphas {
            Some(alphas) => grid.extend(alphas.iter().map(|&a| (n, a))),
            None => grid.extend(need(&cfg.x_grid, "x_grid")?.iter().map(|&x| (n, x * (n as f64).sqrt()))),
        }
    }
    let points = sweep_phase_diagram(&grid, &template(cfg)?, need(&cfg.replicas, "replicas")?, need(&cfg.seed, "seed")?)?;
    write_phase_csv(out.join("phase.csv"), &points)?;
    let failed: usize = points.iter().map(|p| p.failures).sum();
    let failures = if failed > 0 { vec![format!("{failed} replica runs failed across the grid")] } else { Vec::new() };
    Ok(Report {
        outputs: vec!["phase.csv".into()],
        summary: json!({
            "cells": points.len(),
            "unconverged_cells": points.iter().filter(|p| !p.converged).count(),
            "monotone_within_2_stderr": is_monotone(&points, 2.0),
        }),
        converged: true,
        failures,
    })
}

fn threshold(cfg: &Settings, out: &Path) -> Result<Report> {
    let n = need(&cfg.n, "n")?;
    let tpl = template(cfg)?;
    let replicas = need(&cfg.replicas, "replicas")?;
    let seed = need(&cfg.seed, "seed")?;
    let est = estimate_threshold(n, &tpl, replicas, seed, need(&cfg.eta_target, "eta_target")?)?;
    write_phase_csv(out.join("phase.csv"), &est.evaluations)?;
    let root = (n as f64).sqrt();
    let mut summary = json!({
        "n": n,
        "eta_target": est.eta_target,
        "alpha_star": est.alpha_star,
        "stderr": est.stderr,
        "alpha_star_over_sqrt_n": est.alpha_star / root,
    });
    write_json(out.join("threshold.json"), &summary)?;
    let mut outputs = vec!["phase.csv".to_string(), "threshold.json".to_string()];
    if let Some(n_large) = cfg.n_large {
        let crossing = estimate_crossing(n, n_large, &need(&cfg.x_grid, "x_grid")?, &tpl, replicas, seed)?;
        let curves: Vec<_> = crossing.small.iter().chain(&crossing.large).cloned().collect();
        write_phase_csv(out.join("crossing.csv"), &curves)?;
        let c = json!({ "n_small": n, "n_large": n_large, "x_star": crossing.x_star, "stderr": crossing.stderr });
        write_json(out.join("crossing.json"), &c)?;
        summary["crossing"] = c;
        outputs.extend(["crossing.csv".into(), "crossing.json".into()]);
    }
    Ok(Report { outputs, summary, converged: true, failures: Vec::new() })
}

fn solver_config(cfg: &Settings) -> Result<SolverConfig> {
    let mut sc = SolverConfig::new(need(&cfg.alpha, "alpha")?, need(&cfg.smax, "smax")?);
    sc.tol = need(&cfg.tol, "tol")?;
    sc.damping = need(&cfg.damping, "damping")?;
    sc.max_iter = need(&cfg.max_iter, "max_iter")?;
    sc.kernel = need(&cfg.kernel, "kernel")?;
    sc.equation = need(&cfg.equation, "equation")?;
    sc.finite_n = cfg.finite_n;
    sc.validate()?;
    Ok(sc)
}

fn solve(cfg: &Settings, out: &Path) -> Result<Report> {
    let state = solve_steady_state(&solver_config(cfg)?)?;
    state.write_csv(out.join("vs_theory.csv"))?;
    // Fit where the solution is resolved, not in the underflowing tail.
    let floor = 1e-8 * state.v[1];
    let hi = (1..=state.s_max).rev().find(|&s| state.v[s] >= floor).unwrap_or(1);
    let sizes: Vec<f64> = (1..=hi).map(|s| s as f64).collect();
    let fit = power_law_cutoff_fit(&sizes, &state.v[1..=hi]);
    let summary = json!({
        "alpha": state.alpha,
        "s_max": state.s_max,
        "residual": state.residual,
        "iterations": state.iterations,
        "converged": state.converged,
        "clipped": state.clipped,
        "mass": state.mass(),
        "tau_fit": fit.map(|f| f.tau),
        "cutoff_fit": fit.map(|f| f.cutoff),
    });
    write_json(out.join("solve.json"), &summary)?;
    Ok(Report {
        outputs: vec!["vs_theory.csv".into(), "solve.json".into()],
        summary,
        converged: state.converged,
        failures: Vec::new(),
    })
}

fn predict(cfg: &Settings, out: &Path) -> Result<Report> {
    let tau = need(&cfg.tau, "tau")?;
    let s_max = need(&cfg.smax, "smax")?;
    let report = critical_alpha_closed_form(tau, s_max as u64)?;
    let root = (s_max as f64).sqrt();
    let summary = json!({
        "tau": report.tau,
        "s_max": report.s_max,
        "k_exact": report.k_exact,
        "k_asym": report.k_asym,
        "alpha_star_exact": report.alpha_star_exact,
        "alpha_star_asym": report.alpha_star_asym,
        "alpha_star_balance": report.alpha_star_balance,
        "alpha_star_asym_over_sqrt_smax": report.alpha_star_asym / root,
        "balance_to_moment_ratio": report.balance_to_moment_ratio(),
        "tau_constant_alpha": select_tau(AlphaScaling::Constant),
        "tau_sqrt_n_alpha": select_tau(AlphaScaling::SqrtN),
    });
    write_json(out.join("moments.json"), &summary)?;
    let mut outputs = vec!["moments.json".to_string()];
    if let Some(path) = &cfg.vs {
        let v = read_size_table(path)?;
        predict_removed_lengths(&v, need(&cfg.law, "law")?)?.write_csv(out.join("pl_theory.csv"))?;
        outputs.push("pl_theory.csv".into());
    }
    Ok(Report { outputs, summary, converged: true, failures: Vec::new() })
}

/// `v` indexed by size from a table with `s` and `v` columns.
fn read_size_table(path: &Path) -> Result<Vec<f64>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().ok_or(Error::Empty("size table"))??;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("missing column '{name}'") })
    };
    let (s_col, v_col) = (col("s")?, col("v")?);
    let mut v = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse_err = |msg: String| Error::Parse { line: i + 2, msg };
        let get = |c: usize| fields.get(c).copied().ok_or_else(|| parse_err("short row".into()));
        let s: usize = get(s_col)?.parse().map_err(|e| parse_err(format!("{e}")))?;
        let x: f64 = get(v_col)?.parse().map_err(|e| parse_err(format!("{e}")))?;
        if s == 0 || !(x >= 0.0) {
            return Err(invalid(format!("line {}: bad entry s={s}, v={x}", i + 2)));
        }
        if v.len() <= s {
            v.resize(s + 1, 0.0);
        }
        v[s] = x;
    }
    Ok(v)
}
