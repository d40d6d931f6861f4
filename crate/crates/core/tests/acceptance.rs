//! Acceptance suite: one PASS/FAIL line per criterion, then a non-zero exit
//! if any failed. `PATHPERC_ACCEPTANCE=3,8` runs a subset.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use pathperc::dynamics::{RejectPolicy, Scheme, Simulation, SteadyRun, SteadyState};
use pathperc::graph::{generate_ust, GeneratorKind, GeneratorSpec, PathSample, PathSampler};
use pathperc::observables::stats::{binned_cutoff_fit, ks_discrete, log_binned, log_log_slope, mean_stderr};
use pathperc::observables::{ell_by_size, LengthHistogram, SizeDistribution};
use pathperc::observables::phase::{estimate_crossing, PhaseTemplate};
use pathperc::replicas::run_replicas;
use pathperc::rng::{derive_seed, seeded};
use pathperc::smoluchowski::{
    critical_alpha_closed_form, mean_fragment_count, predict_removed_length_distribution, prefactor_ratio,
    rayleigh_cdf, select_tau, solve_steady_state, AlphaScaling, Equation, KernelMode, PathLengthLaw, SolverConfig,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn steady_states(run: &SteadyRun, replicas: usize, seed: u64) -> Vec<SteadyState> {
    run_replicas(replicas, seed, |_, rng| run.run(rng))
        .into_iter()
        .map(|r| r.expect("steady-state replica"))
        .collect()
}

fn ust_run(n: usize, alpha: f64) -> SteadyRun {
    SteadyRun::cross_linking(GeneratorSpec::new(GeneratorKind::Ust, n), alpha)
}

fn pooled(states: &[SteadyState]) -> SizeDistribution {
    let parts: Vec<SizeDistribution> = states.iter().map(|s| s.sizes.clone()).collect();
    SizeDistribution::pool(&parts).unwrap()
}

fn etas(states: &[SteadyState]) -> (f64, f64) {
    mean_stderr(&states.iter().map(|s| s.eta_mean).collect::<Vec<_>>())
}

fn uniform_pair<R: Rng>(n: usize, rng: &mut R) -> (usize, usize) {
    let u = rng.random_range(0..n);
    let mut v = rng.random_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    (u, v)
}

/// Tail exponent of a size distribution: cutoff fit on log bins over
/// sizes `2..=N/10`, away from singletons and from the giant component.
fn tail_exponent(values: &[f64], n: usize) -> Option<f64> {
    binned_cutoff_fit(values, 2, n / 10, 1.5).map(|f| f.tau)
}

fn c1_ust_geometry() -> Outcome {
    let (n, reps) = (1000, 1000);
    let mut distances = Vec::with_capacity(reps);
    let mut splits = Vec::with_capacity(reps);
    let mut sampler = PathSampler::new(n);
    for r in 0..reps {
        let mut rng = seeded(derive_seed(101, r as u64));
        let mut net = generate_ust(n, &mut rng);
        let (u, v) = uniform_pair(n, &mut rng);
        let path = sampler.sample(&net, u, v, &mut rng).unwrap();
        distances.push(path.length());
        splits.push(net.remove_path(&path).unwrap() as f64);
    }
    let ks = ks_discrete(&distances, |k| rayleigh_cdf(k as f64 + 0.5, n as f64));
    let (mean, se) = mean_stderr(&splits);
    let target = mean_fragment_count(n as f64);
    outcome(
        ks.passes(0.01) && (mean - target).abs() <= 1.5,
        format!(
            "KS D={:.4} p={:.3} (n={}); mean splits {mean:.2} ± {se:.2} vs {target:.2} ± 1.5",
            ks.statistic, ks.p_value, ks.n
        ),
    )
}

fn c2_fragment_tail() -> Outcome {
    let (n, reps) = (10_000, 1000);
    let mut per_fragmentation = vec![0.0; n + 1];
    let mut sampler = PathSampler::new(n);
    for r in 0..reps {
        let mut rng = seeded(derive_seed(202, r as u64));
        let mut net = generate_ust(n, &mut rng);
        let (u, v) = uniform_pair(n, &mut rng);
        let path = sampler.sample(&net, u, v, &mut rng).unwrap();
        let fragments = net.remove_path(&path).unwrap();
        assert_eq!(fragments, path.length() + 1);
        for s in net.component_sizes() {
            per_fragmentation[s] += 1.0 / (fragments as f64 * reps as f64);
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        log_binned(&per_fragmentation, n / 10, 1.5).into_iter().filter(|p| p.1 > 0.0).unzip();
    let fit = log_log_slope(&xs, &ys).unwrap();
    let decades = (xs.last().unwrap() / xs[0]).log10();
    outcome(
        (fit.slope + 1.5).abs() <= 0.15 && decades >= 2.0,
        format!("slope {:.3} ± {:.3} over {decades:.1} decades (N={n}, {reps} removals)", fit.slope, fit.slope_stderr),
    )
}

/// First step at which availability falls to `level` or below.
fn first_passage(spec: GeneratorSpec, seed: u64, level: f64, max_steps: u64) -> (Option<u64>, f64) {
    let run = SteadyRun::cross_linking(spec, 0.0);
    let mut rng = seeded(seed);
    let (net, cfg) = run.prepare(&mut rng).unwrap();
    let mut sim = Simulation::new(net, cfg, rng).unwrap();
    let mut eta_after_first = f64::NAN;
    for _ in 0..max_steps {
        let rec = sim.step();
        if rec.step == 1 {
            eta_after_first = rec.eta;
        }
        if rec.eta <= level {
            return (Some(rec.step), eta_after_first);
        }
    }
    (None, eta_after_first)
}

fn c3_dismantling() -> Outcome {
    let reps = 10;
    let mut pass = true;
    let mut notes = Vec::new();

    let n = 30u64;
    let times: Vec<Option<u64>> =
        (0..reps).map(|r| first_passage(GeneratorSpec::new(GeneratorKind::Complete, 30), derive_seed(303, r), 0.0, n * n * 4).0).collect();
    let ok = times.iter().all(|t| t.is_some_and(|t| (n * n / 4..=n * n).contains(&t)));
    pass &= ok;
    let ts: Vec<u64> = times.iter().map(|t| t.unwrap_or(0)).collect();
    notes.push(format!("K30 dismantled at {}..{}", ts.iter().min().unwrap(), ts.iter().max().unwrap()));

    let n = 1000;
    let mut er = GeneratorSpec::new(GeneratorKind::Er, n);
    er.mean_degree = Some(2.0);
    for (name, spec) in [
        ("ER", er),
        ("UST", GeneratorSpec::new(GeneratorKind::Ust, n)),
        ("honeycomb", GeneratorSpec::new(GeneratorKind::Honeycomb, n)),
    ] {
        let mut worst = 0;
        let mut first_eta = 0.0f64;
        for r in 0..reps {
            let (t, e1) = first_passage(spec.clone(), derive_seed(304, r), 0.05, n as u64);
            match t {
                Some(t) => worst = worst.max(t),
                None => pass = false,
            }
            first_eta = first_eta.max(e1);
        }
        if name == "UST" {
            let bound = 1.0 - 1.0 / (n as f64).sqrt();
            pass &= first_eta < bound;
            notes.push(format!("UST eta after step 1 <= {first_eta:.3} (< {bound:.3})"));
        }
        notes.push(format!("{name} eta<0.05 by step {worst}"));
    }
    outcome(pass, notes.join("; "))
}

fn c4_forest_invariant() -> Outcome {
    let n = 1000;
    let steps = 100_000u64;
    let mut violations = 0u64;
    let mut checked = 0u64;
    for (i, alpha) in [(0u64, 10.0), (1, 20.0)] {
        let mut rng = seeded(derive_seed(404, i));
        let mut net = generate_ust(n, &mut rng);
        if i == 1 {
            // A forest rather than a tree: cut 200 random edges.
            for _ in 0..200 {
                let edges: Vec<(usize, usize)> = net.edges().collect();
                let (u, v) = edges[rng.random_range(0..edges.len())];
                net.remove_path(&PathSample::new(vec![u, v])).unwrap();
            }
        }
        let run = ust_run(n, alpha);
        let (_, cfg) = run.prepare(&mut seeded(0)).unwrap();
        let mut sim = Simulation::new(net, cfg, rng).unwrap();
        for _ in 0..steps {
            let rec = sim.step();
            checked += 1;
            if sim.network().edge_count() + rec.n_components != n {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {checked} steps (two initial forests)"))
}

fn c5_initial_condition() -> Outcome {
    let (n, alpha, reps) = (1000, 10.0, 40);
    let ust = steady_states(&ust_run(n, alpha), reps, 505);
    let mut er_run = ust_run(n, alpha);
    er_run.topology = GeneratorSpec { kind: GeneratorKind::Er, n, mean_degree: Some(2.0), disk: None };
    let er = steady_states(&er_run, reps, 506);
    let ((eu, su), (ee, se)) = (etas(&ust), etas(&er));
    let eta_z = (eu - ee).abs() / (su * su + se * se).sqrt();
    let (vu, ve) = (pooled(&ust), pooled(&er));
    let (mut worst, mut bins, mut beyond) = (0.0f64, 0, 0);
    for s in 1..=vu.max_size().max(ve.max_size()) {
        let sd = (vu.stderr(s).powi(2) + ve.stderr(s).powi(2)).sqrt();
        if sd > 0.0 {
            let z = (vu.v(s) - ve.v(s)).abs() / sd;
            bins += 1;
            beyond += usize::from(z > 3.0);
            worst = worst.max(z);
        }
    }
    outcome(
        eta_z <= 3.0 && worst <= 3.0,
        format!("eta {eu:.4} vs {ee:.4} (z={eta_z:.2}); v(s) worst z={worst:.2}, {beyond} of {bins} bins beyond 3"),
    )
}

fn c6_path_length_scaling() -> Outcome {
    let (n, alpha, reps) = (1000, 10.0, 20);
    let mut run = ust_run(n, alpha);
    run.steady.ell_pairs = Some(100);
    let states = steady_states(&run, reps, 606);
    let samples: Vec<(usize, f64)> = states.iter().flat_map(|s| s.ell_samples.iter().copied()).collect();
    let rows: Vec<(usize, f64, f64)> = ell_by_size(&samples).into_iter().filter(|r| r.0 >= 2).collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = log_log_slope(&xs, &ys).unwrap();
    outcome(
        (fit.slope - 0.5).abs() <= 0.1,
        format!("slope {:.3} ± {:.3} over sizes 2..{}", fit.slope, fit.slope_stderr, rows.last().unwrap().0),
    )
}

fn c7_length_balance() -> Outcome {
    let n = 1000;
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, alpha) in [2.0, 5.0, 10.0].into_iter().enumerate() {
        let states = steady_states(&ust_run(n, alpha), 5, derive_seed(707, i as u64));
        let mut counts = Vec::new();
        for s in &states {
            counts.resize(counts.len().max(s.removed_lengths.len()), 0u64);
            for (c, x) in counts.iter_mut().zip(&s.removed_lengths) {
                *c += x;
            }
        }
        let mean = LengthHistogram::from_counts(counts).unwrap().mean();
        let rel = (mean / alpha - 1.0).abs();
        pass &= rel <= 0.05;
        notes.push(format!("alpha={alpha}: mean length {mean:.3} ({:.2}%)", 100.0 * rel));
    }
    outcome(pass, notes.join("; "))
}

fn c8_down_phase_distribution() -> Outcome {
    let (n, alpha) = (1000, 2.0);
    let vs = pooled(&steady_states(&ust_run(n, alpha), 20, 808));
    let mut cfg = SolverConfig::new(alpha, n);
    cfg.kernel = KernelMode::ExactUst;
    cfg.equation = Equation::Full;
    let sol = solve_steady_state(&cfg).unwrap();
    let sim_tau = tail_exponent(&vs.values(), n).unwrap_or(f64::NAN);
    let sol_tau = tail_exponent(&sol.v, n).unwrap_or(f64::NAN);
    let mut worst = 0.0f64;
    let mut bins = 0;
    for s in 1..=vs.max_size() {
        if vs.stderr(s) > 0.0 {
            bins += 1;
            worst = worst.max((sol.v[s] - vs.v(s)).abs() / vs.stderr(s));
        }
    }
    let slope_ok = (sim_tau - 2.0).abs() <= 0.15 && (sol_tau - 2.0).abs() <= 0.15;
    outcome(
        slope_ok && worst <= 3.0 && sol.converged,
        format!(
            "exponent sim {sim_tau:.3}, solver {sol_tau:.3} (target 2 ± 0.15); solver vs sim worst z={worst:.2} over {bins} bins; solver residual {:.1e}",
            sol.residual
        ),
    )
}

fn c9_near_critical(states: &[SteadyState], n: usize) -> Outcome {
    let vs = pooled(states);
    let tau = tail_exponent(&vs.values(), n).unwrap_or(f64::NAN);
    let (eta, _) = etas(states);
    outcome((tau - 2.25).abs() <= 0.2, format!("exponent {tau:.3} at eta={eta:.3} (target 2.25 ± 0.2)"))
}

fn c10_threshold_scaling() -> Outcome {
    let grid = [0.85, 0.95, 1.05, 1.15, 1.25];
    let est = estimate_crossing(400, 1600, &grid, &PhaseTemplate::default(), 8, 1010).unwrap();
    let curve = |pts: &[pathperc::observables::phase::PhasePoint]| {
        pts.iter().map(|p| format!("{:.3}", p.eta_mean)).collect::<Vec<_>>().join("/")
    };
    outcome(
        (0.93..=1.14).contains(&est.x_star),
        format!(
            "crossing x*={:.3} ± {:.3} (eta400 {} ; eta1600 {})",
            est.x_star,
            est.stderr,
            curve(&est.small),
            curve(&est.large)
        ),
    )
}

fn c11_closed_forms() -> Outcome {
    let s_max = 1_000_000u64;
    let r = critical_alpha_closed_form(2.25, s_max).unwrap();
    let x = r.alpha_star_asym / (s_max as f64).sqrt();
    let ratio = prefactor_ratio();
    let taus = (select_tau(AlphaScaling::Constant).tau, select_tau(AlphaScaling::SqrtN).tau);
    outcome(
        (x - 0.7837).abs() <= 0.0005 && r.k_asym == 0.5 && (ratio - 0.9596).abs() <= 0.0001 && taus == (2.0, 2.25),
        format!("alpha*/sqrt(s_max)={x:.5}, k={}, ratio={ratio:.5}, tau={taus:?}", r.k_asym),
    )
}

fn c12_length_prediction() -> Outcome {
    let (n, alpha) = (1000, 10.0);
    let state = steady_states(&ust_run(n, alpha), 1, 1212).remove(0);
    let hist = state.length_histogram().unwrap();
    let samples = hist.samples();
    let mut notes = Vec::new();
    let mut pass = false;
    for law in [PathLengthLaw::Rayleigh, PathLengthLaw::ExactUst] {
        let pred = predict_removed_length_distribution(&state.sizes, law).unwrap();
        let ks = ks_discrete(&samples, |k| pred.cdf(k));
        if law == PathLengthLaw::Rayleigh {
            pass = ks.passes(0.01);
        }
        notes.push(format!(
            "{law:?}: D={:.4} p={:.2e} mean {:.3} vs {:.3}",
            ks.statistic,
            ks.p_value,
            pred.mean(),
            hist.mean()
        ));
    }
    outcome(pass, format!("{} removals; {}", samples.len(), notes.join("; ")))
}

fn c13_scheme_ordering(cross: &[SteadyState], n: usize, alpha: f64) -> Outcome {
    let reps = cross.len();
    let with = |scheme, policy| {
        let mut run = ust_run(n, alpha);
        run.scheme = scheme;
        run.on_reject = policy;
        etas(&steady_states(&run, reps, 1313)).0
    };
    let (eta_cross, _) = etas(cross);
    let eta_red = with(Scheme::Redundancy, RejectPolicy::Consume);
    let eta_down = with(Scheme::Downlink, RejectPolicy::Resample);
    let eta_down_consume = with(Scheme::Downlink, RejectPolicy::Consume);
    outcome(
        eta_red >= eta_cross + 0.2 && eta_red > 0.9 && eta_down > eta_cross,
        format!(
            "alpha={alpha}: cross-linking {eta_cross:.3}, redundancy {eta_red:.3}, downlink {eta_down:.3} (failed placements retried; {eta_down_consume:.3} when consumed)"
        ),
    )
}

fn c14_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pathperc");
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("generate", vec!["--kind", "ust", "--n", "1000", "--seed", "7"]),
        ("run", vec!["--n", "300", "--alpha", "4", "--steps", "2000", "--replicas", "3", "--seed", "3"]),
        ("steady", vec!["--n", "300", "--alpha", "8", "--replicas", "4", "--seed", "5"]),
        ("sweep", vec!["--ns", "100,400", "--x-grid", "0.5,1.0", "--replicas", "3", "--seed", "9"]),
        ("solve", vec!["--alpha", "2", "--smax", "500"]),
        ("predict", vec!["--tau", "2.25", "--smax", "1000000"]),
    ];
    let mut mismatches = Vec::new();
    let mut files = 0;
    for (cmd, args) in &cases {
        let dirs: Vec<_> = ["a", "b", "c"].iter().map(|d| tmp.path().join(cmd).join(d)).collect();
        for (i, dir) in dirs.iter().enumerate() {
            let mut c = Command::new(bin);
            c.arg(cmd);
            match i {
                0 => c.args(args),
                1 => c.args(args).args(["--workers", "3"]),
                _ => c.arg("--config").arg(dirs[0].join("manifest.json")),
            };
            let status = c.arg("--out").arg(dir).status().unwrap();
            assert!(status.success(), "{cmd} exited with {status}");
        }
        for entry in std::fs::read_dir(&dirs[0]).unwrap() {
            let name = entry.unwrap().file_name();
            if name == "manifest.json" {
                continue;
            }
            files += 1;
            let a = std::fs::read(dirs[0].join(&name)).unwrap();
            for d in &dirs[1..] {
                if std::fs::read(d.join(&name)).ok().as_ref() != Some(&a) {
                    mismatches.push(format!("{cmd}/{}", name.to_string_lossy()));
                }
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{files} output files compared across reruns, worker counts and manifest replays; mismatches {mismatches:?}"),
    )
}

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("PATHPERC_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |k: u32| only.as_ref().is_none_or(|o| o.contains(&k));

    let mut failed = Vec::new();
    let mut report = |k: u32, title: &str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(k) {
            return;
        }
        let t = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {k:>2} {title}: {} [{:.0}s]", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(k);
        }
    };

    report(1, "tree geometry", &mut c1_ust_geometry);
    report(2, "fragment tail", &mut c2_fragment_tail);
    report(3, "dismantling times", &mut c3_dismantling);
    report(4, "forest invariant", &mut c4_forest_invariant);
    report(5, "initial-condition independence", &mut c5_initial_condition);
    report(6, "path length vs size", &mut c6_path_length_scaling);
    report(7, "path-length balance", &mut c7_length_balance);
    report(8, "low-rate size distribution", &mut c8_down_phase_distribution);

    let (n_crit, alpha_crit) = (1000, 30.0);
    let near_critical = if wanted(9) || wanted(13) { steady_states(&ust_run(n_crit, alpha_crit), 10, 909) } else { Vec::new() };
    report(9, "near-critical exponent", &mut || c9_near_critical(&near_critical, n_crit));
    report(10, "threshold scaling", &mut c10_threshold_scaling);
    report(11, "closed forms", &mut c11_closed_forms);
    report(12, "removed-length prediction", &mut c12_length_prediction);
    report(13, "scheme ordering", &mut || c13_scheme_ordering(&near_critical, n_crit, alpha_crit));
    report(14, "determinism", &mut c14_determinism);

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
