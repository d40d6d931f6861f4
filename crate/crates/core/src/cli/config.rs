//! Flat experiment settings shared by command-line flags and config files.
//!
//! Every field is optional so that flags, a config file and the built-in
//! defaults can be layered: flags win over the file, the file wins over the
//! defaults. A run manifest stores the fully resolved settings and is itself
//! accepted as a config file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::dynamics::{RejectPolicy, Scheme};
use crate::error::{invalid, Error, Result};
use crate::graph::GeneratorKind;
use crate::smoluchowski::{Equation, KernelMode, PathLengthLaw};

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Initial topology: ust, er, honeycomb, complete, satellite.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<GeneratorKind>,
    /// Number of nodes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Mean degree of ER initial graphs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_degree: Option<f64>,
    /// Ground disk radius in km (satellite topology, downlink scheme).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_km: Option<f64>,
    /// Photon pairs per downlink attempt.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photons: Option<u32>,
    /// Peak photon acceptance of the Gaussian ground profile.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accept_amplitude: Option<f64>,

    /// Link replenishment: cross-linking, downlink, redundancy.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    /// Mean number of links generated per step.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Failed downlink transmissions: consume or resample.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_reject: Option<RejectPolicy>,

    /// Trajectory length of `run`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationarity_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_extensions: Option<u32>,
    /// Random pairs per large component when measuring path lengths.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell_pairs: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// System sizes of a sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    /// Absolute rates of a sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Rates in units of sqrt(N), used when no absolute rates are given.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_target: Option<f64>,
    /// Second, larger size for the two-curve crossing in `threshold`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_large: Option<usize>,

    /// Largest component size kept by the solver.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smax: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Fragmentation kernel: asymptotic-half, per-parent, exact-ust.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelMode>,
    /// Rate equation: approximate or full.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<Equation>,
    /// Finite system size for the full equation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_n: Option<usize>,

    /// Power-law exponent for the closed-form threshold.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Path-length law inside a component: rayleigh or exact-ust.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<PathLengthLaw>,
    /// A `s,v,stderr` or `s,v` table to predict removed lengths from.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vs: Option<PathBuf>,

    /// Output directory.
    #[arg(long = "out")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

macro_rules! layer {
    ($hi:expr, $lo:expr, $($f:ident),* $(,)?) => {
        Settings { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Settings {
    /// Field-wise `self` over `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        layer!(
            self, lower, kind, n, mean_degree, radius_km, photons, accept_amplitude, scheme, alpha,
            on_reject, steps, record_every, burn_in, window, snapshot_every, stationarity_tol,
            max_extensions, ell_pairs, replicas, seed, ns, alphas, x_grid, eta_target, n_large, smax,
            tol, damping, max_iter, kernel, equation, finite_n, tau, law, vs, output_dir,
        )
    }

    /// Loads a TOML file of settings, or the `config` object of a JSON run
    /// manifest.
    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let mut doc: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            let cfg = doc.get_mut("config").map(serde_json::Value::take).unwrap_or(doc);
            serde_json::from_value(cfg).map_err(|e| invalid(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
        }
    }

    /// Fills every field that has a default. Size-dependent defaults follow
    /// the resolved `n`.
    pub fn resolved(self) -> Settings {
        let kind = self.kind.unwrap_or(GeneratorKind::Ust);
        let n = self.n.unwrap_or(1000);
        let mean_degree = match kind {
            GeneratorKind::Er => self.mean_degree.or(Some(2.0)),
            _ => self.mean_degree,
        };
        let defaults = Settings {
            kind: Some(kind),
            n: Some(n),
            mean_degree,
            radius_km: Some(1.8e3),
            photons: Some(50),
            accept_amplitude: Some(0.1),
            scheme: Some(Scheme::CrossLinking),
            alpha: Some(2.0),
            on_reject: Some(RejectPolicy::default()),
            steps: Some(10 * n as u64),
            record_every: Some(1),
            burn_in: Some(20 * n as u64),
            window: Some(10 * n as u64),
            snapshot_every: Some((n as u64 / 10).max(1)),
            stationarity_tol: Some(0.01),
            max_extensions: Some(3),
            ell_pairs: Some(100),
            replicas: Some(1),
            seed: Some(0),
            ns: Some(vec![n]),
            alphas: None,
            x_grid: Some((1..=12).map(|i| 0.25 * i as f64).collect()),
            eta_target: Some(0.5),
            n_large: None,
            smax: Some(n),
            tol: Some(1e-10),
            damping: Some(0.5),
            max_iter: Some(200_000),
            kernel: Some(KernelMode::default()),
            equation: Some(Equation::default()),
            finite_n: None,
            tau: Some(2.25),
            law: Some(PathLengthLaw::default()),
            vs: None,
            output_dir: Some(PathBuf::from("out")),
        };
        self.over(defaults)
    }

    /// Checks ranges that every command relies on.
    pub fn validate(&self) -> Result<()> {
        if self.replicas == Some(0) {
            return Err(invalid("replicas must be at least 1"));
        }
        if let Some(a) = self.alpha {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(invalid(format!("alpha must be non-negative, got {a}")));
            }
        }
        if self.record_every == Some(0) || self.steps == Some(0) {
            return Err(invalid("steps and record_every must be at least 1"));
        }
        if self.ns.as_ref().is_some_and(|v| v.is_empty()) {
            return Err(invalid("empty size list"));
        }
        Ok(())
    }
}

/// Required setting after [`Settings::resolved`].
pub(crate) fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidArgument(format!("missing setting '{name}'")))
}
