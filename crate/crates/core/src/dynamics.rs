//! The path-percolation step engine.
//!
//! One step removes a uniform shortest path between a uniform connected pair
//! and then places `alpha` new links according to a [`Scheme`].

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{
    disk_positions, link_probability, DiskParams, GeneratorKind, GeneratorSpec, Network, PathSampler,
};
use crate::observables::{availability, component_path_lengths, LengthHistogram, SizeDistribution};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// New links join two different components.
    CrossLinking,
    /// Cross-component links accepted with a satellite transmission probability.
    Downlink,
    /// New links join any non-adjacent pair; cycles allowed.
    Redundancy,
}

impl FromStr for Scheme {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cross-linking" | "crosslinking" | "cross" => Ok(Self::CrossLinking),
            "downlink" => Ok(Self::Downlink),
            "redundancy" => Ok(Self::Redundancy),
            other => Err(invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

/// What happens to a placement whose transmission fails.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectPolicy {
    /// The placement is spent.
    #[default]
    Consume,
    /// Another cross pair is drawn, up to `100 N` draws.
    Resample,
}

impl FromStr for RejectPolicy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "consume" => Ok(Self::Consume),
            "resample" => Ok(Self::Resample),
            other => Err(invalid(format!("unknown reject policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DownlinkProfile {
    /// Per-node photon acceptance in `[0, 1]`.
    pub accept_prob: Vec<f64>,
    pub n_photons: u32,
    #[serde(default)]
    pub on_reject: RejectPolicy,
}

impl DownlinkProfile {
    /// Acceptances of `n` ground nodes dropped uniformly in the disk.
    pub fn from_disk<R: Rng + ?Sized>(n: usize, disk: &DiskParams, rng: &mut R) -> Self {
        let accept_prob = disk_positions(n, disk.radius_km, rng)
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| disk.profile.probability(i, x.hypot(y), disk.radius_km))
            .collect();
        Self { accept_prob, n_photons: disk.n_photons, on_reject: RejectPolicy::default() }
    }

    pub fn link_probability(&self, u: usize, v: usize) -> f64 {
        link_probability(self.accept_prob[u], self.accept_prob[v], self.n_photons)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downlink: Option<DownlinkProfile>,
}

impl SchemeConfig {
    pub fn cross_linking(alpha: f64) -> Self {
        Self { scheme: Scheme::CrossLinking, alpha, downlink: None }
    }

    pub fn redundancy(alpha: f64) -> Self {
        Self { scheme: Scheme::Redundancy, alpha, downlink: None }
    }

    pub fn downlink(alpha: f64, profile: DownlinkProfile) -> Self {
        Self { scheme: Scheme::Downlink, alpha, downlink: Some(profile) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be a finite non-negative number, got {}", self.alpha)));
        }
        match (&self.downlink, self.scheme) {
            (None, Scheme::Downlink) => Err(invalid("downlink scheme needs an acceptance profile")),
            (Some(_), s) if s != Scheme::Downlink => Err(invalid("acceptance profile given for a non-downlink scheme")),
            (Some(p), _) if p.accept_prob.len() != n => Err(invalid(format!(
                "acceptance profile has {} entries for {n} nodes",
                p.accept_prob.len()
            ))),
            (Some(p), _) if !p.accept_prob.iter().all(|x| (0.0..=1.0).contains(x)) => {
                Err(invalid("acceptance probabilities must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    /// Edges consumed by this step's communication; 0 if none was possible.
    pub removed_path_length: usize,
    pub links_added: usize,
    pub n_components: usize,
    pub s_max: usize,
    pub eta: f64,
}

/// Communication sub-step: removes a uniform shortest path between a
/// uniform connected pair. Returns the path length (0 if no pair exists).
pub fn communicate<R: Rng + ?Sized>(net: &mut Network, sampler: &mut PathSampler, rng: &mut R) -> usize {
    match net.sample_connected_pair(rng) {
        Some((u, v)) => communicate_between(net, sampler, u, v, rng).expect("sampled pair is connected"),
        None => 0,
    }
}

/// Removes a uniform shortest `u`-`v` path.
pub fn communicate_between<R: Rng + ?Sized>(
    net: &mut Network,
    sampler: &mut PathSampler,
    u: usize,
    v: usize,
    rng: &mut R,
) -> Result<usize> {
    let path = sampler.sample(net, u, v, rng)?;
    net.remove_path(&path)?;
    Ok(path.length())
}

/// Link-generation sub-step.
pub fn place_links<R: Rng + ?Sized>(net: &mut Network, cfg: &SchemeConfig, rng: &mut R) -> usize {
    let whole = cfg.alpha.floor();
    let mut budget = whole as usize;
    if rng.random::<f64>() < cfg.alpha - whole {
        budget += 1;
    }
    let n = net.node_count();
    let mut added = 0;
    for _ in 0..budget {
        let pair = match cfg.scheme {
            Scheme::CrossLinking => net.sample_cross_pair(rng),
            Scheme::Redundancy => net.sample_nonadjacent_pair(rng),
            Scheme::Downlink => {
                if net.component_count() < 2 {
                    None
                } else {
                    let profile = cfg.downlink.as_ref().expect("validated downlink profile");
                    let draws = match profile.on_reject {
                        RejectPolicy::Consume => 1,
                        RejectPolicy::Resample => 100 * n,
                    };
                    let accepted = (0..draws).find_map(|_| {
                        let (u, v) = net.sample_cross_pair(rng)?;
                        (rng.random::<f64>() < profile.link_probability(u, v)).then_some((u, v))
                    });
                    match accepted {
                        Some(pair) => Some(pair),
                        None => continue,
                    }
                }
            }
        };
        let Some((u, v)) = pair else { break };
        net.add_link(u, v).expect("sampled pairs are non-adjacent");
        added += 1;
    }
    added
}

/// Full time step: communication, then link generation.
pub fn step<R: Rng + ?Sized>(
    net: &mut Network,
    cfg: &SchemeConfig,
    sampler: &mut PathSampler,
    rng: &mut R,
    step_index: u64,
) -> StepRecord {
    let removed_path_length = communicate(net, sampler, rng);
    let links_added = place_links(net, cfg, rng);
    StepRecord {
        step: step_index,
        removed_path_length,
        links_added,
        n_components: net.component_count(),
        s_max: net.largest_component(),
        eta: availability(net),
    }
}

/// Operational steady-state protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyConfig {
    pub burn_in: u64,
    pub window: u64,
    /// Bound on |mean eta(first half) - mean eta(second half)|.
    pub stationarity_tol: f64,
    /// Steps between size-distribution snapshots.
    pub snapshot_every: u64,
    /// Further burn-in rounds (each as long as everything before) allowed
    /// when the window is not stationary.
    pub max_extensions: u32,
    /// Sample path lengths per component at each snapshot.
    pub ell_pairs: Option<usize>,
    /// Keep every window record in the result.
    pub keep_records: bool,
}

impl SteadyConfig {
    pub fn for_size(n: usize) -> Self {
        let n = n as u64;
        Self {
            burn_in: 20 * n,
            window: 10 * n,
            stationarity_tol: 0.01,
            snapshot_every: (n / 10).max(1),
            max_extensions: 3,
            ell_pairs: None,
            keep_records: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(invalid("measurement window must be at least 2 steps"));
        }
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot spacing must be at least 1"));
        }
        if !(self.stationarity_tol > 0.0) {
            return Err(invalid("stationarity tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub eta_mean: f64,
    /// Batch-means error over ten window blocks.
    pub eta_stderr: f64,
    pub converged: bool,
    pub burn_in_steps: u64,
    pub sizes: SizeDistribution,
    /// Removed lengths over the window, indexed by length.
    pub removed_lengths: Vec<u64>,
    /// Mean over window steps that removed a path.
    pub mean_removed_length: f64,
    pub mean_links_added: f64,
    /// Minimum component count seen in the window.
    pub min_components: usize,
    pub ell_samples: Vec<(usize, f64)>,
    pub records: Vec<StepRecord>,
}

impl SteadyState {
    pub fn length_histogram(&self) -> Result<LengthHistogram> {
        LengthHistogram::from_counts(self.removed_lengths.clone())
    }
}

/// Everything one steady-state replica needs: initial topology, scheme,
/// rate and protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyRun {
    pub topology: GeneratorSpec,
    pub scheme: Scheme,
    pub alpha: f64,
    /// Ground geometry for the downlink scheme (and satellite topologies).
    #[serde(default)]
    pub disk: DiskParams,
    #[serde(default)]
    pub on_reject: RejectPolicy,
    pub steady: SteadyConfig,
}

impl SteadyRun {
    pub fn cross_linking(topology: GeneratorSpec, alpha: f64) -> Self {
        let steady = SteadyConfig::for_size(topology.n);
        Self {
            topology,
            scheme: Scheme::CrossLinking,
            alpha,
            disk: DiskParams::default(),
            on_reject: RejectPolicy::default(),
            steady,
        }
    }

    /// Builds the initial network and scheme from `rng`.
    pub fn prepare<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Network, SchemeConfig)> {
        let mut topology = self.topology.clone();
        if topology.kind == GeneratorKind::Satellite && topology.disk.is_none() {
            topology.disk = Some(self.disk.clone());
        }
        let generated = topology.generate(rng)?;
        let n = generated.network.node_count();
        let downlink = match self.scheme {
            Scheme::Downlink => {
                let mut profile = match generated.accept_prob {
                    Some(accept_prob) => DownlinkProfile {
                        accept_prob,
                        n_photons: self.disk.n_photons,
                        on_reject: self.on_reject,
                    },
                    None => DownlinkProfile::from_disk(n, &self.disk, rng),
                };
                profile.on_reject = self.on_reject;
                Some(profile)
            }
            _ => None,
        };
        let cfg = SchemeConfig { scheme: self.scheme, alpha: self.alpha, downlink };
        cfg.validate(n)?;
        Ok((generated.network, cfg))
    }

    pub fn run(&self, mut rng: SimRng) -> Result<SteadyState> {
        let (net, cfg) = self.prepare(&mut rng)?;
        Simulation::new(net, cfg, rng)?.run_to_steady_state(&self.steady)
    }
}

/// A network evolving under one scheme with its own random stream.
#[derive(Debug, Clone)]
pub struct Simulation<R = SimRng> {
    net: Network,
    cfg: SchemeConfig,
    rng: R,
    sampler: PathSampler,
    t: u64,
}

impl<R: Rng> Simulation<R> {
    pub fn new(net: Network, cfg: SchemeConfig, rng: R) -> Result<Self> {
        cfg.validate(net.node_count())?;
        let sampler = PathSampler::new(net.node_count());
        Ok(Self { net, cfg, rng, sampler, t: 0 })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn into_network(self) -> Network {
        self.net
    }

    pub fn step(&mut self) -> StepRecord {
        self.t += 1;
        step(&mut self.net, &self.cfg, &mut self.sampler, &mut self.rng, self.t)
    }

    /// Communication between a chosen pair only, without link generation.
    pub fn communicate_between(&mut self, u: usize, v: usize) -> Result<usize> {
        communicate_between(&mut self.net, &mut self.sampler, u, v, &mut self.rng)
    }

    pub fn place_links(&mut self) -> usize {
        place_links(&mut self.net, &self.cfg, &mut self.rng)
    }

    /// Runs `steps` steps, keeping every `record_every`-th record.
    pub fn run_trajectory(&mut self, steps: u64, record_every: u64) -> Result<Vec<StepRecord>> {
        if steps == 0 || record_every == 0 {
            return Err(invalid("steps and record_every must be at least 1"));
        }
        let mut out = Vec::with_capacity((steps / record_every) as usize + 1);
        for i in 1..=steps {
            let rec = self.step();
            if i % record_every == 0 {
                out.push(rec);
            }
        }
        Ok(out)
    }

    pub fn run_to_steady_state(&mut self, cfg: &SteadyConfig) -> Result<SteadyState> {
        cfg.validate()?;
        let mut burned = 0u64;
        let mut next_burn = cfg.burn_in;
        let mut extensions = 0;
        loop {
            for _ in 0..next_burn {
                self.step();
            }
            burned += next_burn;
            let mut state = self.measure(cfg);
            let half = state.records.len() / 2;
            let (a, b) = state.records.split_at(half);
            let mean = |r: &[StepRecord]| r.iter().map(|x| x.eta).sum::<f64>() / r.len() as f64;
            state.converged = (mean(a) - mean(b)).abs() < cfg.stationarity_tol;
            state.burn_in_steps = burned;
            if state.converged || extensions >= cfg.max_extensions {
                if !cfg.keep_records {
                    state.records = Vec::new();
                }
                return Ok(state);
            }
            extensions += 1;
            next_burn = burned;
        }
    }

    fn measure(&mut self, cfg: &SteadyConfig) -> SteadyState {
        let n = self.net.node_count();
        let mut sizes = SizeDistribution::empty(n);
        let mut removed = vec![0u64; 1];
        let mut ell_samples = Vec::new();
        let mut records = Vec::with_capacity(cfg.window as usize);
        let mut links = 0u64;
        let mut min_components = usize::MAX;
        for i in 1..=cfg.window {
            let rec = self.step();
            let l = rec.removed_path_length;
            if l >= removed.len() {
                removed.resize(l + 1, 0);
            }
            removed[l] += 1;
            links += rec.links_added as u64;
            min_components = min_components.min(rec.n_components);
            records.push(rec);
            if i % cfg.snapshot_every == 0 {
                sizes.accumulate(&self.net);
                if let Some(pairs) = cfg.ell_pairs {
                    let got = component_path_lengths(&self.net, pairs, &mut self.sampler, &mut self.rng)
                        .expect("pairs >= 1");
                    ell_samples.extend(got);
                }
            }
        }
        if sizes.snapshots() == 0 {
            sizes.accumulate(&self.net);
        }
        let etas: Vec<f64> = records.iter().map(|r| r.eta).collect();
        let eta_mean = etas.iter().sum::<f64>() / etas.len() as f64;
        let block = (etas.len() / 10).max(1);
        let block_means: Vec<f64> = etas.chunks(block).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        let (_, eta_stderr) = crate::observables::stats::mean_stderr(&block_means);
        let removals: u64 = removed[1..].iter().sum();
        let total_len: u64 = removed.iter().enumerate().map(|(l, &c)| l as u64 * c).sum();
        removed[0] = 0;
        SteadyState {
            eta_mean,
            eta_stderr,
            converged: false,
            burn_in_steps: 0,
            sizes,
            removed_lengths: removed,
            mean_removed_length: if removals > 0 { total_len as f64 / removals as f64 } else { 0.0 },
            mean_links_added: links as f64 / cfg.window as f64,
            min_components,
            ell_samples,
            records,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_complete, generate_ust};
    use crate::rng::seeded;

    fn sim(net: Network, cfg: SchemeConfig, seed: u64) -> Simulation {
        Simulation::new(net, cfg, seeded(seed)).unwrap()
    }

    #[test]
    fn triangle_loses_one_edge_and_stays_connected() {
        let mut s = sim(generate_complete(3).unwrap(), SchemeConfig::cross_linking(0.0), 1);
        let r = s.step();
        assert_eq!(r.removed_path_length, 1);
        assert_eq!(r.n_components, 1);
        assert_eq!(s.network().edge_count(), 2);
    }

    #[test]
    fn forced_end_to_end_removal_on_a_path() {
        let net = Network::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut s = sim(net, SchemeConfig::cross_linking(0.0), 1);
        assert_eq!(s.communicate_between(0, 3).unwrap(), 3);
        assert_eq!(s.network().component_count(), 4);
        assert_eq!(availability(s.network()), 0.0);
    }

    #[test]
    fn single_removal_fragments_a_large_tree() {
        let mut rng = seeded(5);
        let net = generate_ust(1000, &mut rng);
        let mut s = sim(net, SchemeConfig::cross_linking(0.0), 6);
        assert!(s.step().eta < 0.9);
    }

    #[test]
    fn no_cross_pair_means_no_links() {
        let mut s = sim(generate_complete(5).unwrap(), SchemeConfig::cross_linking(5.0), 1);
        assert_eq!(s.place_links(), 0);
    }

    #[test]
    fn singletons_merge_once_per_unit_alpha() {
        let mut s = sim(Network::new(10), SchemeConfig::cross_linking(1.0), 2);
        assert_eq!(s.place_links(), 1);
        assert_eq!(s.network().component_count(), 9);
    }

    #[test]
    fn two_pairs_merge_once() {
        let net = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let mut s = sim(net, SchemeConfig::cross_linking(2.0), 3);
        assert_eq!(s.place_links(), 1);
        assert_eq!(s.network().component_count(), 1);
    }

    #[test]
    fn fractional_alpha_places_the_expected_number() {
        let mut s = sim(Network::new(2000), SchemeConfig::cross_linking(1.3), 4);
        let total: usize = (0..1000).map(|_| s.place_links()).sum();
        assert!((total as f64 / 1000.0 - 1.3).abs() < 0.05);
    }

    #[test]
    fn isolated_pair_steps_are_no_ops() {
        let mut s = sim(Network::new(2), SchemeConfig::cross_linking(0.0), 0);
        let r = s.run_trajectory(1, 1).unwrap();
        assert_eq!(r[0].removed_path_length, 0);
        assert_eq!(r[0].n_components, 2);
    }

    #[test]
    fn downlink_with_zero_acceptance_never_links() {
        let profile = DownlinkProfile { accept_prob: vec![0.0; 6], n_photons: 50, on_reject: RejectPolicy::Resample };
        let mut s = sim(Network::new(6), SchemeConfig::downlink(3.0, profile), 0);
        assert_eq!(s.place_links(), 0);
        let profile = DownlinkProfile { accept_prob: vec![1.0; 6], n_photons: 1, on_reject: RejectPolicy::Consume };
        let mut s = sim(Network::new(6), SchemeConfig::downlink(3.0, profile), 0);
        assert_eq!(s.place_links(), 3);
    }

    #[test]
    fn redundancy_can_close_cycles() {
        let mut s = sim(Network::from_edges(3, [(0, 1), (1, 2)]).unwrap(), SchemeConfig::redundancy(1.0), 0);
        assert_eq!(s.place_links(), 1);
        assert!(s.network().is_complete());
        assert_eq!(s.place_links(), 0);
    }

    #[test]
    fn config_validation() {
        assert!(SchemeConfig::cross_linking(-1.0).validate(3).is_err());
        assert!(SchemeConfig::cross_linking(f64::NAN).validate(3).is_err());
        let mut c = SchemeConfig::cross_linking(1.0);
        c.scheme = Scheme::Downlink;
        assert!(c.validate(3).is_err());
    }

    #[test]
    fn zero_alpha_reaches_the_absorbing_state() {
        let mut s = sim(generate_complete(12).unwrap(), SchemeConfig::cross_linking(0.0), 9);
        let mut cfg = SteadyConfig::for_size(12);
        cfg.burn_in = 2000;
        let st = s.run_to_steady_state(&cfg).unwrap();
        assert!(st.converged);
        assert_eq!(st.eta_mean, 0.0);
        assert_eq!(st.sizes.v(1), 1.0);
    }

    #[test]
    fn trajectories_are_reproducible() {
        let run = || {
            let mut rng = seeded(77);
            let net = generate_ust(200, &mut rng);
            sim(net, SchemeConfig::cross_linking(3.5), 78).run_trajectory(500, 1).unwrap()
        };
        assert_eq!(run(), run());
    }
}
