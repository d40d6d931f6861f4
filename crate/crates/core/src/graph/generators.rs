//! Initial topologies.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Ust,
    Er,
    Honeycomb,
    Complete,
    Satellite,
}

impl std::str::FromStr for GeneratorKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ust" => Ok(Self::Ust),
            "er" => Ok(Self::Er),
            "honeycomb" | "hex" => Ok(Self::Honeycomb),
            "complete" => Ok(Self::Complete),
            "satellite" | "satellite-disk" => Ok(Self::Satellite),
            other => Err(invalid(format!("unknown topology '{other}'"))),
        }
    }
}

/// Radial photon acceptance of ground nodes under a satellite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum AcceptanceProfile {
    /// `p0 * exp(-(d / R)^2)`.
    Gaussian { amplitude: f64 },
    Constant { p: f64 },
    /// Explicit per-node values, indexed by node id.
    PerNode { values: Vec<f64> },
}

impl AcceptanceProfile {
    pub fn probability(&self, node: usize, distance: f64, radius: f64) -> f64 {
        match self {
            Self::Gaussian { amplitude } => amplitude * (-(distance / radius).powi(2)).exp(),
            Self::Constant { p } => *p,
            Self::PerNode { values } => values[node],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        match self {
            Self::Gaussian { amplitude } if !in_unit(*amplitude) => {
                Err(invalid(format!("profile amplitude {amplitude} outside [0, 1]")))
            }
            Self::Constant { p } if !in_unit(*p) => Err(invalid(format!("acceptance {p} outside [0, 1]"))),
            Self::PerNode { values } if values.len() != n => Err(invalid(format!(
                "per-node profile has {} values for {n} nodes",
                values.len()
            ))),
            Self::PerNode { values } if !values.iter().all(|&p| in_unit(p)) => {
                Err(invalid("per-node acceptance outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskParams {
    pub radius_km: f64,
    pub n_photons: u32,
    pub profile: AcceptanceProfile,
}

impl Default for DiskParams {
    fn default() -> Self {
        Self {
            radius_km: 1.8e3,
            n_photons: 50,
            profile: AcceptanceProfile::Gaussian { amplitude: 0.1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_degree: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk: Option<DiskParams>,
}

/// A generated topology plus satellite geometry when applicable.
#[derive(Debug, Clone)]
pub struct Generated {
    pub network: Network,
    pub positions: Option<Vec<(f64, f64)>>,
    pub accept_prob: Option<Vec<f64>>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize) -> Self {
        Self { kind, n, mean_degree: None, disk: None }
    }

    pub fn validate(&self) -> Result<()> {
        let min_n = if self.kind == GeneratorKind::Ust { 1 } else { 2 };
        if self.n < min_n {
            return Err(invalid(format!("N = {} is too small", self.n)));
        }
        match self.kind {
            GeneratorKind::Er => {
                let k = self.mean_degree.ok_or_else(|| invalid("ER needs a mean degree"))?;
                check_mean_degree(self.n, k)
            }
            GeneratorKind::Honeycomb => honeycomb_cells(self.n).map(|_| ()),
            GeneratorKind::Satellite => {
                let disk = self.disk.clone().unwrap_or_default();
                check_disk(self.n, &disk)
            }
            _ => Ok(()),
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Generated> {
        self.validate()?;
        let plain = |network| Generated { network, positions: None, accept_prob: None };
        Ok(match self.kind {
            GeneratorKind::Ust => plain(generate_ust(self.n, rng)),
            GeneratorKind::Er => plain(generate_er(self.n, self.mean_degree.unwrap_or(0.0), rng)?),
            GeneratorKind::Honeycomb => plain(generate_honeycomb(self.n)?),
            GeneratorKind::Complete => plain(generate_complete(self.n)?),
            GeneratorKind::Satellite => {
                let sat = generate_satellite_disk(self.n, &self.disk.clone().unwrap_or_default(), rng)?;
                Generated {
                    network: sat.network,
                    positions: Some(sat.positions),
                    accept_prob: Some(sat.accept_prob),
                }
            }
        })
    }
}

fn check_mean_degree(n: usize, k: f64) -> Result<()> {
    if !(k >= 0.0 && k <= (n - 1) as f64) {
        return Err(invalid(format!("mean degree {k} outside [0, N-1] for N = {n}")));
    }
    Ok(())
}

fn check_disk(n: usize, disk: &DiskParams) -> Result<()> {
    if !(disk.radius_km > 0.0) {
        return Err(invalid(format!("disk radius must be positive, got {}", disk.radius_km)));
    }
    if disk.n_photons == 0 {
        return Err(invalid("photon count must be at least 1"));
    }
    disk.profile.validate(n)
}

/// Uniform spanning tree of the complete graph `K_n` by Wilson's
/// loop-erased random walks.
pub fn generate_ust<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Network {
    if n < 2 {
        return Network::new(n);
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[rng.random_range(0..n)] = true;
    let mut edges = Vec::with_capacity(n - 1);
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            // A step of the walk on K_n: any other node, uniformly.
            let mut w = rng.random_range(0..n - 1);
            if w >= u {
                w += 1;
            }
            next[u] = w;
            u = w;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            edges.push((u, next[u]));
            u = next[u];
        }
    }
    Network::from_edges(n, edges).expect("a spanning tree is a simple graph")
}

/// `G(n, p)` with `p = mean_degree / (n - 1)`, by geometric edge skipping.
pub fn generate_er<R: Rng + ?Sized>(n: usize, mean_degree: f64, rng: &mut R) -> Result<Network> {
    if n < 2 {
        return Err(invalid("ER needs at least two nodes"));
    }
    check_mean_degree(n, mean_degree)?;
    let p = mean_degree / (n - 1) as f64;
    if p >= 1.0 {
        return generate_complete(n);
    }
    let mut edges = Vec::new();
    if p > 0.0 {
        let log_q = (-p).ln_1p();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((-r).ln_1p() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((v, w as usize));
            }
        }
    }
    Network::from_edges(n, edges)
}

pub fn generate_complete(n: usize) -> Result<Network> {
    if n < 2 {
        return Err(invalid("complete graph needs at least two nodes"));
    }
    Network::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Rectangular 4-node cells `(columns, rows)` for a honeycomb of about `n`
/// nodes. Picks the exact or nearest node count with both sides ≥ 2 and an
/// aspect ratio of at most 4, preferring squarer tilings on ties.
pub fn honeycomb_cells(n: usize) -> Result<(usize, usize)> {
    if n < 16 {
        return Err(invalid(format!("honeycomb needs at least 2x2 cells (16 nodes), got N = {n}")));
    }
    let target = n as f64 / 4.0;
    let mut best: Option<((usize, usize), (usize, usize))> = None;
    let mut cx = 2;
    while cx * cx <= (target.ceil() as usize) + 1 {
        for cy in [(target / cx as f64).floor() as usize, (target / cx as f64).ceil() as usize] {
            if cy < cx || cy > 4 * cx {
                continue;
            }
            let key = ((4 * cx * cy).abs_diff(n), cy - cx);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, (cx, cy)));
            }
        }
        cx += 1;
    }
    best.map(|(_, cells)| cells)
        .ok_or_else(|| invalid(format!("no honeycomb tiling near N = {n}")))
}

/// Periodic honeycomb lattice with every node of degree 3.
///
/// Brick-wall layout on a `2cx x 2cy` grid: each node links to its right
/// neighbour and, when `x + y` is even, to the node above. Leaving the right
/// edge re-enters two rows higher, which keeps the parity pattern and gives
/// girth 6 even for the smallest 2x2-cell torus. The node count is rounded
/// to the nearest valid tiling; read it back from the network.
pub fn generate_honeycomb(n: usize) -> Result<Network> {
    let (cx, cy) = honeycomb_cells(n)?;
    let (w, h) = (2 * cx, 2 * cy);
    let id = |x: usize, y: usize| (y % h) * w + x;
    let mut edges = Vec::with_capacity(3 * w * h / 2);
    for y in 0..h {
        for x in 0..w {
            let right = if x + 1 < w { id(x + 1, y) } else { id(0, y + 2) };
            edges.push((id(x, y), right));
            if (x + y) % 2 == 0 {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    Network::from_edges(w * h, edges)
}

/// Probability that at least one of `n_photons` attempts links nodes with
/// acceptances `p_i`, `p_j`: `1 - (1 - p_i p_j)^n_photons`.
pub fn link_probability(p_i: f64, p_j: f64, n_photons: u32) -> f64 {
    -(n_photons as f64 * (-(p_i * p_j)).ln_1p()).exp_m1()
}

#[derive(Debug, Clone)]
pub struct SatelliteNetwork {
    pub network: Network,
    pub positions: Vec<(f64, f64)>,
    pub accept_prob: Vec<f64>,
}

/// Nodes uniform in a disk; each pair linked independently with
/// [`link_probability`] of the nodes' acceptances.
pub fn generate_satellite_disk<R: Rng + ?Sized>(
    n: usize,
    disk: &DiskParams,
    rng: &mut R,
) -> Result<SatelliteNetwork> {
    if n < 2 {
        return Err(invalid("satellite network needs at least two nodes"));
    }
    check_disk(n, disk)?;
    let positions = disk_positions(n, disk.radius_km, rng);
    let accept_prob: Vec<f64> = positions
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| disk.profile.probability(i, x.hypot(y), disk.radius_km))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let pi = link_probability(accept_prob[i], accept_prob[j], disk.n_photons);
            if pi > 0.0 && rng.random::<f64>() < pi {
                edges.push((i, j));
            }
        }
    }
    Ok(SatelliteNetwork {
        network: Network::from_edges(n, edges)?,
        positions,
        accept_prob,
    })
}

/// `n` points uniform in a disk of the given radius centred at the origin.
pub fn disk_positions<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            (r * theta.cos(), r * theta.sin())
        })
        .collect()
}
