use rand::Rng;

use super::Network;
use crate::error::{Error, Result};

/// A simple path given as its node sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample {
    pub endpoints: (usize, usize),
    pub nodes: Vec<usize>,
}

impl PathSample {
    pub fn new(nodes: Vec<usize>) -> Self {
        let endpoints = (nodes[0], *nodes.last().expect("non-empty path"));
        Self { endpoints, nodes }
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

/// Reusable BFS scratch space for shortest-path work on one network size.
///
/// Shortest-path counts are kept as `f64` and divided by the level maximum
/// once a BFS level is complete; only ratios within a level are ever used.
#[derive(Debug, Clone)]
pub struct PathSampler {
    dist: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    count: Vec<f64>,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl PathSampler {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![0; n],
            stamp: vec![0; n],
            epoch: 0,
            count: vec![0.0; n],
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn begin(&mut self, n: usize) {
        if self.dist.len() < n {
            *self = Self::new(n);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    fn seen(&self, x: usize) -> bool {
        self.stamp[x] == self.epoch
    }

    /// Draws a path uniformly from all shortest `u`-`v` paths.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        net: &Network,
        u: usize,
        v: usize,
        rng: &mut R,
    ) -> Result<PathSample> {
        let n = net.node_count();
        if u >= n || v >= n {
            return Err(Error::NodeOutOfRange { node: u.max(v), n });
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("path endpoints coincide at {u}")));
        }
        if !net.same_component(u, v) {
            return Err(Error::Disconnected(u, v));
        }
        self.begin(n);
        let epoch = self.epoch;
        self.stamp[u] = epoch;
        self.dist[u] = 0;
        self.count[u] = 1.0;
        self.frontier.clear();
        self.frontier.push(u);
        let mut level = 0u32;
        // Counts on levels before the target's are final once that level is
        // done, so the search stops the moment the target is discovered.
        'levels: while !self.seen(v) {
            debug_assert!(!self.frontier.is_empty());
            self.next.clear();
            for &x in &self.frontier {
                let cx = self.count[x];
                for &y in net.neighbors(x) {
                    if self.stamp[y] != epoch {
                        self.stamp[y] = epoch;
                        self.dist[y] = level + 1;
                        self.count[y] = cx;
                        self.next.push(y);
                        if y == v {
                            break 'levels;
                        }
                    } else if self.dist[y] == level + 1 {
                        self.count[y] += cx;
                    }
                }
            }
            let top = self.next.iter().map(|&y| self.count[y]).fold(0.0, f64::max);
            for &y in &self.next {
                self.count[y] /= top;
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
            level += 1;
        }

        let length = self.dist[v] as usize;
        let mut nodes = vec![0usize; length + 1];
        nodes[length] = v;
        let mut x = v;
        for d in (0..length).rev() {
            let is_pred = |y: usize| self.stamp[y] == epoch && self.dist[y] == d as u32;
            let total: f64 = net.neighbors(x).iter().filter(|&&y| is_pred(y)).map(|&y| self.count[y]).sum();
            let mut r = rng.random::<f64>() * total;
            let mut chosen = None;
            for &y in net.neighbors(x) {
                if is_pred(y) {
                    chosen = Some(y);
                    r -= self.count[y];
                    if r < 0.0 {
                        break;
                    }
                }
            }
            x = chosen.expect("every node past the source has a predecessor");
            nodes[d] = x;
        }
        debug_assert_eq!(nodes[0], u);
        Ok(PathSample { endpoints: (u, v), nodes })
    }

    /// BFS distances from `src` to every node of its component, as
    /// `(node, distance)` pairs in BFS order.
    pub fn distances_from(&mut self, net: &Network, src: usize) -> Vec<(usize, usize)> {
        self.begin(net.node_count());
        let epoch = self.epoch;
        self.stamp[src] = epoch;
        self.dist[src] = 0;
        let mut out = vec![(src, 0usize)];
        let mut head = 0;
        while head < out.len() {
            let (x, d) = out[head];
            head += 1;
            for &y in net.neighbors(x) {
                if self.stamp[y] != epoch {
                    self.stamp[y] = epoch;
                    self.dist[y] = d as u32 + 1;
                    out.push((y, d + 1));
                }
            }
        }
        out
    }

    /// Graph distance between `u` and `v`, `None` if disconnected.
    pub fn distance(&mut self, net: &Network, u: usize, v: usize) -> Option<usize> {
        if !net.same_component(u, v) {
            return None;
        }
        self.distances_from(net, u).into_iter().find(|&(x, _)| x == v).map(|(_, d)| d)
    }
}

/// One-shot convenience around [`PathSampler::sample`].
pub fn sample_shortest_path<R: Rng + ?Sized>(
    net: &Network,
    u: usize,
    v: usize,
    rng: &mut R,
) -> Result<PathSample> {
    PathSampler::new(net.node_count()).sample(net, u, v, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::collections::HashMap;

    /// Every shortest u-v path by exhaustive DFS over simple paths.
    fn all_shortest_paths(net: &Network, u: usize, v: usize) -> Vec<Vec<usize>> {
        fn dfs(net: &Network, x: usize, v: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if x == v {
                out.push(cur.clone());
                return;
            }
            for &y in net.neighbors(x) {
                if !cur.contains(&y) {
                    cur.push(y);
                    dfs(net, y, v, cur, out);
                    cur.pop();
                }
            }
        }
        let mut all = Vec::new();
        dfs(net, u, v, &mut vec![u], &mut all);
        let best = all.iter().map(|p| p.len()).min().unwrap();
        let mut shortest: Vec<_> = all.into_iter().filter(|p| p.len() == best).collect();
        shortest.sort();
        shortest
    }

    fn frequencies(net: &Network, u: usize, v: usize, draws: usize, seed: u64) -> HashMap<Vec<usize>, usize> {
        let mut rng = seeded(seed);
        let mut sampler = PathSampler::new(net.node_count());
        let mut freq = HashMap::new();
        for _ in 0..draws {
            let p = sampler.sample(net, u, v, &mut rng).unwrap();
            *freq.entry(p.nodes).or_insert(0) += 1;
        }
        freq
    }

    fn grid(w: usize, h: usize) -> Network {
        let id = |x: usize, y: usize| y * w + x;
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < h {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        Network::from_edges(w * h, edges).unwrap()
    }

    #[test]
    fn unique_path_in_a_tree() {
        let net = Network::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = sample_shortest_path(&net, 0, 2, &mut seeded(0)).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.length(), 2);
    }

    #[test]
    fn four_cycle_splits_evenly() {
        let net = Network::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let draws = 100_000;
        let freq = frequencies(&net, 0, 2, draws, 11);
        assert_eq!(freq.len(), 2);
        for &c in freq.values() {
            assert!((c as f64 / draws as f64 - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn grid_corner_to_corner_covers_all_six_monotone_paths() {
        let net = grid(3, 3);
        let expected = all_shortest_paths(&net, 0, 8);
        assert_eq!(expected.len(), 6);
        let draws = 100_000;
        let freq = frequencies(&net, 0, 8, draws, 12);
        let mut got: Vec<_> = freq.keys().cloned().collect();
        got.sort();
        assert_eq!(got, expected);
        for &c in freq.values() {
            assert!((c as f64 / draws as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn errors_on_equal_or_disconnected_endpoints() {
        let net = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let mut rng = seeded(0);
        assert!(matches!(sample_shortest_path(&net, 1, 1, &mut rng), Err(Error::InvalidArgument(_))));
        assert!(matches!(sample_shortest_path(&net, 0, 3, &mut rng), Err(Error::Disconnected(0, 3))));
    }

    #[test]
    fn path_counts_survive_exponential_growth() {
        // A chain of 700 diamonds has 2^700 shortest end-to-end paths,
        // beyond f64 range without per-level rescaling.
        let k = 700;
        let mut edges = Vec::new();
        for i in 0..k {
            let (a, b, c, d) = (3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3);
            edges.extend([(a, b), (a, c), (b, d), (c, d)]);
        }
        let net = Network::from_edges(3 * k + 1, edges).unwrap();
        let p = sample_shortest_path(&net, 0, 3 * k, &mut seeded(9)).unwrap();
        assert_eq!(p.length(), 2 * k);
        for w in p.nodes.windows(2) {
            assert!(net.has_edge(w[0], w[1]));
        }
    }
}
