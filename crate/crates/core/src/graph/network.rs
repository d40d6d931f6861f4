use std::collections::VecDeque;

use rand::Rng;

use super::fenwick::Fenwick;
use super::PathSample;
use crate::error::{Error, Result};

/// Undirected simple graph with live component bookkeeping.
///
/// Every node carries the slot id of its component. Merges relabel the
/// smaller side into the larger one; path removals relabel the host
/// component by BFS from the path nodes. Three Fenwick trees indexed by slot
/// hold `s`, `s(s-1)` and `s(N-s)` so that connected pairs, cross-component
/// pairs and size-biased components can be drawn in `O(log N)`.
#[derive(Debug, Clone)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
    label: Vec<usize>,
    members: Vec<Vec<usize>>,
    free_slots: Vec<usize>,
    by_size: Fenwick,
    by_pairs: Fenwick,
    by_cross: Fenwick,
    /// Per node `N - 1 - degree`, the number of absent incident links.
    by_free: Fenwick,
    size_hist: Vec<usize>,
    s_max: usize,
    sum_sq: u64,
    n_components: usize,
    edge_count: usize,
    mark: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
    owner: Vec<usize>,
}

impl Network {
    /// `n` isolated nodes.
    pub fn new(n: usize) -> Self {
        let mut net = Self::blank(n);
        for v in 0..n {
            net.label[v] = v;
            net.members[v].push(v);
            net.resize_slot(v, 0, 1);
        }
        net.init_free_degrees();
        net
    }

    fn blank(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            label: vec![0; n],
            members: vec![Vec::new(); n],
            free_slots: Vec::new(),
            by_size: Fenwick::new(n),
            by_pairs: Fenwick::new(n),
            by_cross: Fenwick::new(n),
            by_free: Fenwick::new(n),
            size_hist: vec![0; n + 1],
            s_max: 0,
            sum_sq: 0,
            n_components: 0,
            edge_count: 0,
            mark: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
            owner: vec![0; n],
        }
    }

    /// Builds a network from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut net = Self::blank(n);
        for (u, v) in edges {
            net.check_node(u)?;
            net.check_node(v)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            net.adjacency[u].push(v);
            net.adjacency[v].push(u);
            net.edge_count += 1;
        }
        for u in 0..n {
            let mut sorted = net.adjacency[u].clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        net.relabel_all();
        net.init_free_degrees();
        Ok(net)
    }

    fn init_free_degrees(&mut self) {
        let n = self.node_count();
        for u in 0..n {
            self.by_free.add(u, (n - 1 - self.adjacency[u].len()) as i64);
        }
    }

    fn relabel_all(&mut self) {
        let n = self.node_count();
        for slot in 0..n {
            let old = self.members[slot].len();
            if old > 0 {
                self.resize_slot(slot, old, 0);
                self.members[slot].clear();
            }
        }
        self.free_slots.clear();
        self.next_epoch();
        let mut slot = 0;
        for start in 0..n {
            if self.mark[start] == self.epoch {
                continue;
            }
            let size = self.flood(start, slot);
            self.resize_slot(slot, 0, size);
            slot += 1;
        }
        self.free_slots.extend((slot..n).rev());
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn component_count(&self) -> usize {
        self.n_components
    }

    /// Size of the largest component (0 for the empty network).
    pub fn largest_component(&self) -> usize {
        self.s_max
    }

    /// Σ_c s_c², the number of ordered node pairs (including `(u, u)`) that
    /// share a component.
    pub fn sum_squared_sizes(&self) -> u64 {
        self.sum_sq
    }

    /// `hist[s]` is the number of components with exactly `s` nodes.
    pub fn size_histogram(&self) -> &[usize] {
        &self.size_hist
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].contains(&b)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in node order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Opaque component id of `u`; equal ids mean same component.
    pub fn component_of(&self, u: usize) -> usize {
        self.label[u]
    }

    pub fn component_size(&self, u: usize) -> usize {
        self.members[self.label[u]].len()
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.label[u] == self.label[v]
    }

    /// Node lists of all components.
    pub fn components(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.members.iter().filter(|m| !m.is_empty()).map(|m| m.as_slice())
    }

    /// Component sizes in slot order.
    pub fn component_sizes(&self) -> Vec<usize> {
        self.components().map(|c| c.len()).collect()
    }

    /// Whether every pair of nodes is already adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        self.edge_count == n * n.saturating_sub(1) / 2
    }

    /// Inserts edge `(u, v)`. Returns `true` when it joined two components.
    pub fn add_link(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        self.edge_count += 1;
        self.by_free.add(u, -1);
        self.by_free.add(v, -1);
        let (a, b) = (self.label[u], self.label[v]);
        if a == b {
            return Ok(false);
        }
        let (big, small) = if self.members[a].len() >= self.members[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        let moved = std::mem::take(&mut self.members[small]);
        let (sb, ss) = (self.members[big].len(), moved.len());
        for &x in &moved {
            self.label[x] = big;
        }
        self.members[big].extend_from_slice(&moved);
        self.resize_slot(small, ss, 0);
        self.resize_slot(big, sb, sb + ss);
        self.free_slots.push(small);
        Ok(true)
    }

    /// Deletes every edge of `path` and relabels the component that hosted
    /// it. Returns the number of components the host split into, in
    /// `1..=path.length() + 1`. The network is untouched on error.
    pub fn remove_path(&mut self, path: &PathSample) -> Result<usize> {
        let nodes = &path.nodes;
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument("path has no edges".into()));
        }
        for w in nodes.windows(2) {
            self.check_node(w[0])?;
            self.check_node(w[1])?;
            if !self.has_edge(w[0], w[1]) {
                return Err(Error::MissingEdge(w[0], w[1]));
            }
        }
        for w in nodes.windows(2) {
            self.detach(w[0], w[1]);
        }
        Ok(self.split_host(nodes))
    }

    fn detach(&mut self, u: usize, v: usize) {
        let pos = self.adjacency[u].iter().position(|&x| x == v).expect("edge present");
        self.adjacency[u].swap_remove(pos);
        let pos = self.adjacency[v].iter().position(|&x| x == u).expect("edge present");
        self.adjacency[v].swap_remove(pos);
        self.edge_count -= 1;
        self.by_free.add(u, 1);
        self.by_free.add(v, 1);
    }

    /// Relabels the (former) component of `seeds[0]`. Every fragment of it
    /// contains at least one seed, since only edges between seeds were cut.
    ///
    /// One search runs from each seed, round-robin, one node expansion at a
    /// time. Searches that touch merge; a search that runs dry has found a
    /// whole fragment. Once a single search is left open, everything not yet
    /// claimed by a finished search is the remaining fragment, which keeps
    /// the host slot. The work is bounded by the fragments other than the
    /// last one, so a path cut that leaves the host connected stays cheap.
    fn split_host(&mut self, seeds: &[usize]) -> usize {
        let host = self.label[seeds[0]];
        let host_size = self.members[host].len();
        self.next_epoch();
        let epoch = self.epoch;
        let k = seeds.len();
        let mut parent: Vec<usize> = (0..k).collect();
        let mut stacks: Vec<Vec<usize>> = Vec::with_capacity(k);
        let mut seen: Vec<Vec<usize>> = Vec::with_capacity(k);
        let mut open = vec![true; k];
        for (i, &x) in seeds.iter().enumerate() {
            debug_assert_ne!(self.mark[x], epoch, "path nodes are distinct");
            self.mark[x] = epoch;
            self.owner[x] = i;
            stacks.push(vec![x]);
            seen.push(vec![x]);
        }
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut unfinished = k;
        let mut finished = Vec::new();
        'rounds: while unfinished >= 2 {
            for g in 0..k {
                if unfinished < 2 {
                    break 'rounds;
                }
                if !open[g] || parent[g] != g {
                    continue;
                }
                let Some(x) = stacks[g].pop() else {
                    open[g] = false;
                    unfinished -= 1;
                    finished.push(g);
                    continue;
                };
                for idx in 0..self.adjacency[x].len() {
                    let y = self.adjacency[x][idx];
                    let g_now = find(&mut parent, g);
                    if self.mark[y] != epoch {
                        self.mark[y] = epoch;
                        self.owner[y] = g_now;
                        stacks[g_now].push(y);
                        seen[g_now].push(y);
                    } else {
                        let h = find(&mut parent, self.owner[y]);
                        if h != g_now {
                            let (keep, gone) =
                                if seen[g_now].len() >= seen[h].len() { (g_now, h) } else { (h, g_now) };
                            parent[gone] = keep;
                            let moved = std::mem::take(&mut stacks[gone]);
                            stacks[keep].extend(moved);
                            let moved = std::mem::take(&mut seen[gone]);
                            seen[keep].extend(moved);
                            open[gone] = false;
                            unfinished -= 1;
                        }
                    }
                }
            }
        }
        if finished.is_empty() {
            return 1;
        }
        let mut moved_out = 0;
        for &g in &finished {
            let slot = self.free_slots.pop().expect("a free slot per component");
            let nodes = std::mem::take(&mut seen[g]);
            for &x in &nodes {
                self.label[x] = slot;
            }
            let size = nodes.len();
            moved_out += size;
            let mut members = std::mem::take(&mut self.members[slot]);
            members.clear();
            members.extend_from_slice(&nodes);
            self.members[slot] = members;
            self.resize_slot(slot, 0, size);
        }
        let label = &self.label;
        self.members[host].retain(|&x| label[x] == host);
        self.resize_slot(host, host_size, host_size - moved_out);
        finished.len() + 1
    }

    /// BFS from `start` over unmarked nodes, assigning them to `slot`.
    fn flood(&mut self, start: usize, slot: usize) -> usize {
        let epoch = self.epoch;
        self.mark[start] = epoch;
        self.queue.clear();
        self.queue.push_back(start);
        let mut members = std::mem::take(&mut self.members[slot]);
        members.clear();
        while let Some(x) = self.queue.pop_front() {
            self.label[x] = slot;
            members.push(x);
            for &y in &self.adjacency[x] {
                if self.mark[y] != epoch {
                    self.mark[y] = epoch;
                    self.queue.push_back(y);
                }
            }
        }
        let size = members.len();
        self.members[slot] = members;
        size
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    fn resize_slot(&mut self, slot: usize, old: usize, new: usize) {
        if old == new {
            return;
        }
        let n = self.node_count() as i64;
        let (o, w) = (old as i64, new as i64);
        self.by_size.add(slot, w - o);
        self.by_pairs.add(slot, w * (w - 1) - o * (o - 1));
        self.by_cross.add(slot, w * (n - w) - o * (n - o));
        self.sum_sq = (self.sum_sq as i64 + w * w - o * o) as u64;
        if old > 0 {
            self.size_hist[old] -= 1;
            self.n_components -= 1;
        }
        if new > 0 {
            self.size_hist[new] += 1;
            self.n_components += 1;
            self.s_max = self.s_max.max(new);
        }
        while self.s_max > 0 && self.size_hist[self.s_max] == 0 {
            self.s_max -= 1;
        }
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: u, n: self.node_count() })
        }
    }

    /// Uniformly random unordered pair of distinct nodes in the same
    /// component, or `None` when every component is a singleton. Components
    /// are drawn with weight `s(s-1)`, which is the same law as rejection
    /// sampling of uniform pairs until a connected one turns up.
    pub fn sample_connected_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        let total = self.by_pairs.total();
        if total == 0 {
            return None;
        }
        let slot = self.by_pairs.find(rng.random_range(0..total));
        let m = &self.members[slot];
        let i = rng.random_range(0..m.len());
        let mut j = rng.random_range(0..m.len() - 1);
        if j >= i {
            j += 1;
        }
        Some((m[i], m[j]))
    }

    /// Uniformly random pair of nodes lying in different components, or
    /// `None` when the network is a single component.
    pub fn sample_cross_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        let total = self.by_cross.total();
        if total == 0 {
            return None;
        }
        let first = self.by_cross.find(rng.random_range(0..total));
        let s_first = self.members[first].len() as u64;
        let a = self.members[first][rng.random_range(0..s_first as usize)];
        // Second node: uniform among the N - s_first nodes outside `first`.
        let mut y = rng.random_range(0..self.node_count() as u64 - s_first);
        if y >= self.by_size.prefix(first) {
            y += s_first;
        }
        let second = self.by_size.find(y);
        let m = &self.members[second];
        let b = m[rng.random_range(0..m.len())];
        Some((a, b))
    }

    /// Uniformly random pair of distinct, non-adjacent nodes (components
    /// ignored), or `None` for a complete graph. The first node is drawn
    /// with weight equal to its number of absent links, the second uniformly
    /// among those, which is the law of rejection sampling on uniform pairs.
    pub fn sample_nonadjacent_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        let total = self.by_free.total();
        if total == 0 {
            return None;
        }
        let n = self.node_count();
        let u = self.by_free.find(rng.random_range(0..total));
        let free = n - 1 - self.adjacency[u].len();
        if 8 * free >= n - 1 {
            loop {
                let mut v = rng.random_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                if !self.has_edge(u, v) {
                    return Some((u, v));
                }
            }
        }
        let mut blocked = vec![false; n];
        blocked[u] = true;
        for &x in &self.adjacency[u] {
            blocked[x] = true;
        }
        let pick = rng.random_range(0..free);
        (0..n).filter(|&x| !blocked[x]).nth(pick).map(|v| (u, v))
    }

    /// Recomputes connectivity from scratch and checks every piece of
    /// bookkeeping against it.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.node_count();
        let mut edges = 0;
        for u in 0..n {
            for &v in &self.adjacency[u] {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if !self.adjacency[v].contains(&u) {
                    return Err(format!("asymmetric edge {u}->{v}"));
                }
                edges += 1;
            }
            let mut sorted = self.adjacency[u].clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != self.adjacency[u].len() {
                return Err(format!("multi-edge at {u}"));
            }
        }
        if edges != 2 * self.edge_count {
            return Err(format!("edge count {} but adjacency holds {}", self.edge_count, edges / 2));
        }
        let mut fresh = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if fresh[start] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let mut size = 0;
            let mut queue = VecDeque::from([start]);
            fresh[start] = c;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for &y in &self.adjacency[x] {
                    if fresh[y] == usize::MAX {
                        fresh[y] = c;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        // The two labelings must induce the same partition.
        let mut slot_of_fresh = vec![usize::MAX; sizes.len()];
        for u in 0..n {
            let f = fresh[u];
            if slot_of_fresh[f] == usize::MAX {
                slot_of_fresh[f] = self.label[u];
            } else if slot_of_fresh[f] != self.label[u] {
                return Err(format!("component of node {u} is split across labels"));
            }
        }
        for (f, &slot) in slot_of_fresh.iter().enumerate() {
            if self.members[slot].len() != sizes[f] {
                return Err(format!("slot {slot} has {} members, BFS says {}", self.members[slot].len(), sizes[f]));
            }
            if self.members[slot].iter().any(|&x| self.label[x] != slot) {
                return Err(format!("slot {slot} lists a foreign node"));
            }
        }
        if sizes.len() != self.n_components {
            return Err(format!("{} components tracked, {} actual", self.n_components, sizes.len()));
        }
        let sum_sq: u64 = sizes.iter().map(|&s| (s * s) as u64).sum();
        if sum_sq != self.sum_sq {
            return Err("sum of squared sizes out of date".into());
        }
        if sizes.iter().sum::<usize>() != n {
            return Err("sizes do not sum to N".into());
        }
        let mut hist = vec![0usize; n + 1];
        sizes.iter().for_each(|&s| hist[s] += 1);
        if hist != self.size_hist {
            return Err("size histogram out of date".into());
        }
        if sizes.iter().copied().max().unwrap_or(0) != self.s_max {
            return Err("largest component out of date".into());
        }
        let pairs: u64 = sizes.iter().map(|&s| (s * (s.max(1) - 1)) as u64).sum();
        if (n * n.saturating_sub(1) - 2 * self.edge_count) as u64 != self.by_free.total() {
            return Err("absent-link weights out of date".into());
        }
        if pairs != self.by_pairs.total() || n as u64 != self.by_size.total() {
            return Err("sampling weights out of date".into());
        }
        let occupied = self.members.iter().filter(|m| !m.is_empty()).count();
        if occupied + self.free_slots.len() != n {
            return Err("slot free list out of date".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn path_graph(n: usize) -> Network {
        Network::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn path(nodes: &[usize]) -> PathSample {
        PathSample::new(nodes.to_vec())
    }

    #[test]
    fn removing_a_whole_path_graph_leaves_singletons() {
        let mut net = path_graph(4);
        let split = net.remove_path(&path(&[0, 1, 2, 3])).unwrap();
        assert_eq!(split, 4);
        assert_eq!(net.component_count(), 4);
        assert_eq!(net.edge_count(), 0);
        net.validate().unwrap();
    }

    #[test]
    fn removing_a_triangle_edge_keeps_it_connected() {
        let mut net = Network::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(net.remove_path(&path(&[0, 1])).unwrap(), 1);
        assert_eq!(net.component_count(), 1);
        net.validate().unwrap();
    }

    #[test]
    fn removing_a_missing_edge_is_an_error_and_changes_nothing() {
        let mut net = path_graph(4);
        let err = net.remove_path(&path(&[0, 1, 3])).unwrap_err();
        assert!(matches!(err, Error::MissingEdge(1, 3)));
        assert_eq!(net.edge_count(), 3);
        net.validate().unwrap();
    }

    #[test]
    fn add_link_merges_and_reports() {
        let mut net = Network::new(2);
        assert!(net.add_link(0, 1).unwrap());
        assert_eq!(net.component_count(), 1);
        assert_eq!(net.largest_component(), 2);

        let mut net = path_graph(4);
        assert!(!net.add_link(0, 3).unwrap());
        assert_eq!(net.edge_count(), 4);
        net.validate().unwrap();
    }

    #[test]
    fn add_link_rejects_loops_and_duplicates() {
        let mut net = path_graph(3);
        assert!(matches!(net.add_link(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(net.add_link(1, 0), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(net.add_link(0, 9), Err(Error::NodeOutOfRange { node: 9, .. })));
    }

    #[test]
    fn chaining_singletons_builds_one_component() {
        let n = 50;
        let mut net = Network::new(n);
        for i in 0..n - 1 {
            assert!(net.add_link(i, i + 1).unwrap());
        }
        assert_eq!(net.component_count(), 1);
        assert_eq!(net.largest_component(), n);
        net.validate().unwrap();
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(matches!(Network::from_edges(3, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            Network::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(Network::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn no_connected_pair_among_singletons() {
        let net = Network::new(5);
        assert_eq!(net.sample_connected_pair(&mut seeded(1)), None);
    }

    #[test]
    fn no_cross_pair_in_one_component() {
        let net = path_graph(5);
        assert_eq!(net.sample_cross_pair(&mut seeded(1)), None);
    }

    #[test]
    fn connected_pairs_stay_inside_the_triple() {
        // Components {0,1,2} and {3}.
        let net = Network::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let mut rng = seeded(3);
        let mut counts = [0usize; 3];
        let draws = 30_000;
        for _ in 0..draws {
            let (a, b) = net.sample_connected_pair(&mut rng).unwrap();
            let (a, b) = (a.min(b), a.max(b));
            assert!(b < 3);
            counts[a + b - 1] += 1; // (0,1)->0, (0,2)->1, (1,2)->2
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn cross_pairs_are_uniform() {
        // {0,1} and {2,3}: four cross pairs.
        let net = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let mut rng = seeded(5);
        let mut counts = std::collections::HashMap::new();
        let draws = 40_000;
        for _ in 0..draws {
            let (a, b) = net.sample_cross_pair(&mut rng).unwrap();
            assert!(!net.same_component(a, b));
            *counts.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4);
        for &c in counts.values() {
            assert!((c as f64 / draws as f64 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn nonadjacent_pair_absent_in_complete_graph() {
        let net = Network::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(net.is_complete());
        assert_eq!(net.sample_nonadjacent_pair(&mut seeded(0)), None);
    }

    #[test]
    fn nonadjacent_pairs_are_uniform() {
        // Star on 5 nodes plus one leaf-leaf edge: the 5 remaining leaf
        // pairs must be equally likely, through both sampling branches.
        let net = Network::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]).unwrap();
        let mut rng = seeded(21);
        let draws = 100_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            let (u, v) = net.sample_nonadjacent_pair(&mut rng).unwrap();
            assert!(!net.has_edge(u, v) && u != v);
            *counts.entry((u.min(v), u.max(v))).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 5);
        for &c in counts.values() {
            assert!((c as f64 / draws as f64 - 0.2).abs() < 0.01);
        }
    }

    #[test]
    fn random_cuts_and_links_keep_bookkeeping_exact() {
        use crate::graph::PathSampler;
        let mut rng = seeded(99);
        let n = 60;
        let mut net = Network::new(n);
        let mut sampler = PathSampler::new(n);
        for round in 0..3000 {
            for _ in 0..3 {
                if let Some((u, v)) = net.sample_nonadjacent_pair(&mut rng) {
                    net.add_link(u, v).unwrap();
                }
            }
            if let Some((u, v)) = net.sample_connected_pair(&mut rng) {
                let p = sampler.sample(&net, u, v, &mut rng).unwrap();
                let pieces = net.remove_path(&p).unwrap();
                assert!((1..=p.length() + 1).contains(&pieces));
            }
            if round % 50 == 0 {
                net.validate().unwrap();
            }
        }
        net.validate().unwrap();
    }
}
