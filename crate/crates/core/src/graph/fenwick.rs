/// Binary indexed tree over non-negative integer weights with
/// weighted-index sampling.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    total: u64,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
            total: 0,
        }
    }

    /// Adds `delta` (may be negative) to entry `i`. Intermediate nodes use
    /// wrapping arithmetic; every prefix sum stays non-negative.
    pub fn add(&mut self, i: usize, delta: i64) {
        let d = delta as u64;
        self.total = self.total.wrapping_add(d);
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] = self.tree[k].wrapping_add(d);
            k += k & k.wrapping_neg();
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sum of entries `0..i`.
    pub fn prefix(&self, i: usize) -> u64 {
        let mut k = i;
        let mut acc = 0u64;
        while k > 0 {
            acc = acc.wrapping_add(self.tree[k]);
            k &= k - 1;
        }
        acc
    }

    /// Index `i` with `prefix(i) <= x < prefix(i + 1)`. Requires `x < total()`.
    pub fn find(&self, mut x: u64) -> usize {
        debug_assert!(x < self.total);
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= x {
                pos = next;
                x -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_find_agree_with_linear_scan() {
        let weights = [3u64, 0, 5, 1, 0, 0, 7, 2, 4];
        let mut f = Fenwick::new(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            f.add(i, w as i64);
        }
        f.add(2, -3);
        f.add(4, 6);
        let w: Vec<u64> = vec![3, 0, 2, 1, 6, 0, 7, 2, 4];
        assert_eq!(f.total(), w.iter().sum::<u64>());
        let mut acc = 0;
        for (i, &wi) in w.iter().enumerate() {
            assert_eq!(f.prefix(i), acc);
            for x in acc..acc + wi {
                assert_eq!(f.find(x), i);
            }
            acc += wi;
        }
    }
}
