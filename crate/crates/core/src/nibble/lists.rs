//! Per-vertex colour lists stored as one bitset row per vertex.

#[derive(Clone, Debug)]
pub(crate) struct ColourLists {
    words: usize,
    bits: Vec<u64>,
    len: Vec<usize>,
}

impl ColourLists {
    pub fn full(n: usize, palette: usize) -> Self {
        let words = palette.div_ceil(64).max(1);
        let mut row = vec![u64::MAX; words];
        let tail = palette % 64;
        if tail != 0 {
            row[words - 1] = (1u64 << tail) - 1;
        }
        if palette == 0 {
            row[0] = 0;
        }
        let mut bits = Vec::with_capacity(n * words);
        for _ in 0..n {
            bits.extend_from_slice(&row);
        }
        ColourLists {
            words,
            bits,
            len: vec![palette; n],
        }
    }

    /// A single-row copy of `row`.
    pub fn from_row(row: &[u64]) -> Self {
        ColourLists {
            words: row.len(),
            bits: row.to_vec(),
            len: vec![row.iter().map(|w| w.count_ones() as usize).sum()],
        }
    }

    pub fn len(&self, v: usize) -> usize {
        self.len[v]
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn contains(&self, v: usize, c: usize) -> bool {
        self.row(v)[c / 64] >> (c % 64) & 1 == 1
    }

    /// Clears `c`; returns whether it was present.
    pub fn remove(&mut self, v: usize, c: usize) -> bool {
        let word = &mut self.bits[v * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        if *word & mask == 0 {
            return false;
        }
        *word &= !mask;
        self.len[v] -= 1;
        true
    }

    /// The `k`-th smallest colour in `v`'s list.
    pub fn nth(&self, v: usize, mut k: usize) -> usize {
        for (i, &word) in self.row(v).iter().enumerate() {
            let ones = word.count_ones() as usize;
            if k < ones {
                let mut w = word;
                for _ in 0..k {
                    w &= w - 1;
                }
                return i * 64 + w.trailing_zeros() as usize;
            }
            k -= ones;
        }
        panic!("list of vertex {v} has fewer than {} colours", k + 1);
    }

    pub fn iter(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_and_remove() {
        let mut lists = ColourLists::full(2, 130);
        assert_eq!(lists.len(0), 130);
        assert_eq!(lists.iter(1).count(), 130);
        assert_eq!(lists.nth(0, 129), 129);
        assert!(lists.remove(0, 64));
        assert!(!lists.remove(0, 64));
        assert_eq!(lists.nth(0, 64), 65);
        assert_eq!(lists.len(0), 129);
        assert!(!lists.contains(0, 64) && lists.contains(1, 64));
        let empty = ColourLists::full(1, 0);
        assert_eq!(empty.iter(0).count(), 0);
    }
}
