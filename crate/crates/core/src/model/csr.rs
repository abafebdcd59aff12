/// Compressed sparse row adjacency with sorted, duplicate-free rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    pub fn empty(n_rows: usize) -> Self {
        Csr {
            offsets: vec![0; n_rows + 1],
            targets: Vec::new(),
        }
    }

    /// Builds from an unordered pair list. Pairs are sorted and deduplicated
    /// in place; callers must have bounds-checked rows already.
    pub fn from_pairs(n_rows: usize, pairs: &mut Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n_rows + 1];
        for &(r, _) in pairs.iter() {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..n_rows {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, c)| c).collect();
        Csr { offsets, targets }
    }

    /// Assembles from raw parts. Rows must already be sorted and unique.
    pub fn from_raw(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        debug_assert!(!offsets.is_empty());
        debug_assert_eq!(*offsets.last().unwrap(), targets.len());
        debug_assert!(offsets.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!((0..offsets.len() - 1)
            .all(|r| targets[offsets[r]..offsets[r + 1]].windows(2).all(|w| w[0] < w[1])));
        Csr { offsets, targets }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }

    #[inline]
    pub fn degree(&self, r: usize) -> usize {
        self.offsets[r + 1] - self.offsets[r]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn contains(&self, r: usize, c: u32) -> bool {
        r < self.n_rows() && self.row(r).binary_search(&c).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n_rows()).flat_map(move |r| self.row(r).iter().map(move |&c| (r as u32, c)))
    }

    /// Counting-sort transpose; rows of the result come out sorted.
    pub fn transpose(&self, n_cols: usize) -> Csr {
        let mut offsets = vec![0usize; n_cols + 1];
        for &c in &self.targets {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..n_cols {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; self.targets.len()];
        for r in 0..self.n_rows() {
            for &c in self.row(r) {
                let slot = &mut cursor[c as usize];
                targets[*slot] = r as u32;
                *slot += 1;
            }
        }
        Csr { offsets, targets }
    }

    pub fn byte_size(&self) -> usize {
        self.offsets.len() * std::mem::size_of::<usize>()
            + self.targets.len() * std::mem::size_of::<u32>()
    }
}
