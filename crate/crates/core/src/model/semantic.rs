use super::{Csr, Metapath};

/// Directed bipartite graph connecting the first and last vertex types of a
/// metapath. Adjacency is boolean; both directions are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticGraph {
    label: Metapath,
    forward: Csr,
    reverse: Csr,
}

impl SemanticGraph {
    /// `forward` must have `n_src` rows; `n_dst` sizes the reverse index.
    pub fn from_csr(label: Metapath, forward: Csr, n_dst: usize) -> Self {
        let reverse = forward.transpose(n_dst);
        SemanticGraph {
            label,
            forward,
            reverse,
        }
    }

    pub fn from_edges(label: Metapath, n_src: usize, n_dst: usize, mut edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges
            .iter()
            .all(|&(u, v)| (u as usize) < n_src && (v as usize) < n_dst));
        let forward = Csr::from_pairs(n_src, &mut edges);
        Self::from_csr(label, forward, n_dst)
    }

    pub fn label(&self) -> &Metapath {
        &self.label
    }

    pub fn src_type(&self) -> &str {
        self.label.first()
    }

    pub fn dst_type(&self) -> &str {
        self.label.last()
    }

    pub fn n_src(&self) -> usize {
        self.forward.n_rows()
    }

    pub fn n_dst(&self) -> usize {
        self.reverse.n_rows()
    }

    pub fn edge_count(&self) -> usize {
        self.forward.nnz()
    }

    pub fn forward(&self) -> &Csr {
        &self.forward
    }

    pub fn reverse(&self) -> &Csr {
        &self.reverse
    }

    pub fn out_neighbors(&self, src: u32) -> &[u32] {
        self.forward.row(src as usize)
    }

    pub fn in_neighbors(&self, dst: u32) -> &[u32] {
        self.reverse.row(dst as usize)
    }

    pub fn has_edge(&self, src: u32, dst: u32) -> bool {
        self.forward.contains(src as usize, dst)
    }

    /// Edges in `(src, dst)` order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.forward.edges()
    }

    /// Same graph with sources and destinations swapped and the label reversed.
    pub fn reversed(&self) -> SemanticGraph {
        let mut types = self.label.types().to_vec();
        types.reverse();
        SemanticGraph {
            label: Metapath::new(types).expect("reversal keeps length"),
            forward: self.reverse.clone(),
            reverse: self.forward.clone(),
        }
    }

    pub fn byte_size(&self) -> usize {
        self.forward.byte_size() + self.reverse.byte_size()
    }
}
