//! Boolean sparse join of two semantic graphs.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Csr, SemanticGraph};

/// Work counters for semantic graph construction.
///
/// `macs` counts junction probes: one per `(u, v, w)` with `(u, v)` in the
/// left operand and `(v, w)` in the right, i.e. `sum_v indeg(v) * outdeg(v)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub macs: u64,
    pub edges_read: u64,
    pub edges_written: u64,
    pub cache_hits: u64,
    pub segments_built: u64,
}

impl CostReport {
    pub fn accumulate(&mut self, other: &CostReport) {
        self.macs += other.macs;
        self.edges_read += other.edges_read;
        self.edges_written += other.edges_written;
        self.cache_hits += other.cache_hits;
        self.segments_built += other.segments_built;
    }
}

impl std::ops::AddAssign<&CostReport> for CostReport {
    fn add_assign(&mut self, rhs: &CostReport) {
        self.accumulate(rhs);
    }
}

/// `(u, w)` is an edge of the result iff some `v` has `(u, v)` in `left` and
/// `(v, w)` in `right`. Rows are merged with a dense marker over the right
/// operand's destinations and emitted sorted.
pub fn compose(left: &SemanticGraph, right: &SemanticGraph, counter: &mut CostReport) -> Result<SemanticGraph> {
    let label = left.label().join(right.label())?;
    let n_src = left.n_src();
    let n_dst = right.n_dst();
    let l = left.forward();
    let r = right.forward();

    let mut offsets = Vec::with_capacity(n_src + 1);
    offsets.push(0usize);
    let mut targets: Vec<u32> = Vec::new();
    let mut marker = vec![u32::MAX; n_dst];
    let mut row: Vec<u32> = Vec::new();
    let mut macs = 0u64;

    for u in 0..n_src {
        row.clear();
        for &v in l.row(u) {
            let neighbors = r.row(v as usize);
            macs += neighbors.len() as u64;
            for &w in neighbors {
                let m = &mut marker[w as usize];
                if *m != u as u32 {
                    *m = u as u32;
                    row.push(w);
                }
            }
        }
        // Dense rows are cheaper to emit by scanning the marker.
        if row.len() * 16 >= n_dst {
            targets.extend((0..n_dst as u32).filter(|&w| marker[w as usize] == u as u32));
        } else {
            row.sort_unstable();
            targets.extend_from_slice(&row);
        }
        offsets.push(targets.len());
    }

    let result = SemanticGraph::from_csr(label, Csr::from_raw(offsets, targets), n_dst);
    counter.macs += macs;
    counter.edges_read += (left.edge_count() + right.edge_count()) as u64;
    counter.edges_written += result.edge_count() as u64;
    counter.segments_built += 1;
    Ok(result)
}
