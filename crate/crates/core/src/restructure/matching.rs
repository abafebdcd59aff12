use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SemanticGraph;

pub const UNMATCHED: u32 = u32::MAX;

/// Mutual source/destination match arrays of a bipartite matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    #[serde(with = "opt_ids")]
    match_src: Vec<u32>,
    #[serde(with = "opt_ids")]
    match_dst: Vec<u32>,
    size: usize,
}

impl Matching {
    pub fn empty(n_src: usize, n_dst: usize) -> Self {
        Matching {
            match_src: vec![UNMATCHED; n_src],
            match_dst: vec![UNMATCHED; n_dst],
            size: 0,
        }
    }

    /// Builds from `(src, dst)` pairs without checking them against a graph.
    pub fn from_pairs(n_src: usize, n_dst: usize, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut m = Matching::empty(n_src, n_dst);
        for &(u, v) in pairs {
            if u as usize >= n_src || v as usize >= n_dst {
                return Err(Error::InvalidMatching(format!("pair ({u}, {v}) out of range")));
            }
            if m.match_src[u as usize] != UNMATCHED || m.match_dst[v as usize] != UNMATCHED {
                return Err(Error::InvalidMatching(format!("vertex of pair ({u}, {v}) matched twice")));
            }
            m.match_src[u as usize] = v;
            m.match_dst[v as usize] = u;
            m.size += 1;
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn src_mate(&self, u: u32) -> Option<u32> {
        Some(self.match_src[u as usize]).filter(|&v| v != UNMATCHED)
    }

    pub fn dst_mate(&self, v: u32) -> Option<u32> {
        Some(self.match_dst[v as usize]).filter(|&u| u != UNMATCHED)
    }

    pub fn match_src(&self) -> &[u32] {
        &self.match_src
    }

    pub fn match_dst(&self) -> &[u32] {
        &self.match_dst
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.match_src
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != UNMATCHED)
            .map(|(u, &v)| (u as u32, v))
    }

    /// Checks mutuality, that every pair is an edge, and maximality.
    pub fn validate(&self, sg: &SemanticGraph) -> Result<()> {
        if self.match_src.len() != sg.n_src() || self.match_dst.len() != sg.n_dst() {
            return Err(Error::InvalidMatching(format!(
                "matching covers {}x{} vertices, graph has {}x{}",
                self.match_src.len(),
                self.match_dst.len(),
                sg.n_src(),
                sg.n_dst()
            )));
        }
        let mut count = 0;
        for (u, &v) in self.match_src.iter().enumerate() {
            if v == UNMATCHED {
                continue;
            }
            count += 1;
            if v as usize >= self.match_dst.len() || self.match_dst[v as usize] != u as u32 {
                return Err(Error::InvalidMatching(format!("src {u} -> dst {v} is not mutual")));
            }
            if !sg.has_edge(u as u32, v) {
                return Err(Error::InvalidMatching(format!("pair ({u}, {v}) is not an edge")));
            }
        }
        for (v, &u) in self.match_dst.iter().enumerate() {
            if u != UNMATCHED && (u as usize >= self.match_src.len() || self.match_src[u as usize] != v as u32) {
                return Err(Error::InvalidMatching(format!("dst {v} -> src {u} is not mutual")));
            }
        }
        if count != self.size {
            return Err(Error::InvalidMatching(format!("size {} but {count} pairs", self.size)));
        }
        if let Some((u, v)) = sg
            .edges()
            .find(|&(u, v)| self.match_src[u as usize] == UNMATCHED && self.match_dst[v as usize] == UNMATCHED)
        {
            return Err(Error::InvalidMatching(format!("not maximal: edge ({u}, {v}) has both ends free")));
        }
        Ok(())
    }
}

/// Working storage for the alternating-path search.
///
/// `search_list` is the FIFO of sources still to expand, `reached_from[v]`
/// records the source through which destination `v` was first reached, and
/// `visited` stamps destinations with the current search epoch.
#[derive(Debug)]
pub struct SearchState {
    search_list: VecDeque<u32>,
    reached_from: Vec<u32>,
    visited: Vec<u32>,
    epoch: u32,
}

impl SearchState {
    fn new(n_dst: usize) -> Self {
        SearchState {
            search_list: VecDeque::new(),
            reached_from: vec![UNMATCHED; n_dst],
            visited: vec![0; n_dst],
            epoch: 1,
        }
    }
}

/// Maximum-cardinality matching by breadth-first alternating-path
/// augmentation.
///
/// Sources are tried in ascending id order and neighbors in CSR order, so
/// the result is deterministic. After a failed search the visited stamps are
/// kept: nothing reachable from a failed root can reach a free destination
/// until the matching changes, which only happens on success.
pub fn decouple(sg: &SemanticGraph) -> Matching {
    let mut m = Matching::empty(sg.n_src(), sg.n_dst());
    let mut st = SearchState::new(sg.n_dst());
    for root in 0..sg.n_src() as u32 {
        if sg.out_neighbors(root).is_empty() {
            continue;
        }
        if let Some(free) = search(sg, &m, &mut st, root) {
            augment(&mut m, &st, free);
            st.epoch += 1;
        }
    }
    m
}

fn search(sg: &SemanticGraph, m: &Matching, st: &mut SearchState, root: u32) -> Option<u32> {
    st.search_list.clear();
    st.search_list.push_back(root);
    while let Some(u) = st.search_list.pop_front() {
        for &v in sg.out_neighbors(u) {
            if st.visited[v as usize] == st.epoch {
                continue;
            }
            st.visited[v as usize] = st.epoch;
            st.reached_from[v as usize] = u;
            match m.match_dst[v as usize] {
                UNMATCHED => return Some(v),
                mate => st.search_list.push_back(mate),
            }
        }
    }
    None
}

/// Flips the alternating path ending at free destination `v`.
fn augment(m: &mut Matching, st: &SearchState, mut v: u32) {
    loop {
        let u = st.reached_from[v as usize];
        let previous = m.match_src[u as usize];
        m.match_src[u as usize] = v;
        m.match_dst[v as usize] = u;
        if previous == UNMATCHED {
            break;
        }
        v = previous;
    }
    m.size += 1;
}

mod opt_ids {
    use super::UNMATCHED;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ids: &[u32], s: S) -> Result<S::Ok, S::Error> {
        let opts: Vec<Option<u32>> = ids.iter().map(|&v| (v != UNMATCHED).then_some(v)).collect();
        opts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u32>, D::Error> {
        let opts: Vec<Option<u32>> = Vec::deserialize(d)?;
        Ok(opts.into_iter().map(|o| o.unwrap_or(UNMATCHED)).collect())
    }
}
