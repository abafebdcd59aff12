use serde::{Deserialize, Serialize};

use super::matching::Matching;
use crate::error::Result;
use crate::model::{Csr, SemanticGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgraphKind {
    /// `src_out -> dst_in`
    S1,
    /// `src_in -> dst_out`
    S2,
    /// `src_in -> dst_in`
    S3,
}

impl SubgraphKind {
    pub const ALL: [SubgraphKind; 3] = [SubgraphKind::S1, SubgraphKind::S2, SubgraphKind::S3];

    pub fn name(self) -> &'static str {
        match self {
            SubgraphKind::S1 => "gs1",
            SubgraphKind::S2 => "gs2",
            SubgraphKind::S3 => "gs3",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for SubgraphKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" | "gs1" => Ok(SubgraphKind::S1),
            "s2" | "gs2" => Ok(SubgraphKind::S2),
            "s3" | "gs3" => Ok(SubgraphKind::S3),
            other => Err(crate::Error::InvalidConfig(format!("unknown subgraph `{other}`"))),
        }
    }
}

/// One of the three partition subgraphs, compacted to its incident vertices.
///
/// Local ids index `src_ids` / `dst_ids`, which map back to parent ids and
/// are ascending, so local order follows parent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub kind: SubgraphKind,
    pub src_ids: Vec<u32>,
    pub dst_ids: Vec<u32>,
    pub forward: Csr,
    pub reverse: Csr,
}

impl Subgraph {
    /// Compacts parent-id edges into a subgraph.
    pub fn from_parent_edges(kind: SubgraphKind, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut src_ids: Vec<u32> = edges.iter().map(|e| e.0).collect();
        src_ids.dedup();
        let mut dst_ids: Vec<u32> = edges.iter().map(|e| e.1).collect();
        dst_ids.sort_unstable();
        dst_ids.dedup();
        let mut local: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(u, v)| {
                (
                    src_ids.binary_search(&u).expect("collected") as u32,
                    dst_ids.binary_search(&v).expect("collected") as u32,
                )
            })
            .collect();
        let forward = Csr::from_pairs(src_ids.len(), &mut local);
        let reverse = forward.transpose(dst_ids.len());
        Subgraph {
            kind,
            src_ids,
            dst_ids,
            forward,
            reverse,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.forward.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.nnz() == 0
    }

    /// Edges in local ids.
    pub fn local_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.forward.edges()
    }

    /// Edges mapped back to parent ids, sorted.
    pub fn parent_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.forward
            .edges()
            .map(|(u, v)| (self.src_ids[u as usize], self.dst_ids[v as usize]))
    }
}

/// Vertex classes around the graph backbone and the induced edge partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackbonePartition {
    pub n_src: usize,
    pub n_dst: usize,
    pub src_in: Vec<u32>,
    pub src_out: Vec<u32>,
    pub dst_in: Vec<u32>,
    pub dst_out: Vec<u32>,
    /// Indexed by [`SubgraphKind::index`].
    pub subgraphs: [Subgraph; 3],
}

impl BackbonePartition {
    pub fn subgraph(&self, kind: SubgraphKind) -> &Subgraph {
        &self.subgraphs[kind.index()]
    }

    /// Splits the edges of `sg` by endpoint class. Edges with both ends out
    /// belong to no subgraph; a valid classification has none.
    pub fn from_classes(sg: &SemanticGraph, src_is_in: &[bool], dst_is_in: &[bool]) -> Self {
        let mut parts: [Vec<(u32, u32)>; 3] = Default::default();
        for (u, v) in sg.edges() {
            match (src_is_in[u as usize], dst_is_in[v as usize]) {
                (false, true) => parts[0].push((u, v)),
                (true, false) => parts[1].push((u, v)),
                (true, true) => parts[2].push((u, v)),
                (false, false) => {}
            }
        }
        let split = |flags: &[bool]| {
            let (mut ins, mut outs) = (Vec::new(), Vec::new());
            for (i, &f) in flags.iter().enumerate() {
                if f {
                    ins.push(i as u32)
                } else {
                    outs.push(i as u32)
                }
            }
            (ins, outs)
        };
        let (src_in, src_out) = split(src_is_in);
        let (dst_in, dst_out) = split(dst_is_in);
        let [p1, p2, p3] = parts;
        BackbonePartition {
            n_src: sg.n_src(),
            n_dst: sg.n_dst(),
            src_in,
            src_out,
            dst_in,
            dst_out,
            subgraphs: [
                Subgraph::from_parent_edges(SubgraphKind::S1, p1),
                Subgraph::from_parent_edges(SubgraphKind::S2, p2),
                Subgraph::from_parent_edges(SubgraphKind::S3, p3),
            ],
        }
    }
}

/// Selects the backbone from a maximal matching and partitions the edges.
///
/// Matched sources with unmatched neighbors go in, and those neighbors go
/// out; then the same for matched destinations. Matched vertices left over
/// (all neighbors matched) also go in, and every remaining vertex goes out,
/// so the backbone is exactly the matched vertex set and no edge can join
/// two outside vertices.
pub fn recouple(sg: &SemanticGraph, m: &Matching) -> Result<BackbonePartition> {
    m.validate(sg)?;
    #[derive(Clone, Copy, PartialEq)]
    enum Class {
        Unassigned,
        In,
        Out,
    }
    let mut src = vec![Class::Unassigned; sg.n_src()];
    let mut dst = vec![Class::Unassigned; sg.n_dst()];

    for u in 0..sg.n_src() as u32 {
        if m.src_mate(u).is_none() {
            continue;
        }
        let mut free = sg.out_neighbors(u).iter().filter(|&&v| m.dst_mate(v).is_none()).peekable();
        if free.peek().is_some() {
            src[u as usize] = Class::In;
            for &v in free {
                dst[v as usize] = Class::Out;
            }
        }
    }
    for v in 0..sg.n_dst() as u32 {
        if m.dst_mate(v).is_none() {
            continue;
        }
        let mut free = sg.in_neighbors(v).iter().filter(|&&u| m.src_mate(u).is_none()).peekable();
        if free.peek().is_some() {
            dst[v as usize] = Class::In;
            for &u in free {
                src[u as usize] = Class::Out;
            }
        }
    }
    let settle = |class: Class, matched: bool| match class {
        Class::Unassigned if matched => true,
        Class::Unassigned => false,
        c => c == Class::In,
    };
    let src_is_in: Vec<bool> = (0..sg.n_src())
        .map(|u| settle(src[u], m.src_mate(u as u32).is_some()))
        .collect();
    let dst_is_in: Vec<bool> = (0..sg.n_dst())
        .map(|v| settle(dst[v], m.dst_mate(v as u32).is_some()))
        .collect();
    Ok(BackbonePartition::from_classes(sg, &src_is_in, &dst_is_in))
}
