//! Graph decoupling and recoupling.
//!
//! [`decouple`] finds a maximum matching of a semantic graph; its matched
//! vertices form the graph backbone, which touches every edge. [`recouple`]
//! classifies vertices as in/out of the backbone and splits the edges into
//! `gs1` (`src_out -> dst_in`), `gs2` (`src_in -> dst_out`) and `gs3`
//! (`src_in -> dst_in`). No edge joins two outside vertices.

mod matching;
mod recouple;
mod verify;

pub use matching::{decouple, Matching, SearchState, UNMATCHED};
pub use recouple::{recouple, BackbonePartition, Subgraph, SubgraphKind};
pub use verify::{verify_partition, Check, Diagnostics};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::io::{read_edge_file, write_edge_file, write_json};
use crate::model::{Metapath, SemanticGraph};

pub const PARTITION_FILE: &str = "partition.json";

/// Decouple, recouple and verify. A failed verification is an internal error.
pub fn restructure(sg: &SemanticGraph) -> Result<(Matching, BackbonePartition)> {
    let m = decouple(sg);
    let p = recouple(sg, &m)?;
    let diag = verify_partition(sg, &p);
    if !diag.passed() {
        let names: Vec<&str> = diag.failures().map(|c| c.name.as_str()).collect();
        return Err(Error::Internal(format!(
            "partition of {} failed verification: {}",
            sg.label(),
            names.join(", ")
        )));
    }
    Ok((m, p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub edges: usize,
    pub matching_size: usize,
    pub src_in: usize,
    pub src_out: usize,
    pub dst_in: usize,
    pub dst_out: usize,
    pub gs1_edges: usize,
    pub gs2_edges: usize,
    pub gs3_edges: usize,
}

impl PartitionStats {
    pub fn new(m: &Matching, p: &BackbonePartition) -> Self {
        PartitionStats {
            edges: p.subgraphs.iter().map(Subgraph::edge_count).sum(),
            matching_size: m.size(),
            src_in: p.src_in.len(),
            src_out: p.src_out.len(),
            dst_in: p.dst_in.len(),
            dst_out: p.dst_out.len(),
            gs1_edges: p.subgraph(SubgraphKind::S1).edge_count(),
            gs2_edges: p.subgraph(SubgraphKind::S2).edge_count(),
            gs3_edges: p.subgraph(SubgraphKind::S3).edge_count(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SubgraphDoc {
    name: SubgraphKind,
    file: String,
    edges: usize,
    src_ids: Vec<u32>,
    dst_ids: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PartitionDoc {
    label: Metapath,
    n_src: usize,
    n_dst: usize,
    src_in: Vec<u32>,
    src_out: Vec<u32>,
    dst_in: Vec<u32>,
    dst_out: Vec<u32>,
    matching: Matching,
    subgraphs: Vec<SubgraphDoc>,
}

/// Writes `partition.json` and `gs1.edges`..`gs3.edges` (local ids; the
/// JSON holds the local-to-parent id maps).
pub fn write_partition(dir: &Path, label: &Metapath, m: &Matching, p: &BackbonePartition) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut subgraphs = Vec::new();
    for sub in &p.subgraphs {
        let file = format!("{}.edges", sub.kind.name());
        write_edge_file(&dir.join(&file), sub.local_edges())?;
        subgraphs.push(SubgraphDoc {
            name: sub.kind,
            file,
            edges: sub.edge_count(),
            src_ids: sub.src_ids.clone(),
            dst_ids: sub.dst_ids.clone(),
        });
    }
    let doc = PartitionDoc {
        label: label.clone(),
        n_src: p.n_src,
        n_dst: p.n_dst,
        src_in: p.src_in.clone(),
        src_out: p.src_out.clone(),
        dst_in: p.dst_in.clone(),
        dst_out: p.dst_out.clone(),
        matching: m.clone(),
        subgraphs,
    };
    write_json(&dir.join(PARTITION_FILE), &doc)
}

pub fn read_partition(dir: &Path) -> Result<(Metapath, Matching, BackbonePartition)> {
    let path = dir.join(PARTITION_FILE);
    if !path.exists() {
        return Err(Error::MissingFile(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let doc: PartitionDoc = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    let mut subs: Vec<Option<Subgraph>> = vec![None, None, None];
    for sd in &doc.subgraphs {
        let file = dir.join(&sd.file);
        let mut parent = Vec::new();
        for (line, u, v) in read_edge_file(&file)? {
            let (Some(&pu), Some(&pv)) = (sd.src_ids.get(u as usize), sd.dst_ids.get(v as usize)) else {
                return Err(Error::Parse {
                    path: file.clone(),
                    line,
                    msg: format!("local id ({u}, {v}) outside the id map"),
                });
            };
            parent.push((pu, pv));
        }
        let sub = Subgraph::from_parent_edges(sd.name, parent);
        if sub.src_ids != sd.src_ids || sub.dst_ids != sd.dst_ids {
            return Err(Error::Schema(format!("{}: id map lists vertices without edges", sd.file)));
        }
        subs[sd.name.index()] = Some(sub);
    }
    let take = |k: SubgraphKind, subs: &mut Vec<Option<Subgraph>>| {
        subs[k.index()]
            .take()
            .ok_or_else(|| Error::Schema(format!("{PARTITION_FILE}: missing subgraph {}", k.name())))
    };
    let s1 = take(SubgraphKind::S1, &mut subs)?;
    let s2 = take(SubgraphKind::S2, &mut subs)?;
    let s3 = take(SubgraphKind::S3, &mut subs)?;
    let p = BackbonePartition {
        n_src: doc.n_src,
        n_dst: doc.n_dst,
        src_in: doc.src_in,
        src_out: doc.src_out,
        dst_in: doc.dst_in,
        dst_out: doc.dst_out,
        subgraphs: [s1, s2, s3],
    };
    Ok((doc.label, doc.matching, p))
}
