//! Neighbor-aggregation buffer simulation.
//!
//! The access trace visits destinations of each execution unit in ascending
//! id order and, for every destination, reads the feature of each source
//! neighbor in ascending id order. The buffer is fully associative with LRU
//! replacement and holds `capacity` source features. It is not flushed
//! between the units of one schedule.
//!
//! A miss on a feature that was fetched before is a replacement: the feature
//! was evicted and has to come back from DRAM. A vertex with `k`
//! replacements therefore costs `k + 1` DRAM accesses.

mod lru;

pub use lru::LruBuffer;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SemanticGraph;
use crate::restructure::{BackbonePartition, Subgraph, SubgraphKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    #[default]
    Lru,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Buffer size in vertex features.
    pub capacity: usize,
    pub feature_bytes: u64,
    #[serde(default)]
    pub policy: Policy,
}

impl SimConfig {
    pub fn new(capacity: usize, feature_bytes: u64) -> Self {
        SimConfig {
            capacity,
            feature_bytes,
            policy: Policy::Lru,
        }
    }

    /// Capacity given in bytes, floor-divided by the feature size.
    pub fn from_bytes(capacity_bytes: u64, feature_bytes: u64) -> Result<Self> {
        if feature_bytes == 0 {
            return Err(Error::InvalidConfig("feature size must be positive".into()));
        }
        Ok(SimConfig::new((capacity_bytes / feature_bytes) as usize, feature_bytes))
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity < 1 {
            return Err(Error::InvalidConfig("buffer capacity must be at least one feature".into()));
        }
        Ok(())
    }
}

/// One execution unit of a schedule.
#[derive(Debug, Clone, Copy)]
pub enum Unit<'a> {
    Whole(&'a SemanticGraph),
    Sub(&'a Subgraph),
}

impl Unit<'_> {
    fn n_dst(&self) -> usize {
        match self {
            Unit::Whole(g) => g.n_dst(),
            Unit::Sub(s) => s.dst_ids.len(),
        }
    }

    /// Number of source ids the unit may reference (parent id space).
    fn src_span(&self) -> usize {
        match self {
            Unit::Whole(g) => g.n_src(),
            Unit::Sub(s) => s.src_ids.last().map_or(0, |&m| m as usize + 1),
        }
    }

    pub fn accesses(&self) -> usize {
        match self {
            Unit::Whole(g) => g.edge_count(),
            Unit::Sub(s) => s.edge_count(),
        }
    }

    /// Calls `f` with parent source ids in trace order.
    fn replay(&self, mut f: impl FnMut(u32)) {
        match self {
            Unit::Whole(g) => {
                for v in 0..g.n_dst() as u32 {
                    g.in_neighbors(v).iter().for_each(|&u| f(u));
                }
            }
            Unit::Sub(s) => {
                for v in 0..self.n_dst() {
                    s.reverse.row(v).iter().for_each(|&lu| f(s.src_ids[lu as usize]));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub replacements: u64,
    pub vertices: u64,
    pub dram_accesses: u64,
    pub ratio_vertex: f64,
    pub ratio_access: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub total_accesses: u64,
    pub hits: u64,
    pub cold_misses: u64,
    pub replacements: u64,
    /// Features pushed out of the buffer, refetched later or not.
    pub evictions: u64,
    pub dram_accesses: u64,
    pub dram_bytes: u64,
    pub distinct_sources: u64,
    /// Sources with at least one replacement.
    pub per_vertex_replacements: BTreeMap<u32, u64>,
    pub histogram: Vec<HistogramBucket>,
}

/// Scalar counters of a [`SimReport`] without the per-vertex detail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimSummary {
    pub total_accesses: u64,
    pub hits: u64,
    pub cold_misses: u64,
    pub replacements: u64,
    pub evictions: u64,
    pub dram_accesses: u64,
    pub dram_bytes: u64,
    pub distinct_sources: u64,
    pub vertices_with_replacements: u64,
    pub max_replacements: u64,
}

impl SimReport {
    pub fn misses(&self) -> u64 {
        self.dram_accesses
    }

    pub fn summary(&self) -> SimSummary {
        SimSummary {
            total_accesses: self.total_accesses,
            hits: self.hits,
            cold_misses: self.cold_misses,
            replacements: self.replacements,
            evictions: self.evictions,
            dram_accesses: self.dram_accesses,
            dram_bytes: self.dram_bytes,
            distinct_sources: self.distinct_sources,
            vertices_with_replacements: self.per_vertex_replacements.len() as u64,
            max_replacements: self.per_vertex_replacements.values().copied().max().unwrap_or(0),
        }
    }

    /// `replacements,ratio_vertex,ratio_access` rows.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("replacements,ratio_vertex,ratio_access\n");
        for b in &self.histogram {
            out.push_str(&format!("{},{},{}\n", b.replacements, b.ratio_vertex, b.ratio_access));
        }
        out
    }
}

/// Replays the units in order against one buffer.
pub fn simulate_na(units: &[Unit<'_>], config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let span = units.iter().map(Unit::src_span).max().unwrap_or(0);
    let mut buf = LruBuffer::new(config.capacity, span);
    let mut fetches = vec![0u64; span];
    let mut total = 0u64;
    let mut hits = 0u64;
    for unit in units {
        unit.replay(|u| {
            total += 1;
            if buf.access(u) {
                hits += 1;
            } else {
                fetches[u as usize] += 1;
            }
        });
    }

    let dram_accesses = total - hits;
    let mut per_vertex = BTreeMap::new();
    let mut by_k: BTreeMap<u64, u64> = BTreeMap::new();
    let mut distinct = 0u64;
    for (u, &f) in fetches.iter().enumerate() {
        if f == 0 {
            continue;
        }
        distinct += 1;
        if f > 1 {
            per_vertex.insert(u as u32, f - 1);
        }
        *by_k.entry(f - 1).or_default() += 1;
    }
    let cold = distinct;
    let max_k = by_k.keys().next_back().copied();
    let histogram = match max_k {
        None => Vec::new(),
        Some(max_k) => (0..=max_k)
            .map(|k| {
                let vertices = by_k.get(&k).copied().unwrap_or(0);
                let acc = vertices * (k + 1);
                HistogramBucket {
                    replacements: k,
                    vertices,
                    dram_accesses: acc,
                    ratio_vertex: vertices as f64 / distinct as f64,
                    ratio_access: acc as f64 / dram_accesses as f64,
                }
            })
            .collect(),
    };
    Ok(SimReport {
        total_accesses: total,
        hits,
        cold_misses: cold,
        replacements: dram_accesses - cold,
        evictions: buf.evictions(),
        dram_accesses,
        dram_bytes: dram_accesses * config.feature_bytes,
        distinct_sources: distinct,
        per_vertex_replacements: per_vertex,
        histogram,
    })
}

pub const DEFAULT_SCHEDULE: [SubgraphKind; 3] = [SubgraphKind::S2, SubgraphKind::S3, SubgraphKind::S1];

/// `gs2, gs3, gs1`, skipping empty subgraphs.
pub fn schedule_restructured(p: &BackbonePartition) -> Vec<&Subgraph> {
    schedule_with_order(p, &DEFAULT_SCHEDULE).expect("default order is a permutation")
}

/// Subgraphs in a caller-chosen order, skipping empty ones. Each kind may
/// appear at most once.
pub fn schedule_with_order<'p>(p: &'p BackbonePartition, order: &[SubgraphKind]) -> Result<Vec<&'p Subgraph>> {
    let mut seen = [false; 3];
    for k in order {
        if std::mem::replace(&mut seen[k.index()], true) {
            return Err(Error::InvalidConfig(format!("subgraph {} scheduled twice", k.name())));
        }
    }
    Ok(order.iter().map(|&k| p.subgraph(k)).filter(|s| !s.is_empty()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutComparison {
    pub original: SimReport,
    pub restructured: SimReport,
    /// `1 - restructured / original` replacements; 0 when the original has none.
    pub replacement_reduction: f64,
    /// `restructured / original` DRAM bytes; 1 when the original has none.
    pub dram_bytes_ratio: f64,
}

pub fn compare_layouts(sg: &SemanticGraph, p: &BackbonePartition, config: &SimConfig) -> Result<LayoutComparison> {
    compare_layouts_with_order(sg, p, config, &DEFAULT_SCHEDULE)
}

pub fn compare_layouts_with_order(
    sg: &SemanticGraph,
    p: &BackbonePartition,
    config: &SimConfig,
    order: &[SubgraphKind],
) -> Result<LayoutComparison> {
    if p.n_src != sg.n_src() || p.n_dst != sg.n_dst() {
        return Err(Error::InvalidConfig(format!(
            "partition is {}x{} but graph {} is {}x{}",
            p.n_src,
            p.n_dst,
            sg.label(),
            sg.n_src(),
            sg.n_dst()
        )));
    }
    let original = simulate_na(&[Unit::Whole(sg)], config)?;
    let units: Vec<Unit> = schedule_with_order(p, order)?.into_iter().map(Unit::Sub).collect();
    let restructured = simulate_na(&units, config)?;
    let replacement_reduction = if original.replacements == 0 {
        0.0
    } else {
        1.0 - restructured.replacements as f64 / original.replacements as f64
    };
    let dram_bytes_ratio = if original.dram_bytes == 0 {
        1.0
    } else {
        restructured.dram_bytes as f64 / original.dram_bytes as f64
    };
    Ok(LayoutComparison {
        original,
        restructured,
        replacement_reduction,
        dram_bytes_ratio,
    })
}
