//! Seeded synthetic heterogeneous graphs.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). Each relation
//! draws from its own stream: the generator is seeded with
//! `seed_from_u64(relation.seed.unwrap_or(config.seed))` and switched to
//! stream number = the relation's position in the config. Output is
//! therefore a pure function of the config.
//!
//! Degree models:
//! - `uniform`: the requested number of distinct `(src, dst)` pairs drawn
//!   uniformly without replacement from all `n_src * n_dst` pairs.
//! - `powerlaw`: vertices of each side are ranked by a random permutation and
//!   weighted `(rank + 1)^(-1 / (exponent - 1))`. Source degrees are the
//!   weight-proportional share of the edge budget, capped at `n_dst` with
//!   the overflow redistributed; each source then draws its distinct
//!   destinations by weight.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HetGraph, RelationSpec, Schema, VertexType};
use crate::error::{Error, Result};

pub const DEFAULT_EXPONENT: f64 = 2.1;

/// Edges per source vertex used by the presets.
pub const PRESET_EDGES_PER_SOURCE: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DegreeModel {
    #[default]
    Uniform,
    Powerlaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRelation {
    pub name: String,
    pub src: String,
    pub dst: String,
    pub edges: u64,
    #[serde(default)]
    pub degree_model: DegreeModel,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_exponent() -> f64 {
    DEFAULT_EXPONENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub vertex_types: Vec<VertexType>,
    pub relations: Vec<SynthRelation>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Acm,
    Dblp,
    Imdb,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Acm, Preset::Dblp, Preset::Imdb];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Acm => "acm",
            Preset::Dblp => "dblp",
            Preset::Imdb => "imdb",
        }
    }

    /// `(type, vertex count, feature dim)`; a dim of 0 means no raw features.
    fn vertex_table(self) -> &'static [(&'static str, u32, u32)] {
        match self {
            Preset::Imdb => &[("M", 4932, 3489), ("D", 2393, 3341), ("A", 6124, 3341), ("K", 7971, 0)],
            Preset::Acm => &[("P", 3025, 1902), ("A", 5959, 1902), ("S", 56, 1902), ("T", 1902, 0)],
            Preset::Dblp => &[("A", 4057, 334), ("P", 14328, 4231), ("T", 7723, 50), ("V", 20, 0)],
        }
    }

    /// `(relation name, src, dst)`.
    fn relation_table(self) -> &'static [(&'static str, &'static str, &'static str)] {
        match self {
            Preset::Imdb => &[
                ("AM", "A", "M"),
                ("MA", "M", "A"),
                ("KM", "K", "M"),
                ("MK", "M", "K"),
                ("DM", "D", "M"),
                ("MD", "M", "D"),
            ],
            Preset::Acm => &[
                ("TP", "T", "P"),
                ("PT", "P", "T"),
                ("SP", "S", "P"),
                ("PS", "P", "S"),
                ("PP", "P", "P"),
                ("PP_rev", "P", "P"),
                ("AP", "A", "P"),
                ("PA", "P", "A"),
            ],
            Preset::Dblp => &[
                ("AP", "A", "P"),
                ("PA", "P", "A"),
                ("VP", "V", "P"),
                ("PV", "P", "V"),
                ("TP", "T", "P"),
                ("PT", "P", "T"),
            ],
        }
    }

    /// Preset config with vertex counts multiplied by `scale` (rounded, at
    /// least 1). Each relation asks for `PRESET_EDGES_PER_SOURCE` edges per
    /// source vertex, capped at the number of distinct pairs.
    pub fn config(self, scale: f64, seed: u64) -> Result<SynthConfig> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("scale must be positive, got {scale}")));
        }
        let vertex_types: Vec<VertexType> = self
            .vertex_table()
            .iter()
            .map(|&(name, count, dim)| VertexType {
                name: name.to_string(),
                count: ((f64::from(count) * scale).round() as u32).max(1),
                feature_dim: dim,
            })
            .collect();
        let count_of = |n: &str| {
            u64::from(vertex_types.iter().find(|t| t.name == n).expect("preset type").count)
        };
        let relations = self
            .relation_table()
            .iter()
            .map(|&(name, src, dst)| SynthRelation {
                name: name.to_string(),
                src: src.to_string(),
                dst: dst.to_string(),
                edges: (PRESET_EDGES_PER_SOURCE * count_of(src)).min(count_of(src) * count_of(dst)),
                degree_model: DegreeModel::Powerlaw,
                exponent: DEFAULT_EXPONENT,
                seed: None,
            })
            .collect();
        Ok(SynthConfig {
            vertex_types,
            relations,
            seed,
        })
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "acm" => Ok(Preset::Acm),
            "dblp" => Ok(Preset::Dblp),
            "imdb" => Ok(Preset::Imdb),
            other => Err(Error::InvalidConfig(format!("unknown preset `{other}`"))),
        }
    }
}

impl SynthConfig {
    pub fn schema(&self) -> Schema {
        Schema {
            vertex_types: self.vertex_types.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationSpec {
                    name: r.name.clone(),
                    src: r.src.clone(),
                    dst: r.dst.clone(),
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts: HashMap<&str, u64> = self
            .vertex_types
            .iter()
            .map(|t| (t.name.as_str(), u64::from(t.count)))
            .collect();
        for r in &self.relations {
            let n_src = *counts.get(r.src.as_str()).ok_or_else(|| Error::UnknownType(r.src.clone()))?;
            let n_dst = *counts.get(r.dst.as_str()).ok_or_else(|| Error::UnknownType(r.dst.clone()))?;
            let capacity = n_src * n_dst;
            if r.edges > capacity {
                return Err(Error::InfeasibleEdges {
                    relation: r.name.clone(),
                    requested: r.edges,
                    capacity,
                });
            }
            if r.degree_model == DegreeModel::Powerlaw && !(r.exponent > 1.0 && r.exponent.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "relation `{}`: power-law exponent must be > 1, got {}",
                    r.name, r.exponent
                )));
            }
        }
        Ok(())
    }
}

pub fn generate_synthetic(config: &SynthConfig) -> Result<HetGraph> {
    config.validate()?;
    let schema = config.schema();
    let count_of = |n: &str| config.vertex_types.iter().find(|t| t.name == n).map(|t| t.count).unwrap_or(0);
    let mut lists = Vec::with_capacity(config.relations.len());
    for (stream, rel) in config.relations.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(rel.seed.unwrap_or(config.seed));
        rng.set_stream(stream as u64);
        let n_src = count_of(&rel.src) as usize;
        let n_dst = count_of(&rel.dst) as usize;
        let edges = match rel.degree_model {
            DegreeModel::Uniform => uniform_edges(&mut rng, n_src, n_dst, rel.edges as usize),
            DegreeModel::Powerlaw => powerlaw_edges(&mut rng, n_src, n_dst, rel.edges as usize, rel.exponent),
        };
        debug_assert_eq!(edges.len() as u64, rel.edges);
        lists.push(edges);
    }
    HetGraph::from_edge_lists(&schema, lists)
}

fn uniform_edges(rng: &mut ChaCha8Rng, n_src: usize, n_dst: usize, edges: usize) -> Vec<(u32, u32)> {
    let capacity = n_src * n_dst;
    if edges == 0 {
        return Vec::new();
    }
    rand::seq::index::sample(rng, capacity, edges)
        .into_iter()
        .map(|i| ((i / n_dst) as u32, (i % n_dst) as u32))
        .collect()
}

fn rank_weights(n: usize, exponent: f64) -> Vec<f64> {
    let alpha = 1.0 / (exponent - 1.0);
    (0..n).map(|r| ((r + 1) as f64).powf(-alpha)).collect()
}

/// Splits `total` into integer shares proportional to `weights`, each at most
/// `cap`. Requires `total <= weights.len() * cap`.
pub(crate) fn allocate_capped(total: usize, weights: &[f64], cap: usize) -> Vec<usize> {
    let n = weights.len();
    let mut out = vec![0usize; n];
    let mut fixed = vec![false; n];
    let mut remaining = total;
    loop {
        let mass: f64 = (0..n).filter(|&i| !fixed[i]).map(|i| weights[i]).sum();
        if remaining == 0 || mass <= 0.0 {
            break;
        }
        let mut saturated = false;
        for i in 0..n {
            if !fixed[i] && remaining as f64 * weights[i] / mass >= cap as f64 {
                fixed[i] = true;
                out[i] = cap;
                saturated = true;
            }
        }
        if !saturated {
            break;
        }
        remaining = total - out.iter().sum::<usize>();
    }
    let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let mass: f64 = free.iter().map(|&i| weights[i]).sum();
    if remaining == 0 || free.is_empty() || mass <= 0.0 {
        return out;
    }
    let mut fractional = Vec::with_capacity(free.len());
    let mut assigned = 0usize;
    for &i in &free {
        let share = remaining as f64 * weights[i] / mass;
        let whole = (share.floor() as usize).min(cap);
        out[i] = whole;
        assigned += whole;
        fractional.push((share - whole as f64, i));
    }
    // Largest remainder first; ties go to the lower index.
    fractional.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = remaining - assigned;
    let mut k = 0;
    while left > 0 {
        let i = fractional[k % fractional.len()].1;
        if out[i] < cap {
            out[i] += 1;
            left -= 1;
        }
        k += 1;
    }
    out
}

fn powerlaw_edges(
    rng: &mut ChaCha8Rng,
    n_src: usize,
    n_dst: usize,
    edges: usize,
    exponent: f64,
) -> Vec<(u32, u32)> {
    if edges == 0 {
        return Vec::new();
    }
    let mut src_of_rank: Vec<u32> = (0..n_src as u32).collect();
    src_of_rank.shuffle(rng);
    let mut dst_of_rank: Vec<u32> = (0..n_dst as u32).collect();
    dst_of_rank.shuffle(rng);

    let degrees = allocate_capped(edges, &rank_weights(n_src, exponent), n_dst);
    let dst_weights = rank_weights(n_dst, exponent);
    let dst_dist = WeightedIndex::new(&dst_weights).expect("positive weights");

    let mut out = Vec::with_capacity(edges);
    let mut stamp = vec![usize::MAX; n_dst];
    for (rank, &deg) in degrees.iter().enumerate() {
        if deg == 0 {
            continue;
        }
        let u = src_of_rank[rank];
        if deg * 4 >= n_dst {
            let picked = rand::seq::index::sample_weighted(rng, n_dst, |i| dst_weights[i], deg)
                .expect("finite positive weights");
            out.extend(picked.into_iter().map(|r| (u, dst_of_rank[r])));
        } else {
            let mut got = 0;
            while got < deg {
                let r = dst_dist.sample(rng);
                if stamp[r] != rank {
                    stamp[r] = rank;
                    out.push((u, dst_of_rank[r]));
                    got += 1;
                }
            }
        }
    }
    out
}
