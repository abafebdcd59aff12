//! Semantic graph construction with trie-guided reuse.
//!
//! [`SemanticBuilder`] owns a [`Ctt`] and the cache of materialized semantic
//! graphs whose keys are exactly the trie's terminal paths. In
//! [`BuildMode::Ctt`] a target is split into cached segments and the result
//! is inserted back; [`BuildMode::Naive`] joins one-hop graphs left to right
//! and keeps nothing between targets.

mod compose;
mod ctt;
mod sweep;

pub use compose::{compose, CostReport};
pub use ctt::{Ctt, CttNode, GenerationPlan, NodeId, ROOT};
pub use sweep::{hop_sweep, reduction_pct, SweepRow, SWEEP_CSV_HEADER};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HetGraph, Metapath, SemanticGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildMode {
    Ctt,
    Naive,
}

impl fmt::Display for BuildMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuildMode::Ctt => "ctt",
            BuildMode::Naive => "naive",
        })
    }
}

impl FromStr for BuildMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ctt" => Ok(BuildMode::Ctt),
            "naive" => Ok(BuildMode::Naive),
            other => Err(Error::InvalidConfig(format!("unknown build mode `{other}`"))),
        }
    }
}

/// Materialized semantic graphs keyed by metapath.
#[derive(Debug, Default, Clone)]
pub struct SemanticCache {
    graphs: HashMap<Metapath, Arc<SemanticGraph>>,
    bytes: usize,
}

impl SemanticCache {
    pub fn get(&self, path: &Metapath) -> Option<&Arc<SemanticGraph>> {
        self.graphs.get(path)
    }

    pub fn contains(&self, path: &Metapath) -> bool {
        self.graphs.contains_key(path)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Bytes held by the cached CSR arrays.
    pub fn byte_size(&self) -> usize {
        self.bytes
    }

    pub fn keys(&self) -> impl Iterator<Item = &Metapath> {
        self.graphs.keys()
    }

    fn insert(&mut self, path: Metapath, sg: Arc<SemanticGraph>) {
        self.bytes += sg.byte_size();
        if let Some(old) = self.graphs.insert(path, sg) {
            self.bytes -= old.byte_size();
        }
    }
}

/// Cost of building one target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetCost {
    pub target: Metapath,
    pub mode: BuildMode,
    #[serde(flatten)]
    pub cost: CostReport,
}

#[derive(Debug)]
pub struct BuildOutcome {
    pub graph: Arc<SemanticGraph>,
    pub cost: CostReport,
    /// Segments used in ctt mode; `None` for naive builds.
    pub plan: Option<GenerationPlan>,
}

pub struct SemanticBuilder<'g> {
    graph: &'g HetGraph,
    ctt: Ctt,
    cache: SemanticCache,
    one_hop: HashMap<(String, String), Arc<SemanticGraph>>,
    insert_intermediates: bool,
}

impl<'g> SemanticBuilder<'g> {
    /// Trie and cache seeded with every relation of `graph`.
    pub fn new(graph: &'g HetGraph) -> Result<Self> {
        let names: Vec<&str> = graph.relations().iter().map(|r| r.name.as_str()).collect();
        Self::with_relations(graph, &names)
    }

    /// Trie and cache seeded with the named relations. Relations sharing an
    /// endpoint type pair collapse into one terminal holding their union.
    pub fn with_relations(graph: &'g HetGraph, relations: &[&str]) -> Result<Self> {
        if relations.is_empty() {
            return Err(Error::InvalidConfig("no relations to seed the trie with".into()));
        }
        let mut builder = SemanticBuilder {
            graph,
            ctt: Ctt::new(),
            cache: SemanticCache::default(),
            one_hop: HashMap::new(),
            insert_intermediates: false,
        };
        for name in relations {
            let idx = graph
                .relation_index(name)
                .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
            let rel = &graph.relations()[idx];
            let src = graph.vertex_types()[rel.src].name.clone();
            let dst = graph.vertex_types()[rel.dst].name.clone();
            if builder.one_hop.contains_key(&(src.clone(), dst.clone())) {
                continue;
            }
            let sg = Arc::new(graph.hop_adjacency(&src, &dst)?);
            builder.ctt.insert(sg.label());
            builder.cache.insert(sg.label().clone(), Arc::clone(&sg));
            builder.one_hop.insert((src, dst), sg);
        }
        Ok(builder)
    }

    /// Also cache the intermediate joins of a ctt build, not just the final
    /// target.
    pub fn set_insert_intermediates(&mut self, on: bool) {
        self.insert_intermediates = on;
    }

    pub fn graph(&self) -> &HetGraph {
        self.graph
    }

    pub fn ctt(&self) -> &Ctt {
        &self.ctt
    }

    pub fn cache(&self) -> &SemanticCache {
        &self.cache
    }

    /// Stores `sg` under `path`. Re-inserting a terminal path only replaces
    /// the cached graph.
    pub fn insert(&mut self, path: &Metapath, sg: Arc<SemanticGraph>) -> Result<()> {
        if sg.label() != path {
            return Err(Error::InvalidMetapath {
                path: path.to_string(),
                reason: format!("semantic graph is labelled `{}`", sg.label()),
            });
        }
        if !self.ctt.insert(path) {
            log::warn!("metapath {path} already materialized");
        }
        self.cache.insert(path.clone(), sg);
        Ok(())
    }

    pub fn plan(&self, target: &Metapath) -> Result<GenerationPlan> {
        self.graph.validate_metapath(target)?;
        self.ctt.decompose(target)
    }

    pub fn build(&mut self, target: &Metapath, mode: BuildMode) -> Result<(Arc<SemanticGraph>, CostReport)> {
        let out = self.build_detailed(target, mode)?;
        Ok((out.graph, out.cost))
    }

    pub fn build_detailed(&mut self, target: &Metapath, mode: BuildMode) -> Result<BuildOutcome> {
        self.graph.validate_metapath(target)?;
        match mode {
            BuildMode::Ctt => self.build_ctt(target),
            BuildMode::Naive => self.naive_chain(target),
        }
    }

    fn build_ctt(&mut self, target: &Metapath) -> Result<BuildOutcome> {
        let plan = self.ctt.decompose(target)?;
        let mut cost = CostReport::default();
        let fetch = |seg: &Metapath| {
            self.cache
                .get(seg)
                .cloned()
                .ok_or_else(|| Error::Internal(format!("terminal {seg} missing from cache")))
        };
        let segments: Vec<Arc<SemanticGraph>> = plan.segments.iter().map(fetch).collect::<Result<_>>()?;
        let reused = if plan.segments.len() == 1 {
            1
        } else {
            plan.segments.iter().filter(|s| s.hops() >= 2).count()
        };
        cost.cache_hits += reused as u64;

        let mut acc = Arc::clone(&segments[0]);
        let mut intermediates = Vec::new();
        for (i, seg) in segments.iter().enumerate().skip(1) {
            acc = Arc::new(compose(&acc, seg, &mut cost)?);
            if self.insert_intermediates && i + 1 < segments.len() {
                intermediates.push(Arc::clone(&acc));
            }
        }
        for sg in intermediates {
            if !self.ctt.is_terminal(sg.label()) {
                let path = sg.label().clone();
                self.insert(&path, sg)?;
            }
        }
        if !self.ctt.is_terminal(target) {
            self.insert(target, Arc::clone(&acc))?;
        }
        Ok(BuildOutcome {
            graph: acc,
            cost,
            plan: Some(plan),
        })
    }

    /// Naive build that leaves the trie and cache untouched, so it can run
    /// from shared references.
    pub fn build_naive(&self, target: &Metapath) -> Result<BuildOutcome> {
        self.graph.validate_metapath(target)?;
        self.naive_chain(target)
    }

    fn naive_chain(&self, target: &Metapath) -> Result<BuildOutcome> {
        let types = target.types();
        let hop = |a: &String, b: &String| {
            self.one_hop
                .get(&(a.clone(), b.clone()))
                .cloned()
                .ok_or_else(|| Error::Undecomposable(target.to_string()))
        };
        let mut cost = CostReport::default();
        let mut acc = hop(&types[0], &types[1])?;
        for w in types[1..].windows(2) {
            let next = hop(&w[0], &w[1])?;
            acc = Arc::new(compose(&acc, &next, &mut cost)?);
        }
        Ok(BuildOutcome {
            graph: acc,
            cost,
            plan: None,
        })
    }

    /// Builds `targets` in order, returning per-target costs and their sum.
    pub fn batch_build(&mut self, targets: &[Metapath], mode: BuildMode) -> Result<(CostReport, Vec<TargetCost>)> {
        let mut total = CostReport::default();
        let mut per_target = Vec::with_capacity(targets.len());
        for t in targets {
            let (_, cost) = self.build(t, mode)?;
            total += &cost;
            per_target.push(TargetCost {
                target: t.clone(),
                mode,
                cost,
            });
        }
        Ok((total, per_target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RelationSpec, Schema, VertexType};

    fn mp(s: &str) -> Metapath {
        Metapath::parse(s).unwrap()
    }

    fn aps_graph() -> HetGraph {
        let schema = Schema {
            vertex_types: [("A", 4), ("P", 3), ("S", 2)]
                .iter()
                .map(|&(n, c)| VertexType {
                    name: n.into(),
                    count: c,
                    feature_dim: 0,
                })
                .collect(),
            relations: [("AP", "A", "P"), ("PA", "P", "A"), ("PS", "P", "S"), ("SP", "S", "P")]
                .iter()
                .map(|&(n, s, d)| RelationSpec {
                    name: n.into(),
                    src: s.into(),
                    dst: d.into(),
                })
                .collect(),
        };
        let ap = vec![(0, 0), (1, 0), (1, 1), (2, 2), (3, 2)];
        let pa = ap.iter().map(|&(a, p)| (p, a)).collect();
        let ps = vec![(0, 0), (1, 0), (2, 1)];
        let sp = ps.iter().map(|&(p, s)| (s, p)).collect();
        HetGraph::from_edge_lists(&schema, vec![ap, pa, ps, sp]).unwrap()
    }

    #[test]
    fn seeded_trie_matches_relations() {
        let g = aps_graph();
        let b = SemanticBuilder::new(&g).unwrap();
        assert_eq!(b.ctt().level1().len(), 3);
        assert_eq!(b.cache().len(), 4);
        let mut keys: Vec<String> = b.cache().keys().map(|k| k.to_string()).collect();
        keys.sort();
        let terms: Vec<String> = b.ctt().terminal_paths().iter().map(|p| p.to_string()).collect();
        assert_eq!(keys, terms);
    }

    #[test]
    fn single_relation_seed() {
        let g = aps_graph();
        let b = SemanticBuilder::with_relations(&g, &["AP"]).unwrap();
        assert_eq!(b.ctt().level1().keys().cloned().collect::<Vec<_>>(), vec!["A", "P"]);
        assert_eq!(b.ctt().terminal_paths(), vec![mp("AP")]);
        assert!(SemanticBuilder::with_relations(&g, &[]).is_err());
        assert!(SemanticBuilder::with_relations(&g, &["XY"]).is_err());
    }

    #[test]
    fn one_hop_target() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        for mode in [BuildMode::Ctt, BuildMode::Naive] {
            let out = b.build_detailed(&mp("AP"), mode).unwrap();
            assert_eq!(out.cost.segments_built, 0);
            assert_eq!(out.cost.macs, 0);
            assert_eq!(out.cost.cache_hits, u64::from(mode == BuildMode::Ctt));
        }
    }

    #[test]
    fn apspa_reuses_aps() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        let (_, naive) = b.build(&mp("APSPA"), BuildMode::Naive).unwrap();
        assert_eq!(naive.segments_built, 3);
        for t in ["APS", "PAP", "APA"] {
            b.build(&mp(t), BuildMode::Ctt).unwrap();
        }
        let out = b.build_detailed(&mp("APSPA"), BuildMode::Ctt).unwrap();
        let segs: Vec<String> = out.plan.unwrap().segments.iter().map(|s| s.to_string()).collect();
        assert_eq!(segs, vec!["APS", "SP", "PA"]);
        assert_eq!(out.cost.segments_built, 2);
        assert_eq!(out.cost.cache_hits, 1);
        assert!(b.ctt().is_terminal(&mp("APSPA")));
        assert!(!b.ctt().is_terminal(&mp("APSP")));
    }

    #[test]
    fn modes_agree_and_conserve_writes() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        for t in ["APA", "APS", "PSP", "APSPA", "SPAPS", "APAPA"] {
            let target = mp(t);
            let (n, nc) = b.build(&target, BuildMode::Naive).unwrap();
            let (c, _) = b.build(&target, BuildMode::Ctt).unwrap();
            assert_eq!(n.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>(), "{t}");
            assert!(nc.edges_written >= n.edge_count() as u64);
        }
    }

    #[test]
    fn intermediates_optionally_cached() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        b.set_insert_intermediates(true);
        b.build(&mp("APSPA"), BuildMode::Ctt).unwrap();
        assert!(b.ctt().is_terminal(&mp("APS")));
        assert!(b.ctt().is_terminal(&mp("APSP")));
        assert!(b.cache().contains(&mp("APSP")));
    }

    #[test]
    fn invalid_target_rejected() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        assert!(b.build(&mp("AS"), BuildMode::Ctt).is_err());
        assert!(b.build(&mp("AS"), BuildMode::Naive).is_err());
        let (total, per) = b.batch_build(&[], BuildMode::Ctt).unwrap();
        assert_eq!(total, CostReport::default());
        assert!(per.is_empty());
    }

    #[test]
    fn insert_checks_label() {
        let g = aps_graph();
        let mut b = SemanticBuilder::new(&g).unwrap();
        let ap = Arc::clone(b.cache().get(&mp("AP")).unwrap());
        assert!(b.insert(&mp("PA"), Arc::clone(&ap)).is_err());
        let before = b.ctt().clone();
        b.insert(&mp("AP"), ap).unwrap();
        assert_eq!(b.ctt(), &before);
    }
}
