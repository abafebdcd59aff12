use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::recouple::{BackbonePartition, SubgraphKind};
use crate::model::SemanticGraph;

const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Collector {
    check: Check,
}

impl Collector {
    fn new(name: &str) -> Self {
        Collector {
            check: Check {
                name: name.to_string(),
                passed: true,
                vertices: Vec::new(),
                edges: Vec::new(),
                detail: String::new(),
            },
        }
    }

    fn vertex(&mut self, v: u32) {
        self.check.passed = false;
        if self.check.vertices.len() < MAX_COUNTEREXAMPLES {
            self.check.vertices.push(v);
        }
    }

    fn edge(&mut self, e: (u32, u32)) {
        self.check.passed = false;
        if self.check.edges.len() < MAX_COUNTEREXAMPLES {
            self.check.edges.push(e);
        }
    }

    fn fail(&mut self, detail: String) {
        self.check.passed = false;
        if !self.check.detail.is_empty() {
            self.check.detail.push_str("; ");
        }
        self.check.detail.push_str(&detail);
    }
}

/// Per-side class membership: `Some(true)` in, `Some(false)` out, `None`
/// unclassified. Vertices listed twice or not at all become counterexamples.
fn classify(n: usize, ins: &[u32], outs: &[u32], c: &mut Collector) -> Vec<Option<bool>> {
    let mut class = vec![None; n];
    for (set, flag) in [(ins, true), (outs, false)] {
        for &v in set {
            match class.get_mut(v as usize) {
                None => c.fail(format!("vertex {v} out of range (n = {n})")),
                Some(slot @ None) => *slot = Some(flag),
                Some(Some(_)) => c.vertex(v),
            }
        }
    }
    for (v, cl) in class.iter().enumerate() {
        if cl.is_none() {
            c.vertex(v as u32);
        }
    }
    class
}

/// Checks every partition invariant against the parent graph.
pub fn verify_partition(sg: &SemanticGraph, p: &BackbonePartition) -> Diagnostics {
    let mut checks = Vec::new();

    let mut sizes = Collector::new("sizes_match");
    if p.n_src != sg.n_src() || p.n_dst != sg.n_dst() {
        sizes.fail(format!(
            "partition is {}x{}, graph is {}x{}",
            p.n_src,
            p.n_dst,
            sg.n_src(),
            sg.n_dst()
        ));
    }
    checks.push(sizes.check);

    let mut src_c = Collector::new("src_classes_partition");
    let src = classify(sg.n_src(), &p.src_in, &p.src_out, &mut src_c);
    checks.push(src_c.check);
    let mut dst_c = Collector::new("dst_classes_partition");
    let dst = classify(sg.n_dst(), &p.dst_in, &p.dst_out, &mut dst_c);
    checks.push(dst_c.check);

    let mut out_out = Collector::new("no_out_out_edge");
    let mut cover = Collector::new("backbone_covers_edges");
    for (u, v) in sg.edges() {
        let s = src[u as usize];
        let d = dst[v as usize];
        if s == Some(false) && d == Some(false) {
            out_out.edge((u, v));
        }
        if s != Some(true) && d != Some(true) {
            cover.edge((u, v));
        }
    }
    checks.push(out_out.check);
    checks.push(cover.check);

    let mut seen: HashMap<(u32, u32), SubgraphKind> = HashMap::with_capacity(sg.edge_count());
    let mut disjoint = Collector::new("subgraphs_disjoint");
    let mut union = Collector::new("subgraphs_union_is_edge_set");
    let mut typing = Collector::new("subgraph_typing");
    for sub in &p.subgraphs {
        let expect = match sub.kind {
            SubgraphKind::S1 => (false, true),
            SubgraphKind::S2 => (true, false),
            SubgraphKind::S3 => (true, true),
        };
        for e in sub.parent_edges() {
            if seen.insert(e, sub.kind).is_some() {
                disjoint.edge(e);
            }
            let in_range = (e.0 as usize) < sg.n_src() && (e.1 as usize) < sg.n_dst();
            if !in_range || !sg.has_edge(e.0, e.1) {
                union.edge(e);
                continue;
            }
            if (src[e.0 as usize], dst[e.1 as usize]) != (Some(expect.0), Some(expect.1)) {
                typing.edge(e);
            }
        }
    }
    for e in sg.edges() {
        if !seen.contains_key(&e) {
            union.edge(e);
        }
    }
    let total: usize = p.subgraphs.iter().map(|s| s.edge_count()).sum();
    if total != sg.edge_count() {
        union.fail(format!("subgraphs hold {total} edges, graph has {}", sg.edge_count()));
    }
    checks.push(disjoint.check);
    checks.push(union.check);
    checks.push(typing.check);

    Diagnostics { checks }
}
