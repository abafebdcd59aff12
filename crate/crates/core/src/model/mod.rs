//! Heterogeneous graph data model.
//!
//! Vertex ids are dense and 0-based within each vertex type. Every relation
//! keeps its edges as a CSR keyed by source id; neighbor lists are sorted and
//! duplicate-free, so adjacency is boolean.

mod csr;
pub mod io;
mod metapath;
mod semantic;
pub mod synth;

pub use csr::Csr;
pub use metapath::Metapath;
pub use semantic::SemanticGraph;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexType {
    pub name: String,
    pub count: u32,
    #[serde(default)]
    pub feature_dim: u32,
}

/// An edge type. `src` and `dst` index into [`HetGraph::vertex_types`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// The `schema.json` document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub vertex_types: Vec<VertexType>,
    pub relations: Vec<RelationSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HetGraph {
    vertex_types: Vec<VertexType>,
    relations: Vec<Relation>,
    adjacency: Vec<Csr>,
}

impl HetGraph {
    /// Builds a graph from a schema and one edge list per relation (in schema
    /// order). Edges are bounds-checked, sorted and deduplicated.
    pub fn from_edge_lists(schema: &Schema, edge_lists: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        let (vertex_types, relations) = resolve_schema(schema)?;
        if edge_lists.len() != relations.len() {
            return Err(Error::Schema(format!(
                "{} relations but {} edge lists",
                relations.len(),
                edge_lists.len()
            )));
        }
        let mut adjacency = Vec::with_capacity(relations.len());
        for (rel, mut edges) in relations.iter().zip(edge_lists) {
            let src = &vertex_types[rel.src];
            let dst = &vertex_types[rel.dst];
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= src.count || v >= dst.count) {
                return Err(Error::Schema(format!(
                    "relation `{}`: edge ({u}, {v}) out of range for {}={} / {}={}",
                    rel.name, src.name, src.count, dst.name, dst.count
                )));
            }
            adjacency.push(Csr::from_pairs(src.count as usize, &mut edges));
        }
        let graph = HetGraph {
            vertex_types,
            relations,
            adjacency,
        };
        if !graph.is_heterogeneous() {
            log::warn!(
                "graph has {} vertex types and {} relations; not heterogeneous",
                graph.vertex_types.len(),
                graph.relations.len()
            );
        }
        Ok(graph)
    }

    pub fn schema(&self) -> Schema {
        Schema {
            vertex_types: self.vertex_types.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationSpec {
                    name: r.name.clone(),
                    src: self.vertex_types[r.src].name.clone(),
                    dst: self.vertex_types[r.dst].name.clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_types(&self) -> &[VertexType] {
        &self.vertex_types
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn type_index(&self, name: &str) -> Option<usize> {
        self.vertex_types.iter().position(|t| t.name == name)
    }

    pub fn vertex_type(&self, name: &str) -> Result<&VertexType> {
        self.type_index(name)
            .map(|i| &self.vertex_types[i])
            .ok_or_else(|| Error::UnknownType(name.to_string()))
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn adjacency(&self, relation: usize) -> &Csr {
        &self.adjacency[relation]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Csr::nnz).sum()
    }

    /// `|T^v| + |T^e| > 2`.
    pub fn is_heterogeneous(&self) -> bool {
        self.vertex_types.len() + self.relations.len() > 2
    }

    /// Indices of relations going from type `src` to type `dst`.
    pub fn relations_between(&self, src: &str, dst: &str) -> Vec<usize> {
        match (self.type_index(src), self.type_index(dst)) {
            (Some(s), Some(d)) => (0..self.relations.len())
                .filter(|&i| self.relations[i].src == s && self.relations[i].dst == d)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// The one-hop semantic graph of a single relation.
    pub fn relation_adjacency(&self, name: &str) -> Result<SemanticGraph> {
        let idx = self
            .relation_index(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        let rel = &self.relations[idx];
        let label = Metapath::new([
            self.vertex_types[rel.src].name.clone(),
            self.vertex_types[rel.dst].name.clone(),
        ])?;
        Ok(SemanticGraph::from_csr(
            label,
            self.adjacency[idx].clone(),
            self.vertex_types[rel.dst].count as usize,
        ))
    }

    /// One-hop semantic graph for a vertex-type pair: the union of every
    /// relation from `src` to `dst`.
    pub fn hop_adjacency(&self, src: &str, dst: &str) -> Result<SemanticGraph> {
        let rels = self.relations_between(src, dst);
        let label = Metapath::new([src, dst])?;
        match rels.as_slice() {
            [] => Err(Error::InvalidMetapath {
                path: label.to_string(),
                reason: format!("no relation from {src} to {dst}"),
            }),
            [only] => Ok(SemanticGraph::from_csr(
                label,
                self.adjacency[*only].clone(),
                self.vertex_type(dst)?.count as usize,
            )),
            many => {
                let mut pairs: Vec<(u32, u32)> =
                    many.iter().flat_map(|&i| self.adjacency[i].edges()).collect();
                let n_src = self.vertex_type(src)?.count as usize;
                let forward = Csr::from_pairs(n_src, &mut pairs);
                Ok(SemanticGraph::from_csr(
                    label,
                    forward,
                    self.vertex_type(dst)?.count as usize,
                ))
            }
        }
    }

    /// Checks that every consecutive type pair of `path` names a relation.
    pub fn validate_metapath(&self, path: &Metapath) -> Result<()> {
        for t in path.types() {
            if self.type_index(t).is_none() {
                return Err(Error::InvalidMetapath {
                    path: path.to_string(),
                    reason: format!("unknown vertex type `{t}`"),
                });
            }
        }
        for w in path.types().windows(2) {
            if self.relations_between(&w[0], &w[1]).is_empty() {
                return Err(Error::InvalidMetapath {
                    path: path.to_string(),
                    reason: format!("no relation from {} to {}", w[0], w[1]),
                });
            }
        }
        Ok(())
    }

    /// All metapaths with exactly `hops` hops, in lexicographic order of
    /// vertex-type index sequences.
    pub fn metapaths_with_hops(&self, hops: usize) -> Vec<Metapath> {
        let n = self.vertex_types.len();
        let mut next = vec![Vec::new(); n];
        for r in &self.relations {
            if !next[r.src].contains(&r.dst) {
                next[r.src].push(r.dst);
            }
        }
        for succ in &mut next {
            succ.sort_unstable();
        }
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::with_capacity(hops + 1);
        fn walk(
            next: &[Vec<usize>],
            hops: usize,
            stack: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if stack.len() == hops + 1 {
                out.push(stack.clone());
                return;
            }
            let last = *stack.last().unwrap();
            for &t in &next[last] {
                stack.push(t);
                walk(next, hops, stack, out);
                stack.pop();
            }
        }
        if hops == 0 {
            return out;
        }
        let mut seqs = Vec::new();
        for start in 0..n {
            stack.push(start);
            walk(&next, hops, &mut stack, &mut seqs);
            stack.pop();
        }
        for seq in seqs {
            let names = seq.iter().map(|&i| self.vertex_types[i].name.clone());
            out.push(Metapath::new(names).expect("hops >= 1"));
        }
        out
    }
}

fn resolve_schema(schema: &Schema) -> Result<(Vec<VertexType>, Vec<Relation>)> {
    let mut seen = std::collections::HashSet::new();
    for t in &schema.vertex_types {
        if t.name.is_empty() || t.name.contains('-') {
            return Err(Error::Schema(format!("bad vertex type name `{}`", t.name)));
        }
        if !seen.insert(t.name.as_str()) {
            return Err(Error::Schema(format!("duplicate vertex type `{}`", t.name)));
        }
    }
    let lookup = |name: &str| {
        schema
            .vertex_types
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| Error::Schema(format!("relation endpoint `{name}` is not a vertex type")))
    };
    let mut rel_names = std::collections::HashSet::new();
    let mut relations = Vec::with_capacity(schema.relations.len());
    for r in &schema.relations {
        if r.name.is_empty() || r.name.contains(['/', '\\']) {
            return Err(Error::Schema(format!("bad relation name `{}`", r.name)));
        }
        if !rel_names.insert(r.name.as_str()) {
            return Err(Error::Schema(format!("duplicate relation `{}`", r.name)));
        }
        relations.push(Relation {
            name: r.name.clone(),
            src: lookup(&r.src)?,
            dst: lookup(&r.dst)?,
        });
    }
    Ok((schema.vertex_types.clone(), relations))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny_schema() -> Schema {
        Schema {
            vertex_types: vec![
                VertexType {
                    name: "A".into(),
                    count: 2,
                    feature_dim: 4,
                },
                VertexType {
                    name: "P".into(),
                    count: 1,
                    feature_dim: 4,
                },
            ],
            relations: vec![RelationSpec {
                name: "AP".into(),
                src: "A".into(),
                dst: "P".into(),
            }],
        }
    }

    #[test]
    fn builds_and_dedups() {
        let g = HetGraph::from_edge_lists(&tiny_schema(), vec![vec![(0, 0), (1, 0), (0, 0)]]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let sg = g.relation_adjacency("AP").unwrap();
        assert_eq!(sg.edge_count(), 2);
        assert_eq!(sg.label().to_string(), "AP");
    }

    #[test]
    fn rejects_out_of_range() {
        let err = HetGraph::from_edge_lists(&tiny_schema(), vec![vec![(5, 0)]]).unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn empty_relation_gives_empty_semantic_graph() {
        let g = HetGraph::from_edge_lists(&tiny_schema(), vec![vec![]]).unwrap();
        let sg = g.relation_adjacency("AP").unwrap();
        assert_eq!(sg.edge_count(), 0);
        assert_eq!(sg.forward().offsets(), &[0, 0, 0]);
        assert!(matches!(g.relation_adjacency("PA"), Err(Error::UnknownRelation(_))));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut s = tiny_schema();
        s.vertex_types.push(s.vertex_types[0].clone());
        assert!(HetGraph::from_edge_lists(&s, vec![vec![]]).is_err());
        let mut s = tiny_schema();
        s.relations.push(s.relations[0].clone());
        assert!(HetGraph::from_edge_lists(&s, vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn parallel_relations_union() {
        let schema = Schema {
            vertex_types: vec![VertexType {
                name: "P".into(),
                count: 3,
                feature_dim: 0,
            }],
            relations: vec![
                RelationSpec {
                    name: "PP".into(),
                    src: "P".into(),
                    dst: "P".into(),
                },
                RelationSpec {
                    name: "PP_rev".into(),
                    src: "P".into(),
                    dst: "P".into(),
                },
            ],
        };
        let g = HetGraph::from_edge_lists(&schema, vec![vec![(0, 1)], vec![(1, 0), (0, 1)]]).unwrap();
        let sg = g.hop_adjacency("P", "P").unwrap();
        assert_eq!(sg.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn enumerates_metapaths() {
        let schema = Schema {
            vertex_types: ["A", "P", "S"]
                .iter()
                .map(|n| VertexType {
                    name: n.to_string(),
                    count: 1,
                    feature_dim: 0,
                })
                .collect(),
            relations: [("AP", "A", "P"), ("PA", "P", "A"), ("PS", "P", "S"), ("SP", "S", "P")]
                .iter()
                .map(|(n, s, d)| RelationSpec {
                    name: n.to_string(),
                    src: s.to_string(),
                    dst: d.to_string(),
                })
                .collect(),
        };
        let g = HetGraph::from_edge_lists(&schema, vec![vec![]; 4]).unwrap();
        let two: Vec<String> = g.metapaths_with_hops(2).iter().map(|m| m.to_string()).collect();
        assert_eq!(two, vec!["APA", "APS", "PAP", "PSP", "SPA", "SPS"]);
        assert!(g.validate_metapath(&Metapath::parse("APSPA").unwrap()).is_ok());
        assert!(g.validate_metapath(&Metapath::parse("AS").unwrap()).is_err());
        assert!(g.validate_metapath(&Metapath::parse("AX").unwrap()).is_err());
    }
}
