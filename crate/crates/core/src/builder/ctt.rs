//! Callback trie over vertex-type sequences.
//!
//! A root-to-node path spells a metapath. Terminal nodes mark metapaths whose
//! semantic graphs are materialized. Every node carries a callback to the
//! level-1 node of its own vertex type, which is where traversal resumes
//! after a segment is cut.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::Metapath;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CttNode {
    pub vertex_type: String,
    pub children: BTreeMap<String, NodeId>,
    pub terminal: bool,
    pub callback: NodeId,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ctt {
    nodes: Vec<CttNode>,
}

/// Ordered segments whose junction-overlapped concatenation is the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationPlan {
    pub segments: Vec<Metapath>,
}

impl GenerationPlan {
    /// Number of joins needed to realize the plan.
    pub fn compositions(&self) -> usize {
        self.segments.len() - 1
    }

    pub fn concatenation(&self) -> Result<Metapath> {
        let mut acc = self.segments[0].clone();
        for s in &self.segments[1..] {
            acc = acc.join(s)?;
        }
        Ok(acc)
    }
}

pub const ROOT: NodeId = 0;

impl Default for Ctt {
    fn default() -> Self {
        Ctt::new()
    }
}

impl Ctt {
    pub fn new() -> Self {
        Ctt {
            nodes: vec![CttNode {
                vertex_type: String::new(),
                children: BTreeMap::new(),
                terminal: false,
                callback: ROOT,
                depth: 0,
            }],
        }
    }

    pub fn node(&self, id: NodeId) -> &CttNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn level1(&self) -> &BTreeMap<String, NodeId> {
        &self.nodes[ROOT].children
    }

    /// Level-1 node for `vertex_type`, created on demand. Level-1 nodes call
    /// back to themselves.
    pub fn ensure_level1(&mut self, vertex_type: &str) -> NodeId {
        if let Some(&id) = self.nodes[ROOT].children.get(vertex_type) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(CttNode {
            vertex_type: vertex_type.to_string(),
            children: BTreeMap::new(),
            terminal: false,
            callback: id,
            depth: 1,
        });
        self.nodes[ROOT].children.insert(vertex_type.to_string(), id);
        id
    }

    /// Walks `path` from the root without creating anything.
    pub fn find(&self, path: &Metapath) -> Option<NodeId> {
        let mut cur = ROOT;
        for t in path.types() {
            cur = *self.nodes[cur].children.get(t)?;
        }
        Some(cur)
    }

    pub fn is_terminal(&self, path: &Metapath) -> bool {
        self.find(path).is_some_and(|id| self.nodes[id].terminal)
    }

    /// Creates the nodes along `path` and marks the last one terminal.
    /// Returns `false` when the path was already terminal.
    pub fn insert(&mut self, path: &Metapath) -> bool {
        let types = path.types();
        for t in types {
            self.ensure_level1(t);
        }
        let mut cur = self.level1()[&types[0]];
        for t in &types[1..] {
            cur = match self.nodes[cur].children.get(t) {
                Some(&next) => next,
                None => {
                    let id = self.nodes.len();
                    let depth = self.nodes[cur].depth + 1;
                    self.nodes.push(CttNode {
                        vertex_type: t.clone(),
                        children: BTreeMap::new(),
                        terminal: false,
                        callback: self.level1()[t],
                        depth,
                    });
                    self.nodes[cur].children.insert(t.clone(), id);
                    id
                }
            };
        }
        let fresh = !self.nodes[cur].terminal;
        self.nodes[cur].terminal = true;
        fresh
    }

    /// Splits `target` into terminal segments.
    ///
    /// From the level-1 node of the current junction type, descend child
    /// links matching successive types as far as they go, remembering the
    /// deepest terminal passed. Cut there, emit that segment, follow the
    /// callback of the cut node and resume from the junction type.
    pub fn decompose(&self, target: &Metapath) -> Result<GenerationPlan> {
        let types = target.types();
        let n = types.len();
        let mut segments = Vec::new();
        let mut start = 0;
        let mut cur = match self.level1().get(&types[0]) {
            Some(&id) => id,
            None => return Err(Error::Undecomposable(target.to_string())),
        };
        while start < n - 1 {
            let mut node = cur;
            let mut cut = None;
            let mut i = start + 1;
            while i < n {
                match self.nodes[node].children.get(&types[i]) {
                    Some(&child) => {
                        node = child;
                        if self.nodes[node].terminal {
                            cut = Some((i, node));
                        }
                        i += 1;
                    }
                    None => break,
                }
            }
            let Some((end, cut_node)) = cut else {
                return Err(Error::Undecomposable(target.to_string()));
            };
            segments.push(target.slice(start, end)?);
            start = end;
            cur = self.nodes[cut_node].callback;
        }
        Ok(GenerationPlan { segments })
    }

    /// Every terminal path, in trie order.
    pub fn terminal_paths(&self) -> Vec<Metapath> {
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, Vec<String>)> = self
            .level1()
            .iter()
            .rev()
            .map(|(t, &id)| (id, vec![t.clone()]))
            .collect();
        while let Some((id, path)) = stack.pop() {
            if self.nodes[id].terminal {
                out.push(Metapath::new(path.clone()).expect("terminal depth >= 2"));
            }
            for (t, &child) in self.nodes[id].children.iter().rev() {
                let mut p = path.clone();
                p.push(t.clone());
                stack.push((child, p));
            }
        }
        out
    }

    /// Checks that each non-root node calls back to the level-1 node of its
    /// own type.
    pub fn callbacks_consistent(&self) -> bool {
        self.nodes
            .iter()
            .skip(1)
            .all(|n| self.level1().get(&n.vertex_type) == Some(&n.callback))
    }
}
