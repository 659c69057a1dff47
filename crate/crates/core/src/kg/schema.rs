use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::Graph;

/// Separator used in canonical schema keys; relation names may not contain it.
pub const SCHEMA_SEPARATOR: &str = "->";

/// Ordered sequence of relation types. Orders lexicographically by relation
/// sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Schema(pub Vec<String>);

impl Schema {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = S>) -> Self {
        Schema(relations.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn relations(&self) -> &[String] {
        &self.0
    }

    /// `r1->r2->...`, the key used by [`super::IdfTable`].
    pub fn canonical(&self) -> String {
        self.0.join(SCHEMA_SEPARATOR)
    }

    pub fn parse_canonical(key: &str) -> Self {
        if key.is_empty() {
            return Schema::default();
        }
        Schema::new(key.split(SCHEMA_SEPARATOR))
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Relation-level graph: `a -> b` whenever some entity is a tail of `a` and
/// a head of `b`. Each edge stores how many distinct entities witness it.
#[derive(Debug, Clone, Default)]
pub struct SchemaGraph {
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), u64>,
    successors: HashMap<String, Vec<(String, u64)>>,
}

impl SchemaGraph {
    pub fn build(g: &Graph) -> Self {
        let n = g.num_entities();
        let mut incoming: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        let mut outgoing: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for (h, r, t) in g.triple_ids() {
            outgoing[h.0 as usize].insert(r.0);
            incoming[t.0 as usize].insert(r.0);
        }
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for (ins, outs) in incoming.iter().zip(&outgoing) {
            for &a in ins {
                for &b in outs {
                    *counts.entry((a, b)).or_default() += 1;
                }
            }
        }
        let name = |r: u32| g.relation_name(super::RelationId(r)).to_string();
        let edges: BTreeMap<(String, String), u64> = counts.into_iter().map(|((a, b), c)| ((name(a), name(b)), c)).collect();
        Self::from_edges(g.relations().iter().cloned(), edges)
    }

    fn from_edges(nodes: impl IntoIterator<Item = String>, edges: BTreeMap<(String, String), u64>) -> Self {
        let mut successors: HashMap<String, Vec<(String, u64)>> = HashMap::new();
        for ((a, b), &c) in &edges {
            successors.entry(a.clone()).or_default().push((b.clone(), c));
        }
        SchemaGraph { nodes: nodes.into_iter().collect(), edges, successors }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn contains(&self, relation: &str) -> bool {
        self.nodes.contains(relation)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(from, to, witnesses)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.edges.iter().map(|((a, b), &c)| (a.as_str(), b.as_str(), c))
    }

    pub fn witnesses(&self, from: &str, to: &str) -> u64 {
        self.edges.get(&(from.to_string(), to.to_string())).copied().unwrap_or(0)
    }

    /// Successors of `relation` with witness counts, sorted by name.
    pub fn successors(&self, relation: &str) -> &[(String, u64)] {
        self.successors.get(relation).map(Vec::as_slice).unwrap_or(&[])
    }
}
