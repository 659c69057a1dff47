use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use super::{RetrievalConfig, RetrieveError};
use crate::kg::{EntityId, Graph, KgError, RelationId, Schema};

/// A schema instantiated on the graph: `e_0 -r_1-> e_1 ... -r_l-> e_l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidatePath {
    pub schema: Schema,
    pub entity_chain: Vec<String>,
}

impl CandidatePath {
    /// Checked constructor: the chain must be one longer than the schema and
    /// every hop must be a triple of `g`.
    pub fn new(g: &Graph, schema: Schema, entity_chain: Vec<String>) -> Result<Self, RetrieveError> {
        if entity_chain.len() != schema.len() + 1 {
            return Err(RetrieveError::InvalidPath(format!(
                "chain of {} entities for schema of length {}",
                entity_chain.len(),
                schema.len()
            )));
        }
        for (i, rel) in schema.relations().iter().enumerate() {
            if !g.has_triple(&entity_chain[i], rel, &entity_chain[i + 1]) {
                return Err(RetrieveError::InvalidPath(format!("missing triple ({}, {rel}, {})", entity_chain[i], entity_chain[i + 1])));
            }
        }
        Ok(CandidatePath { schema, entity_chain })
    }

    pub fn terminal(&self) -> &str {
        self.entity_chain.last().expect("chain has at least the topic")
    }

    pub fn len(&self) -> usize {
        self.schema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schema.is_empty()
    }
}

/// Walk every plan forward from `topic` over the adjacency index.
///
/// Walks advance depth by depth across all plans together; at each depth at
/// most `beam * |plans|` partial or finished chains are kept, in plan order
/// then tail-name order. Plans that mention relations absent from the graph
/// contribute nothing. Output is deduplicated by `(schema, chain)`.
pub fn instantiate_candidates(
    g: &Graph,
    plans: &[Schema],
    topic: &str,
    cfg: &RetrievalConfig,
) -> Result<Vec<CandidatePath>, RetrieveError> {
    let root = g.entity_id(topic).ok_or_else(|| KgError::UnknownEntity(topic.to_string()))?;
    let rel_ids: Vec<Option<Vec<RelationId>>> =
        plans.iter().map(|p| p.relations().iter().map(|r| g.relation_id(r)).collect::<Option<Vec<_>>>()).collect();
    let cap = cfg.beam.saturating_mul(plans.len().max(1));

    let mut frontier: Vec<(usize, Vec<EntityId>)> =
        rel_ids.iter().enumerate().filter(|(_, ids)| ids.as_ref().is_some_and(|v| !v.is_empty())).map(|(i, _)| (i, vec![root])).collect();
    let mut finished: Vec<(usize, Vec<EntityId>)> = Vec::new();
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut kept = 0usize;
        'expand: for (pi, chain) in &frontier {
            let rels = rel_ids[*pi].as_ref().expect("filtered");
            let last = *chain.last().expect("non-empty chain");
            for &t in g.tails(last, rels[depth]) {
                if kept >= cap {
                    break 'expand;
                }
                kept += 1;
                let mut extended = chain.clone();
                extended.push(t);
                if depth + 1 == rels.len() {
                    finished.push((*pi, extended));
                } else {
                    next.push((*pi, extended));
                }
            }
        }
        frontier = next;
        depth += 1;
    }

    // finished chains are grouped by depth; restore plan order
    finished.sort_by_key(|(pi, _)| *pi);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(finished.len());
    for (pi, chain) in finished {
        let path = CandidatePath { schema: plans[pi].clone(), entity_chain: chain.iter().map(|&e| g.entity_name(e).to_string()).collect() };
        if seen.insert((path.schema.clone(), path.entity_chain.clone())) {
            out.push(path);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Graph {
        Graph::from_triples([("a", "r1", "b"), ("b", "r2", "c")]).unwrap()
    }

    #[test]
    fn unique_instantiation() {
        let g = toy();
        let cands = instantiate_candidates(&g, &[Schema::new(["r1", "r2"])], "a", &RetrievalConfig::default()).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].entity_chain, ["a", "b", "c"]);
        assert_eq!(cands[0].terminal(), "c");
    }

    #[test]
    fn no_matching_edge() {
        let g = toy();
        let cands = instantiate_candidates(&g, &[Schema::new(["r2"])], "a", &RetrievalConfig::default()).unwrap();
        assert!(cands.is_empty());
        let cands = instantiate_candidates(&g, &[Schema::new(["nope"])], "a", &RetrievalConfig::default()).unwrap();
        assert!(cands.is_empty());
    }

    #[test]
    fn unknown_topic() {
        assert!(instantiate_candidates(&toy(), &[], "zz", &RetrievalConfig::default()).is_err());
    }

    #[test]
    fn duplicate_plans_dedup() {
        let g = toy();
        let p = Schema::new(["r1"]);
        let cands = instantiate_candidates(&g, &[p.clone(), p], "a", &RetrievalConfig::default()).unwrap();
        assert_eq!(cands.len(), 1);
    }

    #[test]
    fn frontier_cap_applies() {
        let g = Graph::from_triples((0..10).map(|i| ("a".to_string(), "r".to_string(), format!("t{i}")))).unwrap();
        let cfg = RetrievalConfig { beam: 3, ..Default::default() };
        let cands = instantiate_candidates(&g, &[Schema::new(["r"])], "a", &cfg).unwrap();
        assert_eq!(cands.len(), 3);
        assert_eq!(cands[0].terminal(), "t0");
    }

    #[test]
    fn checked_constructor() {
        let g = toy();
        assert!(CandidatePath::new(&g, Schema::new(["r1"]), vec!["a".into(), "b".into()]).is_ok());
        assert!(CandidatePath::new(&g, Schema::new(["r1"]), vec!["a".into(), "c".into()]).is_err());
        assert!(CandidatePath::new(&g, Schema::new(["r1"]), vec!["a".into()]).is_err());
    }
}
