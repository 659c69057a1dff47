use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;

use super::{CandidatePath, RetrievalConfig, RetrieveError};
use crate::kg::{IdfTable, Schema};
use crate::vsa::{Codebook, Hypervector};

/// A candidate with its score decomposition.
/// `total = sim + idf_bonus - length_penalty`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub path: CandidatePath,
    pub sim: f64,
    pub idf_bonus: f64,
    pub length_penalty: f64,
    pub total: f64,
}

/// Ranking order: higher total first, then shorter path, then
/// lexicographic schema, then lexicographic entity chain.
pub fn rank_order(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.total
        .total_cmp(&a.total)
        .then(a.path.len().cmp(&b.path.len()))
        .then_with(|| a.path.schema.cmp(&b.path.schema))
        .then_with(|| a.path.entity_chain.cmp(&b.path.entity_chain))
}

/// Calibrated score for every candidate, in input order.
///
/// Candidates that share a schema share one path encoding and one
/// similarity evaluation; each distinct schema costs `O(|z| d)`. Encodings
/// of proper prefixes are cached, which leaves the left-fold result of
/// [`Codebook::encode_path`] bit-for-bit unchanged.
pub fn score_candidates(
    cb: &Codebook,
    query_hv: &Hypervector,
    candidates: &[CandidatePath],
    idf: &IdfTable,
    cfg: &RetrievalConfig,
) -> Result<Vec<ScoredCandidate>, RetrieveError> {
    let mut groups: HashMap<&Schema, Vec<usize>> = HashMap::new();
    let mut order: Vec<&Schema> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        groups
            .entry(&c.schema)
            .or_insert_with(|| {
                order.push(&c.schema);
                Vec::new()
            })
            .push(i);
    }
    let mut prefixes: HashMap<&[String], Hypervector> = HashMap::new();
    let mut out: Vec<Option<ScoredCandidate>> = vec![None; candidates.len()];
    for schema in order {
        let encoded = encode_cached(cb, schema.relations(), &mut prefixes)?;
        let sim = query_hv.similarity(&encoded)?;
        let idf_bonus = cfg.alpha * idf.idf(schema);
        let length_penalty = cfg.length_penalty(schema.len());
        let total = sim + idf_bonus - length_penalty;
        for &i in &groups[schema] {
            out[i] = Some(ScoredCandidate { path: candidates[i].clone(), sim, idf_bonus, length_penalty, total });
        }
    }
    Ok(out.into_iter().map(|s| s.expect("every index grouped")).collect())
}

fn encode_cached<'a>(
    cb: &Codebook,
    rels: &'a [String],
    cache: &mut HashMap<&'a [String], Hypervector>,
) -> Result<Hypervector, RetrieveError> {
    if rels.len() <= 1 {
        return Ok(cb.encode_path(rels)?);
    }
    let head = &rels[..rels.len() - 1];
    if !cache.contains_key(head) {
        let enc = encode_cached(cb, head, cache)?;
        cache.insert(head, enc);
    }
    Ok(cache[head].bind(cb.get(&rels[rels.len() - 1])?)?)
}

/// The `k` best candidates under [`rank_order`], best first.
pub fn top_k(scored: &[ScoredCandidate], k: usize) -> Vec<ScoredCandidate> {
    let mut idx: Vec<usize> = (0..scored.len()).collect();
    let cmp = |a: &usize, b: &usize| rank_order(&scored[*a], &scored[*b]);
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_by(cmp);
    idx.into_iter().map(|i| scored[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(schema: &[&str], chain: &[&str], total: f64) -> ScoredCandidate {
        ScoredCandidate {
            path: CandidatePath {
                schema: Schema::new(schema.iter().copied()),
                entity_chain: chain.iter().map(|s| s.to_string()).collect(),
            },
            sim: total,
            idf_bonus: 0.0,
            length_penalty: 0.0,
            total,
        }
    }

    #[test]
    fn undersized_input() {
        let v = vec![sc(&["a"], &["x", "y"], 0.1), sc(&["b"], &["x", "z"], 0.5)];
        let top = top_k(&v, 3);
        assert_eq!(top.len(), 2);
        assert_eq!(top[0].total, 0.5);
    }

    #[test]
    fn tie_breaks() {
        let v = vec![sc(&["b"], &["x", "y"], 1.0), sc(&["a"], &["x", "y"], 1.0)];
        assert_eq!(top_k(&v, 1)[0].path.schema, Schema::new(["a"]));
        let v = vec![sc(&["a", "a"], &["x", "y", "z"], 1.0), sc(&["z"], &["x", "y"], 1.0)];
        assert_eq!(top_k(&v, 1)[0].path.schema, Schema::new(["z"]));
        let v = vec![sc(&["a"], &["x", "z"], 1.0), sc(&["a"], &["x", "b"], 1.0)];
        assert_eq!(top_k(&v, 1)[0].path.entity_chain, ["x", "b"]);
    }

    #[test]
    fn cached_encoding_matches_fold() {
        let rels: Vec<String> = (0..4).map(|i| format!("r{i}")).collect();
        let cb = Codebook::build(crate::HdcConfig::ghrr(8, 4, 3), &rels).unwrap();
        let mut cache = HashMap::new();
        let paths: Vec<Vec<String>> = vec![
            vec!["r0".into(), "r1".into(), "r2".into()],
            vec!["r0".into(), "r1".into(), "r3".into()],
            vec!["r0".into(), "r1".into()],
            vec!["r2".into()],
        ];
        for p in &paths {
            assert_eq!(encode_cached(&cb, p, &mut cache).unwrap(), cb.encode_path(p).unwrap());
        }
    }

    #[test]
    fn zero_k_is_empty() {
        assert!(top_k(&[sc(&["a"], &["x", "y"], 1.0)], 0).is_empty());
    }
}
