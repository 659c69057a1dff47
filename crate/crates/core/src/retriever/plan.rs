use std::collections::{BTreeSet, HashSet};

use super::{RetrievalConfig, RetrieveError};
use crate::kg::{Question, Schema, SchemaGraph};

/// Schemas of length `1..=l_max` that start at one of `start_relations` and
/// follow schema-graph edges. When a depth has more than `beam` schemas the
/// ones with the largest product of edge witness counts survive (ties by
/// lexicographic order). Output is sorted by length, then lexicographically.
pub fn enumerate_plans<S: AsRef<str>>(sg: &SchemaGraph, start_relations: &[S], cfg: &RetrievalConfig) -> Vec<Schema> {
    let starts: BTreeSet<&str> = start_relations.iter().map(AsRef::as_ref).filter(|r| sg.contains(r)).collect();
    let mut level: Vec<(Schema, u128)> = starts.into_iter().map(|r| (Schema::new([r]), 1u128)).collect();
    prune(&mut level, cfg.beam);
    let mut out: Vec<Schema> = level.iter().map(|(s, _)| s.clone()).collect();
    for _ in 1..cfg.l_max {
        let mut next = Vec::new();
        for (schema, product) in &level {
            let last = schema.relations().last().expect("plans are non-empty");
            for (succ, witnesses) in sg.successors(last) {
                let mut rels = schema.0.clone();
                rels.push(succ.clone());
                next.push((Schema(rels), product.saturating_mul(*witnesses as u128)));
            }
        }
        if next.is_empty() {
            break;
        }
        prune(&mut next, cfg.beam);
        out.extend(next.iter().map(|(s, _)| s.clone()));
        level = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn prune(level: &mut Vec<(Schema, u128)>, beam: usize) {
    if level.len() > beam {
        level.sort_by(|(sa, pa), (sb, pb)| pb.cmp(pa).then_with(|| sa.cmp(sb)));
        level.truncate(beam);
    }
    level.sort_by(|(a, _), (b, _)| a.cmp(b));
}

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Choose the query plan. A gold hint wins when it is one of `plans`.
/// Otherwise plans are ranked by the longest common subsequence between
/// their relation-name tokens and the question tokens, then by how many
/// distinct relation tokens the question mentions, then shorter first,
/// then lexicographically.
pub fn select_query_plan(plans: &[Schema], question: &Question, gold_hint: Option<&Schema>) -> Result<Schema, RetrieveError> {
    if plans.is_empty() {
        return Err(RetrieveError::NoPlans(question.id.clone()));
    }
    if let Some(hint) = gold_hint {
        if plans.contains(hint) {
            return Ok(hint.clone());
        }
    }
    let q_seq: Vec<String> = tokens(&question.text).collect();
    let q_set: HashSet<&String> = q_seq.iter().collect();
    let key = |s: &Schema| -> (usize, usize) {
        let seq: Vec<String> = s.relations().iter().flat_map(|r| tokens(r)).collect();
        let distinct: HashSet<&String> = seq.iter().filter(|t| q_set.contains(t)).collect();
        (lcs_len(&seq, &q_seq), distinct.len())
    };
    let best = plans
        .iter()
        .map(|s| (key(s), s))
        .min_by(|(ka, a), (kb, b)| kb.cmp(ka).then(a.len().cmp(&b.len())).then_with(|| a.cmp(b)))
        .map(|(_, s)| s.clone())
        .expect("non-empty");
    Ok(best)
}
