//! Plan, encode, instantiate, score and select: the retrieval pipeline.

mod candidates;
mod config;
mod plan;
mod score;

pub use candidates::{instantiate_candidates, CandidatePath};
pub use config::{PenaltyMode, RetrievalConfig};
pub use plan::{enumerate_plans, select_query_plan};
pub use score::{rank_order, score_candidates, top_k, ScoredCandidate};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;
use thiserror::Error;

use crate::kg::{Graph, IdfTable, KgError, Question, Schema, SchemaGraph};
use crate::vsa::{Codebook, VsaError};

#[derive(Debug, Error)]
pub enum RetrieveError {
    #[error("invalid retrieval config: {0}")]
    InvalidConfig(String),
    #[error("question `{0}` has no plans to choose from")]
    NoPlans(String),
    #[error("invalid candidate path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error(transparent)]
    Kg(#[from] KgError),
}

/// Wall-clock time per stage, in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    /// Plan enumeration, plan choice and candidate instantiation.
    pub plan: u64,
    /// Query hypervector construction.
    pub encode: u64,
    pub score: u64,
    pub select: u64,
}

/// Everything retrieval produced for one question.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    pub question_id: String,
    /// `None` when the topic entity had no usable plans.
    pub plan: Option<Schema>,
    /// All scored candidates, sorted by [`rank_order`].
    pub candidates: Vec<ScoredCandidate>,
    /// Length of the Top-K prefix of `candidates`.
    pub k: usize,
    pub timings: Timings,
}

impl RetrievalResult {
    pub fn top_k(&self) -> &[ScoredCandidate] {
        &self.candidates[..self.k]
    }

    /// No candidates survived; the record is still valid.
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Top-1 candidate follows the gold schema and ends in a gold answer.
    pub fn hit_at_1(&self, q: &Question) -> bool {
        self.candidates.first().is_some_and(|c| is_gold(c, q))
    }

    /// Some Top-K candidate follows the gold schema and ends in a gold answer.
    pub fn hit_at_k(&self, q: &Question) -> bool {
        self.top_k().iter().any(|c| is_gold(c, q))
    }

    pub fn to_record(&self) -> RetrievalRecord {
        RetrievalRecord {
            question_id: self.question_id.clone(),
            plan: self.plan.clone(),
            candidates: self
                .candidates
                .iter()
                .map(|c| CandidateRecord {
                    schema: c.path.schema.clone(),
                    chain: c.path.entity_chain.clone(),
                    sim: c.sim,
                    idf_bonus: c.idf_bonus,
                    length_penalty: c.length_penalty,
                    total: c.total,
                })
                .collect(),
            top_k: (0..self.k).collect(),
            timings_us: self.timings,
            empty: self.is_empty(),
        }
    }
}

fn is_gold(c: &ScoredCandidate, q: &Question) -> bool {
    let schema_ok = q.gold_schema.as_ref().is_some_and(|g| *g == c.path.schema);
    let answer_ok = q.gold_answers.as_ref().is_none_or(|a| a.iter().any(|x| x == c.path.terminal()));
    schema_ok && answer_ok
}

/// Serialized form: one JSON object per question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRecord {
    pub question_id: String,
    pub plan: Option<Schema>,
    pub candidates: Vec<CandidateRecord>,
    /// Indices into `candidates`.
    pub top_k: Vec<usize>,
    pub timings_us: Timings,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub schema: Schema,
    pub chain: Vec<String>,
    pub sim: f64,
    pub idf_bonus: f64,
    pub length_penalty: f64,
    pub total: f64,
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

/// Run the full pipeline for one question.
pub fn retrieve(
    g: &Graph,
    sg: &SchemaGraph,
    cb: &Codebook,
    idf: &IdfTable,
    question: &Question,
    cfg: &RetrievalConfig,
) -> Result<RetrievalResult, RetrieveError> {
    cfg.validate()?;
    if !g.contains_entity(&question.topic_entity) {
        return Err(KgError::UnknownTopic { question: question.id.clone(), entity: question.topic_entity.clone() }.into());
    }
    let mut timings = Timings::default();

    let t = Instant::now();
    let plans = enumerate_plans(sg, &g.out_relations(&question.topic_entity), cfg);
    if plans.is_empty() {
        timings.plan = micros(t);
        return Ok(RetrievalResult { question_id: question.id.clone(), plan: None, candidates: Vec::new(), k: 0, timings });
    }
    let hint = if cfg.gold_plan_hint { question.gold_schema.as_ref() } else { None };
    let plan = select_query_plan(&plans, question, hint)?;
    let candidates = instantiate_candidates(g, &plans, &question.topic_entity, cfg)?;
    timings.plan = micros(t);

    let t = Instant::now();
    let query_hv = cb.encode_path(plan.relations())?;
    timings.encode = micros(t);

    let t = Instant::now();
    let mut scored = score_candidates(cb, &query_hv, &candidates, idf, cfg)?;
    timings.score = micros(t);

    let t = Instant::now();
    let best = top_k(&scored, cfg.k);
    scored.sort_by(rank_order);
    debug_assert!(best.iter().zip(&scored).all(|(a, b)| a == b));
    let k = best.len();
    timings.select = micros(t);

    Ok(RetrievalResult { question_id: question.id.clone(), plan: Some(plan), candidates: scored, k, timings })
}

/// Candidate schemas per question, computed with the same planning and
/// instantiation settings as retrieval. Feed the result to
/// [`IdfTable::compute`].
pub fn candidate_schema_sets(
    g: &Graph,
    sg: &SchemaGraph,
    questions: &[Question],
    cfg: &RetrievalConfig,
) -> Result<HashMap<String, Vec<Schema>>, RetrieveError> {
    let mut out = HashMap::new();
    for q in questions {
        let plans = enumerate_plans(sg, &g.out_relations(&q.topic_entity), cfg);
        let cands = instantiate_candidates(g, &plans, &q.topic_entity, cfg)?;
        out.insert(q.id.clone(), cands.into_iter().map(|c| c.schema).collect());
    }
    Ok(out)
}

/// IDF statistics of `questions` under `cfg`.
pub fn build_idf(g: &Graph, sg: &SchemaGraph, questions: &[Question], cfg: &RetrievalConfig) -> Result<IdfTable, RetrieveError> {
    let sets = candidate_schema_sets(g, sg, questions, cfg)?;
    Ok(IdfTable::compute(questions, &sets)?)
}
