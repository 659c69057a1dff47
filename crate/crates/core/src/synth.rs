//! Planted-path benchmark generator.
//!
//! Entities `e0..` and relations `r0..` are split into a few types: entity
//! `e_i` has type `i % types`, and relation `r_j` only points at entities of
//! type `j % types`. Every question walks a random relation chain from a
//! random topic; the chain is inserted into the graph, then random triples
//! fill the graph up to the requested size.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use thiserror::Error;

use crate::kg::{Graph, KgError, Question, Schema};
use crate::rng;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible sizes: {0}")]
    Infeasible(String),
    #[error("planted path for question `{0}` is not walkable")]
    NotWalkable(String),
    #[error(transparent)]
    Kg(#[from] KgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub entities: usize,
    pub relations: usize,
    pub triples: usize,
    pub questions: usize,
    /// Longest planted path; lengths are drawn uniformly from `1..=max_len`.
    pub max_len: usize,
    pub types: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { entities: 200, relations: 20, triples: 2000, questions: 100, max_len: 3, types: 4, seed: 0 }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Infeasible(m));
        if self.entities < 2 || self.relations == 0 || self.max_len == 0 {
            return bad("need at least 2 entities, 1 relation and max_len >= 1".into());
        }
        if self.types == 0 || self.types > self.entities {
            return bad(format!("types must lie in 1..={}, got {}", self.entities, self.types));
        }
        if self.triples < self.questions * self.max_len {
            return bad(format!("T = {} is smaller than Q * max_len = {}", self.triples, self.questions * self.max_len));
        }
        let per_type = self.entities / self.types;
        let capacity = self.entities as u128 * self.relations as u128 * per_type as u128;
        if (self.triples as u128) * 2 > capacity {
            return bad(format!("T = {} exceeds half the {} possible typed triples", self.triples, capacity));
        }
        Ok(())
    }
}

/// A generated graph and its questions.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub config: SynthConfig,
    pub graph: Graph,
    pub questions: Vec<Question>,
}

pub fn entity_name(i: usize) -> String {
    format!("e{i}")
}

pub fn relation_name(j: usize) -> String {
    format!("r{j}")
}

impl Benchmark {
    /// Type of an entity produced by the generator.
    pub fn entity_type(&self, name: &str) -> Option<usize> {
        let i: usize = name.strip_prefix('e')?.parse().ok()?;
        (i < self.config.entities).then(|| i % self.config.types)
    }

    /// Type every gold answer of `q` shares.
    pub fn answer_type(&self, q: &Question) -> Option<usize> {
        let last = q.gold_schema.as_ref()?.relations().last()?;
        let j: usize = last.strip_prefix('r')?.parse().ok()?;
        Some(j % self.config.types)
    }

    pub fn write_triples<W: Write>(&self, w: W) -> std::io::Result<()> {
        self.graph.write_tsv(w)
    }

    pub fn write_questions<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::kg::write_questions(&self.questions, w)
    }

    /// `entity<TAB>type` per line.
    pub fn write_types<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.config.entities {
            writeln!(w, "{}\t{}", entity_name(i), i % self.config.types)?;
        }
        Ok(())
    }
}

/// Every entity reachable from `topic` along `schema`, sorted by name.
pub fn walk(g: &Graph, topic: &str, schema: &Schema) -> Vec<String> {
    let Some(start) = g.entity_id(topic) else { return Vec::new() };
    let mut frontier = BTreeSet::from([start]);
    for rel in schema.relations() {
        let Some(r) = g.relation_id(rel) else { return Vec::new() };
        frontier = frontier.iter().flat_map(|&e| g.tails(e, r).iter().copied()).collect();
    }
    let mut out: Vec<String> = frontier.into_iter().map(|e| g.entity_name(e).to_string()).collect();
    out.sort();
    out
}

pub fn question_text(topic: &str, schema: &Schema) -> String {
    format!("Starting from {topic}, which entity is reached via {}?", schema.relations().join(", then "))
}

pub fn generate(cfg: &SynthConfig) -> Result<Benchmark, SynthError> {
    cfg.validate()?;
    let by_type: Vec<Vec<usize>> = (0..cfg.types).map(|t| (t..cfg.entities).step_by(cfg.types).collect()).collect();
    let mut triples: BTreeSet<(usize, usize, usize)> = BTreeSet::new();

    let mut rng = rng::stream(cfg.seed, "synth-plant", 0);
    let mut planted = Vec::with_capacity(cfg.questions);
    for _ in 0..cfg.questions {
        let topic = rng.random_range(0..cfg.entities);
        let len = rng.random_range(1..=cfg.max_len);
        let rels: Vec<usize> = (0..len).map(|_| rng.random_range(0..cfg.relations)).collect();
        let mut here = topic;
        for &r in &rels {
            let tail = *by_type[r % cfg.types].choose(&mut rng).expect("types validated");
            triples.insert((here, r, tail));
            here = tail;
        }
        planted.push((topic, rels));
    }

    let mut rng = rng::stream(cfg.seed, "synth-fill", 0);
    while triples.len() < cfg.triples {
        let h = rng.random_range(0..cfg.entities);
        let r = rng.random_range(0..cfg.relations);
        let t = *by_type[r % cfg.types].choose(&mut rng).expect("types validated");
        triples.insert((h, r, t));
    }

    let graph = Graph::from_triples(triples.iter().map(|&(h, r, t)| (entity_name(h), relation_name(r), entity_name(t))))?;

    let mut questions = Vec::with_capacity(cfg.questions);
    for (i, (topic, rels)) in planted.into_iter().enumerate() {
        let id = format!("q{i:04}");
        let topic = entity_name(topic);
        let schema = Schema::new(rels.into_iter().map(relation_name));
        let answers = walk(&graph, &topic, &schema);
        if answers.is_empty() {
            return Err(SynthError::NotWalkable(id));
        }
        questions.push(Question {
            id,
            text: question_text(&topic, &schema),
            topic_entity: topic,
            gold_answers: Some(answers),
            gold_schema: Some(schema),
        });
    }
    Ok(Benchmark { config: *cfg, graph, questions })
}

/// Type map as a lookup table, for callers that only have names.
pub fn type_map(b: &Benchmark) -> BTreeMap<String, usize> {
    (0..b.config.entities).map(|i| (entity_name(i), i % b.config.types)).collect()
}
