use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

use super::{Graph, KgError, Result, Schema};

/// One question record. Gold fields are only present for synthetic or
/// labelled data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub topic_entity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_answers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_schema: Option<Schema>,
}

/// Read JSON Lines question records. Blank lines are skipped. When `graph`
/// is given, every topic entity must exist in it.
pub fn load_questions<R: BufRead>(source: R, graph: Option<&Graph>) -> Result<Vec<Question>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let q: Question = serde_json::from_str(&line).map_err(|e| KgError::Malformed { line: i + 1, reason: e.to_string() })?;
        if let Some(g) = graph {
            if !g.contains_entity(&q.topic_entity) {
                return Err(KgError::UnknownTopic { question: q.id, entity: q.topic_entity });
            }
        }
        out.push(q);
    }
    Ok(out)
}

pub fn write_questions<W: Write>(questions: &[Question], mut w: W) -> std::io::Result<()> {
    for q in questions {
        serde_json::to_writer(&mut w, q)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
