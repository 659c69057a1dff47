use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Structured model answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjudication {
    pub answer: String,
    /// 1-based indices into the prompt's path list, all in range.
    pub supporting_indices: Vec<usize>,
    pub rationale: String,
    pub raw_response: String,
    /// Indices the model cited that were out of range and dropped.
    pub dropped_indices: Vec<i64>,
}

impl Adjudication {
    pub fn has_warnings(&self) -> bool {
        !self.dropped_indices.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("response has no `Answer:` section")]
    MissingAnswer { raw: String },
    #[error("response has an empty answer")]
    EmptyAnswer { raw: String },
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Answer,
    Support,
    Rationale,
}

struct Labels {
    answer: Regex,
    support: Regex,
    rationale: Regex,
    number: Regex,
}

fn labels() -> &'static Labels {
    static LABELS: OnceLock<Labels> = OnceLock::new();
    LABELS.get_or_init(|| Labels {
        answer: Regex::new(r"(?i)^[\s*_#>-]*answer[\s*_]*:[\s*_]*(.*)$").unwrap(),
        support: Regex::new(r"(?i)^[\s*_#>-]*supporting\s+paths?\s*(?:\(s\))?[\s*_]*:[\s*_]*(.*)$").unwrap(),
        rationale: Regex::new(r"(?i)^[\s*_#>-]*rationale[^:]*:[\s*_]*(.*)$").unwrap(),
        number: Regex::new(r"-?\d+").unwrap(),
    })
}

/// Extract `Answer`, `Supporting path(s)` and `Rationale` sections. Labels
/// match case-insensitively and may carry markdown emphasis. Lines without a
/// label continue the previous section.
pub fn parse_response(text: &str, num_paths: usize) -> Result<Adjudication, ParseError> {
    let l = labels();
    let mut answer: Option<String> = None;
    let mut support = String::new();
    let mut rationale = String::new();
    let mut current: Option<Section> = None;

    for line in text.lines() {
        let (section, body) = if let Some(c) = l.answer.captures(line) {
            (Some(Section::Answer), c[1].to_string())
        } else if let Some(c) = l.support.captures(line) {
            (Some(Section::Support), c[1].to_string())
        } else if let Some(c) = l.rationale.captures(line) {
            (Some(Section::Rationale), c[1].to_string())
        } else {
            (None, line.to_string())
        };
        let target = match section {
            Some(s) => {
                current = Some(s);
                if s == Section::Answer && answer.is_none() {
                    answer = Some(String::new());
                }
                s
            }
            None => match current {
                Some(s) => s,
                None => continue,
            },
        };
        let body = body.trim().trim_end_matches(['*', '_']).trim();
        if body.is_empty() {
            continue;
        }
        let buf = match target {
            Section::Answer => answer.as_mut().expect("opened above"),
            Section::Support => &mut support,
            Section::Rationale => &mut rationale,
        };
        if !buf.is_empty() {
            buf.push(' ');
        }
        buf.push_str(body);
    }

    let Some(answer) = answer else {
        return Err(ParseError::MissingAnswer { raw: text.to_string() });
    };
    if answer.is_empty() {
        return Err(ParseError::EmptyAnswer { raw: text.to_string() });
    }
    let mut supporting_indices = Vec::new();
    let mut dropped_indices = Vec::new();
    for m in l.number.find_iter(&support) {
        let n: i64 = m.as_str().parse().unwrap_or(i64::MAX);
        if n >= 1 && (n as u64) <= num_paths as u64 {
            if !supporting_indices.contains(&(n as usize)) {
                supporting_indices.push(n as usize);
            }
        } else {
            dropped_indices.push(n);
        }
    }
    Ok(Adjudication { answer, supporting_indices, rationale, raw_response: text.to_string(), dropped_indices })
}
