use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

use super::{KgError, Question, Result, Schema};

/// `log(1 + n_train / (1 + freq))`.
pub fn idf_value(n_train: u64, freq: u64) -> f64 {
    (1.0 + n_train as f64 / (1.0 + freq as f64)).ln()
}

/// Schema document frequencies over a set of training questions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdfTable {
    pub n_train: u64,
    /// Canonical schema key -> number of questions whose candidate set
    /// contains at least one path with that schema.
    pub freq: BTreeMap<String, u64>,
}

impl IdfTable {
    /// Count, per schema, the questions whose candidate set mentions it.
    /// Repeats inside one candidate set count once.
    pub fn compute(questions: &[Question], candidate_sets: &HashMap<String, Vec<Schema>>) -> Result<Self> {
        let ids: HashSet<&str> = questions.iter().map(|q| q.id.as_str()).collect();
        let mut freq = BTreeMap::new();
        for (qid, schemas) in candidate_sets {
            if !ids.contains(qid.as_str()) {
                return Err(KgError::UnknownQuestion(qid.clone()));
            }
            let distinct: HashSet<String> = schemas.iter().map(Schema::canonical).collect();
            for key in distinct {
                *freq.entry(key).or_insert(0) += 1;
            }
        }
        Ok(IdfTable { n_train: questions.len() as u64, freq })
    }

    pub fn freq(&self, schema: &Schema) -> u64 {
        self.freq.get(&schema.canonical()).copied().unwrap_or(0)
    }

    pub fn idf(&self, schema: &Schema) -> f64 {
        idf_value(self.n_train, self.freq(schema))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(id: &str) -> Question {
        Question { id: id.into(), text: String::new(), topic_entity: "a".into(), gold_answers: None, gold_schema: None }
    }

    #[test]
    fn closed_form_values() {
        assert!((idf_value(100, 0) - 101f64.ln()).abs() < 1e-15);
        assert!((idf_value(100, 0) - 4.6151).abs() < 1e-4);
        assert!((idf_value(100, 99) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn repeats_within_a_question_count_once() {
        let qs = vec![q("a"), q("b")];
        let s = Schema::new(["r1"]);
        let sets = HashMap::from([("a".to_string(), vec![s.clone(), s.clone()]), ("b".to_string(), vec![Schema::new(["r2"])])]);
        let t = IdfTable::compute(&qs, &sets).unwrap();
        assert_eq!(t.freq(&s), 1);
        assert_eq!(t.n_train, 2);
        assert_eq!(t.freq(&Schema::new(["zzz"])), 0);
    }

    #[test]
    fn unknown_question_rejected() {
        let sets = HashMap::from([("zz".to_string(), vec![])]);
        assert!(IdfTable::compute(&[q("a")], &sets).is_err());
    }
}
