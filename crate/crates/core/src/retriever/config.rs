use serde::{Deserialize, Serialize};

use super::RetrieveError;
use crate::vsa::HdcConfig;

/// How the length term of the calibrated score is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// `beta * lambda^|z|`
    #[default]
    AsPrinted,
    /// `beta * (1 - lambda^|z|)`, which grows with path length.
    LengthProportional,
}

/// Every free parameter of retrieval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub hdc: HdcConfig,
    /// Weight of the schema IDF bonus.
    pub alpha: f64,
    /// Weight of the length term.
    pub beta: f64,
    /// Base of the length term, strictly inside (0, 1).
    pub lambda: f64,
    /// Paths kept for adjudication.
    pub k: usize,
    /// Maximum plan length.
    pub l_max: usize,
    /// Beam width for plan enumeration; the entity frontier is capped at
    /// `beam * |plans|`. `usize::MAX` disables pruning.
    pub beam: usize,
    pub penalty_mode: PenaltyMode,
    /// Use a question's gold schema as the query plan when it is among the
    /// enumerated plans. Only meaningful for synthetic evaluation.
    pub gold_plan_hint: bool,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            hdc: HdcConfig::default(),
            alpha: 0.2,
            beta: 0.1,
            lambda: 0.8,
            k: 3,
            l_max: 3,
            beam: 10_000,
            penalty_mode: PenaltyMode::AsPrinted,
            gold_plan_hint: false,
        }
    }
}

impl RetrievalConfig {
    pub const UNBOUNDED_BEAM: usize = usize::MAX;

    pub fn validate(&self) -> Result<(), RetrieveError> {
        let bad = |msg: String| Err(RetrieveError::InvalidConfig(msg));
        self.hdc.validate()?;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be a finite value >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be a finite value >= 0, got {}", self.beta));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        if self.k == 0 {
            return bad("k must be >= 1".into());
        }
        if self.l_max == 0 {
            return bad("l_max must be >= 1".into());
        }
        if self.beam == 0 {
            return bad("beam must be >= 1".into());
        }
        Ok(())
    }

    /// Length term subtracted from the score of a path of `len` relations.
    pub fn length_penalty(&self, len: usize) -> f64 {
        let pow = self.lambda.powi(len as i32);
        match self.penalty_mode {
            PenaltyMode::AsPrinted => self.beta * pow,
            PenaltyMode::LengthProportional => self.beta * (1.0 - pow),
        }
    }
}
