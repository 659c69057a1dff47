use rand::Rng;
use serde::{Deserialize, Serialize};

use super::table::{Kind, Table};
use super::BenchError;
use crate::rng;
use crate::vsa::{HdcConfig, Hypervector, Operator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationConfig {
    /// Relations per path.
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig { n: 3, m: 100, epsilon: 0.2, delta: 0.05, trials: 500, seed: 0 }
    }
}

impl SeparationConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.n == 0 || self.m == 0 {
            return bad("n and m must be >= 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.trials == 0 {
            return Err(BenchError::ZeroTrials);
        }
        Ok(())
    }

    /// `ceil((2 / eps^2) ln(2M / delta))`.
    pub fn dim(&self) -> usize {
        (2.0 / (self.epsilon * self.epsilon) * (2.0 * self.m as f64 / self.delta).ln()).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationExperiment {
    pub config: SeparationConfig,
    pub d: usize,
    pub successes: u64,
    pub success_rate: f64,
    /// Trials where the true path did not score exactly 1.
    pub exact_match_failures: u64,
    pub max_distractor_sim: f64,
}

impl SeparationExperiment {
    pub fn passed(&self) -> bool {
        self.exact_match_failures == 0 && self.success_rate >= 1.0 - self.config.delta
    }

    pub fn table(&self) -> Table {
        let c = &self.config;
        let mut t = Table::new(
            "separation",
            &[
                ("n", Kind::Int),
                ("m", Kind::Int),
                ("epsilon", Kind::Float),
                ("delta", Kind::Float),
                ("d", Kind::Int),
                ("trials", Kind::Int),
                ("success_rate", Kind::Float),
                ("exact_match_failures", Kind::Int),
                ("max_distractor_sim", Kind::Float),
            ],
        );
        t.push(vec![
            c.n.into(),
            c.m.into(),
            c.epsilon.into(),
            c.delta.into(),
            self.d.into(),
            c.trials.into(),
            self.success_rate.into(),
            self.exact_match_failures.into(),
            self.max_distractor_sim.into(),
        ]);
        t
    }
}

/// Bipolar query `r_1 * ... * r_n` against its own re-encoding and `M`
/// distractors, each replacing a nonempty set of positions with fresh atoms.
pub fn run_separation_check(cfg: &SeparationConfig) -> Result<SeparationExperiment, BenchError> {
    cfg.validate()?;
    let d = cfg.dim();
    let hdc = HdcConfig::flat(Operator::BipolarXor, d, 0);
    let mut successes = 0;
    let mut exact_failures = 0;
    let mut overall_max = 0.0f64;
    for trial in 0..cfg.trials {
        let mut r = rng::stream(cfg.seed, "separation", trial);
        let rels: Vec<Hypervector> = (0..cfg.n).map(|_| Hypervector::random_with(&hdc, &mut r)).collect::<Result<_, _>>()?;
        let q = Hypervector::bind_all(&hdc, &rels)?;
        let p_star = Hypervector::bind_all(&hdc, rels.iter().collect::<Vec<_>>())?;
        if q.similarity(&p_star)? != 1.0 {
            exact_failures += 1;
        }
        let mut worst = 0.0f64;
        for _ in 0..cfg.m {
            let mask: u64 = loop {
                let bits = r.random::<u64>() & low_bits(cfg.n);
                if bits != 0 {
                    break bits;
                }
            };
            let mut parts = rels.clone();
            for (i, part) in parts.iter_mut().enumerate() {
                if mask >> (i % 64) & 1 == 1 {
                    *part = Hypervector::random_with(&hdc, &mut r)?;
                }
            }
            worst = worst.max(q.similarity(&Hypervector::bind_all(&hdc, &parts)?)?.abs());
        }
        overall_max = overall_max.max(worst);
        if worst <= cfg.epsilon {
            successes += 1;
        }
    }
    Ok(SeparationExperiment {
        config: cfg.clone(),
        d,
        successes,
        success_rate: successes as f64 / cfg.trials as f64,
        exact_match_failures: exact_failures,
        max_distractor_sim: overall_max,
    })
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
