use serde::{Deserialize, Serialize};

use super::table::{Kind, Table};
use super::tail::hdc_for;
use super::BenchError;
use crate::rng;
use crate::vsa::{Hypervector, Operator};

pub const MAX_DIM: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityConfig {
    pub operator: Operator,
    pub block_size: usize,
    /// Distractors per trial.
    pub m: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub trials: u64,
    /// Tail constant from a prior fit.
    pub c: f64,
    pub seed: u64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig { operator: Operator::BipolarXor, block_size: 4, m: 1000, delta: 0.05, epsilon: 0.2, trials: 200, c: 0.5, seed: 0 }
    }
}

impl CapacityConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.m == 0 {
            return bad("need at least one distractor".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.trials < 200 {
            return bad(format!("need at least 200 trials, got {}", self.trials));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if self.operator == Operator::Ghrr && self.block_size == 0 {
            return bad("block size must be >= 1".into());
        }
        Ok(())
    }

    /// `(1 / (c eps^2)) ln(2M / delta)`.
    pub fn predicted_dim(&self) -> f64 {
        (2.0 * self.m as f64 / self.delta).ln() / (self.c * self.epsilon * self.epsilon)
    }

    /// The bipolar closed form `(2 / eps^2) ln(2M / delta)`.
    pub fn theorem_dim(&self) -> f64 {
        2.0 / (self.epsilon * self.epsilon) * (2.0 * self.m as f64 / self.delta).ln()
    }

    fn step(&self) -> usize {
        match self.operator {
            Operator::Ghrr => self.block_size * self.block_size,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityExperiment {
    pub config: CapacityConfig,
    /// Smallest dimension found whose success rate reaches `1 - delta`.
    pub measured_dim: usize,
    pub success_rate: f64,
    pub predicted_dim: f64,
    pub theorem_dim: f64,
    /// Dimensions evaluated, in order, with their success rates.
    pub probes: Vec<(usize, f64)>,
}

impl CapacityExperiment {
    pub fn table(&self) -> Table {
        let c = &self.config;
        let mut t = Table::new(
            "capacity",
            &[
                ("family", Kind::Text),
                ("m", Kind::Int),
                ("delta", Kind::Float),
                ("epsilon", Kind::Float),
                ("trials", Kind::Int),
                ("c", Kind::Float),
                ("d", Kind::Int),
                ("success_rate", Kind::Float),
                ("minimal", Kind::Bool),
                ("predicted_d", Kind::Float),
                ("theorem_d", Kind::Float),
            ],
        );
        for &(d, rate) in &self.probes {
            t.push(vec![
                c.operator.name().into(),
                c.m.into(),
                c.delta.into(),
                c.epsilon.into(),
                c.trials.into(),
                c.c.into(),
                d.into(),
                rate.into(),
                (d == self.measured_dim).into(),
                self.predicted_dim.into(),
                self.theorem_dim.into(),
            ]);
        }
        t
    }
}

/// Fraction of trials in which no distractor reaches `|sim| > epsilon`.
pub fn success_rate(cfg: &CapacityConfig, d: usize) -> Result<f64, BenchError> {
    let hdc = hdc_for(cfg.operator, cfg.block_size, d, 0)?;
    let mut ok = 0u64;
    for trial in 0..cfg.trials {
        let mut r = rng::stream(cfg.seed, "capacity", ((d as u64) << 32) ^ trial);
        let q = Hypervector::random_with(&hdc, &mut r)?;
        let mut worst = 0.0f64;
        for _ in 0..cfg.m {
            worst = worst.max(q.similarity(&Hypervector::random_with(&hdc, &mut r)?)?.abs());
            if worst > cfg.epsilon {
                break;
            }
        }
        if worst <= cfg.epsilon {
            ok += 1;
        }
    }
    Ok(ok as f64 / cfg.trials as f64)
}

/// Doubling then bisection over `d` (in multiples of the block area) for
/// the smallest dimension whose success rate is at least `1 - delta`.
pub fn run_capacity_experiment(cfg: &CapacityConfig) -> Result<CapacityExperiment, BenchError> {
    cfg.validate()?;
    let target = 1.0 - cfg.delta;
    let step = cfg.step();
    let mut probes = Vec::new();
    let mut probe = |units: usize| -> Result<f64, BenchError> {
        let rate = success_rate(cfg, units * step)?;
        probes.push((units * step, rate));
        Ok(rate)
    };

    let max_units = MAX_DIM / step;
    let mut lo = 0usize;
    let mut hi = 8usize.div_ceil(step).max(1);
    let mut hi_rate = probe(hi)?;
    while hi_rate < target {
        if hi >= max_units {
            return Err(BenchError::NoConvergence { max_dim: MAX_DIM });
        }
        lo = hi;
        hi = (hi * 2).min(max_units);
        hi_rate = probe(hi)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let rate = probe(mid)?;
        if rate >= target {
            hi = mid;
            hi_rate = rate;
        } else {
            lo = mid;
        }
    }
    Ok(CapacityExperiment {
        config: cfg.clone(),
        measured_dim: hi * step,
        success_rate: hi_rate,
        predicted_dim: cfg.predicted_dim(),
        theorem_dim: cfg.theorem_dim(),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let cfg = CapacityConfig::default();
        assert!((cfg.theorem_dim() - 50.0 * 40000f64.ln()).abs() < 1e-9);
        assert!((cfg.predicted_dim() - cfg.theorem_dim()).abs() < 1e-9);
    }

    #[test]
    fn small_search_is_consistent() {
        let cfg = CapacityConfig { m: 10, epsilon: 0.5, ..Default::default() };
        let exp = run_capacity_experiment(&cfg).unwrap();
        assert!(exp.success_rate >= 0.95);
        let below = exp.probes.iter().filter(|(d, _)| *d == exp.measured_dim - 1).map(|p| p.1).next();
        if let Some(rate) = below {
            assert!(rate < 0.95);
        }
    }

    #[test]
    fn invalid() {
        assert!(run_capacity_experiment(&CapacityConfig { trials: 10, ..Default::default() }).is_err());
        assert!(run_capacity_experiment(&CapacityConfig { delta: 1.0, ..Default::default() }).is_err());
        assert!(run_capacity_experiment(&CapacityConfig { m: 0, ..Default::default() }).is_err());
    }
}
