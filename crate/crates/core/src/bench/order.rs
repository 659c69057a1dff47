use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::table::{Kind, Table};
use super::tail::hdc_for;
use super::BenchError;
use crate::rng;
use crate::vsa::{Hypervector, Operator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderConfig {
    pub families: Vec<Operator>,
    pub lengths: Vec<usize>,
    pub trials: u64,
    pub dim: usize,
    pub block_size: usize,
    pub seed: u64,
}

impl Default for OrderConfig {
    fn default() -> Self {
        OrderConfig { families: Operator::ALL.to_vec(), lengths: vec![2, 3, 4], trials: 500, dim: 4096, block_size: 4, seed: 0 }
    }
}

impl OrderConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::ZeroTrials);
        }
        if self.lengths.iter().any(|l| !(2..=8).contains(l)) {
            return Err(BenchError::InvalidConfig("path lengths must lie in 2..=8".into()));
        }
        for &op in &self.families {
            hdc_for(op, self.block_size, self.dim, 0)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderRow {
    pub family: Operator,
    pub length: usize,
    pub mean_sim: f64,
    pub min_sim: f64,
    pub max_sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSensitivity {
    pub config: OrderConfig,
    pub rows: Vec<OrderRow>,
}

impl OrderSensitivity {
    pub fn row(&self, family: Operator, length: usize) -> Option<&OrderRow> {
        self.rows.iter().find(|r| r.family == family && r.length == length)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "order",
            &[
                ("family", Kind::Text),
                ("commutative", Kind::Bool),
                ("length", Kind::Int),
                ("d", Kind::Int),
                ("trials", Kind::Int),
                ("mean_sim", Kind::Float),
                ("min_sim", Kind::Float),
                ("max_sim", Kind::Float),
            ],
        );
        for r in &self.rows {
            t.push(vec![
                r.family.name().into(),
                r.family.is_commutative().into(),
                r.length.into(),
                self.config.dim.into(),
                self.config.trials.into(),
                r.mean_sim.into(),
                r.min_sim.into(),
                r.max_sim.into(),
            ]);
        }
        t
    }
}

/// Similarity between a random path encoding and the encoding of a random
/// non-identity permutation of the same relations.
pub fn run_order_sensitivity(cfg: &OrderConfig) -> Result<OrderSensitivity, BenchError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &family in &cfg.families {
        let hdc = hdc_for(family, cfg.block_size, cfg.dim, 0)?;
        for &len in &cfg.lengths {
            let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
            for trial in 0..cfg.trials {
                let mut r = rng::stream(cfg.seed, "order", ((len as u64) << 48) ^ ((family.code() as u64) << 40) ^ trial);
                let atoms: Vec<Hypervector> = (0..len).map(|_| Hypervector::random_with(&hdc, &mut r)).collect::<Result<_, _>>()?;
                let identity: Vec<usize> = (0..len).collect();
                let mut perm = identity.clone();
                while perm == identity {
                    perm.shuffle(&mut r);
                }
                let a = Hypervector::bind_all(&hdc, &atoms)?;
                let b = Hypervector::bind_all(&hdc, perm.iter().map(|&i| &atoms[i]))?;
                let s = a.similarity(&b)?;
                sum += s;
                lo = lo.min(s);
                hi = hi.max(s);
            }
            rows.push(OrderRow { family, length: len, mean_sim: sum / cfg.trials as f64, min_sim: lo, max_sim: hi });
        }
    }
    Ok(OrderSensitivity { config: cfg.clone(), rows })
}
