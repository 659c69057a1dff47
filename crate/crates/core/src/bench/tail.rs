use serde::{Deserialize, Serialize};

use super::table::{Kind, Table};
use super::BenchError;
use crate::rng;
use crate::vsa::{HdcConfig, Hypervector, Operator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub operator: Operator,
    /// Block size for GHRR; ignored by the flat families.
    pub block_size: usize,
    pub dims: Vec<usize>,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig { operator: Operator::BipolarXor, block_size: 4, dims: vec![512, 2048, 8192], epsilon: 0.1, trials: 100_000, seed: 0 }
    }
}

impl TailConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::ZeroTrials);
        }
        if self.trials < MIN_TRIALS {
            return Err(BenchError::InvalidConfig(format!("need at least {MIN_TRIALS} trials, got {}", self.trials)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(BenchError::InvalidConfig(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 64) {
            return Err(BenchError::InvalidConfig("dimensions must be >= 64".into()));
        }
        for &d in &self.dims {
            hdc_for(self.operator, self.block_size, d, 0)?;
        }
        Ok(())
    }
}

pub const MIN_TRIALS: u64 = 1000;

pub(crate) fn hdc_for(op: Operator, block_size: usize, d: usize, seed: u64) -> Result<HdcConfig, BenchError> {
    let base = match op {
        Operator::Ghrr => HdcConfig::ghrr(1, block_size, seed),
        other => HdcConfig::flat(other, 1, seed),
    };
    Ok(base.with_dim(d)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPoint {
    pub d: usize,
    pub exceedances: u64,
    /// Empirical `Pr(|sim| >= epsilon)`.
    pub rate: f64,
    /// Two standard errors of `rate`.
    pub band: f64,
    /// `2 exp(-epsilon^2 d / 2)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailExperiment {
    pub config: TailConfig,
    pub points: Vec<TailPoint>,
    /// Least-squares slope through the origin of `-ln(rate / 2)` against
    /// `d epsilon^2`, over points with a nonzero rate.
    pub c: Option<f64>,
}

impl TailExperiment {
    /// Rates never increase with `d` (dimensions taken in ascending order).
    pub fn monotone(&self) -> bool {
        self.sorted().windows(2).all(|w| w[1].rate <= w[0].rate)
    }

    /// As [`monotone`](Self::monotone) but allowing the two points' noise bands.
    pub fn monotone_within_noise(&self) -> bool {
        self.sorted().windows(2).all(|w| w[1].rate <= w[0].rate + w[0].band + w[1].band)
    }

    pub fn point(&self, d: usize) -> Option<&TailPoint> {
        self.points.iter().find(|p| p.d == d)
    }

    fn sorted(&self) -> Vec<&TailPoint> {
        let mut v: Vec<&TailPoint> = self.points.iter().collect();
        v.sort_by_key(|p| p.d);
        v
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "tail",
            &[
                ("family", Kind::Text),
                ("d", Kind::Int),
                ("epsilon", Kind::Float),
                ("trials", Kind::Int),
                ("exceedances", Kind::Int),
                ("rate", Kind::Float),
                ("band_2sigma", Kind::Float),
                ("bound", Kind::Float),
                ("c_fit", Kind::Float),
            ],
        );
        for p in &self.points {
            t.push(vec![
                self.config.operator.name().into(),
                p.d.into(),
                self.config.epsilon.into(),
                self.config.trials.into(),
                p.exceedances.into(),
                p.rate.into(),
                p.band.into(),
                p.bound.into(),
                self.c.unwrap_or(f64::NAN).into(),
            ]);
        }
        t
    }
}

/// Pairs of independent atoms per trial; count `|sim| >= epsilon`.
pub fn run_tail_experiment(cfg: &TailConfig) -> Result<TailExperiment, BenchError> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.dims.len());
    for &d in &cfg.dims {
        let hdc = hdc_for(cfg.operator, cfg.block_size, d, 0)?;
        let mut exceed = 0u64;
        for trial in 0..cfg.trials {
            let mut r = rng::stream(cfg.seed, "tail", ((d as u64) << 40) ^ trial);
            let x = Hypervector::random_with(&hdc, &mut r)?;
            let y = Hypervector::random_with(&hdc, &mut r)?;
            if x.similarity(&y)?.abs() >= cfg.epsilon {
                exceed += 1;
            }
        }
        let n = cfg.trials as f64;
        let rate = exceed as f64 / n;
        points.push(TailPoint {
            d,
            exceedances: exceed,
            rate,
            band: 2.0 * (rate * (1.0 - rate) / n).sqrt(),
            bound: 2.0 * (-cfg.epsilon * cfg.epsilon * d as f64 / 2.0).exp(),
        });
    }
    let c = fit_c(&points, cfg.epsilon);
    Ok(TailExperiment { config: cfg.clone(), points, c })
}

fn fit_c(points: &[TailPoint], eps: f64) -> Option<f64> {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in points.iter().filter(|p| p.rate > 0.0) {
        let x = p.d as f64 * eps * eps;
        let y = -(p.rate / 2.0).ln();
        sxy += x * y;
        sxx += x * x;
    }
    (sxx > 0.0).then(|| sxy / sxx)
}
