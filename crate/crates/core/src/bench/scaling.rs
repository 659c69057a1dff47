use serde::{Deserialize, Serialize};
use std::time::Instant;

use super::table::{Kind, Table};
use super::BenchError;
use crate::kg::{IdfTable, Schema};
use crate::retriever::{score_candidates, CandidatePath, RetrievalConfig};
use crate::vsa::{Codebook, HdcConfig};

/// Smallest median time, in seconds, the fit accepts.
pub const MIN_RESOLVABLE_SECS: f64 = 50e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub ns: Vec<usize>,
    pub dims: Vec<usize>,
    pub repetitions: usize,
    /// Relation vocabulary; candidates are the distinct 2-relation schemas.
    pub relations: usize,
    pub block_size: usize,
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            ns: vec![1000, 2000, 5000, 10_000],
            dims: vec![1024, 2048, 4096, 8192],
            repetitions: 5,
            relations: 128,
            block_size: 4,
            seed: 0,
        }
    }
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.ns.len() < 4 || self.dims.len() < 4 {
            return bad("need at least 4 grid points per axis".into());
        }
        if self.repetitions == 0 {
            return Err(BenchError::ZeroTrials);
        }
        let max_n = self.ns.iter().copied().max().unwrap_or(0);
        if max_n > self.relations * self.relations {
            return bad(format!("{max_n} candidates need more than {} relations", self.relations));
        }
        let area = self.block_size * self.block_size;
        if area == 0 || self.dims.iter().any(|d| d % area != 0 || *d == 0) {
            return bad(format!("every d must be a positive multiple of {area}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub d: usize,
    /// Median wall time over the repetitions.
    pub seconds: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRun {
    pub config: ScalingConfig,
    pub points: Vec<ScalingPoint>,
    /// Fit `seconds = a * n * d + b`.
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    /// Largest `|predicted - observed| / observed`.
    pub max_rel_deviation: f64,
}

impl ScalingRun {
    pub fn point(&self, n: usize, d: usize) -> Option<&ScalingPoint> {
        self.points.iter().find(|p| p.n == n && p.d == d)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "scaling",
            &[
                ("n", Kind::Int),
                ("d", Kind::Int),
                ("seconds", Kind::Float),
                ("predicted", Kind::Float),
                ("a", Kind::Float),
                ("b", Kind::Float),
                ("r_squared", Kind::Float),
            ],
        );
        for p in &self.points {
            t.push(vec![p.n.into(), p.d.into(), p.seconds.into(), p.predicted.into(), self.a.into(), self.b.into(), self.r_squared.into()]);
        }
        t
    }
}

/// `n` candidates with pairwise distinct 2-relation schemas.
pub fn synthetic_candidates(relations: &[String], n: usize) -> Vec<CandidatePath> {
    let r = relations.len();
    (0..n)
        .map(|i| CandidatePath {
            schema: Schema::new([relations[i / r].clone(), relations[i % r].clone()]),
            entity_chain: vec!["s".into(), format!("m{i}"), format!("t{i}")],
        })
        .collect()
}

/// Wall time of one `score_candidates` call.
pub fn time_scoring(cb: &Codebook, candidates: &[CandidatePath]) -> Result<f64, BenchError> {
    let cfg = RetrievalConfig { hdc: *cb.config(), ..Default::default() };
    let idf = IdfTable::default();
    let query = cb.encode_path(&cb.symbols()[..2.min(cb.len())])?;
    let t = Instant::now();
    let scored = score_candidates(cb, &query, candidates, &idf, &cfg)?;
    let secs = t.elapsed().as_secs_f64();
    std::hint::black_box(scored);
    Ok(secs)
}

/// Weighted least squares `y = a x + b` with weights `1 / y^2`, i.e. the
/// line minimising squared relative error. Returns `(a, b, r^2)` where
/// `r^2` is the ordinary unweighted coefficient of determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let w: Vec<f64> = ys.iter().map(|y| if *y > 0.0 { 1.0 / (y * y) } else { 1.0 }).collect();
    let sw: f64 = w.iter().sum();
    let mx = xs.iter().zip(&w).map(|(x, w)| w * x).sum::<f64>() / sw;
    let my = ys.iter().zip(&w).map(|(y, w)| w * y).sum::<f64>() / sw;
    let sxy: f64 = xs.iter().zip(ys).zip(&w).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().zip(&w).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (a, b, r2)
}

/// Time scoring over the `N x d` grid and fit `a N d + b`. Scoring runs on
/// the calling thread. After one untimed pass over the grid, each
/// repetition round times every grid point once, so slow drift in machine
/// speed spreads evenly over the grid; each point reports its median.
pub fn run_scaling_benchmark(cfg: &ScalingConfig) -> Result<ScalingRun, BenchError> {
    cfg.validate()?;
    let relations: Vec<String> = (0..cfg.relations).map(|i| format!("rel{i}")).collect();
    let max_n = cfg.ns.iter().copied().max().unwrap_or(0);
    let all = synthetic_candidates(&relations, max_n);
    let codebooks: Vec<Codebook> = cfg
        .dims
        .iter()
        .map(|&d| Codebook::build(HdcConfig::ghrr(d / (cfg.block_size * cfg.block_size), cfg.block_size, cfg.seed), &relations))
        .collect::<Result<_, _>>()?;
    let grid: Vec<(usize, usize)> = (0..cfg.dims.len()).flat_map(|di| cfg.ns.iter().map(move |&n| (di, n))).collect();
    for &(di, n) in &grid {
        time_scoring(&codebooks[di], &all[..n])?;
    }
    let mut samples = vec![Vec::with_capacity(cfg.repetitions); grid.len()];
    for _ in 0..cfg.repetitions {
        for (slot, &(di, n)) in samples.iter_mut().zip(&grid) {
            slot.push(time_scoring(&codebooks[di], &all[..n])?);
        }
    }
    let mut raw = Vec::with_capacity(grid.len());
    for (mut times, &(di, n)) in samples.into_iter().zip(&grid) {
        times.sort_by(f64::total_cmp);
        let secs = times[times.len() / 2];
        if n > 0 && secs < MIN_RESOLVABLE_SECS {
            return Err(BenchError::TimerResolution { seconds: secs });
        }
        raw.push((n, cfg.dims[di], secs));
    }
    let xs: Vec<f64> = raw.iter().map(|&(n, d, _)| (n * d) as f64).collect();
    let ys: Vec<f64> = raw.iter().map(|&(_, _, s)| s).collect();
    let (a, b, r_squared) = linear_fit(&xs, &ys);
    let points: Vec<ScalingPoint> =
        raw.iter().map(|&(n, d, seconds)| ScalingPoint { n, d, seconds, predicted: a * (n * d) as f64 + b }).collect();
    let max_rel_deviation =
        points.iter().filter(|p| p.seconds > 0.0).map(|p| (p.predicted - p.seconds).abs() / p.seconds).fold(0.0, f64::max);
    Ok(ScalingRun { config: cfg.clone(), points, a, b, r_squared, max_rel_deviation })
}
