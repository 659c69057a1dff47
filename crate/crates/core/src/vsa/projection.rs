use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{HdcConfig, Hypervector, Operator, Result, VsaError};
use crate::rng;

/// Project a dense text embedding into hypervector space with a fixed random
/// Gaussian map `P` (entries `N(0, 1/d_t)`), then normalize.
///
/// For GHRR the projected real vector fills the `m x m` blocks row-major as
/// real parts and each block is scaled to unit Frobenius norm; the resulting
/// blocks are not unitary, so the vector is only suitable as a query. Real
/// families are scaled to unit norm, FHRR gets real-part packing with unit
/// norm, and bipolar families take the sign (zero maps to +1).
pub fn project_embedding(projection_seed: u64, embedding: &[f64], cfg: &HdcConfig) -> Result<Hypervector> {
    cfg.validate()?;
    if embedding.is_empty() || embedding.iter().all(|&x| x == 0.0) {
        return Err(VsaError::ZeroEmbedding);
    }
    let dt = embedding.len();
    let d = cfg.dim();
    let scale = 1.0 / (dt as f64).sqrt();
    let mut r = rng::stream(projection_seed, "projection", dt as u64);
    let projected: Vec<f64> = (0..d)
        .map(|_| {
            embedding
                .iter()
                .map(|&h| {
                    let p: f64 = StandardNormal.sample(&mut r);
                    p * scale * h
                })
                .sum()
        })
        .collect();

    let unit = |v: &[f64]| -> Result<Vec<f64>> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(VsaError::ZeroEmbedding);
        }
        Ok(v.iter().map(|x| x / n).collect())
    };

    Ok(match cfg.operator {
        Operator::Ghrr => {
            let bs = cfg.block_size * cfg.block_size;
            let mut blocks = Vec::with_capacity(d);
            for chunk in projected.chunks_exact(bs) {
                blocks.extend(unit(chunk)?.into_iter().map(|x| Complex64::new(x, 0.0)));
            }
            Hypervector::Ghrr { block_size: cfg.block_size, blocks, unitary: false }
        }
        Operator::Fhrr => Hypervector::Fhrr(unit(&projected)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()),
        Operator::Hrr => Hypervector::Hrr(unit(&projected)?),
        Operator::RealElementwise => Hypervector::Real(unit(&projected)?),
        Operator::BipolarXor | Operator::CommMix => {
            let signs: Vec<i8> = projected.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect();
            if cfg.operator == Operator::BipolarXor {
                Hypervector::Bipolar(signs)
            } else {
                Hypervector::CommMix(signs)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = HdcConfig::ghrr(16, 4, 0);
        let e: Vec<f64> = (0..32).map(|i| (i as f64).sin()).collect();
        assert_eq!(project_embedding(5, &e, &cfg).unwrap(), project_embedding(5, &e, &cfg).unwrap());
        assert_ne!(project_embedding(5, &e, &cfg).unwrap(), project_embedding(6, &e, &cfg).unwrap());
    }

    #[test]
    fn zero_embedding_fails() {
        let cfg = HdcConfig::ghrr(16, 4, 0);
        assert!(matches!(project_embedding(1, &[0.0; 8], &cfg), Err(VsaError::ZeroEmbedding)));
        assert!(matches!(project_embedding(1, &[], &cfg), Err(VsaError::ZeroEmbedding)));
    }

    #[test]
    fn blocks_are_unit_norm() {
        let cfg = HdcConfig::ghrr(8, 4, 0);
        let e: Vec<f64> = (0..20).map(|i| i as f64 - 7.5).collect();
        let Hypervector::Ghrr { blocks, .. } = project_embedding(2, &e, &cfg).unwrap() else { panic!() };
        for b in blocks.chunks_exact(16) {
            let n: f64 = b.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(b.iter().all(|c| c.im == 0.0));
        }
    }

    #[test]
    fn every_family_projects() {
        let e = [0.3, -1.0, 2.0];
        for op in Operator::ALL {
            let cfg = if op == Operator::Ghrr { HdcConfig::ghrr(4, 2, 0) } else { HdcConfig::flat(op, 16, 0) };
            let v = project_embedding(3, &e, &cfg).unwrap();
            assert_eq!(v.operator(), op);
            assert_eq!(v.dim(), cfg.dim());
        }
    }
}
