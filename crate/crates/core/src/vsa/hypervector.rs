use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, Uniform};
use std::f64::consts::TAU;

use super::{blocks, hrr, HdcConfig, Operator, Result, VsaError, DIVISION_EPSILON};
use crate::rng;

const ATOM_DOMAIN: &str = "atom";

/// Which operand of the original `bind(x, y)` the caller already holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The known factor was the left operand `x`; the right operand is recovered.
    LeftFactor,
    /// The known factor was the right operand `y`; the left operand is recovered.
    RightFactor,
}

/// One symbol or composed path in a hypervector space.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypervector {
    /// `D` blocks of `m x m` complex matrices, row-major, concatenated.
    /// `unitary` is true for atoms and anything bound only from atoms.
    Ghrr {
        block_size: usize,
        blocks: Vec<Complex64>,
        unitary: bool,
    },
    Fhrr(Vec<Complex64>),
    Hrr(Vec<f64>),
    Real(Vec<f64>),
    Bipolar(Vec<i8>),
    CommMix(Vec<i8>),
}

fn bipolar_bits<R: RngCore>(rng: &mut R, dim: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(dim);
    while out.len() < dim {
        let word = rng.next_u64();
        let take = (dim - out.len()).min(64);
        out.extend((0..take).map(|bit| if word >> bit & 1 == 1 { 1i8 } else { -1i8 }));
    }
    out
}

fn check_same(x: &Hypervector, y: &Hypervector) -> Result<()> {
    if x.operator() != y.operator() {
        return Err(VsaError::FamilyMismatch { left: x.operator(), right: y.operator() });
    }
    if x.shape() != y.shape() {
        return Err(VsaError::DimensionMismatch { left: format!("{:?}", x.shape()), right: format!("{:?}", y.shape()) });
    }
    Ok(())
}

fn cosine_real(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        dot += a * b;
        nx += a * a;
        ny += b * b;
    }
    if nx == 0.0 || ny == 0.0 {
        return Err(VsaError::ZeroNorm { block: 0 });
    }
    Ok(dot / (nx * ny).sqrt())
}

/// `Re <x, y> / (|x| |y|)` for one complex block or vector.
fn cosine_complex(x: &[Complex64], y: &[Complex64], block: usize) -> Result<f64> {
    let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        dot += a.re * b.re + a.im * b.im;
        nx += a.norm_sqr();
        ny += b.norm_sqr();
    }
    if nx == 0.0 || ny == 0.0 {
        return Err(VsaError::ZeroNorm { block });
    }
    Ok(dot / (nx * ny).sqrt())
}

impl Hypervector {
    /// Atomic hypervector for symbol slot `index` under `cfg`.
    ///
    /// GHRR blocks draw from a stream keyed by `(seed, index, block)`, the flat
    /// families from `(seed, index)`, so a symbol's vector depends only on its
    /// slot and never on other symbols.
    pub fn random(cfg: &HdcConfig, index: u64) -> Result<Self> {
        cfg.validate()?;
        let d = cfg.dim();
        Ok(match cfg.operator {
            Operator::Ghrr => {
                let m = cfg.block_size;
                let mut data = vec![Complex64::new(0.0, 0.0); d];
                for (j, block) in data.chunks_exact_mut(m * m).enumerate() {
                    let mut r = rng::block_stream(cfg.seed, ATOM_DOMAIN, index, j as u64);
                    blocks::sample_unitary(&mut r, m, cfg.block_family, block);
                }
                Hypervector::Ghrr { block_size: m, blocks: data, unitary: true }
            }
            Operator::Fhrr => {
                let mut r = rng::stream(cfg.seed, ATOM_DOMAIN, index);
                let phase = Uniform::new(0.0, TAU).expect("valid range");
                Hypervector::Fhrr((0..d).map(|_| Complex64::from_polar(1.0, phase.sample(&mut r))).collect())
            }
            Operator::Hrr | Operator::RealElementwise => {
                let mut r = rng::stream(cfg.seed, ATOM_DOMAIN, index);
                let normal = Normal::new(0.0, 1.0 / (d as f64).sqrt()).expect("positive sd");
                let v: Vec<f64> = (0..d).map(|_| normal.sample(&mut r)).collect();
                if cfg.operator == Operator::Hrr {
                    Hypervector::Hrr(v)
                } else {
                    Hypervector::Real(v)
                }
            }
            Operator::BipolarXor => Hypervector::Bipolar(bipolar_bits(&mut rng::stream(cfg.seed, ATOM_DOMAIN, index), d)),
            Operator::CommMix => {
                let mut r = rng::stream(cfg.seed, ATOM_DOMAIN, index);
                let base = bipolar_bits(&mut r, d);
                let mask = bipolar_bits(&mut r, d);
                Hypervector::CommMix(base.iter().zip(&mask).map(|(a, b)| a * b).collect())
            }
        })
    }

    /// Draw an atom from an arbitrary generator; used by Monte Carlo trials
    /// that manage their own streams.
    pub fn random_with<R: Rng>(cfg: &HdcConfig, rng: &mut R) -> Result<Self> {
        Hypervector::random(&cfg.with_seed(rng.next_u64()), 0)
    }

    /// Binding identity: all `I_m` blocks, unit phasors, delta vector, or ones.
    pub fn identity(cfg: &HdcConfig) -> Result<Self> {
        cfg.validate()?;
        let d = cfg.dim();
        Ok(match cfg.operator {
            Operator::Ghrr => {
                Hypervector::Ghrr { block_size: cfg.block_size, blocks: blocks::identity(cfg.num_blocks, cfg.block_size), unitary: true }
            }
            Operator::Fhrr => Hypervector::Fhrr(vec![Complex64::new(1.0, 0.0); d]),
            Operator::Hrr => {
                let mut v = vec![0.0; d];
                v[0] = 1.0;
                Hypervector::Hrr(v)
            }
            Operator::RealElementwise => Hypervector::Real(vec![1.0; d]),
            Operator::BipolarXor => Hypervector::Bipolar(vec![1; d]),
            Operator::CommMix => Hypervector::CommMix(vec![1; d]),
        })
    }

    pub fn operator(&self) -> Operator {
        match self {
            Hypervector::Ghrr { .. } => Operator::Ghrr,
            Hypervector::Fhrr(_) => Operator::Fhrr,
            Hypervector::Hrr(_) => Operator::Hrr,
            Hypervector::Real(_) => Operator::RealElementwise,
            Hypervector::Bipolar(_) => Operator::BipolarXor,
            Hypervector::CommMix(_) => Operator::CommMix,
        }
    }

    /// Flattened dimension `d`.
    pub fn dim(&self) -> usize {
        match self {
            Hypervector::Ghrr { blocks, .. } | Hypervector::Fhrr(blocks) => blocks.len(),
            Hypervector::Hrr(v) | Hypervector::Real(v) => v.len(),
            Hypervector::Bipolar(v) | Hypervector::CommMix(v) => v.len(),
        }
    }

    /// `(num_blocks, block_size)`.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Hypervector::Ghrr { block_size, blocks, .. } => (blocks.len() / (block_size * block_size), *block_size),
            _ => (self.dim(), 1),
        }
    }

    /// Largest `|A^H A - I|` entry for GHRR, largest `||z| - 1|` for FHRR,
    /// zero for bipolar families with valid entries, `None` for real families.
    pub fn invariant_error(&self) -> Option<f64> {
        match self {
            Hypervector::Ghrr { block_size, blocks, .. } => Some(blocks::unitarity_error(blocks, *block_size)),
            Hypervector::Fhrr(v) => Some(v.iter().map(|c| (c.norm() - 1.0).abs()).fold(0.0, f64::max)),
            Hypervector::Bipolar(v) | Hypervector::CommMix(v) => {
                Some(if v.iter().all(|&b| b == 1 || b == -1) { 0.0 } else { f64::INFINITY })
            }
            Hypervector::Hrr(_) | Hypervector::Real(_) => None,
        }
    }

    /// Compose `self` with `other`. Only GHRR is order-sensitive.
    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector> {
        check_same(self, other)?;
        Ok(match (self, other) {
            (Hypervector::Ghrr { block_size, blocks: x, unitary: ux }, Hypervector::Ghrr { blocks: y, unitary: uy, .. }) => {
                let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
                blocks::mul(x, y, *block_size, &mut out);
                Hypervector::Ghrr { block_size: *block_size, blocks: out, unitary: *ux && *uy }
            }
            (Hypervector::Fhrr(x), Hypervector::Fhrr(y)) => Hypervector::Fhrr(x.iter().zip(y).map(|(a, b)| a * b).collect()),
            (Hypervector::Hrr(x), Hypervector::Hrr(y)) => Hypervector::Hrr(hrr::convolve(x, y)),
            (Hypervector::Real(x), Hypervector::Real(y)) => Hypervector::Real(x.iter().zip(y).map(|(a, b)| a * b).collect()),
            (Hypervector::Bipolar(x), Hypervector::Bipolar(y)) => Hypervector::Bipolar(x.iter().zip(y).map(|(a, b)| a * b).collect()),
            (Hypervector::CommMix(x), Hypervector::CommMix(y)) => Hypervector::CommMix(x.iter().zip(y).map(|(a, b)| a * b).collect()),
            _ => unreachable!("families checked above"),
        })
    }

    /// Recover the other operand of a bind. `known` is the factor the caller
    /// holds and `side` says where it sat in `bind(x, y)`.
    ///
    /// GHRR inverts exactly through the adjoint (`Z Y^H` or `X^H Z`). FHRR
    /// multiplies by the conjugate, the bipolar families multiply again, HRR
    /// uses circular correlation and the real element-wise family divides
    /// with a small guard.
    pub fn unbind(&self, known: &Hypervector, side: Side) -> Result<Hypervector> {
        check_same(self, known)?;
        Ok(match (self, known) {
            (Hypervector::Ghrr { block_size, blocks: z, unitary: uz }, Hypervector::Ghrr { blocks: y, unitary: uy, .. }) => {
                let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
                match side {
                    Side::RightFactor => blocks::mul_adjoint_right(z, y, *block_size, &mut out),
                    Side::LeftFactor => blocks::mul_adjoint_left(y, z, *block_size, &mut out),
                }
                Hypervector::Ghrr { block_size: *block_size, blocks: out, unitary: *uz && *uy }
            }
            (Hypervector::Fhrr(z), Hypervector::Fhrr(y)) => Hypervector::Fhrr(z.iter().zip(y).map(|(a, b)| a * b.conj()).collect()),
            (Hypervector::Hrr(z), Hypervector::Hrr(y)) => Hypervector::Hrr(hrr::correlate(z, y)),
            (Hypervector::Real(z), Hypervector::Real(y)) => {
                Hypervector::Real(z.iter().zip(y).map(|(s, b)| s / (b + DIVISION_EPSILON.copysign(*b))).collect())
            }
            (Hypervector::Bipolar(z), Hypervector::Bipolar(y)) => Hypervector::Bipolar(z.iter().zip(y).map(|(a, b)| a * b).collect()),
            (Hypervector::CommMix(z), Hypervector::CommMix(y)) => Hypervector::CommMix(z.iter().zip(y).map(|(a, b)| a * b).collect()),
            _ => unreachable!("families checked above"),
        })
    }

    /// Blockwise cosine: mean over blocks of `Re <X_j, Y_j>_F / (|X_j| |Y_j|)`.
    /// Flat families are a single block, i.e. ordinary cosine.
    pub fn similarity(&self, other: &Hypervector) -> Result<f64> {
        check_same(self, other)?;
        match (self, other) {
            (Hypervector::Ghrr { block_size, blocks: x, .. }, Hypervector::Ghrr { blocks: y, .. }) => {
                let bs = block_size * block_size;
                let mut total = 0.0;
                for (j, (xb, yb)) in x.chunks_exact(bs).zip(y.chunks_exact(bs)).enumerate() {
                    total += cosine_complex(xb, yb, j)?;
                }
                Ok(total / (x.len() / bs) as f64)
            }
            (Hypervector::Fhrr(x), Hypervector::Fhrr(y)) => cosine_complex(x, y, 0),
            (Hypervector::Hrr(x), Hypervector::Hrr(y)) | (Hypervector::Real(x), Hypervector::Real(y)) => cosine_real(x, y),
            (Hypervector::Bipolar(x), Hypervector::Bipolar(y)) | (Hypervector::CommMix(x), Hypervector::CommMix(y)) => {
                let dot: i64 = x.iter().zip(y).map(|(&a, &b)| (a * b) as i64).sum();
                Ok(dot as f64 / x.len() as f64)
            }
            _ => unreachable!("families checked above"),
        }
    }

    pub fn negated(&self) -> Hypervector {
        match self {
            Hypervector::Ghrr { block_size, blocks, unitary } => {
                Hypervector::Ghrr { block_size: *block_size, blocks: blocks.iter().map(|c| -c).collect(), unitary: *unitary }
            }
            Hypervector::Fhrr(v) => Hypervector::Fhrr(v.iter().map(|c| -c).collect()),
            Hypervector::Hrr(v) => Hypervector::Hrr(v.iter().map(|x| -x).collect()),
            Hypervector::Real(v) => Hypervector::Real(v.iter().map(|x| -x).collect()),
            Hypervector::Bipolar(v) => Hypervector::Bipolar(v.iter().map(|x| -x).collect()),
            Hypervector::CommMix(v) => Hypervector::CommMix(v.iter().map(|x| -x).collect()),
        }
    }

    /// Multiply every entry by `c`. The result leaves the unit-norm families'
    /// invariants, so it is only meant for similarity queries. Bipolar
    /// families cannot be scaled.
    pub fn scaled(&self, c: f64) -> Result<Hypervector> {
        Ok(match self {
            Hypervector::Ghrr { block_size, blocks, .. } => {
                Hypervector::Ghrr { block_size: *block_size, blocks: blocks.iter().map(|z| z * c).collect(), unitary: false }
            }
            Hypervector::Fhrr(v) => Hypervector::Fhrr(v.iter().map(|z| z * c).collect()),
            Hypervector::Hrr(v) => Hypervector::Hrr(v.iter().map(|x| x * c).collect()),
            Hypervector::Real(v) => Hypervector::Real(v.iter().map(|x| x * c).collect()),
            Hypervector::Bipolar(_) | Hypervector::CommMix(_) => {
                return Err(VsaError::Unsupported(self.operator(), "scaling a bipolar vector"))
            }
        })
    }

    /// Left fold of `bind` over `parts`; the empty fold is the identity.
    pub fn bind_all<'a, I>(cfg: &HdcConfig, parts: I) -> Result<Hypervector>
    where
        I: IntoIterator<Item = &'a Hypervector>,
    {
        let mut iter = parts.into_iter();
        let Some(first) = iter.next() else {
            return Hypervector::identity(cfg);
        };
        iter.try_fold(first.clone(), |acc, v| acc.bind(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configs() -> Vec<HdcConfig> {
        let mut out = vec![
            HdcConfig::ghrr(16, 4, 9),
            HdcConfig { block_family: super::super::BlockFamily::DiagonalPhase, ..HdcConfig::ghrr(16, 3, 9) },
        ];
        out.extend(Operator::ALL[1..].iter().map(|&op| HdcConfig::flat(op, 256, 9)));
        out
    }

    #[test]
    fn identity_is_neutral() {
        for cfg in configs() {
            let x = Hypervector::random(&cfg, 0).unwrap();
            let id = Hypervector::identity(&cfg).unwrap();
            let (l, r) = (id.bind(&x).unwrap(), x.bind(&id).unwrap());
            match cfg.operator {
                // delta convolution goes through the FFT; equal up to rounding
                Operator::Hrr => {
                    assert!(l.similarity(&x).unwrap() > 1.0 - 1e-12);
                    assert!(r.similarity(&x).unwrap() > 1.0 - 1e-12);
                }
                _ => {
                    assert_eq!(l, x, "{:?}", cfg.operator);
                    assert_eq!(r, x, "{:?}", cfg.operator);
                }
            }
        }
    }

    #[test]
    fn bipolar_self_bind_is_ones() {
        let cfg = HdcConfig::flat(Operator::BipolarXor, 100, 1);
        let x = Hypervector::random(&cfg, 3).unwrap();
        assert_eq!(x.bind(&x).unwrap(), Hypervector::identity(&cfg).unwrap());
    }

    #[test]
    fn bipolar_unbind_is_exact() {
        let cfg = HdcConfig::flat(Operator::BipolarXor, 333, 1);
        let (x, y) = (Hypervector::random(&cfg, 0).unwrap(), Hypervector::random(&cfg, 1).unwrap());
        assert_eq!(x.bind(&y).unwrap().unbind(&y, Side::RightFactor).unwrap(), x);
    }

    #[test]
    fn ghrr_unbinds_either_side() {
        let cfg = HdcConfig::ghrr(32, 4, 5);
        let (x, y) = (Hypervector::random(&cfg, 0).unwrap(), Hypervector::random(&cfg, 1).unwrap());
        let z = x.bind(&y).unwrap();
        assert!(z.unbind(&y, Side::RightFactor).unwrap().similarity(&x).unwrap() >= 1.0 - 1e-9);
        assert!(z.unbind(&x, Side::LeftFactor).unwrap().similarity(&y).unwrap() >= 1.0 - 1e-9);
        // wrong side gives an unrelated vector
        assert!(z.unbind(&y, Side::LeftFactor).unwrap().similarity(&x).unwrap() < 0.5);
    }

    #[test]
    fn fhrr_and_real_unbind() {
        let cfg = HdcConfig::flat(Operator::Fhrr, 128, 2);
        let (x, y) = (Hypervector::random(&cfg, 0).unwrap(), Hypervector::random(&cfg, 1).unwrap());
        assert!(x.bind(&y).unwrap().unbind(&y, Side::RightFactor).unwrap().similarity(&x).unwrap() > 1.0 - 1e-12);
        let cfg = HdcConfig::flat(Operator::RealElementwise, 128, 2);
        let (x, y) = (Hypervector::random(&cfg, 0).unwrap(), Hypervector::random(&cfg, 1).unwrap());
        assert!(x.bind(&y).unwrap().unbind(&y, Side::LeftFactor).unwrap().similarity(&x).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn self_and_antipodal_similarity() {
        for cfg in configs() {
            let x = Hypervector::random(&cfg, 4).unwrap();
            assert!((x.similarity(&x).unwrap() - 1.0).abs() <= 1e-12);
            assert!((x.similarity(&x.negated()).unwrap() + 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn mismatches_are_errors() {
        let a = Hypervector::random(&HdcConfig::ghrr(4, 2, 0), 0).unwrap();
        let b = Hypervector::random(&HdcConfig::ghrr(4, 3, 0), 0).unwrap();
        let c = Hypervector::random(&HdcConfig::flat(Operator::Hrr, 16, 0), 0).unwrap();
        assert!(matches!(a.bind(&b), Err(VsaError::DimensionMismatch { .. })));
        assert!(matches!(a.similarity(&c), Err(VsaError::FamilyMismatch { .. })));
        assert!(matches!(c.unbind(&a, Side::LeftFactor), Err(VsaError::FamilyMismatch { .. })));
    }

    #[test]
    fn zero_block_is_reported() {
        let a = Hypervector::random(&HdcConfig::ghrr(4, 2, 0), 0).unwrap();
        let zero = a.scaled(0.0).unwrap();
        assert!(matches!(a.similarity(&zero), Err(VsaError::ZeroNorm { .. })));
        let r = Hypervector::Real(vec![0.0; 8]);
        assert!(matches!(r.similarity(&r), Err(VsaError::ZeroNorm { .. })));
    }

    #[test]
    fn bipolar_cannot_scale() {
        let x = Hypervector::random(&HdcConfig::flat(Operator::BipolarXor, 8, 0), 0).unwrap();
        assert!(x.scaled(2.0).is_err());
    }

    #[test]
    fn atoms_satisfy_invariants() {
        for cfg in configs() {
            let x = Hypervector::random(&cfg, 11).unwrap();
            if let Some(err) = x.invariant_error() {
                assert!(err <= 1e-9, "{:?}: {err}", cfg.operator);
            }
        }
    }

    #[test]
    fn diagonal_blocks_commute() {
        let cfg = HdcConfig { block_family: super::super::BlockFamily::DiagonalPhase, ..HdcConfig::ghrr(64, 4, 0) };
        let (a, b) = (Hypervector::random(&cfg, 0).unwrap(), Hypervector::random(&cfg, 1).unwrap());
        let s = a.bind(&b).unwrap().similarity(&b.bind(&a).unwrap()).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
