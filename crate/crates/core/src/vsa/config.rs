use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::{Result, VsaError};

/// Binding operator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// Block vector of unitary matrices, blockwise matrix product.
    Ghrr,
    /// Unit-modulus phasors, element-wise complex product.
    Fhrr,
    /// Real vectors, circular convolution.
    Hrr,
    /// Real vectors, element-wise product.
    RealElementwise,
    /// `{-1, +1}` vectors, element-wise product (XOR in bipolar code).
    BipolarXor,
    /// Bipolar vector masked by a second independent bipolar draw.
    CommMix,
}

impl Operator {
    pub const ALL: [Operator; 6] =
        [Operator::Ghrr, Operator::Fhrr, Operator::Hrr, Operator::RealElementwise, Operator::BipolarXor, Operator::CommMix];

    pub fn is_commutative(self) -> bool {
        !matches!(self, Operator::Ghrr)
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Operator::Ghrr => 0,
            Operator::Fhrr => 1,
            Operator::Hrr => 2,
            Operator::RealElementwise => 3,
            Operator::BipolarXor => 4,
            Operator::CommMix => 5,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Ghrr => "ghrr",
            Operator::Fhrr => "fhrr",
            Operator::Hrr => "hrr",
            Operator::RealElementwise => "real_elementwise",
            Operator::BipolarXor => "bipolar_xor",
            Operator::CommMix => "comm_mix",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = VsaError;

    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| VsaError::InvalidConfig(format!("unknown operator `{s}`")))
    }
}

/// How GHRR blocks are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockFamily {
    /// `diag(e^{i phi_1}, ..., e^{i phi_m})`. Cheap, but diagonal blocks
    /// commute, so GHRR built from them loses order sensitivity.
    DiagonalPhase,
    /// Random phase diagonal times two random complex Householder reflectors.
    HouseholderProduct,
}

impl BlockFamily {
    pub(crate) fn code(self) -> u8 {
        match self {
            BlockFamily::DiagonalPhase => 0,
            BlockFamily::HouseholderProduct => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(BlockFamily::DiagonalPhase),
            1 => Some(BlockFamily::HouseholderProduct),
            _ => None,
        }
    }
}

impl FromStr for BlockFamily {
    type Err = VsaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diagonal_phase" | "diagonal" => Ok(BlockFamily::DiagonalPhase),
            "householder_product" | "householder" => Ok(BlockFamily::HouseholderProduct),
            _ => Err(VsaError::InvalidConfig(format!("unknown block family `{s}`"))),
        }
    }
}

/// Shape, operator and seed of a hypervector space.
///
/// For GHRR the flattened dimension is `num_blocks * block_size^2`. For the
/// flat families `block_size` must be 1 and `num_blocks` is the vector length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HdcConfig {
    pub num_blocks: usize,
    pub block_size: usize,
    pub operator: Operator,
    pub seed: u64,
    pub block_family: BlockFamily,
}

impl Default for HdcConfig {
    fn default() -> Self {
        HdcConfig { num_blocks: 256, block_size: 4, operator: Operator::Ghrr, seed: 0, block_family: BlockFamily::HouseholderProduct }
    }
}

impl HdcConfig {
    pub fn ghrr(num_blocks: usize, block_size: usize, seed: u64) -> Self {
        HdcConfig { num_blocks, block_size, seed, ..HdcConfig::default() }
    }

    pub fn flat(operator: Operator, dim: usize, seed: u64) -> Self {
        HdcConfig { num_blocks: dim, block_size: 1, operator, seed, block_family: BlockFamily::HouseholderProduct }
    }

    /// A config of the same family with flattened dimension `dim`. For GHRR
    /// `dim` must be a multiple of `block_size^2`.
    pub fn with_dim(self, dim: usize) -> Result<Self> {
        let cfg = match self.operator {
            Operator::Ghrr => {
                let per = self.block_size * self.block_size;
                if per == 0 || !dim.is_multiple_of(per) {
                    return Err(VsaError::InvalidConfig(format!("dimension {dim} is not a multiple of m^2 = {per}")));
                }
                HdcConfig { num_blocks: dim / per, ..self }
            }
            _ => HdcConfig { num_blocks: dim, block_size: 1, ..self },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        HdcConfig { seed, ..self }
    }

    /// Flattened real-or-complex dimension `d`.
    pub fn dim(&self) -> usize {
        match self.operator {
            Operator::Ghrr => self.num_blocks * self.block_size * self.block_size,
            _ => self.num_blocks,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_blocks == 0 {
            return Err(VsaError::InvalidConfig("num_blocks must be >= 1".into()));
        }
        if self.block_size == 0 {
            return Err(VsaError::InvalidConfig("block_size must be >= 1".into()));
        }
        if self.operator != Operator::Ghrr && self.block_size != 1 {
            return Err(VsaError::FlatBlockSize { operator: self.operator, block_size: self.block_size });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(HdcConfig::ghrr(256, 4, 0).dim(), 4096);
        assert_eq!(HdcConfig::flat(Operator::Hrr, 4096, 0).dim(), 4096);
        assert_eq!(HdcConfig::default().with_dim(8192).unwrap().num_blocks, 512);
        assert!(HdcConfig::default().with_dim(8190).is_err());
    }

    #[test]
    fn flat_rejects_blocks() {
        let mut cfg = HdcConfig::flat(Operator::Fhrr, 64, 0);
        cfg.block_size = 2;
        assert!(matches!(cfg.validate(), Err(VsaError::FlatBlockSize { .. })));
    }

    #[test]
    fn operator_names_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
            assert_eq!(Operator::from_code(op.code()), Some(op));
        }
    }
}
