use num_complex::Complex64;
use std::collections::HashMap;
use std::io::{Read, Write};

use super::{BlockFamily, HdcConfig, Hypervector, Operator, Result, VsaError};

pub const CODEBOOK_MAGIC: &[u8; 8] = b"HVKGCB\0\0";
pub const CODEBOOK_VERSION: u32 = 1;

/// Immutable map from symbol name to its atomic hypervector.
///
/// Symbol `i` in creation order always gets the atom for slot `i`, so
/// appending symbols to the list never changes existing entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    config: HdcConfig,
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<Hypervector>,
}

impl Codebook {
    pub fn build<S: AsRef<str>>(config: HdcConfig, symbols: &[S]) -> Result<Self> {
        config.validate()?;
        if symbols.is_empty() {
            return Err(VsaError::EmptySymbols);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.as_ref().to_string(), i).is_some() {
                return Err(VsaError::DuplicateSymbol(s.as_ref().to_string()));
            }
        }
        let vectors = (0..symbols.len() as u64).map(|i| Hypervector::random(&config, i)).collect::<Result<Vec<_>>>()?;
        Ok(Codebook { config, symbols: symbols.iter().map(|s| s.as_ref().to_string()).collect(), index, vectors })
    }

    pub fn config(&self) -> &HdcConfig {
        &self.config
    }

    /// Symbols in creation order.
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    pub fn get(&self, symbol: &str) -> Result<&Hypervector> {
        self.index.get(symbol).map(|&i| &self.vectors[i]).ok_or_else(|| VsaError::UnknownSymbol(symbol.to_string()))
    }

    /// Bind the relation hypervectors left to right. An empty path encodes
    /// to the identity element.
    pub fn encode_path<S: AsRef<str>>(&self, relations: &[S]) -> Result<Hypervector> {
        let parts = relations.iter().map(|r| self.get(r.as_ref())).collect::<Result<Vec<_>>>()?;
        Hypervector::bind_all(&self.config, parts)
    }

    /// Binary export. Layout (all integers little-endian):
    ///
    /// ```text
    /// magic[8] version:u32 operator:u8 block_family:u8 num_blocks:u64
    /// block_size:u64 seed:u64 count:u64
    /// count x (name_len:u32 name:utf8)
    /// count x payload
    /// ```
    ///
    /// Payloads are raw IEEE-754 bits: GHRR and FHRR store `(re, im)` f64
    /// pairs, HRR and real store f64, bipolar families store i8.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        w.write_all(CODEBOOK_MAGIC)?;
        w.write_all(&CODEBOOK_VERSION.to_le_bytes())?;
        w.write_all(&[c.operator.code(), c.block_family.code()])?;
        for v in [c.num_blocks as u64, c.block_size as u64, c.seed, self.symbols.len() as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        for s in &self.symbols {
            w.write_all(&(s.len() as u32).to_le_bytes())?;
            w.write_all(s.as_bytes())?;
        }
        let mut buf = Vec::new();
        for v in &self.vectors {
            buf.clear();
            match v {
                Hypervector::Ghrr { blocks: data, .. } | Hypervector::Fhrr(data) => {
                    for z in data {
                        buf.extend_from_slice(&z.re.to_le_bytes());
                        buf.extend_from_slice(&z.im.to_le_bytes());
                    }
                }
                Hypervector::Hrr(data) | Hypervector::Real(data) => {
                    data.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes()));
                }
                Hypervector::Bipolar(data) | Hypervector::CommMix(data) => {
                    buf.extend(data.iter().map(|&x| x as u8));
                }
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CODEBOOK_MAGIC {
            return Err(VsaError::Format("bad magic header".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CODEBOOK_VERSION {
            return Err(VsaError::Format(format!("unsupported version {version}")));
        }
        let mut codes = [0u8; 2];
        r.read_exact(&mut codes)?;
        let operator = Operator::from_code(codes[0]).ok_or_else(|| VsaError::Format(format!("operator code {}", codes[0])))?;
        let block_family = BlockFamily::from_code(codes[1]).ok_or_else(|| VsaError::Format(format!("block family code {}", codes[1])))?;
        let num_blocks = read_u64(&mut r)? as usize;
        let block_size = read_u64(&mut r)? as usize;
        let seed = read_u64(&mut r)?;
        let count = read_u64(&mut r)? as usize;
        let config = HdcConfig { num_blocks, block_size, operator, seed, block_family };
        config.validate()?;

        let mut symbols = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let len = read_u32(&mut r)? as usize;
            let mut name = vec![0u8; len];
            r.read_exact(&mut name)?;
            symbols.push(String::from_utf8(name).map_err(|e| VsaError::Format(e.to_string()))?);
        }
        let d = config.dim();
        let mut vectors = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let v = match operator {
                Operator::Ghrr | Operator::Fhrr => {
                    let mut data = Vec::with_capacity(d);
                    for _ in 0..d {
                        let re = f64::from_le_bytes(read_array(&mut r)?);
                        let im = f64::from_le_bytes(read_array(&mut r)?);
                        data.push(Complex64::new(re, im));
                    }
                    if operator == Operator::Ghrr {
                        Hypervector::Ghrr { block_size, blocks: data, unitary: true }
                    } else {
                        Hypervector::Fhrr(data)
                    }
                }
                Operator::Hrr | Operator::RealElementwise => {
                    let data = (0..d).map(|_| read_array(&mut r).map(f64::from_le_bytes)).collect::<Result<Vec<_>>>()?;
                    if operator == Operator::Hrr {
                        Hypervector::Hrr(data)
                    } else {
                        Hypervector::Real(data)
                    }
                }
                Operator::BipolarXor | Operator::CommMix => {
                    let mut raw = vec![0u8; d];
                    r.read_exact(&mut raw)?;
                    let data: Vec<i8> = raw.into_iter().map(|b| b as i8).collect();
                    if operator == Operator::BipolarXor {
                        Hypervector::Bipolar(data)
                    } else {
                        Hypervector::CommMix(data)
                    }
                }
            };
            if let Some(err) = v.invariant_error() {
                if err > 1e-9 {
                    return Err(VsaError::Format(format!("payload violates {operator} invariants ({err:e})")));
                }
            }
            vectors.push(v);
        }
        let mut index = HashMap::with_capacity(count);
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(VsaError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Codebook { config, symbols, index, vectors })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    read_array(r).map(u32::from_le_bytes)
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    read_array(r).map(u64::from_le_bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("rel_{i}")).collect()
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let cfg = HdcConfig::ghrr(32, 4, 77);
        let a = Codebook::build(cfg, &names(5)).unwrap();
        let b = Codebook::build(cfg, &names(5)).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
    }

    #[test]
    fn appending_symbols_keeps_existing_entries() {
        let cfg = HdcConfig::ghrr(8, 4, 1);
        let small = Codebook::build(cfg, &names(3)).unwrap();
        let big = Codebook::build(cfg, &names(6)).unwrap();
        for s in small.symbols() {
            assert_eq!(small.get(s).unwrap(), big.get(s).unwrap());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = HdcConfig::ghrr(8, 4, 1);
        assert!(matches!(Codebook::build(cfg, &["a", "b", "a"]), Err(VsaError::DuplicateSymbol(s)) if s == "a"));
        assert!(matches!(Codebook::build::<&str>(cfg, &[]), Err(VsaError::EmptySymbols)));
        let mut flat = HdcConfig::flat(Operator::Hrr, 64, 0);
        flat.block_size = 4;
        assert!(matches!(Codebook::build(flat, &["a"]), Err(VsaError::FlatBlockSize { .. })));
        let cb = Codebook::build(cfg, &["a"]).unwrap();
        assert!(matches!(cb.get("zzz"), Err(VsaError::UnknownSymbol(_))));
        assert!(matches!(cb.encode_path(&["a", "zzz"]), Err(VsaError::UnknownSymbol(_))));
    }

    #[test]
    fn path_encoding_basics() {
        let cfg = HdcConfig::ghrr(16, 4, 3);
        let cb = Codebook::build(cfg, &names(3)).unwrap();
        assert_eq!(&cb.encode_path(&["rel_1"]).unwrap(), cb.get("rel_1").unwrap());
        assert_eq!(cb.encode_path::<&str>(&[]).unwrap(), Hypervector::identity(&cfg).unwrap());
        let manual = cb.get("rel_0").unwrap().bind(cb.get("rel_1").unwrap()).unwrap().bind(cb.get("rel_2").unwrap()).unwrap();
        assert_eq!(cb.encode_path(&["rel_0", "rel_1", "rel_2"]).unwrap(), manual);
    }

    #[test]
    fn export_round_trip_all_families() {
        let mut cfgs = vec![HdcConfig::ghrr(8, 4, 5)];
        cfgs.extend(Operator::ALL[1..].iter().map(|&op| HdcConfig::flat(op, 50, 5)));
        for cfg in cfgs {
            let cb = Codebook::build(cfg, &names(4)).unwrap();
            let bytes = cb.to_bytes();
            let back = Codebook::read_from(bytes.as_slice()).unwrap();
            assert_eq!(back, cb);
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn import_rejects_corruption() {
        let cb = Codebook::build(HdcConfig::ghrr(2, 2, 5), &names(2)).unwrap();
        let mut bytes = cb.to_bytes();
        bytes[0] = b'X';
        assert!(matches!(Codebook::read_from(bytes.as_slice()), Err(VsaError::Format(_))));
        let mut bytes = cb.to_bytes();
        bytes[8] = 9;
        assert!(matches!(Codebook::read_from(bytes.as_slice()), Err(VsaError::Format(_))));
        let bytes = cb.to_bytes();
        assert!(Codebook::read_from(&bytes[..bytes.len() - 3]).is_err());
    }
}
