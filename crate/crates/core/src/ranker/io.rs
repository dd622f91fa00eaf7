//! Binary weight and training-pair files.
//!
//! Weights: `CLCRANK\0`, u32 version, u32 parameter count, then the
//! parameters as little-endian f32. A JSON sidecar (`<path>.json`) carries the
//! dimensions, standardization statistics and training settings.
//!
//! Pairs: `CLCPAIRS`, u32 version, u32 record width (17), u64 record count,
//! then records of `x1[8], x2[8], p` as little-endian f32.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_DIM};
use super::net::{RankerWeights, HIDDEN, PARAM_COUNT};
use super::train::{PairSample, RankTrainConfig};
use crate::error::{Error, Result};

const WEIGHTS_MAGIC: &[u8; 8] = b"CLCRANK\0";
const PAIRS_MAGIC: &[u8; 8] = b"CLCPAIRS";
const VERSION: u32 = 1;
const PAIR_WIDTH: u32 = 2 * FEATURE_DIM as u32 + 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsMeta {
    pub version: u32,
    pub feature_dim: usize,
    pub hidden: usize,
    pub param_count: usize,
    pub feature_means: FeatureVector,
    pub feature_scales: FeatureVector,
    pub train: Option<RankTrainConfig>,
    pub final_loss: Option<f64>,
}

impl WeightsMeta {
    pub fn for_weights(w: &RankerWeights, train: Option<RankTrainConfig>, final_loss: Option<f64>) -> Self {
        WeightsMeta {
            version: VERSION,
            feature_dim: FEATURE_DIM,
            hidden: HIDDEN,
            param_count: PARAM_COUNT,
            feature_means: w.feature_means,
            feature_scales: w.feature_scales,
            train,
            final_loss,
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Ranker(msg.into())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b) as f64)
}

fn read_magic(r: &mut impl Read, magic: &[u8; 8]) -> Result<()> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    if &b != magic {
        return Err(bad("bad magic"));
    }
    if read_u32(r)? != VERSION {
        return Err(bad("unsupported version"));
    }
    Ok(())
}

/// Writes the weight file and its sidecar. Parameters are stored as f32.
pub fn save_weights(path: &Path, w: &RankerWeights, meta: &WeightsMeta) -> Result<()> {
    if w.params.len() != PARAM_COUNT {
        return Err(bad(format!("expected {PARAM_COUNT} parameters, got {}", w.params.len())));
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(WEIGHTS_MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(PARAM_COUNT as u32).to_le_bytes())?;
    for &p in &w.params {
        out.write_all(&(p as f32).to_le_bytes())?;
    }
    out.flush()?;
    let mut meta = meta.clone();
    meta.feature_means = w.feature_means;
    meta.feature_scales = w.feature_scales;
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Reads a weight file and its sidecar.
pub fn load_weights(path: &Path) -> Result<(RankerWeights, WeightsMeta)> {
    let mut r = BufReader::new(fs::File::open(path)?);
    read_magic(&mut r, WEIGHTS_MAGIC)?;
    let count = read_u32(&mut r)? as usize;
    if count != PARAM_COUNT {
        return Err(bad(format!("expected {PARAM_COUNT} parameters, file has {count}")));
    }
    let params = (0..count).map(|_| read_f32(&mut r)).collect::<Result<Vec<f64>>>()?;
    let meta: WeightsMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if meta.feature_dim != FEATURE_DIM || meta.hidden != HIDDEN || meta.param_count != PARAM_COUNT {
        return Err(bad("sidecar dimensions do not match"));
    }
    let w = RankerWeights { params, feature_means: meta.feature_means, feature_scales: meta.feature_scales };
    if !w.is_finite() || w.feature_scales.iter().any(|&s| s <= 0.0) {
        return Err(bad("weights are not finite"));
    }
    Ok((w, meta))
}

pub fn save_pairs(path: &Path, pairs: &[PairSample]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(PAIRS_MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&PAIR_WIDTH.to_le_bytes())?;
    out.write_all(&(pairs.len() as u64).to_le_bytes())?;
    for s in pairs {
        for v in s.x1.iter().chain(&s.x2).chain(std::iter::once(&s.p)) {
            out.write_all(&(*v as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn load_pairs(path: &Path) -> Result<Vec<PairSample>> {
    let mut r = BufReader::new(fs::File::open(path)?);
    read_magic(&mut r, PAIRS_MAGIC)?;
    if read_u32(&mut r)? != PAIR_WIDTH {
        return Err(bad("unexpected record width"));
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let count = u64::from_le_bytes(b) as usize;
    let mut pairs = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        let mut x1 = [0.0; FEATURE_DIM];
        let mut x2 = [0.0; FEATURE_DIM];
        for x in x1.iter_mut().chain(x2.iter_mut()) {
            *x = read_f32(&mut r)?;
        }
        let p = read_f32(&mut r)?;
        if !(0.0..=1.0).contains(&p) || x1.iter().chain(&x2).any(|x| !x.is_finite()) {
            return Err(bad("invalid pair record"));
        }
        pairs.push(PairSample { x1, x2, p });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_round_trip_at_f32_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.bin");
        let mut w = RankerWeights::init(3);
        w.feature_means = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        w.feature_scales = [0.5; 8];
        save_weights(&path, &w, &WeightsMeta::for_weights(&w, None, Some(0.1))).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 16 + 4 * PARAM_COUNT as u64);
        let (back, meta) = load_weights(&path).unwrap();
        assert_eq!(meta.final_loss, Some(0.1));
        assert_eq!(back.feature_means, w.feature_means);
        for (a, b) in back.params.iter().zip(&w.params) {
            assert_eq!(*a, *b as f32 as f64);
        }
    }

    #[test]
    fn pairs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bin");
        let pairs = vec![
            PairSample { x1: [1.5; 8], x2: [0.25; 8], p: 1.0 },
            PairSample { x1: [0.0; 8], x2: [2.0; 8], p: 0.5 },
        ];
        save_pairs(&path, &pairs).unwrap();
        assert_eq!(load_pairs(&path).unwrap(), pairs);
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk");
        fs::write(&path, b"not a weight file at all").unwrap();
        assert!(load_weights(&path).is_err());
        assert!(load_pairs(&path).is_err());
    }
}
