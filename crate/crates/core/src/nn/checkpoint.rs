//! Binary checkpoint container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic    b"PPRLCKPT"
//! version  u32
//! n_sizes  u32, then n_sizes x u64   [input, hidden..., policy_dim, 1]
//! params   per layer: weights (row-major f64), bias (f64)
//! adam     first moments, second moments (same order as params),
//!          step_count u64, beta1 f64, beta2 f64, eps f64
//! seed     u64
//! step     u64   global environment step
//! digest   32 bytes SHA-256 over every preceding byte
//! ```
//!
//! Saving a loaded checkpoint reproduces the original bytes exactly.

use std::path::Path;

use sha2::{Digest, Sha256};

use super::{AdamState, Dense, DenseNet};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PPRLCKPT";
pub const VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

/// Everything needed to resume optimisation of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub net: DenseNet,
    pub adam: AdamState,
    pub seed: u64,
    pub global_step: u64,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 24 * self.net.num_params());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let sizes = self.net.layer_sizes();
        out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
        for s in &sizes {
            out.extend_from_slice(&(*s as u64).to_le_bytes());
        }
        let put = |out: &mut Vec<u8>, vals: &[f64]| {
            for v in vals {
                out.extend_from_slice(&v.to_le_bytes());
            }
        };
        for s in self.net.param_slices() {
            put(&mut out, s);
        }
        for m in &self.adam.first_moment {
            put(&mut out, m);
        }
        for v in &self.adam.second_moment {
            put(&mut out, v);
        }
        out.extend_from_slice(&self.adam.step_count.to_le_bytes());
        put(&mut out, &[self.adam.beta1, self.adam.beta2, self.adam.eps_stability]);
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.global_step.to_le_bytes());
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 4 + DIGEST_LEN {
            return Err(Error::Checkpoint("file too short".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if &bytes[..8] != MAGIC {
            return Err(Error::Checkpoint("bad format tag".into()));
        }
        let mut r = Reader { buf: body, pos: 8 };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}, expected {VERSION}")));
        }
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Checkpoint("checksum mismatch (corrupted or truncated file)".into()));
        }
        let n_sizes = r.u32()? as usize;
        if !(3..=64).contains(&n_sizes) {
            return Err(Error::Checkpoint(format!("implausible layer count {n_sizes}")));
        }
        let sizes = (0..n_sizes).map(|_| r.u64().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
        if sizes[n_sizes - 1] != 1 {
            return Err(Error::Checkpoint("value head must have one output".into()));
        }
        let trunk_out = sizes[n_sizes - 3];
        let mut layers = Vec::with_capacity(n_sizes - 1);
        for w in sizes[..n_sizes - 2].windows(2) {
            layers.push(r.dense(w[0], w[1])?);
        }
        layers.push(r.dense(trunk_out, sizes[n_sizes - 2])?);
        layers.push(r.dense(trunk_out, 1)?);
        let net = DenseNet::from_layers(layers).map_err(|e| Error::Checkpoint(e.to_string()))?;

        let lens: Vec<usize> = net.param_slices().iter().map(|s| s.len()).collect();
        let first_moment = lens.iter().map(|&n| r.f64s(n)).collect::<Result<Vec<_>>>()?;
        let second_moment = lens.iter().map(|&n| r.f64s(n)).collect::<Result<Vec<_>>>()?;
        let step_count = r.u64()?;
        let beta1 = r.f64()?;
        let beta2 = r.f64()?;
        let eps_stability = r.f64()?;
        let seed = r.u64()?;
        let global_step = r.u64()?;
        if r.pos != body.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", body.len() - r.pos)));
        }
        Ok(Self {
            net,
            adam: AdamState {
                first_moment,
                second_moment,
                step_count,
                beta1,
                beta2,
                eps_stability,
            },
            seed,
            global_step,
        })
    }

    /// Write atomically: the file is replaced only once fully written.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_bytes()).map_err(|e| Error::io(tmp.display().to_string(), e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Checkpoint("unexpected end of data".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn dense(&mut self, in_dim: usize, out_dim: usize) -> Result<Dense> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Checkpoint("zero layer size".into()));
        }
        let weights = self.f64s(in_dim.checked_mul(out_dim).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        let bias = self.f64s(out_dim)?;
        Ok(Dense {
            in_dim,
            out_dim,
            weights,
            bias,
        })
    }
}
