//! Binary checkpoint: magic, format version, config, then the flat
//! parameters, all little-endian.

use std::io::{Read, Write};

use super::model::{PolicyConfig, PolicyParameters};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"GQEPOLCY";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(p: &PolicyParameters, mut w: W) -> Result<()> {
    let c = &p.config;
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    for v in [c.vocab_size, c.context_len, c.d_model, c.n_heads, c.n_layers, c.d_ff] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    w.write_all(&c.repetition_penalty.to_le_bytes())?;
    w.write_all(&c.seed.to_le_bytes())?;
    w.write_all(&(p.data.len() as u64).to_le_bytes())?;
    for x in &p.data {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<PolicyParameters> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let mut vb = [0u8; 4];
    r.read_exact(&mut vb)?;
    let version = u32::from_le_bytes(vb);
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let mut dims = [0usize; 6];
    for d in &mut dims {
        *d = read_u64(&mut r)? as usize;
    }
    let config = PolicyConfig {
        vocab_size: dims[0],
        context_len: dims[1],
        d_model: dims[2],
        n_heads: dims[3],
        n_layers: dims[4],
        d_ff: dims[5],
        repetition_penalty: f64::from_bits(read_u64(&mut r)?),
        seed: read_u64(&mut r)?,
    };
    let mut p = PolicyParameters::zeros(config)?;
    let n = read_u64(&mut r)? as usize;
    if n != p.data.len() {
        return Err(Error::Checkpoint(format!("expected {} parameters, found {n}", p.data.len())));
    }
    for x in &mut p.data {
        *x = f64::from_bits(read_u64(&mut r)?);
    }
    if p.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Checkpoint("non-finite parameter".into()));
    }
    Ok(p)
}
