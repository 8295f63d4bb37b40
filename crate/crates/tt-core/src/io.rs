//! Binary dump/load of a train.
//!
//! Layout: a header of little-endian u64 values (kind tag, core count d,
//! batch, d output-mode sizes, d input-mode sizes, d + 1 ranks) followed by
//! the core blocks as little-endian f64 in (r_left, o, i, r_right) index
//! order, last index fastest.

use std::io::{Read, Write};

use ndarray::Array4;

use crate::core::TTCore;
use crate::error::{Result, TTError};
use crate::network::{TTNetwork, TrainKind};

pub fn dump_network<W: Write>(net: &TTNetwork, w: &mut W) -> Result<()> {
    let d = net.depth();
    write_u64(w, net.kind().tag())?;
    write_u64(w, d as u64)?;
    write_u64(w, net.batch() as u64)?;
    for core in net.cores() {
        write_u64(w, core.mode_out() as u64)?;
    }
    for core in net.cores() {
        write_u64(w, core.mode_in() as u64)?;
    }
    for r in net.ranks() {
        write_u64(w, r as u64)?;
    }
    for core in net.cores() {
        debug_assert!(core.block().is_standard_layout());
        for v in core.block().iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_network<R: Read>(r: &mut R) -> Result<TTNetwork> {
    let kind = TrainKind::from_tag(read_u64(r)?)?;
    let d = read_u64(r)? as usize;
    if d == 0 {
        return Err(TTError::InvalidDump("zero core count".into()));
    }
    let batch = read_u64(r)? as usize;
    let outs = read_vec(r, d)?;
    let ins = read_vec(r, d)?;
    let ranks = read_vec(r, d + 1)?;
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let shape = (ranks[k], outs[k], ins[k], ranks[k + 1]);
        let len = shape.0 * shape.1 * shape.2 * shape.3;
        let mut data = vec![0.0f64; len];
        for v in data.iter_mut() {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        let block = Array4::from_shape_vec(shape, data)
            .map_err(|e| TTError::InvalidDump(format!("core {k}: {e}")))?;
        cores.push(TTCore::new(block)?);
    }
    TTNetwork::new(cores, kind, batch)
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_vec<R: Read>(r: &mut R, len: usize) -> Result<Vec<usize>> {
    (0..len).map(|_| Ok(read_u64(r)? as usize)).collect()
}
