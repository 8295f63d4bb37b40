//! Filter state checkpointing: a small header (step count, rounding spec,
//! noise diagonals) followed by the mean, covariance and process-noise
//! trains in the train dump format.

use std::io::{Read, Write};

use ndarray::Array3;
use tt_core::{dump_network, load_network, RoundingSpec};

use crate::error::{KalmanError, Result};
use crate::state::{KalmanState, NoiseSpec};

pub fn save_checkpoint<W: Write>(
    state: &KalmanState,
    noise: &NoiseSpec,
    w: &mut W,
) -> Result<()> {
    w.write_all(&state.step_count.to_le_bytes())?;
    w.write_all(&state.rounding.tolerance.to_le_bytes())?;
    w.write_all(&(state.rounding.max_rank as u64).to_le_bytes())?;
    let (m, _, l) = noise.measurement.dim();
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&(l as u64).to_le_bytes())?;
    for b in 0..l {
        for q in 0..m {
            w.write_all(&noise.measurement[[q, q, b]].to_le_bytes())?;
        }
    }
    dump_network(&state.mean, w)?;
    dump_network(&state.cov, w)?;
    dump_network(&noise.process, w)?;
    Ok(())
}

pub fn load_checkpoint<R: Read>(r: &mut R) -> Result<(KalmanState, NoiseSpec)> {
    let step_count = read_u64(r)?;
    let tolerance = read_f64(r)?;
    let max_rank = read_u64(r)? as usize;
    let m = read_u64(r)? as usize;
    let l = read_u64(r)? as usize;
    let mut measurement = Array3::zeros((m, m, l));
    for b in 0..l {
        for q in 0..m {
            measurement[[q, q, b]] = read_f64(r)?;
        }
    }
    let mean = load_network(r)?;
    let cov = load_network(r)?;
    let process = load_network(r)?;
    let rounding = RoundingSpec::new(tolerance, max_rank)
        .map_err(|e| KalmanError::InvalidDump(e.to_string()))?;
    let mut state = KalmanState::new(mean, cov, rounding)?;
    state.step_count = step_count;
    let noise = NoiseSpec::new(process, measurement)?;
    Ok((state, noise))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
