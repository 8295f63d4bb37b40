use std::io::Write;

use krp_convert::{krp_to_tt, RankPolicy};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tt_core::{apply_operator, contract_full, rank_one_vector, OperatorSide, TTNetwork};

use crate::error::{Result, SimError};
use crate::regressor::build_regressor_block;
use crate::stream::InputStream;

const DENSE_GUARD: usize = 1 << 26;

/// Ground-truth system for identification experiments: dimensions, the true
/// kernel coefficients as a train, and the measurement noise level.
#[derive(Clone, Debug)]
pub struct VolterraModel {
    pub inputs: usize,
    pub outputs: usize,
    pub memory: usize,
    pub degree: usize,
    pub kernels: TTNetwork,
    pub meas_var: f64,
}

impl VolterraModel {
    pub fn new(
        inputs: usize,
        outputs: usize,
        memory: usize,
        degree: usize,
        kernels: TTNetwork,
        meas_var: f64,
    ) -> Result<Self> {
        if inputs < 1 || outputs < 1 || memory < 1 || degree < 1 {
            return Err(SimError::InvalidArgument(
                "p, l, M, d must all be >= 1".into(),
            ));
        }
        if !(meas_var >= 0.0) {
            return Err(SimError::InvalidArgument(format!(
                "measurement variance must be >= 0, got {meas_var}"
            )));
        }
        let n = inputs * memory + 1;
        if kernels.depth() != degree
            || kernels.batch() != outputs
            || kernels.mode_ins().iter().any(|&s| s != n)
        {
            return Err(SimError::InvalidArgument(format!(
                "kernel train must be a degree-{degree} train over mode size {n} with batch {outputs}"
            )));
        }
        Ok(VolterraModel {
            inputs,
            outputs,
            memory,
            degree,
            kernels,
            meas_var,
        })
    }

    /// Derived mode size n = pM + 1.
    pub fn mode_size(&self) -> usize {
        self.inputs * self.memory + 1
    }

    /// Synthesized model with `h^(x)d` kernels per output column.
    pub fn synthetic(
        inputs: usize,
        outputs: usize,
        memory: usize,
        degree: usize,
        meas_var: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = inputs * memory + 1;
        let kernels = synthesize_kernels(n, degree, outputs, seed)?;
        Self::new(inputs, outputs, memory, degree, kernels, meas_var)
    }

    /// Noise-free output block `C(t) X` for rows t .. t+m-1.
    pub fn noiseless_outputs(
        &self,
        stream: &InputStream,
        t: usize,
        m: usize,
    ) -> Result<Array2<f64>> {
        let block = build_regressor_block(stream, t, m, self.memory)?;
        let c_train = krp_to_tt(&block, self.degree, &RankPolicy::MachineEps)?;
        let prod = apply_operator(&c_train, &self.kernels, OperatorSide::First)?;
        let dense = contract_full(&prod, DENSE_GUARD)?; // (l, 1, m)
        let mut y = Array2::zeros((m, self.outputs));
        for b in 0..self.outputs {
            for q in 0..m {
                y[[q, b]] = dense[[b, 0, q]];
            }
        }
        Ok(y)
    }

    /// Output block with seeded Gaussian measurement noise. The noise for
    /// the sample at absolute time t+j comes from stream t+j of the seed's
    /// generator, so overlapping or re-chunked blocks see the same values.
    pub fn generate_outputs(
        &self,
        stream: &InputStream,
        t: usize,
        m: usize,
        noise_seed: u64,
    ) -> Result<Array2<f64>> {
        let mut y = self.noiseless_outputs(stream, t, m)?;
        if self.meas_var > 0.0 {
            let sd = self.meas_var.sqrt();
            for j in 0..m {
                let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
                rng.set_stream((t + j) as u64);
                for b in 0..self.outputs {
                    y[[j, b]] += sd * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        Ok(y)
    }

    /// Dump `t, inputs..., outputs...` rows for t in `[t_first, t_last]`.
    pub fn dump_dataset_csv<W: Write>(
        &self,
        stream: &InputStream,
        t_first: usize,
        t_last: usize,
        noise_seed: u64,
        w: &mut W,
    ) -> Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.inputs).map(|k| format!("u{k}")));
        header.extend((1..=self.outputs).map(|k| format!("y{k}")));
        writeln!(w, "{}", header.join(","))?;
        for t in t_first..=t_last {
            let y = self.generate_outputs(stream, t, 1, noise_seed)?;
            let mut fields = vec![t.to_string()];
            for k in 0..self.inputs {
                fields.push(fmt17(stream.value(t as i64, k)?));
            }
            for b in 0..self.outputs {
                fields.push(fmt17(y[[0, b]]));
            }
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Rank-one-per-output kernel train `h^(x)d`, h standard normal per column.
pub fn synthesize_kernels(n: usize, d: usize, l: usize, seed: u64) -> Result<TTNetwork> {
    if n < 1 || d < 1 || l < 1 {
        return Err(SimError::InvalidArgument(
            "n, d, l must all be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<Array1<f64>>> = (0..l)
        .map(|_| {
            let h = Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
            vec![h; d]
        })
        .collect();
    Ok(rank_one_vector(&columns)?)
}

/// 17 significant digits, enough for an exact f64 round-trip.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
