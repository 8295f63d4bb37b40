use std::io::{BufRead, BufReader, Read};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SimError};

/// Time-indexed input samples, one p-vector per step. Time is 1-based and
/// pre-history (t <= 0) reads as zero.
#[derive(Clone, Debug)]
pub struct InputStream {
    samples: Array2<f64>, // (len, p)
}

impl InputStream {
    pub fn new(samples: Array2<f64>) -> Result<Self> {
        if samples.ncols() == 0 {
            return Err(SimError::InvalidArgument(
                "input stream needs at least one input channel".into(),
            ));
        }
        Ok(InputStream { samples })
    }

    /// Seeded standard-normal stream of `len` samples with `p` channels.
    pub fn gaussian(p: usize, len: usize, seed: u64) -> Result<Self> {
        if p == 0 {
            return Err(SimError::InvalidArgument("p must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(Array2::from_shape_fn((len, p), |_| {
            rng.sample::<f64, _>(StandardNormal)
        }))
    }

    /// One row per time step, p comma-separated decimal values.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let row: Vec<f64> = trimmed
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| SimError::Csv {
                        line: idx + 1,
                        reason: format!("{tok:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(SimError::Csv {
                        line: idx + 1,
                        reason: format!("expected {} columns, got {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(SimError::InvalidArgument("empty input CSV".into()));
        }
        let p = rows[0].len();
        let mut samples = Array2::zeros((rows.len(), p));
        for (t, row) in rows.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                samples[[t, k]] = v;
            }
        }
        Self::new(samples)
    }

    pub fn channels(&self) -> usize {
        self.samples.ncols()
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    /// Input `k` at 1-based time `t`; zero for t <= 0, error past the end.
    pub fn value(&self, t: i64, k: usize) -> Result<f64> {
        if t <= 0 {
            return Ok(0.0);
        }
        let idx = (t - 1) as usize;
        if idx >= self.len() {
            return Err(SimError::TimeOutOfRange {
                t: t as usize,
                len: self.len(),
            });
        }
        Ok(self.samples[[idx, k]])
    }
}
