use ndarray::{Array1, Array4};

use crate::core::TTCore;
use crate::error::Result;
use crate::network::{TTNetwork, TrainKind};

/// All-zero rank-1 vector train with the given payload sizes and batch.
pub fn vector_zeros(mode_sizes: &[usize], batch: usize) -> TTNetwork {
    let cores = mode_sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let rl = if k == 0 { batch } else { 1 };
            TTCore::new(Array4::zeros((rl, 1, n, 1))).expect("static shape")
        })
        .collect();
    TTNetwork::new(cores, TrainKind::Vector, batch).expect("static structure")
}

/// Rank-1 vector train whose batch slice `b` contracts to the Kronecker
/// product of `factors[b]` down the train; all batches share the tail when
/// it is identical. Each inner slice holds one factor per core.
pub fn rank_one_vector(factors: &[Vec<Array1<f64>>]) -> Result<TTNetwork> {
    let batch = factors.len();
    let depth = factors[0].len();
    let mut cores = Vec::with_capacity(depth);
    for k in 0..depth {
        let n = factors[0][k].len();
        let rl = if k == 0 { batch } else { batch };
        let rr = if k == depth - 1 { 1 } else { batch };
        let mut block = Array4::zeros((rl, 1, n, rr));
        for (b, cols) in factors.iter().enumerate() {
            for x in 0..n {
                if k == depth - 1 {
                    block[[b, 0, x, 0]] = cols[k][x];
                } else {
                    block[[b, 0, x, b]] = cols[k][x];
                }
            }
        }
        cores.push(TTCore::new(block)?);
    }
    // single batch collapses to plain rank 1
    TTNetwork::new(cores, TrainKind::Vector, batch)
}

/// Identity operator train: every core is I_n on (o, i).
pub fn identity_operator(mode_sizes: &[usize]) -> TTNetwork {
    let cores = mode_sizes
        .iter()
        .map(|&n| {
            let mut block = Array4::zeros((1, n, n, 1));
            for j in 0..n {
                block[[0, j, j, 0]] = 1.0;
            }
            TTCore::new(block).expect("static shape")
        })
        .collect();
    TTNetwork::new(cores, TrainKind::Matrix, 1).expect("static structure")
}

/// Rank-1 diagonal operator train: core k holds diag(diags[k]).
pub fn diagonal_operator(diags: &[Array1<f64>]) -> TTNetwork {
    let cores = diags
        .iter()
        .map(|d| {
            let n = d.len();
            let mut block = Array4::zeros((1, n, n, 1));
            for j in 0..n {
                block[[0, j, j, 0]] = d[j];
            }
            TTCore::new(block).expect("static shape")
        })
        .collect();
    TTNetwork::new(cores, TrainKind::Matrix, 1).expect("static structure")
}

/// Rank-1 covariance train representing `value_b * I` per batch slice:
/// core 0 carries the per-batch constants, the tail cores are identities.
pub fn scaled_identity_covariance(
    mode_sizes: &[usize],
    batch: usize,
    values: &[f64],
) -> Result<TTNetwork> {
    assert_eq!(values.len(), batch);
    let mut cores = Vec::with_capacity(mode_sizes.len());
    for (k, &n) in mode_sizes.iter().enumerate() {
        let block = if k == 0 {
            let mut b0 = Array4::zeros((batch, n, n, 1));
            for (b, &v) in values.iter().enumerate() {
                for j in 0..n {
                    b0[[b, j, j, 0]] = v;
                }
            }
            b0
        } else {
            let mut bk = Array4::zeros((1, n, n, 1));
            for j in 0..n {
                bk[[0, j, j, 0]] = 1.0;
            }
            bk
        };
        cores.push(TTCore::new(block)?);
    }
    TTNetwork::new(cores, TrainKind::Covariance, batch)
}
