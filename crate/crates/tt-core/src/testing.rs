//! Brute-force reference paths and random instance generators.
//!
//! Everything here evaluates trains entry by entry with sequential
//! mode-by-mode multiplication, deliberately avoiding the batched reshape
//! route used by [`crate::contract_full`]. Desk scale only.

use ndarray::{Array1, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::core::TTCore;
use crate::network::{TTNetwork, TrainKind};

/// Evaluate one entry of the represented tensor by chaining core slices:
/// a 1 x r row times (r x r') matrices down the train.
pub fn eval_entry(net: &TTNetwork, batch: usize, o_idx: &[usize], i_idx: &[usize]) -> f64 {
    let d = net.depth();
    assert_eq!(o_idx.len(), d);
    assert_eq!(i_idx.len(), d);

    let first = net.cores()[0].block();
    let mut row: Vec<f64> = (0..first.dim().3)
        .map(|b| first[[batch, o_idx[0], i_idx[0], b]])
        .collect();
    for k in 1..d {
        let blk = net.cores()[k].block();
        let (rl, _, _, rr) = blk.dim();
        let mut next = vec![0.0; rr];
        for (b, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..rl {
                acc += row[a] * blk[[a, o_idx[k], i_idx[k], b]];
            }
            *slot = acc;
        }
        row = next;
    }
    debug_assert_eq!(row.len(), 1);
    row[0]
}

/// Dense `(batch, prod(o), prod(i))` tensor via [`eval_entry`] over every index.
pub fn dense_brute(net: &TTNetwork) -> Array3<f64> {
    let outs = net.mode_outs();
    let ins = net.mode_ins();
    let o_total: usize = outs.iter().product();
    let i_total: usize = ins.iter().product();
    let mut out = Array3::zeros((net.batch(), o_total, i_total));
    let mut o_idx = vec![0usize; net.depth()];
    let mut i_idx = vec![0usize; net.depth()];
    for b in 0..net.batch() {
        for of in 0..o_total {
            unflatten(of, &outs, &mut o_idx);
            for inf in 0..i_total {
                unflatten(inf, &ins, &mut i_idx);
                out[[b, of, inf]] = eval_entry(net, b, &o_idx, &i_idx);
            }
        }
    }
    out
}

/// Row-major multi-index of `flat` under `dims` (last index fastest).
fn unflatten(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
}

/// Frobenius norm of one batch slice of the brute-force dense tensor.
pub fn dense_norm(net: &TTNetwork, batch: usize) -> f64 {
    let dense = dense_brute(net);
    dense
        .index_axis(ndarray::Axis(0), batch)
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

pub fn standard_normal_vec(rng: &mut ChaCha8Rng, len: usize) -> Array1<f64> {
    Array1::from_iter((0..len).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Random train with the given interior ranks, standard-normal entries.
///
/// `ranks` lists the d - 1 interior bond dimensions; boundaries follow the
/// kind (batch left, 1 right). For `Gain`, `m` is the core-0 input mode.
pub fn random_train(
    kind: TrainKind,
    mode: usize,
    depth: usize,
    batch: usize,
    ranks: &[usize],
    m: usize,
    seed: u64,
) -> TTNetwork {
    assert_eq!(ranks.len() + 1, depth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left0 = match kind {
        TrainKind::Matrix => 1,
        _ => batch,
    };
    let mut cores = Vec::with_capacity(depth);
    for k in 0..depth {
        let rl = if k == 0 { left0 } else { ranks[k - 1] };
        let rr = if k == depth - 1 { 1 } else { ranks[k] };
        let (o, i) = match kind {
            TrainKind::Vector => (1, mode),
            TrainKind::Matrix | TrainKind::Covariance => (mode, mode),
            TrainKind::Gain => (mode, if k == 0 { m } else { 1 }),
        };
        let block = Array4::from_shape_fn((rl, o, i, rr), |_| rng.sample::<f64, _>(StandardNormal));
        cores.push(TTCore::new(block).unwrap());
    }
    TTNetwork::new(cores, kind, batch).unwrap()
}

/// Relative Frobenius distance between two dense 3-way tensors.
pub fn rel_err(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
    let num = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
