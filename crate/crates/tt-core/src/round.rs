use ndarray::{Array2, Array4, Order};
use ndarray_linalg::{JobSvd, QR, SVDDC};

use crate::core::TTCore;
use crate::error::{Result, TTError};
use crate::network::{RoundingSpec, TTNetwork};

/// TT-rounding: re-truncate a train's ranks within a relative error budget.
///
/// Right-to-left orthogonalization sweep followed by a left-to-right
/// truncated-SVD sweep. Each of the d - 1 truncations discards a singular
/// value tail of norm at most `tolerance * ||net||_F / sqrt(d - 1)`, so the
/// accumulated contraction error stays within `tolerance * ||net||_F`.
/// Ranks never increase and the batch dimension is never touched.
pub fn tt_round(net: &TTNetwork, spec: &RoundingSpec) -> Result<TTNetwork> {
    let d = net.depth();
    if d == 1 {
        return Ok(net.clone());
    }

    let mut blocks: Vec<Array4<f64>> = net.cores().iter().map(|c| c.block().clone()).collect();

    // Right-to-left sweep: make cores 1..d right-orthogonal, pushing the
    // weight into core 0 so its Frobenius norm is the train norm.
    for k in (1..d).rev() {
        let (rl, o, i, rr) = blocks[k].dim();
        let mat = reshape(&blocks[k], (rl, o * i * rr)); // r_{k-1} x (o i r_k)
        let (q, r) = mat.t().as_standard_layout().qr()?; // mat^T = Q R
        let rank = q.dim().1; // min(o i r_k, r_{k-1})
        blocks[k] = q
            .t()
            .as_standard_layout()
            .to_shape(((rank, o, i, rr), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        // absorb L = R^T into the left neighbour
        let (pl, po, pi, pr) = blocks[k - 1].dim();
        debug_assert_eq!(pr, rl);
        let left = reshape(&blocks[k - 1], (pl * po * pi, pr));
        let merged = left.dot(&r.t()); // (., rank)
        blocks[k - 1] = merged
            .to_shape(((pl, po, pi, rank), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
    }

    let norm = blocks[0].iter().map(|v| v * v).sum::<f64>().sqrt();
    let local_eps = spec.tolerance * norm / ((d - 1) as f64).sqrt();

    // Left-to-right sweep: truncated SVD at every bond, weight moves right.
    for k in 0..d - 1 {
        let (rl, o, i, rr) = blocks[k].dim();
        let mat = reshape(&blocks[k], (rl * o * i, rr));
        let (u, s, vt) = mat.svddc(JobSvd::Some)?;
        let u = u.ok_or_else(|| TTError::InvalidArgument("svd returned no U".into()))?;
        let vt = vt.ok_or_else(|| TTError::InvalidArgument("svd returned no VT".into()))?;
        let keep = truncation_rank(s.as_slice().unwrap(), local_eps, spec.max_rank);
        blocks[k] = u
            .slice(ndarray::s![.., ..keep])
            .as_standard_layout()
            .to_shape(((rl, o, i, keep), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        // carry  S V^T  into the next core
        let mut sv = vt.slice(ndarray::s![..keep, ..]).to_owned();
        for (j, mut row) in sv.rows_mut().into_iter().enumerate() {
            row *= s[j];
        }
        let (nl, no, ni, nr) = blocks[k + 1].dim();
        debug_assert_eq!(nl, rr);
        let nxt = reshape(&blocks[k + 1], (nl, no * ni * nr));
        blocks[k + 1] = sv
            .dot(&nxt)
            .to_shape(((keep, no, ni, nr), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
    }

    let cores = blocks
        .into_iter()
        .map(TTCore::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(TTNetwork::from_parts_unchecked(cores, net.kind(), net.batch()))
}

/// Number of singular values to keep: the longest discardable tail has
/// l2 norm <= eps. Floored at 1, optionally capped.
fn truncation_rank(s: &[f64], eps: f64, max_rank: usize) -> usize {
    let mut tail = 0.0;
    let mut keep = s.len();
    while keep > 1 {
        let cand = tail + s[keep - 1] * s[keep - 1];
        if cand.sqrt() > eps {
            break;
        }
        tail = cand;
        keep -= 1;
    }
    if max_rank > 0 {
        keep = keep.min(max_rank);
    }
    keep.max(1)
}

fn reshape(block: &Array4<f64>, dims: (usize, usize)) -> Array2<f64> {
    block
        .to_shape((dims, Order::RowMajor))
        .expect("core blocks stay standard layout")
        .into_owned()
}
