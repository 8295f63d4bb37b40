use ndarray::Array4;

use crate::core::TTCore;
use crate::error::{Result, TTError};
use crate::network::TTNetwork;

/// Tensor-train addition by rank concatenation.
///
/// Interior ranks add; the shared boundary slices (batch on the left, the
/// closing rank 1 on the right) are not duplicated. No implicit rounding:
/// callers decide when to pay for [`crate::tt_round`].
pub fn tt_add(a: &TTNetwork, b: &TTNetwork) -> Result<TTNetwork> {
    if a.kind() != b.kind() {
        return Err(TTError::shape(0, format!("kind {:?} vs {:?}", a.kind(), b.kind())));
    }
    if a.batch() != b.batch() {
        return Err(TTError::shape(
            0,
            format!("batch {} vs {}", a.batch(), b.batch()),
        ));
    }
    if a.depth() != b.depth() {
        return Err(TTError::shape(
            0,
            format!("core count {} vs {}", a.depth(), b.depth()),
        ));
    }
    let d = a.depth();
    for k in 0..d {
        let (ca, cb) = (&a.cores()[k], &b.cores()[k]);
        if ca.mode_out() != cb.mode_out() || ca.mode_in() != cb.mode_in() {
            return Err(TTError::shape(
                k,
                format!(
                    "mode sizes ({}, {}) vs ({}, {})",
                    ca.mode_out(),
                    ca.mode_in(),
                    cb.mode_out(),
                    cb.mode_in()
                ),
            ));
        }
    }

    if d == 1 {
        let sum = a.cores()[0].block() + b.cores()[0].block();
        let core = TTCore::new(sum)?;
        return Ok(TTNetwork::from_parts_unchecked(vec![core], a.kind(), a.batch()));
    }

    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let (ca, cb) = (a.cores()[k].block(), b.cores()[k].block());
        let (rl_a, o, i, rr_a) = ca.dim();
        let (rl_b, _, _, rr_b) = cb.dim();
        let block = if k == 0 {
            // shared left boundary: concatenate along the right rank
            let mut blk = Array4::zeros((rl_a, o, i, rr_a + rr_b));
            blk.slice_mut(ndarray::s![.., .., .., ..rr_a]).assign(ca);
            blk.slice_mut(ndarray::s![.., .., .., rr_a..]).assign(cb);
            blk
        } else if k == d - 1 {
            // shared right boundary: concatenate along the left rank
            let mut blk = Array4::zeros((rl_a + rl_b, o, i, rr_a));
            blk.slice_mut(ndarray::s![..rl_a, .., .., ..]).assign(ca);
            blk.slice_mut(ndarray::s![rl_a.., .., .., ..]).assign(cb);
            blk
        } else {
            // block-diagonal placement
            let mut blk = Array4::zeros((rl_a + rl_b, o, i, rr_a + rr_b));
            blk.slice_mut(ndarray::s![..rl_a, .., .., ..rr_a]).assign(ca);
            blk.slice_mut(ndarray::s![rl_a.., .., .., rr_a..]).assign(cb);
            blk
        };
        cores.push(TTCore::new(block)?);
    }
    Ok(TTNetwork::from_parts_unchecked(cores, a.kind(), a.batch()))
}
