use ndarray::{Array2, Order};

use crate::core::TTCore;
use crate::error::{Result, TTError};
use crate::network::{TTNetwork, TrainKind};

/// Which mode of the operand an operator train contracts against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSide {
    /// Mode 1: a vector train's payload, or the row modes of a covariance.
    First,
    /// Mode 2: the column modes of a covariance train.
    Second,
}

/// Apply an operator train core-by-core to the addressed mode of `x`.
///
/// Resulting ranks are the products of the operand ranks, packed with the
/// operand `x`'s rank index varying slowest, so the batch count stays on
/// core 0's left rank. Contraction order is strictly left-to-right, which
/// keeps ranks and timings deterministic.
///
/// Supported combinations:
/// - vector train, `First`: the classic mode-1 product; the operator's
///   output sizes become the new payload sizes.
/// - covariance train, `First` with a square operator (`A P` per slice).
/// - covariance train, `Second`: square operators give `P A^T` per slice;
///   a "wide" operator with its output size on core 0 only (such as a
///   regressor train) turns the covariance into a gain train.
pub fn apply_operator(op: &TTNetwork, x: &TTNetwork, side: OperatorSide) -> Result<TTNetwork> {
    if op.kind() != TrainKind::Matrix {
        return Err(TTError::structure(0, "operator must be a matrix train"));
    }
    if op.depth() != x.depth() {
        return Err(TTError::shape(
            0,
            format!("operator has {} cores, operand {}", op.depth(), x.depth()),
        ));
    }
    let square = op
        .cores()
        .iter()
        .all(|c| c.mode_out() == c.mode_in());
    let result_kind = match (x.kind(), side, square) {
        (TrainKind::Vector, OperatorSide::First, _) => TrainKind::Vector,
        (TrainKind::Covariance, OperatorSide::First, true) => TrainKind::Covariance,
        (TrainKind::Covariance, OperatorSide::Second, true) => TrainKind::Covariance,
        (TrainKind::Covariance, OperatorSide::Second, false) => TrainKind::Gain,
        (kind, side, _) => {
            return Err(TTError::structure(
                0,
                format!("unsupported operator application: {kind:?} on {side:?} side"),
            ))
        }
    };

    let mut cores = Vec::with_capacity(x.depth());
    for k in 0..x.depth() {
        let xb = x.cores()[k].block();
        let wb = op.cores()[k].block();
        let (r, xo, xi, rn) = xb.dim();
        let (p, oo, oi, pn) = wb.dim();

        let contract_input_slot = !(x.kind() == TrainKind::Covariance && side == OperatorSide::First);
        let addressed = if contract_input_slot { xi } else { xo };
        if oi != addressed {
            return Err(TTError::shape(
                k,
                format!("operator input mode {oi} does not match operand mode {addressed}"),
            ));
        }

        // x permuted so the contracted index is last, operator so it is first
        let kept = if contract_input_slot { xo } else { xi };
        let x_mat: Array2<f64> = if contract_input_slot {
            xb.view()
                .permuted_axes([0, 1, 3, 2])
                .as_standard_layout()
                .to_shape(((r * xo * rn, xi), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned()
        } else {
            xb.view()
                .permuted_axes([0, 2, 3, 1])
                .as_standard_layout()
                .to_shape(((r * xi * rn, xo), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned()
        };
        let w_mat: Array2<f64> = wb
            .view()
            .permuted_axes([2, 0, 1, 3])
            .as_standard_layout()
            .to_shape(((oi, p * oo * pn), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();

        let prod = x_mat.dot(&w_mat); // (r * kept * rn, p * oo * pn)
        let six = prod
            .to_shape(((r, kept, rn, p, oo, pn), Order::RowMajor))
            .expect("row-major reshape");
        // pack ranks (x major, op minor); the operator output takes the
        // contracted slot
        let block = if contract_input_slot {
            six.view()
                .permuted_axes([0, 3, 1, 4, 2, 5]) // (r, p, xo, oo, rn, pn)
                .as_standard_layout()
                .to_shape(((r * p, kept, oo, rn * pn), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned()
        } else {
            six.view()
                .permuted_axes([0, 3, 4, 1, 2, 5]) // (r, p, oo, xi, rn, pn)
                .as_standard_layout()
                .to_shape(((r * p, oo, kept, rn * pn), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned()
        };
        cores.push(TTCore::new(block)?);
    }

    TTNetwork::new(cores, result_kind, x.batch())
}
