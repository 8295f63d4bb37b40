use ndarray::{Array3, Order};

use crate::error::{Result, TTError};
use crate::network::TTNetwork;

/// Contract a train into the dense `(batch, prod(o), prod(i))` tensor it
/// represents, output modes flattened before input modes, last index fastest.
///
/// This is the oracle/debug path and is only valid at desk scale: the caller
/// supplies an element budget and the call refuses (never truncates) if the
/// result or any sweep intermediate would exceed it.
pub fn contract_full(net: &TTNetwork, budget_elems: usize) -> Result<Array3<f64>> {
    let outs = net.mode_outs();
    let ins = net.mode_ins();
    let total = checked_size(net.batch(), &outs, &ins)?;
    if total > budget_elems {
        return Err(TTError::BudgetExceeded {
            required: total,
            budget: budget_elems,
        });
    }

    let first = net.cores()[0].block();
    let (l, o0, i0, r1) = first.dim();
    // accumulator (l, O, I, r), O/I the mode products so far
    let mut acc = first
        .to_shape(((l, o0, i0, r1), Order::RowMajor))
        .expect("standard layout")
        .into_owned();
    let (mut o_acc, mut i_acc) = (o0, i0);

    for core in &net.cores()[1..] {
        let blk = core.block();
        let (r, o, i, rr) = blk.dim();
        let needed = l
            .checked_mul(o_acc * o)
            .and_then(|v| v.checked_mul(i_acc * i))
            .and_then(|v| v.checked_mul(rr))
            .ok_or(TTError::BudgetExceeded {
                required: usize::MAX,
                budget: budget_elems,
            })?;
        if needed > budget_elems {
            return Err(TTError::BudgetExceeded {
                required: needed,
                budget: budget_elems,
            });
        }

        let lhs = acc
            .to_shape(((l * o_acc * i_acc, r), Order::RowMajor))
            .expect("standard layout");
        let rhs = blk
            .to_shape(((r, o * i * rr), Order::RowMajor))
            .expect("standard layout");
        let prod = lhs.dot(&rhs); // (l*O*I, o*i*rr)

        // (l, O, I, o, i, rr) -> (l, O, o, I, i, rr) -> (l, O*o, I*i, rr)
        let six = prod
            .to_shape(((l, o_acc, i_acc, o, i, rr), Order::RowMajor))
            .expect("row-major reshape");
        let perm = six.view().permuted_axes([0, 1, 3, 2, 4, 5]);
        acc = perm
            .as_standard_layout()
            .to_shape(((l, o_acc * o, i_acc * i, rr), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        o_acc *= o;
        i_acc *= i;
    }

    debug_assert_eq!(acc.dim().3, 1);
    Ok(acc
        .to_shape(((l, o_acc, i_acc), Order::RowMajor))
        .expect("final squeeze")
        .into_owned())
}

fn checked_size(batch: usize, outs: &[usize], ins: &[usize]) -> Result<usize> {
    let mut total = batch;
    for &v in outs.iter().chain(ins) {
        total = total.checked_mul(v).ok_or(TTError::BudgetExceeded {
            required: usize::MAX,
            budget: 0,
        })?;
    }
    Ok(total)
}
