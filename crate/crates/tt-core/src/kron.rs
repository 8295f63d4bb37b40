use ndarray::Array4;

use crate::core::TTCore;
use crate::error::{Result, TTError};

/// Tensor Kronecker product of two cores, each carrying one active mode.
///
/// The first operand's active mode becomes the output mode of the result,
/// the second's becomes the input mode, and ranks multiply with the first
/// operand's rank index varying slowest:
///
/// `C[(a1, a2), x, y, (b1, b2)] = A[a1, x, b1] * B[a2, y, b2]`
///
/// A core is "vector-mode" when at most one of its o/i modes exceeds size 1;
/// anything else is a mode-role mismatch.
pub fn core_kron(a: &TTCore, b: &TTCore) -> Result<TTCore> {
    let av = active_view(a, 0)?;
    let bv = active_view(b, 0)?;
    let (al, sa, ar) = av.dim();
    let (bl, sb, br) = bv.dim();
    let mut out = Array4::zeros((al * bl, sa, sb, ar * br));
    for a1 in 0..al {
        for a2 in 0..bl {
            for x in 0..sa {
                for y in 0..sb {
                    for b1 in 0..ar {
                        for b2 in 0..br {
                            out[[a1 * bl + a2, x, y, b1 * br + b2]] =
                                av[[a1, x, b1]] * bv[[a2, y, b2]];
                        }
                    }
                }
            }
        }
    }
    TTCore::new(out)
}

/// View of the core's single active mode as (r_left, size, r_right).
fn active_view(core: &TTCore, index: usize) -> Result<ndarray::Array3<f64>> {
    let (rl, o, i, rr) = core.block().dim();
    if o > 1 && i > 1 {
        return Err(TTError::structure(
            index,
            format!("core_kron needs a vector-mode core, got modes ({o}, {i})"),
        ));
    }
    let arr = if i == 1 {
        core.block()
            .to_shape(((rl, o, rr), ndarray::Order::RowMajor))
            .expect("standard layout")
            .into_owned()
    } else {
        core.block()
            .to_shape(((rl, i, rr), ndarray::Order::RowMajor))
            .expect("standard layout")
            .into_owned()
    };
    Ok(arr)
}
