use ndarray::{Array2, Array4, Order};

use crate::error::{Result, TTError};

/// One 4-way block of a tensor train.
///
/// The block axes are `(r_left, o, i, r_right)`: left rank, output mode,
/// input mode, right rank. A missing mode is carried as size 1, so vector
/// trains, operator trains and gain trains all share this one type.
#[derive(Clone, Debug, PartialEq)]
pub struct TTCore {
    block: Array4<f64>,
}

impl TTCore {
    /// Wrap a 4-way block. All four dimensions must be at least 1.
    pub fn new(block: Array4<f64>) -> Result<Self> {
        let (rl, o, i, rr) = block.dim();
        if rl == 0 || o == 0 || i == 0 || rr == 0 {
            return Err(TTError::structure(
                0,
                format!("core dimensions must all be >= 1, got ({rl}, {o}, {i}, {rr})"),
            ));
        }
        Ok(TTCore {
            block: to_standard(block),
        })
    }

    pub fn r_left(&self) -> usize {
        self.block.dim().0
    }

    pub fn mode_out(&self) -> usize {
        self.block.dim().1
    }

    pub fn mode_in(&self) -> usize {
        self.block.dim().2
    }

    pub fn r_right(&self) -> usize {
        self.block.dim().3
    }

    pub fn block(&self) -> &Array4<f64> {
        &self.block
    }

    pub fn into_block(self) -> Array4<f64> {
        self.block
    }

    pub fn is_finite(&self) -> bool {
        self.block.iter().all(|v| v.is_finite())
    }

    /// Unfolding `r_left x (o * i * r_right)`, row-major.
    pub fn right_unfold(&self) -> Array2<f64> {
        let (rl, o, i, rr) = self.block.dim();
        self.block
            .to_shape(((rl, o * i * rr), Order::RowMajor))
            .expect("core blocks are kept in standard layout")
            .into_owned()
    }

    /// Unfolding `(r_left * o * i) x r_right`, row-major.
    pub fn left_unfold(&self) -> Array2<f64> {
        let (rl, o, i, rr) = self.block.dim();
        self.block
            .to_shape(((rl * o * i, rr), Order::RowMajor))
            .expect("core blocks are kept in standard layout")
            .into_owned()
    }
}

/// Owned copy in standard (row-major) layout; a no-op for already-standard data.
pub(crate) fn to_standard(a: Array4<f64>) -> Array4<f64> {
    if a.is_standard_layout() {
        a
    } else {
        a.as_standard_layout().into_owned()
    }
}
