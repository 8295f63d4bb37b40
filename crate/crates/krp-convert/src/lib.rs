//! Conversion of row-wise Kronecker structured matrices into tensor trains.
//!
//! A matrix whose every row is the d-fold Kronecker power of that row of a
//! small factor matrix admits an exact train representation. The structured
//! route here builds it with d - 1 small SVDs (cost linear in d); the
//! generic dense TT-SVD is included as the exponential-cost baseline and
//! cross-check.

mod convert;
mod error;
mod rank;
mod rowwise;
mod ttsvd;

pub use convert::{krp_to_tt, krp_to_tt_multi, RegressorMatrix};
pub use error::{ConvertError, Result};
pub use rank::{numerical_rank, RankPolicy};
pub use rowwise::{rowwise_kron, rowwise_kron_power};
pub use ttsvd::tt_svd_matrix;
