//! Tensor-train data structures and primitives.
//!
//! A train is a chain of 4-way cores `(r_left, o, i, r_right)` linked by
//! rank indices; storage is linear in the chain length while the
//! represented tensor is exponential. This crate provides the value types
//! ([`TTCore`], [`TTNetwork`], [`RoundingSpec`]) and the operations every
//! other crate composes: dense contraction, addition by rank concatenation,
//! SVD-based rounding, per-slice norms, core Kronecker products and
//! operator application.
//!
//! Networks are immutable after construction and all operations are pure,
//! so values can be freely shared across threads.

mod apply;
mod arith;
mod builders;
mod contract;
mod core;
mod error;
mod io;
mod kron;
mod network;
mod norm;
mod round;
pub mod testing;

pub use apply::{apply_operator, OperatorSide};
pub use arith::tt_add;
pub use builders::{
    diagonal_operator, identity_operator, rank_one_vector, scaled_identity_covariance,
    vector_zeros,
};
pub use contract::contract_full;
pub use core::TTCore;
pub use error::{Result, TTError};
pub use io::{dump_network, load_network};
pub use kron::core_kron;
pub use network::{RoundingSpec, TTNetwork, TrainKind};
pub use norm::{tt_norm, tt_norm_total};
pub use round::tt_round;
