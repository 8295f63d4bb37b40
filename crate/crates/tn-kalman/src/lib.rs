//! Matrix-output Kalman filtering on tensor-train state.
//!
//! The state mean is an `n^d x l` vector train and the covariance an
//! `n^d x n^d x l` covariance train; the observation operator arrives as a
//! matrix train with the output block size m on its first core. Innovations
//! and their covariances are materialized densely (m and l are small by
//! assumption), everything state-sized stays in train form. A dense
//! reference filter is included as the correctness oracle.

mod checkpoint;
mod dense;
mod error;
mod filter;
mod state;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use dense::{dense_step, DenseState};
pub use error::{KalmanError, Result};
pub use filter::{
    innovation, innovation_cov, kalman_gain, predict, step, step_timed, update_cov, update_mean,
    StepTimings,
};
pub use state::{KalmanState, NoiseSpec, Observation};
