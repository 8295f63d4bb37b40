use ndarray::{Array2, Array3};
use tt_core::{scaled_identity_covariance, vector_zeros, RoundingSpec, TTNetwork, TrainKind};

use crate::error::{KalmanError, Result};

/// Guard on dense measurement-side allocations; the filter assumes the
/// output block and batch stay far smaller than the state.
pub(crate) const DENSE_GUARD: usize = 1 << 26;

/// Mean and covariance trains of one filter instance, plus its rounding
/// control. Exclusively owned by one filter loop; stepping produces a new
/// value.
#[derive(Clone, Debug)]
pub struct KalmanState {
    pub mean: TTNetwork,
    pub cov: TTNetwork,
    pub rounding: RoundingSpec,
    pub step_count: u64,
}

impl KalmanState {
    pub fn new(mean: TTNetwork, cov: TTNetwork, rounding: RoundingSpec) -> Result<Self> {
        if mean.kind() != TrainKind::Vector {
            return Err(KalmanError::Shape("mean must be a vector train".into()));
        }
        if cov.kind() != TrainKind::Covariance {
            return Err(KalmanError::Shape("cov must be a covariance train".into()));
        }
        if mean.depth() != cov.depth() {
            return Err(KalmanError::Shape(format!(
                "mean has {} cores, cov {}",
                mean.depth(),
                cov.depth()
            )));
        }
        if mean.batch() != cov.batch() {
            return Err(KalmanError::Shape(format!(
                "mean batch {} != cov batch {}",
                mean.batch(),
                cov.batch()
            )));
        }
        if mean.mode_ins() != cov.mode_outs() {
            return Err(KalmanError::Shape(
                "mean payload sizes do not match covariance mode sizes".into(),
            ));
        }
        Ok(KalmanState {
            mean,
            cov,
            rounding,
            step_count: 0,
        })
    }

    /// All-zero mean and `prior_var * I` covariance, both rank 1.
    pub fn init(
        mode_sizes: &[usize],
        batch: usize,
        prior_var: f64,
        rounding: RoundingSpec,
    ) -> Result<Self> {
        if !(prior_var >= 0.0) {
            return Err(KalmanError::InvalidArgument(format!(
                "prior variance must be >= 0, got {prior_var}"
            )));
        }
        let mean = vector_zeros(mode_sizes, batch);
        let cov = scaled_identity_covariance(mode_sizes, batch, &vec![prior_var; batch])?;
        Self::new(mean, cov, rounding)
    }
}

/// Process and measurement noise. The process covariance W is carried as a
/// covariance train (rank 1 for the usual constant diagonal); the
/// measurement covariance R is dense `m x m x l` with diagonal slices.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    pub process: TTNetwork,
    pub measurement: Array3<f64>,
}

impl NoiseSpec {
    pub fn new(process: TTNetwork, measurement: Array3<f64>) -> Result<Self> {
        if process.kind() != TrainKind::Covariance {
            return Err(KalmanError::Shape(
                "process noise must be a covariance train".into(),
            ));
        }
        let (m, m2, _) = measurement.dim();
        if m != m2 {
            return Err(KalmanError::Shape(format!(
                "measurement covariance slices must be square, got {m} x {m2}"
            )));
        }
        for ((q, j, b), &v) in measurement.indexed_iter() {
            if q == j {
                if !(v >= 0.0) {
                    return Err(KalmanError::InvalidArgument(format!(
                        "measurement variance ({q}, {q}, {b}) must be >= 0, got {v}"
                    )));
                }
            } else if v != 0.0 {
                return Err(KalmanError::InvalidArgument(format!(
                    "measurement covariance must be diagonal, entry ({q}, {j}, {b}) = {v}"
                )));
            }
        }
        Ok(NoiseSpec {
            process,
            measurement,
        })
    }

    /// Constant-diagonal W per batch plus scalar measurement variance.
    pub fn diagonal(
        mode_sizes: &[usize],
        batch: usize,
        process_var: f64,
        m: usize,
        meas_var: f64,
    ) -> Result<Self> {
        let process = scaled_identity_covariance(mode_sizes, batch, &vec![process_var; batch])?;
        let mut measurement = Array3::zeros((m, m, batch));
        for b in 0..batch {
            for q in 0..m {
                measurement[[q, q, b]] = meas_var;
            }
        }
        Self::new(process, measurement)
    }

    pub(crate) fn process_is_zero(&self) -> bool {
        self.process
            .cores()
            .iter()
            .all(|c| c.block().iter().all(|&v| v == 0.0))
    }
}

/// One measurement block: the regressor train `C(t)` and the dense
/// `m x l` measurements it explains.
#[derive(Clone, Debug)]
pub struct Observation {
    pub c_train: TTNetwork,
    pub y: Array2<f64>,
}

impl Observation {
    pub fn new(c_train: TTNetwork, y: Array2<f64>) -> Result<Self> {
        if c_train.kind() != TrainKind::Matrix {
            return Err(KalmanError::Shape(
                "observation operator must be a matrix train".into(),
            ));
        }
        let m = y.nrows();
        if c_train.cores()[0].mode_out() != m {
            return Err(KalmanError::Shape(format!(
                "operator core 0 output mode {} does not match {} measurement rows",
                c_train.cores()[0].mode_out(),
                m
            )));
        }
        for (k, core) in c_train.cores().iter().enumerate().skip(1) {
            if core.mode_out() != 1 {
                return Err(KalmanError::Shape(format!(
                    "operator carries output modes beyond core 0 (core {k} has o-mode {})",
                    core.mode_out()
                )));
            }
        }
        // m, l << n^d working assumption, kept honest as a memory guard
        let guard = m
            .checked_mul(y.ncols())
            .and_then(|v| v.checked_mul(c_train.max_rank()))
            .unwrap_or(usize::MAX);
        if guard > DENSE_GUARD {
            return Err(KalmanError::BudgetExceeded {
                required: guard,
                budget: DENSE_GUARD,
            });
        }
        Ok(Observation { c_train, y })
    }
}
