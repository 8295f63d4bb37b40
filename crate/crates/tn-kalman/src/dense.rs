//! Textbook dense Kalman filter with matrix output, per batch column.
//! Correctness oracle for the train-based filter; desk scale only.

use ndarray::{s, Array1, Array2, Array3};
use ndarray_linalg::{FactorizeC, SolveC, UPLO};

use crate::error::{KalmanError, Result};

/// Dense means `(N, l)` and covariances `(N, N, l)`.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub means: Array2<f64>,
    pub covs: Array3<f64>,
}

impl DenseState {
    pub fn init(n: usize, l: usize, prior_var: f64) -> Self {
        let means = Array2::zeros((n, l));
        let mut covs = Array3::zeros((n, n, l));
        for b in 0..l {
            for j in 0..n {
                covs[[j, j, b]] = prior_var;
            }
        }
        DenseState { means, covs }
    }
}

/// One standard predict/update with matrix output of size m:
/// per batch column, `P+ = A P A^T + W`, `S = C P+ C^T + R`,
/// `K = P+ C^T S^-1`, `m' = A m + K (y - C A m)`, `P' = P+ - K S K^T`.
#[allow(clippy::too_many_arguments)]
pub fn dense_step(
    state: &DenseState,
    a: &Array2<f64>,
    w: &Array3<f64>,
    c: &Array2<f64>,
    y: &Array2<f64>,
    r: &Array3<f64>,
    budget: usize,
) -> Result<DenseState> {
    let (n, l) = state.means.dim();
    if n > budget {
        return Err(KalmanError::BudgetExceeded {
            required: n,
            budget,
        });
    }
    let m = c.nrows();
    if c.ncols() != n {
        return Err(KalmanError::Shape(format!(
            "observation matrix has {} columns, state is {n}",
            c.ncols()
        )));
    }
    if y.dim() != (m, l) || r.dim() != (m, m, l) || w.dim() != (n, n, l) {
        return Err(KalmanError::Shape("noise/measurement dims".into()));
    }

    let mut means = Array2::zeros((n, l));
    let mut covs = Array3::zeros((n, n, l));
    for b in 0..l {
        let mean_prior = a.dot(&state.means.column(b));
        let p = state.covs.slice(s![.., .., b]);
        let p_prior = a.dot(&p).dot(&a.t()) + &w.slice(s![.., .., b]);

        let v: Array1<f64> = &y.column(b) - &c.dot(&mean_prior);
        let s_mat = c.dot(&p_prior).dot(&c.t()) + &r.slice(s![.., .., b]);
        let factor = s_mat
            .factorizec(UPLO::Lower)
            .map_err(|_| KalmanError::SingularInnovation { slice: b })?;

        // K = P+ C^T S^-1 via  S K^T = C P+
        let cp = c.dot(&p_prior); // (m, n)
        let mut k = Array2::zeros((n, m));
        for col in 0..n {
            let rhs = cp.column(col).to_owned();
            let sol = factor
                .solvec(&rhs)
                .map_err(|_| KalmanError::SingularInnovation { slice: b })?;
            k.row_mut(col).assign(&sol);
        }

        let mean_post = &mean_prior + &k.dot(&v);
        let p_post = &p_prior - &k.dot(&s_mat).dot(&k.t());
        means.column_mut(b).assign(&mean_post);
        covs.slice_mut(s![.., .., b]).assign(&p_post);
    }
    Ok(DenseState { means, covs })
}
