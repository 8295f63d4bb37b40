use ndarray::{Array2, Order};
use ndarray_linalg::{JobSvd, SVDDC};
use tt_core::{TTCore, TTNetwork, TrainKind};

use crate::error::{ConvertError, Result};
use crate::rank::{numerical_rank, RankPolicy};
use crate::rowwise::rowwise_kron;

/// An `m x n` block of stacked regressor rows; the repeated factor of the
/// structured output-model matrix.
#[derive(Clone, Debug)]
pub struct RegressorMatrix {
    data: Array2<f64>,
}

impl RegressorMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(ConvertError::InvalidArgument(format!(
                "regressor matrix must be at least 1 x 1, got {} x {}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ConvertError::InvalidArgument(
                "regressor matrix has non-finite entries".into(),
            ));
        }
        Ok(RegressorMatrix { data })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }
}

/// Convert the d-fold row-wise Kronecker power of `u` into an exact train.
///
/// The result has d cores: core 0 of shape `(1, m, n, r_1)` carrying the row
/// index, and cores k >= 1 of shape `(r_k, 1, n, r_{k+1})`. Built backwards
/// from the last core: each step forms one row-wise Kronecker product with
/// the factor, reshapes, and splits off a core from the `S V^T` part of a
/// thin SVD while the left singular vectors become the next iterate. Cost is
/// linear in d; with [`RankPolicy::MachineEps`] the contraction reproduces
/// the Kronecker power to machine precision.
pub fn krp_to_tt(u: &RegressorMatrix, d: usize, policy: &RankPolicy) -> Result<TTNetwork> {
    if d < 1 {
        return Err(ConvertError::InvalidArgument(format!(
            "Kronecker power must be >= 1, got {d}"
        )));
    }
    let factors: Vec<&RegressorMatrix> = std::iter::repeat(u).take(d).collect();
    krp_to_tt_multi(&factors, policy)
}

/// General form with one distinct factor per core position:
/// `factors[0] (.) factors[1] (.) ... (.) factors[d-1]`.
pub fn krp_to_tt_multi(factors: &[&RegressorMatrix], policy: &RankPolicy) -> Result<TTNetwork> {
    policy.validate()?;
    if factors.is_empty() {
        return Err(ConvertError::InvalidArgument(
            "at least one factor is required".into(),
        ));
    }
    let m = factors[0].rows();
    for (k, f) in factors.iter().enumerate() {
        if f.rows() != m {
            return Err(ConvertError::InvalidArgument(format!(
                "factor {k} has {} rows, expected {m}",
                f.rows()
            )));
        }
    }

    let d = factors.len();
    let mut cores: Vec<Option<TTCore>> = vec![None; d];

    // current iterate: (m, n_k * r) payload of the core being split next
    let mut carry = factors[d - 1].data().clone();
    let mut r_right = 1usize;

    for k in (1..d).rev() {
        let n_k = factors[k].cols();
        let t = rowwise_kron(factors[k - 1].data(), &carry)?;
        let n_prev = factors[k - 1].cols();
        // (m, n_prev * n_k * r) -> (m * n_prev, n_k * r): row-major reinterpretation
        let t2 = t
            .to_shape(((m * n_prev, n_k * r_right), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        let (u_mat, s, vt) = t2.svddc(JobSvd::Some)?;
        let u_mat = u_mat.expect("JobSvd::Some returns U");
        let vt = vt.expect("JobSvd::Some returns VT");
        let rank = numerical_rank(s.as_slice().unwrap(), policy, t2.dim())?;

        let mut sv = vt.slice(ndarray::s![..rank, ..]).to_owned();
        for (j, mut row) in sv.rows_mut().into_iter().enumerate() {
            row *= s[j];
        }
        cores[k] = Some(TTCore::new(
            sv.to_shape(((rank, 1, n_k, r_right), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned(),
        )?);

        carry = u_mat
            .slice(ndarray::s![.., ..rank])
            .as_standard_layout()
            .to_shape(((m, n_prev * rank), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        r_right = rank;
    }

    let n_0 = factors[0].cols();
    cores[0] = Some(TTCore::new(
        carry
            .to_shape(((1, m, n_0, r_right), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned(),
    )?);

    let cores: Vec<TTCore> = cores.into_iter().map(|c| c.expect("all cores set")).collect();
    Ok(TTNetwork::new(cores, TrainKind::Matrix, 1)?)
}
