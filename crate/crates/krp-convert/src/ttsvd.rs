use ndarray::{Array2, Order};
use ndarray_linalg::{JobSvd, SVDDC};
use tt_core::{TTCore, TTNetwork, TrainKind};

use crate::error::{ConvertError, Result};
use crate::rank::{numerical_rank, RankPolicy};

/// Generic dense-matrix TT-SVD: reshape `c` to `(m n) x n^(d-1)`, take the
/// SVD, then keep reshaping and factoring the `S V^T` part until all d cores
/// are split off. Core shapes match [`crate::krp_to_tt`] so the two routes
/// are directly comparable.
///
/// The whole matrix lives in memory and the first SVD touches all of it, so
/// this is the exponential-cost baseline; `budget_elems` bounds the accepted
/// dense size and the call refuses beyond it.
pub fn tt_svd_matrix(
    c: &Array2<f64>,
    n: usize,
    d: usize,
    policy: &RankPolicy,
    budget_elems: usize,
) -> Result<TTNetwork> {
    policy.validate()?;
    if d < 1 {
        return Err(ConvertError::InvalidArgument(format!(
            "mode count must be >= 1, got {d}"
        )));
    }
    if n < 1 {
        return Err(ConvertError::InvalidArgument(format!(
            "mode size must be >= 1, got {n}"
        )));
    }
    let m = c.nrows();
    let expected_cols = n
        .checked_pow(d as u32)
        .ok_or_else(|| ConvertError::InvalidArgument("n^d overflows".into()))?;
    if c.ncols() != expected_cols {
        return Err(ConvertError::InvalidArgument(format!(
            "matrix has {} columns, expected n^d = {expected_cols}",
            c.ncols()
        )));
    }
    if c.len() > budget_elems {
        return Err(ConvertError::BudgetExceeded {
            required: c.len(),
            budget: budget_elems,
        });
    }

    if d == 1 {
        let core = TTCore::new(
            c.to_shape(((1, m, n, 1), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned(),
        )?;
        return Ok(TTNetwork::new(vec![core], TrainKind::Matrix, 1)?);
    }

    let mut cores: Vec<TTCore> = Vec::with_capacity(d);

    // first split carries the m rows into core 0
    let t = c
        .to_shape(((m * n, expected_cols / n), Order::RowMajor))
        .expect("row-major reshape")
        .into_owned();
    let (mut carry, mut rank) = split_core(&t, policy, |u, r| {
        TTCore::new(
            u.to_shape(((1, m, n, r), Order::RowMajor))
                .expect("row-major reshape")
                .into_owned(),
        )
    })
    .map(|(core, sv, r)| {
        cores.push(core);
        (sv, r)
    })?;

    // interior splits
    for k in 1..d - 1 {
        let cols = carry.ncols() / n;
        debug_assert_eq!(cols, n.pow((d - 1 - k) as u32));
        let t = carry
            .to_shape(((rank * n, cols), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        let rl = rank;
        let (next_carry, next_rank) = split_core(&t, policy, |u, r| {
            TTCore::new(
                u.to_shape(((rl, 1, n, r), Order::RowMajor))
                    .expect("row-major reshape")
                    .into_owned(),
            )
        })
        .map(|(core, sv, r)| {
            cores.push(core);
            (sv, r)
        })?;
        carry = next_carry;
        rank = next_rank;
    }

    // the remaining carry is the last core
    cores.push(TTCore::new(
        carry
            .to_shape(((rank, 1, n, 1), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned(),
    )?);

    Ok(TTNetwork::new(cores, TrainKind::Matrix, 1)?)
}

/// Thin SVD of `t`; `make_core` wraps the truncated U, the scaled `S V^T`
/// becomes the next iterate.
fn split_core<F>(
    t: &Array2<f64>,
    policy: &RankPolicy,
    make_core: F,
) -> Result<(TTCore, Array2<f64>, usize)>
where
    F: FnOnce(Array2<f64>, usize) -> tt_core::Result<TTCore>,
{
    let (u, s, vt) = t.svddc(JobSvd::Some)?;
    let u = u.expect("JobSvd::Some returns U");
    let vt = vt.expect("JobSvd::Some returns VT");
    let rank = numerical_rank(s.as_slice().unwrap(), policy, t.dim())?;
    let core = make_core(
        u.slice(ndarray::s![.., ..rank])
            .as_standard_layout()
            .into_owned(),
        rank,
    )?;
    let mut sv = vt.slice(ndarray::s![..rank, ..]).to_owned();
    for (j, mut row) in sv.rows_mut().into_iter().enumerate() {
        row *= s[j];
    }
    Ok((core, sv, rank))
}
