//! The six filter operations on tensor-train state.
//!
//! Prediction applies the transition train to both moments; the update takes
//! the innovation and its covariance densely (they are small by assumption),
//! scales the gain train's first core by the inverted covariance slices, and
//! corrects mean and covariance in train form. Rounding runs after the
//! covariance prediction, the gain construction, the mean update and the
//! covariance update; those are the rank-growth sites.

use std::time::Instant;

use ndarray::{s, Array2, Array3, Array4, ArrayView2, Order};
use ndarray_linalg::{CholeskyFactorized, FactorizeC, SolveC, UPLO};
use tt_core::{
    apply_operator, contract_full, core_kron, tt_add, tt_round, OperatorSide, TTCore, TTNetwork,
    TrainKind,
};

use crate::error::{KalmanError, Result};
use crate::state::{KalmanState, NoiseSpec, Observation, DENSE_GUARD};

/// Where the wall-clock of one step went.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepTimings {
    pub total_seconds: f64,
    pub rounding_seconds: f64,
}

/// Prediction: mean and covariance pushed through the transition train,
/// process noise added, covariance rounded. The step count is unchanged;
/// prediction and update together form one step.
pub fn predict(state: &KalmanState, a_train: &TTNetwork, noise: &NoiseSpec) -> Result<KalmanState> {
    predict_timed(state, a_train, noise).map(|(s, _)| s)
}

fn predict_timed(
    state: &KalmanState,
    a_train: &TTNetwork,
    noise: &NoiseSpec,
) -> Result<(KalmanState, f64)> {
    let mean = apply_operator(a_train, &state.mean, OperatorSide::First)?;
    let mut cov = apply_operator(a_train, &state.cov, OperatorSide::First)?;
    cov = apply_operator(a_train, &cov, OperatorSide::Second)?;
    if !noise.process_is_zero() {
        cov = tt_add(&cov, &noise.process)?;
    }
    let t0 = Instant::now();
    let cov = tt_round(&cov, &state.rounding)?;
    let rounding = t0.elapsed().as_secs_f64();
    Ok((
        KalmanState {
            mean,
            cov,
            rounding: state.rounding,
            step_count: state.step_count,
        },
        rounding,
    ))
}

/// Innovation `V = Y - C M` as a dense `m x l` matrix.
pub fn innovation(state: &KalmanState, obs: &Observation) -> Result<Array2<f64>> {
    let prod = apply_operator(&obs.c_train, &state.mean, OperatorSide::First)?;
    let dense = contract_full(&prod, DENSE_GUARD)?; // (l, 1, m)
    let (l, _, m) = dense.dim();
    if obs.y.dim() != (m, l) {
        return Err(KalmanError::Shape(format!(
            "measurements are {:?}, expected ({m}, {l})",
            obs.y.dim()
        )));
    }
    let mut v = Array2::zeros((m, l));
    for b in 0..l {
        for q in 0..m {
            v[[q, b]] = obs.y[[q, b]] - dense[[b, 0, q]];
        }
    }
    Ok(v)
}

/// Innovation covariance `S = C P C^T + R` as a dense `m x m x l` tensor.
pub fn innovation_cov(
    state: &KalmanState,
    obs: &Observation,
    noise: &NoiseSpec,
) -> Result<Array3<f64>> {
    let gain_raw = apply_operator(&obs.c_train, &state.cov, OperatorSide::Second)?;
    let mut s = contract_obs_gain(&obs.c_train, &gain_raw)?;
    let (m, _, l) = s.dim();
    if noise.measurement.dim() != (m, m, l) {
        return Err(KalmanError::Shape(format!(
            "measurement covariance is {:?}, expected ({m}, {m}, {l})",
            noise.measurement.dim()
        )));
    }
    s += &noise.measurement;
    Ok(s)
}

/// The gain train `K = P C^T` with each batch slice of core 0 scaled by the
/// inverse innovation covariance slice. The gain is rounded before scaling;
/// its tail cores get Kronecker-squared by the covariance downdate, so
/// unrounded product ranks would blow up quadratically there.
pub fn kalman_gain(
    state: &KalmanState,
    obs: &Observation,
    s: &Array3<f64>,
) -> Result<TTNetwork> {
    kalman_gain_timed(state, obs, s).map(|(k, _)| k)
}

fn kalman_gain_timed(
    state: &KalmanState,
    obs: &Observation,
    s: &Array3<f64>,
) -> Result<(TTNetwork, f64)> {
    let gain_raw = apply_operator(&obs.c_train, &state.cov, OperatorSide::Second)?;
    let t0 = Instant::now();
    let gain = tt_round(&gain_raw, &state.rounding)?;
    let rounding = t0.elapsed().as_secs_f64();

    let block = gain.cores()[0].block();
    let (l, n, m, r1) = block.dim();
    let mut scaled = Array4::zeros((l, n, m, r1));
    for b in 0..l {
        let factor = factorize_slice(&s.slice(s![.., .., b]).to_owned(), b)?;
        for x in 0..n {
            for a in 0..r1 {
                let rhs =
                    ndarray::Array1::from_iter((0..m).map(|q| block[[b, x, q, a]]));
                let sol = factor
                    .solvec(&rhs)
                    .map_err(|_| KalmanError::SingularInnovation { slice: b })?;
                for j in 0..m {
                    scaled[[b, x, j, a]] = sol[j];
                }
            }
        }
    }

    let mut cores = vec![TTCore::new(scaled)?];
    cores.extend(gain.cores()[1..].iter().cloned());
    let k = TTNetwork::new(cores, TrainKind::Gain, l)?;
    Ok((k, rounding))
}

/// Mean update `M + K V` in train form, rounded.
pub fn update_mean(state: &KalmanState, k: &TTNetwork, v: &Array2<f64>) -> Result<TTNetwork> {
    update_mean_timed(state, k, v).map(|(m, _)| m)
}

fn update_mean_timed(
    state: &KalmanState,
    k: &TTNetwork,
    v: &Array2<f64>,
) -> Result<(TTNetwork, f64)> {
    let block = k.cores()[0].block();
    let (l, n, m, r1) = block.dim();
    if v.dim() != (m, l) {
        return Err(KalmanError::Shape(format!(
            "innovation is {:?}, expected ({m}, {l})",
            v.dim()
        )));
    }
    // contract the measurement mode of core 0 with the batch's innovation
    let mut c0 = Array4::zeros((l, 1, n, r1));
    for b in 0..l {
        for x in 0..n {
            for a in 0..r1 {
                let mut acc = 0.0;
                for q in 0..m {
                    acc += block[[b, x, q, a]] * v[[q, b]];
                }
                c0[[b, 0, x, a]] = acc;
            }
        }
    }
    let mut cores = vec![TTCore::new(c0)?];
    for core in &k.cores()[1..] {
        // (r, n, 1, r') -> (r, 1, n, r'): move the payload to the vector slot
        let moved = core
            .block()
            .view()
            .permuted_axes([0, 2, 1, 3])
            .as_standard_layout()
            .into_owned();
        cores.push(TTCore::new(moved)?);
    }
    let correction = TTNetwork::new(cores, TrainKind::Vector, l)?;
    let summed = tt_add(&state.mean, &correction)?;
    let t0 = Instant::now();
    let mean = tt_round(&summed, &state.rounding)?;
    Ok((mean, t0.elapsed().as_secs_f64()))
}

/// Covariance downdate `P - K S K^T` in train form, rounded.
///
/// Core 0 is assembled per batch slice from `K_i S_i K_i^T` reshaped to
/// `(n, n, r1^2)`; the tail cores are the Kronecker squares of the gain
/// cores. S slices are symmetrized before use so the downdate is symmetric
/// by construction.
pub fn update_cov(state: &KalmanState, k: &TTNetwork, s: &Array3<f64>) -> Result<TTNetwork> {
    update_cov_timed(state, k, s).map(|(c, _)| c)
}

fn update_cov_timed(
    state: &KalmanState,
    k: &TTNetwork,
    s: &Array3<f64>,
) -> Result<(TTNetwork, f64)> {
    let block = k.cores()[0].block();
    let (l, n, m, r1) = block.dim();
    if s.dim() != (m, m, l) {
        return Err(KalmanError::Shape(format!(
            "innovation covariance is {:?}, expected ({m}, {m}, {l})",
            s.dim()
        )));
    }

    let mut c0 = Array4::zeros((l, n, n, r1 * r1));
    for b in 0..l {
        let sb = s.slice(s![.., .., b]);
        let sym = (&sb + &sb.t()) * 0.5;
        // (x, a) x m unfolding of this batch's gain slice
        let kb = block
            .slice(s![b, .., .., ..])
            .permuted_axes([0, 2, 1])
            .as_standard_layout()
            .to_shape(((n * r1, m), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        let t = kb.dot(&sym).dot(&kb.t()); // ((x, a), (y, a'))
        for x in 0..n {
            for y in 0..n {
                for a in 0..r1 {
                    for a2 in 0..r1 {
                        c0[[b, x, y, a * r1 + a2]] = t[[x * r1 + a, y * r1 + a2]];
                    }
                }
            }
        }
    }

    let mut cores = vec![TTCore::new(c0)?];
    for core in &k.cores()[1..] {
        cores.push(core_kron(core, core)?);
    }
    let downdate = TTNetwork::new(cores, TrainKind::Covariance, l)?;
    let diff = tt_add(&state.cov, &downdate.scaled(-1.0))?;
    let t0 = Instant::now();
    let cov = tt_round(&diff, &state.rounding)?;
    Ok((cov, t0.elapsed().as_secs_f64()))
}

/// One full filter iteration: prediction, then the five update equations in
/// order. Deterministic for fixed inputs.
pub fn step(
    state: &KalmanState,
    a_train: &TTNetwork,
    noise: &NoiseSpec,
    obs: &Observation,
) -> Result<KalmanState> {
    step_timed(state, a_train, noise, obs).map(|(s, _)| s)
}

/// [`step`] plus a breakdown of where the wall-clock went.
pub fn step_timed(
    state: &KalmanState,
    a_train: &TTNetwork,
    noise: &NoiseSpec,
    obs: &Observation,
) -> Result<(KalmanState, StepTimings)> {
    let t0 = Instant::now();
    let (predicted, r_pred) = predict_timed(state, a_train, noise)?;
    let v = innovation(&predicted, obs)?;
    let s = innovation_cov(&predicted, obs, noise)?;
    let (k, r_gain) = kalman_gain_timed(&predicted, obs, &s)?;
    let (mean, r_mean) = update_mean_timed(&predicted, &k, &v)?;
    let (cov, r_cov) = update_cov_timed(&predicted, &k, &s)?;
    let timings = StepTimings {
        total_seconds: t0.elapsed().as_secs_f64(),
        rounding_seconds: r_pred + r_gain + r_mean + r_cov,
    };
    Ok((
        KalmanState {
            mean,
            cov,
            rounding: state.rounding,
            step_count: state.step_count + 1,
        },
        timings,
    ))
}

fn factorize_slice(slice: &Array2<f64>, index: usize) -> Result<CholeskyFactorized<ndarray::OwnedRepr<f64>>> {
    slice
        .factorizec(UPLO::Lower)
        .map_err(|_| KalmanError::SingularInnovation { slice: index })
}

/// Ladder contraction of an observation train against a gain-shaped train:
/// `out[q, j, b] = sum_x C[q, x] G[x, j, b]`, dense because m and l are small.
fn contract_obs_gain(c: &TTNetwork, g: &TTNetwork) -> Result<Array3<f64>> {
    let d = c.depth();
    let c0 = c.cores()[0].block(); // (1, m, n, rc)
    let g0 = g.cores()[0].block(); // (l, n, m, rg)
    let (_, m, n0, rc) = c0.dim();
    let (l, n0g, mg, rg) = g0.dim();
    if n0 != n0g || m != mg {
        return Err(KalmanError::Shape(format!(
            "core 0 modes disagree: operator (m={m}, n={n0}) vs gain (n={n0g}, m={mg})"
        )));
    }

    // acc[b, q, j, (c, g)] with the operator rank varying slowest
    let mut acc = Array4::zeros((l, m, m, rc * rg));
    for b in 0..l {
        let cmat = c0
            .slice(s![0, .., .., ..])
            .permuted_axes([0, 2, 1])
            .as_standard_layout()
            .to_shape(((m * rc, n0), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        let gmat = g0
            .slice(s![b, .., .., ..])
            .to_shape(((n0, m * rg), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        let prod = cmat.dot(&gmat); // ((q, c), (j, g))
        for q in 0..m {
            for cr in 0..rc {
                for j in 0..m {
                    for gr in 0..rg {
                        acc[[b, q, j, cr * rg + gr]] = prod[[q * rc + cr, j * rg + gr]];
                    }
                }
            }
        }
    }

    let mut rank = rc * rg;
    for k in 1..d {
        let cb = c.cores()[k].block(); // (rc, 1, n, rc')
        let gb = g.cores()[k].block(); // (rg, n, 1, rg')
        let (rc_l, _, n, rc_r) = cb.dim();
        let (rg_l, ng, _, rg_r) = gb.dim();
        if n != ng {
            return Err(KalmanError::Shape(format!(
                "core {k} mode sizes disagree: {n} vs {ng}"
            )));
        }
        let mut trans = Array2::zeros((rc_l * rg_l, rc_r * rg_r));
        for x in 0..n {
            let cs = cb.slice(s![.., 0, x, ..]);
            let gs = gb.slice(s![.., x, 0, ..]);
            kron_accumulate(&mut trans, &cs, &gs);
        }
        let flat = acc
            .to_shape(((l * m * m, rank), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
        rank = rc_r * rg_r;
        acc = flat
            .dot(&trans)
            .to_shape(((l, m, m, rank), Order::RowMajor))
            .expect("row-major reshape")
            .into_owned();
    }
    debug_assert_eq!(rank, 1);

    let mut out = Array3::zeros((m, m, l));
    for b in 0..l {
        for q in 0..m {
            for j in 0..m {
                out[[q, j, b]] = acc[[b, q, j, 0]];
            }
        }
    }
    Ok(out)
}

/// `out += a (x) b` with the first factor's indices varying slowest.
fn kron_accumulate(out: &mut Array2<f64>, a: &ArrayView2<f64>, b: &ArrayView2<f64>) {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    debug_assert_eq!(out.dim(), (ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let av = a[[i, j]];
            if av == 0.0 {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] += av * b[[p, q]];
                }
            }
        }
    }
}
