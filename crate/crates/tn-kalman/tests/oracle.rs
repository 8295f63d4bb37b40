//! Filter operations checked against the dense reference filter, op by op
//! and in a 20-step lockstep run.

use krp_convert::{krp_to_tt, RankPolicy, RegressorMatrix};
use ndarray::{s, Array1, Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tn_kalman::{
    dense_step, innovation, innovation_cov, kalman_gain, predict, step, update_cov, update_mean,
    DenseState, KalmanError, KalmanState, NoiseSpec, Observation,
};
use tt_core::{
    contract_full, rank_one_vector, scaled_identity_covariance, tt_norm, vector_zeros,
    RoundingSpec, TTCore, TTNetwork, TrainKind,
};

const BUDGET: usize = 1 << 24;

fn rng_with(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal))
}

/// Dense `(N, l)` mean from a vector train.
fn dense_mean(net: &TTNetwork) -> Array2<f64> {
    let full = contract_full(net, BUDGET).unwrap(); // (l, 1, N)
    let (l, _, n) = full.dim();
    let mut out = Array2::zeros((n, l));
    for b in 0..l {
        for j in 0..n {
            out[[j, b]] = full[[b, 0, j]];
        }
    }
    out
}

/// Dense `(N, N, l)` covariance from a covariance train.
fn dense_cov(net: &TTNetwork) -> Array3<f64> {
    let full = contract_full(net, BUDGET).unwrap(); // (l, N, N)
    let (l, n, _) = full.dim();
    let mut out = Array3::zeros((n, n, l));
    for b in 0..l {
        for o in 0..n {
            for i in 0..n {
                out[[o, i, b]] = full[[b, o, i]];
            }
        }
    }
    out
}

/// Dense `(rows, cols)` operator from a matrix train.
fn dense_operator(net: &TTNetwork) -> Array2<f64> {
    let full = contract_full(net, BUDGET).unwrap(); // (1, rows, cols)
    let (_, rows, cols) = full.dim();
    full.into_shape_with_order((rows, cols)).unwrap()
}

/// Dense `(N, m, l)` gain from a gain train.
fn dense_gain(net: &TTNetwork) -> Array3<f64> {
    let full = contract_full(net, BUDGET).unwrap(); // (l, N, m)
    let (l, n, m) = full.dim();
    let mut out = Array3::zeros((n, m, l));
    for b in 0..l {
        for j in 0..n {
            for q in 0..m {
                out[[j, q, b]] = full[[b, j, q]];
            }
        }
    }
    out
}

fn rel2(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let num = (a - b).iter().map(|v| v * v).sum::<f64>().sqrt();
    let den = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn rel3(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
    let num = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Random operator train scaled to keep 20-step products bounded.
fn random_transition(n: usize, d: usize, rng: &mut ChaCha8Rng) -> TTNetwork {
    let cores = (0..d)
        .map(|k| {
            let (rl, rr) = if d == 1 {
                (1, 1)
            } else if k == 0 {
                (1, 2)
            } else if k == d - 1 {
                (2, 1)
            } else {
                (2, 2)
            };
            let block = ndarray::Array4::from_shape_fn((rl, n, n, rr), |_| {
                0.4 * rng.sample::<f64, _>(StandardNormal)
            });
            TTCore::new(block).unwrap()
        })
        .collect();
    TTNetwork::new(cores, TrainKind::Matrix, 1).unwrap()
}

fn observation_from(u: Array2<f64>, d: usize, y: Array2<f64>) -> Observation {
    let c_train = krp_to_tt(
        &RegressorMatrix::new(u).unwrap(),
        d,
        &RankPolicy::MachineEps,
    )
    .unwrap();
    Observation::new(c_train, y).unwrap()
}

fn zero_gain(n: usize, d: usize, l: usize, m: usize) -> TTNetwork {
    let mut cores = vec![TTCore::new(ndarray::Array4::zeros((l, n, m, 1))).unwrap()];
    for _ in 1..d {
        cores.push(TTCore::new(ndarray::Array4::zeros((1, n, 1, 1))).unwrap());
    }
    TTNetwork::new(cores, TrainKind::Gain, l).unwrap()
}

#[test]
fn predict_identity_transition_keeps_state() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(60);
    let mut state = KalmanState::init(&[2, 2], 2, 1.0, spec).unwrap();
    let slice: Vec<Array1<f64>> = (0..2)
        .map(|_| Array1::from_iter((0..2).map(|_| rng.sample::<f64, _>(StandardNormal))))
        .collect();
    state.mean = rank_one_vector(&[slice.clone(), slice]).unwrap();
    let a = tt_core::identity_operator(&[2, 2]);
    let noise = NoiseSpec::diagonal(&[2, 2], 2, 0.0, 1, 0.0).unwrap();
    let next = predict(&state, &a, &noise).unwrap();
    assert!(rel2(&dense_mean(&next.mean), &dense_mean(&state.mean)) < 1e-13);
    assert!(rel3(&dense_cov(&next.cov), &dense_cov(&state.cov)) < 1e-13);
    assert_eq!(next.step_count, state.step_count);
}

#[test]
fn predict_adds_process_noise_on_the_diagonal() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let state = KalmanState::init(&[2, 2], 1, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[2, 2]);
    let noise = NoiseSpec::diagonal(&[2, 2], 1, 0.25, 1, 0.0).unwrap();
    let next = predict(&state, &a, &noise).unwrap();
    let cov = dense_cov(&next.cov);
    for o in 0..4 {
        for i in 0..4 {
            let want = if o == i { 1.25 } else { 0.0 };
            assert!((cov[[o, i, 0]] - want).abs() < 1e-13);
        }
    }
}

#[test]
fn predict_matches_dense_oracle() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(61);
    let (n, d, l) = (2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    state.mean = rank_one_vector(&[
        vec![
            Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))),
            Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))),
        ],
        vec![
            Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))),
            Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))),
        ],
    ])
    .unwrap();
    let a = random_transition(n, d, &mut rng);
    let w = scaled_identity_covariance(&[n; 2], l, &[0.01, 0.02]).unwrap();
    let mut r = Array3::zeros((1, 1, l));
    for b in 0..l {
        r[[0, 0, b]] = 0.1;
    }
    let noise = NoiseSpec::new(w.clone(), r).unwrap();

    let next = predict(&state, &a, &noise).unwrap();

    let a_d = dense_operator(&a);
    let m_d = dense_mean(&state.mean);
    let p_d = dense_cov(&state.cov);
    let w_d = dense_cov(&w);
    let want_mean = a_d.dot(&m_d);
    let mut want_cov = Array3::zeros(p_d.dim());
    for b in 0..l {
        let slice = a_d.dot(&p_d.slice(s![.., .., b])).dot(&a_d.t())
            + &w_d.slice(s![.., .., b]);
        want_cov.slice_mut(s![.., .., b]).assign(&slice);
    }
    assert!(rel2(&dense_mean(&next.mean), &want_mean) < 1e-11);
    assert!(rel3(&dense_cov(&next.cov), &want_cov) < 1e-11);
}

#[test]
fn innovation_vanishes_on_consistent_data() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(62);
    let (n, d, l, m) = (3, 2, 2, 2);
    let h: Vec<Array1<f64>> = (0..d)
        .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
        .collect();
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    state.mean = rank_one_vector(&[h.clone(), h]).unwrap();

    let u = random_matrix(m, n, &mut rng);
    let c_train = krp_to_tt(
        &RegressorMatrix::new(u).unwrap(),
        d,
        &RankPolicy::MachineEps,
    )
    .unwrap();
    let c_d = dense_operator(&c_train);
    let y = c_d.dot(&dense_mean(&state.mean));
    let obs = Observation::new(c_train, y.clone()).unwrap();

    let v = innovation(&state, &obs).unwrap();
    let scale = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(v.iter().all(|x| x.abs() < 1e-12 * scale.max(1.0)));

    // zero mean returns Y itself
    let zero_state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let v = innovation(&zero_state, &obs).unwrap();
    assert!(rel2(&v, &y) < 1e-14);
}

#[test]
fn innovation_matches_dense() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(63);
    let (n, d, l, m) = (2, 3, 2, 3);
    let mut state = KalmanState::init(&[n; 3], l, 1.0, spec).unwrap();
    state.mean = rank_one_vector(&[
        (0..d)
            .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
            .collect(),
        (0..d)
            .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
            .collect(),
    ])
    .unwrap();
    let u = random_matrix(m, n, &mut rng);
    let y = random_matrix(m, l, &mut rng);
    let obs = observation_from(u, d, y.clone());
    let v = innovation(&state, &obs).unwrap();
    let want = &y - &dense_operator(&obs.c_train).dot(&dense_mean(&state.mean));
    assert!(rel2(&v, &want) < 1e-12);
}

#[test]
fn innovation_cov_reduces_to_r_for_zero_covariance() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let (n, d, l, m) = (2, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 0.0, spec).unwrap();
    state.cov = scaled_identity_covariance(&[n; 2], l, &[0.0, 0.0]).unwrap();
    let mut rng = rng_with(64);
    let u = random_matrix(m, n, &mut rng);
    let obs = observation_from(u, d, Array2::zeros((m, l)));
    let mut r = Array3::zeros((m, m, l));
    for b in 0..l {
        for q in 0..m {
            r[[q, q, b]] = 0.5 + q as f64;
        }
    }
    let noise = NoiseSpec::new(
        scaled_identity_covariance(&[n; 2], l, &[0.0, 0.0]).unwrap(),
        r.clone(),
    )
    .unwrap();
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    assert!(rel3(&s, &r) < 1e-14);
}

#[test]
fn innovation_cov_picks_diagonal_entries() {
    // single-core state, basis-row observation: S = selected diag + R
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let (n, l, m) = (4, 1, 2);
    let mut state = KalmanState::init(&[n], l, 2.5, spec).unwrap();
    state.cov = scaled_identity_covariance(&[n], l, &[2.5]).unwrap();
    let mut u = Array2::zeros((m, n));
    u[[0, 0]] = 1.0;
    u[[1, 2]] = 1.0;
    let obs = observation_from(u, 1, Array2::zeros((m, l)));
    let noise = NoiseSpec::diagonal(&[n], l, 0.0, m, 0.25).unwrap();
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    for q in 0..m {
        for j in 0..m {
            let want = if q == j { 2.5 + 0.25 } else { 0.0 };
            assert!((s[[q, j, 0]] - want).abs() < 1e-13);
        }
    }
}

#[test]
fn innovation_cov_matches_dense_and_is_symmetric() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(65);
    let (n, d, l, m) = (3, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    // a full-rank covariance via one filter update
    let u0 = random_matrix(m, n, &mut rng);
    let y0 = random_matrix(m, l, &mut rng);
    let obs0 = observation_from(u0, d, y0);
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.01, m, 0.1).unwrap();
    state = step(&state, &a, &noise, &obs0).unwrap();

    let u = random_matrix(m, n, &mut rng);
    let obs = observation_from(u, d, Array2::zeros((m, l)));
    let s = innovation_cov(&state, &obs, &noise).unwrap();

    let c_d = dense_operator(&obs.c_train);
    let p_d = dense_cov(&state.cov);
    let mut want = Array3::zeros((m, m, l));
    for b in 0..l {
        let slice = c_d.dot(&p_d.slice(s![.., .., b])).dot(&c_d.t())
            + &noise.measurement.slice(s![.., .., b]);
        want.slice_mut(s![.., .., b]).assign(&slice);
    }
    assert!(rel3(&s, &want) < 1e-11);
    for b in 0..l {
        for q in 0..m {
            for j in 0..m {
                assert!((s[[q, j, b]] - s[[j, q, b]]).abs() <= 1e-11 * s[[q, q, b]].abs().max(1.0));
            }
        }
    }
}

#[test]
fn gain_is_c_transpose_for_orthonormal_rows() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let (n, l, m) = (4, 1, 2);
    let state = KalmanState::init(&[n], l, 1.0, spec).unwrap();
    let mut u = Array2::zeros((m, n));
    u[[0, 1]] = 1.0;
    u[[1, 3]] = 1.0;
    let obs = observation_from(u.clone(), 1, Array2::zeros((m, l)));
    let noise = NoiseSpec::diagonal(&[n], l, 0.0, m, 0.0).unwrap();
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();
    let k_d = dense_gain(&k);
    for j in 0..n {
        for q in 0..m {
            assert!((k_d[[j, q, 0]] - u[[q, j]]).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_covariance_gives_zero_gain() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let (n, d, l, m) = (2, 2, 1, 2);
    let mut state = KalmanState::init(&[n; 2], l, 0.0, spec).unwrap();
    state.cov = scaled_identity_covariance(&[n; 2], l, &[0.0]).unwrap();
    let mut rng = rng_with(66);
    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.0, m, 1.0).unwrap();
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();
    assert!(dense_gain(&k).iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn singular_innovation_names_the_slice() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let (n, d, l, m) = (2, 2, 1, 2);
    let mut state = KalmanState::init(&[n; 2], l, 0.0, spec).unwrap();
    state.cov = scaled_identity_covariance(&[n; 2], l, &[0.0]).unwrap();
    let mut rng = rng_with(67);
    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let s = Array3::zeros((m, m, l));
    match kalman_gain(&state, &obs, &s) {
        Err(KalmanError::SingularInnovation { slice }) => assert_eq!(slice, 0),
        other => panic!("expected singular innovation, got {other:?}"),
    }
}

#[test]
fn gain_matches_dense_oracle() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(68);
    let (n, d, l, m) = (3, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.01, m, 0.1).unwrap();
    let obs0 = observation_from(random_matrix(m, n, &mut rng), d, random_matrix(m, l, &mut rng));
    state = step(&state, &a, &noise, &obs0).unwrap();

    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();

    let c_d = dense_operator(&obs.c_train);
    let p_d = dense_cov(&state.cov);
    let k_d = dense_gain(&k);
    for b in 0..l {
        let s_b = s.slice(s![.., .., b]).to_owned();
        let s_inv = invert_small(&s_b);
        let want = p_d.slice(s![.., .., b]).dot(&c_d.t()).dot(&s_inv);
        let got = k_d.slice(s![.., .., b]).to_owned();
        assert!(rel2(&got, &want) < 1e-10, "slice {b}");
    }
}

#[test]
fn mean_update_no_ops_on_zero_inputs() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(69);
    let (n, d, l, m) = (2, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    state.mean = rank_one_vector(&[
        (0..d)
            .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
            .collect(),
        (0..d)
            .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
            .collect(),
    ])
    .unwrap();

    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.0, m, 0.1).unwrap();
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();

    // V = 0
    let mean = update_mean(&state, &k, &Array2::zeros((m, l))).unwrap();
    assert!(rel2(&dense_mean(&mean), &dense_mean(&state.mean)) < 1e-13);

    // K = 0
    let kz = zero_gain(n, d, l, m);
    let v = random_matrix(m, l, &mut rng);
    let mean = update_mean(&state, &kz, &v).unwrap();
    assert!(rel2(&dense_mean(&mean), &dense_mean(&state.mean)) < 1e-13);
}

#[test]
fn mean_update_matches_dense() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(70);
    let (n, d, l, m) = (3, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.01, m, 0.1).unwrap();
    let obs0 = observation_from(random_matrix(m, n, &mut rng), d, random_matrix(m, l, &mut rng));
    state = step(&state, &a, &noise, &obs0).unwrap();

    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();
    let v = random_matrix(m, l, &mut rng);
    let mean = update_mean(&state, &k, &v).unwrap();

    let k_d = dense_gain(&k);
    let mut want = dense_mean(&state.mean);
    for b in 0..l {
        let corr = k_d.slice(s![.., .., b]).dot(&v.column(b));
        let updated = &want.column(b) + &corr;
        want.column_mut(b).assign(&updated);
    }
    assert!(rel2(&dense_mean(&mean), &want) < 1e-10);
}

#[test]
fn cov_update_no_ops_on_zero_inputs() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(71);
    let (n, d, l, m) = (2, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.01, m, 0.1).unwrap();
    let obs0 = observation_from(random_matrix(m, n, &mut rng), d, random_matrix(m, l, &mut rng));
    state = step(&state, &a, &noise, &obs0).unwrap();

    // K = 0 leaves P
    let kz = zero_gain(n, d, l, m);
    let s = innovation_cov(
        &state,
        &observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l))),
        &noise,
    )
    .unwrap();
    let cov = update_cov(&state, &kz, &s).unwrap();
    assert!(rel3(&dense_cov(&cov), &dense_cov(&state.cov)) < 1e-12);

    // S = 0 leaves P
    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let k = kalman_gain(&state, &obs, &innovation_cov(&state, &obs, &noise).unwrap()).unwrap();
    let cov = update_cov(&state, &k, &Array3::zeros((m, m, l))).unwrap();
    assert!(rel3(&dense_cov(&cov), &dense_cov(&state.cov)) < 1e-12);
}

#[test]
fn cov_update_matches_dense_and_stays_symmetric() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(72);
    let (n, d, l, m) = (3, 2, 2, 2);
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.01, m, 0.1).unwrap();
    let obs0 = observation_from(random_matrix(m, n, &mut rng), d, random_matrix(m, l, &mut rng));
    state = step(&state, &a, &noise, &obs0).unwrap();

    let obs = observation_from(random_matrix(m, n, &mut rng), d, Array2::zeros((m, l)));
    let s = innovation_cov(&state, &obs, &noise).unwrap();
    let k = kalman_gain(&state, &obs, &s).unwrap();
    let cov = update_cov(&state, &k, &s).unwrap();

    let k_d = dense_gain(&k);
    let p_d = dense_cov(&state.cov);
    let mut want = Array3::zeros(p_d.dim());
    for b in 0..l {
        let s_b = s.slice(s![.., .., b]);
        let sym = (&s_b + &s_b.t()) * 0.5;
        let kb = k_d.slice(s![.., .., b]);
        let slice = &p_d.slice(s![.., .., b]) - &kb.dot(&sym).dot(&kb.t());
        want.slice_mut(s![.., .., b]).assign(&slice);
    }
    let got = dense_cov(&cov);
    assert!(rel3(&got, &want) < 1e-10);
    for b in 0..l {
        let slice = got.slice(s![.., .., b]);
        let num = (&slice - &slice.t()).iter().map(|v| v * v).sum::<f64>().sqrt();
        let den = slice.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(num <= 1e-9 * den.max(1e-30));
    }
}

#[test]
fn exact_prior_is_a_fixed_point() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(73);
    let (n, d, l, m) = (3, 2, 1, 2);
    let h: Vec<Array1<f64>> = (0..d)
        .map(|_| Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal))))
        .collect();
    let truth = rank_one_vector(&[h]).unwrap();
    let mut state = KalmanState::init(&[n; 2], l, 1e-10, spec).unwrap();
    state.mean = truth.clone();

    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.0, m, 1e-12).unwrap();
    let truth_dense = dense_mean(&truth);
    for _ in 0..5 {
        let u = random_matrix(m, n, &mut rng);
        let c_train = krp_to_tt(
            &RegressorMatrix::new(u).unwrap(),
            d,
            &RankPolicy::MachineEps,
        )
        .unwrap();
        let y = dense_operator(&c_train).dot(&truth_dense);
        let obs = Observation::new(c_train, y).unwrap();
        state = step(&state, &a, &noise, &obs).unwrap();
    }
    assert!(rel2(&dense_mean(&state.mean), &truth_dense) < 1e-8);
}

#[test]
fn single_output_path_degenerates_to_scalar_formulas() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(74);
    let (n, d, l) = (3, 2, 2);
    let nd = n * n;
    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.0, 1, 0.01).unwrap();

    // scalar-output dense recursion carried alongside
    let mut means = Array2::<f64>::zeros((nd, l));
    let mut covs = Array3::<f64>::zeros((nd, nd, l));
    for b in 0..l {
        for j in 0..nd {
            covs[[j, j, b]] = 1.0;
        }
    }

    for _ in 0..10 {
        let u = random_matrix(1, n, &mut rng);
        let y = random_matrix(1, l, &mut rng);
        let obs = observation_from(u, d, y.clone());
        let c_row = dense_operator(&obs.c_train); // (1, nd)
        state = step(&state, &a, &noise, &obs).unwrap();

        for b in 0..l {
            let p = covs.slice(s![.., .., b]).to_owned();
            let cp = c_row.dot(&p); // (1, nd)
            let s_scal = cp.dot(&c_row.t())[[0, 0]] + 0.01;
            let k = cp.t().to_owned() / s_scal; // (nd, 1)
            let v = y[[0, b]] - c_row.dot(&means.column(b))[[0]];
            let new_mean = &means.column(b) + &(k.column(0).to_owned() * v);
            means.column_mut(b).assign(&new_mean);
            let p_new = &p - &(k.dot(&k.t()) * s_scal);
            covs.slice_mut(s![.., .., b]).assign(&p_new);
        }
    }
    assert!(rel2(&dense_mean(&state.mean), &means) < 1e-12);
    assert!(rel3(&dense_cov(&state.cov), &covs) < 1e-11);
}

#[test]
fn twenty_step_lockstep_with_dense_oracle() {
    let spec = RoundingSpec::new(1e-14, 0).unwrap();
    let mut rng = rng_with(75);
    let (n, d, l, m) = (3, 2, 2, 2);
    let nd = n * n;

    let a_train = random_transition(n, d, &mut rng);
    let a_d = dense_operator(&a_train);
    let w_train = scaled_identity_covariance(&[n; 2], l, &[0.02, 0.03]).unwrap();
    let mut r = Array3::zeros((m, m, l));
    for b in 0..l {
        for q in 0..m {
            r[[q, q, b]] = 0.05 + 0.01 * (q + b) as f64;
        }
    }
    let noise = NoiseSpec::new(w_train.clone(), r.clone()).unwrap();
    let w_d = dense_cov(&w_train);

    let mut state = KalmanState::init(&[n; 2], l, 1.0, spec).unwrap();
    let mut dense = DenseState::init(nd, l, 1.0);

    for step_idx in 0..20 {
        let u = random_matrix(m, n, &mut rng);
        let y = random_matrix(m, l, &mut rng);
        let obs = observation_from(u, d, y.clone());
        let c_d = dense_operator(&obs.c_train);

        state = step(&state, &a_train, &noise, &obs).unwrap();
        dense = dense_step(&dense, &a_d, &w_d, &c_d, &y, &r, 1 << 20).unwrap();

        let mean_err = rel2(&dense_mean(&state.mean), &dense.means);
        let cov_err = rel3(&dense_cov(&state.cov), &dense.covs);
        assert!(
            mean_err < 1e-8 && cov_err < 1e-8,
            "step {step_idx}: mean {mean_err:.2e} cov {cov_err:.2e}"
        );
        assert_eq!(state.step_count, step_idx + 1);
    }
}

#[test]
fn rounding_tolerance_zero_matches_tight_tolerance() {
    let mut rng = rng_with(76);
    let (n, d, l, m) = (2, 2, 1, 2);
    let mut loose = KalmanState::init(&[n; 2], l, 1.0, RoundingSpec::new(0.0, 0).unwrap()).unwrap();
    let mut tight =
        KalmanState::init(&[n; 2], l, 1.0, RoundingSpec::new(1e-14, 0).unwrap()).unwrap();
    let a = tt_core::identity_operator(&[n; 2]);
    let noise = NoiseSpec::diagonal(&[n; 2], l, 0.001, m, 0.1).unwrap();
    for _ in 0..10 {
        let u = random_matrix(m, n, &mut rng);
        let y = random_matrix(m, l, &mut rng);
        let obs = observation_from(u, d, y);
        loose = step(&loose, &a, &noise, &obs).unwrap();
        tight = step(&tight, &a, &noise, &obs).unwrap();
        for (rz, rt) in loose.cov.ranks().iter().zip(tight.cov.ranks()) {
            assert!(*rz >= rt);
        }
    }
    assert!(rel2(&dense_mean(&loose.mean), &dense_mean(&tight.mean)) < 1e-12);
    assert!(rel3(&dense_cov(&loose.cov), &dense_cov(&tight.cov)) < 1e-12);
}

#[test]
fn dense_innovation_cov_agrees_with_monte_carlo() {
    // sample covariance of simulated innovations vs the filter's S
    use ndarray_linalg::Cholesky;
    let mut rng = rng_with(77);
    let (nd, m) = (4, 2);
    let mut p = random_matrix(nd, nd, &mut rng);
    p = p.dot(&p.t()) + Array2::<f64>::eye(nd); // SPD
    let c = random_matrix(m, nd, &mut rng);
    let r_var = 0.3;
    let s_want = c.dot(&p).dot(&c.t()) + Array2::<f64>::eye(m) * r_var;

    let chol = p.cholesky(ndarray_linalg::UPLO::Lower).unwrap();
    let trials = 10_000;
    let mut acc = Array2::<f64>::zeros((m, m));
    for _ in 0..trials {
        let z = Array1::from_iter((0..nd).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let x = chol.dot(&z);
        let e = Array1::from_iter((0..m).map(|_| r_var.sqrt() * rng.sample::<f64, _>(StandardNormal)));
        let v = c.dot(&x) + e;
        for q in 0..m {
            for j in 0..m {
                acc[[q, j]] += v[q] * v[j];
            }
        }
    }
    acc /= trials as f64;
    assert!(rel2(&acc, &s_want) < 0.1);
}

fn invert_small(a: &Array2<f64>) -> Array2<f64> {
    use ndarray_linalg::Inverse;
    a.inv().unwrap()
}

#[test]
fn norms_track_identification_error() {
    // tt_norm of (mean - truth) is the error signal the experiments report
    let mut rng = rng_with(78);
    let h: Vec<Array1<f64>> = (0..2)
        .map(|_| Array1::from_iter((0..3).map(|_| rng.sample::<f64, _>(StandardNormal))))
        .collect();
    let truth = rank_one_vector(&[h]).unwrap();
    let zero = vector_zeros(&[3, 3], 1);
    let diff = tt_core::tt_add(&zero, &truth.scaled(-1.0)).unwrap();
    let err = tt_norm(&diff)[0];
    let want = tt_norm(&truth)[0];
    assert!((err - want).abs() < 1e-12 * want);
}
