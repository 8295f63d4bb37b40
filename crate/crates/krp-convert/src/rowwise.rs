use ndarray::Array2;

use crate::error::{ConvertError, Result};

/// Row-wise Kronecker product (transposed Khatri-Rao): row i of the result
/// is `a.row(i) (x) b.row(i)`, so the column count multiplies.
pub fn rowwise_kron(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    if a.nrows() != b.nrows() {
        return Err(ConvertError::InvalidArgument(format!(
            "row counts differ: {} vs {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let (m, na) = a.dim();
    let nb = b.ncols();
    let mut out = Array2::zeros((m, na * nb));
    for r in 0..m {
        let ar = a.row(r);
        let br = b.row(r);
        let mut orow = out.row_mut(r);
        for (j, &av) in ar.iter().enumerate() {
            for (k, &bv) in br.iter().enumerate() {
                orow[j * nb + k] = av * bv;
            }
        }
    }
    Ok(out)
}

/// Brute-force d-fold row-wise Kronecker power `U (.) U (.) ... (.) U`.
///
/// The independent reconstruction oracle for the structured conversion;
/// exponential in d, desk scale only.
pub fn rowwise_kron_power(u: &Array2<f64>, d: usize) -> Result<Array2<f64>> {
    if d < 1 {
        return Err(ConvertError::InvalidArgument("power must be >= 1".into()));
    }
    let mut acc = u.clone();
    for _ in 1..d {
        acc = rowwise_kron(&acc, u)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn single_row_is_plain_kronecker() {
        let a = arr2(&[[1.0, 2.0]]);
        let b = arr2(&[[3.0, 4.0]]);
        let c = rowwise_kron(&a, &b).unwrap();
        assert_eq!(c, arr2(&[[3.0, 4.0, 6.0, 8.0]]));
    }

    #[test]
    fn identity_squared() {
        let id = Array2::eye(2);
        let c = rowwise_kron(&id, &id).unwrap();
        assert_eq!(
            c,
            arr2(&[[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        );
    }

    #[test]
    fn rows_match_per_row_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = Array2::from_shape_fn((3, 2), |_| rng.sample::<f64, _>(StandardNormal));
        let b = Array2::from_shape_fn((3, 3), |_| rng.sample::<f64, _>(StandardNormal));
        let c = rowwise_kron(&a, &b).unwrap();
        for r in 0..3 {
            for j in 0..2 {
                for k in 0..3 {
                    assert_eq!(c[[r, j * 3 + k]], a[[r, j]] * b[[r, k]]);
                }
            }
        }
    }

    #[test]
    fn row_count_mismatch_is_an_error() {
        let a = Array2::<f64>::zeros((2, 2));
        let b = Array2::<f64>::zeros((3, 2));
        assert!(rowwise_kron(&a, &b).is_err());
    }
}
