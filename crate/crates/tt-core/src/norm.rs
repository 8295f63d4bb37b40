use ndarray::{s, Array2};

use crate::network::TTNetwork;

/// Frobenius norm of each batch slice, by left-to-right Gram accumulation.
///
/// Never materializes the dense tensor: carries the r x r Gram matrix of the
/// partial contraction down the train, O(d * o * i * r^3) per slice.
pub fn tt_norm(net: &TTNetwork) -> Vec<f64> {
    let d = net.depth();
    let first = net.cores()[0].block();
    let (_, o0, i0, r1) = first.dim();
    let mut norms = Vec::with_capacity(net.batch());
    for b in 0..net.batch() {
        let slice = first.slice(s![b, .., .., ..]);
        let x = slice
            .to_shape((o0 * i0, r1))
            .expect("standard layout")
            .into_owned();
        let mut gram: Array2<f64> = x.t().dot(&x);
        for k in 1..d {
            let blk = net.cores()[k].block();
            let (rl, o, i, rr) = blk.dim();
            let mut next = Array2::<f64>::zeros((rr, rr));
            for oo in 0..o {
                for ii in 0..i {
                    let sl = blk.slice(s![.., oo, ii, ..]); // (rl, rr)
                    debug_assert_eq!(sl.dim(), (rl, rr));
                    next += &sl.t().dot(&gram).dot(&sl);
                }
            }
            gram = next;
        }
        debug_assert_eq!(gram.dim(), (1, 1));
        norms.push(gram[[0, 0]].max(0.0).sqrt());
    }
    norms
}

/// Frobenius norm over all batch slices together.
pub fn tt_norm_total(net: &TTNetwork) -> f64 {
    tt_norm(net).iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::vector_zeros;
    use crate::core::TTCore;
    use crate::network::{TTNetwork, TrainKind};
    use crate::testing::{dense_norm, random_train};
    use approx::assert_relative_eq;
    use ndarray::Array4;

    #[test]
    fn zero_train_has_zero_norm() {
        let net = vector_zeros(&[2, 3], 3);
        assert_eq!(tt_norm(&net), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn kronecker_norm_identity() {
        // [3,4] twice: ||u (x) u|| = ||u||^2 = 25
        let core = TTCore::new(
            Array4::from_shape_vec((1, 1, 2, 1), vec![3.0, 4.0]).unwrap(),
        )
        .unwrap();
        let net = TTNetwork::new(vec![core.clone(), core], TrainKind::Vector, 1).unwrap();
        assert_relative_eq!(tt_norm(&net)[0], 25.0, max_relative = 1e-14);
    }

    #[test]
    fn matches_dense_norm_per_slice() {
        let net = random_train(TrainKind::Vector, 2, 3, 2, &[3, 2], 1, 17);
        let norms = tt_norm(&net);
        for b in 0..2 {
            assert_relative_eq!(norms[b], dense_norm(&net, b), max_relative = 1e-12);
        }
    }
}
