use crate::error::{ConvertError, Result};

/// How SVD truncation ranks are decided during conversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankPolicy {
    /// Keep singular values above `sigma_1 * max(dims) * f64::EPSILON`.
    /// Preserves the machine-precision exactness of the conversion.
    MachineEps,
    /// Keep singular values above `sigma_1 * tau`.
    Relative(f64),
    /// Keep at most this many singular values.
    FixedCap(usize),
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy::MachineEps
    }
}

impl RankPolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            RankPolicy::Relative(tau) if !(*tau > 0.0) => Err(ConvertError::InvalidArgument(
                format!("relative threshold must be > 0, got {tau}"),
            )),
            RankPolicy::FixedCap(0) => Err(ConvertError::InvalidArgument(
                "fixed rank cap must be >= 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Count of singular values above the policy cutoff, never 0.
///
/// `singular_values` must be nonincreasing and nonnegative (as returned by
/// LAPACK); `dims` is the shape of the factored matrix.
pub fn numerical_rank(
    singular_values: &[f64],
    policy: &RankPolicy,
    dims: (usize, usize),
) -> Result<usize> {
    if singular_values.is_empty() {
        return Err(ConvertError::InvalidArgument(
            "numerical rank of an empty singular value list".into(),
        ));
    }
    debug_assert!(singular_values.windows(2).all(|w| w[0] >= w[1]));
    policy.validate()?;
    let sigma1 = singular_values[0];
    let count = match policy {
        RankPolicy::MachineEps => {
            let cutoff = sigma1 * dims.0.max(dims.1) as f64 * f64::EPSILON;
            singular_values.iter().take_while(|&&s| s > cutoff).count()
        }
        RankPolicy::Relative(tau) => {
            let cutoff = sigma1 * tau;
            singular_values.iter().take_while(|&&s| s > cutoff).count()
        }
        RankPolicy::FixedCap(cap) => singular_values.len().min(*cap),
    };
    Ok(count.max(1))
}
