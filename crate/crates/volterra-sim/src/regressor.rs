use krp_convert::RegressorMatrix;
use ndarray::{Array1, Array2};

use crate::error::{Result, SimError};
use crate::stream::InputStream;

/// The regressor row at time t: a leading 1, then all p inputs at time t,
/// then at t-1, down to t-M+1. Lags before the stream start read as zero.
pub fn build_ut(stream: &InputStream, t: usize, memory: usize) -> Result<Array1<f64>> {
    if t < 1 {
        return Err(SimError::InvalidArgument(
            "regressor time index must be >= 1".into(),
        ));
    }
    if memory < 1 {
        return Err(SimError::InvalidArgument("memory must be >= 1".into()));
    }
    let p = stream.channels();
    let mut row = Array1::zeros(p * memory + 1);
    row[0] = 1.0;
    for lag in 0..memory {
        let time = t as i64 - lag as i64;
        for k in 0..p {
            row[1 + lag * p + k] = stream.value(time, k)?;
        }
    }
    Ok(row)
}

/// m stacked regressor rows for consecutive times t .. t+m-1.
pub fn build_regressor_block(
    stream: &InputStream,
    t: usize,
    m: usize,
    memory: usize,
) -> Result<RegressorMatrix> {
    if m < 1 {
        return Err(SimError::InvalidArgument("block size must be >= 1".into()));
    }
    let n = stream.channels() * memory + 1;
    let mut data = Array2::zeros((m, n));
    for j in 0..m {
        data.row_mut(j).assign(&build_ut(stream, t + j, memory)?);
    }
    Ok(RegressorMatrix::new(data)?)
}
