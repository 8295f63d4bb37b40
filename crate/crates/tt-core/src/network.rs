use crate::core::TTCore;
use crate::error::{Result, TTError};

/// What a train represents; constrains mode sizes and the boundary ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainKind {
    /// `n^d x l` stacked column vectors: output mode 1 on every core, the
    /// vector modes live on the input-mode slot, batch on core 0's left rank.
    Vector,
    /// An operator such as `C(t)` or `A(t)`: left boundary rank 1.
    Matrix,
    /// `n^d x n^d x l`: matching (o, i) mode sizes on every core, batch on
    /// core 0's left rank.
    Covariance,
    /// `n^d x m x l`: the state modes on the output slot, the measurement
    /// size m on core 0's input slot only, batch on core 0's left rank.
    Gain,
}

impl TrainKind {
    pub fn tag(self) -> u64 {
        match self {
            TrainKind::Vector => 0,
            TrainKind::Matrix => 1,
            TrainKind::Covariance => 2,
            TrainKind::Gain => 3,
        }
    }

    pub fn from_tag(tag: u64) -> Result<Self> {
        Ok(match tag {
            0 => TrainKind::Vector,
            1 => TrainKind::Matrix,
            2 => TrainKind::Covariance,
            3 => TrainKind::Gain,
            other => return Err(TTError::InvalidDump(format!("unknown kind tag {other}"))),
        })
    }
}

/// Relative truncation control for [`crate::tt_round`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundingSpec {
    /// Relative truncation threshold delta; the rounded train's contraction
    /// differs from the input by at most `tolerance * ||input||_F`.
    pub tolerance: f64,
    /// Hard cap on every rank after rounding; 0 disables the cap.
    pub max_rank: usize,
}

impl RoundingSpec {
    pub fn new(tolerance: f64, max_rank: usize) -> Result<Self> {
        if !(tolerance >= 0.0) {
            return Err(TTError::InvalidArgument(format!(
                "rounding tolerance must be >= 0, got {tolerance}"
            )));
        }
        Ok(RoundingSpec {
            tolerance,
            max_rank,
        })
    }

    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        Self::new(tolerance, 0)
    }
}

/// An ordered chain of [`TTCore`] blocks with kind metadata.
///
/// Adjacent ranks chain (`cores[k].r_right == cores[k+1].r_left`), the last
/// right rank is 1, and the first left rank carries the batch count `l` for
/// vector/covariance/gain trains (1 for operator trains). Values are
/// immutable after construction; every operation returns a new network.
#[derive(Clone, Debug)]
pub struct TTNetwork {
    cores: Vec<TTCore>,
    kind: TrainKind,
    batch: usize,
}

impl TTNetwork {
    pub fn new(cores: Vec<TTCore>, kind: TrainKind, batch: usize) -> Result<Self> {
        let net = TTNetwork { cores, kind, batch };
        net.validate()?;
        Ok(net)
    }

    /// Structural validation: rank chain, boundary ranks, kind constraints.
    pub fn validate(&self) -> Result<()> {
        if self.cores.is_empty() {
            return Err(TTError::structure(0, "network must have at least one core"));
        }
        if self.batch == 0 {
            return Err(TTError::structure(0, "batch must be >= 1"));
        }
        let d = self.cores.len();
        for k in 0..d - 1 {
            if self.cores[k].r_right() != self.cores[k + 1].r_left() {
                return Err(TTError::structure(
                    k,
                    format!(
                        "rank chain broken: r_right {} != next r_left {}",
                        self.cores[k].r_right(),
                        self.cores[k + 1].r_left()
                    ),
                ));
            }
        }
        if self.cores[d - 1].r_right() != 1 {
            return Err(TTError::structure(
                d - 1,
                format!("last right rank must be 1, got {}", self.cores[d - 1].r_right()),
            ));
        }
        let expected_left = match self.kind {
            TrainKind::Matrix => 1,
            _ => self.batch,
        };
        if self.cores[0].r_left() != expected_left {
            return Err(TTError::structure(
                0,
                format!(
                    "core 0 left rank must be {} for this kind, got {}",
                    expected_left,
                    self.cores[0].r_left()
                ),
            ));
        }
        for (k, core) in self.cores.iter().enumerate() {
            match self.kind {
                TrainKind::Vector => {
                    if core.mode_out() != 1 {
                        return Err(TTError::structure(
                            k,
                            format!("vector train requires o-mode 1, got {}", core.mode_out()),
                        ));
                    }
                }
                TrainKind::Covariance => {
                    if core.mode_out() != core.mode_in() {
                        return Err(TTError::structure(
                            k,
                            format!(
                                "covariance train requires o == i, got ({}, {})",
                                core.mode_out(),
                                core.mode_in()
                            ),
                        ));
                    }
                }
                TrainKind::Gain => {
                    if k > 0 && core.mode_in() != 1 {
                        return Err(TTError::structure(
                            k,
                            format!(
                                "gain train carries the output size on core 0 only, got i-mode {}",
                                core.mode_in()
                            ),
                        ));
                    }
                }
                TrainKind::Matrix => {}
            }
        }
        Ok(())
    }

    /// Scan every entry for NaN/inf. Separate from [`validate`](Self::validate)
    /// because it is O(storage).
    pub fn validate_finite(&self) -> Result<()> {
        for (k, core) in self.cores.iter().enumerate() {
            if !core.is_finite() {
                return Err(TTError::structure(k, "non-finite entry"));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.cores.len()
    }

    pub fn kind(&self) -> TrainKind {
        self.kind
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn cores(&self) -> &[TTCore] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<TTCore> {
        self.cores
    }

    /// The full rank tuple `r_0, ..., r_d` (length d + 1).
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = Vec::with_capacity(self.cores.len() + 1);
        r.push(self.cores[0].r_left());
        for core in &self.cores {
            r.push(core.r_right());
        }
        r
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    pub fn mode_outs(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.mode_out()).collect()
    }

    pub fn mode_ins(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.mode_in()).collect()
    }

    /// Same train with core 0 multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> TTNetwork {
        let mut cores = self.cores.clone();
        let scaled = cores[0].block() * factor;
        cores[0] = TTCore::new(scaled).expect("scaling preserves shape");
        TTNetwork {
            cores,
            kind: self.kind,
            batch: self.batch,
        }
    }

    /// Total stored elements across all cores.
    pub fn storage_len(&self) -> usize {
        self.cores.iter().map(|c| c.block().len()).sum()
    }

    pub(crate) fn from_parts_unchecked(cores: Vec<TTCore>, kind: TrainKind, batch: usize) -> Self {
        let net = TTNetwork { cores, kind, batch };
        debug_assert!(net.validate().is_ok(), "internal op produced invalid train");
        net
    }
}
