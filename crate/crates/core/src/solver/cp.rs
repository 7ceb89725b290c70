//! Plain CP decomposition fitted by alternating least squares.
//!
//! Each sweep solves the three exact least-squares blocks in mode order;
//! Gram matrices are formed in `r x r` space and near-singular systems
//! fall back to the shared jitter policy, so a sweep never hard-fails.

use crate::error::{Error, Result};
use crate::linalg::solve_right;
use crate::rng::{substream, Stream};
use crate::tensor::{residual_norm, FactorSet, Mode, Tensor3};

/// Residual after one ALS sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub sweep: usize,
    pub residual: f64,
}

/// CP-ALS result: fitted factors plus the per-sweep residual history.
#[derive(Debug, Clone)]
pub struct CpFit {
    pub factors: FactorSet,
    pub history: Vec<SweepRecord>,
}

impl CpFit {
    pub fn final_residual(&self) -> f64 {
        self.history.last().map(|r| r.residual).unwrap_or(f64::NAN)
    }
}

/// Fit a rank-`r` CP model with cyclic exact block updates.
///
/// Stops when the relative residual change falls below `tol`, the
/// residual is exactly recoverable (relative to the data norm), or after
/// `max_iter` sweeps. Deterministic for a fixed `seed`.
pub fn cp_als_fit(
    x: &Tensor3,
    r: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<CpFit> {
    if r == 0 {
        return Err(Error::InvalidParam("rank must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam("tolerance must be positive".into()));
    }
    let dims = x.dims();
    let mut rng = substream(seed, Stream::Init);
    let mut fs = FactorSet::random(dims, r, &mut rng);

    let unfoldings = [
        x.matricize(Mode::One),
        x.matricize(Mode::Two),
        x.matricize(Mode::Three),
    ];
    let x_norm = x.frobenius_norm();

    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    for sweep in 0..max_iter {
        for (mode, unf) in Mode::ALL.iter().zip(unfoldings.iter()) {
            let kr = fs.paired_khatri_rao(*mode);
            let gram = fs.paired_gram(*mode);
            let updated = solve_right(&gram, &unf.dot(&kr));
            match mode {
                Mode::One => fs.mode1 = updated,
                Mode::Two => fs.mode2 = updated,
                Mode::Three => fs.mode3 = updated,
            }
        }
        let residual = residual_norm(x, &fs)?;
        history.push(SweepRecord { sweep, residual });
        if !residual.is_finite() {
            return Err(Error::Diverged(format!(
                "cp-als residual became non-finite at sweep {sweep}"
            )));
        }
        if residual <= 1e-14 * x_norm.max(1.0) {
            break;
        }
        if prev.is_finite() {
            let change = (prev - residual).abs() / prev.max(f64::MIN_POSITIVE);
            if change < tol {
                break;
            }
        }
        prev = residual;
    }
    Ok(CpFit { factors: fs, history })
}
