//! Optimization core.
//!
//! Two fitting routes for the association tensor: the CP-ALS baseline
//! ([`cp::cp_als_fit`]) and the relationally constrained decomposition
//! ([`tdrc_fit`]), which augments the CP objective with two penalties
//! tying the mode-1 and mode-2 factors to precomputed similarity
//! matrices through learned `r x r` projections,
//!
//! ```text
//!   1/2 ||X - [[U1,U2,U3]]||^2 + lambda/2 (||M1||^2 + ||M2||^2)
//!     + alpha/2 ||Sm - U1 M1 U1^T||^2 + beta/2 ||Sn - U2 M2 U2^T||^2
//! ```
//!
//! solved by alternating: CG for the projections, a closed-form exact
//! solve for the mode-3 factor, and one ADMM sweep (auxiliary variable,
//! multiplier, growing penalty) for each constrained factor.

pub mod cg;
pub mod cp;

use crate::error::{Error, Result};
use crate::linalg::{frob_norm, frob_norm_sq, gram, identity, solve_right, Matrix};
use crate::rng::{substream, Stream};
use crate::tensor::{FactorSet, Mode, Tensor3};

pub use cg::{cg_solve, cg_solve_with_history, CgProblem};
pub use cp::{cp_als_fit, CpFit, SweepRecord};

/// Everything that controls a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub rank: usize,
    /// Weight of the mode-1 (entity) similarity constraint.
    pub alpha: f64,
    /// Weight of the mode-2 (context) similarity constraint.
    pub beta: f64,
    /// Ridge coefficient on the projection matrices.
    pub lambda: f64,
    /// Penalty growth factor, `> 1`.
    pub mu: f64,
    pub rho_init: f64,
    pub rho_cap: f64,
    /// Outer convergence tolerance (objective change and primal residuals).
    pub tol: f64,
    pub max_iter: usize,
    /// CG stops when the squared residual falls below `cg_tol` times its
    /// initial value.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            rank: 4,
            alpha: 2.0,
            beta: 0.125,
            lambda: 0.001,
            mu: 1.1,
            rho_init: 1.0,
            rho_cap: 1e6,
            tol: 1e-6,
            max_iter: 200,
            cg_tol: 1e-10,
            cg_max_iter: 100,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidParam("rank must be at least 1".into()));
        }
        if !(self.mu > 1.0) {
            return Err(Error::InvalidParam("mu must exceed 1".into()));
        }
        if !(self.rho_init > 0.0) {
            return Err(Error::InvalidParam("rho_init must be positive".into()));
        }
        if !(self.rho_cap >= self.rho_init) {
            return Err(Error::InvalidParam("rho_cap must be >= rho_init".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParam("tol must be positive".into()));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.lambda >= 0.0) {
            return Err(Error::InvalidParam(
                "alpha, beta and lambda must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// One outer-iteration log line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub objective: f64,
    /// `||U1 - J1||_F / ||U1||_F`
    pub primal_res1: f64,
    /// `||U2 - J2||_F / ||U2||_F`
    pub primal_res2: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// Full optimizer state for the constrained decomposition.
#[derive(Debug, Clone)]
pub struct TdrcState {
    pub factors: FactorSet,
    pub m1: Matrix,
    pub m2: Matrix,
    pub j1: Matrix,
    pub j2: Matrix,
    pub y1: Matrix,
    pub y2: Matrix,
    pub rho1: f64,
    pub rho2: f64,
    pub iter: usize,
    pub history: Vec<IterRecord>,
}

impl TdrcState {
    /// Random factors from the init substream; multipliers at zero,
    /// penalties at `rho_init`, projections at zero until the first CG
    /// solve overwrites them.
    pub fn init(dims: (usize, usize, usize), hp: &Hyperparams) -> Self {
        let mut rng = substream(hp.seed, Stream::Init);
        let factors = FactorSet::random(dims, hp.rank, &mut rng);
        let r = hp.rank;
        TdrcState {
            j1: factors.mode1.clone(),
            j2: factors.mode2.clone(),
            y1: Matrix::zeros((dims.0, r)),
            y2: Matrix::zeros((dims.1, r)),
            m1: Matrix::zeros((r, r)),
            m2: Matrix::zeros((r, r)),
            rho1: hp.rho_init,
            rho2: hp.rho_init,
            iter: 0,
            history: Vec::new(),
            factors,
        }
    }
}

/// Result of [`tdrc_fit`].
#[derive(Debug, Clone)]
pub struct TdrcFit {
    pub factors: FactorSet,
    pub m1: Matrix,
    pub m2: Matrix,
    pub history: Vec<IterRecord>,
}

/// Exact least-squares update of the mode-3 factor:
/// `U3 = X3 * KR * ((U2^T U2) .* (U1^T U1))^-1`.
pub fn update_mode3_factor(x3: &Matrix, fs: &FactorSet) -> Matrix {
    let kr = fs.paired_khatri_rao(Mode::Three);
    let g = fs.paired_gram(Mode::Three);
    solve_right(&g, &x3.dot(&kr))
}

struct AdmmBlock<'a> {
    /// Mode-n unfolding of the data tensor.
    x_unf: &'a Matrix,
    /// Khatri-Rao product paired with that unfolding.
    kr: &'a Matrix,
    /// Gram of `kr`, formed in `r x r` space.
    kr_gram: &'a Matrix,
    /// Similarity matrix constraining this factor.
    sim: &'a Matrix,
    /// Learned projection for this side.
    proj: &'a Matrix,
    /// Constraint weight (alpha or beta).
    weight: f64,
}

/// One ADMM sweep on a constrained factor: auxiliary solve, factor
/// solve, multiplier step, penalty growth. Returns
/// `(factor, j, y, rho)`.
fn admm_sweep(
    block: &AdmmBlock<'_>,
    factor: &Matrix,
    j: &Matrix,
    y: &Matrix,
    rho: f64,
    hp: &Hyperparams,
) -> (Matrix, Matrix, Matrix, f64) {
    let _ = j; // the previous auxiliary is fully re-solved each sweep
    let r = factor.ncols();
    let eye = identity(r);

    // J = (w S A + rho U + Y)(w A^T A + rho I)^-1 with A = U M
    let a = factor.dot(block.proj);
    let j_sys = &(gram(&a) * block.weight) + &(&eye * rho);
    let j_rhs = &(block.sim.dot(&a) * block.weight) + &(factor * rho) + y;
    let j_new = solve_right(&j_sys, &j_rhs);

    // U = (X G + w S Q^T + rho J - Y)(G^T G + w Q Q^T + rho I)^-1
    // with Q = M J^T
    let q = block.proj.dot(&j_new.t());
    let u_sys = block.kr_gram + &(q.dot(&q.t()) * block.weight) + &(&eye * rho);
    let u_rhs = &(block.x_unf.dot(block.kr) + &(block.sim.dot(&q.t()) * block.weight))
        + &(&(&j_new * rho) - y);
    let factor_new = solve_right(&u_sys, &u_rhs);

    let y_new = y + &((&factor_new - &j_new) * rho);
    let rho_new = (hp.mu * rho).min(hp.rho_cap);
    (factor_new, j_new, y_new, rho_new)
}

/// ADMM sweep for the mode-1 factor against the entity similarity.
pub fn admm_update_mode1(state: &mut TdrcState, x1: &Matrix, s_m: &Matrix, hp: &Hyperparams) {
    let kr = state.factors.paired_khatri_rao(Mode::One);
    let kr_gram = state.factors.paired_gram(Mode::One);
    let block = AdmmBlock {
        x_unf: x1,
        kr: &kr,
        kr_gram: &kr_gram,
        sim: s_m,
        proj: &state.m1,
        weight: hp.alpha,
    };
    let (f, j, y, rho) = admm_sweep(&block, &state.factors.mode1, &state.j1, &state.y1, state.rho1, hp);
    state.factors.mode1 = f;
    state.j1 = j;
    state.y1 = y;
    state.rho1 = rho;
}

/// ADMM sweep for the mode-2 factor against the context similarity.
pub fn admm_update_mode2(state: &mut TdrcState, x2: &Matrix, s_n: &Matrix, hp: &Hyperparams) {
    let kr = state.factors.paired_khatri_rao(Mode::Two);
    let kr_gram = state.factors.paired_gram(Mode::Two);
    let block = AdmmBlock {
        x_unf: x2,
        kr: &kr,
        kr_gram: &kr_gram,
        sim: s_n,
        proj: &state.m2,
        weight: hp.beta,
    };
    let (f, j, y, rho) = admm_sweep(&block, &state.factors.mode2, &state.j2, &state.y2, state.rho2, hp);
    state.factors.mode2 = f;
    state.j2 = j;
    state.y2 = y;
    state.rho2 = rho;
}

/// Value of the full constrained objective at the given state.
pub fn objective_value(
    x: &Tensor3,
    factors: &FactorSet,
    m1: &Matrix,
    m2: &Matrix,
    s_m: &Matrix,
    s_n: &Matrix,
    hp: &Hyperparams,
) -> f64 {
    let recon = factors.reconstruct();
    let data: f64 = x
        .values()
        .iter()
        .zip(recon.values().iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let rel1 = {
        let e = s_m - &factors.mode1.dot(m1).dot(&factors.mode1.t());
        frob_norm_sq(&e)
    };
    let rel2 = {
        let e = s_n - &factors.mode2.dot(m2).dot(&factors.mode2.t());
        frob_norm_sq(&e)
    };
    0.5 * data
        + 0.5 * hp.lambda * (frob_norm_sq(m1) + frob_norm_sq(m2))
        + 0.5 * hp.alpha * rel1
        + 0.5 * hp.beta * rel2
}

/// Fit the relationally constrained decomposition.
///
/// Outer loop per iteration: CG solves for both projections, exact
/// mode-3 update, one ADMM sweep per constrained factor. Terminates
/// when the relative objective change and both primal residuals drop
/// below `hp.tol`, or at `hp.max_iter`.
pub fn tdrc_fit(x: &Tensor3, s_m: &Matrix, s_n: &Matrix, hp: &Hyperparams) -> Result<TdrcFit> {
    hp.validate()?;
    let (m, n, _) = x.dims();
    if s_m.dim() != (m, m) {
        return Err(Error::Dimension(format!(
            "entity similarity must be {m}x{m}, got {}x{}",
            s_m.nrows(),
            s_m.ncols()
        )));
    }
    if s_n.dim() != (n, n) {
        return Err(Error::Dimension(format!(
            "context similarity must be {n}x{n}, got {}x{}",
            s_n.nrows(),
            s_n.ncols()
        )));
    }
    if hp.rank > m.min(n) {
        return Err(Error::InvalidParam(format!(
            "rank {} exceeds min(m, n) = {}",
            hp.rank,
            m.min(n)
        )));
    }

    let x1 = x.matricize(Mode::One);
    let x2 = x.matricize(Mode::Two);
    let x3 = x.matricize(Mode::Three);

    let mut state = TdrcState::init(x.dims(), hp);
    let mut prev_obj = f64::INFINITY;

    for iter in 0..hp.max_iter {
        state.iter = iter;

        let p1 = CgProblem::new(
            s_m.clone(),
            state.factors.mode1.clone(),
            state.factors.mode1.clone(),
            hp.alpha,
            hp.lambda,
        )?;
        state.m1 = cg_solve(&p1, hp.cg_tol, hp.cg_max_iter);
        let p2 = CgProblem::new(
            s_n.clone(),
            state.factors.mode2.clone(),
            state.factors.mode2.clone(),
            hp.beta,
            hp.lambda,
        )?;
        state.m2 = cg_solve(&p2, hp.cg_tol, hp.cg_max_iter);

        state.factors.mode3 = update_mode3_factor(&x3, &state.factors);
        admm_update_mode1(&mut state, &x1, s_m, hp);
        admm_update_mode2(&mut state, &x2, s_n, hp);

        let objective = objective_value(x, &state.factors, &state.m1, &state.m2, s_m, s_n, hp);
        if !objective.is_finite() {
            return Err(Error::Diverged(format!(
                "objective became non-finite at iteration {iter} \
                 (rho1={:.3e}, rho2={:.3e}); check hyperparameters",
                state.rho1, state.rho2
            )));
        }
        let res1 = frob_norm(&(&state.factors.mode1 - &state.j1))
            / frob_norm(&state.factors.mode1).max(f64::MIN_POSITIVE);
        let res2 = frob_norm(&(&state.factors.mode2 - &state.j2))
            / frob_norm(&state.factors.mode2).max(f64::MIN_POSITIVE);
        state.history.push(IterRecord {
            iter,
            objective,
            primal_res1: res1,
            primal_res2: res2,
            rho1: state.rho1,
            rho2: state.rho2,
        });

        let rel_change = (prev_obj - objective).abs() / prev_obj.max(f64::MIN_POSITIVE);
        if prev_obj.is_finite() && rel_change < hp.tol && res1 < hp.tol && res2 < hp.tol {
            break;
        }
        prev_obj = objective;
    }

    Ok(TdrcFit {
        factors: state.factors,
        m1: state.m1,
        m2: state.m2,
        history: state.history,
    })
}

/// Completion scores for every cell; higher means more likely.
pub fn predict_scores(fs: &FactorSet) -> Tensor3 {
    fs.reconstruct()
}
