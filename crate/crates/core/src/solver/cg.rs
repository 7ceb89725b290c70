//! Conjugate-gradient solver for the projection subproblem
//!
//! ```text
//!     min_X  nu/2 ||O - U X V^T||^2  +  lambda/2 ||X||^2
//! ```
//!
//! whose normal equation is `nu U^T U X V^T V + lambda X = nu U^T O V`.
//! The iteration works directly on `r x r` matrices; the Gram matrices
//! `U^T U` and `V^T V` are formed once, so each step costs `O(r^3)`
//! regardless of how tall `U` and `V` are.

use crate::error::{Error, Result};
use crate::linalg::{frob_dot, frob_norm_sq, gram, Matrix};
use ndarray::Array2;

/// One ridge-regularized bilinear least-squares problem.
#[derive(Debug, Clone)]
pub struct CgProblem {
    pub o: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub nu: f64,
    pub lambda: f64,
}

impl CgProblem {
    pub fn new(o: Matrix, u: Matrix, v: Matrix, nu: f64, lambda: f64) -> Result<Self> {
        if o.nrows() != u.nrows() || o.ncols() != v.nrows() {
            return Err(Error::Dimension(format!(
                "target is {}x{} but the factors are {}x{} and {}x{}",
                o.nrows(),
                o.ncols(),
                u.nrows(),
                u.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        if u.ncols() != v.ncols() {
            return Err(Error::Dimension(format!(
                "factor column counts differ: {} vs {}",
                u.ncols(),
                v.ncols()
            )));
        }
        if !(nu >= 0.0 && lambda >= 0.0) {
            return Err(Error::InvalidParam(
                "cg weights must be nonnegative".into(),
            ));
        }
        if nu + lambda <= 0.0 {
            return Err(Error::InvalidParam(
                "cg problem is ill-posed with nu = lambda = 0".into(),
            ));
        }
        Ok(CgProblem { o, u, v, nu, lambda })
    }
}

/// Approximate minimizer, starting from `X = 0` and stopping once the
/// squared residual norm drops below `rel_tol` times its initial value
/// (or after `max_iter` steps).
pub fn cg_solve(p: &CgProblem, rel_tol: f64, max_iter: usize) -> Matrix {
    cg_solve_with_history(p, rel_tol, max_iter).0
}

/// As [`cg_solve`], also returning the squared residual norm after every
/// iteration (starting with the initial one).
pub fn cg_solve_with_history(p: &CgProblem, rel_tol: f64, max_iter: usize) -> (Matrix, Vec<f64>) {
    let r = p.u.ncols();
    let ug = gram(&p.u);
    let vg = gram(&p.v);
    let apply = |x: &Matrix| -> Matrix {
        let mut out = ug.dot(x).dot(&vg);
        out.mapv_inplace(|v| v * p.nu);
        out + &(x * p.lambda)
    };

    let mut rhs = p.u.t().dot(&p.o).dot(&p.v);
    rhs.mapv_inplace(|v| v * p.nu);

    let mut x: Matrix = Array2::zeros((r, r));
    let mut res = rhs;
    let mut res_sq = frob_norm_sq(&res);
    let mut history = vec![res_sq];
    if res_sq == 0.0 {
        return (x, history);
    }
    let threshold = rel_tol * res_sq;
    let mut dir = res.clone();

    for _ in 0..max_iter {
        if res_sq <= threshold {
            break;
        }
        let a_dir = apply(&dir);
        let denom = frob_dot(&dir, &a_dir);
        if denom <= 0.0 {
            break;
        }
        let step = res_sq / denom;
        x = x + &(&dir * step);
        res = res - &(&a_dir * step);
        let next_sq = frob_norm_sq(&res);
        history.push(next_sq);
        let ratio = next_sq / res_sq;
        dir = &res + &(&dir * ratio);
        res_sq = next_sq;
    }
    (x, history)
}
