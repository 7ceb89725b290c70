//! Small dense linear-algebra helpers.
//!
//! Every linear system in this crate is `r x r` with `r` in the single
//! digits, so plain Gaussian elimination with partial pivoting is all we
//! need. Near-singular systems get a diagonal jitter instead of failing:
//! ALS Gram matrices collapse to rank-deficient when factor columns do.

use ndarray::Array2;

pub type Matrix = Array2<f64>;

/// `A^T A` of a tall factor matrix.
pub fn gram(a: &Matrix) -> Matrix {
    a.t().dot(a)
}

/// Elementwise (Hadamard) product.
pub fn hadamard(a: &Matrix, b: &Matrix) -> Matrix {
    a * b
}

pub fn frob_norm(a: &Matrix) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn frob_norm_sq(a: &Matrix) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>()
}

/// Frobenius inner product `<a, b>`.
pub fn frob_dot(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>()
}

pub fn identity(n: usize) -> Matrix {
    Array2::eye(n)
}

/// Solve `X * A = B` for `X`, where `A` is a small square matrix.
///
/// When elimination hits a pivot that is effectively zero, the solve is
/// retried on `A + eps*I` with `eps = 1e-10 * trace(A)/n` (escalated until
/// the factorization goes through), so callers never see a hard failure.
pub fn solve_right(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "system matrix must be square");
    assert_eq!(b.ncols(), n, "rhs column count must match system size");

    if let Some(x) = try_solve_right(a, b) {
        return x;
    }

    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let trace: f64 = a.diag().sum();
    let mut eps = 1e-10 * trace / n as f64;
    if !(eps > 0.0) {
        eps = 1e-12 * (1.0 + amax);
    }
    loop {
        let jittered = a + &(identity(n) * eps);
        if let Some(x) = try_solve_right(&jittered, b) {
            return x;
        }
        eps *= 100.0;
        // once eps dominates every entry the matrix is diagonally
        // dominant and elimination cannot fail
        assert!(eps.is_finite(), "jitter escalation overflowed");
    }
}

/// One attempt at `X * A = B` via LU with partial pivoting.
/// Returns `None` on an effectively-zero pivot.
fn try_solve_right(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = a.nrows();
    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pivot_tol = 1e-13 * (1.0 + amax);

    // work on A^T so that X * A = B becomes A^T X^T = B^T
    let mut lu = a.t().to_owned();
    let mut rhs = b.t().to_owned();

    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, lu[[r, col]].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_val <= pivot_tol {
            return None;
        }
        if piv_row != col {
            for j in 0..n {
                lu.swap([col, j], [piv_row, j]);
            }
            for j in 0..rhs.ncols() {
                rhs.swap([col, j], [piv_row, j]);
            }
        }
        let pivot = lu[[col, col]];
        for r in col + 1..n {
            let f = lu[[r, col]] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                lu[[r, j]] -= f * lu[[col, j]];
            }
            for j in 0..rhs.ncols() {
                rhs[[r, j]] -= f * rhs[[col, j]];
            }
        }
    }

    // back substitution
    for col in (0..n).rev() {
        for j in 0..rhs.ncols() {
            let mut v = rhs[[col, j]];
            for k in col + 1..n {
                v -= lu[[col, k]] * rhs[[k, j]];
            }
            rhs[[col, j]] = v / lu[[col, col]];
        }
    }
    Some(rhs.t().to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solve_right_identity() {
        let a = identity(3);
        let b = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let x = solve_right(&a, &b);
        assert_eq!(x, b);
    }

    #[test]
    fn solve_right_known_system() {
        // X * A = B with A = [[2,1],[1,3]], X = [[1,2]] -> B = [[4,7]]
        let a = array![[2.0, 1.0], [1.0, 3.0]];
        let b = array![[4.0, 7.0]];
        let x = solve_right(&a, &b);
        assert!((x[[0, 0]] - 1.0).abs() < 1e-12);
        assert!((x[[0, 1]] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn solve_right_needs_pivoting() {
        // zero leading entry forces a row swap inside the elimination
        let a = array![[0.0, 1.0], [1.0, 0.0]];
        let b = array![[3.0, 5.0]];
        let x = solve_right(&a, &b);
        // X * A = [x1, x0] = [3, 5] -> X = [5, 3]
        assert!((x[[0, 0]] - 5.0).abs() < 1e-12);
        assert!((x[[0, 1]] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_resolves_via_jitter() {
        let a = array![[1.0, 1.0], [1.0, 1.0]];
        let b = array![[2.0, 2.0]];
        let x = solve_right(&a, &b);
        assert!(x.iter().all(|v| v.is_finite()));
        // jittered solution still nearly satisfies the (consistent) system
        let back = x.dot(&a);
        assert!((back[[0, 0]] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn zero_system_zero_rhs_gives_zeros() {
        let a = Array2::zeros((2, 2));
        let b = Array2::zeros((1, 2));
        let x = solve_right(&a, &b);
        assert!(x.iter().all(|v| *v == 0.0));
    }
}
