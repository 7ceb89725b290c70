//! Shared test oracles, kept deliberately independent of the library's
//! computation paths: everything here is plain elementwise arithmetic.

#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use tritensor::tensor::{FactorSet, Tensor3};
use tritensor::Matrix;

/// Khatri-Rao built by its definition, entry by entry
/// (second argument's row index fastest).
pub fn kr_oracle(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q, r) = (a.nrows(), b.nrows(), a.ncols());
    let mut out = Array2::zeros((p * q, r));
    for l in 0..r {
        for i in 0..p {
            for j in 0..q {
                out[[i * q + j, l]] = a[[i, l]] * b[[j, l]];
            }
        }
    }
    out
}

/// Dense Gaussian elimination with partial pivoting on a flat
/// row-major system; solves `A x = b` in place.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) {
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
            .unwrap();
        if piv != c {
            for j in 0..n {
                a.swap(c * n + j, piv * n + j);
            }
            b.swap(c, piv);
        }
        for r in c + 1..n {
            let f = a[r * n + c] / a[c * n + c];
            for j in c..n {
                a[r * n + j] -= f * a[c * n + j];
            }
            b[r] -= f * b[c];
        }
    }
    for c in (0..n).rev() {
        for j in c + 1..n {
            b[c] -= a[c * n + j] * b[j];
        }
        b[c] /= a[c * n + c];
    }
}

/// Oracle for the CG subproblem via the vectorized normal equation
/// `(nu V^T V (x) U^T U + lambda I) vec(X) = nu vec(U^T O V)`,
/// solved densely (column-major vec).
pub fn cg_oracle(o: &Matrix, u: &Matrix, v: &Matrix, nu: f64, lambda: f64) -> Matrix {
    let r = u.ncols();
    let ug = u.t().dot(u);
    let vg = v.t().dot(v);
    let rr = r * r;
    let mut a = vec![0.0f64; rr * rr];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let row = i + r * j;
                    let col = k + r * l;
                    a[row * rr + col] = nu * ug[[i, k]] * vg[[l, j]];
                }
            }
        }
    }
    for d in 0..rr {
        a[d * rr + d] += lambda;
    }
    let rhs = u.t().dot(o).dot(v);
    let mut b = vec![0.0f64; rr];
    for j in 0..r {
        for i in 0..r {
            b[i + r * j] = nu * rhs[[i, j]];
        }
    }
    solve_dense(&mut a, &mut b, rr);
    Array2::from_shape_fn((r, r), |(i, j)| b[i + r * j])
}

/// Matrix with columns orthogonalized (Gram-Schmidt) and rescaled to
/// norms in `[lo, hi]`; keeps Gram matrices well conditioned.
pub fn conditioned_factor(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Matrix {
    let mut m = Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() - 0.5);
    for c in 0..cols {
        for prev in 0..c {
            let dot: f64 = (0..rows).map(|i| m[[i, c]] * m[[i, prev]]).sum();
            for i in 0..rows {
                let sub = dot * m[[i, prev]];
                m[[i, c]] -= sub;
            }
        }
        let norm: f64 = (0..rows).map(|i| m[[i, c]] * m[[i, c]]).sum::<f64>().sqrt();
        let scale = (lo + (hi - lo) * rng.random::<f64>()) / norm.max(1e-12);
        for i in 0..rows {
            m[[i, c]] *= scale;
        }
    }
    m
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn frob(m: &Matrix) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Reconstruction by the elementwise sum, no library helpers.
pub fn reconstruct_oracle(fs: &FactorSet) -> Tensor3 {
    let (m, n, t) = fs.dims();
    let r = fs.rank();
    let mut out = Tensor3::zeros((m, n, t));
    for i in 0..m {
        for j in 0..n {
            for k in 0..t {
                let mut v = 0.0;
                for l in 0..r {
                    v += fs.mode1[[i, l]] * fs.mode2[[j, l]] * fs.mode3[[k, l]];
                }
                out.set(i, j, k, v);
            }
        }
    }
    out
}

/// Gradients of the full constrained objective, all elementwise.
pub struct ObjectiveGradients {
    pub mode1: Matrix,
    pub mode2: Matrix,
    pub mode3: Matrix,
    pub m1: Matrix,
    pub m2: Matrix,
}

pub fn objective_gradients_oracle(
    x: &Tensor3,
    fs: &FactorSet,
    m1: &Matrix,
    m2: &Matrix,
    s_m: &Matrix,
    s_n: &Matrix,
    alpha: f64,
    beta: f64,
    lambda: f64,
) -> ObjectiveGradients {
    let (m, n, t) = x.dims();
    let r = fs.rank();
    let recon = reconstruct_oracle(fs);

    let mut g1 = Array2::zeros((m, r));
    let mut g2 = Array2::zeros((n, r));
    let mut g3 = Array2::zeros((t, r));
    for i in 0..m {
        for j in 0..n {
            for k in 0..t {
                let e = x.get(i, j, k) - recon.get(i, j, k);
                for l in 0..r {
                    g1[[i, l]] -= e * fs.mode2[[j, l]] * fs.mode3[[k, l]];
                    g2[[j, l]] -= e * fs.mode1[[i, l]] * fs.mode3[[k, l]];
                    g3[[k, l]] -= e * fs.mode1[[i, l]] * fs.mode2[[j, l]];
                }
            }
        }
    }

    // relational residuals E = S - U M U^T
    let bilinear = |u: &Matrix, mm: &Matrix, i: usize, j: usize| -> f64 {
        let mut v = 0.0;
        for a in 0..r {
            for b in 0..r {
                v += u[[i, a]] * mm[[a, b]] * u[[j, b]];
            }
        }
        v
    };
    let mut gm1 = m1 * lambda;
    for i in 0..m {
        for j in 0..m {
            let e = s_m[[i, j]] - bilinear(&fs.mode1, m1, i, j);
            for a in 0..r {
                for b in 0..r {
                    gm1[[a, b]] -= alpha * fs.mode1[[i, a]] * e * fs.mode1[[j, b]];
                }
                // dE/dU1[i,a] terms: -(e * (M U^T)_{a j}) and the transposed path
                g1[[i, a]] -= alpha
                    * e
                    * (0..r).map(|b| m1[[a, b]] * fs.mode1[[j, b]]).sum::<f64>();
                g1[[j, a]] -= alpha
                    * e
                    * (0..r).map(|b| fs.mode1[[i, b]] * m1[[b, a]]).sum::<f64>();
            }
        }
    }
    let mut gm2 = m2 * lambda;
    for i in 0..n {
        for j in 0..n {
            let e = s_n[[i, j]] - bilinear(&fs.mode2, m2, i, j);
            for a in 0..r {
                for b in 0..r {
                    gm2[[a, b]] -= beta * fs.mode2[[i, a]] * e * fs.mode2[[j, b]];
                }
                g2[[i, a]] -= beta
                    * e
                    * (0..r).map(|b| m2[[a, b]] * fs.mode2[[j, b]]).sum::<f64>();
                g2[[j, a]] -= beta
                    * e
                    * (0..r).map(|b| fs.mode2[[i, b]] * m2[[b, a]]).sum::<f64>();
            }
        }
    }

    ObjectiveGradients {
        mode1: g1,
        mode2: g2,
        mode3: g3,
        m1: gm1,
        m2: gm2,
    }
}

// ---- brute-force metric oracles ----

pub fn auc_brute(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Average precision as the threshold-sweep integral
/// `sum over distinct thresholds of dRecall * precision`, counting by
/// full scans at every threshold.
pub fn aupr_brute(pos: &[f64], neg: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = pos.iter().chain(neg.iter()).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let p = pos.len() as f64;
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &t in &thresholds {
        let tp = pos.iter().filter(|&&s| s >= t).count() as f64;
        let fp = neg.iter().filter(|&&s| s >= t).count() as f64;
        let precision = tp / (tp + fp);
        let recall = tp / p;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    ap
}

pub fn best_f1_brute(pos: &[f64], neg: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = pos.iter().chain(neg.iter()).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut best = 0.0f64;
    for &t in &thresholds {
        let tp = pos.iter().filter(|&&s| s >= t).count();
        let fp = neg.iter().filter(|&&s| s >= t).count();
        let fneg = pos.len() - tp;
        let f1 = if 2 * tp + fp + fneg > 0 {
            2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
        } else {
            0.0
        };
        best = best.max(f1);
    }
    best
}
