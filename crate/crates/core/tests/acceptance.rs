//! Acceptance suite: one test per criterion, each printing a pass line
//! (run with `--nocapture` to see them). Expected values come from the
//! independent oracles in `common`, never from the code under test.

mod common;

use common::*;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tritensor::data::{Dataset, PairKey, TripletKey};
use tritensor::eval::{auc, aupr, best_f1, rank_for_disease, top1_metrics};
use tritensor::experiment::{run_cv_triplet, run_cv_type, FitMethod};
use tritensor::io::load_triplets;
use tritensor::sim::{
    build_similarity_matrices, disease_similarity, mirna_similarity, semantic_value, DiseaseDag,
    SimParams,
};
use tritensor::solver::{
    admm_update_mode1, admm_update_mode2, cg_solve_with_history, cp_als_fit, tdrc_fit,
    update_mode3_factor, CgProblem, Hyperparams, TdrcState,
};
use tritensor::synth;
use tritensor::tensor::{khatri_rao, FactorSet, Mode, Tensor3};
use tritensor::Matrix;

fn pass(criterion: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_s,
        "{criterion}: took {elapsed:.2}s, budget {budget_s}s"
    );
    println!("{criterion}: PASS ({elapsed:.2}s)");
}

fn random_tensor(dims: (usize, usize, usize), rng: &mut impl Rng) -> Tensor3 {
    let vals = (0..dims.0 * dims.1 * dims.2)
        .map(|_| rng.random::<f64>() - 0.5)
        .collect();
    Tensor3::from_vec(dims, vals).unwrap()
}

#[test]
fn criterion_1_algebra_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let m = 2 + (rng.random::<u64>() % 5) as usize;
        let n = 2 + (rng.random::<u64>() % 5) as usize;
        let t = 2 + (rng.random::<u64>() % 4) as usize;
        let r = 1 + (rng.random::<u64>() % 3) as usize;

        // Khatri-Rao Gram identity
        let a = Array2::from_shape_fn((m, r), |_| rng.random::<f64>() - 0.5);
        let b = Array2::from_shape_fn((n, r), |_| rng.random::<f64>() - 0.5);
        let kr = khatri_rao(&a, &b).unwrap();
        let lhs = kr.t().dot(&kr);
        let rhs = &a.t().dot(&a) * &b.t().dot(&b);
        assert!(max_abs(&(&lhs - &rhs)) < 1e-10, "gram identity");

        // unfolding round-trips are exact
        let x = random_tensor((m, n, t), &mut rng);
        for mode in Mode::ALL {
            let back = Tensor3::refold(&x.matricize(mode), mode, (m, n, t)).unwrap();
            assert_eq!(back, x, "refold round-trip");
        }

        // reconstruction consistency across all three modes
        let fs = FactorSet::random((m, n, t), r, &mut rng);
        let recon = fs.reconstruct();
        let elementwise = reconstruct_oracle(&fs);
        for (u, v) in recon.values().iter().zip(elementwise.values().iter()) {
            assert!((u - v).abs() < 1e-10);
        }
        let pairs = [
            (Mode::One, kr_oracle(&fs.mode3, &fs.mode2), &fs.mode1),
            (Mode::Two, kr_oracle(&fs.mode3, &fs.mode1), &fs.mode2),
            (Mode::Three, kr_oracle(&fs.mode2, &fs.mode1), &fs.mode3),
        ];
        for (mode, kr, factor) in pairs {
            let lhs = recon.matricize(mode);
            let rhs = factor.dot(&kr.t());
            assert!(max_abs(&(&lhs - &rhs)) < 1e-10, "mode consistency");
        }
    }
    pass("criterion 1 (algebra suite)", started, 1.0);
}

#[test]
fn criterion_2_cg_oracle_equivalence() {
    let started = Instant::now();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let p = 5 + (rng.random::<u64>() % 16) as usize; // <= 20
        let q = 5 + (rng.random::<u64>() % 16) as usize;
        let r = 2 + (rng.random::<u64>() % 3) as usize; // <= 4
        let u = conditioned_factor(p, r, 0.8, 1.2, &mut rng);
        let v = conditioned_factor(q, r, 0.8, 1.2, &mut rng);
        let o = Array2::from_shape_fn((p, q), |_| rng.random::<f64>() - 0.5);
        let nu = 0.5 + rng.random::<f64>();
        let lambda = 0.05 + 0.1 * rng.random::<f64>();

        let cg_tol = 1e-20;
        let prob = CgProblem::new(o.clone(), u.clone(), v.clone(), nu, lambda).unwrap();
        let (x, hist) = cg_solve_with_history(&prob, cg_tol, 500);

        let oracle = cg_oracle(&o, &u, &v, nu, lambda);
        let rel = frob(&(&x - &oracle)) / frob(&oracle).max(1e-300);
        assert!(rel < 1e-8, "seed {seed}: rel error {rel:.3e}");

        let threshold = cg_tol * hist[0];
        for w in hist.windows(2) {
            if w[0] > threshold {
                assert!(
                    w[1] < w[0],
                    "seed {seed}: residual rose {:.6e} -> {:.6e}",
                    w[0],
                    w[1]
                );
            }
        }
    }
    pass("criterion 2 (cg oracle equivalence)", started, 5.0);
}

#[test]
fn criterion_3_stationarity_suite() {
    let started = Instant::now();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let (m, n, t) = (
            4 + (rng.random::<u64>() % 5) as usize,
            4 + (rng.random::<u64>() % 4) as usize,
            2 + (rng.random::<u64>() % 3) as usize,
        );
        let r = 2 + (rng.random::<u64>() % 2) as usize;
        let x = random_tensor((m, n, t), &mut rng);
        let fs = FactorSet::random((m, n, t), r, &mut rng);
        let s_m = synth::similarity_from_factor(&Array2::from_shape_fn((m, r), |_| {
            rng.random::<f64>()
        }));
        let s_n = synth::similarity_from_factor(&Array2::from_shape_fn((n, r), |_| {
            rng.random::<f64>()
        }));
        let hp = Hyperparams {
            rank: r,
            alpha: 0.3 + rng.random::<f64>(),
            beta: 0.2 + rng.random::<f64>(),
            lambda: 0.05,
            seed: 4000 + seed,
            ..Default::default()
        };

        // mode-3 closed form zeroes its least-squares gradient
        let x3 = x.matricize(Mode::Three);
        let f_new = update_mode3_factor(&x3, &fs);
        let h = kr_oracle(&fs.mode2, &fs.mode1);
        let grad_f = -(&(&x3 - &f_new.dot(&h.t())).dot(&h));
        assert!(
            frob(&grad_f) < 1e-6 * (1.0 + frob(&f_new)),
            "seed {seed}: mode-3 gradient {}",
            frob(&grad_f)
        );

        // one ADMM sweep per side; check both solved lines
        let mut state = TdrcState::init((m, n, t), &hp);
        state.m1 = Array2::from_shape_fn((r, r), |_| rng.random::<f64>() - 0.5);
        state.m2 = Array2::from_shape_fn((r, r), |_| rng.random::<f64>() - 0.5);
        state.y1 = Array2::from_shape_fn((m, r), |_| 0.1 * (rng.random::<f64>() - 0.5));
        state.y2 = Array2::from_shape_fn((n, r), |_| 0.1 * (rng.random::<f64>() - 0.5));
        let before = state.clone();
        let x1 = x.matricize(Mode::One);
        let x2 = x.matricize(Mode::Two);
        admm_update_mode1(&mut state, &x1, &s_m, &hp);
        admm_update_mode2(&mut state, &x2, &s_n, &hp);

        // J line: a = U M; grad = w (J a'a - S a) - Y - rho (U - J)
        for (weight, sim, j_new, factor_old, proj, y_old, rho_old) in [
            (hp.alpha, &s_m, &state.j1, &before.factors.mode1, &before.m1, &before.y1, before.rho1),
            (hp.beta, &s_n, &state.j2, &before.factors.mode2, &before.m2, &before.y2, before.rho2),
        ] {
            let a = factor_old.dot(proj);
            let grad = &(&j_new.dot(&a.t().dot(&a)) - &sim.dot(&a)) * weight
                - y_old
                - &(&(factor_old - j_new) * rho_old);
            assert!(
                frob(&grad) < 1e-6 * (1.0 + frob(j_new)),
                "seed {seed}: auxiliary-line gradient {}",
                frob(&grad)
            );
        }

        // factor line: grad = U (G'G + w QQ' + rho I) - (X G + w S Q' + rho J - Y)
        // (the mode-2 sweep runs after mode-1, so its pairing sees the
        // freshly updated mode-1 factor)
        let g1 = kr_oracle(&before.factors.mode3, &before.factors.mode2);
        let g2 = kr_oracle(&state.factors.mode3, &state.factors.mode1);
        for (weight, sim, x_unf, kr, factor_new, j_new, proj, y_old, rho_old) in [
            (hp.alpha, &s_m, &x1, &g1, &state.factors.mode1, &state.j1, &before.m1, &before.y1, before.rho1),
            (hp.beta, &s_n, &x2, &g2, &state.factors.mode2, &state.j2, &before.m2, &before.y2, before.rho2),
        ] {
            let q = proj.dot(&j_new.t());
            let eye: Matrix = Array2::eye(r);
            let sys = kr.t().dot(kr) + &(&q.dot(&q.t()) * weight) + &(&eye * rho_old);
            let rhs = x_unf.dot(kr) + &(&sim.dot(&q.t()) * weight) + &(&(j_new * rho_old) - y_old);
            let grad = &factor_new.dot(&sys) - &rhs;
            assert!(
                frob(&grad) < 1e-6 * (1.0 + frob(factor_new)),
                "seed {seed}: factor-line gradient {}",
                frob(&grad)
            );
        }

        // analytic gradients of the full objective vs central differences
        let m1 = Array2::from_shape_fn((r, r), |_| rng.random::<f64>() - 0.5);
        let m2 = Array2::from_shape_fn((r, r), |_| rng.random::<f64>() - 0.5);
        let grads = objective_gradients_oracle(
            &x, &fs, &m1, &m2, &s_m, &s_n, hp.alpha, hp.beta, hp.lambda,
        );
        let objective = |fs: &FactorSet, m1: &Matrix, m2: &Matrix| -> f64 {
            tritensor::solver::objective_value(&x, fs, m1, m2, &s_m, &s_n, &hp)
        };
        let h_step = 1e-5;
        let check_block = |analytic: &Matrix, perturb: &mut dyn FnMut(usize, usize, f64) -> f64| {
            let mut numeric = Array2::zeros(analytic.dim());
            for i in 0..analytic.nrows() {
                for j in 0..analytic.ncols() {
                    let up = perturb(i, j, h_step);
                    let down = perturb(i, j, -h_step);
                    numeric[[i, j]] = (up - down) / (2.0 * h_step);
                }
            }
            let denom = frob(analytic).max(frob(&numeric)).max(1e-12);
            let rel = frob(&(analytic - &numeric)) / denom;
            assert!(rel < 1e-5, "seed {seed}: finite-difference mismatch {rel:.3e}");
        };
        check_block(&grads.mode1, &mut |i, j, h| {
            let mut p = fs.clone();
            p.mode1[[i, j]] += h;
            objective(&p, &m1, &m2)
        });
        check_block(&grads.mode2, &mut |i, j, h| {
            let mut p = fs.clone();
            p.mode2[[i, j]] += h;
            objective(&p, &m1, &m2)
        });
        check_block(&grads.mode3, &mut |i, j, h| {
            let mut p = fs.clone();
            p.mode3[[i, j]] += h;
            objective(&p, &m1, &m2)
        });
        check_block(&grads.m1, &mut |i, j, h| {
            let mut p = m1.clone();
            p[[i, j]] += h;
            objective(&fs, &p, &m2)
        });
        check_block(&grads.m2, &mut |i, j, h| {
            let mut p = m2.clone();
            p[[i, j]] += h;
            objective(&fs, &m1, &p)
        });
    }
    pass("criterion 3 (stationarity suite)", started, 10.0);
}

#[test]
fn criterion_4_cp_recovery() {
    let started = Instant::now();
    let (x, _) = synth::low_rank_tensor((30, 20, 4), 3, 77);
    let norm = x.frobenius_norm();
    let mut best = f64::INFINITY;
    for seed in 0..5 {
        let fit = cp_als_fit(&x, 3, 1e-10, 500, seed).unwrap();
        for w in fit.history.windows(2) {
            assert!(
                w[1].residual <= w[0].residual + 1e-10,
                "als residual rose: {} -> {}",
                w[0].residual,
                w[1].residual
            );
        }
        best = best.min(fit.final_residual() / norm);
    }
    assert!(best < 1e-3, "best relative residual {best:.3e}");
    pass("criterion 4 (cp recovery)", started, 10.0);
}

/// Reference objective recorded from the first converged run of this
/// exact instance (seed 2024 generator, seed 7 fit); pins the solver
/// against regressions.
const TDRC_REFERENCE_OBJECTIVE: f64 = 1.04030197427668938e1;

#[test]
fn criterion_5_tdrc_convergence() {
    let started = Instant::now();
    let dims = (30, 20, 4);
    let truth = synth::factors(dims, 3, 2024);
    let x = truth.reconstruct();
    let s_m = synth::similarity_from_factor(&truth.mode1);
    let s_n = synth::similarity_from_factor(&truth.mode2);
    let hp = Hyperparams {
        rank: 3,
        seed: 7,
        ..Default::default()
    };
    let fit = tdrc_fit(&x, &s_m, &s_n, &hp).unwrap();
    let last = fit.history.last().unwrap();
    assert!(
        last.primal_res1 < 1e-4 && last.primal_res2 < 1e-4,
        "primal residuals {:.3e} / {:.3e}",
        last.primal_res1,
        last.primal_res2
    );
    println!("tdrc reference objective observed: {:.17e}", last.objective);
    let rel = (last.objective - TDRC_REFERENCE_OBJECTIVE).abs()
        / TDRC_REFERENCE_OBJECTIVE.abs().max(1e-300);
    assert!(
        rel < 1e-6,
        "objective {:.17e} deviates from pinned reference {:.17e} (rel {rel:.3e})",
        last.objective,
        TDRC_REFERENCE_OBJECTIVE
    );
    pass("criterion 5 (tdrc convergence)", started, 30.0);
}

#[test]
fn criterion_6_metric_oracles() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..200 {
        let p = 1 + (rng.random::<u64>() % 25) as usize;
        let n = 1 + (rng.random::<u64>() % 25) as usize;
        let quantize = case % 2 == 0;
        let mut draw = |count: usize| -> Vec<f64> {
            (0..count)
                .map(|_| {
                    let v = rng.random::<f64>();
                    if quantize {
                        (v * 10.0).round() / 10.0
                    } else {
                        v
                    }
                })
                .collect()
        };
        let pos = draw(p);
        let neg = draw(n);

        let a = auc(&pos, &neg).unwrap();
        assert!(
            (a - auc_brute(&pos, &neg)).abs() < 1e-12,
            "case {case}: auc {a} vs {}",
            auc_brute(&pos, &neg)
        );
        let ap = aupr(&pos, &neg).unwrap();
        assert!(
            (ap - aupr_brute(&pos, &neg)).abs() < 1e-12,
            "case {case}: aupr {ap} vs {}",
            aupr_brute(&pos, &neg)
        );
        let f = best_f1(&pos, &neg).unwrap();
        assert!(
            (f - best_f1_brute(&pos, &neg)).abs() < 1e-12,
            "case {case}: f1 {f} vs {}",
            best_f1_brute(&pos, &neg)
        );

        // monotone-transform invariance, exact
        let pos2: Vec<f64> = pos.iter().map(|s| 2.0 * s + 1.0).collect();
        let neg2: Vec<f64> = neg.iter().map(|s| 2.0 * s + 1.0).collect();
        assert_eq!(a, auc(&pos2, &neg2).unwrap(), "case {case}: auc transform");
    }

    // top-1 metrics against a direct argmax count
    for case in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + case);
        let (m, n, t) = (6, 5, 4);
        let mut scores = Tensor3::zeros((m, n, t));
        for k in 0..t {
            for j in 0..n {
                for i in 0..m {
                    scores.set(i, j, k, ((rng.random::<f64>() * 5.0) as u32) as f64);
                }
            }
        }
        let mut truth = std::collections::BTreeSet::new();
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if rng.random::<f64>() < 0.4 {
                    pairs.push(PairKey { mirna: i, disease: j });
                    let count = 1 + (rng.random::<u64>() % 3) as usize;
                    let mut types: Vec<usize> = (0..t).collect();
                    for _ in 0..count {
                        let pick = rng.random_range(0..types.len());
                        truth.insert(TripletKey { mirna: i, disease: j, ty: types.remove(pick) });
                    }
                }
            }
        }
        if pairs.is_empty() {
            continue;
        }
        let got = top1_metrics(&scores, &pairs, &truth).unwrap();
        let mut hits = 0usize;
        let mut total_types = 0usize;
        for pr in &pairs {
            let mut best_ty = 0usize;
            let mut best_v = f64::NEG_INFINITY;
            for k in 0..t {
                let v = scores.get(pr.mirna, pr.disease, k);
                if v > best_v {
                    best_v = v;
                    best_ty = k;
                }
            }
            let true_types: Vec<usize> = (0..t)
                .filter(|&k| truth.contains(&TripletKey { mirna: pr.mirna, disease: pr.disease, ty: k }))
                .collect();
            total_types += true_types.len();
            if true_types.contains(&best_ty) {
                hits += 1;
            }
        }
        assert_eq!(got.hits, hits, "case {case}");
        assert!((got.precision - hits as f64 / pairs.len() as f64).abs() < 1e-12);
        assert!((got.recall - hits as f64 / total_types as f64).abs() < 1e-12);
    }
    pass("criterion 6 (metric oracles)", started, 10.0);
}

#[test]
fn criterion_7_similarity_axioms() {
    let started = Instant::now();
    let params = SimParams::default();

    // hand-derived constants on the toy hierarchies
    let siblings = DiseaseDag::from_edges(&["A", "B", "C"], &[("B", "A"), ("C", "A")]).unwrap();
    let s = disease_similarity(&siblings, "B", "C", params).unwrap();
    assert!((s - 1.0 / 3.0).abs() < 1e-12);
    let chain =
        DiseaseDag::from_edges(&["root", "mid", "leaf"], &[("leaf", "mid"), ("mid", "root")])
            .unwrap();
    assert!((semantic_value(&chain, "mid", params).unwrap() - 1.5).abs() < 1e-12);
    assert!((semantic_value(&chain, "leaf", params).unwrap() - 1.75).abs() < 1e-12);

    let (ds, _) = Dataset::from_records(vec![
        ("e1", "B", "t"),
        ("e2", "B", "t"),
        ("e2", "C", "t"),
    ])
    .unwrap();
    let (s_m, s_n) = build_similarity_matrices(&ds, &siblings, params).unwrap();
    assert!((mirna_similarity(0, 1, &ds.disease_sets, &s_n) - 7.0 / 9.0).abs() < 1e-12);
    s_m.validate().unwrap();
    s_n.validate().unwrap();

    // randomized hierarchies: invariants hold for every pair
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7700 + seed);
        let n_nodes = 8 + (rng.random::<u64>() % 10) as usize;
        let names: Vec<String> = (0..n_nodes).map(|i| format!("n{i}")).collect();
        let mut edges: Vec<(String, String)> = Vec::new();
        for child in 1..n_nodes {
            let parent_count = 1 + (rng.random::<u64>() % 2) as usize;
            for _ in 0..parent_count {
                let parent = rng.random_range(0..child);
                edges.push((names[child].clone(), names[parent].clone()));
            }
        }
        let dag = DiseaseDag::from_edges(&names, &edges).unwrap();

        let mut records = Vec::new();
        for e in 0..6 {
            let set = 1 + (rng.random::<u64>() % 3) as usize;
            for _ in 0..set {
                let d = rng.random_range(0..n_nodes);
                records.push((format!("e{e}"), names[d].clone(), "t".to_string()));
            }
        }
        let (ds, _) = Dataset::from_records(records).unwrap();
        let (s_m, s_n) = build_similarity_matrices(&ds, &dag, params).unwrap();
        s_m.validate().unwrap();
        s_n.validate().unwrap();
    }
    pass("criterion 7 (similarity axioms)", started, 5.0);
}

/// Advisory reproduction check; runs only when `TRITENSOR_HMDD_DIR`
/// points at a directory with `hmdd2_triplets.tsv` (and optionally a
/// precomputed similarity pair or a `mesh_tree.tsv`).
#[test]
fn criterion_8_paper_reproduction() {
    let started = Instant::now();
    let Ok(dir) = std::env::var("TRITENSOR_HMDD_DIR") else {
        println!("criterion 8 (paper reproduction): SKIPPED (TRITENSOR_HMDD_DIR not set)");
        return;
    };
    let dir = std::path::PathBuf::from(dir);
    let ds = load_triplets(dir.join("hmdd2_triplets.tsv")).expect("triplet export");
    let stats = ds.stats();
    assert_eq!(
        (stats.mirnas, stats.diseases, stats.types, stats.triplets),
        (324, 169, 4, 1492),
        "dataset does not match the published v2.0 counts"
    );
    let dag = tritensor::io::load_dag(dir.join("mesh_tree.tsv")).expect("hierarchy file");
    let (s_m, s_n) = build_similarity_matrices(&ds, &dag, SimParams::default()).unwrap();
    let hp = Hyperparams {
        rank: 4,
        alpha: 0.125,
        beta: 0.25,
        lambda: 0.001,
        seed: 7,
        ..Default::default()
    };
    let type_report = run_cv_type(&ds, &s_m.values, &s_n.values, &hp, 10, 7, FitMethod::Tdrc).unwrap();
    let triplet_report =
        run_cv_triplet(&ds, &s_m.values, &s_n.values, &hp, 10, 7, FitMethod::Tdrc).unwrap();
    println!(
        "criterion 8 observed: top1 precision {:.4}, auc {:.4}",
        type_report.mean.precision, triplet_report.mean.auc
    );
    assert!(
        (type_report.mean.precision - 0.5609).abs() <= 0.05,
        "top-1 precision {:.4} outside 0.5609 +/- 0.05",
        type_report.mean.precision
    );
    assert!(
        (triplet_report.mean.auc - 0.8379).abs() <= 0.05,
        "auc {:.4} outside 0.8379 +/- 0.05",
        triplet_report.mean.auc
    );
    pass("criterion 8 (paper reproduction)", started, 3600.0);
}

#[test]
fn criterion_9_scale_bound() {
    let started = Instant::now();
    let dims = (713, 447, 5);
    let x = synth::random_binary_tensor(dims, 0.0103, 99);
    let s_m = synth::similarity_from_factor(&synth::factors((713, 4, 2), 4, 111).mode1);
    let s_n = synth::similarity_from_factor(&synth::factors((447, 4, 2), 4, 112).mode1);
    let hp = Hyperparams {
        rank: 4,
        seed: 1,
        ..Default::default()
    };
    let fit = tdrc_fit(&x, &s_m, &s_n, &hp).unwrap();
    assert!(!fit.history.is_empty());
    pass("criterion 9 (scale bound)", started, 60.0);
}

/// Not a numbered criterion: predictions surface must agree with the
/// ranking contract end to end (ties, exclusions, truncation).
#[test]
fn ranking_matches_full_sort_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (m, n, t) = (30, 3, 4);
    let mut scores = Tensor3::zeros((m, n, t));
    for k in 0..t {
        for j in 0..n {
            for i in 0..m {
                // coarse grid forces plenty of ties
                scores.set(i, j, k, ((rng.random::<f64>() * 8.0) as u32) as f64 / 8.0);
            }
        }
    }
    let mut known = std::collections::BTreeSet::new();
    for _ in 0..40 {
        known.insert(TripletKey {
            mirna: rng.random_range(0..m),
            disease: rng.random_range(0..n),
            ty: rng.random_range(0..t),
        });
    }
    for disease in 0..n {
        let got = rank_for_disease(&scores, disease, &known, 20);
        // oracle: full sort of every unknown cell
        let mut cells: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..m {
            for k in 0..t {
                if !known.contains(&TripletKey { mirna: i, disease, ty: k }) {
                    cells.push((scores.get(i, disease, k), i, k));
                }
            }
        }
        cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        cells.truncate(20);
        assert_eq!(got.len(), cells.len());
        for (g, o) in got.iter().zip(cells.iter()) {
            assert_eq!((g.mirna, g.ty, g.score), (o.1, o.2, o.0));
        }
    }
    pass("ranking full-sort oracle", started, 5.0);
}
