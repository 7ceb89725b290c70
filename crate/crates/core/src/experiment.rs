//! Reproducible cross-validation experiments: fold construction,
//! per-fold fitting and metric aggregation. Folds run in parallel over
//! read-only inputs; results are assembled in fold order regardless of
//! completion order.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::{
    auc, aupr, best_f1, split_cv_triplet, split_cv_type, top1_metrics, triplets_of_pairs,
    Top1Metrics,
};
use crate::linalg::Matrix;
use crate::solver::{cp_als_fit, predict_scores, tdrc_fit, Hyperparams};
use crate::tensor::{FactorSet, Tensor3};
use rayon::prelude::*;

/// Which solver an experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Tdrc,
    CpAls,
}

fn fit_factors(
    x: &Tensor3,
    s_m: &Matrix,
    s_n: &Matrix,
    hp: &Hyperparams,
    method: FitMethod,
) -> Result<FactorSet> {
    match method {
        FitMethod::Tdrc => Ok(tdrc_fit(x, s_m, s_n, hp)?.factors),
        FitMethod::CpAls => Ok(cp_als_fit(x, hp.rank, hp.tol, hp.max_iter, hp.seed)?.factors),
    }
}

/// Pair-level cross-validation report.
#[derive(Debug, Clone)]
pub struct CvTypeReport {
    pub per_fold: Vec<Top1Metrics>,
    /// Unweighted mean of the per-fold metrics.
    pub mean: Top1Metrics,
    /// Metrics over the pooled hit counts of all folds.
    pub pooled: Top1Metrics,
}

fn top1_from_counts(hits: usize, pairs: usize, triplets: usize) -> Top1Metrics {
    let precision = hits as f64 / pairs as f64;
    let recall = hits as f64 / triplets as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Top1Metrics {
        precision,
        recall,
        f1,
        hits,
        pairs,
        triplets,
    }
}

/// Run the pair-masking protocol: every type of a held-out pair is
/// removed from training, then the top-scoring type per pair is judged
/// against the full known triplet set.
pub fn run_cv_type(
    ds: &Dataset,
    s_m: &Matrix,
    s_n: &Matrix,
    hp: &Hyperparams,
    k: usize,
    seed: u64,
    method: FitMethod,
) -> Result<CvTypeReport> {
    let plan = split_cv_type(ds, k, seed)?;
    let per_fold: Vec<Top1Metrics> = (0..k)
        .into_par_iter()
        .map(|f| {
            let test_pairs = plan.fold(f);
            let mask = triplets_of_pairs(ds, &test_pairs);
            let train = ds.tensor_excluding(&mask);
            let factors = fit_factors(&train, s_m, s_n, hp, method)?;
            let scores = predict_scores(&factors);
            top1_metrics(&scores, &test_pairs, &ds.triplets)
        })
        .collect::<Result<_>>()?;

    let kf = k as f64;
    let mut mean = top1_from_counts(
        per_fold.iter().map(|m| m.hits).sum(),
        per_fold.iter().map(|m| m.pairs).sum(),
        per_fold.iter().map(|m| m.triplets).sum(),
    );
    let pooled = mean;
    mean.precision = per_fold.iter().map(|m| m.precision).sum::<f64>() / kf;
    mean.recall = per_fold.iter().map(|m| m.recall).sum::<f64>() / kf;
    mean.f1 = per_fold.iter().map(|m| m.f1).sum::<f64>() / kf;

    Ok(CvTypeReport {
        per_fold,
        mean,
        pooled,
    })
}

/// Triplet-level scores for one fold (or an aggregate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletMetrics {
    pub aupr: f64,
    pub auc: f64,
    pub f1: f64,
}

/// Triplet-level cross-validation report.
#[derive(Debug, Clone)]
pub struct CvTripletReport {
    pub per_fold: Vec<TripletMetrics>,
    /// Unweighted mean of the per-fold metrics.
    pub mean: TripletMetrics,
    /// Metrics over the pooled positive/negative scores of all folds.
    pub pooled: TripletMetrics,
}

/// Run the triplet-masking protocol: held-out triplets are scored
/// against an equal-sized sample of unknown cells.
pub fn run_cv_triplet(
    ds: &Dataset,
    s_m: &Matrix,
    s_n: &Matrix,
    hp: &Hyperparams,
    k: usize,
    seed: u64,
    method: FitMethod,
) -> Result<CvTripletReport> {
    let cv = split_cv_triplet(ds, k, seed)?;
    let fold_scores: Vec<(Vec<f64>, Vec<f64>)> = (0..k)
        .into_par_iter()
        .map(|f| {
            let test = cv.plan.fold(f);
            let mask: std::collections::BTreeSet<_> = test.iter().copied().collect();
            let train = ds.tensor_excluding(&mask);
            let factors = fit_factors(&train, s_m, s_n, hp, method)?;
            let scores = predict_scores(&factors);
            let pos: Vec<f64> = test
                .iter()
                .map(|t| scores.get(t.mirna, t.disease, t.ty))
                .collect();
            let neg: Vec<f64> = cv.negatives[f]
                .iter()
                .map(|t| scores.get(t.mirna, t.disease, t.ty))
                .collect();
            Ok((pos, neg))
        })
        .collect::<Result<_>>()?;

    let per_fold: Vec<TripletMetrics> = fold_scores
        .iter()
        .map(|(pos, neg)| {
            Ok(TripletMetrics {
                aupr: aupr(pos, neg)?,
                auc: auc(pos, neg)?,
                f1: best_f1(pos, neg)?,
            })
        })
        .collect::<Result<_>>()?;

    let kf = k as f64;
    let mean = TripletMetrics {
        aupr: per_fold.iter().map(|m| m.aupr).sum::<f64>() / kf,
        auc: per_fold.iter().map(|m| m.auc).sum::<f64>() / kf,
        f1: per_fold.iter().map(|m| m.f1).sum::<f64>() / kf,
    };
    let all_pos: Vec<f64> = fold_scores.iter().flat_map(|(p, _)| p.clone()).collect();
    let all_neg: Vec<f64> = fold_scores.iter().flat_map(|(_, n)| n.clone()).collect();
    let pooled = TripletMetrics {
        aupr: aupr(&all_pos, &all_neg)?,
        auc: auc(&all_pos, &all_neg)?,
        f1: best_f1(&all_pos, &all_neg)?,
    };

    Ok(CvTripletReport {
        per_fold,
        mean,
        pooled,
    })
}

/// Leak audit helper: true when no triplet of any test pair of any fold
/// survives in that fold's training tensor.
pub fn audit_cv_type_masking(ds: &Dataset, k: usize, seed: u64) -> Result<bool> {
    let plan = split_cv_type(ds, k, seed)?;
    for f in 0..k {
        let test_pairs = plan.fold(f);
        let mask = triplets_of_pairs(ds, &test_pairs);
        let train = ds.tensor_excluding(&mask);
        for pair in &test_pairs {
            let (_, _, t) = ds.dims();
            for ty in 0..t {
                if train.get(pair.mirna, pair.disease, ty) != 0.0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Validate an experiment's fold count against the dataset.
pub fn check_fold_count(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParam(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    Ok(())
}
