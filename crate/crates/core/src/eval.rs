//! Cross-validation protocols, negative sampling and ranking metrics.
//!
//! Two protocols: pair-level CV masks every type of a held-out
//! (miRNA, disease) pair and asks for the right type back (top-1
//! precision / recall / F1); triplet-level CV masks individual triplets,
//! draws an equal-sized negative sample of unknown cells per fold, and
//! scores AUPR / AUC / best-threshold F1.

use crate::data::{Dataset, PairKey, TripletKey};
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};
use crate::tensor::Tensor3;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// Assignment of items to `k` folds of near-equal size.
#[derive(Debug, Clone)]
pub struct FoldPlan<K: Ord + Copy> {
    pub k: usize,
    pub seed: u64,
    pub assignments: BTreeMap<K, usize>,
}

impl<K: Ord + Copy> FoldPlan<K> {
    fn build(mut items: Vec<K>, k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("fold count must be positive".into()));
        }
        if k > items.len() {
            return Err(Error::InvalidParam(format!(
                "cannot split {} items into {k} folds",
                items.len()
            )));
        }
        let mut rng = substream(seed, Stream::Folds);
        items.shuffle(&mut rng);
        let assignments = items
            .iter()
            .enumerate()
            .map(|(pos, &item)| (item, pos % k))
            .collect();
        Ok(FoldPlan {
            k,
            seed,
            assignments,
        })
    }

    /// Items of one fold, in key order.
    pub fn fold(&self, f: usize) -> Vec<K> {
        self.assignments
            .iter()
            .filter(|&(_, &fid)| fid == f)
            .map(|(&item, _)| item)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Pair-level split: distinct associated pairs, partitioned.
pub fn split_cv_type(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan<PairKey>> {
    FoldPlan::build(ds.distinct_pairs(), k, seed)
}

/// Triplet-level split plus one negative sample set per fold.
#[derive(Debug, Clone)]
pub struct TripletCv {
    pub plan: FoldPlan<TripletKey>,
    /// Unknown cells drawn per fold, same size as the fold, disjoint
    /// from every known triplet, without replacement within a fold.
    pub negatives: Vec<Vec<TripletKey>>,
}

pub fn split_cv_triplet(ds: &Dataset, k: usize, seed: u64) -> Result<TripletCv> {
    let plan = FoldPlan::build(ds.triplets.iter().copied().collect(), k, seed)?;
    let (m, n, t) = ds.dims();
    let unknown_total = m * n * t - ds.triplets.len();
    let max_fold = (0..k).map(|f| plan.fold(f).len()).max().unwrap_or(0);
    if unknown_total < max_fold {
        return Err(Error::InvalidParam(format!(
            "only {unknown_total} unknown cells available but a fold needs {max_fold} negatives"
        )));
    }
    let mut negatives = Vec::with_capacity(k);
    for f in 0..k {
        let need = plan.fold(f).len();
        let mut rng = substream(seed, Stream::Negatives(f as u64));
        let mut chosen: BTreeSet<TripletKey> = BTreeSet::new();
        let mut attempts = 0usize;
        let budget = need.saturating_mul(1000).max(1000);
        while chosen.len() < need && attempts < budget {
            attempts += 1;
            let key = TripletKey {
                mirna: rng.random_range(0..m),
                disease: rng.random_range(0..n),
                ty: rng.random_range(0..t),
            };
            if !ds.triplets.contains(&key) {
                chosen.insert(key);
            }
        }
        if chosen.len() < need {
            // dense corner: enumerate the unknown cells and shuffle
            let mut pool: Vec<TripletKey> = Vec::with_capacity(unknown_total);
            for k3 in 0..t {
                for j in 0..n {
                    for i in 0..m {
                        let key = TripletKey {
                            mirna: i,
                            disease: j,
                            ty: k3,
                        };
                        if !ds.triplets.contains(&key) && !chosen.contains(&key) {
                            pool.push(key);
                        }
                    }
                }
            }
            pool.shuffle(&mut rng);
            chosen.extend(pool.into_iter().take(need - chosen.len()));
        }
        negatives.push(chosen.into_iter().collect());
    }
    Ok(TripletCv { plan, negatives })
}

/// Every known triplet of every listed pair (the mask for pair-level CV).
pub fn triplets_of_pairs(ds: &Dataset, pairs: &[PairKey]) -> BTreeSet<TripletKey> {
    pairs
        .iter()
        .flat_map(|&p| ds.triplets_of_pair(p))
        .collect()
}

/// Top-1 scores over a pair-level test set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Top1Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub hits: usize,
    pub pairs: usize,
    pub triplets: usize,
}

/// For each test pair take the highest-scoring type (ties to the lowest
/// type index); a hit means that type is truly associated. Precision
/// counts hits per pair, recall counts hits per true triplet.
pub fn top1_metrics(
    scores: &Tensor3,
    test_pairs: &[PairKey],
    truth: &BTreeSet<TripletKey>,
) -> Result<Top1Metrics> {
    if test_pairs.is_empty() {
        return Err(Error::InvalidParam("empty test set".into()));
    }
    let (_, _, t) = scores.dims();
    let mut hits = 0usize;
    let mut triplets = 0usize;
    for pair in test_pairs {
        let true_types: Vec<usize> = (0..t)
            .filter(|&k| {
                truth.contains(&TripletKey {
                    mirna: pair.mirna,
                    disease: pair.disease,
                    ty: k,
                })
            })
            .collect();
        if true_types.is_empty() {
            return Err(Error::InvalidParam(format!(
                "test pair ({}, {}) has no true type",
                pair.mirna, pair.disease
            )));
        }
        triplets += true_types.len();
        let mut best = 0usize;
        for k in 1..t {
            if scores.get(pair.mirna, pair.disease, k) > scores.get(pair.mirna, pair.disease, best)
            {
                best = k;
            }
        }
        if true_types.contains(&best) {
            hits += 1;
        }
    }
    let precision = hits as f64 / test_pairs.len() as f64;
    let recall = hits as f64 / triplets as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Top1Metrics {
        precision,
        recall,
        f1,
        hits,
        pairs: test_pairs.len(),
        triplets,
    })
}

fn check_nonempty(pos: &[f64], neg: &[f64]) -> Result<()> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidParam(
            "both score sets must be nonempty".into(),
        ));
    }
    Ok(())
}

/// Mann-Whitney AUC: `P(pos > neg) + P(pos == neg) / 2`, computed from
/// midranks so ties are handled exactly.
pub fn auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let p = pos.len();
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0f64; // midranks of the positives, 1-based
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                rank_sum += midrank;
            }
        }
        i = j;
    }
    let u = rank_sum - (p * (p + 1)) as f64 / 2.0;
    Ok(u / (p * neg.len()) as f64)
}

/// Average precision over descending score blocks; all positives inside
/// a tied block share the precision at the end of the block.
pub fn aupr(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        let mut block_pos = 0usize;
        while j < all.len() && all[j].0 == all[i].0 {
            if all[j].1 {
                block_pos += 1;
            }
            j += 1;
        }
        tp += block_pos;
        seen = j;
        if block_pos > 0 {
            ap += block_pos as f64 * tp as f64 / seen as f64;
        }
        i = j;
    }
    let _ = seen;
    Ok(ap / pos.len() as f64)
}

/// Maximum F1 over all thresholds, predicting positive at `score >= t`
/// for every distinct score `t`.
pub fn best_f1(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let p = pos.len();
    let mut best = 0.0f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            if all[j].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let fneg = p - tp;
        let f1 = if 2 * tp + fp + fneg > 0 {
            2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
        } else {
            0.0
        };
        best = best.max(f1);
        i = j;
    }
    Ok(best)
}

/// One scored candidate cell for a disease.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedCell {
    pub mirna: usize,
    pub ty: usize,
    pub score: f64,
}

/// All (miRNA, type) cells of one disease, minus the known triplets,
/// sorted by score descending with ties broken by miRNA then type
/// index, truncated to `top_n`.
pub fn rank_for_disease(
    scores: &Tensor3,
    disease: usize,
    known: &BTreeSet<TripletKey>,
    top_n: usize,
) -> Vec<RankedCell> {
    let (m, _, t) = scores.dims();
    let mut cells: Vec<RankedCell> = Vec::with_capacity(m * t);
    for i in 0..m {
        for k in 0..t {
            let key = TripletKey {
                mirna: i,
                disease,
                ty: k,
            };
            if known.contains(&key) {
                continue;
            }
            cells.push(RankedCell {
                mirna: i,
                ty: k,
                score: scores.get(i, disease, k),
            });
        }
    }
    cells.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.mirna.cmp(&b.mirna))
            .then(a.ty.cmp(&b.ty))
    });
    cells.truncate(top_n);
    cells
}
