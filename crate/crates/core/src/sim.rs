//! Auxiliary similarity matrices.
//!
//! Disease-disease similarity comes from an ontology DAG: each ancestor
//! contributes a value decayed by `delta` per level toward the disease,
//! and two diseases are compared through their shared ancestor closure.
//! Entity (miRNA) similarity is the best-match average of disease
//! similarities over the diseases each entity is associated with.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use ndarray::Array2;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};

/// Semantic contribution decay factor, in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub delta: f64,
}

impl SimParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParam(format!(
                "delta must lie strictly between 0 and 1, got {delta}"
            )));
        }
        Ok(SimParams { delta })
    }
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams { delta: 0.5 }
    }
}

/// Disease ontology DAG; edges point from a node to its direct parents.
#[derive(Debug, Clone)]
pub struct DiseaseDag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<BTreeSet<usize>>,
}

fn normalize(name: &str) -> String {
    name.trim().to_lowercase()
}

impl DiseaseDag {
    /// Build from node names and (child, parent) edges given by name.
    /// Rejects edges to unknown nodes and any cycle.
    pub fn from_edges<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut dag = DiseaseDag {
            names: Vec::new(),
            index: HashMap::new(),
            parents: Vec::new(),
        };
        for n in nodes {
            dag.add_node(n.as_ref());
        }
        for (child, parent) in edges {
            let c = dag.node(child.as_ref()).ok_or_else(|| Error::UnknownEntity {
                kind: "disease",
                name: child.as_ref().to_string(),
            })?;
            let p = dag.node(parent.as_ref()).ok_or_else(|| Error::UnknownEntity {
                kind: "disease",
                name: parent.as_ref().to_string(),
            })?;
            dag.add_parent(c, p);
        }
        dag.check_acyclic()?;
        Ok(dag)
    }

    pub(crate) fn add_node(&mut self, name: &str) -> usize {
        let key = normalize(name);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.trim().to_string());
        self.index.insert(key, i);
        self.parents.push(BTreeSet::new());
        i
    }

    pub(crate) fn add_parent(&mut self, child: usize, parent: usize) {
        if child != parent {
            self.parents[child].insert(parent);
        }
    }

    pub(crate) fn empty() -> Self {
        DiseaseDag {
            names: Vec::new(),
            index: HashMap::new(),
            parents: Vec::new(),
        }
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(&normalize(name)).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn parents(&self, idx: usize) -> &BTreeSet<usize> {
        &self.parents[idx]
    }

    /// Kahn topological check over the parent edges.
    pub(crate) fn check_acyclic(&self) -> Result<()> {
        let n = self.names.len();
        let mut outdeg: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| outdeg[i] == 0).collect();
        let mut seen = 0usize;
        while let Some(p) = queue.pop() {
            seen += 1;
            for &c in &children[p] {
                outdeg[c] -= 1;
                if outdeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if seen != n {
            return Err(Error::InvalidParam(
                "disease hierarchy contains a cycle".into(),
            ));
        }
        Ok(())
    }

    /// Ancestor closure of `d`, including `d` itself.
    pub fn closure(&self, d: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![d];
        while let Some(x) = stack.pop() {
            if out.insert(x) {
                stack.extend(self.parents[x].iter().copied());
            }
        }
        out
    }

    /// Contribution of every ancestor to `d`: 1 at `d`, and for any other
    /// closure member the best decayed path toward `d`.
    pub fn contribution_map(&self, d: usize, params: SimParams) -> HashMap<usize, f64> {
        let closure = self.closure(d);
        // children restricted to the closure
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        for &c in &closure {
            for &p in &self.parents[c] {
                if closure.contains(&p) {
                    children.entry(p).or_default().push(c);
                }
            }
        }
        let mut values: HashMap<usize, f64> = HashMap::with_capacity(closure.len());
        values.insert(d, 1.0);
        fn eval(
            node: usize,
            d: usize,
            delta: f64,
            children: &HashMap<usize, Vec<usize>>,
            values: &mut HashMap<usize, f64>,
        ) -> f64 {
            if let Some(&v) = values.get(&node) {
                return v;
            }
            let best = children
                .get(&node)
                .into_iter()
                .flatten()
                .map(|&c| delta * eval(c, d, delta, children, values))
                .fold(0.0f64, f64::max);
            values.insert(node, best);
            best
        }
        for &node in &closure {
            eval(node, d, params.delta, &children, &mut values);
        }
        values
    }
}

/// Contribution of ancestor `di` to disease `d`.
pub fn semantic_contribution(
    dag: &DiseaseDag,
    d: &str,
    di: &str,
    params: SimParams,
) -> Result<f64> {
    let d = resolve(dag, d)?;
    let di = resolve(dag, di)?;
    let map = dag.contribution_map(d, params);
    map.get(&di).copied().ok_or_else(|| {
        Error::InvalidParam(format!(
            "'{}' is not an ancestor of '{}'",
            dag.name(di),
            dag.name(d)
        ))
    })
}

/// Sum of contributions over the full ancestor closure of `d`.
pub fn semantic_value(dag: &DiseaseDag, d: &str, params: SimParams) -> Result<f64> {
    let d = resolve(dag, d)?;
    Ok(semantic_value_by_index(dag, d, params))
}

fn semantic_value_by_index(dag: &DiseaseDag, d: usize, params: SimParams) -> f64 {
    dag.contribution_map(d, params).values().sum()
}

/// Closure-overlap similarity between two diseases, in `[0, 1]`.
pub fn disease_similarity(
    dag: &DiseaseDag,
    di: &str,
    dj: &str,
    params: SimParams,
) -> Result<f64> {
    let a = resolve(dag, di)?;
    let b = resolve(dag, dj)?;
    Ok(disease_similarity_by_index(dag, a, b, params))
}

fn disease_similarity_by_index(dag: &DiseaseDag, a: usize, b: usize, params: SimParams) -> f64 {
    if a == b {
        return 1.0;
    }
    let ca = dag.contribution_map(a, params);
    let cb = dag.contribution_map(b, params);
    let (small, large) = if ca.len() <= cb.len() { (&ca, &cb) } else { (&cb, &ca) };
    let mut shared = 0.0;
    for (node, va) in small {
        if let Some(vb) = large.get(node) {
            shared += va + vb;
        }
    }
    if shared == 0.0 {
        return 0.0;
    }
    let sv: f64 = ca.values().sum::<f64>() + cb.values().sum::<f64>();
    (shared / sv).min(1.0)
}

fn resolve(dag: &DiseaseDag, name: &str) -> Result<usize> {
    dag.node(name).ok_or_else(|| Error::UnknownEntity {
        kind: "disease",
        name: name.to_string(),
    })
}

/// Symmetric square similarity matrix with labeled rows/columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    pub values: Matrix,
}

impl SimilarityMatrix {
    pub fn new(labels: Vec<String>, values: Matrix) -> Result<Self> {
        let sm = SimilarityMatrix { labels, values };
        sm.validate()?;
        Ok(sm)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Symmetry within 1e-12, unit diagonal, all values in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.values.dim() != (n, n) {
            return Err(Error::Dimension(format!(
                "similarity matrix is {}x{} but has {} labels",
                self.values.nrows(),
                self.values.ncols(),
                n
            )));
        }
        for i in 0..n {
            if self.values[[i, i]] != 1.0 {
                return Err(Error::InvalidParam(format!(
                    "similarity diagonal must be 1, got {} at '{}'",
                    self.values[[i, i]],
                    self.labels[i]
                )));
            }
            for j in 0..i {
                let (a, b) = (self.values[[i, j]], self.values[[j, i]]);
                if (a - b).abs() > 1e-12 {
                    return Err(Error::InvalidParam(format!(
                        "similarity matrix asymmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidParam(format!(
                        "similarity value out of [0,1] at ({i},{j}): {a}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Best-match-average similarity between two entities' disease sets.
///
/// An empty set yields 0 (logged as a warning by the matrix builder).
pub fn mirna_similarity(
    ei: usize,
    ej: usize,
    disease_sets: &[BTreeSet<usize>],
    s_disease: &SimilarityMatrix,
) -> f64 {
    let (da, db) = (&disease_sets[ei], &disease_sets[ej]);
    if da.is_empty() || db.is_empty() {
        return 0.0;
    }
    let best_against = |d: usize, other: &BTreeSet<usize>| -> f64 {
        other
            .iter()
            .map(|&o| s_disease.get(d, o))
            .fold(0.0f64, f64::max)
    };
    let sum_a: f64 = da.iter().map(|&d| best_against(d, db)).sum();
    let sum_b: f64 = db.iter().map(|&d| best_against(d, da)).sum();
    ((sum_a + sum_b) / (da.len() + db.len()) as f64).min(1.0)
}

/// Compute both auxiliary matrices for a dataset: entity functional
/// similarity (from best-match averaging) and disease semantic
/// similarity (from the DAG).
///
/// Dataset diseases missing from the DAG keep their row with similarity
/// 0 to everything but themselves; each one is logged.
pub fn build_similarity_matrices(
    ds: &Dataset,
    dag: &DiseaseDag,
    params: SimParams,
) -> Result<(SimilarityMatrix, SimilarityMatrix)> {
    let n = ds.diseases.len();
    let contribution: Vec<Option<HashMap<usize, f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            dag.node(ds.diseases.name(j))
                .map(|idx| dag.contribution_map(idx, params))
        })
        .collect();
    for (j, c) in contribution.iter().enumerate() {
        if c.is_none() {
            log::warn!(
                "disease '{}' not found in the hierarchy; similarity set to 0",
                ds.diseases.name(j)
            );
        }
    }

    let mut s_n = Array2::zeros((n, n));
    let upper: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let vals: Vec<f64> = upper
        .par_iter()
        .map(|&(i, j)| match (&contribution[i], &contribution[j]) {
            (Some(ci), Some(cj)) => {
                let mut shared = 0.0;
                let (small, large) = if ci.len() <= cj.len() { (ci, cj) } else { (cj, ci) };
                for (node, va) in small {
                    if let Some(vb) = large.get(node) {
                        shared += va + vb;
                    }
                }
                if shared == 0.0 {
                    0.0
                } else {
                    let sv: f64 = ci.values().sum::<f64>() + cj.values().sum::<f64>();
                    (shared / sv).min(1.0)
                }
            }
            _ => 0.0,
        })
        .collect();
    for (&(i, j), v) in upper.iter().zip(vals) {
        s_n[[i, j]] = v;
        s_n[[j, i]] = v;
    }
    for i in 0..n {
        s_n[[i, i]] = 1.0;
    }
    let s_n = SimilarityMatrix::new(ds.diseases.names().to_vec(), s_n)?;

    let m = ds.mirnas.len();
    for (i, set) in ds.disease_sets.iter().enumerate() {
        if set.is_empty() {
            log::warn!(
                "miRNA '{}' has no associated diseases; similarity set to 0",
                ds.mirnas.name(i)
            );
        }
    }
    let mut s_m = Array2::zeros((m, m));
    let upper: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let vals: Vec<f64> = upper
        .par_iter()
        .map(|&(i, j)| mirna_similarity(i, j, &ds.disease_sets, &s_n))
        .collect();
    for (&(i, j), v) in upper.iter().zip(vals) {
        s_m[[i, j]] = v;
        s_m[[j, i]] = v;
    }
    for i in 0..m {
        s_m[[i, i]] = 1.0;
    }
    let s_m = SimilarityMatrix::new(ds.mirnas.names().to_vec(), s_m)?;

    Ok((s_m, s_n))
}
