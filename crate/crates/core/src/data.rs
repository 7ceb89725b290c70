//! Triplet dataset: entity vocabularies, the known association set, and
//! the per-entity association index.
//!
//! Identifier matching is case-insensitive with surrounding whitespace
//! trimmed; the first-seen spelling is kept for display.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use std::collections::{BTreeSet, HashMap};

/// A (miRNA, disease) pair, by vocabulary index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub mirna: usize,
    pub disease: usize,
}

/// A (miRNA, disease, type) triplet, by vocabulary index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripletKey {
    pub mirna: usize,
    pub disease: usize,
    pub ty: usize,
}

impl TripletKey {
    pub fn pair(&self) -> PairKey {
        PairKey {
            mirna: self.mirna,
            disease: self.disease,
        }
    }
}

/// Ordered, duplicate-free identifier list with case-insensitive lookup.
#[derive(Debug, Clone, Default)]
pub struct Vocab {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

fn normalize(name: &str) -> String {
    name.trim().to_lowercase()
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    /// Index of `name`, interning it in first-appearance order.
    pub fn intern(&mut self, name: &str) -> usize {
        let key = normalize(name);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.trim().to_string());
        self.index.insert(key, i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(&normalize(name)).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Summary line for a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub mirnas: usize,
    pub diseases: usize,
    pub types: usize,
    pub triplets: usize,
    /// `#triplets / (m * n * t)`, i.e. the filled fraction of the tensor
    /// including the type mode.
    pub density: f64,
}

/// Vocabularies plus the deduplicated triplet set.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub mirnas: Vocab,
    pub diseases: Vocab,
    pub types: Vocab,
    pub triplets: BTreeSet<TripletKey>,
    /// Diseases associated with each miRNA in at least one type.
    pub disease_sets: Vec<BTreeSet<usize>>,
}

impl Dataset {
    /// Build from raw string records, deduplicating triplets.
    /// Returns the dataset and the number of duplicate records discarded.
    pub fn from_records<I, S>(records: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut mirnas = Vocab::new();
        let mut diseases = Vocab::new();
        let mut types = Vocab::new();
        let mut triplets = BTreeSet::new();
        let mut duplicates = 0usize;
        for (e, d, t) in records {
            let key = TripletKey {
                mirna: mirnas.intern(e.as_ref()),
                disease: diseases.intern(d.as_ref()),
                ty: types.intern(t.as_ref()),
            };
            if !triplets.insert(key) {
                duplicates += 1;
            }
        }
        if triplets.is_empty() {
            return Err(Error::InvalidParam("dataset has no triplets".into()));
        }
        let mut disease_sets = vec![BTreeSet::new(); mirnas.len()];
        for t in &triplets {
            disease_sets[t.mirna].insert(t.disease);
        }
        Ok((
            Dataset {
                mirnas,
                diseases,
                types,
                triplets,
                disease_sets,
            },
            duplicates,
        ))
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.mirnas.len(), self.diseases.len(), self.types.len())
    }

    pub fn stats(&self) -> DatasetStats {
        let (m, n, t) = self.dims();
        DatasetStats {
            mirnas: m,
            diseases: n,
            types: t,
            triplets: self.triplets.len(),
            density: self.triplets.len() as f64 / (m * n * t) as f64,
        }
    }

    /// Distinct associated pairs in index order.
    pub fn distinct_pairs(&self) -> Vec<PairKey> {
        let mut pairs: Vec<PairKey> = self.triplets.iter().map(|t| t.pair()).collect();
        pairs.dedup();
        pairs
    }

    /// All known triplets of one pair.
    pub fn triplets_of_pair(&self, pair: PairKey) -> Vec<TripletKey> {
        let lo = TripletKey {
            mirna: pair.mirna,
            disease: pair.disease,
            ty: 0,
        };
        let hi = TripletKey {
            mirna: pair.mirna,
            disease: pair.disease,
            ty: usize::MAX,
        };
        self.triplets.range(lo..=hi).copied().collect()
    }

    /// Binary association tensor over the full vocabulary.
    pub fn tensor(&self) -> Tensor3 {
        self.tensor_excluding(&BTreeSet::new())
    }

    /// Binary association tensor with the given triplets masked out.
    pub fn tensor_excluding(&self, mask: &BTreeSet<TripletKey>) -> Tensor3 {
        let mut t = Tensor3::zeros(self.dims());
        for key in self.triplets.iter().filter(|k| !mask.contains(k)) {
            t.set(key.mirna, key.disease, key.ty, 1.0);
        }
        t
    }

    /// Drop miRNAs and diseases with fewer than `min` associations
    /// (counted across all types), then rebuild vocabularies from the
    /// surviving triplets in first-appearance order.
    pub fn filter_min_associations(&self, min: usize) -> Result<Dataset> {
        let (m, n, _) = self.dims();
        let mut mirna_count = vec![0usize; m];
        let mut disease_count = vec![0usize; n];
        for t in &self.triplets {
            mirna_count[t.mirna] += 1;
            disease_count[t.disease] += 1;
        }
        let records: Vec<(String, String, String)> = self
            .triplets
            .iter()
            .filter(|t| mirna_count[t.mirna] >= min && disease_count[t.disease] >= min)
            .map(|t| {
                (
                    self.mirnas.name(t.mirna).to_string(),
                    self.diseases.name(t.disease).to_string(),
                    self.types.name(t.ty).to_string(),
                )
            })
            .collect();
        let (ds, _) = Dataset::from_records(records)?;
        Ok(ds)
    }
}
