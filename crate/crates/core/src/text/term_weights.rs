use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sparse vector with entries sorted by column index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == 0.0)
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Cosine similarity; zero when either side is the zero vector.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        let (a, b) = (self.norm(), other.norm());
        if a == 0.0 || b == 0.0 {
            0.0
        } else {
            self.dot(other) / (a * b)
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Smoothed TF-IDF model: `tf(t, d) * (ln((1 + N) / (1 + df(t))) + 1)` with raw
/// term counts, L2-normalized per document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "TermWeightRepr", into = "TermWeightRepr")]
pub struct TermWeightModel {
    terms: Vec<String>,
    doc_frequency: Vec<u32>,
    doc_count: u32,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct TermWeightRepr {
    terms: Vec<String>,
    doc_frequency: Vec<u32>,
    doc_count: u32,
}

impl From<TermWeightRepr> for TermWeightModel {
    fn from(r: TermWeightRepr) -> Self {
        let index = r
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            terms: r.terms,
            doc_frequency: r.doc_frequency,
            doc_count: r.doc_count,
            index,
        }
    }
}

impl From<TermWeightModel> for TermWeightRepr {
    fn from(m: TermWeightModel) -> Self {
        Self {
            terms: m.terms,
            doc_frequency: m.doc_frequency,
            doc_count: m.doc_count,
        }
    }
}

impl TermWeightModel {
    /// Fits document frequencies over `corpus`. Columns are assigned in
    /// lexicographic term order.
    pub fn fit<D: AsRef<[String]>>(corpus: &[D]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Config("term weights need a non-empty corpus".into()));
        }
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in corpus {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let (terms, doc_frequency): (Vec<String>, Vec<u32>) =
            df.into_iter().map(|(t, c)| (t.to_string(), c)).unzip();
        Ok(TermWeightRepr {
            terms,
            doc_frequency,
            doc_count: corpus.len() as u32,
        }
        .into())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn doc_count(&self) -> u32 {
        self.doc_count
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_frequency(&self, term: &str) -> Option<u32> {
        self.column(term).map(|c| self.doc_frequency[c])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf_at(c))
    }

    fn idf_at(&self, column: usize) -> f64 {
        let n = self.doc_count as f64;
        ((1.0 + n) / (1.0 + self.doc_frequency[column] as f64)).ln() + 1.0
    }

    /// Weighs a token list. Unknown tokens are ignored; the result has unit
    /// norm unless no token was known.
    pub fn weigh<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(c) = self.column(t.as_ref()) {
                *counts.entry(c).or_default() += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(c, tf)| (c, tf * self.idf_at(c)))
            .collect();
        let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut entries {
                e.1 /= norm;
            }
        }
        SparseVector {
            dim: self.terms.len(),
            entries,
        }
    }
}
