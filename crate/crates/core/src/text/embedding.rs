use std::collections::HashMap;
use std::path::Path;

use crate::error::read_to_string;
use crate::{Error, Result};

/// Pretrained word vectors, all of the same dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(Self {
            dimension,
            vectors: HashMap::new(),
        })
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                found: vector.len(),
            });
        }
        self.vectors.insert(token.into(), vector);
        Ok(())
    }

    /// Loads the plain-text format: one `token v1 .. vD` line per word. A
    /// leading `count dimension` header line (word2vec text format) is accepted.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut table: Option<EmbeddingTable> = None;
        for (line_no, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if line_no == 1 && rest.len() == 1 && token.parse::<usize>().is_ok() {
                if let Ok(dim) = rest[0].parse::<usize>() {
                    table = Some(Self::new(dim)?);
                    continue;
                }
            }
            let values = rest
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::parse(origin, line_no, format!("bad vector value: {e}")))?;
            let table = match &mut table {
                Some(t) => t,
                None => table.insert(
                    Self::new(values.len())
                        .map_err(|_| Error::parse(origin, line_no, "vector line has no values"))?,
                ),
            };
            if values.len() != table.dimension {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!(
                        "expected {} values for '{token}', found {}",
                        table.dimension,
                        values.len()
                    ),
                ));
            }
            table.vectors.insert(token.to_string(), values);
        }
        table.ok_or_else(|| Error::parse(origin, 0, "embedding file is empty"))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Mean of the vectors of in-vocabulary tokens, or the zero vector.
    ///
    /// Tokens are summed in sorted order so the result is bit-identical for
    /// any permutation of the input.
    pub fn embed_average<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let mut known: Vec<&str> = tokens
            .iter()
            .map(AsRef::as_ref)
            .filter(|t| self.vectors.contains_key(*t))
            .collect();
        let mut out = vec![0.0; self.dimension];
        if known.is_empty() {
            return out;
        }
        known.sort_unstable();
        for t in &known {
            for (o, v) in out.iter_mut().zip(&self.vectors[*t]) {
                *o += v;
            }
        }
        let n = known.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }
}
