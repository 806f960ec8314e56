//! Text featurization: tokenization, term weighting, averaged word embeddings
//! and syntactic pattern flags, combined into one [`FeatureVector`] per
//! utterance.

mod embedding;
mod features;
mod pattern;
mod term_weights;
mod tokenize;

pub use embedding::EmbeddingTable;
pub use features::{FeatureLayout, FeatureModels, FeatureVector, Utterance};
pub use pattern::{match_patterns, PatternRule, PatternToken, RuleSet, WildcardPattern};
pub use term_weights::{SparseVector, TermWeightModel};
pub use tokenize::tokenize;

/// Dense cosine similarity. Zero when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> crate::Result<f64> {
    if u.len() != v.len() {
        return Err(crate::Error::Dimension {
            expected: u.len(),
            found: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_length_mismatch() {
        assert!(matches!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(crate::Error::Dimension {
                expected: 1,
                found: 2
            })
        ));
    }
}
