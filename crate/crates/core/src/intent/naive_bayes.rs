use serde::{Deserialize, Serialize};

use super::dataset::{softmax, TrainingMatrix};
use crate::{Error, Result};

/// Multinomial Naive Bayes over non-negative feature weights.
///
/// Columns that take negative values in the training data are split into a
/// positive part `max(x, 0)` and a negative part `max(-x, 0)`, each treated
/// as its own count column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    width: usize,
    log_prior: Vec<f64>,
    /// `log_likelihood[class][expanded column]`
    log_likelihood: Vec<Vec<f64>>,
    /// Expanded column holding the negative part, per original column.
    negative_column: Vec<Option<usize>>,
}

impl NaiveBayes {
    pub fn fit(data: &TrainingMatrix, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        data.validate()?;
        let mut negative_column = vec![None; data.width];
        let mut expanded = data.width;
        for row in &data.rows {
            for &(c, v) in row {
                if v < 0.0 && negative_column[c].is_none() {
                    negative_column[c] = Some(expanded);
                    expanded += 1;
                }
            }
        }
        let counts = data.class_counts();
        let n = data.len() as f64;
        let mut totals = vec![vec![0.0; expanded]; data.classes];
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            for &(c, v) in row {
                if v >= 0.0 {
                    totals[y][c] += v;
                } else if let Some(nc) = negative_column[c] {
                    totals[y][nc] -= v;
                }
            }
        }
        let log_likelihood = totals
            .into_iter()
            .map(|t| {
                let denom = (t.iter().sum::<f64>() + alpha * expanded as f64).ln();
                t.into_iter().map(|x| (x + alpha).ln() - denom).collect()
            })
            .collect();
        Ok(Self {
            width: data.width,
            log_prior: counts.iter().map(|&c| (c as f64 / n).ln()).collect(),
            log_likelihood,
            negative_column,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.log_prior.len()
    }

    pub fn predict_scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        let logits: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(prior, ll)| {
                let mut z = *prior;
                for &(c, v) in row {
                    if v > 0.0 {
                        z += v * ll[c];
                    } else if v < 0.0 {
                        if let Some(nc) = self.negative_column.get(c).copied().flatten() {
                            z -= v * ll[nc];
                        }
                    }
                }
                z
            })
            .collect();
        softmax(&logits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_class_scores_one() {
        let m =
            TrainingMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 3.0]], vec![0, 0], 1).unwrap();
        let nb = NaiveBayes::fit(&m, 1.0).unwrap();
        assert_eq!(nb.predict_scores(&[(0, 5.0)]), vec![1.0]);
    }

    #[test]
    fn separable_singletons() {
        let m =
            TrainingMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 1], 2).unwrap();
        let nb = NaiveBayes::fit(&m, 1.0).unwrap();
        // theta(class 0) = (2/3, 1/3): posterior 2/3 for the matching class
        let s = nb.predict_scores(&[(0, 1.0)]);
        assert!((s[0] - 2.0 / 3.0).abs() < 1e-12, "{s:?}");
        let s = nb.predict_scores(&[(1, 1.0)]);
        assert!(s[1] > s[0]);
    }

    #[test]
    fn zero_features_give_priors() {
        let m = TrainingMatrix::from_dense(
            &[vec![1.0, -0.5], vec![0.2, 0.3], vec![0.0, -1.0]],
            vec![0, 1, 1],
            2,
        )
        .unwrap();
        let nb = NaiveBayes::fit(&m, 0.5).unwrap();
        let s = nb.predict_scores(&[]);
        assert!((s[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((s[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_values_use_their_own_column() {
        let m = TrainingMatrix::from_dense(&[vec![-1.0], vec![1.0]], vec![0, 1], 2).unwrap();
        let nb = NaiveBayes::fit(&m, 1.0).unwrap();
        assert!(nb.predict_scores(&[(0, -1.0)])[0] > 0.5);
        assert!(nb.predict_scores(&[(0, 1.0)])[1] > 0.5);
    }

    #[test]
    fn rejects_bad_alpha() {
        let m = TrainingMatrix::from_dense(&[vec![1.0]], vec![0], 1).unwrap();
        assert!(matches!(NaiveBayes::fit(&m, 0.0), Err(Error::Config(_))));
    }
}
