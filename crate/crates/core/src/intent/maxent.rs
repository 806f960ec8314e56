use serde::{Deserialize, Serialize};

use super::dataset::{softmax, TrainingMatrix};
use crate::{Error, Result};

const LOSS_SLACK: f64 = 1e-8;
const MAX_RISING_EPOCHS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxEntParams {
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
}

impl Default for MaxEntParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 300,
            lr: 2.0,
        }
    }
}

/// Multinomial logistic regression (maximum entropy classifier).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEnt {
    width: usize,
    /// `weights[class][column]`
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    loss_history: Vec<f64>,
}

impl MaxEnt {
    pub fn zeros(width: usize, classes: usize) -> Self {
        Self {
            width,
            weights: vec![vec![0.0; width]; classes],
            bias: vec![0.0; classes],
            loss_history: Vec::new(),
        }
    }

    /// Full-batch gradient descent on the L2-regularized mean negative
    /// log-likelihood.
    pub fn fit(data: &TrainingMatrix, params: MaxEntParams) -> Result<Self> {
        let MaxEntParams { l2, epochs, lr } = params;
        if l2.is_nan() || l2 < 0.0 || epochs == 0 || lr.is_nan() || lr <= 0.0 {
            return Err(Error::Config(format!(
                "invalid maxent parameters l2={l2} epochs={epochs} lr={lr}"
            )));
        }
        data.validate()?;
        let mut model = Self::zeros(data.width, data.classes);
        let (mut loss, mut grad_w, mut grad_b) = model.loss_and_gradient(data, l2);
        model.loss_history.push(loss);
        let mut rising = 0;
        for epoch in 1..=epochs {
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                for (wi, gi) in w.iter_mut().zip(g) {
                    *wi -= lr * gi;
                }
            }
            for (b, g) in model.bias.iter_mut().zip(&grad_b) {
                *b -= lr * g;
            }
            let previous = loss;
            (loss, grad_w, grad_b) = model.loss_and_gradient(data, l2);
            model.loss_history.push(loss);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "maxent loss is not finite at epoch {epoch}"
                )));
            }
            if loss > previous + LOSS_SLACK {
                rising += 1;
                if rising >= MAX_RISING_EPOCHS {
                    return Err(Error::Training(format!(
                        "maxent diverged at epoch {epoch}: loss rose from {previous:.6} to {loss:.6}"
                    )));
                }
            } else {
                rising = 0;
            }
        }
        Ok(model)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.bias.len()
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }

    /// Flattened parameters: all weights row by row, then biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.weights.iter().flatten().copied().collect();
        p.extend(&self.bias);
        p
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        let expected = self.classes() * (self.width + 1);
        if params.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: params.len(),
            });
        }
        let (w, b) = params.split_at(self.classes() * self.width);
        for (row, chunk) in self.weights.iter_mut().zip(w.chunks(self.width.max(1))) {
            row.copy_from_slice(&chunk[..self.width]);
        }
        self.bias.copy_from_slice(b);
        Ok(())
    }

    fn logits(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + row.iter().map(|&(c, v)| w[c] * v).sum::<f64>())
            .collect()
    }

    pub fn predict_scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        softmax(&self.logits(row))
    }

    /// Regularized loss with its gradient with respect to weights and biases.
    pub fn loss_and_gradient(
        &self,
        data: &TrainingMatrix,
        l2: f64,
    ) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
        let n = data.len() as f64;
        let k = self.classes();
        let mut grad_w = vec![vec![0.0; self.width]; k];
        let mut grad_b = vec![0.0; k];
        let mut nll = 0.0;
        for (row, &y) in data.rows.iter().zip(&data.labels) {
            let logits = self.logits(row);
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_z = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
            nll += log_z - logits[y];
            for class in 0..k {
                let p = (logits[class] - log_z).exp();
                let d = (p - if class == y { 1.0 } else { 0.0 }) / n;
                grad_b[class] += d;
                for &(c, v) in row {
                    grad_w[class][c] += d * v;
                }
            }
        }
        let mut penalty = 0.0;
        for (w, g) in self.weights.iter().zip(grad_w.iter_mut()) {
            for (wi, gi) in w.iter().zip(g.iter_mut()) {
                penalty += wi * wi;
                *gi += l2 * wi;
            }
        }
        (nll / n + 0.5 * l2 * penalty, grad_w, grad_b)
    }
}
