//! Binary logistic regression trained by full-batch gradient descent on the
//! L2-regularized mean negative log-likelihood. The bias is not regularized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2_lambda: 1e-3,
            learning_rate: 0.1,
            epochs: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    pub fn zeros(width: usize) -> Self {
        LogisticModel {
            weights: vec![0.0; width],
            bias: 0.0,
        }
    }

    /// Deterministic fit from zero-initialized parameters.
    pub fn fit(rows: &[Vec<f64>], targets: &[bool], params: &LogisticParams) -> Result<Self> {
        if rows.is_empty() || rows.len() != targets.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let width = rows[0].len();
        for row in rows {
            if row.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
        }
        let mut model = LogisticModel::zeros(width);
        for _ in 0..params.epochs {
            let (grad_w, grad_b) = gradient(
                rows,
                targets,
                &model.weights,
                model.bias,
                params.l2_lambda,
            );
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= params.learning_rate * g;
            }
            model.bias -= params.learning_rate * grad_b;
        }
        Ok(model)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::WidthMismatch {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        let z: f64 = self
            .weights
            .iter()
            .zip(x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.bias;
        Ok(sigmoid(z))
    }
}

/// Regularized mean negative log-likelihood, evaluated at arbitrary
/// parameters. Kept public for gradient checking against finite
/// differences.
pub fn loss(rows: &[Vec<f64>], targets: &[bool], weights: &[f64], bias: f64, l2_lambda: f64) -> f64 {
    let m = rows.len() as f64;
    let mut total = 0.0;
    for (row, &target) in rows.iter().zip(targets) {
        let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias;
        let y = target as u8 as f64;
        // stable form of y*softplus(-z) + (1-y)*softplus(z)
        total += z.max(0.0) - z * y + (-z.abs()).exp().ln_1p();
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2_lambda / 2.0;
    total / m + penalty
}

/// Analytic gradient of [`loss`] with respect to weights and bias.
pub fn gradient(
    rows: &[Vec<f64>],
    targets: &[bool],
    weights: &[f64],
    bias: f64,
    l2_lambda: f64,
) -> (Vec<f64>, f64) {
    let m = rows.len() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &target) in rows.iter().zip(targets) {
        let z: f64 = weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias;
        let residual = sigmoid(z) - target as u8 as f64;
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += residual * v;
        }
        grad_b += residual;
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / m + l2_lambda * w;
    }
    (grad_w, grad_b / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_model_predicts_half() {
        let model = LogisticModel::zeros(3);
        assert_eq!(model.predict_proba(&[1.0, -2.0, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn hand_computed_sigmoid() {
        let model = LogisticModel {
            weights: vec![0.3],
            bias: 0.1,
        };
        let p = model.predict_proba(&[1.0]).unwrap();
        assert!((p - 0.598687660112452).abs() < 1e-12);
    }

    #[test]
    fn large_logit_saturates() {
        let model = LogisticModel {
            weights: vec![10.0],
            bias: 0.0,
        };
        assert!(model.predict_proba(&[1.0]).unwrap() > 0.99);
        assert!(model.predict_proba(&[-1.0]).unwrap() < 0.01);
    }

    #[test]
    fn all_positive_labels_learned() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 8.0, 1.0]).collect();
        let targets = vec![true; 8];
        let params = LogisticParams {
            l2_lambda: 0.0,
            ..LogisticParams::default()
        };
        let model = LogisticModel::fit(&rows, &targets, &params).unwrap();
        for row in &rows {
            assert!(model.predict_proba(row).unwrap() > 0.5);
        }
    }

    #[test]
    fn symmetric_data_keeps_bias_near_zero() {
        let rows = vec![vec![-1.0], vec![1.0]];
        let targets = vec![false, true];
        let model = LogisticModel::fit(&rows, &targets, &LogisticParams::default()).unwrap();
        assert!(model.bias.abs() < 1e-3, "bias = {}", model.bias);
        assert!(model.weights[0] > 0.0);
    }

    #[test]
    fn refit_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i % 4) as f64, (i % 5) as f64])
            .collect();
        let targets: Vec<bool> = (0..20).map(|i| i % 3 == 0).collect();
        let a = LogisticModel::fit(&rows, &targets, &LogisticParams::default()).unwrap();
        let b = LogisticModel::fit(&rows, &targets, &LogisticParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..6).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let targets: Vec<bool> = (0..20).map(|_| rng.random_bool(0.5)).collect();
        let lambda = 1e-3;
        let h = 1e-5;

        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let weights: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let bias: f64 = rng.random_range(-1.0..1.0);
            let (grad_w, grad_b) = gradient(&rows, &targets, &weights, bias, lambda);

            for slot in 0..=weights.len() {
                let mut plus = weights.clone();
                let mut minus = weights.clone();
                let (bias_plus, bias_minus, analytic) = if slot == weights.len() {
                    (bias + h, bias - h, grad_b)
                } else {
                    plus[slot] += h;
                    minus[slot] -= h;
                    (bias, bias, grad_w[slot])
                };
                let numeric = (loss(&rows, &targets, &plus, bias_plus, lambda)
                    - loss(&rows, &targets, &minus, bias_minus, lambda))
                    / (2.0 * h);
                let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1.0);
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-4, "max relative error {worst}");
    }
}
