use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adam hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 0.2, beta1: 0.8, beta2: 0.999, eps: 1e-8 }
    }
}

/// Moment estimates for one parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    config: AdamConfig,
    step: u32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        AdamState { config, step: 0, m: vec![0.0; len], v: vec![0.0; len] }
    }

    pub fn step_count(&self) -> u32 {
        self.step
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    /// One bias-corrected update `θ ← θ - α m̂ / (√v̂ + ε)`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch { expected: self.m.len(), got: params.len().max(grad.len()) });
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {i}")));
        }
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        self.step += 1;
        let c1 = 1.0 - beta1.powi(self.step as i32);
        let c2 = 1.0 - beta2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_step_moves_by_lr() {
        let mut s = AdamState::new(1, AdamConfig::default());
        let mut p = [1.0];
        s.step(&mut p, &[1.0]).unwrap();
        assert_abs_diff_eq!(p[0], 1.0 - 0.2 / (1.0 + 1e-8), epsilon = 1e-15);
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut s = AdamState::new(3, AdamConfig::default());
        let mut p = [0.1, 0.2, 0.3];
        s.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, [0.1, 0.2, 0.3]);
    }

    #[test]
    fn constant_gradient_step_tends_to_lr_sign() {
        let mut s = AdamState::new(1, AdamConfig::default());
        let mut p = [0.0];
        let mut last = 0.0;
        for _ in 0..5000 {
            let before = p[0];
            s.step(&mut p, &[-3.0]).unwrap();
            last = p[0] - before;
        }
        assert_abs_diff_eq!(last, 0.2, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        let mut s = AdamState::new(2, AdamConfig::default());
        assert!(s.step(&mut [0.0, 0.0], &[f64::NAN, 0.0]).is_err());
        assert!(s.step(&mut [0.0], &[0.0]).is_err());
    }
}
