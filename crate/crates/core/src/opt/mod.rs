//! Parameter optimizers: Adam driven by parameter-shift gradients, and a
//! Nelder–Mead simplex for derivative-free training.

mod adam;
mod nelder_mead;

pub use adam::{AdamConfig, AdamState};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadOutcome};

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// A deterministic scalar function of a parameter vector.
pub trait Objective {
    fn evaluate(&self, params: &[f64]) -> Result<f64>;

    fn param_count(&self) -> usize;

    /// Whether parameter `i` enters through a gate generated by an operator
    /// with eigenvalues ±1/2, so the two-term shift rule is exact.
    fn shift_rule_valid(&self, _i: usize) -> bool {
        true
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for (usize, F) {
    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        Ok((self.1)(params))
    }

    fn param_count(&self) -> usize {
        self.0
    }
}

/// `∂_μ f = [f(θ + π/2 e_μ) - f(θ - π/2 e_μ)] / 2` for every parameter.
pub fn parameter_shift_grad(obj: &dyn Objective, params: &[f64]) -> Result<Vec<f64>> {
    if params.len() != obj.param_count() {
        return Err(Error::ParameterCount { expected: obj.param_count(), got: params.len() });
    }
    if let Some(i) = (0..params.len()).find(|&i| !obj.shift_rule_valid(i)) {
        return Err(Error::ShiftRuleInvalid(i));
    }
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        shifted[i] = params[i] + FRAC_PI_2;
        let plus = obj.evaluate(&shifted)?;
        shifted[i] = params[i] - FRAC_PI_2;
        let minus = obj.evaluate(&shifted)?;
        shifted[i] = params[i];
        grad.push(0.5 * (plus - minus));
    }
    Ok(grad)
}

/// Result of a gradient-descent run.
#[derive(Clone, Debug, PartialEq)]
pub struct VqaOutcome {
    /// Best parameters seen, not necessarily the last iterate.
    pub params: Vec<f64>,
    pub value: f64,
    /// Objective at the initial point followed by one entry per step.
    pub trace: Vec<f64>,
}

/// Adam with parameter-shift gradients for up to `n_iter` steps, stopping as
/// soon as the objective drops to `threshold`.
pub fn vqa_optimize(
    obj: &dyn Objective,
    init: &[f64],
    n_iter: usize,
    threshold: f64,
    adam: AdamConfig,
) -> Result<VqaOutcome> {
    let mut params = init.to_vec();
    let first = obj.evaluate(&params)?;
    let mut best = (params.clone(), first);
    let mut trace = vec![first];
    if first <= threshold || params.is_empty() {
        return Ok(VqaOutcome { params: best.0, value: best.1, trace });
    }
    let mut state = AdamState::new(params.len(), adam);
    for _ in 0..n_iter {
        let grad = parameter_shift_grad(obj, &params)?;
        state.step(&mut params, &grad)?;
        let value = obj.evaluate(&params)?;
        if !value.is_finite() {
            return Err(Error::NonFinite("objective value".into()));
        }
        trace.push(value);
        if value < best.1 {
            best = (params.clone(), value);
        }
        if value <= threshold {
            break;
        }
    }
    Ok(VqaOutcome { params: best.0, value: best.1, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cos_sq() -> (usize, impl Fn(&[f64]) -> f64) {
        // 1 - cos²(θ/2)
        (1, |p: &[f64]| 1.0 - (p[0] / 2.0).cos().powi(2))
    }

    #[test]
    fn shift_rule_on_cos_squared() {
        let kernel = (1, |p: &[f64]| (p[0] / 2.0).cos().powi(2));
        let g = parameter_shift_grad(&kernel, &[FRAC_PI_2]).unwrap();
        assert_abs_diff_eq!(g[0], -0.5, epsilon = 1e-14);
        let g = parameter_shift_grad(&kernel, &[0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-14);
    }

    struct NotShiftable;
    impl Objective for NotShiftable {
        fn evaluate(&self, _: &[f64]) -> Result<f64> {
            Ok(0.0)
        }
        fn param_count(&self) -> usize {
            2
        }
        fn shift_rule_valid(&self, i: usize) -> bool {
            i == 0
        }
    }

    #[test]
    fn shift_rule_rejects_invalid_parameter() {
        assert!(matches!(parameter_shift_grad(&NotShiftable, &[0.0, 0.0]), Err(Error::ShiftRuleInvalid(1))));
    }

    #[test]
    fn vqa_returns_immediately_below_threshold() {
        let out = vqa_optimize(&cos_sq(), &[0.0], 100, 0.01, AdamConfig::default()).unwrap();
        assert_eq!(out.params, vec![0.0]);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn vqa_converges_on_one_parameter() {
        let out = vqa_optimize(&cos_sq(), &[FRAC_PI_2], 100, 0.0, AdamConfig::default()).unwrap();
        assert!(out.value <= 0.01, "{}", out.value);
        assert!(out.trace.len() <= 101);
        assert!(out.value <= out.trace[0]);
    }
}
