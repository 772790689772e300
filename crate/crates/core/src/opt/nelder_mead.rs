use crate::error::{invalid, Error, Result};

use super::Objective;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop once `f_worst - f_best` falls below this.
    pub tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_evals: 4000, tol: 1e-10, initial_step: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadOutcome {
    pub params: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

struct Counted<'a> {
    obj: &'a dyn Objective,
    evals: usize,
}

impl Counted<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = self.obj.evaluate(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective at {x:?}")));
        }
        Ok(v)
    }
}

/// Downhill simplex with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5.
pub fn nelder_mead(obj: &dyn Objective, init: &[f64], opts: NelderMeadOptions) -> Result<NelderMeadOutcome> {
    let n = init.len();
    if n != obj.param_count() {
        return Err(Error::ParameterCount { expected: obj.param_count(), got: n });
    }
    if opts.max_evals < n + 1 {
        return Err(invalid(format!("max_evals {} is below the simplex size {}", opts.max_evals, n + 1)));
    }
    let mut f = Counted { obj, evals: 0 };
    let f0 = f.eval(init)?;
    if n == 0 {
        return Ok(NelderMeadOutcome { params: Vec::new(), value: f0, evals: f.evals });
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(init.to_vec(), f0)];
    for i in 0..n {
        let mut x = init.to_vec();
        x[i] += opts.initial_step;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }

    let along =
        |from: &[f64], to: &[f64], t: f64| -> Vec<f64> { from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect() };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst - best < opts.tol || f.evals >= opts.max_evals {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let xw = simplex[n].0.clone();
        let xr = along(&centroid, &xw, -REFLECT);
        let fr = f.eval(&xr)?;
        if fr < best {
            let xe = along(&centroid, &xr, EXPAND);
            let fe = f.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < worst {
            let xc = along(&centroid, &xr, CONTRACT);
            let fc = f.eval(&xc)?;
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = along(&centroid, &xw, CONTRACT);
            let fc = f.eval(&xc)?;
            let ok = fc < worst;
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let xb = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let x = along(&xb, &item.0, SHRINK);
            let v = f.eval(&x)?;
            *item = (x, v);
        }
    }
    let (params, value) = simplex.swap_remove(0);
    Ok(NelderMeadOutcome { params, value, evals: f.evals })
}
