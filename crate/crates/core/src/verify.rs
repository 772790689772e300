//! Built-in self-checks run by the `verify` subcommand.

use rand::Rng;

use crate::cost::{expected_risk, kernel, purity, uhlmann_fidelity, ParameterTable, PreparedTarget, Target};
use crate::error::Result;
use crate::genome::CircuitGenome;
use crate::opt::{parameter_shift_grad, Objective};
use crate::rng::stream;
use crate::sim::{haar_random_unitary, partial_trace_b, Statevector};
use crate::targets::{
    dense_purified_state, domain_wall_state, eigenbasis_dephase, exact_propagators, gibbs_state, tfd_state,
    trotter_states, DynamicsSpec, ThermalMethod, ThermalSpec, TrotterOrder,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, worst: f64, tol: f64) -> CheckOutcome {
    CheckOutcome { name, passed: worst <= tol, detail: format!("worst {worst:.3e}, tolerance {tol:.1e}") }
}

fn random_case(seed: u64, k: u64) -> Result<(CircuitGenome, Target, Vec<f64>)> {
    let mut rng = stream(seed, &[k]);
    let n = rng.random_range(1..=4usize);
    let genome = CircuitGenome::random(n, rng.random_range(1..=4), &mut rng)?;
    let target = Target::Unitary(haar_random_unitary(1 << n, &mut rng)?);
    let theta = ParameterTable::random(1, genome.param_count(), &mut rng).row(0).to_vec();
    Ok((genome, target, theta))
}

/// Parameter-shift gradients against central differences.
pub fn check_gradients(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..instances {
        let (genome, target, theta) = random_case(seed, k as u64)?;
        let reference = Statevector::zero(genome.num_qubits());
        let prepared = PreparedTarget::new(&target, &reference)?;
        let obj = prepared.objective(&genome);
        let grad = parameter_shift_grad(&obj, &theta)?;
        let mut p = theta.clone();
        for (i, g) in grad.iter().enumerate() {
            p[i] = theta[i] + h;
            let up = obj.evaluate(&p)?;
            p[i] = theta[i] - h;
            let down = obj.evaluate(&p)?;
            p[i] = theta[i];
            worst = worst.max((g - (up - down) / (2.0 * h)).abs());
        }
    }
    Ok(outcome("parameter-shift gradient", worst, 1e-6))
}

/// Trace-norm risk against mean kernel infidelity.
pub fn check_risk_identity(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for k in 0..instances {
        let (genome, target, theta) = random_case(seed ^ 0x5A5A, k as u64)?;
        let reference = Statevector::zero(genome.num_qubits());
        let params = ParameterTable::from_rows(vec![theta.clone()], genome.param_count())?;
        let risk = expected_risk(std::slice::from_ref(&target), &genome, &params, &reference)?;
        let infid = 1.0 - kernel(&target, &genome, &theta, &reference)?;
        worst = worst.max((risk - infid).abs());
    }
    Ok(outcome("risk equals infidelity", worst, 1e-10))
}

/// Symmetrized Trotter steps never do worse than sequential ones.
pub fn check_trotter_ordering() -> Result<CheckOutcome> {
    let spec = DynamicsSpec { trotter_r: 4, ..DynamicsSpec::new(2, 1.0, 1.0, 0.25) };
    let psi = domain_wall_state(2)?;
    let exact = exact_propagators(&spec)?;
    let t1 = trotter_states(&spec, &psi, TrotterOrder::First)?;
    let t2 = trotter_states(&spec, &psi, TrotterOrder::Second)?;
    let mut worst = f64::NEG_INFINITY;
    let (mut e1_sum, mut e2_sum) = (0.0, 0.0);
    for i in 1..exact.len() {
        let e = psi.apply_operator(&exact[i])?;
        let e1 = 1.0 - e.inner(&t1[i])?.norm();
        let e2 = 1.0 - e.inner(&t2[i])?.norm();
        e1_sum += e1;
        e2_sum += e2;
        worst = worst.max(e2 - e1);
    }
    Ok(CheckOutcome {
        name: "Trotter order 2 beats order 1",
        passed: worst <= 1e-14,
        detail: format!("mean infidelity {:.3e} (order 1) vs {:.3e} (order 2)", e1_sum / 100.0, e2_sum / 100.0),
    })
}

/// Both purifications reproduce the Gibbs state.
pub fn check_purifications() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for n in 2..=3 {
        for beta in [0.0, 1.0, 2.0] {
            let g = gibbs_state(&ThermalSpec::new(n, beta, ThermalMethod::Dense)?)?;
            let dense = eigenbasis_dephase(&dense_purified_state(&g)?, &g.eigenvectors)?;
            let tfd = partial_trace_b(&tfd_state(&g)?.projector(), n)?;
            for rho in [dense, tfd] {
                worst = worst.max((1.0 - uhlmann_fidelity(&rho, &g.rho)?).abs());
            }
            if beta == 0.0 {
                worst = worst.max((purity(&g.rho)? - 1.0 / (1u32 << n) as f64).abs());
            }
        }
    }
    Ok(outcome("thermal purifications", worst, 1e-9))
}

/// Circuit text survives a round trip.
pub fn check_circuit_text(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let mut bad = 0usize;
    for k in 0..instances {
        let (genome, _, _) = random_case(seed ^ 0xC1C1, k as u64)?;
        if genome.to_text().parse::<CircuitGenome>().ok().as_ref() != Some(&genome) {
            bad += 1;
        }
    }
    Ok(CheckOutcome {
        name: "circuit text round trip",
        passed: bad == 0,
        detail: format!("{bad} of {instances} failed"),
    })
}

pub fn run_all(seed: u64) -> Vec<std::result::Result<CheckOutcome, (&'static str, crate::Error)>> {
    vec![
        check_gradients(100, seed).map_err(|e| ("parameter-shift gradient", e)),
        check_risk_identity(50, seed).map_err(|e| ("risk equals infidelity", e)),
        check_trotter_ordering().map_err(|e| ("Trotter order 2 beats order 1", e)),
        check_purifications().map_err(|e| ("thermal purifications", e)),
        check_circuit_text(50, seed).map_err(|e| ("circuit text round trip", e)),
    ]
}
