use gavqa::cost::{kernel, PreparedTarget, Target};
use gavqa::genome::CircuitGenome;
use gavqa::opt::{parameter_shift_grad, Objective};
use gavqa::rng::stream;
use gavqa::sim::{haar_random_unitary, DenseOperator, Gate, GateKind, Statevector, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

const KINDS: [GateKind; 11] = [
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::X,
    GateKind::Cx,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Rxx,
    GateKind::Ryy,
    GateKind::Rzz,
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn paulis() -> [DMatrix<C64>; 3] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// cos(θ/2)·I - i·sin(θ/2)·P for any P with P² = I.
fn rotation(p: &DMatrix<C64>, theta: f64) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(p.nrows(), p.ncols());
    id * c((theta / 2.0).cos(), 0.0) + p * c(0.0, -(theta / 2.0).sin())
}

fn local_matrix(kind: GateKind, theta: f64) -> DMatrix<C64> {
    let [x, y, z] = paulis();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = c(1.0, 0.0);
    let n = c(0.0, 0.0);
    match kind {
        GateKind::H => DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
        GateKind::S => DMatrix::from_row_slice(2, 2, &[o, n, n, c(0.0, 1.0)]),
        GateKind::Sdg => DMatrix::from_row_slice(2, 2, &[o, n, n, c(0.0, -1.0)]),
        GateKind::X => x,
        GateKind::Rx => rotation(&x, theta),
        GateKind::Ry => rotation(&y, theta),
        GateKind::Rz => rotation(&z, theta),
        GateKind::Rxx => rotation(&x.kronecker(&x), theta),
        GateKind::Ryy => rotation(&y.kronecker(&y), theta),
        GateKind::Rzz => rotation(&z.kronecker(&z), theta),
        GateKind::Cx => unreachable!(),
    }
}

/// Full matrix of a gate built by tensoring on an explicit operand order.
/// Qubit `q` is bit `q` of the basis index.
fn oracle_matrix(n: usize, kind: GateKind, qubits: &[usize], theta: f64) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    if kind == GateKind::Cx {
        let (ctl, tgt) = (qubits[0], qubits[1]);
        for col in 0..dim {
            let row = if col >> ctl & 1 == 1 { col ^ (1 << tgt) } else { col };
            m[(row, col)] = c(1.0, 0.0);
        }
        return m;
    }
    let local = local_matrix(kind, theta);
    for col in 0..dim {
        let sub_col = qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((col >> q & 1) << k));
        for sub_row in 0..local.nrows() {
            let mut row = col;
            for (k, &q) in qubits.iter().enumerate() {
                row = (row & !(1 << q)) | ((sub_row >> k & 1) << q);
            }
            m[(row, col)] += local[(sub_row, sub_col)];
        }
    }
    m
}

fn state_strategy(n: usize) -> impl Strategy<Value = Statevector> {
    any::<u64>().prop_map(move |seed| Statevector::random(n, &mut stream(seed, &[])))
}

fn gate_strategy(n: usize) -> impl Strategy<Value = (GateKind, Vec<usize>, f64)> {
    (0..KINDS.len(), 0..n, 1..n, -7.0f64..7.0).prop_map(move |(k, a, off, theta)| {
        let kind = KINDS[k];
        let qubits = if kind.arity() == 2 { vec![a, (a + off) % n] } else { vec![a] };
        (kind, qubits, theta)
    })
}

fn genome_strategy() -> impl Strategy<Value = (CircuitGenome, Vec<f64>)> {
    (1usize..4, 1usize..7, any::<u64>()).prop_flat_map(|(n, depth, seed)| {
        let g = CircuitGenome::random(n, depth, &mut stream(seed, &[1])).unwrap();
        let m = g.param_count();
        (Just(g), prop::collection::vec(-6.0f64..6.0, m))
    })
}

fn fidelity(a: &Statevector, b: &Statevector) -> f64 {
    a.inner(b).unwrap().norm_sqr()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gates_match_kron_oracle(n in 2usize..5, (kind, qubits, theta) in gate_strategy(4), seed in any::<u64>()) {
        prop_assume!(qubits.iter().all(|&q| q < n));
        let psi = Statevector::random(n, &mut stream(seed, &[]));
        let mut got = psi.clone();
        let theta_opt = kind.is_parametric().then_some(theta);
        got.apply_gate(kind, &qubits, theta_opt).unwrap();
        let m = oracle_matrix(n, kind, &qubits, theta);
        let want = m * DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes());
        for (g, w) in got.amplitudes().iter().zip(want.iter()) {
            prop_assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm(psi in state_strategy(3), (kind, qubits, theta) in gate_strategy(3)) {
        let mut s = psi;
        s.apply(&Gate::new(kind, &qubits, kind.is_parametric().then_some(theta)).unwrap()).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_inverse_round_trips(psi in state_strategy(3), (kind, qubits, theta) in gate_strategy(3)) {
        let g = Gate::new(kind, &qubits, kind.is_parametric().then_some(theta)).unwrap();
        let mut s = psi.clone();
        s.apply(&g).unwrap();
        s.apply(&g.inverse()).unwrap();
        prop_assert!((fidelity(&s, &psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_adjoint_round_trips((g, theta) in genome_strategy(), seed in any::<u64>()) {
        let psi = Statevector::random(g.num_qubits(), &mut stream(seed, &[]));
        let fwd = g.bind_and_run(&theta, &psi, false).unwrap();
        let back = g.bind_and_run(&theta, &fwd, true).unwrap();
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-12);
        prop_assert!((fidelity(&back, &psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn genome_text_round_trips((g, _) in genome_strategy()) {
        let text = g.to_text();
        let parsed: CircuitGenome = text.parse().unwrap();
        prop_assert_eq!(parsed.to_text(), text);
        prop_assert_eq!(parsed.metrics(), g.metrics());
    }

    #[test]
    fn kernel_ignores_global_phase((g, theta) in genome_strategy(), seed in any::<u64>(), phi in -3.2f64..3.2) {
        let n = g.num_qubits();
        let u = haar_random_unitary(1 << n, &mut stream(seed, &[2])).unwrap();
        let shifted = DenseOperator::new(u.matrix() * C64::from_polar(1.0, phi));
        let reference = Statevector::zero(n);
        let k0 = kernel(&Target::Unitary(u), &g, &theta, &reference).unwrap();
        let k1 = kernel(&Target::Unitary(shifted), &g, &theta, &reference).unwrap();
        prop_assert!((0.0..=1.0).contains(&k0));
        prop_assert!((k0 - k1).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_own_circuit_is_one((g, theta) in genome_strategy()) {
        let n = g.num_qubits();
        let reference = Statevector::zero(n);
        let target = Target::State(g.bind_and_run(&theta, &reference, false).unwrap());
        let k = kernel(&target, &g, &theta, &reference).unwrap();
        prop_assert!((k - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shift_rule_matches_finite_differences((g, theta) in genome_strategy(), seed in any::<u64>()) {
        prop_assume!(!theta.is_empty());
        let n = g.num_qubits();
        let u = haar_random_unitary(1 << n, &mut stream(seed, &[3])).unwrap();
        let prepared = PreparedTarget::new(&Target::Unitary(u), &Statevector::zero(n)).unwrap();
        let obj = prepared.objective(&g);
        let grad = parameter_shift_grad(&obj, &theta).unwrap();
        let h = 1e-5;
        for (i, gi) in grad.iter().enumerate() {
            let mut p = theta.clone();
            p[i] += h;
            let plus = obj.evaluate(&p).unwrap();
            p[i] -= 2.0 * h;
            let minus = obj.evaluate(&p).unwrap();
            prop_assert!((gi - (plus - minus) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn random_genome_hits_depth(n in 1usize..5, depth in 1usize..12, seed in any::<u64>()) {
        let g = CircuitGenome::random(n, depth, &mut stream(seed, &[])).unwrap();
        prop_assert_eq!(g.depth(), depth);
    }
}
