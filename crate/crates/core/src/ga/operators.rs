use rand::Rng;

use crate::error::{invalid, Result};
use crate::genome::{CircuitGenome, Gene, GeneKind};

/// Indices of the `k` fittest entries, best first; ties go to the lower index.
pub fn select_elite(fitness: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// One-point crossover at each parent's midpoint (`len / 2`):
/// `c1 = p1.front ++ p2.back`, `c2 = p2.front ++ p1.back`.
pub fn crossover(p1: &CircuitGenome, p2: &CircuitGenome) -> Result<(CircuitGenome, CircuitGenome)> {
    if p1.num_qubits() != p2.num_qubits() {
        return Err(invalid(format!(
            "cannot cross a {}-qubit genome with a {}-qubit genome",
            p1.num_qubits(),
            p2.num_qubits()
        )));
    }
    let (a, b) = (p1.genes(), p2.genes());
    let (ha, hb) = (a.len() / 2, b.len() / 2);
    let c1 = a[..ha].iter().chain(&b[hb..]).copied().collect();
    let c2 = b[..hb].iter().chain(&a[ha..]).copied().collect();
    Ok((CircuitGenome::new(p1.num_qubits(), c1)?, CircuitGenome::new(p1.num_qubits(), c2)?))
}

/// Bit-flip mutation: each gene is independently replaced, with probability
/// `rate`, by a gene of a different pool kind on freshly drawn operands.
pub fn mutate<R: Rng + ?Sized>(genome: &CircuitGenome, rate: f64, rng: &mut R) -> Result<CircuitGenome> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(invalid(format!("mutation rate {rate} outside [0, 1]")));
    }
    let n = genome.num_qubits();
    let pool = GeneKind::pool_for(n);
    let genes = genome
        .genes()
        .iter()
        .map(|g| {
            if !rng.random_bool(rate) {
                return Ok(*g);
            }
            let others: Vec<GeneKind> = pool.iter().copied().filter(|&k| k != g.kind()).collect();
            let kind = others[rng.random_range(0..others.len())];
            let q0 = rng.random_range(0..n);
            if kind.arity() == 2 {
                let t = rng.random_range(0..n - 1);
                Gene::new(kind, &[q0, if t >= q0 { t + 1 } else { t }])
            } else {
                Gene::new(kind, &[q0])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CircuitGenome::new(n, genes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn line(kinds: &[GeneKind]) -> CircuitGenome {
        let genes = kinds
            .iter()
            .enumerate()
            .map(|(i, &k)| if k == GeneKind::Cx { Gene::new(k, &[0, 1]) } else { Gene::new(k, &[i % 2]) })
            .collect::<Result<Vec<_>>>()
            .unwrap();
        CircuitGenome::new(2, genes).unwrap()
    }

    #[test]
    fn elite_selection() {
        assert_eq!(select_elite(&[0.2, 0.9, 0.5], 2), vec![1, 2]);
        assert_eq!(select_elite(&[0.3, 0.3, 0.3, 0.3], 2), vec![0, 1]);
        assert_eq!(select_elite(&[0.2, 0.9, 0.5], 3), vec![1, 2, 0]);
    }

    #[test]
    fn crossover_swaps_halves() {
        use GeneKind::*;
        let p1 = line(&[H, S, Rx, Ry]);
        let p2 = line(&[Rz, Cx, H, Rx]);
        let (c1, c2) = crossover(&p1, &p2).unwrap();
        assert_eq!(&c1.genes()[..2], &p1.genes()[..2]);
        assert_eq!(c1.genes()[2].kind(), H);
        assert_eq!(c1.genes()[3].kind(), Rx);
        assert_eq!(c2.genes()[0].kind(), Rz);
        assert_eq!(c2.genes()[1].kind(), Cx);
        assert_eq!(c2.genes()[2].kind(), Rx);
        assert_eq!(c2.genes()[3].kind(), Ry);
        // Slots renumbered canonically in each child.
        assert_eq!(c1.param_count(), 1);
        assert_eq!(c2.param_count(), 3);
        assert_eq!(c2.genes()[0].param_slot(), Some(0));
    }

    #[test]
    fn crossover_degenerate_cases() {
        use GeneKind::*;
        let p = line(&[H, Rx, S, Ry, Rz]);
        let (c1, c2) = crossover(&p, &p).unwrap();
        assert_eq!((c1, c2), (p.clone(), p.clone()));
        let (c1, c2) = crossover(&CircuitGenome::empty(2), &p).unwrap();
        let shape = |g: &[Gene]| g.iter().map(|x| (x.kind(), x.qubits().to_vec())).collect::<Vec<_>>();
        assert_eq!(shape(c1.genes()), shape(&p.genes()[2..]));
        assert_eq!(shape(c2.genes()), shape(&p.genes()[..2]));
        assert_eq!(c1.genes()[1].param_slot(), Some(0));
    }

    #[test]
    fn mutation_extremes() {
        use GeneKind::*;
        let p = line(&[H, S, Cx, Rx, Ry, Rz, H, Cx]);
        let mut rng = stream(3, &[]);
        assert_eq!(mutate(&p, 0.0, &mut rng).unwrap(), p);
        let all = mutate(&p, 1.0, &mut rng).unwrap();
        for (a, b) in all.genes().iter().zip(p.genes()) {
            assert_ne!(a.kind(), b.kind());
        }
        assert!(mutate(&p, 1.5, &mut rng).is_err());
    }

    #[test]
    fn mutation_rate_is_binomial() {
        use GeneKind::*;
        let kinds: Vec<GeneKind> = (0..10_000).map(|i| [H, S, Rx, Ry, Rz][i % 5]).collect();
        let p = line(&kinds);
        let out = mutate(&p, 0.01, &mut stream(17, &[])).unwrap();
        let flips = out.genes().iter().zip(p.genes()).filter(|(a, b)| a.kind() != b.kind()).count() as f64;
        let sigma = (10_000.0f64 * 0.01 * 0.99).sqrt();
        assert!((flips - 100.0).abs() <= 3.0 * sigma, "{flips} flips");
    }
}
