use crate::cost::{Target, TargetSet};
use crate::error::{invalid, Result};
use crate::rng::stream;
use crate::sim::haar_random_unitary;

const TAG_HAAR: u64 = 0x4841;

/// `n_train + n_test` independent Haar unitaries on `num_qubits` qubits. The
/// first `n_train` form the training split.
pub fn haar_target_set(num_qubits: usize, n_train: usize, n_test: usize, seed: u64) -> Result<TargetSet> {
    if num_qubits == 0 || n_train == 0 || n_test == 0 {
        return Err(invalid("qubit count and both split sizes must be at least 1"));
    }
    let total = n_train + n_test;
    let targets = (0..total)
        .map(|k| {
            let mut rng = stream(seed, &[TAG_HAAR, k as u64]);
            haar_random_unitary(1 << num_qubits, &mut rng).map(Target::Unitary)
        })
        .collect::<Result<Vec<_>>>()?;
    TargetSet::new(targets, (0..n_train).collect(), (n_train..total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(set: &TargetSet) -> nalgebra::DMatrix<crate::sim::C64> {
        match &set.targets()[0] {
            Target::Unitary(u) => u.matrix().clone(),
            Target::State(_) => unreachable!(),
        }
    }

    #[test]
    fn split_and_unitarity() {
        let set = haar_target_set(3, 20, 10, 4).unwrap();
        assert_eq!(set.train().len(), 20);
        assert_eq!(set.test().len(), 10);
        for t in set.targets() {
            let Target::Unitary(u) = t else { panic!() };
            assert!(u.unitary_deviation() < 1e-10);
        }
    }

    #[test]
    fn seeding() {
        let a = haar_target_set(2, 2, 1, 9).unwrap();
        let b = haar_target_set(2, 2, 1, 9).unwrap();
        let c = haar_target_set(2, 2, 1, 10).unwrap();
        assert_eq!(first(&a), first(&b));
        assert!((first(&a) - first(&c)).norm() > 0.1);
        assert!(haar_target_set(2, 0, 1, 0).is_err());
    }
}
