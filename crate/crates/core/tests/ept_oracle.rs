use ept_core::channels::{axis_depolarizing, depolarizing, Axis, PauliChannelTable};
use ept_core::clifford::{automorphism_of, GateSpec};
use ept_core::oracle::{
    circuit_discrepancy, random_circuit, verify_random_circuits, ORACLE_SHAPES,
};
use ept_core::{ErrorProbabilityTensor, PauliLabel, StabilizerBasis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = ErrorProbabilityTensor<f64>;

#[test]
fn random_circuits_match_density_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &(m, n) in &ORACLE_SHAPES {
        for _ in 0..6 {
            let len = rng.random_range(1..=8);
            let circuit = random_circuit(m, n, len, &mut rng).unwrap();
            let err = circuit_discrepancy(m, n, &circuit, 20, &mut rng).unwrap();
            assert!(err < 1e-10, "D={m} n={n} err={err} circuit={circuit:?}");
        }
    }
}

#[test]
fn batch_oracle() {
    assert!(verify_random_circuits(40, 3, 7).unwrap() < 1e-10);
}

fn random_tensor(m: u32, n: usize, seed: u64) -> P {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = (m as usize).pow(2 * n as u32);
    let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut digits = vec![0u32; 2 * n];
    let mut entries = Vec::new();
    for &v in &raw {
        entries.push((digits.clone(), v / total));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    P::from_entries(m, n, 0, entries).unwrap()
}

fn sorted_values(p: &P) -> Vec<f64> {
    let mut v: Vec<f64> = p.entries().into_iter().map(|(_, x)| x).collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clifford_update_is_a_permutation(seed in any::<u64>(), m in 2u32..6, power in 1u32..5) {
        let p = random_tensor(m, 2, seed);
        let gate = GateSpec::cx(1, 0, power % m, m).unwrap();
        let q = p.apply_clifford(&automorphism_of(&gate, 2, m).unwrap()).unwrap();
        prop_assert_eq!(sorted_values(&p), sorted_values(&q));
        prop_assert!((p.total() - q.total()).abs() < 1e-14);
    }

    #[test]
    fn channel_order_is_irrelevant(seed in any::<u64>(), m in 2u32..5, f in 0.0f64..1.0, g in 0.0f64..1.0) {
        let p = random_tensor(m, 1, seed);
        let a = depolarizing(f, m, 1).unwrap();
        let b = axis_depolarizing(g, Axis::ZOnly, m).unwrap();
        let ab = p.apply_channel(&a).unwrap().apply_channel(&b).unwrap();
        let ba = p.apply_channel(&b).unwrap().apply_channel(&a).unwrap();
        for ((d1, v1), (d2, v2)) in ab.entries().iter().zip(ba.entries()) {
            prop_assert_eq!(d1, &d2);
            prop_assert!((v1 - v2).abs() < 1e-15);
        }
        prop_assert!((ab.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axis_channels_factorize(m in 2u32..6, f in 0.0f64..1.0, g in 0.0f64..1.0) {
        let x = axis_depolarizing(f, Axis::XOnly, m).unwrap();
        let z = axis_depolarizing(g, Axis::ZOnly, m).unwrap();
        let both = P::identity(m, 1).unwrap().apply_channel(&x).unwrap().apply_channel(&z).unwrap();
        for r in 0..m {
            for s in 0..m {
                let expected = x.get(&[r, 0]) * z.get(&[0, s]);
                prop_assert!((both.get(&[r, s]).unwrap() - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coset_reduction_ignores_generator_choice(seed in any::<u64>(), m in 2u32..6, a in 1u32..5, b in 0u32..5) {
        // Replace (g1, g2) by (a g1 + b g2, g2) with a a unit; same span.
        let a = (a % m).max(1);
        prop_assume!(ept_core::modarith::gcd(a as u64, m as u64) == 1);
        let p = random_tensor(m, 2, seed);
        let bell = StabilizerBasis::bell(m).unwrap();
        let g = bell.generators();
        let g1 = g[0]
            .scale(ept_core::Residue::new(a as u64, m).unwrap())
            .add(&g[1].scale(ept_core::Residue::new(b as u64, m).unwrap()))
            .unwrap();
        let other = StabilizerBasis::new(m, 2, vec![g1, g[1].clone()]).unwrap();
        let r1 = p.coset_reduce(&bell).unwrap();
        let r2 = p.coset_reduce(&other).unwrap();
        prop_assert_eq!(r1.entries().len(), r2.entries().len());
        for ((k1, v1), (k2, v2)) in r1.entries().iter().zip(r2.entries()) {
            prop_assert_eq!(k1, k2);
            prop_assert!((v1 - v2).abs() < 1e-15);
        }
        prop_assert!((r1.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operations_preserve_normalization(seed in any::<u64>(), f in 0.0f64..1.0) {
        let m = 3;
        let p = random_tensor(m, 2, seed);
        let chan = depolarizing(f, m, 2).unwrap();
        let steps = [
            p.apply_channel(&chan).unwrap(),
            p.measure_qudit(0).unwrap(),
            p.measure_x(1).unwrap(),
            p.discard_qudits(1).unwrap(),
            p.add_qudit().unwrap(),
        ];
        for s in &steps {
            prop_assert!((s.total() - 1.0).abs() < 1e-12);
            prop_assert!(s.entries().iter().all(|(_, v)| *v >= 0.0));
        }
    }
}

#[test]
fn parallel_convolution_is_deterministic() {
    let p = random_tensor(5, 2, 99);
    let chan = depolarizing(0.3f64, 5, 2).unwrap();
    let a = p.apply_channel(&chan).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| p.apply_channel(&chan).unwrap());
    assert_eq!(a, b);
}

#[test]
fn single_precision_tensor() {
    let chan: PauliChannelTable<f32> = depolarizing(0.1f32, 3, 1).unwrap();
    let p = ErrorProbabilityTensor::<f32>::identity(3, 1)
        .unwrap()
        .apply_channel(&chan)
        .unwrap();
    let x = PauliLabel::from_digits(&[1, 0], 3).unwrap();
    assert!((p.probability(&x).unwrap() - 0.1 / 9.0).abs() < 1e-7);
}
