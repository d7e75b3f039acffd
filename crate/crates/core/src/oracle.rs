//! Density-matrix cross-checks of the tensor calculus on small random
//! circuits.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{axis_depolarizing, depolarizing, Axis, PauliChannelTable};
use crate::clifford::{automorphism_of, gate_unitary, GateSpec};
use crate::ept::ErrorProbabilityTensor;
use crate::error::{Error, Result};
use crate::linalg::{
    hilbert_dim, max_abs_diff, random_density_matrix, CMatrix, DEFAULT_ORACLE_CAP,
};
use crate::modarith::gcd;
use crate::pauli::PauliLabel;

/// One step of a noisy circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate(GateSpec),
    Channel {
        table: PauliChannelTable<f64>,
        qudits: Vec<usize>,
    },
}

/// Propagates the error tensor through the circuit, starting error-free.
pub fn propagate(
    modulus: u32,
    n: usize,
    circuit: &[Instruction],
) -> Result<ErrorProbabilityTensor<f64>> {
    let mut p = ErrorProbabilityTensor::identity(modulus, n)?;
    for inst in circuit {
        p = match inst {
            Instruction::Gate(g) => p.apply_clifford(&automorphism_of(g, n, modulus)?)?,
            Instruction::Channel { table, qudits } => p.apply_channel_on(table, qudits)?,
        };
    }
    Ok(p)
}

/// Product of the ideal gate unitaries.
pub fn ideal_unitary(modulus: u32, n: usize, circuit: &[Instruction]) -> Result<CMatrix> {
    let dim = hilbert_dim(modulus, n, DEFAULT_ORACLE_CAP)?;
    let mut u = CMatrix::identity(dim, dim);
    for inst in circuit {
        if let Instruction::Gate(g) = inst {
            u = gate_unitary(g, n, modulus, DEFAULT_ORACLE_CAP)? * u;
        }
    }
    Ok(u)
}

fn embed(label: &PauliLabel, qudits: &[usize], n: usize) -> Result<PauliLabel> {
    let m = label.modulus();
    let d = label.digits();
    let k = qudits.len();
    let mut full = vec![0u32; 2 * n];
    for (i, &q) in qudits.iter().enumerate() {
        full[q] = d[i];
        full[n + q] = d[k + i];
    }
    PauliLabel::from_digits(&full, m)
}

/// Runs the noisy circuit directly on a density matrix.
pub fn run_dense(
    modulus: u32,
    n: usize,
    circuit: &[Instruction],
    rho: &CMatrix,
) -> Result<CMatrix> {
    let mut state = rho.clone();
    for inst in circuit {
        state = match inst {
            Instruction::Gate(g) => {
                let u = gate_unitary(g, n, modulus, DEFAULT_ORACLE_CAP)?;
                &u * &state * u.adjoint()
            }
            Instruction::Channel { table, qudits } => {
                let dim = state.nrows();
                let mut out = CMatrix::zeros(dim, dim);
                for (label, w) in table.entries() {
                    let p = embed(&label, qudits, n)?.to_matrix()?;
                    out += (&p * &state * p.adjoint()).map(|x| x * w);
                }
                out
            }
        };
    }
    Ok(state)
}

/// Largest entrywise difference between the tensor prediction
/// `E(U rho U^dagger)` and direct simulation, over `trials` random states.
pub fn circuit_discrepancy<R: Rng + ?Sized>(
    modulus: u32,
    n: usize,
    circuit: &[Instruction],
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let p = propagate(modulus, n, circuit)?;
    let u = ideal_unitary(modulus, n, circuit)?;
    let dim = u.nrows();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let rho = random_density_matrix(dim, rng);
        let predicted = p.to_dense_channel_matrix(&(&u * &rho * u.adjoint()))?;
        let direct = run_dense(modulus, n, circuit, &rho)?;
        worst = worst.max(max_abs_diff(&predicted, &direct));
    }
    Ok(worst)
}

fn two_distinct<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Draws a circuit of `len` instructions from F, M(l), CX^a, CZ^b, DEP,
/// DEPX and DEPZ.
pub fn random_circuit<R: Rng + ?Sized>(
    modulus: u32,
    n: usize,
    len: usize,
    rng: &mut R,
) -> Result<Vec<Instruction>> {
    let m = modulus;
    let units: Vec<u32> = (1..m).filter(|&l| gcd(l as u64, m as u64) == 1).collect();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = if n >= 2 {
            rng.random_range(0..7)
        } else {
            [0, 1, 4, 5, 6][rng.random_range(0..5)]
        };
        let q = rng.random_range(0..n);
        let f: f64 = rng.random();
        let inst = match kind {
            0 => Instruction::Gate(GateSpec::Fourier { qudit: q }),
            1 => Instruction::Gate(GateSpec::MultiplyBy {
                multiplier: *units.choose(rng).expect("1 is a unit"),
                qudit: q,
            }),
            2 => {
                let (c, t) = two_distinct(n, rng);
                Instruction::Gate(GateSpec::cx(c, t, rng.random_range(1..m), m)?)
            }
            3 => {
                let (c, t) = two_distinct(n, rng);
                Instruction::Gate(GateSpec::cz(c, t, rng.random_range(1..m), m)?)
            }
            4 => {
                if n >= 2 && rng.random_bool(0.5) {
                    let (a, b) = two_distinct(n, rng);
                    Instruction::Channel {
                        table: depolarizing(f, m, 2)?,
                        qudits: vec![a, b],
                    }
                } else {
                    Instruction::Channel {
                        table: depolarizing(f, m, 1)?,
                        qudits: vec![q],
                    }
                }
            }
            5 => Instruction::Channel {
                table: axis_depolarizing(f, Axis::XOnly, m)?,
                qudits: vec![q],
            },
            _ => Instruction::Channel {
                table: axis_depolarizing(f, Axis::ZOnly, m)?,
                qudits: vec![q],
            },
        };
        out.push(inst);
    }
    Ok(out)
}

/// Register shapes exercised by the random-circuit oracle.
pub const ORACLE_SHAPES: [(u32, usize); 4] = [(2, 2), (3, 2), (5, 1), (2, 3)];

/// Runs `circuits` random circuits of at most 8 instructions, cycling
/// through [`ORACLE_SHAPES`], each against `trials` random states. Returns
/// the largest discrepancy seen.
pub fn verify_random_circuits(circuits: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..circuits {
        let (m, n) = ORACLE_SHAPES[i % ORACLE_SHAPES.len()];
        let len = rng.random_range(1..=8);
        let circuit = random_circuit(m, n, len, &mut rng)?;
        worst = worst.max(circuit_discrepancy(m, n, &circuit, trials, &mut rng)?);
    }
    if worst.is_nan() {
        return Err(Error::InvalidScenario("oracle produced NaN".into()));
    }
    Ok(worst)
}
