//! Fidelity and logarithmic negativity of Bell-diagonal states
//! `rho = sum p_{r,s} (1 ⊗ X^r Z^s)|Psi><Psi|(1 ⊗ X^r Z^s)^dagger`.

use num_complex::Complex64;

use crate::ept::CosetStatistics;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, omega_pow, CMatrix};
use crate::scalar::Real;

/// Largest `D` for which [`density_matrix`] builds the `D^2 x D^2` matrix.
pub const DEFAULT_DENSE_MODULUS_CAP: u32 = 31;

/// A mixture of one-sided Pauli rotations of `|Psi>`, with weights in
/// double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct BellDiagonalState {
    modulus: u32,
    weights: Vec<f64>,
}

impl BellDiagonalState {
    pub fn new<T: Real>(stats: &CosetStatistics<T>) -> Self {
        BellDiagonalState {
            modulus: stats.modulus(),
            weights: stats.as_slice().iter().map(|w| w.to_f64_lossy()).collect(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Weight of `1 ⊗ X^r Z^s`.
    pub fn weight(&self, r: u32, s: u32) -> f64 {
        let m = self.modulus;
        self.weights[((r % m) * m + s % m) as usize]
    }
}

impl<T: Real> From<&CosetStatistics<T>> for BellDiagonalState {
    fn from(stats: &CosetStatistics<T>) -> Self {
        BellDiagonalState::new(stats)
    }
}

/// Uhlmann fidelity `sqrt(<Psi|rho|Psi>) = sqrt(p_{0,0})`.
pub fn fidelity(state: &BellDiagonalState) -> f64 {
    state.weight(0, 0).max(0.0).sqrt()
}

/// Explicit density matrix, with `D <= 31`.
pub fn density_matrix(state: &BellDiagonalState) -> Result<CMatrix> {
    density_matrix_with_cap(state, DEFAULT_DENSE_MODULUS_CAP)
}

pub fn density_matrix_with_cap(state: &BellDiagonalState, modulus_cap: u32) -> Result<CMatrix> {
    let m = state.modulus;
    if m > modulus_cap {
        return Err(Error::OracleCapExceeded {
            dim: (m as usize).pow(2),
            cap: (modulus_cap as usize).pow(2),
        });
    }
    let d = m as usize;
    let mut rho = CMatrix::zeros(d * d, d * d);
    let norm = 1.0 / d as f64;
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..m {
        for s in 0..m {
            let w = state.weight(r, s);
            if w == 0.0 {
                continue;
            }
            // (1 ⊗ X^r Z^s)|Psi> = (1/D) sum_{j,k} w^{jk + sk} |j, k + r>
            for j in 0..d {
                for k in 0..d {
                    let phase = omega_pow(((j * k + s as usize * k) % d) as u64, m);
                    v[j * d + (k + r as usize) % d] = phase * norm;
                }
            }
            for a in 0..d * d {
                if v[a].norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..d * d {
                    rho[(a, b)] += v[a] * v[b].conj() * w;
                }
            }
        }
    }
    Ok(rho)
}

/// `rho^{T_A}` of a `D^2 x D^2` matrix.
pub fn partial_transpose(rho: &CMatrix, modulus: u32) -> CMatrix {
    let d = modulus as usize;
    CMatrix::from_fn(d * d, d * d, |row, col| {
        let (x, y) = (row / d, row % d);
        let (xp, yp) = (col / d, col % d);
        rho[(xp * d + y, x * d + yp)]
    })
}

/// `log2 ||rho^{T_A}||_1` by diagonalizing the full partial transpose.
pub fn log_negativity_dense(state: &BellDiagonalState) -> Result<f64> {
    let rho = density_matrix(state)?;
    let pt = partial_transpose(&rho, state.modulus);
    let norm: f64 = hermitian_eigenvalues(&pt).iter().map(|e| e.abs()).sum();
    Ok(norm.log2().max(0.0))
}

/// The block of `rho^{T_A}` on `span{|k, t-k>}`:
/// `M_{k,k'} = (1/D) Q(t - k - k', k' - k)`, where `Q(a, c)` is the
/// discrete Fourier transform along the second index of
/// `q_{a,b} = p_{-b, a}`.
fn partial_transpose_block(q_hat: &[Complex64], modulus: u32, t: usize) -> CMatrix {
    let d = modulus as usize;
    CMatrix::from_fn(d, d, |k, kp| {
        let a = (t + 2 * d - k - kp) % d;
        let c = (kp + d - k) % d;
        q_hat[a * d + c] / d as f64
    })
}

/// `log2 ||rho^{T_A}||_1` from `D x D` blocks. The partial transpose splits
/// into `D` blocks indexed by `t = x + y`; blocks `t` and `t - 2` are
/// permutation-similar, so one block suffices for odd `D` and two for even
/// `D`.
pub fn log_negativity_fast(state: &BellDiagonalState) -> f64 {
    let m = state.modulus;
    let d = m as usize;
    // q_{a,b} = p_{r,s} with a = s, b = -r.
    let mut q_hat = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..d {
        for c in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..d {
                let r = (d - b) % d;
                let w = state.weight(r as u32, a as u32);
                if w != 0.0 {
                    acc += omega_pow(((b * c) % d) as u64, m) * w;
                }
            }
            q_hat[a * d + c] = acc;
        }
    }
    let block_norm = |t: usize| -> f64 {
        hermitian_eigenvalues(&partial_transpose_block(&q_hat, m, t))
            .iter()
            .map(|e| e.abs())
            .sum()
    };
    let norm = if d % 2 == 1 {
        d as f64 * block_norm(0)
    } else {
        (d / 2) as f64 * (block_norm(0) + block_norm(1))
    };
    norm.log2().max(0.0)
}

/// Logarithmic negativity, by the block formula.
pub fn log_negativity(state: &BellDiagonalState) -> f64 {
    log_negativity_fast(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn delta(m: u32) -> BellDiagonalState {
        let stats =
            CosetStatistics::from_fn(m, |r, s| if r == 0 && s == 0 { 1.0 } else { 0.0 }).unwrap();
        BellDiagonalState::new(&stats)
    }

    fn uniform(m: u32) -> BellDiagonalState {
        let w = 1.0 / (m as f64).powi(2);
        BellDiagonalState::new(&CosetStatistics::from_fn(m, |_, _| w).unwrap())
    }

    fn random_state(m: u32, rng: &mut ChaCha8Rng) -> BellDiagonalState {
        // Mix sparse and dense weight tables so both entangled and
        // separable states occur.
        let sparse = rng.random_bool(0.5);
        let raw: Vec<f64> = (0..m * m)
            .map(|_| {
                let x: f64 = rng.random();
                if sparse {
                    x.powi(8)
                } else {
                    x
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let stats = CosetStatistics::new(m, raw.iter().map(|x| x / total).collect()).unwrap();
        BellDiagonalState::new(&stats)
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(fidelity(&delta(5)), 1.0);
        assert!((fidelity(&uniform(13)) - 1.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_examples() {
        let rho = density_matrix(&delta(2)).unwrap();
        // |Psi> = (|00> + |01> + |10> - |11>)/2
        let psi = [0.5, 0.5, 0.5, -0.5];
        for a in 0..4 {
            for b in 0..4 {
                assert!((rho[(a, b)] - Complex64::new(psi[a] * psi[b], 0.0)).norm() < 1e-15);
            }
        }
        let mixed = density_matrix(&uniform(3)).unwrap();
        assert!((mixed - CMatrix::identity(9, 9).map(|x| x / 9.0)).norm() < 1e-14);
        assert!(matches!(
            density_matrix_with_cap(&delta(5), 3),
            Err(Error::OracleCapExceeded { .. })
        ));
    }

    #[test]
    fn density_matrices_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &m in &[2u32, 3, 4, 5] {
            let state = random_state(m, &mut rng);
            let rho = density_matrix(&state).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-13);
            assert!((&rho - rho.adjoint()).norm() < 1e-13);
            assert!(hermitian_eigenvalues(&rho).iter().all(|&e| e > -1e-12));
        }
    }

    #[test]
    fn negativity_examples() {
        for &m in &[2u32, 3, 5, 6] {
            let pure = delta(m);
            assert!((log_negativity_dense(&pure).unwrap() - (m as f64).log2()).abs() < 1e-10);
            assert!((log_negativity_fast(&pure) - (m as f64).log2()).abs() < 1e-10);
            assert!(log_negativity_fast(&uniform(m)).abs() < 1e-12);
            assert!(log_negativity_dense(&uniform(m)).unwrap().abs() < 1e-12);
        }
        let big = delta(101);
        assert!((log_negativity(&big) - 101f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn fast_path_matches_dense_diagonalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &m in &[2u32, 3, 4, 5, 7, 11] {
            for _ in 0..200 {
                let state = random_state(m, &mut rng);
                let fast = log_negativity_fast(&state);
                let dense = log_negativity_dense(&state).unwrap();
                assert!((fast - dense).abs() < 1e-9, "D={m}: {fast} vs {dense}");
                assert!(fast >= 0.0 && fast <= (m as f64).log2() + 1e-12);
            }
        }
    }

    #[test]
    fn negativity_is_invariant_under_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &m in &[3u32, 4, 5] {
            let state = random_state(m, &mut rng);
            let flipped = BellDiagonalState::new(
                &CosetStatistics::from_fn(m, |r, s| state.weight(m - r, m - s)).unwrap(),
            );
            let a = log_negativity_dense(&state).unwrap();
            let b = log_negativity_dense(&flipped).unwrap();
            assert!((a - b).abs() < 1e-10);
            assert!((log_negativity_fast(&flipped) - b).abs() < 1e-9);
        }
    }
}
