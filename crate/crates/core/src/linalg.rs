//! Dense complex linear algebra shared by the matrix oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default cap on the Hilbert-space dimension handled by dense oracles.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// `D^n`, or an error when it exceeds `cap`.
pub fn hilbert_dim(modulus: u32, n: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(modulus as usize)
            .filter(|&d| d <= cap)
            .ok_or(Error::OracleCapExceeded {
                dim: usize::MAX,
                cap,
            })?;
    }
    if dim > cap {
        return Err(Error::OracleCapExceeded { dim, cap });
    }
    Ok(dim)
}

/// `omega^k` with `omega = exp(2 pi i / D)`.
pub fn omega_pow(k: u64, modulus: u32) -> Complex64 {
    let k = k % modulus as u64;
    let angle = 2.0 * std::f64::consts::PI * k as f64 / modulus as f64;
    Complex64::from_polar(1.0, angle)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Whether `a = c * b` for some unit-modulus `c`, entrywise within `tol`.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    // Pick the phase from the largest entry of b.
    let (idx, pivot) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    if pivot.norm() < tol {
        return a.iter().all(|x| x.norm() < tol);
    }
    let phase = a.as_slice()[idx] / pivot;
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| (x - phase * y).norm() <= tol)
}

/// Haar-like random unitary from the QR decomposition of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phases of R's diagonal so the distribution does not depend on
    // the QR sign convention.
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random full-rank density matrix `U diag(p) U^dagger`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let weights: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let u = random_unitary(dim, rng);
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        weights.iter().map(|w| Complex64::new(w / total, 0.0)),
    ));
    &u * diag * u.adjoint()
}

/// Random pure state `|psi><psi|`.
pub fn random_pure_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let u = random_unitary(dim, rng);
    let psi = u.column(0).into_owned();
    &psi * psi.adjoint()
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(6, &mut rng);
        let id = CMatrix::identity(6, 6);
        assert!(max_abs_diff(&(&u * u.adjoint()), &id) < 1e-12);
    }

    #[test]
    fn random_density_matrix_is_a_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density_matrix(5, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&rho, &rho.adjoint()) < 1e-12);
        assert!(hermitian_eigenvalues(&rho).iter().all(|&e| e > 0.0));
    }

    #[test]
    fn phase_equivalence() {
        let a = CMatrix::identity(3, 3);
        let b = a.map(|x| x * omega_pow(1, 3));
        assert!(equal_up_to_phase(&a, &b, 1e-12));
        let mut c = a.clone();
        c[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(!equal_up_to_phase(&c, &b, 1e-12));
    }

    #[test]
    fn dimension_cap() {
        assert_eq!(hilbert_dim(3, 2, 4096).unwrap(), 9);
        assert!(hilbert_dim(2, 13, 4096).is_err());
    }
}
