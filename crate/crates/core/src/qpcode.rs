//! Quantum polynomial codes `[[2d-1, 1, d]]_D`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hilbert_dim, DEFAULT_ORACLE_CAP};
use crate::modarith::{
    check_modulus, evaluate_polynomial, is_prime, neg_mod, pow_mod, vandermonde_solve, Residue,
    ResidueVector,
};
use crate::pauli::PauliLabel;

/// Parameters `[[n, 1, d]]_D` of a code with the properties the repeater
/// analysis relies on: transversal CZ, independent X and Z correction, and
/// logical operators with invertible entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub modulus: u32,
    pub n: usize,
    pub d: usize,
}

impl CodeParams {
    pub fn new(modulus: u32, n: usize, d: usize) -> Result<Self> {
        check_modulus(modulus)?;
        if d == 0 || n == 0 || d > n {
            return Err(Error::InvalidCode(format!(
                "[[{n},1,{d}]] is not a valid code"
            )));
        }
        Ok(CodeParams { modulus, n, d })
    }

    /// `[[2d-1, 1, d]]_D`, the shape of a polynomial code, without requiring
    /// `D` prime.
    pub fn polynomial_shape(modulus: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidCode("distance must be at least 1".into()));
        }
        Self::new(modulus, 2 * d - 1, d)
    }

    /// Number of arbitrary single-qudit errors corrected, `floor((d-1)/2)`.
    pub fn correctable(&self) -> usize {
        (self.d - 1) / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumPolynomialCode {
    modulus: u32,
    d: usize,
}

impl QuantumPolynomialCode {
    /// Requires `D` prime and `1 <= d <= (D+1)/2`.
    pub fn new(modulus: u32, d: usize) -> Result<Self> {
        check_modulus(modulus)?;
        if !is_prime(modulus) {
            return Err(Error::NonPrimeModulus(modulus));
        }
        if d == 0 || d > (modulus as usize).div_ceil(2) {
            return Err(Error::InvalidCode(format!(
                "distance {d} outside 1..=(D+1)/2 for D = {modulus}"
            )));
        }
        Ok(QuantumPolynomialCode { modulus, d })
    }

    /// The subfamily `d = (D+1)/2`, `n = D`.
    pub fn maximal(modulus: u32) -> Result<Self> {
        Self::new(modulus, (modulus as usize).div_ceil(2))
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn num_physical(&self) -> usize {
        2 * self.d - 1
    }

    pub fn correctable(&self) -> usize {
        (self.d - 1) / 2
    }

    pub fn params(&self) -> CodeParams {
        CodeParams {
            modulus: self.modulus,
            n: self.num_physical(),
            d: self.d,
        }
    }

    /// `n = D`, where the parity-check rows are mutually orthogonal.
    pub fn is_maximal(&self) -> bool {
        self.num_physical() == self.modulus as usize
    }

    fn power_row(&self, j: u64) -> ResidueVector {
        let m = self.modulus;
        ResidueVector::new(
            (0..self.num_physical() as u32).map(|k| pow_mod(k % m, j, m) as u64),
            m,
        )
        .expect("valid modulus")
    }

    /// Rows `h_j = (k^j)_k` for `j = 0..d-2` over the points `0..n-1`,
    /// with `0^0 = 1`.
    pub fn parity_check_matrix(&self) -> Vec<ResidueVector> {
        (0..self.d as u64 - 1).map(|j| self.power_row(j)).collect()
    }

    fn require_maximal(&self) -> Result<()> {
        if !self.is_maximal() {
            return Err(Error::UnsupportedFamily(format!(
                "D = {}, d = {}",
                self.modulus, self.d
            )));
        }
        Ok(())
    }

    /// `X^{h_j}` for every row, then `Z^{h_j}` for every row.
    pub fn stabilizer_generators(&self) -> Result<Vec<PauliLabel>> {
        self.require_maximal()?;
        let n = self.num_physical();
        let zero = ResidueVector::zeros(n, self.modulus)?;
        let rows = self.parity_check_matrix();
        let mut out = Vec::with_capacity(2 * rows.len());
        for h in &rows {
            out.push(PauliLabel::new(h.clone(), zero.clone())?);
        }
        for h in &rows {
            out.push(PauliLabel::new(zero.clone(), h.clone())?);
        }
        Ok(out)
    }

    /// The vector `i = (k^{d-1})_k`.
    pub fn logical_vector(&self) -> ResidueVector {
        self.power_row(self.d as u64 - 1)
    }

    /// `X_L = X^i` and `Z_L = Z^{-i}`.
    pub fn logical_operators(&self) -> Result<(PauliLabel, PauliLabel)> {
        self.require_maximal()?;
        let n = self.num_physical();
        let zero = ResidueVector::zeros(n, self.modulus)?;
        let i = self.logical_vector();
        Ok((
            PauliLabel::new(i.clone(), zero.clone())?,
            PauliLabel::new(zero, i.neg())?,
        ))
    }

    /// Evaluation vector `(f(0), ..., f(n-1))` of the polynomial with the
    /// given coefficients `lambda_0..lambda_{d-1}`.
    pub fn encode_polynomial(&self, coeffs: &ResidueVector) -> Result<ResidueVector> {
        if coeffs.len() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for distance {}",
                coeffs.len(),
                self.d
            )));
        }
        let m = self.modulus;
        let evals: Vec<u64> = (0..self.num_physical() as u64)
            .map(|k| {
                evaluate_polynomial(coeffs, Residue::new(k, m).expect("valid modulus")).value()
                    as u64
            })
            .collect();
        ResidueVector::new(evals, m)
    }

    /// `|a_L> = D^{-(d-1)/2} sum_{lambda_{d-1} = a} |f(0), ..., f(n-1)>`.
    pub fn codeword_state(&self, a: Residue) -> Result<DVector<Complex64>> {
        self.codeword_state_with_cap(a, DEFAULT_ORACLE_CAP)
    }

    pub fn codeword_state_with_cap(&self, a: Residue, cap: usize) -> Result<DVector<Complex64>> {
        let m = self.modulus;
        if a.modulus() != m {
            return Err(Error::ModulusMismatch(a.modulus(), m));
        }
        let n = self.num_physical();
        let dim = hilbert_dim(m, n, cap)?;
        let free = self.d - 1;
        let norm = (m as f64).powi(free as i32).sqrt().recip();
        let mut state = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        let mut lambda = vec![0u32; free];
        loop {
            let mut coeffs: Vec<u64> = lambda.iter().map(|&x| x as u64).collect();
            coeffs.push(a.value() as u64);
            let evals = self.encode_polynomial(&ResidueVector::new(coeffs, m)?)?;
            let idx = evals
                .as_slice()
                .iter()
                .fold(0usize, |acc, &v| acc * m as usize + v as usize);
            state[idx] += Complex64::new(norm, 0.0);
            if !crate::pauli::increment(&mut lambda, m) {
                break;
            }
        }
        Ok(state)
    }

    /// Reconstructs the full evaluation vector from `d` known entries by
    /// interpolation.
    pub fn erasure_recover(
        &self,
        known_positions: &[usize],
        known_evals: &ResidueVector,
    ) -> Result<ResidueVector> {
        let m = self.modulus;
        let n = self.num_physical();
        if known_positions.len() < self.d {
            return Err(Error::TooFewPositions {
                needed: self.d,
                got: known_positions.len(),
            });
        }
        if known_evals.len() != known_positions.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} positions but {} values",
                known_positions.len(),
                known_evals.len()
            )));
        }
        if let Some(&bad) = known_positions.iter().find(|&&p| p >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        let take = self.d;
        let points = ResidueVector::new(known_positions[..take].iter().map(|&p| p as u64), m)?;
        let values =
            ResidueVector::new(known_evals.as_slice()[..take].iter().map(|&v| v as u64), m)?;
        let coeffs = vandermonde_solve(&points, &values)?;
        self.encode_polynomial(&coeffs)
    }
}

/// `-1 mod D`, the commutation phase of `X_L` and `Z_L`.
pub fn logical_commutation_target(modulus: u32) -> u32 {
    neg_mod(1, modulus)
}
