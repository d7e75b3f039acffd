//! Generalized Pauli operators `X^r Z^s` on `n` qudits, labeled by their
//! exponent vectors.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hilbert_dim, omega_pow, CMatrix, DEFAULT_ORACLE_CAP};
use crate::modarith::{add_mod, check_modulus, mul_mod, Residue, ResidueVector};

/// Exponent label `(r, s)` of `X^r Z^s`, identifying a Pauli operator up to
/// a global phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    x_exp: ResidueVector,
    z_exp: ResidueVector,
}

impl PauliLabel {
    pub fn new(x_exp: ResidueVector, z_exp: ResidueVector) -> Result<Self> {
        if x_exp.modulus() != z_exp.modulus() {
            return Err(Error::ModulusMismatch(x_exp.modulus(), z_exp.modulus()));
        }
        if x_exp.len() != z_exp.len() {
            return Err(Error::ShapeMismatch(format!(
                "x exponents have length {}, z exponents {}",
                x_exp.len(),
                z_exp.len()
            )));
        }
        Ok(PauliLabel { x_exp, z_exp })
    }

    pub fn identity(n: usize, modulus: u32) -> Result<Self> {
        Ok(PauliLabel {
            x_exp: ResidueVector::zeros(n, modulus)?,
            z_exp: ResidueVector::zeros(n, modulus)?,
        })
    }

    /// `X^r Z^s` acting on a single qudit of an `n`-qudit register.
    pub fn single(qudit: usize, r: u64, s: u64, n: usize, modulus: u32) -> Result<Self> {
        if qudit >= n {
            return Err(Error::IndexOutOfRange {
                index: qudit,
                len: n,
            });
        }
        check_modulus(modulus)?;
        let mut x = vec![0u32; n];
        let mut z = vec![0u32; n];
        x[qudit] = (r % modulus as u64) as u32;
        z[qudit] = (s % modulus as u64) as u32;
        Ok(PauliLabel {
            x_exp: ResidueVector::from_reduced(x, modulus),
            z_exp: ResidueVector::from_reduced(z, modulus),
        })
    }

    /// Builds a label from the concatenated digits `(r_1..r_n, s_1..s_n)`.
    pub fn from_digits(digits: &[u32], modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        if !digits.len().is_multiple_of(2) {
            return Err(Error::ShapeMismatch(format!(
                "odd number of label digits: {}",
                digits.len()
            )));
        }
        let n = digits.len() / 2;
        let red: Vec<u32> = digits.iter().map(|&d| d % modulus).collect();
        Ok(PauliLabel {
            x_exp: ResidueVector::from_reduced(red[..n].to_vec(), modulus),
            z_exp: ResidueVector::from_reduced(red[n..].to_vec(), modulus),
        })
    }

    /// Concatenated digits `(r_1..r_n, s_1..s_n)`.
    pub fn digits(&self) -> Vec<u32> {
        let mut d = self.x_exp.as_slice().to_vec();
        d.extend_from_slice(self.z_exp.as_slice());
        d
    }

    pub fn x_exp(&self) -> &ResidueVector {
        &self.x_exp
    }

    pub fn z_exp(&self) -> &ResidueVector {
        &self.z_exp
    }

    pub fn modulus(&self) -> u32 {
        self.x_exp.modulus()
    }

    pub fn num_qudits(&self) -> usize {
        self.x_exp.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x_exp.is_zero() && self.z_exp.is_zero()
    }

    /// Label of the product, ignoring the phase.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(PauliLabel {
            x_exp: self.x_exp.add(&other.x_exp)?,
            z_exp: self.z_exp.add(&other.z_exp)?,
        })
    }

    pub fn neg(&self) -> Self {
        PauliLabel {
            x_exp: self.x_exp.neg(),
            z_exp: self.z_exp.neg(),
        }
    }

    pub fn scale(&self, c: Residue) -> Self {
        PauliLabel {
            x_exp: self.x_exp.scale(c),
            z_exp: self.z_exp.scale(c),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        if self.num_qudits() != other.num_qudits() {
            return Err(Error::ShapeMismatch(format!(
                "labels on {} and {} qudits",
                self.num_qudits(),
                other.num_qudits()
            )));
        }
        Ok(())
    }

    /// Dense matrix `sum_k omega^{k.s} |k+r><k|`.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.to_matrix_with_cap(DEFAULT_ORACLE_CAP)
    }

    pub fn to_matrix_with_cap(&self, cap: usize) -> Result<CMatrix> {
        let m = self.modulus();
        let n = self.num_qudits();
        let dim = hilbert_dim(m, n, cap)?;
        let r = self.x_exp.as_slice();
        let s = self.z_exp.as_slice();
        let mut out = CMatrix::zeros(dim, dim);
        let mut k = vec![0u32; n];
        for col in 0..dim {
            let mut row = 0usize;
            let mut phase = 0u32;
            for q in 0..n {
                row = row * m as usize + add_mod(k[q], r[q], m) as usize;
                phase = add_mod(phase, mul_mod(k[q], s[q], m), m);
            }
            out[(row, col)] = omega_pow(phase as u64, m);
            increment(&mut k, m);
        }
        Ok(out)
    }

    /// Parses the rendering produced by `Display`, e.g. `X2Z1@q0 * X0Z3@q2`
    /// or `I`.
    pub fn parse(text: &str, n: usize, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        let mut x = vec![0u32; n];
        let mut z = vec![0u32; n];
        let text = text.trim();
        if text != "I" {
            for factor in text.split('*') {
                let factor = factor.trim();
                let bad = || Error::ShapeMismatch(format!("malformed Pauli factor '{factor}'"));
                let (ops, qudit) = factor.split_once("@q").ok_or_else(bad)?;
                let qudit: usize = qudit.trim().parse().map_err(|_| bad())?;
                if qudit >= n {
                    return Err(Error::IndexOutOfRange {
                        index: qudit,
                        len: n,
                    });
                }
                let ops = ops.trim().strip_prefix('X').ok_or_else(bad)?;
                let (xr, zs) = ops.split_once('Z').ok_or_else(bad)?;
                let xr: u64 = xr.parse().map_err(|_| bad())?;
                let zs: u64 = zs.parse().map_err(|_| bad())?;
                x[qudit] = add_mod(x[qudit], (xr % modulus as u64) as u32, modulus);
                z[qudit] = add_mod(z[qudit], (zs % modulus as u64) as u32, modulus);
            }
        }
        Ok(PauliLabel {
            x_exp: ResidueVector::from_reduced(x, modulus),
            z_exp: ResidueVector::from_reduced(z, modulus),
        })
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .x_exp
            .as_slice()
            .iter()
            .zip(self.z_exp.as_slice())
            .enumerate()
            .filter(|(_, (r, s))| **r != 0 || **s != 0)
            .map(|(q, (r, s))| format!("X{r}Z{s}@q{q}"))
            .collect();
        if parts.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Odometer increment over (Z/DZ)^n, last digit fastest.
pub(crate) fn increment(digits: &mut [u32], modulus: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < modulus {
            return true;
        }
        *d = 0;
    }
    false
}

/// Exponent `t` with `(X^r Z^s)(X^r' Z^s') = omega^t (X^r' Z^s')(X^r Z^s)`
/// where `a = (r, s)` and `b = (r', s')`: `t = r'.s - r.s'`.
pub fn commutation_phase(a: &PauliLabel, b: &PauliLabel) -> Result<Residue> {
    a.check_compatible(b)?;
    let t = b.x_exp.dot(&a.z_exp)? - a.x_exp.dot(&b.z_exp)?;
    Ok(t)
}

/// A Pauli operator with an explicit power of `omega` in front.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub label: PauliLabel,
    pub phase_exp: Residue,
}

impl PhasedPauli {
    pub fn new(label: PauliLabel) -> Self {
        let phase_exp = Residue::zero(label.modulus()).expect("valid modulus");
        PhasedPauli { label, phase_exp }
    }

    /// Operator product, using `Z^s X^r' = omega^{s.r'} X^r' Z^s`.
    pub fn compose(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        self.label.check_compatible(&other.label)?;
        let cross = self.label.z_exp.dot(&other.label.x_exp)?;
        Ok(PhasedPauli {
            label: self.label.add(&other.label)?,
            phase_exp: self.phase_exp + other.phase_exp + cross,
        })
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let m = self.label.to_matrix()?;
        let ph: Complex64 = omega_pow(self.phase_exp.value() as u64, self.label.modulus());
        Ok(m.map(|x| x * ph))
    }
}
