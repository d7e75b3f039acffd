//! Arithmetic in Z/DZ with a runtime modulus.
//!
//! Values are stored as `u32` in `[0, D)`; products go through `u64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= d as u64 {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn check_modulus(modulus: u32) -> Result<()> {
    if modulus < 2 {
        Err(Error::InvalidModulus(modulus))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, m: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % m as u64) as u32
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, m: u32) -> u32 {
    let s = a as u64 + m as u64 - (b % m) as u64;
    (s % m as u64) as u32
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, m: u32) -> u32 {
    ((a as u64 * b as u64) % m as u64) as u32
}

#[inline]
pub(crate) fn neg_mod(a: u32, m: u32) -> u32 {
    sub_mod(0, a, m)
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub(crate) fn reduce_i64(a: i64, m: u32) -> u32 {
    a.rem_euclid(m as i64) as u32
}

/// `base^exp mod m` with `0^0 = 1`.
pub(crate) fn pow_mod(base: u32, mut exp: u64, m: u32) -> u32 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u32, m: u32) -> Option<u32> {
    let (mut old_r, mut r) = (a as i64 % m as i64, m as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r == 1 {
        Some(reduce_i64(old_s, m))
    } else {
        None
    }
}

/// An element of Z/DZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u32,
    modulus: u32,
}

impl Residue {
    /// Reduces `value` modulo `modulus`.
    pub fn new(value: u64, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Residue {
            value: (value % modulus as u64) as u32,
            modulus,
        })
    }

    pub fn from_i64(value: i64, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Residue {
            value: reduce_i64(value, modulus),
            modulus,
        })
    }

    pub fn zero(modulus: u32) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u32) -> Result<Self> {
        Self::new(1, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_unit(self) -> bool {
        gcd(self.value as u64, self.modulus as u64) == 1
    }

    pub fn inverse(self) -> Result<Self> {
        inv_mod(self.value, self.modulus)
            .map(|value| Residue {
                value,
                modulus: self.modulus,
            })
            .ok_or(Error::NotInvertible {
                value: self.value,
                modulus: self.modulus,
            })
    }

    /// `self^exp` with the convention `0^0 = 1`.
    pub fn pow(self, exp: u64) -> Self {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    fn same_ring(self, other: Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "arithmetic between residues of different moduli"
        );
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Self) -> Self {
        self.same_ring(rhs);
        Residue {
            value: add_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Self) -> Self {
        self.same_ring(rhs);
        Residue {
            value: sub_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Self) -> Self {
        self.same_ring(rhs);
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Self {
        Residue {
            value: neg_mod(self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// A vector in (Z/DZ)^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueVector {
    modulus: u32,
    entries: Vec<u32>,
}

impl ResidueVector {
    /// Builds a vector, reducing every entry modulo `modulus`.
    pub fn new(entries: impl IntoIterator<Item = u64>, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        let entries = entries
            .into_iter()
            .map(|e| (e % modulus as u64) as u32)
            .collect();
        Ok(ResidueVector { modulus, entries })
    }

    pub fn from_i64(entries: impl IntoIterator<Item = i64>, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        let entries = entries
            .into_iter()
            .map(|e| reduce_i64(e, modulus))
            .collect();
        Ok(ResidueVector { modulus, entries })
    }

    pub fn zeros(len: usize, modulus: u32) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ResidueVector {
            modulus,
            entries: vec![0; len],
        })
    }

    /// Crate-internal constructor for entries already reduced.
    pub(crate) fn from_reduced(entries: Vec<u32>, modulus: u32) -> Self {
        debug_assert!(entries.iter().all(|&e| e < modulus));
        ResidueVector { modulus, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Option<Residue> {
        self.entries.get(i).map(|&value| Residue {
            value,
            modulus: self.modulus,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Residue> + '_ {
        self.entries.iter().map(move |&value| Residue {
            value,
            modulus: self.modulus,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> Result<Residue> {
        self.check_compatible(other)?;
        let m = self.modulus as u64;
        let value = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % m);
        Ok(Residue {
            value: value as u32,
            modulus: self.modulus,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, self.modulus))
            .collect();
        Ok(ResidueVector {
            modulus: self.modulus,
            entries,
        })
    }

    pub fn neg(&self) -> Self {
        ResidueVector {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .map(|&a| neg_mod(a, self.modulus))
                .collect(),
        }
    }

    pub fn scale(&self, c: Residue) -> Self {
        assert_eq!(c.modulus, self.modulus);
        ResidueVector {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .map(|&a| mul_mod(a, c.value, self.modulus))
                .collect(),
        }
    }
}

/// Evaluates `coeffs[0] + coeffs[1] x + ...` in F_D.
pub fn evaluate_polynomial(coeffs: &ResidueVector, x: Residue) -> Residue {
    let m = coeffs.modulus();
    assert_eq!(m, x.modulus());
    let value = coeffs
        .as_slice()
        .iter()
        .rev()
        .fold(0u32, |acc, &c| add_mod(mul_mod(acc, x.value(), m), c, m));
    Residue { value, modulus: m }
}

/// Recovers the coefficients of the unique polynomial of degree `< d` that
/// takes the values `evals` at the `d` distinct `points`.
///
/// Solved by Lagrange interpolation over F_D.
pub fn vandermonde_solve(points: &ResidueVector, evals: &ResidueVector) -> Result<ResidueVector> {
    let m = points.modulus();
    if evals.modulus() != m {
        return Err(Error::ModulusMismatch(m, evals.modulus()));
    }
    if !is_prime(m) {
        return Err(Error::NonPrimeModulus(m));
    }
    let d = points.len();
    if evals.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "{} points but {} values",
            d,
            evals.len()
        )));
    }
    if d > m as usize {
        return Err(Error::ShapeMismatch(format!(
            "{d} interpolation points exceed field size {m}"
        )));
    }
    let xs = points.as_slice();
    for (i, &xi) in xs.iter().enumerate() {
        if xs[..i].contains(&xi) {
            return Err(Error::DuplicatePoint(xi));
        }
    }

    let mut coeffs = vec![0u32; d];
    for (i, &xi) in xs.iter().enumerate() {
        // Numerator polynomial prod_{j != i} (T - x_j), built in ascending order.
        let mut basis = vec![1u32];
        let mut denom = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![0u32; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = add_mod(next[k + 1], b, m);
                next[k] = sub_mod(next[k], mul_mod(b, xj, m), m);
            }
            basis = next;
            denom = mul_mod(denom, sub_mod(xi, xj, m), m);
        }
        let scale = mul_mod(
            evals.as_slice()[i],
            inv_mod(denom, m).expect("distinct points in a field"),
            m,
        );
        for (c, &b) in coeffs.iter_mut().zip(&basis) {
            *c = add_mod(*c, mul_mod(b, scale, m), m);
        }
    }
    Ok(ResidueVector::from_reduced(coeffs, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(v: u64, m: u32) -> Residue {
        Residue::new(v, m).unwrap()
    }

    /// Brute-force inverse by exhaustive search.
    fn search_inverse(x: u32, m: u32) -> Option<u32> {
        (0..m).find(|&y| (x as u64 * y as u64) % m as u64 == 1)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(r(1, 5).inverse().unwrap(), r(1, 5));
        assert_eq!(search_inverse(2, 5), Some(3));
        assert_eq!(r(2, 5).inverse().unwrap(), r(3, 5));
        assert_eq!(
            r(2, 4).inverse(),
            Err(Error::NotInvertible {
                value: 2,
                modulus: 4
            })
        );
    }

    #[test]
    fn inverse_agrees_with_search() {
        for m in 2..=40u32 {
            for x in 0..m {
                assert_eq!(
                    r(x as u64, m).inverse().ok().map(|y| y.value()),
                    search_inverse(x, m)
                );
            }
        }
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(r(0, 7).pow(0), r(1, 7));
        assert_eq!(r(0, 7).pow(3), r(0, 7));
        assert_eq!(r(3, 7).pow(6), r(1, 7));
    }

    #[test]
    fn invalid_modulus_rejected() {
        assert_eq!(Residue::new(0, 1), Err(Error::InvalidModulus(1)));
        assert!(ResidueVector::zeros(3, 0).is_err());
    }

    #[test]
    fn vector_ops() {
        let a = ResidueVector::new([1, 2, 3], 5).unwrap();
        let b = ResidueVector::new([4, 4, 4], 5).unwrap();
        assert_eq!(a.dot(&b).unwrap(), r(24, 5));
        assert_eq!(a.add(&b).unwrap().as_slice(), &[0, 1, 2]);
        assert_eq!(a.neg().as_slice(), &[4, 3, 2]);
        let c = ResidueVector::new([1, 2], 5).unwrap();
        assert!(matches!(a.dot(&c), Err(Error::ShapeMismatch(_))));
        let d = ResidueVector::new([1, 2, 3], 7).unwrap();
        assert_eq!(a.add(&d), Err(Error::ModulusMismatch(5, 7)));
    }

    #[test]
    fn vandermonde_constant() {
        for c in 0..3 {
            let pts = ResidueVector::new([0, 1], 3).unwrap();
            let ev = ResidueVector::new([c, c], 3).unwrap();
            assert_eq!(
                vandermonde_solve(&pts, &ev).unwrap().as_slice(),
                &[c as u32, 0]
            );
        }
    }

    #[test]
    fn vandermonde_quadratic_matches_brute_force() {
        let pts = ResidueVector::new([0, 1, 2], 3).unwrap();
        let ev = ResidueVector::new([1, 2, 0], 3).unwrap();
        // Enumerate all 27 coefficient triples over F_3.
        let mut found = Vec::new();
        for l0 in 0..3u64 {
            for l1 in 0..3u64 {
                for l2 in 0..3u64 {
                    let c = ResidueVector::new([l0, l1, l2], 3).unwrap();
                    let ok = (0..3).all(|x| {
                        evaluate_polynomial(&c, r(x, 3)).value() == ev.as_slice()[x as usize]
                    });
                    if ok {
                        found.push(c);
                    }
                }
            }
        }
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].as_slice(), &[1, 1, 0]);
        assert_eq!(vandermonde_solve(&pts, &ev).unwrap(), found[0]);
    }

    #[test]
    fn vandermonde_errors() {
        let pts = ResidueVector::new([0, 0], 5).unwrap();
        let ev = ResidueVector::new([1, 2], 5).unwrap();
        assert_eq!(vandermonde_solve(&pts, &ev), Err(Error::DuplicatePoint(0)));
        let pts = ResidueVector::new([0, 1], 4).unwrap();
        let ev = ResidueVector::new([1, 2], 4).unwrap();
        assert_eq!(vandermonde_solve(&pts, &ev), Err(Error::NonPrimeModulus(4)));
    }

    #[test]
    fn vandermonde_inverts_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(m, d) in &[(3u32, 2usize), (5, 3), (7, 4)] {
            for _ in 0..1000 {
                let mut pts: Vec<u64> = (0..m as u64).collect();
                for i in 0..d {
                    let j = rng.random_range(i..pts.len());
                    pts.swap(i, j);
                }
                pts.truncate(d);
                let coeffs =
                    ResidueVector::new((0..d).map(|_| rng.random_range(0..m as u64)), m).unwrap();
                let points = ResidueVector::new(pts.iter().copied(), m).unwrap();
                let evals = ResidueVector::from_reduced(
                    points
                        .iter()
                        .map(|x| evaluate_polynomial(&coeffs, x).value())
                        .collect(),
                    m,
                );
                let solved = vandermonde_solve(&points, &evals).unwrap();
                assert_eq!(solved, coeffs);
                for (x, e) in points.iter().zip(evals.iter()) {
                    assert_eq!(evaluate_polynomial(&solved, x), e);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn double_inverse_is_identity(m in 2u32..200, x in 0u32..200) {
            let x = r(x as u64, m);
            if x.is_unit() {
                prop_assert_eq!(x.inverse().unwrap().inverse().unwrap(), x);
                prop_assert_eq!(x * x.inverse().unwrap(), r(1, m));
            } else {
                prop_assert!(x.inverse().is_err());
            }
        }

        #[test]
        fn arithmetic_stays_reduced(m in 2u32..1000, a in any::<u32>(), b in any::<u32>()) {
            let (a, b) = (r(a as u64, m), r(b as u64, m));
            for v in [a + b, a - b, a * b, -a] {
                prop_assert!(v.value() < m);
            }
            prop_assert_eq!((a - b) + b, a);
        }
    }
}
