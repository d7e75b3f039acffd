//! Generalized Pauli channels `rho -> sum f_{r,s} X^r Z^s rho (X^r Z^s)^dagger`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    hilbert_dim, max_abs_diff, random_density_matrix, random_pure_density_matrix, CMatrix,
    DEFAULT_ORACLE_CAP,
};
use crate::modarith::check_modulus;
use crate::pauli::{increment, PauliLabel};
use crate::scalar::Real;
use crate::table::{LabelTable, DEFAULT_DENSE_CAP};

/// Direction of a single-axis depolarizing channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    XOnly,
    ZOnly,
}

/// Coefficients `f_{r,s}` of an `n`-qudit Pauli channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannelTable<T> {
    n: usize,
    table: LabelTable<T>,
}

pub(crate) fn check_probability<T: Real>(f: T) -> Result<()> {
    if f.is_nan() || f < T::zero() || f > T::one() {
        return Err(Error::OutOfRange(f.to_f64_lossy()));
    }
    Ok(())
}

impl<T: Real> PauliChannelTable<T> {
    /// Builds a table from explicit `(label, weight)` pairs; repeated labels
    /// accumulate.
    pub fn from_entries(
        modulus: u32,
        n: usize,
        entries: impl IntoIterator<Item = (PauliLabel, T)>,
    ) -> Result<Self> {
        check_modulus(modulus)?;
        let mut raw = Vec::new();
        for (label, w) in entries {
            if label.modulus() != modulus {
                return Err(Error::ModulusMismatch(label.modulus(), modulus));
            }
            if label.num_qudits() != n {
                return Err(Error::ShapeMismatch(format!(
                    "label on {} qudits in a {n}-qudit channel",
                    label.num_qudits()
                )));
            }
            if w < T::zero() || w.is_nan() {
                return Err(Error::OutOfRange(w.to_f64_lossy()));
            }
            raw.push((label.digits(), w));
        }
        let table = LabelTable::from_entries(modulus, 2 * n, DEFAULT_DENSE_CAP, raw)?;
        let out = PauliChannelTable { n, table };
        out.check_normalized()?;
        Ok(out)
    }

    pub(crate) fn table(&self) -> &LabelTable<T> {
        &self.table
    }

    fn check_normalized(&self) -> Result<()> {
        let total = self.table.total();
        if (total - T::one()).abs() > T::normalization_tolerance() {
            return Err(Error::InvalidScenario(format!(
                "channel coefficients sum to {total}, not 1"
            )));
        }
        Ok(())
    }

    /// The identity channel.
    pub fn identity(modulus: u32, n: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(PauliChannelTable {
            n,
            table: LabelTable::delta(modulus, 2 * n, DEFAULT_DENSE_CAP),
        })
    }

    pub fn modulus(&self) -> u32 {
        self.table.modulus()
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    /// `f_{r,s}` for the given label.
    pub fn coefficient(&self, label: &PauliLabel) -> T {
        self.table.get(&label.digits())
    }

    /// Coefficient by flat digits `(r_1..r_n, s_1..s_n)`.
    pub fn get(&self, digits: &[u32]) -> T {
        self.table.get(digits)
    }

    /// Nonzero coefficients in lexicographic label order.
    pub fn entries(&self) -> Vec<(PauliLabel, T)> {
        self.table
            .entries()
            .into_iter()
            .map(|(d, v)| {
                (
                    PauliLabel::from_digits(&d, self.modulus()).expect("valid digits"),
                    v,
                )
            })
            .collect()
    }

    pub fn total(&self) -> T {
        self.table.total()
    }

    /// Marginal table on a single qudit.
    pub fn marginal(&self, qudit: usize) -> Result<Self> {
        if qudit >= self.n {
            return Err(Error::IndexOutOfRange {
                index: qudit,
                len: self.n,
            });
        }
        Ok(PauliChannelTable {
            n: 1,
            table: self.table.project(&[qudit, self.n + qudit])?,
        })
    }
}

/// `f_{0,0} = 1 - f + f/D^{2n}`, every other coefficient `f/D^{2n}`.
pub fn depolarizing<T: Real>(f: T, modulus: u32, n: usize) -> Result<PauliChannelTable<T>> {
    check_probability(f)?;
    check_modulus(modulus)?;
    let size = crate::table::cell_count(modulus, 2 * n).ok_or(Error::CapExceeded {
        size: u128::MAX,
        cap: DEFAULT_DENSE_CAP as usize,
    })?;
    if size > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            size,
            cap: DEFAULT_DENSE_CAP as usize,
        });
    }
    let share = f / T::from_count(size as usize);
    let mut digits = vec![0u32; 2 * n];
    let mut entries = Vec::with_capacity(size as usize);
    loop {
        let w = if digits.iter().all(|&d| d == 0) {
            T::one() - f + share
        } else {
            share
        };
        entries.push((digits.clone(), w));
        if !increment(&mut digits, modulus) {
            break;
        }
    }
    Ok(PauliChannelTable {
        n,
        table: LabelTable::from_entries(modulus, 2 * n, DEFAULT_DENSE_CAP, entries)?,
    })
}

/// Single-qudit depolarizing along one axis: `f_{0,0} = 1 - f + f/D` and
/// `f/D` on every other label of that axis.
pub fn axis_depolarizing<T: Real>(f: T, axis: Axis, modulus: u32) -> Result<PauliChannelTable<T>> {
    check_probability(f)?;
    check_modulus(modulus)?;
    let share = f / T::from_count(modulus as usize);
    let entries = (0..modulus).map(|k| {
        let w = if k == 0 { T::one() - f + share } else { share };
        let digits = match axis {
            Axis::XOnly => vec![k, 0],
            Axis::ZOnly => vec![0, k],
        };
        (digits, w)
    });
    Ok(PauliChannelTable {
        n: 1,
        table: LabelTable::from_entries(modulus, 2, DEFAULT_DENSE_CAP, entries)?,
    })
}

/// Independent channels on disjoint registers, `a` first.
pub fn tensor_product<T: Real>(
    a: &PauliChannelTable<T>,
    b: &PauliChannelTable<T>,
) -> Result<PauliChannelTable<T>> {
    if a.modulus() != b.modulus() {
        return Err(Error::ModulusMismatch(a.modulus(), b.modulus()));
    }
    let (na, nb) = (a.n, b.n);
    // outer layout (r_a, s_a, r_b, s_b) -> (r_a, r_b, s_a, s_b)
    let outer = a.table.outer(&b.table)?;
    let mut keep = Vec::with_capacity(2 * (na + nb));
    keep.extend(0..na);
    keep.extend(2 * na..2 * na + nb);
    keep.extend(na..2 * na);
    keep.extend(2 * na + nb..2 * (na + nb));
    Ok(PauliChannelTable {
        n: na + nb,
        table: outer.project(&keep)?,
    })
}

/// Applies the channel to a dense operator.
pub fn apply_to_matrix<T: Real>(channel: &PauliChannelTable<T>, rho: &CMatrix) -> Result<CMatrix> {
    let dim = rho.nrows();
    let mut out = CMatrix::zeros(dim, dim);
    for (label, w) in channel.entries() {
        let p = label.to_matrix_with_cap(dim.max(1))?;
        out += (&p * rho * p.adjoint()).map(|x| x * w.to_f64_lossy());
    }
    Ok(out)
}

/// Checks numerically that the uniform Pauli twirl sends `trials` random
/// states (alternating full-rank and pure) to the maximally mixed state,
/// entrywise within `1e-10`.
pub fn verify_depolarizing_discretization(modulus: u32, n: usize, trials: usize) -> Result<bool> {
    check_modulus(modulus)?;
    let dim = hilbert_dim(modulus, n, DEFAULT_ORACLE_CAP)?;
    let uniform = depolarizing(1.0f64, modulus, n)?;
    let target = CMatrix::identity(dim, dim).map(|x| x / dim as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1 + modulus as u64 * 31 + n as u64);
    for t in 0..trials {
        let rho = if t % 2 == 0 {
            random_density_matrix(dim, &mut rng)
        } else {
            random_pure_density_matrix(dim, &mut rng)
        };
        let twirled = apply_to_matrix(&uniform, &rho)?;
        if max_abs_diff(&twirled, &target) > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}
