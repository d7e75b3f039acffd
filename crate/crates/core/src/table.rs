//! Probability tables over digit vectors in (Z/DZ)^width, stored dense or
//! sparse. Shared by channel coefficient tables and error probability
//! tensors.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tables with at most this many cells are stored densely.
pub const DEFAULT_DENSE_CAP: u128 = 1 << 24;

/// Largest support a sparse table may reach.
pub const SPARSE_SUPPORT_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
enum Storage<T> {
    Dense(Vec<T>),
    Sparse(BTreeMap<Vec<u32>, T>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LabelTable<T> {
    modulus: u32,
    width: usize,
    dense_cap: u128,
    storage: Storage<T>,
}

/// `m^width`, or `None` on overflow.
pub(crate) fn cell_count(modulus: u32, width: usize) -> Option<u128> {
    let mut size: u128 = 1;
    for _ in 0..width {
        size = size.checked_mul(modulus as u128)?;
    }
    Some(size)
}

fn index_of(digits: &[u32], modulus: u32) -> usize {
    digits
        .iter()
        .fold(0usize, |acc, &d| acc * modulus as usize + d as usize)
}

fn digits_of(mut index: usize, modulus: u32, out: &mut [u32]) {
    for d in out.iter_mut().rev() {
        *d = (index % modulus as usize) as u32;
        index /= modulus as usize;
    }
}

impl<T: Real> LabelTable<T> {
    fn is_dense_size(modulus: u32, width: usize, dense_cap: u128) -> bool {
        cell_count(modulus, width).is_some_and(|s| s <= dense_cap)
    }

    pub(crate) fn zeros(modulus: u32, width: usize, dense_cap: u128) -> Self {
        let storage = if Self::is_dense_size(modulus, width, dense_cap) {
            let size = cell_count(modulus, width).expect("checked") as usize;
            Storage::Dense(vec![T::zero(); size])
        } else {
            Storage::Sparse(BTreeMap::new())
        };
        LabelTable {
            modulus,
            width,
            dense_cap,
            storage,
        }
    }

    pub(crate) fn delta(modulus: u32, width: usize, dense_cap: u128) -> Self {
        let mut t = Self::zeros(modulus, width, dense_cap);
        t.add_at(&vec![0; width], T::one());
        t
    }

    pub(crate) fn from_entries(
        modulus: u32,
        width: usize,
        dense_cap: u128,
        entries: impl IntoIterator<Item = (Vec<u32>, T)>,
    ) -> Result<Self> {
        let mut t = Self::zeros(modulus, width, dense_cap);
        for (digits, v) in entries {
            if digits.len() != width {
                return Err(Error::ShapeMismatch(format!(
                    "entry with {} digits in a table of width {width}",
                    digits.len()
                )));
            }
            let digits: Vec<u32> = digits.into_iter().map(|d| d % modulus).collect();
            t.add_at(&digits, v);
        }
        t.check_support()?;
        Ok(t)
    }

    pub(crate) fn modulus(&self) -> u32 {
        self.modulus
    }

    pub(crate) fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    fn add_at(&mut self, digits: &[u32], v: T) {
        if v == T::zero() {
            return;
        }
        match &mut self.storage {
            Storage::Dense(cells) => {
                let idx = index_of(digits, self.modulus);
                cells[idx] = cells[idx] + v;
            }
            Storage::Sparse(map) => {
                let e = map.entry(digits.to_vec()).or_insert_with(T::zero);
                *e = *e + v;
            }
        }
    }

    fn check_support(&self) -> Result<()> {
        if let Storage::Sparse(map) = &self.storage {
            let cap = self.dense_cap.max(SPARSE_SUPPORT_CAP);
            if map.len() as u128 > cap {
                return Err(Error::CapExceeded {
                    size: map.len() as u128,
                    cap: cap.min(usize::MAX as u128) as usize,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn get(&self, digits: &[u32]) -> T {
        match &self.storage {
            Storage::Dense(cells) => cells[index_of(digits, self.modulus)],
            Storage::Sparse(map) => map.get(digits).copied().unwrap_or_else(T::zero),
        }
    }

    /// Nonzero entries in lexicographic digit order.
    pub(crate) fn entries(&self) -> Vec<(Vec<u32>, T)> {
        match &self.storage {
            Storage::Dense(cells) => {
                let mut out = Vec::new();
                let mut digits = vec![0u32; self.width];
                for (i, &v) in cells.iter().enumerate() {
                    if v != T::zero() {
                        digits_of(i, self.modulus, &mut digits);
                        out.push((digits.clone(), v));
                    }
                }
                out
            }
            Storage::Sparse(map) => map
                .iter()
                .filter(|(_, &v)| v != T::zero())
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    pub(crate) fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Dense(cells) => cells.iter().filter(|&&v| v != T::zero()).count(),
            Storage::Sparse(map) => map.values().filter(|&&v| v != T::zero()).count(),
        }
    }

    pub(crate) fn total(&self) -> T {
        match &self.storage {
            Storage::Dense(cells) => cells.iter().copied().sum(),
            Storage::Sparse(map) => map.values().copied().sum(),
        }
    }

    pub(crate) fn min_entry(&self) -> T {
        match &self.storage {
            Storage::Dense(cells) => cells.iter().copied().fold(T::infinity(), T::min),
            Storage::Sparse(map) => map.values().copied().fold(T::zero(), T::min),
        }
    }

    /// Moves every entry to `f(digits)`; `f` must be a bijection that
    /// rewrites its argument in place.
    pub(crate) fn permute<F>(&self, f: F) -> Self
    where
        F: Fn(&mut [u32]) + Sync,
    {
        let m = self.modulus;
        let width = self.width;
        let storage = match &self.storage {
            Storage::Dense(cells) => {
                let targets: Vec<usize> = (0..cells.len())
                    .into_par_iter()
                    .map_init(
                        || vec![0u32; width],
                        |digits, i| {
                            digits_of(i, m, digits);
                            f(digits);
                            index_of(digits, m)
                        },
                    )
                    .collect();
                let mut out = vec![T::zero(); cells.len()];
                for (i, &t) in targets.iter().enumerate() {
                    out[t] = cells[i];
                }
                Storage::Dense(out)
            }
            Storage::Sparse(map) => Storage::Sparse(
                map.iter()
                    .map(|(k, &v)| {
                        let mut d = k.clone();
                        f(&mut d);
                        (d, v)
                    })
                    .collect(),
            ),
        };
        LabelTable {
            modulus: m,
            width,
            dense_cap: self.dense_cap,
            storage,
        }
    }

    /// Output digit `j` is input digit `keep[j]`; digits not listed are
    /// summed out.
    pub(crate) fn project(&self, keep: &[usize]) -> Result<Self> {
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.width) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.width,
            });
        }
        let mut out = Self::zeros(self.modulus, keep.len(), self.dense_cap);
        let mut key = vec![0u32; keep.len()];
        match &self.storage {
            Storage::Dense(cells) => {
                let mut digits = vec![0u32; self.width];
                for (i, &v) in cells.iter().enumerate() {
                    if v == T::zero() {
                        continue;
                    }
                    digits_of(i, self.modulus, &mut digits);
                    for (slot, &k) in key.iter_mut().zip(keep) {
                        *slot = digits[k];
                    }
                    out.add_at(&key, v);
                }
            }
            Storage::Sparse(map) => {
                for (digits, &v) in map {
                    for (slot, &k) in key.iter_mut().zip(keep) {
                        *slot = digits[k];
                    }
                    out.add_at(&key, v);
                }
            }
        }
        out.check_support()?;
        Ok(out)
    }

    /// Group convolution along `positions`:
    /// `out[x] = sum_k w_k in[x - embed(k)]`, kernel in its given order.
    pub(crate) fn convolve(&self, positions: &[usize], kernel: &[(Vec<u32>, T)]) -> Result<Self> {
        let m = self.modulus;
        let width = self.width;
        let storage = match &self.storage {
            Storage::Dense(cells) => {
                let out: Vec<T> = (0..cells.len())
                    .into_par_iter()
                    .map_init(
                        || vec![0u32; width],
                        |digits, i| {
                            let mut acc = T::zero();
                            for (k, w) in kernel {
                                digits_of(i, m, digits);
                                for (&p, &kd) in positions.iter().zip(k) {
                                    digits[p] = (digits[p] + m - kd) % m;
                                }
                                acc = acc + *w * cells[index_of(digits, m)];
                            }
                            acc
                        },
                    )
                    .collect();
                Storage::Dense(out)
            }
            Storage::Sparse(map) => {
                let mut out: BTreeMap<Vec<u32>, T> = BTreeMap::new();
                for (digits, &v) in map {
                    for (k, w) in kernel {
                        let mut d = digits.clone();
                        for (&p, &kd) in positions.iter().zip(k) {
                            d[p] = (d[p] + kd) % m;
                        }
                        let e = out.entry(d).or_insert_with(T::zero);
                        *e = *e + *w * v;
                    }
                }
                Storage::Sparse(out)
            }
        };
        let out = LabelTable {
            modulus: m,
            width,
            dense_cap: self.dense_cap,
            storage,
        };
        out.check_support()?;
        Ok(out)
    }

    /// Appends `extra` zero digits (entries keep their values).
    pub(crate) fn widen(&self, extra: usize) -> Result<Self> {
        let mut out = Self::zeros(self.modulus, self.width + extra, self.dense_cap);
        for (mut d, v) in self.entries() {
            d.extend(std::iter::repeat_n(0, extra));
            out.add_at(&d, v);
        }
        out.check_support()?;
        Ok(out)
    }

    /// Inserts a zero digit at each of `at` (sorted, positions in the
    /// output).
    pub(crate) fn insert_zero_digits(&self, at: &[usize]) -> Result<Self> {
        let new_width = self.width + at.len();
        let mut out = Self::zeros(self.modulus, new_width, self.dense_cap);
        for (d, v) in self.entries() {
            let mut nd = Vec::with_capacity(new_width);
            let mut src = d.into_iter();
            for pos in 0..new_width {
                if at.contains(&pos) {
                    nd.push(0);
                } else {
                    nd.push(src.next().expect("width"));
                }
            }
            out.add_at(&nd, v);
        }
        out.check_support()?;
        Ok(out)
    }

    /// Outer product: digits of `self` followed by digits of `other`.
    pub(crate) fn outer(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zeros(self.modulus, self.width + other.width, self.dense_cap);
        let rhs = other.entries();
        for (a, va) in self.entries() {
            for (b, vb) in &rhs {
                let mut d = a.clone();
                d.extend_from_slice(b);
                out.add_at(&d, va * *vb);
            }
        }
        out.check_support()?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_agree() {
        let entries = vec![
            (vec![0, 1, 2], 0.25),
            (vec![2, 2, 0], 0.5),
            (vec![1, 0, 0], 0.25),
        ];
        let dense = LabelTable::<f64>::from_entries(3, 3, 1000, entries.clone()).unwrap();
        let sparse = LabelTable::<f64>::from_entries(3, 3, 10, entries).unwrap();
        assert!(dense.is_dense());
        assert!(!sparse.is_dense());
        assert_eq!(dense.entries(), sparse.entries());

        let kernel = vec![(vec![1], 0.5), (vec![0], 0.5)];
        let a = dense.convolve(&[1], &kernel).unwrap();
        let b = sparse.convolve(&[1], &kernel).unwrap();
        assert_eq!(a.entries(), b.entries());

        let pa = dense.project(&[2, 0]).unwrap();
        let pb = sparse.project(&[2, 0]).unwrap();
        assert_eq!(pa.entries(), pb.entries());
        assert_eq!(pa.get(&[0, 2]), 0.5);

        let shift = |d: &mut [u32]| d[0] = (d[0] + d[1]) % 3;
        assert_eq!(
            dense.permute(shift).entries(),
            sparse.permute(shift).entries()
        );
    }

    #[test]
    fn insert_and_widen() {
        let t = LabelTable::<f64>::from_entries(2, 2, 100, vec![(vec![1, 1], 1.0)]).unwrap();
        let w = t.insert_zero_digits(&[0, 2]).unwrap();
        assert_eq!(w.entries(), vec![(vec![0, 1, 0, 1], 1.0)]);
        assert_eq!(t.widen(1).unwrap().entries(), vec![(vec![1, 1, 0], 1.0)]);
    }
}
