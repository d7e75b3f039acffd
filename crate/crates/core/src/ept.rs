//! The error probability tensor `P = (p_{r,s})` and its update rules.
//!
//! Entries are indexed by digit vectors `(r_1..r_n, s_1..s_n, c_1..c_k)`:
//! the Pauli label of the accumulated error on the `n` live qudits,
//! followed by `k` classical digits recording dit-flips on measurement
//! outcomes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::channels::{Axis, PauliChannelTable};
use crate::clifford::CliffordAutomorphism;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DEFAULT_ORACLE_CAP};
use crate::modarith::{add_mod, check_modulus, mul_mod, reduce_i64, sub_mod};
use crate::pauli::{commutation_phase, increment, PauliLabel};
use crate::scalar::Real;
use crate::table::{LabelTable, DEFAULT_DENSE_CAP};

/// Cap on the number of stabilizer group elements enumerated by
/// [`ErrorProbabilityTensor::coset_reduce`].
pub const DEFAULT_SPAN_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProbabilityTensor<T> {
    n: usize,
    classical: usize,
    table: LabelTable<T>,
}

impl<T: Real> ErrorProbabilityTensor<T> {
    /// `p_{0,0} = 1`: no error yet.
    pub fn identity(modulus: u32, n: usize) -> Result<Self> {
        Self::identity_with_cap(modulus, n, DEFAULT_DENSE_CAP)
    }

    /// As [`identity`](Self::identity), storing densely only while the
    /// table has at most `dense_cap` cells.
    pub fn identity_with_cap(modulus: u32, n: usize, dense_cap: u128) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ErrorProbabilityTensor {
            n,
            classical: 0,
            table: LabelTable::delta(modulus, 2 * n, dense_cap),
        })
    }

    /// The tensor of a channel applied to an error-free register.
    pub fn from_channel(channel: &PauliChannelTable<T>) -> Self {
        ErrorProbabilityTensor {
            n: channel.num_qudits(),
            classical: 0,
            table: channel.table().clone(),
        }
    }

    /// Builds a tensor from flat digit vectors of length `2n + classical`.
    pub fn from_entries(
        modulus: u32,
        n: usize,
        classical: usize,
        entries: impl IntoIterator<Item = (Vec<u32>, T)>,
    ) -> Result<Self> {
        check_modulus(modulus)?;
        let table =
            LabelTable::from_entries(modulus, 2 * n + classical, DEFAULT_DENSE_CAP, entries)?;
        let out = ErrorProbabilityTensor {
            n,
            classical,
            table,
        };
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let total = self.table.total();
        if (total - T::one()).abs() > T::normalization_tolerance() {
            return Err(Error::InvalidScenario(format!(
                "tensor entries sum to {total}, not 1"
            )));
        }
        if self.table.min_entry() < T::zero() {
            return Err(Error::OutOfRange(self.table.min_entry().to_f64_lossy()));
        }
        Ok(())
    }

    pub fn modulus(&self) -> u32 {
        self.table.modulus()
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    /// Number of classical flip digits carried along.
    pub fn num_classical(&self) -> usize {
        self.classical
    }

    pub fn is_dense(&self) -> bool {
        self.table.is_dense()
    }

    pub fn total(&self) -> T {
        self.table.total()
    }

    pub fn support_len(&self) -> usize {
        self.table.support_len()
    }

    /// Entry at the flat digit vector `(r, s, c)`.
    pub fn get(&self, digits: &[u32]) -> Result<T> {
        if digits.len() != self.table.width() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} digits, got {}",
                self.table.width(),
                digits.len()
            )));
        }
        let m = self.modulus();
        let reduced: Vec<u32> = digits.iter().map(|d| d % m).collect();
        Ok(self.table.get(&reduced))
    }

    /// Probability of the label with all classical digits zero.
    pub fn probability(&self, label: &PauliLabel) -> Result<T> {
        self.check_label(label)?;
        let mut digits = label.digits();
        digits.extend(std::iter::repeat_n(0, self.classical));
        self.get(&digits)
    }

    /// Nonzero entries in lexicographic order.
    pub fn entries(&self) -> Vec<(Vec<u32>, T)> {
        self.table.entries()
    }

    fn check_label(&self, label: &PauliLabel) -> Result<()> {
        if label.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch(label.modulus(), self.modulus()));
        }
        if label.num_qudits() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "label on {} qudits, tensor on {}",
                label.num_qudits(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_qudit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange {
                index: q,
                len: self.n,
            });
        }
        Ok(())
    }

    fn check_classical(&self, c: usize) -> Result<()> {
        if c >= self.classical {
            return Err(Error::IndexOutOfRange {
                index: c,
                len: self.classical,
            });
        }
        Ok(())
    }

    fn with_table(&self, n: usize, classical: usize, table: LabelTable<T>) -> Self {
        ErrorProbabilityTensor {
            n,
            classical,
            table,
        }
    }

    /// Propagates the errors through an ideal Clifford gate:
    /// `p'_{forward(L)} = p_L`.
    pub fn apply_clifford(&self, auto: &CliffordAutomorphism) -> Result<Self> {
        if auto.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch(auto.modulus(), self.modulus()));
        }
        if auto.num_qudits() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "automorphism on {} qudits, tensor on {}",
                auto.num_qudits(),
                self.n
            )));
        }
        let forward = auto.to_forward()?;
        let w = 2 * self.n;
        let table = self.table.permute(|d| {
            let src = d[..w].to_vec();
            forward.map_digits(&src, &mut d[..w]);
        });
        Ok(self.with_table(self.n, self.classical, table))
    }

    /// Convolves with a channel on the whole register.
    pub fn apply_channel(&self, channel: &PauliChannelTable<T>) -> Result<Self> {
        if channel.num_qudits() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "channel on {} qudits, tensor on {}",
                channel.num_qudits(),
                self.n
            )));
        }
        let qudits: Vec<usize> = (0..self.n).collect();
        self.apply_channel_on(channel, &qudits)
    }

    /// Convolves with a `k`-qudit channel acting on `qudits` (in order).
    pub fn apply_channel_on(
        &self,
        channel: &PauliChannelTable<T>,
        qudits: &[usize],
    ) -> Result<Self> {
        if channel.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch(channel.modulus(), self.modulus()));
        }
        if channel.num_qudits() != qudits.len() {
            return Err(Error::ShapeMismatch(format!(
                "channel on {} qudits applied to {} positions",
                channel.num_qudits(),
                qudits.len()
            )));
        }
        for (i, &q) in qudits.iter().enumerate() {
            self.check_qudit(q)?;
            if qudits[..i].contains(&q) {
                return Err(Error::ShapeMismatch(format!("qudit {q} listed twice")));
            }
        }
        let mut positions: Vec<usize> = qudits.to_vec();
        positions.extend(qudits.iter().map(|&q| self.n + q));
        let table = self
            .table
            .convolve(&positions, &channel.table().entries())?;
        Ok(self.with_table(self.n, self.classical, table))
    }

    fn remove_qudit_keep(&self, qudit: usize) -> Vec<usize> {
        let n = self.n;
        let mut keep: Vec<usize> = (0..n).filter(|&q| q != qudit).collect();
        keep.extend((0..n).filter(|&q| q != qudit).map(|q| n + q));
        keep.extend(2 * n..2 * n + self.classical);
        keep
    }

    /// Computational-basis measurement of `qudit`: its phase exponent is
    /// summed out and its X exponent becomes a new trailing classical
    /// digit (the outcome `c` is read as `c + r`).
    pub fn measure_qudit(&self, qudit: usize) -> Result<Self> {
        self.check_qudit(qudit)?;
        let mut keep = self.remove_qudit_keep(qudit);
        keep.push(qudit);
        let table = self.table.project(&keep)?;
        Ok(self.with_table(self.n - 1, self.classical + 1, table))
    }

    /// Measurement in the basis `F|k>`: equivalent to `F^dagger` followed by
    /// a computational measurement, so the flip digit is the Z exponent.
    pub fn measure_x(&self, qudit: usize) -> Result<Self> {
        self.check_qudit(qudit)?;
        let mut keep = self.remove_qudit_keep(qudit);
        keep.push(self.n + qudit);
        let table = self.table.project(&keep)?;
        Ok(self.with_table(self.n - 1, self.classical + 1, table))
    }

    /// Keeps qudits `0..keep` and sums out the rest.
    pub fn discard_qudits(&self, keep: usize) -> Result<Self> {
        if keep > self.n {
            return Err(Error::IndexOutOfRange {
                index: keep,
                len: self.n,
            });
        }
        let n = self.n;
        let mut digits: Vec<usize> = (0..keep).collect();
        digits.extend(n..n + keep);
        digits.extend(2 * n..2 * n + self.classical);
        let table = self.table.project(&digits)?;
        Ok(self.with_table(keep, self.classical, table))
    }

    /// Sums out a single qudit; later qudits shift down by one.
    pub fn discard_qudit(&self, qudit: usize) -> Result<Self> {
        self.check_qudit(qudit)?;
        let table = self.table.project(&self.remove_qudit_keep(qudit))?;
        Ok(self.with_table(self.n - 1, self.classical, table))
    }

    /// Appends a fresh, error-free qudit with index `n`.
    pub fn add_qudit(&self) -> Result<Self> {
        let table = self.table.insert_zero_digits(&[self.n, 2 * self.n + 1])?;
        Ok(self.with_table(self.n + 1, self.classical, table))
    }

    /// Appends a classical digit fixed at zero, e.g. an accumulator.
    pub fn add_classical(&self) -> Result<Self> {
        let table = self.table.widen(1)?;
        Ok(self.with_table(self.n, self.classical + 1, table))
    }

    /// Sums out classical digit `c`.
    pub fn marginalize_classical(&self, c: usize) -> Result<Self> {
        self.check_classical(c)?;
        let base = 2 * self.n;
        let keep: Vec<usize> = (0..base + self.classical)
            .filter(|&i| i != base + c)
            .collect();
        let table = self.table.project(&keep)?;
        Ok(self.with_table(self.n, self.classical - 1, table))
    }

    /// `c_dst += sign * c_src`, then sums out `c_src`.
    pub fn fold_classical(&self, src: usize, dst: usize, sign: i64) -> Result<Self> {
        self.check_classical(src)?;
        self.check_classical(dst)?;
        if src == dst {
            return Err(Error::ShapeMismatch(
                "cannot fold a digit into itself".into(),
            ));
        }
        let m = self.modulus();
        let coef = reduce_i64(sign, m);
        let (ps, pd) = (2 * self.n + src, 2 * self.n + dst);
        let moved = self
            .table
            .permute(|d| d[pd] = add_mod(d[pd], mul_mod(coef, d[ps], m), m));
        let moved = self.with_table(self.n, self.classical, moved);
        moved.marginalize_classical(src)
    }

    /// Applies the Pauli `X^{k c}` (axis X) or `Z^{k c}` (axis Z) to
    /// `qudit`, where `c` is the value of classical digit `classical`.
    /// The classical digit is kept.
    pub fn add_classical_to_label(
        &self,
        classical: usize,
        qudit: usize,
        axis: Axis,
        coefficient: i64,
    ) -> Result<Self> {
        self.check_classical(classical)?;
        self.check_qudit(qudit)?;
        let m = self.modulus();
        let coef = reduce_i64(coefficient, m);
        let pc = 2 * self.n + classical;
        let pl = match axis {
            Axis::XOnly => qudit,
            Axis::ZOnly => self.n + qudit,
        };
        let table = self
            .table
            .permute(|d| d[pl] = add_mod(d[pl], mul_mod(coef, d[pc], m), m));
        Ok(self.with_table(self.n, self.classical, table))
    }

    /// Sums probabilities over the cosets of `span(basis)`; classical digits
    /// are carried along unchanged.
    pub fn coset_reduce(&self, basis: &StabilizerBasis) -> Result<CosetTable<T>> {
        self.coset_reduce_with_cap(basis, DEFAULT_SPAN_CAP)
    }

    pub fn coset_reduce_with_cap(
        &self,
        basis: &StabilizerBasis,
        cap: u128,
    ) -> Result<CosetTable<T>> {
        if basis.modulus != self.modulus() {
            return Err(Error::ModulusMismatch(basis.modulus, self.modulus()));
        }
        if basis.n != self.n {
            return Err(Error::ShapeMismatch(format!(
                "stabilizer on {} qudits, tensor on {}",
                basis.n, self.n
            )));
        }
        let group = basis.span(cap)?;
        let mut entries: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        for (digits, v) in self.table.entries() {
            let (label, classical) = digits.split_at(2 * self.n);
            let mut key = canonical_rep(label, &group, self.modulus());
            key.extend_from_slice(classical);
            let e = entries.entry(key).or_insert_with(T::zero);
            *e = *e + v;
        }
        Ok(CosetTable {
            modulus: self.modulus(),
            n: self.n,
            classical: self.classical,
            group,
            entries,
        })
    }

    /// Two-qudit tensor reduced modulo the stabilizer of the state
    /// `|Psi> = D^{-1} sum_{j,k} omega^{jk} |j>|k>`, indexed by the error
    /// `X^r Z^s` on the second qudit:
    /// `p(r, s) = sum_{l,m} p_{(l, m+r), (m, l+s)}`.
    pub fn bell_coset_statistics(&self) -> Result<CosetStatistics<T>> {
        if self.n != 2 || self.classical != 0 {
            return Err(Error::ShapeMismatch(format!(
                "Bell reduction needs 2 qudits and no classical digits, got {} and {}",
                self.n, self.classical
            )));
        }
        let m = self.modulus();
        let mut table = vec![T::zero(); (m * m) as usize];
        for (d, v) in self.table.entries() {
            let r = sub_mod(d[1], d[2], m);
            let s = sub_mod(d[3], d[0], m);
            let idx = (r * m + s) as usize;
            table[idx] = table[idx] + v;
        }
        CosetStatistics::new(m, table)
    }

    /// Applies the Pauli channel `rho -> sum_L p_L M(L) rho M(L)^dagger`
    /// densely.
    pub fn to_dense_channel_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.to_dense_channel_matrix_with_cap(rho, DEFAULT_ORACLE_CAP)
    }

    pub fn to_dense_channel_matrix_with_cap(&self, rho: &CMatrix, cap: usize) -> Result<CMatrix> {
        if self.classical != 0 {
            return Err(Error::ShapeMismatch(
                "classical digits must be summed out before the dense oracle".into(),
            ));
        }
        let dim = crate::linalg::hilbert_dim(self.modulus(), self.n, cap)?;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "operator of size {}x{}, register dimension {dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let mut out = CMatrix::zeros(dim, dim);
        for (digits, v) in self.table.entries() {
            let p = PauliLabel::from_digits(&digits, self.modulus())?.to_matrix_with_cap(cap)?;
            out += (&p * rho * p.adjoint()).map(|x| x * v.to_f64_lossy());
        }
        Ok(out)
    }

    /// CSV with columns `r_1..r_n, s_1..s_n, c_1..c_k, probability`, one row
    /// per nonzero entry in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.n).map(|i| format!("r_{i}")).collect();
        header.extend((1..=self.n).map(|i| format!("s_{i}")));
        header.extend((1..=self.classical).map(|i| format!("c_{i}")));
        header.push("probability".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for (digits, v) in self.table.entries() {
            for d in &digits {
                let _ = write!(out, "{d},");
            }
            let _ = writeln!(out, "{v:?}");
        }
        out
    }
}

fn canonical_rep(label: &[u32], group: &[Vec<u32>], m: u32) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    let mut cand = vec![0u32; label.len()];
    for w in group {
        for ((c, &a), &b) in cand.iter_mut().zip(label).zip(w) {
            *c = add_mod(a, b, m);
        }
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand.clone());
        }
    }
    best.unwrap_or_else(|| label.to_vec())
}

/// Commuting generators of a stabilizer group `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerBasis {
    modulus: u32,
    n: usize,
    generators: Vec<PauliLabel>,
}

impl StabilizerBasis {
    pub fn new(modulus: u32, n: usize, generators: Vec<PauliLabel>) -> Result<Self> {
        check_modulus(modulus)?;
        for g in &generators {
            if g.modulus() != modulus {
                return Err(Error::ModulusMismatch(g.modulus(), modulus));
            }
            if g.num_qudits() != n {
                return Err(Error::ShapeMismatch(format!(
                    "generator on {} qudits in a {n}-qudit basis",
                    g.num_qudits()
                )));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if commutation_phase(&generators[i], &generators[j])?.value() != 0 {
                    return Err(Error::NonCommutingGenerators(i, j));
                }
            }
        }
        Ok(StabilizerBasis {
            modulus,
            n,
            generators,
        })
    }

    /// `X^{(1,0)} Z^{(0,1)}` and `X^{(0,1)} Z^{(1,0)}`, the stabilizer of
    /// `D^{-1} sum_{j,k} omega^{jk} |j>|k>`.
    pub fn bell(modulus: u32) -> Result<Self> {
        let g1 = PauliLabel::from_digits(&[1, 0, 0, 1], modulus)?;
        let g2 = PauliLabel::from_digits(&[0, 1, 1, 0], modulus)?;
        Self::new(modulus, 2, vec![g1, g2])
    }

    pub fn generators(&self) -> &[PauliLabel] {
        &self.generators
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    /// All distinct elements of the span, sorted.
    pub fn span(&self, cap: u128) -> Result<Vec<Vec<u32>>> {
        let m = self.modulus;
        let g = self.generators.len();
        let combos =
            crate::table::cell_count(m, g)
                .filter(|&c| c <= cap)
                .ok_or(Error::SpanTooLarge {
                    generators: g,
                    modulus: m,
                })?;
        let gens: Vec<Vec<u32>> = self.generators.iter().map(|l| l.digits()).collect();
        let mut out = Vec::with_capacity(combos as usize);
        let mut coeffs = vec![0u32; g];
        loop {
            let mut v = vec![0u32; 2 * self.n];
            for (c, gen) in coeffs.iter().zip(&gens) {
                for (x, &y) in v.iter_mut().zip(gen) {
                    *x = add_mod(*x, mul_mod(*c, y, m), m);
                }
            }
            out.push(v);
            if !increment(&mut coeffs, m) {
                break;
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Probabilities summed over stabilizer cosets, keyed by the
/// lexicographically smallest member (followed by any classical digits).
#[derive(Debug, Clone, PartialEq)]
pub struct CosetTable<T> {
    modulus: u32,
    n: usize,
    classical: usize,
    group: Vec<Vec<u32>>,
    entries: BTreeMap<Vec<u32>, T>,
}

impl<T: Real> CosetTable<T> {
    pub fn entries(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.entries
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn num_classical(&self) -> usize {
        self.classical
    }

    /// Canonical representative of the coset containing `label`.
    pub fn representative(&self, label: &PauliLabel) -> Vec<u32> {
        canonical_rep(&label.digits(), &self.group, self.modulus)
    }

    /// Probability of the coset containing `label` (classical digits zero).
    pub fn probability(&self, label: &PauliLabel) -> T {
        let mut key = self.representative(label);
        key.extend(std::iter::repeat_n(0, self.classical));
        self.entries.get(&key).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.entries.values().copied().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.n).map(|i| format!("r_{i}")).collect();
        header.extend((1..=self.n).map(|i| format!("s_{i}")));
        header.extend((1..=self.classical).map(|i| format!("c_{i}")));
        header.push("probability".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for (digits, v) in &self.entries {
            for d in digits {
                let _ = write!(out, "{d},");
            }
            let _ = writeln!(out, "{v:?}");
        }
        out
    }
}

/// Error statistics of a two-qudit state relative to `|Psi>`: `p(r, s)` is
/// the probability of `1 ⊗ X^r Z^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetStatistics<T> {
    modulus: u32,
    /// Row-major, index `r * D + s`.
    table: Vec<T>,
}

impl<T: Real> CosetStatistics<T> {
    pub fn new(modulus: u32, table: Vec<T>) -> Result<Self> {
        check_modulus(modulus)?;
        if table.len() != (modulus as usize).pow(2) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for D = {modulus}",
                table.len()
            )));
        }
        let out = CosetStatistics { modulus, table };
        let total = out.total();
        if (total - T::one()).abs() > T::normalization_tolerance() * T::from_count(4) {
            return Err(Error::InvalidScenario(format!(
                "coset statistics sum to {total}, not 1"
            )));
        }
        if let Some(bad) = out
            .table
            .iter()
            .find(|&&p| p < -T::normalization_tolerance())
        {
            return Err(Error::OutOfRange(bad.to_f64_lossy()));
        }
        Ok(out)
    }

    /// Builds `p(r, s) = f(r, s)` for every pair.
    pub fn from_fn(modulus: u32, f: impl Fn(u32, u32) -> T) -> Result<Self> {
        let mut table = Vec::with_capacity((modulus as usize).pow(2));
        for r in 0..modulus {
            for s in 0..modulus {
                table.push(f(r, s));
            }
        }
        Self::new(modulus, table)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn get(&self, r: u32, s: u32) -> T {
        let m = self.modulus;
        self.table[((r % m) * m + s % m) as usize]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.table
    }

    pub fn total(&self) -> T {
        self.table.iter().copied().sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// CSV with columns `r, s, probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,s,probability\n");
        for r in 0..self.modulus {
            for s in 0..self.modulus {
                let _ = writeln!(out, "{r},{s},{:?}", self.get(r, s));
            }
        }
        out
    }
}
