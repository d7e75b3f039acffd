//! Clifford gates as linear automorphisms of the label module (Z/DZ)^{2n}.
//!
//! Labels are column vectors `(r_1..r_n, s_1..s_n)`. A `Forward` map sends
//! the label of an error before the gate to the label of the conjugated
//! error after it: `U X^r Z^s U^dagger ∝ X^r' Z^s'`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{equal_up_to_phase, hilbert_dim, omega_pow, CMatrix, DEFAULT_ORACLE_CAP};
use crate::modarith::{add_mod, gcd, inv_mod, mul_mod, neg_mod, sub_mod, ResidueVector};
use crate::pauli::{increment, PauliLabel};

/// Which way an automorphism maps labels relative to the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Pre-gate label to post-gate label.
    Forward,
    /// Post-gate label to pre-gate label.
    Inverse,
}

impl Direction {
    fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

/// Gates of the library. Qudit indices refer to an `n`-qudit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateSpec {
    /// `F = D^{-1/2} sum_{j,k} omega^{jk} |j><k|`.
    Fourier { qudit: usize },
    /// `M(l) = sum_k |kl><k|`, `l` a unit.
    MultiplyBy { multiplier: u32, qudit: usize },
    /// A Pauli gate on the whole register.
    Pauli { label: PauliLabel },
    /// For each target `t_i` in order: `CX^{a_i}` then `CZ^{b_i}` from the
    /// common control.
    CPauliSeq {
        control: usize,
        targets: Vec<usize>,
        a: ResidueVector,
        b: ResidueVector,
    },
}

impl GateSpec {
    pub fn cx(control: usize, target: usize, power: u32, modulus: u32) -> Result<Self> {
        Ok(GateSpec::CPauliSeq {
            control,
            targets: vec![target],
            a: ResidueVector::new([power as u64], modulus)?,
            b: ResidueVector::new([0], modulus)?,
        })
    }

    pub fn cz(control: usize, target: usize, power: u32, modulus: u32) -> Result<Self> {
        Ok(GateSpec::CPauliSeq {
            control,
            targets: vec![target],
            a: ResidueVector::new([0], modulus)?,
            b: ResidueVector::new([power as u64], modulus)?,
        })
    }

    fn qudits(&self) -> Vec<usize> {
        match self {
            GateSpec::Fourier { qudit } | GateSpec::MultiplyBy { qudit, .. } => vec![*qudit],
            GateSpec::Pauli { .. } => vec![],
            GateSpec::CPauliSeq {
                control, targets, ..
            } => {
                let mut q = vec![*control];
                q.extend(targets);
                q
            }
        }
    }

    fn validate(&self, n: usize, modulus: u32) -> Result<()> {
        for q in self.qudits() {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, len: n });
            }
        }
        match self {
            GateSpec::MultiplyBy { multiplier, .. } => {
                if gcd(*multiplier as u64, modulus as u64) != 1 {
                    return Err(Error::IllegalMultiplier {
                        multiplier: *multiplier,
                        modulus,
                    });
                }
            }
            GateSpec::Pauli { label } => {
                if label.modulus() != modulus {
                    return Err(Error::ModulusMismatch(label.modulus(), modulus));
                }
                if label.num_qudits() != n {
                    return Err(Error::ShapeMismatch(format!(
                        "Pauli gate on {} qudits in a {n}-qudit register",
                        label.num_qudits()
                    )));
                }
            }
            GateSpec::CPauliSeq {
                control,
                targets,
                a,
                b,
            } => {
                if a.len() != targets.len() || b.len() != targets.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "{} targets but exponent vectors of length {} and {}",
                        targets.len(),
                        a.len(),
                        b.len()
                    )));
                }
                if a.modulus() != modulus || b.modulus() != modulus {
                    return Err(Error::ModulusMismatch(a.modulus(), modulus));
                }
                if targets.contains(control) {
                    return Err(Error::ShapeMismatch(
                        "control qudit also listed as target".into(),
                    ));
                }
            }
            GateSpec::Fourier { .. } => {}
        }
        Ok(())
    }
}

/// Invertible linear map on (Z/DZ)^{2n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordAutomorphism {
    modulus: u32,
    n: usize,
    /// Row-major `2n x 2n`.
    matrix: Vec<u32>,
    direction: Direction,
}

impl CliffordAutomorphism {
    pub fn identity(n: usize, modulus: u32) -> Result<Self> {
        crate::modarith::check_modulus(modulus)?;
        let dim = 2 * n;
        let mut matrix = vec![0u32; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1 % modulus;
        }
        Ok(CliffordAutomorphism {
            modulus,
            n,
            matrix,
            direction: Direction::Forward,
        })
    }

    /// Wraps an explicit row-major matrix; fails unless it is invertible.
    pub fn from_matrix(
        matrix: Vec<u32>,
        n: usize,
        modulus: u32,
        direction: Direction,
    ) -> Result<Self> {
        crate::modarith::check_modulus(modulus)?;
        if matrix.len() != 4 * n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                4 * n * n,
                matrix.len()
            )));
        }
        let auto = CliffordAutomorphism {
            modulus,
            n,
            matrix: matrix.into_iter().map(|x| x % modulus).collect(),
            direction,
        };
        auto.inverse_matrix()?;
        Ok(auto)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn matrix(&self) -> &[u32] {
        &self.matrix
    }

    fn dim(&self) -> usize {
        2 * self.n
    }

    fn entry(&self, i: usize, j: usize) -> u32 {
        self.matrix[i * self.dim() + j]
    }

    /// Image of a digit vector `(r, s)` under the stored matrix.
    pub(crate) fn map_digits(&self, digits: &[u32], out: &mut [u32]) {
        let dim = self.dim();
        let m = self.modulus as u64;
        for (i, o) in out.iter_mut().enumerate().take(dim) {
            let row = &self.matrix[i * dim..(i + 1) * dim];
            let acc = row
                .iter()
                .zip(digits)
                .fold(0u64, |acc, (&a, &x)| (acc + a as u64 * x as u64) % m);
            *o = acc as u32;
        }
    }

    /// Applies the stored matrix to a label.
    pub fn apply(&self, label: &PauliLabel) -> Result<PauliLabel> {
        self.check_label(label)?;
        let digits = label.digits();
        let mut out = vec![0u32; self.dim()];
        self.map_digits(&digits, &mut out);
        PauliLabel::from_digits(&out, self.modulus)
    }

    /// Applies the inverse of the stored matrix to a label.
    pub fn preimage(&self, label: &PauliLabel) -> Result<PauliLabel> {
        self.inverse()?.apply(label)
    }

    fn check_label(&self, label: &PauliLabel) -> Result<()> {
        if label.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(label.modulus(), self.modulus));
        }
        if label.num_qudits() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "label on {} qudits, automorphism on {}",
                label.num_qudits(),
                self.n
            )));
        }
        Ok(())
    }

    fn mat_mul(&self, lhs: &[u32], rhs: &[u32]) -> Vec<u32> {
        let dim = self.dim();
        let m = self.modulus as u64;
        let mut out = vec![0u32; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0u64;
                for k in 0..dim {
                    acc = (acc + lhs[i * dim + k] as u64 * rhs[k * dim + j] as u64) % m;
                }
                out[i * dim + j] = acc as u32;
            }
        }
        out
    }

    fn is_identity_matrix(&self, mat: &[u32]) -> bool {
        let dim = self.dim();
        (0..dim).all(|i| (0..dim).all(|j| mat[i * dim + j] == u32::from(i == j) % self.modulus))
    }

    /// Inverse via the symplectic identity `M^{-1} = J^{-1} M^T J`, with a
    /// Gauss-Jordan fallback for non-symplectic matrices.
    fn inverse_matrix(&self) -> Result<Vec<u32>> {
        let n = self.n;
        let dim = self.dim();
        let m = self.modulus;
        // (J^{-1} M^T J)_{ij}: J = [[0,-I],[I,0]], J^{-1} = [[0,I],[-I,0]].
        let mut candidate = vec![0u32; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                // (J^{-1} M^T)_{i,k}, then times J_{k,j}.
                let (k_row, sign_left) = if i < n { (i + n, false) } else { (i - n, true) };
                let (k_col, sign_right) = if j < n { (j + n, false) } else { (j - n, true) };
                // J^{-1}_{i, k_row} = +1 if i < n else -1; J_{k_col, j} = +1 if j < n else -1.
                let v = self.entry(k_col, k_row);
                let neg = sign_left ^ sign_right;
                candidate[i * dim + j] = if neg { neg_mod(v, m) } else { v };
            }
        }
        if self.is_identity_matrix(&self.mat_mul(&self.matrix, &candidate)) {
            return Ok(candidate);
        }
        self.gauss_jordan_inverse()
    }

    fn gauss_jordan_inverse(&self) -> Result<Vec<u32>> {
        let dim = self.dim();
        let m = self.modulus;
        let mut a = self.matrix.clone();
        let mut inv = vec![0u32; dim * dim];
        for i in 0..dim {
            inv[i * dim + i] = 1 % m;
        }
        let not_invertible = Error::NotInvertible {
            value: 0,
            modulus: m,
        };
        for col in 0..dim {
            let pivot = (col..dim)
                .find(|&r| inv_mod(a[r * dim + col], m).is_some())
                .ok_or(not_invertible.clone())?;
            if pivot != col {
                for j in 0..dim {
                    a.swap(pivot * dim + j, col * dim + j);
                    inv.swap(pivot * dim + j, col * dim + j);
                }
            }
            let p_inv = inv_mod(a[col * dim + col], m).expect("unit pivot");
            for j in 0..dim {
                a[col * dim + j] = mul_mod(a[col * dim + j], p_inv, m);
                inv[col * dim + j] = mul_mod(inv[col * dim + j], p_inv, m);
            }
            for r in 0..dim {
                if r == col {
                    continue;
                }
                let f = a[r * dim + col];
                if f == 0 {
                    continue;
                }
                for j in 0..dim {
                    a[r * dim + j] = sub_mod(a[r * dim + j], mul_mod(f, a[col * dim + j], m), m);
                    inv[r * dim + j] =
                        sub_mod(inv[r * dim + j], mul_mod(f, inv[col * dim + j], m), m);
                }
            }
        }
        Ok(inv)
    }

    /// The automorphism of the inverse gate `U^dagger`, same direction.
    pub fn inverse(&self) -> Result<Self> {
        Ok(CliffordAutomorphism {
            modulus: self.modulus,
            n: self.n,
            matrix: self.inverse_matrix()?,
            direction: self.direction,
        })
    }

    /// The same gate described in the opposite direction.
    pub fn reversed(&self) -> Result<Self> {
        Ok(CliffordAutomorphism {
            modulus: self.modulus,
            n: self.n,
            matrix: self.inverse_matrix()?,
            direction: self.direction.flipped(),
        })
    }

    /// The equivalent `Forward` automorphism.
    pub fn to_forward(&self) -> Result<Self> {
        match self.direction {
            Direction::Forward => Ok(self.clone()),
            Direction::Inverse => self.reversed(),
        }
    }

    /// Preserves `commutation_phase` on every pair of basis labels.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        let dim = self.dim();
        let m = self.modulus;
        // Columns are images of the basis labels; check M^T J M = J.
        let form = |u: &[u32], v: &[u32]| -> u32 {
            // v_r . u_s - u_r . v_s
            let mut acc = 0u32;
            for q in 0..n {
                acc = add_mod(acc, mul_mod(v[q], u[n + q], m), m);
                acc = sub_mod(acc, mul_mod(u[q], v[n + q], m), m);
            }
            acc
        };
        let col = |j: usize| -> Vec<u32> { (0..dim).map(|i| self.entry(i, j)).collect() };
        let cols: Vec<Vec<u32>> = (0..dim).map(col).collect();
        let mut e_i = vec![0u32; dim];
        let mut e_j = vec![0u32; dim];
        for i in 0..dim {
            for j in 0..dim {
                e_i.iter_mut().for_each(|x| *x = 0);
                e_j.iter_mut().for_each(|x| *x = 0);
                e_i[i] = 1 % m;
                e_j[j] = 1 % m;
                if form(&cols[i], &cols[j]) != form(&e_i, &e_j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Composition: the automorphism of applying `first`, then `second`.
pub fn compose(
    first: &CliffordAutomorphism,
    second: &CliffordAutomorphism,
) -> Result<CliffordAutomorphism> {
    if first.modulus != second.modulus {
        return Err(Error::ModulusMismatch(first.modulus, second.modulus));
    }
    if first.n != second.n {
        return Err(Error::ShapeMismatch(format!(
            "automorphisms on {} and {} qudits",
            first.n, second.n
        )));
    }
    if first.direction != second.direction {
        return Err(Error::DirectionMismatch);
    }
    let matrix = match first.direction {
        Direction::Forward => first.mat_mul(&second.matrix, &first.matrix),
        Direction::Inverse => first.mat_mul(&first.matrix, &second.matrix),
    };
    Ok(CliffordAutomorphism {
        modulus: first.modulus,
        n: first.n,
        matrix,
        direction: first.direction,
    })
}

fn set(auto: &mut CliffordAutomorphism, i: usize, j: usize, v: u32) {
    let dim = auto.dim();
    auto.matrix[i * dim + j] = v % auto.modulus;
}

fn cx_forward(n: usize, m: u32, c: usize, t: usize, a: u32) -> CliffordAutomorphism {
    // r_t += a r_c ; s_c -= a s_t
    let mut auto = CliffordAutomorphism::identity(n, m).expect("valid modulus");
    set(&mut auto, t, c, a);
    set(&mut auto, n + c, n + t, neg_mod(a % m, m));
    auto
}

fn cz_forward(n: usize, m: u32, c: usize, t: usize, b: u32) -> CliffordAutomorphism {
    // s_c += b r_t ; s_t += b r_c
    let mut auto = CliffordAutomorphism::identity(n, m).expect("valid modulus");
    set(&mut auto, n + c, t, b);
    set(&mut auto, n + t, c, b);
    auto
}

/// Forward automorphism of `gate` on an `n`-qudit register over Z/DZ.
pub fn automorphism_of(gate: &GateSpec, n: usize, modulus: u32) -> Result<CliffordAutomorphism> {
    crate::modarith::check_modulus(modulus)?;
    gate.validate(n, modulus)?;
    let m = modulus;
    match gate {
        GateSpec::Fourier { qudit } => {
            // (r, s) -> (-s, r)
            let q = *qudit;
            let mut auto = CliffordAutomorphism::identity(n, m)?;
            set(&mut auto, q, q, 0);
            set(&mut auto, n + q, n + q, 0);
            set(&mut auto, q, n + q, m - 1);
            set(&mut auto, n + q, q, 1);
            Ok(auto)
        }
        GateSpec::MultiplyBy { multiplier, qudit } => {
            // (r, s) -> (l r, l^{-1} s)
            let q = *qudit;
            let l = multiplier % m;
            let l_inv = inv_mod(l, m).ok_or(Error::IllegalMultiplier {
                multiplier: *multiplier,
                modulus: m,
            })?;
            let mut auto = CliffordAutomorphism::identity(n, m)?;
            set(&mut auto, q, q, l);
            set(&mut auto, n + q, n + q, l_inv);
            Ok(auto)
        }
        GateSpec::Pauli { .. } => CliffordAutomorphism::identity(n, m),
        GateSpec::CPauliSeq {
            control,
            targets,
            a,
            b,
        } => {
            let mut acc = CliffordAutomorphism::identity(n, m)?;
            for (i, &t) in targets.iter().enumerate() {
                let ai = a.as_slice()[i];
                let bi = b.as_slice()[i];
                if ai != 0 {
                    acc = compose(&acc, &cx_forward(n, m, *control, t, ai))?;
                }
                if bi != 0 {
                    acc = compose(&acc, &cz_forward(n, m, *control, t, bi))?;
                }
            }
            Ok(acc)
        }
    }
}

/// Closed-form propagation across a controlled-Pauli sequence:
/// `X^j Z^k ⊗ X^l Z^m -> X^j Z^{k + l.b - m.a} ⊗ X^{l + j a} Z^{m + j b}`.
///
/// Agrees with [`automorphism_of`] whenever no target carries both a
/// `CX` and a `CZ` power (`a_i b_i = 0` for all `i`); otherwise the two
/// gates on one target do not commute and the control picks up an extra
/// `Z^{j a_i b_i}`.
pub fn cpauli_seq_closed_form(
    label: &PauliLabel,
    control: usize,
    targets: &[usize],
    a: &ResidueVector,
    b: &ResidueVector,
) -> Result<PauliLabel> {
    let m = label.modulus();
    let n = label.num_qudits();
    let mut d = label.digits();
    let j = d[control];
    let k = d[n + control];
    let mut dot = 0u32;
    for (i, &t) in targets.iter().enumerate() {
        let (l, mm) = (d[t], d[n + t]);
        dot = add_mod(dot, mul_mod(l, b.as_slice()[i], m), m);
        dot = sub_mod(dot, mul_mod(mm, a.as_slice()[i], m), m);
    }
    d[n + control] = add_mod(k, dot, m);
    for (i, &t) in targets.iter().enumerate() {
        d[t] = add_mod(d[t], mul_mod(j, a.as_slice()[i], m), m);
        d[n + t] = add_mod(d[n + t], mul_mod(j, b.as_slice()[i], m), m);
    }
    PauliLabel::from_digits(&d, m)
}

/// Dense unitary of a library gate.
pub fn gate_unitary(gate: &GateSpec, n: usize, modulus: u32, cap: usize) -> Result<CMatrix> {
    gate.validate(n, modulus)?;
    let m = modulus;
    let dim = hilbert_dim(m, n, cap)?;
    let stride = |q: usize| (m as usize).pow((n - 1 - q) as u32);
    let digit = |idx: usize, q: usize| ((idx / stride(q)) % m as usize) as u32;
    let with_digit = |idx: usize, q: usize, v: u32| {
        idx - digit(idx, q) as usize * stride(q) + v as usize * stride(q)
    };
    let one = Complex64::new(1.0, 0.0);
    match gate {
        GateSpec::Fourier { qudit } => {
            let q = *qudit;
            let norm = 1.0 / (m as f64).sqrt();
            let mut u = CMatrix::zeros(dim, dim);
            for col in 0..dim {
                let k = digit(col, q);
                for j in 0..m {
                    let row = with_digit(col, q, j);
                    u[(row, col)] = omega_pow(mul_mod(j, k, m) as u64, m) * norm;
                }
            }
            Ok(u)
        }
        GateSpec::MultiplyBy { multiplier, qudit } => {
            let mut u = CMatrix::zeros(dim, dim);
            for col in 0..dim {
                let k = digit(col, *qudit);
                let row = with_digit(col, *qudit, mul_mod(k, *multiplier % m, m));
                u[(row, col)] = one;
            }
            Ok(u)
        }
        GateSpec::Pauli { label } => label.to_matrix_with_cap(cap),
        GateSpec::CPauliSeq {
            control,
            targets,
            a,
            b,
        } => {
            let mut total = CMatrix::identity(dim, dim);
            for (i, &t) in targets.iter().enumerate() {
                let ai = a.as_slice()[i];
                let bi = b.as_slice()[i];
                let mut cx = CMatrix::zeros(dim, dim);
                let mut cz = CMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let kc = digit(col, *control);
                    let kt = digit(col, t);
                    let row = with_digit(col, t, add_mod(kt, mul_mod(ai, kc, m), m));
                    cx[(row, col)] = one;
                    cz[(col, col)] = omega_pow(mul_mod(bi, mul_mod(kc, kt, m), m) as u64, m);
                }
                total = &cz * &cx * &total;
            }
            Ok(total)
        }
    }
}

/// Checks `U M(L) U^dagger ∝ M(auto(L))` for every label `L`, tolerance
/// `1e-10`.
pub fn verify_conjugation(
    gate: &GateSpec,
    auto: &CliffordAutomorphism,
    cap: usize,
) -> Result<bool> {
    let n = auto.num_qudits();
    let m = auto.modulus();
    let u = gate_unitary(gate, n, m, cap)?;
    let forward = auto.to_forward()?;
    let ud = u.adjoint();
    let mut digits = vec![0u32; 2 * n];
    loop {
        let label = PauliLabel::from_digits(&digits, m)?;
        let lhs = &u * label.to_matrix_with_cap(cap)? * &ud;
        let rhs = forward.apply(&label)?.to_matrix_with_cap(cap)?;
        if !equal_up_to_phase(&lhs, &rhs, 1e-10) {
            return Ok(false);
        }
        if !increment(&mut digits, m) {
            break;
        }
    }
    Ok(true)
}

/// `verify_conjugation` with the default oracle cap.
pub fn verify_gate(gate: &GateSpec, n: usize, modulus: u32) -> Result<bool> {
    let auto = automorphism_of(gate, n, modulus)?;
    verify_conjugation(gate, &auto, DEFAULT_ORACLE_CAP)
}

/// Every gate shape of the library on a register of `n <= 2` qudits, for
/// exhaustive oracle checks.
pub fn library_gates(n: usize, modulus: u32) -> Result<Vec<GateSpec>> {
    let m = modulus;
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(GateSpec::Fourier { qudit: q });
        for l in 1..m {
            if gcd(l as u64, m as u64) == 1 {
                gates.push(GateSpec::MultiplyBy {
                    multiplier: l,
                    qudit: q,
                });
            }
        }
    }
    let mut pauli = vec![0u32; 2 * n];
    pauli[0] = 1 % m;
    pauli[2 * n - 1] = (m - 1) % m;
    gates.push(GateSpec::Pauli {
        label: PauliLabel::from_digits(&pauli, m)?,
    });
    if n >= 2 {
        for (c, t) in [(0usize, 1usize), (1, 0)] {
            for p in 1..m {
                gates.push(GateSpec::cx(c, t, p, m)?);
                gates.push(GateSpec::cz(c, t, p, m)?);
            }
            gates.push(GateSpec::CPauliSeq {
                control: c,
                targets: vec![t],
                a: ResidueVector::new([1], m)?,
                b: ResidueVector::new([1], m)?,
            });
        }
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::commutation_phase;

    fn all_labels(n: usize, m: u32) -> Vec<PauliLabel> {
        let mut digits = vec![0u32; 2 * n];
        let mut out = Vec::new();
        loop {
            out.push(PauliLabel::from_digits(&digits, m).unwrap());
            if !increment(&mut digits, m) {
                break;
            }
        }
        out
    }

    #[test]
    fn pauli_gate_is_identity() {
        let label = PauliLabel::single(0, 2, 1, 1, 3).unwrap();
        let auto = automorphism_of(&GateSpec::Pauli { label }, 1, 3).unwrap();
        assert_eq!(auto, CliffordAutomorphism::identity(1, 3).unwrap());
    }

    #[test]
    fn cz_spreads_x_onto_target() {
        let cz = automorphism_of(&GateSpec::cz(0, 1, 1, 5).unwrap(), 2, 5).unwrap();
        let x1 = PauliLabel::single(0, 1, 0, 2, 5).unwrap();
        let image = cz.apply(&x1).unwrap();
        assert_eq!(image.to_string(), "X1Z0@q0 * X0Z1@q1");
    }

    #[test]
    fn fourier_maps_x_to_z() {
        let f = automorphism_of(&GateSpec::Fourier { qudit: 0 }, 1, 5).unwrap();
        let x = PauliLabel::single(0, 1, 0, 1, 5).unwrap();
        assert_eq!(
            f.apply(&x).unwrap(),
            PauliLabel::single(0, 0, 1, 1, 5).unwrap()
        );
        // Z -> X^{-1}
        let z = PauliLabel::single(0, 0, 1, 1, 5).unwrap();
        assert_eq!(
            f.apply(&z).unwrap(),
            PauliLabel::single(0, 4, 0, 1, 5).unwrap()
        );
    }

    #[test]
    fn multiply_gate_rules() {
        let g = automorphism_of(
            &GateSpec::MultiplyBy {
                multiplier: 2,
                qudit: 0,
            },
            1,
            5,
        )
        .unwrap();
        let x = PauliLabel::single(0, 1, 0, 1, 5).unwrap();
        let z = PauliLabel::single(0, 0, 1, 1, 5).unwrap();
        assert_eq!(
            g.apply(&x).unwrap(),
            PauliLabel::single(0, 2, 0, 1, 5).unwrap()
        );
        assert_eq!(
            g.apply(&z).unwrap(),
            PauliLabel::single(0, 0, 3, 1, 5).unwrap()
        );
    }

    #[test]
    fn gate_errors() {
        assert_eq!(
            automorphism_of(
                &GateSpec::MultiplyBy {
                    multiplier: 2,
                    qudit: 0
                },
                1,
                4
            ),
            Err(Error::IllegalMultiplier {
                multiplier: 2,
                modulus: 4
            })
        );
        assert_eq!(
            automorphism_of(&GateSpec::Fourier { qudit: 3 }, 2, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        );
    }

    #[test]
    fn composition_examples() {
        let m = 5;
        let id = CliffordAutomorphism::identity(1, m).unwrap();
        let f = automorphism_of(&GateSpec::Fourier { qudit: 0 }, 1, m).unwrap();
        assert_eq!(compose(&id, &f).unwrap(), f);
        let f2 = compose(&f, &f).unwrap();
        let f4 = compose(&f2, &f2).unwrap();
        assert_eq!(f4, id);
        assert_eq!(compose(&f, &f.inverse().unwrap()).unwrap(), id);
        // Matrix oracle: F^4 is the identity up to phase.
        let u = gate_unitary(&GateSpec::Fourier { qudit: 0 }, 1, m, 4096).unwrap();
        let u4 = &u * &u * &u * &u;
        assert!(equal_up_to_phase(&u4, &CMatrix::identity(5, 5), 1e-12));

        let rev = f.reversed().unwrap();
        assert_eq!(compose(&f, &rev), Err(Error::DirectionMismatch));
        let two = CliffordAutomorphism::identity(2, m).unwrap();
        assert!(matches!(compose(&f, &two), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn compose_order_matches_unitaries() {
        let m = 3;
        let g1 = GateSpec::Fourier { qudit: 0 };
        let g2 = GateSpec::cx(0, 1, 1, m).unwrap();
        let a1 = automorphism_of(&g1, 2, m).unwrap();
        let a2 = automorphism_of(&g2, 2, m).unwrap();
        let both = compose(&a1, &a2).unwrap();
        let u = gate_unitary(&g2, 2, m, 4096).unwrap() * gate_unitary(&g1, 2, m, 4096).unwrap();
        for label in all_labels(2, m) {
            let lhs = &u * label.to_matrix().unwrap() * u.adjoint();
            let rhs = both.apply(&label).unwrap().to_matrix().unwrap();
            assert!(equal_up_to_phase(&lhs, &rhs, 1e-10));
        }
        // Inverse-direction composition is the inverse of the forward one.
        let inv_both = compose(&a1.reversed().unwrap(), &a2.reversed().unwrap()).unwrap();
        assert_eq!(inv_both, both.reversed().unwrap());
    }

    #[test]
    fn oracle_examples() {
        let f = GateSpec::Fourier { qudit: 0 };
        assert!(verify_gate(&f, 1, 3).unwrap());
        let m2 = GateSpec::MultiplyBy {
            multiplier: 2,
            qudit: 0,
        };
        assert!(verify_gate(&m2, 1, 5).unwrap());
        let cz = GateSpec::cz(0, 1, 1, 2).unwrap();
        let cx_auto = automorphism_of(&GateSpec::cx(0, 1, 1, 2).unwrap(), 2, 2).unwrap();
        assert!(!verify_conjugation(&cz, &cx_auto, 4096).unwrap());
    }

    #[test]
    fn library_passes_oracle() {
        for &m in &[2u32, 3, 5] {
            for n in 1..=2 {
                for gate in library_gates(n, m).unwrap() {
                    assert!(verify_gate(&gate, n, m).unwrap(), "{gate:?} D={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn inverse_direction_verifies_too() {
        let gate = GateSpec::cx(1, 0, 2, 3).unwrap();
        let auto = automorphism_of(&gate, 2, 3).unwrap().reversed().unwrap();
        assert_eq!(auto.direction(), Direction::Inverse);
        assert!(verify_conjugation(&gate, &auto, 4096).unwrap());
    }

    #[test]
    fn library_is_symplectic_and_invertible() {
        for &m in &[2u32, 3, 4, 5] {
            for n in 1..=2 {
                let labels = all_labels(n, m);
                for gate in library_gates(n, m).unwrap() {
                    let auto = automorphism_of(&gate, n, m).unwrap();
                    assert!(auto.is_symplectic());
                    let inv = auto.inverse().unwrap();
                    for a in &labels {
                        assert_eq!(&inv.apply(&auto.apply(a).unwrap()).unwrap(), a);
                    }
                    for a in &labels {
                        let ia = auto.apply(a).unwrap();
                        for b in &labels {
                            let ib = auto.apply(b).unwrap();
                            assert_eq!(
                                commutation_phase(&ia, &ib).unwrap(),
                                commutation_phase(a, b).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_agrees_without_mixed_targets() {
        let m = 5;
        let n = 3;
        let a = ResidueVector::new([2, 0], m).unwrap();
        let b = ResidueVector::new([0, 3], m).unwrap();
        let gate = GateSpec::CPauliSeq {
            control: 0,
            targets: vec![1, 2],
            a: a.clone(),
            b: b.clone(),
        };
        let auto = automorphism_of(&gate, n, m).unwrap();
        let inv = auto.inverse().unwrap();
        for label in all_labels(n, m) {
            let closed = cpauli_seq_closed_form(&label, 0, &[1, 2], &a, &b).unwrap();
            assert_eq!(auto.apply(&label).unwrap(), closed);
            // The tensor update formula with the minus signs is the inverse map.
            let d = label.digits();
            let (j, l1, l2, k, m1, m2) = (d[0], d[1], d[2], d[3], d[4], d[5]);
            let pre = PauliLabel::from_digits(
                &[
                    j,
                    sub_mod(l1, mul_mod(j, 2, m), m),
                    l2,
                    add_mod(sub_mod(k, mul_mod(l2, 3, m), m), mul_mod(m1, 2, m), m),
                    m1,
                    sub_mod(m2, mul_mod(j, 3, m), m),
                ],
                m,
            )
            .unwrap();
            assert_eq!(inv.apply(&label).unwrap(), pre);
        }
    }

    #[test]
    fn mixed_target_picks_up_control_phase_gate() {
        let m = 3;
        let a = ResidueVector::new([1], m).unwrap();
        let b = ResidueVector::new([1], m).unwrap();
        let gate = GateSpec::CPauliSeq {
            control: 0,
            targets: vec![1],
            a: a.clone(),
            b: b.clone(),
        };
        let auto = automorphism_of(&gate, 2, m).unwrap();
        let x0 = PauliLabel::single(0, 1, 0, 2, m).unwrap();
        let closed = cpauli_seq_closed_form(&x0, 0, &[1], &a, &b).unwrap();
        let exact = auto.apply(&x0).unwrap();
        assert_ne!(closed, exact);
        assert_eq!(exact.to_string(), "X1Z1@q0 * X1Z1@q1");
        assert!(verify_gate(&gate, 2, m).unwrap());
    }

    #[test]
    fn from_matrix_rejects_singular() {
        assert!(
            CliffordAutomorphism::from_matrix(vec![1, 0, 0, 0], 1, 3, Direction::Forward).is_err()
        );
        let ok =
            CliffordAutomorphism::from_matrix(vec![2, 1, 1, 1], 1, 3, Direction::Forward).unwrap();
        let inv = ok.inverse().unwrap();
        assert_eq!(
            compose(&ok, &inv).unwrap(),
            CliffordAutomorphism::identity(1, 3).unwrap()
        );
    }
}
