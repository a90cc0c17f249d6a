//! Pauli matrices, a small gate catalog, the symbolic Pauli group and the
//! propagator `exp(−iωtK)` for involutory `K`.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matfun::expm_involutory;
use crate::solver::verify;

pub const GATE_NAMES: [&str; 7] = ["H", "CNOT", "SWAP", "X", "Y", "Z", "I2"];
pub const MAX_PAULI_QUBITS: usize = 6;
const CATALOG_TOL: f64 = 1e-12;

/// `σ_0 = I_2`, `σ_1`, `σ_2`, `σ_3`.
pub fn pauli(j: usize) -> Result<CMatrix> {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let rows = match j {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => return Err(Error::Domain(format!("Pauli index {j} not in 0..=3"))),
    };
    CMatrix::from_rows(&rows)
}

/// `σ_{j1} ⊗ σ_{j2} ⊗ ⋯`, left to right.
pub fn pauli_string(js: &[usize]) -> Result<CMatrix> {
    let (first, rest) = js
        .split_first()
        .ok_or_else(|| Error::Size("empty Pauli string".into()))?;
    let mut acc = pauli(*first)?;
    for &j in rest {
        acc = acc.kron(&pauli(j)?);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateCatalogEntry {
    pub name: &'static str,
    pub matrix: CMatrix,
    pub involutory: bool,
    pub qubits: usize,
}

pub fn gate(name: &str) -> Result<GateCatalogEntry> {
    let (name, matrix, qubits) = match name {
        "H" => (
            "H",
            &CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, -1.0]])? * FRAC_1_SQRT_2,
            1,
        ),
        "CNOT" => (
            "CNOT",
            CMatrix::from_real_rows(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ])?,
            2,
        ),
        "SWAP" => (
            "SWAP",
            CMatrix::from_real_rows(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ])?,
            2,
        ),
        "X" => ("X", pauli(1)?, 1),
        "Y" => ("Y", pauli(2)?, 1),
        "Z" => ("Z", pauli(3)?, 1),
        "I2" => ("I2", pauli(0)?, 1),
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    let involutory = matrix.is_involutory(CATALOG_TOL)?;
    Ok(GateCatalogEntry {
        name,
        matrix,
        involutory,
        qubits,
    })
}

pub fn gate_catalog() -> Vec<GateCatalogEntry> {
    GATE_NAMES
        .iter()
        .map(|n| gate(n).expect("catalog names are valid"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Product `self · other` as `(power of i, letter)`.
    pub fn product(self, other: Self) -> (u8, Self) {
        use PauliLetter::*;
        match (self, other) {
            (I, b) => (0, b),
            (a, I) => (0, a),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = ['I', 'X', 'Y', 'Z'][self.index()];
        write!(f, "{c}")
    }
}

/// `i^phase · σ_{l1} ⊗ ⋯ ⊗ σ_{ln}`, kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliElement {
    phase: u8,
    letters: Vec<PauliLetter>,
}

impl PauliElement {
    pub fn new(phase: u8, letters: Vec<PauliLetter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Size("a Pauli element needs at least one letter".into()));
        }
        Ok(Self {
            phase: phase % 4,
            letters,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(0, vec![PauliLetter::I; n])
    }

    /// Exponent `p` of the phase `i^p`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_value(&self) -> Complex64 {
        Complex64::new(0.0, 1.0).powu(self.phase as u32)
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.letters.len() != other.letters.len() {
            return Err(Error::Shape(format!(
                "Pauli elements on {} and {} qubits",
                self.letters.len(),
                other.letters.len()
            )));
        }
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.product(b);
                phase += p;
                l
            })
            .collect();
        Self::new(phase, letters)
    }

    /// Letters square to the identity, so only the phase inverts.
    pub fn inverse(&self) -> Self {
        Self {
            phase: (4 - self.phase) % 4,
            letters: self.letters.clone(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let js: Vec<usize> = self.letters.iter().map(|l| l.index()).collect();
        Ok(pauli_string(&js)?.scale(self.phase_value()))
    }
}

impl fmt::Display for PauliElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All `4^{n+1}` elements of the n-qubit Pauli group, phases included.
pub fn pauli_group(n: usize) -> Result<BTreeSet<PauliElement>> {
    if n == 0 || n > MAX_PAULI_QUBITS {
        return Err(Error::Size(format!(
            "Pauli group on {n} qubits; supported range is 1..={MAX_PAULI_QUBITS}"
        )));
    }
    let mut words: Vec<Vec<PauliLetter>> = vec![Vec::new()];
    for _ in 0..n {
        words = words
            .into_iter()
            .flat_map(|w| {
                PauliLetter::ALL.iter().map(move |&l| {
                    let mut next = w.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    let mut group = BTreeSet::new();
    for w in words {
        for phase in 0..4 {
            group.insert(PauliElement::new(phase, w.clone())?);
        }
    }
    Ok(group)
}

/// Checks that products and inverses stay in the set.
pub fn is_closed(group: &BTreeSet<PauliElement>) -> Result<bool> {
    for a in group {
        if !group.contains(&a.inverse()) {
            return Ok(false);
        }
        for b in group {
            if !group.contains(&a.mul(b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `i·I` and the single-qubit `X`, `Z` on each position generate the group.
pub fn pauli_generators(n: usize) -> Result<Vec<PauliElement>> {
    let mut gens = vec![PauliElement::new(1, vec![PauliLetter::I; n])?];
    for q in 0..n {
        for l in [PauliLetter::X, PauliLetter::Z] {
            let mut letters = vec![PauliLetter::I; n];
            letters[q] = l;
            gens.push(PauliElement::new(0, letters)?);
        }
    }
    Ok(gens)
}

/// Closure test linear in the group size: a finite set containing the identity
/// that is stable under right multiplication by every generator is the whole
/// generated group.
pub fn is_closed_under_generators(group: &BTreeSet<PauliElement>) -> Result<bool> {
    let Some(n) = group.first().map(|e| e.letters.len()) else {
        return Ok(false);
    };
    if !group.contains(&PauliElement::identity(n)?) {
        return Ok(false);
    }
    let gens = pauli_generators(n)?;
    for a in group {
        for g in &gens {
            if !group.contains(&a.mul(g)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `exp(−iωtK) = cos(ωt)I − i sin(ωt)K` for involutory `K`.
pub fn evolve(k: &CMatrix, omega_t: f64) -> Result<CMatrix> {
    expm_involutory(k, Complex64::new(0.0, -omega_t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateIdentityReport {
    pub involutory: bool,
    /// Residual at `z = −iπ/2`.
    pub residual_minus: f64,
    /// Residual at `z = +iπ/2`.
    pub residual_plus: f64,
    /// `k` with `z = (2k+1)iπ/2`: −1 and 0.
    pub branch_minus: i32,
    pub branch_plus: i32,
    pub passed: bool,
}

/// `k` such that `z = (2k+1)·iπ/2`, if `z` lies on that lattice.
pub fn involutory_family_index(z: Complex64) -> Option<i32> {
    let m = z.im / FRAC_PI_2;
    let odd = m.round();
    let is_odd = (odd as i64).rem_euclid(2) == 1;
    (z.re.abs() <= 1e-12 && (m - odd).abs() <= 1e-9 && is_odd).then(|| ((odd as i64 - 1) / 2) as i32)
}

pub fn gate_identity_check(g: &CMatrix, tol: f64) -> Result<GateIdentityReport> {
    g.require_square("gate_identity_check")?;
    let involutory = g.is_involutory(CATALOG_TOL.max(tol))?;
    let z_minus = Complex64::new(0.0, -FRAC_PI_2);
    let z_plus = Complex64::new(0.0, FRAC_PI_2);
    let minus = verify(g, z_minus, tol)?;
    let plus = verify(g, z_plus, tol)?;
    Ok(GateIdentityReport {
        involutory,
        residual_minus: minus.residual,
        residual_plus: plus.residual,
        branch_minus: involutory_family_index(z_minus).expect("on lattice"),
        branch_plus: involutory_family_index(z_plus).expect("on lattice"),
        passed: involutory && minus.verified && plus.verified,
    })
}
