//! Classification, enumeration, verification and construction of solutions
//! `(A, z)` of `exp(z(A − I)) = A`.
//!
//! Eigenvalue conditions only ever prune candidates. Every reported `z` has
//! passed [`verify`], which is the sole arbiter: for nonnormal matrices the
//! eigenvalue conditions are necessary but not sufficient.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matfun::expm;
use crate::specfun::{lambda_from_z, log_branch, BranchIndex};
use crate::spectral::{assemble_normal, eigenvalues, EigenCluster, DEFAULT_GROUP_TOL};

pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;
pub const DEFAULT_INTEGRALITY_TOL: f64 = 1e-6;
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-10;
pub const DEFAULT_BRANCH_MIN: i32 = -8;
pub const DEFAULT_BRANCH_MAX: i32 = 8;

/// Inclusive range of logarithm branches searched for the anchor eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchRange {
    min: i32,
    max: i32,
}

impl BranchRange {
    pub fn new(min: i32, max: i32) -> Result<Self> {
        if min > max {
            return Err(Error::Domain(format!("empty branch range {min}:{max}")));
        }
        BranchIndex::new(min)?;
        BranchIndex::new(max)?;
        Ok(Self { min, max })
    }

    pub fn min(&self) -> i32 {
        self.min
    }

    pub fn max(&self) -> i32 {
        self.max
    }

    pub fn contains(&self, k: i32) -> bool {
        (self.min..=self.max).contains(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = BranchIndex> {
        (self.min..=self.max).map(|k| BranchIndex::new(k).expect("range validated on construction"))
    }
}

impl Default for BranchRange {
    fn default() -> Self {
        Self {
            min: DEFAULT_BRANCH_MIN,
            max: DEFAULT_BRANCH_MAX,
        }
    }
}

impl fmt::Display for BranchRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Verification tolerance, scaled by `max(1, ‖A‖_F)`.
    pub tol: f64,
    /// Distance to the nearest integer accepted for an implied branch index.
    pub integrality_tol: f64,
    /// Eigenvalue clustering tolerance.
    pub group_tol: f64,
    /// Tolerance for the normality / involution classification.
    pub structure_tol: f64,
    pub branches: BranchRange,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_VERIFY_TOL,
            integrality_tol: DEFAULT_INTEGRALITY_TOL,
            group_tol: DEFAULT_GROUP_TOL,
            structure_tol: DEFAULT_STRUCTURE_TOL,
            branches: BranchRange::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub verified: bool,
    /// `‖exp(z(A − I)) − A‖_F`.
    pub residual: f64,
}

/// Checks `exp(z(A − I)) = A` to `tol·max(1, ‖A‖_F)`.
///
/// An overflowing exponential is reported as unverified with infinite residual.
pub fn verify(a: &CMatrix, z: Complex64, tol: f64) -> Result<Verification> {
    a.require_square("verify")?;
    let arg = a.shift_diag(Complex64::new(-1.0, 0.0))?.scale(z);
    let residual = match expm(&arg) {
        Ok(e) => (&e - a).frobenius_norm(),
        Err(Error::Overflow(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(Verification {
        verified: residual <= tol * a.frobenius_norm().max(1.0),
        residual,
    })
}

/// `‖exp(zA) − e^z·A‖_F / |e^z|`, the residual of the equivalent form `e^{zA} = e^z·A`.
pub fn scaled_form_residual(a: &CMatrix, z: Complex64) -> Result<f64> {
    a.require_square("scaled_form_residual")?;
    let ez = z.exp();
    let e = expm(&a.scale(z))?;
    Ok((&e - &a.scale(ez)).frobenius_norm() / ez.norm())
}

/// `z = (Log λ + 2πik) / (λ − 1)`.
pub fn candidate_z_from_eigenvalue(lambda: Complex64, k: BranchIndex, group_tol: f64) -> Result<Complex64> {
    if (lambda - 1.0).norm() <= group_tol {
        return Err(Error::Domain(
            "a unit eigenvalue satisfies the scalar equation for every z".into(),
        ));
    }
    Ok(log_branch(lambda, k)? / (lambda - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrality {
    pub is_integer: bool,
    /// The implied branch index, as computed (complex in general).
    pub k_j: Complex64,
}

impl Integrality {
    pub fn rounded(&self) -> i64 {
        self.k_j.re.round() as i64
    }
}

/// Branch index implied for `λ_j` once the anchor `(λ_1, k)` fixes `z`:
/// `k_j = [(λ_j − 1)/(λ_1 − 1)·(Log λ_1 + 2πik) − Log λ_j] / 2πi`.
pub fn branch_integrality(
    lambda_anchor: Complex64,
    k_anchor: BranchIndex,
    lambda_j: Complex64,
    tol: f64,
) -> Result<Integrality> {
    let anchor_log = log_branch(lambda_anchor, k_anchor)?;
    let own_log = log_branch(lambda_j, BranchIndex::PRINCIPAL)?;
    let ratio = (lambda_j - 1.0) / (lambda_anchor - 1.0);
    let k_j = (ratio * anchor_log - own_log) / Complex64::new(0.0, 2.0 * PI);
    let is_integer = (k_j.re - k_j.re.round()).abs() <= tol && k_j.im.abs() <= tol;
    Ok(Integrality { is_integer, k_j })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    AllZ,
    Discrete,
    Empty,
}

impl SolutionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolutionKind::AllZ => "ALL_Z",
            SolutionKind::Discrete => "DISCRETE",
            SolutionKind::Empty => "EMPTY",
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Identity,
    NormalCase2,
    NonnormalInvolutory,
    NonnormalGeneral,
    Unipotent,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Identity => "IDENTITY",
            Classification::NormalCase2 => "NORMAL_CASE2",
            Classification::NonnormalInvolutory => "NONNORMAL_INVOLUTORY",
            Classification::NonnormalGeneral => "NONNORMAL_GENERAL",
            Classification::Unipotent => "UNIPOTENT",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionWitness {
    pub z: Complex64,
    /// Logarithm branch of the anchor eigenvalue that produced `z`.
    pub anchor_branch: BranchIndex,
    /// One branch per distinct non-unit eigenvalue, anchor first.
    pub per_eigenvalue_branches: Vec<BranchIndex>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub kind: SolutionKind,
    pub classification: Classification,
    pub solutions: Vec<SolutionWitness>,
    pub branch_range: BranchRange,
    /// Anchor eigenvalue used to generate candidates, when there was one.
    pub anchor: Option<Complex64>,
}

impl SolutionSet {
    /// Whether `z` is a reported solution (always true for `ALL_Z`).
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        match self.kind {
            SolutionKind::AllZ => true,
            SolutionKind::Empty => false,
            SolutionKind::Discrete => self.solutions.iter().any(|s| (s.z - z).norm() <= tol),
        }
    }

    pub fn zs(&self) -> Vec<Complex64> {
        self.solutions.iter().map(|s| s.z).collect()
    }

    fn empty(classification: Classification, branch_range: BranchRange, anchor: Option<Complex64>) -> Self {
        Self {
            kind: SolutionKind::Empty,
            classification,
            solutions: Vec::new(),
            branch_range,
            anchor,
        }
    }
}

fn is_nilpotent(n_mat: &CMatrix) -> Result<bool> {
    let n = n_mat.nrows();
    let scale = n_mat.frobenius_norm().max(1.0).powi(n as i32);
    Ok(n_mat.powi(n as u32)?.frobenius_norm() <= 1e-12 * scale)
}

/// `log(I + N)` for nilpotent `N`: the alternating series terminates after n − 1 terms.
fn nilpotent_log(n_mat: &CMatrix) -> CMatrix {
    let n = n_mat.nrows();
    let mut sum = CMatrix::zeros(n, n);
    let mut power = n_mat.clone();
    for m in 1..n {
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sum = &sum + &(&power * (sign / m as f64));
        power = &power * n_mat;
    }
    sum
}

fn solve_unipotent(a: &CMatrix, options: &SolveOptions) -> Result<SolutionSet> {
    let n_mat = a.shift_diag(Complex64::new(-1.0, 0.0))?;
    let log = nilpotent_log(&n_mat);
    // scalar least squares: z = <N, L> / <N, N>
    let num: Complex64 = n_mat
        .as_slice()
        .iter()
        .zip(log.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let den: f64 = n_mat.as_slice().iter().map(|x| x.norm_sqr()).sum();
    let z = num / den;
    let check = verify(a, z, options.tol)?;
    if !check.verified || z.norm() == 0.0 {
        return Ok(SolutionSet::empty(Classification::Unipotent, options.branches, None));
    }
    Ok(SolutionSet {
        kind: SolutionKind::Discrete,
        classification: Classification::Unipotent,
        solutions: vec![SolutionWitness {
            z,
            anchor_branch: BranchIndex::PRINCIPAL,
            per_eigenvalue_branches: Vec::new(),
            residual: check.residual,
        }],
        branch_range: options.branches,
        anchor: None,
    })
}

/// Non-unit cluster of largest modulus, ties broken by real then imaginary part.
fn pick_anchor(clusters: &[EigenCluster]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in clusters.iter().enumerate() {
        if c.is_unit {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let (x, y) = (c.representative, clusters[b].representative);
                let tie = 1e-12 * x.norm().max(y.norm()).max(1.0);
                let better = if (x.norm() - y.norm()).abs() > tie {
                    x.norm() > y.norm()
                } else if (x.re - y.re).abs() > tie {
                    x.re > y.re
                } else {
                    x.im > y.im
                };
                Some(if better { i } else { b })
            }
        };
    }
    best
}

/// All `z` in the searched branch range for which `exp(z(A − I)) = A`.
pub fn solve_z(a: &CMatrix, options: &SolveOptions) -> Result<SolutionSet> {
    let n = a.require_square("solve_z")?;
    let identity = CMatrix::identity(n)?;
    if (a - &identity).frobenius_norm() <= options.tol {
        return Ok(SolutionSet {
            kind: SolutionKind::AllZ,
            classification: Classification::Identity,
            solutions: Vec::new(),
            branch_range: options.branches,
            anchor: None,
        });
    }

    let spectrum = eigenvalues(a)?;
    let clusters = spectrum.group(options.group_tol);
    let n_mat = a - &identity;
    if clusters.iter().all(|c| c.is_unit) || is_nilpotent(&n_mat)? {
        return solve_unipotent(a, options);
    }

    let classification = if a.is_normal(options.structure_tol)?.0 {
        Classification::NormalCase2
    } else if a.is_involutory(options.structure_tol)? {
        Classification::NonnormalInvolutory
    } else {
        Classification::NonnormalGeneral
    };

    // A solution has det A = e^{z(tr A − n)} ≠ 0.
    if clusters.iter().any(|c| c.representative.norm() <= options.group_tol) {
        return Ok(SolutionSet::empty(classification, options.branches, None));
    }

    let anchor_idx = pick_anchor(&clusters).expect("a non-unit cluster exists");
    let anchor = clusters[anchor_idx].representative;
    let others: Vec<Complex64> = clusters
        .iter()
        .enumerate()
        .filter(|(i, c)| !c.is_unit && *i != anchor_idx)
        .map(|(_, c)| c.representative)
        .collect();

    let mut solutions = Vec::new();
    'candidates: for k in options.branches.iter() {
        let z = candidate_z_from_eigenvalue(anchor, k, options.group_tol)?;
        if z.norm() == 0.0 {
            continue;
        }
        let mut branches = vec![k];
        for &lambda_j in &others {
            let integ = branch_integrality(anchor, k, lambda_j, options.integrality_tol)?;
            if !integ.is_integer {
                continue 'candidates;
            }
            match i32::try_from(integ.rounded())
                .ok()
                .and_then(|r| BranchIndex::new(r).ok())
            {
                Some(b) => branches.push(b),
                None => continue 'candidates,
            }
        }
        let check = verify(a, z, options.tol)?;
        if check.verified {
            solutions.push(SolutionWitness {
                z,
                anchor_branch: k,
                per_eigenvalue_branches: branches,
                residual: check.residual,
            });
        }
    }

    if solutions.is_empty() {
        return Ok(SolutionSet::empty(classification, options.branches, Some(anchor)));
    }
    Ok(SolutionSet {
        kind: SolutionKind::Discrete,
        classification,
        solutions,
        branch_range: options.branches,
        anchor: Some(anchor),
    })
}

/// A normal matrix solving the equation for the given `z`.
///
/// Eigenvalues are `λ_i = −W_{k_i}(−z·e^{−z})/z` for each chosen branch plus
/// `unit_eigenvalue_count` ones, placed in a Haar-random eigenbasis.
pub fn construct_normal_solution(
    z: Complex64,
    branch_choices: &[BranchIndex],
    unit_eigenvalue_count: usize,
    seed: u64,
) -> Result<CMatrix> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("z = 0 admits only the identity matrix".into()));
    }
    let n = branch_choices.len() + unit_eigenvalue_count;
    if n == 0 {
        return Err(Error::Size("at least one eigenvalue is required".into()));
    }
    let mut values = Vec::with_capacity(n);
    for &k in branch_choices {
        values.push(lambda_from_z(z, k)?);
    }
    values.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), unit_eigenvalue_count));
    let a = assemble_normal(&values, seed)?;
    let check = verify(&a, z, DEFAULT_VERIFY_TOL)?;
    if !check.verified {
        return Err(Error::Postcondition(format!(
            "constructed matrix has residual {:e}",
            check.residual
        )));
    }
    Ok(a)
}

/// Constructs a solution for `z` (with one unit eigenvalue), solves it back and
/// reports whether `z` is among the recovered solutions.
pub fn roundtrip_check(z: Complex64, branch_choices: &[BranchIndex], seed: u64, tol: f64) -> Result<bool> {
    roundtrip_check_with(z, branch_choices, seed, tol, &SolveOptions::default())
}

pub fn roundtrip_check_with(
    z: Complex64,
    branch_choices: &[BranchIndex],
    seed: u64,
    tol: f64,
    options: &SolveOptions,
) -> Result<bool> {
    let a = construct_normal_solution(z, branch_choices, 1, seed)?;
    Ok(solve_z(&a, options)?.contains(z, tol))
}
