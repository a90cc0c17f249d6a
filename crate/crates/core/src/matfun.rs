//! Matrix exponential and the expansion of `exp(zA)` in powers of `A`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HouseholderQr};

/// Relative rank threshold for [`power_basis_degree`] when none is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Tolerance used to accept a matrix as involutory in the closed-form exponential.
pub const INVOLUTION_TOL: f64 = 1e-10;
/// Condition estimate above which an expansion is flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

const THETA_13: f64 = 5.37;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn lincomb(terms: &[(f64, &CMatrix)], n: usize, identity_coeff: f64) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = Complex64::new(identity_coeff, 0.0);
    }
    for &(c, m) in terms {
        out = &out + &(m * c);
    }
    out
}

/// Matrix exponential by scaling and squaring with the degree-13 diagonal Padé approximant.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.require_square("expm")?;
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(Error::Overflow("matrix norm is not finite".into()));
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::Overflow(format!("1-norm {norm:e} is too large")));
    }
    let a = a * 2f64.powi(-s);
    let b = &PADE_13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &(&a6 * &lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n, 0.0))
        + &lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], n, b[1]);
    let u = &a * &u_inner;
    let v = &(&a6 * &lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n, 0.0))
        + &lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], n, b[0]);

    let mut x = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..s {
        x = &x * &x;
    }
    if !x.all_finite() {
        return Err(Error::Overflow("matrix exponential overflowed".into()));
    }
    Ok(x)
}

/// `exp(zB) = cosh(z)·I + sinh(z)·B` for involutory `B`.
pub fn expm_involutory(b: &CMatrix, z: Complex64) -> Result<CMatrix> {
    let n = b.require_square("expm_involutory")?;
    if !b.is_involutory(INVOLUTION_TOL)? {
        return Err(Error::Precondition(format!(
            "matrix is not involutory (‖B² − I‖_F = {:e})",
            b.involution_defect()?
        )));
    }
    let out = b.scale(z.sinh()).shift_diag(z.cosh())?;
    debug_assert_eq!(out.nrows(), n);
    if !out.all_finite() {
        return Err(Error::Overflow("cosh/sinh overflowed".into()));
    }
    Ok(out)
}

/// `e^{zA} ≈ Σ_{j=0}^{r} c_j A^j` over the largest independent set `{I, A, …, A^r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBasisExpansion {
    pub degree_r: usize,
    pub coefficients: Vec<Complex64>,
    /// `‖Σ c_j A^j − e^{zA}‖_F`.
    pub residual: f64,
    /// Ratio of extreme diagonal magnitudes of R in the column-normalised basis.
    pub condition_estimate: f64,
    /// Set when `condition_estimate` exceeds [`ILL_CONDITIONED`].
    pub ill_conditioned: bool,
    /// `c` when `A = c·I` (`r = 0`).
    pub scalar: Option<Complex64>,
}

/// Powers `I, A, …`, their vectorised unit-norm columns, and the original norms.
type PowerColumns = (Vec<CMatrix>, Vec<Vec<Complex64>>, Vec<f64>);

fn normalized_power_columns(a: &CMatrix, count: usize) -> Result<PowerColumns> {
    let n = a.require_square("power basis")?;
    let mut powers = Vec::with_capacity(count);
    let mut p = CMatrix::identity(n)?;
    for j in 0..count {
        if j > 0 {
            p = &p * a;
        }
        powers.push(p.clone());
    }
    let mut cols = Vec::with_capacity(count);
    let mut norms = Vec::with_capacity(count);
    for p in &powers {
        let v = p.vec();
        let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let scale = if nrm > 0.0 { 1.0 / nrm } else { 1.0 };
        cols.push(v.into_iter().map(|c| c * scale).collect());
        norms.push(nrm);
    }
    Ok((powers, cols, norms))
}

/// Largest `r` such that `{I, A, …, A^r}` is numerically independent.
///
/// Rank comes from a column-pivoted QR of the vectorised (and column-normalised)
/// powers `I, A, …, A^n`, counting diagonal entries of R above `tol` times the largest.
pub fn power_basis_degree(a: &CMatrix, tol: f64) -> Result<usize> {
    let n = a.require_square("power_basis_degree")?;
    let (_, cols, _) = normalized_power_columns(a, n + 1)?;
    let basis = CMatrix::from_columns(n * n, &cols);
    let qr = HouseholderQr::new(&basis, true);
    let diag = qr.r_diag();
    let largest = diag.first().map_or(0.0, |d| d.norm());
    let rank = diag.iter().filter(|d| d.norm() > tol * largest).count().max(1);
    Ok((rank - 1).min(n - 1))
}

/// Least-squares coefficients of `expm(zA)` in the power basis of `A`.
pub fn expand_exp_in_powers(a: &CMatrix, z: Complex64) -> Result<PowerBasisExpansion> {
    let n = a.require_square("expand_exp_in_powers")?;
    let r = power_basis_degree(a, DEFAULT_RANK_TOL)?;
    let (powers, cols, norms) = normalized_power_columns(a, r + 1)?;
    let target = expm(&a.scale(z))?;
    let basis = CMatrix::from_columns(n * n, &cols);
    let qr = HouseholderQr::new(&basis, false);
    let y = qr.least_squares(&target.vec(), r + 1);
    let coefficients: Vec<Complex64> = y
        .iter()
        .zip(&norms)
        .map(|(&c, &nrm)| if nrm > 0.0 { c / nrm } else { c })
        .collect();

    let mut approx = CMatrix::zeros(n, n);
    for (c, p) in coefficients.iter().zip(&powers) {
        approx = &approx + &p.scale(*c);
    }
    let residual = (&approx - &target).frobenius_norm();

    let diag: Vec<f64> = qr.r_diag().iter().map(|d| d.norm()).collect();
    let (mx, mn) = diag
        .iter()
        .fold((0.0f64, f64::INFINITY), |(mx, mn), &d| (mx.max(d), mn.min(d)));
    let condition_estimate = if mn > 0.0 { mx / mn } else { f64::INFINITY };

    Ok(PowerBasisExpansion {
        degree_r: r,
        coefficients,
        residual,
        condition_estimate,
        ill_conditioned: condition_estimate > ILL_CONDITIONED,
        scalar: (r == 0).then(|| a[(0, 0)]),
    })
}

/// Whether the coefficients describe a solution: `c_1 = e^z`, every other `c_j = 0`.
///
/// Both conditions are measured relative to `|e^z|`, the factor separating
/// `e^{zA} = e^z·A` from `e^{z(A−I)} = A`. With `r = 0` there is no `c_1`;
/// `A = c·I` is then a solution iff `c_0 = e^z·c`, which holds for every `z`
/// when `A = I`.
pub fn solution_coefficient_check(expansion: &PowerBasisExpansion, z: Complex64, tol: f64) -> bool {
    let ez = z.exp();
    let scale = ez.norm();
    if let Some(c) = expansion.scalar {
        return (expansion.coefficients[0] - ez * c).norm() <= tol * scale * c.norm().max(1.0);
    }
    expansion.coefficients.iter().enumerate().all(|(j, &c)| {
        if j == 1 {
            (c - ez).norm() <= tol * scale
        } else {
            c.norm() <= tol * scale
        }
    })
}
