//! Branch-indexed complex logarithm and the multi-branch Lambert W function.
//!
//! Branch conventions:
//!
//! * The principal logarithm has imaginary part in `(−π, π]`.
//! * `W_k` follows the usual partition of the w-plane by the curves
//!   `−η·cot η + iη`; `W_0` contains `[−1, ∞)`, `W_{−1}` contains `(−∞, −1)`.
//!   Cuts lie on the negative real axis (and on `(−1/e, 0)` for `k = ±1`), and a
//!   point exactly on a cut takes the limit from above.

use std::f64::consts::{E, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const HALLEY_MAX_ITER: usize = 100;

/// Integer selecting a logarithm / Lambert W branch, bounded by [`BranchIndex::MAX_ABS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchIndex(i32);

impl BranchIndex {
    pub const MAX_ABS: i32 = 64;
    pub const PRINCIPAL: BranchIndex = BranchIndex(0);

    pub fn new(k: i32) -> Result<Self> {
        if k.abs() > Self::MAX_ABS {
            return Err(Error::Domain(format!(
                "branch index {k} exceeds the bound {}",
                Self::MAX_ABS
            )));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn get(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for BranchIndex {
    type Error = Error;
    fn try_from(k: i32) -> Result<Self> {
        Self::new(k)
    }
}

impl fmt::Display for BranchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps a `-0.0` imaginary part to `+0.0` so that cut points take the limit from above.
#[inline]
fn from_above(w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        Complex64::new(w.re, 0.0)
    } else {
        w
    }
}

/// `Log(w) + 2πik`.
pub fn log_branch(w: Complex64, k: BranchIndex) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::Domain("logarithm of zero".into()));
    }
    let principal = from_above(w).ln();
    Ok(Complex64::new(principal.re, principal.im + TWO_PI * f64::from(k.0)))
}

/// The branch of the Lambert W function whose range contains `w`.
///
/// Boundary points are assigned per the limit-from-above rule: in the upper
/// half-plane a boundary curve belongs to the branch below it, in the lower
/// half-plane likewise, and the ray `(−∞, −1)` belongs to `W_{−1}`.
pub fn lambert_branch_of(w: Complex64) -> i32 {
    let (u, v) = (w.re, w.im);
    if v == 0.0 {
        return if u >= -1.0 { 0 } else { -1 };
    }
    let a = v.abs();
    let m = (a / PI).floor() as i64;
    let j = (m / 2) as i32;
    if m % 2 == 1 {
        return if v > 0.0 { j + 1 } else { -(j + 1) };
    }
    let curve = if a < 1e-8 { -1.0 } else { -a / a.tan() };
    if v > 0.0 {
        if u >= curve {
            j
        } else {
            j + 1
        }
    } else if u > curve {
        -j
    } else {
        -(j + 1)
    }
}

fn in_branch(w: Complex64, k: i32) -> bool {
    if lambert_branch_of(w) == k {
        return true;
    }
    // points numerically on a boundary curve
    let d = 1e-9 * w.norm().max(1.0);
    [
        Complex64::new(d, 0.0),
        Complex64::new(-d, 0.0),
        Complex64::new(0.0, d),
        Complex64::new(0.0, -d),
    ]
    .iter()
    .any(|&s| lambert_branch_of(w + s) == k)
}

fn initial_guesses(x: Complex64, k: i32) -> Vec<Complex64> {
    let mut guesses = Vec::with_capacity(4);
    let q = 2.0 * (E * x + 1.0);
    let near_branch_point = q.norm() < 0.6;
    let branch_sign = match k {
        0 => Some(1.0),
        -1 if x.im >= 0.0 => Some(-1.0),
        1 if x.im < 0.0 => Some(-1.0),
        _ => None,
    };
    let branch_point = branch_sign.map(|s| {
        let p = q.sqrt() * s;
        -1.0 + p - p * p / 3.0
    });
    if near_branch_point {
        guesses.extend(branch_point);
    }
    if k == 0 && x.norm() < 0.3 {
        guesses.push(x - x * x + 1.5 * x * x * x);
    }
    let l1 = from_above(x).ln() + Complex64::new(0.0, TWO_PI * f64::from(k));
    if l1.norm() > 0.0 {
        let asym = l1 - l1.ln();
        if asym.re.is_finite() && asym.im.is_finite() {
            guesses.push(asym);
        }
    }
    if k == 0 {
        let onep = 1.0 + x;
        if onep.norm() > 0.0 {
            guesses.push(onep.ln());
        }
    }
    if !near_branch_point {
        guesses.extend(branch_point);
    }
    guesses
}

/// Halley iteration for `w·e^w = x`. Returns the iterate and its residual.
fn halley(x: Complex64, mut w: Complex64) -> std::result::Result<(Complex64, f64), (Complex64, f64)> {
    let target = 1e-13 * x.norm().max(1.0);
    let mut last_res = f64::INFINITY;
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !(step.re.is_finite() && step.im.is_finite()) {
            let res = (w * w.exp() - x).norm();
            return if res <= target { Ok((w, res)) } else { Err((w, res)) };
        }
        w -= step;
        if step.norm() <= 1e-15 * w.norm().max(1.0) {
            let res = (w * w.exp() - x).norm();
            return if res <= target || res <= last_res {
                Ok((w, res))
            } else {
                Err((w, res))
            };
        }
        last_res = f.norm();
    }
    // Rounding noise can keep the step just above the threshold; a root at the
    // required residual is still a root.
    let res = (w * w.exp() - x).norm();
    if res <= target {
        Ok((w, res))
    } else {
        Err((w, res))
    }
}

/// `W_k(x)`, the solution of `w·e^w = x` on branch `k`.
pub fn lambert_w(x: Complex64, k: BranchIndex) -> Result<Complex64> {
    let k = k.get();
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::Domain("Lambert W of a non-finite argument".into()));
    }
    let x = from_above(x);
    if x.re == 0.0 && x.im == 0.0 {
        return if k == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Domain(format!("W_{k}(0) is unbounded")))
        };
    }
    if x.im == 0.0 && (x.re == -(-1.0f64).exp() || x.re == -1.0 / E) && (k == 0 || k == -1) {
        return Ok(Complex64::new(-1.0, 0.0));
    }

    let target = 1e-13 * x.norm().max(1.0);
    let mut last = (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY);
    for w0 in initial_guesses(x, k) {
        match halley(x, w0) {
            Ok((w, res)) if res <= target && in_branch(w, k) => return Ok(w),
            Ok((w, res)) | Err((w, res)) => {
                if res < last.1 || !last.1.is_finite() {
                    last = (w, res);
                }
            }
        }
    }
    Err(Error::Convergence {
        what: "Lambert W",
        iterations: HALLEY_MAX_ITER,
        last: last.0,
        residual: last.1,
    })
}

/// Eigenvalue generated by `z` on Lambert branch `k`: `λ = −W_k(−z·e^{−z}) / z`.
///
/// The result satisfies `e^{z(λ−1)} = λ`.
pub fn lambda_from_z(z: Complex64, k: BranchIndex) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("z = 0 admits only the identity matrix".into()));
    }
    let x = -z * (-z).exp();
    let w = lambert_w(x, k)?;
    let lambda = -w / z;
    let residual = ((z * (lambda - 1.0)).exp() - lambda).norm();
    if residual.is_nan() || residual > 1e-10 * lambda.norm().max(1.0) {
        return Err(Error::Convergence {
            what: "eigenvalue from z",
            iterations: HALLEY_MAX_ITER,
            last: lambda,
            residual,
        });
    }
    Ok(lambda)
}
