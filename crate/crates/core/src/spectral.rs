//! Eigenvalues of small dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift QR
//! with a Wilkinson shift. No Schur vectors are accumulated; only the spectrum
//! is needed by the solver.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HouseholderQr};

/// Grouping tolerance used when none is given.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

const DEFLATION_TOL: f64 = 1e-14;
const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// All n eigenvalues, repeated according to multiplicity.
    pub eigenvalues: Vec<Complex64>,
    /// `‖AA* − A*A‖_F`.
    pub normal_defect: f64,
    /// Number of eigenvalues within [`DEFAULT_GROUP_TOL`] of 1.
    pub unit_eigenvalue_count: usize,
}

impl SpectrumReport {
    pub fn group(&self, tol: f64) -> Vec<EigenCluster> {
        group_eigenvalues(&self.eigenvalues, tol)
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }
}

/// A set of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    /// Mean of the members.
    pub representative: Complex64,
    pub multiplicity: usize,
    /// Representative lies within the grouping tolerance of 1.
    pub is_unit: bool,
}

pub fn eigenvalues(a: &CMatrix) -> Result<SpectrumReport> {
    let n = a.require_square("eigenvalues")?;
    let (_, normal_defect) = a.is_normal(0.0)?;
    let mut h = hessenberg(a);
    let values = if n == 1 {
        vec![h[(0, 0)]]
    } else {
        hessenberg_qr(&mut h)?
    };
    let unit_eigenvalue_count = values.iter().filter(|l| (*l - 1.0).norm() <= DEFAULT_GROUP_TOL).count();
    Ok(SpectrumReport {
        eigenvalues: values,
        normal_defect,
        unit_eigenvalue_count,
    })
}

/// Unitary similarity to upper Hessenberg form.
pub fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H <- P H
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            let f = dot * 2.0;
            for i in k + 1..n {
                let vi = v[i - k - 1];
                h[(i, j)] -= f * vi;
            }
        }
        // H <- H P
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
            let f = dot * 2.0;
            for j in k + 1..n {
                let vj = v[j - k - 1].conj();
                h[(i, j)] -= f * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Rotation `G = [[c, s], [−s̄, c]]` with `G·[a, b]ᵀ = [r, 0]ᵀ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        (1.0, Complex64::new(0.0, 0.0))
    } else if na == 0.0 {
        (0.0, b.conj() / nb)
    } else {
        let norm = na.hypot(nb);
        let alpha = a / na;
        (na / norm, alpha * b.conj() / norm)
    }
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let m = (a + d) * 0.5;
    let disc = (((a - d) * 0.5).powi(2) + b * c).sqrt();
    let (p, q) = (m + disc, m - disc);
    let det = a * d - b * c;
    // the larger root is computed directly, the smaller from the determinant
    if p.norm() >= q.norm() {
        if p.norm() == 0.0 {
            (p, q)
        } else {
            (p, det / p)
        }
    } else {
        (q, det / q)
    }
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let (a, b) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)]);
    let (c, d) = (h[(hi, hi - 1)], h[(hi, hi)]);
    let (l1, l2) = eig2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let max_iter = 100 * n;
    let mut total = 0usize;
    let mut stalled = 0usize;
    let window_norm = h.frobenius_norm();
    let mut hi = n as isize - 1;

    while hi >= 0 {
        let hiu = hi as usize;
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hiu;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = window_norm;
            }
            if sub <= DEFLATION_TOL * scale || sub <= f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hiu {
            eig[hiu] = h[(hiu, hiu)];
            hi -= 1;
            stalled = 0;
            continue;
        }
        if lo + 1 == hiu {
            let (l1, l2) = eig2x2(h[(lo, lo)], h[(lo, hiu)], h[(hiu, lo)], h[(hiu, hiu)]);
            eig[lo] = l1;
            eig[hiu] = l2;
            hi -= 2;
            stalled = 0;
            continue;
        }

        total += 1;
        stalled += 1;
        if total > max_iter {
            return Err(Error::EigenConvergence {
                iterations: total - 1,
                lo,
                hi: hiu,
            });
        }

        let mu = if stalled.is_multiple_of(EXCEPTIONAL_SHIFT_PERIOD) {
            h[(hiu, hiu)] + 0.75 * h[(hiu, hiu - 1)].norm()
        } else {
            wilkinson_shift(h, hiu)
        };

        for k in lo..=hiu {
            h[(k, k)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hiu - lo);
        for k in lo..hiu {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hiu {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hiu) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hiu {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Clusters eigenvalues whose pairwise distance chains stay within `tol`.
///
/// Unit clusters come first, the rest ordered by decreasing modulus, then real
/// part, then imaginary part.
pub fn group_eigenvalues(values: &[Complex64], tol: f64) -> Vec<EigenCluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut sums: Vec<(Complex64, usize)> = vec![(Complex64::new(0.0, 0.0), 0); n];
    for (i, &v) in values.iter().enumerate() {
        let r = find(&mut parent, i);
        sums[r].0 += v;
        sums[r].1 += 1;
    }
    let mut clusters: Vec<EigenCluster> = sums
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .map(|(s, m)| {
            let representative = s / m as f64;
            EigenCluster {
                representative,
                multiplicity: m,
                is_unit: (representative - 1.0).norm() <= tol,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.is_unit
            .cmp(&a.is_unit)
            .then(b.representative.norm().total_cmp(&a.representative.norm()))
            .then(b.representative.re.total_cmp(&a.representative.re))
            .then(b.representative.im.total_cmp(&a.representative.im))
    });
    clusters
}

/// Haar-distributed n×n unitary, deterministic in `seed`.
///
/// QR of a complex Gaussian matrix, with Q's columns rephased by the phases
/// of R's diagonal.
pub fn random_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Size("random_unitary requires n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    let g = CMatrix::from_vec(n, n, data)?;
    let qr = HouseholderQr::new(&g, false);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// `U·diag(λ)·U*` for a Haar-random `U` drawn from `seed`.
pub fn assemble_normal(eigenvalues: &[Complex64], seed: u64) -> Result<CMatrix> {
    let d = CMatrix::diag(eigenvalues)?;
    let u = random_unitary(eigenvalues.len(), seed)?;
    Ok(&(&u * &d) * &u.adjoint())
}

/// Largest distance between paired elements of two equal-size multisets,
/// pairing greedily by smallest distance first.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}
