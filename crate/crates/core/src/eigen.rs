//! Dense complex eigensolver for general (non-normal) matrices.
//!
//! The matrix is reduced to upper Hessenberg form with Householder
//! reflectors, driven to complex Schur form `A = Z T Z†` by implicit
//! single-shift QR sweeps (Wilkinson shift, exceptional shifts every tenth
//! sweep), and eigenvectors are recovered from `T` by back-substitution.
//!
//! Storage is column-major `Vec<C64>`; the solver is comfortable up to a few
//! thousand rows and is tested to 2N = 512.

use crate::error::{Result, WalkError};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Sweeps allowed per unit of matrix dimension before giving up.
pub const SWEEPS_PER_ROW: usize = 60;

const EXCEPTIONAL_EVERY: usize = 10;

#[derive(Debug, Clone)]
struct Dense {
    n: usize,
    data: Vec<C64>,
}

impl Dense {
    fn from_matrix(m: &CMatrix) -> Self {
        Dense { n: m.nrows(), data: m.as_slice().to_vec() }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i + i * n] = ONE;
        }
        Dense { n, data }
    }

    #[inline(always)]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i + j * self.n]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i + j * self.n] = z;
    }

    fn into_matrix(self) -> CMatrix {
        CMatrix::from_vec(self.n, self.n, self.data)
    }
}

#[inline(always)]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Complex Schur decomposition `A = Z T Z†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
    pub sweeps: usize,
}

/// Unitary rotation `[[c, s], [-conj(s), c]]` that maps `(a, b)` to `(r, 0)`.
#[inline]
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO, a);
    }
    let na = a.norm();
    if na == 0.0 {
        return (0.0, b.conj() / nb, C64::new(nb, 0.0));
    }
    let r = na.hypot(nb);
    let phase = a / na;
    (na / r, phase * b.conj() / r, phase * r)
}

fn hessenberg(a: &mut Dense, q: &mut Dense) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let xnorm = ((k + 1)..n).map(|i| a.at(i, k).norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for i in (k + 1)..n {
            v[i] = a.at(i, k);
        }
        v[k + 1] -= alpha;
        let vnorm = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for item in v.iter_mut().take(n).skip(k + 1) {
            *item /= vnorm;
        }
        // A <- (I - 2vv†) A on rows k+1.., columns k..
        for j in k..n {
            let mut s = ZERO;
            for i in (k + 1)..n {
                s += v[i].conj() * a.at(i, j);
            }
            let s2 = s * 2.0;
            for i in (k + 1)..n {
                let val = a.at(i, j) - v[i] * s2;
                a.set(i, j, val);
            }
        }
        // A <- A (I - 2vv†) and Q <- Q (I - 2vv†) on columns k+1..
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut s = ZERO;
                for j in (k + 1)..n {
                    s += m.at(i, j) * v[j];
                }
                let s2 = s * 2.0;
                for j in (k + 1)..n {
                    let val = m.at(i, j) - s2 * v[j].conj();
                    m.set(i, j, val);
                }
            }
        }
        a.set(k + 1, k, alpha);
        for i in (k + 2)..n {
            a.set(i, k, ZERO);
        }
    }
}

fn wilkinson_shift(h: &Dense, hi: usize) -> C64 {
    let a = h.at(hi - 1, hi - 1);
    let b = h.at(hi - 1, hi);
    let c = h.at(hi, hi - 1);
    let d = h.at(hi, hi);
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Compute the complex Schur form of a square matrix.
pub fn schur(m: &CMatrix) -> Result<Schur> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(WalkError::Dimension { expected: n, actual: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(WalkError::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut h = Dense::from_matrix(m);
    let mut z = Dense::identity(n);
    hessenberg(&mut h, &mut z);

    let ulp = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / ulp;
    let max_sweeps = SWEEPS_PER_ROW * n.max(10);
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    let mut hi = n;
    while hi > 1 {
        let top = hi - 1;
        // Locate the start of the unreduced active block.
        let mut l = top;
        while l > 0 {
            let sub = cabs1(h.at(l, l - 1));
            if sub <= small {
                break;
            }
            let mut scale = cabs1(h.at(l - 1, l - 1)) + cabs1(h.at(l, l));
            if scale == 0.0 {
                scale = (l.saturating_sub(1)..=top)
                    .map(|i| cabs1(h.at(i, i)))
                    .sum::<f64>();
            }
            if sub <= ulp * scale {
                break;
            }
            l -= 1;
        }
        if l > 0 {
            h.set(l, l - 1, ZERO);
        }
        if l == top {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            let partial = (hi..n).map(|i| h.at(i, i)).collect();
            return Err(WalkError::NonConvergence {
                iterations: sweeps - 1,
                converged: n - hi,
                dim: n,
                partial,
            });
        }

        let shift = if since_deflation.is_multiple_of(EXCEPTIONAL_EVERY) {
            h.at(top, top) + 0.75 * h.at(top, top - 1).re.abs()
        } else {
            wilkinson_shift(&h, top)
        };

        let mut x = h.at(l, l) - shift;
        let mut y = h.at(l + 1, l);
        for k in l..top {
            if k > l {
                x = h.at(k, k - 1);
                y = h.at(k + 1, k - 1);
            }
            let (c, s, r) = givens(x, y);
            if k > l {
                h.set(k, k - 1, r);
                h.set(k + 1, k - 1, ZERO);
            }
            // Rows k, k+1 across the full width keep T globally triangular.
            for j in k..n {
                let a1 = h.at(k, j);
                let a2 = h.at(k + 1, j);
                h.set(k, j, a1 * c + s * a2);
                h.set(k + 1, j, -s.conj() * a1 + a2 * c);
            }
            let last_row = (k + 2).min(top);
            for i in 0..=last_row {
                let a1 = h.at(i, k);
                let a2 = h.at(i, k + 1);
                h.set(i, k, a1 * c + a2 * s.conj());
                h.set(i, k + 1, -a1 * s + a2 * c);
            }
            for i in 0..n {
                let a1 = z.at(i, k);
                let a2 = z.at(i, k + 1);
                z.set(i, k, a1 * c + a2 * s.conj());
                z.set(i, k + 1, -a1 * s + a2 * c);
            }
        }
    }

    // Clear rounding debris below the diagonal.
    for j in 0..n {
        for i in (j + 1)..n {
            h.set(i, j, ZERO);
        }
    }
    Ok(Schur { t: h.into_matrix(), z: z.into_matrix(), sweeps })
}

/// Eigenvalues and (unnormalised) right eigenvectors, as columns.
pub fn eig(m: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let Schur { t, z, .. } = schur(m)?;
    let n = t.nrows();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let tnorm = t.iter().map(|z| cabs1(*z)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * n as f64 / f64::EPSILON);
    let mut vectors = CMatrix::zeros(n, n);
    let mut x = vec![ZERO; n];
    for k in 0..n {
        let lambda = values[k];
        x[k] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in (i + 1)..=k {
                acc += t[(i, j)] * x[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if cabs1(denom) < smin {
                denom = C64::new(smin, 0.0);
            }
            x[i] = -acc / denom;
            let big = cabs1(x[i]);
            if big > 1e150 {
                for xj in x.iter_mut().take(k + 1).skip(i) {
                    *xj /= big;
                }
            }
        }
        for r in 0..n {
            let mut acc = ZERO;
            for (j, xj) in x.iter().enumerate().take(k + 1) {
                acc += z[(r, j)] * xj;
            }
            vectors[(r, k)] = acc;
        }
        for xj in x.iter_mut().take(k + 1) {
            *xj = ZERO;
        }
    }
    Ok((values, vectors))
}
