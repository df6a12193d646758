//! Dense complex matrix helpers shared by the walk and spectral modules.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Result, WalkError};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type Mat2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{iφ}` built from `cos`/`sin` directly so that `conj(cis(φ)) == cis(-φ)` bit for bit.
#[inline]
pub fn cis(phi: f64) -> C64 {
    C64::new(phi.cos(), phi.sin())
}

pub fn sigma0() -> Mat2 {
    Mat2::identity()
}

pub fn sigma1() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma3() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius2(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(WalkError::Dimension { expected: n, actual: m.ncols() });
    }
    let inv = m.clone().lu().try_inverse().ok_or(WalkError::Singular)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(WalkError::Singular);
    }
    Ok(inv)
}

/// Determinant of a 2×2 complex matrix.
pub fn det2(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Both eigenvalues of a 2×2 matrix from its trace and determinant.
pub fn eigenvalues2(m: &Mat2) -> [C64; 2] {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let disc = (half_tr * half_tr - det2(m)).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// Greedy nearest-neighbour matching between two equal-length multisets of
/// complex numbers. Returns the largest matched distance, or `f64::INFINITY`
/// if the lengths differ.
///
/// The reference set is visited in order of argument; each element takes the
/// closest unused partner.
pub fn multiset_distance(reference: &[C64], candidate: &[C64]) -> f64 {
    if reference.len() != candidate.len() {
        return f64::INFINITY;
    }
    let mut order: Vec<usize> = (0..reference.len()).collect();
    order.sort_by(|&a, &b| reference[a].arg().total_cmp(&reference[b].arg()));
    let mut used = vec![false; candidate.len()];
    let mut worst = 0.0_f64;
    for i in order {
        let target = reference[i];
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, c) in candidate.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (c - target).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            used[j] = true;
            worst = worst.max(best_d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis_conjugate_is_exact_negation() {
        for k in [-3.0, -0.7, 0.0, 0.3, 1.9, std::f64::consts::PI] {
            assert_eq!(cis(k).conj(), cis(-k));
        }
    }

    #[test]
    fn eigenvalues2_of_diagonal() {
        let m = Mat2::new(C64::new(2.0, 0.0), ZERO, ZERO, C64::new(0.5, 0.0));
        let mut ev = eigenvalues2(&m).map(|z| z.re);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn multiset_distance_ignores_order() {
        let a = [ONE, I, -ONE];
        let b = [-ONE, ONE, I * 1.0001];
        assert!((multiset_distance(&a, &b) - 1e-4).abs() < 1e-12);
        assert!(multiset_distance(&a, &b[..2]).is_infinite());
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = CMatrix::zeros(3, 3);
        assert!(matches!(inverse(&m), Err(WalkError::Singular)));
    }
}
