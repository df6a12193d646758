//! Eigendecomposition of walk operators, quasi-energies, unit-circle
//! classification, and operator- and eigenvector-level checks of
//! (anti-)unitary symmetries.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Result, WalkError};
use crate::linalg::{frobenius, inner, inverse, multiset_distance, vec_norm, CMatrix, CVector, C64};
use crate::symmetry::SymmetryAction;
use crate::walk::WalkOperator;

/// Residual bound factor: every eigenpair must satisfy
/// `‖Uv − λv‖ ≤ SOLVER_TOL · ‖U‖_F`.
pub const SOLVER_TOL: f64 = 1e-10;
/// Default absolute tolerance on `||λ| − 1|`.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;
/// Default clustering distance for near-degenerate eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Below this `|⟨v, Av⟩|` the phase δ is reported as undefined.
pub const ZERO_OVERLAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, largest component real positive.
    pub eigenvectors: CMatrix,
    pub residuals: Vec<f64>,
    pub operator_norm: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, j: usize) -> CVector {
        self.eigenvectors.column(j).into_owned()
    }

    pub fn eigenvalue_product(&self) -> C64 {
        self.eigenvalues.iter().product()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Complete spectrum of `u` with the residual contract enforced at `tol`.
pub fn eigendecompose(u: &WalkOperator, tol: f64) -> Result<Spectrum> {
    eigendecompose_matrix(&u.matrix, tol)
}

pub fn eigendecompose_matrix(m: &CMatrix, tol: f64) -> Result<Spectrum> {
    let (eigenvalues, raw) = eigen::eig(m)?;
    let n = eigenvalues.len();
    let operator_norm = frobenius(m);
    let bound = tol * operator_norm.max(f64::MIN_POSITIVE);
    let mut eigenvectors = CMatrix::zeros(n, n);
    let mut residuals = Vec::with_capacity(n);
    for (j, &lambda) in eigenvalues.iter().enumerate() {
        let mut v = raw.column(j).into_owned();
        normalize_phase(&mut v);
        let r = vec_norm(&(m * &v - &v * lambda));
        if !(r <= bound) {
            return Err(WalkError::ResidualContract { index: j, residual: r, bound });
        }
        residuals.push(r);
        eigenvectors.set_column(j, &v);
    }
    Ok(Spectrum { eigenvalues, eigenvectors, residuals, operator_norm })
}

/// Unit 2-norm, with the first largest-modulus component made real positive.
fn normalize_phase(v: &mut CVector) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mod {
            best_mod = m;
            best = i;
        }
    }
    let phase = v[best].conj() / (best_mod * norm);
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = C64::new(v[best].re, 0.0);
}

/// Quasi-energy `ε` with `λ = e^{-iε}` and `Re ε ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiEnergy {
    pub epsilon: C64,
}

impl QuasiEnergy {
    pub fn from_eigenvalue(lambda: C64) -> Option<Self> {
        let modulus = lambda.norm();
        if modulus == 0.0 || !modulus.is_finite() {
            return None;
        }
        // ε = i·ln λ = −arg λ + i·ln|λ|; arg ∈ (−π, π] puts −arg in [−π, π).
        let mut re = -lambda.arg();
        if re <= -PI {
            re += 2.0 * PI;
        }
        Some(QuasiEnergy { epsilon: C64::new(re, modulus.ln()) })
    }

    pub fn eigenvalue(&self) -> C64 {
        (-crate::linalg::I * self.epsilon).exp()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.epsilon.im.abs() <= tol
    }
}

pub fn quasi_energies(s: &Spectrum) -> Result<Vec<QuasiEnergy>> {
    quasi_energies_of(&s.eigenvalues)
}

pub fn quasi_energies_of(eigenvalues: &[C64]) -> Result<Vec<QuasiEnergy>> {
    eigenvalues
        .iter()
        .enumerate()
        .map(|(index, &l)| QuasiEnergy::from_eigenvalue(l).ok_or(WalkError::ZeroEigenvalue { index }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealityReport {
    pub on_circle_flags: Vec<bool>,
    pub max_modulus_deviation: f64,
    pub num_complex: usize,
    pub complex_fraction: f64,
    pub tolerance_used: f64,
}

pub fn classify_reality(s: &Spectrum, tol: f64) -> Result<RealityReport> {
    classify_eigenvalues(&s.eigenvalues, tol)
}

pub fn classify_eigenvalues(eigenvalues: &[C64], tol: f64) -> Result<RealityReport> {
    if !(tol > 0.0) {
        return Err(WalkError::InvalidParameter(format!("unit-circle tolerance must be positive, got {tol}")));
    }
    let deviations: Vec<f64> = eigenvalues.iter().map(|l| (l.norm() - 1.0).abs()).collect();
    let on_circle_flags: Vec<bool> = deviations.iter().map(|&d| d <= tol).collect();
    let num_complex = on_circle_flags.iter().filter(|f| !**f).count();
    let complex_fraction =
        if eigenvalues.is_empty() { 0.0 } else { num_complex as f64 / eigenvalues.len() as f64 };
    Ok(RealityReport {
        on_circle_flags,
        max_modulus_deviation: deviations.iter().copied().fold(0.0, f64::max),
        num_complex,
        complex_fraction,
        tolerance_used: tol,
    })
}

/// `‖A U A⁻¹ − target‖_F / ‖U‖_F`, with target `U⁻¹` for anti-unitary `A`
/// and `U` for unitary `A`.
pub fn check_antiunitary_relation(u: &WalkOperator, a: &SymmetryAction) -> Result<f64> {
    relation_residual(&u.matrix, a)
}

pub fn relation_residual(m: &CMatrix, a: &SymmetryAction) -> Result<f64> {
    let transformed = a.apply_matrix(m)?;
    let diff = if a.conjugate { transformed - inverse(m)? } else { transformed - m };
    Ok(frobenius(&diff) / frobenius(m))
}

/// Largest distance between the spectrum and its image under `λ -> 1/λ*`.
pub fn spectral_pairing_defect(eigenvalues: &[C64]) -> f64 {
    let mirrored: Vec<C64> = eigenvalues.iter().map(|l| l.conj().inv()).collect();
    multiset_distance(eigenvalues, &mirrored)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateGroup {
    pub indices: Vec<usize>,
    /// Sine of the largest principal angle between `span{v}` and `A·span{v}`.
    pub subspace_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorSymmetryReport {
    /// `δ_j = arg⟨v_j, A v_j⟩`; `None` inside degenerate groups or when the
    /// overlap vanishes.
    pub deltas: Vec<Option<f64>>,
    /// `‖A v_j − e^{iδ_j} v_j‖`; `None` where `δ_j` is `None`.
    pub residuals: Vec<Option<f64>>,
    pub degenerate_groups: Vec<DegenerateGroup>,
    /// Indices with `⟨v_j, A v_j⟩ = 0`.
    pub undefined_phase: Vec<usize>,
}

impl EigenvectorSymmetryReport {
    /// Worst per-vector or per-group residual; infinite if any phase is undefined.
    pub fn max_residual(&self) -> f64 {
        if !self.undefined_phase.is_empty() {
            return f64::INFINITY;
        }
        let singles = self.residuals.iter().flatten().copied();
        let groups = self.degenerate_groups.iter().map(|g| g.subspace_residual);
        singles.chain(groups).fold(0.0, f64::max)
    }

    /// Residual for eigenvector `j`: its own, or its group's.
    pub fn residual_of(&self, j: usize) -> f64 {
        if let Some(r) = self.residuals[j] {
            return r;
        }
        self.degenerate_groups
            .iter()
            .find(|g| g.indices.contains(&j))
            .map_or(f64::INFINITY, |g| g.subspace_residual)
    }
}

fn cluster(eigenvalues: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = eigenvalues.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Orthonormal basis of the column span, dropping directions below
/// `1e-8 · σ_max`.
fn orthonormal_basis(v: CMatrix) -> CMatrix {
    let svd = v.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-8 * smax).collect();
    CMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Check `A v_j = e^{iδ_j} v_j` for each eigenvector of `s`.
pub fn check_eigenvector_symmetry(
    s: &Spectrum,
    a: &SymmetryAction,
    degeneracy_tol: f64,
) -> Result<EigenvectorSymmetryReport> {
    let n = s.len();
    let mut deltas = vec![None; n];
    let mut residuals = vec![None; n];
    let mut degenerate_groups = Vec::new();
    let mut undefined_phase = Vec::new();

    for group in cluster(&s.eigenvalues, degeneracy_tol) {
        if let [j] = group[..] {
            let v = s.eigenvector(j);
            let av = a.apply_vector(&v)?;
            let overlap = inner(&v, &av);
            if overlap.norm() <= ZERO_OVERLAP {
                undefined_phase.push(j);
                continue;
            }
            let delta = overlap.arg();
            let r = vec_norm(&(av - v * C64::from_polar(1.0, delta)));
            deltas[j] = Some(delta);
            residuals[j] = Some(r);
        } else {
            let cols = CMatrix::from_fn(n, group.len(), |r, c| s.eigenvectors[(r, group[c])]);
            let q = orthonormal_basis(cols);
            let mut aq = CMatrix::zeros(n, q.ncols());
            for c in 0..q.ncols() {
                aq.set_column(c, &a.apply_vector(&q.column(c).into_owned())?);
            }
            let outside = &aq - &q * (q.adjoint() * &aq);
            let subspace_residual =
                outside.svd(false, false).singular_values.iter().copied().fold(0.0, f64::max);
            degenerate_groups.push(DegenerateGroup { indices: group, subspace_residual });
        }
    }
    Ok(EigenvectorSymmetryReport { deltas, residuals, degenerate_groups, undefined_phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::walk::{build_gainloss, LatticeSpec};

    #[test]
    fn identity_spectrum() {
        let s = eigendecompose_matrix(&CMatrix::identity(6, 6), SOLVER_TOL).unwrap();
        assert!(s.eigenvalues.iter().all(|l| (l - ONE).norm() < 1e-15));
        assert!(s.residuals.iter().all(|r| *r < 1e-15));
    }

    #[test]
    fn gainloss_spectrum_is_diagonal() {
        let l = LatticeSpec::new(2).unwrap();
        let g = build_gainloss(2f64.ln(), l).unwrap();
        let s = eigendecompose(&g, SOLVER_TOL).unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip([0.5, 0.5, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = classify_reality(&s, UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(r.num_complex, 4);
        assert_eq!(r.complex_fraction, 1.0);
    }

    #[test]
    fn eigenvector_phase_convention() {
        let m = CMatrix::from_fn(4, 4, |i, j| C64::new((i + j) as f64, (i as f64 - j as f64) * 0.3));
        let s = eigendecompose_matrix(&m, SOLVER_TOL).unwrap();
        for j in 0..4 {
            let v = s.eigenvector(j);
            assert!((vec_norm(&v) - 1.0).abs() < 1e-14);
            let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lead = v.iter().find(|z| z.norm() == big).unwrap();
            assert!(lead.im == 0.0 && lead.re > 0.0);
        }
    }

    #[test]
    fn quasi_energy_examples() {
        let q = |l: C64| QuasiEnergy::from_eigenvalue(l).unwrap().epsilon;
        assert_eq!(q(ONE), ZERO);
        let e = q(C64::new(0.0, -1.0));
        assert!((e.re - PI / 2.0).abs() < 1e-15 && e.im.abs() < 1e-15);
        let e = q(C64::new(2.0, 0.0));
        assert!(e.re.abs() < 1e-15 && (e.im - 2f64.ln()).abs() < 1e-15);
        let e = q(-ONE);
        assert_eq!(e.re, PI);
        assert!(matches!(quasi_energies_of(&[ONE, ZERO]), Err(WalkError::ZeroEigenvalue { index: 1 })));
    }

    #[test]
    fn reality_on_unit_circle() {
        let eig: Vec<C64> = (0..8).map(|j| C64::from_polar(1.0, j as f64)).collect();
        let r = classify_eigenvalues(&eig, UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(r.complex_fraction, 0.0);
        assert!(classify_eigenvalues(&eig, 0.0).is_err());
    }

    #[test]
    fn reality_of_two_real_eigenvalues() {
        let r = classify_eigenvalues(&[C64::new(2.0, 0.0), C64::new(0.5, 0.0)], 1e-8).unwrap();
        assert_eq!(r.complex_fraction, 1.0);
        assert_eq!(r.max_modulus_deviation, 1.0);
    }

    #[test]
    fn conjugation_on_real_symmetric_unitary() {
        // A real orthogonal symmetric matrix has real eigenvectors, so plain
        // conjugation fixes each of them with δ = 0.
        let l = LatticeSpec::new(2).unwrap();
        let h = CMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.6, 0.8, 0.0, 0.0, 0.8, -0.6].map(|x| C64::new(x, 0.0)),
        );
        let s = eigendecompose_matrix(&h, SOLVER_TOL).unwrap();
        let rep = check_eigenvector_symmetry(&s, &SymmetryAction::conjugation(l), DEGENERACY_TOL).unwrap();
        // ±1 each appear twice: the checks fall back to subspaces.
        assert!(rep.max_residual() < 1e-12, "{rep:?}");
    }

    #[test]
    fn clustering_groups_close_values() {
        let ev = [ONE, ONE + C64::new(1e-9, 0.0), -ONE, C64::new(0.0, 1.0)];
        let mut groups = cluster(&ev, 1e-6);
        groups.sort();
        assert_eq!(groups, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn pairing_defect_detects_unpaired() {
        let paired = [C64::new(2.0, 0.0), C64::new(0.5, 0.0), C64::from_polar(1.0, 0.4)];
        assert!(spectral_pairing_defect(&paired) < 1e-15);
        assert!(spectral_pairing_defect(&[C64::new(2.0, 0.0), ONE]) > 0.4);
    }
}
