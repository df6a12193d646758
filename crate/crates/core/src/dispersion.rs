//! Closed-form Bloch dispersion of the homogeneous walks, band scans,
//! the PT-breaking gain of `U₁`, and oracle checks tying the closed forms to
//! lattice spectra and to the elemental symmetry identities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::linalg::{frobenius2, multiset_distance, sigma0, sigma1, Mat2, C64, I};
use crate::spectrum::{eigendecompose, SOLVER_TOL};
use crate::walk::{
    bloch_matrix, coin2, compose_walk, gainloss2, shift2, timeframe_transform, CoinField, LatticeSpec,
    WalkKind,
};

/// Quasi-energies of both bands at one momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub k: f64,
    /// `cos ε` from the closed form.
    pub cos_eps: C64,
    /// `Re ε₊ ∈ [0, π]`.
    pub eps_plus: C64,
    pub eps_minus: C64,
}

impl BandPoint {
    fn from_cos(k: f64, cos_eps: C64) -> Self {
        let eps_plus = arccos(cos_eps);
        BandPoint { k, cos_eps, eps_plus, eps_minus: -eps_plus }
    }

    /// `e^{-iε₊}` and `e^{-iε₋}`.
    pub fn eigenvalues(&self) -> [C64; 2] {
        [(-I * self.eps_plus).exp(), (-I * self.eps_minus).exp()]
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eps_plus.im.abs().max(self.eps_minus.im.abs())
    }
}

/// Principal complex arccosine, exact on the real axis.
///
/// Real arguments in `[-1, 1]` give a real result with zero imaginary part;
/// real arguments outside take `Re ∈ {0, π}` and `Im ≤ 0`.
pub fn arccos(z: C64) -> C64 {
    if z.im == 0.0 {
        let x = z.re;
        if x.abs() <= 1.0 {
            return C64::new(x.acos(), 0.0);
        }
        if x > 1.0 {
            return C64::new(0.0, -x.acosh());
        }
        return C64::new(PI, -(-x).acosh());
    }
    z.acos()
}

/// Right-hand side of the `U₁` dispersion: `cos ε`.
pub fn cos_eps_u1(theta1: f64, theta2: f64, gamma: f64, k: f64) -> f64 {
    theta1.cos() * theta2.cos() * (2.0 * k).cos() - theta1.sin() * theta2.sin() * (2.0 * gamma).cosh()
}

/// Right-hand side of the `U₂` dispersion: `cos ε`.
pub fn cos_eps_u2(theta1: f64, theta2: f64, gamma: f64, k: f64) -> C64 {
    let cc = theta1.cos() * theta2.cos();
    C64::new(
        cc * (2.0 * gamma).cosh() * (2.0 * k).cos() - theta1.sin() * theta2.sin(),
        cc * (2.0 * gamma).sinh() * (2.0 * k).sin(),
    )
}

pub fn dispersion_u1(theta1: f64, theta2: f64, gamma: f64, k: f64) -> BandPoint {
    BandPoint::from_cos(k, C64::new(cos_eps_u1(theta1, theta2, gamma, k), 0.0))
}

pub fn dispersion_u2(theta1: f64, theta2: f64, gamma: f64, k: f64) -> BandPoint {
    BandPoint::from_cos(k, cos_eps_u2(theta1, theta2, gamma, k))
}

pub fn dispersion(kind: WalkKind, theta1: f64, theta2: f64, gamma: f64, k: f64) -> BandPoint {
    match kind {
        WalkKind::U1Pt => dispersion_u1(theta1, theta2, gamma, k),
        WalkKind::U2Trs => dispersion_u2(theta1, theta2, gamma, k),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandScan {
    pub kind: WalkKind,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub points: Vec<BandPoint>,
}

impl BandScan {
    pub fn max_abs_imag(&self) -> f64 {
        self.points.iter().map(BandPoint::max_abs_imag).fold(0.0, f64::max)
    }

    /// Fraction of grid points whose quasi-energy has `|Im ε| > threshold`.
    pub fn complex_fraction(&self, threshold: f64) -> f64 {
        let n = self.points.iter().filter(|p| p.max_abs_imag() > threshold).count();
        n as f64 / self.points.len() as f64
    }
}

/// Uniform grid `k_j = −π + 2π(j+1)/num_k` over `(−π, π]`.
pub fn momentum_grid(num_k: usize) -> Vec<f64> {
    (0..num_k).map(|j| -PI + 2.0 * PI * (j + 1) as f64 / num_k as f64).collect()
}

pub fn band_scan(kind: WalkKind, theta1: f64, theta2: f64, gamma: f64, num_k: usize) -> Result<BandScan> {
    if num_k < 2 {
        return Err(WalkError::InvalidParameter(format!("band scan needs at least 2 momenta, got {num_k}")));
    }
    let points = momentum_grid(num_k).into_iter().map(|k| dispersion(kind, theta1, theta2, gamma, k)).collect();
    Ok(BandScan { kind, theta1, theta2, gamma, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalGain {
    /// Smallest `γ ≥ 0` with `max_k |cos ε| = 1`.
    Transition { gamma_c: f64 },
    /// `sin θ₁ sin θ₂ = 0`: the gain drops out and the band stays real.
    NoTransition,
}

impl CriticalGain {
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            CriticalGain::Transition { gamma_c } => Some(gamma_c),
            CriticalGain::NoTransition => None,
        }
    }
}

/// `max_k |cos ε|` for `U₁`. The right-hand side is affine in `cos 2k`, so the
/// maximum sits at `cos 2k = ±1`.
pub fn max_abs_cos_eps_u1(theta1: f64, theta2: f64, gamma: f64) -> f64 {
    cos_eps_u1(theta1, theta2, gamma, 0.0).abs().max(cos_eps_u1(theta1, theta2, gamma, PI / 2.0).abs())
}

/// Bisection for the gain at which the `U₁` band first leaves the real axis.
pub fn critical_gain_u1(theta1: f64, theta2: f64, tol: f64) -> Result<CriticalGain> {
    if !(tol > 0.0) {
        return Err(WalkError::InvalidParameter(format!("bisection tolerance must be positive, got {tol}")));
    }
    if (theta1.sin() * theta2.sin()).abs() < 1e-15 {
        return Ok(CriticalGain::NoTransition);
    }
    let excess = |g: f64| max_abs_cos_eps_u1(theta1, theta2, g) - 1.0;
    if excess(0.0) >= 0.0 {
        return Ok(CriticalGain::Transition { gamma_c: 0.0 });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while excess(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Ok(CriticalGain::NoTransition);
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalGain::Transition { gamma_c: 0.5 * (lo + hi) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochLatticeCheck {
    pub num_sites: usize,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare the lattice spectrum of a homogeneous walk with
/// `{e^{-iε±(k_m)}}` at the quantized momenta.
pub fn verify_bloch_vs_lattice(
    kind: WalkKind,
    theta1: f64,
    theta2: f64,
    gamma: f64,
    num_sites: usize,
    tol: f64,
) -> Result<BlochLatticeCheck> {
    let lattice = LatticeSpec::new(num_sites)?;
    let field = CoinField::homogeneous(theta1, theta2, lattice);
    let spectrum = eigendecompose(&compose_walk(kind, &field, gamma, lattice)?, SOLVER_TOL)?;
    let oracle: Vec<C64> = lattice
        .momenta()
        .into_iter()
        .flat_map(|k| dispersion(kind, theta1, theta2, gamma, k).eigenvalues())
        .collect();
    let max_mismatch = multiset_distance(&oracle, &spectrum.eigenvalues);
    Ok(BlochLatticeCheck { num_sites, max_mismatch, tolerance: tol, passed: max_mismatch <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRow {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    /// `false` for identities that must fail away from `γ = 0`; those rows
    /// pass when the minimum residual over `γ ≠ 0` exceeds the tolerance.
    pub expected_to_hold: bool,
    pub min_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub tolerance: f64,
    pub rows: Vec<RelationRow>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn max_residual_of_holding_rows(&self) -> f64 {
        self.rows.iter().filter(|r| r.expected_to_hold).map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

/// 11 samples spanning `[lo, hi]` inclusive.
pub fn sample_grid(lo: f64, hi: f64) -> [f64; 11] {
    std::array::from_fn(|i| lo + (hi - lo) * i as f64 / 10.0)
}

/// `W conj?(M) W⁻¹` on coin space for a unitary `W`.
fn act2(w: &Mat2, conjugate: bool, m: &Mat2) -> Mat2 {
    let inner = if conjugate { m.map(|z| z.conj()) } else { *m };
    w * inner * w.adjoint()
}

struct RowBuilder {
    name: &'static str,
    expected_to_hold: bool,
    samples: usize,
    max: f64,
    min: f64,
}

impl RowBuilder {
    fn new(name: &'static str, expected_to_hold: bool) -> Self {
        RowBuilder { name, expected_to_hold, samples: 0, max: 0.0, min: f64::INFINITY }
    }

    fn record(&mut self, residual: f64) {
        self.samples += 1;
        self.max = self.max.max(residual);
        self.min = self.min.min(residual);
    }

    fn finish(self, tol: f64) -> RelationRow {
        let passed = if self.expected_to_hold { self.max <= tol } else { self.min > tol };
        RelationRow {
            name: self.name.to_string(),
            samples: self.samples,
            max_residual: self.max,
            expected_to_hold: self.expected_to_hold,
            min_residual: self.min,
            passed,
        }
    }
}

/// Elemental coin-space identities for `P̃ = σ₁`, `T̃ = σ₁K`, `P̃T̃ = σ₀K`,
/// each checked over the 11³ grid `θ, k ∈ [−π, π]`, `γ ∈ [−1, 1]`.
///
/// Gain/loss rows pair `γᵢ` with `γⱼ` as the walks do: `γⱼ = γᵢ` for `U₂`
/// and `γⱼ = −γᵢ` for `U₁`. The mismatched pairings are included as rows
/// that must break for `γ ≠ 0`.
pub fn verify_elemental_relations(tol: f64) -> RelationReport {
    let p = sigma1();
    let t = sigma1();
    let pt = sigma0();
    let angles = sample_grid(-PI, PI);
    let gammas = sample_grid(-1.0, 1.0);

    let mut rows = vec![
        RowBuilder::new("P C(θ) P⁻¹ = C(θ)", true),
        RowBuilder::new("P S(k) P⁻¹ = S(−k)", true),
        RowBuilder::new("P G(γ) P⁻¹ = G(+γ) at γ = 0", true),
        RowBuilder::new("T C(θ) T⁻¹ = C(−θ)", true),
        RowBuilder::new("T S(k) T⁻¹ = S(+k)", true),
        RowBuilder::new("T G(γᵢ) T⁻¹ = G(−γⱼ), γⱼ = γᵢ", true),
        RowBuilder::new("PT C(θ) PT⁻¹ = C(−θ)", true),
        RowBuilder::new("PT S(k) PT⁻¹ = S(−k)", true),
        RowBuilder::new("PT G(γᵢ) PT⁻¹ = G(−γⱼ), γⱼ = −γᵢ", true),
        RowBuilder::new("P G(γ) P⁻¹ = G(+γ), γ ≠ 0", false),
        RowBuilder::new("T G(γᵢ) T⁻¹ = G(−γⱼ), γⱼ = −γᵢ, γ ≠ 0", false),
        RowBuilder::new("PT G(γᵢ) PT⁻¹ = G(−γⱼ), γⱼ = γᵢ, γ ≠ 0", false),
    ];

    for &theta in &angles {
        for &k in &angles {
            for &gamma in &gammas {
                let c = coin2(theta);
                let s = shift2(k);
                let g = gainloss2(gamma);
                let r = |lhs: Mat2, rhs: Mat2| frobenius2(&(lhs - rhs));

                rows[0].record(r(act2(&p, false, &c), c));
                rows[1].record(r(act2(&p, false, &s), shift2(-k)));
                rows[3].record(r(act2(&t, true, &c), coin2(-theta)));
                rows[4].record(r(act2(&t, true, &s), shift2(k)));
                rows[5].record(r(act2(&t, true, &g), gainloss2(-gamma)));
                rows[6].record(r(act2(&pt, true, &c), coin2(-theta)));
                rows[7].record(r(act2(&pt, true, &s), shift2(-k)));
                rows[8].record(r(act2(&pt, true, &g), gainloss2(gamma)));
                if gamma == 0.0 {
                    rows[2].record(r(act2(&p, false, &g), g));
                } else {
                    rows[9].record(r(act2(&p, false, &g), g));
                    rows[10].record(r(act2(&t, true, &g), gainloss2(gamma)));
                    rows[11].record(r(act2(&pt, true, &g), gainloss2(-gamma)));
                }
            }
        }
    }
    RelationReport { tolerance: tol, rows: rows.into_iter().map(|b| b.finish(tol)).collect() }
}

/// Bloch-level relations of the full step in the symmetric time frame:
/// `(P̃T̃) Ũ₁'(k) (P̃T̃)⁻¹ = Ũ₁'(k)⁻¹`, `T̃ Ũ₂'(k) T̃⁻¹ = Ũ₂'(−k)⁻¹`, and at
/// `γ = 0` `P̃ Ũ'(k) P̃⁻¹ = Ũ'(−k)`. Residuals are relative to `‖Ũ'‖_F`.
pub fn verify_frame_relations(tol: f64) -> RelationReport {
    let angles = sample_grid(-PI, PI);
    let gammas = sample_grid(-1.0, 1.0);
    let framed =
        |kind, t1, t2, g, k| timeframe_transform(&bloch_matrix(kind, t1, t2, g, k), t1).matrix;
    let inv2 = |m: &Mat2| m.try_inverse().expect("unit-determinant Bloch block");
    let mut rows = vec![
        RowBuilder::new("PT U1'(k) PT⁻¹ = U1'(k)⁻¹", true),
        RowBuilder::new("T U2'(k) T⁻¹ = U2'(−k)⁻¹", true),
        RowBuilder::new("P U'(k) P⁻¹ = U'(−k) at γ = 0", true),
    ];
    for &t1 in &angles {
        for &t2 in &angles {
            for &k in &angles {
                for &g in &gammas {
                    let u1 = framed(WalkKind::U1Pt, t1, t2, g, k);
                    let u2 = framed(WalkKind::U2Trs, t1, t2, g, k);
                    let rel = |lhs: Mat2, rhs: Mat2, scale: &Mat2| frobenius2(&(lhs - rhs)) / frobenius2(scale);
                    rows[0].record(rel(act2(&sigma0(), true, &u1), inv2(&u1), &u1));
                    let u2m = framed(WalkKind::U2Trs, t1, t2, g, -k);
                    rows[1].record(rel(act2(&sigma1(), true, &u2), inv2(&u2m), &u2));
                    if g == 0.0 {
                        let u1m = framed(WalkKind::U1Pt, t1, t2, g, -k);
                        rows[2].record(rel(act2(&sigma1(), false, &u1), u1m, &u1));
                    }
                }
            }
        }
    }
    RelationReport { tolerance: tol, rows: rows.into_iter().map(|b| b.finish(tol)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_second_coin() {
        for th in [0.3, 1.0, 2.5] {
            let bp = dispersion_u1(th, 0.0, 0.7, 0.0);
            assert!((bp.eps_plus.re - th).abs() < 1e-12 && bp.eps_plus.im == 0.0);
            assert_eq!(bp.eps_minus, -bp.eps_plus);
        }
    }

    #[test]
    fn real_band_at_zero_momentum() {
        let bp = dispersion_u1(PI / 3.0, -PI / 12.0, 1.1f64.ln(), 0.0);
        assert!((bp.cos_eps.re - 0.711_191_386_385_164_4).abs() < 1e-12);
        assert!((bp.eps_plus.re - 0.779_604_845_704_267_4).abs() < 1e-10);
        assert_eq!(bp.eps_plus.im, 0.0);
    }

    #[test]
    fn complex_band_above_critical_gain() {
        let bp = dispersion_u1(PI / 3.0, -PI / 12.0, 2.2f64.ln(), 0.0);
        assert!((bp.cos_eps.re - 1.048_546_432_075_009_7).abs() < 1e-12);
        assert!(bp.eps_plus.im != 0.0);
    }

    #[test]
    fn u2_with_quarter_turn_first_coin_is_real() {
        let th2 = 0.4;
        for k in momentum_grid(16) {
            let bp = dispersion_u2(PI / 2.0, th2, 0.5, k);
            assert!((bp.cos_eps.re + th2.sin()).abs() < 1e-12);
            assert!(bp.cos_eps.im.abs() < 1e-16);
        }
    }

    #[test]
    fn u2_reduces_to_unitary_relation_at_zero_gain() {
        for k in momentum_grid(9) {
            let a = dispersion_u2(0.8, -0.3, 0.0, k).cos_eps;
            let b = 0.8f64.cos() * (-0.3f64).cos() * (2.0 * k).cos() - 0.8f64.sin() * (-0.3f64).sin();
            assert!((a.re - b).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn u2_point_at_quarter_momentum() {
        let bp = dispersion_u2(PI / 3.0, -PI / 12.0, 1.1f64.ln(), PI / 4.0);
        assert!((bp.cos_eps - C64::new(0.224_143_868_042_013_4, 0.092_621_110_739_825_83)).norm() < 1e-12);
        assert!(bp.eps_plus.im != 0.0);
    }

    #[test]
    fn grid_shape() {
        let s = band_scan(WalkKind::U1Pt, 0.1, 0.2, 0.0, 2).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0].k - 0.0).abs() < 1e-15 && (s.points[1].k - PI).abs() < 1e-15);
        assert!(band_scan(WalkKind::U1Pt, 0.1, 0.2, 0.0, 1).is_err());
        let g = momentum_grid(512);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(g[0] > -PI && g[511] == PI);
    }

    #[test]
    fn critical_gain_cases() {
        // Closed form: cosh 2γ_c = (1 − |cosθ₁cosθ₂|) / |sinθ₁sinθ₂|.
        let (t1, t2) = (PI / 3.0, -PI / 12.0);
        let closed = (((1.0 - (t1.cos() * t2.cos()).abs()) / (t1.sin() * t2.sin()).abs()).acosh() / 2.0).exp();
        let gc = critical_gain_u1(t1, t2, 1e-12).unwrap().gamma().unwrap();
        assert!((gc.exp() - closed).abs() < 1e-9);
        assert!((gc.exp() - 2.094_137_216_535_743_5).abs() < 1e-9);

        let gc = critical_gain_u1(PI / 4.0, PI / 4.0, 1e-12).unwrap().gamma().unwrap();
        assert!(gc < 1e-6);

        assert_eq!(critical_gain_u1(0.7, 0.0, 1e-12).unwrap(), CriticalGain::NoTransition);
    }

    #[test]
    fn elemental_relations_hold_exactly() {
        let rep = verify_elemental_relations(1e-14);
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.max_residual_of_holding_rows(), 0.0);
        assert!(rep.rows.iter().filter(|r| r.expected_to_hold).all(|r| r.samples > 0));
    }

    #[test]
    fn elemental_rows_at_specific_points() {
        let c = coin2(PI / 5.0);
        let lhs = sigma1() * c.map(|z| z.conj()) * sigma1();
        assert!(frobenius2(&(lhs - coin2(-PI / 5.0))) < 1e-15);
        let g = gainloss2(0.3);
        let lhs = sigma1() * g.map(|z| z.conj()) * sigma1();
        assert!(frobenius2(&(lhs - gainloss2(-0.3))) < 1e-15);
    }

    #[test]
    fn frame_relations_hold() {
        let rep = verify_frame_relations(1e-12);
        assert!(rep.passed(), "{rep:#?}");
    }

    #[test]
    fn arccos_branches() {
        assert_eq!(arccos(C64::new(2.0, 0.0)), C64::new(0.0, -(2.0f64).acosh()));
        assert_eq!(arccos(C64::new(-2.0, 0.0)), C64::new(PI, -(2.0f64).acosh()));
        let z = C64::new(0.3, -0.8);
        assert!((arccos(z).cos() - z).norm() < 1e-14);
    }
}
