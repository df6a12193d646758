//! Elemental operators and the two-step walk operators `U₁` (PT-symmetric)
//! and `U₂` (time-reversal symmetric) on a periodic ring.
//!
//! Basis ordering is `index = 2n + s` with site `n ∈ 0..N` and internal state
//! `s ∈ {0 = L, 1 = R}`. Every matrix in the crate follows this ordering.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::linalg::{cis, det2, CMatrix, Mat2, C64, I, ONE, ZERO};

/// Internal (coin) state of a walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chirality {
    L = 0,
    R = 1,
}

/// A periodic ring of `num_sites` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    num_sites: usize,
}

impl LatticeSpec {
    pub fn new(num_sites: usize) -> Result<Self> {
        if num_sites == 0 {
            return Err(WalkError::InvalidParameter("lattice needs at least one site".into()));
        }
        Ok(LatticeSpec { num_sites })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Dimension of the full state space, `2N`.
    pub fn dim(&self) -> usize {
        2 * self.num_sites
    }

    #[inline]
    pub fn index(&self, site: usize, s: Chirality) -> usize {
        2 * site + s as usize
    }

    /// `(site + offset) mod N` for a signed offset.
    #[inline]
    pub fn wrap(&self, site: usize, offset: isize) -> usize {
        let n = self.num_sites as isize;
        (site as isize + offset).rem_euclid(n) as usize
    }

    /// Site reflection through site 0: `n -> (-n) mod N`.
    #[inline]
    pub fn reflect(&self, site: usize) -> usize {
        (self.num_sites - site % self.num_sites) % self.num_sites
    }

    /// Quantized momenta `2πm/N`, folded into `(-π, π]`.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.num_sites as f64;
        (0..self.num_sites)
            .map(|m| {
                let k = 2.0 * PI * m as f64 / n;
                if k > PI {
                    k - 2.0 * PI
                } else {
                    k
                }
            })
            .collect()
    }
}

/// Per-site coin angles `θ₁(n)`, `θ₂(n)` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinField {
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
}

impl CoinField {
    pub fn new(theta1: Vec<f64>, theta2: Vec<f64>) -> Result<Self> {
        if theta1.len() != theta2.len() {
            return Err(WalkError::Dimension { expected: theta1.len(), actual: theta2.len() });
        }
        Ok(CoinField { theta1, theta2 })
    }

    pub fn homogeneous(theta1: f64, theta2: f64, lattice: LatticeSpec) -> Self {
        let n = lattice.num_sites();
        CoinField { theta1: vec![theta1; n], theta2: vec![theta2; n] }
    }

    pub fn len(&self) -> usize {
        self.theta1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta1.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        let flat = |v: &[f64]| v.windows(2).all(|w| w[0] == w[1]);
        flat(&self.theta1) && flat(&self.theta2)
    }

    pub fn angles(&self, which: CoinIndex) -> &[f64] {
        match which {
            CoinIndex::First => &self.theta1,
            CoinIndex::Second => &self.theta2,
        }
    }

    /// Whether `θᵢ(n) = θᵢ(-n mod N)` holds for both coins.
    pub fn is_reflection_symmetric(&self, lattice: LatticeSpec, tol: f64) -> bool {
        (0..lattice.num_sites()).all(|n| {
            let m = lattice.reflect(n);
            (self.theta1[n] - self.theta1[m]).abs() <= tol
                && (self.theta2[n] - self.theta2[m]).abs() <= tol
        })
    }

    /// Copy with `θᵢ(-n)` overwritten by `θᵢ(n)` for `n ≤ N/2`, so the result
    /// is reflection symmetric about site 0.
    pub fn symmetrized(&self, lattice: LatticeSpec) -> Self {
        let pick = |v: &[f64]| {
            (0..lattice.num_sites()).map(|n| v[n.min(lattice.reflect(n))]).collect::<Vec<_>>()
        };
        CoinField { theta1: pick(&self.theta1), theta2: pick(&self.theta2) }
    }

    fn check(&self, lattice: LatticeSpec) -> Result<()> {
        for v in [&self.theta1, &self.theta2] {
            if v.len() != lattice.num_sites() {
                return Err(WalkError::Dimension { expected: lattice.num_sites(), actual: v.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoinIndex {
    First,
    Second,
}

/// Gain/loss exponents of the first and second half step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainLossPair {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl GainLossPair {
    pub fn is_pt_configuration(&self) -> bool {
        self.gamma1 == -self.gamma2
    }

    pub fn is_time_reversal_configuration(&self) -> bool {
        self.gamma1 == self.gamma2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WalkKind {
    /// `U₁ = S G(+γ) C(θ₂) S G(−γ) C(θ₁)`.
    U1Pt,
    /// `U₂ = S G(+γ) C(θ₂) S G(+γ) C(θ₁)`.
    U2Trs,
}

impl WalkKind {
    pub fn gains(self, gamma: f64) -> GainLossPair {
        match self {
            WalkKind::U1Pt => GainLossPair { gamma1: -gamma, gamma2: gamma },
            WalkKind::U2Trs => GainLossPair { gamma1: gamma, gamma2: gamma },
        }
    }
}

/// Which time frame a walk operator is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// The step as composed, starting with `C(θ₁)`.
    Standard,
    /// `C(θ₁/2) U C(θ₁/2)⁻¹`, where the P, T and PT relations take their
    /// canonical form.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: WalkKind,
    pub field: CoinField,
    pub gains: GainLossPair,
    pub frame: Frame,
}

/// A dense `2N × 2N` operator on the ring.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    pub matrix: CMatrix,
    pub lattice: LatticeSpec,
    /// `None` for elemental factors.
    pub provenance: Option<Provenance>,
}

impl WalkOperator {
    fn elemental(matrix: CMatrix, lattice: LatticeSpec) -> Self {
        WalkOperator { matrix, lattice, provenance: None }
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// The same walk viewed in the symmetric time frame,
    /// `U' = C(θ₁/2) U C(θ₁/2)⁻¹`. Spectra agree; eigenvectors map by `C(θ₁/2)`.
    pub fn symmetric_frame(&self) -> Result<WalkOperator> {
        let prov = self.provenance.as_ref().ok_or_else(|| {
            WalkError::InvalidParameter("symmetric frame needs a composed walk".into())
        })?;
        if prov.frame == Frame::Symmetric {
            return Ok(self.clone());
        }
        let forward: Vec<Mat2> = prov.field.theta1.iter().map(|t| coin2(0.5 * t)).collect();
        let backward: Vec<Mat2> = prov.field.theta1.iter().map(|t| coin2(-0.5 * t)).collect();
        let mut matrix = self.matrix.clone();
        blocks_left(&forward, &mut matrix);
        blocks_right(&mut matrix, &backward);
        Ok(WalkOperator {
            matrix,
            lattice: self.lattice,
            provenance: Some(Provenance { frame: Frame::Symmetric, ..prov.clone() }),
        })
    }
}

/// 2×2 coin `e^{iθσ₁}`.
pub fn coin2(theta: f64) -> Mat2 {
    let c = C64::new(theta.cos(), 0.0);
    let s = I * theta.sin();
    Mat2::new(c, s, s, c)
}

/// 2×2 shift `e^{ikσ₃}`.
pub fn shift2(k: f64) -> Mat2 {
    Mat2::new(cis(k), ZERO, ZERO, cis(-k))
}

/// 2×2 gain/loss `e^{γσ₃}`.
pub fn gainloss2(gamma: f64) -> Mat2 {
    Mat2::new(C64::new(gamma.exp(), 0.0), ZERO, ZERO, C64::new((-gamma).exp(), 0.0))
}

fn coin_matrix(angles: &[f64], lattice: LatticeSpec) -> CMatrix {
    let mut m = CMatrix::zeros(lattice.dim(), lattice.dim());
    for (n, &theta) in angles.iter().enumerate() {
        let block = coin2(theta);
        for a in 0..2 {
            for b in 0..2 {
                m[(2 * n + a, 2 * n + b)] = block[(a, b)];
            }
        }
    }
    m
}

/// `M <- B M` for block-diagonal `B` with 2×2 blocks `b[n]`.
fn blocks_left(b: &[Mat2], m: &mut CMatrix) {
    for j in 0..m.ncols() {
        for (n, blk) in b.iter().enumerate() {
            let (x, y) = (m[(2 * n, j)], m[(2 * n + 1, j)]);
            m[(2 * n, j)] = blk[(0, 0)] * x + blk[(0, 1)] * y;
            m[(2 * n + 1, j)] = blk[(1, 0)] * x + blk[(1, 1)] * y;
        }
    }
}

/// `M <- M B` for block-diagonal `B`.
fn blocks_right(m: &mut CMatrix, b: &[Mat2]) {
    for i in 0..m.nrows() {
        for (n, blk) in b.iter().enumerate() {
            let (x, y) = (m[(i, 2 * n)], m[(i, 2 * n + 1)]);
            m[(i, 2 * n)] = x * blk[(0, 0)] + y * blk[(1, 0)];
            m[(i, 2 * n + 1)] = x * blk[(0, 1)] + y * blk[(1, 1)];
        }
    }
}

/// `S M`: row `(n, L)` moves to `(n-1, L)` and row `(n, R)` to `(n+1, R)`.
fn shift_left(m: &CMatrix, lattice: LatticeSpec) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for n in 0..lattice.num_sites() {
        let left = lattice.index(lattice.wrap(n, -1), Chirality::L);
        let right = lattice.index(lattice.wrap(n, 1), Chirality::R);
        out.row_mut(left).copy_from(&m.row(lattice.index(n, Chirality::L)));
        out.row_mut(right).copy_from(&m.row(lattice.index(n, Chirality::R)));
    }
    out
}

/// Block-diagonal coin operator `Σₙ |n⟩⟨n| ⊗ e^{iθᵢ(n)σ₁}`.
pub fn build_coin(field: &CoinField, which: CoinIndex, lattice: LatticeSpec) -> Result<WalkOperator> {
    field.check(lattice)?;
    Ok(WalkOperator::elemental(coin_matrix(field.angles(which), lattice), lattice))
}

/// Chirality-conditioned translation: `(n, L) -> (n-1, L)`, `(n, R) -> (n+1, R)`.
pub fn build_shift(lattice: LatticeSpec) -> WalkOperator {
    let mut m = CMatrix::zeros(lattice.dim(), lattice.dim());
    for n in 0..lattice.num_sites() {
        let left = lattice.wrap(n, -1);
        let right = lattice.wrap(n, 1);
        m[(lattice.index(left, Chirality::L), lattice.index(n, Chirality::L))] += ONE;
        m[(lattice.index(right, Chirality::R), lattice.index(n, Chirality::R))] += ONE;
    }
    WalkOperator::elemental(m, lattice)
}

/// `diag(e^γ, e^{-γ})` on every site.
pub fn build_gainloss(gamma: f64, lattice: LatticeSpec) -> Result<WalkOperator> {
    if !gamma.is_finite() {
        return Err(WalkError::InvalidParameter(format!("gain/loss exponent {gamma} is not finite")));
    }
    let up = C64::new(gamma.exp(), 0.0);
    let down = C64::new((-gamma).exp(), 0.0);
    let mut m = CMatrix::zeros(lattice.dim(), lattice.dim());
    for n in 0..lattice.num_sites() {
        m[(2 * n, 2 * n)] = up;
        m[(2 * n + 1, 2 * n + 1)] = down;
    }
    Ok(WalkOperator::elemental(m, lattice))
}

/// Compose `U₁` or `U₂`; the rightmost factor `C(θ₁)` acts first.
pub fn compose_walk(
    kind: WalkKind,
    field: &CoinField,
    gamma: f64,
    lattice: LatticeSpec,
) -> Result<WalkOperator> {
    field.check(lattice)?;
    let gains = kind.gains(gamma);
    if !gamma.is_finite() {
        return Err(WalkError::InvalidParameter(format!("gain/loss exponent {gamma} is not finite")));
    }
    let g1 = vec![gainloss2(gains.gamma1); lattice.num_sites()];
    let g2 = vec![gainloss2(gains.gamma2); lattice.num_sites()];
    let c2: Vec<Mat2> = field.theta2.iter().map(|&t| coin2(t)).collect();
    // Factors are site-local or permutations, so apply them as row operations.
    let mut matrix = coin_matrix(&field.theta1, lattice);
    blocks_left(&g1, &mut matrix);
    matrix = shift_left(&matrix, lattice);
    blocks_left(&c2, &mut matrix);
    blocks_left(&g2, &mut matrix);
    matrix = shift_left(&matrix, lattice);
    Ok(WalkOperator {
        matrix,
        lattice,
        provenance: Some(Provenance { kind, field: field.clone(), gains, frame: Frame::Standard }),
    })
}

/// 2×2 Bloch block `Ũ(k)` at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochMatrix {
    pub matrix: Mat2,
    pub momentum: f64,
}

impl BlochMatrix {
    pub fn trace(&self) -> C64 {
        self.matrix[(0, 0)] + self.matrix[(1, 1)]
    }

    pub fn determinant(&self) -> C64 {
        det2(&self.matrix)
    }

    pub fn eigenvalues(&self) -> [C64; 2] {
        crate::linalg::eigenvalues2(&self.matrix)
    }
}

/// `Ũ(k) = S̃(k) G̃(γ₂) C̃(θ₂) S̃(k) G̃(γ₁) C̃(θ₁)` for a homogeneous walk.
pub fn bloch_matrix(kind: WalkKind, theta1: f64, theta2: f64, gamma: f64, k: f64) -> BlochMatrix {
    let gains = kind.gains(gamma);
    let s = shift2(k);
    let matrix = s * gainloss2(gains.gamma2) * coin2(theta2) * s * gainloss2(gains.gamma1) * coin2(theta1);
    BlochMatrix { matrix, momentum: k }
}

/// Move a Bloch block into the symmetric time frame, `C̃(θ₁/2) Ũ C̃(-θ₁/2)`.
pub fn timeframe_transform(b: &BlochMatrix, theta1: f64) -> BlochMatrix {
    BlochMatrix {
        matrix: coin2(0.5 * theta1) * b.matrix * coin2(-0.5 * theta1),
        momentum: b.momentum,
    }
}
