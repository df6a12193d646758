//! Box-distributed coin disorder, the four disorder cases, seeded ensembles
//! and two-parameter phase maps.
//!
//! Seeding: realization `r` of master seed `s` uses
//! `seed_r = splitmix64(s ^ splitmix64(r))`; coin `i ∈ {0, 1}` then draws from
//! `ChaCha8Rng::seed_from_u64(seed_r)` on stream `i`. Every work item derives
//! its own generator, so serial and parallel runs agree bit for bit.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::linalg::C64;
use crate::spectrum::{
    check_eigenvector_symmetry, classify_reality, eigendecompose, EigenvectorSymmetryReport, RealityReport,
    DEGENERACY_TOL, SOLVER_TOL, UNIT_CIRCLE_TOL,
};
use crate::symmetry::{build_symmetry, SymmetryKind};
use crate::walk::{compose_walk, CoinField, LatticeSpec, WalkKind, WalkOperator};

pub const DEFAULT_HALF_WIDTH: f64 = PI / 4.0;
pub const DEFAULT_SITES: usize = 120;
pub const DEFAULT_REALIZATIONS: usize = 200;

/// Which operator carries the disorder and which coins are random.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisorderCase {
    /// `U₁`, random `θ₁`, constant `θ₂`.
    A,
    /// `U₁`, both coins random.
    B,
    /// `U₂`, random `θ₁`, constant `θ₂`.
    C,
    /// `U₂`, both coins random.
    D,
}

impl DisorderCase {
    pub const ALL: [DisorderCase; 4] = [DisorderCase::A, DisorderCase::B, DisorderCase::C, DisorderCase::D];

    pub fn walk_kind(self) -> WalkKind {
        match self {
            DisorderCase::A | DisorderCase::B => WalkKind::U1Pt,
            DisorderCase::C | DisorderCase::D => WalkKind::U2Trs,
        }
    }

    pub fn theta2_random(self) -> bool {
        matches!(self, DisorderCase::B | DisorderCase::D)
    }

    pub fn letter(self) -> char {
        match self {
            DisorderCase::A => 'A',
            DisorderCase::B => 'B',
            DisorderCase::C => 'C',
            DisorderCase::D => 'D',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unit_circle: f64,
    pub degeneracy: f64,
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unit_circle: UNIT_CIRCLE_TOL, degeneracy: DEGENERACY_TOL, solver: SOLVER_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub case: DisorderCase,
    pub mean_theta1: f64,
    /// Mean `θ̄₂` when the second coin is random, otherwise the constant `θ₂`.
    pub theta2: f64,
    pub half_width: f64,
    /// `e^γ`.
    pub gamma_exp: f64,
    pub lattice: LatticeSpec,
    pub master_seed: u64,
    pub tolerances: Tolerances,
}

impl DisorderSpec {
    pub fn new(case: DisorderCase, mean_theta1: f64, theta2: f64, gamma_exp: f64, num_sites: usize, master_seed: u64) -> Result<Self> {
        let spec = DisorderSpec {
            case,
            mean_theta1,
            theta2,
            half_width: DEFAULT_HALF_WIDTH,
            gamma_exp,
            lattice: LatticeSpec::new(num_sites)?,
            master_seed,
            tolerances: Tolerances::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_exp.ln()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 0.0) || !self.half_width.is_finite() {
            return Err(WalkError::InvalidParameter(format!("half width must be finite and ≥ 0, got {}", self.half_width)));
        }
        if !(self.gamma_exp > 0.0) || !self.gamma_exp.is_finite() {
            return Err(WalkError::InvalidParameter(format!("e^γ must be positive and finite, got {}", self.gamma_exp)));
        }
        if !self.mean_theta1.is_finite() || !self.theta2.is_finite() {
            return Err(WalkError::InvalidParameter("coin angles must be finite".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn realization_seed(master_seed: u64, realization_index: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(realization_index as u64))
}

fn coin_stream(seed: u64, coin_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(coin_index);
    rng
}

fn box_samples(rng: &mut ChaCha8Rng, mean: f64, half_width: f64, n: usize) -> Vec<f64> {
    if half_width == 0.0 {
        return vec![mean; n];
    }
    (0..n).map(|_| rng.gen_range((mean - half_width)..=(mean + half_width))).collect()
}

/// Draw the coin field of one realization.
pub fn sample_coin_field(spec: &DisorderSpec, realization_index: usize) -> Result<CoinField> {
    spec.validate()?;
    let n = spec.lattice.num_sites();
    let seed = realization_seed(spec.master_seed, realization_index);
    let theta1 = box_samples(&mut coin_stream(seed, 0), spec.mean_theta1, spec.half_width, n);
    let theta2 = if spec.case.theta2_random() {
        box_samples(&mut coin_stream(seed, 1), spec.theta2, spec.half_width, n)
    } else {
        vec![spec.theta2; n]
    };
    CoinField::new(theta1, theta2)
}

/// The case's walk operator for one realization, in the symmetric time frame.
pub fn realization_operator(spec: &DisorderSpec, realization_index: usize) -> Result<WalkOperator> {
    let field = sample_coin_field(spec, realization_index)?;
    compose_walk(spec.case.walk_kind(), &field, spec.gamma(), spec.lattice)?.symmetric_frame()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub realization_index: usize,
    pub seed_used: u64,
    pub eigenvalues: Vec<C64>,
    pub reality: RealityReport,
    pub eigenvector_symmetry: Option<EigenvectorSymmetryReport>,
}

impl RealizationResult {
    pub fn is_fully_real(&self) -> bool {
        self.reality.num_complex == 0
    }
}

pub fn run_realization(spec: &DisorderSpec, index: usize, check_t_vectors: bool) -> Result<RealizationResult> {
    let seed = realization_seed(spec.master_seed, index);
    let wrap = |e: WalkError| WalkError::Realization { index, seed, source: Box::new(e) };
    let op = realization_operator(spec, index).map_err(wrap)?;
    let spectrum = eigendecompose(&op, spec.tolerances.solver).map_err(wrap)?;
    let reality = classify_reality(&spectrum, spec.tolerances.unit_circle).map_err(wrap)?;
    let eigenvector_symmetry = if check_t_vectors && spec.case.walk_kind() == WalkKind::U2Trs {
        let t = build_symmetry(SymmetryKind::T, spec.lattice);
        Some(check_eigenvector_symmetry(&spectrum, &t, spec.tolerances.degeneracy).map_err(wrap)?)
    } else {
        None
    };
    Ok(RealizationResult {
        realization_index: index,
        seed_used: seed,
        eigenvalues: spectrum.eigenvalues,
        reality,
        eigenvector_symmetry,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFailure {
    pub realization_index: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub spec: DisorderSpec,
    pub num_realizations: usize,
    pub per_realization: Vec<RealizationResult>,
    pub failures: Vec<RealizationFailure>,
    /// Some eigenvalue of some realization is off the unit circle.
    pub any_complex: bool,
    /// Mean of `complex_fraction` over the successful realizations.
    pub mean_complex_fraction: f64,
}

impl EnsembleReport {
    pub fn fully_real_count(&self) -> usize {
        self.per_realization.iter().filter(|r| r.is_fully_real()).count()
    }
}

pub fn run_ensemble(spec: &DisorderSpec, realizations: usize, check_t_vectors: bool) -> Result<EnsembleReport> {
    if realizations == 0 {
        return Err(WalkError::InvalidParameter("an ensemble needs at least one realization".into()));
    }
    spec.validate()?;
    let outcomes: Vec<Result<RealizationResult>> =
        (0..realizations).into_par_iter().map(|i| run_realization(spec, i, check_t_vectors)).collect();
    let mut per_realization = Vec::with_capacity(realizations);
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => per_realization.push(r),
            Err(e) => failures.push(RealizationFailure {
                realization_index: i,
                seed: realization_seed(spec.master_seed, i),
                message: e.to_string(),
            }),
        }
    }
    let any_complex = per_realization.iter().any(|r| r.reality.num_complex > 0);
    let mean_complex_fraction = if per_realization.is_empty() {
        0.0
    } else {
        per_realization.iter().map(|r| r.reality.complex_fraction).sum::<f64>() / per_realization.len() as f64
    };
    Ok(EnsembleReport {
        spec: spec.clone(),
        num_realizations: realizations,
        per_realization,
        failures,
        any_complex,
        mean_complex_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMapGrid {
    pub case: DisorderCase,
    /// `θ̄₁` values (rows).
    pub axis1: Vec<f64>,
    /// `θ₂` or `θ̄₂` values (columns).
    pub axis2: Vec<f64>,
    pub num_realizations: usize,
    /// `presence[i][j]`: some eigenstate of some realization has complex ε.
    pub presence: Vec<Vec<bool>>,
    /// Mean fraction of complex-ε eigenstates per cell.
    pub ratio: Vec<Vec<f64>>,
    pub failed_realizations: usize,
}

impl PhaseMapGrid {
    /// Index of the cell closest to `(theta1, theta2)`.
    pub fn nearest_cell(&self, theta1: f64, theta2: f64) -> (usize, usize) {
        let nearest = |axis: &[f64], x: f64| {
            (0..axis.len()).min_by(|&a, &b| (axis[a] - x).abs().total_cmp(&(axis[b] - x).abs())).unwrap_or(0)
        };
        (nearest(&self.axis1, theta1), nearest(&self.axis2, theta2))
    }
}

/// Run an ensemble at every `(θ̄₁, θ₂)` grid cell.
///
/// Every cell reuses `defaults.master_seed`, so neighbouring cells share their
/// uniform deviates and differ only through the means.
pub fn phase_map(
    case: DisorderCase,
    axis1: &[f64],
    axis2: &[f64],
    realizations: usize,
    defaults: &DisorderSpec,
) -> Result<PhaseMapGrid> {
    if case == DisorderCase::B {
        return Err(WalkError::UnsupportedCase('B'));
    }
    if axis1.is_empty() || axis2.is_empty() {
        return Err(WalkError::InvalidParameter("phase-map axes must be non-empty".into()));
    }
    let cells: Vec<(usize, usize)> =
        (0..axis1.len()).flat_map(|i| (0..axis2.len()).map(move |j| (i, j))).collect();
    let reports: Vec<Result<EnsembleReport>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let spec = DisorderSpec { case, mean_theta1: axis1[i], theta2: axis2[j], ..defaults.clone() };
            run_ensemble(&spec, realizations, false)
        })
        .collect();
    let mut presence = vec![vec![false; axis2.len()]; axis1.len()];
    let mut ratio = vec![vec![0.0; axis2.len()]; axis1.len()];
    let mut failed_realizations = 0;
    for (&(i, j), report) in cells.iter().zip(reports) {
        let report = report?;
        presence[i][j] = report.any_complex;
        ratio[i][j] = report.mean_complex_fraction;
        failed_realizations += report.failures.len();
    }
    Ok(PhaseMapGrid {
        case,
        axis1: axis1.to_vec(),
        axis2: axis2.to_vec(),
        num_realizations: realizations,
        presence,
        ratio,
        failed_realizations,
    })
}

/// `n` evenly spaced values over `[lo, hi]`; a single value sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(case: DisorderCase, n: usize) -> DisorderSpec {
        DisorderSpec::new(case, PI / 3.0, -PI / 12.0, 1.1, n, 7).unwrap()
    }

    #[test]
    fn case_table() {
        use DisorderCase::*;
        assert_eq!(A.walk_kind(), WalkKind::U1Pt);
        assert_eq!(B.walk_kind(), WalkKind::U1Pt);
        assert_eq!(C.walk_kind(), WalkKind::U2Trs);
        assert_eq!(D.walk_kind(), WalkKind::U2Trs);
        assert_eq!(DisorderCase::ALL.map(|c| c.theta2_random()), [false, true, false, true]);
    }

    #[test]
    fn zero_width_box_gives_means() {
        let mut s = spec(DisorderCase::D, 10);
        s.half_width = 0.0;
        let f = sample_coin_field(&s, 3).unwrap();
        assert!(f.theta1.iter().all(|&t| t == PI / 3.0));
        assert!(f.theta2.iter().all(|&t| t == -PI / 12.0));
    }

    #[test]
    fn samples_stay_in_box() {
        let s = spec(DisorderCase::B, 500);
        let f = sample_coin_field(&s, 0).unwrap();
        for (v, mean) in [(&f.theta1, s.mean_theta1), (&f.theta2, s.theta2)] {
            assert!(v.iter().all(|t| (t - mean).abs() <= s.half_width + 1e-15));
        }
    }

    #[test]
    fn constant_coin_in_case_a_and_c() {
        for case in [DisorderCase::A, DisorderCase::C] {
            let f = sample_coin_field(&spec(case, 50), 1).unwrap();
            assert!(f.theta2.iter().all(|&t| t == -PI / 12.0));
            assert!(f.theta1.windows(2).any(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn first_coin_variance_matches_uniform_box() {
        let s = spec(DisorderCase::A, 100_000);
        let f = sample_coin_field(&s, 0).unwrap();
        let n = f.theta1.len() as f64;
        let mean = f.theta1.iter().sum::<f64>() / n;
        let var = f.theta1.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expect = (PI / 2.0).powi(2) / 12.0;
        // Standard error of the sample variance here is about 6e-4.
        assert!((var - expect).abs() < 3e-3, "{var} vs {expect}");
        assert!((mean - s.mean_theta1).abs() < 5e-3);
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = spec(DisorderCase::D, 30);
        assert_eq!(sample_coin_field(&s, 5).unwrap(), sample_coin_field(&s, 5).unwrap());
        assert_ne!(sample_coin_field(&s, 5).unwrap(), sample_coin_field(&s, 6).unwrap());
        let other = DisorderSpec { master_seed: 8, ..s.clone() };
        assert_ne!(sample_coin_field(&s, 5).unwrap(), sample_coin_field(&other, 5).unwrap());
    }

    #[test]
    fn coin_streams_are_independent() {
        let s = spec(DisorderCase::D, 64);
        let f = sample_coin_field(&s, 0).unwrap();
        let d1: Vec<f64> = f.theta1.iter().map(|t| t - s.mean_theta1).collect();
        let d2: Vec<f64> = f.theta2.iter().map(|t| t - s.theta2).collect();
        assert_ne!(d1, d2);
    }

    #[test]
    fn single_realization_ensemble() {
        let s = spec(DisorderCase::C, 12);
        let ens = run_ensemble(&s, 1, true).unwrap();
        let one = run_realization(&s, 0, true).unwrap();
        assert_eq!(ens.per_realization, vec![one.clone()]);
        assert_eq!(ens.mean_complex_fraction, one.reality.complex_fraction);
        assert_eq!(ens.any_complex, one.reality.num_complex > 0);
    }

    #[test]
    fn unitary_limit_is_always_real() {
        for case in DisorderCase::ALL {
            let mut s = spec(case, 16);
            s.gamma_exp = 1.0;
            let ens = run_ensemble(&s, 10, false).unwrap();
            assert!(!ens.any_complex, "case {case:?}");
            assert!(ens.failures.is_empty());
        }
    }

    #[test]
    fn ensemble_errors() {
        let s = spec(DisorderCase::A, 8);
        assert!(run_ensemble(&s, 0, false).is_err());
        let bad = DisorderSpec { gamma_exp: -1.0, ..s.clone() };
        assert!(run_ensemble(&bad, 2, false).is_err());
        assert!(matches!(phase_map(DisorderCase::B, &[0.0], &[0.0], 1, &s), Err(WalkError::UnsupportedCase('B'))));
        assert!(phase_map(DisorderCase::A, &[], &[0.0], 1, &s).is_err());
    }

    #[test]
    fn phase_map_shape_and_definitions() {
        let s = spec(DisorderCase::C, 10);
        let axis1 = linspace(-0.5, 0.5, 3);
        let axis2 = linspace(0.0, 1.0, 2);
        let grid = phase_map(DisorderCase::C, &axis1, &axis2, 3, &s).unwrap();
        assert_eq!(grid.presence.len(), 3);
        assert!(grid.ratio.iter().all(|row| row.len() == 2));
        for i in 0..3 {
            for j in 0..2 {
                let r = grid.ratio[i][j];
                assert!((0.0..=1.0).contains(&r));
                assert_eq!(grid.presence[i][j], r > 0.0);
            }
        }
        assert_eq!(grid.nearest_cell(0.45, 0.1), (2, 0));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
