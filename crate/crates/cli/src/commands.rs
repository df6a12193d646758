//! Execution of each subcommand into a report payload.

use qwalk_core::disorder::{
    linspace, phase_map, realization_operator, realization_seed, run_ensemble, sample_coin_field, DisorderCase,
    DisorderSpec, Tolerances,
};
use qwalk_core::dispersion::{band_scan, critical_gain_u1, verify_bloch_vs_lattice, verify_elemental_relations, verify_frame_relations};
use qwalk_core::spectrum::{
    check_eigenvector_symmetry, classify_reality, eigendecompose, quasi_energies, relation_residual,
    spectral_pairing_defect, SOLVER_TOL,
};
use qwalk_core::symmetry::{build_symmetry, SymmetryKind};
use qwalk_core::walk::{compose_walk, CoinField, LatticeSpec, WalkKind};
use qwalk_core::WalkError;

use crate::config::{
    CheckSymmetryArgs, Command, DisorderArg, DispersionArgs, EnsembleArgs, FrameArg, PhaseMapArgs, SpectrumArgs,
    VerifyArgs,
};
use crate::error::CliError;
use crate::plot::{eigenvalue_plot, heat_map};
use crate::report::{BlochGate, Payload, SpectrumSummary, SymmetryCheck, SymmetryRow, VerifyReport};

/// What a subcommand produced.
pub struct Outcome {
    pub payload: Payload,
    /// Human-readable lines for standard error.
    pub summary: Vec<String>,
    pub plot: Option<String>,
    /// Raised after the report has been written.
    pub deferred_error: Option<CliError>,
}

impl Outcome {
    fn new(payload: Payload, summary: Vec<String>) -> Self {
        Outcome { payload, summary, plot: None, deferred_error: None }
    }
}

fn numerical(seed: Option<u64>) -> impl Fn(WalkError) -> CliError {
    move |e| CliError::from_walk(e, seed)
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Dispersion(a) => dispersion(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Ensemble(a) => ensemble(a),
        Command::PhaseMap(a) => phase_map_cmd(a),
        Command::CheckSymmetry(a) => check_symmetry(a),
        Command::Verify(a) => verify(a),
    }
}

fn dispersion(a: &DispersionArgs) -> Result<Outcome, CliError> {
    let kind = WalkKind::from(a.kind);
    let (t1, t2) = (a.theta1.radians, a.theta2.radians);
    let scan = band_scan(kind, t1, t2, a.egamma.ln(), a.num_k).map_err(numerical(None))?;
    let mut summary = vec![format!(
        "{kind:?} band over {} momenta: max |Im ε| = {:.3e}, complex fraction = {:.4}",
        a.num_k,
        scan.max_abs_imag(),
        scan.complex_fraction(1e-10)
    )];
    if kind == WalkKind::U1Pt {
        match critical_gain_u1(t1, t2, 1e-13).map_err(numerical(None))?.gamma() {
            Some(g) => summary.push(format!("critical e^γc = {:.10}", g.exp())),
            None => summary.push("no reality-breaking transition for these angles".into()),
        }
    }
    let plot = a.plot.as_ref().map(|_| {
        let pts: Vec<_> = scan.points.iter().flat_map(|p| p.eigenvalues()).collect();
        eigenvalue_plot(&pts, &format!("{kind:?} θ1={} θ2={} e^γ={}", a.theta1, a.theta2, a.egamma))
    });
    Ok(Outcome { plot, ..Outcome::new(Payload::BandScan(scan), summary) })
}

fn disorder_spec(
    case: DisorderCase,
    t1: f64,
    t2: f64,
    half_width: f64,
    egamma: f64,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<DisorderSpec, CliError> {
    let mut spec = DisorderSpec::new(case, t1, t2, egamma, n, seed).map_err(numerical(None))?;
    spec.half_width = half_width;
    spec.tolerances = Tolerances { unit_circle: tol, ..Tolerances::default() };
    spec.validate().map_err(numerical(None))?;
    Ok(spec)
}

fn spectrum(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let (t1, t2) = (a.theta1.radians, a.theta2.radians);
    let lattice = LatticeSpec::new(a.n).map_err(numerical(None))?;
    let (kind, case, seed, op) = match (a.kind, a.case) {
        (Some(k), None) => {
            let kind = WalkKind::from(k);
            let field = CoinField::homogeneous(t1, t2, lattice);
            let op = compose_walk(kind, &field, a.egamma.ln(), lattice).map_err(numerical(None))?;
            (kind, None, None, op)
        }
        (None, Some(c)) => {
            let case = DisorderCase::from(c);
            let spec = disorder_spec(case, t1, t2, a.half_width.radians, a.egamma, a.n, a.seed, a.tol)?;
            let seed = realization_seed(a.seed, a.realization);
            let op = realization_operator(&spec, a.realization).map_err(numerical(Some(seed)))?;
            (case.walk_kind(), Some(case), Some(seed), op)
        }
        _ => return Err(CliError::Usage("give exactly one of --kind or --case".into())),
    };
    let spectrum = eigendecompose(&op, SOLVER_TOL).map_err(numerical(seed))?;
    let reality = classify_reality(&spectrum, a.tol).map_err(numerical(seed))?;
    let eps = quasi_energies(&spectrum).map_err(numerical(seed))?;
    let summary = vec![format!(
        "{kind:?} on N = {}: {} of {} eigenvalues off the unit circle (tol {:e}), max | |λ| − 1 | = {:.3e}",
        a.n,
        reality.num_complex,
        spectrum.len(),
        a.tol,
        reality.max_modulus_deviation
    )];
    let plot = a.plot.as_ref().map(|_| {
        let label = case.map_or(format!("{kind:?}"), |c| format!("case {}", c.letter()));
        eigenvalue_plot(&spectrum.eigenvalues, &format!("{label} N={} e^γ={}", a.n, a.egamma))
    });
    let payload = Payload::Spectrum(SpectrumSummary {
        kind,
        case,
        num_sites: a.n,
        theta1: t1,
        theta2: t2,
        gamma_exp: a.egamma,
        realization_seed: seed,
        tolerance: a.tol,
        max_eigen_residual: spectrum.max_residual(),
        quasi_energies: eps.iter().map(|e| e.epsilon).collect(),
        eigenvalues: spectrum.eigenvalues,
        on_unit_circle: reality.on_circle_flags,
        num_complex: reality.num_complex,
        complex_fraction: reality.complex_fraction,
        max_modulus_deviation: reality.max_modulus_deviation,
    });
    Ok(Outcome { plot, ..Outcome::new(payload, summary) })
}

fn ensemble(a: &EnsembleArgs) -> Result<Outcome, CliError> {
    let case = DisorderCase::from(a.case);
    let spec = disorder_spec(
        case,
        a.mean_theta1.radians,
        a.mean_theta2.radians,
        a.half_width.radians,
        a.egamma,
        a.n,
        a.seed,
        a.tol,
    )?;
    let report = run_ensemble(&spec, a.r, a.check_eigenvectors).map_err(numerical(None))?;
    let mut summary = vec![format!(
        "case {}: {} of {} realizations fully real, mean complex fraction = {:.6}",
        case.letter(),
        report.fully_real_count(),
        report.per_realization.len(),
        report.mean_complex_fraction
    )];
    if a.check_eigenvectors && case.walk_kind() == WalkKind::U2Trs {
        let worst = report
            .per_realization
            .iter()
            .filter(|r| r.is_fully_real())
            .filter_map(|r| r.eigenvector_symmetry.as_ref().map(|s| s.max_residual()))
            .fold(0.0, f64::max);
        summary.push(format!("worst T eigenvector residual over fully real realizations = {worst:.3e}"));
    }
    let deferred_error = (!report.failures.is_empty()).then(|| {
        let seeds: Vec<String> =
            report.failures.iter().map(|f| format!("#{} (seed {:#018x}): {}", f.realization_index, f.seed, f.message)).collect();
        CliError::Numerical { message: format!("{} realization(s) failed: {}", seeds.len(), seeds.join("; ")), seed: Some(a.seed) }
    });
    let plot = a.plot.as_ref().map(|_| {
        let pts: Vec<_> = report.per_realization.iter().flat_map(|r| r.eigenvalues.iter().copied()).collect();
        eigenvalue_plot(&pts, &format!("case {} N={} R={} e^γ={}", case.letter(), a.n, a.r, a.egamma))
    });
    Ok(Outcome { payload: Payload::Ensemble(report), summary, plot, deferred_error })
}

fn phase_map_cmd(a: &PhaseMapArgs) -> Result<Outcome, CliError> {
    let case = DisorderCase::from(a.case);
    let axis1 = linspace(a.theta1_range.lo.radians, a.theta1_range.hi.radians, a.steps1);
    let axis2 = linspace(a.theta2_range.lo.radians, a.theta2_range.hi.radians, a.steps2);
    let defaults = disorder_spec(case, axis1[0], axis2[0], a.half_width.radians, a.egamma, a.n, a.seed, a.tol)?;
    let grid = phase_map(case, &axis1, &axis2, a.r, &defaults).map_err(numerical(Some(a.seed)))?;
    let cells = a.steps1 * a.steps2;
    let real_cells = grid.presence.iter().flatten().filter(|p| !**p).count();
    let summary = vec![format!(
        "case {} phase map: {real_cells} of {cells} cells fully real over {} realizations each",
        case.letter(),
        a.r
    )];
    let deferred_error = (grid.failed_realizations > 0).then(|| CliError::Numerical {
        message: format!("{} realization(s) failed across the grid", grid.failed_realizations),
        seed: Some(a.seed),
    });
    let plot = a.plot.as_ref().map(|_| {
        heat_map(&grid.axis1, &grid.axis2, &grid.ratio, &format!("case {} complex ratio, N={} R={}", case.letter(), a.n, a.r))
    });
    Ok(Outcome { payload: Payload::PhaseMap(grid), summary, plot, deferred_error })
}

fn check_symmetry(a: &CheckSymmetryArgs) -> Result<Outcome, CliError> {
    let kind = WalkKind::from(a.kind);
    let lattice = LatticeSpec::new(a.n).map_err(numerical(None))?;
    let (t1, t2) = (a.theta1.radians, a.theta2.radians);
    let field = match a.disorder {
        DisorderArg::None => CoinField::homogeneous(t1, t2, lattice),
        DisorderArg::Random | DisorderArg::Symmetrized => {
            let case = match kind {
                WalkKind::U1Pt => DisorderCase::B,
                WalkKind::U2Trs => DisorderCase::D,
            };
            let spec = disorder_spec(case, t1, t2, a.half_width.radians, a.egamma, a.n, a.seed, 1e-8)?;
            let field = sample_coin_field(&spec, 0).map_err(numerical(Some(a.seed)))?;
            if a.disorder == DisorderArg::Symmetrized {
                field.symmetrized(lattice)
            } else {
                field
            }
        }
    };
    let seed = (a.disorder != DisorderArg::None).then(|| realization_seed(a.seed, 0));
    let op = compose_walk(kind, &field, a.egamma.ln(), lattice).map_err(numerical(seed))?;
    let op = match a.frame {
        FrameArg::Standard => op,
        FrameArg::Symmetric => op.symmetric_frame().map_err(numerical(seed))?,
    };
    let spectrum = eigendecompose(&op, SOLVER_TOL).map_err(numerical(seed))?;
    let reality = classify_reality(&spectrum, 1e-8).map_err(numerical(seed))?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for sym in [SymmetryKind::P, SymmetryKind::T, SymmetryKind::PT] {
        let action = build_symmetry(sym, lattice);
        let operator_residual = relation_residual(&op.matrix, &action).map_err(numerical(seed))?;
        let vectors = check_eigenvector_symmetry(&spectrum, &action, a.degeneracy_tol).map_err(numerical(seed))?;
        let eigenvector_residual = Some(vectors.max_residual()).filter(|r| r.is_finite());
        let pairing_defect = sym.is_antiunitary().then(|| spectral_pairing_defect(&spectrum.eigenvalues));
        summary.push(format!(
            "{sym:?}: operator residual {operator_residual:.3e}, eigenvector residual {}",
            eigenvector_residual.map_or("undefined".to_string(), |r| format!("{r:.3e}"))
        ));
        rows.push(SymmetryRow { symmetry: sym, operator_residual, eigenvector_residual, pairing_defect });
    }
    let payload = Payload::Symmetry(SymmetryCheck {
        kind,
        disorder: a.disorder,
        frame: a.frame,
        num_sites: a.n,
        gamma_exp: a.egamma,
        num_complex: reality.num_complex,
        rows,
    });
    Ok(Outcome::new(payload, summary))
}

/// Homogeneous parameter sets used by the Bloch gate: `(kind, θ₁/π, θ₂/π, e^γ)`.
pub const BLOCH_CASES: [(WalkKind, f64, f64, f64); 4] = [
    (WalkKind::U1Pt, 1.0 / 3.0, -1.0 / 12.0, 1.1),
    (WalkKind::U1Pt, 1.0 / 4.0, 1.0 / 20.0, 1.1),
    (WalkKind::U2Trs, 1.0 / 3.0, -1.0 / 12.0, 1.1),
    (WalkKind::U2Trs, 1.0 / 4.0, 1.0 / 20.0, 1.1),
];

pub const BLOCH_SIZES: [usize; 2] = [8, 120];

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    use std::f64::consts::PI;
    let mut bloch = Vec::new();
    let mut summary = Vec::new();
    if a.run_bloch() {
        for (kind, p1, p2, eg) in BLOCH_CASES {
            for n in BLOCH_SIZES {
                let check = verify_bloch_vs_lattice(kind, p1 * PI, p2 * PI, eg.ln(), n, a.bloch_tol).map_err(numerical(None))?;
                summary.push(format!(
                    "{} bloch {kind:?} θ=({p1:.4}π, {p2:.4}π) N={n}: mismatch {:.3e}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.max_mismatch
                ));
                bloch.push(BlochGate { kind, theta1: p1 * PI, theta2: p2 * PI, gamma_exp: eg, check });
            }
        }
    }
    let (elemental, frame) = if a.run_relations() {
        (Some(verify_elemental_relations(a.relation_tol)), Some(verify_frame_relations(a.relation_tol)))
    } else {
        (None, None)
    };
    for rep in [&elemental, &frame].into_iter().flatten() {
        for r in &rep.rows {
            let (what, value) = if r.expected_to_hold { ("max", r.max_residual) } else { ("min", r.min_residual) };
            summary.push(format!("{} {}: {what} residual {value:.3e}", if r.passed { "PASS" } else { "FAIL" }, r.name));
        }
    }
    let passed = bloch.iter().all(|g| g.check.passed)
        && elemental.iter().chain(frame.iter()).all(|r| r.passed());
    let deferred_error = (!passed).then(|| CliError::Gate("one or more verification gates failed".into()));
    Ok(Outcome { deferred_error, ..Outcome::new(Payload::Verify(VerifyReport { bloch, elemental, frame, passed }), summary) })
}
