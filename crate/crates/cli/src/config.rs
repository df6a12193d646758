//! Command-line grammar. The parsed [`Command`] doubles as the run
//! configuration embedded in every report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qwalk_core::disorder::DisorderCase;
use qwalk_core::walk::WalkKind;

use crate::angle::{Angle, AngleRange};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Spectra of non-Hermitian split-step quantum walks", long_about = None)]
pub struct Cli {
    /// Stamp reports with the wall-clock time (output is then not byte-stable).
    #[arg(long, global = true)]
    pub timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Bloch band structure ε±(k) of a homogeneous walk.
    Dispersion(DispersionArgs),
    /// Eigenvalues of one walk operator on the ring.
    Spectrum(SpectrumArgs),
    /// Disorder ensemble for one of the cases A–D.
    Ensemble(EnsembleArgs),
    /// Ensembles over a grid of mean coin angles.
    PhaseMap(PhaseMapArgs),
    /// Operator- and eigenvector-level P, T and PT checks.
    CheckSymmetry(CheckSymmetryArgs),
    /// Built-in consistency gates; exits 3 if any fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    /// PT-symmetric walk.
    U1,
    /// Time-reversal symmetric walk.
    U2,
}

impl From<KindArg> for WalkKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::U1 => WalkKind::U1Pt,
            KindArg::U2 => WalkKind::U2Trs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseArg {
    A,
    B,
    C,
    D,
}

impl From<CaseArg> for DisorderCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::A => DisorderCase::A,
            CaseArg::B => DisorderCase::B,
            CaseArg::C => DisorderCase::C,
            CaseArg::D => DisorderCase::D,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderArg {
    None,
    Random,
    /// Random, then mirrored so that θ(n) = θ(−n).
    Symmetrized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameArg {
    Standard,
    Symmetric,
}

fn egamma(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid e^γ '{s}': expected a number ≥ 1"))?;
    if !v.is_finite() || v < 1.0 {
        return Err(format!("invalid e^γ '{s}': must be finite and ≥ 1"));
    }
    Ok(v)
}

fn positive_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid tolerance '{s}'"))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(format!("invalid tolerance '{s}': must be positive"));
    }
    Ok(v)
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("invalid count '{s}': expected an integer ≥ 1")),
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        _ => Err(format!("invalid count '{s}': expected an integer ≥ 2")),
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension, else JSON.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    pub fn resolved_format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.out.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DispersionArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// First coin angle in units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Angle,
    /// Second coin angle in units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: Angle,
    #[arg(long, value_parser = egamma)]
    pub egamma: f64,
    #[arg(long, default_value_t = 512, value_parser = at_least_two)]
    pub num_k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Write the eigenvalues e^{−iε±(k)} as an SVG plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(group = clap::ArgGroup::new("walk").required(true).args(["kind", "case"]))]
pub struct SpectrumArgs {
    /// Homogeneous walk of this kind.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// One disorder realization of this case.
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// First coin angle (its mean under disorder), units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Angle,
    /// Second coin angle (its mean under disorder), units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: Angle,
    #[arg(long, value_parser = egamma)]
    pub egamma: f64,
    #[arg(long, default_value_t = 120, value_parser = at_least_one)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub realization: usize,
    /// Half width of the coin box, units of π.
    #[arg(long, default_value = "1/4")]
    pub half_width: Angle,
    /// Unit-circle tolerance on | |λ| − 1 |.
    #[arg(long, default_value_t = 1e-8, value_parser = positive_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    /// Mean first coin angle, units of π.
    #[arg(long, alias = "theta1", allow_hyphen_values = true)]
    pub mean_theta1: Angle,
    /// Mean second coin angle (constant in cases A and C), units of π.
    #[arg(long, alias = "theta2", allow_hyphen_values = true)]
    pub mean_theta2: Angle,
    #[arg(long, value_parser = egamma)]
    pub egamma: f64,
    #[arg(long, default_value_t = 120, value_parser = at_least_one)]
    pub n: usize,
    /// Number of realizations.
    #[arg(long, default_value_t = 200, value_parser = at_least_one)]
    pub r: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "1/4")]
    pub half_width: Angle,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_tol)]
    pub tol: f64,
    /// Also test T on each eigenvector (cases C and D).
    #[arg(long)]
    pub check_eigenvectors: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    /// SVG of every realization's eigenvalues.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PhaseMapArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    /// Range of the mean first coin angle, units of π.
    #[arg(long, default_value = "-1/2:1/2", allow_hyphen_values = true)]
    pub theta1_range: AngleRange,
    /// Range of the second coin angle (or its mean), units of π.
    #[arg(long, default_value = "-1/2:1/2", allow_hyphen_values = true)]
    pub theta2_range: AngleRange,
    /// Grid points along the first axis.
    #[arg(long, default_value_t = 41, value_parser = at_least_one)]
    pub steps1: usize,
    /// Grid points along the second axis.
    #[arg(long, default_value_t = 41, value_parser = at_least_one)]
    pub steps2: usize,
    #[arg(long, value_parser = egamma, default_value_t = 1.1)]
    pub egamma: f64,
    #[arg(long, default_value_t = 24, value_parser = at_least_one)]
    pub n: usize,
    #[arg(long, default_value_t = 20, value_parser = at_least_one)]
    pub r: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "1/4")]
    pub half_width: Angle,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
    /// SVG heat map of the complex ratio.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CheckSymmetryArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Angle,
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: Angle,
    #[arg(long, value_parser = egamma)]
    pub egamma: f64,
    #[arg(long, default_value_t = 24, value_parser = at_least_one)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = DisorderArg::None)]
    pub disorder: DisorderArg,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "1/4")]
    pub half_width: Angle,
    /// Frame in which the operator relations are evaluated.
    #[arg(long, value_enum, default_value_t = FrameArg::Symmetric)]
    pub frame: FrameArg,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_tol)]
    pub degeneracy_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Run every gate (the default when no gate is named).
    #[arg(long)]
    pub all: bool,
    /// Lattice spectra against the Bloch dispersion.
    #[arg(long)]
    pub bloch: bool,
    /// Elemental and time-frame symmetry relations on a parameter grid.
    #[arg(long)]
    pub relations: bool,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_tol)]
    pub bloch_tol: f64,
    #[arg(long, default_value_t = 1e-14, value_parser = positive_tol)]
    pub relation_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl VerifyArgs {
    pub fn run_bloch(&self) -> bool {
        self.bloch || self.all || !self.relations
    }

    pub fn run_relations(&self) -> bool {
        self.relations || self.all || !self.bloch
    }
}

fn push(argv: &mut Vec<String>, flag: &str, value: impl ToString) {
    argv.push(format!("--{flag}"));
    argv.push(value.to_string());
}

/// Small tolerances in exponent form; both forms parse back exactly.
fn real(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn push_output(argv: &mut Vec<String>, o: &OutputArgs) {
    if let Some(p) = &o.out {
        push(argv, "out", p.display());
    }
    if let Some(f) = o.format {
        push(argv, "format", name(f));
    }
}

fn name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Dispersion(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::Ensemble(a) => &a.output,
            Command::PhaseMap(a) => &a.output,
            Command::CheckSymmetry(a) => &a.output,
            Command::Verify(a) => &a.output,
        }
    }

    pub fn plot(&self) -> Option<&PathBuf> {
        match self {
            Command::Dispersion(a) => a.plot.as_ref(),
            Command::Spectrum(a) => a.plot.as_ref(),
            Command::Ensemble(a) => a.plot.as_ref(),
            Command::PhaseMap(a) => a.plot.as_ref(),
            Command::CheckSymmetry(_) | Command::Verify(_) => None,
        }
    }

    /// Arguments that reproduce this configuration, program name excluded.
    /// Angles are written with `=` so negative values survive re-parsing.
    pub fn to_argv(&self) -> Vec<String> {
        let mut v = Vec::new();
        let angle = |v: &mut Vec<String>, flag: &str, a: &dyn ToString| v.push(format!("--{flag}={}", a.to_string()));
        match self {
            Command::Dispersion(a) => {
                v.push("dispersion".into());
                push(&mut v, "kind", name(a.kind));
                angle(&mut v, "theta1", &a.theta1);
                angle(&mut v, "theta2", &a.theta2);
                push(&mut v, "egamma", real(a.egamma));
                push(&mut v, "num-k", a.num_k);
                push_output(&mut v, &a.output);
                if let Some(p) = &a.plot {
                    push(&mut v, "plot", p.display());
                }
            }
            Command::Spectrum(a) => {
                v.push("spectrum".into());
                if let Some(k) = a.kind {
                    push(&mut v, "kind", name(k));
                }
                if let Some(c) = a.case {
                    push(&mut v, "case", name(c));
                }
                angle(&mut v, "theta1", &a.theta1);
                angle(&mut v, "theta2", &a.theta2);
                push(&mut v, "egamma", real(a.egamma));
                push(&mut v, "n", a.n);
                push(&mut v, "seed", a.seed);
                push(&mut v, "realization", a.realization);
                angle(&mut v, "half-width", &a.half_width);
                push(&mut v, "tol", real(a.tol));
                push_output(&mut v, &a.output);
                if let Some(p) = &a.plot {
                    push(&mut v, "plot", p.display());
                }
            }
            Command::Ensemble(a) => {
                v.push("ensemble".into());
                push(&mut v, "case", name(a.case));
                angle(&mut v, "mean-theta1", &a.mean_theta1);
                angle(&mut v, "mean-theta2", &a.mean_theta2);
                push(&mut v, "egamma", real(a.egamma));
                push(&mut v, "n", a.n);
                push(&mut v, "r", a.r);
                push(&mut v, "seed", a.seed);
                angle(&mut v, "half-width", &a.half_width);
                push(&mut v, "tol", real(a.tol));
                if a.check_eigenvectors {
                    v.push("--check-eigenvectors".into());
                }
                push_output(&mut v, &a.output);
                if let Some(p) = &a.plot {
                    push(&mut v, "plot", p.display());
                }
            }
            Command::PhaseMap(a) => {
                v.push("phase-map".into());
                push(&mut v, "case", name(a.case));
                angle(&mut v, "theta1-range", &a.theta1_range);
                angle(&mut v, "theta2-range", &a.theta2_range);
                push(&mut v, "steps1", a.steps1);
                push(&mut v, "steps2", a.steps2);
                push(&mut v, "egamma", real(a.egamma));
                push(&mut v, "n", a.n);
                push(&mut v, "r", a.r);
                push(&mut v, "seed", a.seed);
                angle(&mut v, "half-width", &a.half_width);
                push(&mut v, "tol", real(a.tol));
                push_output(&mut v, &a.output);
                if let Some(p) = &a.plot {
                    push(&mut v, "plot", p.display());
                }
            }
            Command::CheckSymmetry(a) => {
                v.push("check-symmetry".into());
                push(&mut v, "kind", name(a.kind));
                angle(&mut v, "theta1", &a.theta1);
                angle(&mut v, "theta2", &a.theta2);
                push(&mut v, "egamma", real(a.egamma));
                push(&mut v, "n", a.n);
                push(&mut v, "disorder", name(a.disorder));
                push(&mut v, "seed", a.seed);
                angle(&mut v, "half-width", &a.half_width);
                push(&mut v, "frame", name(a.frame));
                push(&mut v, "degeneracy-tol", real(a.degeneracy_tol));
                push_output(&mut v, &a.output);
            }
            Command::Verify(a) => {
                v.push("verify".into());
                for (on, flag) in [(a.all, "--all"), (a.bloch, "--bloch"), (a.relations, "--relations")] {
                    if on {
                        v.push(flag.into());
                    }
                }
                push(&mut v, "bloch-tol", real(a.bloch_tol));
                push(&mut v, "relation-tol", real(a.relation_tol));
                push_output(&mut v, &a.output);
            }
        }
        v
    }
}
