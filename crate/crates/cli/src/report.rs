//! Report payloads, the provenance envelope, and their JSON and CSV forms.
//!
//! JSON is lossless for every payload. CSV writes one table per payload,
//! preceded by a `# ` line holding the envelope as JSON with the tabulated
//! fields emptied; band scans, spectra, phase maps and symmetry checks parse
//! back exactly. Ensemble and verification tables are summaries.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use qwalk_core::disorder::{DisorderCase, EnsembleReport, PhaseMapGrid};
use qwalk_core::dispersion::{BandPoint, BandScan, BlochLatticeCheck, RelationReport};
use qwalk_core::symmetry::SymmetryKind;
use qwalk_core::walk::WalkKind;
use qwalk_core::C64;

use crate::config::{Command, DisorderArg, FrameArg, Format};

pub const TOOL_VERSION: &str = concat!("qwalk ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Shell form of the command that reproduces this report.
    pub replay: String,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let replay = std::iter::once("qwalk".to_string()).chain(command.to_argv()).collect::<Vec<_>>().join(" ");
        RunConfig { command, replay }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub kind: WalkKind,
    pub case: Option<DisorderCase>,
    pub num_sites: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma_exp: f64,
    pub realization_seed: Option<u64>,
    pub tolerance: f64,
    pub eigenvalues: Vec<C64>,
    /// `ε = i ln λ`, real part in `(−π, π]`.
    pub quasi_energies: Vec<C64>,
    pub on_unit_circle: Vec<bool>,
    pub num_complex: usize,
    pub complex_fraction: f64,
    pub max_modulus_deviation: f64,
    pub max_eigen_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub symmetry: SymmetryKind,
    /// `‖A U A⁻¹ − U^{∓1}‖_F / ‖U‖_F`.
    pub operator_residual: f64,
    /// Worst eigenvector residual; `None` when some phase is undefined.
    pub eigenvector_residual: Option<f64>,
    /// Distance of the spectrum from its `λ -> 1/λ*` image (anti-unitary rows).
    pub pairing_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub kind: WalkKind,
    pub disorder: DisorderArg,
    pub frame: FrameArg,
    pub num_sites: usize,
    pub gamma_exp: f64,
    pub num_complex: usize,
    pub rows: Vec<SymmetryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochGate {
    pub kind: WalkKind,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma_exp: f64,
    pub check: BlochLatticeCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub bloch: Vec<BlochGate>,
    pub elemental: Option<RelationReport>,
    pub frame: Option<RelationReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    BandScan(BandScan),
    Spectrum(SpectrumSummary),
    Ensemble(EnsembleReport),
    PhaseMap(PhaseMapGrid),
    Symmetry(SymmetryCheck),
    Verify(VerifyReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub timestamp: Option<String>,
    pub config: RunConfig,
    pub payload: Payload,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("{0} tables are summaries and cannot be parsed back; use JSON")]
    Lossy(&'static str),
}

impl From<serde_json::Error> for ReportError {
    fn from(e: serde_json::Error) -> Self {
        ReportError::Malformed(e.to_string())
    }
}

pub fn serialize(report: &ReportEnvelope, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(report),
    }
}

pub fn parse(text: &str, format: Format) -> Result<ReportEnvelope, ReportError> {
    match format {
        Format::Json => Ok(serde_json::from_str(text)?),
        Format::Csv => from_csv(text),
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Table {
    /// Payload fields moved out of the header into the rows.
    stripped: &'static [&'static str],
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

fn table(payload: &Payload) -> Table {
    match payload {
        Payload::BandScan(s) => Table {
            stripped: &["points"],
            header: &[
                "k", "re_eps_plus", "im_eps_plus", "re_eps_minus", "im_eps_minus", "re_lambda_plus",
                "im_lambda_plus", "re_lambda_minus", "im_lambda_minus", "re_cos_eps", "im_cos_eps",
            ],
            rows: s
                .points
                .iter()
                .map(|p| {
                    let [lp, lm] = p.eigenvalues();
                    [p.k, p.eps_plus.re, p.eps_plus.im, p.eps_minus.re, p.eps_minus.im, lp.re, lp.im, lm.re, lm.im, p.cos_eps.re, p.cos_eps.im]
                        .into_iter()
                        .map(num)
                        .collect()
                })
                .collect(),
        },
        Payload::Spectrum(s) => Table {
            stripped: &["eigenvalues", "quasi_energies", "on_unit_circle"],
            header: &["index", "re_lambda", "im_lambda", "abs_lambda", "re_eps", "im_eps", "on_unit_circle"],
            rows: (0..s.eigenvalues.len())
                .map(|j| {
                    let (l, e) = (s.eigenvalues[j], s.quasi_energies[j]);
                    vec![j.to_string(), num(l.re), num(l.im), num(l.norm()), num(e.re), num(e.im), s.on_unit_circle[j].to_string()]
                })
                .collect(),
        },
        Payload::PhaseMap(g) => Table {
            stripped: &["presence", "ratio"],
            header: &["i", "j", "theta1", "theta2", "presence", "ratio"],
            rows: (0..g.axis1.len())
                .flat_map(|i| {
                    (0..g.axis2.len()).map(move |j| {
                        vec![i.to_string(), j.to_string(), num(g.axis1[i]), num(g.axis2[j]), g.presence[i][j].to_string(), num(g.ratio[i][j])]
                    })
                })
                .collect(),
        },
        Payload::Symmetry(c) => Table {
            stripped: &["rows"],
            header: &["symmetry", "operator_residual", "eigenvector_residual", "pairing_defect"],
            rows: c
                .rows
                .iter()
                .map(|r| {
                    vec![format!("{:?}", r.symmetry), num(r.operator_residual), opt(r.eigenvector_residual), opt(r.pairing_defect)]
                })
                .collect(),
        },
        Payload::Ensemble(e) => Table {
            stripped: &["per_realization"],
            header: &["realization", "seed", "num_complex", "complex_fraction", "max_modulus_deviation", "max_t_residual"],
            rows: e
                .per_realization
                .iter()
                .map(|r| {
                    let t = r.eigenvector_symmetry.as_ref().map(|s| s.max_residual());
                    vec![
                        r.realization_index.to_string(),
                        r.seed_used.to_string(),
                        r.reality.num_complex.to_string(),
                        num(r.reality.complex_fraction),
                        num(r.reality.max_modulus_deviation),
                        opt(t),
                    ]
                })
                .collect(),
        },
        Payload::Verify(v) => {
            let mut rows = Vec::new();
            for g in &v.bloch {
                let name = format!("bloch {:?} N={}", g.kind, g.check.num_sites);
                rows.push(vec![name, num(g.check.max_mismatch), num(g.check.tolerance), g.check.passed.to_string()]);
            }
            for rep in [&v.elemental, &v.frame].into_iter().flatten() {
                for r in &rep.rows {
                    let value = if r.expected_to_hold { r.max_residual } else { r.min_residual };
                    rows.push(vec![format!("\"{}\"", r.name), num(value), num(rep.tolerance), r.passed.to_string()]);
                }
            }
            Table { stripped: &["bloch", "elemental", "frame"], header: &["gate", "value", "tolerance", "passed"], rows }
        }
    }
}

fn to_csv(report: &ReportEnvelope) -> String {
    let t = table(&report.payload);
    let mut head = serde_json::to_value(report).expect("reports serialize");
    if let Some(data) = head.pointer_mut("/payload/data").and_then(Value::as_object_mut) {
        for key in t.stripped {
            data.insert((*key).to_string(), Value::Null);
        }
    }
    let mut out = format!("# {}\n", serde_json::to_string(&head).expect("reports serialize"));
    out.push_str(&t.header.join(","));
    out.push('\n');
    for row in t.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, ReportError> {
    s.parse().map_err(|_| ReportError::Malformed(format!("bad {what} '{s}'")))
}

fn opt_field(s: &str, what: &str) -> Result<Option<f64>, ReportError> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(s, what).map(Some)
    }
}

fn from_csv(text: &str) -> Result<ReportEnvelope, ReportError> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| ReportError::Malformed("missing '# ' envelope line".into()))?;
    let mut head: Value = serde_json::from_str(head)?;
    let kind = head.pointer("/payload/type").and_then(Value::as_str).unwrap_or_default().to_string();
    lines.next().ok_or_else(|| ReportError::Malformed("missing header row".into()))?;
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').collect()).collect();
    let width = |n: usize| {
        if rows.iter().all(|r| r.len() == n) {
            Ok(())
        } else {
            Err(ReportError::Malformed(format!("expected {n} columns in every row")))
        }
    };
    let data = head
        .pointer_mut("/payload/data")
        .and_then(Value::as_object_mut)
        .ok_or_else(|| ReportError::Malformed("envelope has no payload".into()))?;
    match kind.as_str() {
        "band-scan" => {
            width(11)?;
            let mut points = Vec::with_capacity(rows.len());
            for r in &rows {
                let v: Vec<f64> = r.iter().map(|s| field(s, "number")).collect::<Result<_, _>>()?;
                points.push(BandPoint {
                    k: v[0],
                    cos_eps: C64::new(v[9], v[10]),
                    eps_plus: C64::new(v[1], v[2]),
                    eps_minus: C64::new(v[3], v[4]),
                });
            }
            data.insert("points".into(), serde_json::to_value(points)?);
        }
        "spectrum" => {
            width(7)?;
            let mut eig = Vec::new();
            let mut eps = Vec::new();
            let mut flags = Vec::new();
            for r in &rows {
                eig.push(C64::new(field(r[1], "number")?, field(r[2], "number")?));
                eps.push(C64::new(field(r[4], "number")?, field(r[5], "number")?));
                flags.push(field::<bool>(r[6], "flag")?);
            }
            data.insert("eigenvalues".into(), serde_json::to_value(eig)?);
            data.insert("quasi_energies".into(), serde_json::to_value(eps)?);
            data.insert("on_unit_circle".into(), serde_json::to_value(flags)?);
        }
        "phase-map" => {
            width(6)?;
            let n1 = data.get("axis1").and_then(Value::as_array).map_or(0, Vec::len);
            let n2 = data.get("axis2").and_then(Value::as_array).map_or(0, Vec::len);
            let mut presence = vec![vec![false; n2]; n1];
            let mut ratio = vec![vec![0.0f64; n2]; n1];
            for r in &rows {
                let (i, j): (usize, usize) = (field(r[0], "row index")?, field(r[1], "column index")?);
                if i >= n1 || j >= n2 {
                    return Err(ReportError::Malformed(format!("cell ({i}, {j}) outside the grid")));
                }
                presence[i][j] = field(r[4], "flag")?;
                ratio[i][j] = field(r[5], "number")?;
            }
            data.insert("presence".into(), serde_json::to_value(presence)?);
            data.insert("ratio".into(), serde_json::to_value(ratio)?);
        }
        "symmetry" => {
            width(4)?;
            let mut out = Vec::new();
            for r in &rows {
                let symmetry = match r[0] {
                    "P" => SymmetryKind::P,
                    "T" => SymmetryKind::T,
                    "PT" => SymmetryKind::PT,
                    other => return Err(ReportError::Malformed(format!("unknown symmetry '{other}'"))),
                };
                out.push(SymmetryRow {
                    symmetry,
                    operator_residual: field(r[1], "number")?,
                    eigenvector_residual: opt_field(r[2], "number")?,
                    pairing_defect: opt_field(r[3], "number")?,
                });
            }
            data.insert("rows".into(), serde_json::to_value(out)?);
        }
        "ensemble" => return Err(ReportError::Lossy("ensemble")),
        "verify" => return Err(ReportError::Lossy("verify")),
        other => return Err(ReportError::Malformed(format!("unknown payload type '{other}'"))),
    }
    Ok(serde_json::from_value(head)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Cli;
    use clap::Parser;
    use qwalk_core::dispersion::band_scan;

    fn envelope(payload: Payload) -> ReportEnvelope {
        let cli = Cli::parse_from(["qwalk", "verify"]);
        ReportEnvelope { tool_version: TOOL_VERSION.into(), timestamp: None, config: RunConfig::new(cli.command), payload }
    }

    #[test]
    fn two_point_scan_gives_header_and_two_rows() {
        let s = band_scan(WalkKind::U1Pt, 1.0, -0.2, 0.3, 2).unwrap();
        let csv = serialize(&envelope(Payload::BandScan(s)), Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("# {"));
        assert!(lines[1].starts_with("k,re_eps_plus,im_eps_plus,re_eps_minus"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn band_scan_round_trips_through_both_formats() {
        let s = band_scan(WalkKind::U2Trs, 1.0, -0.2, 0.3, 33).unwrap();
        let env = envelope(Payload::BandScan(s));
        for f in [Format::Json, Format::Csv] {
            assert_eq!(parse(&serialize(&env, f), f).unwrap(), env, "{f:?}");
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        for x in [std::f64::consts::PI, -1e-300, 5e-324, f64::MAX, -0.0] {
            let back: f64 = num(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn summary_tables_refuse_to_parse() {
        let v = VerifyReport { bloch: vec![], elemental: None, frame: None, passed: true };
        let csv = serialize(&envelope(Payload::Verify(v)), Format::Csv);
        assert!(matches!(parse(&csv, Format::Csv), Err(ReportError::Lossy("verify"))));
        assert!(parse("k,x\n", Format::Csv).is_err());
    }
}
