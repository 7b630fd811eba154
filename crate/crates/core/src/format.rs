//! Input documents and report rendering.
//!
//! Integers in documents are decimal strings so that large values survive
//! transport; plain JSON numbers are accepted on input as well.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::json;

use crate::abgroup::GroupExpr;
use crate::catalog::{Assertions, CustomSurface, SurfaceClass};
use crate::error::{Error, Result};
use crate::exactalg::{IntMatrix, IntPolynomial};
use crate::ffcount::{HomogeneousForm, Term};
use crate::ktheory::KGroupReport;
use crate::motivic::{EtaleModel, FrobeniusModel, MotivicTable, SurfaceDescriptor, MAX_DEGREE};
use crate::oracle::CheckReport;
use crate::weil::{prime_power_base, PointCounts, WeilPolynomial, WeilReport};

pub const CONDITIONAL_NOTE: &str = "conditional on Parshin's conjecture";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::InvalidInput(format!("unknown output format {s:?}"))),
        }
    }
}

/// An integer written as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dec(pub BigInt);

impl Dec {
    pub fn to_u64(&self, what: &str) -> Result<u64> {
        self.0.to_u64().ok_or_else(|| {
            Error::InvalidInput(format!(
                "{what} must be a non-negative 64-bit integer, got {}",
                self.0
            ))
        })
    }

    pub fn to_u32(&self, what: &str) -> Result<u32> {
        self.0.to_u32().ok_or_else(|| {
            Error::InvalidInput(format!(
                "{what} must be a non-negative 32-bit integer, got {}",
                self.0
            ))
        })
    }
}

impl<T: Into<BigInt>> From<T> for Dec {
    fn from(v: T) -> Self {
        Dec(v.into())
    }
}

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
            U(u64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => BigInt::from_str(s.trim())
                .map(Dec)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal integer: {s:?}"))),
            Raw::I(v) => Ok(Dec(v.into())),
            Raw::U(v) => Ok(Dec(v.into())),
        }
    }
}

type MatrixDoc = Vec<Vec<Dec>>;

fn matrix_from_doc(doc: &MatrixDoc) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = doc
        .iter()
        .map(|r| r.iter().map(|d| d.0.clone()).collect())
        .collect();
    IntMatrix::from_rows(&rows)
}

fn matrix_to_doc(m: &IntMatrix) -> MatrixDoc {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Dec).collect())
        .collect()
}

fn poly_from_doc(doc: &[Dec]) -> IntPolynomial {
    IntPolynomial::new(doc.iter().map(|d| d.0.clone()).collect())
}

fn poly_to_doc(p: &IntPolynomial) -> Vec<Dec> {
    p.coeffs().iter().cloned().map(Dec).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum FrobeniusDoc {
    Charpoly {
        coefficients: Vec<Dec>,
    },
    H2lattice {
        matrix: MatrixDoc,
    },
    Picard {
        matrix: MatrixDoc,
        #[serde(default)]
        torsion: Vec<Dec>,
    },
}

impl FrobeniusDoc {
    pub fn to_model(&self, q: u64) -> Result<FrobeniusModel> {
        Ok(match self {
            FrobeniusDoc::Charpoly { coefficients } => FrobeniusModel::CharPolyOnly(
                WeilPolynomial::new(poly_from_doc(coefficients), 2, q)?,
            ),
            FrobeniusDoc::H2lattice { matrix } => {
                FrobeniusModel::H2Lattice(matrix_from_doc(matrix)?)
            }
            FrobeniusDoc::Picard { matrix, torsion } => FrobeniusModel::PicardLattice {
                action: matrix_from_doc(matrix)?,
                torsion: torsion
                    .iter()
                    .map(|t| t.to_u64("torsion order"))
                    .collect::<Result<_>>()?,
            },
        })
    }

    pub fn from_model(model: &FrobeniusModel) -> Self {
        match model {
            FrobeniusModel::CharPolyOnly(wp) => FrobeniusDoc::Charpoly {
                coefficients: poly_to_doc(&wp.poly),
            },
            FrobeniusModel::H2Lattice(f) => FrobeniusDoc::H2lattice {
                matrix: matrix_to_doc(f),
            },
            FrobeniusModel::PicardLattice { action, torsion } => FrobeniusDoc::Picard {
                matrix: matrix_to_doc(action),
                torsion: torsion.iter().map(|&t| Dec::from(t)).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum EtaleDoc {
    Charpoly { coefficients: Vec<Dec> },
    Lattice { matrix: MatrixDoc },
}

impl EtaleDoc {
    fn to_model(&self, weight: u32, q: u64) -> Result<EtaleModel> {
        Ok(match self {
            EtaleDoc::Charpoly { coefficients } => {
                EtaleModel::CharPoly(WeilPolynomial::new(poly_from_doc(coefficients), weight, q)?)
            }
            EtaleDoc::Lattice { matrix } => EtaleModel::Lattice(matrix_from_doc(matrix)?),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssertionsDoc {
    pub rational_diagonal_decomposition: bool,
    pub abelian_type: bool,
    pub unirational: bool,
    pub shioda_supersingular: bool,
}

impl From<&AssertionsDoc> for Assertions {
    fn from(a: &AssertionsDoc) -> Self {
        Assertions {
            rational_diagonal_decomposition: a.rational_diagonal_decomposition,
            abelian_type: a.abelian_type,
            unirational: a.unirational,
            shioda_supersingular: a.shioda_supersingular,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: Dec,
    pub exps: [u32; 4],
}

/// A surface (or curve) description as read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub q: Dec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Dec>,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Dec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<FrobeniusDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ch0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<EtaleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h3: Option<EtaleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometrically_irreducible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_geometric: Option<Dec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertions: Option<AssertionsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<TermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<Vec<Dec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tate: Option<MatrixDoc>,
}

/// Parsed input: a surface class over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceInput {
    pub q: u64,
    pub class: SurfaceClass,
}

impl SurfaceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("surface document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    fn need<'a, T>(&self, v: &'a Option<T>, field: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| {
            Error::InvalidInput(format!("class {:?} needs the field {field:?}", self.class))
        })
    }

    pub fn to_input(&self) -> Result<SurfaceInput> {
        let q = self.q.to_u64("q")?;
        let (p, _) = prime_power_base(q)?;
        if let Some(given) = &self.p {
            if given.to_u64("p")? != p {
                return Err(Error::InvalidInput(format!(
                    "p = {} does not match q = {q}",
                    given.0
                )));
            }
        }
        let assertions = self
            .assertions
            .as_ref()
            .map(Assertions::from)
            .unwrap_or_default();
        let class = match self.class.as_str() {
            "projective_plane" | "p2" => SurfaceClass::ProjectivePlane,
            "quadric" | "smooth_quadric" => SurfaceClass::SmoothQuadric,
            "fermat" => SurfaceClass::FermatSurface {
                d: self.need(&self.d, "d")?.to_u32("d")?,
            },
            "hypersurface" => {
                let terms = self
                    .need(&self.form, "form")?
                    .iter()
                    .map(|t| {
                        Ok(Term {
                            coeff: t.coeff.to_u32("coefficient")?,
                            exps: t.exps,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                SurfaceClass::HypersurfaceP3 {
                    form: HomogeneousForm::new(terms)?,
                    assertions,
                }
            }
            "k3" => SurfaceClass::K3 {
                model: self.need(&self.frobenius, "frobenius")?.to_model(q)?,
                rho_geometric: self
                    .rho_geometric
                    .as_ref()
                    .map(|r| r.to_u32("rho_geometric"))
                    .transpose()?,
                assertions,
            },
            "enriques" => match self.need(&self.frobenius, "frobenius")? {
                FrobeniusDoc::Picard { matrix, .. } => SurfaceClass::Enriques {
                    action: matrix_from_doc(matrix)?,
                },
                _ => {
                    return Err(Error::InvalidInput(
                        "an Enriques surface needs a picard-mode action".into(),
                    ))
                }
            },
            "curve" => SurfaceClass::CurveFromZeta {
                p1: WeilPolynomial::new(poly_from_doc(self.need(&self.p1, "p1")?), 1, q)?,
                tate: self.tate.as_ref().map(matrix_from_doc).transpose()?,
            },
            "custom" => SurfaceClass::Custom(Box::new(CustomSurface {
                frobenius: self.need(&self.frobenius, "frobenius")?.to_model(q)?,
                pic: parse_group(self.pic.as_deref(), "Pic(X)")?,
                ch0: parse_group(self.ch0.as_deref(), "CH_0(X)")?,
                h1: self.h1.as_ref().map(|h| h.to_model(1, q)).transpose()?,
                h3: self.h3.as_ref().map(|h| h.to_model(3, q)).transpose()?,
                geometrically_irreducible: self.geometrically_irreducible.unwrap_or(true),
                assertions,
            })),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown surface class {other:?}"
                )))
            }
        };
        Ok(SurfaceInput { q, class })
    }
}

fn parse_group(s: Option<&str>, default: &str) -> Result<GroupExpr> {
    s.unwrap_or(default).parse()
}

/// Point counts `N_1, N_2, ...` over `F_q, F_{q^2}, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsDoc {
    pub q: Dec,
    pub counts: Vec<Dec>,
}

impl CountsDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("counts document: {e}")))
    }

    pub fn from_counts(c: &PointCounts) -> Self {
        CountsDoc {
            q: Dec::from(c.q),
            counts: c.counts.iter().cloned().map(Dec).collect(),
        }
    }

    pub fn to_counts(&self) -> Result<PointCounts> {
        PointCounts::new(
            self.q.to_u64("q")?,
            self.counts.iter().map(|d| d.0.clone()).collect(),
        )
    }
}

fn status_line(desc: &SurfaceDescriptor) -> String {
    format!("Parshin status: {}", desc.parshin)
}

fn header(desc: &SurfaceDescriptor) -> Vec<String> {
    vec![
        format!("surface: {} over F_{}", desc.class, desc.q),
        format!(
            "Frobenius model: {} (rank {})",
            desc.frobenius.mode_name(),
            desc.b2
        ),
        status_line(desc),
    ]
}

fn cell_text(group: &GroupExpr, conditional: bool) -> String {
    if conditional {
        format!("{group} *")
    } else {
        group.to_string()
    }
}

fn status_value(desc: &SurfaceDescriptor, conditional: bool) -> String {
    if conditional {
        CONDITIONAL_NOTE.into()
    } else {
        match &desc.parshin {
            crate::catalog::ParshinStatus::Known { reason, .. } => reason.tag().into(),
            crate::catalog::ParshinStatus::Conjectural => "unconditional".into(),
        }
    }
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn json_string(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn render_table(desc: &SurfaceDescriptor, table: &MotivicTable, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Text => {
            let mut lines = header(desc);
            lines.push(format!("table mode: {:?}", table.mode));
            let mut grid: Vec<Vec<String>> = vec![std::iter::once("n".to_string())
                .chain((0..=MAX_DEGREE).map(|i| format!("H^{i}")))
                .collect()];
            for n in 0..=table.n_max {
                let mut row = vec![n.to_string()];
                for i in 0..=MAX_DEGREE {
                    let e = table.get(i, n).expect("cell");
                    row.push(cell_text(&e.group, e.conditional));
                }
                grid.push(row);
            }
            let widths: Vec<usize> = (0..grid[0].len())
                .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
                .collect();
            for row in grid {
                let cells: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
                    .collect();
                lines.push(cells.join(" | ").trim_end().to_string());
            }
            for note in &table.notes {
                lines.push(format!("note: {note}"));
            }
            lines.join("\n") + "\n"
        }
        OutputFormat::Json => {
            let cells: Vec<_> = table
                .cells
                .iter()
                .map(|(&(n, i), e)| {
                    json!({
                        "n": n,
                        "i": i,
                        "group": e.group.to_string(),
                        "provenance": e.provenance,
                        "status": status_value(desc, e.conditional),
                        "summands": e.parts.iter().map(|s| json!({"label": s.label, "group": s.group.to_string()})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_string(json!({
                "surface": desc.class.to_string(),
                "q": desc.q.to_string(),
                "frobenius": desc.frobenius.mode_name(),
                "parshin": desc.parshin.to_string(),
                "mode": format!("{:?}", table.mode),
                "cells": cells,
                "notes": table.notes,
            }))
        }
        OutputFormat::Csv => csv_string(
            &["n", "i", "group", "provenance"],
            table
                .cells
                .iter()
                .map(|(&(n, i), e)| {
                    let prov = if e.conditional {
                        format!("{} ({CONDITIONAL_NOTE})", e.provenance)
                    } else {
                        e.provenance.clone()
                    };
                    vec![n.to_string(), i.to_string(), e.group.to_string(), prov]
                })
                .collect(),
        ),
    }
}

pub fn render_k_report(
    desc: &SurfaceDescriptor,
    report: &KGroupReport,
    fmt: OutputFormat,
) -> String {
    match fmt {
        OutputFormat::Text => {
            let mut lines = header(desc);
            for k in report.groups.values() {
                let mut line = format!("K_{} = {}", k.n, k.group);
                if k.conditional {
                    line.push_str(&format!("  [{CONDITIONAL_NOTE}]"));
                }
                lines.push(line);
                if k.summands.len() > 1 {
                    for s in &k.summands {
                        lines.push(format!("    {}: {}", s.label, s.group));
                    }
                }
            }
            for note in &report.notes {
                lines.push(format!("note: {note}"));
            }
            lines.join("\n") + "\n"
        }
        OutputFormat::Json => {
            let groups: Vec<_> = report
                .groups
                .values()
                .map(|k| {
                    json!({
                        "n": k.n,
                        "group": k.group.to_string(),
                        "status": status_value(desc, k.conditional),
                        "summands": k.summands.iter().map(|s| json!({"label": s.label, "group": s.group.to_string()})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_string(json!({
                "surface": desc.class.to_string(),
                "q": desc.q.to_string(),
                "parshin": desc.parshin.to_string(),
                "k_groups": groups,
                "notes": report.notes,
            }))
        }
        OutputFormat::Csv => csv_string(
            &["n", "group", "summands"],
            report
                .groups
                .values()
                .map(|k| {
                    let parts: Vec<String> = k
                        .summands
                        .iter()
                        .map(|s| format!("{}: {}", s.label, s.group))
                        .collect();
                    vec![k.n.to_string(), k.group.to_string(), parts.join("; ")]
                })
                .collect(),
        ),
    }
}

/// K-groups of a curve, `(n, K_n)` pairs.
pub fn render_curve_k(q: u64, groups: &[(u32, GroupExpr)], fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Text => {
            let mut out = format!(
                "curve over F_{q}\nParshin status: unconditional (abelian-type-dim<=3; curve)\n"
            );
            for (n, g) in groups {
                out.push_str(&format!("K_{n} = {g}\n"));
            }
            out
        }
        OutputFormat::Json => json_string(json!({
            "q": q.to_string(),
            "k_groups": groups.iter().map(|(n, g)| json!({"n": n, "group": g.to_string()})).collect::<Vec<_>>(),
        })),
        OutputFormat::Csv => csv_string(
            &["n", "group"],
            groups
                .iter()
                .map(|(n, g)| vec![n.to_string(), g.to_string()])
                .collect(),
        ),
    }
}

pub fn render_counts(counts: &PointCounts, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Text => counts
            .counts
            .iter()
            .enumerate()
            .map(|(r, n)| format!("N_{} = {n}\n", r + 1))
            .collect(),
        OutputFormat::Json => {
            json_string(serde_json::to_value(CountsDoc::from_counts(counts)).expect("serializable"))
        }
        OutputFormat::Csv => csv_string(
            &["r", "count"],
            counts
                .counts
                .iter()
                .enumerate()
                .map(|(r, n)| vec![(r + 1).to_string(), n.to_string()])
                .collect(),
        ),
    }
}

pub fn render_weil(wp: &WeilPolynomial, report: &WeilReport, fmt: OutputFormat) -> String {
    let checks: Vec<&str> = report.passed.iter().map(|c| c.name()).collect();
    match fmt {
        OutputFormat::Text => {
            let mut out = format!("P(T) = {}\nweight {} over F_{}\n", wp.poly, wp.weight, wp.q);
            if let Some(e) = report.epsilon {
                out.push_str(&format!("sign of functional equation: {e}\n"));
            }
            out.push_str(&format!("checks passed: {}\n", checks.join(", ")));
            out
        }
        OutputFormat::Json => json_string(json!({
            "q": wp.q.to_string(),
            "weight": wp.weight,
            "coefficients": wp.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "epsilon": report.epsilon,
            "checks": checks,
        })),
        OutputFormat::Csv => csv_string(
            &["k", "coefficient"],
            wp.poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| vec![k.to_string(), c.to_string()])
                .collect(),
        ),
    }
}

pub fn render_check(report: &CheckReport, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Text => {
            let mut out = format!("seed {}\n", report.seed);
            for (identity, (ok, total)) in report.summary() {
                let verdict = if ok == total { "PASS" } else { "FAIL" };
                out.push_str(&format!("{verdict} {identity}: {ok}/{total}\n"));
            }
            for c in report.cases.iter().filter(|c| !c.passed) {
                out.push_str(&format!(
                    "failed {}: {} ({})\n",
                    c.identity, c.input, c.detail
                ));
            }
            out
        }
        OutputFormat::Json => json_string(json!({
            "seed": report.seed.to_string(),
            "all_passed": report.all_passed(),
            "cases": report.cases.iter().map(|c| json!({
                "identity": c.identity, "input": c.input, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })),
        OutputFormat::Csv => csv_string(
            &["identity", "input", "passed", "detail"],
            report
                .cases
                .iter()
                .map(|c| {
                    vec![
                        c.identity.clone(),
                        c.input.clone(),
                        c.passed.to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect(),
        ),
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}
