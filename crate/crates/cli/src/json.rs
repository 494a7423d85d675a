//! JSON forms of polynomials, quivers, traces, stable reports and shapes.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use stable_cluster_core::engine::MutationTrace;
use stable_cluster_core::pyramids::{ColorScheme, PyramidShape, Role, ShapeKind};
use stable_cluster_core::stabilize::StableReport;
use stable_cluster_core::{Exponents, Polynomial, Quiver};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        PolynomialJson {
            nvars: p.nvars(),
            terms: p
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermJson { coeff: c.to_string(), exp: e.as_slice().to_vec() })
                .collect(),
        }
    }
}

impl TryFrom<&PolynomialJson> for Polynomial {
    type Error = anyhow::Error;

    fn try_from(j: &PolynomialJson) -> anyhow::Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let c: BigInt = t.coeff.parse().map_err(|_| anyhow::anyhow!("bad coefficient {:?}", t.coeff))?;
            terms.push((Exponents::from(t.exp.clone()), c));
        }
        Ok(Polynomial::from_terms(j.nvars, terms)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub n: usize,
    pub arrows: Vec<Vec<u64>>,
}

impl From<&Quiver> for QuiverJson {
    fn from(q: &Quiver) -> Self {
        QuiverJson { n: q.n(), arrows: q.arrow_rows() }
    }
}

impl TryFrom<&QuiverJson> for Quiver {
    type Error = anyhow::Error;

    fn try_from(j: &QuiverJson) -> anyhow::Result<Self> {
        if j.arrows.len() != 2 * j.n {
            anyhow::bail!("quiver with n = {} needs {} rows, found {}", j.n, 2 * j.n, j.arrows.len());
        }
        Ok(Quiver::from_arrows(&j.arrows)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecordJson {
    pub k: usize,
    #[serde(rename = "F")]
    pub f: PolynomialJson,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quiver: Option<QuiverJson>,
}

pub fn trace_json(trace: &MutationTrace) -> Vec<TraceRecordJson> {
    trace
        .records
        .iter()
        .map(|r| TraceRecordJson { k: r.k, f: (&r.f).into(), c: r.c.rows(), quiver: r.quiver.as_ref().map(Into::into) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableTermJson {
    pub exp: Vec<i64>,
    pub coeff: String,
    pub first_stable_step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableReportJson {
    pub degree_cap: i64,
    pub period: usize,
    pub window: usize,
    pub phase: usize,
    pub horizon: usize,
    pub terms: Vec<StableTermJson>,
}

impl From<&StableReport> for StableReportJson {
    fn from(r: &StableReport) -> Self {
        StableReportJson {
            degree_cap: r.degree_cap,
            period: r.period,
            window: r.window,
            phase: r.phase,
            horizon: r.horizon,
            terms: r
                .terms
                .iter()
                .map(|t| StableTermJson {
                    exp: t.exp.as_slice().to_vec(),
                    coeff: t.coeff.to_string(),
                    first_stable_step: t.first_stable_step,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoneJson {
    pub j: usize,
    pub r: usize,
    pub p: usize,
    pub role: String,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeJson {
    pub kind: String,
    pub k: usize,
    pub stones: Vec<StoneJson>,
    /// `[lower, upper]`: stone `upper` rests on stone `lower`.
    pub supports: Vec<[usize; 2]>,
}

pub fn kind_name(kind: ShapeKind) -> &'static str {
    match kind {
        ShapeKind::Row => "row",
        ShapeKind::Aztec2 => "ad2",
        ShapeKind::Aztec4 => "ad4",
    }
}

pub fn shape_json(shape: &PyramidShape, scheme: ColorScheme) -> ShapeJson {
    ShapeJson {
        kind: kind_name(shape.kind).to_string(),
        k: shape.k,
        stones: shape
            .stones
            .iter()
            .map(|s| StoneJson {
                j: s.layer,
                r: s.row,
                p: s.pos,
                role: match s.role {
                    Role::White => "white".into(),
                    Role::Black => "black".into(),
                },
                color: scheme.variable(s),
            })
            .collect(),
        supports: shape.above.iter().enumerate().flat_map(|(i, ups)| ups.iter().map(move |&u| [i, u])).collect(),
    }
}
