//! JSON documents.
//!
//! A field element is either one rational string `"p/q"` (or an integer) or
//! an array of `D` such strings, its power-basis coordinates. Output uses
//! the bare string for degree-1 fields and the array otherwise. Polynomial
//! coefficients are JSON integers, or strings when they exceed `i64`.
//!
//! ```json
//! {
//!   "field": {"min_poly": [-2, 0, 1], "interval": ["1", "2"]},
//!   "triples": {"strip": {"polyhedron": {"dim": 2, "halfspaces": [...]},
//!                         "quasilattice": {"generators": [...]}}},
//!   "subspaces": {"k": {"k_basis": [...], "quotient_basis": [...]}},
//!   "reductions": {"golden": {"triple": "strip", "subspace": "k", "level": ["0"]}}
//! }
//! ```
//!
//! A single-triple document puts `polyhedron` and `quasilattice` at top level;
//! that triple is named `main`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delzant::{Diagnostic, DiscreteGroupPresentation, ValidationReport, VertexChart};
use crate::field::{Field, FieldElem, FieldSpec};
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::quasilattice::{Quasilattice, SubgroupClass};
use crate::reduction::{IsotropyReport, IsotropyWitness, ReducedSpaceKind, ReductionResult, SubspaceData};
use crate::DelzantTriple;

pub const SINGLE_TRIPLE_NAME: &str = "main";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn invalid(path: impl Into<String>, message: impl ToString) -> IoError {
    IoError::Invalid { path: path.into(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRepr {
    Scalar(Scalar),
    Coords(Vec<Scalar>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub min_poly: Vec<Scalar>,
    pub interval: [Scalar; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpaceDoc {
    pub normal: Vec<ElemRepr>,
    pub offset: ElemRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronDoc {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpaceDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasilatticeDoc {
    pub generators: Vec<Vec<ElemRepr>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDoc {
    pub polyhedron: PolyhedronDoc,
    pub quasilattice: QuasilatticeDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub k_basis: Vec<Vec<ElemRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient_basis: Option<Vec<Vec<ElemRepr>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRequestDoc {
    pub triple: String,
    pub subspace: String,
    pub level: Vec<ElemRepr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentDoc {
    pub field: FieldDoc,
    #[serde(default)]
    pub triples: BTreeMap<String, TripleDoc>,
    #[serde(default)]
    pub subspaces: BTreeMap<String, SubspaceDoc>,
    #[serde(default)]
    pub reductions: BTreeMap<String, ReductionRequestDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyhedron: Option<PolyhedronDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasilattice: Option<QuasilatticeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionRequest {
    pub triple: String,
    pub subspace: String,
    pub level: Vec<FieldElem>,
}

/// A parsed document with every reference resolved.
#[derive(Debug, Clone)]
pub struct Document {
    pub field: Field,
    pub triples: BTreeMap<String, DelzantTriple>,
    pub subspaces: BTreeMap<String, SubspaceData>,
    pub reductions: BTreeMap<String, ReductionRequest>,
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

fn scalar_rational(s: &Scalar, path: &str) -> Result<BigRational, IoError> {
    match s {
        Scalar::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
        Scalar::Str(t) => parse_rational(t).ok_or_else(|| invalid(path, format!("not a rational number: {t:?}"))),
    }
}

fn scalar_int(s: &Scalar, path: &str) -> Result<BigInt, IoError> {
    let q = scalar_rational(s, path)?;
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(invalid(path, "expected an integer"))
    }
}

pub fn parse_elem(field: &Field, e: &ElemRepr, path: &str) -> Result<FieldElem, IoError> {
    match e {
        ElemRepr::Scalar(s) => Ok(field.rational(scalar_rational(s, path)?)),
        ElemRepr::Coords(cs) => {
            let coords = cs
                .iter()
                .enumerate()
                .map(|(i, c)| scalar_rational(c, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            field.from_coords(coords).map_err(|e| invalid(path, e))
        }
    }
}

pub fn parse_vector(field: &Field, v: &[ElemRepr], path: &str) -> Result<Vec<FieldElem>, IoError> {
    v.iter().enumerate().map(|(i, e)| parse_elem(field, e, &format!("{path}[{i}]"))).collect()
}

fn parse_vectors(field: &Field, vs: &[Vec<ElemRepr>], path: &str) -> Result<Vec<Vec<FieldElem>>, IoError> {
    vs.iter().enumerate().map(|(i, v)| parse_vector(field, v, &format!("{path}[{i}]"))).collect()
}

pub fn parse_field(doc: &FieldDoc) -> Result<Field, IoError> {
    let min_poly = doc
        .min_poly
        .iter()
        .enumerate()
        .map(|(i, c)| scalar_int(c, &format!("field.min_poly[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let lo = scalar_rational(&doc.interval[0], "field.interval[0]")?;
    let hi = scalar_rational(&doc.interval[1], "field.interval[1]")?;
    Field::new(FieldSpec::new(min_poly, lo, hi)).map_err(|e| invalid("field", e))
}

pub fn parse_triple(field: &Field, doc: &TripleDoc, path: &str) -> Result<DelzantTriple, IoError> {
    let pp = format!("{path}.polyhedron");
    let hs = doc
        .polyhedron
        .halfspaces
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let hp = format!("{pp}.halfspaces[{i}]");
            Ok(HalfSpace::new(
                parse_vector(field, &h.normal, &format!("{hp}.normal"))?,
                parse_elem(field, &h.offset, &format!("{hp}.offset"))?,
            ))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let dim = doc.polyhedron.dim;
    let poly = Polyhedron::new(field, dim, hs).map_err(|e| invalid(&pp, e))?;
    let qp = format!("{path}.quasilattice");
    let gens = parse_vectors(field, &doc.quasilattice.generators, &format!("{qp}.generators"))?;
    let q = Quasilattice::new(field, dim, gens).map_err(|e| invalid(&qp, e))?;
    DelzantTriple::new(poly, q).map_err(|e| invalid(path, e))
}

pub fn parse_subspace(field: &Field, doc: &SubspaceDoc, path: &str) -> Result<SubspaceData, IoError> {
    let k = parse_vectors(field, &doc.k_basis, &format!("{path}.k_basis"))?;
    let qb = doc
        .quotient_basis
        .as_ref()
        .map(|qb| parse_vectors(field, qb, &format!("{path}.quotient_basis")))
        .transpose()?;
    let n = k.first().map(Vec::len).ok_or_else(|| invalid(path, "k_basis is empty"))?;
    SubspaceData::new(field, n, k, qb).map_err(|e| invalid(path, e))
}

pub fn parse_document(text: &str) -> Result<Document, IoError> {
    let doc: DocumentDoc = serde_json::from_str(text)?;
    let field = parse_field(&doc.field)?;
    let mut triples = BTreeMap::new();
    match (&doc.polyhedron, &doc.quasilattice) {
        (Some(p), Some(q)) => {
            let t = TripleDoc { polyhedron: p.clone(), quasilattice: q.clone() };
            triples.insert(SINGLE_TRIPLE_NAME.to_string(), parse_triple(&field, &t, SINGLE_TRIPLE_NAME)?);
        }
        (None, None) => {}
        _ => return Err(invalid("document", "polyhedron and quasilattice must appear together")),
    }
    for (name, t) in &doc.triples {
        if triples.contains_key(name) {
            return Err(invalid(format!("triples.{name}"), "duplicate triple name"));
        }
        triples.insert(name.clone(), parse_triple(&field, t, &format!("triples.{name}"))?);
    }
    let mut subspaces = BTreeMap::new();
    for (name, s) in &doc.subspaces {
        subspaces.insert(name.clone(), parse_subspace(&field, s, &format!("subspaces.{name}"))?);
    }
    let mut reductions = BTreeMap::new();
    for (name, r) in &doc.reductions {
        let path = format!("reductions.{name}");
        let t = triples
            .get(&r.triple)
            .ok_or_else(|| invalid(format!("{path}.triple"), format!("no triple named {:?}", r.triple)))?;
        let s = subspaces
            .get(&r.subspace)
            .ok_or_else(|| invalid(format!("{path}.subspace"), format!("no subspace named {:?}", r.subspace)))?;
        if s.n() != t.dim() {
            return Err(invalid(&path, format!("subspace dimension {} differs from triple dimension {}", s.n(), t.dim())));
        }
        let level = parse_vector(&field, &r.level, &format!("{path}.level"))?;
        if level.len() != s.k() {
            return Err(invalid(format!("{path}.level"), format!("expected {} entries", s.k())));
        }
        reductions.insert(name.clone(), ReductionRequest { triple: r.triple.clone(), subspace: r.subspace.clone(), level });
    }
    Ok(Document { field, triples, subspaces, reductions })
}

/// `"1/2,0"` or a JSON array of elements.
pub fn parse_level(field: &Field, text: &str) -> Result<Vec<FieldElem>, IoError> {
    let text = text.trim();
    if text.starts_with('[') {
        let v: Vec<ElemRepr> = serde_json::from_str(text)?;
        return parse_vector(field, &v, "level");
    }
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s)
                .map(|q| field.rational(q))
                .ok_or_else(|| invalid(format!("level[{i}]"), format!("not a rational number: {s:?}")))
        })
        .collect()
}

// Output.

fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn int_scalar(i: &BigInt) -> Scalar {
    i.to_i64().map_or_else(|| Scalar::Str(i.to_string()), Scalar::Int)
}

pub fn elem_repr(e: &FieldElem) -> ElemRepr {
    if e.field().degree() == 1 {
        ElemRepr::Scalar(Scalar::Str(rational_string(&e.coords()[0])))
    } else {
        ElemRepr::Coords(e.coords().iter().map(|c| Scalar::Str(rational_string(c))).collect())
    }
}

pub fn vector_repr(v: &[FieldElem]) -> Vec<ElemRepr> {
    v.iter().map(elem_repr).collect()
}

fn vectors_repr(vs: &[Vec<FieldElem>]) -> Vec<Vec<ElemRepr>> {
    vs.iter().map(|v| vector_repr(v)).collect()
}

pub fn field_doc(field: &Field) -> FieldDoc {
    let s = field.spec();
    FieldDoc {
        min_poly: s.min_poly.iter().map(int_scalar).collect(),
        interval: [Scalar::Str(rational_string(&s.lo)), Scalar::Str(rational_string(&s.hi))],
    }
}

pub fn polyhedron_doc(p: &Polyhedron) -> PolyhedronDoc {
    PolyhedronDoc {
        dim: p.dim_ambient(),
        halfspaces: p
            .halfspaces()
            .iter()
            .map(|h| HalfSpaceDoc { normal: vector_repr(&h.normal), offset: elem_repr(&h.offset) })
            .collect(),
    }
}

pub fn triple_doc(t: &DelzantTriple) -> TripleDoc {
    TripleDoc {
        polyhedron: polyhedron_doc(t.polyhedron()),
        quasilattice: QuasilatticeDoc { generators: vectors_repr(t.quasilattice().generators()) },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationOut {
    pub triple: String,
    pub valid: bool,
    pub ambient_dim: usize,
    pub dimension: Option<usize>,
    pub pointed: bool,
    pub simple: bool,
    pub quasirational: bool,
    pub smooth: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl ValidationOut {
    pub fn new(name: &str, r: &ValidationReport) -> Self {
        ValidationOut {
            triple: name.to_string(),
            valid: r.is_valid(),
            ambient_dim: r.ambient_dim,
            dimension: r.dimension,
            pointed: r.pointed,
            simple: r.simple,
            quasirational: r.quasirational,
            smooth: r.smooth,
            diagnostics: r.diagnostics.iter().map(Diagnostic::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaOut {
    pub rank: usize,
    pub generators: Vec<Vec<ElemRepr>>,
    pub is_trivial: bool,
    pub is_finite: bool,
    pub order: Option<String>,
}

impl GammaOut {
    pub fn new(g: &DiscreteGroupPresentation) -> Self {
        GammaOut {
            rank: g.rank_n,
            generators: vectors_repr(&g.generators),
            is_trivial: g.is_trivial,
            is_finite: g.is_finite,
            order: g.order.as_ref().map(ToString::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityOut {
    pub index: usize,
    pub coeffs: Vec<ElemRepr>,
    pub constant: ElemRepr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartOut {
    pub vertex: Vec<ElemRepr>,
    pub vertex_approx: Vec<f64>,
    pub tight: Vec<usize>,
    pub order: Vec<usize>,
    pub a_coeffs: Vec<Vec<ElemRepr>>,
    pub inequalities: Vec<InequalityOut>,
    pub gamma: GammaOut,
}

impl ChartOut {
    pub fn new(c: &VertexChart) -> Self {
        ChartOut {
            vertex: vector_repr(&c.vertex),
            vertex_approx: c.vertex.iter().map(FieldElem::to_f64).collect(),
            tight: c.tight.clone(),
            order: c.order.clone(),
            a_coeffs: vectors_repr(&c.a_coeffs),
            inequalities: c
                .inequalities
                .iter()
                .map(|i| InequalityOut { index: i.index, coeffs: vector_repr(&i.coeffs), constant: elem_repr(&i.constant) })
                .collect(),
            gamma: GammaOut::new(&c.gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasOut {
    pub triple: String,
    pub charts: Vec<ChartOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessOut {
    Dimension { dim: usize, expected: usize },
    NonSimpleVertex { vertex: Vec<ElemRepr>, tight: Vec<usize> },
    ZeroNormal { index: usize },
    Touching { index: usize, vertex: Option<Vec<ElemRepr>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyOut {
    pub passed: bool,
    pub dim: usize,
    pub expected_dim: usize,
    pub dim_check: bool,
    pub simple_check: bool,
    pub uniqueness_check: bool,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub touching: Vec<usize>,
    pub witnesses: Vec<WitnessOut>,
}

impl IsotropyOut {
    pub fn new(r: &IsotropyReport) -> Self {
        IsotropyOut {
            passed: r.passed,
            dim: r.dim,
            expected_dim: r.expected_dim,
            dim_check: r.dim_check,
            simple_check: r.simple_check,
            uniqueness_check: r.uniqueness_check,
            kept: r.kept.clone(),
            discarded: r.discarded.clone(),
            touching: r.touching.clone(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| match w {
                    IsotropyWitness::Dimension { dim, expected } => WitnessOut::Dimension { dim: *dim, expected: *expected },
                    IsotropyWitness::NonSimpleVertex { vertex, tight } => {
                        WitnessOut::NonSimpleVertex { vertex: vector_repr(vertex), tight: tight.clone() }
                    }
                    IsotropyWitness::ZeroNormal { index } => WitnessOut::ZeroNormal { index: *index },
                    IsotropyWitness::Touching { index, vertex } => {
                        WitnessOut::Touching { index: *index, vertex: vertex.as_deref().map(vector_repr) }
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupOut {
    pub class: &'static str,
    pub witness: Vec<Vec<ElemRepr>>,
}

pub fn class_name(c: SubgroupClass) -> &'static str {
    match c {
        SubgroupClass::Closed => "closed",
        SubgroupClass::NotClosed => "not_closed",
    }
}

pub fn kind_name(k: ReducedSpaceKind) -> &'static str {
    match k {
        ReducedSpaceKind::Manifold => "manifold",
        ReducedSpaceKind::Orbifold => "orbifold",
        ReducedSpaceKind::Quasifold => "quasifold",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOut {
    pub field: FieldDoc,
    pub subspace: SubspaceDoc,
    pub level: Vec<ElemRepr>,
    pub translation_lift: Vec<ElemRepr>,
    pub reduced_polyhedron_all: PolyhedronDoc,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub reduced_triple: TripleDoc,
    pub reduced_quasilattice_is_lattice: bool,
    pub subgroup: SubgroupOut,
    pub isotropy: IsotropyOut,
    pub reduced_atlas: Vec<ChartOut>,
    pub kind: Option<&'static str>,
}

impl ReductionOut {
    pub fn new(r: &ReductionResult) -> Self {
        ReductionOut {
            field: field_doc(r.reduced_triple.field()),
            subspace: SubspaceDoc {
                k_basis: vectors_repr(r.subspace.k_basis()),
                quotient_basis: Some(vectors_repr(r.subspace.quotient_basis())),
            },
            level: vector_repr(&r.level),
            translation_lift: vector_repr(&r.translation_lift),
            reduced_polyhedron_all: polyhedron_doc(&r.raw_reduced),
            kept: r.kept.clone(),
            discarded: r.discarded.clone(),
            reduced_triple: triple_doc(&r.reduced_triple),
            reduced_quasilattice_is_lattice: r.reduced_triple.quasilattice().is_lattice(),
            subgroup: SubgroupOut { class: class_name(r.subgroup.class), witness: vectors_repr(&r.subgroup.witness) },
            isotropy: IsotropyOut::new(&r.isotropy),
            reduced_atlas: r.reduced_atlas.iter().map(ChartOut::new).collect(),
            kind: r.kind.map(kind_name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyViolationOut {
    pub error: &'static str,
    pub isotropy: IsotropyOut,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}
