//! Generalized Delzant triples `(Δ, {X₁…X_d}, Q)`.
//!
//! The normals `X_j` are the halfspace normals of Δ and the offsets are the
//! `λ_j`. A vertex chart reorders the tight facets first and records
//! `X_j = Σ_h a_{jh} X_h` for every other facet; its group is presented as
//! `Γ_ν ≅ (B⁻¹Q)/ℤⁿ` with `B` the matrix of tight normals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{denominator_lcm, dot, Field, FieldElem};
use crate::linalg::{hnf, IntMat, Mat};
use crate::polyhedron::{PolyError, Polyhedron};
use crate::quasilattice::Quasilattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DelzantError {
    #[error("polyhedron lives in dimension {polyhedron}, quasilattice in {quasilattice}")]
    DimensionMismatch { polyhedron: usize, quasilattice: usize },
    #[error("polyhedron and quasilattice use different fields")]
    FieldMismatch,
    #[error("invalid triple: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("tight normals are linearly dependent")]
    SingularTightSet,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One failed validation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Empty,
    NotFullDimensional { dim: usize, expected: usize },
    NotPointed,
    NotSimple { vertex: Vec<FieldElem>, tight: Vec<usize> },
    ZeroNormal { index: usize },
    NotInQuasilattice { index: usize },
    RedundantHalfspace { index: usize },
    NotAFacet { index: usize },
}

fn fmt_vec(v: &[FieldElem]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Empty => write!(f, "polyhedron is empty"),
            Diagnostic::NotFullDimensional { dim, expected } => {
                write!(f, "polyhedron has dimension {dim}, expected {expected}")
            }
            Diagnostic::NotPointed => write!(f, "polyhedron contains a line"),
            Diagnostic::NotSimple { vertex, tight } => {
                write!(f, "vertex {} lies on {} halfspaces {:?}", fmt_vec(vertex), tight.len(), tight)
            }
            Diagnostic::ZeroNormal { index } => write!(f, "halfspace {index}: zero normal"),
            Diagnostic::NotInQuasilattice { index } => {
                write!(f, "halfspace {index}: normal is not in the quasilattice")
            }
            Diagnostic::RedundantHalfspace { index } => write!(f, "halfspace {index}: redundant"),
            Diagnostic::NotAFacet { index } => {
                write!(f, "halfspace {index}: does not define its own facet")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ambient_dim: usize,
    /// `None` when the polyhedron is empty.
    pub dimension: Option<usize>,
    pub pointed: bool,
    pub simple: bool,
    pub quasirational: bool,
    /// Only decided for rational normals over ℤⁿ.
    pub smooth: Option<bool>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionData {
    /// n×d, columns `X_j`.
    pub pi: Mat,
    pub ker_basis: Vec<Vec<FieldElem>>,
    pub lambda: Vec<FieldElem>,
}

/// `Σ_h coeffs[h]·|z_h|² + constant > 0`, `h` over the tight facets in chart order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartInequality {
    pub index: usize,
    pub coeffs: Vec<FieldElem>,
    pub constant: FieldElem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteGroupPresentation {
    pub rank_n: usize,
    /// Nonzero representatives in `[0,1)ⁿ`, deduplicated.
    pub generators: Vec<Vec<FieldElem>>,
    pub is_trivial: bool,
    pub is_finite: bool,
    pub order: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexChart {
    pub vertex: Vec<FieldElem>,
    /// Tight facet indices, ascending.
    pub tight: Vec<usize>,
    /// Tight indices followed by the remaining ones.
    pub order: Vec<usize>,
    /// Row `r` expresses `X_{order[n+r]}` in the tight normals.
    pub a_coeffs: Vec<Vec<FieldElem>>,
    pub inequalities: Vec<ChartInequality>,
    pub gamma: DiscreteGroupPresentation,
}

impl VertexChart {
    pub fn nontight(&self) -> &[usize] {
        &self.order[self.tight.len()..]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelzantTriple {
    polyhedron: Polyhedron,
    quasilattice: Quasilattice,
}

impl DelzantTriple {
    pub fn new(polyhedron: Polyhedron, quasilattice: Quasilattice) -> Result<Self, DelzantError> {
        if polyhedron.dim_ambient() != quasilattice.dim() {
            return Err(DelzantError::DimensionMismatch {
                polyhedron: polyhedron.dim_ambient(),
                quasilattice: quasilattice.dim(),
            });
        }
        if polyhedron.field() != quasilattice.field() {
            return Err(DelzantError::FieldMismatch);
        }
        Ok(DelzantTriple { polyhedron, quasilattice })
    }

    pub fn polyhedron(&self) -> &Polyhedron {
        &self.polyhedron
    }

    pub fn quasilattice(&self) -> &Quasilattice {
        &self.quasilattice
    }

    pub fn field(&self) -> &Field {
        self.polyhedron.field()
    }

    /// n.
    pub fn dim(&self) -> usize {
        self.polyhedron.dim_ambient()
    }

    /// d.
    pub fn len(&self) -> usize {
        self.polyhedron.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polyhedron.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let p = &self.polyhedron;
        let n = self.dim();
        let mut diags = Vec::new();
        for (index, h) in p.halfspaces().iter().enumerate() {
            if h.has_zero_normal() {
                diags.push(Diagnostic::ZeroNormal { index });
            }
        }
        let mut quasirational = true;
        for (index, h) in p.halfspaces().iter().enumerate() {
            if !self.quasilattice.contains(&h.normal) {
                quasirational = false;
                diags.push(Diagnostic::NotInQuasilattice { index });
            }
        }
        let pointed = p.is_pointed();
        let mut report = ValidationReport {
            ambient_dim: n,
            dimension: None,
            pointed,
            simple: false,
            quasirational,
            smooth: None,
            diagnostics: Vec::new(),
        };
        if !pointed {
            diags.push(Diagnostic::NotPointed);
        }
        let rep = match p.enumerate() {
            Ok(rep) => rep,
            Err(_) => {
                diags.insert(0, Diagnostic::Empty);
                report.diagnostics = diags;
                return report;
            }
        };
        report.dimension = Some(rep.dim);
        if rep.dim != n {
            diags.push(Diagnostic::NotFullDimensional { dim: rep.dim, expected: n });
        }
        if pointed {
            let classes = crate::polyhedron::classify_halfspaces(p, &rep);
            for &index in &classes.discarded {
                diags.push(Diagnostic::RedundantHalfspace { index });
            }
            for &index in &classes.touching {
                if !p.halfspaces()[index].has_zero_normal() {
                    diags.push(Diagnostic::NotAFacet { index });
                }
            }
            report.simple = true;
            for (v, tight) in rep.vertices.iter().zip(&rep.facet_incidence) {
                if tight.len() != n {
                    report.simple = false;
                    diags.push(Diagnostic::NotSimple { vertex: v.clone(), tight: tight.clone() });
                }
            }
        }
        if diags.is_empty() {
            report.smooth = p.is_smooth(&self.quasilattice).ok();
        }
        report.diagnostics = diags;
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    fn require_valid(&self) -> Result<(), DelzantError> {
        let r = self.validate();
        if r.is_valid() {
            Ok(())
        } else {
            Err(DelzantError::Invalid(r.diagnostics))
        }
    }

    pub fn construction(&self) -> ConstructionData {
        let normals = self.polyhedron.normals();
        let pi = Mat::from_cols(self.field(), self.dim(), &normals);
        let ker_basis = pi.nullspace();
        ConstructionData { pi, ker_basis, lambda: self.polyhedron.offsets() }
    }

    /// One chart per vertex, vertices in lexicographic order.
    pub fn atlas(&self) -> Result<Vec<VertexChart>, DelzantError> {
        self.require_valid()?;
        let rep = self.polyhedron.enumerate()?;
        let mut pairs: Vec<(Vec<FieldElem>, Vec<usize>)> =
            rep.vertices.into_iter().zip(rep.facet_incidence).collect();
        pairs.sort();
        pairs.into_iter().map(|(v, t)| self.chart(v, t)).collect()
    }

    fn chart(&self, vertex: Vec<FieldElem>, tight: Vec<usize>) -> Result<VertexChart, DelzantError> {
        let field = self.field();
        let n = self.dim();
        let hs = self.polyhedron.halfspaces();
        let b_cols: Vec<Vec<FieldElem>> = tight.iter().map(|&h| hs[h].normal.clone()).collect();
        let b = Mat::from_cols(field, n, &b_cols);
        let gamma = gamma_group(&b, &self.quasilattice)?;
        let mut order = tight.clone();
        order.extend((0..hs.len()).filter(|j| !tight.contains(j)));
        let mut a_coeffs = Vec::new();
        let mut inequalities = Vec::new();
        for &j in &order[n..] {
            let a = b.solve(&hs[j].normal).ok_or(DelzantError::SingularTightSet)?;
            let lam: Vec<FieldElem> = tight.iter().map(|&h| hs[h].offset.clone()).collect();
            let constant = &dot(&a, &lam) - &hs[j].offset;
            inequalities.push(ChartInequality { index: j, coeffs: a.clone(), constant });
            a_coeffs.push(a);
        }
        Ok(VertexChart { vertex, tight, order, a_coeffs, inequalities, gamma })
    }
}

/// `Γ ≅ (B⁻¹Q)/ℤⁿ` for the tight-normal matrix `B` (columns are normals).
pub fn gamma_group(b: &Mat, q: &Quasilattice) -> Result<DiscreteGroupPresentation, DelzantError> {
    let n = b.rows();
    let binv = b.inverse().ok_or(DelzantError::SingularTightSet)?;
    let mut generators: Vec<Vec<FieldElem>> = Vec::new();
    for y in q.generators() {
        let g: Vec<FieldElem> = binv.mul_vec(y).iter().map(FieldElem::fract).collect();
        if g.iter().all(FieldElem::is_zero) || generators.contains(&g) {
            continue;
        }
        generators.push(g);
    }
    let is_trivial = generators.is_empty();
    let is_finite = generators.iter().flatten().all(FieldElem::is_rational);
    let order = is_finite.then(|| finite_index(n, &generators));
    Ok(DiscreteGroupPresentation { rank_n: n, generators, is_trivial, is_finite, order })
}

/// `[ℤⁿ + Σ ℤ g_i : ℤⁿ]` for rational `g_i`.
fn finite_index(n: usize, gens: &[Vec<FieldElem>]) -> BigInt {
    if gens.is_empty() {
        return BigInt::one();
    }
    let m = denominator_lcm(gens.iter().flatten());
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|r| if r == i { m.clone() } else { BigInt::zero() }).collect())
        .collect();
    for g in gens {
        cols.push(
            g.iter()
                .map(|x| (x.as_rational().unwrap() * BigRational::from_integer(m.clone())).to_integer())
                .collect(),
        );
    }
    let mut mat = IntMat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            mat.set(i, j, x.clone());
        }
    }
    let h = hnf(&mat);
    let covol = h.pivots.iter().fold(BigInt::one(), |acc, &(r, c)| acc * h.h.get(r, c).abs());
    let full = num_traits::pow(m, n);
    let (idx, rem) = full.div_rem(&covol);
    debug_assert!(rem.is_zero());
    idx
}
