//! Exact H-representation polyhedra `{μ : ⟨μ, X_j⟩ ≥ λ_j}`.
//!
//! Vertices are found by exhaustive basic-solution enumeration: every
//! n-subset of halfspaces with an invertible normal matrix is solved and
//! kept when feasible. Extreme rays of the recession cone come from the same
//! procedure one dimension down. Output is sorted lexicographically by exact
//! comparison, so it does not depend on enumeration order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::field::{dot, Field, FieldElem};
use crate::linalg::{rank_of, Mat};
use crate::quasilattice::Quasilattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron contains a line")]
    NotPointed,
    #[error("smoothness check unavailable: {0}")]
    SmoothCheckUnavailable(String),
    #[error("halfspace {index} has a normal of length {got}, ambient dimension is {dim}")]
    DimensionMismatch { index: usize, got: usize, dim: usize },
    #[error("ambient dimension must be positive")]
    ZeroDimension,
}

/// `⟨μ, normal⟩ ≥ offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: Vec<FieldElem>,
    pub offset: FieldElem,
}

impl HalfSpace {
    pub fn new(normal: Vec<FieldElem>, offset: FieldElem) -> Self {
        HalfSpace { normal, offset }
    }

    /// `⟨x, normal⟩ − offset`; nonnegative exactly on the halfspace.
    pub fn slack(&self, x: &[FieldElem]) -> FieldElem {
        &dot(x, &self.normal) - &self.offset
    }

    pub fn has_zero_normal(&self) -> bool {
        self.normal.iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyhedron {
    field: Field,
    dim: usize,
    halfspaces: Vec<HalfSpace>,
}

/// Vertices, extreme rays and incidence of a polyhedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceReport {
    /// Sorted lexicographically. Empty when the polyhedron is not pointed.
    pub vertices: Vec<Vec<FieldElem>>,
    /// Extreme rays of the recession cone, scaled so the first nonzero
    /// coordinate is ±1, sorted.
    pub rays: Vec<Vec<FieldElem>>,
    /// Basis of the lineality space; empty for pointed polyhedra.
    pub lineality: Vec<Vec<FieldElem>>,
    /// Tight halfspace indices at each vertex.
    pub facet_incidence: Vec<Vec<usize>>,
    /// Halfspaces tight on the whole polyhedron.
    pub implicit_equalities: Vec<usize>,
    /// Dimension of the affine hull.
    pub dim: usize,
}

impl FaceReport {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }
}

/// Geometry of the pointed part, mapped back to ambient coordinates.
struct Geometry {
    points: Vec<Vec<FieldElem>>,
    incidence: Vec<Vec<usize>>,
    rays: Vec<Vec<FieldElem>>,
    lineality: Vec<Vec<FieldElem>>,
    implicit: Vec<usize>,
    dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Minimum {
    Value { value: FieldElem, argmin: Vec<FieldElem> },
    Unbounded,
}

/// Classification of halfspaces by their role in the polyhedron.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Irredundant {
    /// First definer of each facet, ascending.
    pub kept: Vec<usize>,
    /// Halfspaces never tight on the polyhedron.
    pub discarded: Vec<usize>,
    /// Tight somewhere without defining a new facet.
    pub touching: Vec<usize>,
}

/// All k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Scales a nonzero vector so its first nonzero coordinate is ±1.
fn normalize_direction(v: Vec<FieldElem>) -> Vec<FieldElem> {
    let lead = v.iter().find(|x| !x.is_zero()).expect("zero direction").abs();
    v.iter().map(|x| x / &lead).collect()
}

impl Polyhedron {
    pub fn new(field: &Field, dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self, PolyError> {
        if dim == 0 {
            return Err(PolyError::ZeroDimension);
        }
        for (index, h) in halfspaces.iter().enumerate() {
            if h.normal.len() != dim {
                return Err(PolyError::DimensionMismatch { index, got: h.normal.len(), dim });
            }
        }
        Ok(Polyhedron { field: field.clone(), dim, halfspaces })
    }

    /// Convenience constructor from integer normals and offsets.
    pub fn from_ints(field: &Field, normals: &[&[i64]], offsets: &[i64]) -> Result<Self, PolyError> {
        let dim = normals.first().map_or(0, |n| n.len());
        let hs = normals
            .iter()
            .zip(offsets)
            .map(|(n, &o)| HalfSpace::new(field.vector(n), field.int(o)))
            .collect();
        Polyhedron::new(field, dim, hs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Ambient dimension n.
    pub fn dim_ambient(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn normals(&self) -> Vec<Vec<FieldElem>> {
        self.halfspaces.iter().map(|h| h.normal.clone()).collect()
    }

    pub fn offsets(&self) -> Vec<FieldElem> {
        self.halfspaces.iter().map(|h| h.offset.clone()).collect()
    }

    pub fn contains(&self, x: &[FieldElem]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack(x).is_negative())
    }

    /// The polyhedron cut out by the listed halfspaces only.
    pub fn subset(&self, indices: &[usize]) -> Polyhedron {
        Polyhedron {
            field: self.field.clone(),
            dim: self.dim,
            halfspaces: indices.iter().map(|&i| self.halfspaces[i].clone()).collect(),
        }
    }

    pub fn tight_at(&self, x: &[FieldElem]) -> Vec<usize> {
        (0..self.halfspaces.len())
            .filter(|&j| self.halfspaces[j].slack(x).is_zero())
            .collect()
    }

    fn normals_rank(&self) -> usize {
        rank_of(&self.field, self.dim, &self.normals())
    }

    /// Feasible basic solutions and extreme rays, assuming the normals span.
    fn pointed_geometry(&self) -> Result<Geometry, PolyError> {
        let n = self.dim;
        let d = self.halfspaces.len();
        let candidates: Vec<usize> = (0..d).filter(|&j| !self.halfspaces[j].has_zero_normal()).collect();
        let mut found: BTreeMap<Vec<FieldElem>, ()> = BTreeMap::new();
        for combo in combinations(candidates.len(), n) {
            let idx: Vec<usize> = combo.iter().map(|&c| candidates[c]).collect();
            let rows: Vec<Vec<FieldElem>> = idx.iter().map(|&j| self.halfspaces[j].normal.clone()).collect();
            let m = Mat::from_rows(&self.field, n, &rows);
            if m.rank() < n {
                continue;
            }
            let b: Vec<FieldElem> = idx.iter().map(|&j| self.halfspaces[j].offset.clone()).collect();
            let x = m.solve(&b).expect("invertible system");
            if found.contains_key(&x) {
                continue;
            }
            if self.contains(&x) {
                found.insert(x, ());
            }
        }
        if found.is_empty() {
            return Err(PolyError::EmptyPolyhedron);
        }
        let points: Vec<Vec<FieldElem>> = found.into_keys().collect();
        let incidence: Vec<Vec<usize>> = points.iter().map(|p| self.tight_at(p)).collect();
        let rays = self.cone_rays(&candidates);
        let implicit: Vec<usize> = (0..d)
            .filter(|&j| {
                incidence.iter().all(|t| t.contains(&j))
                    && rays.iter().all(|r| dot(r, &self.halfspaces[j].normal).is_zero())
            })
            .collect();
        let eq_normals: Vec<Vec<FieldElem>> = implicit.iter().map(|&j| self.halfspaces[j].normal.clone()).collect();
        let dim = n - rank_of(&self.field, n, &eq_normals);
        Ok(Geometry { points, incidence, rays, lineality: Vec::new(), implicit, dim })
    }

    /// Extreme rays of `{u : ⟨u, X_j⟩ ≥ 0}` for a pointed cone.
    fn cone_rays(&self, candidates: &[usize]) -> Vec<Vec<FieldElem>> {
        let n = self.dim;
        let mut rays = BTreeSet::new();
        for combo in combinations(candidates.len(), n - 1) {
            let rows: Vec<Vec<FieldElem>> = combo.iter().map(|&c| self.halfspaces[candidates[c]].normal.clone()).collect();
            let m = Mat::from_rows(&self.field, n, &rows);
            let ker = m.nullspace();
            if ker.len() != 1 {
                continue;
            }
            let u = ker.into_iter().next().unwrap();
            for dir in [u.clone(), u.iter().map(|x| -x).collect::<Vec<_>>()] {
                let ok = self.halfspaces.iter().all(|h| !dot(&dir, &h.normal).is_negative());
                if ok {
                    rays.insert(normalize_direction(dir));
                }
            }
        }
        rays.into_iter().collect()
    }

    fn geometry(&self) -> Result<Geometry, PolyError> {
        let n = self.dim;
        let normals = self.normals();
        let r = self.normals_rank();
        if r == n {
            return self.pointed_geometry();
        }
        // Not pointed: P = core ⊕ lineality, with the core parametrized by
        // r independent normals B as x = B·y.
        let lineality = if normals.is_empty() {
            Mat::zeros(&self.field, 1, n).nullspace()
        } else {
            Mat::from_rows(&self.field, n, &normals).nullspace()
        };
        if r == 0 {
            // Only zero normals: all of ℝⁿ or empty.
            if self.halfspaces.iter().any(|h| h.offset.is_positive()) {
                return Err(PolyError::EmptyPolyhedron);
            }
            let origin = vec![self.field.zero(); n];
            let tight = self.tight_at(&origin);
            return Ok(Geometry {
                points: vec![origin],
                incidence: vec![tight.clone()],
                rays: Vec::new(),
                lineality,
                implicit: tight,
                dim: n,
            });
        }
        let mut basis: Vec<Vec<FieldElem>> = Vec::new();
        for v in &normals {
            let mut trial = basis.clone();
            trial.push(v.clone());
            if rank_of(&self.field, n, &trial) == trial.len() {
                basis = trial;
            }
        }
        let b = Mat::from_cols(&self.field, n, &basis);
        let bt = b.transpose();
        let core_hs = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace::new(bt.mul_vec(&h.normal), h.offset.clone()))
            .collect();
        let core = Polyhedron { field: self.field.clone(), dim: r, halfspaces: core_hs };
        let g = core.pointed_geometry()?;
        let eq_normals: Vec<Vec<FieldElem>> = g.implicit.iter().map(|&j| normals[j].clone()).collect();
        Ok(Geometry {
            points: g.points.iter().map(|y| b.mul_vec(y)).collect(),
            incidence: g.incidence,
            rays: g.rays.iter().map(|y| normalize_direction(b.mul_vec(y))).collect(),
            lineality,
            implicit: g.implicit,
            dim: n - rank_of(&self.field, n, &eq_normals),
        })
    }

    pub fn enumerate(&self) -> Result<FaceReport, PolyError> {
        let g = self.geometry()?;
        let pointed = g.lineality.is_empty();
        Ok(FaceReport {
            vertices: if pointed { g.points } else { Vec::new() },
            rays: if pointed { g.rays } else { Vec::new() },
            facet_incidence: if pointed { g.incidence } else { Vec::new() },
            lineality: g.lineality,
            implicit_equalities: g.implicit,
            dim: g.dim,
        })
    }

    /// Dimension of the affine hull.
    pub fn dimension(&self) -> Result<usize, PolyError> {
        Ok(self.geometry()?.dim)
    }

    /// True when the polyhedron contains no line, i.e. the normals span ℝⁿ.
    pub fn is_pointed(&self) -> bool {
        self.normals_rank() == self.dim
    }

    /// Pointed, and every vertex lies on exactly n of the halfspaces.
    pub fn is_simple(&self) -> Result<bool, PolyError> {
        if !self.is_pointed() {
            return Ok(false);
        }
        let rep = self.enumerate()?;
        Ok(rep.facet_incidence.iter().all(|t| t.len() == self.dim))
    }

    /// Smoothness with respect to the lattice `q`, which must be ℤⁿ, with
    /// rational normals. At every vertex the n tight normals must be
    /// primitive integer vectors forming a basis of ℤⁿ.
    pub fn is_smooth(&self, q: &Quasilattice) -> Result<bool, PolyError> {
        if !q.is_standard_lattice() {
            return Err(PolyError::SmoothCheckUnavailable("quasilattice is not ℤⁿ".into()));
        }
        if self.halfspaces.iter().any(|h| h.normal.iter().any(|c| !c.is_rational())) {
            return Err(PolyError::SmoothCheckUnavailable("normals are not rational".into()));
        }
        if !self.is_simple()? {
            return Ok(false);
        }
        let rep = self.enumerate()?;
        for tight in &rep.facet_incidence {
            let rows: Vec<Vec<FieldElem>> = tight.iter().map(|&j| self.halfspaces[j].normal.clone()).collect();
            if !rows.iter().all(|r| is_primitive_integer(r)) {
                return Ok(false);
            }
            let det = Mat::from_rows(&self.field, self.dim, &rows).det();
            if !det.abs().is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact minimum of `⟨x, c⟩` over the polyhedron.
    pub fn minimize(&self, c: &[FieldElem]) -> Result<Minimum, PolyError> {
        let g = self.geometry()?;
        if g.lineality.iter().any(|l| !dot(l, c).is_zero()) {
            return Ok(Minimum::Unbounded);
        }
        if g.rays.iter().any(|r| dot(r, c).is_negative()) {
            return Ok(Minimum::Unbounded);
        }
        let mut best: Option<(FieldElem, &Vec<FieldElem>)> = None;
        for p in &g.points {
            let v = dot(p, c);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, p));
            }
        }
        let (value, argmin) = best.expect("nonempty polyhedron has a minimal face point");
        Ok(Minimum::Value { value, argmin: argmin.clone() })
    }

    /// Splits halfspaces into facet definers (first occurrence wins),
    /// strictly redundant ones, and touching ones.
    pub fn irredundant(&self) -> Result<Irredundant, PolyError> {
        if !self.is_pointed() {
            return Err(PolyError::NotPointed);
        }
        let rep = self.enumerate()?;
        Ok(classify_halfspaces(self, &rep))
    }

    /// `{x − shift : x ∈ P}`.
    pub fn translate(&self, shift: &[FieldElem]) -> Polyhedron {
        let hs = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace::new(h.normal.clone(), &h.offset - &dot(shift, &h.normal)))
            .collect();
        Polyhedron { field: self.field.clone(), dim: self.dim, halfspaces: hs }
    }
}

pub(crate) fn classify_halfspaces(p: &Polyhedron, rep: &FaceReport) -> Irredundant {
    let field = p.field();
    let facet_dim = rep.dim.checked_sub(1);
    let mut seen: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let mut out = Irredundant::default();
    for (j, h) in p.halfspaces().iter().enumerate() {
        let tight_v: Vec<usize> = (0..rep.vertices.len())
            .filter(|&v| rep.facet_incidence[v].contains(&j))
            .collect();
        if tight_v.is_empty() {
            out.discarded.push(j);
            continue;
        }
        let tight_r: Vec<usize> = (0..rep.rays.len())
            .filter(|&r| dot(&rep.rays[r], &h.normal).is_zero())
            .collect();
        let base = &rep.vertices[tight_v[0]];
        let mut spans: Vec<Vec<FieldElem>> = tight_v[1..]
            .iter()
            .map(|&v| rep.vertices[v].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        spans.extend(tight_r.iter().map(|&r| rep.rays[r].clone()));
        let face_dim = rank_of(field, p.dim_ambient(), &spans);
        if Some(face_dim) == facet_dim && seen.insert((tight_v, tight_r)) {
            out.kept.push(j);
        } else {
            out.touching.push(j);
        }
    }
    out
}

fn is_primitive_integer(v: &[FieldElem]) -> bool {
    use num_integer::Integer;
    use num_traits::{One, Zero};
    let mut g = num_bigint::BigInt::zero();
    for x in v {
        match x.as_rational() {
            Some(q) if q.is_integer() => g = g.gcd(&q.to_integer()),
            _ => return false,
        }
    }
    g.is_one()
}
