//! Reduction of a Delzant triple by a subspace `𝔨 ⊂ ℝⁿ`.
//!
//! `ℝⁿ/𝔨` is materialized through a quotient basis `b_1…b_{n−k}`: with
//! `M = [k_1 … k_k | b_1 … b_{n−k}]`, the projection `p` is the last `n−k`
//! rows of `M⁻¹`, so `p(k_i) = 0` and `p(b_l) = e_l`. Dual vectors `ν` of the
//! quotient embed into `ker j*` as `p*(ν) = Pᵀν`.

use thiserror::Error;

use crate::delzant::{DelzantError, DelzantTriple, Diagnostic, VertexChart};
use crate::field::{dot, Field, FieldElem};
use crate::linalg::{rank_of, Mat};
use crate::polyhedron::{classify_halfspaces, HalfSpace, PolyError, Polyhedron};
use crate::quasilattice::{QuasilatticeError, SubgroupClass, SubgroupClassification};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid subspace: {0}")]
    BadSubspace(String),
    #[error("level has {got} entries, subspace has dimension {k}")]
    LevelMismatch { got: usize, k: usize },
    #[error("lift does not pair to the requested level")]
    LiftMismatch,
    #[error("triple is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidTriple(Vec<Diagnostic>),
    #[error("the level is not a moment value: reduced polyhedron is empty")]
    EmptyReduction,
    #[error("isotropy check failed: {}", .0.summary())]
    IsotropyViolation(Box<IsotropyReport>),
    #[error("triple is not smooth over the standard lattice")]
    NotSmooth,
    #[error(transparent)]
    Delzant(#[from] DelzantError),
    #[error(transparent)]
    Quasilattice(#[from] QuasilatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceData {
    field: Field,
    n: usize,
    k_basis: Vec<Vec<FieldElem>>,
    quotient_basis: Vec<Vec<FieldElem>>,
    basis_inverse: Mat,
    projection: Mat,
}

impl SubspaceData {
    /// Without a quotient basis, coordinate axes completing `𝔨` are picked greedily.
    pub fn new(
        field: &Field,
        n: usize,
        k_basis: Vec<Vec<FieldElem>>,
        quotient_basis: Option<Vec<Vec<FieldElem>>>,
    ) -> Result<Self, ReductionError> {
        let k = k_basis.len();
        if k == 0 || k >= n {
            return Err(ReductionError::BadSubspace(format!("need 1 ≤ k < n, got k = {k}, n = {n}")));
        }
        if k_basis.iter().chain(quotient_basis.iter().flatten()).any(|v| v.len() != n) {
            return Err(ReductionError::BadSubspace(format!("vectors must have length {n}")));
        }
        if rank_of(field, n, &k_basis) != k {
            return Err(ReductionError::BadSubspace("k_basis is linearly dependent".into()));
        }
        let quotient_basis = match quotient_basis {
            Some(qb) => {
                if qb.len() != n - k {
                    return Err(ReductionError::BadSubspace(format!(
                        "quotient_basis needs {} vectors, got {}",
                        n - k,
                        qb.len()
                    )));
                }
                qb
            }
            None => {
                let mut all = k_basis.clone();
                let mut qb = Vec::new();
                for i in 0..n {
                    let e: Vec<FieldElem> =
                        (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect();
                    all.push(e.clone());
                    if rank_of(field, n, &all) == all.len() {
                        qb.push(e);
                    } else {
                        all.pop();
                    }
                }
                qb
            }
        };
        let cols: Vec<Vec<FieldElem>> = k_basis.iter().chain(&quotient_basis).cloned().collect();
        let basis_inverse = Mat::from_cols(field, n, &cols).inverse().ok_or_else(|| {
            ReductionError::BadSubspace("quotient_basis does not complete k_basis".into())
        })?;
        let rows: Vec<Vec<FieldElem>> = (k..n).map(|i| basis_inverse.row(i).to_vec()).collect();
        let projection = Mat::from_rows(field, n, &rows);
        Ok(SubspaceData { field: field.clone(), n, k_basis, quotient_basis, basis_inverse, projection })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k_basis.len()
    }

    pub fn k_basis(&self) -> &[Vec<FieldElem>] {
        &self.k_basis
    }

    pub fn quotient_basis(&self) -> &[Vec<FieldElem>] {
        &self.quotient_basis
    }

    /// `(n−k)×n` matrix of `p`.
    pub fn projection(&self) -> &Mat {
        &self.projection
    }

    pub fn project(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        self.projection.mul_vec(v)
    }

    /// `p*: (ℝⁿ/𝔨)* → (ℝⁿ)*`.
    pub fn p_star(&self, nu: &[FieldElem]) -> Vec<FieldElem> {
        self.projection.transpose().mul_vec(nu)
    }

    /// `j*: (ℝⁿ)* → 𝔨*` in the dual of `k_basis`.
    pub fn j_star(&self, mu: &[FieldElem]) -> Vec<FieldElem> {
        self.k_basis.iter().map(|k| dot(mu, k)).collect()
    }

    /// The `μ₀` with `⟨μ₀, k_i⟩ = ξ_i` and `⟨μ₀, b_l⟩ = 0`.
    pub fn lift(&self, xi: &[FieldElem]) -> Result<Vec<FieldElem>, ReductionError> {
        if xi.len() != self.k() {
            return Err(ReductionError::LevelMismatch { got: xi.len(), k: self.k() });
        }
        let mut mu = vec![self.field.zero(); self.n];
        for (i, x) in xi.iter().enumerate() {
            for (m, r) in mu.iter_mut().zip(self.basis_inverse.row(i)) {
                *m = &*m + &(x * r);
            }
        }
        Ok(mu)
    }
}

/// `Δ − μ₀`, so that the level becomes 0.
pub fn translate_by(triple: &DelzantTriple, mu0: &[FieldElem]) -> DelzantTriple {
    DelzantTriple::new(triple.polyhedron().translate(mu0), triple.quasilattice().clone())
        .expect("translation keeps dimensions")
}

/// Translates to level `ξ` using the canonical lift; returns the triple and `μ₀`.
pub fn translate_to_level(
    triple: &DelzantTriple,
    s: &SubspaceData,
    xi: &[FieldElem],
) -> Result<(DelzantTriple, Vec<FieldElem>), ReductionError> {
    let mu0 = s.lift(xi)?;
    Ok((translate_by(triple, &mu0), mu0))
}

/// `Δ_𝔨 = {ν : ⟨ν, p(X_j)⟩ ≥ λ_j}` for a triple at level 0.
pub fn reduced_polyhedron(triple: &DelzantTriple, s: &SubspaceData) -> Result<Polyhedron, ReductionError> {
    let hs = triple
        .polyhedron()
        .halfspaces()
        .iter()
        .map(|h| HalfSpace::new(s.project(&h.normal), h.offset.clone()))
        .collect();
    let p = Polyhedron::new(s.field(), s.n() - s.k(), hs).map_err(|e| ReductionError::BadSubspace(e.to_string()))?;
    match p.enumerate() {
        Ok(_) => Ok(p),
        Err(PolyError::EmptyPolyhedron) => Err(ReductionError::EmptyReduction),
        Err(e) => Err(ReductionError::BadSubspace(e.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsotropyWitness {
    Dimension { dim: usize, expected: usize },
    NonSimpleVertex { vertex: Vec<FieldElem>, tight: Vec<usize> },
    ZeroNormal { index: usize },
    Touching { index: usize, vertex: Option<Vec<FieldElem>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyReport {
    pub passed: bool,
    pub dim: usize,
    pub expected_dim: usize,
    pub dim_check: bool,
    pub simple_check: bool,
    pub uniqueness_check: bool,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub touching: Vec<usize>,
    pub witnesses: Vec<IsotropyWitness>,
}

impl IsotropyReport {
    pub fn summary(&self) -> String {
        let mut failed = Vec::new();
        if !self.dim_check {
            failed.push(format!("dimension {} instead of {}", self.dim, self.expected_dim));
        }
        if !self.simple_check {
            failed.push("not simple".to_string());
        }
        if !self.uniqueness_check {
            failed.push(format!("halfspaces {:?} touch without defining a facet", self.touching));
        }
        if failed.is_empty() {
            "passed".into()
        } else {
            failed.join(", ")
        }
    }
}

/// The three conditions for 0-dimensional isotropy on a nonempty raw `Δ_𝔨`.
pub fn isotropy_check(raw: &Polyhedron, n: usize, k: usize) -> Result<IsotropyReport, ReductionError> {
    let rep = raw.enumerate().map_err(|e| match e {
        PolyError::EmptyPolyhedron => ReductionError::EmptyReduction,
        e => ReductionError::BadSubspace(e.to_string()),
    })?;
    let expected = n - k;
    let classes = classify_halfspaces(raw, &rep);
    let mut witnesses = Vec::new();
    let dim_check = rep.dim == expected;
    if !dim_check {
        witnesses.push(IsotropyWitness::Dimension { dim: rep.dim, expected });
    }
    let mut simple_check = true;
    for (v, tight) in rep.vertices.iter().zip(&rep.facet_incidence) {
        let kept_tight: Vec<usize> = tight.iter().copied().filter(|j| classes.kept.contains(j)).collect();
        if kept_tight.len() != expected {
            simple_check = false;
            witnesses.push(IsotropyWitness::NonSimpleVertex { vertex: v.clone(), tight: kept_tight });
        }
    }
    for &index in &classes.touching {
        if raw.halfspaces()[index].has_zero_normal() {
            witnesses.push(IsotropyWitness::ZeroNormal { index });
        } else {
            let vertex = rep
                .vertices
                .iter()
                .zip(&rep.facet_incidence)
                .find(|(_, t)| t.contains(&index))
                .map(|(v, _)| v.clone());
            witnesses.push(IsotropyWitness::Touching { index, vertex });
        }
    }
    let uniqueness_check = classes.touching.is_empty();
    Ok(IsotropyReport {
        passed: dim_check && simple_check && uniqueness_check,
        dim: rep.dim,
        expected_dim: expected,
        dim_check,
        simple_check,
        uniqueness_check,
        kept: classes.kept,
        discarded: classes.discarded,
        touching: classes.touching,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedSpaceKind {
    Manifold,
    Orbifold,
    Quasifold,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    /// `(Δ_𝔨, {p(X_j)}_{j kept}, p(Q))` in quotient coordinates.
    pub reduced_triple: DelzantTriple,
    /// Original indices, ascending; reduced halfspace `r` is `kept[r]`.
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub subgroup: SubgroupClassification,
    pub isotropy: IsotropyReport,
    pub reduced_atlas: Vec<VertexChart>,
    pub translation_lift: Vec<FieldElem>,
    pub level: Vec<FieldElem>,
    pub subspace: SubspaceData,
    /// Original triple translated to level 0.
    pub translated_triple: DelzantTriple,
    /// All d projected halfspaces.
    pub raw_reduced: Polyhedron,
    /// Set by [`reduce_smooth`].
    pub kind: Option<ReducedSpaceKind>,
}

impl ReductionResult {
    /// `p*(ν) + μ₀`, a point of Δ on the level `j*(μ) = ξ`.
    pub fn embed(&self, nu: &[FieldElem]) -> Vec<FieldElem> {
        self.subspace.p_star(nu).iter().zip(&self.translation_lift).map(|(a, b)| a + b).collect()
    }
}

pub fn reduce(triple: &DelzantTriple, s: &SubspaceData, xi: &[FieldElem]) -> Result<ReductionResult, ReductionError> {
    let mu0 = s.lift(xi)?;
    reduce_with_lift(triple, s, xi, mu0)
}

/// As [`reduce`], with a caller-chosen lift `μ₀` of `ξ`.
pub fn reduce_with_lift(
    triple: &DelzantTriple,
    s: &SubspaceData,
    xi: &[FieldElem],
    mu0: Vec<FieldElem>,
) -> Result<ReductionResult, ReductionError> {
    if s.n() != triple.dim() {
        return Err(ReductionError::BadSubspace(format!(
            "subspace lives in dimension {}, triple in {}",
            s.n(),
            triple.dim()
        )));
    }
    if xi.len() != s.k() {
        return Err(ReductionError::LevelMismatch { got: xi.len(), k: s.k() });
    }
    if s.j_star(&mu0) != xi {
        return Err(ReductionError::LiftMismatch);
    }
    let report = triple.validate();
    if !report.is_valid() {
        return Err(ReductionError::InvalidTriple(report.diagnostics));
    }
    let translated = translate_by(triple, &mu0);
    let raw = reduced_polyhedron(&translated, s)?;
    let isotropy = isotropy_check(&raw, s.n(), s.k())?;
    if !isotropy.passed {
        return Err(ReductionError::IsotropyViolation(Box::new(isotropy)));
    }
    let q = triple.quasilattice();
    let reduced_q = q.image(s.projection())?;
    let reduced_triple = DelzantTriple::new(raw.subset(&isotropy.kept), reduced_q)?;
    let reduced_atlas = reduced_triple.atlas()?;
    let subgroup = q.classify_subgroup(s.k_basis());
    Ok(ReductionResult {
        reduced_triple,
        kept: isotropy.kept.clone(),
        discarded: isotropy.discarded.clone(),
        subgroup,
        isotropy,
        reduced_atlas,
        translation_lift: mu0,
        level: xi.to_vec(),
        subspace: s.clone(),
        translated_triple: translated,
        raw_reduced: raw,
        kind: None,
    })
}

/// For triples smooth over ℤⁿ; also classifies the reduced space.
pub fn reduce_smooth(triple: &DelzantTriple, s: &SubspaceData, xi: &[FieldElem]) -> Result<ReductionResult, ReductionError> {
    let report = triple.validate();
    if !report.is_valid() {
        return Err(ReductionError::InvalidTriple(report.diagnostics));
    }
    if report.smooth != Some(true) {
        return Err(ReductionError::NotSmooth);
    }
    let mut r = reduce(triple, s, xi)?;
    let gammas = r.reduced_atlas.iter().map(|c| &c.gamma);
    r.kind = Some(match r.subgroup.class {
        SubgroupClass::Closed if gammas.clone().all(|g| g.is_trivial) => ReducedSpaceKind::Manifold,
        SubgroupClass::Closed if gammas.clone().all(|g| g.is_finite) => ReducedSpaceKind::Orbifold,
        _ => ReducedSpaceKind::Quasifold,
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::quasilattice::Quasilattice;
    use num_bigint::BigInt;

    fn strip(k: &Field) -> DelzantTriple {
        let p = Polyhedron::from_ints(k, &[&[1, 0], &[0, 1], &[0, -1]], &[-1, 0, -1]).unwrap();
        DelzantTriple::new(p, Quasilattice::standard(k, 2)).unwrap()
    }

    fn line(k: &Field, a: FieldElem) -> SubspaceData {
        SubspaceData::new(k, 2, vec![vec![k.int(-1), a]], Some(vec![vec![k.zero(), k.one()]])).unwrap()
    }

    #[test]
    fn projection_matches_golden_identification() {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let s = line(&k, k.alpha());
        assert_eq!(s.project(&k.vector(&[1, 0])), vec![k.alpha()]);
        assert_eq!(s.project(&k.vector(&[0, 1])), vec![k.one()]);
        assert_eq!(s.project(&[k.int(-1), k.alpha()]), vec![k.zero()]);
        assert_eq!(s.j_star(&s.p_star(&[k.int(5)])), vec![k.zero()]);
    }

    #[test]
    fn auto_quotient_basis() {
        let q = Field::rationals();
        let s = SubspaceData::new(&q, 3, vec![q.vector(&[1, 0, 0])], None).unwrap();
        assert_eq!(s.quotient_basis(), &[q.vector(&[0, 1, 0]), q.vector(&[0, 0, 1])]);
        assert!(SubspaceData::new(&q, 2, vec![], None).is_err());
        assert!(SubspaceData::new(&q, 2, vec![q.vector(&[1, 0])], Some(vec![q.vector(&[2, 0])])).is_err());
    }

    #[test]
    fn translation_examples() {
        let q = Field::rationals();
        let t = strip(&q);
        let s = SubspaceData::new(&q, 2, vec![q.vector(&[0, 1])], None).unwrap();
        let (same, mu) = translate_to_level(&t, &s, &[q.zero()]).unwrap();
        assert_eq!(same, t);
        assert_eq!(mu, q.vector(&[0, 0]));
        let (moved, mu) = translate_to_level(&t, &s, &[q.ratio(1, 2)]).unwrap();
        assert_eq!(mu, vec![q.zero(), q.ratio(1, 2)]);
        assert_eq!(moved.polyhedron().offsets(), vec![q.int(-1), q.ratio(-1, 2), q.ratio(-1, 2)]);
    }

    #[test]
    fn reduced_polyhedron_examples() {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let t = strip(&k);
        let raw = reduced_polyhedron(&t, &line(&k, k.alpha())).unwrap();
        assert_eq!(raw.normals(), vec![vec![k.alpha()], vec![k.one()], vec![k.int(-1)]]);
        assert_eq!(raw.offsets(), k.vector(&[-1, 0, -1]));

        let s = SubspaceData::new(&k, 2, vec![k.vector(&[0, 1])], None).unwrap();
        let raw = reduced_polyhedron(&t, &s).unwrap();
        assert_eq!(raw.normals(), vec![k.vector(&[1]), k.vector(&[0]), k.vector(&[0])]);
        let far = translate_to_level(&t, &s, &[k.int(5)]).unwrap().0;
        assert_eq!(reduced_polyhedron(&far, &s), Err(ReductionError::EmptyReduction));
    }

    #[test]
    fn golden_reduction() {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let r = reduce(&strip(&k), &line(&k, k.alpha()), &[k.zero()]).unwrap();
        assert_eq!(r.kept, vec![1, 2]);
        assert_eq!(r.discarded, vec![0]);
        assert_eq!(r.reduced_triple.polyhedron().normals(), vec![vec![k.one()], vec![k.int(-1)]]);
        assert_eq!(r.reduced_triple.quasilattice().generators(), &[vec![k.alpha()], vec![k.one()]]);
        assert_eq!(r.subgroup.class, SubgroupClass::NotClosed);
        assert!(!r.reduced_triple.quasilattice().is_lattice());
        assert_eq!(r.reduced_atlas.len(), 2);
        assert_eq!(r.reduced_atlas[0].gamma.generators, vec![vec![k.alpha().fract()]]);
    }

    #[test]
    fn rational_reduction_is_orbifold() {
        let q = Field::rationals();
        let r = reduce_smooth(&strip(&q), &line(&q, q.ratio(1, 2)), &[q.zero()]).unwrap();
        assert_eq!(r.subgroup.class, SubgroupClass::Closed);
        assert_eq!(r.subgroup.witness, vec![q.vector(&[-2, 1])]);
        assert!(r.reduced_triple.quasilattice().is_lattice());
        for c in &r.reduced_atlas {
            assert_eq!(c.gamma.order, Some(BigInt::from(2)));
        }
        assert_eq!(r.kind, Some(ReducedSpaceKind::Orbifold));
    }

    #[test]
    fn poles_of_the_sphere_violate_isotropy() {
        let q = Field::rationals();
        let s = SubspaceData::new(&q, 2, vec![q.vector(&[0, 1])], None).unwrap();
        let Err(ReductionError::IsotropyViolation(rep)) = reduce(&strip(&q), &s, &[q.zero()]) else {
            panic!("expected isotropy violation");
        };
        assert!(rep.dim_check && !rep.uniqueness_check);
        assert!(rep.witnesses.contains(&IsotropyWitness::ZeroNormal { index: 1 }));
    }

    #[test]
    fn square_cut_through_vertex_violates_isotropy() {
        let q = Field::rationals();
        let p = Polyhedron::from_ints(&q, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[0, 0, -1, -1]).unwrap();
        let t = DelzantTriple::new(p, Quasilattice::standard(&q, 2)).unwrap();
        let s = SubspaceData::new(&q, 2, vec![q.vector(&[1, -1])], None).unwrap();
        let Err(ReductionError::IsotropyViolation(rep)) = reduce(&t, &s, &[q.zero()]) else {
            panic!("expected isotropy violation");
        };
        assert!(!rep.uniqueness_check);
        assert!(rep.witnesses.iter().any(|w| matches!(w, IsotropyWitness::Touching { vertex: Some(_), .. })));
    }

    #[test]
    fn cp2_by_coordinate_circle_is_a_manifold() {
        let q = Field::rationals();
        let p = Polyhedron::from_ints(&q, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, -1]).unwrap();
        let t = DelzantTriple::new(p, Quasilattice::standard(&q, 2)).unwrap();
        let s = SubspaceData::new(&q, 2, vec![q.vector(&[0, 1])], None).unwrap();
        let r = reduce_smooth(&t, &s, &[q.ratio(1, 2)]).unwrap();
        assert_eq!(r.kind, Some(ReducedSpaceKind::Manifold));
        assert!(r.reduced_triple.quasilattice().is_standard_lattice());
        let verts: Vec<_> = r.reduced_atlas.iter().map(|c| c.vertex.clone()).collect();
        assert_eq!(verts, vec![vec![q.zero()], vec![q.ratio(1, 2)]]);
        for v in &verts {
            let mu = r.embed(v);
            assert!(t.polyhedron().contains(&mu));
            assert_eq!(s.j_star(&mu), vec![q.ratio(1, 2)]);
        }
    }

    #[test]
    fn other_lifts_translate_the_reduction() {
        let q = Field::rationals();
        let p = Polyhedron::from_ints(&q, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, -1]).unwrap();
        let t = DelzantTriple::new(p, Quasilattice::standard(&q, 2)).unwrap();
        let s = SubspaceData::new(&q, 2, vec![q.vector(&[0, 1])], None).unwrap();
        let xi = [q.ratio(1, 2)];
        let a = reduce(&t, &s, &xi).unwrap();
        let other = vec![q.ratio(1, 3), q.ratio(1, 2)];
        let b = reduce_with_lift(&t, &s, &xi, other).unwrap();
        let shift: Vec<_> = a.reduced_atlas.iter().zip(&b.reduced_atlas).map(|(x, y)| &x.vertex[0] - &y.vertex[0]).collect();
        assert!(shift.windows(2).all(|w| w[0] == w[1]));
        assert!(reduce_with_lift(&t, &s, &xi, q.vector(&[0, 0])).is_err());
    }
}
