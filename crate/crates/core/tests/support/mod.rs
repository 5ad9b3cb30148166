//! Random instances and brute-force subset oracles shared by integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use toriq_core::delzant::DelzantTriple;
use toriq_core::field::{dot, Field, FieldElem, FieldSpec};
use toriq_core::linalg::{rank_of, Mat};
use toriq_core::polyhedron::{HalfSpace, Polyhedron};
use toriq_core::quasilattice::Quasilattice;
use toriq_core::reduction::SubspaceData;

pub fn sqrt2() -> Field {
    Field::new(FieldSpec::quadratic(2)).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn slack(h: &HalfSpace, x: &[FieldElem]) -> FieldElem {
    &dot(&h.normal, x) - &h.offset
}

/// Every feasible basic solution, with its tight set, sorted and deduplicated.
pub fn oracle_vertices(p: &Polyhedron) -> Vec<(Vec<FieldElem>, Vec<usize>)> {
    let n = p.dim_ambient();
    let hs = p.halfspaces();
    let mut out: Vec<(Vec<FieldElem>, Vec<usize>)> = Vec::new();
    for s in subsets(hs.len(), n) {
        let rows: Vec<Vec<FieldElem>> = s.iter().map(|&i| hs[i].normal.clone()).collect();
        let m = Mat::from_rows(p.field(), n, &rows);
        if m.rank() < n {
            continue;
        }
        let rhs: Vec<FieldElem> = s.iter().map(|&i| hs[i].offset.clone()).collect();
        let x = m.solve(&rhs).unwrap();
        if hs.iter().all(|h| !slack(h, &x).is_negative()) && !out.iter().any(|(v, _)| *v == x) {
            let tight = (0..hs.len()).filter(|&i| slack(&hs[i], &x).is_zero()).collect();
            out.push((x, tight));
        }
    }
    out.sort();
    out
}

/// Extreme rays of `{r : ⟨r, X_i⟩ ≥ 0}` over the given normals (pointed cone).
fn oracle_rays(field: &Field, n: usize, normals: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    let mut out = Vec::new();
    for s in subsets(normals.len(), n - 1) {
        let rows: Vec<Vec<FieldElem>> = s.iter().map(|&i| normals[i].clone()).collect();
        let ns = if rows.is_empty() { Mat::zeros(field, 1, n).nullspace() } else { Mat::from_rows(field, n, &rows).nullspace() };
        if ns.len() != 1 {
            continue;
        }
        for sign in [1i64, -1] {
            let u: Vec<FieldElem> = ns[0].iter().map(|x| x * &field.int(sign)).collect();
            if normals.iter().all(|x| !dot(x, &u).is_negative()) {
                out.push(u);
            }
        }
    }
    out
}

fn positive_multiple(a: &HalfSpace, b: &HalfSpace) -> bool {
    let Some(i) = a.normal.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if b.normal[i].is_zero() {
        return false;
    }
    let c = &b.normal[i] / &a.normal[i];
    c.is_positive()
        && a.normal.iter().zip(&b.normal).all(|(x, y)| &(x * &c) == y)
        && &a.offset * &c == b.offset
}

/// `min ⟨x, c⟩ < bound` over the polyhedron cut out by `hs` (nonempty), by subsets.
fn dips_below(field: &Field, n: usize, hs: &[HalfSpace], c: &[FieldElem], bound: &FieldElem) -> bool {
    let normals: Vec<Vec<FieldElem>> = hs.iter().map(|h| h.normal.clone()).collect();
    if rank_of(field, n, &normals) < n {
        // A line ⟂ to every remaining normal, and c spans it out.
        return true;
    }
    if oracle_rays(field, n, &normals).iter().any(|r| dot(r, c).is_negative()) {
        return true;
    }
    let p = Polyhedron::new(field, n, hs.to_vec()).unwrap();
    oracle_vertices(&p).iter().any(|(v, _)| &dot(v, c) < bound)
}

pub struct OracleClasses {
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub touching: Vec<usize>,
}

/// For a pointed, nonempty, full-dimensional polyhedron: strict redundancy by
/// the vertex margin; facet definers by "removing every positive multiple of
/// the inequality enlarges P"; first copy wins.
pub fn oracle_classify(p: &Polyhedron) -> OracleClasses {
    let n = p.dim_ambient();
    let hs = p.halfspaces();
    let verts = oracle_vertices(p);
    let mut c = OracleClasses { kept: vec![], discarded: vec![], touching: vec![] };
    for (j, h) in hs.iter().enumerate() {
        if verts.iter().all(|(v, _)| slack(h, v).is_positive()) {
            c.discarded.push(j);
            continue;
        }
        if h.has_zero_normal() {
            c.touching.push(j);
            continue;
        }
        let copies: Vec<usize> = (0..hs.len()).filter(|&i| i == j || positive_multiple(h, &hs[i])).collect();
        let rest: Vec<HalfSpace> = (0..hs.len()).filter(|i| !copies.contains(i)).map(|i| hs[i].clone()).collect();
        let facet = dips_below(p.field(), n, &rest, &h.normal, &h.offset);
        if facet && copies[0] == j {
            c.kept.push(j);
        } else {
            c.touching.push(j);
        }
    }
    c
}

/// Affine dimension of the convex hull of vertices and rays, brute force.
pub fn oracle_full_dimensional(p: &Polyhedron) -> bool {
    let n = p.dim_ambient();
    let verts = oracle_vertices(p);
    let Some((v0, _)) = verts.first() else { return false };
    let normals: Vec<Vec<FieldElem>> = p.normals();
    let mut dirs: Vec<Vec<FieldElem>> = verts.iter().map(|(v, _)| v.iter().zip(v0).map(|(a, b)| a - b).collect()).collect();
    dirs.extend(oracle_rays(p.field(), n, &normals));
    rank_of(p.field(), n, &dirs) == n
}

fn small(rng: &mut ChaCha8Rng, field: &Field, irrational: bool) -> FieldElem {
    let a = field.int(rng.random_range(-3..=3));
    if irrational && field.degree() > 1 && rng.random_bool(0.3) {
        &a + &(&field.int(rng.random_range(-1..=1)) * &field.alpha())
    } else {
        a
    }
}

/// Random H-representation with n ≤ 3 and d ≤ 8, including zero normals and
/// positive multiples of earlier halfspaces.
pub fn random_polyhedron(rng: &mut ChaCha8Rng, field: &Field) -> Polyhedron {
    let n = rng.random_range(1..=3);
    let d = rng.random_range(1..=8);
    let irrational = field.degree() > 1;
    let mut hs: Vec<HalfSpace> = Vec::new();
    for _ in 0..d {
        if !hs.is_empty() && rng.random_bool(0.12) {
            let src = hs[rng.random_range(0..hs.len())].clone();
            let c = field.int(rng.random_range(1..=2));
            hs.push(HalfSpace::new(src.normal.iter().map(|x| x * &c).collect(), &src.offset * &c));
            continue;
        }
        let normal: Vec<FieldElem> = if rng.random_bool(0.05) {
            vec![field.zero(); n]
        } else {
            (0..n).map(|_| small(rng, field, irrational)).collect()
        };
        let offset = field.ratio(rng.random_range(-6..=2), rng.random_range(1..=3));
        hs.push(HalfSpace::new(normal, offset));
    }
    Polyhedron::new(field, n, hs).unwrap()
}

fn random_interior_point(rng: &mut ChaCha8Rng, verts: &[Vec<FieldElem>]) -> Vec<FieldElem> {
    let field = verts[0][0].field().clone();
    let weights: Vec<i64> = verts.iter().map(|_| rng.random_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    let n = verts[0].len();
    (0..n)
        .map(|i| {
            verts
                .iter()
                .zip(&weights)
                .map(|(v, &w)| &v[i] * &field.ratio(w, total))
                .fold(field.zero(), |a, b| a + b)
        })
        .collect()
}

/// A valid rational triple over ℤⁿ, n ∈ {2, 3}, d ≤ 7: a simplex or box cut by random
/// halfspaces through the interior, then made irredundant.
pub fn random_triple(rng: &mut ChaCha8Rng) -> DelzantTriple {
    let q = Field::rationals();
    loop {
        let n = rng.random_range(2..=3);
        let size = rng.random_range(2..=4);
        let mut hs: Vec<HalfSpace> = Vec::new();
        for i in 0..n {
            let e: Vec<i64> = (0..n).map(|j| i64::from(i == j)).collect();
            hs.push(HalfSpace::new(q.vector(&e), q.zero()));
        }
        if n == 3 || rng.random_bool(0.5) {
            hs.push(HalfSpace::new(q.vector(&vec![-1; n]), q.int(-size)));
        } else {
            for i in 0..n {
                let e: Vec<i64> = (0..n).map(|j| -i64::from(i == j)).collect();
                hs.push(HalfSpace::new(q.vector(&e), q.int(-size)));
            }
        }
        let base = Polyhedron::new(&q, n, hs.clone()).unwrap();
        let verts: Vec<Vec<FieldElem>> = oracle_vertices(&base).into_iter().map(|(v, _)| v).collect();
        let cuts = rng.random_range(0..=(7 - hs.len()).min(3));
        for _ in 0..cuts {
            let normal: Vec<FieldElem> = (0..n).map(|_| q.int(rng.random_range(-2..=2))).collect();
            if normal.iter().all(FieldElem::is_zero) {
                continue;
            }
            let c = random_interior_point(rng, &verts);
            let shift = q.ratio(rng.random_range(1..=4), 2);
            hs.push(HalfSpace::new(normal.clone(), &dot(&normal, &c) - &shift));
        }
        let p = Polyhedron::new(&q, n, hs).unwrap();
        let Ok(irr) = p.irredundant() else { continue };
        let p = p.subset(&irr.kept);
        let t = DelzantTriple::new(p, Quasilattice::standard(&q, n)).unwrap();
        if t.is_valid() {
            return t;
        }
    }
}

/// Random 𝔨 of dimension 1..n−1 with small rational entries.
pub fn random_subspace(rng: &mut ChaCha8Rng, n: usize) -> SubspaceData {
    let q = Field::rationals();
    loop {
        let k = rng.random_range(1..n);
        let basis: Vec<Vec<FieldElem>> = (0..k)
            .map(|_| (0..n).map(|_| q.ratio(rng.random_range(-3..=3), rng.random_range(1..=2))).collect())
            .collect();
        if let Ok(s) = SubspaceData::new(&q, n, basis, None) {
            return s;
        }
    }
}

/// A level whose slice meets the interior of Δ.
pub fn interior_level(rng: &mut ChaCha8Rng, t: &DelzantTriple, s: &SubspaceData) -> Vec<FieldElem> {
    let verts: Vec<Vec<FieldElem>> = oracle_vertices(t.polyhedron()).into_iter().map(|(v, _)| v).collect();
    s.j_star(&random_interior_point(rng, &verts))
}

/// Compares `enumerate` and `irredundant` with the oracles on one instance.
pub fn check_against_oracle(p: &Polyhedron) -> Result<(), String> {
    let n = p.dim_ambient();
    let pointed = rank_of(p.field(), n, &p.normals()) == n;
    if !pointed {
        return match p.enumerate() {
            Ok(rep) if rep.vertices.is_empty() && !rep.lineality.is_empty() => Ok(()),
            Err(toriq_core::polyhedron::PolyError::EmptyPolyhedron) => Ok(()),
            other => Err(format!("non-pointed {p:?}: {other:?}")),
        };
    }
    let oracle = oracle_vertices(p);
    let rep = match p.enumerate() {
        Err(toriq_core::polyhedron::PolyError::EmptyPolyhedron) if oracle.is_empty() => return Ok(()),
        Err(e) => return Err(format!("{p:?}: enumerate failed: {e}")),
        Ok(rep) => rep,
    };
    let got: Vec<(Vec<FieldElem>, Vec<usize>)> =
        rep.vertices.iter().cloned().zip(rep.facet_incidence.iter().cloned()).collect();
    if got != oracle {
        return Err(format!("{p:?}: vertices {got:?} vs oracle {oracle:?}"));
    }
    if !oracle_full_dimensional(p) {
        return Ok(());
    }
    let irr = p.irredundant().map_err(|e| e.to_string())?;
    let o = oracle_classify(p);
    if (irr.kept.as_slice(), irr.discarded.as_slice(), irr.touching.as_slice())
        != (o.kept.as_slice(), o.discarded.as_slice(), o.touching.as_slice())
    {
        return Err(format!(
            "{p:?}: kept/discarded/touching {:?}/{:?}/{:?} vs oracle {:?}/{:?}/{:?}",
            irr.kept, irr.discarded, irr.touching, o.kept, o.discarded, o.touching
        ));
    }
    Ok(())
}

/// Checks the reduced-space properties of a successful reduction.
pub fn check_reduction(
    t: &DelzantTriple,
    s: &SubspaceData,
    xi: &[FieldElem],
    r: &toriq_core::reduction::ReductionResult,
) -> Result<(), String> {
    use toriq_core::polyhedron::Minimum;
    let (n, k) = (s.n(), s.k());
    let reduced = r.reduced_triple.polyhedron();
    let rep = reduced.enumerate().map_err(|e| e.to_string())?;
    if rep.dim != n - k {
        return Err(format!("dim {} != {}", rep.dim, n - k));
    }
    if !reduced.is_simple().map_err(|e| e.to_string())? {
        return Err("reduced polyhedron not simple".into());
    }
    if !r.reduced_triple.is_valid() {
        return Err(format!("reduced triple invalid: {:?}", r.reduced_triple.validate().diagnostics));
    }
    let pq = t.quasilattice().image(s.projection()).map_err(|e| e.to_string())?;
    for &j in &r.kept {
        let pj = s.project(&t.polyhedron().halfspaces()[j].normal);
        if !pq.contains(&pj) {
            return Err(format!("p(X_{j}) not in p(Q)"));
        }
    }
    for &j in &r.discarded {
        let h = &r.raw_reduced.halfspaces()[j];
        match r.raw_reduced.minimize(&h.normal).map_err(|e| e.to_string())? {
            Minimum::Value { value, .. } if value > h.offset => {}
            other => return Err(format!("discarded {j} has no positive margin: {other:?}")),
        }
    }
    for v in &rep.vertices {
        let mu = r.embed(v);
        if !t.polyhedron().contains(&mu) {
            return Err(format!("embedded vertex {mu:?} outside Δ"));
        }
        if s.j_star(&mu) != xi {
            return Err(format!("embedded vertex {mu:?} off level"));
        }
    }
    Ok(())
}
