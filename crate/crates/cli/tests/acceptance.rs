//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toriq_core::delzant::DelzantTriple;
use toriq_core::field::{Field, FieldElem};
use toriq_core::numlab::{ReductionLab, TripleLab};
use toriq_core::polyhedron::Polyhedron;
use toriq_core::quasilattice::{Quasilattice, SubgroupClass};
use toriq_core::reduction::{
    reduce, reduce_smooth, IsotropyWitness, ReducedSpaceKind, ReductionError, ReductionResult, SubspaceData,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// `[−1,∞) × [0,1]` with normals (1,0), (0,1), (0,−1) and `Q = ℤ²`.
fn strip(field: &Field) -> DelzantTriple {
    let p = Polyhedron::from_ints(field, &[&[1, 0], &[0, 1], &[0, -1]], &[-1, 0, -1]).unwrap();
    DelzantTriple::new(p, Quasilattice::standard(field, 2)).unwrap()
}

fn strip_reduction(field: &Field, a: FieldElem) -> Result<ReductionResult, ReductionError> {
    let s = SubspaceData::new(field, 2, vec![vec![field.int(-1), a]], Some(vec![field.vector(&[0, 1])])).unwrap();
    reduce(&strip(field), &s, &[field.zero()])
}

fn interval_check(r: &ReductionResult, f: &Field) -> Result<(), String> {
    let p = r.reduced_triple.polyhedron();
    let rep = p.enumerate().map_err(|e| e.to_string())?;
    ensure!(rep.vertices == vec![vec![f.zero()], vec![f.one()]], "Δ_𝔨 vertices {:?}", rep.vertices);
    ensure!(p.normals() == vec![vec![f.one()], vec![f.int(-1)]], "reduced normals {:?}", p.normals());
    ensure!(r.kept == vec![1, 2] && r.discarded == vec![0], "kept {:?} discarded {:?}", r.kept, r.discarded);
    Ok(())
}

fn golden() -> Outcome {
    let f = support::sqrt2();
    let a = f.alpha();
    let r = strip_reduction(&f, a.clone()).map_err(|e| e.to_string())?;
    interval_check(&r, &f)?;
    let expected = Quasilattice::new(&f, 1, vec![vec![a.clone()], vec![f.one()]]).unwrap();
    ensure!(r.reduced_triple.quasilattice().equivalent(&expected), "p(Q) = {:?}", r.reduced_triple.quasilattice());
    ensure!(!r.reduced_triple.quasilattice().is_lattice(), "p(Q) discrete");
    ensure!(r.subgroup.class == SubgroupClass::NotClosed, "subgroup {:?}", r.subgroup.class);
    ensure!(r.reduced_atlas.len() == 2, "{} reduced charts", r.reduced_atlas.len());
    for c in &r.reduced_atlas {
        let g = &c.gamma.generators;
        ensure!(g.len() == 1 && !c.gamma.is_finite, "Γ at {:?}: {:?}", c.vertex, c.gamma);
        let ok = [&g[0][0] - &a, &g[0][0] + &a].iter().any(|d| d.fract().is_zero());
        ensure!(ok, "Γ generator {} is not ±a mod ℤ", g[0][0]);
    }
    Ok("Δ_𝔨 = [0,1], p(Q) = ℤ + aℤ, Γ = ⟨a mod ℤ⟩ at both vertices".into())
}

fn rational_degeneration() -> Outcome {
    let q = Field::rationals();
    let r = strip_reduction(&q, q.ratio(1, 2)).map_err(|e| e.to_string())?;
    interval_check(&r, &q)?;
    ensure!(r.subgroup.class == SubgroupClass::Closed, "subgroup {:?}", r.subgroup.class);
    let w = &r.subgroup.witness;
    let target = q.vector(&[-2, 1]);
    let neg: Vec<FieldElem> = target.iter().map(|x| -x).collect();
    ensure!(w.len() == 1 && (w[0] == target || w[0] == neg), "witness {:?}", w);
    ensure!(r.reduced_triple.quasilattice().is_lattice(), "p(Q) not a lattice");
    for c in &r.reduced_atlas {
        ensure!(c.gamma.order == Some(2.into()), "Γ at {:?}: {:?}", c.vertex, c.gamma);
    }
    let smooth = reduce_smooth(&strip(&q), &r.subspace, &[q.zero()]).map_err(|e| e.to_string())?;
    ensure!(smooth.kind == Some(ReducedSpaceKind::Orbifold), "kind {:?}", smooth.kind);
    Ok("closed with witness ±(−2,1), Γ of order 2 at both vertices, orbifold".into())
}

fn isotropy_negative() -> Outcome {
    let f = support::sqrt2();
    let s = SubspaceData::new(&f, 2, vec![f.vector(&[0, 1])], None).unwrap();
    let t = strip(&f);
    match reduce(&t, &s, &[f.zero()]) {
        Err(ReductionError::IsotropyViolation(rep)) => {
            let zero = rep.witnesses.contains(&IsotropyWitness::ZeroNormal { index: 1 });
            ensure!(zero && !rep.uniqueness_check, "witnesses {:?}", rep.witnesses);
            let h = &t.polyhedron().halfspaces()[1];
            ensure!(s.project(&h.normal).iter().all(FieldElem::is_zero) && h.offset.is_zero(), "halfspace 1 is not a zero normal with offset 0");
            Ok("IsotropyViolation, zero normal with offset 0 at halfspace 1".into())
        }
        other => Err(format!("expected IsotropyViolation, got {:?}", other.map(|r| r.kept))),
    }
}

fn free_action_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut passed, mut rejected) = (0, 0);
    while passed < 200 {
        let t = support::random_triple(&mut rng);
        let s = support::random_subspace(&mut rng, t.dim());
        let xi = support::interior_level(&mut rng, &t, &s);
        match reduce(&t, &s, &xi) {
            Ok(r) => {
                support::check_reduction(&t, &s, &xi, &r).map_err(|e| format!("instance {passed}: {e}"))?;
                passed += 1;
            }
            Err(ReductionError::IsotropyViolation(_)) => rejected += 1,
            Err(e) => return Err(format!("unexpected error: {e}")),
        }
    }
    Ok(format!("{passed} passing reductions checked, {rejected} rejected by the isotropy check"))
}

fn oracle_equivalence() -> Outcome {
    let q = Field::rationals();
    let f = support::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let field = if i % 4 == 3 { &f } else { &q };
        let p = support::random_polyhedron(&mut rng, field);
        support::check_against_oracle(&p).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok("500 instances agree".into())
}

fn smooth_sanity() -> Outcome {
    let q = Field::rationals();
    let mut triples = vec![
        DelzantTriple::new(
            Polyhedron::from_ints(&q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]], &[0, 0, 0, -1, -1, -1]).unwrap(),
            Quasilattice::standard(&q, 3),
        )
        .unwrap(),
        strip(&q),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    while triples.len() < 30 {
        let t = support::random_triple(&mut rng);
        if t.validate().smooth == Some(true) {
            triples.push(t);
        }
    }
    for t in &triples {
        ensure!(t.validate().smooth == Some(true), "{:?} not smooth", t.polyhedron());
        for c in t.atlas().map_err(|e| e.to_string())? {
            ensure!(c.gamma.is_trivial, "nontrivial Γ at {:?}", c.vertex);
        }
    }
    let cp2 = DelzantTriple::new(
        Polyhedron::from_ints(&q, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, -1]).unwrap(),
        Quasilattice::standard(&q, 2),
    )
    .unwrap();
    let s = SubspaceData::new(&q, 2, vec![q.vector(&[0, 1])], None).unwrap();
    let r = reduce_smooth(&cp2, &s, &[q.ratio(1, 2)]).map_err(|e| e.to_string())?;
    ensure!(r.kind == Some(ReducedSpaceKind::Manifold), "kind {:?}", r.kind);
    let rep = r.reduced_triple.polyhedron().enumerate().map_err(|e| e.to_string())?;
    ensure!(rep.dim == 1 && rep.vertices.len() == 2 && rep.is_bounded(), "reduced polyhedron {:?}", rep);
    ensure!(r.reduced_atlas.iter().all(|c| c.gamma.is_trivial), "reduced Γ nontrivial");
    Ok(format!("{} smooth triples with trivial Γ; CP² at level 1/2 reduces to a segment manifold", triples.len()))
}

fn numerical_lab() -> Outcome {
    let f = support::sqrt2();
    let a = f.alpha();
    // [0,1] with normals ±1 and Q = ℤ + aℤ.
    let quasisphere = {
        let p = Polyhedron::from_ints(&f, &[&[1], &[-1]], &[0, -1]).unwrap();
        DelzantTriple::new(p, Quasilattice::new(&f, 1, vec![vec![f.one()], vec![a.clone()]]).unwrap()).unwrap()
    };
    let tol = 1e-9;
    let mut lines = Vec::new();
    for (name, t) in [("strip", strip(&f)), ("quasisphere", quasisphere)] {
        let lab = TripleLab::new(&t).map_err(|e| e.to_string())?;
        let rep = lab.sample_report(1000, 7, tol, 4.0).map_err(|e| e.to_string())?;
        ensure!(rep.samples == 1000 * rep.charts, "{name}: {} samples", rep.samples);
        ensure!(rep.failures.is_empty(), "{name}: {:?}", &rep.failures[..rep.failures.len().min(3)]);
        ensure!(rep.max_psi <= tol && rep.max_level_residual <= tol, "{name}: {rep:?}");
        let margin = rep.min_margin.unwrap_or(f64::NEG_INFINITY);
        ensure!(margin >= -tol, "{name}: margin {margin:e}");
        lines.push(format!("{name} |Ψ| ≤ {:.1e} margin ≥ {:.1e}", rep.max_psi, margin));
    }
    let r = strip_reduction(&f, a).map_err(|e| e.to_string())?;
    let lab = ReductionLab::new(&r).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut moduli = 0.0f64;
    for c in 0..lab.reduced().charts() {
        for p in lab.reduced().sample_level_set(c, 200, 4.0, 9).map_err(|e| e.to_string())? {
            let z = lab.lift(c, &p.z).map_err(|e| e.to_string())?;
            let s: Vec<f64> = (0..z.len()).map(|_| rng.random::<f64>()).collect();
            let z = lab.act(c, &z, &s[..z.len() - 1]).map_err(|e| e.to_string())?;
            let (w, _) = lab.normal_form(c, &z, tol).map_err(|e| e.to_string())?;
            for (x, y) in z.iter().zip(&w) {
                moduli = moduli.max((x.norm() - y.norm()).abs());
            }
        }
    }
    ensure!(moduli <= 1e-12, "normal_form moves a modulus by {moduli:e}");
    let per_chart = 100usize.div_ceil(lab.reduced().charts());
    let trips = lab.round_trips(per_chart, 10, 4.0, tol).map_err(|e| e.to_string())?;
    let worst = trips.iter().copied().fold(0.0, f64::max);
    ensure!(trips.len() >= 100 && worst <= 1e-8, "{} round trips, worst {worst:e}", trips.len());
    lines.push(format!("moduli drift {moduli:.1e}, {} round trips ≤ {worst:.1e}", trips.len()));
    Ok(lines.join("; "))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("toriq-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let svg = |tag: &str| dir.join(format!("{tag}.svg")).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["validate".into(), data("strip.json")],
        vec!["reduce".into(), data("strip.json"), "--reduction".into(), "golden".into()],
        vec!["atlas".into(), data("quasisphere.json")],
        vec!["classify".into(), data("strip.json"), "--subspace".into(), "k_sqrt2".into()],
        vec!["sample".into(), data("strip.json"), "--count".into(), "200".into(), "--seed".into(), "42".into()],
        vec!["render".into(), data("strip.json"), "--what".into(), "polyhedron".into(), "--subspace".into(), "k_sqrt2".into(), "--out".into(), svg("poly")],
        vec!["render".into(), data("strip.json"), "--what".into(), "reduction".into(), "--reduction".into(), "golden".into(), "--out".into(), svg("red")],
        vec!["render".into(), data("quasisphere.json"), "--what".into(), "polyhedron".into(), "--out".into(), svg("qs")],
    ];
    let mut compared = 0;
    for args in &runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_toriq")).args(args).env_remove("TORIQ_SEED").output().map_err(|e| e.to_string())?;
            ensure!(out.status.success(), "{args:?} exited {:?}", out.status.code());
            let file = match args.iter().position(|a| a == "--out") {
                Some(i) => std::fs::read(&args[i + 1]).map_err(|e| e.to_string())?,
                None => Vec::new(),
            };
            outputs.push((out.stdout, file));
        }
        ensure!(outputs[0] == outputs[1], "{args:?} differs between runs");
        ensure!(!outputs[0].0.is_empty() || !outputs[0].1.is_empty(), "{args:?} produced nothing");
        compared += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{compared} invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden quasifold reduction over Q(sqrt 2)", Duration::from_secs(1), golden),
        ("rational degeneration a = 1/2", Duration::from_secs(1), rational_degeneration),
        ("isotropy violation on the strip", Duration::from_secs(1), isotropy_negative),
        ("free-action property suite", Duration::from_secs(60), free_action_suite),
        ("oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("smooth-case sanity", Duration::from_secs(5), smooth_sanity),
        ("numerical lab", Duration::from_secs(30), numerical_lab),
        ("CLI determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}, but took {elapsed:.2?} > {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
