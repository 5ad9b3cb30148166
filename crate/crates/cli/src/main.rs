//! `toriq`: validate, reduce and inspect nonrational Delzant triples.
//!
//! Exit codes: 0 success, 1 validation failure, 2 isotropy violation,
//! 3 I/O, parse or usage error.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use toriq_core::delzant::DelzantTriple;
use toriq_core::field::FieldElem;
use toriq_core::io::{self, Document, ElemRepr, IoError};
use toriq_core::numlab::{TripleLab, DEFAULT_RADIUS_CAP, DEFAULT_TOL};
use toriq_core::reduction::{self, ReductionError, ReductionResult, SubspaceData};

const SEED_ENV: &str = "TORIQ_SEED";

#[derive(Parser)]
#[command(name = "toriq", version, about = "Exact toric geometry over real number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReductionSelect {
    /// Named reduction request from the document.
    #[arg(long, conflicts_with_all = ["subspace", "level"])]
    reduction: Option<String>,
    #[arg(long)]
    triple: Option<String>,
    #[arg(long)]
    subspace: Option<String>,
    /// Level ξ as `p/q,...` or a JSON array of elements; defaults to 0.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderWhat {
    Polyhedron,
    Reduction,
}

#[derive(Subcommand)]
enum Command {
    /// Check every triple (or one) for the Delzant hypotheses.
    Validate {
        path: PathBuf,
        #[arg(long)]
        triple: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Reduce a triple by a subspace at a level.
    Reduce {
        path: PathBuf,
        #[command(flatten)]
        select: ReductionSelect,
        #[command(flatten)]
        output: Output,
    },
    /// Per-vertex charts with their chart groups.
    Atlas {
        path: PathBuf,
        #[arg(long)]
        triple: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Is the subgroup exp(𝔨) closed, and is the projected quasilattice discrete?
    Classify {
        path: PathBuf,
        #[arg(long)]
        triple: Option<String>,
        #[arg(long)]
        subspace: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the level set chart by chart and check the moment map.
    Sample {
        path: PathBuf,
        #[arg(long)]
        triple: Option<String>,
        /// Samples per chart.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Overridden by TORIQ_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
        radius_cap: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a 1D or 2D polyhedron, or a reduction, as SVG.
    Render {
        path: PathBuf,
        #[arg(long, value_enum)]
        what: RenderWhat,
        #[command(flatten)]
        select: ReductionSelect,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Io(IoError),
    Invalid(String),
    Isotropy(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Isotropy(_) => 2,
            Failure::Usage(_) | Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Isotropy(m) => m.clone(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(IoError::Io(e)))?;
    Ok(io::parse_document(&text)?)
}

fn emit(output: &Output, json: &str) -> Outcome {
    match &output.out {
        Some(p) => fs::write(p, json).map_err(|e| Failure::Io(IoError::Io(e))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn pick<'a, T>(map: &'a std::collections::BTreeMap<String, T>, name: Option<&str>, what: &str) -> Result<(&'a str, &'a T), Failure> {
    match name {
        Some(n) => map
            .get_key_value(n)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Failure::Usage(format!("no {what} named {n:?}"))),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().unwrap();
            Ok((k.as_str(), v))
        }
        None => Err(Failure::Usage(format!("document has {} {what}s; choose one with --{what}", map.len()))),
    }
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

struct Selected<'a> {
    triple_name: String,
    triple: &'a DelzantTriple,
    subspace: &'a SubspaceData,
    level: Vec<FieldElem>,
}

fn select<'a>(doc: &'a Document, s: &ReductionSelect) -> Result<Selected<'a>, Failure> {
    if s.reduction.is_some() || (s.subspace.is_none() && s.triple.is_none() && !doc.reductions.is_empty()) {
        let (_, req) = pick(&doc.reductions, s.reduction.as_deref(), "reduction")?;
        return Ok(Selected {
            triple_name: req.triple.clone(),
            triple: &doc.triples[&req.triple],
            subspace: &doc.subspaces[&req.subspace],
            level: req.level.clone(),
        });
    }
    let (tname, triple) = pick(&doc.triples, s.triple.as_deref(), "triple")?;
    let (_, subspace) = pick(&doc.subspaces, s.subspace.as_deref(), "subspace")?;
    if subspace.n() != triple.dim() {
        return Err(Failure::Usage(format!("subspace lives in dimension {}, triple in {}", subspace.n(), triple.dim())));
    }
    let level = match &s.level {
        Some(text) => io::parse_level(&doc.field, text)?,
        None => vec![doc.field.zero(); subspace.k()],
    };
    if level.len() != subspace.k() {
        return Err(Failure::Usage(format!("level needs {} entries", subspace.k())));
    }
    Ok(Selected { triple_name: tname.to_string(), triple, subspace, level })
}

fn run_reduction(sel: &Selected) -> Result<ReductionResult, ReductionError> {
    if sel.triple.validate().smooth == Some(true) {
        reduction::reduce_smooth(sel.triple, sel.subspace, &sel.level)
    } else {
        reduction::reduce(sel.triple, sel.subspace, &sel.level)
    }
}

fn validate(path: &Path, triple: Option<&str>, output: &Output) -> Outcome {
    let doc = load(path)?;
    let names: Vec<String> = match triple {
        Some(t) => vec![pick(&doc.triples, Some(t), "triple")?.0.to_string()],
        None => doc.triples.keys().cloned().collect(),
    };
    let mut reports = Vec::new();
    let mut all_valid = true;
    for name in &names {
        let r = doc.triples[name].validate();
        if r.is_valid() {
            let smooth = match r.smooth {
                Some(true) => ", smooth",
                Some(false) => ", not smooth",
                None => "",
            };
            eprintln!("{name}: valid{smooth}");
        } else {
            all_valid = false;
            eprintln!("{name}: invalid");
            for d in &r.diagnostics {
                eprintln!("  - {d}");
            }
        }
        reports.push(io::ValidationOut::new(name, &r));
    }
    emit(output, &io::to_json(&reports))?;
    if all_valid {
        Ok(())
    } else {
        Err(Failure::Invalid("validation failed".into()))
    }
}

fn reduce(path: &Path, s: &ReductionSelect, output: &Output) -> Outcome {
    let doc = load(path)?;
    let sel = select(&doc, s)?;
    match run_reduction(&sel) {
        Ok(r) => {
            let verts: Vec<String> = r
                .reduced_atlas
                .iter()
                .map(|c| format!("({})", c.vertex.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
                .collect();
            eprintln!(
                "{}: reduced to dimension {}, kept {:?}, discarded {:?}, subgroup {}, vertices {}",
                sel.triple_name,
                r.reduced_triple.dim(),
                r.kept,
                r.discarded,
                io::class_name(r.subgroup.class),
                verts.join(" ")
            );
            if let Some(k) = r.kind {
                eprintln!("reduced space: {}", io::kind_name(k));
            }
            emit(output, &io::to_json(&io::ReductionOut::new(&r)))
        }
        Err(ReductionError::IsotropyViolation(rep)) => {
            eprintln!("isotropy violation: {}", rep.summary());
            let out = io::IsotropyOut::new(&rep);
            for w in &out.witnesses {
                eprintln!("  witness: {}", serde_json::to_string(w).unwrap());
            }
            emit(output, &io::to_json(&io::IsotropyViolationOut { error: "IsotropyViolation", isotropy: out }))?;
            Err(Failure::Isotropy("0-dimensional isotropy fails".into()))
        }
        Err(e @ (ReductionError::BadSubspace(_) | ReductionError::LevelMismatch { .. })) => Err(Failure::Usage(e.to_string())),
        Err(e) => Err(Failure::Invalid(e.to_string())),
    }
}

fn atlas(path: &Path, triple: Option<&str>, output: &Output) -> Outcome {
    let doc = load(path)?;
    let (name, t) = pick(&doc.triples, triple, "triple")?;
    let charts = t.atlas().map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
    for c in &charts {
        let v: Vec<String> = c.vertex.iter().map(ToString::to_string).collect();
        let g = if c.gamma.is_trivial {
            "trivial".to_string()
        } else if let Some(o) = &c.gamma.order {
            format!("finite of order {o}")
        } else {
            format!("infinite, {} generator(s)", c.gamma.generators.len())
        };
        eprintln!("vertex ({}): tight {:?}, Γ {g}", v.join(", "), c.tight);
    }
    let out = io::AtlasOut { triple: name.to_string(), charts: charts.iter().map(io::ChartOut::new).collect() };
    emit(output, &io::to_json(&out))
}

#[derive(Serialize)]
struct ClassifyOut {
    triple: String,
    subspace: String,
    class: &'static str,
    witness: Vec<Vec<ElemRepr>>,
    quasilattice_is_lattice: bool,
    projected_quasilattice_is_lattice: bool,
}

fn classify(path: &Path, triple: Option<&str>, subspace: Option<&str>, output: &Output) -> Outcome {
    let doc = load(path)?;
    let (tname, t) = pick(&doc.triples, triple, "triple")?;
    let (sname, s) = pick(&doc.subspaces, subspace, "subspace")?;
    if s.n() != t.dim() {
        return Err(Failure::Usage(format!("subspace lives in dimension {}, triple in {}", s.n(), t.dim())));
    }
    let q = t.quasilattice();
    let c = q.classify_subgroup(s.k_basis());
    let projected = q.image(s.projection()).map_err(|e| Failure::Invalid(e.to_string()))?;
    let out = ClassifyOut {
        triple: tname.to_string(),
        subspace: sname.to_string(),
        class: io::class_name(c.class),
        witness: c.witness.iter().map(|w| io::vector_repr(w)).collect(),
        quasilattice_is_lattice: q.is_lattice(),
        projected_quasilattice_is_lattice: projected.is_lattice(),
    };
    eprintln!("{tname} / {sname}: {}, projected quasilattice {}", out.class, if out.projected_quasilattice_is_lattice { "discrete" } else { "dense" });
    emit(output, &io::to_json(&out))
}

#[allow(clippy::too_many_arguments)]
fn sample(path: &Path, triple: Option<&str>, count: usize, seed_flag: u64, tol: f64, cap: f64, output: &Output) -> Outcome {
    let doc = load(path)?;
    let (name, t) = pick(&doc.triples, triple, "triple")?;
    let seed = seed(seed_flag)?;
    let lab = TripleLab::new(t).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
    let rep = lab.sample_report(count, seed, tol, cap).map_err(|e| Failure::Invalid(format!("{name}: {e}")))?;
    eprintln!(
        "{name}: {} samples over {} charts, max |Ψ| {:e}, {} failures",
        rep.samples,
        rep.charts,
        rep.max_psi,
        rep.failures.len()
    );
    emit(output, &io::to_json(&rep))?;
    if rep.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invalid("sample checks failed".into()))
    }
}

fn render_cmd(path: &Path, what: RenderWhat, s: &ReductionSelect, out: &Path) -> Outcome {
    let doc = load(path)?;
    let svg = match what {
        RenderWhat::Polyhedron => {
            let (name, t) = pick(&doc.triples, s.triple.as_deref(), "triple")?;
            let overlay = match s.subspace.as_deref() {
                Some(_) => {
                    let sel = select(&doc, s)?;
                    Some((sel.subspace.clone(), sel.subspace.lift(&sel.level).map_err(|e| Failure::Usage(e.to_string()))?))
                }
                None => None,
            };
            render::polyhedron(t, overlay.as_ref().map(|(s, mu)| (s, mu.as_slice())))
                .map_err(|e| Failure::Invalid(format!("{name}: {e}")))?
        }
        RenderWhat::Reduction => {
            let sel = select(&doc, s)?;
            let r = match run_reduction(&sel) {
                Ok(r) => r,
                Err(ReductionError::IsotropyViolation(rep)) => return Err(Failure::Isotropy(rep.summary())),
                Err(e) => return Err(Failure::Invalid(e.to_string())),
            };
            render::reduction(sel.triple, &r).map_err(|e| Failure::Invalid(e.to_string()))?
        }
    };
    fs::write(out, svg).map_err(|e| Failure::Io(IoError::Io(e)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate { path, triple, output } => validate(path, triple.as_deref(), output),
        Command::Reduce { path, select, output } => reduce(path, select, output),
        Command::Atlas { path, triple, output } => atlas(path, triple.as_deref(), output),
        Command::Classify { path, triple, subspace, output } => classify(path, triple.as_deref(), subspace.as_deref(), output),
        Command::Sample { path, triple, count, seed, tol, radius_cap, output } => {
            sample(path, triple.as_deref(), *count, *seed, *tol, *radius_cap, output)
        }
        Command::Render { path, what, select, out } => render_cmd(path, *what, select, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
