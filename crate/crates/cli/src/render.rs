//! Deterministic SVG for polyhedra of dimension at most 2.
//!
//! Unbounded polyhedra are cut to a box around the vertices and the ends of
//! their rays. Facet lines are solid, other halfspace boundaries dashed.

use std::fmt::Write as _;

use thiserror::Error;

use toriq_core::delzant::DelzantTriple;
use toriq_core::field::FieldElem;
use toriq_core::polyhedron::Polyhedron;
use toriq_core::reduction::{ReductionResult, SubspaceData};

const SIZE: f64 = 480.0;
const STRIP_HEIGHT: f64 = 120.0;
const PAD: f64 = 24.0;
const REGION: &str = "#dbe7f5";
const INK: &str = "#1f3b63";
const SLICE: &str = "#2a7f62";
const CUT: &str = "#c0392b";

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot draw dimension {0}; at most 2 is supported")]
    DimensionUnsupported(usize),
    #[error("{0}")]
    Geometry(String),
}

#[derive(Clone, Copy, PartialEq)]
enum Stroke {
    Solid,
    Dashed,
}

struct Boundary {
    normal: Vec<f64>,
    offset: f64,
    stroke: Stroke,
}

/// An affine line `base + t·dir`, drawn across the box.
struct Overlay {
    base: Vec<f64>,
    dir: Vec<f64>,
    color: &'static str,
}

struct Scene {
    dim: usize,
    region: Vec<(Vec<f64>, f64)>,
    boundaries: Vec<Boundary>,
    extent: Vec<Vec<f64>>,
    overlays: Vec<Overlay>,
    /// Thick segments with endpoint dots (exact polygonal chains).
    cuts: Vec<Vec<Vec<f64>>>,
}

fn floats(v: &[FieldElem]) -> Vec<f64> {
    v.iter().map(FieldElem::to_f64).collect()
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Vertices plus vertex-anchored ray tips, for the bounding box.
fn extent_points(p: &Polyhedron) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>), RenderError> {
    let rep = p.enumerate().map_err(|e| RenderError::Geometry(e.to_string()))?;
    let verts: Vec<Vec<f64>> = rep.vertices.iter().map(|v| floats(v)).collect();
    let mut pts = verts.clone();
    let rays: Vec<Vec<f64>> = rep.rays.iter().map(|r| floats(r)).collect();
    if !rays.is_empty() {
        let span = spread(&verts).max(1.0);
        for v in &verts {
            for r in &rays {
                let len = dotf(r, r).sqrt();
                pts.push(v.iter().zip(r).map(|(a, b)| a + 2.5 * span * b / len).collect());
            }
        }
    }
    Ok((verts, pts))
}

fn spread(pts: &[Vec<f64>]) -> f64 {
    let dim = pts.first().map_or(0, Vec::len);
    (0..dim)
        .map(|i| {
            let lo = pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn boundaries(p: &Polyhedron, solid: &[usize]) -> Vec<Boundary> {
    p.halfspaces()
        .iter()
        .enumerate()
        .filter(|(_, h)| !h.has_zero_normal())
        .map(|(j, h)| Boundary {
            normal: floats(&h.normal),
            offset: h.offset.to_f64(),
            stroke: if solid.contains(&j) { Stroke::Solid } else { Stroke::Dashed },
        })
        .collect()
}

fn region(p: &Polyhedron) -> Vec<(Vec<f64>, f64)> {
    p.halfspaces().iter().map(|h| (floats(&h.normal), h.offset.to_f64())).collect()
}

pub fn polyhedron(t: &DelzantTriple, overlay: Option<(&SubspaceData, &[FieldElem])>) -> Result<String, RenderError> {
    let p = t.polyhedron();
    let n = p.dim_ambient();
    if n > 2 {
        return Err(RenderError::DimensionUnsupported(n));
    }
    let kept = p.irredundant().map_err(|e| RenderError::Geometry(e.to_string()))?.kept;
    let (_, extent) = extent_points(p)?;
    let mut overlays = Vec::new();
    if let Some((s, mu0)) = overlay {
        if n == 2 {
            let origin = vec![0.0; 2];
            // 𝔨 itself, through the origin.
            overlays.push(Overlay { base: origin, dir: floats(&s.k_basis()[0]), color: CUT });
            // The slice μ₀ + ker j*.
            let dir = floats(&s.p_star(&[s.field().one()]));
            overlays.push(Overlay { base: floats(mu0), dir, color: SLICE });
        }
    }
    let mut extent = extent;
    if !overlays.is_empty() {
        extent.push(vec![0.0; n]);
    }
    draw(&Scene { dim: n, region: region(p), boundaries: boundaries(p, &kept), extent, overlays, cuts: Vec::new() })
}

pub fn reduction(t: &DelzantTriple, r: &ReductionResult) -> Result<String, RenderError> {
    let n = t.dim();
    let s = &r.subspace;
    if n == 2 {
        let p = t.polyhedron();
        let (_, extent) = extent_points(p)?;
        let mu0 = floats(&r.translation_lift);
        let slice = Overlay { base: mu0, dir: floats(&s.p_star(&[s.field().one()])), color: SLICE };
        let reduced = r.reduced_triple.polyhedron();
        let rep = reduced.enumerate().map_err(|e| RenderError::Geometry(e.to_string()))?;
        let mut cut: Vec<Vec<f64>> = rep.vertices.iter().map(|v| floats(&r.embed(v))).collect();
        if let (Some(ray), Some(v)) = (rep.rays.first(), rep.vertices.first()) {
            let far: Vec<FieldElem> = v.iter().zip(ray).map(|(a, b)| a + &(b * &s.field().int(1000))).collect();
            cut.push(floats(&r.embed(&far)));
        }
        cut.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut extent = extent;
        extent.extend(cut.iter().cloned());
        return draw(&Scene {
            dim: 2,
            region: region(p),
            boundaries: boundaries(p, &r.kept),
            extent,
            overlays: vec![slice],
            cuts: vec![cut],
        });
    }
    let m = n - s.k();
    if m > 2 {
        return Err(RenderError::DimensionUnsupported(m));
    }
    let raw = &r.raw_reduced;
    let (_, extent) = extent_points(raw)?;
    draw(&Scene { dim: m, region: region(raw), boundaries: boundaries(raw, &r.kept), extent, overlays: Vec::new(), cuts: Vec::new() })
}

struct Frame {
    lo: Vec<f64>,
    hi: Vec<f64>,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(dim: usize, pts: &[Vec<f64>]) -> Self {
        let mut lo: Vec<f64> = (0..dim).map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
        let mut hi: Vec<f64> = (0..dim).map(|i| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let span = spread(pts).max(1.0);
        for i in 0..dim {
            lo[i] -= 0.15 * span;
            hi[i] += 0.15 * span;
        }
        let height = if dim == 1 { STRIP_HEIGHT } else { SIZE };
        let sx = (SIZE - 2.0 * PAD) / (hi[0] - lo[0]);
        let scale = if dim == 2 { sx.min((SIZE - 2.0 * PAD) / (hi[1] - lo[1])) } else { sx };
        Frame { lo, hi, scale, height }
    }

    fn to_canvas(&self, p: &[f64]) -> (f64, f64) {
        let x = PAD + (p[0] - self.lo[0]) * self.scale;
        let y = if p.len() > 1 { self.height - PAD - (p[1] - self.lo[1]) * self.scale } else { self.height / 2.0 };
        (x, y)
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        vec![
            vec![self.lo[0], self.lo[1]],
            vec![self.hi[0], self.lo[1]],
            vec![self.hi[0], self.hi[1]],
            vec![self.lo[0], self.hi[1]],
        ]
    }
}

/// Sutherland–Hodgman against `⟨x, a⟩ ≥ b`.
fn clip(poly: &[Vec<f64>], a: &[f64], b: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let (fp, fq) = (dotf(p, a) - b, dotf(q, a) - b);
        if fp >= 0.0 {
            out.push(p.clone());
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push(p.iter().zip(q).map(|(x, y)| x + t * (y - x)).collect());
        }
    }
    out
}

/// Part of the line `base + t·dir` inside the box.
fn line_in_box(f: &Frame, base: &[f64], dir: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..2 {
        if dir[i].abs() < 1e-15 {
            if base[i] < f.lo[i] || base[i] > f.hi[i] {
                return None;
            }
        } else {
            let a = (f.lo[i] - base[i]) / dir[i];
            let b = (f.hi[i] - base[i]) / dir[i];
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 < t1).then(|| {
        let at = |t: f64| base.iter().zip(dir).map(|(x, d)| x + t * d).collect();
        (at(t0), at(t1))
    })
}

fn draw(scene: &Scene) -> Result<String, RenderError> {
    if scene.dim == 0 || scene.dim > 2 {
        return Err(RenderError::DimensionUnsupported(scene.dim));
    }
    let f = Frame::new(scene.dim, &scene.extent);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = SIZE,
        h = f.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let dash = |s: Stroke| if s == Stroke::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
    if scene.dim == 2 {
        let mut poly = f.corners();
        for (a, b) in &scene.region {
            if a.iter().all(|x| *x == 0.0) {
                continue;
            }
            poly = clip(&poly, a, *b);
        }
        if !poly.is_empty() {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| {
                    let (x, y) = f.to_canvas(p);
                    format!("{},{}", num(x), num(y))
                })
                .collect();
            let _ = writeln!(svg, r#"<polygon points="{}" fill="{REGION}" stroke="none"/>"#, pts.join(" "));
        }
        for b in &scene.boundaries {
            // Point on the line and its direction.
            let nn = dotf(&b.normal, &b.normal);
            let base: Vec<f64> = b.normal.iter().map(|x| x * b.offset / nn).collect();
            let dir = vec![-b.normal[1], b.normal[0]];
            if let Some((p, q)) = line_in_box(&f, &base, &dir) {
                let ((x1, y1), (x2, y2)) = (f.to_canvas(&p), f.to_canvas(&q));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{INK}" stroke-width="2"{}/>"#,
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2),
                    dash(b.stroke)
                );
            }
        }
        for o in &scene.overlays {
            if let Some((p, q)) = line_in_box(&f, &o.base, &o.dir) {
                let ((x1, y1), (x2, y2)) = (f.to_canvas(&p), f.to_canvas(&q));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.5"/>"#,
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2),
                    o.color
                );
            }
        }
    } else {
        let (mut lo, mut hi) = (f.lo[0], f.hi[0]);
        for (a, b) in &scene.region {
            if a[0] > 0.0 {
                lo = lo.max(b / a[0]);
            } else if a[0] < 0.0 {
                hi = hi.min(b / a[0]);
            }
        }
        let y = f.height / 2.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{REGION}" stroke-width="10"/>"#,
            num(f.to_canvas(&[lo]).0),
            num(y),
            num(f.to_canvas(&[hi]).0),
            num(y)
        );
        for b in &scene.boundaries {
            let x = f.to_canvas(&[b.offset / b.normal[0]]).0;
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{INK}" stroke-width="2"{}/>"#,
                num(x),
                num(y - 20.0),
                num(x),
                num(y + 20.0),
                dash(b.stroke)
            );
        }
    }
    for chain in &scene.cuts {
        let pts: Vec<(f64, f64)> = chain.iter().map(|p| f.to_canvas(p)).collect();
        for w in pts.windows(2) {
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{CUT}" stroke-width="4"/>"#,
                num(w[0].0),
                num(w[0].1),
                num(w[1].0),
                num(w[1].1)
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="4" fill="{CUT}"/>"#, num(*x), num(*y));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
