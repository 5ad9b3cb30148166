//! Floating-point checks of the construction on sampled level-set points.
//!
//! Coordinates of `ℂ^d` are indexed by the original halfspace order. The
//! standard torus acts by `z_j ↦ e^{2πi x_j} z_j`, so `J_j(z) = |z_j|² + λ_j`
//! and `Ψ = i*∘J` pairs `J` with a basis of `ker π`.
//!
//! Randomness: ChaCha8 seeded with `seed`, stream = chart index. Points are
//! drawn uniformly from the polydisc of radius `radius_cap` (radius
//! `cap·√u`, angle `2πv`), rejected unless every chart inequality holds.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::delzant::{DelzantError, DelzantTriple, VertexChart};
use crate::field::FieldElem;
use crate::linalg::Mat;
use crate::reduction::ReductionResult;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RADIUS_CAP: f64 = 4.0;
/// Bound on `Σ|c_i|` for words `Σ c_i g_i` in the chart-group generators.
pub const WORD_BOUND: i64 = 8;

const STARVATION_RATE: f64 = 1e-3;
const STARVATION_MIN_ATTEMPTS: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumLabError {
    #[error("chart {chart} starved: {accepted} of {attempts} draws accepted")]
    ChartStarved { chart: usize, accepted: usize, attempts: u64 },
    #[error("moment map residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("coordinate {index} has modulus {modulus:e}; phase undefined")]
    ZeroCoordinate { index: usize, modulus: f64 },
    #[error("point is off the reduced level: |Φ_𝔨| = {value:e}")]
    NotOnLevel { value: f64 },
    #[error("no chart {0}")]
    NoSuchChart(usize),
    #[error(transparent)]
    Delzant(#[from] DelzantError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetPoint {
    pub z: Vec<Complex64>,
    pub chart_index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentValue {
    pub mu: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub seed: u64,
    pub count_per_chart: usize,
    pub charts: usize,
    pub samples: usize,
    pub tol: f64,
    pub radius_cap: f64,
    pub max_psi: f64,
    pub max_level_residual: f64,
    pub max_moment_residual: f64,
    /// Least `⟨Φ(z), X_j⟩ − λ_j` seen; `None` without samples.
    pub min_margin: Option<f64>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
struct ChartF {
    tight: Vec<usize>,
    nontight: Vec<usize>,
    /// Row per nontight index, over `tight`.
    a: Vec<Vec<f64>>,
    constants: Vec<f64>,
}

impl ChartF {
    fn from_exact(c: &VertexChart) -> Self {
        ChartF {
            tight: c.tight.clone(),
            nontight: c.nontight().to_vec(),
            a: c.a_coeffs.iter().map(|r| to_f64s(r)).collect(),
            constants: c.inequalities.iter().map(|i| i.constant.to_f64()).collect(),
        }
    }

    /// `Σ_h a_{jh}|z_h|² + c_j` per nontight row.
    fn radii_sq(&self, tight_moduli_sq: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.constants)
            .map(|(row, c)| row.iter().zip(tight_moduli_sq).map(|(a, m)| a * m).sum::<f64>() + c)
            .collect()
    }
}

fn to_f64s(v: &[FieldElem]) -> Vec<f64> {
    v.iter().map(FieldElem::to_f64).collect()
}

fn random_in_disc(rng: &mut ChaCha8Rng, cap: f64) -> Complex64 {
    let r = cap * rng.random::<f64>().sqrt();
    let t = 2.0 * PI * rng.random::<f64>();
    Complex64::from_polar(r, t)
}

fn phase(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Float image of a valid triple together with its atlas.
#[derive(Debug, Clone)]
pub struct TripleLab {
    n: usize,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    ker: Vec<Vec<f64>>,
    charts: Vec<ChartF>,
}

impl TripleLab {
    pub fn new(triple: &DelzantTriple) -> Result<Self, NumLabError> {
        let atlas = triple.atlas()?;
        let data = triple.construction();
        Ok(TripleLab {
            n: triple.dim(),
            normals: triple.polyhedron().halfspaces().iter().map(|h| to_f64s(&h.normal)).collect(),
            offsets: to_f64s(&data.lambda),
            ker: data.ker_basis.iter().map(|k| to_f64s(k)).collect(),
            charts: atlas.iter().map(ChartF::from_exact).collect(),
        })
    }

    pub fn charts(&self) -> usize {
        self.charts.len()
    }

    fn chart(&self, i: usize) -> Result<&ChartF, NumLabError> {
        self.charts.get(i).ok_or(NumLabError::NoSuchChart(i))
    }

    pub fn sample_level_set(
        &self,
        chart_index: usize,
        count: usize,
        radius_cap: f64,
        seed: u64,
    ) -> Result<Vec<LevelSetPoint>, NumLabError> {
        let chart = self.chart(chart_index)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chart_index as u64);
        let d = self.offsets.len();
        let mut out = Vec::with_capacity(count);
        let mut attempts: u64 = 0;
        while out.len() < count {
            attempts += 1;
            let zt: Vec<Complex64> = (0..self.n).map(|_| random_in_disc(&mut rng, radius_cap)).collect();
            let m: Vec<f64> = zt.iter().map(|z| z.norm_sqr()).collect();
            let radii = chart.radii_sq(&m);
            if radii.iter().all(|&r| r > 0.0) {
                let mut z = vec![Complex64::new(0.0, 0.0); d];
                for (&h, v) in chart.tight.iter().zip(&zt) {
                    z[h] = *v;
                }
                for (&j, r) in chart.nontight.iter().zip(&radii) {
                    z[j] = Complex64::new(r.sqrt(), 0.0);
                }
                out.push(LevelSetPoint { z, chart_index, seed });
            } else if attempts >= STARVATION_MIN_ATTEMPTS
                && attempts.is_multiple_of(STARVATION_MIN_ATTEMPTS)
                && (out.len() as f64) < STARVATION_RATE * attempts as f64
            {
                return Err(NumLabError::ChartStarved { chart: chart_index, accepted: out.len(), attempts });
            }
        }
        Ok(out)
    }

    /// The point of the chart lying over the vertex.
    pub fn chart_center(&self, chart_index: usize) -> Result<Vec<Complex64>, NumLabError> {
        let chart = self.chart(chart_index)?;
        let mut z = vec![Complex64::new(0.0, 0.0); self.offsets.len()];
        for (&j, r) in chart.nontight.iter().zip(chart.radii_sq(&vec![0.0; self.n])) {
            z[j] = Complex64::new(r.max(0.0).sqrt(), 0.0);
        }
        Ok(z)
    }

    pub fn j_map(&self, z: &[Complex64]) -> Vec<f64> {
        z.iter().zip(&self.offsets).map(|(z, l)| z.norm_sqr() + l).collect()
    }

    pub fn psi(&self, z: &[Complex64]) -> Vec<f64> {
        let j = self.j_map(z);
        self.ker.iter().map(|k| k.iter().zip(&j).map(|(a, b)| a * b).sum()).collect()
    }

    /// Least-squares solution of `π*(μ) = J(z)`.
    pub fn moment_map(&self, z: &[Complex64], tol: f64) -> Result<MomentValue, NumLabError> {
        let d = self.offsets.len();
        let a = DMatrix::from_fn(d, self.n, |j, i| self.normals[j][i]);
        let b = DVector::from_vec(self.j_map(z));
        let mu = a.clone().svd(true, true).solve(&b, 1e-12).expect("SVD with both factors");
        let residual = (&a * &mu - &b).amax();
        let limit = 10.0 * tol;
        if residual > limit {
            return Err(NumLabError::ResidualTooLarge { residual, limit });
        }
        Ok(MomentValue { mu: mu.iter().copied().collect(), residual })
    }

    /// `min_j ⟨μ, X_j⟩ − λ_j`.
    pub fn margin(&self, mu: &[f64]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(x, l)| x.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>() - l)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_j ||z_j|² − (Σ_h a_{jh}(|z_h|²+λ_h) − λ_j)|` over nontight j.
    pub fn level_residual(&self, chart_index: usize, z: &[Complex64]) -> Result<f64, NumLabError> {
        let chart = self.chart(chart_index)?;
        let m: Vec<f64> = chart.tight.iter().map(|&h| z[h].norm_sqr()).collect();
        Ok(chart
            .nontight
            .iter()
            .zip(chart.radii_sq(&m))
            .map(|(&j, r)| (z[j].norm_sqr() - r).abs())
            .fold(0.0, f64::max))
    }

    pub fn sample_report(&self, count: usize, seed: u64, tol: f64, radius_cap: f64) -> Result<SampleReport, NumLabError> {
        let mut rep = SampleReport {
            seed,
            count_per_chart: count,
            charts: self.charts.len(),
            samples: 0,
            tol,
            radius_cap,
            max_psi: 0.0,
            max_level_residual: 0.0,
            max_moment_residual: 0.0,
            min_margin: None,
            failures: Vec::new(),
        };
        for c in 0..self.charts.len() {
            for (i, p) in self.sample_level_set(c, count, radius_cap, seed)?.iter().enumerate() {
                rep.samples += 1;
                let psi = self.psi(&p.z).iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let level = self.level_residual(c, &p.z)?;
                rep.max_psi = rep.max_psi.max(psi);
                rep.max_level_residual = rep.max_level_residual.max(level);
                if psi > tol {
                    rep.failures.push(format!("chart {c} sample {i}: |Ψ| = {psi:e}"));
                }
                if level > tol {
                    rep.failures.push(format!("chart {c} sample {i}: level residual {level:e}"));
                }
                match self.moment_map(&p.z, tol) {
                    Ok(m) => {
                        rep.max_moment_residual = rep.max_moment_residual.max(m.residual);
                        let margin = self.margin(&m.mu);
                        rep.min_margin = Some(rep.min_margin.map_or(margin, |x| x.min(margin)));
                        if margin < -tol {
                            rep.failures.push(format!("chart {c} sample {i}: Φ(z) outside Δ by {:e}", -margin));
                        }
                    }
                    Err(e) => rep.failures.push(format!("chart {c} sample {i}: {e}")),
                }
            }
        }
        Ok(rep)
    }
}

#[derive(Debug, Clone)]
struct ReducedChartF {
    /// Original indices of the reduced chart's tight facets.
    tight: Vec<usize>,
    /// Every other original index, with `a`/`constants` rows over `tight`.
    others: Vec<usize>,
    a: Vec<Vec<f64>>,
    constants: Vec<f64>,
    /// Reduced indices of the kept nontight facets and their rows over the reduced tight set.
    kept_nontight: Vec<usize>,
    kept_a: Vec<Vec<f64>>,
    /// Reduced indices of the tight facets.
    tight_reduced: Vec<usize>,
    gamma: Vec<Vec<f64>>,
}

/// Float image of a reduction: the level-0 triple in `ℂ^d` and the reduced
/// triple in `ℂ^{d_𝔨}`, coordinates of the latter being the kept indices.
#[derive(Debug, Clone)]
pub struct ReductionLab {
    base: TripleLab,
    reduced: TripleLab,
    kept: Vec<usize>,
    discarded: Vec<usize>,
    k_basis: Vec<Vec<f64>>,
    charts: Vec<ReducedChartF>,
}

impl ReductionLab {
    pub fn new(r: &ReductionResult) -> Result<Self, NumLabError> {
        let base = TripleLab::new(&r.translated_triple)?;
        let reduced = TripleLab::new(&r.reduced_triple)?;
        let field = r.reduced_triple.field();
        let m = r.reduced_triple.dim();
        let raw = r.raw_reduced.halfspaces();
        let mut charts = Vec::new();
        for c in &r.reduced_atlas {
            let tight: Vec<usize> = c.tight.iter().map(|&t| r.kept[t]).collect();
            let b = Mat::from_cols(field, m, &tight.iter().map(|&h| raw[h].normal.clone()).collect::<Vec<_>>());
            let lam: Vec<FieldElem> = tight.iter().map(|&h| raw[h].offset.clone()).collect();
            let others: Vec<usize> = (0..raw.len()).filter(|j| !tight.contains(j)).collect();
            let mut a = Vec::new();
            let mut constants = Vec::new();
            for &j in &others {
                let row = b.solve(&raw[j].normal).ok_or(DelzantError::SingularTightSet)?;
                constants.push((&crate::field::dot(&row, &lam) - &raw[j].offset).to_f64());
                a.push(to_f64s(&row));
            }
            charts.push(ReducedChartF {
                tight,
                others,
                a,
                constants,
                kept_nontight: c.nontight().to_vec(),
                kept_a: c.a_coeffs.iter().map(|r| to_f64s(r)).collect(),
                tight_reduced: c.tight.clone(),
                gamma: c.gamma.generators.iter().map(|g| to_f64s(g)).collect(),
            });
        }
        Ok(ReductionLab {
            base,
            reduced,
            kept: r.kept.clone(),
            discarded: r.discarded.clone(),
            k_basis: r.subspace.k_basis().iter().map(|k| to_f64s(k)).collect(),
            charts,
        })
    }

    pub fn base(&self) -> &TripleLab {
        &self.base
    }

    pub fn reduced(&self) -> &TripleLab {
        &self.reduced
    }

    fn chart(&self, i: usize) -> Result<&ReducedChartF, NumLabError> {
        self.charts.get(i).ok_or(NumLabError::NoSuchChart(i))
    }

    /// `j*∘Φ` on the level-0 triple.
    pub fn k_moment(&self, z: &[Complex64], tol: f64) -> Result<Vec<f64>, NumLabError> {
        let mu = self.base.moment_map(z, tol)?.mu;
        Ok(self.k_basis.iter().map(|k| k.iter().zip(&mu).map(|(a, b)| a * b).sum()).collect())
    }

    /// Extends a reduced point by `w_j = sqrt(Σ_h a_{jh}(|z_h|²+λ_h) − λ_j)` on the discarded indices.
    pub fn lift(&self, chart_index: usize, u: &[Complex64]) -> Result<Vec<Complex64>, NumLabError> {
        let chart = self.chart(chart_index)?;
        let mut z = vec![Complex64::new(0.0, 0.0); self.kept.len() + self.discarded.len()];
        for (&j, v) in self.kept.iter().zip(u) {
            z[j] = *v;
        }
        let m: Vec<f64> = chart.tight.iter().map(|&h| z[h].norm_sqr()).collect();
        for (row, (&j, c)) in chart.a.iter().zip(chart.others.iter().zip(&chart.constants)) {
            if self.discarded.contains(&j) {
                let r: f64 = row.iter().zip(&m).map(|(a, x)| a * x).sum::<f64>() + c;
                z[j] = Complex64::new(r.max(0.0).sqrt(), 0.0);
            }
        }
        Ok(z)
    }

    /// `exp(Σ_j s_j R_j)` with `R_j = e_j − Σ_h a_{jh} e_h`, `j` over the
    /// chart's nontight original indices in order.
    pub fn act(&self, chart_index: usize, z: &[Complex64], s: &[f64]) -> Result<Vec<Complex64>, NumLabError> {
        let chart = self.chart(chart_index)?;
        let mut out = z.to_vec();
        for ((&j, row), &sj) in chart.others.iter().zip(&chart.a).zip(s) {
            out[j] *= phase(sj);
            for (&h, a) in chart.tight.iter().zip(row) {
                out[h] *= phase(-sj * a);
            }
        }
        Ok(out)
    }

    /// Rotates the discarded coordinates onto `[0, ∞)`; returns `z'` and its
    /// restriction to the kept indices.
    pub fn normal_form(
        &self,
        chart_index: usize,
        z: &[Complex64],
        tol: f64,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>), NumLabError> {
        let chart = self.chart(chart_index)?;
        let km = self.k_moment(z, tol)?.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if km > tol {
            return Err(NumLabError::NotOnLevel { value: km });
        }
        let mut out = z.to_vec();
        for (&j, row) in chart.others.iter().zip(&chart.a) {
            if !self.discarded.contains(&j) {
                continue;
            }
            let modulus = z[j].norm();
            if modulus <= tol {
                return Err(NumLabError::ZeroCoordinate { index: j, modulus });
            }
            let r = -z[j].arg() / (2.0 * PI);
            out[j] = Complex64::new(modulus, 0.0);
            for (&h, a) in chart.tight.iter().zip(row) {
                out[h] *= phase(-r * a);
            }
        }
        let truncated = self.kept.iter().map(|&j| out[j]).collect();
        Ok((out, truncated))
    }

    /// Reduced-chart normalization: kept nontight coordinates rotated onto `[0, ∞)`.
    fn reduced_normal(&self, chart: &ReducedChartF, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = u.to_vec();
        for (&j, row) in chart.kept_nontight.iter().zip(&chart.kept_a) {
            let t = -u[j].arg() / (2.0 * PI);
            out[j] = Complex64::new(u[j].norm(), 0.0);
            for (&h, a) in chart.tight_reduced.iter().zip(row) {
                out[h] *= phase(-t * a);
            }
        }
        out
    }

    /// Distance between two reduced points modulo the reduced chart's group:
    /// the continuous part is normalized away, the discrete part searched
    /// over generator words with `Σ|c_i| ≤ WORD_BOUND`.
    pub fn chart_distance(&self, chart_index: usize, u: &[Complex64], v: &[Complex64]) -> Result<f64, NumLabError> {
        let chart = self.chart(chart_index)?;
        let (u, v) = (self.reduced_normal(chart, u), self.reduced_normal(chart, v));
        let free = chart
            .kept_nontight
            .iter()
            .map(|&j| (u[j] - v[j]).norm())
            .fold(0.0, f64::max);
        let mut best = f64::INFINITY;
        for word in words(chart.gamma.len(), WORD_BOUND) {
            let mut gamma = vec![0.0; chart.tight_reduced.len()];
            for (c, g) in word.iter().zip(&chart.gamma) {
                for (x, y) in gamma.iter_mut().zip(g) {
                    *x += *c as f64 * y;
                }
            }
            let dist = chart
                .tight_reduced
                .iter()
                .zip(&gamma)
                .map(|(&h, x)| (v[h] - phase(*x) * u[h]).norm())
                .fold(0.0, f64::max);
            best = best.min(dist);
        }
        Ok(best.max(free))
    }

    /// Lift, act by `scramble` (one phase per chart-nontight original index),
    /// normalize, truncate, and measure the distance back to `u`.
    pub fn g_round_trip(&self, chart_index: usize, u: &[Complex64], scramble: &[f64], tol: f64) -> Result<f64, NumLabError> {
        let z = self.lift(chart_index, u)?;
        let z = self.act(chart_index, &z, scramble)?;
        let (_, back) = self.normal_form(chart_index, &z, tol)?;
        self.chart_distance(chart_index, u, &back)
    }

    /// `count` seeded round trips per reduced chart; returns every residual.
    pub fn round_trips(&self, count: usize, seed: u64, radius_cap: f64, tol: f64) -> Result<Vec<f64>, NumLabError> {
        let mut out = Vec::new();
        for c in 0..self.charts.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            rng.set_stream(c as u64);
            let others = self.charts[c].others.len();
            for p in self.reduced.sample_level_set(c, count, radius_cap, seed)? {
                let s: Vec<f64> = (0..others).map(|_| rng.random::<f64>()).collect();
                out.push(self.g_round_trip(c, &p.z, &s, tol)?);
            }
        }
        Ok(out)
    }
}

/// All `c ∈ ℤ^m` with `Σ|c_i| ≤ bound`.
fn words(m: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for w in &out {
            let used: i64 = w.iter().map(|c: &i64| c.abs()).sum();
            let left = bound - used;
            for c in -left..=left {
                let mut w2 = w.clone();
                w2.push(c);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldSpec};
    use crate::polyhedron::Polyhedron;
    use crate::quasilattice::Quasilattice;
    use crate::reduction::{reduce, SubspaceData};

    fn strip(k: &Field) -> DelzantTriple {
        let p = Polyhedron::from_ints(k, &[&[1, 0], &[0, 1], &[0, -1]], &[-1, 0, -1]).unwrap();
        DelzantTriple::new(p, Quasilattice::standard(k, 2)).unwrap()
    }

    fn quasisphere(k: &Field) -> DelzantTriple {
        let p = Polyhedron::from_ints(k, &[&[1], &[-1]], &[0, -1]).unwrap();
        let q = Quasilattice::new(k, 1, vec![vec![k.one()], vec![k.alpha()]]).unwrap();
        DelzantTriple::new(p, q).unwrap()
    }

    fn golden() -> ReductionResult {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let s = SubspaceData::new(&k, 2, vec![vec![k.int(-1), k.alpha()]], Some(vec![k.vector(&[0, 1])])).unwrap();
        reduce(&strip(&k), &s, &[k.zero()]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chart_centers() {
        let q = Field::rationals();
        let lab = TripleLab::new(&strip(&q)).unwrap();
        assert_eq!(lab.chart_center(0).unwrap(), vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let m = lab.moment_map(&lab.chart_center(0).unwrap(), DEFAULT_TOL).unwrap();
        assert!((m.mu[0] + 1.0).abs() < 1e-12 && m.mu[1].abs() < 1e-12);
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let lab = TripleLab::new(&quasisphere(&k)).unwrap();
        assert_eq!(lab.chart_center(0).unwrap(), vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn moment_map_rejects_off_level_points() {
        let q = Field::rationals();
        let lab = TripleLab::new(&strip(&q)).unwrap();
        let err = lab.moment_map(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, NumLabError::ResidualTooLarge { .. }));
    }

    #[test]
    fn sampling_is_deterministic_and_on_level() {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let lab = TripleLab::new(&quasisphere(&k)).unwrap();
        let a = lab.sample_level_set(1, 50, DEFAULT_RADIUS_CAP, 7).unwrap();
        assert_eq!(a, lab.sample_level_set(1, 50, DEFAULT_RADIUS_CAP, 7).unwrap());
        assert_ne!(a, lab.sample_level_set(1, 50, DEFAULT_RADIUS_CAP, 8).unwrap());
        let rep = lab.sample_report(200, 3, DEFAULT_TOL, DEFAULT_RADIUS_CAP).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert_eq!(rep.samples, 400);
        let empty = lab.sample_report(0, 3, DEFAULT_TOL, DEFAULT_RADIUS_CAP).unwrap();
        assert_eq!(empty.samples, 0);
        assert_eq!(empty.min_margin, None);
    }

    #[test]
    fn starved_chart() {
        let k = Field::new(FieldSpec::quadratic(2)).unwrap();
        let lab = TripleLab::new(&quasisphere(&k)).unwrap();
        let err = lab.sample_level_set(0, 5, 1e5, 1).unwrap_err();
        assert!(matches!(err, NumLabError::ChartStarved { .. }));
    }

    #[test]
    fn k_moment_of_strip_vertex() {
        let r = golden();
        // Untranslated strip at level 0 is the translated triple itself.
        let lab = ReductionLab::new(&r).unwrap();
        let km = lab.k_moment(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], DEFAULT_TOL).unwrap();
        assert!((km[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_form_examples() {
        let r = golden();
        let lab = ReductionLab::new(&r).unwrap();
        let u = lab.reduced().sample_level_set(0, 1, 1.0, 11).unwrap().remove(0).z;
        let z = lab.lift(0, &u).unwrap();
        assert!(lab.k_moment(&z, DEFAULT_TOL).unwrap()[0].abs() < 1e-9);
        let (same, _) = lab.normal_form(0, &z, DEFAULT_TOL).unwrap();
        assert_eq!(same, z);
        let scrambled = lab.act(0, &z, &[0.3, 0.8]).unwrap();
        let (zn, trunc) = lab.normal_form(0, &scrambled, DEFAULT_TOL).unwrap();
        for (a, b) in zn.iter().zip(&scrambled) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        assert_eq!(zn[0].im, 0.0);
        assert!(zn[0].re >= 0.0);
        assert_eq!(trunc.len(), 2);
        assert!(lab.chart_distance(0, &u, &trunc).unwrap() < 1e-8);
    }

    #[test]
    fn golden_round_trips() {
        let lab = ReductionLab::new(&golden()).unwrap();
        let res = lab.round_trips(50, 2024, 1.5, DEFAULT_TOL).unwrap();
        assert_eq!(res.len(), 100);
        assert!(res.iter().all(|&r| r <= 1e-8), "{res:?}");
        let center = lab.reduced().chart_center(1).unwrap();
        assert!(lab.g_round_trip(1, &center, &[0.1, 0.9], DEFAULT_TOL).unwrap() <= 1e-9);
    }

    #[test]
    fn distinct_moduli_stay_distinct() {
        let lab = ReductionLab::new(&golden()).unwrap();
        let pts = lab.reduced().sample_level_set(0, 20, 1.0, 5).unwrap();
        for w in pts.windows(2) {
            let (u, v) = (&w[0].z, &w[1].z);
            let dm = u.iter().zip(v.iter()).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
            let tu = lab.normal_form(0, &lab.lift(0, u).unwrap(), DEFAULT_TOL).unwrap().1;
            let tv = lab.normal_form(0, &lab.lift(0, v).unwrap(), DEFAULT_TOL).unwrap().1;
            if dm > 1e-6 {
                assert!(lab.chart_distance(0, &tu, &tv).unwrap() > 1e-7);
            }
        }
    }

    #[test]
    fn word_counts() {
        assert_eq!(words(0, 8).len(), 1);
        assert_eq!(words(1, 8).len(), 17);
        assert_eq!(words(2, 1).len(), 5);
    }
}
