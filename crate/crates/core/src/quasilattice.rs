//! Quasilattices: the ℤ-span of finitely many field vectors spanning ℝⁿ.
//!
//! Every lattice question is reduced to integer linear algebra. A field
//! vector of length n is flattened to its n·D power-basis coordinates
//! (coordinate-major: all D coordinates of entry 0, then entry 1, …), and a
//! family of flattened vectors is scaled by the LCM of all its denominators.
//! Generator lists are kept verbatim; [`Quasilattice::equivalent`] decides
//! equality of the generated modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::field::{denominator_lcm, Field, FieldElem};
use crate::linalg::{hnf, int::integer_kernel_snf, integer_solve, rank_of, IntMat, Mat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuasilatticeError {
    #[error("generators span a space of dimension {rank}, need {dim}")]
    NotSpanning { rank: usize, dim: usize },
    #[error("image generators span dimension {rank} of a {dim}-dimensional target")]
    RankDeficient { rank: usize, dim: usize },
    #[error("generator {index} has length {got}, expected {dim}")]
    DimensionMismatch { index: usize, got: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasilattice {
    field: Field,
    dim: usize,
    generators: Vec<Vec<FieldElem>>,
}

/// Whether `K = 𝔨/(𝔨 ∩ Q)` is a closed subgroup (a quasitorus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupClass {
    Closed,
    NotClosed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupClassification {
    pub class: SubgroupClass,
    /// Generators of `𝔨 ∩ Q`.
    pub witness: Vec<Vec<FieldElem>>,
}

fn flatten(v: &[FieldElem]) -> Vec<BigRational> {
    v.iter().flat_map(|x| x.coords().iter().cloned()).collect()
}

/// Integer matrix whose columns are the flattened vectors, all scaled by one
/// common factor; also returns the scaled flattening of `extra`.
fn integer_columns(vectors: &[Vec<FieldElem>], extra: Option<&[FieldElem]>) -> (IntMat, Option<Vec<BigInt>>) {
    let scale = BigRational::from_integer(denominator_lcm(
        vectors.iter().flatten().chain(extra.into_iter().flatten()),
    ));
    let to_int = |v: &[FieldElem]| -> Vec<BigInt> {
        flatten(v).into_iter().map(|c| (c * &scale).to_integer()).collect()
    };
    let cols: Vec<Vec<BigInt>> = vectors.iter().map(|v| to_int(v)).collect();
    let rows = cols.first().map_or_else(|| extra.map_or(0, |e| flatten(e).len()), |c| c.len());
    let mut m = IntMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    (m, extra.map(to_int))
}

impl Quasilattice {
    pub fn new(field: &Field, dim: usize, generators: Vec<Vec<FieldElem>>) -> Result<Self, QuasilatticeError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(QuasilatticeError::DimensionMismatch { index, got: g.len(), dim });
            }
        }
        let rank = rank_of(field, dim, &generators);
        if rank != dim {
            return Err(QuasilatticeError::NotSpanning { rank, dim });
        }
        Ok(Quasilattice { field: field.clone(), dim, generators })
    }

    /// ℤⁿ with its standard basis.
    pub fn standard(field: &Field, n: usize) -> Self {
        let gens = (0..n)
            .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Quasilattice { field: field.clone(), dim: n, generators: gens }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<FieldElem>] {
        &self.generators
    }

    /// Is `v` an integer combination of the generators?
    pub fn contains(&self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length differs from ambient dimension");
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        if self.generators.is_empty() {
            return false;
        }
        let (m, b) = integer_columns(&self.generators, Some(v));
        integer_solve(&m, &b.unwrap()).is_some()
    }

    /// Integer coefficients expressing `v` in the generators, if any.
    pub fn coefficients(&self, v: &[FieldElem]) -> Option<Vec<BigInt>> {
        if self.generators.is_empty() {
            return v.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        let (m, b) = integer_columns(&self.generators, Some(v));
        integer_solve(&m, &b.unwrap())
    }

    /// Same ℤ-module: each generator list lies in the other's span.
    pub fn equivalent(&self, other: &Quasilattice) -> bool {
        self.dim == other.dim
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
    }

    pub fn is_standard_lattice(&self) -> bool {
        self.equivalent(&Quasilattice::standard(&self.field, self.dim))
    }

    /// `L(Q)`, generated by the verbatim images `L·Y_i`.
    pub fn image(&self, map: &Mat) -> Result<Quasilattice, QuasilatticeError> {
        assert_eq!(map.cols(), self.dim, "map domain differs from ambient dimension");
        let gens: Vec<Vec<FieldElem>> = self.generators.iter().map(|g| map.mul_vec(g)).collect();
        let dim = map.rows();
        let rank = rank_of(&self.field, dim, &gens);
        if rank != dim {
            return Err(QuasilatticeError::RankDeficient { rank, dim });
        }
        Ok(Quasilattice { field: self.field.clone(), dim, generators: gens })
    }

    /// Generators of `Q ∩ W` for the subspace `W` spanned by `basis`.
    ///
    /// The integer coefficient vectors `c` with `Σ c_i Y_i ∈ W` form the
    /// integer kernel of the flattened annihilator pairing; its Smith-form
    /// basis is saturated. Each returned generator is oriented so that its
    /// first nonzero coordinate in `basis` is positive.
    pub fn subspace_intersection(&self, basis: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
        let w_rank = rank_of(&self.field, self.dim, basis);
        if w_rank == self.dim {
            return self.generators.clone();
        }
        if self.generators.is_empty() {
            return Vec::new();
        }
        let annihilator = if basis.is_empty() {
            Mat::zeros(&self.field, 1, self.dim).nullspace()
        } else {
            Mat::from_rows(&self.field, self.dim, basis).nullspace()
        };
        // Rows: (annihilator φ, power-basis coordinate t); columns: generators.
        let pairings: Vec<Vec<FieldElem>> = annihilator
            .iter()
            .map(|phi| self.generators.iter().map(|y| crate::field::dot(phi, y)).collect())
            .collect();
        let s = self.generators.len();
        let deg = self.field.degree();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for row in &pairings {
            for t in 0..deg {
                let qs: Vec<BigRational> = row.iter().map(|e| e.coords()[t].clone()).collect();
                let lcm = qs.iter().fold(BigInt::from(1), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
                let scale = BigRational::from_integer(lcm);
                rows.push(qs.into_iter().map(|q| (q * &scale).to_integer()).collect());
            }
        }
        let m = IntMat::from_rows(s, &rows);
        let w_mat = Mat::from_cols(&self.field, self.dim, basis);
        integer_kernel_snf(&m)
            .into_iter()
            .filter_map(|c| {
                let mut v = vec![self.field.zero(); self.dim];
                for (ci, y) in c.iter().zip(&self.generators) {
                    if ci.is_zero() {
                        continue;
                    }
                    let coef = self.field.rational(BigRational::from_integer(ci.clone()));
                    for (vi, yi) in v.iter_mut().zip(y) {
                        *vi = &*vi + &(&coef * yi);
                    }
                }
                if v.iter().all(|x| x.is_zero()) {
                    return None;
                }
                let coords = w_mat.solve(&v).expect("kernel element lies in W");
                let lead = coords.iter().find(|x| !x.is_zero()).expect("nonzero vector");
                Some(if lead.is_negative() { v.iter().map(|x| -x).collect() } else { v })
            })
            .collect()
    }

    /// Discrete ⇔ the ℤ-rank (rank of the flattened generators over ℚ)
    /// equals the rank over the field.
    pub fn is_lattice(&self) -> bool {
        if self.generators.is_empty() {
            return true;
        }
        let (m, _) = integer_columns(&self.generators, None);
        hnf(&m).rank() == rank_of(&self.field, self.dim, &self.generators)
    }

    /// Closed ⇔ `𝔨 ∩ Q` spans `𝔨` over ℝ.
    pub fn classify_subgroup(&self, k_basis: &[Vec<FieldElem>]) -> SubgroupClassification {
        let witness = self.subspace_intersection(k_basis);
        let k = rank_of(&self.field, self.dim, k_basis);
        let class = if rank_of(&self.field, self.dim, &witness) == k {
            SubgroupClass::Closed
        } else {
            SubgroupClass::NotClosed
        };
        SubgroupClassification { class, witness }
    }
}
