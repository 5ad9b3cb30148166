//! Exact arithmetic in a real number field ℚ(α) ⊂ ℝ.
//!
//! A field is fixed by an integer minimal polynomial and a rational interval
//! isolating the real root α. Elements are stored in the power basis
//! `1, α, …, α^{D-1}` with arbitrary-precision rational coordinates, so
//! equality is coordinate equality. Signs are decided by interval evaluation
//! on a bisected isolating interval; the bisection keeps the Sturm invariant
//! (exactly one simple root inside) by tracking the sign change of the
//! minimal polynomial.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{self, QPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("minimal polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("minimal polynomial is not square-free")]
    NotSquareFree,
    #[error("minimal polynomial of degree {degree} has the rational root {root}")]
    RationalRoot { degree: usize, root: String },
    #[error("isolating interval ({lo}, {hi}) is empty or reversed")]
    BadInterval { lo: String, hi: String },
    #[error("isolating interval contains {0} real roots, expected exactly one")]
    RootCount(usize),
    #[error("element has {got} coordinates, field degree is {degree}")]
    WrongLength { got: usize, degree: usize },
}

/// Raw description of a number field: minimal polynomial (low degree first)
/// and an isolating interval for the chosen real root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub min_poly: Vec<BigInt>,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl FieldSpec {
    pub fn new(min_poly: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Self {
        FieldSpec { min_poly, lo, hi }
    }

    /// ℚ itself, presented as the root of `x` isolated in `(-1, 1)`.
    pub fn rationals() -> Self {
        FieldSpec {
            min_poly: vec![BigInt::zero(), BigInt::one()],
            lo: -BigRational::one(),
            hi: BigRational::one(),
        }
    }

    /// ℚ(√m) with α the positive square root, `m` a positive non-square.
    pub fn quadratic(m: i64) -> Self {
        let hi = (m as f64).sqrt().ceil() as i64 + 1;
        FieldSpec {
            min_poly: vec![BigInt::from(-m), BigInt::zero(), BigInt::one()],
            lo: BigRational::zero(),
            hi: BigRational::from_integer(hi.into()),
        }
    }
}

struct FieldInner {
    spec: FieldSpec,
    degree: usize,
    monic: QPoly,
    /// α^D, …, α^{2D-2} expressed in the power basis.
    reduction: Vec<Vec<BigRational>>,
    /// Current isolating interval. Only ever narrowed.
    interval: RwLock<(BigRational, BigRational)>,
    /// The root itself when the field has degree one.
    rational_root: Option<BigRational>,
}

/// Shared handle to a validated number field.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("min_poly", &self.0.spec.min_poly)
            .field("lo", &self.0.spec.lo)
            .field("hi", &self.0.spec.hi)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        let mut coeffs = spec.min_poly.clone();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(FieldError::ConstantPolynomial);
        }
        if spec.lo >= spec.hi {
            return Err(FieldError::BadInterval {
                lo: spec.lo.to_string(),
                hi: spec.hi.to_string(),
            });
        }
        let degree = coeffs.len() - 1;
        let p = poly::from_ints(&coeffs);
        let monic = poly::make_monic(p.clone());
        let g = poly::gcd(&p, &poly::derivative(&p));
        if poly::degree(&g) != Some(0) {
            return Err(FieldError::NotSquareFree);
        }
        let mut rational_root = None;
        if degree == 1 {
            let root = BigRational::new(-coeffs[0].clone(), coeffs[1].clone());
            if root <= spec.lo || root >= spec.hi {
                return Err(FieldError::RootCount(0));
            }
            rational_root = Some(root);
        } else if let Some(root) = poly::rational_roots(&coeffs).into_iter().next() {
            return Err(FieldError::RationalRoot { degree, root: root.to_string() });
        }
        let seq = poly::sturm_sequence(&p);
        let count = poly::count_roots(&seq, &spec.lo, &spec.hi);
        if count != 1 {
            return Err(FieldError::RootCount(count));
        }

        // α^{D+i} = α^i · α^D, reduced one step at a time.
        let mut reduction = Vec::new();
        let mut cur: Vec<BigRational> = monic[..degree].iter().map(|c| -c.clone()).collect();
        for _ in 0..degree.saturating_sub(1) {
            reduction.push(cur.clone());
            let top = cur[degree - 1].clone();
            let mut next = vec![BigRational::zero(); degree];
            for i in (1..degree).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..degree {
                next[i] -= &top * &monic[i];
            }
            cur = next;
        }
        let interval = RwLock::new((spec.lo.clone(), spec.hi.clone()));
        Ok(Field(Arc::new(FieldInner {
            spec,
            degree,
            monic,
            reduction,
            interval,
            rational_root,
        })))
    }

    pub fn rationals() -> Self {
        Field::new(FieldSpec::rationals()).expect("x is a valid minimal polynomial")
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { field: self.clone(), coords: vec![BigRational::zero(); self.0.degree] }
    }

    pub fn one(&self) -> FieldElem {
        self.rational(BigRational::one())
    }

    pub fn int(&self, n: i64) -> FieldElem {
        self.rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(&self, n: i64, d: i64) -> FieldElem {
        self.rational(BigRational::new(n.into(), d.into()))
    }

    pub fn rational(&self, q: BigRational) -> FieldElem {
        let mut e = self.zero();
        e.coords[0] = q;
        e
    }

    /// The generator α. In a degree-one field this is the rational root.
    pub fn alpha(&self) -> FieldElem {
        match &self.0.rational_root {
            Some(r) => self.rational(r.clone()),
            None => {
                let mut e = self.zero();
                e.coords[1] = BigRational::one();
                e
            }
        }
    }

    pub fn from_coords(&self, coords: Vec<BigRational>) -> Result<FieldElem, FieldError> {
        if coords.len() != self.0.degree {
            return Err(FieldError::WrongLength { got: coords.len(), degree: self.0.degree });
        }
        Ok(FieldElem { field: self.clone(), coords })
    }

    pub fn vector(&self, entries: &[i64]) -> Vec<FieldElem> {
        entries.iter().map(|&n| self.int(n)).collect()
    }

    fn current_interval(&self) -> (BigRational, BigRational) {
        self.0.interval.read().expect("interval lock poisoned").clone()
    }

    /// Halves the isolating interval, keeping the root inside.
    fn bisect(&self, seen: &(BigRational, BigRational)) {
        let mut guard = self.0.interval.write().expect("interval lock poisoned");
        if guard.1.clone() - &guard.0 < seen.1.clone() - &seen.0 {
            // Another caller already refined past what we saw.
            return;
        }
        let mid = (&guard.0 + &guard.1) / BigRational::from_integer(2.into());
        let v = sign_of(&poly::eval(&self.0.monic, &mid));
        let lower = sign_of(&poly::eval(&self.0.monic, &guard.0));
        if v == 0 {
            // Cannot happen for degree ≥ 2 (no rational roots); degree one never bisects.
            guard.0 = mid.clone();
            guard.1 = mid;
        } else if v == lower {
            guard.0 = mid;
        } else {
            guard.1 = mid;
        }
    }

    fn interval_eval(coords: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        let mut a = coords.last().cloned().unwrap_or_else(BigRational::zero);
        let mut b = a.clone();
        for c in coords.iter().rev().skip(1) {
            let p = [&a * lo, &a * hi, &b * lo, &b * hi];
            let min = p.iter().min().unwrap().clone();
            let max = p.iter().max().unwrap().clone();
            a = min + c;
            b = max + c;
        }
        (a, b)
    }

    /// Rational enclosure `[lo, hi]` of the real value of `coords`, refined
    /// until `done(lo, hi)` holds.
    fn enclose<F>(&self, coords: &[BigRational], mut done: F) -> (BigRational, BigRational)
    where
        F: FnMut(&BigRational, &BigRational) -> bool,
    {
        if let Some(r) = &self.0.rational_root {
            let v = poly::eval(coords, r);
            return (v.clone(), v);
        }
        if coords[1..].iter().all(|c| c.is_zero()) {
            return (coords[0].clone(), coords[0].clone());
        }
        let mut rounds = 0usize;
        loop {
            let iv = self.current_interval();
            let (a, b) = Self::interval_eval(coords, &iv.0, &iv.1);
            if done(&a, &b) {
                return (a, b);
            }
            rounds += 1;
            if rounds.is_multiple_of(256) && self.vanishes(coords, &iv) {
                return (BigRational::zero(), BigRational::zero());
            }
            self.bisect(&iv);
        }
    }

    /// Exact test for g(α) = 0 when the minimal polynomial might factor.
    fn vanishes(&self, coords: &[BigRational], iv: &(BigRational, BigRational)) -> bool {
        let g = poly::gcd(coords, &self.0.monic);
        match poly::degree(&g) {
            None | Some(0) => false,
            Some(_) => {
                let seq = poly::sturm_sequence(&g);
                poly::count_roots(&seq, &iv.0, &iv.1) > 0
            }
        }
    }

    fn sign_coords(&self, coords: &[BigRational]) -> i8 {
        if coords.iter().all(|c| c.is_zero()) {
            return 0;
        }
        let (a, b) = self.enclose(coords, |a, b| a.is_positive() || b.is_negative() || (a.is_zero() && b.is_zero()));
        if a.is_positive() {
            1
        } else if b.is_negative() {
            -1
        } else {
            0
        }
    }

    fn reduce_product(&self, prod: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.0.degree;
        let mut out: Vec<BigRational> = prod.iter().take(d).cloned().collect();
        out.resize(d, BigRational::zero());
        for (i, c) in prod.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (t, r) in self.0.reduction[i - d].iter().enumerate() {
                out[t] += c * r;
            }
        }
        out
    }
}

/// An element of ℚ(α) in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElem {
    field: Field,
    coords: Vec<BigRational>,
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// True when the element lies in ℚ.
    pub fn is_rational(&self) -> bool {
        self.field.0.rational_root.is_some() || self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if let Some(r) = &self.field.0.rational_root {
            return Some(poly::eval(&self.coords, r));
        }
        self.coords[1..].iter().all(|c| c.is_zero()).then(|| self.coords[0].clone())
    }

    /// Sign of the real number this element denotes: -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        self.field.sign_coords(&self.coords)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> FieldElem {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        let d = self.field.0.degree;
        if let Some(q) = self.as_rational() {
            return Some(self.field.rational(q.recip()));
        }
        let (inv, g) = poly::inverse_mod(&self.coords, &self.field.0.monic);
        assert!(
            poly::degree(&g) == Some(0),
            "minimal polynomial is reducible: element shares a factor with it"
        );
        let mut coords = inv;
        coords.resize(d, BigRational::zero());
        Some(FieldElem { field: self.field.clone(), coords })
    }

    /// Floating approximation with relative error at most
    /// `2^(1-bits) · max(1, |e|)`.
    pub fn to_float(&self, bits: u32) -> f64 {
        let bits = bits.max(2) as usize;
        let (a, b) = self.field.enclose(&self.coords, |a, b| {
            let width = b - a;
            let scale = if a.abs() > BigRational::one() { a.abs() } else { BigRational::one() };
            let tol = scale / BigRational::from_integer(BigInt::one() << (bits + 1));
            width <= tol
        });
        let mid = (a + b) / BigRational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(60)
    }

    /// Largest integer not exceeding the element.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        // Irrational values are never integers, so the enclosure eventually
        // sits strictly between two consecutive integers.
        let (a, _) = self.field.enclose(&self.coords, |a, b| a.floor() == b.floor() && !b.is_integer());
        a.floor().to_integer()
    }

    /// Representative of the class modulo ℤ in `[0, 1)`.
    pub fn fract(&self) -> FieldElem {
        self - &self.field.rational(BigRational::from_integer(self.floor()))
    }

    fn check_field(&self, other: &FieldElem) {
        assert!(self.field == other.field, "arithmetic across different number fields");
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sep, mag) = match (first, c.is_negative()) {
                (true, true) => ("-", -c.clone()),
                (true, false) => ("", c.clone()),
                (false, true) => (" - ", -c.clone()),
                (false, false) => (" + ", c.clone()),
            };
            first = false;
            let term = match i {
                0 => mag.to_string(),
                _ => {
                    let var = if i == 1 { "a".to_string() } else { format!("a^{i}") };
                    if mag.is_one() { var } else { format!("{mag}*{var}") }
                }
            };
            write!(f, "{sep}{term}")?;
        }
        Ok(())
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.coords == other.coords {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check_field(rhs);
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect();
        FieldElem { field: self.field.clone(), coords }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.check_field(rhs);
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect();
        FieldElem { field: self.field.clone(), coords }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            return self.field.zero();
        }
        let d = self.coords.len();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        FieldElem { field: self.field.clone(), coords: self.field.reduce_product(prod) }
    }
}

impl<'a> Div<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        let inv = rhs.inv().expect("division by zero field element");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl std::iter::Sum for FieldElem {
    fn sum<I: Iterator<Item = FieldElem>>(mut iter: I) -> FieldElem {
        let first = iter.next().expect("sum of an empty iterator has no field");
        iter.fold(first, |acc, x| acc + x)
    }
}

/// Least common multiple of all coordinate denominators.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a FieldElem>>(elems: I) -> BigInt {
    elems
        .into_iter()
        .flat_map(|e| e.coords.iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// ⟨u, v⟩ for two field vectors of equal length.
pub fn dot(u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
    assert_eq!(u.len(), v.len(), "dot product of vectors of different length");
    assert!(!u.is_empty(), "dot product of empty vectors needs a field");
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
