//! Dense univariate polynomials over ℚ, coefficients stored low degree first.
//!
//! Only what the number-field layer needs: evaluation, Euclidean division,
//! gcd, derivatives and Sturm sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn trimmed(mut p: QPoly) -> QPoly {
    trim(&mut p);
    p
}

/// Degree of a trimmed polynomial, `None` for the zero polynomial.
pub(crate) fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn from_ints(coeffs: &[BigInt]) -> QPoly {
    trimmed(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

pub(crate) fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn derivative(p: &[BigRational]) -> QPoly {
    trimmed(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trimmed(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

/// Euclidean division `a = q·b + r`. Panics when `b` is zero.
pub(crate) fn div_rem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead = &b[db];
    let mut r = trimmed(a.to_vec());
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let coef = &r[dr] / lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            r[i + shift] -= &coef * c;
        }
        q[shift] = coef;
        trim(&mut r);
    }
    (trimmed(q), r)
}

pub(crate) fn rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    div_rem(a, b).1
}

/// Monic gcd; the zero polynomial when both inputs vanish.
pub(crate) fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = trimmed(a.to_vec());
    let mut y = trimmed(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(x)
}

pub(crate) fn make_monic(p: QPoly) -> QPoly {
    match degree(&p) {
        None => p,
        Some(d) => {
            let lead = p[d].clone();
            p.into_iter().map(|c| c / &lead).collect()
        }
    }
}

/// Returns `s` with `s·a ≡ gcd(a, m) (mod m)` together with that monic gcd.
pub(crate) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> (QPoly, QPoly) {
    // Invariant: old_r ≡ old_s·a and r ≡ s·a modulo m.
    let mut old_r = trimmed(a.to_vec());
    let mut r = trimmed(m.to_vec());
    let mut old_s: QPoly = vec![BigRational::one()];
    let mut s: QPoly = Vec::new();
    while !r.is_empty() {
        let (q, rr) = div_rem(&old_r, &r);
        let ss = sub(&old_s, &mul(&q, &s));
        old_r = std::mem::replace(&mut r, rr);
        old_s = std::mem::replace(&mut s, ss);
    }
    let d = degree(&old_r).map(|d| old_r[d].clone()).unwrap_or_else(BigRational::one);
    let g: QPoly = old_r.into_iter().map(|c| c / &d).collect();
    let inv: QPoly = old_s.into_iter().map(|c| c / &d).collect();
    (rem(&inv, m), g)
}

pub(crate) fn sturm_sequence(p: &[BigRational]) -> Vec<QPoly> {
    let mut seq = vec![trimmed(p.to_vec()), derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = eval(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub(crate) fn count_roots(seq: &[QPoly], lo: &BigRational, hi: &BigRational) -> usize {
    sign_changes(seq, lo).saturating_sub(sign_changes(seq, hi))
}

/// All divisors of `|n|` (n ≠ 0), by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            let other = &n / &i;
            if other != i {
                large.push(other);
            }
            small.push(i.clone());
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Rational roots of an integer polynomial (rational root theorem).
pub(crate) fn rational_roots(coeffs: &[BigInt]) -> Vec<BigRational> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let mut roots = Vec::new();
    let low = coeffs.iter().position(|c| !c.is_zero());
    let Some(low) = low else {
        return roots;
    };
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let coeffs = &coeffs[low..];
    if coeffs.len() < 2 {
        return roots;
    }
    let poly = from_ints(coeffs);
    let ps = divisors(&coeffs[0]);
    let qs = divisors(coeffs.last().unwrap());
    for p in &ps {
        for q in &qs {
            for cand in [BigRational::new(p.clone(), q.clone()), BigRational::new(-p.clone(), q.clone())] {
                if eval(&poly, &cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}
