//! Exact arithmetic in real quadratic fields `Q(sqrt d)`.
//!
//! A [`QuadScalar`] is `a + b sqrt(d)` with rational `a`, `b`. Scalars with
//! `b = 0` are normalized to `d = 1`, so a rational value compares equal no
//! matter which field it was computed in. The real embedding is fixed by
//! `sqrt(d) > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Returns true when `d` is a squarefree positive integer.
pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Common field of two tags, treating `1` (the rationals) as a subfield of everything.
pub fn join_fields(left: u64, right: u64) -> Result<u64> {
    match (left, right) {
        (l, r) if l == r => Ok(l),
        (1, r) => Ok(r),
        (l, 1) => Ok(l),
        (l, r) => Err(Error::FieldMismatch { left: l, right: r }),
    }
}

/// Exact rational square root, when it exists.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let m = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&m * &m) == x.denom() {
        Some(BigRational::new(n, m))
    } else {
        None
    }
}

/// Squarefree part of a positive rational `x`: the unique squarefree `s` with `x = s * r^2`.
/// Returns `None` when the squarefree part does not fit in a `u64` or `x <= 0`.
pub fn squarefree_part(x: &BigRational) -> Option<u64> {
    if !x.is_positive() {
        return None;
    }
    // x = n/m = n*m / m^2, so the squarefree part of n*m is the answer.
    let mut v = (x.numer() * x.denom()).to_u64()?;
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= v {
        let mut e = 0;
        while v % p == 0 {
            v /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    Some(out * v)
}

impl QuadScalar {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        let mut s = QuadScalar { a, b, d };
        s.normalize();
        s
    }

    pub fn rational(a: BigRational) -> Self {
        QuadScalar {
            a,
            b: BigRational::zero(),
            d: 1,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_of(d: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.d = 1;
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    /// Galois conjugate `a - b sqrt(d)`.
    pub fn conj(&self) -> Self {
        QuadScalar {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d,
        }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    /// Sign under the embedding `sqrt(d) > 0`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: compare a^2 against d b^2 (never equal, d is not a square).
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        if a2 > db2 {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadScalar::new(
            &self.a / &n,
            -(&self.b / &n),
            self.d,
        ))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        QuadScalar::new(&self.a * &k, &self.b * &k, self.d)
    }

    pub fn mul_rational(&self, k: &BigRational) -> Self {
        QuadScalar::new(&self.a * k, &self.b * k, self.d)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let sd = (self.d as f64).sqrt();
        if self.a.is_zero() || self.a.is_positive() == self.b.is_positive() {
            return a + b * sd;
        }
        // a and b sqrt(d) cancel: use (a^2 - d b^2) / (a - b sqrt d)
        let num = self.norm().to_f64().unwrap_or(f64::NAN);
        num / (a - b * sd)
    }

    /// Exact square root inside `Q(sqrt e)` for some quadratic field `e`, if one exists.
    ///
    /// For rational input the field may be extended: `sqrt(2/9)` returns `(1/3) sqrt 2`.
    /// For irrational input the root is searched in the same field.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(x) = self.as_rational() {
            if let Some(r) = rational_sqrt(x) {
                return Some(Self::rational(r));
            }
            let e = squarefree_part(x)?;
            let r = rational_sqrt(&(x / BigRational::from_integer(BigInt::from(e))))?;
            return Some(Self::new(BigRational::zero(), r, e));
        }
        // (u + v sqrt d)^2 = a + b sqrt d  =>  u^2 = (a +- sqrt(a^2 - d b^2)) / 2, v = b / (2u).
        let disc = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        for cand in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if let Some(u) = rational_sqrt(&cand) {
                if u.is_zero() {
                    // (v sqrt d)^2 is rational
                    continue;
                }
                let v = &self.b / (&two * &u);
                let root = QuadScalar::new(u.clone(), v.clone(), self.d);
                if (&root * &root) == *self {
                    return Some(if root.is_negative() { -root } else { root });
                }
            }
        }
        None
    }
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn joined(l: &QuadScalar, r: &QuadScalar) -> u64 {
    match join_fields(l.d, r.d) {
        Ok(d) => d,
        Err(_) => panic!("arithmetic across Q(sqrt {}) and Q(sqrt {})", l.d, r.d),
    }
}

impl<'a> Add<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: &'a QuadScalar) -> QuadScalar {
        let d = joined(self, rhs);
        QuadScalar::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: &'a QuadScalar) -> QuadScalar {
        let d = joined(self, rhs);
        QuadScalar::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: &'a QuadScalar) -> QuadScalar {
        let d = joined(self, rhs);
        if self.b.is_zero() {
            return QuadScalar::new(&self.a * &rhs.a, &self.a * &rhs.b, d);
        }
        if rhs.b.is_zero() {
            return QuadScalar::new(&self.a * &rhs.a, &self.b * &rhs.a, d);
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        QuadScalar::new(
            &self.a * &rhs.a + &self.b * &rhs.b * dd,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Add for QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: QuadScalar) -> QuadScalar {
        &self + &rhs
    }
}

impl Sub for QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: QuadScalar) -> QuadScalar {
        &self - &rhs
    }
}

impl Mul for QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: QuadScalar) -> QuadScalar {
        &self * &rhs
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -(self.clone())
    }
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        join_fields(self.d, other.d).ok()?;
        Some(match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

/// Vector with coordinates in a fixed real quadratic field `Q(sqrt d)`; `d = 1` means rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    d: u64,
    coords: Vec<QuadScalar>,
}

impl FieldVector {
    pub fn new(d: u64, coords: Vec<QuadScalar>) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        for c in &coords {
            if join_fields(d, c.field())? != d {
                return Err(Error::FieldMismatch {
                    left: d,
                    right: c.field(),
                });
            }
        }
        Ok(FieldVector { d, coords })
    }

    /// Builds `a + b sqrt(d)` coordinates from rational pairs.
    pub fn from_parts(d: u64, parts: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        if d == 1 && parts.iter().any(|(_, b)| !b.is_zero()) {
            return Err(Error::FieldMismatch { left: 1, right: 1 });
        }
        let coords = parts
            .into_iter()
            .map(|(a, b)| QuadScalar::new(a, b, d))
            .collect();
        Ok(FieldVector { d, coords })
    }

    pub fn from_ints(v: &[i64]) -> Self {
        FieldVector {
            d: 1,
            coords: v.iter().map(|&x| QuadScalar::from_int(x)).collect(),
        }
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        FieldVector {
            d: 1,
            coords: v.iter().map(|x| QuadScalar::from_bigint(x.clone())).collect(),
        }
    }

    pub fn from_rationals(v: Vec<BigRational>) -> Self {
        FieldVector {
            d: 1,
            coords: v.into_iter().map(QuadScalar::rational).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        FieldVector {
            d: 1,
            coords: vec![QuadScalar::zero(); n],
        }
    }

    /// Standard basis vector `e_i` of rank `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.coords[i] = QuadScalar::one();
        v
    }

    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[QuadScalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(QuadScalar::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(QuadScalar::is_rational)
    }

    /// Same vector viewed inside a larger field. Fails when the tags are incompatible.
    pub fn lift(&self, d: u64) -> Result<Self> {
        let d = join_fields(self.d, d)?;
        Ok(FieldVector {
            d,
            coords: self.coords.clone(),
        })
    }

    /// Rational coordinates, when every `b` vanishes.
    pub fn rational_coords(&self) -> Option<Vec<BigRational>> {
        self.coords
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    /// Integer coordinates, when the vector is integral.
    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| c.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer()))
            .collect()
    }

    /// Splits `v = u + sqrt(d) w` with rational `u`, `w`.
    pub fn split(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        self.coords
            .iter()
            .map(|c| (c.rational_part().clone(), c.irrational_part().clone()))
            .unzip()
    }

    pub fn scale(&self, k: &QuadScalar) -> Self {
        let d = join_fields(self.d, k.field()).expect("scalar outside the vector field");
        FieldVector {
            d,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// `self + k * rhs`.
    pub fn add_scaled(&self, k: &QuadScalar, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + &(k * b))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&QuadScalar, &QuadScalar) -> QuadScalar) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::RankMismatch {
                expected: self.len(),
                found: rhs.len(),
            });
        }
        let d = join_fields(self.d, rhs.d)?;
        Ok(FieldVector {
            d,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        FieldVector {
            d: self.d,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(QuadScalar::to_f64).collect()
    }
}

impl From<Vec<i64>> for FieldVector {
    fn from(v: Vec<i64>) -> Self {
        FieldVector::from_ints(&v)
    }
}
