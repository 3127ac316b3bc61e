//! Vectors over `Z[sqrt d]` up to positive scaling, for fast exact plane keys and
//! accurate float conversion.

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::field::{FieldVector, QuadScalar};

/// `a + sqrt(d) b` with integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ZVec {
    pub d: u64,
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
}

/// Exact sign of `x + y sqrt(d)`.
pub(crate) fn sign_of(x: &BigInt, y: &BigInt, d: u64) -> i8 {
    let sx = sign_big(x);
    let sy = sign_big(y);
    if sx == 0 || sy == 0 || sx == sy {
        return if sx != 0 { sx } else { sy };
    }
    // opposite signs: compare x^2 with d y^2
    let lhs = x * x;
    let rhs = y * y * BigInt::from(d);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => sx,
        std::cmp::Ordering::Less => sy,
        std::cmp::Ordering::Equal => 0,
    }
}

fn sign_big(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// `x * 2^e` with `x` a float of moderate size, so huge integers convert without overflow.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Scaled {
    pub mantissa: f64,
    pub exp: i64,
}

impl Scaled {
    pub fn from_big(x: &BigInt) -> Self {
        let bits = x.bits() as i64;
        if bits <= 900 {
            return Scaled {
                mantissa: x.to_f64().unwrap_or(0.0),
                exp: 0,
            };
        }
        let shift = bits - 64;
        Scaled {
            mantissa: (x >> shift as usize).to_f64().unwrap_or(0.0),
            exp: shift,
        }
    }

    pub fn div(self, other: Scaled) -> Scaled {
        Scaled {
            mantissa: self.mantissa / other.mantissa,
            exp: self.exp - other.exp,
        }
    }

    pub fn to_exp(self, exp: i64) -> f64 {
        let diff = self.exp - exp;
        if diff < -1000 {
            0.0
        } else {
            self.mantissa * 2f64.powi(diff as i32)
        }
    }
}

/// Accurate float value of `x + y sqrt(d)`; when the terms cancel, evaluates
/// `(x^2 - d y^2) / (x - y sqrt(d))` instead.
pub(crate) fn quad_to_scaled(x: &BigInt, y: &BigInt, d: u64) -> Scaled {
    let sd = (d as f64).sqrt();
    let fx = Scaled::from_big(x);
    let fy = Scaled::from_big(y);
    let exp = fx.exp.max(fy.exp);
    if y.is_zero() {
        return fx;
    }
    if x.is_zero() || x.sign() == y.sign() {
        return Scaled {
            mantissa: fx.to_exp(exp) + fy.to_exp(exp) * sd,
            exp,
        };
    }
    let num = x * x - y * y * BigInt::from(d);
    let den = Scaled {
        mantissa: fx.to_exp(exp) - fy.to_exp(exp) * sd,
        exp,
    };
    Scaled::from_big(&num).div(den)
}

impl ZVec {
    /// Positive integer multiple of `v`.
    pub fn from_field_vector(v: &FieldVector) -> Self {
        let lcm = v.coords().iter().fold(BigInt::one(), |l, c| {
            l.lcm(c.rational_part().denom()).lcm(c.irrational_part().denom())
        });
        let scale = BigRational::from_integer(lcm);
        let (a, b) = v
            .coords()
            .iter()
            .map(|c| {
                (
                    (c.rational_part() * &scale).to_integer(),
                    (c.irrational_part() * &scale).to_integer(),
                )
            })
            .unzip();
        ZVec { d: v.field(), a, b }
    }

    pub fn to_field_vector(&self) -> FieldVector {
        let coords = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(x, y)| {
                QuadScalar::new(
                    BigRational::from_integer(x.clone()),
                    BigRational::from_integer(y.clone()),
                    self.d,
                )
            })
            .collect();
        FieldVector::new(self.d, coords).expect("valid field")
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn apply(&self, m: &[Vec<i64>]) -> ZVec {
        let mul = |v: &[BigInt]| -> Vec<BigInt> {
            m.iter()
                .map(|row| {
                    row.iter()
                        .zip(v)
                        .filter(|(g, x)| **g != 0 && !x.is_zero())
                        .fold(BigInt::zero(), |acc, (&g, x)| acc + x * g)
                })
                .collect()
        };
        ZVec {
            d: self.d,
            a: mul(&self.a),
            b: if self.b.iter().all(Zero::is_zero) {
                self.b.clone()
            } else {
                mul(&self.b)
            },
        }
    }

    /// Integer matrix `T` applied to both components.
    pub fn transform(&self, t: &[Vec<BigInt>]) -> ZVec {
        let mul = |v: &[BigInt]| -> Vec<BigInt> {
            t.iter()
                .map(|row| {
                    row.iter()
                        .zip(v)
                        .filter(|(g, x)| !g.is_zero() && !x.is_zero())
                        .fold(BigInt::zero(), |acc, (g, x)| acc + g * x)
                })
                .collect()
        };
        ZVec {
            d: self.d,
            a: mul(&self.a),
            b: mul(&self.b),
        }
    }

    /// `sum w_i x_i y_i` as `(rational, irrational)` parts.
    pub fn weighted_dot(&self, other: &ZVec, w: &[BigInt]) -> (BigInt, BigInt) {
        let d = BigInt::from(self.d);
        let mut x = BigInt::zero();
        let mut y = BigInt::zero();
        for i in 0..self.len() {
            let (a1, b1, a2, b2) = (&self.a[i], &self.b[i], &other.a[i], &other.b[i]);
            x += &w[i] * (a1 * a2 + &d * b1 * b2);
            y += &w[i] * (a1 * b2 + b1 * a2);
        }
        (x, y)
    }

    /// `s * self - t * other` with `s = s0 + s1 sqrt d`, `t` likewise.
    pub fn combine(&self, s: &(BigInt, BigInt), other: &ZVec, t: &(BigInt, BigInt)) -> ZVec {
        let d = BigInt::from(self.d);
        let mut a = Vec::with_capacity(self.len());
        let mut b = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let (x1, y1, x2, y2) = (&self.a[i], &self.b[i], &other.a[i], &other.b[i]);
            a.push(&s.0 * x1 + &d * &s.1 * y1 - &t.0 * x2 - &d * &t.1 * y2);
            b.push(&s.0 * y1 + &s.1 * x1 - &t.0 * y2 - &t.1 * x2);
        }
        ZVec { d: self.d, a, b }
    }
}

/// Plucker coordinate `w1_i w2_j - w1_j w2_i` as `(rational, irrational)` parts.
pub(crate) fn plucker(w1: &ZVec, w2: &ZVec, i: usize, j: usize) -> (BigInt, BigInt) {
    let d = BigInt::from(w1.d);
    let mul = |xa: &BigInt, xb: &BigInt, ya: &BigInt, yb: &BigInt| -> (BigInt, BigInt) {
        (xa * ya + &d * xb * yb, xa * yb + xb * ya)
    };
    let p = mul(&w1.a[i], &w1.b[i], &w2.a[j], &w2.b[j]);
    let q = mul(&w1.a[j], &w1.b[j], &w2.a[i], &w2.b[i]);
    (p.0 - q.0, p.1 - q.1)
}

/// Canonical key data of the oriented span of `w1, w2`: pivot columns, orientation, and the
/// echelon rows as integers over one positive common denominator in lowest terms.
///
/// Row one of the echelon form is `p_{kj} / p_{ij}` and row two is `p_{ik} / p_{ij}`, where
/// `(i, j)` is the first nonzero Plucker coordinate in lexicographic order.
pub(crate) fn echelon_key(w1: &ZVec, w2: &ZVec) -> Option<([usize; 2], i8, Vec<BigInt>)> {
    let n = w1.len();
    let d = BigInt::from(w1.d);
    let mut pivot = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let p = plucker(w1, w2, i, j);
            if !(p.0.is_zero() && p.1.is_zero()) {
                pivot = Some((i, j, p));
                break 'outer;
            }
        }
    }
    let (i, j, p) = pivot?;
    let orientation = sign_of(&p.0, &p.1, w1.d);
    // 1 / p = conj(p) / N(p)
    let norm = &p.0 * &p.0 - &d * &p.1 * &p.1;
    let conj = (p.0.clone(), -p.1.clone());
    let signed = |k: usize, l: usize| -> (BigInt, BigInt) {
        if k == l {
            (BigInt::zero(), BigInt::zero())
        } else if k < l {
            plucker(w1, w2, k, l)
        } else {
            let (x, y) = plucker(w1, w2, l, k);
            (-x, -y)
        }
    };
    let mut out = Vec::with_capacity(4 * n + 1);
    for row in 0..2 {
        for k in 0..n {
            let q = if row == 0 { signed(k, j) } else { signed(i, k) };
            out.push(&q.0 * &conj.0 + &d * &q.1 * &conj.1);
            out.push(&q.0 * &conj.1 + &q.1 * &conj.0);
        }
    }
    let mut den = norm;
    let g = out.iter().fold(den.clone(), |g, x| g.gcd(x));
    if den.is_negative() {
        den = -den;
        out.iter_mut().for_each(|x| *x = -&*x);
    }
    if !g.is_one() {
        den /= &g;
        out.iter_mut().for_each(|x| *x /= &g);
    }
    out.push(den);
    Some(([i, j], orientation, out))
}
