//! Integral lattices with indefinite symmetric bilinear forms.

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{join_fields, FieldVector, QuadScalar};
use crate::linalg::{self, Congruence};
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub nul: usize,
}

/// Sylvester signature of an integer Gram matrix via exact congruence diagonalization.
pub fn gram_signature(gram: &[Vec<i64>]) -> Signature {
    let c = linalg::congruence_diagonalize(&linalg::from_ints(gram));
    let (pos, neg, nul) = c.signature();
    Signature { pos, neg, nul }
}

/// `(V_Z, q)`: a non-degenerate symmetric integer Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticLattice {
    gram: Vec<Vec<i64>>,
    signature: Signature,
    frame: Congruence,
    aux: AuxFrame,
}

/// Integer form of the frame-coordinate map: `c_i(x) = (T x)_i / L` and weights
/// proportional to `|D_i|`, scaled to integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AuxFrame {
    pub t: Vec<Vec<BigInt>>,
    pub weights: Vec<BigInt>,
}

impl AuxFrame {
    fn new(gram: &[Vec<i64>], frame: &Congruence) -> Self {
        let rows: Vec<Vec<BigRational>> = frame
            .columns
            .iter()
            .zip(&frame.diagonal)
            .map(|(p, d)| {
                let d = d.as_rational().expect("rational frame");
                (0..gram.len())
                    .map(|j| {
                        let gp = p.iter().zip(gram).fold(BigRational::zero(), |acc, (pi, row)| {
                            acc + pi.as_rational().expect("rational frame") * BigRational::from_integer(row[j].into())
                        });
                        gp / d
                    })
                    .collect()
            })
            .collect();
        let lcm = rows.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let t = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect())
            .collect();
        let wlcm = frame
            .diagonal
            .iter()
            .fold(BigInt::one(), |l, x| l.lcm(x.as_rational().unwrap().denom()));
        let weights = frame
            .diagonal
            .iter()
            .map(|x| (x.as_rational().unwrap().abs() * BigRational::from_integer(wlcm.clone())).to_integer())
            .collect();
        AuxFrame { t, weights }
    }
}

impl QuadraticLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n < 2 || gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidRank(n));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let frame = linalg::congruence_diagonalize(&linalg::from_ints(&gram));
        let (pos, neg, nul) = frame.signature();
        if nul > 0 {
            return Err(Error::Degenerate(nul));
        }
        let aux = AuxFrame::new(&gram, &frame);
        Ok(QuadraticLattice {
            gram,
            signature: Signature { pos, neg, nul },
            aux,
            frame,
        })
    }

    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        Self::new(gram)
    }

    /// The hyperbolic plane `U`.
    pub fn hyperbolic_plane() -> Self {
        Self::new(vec![vec![0, 1], vec![1, 0]]).expect("U is non-degenerate")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn is_indefinite(&self) -> bool {
        self.signature.pos > 0 && self.signature.neg > 0
    }

    /// Exact q-orthogonal frame `P` with `P^T G P` diagonal (rational entries).
    pub fn frame(&self) -> &Congruence {
        &self.frame
    }

    pub(crate) fn aux(&self) -> &AuxFrame {
        &self.aux
    }

    fn check_rank(&self, x: &FieldVector) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `G x`.
    pub fn gram_apply(&self, x: &FieldVector) -> Result<FieldVector> {
        self.check_rank(x)?;
        let coords = self
            .gram
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.coords())
                    .filter(|(g, _)| **g != 0)
                    .fold(QuadScalar::zero(), |acc, (&g, c)| &acc + &c.mul_int(g))
            })
            .collect();
        FieldVector::new(x.field(), coords)
    }

    /// `x^T G y`, exact.
    pub fn eval_form(&self, x: &FieldVector, y: &FieldVector) -> Result<QuadScalar> {
        self.check_rank(x)?;
        self.check_rank(y)?;
        join_fields(x.field(), y.field())?;
        let gy = self.gram_apply(y)?;
        Ok(x.coords()
            .iter()
            .zip(gy.coords())
            .fold(QuadScalar::zero(), |acc, (a, b)| &acc + &(a * b)))
    }

    pub fn norm(&self, x: &FieldVector) -> Result<QuadScalar> {
        self.eval_form(x, x)
    }

    /// Integer form evaluation; overflow is reported.
    pub fn eval_int(&self, x: &[i64], y: &[i64]) -> Result<i128> {
        let mut acc: i128 = 0;
        for (i, row) in self.gram.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            for (j, &g) in row.iter().enumerate() {
                if g == 0 || y[j] == 0 {
                    continue;
                }
                let t = (x[i] as i128)
                    .checked_mul(g as i128)
                    .and_then(|t| t.checked_mul(y[j] as i128))
                    .ok_or(Error::Overflow("eval_int"))?;
                acc = acc.checked_add(t).ok_or(Error::Overflow("eval_int"))?;
            }
        }
        Ok(acc)
    }

    /// The reflection `x - 2 q(x,v)/q(v,v) v`.
    pub fn reflect(&self, v: &FieldVector, x: &FieldVector) -> Result<FieldVector> {
        let vv = self.norm(v)?;
        if vv.is_zero() {
            return Err(Error::Isotropic);
        }
        let xv = self.eval_form(x, v)?;
        let c = xv.mul_int(-2).checked_div(&vv).expect("nonzero norm");
        x.add_scaled(&c, v)
    }

    /// True iff the reflection in `v` maps the lattice to itself, i.e. `q(v,v)` divides
    /// `2 (G v)_i` for every `i`.
    pub fn is_integral_reflection(&self, v: &FieldVector) -> Result<bool> {
        self.check_rank(v)?;
        let ints = v.integer_coords().ok_or(Error::NotIntegral)?;
        let small: Option<Vec<i64>> = ints.iter().map(num::ToPrimitive::to_i64).collect();
        let small = small.ok_or(Error::Overflow("is_integral_reflection"))?;
        self.is_integral_reflection_int(&small)
    }

    pub(crate) fn is_integral_reflection_int(&self, v: &[i64]) -> Result<bool> {
        let vv = self.eval_int(v, v)?;
        if vv == 0 {
            return Err(Error::Isotropic);
        }
        for row in &self.gram {
            let gv: i128 = row.iter().zip(v).map(|(&g, &x)| g as i128 * x as i128).sum();
            if (2 * gv) % vv != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dimension of `span_R(span) ∩ V_Q` and a canonical basis of primitive integer vectors.
    ///
    /// A combination `sum c_i w_i` with `c_i = alpha_i + beta_i sqrt d` is rational iff the
    /// `sqrt d` part of every coordinate vanishes, which is a linear system over `Q` in
    /// `(alpha, beta)`.
    pub fn rational_intersection_dim(&self, span: &[FieldVector]) -> Result<RationalPart> {
        let mut d = 1;
        for w in span {
            self.check_rank(w)?;
            d = join_fields(d, w.field())?;
        }
        let rows: Vec<Vec<QuadScalar>> = span.iter().map(|w| w.coords().to_vec()).collect();
        if linalg::rank(&rows) < span.len() {
            return Err(Error::DependentSpan);
        }
        let rational_vectors: Vec<Vec<BigRational>> = if d == 1 {
            span.iter()
                .map(|w| w.rational_coords().expect("rational field"))
                .collect()
        } else {
            let k = span.len();
            let parts: Vec<(Vec<BigRational>, Vec<BigRational>)> =
                span.iter().map(FieldVector::split).collect();
            // unknowns: alpha_0..alpha_{k-1}, beta_0..beta_{k-1}
            // sqrt-d part of coordinate j: sum_i alpha_i b_ij + beta_i a_ij = 0
            let system: Vec<Vec<QuadScalar>> = (0..self.rank())
                .map(|j| {
                    let mut eq: Vec<QuadScalar> =
                        parts.iter().map(|(_, b)| QuadScalar::rational(b[j].clone())).collect();
                    eq.extend(parts.iter().map(|(a, _)| QuadScalar::rational(a[j].clone())));
                    eq
                })
                .collect();
            let dd = BigRational::from_integer(BigInt::from(d));
            linalg::nullspace(&system, 2 * k)
                .into_iter()
                .map(|sol| {
                    let sol: Vec<BigRational> = sol
                        .iter()
                        .map(|s| s.as_rational().expect("rational system").clone())
                        .collect();
                    (0..self.rank())
                        .map(|j| {
                            (0..k).fold(BigRational::zero(), |acc, i| {
                                acc + &sol[i] * &parts[i].0[j] + &sol[k + i] * &parts[i].1[j] * &dd
                            })
                        })
                        .collect()
                })
                .collect()
        };
        Ok(RationalPart::canonical(rational_vectors))
    }

    /// Smallest primitive isotropic vector in the sup-norm box of radius `height_bound`.
    pub fn find_isotropic(&self, height_bound: u32) -> Result<Option<Vec<i64>>> {
        self.find_isotropic_with(height_bound, Execution::default())
    }

    /// Exhaustive search, shell by shell in sup-norm. Inside a shell the order is
    /// lexicographic with coordinates ranked `0, 1, -1, 2, -2, ...`; only vectors whose first
    /// nonzero coordinate is positive are visited.
    pub fn find_isotropic_with(&self, height_bound: u32, exec: Execution) -> Result<Option<Vec<i64>>> {
        let n = self.rank() as u32;
        for h in 1..=height_bound as i64 {
            let base = (2 * h + 1) as u64;
            let total = base.checked_pow(n).ok_or(Error::Overflow("find_isotropic box"))?;
            let hit = par::find_first_index(exec, total, |idx| {
                let v = decode_box_index(idx, base, n as usize);
                v.iter().any(|x| x.abs() == h)
                    && v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
                    && self.eval_int(&v, &v) == Ok(0)
                    && gcd_slice(&v) == 1
            });
            if let Some(idx) = hit {
                return Ok(Some(decode_box_index(idx, base, n as usize)));
            }
        }
        Ok(None)
    }
}

/// Coordinate ranked `k` in the order `0, 1, -1, 2, -2, ...`.
fn rank_to_int(k: u64) -> i64 {
    let k = k as i64;
    if k % 2 == 1 {
        (k + 1) / 2
    } else {
        -(k / 2)
    }
}

pub(crate) fn decode_box_index(mut idx: u64, base: u64, n: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for slot in v.iter_mut().rev() {
        *slot = rank_to_int(idx % base);
        idx /= base;
    }
    v
}

fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Rational part of a real span: its dimension and a canonical primitive basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPart {
    pub dim: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl RationalPart {
    fn canonical(vectors: Vec<Vec<BigRational>>) -> Self {
        if vectors.is_empty() {
            return RationalPart {
                dim: 0,
                basis: Vec::new(),
            };
        }
        let rows: Vec<Vec<QuadScalar>> = vectors
            .into_iter()
            .map(|v| v.into_iter().map(QuadScalar::rational).collect())
            .collect();
        let (reduced, _) = linalg::rref(&rows);
        let basis: Vec<Vec<BigInt>> = reduced
            .into_iter()
            .map(|row| {
                let v = FieldVector::from_rationals(
                    row.into_iter().map(|x| x.as_rational().unwrap().clone()).collect(),
                );
                primitive_part(&v).expect("nonzero rref row")
            })
            .collect();
        RationalPart {
            dim: basis.len(),
            basis,
        }
    }
}

/// Integer vector with coprime coordinates and positive first nonzero entry, proportional to `v`.
pub fn primitive_part(v: &FieldVector) -> Result<Vec<BigInt>> {
    let coords = v.rational_coords().ok_or(Error::NotRational)?;
    if coords.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let lcm = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = coords
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let sign = if ints.iter().find(|x| !x.is_zero()).unwrap().is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    Ok(ints.into_iter().map(|x| x / &g * &sign).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, m: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(m))
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sqrt2_vec(parts: &[(i64, i64)]) -> FieldVector {
        FieldVector::from_parts(2, parts.iter().map(|&(a, b)| (q(a, 1), q(b, 1))).collect()).unwrap()
    }

    fn l5() -> QuadraticLattice {
        QuadraticLattice::diagonal(&[1, 1, 1, -1, -1]).unwrap()
    }

    #[test]
    fn eval_form_examples() {
        let u = QuadraticLattice::hyperbolic_plane();
        let e1 = FieldVector::from_ints(&[1, 0]);
        assert!(u.eval_form(&e1, &e1).unwrap().is_zero());

        let x = FieldVector::from_ints(&[1, 1, 0, 1, 0]);
        assert_eq!(l5().eval_form(&x, &x).unwrap(), QuadScalar::from_int(1));

        let l = QuadraticLattice::diagonal(&[1, -1]).unwrap();
        let x = sqrt2_vec(&[(1, 1), (0, 0)]);
        let y = FieldVector::from_ints(&[1, 0]);
        assert_eq!(
            l.eval_form(&x, &y).unwrap(),
            QuadScalar::new(q(1, 1), q(1, 1), 2)
        );
    }

    #[test]
    fn eval_form_errors() {
        let l = l5();
        assert!(matches!(
            l.eval_form(&FieldVector::from_ints(&[1, 0]), &FieldVector::from_ints(&[1, 0])),
            Err(Error::RankMismatch { .. })
        ));
        let a = FieldVector::new(2, vec![QuadScalar::sqrt_of(2); 5]).unwrap();
        let b = FieldVector::new(3, vec![QuadScalar::sqrt_of(3); 5]).unwrap();
        assert!(matches!(l.eval_form(&a, &b), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn signature_examples() {
        let s = |g: Vec<Vec<i64>>| {
            let s = gram_signature(&g);
            (s.pos, s.neg, s.nul)
        };
        assert_eq!(s(vec![vec![0, 1], vec![1, 0]]), (1, 1, 0));
        assert_eq!(l5().signature(), Signature { pos: 3, neg: 2, nul: 0 });
        assert_eq!(s(vec![vec![2, 1], vec![1, 2]]), (2, 0, 0));
        assert!(matches!(
            QuadraticLattice::new(vec![vec![1, 1], vec![1, 1]]),
            Err(Error::Degenerate(1))
        ));
        assert!(matches!(
            QuadraticLattice::new(vec![vec![1, 2], vec![1, 1]]),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn reflection_examples() {
        let l = l5();
        let v = FieldVector::from_ints(&[0, 0, 0, 1, 0]);
        assert_eq!(l.reflect(&v, &v).unwrap(), v.neg());
        let x = FieldVector::from_ints(&[1, 0, 0, 1, 0]);
        assert_eq!(l.reflect(&v, &x).unwrap(), FieldVector::from_ints(&[1, 0, 0, -1, 0]));
        let fixed = FieldVector::from_ints(&[3, 1, 0, 0, 2]);
        assert_eq!(l.reflect(&v, &fixed).unwrap(), fixed);
        let iso = FieldVector::from_ints(&[1, 0, 0, 1, 0]);
        assert_eq!(l.reflect(&iso, &x), Err(Error::Isotropic));
    }

    #[test]
    fn integral_reflection_examples() {
        let l = l5();
        assert!(l.is_integral_reflection(&FieldVector::from_ints(&[0, 0, 0, 1, 0])).unwrap());
        let u = QuadraticLattice::hyperbolic_plane();
        assert!(u.is_integral_reflection(&FieldVector::from_ints(&[1, -1])).unwrap());
        let l3 = QuadraticLattice::diagonal(&[1, -3]).unwrap();
        assert!(l3.is_integral_reflection(&FieldVector::from_ints(&[0, 1])).unwrap());
        // norm 3 in diag(1,1,1,-1,-1): 2 q(e1, v) = 2 is not divisible by 3
        assert!(!l.is_integral_reflection(&FieldVector::from_ints(&[1, 1, 1, 0, 0])).unwrap());
        assert_eq!(
            l.is_integral_reflection(&FieldVector::from_ints(&[1, 0, 0, 1, 0])),
            Err(Error::Isotropic)
        );
    }

    #[test]
    fn rational_intersection_examples() {
        let l = l5();
        let e = |i| FieldVector::unit(5, i);
        let r = l.rational_intersection_dim(&[e(0), e(1)]).unwrap();
        assert_eq!(r.dim, 2);

        let w1 = sqrt2_vec(&[(1, 0), (0, 1), (0, 0), (0, 0), (0, 0)]);
        let r = l.rational_intersection_dim(&[w1.clone(), e(2)]).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.basis, vec![big(&[0, 0, 1, 0, 0])]);

        let w2 = sqrt2_vec(&[(0, 0), (0, 0), (1, 0), (0, 1), (0, 0)]);
        let r = l.rational_intersection_dim(&[w1.clone(), w2]).unwrap();
        assert_eq!(r.dim, 0);

        assert_eq!(
            l.rational_intersection_dim(&[w1.clone(), w1.scale(&QuadScalar::from_int(3))]),
            Err(Error::DependentSpan)
        );
    }

    #[test]
    fn rational_part_of_a_rotated_span() {
        // span{e1 + sqrt2 e2, e1 - sqrt2 e2} contains e1 and e2 (over R), so dim 2
        let l = l5();
        let a = sqrt2_vec(&[(1, 0), (0, 1), (0, 0), (0, 0), (0, 0)]);
        let b = sqrt2_vec(&[(1, 0), (0, -1), (0, 0), (0, 0), (0, 0)]);
        let r = l.rational_intersection_dim(&[a, b]).unwrap();
        assert_eq!(r.dim, 2);
        assert_eq!(r.basis, vec![big(&[1, 0, 0, 0, 0]), big(&[0, 1, 0, 0, 0])]);
    }

    #[test]
    fn isotropic_examples() {
        let u = QuadraticLattice::hyperbolic_plane();
        // (0,1) precedes (1,0) in the shell ordering
        assert_eq!(u.find_isotropic(1).unwrap(), Some(vec![0, 1]));
        assert_eq!(l5().find_isotropic(1).unwrap(), Some(vec![0, 0, 1, 0, 1]));
        let l = QuadraticLattice::diagonal(&[1, 1, 1, -2, -3]).unwrap();
        let x = l.find_isotropic(2).unwrap().unwrap();
        assert_eq!(x, vec![0, 1, 1, 1, 0]);
        let definite = QuadraticLattice::diagonal(&[1, 1, 1]).unwrap();
        assert_eq!(definite.find_isotropic(3).unwrap(), None);
    }

    #[test]
    fn isotropic_search_is_strategy_independent() {
        let l = QuadraticLattice::diagonal(&[3, 2, 1, -3, -2]).unwrap();
        assert_eq!(
            l.find_isotropic_with(4, Execution::Sequential).unwrap(),
            l.find_isotropic_with(4, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn primitive_part_examples() {
        let v = FieldVector::from_rationals(vec![q(2, 3), q(4, 3)]);
        assert_eq!(primitive_part(&v).unwrap(), big(&[1, 2]));
        assert_eq!(primitive_part(&FieldVector::from_ints(&[-1, 0])).unwrap(), big(&[1, 0]));
        assert_eq!(primitive_part(&FieldVector::from_ints(&[0, 5, 10])).unwrap(), big(&[0, 1, 2]));
        assert_eq!(primitive_part(&FieldVector::from_ints(&[0, 0])), Err(Error::ZeroVector));
        assert_eq!(primitive_part(&sqrt2_vec(&[(0, 1)])), Err(Error::NotRational));
    }
}
