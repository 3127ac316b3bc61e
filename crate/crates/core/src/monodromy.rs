//! Integral isometries generated by pairs of reflections, and word-ball orbit sampling.

use std::collections::HashSet;
use std::sync::Arc;

use num::integer::Integer;
use num::{BigInt, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldVector, QuadScalar};
use crate::lattice::QuadraticLattice;
use crate::linalg;
use crate::par::{self, Execution};
use crate::period::{PlaneKey, PositivePlane};
use crate::zvec::ZVec;

pub type IntMatrix = Vec<Vec<i64>>;

/// Element of `SO^+(V_Z)` together with the word that produced it.
///
/// For generators the word lists the indices (into [`reflection_vectors`]) of the two
/// reflections whose product, left to right, is the matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegralIsometry {
    matrix: IntMatrix,
    word: Vec<usize>,
}

impl IntegralIsometry {
    /// Validates `M^T G M = G`, `det M = 1` and membership in `SO^+`.
    pub fn new(lattice: &QuadraticLattice, matrix: IntMatrix, word: Vec<usize>) -> Result<Self> {
        if !so_plus_membership(lattice, &matrix)? {
            return Err(Error::NotIsometry);
        }
        Ok(IntegralIsometry { matrix, word })
    }

    pub fn identity(n: usize) -> Self {
        IntegralIsometry {
            matrix: identity_matrix(n),
            word: Vec::new(),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity_matrix(self.matrix.len())
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let matrix = mat_mul_int(&self.matrix, &other.matrix)?;
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Ok(IntegralIsometry { matrix, word })
    }

    /// `G^-1 M^T G`, checked to be integral.
    pub fn inverse(&self, lattice: &QuadraticLattice) -> Result<Self> {
        let g = linalg::from_ints(lattice.gram());
        let ginv = linalg::inverse(&g).ok_or(Error::Degenerate(1))?;
        let mt = linalg::transpose(&linalg::from_ints(&self.matrix));
        let inv = linalg::mat_mul(&linalg::mat_mul(&ginv, &mt), &g);
        let matrix = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        x.as_rational()
                            .filter(|r| r.is_integer())
                            .and_then(|r| r.to_integer().to_i64())
                            .ok_or(Error::NotIsometry)
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<IntMatrix>>()?;
        let word = self.word.iter().rev().copied().collect();
        Ok(IntegralIsometry { matrix, word })
    }

    pub fn apply(&self, x: &FieldVector) -> FieldVector {
        apply_int_matrix(&self.matrix, x)
    }

    pub fn apply_plane(&self, plane: &PositivePlane) -> PositivePlane {
        let [w1, w2] = plane.basis();
        PositivePlane::from_basis_unchecked(Arc::clone(plane.lattice()), [self.apply(w1), self.apply(w2)])
    }
}

fn identity_matrix(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub(crate) fn apply_int_matrix(m: &IntMatrix, x: &FieldVector) -> FieldVector {
    let coords = m
        .iter()
        .map(|row| {
            row.iter()
                .zip(x.coords())
                .filter(|(g, _)| **g != 0)
                .fold(QuadScalar::zero(), |acc, (&g, c)| &acc + &c.mul_int(g))
        })
        .collect();
    FieldVector::new(x.field(), coords).expect("same field")
}

fn mat_mul_int(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let n = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc: i128 = 0;
                    for k in 0..n {
                        acc += row[k] as i128 * b[k][j] as i128;
                    }
                    i64::try_from(acc).map_err(|_| Error::Overflow("matrix product"))
                })
                .collect()
        })
        .collect()
}

fn to_big(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// `M^T G M == G`, exactly.
pub fn is_isometry(lattice: &QuadraticLattice, m: &IntMatrix) -> bool {
    let n = lattice.rank();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return false;
    }
    let g = lattice.gram();
    for i in 0..n {
        for j in i..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                if m[k][i] == 0 {
                    continue;
                }
                for l in 0..n {
                    acc += m[k][i] as i128 * g[k][l] as i128 * m[l][j] as i128;
                }
            }
            if acc != g[i][j] as i128 {
                return false;
            }
        }
    }
    true
}

pub fn determinant(m: &IntMatrix) -> BigInt {
    linalg::det_bigint(&to_big(m))
}

/// Whether an isometry with determinant one lies in the identity component.
///
/// With `p_1..p_k` a basis of the lattice's exact maximal positive subspace (scaled to be
/// integral), the isometry preserves the orientation of the positive part iff
/// `det [q(p_i, g p_j)] > 0`.
pub fn so_plus_membership(lattice: &QuadraticLattice, g: &IntMatrix) -> Result<bool> {
    if !is_isometry(lattice, g) {
        return Err(Error::NotIsometry);
    }
    let det = determinant(g);
    if det != BigInt::one() {
        return Err(Error::WrongDeterminant(det.to_i64().unwrap_or(0)));
    }
    let frame = positive_frame(lattice);
    Ok(positive_orientation_sign(lattice, &frame, g) > 0)
}

/// Integral positive frame vectors.
fn positive_frame(lattice: &QuadraticLattice) -> Vec<Vec<BigInt>> {
    let f = lattice.frame();
    f.columns
        .iter()
        .zip(&f.diagonal)
        .filter(|(_, d)| d.is_positive())
        .map(|(col, _)| {
            let lcm = col.iter().fold(BigInt::one(), |l, c| {
                l.lcm(c.as_rational().expect("rational frame").denom())
            });
            col.iter()
                .map(|c| (c.as_rational().unwrap() * num::BigRational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect()
}

fn positive_orientation_sign(lattice: &QuadraticLattice, frame: &[Vec<BigInt>], g: &IntMatrix) -> i8 {
    let gram = lattice.gram();
    let n = lattice.rank();
    let images: Vec<Vec<BigInt>> = frame
        .iter()
        .map(|p| {
            (0..n)
                .map(|i| (0..n).fold(BigInt::zero(), |acc, j| acc + &p[j] * g[i][j]))
                .collect()
        })
        .collect();
    let form = |x: &[BigInt], y: &[BigInt]| -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if gram[i][j] != 0 {
                    acc += &x[i] * gram[i][j] * &y[j];
                }
            }
        }
        acc
    };
    let m: Vec<Vec<BigInt>> = frame
        .iter()
        .map(|p| images.iter().map(|gp| form(p, gp)).collect())
        .collect();
    let det = linalg::det_bigint(&m);
    if det > BigInt::zero() {
        1
    } else if det < BigInt::zero() {
        -1
    } else {
        0
    }
}

/// Matrix of the reflection `x -> x - 2 q(x,v)/q(v,v) v` (requires integrality).
pub fn reflection_matrix(lattice: &QuadraticLattice, v: &[i64]) -> Result<IntMatrix> {
    if !lattice.is_integral_reflection_int(v)? {
        return Err(Error::NotIntegral);
    }
    let vv = lattice.eval_int(v, v)?;
    let n = lattice.rank();
    let gv: Vec<i128> = lattice
        .gram()
        .iter()
        .map(|row| row.iter().zip(v).map(|(&g, &x)| g as i128 * x as i128).sum())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let t = i128::from(i == j) - 2 * gv[j] * v[i] as i128 / vv;
                    i64::try_from(t).map_err(|_| Error::Overflow("reflection matrix"))
                })
                .collect()
        })
        .collect()
}

/// Primitive vectors `v` with sup-norm at most `height_bound`, first nonzero coordinate positive,
/// `0 < |q(v,v)| <= norm_bound`, whose reflection is integral. Ordered by sup-norm, then
/// lexicographically with coordinates ranked `0, 1, -1, 2, -2, ...`.
pub fn reflection_vectors(lattice: &QuadraticLattice, norm_bound: u64, height_bound: u32) -> Result<Vec<Vec<i64>>> {
    let n = lattice.rank() as u32;
    let mut out = Vec::new();
    for h in 1..=height_bound as i64 {
        let base = (2 * h + 1) as u64;
        let total = base.checked_pow(n).ok_or(Error::Overflow("reflection_vectors box"))?;
        for idx in 0..total {
            let v = crate::lattice::decode_box_index(idx, base, n as usize);
            if !v.iter().any(|x| x.abs() == h) || v.iter().find(|&&x| x != 0).is_none_or(|&x| x < 0) {
                continue;
            }
            if v.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
                continue;
            }
            let vv = lattice.eval_int(&v, &v)?;
            if vv == 0 || vv.unsigned_abs() > norm_bound as u128 {
                continue;
            }
            if lattice.is_integral_reflection_int(&v)? {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Products `rho_u rho_w` of two integral reflections that land in `SO^+`.
pub fn reflection_generators(lattice: &QuadraticLattice, norm_bound: u64, height_bound: u32) -> Result<Vec<IntegralIsometry>> {
    reflection_generators_with(lattice, norm_bound, height_bound, Execution::default())
}

pub fn reflection_generators_with(
    lattice: &QuadraticLattice,
    norm_bound: u64,
    height_bound: u32,
    exec: Execution,
) -> Result<Vec<IntegralIsometry>> {
    let vectors = reflection_vectors(lattice, norm_bound, height_bound)?;
    let mats: Vec<IntMatrix> = vectors
        .iter()
        .map(|v| reflection_matrix(lattice, v))
        .collect::<Result<_>>()?;
    let frame = positive_frame(lattice);
    // reflections in positive vectors flip the positive orientation, the others keep it
    let flips: Vec<bool> = mats
        .iter()
        .map(|m| positive_orientation_sign(lattice, &frame, m) < 0)
        .collect();
    let k = mats.len();
    let products = par::map_range(exec, k, |i| {
        (0..k)
            .filter(|&j| j != i && flips[i] == flips[j])
            .map(|j| mat_mul_int(&mats[i], &mats[j]).map(|m| (m, i, j)))
            .collect::<Result<Vec<_>>>()
    });
    let identity = identity_matrix(lattice.rank());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in products {
        for (m, i, j) in row? {
            if m == identity || !seen.insert(m.clone()) {
                continue;
            }
            debug_assert!(so_plus_membership(lattice, &m).unwrap_or(false));
            out.push(IntegralIsometry { matrix: m, word: vec![i, j] });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyGeneratorSet);
    }
    Ok(out)
}

/// `n` elements spread evenly through `gens`: indices `k * floor(len / n)`.
pub fn spread_subset(gens: &[IntegralIsometry], n: usize) -> Vec<IntegralIsometry> {
    if n == 0 || n >= gens.len() {
        return gens.to_vec();
    }
    let stride = gens.len() / n;
    (0..n).map(|k| gens[k * stride].clone()).collect()
}

/// Point of a sampled orbit: `word[k-1] ... word[0] . base`.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub plane: PositivePlane,
    pub key: PlaneKey,
    /// Letters, indices into [`OrbitSample::alphabet`], applied first to last.
    pub word: Vec<u32>,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub base: PositivePlane,
    /// Generators followed by those inverses that are not already generators.
    pub alphabet: Vec<IntegralIsometry>,
    /// Breadth-first order; depths are nondecreasing.
    pub points: Vec<OrbitPoint>,
    pub depth: usize,
    pub truncated: bool,
}

impl OrbitSample {
    /// Number of points of word length at most `k`.
    pub fn count_within(&self, k: usize) -> usize {
        self.points.partition_point(|p| p.depth <= k)
    }

    /// Product of the word's letters as one isometry.
    pub fn word_isometry(&self, word: &[u32]) -> Result<IntegralIsometry> {
        let n = self.base.lattice().rank();
        word.iter().try_fold(IntegralIsometry::identity(n), |acc, &l| {
            self.alphabet[l as usize].compose(&acc)
        })
    }

    /// Applies the word to a vector, letter by letter.
    pub fn transport(&self, word: &[u32], v: &FieldVector) -> FieldVector {
        word.iter()
            .fold(v.clone(), |x, &l| self.alphabet[l as usize].apply(&x))
    }
}

/// Generators together with their missing inverses.
pub fn alphabet_with_inverses(lattice: &QuadraticLattice, gens: &[IntegralIsometry]) -> Result<Vec<IntegralIsometry>> {
    let mut out: Vec<IntegralIsometry> = gens.to_vec();
    let mut seen: HashSet<IntMatrix> = gens.iter().map(|g| g.matrix.clone()).collect();
    for g in gens {
        let inv = g.inverse(lattice)?;
        if seen.insert(inv.matrix.clone()) {
            out.push(inv);
        }
    }
    Ok(out)
}

const FRONTIER_CHUNK: usize = 64;

/// Breadth-first word ball of radius `depth` around `base`, deduplicated by exact plane keys
/// and capped at `cap` points.
pub fn orbit_ball(base: &PositivePlane, gens: &[IntegralIsometry], depth: usize, cap: usize) -> Result<OrbitSample> {
    orbit_ball_with(base, gens, depth, cap, Execution::default())
}

pub fn orbit_ball_with(
    base: &PositivePlane,
    gens: &[IntegralIsometry],
    depth: usize,
    cap: usize,
    exec: Execution,
) -> Result<OrbitSample> {
    let cap = cap.max(1);
    let alphabet = alphabet_with_inverses(base.lattice(), gens)?;
    let lattice = base.lattice();
    let base_z = [
        ZVec::from_field_vector(&base.basis()[0]),
        ZVec::from_field_vector(&base.basis()[1]),
    ];
    let base_key = PlaneKey::from_zvecs(&base_z[0], &base_z[1]);
    let mut seen: HashSet<PlaneKey> = HashSet::from([base_key.clone()]);
    let mut points = vec![OrbitPoint {
        plane: base.clone(),
        key: base_key,
        word: Vec::new(),
        depth: 0,
    }];
    let mut zs = vec![base_z];
    let mut frontier = vec![0usize];
    let mut truncated = false;

    'levels: for level in 1..=depth {
        let mut next = Vec::new();
        for chunk in frontier.chunks(FRONTIER_CHUNK) {
            let jobs: Vec<(usize, u32)> = chunk
                .iter()
                .flat_map(|&p| (0..alphabet.len() as u32).map(move |l| (p, l)))
                .collect();
            let images = par::map(exec, &jobs, |&(p, l)| {
                let m = &alphabet[l as usize].matrix;
                let z = [zs[p][0].apply(m), zs[p][1].apply(m)];
                let key = PlaneKey::from_zvecs(&z[0], &z[1]);
                (z, key)
            });
            for ((p, l), (z, key)) in jobs.into_iter().zip(images) {
                if seen.contains(&key) {
                    continue;
                }
                if points.len() >= cap {
                    truncated = true;
                    break 'levels;
                }
                seen.insert(key.clone());
                let mut word = points[p].word.clone();
                word.push(l);
                next.push(points.len());
                let plane = PositivePlane::from_basis_unchecked(
                    Arc::clone(lattice),
                    [z[0].to_field_vector(), z[1].to_field_vector()],
                );
                points.push(OrbitPoint {
                    plane,
                    key,
                    word,
                    depth: level,
                });
                zs.push(z);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    Ok(OrbitSample {
        base: base.clone(),
        alphabet,
        points,
        depth,
        truncated,
    })
}
