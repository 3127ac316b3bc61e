//! Dense exact linear algebra over `Q(sqrt d)`.

use num::{BigInt, One, Zero};

use crate::field::QuadScalar;

pub type Matrix = Vec<Vec<QuadScalar>>;

/// Result of a congruence diagonalization `P^T G P = diag(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    /// Columns of `P`, one per diagonal entry.
    pub columns: Vec<Vec<QuadScalar>>,
    pub diagonal: Vec<QuadScalar>,
}

impl Congruence {
    pub fn signature(&self) -> (usize, usize, usize) {
        let mut out = (0, 0, 0);
        for d in &self.diagonal {
            match d.signum() {
                1 => out.0 += 1,
                -1 => out.1 += 1,
                _ => out.2 += 1,
            }
        }
        out
    }
}

/// Symmetric Gaussian elimination: finds `P` with `P^T G P` diagonal.
///
/// When the pivot `g_kk` vanishes, a later nonzero diagonal entry is swapped in;
/// if every remaining diagonal entry vanishes but `g_kj != 0`, the basis vector
/// `x_k` is replaced by `x_k + x_j`, which makes the new pivot `2 g_kj`.
pub fn congruence_diagonalize(gram: &Matrix) -> Congruence {
    let n = gram.len();
    let mut a = gram.clone();
    let mut p: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { QuadScalar::one() } else { QuadScalar::zero() }).collect())
        .collect();

    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap_basis(&mut a, &mut p, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                add_basis(&mut a, &mut p, k, j, &QuadScalar::one());
            } else {
                continue;
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let c = -a[i][k].checked_div(&pivot).expect("nonzero pivot");
            add_basis(&mut a, &mut p, i, k, &c);
        }
    }

    let columns = (0..n).map(|j| (0..n).map(|i| p[i][j].clone()).collect()).collect();
    let diagonal = (0..n).map(|i| a[i][i].clone()).collect();
    Congruence { columns, diagonal }
}

fn swap_basis(a: &mut Matrix, p: &mut Matrix, i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in p.iter_mut() {
        row.swap(i, j);
    }
}

/// Basis change `x_i <- x_i + c x_j` applied as a congruence.
fn add_basis(a: &mut Matrix, p: &mut Matrix, i: usize, j: usize, c: &QuadScalar) {
    let n = a.len();
    for col in 0..n {
        let t = c * &a[j][col];
        a[i][col] = &a[i][col] + &t;
    }
    for row in 0..n {
        let t = c * &a[row][j];
        a[row][i] = &a[row][i] + &t;
    }
    for row in p.iter_mut() {
        let t = c * &row[j];
        row[i] = &row[i] + &t;
    }
}

/// Reduced row-echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<QuadScalar>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..ncols {
                let t = &f * &m[r][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<QuadScalar>]) -> usize {
    rref(rows).1.len()
}

/// Basis of `{x : A x = 0}` for the `m x k` matrix `A` given by rows.
pub fn nullspace(rows: &[Vec<QuadScalar>], ncols: usize) -> Matrix {
    let (r, pivots) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![QuadScalar::zero(); ncols];
            v[f] = QuadScalar::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -&row[f];
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { QuadScalar::one() } else { QuadScalar::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    (0..k).fold(QuadScalar::zero(), |acc, l| &acc + &(&row[l] * &b[l][j]))
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn from_ints(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| QuadScalar::from_int(x)).collect())
        .collect()
}
