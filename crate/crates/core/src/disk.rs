//! The projectivized positive cone of a signature `(1, 2)` subspace as the unit disk,
//! with wall chords, chambers and their boundary arcs.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num::integer::Integer;
use num::{BigInt, BigRational, One};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{join_fields, FieldVector, QuadScalar};
use crate::lattice::QuadraticLattice;
use crate::linalg;
use crate::par::{self, Execution};
use crate::zvec::sign_of;

pub const DEFAULT_PROBE_GRID: usize = 257;

/// `P Pos(W)` for a three-dimensional `W` of signature `(1, 2)`, with an exact frame
/// `p1, p2, p3` (ambient coordinates) in which `q|_W = diag(1, -1, -1)`.
#[derive(Clone, Debug)]
pub struct DiskModel {
    lattice: Arc<QuadraticLattice>,
    w_basis: [FieldVector; 3],
    frame: [FieldVector; 3],
}

/// Image of a cone vector: strictly inside the disk, or on the circle for isotropic vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "point", rename_all = "lowercase")]
pub enum DiskPoint {
    Interior((f64, f64)),
    Boundary((f64, f64)),
}

impl DiskPoint {
    pub fn xy(&self) -> (f64, f64) {
        match *self {
            DiskPoint::Interior(p) | DiskPoint::Boundary(p) => p,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, DiskPoint::Boundary(_))
    }
}

impl DiskModel {
    pub fn new(lattice: Arc<QuadraticLattice>, w_basis: [FieldVector; 3]) -> Result<Self> {
        let mut d = 1;
        for w in &w_basis {
            if w.len() != lattice.rank() {
                return Err(Error::RankMismatch {
                    expected: lattice.rank(),
                    found: w.len(),
                });
            }
            d = join_fields(d, w.field())?;
        }
        let gram: Vec<Vec<QuadScalar>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| lattice.eval_form(&w_basis[i], &w_basis[j]))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let cong = linalg::congruence_diagonalize(&gram);
        let (pos, neg, nul) = cong.signature();
        if (pos, neg, nul) != (1, 2, 0) {
            return Err(Error::SubspaceSignature { pos, neg, nul });
        }
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by_key(|&i| cong.diagonal[i].is_negative());
        let mut frame = Vec::with_capacity(3);
        for &i in &order {
            let size = cong.diagonal[i].abs();
            let root = size.sqrt().ok_or(Error::FrameNotNormalizable)?;
            let inv = root.inv().ok_or(Error::FrameNotNormalizable)?;
            let field = join_fields(d, inv.field()).map_err(|_| Error::FrameNotNormalizable)?;
            d = field;
            let mut v = FieldVector::zeros(lattice.rank()).lift(field)?;
            for (k, w) in w_basis.iter().enumerate() {
                let w = w.lift(field)?;
                v = v.add_scaled(&cong.columns[i][k], &w)?;
            }
            frame.push(v.scale(&inv));
        }
        let frame: [FieldVector; 3] = frame.try_into().expect("three frame vectors");
        Ok(DiskModel {
            lattice,
            w_basis,
            frame,
        })
    }

    pub fn lattice(&self) -> &Arc<QuadraticLattice> {
        &self.lattice
    }

    pub fn w_basis(&self) -> &[FieldVector; 3] {
        &self.w_basis
    }

    pub fn frame(&self) -> &[FieldVector; 3] {
        &self.frame
    }

    /// Exact `q(x, p_i)` for the three frame vectors.
    pub fn pairings(&self, x: &FieldVector) -> Result<[QuadScalar; 3]> {
        Ok([
            self.lattice.eval_form(x, &self.frame[0])?,
            self.lattice.eval_form(x, &self.frame[1])?,
            self.lattice.eval_form(x, &self.frame[2])?,
        ])
    }

    /// Frame coordinates `(v1, v2, v3)` of a vector of `W`, checked exactly.
    pub fn frame_coords(&self, v: &FieldVector) -> Result<[QuadScalar; 3]> {
        let [a, b, c] = self.pairings(v)?;
        let coords = [a, -b, -c];
        let mut back = FieldVector::zeros(v.len());
        for (k, p) in self.frame.iter().enumerate() {
            back = back.add_scaled(&coords[k], p)?;
        }
        if back.checked_sub(v)?.is_zero() {
            Ok(coords)
        } else {
            Err(Error::NotInSubspace)
        }
    }

    /// Ambient vector with frame coordinates `c`.
    pub fn from_frame_coords(&self, c: &[QuadScalar; 3]) -> Result<FieldVector> {
        let mut v = FieldVector::zeros(self.lattice.rank());
        for (k, p) in self.frame.iter().enumerate() {
            v = v.add_scaled(&c[k], p)?;
        }
        Ok(v)
    }
}

/// `v -> (v2 / v1, v3 / v1)` on the cone component `v1 > 0`.
pub fn disk_coords(disk: &DiskModel, v: &FieldVector) -> Result<DiskPoint> {
    let [v1, v2, v3] = disk.frame_coords(v)?;
    if !v1.is_positive() {
        return Err(Error::OutsideCone);
    }
    let norm = &(&v1 * &v1) - &(&(&v2 * &v2) + &(&v3 * &v3));
    let x = v2.checked_div(&v1).expect("v1 > 0").to_f64();
    let y = v3.checked_div(&v1).expect("v1 > 0").to_f64();
    match norm.signum() {
        1 => Ok(DiskPoint::Interior((x, y))),
        0 => Ok(DiskPoint::Boundary((x, y))),
        _ => Err(Error::OutsideCone),
    }
}

/// Chord of the disk cut out by `s^perp`: the line `alpha + beta x + gamma y = 0` where
/// `(alpha, beta, gamma) = (q(s,p1), q(s,p2), q(s,p3))`.
#[derive(Clone, Debug)]
pub struct Wall {
    pub s: FieldVector,
    pub coefficients: [QuadScalar; 3],
    /// Circle endpoints, absent when `s^perp` misses the open cone.
    pub endpoints: Option<[(f64, f64); 2]>,
}

impl Wall {
    pub fn is_present(&self) -> bool {
        self.endpoints.is_some()
    }

    /// Endpoint angles in `[0, 2 pi)`.
    pub fn endpoint_angles(&self) -> Option<[f64; 2]> {
        self.endpoints
            .map(|e| e.map(|(x, y)| y.atan2(x).rem_euclid(TAU)))
    }

    /// `alpha + beta x + gamma y` in floating point.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let [a, b, c] = &self.coefficients;
        a.to_f64() + b.to_f64() * x + c.to_f64() * y
    }
}

pub fn wall_geodesic(disk: &DiskModel, s: &FieldVector) -> Result<Wall> {
    if !disk.lattice.norm(s)?.is_negative() {
        return Err(Error::NonNegativeWall);
    }
    let coefficients = disk.pairings(s)?;
    let [alpha, beta, gamma] = &coefficients;
    let rho2 = &(beta * beta) + &(gamma * gamma);
    let proj_norm = &(alpha * alpha) - &rho2;
    let endpoints = if proj_norm.is_negative() {
        // foot of the perpendicular from the origin, then half the chord length along the line
        let t = alpha.checked_div(&rho2).expect("rho > 0");
        let h2 = (&QuadScalar::one() - &(&t * alpha)).to_f64().max(0.0);
        let rho = rho2.to_f64().sqrt();
        let (b, c) = (beta.to_f64(), gamma.to_f64());
        let (fx, fy) = (-t.to_f64() * b, -t.to_f64() * c);
        let h = h2.sqrt() / rho;
        Some([(fx - h * c, fy + h * b), (fx + h * c, fy - h * b)])
    } else {
        None
    };
    Ok(Wall {
        s: s.clone(),
        coefficients,
        endpoints,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chamber {
    /// Side of each wall: `+1`/`-1`, or `0` for walls absent from the disk.
    pub signs: Vec<i8>,
    pub sample_point: (f64, f64),
    /// Open arcs `(theta0, theta1)` of the circle in the closure, with `theta0` in
    /// `[0, 2 pi)` and `theta0 < theta1 <= theta0 + 2 pi`.
    pub arcs: Vec<(f64, f64)>,
}

pub fn has_round_bits(c: &Chamber) -> bool {
    !c.arcs.is_empty()
}

/// Wall coefficients as integers `(x, y)` meaning `x + y sqrt(e)`, up to a common positive factor.
struct IntWall {
    e: u64,
    coeffs: [(BigInt, BigInt); 3],
}

impl IntWall {
    fn new(w: &Wall) -> Self {
        let e = w.coefficients.iter().map(QuadScalar::field).max().unwrap_or(1);
        let lcm = w.coefficients.iter().fold(BigInt::one(), |l, c| {
            l.lcm(c.rational_part().denom()).lcm(c.irrational_part().denom())
        });
        let scale = BigRational::from_integer(lcm);
        let coeffs = w.coefficients.clone().map(|c| {
            (
                (c.rational_part() * &scale).to_integer(),
                (c.irrational_part() * &scale).to_integer(),
            )
        });
        IntWall { e, coeffs }
    }

    /// Exact sign at the grid point `((2i + 1 - n) / n, (2j + 1 - n) / n)`.
    fn sign_at(&self, i: i64, j: i64, n: i64) -> i8 {
        let [(a0, a1), (b0, b1), (c0, c1)] = &self.coeffs;
        let (x, y) = (BigInt::from(2 * i + 1 - n), BigInt::from(2 * j + 1 - n));
        let n = BigInt::from(n);
        let r = a0 * &n + b0 * &x + c0 * &y;
        let q = a1 * &n + b1 * &x + c1 * &y;
        sign_of(&r, &q, self.e)
    }
}

pub fn chamber_decompose(disk: &DiskModel, walls: &[Wall], probe_grid: usize) -> Vec<Chamber> {
    chamber_decompose_with(disk, walls, probe_grid, Execution::default())
}

pub fn chamber_decompose_with(_disk: &DiskModel, walls: &[Wall], probe_grid: usize, exec: Execution) -> Vec<Chamber> {
    let n = probe_grid.max(1) as i64;
    let present: Vec<usize> = (0..walls.len()).filter(|&k| walls[k].is_present()).collect();
    let int_walls: Vec<IntWall> = present.iter().map(|&k| IntWall::new(&walls[k])).collect();

    // row j of the grid: first probe of every sign vector met in that row
    let rows = par::map_range(exec, n as usize, |j| {
        let j = j as i64;
        let mut found: Vec<(Vec<i8>, (f64, f64))> = Vec::new();
        for i in 0..n {
            let (x, y) = (2 * i + 1 - n, 2 * j + 1 - n);
            if x * x + y * y >= n * n {
                continue;
            }
            let signs: Vec<i8> = int_walls.iter().map(|w| w.sign_at(i, j, n)).collect();
            if signs.contains(&0) || found.iter().any(|(s, _)| *s == signs) {
                continue;
            }
            found.push((signs, (x as f64 / n as f64, y as f64 / n as f64)));
        }
        found
    });
    let mut chambers: BTreeMap<Vec<i8>, ((f64, f64), Vec<(f64, f64)>)> = BTreeMap::new();
    for (signs, p) in rows.into_iter().flatten() {
        chambers.entry(signs).or_insert((p, Vec::new()));
    }

    let mut cuts: Vec<f64> = present
        .iter()
        .flat_map(|&k| walls[k].endpoint_angles().expect("present wall"))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if cuts.len() > 1 && (cuts[0] + TAU - cuts[cuts.len() - 1]).abs() < 1e-12 {
        cuts.pop();
    }
    let arcs: Vec<(f64, f64)> = if cuts.is_empty() {
        vec![(0.0, TAU)]
    } else {
        (0..cuts.len())
            .map(|k| {
                let a = cuts[k];
                let b = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + TAU };
                (a, b)
            })
            .collect()
    };
    for (a, b) in arcs {
        let mid = 0.5 * (a + b);
        let (cx, cy) = (mid.cos(), mid.sin());
        let signs: Vec<i8> = present
            .iter()
            .map(|&k| if walls[k].eval_f64(cx, cy) > 0.0 { 1 } else { -1 })
            .collect();
        let entry = chambers.entry(signs).or_insert_with(|| {
            // chamber missed by the grid: a point just inside the arc midpoint
            let r = 1.0 - 1e-9;
            ((r * cx, r * cy), Vec::new())
        });
        entry.1.push((a, b));
    }

    chambers
        .into_iter()
        .map(|(present_signs, (sample_point, mut arcs))| {
            arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut signs = vec![0i8; walls.len()];
            for (s, &k) in present_signs.iter().zip(&present) {
                signs[k] = *s;
            }
            Chamber {
                signs,
                sample_point,
                arcs,
            }
        })
        .collect()
}

/// Side of each present wall at a floating point of the disk (`0` on a wall or for absent walls).
pub fn sign_vector_at(walls: &[Wall], x: f64, y: f64) -> Vec<i8> {
    walls
        .iter()
        .map(|w| {
            if !w.is_present() {
                return 0;
            }
            let v = w.eval_f64(x, y);
            if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect()
}
