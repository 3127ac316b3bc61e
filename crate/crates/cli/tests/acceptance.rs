//! Acceptance suite. Criteria run one after another on the main thread so that their wall
//! clock limits are measured without interference; each prints one PASS/FAIL line.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::{BigRational, Integer, One, Signed, ToPrimitive, Zero};
use periodlab::diagnostic::{closure_diagnostic, witness_containment};
use periodlab::disk::chamber_decompose;
use periodlab::horocycle::horocycle_orbit_conformal;
use periodlab::io;
use periodlab::monodromy::{orbit_ball, reflection_generators, spread_subset};
use periodlab::period::{period_to_plane, plane_contains, plane_to_period, AntiHolomorphicInvolution};
use periodlab::{
    fit_circle, has_round_bits, orbit_type, tangency_residual, unipotent_subgroup, wall_geodesic, DiskModel,
    FieldVector, OrbitType, PositivePlane, QuadScalar, QuadraticLattice,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `a + b sqrt(d)` with rational parts.
fn qs(a: BigRational, b: BigRational, d: u64) -> QuadScalar {
    QuadScalar::new(a, b, d)
}

fn int(n: i64) -> QuadScalar {
    QuadScalar::from_int(n)
}

fn vec_of(d: u64, coords: Vec<QuadScalar>) -> FieldVector {
    FieldVector::new(d, coords).unwrap()
}

fn lattice(n_neg: usize) -> Arc<QuadraticLattice> {
    let mut diag = vec![1; 3];
    diag.extend(std::iter::repeat(-1).take(n_neg));
    Arc::new(QuadraticLattice::diagonal(&diag).unwrap())
}

// ---------------------------------------------------------------------------------------
// exact oracles on coordinate vectors

fn minor2(u: &FieldVector, v: &FieldVector, i: usize, j: usize) -> QuadScalar {
    let (u, v) = (u.coords(), v.coords());
    &(&u[i] * &v[j]) - &(&u[j] * &v[i])
}

fn minor3(a: &FieldVector, b: &FieldVector, c: &FieldVector, i: usize, j: usize, k: usize) -> QuadScalar {
    let (a, b, c) = (a.coords(), b.coords(), c.coords());
    let t1 = &a[i] * &(&(&b[j] * &c[k]) - &(&b[k] * &c[j]));
    let t2 = &a[j] * &(&(&b[i] * &c[k]) - &(&b[k] * &c[i]));
    let t3 = &a[k] * &(&(&b[i] * &c[j]) - &(&b[j] * &c[i]));
    &(&t1 - &t2) + &t3
}

/// `x` lies in `span{w1, w2}` iff every 3x3 minor of the stacked rows vanishes.
fn in_span(w1: &FieldVector, w2: &FieldVector, x: &FieldVector) -> bool {
    let n = x.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !minor3(w1, w2, x, i, j, k).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Same oriented span: Plucker vectors are positive multiples of each other.
fn same_oriented_span(a: [&FieldVector; 2], b: [&FieldVector; 2]) -> bool {
    let n = a[0].len();
    let pa: Vec<QuadScalar> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| minor2(a[0], a[1], i, j)).collect();
    let pb: Vec<QuadScalar> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| minor2(b[0], b[1], i, j)).collect();
    let Some(k) = pa.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if pb[k].is_zero() || pa[k].signum() != pb[k].signum() {
        return false;
    }
    (0..pa.len()).all(|l| (&pa[l] * &pb[k]) == (&pb[l] * &pa[k]))
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Dimension of the span of primitive integer vectors of height `<= h` inside the plane,
/// found by exhaustive search (float prefilter, exact confirmation).
fn brute_force_rational_dim(w1: &FieldVector, w2: &FieldVector, h: i64) -> usize {
    let n = w1.len();
    let (a, b) = (w1.to_f64(), w2.to_f64());
    // orthonormal basis of the float plane
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
    let p: f64 = e1.iter().zip(&b).map(|(x, y)| x * y).sum();
    let r: Vec<f64> = b.iter().zip(&e1).map(|(y, x)| y - p * x).collect();
    let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let e2: Vec<f64> = r.iter().map(|x| x / nr).collect();

    let side = (2 * h + 1) as u64;
    let mut found: Vec<Vec<i64>> = Vec::new();
    for idx in 0..side.pow(n as u32) {
        let mut k = idx;
        let x: Vec<i64> = (0..n)
            .map(|_| {
                let c = (k % side) as i64 - h;
                k /= side;
                c
            })
            .collect();
        let Some(first) = x.iter().find(|&&c| c != 0) else {
            continue;
        };
        if *first < 0 {
            continue;
        }
        let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
        let c1: f64 = xf.iter().zip(&e1).map(|(x, y)| x * y).sum();
        let c2: f64 = xf.iter().zip(&e2).map(|(x, y)| x * y).sum();
        let res: Vec<f64> = (0..n).map(|i| xf[i] - c1 * e1[i] - c2 * e2[i]).collect();
        if sup(&res) > 1e-9 * sup(&xf) {
            continue;
        }
        if in_span(w1, w2, &FieldVector::from_ints(&x)) {
            found.push(x);
        }
    }
    if found.is_empty() {
        return 0;
    }
    let independent = found.iter().any(|y| {
        (0..n).any(|i| (i + 1..n).any(|j| found[0][i] * y[j] - found[0][j] * y[i] != 0))
    });
    if independent {
        2
    } else {
        1
    }
}

// ---------------------------------------------------------------------------------------
// random planes

/// `2 e_pos + sum c_k e_neg` with `c_k` in `{-1, 0, 1}`: integral with norm at least 1.
fn steep(rng: &mut StdRng, n: usize, pos: usize) -> FieldVector {
    let coords = (0..n)
        .map(|i| {
            if i == pos {
                int(2)
            } else if i >= 3 {
                int(rng.random_range(-1..=1))
            } else {
                int(0)
            }
        })
        .collect();
    vec_of(1, coords)
}

fn irrational(d: u64, x: &FieldVector, sqrt_coeff: BigRational) -> FieldVector {
    x.scale(&qs(BigRational::zero(), sqrt_coeff, d)).lift(d).unwrap()
}

/// Hides the construction: `(w1, w2) -> (w1 + s w2, w2 + t (w1 + s w2))`, determinant 1.
fn shear(rng: &mut StdRng, d: u64, w1: FieldVector, w2: FieldVector) -> (FieldVector, FieldVector) {
    let pick = |rng: &mut StdRng| qs(rat(rng.random_range(-2..=2), rng.random_range(1..=3)), rat(rng.random_range(-1..=1), 2), d);
    let s = pick(rng);
    let t = pick(rng);
    let a = w1.lift(d).unwrap().add_scaled(&s, &w2.lift(d).unwrap()).unwrap();
    let b = w2.lift(d).unwrap().add_scaled(&t, &a).unwrap();
    (a, b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Closed,
    Intermediate,
    Dense,
}

fn constructed_plane(rng: &mut StdRng, l: &Arc<QuadraticLattice>, d: u64, kind: Kind) -> PositivePlane {
    let n = l.rank();
    loop {
        let r0 = steep(rng, n, 0);
        let r1 = steep(rng, n, 1);
        let r2 = steep(rng, n, 2);
        let (w1, w2) = match kind {
            Kind::Closed => (r0, r1),
            Kind::Intermediate => (r0, r1.lift(d).unwrap().checked_add(&irrational(d, &r2, rat(1, 1))).unwrap()),
            Kind::Dense => {
                let e_neg = FieldVector::unit(n, 3);
                let a = r0.lift(d).unwrap().checked_add(&irrational(d, &FieldVector::unit(n, 2), rat(1, 1))).unwrap();
                let b = r1.lift(d).unwrap().checked_add(&irrational(d, &e_neg, rat(1, 3))).unwrap();
                (a, b)
            }
        };
        let (w1, w2) = shear(rng, d, w1, w2);
        if let Ok(p) = PositivePlane::new(Arc::clone(l), w1, w2) {
            return p;
        }
    }
}

// ---------------------------------------------------------------------------------------
// criteria

fn trichotomy() -> Check {
    let mut rng = StdRng::seed_from_u64(11);
    let mut total = 0;
    for n_neg in [2, 3] {
        let l = lattice(n_neg);
        for d in [2, 3] {
            for kind in [Kind::Closed, Kind::Intermediate, Kind::Dense] {
                for _ in 0..3 {
                    let p = constructed_plane(&mut rng, &l, d, kind);
                    let [w1, w2] = p.basis();
                    let oracle = brute_force_rational_dim(w1, w2, 2);
                    let want = match kind {
                        Kind::Closed => 2,
                        Kind::Intermediate => 1,
                        Kind::Dense => 0,
                    };
                    if oracle != want {
                        return Err(format!("oracle found dimension {oracle} for a {kind:?} construction"));
                    }
                    let got = orbit_type(&p).map_err(|e| e.to_string())?;
                    let agrees = match (&got, oracle) {
                        (OrbitType::Closed { .. }, 2) | (OrbitType::Intermediate { .. }, 1) | (OrbitType::Dense, 0) => true,
                        _ => false,
                    };
                    if !agrees {
                        return Err(format!("orbit_type {} but oracle dimension {oracle} (rank {}, d = {d})", got.tag(), l.rank()));
                    }
                    if let OrbitType::Intermediate { witness } = &got {
                        if !in_span(w1, w2, &FieldVector::from_bigints(witness)) {
                            return Err("witness not in the plane".into());
                        }
                    }
                    total += 1;
                }
            }
        }
    }
    Ok(format!("{total} planes over Q(sqrt 2), Q(sqrt 3) in ranks 5 and 6 agree with the brute-force oracle"))
}

fn random_vector(rng: &mut StdRng, n: usize, d: u64) -> FieldVector {
    let coords = (0..n)
        .map(|_| qs(rat(rng.random_range(-3..=3), rng.random_range(1..=2)), rat(rng.random_range(-1..=1), 1), d))
        .collect();
    vec_of(d, coords)
}

fn random_positive_plane(rng: &mut StdRng, l: &Arc<QuadraticLattice>, d: u64) -> PositivePlane {
    loop {
        let a = random_vector(rng, l.rank(), d);
        let b = random_vector(rng, l.rank(), d);
        if let Ok(p) = PositivePlane::new(Arc::clone(l), a, b) {
            return p;
        }
    }
}

fn involution() -> Check {
    let mut rng = StdRng::seed_from_u64(23);
    let l = lattice(2);
    let axes = [
        FieldVector::from_ints(&[1, 0, 0, 0, 0]),
        FieldVector::from_ints(&[1, 1, 0, 1, 0]),
        FieldVector::from_ints(&[2, 0, 1, 0, 1]),
    ];
    let (mut through, mut off) = (0, 0);
    while through + off < 100 {
        let v = &axes[(through + off) % axes.len()];
        let d = if rng.random_bool(0.5) { 2 } else { 3 };
        let want_through = through < 50;
        let p = if want_through {
            let u = random_vector(&mut rng, l.rank(), d);
            let s = qs(rat(rng.random_range(-2..=2), 1), rat(rng.random_range(-1..=1), 1), d);
            let w1 = v.lift(d).unwrap().add_scaled(&s, &u).unwrap();
            match PositivePlane::new(Arc::clone(&l), w1, u) {
                Ok(p) => p,
                Err(_) => continue,
            }
        } else {
            random_positive_plane(&mut rng, &l, d)
        };
        let [w1, w2] = p.basis();
        let oracle = in_span(w1, w2, &v.lift(p.field()).unwrap());
        if oracle != want_through {
            // a random plane happened to contain v; not the sample we are after
            continue;
        }
        let image = p.involution_gamma(v).map_err(|e| e.to_string())?;
        let fixed = same_oriented_span([&image.basis()[0], &image.basis()[1]], [w1, w2]);
        let contains = plane_contains(&p, v).map_err(|e| e.to_string())?;
        if fixed != contains || contains != oracle || image.same_oriented(&p) != fixed {
            return Err(format!("fixed {fixed}, contains {contains}, oracle {oracle}"));
        }
        if want_through {
            through += 1;
        } else {
            off += 1;
        }
    }
    Ok(format!("{through} planes through v and {off} off v: fixed exactly when contained"))
}

fn quadric() -> Check {
    let mut rng = StdRng::seed_from_u64(37);
    for k in 0..100 {
        let l = lattice(2 + k % 2);
        let d = if k % 3 == 0 { 3 } else { 2 };
        let p = random_positive_plane(&mut rng, &l, d);
        let period = plane_to_period(&p);
        let (x, y, r) = (period.real_part(), period.imaginary_direction(), period.ratio());
        let xx = l.norm(x).unwrap();
        let yy = l.norm(y).unwrap();
        let xy = l.eval_form(x, y).unwrap();
        // q(l, l) = q(x,x) - r q(y,y) + 2 i sqrt(r) q(x,y); q(l, conj l) = q(x,x) + r q(y,y)
        let ryy = r * &yy;
        if !(&xx - &ryy).is_zero() || !xy.is_zero() || !r.is_positive() {
            return Err(format!("q(l, l) != 0 for plane {k}"));
        }
        if !(&xx + &ryy).is_positive() {
            return Err(format!("q(l, conj l) <= 0 for plane {k}"));
        }
        let back = period_to_plane(&period);
        let [w1, w2] = p.basis();
        if !same_oriented_span([&back.basis()[0], &back.basis()[1]], [w1, w2]) || !back.same_oriented(&p) {
            return Err(format!("round trip changed the oriented span of plane {k}"));
        }
    }
    Ok("100 planes: round trip exact, q(l,l) = 0 and q(l,conj l) > 0 exactly".into())
}

/// Exact determinant by rational elimination.
fn det_exact(m: &[Vec<i64>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn isometries() -> Check {
    let mut counts = Vec::new();
    for (file, rank) in [("lattice_rank5.json", 5), ("lattice_rank6.json", 6)] {
        let l = io::parse_lattice(&read(file)).map_err(|e| e.to_string())?;
        let gens = reflection_generators(&l, 1, 1).map_err(|e| e.to_string())?;
        let g = l.gram();
        for iso in &gens {
            let m: Vec<Vec<i64>> = iso.matrix().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
            for i in 0..rank {
                for j in 0..rank {
                    let mut s: i128 = 0;
                    for a in 0..rank {
                        for b in 0..rank {
                            s += m[a][i] as i128 * g[a][b] as i128 * m[b][j] as i128;
                        }
                    }
                    if s != g[i][j] as i128 {
                        return Err(format!("g^T G g != G for word {:?}", iso.word()));
                    }
                }
            }
            if det_exact(&m) != BigRational::one() {
                return Err(format!("det != 1 for word {:?}", iso.word()));
            }
        }
        counts.push(gens.len());
    }
    Ok(format!("{} rank-5 and {} rank-6 generators: g^T G g = G and det g = 1", counts[0], counts[1]))
}

fn orbit_shadow() -> Check {
    let l = Arc::new(io::parse_lattice(&read("lattice_rank5.json")).map_err(|e| e.to_string())?);
    let gens = spread_subset(&reflection_generators(&l, 1, 1).map_err(|e| e.to_string())?, 3);
    let run = |file: &str| -> Result<_, String> {
        let base = io::parse_plane(&l, &read(file)).map_err(|e| e.to_string())?;
        let sample = orbit_ball(&base, &gens, 6, 40_000).map_err(|e| e.to_string())?;
        let report = closure_diagnostic(&sample, 64, 0).map_err(|e| e.to_string())?;
        Ok((base, sample, report))
    };

    let frozen: serde_json::Value = serde_json::from_str(&read("orbit_rational_depth6.json")).unwrap();
    let frozen_gap = frozen["min_gap"].as_f64().ok_or("frozen min_gap missing")?;
    let (_, sample, rational) = run("plane_rational.json")?;
    let gap = rational.min_gap.ok_or("no min_gap")?;
    if sample.truncated || !(frozen_gap > 0.0) || gap < frozen_gap {
        return Err(format!("(a) min_gap {gap:e} below frozen {frozen_gap:e}"));
    }
    // growth: counts strictly increase and the ratio between consecutive depths never jumps up
    let c = &rational.counts;
    let ratios: Vec<f64> = c.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    if c.windows(2).any(|w| w[1] <= w[0]) || ratios.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return Err(format!("(a) growth anomaly in counts {c:?}"));
    }

    let (_, _, dense) = run("plane_dense.json")?;
    let (c2, c6) = (dense.covering_radius[2], dense.covering_radius[6]);
    if c6 > 0.8 * c2 {
        return Err(format!("(b) covering radius {c6} > 0.8 x {c2}"));
    }

    let (base, sample, inter) = run("plane_intermediate.json")?;
    let OrbitType::Intermediate { witness } = orbit_type(&base).map_err(|e| e.to_string())? else {
        return Err("(c) base is not intermediate".into());
    };
    let v = FieldVector::from_bigints(&witness);
    if !witness_containment(&sample, &v).map_err(|e| e.to_string())? {
        return Err("(c) a sampled plane misses its transported witness".into());
    }
    let wa = inter.witness_alignment.ok_or("(c) no witness alignment")?;
    if wa > 1e-9 {
        return Err(format!("(c) witness alignment {wa:e}"));
    }
    Ok(format!(
        "(a) min_gap {gap:e} >= frozen {frozen_gap:e}, counts {c:?}; (b) covering {c6:.4} <= 0.8 x {c2:.4}; (c) {} planes contain the witness, alignment {wa:.1e}",
        sample.points.len()
    ))
}

fn disk() -> Result<DiskModel, String> {
    let l = Arc::new(io::parse_lattice(&read("lattice_rank5.json")).map_err(|e| e.to_string())?);
    let basis = io::parse_subspace(&l, &read("subspace_w.json")).map_err(|e| e.to_string())?;
    DiskModel::new(l, basis).map_err(|e| e.to_string())
}

fn round_bits() -> Check {
    let disk = disk()?;
    let mut worst: f64 = 0.0;
    let mut summary = Vec::new();
    for (file, want) in [("walls_two_diameters.json", 4), ("walls_offset_chords.json", 3)] {
        let classes = io::parse_walls(disk.lattice(), &read(file)).map_err(|e| e.to_string())?;
        let walls: Vec<_> = classes.iter().map(|s| wall_geodesic(&disk, s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        for w in &walls {
            let e = w.endpoints.ok_or("wall missing from the disk")?;
            for (x, y) in e {
                worst = worst.max((x.hypot(y) - 1.0).abs());
            }
        }
        let chambers = chamber_decompose(&disk, &walls, periodlab::disk::DEFAULT_PROBE_GRID);
        if chambers.len() != want {
            return Err(format!("{file}: {} chambers, expected {want}", chambers.len()));
        }
        if !chambers.iter().all(has_round_bits) {
            return Err(format!("{file}: a chamber has no round bits"));
        }
        summary.push(chambers.len());
    }
    if worst > 1e-12 {
        return Err(format!("endpoint off the circle by {worst:e}"));
    }
    Ok(format!("chamber counts {summary:?}, all with round bits; endpoints within {worst:.1e} of the circle"))
}

/// Coefficients `A_0, A_1, A_2` of `g(t)` satisfy the group law iff
/// `A_i A_j = C(i+j, i) A_{i+j}` for all `i, j` (with `A_k = 0` for `k > 2`).
fn group_law_by_coefficients(a: &[Vec<Vec<QuadScalar>>; 3]) -> bool {
    let mul = |x: &Vec<Vec<QuadScalar>>, y: &Vec<Vec<QuadScalar>>| -> Vec<Vec<QuadScalar>> {
        (0..3)
            .map(|i| (0..3).map(|k| (0..3).fold(QuadScalar::zero(), |acc, j| &acc + &(&x[i][j] * &y[j][k]))).collect())
            .collect()
    };
    let binom = [[1, 1, 1], [1, 2, 3], [1, 3, 6]];
    for i in 0..3 {
        for j in 0..3 {
            let lhs = mul(&a[i], &a[j]);
            let want = |r: usize, c: usize| -> QuadScalar {
                if i + j > 2 {
                    QuadScalar::zero()
                } else {
                    a[i + j][r][c].mul_int(binom[i][j])
                }
            };
            if (0..3).any(|r| (0..3).any(|c| lhs[r][c] != want(r, c))) {
                return false;
            }
        }
    }
    true
}

fn horocycles() -> Check {
    let disk = disk()?;
    let triples = [(5, 3, 4), (5, -4, 3), (13, 5, 12), (13, -12, -5), (17, 8, -15)];
    let ts: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.15).collect();
    let (mut worst_fit, mut worst_tan): (f64, f64) = (0.0, 0.0);
    for (a, b, c) in triples {
        let xi = disk.from_frame_coords(&[int(a), int(b), int(c)]).map_err(|e| e.to_string())?;
        let family = unipotent_subgroup(&disk, &xi).map_err(|e| e.to_string())?;
        let coeffs = family.coefficients().clone();
        if !group_law_by_coefficients(&coeffs) {
            return Err(format!("g(s)g(t) != g(s+t) for xi = ({a}, {b}, {c})"));
        }
        let touch = family.boundary_point();
        for base in [(0.0, 0.0), (0.3, -0.2), (-0.5, 0.1)] {
            let pts = horocycle_orbit_conformal(&family, base, &ts).map_err(|e| e.to_string())?;
            let fit = fit_circle(&pts).ok_or("circle fit failed")?;
            worst_fit = worst_fit.max(fit.residual);
            worst_tan = worst_tan.max(tangency_residual(&fit, touch));
        }
    }
    if worst_fit > 1e-8 || worst_tan > 1e-8 {
        return Err(format!("fit residual {worst_fit:e}, tangency {worst_tan:e}"));
    }
    Ok(format!("group law exact for 5 xi; fit residual {worst_fit:.1e}, tangency {worst_tan:.1e}"))
}

fn meyer() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let choices = [-3, -2, -1, 1, 2, 3];
    let mut heights = Vec::new();
    while heights.len() < 20 {
        let diag: Vec<i64> = (0..5).map(|_| choices[rng.random_range(0..choices.len())]).collect();
        if diag.iter().all(|&x| x > 0) || diag.iter().all(|&x| x < 0) {
            continue;
        }
        let l = QuadraticLattice::diagonal(&diag).map_err(|e| e.to_string())?;
        let v = l.find_isotropic(10).map_err(|e| e.to_string())?.ok_or(format!("no isotropic vector for {diag:?}"))?;
        let q: i128 = diag.iter().zip(&v).map(|(&a, &x)| a as i128 * x as i128 * x as i128).sum();
        let g = v.iter().fold(0i64, |g, x| g.gcd(x));
        if q != 0 || g != 1 || v.iter().any(|x| x.abs() > 10) {
            return Err(format!("{v:?} is not a primitive isotropic vector of diag{diag:?}"));
        }
        heights.push(v.iter().map(|x| x.abs()).max().unwrap());
    }
    Ok(format!("20 lattices, primitive isotropic vectors of heights {heights:?}"))
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_periodlab");
    let d = |n: &str| data(n).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["classify".into(), "--lattice".into(), d("lattice_rank5.json"), "--plane".into(), d("plane_intermediate.json")],
        vec!["orbit".into(), "--lattice".into(), d("lattice_rank5.json"), "--plane".into(), d("plane_rational.json"), "--seed".into(), "4".into(), "--csv".into(), "{dir}/orbit.csv".into()],
        vec!["orbit".into(), "--lattice".into(), d("lattice_rank5.json"), "--plane".into(), d("plane_intermediate.json"), "--depth".into(), "5".into(), "--seed".into(), "4".into()],
        vec![
            "chambers".into(), "--lattice".into(), d("lattice_rank5.json"), "--subspace".into(), d("subspace_w.json"),
            "--walls".into(), d("walls_two_diameters.json"), "--svg".into(), "{dir}/chambers.svg".into(), "--xi".into(), d("xi_boundary.json"),
        ],
        vec!["isotropic".into(), "--lattice".into(), d("lattice_rank5.json"), "--bound".into(), "2".into()],
        vec!["involution".into(), "--lattice".into(), d("lattice_rank5.json"), "--plane".into(), d("plane_intermediate.json"), "--vector".into(), d("axis_e1.json")],
    ];
    let full = |dir: &Path| -> Result<Vec<Vec<u8>>, String> {
        let mut out = Vec::new();
        for args in &runs {
            let args: Vec<String> = args.iter().map(|a| a.replace("{dir}", &dir.to_string_lossy())).collect();
            let o = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&o.stderr)));
            }
            out.push(o.stdout);
        }
        for f in ["orbit.csv", "chambers.svg"] {
            out.push(std::fs::read(dir.join(f)).map_err(|e| e.to_string())?);
        }
        Ok(out)
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = full(a.path())?;
    let second = full(b.path())?;
    if first != second {
        return Err("outputs differ between runs".into());
    }
    let bytes: usize = first.iter().map(Vec::len).sum();
    Ok(format!("{} outputs ({bytes} bytes) identical across two runs", first.len()))
}

fn main() {
    let criteria: [(u32, &str, Option<u64>, fn() -> Check); 9] = [
        (1, "trichotomy", Some(10), trichotomy),
        (2, "involution fixed set", Some(5), involution),
        (3, "quadric model", Some(5), quadric),
        (4, "isometry exactness", Some(5), isometries),
        (5, "orbit behaviour", Some(60), orbit_shadow),
        (6, "round bits", Some(2), round_bits),
        (7, "horocycles", Some(5), horocycles),
        (8, "isotropic vectors", Some(30), meyer),
        (9, "determinism", None, determinism),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let over = limit.is_some_and(|s| took > Duration::from_secs(s));
        let limit_text = limit.map_or(String::new(), |s| format!(", limit {s} s"));
        let (ok, detail) = match outcome {
            Ok(m) if !over => (true, m),
            Ok(m) => (false, format!("{m}; too slow")),
            Err(m) => (false, m),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {n} ({name}): {detail} [{:.2} s{limit_text}]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
