//! Numerical diagnostics for sampled orbits: separation, covering radius and witness alignment.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::FieldVector;
use crate::metric::{aux_coords, frame_signs, FloatPlane};
use crate::monodromy::OrbitSample;
use crate::par::{self, Execution};
use crate::period::{orbit_type, OrbitType};

/// Name of the probe procedure, written into reports.
pub const PROBE_PROCEDURE: &str = "lcg64-v1";

/// Bound on each negative aux coordinate of a probe vector.
pub const PROBE_NEGATIVE_SPREAD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub depths: Vec<usize>,
    /// Number of sampled points of word length at most each depth.
    pub counts: Vec<usize>,
    pub min_gap: Option<f64>,
    pub covering_radius: Vec<f64>,
    pub witness_alignment: Option<f64>,
}

/// 64-bit linear congruential generator.
///
/// `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`; a uniform draw in
/// `[0, 1)` is the top 53 bits of the new state divided by `2^53`.
#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform draw in `[-r, r)`.
    pub fn symmetric(&mut self, r: f64) -> f64 {
        (2.0 * self.uniform() - 1.0) * r
    }
}

/// Deterministic probe planes in aux coordinates.
///
/// Each probe draws two vectors with positive-frame coordinates uniform in `[-1, 1)`,
/// orthonormalizes them in the positive directions, then draws each negative coordinate
/// uniformly in `[-PROBE_NEGATIVE_SPREAD, PROBE_NEGATIVE_SPREAD)`. Draws whose span is not
/// positive definite (or is degenerate) are discarded and redrawn.
pub fn probe_planes(signs: &[i8], count: usize, seed: u64) -> Vec<FloatPlane> {
    let mut rng = Lcg64::new(seed);
    let pos: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] > 0).collect();
    let neg: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] < 0).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut a: Vec<f64> = pos.iter().map(|_| rng.symmetric(1.0)).collect();
        let mut b: Vec<f64> = pos.iter().map(|_| rng.symmetric(1.0)).collect();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na < 1e-6 {
            continue;
        }
        a.iter_mut().for_each(|x| *x /= na);
        let p: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        b.iter_mut().zip(&a).for_each(|(y, x)| *y -= p * x);
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nb < 1e-6 {
            continue;
        }
        b.iter_mut().for_each(|x| *x /= nb);
        let na_neg: Vec<f64> = neg.iter().map(|_| rng.symmetric(PROBE_NEGATIVE_SPREAD)).collect();
        let nb_neg: Vec<f64> = neg.iter().map(|_| rng.symmetric(PROBE_NEGATIVE_SPREAD)).collect();
        // q on the span is I - (negative Gram); positive iff that 2x2 matrix is
        let g11 = 1.0 - na_neg.iter().map(|x| x * x).sum::<f64>();
        let g22 = 1.0 - nb_neg.iter().map(|x| x * x).sum::<f64>();
        let g12 = -na_neg.iter().zip(&nb_neg).map(|(x, y)| x * y).sum::<f64>();
        if g11 <= 0.0 || g11 * g22 - g12 * g12 <= 0.0 {
            continue;
        }
        let mut u = vec![0.0; signs.len()];
        let mut v = vec![0.0; signs.len()];
        for (k, &i) in pos.iter().enumerate() {
            u[i] = a[k];
            v[i] = b[k];
        }
        for (k, &i) in neg.iter().enumerate() {
            u[i] = na_neg[k];
            v[i] = nb_neg[k];
        }
        out.push(FloatPlane::from_aux_vectors(&u, &v));
    }
    out
}

pub fn closure_diagnostic(sample: &OrbitSample, probes: usize, seed: u64) -> Result<ClosureReport> {
    closure_diagnostic_with(sample, probes, seed, Execution::default())
}

pub fn closure_diagnostic_with(sample: &OrbitSample, probes: usize, seed: u64, exec: Execution) -> Result<ClosureReport> {
    let lattice = sample.base.lattice();
    let floats: Vec<FloatPlane> = par::map(exec, &sample.points, |p| FloatPlane::from_plane(&p.plane));
    let n = floats.len();

    let min_gap = par::min_range(exec, n, |i| {
        (i + 1..n)
            .map(|j| floats[i].distance(&floats[j]))
            .fold(f64::INFINITY, f64::min)
    })
    .filter(|g| g.is_finite());

    let max_depth = sample.points.last().map_or(0, |p| p.depth);
    let depths: Vec<usize> = (0..=max_depth).collect();
    let counts: Vec<usize> = depths.iter().map(|&k| sample.count_within(k)).collect();

    let probe_set = probe_planes(&frame_signs(lattice), probes, seed);
    // nearest-sample distance of every probe, per depth prefix
    let per_probe = par::map(exec, &probe_set, |probe| {
        let mut best = f64::INFINITY;
        let mut out = Vec::with_capacity(counts.len());
        let mut next = 0;
        for &c in &counts {
            for f in &floats[next..c] {
                best = best.min(probe.distance(f));
            }
            next = c;
            out.push(best);
        }
        out
    });
    let covering_radius = (0..counts.len())
        .map(|k| per_probe.iter().map(|row| row[k]).fold(0.0, f64::max))
        .collect();

    let witness_alignment = match orbit_type(&sample.base) {
        Ok(OrbitType::Intermediate { witness }) => {
            Some(witness_alignment_with(sample, &FieldVector::from_bigints(&witness), exec)?)
        }
        _ => None,
    };

    Ok(ClosureReport {
        depths,
        counts,
        min_gap,
        covering_radius,
        witness_alignment,
    })
}

/// Maximum over sampled points of the angle between the point's plane and the witness
/// transported along the point's word.
pub fn witness_alignment(sample: &OrbitSample, v: &FieldVector) -> Result<f64> {
    witness_alignment_with(sample, v, Execution::default())
}

fn witness_alignment_with(sample: &OrbitSample, v: &FieldVector, exec: Execution) -> Result<f64> {
    let lattice = sample.base.lattice();
    let angles = par::map(exec, &sample.points, |p| -> Result<f64> {
        let gv = sample.transport(&p.word, v);
        Ok(FloatPlane::from_plane(&p.plane).angle_to_vector(&aux_coords(lattice, &gv)?))
    });
    angles
        .into_iter()
        .try_fold(0.0f64, |acc, a| Ok(acc.max(a?)))
}

/// Exact check that every sampled plane contains the transported witness.
pub fn witness_containment(sample: &OrbitSample, v: &FieldVector) -> Result<bool> {
    for p in &sample.points {
        if !p.plane.contains(&sample.transport(&p.word, v))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::QuadraticLattice;
    use crate::monodromy::{orbit_ball, reflection_generators};
    use crate::period::PositivePlane;
    use std::sync::Arc;

    #[test]
    fn lcg_reference_values() {
        let mut r = Lcg64::new(0);
        assert_eq!(r.next_u64(), 1442695040888963407);
        assert_eq!(
            r.next_u64(),
            1442695040888963407u64
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407)
        );
        let mut r = Lcg64::new(42);
        for _ in 0..1000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn probes_are_positive_and_reproducible() {
        let signs = [1, 1, 1, -1, -1];
        let a = probe_planes(&signs, 20, 7);
        assert_eq!(a, probe_planes(&signs, 20, 7));
        assert_ne!(a, probe_planes(&signs, 20, 8));
        for p in &a {
            let q = |x: &[f64], y: &[f64]| -> f64 { (0..5).map(|i| signs[i] as f64 * x[i] * y[i]).sum() };
            let (a, b, c) = (q(&p.u, &p.u), q(&p.u, &p.v), q(&p.v, &p.v));
            assert!(a > 0.0 && a * c - b * b > 0.0);
        }
    }

    #[test]
    fn singleton_sample() {
        let l = Arc::new(QuadraticLattice::diagonal(&[1, 1, 1, -1, -1]).unwrap());
        let base = PositivePlane::new(l.clone(), FieldVector::unit(5, 0), FieldVector::unit(5, 1)).unwrap();
        let gens = reflection_generators(&l, 1, 1).unwrap();
        let s = orbit_ball(&base, &gens, 0, 10).unwrap();
        let r = closure_diagnostic(&s, 16, 1).unwrap();
        assert_eq!(r.min_gap, None);
        assert_eq!(r.counts, vec![1]);
        let base_f = FloatPlane::from_plane(&base);
        let worst = probe_planes(&frame_signs(&l), 16, 1)
            .iter()
            .map(|p| p.distance(&base_f))
            .fold(0.0, f64::max);
        assert_eq!(r.covering_radius, vec![worst]);
        assert_eq!(r.witness_alignment, None);
    }

    #[test]
    fn strategies_agree_bitwise() {
        let l = Arc::new(QuadraticLattice::diagonal(&[1, 1, 1, -1, -1]).unwrap());
        let base = PositivePlane::new(l.clone(), FieldVector::unit(5, 0), FieldVector::unit(5, 1)).unwrap();
        let gens = reflection_generators(&l, 1, 1).unwrap();
        let s = orbit_ball(&base, &gens, 2, 300).unwrap();
        let a = closure_diagnostic_with(&s, 32, 3, Execution::Sequential).unwrap();
        let b = closure_diagnostic_with(&s, 32, 3, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.min_gap.unwrap() > 0.0);
    }
}
