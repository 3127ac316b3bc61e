//! JSON file formats.
//!
//! Integers may be JSON numbers or decimal strings (for values beyond 64 bits). A field
//! element `a + b sqrt(d)` is written `[a_num, a_den, b_num, b_den]`; the short forms
//! `[n]` and `[a_num, a_den]` denote rationals.
//!
//! ```text
//! lattice   {"rank": 5, "gram": [[1, 0, ...], ...]}
//! vector    {"d": 2, "coords": [[1, 1, 0, 1], [0, 1, 1, 3], ...]}
//! plane     {"d": 2, "basis": [<coords>, <coords>]}
//! subspace  {"d": 1, "basis": [<coords>, <coords>, <coords>]}
//! walls     {"walls": [[0, 0, 0, 1, 0], {"d": 2, "coords": ...}, ...]}
//! ```

use std::sync::Arc;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::diagnostic::{ClosureReport, PROBE_PROCEDURE};
use crate::disk::{Chamber, Wall};
use crate::error::{Error, Result};
use crate::field::{FieldVector, QuadScalar};
use crate::lattice::QuadraticLattice;
use crate::period::{OrbitType, PositivePlane};

#[derive(Deserialize)]
#[serde(untagged)]
enum Int {
    Num(i64),
    Text(String),
}

impl Int {
    fn big(&self) -> Result<BigInt> {
        match self {
            Int::Num(n) => Ok(BigInt::from(*n)),
            Int::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    rank: usize,
    gram: Vec<Vec<Int>>,
}

#[derive(Deserialize)]
struct VectorFile {
    #[serde(default = "one")]
    d: u64,
    coords: Vec<Vec<Int>>,
}

#[derive(Deserialize)]
struct BasisFile {
    #[serde(default = "one")]
    d: u64,
    basis: Vec<Vec<Vec<Int>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WallEntry {
    Plain(Vec<Int>),
    Encoded(VectorFile),
}

#[derive(Deserialize)]
struct WallsFile {
    walls: Vec<WallEntry>,
}

fn one() -> u64 {
    1
}

fn from_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn ratio(num: &Int, den: &Int) -> Result<BigRational> {
    let den = den.big()?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(num.big()?, den))
}

fn scalar(entry: &[Int], d: u64) -> Result<QuadScalar> {
    let zero = Int::Num(0);
    let unit = Int::Num(1);
    let (a, b) = match entry {
        [n] => (ratio(n, &unit)?, ratio(&zero, &unit)?),
        [n, m] => (ratio(n, m)?, ratio(&zero, &unit)?),
        [an, ad, bn, bd] => (ratio(an, ad)?, ratio(bn, bd)?),
        _ => return Err(Error::Parse(format!("coordinate must have 1, 2 or 4 entries, found {}", entry.len()))),
    };
    Ok(QuadScalar::new(a, b, d))
}

fn vector(d: u64, coords: &[Vec<Int>]) -> Result<FieldVector> {
    let coords = coords.iter().map(|c| scalar(c, d)).collect::<Result<Vec<_>>>()?;
    FieldVector::new(d, coords)
}

fn check_rank(lattice: &QuadraticLattice, v: &FieldVector) -> Result<()> {
    if v.len() != lattice.rank() {
        return Err(Error::RankMismatch {
            expected: lattice.rank(),
            found: v.len(),
        });
    }
    Ok(())
}

pub fn parse_lattice(text: &str) -> Result<QuadraticLattice> {
    let f: LatticeFile = from_str(text)?;
    if f.gram.len() != f.rank || f.gram.iter().any(|r| r.len() != f.rank) {
        return Err(Error::Parse(format!("gram must be {0} x {0}", f.rank)));
    }
    let gram = f
        .gram
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.big()?.to_i64().ok_or(Error::Overflow("gram entry")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    QuadraticLattice::new(gram)
}

pub fn parse_vector(text: &str) -> Result<FieldVector> {
    let f: VectorFile = from_str(text)?;
    vector(f.d, &f.coords)
}

fn parse_basis(text: &str, n: usize) -> Result<Vec<FieldVector>> {
    let f: BasisFile = from_str(text)?;
    if f.basis.len() != n {
        return Err(Error::Parse(format!("basis must have {n} vectors, found {}", f.basis.len())));
    }
    f.basis.iter().map(|c| vector(f.d, c)).collect()
}

pub fn parse_plane(lattice: &Arc<QuadraticLattice>, text: &str) -> Result<PositivePlane> {
    let mut b = parse_basis(text, 2)?;
    for v in &b {
        check_rank(lattice, v)?;
    }
    let w2 = b.pop().unwrap();
    let w1 = b.pop().unwrap();
    PositivePlane::new(Arc::clone(lattice), w1, w2)
}

pub fn parse_subspace(lattice: &QuadraticLattice, text: &str) -> Result<[FieldVector; 3]> {
    let b = parse_basis(text, 3)?;
    for v in &b {
        check_rank(lattice, v)?;
    }
    Ok(b.try_into().expect("three vectors"))
}

pub fn parse_walls(lattice: &QuadraticLattice, text: &str) -> Result<Vec<FieldVector>> {
    let f: WallsFile = from_str(text)?;
    f.walls
        .iter()
        .map(|w| {
            let v = match w {
                WallEntry::Plain(ints) => FieldVector::from_bigints(&ints.iter().map(Int::big).collect::<Result<Vec<_>>>()?),
                WallEntry::Encoded(f) => vector(f.d, &f.coords)?,
            };
            check_rank(lattice, &v)?;
            Ok(v)
        })
        .collect()
}

/// Number when it fits in 64 bits, decimal string otherwise.
pub fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

fn rational_pair(x: &BigRational) -> [Value; 2] {
    [int_value(x.numer()), int_value(x.denom())]
}

pub fn vector_value(v: &FieldVector) -> Value {
    let coords: Vec<Value> = v
        .coords()
        .iter()
        .map(|c| {
            let [an, ad] = rational_pair(c.rational_part());
            let [bn, bd] = rational_pair(c.irrational_part());
            json!([an, ad, bn, bd])
        })
        .collect();
    json!({"d": v.field(), "coords": coords})
}

pub fn orbit_type_value(t: &OrbitType) -> Value {
    let ints = |v: &[BigInt]| Value::Array(v.iter().map(int_value).collect());
    match t {
        OrbitType::Closed { witness } => json!({"tag": t.tag(), "witness": [ints(&witness[0]), ints(&witness[1])]}),
        OrbitType::Dense => json!({"tag": t.tag()}),
        OrbitType::Intermediate { witness } => json!({"tag": t.tag(), "witness": ints(witness)}),
    }
}

/// Run parameters recorded alongside an orbit report.
#[derive(Clone, Debug)]
pub struct OrbitRun {
    pub depth: usize,
    pub cap: usize,
    pub seed: u64,
    pub probes: usize,
    pub generators: usize,
    pub points: usize,
    pub truncated: bool,
}

pub fn orbit_report_value(report: &ClosureReport, run: &OrbitRun) -> Value {
    json!({
        "depths": report.depths,
        "counts": report.counts,
        "min_gap": report.min_gap,
        "covering_radius": report.covering_radius,
        "witness_alignment": report.witness_alignment,
        "run": {
            "depth": run.depth,
            "cap": run.cap,
            "seed": run.seed,
            "probes": run.probes,
            "probe_procedure": PROBE_PROCEDURE,
            "generators": run.generators,
            "points": run.points,
            "truncated": run.truncated,
        },
    })
}

pub fn chamber_report_value(walls: &[Wall], chambers: &[Chamber]) -> Value {
    let walls: Vec<Value> = walls
        .iter()
        .map(|w| {
            json!({
                "s": vector_value(&w.s),
                "present": w.is_present(),
                "endpoints": w.endpoints.map(|e| e.map(|(x, y)| [x, y])),
                "endpoint_angles": w.endpoint_angles(),
            })
        })
        .collect();
    let chambers: Vec<Value> = chambers
        .iter()
        .map(|c| {
            json!({
                "signs": c.signs,
                "sample_point": [c.sample_point.0, c.sample_point.1],
                "arcs": c.arcs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
                "round_bits": !c.arcs.is_empty(),
            })
        })
        .collect();
    json!({"walls": walls, "chambers": chambers})
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
