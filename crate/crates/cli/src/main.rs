//! `periodlab`: orbit classification, orbit sampling, chamber pictures and isotropic search
//! from JSON input files.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 violated mathematical
//! hypothesis, 3 resource limit or empty generator set.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use periodlab::diagnostic::closure_diagnostic;
use periodlab::disk::chamber_decompose;
use periodlab::horocycle::horocycle_orbit;
use periodlab::io::{self, OrbitRun};
use periodlab::metric::FloatPlane;
use periodlab::monodromy::{orbit_ball, reflection_generators, spread_subset};
use periodlab::period::{orbit_type, plane_contains, AntiHolomorphicInvolution};
use periodlab::{svg, unipotent_subgroup, wall_geodesic, DiskModel, Error, QuadraticLattice};
use serde_json::json;

#[derive(Parser)]
#[command(name = "periodlab", version, about = "Orbits of positive 2-planes under arithmetic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure type of the orbit of a plane: closed, dense or intermediate.
    Classify {
        #[command(flatten)]
        input: PlaneInput,
        #[command(flatten)]
        out: Output,
    },
    /// Sample an orbit ball and report separation and covering diagnostics.
    Orbit {
        #[command(flatten)]
        input: PlaneInput,
        /// Maximum word length.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Maximum number of distinct planes kept.
        #[arg(long, default_value_t = 40_000)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of probe planes for the covering radius.
        #[arg(long, default_value_t = 64)]
        probes: usize,
        /// Reflection vectors have |q(v, v)| <= this bound.
        #[arg(long, default_value_t = 1)]
        norm_bound: u64,
        /// Reflection vectors have coordinates bounded by this height.
        #[arg(long, default_value_t = 1)]
        height_bound: u32,
        /// Use this many generators spread evenly through the generator list (0 keeps all).
        #[arg(long, default_value_t = 3)]
        gens: usize,
        #[command(flatten)]
        out: Output,
        /// Sampled planes in aux coordinates.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Chambers cut out on the disk of a signature (1, 2) subspace by a list of walls.
    Chambers {
        #[arg(long)]
        lattice: PathBuf,
        /// Three vectors spanning the subspace.
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long)]
        walls: PathBuf,
        /// Probe grid resolution per side.
        #[arg(long, default_value_t = periodlab::disk::DEFAULT_PROBE_GRID)]
        grid: usize,
        #[command(flatten)]
        out: Output,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Isotropic vector of the subspace; draws its horocycles through each chamber sample.
        #[arg(long)]
        xi: Option<PathBuf>,
    },
    /// First primitive isotropic vector within a coordinate box.
    Isotropic {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value_t = 10)]
        bound: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Whether the plane is fixed by the involution attached to a positive vector.
    Involution {
        #[command(flatten)]
        input: PlaneInput,
        #[arg(long)]
        vector: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct PlaneInput {
    #[arg(long)]
    lattice: PathBuf,
    #[arg(long)]
    plane: PathBuf,
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Hypothesis(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Hypothesis(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Hypothesis(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Parse(_)
            | Error::ZeroDenominator
            | Error::NotSquarefree(_)
            | Error::RankMismatch { .. }
            | Error::InvalidRank(_)
            | Error::NotSymmetric => Failure::Input(m),
            Error::EmptyGeneratorSet | Error::Overflow(_) => Failure::Resource(m),
            _ => Failure::Hypothesis(m),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Resource(format!("{}: {e}", path.display())))
}

fn emit(out: &Output, value: &serde_json::Value) -> CliResult<()> {
    let text = io::to_pretty(value);
    match &out.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn lattice(path: &Path) -> CliResult<Arc<QuadraticLattice>> {
    Ok(Arc::new(io::parse_lattice(&read(path)?)?))
}

fn plane(input: &PlaneInput) -> CliResult<periodlab::PositivePlane> {
    let l = lattice(&input.lattice)?;
    Ok(io::parse_plane(&l, &read(&input.plane)?)?)
}

fn orbit_csv(sample: &periodlab::OrbitSample) -> CliResult<String> {
    let n = sample.base.lattice().rank();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string(), "depth".to_string(), "word".to_string()];
    header.extend((1..=n).map(|i| format!("u{i}")));
    header.extend((1..=n).map(|i| format!("v{i}")));
    let err = |e: csv::Error| Failure::Resource(e.to_string());
    w.write_record(&header).map_err(err)?;
    for (k, p) in sample.points.iter().enumerate() {
        let f = FloatPlane::from_plane(&p.plane);
        let word: Vec<String> = p.word.iter().map(u32::to_string).collect();
        let mut row = vec![k.to_string(), p.depth.to_string(), word.join(".")];
        row.extend(f.u.iter().chain(&f.v).map(|x| format!("{x:e}")));
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Resource(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of ascii fields"))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Classify { input, out } => {
            let p = plane(&input)?;
            emit(&out, &io::orbit_type_value(&orbit_type(&p)?))
        }
        Command::Orbit {
            input,
            depth,
            cap,
            seed,
            probes,
            norm_bound,
            height_bound,
            gens,
            out,
            csv,
        } => {
            let base = plane(&input)?;
            // classification hypotheses apply to orbit experiments as well
            orbit_type(&base)?;
            let all = reflection_generators(base.lattice(), norm_bound, height_bound)?;
            let chosen = spread_subset(&all, gens);
            let sample = orbit_ball(&base, &chosen, depth, cap)?;
            let report = closure_diagnostic(&sample, probes, seed)?;
            let run = OrbitRun {
                depth,
                cap,
                seed,
                probes,
                generators: chosen.len(),
                points: sample.points.len(),
                truncated: sample.truncated,
            };
            if let Some(path) = csv {
                write(&path, &orbit_csv(&sample)?)?;
            }
            emit(&out, &io::orbit_report_value(&report, &run))
        }
        Command::Chambers {
            lattice: lpath,
            subspace,
            walls,
            grid,
            out,
            svg: svg_path,
            xi,
        } => {
            if grid == 0 {
                return Err(Failure::Input("grid must be positive".into()));
            }
            let l = lattice(&lpath)?;
            let basis = io::parse_subspace(&l, &read(&subspace)?)?;
            let classes = io::parse_walls(&l, &read(&walls)?)?;
            let disk = DiskModel::new(Arc::clone(&l), basis)?;
            let walls = classes
                .iter()
                .map(|s| wall_geodesic(&disk, s))
                .collect::<periodlab::Result<Vec<_>>>()?;
            let chambers = chamber_decompose(&disk, &walls, grid);
            if let Some(path) = svg_path {
                let mut curves = Vec::new();
                if let Some(xi_path) = xi {
                    let xi = io::parse_vector(&read(&xi_path)?)?;
                    let family = unipotent_subgroup(&disk, &xi)?;
                    let ts: Vec<f64> = (-400..=400).map(|k| k as f64 * 0.05).collect();
                    for c in &chambers {
                        curves.push(horocycle_orbit(&family, c.sample_point, &ts)?);
                    }
                }
                write(&path, &svg::render(&walls, &chambers, &curves))?;
            }
            emit(&out, &io::chamber_report_value(&walls, &chambers))
        }
        Command::Isotropic { lattice: lpath, bound, out } => {
            let l = lattice(&lpath)?;
            let found = l.find_isotropic(bound)?;
            emit(&out, &json!({"bound": bound, "vector": found}))
        }
        Command::Involution { input, vector, out } => {
            let p = plane(&input)?;
            let v = io::parse_vector(&read(&vector)?)?;
            if v.len() != p.lattice().rank() {
                return Err(Error::RankMismatch {
                    expected: p.lattice().rank(),
                    found: v.len(),
                }
                .into());
            }
            let image = p.involution_gamma(&v)?;
            let fixed = image.same_oriented(&p);
            let contains = plane_contains(&p, &v)?;
            emit(&out, &json!({"fixed": fixed, "contains": contains}))
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("PERIODLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("PERIODLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Resource(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
