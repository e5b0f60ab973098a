use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use laminate::branched::{
    carries_nonneg_chi, max_projective_chi, positive_zero_chi_point, zero_chi_locus, BranchedError,
    BranchedSurfaceModel,
};
use laminate::finiteness::{antichain_certificate, enumerate_genus, enumerate_genus_bounded, FinitenessError};
use laminate::normal::is_admissible;
use laminate::polyhedral::{EngineOptions, PolyhedralError};
use laminate::solutions::{fundamental_solutions, vertex_solutions};
use laminate::surface::{build_surface, is_vertex_linking};
use laminate::traintrack::{cone_cover_report, is_subtrack, split, TrainTrack};
use laminate::triangulation::TriangulationInfo;
use laminate::{parse_triangulation, NormalVector, Triangulation};

#[derive(Parser)]
#[command(name = "laminate", version, about = "Normal surfaces, branched surfaces and train tracks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Abort when an intermediate integer needs more bits than this.
    #[arg(long, global = true)]
    max_coeff_bits: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulations.
    #[command(subcommand)]
    Tri(TriCommand),
    /// Normal and almost normal surfaces.
    #[command(subcommand)]
    Ns(NsCommand),
    /// Branched-surface models given by a sector support.
    #[command(subcommand)]
    Bs(BsCommand),
    /// Fixed-genus enumeration.
    #[command(subcommand)]
    Heegaard(HeegaardCommand),
    /// Train-track splitting.
    #[command(subcommand)]
    Split(SplitCommand),
}

#[derive(Subcommand)]
enum TriCommand {
    Info(TriArgs),
}

#[derive(Subcommand)]
enum NsCommand {
    /// Vertex surfaces.
    Vertex(SolveArgs),
    /// Fundamental surfaces.
    Fundamental(SolveArgs),
    /// Surface of one vector.
    Build(BuildArgs),
}

#[derive(Subcommand)]
enum BsCommand {
    FromSupport(ModelArgs),
    Verdict(ModelArgs),
    ZeroChi(ModelArgs),
}

#[derive(Subcommand)]
enum HeegaardCommand {
    Enumerate(EnumerateArgs),
}

#[derive(Subcommand)]
enum SplitCommand {
    Traintrack(TrackArgs),
}

#[derive(Args)]
struct TriArgs {
    /// Triangulation file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    tri: TriArgs,
    /// Include octagon coordinates (at most one octagon, weight one).
    #[arg(long)]
    octagons: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    tri: TriArgs,
    /// Comma-separated coordinates, 7 or 10 per tetrahedron.
    #[arg(long)]
    vector: String,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    tri: TriArgs,
    /// Comma-separated sector indices (10 per tetrahedron).
    #[arg(long)]
    support: String,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'g', long)]
    genus: i64,
    /// Cap multiplicities at this bound and skip the verdict precondition; the
    /// list is then marked incomplete.
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Args)]
struct TrackArgs {
    /// Track JSON file.
    #[arg(long, visible_alias = "input")]
    file: PathBuf,
    /// Large branch to split.
    #[arg(long)]
    branch: String,
}

struct Failure {
    kind: String,
    message: String,
    refusal: bool,
}

impl Failure {
    fn input(kind: &str, message: impl ToString) -> Self {
        Failure {
            kind: kind.to_string(),
            message: message.to_string(),
            refusal: false,
        }
    }
}

impl From<PolyhedralError> for Failure {
    fn from(e: PolyhedralError) -> Self {
        Failure {
            refusal: matches!(e, PolyhedralError::CoefficientBudget { .. }),
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<BranchedError> for Failure {
    fn from(e: BranchedError) -> Self {
        match e {
            BranchedError::Polyhedral(p) => p.into(),
            e => Failure::input(e.kind(), e),
        }
    }
}

impl From<FinitenessError> for Failure {
    fn from(e: FinitenessError) -> Self {
        match e {
            FinitenessError::Polyhedral(p) => p.into(),
            FinitenessError::UnboundedRefusal { .. } => Failure {
                kind: e.kind().to_string(),
                message: e.to_string(),
                refusal: true,
            },
            e => Failure::input(e.kind(), e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))
}

fn load_triangulation(args: &TriArgs) -> Result<Triangulation, Failure> {
    parse_triangulation(&read(&args.input)?).map_err(|e| Failure::input(e.kind(), e))
}

fn parse_support(text: &str) -> Result<Vec<usize>, Failure> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::input("InvalidSupport", format!("bad sector index {:?}", s.trim())))
        })
        .collect()
}

fn load_model(args: &ModelArgs, opts: EngineOptions) -> Result<BranchedSurfaceModel, Failure> {
    let tri = load_triangulation(&args.tri)?;
    let support = parse_support(&args.support)?;
    Ok(BranchedSurfaceModel::with_options(&tri, &support, opts)?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let opts = EngineOptions {
        max_coeff_bits: cli.max_coeff_bits,
    };
    match &cli.command {
        Command::Tri(TriCommand::Info(args)) => {
            let tri = load_triangulation(args)?;
            Ok(to_value(&TriangulationInfo::of(&tri)))
        }
        Command::Ns(NsCommand::Vertex(args)) | Command::Ns(NsCommand::Fundamental(args)) => {
            let tri = load_triangulation(&args.tri)?;
            let vectors = match &cli.command {
                Command::Ns(NsCommand::Vertex(_)) => vertex_solutions(&tri, args.octagons, opts)?,
                _ => fundamental_solutions(&tri, args.octagons, opts)?,
            };
            let surfaces: Vec<Value> = vectors
                .iter()
                .map(|v| {
                    let s = build_surface(&tri, v).expect("solutions are admissible");
                    json!({
                        "vector": v,
                        "chi": s.chi,
                        "components": s.components,
                        "vertex_linking": is_vertex_linking(&tri, v),
                    })
                })
                .collect();
            Ok(json!({
                "octagons": args.octagons,
                "count": vectors.len(),
                "surfaces": surfaces,
            }))
        }
        Command::Ns(NsCommand::Build(args)) => {
            let tri = load_triangulation(&args.tri)?;
            let v = NormalVector::parse(tri.tet_count(), &args.vector)
                .map_err(|m| Failure::input("InvalidVector", m))?;
            let report = is_admissible(&tri, &v);
            let surface = build_surface(&tri, &v).map_err(|e| Failure::input(e.kind(), e))?;
            let mut out = to_value(&surface);
            out["admissible"] = json!(report.admissible);
            out["vertex_linking"] = json!(is_vertex_linking(&tri, &v));
            Ok(out)
        }
        Command::Bs(cmd) => {
            let (BsCommand::FromSupport(args) | BsCommand::Verdict(args) | BsCommand::ZeroChi(args)) = cmd;
            let model = load_model(args, opts)?;
            match cmd {
                BsCommand::FromSupport(_) => Ok(json!({
                    "support": model.support(),
                    "octagon_sector": model.has_octagon_sector(),
                    "fully_carrying": model.is_fully_carrying(),
                    "positive_point": model.positive_point(),
                    "fundamentals": model.fundamentals()?,
                    "fundamental_chis": model.fundamental_chis()?,
                })),
                BsCommand::Verdict(_) => {
                    let mut out = to_value(&carries_nonneg_chi(&model)?);
                    out["support"] = json!(model.support());
                    out["max_projective_chi"] = match max_projective_chi(&model) {
                        Ok(opt) => to_value(&opt),
                        Err(PolyhedralError::EmptyCone) => Value::Null,
                        Err(e) => return Err(e.into()),
                    };
                    Ok(out)
                }
                BsCommand::ZeroChi(_) => Ok(json!({
                    "support": model.support(),
                    "locus": zero_chi_locus(&model)?,
                    "positive_point": positive_zero_chi_point(&model)?,
                })),
            }
        }
        Command::Heegaard(HeegaardCommand::Enumerate(args)) => {
            if args.genus < 2 {
                return Err(Failure::input(
                    "InvalidGenus",
                    format!("genus must be at least 2, got {}", args.genus),
                ));
            }
            let model = load_model(&args.model, opts)?;
            let e = match args.bound {
                Some(cap) => enumerate_genus_bounded(&model, args.genus, cap)?,
                None => enumerate_genus(&model, args.genus)?,
            };
            let cert = antichain_certificate(&e);
            let mut out = to_value(&e);
            out["antichain"] = json!(cert.antichain);
            out["counterexample"] = to_value(&cert.counterexample);
            Ok(out)
        }
        Command::Split(SplitCommand::Traintrack(args)) => {
            let tau: TrainTrack = serde_json::from_str(&read(&args.file)?)
                .map_err(|e| Failure::input("InvalidTrack", e))?;
            let s = split(&tau, &args.branch).map_err(|e| Failure::input(e.kind(), e))?;
            let cover = cone_cover_report(&tau, &s.tracks(), opts).map_err(|e| match e {
                laminate::traintrack::TrackError::Polyhedral(p) => p.into(),
                e => Failure::input(e.kind(), e),
            })?;
            Ok(json!({
                "branch": s.branch,
                "left": s.left,
                "central": s.central,
                "right": s.right,
                "subtracks": {
                    "central_in_left": is_subtrack(&s.central.track, &s.left.track),
                    "central_in_right": is_subtrack(&s.central.track, &s.right.track),
                    "left_in_right": is_subtrack(&s.left.track, &s.right.track),
                },
                "cover": cover,
            }))
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<(), String> {
    let mut text = if cli.pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("json values serialize");
    text.push('\n');
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("LAMINATE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // ignore the error if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (value, code) = match run(&cli) {
        Ok(v) => (v, 0),
        Err(f) => (
            json!({"error": {"kind": f.kind, "message": f.message}}),
            if f.refusal { 2 } else { 1 },
        ),
    };
    if let Err(msg) = emit(&cli, &value) {
        eprintln!("{msg}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
