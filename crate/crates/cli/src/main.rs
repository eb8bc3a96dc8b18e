//! `convexlab` command-line front end.
//!
//! Reports go to the file named by `--out`, to `$CONVEXLAB_OUT_DIR/<default
//! name>` when that variable is set, or else to standard output. Diagnostics
//! always go to standard error.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage,
//! input or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use convexlab::bodies::{cap_body_metrics, divergence_volume, Body, BodyKind};
use convexlab::body_spec::parse_body;
use convexlab::harness::{self, RunConfig, TheoremId};
use convexlab::mesh::io::{load_mesh, write_off, write_off_polyline};
use convexlab::mesh::BoundaryMesh;
use convexlab::polytope::{all_measures, cap_body_measures, measures_csv, CurvatureMeasureReport, FaceLattice};
use convexlab::smooth::hk::{proof_chain, smooth_curvature_measures};
use convexlab::smooth::{hk_functional, SupportEvaluator};
use convexlab::tube::{build_distance_field, extract_level_set, steiner_fit, DistanceOracle};
use convexlab::umbilic::classify_surface;

const OUT_DIR_VAR: &str = "CONVEXLAB_OUT_DIR";

const BODY_HELP: &str = "Body: inline `kind:key=value,...` (ball:r=1, capbody:eps=0.5, ellipsoid:a=1,b=1,c=2, \
polytope:@file.off, mesh:@file.off, cube, square, tetrahedron, lshape:dim=2, union:ball:cx=-2|ball:cx=2) \
or `@file.toml`. Lengths in coordinate units; dim is the ambient dimension (2 or 3)";

#[derive(Parser)]
#[command(name = "convexlab", version, about = "Curvature, tube and umbilicity computations for convex bodies")]
struct Cli {
    /// Print progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a body: kind, dimension, closed-form and mesh volumes.
    Body(BodyArgs),
    /// Curvature measure totals C_k with absolutely continuous and singular parts (CSV).
    Measures(MeasuresArgs),
    /// Heintze-Karcher functional of a smooth convex body (JSON).
    Hk(HkArgs),
    /// Distance field, offset volumes, Steiner fit and level sets (JSON).
    Tube(TubeArgs),
    /// Umbilicity test and plane / sphere / neither classification of a mesh (JSON).
    Umbilic(UmbilicArgs),
    /// Run the verification experiments (JSON report, optional CSV summary).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutArg {
    /// Output file; defaults to $CONVEXLAB_OUT_DIR/<name> or standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BodyArgs {
    #[arg(long, help = BODY_HELP)]
    body: String,
    /// Mesh refinement: icosphere subdivisions, or ring scale for cap bodies [count].
    #[arg(long, default_value_t = 4, value_name = "N")]
    resolution: u32,
    /// Also write the boundary mesh as OFF.
    #[arg(long, value_name = "PATH")]
    mesh_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct MeasuresArgs {
    #[arg(long, help = BODY_HELP)]
    body: String,
    /// Quadrature level for smooth bodies [refinements].
    #[arg(long, default_value_t = 5, value_name = "N")]
    level: u32,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct HkArgs {
    #[arg(long, help = BODY_HELP)]
    body: String,
    /// Sphere quadrature level [refinements; 8·2^N nodes in the plane, icosphere level N in space].
    #[arg(long, default_value_t = 5, value_name = "N")]
    level: u32,
    /// Also report the chain of volume bounds [volume units].
    #[arg(long)]
    chain: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct TubeArgs {
    #[arg(long, help = BODY_HELP)]
    body: String,
    /// Grid step [length].
    #[arg(long, default_value_t = 0.02, value_name = "H")]
    step: f64,
    /// Empty space around the body's bounding box [length].
    #[arg(long, default_value_t = 0.7, value_name = "M")]
    margin: f64,
    /// Offset radii for the Steiner fit, comma separated [length].
    #[arg(long, value_delimiter = ',', value_name = "R,R,...")]
    radii: Vec<f64>,
    /// Extract the level set at this distance [length].
    #[arg(long, value_name = "R")]
    level_set: Option<f64>,
    /// Where to write the level set as OFF (requires --level-set).
    #[arg(long, value_name = "PATH", requires = "level_set")]
    mesh_out: Option<PathBuf>,
    /// Write the distance field as a little-endian binary dump.
    #[arg(long, value_name = "PATH")]
    field_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct UmbilicArgs {
    /// Closed triangle mesh (OFF or OBJ).
    #[arg(long, value_name = "PATH", conflicts_with = "body")]
    mesh: Option<PathBuf>,
    /// Per-vertex unit normals, one `x y z` line per vertex.
    #[arg(long, value_name = "PATH", requires = "mesh")]
    normals: Option<PathBuf>,
    #[arg(long, help = BODY_HELP)]
    body: Option<String>,
    /// Mesh refinement when meshing --body [count].
    #[arg(long, default_value_t = 5, value_name = "N")]
    resolution: u32,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every experiment (the default when no --theorem is given).
    #[arg(long)]
    all: bool,
    /// Experiment to run; repeatable. One of HK-smooth, HK-chain,
    /// HK-threshold, Compactness, CapBody, SingularSeam, Umbilic, SteinerReach.
    #[arg(long = "theorem", value_name = "ID", conflicts_with = "all")]
    theorems: Vec<String>,
    /// TOML run configuration (seed, theorems, [resolution], [tolerances]).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Random seed; overrides the configuration [integer, default 42].
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// CSV summary path.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

/// A failure that should exit with status 1 rather than 2.
#[derive(Debug)]
struct VerificationFailed;

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::Body(a) => run_body(a),
        Command::Measures(a) => run_measures(a),
        Command::Hk(a) => run_hk(a),
        Command::Tube(a) => run_tube(a, verbose),
        Command::Umbilic(a) => run_umbilic(a),
        Command::Verify(a) => run_verify(a, verbose),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("convexlab: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("convexlab: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &OutArg, default_name: &str, contents: &str) -> Result<()> {
    let path = match (&out.out, std::env::var_os(OUT_DIR_VAR)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(Path::new(&dir).join(default_name)),
        (None, None) => None,
    };
    match path {
        Some(p) => write_file(&p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn body_arg(spec: &str) -> Result<Body> {
    parse_body(spec).with_context(|| format!("invalid body '{spec}'"))
}

fn run_body(a: BodyArgs) -> Result<()> {
    let body = body_arg(&a.body)?;
    let mut report = json!({
        "kind": format!("{:?}", body.kind()),
        "dim": body.dim().ambient(),
    });
    if let BodyKind::CapBody { epsilon } = body.kind() {
        report["cap_body"] = serde_json::to_value(cap_body_metrics(body.dim().n(), *epsilon)?)?;
    }
    if let Ok(oracle) = DistanceOracle::from_body(&body) {
        let b = oracle.bbox();
        report["bbox"] = json!({"lo": b.lo.as_slice(), "hi": b.hi.as_slice()});
    }
    match body.boundary_mesh(a.resolution) {
        Ok(mesh) => {
            report["mesh_measure"] = json!(mesh.measure());
            report["mesh_volume"] = json!(divergence_volume(&mesh)?);
            if let Some(p) = &a.mesh_out {
                write_file(p, &mesh_off(&mesh))?;
            }
        }
        Err(e) if a.mesh_out.is_some() => return Err(e.into()),
        Err(_) => {}
    }
    emit(&a.out, "body.json", &to_json(&report))
}

fn mesh_off(mesh: &BoundaryMesh) -> String {
    match mesh {
        BoundaryMesh::Curve(p) => write_off_polyline(p),
        BoundaryMesh::Surface(m) => write_off(m),
    }
}

fn run_measures(a: MeasuresArgs) -> Result<()> {
    let body = body_arg(&a.body)?;
    let reports: Vec<CurvatureMeasureReport> = match body.kind() {
        BodyKind::Polytope { .. } => all_measures(&FaceLattice::build(&body)?)?,
        BodyKind::CapBody { epsilon } => cap_body_measures(body.dim(), *epsilon)?,
        BodyKind::SampledSet(_) => bail!("curvature measures need a convex body, not a sampled set"),
        _ => {
            let ev = SupportEvaluator::from_body(&body, a.level)?;
            smooth_curvature_measures(&ev)?
                .into_iter()
                .enumerate()
                .map(|(k, total)| CurvatureMeasureReport {
                    k,
                    total,
                    ac_part: total,
                    sing_part: 0.0,
                    per_face: Vec::new(),
                })
                .collect()
        }
    };
    emit(&a.out, "measures.csv", &measures_csv(&reports))
}

fn run_hk(a: HkArgs) -> Result<()> {
    let body = body_arg(&a.body)?;
    let ev = SupportEvaluator::from_body(&body, a.level)?;
    let mut report = serde_json::to_value(hk_functional(&ev)?)?;
    if a.chain {
        report["chain"] = serde_json::to_value(proof_chain(&ev)?)?;
    }
    emit(&a.out, "hk.json", &to_json(&report))
}

fn run_tube(a: TubeArgs, verbose: bool) -> Result<()> {
    let body = body_arg(&a.body)?;
    let oracle = DistanceOracle::from_body(&body)?;
    let bbox = oracle.bbox().padded(a.margin, body.dim());
    let field = build_distance_field(&body, bbox, a.step)?;
    if verbose {
        eprintln!("grid {:?}, margin {:.4}", field.dims, field.margin());
    }
    let mut report = json!({
        "dims": field.dims,
        "step": field.step,
        "margin": field.margin(),
        "lipschitz_ratio": field.lipschitz_ratio(),
    });
    if !a.radii.is_empty() {
        let volumes = a
            .radii
            .iter()
            .map(|&r| field.offset_volume(r))
            .collect::<convexlab::Result<Vec<_>>>()?;
        report["offset_volumes"] = json!(a.radii.iter().zip(&volumes).map(|(r, v)| json!({"rho": r, "volume": v})).collect::<Vec<_>>());
        match steiner_fit(&field, &a.radii) {
            Ok(fit) => report["steiner_fit"] = serde_json::to_value(fit)?,
            Err(e) if verbose => eprintln!("no Steiner fit: {e}"),
            Err(_) => {}
        }
    }
    if let Some(r) = a.level_set {
        let s = extract_level_set(&field, r)?;
        let (vertices, components) = match &s.mesh {
            BoundaryMesh::Surface(m) => (m.vertices.len(), m.euler_characteristics()),
            BoundaryMesh::Curve(p) => (p.vertices.len(), vec![0; p.loop_count()]),
        };
        report["level_set"] = json!({
            "r": r,
            "vertices": vertices,
            "measure": s.mesh.measure(),
            "euler_characteristics": components,
        });
        if let Some(p) = &a.mesh_out {
            write_file(p, &mesh_off(&s.mesh))?;
        }
    }
    if let Some(p) = &a.field_out {
        field.save(p).with_context(|| format!("cannot write {}", p.display()))?;
    }
    emit(&a.out, "tube.json", &to_json(&report))
}

fn run_umbilic(a: UmbilicArgs) -> Result<()> {
    let mesh = match (&a.mesh, &a.body) {
        (Some(path), _) => load_mesh(path, a.normals.as_deref()).with_context(|| format!("cannot load {}", path.display()))?,
        (None, Some(spec)) => match body_arg(spec)?.boundary_mesh(a.resolution)? {
            BoundaryMesh::Surface(m) => m,
            BoundaryMesh::Curve(_) => bail!("umbilicity needs a surface in space"),
        },
        (None, None) => bail!("give --mesh or --body"),
    };
    let verdicts = classify_surface(&mesh)?;
    emit(&a.out, "umbilic.json", &to_json(&serde_json::to_value(verdicts)?))
}

fn run_verify(a: VerifyArgs, verbose: bool) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if a.all {
        cfg.theorems = None;
    } else if !a.theorems.is_empty() {
        let ids = a
            .theorems
            .iter()
            .map(|t| {
                TheoremId::ALL
                    .into_iter()
                    .find(|id| id.name() == t)
                    .with_context(|| format!("unknown theorem id '{t}'"))
            })
            .collect::<Result<Vec<_>>>()?;
        cfg.theorems = Some(ids);
    }
    let reports = harness::run_all(&cfg)?;
    for r in &reports {
        eprintln!("{:<13} {}", r.theorem.name(), r.verdict.name());
        if verbose || r.verdict == harness::Verdict::Fail {
            for f in r.fixtures.iter().filter(|f| verbose || f.verdict == harness::Verdict::Fail) {
                eprintln!("    {:<24} {} {}", f.fixture, f.verdict.name(), f.reason);
            }
        }
    }
    emit(&a.out, "report.json", &harness::reports_json(&reports))?;
    if let Some(p) = &a.csv {
        write_file(p, &harness::reports_csv(&reports))?;
    }
    if harness::any_failed(&reports) {
        return Err(VerificationFailed.into());
    }
    Ok(())
}
