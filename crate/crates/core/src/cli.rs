//! The `horonet` command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cmc1::{build_cmc1, dual_surface, net_from_frame, HorosphericalNet};
use crate::convergence::{
    frame_convergence, named_case, surface_convergence, Column, ConvergenceReport, PairData, Pipeline,
};
use crate::equidistant::{build_equidistant, EquidistantNet};
use crate::io::{
    cmc1_report, equidistant_report, export_cmc1, export_equidistant, export_minimal, frame_to_json,
    pattern_from_json, toda_from_json, toda_to_json, velocity_from_json, cross_ratios_from_json, ExportMesh,
    RunManifest,
};
use crate::mesh::LatticeSpec;
use crate::minimal::{edge_compatibility, osculating_vector_field};
use crate::osculating::smooth::SmoothMap;
use crate::pattern::{cross_ratios_of, verify_closure};
use crate::toda::{cmc1_from_toda, equidistant_from_toda, square_grid_toda, DiagonalRule, TodaFamily};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "horonet", version, about = "Discrete CMC-1 and minimal surfaces from pairs of circle patterns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closure and Delaunay check of a pattern or cross-ratio file.
    Check(CheckArgs),
    /// CMC-1 net from two shear-matched patterns.
    Cmc1(PairArgs),
    /// Equidistant net from two angle-matched patterns.
    Equidistant(PairArgs),
    /// Net from a member pair of the Toda family on a square grid.
    Toda(TodaArgs),
    /// Minimal surface from a pattern and a vertex velocity.
    Minimal(MinimalArgs),
    /// Lattice refinement study against a smooth map.
    Converge(ConvergeArgs),
    /// Dual net of a saved frame.
    Dual(DualArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    /// Check these cross ratios on the pattern's mesh instead of its own.
    #[arg(long)]
    pub cross_ratios: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Net geometry; `.ply` selects PLY, anything else OBJ.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Frame file for `dual`.
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// Segments per arc.
    #[arg(long, default_value_t = 16)]
    pub arcs: usize,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    /// Source pattern.
    #[arg(long)]
    pub a: PathBuf,
    /// Target (Gauss map) pattern.
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    pub export: ExportArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Cmc1,
    Equidistant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Rule {
    Smaller,
    Larger,
}

#[derive(Args, Debug)]
pub struct TodaArgs {
    /// Grid size `NxM`.
    #[arg(long, default_value = "6x6")]
    pub grid: String,
    /// Read the Toda data from a file instead of the square grid.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "cmc1")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "smaller")]
    pub rule: Rule,
    /// Write the Toda data used.
    #[arg(long)]
    pub toda_out: Option<PathBuf>,
    #[command(flatten)]
    pub export: ExportArgs,
}

#[derive(Args, Debug)]
pub struct MinimalArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub dot: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CliPipeline {
    Sampled,
    Solved,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    /// `exp`, `square` or `moebius`.
    #[arg(long, default_value = "exp")]
    pub case: String,
    #[arg(long, value_enum, default_value = "solved")]
    pub pipeline: CliPipeline,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
    pub eps: Vec<f64>,
    /// Lattice angles in degrees.
    #[arg(long, value_delimiter = ',', default_value = "60,60,60")]
    pub lattice: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    #[arg(long)]
    pub net_frame: PathBuf,
    #[command(flatten)]
    pub export: ExportArgs,
}

fn read(path: &Path, manifest: &mut RunManifest) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    manifest.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_mesh(path: &Path, mesh: &ExportMesh) -> Result<(), Error> {
    let ply = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ply"));
    write(path, &if ply { mesh.to_ply() } else { mesh.to_obj() })
}

fn finish(manifest: &RunManifest, path: &Option<PathBuf>) -> Result<(), Error> {
    match path {
        Some(p) => write(p, &manifest.to_json()),
        None => Ok(()),
    }
}

enum Net {
    Cmc1(HorosphericalNet),
    Equidistant(EquidistantNet),
}

/// Writes the requested artifacts and returns a summary.
fn emit(net: &Net, args: &ExportArgs, manifest: &mut RunManifest) -> Result<serde_json::Value, Error> {
    manifest.parameters.insert("arcs".into(), args.arcs.to_string());
    let (mesh, report) = match net {
        Net::Cmc1(n) => (export_cmc1(n, args.arcs)?, cmc1_report(n)?),
        Net::Equidistant(n) => (export_equidistant(n, args.arcs)?, equidistant_report(n)?),
    };
    if let Some(p) = &args.out {
        write_mesh(p, &mesh)?;
    }
    if let Some(p) = &args.report {
        write(p, &report.to_json())?;
    }
    if let Some(p) = &args.frame {
        let (frame, source, gauss) = match net {
            Net::Cmc1(n) => (&n.frame, &n.source, &n.gauss),
            Net::Equidistant(n) => (&n.frame, &n.source, &n.gauss),
        };
        match (frame, source) {
            (Some(f), Some(s)) => write(p, &frame_to_json(f, s, gauss))?,
            _ => return Err(Error::Cmc1(crate::cmc1::Cmc1Error::FrameUnavailable)),
        }
    }
    finish(manifest, &args.manifest)?;
    Ok(json!({
        "kind": report.kind,
        "degenerate": report.degenerate,
        "dual_vertices": report.points.len(),
        "residuals": report.residuals,
    }))
}

fn run_check(a: &CheckArgs) -> Result<(serde_json::Value, i32), Error> {
    let mut m = RunManifest::new("check");
    let p = pattern_from_json(&read(&a.pattern, &mut m)?)?;
    let xs = match &a.cross_ratios {
        Some(path) => cross_ratios_from_json(p.disk.clone(), &read(path, &mut m)?)?,
        None => cross_ratios_of(&p)?,
    };
    let rep = verify_closure(&xs);
    m.tolerances.insert("closure".into(), a.tol);
    finish(&m, &a.manifest)?;
    let ok = rep.max_residual() <= a.tol;
    let v = json!({
        "product": rep.product,
        "sum": rep.sum,
        "branching": rep.branching,
        "non_delaunay": rep.non_delaunay,
        "delaunay": rep.non_delaunay.is_empty(),
        "pass": ok,
    });
    Ok((v, if ok { 0 } else { 1 }))
}

fn run_pair(a: &PairArgs, mode: Mode) -> Result<serde_json::Value, Error> {
    let mut m = RunManifest::new(match mode {
        Mode::Cmc1 => "cmc1",
        Mode::Equidistant => "equidistant",
    });
    let z = pattern_from_json(&read(&a.a, &mut m)?)?;
    let zt = pattern_from_json(&read(&a.b, &mut m)?)?;
    let zt = crate::pattern::CirclePattern::new(z.disk.clone(), zt.z)?;
    let net = match mode {
        Mode::Cmc1 => Net::Cmc1(build_cmc1(&z, &zt)?),
        Mode::Equidistant => Net::Equidistant(build_equidistant(&z, &zt)?),
    };
    emit(&net, &a.export, &mut m)
}

fn parse_grid(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Usage(format!("grid must look like 6x6, got {s:?}"));
    let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

fn run_toda(a: &TodaArgs) -> Result<serde_json::Value, Error> {
    let mut m = RunManifest::new("toda");
    let solution = match &a.input {
        Some(p) => toda_from_json(&read(p, &mut m)?)?,
        None => {
            let (n, k) = parse_grid(&a.grid)?;
            m.parameters.insert("grid".into(), format!("{n}x{k}"));
            square_grid_toda(n, k)?
        }
    };
    if let Some(p) = &a.toda_out {
        write(p, &toda_to_json(&solution))?;
    }
    m.parameters.insert("t".into(), a.t.to_string());
    m.parameters.insert("mode".into(), format!("{:?}", a.mode).to_lowercase());
    m.parameters.insert("rule".into(), format!("{:?}", a.rule).to_lowercase());
    let rule = match a.rule {
        Rule::Smaller => DiagonalRule::Smaller,
        Rule::Larger => DiagonalRule::Larger,
    };
    let family = TodaFamily::new(solution, rule)?;
    let net = match a.mode {
        Mode::Cmc1 => Net::Cmc1(cmc1_from_toda(&family, a.t)?),
        Mode::Equidistant => Net::Equidistant(equidistant_from_toda(&family, a.t)?),
    };
    emit(&net, &a.export, &mut m)
}

fn run_minimal(a: &MinimalArgs) -> Result<serde_json::Value, Error> {
    let mut m = RunManifest::new("minimal");
    let z = pattern_from_json(&read(&a.pattern, &mut m)?)?;
    let dot = velocity_from_json(&read(&a.dot, &mut m)?)?;
    let frame = osculating_vector_field(&z, &dot)?;
    if let Some(p) = &a.out {
        write_mesh(p, &export_minimal(&frame))?;
    }
    finish(&m, &a.manifest)?;
    Ok(json!({ "faces": frame.a.len(), "edge_compatibility": edge_compatibility(&z, &frame) }))
}

fn merge(frame: ConvergenceReport, surface: Option<ConvergenceReport>) -> ConvergenceReport {
    let mut out = frame;
    if let Some(s) = surface {
        for (r, s) in out.rows.iter_mut().zip(s.rows) {
            r.surface_error = s.surface_error;
            r.hopf_error = s.hopf_error;
            r.hopf_mean = s.hopf_mean;
        }
    }
    out
}

fn run_converge(a: &ConvergeArgs) -> Result<serde_json::Value, Error> {
    let mut m = RunManifest::new("converge");
    let data = named_case(&a.case).ok_or_else(|| Error::Usage(format!("unknown case {:?}", a.case)))?;
    if a.lattice.len() != 3 {
        return Err(Error::Usage("--lattice takes three angles".into()));
    }
    let [al, be, ga] = [0, 1, 2].map(|k| a.lattice[k].to_radians());
    let spec = LatticeSpec { alpha: al, beta: be, gamma: ga, eps: a.eps[0], region: data.region.clone() };
    spec.validate()?;
    let pipeline = match a.pipeline {
        CliPipeline::Sampled => Pipeline::Sampled,
        CliPipeline::Solved => Pipeline::Solved,
    };
    let frame = frame_convergence(&data, &spec, &a.eps, pipeline)?;
    let surface = match pipeline {
        Pipeline::Solved => {
            let pair = PairData::new(SmoothMap::Identity, data.h.clone(), data.region.clone(), data.base)?;
            Some(surface_convergence(&pair, &spec, &a.eps)?)
        }
        Pipeline::Sampled => None,
    };
    let report = merge(frame, surface);
    if let Some(p) = &a.out {
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(|e| Error::Io(e.to_string()))?;
        write(p, &String::from_utf8(buf).expect("csv is utf-8"))?;
    }
    m.parameters.insert("case".into(), a.case.clone());
    m.parameters.insert("smooth_data".into(), data.h.name());
    m.parameters.insert("pipeline".into(), format!("{:?}", a.pipeline).to_lowercase());
    m.parameters.insert("eps".into(), a.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","));
    m.parameters.insert("lattice".into(), a.lattice.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","));
    m.parameters.insert("boundary".into(), "u = log|h'|".into());
    m.tolerances.insert("solve".into(), crate::convergence::SOLVE_TOL);
    finish(&m, &a.manifest)?;
    let mut orders = BTreeMap::new();
    for (name, c) in
        [("frame", Column::Frame), ("surface", Column::Surface), ("s1", Column::Schwarzian), ("hopf", Column::Hopf)]
    {
        if let Some(o) = report.order(c) {
            orders.insert(name, o);
        }
    }
    Ok(json!({ "label": report.label, "rows": report.rows.len(), "orders": orders }))
}

fn run_dual(a: &DualArgs) -> Result<serde_json::Value, Error> {
    let mut m = RunManifest::new("dual");
    let (frame, source, gauss) = crate::io::frame_from_json(&read(&a.net_frame, &mut m)?)?;
    let net = net_from_frame(frame, source, gauss)?;
    let dual = dual_surface(&net)?;
    emit(&Net::Cmc1(dual), &a.export, &mut m)
}

/// Runs a parsed command: summary JSON and exit code.
pub fn execute(cli: &Cli) -> Result<(serde_json::Value, i32), Error> {
    match &cli.command {
        Command::Check(a) => run_check(a),
        Command::Cmc1(a) => run_pair(a, Mode::Cmc1).map(|v| (v, 0)),
        Command::Equidistant(a) => run_pair(a, Mode::Equidistant).map(|v| (v, 0)),
        Command::Toda(a) => run_toda(a).map(|v| (v, 0)),
        Command::Minimal(a) => run_minimal(a).map(|v| (v, 0)),
        Command::Converge(a) => run_converge(a).map(|v| (v, 0)),
        Command::Dual(a) => run_dual(a).map(|v| (v, 0)),
    }
}

/// Parses `args`, runs, prints the summary to stdout or an error object to
/// stderr, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code != 0 {
                eprintln!("{}", json!({ "error": "Usage", "message": e.kind().to_string(), "code": code }));
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok((summary, code)) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            code
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string(), "code": code }));
            code
        }
    }
}
