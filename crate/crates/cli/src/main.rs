use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcx::report::polygon_inputs;
use graphcx::{
    run_pipeline, run_polygon, Command, GraphInput, JInput, OrientationChoice, PipelineOptions, RawInputs, Report,
    ResolvedInputs, SigmaInput,
};
use serde::de::DeserializeOwned;

/// Exact verifier for complex differential calculi on bidirected graphs.
#[derive(Parser)]
#[command(name = "graphcx", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Validate the graph, σ and J.
    Check(InputArgs),
    /// Form dimensions up to --max-degree.
    Prolong(InputArgs),
    /// Dolbeault cohomology table.
    Cohomology(InputArgs),
    /// Holomorphic sections and the section ring.
    Holo(InputArgs),
    /// Cocycle identities and positivity.
    Cocycle {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, value_enum, default_value_t = Orientation::Standard)]
        orientation: Orientation,
    },
    /// Every stage.
    All {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, value_enum, default_value_t = Orientation::Standard)]
        orientation: Orientation,
    },
    /// Generate the n-gon, run every stage and compare with the expected table.
    Polygon {
        #[arg(long)]
        n: usize,
        /// Write graph.json, sigma.json and j.json to this directory.
        #[arg(long, value_name = "DIR")]
        emit_inputs: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value_t = Orientation::Standard)]
        orientation: Orientation,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
    #[arg(long)]
    j: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    /// Include the operator matrices in the report.
    #[arg(long)]
    emit_matrices: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Orientation {
    Standard,
    Opposite,
}

impl From<Orientation> for OrientationChoice {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Standard => OrientationChoice::Standard,
            Orientation::Opposite => OrientationChoice::Opposite,
        }
    }
}

fn read_json<T: DeserializeOwned>(kind: &str, path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {kind} file {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!("ParseError: {kind} file {} at line {}, column {}: {e}", path.display(), e.line(), e.column())
    })
}

fn load(args: &InputArgs, needs_j: bool) -> anyhow::Result<ResolvedInputs> {
    let raw = RawInputs {
        graph: read_json::<GraphInput>("graph", &args.graph)?,
        sigma: read_json::<SigmaInput>("sigma", &args.sigma)?,
        j: args.j.as_deref().map(|p| read_json::<JInput>("j", p)).transpose()?,
    };
    if needs_j && raw.j.is_none() {
        bail!("this command needs --j");
    }
    ResolvedInputs::resolve(&raw).map_err(|e| anyhow!("{}: {e}", e.kind()))
}

fn options(command: Command, output: &OutputArgs, orientation: Orientation) -> PipelineOptions {
    PipelineOptions {
        command,
        max_degree: output.max_degree,
        orientation: orientation.into(),
        emit_matrices: output.emit_matrices,
        ..PipelineOptions::default()
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> anyhow::Result<()> {
    let text = report.to_json();
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write report to {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_inputs(n: usize, dir: &Path) -> anyhow::Result<()> {
    let inputs = polygon_inputs(n)?;
    let (graph, sigma, j) = inputs.canonical_files();
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    fs::write(dir.join("graph.json"), graph)?;
    fs::write(dir.join("sigma.json"), sigma)?;
    fs::write(dir.join("j.json"), j.expect("polygon has J"))?;
    Ok(())
}

fn pipeline(command: Command, inputs: InputArgs, orientation: Orientation) -> anyhow::Result<(Report, Option<PathBuf>)> {
    let needs_j = !matches!(command, Command::Check | Command::Prolong);
    let resolved = load(&inputs, needs_j)?;
    let report = run_pipeline(&resolved, &options(command, &inputs.output, orientation));
    Ok((report, inputs.output.out))
}

/// `Ok(true)` when every verdict passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let (report, out) = match cli.command {
        Sub::Check(inputs) => pipeline(Command::Check, inputs, Orientation::Standard)?,
        Sub::Prolong(inputs) => pipeline(Command::Prolong, inputs, Orientation::Standard)?,
        Sub::Cohomology(inputs) => pipeline(Command::Cohomology, inputs, Orientation::Standard)?,
        Sub::Holo(inputs) => pipeline(Command::Holo, inputs, Orientation::Standard)?,
        Sub::Cocycle { inputs, orientation } => pipeline(Command::Cocycle, inputs, orientation)?,
        Sub::All { inputs, orientation } => pipeline(Command::All, inputs, orientation)?,
        Sub::Polygon { n, emit_inputs: dir, output, orientation } => {
            if let Some(dir) = &dir {
                emit_inputs(n, dir)?;
            }
            (run_polygon(n, &options(Command::All, &output, orientation))?, output.out)
        }
    };
    write_report(&report, out.as_deref())?;
    summarize(&report);
    Ok(report.all_pass())
}

fn summarize(report: &Report) {
    if report.failures.is_empty() {
        eprintln!("graphcx: all checks passed");
    } else {
        eprintln!("graphcx: {} failed: {}", report.failures.len(), report.failures.join(", "));
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
