//! `defect` — curvature estimation and convergence experiments on triangle
//! meshes.
//!
//! Exit codes: 0 on success, 2 on mesh parse errors, 3 on configuration
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use defect::bench::{
    run_counterexample, run_parallelogram, run_table1, run_table2, ExperimentConfig, ExperimentKind,
};
use defect::hull::{convex_hull, sample_uniform_sphere};
use defect::io::{
    read_mesh, write_counterexample_report, write_curvature_report, write_mesh, write_report,
    MeshFormat, ReportFormat,
};
use defect::schemes::{estimate_mesh, SchemeId};
use defect::Error;

#[derive(Parser)]
#[command(
    name = "defect",
    version,
    about = "Angular-defect curvature schemes on triangle meshes: per-vertex estimation and convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Per-vertex curvature estimates for a mesh file (OBJ or OFF).
    Estimate {
        /// Input mesh path; format inferred from the extension.
        mesh: PathBuf,
        /// Comma-separated schemes to evaluate.
        #[arg(long, value_delimiter = ',', default_values = ["g1", "g2", "g3", "g4", "g5", "h1"])]
        schemes: Vec<SchemeId>,
        /// Override the mesh format inferred from the extension.
        #[arg(long)]
        mesh_format: Option<MeshFormat>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regular-fan refinement study over random quadratic graphs.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 5, 6, 7, 8])]
        valences: Vec<usize>,
        /// Refinement levels l1; decreasing.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        /// Random quadratic forms per cell.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values = ["g1", "g2", "g4", "g5"])]
        schemes: Vec<SchemeId>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Whole-mesh study over random sphere triangulations.
    Table2 {
        #[arg(long, value_delimiter = ',', default_values_t = [30usize, 100, 400, 1300, 5000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values = ["g1", "g2", "g4", "g5", "h1"])]
        schemes: Vec<SchemeId>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Valence-4 counterexample demonstrator.
    Counterexample {
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parallelogram-criterion refinement study on smooth surfaces.
    Parallelogram {
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_values = ["g1", "g3"])]
        schemes: Vec<SchemeId>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run an experiment described by a JSON config file; every field but
    /// "kind" is optional.
    Run {
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random sphere triangulation and write it as a mesh file.
    Sphere {
        /// Output path; format inferred from the extension.
        out: PathBuf,
        /// Number of uniform sphere samples.
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Override the mesh format inferred from the extension.
        #[arg(long)]
        mesh_format: Option<MeshFormat>,
    },
}

fn emit_to(out: &Option<PathBuf>, text: String) -> Result<(), Error> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write '{}': {e}", path.display()))),
    }
}

fn emit(output: &OutputArgs, text: String) -> Result<(), Error> {
    emit_to(&output.out, text)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate {
            mesh,
            schemes,
            mesh_format,
            output,
        } => {
            let format = match mesh_format {
                Some(f) => f,
                None => MeshFormat::from_path(&mesh)?,
            };
            let mesh = read_mesh(&mesh, format)?;
            let report = estimate_mesh(&mesh, &schemes);
            emit(&output, write_curvature_report(&report, output.format))
        }
        Command::Table1 {
            valences,
            levels,
            samples,
            seed,
            schemes,
            output,
        } => {
            let mut cfg = ExperimentConfig::table1_defaults();
            cfg.valences = valences;
            if let Some(levels) = levels {
                cfg.levels = levels;
            }
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.schemes = schemes;
            cfg.format = output.format;
            let table = run_table1(&cfg)?;
            emit(&output, write_report(&table, output.format))
        }
        Command::Table2 {
            sizes,
            seed,
            schemes,
            output,
        } => {
            let mut cfg = ExperimentConfig::table2_defaults();
            cfg.sphere_sizes = sizes;
            cfg.seed = seed;
            cfg.schemes = schemes;
            cfg.format = output.format;
            let table = run_table2(&cfg)?;
            emit(&output, write_report(&table, output.format))
        }
        Command::Counterexample { levels, output } => {
            let mut cfg = ExperimentConfig::counterexample_defaults();
            if let Some(levels) = levels {
                cfg.levels = levels;
            }
            cfg.format = output.format;
            let report = run_counterexample(&cfg)?;
            emit(&output, write_counterexample_report(&report, output.format))
        }
        Command::Parallelogram {
            levels,
            schemes,
            output,
        } => {
            let mut cfg = ExperimentConfig::parallelogram_defaults();
            if let Some(levels) = levels {
                cfg.levels = levels;
            }
            cfg.schemes = schemes;
            cfg.format = output.format;
            let table = run_parallelogram(&cfg)?;
            emit(&output, write_report(&table, output.format))
        }
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("cannot read '{}': {e}", config.display())))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config: {e}")))?;
            let rendered = match cfg.kind {
                ExperimentKind::Table1 => write_report(&run_table1(&cfg)?, cfg.format),
                ExperimentKind::Table2 => write_report(&run_table2(&cfg)?, cfg.format),
                ExperimentKind::Parallelogram => {
                    write_report(&run_parallelogram(&cfg)?, cfg.format)
                }
                ExperimentKind::Counterexample => {
                    write_counterexample_report(&run_counterexample(&cfg)?, cfg.format)
                }
            };
            emit_to(&out, rendered)
        }
        Command::Sphere {
            out,
            n,
            seed,
            mesh_format,
        } => {
            let format = match mesh_format {
                Some(f) => f,
                None => MeshFormat::from_path(&out)?,
            };
            let mesh = convex_hull(&sample_uniform_sphere(n, seed)?)?;
            emit_to(&Some(out), write_mesh(&mesh, format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::UnsupportedPolygon { .. } => ExitCode::from(2),
                Error::Config(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
