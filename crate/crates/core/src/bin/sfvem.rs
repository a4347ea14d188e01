use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sfvem::experiment::{parse_degrees, parse_levels, RunConfig};
use sfvem::mesh::MeshFamily;
use sfvem::verify;

#[derive(Parser)]
#[command(name = "sfvem", version, about = "Stabilizer-free virtual elements on triangles: convergence and conditioning studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study and print (or write) the CSV report.
    Run(RunArgs),
    /// Generate a mesh and export it as text.
    Mesh(MeshArgs),
    /// Run the property suites.
    Verify {
        /// Also run the slower global checks.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sf-hct, classic or enriched.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// uniform or irregular8.
    #[arg(long)]
    mesh: Option<String>,
    /// Level range `a..b` (inclusive) or a single level.
    #[arg(long)]
    levels: Option<String>,
    /// Stabilizer exponent (classic only).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// standard, l2 or l2x10 (classic only).
    #[arg(long)]
    dof_mode: Option<String>,
    /// Comma-separated list or range `a..b` (enriched only).
    #[arg(long)]
    harmonic_degrees: Option<String>,
    /// Source treatment in the load: interpolated (default) or quadrature.
    #[arg(long)]
    source: Option<String>,
    /// Estimate the condition number of each system.
    #[arg(long)]
    kappa: bool,
    /// Relative residual tolerance for iterative solves.
    #[arg(long)]
    tol: Option<f64>,
    /// auto, direct or cg.
    #[arg(long)]
    solver: Option<String>,
    /// Leave the seconds column empty (byte-reproducible output).
    #[arg(long)]
    no_timing: bool,
    /// CSV output path (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Matrix Market export of the assembled system(s).
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, default_value = "uniform")]
    family: String,
    #[arg(long)]
    level: usize,
    /// Output path (stdout otherwise).
    #[arg(long)]
    mesh_out: Option<PathBuf>,
}

fn build_config(args: RunArgs) -> sfvem::Result<RunConfig> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.method {
        c.method = v.parse()?;
    }
    if let Some(v) = args.k {
        c.k = v;
    }
    if let Some(v) = args.mesh {
        c.mesh = v.parse()?;
    }
    if let Some(v) = args.levels {
        c.levels = parse_levels(&v)?;
    }
    if let Some(v) = args.alpha {
        c.alpha = v;
    }
    if let Some(v) = args.dof_mode {
        c.dof_mode = v.parse()?;
    }
    if let Some(v) = args.harmonic_degrees {
        c.harmonic_degrees = parse_degrees(&v)?;
    }
    if let Some(v) = args.source {
        c.source = v.parse()?;
    }
    if args.kappa {
        c.kappa = true;
    }
    if let Some(v) = args.tol {
        c.tol = v;
    }
    if let Some(v) = args.solver {
        c.solver = v.parse()?;
    }
    if args.no_timing {
        c.timing = false;
    }
    if args.out.is_some() {
        c.out = args.out;
    }
    if args.dump_matrix.is_some() {
        c.dump_matrix = args.dump_matrix;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: Cli) -> sfvem::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = build_config(args)?;
            let report = sfvem::experiment::run_experiment(&config)?;
            if config.out.is_none() {
                print!("{}", report.to_csv());
            }
        }
        Command::Mesh(args) => {
            let family: MeshFamily = args.family.parse()?;
            let mesh = family.generate(args.level)?;
            match args.mesh_out {
                Some(path) => mesh.save(path)?,
                None => mesh.write_text(std::io::stdout().lock())?,
            }
        }
        Command::Verify { full } => {
            let outcomes = verify::run_all(full);
            let mut failed = 0;
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            if failed > 0 {
                return Err(sfvem::Error::Config(format!("{failed} of {} property checks failed", outcomes.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed reader (`| head`) is not an error
        Err(sfvem::Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
