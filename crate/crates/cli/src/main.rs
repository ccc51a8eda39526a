use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hermitian_perturb_cli::{run_job, CliError, Context, JobSpec, EXIT_INPUT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Runs one job file and prints the resulting document.
#[derive(Debug, Parser)]
#[command(name = "hperturb", version)]
struct Args {
    /// JSON job file.
    #[arg(long)]
    job: PathBuf,
    /// Directory for the result document and CSV side files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the job's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn run(args: &Args) -> Result<i32, CliError> {
    let mut spec = JobSpec::from_path(&args.job)?;
    if let Some(t) = args.tolerance {
        spec.tolerance = t;
    }
    let doc = run_job(&spec, &Context { out_dir: args.out.clone() })?;
    let (text, name) = match args.format {
        Format::Json => (doc.to_json(), "result.json"),
        Format::Csv => (doc.table.clone(), "result.csv"),
    };
    if let Some(dir) = &args.out {
        let path = dir.join(name);
        std::fs::write(&path, &text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    print!("{text}");
    Ok(doc.exit_code)
}

fn main() -> ExitCode {
    // clap would exit with 2, which here means a consistency stop
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hperturb: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code.clamp(0, 255) as u8)
}
