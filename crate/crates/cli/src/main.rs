use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use uctkit_cli::report::{document, render};
use uctkit_cli::{parse_job, parse_jobs, run_job, CliError, JobSpec, Report, EXIT_INCONCLUSIVE};

/// Hom, Ext, Pext, lim¹ and KK-filtration reports for abelian group data.
#[derive(Parser, Debug)]
#[command(name = "uctkit", version, trailing_var_arg = true)]
struct Args {
    /// Number of tower stages examined by window computations.
    #[arg(long)]
    window: Option<usize>,
    /// Truncation level for infinitely generated stages.
    #[arg(long)]
    truncation: Option<u32>,
    /// Exit with code 2 if any verdict is inconclusive.
    #[arg(long)]
    strict: bool,
    /// Print a human-readable table to stderr.
    #[arg(long)]
    summary: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Read jobs from a file, one per line.
    #[arg(long, conflicts_with = "job")]
    file: Option<PathBuf>,
    /// A job, e.g. `fg-ext Z/4 Z/6` or `catalog-run example53`.
    #[arg(allow_hyphen_values = true)]
    job: Vec<String>,
}

fn jobs(args: &Args) -> Result<Vec<JobSpec>, CliError> {
    let mut specs = match &args.file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_jobs(&text)?
        }
        None if args.job.is_empty() => {
            return Err(CliError::Semantic("no job given; try `uctkit catalog-run remark24`".into()))
        }
        None => vec![parse_job(&args.job.join(" "), 1)?],
    };
    for s in &mut specs {
        let o = &mut s.options;
        if let Some(w) = args.window {
            o.window = w;
        }
        if args.truncation.is_some() {
            o.truncation = args.truncation;
        }
        o.strict |= args.strict;
        o.summary |= args.summary;
        if args.out.is_some() {
            o.out.clone_from(&args.out);
        }
    }
    Ok(specs)
}

fn run(args: &Args) -> Result<i32, CliError> {
    let specs = jobs(args)?;
    if specs.iter().any(|s| s.options.window == 0) {
        return Err(CliError::Semantic("window must be positive".into()));
    }
    let reports = specs.iter().map(run_job).collect::<Result<Vec<Report>, _>>()?;
    let text = render(&document(&reports));
    let out = specs.iter().rev().find_map(|s| s.options.out.clone());
    match out {
        Some(path) => std::fs::write(&path, &text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    for (s, r) in specs.iter().zip(&reports) {
        if s.options.summary {
            eprint!("{}", r.render_summary());
        }
    }
    let strict_fail = specs.iter().zip(&reports).any(|(s, r)| s.options.strict && r.is_inconclusive());
    Ok(if strict_fail { EXIT_INCONCLUSIVE } else { 0 })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("uctkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
