use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use secure_metrology::harness::acceptance::{verdict_line, verify_suite, SuiteOptions, DEFAULT_SEED};
use secure_metrology::harness::{emit_plot_series, sweep, ExperimentConfig, Report, SEED_ENV, THREADS_ENV};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "secmet", version, about = "Secure quantum metrology simulator")]
struct Cli {
    /// Master seed; overrides the seed in config files.
    #[arg(long, global = true, env = SEED_ENV)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the JSON report here (defaults to the config's `output`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every `*.json` config in a directory.
    Sweep {
        dir: PathBuf,
        /// Write one JSON report per config into this directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write CSV series for plotting.
    EmitPlots {
        #[arg(long, default_value = "plots")]
        dir: PathBuf,
    },
}

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_file(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    Ok(config)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn render(report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    })
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { config, format, output } => {
            let config = load(config, cli)?;
            let report = secure_metrology::harness::run_experiment(&config)?;
            print!("{}", render(&report, *format)?);
            if let Some(path) = output.as_ref().or(config.output.as_ref()) {
                write(path, &report.to_json())?;
            }
            Ok(report.passed)
        }
        Command::Sweep { dir, output_dir } => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            let configs = paths.iter().map(|p| load(p, cli)).collect::<Result<Vec<_>>>()?;
            let mut all = true;
            for (path, result) in paths.iter().zip(sweep(&configs)) {
                match result {
                    Ok(report) => {
                        println!("{}: {}", path.display(), if report.passed { "PASS" } else { "FAIL" });
                        all &= report.passed;
                        if let Some(out) = output_dir {
                            let name = path.file_name().expect("file name");
                            write(&out.join(name), &report.to_json())?;
                        }
                    }
                    Err(e) => {
                        println!("{}: ERROR {e}", path.display());
                        all = false;
                    }
                }
            }
            Ok(all)
        }
        Command::Verify { output } => {
            let opts = SuiteOptions {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                threads: cli.threads,
            };
            let (report, timings) = verify_suite(&opts)?;
            let mut all = report.passed;
            for (c, t) in report.criteria.iter().zip(&timings) {
                println!("{}", verdict_line(c, Some(*t)));
                if !c.within_runtime(*t) {
                    println!("criterion {:>2}: FAIL runtime limit exceeded", c.id);
                    all = false;
                }
            }
            println!();
            print!("{}", report.to_text(None));
            if let Some(path) = output {
                write(path, &report.to_json())?;
            }
            Ok(all)
        }
        Command::EmitPlots { dir } => {
            let opts = SuiteOptions {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                threads: cli.threads,
            };
            for path in emit_plot_series(dir, &opts)? {
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
