use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use multierg::suite::run_suite;
use multierg_cli::commands::{execute, run_all, Artifact};
use multierg_cli::config::{ExperimentConfig, Task};
use multierg_cli::{exit_code, EXIT_SUITE_FAILED};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "multierg",
    version,
    about = "Multiple ergodic averages on tori and nilmanifolds"
)]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides [output] dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed; overrides [run] seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the orbit of the start point.
    Orbit,
    /// Averages at each checkpoint, as CSV.
    Average,
    /// Host-Kra seminorm estimates, as JSON.
    Seminorm,
    /// van der Corput diagnostic, as JSON.
    Vdc,
    /// Self-joining and fiber integrals, as JSON.
    Joining,
    /// Ergodicity certificate, as JSON.
    Certify,
    /// Every task listed in [run] tasks.
    Run,
    /// A property family: oracle, seminorm, joining, nilsystem or folner.
    Suite { name: String },
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli.config.as_ref().context("--config is required")?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg =
        ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.output_dir = cli.out.clone();
    }
    Ok(cfg)
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn suite(name: &str) -> Result<bool> {
    let mut ok = true;
    for r in run_suite(name)? {
        println!(
            "criterion {} [{}] {} ({:.1} s)",
            r.id,
            if r.passed() { "PASS" } else { "FAIL" },
            r.title,
            r.elapsed.as_secs_f64()
        );
        for c in &r.checks {
            println!("    {c}");
        }
        ok &= r.passed();
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("configuring the thread pool")?;
    if let Command::Suite { name } = &cli.command {
        return suite(name);
    }
    let cfg = load(cli)?;
    let artifacts = match cli.command {
        Command::Orbit => execute(Task::Orbit, &cfg)?,
        Command::Average => execute(Task::Average, &cfg)?,
        Command::Seminorm => execute(Task::Seminorm, &cfg)?,
        Command::Vdc => execute(Task::Vdc, &cfg)?,
        Command::Joining => execute(Task::Joining, &cfg)?,
        Command::Certify => execute(Task::Certify, &cfg)?,
        Command::Run => run_all(&cfg)?,
        Command::Suite { .. } => unreachable!(),
    };
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    write_artifacts(&dir, &artifacts)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_SUITE_FAILED as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
