//! `simadc`: batch driver for the ME-MTJ stochastic ADC simulator.

mod experiment;
mod output;
mod plots;

use clap::Parser;
use experiment::{Artifact, Kind};
use simadc_core::config::{Entries, SimConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const AFTER_HELP: &str = "\
Parameter precedence (highest first): --set KEY=VALUE, kind flags
(--seed, --bits, --ts, --duration, --voltages), the --config file,
built-in defaults.

--duration sets trace_duration (trace) or dwell_duration (dwell,
arrhenius). --voltages sets trace_voltages, sweep_voltages or
psw_voltages, or dwell_voltage (single value) for dwell.

Exit codes: 0 success, 1 config error, 2 simulation error, 3 I/O error.";

#[derive(Parser, Debug)]
#[command(name = "simadc", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Experiment to run
    #[arg(value_enum)]
    kind: Kind,
    /// key = value parameter file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: one per core); never changes results
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// ADC resolution m (2^m + 1 sweep points)
    #[arg(long)]
    bits: Option<u32>,
    /// Conversion window, s
    #[arg(long)]
    ts: Option<f64>,
    /// Simulated duration, s
    #[arg(long)]
    duration: Option<f64>,
    /// Comma-separated voltages, V
    #[arg(long, allow_hyphen_values = true)]
    voltages: Option<String>,
    /// Override any config key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Simulation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Simulation(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<simadc_core::Error> for Failure {
    fn from(e: simadc_core::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Simulation(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn load_config(cli: &Cli) -> Result<SimConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config(format!("`{}` needs --config <file>", cli.kind.name())))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut entries = Entries::parse(&text)?;

    let mut set = |k: &str, v: String| entries.set(k, &v);
    if let Some(s) = cli.seed {
        set("seed", s.to_string())?;
    }
    if let Some(b) = cli.bits {
        set("bits", b.to_string())?;
    }
    if let Some(t) = cli.ts {
        set("t_s", t.to_string())?;
    }
    if let Some(d) = cli.duration {
        let key = match cli.kind {
            Kind::Trace => "trace_duration",
            Kind::Dwell | Kind::Arrhenius => "dwell_duration",
            k => return Err(Failure::Config(format!("--duration does not apply to `{}`", k.name()))),
        };
        set(key, d.to_string())?;
    }
    if let Some(v) = &cli.voltages {
        let key = match cli.kind {
            Kind::Trace => "trace_voltages",
            Kind::Sweep => "sweep_voltages",
            Kind::Psw => "psw_voltages",
            Kind::Dwell => "dwell_voltage",
            k => return Err(Failure::Config(format!("--voltages does not apply to `{}`", k.name()))),
        };
        set(key, v.clone())?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        set(k.trim(), v.trim().to_string())?;
    }
    Ok(SimConfig::from_entries(&entries)?)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    if workers == Some(0) {
        return Err(Failure::Config("--workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Simulation(format!("thread pool: {e}")))
}

fn emit_plots(dir: &Path) -> Result<Vec<String>, Failure> {
    let mut names: Vec<String> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(io_err(dir, e)),
    };
    names.sort();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let scripts = plots::scripts_for(&refs);
    if scripts.is_empty() {
        return Err(Failure::Io(format!(
            "{}: no experiment CSVs found; expected one of: {}",
            dir.display(),
            plots::expected_inputs().join(", ")
        )));
    }
    output::write_all(dir, &scripts).map_err(|e| io_err(dir, e))?;
    Ok(scripts.into_iter().map(|a| a.name).collect())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.kind == Kind::Plots {
        for name in emit_plots(&cli.out)? {
            println!("{}", cli.out.join(name).display());
        }
        return Ok(());
    }
    let cfg = load_config(cli)?;
    let pool = pool(cli.workers)?;
    let start = Instant::now();
    let mut artifacts: Vec<Artifact> = pool.install(|| experiment::run(cli.kind, &cfg))?;
    let info = output::RunInfo {
        kind: cli.kind.name(),
        config_path: &cli.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        seed: cfg.integrator.seed,
        workers: pool.current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.resolved(),
    };
    let manifest = output::manifest(&info, &artifacts);
    artifacts.push(Artifact::new(output::MANIFEST, manifest));
    output::write_all(&cli.out, &artifacts).map_err(|e| io_err(&cli.out, e))?;
    if cli.kind == Kind::Report {
        print!("{}", experiment::derived_csv(&cfg)?);
    }
    for a in &artifacts {
        eprintln!("wrote {}", cli.out.join(&a.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(msg) | Failure::Simulation(msg) | Failure::Io(msg)) = &f;
            eprintln!("simadc: {msg}");
            ExitCode::from(f.code())
        }
    }
}
