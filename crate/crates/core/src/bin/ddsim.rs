use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ddsim::engine::FidelityTrace;
use ddsim::experiment::{check_experiment, run_file, ExperimentConfig, Manifest};
use ddsim::groups::{parse_group, Path};
use ddsim::model::{build_hamiltonian, SpinChainParams};
use ddsim::plot::{render_svg, PlotStyle};
use ddsim::schedule::{parse_labels, ProtocolKind};
use ddsim::search::{greedy_search, SearchConfig};
use ddsim::verify::{verify, VerifyRequest};
use ddsim::{Error, Result};

#[derive(Parser)]
#[command(name = "ddsim", version, about = "Dynamical-decoupling sequences on spin chains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct System {
    /// Number of qubits.
    #[arg(short, long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// One-body offsets, comma separated, one per site.
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    /// Dipolar 1/r³ couplings instead of nearest neighbours.
    #[arg(long)]
    cubic: bool,
}

impl System {
    fn params(&self) -> SpinChainParams {
        let p = SpinChainParams::nn(self.n, self.j, self.alpha).with_linear_terms(self.deltas.clone());
        if self.cubic { p.cubic() } else { p }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment config; writes one CSV per curve and manifest.toml.
    Run {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Validate the config and list its curves without running them.
        #[arg(long)]
        check: bool,
    },
    /// Print H̄(0..2) for one cycle and check known closed forms.
    Verify {
        #[arg(short, long)]
        protocol: String,
        #[arg(short, long, default_value = "GZY")]
        group: String,
        /// `[0,2,1,3]` or `1324`.
        #[arg(long)]
        path: Option<String>,
        /// Explicit 1-based label stream (for ALGOR_REPLAY).
        #[arg(long)]
        labels: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[command(flatten)]
        system: System,
    },
    /// Render CSV traces (or every curve of a run directory) as SVG.
    Plot {
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        no_band: bool,
    },
    /// Greedy path search; prints the committed stream.
    Search {
        #[arg(short, long, default_value = "GZY")]
        group: String,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 18)]
        cycles: usize,
        /// Write the stream here as well.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Per-cycle fitness log (CSV).
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        system: System,
    },
    /// Build the RH2 completion table.
    Table {
        #[arg(short, long, default_value = "GZY")]
        group: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        system: System,
    },
}

fn write(path: &FsPath, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    fs::write(path, bytes).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn parse_path(text: &str) -> Result<Path> {
    if text.trim_start().starts_with('[') {
        Path::parse(text)
    } else {
        Path::new(parse_labels(text)?.iter().map(|l| l.wrapping_sub(1)).collect())
    }
}

/// Traces named on the command line; a directory means every curve in its manifest.
fn load_traces(inputs: &[PathBuf]) -> Result<Vec<FidelityTrace>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mpath = p.join("manifest.toml");
            let text = fs::read_to_string(&mpath).map_err(|e| Error::Io { path: mpath.clone(), source: e })?;
            let m: Manifest = toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", mpath.display())))?;
            for c in m.curves {
                let mut t = FidelityTrace::read_csv_file(&p.join(&c.file))?;
                t.name = c.label;
                out.push(t);
            }
        } else {
            out.push(FidelityTrace::read_csv_file(p)?);
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config, check: true, .. } => {
            let (cfg, _) = ExperimentConfig::load(&config)?;
            let base = config.parent().unwrap_or(FsPath::new("."));
            for e in check_experiment(&cfg, base)? {
                println!("{}\t{}\t{} realizations", e.label, e.protocol, e.n_realizations);
            }
            println!("{}: ok", cfg.name);
        }
        Cmd::Run { config, out, .. } => {
            let out = out.unwrap_or_else(|| {
                PathBuf::from("results").join(config.file_stem().map(|s| s.to_os_string()).unwrap_or_default())
            });
            let m = run_file(&config, &out)?;
            println!("{}: {} curves, {} sweeps in {:.1}s -> {}", m.name, m.curves.len(), m.sweeps.len(), m.wall_time_s, out.display());
            println!("config hash {}", m.config_hash);
        }
        Cmd::Verify { protocol, group, path, labels, dt, system } => {
            let kind: ProtocolKind = protocol.parse()?;
            let req = VerifyRequest {
                protocol: kind,
                group,
                path: path.as_deref().map(parse_path).transpose()?,
                system: system.params(),
                dt,
                labels: labels.as_deref().map(parse_labels).transpose()?,
            };
            let report = verify(&req)?;
            print!("{report}");
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Plot { inputs, out, title, no_band } => {
            let traces = load_traces(&inputs)?;
            let style = PlotStyle { title, sigma_band: !no_band, ..PlotStyle::default() };
            write(&out, render_svg(&traces, &style)?)?;
            println!("wrote {}", out.display());
        }
        Cmd::Search { group, dt, cycles, out, log, system } => {
            let params = system.params();
            let g = parse_group(&group, params.n_qubits)?;
            let cfg = SearchConfig::new(g, build_hamiltonian(&params)?, dt, cycles);
            let r = greedy_search(&cfg)?;
            println!("{}", r.dash_notation());
            if let Some(p) = out {
                write(&p, format!("{}\n", r.dash_notation()))?;
            }
            if let Some(p) = log {
                let mut buf = Vec::new();
                r.write_log_csv(&mut buf)?;
                write(&p, buf)?;
            }
        }
        Cmd::Table { group, out, system } => {
            let params = system.params();
            let g = parse_group(&group, params.n_qubits)?;
            let t = ddsim::aht::build_rh2_completion_table(&g, &build_hamiltonian(&params)?)?;
            match out {
                Some(p) => {
                    write(&p, t.to_text())?;
                    println!("{} starts -> {}", t.len(), p.display());
                }
                None => print!("{}", t.to_text()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors are configuration errors (1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
