//! `ordsens` command-line front end.
//!
//! Exit codes: 0 success, 2 success with a nonclassicality flag raised,
//! 64 unreadable or malformed input, 65 invalid state or parameters,
//! 70 Fock truncation problem, 74 output could not be written.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ordsens::channels::{sweep_row, BathParams};
use ordsens::quasiprob::{entropy, entropy_derivative, fmt17, radial_profile, ws_grid};
use ordsens::report::{analyze, AnalysisConfig};
use ordsens::statespec::StateSpec;
use ordsens::{build_ladder, Error};

const EXIT_FLAGGED: u8 = 2;
const EXIT_PARSE: u8 = 64;
const EXIT_VALIDATION: u8 = 65;
const EXIT_TRUNCATION: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "ordsens", version, about = "Ordering sensitivity and nonclassicality witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON state specification.
    #[arg(long)]
    spec: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fock cutoff, overriding the state file and auto-sizing.
    #[arg(long)]
    dim: Option<usize>,
    /// Phase-space grid half extent R.
    #[arg(long)]
    extent: Option<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 256)]
    points: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full witness report as JSON.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Also write the state as a raw spec for exact re-ingestion.
        #[arg(long)]
        dump_state: Option<PathBuf>,
        /// Highest moment determinant order.
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
    /// s-ordered quasiprobability grid (or radial Wigner profile) as CSV.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// Emit the angular average `|alpha|,value` instead of the grid.
        #[arg(long)]
        radial: bool,
        /// Ordering parameter, s <= 0.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
    },
    /// s-ordered entropy, its derivative and the classical bound value.
    EntropyCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// S_o after a thermal beam-splitter bath, by both routes.
    ChannelSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated transmissivities in (0, 1].
        #[arg(long, value_delimiter = ',', default_value = "1,0.9,0.8,0.5")]
        lambda: Vec<f64>,
        /// Comma-separated bath photon numbers.
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        nbar: Vec<f64>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Truncation { .. } => EXIT_TRUNCATION,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

fn load_spec(path: &Path) -> Result<StateSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    StateSpec::from_json(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: Option<&Path>, data: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::new(EXIT_IO, format!("write failed: {e}"));
    match path {
        None => std::io::stdout().write_all(data.as_bytes()).map_err(io),
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(data.as_bytes()).map_err(io)?;
            tmp.persist(p).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

fn config_from(common: &Common) -> AnalysisConfig {
    AnalysisConfig { extent: common.extent, points: common.points, dim: common.dim, ..AnalysisConfig::default() }
}

fn cmd_analyze(common: &Common, dump_state: Option<&Path>, n_max: usize) -> Result<u8, Failure> {
    let spec = load_spec(&common.spec)?;
    let config = AnalysisConfig { n_max, ..config_from(common) };
    let (report, rho) = analyze(&spec, &config)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    if let Some(p) = dump_state {
        let raw = serde_json::to_string(&StateSpec::raw_from(&rho)).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        write_atomic(Some(p), &(raw + "\n"))?;
    }
    write_atomic(common.out.as_deref(), &text)?;
    Ok(if report.any_flag() { EXIT_FLAGGED } else { 0 })
}

fn cmd_wigner(common: &Common, radial: bool, s: f64) -> Result<u8, Failure> {
    let spec = load_spec(&common.spec)?;
    let (rho, _) = spec.build(common.dim)?;
    let config = config_from(common);
    let mut text = String::new();
    if radial {
        let n = common.points;
        let extent = match config.extent {
            Some(r) => r,
            None => AnalysisConfig::default().grid_for(&rho)?.half_extent,
        };
        if n < 2 || !(extent > 0.0) {
            return Err(Failure::new(EXIT_VALIDATION, "radial profile needs points >= 2 and extent > 0"));
        }
        let radii: Vec<f64> = (0..n).map(|i| extent * i as f64 / (n - 1) as f64).collect();
        let values = radial_profile(&rho, &radii);
        let _ = writeln!(text, "# radial R={} n={}", fmt17(extent), n);
        for (r, v) in radii.iter().zip(values) {
            let _ = writeln!(text, "{},{}", fmt17(*r), fmt17(v));
        }
    } else {
        let w = ws_grid(&rho, s, &config.grid_for(&rho)?)?;
        let mut buf = Vec::new();
        w.write_csv(&mut buf).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        text = String::from_utf8(buf).expect("ascii csv");
    }
    write_atomic(common.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_entropy_curve(common: &Common, s_min: f64, s_max: f64, steps: usize) -> Result<u8, Failure> {
    if steps == 0 || !(s_min <= s_max) {
        return Err(Failure::new(EXIT_VALIDATION, "need s_min <= s_max and steps >= 1"));
    }
    let spec = load_spec(&common.spec)?;
    let (rho, _) = spec.build(common.dim)?;
    let mut text = String::from("s,H,Hprime,bound_value\n");
    let mut failed = None;
    for k in 0..steps {
        let s = if steps == 1 { s_min } else { s_min + (s_max - s_min) * k as f64 / (steps - 1) as f64 };
        match (entropy(&rho, s), entropy_derivative(&rho, s)) {
            (Ok(h), Ok(hp)) => {
                let _ = writeln!(text, "{},{},{},{}", fmt17(s), fmt17(h), fmt17(hp), fmt17(-(1.0 - s) * hp));
            }
            (Err(e), _) | (_, Err(e)) => {
                let _ = writeln!(text, "{},nan,nan,nan", fmt17(s));
                failed.get_or_insert(e);
            }
        }
    }
    write_atomic(common.out.as_deref(), &text)?;
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(0),
    }
}

fn cmd_channel_sweep(common: &Common, lambdas: &[f64], nbars: &[f64]) -> Result<u8, Failure> {
    let spec = load_spec(&common.spec)?;
    let (rho, _) = spec.build(common.dim)?;
    let ops = build_ladder(rho.dim())?;
    let so_in = ordsens::ordsens::so_commutator(&rho, &ops)?.so;
    let mut text = String::from("lambda,nbar,so_in,so_out,bound,so_out_oracle\n");
    for &lambda in lambdas {
        for &nbar in nbars {
            let row = sweep_row(&rho, so_in, &BathParams::new(lambda, nbar)?)?;
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                fmt17(row.lambda),
                fmt17(row.nbar),
                fmt17(row.so_in),
                fmt17(row.so_out),
                fmt17(row.bound),
                fmt17(row.so_out_oracle)
            );
        }
    }
    write_atomic(common.out.as_deref(), &text)?;
    Ok(0)
}

fn configure_threads() {
    if let Some(n) = std::env::var("ORDSENS_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Analyze { common, dump_state, n_max } => cmd_analyze(common, dump_state.as_deref(), *n_max),
        Command::Wigner { common, radial, s } => cmd_wigner(common, *radial, *s),
        Command::EntropyCurve { common, s_min, s_max, steps } => cmd_entropy_curve(common, *s_min, *s_max, *steps),
        Command::ChannelSweep { common, lambda, nbar } => cmd_channel_sweep(common, lambda, nbar),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("ordsens: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
