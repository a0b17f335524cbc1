#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affctl::chain_sets::{
    build_chain, escape_certificate, stress_certificate, validate_chain, StressSummary,
};
use affctl::control_sets::{control_set_at, g0_region, sweep, FiberRow};
use affctl::dynamics::trajectory;
use affctl::extremal::{boundary_curves, envelope_lines};
use affctl::reachability_oracle::{approx_controllability_check, control_trace, reach_trace};
use affctl::{
    AffineLine, ChainDescriptor, ChainReport, ControlWord, EscapeCertificate, ExtremalData,
    G0Region, GroupElement, System, SystemSpec,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_VALIDATION: u8 = 2;
const EXIT_REGIME: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "affctl",
    version,
    about = "Control sets and chain control sets of linear systems on Aff(2,R)"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// System description (JSON: a, d, g_coeffs, u_min, u_max)
    #[arg(long, global = true)]
    system: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized stress tests
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regime, extremal data, boundary lines and G0
    Describe,
    /// Trajectory of a point under a control word
    Simulate {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: GroupElement,
        /// Comma-separated controls
        #[arg(long, allow_hyphen_values = true, conflicts_with = "u")]
        word: Option<String>,
        /// Constant control, used with --steps
        #[arg(long, allow_hyphen_values = true)]
        u: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Control sets on one fiber or a sweep of fibers
    ControlSet {
        #[arg(long, conflicts_with_all = ["x_min", "x_max"])]
        x: Option<f64>,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Build an (epsilon, min_time)-controlled chain
    Chain {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: GroupElement,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        to: GroupElement,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        min_time: usize,
    },
    /// Validate a chain file; exit status 4 if it fails
    Verify {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Escape certificate for a point outside E, with a stress test
    Certificate {
        #[arg(long)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long)]
        eps0: Option<f64>,
        #[arg(long, default_value_t = 100)]
        attempts: usize,
        #[arg(long, default_value_t = 50)]
        max_hops: usize,
    },
    /// Reach (or control) interval trace on a fiber
    Oracle {
        #[arg(long)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        /// Trace the sets that can reach y instead
        #[arg(long)]
        backward: bool,
    },
    /// Sample approximate controllability inside the control set of a fiber
    Check {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Core(affctl::Error),
    Input(String),
    Verify(String),
}

impl From<affctl::Error> for Failure {
    fn from(e: affctl::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_regime() => EXIT_REGIME,
            Failure::Core(_) | Failure::Input(_) => EXIT_VALIDATION,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(msg) => write!(f, "{msg}"),
            Failure::Verify(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

type Outcome = Result<(), Failure>;

fn parse_point(s: &str) -> Result<GroupElement, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y] = parts.as_slice() else {
        return Err(format!("expected `x,y`, got `{s}`"));
    };
    let x: f64 = x.parse().map_err(|e| format!("bad x `{x}`: {e}"))?;
    let y: f64 = y.parse().map_err(|e| format!("bad y `{y}`: {e}"))?;
    GroupElement::new(x, y).map_err(|e| e.to_string())
}

fn parse_word(s: &str) -> Result<ControlWord, Failure> {
    if s.trim().is_empty() {
        return Ok(ControlWord::empty());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Input(format!("bad control `{v}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(ControlWord::new)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(common: &Common) -> Result<System, Failure> {
    let path = common
        .system
        .as_ref()
        .ok_or_else(|| Failure::Input("--system <path> is required".into()))?;
    let spec: SystemSpec = read_json(path)?;
    Ok(System::from_spec(&spec)?)
}

struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn write(&self, bytes: &[u8]) -> Outcome {
        match &self.out {
            Some(path) => fs::write(path, bytes)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
            None => io::stdout()
                .write_all(bytes)
                .map_err(|e| Failure::Input(e.to_string())),
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Outcome {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
        text.push('\n');
        self.write(text.as_bytes())
    }

    fn csv<T: Serialize>(&self, rows: impl IntoIterator<Item = T>) -> Outcome {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)
                .map_err(|e| Failure::Input(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
        self.write(&bytes)
    }
}

#[derive(Serialize)]
struct Description {
    system: SystemSpec,
    regime: &'static str,
    extremal: ExtremalData,
    /// eta and mu, for |d| < 1
    boundary_curves: Option<[AffineLine; 2]>,
    /// Edges of E, for |d| < 1
    envelope: Option<[AffineLine; 2]>,
    g0: Option<G0Region>,
}

#[derive(Serialize)]
struct StateRow {
    k: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct CertificateOutput {
    certificate: EscapeCertificate,
    seed: u64,
    stress: StressSummary,
}

#[derive(Serialize)]
struct VerifyOutput {
    chain: PathBuf,
    report: ChainReport,
}

fn run(cli: Cli) -> Outcome {
    let common = &cli.common;
    if !(common.tol >= 0.0) {
        return Err(Failure::Input(format!(
            "--tol must be non-negative, got {}",
            common.tol
        )));
    }
    let sink = Sink {
        out: common.out.clone(),
    };
    let format = |default: Format| common.format.unwrap_or(default);
    let json_only = |cmd: &str| match common.format {
        Some(Format::Csv) => Err(Failure::Input(format!("`{cmd}` emits JSON only"))),
        _ => Ok(()),
    };
    match &cli.command {
        Command::Describe => {
            json_only("describe")?;
            let sys = load_system(common)?;
            let contractive = sys.regime().is_contractive();
            let report = Description {
                system: sys.spec(),
                regime: sys.regime().tag(),
                extremal: *sys.extremal(),
                boundary_curves: contractive
                    .then(|| boundary_curves(&sys).map(|(e, m)| [e, m]))
                    .transpose()?,
                envelope: contractive
                    .then(|| envelope_lines(&sys).map(|(u, l)| [u, l]))
                    .transpose()?,
                g0: (sys.regime() == affctl::DRegime::UnitPositive)
                    .then(|| g0_region(&sys))
                    .transpose()?,
            };
            eprintln!("regime: {} (d = {})", sys.regime(), sys.d());
            sink.json(&report)
        }
        Command::Simulate {
            from,
            word,
            u,
            steps,
        } => {
            let sys = load_system(common)?;
            let word = match (word, u) {
                (Some(w), _) => parse_word(w)?,
                (None, Some(u)) => {
                    let steps = steps.ok_or_else(|| Failure::Input("--u needs --steps".into()))?;
                    ControlWord::constant(*u, steps)
                }
                (None, None) => {
                    return Err(Failure::Input("give --word or --u with --steps".into()))
                }
            };
            let k = steps.unwrap_or(word.len());
            let states = trajectory(&sys, from, &word, k)?;
            match format(Format::Csv) {
                Format::Csv => sink.csv(states.iter().enumerate().map(|(k, s)| StateRow {
                    k,
                    x: s.x(),
                    y: s.y(),
                })),
                Format::Json => sink.json(&states),
            }
        }
        Command::ControlSet {
            x,
            x_min,
            x_max,
            step,
        } => {
            let sys = load_system(common)?;
            let descs = match (x, x_min, x_max) {
                (Some(x), _, _) => vec![control_set_at(&sys, *x)?],
                (None, Some(lo), Some(hi)) => sweep(&sys, *lo, *hi, *step)?,
                _ => {
                    return Err(Failure::Input(
                        "give --x or both --x-min and --x-max".into(),
                    ))
                }
            };
            match format(Format::Csv) {
                Format::Csv => sink.csv(descs.iter().map(FiberRow::from)),
                Format::Json => sink.json(&descs),
            }
        }
        Command::Chain {
            from,
            to,
            epsilon,
            min_time,
        } => {
            json_only("chain")?;
            let sys = load_system(common)?;
            let chain = build_chain(&sys, from, to, *epsilon, *min_time)?;
            sink.json(&chain)
        }
        Command::Verify { chain } => {
            json_only("verify")?;
            let sys = load_system(common)?;
            let descriptor: ChainDescriptor = read_json(chain)?;
            let report = validate_chain(&sys, &descriptor)?;
            let pass = report.pass;
            sink.json(&VerifyOutput {
                chain: chain.clone(),
                report,
            })?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verify(format!(
                    "{} does not validate",
                    chain.display()
                )))
            }
        }
        Command::Certificate {
            x,
            y,
            eps0,
            attempts,
            max_hops,
        } => {
            json_only("certificate")?;
            let sys = load_system(common)?;
            let target = GroupElement::new(*x, *y)?;
            let certificate = escape_certificate(&sys, &target, *eps0)?;
            let stress = stress_certificate(&sys, &certificate, *attempts, *max_hops, common.seed)?;
            let pass = stress.pass;
            sink.json(&CertificateOutput {
                certificate,
                seed: common.seed,
                stress,
            })?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verify(
                    "a perturbed chain reached the target".into(),
                ))
            }
        }
        Command::Oracle {
            x,
            y,
            horizon,
            backward,
        } => {
            let sys = load_system(common)?;
            let trace = if *backward {
                control_trace(&sys, *x, *y, *horizon)?
            } else {
                reach_trace(&sys, *x, *y, *horizon)?
            };
            match format(Format::Csv) {
                Format::Csv => sink.csv(trace.rows()),
                Format::Json => sink.json(&trace),
            }
        }
        Command::Check { x, samples } => {
            json_only("check")?;
            let sys = load_system(common)?;
            let report = approx_controllability_check(&sys, *x, *samples, common.tol)?;
            let pass = report.pass;
            sink.json(&report)?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verify(format!(
                    "fiber x = {x} is not approximately controllable"
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
