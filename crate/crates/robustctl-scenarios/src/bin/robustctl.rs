use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robustctl::numerics::Complex;
use robustctl::synthesis::{
    design_gain_matrix, robust_riccati_gain, sip_region_feasible, RobustConfig, RobustOutcome, UncertaintyBounds,
    TUNING_HINT,
};
use robustctl::{Mat, Vector};
use robustctl_scenarios::matfile::read_matrices;
use robustctl_scenarios::run::THETA_MAX;
use robustctl_scenarios::{emit, emit_table, run_scenario, Format, Overrides, ScenarioId};

#[derive(Parser)]
#[command(name = "robustctl", version, about = "Run control scenarios, emit eigenvalue tables and design gains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trajectory.
    Run {
        scenario: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Override a tunable: dt, t_end, x0=a,b,..., x0[i], slide_rate, preview.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Write eigenvalue sweep table 1 or 2 as CSV.
    Table {
        which: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gain design from matrix files.
    #[command(subcommand)]
    Design(Design),
}

#[derive(Subcommand)]
enum Design {
    /// Pole placement. The file holds A then B, separated by a blank line.
    PolePlace {
        #[arg(long)]
        matrices: PathBuf,
        /// Comma-separated poles, e.g. `-4,-4+2i,-4-2i,-4`.
        #[arg(long, allow_hyphen_values = true)]
        poles: String,
    },
    /// Robust Riccati gain. The file holds A, B, A2, B2 (nominal model and a
    /// bounding model); without a file the pendulum instance is used.
    RobustRiccati {
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[arg(long, default_value_t = 300.0)]
        a_bar: f64,
        #[arg(long, default_value_t = 300.0)]
        b_bar: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        r: f64,
    },
    /// Closed-form pendulum region check for a 3-entry gain.
    RegionCheck {
        #[arg(long, allow_hyphen_values = true)]
        gain: String,
        #[arg(long, default_value_t = 10.0 * THETA_MAX.sin() / THETA_MAX)]
        a_lo: f64,
        #[arg(long, default_value_t = 10.0)]
        a_hi: f64,
        #[arg(long, default_value_t = THETA_MAX.cos())]
        b_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        b_hi: f64,
    },
}

fn parse_complex(tok: &str) -> Result<Complex<f64>, String> {
    let t = tok.trim();
    let bad = || format!("bad pole `{t}`");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im_str = &body[split..];
    let im = match im_str {
        "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex::new(re, im))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"))).collect()
}

fn fmt_vec(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

enum Outcome {
    Ok,
    Mismatch(String),
}

fn run(cli: Cli) -> Result<Outcome, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { scenario, out, format, set } => {
            let id: ScenarioId = scenario.parse()?;
            let format: Format = format.parse()?;
            let mut overrides = Overrides::default();
            for pair in &set {
                overrides.set(pair)?;
            }
            let (traj, report) = run_scenario(id, &overrides)?;
            let path = out.join(format!("{id}.{}", format.extension()));
            emit(&traj, &report, format, &path)?;
            println!("{id}: {} at t = {:.3} s -> {}", report.terminal_event, report.elapsed_sim_time, path.display());
            if let Some(h) = report.min_h {
                println!("min h = {h:.6e}");
            }
            if set.is_empty() && report.terminal_event != id.expected_event() {
                return Ok(Outcome::Mismatch(format!(
                    "{id}: expected {}, got {}",
                    id.expected_event(),
                    report.terminal_event
                )));
            }
            Ok(Outcome::Ok)
        }
        Command::Table { which, out } => {
            emit_table(which, &out)?;
            println!("table {which} -> {}", out.display());
            Ok(Outcome::Ok)
        }
        Command::Design(Design::PolePlace { matrices, poles }) => {
            let ms = read_matrices(&matrices)?;
            let [a, b] = <[Mat; 2]>::try_from(ms).map_err(|_| "expected two matrices (A, B)")?;
            let poles = poles.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            let g = design_gain_matrix(&a, &b, &poles)?;
            println!("K = {}", fmt_vec(&g.k));
            if let Some(w) = g.warning {
                eprintln!("warning: {w}");
            }
            Ok(Outcome::Ok)
        }
        Command::Design(Design::RobustRiccati { matrices, a_bar, b_bar, epsilon, r }) => {
            let (a, b, a2, b2) = match matrices {
                Some(path) => {
                    let ms = read_matrices(&path)?;
                    let [a, b, a2, b2] = <[Mat; 4]>::try_from(ms).map_err(|_| "expected four matrices (A, B, A2, B2)")?;
                    (a, b, a2, b2)
                }
                None => {
                    let (a, b) = robustctl::models::sip_partial_at(0.0, 1.0, 10.0);
                    let (a2, b2) = robustctl::models::sip_partial_at(THETA_MAX, 1.0, 10.0);
                    (a, b, a2, b2)
                }
            };
            let bounds = UncertaintyBounds::between(&a, &b, &a2, &b2);
            let n = a.nrows();
            let cfg = RobustConfig {
                a_bar,
                b_bar,
                epsilon,
                q: Mat::identity(n, n),
                r: Mat::identity(b.ncols(), b.ncols()) * r,
            };
            match robust_riccati_gain(&a, &b, &bounds, &cfg)? {
                RobustOutcome::Solved(d) => {
                    println!("P = {:.4}", d.p);
                    println!("K = {}", fmt_vec(&d.gain.k));
                    Ok(Outcome::Ok)
                }
                RobustOutcome::NoSolution { reason, .. } => Ok(Outcome::Mismatch(format!("{reason}; {TUNING_HINT}"))),
            }
        }
        Command::Design(Design::RegionCheck { gain, a_lo, a_hi, b_lo, b_hi }) => {
            let k = Vector::from_vec(parse_list(&gain)?);
            let rc = sip_region_feasible(&k, a_lo, a_hi, b_lo, b_hi)?;
            println!("k2 bound = {:.4}, k1 bound = {:.4}, feasible = {}", rc.k2_bound, rc.k1_bound, rc.feasible);
            if rc.feasible {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::Mismatch("gain outside the robust region".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
