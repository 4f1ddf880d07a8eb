use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chessgeo_core::format::{line_plot_svg, num, round_sig};
use chessgeo_core::geodesic::{geodesic_to_light_vertex, oracle_geodesic, LightVertex};
use chessgeo_core::homog::{phi_estimate, unit_ball, FinslerMetric};
use chessgeo_core::normlen::{delta, k_c, l_min, norm_len, CriticalTable};
use chessgeo_core::verify;

#[derive(Parser)]
#[command(name = "chessgeo", version, about = "Geodesics and homogenized metric of the two-valued chessboard")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Critical indices beta^c_k for k = 0..=max_k.
    Betac {
        #[arg(long, default_value_t = 7)]
        max_k: u32,
    },
    /// Samples of the normalized length l(t, beta).
    Normlen {
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 8.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Increments delta(k, beta) for k = 0..=max_k.
    Delta {
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 10)]
        max_k: u32,
    },
    /// k_c(beta) and the minimum l(2k_c, beta).
    Kc {
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Geodesic from the origin to the light vertex (2n + j, j).
    Geodesic {
        n: u32,
        j: u32,
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Use the discretized oracle with this refinement.
        #[arg(long)]
        oracle: Option<u32>,
    },
    /// Homogenized metric Phi_beta(x, y).
    Phi {
        #[arg(allow_hyphen_values = true)]
        x: f64,
        #[arg(allow_hyphen_values = true)]
        y: f64,
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Estimate through oracle distances at this scale.
        #[arg(long)]
        scale: Option<u32>,
        /// Oracle refinement for the estimate.
        #[arg(long)]
        oracle: Option<u32>,
    },
    /// Unit ball of Phi_beta.
    Ball {
        beta_pos: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Run the acceptance suite.
    Verify,
}

enum Status {
    Done,
    VerifyFailed,
}

fn pick_beta(positional: Option<f64>, flag: Option<f64>) -> Result<f64> {
    match (positional, flag) {
        (Some(a), Some(b)) if a != b => bail!("conflicting beta values {a} and {b}"),
        (Some(b), _) | (None, Some(b)) => Ok(b),
        (None, None) => bail!("beta is required (positional or --beta)"),
    }
}

fn format_or(format: Option<Format>, default: Format, allowed: &[Format], command: &str) -> Result<Format> {
    let f = format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("{command} does not support this output format");
    }
    Ok(f)
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(String, Status)> {
    use Format::*;
    let fmt = cli.format;
    let text = match cli.command {
        Command::Betac { max_k } => {
            let table = CriticalTable::compute(max_k)?;
            match format_or(fmt, Csv, &[Csv, Json], "betac")? {
                Json => json_text(&Value::Array(
                    table
                        .entries
                        .iter()
                        .map(|e| json!({ "k": e.k, "beta_c": round_sig(e.beta_c) }))
                        .collect(),
                )),
                _ => table.to_csv(),
            }
        }
        Command::Normlen {
            beta_pos,
            beta,
            t_max,
            step,
        } => {
            let beta = pick_beta(beta_pos, beta)?;
            if !(step > 0.0 && step.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
                bail!("need step > 0 and t-max >= 0");
            }
            let count = (t_max / step + 1e-9).floor() as usize;
            let series = (0..=count)
                .map(|i| {
                    let t = i as f64 * step;
                    Ok([t, norm_len(t, beta)?])
                })
                .collect::<Result<Vec<_>>>()?;
            match format_or(fmt, Csv, &[Csv, Json, Svg], "normlen")? {
                Svg => line_plot_svg(&series, 640.0, 400.0),
                Json => json_text(&json!({
                    "beta": round_sig(beta),
                    "points": series.iter().map(|p| [round_sig(p[0]), round_sig(p[1])]).collect::<Vec<_>>(),
                })),
                Csv => {
                    let mut out = String::from("t,l\n");
                    for [t, l] in &series {
                        out.push_str(&format!("{},{}\n", num(*t), num(*l)));
                    }
                    out
                }
            }
        }
        Command::Delta {
            beta_pos,
            beta,
            max_k,
        } => {
            let beta = pick_beta(beta_pos, beta)?;
            let rows = (0..=max_k)
                .map(|k| Ok((k, delta(k, beta)?)))
                .collect::<Result<Vec<_>>>()?;
            match format_or(fmt, Csv, &[Csv, Json], "delta")? {
                Json => json_text(&Value::Array(
                    rows.iter()
                        .map(|&(k, d)| json!({ "k": k, "delta": round_sig(d) }))
                        .collect(),
                )),
                _ => {
                    let mut out = String::from("k,delta\n");
                    for (k, d) in rows {
                        out.push_str(&format!("{k},{}\n", num(d)));
                    }
                    out
                }
            }
        }
        Command::Kc { beta_pos, beta } => {
            let beta = pick_beta(beta_pos, beta)?;
            let kc = k_c(beta)?;
            let lm = l_min(beta)?;
            match format_or(fmt, Csv, &[Csv, Json], "kc")? {
                Json => json_text(&json!({ "beta": round_sig(beta), "k_c": kc, "l_min": round_sig(lm) })),
                _ => format!("beta,k_c,l_min\n{},{kc},{}\n", num(beta), num(lm)),
            }
        }
        Command::Geodesic {
            n,
            j,
            beta_pos,
            beta,
            oracle,
        } => {
            let beta = pick_beta(beta_pos, beta)?;
            let result = match oracle {
                Some(refinement) => {
                    if refinement < 2 {
                        bail!("--oracle needs a refinement of at least 2");
                    }
                    oracle_geodesic([0.0, 0.0], LightVertex::new(n, j).point(), beta, refinement)?
                }
                None => geodesic_to_light_vertex(n, j, beta)
                    .context("pass --oracle N for a numeric geodesic")?,
            };
            match format_or(fmt, Json, &[Csv, Json, Svg], "geodesic")? {
                Svg => result.to_svg(),
                Csv => {
                    let mut out = String::from("x,y\n");
                    for p in &result.breakpoints {
                        out.push_str(&format!("{},{}\n", num(p[0]), num(p[1])));
                    }
                    out
                }
                Json => {
                    let mut s = result.to_json();
                    s.push('\n');
                    s
                }
            }
        }
        Command::Phi {
            x,
            y,
            beta_pos,
            beta,
            scale,
            oracle,
        } => {
            let beta = pick_beta(beta_pos, beta)?;
            let metric = FinslerMetric::new(beta)?;
            let closed = metric.known(x, y);
            let (value, bound, status) = match (closed, scale, oracle) {
                (Some(v), None, None) => (v, 0.0, "closed-form"),
                _ => {
                    let s = scale.unwrap_or(8);
                    let n = oracle.unwrap_or(64);
                    if s < 1 || n < 2 {
                        bail!("need --scale >= 1 and --oracle >= 2");
                    }
                    let est = phi_estimate(x, y, beta, s, n)?;
                    (est.value, est.error_bound, est.status.label())
                }
            };
            match format_or(fmt, Csv, &[Csv, Json], "phi")? {
                Json => json_text(&json!({
                    "x": round_sig(x),
                    "y": round_sig(y),
                    "beta": round_sig(beta),
                    "phi": round_sig(value),
                    "error_bound": round_sig(bound),
                    "status": status,
                })),
                _ => format!(
                    "x,y,beta,phi,error_bound,status\n{},{},{},{},{},{status}\n",
                    num(x),
                    num(y),
                    num(beta),
                    num(value),
                    num(bound)
                ),
            }
        }
        Command::Ball { beta_pos, beta } => {
            let beta = pick_beta(beta_pos, beta)?;
            let ball = unit_ball(beta)?;
            match format_or(fmt, Svg, &[Csv, Svg], "ball")? {
                Csv => ball.to_csv(),
                _ => ball.to_svg(),
            }
        }
        Command::Verify => {
            let report = verify::run_all();
            let status = if report.passed() {
                Status::Done
            } else {
                Status::VerifyFailed
            };
            let text = match format_or(fmt, Csv, &[Csv, Json], "verify")? {
                Json => json_text(&Value::Array(
                    report
                        .checks
                        .iter()
                        .map(|c| json!({ "id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail }))
                        .collect(),
                )),
                _ => report.render(),
            };
            return Ok((text, status));
        }
    };
    Ok((text, Status::Done))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out = cli.out.clone();
    match run(cli).and_then(|(text, status)| emit(&text, out.as_ref()).map(|_| status)) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::VerifyFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
