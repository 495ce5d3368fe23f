// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpm_cli::config::Switch;
use cpm_cli::sweep::parse_values;
use cpm_cli::{exit, feasibility, run, sweep, CliError, Report, SweepSpec, WorkloadConfig};

/// `expected` vs `actual` at the first divergence, for stderr.
fn mismatch(r: &Report) -> String {
    match &r.oracle.first_divergence {
        Some(d) => format!(
            "oracle mismatch in {} at {:?}: expected {}, got {}",
            r.workload, d.path, d.expected, d.actual
        ),
        None => format!("oracle mismatch in {}", r.workload),
    }
}
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "cpm",
    version,
    about = "Run workloads on the simulated memories"
)]
struct Cli {
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's oracle switch.
    #[arg(long, global = true, value_enum)]
    oracle: Option<OnOff>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock time in reports (they stop being reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one workload config.
    Run { config: PathBuf },
    /// Run a config once per value of a parameter.
    Sweep {
        config: PathBuf,
        /// Key to vary; `nx,ny` moves both together.
        #[arg(long)]
        param: String,
        /// Comma-separated values; `2^k` is accepted.
        #[arg(long)]
        values: String,
        /// Keys to minimize macro cycles over in each row.
        #[arg(long)]
        min_over: Option<String>,
        /// Candidate values for --min-over.
        #[arg(long)]
        candidates: Option<String>,
        /// Fit log(macro cycles) against log(parameter).
        #[arg(long)]
        fit: bool,
    },
    /// Delay of a broadcast routing layer.
    Feasibility {
        /// Layer size in meters.
        #[arg(long = "L")]
        l: f64,
        /// Oxide thickness in meters.
        #[arg(long = "D")]
        d: f64,
        /// Copper thickness in meters.
        #[arg(long = "T")]
        t: f64,
        /// Delay budget in seconds; reports the largest layer meeting it.
        #[arg(long)]
        budget: Option<f64>,
    },
}

#[derive(Serialize)]
struct FeasibilityReport {
    l_m: f64,
    d_m: f64,
    t_m: f64,
    delay_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_l_m: Option<f64>,
}

fn load(cli: &Cli, path: &PathBuf) -> Result<WorkloadConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = WorkloadConfig::parse(&text)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.oracle {
        cfg.oracle = match o {
            OnOff::On => Switch::On,
            OnOff::Off => Switch::Off,
        };
    }
    Ok(cfg)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_rows(lead: &[&str], rows: &[(Vec<String>, &Report)]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header: Vec<&str> = lead.to_vec();
    header.extend([
        "workload",
        "result_digest",
        "macro_cycles",
        "micro_cycles",
        "exclusive_ops",
        "oracle",
        "wall_time_ms",
    ]);
    let io = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(&header).map_err(io)?;
    for (cells, r) in rows {
        let mut rec = cells.clone();
        rec.extend([
            r.workload.clone(),
            r.result_digest.clone(),
            r.macro_cycles.to_string(),
            r.micro_cycles.to_string(),
            r.exclusive_ops.to_string(),
            serde_json::to_value(r.oracle.status)
                .unwrap()
                .as_str()
                .unwrap_or_default()
                .into(),
            r.wall_time_ms.map(|t| t.to_string()).unwrap_or_default(),
        ]);
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// The report text and, when an oracle disagreed, what to print about it.
fn execute(cli: &Cli) -> Result<(String, Option<String>), CliError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(cli, config)?;
            let (report, _) = run(&cfg, cli.timing)?;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => csv_rows(&[], &[(vec![], &report)])?,
            };
            Ok((text, (!report.passed()).then(|| mismatch(&report))))
        }
        Command::Sweep {
            config,
            param,
            values,
            min_over,
            candidates,
            fit,
        } => {
            let cfg = load(cli, config)?;
            let split = |s: &str| s.split(',').map(|p| p.trim().to_string()).collect();
            let spec = SweepSpec {
                params: split(param),
                values: parse_values(values)?,
                min_over: min_over.as_deref().map(split).unwrap_or_default(),
                candidates: candidates.as_deref().map(parse_values).transpose()?,
                fit: *fit,
                timing: cli.timing,
            };
            let table = sweep(&cfg, &spec)?;
            let text = match cli.format {
                Format::Json => json(&table),
                Format::Csv => {
                    let mut lead = vec![table.param.as_str()];
                    lead.extend(spec.min_over.iter().map(String::as_str));
                    let rows: Vec<(Vec<String>, &Report)> = table
                        .rows
                        .iter()
                        .map(|r| {
                            let mut cells = vec![r.value.to_string()];
                            cells.extend(r.chosen.values().map(u64::to_string));
                            (cells, &r.report)
                        })
                        .collect();
                    let mut s = csv_rows(&lead, &rows)?;
                    if let Some(f) = table.fit {
                        s.push_str(&format!(
                            "# exponent {} intercept {}\n",
                            f.exponent, f.intercept
                        ));
                    }
                    s
                }
            };
            let failed = table.rows.iter().find(|r| !r.report.passed());
            Ok((
                text,
                failed.map(|r| format!("{} = {}: {}", table.param, r.value, mismatch(&r.report))),
            ))
        }
        Command::Feasibility { l, d, t, budget } => {
            let rep = FeasibilityReport {
                l_m: *l,
                d_m: *d,
                t_m: *t,
                delay_s: feasibility::delay(*l, *d, *t)?,
                budget_s: *budget,
                max_l_m: budget
                    .map(|b| feasibility::max_size(b, *d, *t))
                    .transpose()?,
            };
            let text = match cli.format {
                Format::Json => json(&rep),
                Format::Csv => {
                    let mut s = String::from("l_m,d_m,t_m,delay_s,budget_s,max_l_m\n");
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    s.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        rep.l_m,
                        rep.d_m,
                        rep.t_m,
                        rep.delay_s,
                        opt(rep.budget_s),
                        opt(rep.max_l_m)
                    ));
                    s
                }
            };
            Ok((text, None))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, failure)) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(exit::CONFIG as u8);
            }
            match failure {
                None => ExitCode::from(exit::OK as u8),
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(exit::ORACLE_FAIL as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}
