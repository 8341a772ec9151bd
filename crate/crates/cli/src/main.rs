//! Experiment harness: coefficient inspection, fixed-step accuracy tables,
//! adaptive work-precision sweeps, and stability-region exports.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 when any sweep row
//! fails. `GEPTRKN_THREADS` caps the thread pool used for stability scans.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geptrkn::collocation::{CollocationScheme, EmbeddedScheme, NodeSet};
use geptrkn::experiments::{
    run_convergence_table, run_work_precision, scheme_report, work_precision_csv,
};
use geptrkn::methods;
use geptrkn::problems::{problem_by_name, OdeProblem};
use geptrkn::serialize::scheme_to_json;
use geptrkn::stability::scan_region;

#[derive(Parser)]
#[command(
    name = "geptrkn",
    about = "Two-step explicit collocation Runge-Kutta-Nystrom experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a coefficient report (orders, residuals, weights) for a method
    Inspect {
        /// Method name (geptrkn5..geptrkn8, geptrkn54, pairs like geptrkn52,
        /// or custom:c1,c2,...)
        #[arg(long)]
        method: String,
        /// Emit the machine-readable scheme document instead of the report
        #[arg(long)]
        json: bool,
    },
    /// Fixed-step accuracy table: log10 of the max grid error per (h, method)
    Converge {
        /// Comma-separated method names; repeatable. A custom:c1,c2,...
        /// method needs its own --method occurrence.
        #[arg(long, default_value = "geptrkn5,geptrkn6,geptrkn7,geptrkn8")]
        method: Vec<String>,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated step sizes; accepts 0.125, 1/8, and 1/2^3 forms
        #[arg(
            long = "h-list",
            default_value = "1/2^2,1/2^3,1/2^4,1/2^5,1/2^6,1/2^7,1/2^8,1/2^9,1/2^10"
        )]
        h_list: String,
        /// Also write the table as CSV to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adaptive work-precision sweep: error at t_end vs cost, one row per tolerance
    Sweep {
        /// Method or pair name (the embedded companion uses the first s-1 stages)
        #[arg(long, default_value = "geptrkn52")]
        method: String,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated tolerances
        #[arg(
            long = "tol-list",
            default_value = "1e-4,1e-5,1e-6,1e-7,1e-8,1e-9,1e-10"
        )]
        tol_list: String,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral-radius scan of the stability matrix over [zmin,0] x [numin,0]
    Stability {
        #[arg(long, default_value = "geptrkn5")]
        method: String,
        /// Lattice size as NxM
        #[arg(long, default_value = "400x400")]
        grid: String,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        zmin: f64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        numin: f64,
        /// Write the z,nu,rho CSV here (stdout when omitted); the JSON
        /// summary always goes to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem name: line, tele, or vand
    #[arg(long, default_value = "line")]
    problem: String,
    /// Numeric parameter override, repeatable (e.g. --param mu=1.5)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

impl ProblemArgs {
    fn resolve(&self) -> Result<OdeProblem, String> {
        let mut map = BTreeMap::new();
        for entry in &self.params {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| format!("--param '{entry}' is not KEY=VALUE"))?;
            let value: f64 = value
                .parse()
                .map_err(|_| format!("--param '{entry}' value is not numeric"))?;
            map.insert(key.to_string(), value);
        }
        problem_by_name(&self.problem, &map).map_err(|e| e.to_string())
    }
}

fn resolve_scheme(name: &str) -> Result<CollocationScheme, String> {
    if let Some(list) = name.strip_prefix("custom:") {
        let nodes: Vec<f64> = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad custom node '{v}'"))
            })
            .collect::<Result<_, _>>()?;
        let nodes = NodeSet::new(nodes).map_err(|e| e.to_string())?;
        return CollocationScheme::from_nodes(nodes).map_err(|e| e.to_string());
    }
    methods::method_scheme(name).map_err(|e| e.to_string())
}

fn resolve_pair(name: &str) -> Result<(CollocationScheme, EmbeddedScheme), String> {
    let scheme = resolve_scheme(name)?;
    let embedded = scheme.embedded_default().map_err(|e| e.to_string())?;
    Ok((scheme, embedded))
}

/// Accepts `0.125`, `1/8`, and `1/2^3`.
fn parse_step(text: &str) -> Result<f64, String> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad step '{text}'"))?;
        let den = den.trim();
        let den_value: f64 = if let Some((base, exp)) = den.split_once('^') {
            let base: f64 = base
                .trim()
                .parse()
                .map_err(|_| format!("bad step '{text}'"))?;
            let exp: i32 = exp
                .trim()
                .parse()
                .map_err(|_| format!("bad step '{text}'"))?;
            base.powi(exp)
        } else {
            den.parse().map_err(|_| format!("bad step '{text}'"))?
        };
        Ok(num / den_value)
    } else {
        text.parse().map_err(|_| format!("bad step '{text}'"))
    }
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Result<Vec<T>, String> = text.split(',').map(|v| parse(v.trim())).collect();
    let items = items?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn write_or_print(path: &Option<PathBuf>, contents: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Inspect { method, json } => {
            let scheme = resolve_scheme(&method)?;
            if json {
                println!("{}", scheme_to_json(&scheme));
            } else {
                print!("{}", scheme_report(&method, &scheme));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Converge {
            method,
            problem,
            h_list,
            out,
        } => {
            let problem = problem.resolve()?;
            let mut names = Vec::new();
            for entry in &method {
                if entry.starts_with("custom:") {
                    names.push(entry.clone());
                } else {
                    names.extend(entry.split(',').map(|n| n.trim().to_string()));
                }
            }
            let mut schemes = Vec::new();
            for name in names {
                schemes.push((name.clone(), resolve_scheme(&name)?));
            }
            let h_list = parse_list(&h_list, parse_step)?;
            let table =
                run_convergence_table(&problem, &schemes, &h_list).map_err(|e| e.to_string())?;
            print!("{}", table.to_text());
            if let Some(path) = out {
                std::fs::write(&path, table.to_csv())
                    .map_err(|e| format!("writing {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            method,
            problem,
            tol_list,
            out,
        } => {
            let problem = problem.resolve()?;
            let (scheme, embedded) = resolve_pair(&method)?;
            let tol_list = parse_list(&tol_list, |t| {
                t.parse::<f64>().map_err(|_| format!("bad tolerance '{t}'"))
            })?;
            let rows = run_work_precision(&problem, &scheme, &embedded, &tol_list)
                .map_err(|e| e.to_string())?;
            let any_failed = rows.iter().any(|r| r.failed);
            write_or_print(&out, &work_precision_csv(&rows))?;
            Ok(if any_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Stability {
            method,
            grid,
            zmin,
            numin,
            out,
        } => {
            let scheme = resolve_scheme(&method)?;
            let (nz, nnu) = grid
                .split_once('x')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .ok_or_else(|| format!("bad grid '{grid}', expected NxM"))?;
            let result = scan_region(&scheme, zmin, numin, nz, nnu).map_err(|e| e.to_string())?;
            write_or_print(&out, &result.to_csv())?;
            println!("{}", result.summary_json(&method));
            Ok(if result.failed_cells() > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GEPTRKN_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("thread pool is built once at startup");
            }
            _ => {
                eprintln!("error: GEPTRKN_THREADS must be a positive integer");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let kind = err.kind();
            let _ = err.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
