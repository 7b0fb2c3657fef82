//! Command-line runner: verification reports, trajectory export, bracket
//! tables, reduction checks and the catalog listing.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure,
//! 2 configuration or parse error, 3 domain exit during integration.

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use liftlab_core::dynamics::{DomainPredicate, IntegrateOptions, Method};
use liftlab_core::tolerances::{DEFAULT_SAMPLES, DEFAULT_SEED, FLOW_MARGIN};
use liftlab_core::{
    build_system, build_system_mutated, full_verification_of, involution_matrix, reduction_check,
    ChartId, CoeffSlot, Error, Family, Observable, PhasePoint, System, SystemSpec, Tier,
};

#[derive(Parser)]
#[command(
    name = "liftlab",
    about = "Build and verify a catalog of lifted superintegrable Hamiltonian systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArg {
    /// Path to a JSON system spec, e.g.
    /// {"family":"a","tier":"Geodesic3D","k":[1.0,0.5,0.25]}
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct SeededArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite for one system and emit a JSON report.
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        seeded: SeededArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<String>,
        /// Self-test control: flip the sign of one coefficient inside one
        /// observable, as `observable:coeff` (coeff in k1..k3, t1..t3).
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Integrate a flow and export the trajectory with monitored integrals.
    Integrate {
        #[command(flatten)]
        spec: SpecArg,
        /// Initial phase point, comma separated: q1,..,qn,p1,..,pn.
        #[arg(long)]
        initial: String,
        /// Chart of the initial point.
        #[arg(long, default_value = "cartesian3")]
        chart: String,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        /// midpoint | gauss4 | rk4
        #[arg(long, default_value = "midpoint")]
        method: String,
        #[arg(long)]
        output: Option<String>,
        /// csv | json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Print the pairwise bracket matrix of the declared observables.
    Brackets {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        seeded: SeededArgs,
    },
    /// Compare the lifted geodesic flow (p_z = sqrt 2) with the planar flow.
    ReduceCheck {
        #[command(flatten)]
        spec: SpecArg,
        /// Planar initial point: x,y,px,py.
        #[arg(long)]
        initial: String,
        #[arg(long, default_value_t = 5.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// List the twenty catalog systems with their observables.
    Catalog,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn load_spec(path: &str) -> Result<SystemSpec, String> {
    let raw = fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
    let spec: SystemSpec =
        serde_json::from_str(&raw).map_err(|e| format!("cannot parse `{path}`: {e}"))?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn parse_numbers(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{s}`: {e}"))
        })
        .collect()
}

fn write_output(path: &Option<String>, content: &str) -> Result<(), String> {
    match path {
        Some(path) => fs::write(path, content).map_err(|e| format!("cannot write `{path}`: {e}")),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify {
            spec,
            seeded,
            output,
            mutate,
        } => {
            let spec = load_spec(&spec.spec)?;
            let system = match &mutate {
                None => build_system(&spec).map_err(|e| e.to_string())?,
                Some(raw) => {
                    let (target, coeff) = raw
                        .split_once(':')
                        .ok_or_else(|| format!("--mutate takes `observable:coeff`, got `{raw}`"))?;
                    let slot = CoeffSlot::from_name(coeff).map_err(|e| e.to_string())?;
                    build_system_mutated(&spec, target, slot).map_err(|e| e.to_string())?
                }
            };
            let report = full_verification_of(&system, seeded.samples, seeded.seed)
                .map_err(|e| e.to_string())?;
            let mut body = report.to_json();
            body.push('\n');
            write_output(&output, &body)?;
            if report.overall {
                Ok(ExitCode::SUCCESS)
            } else {
                for check in report.checks.iter().filter(|c| !c.pass) {
                    eprintln!(
                        "FAIL {} [{}]: residual {:.3e} > tol {:.3e}",
                        check.name, check.kind, check.max_residual, check.tolerance
                    );
                }
                Ok(ExitCode::from(EXIT_CHECK_FAILED))
            }
        }

        Command::Integrate {
            spec,
            initial,
            chart,
            h,
            t_end,
            method,
            output,
            format,
        } => {
            let spec = load_spec(&spec.spec)?;
            let system = build_system(&spec).map_err(|e| e.to_string())?;
            let chart = ChartId::from_name(&chart).map_err(|e| e.to_string())?;
            if chart.dim() != system.dim() {
                return Err(format!(
                    "chart {} has dimension {}, system {} needs {}",
                    chart.name(),
                    chart.dim(),
                    system.label(),
                    system.dim()
                ));
            }
            let values = parse_numbers(&initial)?;
            let n = system.dim();
            if values.len() != 2 * n {
                return Err(format!(
                    "--initial needs {} numbers, got {}",
                    2 * n,
                    values.len()
                ));
            }
            let z0 =
                PhasePoint::new(chart, &values[..n], &values[n..]).map_err(|e| e.to_string())?;
            let method = Method::from_name(&method).map_err(|e| e.to_string())?;

            if !system.domain_ok(&z0, FLOW_MARGIN) {
                eprintln!("domain exit at t=0");
                return Ok(ExitCode::from(EXIT_DOMAIN));
            }
            let dom: DomainPredicate = {
                let sys = system.clone();
                Arc::new(move |z: &PhasePoint| sys.domain_ok(z, FLOW_MARGIN))
            };
            let opts = IntegrateOptions::new(h, t_end, method).with_domain(dom);
            let mut traj = match liftlab_core::integrate(system.hamiltonian(), &z0, &opts) {
                Ok(traj) => traj,
                Err(Error::DomainExit { t }) => {
                    eprintln!("domain exit at t={t}");
                    return Ok(ExitCode::from(EXIT_DOMAIN));
                }
                Err(e) => return Err(e.to_string()),
            };
            let observed: Vec<&Observable> = std::iter::once(system.hamiltonian())
                .chain(system.integrals().iter())
                .collect();
            liftlab_core::monitor(&mut traj, &observed, FLOW_MARGIN).map_err(|e| e.to_string())?;

            let body = match format.as_str() {
                "csv" => trajectory_csv(&traj, n),
                "json" => trajectory_json(&traj, n),
                other => return Err(format!("unknown format `{other}`")),
            };
            write_output(&output, &body)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Brackets { spec, seeded } => {
            let spec = load_spec(&spec.spec)?;
            let system = build_system(&spec).map_err(|e| e.to_string())?;
            let inv = involution_matrix(&system, seeded.samples, seeded.seed)
                .map_err(|e| e.to_string())?;
            print!("{}", bracket_table(&system, &inv));
            let ok = inv.checks.iter().all(|c| c.pass);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }

        Command::ReduceCheck {
            spec,
            initial,
            t_end,
            h,
        } => {
            let spec = load_spec(&spec.spec)?;
            let values = parse_numbers(&initial)?;
            if values.len() != 4 {
                return Err(format!(
                    "--initial needs 4 numbers (x,y,px,py), got {}",
                    values.len()
                ));
            }
            let z0 = PhasePoint::new(ChartId::Cartesian2, &values[..2], &values[2..])
                .map_err(|e| e.to_string())?;
            let res = match reduction_check(spec.family, spec.k, &z0, t_end, h) {
                Ok(res) => res,
                Err(Error::DomainExit { t }) => {
                    eprintln!("domain exit at t={t}");
                    return Ok(ExitCode::from(EXIT_DOMAIN));
                }
                Err(e) => return Err(e.to_string()),
            };
            println!(
                "family {} k=[{}] sup_distance={:.16e} max_pz_deviation={:.16e} pass={}",
                spec.family.name(),
                spec.k.map(|v| format!("{v}")).join(", "),
                res.sup_distance,
                res.max_pz_deviation,
                res.pass
            );
            Ok(if res.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }

        Command::Catalog => {
            for family in Family::ALL {
                for tier in Tier::ALL {
                    let spec = liftlab_core::default_spec(family, tier);
                    let system = build_system(&spec).map_err(|e| e.to_string())?;
                    let integrals: Vec<&str> =
                        system.integrals().iter().map(|o| o.name()).collect();
                    let charts: Vec<&str> = system.charts().iter().map(|c| c.name()).collect();
                    println!(
                        "{:16} H, {} | independent: {} | charts: {}",
                        system.label(),
                        integrals.join(", "),
                        system.independent_names().join(", "),
                        charts.join(", ")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Minimal RFC 4180 quoting: only fields containing separators or quotes
/// are wrapped, with inner quotes doubled.
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn trajectory_csv(traj: &liftlab_core::Trajectory, n: usize) -> String {
    let mut header: Vec<String> = vec!["t".into()];
    for i in 1..=n {
        header.push(format!("q{i}"));
    }
    for i in 1..=n {
        header.push(format!("p{i}"));
    }
    for (name, _) in &traj.monitors {
        header.push(csv_field(name));
    }
    let mut out = header.join(",");
    out.push_str("\r\n");
    for (idx, t) in traj.times.iter().enumerate() {
        let z = &traj.states[idx];
        let mut row: Vec<String> = vec![fmt17(*t)];
        row.extend(z.q().iter().map(|v| fmt17(*v)));
        row.extend(z.p().iter().map(|v| fmt17(*v)));
        for (_, series) in &traj.monitors {
            row.push(fmt17(series[idx]));
        }
        out.push_str(&row.join(","));
        out.push_str("\r\n");
    }
    out
}

fn trajectory_json(traj: &liftlab_core::Trajectory, n: usize) -> String {
    let states: Vec<Vec<String>> = traj
        .states
        .iter()
        .map(|z| {
            z.q()
                .iter()
                .chain(z.p().iter())
                .map(|v| fmt17(*v))
                .collect()
        })
        .collect();
    let monitors: Vec<serde_json::Value> = traj
        .monitors
        .iter()
        .map(|(name, series)| {
            serde_json::json!({
                "name": name,
                "values": series.iter().map(|v| fmt17(*v)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "chart": traj.states[0].chart().name(),
        "dim": n,
        "times": traj.times.iter().map(|v| fmt17(*v)).collect::<Vec<_>>(),
        "states": states,
        "monitors": monitors,
    });
    let mut body = serde_json::to_string_pretty(&doc).expect("json");
    body.push('\n');
    body
}

fn bracket_table(system: &System, inv: &liftlab_core::InvolutionResult) -> String {
    let names = &inv.names;
    let width = names.iter().map(|n| n.len()).max().unwrap_or(4).max(9);
    let mut out = format!("pairwise max |{{F, G}}| for {}\n", system.label());
    out.push_str(&format!("{:width$}", ""));
    for name in names {
        out.push_str(&format!(" {name:>width$}"));
    }
    out.push('\n');
    for i in 0..names.len() {
        out.push_str(&format!("{:>width$}", names[i]));
        for j in 0..names.len() {
            if j <= i {
                out.push_str(&format!(" {:>width$}", ""));
            } else {
                out.push_str(&format!(" {:>width$.2e}", inv.matrix[i][j]));
            }
        }
        out.push('\n');
    }
    out.push_str("declared checks:\n");
    for check in &inv.checks {
        out.push_str(&format!(
            "  {:4} {} residual {:.3e} (tol {:.3e})\n",
            if check.pass { "ok" } else { "FAIL" },
            check.name,
            check.max_residual,
            check.tolerance
        ));
    }
    out
}
