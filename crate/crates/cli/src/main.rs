use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hcf_lab::acceptance;
use hcf_lab::experiments::{self, RunOptions};
use hcf_lab::famspec::{self, FamilyTarget};
use nalgebra::DVector;
use serde_json::json;
use std::path::{Path, PathBuf};

use hcf_core::families::{xyz_rhs, yz_rhs};
use hcf_core::{io, HermitianMetric, IntegratorConfig, Method};

/// Exit codes: 0 success, 1 criterion failure, 2 input error.
fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

#[derive(Parser)]
#[command(
    name = "hcf-lab",
    version,
    about = "Left-invariant positive Hermitian curvature flow laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Relative tolerance for certificate verdicts
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Seed for every randomized draw (recorded in reports)
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output directory for CSV/JSON artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Integrator for flow commands
    #[arg(long, global = true, value_enum, default_value_t = IntegratorArg::Rk45)]
    integrator: IntegratorArg,

    /// Time horizon override for flow commands
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,

    /// Primary report format printed to stdout
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegratorArg {
    Rk45,
    Rk4,
}

impl From<IntegratorArg> for Method {
    fn from(v: IntegratorArg) -> Method {
        match v {
            IntegratorArg::Rk45 => Method::Rk45Adaptive,
            IntegratorArg::Rk4 => Method::Rk4Fixed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// List or export the built-in families
    Families {
        #[command(subcommand)]
        action: FamiliesCmd,
    },
    /// Static/soliton audit of an algebra file or family spec
    Audit {
        /// Path to an hcf-lab/1 algebra JSON, or a family spec like sl(3)+trace
        target: String,
        /// Metric JSON path (file targets only; family specs carry their metric)
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Integrate the matrix metric flow of an algebra + metric
    FlowMetric {
        /// Algebra file or family spec
        algebra: String,
        /// Metric JSON path (defaults to the family/identity metric)
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Integrate a reduced parameter system
    FlowReduced {
        #[arg(long, value_enum)]
        system: ReducedSystem,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        z0: f64,
    },
    /// Instability experiment: escape from the static point, asymptotics,
    /// blow-up bounds, limit-bracket convergence
    SlnInstability {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.999)]
        y0: f64,
        #[arg(long, default_value_t = 0.999)]
        z0: f64,
    },
    /// Homothety distinction of the perfect-family orbit points
    Homothety,
    /// Drift of the gauged bracket along the perfect-family orbit
    OrbitDrift {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a0: f64,
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        b0: f64,
        /// Integrate the raw (collapsing) flow instead of the normalized one
        #[arg(long)]
        no_normalize: bool,
    },
    /// Run the acceptance suite (exit code 1 on any failing criterion)
    Acceptance {
        /// Scale every threshold (values < 1 tighten the suite)
        #[arg(long, default_value_t = 1.0)]
        tighten: f64,
    },
}

#[derive(Subcommand)]
enum FamiliesCmd {
    /// Print the available constructors
    List,
    /// Write algebra + metric JSON for a family spec
    Export {
        /// Family spec, e.g. "sl(3)" or "mu-infinity(2)"
        spec: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReducedSystem {
    Xyz,
    Yz,
}

fn run(cli: Cli) -> Result<i32> {
    let Cli {
        cmd,
        tol,
        seed,
        out,
        integrator,
        t_max,
        format,
    } = cli;
    let opts = RunOptions {
        seed,
        tol,
        out_dir: out.clone(),
        method: integrator.into(),
        t_max,
    };
    match cmd {
        Cmd::Families { action } => match action {
            FamiliesCmd::List => {
                println!("available families (append +trace or +random for the metric):");
                for (pattern, desc) in famspec::list_families() {
                    println!("  {pattern:28} {desc}");
                }
                Ok(0)
            }
            FamiliesCmd::Export { spec } => {
                let target = famspec::parse_family(&spec, seed)?;
                let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
                std::fs::create_dir_all(&dir)?;
                let stem = sanitize(&spec);
                let apath = dir.join(format!("{stem}.algebra.json"));
                let mpath = dir.join(format!("{stem}.metric.json"));
                io::write_algebra(&apath, &target.algebra)?;
                io::write_metric(&mpath, &target.metric)?;
                println!("wrote {} and {}", apath.display(), mpath.display());
                Ok(0)
            }
        },
        Cmd::Audit { target, metric } => {
            let target = load_target(&target, metric.as_deref(), seed)?;
            let report = experiments::soliton_audit(&target, &opts)?;
            println!(
                "{}: verdict {} (λ = {:+.6}, residual {:.2e})",
                report.target,
                report.verdict,
                report.lambda,
                report.certificate["residual"].as_f64().unwrap_or(f64::NAN)
            );
            if let Some(l) = report.static_lambda {
                match report.perfect {
                    Some(p) => println!("static: λ = {l:.9}, perfect algebra: {p}"),
                    None => println!("static: λ = {l:.9}"),
                }
            }
            emit_json(format, &serde_json::to_value(&report)?)?;
            Ok(0)
        }
        Cmd::FlowMetric { algebra, metric } => {
            let target = load_target(&algebra, metric.as_deref(), seed)?;
            let cfg = IntegratorConfig {
                method: opts.method,
                t_max: t_max.unwrap_or(1.0),
                ..Default::default()
            };
            let trace = hcf_core::integrate_metric_flow(&target.algebra, &target.metric, &cfg)?;
            println!(
                "integrated {} samples to t = {:.6}; events: {}",
                trace.len(),
                trace.times.last().copied().unwrap_or(0.0),
                serde_json::to_string(&trace.events)?
            );
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                let mut buf = Vec::new();
                io::trace_to_csv(&trace, None, &mut buf)?;
                std::fs::write(dir.join("metric_trace.csv"), buf)?;
                std::fs::write(
                    dir.join("metric_trace.events.json"),
                    serde_json::to_string_pretty(&io::events_to_json(&trace.events))?,
                )?;
                println!("wrote {}", dir.join("metric_trace.csv").display());
            }
            Ok(0)
        }
        Cmd::FlowReduced {
            system,
            n,
            x0,
            y0,
            z0,
        } => {
            let cfg = IntegratorConfig {
                method: opts.method,
                t_max: t_max.unwrap_or(match system {
                    ReducedSystem::Xyz => 5.0,
                    ReducedSystem::Yz => 2000.0,
                }),
                rel_tol: 1e-10,
                abs_tol: 1e-13,
                h_init: 1e-4,
                ..Default::default()
            };
            let trace = match system {
                ReducedSystem::Xyz => hcf_core::integrate_reduced(
                    xyz_rhs(n),
                    &DVector::from_vec(vec![x0, y0, z0]),
                    &cfg,
                )?,
                ReducedSystem::Yz => {
                    hcf_core::integrate_reduced(yz_rhs(n), &DVector::from_vec(vec![y0, z0]), &cfg)?
                }
            };
            let mut summary = json!({
                "samples": trace.len(),
                "t_final": trace.times.last(),
                "state_final": trace.states.last().map(|s| s.iter().copied().collect::<Vec<_>>()),
                "events": trace.events,
            });
            if let Some(t_est) = trace.blowup_estimate() {
                summary["blowup"] = json!({
                    "t_est": t_est,
                    "bounds": hcf_core::blowup_time_bounds(x0, y0, z0, n).ok(),
                });
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                let labels: Vec<String> = match system {
                    ReducedSystem::Xyz => ["x", "y", "z"].iter().map(|s| s.to_string()).collect(),
                    ReducedSystem::Yz => ["y", "z"].iter().map(|s| s.to_string()).collect(),
                };
                let mut buf = Vec::new();
                io::trace_to_csv(&trace, Some(&labels), &mut buf)?;
                std::fs::write(dir.join("reduced_trace.csv"), buf)?;
                std::fs::write(
                    dir.join("reduced_trace.events.json"),
                    serde_json::to_string_pretty(&io::events_to_json(&trace.events))?,
                )?;
            }
            Ok(0)
        }
        Cmd::SlnInstability { n, y0, z0 } => {
            let report = experiments::sln_instability(n, y0, z0, &opts)?;
            println!(
                "n = {n}: region persistent: {}, reached y = {:.2e} at t = {:.1}",
                report.region_membership_persistent, report.y_final, report.t_final
            );
            println!(
                "ratio z²/y − {:.6}: {:.2e}; bracket distance to the limit: {:.2e} (converged: {})",
                report.ratio_target,
                report.ratio_deviation_at_floor,
                report.bracket_last_distance,
                report.bracket_converged
            );
            println!(
                "blow-up: T_est = {:.6} ∈ [{:.6}, {:.6}] (within upper: {}), envelope: {}",
                report.blowup.t_est,
                report.blowup.lower_bound,
                report.blowup.upper_bound,
                report.blowup.within_upper,
                report.blowup.envelope_ok
            );
            emit_json(format, &serde_json::to_value(&report)?)?;
            Ok(0)
        }
        Cmd::Homothety => {
            let report = experiments::homothety_distinction(&opts)?;
            let fam = experiments::default_family()?;
            for line in fam
                .soliton_table(opts.tol)?
                .iter()
                .map(experiments::print_table_entry)
            {
                println!("{line}");
            }
            println!(
                "signature sup-distances: ν_0 vs ν_{{2^(−1/4)}} = {:.4}, ν_0 vs ν_{{1,1}} = {:.4} → distinct: {}",
                report.sup_distance_nu0_vs_quarter, report.sup_distance_nu0_vs_nu11, report.distinct
            );
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(
                    dir.join("perfect_soliton_table.json"),
                    serde_json::to_string_pretty(&experiments::perfect_table_json(
                        &fam.soliton_table(opts.tol)?,
                    ))?,
                )?;
            }
            emit_json(format, &serde_json::to_value(&report)?)?;
            Ok(0)
        }
        Cmd::OrbitDrift {
            a0,
            b0,
            no_normalize,
        } => {
            let report = experiments::orbit_drift(a0, b0, !no_normalize, &opts)?;
            println!(
                "drift from (a0, b0) = ({a0}, {b0}): terminal distances nu_0 {:.4}, nu_plus {:.4}, nu_minus {:.4}",
                report.terminal.to_nu0, report.terminal.to_soliton_plus, report.terminal.to_soliton_minus
            );
            println!(
                "attractor: {} (drift resolved: {})",
                report.attractor, report.drift_resolved
            );
            emit_json(format, &serde_json::to_value(&report)?)?;
            Ok(0)
        }
        Cmd::Acceptance { tighten } => {
            let results = acceptance::run_all(tighten);
            for r in &results {
                println!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.passed).count();
            let summary = json!({
                "criteria": results,
                "passed": passed,
                "total": results.len(),
                "tighten": tighten,
            });
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(
                    dir.join("acceptance_summary.json"),
                    serde_json::to_string_pretty(&summary)?,
                )?;
            }
            println!("{passed}/{} criteria passed", results.len());
            Ok(if passed == results.len() { 0 } else { 1 })
        }
    }
}

fn sanitize(spec: &str) -> String {
    let mut out = String::with_capacity(spec.len());
    for c in spec.chars() {
        if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
            out.push(c);
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    out.trim_end_matches('_').to_string()
}

fn load_target(spec: &str, metric_path: Option<&Path>, seed: u64) -> Result<FamilyTarget> {
    if Path::new(spec).exists() {
        let algebra = io::read_algebra(Path::new(spec))
            .with_context(|| format!("reading algebra file {spec}"))?;
        let metric = match metric_path {
            Some(p) => io::read_metric(p)
                .with_context(|| format!("reading metric file {}", p.display()))?,
            None => HermitianMetric::identity(algebra.dim()),
        };
        if metric.dim() != algebra.dim() {
            bail!(
                "metric dimension {} does not match algebra dimension {}",
                metric.dim(),
                algebra.dim()
            );
        }
        Ok(FamilyTarget {
            name: spec.to_string(),
            algebra,
            metric,
        })
    } else {
        if metric_path.is_some() {
            bail!("--metric files only apply to algebra-file targets; family specs use +trace/+random");
        }
        famspec::parse_family(spec, seed)
    }
}

fn emit_json(format: FormatArg, value: &serde_json::Value) -> Result<()> {
    if format == FormatArg::Json {
        println!("{}", serde_json::to_string_pretty(value)?);
    }
    Ok(())
}
