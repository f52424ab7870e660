//! The named experiments behind the CLI subcommands. Each returns a
//! serializable report and optionally writes trace CSVs plus a JSON event
//! sidecar into an output directory.

use anyhow::{bail, Context, Result};
use hcf_core::families::{
    asymptotic_ratio, build_perfect_double, build_sl, mu_infinity, mu_yz, p_nu_ab_closed_form,
    p_nu_ab_unhalved_variant, region_d_membership, xyz_rhs, yz_rhs, PerfectFamily,
    SOLITON_PARAMETER,
};
use hcf_core::io;
use hcf_core::linalg::re;
use hcf_core::{
    blowup_time_bounds, bracket_trajectory, convergence_detect, envelope_floor,
    homothety_signature, integrate_reduced_until, soliton_check, static_check, CMatrix,
    ComplexLieAlgebra, FlowEvent, FlowTrace, HermitianMetric, IntegratorConfig, Method,
};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

use crate::famspec::FamilyTarget;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub tol: f64,
    pub out_dir: Option<PathBuf>,
    pub method: Method,
    pub t_max: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            tol: 1e-8,
            out_dir: None,
            method: Method::Rk45Adaptive,
            t_max: None,
        }
    }
}

fn write_artifact(dir: &Option<PathBuf>, name: &str, content: &str) -> Result<()> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
        std::fs::write(d.join(name), content).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

fn write_trace_csv<S: io::TraceState>(
    dir: &Option<PathBuf>,
    name: &str,
    trace: &FlowTrace<S>,
    labels: Option<&[String]>,
) -> Result<()> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
        let mut buf = Vec::new();
        io::trace_to_csv(trace, labels, &mut buf)?;
        std::fs::write(d.join(name), buf)?;
        let events = serde_json::to_string_pretty(&io::events_to_json(&trace.events))?;
        std::fs::write(
            d.join(format!("{}.events.json", name.trim_end_matches(".csv"))),
            events,
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------- instability

#[derive(Debug, Serialize)]
pub struct BlowupSection {
    pub t_est: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub within_upper: bool,
    pub envelope_ok: bool,
    /// min/max of x·(T_est − t) over the half of the run closest to blow-up.
    pub x_window: (f64, f64),
}

#[derive(Debug, Serialize)]
pub struct SlnInstabilityReport {
    pub n: usize,
    pub y0: f64,
    pub z0: f64,
    pub region_membership_persistent: bool,
    pub converged_to_origin: bool,
    pub t_final: f64,
    pub y_final: f64,
    pub ratio_target: f64,
    pub ratio_deviation_at_floor: f64,
    pub bracket_last_distance: f64,
    pub bracket_best_distance: f64,
    pub bracket_converged: bool,
    pub bracket_threshold: f64,
    pub blowup: BlowupSection,
    pub seed: u64,
}

/// Normalized-system run into the degenerate regime plus the blow-up run
/// of the unnormalized parameters, with the gauged-bracket convergence
/// check against the limit bracket.
pub fn sln_instability(
    n: usize,
    y0: f64,
    z0: f64,
    opts: &RunOptions,
) -> Result<SlnInstabilityReport> {
    if n < 2 {
        bail!("instability experiment needs n >= 2");
    }
    let region = region_d_membership(n, y0, z0);
    if !region.member {
        bail!(
            "initial point ({y0}, {z0}) is outside the invariant region: needs {:.6} <= y < 1",
            region.curve_y
        );
    }
    let ratio = asymptotic_ratio(n)?;
    let y_floor = 1e-8;

    let cfg = IntegratorConfig {
        method: opts.method,
        t_max: opts.t_max.unwrap_or(6000.0),
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        h_init: 1e-3,
        ..Default::default()
    };
    let mut yz =
        integrate_reduced_until(yz_rhs(n), &DVector::from_vec(vec![y0, z0]), &cfg, |_, s| {
            s[0] < y_floor
        })?;
    let converged_to_origin = yz.has_event(|e| matches!(e, FlowEvent::TargetReached { .. }));
    let membership = yz
        .states
        .iter()
        .all(|s| region_d_membership(n, s[0], s[1]).member);
    let (t_final, y_final, ratio_dev) = {
        let (t, s) = yz.last().context("empty trace")?;
        (t, s[0], (s[1] * s[1] / s[0] - ratio).abs())
    };

    // gauged brackets along a subsampled trajectory
    let target = mu_infinity(n)?;
    let stride = (yz.len() / 160).max(1);
    let mut traj: Vec<(f64, ComplexLieAlgebra)> = Vec::new();
    for (k, (&t, s)) in yz.times.iter().zip(&yz.states).enumerate() {
        if k % stride == 0 || k + 1 == yz.len() {
            traj.push((t, mu_yz(n, s[0], s[1])?));
        }
    }
    let report = convergence_detect(&traj, &target, true, 1e-3)?;

    // derived columns for the CSV
    let ratios: Vec<f64> = yz.states.iter().map(|s| s[1] * s[1] / s[0]).collect();
    yz.derived.insert("z2_over_y".into(), ratios);
    let members: Vec<f64> = yz
        .states
        .iter()
        .map(|s| region_d_membership(n, s[0], s[1]).member as u8 as f64)
        .collect();
    yz.derived.insert("in_region".into(), members);
    write_trace_csv(
        &opts.out_dir,
        "yz_trace.csv",
        &yz,
        Some(&["y".to_string(), "z".to_string()]),
    )?;

    // blow-up of the unnormalized system
    let xyz_cfg = IntegratorConfig {
        method: opts.method,
        t_max: 10.0,
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        h_init: 1e-4,
        ..Default::default()
    };
    let xyz =
        hcf_core::integrate_reduced(xyz_rhs(n), &DVector::from_vec(vec![1.0, y0, z0]), &xyz_cfg)?;
    let t_est = xyz.blowup_estimate().context("no blow-up detected")?;
    let (lower, upper) = blowup_time_bounds(1.0, y0, z0, n)?;
    let min0 = y0.min(z0).min(1.0);
    let envelope_ok = xyz.times.iter().zip(&xyz.states).all(|(&t, s)| {
        let floor = envelope_floor(min0, n, t);
        !floor.is_finite() || s[0].min(s[1]).min(s[2]) >= floor - 1e-6
    });
    let mut window = (f64::INFINITY, 0.0f64);
    for (&t, s) in xyz.times.iter().zip(&xyz.states) {
        if t >= 0.5 * t_est && t < t_est {
            let v = s[0] * (t_est - t);
            window.0 = window.0.min(v);
            window.1 = window.1.max(v);
        }
    }
    write_trace_csv(
        &opts.out_dir,
        "xyz_trace.csv",
        &xyz,
        Some(&["x".to_string(), "y".to_string(), "z".to_string()]),
    )?;

    let out = SlnInstabilityReport {
        n,
        y0,
        z0,
        region_membership_persistent: membership,
        converged_to_origin,
        t_final,
        y_final,
        ratio_target: ratio,
        ratio_deviation_at_floor: ratio_dev,
        bracket_last_distance: report.last_distance,
        bracket_best_distance: report.best_distance,
        bracket_converged: report.converged,
        bracket_threshold: report.threshold,
        blowup: BlowupSection {
            t_est,
            lower_bound: lower,
            upper_bound: upper,
            within_upper: t_est <= upper + 1e-6,
            envelope_ok,
            x_window: window,
        },
        seed: opts.seed,
    };
    write_artifact(
        &opts.out_dir,
        "instability_report.json",
        &serde_json::to_string_pretty(&out)?,
    )?;
    Ok(out)
}

// ----------------------------------------------------------------- audit

#[derive(Debug, Serialize)]
pub struct AuditReport {
    pub target: String,
    pub dim: usize,
    pub jacobi_residual: f64,
    pub certificate: serde_json::Value,
    pub verdict: String,
    pub lambda: f64,
    pub static_lambda: Option<f64>,
    /// Filled when the metric is static with λ ≠ 0 (a necessary condition).
    pub perfect: Option<bool>,
    pub signature: Vec<f64>,
    pub seed: u64,
}

pub fn soliton_audit(target: &FamilyTarget, opts: &RunOptions) -> Result<AuditReport> {
    target
        .algebra
        .verify(1e-8 * target.algebra.norm().max(1.0))
        .context("audit input is not a Lie bracket")?;
    let cert = soliton_check(&target.algebra, &target.metric, opts.tol)?;
    let static_lambda = static_check(&target.algebra, &target.metric, opts.tol)?;
    let perfect = match static_lambda {
        Some(l) if l.abs() > opts.tol => Some(target.algebra.is_perfect(1e-9)),
        _ => None,
    };
    let report = AuditReport {
        target: target.name.clone(),
        dim: target.algebra.dim(),
        jacobi_residual: target.algebra.jacobi_residual(),
        verdict: cert.verdict.to_string(),
        lambda: cert.lambda,
        certificate: io::certificate_to_json(&cert),
        static_lambda,
        perfect,
        signature: homothety_signature(&target.algebra, &target.metric)?,
        seed: opts.seed,
    };
    write_artifact(
        &opts.out_dir,
        "audit_report.json",
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

// ------------------------------------------------------------- homothety

#[derive(Debug, Serialize)]
pub struct HomothetyEntry {
    pub label: String,
    pub t: f64,
    pub verdict: String,
    pub lambda: f64,
    pub residual: f64,
    pub full_signature: Vec<f64>,
    pub block: [[f64; 2]; 2],
    pub block_trace: f64,
    pub block_det: f64,
    pub unhalved_block_trace: f64,
    pub unhalved_block_det: f64,
}

#[derive(Debug, Serialize)]
pub struct HomothetyReport {
    pub entries: Vec<HomothetyEntry>,
    pub sup_distance_nu0_vs_quarter: f64,
    pub sup_distance_nu0_vs_nu11: f64,
    pub distinct: bool,
    pub threshold: f64,
}

/// Normalized-spectrum separation of the orbit points ν_0, ν_{2^{−1/4}}
/// and ν_{1,1}, with block trace/determinant values of both closed forms
/// recorded side by side.
pub fn homothety_distinction(opts: &RunOptions) -> Result<HomothetyReport> {
    let fam = default_family()?;
    let metric = HermitianMetric::identity(fam.dim());
    let quarter = 2.0f64.powf(-0.25);
    let points = [("nu_0", 0.0), ("nu_quarter", quarter), ("nu_1_1", 1.0)];
    let mut entries = Vec::new();
    for (label, t) in points {
        let alg = fam.nu_ab(1.0, t)?;
        let cert = soliton_check(&alg, &metric, opts.tol)?;
        let block = p_nu_ab_closed_form(1.0, t)?;
        let unhalved = p_nu_ab_unhalved_variant(1.0, t);
        entries.push(HomothetyEntry {
            label: label.into(),
            t,
            verdict: cert.verdict.to_string(),
            lambda: cert.lambda,
            residual: cert.residual,
            full_signature: homothety_signature(&alg, &metric)?,
            block,
            block_trace: block[0][0] + block[1][1],
            block_det: block[0][0] * block[1][1] - block[0][1] * block[1][0],
            unhalved_block_trace: unhalved[0][0] + unhalved[1][1],
            unhalved_block_det: unhalved[0][0] * unhalved[1][1] - unhalved[0][1] * unhalved[1][0],
        });
    }
    let sup = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    let d_quarter = sup(&entries[0].full_signature, &entries[1].full_signature);
    let d_nu11 = sup(&entries[0].full_signature, &entries[2].full_signature);
    let threshold = 0.05;
    let report = HomothetyReport {
        entries,
        sup_distance_nu0_vs_quarter: d_quarter,
        sup_distance_nu0_vs_nu11: d_nu11,
        distinct: d_quarter >= threshold && d_nu11 >= threshold,
        threshold,
    };
    write_artifact(
        &opts.out_dir,
        "homothety_report.json",
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

pub fn default_family() -> Result<PerfectFamily> {
    let (sl2, trace_metric) = build_sl(2)?;
    Ok(build_perfect_double(&sl2, &trace_metric, 1e-8)?)
}

// ------------------------------------------------------------ orbit drift

#[derive(Debug, Serialize)]
pub struct OrbitDriftReport {
    pub a0: f64,
    pub b0: f64,
    pub normalized: bool,
    pub t_final: f64,
    pub samples: usize,
    pub initial: DriftDistances,
    pub terminal: DriftDistances,
    /// Target whose scale-free distance is smallest at the end.
    pub attractor: String,
    pub drift_resolved: bool,
}

#[derive(Debug, Serialize, Clone, Copy)]
pub struct DriftDistances {
    pub to_nu0: f64,
    pub to_soliton_plus: f64,
    pub to_soliton_minus: f64,
}

fn renormalize(h: &mut CMatrix) {
    let n = h.nrows() as f64;
    let norm = h.norm();
    if norm > 0.0 {
        *h *= re(n.sqrt() / norm);
    }
}

/// Metric flow started at the h_{a0,b0}-pulled-back product metric on the
/// doubled bracket, renormalized per accepted step (the flow is
/// scale-equivariant, so this only reparametrizes time), with scale-free
/// gauged-bracket distances to the ν_0 ray and the two soliton rays.
pub fn orbit_drift(
    a0: f64,
    b0: f64,
    normalize: bool,
    opts: &RunOptions,
) -> Result<OrbitDriftReport> {
    if a0 == 0.0 {
        bail!("orbit drift needs a0 ≠ 0");
    }
    let fam = default_family()?;
    let h0 = fam.h_ab(a0, b0)?;
    let h0m = h0.matrix();
    let start = HermitianMetric::new(h0m.adjoint() * h0m)?;
    let cfg = IntegratorConfig {
        method: opts.method,
        t_max: opts.t_max.unwrap_or(if normalize { 25.0 } else { 2.0 }),
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        h_init: 1e-3,
        min_eig_floor: 1e-9,
        ..Default::default()
    };
    let trace = if normalize {
        hcf_core::flow::integrate_metric_flow_normalized(fam.nu(), &start, &cfg, renormalize)?
    } else {
        hcf_core::integrate_metric_flow(fam.nu(), &start, &cfg)?
    };

    let targets = [
        ("nu_0".to_string(), fam.nu().clone()),
        ("nu_plus".to_string(), fam.nu_ab(1.0, SOLITON_PARAMETER)?),
        ("nu_minus".to_string(), fam.nu_ab(1.0, -SOLITON_PARAMETER)?),
    ];

    let stride = (trace.len() / 400).max(1);
    let mut kept = FlowTrace {
        times: Vec::new(),
        states: Vec::new(),
        events: trace.events.clone(),
        derived: Default::default(),
    };
    for k in (0..trace.len()).step_by(stride) {
        kept.times.push(trace.times[k]);
        kept.states.push(trace.states[k].clone());
    }
    if kept.times.last() != trace.times.last() {
        kept.times.push(*trace.times.last().unwrap());
        kept.states.push(trace.states.last().unwrap().clone());
    }

    let traj = bracket_trajectory(fam.nu(), &kept)?;
    if traj.samples.is_empty() {
        bail!("no gaugeable samples along the drift run");
    }
    let mut dist_cols: Vec<Vec<f64>> = vec![Vec::new(); targets.len()];
    for (_, b) in &traj.samples {
        let bn = b.unit_normalized().context("zero bracket along the run")?;
        for (col, (_, target)) in dist_cols.iter_mut().zip(&targets) {
            let tn = target.unit_normalized().expect("targets are nonzero");
            col.push(bn.distance(&tn)?);
        }
    }
    for (col, (name, _)) in dist_cols.iter().zip(&targets) {
        kept.derived.insert(format!("dist_{name}"), col.clone());
    }
    write_trace_csv(&opts.out_dir, "orbit_trace.csv", &kept, None)?;

    let at = |k: usize| DriftDistances {
        to_nu0: dist_cols[0][k],
        to_soliton_plus: dist_cols[1][k],
        to_soliton_minus: dist_cols[2][k],
    };
    let last = traj.samples.len() - 1;
    let initial = at(0);
    let terminal = at(last);
    let (attractor, best) = [
        ("nu_0", terminal.to_nu0),
        ("nu_plus", terminal.to_soliton_plus),
        ("nu_minus", terminal.to_soliton_minus),
    ]
    .into_iter()
    .min_by(|a, b| a.1.total_cmp(&b.1))
    .expect("non-empty");

    let report = OrbitDriftReport {
        a0,
        b0,
        normalized: normalize,
        t_final: *kept.times.last().unwrap(),
        samples: traj.samples.len(),
        initial,
        terminal,
        attractor: attractor.to_string(),
        drift_resolved: attractor != "nu_0" && best < terminal.to_nu0,
    };
    write_artifact(
        &opts.out_dir,
        "orbit_drift_report.json",
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

// --------------------------------------------------------------- summaries

pub fn print_table_entry(entry: &hcf_core::families::SolitonTableEntry) -> String {
    format!(
        "t = {:+.6}: verdict {:13} λ = {:+.6}  residual {:.2e}  D*-residual {:.3}  k-conjugacy {:.1e}",
        entry.t,
        entry.certificate.verdict.to_string(),
        entry.certificate.lambda,
        entry.certificate.residual,
        entry.certificate.dstar_residual,
        entry.k_conjugacy_distance,
    )
}

pub fn perfect_table_json(entries: &[hcf_core::families::SolitonTableEntry]) -> serde_json::Value {
    json!(entries
        .iter()
        .map(|e| {
            json!({
                "t": e.t,
                "certificate": io::certificate_to_json(&e.certificate),
                "d_t_derivation_residual": e.dt_derivation_residual,
                "block": e.block,
                "block_trace": e.block_trace,
                "block_det": e.block_det,
                "k_conjugacy_distance": e.k_conjugacy_distance,
            })
        })
        .collect::<Vec<_>>())
}
