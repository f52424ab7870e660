//! Numerical integration of the metric flow ∂_t H = −H·P(H) and of the
//! reduced parameter systems, with blow-up detection, positivity
//! enforcement, gauged bracket trajectories and convergence reports.

mod rk;

pub use rk::OdeState;

use crate::algebra::{ComplexLieAlgebra, GaugeTransform, HermitianMetric};
use crate::curvature::ttcr_operator;
use crate::error::{Error, Result};
use crate::linalg::{hermitize, CMatrix};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub h_init: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    /// Component/inverse-metric cap that flags blow-up.
    pub blowup_norm_cap: f64,
    /// Smallest admissible metric eigenvalue before a collapse is flagged.
    pub min_eig_floor: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            h_init: 1e-3,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_max: 1.0,
            blowup_norm_cap: 1e12,
            min_eig_floor: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidParameter(
                "integrator tolerances must be positive".into(),
            ));
        }
        if !positive(self.t_max) {
            return Err(Error::InvalidParameter("t_max must be positive".into()));
        }
        if !positive(self.h_init) {
            return Err(Error::InvalidParameter("h_init must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowEvent {
    /// Solution left the admissible cone; `t_est` extrapolates the
    /// singular time.
    BlowupDetected {
        t_est: f64,
    },
    /// ‖rhs‖ fell below abs_tol.
    Converged {
        t: f64,
    },
    MaxTimeReached,
    /// A caller-supplied stopping predicate fired.
    TargetReached {
        t: f64,
    },
    /// A stored sample could not be gauged (indefinite metric).
    IndefiniteSample {
        t: f64,
    },
}

/// Time-stamped solution samples plus run events and optional per-sample
/// derived scalars.
#[derive(Debug, Clone)]
pub struct FlowTrace<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub events: Vec<FlowEvent>,
    pub derived: BTreeMap<String, Vec<f64>>,
}

impl<S> FlowTrace<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &S)> {
        self.times
            .last()
            .map(|&t| (t, self.states.last().expect("parallel arrays")))
    }

    pub fn blowup_estimate(&self) -> Option<f64> {
        self.events.iter().find_map(|e| match e {
            FlowEvent::BlowupDetected { t_est } => Some(*t_est),
            _ => None,
        })
    }

    pub fn has_event(&self, f: impl Fn(&FlowEvent) -> bool) -> bool {
        self.events.iter().any(f)
    }
}

/// −Θ(g) = −H·P, the velocity of the metric flow at g.
pub fn metric_flow_rhs(alg: &ComplexLieAlgebra, g: &HermitianMetric) -> Result<CMatrix> {
    let op = ttcr_operator(alg, g)?;
    Ok(-op.theta())
}

fn metric_rhs_raw(alg: &ComplexLieAlgebra, h: &CMatrix) -> Result<CMatrix> {
    let g = HermitianMetric::new(h.clone())?;
    let op = ttcr_operator(alg, &g)?;
    Ok(-hermitize(&(g.matrix() * op.matrix())))
}

/// Integrates ∂_t H = −H·P(H) from `h0`. Accepted states are re-Hermitized
/// and must stay positive definite; the run stops at t_max, on convergence
/// (‖rhs‖ ≤ abs_tol), or when the metric degenerates (min eigenvalue at the
/// floor, or norm/inverse-norm past the cap).
pub fn integrate_metric_flow(
    alg: &ComplexLieAlgebra,
    h0: &HermitianMetric,
    cfg: &IntegratorConfig,
) -> Result<FlowTrace<CMatrix>> {
    integrate_metric_flow_inner(alg, h0, cfg, None, None)
}

/// Same flow, but records exactly the given sorted sample times.
pub fn integrate_metric_flow_sampled(
    alg: &ComplexLieAlgebra,
    h0: &HermitianMetric,
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<FlowTrace<CMatrix>> {
    integrate_metric_flow_inner(alg, h0, cfg, Some(sample_times), None)
}

/// Metric flow with a per-accepted-step state adjustment (used by the
/// normalized orbit experiments; the flow is scale-equivariant, so
/// renormalizing only reparametrizes time).
pub fn integrate_metric_flow_normalized(
    alg: &ComplexLieAlgebra,
    h0: &HermitianMetric,
    cfg: &IntegratorConfig,
    normalize: fn(&mut CMatrix),
) -> Result<FlowTrace<CMatrix>> {
    integrate_metric_flow_inner(alg, h0, cfg, None, Some(normalize))
}

fn integrate_metric_flow_inner(
    alg: &ComplexLieAlgebra,
    h0: &HermitianMetric,
    cfg: &IntegratorConfig,
    sample_times: Option<&[f64]>,
    extra_postprocess: Option<fn(&mut CMatrix)>,
) -> Result<FlowTrace<CMatrix>> {
    let floor = cfg.min_eig_floor.max(1.0 / cfg.blowup_norm_cap);
    let cap = cfg.blowup_norm_cap;
    let abs_tol = cfg.abs_tol;
    let out = rk::drive(
        |h: &CMatrix| metric_rhs_raw(alg, h),
        h0.matrix().clone(),
        cfg,
        sample_times,
        rk::Hooks {
            validate: |h: &CMatrix| HermitianMetric::new(h.clone()).is_ok(),
            postprocess: |h: &mut CMatrix| {
                *h = hermitize(h);
                if let Some(f) = extra_postprocess {
                    f(h);
                }
            },
            monitor_state: |t, h: &CMatrix| {
                let ev = crate::linalg::hermitian_eigenvalues(h);
                if ev[0] <= floor || h.norm() >= cap {
                    return Some(FlowEvent::BlowupDetected { t_est: t });
                }
                None
            },
            monitor_rhs: |t, _h: &CMatrix, k: &CMatrix| {
                if k.norm() <= abs_tol {
                    return Some(FlowEvent::Converged { t });
                }
                None
            },
        },
    )?;
    Ok(trace_from(out))
}

fn trace_from<S>(out: rk::DriveOutcome<S>) -> FlowTrace<S> {
    let mut times = Vec::with_capacity(out.records.len());
    let mut states = Vec::with_capacity(out.records.len());
    for r in out.records {
        times.push(r.t);
        states.push(r.state);
    }
    FlowTrace {
        times,
        states,
        events: out.event.into_iter().collect(),
        derived: BTreeMap::new(),
    }
}

/// Integrates a reduced system on the positive orthant: trial steps with a
/// non-positive coordinate are rejected, blow-up is flagged when any
/// coordinate passes the cap (with a reciprocal-fit estimate of the
/// singular time), convergence when ‖rhs‖ ≤ abs_tol.
pub fn integrate_reduced(
    rhs: impl Fn(&DVector<f64>) -> DVector<f64>,
    state0: &DVector<f64>,
    cfg: &IntegratorConfig,
) -> Result<FlowTrace<DVector<f64>>> {
    integrate_reduced_until(rhs, state0, cfg, |_, _| false)
}

/// Reduced integration recording exactly the given sorted sample times.
pub fn integrate_reduced_sampled(
    rhs: impl Fn(&DVector<f64>) -> DVector<f64>,
    state0: &DVector<f64>,
    cfg: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<FlowTrace<DVector<f64>>> {
    let out = rk::drive(
        |y: &DVector<f64>| Ok(rhs(y)),
        state0.clone(),
        cfg,
        Some(sample_times),
        rk::Hooks {
            validate: |y: &DVector<f64>| y.iter().all(|&v| v > 0.0 && v.is_finite()),
            postprocess: |_: &mut DVector<f64>| {},
            monitor_state: |_, _: &DVector<f64>| None,
            monitor_rhs: |_, _: &DVector<f64>, _: &DVector<f64>| None,
        },
    )?;
    Ok(trace_from(out))
}

/// Reduced integration with an additional stopping predicate evaluated on
/// accepted steps (`TargetReached` event).
pub fn integrate_reduced_until(
    rhs: impl Fn(&DVector<f64>) -> DVector<f64>,
    state0: &DVector<f64>,
    cfg: &IntegratorConfig,
    stop: impl Fn(f64, &DVector<f64>) -> bool,
) -> Result<FlowTrace<DVector<f64>>> {
    let cap = cfg.blowup_norm_cap;
    let abs_tol = cfg.abs_tol;
    let mut prev: Option<(f64, f64)> = None; // (t, max component)
    let out = rk::drive(
        |y: &DVector<f64>| Ok(rhs(y)),
        state0.clone(),
        cfg,
        None,
        rk::Hooks {
            validate: |y: &DVector<f64>| y.iter().all(|&v| v > 0.0 && v.is_finite()),
            postprocess: |_: &mut DVector<f64>| {},
            monitor_state: |t, y: &DVector<f64>| {
                let m = y.iter().fold(0.0f64, |a, &b| a.max(b));
                if m >= cap {
                    let t_est = match prev {
                        Some((tp, mp)) if mp > 0.0 && m > mp && t > tp => {
                            // 1/m decays to zero roughly linearly near blow-up
                            let slope = (1.0 / mp - 1.0 / m) / (t - tp);
                            if slope > 0.0 {
                                t + (1.0 / m) / slope
                            } else {
                                t
                            }
                        }
                        _ => t,
                    };
                    return Some(FlowEvent::BlowupDetected { t_est });
                }
                prev = Some((t, m));
                if stop(t, y) {
                    return Some(FlowEvent::TargetReached { t });
                }
                None
            },
            monitor_rhs: |t, _y: &DVector<f64>, k: &DVector<f64>| {
                if k.norm() <= abs_tol {
                    return Some(FlowEvent::Converged { t });
                }
                None
            },
        },
    )?;
    Ok(trace_from(out))
}

/// Rigorous bracket on the blow-up time of the metric-parameter system
/// from (x0, y0, z0): all coordinates are nondecreasing and the maximum M
/// obeys Ṁ ≤ (n+1)M² while the minimum obeys ṁ ≥ (n+1)m², so
/// T ∈ [((n+1)·max)⁻¹, ((n+1)·min)⁻¹].
pub fn blowup_time_bounds(x0: f64, y0: f64, z0: f64, n: usize) -> Result<(f64, f64)> {
    if x0 <= 0.0 || y0 <= 0.0 || z0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "blow-up bounds need positive initial data, got ({x0}, {y0}, {z0})"
        )));
    }
    let nf = (n + 1) as f64;
    let mn = x0.min(y0).min(z0);
    let mx = x0.max(y0).max(z0);
    Ok((1.0 / (nf * mx), 1.0 / (nf * mn)))
}

/// Comparison floor of the same system: every coordinate dominates
/// (min0⁻¹ − (n+1)t)⁻¹ while that expression is positive.
pub fn envelope_floor(min0: f64, n: usize, t: f64) -> f64 {
    let denom = 1.0 / min0 - ((n + 1) as f64) * t;
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / denom
    }
}

/// Gauged bracket curve of a metric trace: each sample H = L·L† is pushed
/// to (h·μ, Id) with the positive upper-triangular gauge h = L†, the unique
/// choice with h·H = Id of that form. Indefinite samples are skipped, each
/// recorded as an `IndefiniteSample` event.
pub struct BracketTrajectory {
    pub samples: Vec<(f64, ComplexLieAlgebra)>,
    pub events: Vec<FlowEvent>,
}

pub fn bracket_trajectory(
    alg: &ComplexLieAlgebra,
    trace: &FlowTrace<CMatrix>,
) -> Result<BracketTrajectory> {
    let mut samples = Vec::with_capacity(trace.len());
    let mut events = Vec::new();
    for (&t, state) in trace.times.iter().zip(&trace.states) {
        let metric = match HermitianMetric::new(state.clone()) {
            Ok(m) => m,
            Err(_) => {
                events.push(FlowEvent::IndefiniteSample { t });
                continue;
            }
        };
        let gauge = GaugeTransform::new(metric.chol_lower().adjoint())?;
        samples.push((t, gauge.act_bracket(alg)?));
    }
    Ok(BracketTrajectory { samples, events })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub last_distance: f64,
    pub best_distance: f64,
    pub converged: bool,
    pub monotone_tail: bool,
    /// Some sample (or the target) had zero norm in scale-free mode.
    pub degenerate: bool,
    pub threshold: f64,
    pub distances: Vec<f64>,
}

/// Distances of a bracket curve to a target bracket; in scale-free mode
/// both sides are normalized to unit Frobenius norm first. Converged means
/// the final distance is under the threshold with a non-increasing tail
/// (last quarter of the samples, small slack).
pub fn convergence_detect(
    trajectory: &[(f64, ComplexLieAlgebra)],
    target: &ComplexLieAlgebra,
    scale_free: bool,
    threshold: f64,
) -> Result<ConvergenceReport> {
    if trajectory.is_empty() {
        return Err(Error::InvalidParameter(
            "convergence_detect needs a non-empty trajectory".into(),
        ));
    }
    let mut degenerate = false;
    let cmp_target = if scale_free {
        match target.unit_normalized() {
            Some(t) => t,
            None => {
                degenerate = true;
                target.clone()
            }
        }
    } else {
        target.clone()
    };
    let mut distances = Vec::with_capacity(trajectory.len());
    for (_, b) in trajectory {
        let d = if scale_free {
            match b.unit_normalized() {
                Some(bn) => bn.distance(&cmp_target)?,
                None => {
                    degenerate = true;
                    b.distance(&cmp_target)?
                }
            }
        } else {
            b.distance(&cmp_target)?
        };
        distances.push(d);
    }
    let last = *distances.last().expect("non-empty");
    let best = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = distances
        .len()
        .saturating_sub((distances.len() / 4).max(3).min(distances.len()));
    let monotone_tail = distances[tail..]
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-12 + 1e-9 * w[0]);
    Ok(ConvergenceReport {
        last_distance: last,
        best_distance: best,
        converged: last < threshold && monotone_tail,
        monotone_tail,
        degenerate,
        threshold,
        distances,
    })
}
