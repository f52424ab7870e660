//! Embedded Dormand–Prince 5(4) stepper with PI step-size control, plus a
//! fixed-step RK4 for byte-reproducible runs. State types only need
//! axpy/scale/norm; right-hand sides may fail (e.g. a trial metric loses
//! positivity), which rejects the step and retries at half the size.

use crate::error::{Error, Result};
use crate::flow::{FlowEvent, IntegratorConfig, Method};

pub trait OdeState: Clone {
    /// self += a·x
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale_mut(&mut self, a: f64);
    fn norm(&self) -> f64;
}

impl OdeState for nalgebra::DVector<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * a;
    }
    fn scale_mut(&mut self, a: f64) {
        *self *= a;
    }
    fn norm(&self) -> f64 {
        nalgebra::DVector::norm(self)
    }
}

impl OdeState for crate::linalg::CMatrix {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += x * crate::linalg::re(a);
    }
    fn scale_mut(&mut self, a: f64) {
        *self *= crate::linalg::re(a);
    }
    fn norm(&self) -> f64 {
        nalgebra::DMatrix::norm(self)
    }
}

// Dormand–Prince 5(4) tableau (stage nodes are implicit: the systems
// integrated here are autonomous)
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Error weights b5 − b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) struct StepRecord<S> {
    pub t: f64,
    pub state: S,
}

pub(crate) struct DriveOutcome<S> {
    pub records: Vec<StepRecord<S>>,
    pub event: Option<FlowEvent>,
}

/// Step-acceptance hooks: `validate` vetoes trial states (the step is
/// rejected and retried smaller), `postprocess` adjusts accepted states,
/// `monitor_state` inspects accepted states before their velocity is
/// evaluated (so degenerate states stop the run without another rhs
/// call), `monitor_rhs` sees the state together with its velocity.
pub(crate) struct Hooks<V, P, MS, MR> {
    pub validate: V,
    pub postprocess: P,
    pub monitor_state: MS,
    pub monitor_rhs: MR,
}

/// Integrates ẏ = f(y) from t = 0 to cfg.t_max, clamping steps onto
/// `sample_times` when given (sorted, within range).
pub(crate) fn drive<S, F, V, P, MS, MR>(
    mut rhs: F,
    y0: S,
    cfg: &IntegratorConfig,
    sample_times: Option<&[f64]>,
    hooks: Hooks<V, P, MS, MR>,
) -> Result<DriveOutcome<S>>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
    V: FnMut(&S) -> bool,
    P: FnMut(&mut S),
    MS: FnMut(f64, &S) -> Option<FlowEvent>,
    MR: FnMut(f64, &S, &S) -> Option<FlowEvent>,
{
    let Hooks {
        mut validate,
        mut postprocess,
        mut monitor_state,
        mut monitor_rhs,
    } = hooks;
    cfg.validate()?;
    let span = cfg.t_max;
    let h_floor = 1e-14 * span;
    let mut records = Vec::new();
    let mut sample_idx = 0usize;

    let mut t = 0.0f64;
    let mut y = y0;
    postprocess(&mut y);
    if !validate(&y) {
        return Err(Error::Integration("initial state is invalid".into()));
    }

    let record_initial = match sample_times {
        None => true,
        Some(ts) => {
            if ts.first().is_some_and(|&t0| t0 <= 1e-15 * span.max(1.0)) {
                sample_idx = 1;
                true
            } else {
                false
            }
        }
    };
    if record_initial {
        records.push(StepRecord {
            t,
            state: y.clone(),
        });
    }

    if let Some(ev) = monitor_state(t, &y) {
        return Ok(DriveOutcome {
            records,
            event: Some(ev),
        });
    }
    let mut k1 = rhs(&y)?;
    if let Some(ev) = monitor_rhs(t, &y, &k1) {
        return Ok(DriveOutcome {
            records,
            event: Some(ev),
        });
    }

    let mut h = cfg.h_init.min(span);
    let mut err_prev = 1e-4f64;
    let fixed = cfg.method == Method::Rk4Fixed;

    for _ in 0..cfg.max_steps {
        if t >= span - 1e-15 * span.max(1.0) {
            return Ok(DriveOutcome {
                records,
                event: Some(FlowEvent::MaxTimeReached),
            });
        }
        // clamp onto the next stop (sample time or final time)
        let next_stop = match sample_times {
            Some(ts) if sample_idx < ts.len() => ts[sample_idx].min(span),
            _ => span,
        };
        let remaining = next_stop - t;
        if remaining <= h_floor {
            // already at this stop (a sample time coinciding with t)
            sample_idx += 1;
            continue;
        }
        let h_eff = h.min(remaining);

        let trial = if fixed {
            rk4_step(&mut rhs, &y, &k1, h_eff)
        } else {
            dopri_step(&mut rhs, &y, &k1, h_eff)
        };

        let step = match trial {
            Ok(s) => s,
            Err(_) => {
                // stage failure (e.g. indefinite trial metric): shrink
                h = h_eff * 0.5;
                if h < h_floor {
                    return Err(Error::Integration(format!(
                        "step size underflow at t = {t:.6e} after stage failure"
                    )));
                }
                continue;
            }
        };

        let mut y_new = step.y_new;
        let err = if fixed {
            0.0
        } else {
            step.err / (cfg.abs_tol + cfg.rel_tol * y.norm().max(y_new.norm()))
        };

        if !fixed && err > 1.0 {
            h = h_eff * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_floor {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {t:.6e} (error control)"
                )));
            }
            continue;
        }

        postprocess(&mut y_new);
        if !validate(&y_new) {
            h = h_eff * 0.5;
            if h < h_floor {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {t:.6e} (state validation)"
                )));
            }
            continue;
        }

        // accepted
        t += h_eff;
        y = y_new;

        let at_sample = match sample_times {
            Some(ts) if sample_idx < ts.len() => {
                let hit = (t - ts[sample_idx].min(span)).abs() <= 1e-12 * span.max(1.0);
                if hit {
                    sample_idx += 1;
                }
                hit
            }
            Some(_) => false,
            None => true,
        };
        if at_sample {
            records.push(StepRecord {
                t,
                state: y.clone(),
            });
        }

        if let Some(ev) = monitor_state(t, &y) {
            return Ok(DriveOutcome {
                records,
                event: Some(ev),
            });
        }
        k1 = rhs(&y)?;
        if let Some(ev) = monitor_rhs(t, &y, &k1) {
            return Ok(DriveOutcome {
                records,
                event: Some(ev),
            });
        }

        if !fixed {
            let errc = err.max(1e-10);
            let fac = (0.9 * errc.powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 5.0);
            h = (h_eff * fac).min(span);
            err_prev = errc;
        } else {
            h = cfg.h_init;
        }
    }

    Err(Error::Integration(format!(
        "step budget exhausted ({} steps) at t = {t:.6e}",
        cfg.max_steps
    )))
}

struct Trial<S> {
    y_new: S,
    err: f64,
}

fn dopri_step<S: OdeState>(
    rhs: &mut impl FnMut(&S) -> Result<S>,
    y: &S,
    k1: &S,
    h: f64,
) -> Result<Trial<S>> {
    let mut k: Vec<S> = Vec::with_capacity(7);
    k.push(k1.clone());
    for stage in 1..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[stage - 1][j];
            if a != 0.0 {
                ys.axpy(h * a, kj);
            }
        }
        if stage == 6 {
            // y_new assembled from row 7 == B5 with k7 pending: ys is y_new
            let mut err_state = k[0].clone();
            err_state.scale_mut(E[0]);
            for (j, kj) in k.iter().enumerate().skip(1) {
                if E[j] != 0.0 {
                    err_state.axpy(E[j], kj);
                }
            }
            // k7 = f(y_new) contributes to the error estimate
            let k7 = rhs(&ys)?;
            err_state.axpy(E[6], &k7);
            err_state.scale_mut(h);
            return Ok(Trial {
                y_new: ys,
                err: err_state.norm(),
            });
        }
        k.push(rhs(&ys)?);
    }
    unreachable!("loop returns at stage 6");
}

fn rk4_step<S: OdeState>(
    rhs: &mut impl FnMut(&S) -> Result<S>,
    y: &S,
    k1: &S,
    h: f64,
) -> Result<Trial<S>> {
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, k1);
    let k2 = rhs(&y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = rhs(&y3)?;
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = rhs(&y4)?;
    let mut y_new = y.clone();
    y_new.axpy(h / 6.0, k1);
    y_new.axpy(h / 3.0, &k2);
    y_new.axpy(h / 3.0, &k3);
    y_new.axpy(h / 6.0, &k4);
    Ok(Trial { y_new, err: 0.0 })
}
