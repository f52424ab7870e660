//! Flow-level properties: consistency of the matrix flow with the reduced
//! parameter system, the blow-up envelope, region invariance along
//! trajectories, bracket-trajectory identification, and integrator sanity.

use hcf_core::families::{
    asymptotic_ratio, build_sl, mu_infinity, mu_yz, region_d_membership, sigma_metric, xyz_rhs,
    yz_rhs,
};
use hcf_core::flow::integrate_reduced_sampled;
use hcf_core::linalg::re;
use hcf_core::{
    blowup_time_bounds, bracket_trajectory, convergence_detect, envelope_floor,
    integrate_metric_flow_sampled, integrate_reduced, integrate_reduced_until, FlowEvent,
    IntegratorConfig, Method,
};
use nalgebra::DVector;

fn tight(t_max: f64) -> IntegratorConfig {
    IntegratorConfig {
        t_max,
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        h_init: 1e-4,
        ..Default::default()
    }
}

#[test]
fn full_flow_matches_reduced_reconstruction() {
    // sl(n+1) from σ_{1, y0, z0}: the matrix flow must stay diagonal with
    // coefficients (1/x, 1/y, 1/z) solving the reduced system
    for n in [1usize, 2, 3] {
        let (alg, _) = build_sl(n + 1).unwrap();
        let nsl = n * n - 1;
        let (y0, z0) = (0.9, 0.9);
        // stay well inside the existence interval
        let t_end = 0.25 * blowup_time_bounds(1.0, y0, z0, n).unwrap().1;
        let samples: Vec<f64> = (0..=8).map(|i| t_end * i as f64 / 8.0).collect();

        let reduced = reduced_reference(n, &[1.0, y0, z0], &samples);
        let h0 = sigma_metric(n, 1.0, y0, z0).unwrap();
        let cfg = IntegratorConfig {
            t_max: t_end,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: 1e-4,
            ..Default::default()
        };
        let trace = integrate_metric_flow_sampled(&alg, &h0, &cfg, &samples).unwrap();
        assert_eq!(trace.len(), samples.len());

        let mut sup = 0.0f64;
        for (k, h) in trace.states.iter().enumerate() {
            let (x, y, z) = reduced[k];
            let want = sigma_metric(n, x, y, z).unwrap();
            let rel = (h - want.matrix()).norm() / want.matrix().norm();
            sup = sup.max(rel);
            // metric must also stay block-diagonal
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    if i != j {
                        assert!(h[(i, j)].norm() <= 1e-9, "off-diagonal growth");
                    }
                }
            }
            let _ = nsl;
        }
        assert!(
            sup <= 10.0 * 1e-9,
            "n = {n}: sup relative difference {sup:.3e}"
        );
    }
}

/// Reduced xyz solution at fixed sample times, at reference tolerance.
fn reduced_reference(n: usize, s0: &[f64], samples: &[f64]) -> Vec<(f64, f64, f64)> {
    let cfg = IntegratorConfig {
        t_max: samples.last().copied().unwrap_or(1.0).max(1e-9),
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        h_init: 1e-5,
        ..Default::default()
    };
    let trace =
        integrate_reduced_sampled(xyz_rhs(n), &DVector::from_vec(s0.to_vec()), &cfg, samples)
            .unwrap();
    trace.states.iter().map(|s| (s[0], s[1], s[2])).collect()
}

#[test]
fn blowup_envelope_holds_along_trajectories() {
    let n = 2;
    let cfg = tight(2.0);
    let s0 = DVector::from_vec(vec![1.0, 0.8, 0.75]);
    let trace = integrate_reduced(xyz_rhs(n), &s0, &cfg).unwrap();
    let t_est = trace.blowup_estimate().expect("blow-up in finite time");
    let (lo, hi) = blowup_time_bounds(1.0, 0.8, 0.75, n).unwrap();
    assert!(
        t_est <= hi + 1e-6 && t_est >= lo - 1e-9,
        "T_est = {t_est}, bounds ({lo}, {hi})"
    );
    let min0 = 0.75f64;
    for (k, &t) in trace.times.iter().enumerate() {
        let floor = envelope_floor(min0, n, t);
        if floor.is_finite() {
            let s = &trace.states[k];
            let m = s[0].min(s[1]).min(s[2]);
            assert!(
                m >= floor - 1e-6,
                "envelope broken at t = {t}: {m} < {floor}"
            );
        }
    }
}

#[test]
fn y_monotone_decreasing_inside_region() {
    // ẏ ≤ 0 exactly on D; checked pointwise along a trajectory from within
    let n = 2;
    let cfg = IntegratorConfig {
        t_max: 800.0,
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        ..Default::default()
    };
    let trace = integrate_reduced_until(
        yz_rhs(n),
        &DVector::from_vec(vec![0.99, 0.98]),
        &cfg,
        |_, s| s[0] < 1e-4,
    )
    .unwrap();
    assert!(trace.has_event(|e| matches!(e, FlowEvent::TargetReached { .. })));
    let f = yz_rhs(n);
    for s in &trace.states {
        let r = region_d_membership(n, s[0], s[1]);
        assert!(r.member, "trajectory left D at ({}, {})", s[0], s[1]);
        assert!(f(s)[0] <= 0.0);
    }
    // y is nonincreasing sample to sample
    for w in trace.states.windows(2) {
        assert!(w[1][0] <= w[0][0] + 1e-12);
    }
}

#[test]
fn rescaled_brackets_converge_scale_free() {
    // drive the normalized system into the degenerate regime and compare
    // μ_{y,z} against the limit bracket
    let n = 2;
    let cfg = IntegratorConfig {
        t_max: 4000.0,
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let trace = integrate_reduced_until(
        yz_rhs(n),
        &DVector::from_vec(vec![0.999, 0.999]),
        &cfg,
        |_, s| s[0] < 1e-8,
    )
    .unwrap();
    let target = mu_infinity(n).unwrap();
    let traj: Vec<(f64, hcf_core::ComplexLieAlgebra)> = trace
        .times
        .iter()
        .zip(&trace.states)
        .step_by(64)
        .chain(std::iter::once((
            trace.times.last().unwrap(),
            trace.states.last().unwrap(),
        )))
        .map(|(&t, s)| (t, mu_yz(n, s[0], s[1]).unwrap()))
        .collect();
    let report = convergence_detect(&traj, &target, true, 1e-3).unwrap();
    assert!(report.converged, "last distance {}", report.last_distance);
    // ratio asymptotics at the end of the run
    let s = trace.states.last().unwrap();
    let ratio = s[1] * s[1] / s[0];
    assert!((ratio - asymptotic_ratio(n).unwrap()).abs() <= 1e-4);
}

#[test]
fn bracket_trajectory_reproduces_gauged_parameters() {
    // along the diagonal ansatz the Cholesky gauge emits √x·μ_{y/x, z/x}
    let n = 2;
    let (alg, _) = build_sl(n + 1).unwrap();
    let h0 = sigma_metric(n, 1.0, 0.9, 0.9).unwrap();
    let t_end = 0.2;
    let samples: Vec<f64> = (0..=4).map(|i| t_end * i as f64 / 4.0).collect();
    let cfg = IntegratorConfig {
        t_max: t_end,
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        h_init: 1e-4,
        ..Default::default()
    };
    let trace = integrate_metric_flow_sampled(&alg, &h0, &cfg, &samples).unwrap();
    let traj = bracket_trajectory(&alg, &trace).unwrap();
    assert!(traj.events.is_empty());
    let nsl = n * n - 1;
    for (k, (_, bracket)) in traj.samples.iter().enumerate() {
        let h = &trace.states[k];
        let x = 1.0 / h[(0, 0)].re;
        let y = 1.0 / h[(nsl, nsl)].re;
        let z = 1.0 / h[(nsl + 1, nsl + 1)].re;
        let want = mu_yz(n, y / x, z / x).unwrap().scaled(re(x.sqrt()));
        assert!(
            bracket.distance(&want).unwrap() <= 1e-9 * want.norm(),
            "sample {k}: gauged bracket off"
        );
    }
}

#[test]
fn halving_tolerance_stabilizes_terminal_state() {
    let n = 2;
    let run = |rel: f64| {
        let cfg = IntegratorConfig {
            t_max: 3.0,
            rel_tol: rel,
            abs_tol: 1e-14,
            ..Default::default()
        };
        integrate_reduced(yz_rhs(n), &DVector::from_vec(vec![0.9, 0.8]), &cfg)
            .unwrap()
            .states
            .last()
            .unwrap()
            .clone()
    };
    let coarse = run(1e-6);
    let fine = run(5e-7);
    let rel = (&coarse - &fine).norm() / fine.norm();
    assert!(rel <= 5.0 * 1e-6, "terminal drift {rel:.3e}");
}

#[test]
fn fixed_step_rk4_is_deterministic_and_close() {
    let n = 2;
    let cfg = IntegratorConfig {
        method: Method::Rk4Fixed,
        h_init: 1e-3,
        t_max: 1.0,
        ..Default::default()
    };
    let s0 = DVector::from_vec(vec![0.9, 0.8]);
    let a = integrate_reduced(yz_rhs(n), &s0, &cfg).unwrap();
    let b = integrate_reduced(yz_rhs(n), &s0, &cfg).unwrap();
    assert_eq!(a.times, b.times);
    for (x, y) in a.states.iter().zip(&b.states) {
        assert_eq!(x, y, "bitwise reproducibility");
    }
    let tight_end = integrate_reduced(yz_rhs(n), &s0, &tight(1.0)).unwrap();
    let rel = (a.states.last().unwrap() - tight_end.states.last().unwrap()).norm();
    assert!(rel <= 1e-8, "rk4 drift {rel:.3e}");
}
