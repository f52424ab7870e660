//! The acceptance suite: twelve fixed criteria covering closed-form
//! curvature, the reduced dynamics (fixed points, invariant region,
//! attractor asymptotics, blow-up bounds), full-flow consistency, the
//! limit bracket, static and soliton certificates, homothety distinction,
//! and the property battery. Seeds and thresholds are pinned; `tighten`
//! scales every threshold (1.0 reproduces the committed values).

use hcf_core::families::{
    asymptotic_ratio, boundary_normal_test, build_heisenberg, build_perfect_double, build_sl,
    mu_infinity, mu_yz, p_nu_ab_closed_form, p_xyz_closed_form, region_d_membership, sigma_metric,
    xyz_rhs, yz_rhs, PerfectFamily, SOLITON_PARAMETER,
};
use hcf_core::linalg::{re, CMatrix};
use hcf_core::{
    blowup_time_bounds, convergence_detect, envelope_floor, gauge_equivariance_check,
    homothety_signature, integrate_metric_flow_sampled, integrate_reduced,
    integrate_reduced_sampled, integrate_reduced_until, is_derivation, sampling, soliton_check,
    static_check, ttcr_operator, ComplexLieAlgebra, HermitianMetric, IntegratorConfig,
    SolitonVerdict,
};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} [{}] {} — {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

pub fn run_all(tighten: f64) -> Vec<CriterionResult> {
    (1..=12)
        .map(|id| run_one(id, tighten).expect("ids 1..=12 exist"))
        .collect()
}

pub fn run_one(id: usize, tighten: f64) -> Option<CriterionResult> {
    let f: fn(f64) -> CriterionResult = match id {
        1 => c01_closed_form_curvature,
        2 => c02_fixed_points,
        3 => c03_region_invariance,
        4 => c04_instability_asymptotics,
        5 => c05_blowup_bound,
        6 => c06_flow_consistency,
        7 => c07_limit_bracket,
        8 => c08_static_certificates,
        9 => c09_perfect_family,
        10 => c10_homothety_distinction,
        11 => c11_heisenberg_solitons,
        12 => c12_property_suites,
        _ => return None,
    };
    Some(f(tighten))
}

fn result(id: usize, name: &'static str, passed: bool, details: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        details,
    }
}

/// Independent spectral-frame Gram-sum curvature, kept separate from the
/// library's Cholesky-frame implementation for the dual-route criteria.
fn spectral_frame_curvature(alg: &ComplexLieAlgebra, metric: &HermitianMetric) -> CMatrix {
    let h = metric.matrix();
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        let ev: f64 = eig.eigenvalues[i];
        d[(i, i)] = re(1.0 / ev.max(0.0).sqrt());
    }
    let frame = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    let mut p = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = alg
                .bracket(&frame.column(i).into_owned(), &frame.column(j).into_owned())
                .expect("dims agree");
            p += (&m * m.adjoint()) * h;
        }
    }
    p
}

fn c01_closed_form_curvature(tight: f64) -> CriterionResult {
    let threshold = 1e-9 * tight;
    let mut worst = 0.0f64;
    for n in 1usize..=4 {
        let (alg, _) = build_sl(n + 1).unwrap();
        let nsl = n * n - 1;
        let mut rng = sampling::rng(1000 + n as u64);
        for _ in 0..50 {
            let x = sampling::uniform(&mut rng, 0.1, 10.0);
            let y = sampling::uniform(&mut rng, 0.1, 10.0);
            let z = sampling::uniform(&mut rng, 0.1, 10.0);
            let metric = sigma_metric(n, x, y, z).unwrap();
            let p = ttcr_operator(&alg, &metric).unwrap();
            let [p1, p2, p3] = p_xyz_closed_form(n, x, y, z).unwrap();
            let want = CMatrix::from_fn(alg.dim(), alg.dim(), |i, j| {
                if i != j {
                    Complex64::ZERO
                } else if i < nsl {
                    re(p1)
                } else if i == nsl {
                    re(p2)
                } else {
                    re(p3)
                }
            });
            let rel = (p.matrix() - &want).norm() / want.norm();
            worst = worst.max(rel);
        }
    }
    result(
        1,
        "closed-form curvature matches the operator on the diagonal ansatz",
        worst <= threshold,
        format!("worst relative deviation {worst:.3e} over n ∈ 1..=4, 50 seeded points each (threshold {threshold:.1e})"),
    )
}

fn c02_fixed_points(_tight: f64) -> CriterionResult {
    let mut ok = true;
    for n in 2usize..=6 {
        let f = yz_rhs(n);
        let a = f(&DVector::from_vec(vec![1.0, 1.0]));
        let b = f(&DVector::from_vec(vec![0.0, 0.0]));
        ok &= a[0] == 0.0 && a[1] == 0.0 && b[0] == 0.0 && b[1] == 0.0;
    }
    result(
        2,
        "normalized system vanishes exactly at (1,1) and (0,0)",
        ok,
        "bitwise zero for n ∈ 2..=6".into(),
    )
}

fn c03_region_invariance(tight: f64) -> CriterionResult {
    let eps = 1e-12 * tight;
    let mut min_interior = f64::INFINITY;
    let mut worst_closed_form = 0.0f64;
    let mut ok = true;
    for n in [2usize, 3] {
        // 998 interior points plus the two equality points
        for k in 0..998 {
            let z = 1e-4 + (1.0 - 2e-4) * k as f64 / 997.0;
            let (ip, closed) = boundary_normal_test(n, z);
            ok &= ip >= -eps && ip > eps;
            min_interior = min_interior.min(ip);
            worst_closed_form = worst_closed_form.max((ip - closed).abs() / closed.max(1e-300));
        }
        for z in [0.0, 1.0] {
            let (ip, _) = boundary_normal_test(n, z);
            ok &= ip.abs() <= eps;
        }
    }
    result(
        3,
        "inward normal flux on the curved region boundary",
        ok,
        format!(
            "min interior ⟨N, v⟩ = {min_interior:.3e} > {eps:.1e}, equality only at z ∈ {{0, 1}}; closed-form deviation {worst_closed_form:.1e}"
        ),
    )
}

fn instability_run(n: usize, y_floor: f64) -> (f64, f64, f64) {
    // returns (y, z, t) at the first accepted state with y < y_floor
    let cfg = IntegratorConfig {
        t_max: 8000.0,
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        h_init: 1e-3,
        ..Default::default()
    };
    let trace = integrate_reduced_until(
        yz_rhs(n),
        &DVector::from_vec(vec![0.999, 0.999]),
        &cfg,
        move |_, s| s[0] < y_floor,
    )
    .expect("yz integration");
    let (t, s) = trace.last().expect("non-empty");
    (s[0], s[1], t)
}

fn c04_instability_asymptotics(tight: f64) -> CriterionResult {
    let threshold = 1e-4 * tight;
    let mut ok = true;
    let mut details = Vec::new();
    for n in [2usize, 3] {
        let target = asymptotic_ratio(n).unwrap();
        let (y, z, t) = instability_run(n, 1e-6);
        let dev = (z * z / y - target).abs();
        ok &= y < 1e-6 && dev <= threshold;
        details.push(format!(
            "n={n}: y = {y:.2e} at t = {t:.1}, |z²/y − {target:.6}| = {dev:.2e}"
        ));
    }
    result(
        4,
        "escape from the static point reaches the degenerate regime with the predicted ratio",
        ok,
        format!("{} (threshold {threshold:.1e})", details.join("; ")),
    )
}

fn c05_blowup_bound(tight: f64) -> CriterionResult {
    let slack = 1e-6 * tight;
    let n = 2usize;
    let mut rng = sampling::rng(505);
    let mut ok = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut envelope_ok = true;
    for _ in 0..20 {
        let z0 = sampling::uniform(&mut rng, 0.05, 0.999);
        let lo_y = region_d_membership(n, 0.0, z0).curve_y;
        let y0 = sampling::uniform(&mut rng, lo_y.min(1.0 - 1e-6), 1.0 - 1e-9);
        let cfg = IntegratorConfig {
            t_max: 5.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-4,
            ..Default::default()
        };
        let trace = integrate_reduced(xyz_rhs(n), &DVector::from_vec(vec![1.0, y0, z0]), &cfg)
            .expect("xyz integration");
        let t_est = trace.blowup_estimate().expect("blow-up detected");
        let (_, upper) = blowup_time_bounds(1.0, y0, z0, n).unwrap();
        ok &= t_est <= upper + slack;
        worst_gap = worst_gap.max(t_est - upper);
        let min0 = y0.min(z0);
        for (&t, s) in trace.times.iter().zip(&trace.states) {
            let floor = envelope_floor(min0, n, t);
            if floor.is_finite() && s[0].min(s[1]).min(s[2]) < floor - 1e-6 {
                envelope_ok = false;
            }
        }
    }
    result(
        5,
        "detected blow-up times respect the comparison bound and floor envelope",
        ok && envelope_ok,
        format!(
            "20 seeded starts: max(T_est − upper) = {worst_gap:.2e} ≤ {slack:.1e}, envelope intact: {envelope_ok}"
        ),
    )
}

fn c06_flow_consistency(tight: f64) -> CriterionResult {
    let rel_tol = 1e-8;
    let budget = 10.0 * rel_tol * tight;
    let n = 2usize;
    let (alg, _) = build_sl(n + 1).unwrap();
    let (y0, z0) = (0.9, 0.9);
    // blow-up horizon of the reduced system
    let probe = IntegratorConfig {
        t_max: 2.0,
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        h_init: 1e-4,
        ..Default::default()
    };
    let t_est = integrate_reduced(xyz_rhs(n), &DVector::from_vec(vec![1.0, y0, z0]), &probe)
        .unwrap()
        .blowup_estimate()
        .expect("blow-up");
    let t_end = 0.9 * t_est;
    let samples: Vec<f64> = (0..25).map(|i| t_end * i as f64 / 24.0).collect();

    let ref_cfg = IntegratorConfig {
        t_max: t_end,
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        h_init: 1e-5,
        ..Default::default()
    };
    let reduced = integrate_reduced_sampled(
        xyz_rhs(n),
        &DVector::from_vec(vec![1.0, y0, z0]),
        &ref_cfg,
        &samples,
    )
    .unwrap();

    let cfg = IntegratorConfig {
        t_max: t_end,
        rel_tol,
        abs_tol: 1e-12,
        h_init: 1e-4,
        ..Default::default()
    };
    let h0 = sigma_metric(n, 1.0, y0, z0).unwrap();
    let trace = integrate_metric_flow_sampled(&alg, &h0, &cfg, &samples).unwrap();

    let mut sup = 0.0f64;
    for (k, h) in trace.states.iter().enumerate() {
        let s = &reduced.states[k];
        let want = sigma_metric(n, s[0], s[1], s[2]).unwrap();
        sup = sup.max((h - want.matrix()).norm() / want.matrix().norm());
    }
    result(
        6,
        "matrix flow agrees with the reduced reconstruction on the ansatz",
        sup <= budget && trace.len() == samples.len(),
        format!(
            "sup relative difference {sup:.3e} over {} samples on [0, 0.9·T_est], T_est = {t_est:.4} (budget {budget:.1e})",
            samples.len()
        ),
    )
}

fn c07_limit_bracket(tight: f64) -> CriterionResult {
    let n = 2usize;
    let nf = n as f64;
    let mut ok = true;
    let mut notes = Vec::new();

    let limit = mu_infinity(n).unwrap();
    let jac = limit.jacobi_residual();
    ok &= jac <= 1e-12 * tight;

    // Heisenberg relations inside the degenerate ideal
    let nsl = n * n - 1;
    let want = (nf * nf - 2.0).sqrt() / nf;
    let mut rel_err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let br = limit.bracket_basis(nsl + 1 + i, nsl + 1 + n + j);
            let expect = if i == j { want } else { 0.0 };
            rel_err = rel_err.max((br[nsl].re - expect).abs());
            rel_err = rel_err.max(br[nsl].im.abs());
        }
        rel_err = rel_err.max(limit.bracket_basis(nsl, nsl + 1 + i).norm());
    }
    ok &= rel_err <= 1e-12 * tight;

    // algebraic certificate with the predicted spectrum
    let id = HermitianMetric::identity(limit.dim());
    let cert = soliton_check(&limit, &id, 1e-8).unwrap();
    ok &= cert.verdict == SolitonVerdict::Algebraic;
    let ev = ttcr_operator(&limit, &id).unwrap().eigenvalues();
    let expected = [(nf * nf - 2.0) / nf, (nf * nf - 1.0) / nf, nf];
    let spec_err = ev
        .iter()
        .map(|e| {
            expected
                .iter()
                .map(|w| (e - w).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    ok &= spec_err <= 1e-9 * tight;
    notes.push(format!(
        "jacobi {jac:.1e}, ideal relations {rel_err:.1e}, verdict {} (λ = {:.9}), spectrum deviation {spec_err:.1e}",
        cert.verdict, cert.lambda
    ));

    // scale-free convergence of the rescaled trajectory
    let cfg = IntegratorConfig {
        t_max: 8000.0,
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        h_init: 1e-3,
        ..Default::default()
    };
    let trace = integrate_reduced_until(
        yz_rhs(n),
        &DVector::from_vec(vec![0.999, 0.999]),
        &cfg,
        |_, s| s[0] < 1e-8,
    )
    .unwrap();
    let stride = (trace.len() / 120).max(1);
    let mut traj = Vec::new();
    for (k, (&t, s)) in trace.times.iter().zip(&trace.states).enumerate() {
        if k % stride == 0 || k + 1 == trace.len() {
            traj.push((t, mu_yz(n, s[0], s[1]).unwrap()));
        }
    }
    let report = convergence_detect(&traj, &limit, true, 1e-3 * tight).unwrap();
    ok &= report.converged;
    notes.push(format!(
        "scale-free distance {:.2e} (threshold {:.1e}), monotone tail: {}",
        report.last_distance, report.threshold, report.monotone_tail
    ));

    result(
        7,
        "rescaled brackets converge to the limit soliton",
        ok,
        notes.join("; "),
    )
}

fn c08_static_certificates(tight: f64) -> CriterionResult {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in 2usize..=5 {
        let (alg, metric) = build_sl(m).unwrap();
        let lambda = static_check(&alg, &metric, 1e-8).unwrap();
        let good = match lambda {
            Some(l) => (l - m as f64).abs() <= 1e-9 * tight * m as f64,
            None => false,
        };
        let perfect = alg.is_perfect(1e-9);
        ok &= good && perfect;
        notes.push(format!("sl({m}): λ = {:?}, perfect: {perfect}", lambda));
    }
    result(
        8,
        "trace forms are static with λ = m and perfect algebras",
        ok,
        notes.join("; "),
    )
}

fn perfect_family() -> PerfectFamily {
    let (sl2, trace_metric) = build_sl(2).unwrap();
    build_perfect_double(&sl2, &trace_metric, 1e-8).unwrap()
}

fn c09_perfect_family(tight: f64) -> CriterionResult {
    let mut ok = true;
    let mut notes = Vec::new();
    let fam = perfect_family();
    let id = HermitianMetric::identity(fam.dim());

    // closed form vs operator on 50 seeded points
    let mut rng = sampling::rng(909);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = sampling::uniform(&mut rng, 0.5, 2.0);
        let b = sampling::uniform(&mut rng, -2.0, 2.0);
        let alg = fam.nu_ab(a, b).unwrap();
        let p = ttcr_operator(&alg, &id).unwrap();
        let blk = p_nu_ab_closed_form(a, b).unwrap();
        let m = fam.base_dim();
        let want = CMatrix::from_fn(fam.dim(), fam.dim(), |i, j| {
            if i % m == j % m {
                re(blk[usize::from(i >= m)][usize::from(j >= m)])
            } else {
                Complex64::ZERO
            }
        });
        worst = worst.max((p.matrix() - &want).norm() / want.norm());
    }
    ok &= worst <= 1e-9 * tight;
    notes.push(format!("closed form vs operator: worst {worst:.2e}"));

    // certificates: ν_0 algebraic; the soliton pair semi-algebraic with
    // solver-derived λ = 2 and non-derivation adjoint witness
    let cert0 = soliton_check(&fam.nu_ab(1.0, 0.0).unwrap(), &id, 1e-8).unwrap();
    ok &= cert0.verdict == SolitonVerdict::Algebraic && (cert0.lambda - 1.0).abs() <= 1e-9;
    let t_star = SOLITON_PARAMETER;
    for t in [t_star, -t_star] {
        let cert = soliton_check(&fam.nu_ab(1.0, t).unwrap(), &id, 1e-8).unwrap();
        let good = cert.verdict == SolitonVerdict::SemiAlgebraic
            && (cert.lambda - 2.0).abs() <= 1e-9 * tight
            && cert.dstar_residual >= 0.1 / tight.max(1e-12);
        ok &= good;
        if t > 0.0 {
            notes.push(format!(
                "ν_{{t = {t}}}: {} λ = {:.9}, D*-residual {:.3}",
                cert.verdict, cert.lambda, cert.dstar_residual
            ));
        }
    }
    // the historical candidate parameter does not close (recorded, not asserted)
    let quarter = 2.0f64.powf(-0.25);
    let cq = soliton_check(&fam.nu_ab(1.0, quarter).unwrap(), &id, 1e-8).unwrap();
    notes.push(format!(
        "ν_{{t = 2^(−1/4)}} recorded: {} residual {:.2e}",
        cq.verdict, cq.residual
    ));

    // unitary conjugacy of the ± pairs
    let kq = fam.k_conjugacy_distance(quarter).unwrap();
    let ks = fam.k_conjugacy_distance(t_star).unwrap();
    ok &= kq <= 1e-12 * tight && ks <= 1e-12 * tight;
    notes.push(format!(
        "k-conjugacy distances: {kq:.1e} (2^(−1/4)), {ks:.1e} (soliton)"
    ));

    result(
        9,
        "perfect family certificates and closed forms",
        ok,
        notes.join("; "),
    )
}

fn c10_homothety_distinction(tight: f64) -> CriterionResult {
    let fam = perfect_family();
    let id = HermitianMetric::identity(fam.dim());
    let threshold = 0.05 * tight;
    let sig = |t: f64| homothety_signature(&fam.nu_ab(1.0, t).unwrap(), &id).unwrap();
    let s0 = sig(0.0);
    let sq = sig(2.0f64.powf(-0.25));
    let s11 = sig(1.0);
    let sup = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    let d_qu = sup(&s0, &sq);
    let d_11 = sup(&s0, &s11);
    let passed = d_qu >= threshold && d_11 >= threshold;
    // reported closed-form invariants: trace/det of the blocks at t ∈ {0, 1}
    let b0 = p_nu_ab_closed_form(1.0, 0.0).unwrap();
    let b1 = p_nu_ab_closed_form(1.0, 1.0).unwrap();
    result(
        10,
        "normalized spectra separate the orbit points",
        passed,
        format!(
            "sup distances: ν_0 vs ν_{{2^(−1/4)}} = {d_qu:.4}, ν_0 vs ν_{{1,1}} = {d_11:.4} (threshold {threshold}); block tr/det: ν_0 ({}, {}), ν_{{1,1}} ({}, {})",
            b0[0][0] + b0[1][1],
            b0[0][0] * b0[1][1],
            b1[0][0] + b1[1][1],
            b1[0][0] * b1[1][1] - b1[0][1] * b1[1][0],
        ),
    )
}

fn c11_heisenberg_solitons(_tight: f64) -> CriterionResult {
    let mut rng = sampling::rng(1111);
    let mut ok = true;
    let mut count = 0usize;
    for m in [1usize, 2] {
        let h = build_heisenberg(m);
        for _ in 0..10 {
            let g = sampling::random_metric(&mut rng, h.dim(), 0.6);
            let cert = soliton_check(&h, &g, 1e-8).unwrap();
            ok &= cert.verdict == SolitonVerdict::Algebraic && cert.lambda < 0.0;
            count += 1;
        }
    }
    result(
        11,
        "random Heisenberg metrics certify as expanding algebraic solitons",
        ok,
        format!("{count} seeded metrics on h₃ and h₅"),
    )
}

fn c12_property_suites(tight: f64) -> CriterionResult {
    let mut ok = true;
    let mut notes = Vec::new();
    let algebras: Vec<ComplexLieAlgebra> = vec![
        build_heisenberg(1),
        build_heisenberg(2),
        build_sl(2).unwrap().0,
        build_sl(3).unwrap().0,
        mu_infinity(2).unwrap(),
        perfect_family().nu_ab(1.0, 0.7).unwrap(),
    ];

    // gauge equivariance on 100 seeded triples
    let mut rng = sampling::rng(1212);
    let mut worst_eq = 0.0f64;
    for k in 0..100 {
        let alg = &algebras[k % algebras.len()];
        let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
        let h = sampling::random_gauge(&mut rng, alg.dim(), 0.4);
        worst_eq = worst_eq.max(gauge_equivariance_check(alg, &g, &h).unwrap());
    }
    ok &= worst_eq <= 1e-10 * tight;
    notes.push(format!("equivariance worst {worst_eq:.2e}"));

    // frame independence: Cholesky frame vs spectral frame
    let mut worst_frame = 0.0f64;
    for alg in &algebras {
        let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
        let p = ttcr_operator(alg, &g).unwrap();
        let q = spectral_frame_curvature(alg, &g);
        let scale = p.matrix().norm().max(1e-300);
        worst_frame = worst_frame.max((p.matrix() - q).norm() / scale);
    }
    ok &= worst_frame <= 1e-12 * tight;
    notes.push(format!("frame independence worst {worst_frame:.2e}"));

    // positive semidefiniteness
    let mut worst_psd = 0.0f64;
    for alg in &algebras {
        let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
        let op = ttcr_operator(alg, &g).unwrap();
        let min_ev = op.eigenvalues()[0];
        let scale = op.matrix().norm().max(1e-300);
        worst_psd = worst_psd.max(-min_ev / scale);
    }
    ok &= worst_psd <= 1e-12 * tight;
    notes.push(format!("PSD worst negative part {worst_psd:.2e}"));

    // inner derivations
    let mut worst_inner = 0.0f64;
    for alg in &algebras {
        for _ in 0..5 {
            let v = sampling::random_vector(&mut rng, alg.dim());
            let (_, r) = is_derivation(alg, &alg.ad(&v).unwrap(), 1e-10);
            worst_inner = worst_inner.max(r);
        }
    }
    ok &= worst_inner <= 1e-10 * tight;
    notes.push(format!("inner-derivation worst {worst_inner:.2e}"));

    result(
        12,
        "property battery (equivariance, frames, positivity, derivations)",
        ok,
        notes.join("; "),
    )
}
