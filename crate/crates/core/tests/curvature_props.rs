//! Cross-module curvature properties: frame independence, positivity,
//! gauge equivariance, static certificates and their perfectness
//! consequence, and soliton certification on the worked families.

mod common;

use common::{oracle_curvature, rel_diff};
use hcf_core::families::{build_heisenberg, build_sl, mu_infinity};
use hcf_core::linalg::re;
use hcf_core::{
    gauge_equivariance_check, homothety_signature, sampling, soliton_check, static_check,
    ttcr_operator, CMatrix, ComplexLieAlgebra, HermitianMetric, SolitonVerdict,
};

fn example_algebras() -> Vec<(String, ComplexLieAlgebra)> {
    let mut out: Vec<(String, ComplexLieAlgebra)> = vec![
        ("h3".into(), build_heisenberg(1)),
        ("h5".into(), build_heisenberg(2)),
        ("sl2".into(), build_sl(2).unwrap().0),
        ("sl3".into(), build_sl(3).unwrap().0),
        ("mu_inf_2".into(), mu_infinity(2).unwrap()),
    ];
    out.push(("abelian".into(), ComplexLieAlgebra::abelian(4)));
    out
}

#[test]
fn operator_matches_independent_oracle_on_random_metrics() {
    let mut rng = sampling::rng(101);
    for (name, alg) in example_algebras() {
        for _ in 0..5 {
            let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
            let p = ttcr_operator(&alg, &g).unwrap();
            let q = oracle_curvature(&alg, &g);
            assert!(
                rel_diff(p.matrix(), &q) <= 1e-12,
                "{name}: oracle deviation {}",
                rel_diff(p.matrix(), &q)
            );
        }
    }
}

#[test]
fn frame_independence_via_oracle_frames() {
    // the oracle uses the spectral frame, the operator the Cholesky frame;
    // agreement on 20 random metrics is exactly frame independence
    let (sl3, _) = build_sl(3).unwrap();
    let mut rng = sampling::rng(7);
    for _ in 0..20 {
        let g = sampling::random_metric(&mut rng, sl3.dim(), 0.6);
        let p = ttcr_operator(&sl3, &g).unwrap();
        let q = oracle_curvature(&sl3, &g);
        assert!(rel_diff(p.matrix(), &q) <= 1e-12);
    }
}

#[test]
fn operator_is_positive_semidefinite() {
    let mut rng = sampling::rng(13);
    for (name, alg) in example_algebras() {
        let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
        let op = ttcr_operator(&alg, &g).unwrap();
        let ev = op.eigenvalues();
        let scale = op.matrix().norm().max(1e-300);
        assert!(
            ev[0] >= -1e-12 * scale,
            "{name}: negative eigenvalue {} at scale {scale}",
            ev[0]
        );
    }
}

#[test]
fn gauge_equivariance_holds_on_random_triples() {
    let mut rng = sampling::rng(29);
    let algebras = example_algebras();
    for i in 0..30 {
        let (_, alg) = &algebras[i % algebras.len()];
        let g = sampling::random_metric(&mut rng, alg.dim(), 0.5);
        let h = sampling::random_gauge(&mut rng, alg.dim(), 0.4);
        let r = gauge_equivariance_check(alg, &g, &h).unwrap();
        assert!(r <= 1e-10, "equivariance residual {r}");
    }
}

#[test]
fn equivariance_under_pure_scaling_is_exact() {
    let h3 = build_heisenberg(1);
    let mut rng = sampling::rng(19);
    let g = sampling::random_metric(&mut rng, 3, 0.5);
    let s = hcf_core::GaugeTransform::scaling(3, re(1.7)).unwrap();
    assert!(gauge_equivariance_check(&h3, &g, &s).unwrap() <= 1e-13);
}

#[test]
fn sl_static_certificates_and_perfectness() {
    for m in 2..=5usize {
        let (alg, trace_metric) = build_sl(m).unwrap();
        let lambda = static_check(&alg, &trace_metric, 1e-8)
            .unwrap()
            .expect("trace form is static");
        assert!(
            (lambda - m as f64).abs() <= 1e-9 * m as f64,
            "sl({m}): λ = {lambda}"
        );
        // a static metric with λ ≠ 0 forces a perfect algebra
        assert!(alg.is_perfect(1e-9));
    }
}

#[test]
fn sl2_theta_is_twice_the_trace_form() {
    let (sl2, trace_metric) = build_sl(2).unwrap();
    let theta = hcf_core::theta_form(&sl2, &trace_metric).unwrap();
    let want = trace_metric.matrix() * re(2.0);
    assert!((theta - want).norm() <= 1e-12);
}

#[test]
fn static_inputs_reported_static_by_soliton_check() {
    let (sl3, trace_metric) = build_sl(3).unwrap();
    let cert = soliton_check(&sl3, &trace_metric, 1e-8).unwrap();
    assert_eq!(cert.verdict, SolitonVerdict::Static);
    let lambda = static_check(&sl3, &trace_metric, 1e-8).unwrap().unwrap();
    assert!((cert.lambda - lambda).abs() <= 1e-9);
    assert_eq!(cert.d.norm(), 0.0);
}

#[test]
fn heisenberg_random_metrics_certify_algebraic() {
    let mut rng = sampling::rng(2024);
    for m in [1usize, 2] {
        let h = build_heisenberg(m);
        for _ in 0..5 {
            let g = sampling::random_metric(&mut rng, h.dim(), 0.6);
            let cert = soliton_check(&h, &g, 1e-8).unwrap();
            assert_eq!(cert.verdict, SolitonVerdict::Algebraic, "h_{}", 2 * m + 1);
            assert!(cert.lambda < 0.0, "expanding soliton expected");
        }
    }
}

#[test]
fn limit_bracket_is_a_shrinking_algebraic_soliton() {
    for n in [2usize, 3] {
        let nf = n as f64;
        let alg = mu_infinity(n).unwrap();
        let id = HermitianMetric::identity(alg.dim());
        let cert = soliton_check(&alg, &id, 1e-8).unwrap();
        assert_eq!(cert.verdict, SolitonVerdict::Algebraic);
        assert!((cert.lambda - nf).abs() <= 1e-9, "λ = {}", cert.lambda);
        assert_eq!(cert.scaling, hcf_core::ScalingClass::Shrinking);
        // Hermitian part of the witness is −(1/n)(2·Id_I + Id_s)
        let nsl = n * n - 1;
        let herm = (&cert.d + id.adjoint_of(&cert.d)) * re(0.5);
        let want = CMatrix::from_fn(alg.dim(), alg.dim(), |i, j| {
            re(if i != j || i < nsl {
                0.0
            } else if i == nsl {
                -2.0 / nf
            } else {
                -1.0 / nf
            })
        });
        assert!((herm - want).norm() <= 1e-9);
        // operator spectrum (n, (n²−2)/n, (n²−1)/n)
        let op = ttcr_operator(&alg, &id).unwrap();
        let ev = op.eigenvalues();
        let lo = (nf * nf - 2.0) / nf;
        let mid = (nf * nf - 1.0) / nf;
        assert!((ev[0] - lo).abs() <= 1e-9 && (ev[ev.len() - 1] - nf).abs() <= 1e-9);
        assert!(ev
            .iter()
            .all(|&e| (e - lo).abs() <= 1e-9 || (e - mid).abs() <= 1e-9 || (e - nf).abs() <= 1e-9));
        // the canonical diagonal map is a derivation of the limit bracket
        let d = CMatrix::from_fn(alg.dim(), alg.dim(), |i, j| {
            re(if i != j || i < nsl {
                0.0
            } else if i == nsl {
                2.0
            } else {
                1.0
            })
        });
        let (ok, r) = hcf_core::is_derivation(&alg, &d, 1e-10);
        assert!(ok, "derivation residual {r}");
        let der = hcf_core::derivation_space(&alg, 1e-9);
        assert!(der.contains(&d, 1e-10));
    }
}

#[test]
fn homothety_signature_is_scale_invariant_and_separates() {
    let (sl3, trace_metric) = build_sl(3).unwrap();
    let sig1 = homothety_signature(&sl3, &trace_metric).unwrap();
    let sig2 = homothety_signature(&sl3, &trace_metric.scaled(4.2).unwrap()).unwrap();
    for (a, b) in sig1.iter().zip(&sig2) {
        assert!((a - b).abs() <= 1e-12);
    }
    // static: all eigenvalues equal 1/dim after normalization
    for s in &sig1 {
        assert!((s - 1.0 / sl3.dim() as f64).abs() <= 1e-12);
    }
    // h3 signature {0, 0, 1} separates from the static one
    let h3sig = homothety_signature(&build_heisenberg(1), &HermitianMetric::identity(3)).unwrap();
    assert!((h3sig[2] - 1.0).abs() <= 1e-12 && h3sig[0].abs() <= 1e-12);
}
