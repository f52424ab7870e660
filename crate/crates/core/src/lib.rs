//! Numerical laboratory for the positive Hermitian curvature flow
//! restricted to left-invariant metrics on complex Lie groups.
//!
//! The crate works entirely at the Lie-algebra level: a left-invariant
//! geometry is a pair (μ, H) of a complex structure-constant tensor and a
//! positive definite Hermitian matrix. On top of that substrate it
//! provides
//!
//! - the torsion-twisted Chern–Ricci operator P = ½ Σ ad_Z ad_Z* and the
//!   flow ∂_t H = −H·P ([`curvature`], [`flow`]),
//! - static/soliton certification by least squares over the derivation
//!   algebra ([`curvature::soliton_check`]),
//! - the gauge dictionary between metric trajectories and curves of Lie
//!   brackets, with scale-free convergence detection ([`flow`]),
//! - constructors and closed forms for the worked families: complex
//!   Heisenberg algebras, sl(n+1, ℂ) with its diagonal ansatz and
//!   degenerate limit, and perfect semidirect doubles ([`families`]),
//! - versioned JSON/CSV interchange ([`io`]).
//!
//! # Example
//!
//! The trace form of sl(3, ℂ) is a static metric with λ = 3, so the flow
//! shrinks it along its ray:
//!
//! ```
//! use hcf_core::{integrate_metric_flow, static_check, IntegratorConfig};
//! use hcf_core::families::build_sl;
//!
//! let (sl3, trace_metric) = build_sl(3)?;
//! let lambda = static_check(&sl3, &trace_metric, 1e-8)?.expect("static");
//! assert!((lambda - 3.0).abs() < 1e-9);
//!
//! let cfg = IntegratorConfig { t_max: 0.1, ..Default::default() };
//! let trace = integrate_metric_flow(&sl3, &trace_metric, &cfg)?;
//! let (t, last) = trace.last().expect("non-empty");
//! // H(t) = (1 - 3t)·Id
//! assert!((last[(0, 0)].re - (1.0 - 3.0 * t)).abs() < 1e-6);
//! # Ok::<(), hcf_core::Error>(())
//! ```

pub mod algebra;
pub mod curvature;
pub mod error;
pub mod families;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod sampling;

pub use algebra::{
    derivation_space, is_derivation, ComplexLieAlgebra, DerivationSpace, GaugeTransform,
    HermitianMetric,
};
pub use curvature::{
    gauge_equivariance_check, homothety_signature, soliton_check, static_check, theta_form,
    ttcr_operator, CurvatureOperator, ScalingClass, SolitonCertificate, SolitonVerdict,
};
pub use error::{Error, Result};
pub use flow::{
    blowup_time_bounds, bracket_trajectory, convergence_detect, envelope_floor,
    integrate_metric_flow, integrate_metric_flow_sampled, integrate_reduced,
    integrate_reduced_sampled, integrate_reduced_until, metric_flow_rhs, ConvergenceReport,
    FlowEvent, FlowTrace, IntegratorConfig, Method,
};
pub use linalg::{CMatrix, CVector};
