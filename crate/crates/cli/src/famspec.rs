//! Textual family specs for the CLI, e.g. `sl(3)+trace`,
//! `heisenberg(2)+random`, `mu-yz(2,0.5,0.25)`, `mu-infinity(2)`,
//! `perfect-double(sl2):t=1`, `nu-ab(1,0.7)`.
//!
//! The optional `+trace` / `+random` suffix picks the metric: `trace` (the
//! default) is the identity matrix in the constructed basis, which for the
//! sl families is literally the trace form; `random` draws a seeded
//! positive definite metric.

use anyhow::{anyhow, bail, Context, Result};
use hcf_core::families::{build_heisenberg, build_perfect_double, build_sl, mu_infinity, mu_yz};
use hcf_core::{sampling, ComplexLieAlgebra, HermitianMetric};

pub struct FamilyTarget {
    pub name: String,
    pub algebra: ComplexLieAlgebra,
    pub metric: HermitianMetric,
}

pub fn list_families() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "sl(m)",
            "special linear algebra sl(m, ℂ), m ≥ 2, with the trace form",
        ),
        (
            "heisenberg(m)",
            "complex Heisenberg algebra of dimension 2m+1, m ≥ 1",
        ),
        (
            "mu-yz(n,y,z)",
            "gauged sl(n+1) bracket of the diagonal ansatz at (1, y, z)",
        ),
        (
            "mu-infinity(n)",
            "degenerate limit bracket sl_n ⋉ heisenberg, n ≥ 2",
        ),
        (
            "perfect-double(slM)[:t=T]",
            "perfect semidirect double of sl(M, ℂ); optional orbit point ν_t",
        ),
        (
            "nu-ab(a,b)",
            "orbit bracket ν_{a,b} of the perfect double over sl(2, ℂ)",
        ),
    ]
}

/// Parses `name(args)[:key=val][+metric]`.
pub fn parse_family(spec: &str, seed: u64) -> Result<FamilyTarget> {
    let (body, metric_kind) = match spec.rsplit_once('+') {
        Some((b, m)) => (b, m),
        None => (spec, "trace"),
    };
    let (body, options) = match body.split_once(':') {
        Some((b, o)) => (b, Some(o)),
        None => (body, None),
    };
    let (name, args) = split_call(body)?;

    let algebra = match name {
        "sl" => {
            let m = parse_one_usize(&args, "sl(m)")?;
            build_sl(m)?.0
        }
        "heisenberg" => {
            let m = parse_one_usize(&args, "heisenberg(m)")?;
            if m == 0 {
                bail!("heisenberg(m) needs m >= 1");
            }
            build_heisenberg(m)
        }
        "mu-yz" => {
            if args.len() != 3 {
                bail!("mu-yz takes (n, y, z)");
            }
            let n: usize = args[0].parse().context("mu-yz: n must be an integer")?;
            let y: f64 = args[1].parse().context("mu-yz: y must be a number")?;
            let z: f64 = args[2].parse().context("mu-yz: z must be a number")?;
            mu_yz(n, y, z)?
        }
        "mu-infinity" => {
            let n = parse_one_usize(&args, "mu-infinity(n)")?;
            mu_infinity(n)?
        }
        "perfect-double" => {
            let base = args
                .first()
                .ok_or_else(|| anyhow!("perfect-double takes a base, e.g. perfect-double(sl2)"))?;
            let m = base
                .strip_prefix("sl")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| anyhow!("unsupported base {base:?}; use sl2, sl3, ..."))?;
            let (alg, metric) = build_sl(m)?;
            let fam = build_perfect_double(&alg, &metric, 1e-8)?;
            match parse_t_option(options)? {
                Some(t) => fam.nu_ab(1.0, t)?,
                None => fam.nu().clone(),
            }
        }
        "nu-ab" => {
            if args.len() != 2 {
                bail!("nu-ab takes (a, b)");
            }
            let a: f64 = args[0].parse().context("nu-ab: a must be a number")?;
            let b: f64 = args[1].parse().context("nu-ab: b must be a number")?;
            let (alg, metric) = build_sl(2)?;
            build_perfect_double(&alg, &metric, 1e-8)?.nu_ab(a, b)?
        }
        other => bail!("unknown family {other:?}; `families list` shows the available ones"),
    };

    let metric = match metric_kind {
        "trace" => HermitianMetric::identity(algebra.dim()),
        "random" => {
            let mut rng = sampling::rng(seed);
            sampling::random_metric(&mut rng, algebra.dim(), 0.6)
        }
        other => bail!("unknown metric kind {other:?}; use +trace or +random"),
    };

    Ok(FamilyTarget {
        name: spec.to_string(),
        algebra,
        metric,
    })
}

fn split_call(body: &str) -> Result<(&str, Vec<String>)> {
    let body = body.trim();
    match body.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| anyhow!("missing closing parenthesis in {body:?}"))?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|s| s.trim().to_string()).collect()
            };
            Ok((name.trim(), args))
        }
        None => Ok((body, Vec::new())),
    }
}

fn parse_one_usize(args: &[String], what: &str) -> Result<usize> {
    if args.len() != 1 {
        bail!("{what} takes exactly one integer argument");
    }
    args[0]
        .parse()
        .with_context(|| format!("{what}: argument must be an integer"))
}

fn parse_t_option(options: Option<&str>) -> Result<Option<f64>> {
    let Some(opts) = options else { return Ok(None) };
    match opts.split_once('=') {
        Some(("t", v)) => Ok(Some(v.parse::<f64>().context("t option must be a number")?)),
        _ => bail!("unknown option {opts:?} (supported: t=<value>)"),
    }
}
