//! File formats: versioned JSON for algebras and metrics ("hcf-lab/1"),
//! certificate JSON, and CSV export of flow traces with a JSON event
//! sidecar.
//!
//! Algebra files list only i < j structure entries (0-based indices); the
//! reader antisymmetrizes. Metric files store the full matrix row-major as
//! (re, im) pairs.

use crate::algebra::{ComplexLieAlgebra, HermitianMetric};
use crate::curvature::SolitonCertificate;
use crate::error::{Error, Result};
use crate::flow::{FlowEvent, FlowTrace};
use crate::linalg::{cplx, matrix_to_pairs, pairs_to_matrix, CMatrix};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const FORMAT_TAG: &str = "hcf-lab/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub format: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub constants: Vec<ConstantEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricFile {
    pub format: String,
    pub dim: usize,
    /// Row-major (re, im) pairs.
    pub entries: Vec<[f64; 2]>,
}

pub fn algebra_to_file(alg: &ComplexLieAlgebra) -> AlgebraFile {
    let n = alg.dim();
    let mut constants = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                let c = alg.structure_constant(k, i, j);
                if c.re != 0.0 || c.im != 0.0 {
                    constants.push(ConstantEntry {
                        i,
                        j,
                        k,
                        re: c.re,
                        im: c.im,
                    });
                }
            }
        }
    }
    AlgebraFile {
        format: FORMAT_TAG.into(),
        dim: n,
        labels: alg.labels().map(|l| l.to_vec()),
        constants,
    }
}

pub fn algebra_from_file(file: &AlgebraFile) -> Result<ComplexLieAlgebra> {
    check_format(&file.format)?;
    let n = file.dim;
    if n == 0 {
        return Err(Error::Format("algebra dimension must be positive".into()));
    }
    let mut slices = vec![CMatrix::zeros(n, n); n];
    for e in &file.constants {
        if e.i >= e.j {
            return Err(Error::Format(format!(
                "constants must list only i < j entries, got (i={}, j={})",
                e.i, e.j
            )));
        }
        if e.j >= n || e.k >= n {
            return Err(Error::Format(format!(
                "constant index out of range: (i={}, j={}, k={}) with dim {}",
                e.i, e.j, e.k, n
            )));
        }
        let c = cplx(e.re, e.im);
        slices[e.k][(e.i, e.j)] += c;
        slices[e.k][(e.j, e.i)] -= c;
    }
    let mut alg = ComplexLieAlgebra::new(slices, None)?;
    if let Some(ref l) = file.labels {
        if l.len() != n {
            return Err(Error::Format("label count differs from dimension".into()));
        }
        alg.set_labels(l.clone());
    }
    Ok(alg)
}

pub fn metric_to_file(metric: &HermitianMetric) -> MetricFile {
    MetricFile {
        format: FORMAT_TAG.into(),
        dim: metric.dim(),
        entries: matrix_to_pairs(metric.matrix()),
    }
}

pub fn metric_from_file(file: &MetricFile) -> Result<HermitianMetric> {
    check_format(&file.format)?;
    let m = pairs_to_matrix(file.dim, &file.entries)
        .ok_or_else(|| Error::Format("metric entry count differs from dim²".into()))?;
    HermitianMetric::new(m)
}

fn check_format(tag: &str) -> Result<()> {
    if tag != FORMAT_TAG {
        return Err(Error::Format(format!(
            "unsupported format tag {tag:?}, expected {FORMAT_TAG:?}"
        )));
    }
    Ok(())
}

pub fn write_algebra(path: &Path, alg: &ComplexLieAlgebra) -> Result<()> {
    let json = serde_json::to_string_pretty(&algebra_to_file(alg))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn read_algebra(path: &Path) -> Result<ComplexLieAlgebra> {
    let text = std::fs::read_to_string(path)?;
    algebra_from_file(&serde_json::from_str(&text)?)
}

pub fn write_metric(path: &Path, metric: &HermitianMetric) -> Result<()> {
    let json = serde_json::to_string_pretty(&metric_to_file(metric))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn read_metric(path: &Path) -> Result<HermitianMetric> {
    let text = std::fs::read_to_string(path)?;
    metric_from_file(&serde_json::from_str(&text)?)
}

/// Certificate JSON with the witness matrix packed row-major (re, im).
pub fn certificate_to_json(cert: &SolitonCertificate) -> serde_json::Value {
    serde_json::json!({
        "verdict": cert.verdict.to_string(),
        "lambda": cert.lambda,
        "residual": cert.residual,
        "D": matrix_to_pairs(&cert.d),
        "D_star_is_derivation": cert.dstar_is_derivation,
        "D_star_derivation_residual": cert.dstar_residual,
        "scaling": cert.scaling,
        "tol": cert.tol,
    })
}

/// Per-sample row content for CSV export.
pub trait TraceState {
    fn headers(&self, labels: Option<&[String]>) -> Vec<String>;
    fn row(&self) -> Vec<f64>;
}

impl TraceState for DVector<f64> {
    fn headers(&self, labels: Option<&[String]>) -> Vec<String> {
        (0..self.len())
            .map(|i| match labels.and_then(|l| l.get(i)) {
                Some(name) => name.clone(),
                None => format!("state{i}"),
            })
            .collect()
    }
    fn row(&self) -> Vec<f64> {
        self.iter().copied().collect()
    }
}

impl TraceState for CMatrix {
    fn headers(&self, _labels: Option<&[String]>) -> Vec<String> {
        let mut out = Vec::with_capacity(2 * self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(format!("H_{i}_{j}_re"));
                out.push(format!("H_{i}_{j}_im"));
            }
        }
        out
    }
    fn row(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(self[(i, j)].re);
                out.push(self[(i, j)].im);
            }
        }
        out
    }
}

/// CSV with a header row: t, state components (re/im interleaved for
/// matrices), then derived scalar columns.
pub fn trace_to_csv<S: TraceState>(
    trace: &FlowTrace<S>,
    labels: Option<&[String]>,
    mut w: impl Write,
) -> Result<()> {
    if trace.is_empty() {
        writeln!(w, "t")?;
        return Ok(());
    }
    let mut headers = vec!["t".to_string()];
    headers.extend(trace.states[0].headers(labels));
    let derived: Vec<(&String, &Vec<f64>)> = trace.derived.iter().collect();
    for (name, _) in &derived {
        headers.push((*name).clone());
    }
    writeln!(w, "{}", headers.join(","))?;
    for (idx, (&t, state)) in trace.times.iter().zip(&trace.states).enumerate() {
        let mut cells = vec![format_float(t)];
        cells.extend(state.row().into_iter().map(format_float));
        for (_, col) in &derived {
            cells.push(format_float(col.get(idx).copied().unwrap_or(f64::NAN)));
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn events_to_json(events: &[FlowEvent]) -> serde_json::Value {
    serde_json::json!({ "events": events })
}

fn format_float(v: f64) -> String {
    // shortest round-trip representation; deterministic across runs
    let mut s = format!("{v}");
    if !s.contains(['.', 'e', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_heisenberg, build_sl};
    use std::collections::BTreeMap;

    #[test]
    fn algebra_json_round_trip() {
        let (sl3, _) = build_sl(3).unwrap();
        let file = algebra_to_file(&sl3);
        assert_eq!(file.format, FORMAT_TAG);
        let back = algebra_from_file(&file).unwrap();
        assert!(sl3.distance(&back).unwrap() <= 1e-15);
        assert_eq!(back.labels().unwrap()[3], "I");
    }

    #[test]
    fn algebra_reader_rejects_bad_entries() {
        let mut file = algebra_to_file(&build_heisenberg(1));
        file.constants.push(ConstantEntry {
            i: 2,
            j: 1,
            k: 0,
            re: 1.0,
            im: 0.0,
        });
        assert!(algebra_from_file(&file).is_err());
        let mut file2 = algebra_to_file(&build_heisenberg(1));
        file2.format = "hcf-lab/0".into();
        assert!(algebra_from_file(&file2).is_err());
    }

    #[test]
    fn random_tensor_round_trip() {
        // the format layer carries any antisymmetric tensor, Lie or not
        let mut rng = crate::sampling::rng(12345);
        let n = 4;
        let slices: Vec<CMatrix> = (0..n)
            .map(|_| crate::sampling::random_matrix(&mut rng, n))
            .collect();
        let alg = ComplexLieAlgebra::new(slices, None).unwrap();
        let back = algebra_from_file(&algebra_to_file(&alg)).unwrap();
        assert!(alg.distance(&back).unwrap() <= 1e-14 * alg.norm());
    }

    #[test]
    fn metric_json_round_trip() {
        let mut rng = crate::sampling::rng(5);
        let m = crate::sampling::random_metric(&mut rng, 4, 0.5);
        let file = metric_to_file(&m);
        let back = metric_from_file(&file).unwrap();
        assert!((m.matrix() - back.matrix()).norm() <= 1e-15);
    }

    #[test]
    fn certificate_json_has_contract_keys() {
        let h3 = build_heisenberg(1);
        let cert = crate::curvature::soliton_check(
            &h3,
            &crate::algebra::HermitianMetric::identity(3),
            1e-8,
        )
        .unwrap();
        let v = certificate_to_json(&cert);
        for key in [
            "verdict",
            "lambda",
            "residual",
            "D",
            "D_star_is_derivation",
            "tol",
        ] {
            assert!(!v[key].is_null(), "missing {key}");
        }
        assert_eq!(v["verdict"], "algebraic");
        assert_eq!(v["D"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn csv_export_shape() {
        let trace = FlowTrace {
            times: vec![0.0, 0.5],
            states: vec![
                DVector::from_vec(vec![1.0, 2.0]),
                DVector::from_vec(vec![3.0, 4.0]),
            ],
            events: vec![FlowEvent::MaxTimeReached],
            derived: BTreeMap::from([("z2_over_y".to_string(), vec![0.1, 0.2])]),
        };
        let mut buf = Vec::new();
        trace_to_csv(&trace, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,state0,state1,z2_over_y");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.0,1.0,2.0"));
        let ev = events_to_json(&trace.events);
        assert_eq!(ev["events"][0]["kind"], "max_time_reached");
    }
}
