//! JSON file formats: samples of matrices or matrix curves, and the report
//! envelope emitted by the CLI and the experiment harnesses.
//!
//! Matrices are stored as real/imaginary part arrays; an omitted `im` means a
//! real (zero imaginary part) matrix. serde_json prints floats with shortest
//! round-trip precision, so write-then-read is exact.

use serde::{Deserialize, Serialize};

use crate::depth::{HpdCurve, HpdCurveSample, HpdSample};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, HpdMatrix};

/// One matrix as real and (optional) imaginary part, row-major nested rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_hermitian(m: &HermitianMatrix) -> Self {
        let d = m.dim();
        let mut re = vec![vec![0.0; d]; d];
        let mut im = vec![vec![0.0; d]; d];
        let mut any_im = false;
        for i in 0..d {
            for j in 0..d {
                let z = m.entry(i, j);
                re[i][j] = z.re;
                im[i][j] = z.im;
                if z.im != 0.0 {
                    any_im = true;
                }
            }
        }
        Self {
            re,
            im: any_im.then_some(im),
        }
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::from_re_im(&self.re, self.im.as_deref())
    }

    pub fn to_hpd(&self) -> Result<HpdMatrix> {
        HpdMatrix::new(self.to_hermitian()?)
    }
}

/// Observations are either a flat list (point sample) or a nested n x T list
/// (curve sample; requires `grid`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observations {
    Points(Vec<MatrixJson>),
    Curves(Vec<Vec<MatrixJson>>),
}

/// On-disk sample document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleFile {
    pub dim: usize,
    #[serde(default)]
    pub complex: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    pub observations: Observations,
}

/// A parsed sample document: points or curves.
#[derive(Clone, Debug)]
pub enum ParsedSample {
    Points(HpdSample),
    Curves(HpdCurveSample),
}

impl SampleFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!(
                "invalid sample JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sample files serialize")
    }

    pub fn from_points(sample: &HpdSample) -> Self {
        let complex = sample.observations().iter().any(|m| {
            let d = m.dim();
            (0..d).any(|i| (0..d).any(|j| m.entry(i, j).im != 0.0))
        });
        Self {
            dim: sample.dim(),
            complex,
            grid: None,
            observations: Observations::Points(
                sample
                    .observations()
                    .iter()
                    .map(|m| MatrixJson::from_hermitian(m.base()))
                    .collect(),
            ),
        }
    }

    pub fn from_curves(curves: &HpdCurveSample) -> Self {
        Self {
            dim: curves.dim(),
            complex: true,
            grid: Some(curves.grid().to_vec()),
            observations: Observations::Curves(
                (0..curves.len())
                    .map(|i| {
                        curves
                            .curve(i)
                            .iter()
                            .map(|m| MatrixJson::from_hermitian(m.base()))
                            .collect()
                    })
                    .collect(),
            ),
        }
    }

    /// Validates shapes and positive definiteness and produces the in-memory
    /// sample. `grid` present requires nested observations and vice versa.
    pub fn parse(&self) -> Result<ParsedSample> {
        match (&self.grid, &self.observations) {
            (None, Observations::Points(mats)) => {
                let obs = mats
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let p = m.to_hpd().map_err(|e| annotate(e, &format!("observation {i}")))?;
                        check_dim(p.dim(), self.dim, &format!("observation {i}"))?;
                        Ok(p)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ParsedSample::Points(HpdSample::new(obs)?))
            }
            (Some(grid), Observations::Curves(rows)) => {
                let curves = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(t, m)| {
                                let p = m
                                    .to_hpd()
                                    .map_err(|e| annotate(e, &format!("curve {i}, index {t}")))?;
                                check_dim(p.dim(), self.dim, &format!("curve {i}, index {t}"))?;
                                Ok(p)
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ParsedSample::Curves(HpdCurveSample::new(grid.clone(), curves)?))
            }
            (Some(_), Observations::Points(_)) => Err(Error::Invalid(
                "a 'grid' requires nested curve observations".into(),
            )),
            (None, Observations::Curves(_)) => Err(Error::Invalid(
                "nested curve observations require a 'grid'".into(),
            )),
        }
    }

    /// Parses a single-observation document as a query matrix.
    pub fn parse_query_matrix(&self) -> Result<HpdMatrix> {
        match self.parse()? {
            ParsedSample::Points(s) if s.len() == 1 => Ok(s.get(0).clone()),
            ParsedSample::Points(_) => Err(Error::Invalid(
                "query file must contain exactly one observation".into(),
            )),
            ParsedSample::Curves(_) => Err(Error::Invalid(
                "expected a single matrix, found a curve sample".into(),
            )),
        }
    }

    /// Parses a single-curve document as a query curve.
    pub fn parse_query_curve(&self) -> Result<HpdCurve> {
        match self.parse()? {
            ParsedSample::Curves(c) if c.len() == 1 => {
                HpdCurve::new(c.grid().to_vec(), c.curve(0).to_vec())
            }
            ParsedSample::Curves(_) => Err(Error::Invalid(
                "query file must contain exactly one curve".into(),
            )),
            ParsedSample::Points(_) => Err(Error::Invalid(
                "expected a curve (grid + nested observations), found a point sample".into(),
            )),
        }
    }
}

fn check_dim(got: usize, want: usize, what: &str) -> Result<()> {
    if got != want {
        return Err(Error::Dimension(format!(
            "{what} is {got}x{got}, header says dim = {want}"
        )));
    }
    Ok(())
}

fn annotate(e: Error, what: &str) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!("{what}: {msg}")),
        Error::Invalid(msg) => Error::Invalid(format!("{what}: {msg}")),
        Error::Dimension(msg) => Error::Dimension(format!("{what}: {msg}")),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Report envelope
// ---------------------------------------------------------------------------

/// Build and run metadata attached to every report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp: String,
    pub rng: String,
}

impl Provenance {
    pub fn now() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            rng: crate::sampling::RNG_DESCRIPTION.to_string(),
        }
    }
}

/// Envelope for CLI and experiment outputs: the command, its full parameters
/// (including the seed), the results, and provenance. Regenerating a report
/// from its embedded params yields identical `results` apart from timing
/// fields; only `provenance.timestamp` (and timings) differ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub params: serde_json::Value,
    pub results: serde_json::Value,
    pub provenance: Provenance,
}

impl ReportFile {
    pub fn new(
        command: impl Into<String>,
        params: serde_json::Value,
        results: serde_json::Value,
    ) -> Self {
        Self {
            command: command.into(),
            params,
            results,
            provenance: Provenance::now(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!(
                "invalid report JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }
}
