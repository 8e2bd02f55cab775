//! TOML manifest format.
//!
//! ```toml
//! name = "heisenberg"
//! description = "optional free text"
//! dimension = 3
//! coordinates = ["x", "y", "z"]
//!
//! [constants]            # optional, name = value
//! c = 1.0
//!
//! [domain]
//! lower = [-0.5, -0.5, -0.5]
//! upper = [0.5, 0.5, 0.5]
//! resolution = 5
//!
//! [numerics]             # optional
//! fd_step = 1e-5
//! richardson = true
//!
//! [chart]                # either [chart] ...
//! metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
//! phi = [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]]   # phi[i][j] = φ^i_j
//! xi = ["0", "0", "1"]
//!
//! [frame]                # ... or [frame]
//! metric = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
//! phi = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
//! xi = [0.0, 0.0, 1.0]
//! structure = [{ k = 3, i = 1, j = 2, value = 2.0 }]   # [E_i, E_j] ∋ value·E_k, 1-based
//! vector_fields = [["0", "2", "0"], ["2", "0", "2*y"], ["0", "0", "2"]]   # optional, row i = E_i
//! ```
//!
//! Structure entries give `c^k_ij` for one ordering of `(i, j)`; the
//! opposite ordering is implied by antisymmetry. `value` may be a number or
//! an expression string.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::fd::FdConfig;
use super::spec::{Backend, ChartFields, FrameFields, ManifoldSpec, SampleDomain};
use crate::error::{Error, Result};
use crate::expr::{self, BinOp, Expr};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    pub domain: DomainSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_step")]
    pub fd_step: f64,
    #[serde(default = "default_true")]
    pub richardson: bool,
}

fn default_step() -> f64 {
    FdConfig::default().step
}

fn default_true() -> bool {
    true
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            fd_step: default_step(),
            richardson: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSection {
    pub metric: Vec<Vec<String>>,
    pub phi: Vec<Vec<String>>,
    pub xi: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    pub metric: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    pub xi: Vec<f64>,
    #[serde(default)]
    pub structure: Vec<StructureEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_fields: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

/// Parses manifest text into a validated spec.
pub fn from_toml_str(text: &str) -> Result<ManifoldSpec> {
    let file: ManifestFile = toml::from_str(text).map_err(|e| Error::Manifest {
        field: "<toml>".into(),
        offset: e.span().map(|s| s.start),
        message: e.message().to_string(),
    })?;
    file.into_spec()
}

pub fn load(path: impl AsRef<std::path::Path>) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)?;
    from_toml_str(&text)
}

/// Serializes a spec back to manifest text.
pub fn to_toml_string(spec: &ManifoldSpec) -> Result<String> {
    let file = ManifestFile::from_spec(spec);
    toml::to_string(&file).map_err(|e| Error::InvalidArgument(format!("cannot serialize manifest: {e}")))
}

fn parse_field(source: &str, field: String, coords: &[String], consts: &[String]) -> Result<Expr> {
    expr::parse(source, coords, consts).map_err(|e| Error::Manifest {
        field,
        offset: Some(e.offset),
        message: e.message,
    })
}

fn square<T>(field: &str, rows: &[Vec<T>], m: usize) -> Result<()> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::manifest(field, format!("expected a {m}x{m} matrix")));
    }
    Ok(())
}

fn negated(e: &Expr) -> Expr {
    match e {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => (**inner).clone(),
        other => Expr::Neg(Box::new(other.clone())),
    }
}

impl ManifestFile {
    pub fn into_spec(self) -> Result<ManifoldSpec> {
        let m = self.dimension;
        if self.coordinates.len() != m {
            return Err(Error::manifest(
                "coordinates",
                format!("{} coordinate names for dimension {m}", self.coordinates.len()),
            ));
        }
        for (idx, c) in self.coordinates.iter().enumerate() {
            if self.coordinates[..idx].contains(c) || self.constants.contains_key(c) {
                return Err(Error::manifest("coordinates", format!("name `{c}` declared twice")));
            }
        }
        let const_names: Vec<String> = self.constants.keys().cloned().collect();
        let constants: Vec<(String, f64)> = self.constants.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let coords = &self.coordinates;
        let backend = match (self.chart, self.frame) {
            (Some(_), Some(_)) => return Err(Error::manifest("chart", "declare either [chart] or [frame], not both")),
            (None, None) => return Err(Error::manifest("chart", "missing [chart] or [frame] section")),
            (Some(chart), None) => {
                square("chart.metric", &chart.metric, m)?;
                square("chart.phi", &chart.phi, m)?;
                if chart.xi.len() != m {
                    return Err(Error::manifest("chart.xi", format!("expected {m} components")));
                }
                let mut metric = Vec::with_capacity(m * m);
                let mut phi = Vec::with_capacity(m * m);
                for i in 0..m {
                    for j in 0..m {
                        metric.push(parse_field(&chart.metric[i][j], format!("chart.metric[{i}][{j}]"), coords, &const_names)?);
                        phi.push(parse_field(&chart.phi[i][j], format!("chart.phi[{i}][{j}]"), coords, &const_names)?);
                    }
                }
                let xi = chart
                    .xi
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_field(s, format!("chart.xi[{i}]"), coords, &const_names))
                    .collect::<Result<_>>()?;
                Backend::Chart(ChartFields { metric, phi, xi })
            }
            (None, Some(frame)) => {
                square("frame.metric", &frame.metric, m)?;
                square("frame.phi", &frame.phi, m)?;
                if frame.xi.len() != m {
                    return Err(Error::manifest("frame.xi", format!("expected {m} components")));
                }
                let mut structure = vec![Expr::num(0.0); m * m * m];
                let mut seen = vec![false; m * m * m];
                for (n, entry) in frame.structure.iter().enumerate() {
                    let field = format!("frame.structure[{n}]");
                    let (k, i, j) = (entry.k, entry.i, entry.j);
                    if [k, i, j].iter().any(|&x| x == 0 || x > m) {
                        return Err(Error::manifest(field, format!("indices must lie in 1..={m}")));
                    }
                    if i == j {
                        return Err(Error::manifest(field, "c^k_ii is zero by antisymmetry"));
                    }
                    let (k, i, j) = (k - 1, i - 1, j - 1);
                    let idx = (k * m + i) * m + j;
                    let opp = (k * m + j) * m + i;
                    if seen[idx] || seen[opp] {
                        return Err(Error::manifest(field, "structure coefficient declared twice"));
                    }
                    let e = match &entry.value {
                        Scalar::Number(v) => Expr::num(*v),
                        Scalar::Expr(s) => parse_field(s, format!("{field}.value"), coords, &const_names)?,
                    };
                    structure[opp] = negated(&e);
                    structure[idx] = e;
                    seen[idx] = true;
                    seen[opp] = true;
                }
                let vector_fields = match frame.vector_fields {
                    None => None,
                    Some(rows) => {
                        square("frame.vector_fields", &rows, m)?;
                        let mut out = Vec::with_capacity(m * m);
                        for (i, row) in rows.iter().enumerate() {
                            for (a, s) in row.iter().enumerate() {
                                out.push(parse_field(s, format!("frame.vector_fields[{i}][{a}]"), coords, &const_names)?);
                            }
                        }
                        Some(out)
                    }
                };
                let flat = |rows: &Vec<Vec<f64>>| DMatrix::from_fn(m, m, |i, j| rows[i][j]);
                Backend::Frame(FrameFields {
                    metric: flat(&frame.metric),
                    phi: flat(&frame.phi),
                    xi: DVector::from_column_slice(&frame.xi),
                    structure,
                    vector_fields,
                })
            }
        };
        let domain = SampleDomain::new(self.domain.lower, self.domain.upper, self.domain.resolution)?;
        let numerics = FdConfig {
            step: self.numerics.fd_step,
            richardson: self.numerics.richardson,
        };
        let spec = ManifoldSpec::new(self.name, self.coordinates, constants, backend, domain, numerics)?;
        Ok(match self.description {
            Some(d) => spec.with_description(d),
            None => spec,
        })
    }

    pub fn from_spec(spec: &ManifoldSpec) -> Self {
        let m = spec.dimension();
        let rows = |exprs: &[Expr]| -> Vec<Vec<String>> {
            (0..m).map(|i| (0..m).map(|j| exprs[i * m + j].to_string()).collect()).collect()
        };
        let (chart, frame) = match spec.backend() {
            Backend::Chart(c) => (
                Some(ChartSection {
                    metric: rows(&c.metric),
                    phi: rows(&c.phi),
                    xi: c.xi.iter().map(|e| e.to_string()).collect(),
                }),
                None,
            ),
            Backend::Frame(f) => {
                let mut structure = Vec::new();
                for k in 0..m {
                    for i in 0..m {
                        for j in i + 1..m {
                            let e = &f.structure[(k * m + i) * m + j];
                            if e.is_zero_literal() {
                                continue;
                            }
                            let value = match e {
                                Expr::Num(v) => Scalar::Number(*v),
                                other => Scalar::Expr(other.to_string()),
                            };
                            structure.push(StructureEntry {
                                k: k + 1,
                                i: i + 1,
                                j: j + 1,
                                value,
                            });
                        }
                    }
                }
                let mat = |a: &DMatrix<f64>| -> Vec<Vec<f64>> { (0..m).map(|i| (0..m).map(|j| a[(i, j)]).collect()).collect() };
                (
                    None,
                    Some(FrameSection {
                        metric: mat(&f.metric),
                        phi: mat(&f.phi),
                        xi: f.xi.iter().copied().collect(),
                        structure,
                        vector_fields: f.vector_fields.as_ref().map(|v| rows(v)),
                    }),
                )
            }
        };
        let domain = spec.domain();
        Self {
            name: spec.name().to_string(),
            description: spec.description().map(str::to_string),
            dimension: m,
            coordinates: spec.coordinates().to_vec(),
            constants: spec.constants().iter().cloned().collect(),
            domain: DomainSection {
                lower: domain.lower.clone(),
                upper: domain.upper.clone(),
                resolution: domain.resolution,
            },
            numerics: NumericsSection {
                fd_step: spec.numerics().step,
                richardson: spec.numerics().richardson,
            },
            chart,
            frame,
        }
    }
}

/// `a * b` with literal folding, used when building fields programmatically.
pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), _) if *x == 0.0 => Expr::num(0.0),
        (_, Expr::Num(y)) if *y == 0.0 => Expr::num(0.0),
        (Expr::Num(x), _) if *x == 1.0 => b,
        (_, Expr::Num(y)) if *y == 1.0 => a,
        (Expr::Num(x), Expr::Num(y)) => Expr::num(x * y),
        _ => Expr::binary(BinOp::Mul, a, b),
    }
}

/// `a + b` with literal folding.
pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), _) if *x == 0.0 => b,
        (_, Expr::Num(y)) if *y == 0.0 => a,
        (Expr::Num(x), Expr::Num(y)) => Expr::num(x + y),
        _ => Expr::binary(BinOp::Add, a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EUCLID: &str = r#"
name = "euclid"
dimension = 3
coordinates = ["x", "y", "z"]
[domain]
lower = [-1.0, -1.0, -1.0]
upper = [1.0, 1.0, 1.0]
resolution = 3
[chart]
metric = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
phi = [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
xi = ["0", "0", "1"]
"#;

    #[test]
    fn loads_and_round_trips() {
        let spec = from_toml_str(EUCLID).unwrap();
        assert_eq!(spec.dimension(), 3);
        let text = to_toml_string(&spec).unwrap();
        let again = from_toml_str(&text).unwrap();
        assert_eq!(to_toml_string(&again).unwrap(), text);
    }

    #[test]
    fn expression_errors_carry_offsets() {
        let bad = EUCLID.replace(r#"["0", "0", "1"]]"#, r#"["0", "0", "x*(y"]]"#);
        match from_toml_str(&bad) {
            Err(Error::Manifest { field, offset, .. }) => {
                assert_eq!(field, "chart.metric[2][2]");
                assert_eq!(offset, Some(4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_asymmetric_metric() {
        let bad = EUCLID.replace(r#"[["1", "0", "0"]"#, r#"[["1", "0.5", "0"]"#);
        let err = from_toml_str(&bad).unwrap_err();
        assert!(err.is_input_error(), "{err}");
    }

    #[test]
    fn toml_syntax_errors_have_spans() {
        let err = from_toml_str("name = \n").unwrap_err();
        assert!(matches!(err, Error::Manifest { offset: Some(_), .. }));
    }

    #[test]
    fn frame_structure_is_antisymmetrized() {
        let text = r#"
name = "h"
dimension = 3
coordinates = ["x", "y", "z"]
[domain]
lower = [0.0, 0.0, 0.0]
upper = [0.0, 0.0, 0.0]
resolution = 1
[frame]
metric = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
phi = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
xi = [0.0, 0.0, 1.0]
structure = [{ k = 3, i = 2, j = 1, value = -2.0 }]
"#;
        let spec = from_toml_str(text).unwrap();
        let c = spec.structure_at(&DVector::zeros(3)).unwrap();
        assert_eq!(c[(2 * 3) * 3 + 1], 2.0);
        assert_eq!(c[(2 * 3 + 1) * 3], -2.0);
        assert!(spec.is_left_invariant());
    }
}
