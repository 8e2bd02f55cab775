use log::warn;
use nalgebra::{DMatrix, DVector};

use super::fd::{central_difference, FdConfig, Level};
use super::point::{BasisKind, PointFrameData};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::tensor::FrameChange;

/// Axis-aligned sampling box with `resolution` points per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
}

impl SampleDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::manifest("domain", "lower and upper have different lengths"));
        }
        if resolution == 0 {
            return Err(Error::manifest("domain.resolution", "resolution must be at least 1"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
            return Err(Error::manifest("domain", "bounds must be finite with lower <= upper"));
        }
        Ok(Self {
            lower,
            upper,
            resolution,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)))
    }

    pub fn contains(&self, p: &DVector<f64>) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| *l <= *x && x <= u)
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        Self {
            resolution: resolution.max(1),
            ..self.clone()
        }
    }

    fn axis_value(&self, axis: usize, i: usize) -> f64 {
        let (l, u) = (self.lower[axis], self.upper[axis]);
        if self.resolution == 1 {
            0.5 * (l + u)
        } else {
            l + (u - l) * i as f64 / (self.resolution - 1) as f64
        }
    }

    /// Grid points in lexicographic order (last axis fastest).
    pub fn points(&self) -> Vec<DVector<f64>> {
        let d = self.dim();
        let total = self.resolution.pow(d as u32);
        (0..total)
            .map(|mut flat| {
                let mut idx = vec![0; d];
                for axis in (0..d).rev() {
                    idx[axis] = flat % self.resolution;
                    flat /= self.resolution;
                }
                DVector::from_iterator(d, (0..d).map(|axis| self.axis_value(axis, idx[axis])))
            })
            .collect()
    }
}

/// Coordinate-chart fields: every component is an expression in the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartFields {
    /// `g_ij`, row-major.
    pub metric: Vec<Expr>,
    /// `φ^i_j` (row `i`, column `j`), so `φ(∂_j) = Σ_i φ^i_j ∂_i`.
    pub phi: Vec<Expr>,
    pub xi: Vec<Expr>,
}

/// Moving-frame fields. The frame metric and the frame components of φ and
/// ξ are constant; the brackets `[E_i, E_j] = Σ_k c^k_ij E_k` may depend on
/// the chart coordinates, in which case the frame vector fields must be
/// given so that functions can be differentiated along them.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFields {
    pub metric: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    /// `c^k_ij` at flat index `(k * m + i) * m + j`.
    pub structure: Vec<Expr>,
    /// Coordinate components of the frame: entry `i * m + a` is `E_i^a`.
    pub vector_fields: Option<Vec<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Chart(ChartFields),
    Frame(FrameFields),
}

/// A declared almost contact metric manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    name: String,
    description: Option<String>,
    coordinates: Vec<String>,
    constants: Vec<(String, f64)>,
    constant_values: Vec<f64>,
    backend: Backend,
    domain: SampleDomain,
    numerics: FdConfig,
    constant_frame: bool,
}

impl ManifoldSpec {
    /// Validates and assembles a spec. Constants must be sorted by name and
    /// expressions must have been parsed against `coordinates` and that
    /// constant order.
    pub fn new(
        name: impl Into<String>,
        coordinates: Vec<String>,
        constants: Vec<(String, f64)>,
        backend: Backend,
        domain: SampleDomain,
        numerics: FdConfig,
    ) -> Result<Self> {
        let m = coordinates.len();
        if m < 3 || m % 2 == 0 {
            return Err(Error::manifest(
                "dimension",
                format!("dimension must be odd and at least 3, got {m}"),
            ));
        }
        if domain.dim() != m {
            return Err(Error::manifest(
                "domain",
                format!("domain has {} axes for a {m}-dimensional chart", domain.dim()),
            ));
        }
        if !(numerics.step.is_finite() && numerics.step > 0.0) {
            return Err(Error::manifest("numerics.fd_step", "step must be positive"));
        }
        let constant_frame = match &backend {
            Backend::Chart(c) => {
                check_len("chart.metric", c.metric.len(), m * m)?;
                check_len("chart.phi", c.phi.len(), m * m)?;
                check_len("chart.xi", c.xi.len(), m)?;
                false
            }
            Backend::Frame(f) => {
                if f.metric.shape() != (m, m) || f.phi.shape() != (m, m) || f.xi.len() != m {
                    return Err(Error::manifest("frame", "frame tensors have the wrong shape"));
                }
                check_len("frame.structure", f.structure.len(), m * m * m)?;
                if (&f.metric - f.metric.transpose()).amax() > 1e-12 * (1.0 + f.metric.amax()) {
                    return Err(Error::manifest("frame.metric", "metric is not symmetric"));
                }
                let probes = [domain.center(), DVector::from_column_slice(&domain.lower), DVector::from_column_slice(&domain.upper)];
                let consts: Vec<f64> = constants.iter().map(|(_, v)| *v).collect();
                for p in &probes {
                    for k in 0..m {
                        for i in 0..m {
                            for j in i..m {
                                let a = f.structure[(k * m + i) * m + j].eval(p.as_slice(), &consts);
                                let b = f.structure[(k * m + j) * m + i].eval(p.as_slice(), &consts);
                                let (a, b) = match (a, b) {
                                    (Ok(a), Ok(b)) => (a, b),
                                    (Err(source), _) | (_, Err(source)) => {
                                        return Err(Error::Eval { point: p.iter().copied().collect(), source })
                                    }
                                };
                                if (a + b).abs() > 1e-14 * (1.0 + a.abs()) {
                                    return Err(Error::manifest(
                                        "frame.structure",
                                        format!("c^{}_{}{} is not antisymmetric in its lower indices", k + 1, i + 1, j + 1),
                                    ));
                                }
                            }
                        }
                    }
                }
                if let Some(v) = &f.vector_fields {
                    check_len("frame.vector_fields", v.len(), m * m)?;
                }
                let constant = f.structure.iter().all(Expr::is_constant);
                if !constant && f.vector_fields.is_none() {
                    return Err(Error::manifest(
                        "frame.vector_fields",
                        "non-constant structure functions need the frame vector fields",
                    ));
                }
                constant
            }
        };
        let constant_values = constants.iter().map(|(_, v)| *v).collect();
        let spec = Self {
            name: name.into(),
            description: None,
            coordinates,
            constants,
            constant_values,
            backend,
            domain,
            numerics,
            constant_frame,
        };
        spec.validate_metric_on_grid()?;
        Ok(spec)
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn with_numerics(&self, numerics: FdConfig) -> Self {
        Self {
            numerics,
            ..self.clone()
        }
    }

    pub fn with_domain(&self, domain: SampleDomain) -> Self {
        Self {
            domain,
            ..self.clone()
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    /// `n` in `dim = 2n + 1`.
    pub fn half_dimension(&self) -> usize {
        (self.dimension() - 1) / 2
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn constants(&self) -> &[(String, f64)] {
        &self.constants
    }

    pub fn constant_values(&self) -> &[f64] {
        &self.constant_values
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn domain(&self) -> &SampleDomain {
        &self.domain
    }

    pub fn numerics(&self) -> &FdConfig {
        &self.numerics
    }

    pub fn basis_kind(&self) -> BasisKind {
        match self.backend {
            Backend::Chart(_) => BasisKind::Coordinate,
            Backend::Frame(_) => BasisKind::Frame,
        }
    }

    /// True when every pointwise quantity is independent of the point
    /// (frame backend without declared vector fields).
    pub fn is_left_invariant(&self) -> bool {
        self.constant_frame
    }

    fn eval_at(&self, e: &Expr, p: &DVector<f64>) -> Result<f64> {
        e.eval(p.as_slice(), &self.constant_values).map_err(|source| Error::Eval {
            point: p.iter().copied().collect(),
            source,
        })
    }

    fn eval_matrix(&self, exprs: &[Expr], p: &DVector<f64>) -> Result<DMatrix<f64>> {
        let m = self.dimension();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.eval_at(&exprs[i * m + j], p)?;
            }
        }
        Ok(out)
    }

    fn eval_vector(&self, exprs: &[Expr], p: &DVector<f64>) -> Result<DVector<f64>> {
        let values: Result<Vec<f64>> = exprs.iter().map(|e| self.eval_at(e, p)).collect();
        Ok(DVector::from_vec(values?))
    }

    /// Metric components in the native basis.
    pub fn metric_at(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        match &self.backend {
            Backend::Chart(c) => self.eval_matrix(&c.metric, p),
            Backend::Frame(f) => Ok(f.metric.clone()),
        }
    }

    pub fn phi_at(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        match &self.backend {
            Backend::Chart(c) => self.eval_matrix(&c.phi, p),
            Backend::Frame(f) => Ok(f.phi.clone()),
        }
    }

    pub fn xi_at(&self, p: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.backend {
            Backend::Chart(c) => self.eval_vector(&c.xi, p),
            Backend::Frame(f) => Ok(f.xi.clone()),
        }
    }

    /// Bracket coefficients `c^k_ij` of the native basis (zero for a chart).
    pub fn structure_at(&self, p: &DVector<f64>) -> Result<Vec<f64>> {
        let m = self.dimension();
        match &self.backend {
            Backend::Chart(_) => Ok(vec![0.0; m * m * m]),
            Backend::Frame(f) => f.structure.iter().map(|e| self.eval_at(e, p)).collect(),
        }
    }

    /// Coordinate components of the native basis vectors, as columns.
    /// `None` for a frame backend that does not declare its vector fields.
    pub fn frame_vectors_at(&self, p: &DVector<f64>) -> Result<Option<DMatrix<f64>>> {
        let m = self.dimension();
        match &self.backend {
            Backend::Chart(_) => Ok(Some(DMatrix::identity(m, m))),
            Backend::Frame(f) => match &f.vector_fields {
                None => Ok(None),
                Some(v) => Ok(Some(self.eval_matrix(v, p)?.transpose())),
            },
        }
    }

    /// Evaluates `g, φ, ξ` and derived `g⁻¹, η = g ξ` at `p`; `h` is left unset.
    pub fn evaluate_point(&self, p: &DVector<f64>) -> Result<PointFrameData> {
        if p.len() != self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, manifold has dimension {}",
                p.len(),
                self.dimension()
            )));
        }
        if !self.domain.contains(p) {
            warn!("{}: evaluating outside the sample domain at {:?}", self.name, p.as_slice());
        }
        let g = self.metric_at(p)?;
        check_positive_definite(&g, p)?;
        let phi = self.phi_at(p)?;
        let xi = self.xi_at(p)?;
        PointFrameData::new(self.basis_kind(), p.clone(), g, phi, xi)
            .ok_or_else(|| Error::NotPositiveDefinite {
                point: p.iter().copied().collect(),
                min_eigenvalue: 0.0,
            })
    }

    /// Derivative along the native basis vector `E_i` of a field given by its
    /// native components.
    ///
    /// Left-invariant frames have constant data, so every field built from
    /// them has zero derivative and `f` is not evaluated.
    pub fn frame_derivative<F>(&self, f: &F, i: usize, p: &DVector<f64>, level: Level) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> Result<DVector<f64>> + ?Sized,
    {
        let direction = match self.frame_vectors_at(p)? {
            Some(frame) => frame.column(i).into_owned(),
            None => {
                let len = f(p)?.len();
                return Ok(DVector::zeros(len));
            }
        };
        self.directional_derivative(f, &direction, p, level)
    }

    /// Derivative of a field along a coordinate direction vector.
    pub fn directional_derivative<F>(
        &self,
        f: &F,
        direction: &DVector<f64>,
        p: &DVector<f64>,
        level: Level,
    ) -> Result<DVector<f64>>
    where
        F: Fn(&DVector<f64>) -> Result<DVector<f64>> + ?Sized,
    {
        central_difference(f, p, direction, self.numerics.step_at(level), self.numerics.richardson)
    }

    /// Orthonormalizing frame change at `p`.
    pub fn orthonormal_frame_at(&self, p: &DVector<f64>) -> Result<FrameChange> {
        let g = self.metric_at(p)?;
        FrameChange::orthonormalizing(&g).ok_or_else(|| Error::NotPositiveDefinite {
            point: p.iter().copied().collect(),
            min_eigenvalue: min_eigenvalue(&g),
        })
    }

    fn validate_metric_on_grid(&self) -> Result<()> {
        let points = match &self.backend {
            Backend::Frame(_) => vec![self.domain.center()],
            Backend::Chart(_) => self.domain.points(),
        };
        for p in &points {
            let g = self.metric_at(p)?;
            let scale = 1.0 + g.amax();
            if (&g - g.transpose()).amax() > 1e-12 * scale {
                return Err(Error::manifest(
                    "chart.metric",
                    format!("metric is not symmetric at {:?}", p.as_slice()),
                ));
            }
            check_positive_definite(&g, p)?;
        }
        Ok(())
    }
}

fn check_len(field: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::manifest(field, format!("expected {want} components, got {got}")));
    }
    Ok(())
}

fn min_eigenvalue(g: &DMatrix<f64>) -> f64 {
    let sym = (g + g.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

fn check_positive_definite(g: &DMatrix<f64>, p: &DVector<f64>) -> Result<()> {
    let lambda = min_eigenvalue(g);
    if lambda > 1e-12 * (1.0 + g.amax()) {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            point: p.iter().copied().collect(),
            min_eigenvalue: lambda,
        })
    }
}
