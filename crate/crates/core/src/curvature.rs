//! Levi-Civita connection and curvature.
//!
//! Conventions: `∇_{E_i} E_j = Σ_k Γ^k_ij E_k`,
//! `R(X, Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z`, `R(X, Y, Z, W) = g(R(X, Y)Z, W)`,
//! `Ric(Y, Z) = tr(X ↦ R(X, Y)Z)`, `g(QX, Y) = Ric(X, Y)`, `τ = tr Q`.
//! With these signs the unit sphere has `τ > 0` and Sasakian manifolds
//! satisfy `R(X, Y)ξ = η(Y)X − η(X)Y`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::fd::{central_difference, FdConfig, Level};
use crate::geometry::fields::exterior_derivative_1form;
use crate::geometry::{Backend, BasisKind, ManifoldSpec, PointFrameData};
use crate::structure;
use crate::tensor::{spectral_norm, FrameChange, Tensor4};

/// Connection coefficients `Γ^k_ij` of the native basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    gamma: Vec<f64>,
}

impl Connection {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            gamma: vec![0.0; dim.pow(3)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.gamma[(k * self.dim + i) * self.dim + j] = v;
    }

    /// Matrix of `X ↦ ∇_{E_i} X` acting on constant components: entry `(k, j)` is `Γ^k_ij`.
    pub fn matrix(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, j| self.get(k, i, j))
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.gamma)
    }

    fn from_vector(dim: usize, v: &DVector<f64>) -> Self {
        Self {
            dim,
            gamma: v.iter().copied().collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Partial derivatives `∂_i g` of chart metric components.
fn metric_derivatives(spec: &ManifoldSpec, p: &DVector<f64>, fd: &FdConfig) -> Result<Vec<DMatrix<f64>>> {
    let m = spec.dimension();
    let f = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(DVector::from_column_slice(spec.metric_at(q)?.as_slice())) };
    (0..m)
        .map(|i| {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            let d = central_difference(&f, p, &e, fd.step, fd.richardson)?;
            Ok(DMatrix::from_column_slice(m, m, d.as_slice()))
        })
        .collect()
}

/// Levi-Civita connection at `p` with the manifest's numerics.
pub fn connection(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<Connection> {
    let fd = FdConfig {
        step: spec.numerics().step_at(Level::Fields),
        richardson: spec.numerics().richardson,
    };
    connection_with(spec, p, &fd)
}

/// Levi-Civita connection with explicit finite-difference parameters
/// (only used by the chart backend).
pub fn connection_with(spec: &ManifoldSpec, p: &DVector<f64>, fd: &FdConfig) -> Result<Connection> {
    let m = spec.dimension();
    let g = spec.metric_at(p)?;
    let g_inv = g.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite {
        point: p.iter().copied().collect(),
        min_eigenvalue: 0.0,
    })?;
    let mut conn = Connection::zeros(m);
    match spec.backend() {
        Backend::Chart(_) => {
            let dg = metric_derivatives(spec, p, fd)?;
            // Γ_lij = ½ (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
            let mut lowered = vec![0.0; m * m * m];
            for l in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        lowered[(l * m + i) * m + j] = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                }
            }
            raise(&mut conn, &g_inv, &lowered);
        }
        Backend::Frame(_) => {
            let c = spec.structure_at(p)?;
            // C(a, b, e) = g([E_a, E_b], E_e)
            let bracket = |a: usize, b: usize, e: usize| -> f64 { (0..m).map(|s| c[(s * m + a) * m + b] * g[(s, e)]).sum() };
            let mut lowered = vec![0.0; m * m * m];
            for l in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        lowered[(l * m + i) * m + j] = 0.5 * (bracket(i, j, l) - bracket(j, l, i) + bracket(l, i, j));
                    }
                }
            }
            raise(&mut conn, &g_inv, &lowered);
        }
    }
    Ok(conn)
}

fn raise(conn: &mut Connection, g_inv: &DMatrix<f64>, lowered: &[f64]) {
    let m = conn.dim;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let v: f64 = (0..m).map(|l| g_inv[(k, l)] * lowered[(l * m + i) * m + j]).sum();
                conn.set(k, i, j, v);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureSource {
    Oracle,
    Synthetic,
}

/// Pointwise `(1,3)` curvature tensor, `R(E_i, E_j)E_k = Σ_l R^l_ijk E_l`
/// stored at `tensor.get(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub point: DVector<f64>,
    pub tensor: Tensor4,
    pub source: CurvatureSource,
}

/// Maximum violations of the algebraic curvature symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    pub antisymmetry_xy: f64,
    pub antisymmetry_zw: f64,
    pub pair: f64,
    pub bianchi: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry_xy.max(self.antisymmetry_zw).max(self.pair).max(self.bianchi)
    }
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.tensor.apply(x, y, z)
    }

    /// `R_ijkl = g(R(E_i, E_j)E_k, E_l)`
    pub fn lowered(&self, g: &DMatrix<f64>) -> Tensor4 {
        self.tensor.lowered(g)
    }

    pub fn transformed(&self, change: &FrameChange) -> Self {
        Self {
            point: self.point.clone(),
            tensor: change.tensor4(&self.tensor),
            source: self.source,
        }
    }

    /// Symmetry residuals of the lowered tensor; pass an orthonormal-basis
    /// metric for norm-comparable numbers.
    pub fn symmetry_residuals(&self, g: &DMatrix<f64>) -> SymmetryResiduals {
        let r = self.lowered(g);
        let d = self.dim();
        let mut out = SymmetryResiduals {
            antisymmetry_xy: 0.0,
            antisymmetry_zw: 0.0,
            pair: 0.0,
            bianchi: 0.0,
        };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = r.get(i, j, k, l);
                        out.antisymmetry_xy = out.antisymmetry_xy.max((v + r.get(j, i, k, l)).abs());
                        out.antisymmetry_zw = out.antisymmetry_zw.max((v + r.get(i, j, l, k)).abs());
                        out.pair = out.pair.max((v - r.get(k, l, i, j)).abs());
                        let b = v + r.get(j, k, i, l) + r.get(k, i, j, l);
                        out.bianchi = out.bianchi.max(b.abs());
                    }
                }
            }
        }
        out
    }
}

/// Riemann tensor at `p` from the connection and its frame derivatives.
pub fn riemann(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<CurvatureTensor> {
    let conn = connection(spec, p)?;
    riemann_from(spec, p, &conn)
}

fn riemann_from(spec: &ManifoldSpec, p: &DVector<f64>, conn: &Connection) -> Result<CurvatureTensor> {
    let m = spec.dimension();
    let field = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(connection(spec, q)?.to_vector()) };
    let dconn: Vec<Connection> = (0..m)
        .map(|i| Ok(Connection::from_vector(m, &spec.frame_derivative(&field, i, p, Level::Connection)?)))
        .collect::<Result<_>>()?;
    let c = spec.structure_at(p)?;
    let mut t = Tensor4::zeros(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = dconn[i].get(l, j, k) - dconn[j].get(l, i, k);
                    for s in 0..m {
                        v += conn.get(s, j, k) * conn.get(l, i, s) - conn.get(s, i, k) * conn.get(l, j, s)
                            - c[(s * m + i) * m + j] * conn.get(l, s, k);
                    }
                    t.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(CurvatureTensor {
        point: p.clone(),
        tensor: t,
        source: CurvatureSource::Oracle,
    })
}

/// Ricci operator `Q` (as a matrix in the basis of `r`) and scalar curvature.
pub fn ricci_and_scalar(r: &CurvatureTensor, g_inv: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let d = r.dim();
    let ric = DMatrix::from_fn(d, d, |j, k| (0..d).map(|i| r.tensor.get(i, j, k, i)).sum());
    let q = g_inv * ric;
    let tau = q.trace();
    (q, tau)
}

/// `F = g(R(X, φX)φX, X)` for a unit `X` orthogonal to `ξ`.
pub fn phi_sectional(r: &CurvatureTensor, data: &PointFrameData, x: &DVector<f64>) -> Result<f64> {
    let norm = data.inner(x, x);
    let eta_x = data.eta.dot(x);
    if (norm - 1.0).abs() > 1e-8 || eta_x.abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "φ-sectional curvature needs a unit vector orthogonal to ξ (|X|² = {norm}, η(X) = {eta_x})"
        )));
    }
    let px = &data.phi * x;
    Ok(data.inner(&r.apply(x, &px, &px), x))
}

/// `(∇_{E_i} ξ)` as column `i`.
fn nabla_vector(spec: &ManifoldSpec, conn: &Connection, p: &DVector<f64>, v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let m = spec.dimension();
    let field = |q: &DVector<f64>| spec.xi_at(q);
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        let d = spec.frame_derivative(&field, i, p, Level::Fields)?;
        let col = d + conn.matrix(i) * v;
        out.set_column(i, &col);
    }
    Ok(out)
}

/// `∇_{E_i} φ` for each `i`.
fn nabla_endomorphism(spec: &ManifoldSpec, conn: &Connection, p: &DVector<f64>, a: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
    let m = spec.dimension();
    let field = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(DVector::from_column_slice(spec.phi_at(q)?.as_slice())) };
    (0..m)
        .map(|i| {
            let d = spec.frame_derivative(&field, i, p, Level::Fields)?;
            let gi = conn.matrix(i);
            Ok(DMatrix::from_column_slice(m, m, d.as_slice()) + &gi * a - a * &gi)
        })
        .collect()
}

/// Residuals of `∇g = 0` and of the torsion `∇_X Y − ∇_Y X − [X, Y]`.
pub fn connection_residuals(spec: &ManifoldSpec, p: &DVector<f64>, conn: &Connection) -> Result<(f64, f64)> {
    let m = spec.dimension();
    let g = spec.metric_at(p)?;
    let c = spec.structure_at(p)?;
    let dg = match spec.backend() {
        Backend::Chart(_) => metric_derivatives(
            spec,
            p,
            &FdConfig {
                step: spec.numerics().step_at(Level::Fields),
                richardson: spec.numerics().richardson,
            },
        )?,
        Backend::Frame(_) => vec![DMatrix::zeros(m, m); m],
    };
    let scale = 1.0 + g.amax();
    let mut compat: f64 = 0.0;
    let mut torsion: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut v = dg[i][(j, k)];
                for s in 0..m {
                    v -= conn.get(s, i, j) * g[(s, k)] + conn.get(s, i, k) * g[(j, s)];
                }
                compat = compat.max(v.abs());
                let t = conn.get(k, i, j) - conn.get(k, j, i) - c[(k * m + i) * m + j];
                torsion = torsion.max(t.abs());
            }
        }
    }
    Ok((compat / scale, torsion))
}

/// Everything the verification checks need at one point, in one basis.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub data: PointFrameData,
    pub riemann: CurvatureTensor,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// Column `i` is `∇_{E_i} ξ`.
    pub nabla_xi: DMatrix<f64>,
    /// `∇_{E_i} φ`.
    pub nabla_phi: Vec<DMatrix<f64>>,
    /// `dη(E_i, E_j)`.
    pub d_eta: DMatrix<f64>,
    pub metric_compatibility: f64,
    pub torsion: f64,
}

impl PointGeometry {
    /// Evaluates the structure, `h`, the connection and the curvature at `p`
    /// in the native basis.
    pub fn compute(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<Self> {
        let data = spec.evaluate_point(p)?;
        let h = structure::compute_h(spec, p)?;
        let data = data.with_h(h);
        let conn = connection(spec, p)?;
        let riemann = riemann_from(spec, p, &conn)?;
        let (ricci, scalar) = ricci_and_scalar(&riemann, &data.g_inv);
        let nabla_xi = nabla_vector(spec, &conn, p, &data.xi)?;
        let nabla_phi = nabla_endomorphism(spec, &conn, p, &data.phi)?;
        let eta = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(spec.metric_at(q)? * spec.xi_at(q)?) };
        let d_eta = exterior_derivative_1form(spec, &eta, p)?;
        let (metric_compatibility, torsion) = connection_residuals(spec, p, &conn)?;
        Ok(Self {
            data,
            riemann,
            ricci,
            scalar,
            nabla_xi,
            nabla_phi,
            d_eta,
            metric_compatibility,
            torsion,
        })
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// The same quantities in a g-orthonormal basis (exact identity metric).
    pub fn orthonormal(&self) -> Result<Self> {
        let (data, change) = self.data.to_orthonormal().ok_or_else(|| Error::NotPositiveDefinite {
            point: self.data.point.iter().copied().collect(),
            min_eigenvalue: 0.0,
        })?;
        if data.basis == self.data.basis {
            return Ok(self.clone());
        }
        Ok(self.transformed(&change, data))
    }

    /// Re-expresses everything through `change`; `data` must already be transformed.
    pub fn transformed(&self, change: &FrameChange, data: PointFrameData) -> Self {
        let m = self.dim();
        let nabla_phi = (0..m)
            .map(|a| {
                let mut acc = DMatrix::zeros(m, m);
                for i in 0..m {
                    let w = change.p[(i, a)];
                    if w != 0.0 {
                        acc += &self.nabla_phi[i] * w;
                    }
                }
                change.endomorphism(&acc)
            })
            .collect();
        Self {
            riemann: self.riemann.transformed(change),
            ricci: change.endomorphism(&self.ricci),
            scalar: self.scalar,
            nabla_xi: change.endomorphism(&self.nabla_xi),
            nabla_phi,
            d_eta: change.bilinear(&self.d_eta),
            metric_compatibility: self.metric_compatibility,
            torsion: self.torsion,
            data,
        }
    }

    pub fn basis(&self) -> BasisKind {
        self.data.basis
    }

    pub fn h(&self) -> DMatrix<f64> {
        self.data.h_or_zero()
    }

    /// `F` for an admissible `X` given in this basis.
    pub fn phi_sectional(&self, x: &DVector<f64>) -> Result<f64> {
        phi_sectional(&self.riemann, &self.data, x)
    }

    /// Residual of `R(X, Y)ξ = η(Y)X − η(X)Y` (max over basis pairs, in this basis).
    pub fn sasakian_curvature_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (ei, ej) = (unit(m, i), unit(m, j));
                let lhs = self.riemann.apply(&ei, &ej, &self.data.xi);
                let rhs = &ei * self.data.eta[j] - &ej * self.data.eta[i];
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }

    /// Residual of `R = g(Y,Z)QX − g(X,Z)QY + g(QY,Z)X − g(QX,Z)Y − (τ/2)R₁`,
    /// valid in dimension 3.
    pub fn dim3_ricci_form_residual(&self) -> f64 {
        let model = crate::pointmodel::kulkarni(&self.data.g, &self.ricci);
        let mut expected = model;
        expected.axpy(-0.5 * self.scalar, &crate::pointmodel::kulkarni(&self.data.g, &(DMatrix::identity(self.dim(), self.dim()) * 0.5)));
        self.riemann.tensor.sub(&expected).max_abs()
    }

    /// Spectral norm of `Q − Qᵀ` with respect to `g`.
    pub fn ricci_asymmetry(&self) -> f64 {
        let lowered = &self.data.g * &self.ricci;
        spectral_norm(&(&lowered - lowered.transpose()))
    }
}

pub(crate) fn unit(m: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(m);
    e[i] = 1.0;
    e
}
