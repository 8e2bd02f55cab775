//! The eight basis curvature tensors `R₁ … R₈` and exact pointwise models.
//!
//! ```text
//! R₁(X,Y)Z = g(Y,Z)X − g(X,Z)Y
//! R₂(X,Y)Z = g(X,φZ)φY − g(Y,φZ)φX + 2g(X,φY)φZ
//! R₃(X,Y)Z = η(X)η(Z)Y − η(Y)η(Z)X + g(X,Z)η(Y)ξ − g(Y,Z)η(X)ξ
//! R₄(X,Y)Z = g(Y,Z)hX − g(X,Z)hY + g(hY,Z)X − g(hX,Z)Y
//! R₅(X,Y)Z = g(hY,Z)hX − g(hX,Z)hY + g(φhX,Z)φhY − g(φhY,Z)φhX
//! R₆(X,Y)Z = η(X)η(Z)hY − η(Y)η(Z)hX + g(hX,Z)η(Y)ξ − g(hY,Z)η(X)ξ
//! R₇(X,Y)Z = g(Y,Z)φhX − g(X,Z)φhY + g(φhY,Z)X − g(φhX,Z)Y
//! R₈(X,Y)Z = η(X)η(Z)φhY − η(Y)η(Z)φhX + g(φhX,Z)η(Y)ξ − g(φhY,Z)η(X)ξ
//! ```
//!
//! `R₄` is the one linear in `h` and `R₅` the one quadratic in `h`. In
//! dimension 3 `R₂ = 3(R₁ + R₃)`, `R₅ = 0`, `R₆ = −R₄` and `R₈ = −R₇` at
//! every contact metric point. None of these survives in dimension 5 or
//! more (the first fails even for `h = 0`).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureSource, CurvatureTensor};
use crate::error::{Error, Result};
use crate::geometry::{BasisKind, PointFrameData};
use crate::tensor::{FrameChange, Tensor4};

/// `g(Y,Z)AX − g(X,Z)AY + g(AY,Z)X − g(AX,Z)Y`
pub fn kulkarni(g: &DMatrix<f64>, a: &DMatrix<f64>) -> Tensor4 {
    let d = g.nrows();
    let ga = a.transpose() * g; // (ga)[(j, k)] = g(A E_j, E_k)
    Tensor4::from_fn(d, |i, j, k| {
        let mut v = a.column(i) * g[(j, k)] - a.column(j) * g[(i, k)];
        v[i] += ga[(j, k)];
        v[j] -= ga[(i, k)];
        v
    })
}

/// Evaluates `Rᵢ(X, Y)Z` for `i ∈ 1..=8` directly from its formula.
pub fn basis_tensor(index: usize, data: &PointFrameData, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    let g = |a: &DVector<f64>, b: &DVector<f64>| data.inner(a, b);
    let eta = |a: &DVector<f64>| data.eta.dot(a);
    let phi = &data.phi;
    let xi = &data.xi;
    let h = data.h_or_zero();
    let ph = phi * &h;
    Ok(match index {
        1 => x * g(y, z) - y * g(x, z),
        2 => {
            let pz = phi * z;
            (phi * y) * g(x, &pz) - (phi * x) * g(y, &pz) + (phi * z) * (2.0 * g(x, &(phi * y)))
        }
        3 => y * (eta(x) * eta(z)) - x * (eta(y) * eta(z)) + xi * (g(x, z) * eta(y) - g(y, z) * eta(x)),
        4 => (&h * x) * g(y, z) - (&h * y) * g(x, z) + x * g(&(&h * y), z) - y * g(&(&h * x), z),
        5 => {
            (&h * x) * g(&(&h * y), z) - (&h * y) * g(&(&h * x), z) + (&ph * y) * g(&(&ph * x), z)
                - (&ph * x) * g(&(&ph * y), z)
        }
        6 => (&h * y) * (eta(x) * eta(z)) - (&h * x) * (eta(y) * eta(z)) + xi * (g(&(&h * x), z) * eta(y) - g(&(&h * y), z) * eta(x)),
        7 => (&ph * x) * g(y, z) - (&ph * y) * g(x, z) + x * g(&(&ph * y), z) - y * g(&(&ph * x), z),
        8 => (&ph * y) * (eta(x) * eta(z)) - (&ph * x) * (eta(y) * eta(z)) + xi * (g(&(&ph * x), z) * eta(y) - g(&(&ph * y), z) * eta(x)),
        _ => return Err(Error::InvalidArgument(format!("basis tensor index {index} is not in 1..=8"))),
    })
}

/// `Rᵢ` as a tensor in the basis of `data`.
pub fn basis_tensor4(index: usize, data: &PointFrameData) -> Result<Tensor4> {
    let d = data.dim();
    if !(1..=8).contains(&index) {
        return Err(Error::InvalidArgument(format!("basis tensor index {index} is not in 1..=8")));
    }
    let e = |i: usize| {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    };
    Ok(Tensor4::from_fn(d, |i, j, k| {
        basis_tensor(index, data, &e(i), &e(j), &e(k)).expect("index checked above")
    }))
}

/// All eight basis tensors.
pub fn basis_tensors(data: &PointFrameData) -> [Tensor4; 8] {
    std::array::from_fn(|i| basis_tensor4(i + 1, data).expect("index in range"))
}

/// Coefficients of `f₁R₁ + … + f₈R₈`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormCoefficients(pub [f64; 8]);

impl SpaceFormCoefficients {
    pub fn zero() -> Self {
        Self([0.0; 8])
    }

    /// `fᵢ` for `i ∈ 1..=8`.
    pub fn f(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn with(mut self, i: usize, value: f64) -> Self {
        self.0[i - 1] = value;
        self
    }

    /// `(f₁ − f₃, f₄ − f₆, f₇ − f₈)`
    pub fn kmn(&self) -> (f64, f64, f64) {
        (self.f(1) - self.f(3), self.f(4) - self.f(6), self.f(7) - self.f(8))
    }
}

/// Exact pointwise almost contact metric structure with orthonormal `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicModel {
    pub n: usize,
    pub lambda: f64,
    pub data: PointFrameData,
}

/// `φ = [[0, −I, 0], [I, 0, 0], [0, 0, 0]]`, `ξ = e_{2n+1}`,
/// `h = λ diag(I, −I, 0)`.
pub fn standard_model(n: usize, lambda: f64) -> Result<AlgebraicModel> {
    if n == 0 || !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("need n ≥ 1 and λ ≥ 0, got n = {n}, λ = {lambda}")));
    }
    let d = 2 * n + 1;
    let mut phi = DMatrix::zeros(d, d);
    let mut h = DMatrix::zeros(d, d);
    for i in 0..n {
        phi[(n + i, i)] = 1.0;
        phi[(i, n + i)] = -1.0;
        h[(i, i)] = lambda;
        h[(n + i, n + i)] = -lambda;
    }
    let mut xi = DVector::zeros(d);
    xi[d - 1] = 1.0;
    let data = PointFrameData::new(BasisKind::Frame, DVector::zeros(d), DMatrix::identity(d, d), phi, xi)
        .expect("identity metric is invertible")
        .with_h(h);
    Ok(AlgebraicModel { n, lambda, data })
}

impl AlgebraicModel {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// The model expressed in the basis given by the columns of an orthogonal
    /// matrix.
    pub fn conjugated(&self, orthogonal: &DMatrix<f64>) -> Result<Self> {
        let change = FrameChange::from_matrix(orthogonal.clone())
            .ok_or_else(|| Error::InvalidArgument("conjugating matrix is singular".into()))?;
        Ok(Self {
            n: self.n,
            lambda: self.lambda,
            data: self.data.transformed(&change, BasisKind::Frame),
        })
    }

    /// Residuals of the pointwise structure invariants (axioms plus the
    /// algebraic properties of `h`).
    pub fn invariant_residuals(&self) -> BTreeMap<&'static str, f64> {
        let d = &self.data;
        let m = d.dim();
        let id = DMatrix::<f64>::identity(m, m);
        let h = d.h_or_zero();
        let gh = &d.g * &h;
        BTreeMap::from([
            ("eta_xi", (d.eta.dot(&d.xi) - 1.0).abs()),
            ("phi_squared", (&d.phi * &d.phi + &id - &d.xi * d.eta.transpose()).amax()),
            ("compatibility", (d.phi.transpose() * &d.g * &d.phi - &d.g + &d.eta * d.eta.transpose()).amax()),
            ("phi_xi", (&d.phi * &d.xi).amax()),
            ("metric_symmetric", (&d.g - d.g.transpose()).amax()),
            ("h_symmetric", (&gh - gh.transpose()).amax()),
            ("h_anticommutes", (&h * &d.phi + &d.phi * &h).amax()),
            ("h_xi", (&h * &d.xi).amax()),
            ("trace_h", h.trace().abs()),
        ])
    }
}

/// `f₁R₁ + … + f₈R₈` on the model's tangent space.
pub fn synthetic_curvature(model: &AlgebraicModel, f: &SpaceFormCoefficients) -> CurvatureTensor {
    synthetic_from_data(&model.data, f)
}

pub fn synthetic_from_data(data: &PointFrameData, f: &SpaceFormCoefficients) -> CurvatureTensor {
    let basis = basis_tensors(data);
    let mut t = Tensor4::zeros(data.dim());
    for (i, r) in basis.iter().enumerate() {
        if f.0[i] != 0.0 {
            t.axpy(f.0[i], r);
        }
    }
    CurvatureTensor {
        point: data.point.clone(),
        tensor: t,
        source: CurvatureSource::Synthetic,
    }
}

/// Residuals of `R₂ = 3(R₁ + R₃)`, `R₅ = 0`, `R₆ = −R₄` and, in dimension 3,
/// `R₈ = −R₇`. Only meaningful as identities in dimension 3; above that the
/// values measure how far the tensors are from being dependent.
pub fn contact_identities(data: &PointFrameData) -> BTreeMap<&'static str, f64> {
    let [r1, r2, r3, r4, r5, r6, r7, r8] = basis_tensors(data);
    let mut r13 = r1.clone();
    r13.axpy(1.0, &r3);
    let mut r64 = r6.clone();
    r64.axpy(1.0, &r4);
    let mut out = BTreeMap::from([
        ("r2_eq_3_r1_plus_r3", r2.sub(&r13.scaled(3.0)).max_abs()),
        ("r5_eq_0", r5.max_abs()),
        ("r6_eq_minus_r4", r64.max_abs()),
    ]);
    if data.dim() == 3 {
        let mut r87 = r8;
        r87.axpy(1.0, &r7);
        out.insert("r8_eq_minus_r7", r87.max_abs());
    }
    out
}
