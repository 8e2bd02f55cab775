//! Lie brackets and exterior derivatives of fields given by native components.

use nalgebra::{DMatrix, DVector};

use super::fd::Level;
use super::spec::ManifoldSpec;
use crate::error::Result;

/// A vector, covector or flattened tensor field in native components.
pub type Field<'a> = dyn Fn(&DVector<f64>) -> Result<DVector<f64>> + 'a;

/// Derivative of `f` along the tangent vector with native components `v`.
fn derivative_along(m: &ManifoldSpec, f: &Field, v: &DVector<f64>, p: &DVector<f64>) -> Result<Option<DVector<f64>>> {
    if v.iter().all(|c| *c == 0.0) {
        return Ok(None);
    }
    match m.frame_vectors_at(p)? {
        Some(frame) => {
            let direction = frame * v;
            Ok(Some(m.directional_derivative(f, &direction, p, Level::Fields)?))
        }
        // Left-invariant frame: component functions built from it are constant.
        None => Ok(None),
    }
}

/// `[X, Y] = X(Y^k) E_k − Y(X^k) E_k + X^i Y^j c^k_ij E_k`.
pub fn lie_bracket(m: &ManifoldSpec, x: &Field, y: &Field, p: &DVector<f64>) -> Result<DVector<f64>> {
    let xv = x(p)?;
    let yv = y(p)?;
    let mut out = DVector::zeros(m.dimension());
    if let Some(d) = derivative_along(m, y, &xv, p)? {
        out += d;
    }
    if let Some(d) = derivative_along(m, x, &yv, p)? {
        out -= d;
    }
    out += bracket_of_components(m, &xv, &yv, p)?;
    Ok(out)
}

/// `Σ u^i v^j [E_i, E_j]`: the bracket of fields with constant native
/// components. Zero in a coordinate chart.
pub fn bracket_of_components(m: &ManifoldSpec, u: &DVector<f64>, v: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
    let d = m.dimension();
    let c = m.structure_at(p)?;
    let mut out = DVector::zeros(d);
    for k in 0..d {
        let mut s = 0.0;
        for i in 0..d {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                s += u[i] * v[j] * c[(k * d + i) * d + j];
            }
        }
        out[k] = s;
    }
    Ok(out)
}

/// `dω(E_i, E_j) = ½ (E_i ω(E_j) − E_j ω(E_i) − ω([E_i, E_j]))`.
///
/// The ½ normalization is the one under which `dη = Φ` holds for the
/// contact metric structures in the registry, and under which K-contact
/// structures satisfy `∇ξ = −φ`.
pub fn exterior_derivative_1form(m: &ManifoldSpec, omega: &Field, p: &DVector<f64>) -> Result<DMatrix<f64>> {
    let d = m.dimension();
    let w = omega(p)?;
    let c = m.structure_at(p)?;
    let derivs: Vec<DVector<f64>> = (0..d)
        .map(|i| m.frame_derivative(omega, i, p, Level::Fields))
        .collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut bracket = 0.0;
            for k in 0..d {
                bracket += w[k] * c[(k * d + i) * d + j];
            }
            out[(i, j)] = 0.5 * (derivs[i][j] - derivs[j][i] - bracket);
        }
    }
    Ok(out)
}
