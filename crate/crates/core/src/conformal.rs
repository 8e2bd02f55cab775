//! Schouten and Weyl tensors and conformal flatness.
//!
//! `L = −Q/(2n − 1) + τ I/(4n(2n − 1))`,
//! `W(X,Y)Z = R(X,Y)Z − (g(LX,Z)Y − g(LY,Z)X + g(X,Z)LY − g(Y,Z)LX)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{connection, riemann, ricci_and_scalar, CurvatureSource, CurvatureTensor, PointGeometry};
use crate::error::Result;
use crate::geometry::fd::Level;
use crate::geometry::{ManifoldSpec, PointFrameData};
use crate::kmn::orthonormal_pair;
use crate::pointmodel::{basis_tensor4, kulkarni, synthetic_from_data, SpaceFormCoefficients};
use crate::tensor::{spectral_norm, FrameChange, Tensor4};

/// Flatness threshold for curvature computed by finite differences.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Flatness threshold for exact synthetic curvature.
pub const SYNTHETIC_TOLERANCE: f64 = 1e-10;

/// `L = −Q/(2n − 1) + τ I/(4n(2n − 1))` for `dim = 2n + 1`.
pub fn schouten(q: &DMatrix<f64>, tau: f64, n: usize) -> DMatrix<f64> {
    let k = (2 * n - 1) as f64;
    let d = q.nrows();
    -q / k + DMatrix::identity(d, d) * (tau / (4.0 * n as f64 * k))
}

/// `W = R + kulkarni(L)`, which expands to the defining formula.
pub fn weyl(r: &CurvatureTensor, l: &DMatrix<f64>, data: &PointFrameData) -> Tensor4 {
    let mut w = r.tensor.clone();
    w.axpy(1.0, &kulkarni(&data.g, l));
    w
}

/// Largest contraction of the lowered Weyl tensor over the index pairs
/// `(1,4), (1,3), (2,3), (2,4)`, in an orthonormal basis.
pub fn weyl_traces(w: &Tensor4) -> f64 {
    let d = w.dim();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let (mut t14, mut t13, mut t23, mut t24) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..d {
                t14 += w.get(i, a, b, i);
                t13 += w.get(i, a, i, b);
                t23 += w.get(a, i, i, b);
                t24 += w.get(a, i, b, i);
            }
            worst = worst.max(t14.abs()).max(t13.abs()).max(t23.abs()).max(t24.abs());
        }
    }
    worst
}

fn odd(data: &PointFrameData) -> (usize, f64) {
    let n = (data.dim() - 1) / 2;
    (n, (2 * n - 1) as f64)
}

/// Ricci operator of `f₁R₁ + … + f₈R₈`:
/// `(2nf₁ + 3f₂ − f₃)I − (3f₂ + (2n−1)f₃)η⊗ξ + ((2n−1)f₄ − f₆)h + ((2n−1)f₇ − f₈)φh`.
pub fn space_form_ricci(data: &PointFrameData, f: &SpaceFormCoefficients) -> DMatrix<f64> {
    let (n, k) = odd(data);
    let d = data.dim();
    let h = data.h_or_zero();
    DMatrix::identity(d, d) * (2.0 * n as f64 * f.f(1) + 3.0 * f.f(2) - f.f(3))
        - &data.xi * data.eta.transpose() * (3.0 * f.f(2) + k * f.f(3))
        + &h * (k * f.f(4) - f.f(6))
        + &data.phi * &h * (k * f.f(7) - f.f(8))
}

/// `τ = 2n((2n + 1)f₁ + 3f₂ − 2f₃)`
pub fn space_form_scalar(n: usize, f: &SpaceFormCoefficients) -> f64 {
    let n = n as f64;
    2.0 * n * ((2.0 * n + 1.0) * f.f(1) + 3.0 * f.f(2) - 2.0 * f.f(3))
}

/// `L = −½(f₁ + 3f₂/(2n−1))I + (3f₂/(2n−1) + f₃)η⊗ξ − (f₄ − f₆/(2n−1))h − (f₇ − f₈/(2n−1))φh`
pub fn space_form_schouten(data: &PointFrameData, f: &SpaceFormCoefficients) -> DMatrix<f64> {
    let (_, k) = odd(data);
    let d = data.dim();
    let h = data.h_or_zero();
    DMatrix::identity(d, d) * (-0.5 * (f.f(1) + 3.0 * f.f(2) / k))
        + &data.xi * data.eta.transpose() * (3.0 * f.f(2) / k + f.f(3))
        - &h * (f.f(4) - f.f(6) / k)
        - &data.phi * &h * (f.f(7) - f.f(8) / k)
}

/// `W = −(3f₂/(2n−1))R₁ + f₂R₂ − (3f₂/(2n−1))R₃ + (f₆/(2n−1))R₄ + f₅R₅ + f₆R₆ + (f₈/(2n−1))R₇ + f₈R₈`
pub fn space_form_weyl(data: &PointFrameData, f: &SpaceFormCoefficients) -> Tensor4 {
    let (_, k) = odd(data);
    let c = SpaceFormCoefficients([
        -3.0 * f.f(2) / k,
        f.f(2),
        -3.0 * f.f(2) / k,
        f.f(6) / k,
        f.f(5),
        f.f(6),
        f.f(8) / k,
        f.f(8),
    ]);
    synthetic_from_data(data, &c).tensor
}

/// Largest deviation of `W(X, ξ)ξ` from `(2(1−n)/(2n−1))(f₆hX + f₈φhX)` over basis vectors.
pub fn weyl_xi_xi_residual(w: &Tensor4, data: &PointFrameData, f: &SpaceFormCoefficients) -> f64 {
    let (n, k) = odd(data);
    let d = data.dim();
    let h = data.h_or_zero();
    let expected = (&h * f.f(6) + &data.phi * &h * f.f(8)) * (2.0 * (1.0 - n as f64) / k);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        let got = w.apply(&e, &data.xi, &data.xi);
        worst = worst.max((got - expected.column(i)).amax());
    }
    worst
}

/// The four quantities whose vanishing characterizes conformal flatness of
/// a space form with `h ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessQuantities {
    pub f2: f64,
    /// Largest component of `f₅R₅`.
    pub f5_r5: f64,
    pub f6: f64,
    pub f8: f64,
}

impl FlatnessQuantities {
    pub fn total(&self) -> f64 {
        self.f2.abs() + self.f5_r5 + self.f6.abs() + self.f8.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TheoremStatus {
    Applicable { quantities: FlatnessQuantities, predicts_flat: bool },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalReport {
    pub points: usize,
    /// Largest component of `W` in an orthonormal basis.
    pub weyl_max: f64,
    /// Largest Codazzi defect `(∇_X L)Y − (∇_Y L)X` (dimension 3 only).
    pub codazzi_max: Option<f64>,
    /// Schouten tensor at each point, in the native basis.
    pub schouten: Vec<Vec<Vec<f64>>>,
    pub tolerance: f64,
    pub conformally_flat: bool,
    pub theorem: Option<TheoremStatus>,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Weyl tensor of a point geometry, in an orthonormal basis.
pub fn point_weyl(geo: &PointGeometry) -> Result<Tensor4> {
    let o = geo.orthonormal()?;
    let l = schouten(&o.ricci, o.scalar, (o.dim() - 1) / 2);
    Ok(weyl(&o.riemann, &l, &o.data))
}

/// Codazzi defect of the Schouten tensor at `p`, measured in an orthonormal basis.
pub fn codazzi_residual(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<f64> {
    let m = spec.dimension();
    let n = spec.half_dimension();
    let l_at = |q: &DVector<f64>| -> Result<DMatrix<f64>> {
        let r = riemann(spec, q)?;
        let g_inv = spec.metric_at(q)?.try_inverse().unwrap_or_else(|| DMatrix::zeros(m, m));
        let (ric, tau) = ricci_and_scalar(&r, &g_inv);
        Ok(schouten(&ric, tau, n))
    };
    let l = l_at(p)?;
    let conn = connection(spec, p)?;
    let field = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(DVector::from_column_slice(l_at(q)?.as_slice())) };
    let nabla_l: Vec<DMatrix<f64>> = (0..m)
        .map(|i| {
            let d = spec.frame_derivative(&field, i, p, Level::Curvature)?;
            let gi = conn.matrix(i);
            Ok(DMatrix::from_column_slice(m, m, d.as_slice()) + &gi * &l - &l * &gi)
        })
        .collect::<Result<_>>()?;
    let change = spec.orthonormal_frame_at(p)?;
    codazzi_in_basis(&nabla_l, &change)
}

fn codazzi_in_basis(nabla_l: &[DMatrix<f64>], change: &FrameChange) -> Result<f64> {
    let m = nabla_l.len();
    // (∇_{F_a} L) in the new basis
    let rotated: Vec<DMatrix<f64>> = (0..m)
        .map(|a| {
            let mut acc = DMatrix::zeros(m, m);
            for (i, t) in nabla_l.iter().enumerate() {
                acc += t * change.p[(i, a)];
            }
            change.endomorphism(&acc)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let diff = rotated[a].column(b) - rotated[b].column(a);
            worst = worst.max(diff.amax());
        }
    }
    Ok(worst)
}

/// Conformal flatness of a manifold over its sample grid: the Codazzi
/// condition in dimension 3, `W = 0` otherwise. `W` is always reported.
pub fn flatness_test(spec: &ManifoldSpec, geos: &[PointGeometry]) -> Result<ConformalReport> {
    let weyls: Vec<f64> = geos.iter().map(|g| Ok(point_weyl(g)?.max_abs())).collect::<Result<_>>()?;
    let weyl_max = weyls.iter().copied().fold(0.0, f64::max);
    let n = spec.half_dimension();
    let schouten_rows = geos.iter().map(|g| to_rows(&schouten(&g.ricci, g.scalar, n))).collect();
    let codazzi_max = if spec.dimension() == 3 {
        let values: Vec<f64> = if spec.is_left_invariant() {
            vec![codazzi_residual(spec, &spec.domain().center())?]
        } else {
            geos.par_iter().map(|g| codazzi_residual(spec, &g.data.point)).collect::<Result<_>>()?
        };
        Some(values.into_iter().fold(0.0, f64::max))
    } else {
        None
    };
    let tolerance = ORACLE_TOLERANCE;
    let conformally_flat = match codazzi_max {
        Some(c) => c < tolerance,
        None => weyl_max < tolerance,
    };
    Ok(ConformalReport {
        points: geos.len(),
        weyl_max,
        codazzi_max,
        schouten: schouten_rows,
        tolerance,
        conformally_flat,
        theorem: None,
    })
}

/// Flatness of the synthetic space form `f₁R₁ + … + f₈R₈` on `data`, with the
/// theorem's quantities when its hypotheses (`dim ≥ 5`, `h ≠ 0` symmetric and
/// anticommuting with φ) hold.
pub fn flatness_test_model(data: &PointFrameData, f: &SpaceFormCoefficients) -> Result<ConformalReport> {
    let r = synthetic_from_data(data, f);
    let (r, d) = orthonormal_pair(&r, data)?;
    let (q, tau) = ricci_and_scalar(&r, &d.g_inv);
    let n = (d.dim() - 1) / 2;
    let l = schouten(&q, tau, n);
    let w = weyl(&r, &l, &d);
    let weyl_max = w.max_abs();
    let h = d.h_or_zero();
    let theorem = if d.dim() < 5 {
        TheoremStatus::NotApplicable {
            reason: "dimension 3: W vanishes identically".into(),
        }
    } else if spectral_norm(&h) < crate::kmn::DEGENERACY_THRESHOLD {
        TheoremStatus::NotApplicable { reason: "h = 0".into() }
    } else if spectral_norm(&(&h - h.transpose())) > 1e-12 || spectral_norm(&(&h * &d.phi + &d.phi * &h)) > 1e-12 {
        TheoremStatus::NotApplicable {
            reason: "h is not symmetric or does not anticommute with φ".into(),
        }
    } else {
        let r5 = basis_tensor4(5, &d)?;
        let quantities = FlatnessQuantities {
            f2: f.f(2),
            f5_r5: r5.max_abs() * f.f(5).abs(),
            f6: f.f(6),
            f8: f.f(8),
        };
        TheoremStatus::Applicable {
            predicts_flat: quantities.total() < SYNTHETIC_TOLERANCE,
            quantities,
        }
    };
    Ok(ConformalReport {
        points: 1,
        weyl_max,
        codazzi_max: None,
        schouten: vec![to_rows(&l)],
        tolerance: SYNTHETIC_TOLERANCE,
        conformally_flat: weyl_max < SYNTHETIC_TOLERANCE,
        theorem: Some(theorem),
    })
}

/// Residuals of the closed-form Ricci, scalar, Schouten and Weyl expressions
/// of a synthetic space form against direct computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceFormConsistency {
    pub ricci: f64,
    pub scalar: f64,
    pub schouten: f64,
    pub weyl: f64,
    pub weyl_xi_xi: f64,
    pub weyl_traces: f64,
}

impl SpaceFormConsistency {
    pub fn max(&self) -> f64 {
        [self.ricci, self.scalar, self.schouten, self.weyl, self.weyl_xi_xi, self.weyl_traces]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn space_form_consistency(data: &PointFrameData, f: &SpaceFormCoefficients) -> Result<SpaceFormConsistency> {
    let r = synthetic_from_data(data, f);
    let (r, d) = orthonormal_pair(&r, data)?;
    debug_assert_eq!(r.source, CurvatureSource::Synthetic);
    let n = (d.dim() - 1) / 2;
    let (q, tau) = ricci_and_scalar(&r, &d.g_inv);
    let l = schouten(&q, tau, n);
    let w = weyl(&r, &l, &d);
    Ok(SpaceFormConsistency {
        ricci: (&q - space_form_ricci(&d, f)).amax(),
        scalar: (tau - space_form_scalar(n, f)).abs(),
        schouten: (&l - space_form_schouten(&d, f)).amax(),
        weyl: w.sub(&space_form_weyl(&d, f)).max_abs(),
        weyl_xi_xi: weyl_xi_xi_residual(&w, &d, f),
        weyl_traces: weyl_traces(&w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointmodel::standard_model;

    #[test]
    fn schouten_worked_examples() {
        assert_eq!(schouten(&DMatrix::zeros(5, 5), 0.0, 2).amax(), 0.0);
        let l = schouten(&DMatrix::identity(5, 5), 5.0, 2);
        assert!((l - DMatrix::identity(5, 5) * (-0.125)).amax() < 1e-15);
    }

    #[test]
    fn closed_forms_match_on_random_model() {
        let f = SpaceFormCoefficients([0.4, -0.7, 1.3, 0.2, -0.5, 0.9, 0.35, -1.1]);
        for n in [2, 3] {
            let m = standard_model(n, 0.6).unwrap();
            let c = space_form_consistency(&m.data, &f).unwrap();
            assert!(c.max() < 1e-10, "n = {n}: {c:?}");
        }
    }

    #[test]
    fn h_zero_with_f2_zero_is_flat() {
        let m = standard_model(2, 0.0).unwrap();
        let f = SpaceFormCoefficients([0.4, 0.0, 1.3, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let report = flatness_test_model(&m.data, &f).unwrap();
        assert!(report.conformally_flat);
        assert!(matches!(report.theorem, Some(TheoremStatus::NotApplicable { .. })));
    }
}
