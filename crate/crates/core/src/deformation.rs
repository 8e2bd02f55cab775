//! `D_a`-homothetic deformations:
//! `φ̄ = φ, ξ̄ = ξ/a, η̄ = aη, ḡ = a g + a(a − 1) η ⊗ η`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::geometry::manifest::{add, mul};
use crate::geometry::{Backend, ChartFields, FrameFields, ManifoldSpec};

/// A positive deformation constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationParams {
    a: f64,
}

impl DeformationParams {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(Self { a })
        } else {
            Err(Error::InvalidArgument(format!("deformation constant must be positive and finite, got {a}")))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// Name given to a deformed manifold.
pub fn deformed_name(name: &str, a: f64) -> String {
    format!("{name}-a{a}")
}

/// The deformed structure. Chart fields are rewritten as expressions, so the
/// result is exact up to floating-point evaluation order; frame data is
/// transformed numerically.
pub fn apply_deformation(spec: &ManifoldSpec, a: f64) -> Result<ManifoldSpec> {
    let a = DeformationParams::new(a)?.a();
    let m = spec.dimension();
    let backend = match spec.backend() {
        Backend::Chart(c) => {
            // η_i = Σ_k g_ik ξ^k
            let eta: Vec<Expr> = (0..m)
                .map(|i| (0..m).fold(Expr::num(0.0), |acc, k| add(acc, mul(c.metric[i * m + k].clone(), c.xi[k].clone()))))
                .collect();
            let mut metric = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    let scaled = mul(Expr::num(a), c.metric[i * m + j].clone());
                    let correction = mul(Expr::num(a * (a - 1.0)), mul(eta[i].clone(), eta[j].clone()));
                    metric.push(add(scaled, correction));
                }
            }
            let xi = c
                .xi
                .iter()
                .map(|e| match e {
                    Expr::Num(v) => Expr::num(v / a),
                    other if a == 1.0 => other.clone(),
                    other => Expr::binary(BinOp::Div, other.clone(), Expr::num(a)),
                })
                .collect();
            Backend::Chart(ChartFields {
                metric,
                phi: c.phi.clone(),
                xi,
            })
        }
        Backend::Frame(f) => {
            let eta = &f.metric * &f.xi;
            let metric = &f.metric * a + &eta * eta.transpose() * (a * (a - 1.0));
            Backend::Frame(FrameFields {
                metric,
                phi: f.phi.clone(),
                xi: &f.xi / a,
                structure: f.structure.clone(),
                vector_fields: f.vector_fields.clone(),
            })
        }
    };
    let deformed = ManifoldSpec::new(
        deformed_name(spec.name(), a),
        spec.coordinates().to_vec(),
        spec.constants().to_vec(),
        backend,
        spec.domain().clone(),
        *spec.numerics(),
    )?;
    Ok(match spec.description() {
        Some(d) => deformed.with_description(format!("{d} (D_a deformation, a = {a})")),
        None => deformed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedKmn {
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
}

/// `κ̄ = (κ + a² − 1)/a², μ̄ = (μ + 2a − 2)/a, ν̄ = ν/a`
pub fn predicted_kmn(kappa: f64, mu: f64, nu: f64, a: f64) -> PredictedKmn {
    PredictedKmn {
        kappa: (kappa + a * a - 1.0) / (a * a),
        mu: (mu + 2.0 * a - 2.0) / a,
        nu: nu / a,
    }
}

/// Deformed φ-sectional curvature and dimension-3 coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedCoefficients {
    pub f_sectional: f64,
    pub f1: f64,
    pub f3: f64,
    pub f4: f64,
    pub f7: f64,
}

/// `F̄ = F/a − ((a − 1)/a²)(3a + 1 − κ)`, `f̄₁ = F̄`,
/// `f̄₃ = F/a + ((a − 2)κ − 4a² + 2a + 2)/a²`, `f̄₄ = (μ + 2a − 2)/a`, `f̄₇ = ν/a`.
pub fn predicted_f_and_coeffs(f: f64, kappa: f64, mu: f64, nu: f64, a: f64) -> PredictedCoefficients {
    let a2 = a * a;
    let f_bar = f / a - ((a - 1.0) / a2) * (3.0 * a + 1.0 - kappa);
    PredictedCoefficients {
        f_sectional: f_bar,
        f1: f_bar,
        f3: f / a + ((a - 2.0) * kappa - 4.0 * a2 + 2.0 * a + 2.0) / a2,
        f4: (mu + 2.0 * a - 2.0) / a,
        f7: nu / a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let p = predicted_kmn(0.75, 1.0, 0.0, 2.0);
        assert_eq!((p.kappa, p.mu, p.nu), (0.9375, 1.5, 0.0));
    }

    #[test]
    fn identity_deformation() {
        let p = predicted_f_and_coeffs(-0.4, 0.75, 1.0, 0.2, 1.0);
        assert_eq!((p.f_sectional, p.f1, p.f3, p.f4, p.f7), (-0.4, -0.4, -1.15, 1.0, 0.2));
    }

    #[test]
    fn rejects_non_positive() {
        assert!(DeformationParams::new(0.0).is_err());
        assert!(DeformationParams::new(-1.0).is_err());
        assert!(DeformationParams::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn sasakian_is_invariant(a in 0.05f64..20.0, mu in -3.0f64..3.0) {
            let p = predicted_kmn(1.0, mu, 0.0, a);
            prop_assert!((p.kappa - 1.0).abs() < 1e-12);
        }

        #[test]
        fn f3_is_f1_minus_kappa(f in -5.0f64..5.0, kappa in -3.0f64..1.0, mu in -3.0f64..3.0, nu in -2.0f64..2.0, a in 0.1f64..10.0) {
            let c = predicted_f_and_coeffs(f, kappa, mu, nu, a);
            let k = predicted_kmn(kappa, mu, nu, a);
            prop_assert!((c.f3 - (c.f1 - k.kappa)).abs() < 1e-10 * (1.0 + c.f1.abs()));
            prop_assert_eq!(c.f4, k.mu);
            prop_assert_eq!(c.f7, k.nu);
        }
    }
}
