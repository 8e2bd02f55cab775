//! Central finite differences with optional one-step Richardson extrapolation.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Finite-difference parameters.
///
/// Derivatives are nested at most three deep (metric → connection →
/// curvature-derived fields). Level `n` uses the step `step^(1/(n+1))`, so a
/// `1e-5` base step becomes roughly `3e-3` for derivatives of the connection
/// and `2e-2` for derivatives of curvature quantities; each level divides the
/// round-off of the level below by its own step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            richardson: true,
        }
    }
}

/// Nesting depth of a derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Derivatives of declared fields (metric, φ, ξ).
    Fields = 0,
    /// Derivatives of connection coefficients.
    Connection = 1,
    /// Derivatives of curvature-derived fields (Schouten tensor).
    Curvature = 2,
}

impl FdConfig {
    pub fn step_at(&self, level: Level) -> f64 {
        match level {
            Level::Fields => self.step,
            Level::Connection => self.step.sqrt(),
            Level::Curvature => self.step.cbrt(),
        }
    }
}

/// Derivative of `f` at `p` along `direction`:
/// `(f(p + δv) − f(p − δv)) / 2δ`, Richardson-combined with the `δ/2`
/// estimate when requested.
pub fn central_difference<F>(
    f: &F,
    p: &DVector<f64>,
    direction: &DVector<f64>,
    step: f64,
    richardson: bool,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>> + ?Sized,
{
    let estimate = |h: f64| -> Result<DVector<f64>> {
        let forward = f(&(p + direction * h))?;
        let backward = f(&(p - direction * h))?;
        Ok((forward - backward) / (2.0 * h))
    };
    let coarse = estimate(step)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = estimate(0.5 * step)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Scalar convenience wrapper around [`central_difference`].
pub fn derivative_1d<F>(f: F, x: f64, step: f64, richardson: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = |p: &DVector<f64>| -> Result<DVector<f64>> { Ok(DVector::from_element(1, f(p[0])?)) };
    let d = central_difference(&g, &DVector::from_element(1, x), &DVector::from_element(1, 1.0), step, richardson)?;
    Ok(d[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivative() {
        let d = derivative_1d(|x| Ok(x * x), 1.0, 1e-5, true).unwrap();
        assert!((d - 2.0).abs() < 1e-9);
        let d = derivative_1d(|x| Ok(x * x), 1.0, 1e-5, false).unwrap();
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_field_has_exactly_zero_derivative() {
        for richardson in [false, true] {
            assert_eq!(derivative_1d(|_| Ok(4.2), 0.3, 1e-5, richardson).unwrap(), 0.0);
        }
    }

    #[test]
    fn second_order_convergence_on_exp() {
        // Analytic derivative of exp is exp; plain central differences lose a
        // factor of 4 in error per halving of the step.
        let x = 0.7_f64;
        let err = |h: f64| (derivative_1d(|t| Ok(t.exp()), x, h, false).unwrap() - x.exp()).abs();
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.9..4.1).contains(&ratio), "ratio {ratio}");
        // Richardson lifts the order to four.
        let err_r = |h: f64| (derivative_1d(|t| Ok(t.exp()), x, h, true).unwrap() - x.exp()).abs();
        let ratio_r = err_r(4e-2) / err_r(2e-2);
        assert!(ratio_r > 14.0, "ratio {ratio_r}");
    }

    #[test]
    fn nested_steps_grow() {
        let cfg = FdConfig::default();
        assert!(cfg.step_at(Level::Fields) < cfg.step_at(Level::Connection));
        assert!(cfg.step_at(Level::Connection) < cfg.step_at(Level::Curvature));
    }
}
