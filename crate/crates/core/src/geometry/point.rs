use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::tensor::FrameChange;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Coordinate,
    /// Frame with constant metric components, not necessarily orthonormal.
    Frame,
    /// Orthonormal basis derived from another basis at the same point.
    Orthonormalized,
}

/// The structure tensors evaluated in some basis at one point.
///
/// `phi` holds `φ^i_j` (column `j` is `φ E_j`), `eta` holds `η_i = η(E_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrameData {
    pub basis: BasisKind,
    pub point: DVector<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    pub h: Option<DMatrix<f64>>,
}

impl PointFrameData {
    /// Derives `g⁻¹` and `η = g ξ`; `None` if `g` is singular.
    pub fn new(
        basis: BasisKind,
        point: DVector<f64>,
        g: DMatrix<f64>,
        phi: DMatrix<f64>,
        xi: DVector<f64>,
    ) -> Option<Self> {
        let g_inv = g.clone().try_inverse()?;
        let eta = &g * &xi;
        Some(Self {
            basis,
            point,
            g,
            g_inv,
            phi,
            xi,
            eta,
            h: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn with_h(mut self, h: DMatrix<f64>) -> Self {
        self.h = Some(h);
        self
    }

    /// `h`, or zero when it has not been computed.
    pub fn h_or_zero(&self) -> DMatrix<f64> {
        self.h.clone().unwrap_or_else(|| DMatrix::zeros(self.dim(), self.dim()))
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.g * y)[(0, 0)]
    }

    /// Same tensors expressed in another basis.
    pub fn transformed(&self, change: &FrameChange, basis: BasisKind) -> Self {
        Self {
            basis,
            point: self.point.clone(),
            g: change.bilinear(&self.g),
            g_inv: &change.p_inv * &self.g_inv * change.p_inv.transpose(),
            phi: change.endomorphism(&self.phi),
            xi: change.vector(&self.xi),
            eta: change.covector(&self.eta),
            h: self.h.as_ref().map(|h| change.endomorphism(h)),
        }
    }

    /// Orthonormal version of the data together with the frame change used.
    pub fn to_orthonormal(&self) -> Option<(Self, FrameChange)> {
        if self.basis == BasisKind::Frame && (&self.g - DMatrix::identity(self.dim(), self.dim())).amax() == 0.0 {
            return Some((self.clone(), FrameChange::identity(self.dim())));
        }
        let change = FrameChange::orthonormalizing(&self.g)?;
        let mut data = self.transformed(&change, BasisKind::Orthonormalized);
        // Exact identity instead of round-off noise.
        data.g = DMatrix::identity(self.dim(), self.dim());
        data.g_inv = data.g.clone();
        Some((data, change))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_is_lowered_xi_and_inverse_holds() {
        let g = DMatrix::from_row_slice(3, 3, &[0.25, 0.0, -0.1, 0.0, 0.25, 0.0, -0.1, 0.0, 0.25]);
        let xi = DVector::from_column_slice(&[0.0, 0.0, 2.0]);
        let d = PointFrameData::new(BasisKind::Coordinate, DVector::zeros(3), g.clone(), DMatrix::zeros(3, 3), xi).unwrap();
        assert!((&d.g * &d.g_inv - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!((&d.eta - &g * &d.xi).amax() == 0.0);
        let (o, _) = d.to_orthonormal().unwrap();
        // η(ξ) is basis independent.
        assert!((o.eta.dot(&o.xi) - d.eta.dot(&d.xi)).abs() < 1e-14);
    }
}
