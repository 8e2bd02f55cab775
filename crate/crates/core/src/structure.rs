//! Almost contact metric axioms, structure classes and the tensor `h = ½ L_ξ φ`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{unit, PointGeometry};
use crate::error::Result;
use crate::geometry::fields::lie_bracket;
use crate::geometry::ManifoldSpec;
use crate::tensor::spectral_norm;

/// `h = ½ L_ξ φ` in the native basis, from
/// `(L_ξ φ)E_j = [ξ, φE_j] − φ[ξ, E_j]`. Uses brackets only, so it does not
/// depend on the connection.
pub fn compute_h(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<DMatrix<f64>> {
    let m = spec.dimension();
    let xi = |q: &DVector<f64>| spec.xi_at(q);
    let phi = spec.phi_at(p)?;
    let mut out = DMatrix::zeros(m, m);
    for j in 0..m {
        let phi_col = |q: &DVector<f64>| -> Result<DVector<f64>> { Ok(spec.phi_at(q)?.column(j).into_owned()) };
        let basis = |_: &DVector<f64>| -> Result<DVector<f64>> { Ok(unit(m, j)) };
        let a = lie_bracket(spec, &xi, &phi_col, p)?;
        let b = lie_bracket(spec, &xi, &basis, p)?;
        out.set_column(j, &((a - &phi * b) * 0.5));
    }
    Ok(out)
}

/// Residuals of the structure identities at one point, measured in a
/// g-orthonormal basis (spectral norm for endomorphisms and bilinear forms).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureResiduals {
    /// `|η(ξ) − 1|`
    pub eta_xi: f64,
    /// `φ² + I − η ⊗ ξ`
    pub phi_squared: f64,
    /// `g(φX, φY) − g(X, Y) + η(X)η(Y)`
    pub compatibility: f64,
    /// `φξ`
    pub phi_xi: f64,
    /// `η ∘ φ`
    pub eta_phi: f64,
    /// `dη − Φ`, `Φ(X, Y) = g(X, φY)`
    pub contact: f64,
    /// `∇_X ξ + φX`
    pub k_contact: f64,
    /// `(∇_X φ)Y − g(X, Y)ξ + η(Y)X`, max over unit `X`
    pub sasakian: f64,
    /// `hξ`
    pub h_xi: f64,
    /// `∇_X ξ + φX + φhX`
    pub nabla_xi_h: f64,
    /// `hφ + φh`
    pub h_anticommutes: f64,
    /// `|tr h|`
    pub trace_h: f64,
    /// `η ∘ h`
    pub eta_h: f64,
    /// `h − h*` (adjoint with respect to g)
    pub h_symmetric: f64,
}

impl StructureResiduals {
    /// Computes every residual from a point geometry in any basis.
    pub fn at(geo: &PointGeometry) -> Result<Self> {
        let o = geo.orthonormal()?;
        let d = &o.data;
        let m = d.dim();
        let id = DMatrix::<f64>::identity(m, m);
        let phi = &d.phi;
        let h = o.h();
        let xi_eta = &d.xi * d.eta.transpose();
        let vec_norm = |v: &DVector<f64>| v.norm();
        let sasakian = (0..m)
            .map(|i| {
                let e = unit(m, i);
                let expected = &d.xi * e.transpose() - &e * d.eta.transpose();
                spectral_norm(&(&o.nabla_phi[i] - expected))
            })
            .fold(0.0, f64::max);
        Ok(Self {
            eta_xi: (d.eta.dot(&d.xi) - 1.0).abs(),
            phi_squared: spectral_norm(&(phi * phi + &id - &xi_eta)),
            compatibility: spectral_norm(&(phi.transpose() * phi - &id + &d.eta * d.eta.transpose())),
            phi_xi: vec_norm(&(phi * &d.xi)),
            eta_phi: vec_norm(&(phi.transpose() * &d.eta)),
            contact: spectral_norm(&(&o.d_eta - phi)),
            k_contact: spectral_norm(&(&o.nabla_xi + phi)),
            sasakian,
            h_xi: vec_norm(&(&h * &d.xi)),
            nabla_xi_h: spectral_norm(&(&o.nabla_xi + phi + phi * &h)),
            h_anticommutes: spectral_norm(&(&h * phi + phi * &h)),
            trace_h: h.trace().abs(),
            eta_h: vec_norm(&(h.transpose() * &d.eta)),
            h_symmetric: spectral_norm(&(&h - h.transpose())),
        })
    }

    pub fn axioms_max(&self) -> f64 {
        [self.eta_xi, self.phi_squared, self.compatibility, self.phi_xi, self.eta_phi]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn h_identities_max(&self) -> f64 {
        [self.h_xi, self.nabla_xi_h, self.h_anticommutes, self.trace_h, self.eta_h]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("eta_xi", self.eta_xi),
            ("phi_squared", self.phi_squared),
            ("compatibility", self.compatibility),
            ("phi_xi", self.phi_xi),
            ("eta_phi", self.eta_phi),
            ("contact", self.contact),
            ("k_contact", self.k_contact),
            ("sasakian", self.sasakian),
            ("h_xi", self.h_xi),
            ("nabla_xi_h", self.nabla_xi_h),
            ("h_anticommutes", self.h_anticommutes),
            ("trace_h", self.trace_h),
            ("eta_h", self.eta_h),
            ("h_symmetric", self.h_symmetric),
        ])
    }

    fn max_with(&self, other: &Self) -> Self {
        Self {
            eta_xi: self.eta_xi.max(other.eta_xi),
            phi_squared: self.phi_squared.max(other.phi_squared),
            compatibility: self.compatibility.max(other.compatibility),
            phi_xi: self.phi_xi.max(other.phi_xi),
            eta_phi: self.eta_phi.max(other.eta_phi),
            contact: self.contact.max(other.contact),
            k_contact: self.k_contact.max(other.k_contact),
            sasakian: self.sasakian.max(other.sasakian),
            h_xi: self.h_xi.max(other.h_xi),
            nabla_xi_h: self.nabla_xi_h.max(other.nabla_xi_h),
            h_anticommutes: self.h_anticommutes.max(other.h_anticommutes),
            trace_h: self.trace_h.max(other.trace_h),
            eta_h: self.eta_h.max(other.eta_h),
            h_symmetric: self.h_symmetric.max(other.h_symmetric),
        }
    }
}

/// Pointwise axiom residuals without computing curvature.
pub fn verify_axioms(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<BTreeMap<&'static str, f64>> {
    let data = spec.evaluate_point(p)?;
    let (o, _) = data.to_orthonormal().expect("evaluate_point checks positive definiteness");
    let m = o.dim();
    let id = DMatrix::<f64>::identity(m, m);
    let phi = &o.phi;
    Ok(BTreeMap::from([
        ("eta_xi", (o.eta.dot(&o.xi) - 1.0).abs()),
        ("phi_squared", spectral_norm(&(phi * phi + &id - &o.xi * o.eta.transpose()))),
        ("compatibility", spectral_norm(&(phi.transpose() * phi - &id + &o.eta * o.eta.transpose()))),
        ("phi_xi", (phi * &o.xi).norm()),
        ("eta_phi", (phi.transpose() * &o.eta).norm()),
    ]))
}

/// Residuals of the identities satisfied by `h` on contact metric manifolds.
pub fn verify_h_identities(spec: &ManifoldSpec, p: &DVector<f64>) -> Result<BTreeMap<&'static str, f64>> {
    let r = StructureResiduals::at(&PointGeometry::compute(spec, p)?)?;
    Ok(BTreeMap::from([
        ("h_xi", r.h_xi),
        ("nabla_xi", r.nabla_xi_h),
        ("h_phi_anticommute", r.h_anticommutes),
        ("trace_h", r.trace_h),
        ("eta_h", r.eta_h),
    ]))
}

/// Classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub base: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { base: 1e-5 }
    }
}

impl Tolerance {
    /// Grows as the finite-difference step shrinks below `1e-6`, where
    /// round-off starts to dominate second derivatives.
    pub fn for_step(&self, step: f64) -> f64 {
        self.base * (1e-6 / step).powi(2).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    pub almost_contact_metric: bool,
    pub contact: bool,
    pub k_contact: bool,
    pub sasakian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub points: usize,
    pub tolerance: f64,
    pub residuals: StructureResiduals,
    pub flags: StructureFlags,
}

fn flags_for(r: &StructureResiduals, tol: f64) -> StructureFlags {
    let almost_contact_metric = r.axioms_max() < tol;
    let contact = almost_contact_metric && r.contact < tol;
    let k_contact = contact && r.k_contact < tol;
    StructureFlags {
        almost_contact_metric,
        contact,
        k_contact,
        sasakian: k_contact && r.sasakian < tol,
    }
}

/// Max-over-grid residuals and classification of `spec`.
pub fn classify_points(geos: &[PointGeometry], tolerance: f64) -> Result<StructureReport> {
    let all: Vec<StructureResiduals> = geos.iter().map(StructureResiduals::at).collect::<Result<_>>()?;
    let mut iter = all.into_iter();
    let first = iter.next().ok_or_else(|| crate::Error::InvalidArgument("empty sample grid".into()))?;
    let residuals = iter.fold(first, |acc, r| acc.max_with(&r));
    Ok(StructureReport {
        points: geos.len(),
        tolerance,
        flags: flags_for(&residuals, tolerance),
        residuals,
    })
}

/// Classifies `spec` over its sample grid.
pub fn classify(spec: &ManifoldSpec, tolerance: Tolerance) -> Result<StructureReport> {
    let geos = sample_geometry(spec)?;
    classify_points(&geos, tolerance.for_step(spec.numerics().step))
}

/// Point geometry at every grid point, in grid order. Left-invariant frames
/// are evaluated once and replicated.
pub fn sample_geometry(spec: &ManifoldSpec) -> Result<Vec<PointGeometry>> {
    let points = spec.domain().points();
    if spec.is_left_invariant() {
        let geo = PointGeometry::compute(spec, &spec.domain().center())?;
        return Ok(points
            .into_iter()
            .map(|p| {
                let mut g = geo.clone();
                g.data.point = p.clone();
                g.riemann.point = p;
                g
            })
            .collect());
    }
    points.par_iter().map(|p| PointGeometry::compute(spec, p)).collect()
}

/// An orthonormal φ-basis `{e, φe, ξ}` (dimension 3) with `he = λe`, `λ ≥ 0`,
/// given in the native basis, or `None` when `h` has no positive eigenvalue
/// above `threshold`.
pub fn phi_basis(geo: &PointGeometry, threshold: f64) -> Option<(DVector<f64>, DVector<f64>, DVector<f64>, f64)> {
    let (o, change) = geo.data.to_orthonormal()?;
    let h = o.h_or_zero();
    let sym = (&h + h.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if lambda <= threshold {
        return None;
    }
    let e_o = eig.eigenvectors.column(idx).into_owned();
    let e = &change.p * &e_o;
    let phi_e = &geo.data.phi * &e;
    Some((e, phi_e, geo.data.xi.clone(), lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    #[test]
    fn euclidean_h_is_exactly_zero() {
        let spec = registry::euclidean(1);
        let h = compute_h(&spec, &spec.domain().center()).unwrap();
        assert_eq!(h.amax(), 0.0);
        let report = classify(&spec, Tolerance::default()).unwrap();
        assert!(report.flags.almost_contact_metric);
        assert!(!report.flags.contact);
        assert!(!report.flags.sasakian);
    }

    #[test]
    fn doubled_phi_is_detected() {
        let spec = registry::euclidean(1);
        let doubled = crate::registry::scale_phi(&spec, 2.0);
        let r = verify_axioms(&doubled, &doubled.domain().center()).unwrap();
        assert!((r["phi_squared"] - 3.0).abs() < 1e-12, "{}", r["phi_squared"]);
    }

    #[test]
    fn tolerance_scales_with_small_steps() {
        let t = Tolerance::default();
        assert_eq!(t.for_step(1e-5), 1e-5);
        assert!((t.for_step(1e-7) - 1e-3).abs() < 1e-15);
    }
}
