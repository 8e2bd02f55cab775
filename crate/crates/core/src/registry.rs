//! Built-in manifolds. Every entry is shipped as a manifest file under
//! `manifests/` and loaded from that text, so the command line and the
//! library see the same data.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::deformation::apply_deformation;
use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::manifest::{from_toml_str, mul};
use crate::geometry::{Backend, ChartFields, FdConfig, FrameFields, ManifoldSpec, SampleDomain};

pub const EUCLIDEAN_R3: &str = include_str!("../manifests/euclidean-r3.toml");
pub const EUCLIDEAN_R5: &str = include_str!("../manifests/euclidean-r5.toml");
pub const SASAKIAN_R3: &str = include_str!("../manifests/sasakian-r3.toml");
pub const HEISENBERG_FRAME: &str = include_str!("../manifests/heisenberg-frame.toml");
pub const SU2_SASAKIAN: &str = include_str!("../manifests/su2-sasakian.toml");
pub const NS_HALF: &str = include_str!("../manifests/ns-0.5.toml");
pub const NS_HALF_A05: &str = include_str!("../manifests/ns-0.5-a0.5.toml");
pub const NS_HALF_A2: &str = include_str!("../manifests/ns-0.5-a2.toml");
pub const NS_HALF_A3: &str = include_str!("../manifests/ns-0.5-a3.toml");

/// Deformation constants of the shipped `D_a` orbit of `ns-0.5`.
pub const ORBIT: [f64; 3] = [0.5, 2.0, 3.0];

/// Properties an entry is expected to have. Values are recomputed by the
/// test suite; nothing here is used as an input to any computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub contact: bool,
    pub k_contact: bool,
    pub sasakian: bool,
    pub flat: bool,
    pub kappa: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub phi_sectional: Option<f64>,
    pub note: &'static str,
}

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub name: String,
    pub manifest: &'static str,
    pub spec: ManifoldSpec,
    pub expected: Expected,
}

fn load(text: &'static str) -> ManifoldSpec {
    from_toml_str(text).unwrap_or_else(|e| panic!("built-in manifest is invalid: {e}"))
}

/// Flat `R^(2n+1)` with `g = I`, canonical `φ` and `ξ = ∂_{2n+1}` (n = 1 or 2).
pub fn euclidean(n: usize) -> ManifoldSpec {
    match n {
        1 => load(EUCLIDEAN_R3),
        2 => load(EUCLIDEAN_R5),
        _ => panic!("only R^3 and R^5 are built in"),
    }
}

pub fn sasakian_chart() -> ManifoldSpec {
    load(SASAKIAN_R3)
}

pub fn heisenberg_frame() -> ManifoldSpec {
    load(HEISENBERG_FRAME)
}

pub fn su2_frame() -> ManifoldSpec {
    load(SU2_SASAKIAN)
}

/// `NS(λ₀)`: left-invariant contact metric structure on a unimodular Lie
/// group with `[E₂,E₃] = (1−λ₀)E₁`, `[E₃,E₁] = (1+λ₀)E₂`, `[E₁,E₂] = 2E₃`,
/// `ξ = E₃`, `φE₁ = E₂`. Then `hE₁ = λ₀E₁` and `κ = 1 − λ₀²`.
pub fn non_sasakian(lambda0: f64) -> Result<ManifoldSpec> {
    let m = 3;
    let mut structure = vec![Expr::num(0.0); 27];
    let mut set = |k: usize, i: usize, j: usize, v: f64| {
        structure[(k * m + i) * m + j] = Expr::num(v);
        structure[(k * m + j) * m + i] = Expr::num(-v);
    };
    set(0, 1, 2, 1.0 - lambda0);
    set(1, 2, 0, 1.0 + lambda0);
    set(2, 0, 1, 2.0);
    let phi = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let backend = Backend::Frame(FrameFields {
        metric: DMatrix::identity(3, 3),
        phi,
        xi: nalgebra::DVector::from_column_slice(&[0.0, 0.0, 1.0]),
        structure,
        vector_fields: None,
    });
    ManifoldSpec::new(
        format!("ns-{lambda0}"),
        vec!["x".into(), "y".into(), "z".into()],
        vec![],
        backend,
        SampleDomain::new(vec![-0.5; 3], vec![0.5; 3], 5)?,
        FdConfig::default(),
    )
}

/// `spec` with `φ` multiplied by `factor`; a negative control for the axioms.
pub fn scale_phi(spec: &ManifoldSpec, factor: f64) -> ManifoldSpec {
    let backend = match spec.backend() {
        Backend::Chart(c) => Backend::Chart(ChartFields {
            phi: c.phi.iter().map(|e| mul(Expr::num(factor), e.clone())).collect(),
            ..c.clone()
        }),
        Backend::Frame(f) => Backend::Frame(FrameFields {
            phi: &f.phi * factor,
            ..f.clone()
        }),
    };
    ManifoldSpec::new(
        format!("{}-phi-x{factor}", spec.name()),
        spec.coordinates().to_vec(),
        spec.constants().to_vec(),
        backend,
        spec.domain().clone(),
        *spec.numerics(),
    )
    .expect("scaling φ keeps the metric valid")
}

/// The shipped orbit entry for `a`, rebuilt from `ns-0.5` by deformation.
pub fn orbit_member(a: f64) -> Result<ManifoldSpec> {
    apply_deformation(&load(NS_HALF), a)
}

/// All built-in entries.
pub fn registry() -> Vec<RegistryEntry> {
    let flat = |note| Expected {
        contact: false,
        k_contact: false,
        sasakian: false,
        flat: true,
        kappa: Some(0.0),
        mu: None,
        nu: None,
        phi_sectional: Some(0.0),
        note,
    };
    let sasakian = |f, note| Expected {
        contact: true,
        k_contact: true,
        sasakian: true,
        flat: false,
        kappa: Some(1.0),
        mu: None,
        nu: None,
        phi_sectional: Some(f),
        note,
    };
    let lambda0: f64 = 0.5;
    let (kappa, mu) = (1.0 - lambda0 * lambda0, NS_MU);
    let non_sasakian = |kappa, mu, nu, note| Expected {
        contact: true,
        k_contact: false,
        sasakian: false,
        flat: false,
        kappa: Some(kappa),
        mu: Some(mu),
        nu: Some(nu),
        phi_sectional: None,
        note,
    };
    let mut out = vec![
        entry(EUCLIDEAN_R3, flat("flat")),
        entry(EUCLIDEAN_R5, flat("flat")),
        entry(SASAKIAN_R3, sasakian(-3.0, "κ = 1; F from the curvature oracle")),
        entry(HEISENBERG_FRAME, sasakian(-3.0, "same manifold as sasakian-r3 in an orthonormal frame")),
        entry(SU2_SASAKIAN, sasakian(1.0, "round unit sphere")),
        entry(NS_HALF, non_sasakian(kappa, mu, 0.0, "κ = 1 − λ₀²; μ from the curvature oracle")),
    ];
    for (text, a) in [NS_HALF_A05, NS_HALF_A2, NS_HALF_A3].into_iter().zip(ORBIT) {
        let p = crate::deformation::predicted_kmn(kappa, mu, 0.0, a);
        out.push(entry(text, non_sasakian(p.kappa, p.mu, p.nu, "deformation law applied to ns-0.5")));
    }
    out
}

/// `μ` of `NS(0.5)` as produced by the curvature oracle.
pub const NS_MU: f64 = 0.0;

fn entry(manifest: &'static str, expected: Expected) -> RegistryEntry {
    let spec = load(manifest);
    RegistryEntry {
        name: spec.name().to_string(),
        manifest,
        spec,
        expected,
    }
}

/// Looks up a built-in entry by name.
pub fn find(name: &str) -> Option<RegistryEntry> {
    registry().into_iter().find(|e| e.name == name)
}
