//! Verification reports and the suites that fill them.
//!
//! A report is a list of sections, each holding named checks. A check is an
//! identity with a measured residual and a tolerance; it passes, fails, or is
//! skipped with a reason when its hypotheses do not hold on the input.
//! Properties that merely classify the input (contact, Sasakian, conformally
//! flat, …) are not checks and live in the section's `details`.
//!
//! Reports contain no timestamps or paths: the same manifest text and the same
//! parameters give byte-identical JSON.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::conformal::{self, flatness_test, point_weyl, weyl_traces};
use crate::curvature::PointGeometry;
use crate::deformation::{apply_deformation, predicted_f_and_coeffs, predicted_kmn};
use crate::error::Result;
use crate::geometry::{Backend, FdConfig, ManifoldSpec};
use crate::kmn::{
    check_dim5_rigidity, extract_kmn, fit_space_form, verify_dim3_decomposition, Dim3Decomposition, KmnResult, KmnSpread,
    DEGENERACY_THRESHOLD,
};
use crate::registry::ORBIT;
use crate::structure::{classify_points, compute_h, phi_basis, sample_geometry, StructureFlags, Tolerance};
use crate::tensor::spectral_norm;

/// Version of the JSON layout below. Bumped on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for checks that compare an oracle quantity with a deformation law.
pub const DEFORMATION_TOLERANCE: f64 = 1e-5;

/// Tolerance for the composition law of deformations (exact arithmetic up to rounding).
pub const COMPOSITION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    pub max_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Check {
    /// A check that passes when `residual ≤ tolerance`. Non-finite residuals fail.
    pub fn measured(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let finite = residual.is_finite();
        let status = if finite && residual <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            max_residual: finite.then_some(residual),
            tolerance: Some(tolerance),
            status,
            reason: (!finite).then(|| "residual is not finite".to_string()),
        }
    }

    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            max_residual: None,
            tolerance: None,
            status: Status::Skipped,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl Section {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checks: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestIdentity {
    pub name: String,
    /// SHA-256 of the manifest text, hex encoded.
    pub sha256: String,
    pub dimension: usize,
    pub backend: String,
}

impl ManifestIdentity {
    pub fn new(spec: &ManifoldSpec, text: &str) -> Self {
        Self {
            name: spec.name().to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes()).as_slice()),
            dimension: spec.dimension(),
            backend: match spec.backend() {
                Backend::Chart(_) => "chart".into(),
                Backend::Frame(_) => "frame".into(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Samples per coordinate axis.
    pub grid: usize,
    pub points: usize,
    pub fd_step: f64,
    pub richardson: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub manifest: ManifestIdentity,
    pub parameters: Parameters,
    pub sections: Vec<Section>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(manifest: ManifestIdentity, parameters: Parameters, sections: Vec<Section>) -> Self {
        let mut summary = Summary::default();
        for c in sections.iter().flat_map(|s| &s.checks) {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            manifest,
            parameters,
            sections,
            summary,
        }
    }

    /// No check failed.
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are serializable")
    }

    /// Human-readable listing of every check.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{} (dim {}, {} backend, {} points, fd step {:e})\n",
            self.manifest.name, self.manifest.dimension, self.manifest.backend, self.parameters.points, self.parameters.fd_step
        );
        for s in &self.sections {
            out.push_str(&format!("[{}]\n", s.name));
            for c in &s.checks {
                let tag = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                let detail = match (c.max_residual, c.tolerance, &c.reason) {
                    (Some(r), Some(t), _) => format!("{r:.3e} / {t:.1e}"),
                    (_, _, Some(reason)) => reason.clone(),
                    _ => String::new(),
                };
                out.push_str(&format!("  {tag:4}  {:<28} {:<24} {}\n", c.name, detail, c.anchor));
            }
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            self.summary.pass, self.summary.fail, self.summary.skipped
        ));
        out
    }
}

/// Overrides applied to a manifest before running a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub grid: Option<usize>,
    pub fd_step: Option<f64>,
    /// Deformation constants exercised by the deformation section.
    pub orbit: Vec<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            grid: None,
            fd_step: None,
            orbit: ORBIT.to_vec(),
        }
    }
}

impl SuiteOptions {
    pub fn apply(&self, spec: &ManifoldSpec) -> Result<ManifoldSpec> {
        let mut spec = spec.clone();
        if let Some(n) = self.grid {
            if n == 0 {
                return Err(crate::Error::InvalidArgument("grid resolution must be at least 1".into()));
            }
            spec = spec.with_domain(spec.domain().with_resolution(n));
        }
        if let Some(step) = self.fd_step {
            if !(step.is_finite() && step > 0.0) {
                return Err(crate::Error::InvalidArgument(format!("fd step must be positive, got {step}")));
            }
            spec = spec.with_numerics(FdConfig {
                step,
                ..*spec.numerics()
            });
        }
        Ok(spec)
    }
}

/// Per-point data shared by all sections.
pub struct Sampled {
    pub spec: ManifoldSpec,
    pub geos: Vec<PointGeometry>,
    pub orthonormal: Vec<PointGeometry>,
    pub flags: StructureFlags,
    /// Tolerance for first-derivative structure identities.
    pub structure_tolerance: f64,
    /// Tolerance for curvature identities.
    pub oracle_tolerance: f64,
    structure: Section,
}

impl Sampled {
    pub fn new(spec: &ManifoldSpec) -> Result<Self> {
        let step = spec.numerics().step;
        let structure_tolerance = Tolerance::default().for_step(step);
        let oracle_tolerance = Tolerance { base: conformal::ORACLE_TOLERANCE }.for_step(step);
        let geos = sample_geometry(spec)?;
        let orthonormal = geos.iter().map(PointGeometry::orthonormal).collect::<Result<Vec<_>>>()?;
        let report = classify_points(&geos, structure_tolerance)?;
        let flags = report.flags;
        let r = &report.residuals;
        let tol = structure_tolerance;
        let mut s = Section::new("structure");
        s.checks = vec![
            Check::measured("eta_xi", "η(ξ) = 1", r.eta_xi, tol),
            Check::measured("phi_squared", "φ² = −I + η⊗ξ", r.phi_squared, tol),
            Check::measured("compatibility", "g(φX, φY) = g(X, Y) − η(X)η(Y)", r.compatibility, tol),
            Check::measured("phi_xi", "φξ = 0", r.phi_xi, tol),
            Check::measured("eta_phi", "η∘φ = 0", r.eta_phi, tol),
        ];
        let h_checks = [
            ("h_xi", "hξ = 0", r.h_xi),
            ("nabla_xi", "∇_X ξ = −φX − φhX", r.nabla_xi_h),
            ("h_anticommutes", "hφ = −φh", r.h_anticommutes),
            ("trace_h", "tr h = 0", r.trace_h),
            ("eta_h", "η∘h = 0", r.eta_h),
            ("h_symmetric", "g(hX, Y) = g(X, hY)", r.h_symmetric),
        ];
        for (name, anchor, value) in h_checks {
            s.checks.push(if flags.contact {
                Check::measured(name, anchor, value, tol)
            } else {
                Check::skipped(name, anchor, format!("not a contact metric structure (dη − Φ = {:.3e})", r.contact))
            });
        }
        let h_max = orthonormal.iter().map(|o| spectral_norm(&o.h())).fold(0.0, f64::max);
        s.checks.push(if flags.k_contact {
            Check::measured("k_contact_h", "h = 0 on a K-contact manifold", h_max, tol)
        } else {
            Check::skipped("k_contact_h", "h = 0 on a K-contact manifold", "not K-contact")
        });
        s.details = json!({
            "flags": flags,
            "residuals": r.as_map(),
            "h_max": h_max,
        });
        Ok(Self {
            spec: spec.clone(),
            geos,
            orthonormal,
            flags,
            structure_tolerance,
            oracle_tolerance,
            structure: s,
        })
    }

    pub fn parameters(&self) -> Parameters {
        Parameters {
            grid: self.spec.domain().resolution,
            points: self.geos.len(),
            fd_step: self.spec.numerics().step,
            richardson: self.spec.numerics().richardson,
        }
    }

    pub fn structure_section(&self) -> Section {
        self.structure.clone()
    }

    /// `(κ, μ, ν)` at every point, or `None` when the structure is not contact.
    pub fn kmn(&self) -> Result<Option<Vec<KmnResult>>> {
        if !self.flags.contact {
            return Ok(None);
        }
        self.orthonormal.iter().map(extract_kmn).collect::<Result<Vec<_>>>().map(Some)
    }
}

fn fold_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

pub fn curvature_section(s: &Sampled) -> Section {
    let tol = s.oracle_tolerance;
    let sym: Vec<_> = s.orthonormal.iter().map(|o| o.riemann.symmetry_residuals(&o.data.g)).collect();
    let mut sec = Section::new("curvature");
    sec.checks = vec![
        Check::measured("antisymmetry_xy", "R(X, Y) = −R(Y, X)", fold_max(sym.iter().map(|r| r.antisymmetry_xy)), tol),
        Check::measured("antisymmetry_zw", "R(X, Y, Z, W) = −R(X, Y, W, Z)", fold_max(sym.iter().map(|r| r.antisymmetry_zw)), tol),
        Check::measured("pair_symmetry", "R(X, Y, Z, W) = R(Z, W, X, Y)", fold_max(sym.iter().map(|r| r.pair)), tol),
        Check::measured("bianchi", "R(X, Y)Z + R(Y, Z)X + R(Z, X)Y = 0", fold_max(sym.iter().map(|r| r.bianchi)), tol),
        Check::measured("metric_compatibility", "∇g = 0", fold_max(s.geos.iter().map(|g| g.metric_compatibility)), tol),
        Check::measured("torsion_free", "∇_X Y − ∇_Y X = [X, Y]", fold_max(s.geos.iter().map(|g| g.torsion)), tol),
        Check::measured("ricci_symmetric", "g(QX, Y) = g(X, QY)", fold_max(s.orthonormal.iter().map(|o| o.ricci_asymmetry())), tol),
    ];
    let anchor = "R(X, Y)ξ = η(Y)X − η(X)Y";
    sec.checks.push(if s.flags.sasakian {
        Check::measured("sasakian_curvature", anchor, fold_max(s.orthonormal.iter().map(|o| o.sasakian_curvature_residual())), tol)
    } else {
        Check::skipped("sasakian_curvature", anchor, "not Sasakian")
    });
    let anchor = "R(X, Y)Z = g(Y, Z)QX − g(X, Z)QY + g(QY, Z)X − g(QX, Z)Y − (τ/2)R₁(X, Y)Z";
    sec.checks.push(if s.spec.dimension() == 3 {
        Check::measured("dim3_ricci_determines_r", anchor, fold_max(s.orthonormal.iter().map(|o| o.dim3_ricci_form_residual())), tol)
    } else {
        Check::skipped("dim3_ricci_determines_r", anchor, "dimension is not 3")
    });
    let taus: Vec<f64> = s.geos.iter().map(|g| g.scalar).collect();
    sec.details = json!({
        "scalar_curvature": [taus.iter().copied().fold(f64::INFINITY, f64::min), taus.iter().copied().fold(f64::NEG_INFINITY, f64::max)],
        "riemann_max": fold_max(s.orthonormal.iter().map(|o| o.riemann.tensor.max_abs())),
        "ricci_max": fold_max(s.orthonormal.iter().map(|o| o.ricci.amax())),
    });
    sec
}

const KMN_ANCHOR: &str = "R(X, Y)ξ = κ(η(Y)X − η(X)Y) + μ(η(Y)hX − η(X)hY) + ν(η(Y)φhX − η(X)φhY)";

/// `|λ² − (1 − κ)|`. The square-root form loses half the digits as `κ → 1`.
fn lambda_kappa_residual(k: &KmnResult) -> f64 {
    (k.lambda * k.lambda - (1.0 - k.kappa)).abs()
}

pub fn kmn_section(s: &Sampled, kmn: Option<&[KmnResult]>) -> Section {
    let mut sec = Section::new("kmn");
    let names = [
        ("kmn_ansatz", KMN_ANCHOR),
        ("lambda_kappa", "λ² = 1 − κ"),
        ("constant_in_dim5", "κ, μ constant and ν = 0 when dim ≥ 5"),
    ];
    let Some(kmn) = kmn else {
        sec.checks = names.iter().map(|(n, a)| Check::skipped(*n, *a, "not a contact metric structure")).collect();
        return sec;
    };
    let tol = s.oracle_tolerance;
    sec.checks.push(Check::measured(names[0].0, names[0].1, fold_max(kmn.iter().map(|k| k.residual)), tol));
    sec.checks.push(Check::measured(names[1].0, names[1].1, fold_max(kmn.iter().map(lambda_kappa_residual)), tol));
    let spread = KmnSpread::of(kmn);
    sec.checks.push(match spread {
        Some(sp) if s.spec.dimension() >= 5 => {
            let nu = sp.nu.0.abs().max(sp.nu.1.abs());
            Check::measured(names[2].0, names[2].1, sp.variation().max(nu), tol)
        }
        _ => Check::skipped(names[2].0, names[2].1, "dimension 3: κ, μ, ν may vary"),
    });
    let table: Vec<Value> = s
        .geos
        .iter()
        .zip(kmn)
        .map(|(g, k)| {
            json!({
                "point": g.data.point.as_slice(),
                "kappa": k.kappa,
                "mu": k.mu,
                "nu": k.nu,
                "lambda": k.lambda,
                "residual": k.residual,
                "degenerate": k.degenerate,
            })
        })
        .collect();
    sec.details = json!({ "spread": spread, "points": table });
    sec
}

pub fn decomposition_section(s: &Sampled, kmn: Option<&[KmnResult]>) -> Result<Section> {
    let mut sec = Section::new("decomposition");
    let tol = s.oracle_tolerance;
    let dim3 = [
        ("dim3_theorem", "R = (τ/2 − 2κ)R₁ + (τ/2 − 3κ)R₃ + μR₄ + νR₇"),
        ("dim3_corollary", "R = F R₁ + (F − κ)R₃ + μR₄ + νR₇"),
        ("dim3_phi_sectional", "F = τ/2 − 2κ"),
        ("dim3_ricci", "Q = (τ/2 − κ)I + (3κ − τ/2)η⊗ξ + μh + νφh"),
    ];
    let rigidity = ("dim5_rigidity", "f₁ = (f₆+1)/2, f₂ = (f₆−1)/2, f₃ = (3f₆+1)/2, f₄ = 1, f₅ = ½, f₇ = f₈ = 0, κ = −f₆, μ = 1 − f₆, F = 2f₆ − 1");

    let center = &s.orthonormal[s.orthonormal.len() / 2];
    let fit = fit_space_form(&center.riemann, &center.data)?;
    let mut details = json!({
        "fit_at": center.data.point.as_slice(),
        "fit": {
            "coefficients": fit.coefficients.0,
            "residual": fit.residual,
            "rank": fit.rank,
            "nullspace_dim": fit.nullspace_dim,
        },
    });

    let skip_all = |sec: &mut Section, reason: &str| {
        for (n, a) in dim3 {
            sec.checks.push(Check::skipped(n, a, reason));
        }
    };
    match kmn {
        None => skip_all(&mut sec, "not a contact metric structure"),
        Some(_) if s.spec.dimension() != 3 => skip_all(&mut sec, "dimension is not 3"),
        Some(kmn) => {
            let results: Vec<Dim3Decomposition> = s
                .orthonormal
                .iter()
                .zip(kmn)
                .map(|(o, k)| verify_dim3_decomposition(o, k))
                .collect::<Result<_>>()?;
            let checked: Vec<[f64; 4]> = results
                .iter()
                .filter_map(|r| match r {
                    Dim3Decomposition::Checked { theorem, corollary, phi_sectional, ricci, .. } => {
                        Some([*theorem, *corollary, *phi_sectional, *ricci])
                    }
                    Dim3Decomposition::Skipped { .. } => None,
                })
                .collect();
            if checked.is_empty() {
                let reason = match &results[0] {
                    Dim3Decomposition::Skipped { reason } => reason.clone(),
                    _ => unreachable!(),
                };
                skip_all(&mut sec, &reason);
            } else {
                for (i, (n, a)) in dim3.iter().enumerate() {
                    sec.checks.push(Check::measured(*n, *a, fold_max(checked.iter().map(|c| c[i])), tol));
                }
                details["dim3_points_checked"] = json!(checked.len());
            }
        }
    }

    sec.checks.push(match kmn {
        None => Check::skipped(rigidity.0, rigidity.1, "not a contact metric structure"),
        Some(_) if s.spec.dimension() < 5 => Check::skipped(rigidity.0, rigidity.1, "dimension 3"),
        Some(kmn) => {
            let k = kmn[s.orthonormal.len() / 2];
            if k.degenerate {
                Check::skipped(rigidity.0, rigidity.1, "h = 0")
            } else if fit.residual > tol {
                Check::skipped(rigidity.0, rigidity.1, format!("curvature is not a generalized space form (fit residual {:.3e})", fit.residual))
            } else {
                let e = phi_basis(center, DEGENERACY_THRESHOLD).map(|b| b.0).expect("h ≠ 0 has a positive eigenvalue");
                let f = center.phi_sectional(&e)?;
                let report = check_dim5_rigidity(&fit, &k, f, tol);
                details["rigidity"] = json!(report);
                Check::measured(rigidity.0, rigidity.1, report.max_residual, tol)
            }
        }
    });
    sec.details = details;
    Ok(sec)
}

/// Largest entry of `g` and `ξ` differences between two specs over the grid,
/// relative to the size of the entries.
fn spec_distance(a: &ManifoldSpec, b: &ManifoldSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in a.domain().points() {
        let (ga, gb) = (a.metric_at(&p)?, b.metric_at(&p)?);
        let (xa, xb) = (a.xi_at(&p)?, b.xi_at(&p)?);
        let scale = ga.amax().max(xa.amax()).max(1.0);
        worst = worst.max((ga - gb).amax() / scale).max((xa - xb).amax() / scale);
    }
    Ok(worst)
}

pub fn deformation_section(s: &Sampled, kmn: Option<&[KmnResult]>, orbit: &[f64]) -> Result<Section> {
    let mut sec = Section::new("deformation");
    let law = "κ̄ = (κ + a² − 1)/a², μ̄ = (μ + 2a − 2)/a, ν̄ = ν/a";
    let h_law = "h̄ = h/a";
    let f_law = "F̄ = F/a − ((a − 1)/a²)(3a + 1 − κ)";
    let composition = "D_b ∘ D_a = D_ab";
    let Some(kmn) = kmn else {
        for a in orbit {
            for (n, anchor) in [("kmn_law", law), ("h_law", h_law), ("phi_sectional_law", f_law)] {
                sec.checks.push(Check::skipped(format!("{n} a={a}"), anchor, "not a contact metric structure"));
            }
        }
        sec.checks.push(Check::skipped("composition", composition, "not a contact metric structure"));
        return Ok(sec);
    };
    let tol = DEFORMATION_TOLERANCE;
    let mut rows = Vec::new();
    for &a in orbit {
        let deformed = apply_deformation(&s.spec, a)?;
        let geos = sample_geometry(&deformed)?;
        let ortho = geos.iter().map(PointGeometry::orthonormal).collect::<Result<Vec<_>>>()?;
        let deformed_kmn: Vec<KmnResult> = ortho.iter().map(extract_kmn).collect::<Result<_>>()?;
        let mut kmn_err: f64 = 0.0;
        let mut f_err: Option<f64> = None;
        for (i, (k, kd)) in kmn.iter().zip(&deformed_kmn).enumerate() {
            let p = predicted_kmn(k.kappa, k.mu, k.nu, a);
            let mut err = (kd.kappa - p.kappa).abs();
            if !k.degenerate {
                err = err.max((kd.mu - p.mu).abs()).max((kd.nu - p.nu).abs());
            }
            kmn_err = kmn_err.max(err);
            if s.spec.dimension() == 3 && !k.degenerate {
                let f = phi_basis(&s.orthonormal[i], DEGENERACY_THRESHOLD).map(|b| s.orthonormal[i].phi_sectional(&b.0));
                let fd = phi_basis(&ortho[i], DEGENERACY_THRESHOLD).map(|b| ortho[i].phi_sectional(&b.0));
                if let (Some(f), Some(fd)) = (f, fd) {
                    let predicted = predicted_f_and_coeffs(f?, k.kappa, k.mu, k.nu, a).f_sectional;
                    f_err = Some(f_err.unwrap_or(0.0).max((fd? - predicted).abs()));
                }
            }
        }
        let mut h_err: f64 = 0.0;
        for g in &s.geos {
            let hd = compute_h(&deformed, &g.data.point)?;
            h_err = h_err.max((hd - g.h() / a).amax());
        }
        sec.checks.push(Check::measured(format!("kmn_law a={a}"), law, kmn_err, tol));
        sec.checks.push(Check::measured(format!("h_law a={a}"), h_law, h_err, s.oracle_tolerance));
        sec.checks.push(match f_err {
            Some(e) => Check::measured(format!("phi_sectional_law a={a}"), f_law, e, tol),
            None => Check::skipped(format!("phi_sectional_law a={a}"), f_law, "needs dimension 3 and h ≠ 0"),
        });
        let c = &deformed_kmn[deformed_kmn.len() / 2];
        rows.push(json!({ "a": a, "kappa": c.kappa, "mu": c.mu, "nu": c.nu }));
    }
    let composition_check = match orbit {
        [a, b, ..] => {
            let twice = apply_deformation(&apply_deformation(&s.spec, *a)?, *b)?;
            let once = apply_deformation(&s.spec, a * b)?;
            Check::measured("composition", composition, spec_distance(&twice, &once)?, COMPOSITION_TOLERANCE)
        }
        _ => Check::skipped("composition", composition, "needs two deformation constants"),
    };
    sec.checks.push(composition_check);
    sec.details = json!({ "center": rows });
    Ok(sec)
}

pub fn conformal_section(s: &Sampled) -> Result<Section> {
    let mut sec = Section::new("conformal");
    let tol = s.oracle_tolerance;
    let report = flatness_test(&s.spec, &s.geos)?;
    let weyls = s.geos.iter().map(point_weyl).collect::<Result<Vec<_>>>()?;
    let anchor = "W = 0 in dimension 3";
    sec.checks.push(if s.spec.dimension() == 3 {
        Check::measured("dim3_weyl_vanishes", anchor, report.weyl_max, tol)
    } else {
        Check::skipped("dim3_weyl_vanishes", anchor, "dimension is not 3")
    });
    sec.checks.push(Check::measured("weyl_trace_free", "tr W = 0", fold_max(weyls.iter().map(weyl_traces)), tol));
    sec.details = json!(report);
    Ok(sec)
}

/// Runs every section on `spec` (after applying `options`). `text` is the
/// manifest source the report identifies.
pub fn verify(spec: &ManifoldSpec, text: &str, options: &SuiteOptions) -> Result<VerificationReport> {
    let spec = options.apply(spec)?;
    let s = Sampled::new(&spec)?;
    let kmn = s.kmn()?;
    let kmn = kmn.as_deref();
    let sections = vec![
        s.structure_section(),
        curvature_section(&s),
        kmn_section(&s, kmn),
        decomposition_section(&s, kmn)?,
        deformation_section(&s, kmn, &options.orbit)?,
        conformal_section(&s)?,
    ];
    Ok(VerificationReport::new(ManifestIdentity::new(&spec, text), s.parameters(), sections))
}

/// Structure and `(κ, μ, ν)` sections only.
pub fn extract(spec: &ManifoldSpec, text: &str, options: &SuiteOptions) -> Result<VerificationReport> {
    let spec = options.apply(spec)?;
    let s = Sampled::new(&spec)?;
    let kmn = s.kmn()?;
    let sections = vec![s.structure_section(), kmn_section(&s, kmn.as_deref())];
    Ok(VerificationReport::new(ManifestIdentity::new(&spec, text), s.parameters(), sections))
}

/// Structure and space-form fit sections.
pub fn fit(spec: &ManifoldSpec, text: &str, options: &SuiteOptions) -> Result<VerificationReport> {
    let spec = options.apply(spec)?;
    let s = Sampled::new(&spec)?;
    let kmn = s.kmn()?;
    let sections = vec![s.structure_section(), decomposition_section(&s, kmn.as_deref())?];
    Ok(VerificationReport::new(ManifestIdentity::new(&spec, text), s.parameters(), sections))
}

/// Conformal section only.
pub fn conformal(spec: &ManifoldSpec, text: &str, options: &SuiteOptions) -> Result<VerificationReport> {
    let spec = options.apply(spec)?;
    let s = Sampled::new(&spec)?;
    let sections = vec![conformal_section(&s)?];
    Ok(VerificationReport::new(ManifestIdentity::new(&spec, text), s.parameters(), sections))
}

/// Structure and deformation sections for a single constant `a`.
pub fn deform(spec: &ManifoldSpec, text: &str, a: f64, options: &SuiteOptions) -> Result<VerificationReport> {
    let spec = options.apply(spec)?;
    let s = Sampled::new(&spec)?;
    let kmn = s.kmn()?;
    let sections = vec![s.structure_section(), deformation_section(&s, kmn.as_deref(), &[a])?];
    Ok(VerificationReport::new(ManifestIdentity::new(&spec, text), s.parameters(), sections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    #[test]
    fn flat_space_passes_everything_it_runs() {
        let r = verify(&registry::euclidean(1), registry::EUCLIDEAN_R3, &SuiteOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.render_text());
        assert!(r.summary.skipped > 0);
        for c in r.sections.iter().flat_map(|s| &s.checks) {
            assert!(!c.anchor.is_empty());
            if c.status == Status::Skipped {
                assert!(c.reason.is_some(), "{}", c.name);
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let opts = SuiteOptions { grid: Some(2), ..Default::default() };
        let a = verify(&registry::sasakian_chart(), registry::SASAKIAN_R3, &opts).unwrap().to_json();
        let b = verify(&registry::sasakian_chart(), registry::SASAKIAN_R3, &opts).unwrap().to_json();
        assert_eq!(a, b);
        let back: VerificationReport = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json(), a);
    }

    #[test]
    fn failing_check_is_counted() {
        let c = Check::measured("x", "x = 0", 1.0, 0.5);
        assert_eq!(c.status, Status::Fail);
        let c = Check::measured("x", "x = 0", f64::NAN, 0.5);
        assert_eq!(c.status, Status::Fail);
        assert!(c.max_residual.is_none());
    }
}
