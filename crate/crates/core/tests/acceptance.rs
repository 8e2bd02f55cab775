//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The process fails if any
//! criterion fails, except those listed in `KNOWN_UNATTAINABLE`, which are
//! still evaluated and still reported as FAIL.

use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kmn_core::conformal::{flatness_test_model, point_weyl, space_form_consistency, space_form_ricci, space_form_scalar, TheoremStatus};
use kmn_core::curvature::{connection_with, PointGeometry};
use kmn_core::deformation::{apply_deformation, predicted_f_and_coeffs, predicted_kmn};
use kmn_core::geometry::manifest::from_toml_str;
use kmn_core::geometry::{FdConfig, ManifoldSpec};
use kmn_core::kmn::{
    check_dim5_rigidity, extract_kmn, extract_kmn_from, fit_space_form, model_phi_sectional, rigid_coefficients,
    verify_dim3_decomposition, Dim3Decomposition, DEGENERACY_THRESHOLD,
};
use kmn_core::pointmodel::{contact_identities, standard_model, synthetic_curvature, SpaceFormCoefficients};
use kmn_core::registry::{self, ORBIT};
use kmn_core::structure::{classify, compute_h, phi_basis, sample_geometry, Tolerance};

/// Criteria that cannot hold for any correct implementation, with the reason.
const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(
    10,
    "the sasakian-r3 metric and its Christoffel symbols are polynomials of degree ≤ 2 in y, so central differences are exact and the error ratio measures round-off only",
)];

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary }
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn grid(spec: &ManifoldSpec) -> Vec<PointGeometry> {
    sample_geometry(spec).expect("built-in manifold evaluates on its grid")
}

fn ortho(geos: &[PointGeometry]) -> Vec<PointGeometry> {
    geos.iter().map(|g| g.orthonormal().unwrap()).collect()
}

fn ns_half() -> ManifoldSpec {
    registry::find("ns-0.5").unwrap().spec
}

fn flat_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut kmn_worst: f64 = 0.0;
    let mut kmn_residual: f64 = 0.0;
    for n in [1, 2] {
        let spec = registry::euclidean(n);
        for g in ortho(&grid(&spec)) {
            let w = point_weyl(&g).unwrap();
            worst = max([worst, g.riemann.tensor.frobenius(), g.ricci.norm(), g.scalar.abs(), w.frobenius()]);
            let k = extract_kmn(&g).unwrap();
            kmn_worst = max([kmn_worst, k.kappa.abs(), k.mu.abs(), k.nu.abs()]);
            kmn_residual = kmn_residual.max(k.residual);
        }
    }
    outcome(
        worst < 1e-8 && kmn_worst == 0.0 && kmn_residual < 1e-10,
        format!("max(‖R‖, ‖Q‖, |τ|, ‖W‖) = {worst:.1e}; max |(κ, μ, ν)| = {kmn_worst:.1e}; residual {kmn_residual:.1e}"),
    )
}

fn sasakian_suite() -> Outcome {
    let spec = registry::sasakian_chart();
    let report = classify(&spec, Tolerance::default()).unwrap();
    let r = &report.residuals;
    let structure = max([r.axioms_max(), r.contact, r.k_contact, r.sasakian]);
    let o = ortho(&grid(&spec));
    let kappa = max(o.iter().map(|g| (extract_kmn(g).unwrap().kappa - 1.0).abs()));
    let curvature = max(o.iter().map(|g| g.sasakian_curvature_residual()));
    outcome(
        structure < 1e-6 && kappa < 1e-5 && curvature < 1e-5 && report.flags.sasakian,
        format!("axiom/contact/Sasakian residual {structure:.1e}; |κ − 1| {kappa:.1e}; R(X,Y)ξ residual {curvature:.1e}"),
    )
}

fn dim3_decomposition() -> Outcome {
    let geos = ortho(&grid(&ns_half()));
    let mut worst = [0.0f64; 4];
    let mut checked = 0;
    for g in &geos {
        let k = extract_kmn(g).unwrap();
        if let Dim3Decomposition::Checked { theorem, corollary, phi_sectional, ricci, .. } = verify_dim3_decomposition(g, &k).unwrap() {
            checked += 1;
            for (w, v) in worst.iter_mut().zip([theorem, corollary, phi_sectional, ricci]) {
                *w = max([*w, v]);
            }
        }
    }
    outcome(
        geos.len() == 125 && checked == 125 && worst.iter().all(|w| *w < 1e-6),
        format!(
            "{checked}/{} points; theorem {:.1e}, corollary {:.1e}, F − (τ/2 − 2κ) {:.1e}, Ricci form {:.1e}",
            geos.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3]
        ),
    )
}

fn lambda_kappa() -> Outcome {
    let geos = ortho(&grid(&ns_half()));
    let worst = max(geos.iter().map(|g| {
        let k = extract_kmn(g).unwrap();
        (k.lambda - (1.0 - k.kappa).sqrt()).abs()
    }));
    outcome(worst < 1e-8, format!("max |λ − √(1 − κ)| = {worst:.1e} over {} points", geos.len()))
}

fn phi_sectional(g: &PointGeometry) -> f64 {
    let (e, ..) = phi_basis(g, DEGENERACY_THRESHOLD).expect("h ≠ 0 on ns-0.5");
    g.phi_sectional(&e).unwrap()
}

fn structure_distance(a: &ManifoldSpec, b: &ManifoldSpec) -> f64 {
    max(a.domain().points().iter().map(|p| {
        let (x, y) = (a.evaluate_point(p).unwrap(), b.evaluate_point(p).unwrap());
        max([(&x.g - &y.g).amax(), (&x.phi - &y.phi).amax(), (&x.xi - &y.xi).amax(), (&x.eta - &y.eta).amax()])
    }))
}

fn deformation_laws() -> Outcome {
    let base = ns_half();
    let base_geos = ortho(&grid(&base));
    let (mut kmn_err, mut f_err, mut h_err) = (0.0f64, 0.0f64, 0.0f64);
    for a in ORBIT {
        let shipped = registry::find(&format!("ns-0.5-a{a}")).unwrap().spec;
        let geos = ortho(&grid(&shipped));
        for (g0, g1) in base_geos.iter().zip(&geos) {
            let k0 = extract_kmn(g0).unwrap();
            let k1 = extract_kmn(g1).unwrap();
            let p = predicted_kmn(k0.kappa, k0.mu, k0.nu, a);
            kmn_err = max([kmn_err, (k1.kappa - p.kappa).abs(), (k1.mu - p.mu).abs(), (k1.nu - p.nu).abs()]);
            let f_law = predicted_f_and_coeffs(phi_sectional(g0), k0.kappa, k0.mu, k0.nu, a).f_sectional;
            f_err = max([f_err, (phi_sectional(g1) - f_law).abs()]);
        }
        for p in base.domain().points() {
            let h0 = compute_h(&base, &p).unwrap();
            let h1 = compute_h(&shipped, &p).unwrap();
            h_err = max([h_err, (h1 - h0 / a).amax()]);
        }
    }
    let mut comp_err: f64 = 0.0;
    for a in ORBIT {
        for b in ORBIT {
            let twice = apply_deformation(&apply_deformation(&base, a).unwrap(), b).unwrap();
            let once = apply_deformation(&base, a * b).unwrap();
            comp_err = comp_err.max(structure_distance(&twice, &once));
        }
    }
    outcome(
        kmn_err < 1e-5 && f_err < 1e-5 && h_err < 1e-6 && comp_err < 1e-12,
        format!("(κ̄, μ̄, ν̄) {kmn_err:.1e}; F̄ {f_err:.1e}; h̄ − h/a {h_err:.1e}; D_b∘D_a − D_ab {comp_err:.1e}"),
    )
}

fn algebraic_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for lambda in [0.3, 0.7] {
        let m = standard_model(1, lambda).unwrap();
        for v in contact_identities(&m.data).values() {
            worst = max([worst, *v]);
            count += 1;
        }
    }
    outcome(count == 8 && worst < 1e-12, format!("{count} identity residuals, max {worst:.1e}"))
}

fn random_f(rng: &mut StdRng) -> SpaceFormCoefficients {
    SpaceFormCoefficients(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
}

fn space_form_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut fit_err, mut kmn_err) = (0.0f64, 0.0f64);
    let mut draws = 0;
    let mut nullspace = 0;
    for n in [2, 3] {
        for _ in 0..100 {
            let model = standard_model(n, rng.gen_range(0.1..1.5)).unwrap();
            let f = random_f(&mut rng);
            let r = synthetic_curvature(&model, &f);
            let fit = fit_space_form(&r, &model.data).unwrap();
            nullspace += fit.nullspace_dim;
            fit_err = max([fit_err, fit.distance_modulo_null_space(&f)]);
            let k = extract_kmn_from(&r, &model.data).unwrap();
            let (kappa, mu, nu) = f.kmn();
            kmn_err = max([kmn_err, (k.kappa - kappa).abs(), (k.mu - mu).abs(), (k.nu - nu).abs()]);
            draws += 1;
        }
    }
    outcome(
        fit_err < 1e-10 && kmn_err < 1e-12,
        format!("{draws} draws (dim 5, 7); fit error modulo null space {fit_err:.1e} (total null space dim {nullspace}); κμν − (f₁−f₃, f₄−f₆, f₇−f₈) {kmn_err:.1e}"),
    )
}

fn dim5_rigidity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut detected = 0;
    let cases = [-0.8, -0.36, 0.0, 0.5, 1.7];
    for f6 in cases {
        let model = standard_model(2, (1.0f64 + f6).sqrt()).unwrap();
        let f = rigid_coefficients(f6);
        let r = synthetic_curvature(&model, &f);
        let fit = fit_space_form(&r, &model.data).unwrap();
        let k = extract_kmn_from(&r, &model.data).unwrap();
        let rep = check_dim5_rigidity(&fit, &k, model_phi_sectional(&model, &r), 1e-10);
        worst = max([worst, rep.max_residual]);

        let bad = f.with(8, 0.05);
        let r = synthetic_curvature(&model, &bad);
        let fit = fit_space_form(&r, &model.data).unwrap();
        let k = extract_kmn_from(&r, &model.data).unwrap();
        if check_dim5_rigidity(&fit, &k, model_phi_sectional(&model, &r), 1e-10).violated {
            detected += 1;
        }
    }
    outcome(
        worst < 1e-10 && detected == cases.len(),
        format!("rigid relations max residual {worst:.1e}; f₈ ≠ 0 detected {detected}/{}", cases.len()),
    )
}

fn conformal_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut trace, mut closed) = (0.0f64, 0.0f64);
    for n in [1, 2, 3] {
        for _ in 0..20 {
            let model = standard_model(n, rng.gen_range(0.1..1.5)).unwrap();
            let f = random_f(&mut rng);
            let q = space_form_ricci(&model.data, &f);
            let c = space_form_consistency(&model.data, &f).unwrap();
            trace = max([trace, (q.trace() - space_form_scalar(n, &f)).abs(), c.scalar, c.ricci]);
            closed = max([closed, c.schouten, c.weyl, c.weyl_xi_xi, c.weyl_traces]);
        }
    }
    let mut agree = 0;
    let mut flat_cases = 0;
    let draws = 400;
    for i in 0..draws {
        let n = 2 + i % 2;
        let model = standard_model(n, rng.gen_range(0.1..1.5)).unwrap();
        let mut f = random_f(&mut rng);
        for idx in [2, 5, 6, 8] {
            if rng.gen_bool(0.6) {
                f = f.with(idx, 0.0);
            }
        }
        let rep = flatness_test_model(&model.data, &f).unwrap();
        let Some(TheoremStatus::Applicable { predicts_flat, .. }) = rep.theorem else { continue };
        flat_cases += usize::from(predicts_flat);
        if predicts_flat == rep.conformally_flat {
            agree += 1;
        }
    }
    let mut dim3_weyl: f64 = 0.0;
    for e in registry::registry().into_iter().filter(|e| e.spec.dimension() == 3) {
        for g in grid(&e.spec) {
            dim3_weyl = max([dim3_weyl, point_weyl(&g).unwrap().max_abs()]);
        }
    }
    outcome(
        trace < 1e-10 && closed < 1e-10 && agree == draws && flat_cases > 0 && flat_cases < draws && dim3_weyl < 1e-6,
        format!(
            "trace identity {trace:.1e}; Schouten/Weyl closed forms {closed:.1e}; biconditional {agree}/{draws} ({flat_cases} flat); dim-3 oracle |W| {dim3_weyl:.1e}"
        ),
    )
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` from analytic `g` and `∂g`.
fn christoffel(g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Vec<f64> {
    let m = g.nrows();
    let gi = g.clone().try_inverse().unwrap();
    let mut out = vec![0.0; m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                out[(k * m + i) * m + j] =
                    (0..m).map(|l| 0.5 * gi[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])).sum();
            }
        }
    }
    out
}

fn fd_error(spec: &ManifoldSpec, p: &DVector<f64>, exact: &[f64], step: f64) -> f64 {
    let conn = connection_with(spec, p, &FdConfig { step, richardson: false }).unwrap();
    let m = spec.dimension();
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((conn.get(k, i, j) - exact[(k * m + i) * m + j]).abs());
            }
        }
    }
    worst
}

const TRANSCENDENTAL: &str = r#"
name = "warped"
dimension = 3
coordinates = ["x", "y", "z"]
[domain]
lower = [-0.5, -0.5, -0.5]
upper = [0.5, 0.5, 0.5]
[chart]
metric = [["exp(y)", "0", "0"], ["0", "exp(x) + sin(z)^2", "0"], ["0", "0", "1"]]
phi = [["0", "-exp(-y/2)*sqrt(exp(x) + sin(z)^2)", "0"], ["exp(y/2)/sqrt(exp(x) + sin(z)^2)", "0", "0"], ["0", "0", "0"]]
xi = ["0", "0", "1"]
"#;

fn fd_convergence() -> Outcome {
    let (d1, d2) = (1e-3, 5e-4);

    let spec = registry::sasakian_chart();
    let p = DVector::from_column_slice(&[0.2, 0.3, -0.1]);
    let y = p[1];
    let g = spec.metric_at(&p).unwrap();
    let dy = DMatrix::from_row_slice(3, 3, &[y / 2.0, 0.0, -0.25, 0.0, 0.0, 0.0, -0.25, 0.0, 0.0]);
    let exact = christoffel(&g, &[DMatrix::zeros(3, 3), dy, DMatrix::zeros(3, 3)]);
    let (e1, e2) = (fd_error(&spec, &p, &exact, d1), fd_error(&spec, &p, &exact, d2));
    let ratio = e1 / e2;

    // Same measurement where the truncation error is not zero.
    let warped = from_toml_str(TRANSCENDENTAL).unwrap();
    let q = DVector::from_column_slice(&[0.1, -0.2, 0.3]);
    let (x, y, z): (f64, f64, f64) = (q[0], q[1], q[2]);
    let gw = DMatrix::from_diagonal(&DVector::from_column_slice(&[y.exp(), x.exp() + z.sin().powi(2), 1.0]));
    let dgw = [
        DMatrix::from_diagonal(&DVector::from_column_slice(&[0.0, x.exp(), 0.0])),
        DMatrix::from_diagonal(&DVector::from_column_slice(&[y.exp(), 0.0, 0.0])),
        DMatrix::from_diagonal(&DVector::from_column_slice(&[0.0, 2.0 * z.sin() * z.cos(), 0.0])),
    ];
    let exact_w = christoffel(&gw, &dgw);
    let (w1, w2) = (fd_error(&warped, &q, &exact_w, 1e-2), fd_error(&warped, &q, &exact_w, 5e-3));

    outcome(
        (3.5..=4.5).contains(&ratio),
        format!(
            "sasakian-r3 Christoffel error {e1:.2e} at δ = {d1:e}, {e2:.2e} at δ = {d2:e}, ratio {ratio:.2}; \
             for reference, a transcendental metric gives ratio {:.2} ({w1:.2e} → {w2:.2e})",
            w1 / w2
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "flat suite", flat_suite),
        (2, "Sasakian suite", sasakian_suite),
        (3, "dim-3 decomposition", dim3_decomposition),
        (4, "λ–κ link", lambda_kappa),
        (5, "deformation laws", deformation_laws),
        (6, "algebraic identities", algebraic_identities),
        (7, "space-form round trip", space_form_round_trip),
        (8, "dim-5 rigidity", dim5_rigidity),
        (9, "conformal suite", conformal_suite),
        (10, "FD convergence", fd_convergence),
    ];
    let mut unexpected = 0;
    for (n, name, run) in criteria {
        let start = std::time::Instant::now();
        let o = run();
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:2}: {verdict}  {name}: {} [{:.2?}]", o.summary, start.elapsed());
        match (o.pass, known) {
            (false, Some(why)) => println!("              known unattainable: {why}"),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
