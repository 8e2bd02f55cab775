//! In dimension ≥ 5 a generalized (κ, μ, ν)-space form with h ≠ 0 is rigid:
//! every coefficient is fixed by f₆. Check a conforming model and one with
//! f₈ ≠ 0.

use kmn_core::kmn::{extract_kmn_from, fit_space_form, model_phi_sectional, check_dim5_rigidity, rigid_coefficients};
use kmn_core::pointmodel::{standard_model, synthetic_curvature};

fn main() -> kmn_core::Result<()> {
    let f6: f64 = -0.36;
    let model = standard_model(2, (1.0 + f6).sqrt())?;
    for (label, f) in [("rigid", rigid_coefficients(f6)), ("f8 = 0.1", rigid_coefficients(f6).with(8, 0.1))] {
        let r = synthetic_curvature(&model, &f);
        let fit = fit_space_form(&r, &model.data)?;
        let kmn = extract_kmn_from(&r, &model.data)?;
        let report = check_dim5_rigidity(&fit, &kmn, model_phi_sectional(&model, &r), 1e-10);
        println!("{label}: violated = {}, max residual {:.2e}", report.violated, report.max_residual);
        for (name, v) in report.residuals.iter().filter(|(_, v)| **v > 1e-10) {
            println!("    {name}: {v:.3e}");
        }
    }
    Ok(())
}
