//! Conformal flatness. On synthetic space forms with h ≠ 0, W = 0 exactly
//! when f₂, f₅R₅, f₆ and f₈ vanish; in dimension 3 the oracle checks the
//! Codazzi condition on the Schouten tensor instead.

use kmn_core::conformal::{flatness_test, flatness_test_model, TheoremStatus};
use kmn_core::pointmodel::{standard_model, SpaceFormCoefficients};
use kmn_core::registry;
use kmn_core::structure::sample_geometry;

fn main() -> kmn_core::Result<()> {
    let model = standard_model(2, 0.8)?;
    let flat = SpaceFormCoefficients([0.7, 0.0, -0.2, 1.3, 0.0, 0.0, 0.4, 0.0]);
    for (label, f) in [("f2 = f5 = f6 = f8 = 0", flat), ("f6 = 0.3", flat.with(6, 0.3))] {
        let r = flatness_test_model(&model.data, &f)?;
        let predicted = match &r.theorem {
            Some(TheoremStatus::Applicable { predicts_flat, .. }) => format!("{predicts_flat}"),
            other => format!("{other:?}"),
        };
        println!("{label}: max |W| = {:.2e}, flat = {}, theorem predicts {predicted}", r.weyl_max, r.conformally_flat);
    }
    for spec in [registry::su2_frame(), registry::heisenberg_frame(), registry::non_sasakian(0.5)?] {
        let r = flatness_test(&spec, &sample_geometry(&spec)?)?;
        println!(
            "{}: |W| = {:.1e}, Codazzi defect = {:.3e}, conformally flat: {}",
            spec.name(),
            r.weyl_max,
            r.codazzi_max.unwrap_or(f64::NAN),
            r.conformally_flat
        );
    }
    Ok(())
}
