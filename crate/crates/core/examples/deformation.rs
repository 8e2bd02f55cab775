//! D_a-homothetic deformations: the oracle on the deformed structure against
//! the transformation laws for κ, μ, ν and F.

use kmn_core::curvature::PointGeometry;
use kmn_core::deformation::{apply_deformation, predicted_f_and_coeffs, predicted_kmn};
use kmn_core::kmn::{extract_kmn, DEGENERACY_THRESHOLD};
use kmn_core::registry;
use kmn_core::structure::phi_basis;

fn phi_sectional(geo: &PointGeometry) -> kmn_core::Result<f64> {
    let (e, ..) = phi_basis(geo, DEGENERACY_THRESHOLD).expect("h ≠ 0");
    geo.phi_sectional(&e)
}

fn main() -> kmn_core::Result<()> {
    let base = registry::non_sasakian(0.5)?;
    let p = base.domain().center();
    let geo = PointGeometry::compute(&base, &p)?;
    let k = extract_kmn(&geo)?;
    let f = phi_sectional(&geo)?;
    println!("a = 1: κ = {:.6}, μ = {:.6}, ν = {:.6}, F = {f:.6}", k.kappa, k.mu, k.nu);
    for a in [0.5, 2.0, 3.0, 7.5] {
        let deformed = apply_deformation(&base, a)?;
        let g = PointGeometry::compute(&deformed, &p)?;
        let got = extract_kmn(&g)?;
        let want = predicted_kmn(k.kappa, k.mu, k.nu, a);
        let f_want = predicted_f_and_coeffs(f, k.kappa, k.mu, k.nu, a).f_sectional;
        println!(
            "a = {a}: κ̄ {:.9} (law {:.9})  μ̄ {:.9} (law {:.9})  F̄ {:.9} (law {:.9})",
            got.kappa,
            want.kappa,
            got.mu,
            want.mu,
            phi_sectional(&g)?,
            f_want
        );
    }
    Ok(())
}
