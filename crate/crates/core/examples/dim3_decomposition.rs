//! In dimension 3 the curvature of a (κ, μ, ν)-contact metric manifold is
//! fixed by τ, κ, μ, ν. Check both closed forms on NS(λ₀) for a few λ₀.

use kmn_core::curvature::PointGeometry;
use kmn_core::kmn::{extract_kmn, verify_dim3_decomposition, Dim3Decomposition};
use kmn_core::registry;

fn main() -> kmn_core::Result<()> {
    for lambda0 in [0.2, 0.5, 0.9] {
        let spec = registry::non_sasakian(lambda0)?;
        let geo = PointGeometry::compute(&spec, &spec.domain().center())?;
        let k = extract_kmn(&geo)?;
        match verify_dim3_decomposition(&geo, &k)? {
            Dim3Decomposition::Checked { theorem, corollary, phi_sectional, ricci, f, .. } => println!(
                "λ₀ = {lambda0}: κ = {:.6} μ = {:.6} τ = {:.6} F = {f:.6}; residuals {theorem:.1e} {corollary:.1e} {phi_sectional:.1e} {ricci:.1e}",
                k.kappa, k.mu, geo.scalar
            ),
            Dim3Decomposition::Skipped { reason } => println!("λ₀ = {lambda0}: skipped ({reason})"),
        }
    }
    let sasakian = registry::sasakian_chart();
    let geo = PointGeometry::compute(&sasakian, &sasakian.domain().center())?;
    println!("sasakian-r3: {:?}", verify_dim3_decomposition(&geo, &extract_kmn(&geo)?)?);
    Ok(())
}
