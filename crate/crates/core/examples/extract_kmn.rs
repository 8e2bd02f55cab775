//! (κ, μ, ν) over the sample grid of a manifest (default: NS(0.5)).

use kmn_core::curvature::PointGeometry;
use kmn_core::geometry::manifest::load;
use kmn_core::kmn::{extract_kmn, KmnSpread};
use kmn_core::registry;
use kmn_core::structure::sample_geometry;

fn main() -> kmn_core::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => load(path)?,
        None => registry::non_sasakian(0.5)?,
    };
    let geos = sample_geometry(&spec)?;
    let results = geos
        .iter()
        .map(|g| extract_kmn(&g.orthonormal()?))
        .collect::<kmn_core::Result<Vec<_>>>()?;
    for (g, k) in geos.iter().zip(&results).step_by(31) {
        println!(
            "{:?}: κ = {:.9}, μ = {:.9}, ν = {:.9}, λ = {:.9}, residual {:.1e}",
            g.data.point.as_slice(),
            k.kappa,
            k.mu,
            k.nu,
            k.lambda,
            k.residual
        );
    }
    if let Some(s) = KmnSpread::of(&results) {
        println!("spread over {} points: {:?}", results.len(), s);
    }
    let center = PointGeometry::compute(&spec, &spec.domain().center())?;
    let k = extract_kmn(&center)?;
    println!("λ − √(1 − κ) = {:.2e}", k.lambda - (1.0 - k.kappa).max(0.0).sqrt());
    Ok(())
}
