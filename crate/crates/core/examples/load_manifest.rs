//! Load a manifest, evaluate its structure at a point and round-trip it
//! through TOML. Also shows how schema errors report their position.

use kmn_core::geometry::manifest::{from_toml_str, load, to_toml_string};
use kmn_core::registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = match std::env::args().nth(1) {
        Some(path) => load(path)?,
        None => registry::sasakian_chart(),
    };
    let p = spec.domain().center();
    let data = spec.evaluate_point(&p)?;
    println!("{} (dim {}, {:?} basis)", spec.name(), spec.dimension(), spec.basis_kind());
    println!("g at {:?} = {}", p.as_slice(), data.g);
    println!("phi = {}", data.phi);
    println!("xi = {}", data.xi.transpose());

    let text = to_toml_string(&spec)?;
    let again = from_toml_str(&text)?;
    assert_eq!(to_toml_string(&again)?, text);
    println!("TOML round trip ok ({} bytes)", text.len());

    let broken = registry::SASAKIAN_R3.replacen("\"-y/4\"", "\"-y/*4\"", 1);
    println!("broken manifest: {}", from_toml_str(&broken).unwrap_err());
    let asymmetric = registry::SASAKIAN_R3.replacen("\"-y/4\"", "\"-y/5\"", 1);
    println!("asymmetric metric: {}", from_toml_str(&asymmetric).unwrap_err());
    Ok(())
}
