//! Classify every built-in manifold, plus a broken structure (φ doubled).

use kmn_core::registry;
use kmn_core::structure::{classify, Tolerance};

fn main() -> kmn_core::Result<()> {
    let mut specs: Vec<_> = registry::registry().into_iter().map(|e| e.spec).collect();
    specs.push(registry::scale_phi(&registry::heisenberg_frame(), 2.0));
    println!("{:<24} {:>6} {:>8} {:>10} {:>9}  axioms", "manifold", "acm", "contact", "K-contact", "Sasakian");
    for spec in &specs {
        let r = classify(spec, Tolerance::default())?;
        let f = r.flags;
        println!(
            "{:<24} {:>6} {:>8} {:>10} {:>9}  {:.1e}",
            spec.name(),
            f.almost_contact_metric,
            f.contact,
            f.k_contact,
            f.sasakian,
            r.residuals.axioms_max()
        );
    }
    Ok(())
}
