//! Every built-in entry with its expected properties next to the values the
//! pipeline recomputes.

use kmn_core::curvature::PointGeometry;
use kmn_core::kmn::extract_kmn;
use kmn_core::registry::registry;
use kmn_core::structure::{classify, Tolerance};

fn main() -> kmn_core::Result<()> {
    for e in registry() {
        let flags = classify(&e.spec, Tolerance::default())?.flags;
        let geo = PointGeometry::compute(&e.spec, &e.spec.domain().center())?;
        let k = extract_kmn(&geo)?;
        println!("{} ({})", e.name, e.expected.note);
        println!(
            "    contact {} / {}, sasakian {} / {}",
            e.expected.contact, flags.contact, e.expected.sasakian, flags.sasakian
        );
        println!("    κ {:?} / {:.9}, μ {:?} / {:.9}", e.expected.kappa, k.kappa, e.expected.mu, k.mu);
    }
    Ok(())
}
