//! Run the full suite on a built-in manifold and print the JSON report.
//!
//! `cargo run --example verification_report -- ns-0.5-a2`

use kmn_core::registry;
use kmn_core::report::{verify, SuiteOptions};

fn main() -> kmn_core::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ns-0.5".into());
    let entry = registry::find(&name).unwrap_or_else(|| panic!("no built-in manifold named {name}"));
    let report = verify(&entry.spec, entry.manifest, &SuiteOptions::default())?;
    eprint!("{}", report.render_text());
    println!("{}", report.to_json());
    Ok(())
}
