use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kmn_core::deformation::apply_deformation;
use kmn_core::geometry::manifest::{from_toml_str, to_toml_string};
use kmn_core::report::{self, SuiteOptions, VerificationReport};
use kmn_core::{registry, Error, ManifoldSpec};

/// Verifies curvature identities of contact metric manifolds.
///
/// MANIFEST is a path to a TOML manifest or the name of a built-in entry
/// (see `kmn examples`).
#[derive(Parser)]
#[command(name = "kmn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification suite.
    Verify(Common),
    /// Table of (κ, μ, ν) over the sample grid.
    Extract(Common),
    /// Apply a D_a-homothetic deformation and check the transformation laws.
    Deform {
        #[command(flatten)]
        common: Common,
        /// Deformation constant, a > 0.
        #[arg(long = "a", allow_negative_numbers = true)]
        a: f64,
        /// Write the deformed manifest here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Least-squares generalized space form coefficients.
    Fit(Common),
    /// Weyl tensor and conformal flatness.
    Conformal(Common),
    /// List the built-in manifolds.
    Examples,
}

#[derive(Args)]
struct Common {
    manifest: String,
    /// Samples per coordinate axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Base finite-difference step.
    #[arg(long = "fd-step")]
    fd_step: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> SuiteOptions {
        SuiteOptions {
            grid: self.grid,
            fd_step: self.fd_step,
            ..Default::default()
        }
    }
}

fn load(arg: &str) -> Result<(ManifoldSpec, String), Error> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(entry) = registry::find(arg) {
            return Ok((entry.spec, entry.manifest.to_string()));
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok((from_toml_str(&text)?, text))
}

fn finish(report: &VerificationReport, json: Option<&Path>) -> Result<ExitCode, Error> {
    if let Some(path) = json {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_kmn_table(report: &VerificationReport) {
    let Some(points) = report.section("kmn").and_then(|s| s.details.get("points")).and_then(|p| p.as_array()) else {
        println!("(κ, μ, ν) not extracted: not a contact metric structure");
        return;
    };
    println!("{:<32} {:>14} {:>14} {:>14} {:>10}", "point", "kappa", "mu", "nu", "residual");
    for p in points {
        let coords: Vec<String> = p["point"].as_array().into_iter().flatten().map(|c| format!("{:.3}", c.as_f64().unwrap_or(f64::NAN))).collect();
        let num = |k: &str| p[k].as_f64().unwrap_or(f64::NAN);
        let flag = if p["degenerate"].as_bool() == Some(true) { "  (h = 0)" } else { "" };
        println!(
            "{:<32} {:>14.9} {:>14.9} {:>14.9} {:>10.2e}{flag}",
            format!("({})", coords.join(", ")),
            num("kappa"),
            num("mu"),
            num("nu"),
            num("residual")
        );
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Verify(c) => {
            let (spec, text) = load(&c.manifest)?;
            let r = report::verify(&spec, &text, &c.options())?;
            print!("{}", r.render_text());
            finish(&r, c.json.as_deref())
        }
        Command::Extract(c) => {
            let (spec, text) = load(&c.manifest)?;
            let r = report::extract(&spec, &text, &c.options())?;
            print_kmn_table(&r);
            print!("{}", r.render_text());
            finish(&r, c.json.as_deref())
        }
        Command::Deform { common: c, a, emit } => {
            let (spec, text) = load(&c.manifest)?;
            let deformed = apply_deformation(&spec, a)?;
            if let Some(path) = &emit {
                std::fs::write(path, to_toml_string(&deformed)?)?;
                println!("wrote {} to {}", deformed.name(), path.display());
            }
            let r = report::deform(&spec, &text, a, &c.options())?;
            if let Some(rows) = r.section("deformation").and_then(|s| s.details.get("center")).and_then(|v| v.as_array()) {
                for row in rows {
                    println!(
                        "a = {}: deformed (κ, μ, ν) at the center = ({:.9}, {:.9}, {:.9})",
                        row["a"], row["kappa"].as_f64().unwrap_or(f64::NAN), row["mu"].as_f64().unwrap_or(f64::NAN), row["nu"].as_f64().unwrap_or(f64::NAN)
                    );
                }
            }
            print!("{}", r.render_text());
            finish(&r, c.json.as_deref())
        }
        Command::Fit(c) => {
            let (spec, text) = load(&c.manifest)?;
            let r = report::fit(&spec, &text, &c.options())?;
            if let Some(fit) = r.section("decomposition").map(|s| &s.details["fit"]) {
                println!("f = {}", fit["coefficients"]);
                println!("fit residual {}, rank {}, null space dimension {}", fit["residual"], fit["rank"], fit["nullspace_dim"]);
            }
            print!("{}", r.render_text());
            finish(&r, c.json.as_deref())
        }
        Command::Conformal(c) => {
            let (spec, text) = load(&c.manifest)?;
            let r = report::conformal(&spec, &text, &c.options())?;
            if let Some(d) = r.section("conformal").map(|s| &s.details) {
                println!("max |W| = {}", d["weyl_max"]);
                if !d["codazzi_max"].is_null() {
                    println!("max Codazzi defect = {}", d["codazzi_max"]);
                }
                println!("conformally flat: {}", d["conformally_flat"]);
            }
            print!("{}", r.render_text());
            finish(&r, c.json.as_deref())
        }
        Command::Examples => {
            for e in registry::registry() {
                let x = &e.expected;
                let kind = if x.sasakian {
                    "Sasakian"
                } else if x.contact {
                    "contact"
                } else {
                    "not contact"
                };
                let fmt = |v: Option<f64>| match v {
                    Some(v) => format!("{v:.6}").trim_end_matches('0').trim_end_matches('.').to_string(),
                    None => "-".into(),
                };
                println!(
                    "{:<18} dim {}  {:<12} κ {:<8} μ {:<8} ν {:<4} F {:<4} {}",
                    e.name,
                    e.spec.dimension(),
                    kind,
                    fmt(x.kappa),
                    fmt(x.mu),
                    fmt(x.nu),
                    fmt(x.phi_sectional),
                    x.note
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
