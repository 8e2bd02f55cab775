//! Build f₁R₁ + … + f₈R₈ on a model, fit it back and report the null space.
//! In dimension 3 the fit is not unique; from dimension 5 on it is.

use kmn_core::kmn::fit_space_form;
use kmn_core::pointmodel::{standard_model, synthetic_curvature, SpaceFormCoefficients};

fn main() -> kmn_core::Result<()> {
    let f = SpaceFormCoefficients([0.4, -0.3, 1.1, 0.8, -0.6, 0.2, 0.5, -0.9]);
    for n in [1, 2, 3] {
        let model = standard_model(n, 0.6)?;
        let r = synthetic_curvature(&model, &f);
        let fit = fit_space_form(&r, &model.data)?;
        println!(
            "dim {}: rank {}, null space {}, residual {:.1e}, distance to f modulo null space {:.1e}",
            model.dim(),
            fit.rank,
            fit.nullspace_dim,
            fit.residual,
            fit.distance_modulo_null_space(&f)
        );
        for v in &fit.null_space {
            println!("    null vector {:?}", v.map(|x| (x * 1e6).round() / 1e6));
        }
        let (k, mu, nu) = fit.coefficients.kmn();
        println!("    (κ, μ, ν) from the fit = ({k:.6}, {mu:.6}, {nu:.6}), from f = {:?}", f.kmn());
    }
    Ok(())
}
