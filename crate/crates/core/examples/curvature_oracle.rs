//! The curvature oracle on the Heisenberg group, once from a chart metric
//! and once from an orthonormal frame. The two must agree after a change of
//! basis.

use kmn_core::curvature::PointGeometry;
use kmn_core::registry;
use kmn_core::tensor::FrameChange;

fn main() -> kmn_core::Result<()> {
    let chart = registry::sasakian_chart();
    let frame = registry::heisenberg_frame();
    let p = nalgebra::DVector::from_column_slice(&[0.2, -0.3, 0.1]);

    let c = PointGeometry::compute(&chart, &p)?;
    let f = PointGeometry::compute(&frame, &p)?;
    println!("scalar curvature: chart {:.10}, frame {:.10}", c.scalar, f.scalar);
    println!("Ricci operator (frame) = {}", f.ricci);

    let vectors = frame.frame_vectors_at(&p)?.expect("frame declares vector fields");
    let change = FrameChange::from_matrix(vectors).expect("frame is non-degenerate");
    let r = c.riemann.transformed(&change);
    println!("max |R_chart - R_frame| = {:.3e}", r.tensor.sub(&f.riemann.tensor).max_abs());

    let sym = c.riemann.symmetry_residuals(&c.data.g);
    println!("symmetries (chart): {sym:?}");
    println!("connection: |∇g| = {:.2e}, torsion = {:.2e}", c.metric_compatibility, c.torsion);
    Ok(())
}
