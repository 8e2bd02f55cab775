//! The eight basis tensors on the standard pointwise model, and the
//! identities relating them. They hold for n = 1 only; the larger models
//! show nonzero residuals.

use kmn_core::pointmodel::{basis_tensor, contact_identities, standard_model};

fn main() -> kmn_core::Result<()> {
    for (n, lambda) in [(1, 0.3), (1, 0.7), (2, 0.5), (3, 1.2)] {
        let m = standard_model(n, lambda)?;
        let ids = contact_identities(&m.data);
        println!("n = {n}, λ = {lambda}: {ids:?}");
    }
    let m = standard_model(1, 0.5)?;
    let e = nalgebra::DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let pe = &m.data.phi * &e;
    for i in 1..=8 {
        let v = basis_tensor(i, &m.data, &e, &pe, &pe)?;
        println!("g(R{i}(e, φe)φe, e) = {}", m.data.inner(&v, &e));
    }
    Ok(())
}
