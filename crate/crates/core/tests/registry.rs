use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use kmn_core::curvature::PointGeometry;
use kmn_core::deformation::apply_deformation;
use kmn_core::geometry::manifest::to_toml_string;
use kmn_core::kmn::{extract_kmn, DEGENERACY_THRESHOLD};
use kmn_core::registry::{self, RegistryEntry, ORBIT};
use kmn_core::structure::{classify, phi_basis, sample_geometry, verify_axioms, Tolerance};

const ORACLE: f64 = 1e-6;

fn ortho_grid(entry: &RegistryEntry) -> Vec<PointGeometry> {
    let spec = entry.spec.with_domain(entry.spec.domain().with_resolution(3));
    sample_geometry(&spec).unwrap().iter().map(|g| g.orthonormal().unwrap()).collect()
}

/// A unit vector orthogonal to `ξ` in an orthonormal basis.
fn unit_horizontal(geo: &PointGeometry, k: usize) -> DVector<f64> {
    let xi = &geo.data.xi;
    let mut v = DVector::zeros(geo.dim());
    v[k] = 1.0;
    v -= xi * xi.dot(&v);
    v.normalize()
}

#[test]
fn registry_has_the_expected_entries() {
    let entries = registry::registry();
    assert!(entries.len() >= 9);
    let names: BTreeSet<_> = entries.iter().map(|e| e.name.clone()).collect();
    assert_eq!(names.len(), entries.len(), "duplicate names");
    for name in &names {
        assert!(registry::find(name).is_some());
    }
}

#[test]
fn axioms_hold_at_load() {
    for entry in registry::registry() {
        for p in entry.spec.domain().points() {
            let worst = verify_axioms(&entry.spec, &p).unwrap().values().fold(0.0f64, |a, &b| a.max(b));
            assert!(worst < 1e-9, "{}: axiom residual {worst:e}", entry.name);
        }
    }
}

#[test]
fn classification_matches_expected() {
    for entry in registry::registry() {
        let spec = entry.spec.with_domain(entry.spec.domain().with_resolution(3));
        let flags = classify(&spec, Tolerance::default()).unwrap().flags;
        let x = &entry.expected;
        assert!(flags.almost_contact_metric, "{}", entry.name);
        assert_eq!(flags.contact, x.contact, "{}", entry.name);
        assert_eq!(flags.k_contact, x.k_contact, "{}", entry.name);
        assert_eq!(flags.sasakian, x.sasakian, "{}", entry.name);
    }
}

#[test]
fn curvature_invariants_match_expected() {
    for entry in registry::registry() {
        let x = &entry.expected;
        for geo in ortho_grid(&entry) {
            if x.flat {
                assert!(geo.riemann.tensor.frobenius() < 1e-8, "{}", entry.name);
            }
            if x.contact {
                let k = extract_kmn(&geo).unwrap();
                assert!(k.residual < ORACLE, "{}: ansatz residual {:e}", entry.name, k.residual);
                if let Some(kappa) = x.kappa {
                    assert!((k.kappa - kappa).abs() < ORACLE, "{}: κ = {}", entry.name, k.kappa);
                }
                if let Some(mu) = x.mu {
                    assert!((k.mu - mu).abs() < ORACLE, "{}: μ = {}", entry.name, k.mu);
                }
                if let Some(nu) = x.nu {
                    assert!((k.nu - nu).abs() < ORACLE, "{}: ν = {}", entry.name, k.nu);
                }
            }
            if let Some(f) = x.phi_sectional {
                for k in 0..geo.dim() {
                    let e = unit_horizontal(&geo, k);
                    if !e.iter().all(|c| c.is_finite()) {
                        continue;
                    }
                    let got = geo.phi_sectional(&e).unwrap();
                    assert!((got - f).abs() < ORACLE, "{}: F = {got}", entry.name);
                }
            }
        }
    }
}

#[test]
fn shipped_orbit_manifests_match_the_deformation() {
    let base = registry::find("ns-0.5").unwrap().spec;
    let shipped = [registry::NS_HALF_A05, registry::NS_HALF_A2, registry::NS_HALF_A3];
    for (text, a) in shipped.into_iter().zip(ORBIT) {
        let deformed = apply_deformation(&base, a).unwrap();
        assert_eq!(text, to_toml_string(&deformed).unwrap(), "a = {a}");
    }
}

#[test]
fn sasakian_phi_basis_is_orthonormal() {
    let entry = registry::find("sasakian-r3").unwrap();
    for p in entry.spec.domain().points() {
        let geo = PointGeometry::compute(&entry.spec, &p).unwrap();
        let d = &geo.data;
        // Horizontal unit vector in coordinates: project ∂x off ξ.
        let mut e = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        e -= &d.xi * d.eta.dot(&e);
        e /= d.inner(&e, &e).sqrt();
        let phi_e = &d.phi * &e;
        let basis = [e, phi_e, d.xi.clone()];
        let gram = DMatrix::from_fn(3, 3, |i, j| d.inner(&basis[i], &basis[j]));
        assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-6, "at {p:?}");
    }
}

#[test]
fn h_eigenvectors_give_phi_bases() {
    for entry in registry::registry().into_iter().filter(|e| e.expected.contact && e.expected.kappa.is_some_and(|k| k < 1.0)) {
        for geo in sample_geometry(&entry.spec.with_domain(entry.spec.domain().with_resolution(3))).unwrap() {
            let (e, phi_e, xi, lambda) = phi_basis(&geo, DEGENERACY_THRESHOLD).expect("h ≠ 0");
            let kappa = entry.expected.kappa.unwrap();
            assert!((lambda * lambda - (1.0 - kappa)).abs() < 1e-6, "{}: λ = {lambda}", entry.name);
            let basis = [e, phi_e, xi];
            let gram = DMatrix::from_fn(3, 3, |i, j| geo.data.inner(&basis[i], &basis[j]));
            assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-6, "{}", entry.name);
        }
    }
}
