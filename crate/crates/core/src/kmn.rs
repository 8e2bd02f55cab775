//! Extraction of `(κ, μ, ν)`, the dimension-3 decompositions and space-form fits.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{unit, CurvatureTensor, PointGeometry};
use crate::error::{Error, Result};
use crate::geometry::PointFrameData;
use crate::pointmodel::{basis_tensors, AlgebraicModel, SpaceFormCoefficients};
use crate::structure::phi_basis;
use crate::tensor::{spectral_norm, Tensor4};

/// Below this spectral norm `h` counts as zero and `μ`, `ν` are undetermined.
pub const DEGENERACY_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KmnResult {
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
    /// Largest deviation `|R(E_i, E_j)ξ − ansatz|` over orthonormal basis pairs.
    pub residual: f64,
    /// Largest eigenvalue of `h` (0 when `h = 0`).
    pub lambda: f64,
    pub sasakian: bool,
    /// `h ≈ 0`: `μ`, `ν` are reported as 0 and carry no information.
    pub degenerate: bool,
}

/// Expresses `r` and `data` in an orthonormal basis (no-op when already orthonormal).
pub fn orthonormal_pair(r: &CurvatureTensor, data: &PointFrameData) -> Result<(CurvatureTensor, PointFrameData)> {
    let m = data.dim();
    if (&data.g - DMatrix::<f64>::identity(m, m)).amax() == 0.0 {
        return Ok((r.clone(), data.clone()));
    }
    let (o, change) = data.to_orthonormal().ok_or_else(|| Error::NotPositiveDefinite {
        point: data.point.iter().copied().collect(),
        min_eigenvalue: 0.0,
    })?;
    Ok((r.transformed(&change), o))
}

/// Least-squares `(κ, μ, ν)` from
/// `R(X, Y)ξ = κ(η(Y)X − η(X)Y) + μ(η(Y)hX − η(X)hY) + ν(η(Y)φhX − η(X)φhY)`.
pub fn extract_kmn_from(r: &CurvatureTensor, data: &PointFrameData) -> Result<KmnResult> {
    let (r, d) = orthonormal_pair(r, data)?;
    let m = d.dim();
    let h = d.h_or_zero();
    let ph = &d.phi * &h;
    let degenerate = spectral_norm(&h) < DEGENERACY_THRESHOLD;
    let cols = if degenerate { 1 } else { 3 };
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let rows = pairs.len() * m;
    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DVector::zeros(rows);
    for (n, &(i, j)) in pairs.iter().enumerate() {
        let (ei, ej) = (unit(m, i), unit(m, j));
        let (ni, nj) = (d.eta[i], d.eta[j]);
        let lhs = r.apply(&ei, &ej, &d.xi);
        let k_term = &ei * nj - &ej * ni;
        let m_term = h.column(i) * nj - h.column(j) * ni;
        let n_term = ph.column(i) * nj - ph.column(j) * ni;
        for l in 0..m {
            let row = n * m + l;
            b[row] = lhs[l];
            a[(row, 0)] = k_term[l];
            if !degenerate {
                a[(row, 1)] = m_term[l];
                a[(row, 2)] = n_term[l];
            }
        }
    }
    let x = least_squares(&a, &b)?.solution;
    let fitted = &a * &x;
    let mut residual: f64 = 0.0;
    for n in 0..pairs.len() {
        let diff = (b.rows(n * m, m) - fitted.rows(n * m, m)).norm();
        residual = residual.max(diff);
    }
    let (kappa, mu, nu) = if degenerate { (x[0], 0.0, 0.0) } else { (x[0], x[1], x[2]) };
    let lambda = if degenerate {
        0.0
    } else {
        let sym = (&h + h.transpose()) * 0.5;
        sym.symmetric_eigenvalues().max().max(0.0)
    };
    Ok(KmnResult {
        kappa,
        mu,
        nu,
        residual,
        lambda,
        sasakian: degenerate && (kappa - 1.0).abs() < 1e-5,
        degenerate,
    })
}

pub fn extract_kmn(geo: &PointGeometry) -> Result<KmnResult> {
    extract_kmn_from(&geo.riemann, &geo.data)
}

/// Spread of `(κ, μ, ν)` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KmnSpread {
    pub kappa: (f64, f64),
    pub mu: (f64, f64),
    pub nu: (f64, f64),
    pub max_residual: f64,
}

impl KmnSpread {
    pub fn of(results: &[KmnResult]) -> Option<Self> {
        let first = results.first()?;
        let mut s = Self {
            kappa: (first.kappa, first.kappa),
            mu: (first.mu, first.mu),
            nu: (first.nu, first.nu),
            max_residual: 0.0,
        };
        for r in results {
            s.kappa = (s.kappa.0.min(r.kappa), s.kappa.1.max(r.kappa));
            s.mu = (s.mu.0.min(r.mu), s.mu.1.max(r.mu));
            s.nu = (s.nu.0.min(r.nu), s.nu.1.max(r.nu));
            s.max_residual = s.max_residual.max(r.residual);
        }
        Some(s)
    }

    /// Largest `max − min` among the three functions.
    pub fn variation(&self) -> f64 {
        (self.kappa.1 - self.kappa.0).max(self.mu.1 - self.mu.0).max(self.nu.1 - self.nu.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Dim3Decomposition {
    Checked {
        /// `R − [(τ/2 − 2κ)R₁ + (τ/2 − 3κ)R₃ + μR₄ + νR₇]`
        theorem: f64,
        /// `R − [F R₁ + (F − κ)R₃ + μR₄ + νR₇]`
        corollary: f64,
        /// Difference between the two right-hand sides.
        forms: f64,
        /// `|F − (τ/2 − 2κ)|`
        phi_sectional: f64,
        /// `Q − [(τ/2 − κ)I + (3κ − τ/2)η⊗ξ + μh + νφh]`
        ricci: f64,
        f: f64,
    },
    Skipped {
        reason: String,
    },
}

/// Dimension-3 decompositions of the curvature in terms of `κ, μ, ν`.
pub fn verify_dim3_decomposition(geo: &PointGeometry, kmn: &KmnResult) -> Result<Dim3Decomposition> {
    if geo.dim() != 3 {
        return Ok(Dim3Decomposition::Skipped {
            reason: format!("dimension is {}, not 3", geo.dim()),
        });
    }
    if kmn.degenerate || kmn.kappa >= 1.0 {
        return Ok(Dim3Decomposition::Skipped {
            reason: format!("needs κ < 1 (κ = {:.6}, h {}zero)", kmn.kappa, if kmn.degenerate { "" } else { "non" }),
        });
    }
    let o = geo.orthonormal()?;
    let Some((e, _, _, _)) = phi_basis(&o, DEGENERACY_THRESHOLD) else {
        return Ok(Dim3Decomposition::Skipped {
            reason: "h has no positive eigenvalue".into(),
        });
    };
    let f = o.phi_sectional(&e)?;
    let (kappa, mu, nu, tau) = (kmn.kappa, kmn.mu, kmn.nu, o.scalar);
    let [r1, _, r3, r4, _, _, r7, _] = basis_tensors(&o.data);
    let combo = |a: f64, b: f64| -> Tensor4 {
        let mut t = r1.scaled(a);
        t.axpy(b, &r3);
        t.axpy(mu, &r4);
        t.axpy(nu, &r7);
        t
    };
    let theorem_rhs = combo(0.5 * tau - 2.0 * kappa, 0.5 * tau - 3.0 * kappa);
    let corollary_rhs = combo(f, f - kappa);
    let d = &o.data;
    let h = o.h();
    let q_rhs = DMatrix::<f64>::identity(3, 3) * (0.5 * tau - kappa)
        + &d.xi * d.eta.transpose() * (3.0 * kappa - 0.5 * tau)
        + &h * mu
        + &d.phi * &h * nu;
    Ok(Dim3Decomposition::Checked {
        theorem: o.riemann.tensor.sub(&theorem_rhs).max_abs(),
        corollary: o.riemann.tensor.sub(&corollary_rhs).max_abs(),
        forms: theorem_rhs.sub(&corollary_rhs).max_abs(),
        phi_sectional: (f - (0.5 * tau - 2.0 * kappa)).abs(),
        ricci: spectral_norm(&(&o.ricci - q_rhs)),
        f,
    })
}

/// Minimal-norm least-squares solution with its rank and null space.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    pub rank: usize,
    /// Orthonormal basis of the null space of the design matrix, as columns.
    pub null_space: DMatrix<f64>,
}

/// Relative singular-value cutoff used for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// SVD-based least squares. The decomposition comes from `faer`: nalgebra's
/// SVD loses accuracy on tall design matrices with clustered singular values.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LeastSquares> {
    let cols = a.ncols();
    let svd = faer::Mat::<f64>::from_fn(a.nrows(), cols, |i, j| a[(i, j)])
        .thin_svd()
        .map_err(|e| Error::InvalidArgument(format!("SVD did not converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sigma: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_TOLERANCE * smax.max(1.0);
    let mut solution = DVector::zeros(cols);
    let mut rank = 0;
    let mut nulls = Vec::new();
    for (k, &s) in sigma.iter().enumerate() {
        let v = DVector::from_fn(cols, |i, _| v[(i, k)]);
        if s > cutoff {
            rank += 1;
            let coeff: f64 = (0..b.len()).map(|i| u[(i, k)] * b[i]).sum::<f64>() / s;
            solution += v * coeff;
        } else {
            nulls.push(v);
        }
    }
    // A thin SVD of a wide matrix has fewer right singular vectors than columns.
    if sigma.len() < cols {
        let span = DMatrix::from_fn(cols, sigma.len(), |i, k| v[(i, k)]);
        let complement = orthogonal_complement(&span, cols);
        nulls.extend(complement.column_iter().map(|c| c.into_owned()));
    }
    let null_space = if nulls.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&nulls)
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("least-squares system produced non-finite values".into()));
    }
    Ok(LeastSquares { solution, rank, null_space })
}

fn orthogonal_complement(span: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let proj = DMatrix::<f64>::identity(n, n) - span * span.transpose();
    let eig = proj.symmetric_eigen();
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.5)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceFormFit {
    pub coefficients: SpaceFormCoefficients,
    /// Largest component of `R − Σ fᵢRᵢ` in an orthonormal basis.
    pub residual: f64,
    pub rank: usize,
    pub nullspace_dim: usize,
    /// Null-space basis vectors, each of length 8.
    pub null_space: Vec<[f64; 8]>,
    /// Basis tensors included in the fit (1-based).
    pub columns: Vec<usize>,
}

impl SpaceFormFit {
    /// Distance of `f` from the affine set `fitted + null space`, restricted to
    /// the fitted columns.
    pub fn distance_modulo_null_space(&self, f: &SpaceFormCoefficients) -> f64 {
        let k = self.columns.len();
        let diff = DVector::from_iterator(k, self.columns.iter().map(|&c| self.coefficients.f(c) - f.f(c)));
        let mut rem = diff.clone();
        for v in &self.null_space {
            let nv = DVector::from_iterator(k, self.columns.iter().map(|&c| v[c - 1]));
            rem -= &nv * nv.dot(&diff);
        }
        rem.amax()
    }
}

/// Least-squares fit of `R = f₁R₁ + … + f₈R₈`.
pub fn fit_space_form(r: &CurvatureTensor, data: &PointFrameData) -> Result<SpaceFormFit> {
    fit_space_form_restricted(r, data, &[1, 2, 3, 4, 5, 6, 7, 8])
}

/// Fit using only the listed basis tensors (1-based); the others are 0.
pub fn fit_space_form_restricted(r: &CurvatureTensor, data: &PointFrameData, columns: &[usize]) -> Result<SpaceFormFit> {
    if columns.is_empty() || columns.iter().any(|c| !(1..=8).contains(c)) {
        return Err(Error::InvalidArgument(format!("invalid fit columns {columns:?}")));
    }
    let (r, d) = orthonormal_pair(r, data)?;
    let basis = basis_tensors(&d);
    let rows = r.tensor.as_slice().len();
    let a = DMatrix::from_fn(rows, columns.len(), |row, c| basis[columns[c] - 1].as_slice()[row]);
    let b = r.tensor.to_vector();
    let ls = least_squares(&a, &b)?;
    let mut coefficients = SpaceFormCoefficients::zero();
    for (c, &col) in columns.iter().enumerate() {
        coefficients.0[col - 1] = ls.solution[c];
    }
    let residual = (&a * &ls.solution - &b).amax();
    let null_space = ls
        .null_space
        .column_iter()
        .map(|v| {
            let mut full = [0.0; 8];
            for (c, &col) in columns.iter().enumerate() {
                full[col - 1] = v[c];
            }
            full
        })
        .collect::<Vec<_>>();
    Ok(SpaceFormFit {
        coefficients,
        residual,
        rank: ls.rank,
        nullspace_dim: null_space.len(),
        null_space,
        columns: columns.to_vec(),
    })
}

/// Coefficients of the dimension ≥ 5 rigid form with parameter `f₆`:
/// `f₁ = (f₆+1)/2, f₂ = (f₆−1)/2, f₃ = (3f₆+1)/2, f₄ = 1, f₅ = ½, f₇ = f₈ = 0`.
pub fn rigid_coefficients(f6: f64) -> SpaceFormCoefficients {
    SpaceFormCoefficients([(f6 + 1.0) / 2.0, (f6 - 1.0) / 2.0, (3.0 * f6 + 1.0) / 2.0, 1.0, 0.5, f6, 0.0, 0.0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub residuals: BTreeMap<&'static str, f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub violated: bool,
}

/// Checks the dimension ≥ 5 relations on a fit, against the extracted
/// `(κ, μ, ν)` and the φ-sectional curvature `F` of the same point.
pub fn check_dim5_rigidity(fit: &SpaceFormFit, kmn: &KmnResult, f_sectional: f64, tolerance: f64) -> RigidityReport {
    let c = &fit.coefficients;
    let f6 = c.f(6);
    let residuals = BTreeMap::from([
        ("f1", (c.f(1) - (f6 + 1.0) / 2.0).abs()),
        ("f2", (c.f(2) - (f6 - 1.0) / 2.0).abs()),
        ("f3", (c.f(3) - (3.0 * f6 + 1.0) / 2.0).abs()),
        ("f4", (c.f(4) - 1.0).abs()),
        ("f5", (c.f(5) - 0.5).abs()),
        ("f7", c.f(7).abs()),
        ("f8", c.f(8).abs()),
        ("kappa", (kmn.kappa + f6).abs()),
        ("mu", (kmn.mu - (1.0 - f6)).abs()),
        ("nu", kmn.nu.abs()),
        ("phi_sectional", (f_sectional - (2.0 * f6 - 1.0)).abs()),
        ("kappa_f1_f3", (kmn.kappa - (c.f(1) - c.f(3))).abs()),
        ("mu_f4_f6", (kmn.mu - (c.f(4) - c.f(6))).abs()),
        ("nu_f7_f8", (kmn.nu - (c.f(7) - c.f(8))).abs()),
    ]);
    let max_residual = residuals.values().copied().fold(0.0, f64::max);
    RigidityReport {
        residuals,
        max_residual,
        tolerance,
        violated: max_residual > tolerance,
    }
}

/// `F = g(R(e, φe)φe, e)` for the first basis vector of a model.
pub fn model_phi_sectional(model: &AlgebraicModel, r: &CurvatureTensor) -> f64 {
    let e = unit(model.dim(), 0);
    let pe = &model.data.phi * &e;
    model.data.inner(&r.apply(&e, &pe, &pe), &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointmodel::{standard_model, synthetic_curvature};

    #[test]
    fn least_squares_reports_null_space() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let ls = least_squares(&a, &b).unwrap();
        assert_eq!(ls.rank, 1);
        assert_eq!(ls.null_space.ncols(), 1);
        assert!((&a * &ls.solution - &b).amax() < 1e-12);
        // Minimal norm: orthogonal to the null space.
        assert!(ls.solution.dot(&ls.null_space.column(0)).abs() < 1e-12);
    }

    #[test]
    fn wide_system_null_space() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let ls = least_squares(&a, &DVector::from_element(1, 2.0)).unwrap();
        assert_eq!(ls.rank, 1);
        assert_eq!(ls.null_space.ncols(), 2);
        assert!((ls.solution[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn synthetic_kmn_matches_coefficient_differences() {
        let model = standard_model(2, 0.7).unwrap();
        let f = SpaceFormCoefficients([0.3, -0.2, 1.1, 0.4, 0.9, -0.6, 0.25, 0.5]);
        let r = synthetic_curvature(&model, &f);
        let k = extract_kmn_from(&r, &model.data).unwrap();
        let (kappa, mu, nu) = f.kmn();
        assert!((k.kappa - kappa).abs() < 1e-12);
        assert!((k.mu - mu).abs() < 1e-12);
        assert!((k.nu - nu).abs() < 1e-12);
        assert!(k.residual < 1e-12);
    }

    #[test]
    fn rigid_model_passes_and_f8_is_detected() {
        let f6: f64 = -0.36;
        let model = standard_model(2, (1.0 + f6).sqrt()).unwrap();
        let f = rigid_coefficients(f6);
        let r = synthetic_curvature(&model, &f);
        let fit = fit_space_form(&r, &model.data).unwrap();
        let k = extract_kmn_from(&r, &model.data).unwrap();
        let report = check_dim5_rigidity(&fit, &k, model_phi_sectional(&model, &r), 1e-10);
        assert!(!report.violated, "{report:?}");
        let bad = synthetic_curvature(&model, &f.with(8, 0.2));
        let fit = fit_space_form(&bad, &model.data).unwrap();
        let k = extract_kmn_from(&bad, &model.data).unwrap();
        let report = check_dim5_rigidity(&fit, &k, model_phi_sectional(&model, &bad), 1e-10);
        assert!(report.violated);
    }
}
