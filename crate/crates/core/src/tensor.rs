//! Dense pointwise tensors and change-of-basis helpers.

use nalgebra::{DMatrix, DVector};

/// A (1,3) tensor at a point, stored as `T(E_i, E_j) E_k = Σ_l t[i][j][k][l] E_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    /// Builds the tensor from its action on basis triples.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> DVector<f64>) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = f(i, j, k);
                    for l in 0..dim {
                        t.set(i, j, k, l, v[l]);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.index(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let idx = self.index(i, j, k, l);
        self.data[idx] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `T(X, Y) Z` for vectors given in the same basis.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let w = xy * z[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        out[l] += w * self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// `T(E_i, E_j) E_k` as a vector.
    pub fn slot(&self, i: usize, j: usize, k: usize) -> DVector<f64> {
        let start = self.index(i, j, k, 0);
        DVector::from_column_slice(&self.data[start..start + self.dim])
    }

    /// Lowered components `T_ijkl = g(T(E_i, E_j) E_k, E_l)`.
    pub fn lowered(&self, g: &DMatrix<f64>) -> Tensor4 {
        let d = self.dim;
        let mut out = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.get(i, j, k, m) * g[(m, l)];
                        }
                        out.set(i, j, k, l, s);
                    }
                }
            }
        }
        out
    }

    /// Components in the basis `F_a = Σ_i p[(i, a)] E_i`; `p_inv` is the inverse of `p`.
    pub fn change_basis(&self, p: &DMatrix<f64>, p_inv: &DMatrix<f64>) -> Tensor4 {
        let d = self.dim;
        // Contract one slot at a time to stay at O(d^5).
        let mut a = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += p_inv[(l, m)] * self.get(i, j, k, m);
                        }
                        a.set(i, j, k, l, s);
                    }
                }
            }
        }
        let mut b = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for c in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for k in 0..d {
                            s += p[(k, c)] * a.get(i, j, k, l);
                        }
                        b.set(i, j, c, l, s);
                    }
                }
            }
        }
        let mut c2 = Tensor4::zeros(d);
        for i in 0..d {
            for bb in 0..d {
                for c in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for j in 0..d {
                            s += p[(j, bb)] * b.get(i, j, c, l);
                        }
                        c2.set(i, bb, c, l, s);
                    }
                }
            }
        }
        let mut out = Tensor4::zeros(d);
        for aa in 0..d {
            for bb in 0..d {
                for c in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for i in 0..d {
                            s += p[(i, aa)] * c2.get(i, bb, c, l);
                        }
                        out.set(aa, bb, c, l, s);
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Tensor4) {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    pub fn scaled(&self, a: f64) -> Tensor4 {
        Tensor4 {
            dim: self.dim,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Change of basis to a g-orthonormal frame: `p` has orthonormal frame
/// vectors as columns (so `pᵀ g p = I`), `p_inv` is its inverse.
#[derive(Debug, Clone)]
pub struct FrameChange {
    pub p: DMatrix<f64>,
    pub p_inv: DMatrix<f64>,
}

impl FrameChange {
    pub fn identity(dim: usize) -> Self {
        Self {
            p: DMatrix::identity(dim, dim),
            p_inv: DMatrix::identity(dim, dim),
        }
    }

    /// Orthonormalizes via the Cholesky factor `g = L Lᵀ`, `p = L⁻ᵀ`.
    pub fn orthonormalizing(g: &DMatrix<f64>) -> Option<Self> {
        let chol = g.clone().cholesky()?;
        let l = chol.l();
        let p_inv = l.transpose();
        let p = p_inv.clone().try_inverse()?;
        Some(Self { p, p_inv })
    }

    /// Arbitrary invertible change of basis.
    pub fn from_matrix(p: DMatrix<f64>) -> Option<Self> {
        let p_inv = p.clone().try_inverse()?;
        Some(Self { p, p_inv })
    }

    pub fn vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.p_inv * v
    }

    pub fn covector(&self, w: &DVector<f64>) -> DVector<f64> {
        self.p.transpose() * w
    }

    /// (1,1) tensor `A` with `A E_j = Σ_i a[(i, j)] E_i`.
    pub fn endomorphism(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.p_inv * a * &self.p
    }

    /// (0,2) tensor with components `b[(i, j)] = B(E_i, E_j)`.
    pub fn bilinear(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.p.transpose() * b * &self.p
    }

    pub fn tensor4(&self, t: &Tensor4) -> Tensor4 {
        t.change_basis(&self.p, &self.p_inv)
    }

    /// Composition: first `self`, then `next` (expressed in the new basis).
    pub fn then(&self, next: &FrameChange) -> FrameChange {
        FrameChange {
            p: &self.p * &next.p,
            p_inv: &next.p_inv * &self.p_inv,
        }
    }
}
