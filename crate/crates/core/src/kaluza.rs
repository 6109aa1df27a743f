//! Kaluza-Klein metric data `(μ₀, 𝕀₀, 𝒜₀)` on `𝔭 = 𝔡 × 𝔤`.

use serde::{Deserialize, Serialize};

use crate::algebra::{min_sym_eigenvalue, LinearMap, ProductAlgebra};
use crate::error::{check_dim, Error, Result};
use crate::{Matrix, Vector};

/// Left (body) representation carries `+`, right (space) carries `−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Left => 1.0,
            Orientation::Right => -1.0,
        }
    }
}

/// `μ₀: 𝔡→𝔡*`, `𝕀₀: 𝔤→𝔤*`, `𝒜₀: 𝔡→𝔤`, together with the inverses of the two metrics.
#[derive(Debug, Clone)]
pub struct KaluzaKlein {
    pub mu0: LinearMap,
    pub mu0_inv: LinearMap,
    pub i0: LinearMap,
    pub i0_inv: LinearMap,
    pub a0: LinearMap,
}

impl KaluzaKlein {
    /// Dense constructor; checks both metrics are symmetric positive definite.
    pub fn new(mu0: Matrix, i0: Matrix, a0: Matrix) -> Result<Self> {
        check_dim("mu0", mu0.nrows(), mu0.ncols())?;
        check_dim("I0", i0.nrows(), i0.ncols())?;
        check_dim("A0 rows", i0.nrows(), a0.nrows())?;
        check_dim("A0 cols", mu0.nrows(), a0.ncols())?;
        for (what, m) in [("mu0", &mu0), ("I0", &i0)] {
            let lm = LinearMap::Dense(m.clone());
            let min = min_sym_eigenvalue(m);
            if lm.symmetry_residual() > 1e-12 || min <= 0.0 {
                return Err(Error::NotPositiveDefinite {
                    what,
                    min_eigenvalue: min,
                });
            }
        }
        let mu0_inv = mu0.clone().try_inverse().ok_or(Error::NotInvertible("mu0"))?;
        let i0_inv = i0.clone().try_inverse().ok_or(Error::NotInvertible("I0"))?;
        Ok(Self {
            mu0: mu0.into(),
            mu0_inv: mu0_inv.into(),
            i0: i0.into(),
            i0_inv: i0_inv.into(),
            a0: a0.into(),
        })
    }

    /// Matrix-free constructor; the caller vouches for the inverses.
    pub fn from_maps(
        mu0: LinearMap,
        mu0_inv: LinearMap,
        i0: LinearMap,
        i0_inv: LinearMap,
        a0: LinearMap,
    ) -> Self {
        Self {
            mu0,
            mu0_inv,
            i0,
            i0_inv,
            a0,
        }
    }

    pub fn dim_d(&self) -> usize {
        self.mu0.nrows()
    }

    pub fn dim_g(&self) -> usize {
        self.i0.nrows()
    }

    /// `(ν, α) = μ₀ᴾ(u, X)`.
    pub fn metric_apply(&self, u: &Vector, x: &Vector) -> Result<(Vector, Vector)> {
        check_dim("metric_apply: u", self.dim_d(), u.len())?;
        check_dim("metric_apply: X", self.dim_g(), x.len())?;
        let alpha = self.i0.apply(&(self.a0.apply(u) + x));
        let nu = self.mu0.apply(u) + self.a0.apply_t(&alpha);
        Ok((nu, alpha))
    }

    /// `u = μ₀⁻¹(ν − 𝒜₀*α)`, `X = 𝕀₀⁻¹α − 𝒜₀u`.
    pub fn metric_solve(&self, nu: &Vector, alpha: &Vector) -> Result<(Vector, Vector)> {
        check_dim("metric_solve: nu", self.dim_d(), nu.len())?;
        check_dim("metric_solve: alpha", self.dim_g(), alpha.len())?;
        Ok(self.solve_unchecked(nu, alpha))
    }

    pub(crate) fn solve_unchecked(&self, nu: &Vector, alpha: &Vector) -> (Vector, Vector) {
        let u = self.mu0_inv.apply(&(nu - self.a0.apply_t(alpha)));
        let x = self.i0_inv.apply(alpha) - self.a0.apply(&u);
        (u, x)
    }

    /// `h₀ = ½⟨(ν,α), (μ₀ᴾ)⁻¹(ν,α)⟩`.
    pub fn h0_eval(&self, nu: &Vector, alpha: &Vector) -> Result<f64> {
        let (u, x) = self.metric_solve(nu, alpha)?;
        Ok(0.5 * (nu.dot(&u) + alpha.dot(&x)))
    }

    /// `[[μ₀+𝒜₀*𝕀₀𝒜₀, 𝒜₀*𝕀₀], [𝕀₀𝒜₀, 𝕀₀]]`.
    pub fn block_metric(&self) -> Matrix {
        let (mu0, i0, a0) = (self.mu0.to_dense(), self.i0.to_dense(), self.a0.to_dense());
        let (nd, ng) = (self.dim_d(), self.dim_g());
        let mut m = Matrix::zeros(nd + ng, nd + ng);
        let ia = &i0 * &a0;
        m.view_mut((0, 0), (nd, nd))
            .copy_from(&(&mu0 + a0.transpose() * &ia));
        m.view_mut((0, nd), (nd, ng))
            .copy_from(&(a0.transpose() * &i0));
        m.view_mut((nd, 0), (ng, nd)).copy_from(&ia);
        m.view_mut((nd, nd), (ng, ng)).copy_from(&i0);
        m
    }

    /// `[[μ₀⁻¹, −μ₀⁻¹𝒜₀*], [−𝒜₀μ₀⁻¹, 𝕀₀⁻¹+𝒜₀μ₀⁻¹𝒜₀*]]`.
    pub fn block_metric_inverse(&self) -> Matrix {
        let (mi, ii, a0) = (
            self.mu0_inv.to_dense(),
            self.i0_inv.to_dense(),
            self.a0.to_dense(),
        );
        let (nd, ng) = (self.dim_d(), self.dim_g());
        let mut m = Matrix::zeros(nd + ng, nd + ng);
        let mat = &mi * a0.transpose();
        m.view_mut((0, 0), (nd, nd)).copy_from(&mi);
        m.view_mut((0, nd), (nd, ng)).copy_from(&(-&mat));
        m.view_mut((nd, 0), (ng, nd)).copy_from(&(-mat.transpose()));
        m.view_mut((nd, nd), (ng, ng))
            .copy_from(&(&ii + &a0 * &mat));
        m
    }
}

/// `ν̇ = ±ad(δh₀/δν)*ν`, `α̇ = ±ad(δh₀/δα)*α`.
pub fn free_lp_field(
    kk: &KaluzaKlein,
    algebra: &ProductAlgebra,
    orientation: Orientation,
    nu: &Vector,
    alpha: &Vector,
) -> Result<(Vector, Vector)> {
    let (u, x) = kk.metric_solve(nu, alpha)?;
    let sg = orientation.sign();
    Ok((
        algebra.d.coad(&u, nu) * sg,
        algebra.g.coad(&x, alpha) * sg,
    ))
}
