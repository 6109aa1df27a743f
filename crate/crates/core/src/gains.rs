//! Control gains, the matching conditions and their Euler-Poincaré local form.
//!
//! Everything here is finite dimensional and works on dense matrices.

use std::fmt;

use serde::Serialize;

use crate::algebra::{min_sym_eigenvalue, LinearMap};
use crate::error::{check_dim, Error, Result};
use crate::kaluza::{KaluzaKlein, Orientation};
use crate::Matrix;

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-12;
const G_BULLET_TOL: f64 = 1e-10;

/// `C: 𝔡*→𝔤*`, invertible `G: 𝔤*→𝔤*`, the dissipation sign `s` and the orientation.
#[derive(Debug, Clone)]
pub struct GainSet {
    pub c: LinearMap,
    pub g: LinearMap,
    pub g_inv: LinearMap,
    pub s: f64,
    pub orientation: Orientation,
}

impl GainSet {
    pub fn new(c: Matrix, g: Matrix, s: f64, orientation: Orientation) -> Result<Self> {
        check_dim("G", g.nrows(), g.ncols())?;
        check_dim("C rows", g.nrows(), c.nrows())?;
        if s != 1.0 && s != -1.0 {
            return Err(Error::InvalidConfig(format!("s must be +1 or -1, got {s}")));
        }
        let g_inv = g.clone().try_inverse().ok_or(Error::NotInvertible("G"))?;
        Ok(Self {
            c: c.into(),
            g: g.into(),
            g_inv: g_inv.into(),
            s,
            orientation,
        })
    }

    /// `C` with `G = 1`.
    pub fn with_unit_g(c: Matrix, s: f64, orientation: Orientation) -> Result<Self> {
        let n = c.nrows();
        Self::new(c, Matrix::identity(n, n), s, orientation)
    }

    pub fn from_maps(
        c: LinearMap,
        g: LinearMap,
        g_inv: LinearMap,
        s: f64,
        orientation: Orientation,
    ) -> Self {
        Self {
            c,
            g,
            g_inv,
            s,
            orientation,
        }
    }

    pub fn sign(&self) -> f64 {
        self.orientation.sign()
    }
}

/// `(μ_C, 𝕀_C, 𝒜_C)`.
#[derive(Debug, Clone, Serialize)]
pub struct MatchedStructure {
    pub mu_c: Matrix,
    pub i_c: Matrix,
    pub a_c: Matrix,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatchFailure {
    #[error("1 + A0*C is singular")]
    NotInvertible,
    #[error("mu_C = (1 + A0*C)^-1 mu0 is not an inner product (symmetry residual {symmetry:e}, min eigenvalue {min_eigenvalue:e})")]
    NotAdmissible { symmetry: f64, min_eigenvalue: f64 },
    #[error("G-bullet violated: A0* G != mu0 mu_C^-1 A_C* (residual {residual:e})")]
    GBullet { residual: f64 },
    #[error("I_C-bullet: G - C A_C* is singular")]
    IcSingular,
    #[error("I_C-bullet: I_C = (G - C A_C*)^-1 I0 is not symmetric positive definite (symmetry residual {symmetry:e}, min eigenvalue {min_eigenvalue:e})")]
    IcNotPositiveDefinite { symmetry: f64, min_eigenvalue: f64 },
}

/// `σᵃᵇ` is stored with upper indices, i.e. as a map `𝔤*→𝔤`.
#[derive(Debug, Clone, Serialize)]
pub struct EpData {
    pub tau: Matrix,
    pub sigma_up: Matrix,
    pub rho: Matrix,
}

pub fn op_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn sym_residual(m: &Matrix) -> f64 {
    (m - m.transpose()).amax() / m.amax().max(1.0)
}

/// `μ_C = (1 + 𝒜₀*C)⁻¹μ₀` and whether it is an inner product.
pub fn mu_c_from_gain(kk: &KaluzaKlein, c: &LinearMap) -> Result<(Matrix, bool)> {
    check_dim("C rows", kk.dim_g(), c.nrows())?;
    check_dim("C cols", kk.dim_d(), c.ncols())?;
    let nd = kk.dim_d();
    let m = Matrix::identity(nd, nd) + kk.a0.to_dense().transpose() * c.to_dense();
    let lu = m.lu();
    if lu.determinant().abs() < 1e-14 {
        return Err(Error::NotInvertible("1 + A0*C"));
    }
    let mu_c = lu
        .solve(&kk.mu0.to_dense())
        .ok_or(Error::NotInvertible("1 + A0*C"))?;
    let admissible = sym_residual(&mu_c) < SYMMETRY_TOL && min_sym_eigenvalue(&mu_c) > EIGEN_TOL;
    Ok((mu_c, admissible))
}

pub fn match_structure(
    kk: &KaluzaKlein,
    gains: &GainSet,
) -> std::result::Result<MatchedStructure, MatchFailure> {
    let (mu_c, admissible) = mu_c_from_gain(kk, &gains.c).map_err(|_| MatchFailure::NotInvertible)?;
    if !admissible {
        return Err(MatchFailure::NotAdmissible {
            symmetry: sym_residual(&mu_c),
            min_eigenvalue: min_sym_eigenvalue(&mu_c),
        });
    }
    let (mu0, i0_inv, a0) = (kk.mu0.to_dense(), kk.i0_inv.to_dense(), kk.a0.to_dense());
    let (c, g) = (gains.c.to_dense(), gains.g.to_dense());
    let a_c = &a0 + &i0_inv * &c * &mu_c;
    let mu_c_inv = mu_c
        .clone()
        .try_inverse()
        .ok_or(MatchFailure::NotInvertible)?;
    let residual = op_norm(&(a0.transpose() * &g - &mu0 * mu_c_inv * a_c.transpose()));
    if residual >= G_BULLET_TOL {
        return Err(MatchFailure::GBullet { residual });
    }
    let i_c = (&g - &c * a_c.transpose())
        .try_inverse()
        .ok_or(MatchFailure::IcSingular)?
        * kk.i0.to_dense();
    let symmetry = sym_residual(&i_c);
    let min_eigenvalue = min_sym_eigenvalue(&i_c);
    if symmetry >= SYMMETRY_TOL || min_eigenvalue <= EIGEN_TOL {
        return Err(MatchFailure::IcNotPositiveDefinite {
            symmetry,
            min_eigenvalue,
        });
    }
    Ok(MatchedStructure { mu_c, i_c, a_c })
}

/// `C = 𝕀₀(𝒜_C−𝒜₀)μ_C⁻¹`, `G = 𝕀₀𝕀_C⁻¹ + C𝒜_C*`.
pub fn gain_from_structure(
    kk: &KaluzaKlein,
    ms: &MatchedStructure,
    s: f64,
    orientation: Orientation,
) -> Result<GainSet> {
    let i0 = kk.i0.to_dense();
    let mu_c_inv = ms
        .mu_c
        .clone()
        .try_inverse()
        .ok_or(Error::NotInvertible("mu_C"))?;
    let i_c_inv = ms
        .i_c
        .clone()
        .try_inverse()
        .ok_or(Error::NotInvertible("I_C"))?;
    let c = &i0 * (&ms.a_c - kk.a0.to_dense()) * mu_c_inv;
    let g = &i0 * i_c_inv + &c * ms.a_c.transpose();
    GainSet::new(c, g, s, orientation)
}

/// Operator-norm residuals of `𝕀_C𝒜_C = 𝕀₀𝒜₀` and `μ_C+𝒜_C*𝕀_C𝒜_C = μ₀+𝒜₀*𝕀₀𝒜₀`.
pub fn check_lp_conditions(kk: &KaluzaKlein, ms: &MatchedStructure) -> (f64, f64) {
    let (mu0, i0, a0) = (kk.mu0.to_dense(), kk.i0.to_dense(), kk.a0.to_dense());
    let lp1 = &ms.i_c * &ms.a_c - &i0 * &a0;
    let lp2 = &ms.mu_c + ms.a_c.transpose() * &ms.i_c * &ms.a_c - mu0 - a0.transpose() * &i0 * &a0;
    (op_norm(&lp1), op_norm(&lp2))
}

/// `τ = 𝒜_C−𝒜₀`, `ρ = 𝕀_C`, `σᵃᵇ = (𝕀₀)⁻¹ − ρ⁻¹`.
pub fn ep_from_lp(kk: &KaluzaKlein, ms: &MatchedStructure) -> Result<EpData> {
    let rho_inv = ms
        .i_c
        .clone()
        .try_inverse()
        .ok_or(Error::NotInvertible("rho"))?;
    Ok(EpData {
        tau: &ms.a_c - kk.a0.to_dense(),
        sigma_up: kk.i0_inv.to_dense() - rho_inv,
        rho: ms.i_c.clone(),
    })
}

/// `𝕀_C = ρ`, `𝒜_C = 𝒜₀+τ`, `μ_C = μ₀ + τ*στ` with `σ = (σᵃᵇ)⁻¹`.
///
/// With `τ = 0` the `σ` term is absent, so a singular `σᵃᵇ` is accepted there.
pub fn lp_from_ep(kk: &KaluzaKlein, ep: &EpData) -> Result<MatchedStructure> {
    check_dim("tau rows", kk.dim_g(), ep.tau.nrows())?;
    check_dim("tau cols", kk.dim_d(), ep.tau.ncols())?;
    if ep.rho.clone().try_inverse().is_none() {
        return Err(Error::NotInvertible("rho"));
    }
    let mut mu_c = kk.mu0.to_dense();
    if ep.tau.amax() > 0.0 {
        let sigma = ep
            .sigma_up
            .clone()
            .try_inverse()
            .ok_or(Error::NotInvertible("sigma"))?;
        mu_c += ep.tau.transpose() * sigma * &ep.tau;
    }
    Ok(MatchedStructure {
        mu_c,
        i_c: ep.rho.clone(),
        a_c: kk.a0.to_dense() + &ep.tau,
    })
}

/// Residuals of `τ = −σᵃᵇ𝕀₀𝒜₀` and `σᵃᵇ + ρ⁻¹ = 𝕀₀⁻¹`.
pub fn ep_residuals(kk: &KaluzaKlein, ep: &EpData) -> Result<(f64, f64)> {
    let rho_inv = ep
        .rho
        .clone()
        .try_inverse()
        .ok_or(Error::NotInvertible("rho"))?;
    let ia = kk.i0.to_dense() * kk.a0.to_dense();
    let ep1 = &ep.tau + &ep.sigma_up * ia;
    let ep2 = &ep.sigma_up + rho_inv - kk.i0_inv.to_dense();
    Ok((op_norm(&ep1), op_norm(&ep2)))
}

impl fmt::Display for MatchedStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu_C = {}I_C = {}A_C = {}", self.mu_c, self.i_c, self.a_c)
    }
}
