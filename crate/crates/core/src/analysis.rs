//! Energy-Casimir functions `g_C + K_ρ`, their variations and Lyapunov values.

use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::concat;
use crate::closed_loop::ControlledSystem;
use crate::error::{check_dim, Error, Result};
use crate::satellite::SatelliteParams;
use crate::{Matrix, Vector};

/// Steps for the Richardson-extrapolated finite-difference Hessian.
pub const FD_STEP: f64 = 1e-4;
pub const CLASSIFY_TOL: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `K_ρ(ν) = ρ(K(ν))` for a registered Casimir `K`.
#[derive(Clone)]
pub struct CasimirProfile {
    pub base: String,
    pub rho: ScalarFn,
    pub d_rho: ScalarFn,
    pub dd_rho: ScalarFn,
}

impl fmt::Debug for CasimirProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CasimirProfile({})", self.base)
    }
}

impl CasimirProfile {
    pub fn new(base: &str, rho: ScalarFn, d_rho: ScalarFn, dd_rho: ScalarFn) -> Self {
        Self {
            base: base.to_string(),
            rho,
            d_rho,
            dd_rho,
        }
    }

    /// `ρ(x) = slope·(x − level) + ½·curvature·(x − level)²`.
    pub fn quadratic(base: &str, level: f64, slope: f64, curvature: f64) -> Self {
        Self::new(
            base,
            Arc::new(move |x| slope * (x - level) + 0.5 * curvature * (x - level).powi(2)),
            Arc::new(move |x| slope + curvature * (x - level)),
            Arc::new(move |_| curvature),
        )
    }

    /// Satellite default: `ρ(x) = −λ₂⁻¹(x − ½) + ½ρ''(x − ½)²` on `K = |ν|²/2`.
    pub fn satellite(lambda2: f64, rho2: f64) -> Self {
        Self::quadratic("norm2", 0.5, -1.0 / lambda2, rho2)
    }

    pub fn eval(&self, sys: &ControlledSystem, nu: &Vector) -> Result<f64> {
        let k = sys
            .algebra
            .d
            .casimir(&self.base, nu)
            .ok_or_else(|| Error::UnknownCasimir(self.base.clone()))?;
        Ok((self.rho)(k))
    }

    pub fn gradient(&self, sys: &ControlledSystem, nu: &Vector) -> Result<Vector> {
        let d = sys.algebra.d.as_ref();
        let k = d
            .casimir(&self.base, nu)
            .ok_or_else(|| Error::UnknownCasimir(self.base.clone()))?;
        let g = d
            .casimir_gradient(&self.base, nu)
            .ok_or_else(|| Error::UnknownCasimir(self.base.clone()))?;
        Ok(g * (self.d_rho)(k))
    }
}

/// `g_C(ν,β) + K_ρ(ν)` on the flat `z = (ν, β)`.
pub fn energy_casimir(sys: &ControlledSystem, profile: &CasimirProfile, z: &Vector) -> Result<f64> {
    let nd = sys.dim_d();
    check_dim("z", nd + sys.dim_g(), z.len())?;
    let nu = z.rows(0, nd).into_owned();
    let beta = z.rows(nd, sys.dim_g()).into_owned();
    Ok(sys.g_c_eval(&nu, &beta) + profile.eval(sys, &nu)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstVariation {
    pub gradient: Vector,
    pub norm: f64,
    /// The `ρ'` at the equilibrium level that cancels the `ν`-gradient, when
    /// `∇K` is parallel to `μ_C⁻¹ν_e`.
    pub required_slope: Option<f64>,
}

pub fn first_variation(sys: &ControlledSystem, profile: &CasimirProfile, z_e: &Vector) -> Result<FirstVariation> {
    let nd = sys.dim_d();
    check_dim("z_e", nd + sys.dim_g(), z_e.len())?;
    let nu = z_e.rows(0, nd).into_owned();
    let beta = z_e.rows(nd, sys.dim_g()).into_owned();
    let (gv, gb) = sys.g_c_grad(&nu, &beta);
    let grad_k = sys
        .algebra
        .d
        .casimir_gradient(&profile.base, &nu)
        .ok_or_else(|| Error::UnknownCasimir(profile.base.clone()))?;
    let gradient = concat(&(&gv + profile.gradient(sys, &nu)?), &gb);
    let kk = grad_k.norm_squared();
    let required_slope = if kk > 0.0 {
        let slope = -gv.dot(&grad_k) / kk;
        let resid = (&gv + &grad_k * slope).norm();
        (resid <= 1e-10 * gv.norm().max(1.0)).then_some(slope)
    } else {
        None
    };
    Ok(FirstVariation {
        norm: gradient.norm(),
        gradient,
        required_slope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub gradient_norm: f64,
    pub hessian: Matrix,
    pub eigenvalues: Vector,
    pub classification: Definiteness,
    /// Signed distance to losing definiteness: `λ_min` for positive definite,
    /// `−λ_max` for negative definite, `λ_min` otherwise.
    pub margin: f64,
}

impl VariationReport {
    pub fn from_hessian(hessian: Matrix, gradient_norm: f64, tol: f64) -> Self {
        let sym = (&hessian + hessian.transpose()) * 0.5;
        let eigenvalues = SymmetricEigen::new(sym.clone()).eigenvalues;
        let (lo, hi) = (eigenvalues.min(), eigenvalues.max());
        let classification = classify(lo, hi, tol);
        let margin = match classification {
            Definiteness::NegativeDefinite => -hi,
            _ => lo,
        };
        Self {
            gradient_norm,
            hessian: sym,
            eigenvalues,
            classification,
            margin,
        }
    }
}

fn classify(lo: f64, hi: f64, tol: f64) -> Definiteness {
    if lo > tol {
        Definiteness::PositiveDefinite
    } else if hi < -tol {
        Definiteness::NegativeDefinite
    } else if lo < -tol && hi > tol {
        Definiteness::Indefinite
    } else {
        Definiteness::Degenerate
    }
}

/// Central-difference Hessian of `f` at `x` along the columns of `basis`.
pub fn fd_hessian(f: &(impl Fn(&Vector) -> f64 + Sync), x: &Vector, basis: &Matrix, h: f64) -> Matrix {
    let k = basis.ncols();
    let cols: Vec<Vector> = (0..k).map(|j| basis.column(j).into_owned()).collect();
    let entries: Vec<(usize, usize, f64)> = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&cols[i] * h, &cols[j] * h);
            let v = f(&(x + &a + &b)) - f(&(x + &a - &b)) - f(&(x - &a + &b)) + f(&(x - &a - &b));
            (i, j, v / (4.0 * h * h))
        })
        .collect();
    let mut m = Matrix::zeros(k, k);
    for (i, j, v) in entries {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

/// Richardson combination of the Hessians at `h` and `h/2`.
pub fn fd_hessian_richardson(f: &(impl Fn(&Vector) -> f64 + Sync), x: &Vector, basis: &Matrix, h: f64) -> Matrix {
    let coarse = fd_hessian(f, x, basis, h);
    let fine = fd_hessian(f, x, basis, h / 2.0);
    (fine * 4.0 - coarse) / 3.0
}

/// Second variation of `g_C + K_ρ` at `z_e` over `basis` (full coordinate basis when `None`).
///
/// Finite differences carry roundoff of order `1e-8` relative, so the
/// classification tolerance is scaled to the Hessian magnitude.
pub fn second_variation(
    sys: &ControlledSystem,
    profile: &CasimirProfile,
    z_e: &Vector,
    basis: Option<&Matrix>,
) -> Result<VariationReport> {
    let n = sys.dim_d() + sys.dim_g();
    check_dim("z_e", n, z_e.len())?;
    let identity = Matrix::identity(n, n);
    let basis = basis.unwrap_or(&identity);
    check_dim("basis rows", n, basis.nrows())?;
    profile.eval(sys, &z_e.rows(0, sys.dim_d()).into_owned())?;
    let f = |z: &Vector| energy_casimir(sys, profile, z).expect("dimensions checked above");
    let h = fd_hessian_richardson(&f, z_e, basis, FD_STEP);
    let grad = first_variation(sys, profile, z_e)?;
    let tol = CLASSIFY_TOL.max(1e-6 * h.amax());
    Ok(VariationReport::from_hessian(h, grad.norm, tol))
}

/// `k > I₃(I₃ − λ₂)/(i₃λ₂)`.
pub fn gain_threshold_satellite(params: &SatelliteParams) -> f64 {
    let (i3c, i3r, l2) = (params.carrier_i3, params.rotor_i3, params.lambda2);
    i3c * (i3c - l2) / (i3r * l2)
}

/// `s·(g_C + K_ρ)(z) − s·(g_C + K_ρ)(z_e)`.
pub fn lyapunov_eval(sys: &ControlledSystem, profile: &CasimirProfile, z: &Vector, z_e: &Vector) -> Result<f64> {
    Ok(sys.s() * (energy_casimir(sys, profile, z)? - energy_casimir(sys, profile, z_e)?))
}
