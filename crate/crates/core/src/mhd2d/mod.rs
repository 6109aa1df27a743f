//! Galerkin-truncated 2D incompressible MHD in the channel `[0, Lπ] × [0, Wπ]`
//! with a vertical magnetic field, stabilised about the shear flow `u_e = (sin y, 0)`.
//!
//! The control shapes the kinetic metric through `Δ_γ = ∂x² + (1−γ)∂y²`, which
//! makes the channel look shorter. Both dual components are stored as scalar
//! curls (vorticity `ω` and magnetic `b`) in the basis of [`basis`].

pub mod basis;
pub mod fluid;
pub mod oracle;
pub mod scenario;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{LinearMap, ProductAlgebra};
use crate::analysis::{self, CasimirProfile};
use crate::closed_loop::{ControlledSystem, Mode};
use crate::error::{check_dim, Error, Result};
use crate::gains::GainSet;
use crate::kaluza::{KaluzaKlein, Orientation};
use crate::{Matrix, Vector};

pub use basis::ChannelBasis;
pub use fluid::{FluidAlgebra, GalerkinKind, GalerkinOp};
pub use oracle::GalerkinOracle;
pub use scenario::{scenario_shear, ShearRun};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// `L`
    pub length: f64,
    /// `W`, a positive integer so that `cos y` fits the strip
    pub width: f64,
    pub gamma: f64,
    /// charge constant `e`
    pub charge: f64,
    pub nx: usize,
    pub ny: usize,
    /// Evaluate products on the padded `2N` grid, which is alias-free for
    /// quadratic terms. Without it the grid has `N` points per direction.
    pub dealias: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            length: 2.0,
            width: 2.0,
            gamma: 0.8,
            charge: 1.0,
            nx: 24,
            ny: 24,
            dealias: true,
        }
    }
}

impl ChannelConfig {
    pub fn with_modes(self, nx: usize, ny: usize) -> Self {
        Self { nx, ny, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidConfig(format!("L must be positive, got {}", self.length)));
        }
        if !(self.width >= 1.0 && self.width.fract() == 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "W must be a positive integer, got {}",
                self.width
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if !(self.charge > 0.0 && self.charge.is_finite()) {
            return Err(Error::InvalidConfig(format!("e must be positive, got {}", self.charge)));
        }
        if self.nx < 4 || self.ny < 4 {
            return Err(Error::InvalidConfig(format!(
                "need at least 4 modes per direction, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// Sine-sine coefficients `Nx × Ny` of a field vanishing on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub coeffs: Matrix,
}

impl SpectralField {
    pub fn zeros(cfg: &ChannelConfig) -> Self {
        Self {
            coeffs: Matrix::zeros(cfg.nx, cfg.ny),
        }
    }

    /// Single mode `(m, n)`, 1-based.
    pub fn mode(cfg: &ChannelConfig, m: usize, n: usize, amplitude: f64) -> Self {
        let mut f = Self::zeros(cfg);
        f.coeffs[(m - 1, n - 1)] = amplitude;
        f
    }

    /// Coefficient vector with a zero background amplitude.
    pub fn to_vector(&self) -> Vector {
        let (nx, ny) = self.coeffs.shape();
        let mut v = Vector::zeros(nx * ny + 1);
        for m in 0..nx {
            for n in 0..ny {
                v[m * ny + n] = self.coeffs[(m, n)];
            }
        }
        v
    }

    fn check(&self, cfg: &ChannelConfig) -> Result<()> {
        check_dim("field rows", cfg.nx, self.coeffs.nrows())?;
        check_dim("field cols", cfg.ny, self.coeffs.ncols())
    }
}

fn delta_multiplier(cfg: &ChannelConfig, m: usize, n: usize) -> f64 {
    -((m as f64 / cfg.length).powi(2) + (1.0 - cfg.gamma) * (n as f64 / cfg.width).powi(2))
}

/// `Δ_γ f`, diagonal in the sine basis.
pub fn delta_gamma_apply(cfg: &ChannelConfig, f: &SpectralField) -> Result<SpectralField> {
    f.check(cfg)?;
    Ok(SpectralField {
        coeffs: Matrix::from_fn(cfg.nx, cfg.ny, |i, j| {
            f.coeffs[(i, j)] * delta_multiplier(cfg, i + 1, j + 1)
        }),
    })
}

pub fn delta_gamma_solve(cfg: &ChannelConfig, f: &SpectralField) -> Result<SpectralField> {
    f.check(cfg)?;
    Ok(SpectralField {
        coeffs: Matrix::from_fn(cfg.nx, cfg.ny, |i, j| {
            f.coeffs[(i, j)] / delta_multiplier(cfg, i + 1, j + 1)
        }),
    })
}

/// `λ₁(γ) = 1/L² + (1−γ)/W²`, the smallest eigenvalue of `−Δ_γ` with Dirichlet data.
pub fn lambda1_gamma(cfg: &ChannelConfig) -> f64 {
    let lam = 1.0 / cfg.length.powi(2) + (1.0 - cfg.gamma) / cfg.width.powi(2);
    debug_assert!((lam + delta_multiplier(cfg, 1, 1)).abs() <= 1e-15 * lam);
    lam
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityMargin {
    /// `1/((1−γ)L²) + 1/W² − 1`; positive gives a Lyapunov certificate
    pub controlled: f64,
    /// `λ₁(0) − 1`
    pub uncontrolled: f64,
}

pub fn stability_margin(cfg: &ChannelConfig) -> StabilityMargin {
    let (l2, w2) = (cfg.length.powi(2), cfg.width.powi(2));
    StabilityMargin {
        controlled: 1.0 / ((1.0 - cfg.gamma) * l2) + 1.0 / w2 - 1.0,
        uncontrolled: 1.0 / l2 + 1.0 / w2 - 1.0,
    }
}

/// Lower-bound coefficient `½(1/(1−γ) − 1/λ₁(γ)) = ½λ₁(γ)⁻¹·margin` of `L_C`
/// against `∫(δω)²` for perturbations Gram-orthogonal to the background mode.
pub fn l_c_bound_coefficient(cfg: &ChannelConfig) -> f64 {
    0.5 * stability_margin(cfg).controlled / lambda1_gamma(cfg)
}

/// The shear flow `ψ_e = cos y`, `u_e = (sin y, 0)`, `ω_e = −cos y`, with the
/// controlled-vorticity representative `−(1−γ)cos y` and `A_e = γ/e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearEquilibrium {
    pub gamma: f64,
    pub charge: f64,
}

impl ShearEquilibrium {
    pub fn new(cfg: &ChannelConfig) -> Self {
        Self {
            gamma: cfg.gamma,
            charge: cfg.charge,
        }
    }

    pub fn psi(&self, _x: f64, y: f64) -> f64 {
        y.cos()
    }

    pub fn velocity(&self, _x: f64, y: f64) -> (f64, f64) {
        (y.sin(), 0.0)
    }

    pub fn vorticity(&self, _x: f64, y: f64) -> f64 {
        -y.cos()
    }

    pub fn a_e(&self) -> f64 {
        self.gamma / self.charge
    }

    /// Coefficients of the momentum `ν_e` (background slot only).
    pub fn nu(&self, basis: &ChannelBasis) -> Vector {
        let mut v = Vector::zeros(basis.dim());
        v[basis.bg_index()] = -(1.0 - self.gamma);
        v
    }

    /// Coefficients of `ψ_e`.
    pub fn psi_coeffs(&self, basis: &ChannelBasis) -> Vector {
        let mut v = Vector::zeros(basis.dim());
        v[basis.bg_index()] = 1.0;
        v
    }
}

/// `P J(ψ, ω)`: transport `u·∇ω` by `u = (−ψ_y, ψ_x)`, in vorticity coefficients.
pub fn advect(basis: &ChannelBasis, psi: &Vector, omega: &Vector) -> Vector {
    basis.mass_solve(&basis.jacobian_moments(psi, omega))
}

/// The channel model: basis, algebra and the closed-loop system.
#[derive(Debug, Clone)]
pub struct MhdModel {
    pub cfg: ChannelConfig,
    pub basis: Arc<ChannelBasis>,
    pub system: ControlledSystem,
}

impl MhdModel {
    pub fn equilibrium(&self) -> ShearEquilibrium {
        ShearEquilibrium::new(&self.cfg)
    }

    /// Flat `z_e = (ν_e, 0)`.
    pub fn z_e(&self) -> Vector {
        let nu = self.equilibrium().nu(&self.basis);
        crate::algebra::concat(&nu, &Vector::zeros(self.basis.dim()))
    }

    /// `L²` norm `√(vᵀMv)` of a coefficient vector.
    pub fn l2_norm(&self, v: &Vector) -> f64 {
        v.dot(&self.basis.mass_apply(v)).max(0.0).sqrt()
    }

    /// `∫|∇ψ|²` of the stream function of the vorticity `δω`, the
    /// Δ-weighted `H¹` norm squared used for perturbation reports.
    pub fn h1_norm_sq(&self, delta_omega: &Vector) -> f64 {
        let b = &self.basis;
        let m_omega = b.mass_apply(delta_omega);
        m_omega.dot(&b.stiffness_solve(0.0, &m_omega))
    }

    pub fn profile(&self) -> CasimirProfile {
        mhd_profile(&self.cfg)
    }

    pub fn l_c(&self, z: &Vector) -> Result<f64> {
        l_c_eval(&self.system, &self.cfg, z)
    }
}

/// `K_C = ρ(∫ω²)` with `ρ(x) = −x/(2(1−γ))`.
pub fn mhd_profile(cfg: &ChannelConfig) -> CasimirProfile {
    CasimirProfile::quadratic("enstrophy", 0.0, -0.5 / (1.0 - cfg.gamma), 0.0)
}

/// `−(g_C + K_C)(z) + (g_C + K_C)(z_e)` for `s = −1`.
pub fn l_c_eval(sys: &ControlledSystem, cfg: &ChannelConfig, z: &Vector) -> Result<f64> {
    let n = sys.dim_d();
    check_dim("z", 2 * n, z.len())?;
    let profile = mhd_profile(cfg);
    let mut z_e = Vector::zeros(2 * n);
    z_e[n - 1] = -(1.0 - cfg.gamma);
    let v = analysis::energy_casimir(sys, &profile, z)? - analysis::energy_casimir(sys, &profile, &z_e)?;
    Ok(-v)
}

/// Matrix-free channel system for `cfg.gamma`. `s` must be `±1`; the
/// stabilising choice is `−1`.
pub fn build_mhd_system(cfg: &ChannelConfig, s: f64) -> Result<MhdModel> {
    cfg.validate()?;
    if s != 1.0 && s != -1.0 {
        return Err(Error::InvalidConfig(format!("s must be +1 or -1, got {s}")));
    }
    let basis = Arc::new(ChannelBasis::new(cfg));
    let alg = Arc::new(FluidAlgebra::new(basis.clone()));
    let algebra = ProductAlgebra::new(alg.clone(), alg);
    let op = |kind| LinearMap::op(GalerkinOp::new(basis.clone(), kind));
    let e2 = cfg.charge * cfg.charge;
    let kk = KaluzaKlein::from_maps(
        op(GalerkinKind::Metric { gamma: 0.0 }),
        op(GalerkinKind::MetricInverse { gamma: 0.0 }),
        op(GalerkinKind::Inertia { e2 }),
        op(GalerkinKind::InertiaInverse { e2 }),
        op(GalerkinKind::NegIdentity),
    );
    let n = basis.dim();
    let gains = GainSet::from_maps(
        op(GalerkinKind::Gain { gamma: cfg.gamma }),
        LinearMap::identity(n),
        LinearMap::identity(n),
        s,
        Orientation::Right,
    );
    let system = ControlledSystem::with_metric(
        algebra,
        kk,
        gains,
        Mode::Dissipative,
        op(GalerkinKind::MetricInverse { gamma: cfg.gamma }),
    )?;
    Ok(MhdModel {
        cfg: *cfg,
        basis,
        system,
    })
}

/// Plain-text grid of a coefficient field (background included) on the
/// interior transform grid, row-major in `x`, with header `Nx Ny L W γ t`.
pub fn snapshot(cfg: &ChannelConfig, basis: &ChannelBasis, field: &Vector, t: f64) -> Result<String> {
    check_dim("field", basis.dim(), field.len())?;
    let grid = basis.to_grid(field);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Nx Ny L W gamma t\n{} {} {} {} {} {}",
        cfg.nx, cfg.ny, cfg.length, cfg.width, cfg.gamma, t
    );
    for j in 0..grid.nrows() {
        let row: Vec<String> = grid.row(j).iter().map(|v| format!("{v:.12e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    Ok(out)
}

/// Domain area `LπWπ`.
pub fn area(cfg: &ChannelConfig) -> f64 {
    cfg.length * PI * cfg.width * PI
}
