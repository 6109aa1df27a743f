//! Truncated area-preserving vector fields in moment coordinates.
//!
//! An element `ũ` of the algebra is stored as the moments `−Mψ` of its stream
//! function, a dual element `ω` as vorticity coefficients, so the pairing is
//! the coordinate dot product `ω·ũ = −∫ωψ`.

use std::sync::Arc;

use super::basis::ChannelBasis;
use crate::algebra::{LieAlgebra, Operator};
use crate::Vector;

#[derive(Debug, Clone)]
pub struct FluidAlgebra {
    pub basis: Arc<ChannelBasis>,
}

impl FluidAlgebra {
    pub fn new(basis: Arc<ChannelBasis>) -> Self {
        Self { basis }
    }

    /// Stream function of an algebra element, `ψ = −M⁻¹ũ`.
    pub fn stream(&self, u: &Vector) -> Vector {
        -self.basis.mass_solve(u)
    }

    /// `∫ω`. Not a Casimir of the truncation: the constant function lies
    /// outside the Galerkin space, so the projected flow moves it.
    pub fn mean_vorticity(&self, nu: &Vector) -> f64 {
        self.basis.mean_weights.dot(nu)
    }

    /// Algebra element of a stream function, `ũ = −Mψ`.
    pub fn from_stream(&self, psi: &Vector) -> Vector {
        -self.basis.mass_apply(psi)
    }
}

impl LieAlgebra for FluidAlgebra {
    fn name(&self) -> &str {
        "sdiff(channel)"
    }

    fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Moments of `J(ψ_u, ψ_v)`.
    fn bracket(&self, u: &Vector, v: &Vector) -> Vector {
        self.basis
            .jacobian_moments(&self.stream(u), &self.stream(v))
    }

    /// `M⁻¹·moments(J(ψ_u, ω))`.
    fn coad(&self, u: &Vector, nu: &Vector) -> Vector {
        if nu.iter().all(|v| *v == 0.0) || u.iter().all(|v| *v == 0.0) {
            return Vector::zeros(nu.len());
        }
        self.basis
            .mass_solve(&self.basis.jacobian_moments(&self.stream(u), nu))
    }

    fn exact_jacobi(&self) -> bool {
        false
    }

    fn casimir_names(&self) -> Vec<String> {
        vec!["enstrophy".into()]
    }

    /// `∫ω² = ωᵀMω`.
    fn casimir(&self, name: &str, nu: &Vector) -> Option<f64> {
        (name == "enstrophy").then(|| nu.dot(&self.basis.mass_apply(nu)))
    }

    fn casimir_gradient(&self, name: &str, nu: &Vector) -> Option<Vector> {
        (name == "enstrophy").then(|| self.basis.mass_apply(nu) * 2.0)
    }
}

/// The Galerkin operators of the channel model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GalerkinKind {
    /// `M⁻¹K_γM⁻¹`
    Metric { gamma: f64 },
    /// `MK_γ⁻¹M`
    MetricInverse { gamma: f64 },
    /// `e²M⁻¹`
    Inertia { e2: f64 },
    /// `M/e²`
    InertiaInverse { e2: f64 },
    /// `I − M⁻¹K₀K_γ⁻¹M`
    Gain { gamma: f64 },
    /// `−I`
    NegIdentity,
}

#[derive(Debug, Clone)]
pub struct GalerkinOp {
    pub basis: Arc<ChannelBasis>,
    pub kind: GalerkinKind,
}

impl GalerkinOp {
    pub fn new(basis: Arc<ChannelBasis>, kind: GalerkinKind) -> Self {
        Self { basis, kind }
    }
}

impl Operator for GalerkinOp {
    fn nrows(&self) -> usize {
        self.basis.dim()
    }

    fn ncols(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, x: &Vector) -> Vector {
        let b = &self.basis;
        match self.kind {
            GalerkinKind::Metric { gamma } => {
                b.mass_solve(&b.stiffness_apply(gamma, &b.mass_solve(x)))
            }
            GalerkinKind::MetricInverse { gamma } => {
                b.mass_apply(&b.stiffness_solve(gamma, &b.mass_apply(x)))
            }
            GalerkinKind::Inertia { e2 } => b.mass_solve(x) * e2,
            GalerkinKind::InertiaInverse { e2 } => b.mass_apply(x) / e2,
            GalerkinKind::Gain { gamma } => {
                x - b.mass_solve(&b.stiffness_apply(0.0, &b.stiffness_solve(gamma, &b.mass_apply(x))))
            }
            GalerkinKind::NegIdentity => -x,
        }
    }

    fn apply_t(&self, y: &Vector) -> Vector {
        let b = &self.basis;
        match self.kind {
            GalerkinKind::Gain { gamma } => {
                y - b.mass_apply(&b.stiffness_solve(gamma, &b.stiffness_apply(0.0, &b.mass_solve(y))))
            }
            _ => self.apply(y),
        }
    }
}
