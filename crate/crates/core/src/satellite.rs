//! Rigid carrier with a rotor on its short axis: `so(3) × ℝ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{concat, ProductAlgebra, StructureConstants};
use crate::analysis::{self, CasimirProfile};
use crate::closed_loop::{Chart, ControlledSystem, Mode};
use crate::dynamics::{integrate, IntegratorConfig, Monitor};
use crate::error::{Error, Result};
use crate::gains::GainSet;
use crate::kaluza::{KaluzaKlein, Orientation};
use crate::report::{ScenarioReport, Verdict};
use crate::{Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteParams {
    pub lambda1: f64,
    pub lambda2: f64,
    /// carrier moment `I₃`
    pub carrier_i3: f64,
    /// rotor moment `i₃`
    pub rotor_i3: f64,
    pub k: f64,
}

impl Default for SatelliteParams {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 2.0,
            carrier_i3: 3.0,
            rotor_i3: 1.0,
            k: 2.0,
        }
    }
}

impl SatelliteParams {
    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self;
        if [p.lambda1, p.lambda2, p.carrier_i3, p.rotor_i3]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidConfig("satellite moments must be positive".into()));
        }
        if !(p.lambda1 < p.lambda2 && p.lambda2 < p.carrier_i3) {
            return Err(Error::InvalidConfig(format!(
                "need lambda1 < lambda2 < I3, got {} {} {}",
                p.lambda1, p.lambda2, p.carrier_i3
            )));
        }
        if !(p.k * p.rotor_i3 / p.carrier_i3 > -1.0) {
            return Err(Error::NotInvertible("1 + A0*C (k i3/I3 <= -1)"));
        }
        Ok(())
    }

    /// `1 + k i₃/I₃`
    fn stiffening(&self) -> f64 {
        1.0 + self.k * self.rotor_i3 / self.carrier_i3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SatelliteMode {
    /// controlled-Lagrangian matching, no dissipation
    Matched,
    /// double-bracket dissipation with `G = 1`
    DoubleBracket,
}

pub fn kaluza_klein(p: &SatelliteParams) -> KaluzaKlein {
    KaluzaKlein::new(
        Matrix::from_diagonal(&Vector::from_vec(vec![p.lambda1, p.lambda2, p.carrier_i3])),
        Matrix::from_element(1, 1, p.rotor_i3),
        Matrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]),
    )
    .expect("validated satellite moments are positive")
}

/// `C = k𝕀₀𝒜₀μ₀⁻¹ = k(i₃/I₃)e₃ᵀ`.
pub fn gain_c(p: &SatelliteParams) -> Matrix {
    Matrix::from_row_slice(1, 3, &[0.0, 0.0, p.k * p.rotor_i3 / p.carrier_i3])
}

/// `G = 1 + k(i₃ + I₃)/I₃`, the value that satisfies the matching conditions.
pub fn matched_g(p: &SatelliteParams) -> f64 {
    1.0 + p.k * (p.rotor_i3 + p.carrier_i3) / p.carrier_i3
}

pub fn algebra() -> ProductAlgebra {
    ProductAlgebra::new(
        Arc::new(StructureConstants::so3()),
        Arc::new(StructureConstants::abelian(1)),
    )
}

pub fn build_satellite(p: &SatelliteParams, mode: SatelliteMode, s: f64) -> Result<ControlledSystem> {
    p.validate()?;
    let kk = kaluza_klein(p);
    let (g, sys_mode) = match mode {
        SatelliteMode::Matched => (matched_g(p), Mode::Matched),
        SatelliteMode::DoubleBracket => (1.0, Mode::Dissipative),
    };
    let gains = GainSet::new(gain_c(p), Matrix::from_element(1, 1, g), s, Orientation::Left)?;
    ControlledSystem::new(algebra(), kk, gains, sys_mode)
}

/// Closed-form Hessian of `g_C + K_ρ` at `(e₂, 0)` in the coordinates `(ν₁, ν₂, ν₃, β)`:
/// `diag(λ₁⁻¹−λ₂⁻¹, ρ'', (1+ki₃/I₃)/I₃ − λ₂⁻¹, sG²/i₃)`.
pub fn second_variation_exact(p: &SatelliteParams, g: f64, s: f64, rho2: f64) -> Matrix {
    Matrix::from_diagonal(&Vector::from_vec(vec![
        1.0 / p.lambda1 - 1.0 / p.lambda2,
        rho2,
        p.stiffening() / p.carrier_i3 - 1.0 / p.lambda2,
        s * g * g / p.rotor_i3,
    ]))
}

/// `√(ν₁² + ν₃² + β²)`.
pub fn axis_distance(z: &Vector) -> f64 {
    (z[0] * z[0] + z[2] * z[2] + z[3] * z[3]).sqrt()
}

pub fn equilibrium() -> Vector {
    Vector::from_vec(vec![0.0, 1.0, 0.0, 0.0])
}

/// Perturb `(e₂, 0)` by `δ` in `ν₁`, `ν₃` and `β`.
pub fn perturbed_state(delta: f64) -> Vector {
    Vector::from_vec(vec![delta, 1.0, delta, delta])
}

/// Middle-axis stabilization with the double-bracket loop (`s = 1`, default profile `ρ'' = 1`).
///
/// With `k` at or below the threshold the loop still runs; the report then
/// records the departure from the axis.
pub fn scenario_middle_axis(
    p: &SatelliteParams,
    perturbation: f64,
    config: &IntegratorConfig,
) -> Result<ScenarioReport> {
    const RHO2: f64 = 1.0;
    let sys = build_satellite(p, SatelliteMode::DoubleBracket, 1.0)?;
    let profile = CasimirProfile::satellite(p.lambda2, RHO2);
    let z_e = equilibrium();
    let z0 = perturbed_state(perturbation);
    let threshold = analysis::gain_threshold_satellite(p);

    let nu_of = |z: &Vector| z.rows(0, 3).into_owned();
    let beta_of = |z: &Vector| z.rows(3, 1).into_owned();
    let monitors = [
        Monitor::new("lyapunov", |z: &Vector| {
            analysis::lyapunov_eval(&sys, &profile, z, &z_e).expect("dims")
        }),
        Monitor::new("g_c", |z: &Vector| sys.g_c_eval(&nu_of(z), &beta_of(z))),
        Monitor::new("norm2", |z: &Vector| 0.5 * nu_of(z).norm_squared()),
        Monitor::new("rate", |z: &Vector| sys.dissipation_rate(&nu_of(z), &beta_of(z))),
        Monitor::new("n_norm", |z: &Vector| sys.n_map(&nu_of(z)).norm()),
        Monitor::new("beta_norm", |z: &Vector| z[3].abs()),
        Monitor::new("axis_distance", axis_distance),
    ];
    let cfg = IntegratorConfig {
        blowup: config.blowup.or(Some(1e6)),
        ..*config
    };
    let mut traj = integrate(|z: &Vector| sys.z_field_flat(z), &z0, &cfg, &monitors)?;
    traj.chart = Some(Chart::Z);

    let lyap = traj.monitor("lyapunov").unwrap();
    let violations = lyap.windows(2).filter(|w| w[1] - w[0] > 1e-12).count();
    let worst_increase = lyap
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let zt = traj.last().clone();
    let axis = axis_distance(&zt);
    let max_axis = traj
        .monitor("axis_distance")
        .unwrap()
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    let drift = (nu_of(&zt).norm() - nu_of(&z0).norm()).abs();
    let n_t = sys.n_map(&nu_of(&zt)).norm();

    let mut rep = ScenarioReport::new("satellite");
    for (k, v) in [
        ("lambda1", p.lambda1),
        ("lambda2", p.lambda2),
        ("I3", p.carrier_i3),
        ("i3", p.rotor_i3),
        ("k", p.k),
        ("s", 1.0),
        ("rho2", RHO2),
        ("perturbation", perturbation),
        ("h", config.step),
        ("T", config.horizon),
    ] {
        rep.param(k, v);
    }
    rep.metric("gain_threshold", threshold);
    rep.metric("lyapunov_violations", violations as f64);
    rep.metric("lyapunov_max_increase", worst_increase);
    rep.metric("terminal_axis_distance", axis);
    rep.metric("max_axis_distance", max_axis);
    rep.metric("norm_drift", drift);
    rep.metric("terminal_n_norm", n_t);
    rep.metric("terminal_beta_norm", zt[3].abs());
    rep.metric("initial_nu_norm", nu_of(&z0).norm());
    rep.metric("terminal_nu2", zt[1]);

    rep.verdicts.push(Verdict::below(
        "no-divergence",
        if traj.diverged { 1.0 } else { 0.0 },
        0.5,
        "state norm stayed below 1e6",
    ));
    rep.verdicts.push(Verdict::below(
        "lyapunov-monotone",
        violations as f64,
        0.5,
        "count of sampled increases of L above 1e-12",
    ));
    rep.verdicts.push(Verdict::below(
        "axis-distance",
        axis,
        1e-6,
        "terminal distance to the axis R e2 x {0}",
    ));
    rep.verdicts.push(Verdict::below(
        "sphere-preservation",
        drift,
        1e-8,
        "| |nu(T)| - |nu(0)| |",
    ));
    if p.k <= threshold {
        rep.notes.push(format!(
            "k = {} is not above the gain threshold {threshold}; no Lyapunov certificate",
            p.k
        ));
    }
    rep.trajectories.push(("controlled".into(), traj));
    Ok(rep)
}

/// Flat `x`-chart start corresponding to `z0`.
pub fn x_from_z(sys: &ControlledSystem, z: &Vector) -> Vector {
    let nu = z.rows(0, 3).into_owned();
    concat(&nu, &sys.phi_inverse(&nu, &z.rows(3, 1).into_owned()))
}
