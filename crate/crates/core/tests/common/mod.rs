#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use lpcontrol::algebra::{ProductAlgebra, StructureConstants};
use lpcontrol::closed_loop::{ControlledSystem, Mode};
use lpcontrol::gains::{EpData, GainSet, MatchedStructure};
use lpcontrol::kaluza::{KaluzaKlein, Orientation};
use lpcontrol::mhd2d::{build_mhd_system, ChannelConfig, MhdModel};
use lpcontrol::satellite::{build_satellite, SatelliteMode, SatelliteParams};
use lpcontrol::{Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| scale * rng.random_range(-1.0..1.0))
}

pub fn mat(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> Matrix {
    Matrix::from_fn(r, c, |_, _| scale * rng.random_range(-1.0..1.0))
}

pub fn spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = mat(rng, n, n, 1.0);
    a.transpose() * a + Matrix::identity(n, n) * (0.5 * n as f64)
}

pub fn kk(rng: &mut ChaCha8Rng, nd: usize, ng: usize) -> KaluzaKlein {
    let (mu0, i0, a0) = (spd(rng, nd), spd(rng, ng), mat(rng, ng, nd, 0.5));
    KaluzaKlein::new(mu0, i0, a0).unwrap()
}

/// A structure satisfying both matching conditions, built from random
/// Euler-Poincaré data `ρ` (so that `σᵃᵇ = 𝕀₀⁻¹ − ρ⁻¹`, `τ = −σᵃᵇ𝕀₀𝒜₀`).
pub fn matched_structure(rng: &mut ChaCha8Rng, kk: &KaluzaKlein) -> MatchedStructure {
    let ng = kk.dim_g();
    let rho = spd(rng, ng);
    let sigma_up = kk.i0_inv.to_dense() - rho.clone().try_inverse().unwrap();
    let tau = -&sigma_up * kk.i0.to_dense() * kk.a0.to_dense();
    lpcontrol::gains::lp_from_ep(
        kk,
        &EpData {
            tau,
            sigma_up,
            rho,
        },
    )
    .unwrap()
}

pub fn satellite() -> ControlledSystem {
    build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0).unwrap()
}

pub fn satellite_matched() -> ControlledSystem {
    build_satellite(&SatelliteParams::default(), SatelliteMode::Matched, 1.0).unwrap()
}

/// `so(3) × so(3)` with random metric data, gains, `s` and orientation.
/// `C = k·𝕀₀𝒜₀μ₀⁻¹` keeps `μ_C` symmetric.
pub fn generic(rng: &mut ChaCha8Rng) -> ControlledSystem {
    let kk = kk(rng, 3, 3);
    let k = rng.random_range(-0.3..0.3);
    let c = kk.i0.to_dense() * kk.a0.to_dense() * kk.mu0_inv.to_dense() * k;
    let g = Matrix::identity(3, 3) + mat(rng, 3, 3, 0.2);
    let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let o = if rng.random_bool(0.5) {
        Orientation::Left
    } else {
        Orientation::Right
    };
    let gains = GainSet::new(c, g, s, o).unwrap();
    let alg = ProductAlgebra::new(
        Arc::new(StructureConstants::so3()),
        Arc::new(StructureConstants::so3()),
    );
    ControlledSystem::new(alg, kk, gains, Mode::Dissipative).unwrap()
}

pub fn mhd_cfg() -> ChannelConfig {
    ChannelConfig::default().with_modes(8, 8)
}

pub fn mhd8() -> &'static MhdModel {
    static M: OnceLock<MhdModel> = OnceLock::new();
    M.get_or_init(|| build_mhd_system(&mhd_cfg(), -1.0).unwrap())
}

/// Spectrally decaying perturbation, background slot included.
pub fn mhd_vec(rng: &mut ChaCha8Rng, m: &MhdModel, scale: f64) -> Vector {
    let ny = m.basis.ny;
    Vector::from_fn(m.basis.dim(), |i, _| {
        let decay = 1.0 / (1.0 + (i / ny) as f64 + (i % ny) as f64);
        scale * decay * rng.random_range(-1.0..1.0)
    })
}

/// `(ν, β)` near the shear equilibrium.
pub fn mhd_state(rng: &mut ChaCha8Rng, m: &MhdModel) -> (Vector, Vector) {
    let nu = m.equilibrium().nu(&m.basis) + mhd_vec(rng, m, 0.2);
    (nu, mhd_vec(rng, m, 0.2))
}

pub fn rel(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn split(v: &Vector, nd: usize) -> (Vector, Vector) {
    (v.rows(0, nd).into_owned(), v.rows(nd, v.len() - nd).into_owned())
}
