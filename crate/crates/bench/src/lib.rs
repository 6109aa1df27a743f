//! Fixtures shared by the kernel benchmarks.

use lpcontrol::mhd2d::{build_mhd_system, ChannelConfig, MhdModel};
use lpcontrol::satellite::{self, SatelliteMode, SatelliteParams};
use lpcontrol::{ControlledSystem, Vector};

/// Channel model at `n × n` modes with the default shear parameters.
pub fn channel(n: usize) -> MhdModel {
    build_mhd_system(&ChannelConfig::default().with_modes(n, n), -1.0).expect("default channel builds")
}

/// A deterministic, smooth perturbation of the equilibrium, `(ν, β)`.
pub fn channel_state(model: &MhdModel) -> (Vector, Vector) {
    let dim = model.basis.dim();
    let wobble = |scale: f64| Vector::from_fn(dim, |i, _| scale * ((i as f64 + 1.0) * 0.7).sin() / (i as f64 + 1.0));
    (model.equilibrium().nu(&model.basis) + wobble(1e-2), wobble(1e-3))
}

pub fn satellite() -> ControlledSystem {
    satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0)
        .expect("default satellite builds")
}
