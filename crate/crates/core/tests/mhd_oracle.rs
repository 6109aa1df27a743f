//! Transform-based channel operators against the quadrature assembly.

use std::sync::OnceLock;

use lpcontrol::algebra::{coad_pairing_residual, LieAlgebra};
use lpcontrol::mhd2d::{build_mhd_system, ChannelConfig, FluidAlgebra, GalerkinOracle, MhdModel};
use lpcontrol::{Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> ChannelConfig {
    ChannelConfig::default().with_modes(8, 8)
}

fn oracle() -> &'static GalerkinOracle {
    static O: OnceLock<GalerkinOracle> = OnceLock::new();
    O.get_or_init(|| GalerkinOracle::new(&cfg()).unwrap())
}

fn model() -> &'static MhdModel {
    static M: OnceLock<MhdModel> = OnceLock::new();
    M.get_or_init(|| build_mhd_system(&cfg(), -1.0).unwrap())
}

/// Decaying random coefficients plus a background amplitude.
fn random_field(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |i, _| {
        let decay = 1.0 / (1.0 + (i % 8) as f64 + (i / 8) as f64);
        scale * decay * rng.random_range(-1.0..1.0)
    })
}

fn rel(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn dense(f: impl Fn(&Vector) -> Vector, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = Vector::zeros(n);
        e[j] = 1.0;
        m.set_column(j, &f(&e));
    }
    m
}

#[test]
fn gram_and_stiffness_match_quadrature() {
    let (o, b) = (oracle(), &model().basis);
    let n = b.dim();
    let mass = dense(|v| b.mass_apply(v), n);
    assert!((&mass - &o.mass).amax() < 1e-12 * o.mass.amax(), "{}", (&mass - &o.mass).amax());
    for g in [0.0, 0.8] {
        let k = dense(|v| b.stiffness_apply(g, v), n);
        let ko = o.stiffness(g);
        assert!((&k - &ko).amax() < 1e-12 * ko.amax(), "gamma {g}: {}", (&k - &ko).amax());
    }
    assert!((&b.mean_weights - &o.mean).amax() < 1e-12 * o.mean.amax());
}

#[test]
fn jacobian_moments_match_tensor() {
    let (o, b) = (oracle(), &model().basis);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let psi = random_field(&mut rng, b.dim(), 1.0);
        let om = random_field(&mut rng, b.dim(), 1.0);
        let fast = b.jacobian_moments(&psi, &om);
        let slow = o.jacobian_moments(&psi, &om);
        assert!(rel(&fast, &slow) < 1e-11, "{}", rel(&fast, &slow));
    }
}

#[test]
fn ida_field_matches_stream_function_form() {
    let (o, m) = (oracle(), model());
    let n = m.basis.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let nu_e = m.equilibrium().nu(&m.basis);
    for _ in 0..5 {
        let nu = &nu_e + random_field(&mut rng, n, 0.1);
        let beta = random_field(&mut rng, n, 0.1);
        let (a, c) = m.system.ida_field_z(&nu, &beta);
        let (ao, co) = o.closed_loop_field(&nu, &beta);
        assert!(rel(&a, &ao) < 1e-10, "nu leg {}", rel(&a, &ao));
        assert!(rel(&c, &co) < 1e-10, "beta leg {}", rel(&c, &co));
    }
}

#[test]
fn dense_generic_system_agrees() {
    let (o, m) = (oracle(), model());
    let dsys = o.system(-1.0).unwrap();
    let n = m.basis.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let nu = m.equilibrium().nu(&m.basis) + random_field(&mut rng, n, 0.2);
    let beta = random_field(&mut rng, n, 0.2);
    let alpha = random_field(&mut rng, n, 0.2);
    assert!(rel(&m.system.mu_c_inv.apply(&nu), &dsys.mu_c_inv.apply(&nu)) < 1e-10);
    assert!(rel(&m.system.n_map(&nu), &dsys.n_map(&nu)) < 1e-10);
    assert!(rel(&m.system.u_lp_force(&nu, &alpha), &dsys.u_lp_force(&nu, &alpha)) < 1e-9);
    assert!(rel(&m.system.u_diss_force(&nu, &beta), &dsys.u_diss_force(&nu, &beta)) < 1e-9);
    let (a, c) = m.system.ida_field_z(&nu, &beta);
    let (ad, cd) = dsys.ida_field_z(&nu, &beta);
    assert!(rel(&a, &ad) < 1e-9 && rel(&c, &cd) < 1e-9);
}

#[test]
fn fluid_coadjoint_is_dual_to_bracket() {
    let m = model();
    let fa = FluidAlgebra::new(m.basis.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let u = random_field(&mut rng, fa.dim(), 1.0);
        let nu = random_field(&mut rng, fa.dim(), 1.0);
        assert!(coad_pairing_residual(&fa, &u, &nu) < 1e-11);
    }
}
