//! Worked values for the satellite and the channel, each against a formula
//! or quadrature coded here.

mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use common::*;
use lpcontrol::algebra::{concat, LieAlgebra};
use lpcontrol::analysis::{
    first_variation, gain_threshold_satellite, lyapunov_eval, second_variation, CasimirProfile, Definiteness,
};
use lpcontrol::kaluza::free_lp_field;
use lpcontrol::mhd2d::{
    advect, build_mhd_system, delta_gamma_apply, l_c_bound_coefficient, lambda1_gamma, stability_margin,
    ChannelConfig, FluidAlgebra, GalerkinOracle, SpectralField,
};
use lpcontrol::satellite::{
    build_satellite, equilibrium, second_variation_exact, SatelliteMode, SatelliteParams,
};
use lpcontrol::{Matrix, Vector};
use nalgebra::SymmetricEigen;
use rand::Rng;

fn v(xs: &[f64]) -> Vector {
    Vector::from_row_slice(xs)
}

// Satellite with λ = (1, 2), I₃ = 3, i₃ = 1: hand-expanded closed loop.

const L1: f64 = 1.0;
const L2: f64 = 2.0;
const I3: f64 = 3.0;
const R3: f64 = 1.0;

fn n_hand(nu: &Vector) -> f64 {
    -(R3 / I3) * (1.0 / L1 - 1.0 / L2) * nu[0] * nu[1]
}

fn dn_hand(nu: &Vector) -> Vector {
    v(&[nu[1], nu[0], 0.0]) * (-(R3 / I3) * (1.0 / L1 - 1.0 / L2))
}

fn cross(a: &Vector, b: &Vector) -> Vector {
    v(&[a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
}

#[test]
fn satellite_n_and_rate() {
    let sys = satellite();
    let nu = v(&[1.0, 1.0, 0.0]);
    assert_relative_eq!(sys.n_map(&nu)[0], -1.0 / 6.0, epsilon = 1e-15);
    let dn = sys.dn_apply(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]));
    assert_relative_eq!(dn[0], -1.0 / 6.0, epsilon = 1e-15);
    assert_relative_eq!(sys.dissipation_rate(&nu, &v(&[0.0])), -1.0 / 36.0, epsilon = 1e-15);
    let x = v(&[0.3, -0.7, 1.1]);
    assert_relative_eq!(sys.dn_apply(&x, &x), sys.n_map(&x) * 2.0, epsilon = 1e-14);
    assert_relative_eq!(sys.n_map(&x)[0], n_hand(&x), epsilon = 1e-15);
}

#[test]
fn satellite_energy_and_damping_leg() {
    let sys = satellite();
    assert_relative_eq!(sys.g_c_eval(&equilibrium().rows(0, 3).into_owned(), &v(&[0.0])), 0.25, epsilon = 1e-15);
    assert_eq!(sys.g_c_eval(&Vector::zeros(3), &v(&[0.0])), 0.0);
    let (first, second) = sys.r_c_apply(&v(&[0.2, 0.5, -0.4]), &Vector::zeros(3), &v(&[0.7]));
    assert_eq!(first, Vector::zeros(3));
    assert_relative_eq!(second[0], 0.7, epsilon = 1e-15);
    let (p1, p2) = sys.pi_c_apply(&Vector::zeros(3), &v(&[1.0, 2.0, 3.0]), &v(&[1.0]));
    assert!(p1.amax() == 0.0 && p2.amax() == 0.0);
}

#[test]
fn satellite_z_field_by_hand() {
    let sys = satellite();
    let mut r = rng(4);
    for _ in 0..20 {
        let nu = vec(&mut r, 3, 1.0);
        let beta = r.random_range(-1.0..1.0);
        let n = n_hand(&nu);
        // μ_C = diag(1, 2, 1.8), G = 1.
        let w = v(&[nu[0] / L1, nu[1] / L2, nu[2] / 1.8 - (beta - n) / I3]);
        let expected = cross(&nu, &w);
        let (a, b) = sys.ida_field_z(&nu, &v(&[beta]));
        assert_relative_eq!(a, expected, epsilon = 1e-14);
        assert_relative_eq!(b[0], -beta - n, epsilon = 1e-14);
    }
}

#[test]
fn satellite_x_field_by_hand() {
    let sys = satellite();
    let c = v(&[0.0, 0.0, 2.0 * R3 / I3]);
    let block_inv = sys.kk.block_metric_inverse();
    let mut r = rng(8);
    for _ in 0..20 {
        let nu = vec(&mut r, 3, 1.0);
        let alpha = r.random_range(-1.0..1.0);
        let ux = &block_inv * concat(&nu, &v(&[alpha]));
        let nu_dot = cross(&nu, &ux.rows(0, 3).into_owned());
        let n = n_hand(&nu);
        let alpha_dot = -(&c + dn_hand(&nu)).dot(&nu_dot) - alpha - c.dot(&nu) - 2.0 * n;
        let (a, b) = sys.controlled_field_x(&nu, &v(&[alpha]));
        assert_relative_eq!(a, nu_dot, epsilon = 1e-14);
        assert_relative_eq!(b[0], alpha_dot, epsilon = 1e-13);
    }
}

#[test]
fn satellite_phi_at_equilibrium() {
    let sys = satellite();
    let e2 = v(&[0.0, 1.0, 0.0]);
    let alpha = sys.phi_inverse(&e2, &v(&[0.0]));
    assert_eq!(sys.phi_forward(&e2, &alpha), v(&[0.0]));
    let (a, b) = sys.ida_field_z(&e2, &v(&[0.0]));
    assert!(a.amax() == 0.0 && b.amax() == 0.0);
}

#[test]
fn satellite_profile_slope() {
    let sys = satellite();
    let profile = CasimirProfile::satellite(L2, 1.0);
    let fv = first_variation(&sys, &profile, &equilibrium()).unwrap();
    assert_relative_eq!(fv.required_slope.unwrap(), -0.5, epsilon = 1e-14);
    assert!(fv.norm < 1e-14);
    let zero = first_variation(&sys, &profile, &Vector::zeros(4)).unwrap();
    assert_eq!(zero.gradient.amax(), 0.0);
}

#[test]
fn satellite_definiteness_and_exact_hessian() {
    let p = SatelliteParams::default();
    let profile = CasimirProfile::satellite(L2, 1.0);
    let at = |k: f64| {
        let sys = build_satellite(&p.with_k(k), SatelliteMode::DoubleBracket, 1.0).unwrap();
        second_variation(&sys, &profile, &equilibrium(), None).unwrap()
    };
    assert_eq!(at(0.0).classification, Definiteness::Indefinite);
    let rep = at(2.0);
    assert_eq!(rep.classification, Definiteness::PositiveDefinite);
    let exact = second_variation_exact(&p, 1.0, 1.0, 1.0);
    assert!((&rep.hessian - &exact).amax() < 1e-7, "{}", (&rep.hessian - &exact).amax());
    assert_relative_eq!(exact[(2, 2)], (1.0 + 2.0 / 3.0) / 3.0 - 0.5, epsilon = 1e-15);
}

#[test]
fn satellite_threshold_bisection() {
    let p = SatelliteParams::default();
    assert_eq!(gain_threshold_satellite(&p), 1.5);
    let profile = CasimirProfile::satellite(L2, 1.0);
    let margin = |k: f64| {
        let sys = build_satellite(&p.with_k(k), SatelliteMode::DoubleBracket, 1.0).unwrap();
        second_variation(&sys, &profile, &equilibrium(), None).unwrap().margin
    };
    let (mut lo, mut hi) = (0.0, 3.0);
    assert!(margin(lo) < 0.0 && margin(hi) > 0.0);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if margin(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((0.5 * (lo + hi) - 1.5).abs() < 1e-6, "{lo} {hi}");
}

#[test]
fn satellite_lyapunov_is_quadratic_near_axis() {
    let sys = satellite();
    let profile = CasimirProfile::satellite(L2, 1.0);
    let z_e = equilibrium();
    assert_eq!(lyapunov_eval(&sys, &profile, &z_e, &z_e).unwrap(), 0.0);
    let hess = second_variation_exact(&SatelliteParams::default(), 1.0, 1.0, 1.0);
    let mut r = rng(2);
    for _ in 0..50 {
        let d = vec(&mut r, 4, 1.0);
        let d = &d * (1e-2 / d.norm());
        let l = lyapunov_eval(&sys, &profile, &(&z_e + &d), &z_e).unwrap();
        let q = 0.5 * d.dot(&(&hess * &d));
        assert!(l > 0.0);
        assert!((l - q).abs() < 0.05 * q, "{l} vs {q}");
    }
}

// Channel, L = W = 2.

/// Composite trapezoid on `[0, 2π]`, exact for trigonometric polynomials of low degree.
fn periodic_mean(f: impl Fn(f64) -> f64) -> f64 {
    let n = 64;
    (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).sum::<f64>() / n as f64
}

#[test]
fn laplacian_multipliers_and_margins() {
    let c0 = ChannelConfig::default().with_modes(4, 4).with_gamma(0.0);
    let f = SpectralField::mode(&c0, 1, 1, 1.0);
    assert_relative_eq!(delta_gamma_apply(&c0, &f).unwrap().coeffs[(0, 0)], -0.5, epsilon = 1e-15);
    assert_relative_eq!(lambda1_gamma(&c0), 0.5, epsilon = 1e-15);
    assert_relative_eq!(lambda1_gamma(&c0.with_gamma(0.8)), 0.3, epsilon = 1e-15);
    assert_relative_eq!(stability_margin(&c0).uncontrolled, -0.5, epsilon = 1e-15);
    assert!(stability_margin(&c0.with_gamma(2.0 / 3.0)).controlled.abs() < 1e-15);
    assert_relative_eq!(stability_margin(&c0.with_gamma(0.8)).controlled, 0.5, epsilon = 1e-14);
}

#[test]
fn enstrophy_and_mode_normalisation() {
    let m = mhd8();
    let fa = FluidAlgebra::new(m.basis.clone());
    let mut omega_e = Vector::zeros(m.basis.dim());
    omega_e[m.basis.bg_index()] = -1.0;
    // ∫∫cos²y over [0, 2π]²
    let expected = (2.0 * PI).powi(2) * periodic_mean(|y| y.cos().powi(2));
    assert_relative_eq!(expected, 2.0 * PI * PI, epsilon = 1e-12);
    assert_relative_eq!(fa.casimir("enstrophy", &omega_e).unwrap(), expected, max_relative = 1e-13);
    // ∫∫sin²(x/2)sin²(y/2)
    let mode = (2.0 * PI * periodic_mean(|x| (x / 2.0).sin().powi(2))).powi(2);
    let mut e11 = Vector::zeros(m.basis.dim());
    e11[m.basis.index(1, 1)] = 1.0;
    assert_relative_eq!(e11.dot(&m.basis.mass_apply(&e11)), mode, max_relative = 1e-13);
}

#[test]
fn shear_equilibrium_is_steady() {
    let m = mhd8();
    let z_e = m.z_e();
    let n = m.basis.dim();
    let nu_e = z_e.rows(0, n).into_owned();
    assert_eq!(m.l_c(&z_e).unwrap(), 0.0);
    assert!(m.system.n_map(&nu_e).amax() < 1e-14);
    let (a, b) = m.system.ida_field_z(&nu_e, &Vector::zeros(n));
    assert!(a.amax() < 1e-14 && b.amax() < 1e-14);

    let free = build_mhd_system(&mhd_cfg().with_gamma(0.0), -1.0).unwrap();
    let nu0 = free.equilibrium().nu(&free.basis);
    let sys = &free.system;
    assert!(sys.gains.c.apply(&nu0).amax() < 1e-13);
    let (a, b) = free_lp_field(&sys.kk, &sys.algebra, sys.gains.orientation, &nu0, &Vector::zeros(n)).unwrap();
    assert!(a.amax() < 1e-14 && b.amax() < 1e-14);

    let psi_e = m.equilibrium().psi_coeffs(&m.basis);
    assert!(advect(&m.basis, &psi_e, &nu_e).amax() < 1e-14);
}

#[test]
fn channel_rate_sign() {
    let m = mhd8();
    let mut r = rng(12);
    for _ in 0..10 {
        let (nu, beta) = mhd_state(&mut r, m);
        assert!(m.system.dissipation_rate(&nu, &beta) > 0.0);
    }
}

/// `L_C` is the quadratic form `½δᵀ(M/(1−γ) − MK_γ⁻¹M)δ + ½βᵀMβ/e²` in the
/// quadrature matrices; on the Gram complement of the background mode its
/// smallest ratio to `∫δω²` is bounded below by the closed-form coefficient.
#[test]
fn l_c_quadratic_form_against_quadrature() {
    let cfg = mhd_cfg();
    let m = mhd8();
    let oracle = GalerkinOracle::new(&cfg).unwrap();
    let g = cfg.gamma;
    let k_inv = oracle.stiffness(g).try_inverse().unwrap();
    let form = &oracle.mass / (1.0 - g) - &oracle.mass * k_inv * &oracle.mass;
    let n = m.basis.dim();
    let bg = m.basis.bg_index();
    let z_e = m.z_e();
    let coef = l_c_bound_coefficient(&cfg);
    assert_relative_eq!(coef, 0.5 * 0.5 / 0.3, epsilon = 1e-14);

    let complement: Vec<Vector> = (0..n)
        .filter(|&i| i != bg)
        .map(|i| {
            let mut d = Vector::zeros(n);
            d[i] = 1.0;
            d[bg] -= oracle.mass[(i, bg)] / oracle.mass[(bg, bg)];
            d
        })
        .collect();
    let p = Matrix::from_columns(&complement);
    let a = p.transpose() * &form * &p;
    let b = p.transpose() * &oracle.mass * &p;
    let l_inv = b.cholesky().unwrap().l().try_inverse().unwrap();
    let reduced = &l_inv * a * l_inv.transpose();
    let min_ratio = 0.5 * SymmetricEigen::new((&reduced + reduced.transpose()) * 0.5).eigenvalues.min();
    assert!(min_ratio >= coef, "{min_ratio} < {coef}");

    let mut r = rng(21);
    for (mm, nn) in [(1, 1), (2, 1), (1, 3), (3, 2)] {
        let mut d = complement[m.basis.index(mm, nn)].clone() * 1e-2;
        d += &p * vec(&mut r, n - 1, 1e-4);
        let mut z = z_e.clone();
        let nu = z.rows(0, n) + &d;
        z.rows_mut(0, n).copy_from(&nu);
        let l = m.l_c(&z).unwrap();
        assert_relative_eq!(l, 0.5 * d.dot(&(&form * &d)), max_relative = 1e-9);
        let enstrophy = d.dot(&(&oracle.mass * &d));
        assert!(l >= coef * enstrophy);
        assert!(l >= stability_margin(&cfg).controlled * enstrophy);
    }
    let mut z = z_e.clone();
    z.rows_mut(n, n).fill(1e-2);
    let beta = Vector::from_element(n, 1e-2);
    assert_relative_eq!(m.l_c(&z).unwrap(), 0.5 * beta.dot(&(&oracle.mass * &beta)), max_relative = 1e-12);
}
