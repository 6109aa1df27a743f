//! Structural identities on random data for the satellite, a generic
//! non-Abelian system and the 8×8 channel model.

mod common;

use std::sync::Arc;

use common::*;
use lpcontrol::algebra::{coad_pairing_residual, concat, LieAlgebra, StructureConstants};
use lpcontrol::closed_loop::{ControlledSystem, Observable};
use lpcontrol::gains::{
    check_lp_conditions, ep_from_lp, ep_residuals, gain_from_structure, match_structure,
};
use lpcontrol::kaluza::Orientation;
use lpcontrol::mhd2d::{advect, delta_gamma_apply, delta_gamma_solve, ChannelConfig, SpectralField};
use lpcontrol::{Matrix, Vector};
use proptest::prelude::*;

fn coords(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-1.0f64..1.0, n).prop_map(Vector::from_vec)
}

/// Skewness of `Π_C` and symmetry / sign of `ℛ_C` as bilinear forms.
fn structure_residuals(sys: &ControlledSystem, nu: &Vector, a: (&Vector, &Vector), b: (&Vector, &Vector)) -> (f64, f64, f64) {
    let pair = |x: &(Vector, Vector), y: (&Vector, &Vector)| x.0.dot(y.0) + x.1.dot(y.1);
    let pa = sys.pi_c_apply(nu, a.0, a.1);
    let pb = sys.pi_c_apply(nu, b.0, b.1);
    let ra = sys.r_c_apply(nu, a.0, a.1);
    let rb = sys.r_c_apply(nu, b.0, b.1);
    let scale = (pair(&pa, a).abs() + pair(&pa, b).abs() + pair(&ra, b).abs()).max(1.0);
    let skew = (pair(&pa, b) + pair(&pb, a)).abs() / scale;
    let sym = (pair(&ra, b) - pair(&rb, a)).abs() / scale;
    let sign = sys.s() * pair(&ra, a);
    (skew, sym, sign)
}

fn check_structure(sys: &ControlledSystem, nu: &Vector, a: (&Vector, &Vector), b: (&Vector, &Vector)) {
    let (skew, sym, sign) = structure_residuals(sys, nu, a, b);
    assert!(skew < 1e-12, "Pi_C skewness {skew}");
    assert!(sym < 1e-12, "R_C symmetry {sym}");
    assert!(sign >= -1e-12, "s<R_C a, a> = {sign}");
}

/// `TΦ · controlled_field_x = ida_field_z ∘ Φ`.
fn pushforward_residual(sys: &ControlledSystem, nu: &Vector, alpha: &Vector) -> f64 {
    let (nd, ad) = sys.controlled_field_x(nu, alpha);
    let (pn, pb) = sys.push_forward(nu, &nd, &ad);
    let beta = sys.phi_forward(nu, alpha);
    let (zn, zb) = sys.ida_field_z(nu, &beta);
    rel(&concat(&pn, &pb), &concat(&zn, &zb))
}

fn fd_checks(sys: &ControlledSystem, nu: &Vector, beta: &Vector, eta: &Vector, dir_b: &Vector) {
    let eps = 1e-5;
    let fd = (sys.n_map(&(nu + eta * eps)) - sys.n_map(&(nu - eta * eps))) / (2.0 * eps);
    let exact = sys.dn_apply(nu, eta);
    if exact.norm() > 1e-8 {
        assert!(rel(&fd, &exact) < 1e-6, "dN fd {}", rel(&fd, &exact));
    }
    let fd_g = (sys.g_c_eval(&(nu + eta * eps), &(beta + dir_b * eps))
        - sys.g_c_eval(&(nu - eta * eps), &(beta - dir_b * eps)))
        / (2.0 * eps);
    let (gv, gb) = sys.g_c_grad(nu, beta);
    let exact_g = gv.dot(eta) + gb.dot(dir_b);
    assert!(
        (fd_g - exact_g).abs() <= 1e-6 * exact_g.abs().max(1e-3),
        "g_C fd {fd_g} vs {exact_g}"
    );
}

fn field_checks(sys: &ControlledSystem, nu: &Vector, beta: &Vector) {
    let (a, b) = sys.ida_field_z(nu, beta);
    let (sa, sb) = sys.ida_field_z_structured(nu, beta);
    let direct = concat(&a, &b);
    assert!((&direct - concat(&sa, &sb)).amax() <= 1e-12 * direct.amax().max(1.0));

    let (gv, gb) = sys.g_c_grad(nu, beta);
    let rate = gv.dot(&a) + gb.dot(&b);
    let predicted = sys.dissipation_rate(nu, beta);
    assert!(
        (rate - predicted).abs() <= 1e-10 * predicted.abs().max(1e-6),
        "rate {rate} vs {predicted}"
    );

    let alpha = sys.phi_inverse(nu, beta);
    assert!((sys.phi_forward(nu, &alpha) - beta).amax() <= 1e-12 * beta.amax().max(1.0));
    assert!(pushforward_residual(sys, nu, &alpha) < 1e-10);
    let (xa, xb) = sys.controlled_field_x(nu, &alpha);
    let (ca, cb) = sys.controlled_field_x_closed_form(nu, &alpha);
    assert!(rel(&concat(&ca, &cb), &concat(&xa, &xb)) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_structure_constants_pairing(seed in any::<u64>(), u in coords(5), nu in coords(5)) {
        let mut r = rng(seed);
        let c: Vec<Matrix> = (0..5)
            .map(|_| {
                let a = mat(&mut r, 5, 5, 1.0);
                &a - a.transpose()
            })
            .collect();
        let alg = StructureConstants::new("random", &c, vec![]).unwrap();
        prop_assert!(coad_pairing_residual(&alg, &u, &nu) < 1e-12);
        let direct: Vector = (0..5).map(|k| {
            let mut e = Vector::zeros(5);
            e[k] = 1.0;
            nu.dot(&alg.bracket(&u, &e))
        }).collect::<Vec<_>>().into();
        prop_assert!((alg.coad(&u, &nu) - direct).amax() < 1e-12);
    }

    #[test]
    fn so3_casimir_invariant(u in coords(3), nu in coords(3)) {
        let so3 = StructureConstants::so3();
        let grad = so3.casimir_gradient("norm2", &nu).unwrap();
        prop_assert!(grad.dot(&so3.coad(&u, &nu)).abs() < 1e-14);
    }

    #[test]
    fn metric_solve_inverts_apply(seed in any::<u64>(), u in coords(4), x in coords(2)) {
        let kk = kk(&mut rng(seed), 4, 2);
        let (nu, alpha) = kk.metric_apply(&u, &x).unwrap();
        let (u2, x2) = kk.metric_solve(&nu, &alpha).unwrap();
        prop_assert!((u2 - &u).amax() < 1e-10 && (x2 - &x).amax() < 1e-10);
        let h = kk.h0_eval(&nu, &alpha).unwrap();
        prop_assert!((h - 0.5 * (nu.dot(&u) + alpha.dot(&x))).abs() < 1e-10 * h.max(1.0));
        prop_assert!(h >= 0.0);
    }

    #[test]
    fn gains_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kk = kk(&mut r, 4, 2);
        let ms = matched_structure(&mut r, &kk);
        prop_assume!(lpcontrol::algebra::min_sym_eigenvalue(&ms.mu_c) > 1e-3);
        let gains = gain_from_structure(&kk, &ms, 1.0, Orientation::Left).unwrap();
        let back = match_structure(&kk, &gains).unwrap();
        prop_assert!((&back.mu_c - &ms.mu_c).amax() < 1e-9);
        prop_assert!((&back.i_c - &ms.i_c).amax() < 1e-9);
        prop_assert!((&back.a_c - &ms.a_c).amax() < 1e-9);
    }

    #[test]
    fn ep_and_lp_residuals_vanish_together(seed in any::<u64>(), nd in 1usize..=6, ng in 1usize..=3) {
        let mut r = rng(seed);
        let kk = kk(&mut r, nd, ng);
        let ms = matched_structure(&mut r, &kk);
        let (lp1, lp2) = check_lp_conditions(&kk, &ms);
        let (ep1, ep2) = ep_residuals(&kk, &ep_from_lp(&kk, &ms).unwrap()).unwrap();
        prop_assert!(lp1 < 1e-10 && lp2 < 1e-10 && ep1 < 1e-10 && ep2 < 1e-10);

        let mut bad = ms.clone();
        bad.a_c += mat(&mut r, ng, nd, 0.1);
        let (lp1, lp2) = check_lp_conditions(&kk, &bad);
        let (ep1, ep2) = ep_residuals(&kk, &ep_from_lp(&kk, &bad).unwrap()).unwrap();
        prop_assert!(lp1.max(lp2) > 1e-6 && ep1.max(ep2) > 1e-6);
    }

    #[test]
    fn satellite_structure(a in coords(4), b in coords(4), z in coords(4)) {
        let sys = satellite();
        let (nu, beta) = split(&z, 3);
        let (a, b) = (split(&a, 3), split(&b, 3));
        check_structure(&sys, &nu, (&a.0, &a.1), (&b.0, &b.1));
        field_checks(&sys, &nu, &beta);
        fd_checks(&sys, &nu, &beta, &a.0, &a.1);
        let pi2 = sys.pi_c_apply(&nu, &b.0, &b.1);
        let pi_other = sys.pi_c_apply(&nu, &b.0, &b.1);
        prop_assert_eq!(pi2, pi_other);
    }

    #[test]
    fn generic_structure(seed in any::<u64>(), a in coords(6), b in coords(6), z in coords(6)) {
        let sys = generic(&mut rng(seed));
        let (nu, beta) = split(&z, 3);
        let (a, b) = (split(&a, 3), split(&b, 3));
        check_structure(&sys, &nu, (&a.0, &a.1), (&b.0, &b.1));
        field_checks(&sys, &nu, &beta);
        fd_checks(&sys, &nu, &beta, &a.0, &a.1);
        let k = sys.algebra.d.casimir("norm2", &nu).unwrap();
        let (nu_dot, _) = sys.ida_field_z(&nu, &beta);
        let grad = sys.algebra.d.casimir_gradient("norm2", &nu).unwrap();
        prop_assert!(grad.dot(&nu_dot).abs() <= 1e-12 * (k + 1.0) * nu_dot.norm().max(1.0));
    }

    #[test]
    fn symmetric_bracket_properties(seed in any::<u64>(), z in coords(3), fa in coords(3), fb in coords(3)) {
        let sys = generic(&mut rng(seed));
        let f = Observable::Gradient(Arc::new(move |_: &Vector| fa.clone()));
        let h = Observable::Gradient(Arc::new(move |_: &Vector| fb.clone()));
        let fh = sys.symmetric_bracket(&f, &h, &z);
        let hf = sys.symmetric_bracket(&h, &f, &z);
        prop_assert!((fh - hf).abs() <= 1e-12 * fh.abs().max(1.0));
        let casimir = Observable::Gradient(Arc::new(|nu: &Vector| nu.clone()));
        prop_assert!(sys.symmetric_bracket(&casimir, &h, &z).abs() < 1e-12);
    }

    #[test]
    fn delta_gamma_round_trip(vals in prop::collection::vec(-1.0f64..1.0, 16), gamma in 0.0f64..0.99) {
        let cfg = ChannelConfig::default().with_modes(4, 4).with_gamma(gamma);
        let f = SpectralField { coeffs: Matrix::from_vec(4, 4, vals) };
        let back = delta_gamma_solve(&cfg, &delta_gamma_apply(&cfg, &f).unwrap()).unwrap();
        prop_assert!((back.coeffs - f.coeffs).amax() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mhd_structure(seed in any::<u64>()) {
        let m = mhd8();
        let mut r = rng(seed);
        let (nu, beta) = mhd_state(&mut r, m);
        let a = (mhd_vec(&mut r, m, 1.0), mhd_vec(&mut r, m, 1.0));
        let b = (mhd_vec(&mut r, m, 1.0), mhd_vec(&mut r, m, 1.0));
        check_structure(&m.system, &nu, (&a.0, &a.1), (&b.0, &b.1));
        field_checks(&m.system, &nu, &beta);
        fd_checks(&m.system, &nu, &beta, &mhd_vec(&mut r, m, 0.2), &mhd_vec(&mut r, m, 0.2));
    }

    #[test]
    fn mhd_enstrophy_and_skew_advection(seed in any::<u64>()) {
        let m = mhd8();
        let mut r = rng(seed);
        let (nu, beta) = mhd_state(&mut r, m);
        let (nu_dot, _) = m.system.ida_field_z(&nu, &beta);
        let grad = m.system.algebra.d.casimir_gradient("enstrophy", &nu).unwrap();
        prop_assert!(grad.dot(&nu_dot).abs() <= 1e-12 * grad.norm() * nu_dot.norm());

        let psi = mhd_vec(&mut r, m, 1.0);
        let om = mhd_vec(&mut r, m, 1.0);
        let adv = advect(&m.basis, &psi, &om);
        let skew = m.basis.mass_apply(&om).dot(&adv);
        prop_assert!(skew.abs() <= 1e-12 * m.l2_norm(&om) * m.l2_norm(&adv));
    }
}
