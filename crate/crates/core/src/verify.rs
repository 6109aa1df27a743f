//! Seeded structural and numerical checks of the closed loop, plus the
//! parameter sweeps that locate the stability thresholds.
//!
//! Every check returns [`Verdict`]s so that the command-line runner and the
//! acceptance suite report the same numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::concat;
use crate::analysis::{self, CasimirProfile, Definiteness};
use crate::closed_loop::ControlledSystem;
use crate::dynamics::rk4_step;
use crate::error::{Error, Result};
use crate::gains::{check_lp_conditions, ep_from_lp, ep_residuals, lp_from_ep, match_structure, EpData};
use crate::kaluza::KaluzaKlein;
use crate::mhd2d::{build_mhd_system, stability_margin, ChannelConfig, GalerkinOracle, MhdModel};
use crate::report::Verdict;
use crate::satellite::{self, SatelliteMode, SatelliteParams};
use crate::{Matrix, Vector};

pub const STRUCTURE_STATES: usize = 100;
pub const EP_INSTANCES: usize = 50;
pub const ORACLE_STATES: usize = 20;
pub const FD_STATES: usize = 50;
pub const FD_EPS: f64 = 1e-5;

/// Satellite start for the order study: far enough from the axis that the
/// chart discrepancy sits well above roundoff.
pub const ORDER_START: [f64; 4] = [4.8, 8.0, 4.0, 2.4];

/// Channel resolution used by the structural checks.
pub fn verify_channel() -> ChannelConfig {
    ChannelConfig::default().with_modes(8, 8)
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| scale * rng.random_range(-1.0..1.0))
}

fn uniform_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> Matrix {
    Matrix::from_fn(r, c, |_, _| scale * rng.random_range(-1.0..1.0))
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = uniform_matrix(rng, n, n, 1.0);
    a.transpose() * a + Matrix::identity(n, n) * (0.5 * n as f64)
}

fn random_kk(rng: &mut ChaCha8Rng, nd: usize, ng: usize) -> Result<KaluzaKlein> {
    let (mu0, i0) = (random_spd(rng, nd), random_spd(rng, ng));
    KaluzaKlein::new(mu0, i0, uniform_matrix(rng, ng, nd, 0.5))
}

/// Coefficients decaying with the mode index, background slot included.
fn channel_vector(rng: &mut ChaCha8Rng, m: &MhdModel, scale: f64) -> Vector {
    let ny = m.basis.ny;
    Vector::from_fn(m.basis.dim(), |i, _| {
        let decay = 1.0 / (1.0 + (i / ny) as f64 + (i % ny) as f64);
        scale * decay * rng.random_range(-1.0..1.0)
    })
}

fn channel_state(rng: &mut ChaCha8Rng, m: &MhdModel, scale: f64) -> (Vector, Vector) {
    let nu = m.equilibrium().nu(&m.basis) + channel_vector(rng, m, scale);
    (nu, channel_vector(rng, m, scale))
}

fn rel(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Skewness of `Π_C`, symmetry of `ℛ_C` (both relative to the pairing scale)
/// and `s⟨ℛ_C a, a⟩`, which must be non-negative.
pub fn structure_residuals(
    sys: &ControlledSystem,
    nu: &Vector,
    a: (&Vector, &Vector),
    b: (&Vector, &Vector),
) -> (f64, f64, f64) {
    let pair = |x: &(Vector, Vector), y: (&Vector, &Vector)| x.0.dot(y.0) + x.1.dot(y.1);
    let pa = sys.pi_c_apply(nu, a.0, a.1);
    let pb = sys.pi_c_apply(nu, b.0, b.1);
    let ra = sys.r_c_apply(nu, a.0, a.1);
    let rb = sys.r_c_apply(nu, b.0, b.1);
    let scale = (pair(&pa, a).abs() + pair(&pa, b).abs() + pair(&ra, b).abs()).max(1.0);
    let skew = (pair(&pa, b) + pair(&pb, a)).abs() / scale;
    let sym = (pair(&ra, b) - pair(&rb, a)).abs() / scale;
    (skew, sym, sys.s() * pair(&ra, a) / scale)
}

type Sample = (Vector, (Vector, Vector), (Vector, Vector));

fn structure_verdicts(label: &str, sys: &ControlledSystem, samples: &[Sample]) -> Vec<Verdict> {
    let (mut skew, mut sym, mut sign) = (0.0f64, 0.0f64, f64::INFINITY);
    for (nu, a, b) in samples {
        let (k, y, s) = structure_residuals(sys, nu, (&a.0, &a.1), (&b.0, &b.1));
        skew = skew.max(k);
        sym = sym.max(y);
        sign = sign.min(s);
    }
    vec![
        Verdict::below(&format!("{label}-pi-skew"), skew, 1e-12, "max relative |<Pi a,b> + <Pi b,a>|"),
        Verdict::below(&format!("{label}-r-symmetry"), sym, 1e-12, "max relative |<R a,b> - <R b,a>|"),
        Verdict::above(&format!("{label}-r-semidefinite"), sign, -1e-12, "min relative s<R a,a>"),
    ]
}

/// Structure maps on random states of the satellite and the channel model,
/// the matching conditions for the matched satellite gains, and agreement
/// of the two local forms of the matching conditions on random instances.
pub fn structural_suite(seed: u64, channel: &MhdModel) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sat = satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0)?;
    let sat_samples: Vec<Sample> = (0..STRUCTURE_STATES)
        .map(|_| {
            let nu = uniform(&mut rng, 3, 1.0);
            let a = (uniform(&mut rng, 3, 1.0), uniform(&mut rng, 1, 1.0));
            let b = (uniform(&mut rng, 3, 1.0), uniform(&mut rng, 1, 1.0));
            (nu, a, b)
        })
        .collect();
    let ch_samples: Vec<Sample> = (0..STRUCTURE_STATES)
        .map(|_| {
            let (nu, _) = channel_state(&mut rng, channel, 0.2);
            let a = (channel_vector(&mut rng, channel, 1.0), channel_vector(&mut rng, channel, 1.0));
            let b = (channel_vector(&mut rng, channel, 1.0), channel_vector(&mut rng, channel, 1.0));
            (nu, a, b)
        })
        .collect();
    let mut out = structure_verdicts("satellite", &sat, &sat_samples);
    out.extend(structure_verdicts("mhd", &channel.system, &ch_samples));

    let matched = satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::Matched, 1.0)?;
    let ms = match_structure(&matched.kk, &matched.gains)?;
    let (lp1, lp2) = check_lp_conditions(&matched.kk, &ms);
    out.push(Verdict::below("satellite-lp1", lp1, 1e-10, "|I_C A_C - I0 A0|"));
    out.push(Verdict::below("satellite-lp2", lp2, 1e-10, "|mu_C + A_C* I_C A_C - mu0 - A0* I0 A0|"));

    let mut disagreements = 0usize;
    for i in 0..EP_INSTANCES {
        let (nd, ng) = (1 + i % 6, 1 + i % 3);
        let kk = random_kk(&mut rng, nd, ng)?;
        let rho = random_spd(&mut rng, ng);
        let sigma_up = kk.i0_inv.to_dense() - rho.clone().try_inverse().ok_or(Error::NotInvertible("rho"))?;
        let tau = -&sigma_up * kk.i0.to_dense() * kk.a0.to_dense();
        let good = lp_from_ep(&kk, &EpData { tau, sigma_up, rho })?;
        let mut bad = good.clone();
        bad.a_c += uniform_matrix(&mut rng, ng, nd, 0.1);
        for (ms, should_hold) in [(good, true), (bad, false)] {
            let (lp1, lp2) = check_lp_conditions(&kk, &ms);
            let (ep1, ep2) = ep_residuals(&kk, &ep_from_lp(&kk, &ms)?)?;
            let lp_holds = lp1.max(lp2) < 1e-10;
            let ep_holds = ep1.max(ep2) < 1e-10;
            if lp_holds != ep_holds || lp_holds != should_hold {
                disagreements += 1;
            }
        }
    }
    out.push(Verdict::below(
        "ep-lp-equivalence",
        disagreements as f64,
        0.5,
        "instances where the two residual pairs disagree",
    ));
    Ok(out)
}

/// `sup_t ‖Φ(x_h(t)) − z_h(t)‖∞` for RK4 runs of the two charts from the same start.
pub fn chart_discrepancy(sys: &ControlledSystem, z0: &Vector, h: f64, horizon: f64) -> f64 {
    let nd = sys.dim_d();
    let (nu0, beta0) = (z0.rows(0, nd).into_owned(), z0.rows(nd, z0.len() - nd).into_owned());
    let mut x = concat(&nu0, &sys.phi_inverse(&nu0, &beta0));
    let mut z = z0.clone();
    let zf = |y: &Vector| sys.z_field_flat(y);
    let xf = |y: &Vector| sys.x_field_flat(y);
    let mut worst = 0.0f64;
    for _ in 0..(horizon / h).round() as usize {
        x = rk4_step(&xf, &x, h);
        z = rk4_step(&zf, &z, h);
        let nu = x.rows(0, nd).into_owned();
        let mapped = concat(&nu, &sys.phi_forward(&nu, &x.rows(nd, x.len() - nd).into_owned()));
        worst = worst.max((mapped - &z).amax());
    }
    worst
}

/// Chart equivalence on the satellite loop: the discrepancy from the default
/// perturbed start, and its reduction when the step is halved.
pub fn chart_suite() -> Result<Vec<Verdict>> {
    let sys = satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0)?;
    let (h, horizon) = (1e-3, 10.0);
    let start = chart_discrepancy(&sys, &satellite::perturbed_state(1e-2), h, horizon);
    let z0 = Vector::from_row_slice(&ORDER_START);
    let ratio = chart_discrepancy(&sys, &z0, h, horizon) / chart_discrepancy(&sys, &z0, h / 2.0, horizon);
    Ok(vec![
        Verdict::below("chart-sup-error", start, 1e-6, "perturbation 1e-2, h = 1e-3, T = 10"),
        Verdict::below(
            "chart-halving-ratio",
            (ratio / 16.0 - 1.0).abs(),
            0.2,
            &format!("|ratio/16 - 1| for ratio {ratio:.4} at h = 1e-3 vs 5e-4"),
        ),
    ])
}

/// Central-difference rate of `g_C` over one RK4 step in each direction, and
/// its relative mismatch with the predicted dissipation rate.
pub fn rate_mismatch(sys: &ControlledSystem, z: &Vector, h: f64) -> f64 {
    let nd = sys.dim_d();
    let field = |y: &Vector| sys.z_field_flat(y);
    let g = |y: &Vector| sys.g_c_eval(&y.rows(0, nd).into_owned(), &y.rows(nd, y.len() - nd).into_owned());
    let fd = (g(&rk4_step(&field, z, h)) - g(&rk4_step(&field, z, -h))) / (2.0 * h);
    let rate = sys.dissipation_rate(&z.rows(0, nd).into_owned(), &z.rows(nd, z.len() - nd).into_owned());
    (fd - rate).abs() / rate.abs().max(f64::MIN_POSITIVE)
}

fn rate_verdicts(label: &str, sys: &ControlledSystem, states: &[Vector]) -> Vec<Verdict> {
    const FIT_STEP: f64 = 2e-2;
    let mut order = f64::INFINITY;
    let mut mismatch = 0.0f64;
    for z in states {
        let (a, b) = (rate_mismatch(sys, z, FIT_STEP), rate_mismatch(sys, z, FIT_STEP / 2.0));
        let p = (a / b).log2();
        if (p - 2.0).abs() > (order - 2.0).abs() || order.is_infinite() {
            order = p;
        }
        mismatch = mismatch.max(rate_mismatch(sys, z, 1e-3));
    }
    vec![
        Verdict::below(
            &format!("{label}-rate-order"),
            (order - 2.0).abs(),
            0.3,
            &format!("worst fitted order {order:.3} from steps 2e-2 and 1e-2"),
        ),
        Verdict::below(&format!("{label}-rate-mismatch"), mismatch, 1e-5, "relative mismatch at h = 1e-3"),
    ]
}

/// The rate identity on both systems along RK4 steps.
pub fn rate_suite(seed: u64, channel: &MhdModel) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sat = satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0)?;
    let sat_states: Vec<Vector> = (0..5)
        .map(|_| satellite::equilibrium() + uniform(&mut rng, 4, 0.3))
        .collect();
    let ch_states: Vec<Vector> = (0..3)
        .map(|_| {
            let (nu, beta) = channel_state(&mut rng, channel, 0.2);
            concat(&nu, &beta)
        })
        .collect();
    let mut out = rate_verdicts("satellite", &sat, &sat_states);
    out.extend(rate_verdicts("mhd", &channel.system, &ch_states));
    Ok(out)
}

/// Fast channel field against the quadrature-assembled operators.
pub fn oracle_suite(seed: u64, channel: &MhdModel, oracle: &GalerkinOracle) -> Vec<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..ORACLE_STATES)
        .map(|_| {
            let (nu, beta) = channel_state(&mut rng, channel, 0.2);
            let (a, b) = channel.system.ida_field_z(&nu, &beta);
            let (ao, bo) = oracle.closed_loop_field(&nu, &beta);
            rel(&concat(&a, &b), &concat(&ao, &bo))
        })
        .fold(0.0, f64::max);
    vec![Verdict::below("oracle-field", worst, 1e-9, "relative error of the z-chart field")]
}

fn fd_worst(sys: &ControlledSystem, states: &[(Vector, Vector)]) -> (f64, f64) {
    let (nd, ng) = (sys.dim_d(), sys.dim_g());
    let unit = |n: usize, i: usize| {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        e
    };
    states
        .par_iter()
        .map(|(nu, beta)| {
            let mut dn_fd = Matrix::zeros(ng, nd);
            let mut dn = Matrix::zeros(ng, nd);
            let mut grad_fd = Vector::zeros(nd + ng);
            for i in 0..nd {
                let e = unit(nd, i) * FD_EPS;
                let col = (sys.n_map(&(nu + &e)) - sys.n_map(&(nu - &e))) / (2.0 * FD_EPS);
                dn_fd.set_column(i, &col);
                dn.set_column(i, &sys.dn_apply(nu, &unit(nd, i)));
                grad_fd[i] = (sys.g_c_eval(&(nu + &e), beta) - sys.g_c_eval(&(nu - &e), beta)) / (2.0 * FD_EPS);
            }
            for j in 0..ng {
                let e = unit(ng, j) * FD_EPS;
                grad_fd[nd + j] = (sys.g_c_eval(nu, &(beta + &e)) - sys.g_c_eval(nu, &(beta - &e))) / (2.0 * FD_EPS);
            }
            let (gv, gb) = sys.g_c_grad(nu, beta);
            let dn_err = (&dn_fd - &dn).norm() / dn.norm().max(f64::MIN_POSITIVE);
            (dn_err, rel(&grad_fd, &concat(&gv, &gb)))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

/// `dN` and `∇g_C` against central differences, column by column.
pub fn derivative_suite(seed: u64, channel: &MhdModel) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sat = satellite::build_satellite(&SatelliteParams::default(), SatelliteMode::DoubleBracket, 1.0)?;
    let sat_states: Vec<(Vector, Vector)> = (0..FD_STATES)
        .map(|_| (uniform(&mut rng, 3, 1.0), uniform(&mut rng, 1, 1.0)))
        .collect();
    let ch_states: Vec<(Vector, Vector)> = (0..FD_STATES).map(|_| channel_state(&mut rng, channel, 0.2)).collect();
    let mut out = Vec::new();
    for (label, sys, states) in [("satellite", &sat, &sat_states), ("mhd", &channel.system, &ch_states)] {
        let (dn, grad) = fd_worst(sys, states);
        out.push(Verdict::below(&format!("{label}-dn-fd"), dn, 1e-6, "relative Jacobian error at eps = 1e-5"));
        out.push(Verdict::below(&format!("{label}-grad-fd"), grad, 1e-6, "relative gradient error at eps = 1e-5"));
    }
    Ok(out)
}

/// A row of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Signed distance to losing definiteness of the second variation.
    pub margin: f64,
    pub classification: Definiteness,
    pub certified: bool,
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Grid for `[lo, hi]` at spacing `step`.
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    Ok(linspace(lo, hi, ((hi - lo) / step).round() as usize + 1))
}

fn nonempty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        Err(Error::InvalidConfig("empty sweep grid".into()))
    } else {
        Ok(())
    }
}

/// Second variation of the satellite energy-Casimir function at `(e₂, 0)` over `k`.
pub fn k_sweep(params: &SatelliteParams, values: &[f64], rho2: f64) -> Result<Vec<SweepPoint>> {
    nonempty(values)?;
    values
        .par_iter()
        .map(|&k| {
            let p = params.with_k(k);
            let sys = satellite::build_satellite(&p, SatelliteMode::DoubleBracket, 1.0)?;
            let profile = CasimirProfile::satellite(p.lambda2, rho2);
            let rep = analysis::second_variation(&sys, &profile, &satellite::equilibrium(), None)?;
            Ok(SweepPoint {
                value: k,
                margin: rep.margin,
                classification: rep.classification,
                certified: rep.classification == Definiteness::PositiveDefinite,
            })
        })
        .collect()
}

/// Columns spanning the `ν` directions Gram-orthogonal to the background
/// mode, followed by every `β` direction.
fn channel_variation_basis(m: &MhdModel) -> Matrix {
    let b = &m.basis;
    let n = b.dim();
    let bg = b.bg_index();
    let mut e_bg = Vector::zeros(n);
    e_bg[bg] = 1.0;
    let m_bg = b.mass_apply(&e_bg);
    let mut cols = Vec::with_capacity(2 * n - 1);
    for i in (0..n).filter(|&i| i != bg) {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v -= &e_bg * (m_bg[i] / m_bg[bg]);
        cols.push(concat(&v, &Vector::zeros(n)));
    }
    for i in 0..n {
        let mut v = Vector::zeros(2 * n);
        v[n + i] = 1.0;
        cols.push(v);
    }
    Matrix::from_columns(&cols)
}

/// Second variation of the channel energy-Casimir function at `(ν_e, 0)`
/// over `γ`, at the resolution of `cfg`. With `s = −1` certification means
/// negative definiteness; `margin` carries the analytic margin.
pub fn gamma_sweep(cfg: &ChannelConfig, values: &[f64]) -> Result<Vec<SweepPoint>> {
    nonempty(values)?;
    values
        .par_iter()
        .map(|&gamma| {
            let c = cfg.with_gamma(gamma);
            let m = build_mhd_system(&c, -1.0)?;
            let basis = channel_variation_basis(&m);
            let rep = analysis::second_variation(&m.system, &m.profile(), &m.z_e(), Some(&basis))?;
            Ok(SweepPoint {
                value: gamma,
                margin: stability_margin(&c).controlled,
                classification: rep.classification,
                certified: rep.classification == Definiteness::NegativeDefinite,
            })
        })
        .collect()
}

/// `[a, b]` where `a` is the last uncertified point and `b` the next point,
/// for the first transition from uncertified to certified.
pub fn locate_flip(points: &[SweepPoint]) -> Option<(f64, f64)> {
    points
        .windows(2)
        .find(|w| !w[0].certified && w[1].certified)
        .map(|w| (w[0].value, w[1].value))
}

/// `[a, b]` bracketing the first sign change of `margin` from `≤ 0` to `> 0`.
pub fn locate_margin_root(points: &[SweepPoint]) -> Option<(f64, f64)> {
    points
        .windows(2)
        .find(|w| w[0].margin <= 0.0 && w[1].margin > 0.0)
        .map(|w| (w[0].value, w[1].value))
}

/// Passes when `bracket` contains `target` and is at most one grid step wide.
pub fn bracket_verdict(name: &str, bracket: Option<(f64, f64)>, target: f64, step: f64) -> Verdict {
    let (value, detail) = match bracket {
        Some((a, b)) if a <= target && target <= b && b - a <= step * (1.0 + 1e-9) => {
            (0.0, format!("[{a}, {b}] contains {target}"))
        }
        Some((a, b)) => (1.0, format!("[{a}, {b}] misses {target}")),
        None => (1.0, "no transition on the grid".to_string()),
    };
    Verdict::below(name, value, 0.5, &detail)
}

/// Threshold crossings of both sweeps against the closed-form values.
pub fn threshold_suite() -> Result<Vec<Verdict>> {
    let params = SatelliteParams::default();
    let k_step = 0.1;
    let ks = k_sweep(&params, &grid(0.0, 3.0, k_step)?, 1.0)?;
    let k_star = analysis::gain_threshold_satellite(&params);
    let g_step = 0.1;
    let gs = gamma_sweep(&ChannelConfig::default().with_modes(4, 4), &grid(0.0, 0.9, g_step)?)?;
    let gamma_star = 1.0 - 1.0 / 3.0;
    Ok(vec![
        bracket_verdict("k-flip", locate_flip(&ks), k_star, k_step),
        bracket_verdict("gamma-margin-root", locate_margin_root(&gs), gamma_star, g_step),
        bracket_verdict("gamma-definiteness-flip", locate_flip(&gs), gamma_star, g_step),
    ])
}

/// The structural checks that need no long integration, under one seed.
pub fn structural_run(seed: u64) -> Result<Vec<Verdict>> {
    let channel = build_mhd_system(&verify_channel(), -1.0)?;
    let oracle = GalerkinOracle::new(&verify_channel())?;
    let mut out = structural_suite(seed, &channel)?;
    out.extend(chart_suite()?);
    out.extend(rate_suite(seed, &channel)?);
    out.extend(threshold_suite()?);
    out.extend(oracle_suite(seed, &channel, &oracle));
    out.extend(derivative_suite(seed, &channel)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = grid(0.0, 3.0, 0.1).unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[15], 1.5);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(k_sweep(&SatelliteParams::default(), &[], 1.0).is_err());
    }

    #[test]
    fn flip_location() {
        let pt = |value, certified| SweepPoint {
            value,
            margin: if certified { 1.0 } else { -1.0 },
            classification: Definiteness::Indefinite,
            certified,
        };
        let pts = [pt(0.0, false), pt(1.0, false), pt(2.0, true)];
        assert_eq!(locate_flip(&pts), Some((1.0, 2.0)));
        assert_eq!(locate_margin_root(&pts), Some((1.0, 2.0)));
        assert_eq!(locate_flip(&pts[..2]), None);
    }
}
