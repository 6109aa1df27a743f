//! Shear-flow stabilisation run and its uncontrolled counterpart.

use super::{build_mhd_system, stability_margin, ChannelConfig, FluidAlgebra, MhdModel};
use crate::algebra::LieAlgebra;
use crate::algebra::concat;
use crate::closed_loop::Chart;
use crate::dynamics::{integrate, IntegratorConfig, Monitor};
use crate::error::Result;
use crate::kaluza::free_lp_field;
use crate::report::{ScenarioReport, Verdict};
use crate::Vector;

/// Perturbation placement: amplitude on sine mode `(m, n)` of the vorticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearRun {
    pub amplitude: f64,
    pub mode: (usize, usize),
    /// Also integrate the free system at `γ = 0` for comparison.
    pub uncontrolled: bool,
}

impl ShearRun {
    pub fn new(amplitude: f64) -> Self {
        Self {
            amplitude,
            mode: (1, 1),
            uncontrolled: true,
        }
    }
}

/// Sampled increases of `series` larger than `tol`.
fn increases(series: &[f64], tol: f64) -> (usize, f64) {
    let worst = series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    (series.windows(2).filter(|w| w[1] - w[0] > tol).count(), worst)
}

fn max_of(series: &[f64]) -> f64 {
    series.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn relative_drift(series: &[f64]) -> f64 {
    let first = series[0];
    series
        .iter()
        .map(|v| (v - first).abs())
        .fold(0.0, f64::max)
        / first.abs().max(f64::MIN_POSITIVE)
}

/// Free-flow perturbation energy growth, `max_t E'(t) / E'(0)`, at `γ = 0`.
fn uncontrolled_growth(cfg: &ChannelConfig, run: &ShearRun, config: &IntegratorConfig) -> Result<(f64, f64, bool)> {
    let model = build_mhd_system(&cfg.with_gamma(0.0), -1.0)?;
    let b = &model.basis;
    let n = b.dim();
    let nu_e = model.equilibrium().nu(b);
    let mut nu0 = nu_e.clone();
    nu0[b.index(run.mode.0, run.mode.1)] += run.amplitude;
    let sys = &model.system;
    let field = |y: &Vector| {
        let (nu, alpha) = (y.rows(0, n).into_owned(), y.rows(n, n).into_owned());
        let (a, c) = free_lp_field(&sys.kk, &sys.algebra, sys.gains.orientation, &nu, &alpha)
            .expect("dimensions fixed by construction");
        concat(&a, &c)
    };
    let energy = |y: &Vector| 0.5 * model.h1_norm_sq(&(y.rows(0, n).into_owned() - &nu_e));
    let monitors = [Monitor::new("perturbation_energy", energy)];
    let cfg_int = IntegratorConfig {
        blowup: config.blowup.or(Some(1e6)),
        ..*config
    };
    let traj = integrate(field, &concat(&nu0, &Vector::zeros(n)), &cfg_int, &monitors)?;
    let e = traj.monitor("perturbation_energy").unwrap();
    let e0 = e[0].max(f64::MIN_POSITIVE);
    Ok((max_of(e) / e0, e[e.len() - 1] / e0, traj.diverged))
}

/// The controlled run at `cfg.gamma` with `s = −1`, plus the free `γ = 0`
/// run when requested.
pub fn scenario_shear(cfg: &ChannelConfig, run: &ShearRun, config: &IntegratorConfig) -> Result<ScenarioReport> {
    let model: MhdModel = build_mhd_system(cfg, -1.0)?;
    let b = model.basis.clone();
    let n = b.dim();
    let sys = &model.system;
    let z_e = model.z_e();
    let nu_e = z_e.rows(0, n).into_owned();
    let mut z0 = z_e.clone();
    z0[b.index(run.mode.0, run.mode.1)] += run.amplitude;
    let margin = stability_margin(cfg);

    let nu_of = |z: &Vector| z.rows(0, n).into_owned();
    let beta_of = |z: &Vector| z.rows(n, n).into_owned();
    let fluid = FluidAlgebra::new(b.clone());
    let monitors = [
        Monitor::new("l_c", |z: &Vector| model.l_c(z).expect("dims")),
        Monitor::new("enstrophy", |z: &Vector| fluid.casimir("enstrophy", &nu_of(z)).unwrap()),
        Monitor::new("mean_vorticity", |z: &Vector| fluid.mean_vorticity(&nu_of(z))),
        Monitor::new("n_norm", |z: &Vector| model.l2_norm(&sys.n_map(&nu_of(z)))),
        Monitor::new("b_norm", |z: &Vector| model.l2_norm(&beta_of(z))),
        Monitor::new("delta_omega", |z: &Vector| model.l2_norm(&(nu_of(z) - &nu_e))),
        Monitor::new("delta_h1", |z: &Vector| model.h1_norm_sq(&(nu_of(z) - &nu_e)).sqrt()),
        Monitor::new("rate", |z: &Vector| sys.dissipation_rate(&nu_of(z), &beta_of(z))),
    ];
    let cfg_int = IntegratorConfig {
        blowup: config.blowup.or(Some(1e6)),
        ..*config
    };
    let mut traj = integrate(|z: &Vector| sys.z_field_flat(z), &z0, &cfg_int, &monitors)?;
    traj.chart = Some(Chart::Z);

    let l_c = traj.monitor("l_c").unwrap();
    let scale = l_c.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let (violations, worst) = increases(l_c, 1e-10 * scale);
    let enstrophy_drift = relative_drift(traj.monitor("enstrophy").unwrap());
    let mean = traj.monitor("mean_vorticity").unwrap();
    let mean_drift = mean.iter().map(|v| (v - mean[0]).abs()).fold(0.0, f64::max);
    let last = |name: &str| *traj.monitor(name).unwrap().last().unwrap();
    let (n_t, b_t) = (last("n_norm"), last("b_norm"));
    let dw = traj.monitor("delta_omega").unwrap();

    let mut rep = ScenarioReport::new("mhd");
    for (k, v) in [
        ("L", cfg.length),
        ("W", cfg.width),
        ("gamma", cfg.gamma),
        ("e", cfg.charge),
        ("Nx", cfg.nx as f64),
        ("Ny", cfg.ny as f64),
        ("dealias", if cfg.dealias { 1.0 } else { 0.0 }),
        ("s", -1.0),
        ("perturbation", run.amplitude),
        ("mode_m", run.mode.0 as f64),
        ("mode_n", run.mode.1 as f64),
        ("h", config.step),
        ("T", config.horizon),
    ] {
        rep.param(k, v);
    }
    rep.metric("stability_margin", margin.controlled);
    rep.metric("uncontrolled_margin", margin.uncontrolled);
    rep.metric("lambda1_gamma", super::lambda1_gamma(cfg));
    rep.metric("l_c_initial", l_c[0]);
    rep.metric("l_c_terminal", l_c[l_c.len() - 1]);
    rep.metric("l_c_violations", violations as f64);
    rep.metric("l_c_max_increase", worst);
    rep.metric("enstrophy_drift", enstrophy_drift);
    rep.metric("mean_vorticity_drift", mean_drift);
    rep.metric("terminal_n_norm", n_t);
    rep.metric("terminal_b_norm", b_t);
    rep.metric("max_b_norm", max_of(traj.monitor("b_norm").unwrap()));
    rep.metric("delta_omega_initial", dw[0]);
    rep.metric("delta_omega_max", max_of(dw));
    rep.metric("delta_omega_terminal", dw[dw.len() - 1]);
    rep.metric("delta_h1_max", max_of(traj.monitor("delta_h1").unwrap()));
    rep.notes
        .push("perturbation norms: L2 of the vorticity and the Laplacian-weighted H1 norm of the stream function".into());

    if run.uncontrolled {
        let (growth, terminal, diverged) = uncontrolled_growth(cfg, run, config)?;
        rep.metric("uncontrolled_energy_growth", growth);
        rep.metric("uncontrolled_energy_terminal_ratio", terminal);
        rep.metric("uncontrolled_diverged", if diverged { 1.0 } else { 0.0 });
        rep.verdicts.push(Verdict::above(
            "uncontrolled-growth",
            growth,
            2.0,
            "max perturbation energy ratio of the free flow at gamma = 0",
        ));
    }
    rep.verdicts.push(Verdict::below(
        "no-divergence",
        if traj.diverged { 1.0 } else { 0.0 },
        0.5,
        "state norm stayed below 1e6",
    ));
    rep.verdicts.push(Verdict::above(
        "lyapunov-certificate",
        margin.controlled,
        0.0,
        "1/((1-gamma)L^2) + 1/W^2 - 1",
    ));
    rep.verdicts.push(Verdict::below(
        "lyapunov-monotone",
        violations as f64,
        0.5,
        "sampled increases of L_C above 1e-10 of its scale",
    ));
    rep.verdicts.push(Verdict::below(
        "enstrophy-drift",
        enstrophy_drift,
        1e-6,
        "relative drift of the enstrophy of nu",
    ));
    rep.verdicts.push(Verdict::below("n-terminal", n_t, 1e-4, "L2 norm of N(nu(T))"));
    rep.verdicts.push(Verdict::below("b-terminal", b_t, 1e-4, "L2 norm of b(T)"));
    if margin.controlled <= 0.0 {
        rep.notes.push(format!(
            "stability margin {} is not positive: no Lyapunov certificate",
            margin.controlled
        ));
    }
    rep.trajectories.push(("controlled".into(), traj));
    Ok(rep)
}
