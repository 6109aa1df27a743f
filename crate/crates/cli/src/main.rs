//! `lpcontrol`: scenario runner, verification suite and threshold sweeps.
//!
//! Exit codes: 0 when every verdict passes, 1 on the first failed verdict
//! (named on stderr), 2 on bad configuration.

mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use lpcontrol::dynamics::{IntegratorConfig, Trajectory};
use lpcontrol::mhd2d::{scenario_shear, ChannelConfig, ShearRun};
use lpcontrol::satellite::{scenario_middle_axis, SatelliteParams};
use lpcontrol::verify::{self, SweepPoint};
use lpcontrol::{analysis, ScenarioReport, Verdict};

use output::{num, Table};
use settings::{config_error, parse_pair, ConfigError, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    Satellite,
    Mhd,
    Verify,
    Sweep,
}

impl Scenario {
    fn name(self) -> &'static str {
        match self {
            Scenario::Satellite => "satellite",
            Scenario::Mhd => "mhd",
            Scenario::Verify => "verify",
            Scenario::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lpcontrol", version, about = "Lie-Poisson feedback stabilization scenarios")]
struct Cli {
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for the randomized checks; required by `verify`.
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_pair)]
    set: Vec<(String, String)>,
    /// Flat key=value file applied before the overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write SVG plots of the monitor series.
    #[arg(long)]
    plot: bool,
}

#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    scenario: &'static str,
    seed: Option<u64>,
    settings: &'a [(String, String)],
    passed: bool,
    first_failure: Option<&'a str>,
    result: T,
}

struct Outcome {
    verdicts: Vec<Verdict>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for v in &outcome.verdicts {
                println!(
                    "{} {} = {} (threshold {}; {})",
                    if v.passed { "ok  " } else { "FAIL" },
                    v.criterion,
                    num(v.value),
                    num(v.threshold),
                    v.detail
                );
            }
            match outcome.verdicts.iter().find(|v| !v.passed) {
                None => ExitCode::SUCCESS,
                Some(v) => {
                    eprintln!("lpcontrol: {} failed at criterion `{}`: {}", cli.scenario.name(), v.criterion, v.detail);
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("lpcontrol: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(
                c.downcast_ref::<lpcontrol::Error>(),
                Some(lpcontrol::Error::InvalidConfig(_) | lpcontrol::Error::NotInvertible(_))
            )
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut s = Settings::load(cli.config.as_deref(), &cli.set)?;
    if cli.scenario == Scenario::Verify && cli.seed.is_none() {
        return Err(config_error("--seed is required for the verify scenario"));
    }
    let job = match cli.scenario {
        Scenario::Satellite => Job::Satellite(satellite_settings(&mut s)?),
        Scenario::Mhd => Job::Mhd(mhd_settings(&mut s)?),
        Scenario::Verify => Job::Verify,
        Scenario::Sweep => Job::Sweep(sweep_settings(&mut s)?),
    };
    s.finish()?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let ctx = Artifacts {
        cli,
        settings: s.resolved(),
    };
    match job {
        Job::Satellite((params, perturbation, config)) => {
            let rep = scenario_middle_axis(&params, perturbation, &config)?;
            let names = ["nu1", "nu2", "nu3", "beta"].map(String::from).to_vec();
            ctx.write_scenario(&rep, |_| names.clone())
        }
        Job::Mhd((cfg, run, config)) => {
            let rep = scenario_shear(&cfg, &run, &config)?;
            ctx.write_scenario(&rep, |dim| {
                let n = dim / 2;
                (0..n).map(|i| format!("nu_{i}")).chain((0..n).map(|i| format!("beta_{i}"))).collect()
            })
        }
        Job::Verify => ctx.write_verify(verify::structural_run(cli.seed.expect("checked above"))?),
        Job::Sweep(sw) => ctx.write_sweep(&sw),
    }
}

enum Job {
    Satellite((SatelliteParams, f64, IntegratorConfig)),
    Mhd((ChannelConfig, ShearRun, IntegratorConfig)),
    Verify,
    Sweep(Sweep),
}

fn integrator(s: &mut Settings, h: f64, horizon: f64, stride: usize) -> Result<IntegratorConfig> {
    let config = IntegratorConfig::rk4(s.get("h", h)?, s.get("T", horizon)?).with_stride(s.get("stride", stride)?);
    config.validate()?;
    Ok(config)
}

fn satellite_settings(s: &mut Settings) -> Result<(SatelliteParams, f64, IntegratorConfig)> {
    let d = SatelliteParams::default();
    let params = SatelliteParams {
        lambda1: s.get("lambda1", d.lambda1)?,
        lambda2: s.get("lambda2", d.lambda2)?,
        carrier_i3: s.get("I3", d.carrier_i3)?,
        rotor_i3: s.get("i3", d.rotor_i3)?,
        k: s.get("k", d.k)?,
    };
    params.validate()?;
    let perturbation = s.get("perturbation", 1e-2)?;
    Ok((params, perturbation, integrator(s, 1e-3, 200.0, 100)?))
}

/// Channel keys; `gamma` is left out when the sweep supplies it.
fn channel_settings(s: &mut Settings, d: ChannelConfig, with_gamma: bool) -> Result<ChannelConfig> {
    let cfg = ChannelConfig {
        length: s.get("L", d.length)?,
        width: s.get("W", d.width)?,
        gamma: if with_gamma { s.get("gamma", d.gamma)? } else { d.gamma },
        charge: s.get("e", d.charge)?,
        nx: s.get("Nx", d.nx)?,
        ny: s.get("Ny", d.ny)?,
        dealias: s.get("dealias", d.dealias)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn mhd_settings(s: &mut Settings) -> Result<(ChannelConfig, ShearRun, IntegratorConfig)> {
    let cfg = channel_settings(s, ChannelConfig::default(), true)?;
    let d = ShearRun::new(1e-2);
    let run = ShearRun {
        amplitude: s.get("perturbation", d.amplitude)?,
        mode: (s.get("mode_m", d.mode.0)?, s.get("mode_n", d.mode.1)?),
        uncontrolled: s.get("uncontrolled", d.uncontrolled)?,
    };
    if !(1..=cfg.nx).contains(&run.mode.0) || !(1..=cfg.ny).contains(&run.mode.1) {
        return Err(config_error(format!(
            "perturbed mode ({}, {}) outside 1..={} x 1..={}",
            run.mode.0, run.mode.1, cfg.nx, cfg.ny
        )));
    }
    Ok((cfg, run, integrator(s, 1e-3, 50.0, 100)?))
}

enum SweepKind {
    Gain(SatelliteParams, f64),
    Gamma(ChannelConfig),
}

struct Sweep {
    kind: SweepKind,
    values: Vec<f64>,
    step: f64,
}

fn sweep_settings(s: &mut Settings) -> Result<Sweep> {
    let parameter: String = s.get("parameter", "k".to_string())?;
    let (kind, lo, hi, step) = match parameter.as_str() {
        "k" => {
            let d = SatelliteParams::default();
            let params = SatelliteParams {
                lambda1: s.get("lambda1", d.lambda1)?,
                lambda2: s.get("lambda2", d.lambda2)?,
                carrier_i3: s.get("I3", d.carrier_i3)?,
                rotor_i3: s.get("i3", d.rotor_i3)?,
                k: d.k,
            };
            params.validate()?;
            let rho2 = s.get("rho2", 1.0)?;
            (SweepKind::Gain(params, rho2), s.get("lo", 0.0)?, s.get("hi", 3.0)?, s.get("step", 0.1)?)
        }
        "gamma" => {
            let cfg = channel_settings(s, ChannelConfig::default().with_modes(4, 4), false)?;
            (SweepKind::Gamma(cfg), s.get("lo", 0.0)?, s.get("hi", 0.9)?, s.get("step", 0.1)?)
        }
        other => return Err(config_error(format!("sweep parameter must be k or gamma, got `{other}`"))),
    };
    let values = verify::grid(lo, hi, step)?;
    Ok(Sweep { kind, values, step })
}

/// `γ` at which the controlled margin vanishes, when it does inside `[0, 1)`.
fn gamma_root(cfg: &ChannelConfig) -> Option<f64> {
    let rest = 1.0 - 1.0 / cfg.width.powi(2);
    let root = 1.0 - 1.0 / (cfg.length.powi(2) * rest);
    (rest > 0.0 && (0.0..1.0).contains(&root)).then_some(root)
}

/// Where and how a run writes its files.
struct Artifacts<'a> {
    cli: &'a Cli,
    settings: &'a [(String, String)],
}

impl Artifacts<'_> {
    fn path(&self, file: &str) -> PathBuf {
        self.cli.out.join(file)
    }

    fn provenance(&self) -> Vec<String> {
        let mut out = vec![
            format!("lpcontrol {}", env!("CARGO_PKG_VERSION")),
            format!("scenario={}", self.cli.scenario.name()),
            match self.cli.seed {
                Some(seed) => format!("seed={seed}"),
                None => "seed=none".to_string(),
            },
        ];
        out.extend(self.settings.iter().map(|(k, v)| format!("{k}={v}")));
        out
    }

    fn record<'b, T: Serialize>(&'b self, verdicts: &'b [Verdict], result: T) -> RunRecord<'b, T> {
        let first = verdicts.iter().find(|v| !v.passed).map(|v| v.criterion.as_str());
        RunRecord {
            tool: "lpcontrol",
            version: env!("CARGO_PKG_VERSION"),
            scenario: self.cli.scenario.name(),
            seed: self.cli.seed,
            settings: self.settings,
            passed: first.is_none(),
            first_failure: first,
            result,
        }
    }

    fn write_scenario(&self, rep: &ScenarioReport, coords: impl Fn(usize) -> Vec<String>) -> Result<Outcome> {
        let name = self.cli.scenario.name();
        for (label, traj) in &rep.trajectories {
            let file = self.path(&format!("{name}_{label}.csv"));
            let table = trajectory_table(self.provenance(), traj, coords(traj.states[0].len()));
            output::write_csv(&file, &table)?;
            if self.cli.plot {
                let monitors: Vec<String> = traj.monitors.iter().map(|(n, _)| n.clone()).collect();
                output::svg_from_csv(&file, &self.path(&format!("{name}_{label}.svg")), &monitors)?;
            }
        }
        for note in &rep.notes {
            println!("note: {note}");
        }
        output::write_json(&self.path(&format!("{name}.json")), &self.record(&rep.verdicts, rep))?;
        Ok(Outcome {
            verdicts: rep.verdicts.clone(),
        })
    }

    fn write_verify(&self, verdicts: Vec<Verdict>) -> Result<Outcome> {
        let table = Table {
            provenance: self.provenance(),
            columns: ["criterion", "passed", "value", "threshold", "detail"].map(String::from).to_vec(),
            rows: verdicts
                .iter()
                .map(|v| vec![v.criterion.clone(), v.passed.to_string(), num(v.value), num(v.threshold), v.detail.clone()])
                .collect(),
        };
        output::write_csv(&self.path("verify.csv"), &table)?;
        output::write_json(&self.path("verify.json"), &self.record(&verdicts, &verdicts))?;
        Ok(Outcome { verdicts })
    }

    fn write_sweep(&self, sw: &Sweep) -> Result<Outcome> {
        #[derive(Serialize)]
        struct SweepResult<'a> {
            parameter: &'a str,
            analytic: Option<f64>,
            points: &'a [SweepPoint],
        }
        let (parameter, points, verdicts, analytic) = match &sw.kind {
            SweepKind::Gain(params, rho2) => {
                let points = verify::k_sweep(params, &sw.values, *rho2)?;
                let k_star = analysis::gain_threshold_satellite(params);
                let v = vec![verify::bracket_verdict("k-flip", verify::locate_flip(&points), k_star, sw.step)];
                ("k", points, v, Some(k_star))
            }
            SweepKind::Gamma(cfg) => {
                let points = verify::gamma_sweep(cfg, &sw.values)?;
                let root = gamma_root(cfg);
                let v = match root {
                    Some(g) => vec![
                        verify::bracket_verdict("gamma-margin-root", verify::locate_margin_root(&points), g, sw.step),
                        verify::bracket_verdict("gamma-definiteness-flip", verify::locate_flip(&points), g, sw.step),
                    ],
                    None => vec![Verdict::below(
                        "gamma-no-root",
                        if verify::locate_margin_root(&points).is_some() { 1.0 } else { 0.0 },
                        0.5,
                        "closed-form margin has no root in [0, 1); the sweep must not show one",
                    )],
                };
                ("gamma", points, v, root)
            }
        };
        let mut provenance = self.provenance();
        if let Some(a) = analytic {
            provenance.push(format!("analytic={}", num(a)));
        }
        let table = Table {
            provenance,
            columns: [parameter, "margin", "classification", "certified"].map(String::from).to_vec(),
            rows: points
                .iter()
                .map(|p| vec![num(p.value), num(p.margin), format!("{:?}", p.classification), p.certified.to_string()])
                .collect(),
        };
        let csv_path = self.path(&format!("sweep_{parameter}.csv"));
        output::write_csv(&csv_path, &table)?;
        if self.cli.plot {
            output::svg_from_csv(&csv_path, &self.path(&format!("sweep_{parameter}.svg")), &["margin".to_string()])?;
        }
        let result = SweepResult {
            parameter,
            analytic,
            points: &points,
        };
        output::write_json(&self.path(&format!("sweep_{parameter}.json")), &self.record(&verdicts, result))?;
        Ok(Outcome { verdicts })
    }
}

fn trajectory_table(provenance: Vec<String>, traj: &Trajectory, coords: Vec<String>) -> Table {
    let mut columns = vec!["t".to_string()];
    columns.extend(coords);
    columns.extend(traj.monitors.iter().map(|(n, _)| n.clone()));
    let rows = (0..traj.len())
        .map(|i| {
            let mut row = vec![num(traj.times[i])];
            row.extend(traj.states[i].iter().map(|&x| num(x)));
            row.extend(traj.monitors.iter().map(|(_, series)| num(series[i])));
            row
        })
        .collect();
    Table { provenance, columns, rows }
}
