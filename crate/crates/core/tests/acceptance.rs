//! Acceptance criteria, one line per criterion.
//!
//! `cargo test -p lpcontrol --test acceptance` runs all eight; trailing
//! numbers (`-- 2 5`) select a subset.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lpcontrol::dynamics::IntegratorConfig;
use lpcontrol::mhd2d::{build_mhd_system, scenario_shear, ChannelConfig, GalerkinOracle, ShearRun};
use lpcontrol::satellite::{scenario_middle_axis, SatelliteParams};
use lpcontrol::verify::{self, verify_channel};
use lpcontrol::Verdict;

const SEED: u64 = 20_240_601;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Vec<Verdict>, lpcontrol::Error>,
}

fn structural() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let channel = build_mhd_system(&verify_channel(), -1.0)?;
    verify::structural_suite(SEED, &channel)
}

fn charts() -> Result<Vec<Verdict>, lpcontrol::Error> {
    verify::chart_suite()
}

fn rate() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let channel = build_mhd_system(&verify_channel(), -1.0)?;
    verify::rate_suite(SEED, &channel)
}

fn satellite() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let config = IntegratorConfig::rk4(1e-3, 200.0).with_stride(100);
    let params = SatelliteParams::default();
    let mut out = vec![Verdict::above(
        "k-above-threshold",
        params.k - lpcontrol::analysis::gain_threshold_satellite(&params),
        0.0,
        "k minus the gain threshold",
    )];
    let controlled = scenario_middle_axis(&params, 1e-2, &config)?;
    out.extend(controlled.verdicts);
    let free = scenario_middle_axis(&params.with_k(0.0), 1e-2, &config)?;
    out.push(Verdict::above(
        "k0-departure",
        free.metrics["max_axis_distance"],
        0.5,
        "max distance to the axis with k = 0",
    ));
    Ok(out)
}

fn thresholds() -> Result<Vec<Verdict>, lpcontrol::Error> {
    verify::threshold_suite()
}

fn channel_flow() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let config = IntegratorConfig::rk4(1e-3, 50.0).with_stride(100);
    let rep = scenario_shear(&ChannelConfig::default(), &ShearRun::new(1e-2), &config)?;
    let mut out = rep.verdicts;
    for key in ["terminal_n_norm", "terminal_b_norm", "max_b_norm", "delta_omega_max", "uncontrolled_energy_growth"] {
        out.push(Verdict::above(&format!("info:{key}"), rep.metrics[key], f64::NEG_INFINITY, "reported"));
    }
    Ok(out)
}

fn oracle() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let channel = build_mhd_system(&verify_channel(), -1.0)?;
    let oracle = GalerkinOracle::new(&verify_channel())?;
    Ok(verify::oracle_suite(SEED, &channel, &oracle))
}

fn derivatives() -> Result<Vec<Verdict>, lpcontrol::Error> {
    let channel = build_mhd_system(&verify_channel(), -1.0)?;
    verify::derivative_suite(SEED, &channel)
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "structure maps and matching conditions", budget: Some(Duration::from_secs(5)), run: structural },
        Criterion { id: 2, title: "chart equivalence", budget: Some(Duration::from_secs(30)), run: charts },
        Criterion { id: 3, title: "dissipation rate identity", budget: None, run: rate },
        Criterion { id: 4, title: "satellite middle-axis stabilization", budget: Some(Duration::from_secs(60)), run: satellite },
        Criterion { id: 5, title: "threshold reproduction", budget: None, run: thresholds },
        Criterion { id: 6, title: "channel shear-flow stabilization", budget: Some(Duration::from_secs(600)), run: channel_flow },
        Criterion { id: 7, title: "spectral field against the dense oracle", budget: None, run: oracle },
        Criterion { id: 8, title: "derivatives against finite differences", budget: None, run: derivatives },
    ]
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for c in criteria().into_iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let mut verdicts = match outcome {
            Ok(v) => v,
            Err(e) => vec![Verdict::below("error", 1.0, 0.5, &e.to_string())],
        };
        if let Some(budget) = c.budget {
            verdicts.push(Verdict::below(
                "runtime",
                elapsed.as_secs_f64(),
                budget.as_secs_f64(),
                "seconds",
            ));
        }
        let passed = verdicts.iter().all(|v| v.passed);
        println!(
            "criterion {} {}: {} ({:.1} s)",
            c.id,
            if passed { "PASS" } else { "FAIL" },
            c.title,
            elapsed.as_secs_f64()
        );
        for v in &verdicts {
            let mark = if v.criterion.starts_with("info:") {
                "    "
            } else if v.passed {
                "  ok"
            } else {
                "  !!"
            };
            println!("{mark} {} = {:.3e} (threshold {:.1e}; {})", v.criterion, v.value, v.threshold, v.detail);
        }
        if !passed {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
