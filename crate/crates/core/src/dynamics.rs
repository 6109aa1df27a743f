//! Fixed-step integration with monitor series.

use serde::{Deserialize, Serialize};

use crate::closed_loop::Chart;
use crate::error::{Error, Result};
use crate::Vector;

const MIDPOINT_TOL: f64 = 1e-12;
const MIDPOINT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Rk4,
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub step: f64,
    pub horizon: f64,
    pub monitor_stride: usize,
    /// Stop early once `‖y‖∞` exceeds this.
    pub blowup: Option<f64>,
}

impl IntegratorConfig {
    pub fn rk4(step: f64, horizon: f64) -> Self {
        Self {
            method: Method::Rk4,
            step,
            horizon,
            monitor_stride: 1,
            blowup: None,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.monitor_stride = stride;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_blowup(mut self, limit: f64) -> Self {
        self.blowup = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", self.step)));
        }
        if !(self.horizon > self.step) {
            return Err(Error::InvalidConfig(format!(
                "horizon {} must exceed step {}",
                self.horizon, self.step
            )));
        }
        if self.monitor_stride == 0 {
            return Err(Error::InvalidConfig("monitor_stride must be positive".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.step).round() as usize
    }
}

/// A named scalar function of the flat state.
pub struct Monitor<'a> {
    pub name: String,
    pub f: Box<dyn Fn(&Vector) -> f64 + 'a>,
}

impl<'a> Monitor<'a> {
    pub fn new(name: &str, f: impl Fn(&Vector) -> f64 + 'a) -> Self {
        Self {
            name: name.to_string(),
            f: Box::new(f),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    pub chart: Option<Chart>,
    pub monitors: Vec<(String, Vec<f64>)>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn monitor(&self, name: &str) -> Option<&[f64]> {
        self.monitors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn last(&self) -> &Vector {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record(&mut self, t: f64, y: &Vector, monitors: &[Monitor]) {
        self.times.push(t);
        self.states.push(y.clone());
        for (slot, m) in self.monitors.iter_mut().zip(monitors) {
            slot.1.push((m.f)(y));
        }
    }
}

pub fn rk4_step(field: &impl Fn(&Vector) -> Vector, y: &Vector, h: f64) -> Vector {
    let k1 = field(y);
    let k2 = field(&(y + &k1 * (0.5 * h)));
    let k3 = field(&(y + &k2 * (0.5 * h)));
    let k4 = field(&(y + &k3 * h));
    y + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

/// One implicit-midpoint step by fixed-point iteration; returns the residual on failure.
pub fn midpoint_step(
    field: &impl Fn(&Vector) -> Vector,
    y: &Vector,
    h: f64,
) -> std::result::Result<Vector, f64> {
    let mut next = y + field(y) * h;
    let mut residual = f64::INFINITY;
    for _ in 0..MIDPOINT_MAX_ITER {
        let mid = (y + &next) * 0.5;
        let cand = y + field(&mid) * h;
        if cand.iter().any(|v| !v.is_finite()) {
            return Err(f64::INFINITY);
        }
        residual = (&cand - &next).amax();
        next = cand;
        if residual <= MIDPOINT_TOL * next.amax().max(1.0) {
            return Ok(next);
        }
    }
    Err(residual)
}

pub fn step(
    field: &impl Fn(&Vector) -> Vector,
    y: &Vector,
    h: f64,
    method: Method,
    index: usize,
) -> Result<Vector> {
    match method {
        Method::Rk4 => Ok(rk4_step(field, y, h)),
        Method::ImplicitMidpoint => {
            midpoint_step(field, y, h).map_err(|residual| Error::NoConvergence {
                step: index,
                residual,
            })
        }
    }
}

/// Integrate `ẏ = field(y)` from `y0`, sampling monitors every `monitor_stride` steps
/// and at the final time.
pub fn integrate(
    field: impl Fn(&Vector) -> Vector,
    y0: &Vector,
    config: &IntegratorConfig,
    monitors: &[Monitor],
) -> Result<Trajectory> {
    config.validate()?;
    let n = config.n_steps();
    let mut traj = Trajectory {
        monitors: monitors.iter().map(|m| (m.name.clone(), Vec::new())).collect(),
        ..Default::default()
    };
    let mut y = y0.clone();
    traj.record(0.0, &y, monitors);
    for i in 1..=n {
        y = step(&field, &y, config.step, config.method, i)?;
        let t = i as f64 * config.step;
        let blown = config.blowup.is_some_and(|lim| !(y.amax() <= lim));
        if i % config.monitor_stride == 0 || i == n || blown {
            traj.record(t, &y, monitors);
        }
        if blown {
            traj.diverged = true;
            break;
        }
    }
    Ok(traj)
}

/// Final state after `horizon / h` steps, without recording.
pub fn propagate(
    field: &impl Fn(&Vector) -> Vector,
    y0: &Vector,
    h: f64,
    horizon: f64,
    method: Method,
) -> Result<Vector> {
    let n = (horizon / h).round() as usize;
    let mut y = y0.clone();
    for i in 1..=n {
        y = step(field, &y, h, method, i)?;
    }
    Ok(y)
}

/// Observed order from the Richardson triplet `h, h/2, h/4`:
/// `log₂(‖y_h − y_{h/2}‖ / ‖y_{h/2} − y_{h/4}‖)`.
pub fn convergence_order(
    field: impl Fn(&Vector) -> Vector,
    y0: &Vector,
    horizon: f64,
    h: f64,
    method: Method,
) -> Result<f64> {
    let a = propagate(&field, y0, h, horizon, method)?;
    let b = propagate(&field, y0, h / 2.0, horizon, method)?;
    let c = propagate(&field, y0, h / 4.0, horizon, method)?;
    Ok(((&a - &b).norm() / (&b - &c).norm()).log2())
}
