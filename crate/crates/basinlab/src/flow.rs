//! Trajectory integration and flow-level checks.
//!
//! One fixed-step RK4 driver serves everything: basin sweeps, convergence
//! timing, conjugacy verification. Events are detected at sample times
//! t_k = k h only, so reported hit times are quantized to the step grid;
//! convergence additionally requires the state to stay inside the epsilon
//! ball for a dwell window, which filters transients that merely pass
//! through it.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::systems::{conjugacy_h, conjugacy_h_unchecked, SystemId, SystemSpec, MANIFOLD_TOL};

/// Slack for comparisons between step-grid times, well below any usable h.
const TIME_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationParams {
    /// RK4 step size.
    pub h: f64,
    /// Integration horizon.
    pub t_max: f64,
    /// Convergence radius in the system's attractor metric.
    pub eps: f64,
    /// Time the state must remain inside the epsilon ball.
    pub dwell: f64,
    /// Re-project onto the manifold after every step. Costs one sqrt per
    /// step and keeps the constraint residual at rounding level.
    pub project_each_step: bool,
}

impl Default for IntegrationParams {
    fn default() -> Self {
        IntegrationParams { h: 0.01, t_max: 20.0, eps: 0.05, dwell: 1.0, project_each_step: true }
    }
}

impl IntegrationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::BadConfig(format!("step size {} must be positive", self.h)));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::BadConfig(format!("horizon {} must be nonnegative", self.t_max)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::BadConfig(format!("epsilon {} must be positive", self.eps)));
        }
        if !(self.dwell >= 0.0) {
            return Err(Error::BadConfig(format!("dwell {} must be nonnegative", self.dwell)));
        }
        Ok(())
    }
}

/// Why integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TerminalEvent {
    /// Entered the epsilon ball at `t_hit` and stayed through the dwell
    /// window.
    ReachedEps { t_hit: f64 },
    /// Left the system's chart-coordinate bounding box at time `t`.
    LeftBounds { t: f64 },
    /// Ran to the horizon without either event.
    Timeout,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub system: SystemId,
    /// (t, state) at every step, including t = 0.
    pub samples: Vec<(f64, Vec3)>,
    pub terminal: TerminalEvent,
}

fn axpy(p: Vec3, a: f64, v: Vec3) -> Vec3 {
    [p[0] + a * v[0], p[1] + a * v[1], p[2] + a * v[2]]
}

fn rk4_step(sys: &SystemSpec, p: Vec3, h: f64) -> Vec3 {
    let k1 = sys.velocity(p);
    let k2 = sys.velocity(axpy(p, h / 2.0, k1));
    let k3 = sys.velocity(axpy(p, h / 2.0, k2));
    let k4 = sys.velocity(axpy(p, h, k3));
    [
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        p[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Core driver: integrates from `q0`, invoking `observe` at every sample
/// time (t = 0 included), until an event fires or the horizon is reached.
/// Returns the event and the final state.
fn drive(
    sys: &SystemSpec,
    q0: Vec3,
    params: &IntegrationParams,
    mut observe: impl FnMut(f64, Vec3),
) -> Result<(TerminalEvent, Vec3)> {
    params.validate()?;
    if !q0.iter().all(|c| c.is_finite()) {
        return Err(Error::NumericalBlowup { t: 0.0 });
    }
    let res = sys.residual(q0);
    if res > MANIFOLD_TOL {
        return Err(Error::OffManifold { residual: res, tol: MANIFOLD_TOL });
    }
    if sys.is_excluded(q0) {
        return Err(Error::ExcludedSeed);
    }

    let n_steps = (params.t_max / params.h - TIME_SLACK).ceil().max(0.0) as usize;
    let mut p = q0;
    let mut entered: Option<f64> = None;

    for k in 0..=n_steps {
        let t = k as f64 * params.h;
        if k > 0 {
            p = rk4_step(sys, p, params.h);
            if params.project_each_step {
                p = sys.chart.project(p)?;
            }
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NumericalBlowup { t });
            }
        }
        observe(t, p);
        if !sys.in_bounds(p) {
            return Ok((TerminalEvent::LeftBounds { t }, p));
        }
        if sys.distance(p) < params.eps {
            let t_in = *entered.get_or_insert(t);
            if t - t_in >= params.dwell - TIME_SLACK {
                return Ok((TerminalEvent::ReachedEps { t_hit: t_in }, p));
            }
        } else {
            entered = None;
        }
    }
    Ok((TerminalEvent::Timeout, p))
}

/// Integrate and record every sample.
pub fn integrate(sys: &SystemSpec, q0: Vec3, params: &IntegrationParams) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity((params.t_max / params.h) as usize + 2);
    let (terminal, _) = drive(sys, q0, params, |t, p| samples.push((t, p)))?;
    Ok(Trajectory { system: sys.id, samples, terminal })
}

/// Integrate without recording; basin sweeps call this per cell.
pub(crate) fn run_to_event(
    sys: &SystemSpec,
    q0: Vec3,
    params: &IntegrationParams,
) -> Result<(TerminalEvent, Vec3)> {
    drive(sys, q0, params, |_, _| {})
}

/// First sustained entry time into the `eps` ball, or None on timeout or
/// bounds exit.
pub fn time_to_epsilon(
    sys: &SystemSpec,
    q0: Vec3,
    eps: f64,
    params: &IntegrationParams,
) -> Result<Option<f64>> {
    let mut p = *params;
    p.eps = eps;
    Ok(match run_to_event(sys, q0, &p)?.0 {
        TerminalEvent::ReachedEps { t_hit } => Some(t_hit),
        _ => None,
    })
}

/// Pure flow map: states at the requested times (each rounded to the step
/// grid), with no epsilon or bounds events. `times` must be nondecreasing.
pub fn flow_snapshots(sys: &SystemSpec, q0: Vec3, times: &[f64], h: f64) -> Result<Vec<Vec3>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::BadConfig(format!("step size {h} must be positive")));
    }
    let targets: Vec<usize> = times.iter().map(|&t| (t / h).round() as usize).collect();
    if times.windows(2).any(|w| w[0] > w[1]) || times.iter().any(|&t| t < 0.0) {
        return Err(Error::BadConfig("snapshot times must be nondecreasing and nonnegative".into()));
    }
    let res = sys.residual(q0);
    if res > MANIFOLD_TOL {
        return Err(Error::OffManifold { residual: res, tol: MANIFOLD_TOL });
    }
    let n_steps = targets.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(times.len());
    let mut p = q0;
    for k in 0..=n_steps {
        if k > 0 {
            p = rk4_step(sys, p, h);
            p = sys.chart.project(p)?;
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NumericalBlowup { t: k as f64 * h });
            }
        }
        for _ in targets.iter().filter(|&&g| g == k) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Maximum ambient drift of points that ought to be equilibria, integrated
/// to time `t`. Epsilon and bounds events do not apply.
pub fn check_stationary(sys: &SystemSpec, points: &[Vec3], t: f64, h: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for &p0 in points {
        let end = flow_snapshots(sys, p0, &[t], h)?[0];
        let d = ((end[0] - p0[0]).powi(2) + (end[1] - p0[1]).powi(2) + (end[2] - p0[2]).powi(2))
            .sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub n_samples: usize,
    pub t_end: f64,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Measure how well the map h intertwines the two flows: the defect
/// || h(cylinder flow at t) - funnel flow at t from h(start) || over random
/// starts and a time grid. Both flows are integrated independently, so this
/// exercises the funnel field as implemented, not the algebra that defined
/// it.
pub fn verify_conjugacy(n_samples: usize, t_grid: &[f64], tol: f64, seed: u64) -> Result<ConjugacyReport> {
    let m0 = SystemSpec::get(SystemId::CylinderM0);
    let m = SystemSpec::get(SystemId::FunnelM);
    let h = 1e-3;
    // Keep starts off the seam fiber; angular motion there is flat and the
    // two integrations would only compare equilibria.
    let theta_max = (-0.8f64).acos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_defect = 0.0f64;
    for _ in 0..n_samples {
        let theta = rng.gen_range(-theta_max..theta_max);
        let y = rng.gen_range(-2.0..2.0);
        let q = [theta.sin(), y, theta.cos()];
        let p = conjugacy_h(q)?;
        let on_cyl = flow_snapshots(&m0, q, t_grid, h)?;
        let on_funnel = flow_snapshots(&m, p, t_grid, h)?;
        for (a, b) in on_cyl.iter().zip(&on_funnel) {
            let ha = conjugacy_h_unchecked(*a);
            let d = ((ha[0] - b[0]).powi(2) + (ha[1] - b[1]).powi(2) + (ha[2] - b[2]).powi(2))
                .sqrt();
            max_defect = max_defect.max(d);
        }
    }
    let t_end = t_grid.last().copied().unwrap_or(0.0);
    Ok(ConjugacyReport { n_samples, t_end, max_defect, tol, pass: max_defect <= tol })
}

/// Plain-text CSV: t,x,y,z,dist per sample.
pub fn write_trajectory_csv(sys: &SystemSpec, traj: &Trajectory, w: &mut impl Write) -> Result<()> {
    writeln!(w, "t,x,y,z,dist")?;
    for &(t, p) in &traj.samples {
        writeln!(w, "{t},{},{},{},{}", p[0], p[1], p[2], sys.distance(p))?;
    }
    Ok(())
}
