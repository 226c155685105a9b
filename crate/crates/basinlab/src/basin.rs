//! Basin-of-attraction sweeps over chart grids, plus sampling-based
//! stability probes.
//!
//! Each non-OUT cell is seeded at its center and integrated to an event.
//! Cells are independent, so the sweep is embarrassingly parallel; results
//! are assembled in index order either way, which keeps artifacts
//! byte-identical across thread counts.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{integrate, run_to_event, time_to_epsilon, IntegrationParams, TerminalEvent};
use crate::geometry::{Chart, DistanceFnId, GridSpec, Vec3, CHART_TOL};
use crate::systems::{SystemId, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellLabel {
    /// Closed cell contains an excluded point or pokes out of the chart
    /// window; never integrated.
    Out,
    Converged { t_conv: f64 },
    Timeout,
    /// Left the bounding box, or the integrator blew up.
    Diverged,
}

impl CellLabel {
    pub fn name(&self) -> &'static str {
        match self {
            CellLabel::Out => "OUT",
            CellLabel::Converged { .. } => "CONVERGED",
            CellLabel::Timeout => "TIMEOUT",
            CellLabel::Diverged => "DIVERGED",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, CellLabel::Converged { .. })
    }
}

#[derive(Clone, Debug)]
pub struct BasinGrid {
    pub system: SystemId,
    pub chart: Chart,
    pub grid: GridSpec,
    pub params: IntegrationParams,
    /// Row-major, index = j * nx + i.
    pub labels: Vec<CellLabel>,
    /// Cells that hit numerical blowup (labeled DIVERGED, sweep continues).
    pub blowup_warnings: usize,
}

impl BasinGrid {
    /// Keep-mask of CONVERGED cells, the default complex input.
    pub fn converged_mask(&self) -> Vec<bool> {
        self.labels.iter().map(CellLabel::is_converged).collect()
    }

    /// (out, converged, timeout, diverged) counts.
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        let mut c = (0, 0, 0, 0);
        for l in &self.labels {
            match l {
                CellLabel::Out => c.0 += 1,
                CellLabel::Converged { .. } => c.1 += 1,
                CellLabel::Timeout => c.2 += 1,
                CellLabel::Diverged => c.3 += 1,
            }
        }
        c
    }
}

/// OUT cells as a pure function of geometry: a closed cell is OUT when it
/// contains an excluded point (all containing cells count when the point
/// sits on a shared boundary) or is not wholly inside the chart window.
/// Needs no integration.
pub fn out_mask(chart: &Chart, excluded: &[Vec3], grid: &GridSpec) -> Vec<bool> {
    let excluded_uv: Vec<(f64, f64)> = excluded.iter().map(|&e| chart.from_ambient(e)).collect();
    let periodic = chart.periodic();
    let mut mask = Vec::with_capacity(grid.cells());
    for j in 0..grid.ny {
        let (v_lo, v_hi) = grid.cell_v(j);
        for i in 0..grid.nx {
            let (u_lo, u_hi) = grid.cell_u(i);
            let escapes = match chart {
                Chart::Planar { x, y } => {
                    u_lo < x.0 - CHART_TOL
                        || u_hi > x.1 + CHART_TOL
                        || v_lo < y.0 - CHART_TOL
                        || v_hi > y.1 + CHART_TOL
                }
                // The angle wraps; only the height can escape.
                Chart::Cylinder { y, .. } => v_lo < y.0 - CHART_TOL || v_hi > y.1 + CHART_TOL,
            };
            let punctured = excluded_uv
                .iter()
                .any(|&(ue, ve)| grid.cell_contains(i, j, ue, ve, periodic));
            mask.push(escapes || punctured);
        }
    }
    mask
}

fn classify_cell(
    sys: &SystemSpec,
    grid: &GridSpec,
    params: &IntegrationParams,
    idx: usize,
) -> Result<(CellLabel, bool)> {
    let (i, j) = (idx % grid.nx, idx / grid.nx);
    let (u, v) = grid.center(i, j);
    let seed = sys.chart.to_ambient(u, v)?;
    match run_to_event(sys, seed, params) {
        Ok((TerminalEvent::ReachedEps { t_hit }, _)) => Ok((CellLabel::Converged { t_conv: t_hit }, false)),
        Ok((TerminalEvent::LeftBounds { .. }, _)) => Ok((CellLabel::Diverged, false)),
        Ok((TerminalEvent::Timeout, _)) => Ok((CellLabel::Timeout, false)),
        Err(Error::NumericalBlowup { .. }) => Ok((CellLabel::Diverged, true)),
        Err(e) => Err(e),
    }
}

fn assemble(
    sys: &SystemSpec,
    grid: &GridSpec,
    params: &IntegrationParams,
    cells: Vec<(CellLabel, bool)>,
) -> BasinGrid {
    let blowup_warnings = cells.iter().filter(|&&(_, b)| b).count();
    BasinGrid {
        system: sys.id,
        chart: sys.chart,
        grid: *grid,
        params: *params,
        labels: cells.into_iter().map(|(l, _)| l).collect(),
        blowup_warnings,
    }
}

/// Label every cell of `grid`. Runs cells in parallel when the `parallel`
/// feature is enabled; identical output either way.
pub fn compute_basin(sys: &SystemSpec, grid: &GridSpec, params: &IntegrationParams) -> Result<BasinGrid> {
    grid.validate(&sys.chart)?;
    params.validate()?;
    let out = out_mask(&sys.chart, &sys.attractor.excluded, grid);

    #[cfg(feature = "parallel")]
    let cells = (0..grid.cells())
        .into_par_iter()
        .map(|idx| {
            if out[idx] {
                Ok((CellLabel::Out, false))
            } else {
                classify_cell(sys, grid, params, idx)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    #[cfg(not(feature = "parallel"))]
    let cells = (0..grid.cells())
        .map(|idx| {
            if out[idx] {
                Ok((CellLabel::Out, false))
            } else {
                classify_cell(sys, grid, params, idx)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(assemble(sys, grid, params, cells))
}

/// Single-threaded sweep, regardless of features. Kept callable so the two
/// paths can be benchmarked and cross-checked against each other.
pub fn compute_basin_sequential(
    sys: &SystemSpec,
    grid: &GridSpec,
    params: &IntegrationParams,
) -> Result<BasinGrid> {
    grid.validate(&sys.chart)?;
    params.validate()?;
    let out = out_mask(&sys.chart, &sys.attractor.excluded, grid);
    let cells = (0..grid.cells())
        .map(|idx| {
            if out[idx] {
                Ok((CellLabel::Out, false))
            } else {
                classify_cell(sys, grid, params, idx)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(sys, grid, params, cells))
}

impl BasinGrid {
    /// One header line `# system,chart,nx,ny,eps,Tmax,h,tau` (values in that
    /// order), then one row `i,j,u,v,label,t_conv` per cell; t_conv is empty
    /// unless CONVERGED. Floats print in shortest round-trip form, so the
    /// output is a deterministic function of the grid.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# {},{},{},{},{},{},{},{}",
            self.system,
            self.chart.kind_name(),
            self.grid.nx,
            self.grid.ny,
            self.params.eps,
            self.params.t_max,
            self.params.h,
            self.params.dwell,
        )?;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let (u, v) = self.grid.center(i, j);
                let label = &self.labels[self.grid.index(i, j)];
                match label {
                    CellLabel::Converged { t_conv } => {
                        writeln!(w, "{i},{j},{u},{v},{},{t_conv}", label.name())?
                    }
                    _ => writeln!(w, "{i},{j},{u},{v},{},", label.name())?,
                }
            }
        }
        Ok(())
    }
}

fn bad_csv<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::BadCsv(msg.into()))
}

/// Parse a basin CSV back into a BasinGrid. The grid window is reconstructed
/// from the first and last cell centers on each axis (exact up to float
/// parsing, which Display output round-trips).
pub fn read_basin_csv(r: impl BufRead) -> Result<BasinGrid> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(l) => l?,
        None => return bad_csv("empty file"),
    };
    let Some(rest) = header.strip_prefix("# ") else {
        return bad_csv("missing `# ` header line");
    };
    let fields: Vec<&str> = rest.split(',').collect();
    if fields.len() != 8 {
        return bad_csv(format!("header has {} fields, expected 8", fields.len()));
    }
    let system: SystemId = fields[0].parse()?;
    let sys = SystemSpec::get(system);
    if fields[1] != sys.chart.kind_name() {
        return bad_csv(format!("chart kind {:?} does not match system {}", fields[1], system));
    }
    let parse_usize = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::BadCsv(format!("bad {what}: {s:?}")))
    };
    let parse_f64 = |s: &str, what: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::BadCsv(format!("bad {what}: {s:?}")))
    };
    let nx = parse_usize(fields[2], "nx")?;
    let ny = parse_usize(fields[3], "ny")?;
    let params = IntegrationParams {
        eps: parse_f64(fields[4], "eps")?,
        t_max: parse_f64(fields[5], "Tmax")?,
        h: parse_f64(fields[6], "h")?,
        dwell: parse_f64(fields[7], "tau")?,
        project_each_step: true,
    };
    if nx == 0 || ny == 0 {
        return bad_csv("zero-sized grid");
    }

    let mut labels = vec![None; nx * ny];
    let mut u_first = None;
    let mut u_last = None;
    let mut v_first = None;
    let mut v_last = None;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return bad_csv(format!("row {}: {} fields, expected 6", lineno + 2, cols.len()));
        }
        let i = parse_usize(cols[0], "i")?;
        let j = parse_usize(cols[1], "j")?;
        if i >= nx || j >= ny {
            return bad_csv(format!("row {}: cell ({i}, {j}) outside {nx}x{ny}", lineno + 2));
        }
        let u = parse_f64(cols[2], "u")?;
        let v = parse_f64(cols[3], "v")?;
        if i == 0 {
            u_first.get_or_insert(u);
        }
        if i == nx - 1 {
            u_last.get_or_insert(u);
        }
        if j == 0 {
            v_first.get_or_insert(v);
        }
        if j == ny - 1 {
            v_last.get_or_insert(v);
        }
        let label = match (cols[4], cols[5]) {
            ("CONVERGED", t) => CellLabel::Converged { t_conv: parse_f64(t, "t_conv")? },
            ("OUT", "") => CellLabel::Out,
            ("TIMEOUT", "") => CellLabel::Timeout,
            ("DIVERGED", "") => CellLabel::Diverged,
            (other, "") => return bad_csv(format!("row {}: unknown label {other:?}", lineno + 2)),
            (label, extra) => {
                return bad_csv(format!("row {}: {label} rows must leave t_conv empty, got {extra:?}", lineno + 2))
            }
        };
        let slot = &mut labels[j * nx + i];
        if slot.is_some() {
            return bad_csv(format!("duplicate cell ({i}, {j})"));
        }
        *slot = Some(label);
    }
    let labels: Vec<CellLabel> = labels
        .into_iter()
        .enumerate()
        .map(|(idx, l)| l.ok_or_else(|| Error::BadCsv(format!("missing cell index {idx}"))))
        .collect::<Result<_>>()?;

    let span_axis = |first: Option<f64>, last: Option<f64>, n: usize| -> Result<(f64, f64)> {
        let (c0, c1) = match (first, last) {
            (Some(a), Some(b)) => (a, b),
            _ => return bad_csv("could not locate first/last cell centers"),
        };
        if n == 1 {
            return bad_csv("cannot reconstruct a window from a single column/row");
        }
        let span = (c1 - c0) * n as f64 / (n - 1) as f64;
        let lo = c0 - span / n as f64;
        Ok((lo, lo + span))
    };
    let grid = GridSpec {
        u: span_axis(u_first, u_last, nx)?,
        v: span_axis(v_first, v_last, ny)?,
        nx,
        ny,
    };
    Ok(BasinGrid { system, chart: sys.chart, grid, params, labels, blowup_warnings: 0 })
}

/// Chart-coordinate sampling rectangle with a human-readable name for
/// reports. Degenerate (lo == hi) axes pin that coordinate.
#[derive(Clone, Debug)]
pub struct RegionSpec {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub label: String,
}

/// {z > a} on a cylinder chart: the angle window where cos(theta) > a.
pub fn region_z_above(a: f64, v: (f64, f64)) -> RegionSpec {
    let half = (-1.0f64).max(a).min(1.0).acos();
    RegionSpec { u: (-half, half), v, label: format!("z > {a}") }
}

/// Full angular band over a height interval.
pub fn region_band(v: (f64, f64)) -> RegionSpec {
    use std::f64::consts::PI;
    RegionSpec { u: (-PI, PI), v, label: format!("y in ({}, {})", v.0, v.1) }
}

/// Planar rectangle.
pub fn region_rect(u: (f64, f64), v: (f64, f64)) -> RegionSpec {
    RegionSpec { u, v, label: format!("box ({}, {}) x ({}, {})", u.0, u.1, v.0, v.1) }
}

/// The attractor itself (theta = 0) over a height interval.
pub fn region_attractor(v: (f64, f64)) -> RegionSpec {
    RegionSpec { u: (0.0, 0.0), v, label: "attractor fiber".into() }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub region: String,
    pub eps: f64,
    pub samples: usize,
    pub fraction_converged: f64,
    /// Max observed sustained-entry time; None when nothing converged.
    pub t_eps_hat: Option<f64>,
    /// True iff every sample converged.
    pub uniform: bool,
}

fn sample_in(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.gen_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Empirical uniform-attraction probe: seed `n_samples` points uniformly in
/// `region`, measure every sustained entry time, report the max and the
/// converged fraction. Uniformity holds only if the fraction is exactly 1.
pub fn estimate_uniform_t(
    sys: &SystemSpec,
    region: &RegionSpec,
    eps: f64,
    n_samples: usize,
    params: &IntegrationParams,
    seed: u64,
) -> Result<StabilityReport> {
    if n_samples < 100 {
        return Err(Error::BadConfig(format!(
            "uniformity estimates need at least 100 samples, got {n_samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t_hat: Option<f64> = None;
    let mut converged = 0usize;
    for _ in 0..n_samples {
        let u = sample_in(&mut rng, region.u);
        let v = sample_in(&mut rng, region.v);
        let p = sys.chart.to_ambient(u, v)?;
        if let Some(t) = time_to_epsilon(sys, p, eps, params)? {
            converged += 1;
            t_hat = Some(t_hat.map_or(t, |m: f64| m.max(t)));
        }
    }
    let fraction = converged as f64 / n_samples as f64;
    Ok(StabilityReport {
        region: region.label.clone(),
        eps,
        samples: n_samples,
        fraction_converged: fraction,
        t_eps_hat: t_hat,
        uniform: converged == n_samples,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EpsDeltaRow {
    pub eps: f64,
    pub delta_hat: f64,
}

const LADDER_DEPTH: u32 = 16;
const PROBE_SEEDS_PER_RUNG: usize = 48;

/// Largest distance-to-attractor realizable on the system's chart window,
/// the top of the delta ladder.
fn ladder_top(sys: &SystemSpec) -> f64 {
    match sys.attractor.distance {
        DistanceFnId::MinorArc | DistanceFnId::FiberArcProxy => std::f64::consts::PI,
        DistanceFnId::PlanarCircle => match sys.chart {
            Chart::Planar { x, y } => {
                let mut worst = 0.0f64;
                for &cx in &[x.0, x.1] {
                    for &cy in &[y.0, y.1] {
                        worst = worst.max((cx.hypot(cy) - 1.0).abs());
                    }
                }
                worst
            }
            Chart::Cylinder { .. } => std::f64::consts::PI,
        },
    }
}

/// Draw a point with attractor distance below `delta`.
fn sample_near_attractor(sys: &SystemSpec, delta: f64, rng: &mut ChaCha8Rng) -> Result<Vec3> {
    use std::f64::consts::PI;
    match sys.chart {
        Chart::Planar { x, .. } => {
            let r_lo = (1.0 - delta).max(0.0);
            let r_hi = (1.0 + delta).min(x.1);
            let r = sample_in(rng, (r_lo, r_hi));
            let phi = rng.gen_range(-PI..PI);
            Ok([r * phi.cos(), r * phi.sin(), 0.0])
        }
        Chart::Cylinder { profile, .. } => {
            let v = sample_in(rng, (-4.0, 8.0));
            let m = (delta / profile.rho(v)).min(PI);
            let theta = if m > 0.0 { rng.gen_range(-m..m) } else { 0.0 };
            sys.chart.to_ambient(theta, v)
        }
    }
}

/// For each epsilon, walk a geometric delta ladder downward from the chart's
/// maximum distance and report the largest rung whose seeds all keep their
/// attractor distance below epsilon for the whole horizon (delta_hat = 0 if
/// even the smallest rung breaches).
pub fn epsilon_delta_probe(
    sys: &SystemSpec,
    eps_list: &[f64],
    params: &IntegrationParams,
    seed: u64,
) -> Result<Vec<EpsDeltaRow>> {
    if eps_list.is_empty() || eps_list.iter().any(|&e| e <= 0.0) {
        return Err(Error::BadConfig("epsilon list must be nonempty and positive".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::BadConfig("epsilon list must be strictly decreasing".into()));
    }
    let top = ladder_top(sys);
    // Dwell never fires: the probe wants the full trajectory, not an early
    // convergence exit.
    let probe_params = IntegrationParams { dwell: params.t_max + 1.0, ..*params };
    let mut rows = Vec::with_capacity(eps_list.len());
    for (which, &eps) in eps_list.iter().enumerate() {
        let mut delta_hat = 0.0;
        for k in 0..=LADDER_DEPTH {
            let delta = top / f64::powi(2.0, k as i32);
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ ((which as u64) << 32) ^ u64::from(k));
            let mut breached = false;
            for _ in 0..PROBE_SEEDS_PER_RUNG {
                let p0 = sample_near_attractor(sys, delta, &mut rng)?;
                let traj = integrate(sys, p0, &probe_params)?;
                let escaped = !matches!(traj.terminal, TerminalEvent::Timeout);
                if escaped || traj.samples.iter().any(|&(_, p)| sys.distance(p) >= eps) {
                    breached = true;
                    break;
                }
            }
            if !breached {
                delta_hat = delta;
                break;
            }
        }
        rows.push(EpsDeltaRow { eps, delta_hat });
    }
    Ok(rows)
}
