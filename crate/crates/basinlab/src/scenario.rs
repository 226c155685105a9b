//! JSON scenario configs and the end-to-end pipeline behind `basinlab run`.
//!
//! A [`Scenario`] names a system, a grid, integration parameters, a tubular
//! neighborhood model, and a list of extra checks. [`run_scenario`] sweeps
//! the basin, builds both cubical complexes, compares Betti profiles, runs
//! the checks, and writes every artifact atomically into an output
//! directory. Identical configs produce byte-identical artifacts; wall-clock
//! timings go to a separate sidecar so the main report stays stable.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basin::{
    compute_basin, epsilon_delta_probe, estimate_uniform_t, region_band, region_rect,
    region_z_above, CellLabel, EpsDeltaRow, StabilityReport,
};
use crate::cubetopo::{self, betti, build_complex, compare_profiles, BettiProfile, Verdict};
use crate::error::{Error, Result};
use crate::flow::{check_stationary, flow_snapshots, verify_conjugacy, IntegrationParams};
use crate::geometry::{tubular_mask, GridSpec, TubularSpec, Vec3};
use crate::systems::{
    conjugacy_dh, conjugacy_h, conjugacy_h_unchecked, vf_circle_gradient, SystemId, SystemSpec,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Printed with every verdict: Betti agreement can refute a homeomorphism
/// claim but never certify one.
pub const HOMEO_CAVEAT: &str =
    "note: matching Betti profiles are a necessary condition only; \
     this tool never certifies that basin and tube are homeomorphic";

fn default_seed() -> u64 {
    42
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// [[u_lo, u_hi], [v_lo, v_hi]] in chart coordinates.
    pub window: [[f64; 2]; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub eps: f64,
    pub t_max: f64,
    pub h: f64,
    /// Dwell time: distance must stay below eps this long to count.
    pub tau: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubularConfig {
    pub width: f64,
    /// Collar taper angle, only meaningful for punctured attractors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Conjugacy,
    Stationary,
    Gradient,
    Jacobian,
    DistanceBound,
    UniformT,
    EpsDelta,
}

impl CheckId {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Conjugacy => "conjugacy",
            CheckId::Stationary => "stationary",
            CheckId::Gradient => "gradient",
            CheckId::Jacobian => "jacobian",
            CheckId::DistanceBound => "distance_bound",
            CheckId::UniformT => "uniform_t",
            CheckId::EpsDelta => "eps_delta",
        }
    }

    /// Checks that probe the vector fields and maps directly, without a
    /// basin sweep. `basinlab verify` runs only these.
    pub fn is_field_level(self) -> bool {
        !matches!(self, CheckId::UniformT | CheckId::EpsDelta)
    }
}

/// Optional assertions evaluated after the pipeline; a mismatch fails the
/// run without stopping it.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin_betti: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tubular_betti: Option<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub system: SystemId,
    pub grid: GridConfig,
    pub params: ParamsConfig,
    pub tubular: TubularConfig,
    #[serde(default)]
    pub checks: Vec<CheckId>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = fs::read_to_string(path)?;
        let sc: Scenario = serde_json::from_str(&text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            u: (self.grid.window[0][0], self.grid.window[0][1]),
            v: (self.grid.window[1][0], self.grid.window[1][1]),
            nx: self.grid.nx,
            ny: self.grid.ny,
        }
    }

    pub fn integration_params(&self) -> IntegrationParams {
        IntegrationParams {
            h: self.params.h,
            t_max: self.params.t_max,
            eps: self.params.eps,
            dwell: self.params.tau,
            project_each_step: true,
        }
    }

    /// Pick the tubular model the attractor calls for: a collar with a
    /// tapered cut when points are excluded, otherwise an annulus (planar)
    /// or a fiber strip (cylinder).
    pub fn resolve_tubular(&self, sys: &SystemSpec) -> Result<TubularSpec> {
        if !sys.attractor.excluded.is_empty() {
            let taper = self.tubular.taper.ok_or_else(|| {
                Error::BadConfig(
                    "a punctured attractor needs tubular.taper for the collar cut".into(),
                )
            })?;
            return Ok(TubularSpec::TaperedCollar { width: self.tubular.width, taper_angle: taper });
        }
        if self.tubular.taper.is_some() {
            return Err(Error::BadConfig(
                "tubular.taper only applies to punctured attractors".into(),
            ));
        }
        Ok(match sys.chart {
            crate::geometry::Chart::Planar { .. } => TubularSpec::Annulus { width: self.tubular.width },
            crate::geometry::Chart::Cylinder { .. } => TubularSpec::Strip { width: self.tubular.width },
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::BadConfig("scenario name must be nonempty".into()));
        }
        let sys = SystemSpec::get(self.system);
        self.grid_spec().validate(&sys.chart)?;
        self.integration_params().validate()?;
        self.resolve_tubular(&sys)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CellCounts {
    pub out: usize,
    pub converged: usize,
    pub timeout: usize,
    pub diverged: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StabilityTables {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_t: Option<StabilityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_delta: Option<Vec<EpsDeltaRow>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    /// Echo of the config; re-validating and re-running it must reproduce
    /// this report byte for byte (timings aside).
    pub scenario: Scenario,
    pub system: SystemId,
    pub cells: CellCounts,
    pub basin_betti: BettiProfile,
    pub tubular_betti: BettiProfile,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectation: Option<CheckResult>,
    pub stability: StabilityTables,
    pub checks: BTreeMap<String, CheckResult>,
    pub blowup_warnings: usize,
    pub all_pass: bool,
    /// Always null in report.json; wall-clock numbers live in timings.json
    /// so reruns of the same config stay byte-identical.
    pub timings: Option<BTreeMap<String, f64>>,
}

pub struct ChecksOutput {
    pub checks: BTreeMap<String, CheckResult>,
    pub stability: StabilityTables,
}

/// Write via a sibling tmp file and rename, so readers never observe a
/// partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn check_conjugacy(seed: u64) -> Result<CheckResult> {
    let t_grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
    let tol = 1e-6;
    let rep = verify_conjugacy(200, &t_grid, tol, seed)?;
    Ok(CheckResult {
        pass: rep.pass,
        observed: rep.max_defect,
        threshold: tol,
        detail: format!(
            "max intertwining defect over {} starts, t in [0, {}]",
            rep.n_samples, rep.t_end
        ),
    })
}

fn check_stationary_fibers() -> Result<CheckResult> {
    // The whole seam fiber is equilibria on both cylinders below the
    // underflow cutoff; endpoints must not drift.
    let points: Vec<Vec3> = (0..=5).map(|k| [0.0, -(k as f64), -1.0]).collect();
    let tol = 1e-10;
    let t = 50.0;
    let mut worst = 0.0f64;
    for id in [SystemId::CylinderM0, SystemId::FunnelM] {
        let sys = SystemSpec::get(id);
        worst = worst.max(check_stationary(&sys, &points, t, 0.01)?);
    }
    Ok(CheckResult {
        pass: worst <= tol,
        observed: worst,
        threshold: tol,
        detail: format!("worst drift of {} seam equilibria on both cylinders, T={t}", points.len()),
    })
}

fn check_gradient(seed: u64) -> Result<CheckResult> {
    // The planar field should be minus the gradient of (|p| - 1)^2;
    // compare against central differences of that potential.
    let potential = |p: [f64; 2]| -> f64 {
        let r = p[0].hypot(p[1]);
        (r - 1.0) * (r - 1.0)
    };
    let fd = 1e-5;
    let tol = 1e-6;
    let n = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        // Keep away from the circle itself, where the gradient vanishes and
        // relative error is meaningless.
        let r: f64 = loop {
            let r = rng.gen_range(0.2f64..3.0);
            if (r - 1.0).abs() >= 0.05 {
                break r;
            }
        };
        let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let p = [r * phi.cos(), r * phi.sin()];
        let field = vf_circle_gradient(p);
        let gx = (potential([p[0] + fd, p[1]]) - potential([p[0] - fd, p[1]])) / (2.0 * fd);
        let gy = (potential([p[0], p[1] + fd]) - potential([p[0], p[1] - fd])) / (2.0 * fd);
        let err = (field[0] + gx).hypot(field[1] + gy);
        let scale = gx.hypot(gy);
        worst = worst.max(err / scale);
    }
    Ok(CheckResult {
        pass: worst <= tol,
        observed: worst,
        threshold: tol,
        detail: format!("relative defect of field vs -grad of radial potential at {n} points"),
    })
}

fn check_jacobian(seed: u64) -> Result<CheckResult> {
    // Columns of the pushforward at points of the unit cylinder vs central
    // differences of the conjugacy map itself.
    let fd = 1e-5;
    let tol = 1e-6;
    let n = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let y = rng.gen_range(-2.0..3.0);
        let q = [theta.sin(), y, theta.cos()];
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let exact = conjugacy_dh(q, e);
            let mut hi = q;
            let mut lo = q;
            hi[k] += fd;
            lo[k] -= fd;
            let a = conjugacy_h_unchecked(hi);
            let b = conjugacy_h_unchecked(lo);
            let col = [
                (a[0] - b[0]) / (2.0 * fd),
                (a[1] - b[1]) / (2.0 * fd),
                (a[2] - b[2]) / (2.0 * fd),
            ];
            let err = ((col[0] - exact[0]).powi(2)
                + (col[1] - exact[1]).powi(2)
                + (col[2] - exact[2]).powi(2))
            .sqrt();
            let scale =
                (exact[0].powi(2) + exact[1].powi(2) + exact[2].powi(2)).sqrt();
            worst = worst.max(err / scale);
        }
    }
    Ok(CheckResult {
        pass: worst <= tol,
        observed: worst,
        threshold: tol,
        detail: format!("pushforward columns vs central differences at {n} cylinder points"),
    })
}

fn check_distance_bound(seed: u64) -> Result<CheckResult> {
    // Mapping an orbit through the conjugacy must never increase the
    // reported attractor distance: the funnel's fiber arc is the cylinder
    // arc scaled by the (sub-unit) radius profile.
    let m0 = SystemSpec::get(SystemId::CylinderM0);
    let m = SystemSpec::get(SystemId::FunnelM);
    let times: Vec<f64> = (1..=10).map(|k| k as f64).collect();
    let tol = 1e-9;
    let n = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let y = rng.gen_range(-2.0..4.0);
        let q0 = [theta.sin(), y, theta.cos()];
        for q in flow_snapshots(&m0, q0, &times, 0.01)? {
            let excess = m.distance(conjugacy_h(q)?) - m0.distance(q);
            worst = worst.max(excess);
        }
    }
    Ok(CheckResult {
        pass: worst <= tol,
        observed: worst,
        threshold: tol,
        detail: format!(
            "max distance excess after mapping {n} orbits x {} snapshot times",
            times.len()
        ),
    })
}

/// Analytic sustained-entry bound for the funnel band y0 >= 1: the seam
/// distance is rho(y) * pi, which drops below eps once y reaches
/// y* = -1 / ln(1 - (eps/pi)^2), and upward speed exp(-1/y) makes the
/// travel time from y = 1 at most e * y*.
pub fn funnel_entry_bound(eps: f64) -> f64 {
    let s = eps / std::f64::consts::PI;
    std::f64::consts::E / -f64::ln_1p(-(s * s))
}

fn check_uniform_t(sys: &SystemSpec, seed: u64) -> Result<(CheckResult, StabilityReport)> {
    let (region, eps, t_max, threshold, bounded) = match sys.id {
        SystemId::CylinderM0 => (region_z_above(-0.9, (-4.0, 4.0)), 0.1, 30.0, 30.0, false),
        SystemId::FunnelM => {
            (region_band((1.0, 3.0)), 0.5, 120.0, funnel_entry_bound(0.5), true)
        }
        SystemId::CircleR2 | SystemId::PuncturedR2 => {
            (region_rect((-2.0, 2.0), (-2.0, 2.0)), 0.1, 20.0, 20.0, false)
        }
    };
    let params = IntegrationParams {
        h: 0.01,
        t_max,
        eps,
        dwell: 1.0,
        project_each_step: true,
    };
    let rep = estimate_uniform_t(sys, &region, eps, 500, &params, seed)?;
    let observed = rep.t_eps_hat.unwrap_or(f64::INFINITY);
    let pass = rep.uniform && (!bounded || observed <= threshold);
    let result = CheckResult {
        pass,
        observed,
        threshold,
        detail: format!(
            "max sustained-entry time over {} samples in {}, fraction converged {}",
            rep.samples, rep.region, rep.fraction_converged
        ),
    };
    Ok((result, rep))
}

fn check_eps_delta(
    sys: &SystemSpec,
    params: &IntegrationParams,
    seed: u64,
) -> Result<(CheckResult, Vec<EpsDeltaRow>)> {
    let eps_list = [0.5, 0.3, 0.1];
    let rows = epsilon_delta_probe(sys, &eps_list, params, seed)?;
    let min_delta = rows.iter().map(|r| r.delta_hat).fold(f64::INFINITY, f64::min);
    let detail = rows
        .iter()
        .map(|r| format!("eps {} -> delta_hat {}", r.eps, r.delta_hat))
        .collect::<Vec<_>>()
        .join("; ");
    let result = CheckResult {
        pass: rows.iter().all(|r| r.delta_hat > 0.0),
        observed: min_delta,
        threshold: 0.0,
        detail,
    };
    Ok((result, rows))
}

/// Run the requested checks for a scenario. Field-level checks ignore the
/// grid; the two sweep checks reuse the scenario's integration parameters.
pub fn run_checks(sc: &Scenario, ids: &[CheckId]) -> Result<ChecksOutput> {
    let sys = SystemSpec::get(sc.system);
    let mut checks = BTreeMap::new();
    let mut stability = StabilityTables::default();
    for &id in ids {
        let result = match id {
            CheckId::Conjugacy => check_conjugacy(sc.seed)?,
            CheckId::Stationary => check_stationary_fibers()?,
            CheckId::Gradient => check_gradient(sc.seed)?,
            CheckId::Jacobian => check_jacobian(sc.seed)?,
            CheckId::DistanceBound => check_distance_bound(sc.seed)?,
            CheckId::UniformT => {
                let (result, rep) = check_uniform_t(&sys, sc.seed)?;
                stability.uniform_t = Some(rep);
                result
            }
            CheckId::EpsDelta => {
                let (result, rows) = check_eps_delta(&sys, &sc.integration_params(), sc.seed)?;
                stability.eps_delta = Some(rows);
                result
            }
        };
        checks.insert(id.as_str().to_string(), result);
    }
    Ok(ChecksOutput { checks, stability })
}

fn evaluate_expectation(
    want: &Expectation,
    verdict: &Verdict,
    basin: &BettiProfile,
    tubular: &BettiProfile,
) -> CheckResult {
    let mut misses = Vec::new();
    if let Some(v) = &want.verdict {
        let got = verdict.to_string();
        if &got != v {
            misses.push(format!("verdict {got}, wanted {v}"));
        }
    }
    if let Some((b0, b1)) = want.basin_betti {
        if (basin.b0, basin.b1) != (b0, b1) {
            misses.push(format!(
                "basin Betti ({}, {}), wanted ({b0}, {b1})",
                basin.b0, basin.b1
            ));
        }
    }
    if let Some((b0, b1)) = want.tubular_betti {
        if (tubular.b0, tubular.b1) != (b0, b1) {
            misses.push(format!(
                "tubular Betti ({}, {}), wanted ({b0}, {b1})",
                tubular.b0, tubular.b1
            ));
        }
    }
    CheckResult {
        pass: misses.is_empty(),
        observed: misses.len() as f64,
        threshold: 0.0,
        detail: if misses.is_empty() {
            "verdict and Betti profiles as expected".into()
        } else {
            misses.join("; ")
        },
    }
}

/// The full pipeline: basin sweep, both complexes, verdict, checks,
/// artifacts. Writes basin.csv, basin_betti.json, tubular_betti.json,
/// checks.json, report.json (timings null) and timings.json into `out_dir`.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    sc.validate()?;
    let sys = SystemSpec::get(sc.system);
    let grid = sc.grid_spec();
    let params = sc.integration_params();
    fs::create_dir_all(out_dir)?;

    let t_basin = Instant::now();
    let basin = compute_basin(&sys, &grid, &params)?;
    let basin_ms = ms_since(t_basin);

    let t_topo = Instant::now();
    let basin_betti = betti(&cubetopo::from_basin(&basin)?);
    let tubular = sc.resolve_tubular(&sys)?;
    let mask = tubular_mask(tubular, &sys.chart, &grid)?;
    // The tube is trimmed to live cells so both complexes share a grid
    // domain; OUT cells (outside the window or excluded) never join it.
    let keep: Vec<bool> = mask
        .iter()
        .zip(&basin.labels)
        .map(|(&m, l)| m && !matches!(l, CellLabel::Out))
        .collect();
    let tubular_betti = betti(&build_complex(grid.nx, grid.ny, sys.chart.periodic(), &keep)?);
    let verdict = compare_profiles(&basin_betti, &tubular_betti);
    let topology_ms = ms_since(t_topo);

    let t_checks = Instant::now();
    let ChecksOutput { checks, stability } = run_checks(sc, &sc.checks)?;
    let checks_ms = ms_since(t_checks);

    let expectation = sc
        .expect
        .as_ref()
        .map(|e| evaluate_expectation(e, &verdict, &basin_betti, &tubular_betti));
    let all_pass = checks.values().all(|c| c.pass)
        && expectation.as_ref().map_or(true, |c| c.pass);

    let (out, converged, timeout, diverged) = basin.counts();
    let mut report = RunReport {
        scenario: sc.clone(),
        system: sc.system,
        cells: CellCounts { out, converged, timeout, diverged },
        basin_betti,
        tubular_betti,
        verdict,
        expectation,
        stability,
        checks,
        blowup_warnings: basin.blowup_warnings,
        all_pass,
        timings: None,
    };

    let mut csv = Vec::new();
    basin.write_csv(&mut csv)?;
    write_atomic(&out_dir.join("basin.csv"), &csv)?;
    write_atomic(&out_dir.join("basin_betti.json"), &json_bytes(&report.basin_betti)?)?;
    write_atomic(&out_dir.join("tubular_betti.json"), &json_bytes(&report.tubular_betti)?)?;
    write_atomic(&out_dir.join("checks.json"), &json_bytes(&report.checks)?)?;
    write_atomic(&out_dir.join("report.json"), &json_bytes(&report)?)?;

    let mut timings = BTreeMap::new();
    timings.insert("basin_ms".to_string(), basin_ms);
    timings.insert("topology_ms".to_string(), topology_ms);
    timings.insert("checks_ms".to_string(), checks_ms);
    timings.insert("total_ms".to_string(), basin_ms + topology_ms + checks_ms);
    write_atomic(&out_dir.join("timings.json"), &json_bytes(&timings)?)?;

    report.timings = Some(timings);
    Ok(report)
}

/// Human-readable digest of a report, one check per line.
pub fn summary_text(report: &RunReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let sc = &report.scenario;
    let _ = writeln!(s, "scenario {} ({})", sc.name, report.system);
    let _ = writeln!(
        s,
        "  grid {}x{} on [{}, {}] x [{}, {}], eps {}, t_max {}, h {}, tau {}",
        sc.grid.nx,
        sc.grid.ny,
        sc.grid.window[0][0],
        sc.grid.window[0][1],
        sc.grid.window[1][0],
        sc.grid.window[1][1],
        sc.params.eps,
        sc.params.t_max,
        sc.params.h,
        sc.params.tau
    );
    let c = &report.cells;
    let _ = writeln!(
        s,
        "  cells: {} converged, {} timeout, {} diverged, {} out",
        c.converged, c.timeout, c.diverged, c.out
    );
    if report.blowup_warnings > 0 {
        let _ = writeln!(s, "  warning: {} cells hit numerical blowup", report.blowup_warnings);
    }
    for (name, p) in [("basin", &report.basin_betti), ("tubular", &report.tubular_betti)] {
        let _ = writeln!(
            s,
            "  {name} Betti: b0={} b1={} (V={} E={} F={}, chi={})",
            p.b0, p.b1, p.v, p.e, p.f, p.chi
        );
    }
    let _ = writeln!(s, "  verdict: {}", report.verdict);
    let _ = writeln!(s, "  {HOMEO_CAVEAT}");
    for (name, check) in &report.checks {
        let _ = writeln!(
            s,
            "  check {name}: {} (observed {:e}, threshold {:e}; {})",
            if check.pass { "PASS" } else { "FAIL" },
            check.observed,
            check.threshold,
            check.detail
        );
    }
    if let Some(e) = &report.expectation {
        let _ = writeln!(
            s,
            "  expectation: {} ({})",
            if e.pass { "PASS" } else { "FAIL" },
            e.detail
        );
    }
    let _ = writeln!(s, "  result: {}", if report.all_pass { "PASS" } else { "FAIL" });
    s
}
