//! Charts, projections, attractor distances, grid discretization, and
//! tubular-neighborhood masks.
//!
//! Cylinder charts use (theta, y) with theta = 0 on the attractor fiber and
//! the seam at theta = +/-pi. Planar charts are the identity on a rectangle,
//! embedded in ambient space as the z = 0 plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::radius;

pub type Vec3 = [f64; 3];

/// Trig values this close to zero are snapped exactly, so the seam column
/// theta = pi lands exactly on the fiber {x = 0, z = -rho(y)} and theta = 0
/// exactly on the attractor. One ulp of pi in the angle is ~1.2e-16 of sine.
const TRIG_SNAP: f64 = 1e-15;

/// Tolerance for chart-window membership and round-trip identities.
pub const CHART_TOL: f64 = 1e-12;

/// Fiber radius profile for cylinder charts: `Unit` keeps rho == 1, `Funnel`
/// narrows as rho(y) = sqrt(r(y)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiusProfileId {
    Unit,
    Funnel,
}

impl RadiusProfileId {
    pub fn rho(self, y: f64) -> f64 {
        match self {
            RadiusProfileId::Unit => 1.0,
            RadiusProfileId::Funnel => radius(y).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Chart {
    /// Identity chart on a rectangle of the plane.
    Planar { x: (f64, f64), y: (f64, f64) },
    /// Angle-height chart on a surface of revolution about the y-axis.
    /// u = theta in [-pi, pi) (periodic), v = y in the given window.
    Cylinder {
        y: (f64, f64),
        profile: RadiusProfileId,
    },
}

impl Chart {
    pub fn periodic(&self) -> bool {
        matches!(self, Chart::Cylinder { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Chart::Planar { .. } => "planar",
            Chart::Cylinder { .. } => "cylinder",
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        match self {
            Chart::Planar { x, y } => {
                u >= x.0 - CHART_TOL && u <= x.1 + CHART_TOL && v >= y.0 - CHART_TOL && v <= y.1 + CHART_TOL
            }
            Chart::Cylinder { y, .. } => {
                u.abs() <= std::f64::consts::PI + CHART_TOL && v >= y.0 - CHART_TOL && v <= y.1 + CHART_TOL
            }
        }
    }

    /// Chart coordinates to ambient coordinates. Errors if (u, v) is outside
    /// the chart window.
    pub fn to_ambient(&self, u: f64, v: f64) -> Result<Vec3> {
        if !self.contains(u, v) {
            return Err(Error::OutsideWindow { u, v });
        }
        match self {
            Chart::Planar { .. } => Ok([u, v, 0.0]),
            Chart::Cylinder { profile, .. } => {
                let (s, c) = snap_trig(u);
                let rho = profile.rho(v);
                Ok([rho * s, v, rho * c])
            }
        }
    }

    /// Ambient coordinates back to chart coordinates. For cylinder charts the
    /// angle is atan2(x, z) in (-pi, pi]; the height is passed through.
    pub fn from_ambient(&self, p: Vec3) -> (f64, f64) {
        match self {
            Chart::Planar { .. } => (p[0], p[1]),
            Chart::Cylinder { .. } => (p[0].atan2(p[2]), p[1]),
        }
    }

    /// Radial projection onto the manifold within each fiber: scales (x, z)
    /// to length rho(y). Identity for planar charts. Errors when x = z = 0.
    pub fn project(&self, p: Vec3) -> Result<Vec3> {
        match self {
            Chart::Planar { .. } => Ok([p[0], p[1], 0.0]),
            Chart::Cylinder { profile, .. } => {
                let n = p[0].hypot(p[2]);
                if n == 0.0 {
                    return Err(Error::ProjectionUndefined);
                }
                let rho = profile.rho(p[1]);
                // Dividing by n before scaling keeps axis fibers exact:
                // (0, y, -z) maps to exactly (0, y, -rho).
                Ok([rho * (p[0] / n), p[1], rho * (p[2] / n)])
            }
        }
    }

    /// Constraint residual |x^2 + z^2 - rho(y)^2|; zero for planar charts.
    pub fn residual(&self, p: Vec3) -> f64 {
        match self {
            Chart::Planar { .. } => 0.0,
            Chart::Cylinder { profile, .. } => {
                let rho = profile.rho(p[1]);
                (p[0] * p[0] + p[2] * p[2] - rho * rho).abs()
            }
        }
    }
}

fn snap_trig(u: f64) -> (f64, f64) {
    let (mut s, mut c) = u.sin_cos();
    if s.abs() < TRIG_SNAP {
        s = 0.0;
        c = c.signum();
    }
    if c.abs() < TRIG_SNAP {
        c = 0.0;
        s = s.signum();
    }
    (s, c)
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = t % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Distance-to-attractor formulas. All are exact on their system's manifold;
/// the funnel proxy is an upper bound for the intrinsic distance and is the
/// metric used for convergence decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceFnId {
    /// Minor-arc length |theta| to the fiber theta = 0 on the unit cylinder.
    MinorArc,
    /// Fiber-arc proxy sqrt(r(y)) * |theta| on the funnel.
    FiberArcProxy,
    /// | ||p|| - 1 | to the unit circle in the plane.
    PlanarCircle,
}

#[derive(Clone, Debug)]
pub struct AttractorDesc {
    pub distance: DistanceFnId,
    /// Ambient points removed from the state space.
    pub excluded: Vec<Vec3>,
}

pub fn attractor_distance(p: Vec3, a: &AttractorDesc) -> f64 {
    match a.distance {
        DistanceFnId::MinorArc => p[0].atan2(p[2]).abs(),
        DistanceFnId::FiberArcProxy => radius(p[1]).sqrt() * p[0].atan2(p[2]).abs(),
        DistanceFnId::PlanarCircle => (p[0].hypot(p[1]) - 1.0).abs(),
    }
}

/// Uniform cell grid over a chart window. Cell (i, j) is the closed box
/// [lo_u + (2i+1) du/2, lo_u + (2i+3) du/2] x [...], i.e. the grid origin is
/// offset by half a cell from the window corner. Centers sit at
/// lo + (i+1) * span / n, which keeps distinguished points (the plane's
/// origin, excluded punctures, the seam fiber theta = pi) at cell centers or
/// interiors instead of on shared edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            axis_center(self.u, self.nx, i),
            axis_center(self.v, self.ny, j),
        )
    }

    /// Closed u-bounds of column i.
    pub fn cell_u(&self, i: usize) -> (f64, f64) {
        axis_cell(self.u, self.nx, i)
    }

    /// Closed v-bounds of row j.
    pub fn cell_v(&self, j: usize) -> (f64, f64) {
        axis_cell(self.v, self.ny, j)
    }

    /// A grid must put at least 8 cells on each axis, sit inside the chart
    /// window, and for cylinder charts span exactly one theta period.
    pub fn validate(&self, chart: &Chart) -> Result<()> {
        if self.nx < 8 || self.ny < 8 {
            return Err(Error::BadConfig(format!(
                "grid must have at least 8 cells per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.u.0 < self.u.1 && self.v.0 < self.v.1) {
            return Err(Error::BadConfig("grid window is empty".into()));
        }
        match chart {
            Chart::Planar { x, y } => {
                if self.u.0 < x.0 - CHART_TOL
                    || self.u.1 > x.1 + CHART_TOL
                    || self.v.0 < y.0 - CHART_TOL
                    || self.v.1 > y.1 + CHART_TOL
                {
                    return Err(Error::BadConfig("grid window exceeds chart window".into()));
                }
            }
            Chart::Cylinder { y, .. } => {
                let pi = std::f64::consts::PI;
                if (self.u.0 + pi).abs() > 1e-9 || (self.u.1 - pi).abs() > 1e-9 {
                    return Err(Error::BadConfig(
                        "cylinder grids must span exactly [-pi, pi) in theta".into(),
                    ));
                }
                if self.v.0 < y.0 - CHART_TOL || self.v.1 > y.1 + CHART_TOL {
                    return Err(Error::BadConfig("grid window exceeds chart window".into()));
                }
            }
        }
        Ok(())
    }

    /// Does the closed cell (i, j) contain chart point (u, v)? The u-axis
    /// wraps when `periodic`.
    pub fn cell_contains(&self, i: usize, j: usize, u: f64, v: f64, periodic: bool) -> bool {
        let (vu, vv) = (self.cell_u(i), self.cell_v(j));
        if !(v >= vv.0 && v <= vv.1) {
            return false;
        }
        if u >= vu.0 && u <= vu.1 {
            return true;
        }
        if periodic {
            let two_pi = 2.0 * std::f64::consts::PI;
            let shifted_lo = u + two_pi;
            let shifted_hi = u - two_pi;
            (shifted_lo >= vu.0 && shifted_lo <= vu.1) || (shifted_hi >= vu.0 && shifted_hi <= vu.1)
        } else {
            false
        }
    }
}

fn axis_center(w: (f64, f64), n: usize, i: usize) -> f64 {
    // lo + ((i+1) * span) / n: the product-first ordering makes centers at
    // rational fractions of nice windows exact (0 on [-3,3]/200, pi on
    // [-pi,pi)/128, 0 on [-4,8]/96).
    w.0 + ((i as f64 + 1.0) * (w.1 - w.0)) / n as f64
}

fn axis_cell(w: (f64, f64), n: usize, i: usize) -> (f64, f64) {
    let span = w.1 - w.0;
    let lo = w.0 + ((2 * i + 1) as f64 * span) / (2.0 * n as f64);
    let hi = w.0 + ((2 * i + 3) as f64 * span) / (2.0 * n as f64);
    (lo, hi)
}

/// Tubular-neighborhood shapes around each attractor, as cell predicates over
/// a chart grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TubularSpec {
    /// {1 - w < ||p|| < 1 + w} around the unit circle in the plane.
    Annulus { width: f64 },
    /// {|theta| < w} around the attractor fiber, full height range.
    Strip { width: f64 },
    /// Collar around the punctured circle whose width tapers linearly to zero
    /// toward the puncture direction alpha = 0:
    /// {| ||p|| - 1 | < w * min(1, |alpha| / taper_angle)}.
    TaperedCollar { width: f64, taper_angle: f64 },
}

/// Evaluate a tubular mask at every cell center of `grid`. Returns one bool
/// per cell in row-major (j * nx + i) order.
pub fn tubular_mask(spec: TubularSpec, chart: &Chart, grid: &GridSpec) -> Result<Vec<bool>> {
    grid.validate(chart)?;
    validate_tubular(spec, chart)?;
    let mut keep = Vec::with_capacity(grid.cells());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (cu, cv) = grid.center(i, j);
            keep.push(match spec {
                TubularSpec::Annulus { width } => (cu.hypot(cv) - 1.0).abs() < width,
                TubularSpec::Strip { width } => cu.abs() < width,
                TubularSpec::TaperedCollar { width, taper_angle } => {
                    let alpha = cv.atan2(cu);
                    let local = width * (alpha.abs() / taper_angle).min(1.0);
                    (cu.hypot(cv) - 1.0).abs() < local
                }
            });
        }
    }
    Ok(keep)
}

fn validate_tubular(spec: TubularSpec, chart: &Chart) -> Result<()> {
    match (spec, chart) {
        (TubularSpec::Annulus { width }, Chart::Planar { .. })
        | (TubularSpec::TaperedCollar { width, .. }, Chart::Planar { .. }) => {
            if !(width > 0.0) {
                return Err(Error::InvalidWidth { width, reason: "width must be positive" });
            }
            // A planar collar of width >= 1 swallows the origin, so the mask
            // would not be a tubular neighborhood of the circle at all.
            if width >= 1.0 {
                return Err(Error::InvalidWidth { width, reason: "planar collar needs width < 1" });
            }
            if let TubularSpec::TaperedCollar { taper_angle, .. } = spec {
                if !(taper_angle > 0.0 && taper_angle <= std::f64::consts::PI) {
                    return Err(Error::BadConfig(format!(
                        "taper angle {taper_angle} outside (0, pi]"
                    )));
                }
            }
            Ok(())
        }
        (TubularSpec::Strip { width }, Chart::Cylinder { .. }) => {
            if !(width > 0.0 && width <= std::f64::consts::PI) {
                return Err(Error::InvalidWidth { width, reason: "strip needs width in (0, pi]" });
            }
            Ok(())
        }
        _ => Err(Error::BadConfig(format!(
            "tubular spec {spec:?} does not match a {} chart",
            chart.kind_name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{SystemId, SystemSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn m0_chart() -> Chart {
        SystemSpec::get(SystemId::CylinderM0).chart
    }

    fn funnel_chart() -> Chart {
        SystemSpec::get(SystemId::FunnelM).chart
    }

    #[test]
    fn chart_to_ambient_matches_closed_forms() {
        let p = m0_chart().to_ambient(0.0, 2.0).unwrap();
        assert!((p[0] - 0.0).abs() < CHART_TOL && (p[1] - 2.0).abs() < CHART_TOL && (p[2] - 1.0).abs() < CHART_TOL);

        // theta = pi/2 snaps cos to exactly 0.
        let p = m0_chart().to_ambient(PI / 2.0, 0.0).unwrap();
        assert_eq!(p, [1.0, 0.0, 0.0]);

        // Funnel seam fiber: (pi, 3) -> (0, 3, -sqrt(r(3))), r(3) = 1 - e^{-1/3}.
        let r3 = 1.0 - (-1.0f64 / 3.0).exp();
        let p = funnel_chart().to_ambient(PI, 3.0).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[2] + r3.sqrt()).abs() < CHART_TOL);
        assert!((p[2] + 0.532_418).abs() < 1e-4);
    }

    #[test]
    fn chart_rejects_points_outside_window() {
        assert!(matches!(
            m0_chart().to_ambient(0.0, 5000.0),
            Err(Error::OutsideWindow { .. })
        ));
        let planar = SystemSpec::get(SystemId::CircleR2).chart;
        assert!(matches!(
            planar.to_ambient(9.0, 0.0),
            Err(Error::OutsideWindow { .. })
        ));
    }

    #[test]
    fn round_trip_is_identity_up_to_period() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for chart in [m0_chart(), funnel_chart()] {
            for _ in 0..500 {
                let u = rng.gen_range(-PI..PI);
                let v = rng.gen_range(-4.0..8.0);
                let p = chart.to_ambient(u, v).unwrap();
                let (u2, v2) = chart.from_ambient(p);
                assert!(wrap_angle(u2 - u).abs() < CHART_TOL, "theta {u} -> {u2}");
                assert!((v2 - v).abs() < CHART_TOL);
            }
        }
        // Seam: -pi and pi name the same fiber.
        let p = m0_chart().to_ambient(-PI, 1.0).unwrap();
        let (u2, _) = m0_chart().from_ambient(p);
        assert!(wrap_angle(u2 - PI).abs() < CHART_TOL);
    }

    #[test]
    fn projection_is_idempotent_and_lands_on_manifold() {
        let p = m0_chart().project([2.0, 1.0, 0.0]).unwrap();
        assert_eq!(p, [1.0, 1.0, 0.0]);

        // (0.1, 3, 0.1) on the funnel chart scales both fiber coordinates to
        // sqrt(r(3)) / sqrt(0.02) each.
        let q = funnel_chart().project([0.1, 3.0, 0.1]).unwrap();
        let r3 = 1.0 - (-1.0f64 / 3.0).exp();
        let expect = r3.sqrt() * (0.1 / 0.1f64.hypot(0.1));
        assert!((q[0] - expect).abs() < 1e-12 && (q[2] - expect).abs() < 1e-12);
        assert!((q[0] - 0.376_48).abs() < 1e-4);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for chart in [m0_chart(), funnel_chart()] {
            for _ in 0..300 {
                let p: Vec3 = [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-4.0..8.0),
                    rng.gen_range(-2.0..2.0),
                ];
                if p[0].hypot(p[2]) < 1e-6 {
                    continue;
                }
                let q = chart.project(p).unwrap();
                let q2 = chart.project(q).unwrap();
                for k in 0..3 {
                    assert!((q[k] - q2[k]).abs() < 1e-12);
                }
                assert!(chart.residual(q) < 1e-12);
            }
        }
    }

    #[test]
    fn projection_undefined_on_axis() {
        assert!(matches!(
            m0_chart().project([0.0, 3.0, 0.0]),
            Err(Error::ProjectionUndefined)
        ));
    }

    #[test]
    fn axis_fiber_projection_is_exact() {
        let q = funnel_chart().project([0.0, 2.0, -0.637]).unwrap();
        let rho = RadiusProfileId::Funnel.rho(2.0);
        assert_eq!(q, [0.0, 2.0, -rho]);
    }

    #[test]
    fn attractor_distance_matches_examples() {
        let m0 = SystemSpec::get(SystemId::CylinderM0);
        let m = SystemSpec::get(SystemId::FunnelM);
        let planar = SystemSpec::get(SystemId::CircleR2);

        assert_eq!(attractor_distance([0.0, 5.0, 1.0], &m0.attractor), 0.0);
        let d = attractor_distance([1.0, 0.0, 0.0], &m0.attractor);
        assert!((d - PI / 2.0).abs() < CHART_TOL);

        // Antipodal fiber point on the funnel at height 2.
        let r2 = 1.0 - (-0.5f64).exp();
        let p = [0.0, 2.0, -r2.sqrt()];
        let d = attractor_distance(p, &m.attractor);
        assert!((d - PI * r2.sqrt()).abs() < CHART_TOL);
        assert!((d - 1.970_63).abs() < 1e-3);

        let d = attractor_distance([2.0, 0.0, 0.0], &planar.attractor);
        assert!((d - 1.0).abs() < CHART_TOL);

        // Distance is zero exactly on the attractor, positive off it.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let y = rng.gen_range(-4.0..8.0);
            let on = m.chart.to_ambient(0.0, y).unwrap();
            assert!(attractor_distance(on, &m.attractor) < CHART_TOL);
            let theta = rng.gen_range(0.05..PI);
            let off = m.chart.to_ambient(theta, y).unwrap();
            assert!(attractor_distance(off, &m.attractor) > 1e-4);
        }
    }

    #[test]
    fn minor_arc_never_exceeds_pi() {
        let m0 = SystemSpec::get(SystemId::CylinderM0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let u = rng.gen_range(-PI..=PI);
            let p = m0.chart.to_ambient(u, rng.gen_range(-4.0..4.0)).unwrap();
            let d = attractor_distance(p, &m0.attractor);
            assert!(d <= PI + CHART_TOL && d >= 0.0);
        }
    }

    #[test]
    fn grid_centers_hit_distinguished_points_exactly() {
        let g = GridSpec { u: (-3.0, 3.0), v: (-3.0, 3.0), nx: 200, ny: 200 };
        assert_eq!(g.center(99, 99), (0.0, 0.0));

        let g = GridSpec { u: (-PI, PI), v: (-4.0, 8.0), nx: 128, ny: 96 };
        let (u, v) = g.center(127, 31);
        assert_eq!(u, PI);
        assert_eq!(v, 0.0);
        assert_eq!(g.center(63, 0).0, 0.0);
    }

    #[test]
    fn excluded_point_lies_in_exactly_one_closed_cell() {
        let g = GridSpec { u: (-3.0, 3.0), v: (-3.0, 3.0), nx: 200, ny: 200 };
        let mut hits = Vec::new();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if g.cell_contains(i, j, 1.0, 0.0, false) {
                    hits.push((i, j));
                }
            }
        }
        assert_eq!(hits, vec![(132, 99)]);
    }

    #[test]
    fn grid_validation_rejects_bad_specs() {
        let chart = SystemSpec::get(SystemId::CircleR2).chart;
        let tiny = GridSpec { u: (-3.0, 3.0), v: (-3.0, 3.0), nx: 4, ny: 200 };
        assert!(tiny.validate(&chart).is_err());
        let wide = GridSpec { u: (-9.0, 9.0), v: (-3.0, 3.0), nx: 16, ny: 16 };
        assert!(wide.validate(&chart).is_err());
        let partial = GridSpec { u: (-1.0, 1.0), v: (-4.0, 4.0), nx: 16, ny: 16 };
        assert!(partial.validate(&m0_chart()).is_err());
        let full = GridSpec { u: (-PI, PI), v: (-4.0, 4.0), nx: 16, ny: 16 };
        assert!(full.validate(&m0_chart()).is_ok());
    }

    #[test]
    fn tubular_masks_have_expected_shapes() {
        let planar = SystemSpec::get(SystemId::CircleR2).chart;
        let g = GridSpec { u: (-3.0, 3.0), v: (-3.0, 3.0), nx: 64, ny: 64 };
        let annulus = tubular_mask(TubularSpec::Annulus { width: 0.3 }, &planar, &g).unwrap();
        let kept = annulus.iter().filter(|&&k| k).count();
        assert!(kept > 0 && kept < g.cells());

        // Collar width tapers monotonically toward alpha = 0: at fixed radius
        // just off the circle, kept cells cannot reappear as |alpha| shrinks.
        let collar = tubular_mask(
            TubularSpec::TaperedCollar { width: 0.2, taper_angle: 0.5 },
            &planar,
            &g,
        )
        .unwrap();
        let kept_collar = collar.iter().filter(|&&k| k).count();
        assert!(kept_collar > 0 && kept_collar < kept);

        let cyl = m0_chart();
        let gc = GridSpec { u: (-PI, PI), v: (-4.0, 4.0), nx: 64, ny: 16 };
        let strip = tubular_mask(TubularSpec::Strip { width: 0.5 }, &cyl, &gc).unwrap();
        for j in 0..gc.ny {
            for i in 0..gc.nx {
                let (cu, _) = gc.center(i, j);
                assert_eq!(strip[gc.index(i, j)], cu.abs() < 0.5);
            }
        }
    }

    #[test]
    fn collar_width_is_monotone_in_angle() {
        // The predicate radius band at angle a has half-width w*min(1,|a|/a0);
        // check the band is nested as |a| grows.
        let w = 0.2;
        let a0 = 0.5;
        let band = |alpha: f64| w * (alpha.abs() / a0).min(1.0);
        let mut prev = 0.0;
        let mut alpha = 0.0;
        while alpha <= PI {
            let cur = band(alpha);
            assert!(cur + 1e-15 >= prev);
            prev = cur;
            alpha += 0.01;
        }
    }

    #[test]
    fn tubular_width_validation() {
        let planar = SystemSpec::get(SystemId::CircleR2).chart;
        let g = GridSpec { u: (-3.0, 3.0), v: (-3.0, 3.0), nx: 16, ny: 16 };
        assert!(matches!(
            tubular_mask(TubularSpec::Annulus { width: 1.0 }, &planar, &g),
            Err(Error::InvalidWidth { .. })
        ));
        assert!(matches!(
            tubular_mask(TubularSpec::Annulus { width: -0.1 }, &planar, &g),
            Err(Error::InvalidWidth { .. })
        ));
        assert!(tubular_mask(TubularSpec::Strip { width: 0.5 }, &planar, &g).is_err());
    }
}
