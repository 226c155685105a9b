//! The system catalog: four flows sharing one convergence story.
//!
//! Two live in the plane (a gradient-like field attracted to the unit circle,
//! with and without a puncture at (1, 0)); two live on surfaces of revolution
//! (the unit cylinder and a funnel that narrows as y grows). The funnel field
//! is defined as the pushforward of the cylinder field under an explicit
//! diffeomorphism h, so trajectories correspond exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{attractor_distance, AttractorDesc, Chart, DistanceFnId, RadiusProfileId, Vec3};

/// Below this height the smooth cutoffs e^{-1/y} underflow anyway; clamping
/// avoids 1/y overflow near +0 and lets the formulas extend across y <= 0.
pub const Y_UNDERFLOW: f64 = 1e-3;

/// Squared-radius profile r(y) of the funnel: 1 - e^{-1/y} for y above the
/// cutoff, 1 otherwise. Smooth, decreasing, with r -> 0 as y -> infinity.
pub fn radius(y: f64) -> f64 {
    if y <= Y_UNDERFLOW {
        1.0
    } else {
        1.0 - (-1.0 / y).exp()
    }
}

/// r'(y) = -e^{-1/y} / y^2 above the cutoff, 0 otherwise.
pub fn radius_prime(y: f64) -> f64 {
    if y <= Y_UNDERFLOW {
        0.0
    } else {
        -(-1.0 / y).exp() / (y * y)
    }
}

/// Vertical drift g(y) = e^{-1/y} for y above the cutoff, 0 otherwise. Flat
/// to all orders at 0, so the half-cylinder y <= 0 is frozen vertically.
pub fn vertical_speed(y: f64) -> f64 {
    if y <= Y_UNDERFLOW {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

/// Residual above which a state no longer counts as on-manifold.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// Rotational part of the cylinder field in fiber coordinates q = (x, z):
/// (-x z, x^2). Vanishes exactly on x = 0 and rotates toward z = +1.
pub fn reduced_circle_field(q: [f64; 2]) -> [f64; 2] {
    [-q[0] * q[1], q[0] * q[0]]
}

pub(crate) fn vf_cylinder_m0_raw(p: Vec3) -> Vec3 {
    let [x, y, z] = p;
    [-x * z, vertical_speed(y), x * x]
}

/// Velocity on the unit cylinder: (-xz, g(y), x^2). Errors when the point is
/// off the cylinder, where the formula no longer means anything.
pub fn vf_cylinder_m0(p: Vec3) -> Result<Vec3> {
    let res = (p[0] * p[0] + p[2] * p[2] - 1.0).abs();
    if res > MANIFOLD_TOL {
        return Err(Error::OffManifold { residual: res, tol: MANIFOLD_TOL });
    }
    Ok(vf_cylinder_m0_raw(p))
}

/// The diffeomorphism h from the unit cylinder to the funnel:
/// (x, y, z) -> (sqrt(r(y)) x, y, sqrt(r(y)) z). Total; no manifold check.
pub fn conjugacy_h_unchecked(q: Vec3) -> Vec3 {
    let s = radius(q[1]).sqrt();
    [s * q[0], q[1], s * q[2]]
}

/// h restricted to the cylinder (errors off-manifold).
pub fn conjugacy_h(q: Vec3) -> Result<Vec3> {
    let res = (q[0] * q[0] + q[2] * q[2] - 1.0).abs();
    if res > MANIFOLD_TOL {
        return Err(Error::OffManifold { residual: res, tol: MANIFOLD_TOL });
    }
    Ok(conjugacy_h_unchecked(q))
}

/// Inverse of h from the funnel back to the cylinder: divides the fiber
/// coordinates by sqrt(r(y)). Total away from r = 0 (r >= r(window top) > 0
/// on every chart window we use).
pub fn conjugacy_h_inv(p: Vec3) -> Vec3 {
    let s = radius(p[1]).sqrt();
    [p[0] / s, p[1], p[2] / s]
}

/// Differential of h at q applied to v: since h scales fibers by
/// s(y) = sqrt(r(y)), Dh = diag(s, 1, s) plus the off-diagonal terms
/// q_x s'(y), q_z s'(y) with s' = r' / (2 sqrt(r)).
pub fn conjugacy_dh(q: Vec3, v: Vec3) -> Vec3 {
    let r = radius(q[1]);
    let s = r.sqrt();
    let sp = radius_prime(q[1]) / (2.0 * s);
    [
        s * v[0] + q[0] * sp * v[1],
        v[1],
        s * v[2] + q[2] * sp * v[1],
    ]
}

pub(crate) fn vf_funnel_m_raw(p: Vec3) -> Vec3 {
    let q = conjugacy_h_inv(p);
    conjugacy_dh(q, vf_cylinder_m0_raw(q))
}

/// Velocity on the funnel, the pushforward of the cylinder field under h.
/// Errors when the point is off the funnel surface.
pub fn vf_funnel_m(p: Vec3) -> Result<Vec3> {
    let r = radius(p[1]);
    let res = (p[0] * p[0] + p[2] * p[2] - r).abs();
    if res > MANIFOLD_TOL {
        return Err(Error::OffManifold { residual: res, tol: MANIFOLD_TOL });
    }
    Ok(vf_funnel_m_raw(p))
}

/// Planar field -2 (||p|| - 1) p / ||p||: gradient descent for
/// (||p|| - 1)^2, attracted to the unit circle. The origin, where the
/// direction p / ||p|| degenerates, is mapped to zero and stays put.
pub fn vf_circle_gradient(p: [f64; 2]) -> [f64; 2] {
    let n = p[0].hypot(p[1]);
    if n == 0.0 {
        return [0.0, 0.0];
    }
    let f = -2.0 * (n - 1.0) / n;
    [f * p[0], f * p[1]]
}

fn vf_planar_raw(p: Vec3) -> Vec3 {
    let v = vf_circle_gradient([p[0], p[1]]);
    [v[0], v[1], 0.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemId {
    #[serde(rename = "CIRCLE_R2")]
    CircleR2,
    #[serde(rename = "PUNCTURED_R2")]
    PuncturedR2,
    #[serde(rename = "CYLINDER_M0")]
    CylinderM0,
    #[serde(rename = "FUNNEL_M")]
    FunnelM,
}

impl SystemId {
    pub const ALL: [SystemId; 4] = [
        SystemId::CircleR2,
        SystemId::PuncturedR2,
        SystemId::CylinderM0,
        SystemId::FunnelM,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::CircleR2 => "CIRCLE_R2",
            SystemId::PuncturedR2 => "PUNCTURED_R2",
            SystemId::CylinderM0 => "CYLINDER_M0",
            SystemId::FunnelM => "FUNNEL_M",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CIRCLE_R2" => Ok(SystemId::CircleR2),
            "PUNCTURED_R2" => Ok(SystemId::PuncturedR2),
            "CYLINDER_M0" => Ok(SystemId::CylinderM0),
            "FUNNEL_M" => Ok(SystemId::FunnelM),
            other => Err(Error::UnknownSystem(other.to_string())),
        }
    }
}

/// Axis-aligned box in chart coordinates that trajectories must stay in.
/// `u` is None for periodic charts (the angle cannot leave).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartBox {
    pub u: Option<(f64, f64)>,
    pub v: (f64, f64),
}

impl ChartBox {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        if let Some((lo, hi)) = self.u {
            if u < lo || u > hi {
                return false;
            }
        }
        v >= self.v.0 && v <= self.v.1
    }
}

/// Everything the integrator and the basin sweep need to know about one
/// system: where it lives, how fast it moves, what it converges to.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub id: SystemId,
    pub chart: Chart,
    pub attractor: AttractorDesc,
    pub bounds: ChartBox,
}

impl SystemSpec {
    pub fn get(id: SystemId) -> SystemSpec {
        let planar_chart = Chart::Planar { x: (-4.0, 4.0), y: (-4.0, 4.0) };
        let planar_bounds = ChartBox { u: Some((-4.0, 4.0)), v: (-4.0, 4.0) };
        let cyl_bounds = ChartBox { u: None, v: (-6.0, 1200.0) };
        match id {
            SystemId::CircleR2 => SystemSpec {
                id,
                chart: planar_chart,
                attractor: AttractorDesc { distance: DistanceFnId::PlanarCircle, excluded: vec![] },
                bounds: planar_bounds,
            },
            SystemId::PuncturedR2 => SystemSpec {
                id,
                chart: planar_chart,
                attractor: AttractorDesc {
                    distance: DistanceFnId::PlanarCircle,
                    excluded: vec![[1.0, 0.0, 0.0]],
                },
                bounds: planar_bounds,
            },
            SystemId::CylinderM0 => SystemSpec {
                id,
                chart: Chart::Cylinder { y: (-6.0, 1200.0), profile: RadiusProfileId::Unit },
                attractor: AttractorDesc { distance: DistanceFnId::MinorArc, excluded: vec![] },
                bounds: cyl_bounds,
            },
            SystemId::FunnelM => SystemSpec {
                id,
                chart: Chart::Cylinder { y: (-6.0, 1200.0), profile: RadiusProfileId::Funnel },
                attractor: AttractorDesc { distance: DistanceFnId::FiberArcProxy, excluded: vec![] },
                bounds: cyl_bounds,
            },
        }
    }

    /// Velocity without a manifold check; the integrator re-projects each
    /// step, so states stay within MANIFOLD_TOL by construction.
    pub fn velocity(&self, p: Vec3) -> Vec3 {
        match self.id {
            SystemId::CircleR2 | SystemId::PuncturedR2 => vf_planar_raw(p),
            SystemId::CylinderM0 => vf_cylinder_m0_raw(p),
            SystemId::FunnelM => vf_funnel_m_raw(p),
        }
    }

    pub fn residual(&self, p: Vec3) -> f64 {
        self.chart.residual(p)
    }

    pub fn distance(&self, p: Vec3) -> f64 {
        attractor_distance(p, &self.attractor)
    }

    pub fn is_excluded(&self, p: Vec3) -> bool {
        self.attractor.excluded.iter().any(|e| {
            (p[0] - e[0]).abs() <= 1e-12 && (p[1] - e[1]).abs() <= 1e-12 && (p[2] - e[2]).abs() <= 1e-12
        })
    }

    pub fn in_bounds(&self, p: Vec3) -> bool {
        let (u, v) = self.chart.from_ambient(p);
        self.bounds.contains(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn radius_profile_matches_closed_forms() {
        // r(3) = 1 - e^{-1/3}, computed independently.
        assert!((radius(3.0) - 0.283_468_689_426_210_73).abs() < 1e-15);
        assert!((radius(2.0) - 0.393_469_340_287_366_6).abs() < 1e-15);
        assert!((radius(1.0) - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert!((radius(8.0) - 0.117_503_097_415_404_54).abs() < 1e-15);
        assert!((radius_prime(2.0) - (-0.151_632_664_928_158_36)).abs() < 1e-15);
        assert!((vertical_speed(2.0) - 0.606_530_659_712_633_4).abs() < 1e-15);

        // Exact on the frozen branch.
        assert_eq!(radius(0.0), 1.0);
        assert_eq!(radius(-5.0), 1.0);
        assert_eq!(radius(Y_UNDERFLOW), 1.0);
        assert_eq!(radius_prime(0.0), 0.0);
        assert_eq!(vertical_speed(-1.0), 0.0);
    }

    #[test]
    fn radius_is_monotone_decreasing_above_cutoff() {
        let mut prev = radius(Y_UNDERFLOW);
        let mut y = 0.01;
        while y < 50.0 {
            let r = radius(y);
            assert!(r <= prev && r > 0.0 && r <= 1.0);
            assert!(radius_prime(y) <= 0.0);
            prev = r;
            y += 0.07;
        }
    }

    #[test]
    fn cylinder_field_matches_examples() {
        // (1, 0, 0): vertical speed g(0) = 0, rotation (0, 1).
        let v = vf_cylinder_m0([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, [0.0, 0.0, 1.0]);

        // On the attractor fiber x = 0 the rotation vanishes exactly.
        let v = vf_cylinder_m0([0.0, 3.0, 1.0]).unwrap();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[2], 0.0);
        assert!((v[1] - (-1.0f64 / 3.0).exp()).abs() < 1e-15);

        // Seam fiber z = -1 is stationary in x, z and drifts upward.
        let v = vf_cylinder_m0([0.0, 2.0, -1.0]).unwrap();
        assert_eq!([v[0], v[2]], [0.0, 0.0]);
        assert!(v[1] > 0.0);

        assert!(matches!(
            vf_cylinder_m0([2.0, 0.0, 0.0]),
            Err(Error::OffManifold { .. })
        ));
    }

    #[test]
    fn funnel_field_matches_hand_computed_example() {
        // On-attractor point p = (0, 2, sqrt(r(2))) pulls back to q = (0, 2, 1);
        // it rides up the narrowing funnel, so dz/dt = s'(2) g(2) with
        // s' = r' / (2 sqrt(r)) < 0.
        let r2 = radius(2.0);
        let p = [0.0, 2.0, r2.sqrt()];
        let v = vf_funnel_m(p).unwrap();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - vertical_speed(2.0)).abs() < 1e-15);
        assert!((v[2] - (-0.073_309_470_472_815_27)).abs() < 1e-12);

        // The antipodal seam point drifts toward the axis from the other
        // side: z velocity flipped.
        let w = vf_funnel_m([0.0, 2.0, -r2.sqrt()]).unwrap();
        assert_eq!(w[0], 0.0);
        assert!((w[2] + v[2]).abs() < 1e-15);

        assert!(matches!(
            vf_funnel_m([1.0, 2.0, 0.0]),
            Err(Error::OffManifold { .. })
        ));
    }

    #[test]
    fn funnel_field_is_tangent_to_the_surface() {
        // <X(p), grad c(p)> = 0 for c = x^2 + z^2 - r(y).
        let funnel = SystemSpec::get(SystemId::FunnelM);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let theta = rng.gen_range(-PI..PI);
            let y = rng.gen_range(-4.0..8.0);
            let p = funnel.chart.to_ambient(theta, y).unwrap();
            let x = funnel.velocity(p);
            let grad = [2.0 * p[0], -radius_prime(p[1]), 2.0 * p[2]];
            let dot = x[0] * grad[0] + x[1] * grad[1] + x[2] * grad[2];
            assert!(dot.abs() < 1e-12, "tangency defect {dot:e} at y = {y}");
        }
    }

    #[test]
    fn planar_field_matches_examples() {
        assert_eq!(vf_circle_gradient([0.0, 0.0]), [0.0, 0.0]);
        // On the circle the field vanishes.
        let v = vf_circle_gradient([0.6, 0.8]);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        // At (2, 0): -2 * (2 - 1) * (1, 0) = (-2, 0).
        assert_eq!(vf_circle_gradient([2.0, 0.0]), [-2.0, 0.0]);
        // Inward points outward: at (0.5, 0), speed +1 in x.
        let v = vf_circle_gradient([0.5, 0.0]);
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1] == 0.0);
    }

    #[test]
    fn conjugacy_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let theta: f64 = rng.gen_range(-PI..PI);
            let y = rng.gen_range(-4.0..8.0);
            let q = [theta.sin(), y, theta.cos()];
            let p = conjugacy_h(q).unwrap();
            // h lands on the funnel surface.
            assert!((p[0] * p[0] + p[2] * p[2] - radius(y)).abs() < 1e-12);
            let q2 = conjugacy_h_inv(p);
            for k in 0..3 {
                assert!((q[k] - q2[k]).abs() < 1e-12);
            }
        }
        assert!(conjugacy_h([2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn conjugacy_differential_example() {
        // Dh at q = (0, 2, -1) applied to e_y: the z-component picks up
        // -(-1) * r'(2) / (2 sqrt(r(2))).
        let d = conjugacy_dh([0.0, 2.0, -1.0], [0.0, 1.0, 0.0]);
        let expect = -radius_prime(2.0) / (2.0 * radius(2.0).sqrt());
        assert_eq!(d[1], 1.0);
        assert_eq!(d[0], 0.0);
        assert!((d[2] - expect).abs() < 1e-15);
        // Fiber directions scale by sqrt(r).
        let d = conjugacy_dh([1.0, 2.0, 0.0], [0.0, 0.0, 3.0]);
        assert!((d[2] - 3.0 * radius(2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reduced_field_spirals_to_top_of_circle() {
        // Euler-integrate the reduced planar field from near the seam; it
        // should approach (0, 1).
        let mut q = [0.05f64, -(1.0f64 - 0.05f64 * 0.05).sqrt()];
        let h = 1e-3;
        for _ in 0..40_000 {
            let v = reduced_circle_field(q);
            q = [q[0] + h * v[0], q[1] + h * v[1]];
            let n = q[0].hypot(q[1]);
            q = [q[0] / n, q[1] / n];
        }
        assert!(q[0].abs() < 1e-2 && q[1] > 0.99);
    }

    #[test]
    fn system_ids_round_trip_strings() {
        for id in SystemId::ALL {
            assert_eq!(id.as_str().parse::<SystemId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{id}\""));
            assert_eq!(serde_json::from_str::<SystemId>(&json).unwrap(), id);
        }
        assert!(matches!(
            "TORUS".parse::<SystemId>(),
            Err(Error::UnknownSystem(_))
        ));
    }

    #[test]
    fn catalog_specs_are_coherent() {
        for id in SystemId::ALL {
            let sys = SystemSpec::get(id);
            assert_eq!(sys.id, id);
            assert_eq!(sys.chart.periodic(), sys.bounds.u.is_none());
            // The attractor itself is at distance zero and in bounds.
            let on = match id {
                SystemId::CircleR2 | SystemId::PuncturedR2 => [0.0, 1.0, 0.0],
                _ => sys.chart.to_ambient(0.0, 0.0).unwrap(),
            };
            assert!(sys.distance(on) < 1e-12);
            assert!(sys.in_bounds(on));
            assert!(sys.residual(on) < 1e-12);
        }
        let punctured = SystemSpec::get(SystemId::PuncturedR2);
        assert!(punctured.is_excluded([1.0, 0.0, 0.0]));
        assert!(!punctured.is_excluded([1.0, 1e-6, 0.0]));
        assert!(!SystemSpec::get(SystemId::CircleR2).is_excluded([1.0, 0.0, 0.0]));
    }
}
