//! Where the free-detection beam lands on the road, and how long one sweep
//! over the cross-traffic region takes.
//!
//! The SBS sits at height `h` above the origin. A beam pointing at pitch
//! `θ0` and azimuth `φ0` hits the ground at `h tanθ0 (cosφ0, sinφ0)`.

use crate::array_geometry::Direction;
use crate::{Error, Result, Scalar};

/// Default cap on scan-loop iterations.
pub const DEFAULT_ITERATION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneGeometry<T> {
    pub h: T,
    pub w_r: T,
    pub r_max_s: T,
    /// Beam dwell, s.
    pub tau: T,
}

impl<T: Scalar> SceneGeometry<T> {
    pub fn new(h: T, w_r: T, r_max_s: T, tau: T) -> Result<Self> {
        for (name, v) in [("height", h), ("road width", w_r), ("sensing range", r_max_s), ("dwell", tau)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { h, w_r, r_max_s, tau })
    }

    /// 10 m mast, 20 m road, 10 ms dwell.
    pub fn with_range(r_max_s: T) -> Result<Self> {
        Self::new(T::lit(10.0), T::lit(20.0), r_max_s, T::lit(0.010))
    }
}

/// Pitch and azimuth beamwidths, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamWidths<T> {
    pub delta_theta_deg: T,
    pub delta_phi_deg: T,
}

impl<T: Scalar> BeamWidths<T> {
    pub fn new(delta_theta_deg: T, delta_phi_deg: T) -> Result<Self> {
        if !(delta_theta_deg > T::zero() && delta_phi_deg > T::zero())
            || !(delta_theta_deg.is_finite() && delta_phi_deg.is_finite())
        {
            return Err(Error::domain(format!(
                "beamwidths must be positive, got ({delta_theta_deg}, {delta_phi_deg})"
            )));
        }
        Ok(Self { delta_theta_deg, delta_phi_deg })
    }

    /// Angular radius within which a DCB blocks a dwell.
    pub fn exclusion_radius(&self) -> T {
        self.delta_theta_deg.max(self.delta_phi_deg) / T::lit(2.0)
    }
}

/// Elliptical ground footprint of a beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint<T> {
    pub center: (T, T),
    pub r_a: T,
    pub r_b: T,
}

/// Ground point under the beam axis.
fn center<T: Scalar>(h: T, phi_deg: T, theta_deg: T) -> (T, T) {
    let rho = h * theta_deg.to_radians().tan();
    let phi = phi_deg.to_radians();
    (rho * phi.cos(), rho * phi.sin())
}

/// `r_a = h Δθ / cos²θ0` (small-angle form), `r_b = h tanΔφ / (2 cosθ0)`.
pub fn footprint<T: Scalar>(geom: &SceneGeometry<T>, dir: &Direction<T>, widths: &BeamWidths<T>) -> Result<Footprint<T>> {
    let theta = dir.theta_deg();
    if !(theta < T::lit(90.0)) {
        return Err(Error::domain(format!("beam pitch {theta}° does not reach the ground")));
    }
    let cos_t = theta.to_radians().cos();
    let center = if dir.phi_deg().abs() == T::lit(90.0) {
        // keep X0 exactly zero
        (T::zero(), geom.h * theta.to_radians().tan() * dir.phi_deg().signum())
    } else {
        center(geom.h, dir.phi_deg(), theta)
    };
    Ok(Footprint {
        center,
        r_a: geom.h * widths.delta_theta_deg.to_radians() / (cos_t * cos_t),
        r_b: geom.h * widths.delta_phi_deg.to_radians().tan() / (T::lit(2.0) * cos_t),
    })
}

/// The two road strips, clipped to the sensing sphere.
pub fn in_road_region<T: Scalar>(geom: &SceneGeometry<T>, (x, y): (T, T)) -> bool {
    let strips = (x >= T::zero() && x <= geom.w_r) || (y >= -geom.w_r && y <= T::zero());
    strips && within_range(geom, (x, y))
}

fn within_range<T: Scalar>(geom: &SceneGeometry<T>, (x, y): (T, T)) -> bool {
    x * x + y * y + geom.h * geom.h <= geom.r_max_s * geom.r_max_s
}

/// True when some DCB lies within the exclusion radius of `dir`.
pub fn dcb_blocks<T: Scalar>(dir: &Direction<T>, dcb_dirs: &[Direction<T>], widths: &BeamWidths<T>) -> bool {
    let radius = widths.exclusion_radius();
    dcb_dirs.iter().any(|d| d.angle_to(dir) <= radius)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell<T> {
    /// Azimuth in `[0, 360)` as the scan counts it.
    pub phi_deg: T,
    pub theta_deg: T,
    pub center: (T, T),
    pub in_region: bool,
    pub dcb_blocked: bool,
}

impl<T: Scalar> ScanCell<T> {
    pub fn counted(&self) -> bool {
        self.in_region && !self.dcb_blocked
    }

    pub fn direction(&self) -> Result<Direction<T>> {
        Direction::new(self.phi_deg, self.theta_deg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult<T> {
    pub dwell_count: usize,
    /// `dwell_count · τ`
    pub t_sc: T,
    pub cells: Vec<ScanCell<T>>,
}

impl<T: Scalar> ScanResult<T> {
    /// Directions the FDB actually dwells on.
    pub fn dwells(&self) -> Result<Vec<Direction<T>>> {
        self.cells.iter().filter(|c| c.counted()).map(|c| c.direction()).collect()
    }
}

pub fn scanning_period<T: Scalar>(
    geom: &SceneGeometry<T>,
    widths: &BeamWidths<T>,
    dcb_dirs: &[Direction<T>],
) -> Result<ScanResult<T>> {
    scanning_period_capped(geom, widths, dcb_dirs, DEFAULT_ITERATION_CAP)
}

pub fn scanning_period_capped<T: Scalar>(
    geom: &SceneGeometry<T>,
    widths: &BeamWidths<T>,
    dcb_dirs: &[Direction<T>],
    cap: usize,
) -> Result<ScanResult<T>> {
    let full = T::lit(360.0);
    let right = T::lit(90.0);
    let mut phi = T::zero();
    let mut theta = widths.delta_theta_deg;
    let mut pos = center(geom.h, phi, theta);
    let mut cells = Vec::new();
    let mut dwell_count = 0usize;
    // A pitch at or past the horizon never meets the ground, so the loop
    // also stops there.
    while theta < right && within_range(geom, pos) {
        if cells.len() >= cap {
            return Err(Error::IterationCap {
                cap,
                context: format!(
                    "scan still inside the sensing range at ({phi}°, {theta}°) with widths ({}°, {}°)",
                    widths.delta_theta_deg, widths.delta_phi_deg
                ),
            });
        }
        phi = phi + widths.delta_phi_deg;
        if phi >= full {
            theta = theta + widths.delta_theta_deg;
            phi = phi - full;
        }
        if theta >= right {
            break;
        }
        pos = center(geom.h, phi, theta);
        let in_region = in_road_region(geom, pos);
        let dcb_blocked = in_region && dcb_blocks(&Direction::new(phi, theta)?, dcb_dirs, widths);
        if in_region && !dcb_blocked {
            dwell_count += 1;
        }
        cells.push(ScanCell { phi_deg: phi, theta_deg: theta, center: pos, in_region, dcb_blocked });
    }
    Ok(ScanResult { dwell_count, t_sc: T::from_usize_lossy(dwell_count) * geom.tau, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_budget::{max_sensing_range, RadioParams};
    use proptest::prelude::*;

    fn geom(r: f64) -> SceneGeometry<f64> {
        SceneGeometry::with_range(r).unwrap()
    }

    fn widths(t: f64, p: f64) -> BeamWidths<f64> {
        BeamWidths::new(t, p).unwrap()
    }

    #[test]
    fn validation() {
        assert!(SceneGeometry::new(0.0, 20.0, 500.0, 0.01).is_err());
        assert!(SceneGeometry::new(10.0, 20.0, f64::INFINITY, 0.01).is_err());
        assert!(BeamWidths::new(0.0, 3.0).is_err());
    }

    #[test]
    fn footprint_hand_values() {
        let g = geom(500.0);
        let f = footprint(&g, &Direction::new(30.0, 45.0).unwrap(), &widths(2.0, 3.0)).unwrap();
        assert!((f.center.0 - 8.660254037844386).abs() < 1e-12);
        assert!((f.center.1 - 4.999999999999998).abs() < 1e-12);
        assert!((f.r_a - 0.6981317007977317).abs() < 1e-12);
        assert!((f.r_b - 0.370578961179663).abs() < 1e-12);
        assert!(f.r_a >= f.r_b && f.r_b > 0.0);
    }

    #[test]
    fn footprint_edge_cases() {
        let g = geom(500.0);
        let w = widths(2.0, 3.0);
        let f = footprint(&g, &Direction::new(17.0, 0.01).unwrap(), &w).unwrap();
        assert!(f.center.0.hypot(f.center.1) < 1e-2);
        let f = footprint(&g, &Direction::new(90.0, 60.0).unwrap(), &w).unwrap();
        assert_eq!(f.center.0, 0.0);
        assert!(footprint(&g, &Direction::new(0.0, 90.0).unwrap(), &w).is_err());
    }

    #[test]
    fn road_region() {
        let g = geom(500.0);
        assert!(in_road_region(&g, (0.0, 0.0)));
        assert!(in_road_region(&g, (5.0, 300.0)));
        assert!(in_road_region(&g, (-300.0, -5.0)));
        assert!(!in_road_region(&g, (21.0, 1.0)));
        assert!(!in_road_region(&g, (-5.0, 5.0)));
        assert!(!in_road_region(&g, (5.0, 500.0)));
        let tight = geom(10.0);
        assert!(in_road_region(&tight, (0.0, 0.0)));
        assert!(!in_road_region(&tight, (0.1, 0.0)));
    }

    #[test]
    fn period_is_multiple_of_dwell() {
        let r = scanning_period(&geom(532.0), &widths(2.0, 3.0), &[]).unwrap();
        assert!(r.dwell_count > 0);
        assert_eq!(r.t_sc, r.dwell_count as f64 * 0.010);
        assert_eq!(r.cells.iter().filter(|c| c.counted()).count(), r.dwell_count);
    }

    #[test]
    fn wider_beams_scan_faster() {
        let g = geom(532.0);
        let narrow = scanning_period(&g, &widths(2.0, 3.0), &[]).unwrap();
        let wide = scanning_period(&g, &widths(4.0, 6.0), &[]).unwrap();
        assert!(wide.t_sc <= narrow.t_sc);
    }

    #[test]
    fn blocking_one_cell_costs_one_dwell() {
        let g = geom(532.0);
        let w = widths(2.0, 3.0);
        let free = scanning_period(&g, &w, &[]).unwrap();
        let cell = free.cells.iter().find(|c| c.counted() && c.theta_deg > 40.0).unwrap();
        let dcb = cell.direction().unwrap();
        let blocked = scanning_period(&g, &w, &[dcb]).unwrap();
        assert_eq!(blocked.dwell_count + 1, free.dwell_count);
        assert!((free.t_sc - blocked.t_sc - 0.010).abs() < 1e-12);
        assert!(blocked.dwells().unwrap().iter().all(|d| d.angle_to(&dcb) > w.exclusion_radius()));
    }

    #[test]
    fn period_shrinks_as_sensing_power_drops() {
        let w = widths(2.0, 3.0);
        let mut prev = f64::INFINITY;
        for i in 0..=9 {
            let rho = i as f64 / 10.0;
            let r = max_sensing_range(&RadioParams::ism_24ghz(rho)).unwrap();
            let t = scanning_period(&geom(r), &w, &[]).unwrap().t_sc;
            assert!(t <= prev, "rho={rho}");
            prev = t;
        }
    }

    #[test]
    fn iteration_cap_reported() {
        match scanning_period_capped(&geom(532.0), &widths(0.5, 0.5), &[], 1000) {
            Err(Error::IterationCap { cap, .. }) => assert_eq!(cap, 1000),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn f32_scan() {
        let g = SceneGeometry::<f32>::with_range(300.0).unwrap();
        let r = scanning_period(&g, &BeamWidths::new(2.0f32, 3.0).unwrap(), &[]).unwrap();
        assert!(r.dwell_count > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn terminates_and_is_monotone_in_range(dt in 0.5f64..8.0, dp in 0.5f64..8.0, r in 20.0f64..600.0, dr in 0.0f64..200.0) {
            let w = widths(dt, dp);
            let a = scanning_period(&geom(r), &w, &[]).unwrap();
            let b = scanning_period(&geom(r + dr), &w, &[]).unwrap();
            prop_assert!(a.dwell_count <= b.dwell_count);
        }
    }
}
