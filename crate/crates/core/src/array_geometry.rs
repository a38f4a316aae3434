//! Concentric circular array of the base station.
//!
//! Layer 0 is the single phase-reference element at the origin. Layers
//! `1..p` are rings of `2^b` elements; ring `m` has radius `m * d` and
//! element `n` sits at polar angle `n * 2 pi / 2^b`. Steering-vector entries
//! are ordered layer-major, then by ascending polar index.

use std::fmt;

use num_complex::Complex;

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig<T> {
    layers: usize,
    ring_exponent: u32,
    spacing: T,
    wavelength: T,
}

impl<T: Scalar> ArrayConfig<T> {
    /// `layers` counts the reference element as layer 0, so a 16-ring array
    /// has `layers = 17`.
    pub fn new(layers: usize, ring_exponent: u32, spacing: T, wavelength: T) -> Result<Self> {
        if layers < 1 {
            return Err(Error::domain("array needs at least one layer"));
        }
        if !(1..=20).contains(&ring_exponent) {
            return Err(Error::domain(format!(
                "ring exponent b must lie in 1..=20, got {ring_exponent}"
            )));
        }
        if !(spacing > T::zero() && spacing.is_finite()) {
            return Err(Error::domain(format!("layer spacing must be positive, got {spacing}")));
        }
        if !(wavelength > T::zero() && wavelength.is_finite()) {
            return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(Self { layers, ring_exponent, spacing, wavelength })
    }

    /// Half-wavelength layer spacing.
    pub fn half_wavelength(layers: usize, ring_exponent: u32, wavelength: T) -> Result<Self> {
        Self::new(layers, ring_exponent, wavelength / T::lit(2.0), wavelength)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn ring_exponent(&self) -> u32 {
        self.ring_exponent
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    /// Elements per ring, `2^b`.
    pub fn ring_size(&self) -> usize {
        1usize << self.ring_exponent
    }

    /// Total element count `(p - 1) 2^b + 1`.
    pub fn element_count(&self) -> usize {
        (self.layers - 1) * self.ring_size() + 1
    }

    /// Angular pitch between neighbours on a ring, radians.
    pub fn angular_pitch(&self) -> T {
        T::lit(2.0) * T::PI() / T::from_usize_lossy(self.ring_size())
    }

    /// Flat steering-vector index of element `(m, n)`.
    pub fn flat_index(&self, m: usize, n: usize) -> Result<usize> {
        self.check_index(m, n)?;
        Ok(if m == 0 { 0 } else { 1 + (m - 1) * self.ring_size() + n })
    }

    fn check_index(&self, m: usize, n: usize) -> Result<()> {
        if m >= self.layers {
            return Err(Error::domain(format!("layer {m} out of range 0..{}", self.layers)));
        }
        if m == 0 && n != 0 {
            return Err(Error::domain(format!("layer 0 has a single element, got index {n}")));
        }
        if n >= self.ring_size() {
            return Err(Error::domain(format!("element {n} out of range 0..{}", self.ring_size())));
        }
        Ok(())
    }
}

/// Beam direction in degrees: azimuth `phi` in [-180, 180), pitch `theta`
/// from the array normal in [0, 90].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    phi_deg: T,
    theta_deg: T,
}

impl<T: Scalar> Direction<T> {
    /// Wraps azimuth into [-180, 180); rejects pitch outside [0, 90].
    pub fn new(phi_deg: T, theta_deg: T) -> Result<Self> {
        if !phi_deg.is_finite() || !theta_deg.is_finite() {
            return Err(Error::domain("direction angles must be finite"));
        }
        if theta_deg < T::zero() || theta_deg > T::lit(90.0) {
            return Err(Error::domain(format!("pitch must lie in [0, 90] degrees, got {theta_deg}")));
        }
        Ok(Self { phi_deg: wrap_degrees(phi_deg), theta_deg })
    }

    pub fn phi_deg(&self) -> T {
        self.phi_deg
    }

    pub fn theta_deg(&self) -> T {
        self.theta_deg
    }

    /// In-plane projection `[cos phi sin theta, sin phi sin theta]`.
    pub fn polar_mapping(&self) -> [T; 2] {
        let phi = self.phi_deg.to_radians();
        let st = self.theta_deg.to_radians().sin();
        [phi.cos() * st, phi.sin() * st]
    }

    /// Unit vector in 3-D, z along the array normal.
    pub fn unit_vector(&self) -> [T; 3] {
        let [x, y] = self.polar_mapping();
        [x, y, self.theta_deg.to_radians().cos()]
    }

    /// Great-circle angle to `other`, degrees.
    pub fn angle_to(&self, other: &Self) -> T {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        cn.atan2(dot).to_degrees()
    }
}

impl<T: Scalar> fmt::Display for Direction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}°, {}°)", self.phi_deg, self.theta_deg)
    }
}

/// Wraps an angle in degrees into [-180, 180).
pub fn wrap_degrees<T: Scalar>(deg: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut w = (deg + half) % full;
    if w < T::zero() {
        w = w + full;
    }
    // `%` can return exactly `full` after the correction above for tiny
    // negative inputs.
    if w >= full {
        w = w - full;
    }
    w - half
}

/// Position of element `(m, n)` relative to the reference element, meters.
pub fn element_position<T: Scalar>(cfg: &ArrayConfig<T>, m: usize, n: usize) -> Result<[T; 2]> {
    cfg.check_index(m, n)?;
    Ok(position_unchecked(cfg, m, n))
}

fn position_unchecked<T: Scalar>(cfg: &ArrayConfig<T>, m: usize, n: usize) -> [T; 2] {
    let psi = T::from_usize_lossy(n) * cfg.angular_pitch();
    let radius = T::from_usize_lossy(m) * cfg.spacing;
    [psi.cos() * radius, psi.sin() * radius]
}

/// Phase of element `(m, n)` relative to the reference for a plane wave
/// from `dir`: `exp(-j 2 pi / lambda * q^T v)`.
pub fn phase_term<T: Scalar>(cfg: &ArrayConfig<T>, m: usize, n: usize, dir: &Direction<T>) -> Result<Complex<T>> {
    cfg.check_index(m, n)?;
    Ok(phase_unchecked(cfg, m, n, &dir.polar_mapping()))
}

fn phase_unchecked<T: Scalar>(cfg: &ArrayConfig<T>, m: usize, n: usize, v: &[T; 2]) -> Complex<T> {
    if m == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let q = position_unchecked(cfg, m, n);
    let k = T::lit(2.0) * T::PI() / cfg.wavelength;
    let arg = -(k * (q[0] * v[0] + q[1] * v[1]));
    Complex::new(arg.cos(), arg.sin())
}

/// Unit-modulus array response to one direction, reference entry first.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector<T>(Vec<Complex<T>>);

impl<T: Scalar> SteeringVector<T> {
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.0
    }
}

impl<T> std::ops::Index<usize> for SteeringVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.0[i]
    }
}

pub fn steering_vector<T: Scalar>(cfg: &ArrayConfig<T>, dir: &Direction<T>) -> SteeringVector<T> {
    let v = dir.polar_mapping();
    let mut out = Vec::with_capacity(cfg.element_count());
    out.push(Complex::new(T::one(), T::zero()));
    for m in 1..cfg.layers {
        for n in 0..cfg.ring_size() {
            out.push(phase_unchecked(cfg, m, n, &v));
        }
    }
    SteeringVector(out)
}

/// Steering vectors of several directions, one per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMatrix<T> {
    columns: Vec<SteeringVector<T>>,
}

impl<T: Scalar> SteeringMatrix<T> {
    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &SteeringVector<T> {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[SteeringVector<T>] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.columns[col][row]
    }
}

pub fn steering_matrix<T: Scalar>(cfg: &ArrayConfig<T>, dirs: &[Direction<T>]) -> Result<SteeringMatrix<T>> {
    if dirs.is_empty() {
        return Err(Error::domain("steering matrix needs at least one direction"));
    }
    Ok(SteeringMatrix { columns: dirs.iter().map(|d| steering_vector(cfg, d)).collect() })
}

/// Outcome of the half-wavelength spacing check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingReport<T> {
    /// Radial spacing between adjacent layers, m.
    pub layer_spacing: T,
    /// Chord between neighbours on the first ring, `2 d sin(pitch / 2)`.
    pub ring_chord: T,
    /// `lambda / 2`.
    pub limit: T,
}

impl<T: Scalar> SpacingReport<T> {
    pub fn layer_ok(&self) -> bool {
        self.layer_spacing <= self.limit
    }

    pub fn ring_ok(&self) -> bool {
        self.ring_chord <= self.limit
    }

    pub fn is_valid(&self) -> bool {
        self.layer_ok() && self.ring_ok()
    }
}

impl<T: Scalar> fmt::Display for SpacingReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "ok" } else { "VIOLATED" };
        write!(
            f,
            "layer spacing {} m vs lambda/2 {} m: {}; ring chord {} m: {}",
            self.layer_spacing,
            self.limit,
            verdict(self.layer_ok()),
            self.ring_chord,
            verdict(self.ring_ok())
        )
    }
}

/// Checks `d <= lambda/2` and `2 d sin(pitch/2) <= lambda/2`.
pub fn validate_spacing<T: Scalar>(cfg: &ArrayConfig<T>) -> SpacingReport<T> {
    let half = T::lit(0.5);
    SpacingReport {
        layer_spacing: cfg.spacing,
        ring_chord: T::lit(2.0) * cfg.spacing * (half * cfg.angular_pitch()).sin(),
        limit: half * cfg.wavelength,
    }
}
