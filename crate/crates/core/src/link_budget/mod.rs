//! Closed-form communication and sensing performance of the base station.
//!
//! Communication runs over a Rician channel: outage, success probability,
//! outage capacity and the maximum range at a target outage all reduce to
//! the first-order Marcum Q-function. Sensing range follows the monostatic
//! radar equation with thermal noise plus ground clutter in the denominator.
//!
//! `rho` is always the fraction of transmit power given to communication;
//! sensing gets `1 - rho`.

mod marcum;

pub use marcum::{inv_marcum_q, marcum_q};

use crate::special::bessel_i0_scaled;
use crate::units::{db_to_linear, dbm_to_watts, wavelength};
use crate::{Error, Result, Scalar};

/// Every scalar of the link budget, in linear SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams<T> {
    /// Total transmit power, W.
    pub p_t: T,
    /// Communication share of the transmit power.
    pub rho: T,
    /// Transmit beam gain.
    pub g_t: T,
    /// Communication receive beam gain.
    pub g_rc: T,
    /// Sensing receive beam gain.
    pub g_rs: T,
    /// Communication processing gain.
    pub g_pc: T,
    /// Sensing processing gain.
    pub g_ps: T,
    /// Carrier wavelength, m.
    pub lambda: T,
    /// Large-scale path-loss exponent.
    pub alpha: T,
    /// Rician K factor (LOS power over scattered power).
    pub k_factor: T,
    /// Thermal noise power, W.
    pub p_n: T,
    /// Noise figure.
    pub f_n: T,
    /// SNR threshold for successful reception.
    pub xi_th: T,
    /// Outage probability target.
    pub epsilon: T,
    /// Radar cross section of the target, m^2.
    pub sigma_rcs: T,
    /// Ground clutter power, W.
    pub p_i: T,
    /// Minimum sensing SINR.
    pub gamma_min: T,
    /// Total signal bandwidth, Hz.
    pub bandwidth: T,
}

impl<T: Scalar> RadioParams<T> {
    /// 24 GHz ISM scenario: 20 dBm transmit power, 20 dB transmit and sensing
    /// receive gains, 6 dB communication receive gain, 10 dB / 54.2 dB
    /// processing gains, alpha = 2.6, K = 10, -94 dBm noise, 6 dB noise
    /// figure, 5 dB SNR threshold, 10 % outage, 0.1 m^2 target, -90 dBm
    /// clutter, 10 dB minimum SINR, 93.1 MHz bandwidth.
    pub fn ism_24ghz(rho: T) -> Self {
        let db = |x: f64| db_to_linear(T::lit(x));
        let dbm = |x: f64| dbm_to_watts(T::lit(x));
        Self {
            p_t: dbm(20.0),
            rho,
            g_t: db(20.0),
            g_rc: db(6.0),
            g_rs: db(20.0),
            g_pc: db(10.0),
            g_ps: db(54.2),
            lambda: wavelength(T::lit(24e9)),
            alpha: T::lit(2.6),
            k_factor: T::lit(10.0),
            p_n: dbm(-94.0),
            f_n: db(6.0),
            xi_th: db(5.0),
            epsilon: T::lit(0.1),
            sigma_rcs: T::lit(0.1),
            p_i: dbm(-90.0),
            gamma_min: db(10.0),
            bandwidth: T::lit(93.1e6),
        }
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = rho;
        self
    }

    /// Product of transmit and communication receive beam gains.
    pub fn g_com(&self) -> T {
        self.g_t * self.g_rc
    }

    /// Checks positivity of gains and powers and the ranges of `rho` and
    /// `epsilon`.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_t", self.p_t),
            ("g_t", self.g_t),
            ("g_rc", self.g_rc),
            ("g_rs", self.g_rs),
            ("g_pc", self.g_pc),
            ("g_ps", self.g_ps),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("p_n", self.p_n),
            ("f_n", self.f_n),
            ("xi_th", self.xi_th),
            ("sigma_rcs", self.sigma_rcs),
            ("gamma_min", self.gamma_min),
            ("bandwidth", self.bandwidth),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.k_factor >= T::zero()) {
            return Err(Error::domain(format!("K factor must be >= 0, got {}", self.k_factor)));
        }
        if !(self.p_i >= T::zero()) {
            return Err(Error::domain(format!("clutter power must be >= 0, got {}", self.p_i)));
        }
        if !(self.rho >= T::zero() && self.rho <= T::one()) {
            return Err(Error::domain(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return Err(Error::domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// `rho * P_t * G_com * g_pc * lambda^2 / (4 pi)^2`: received power at
    /// unit distance with unit fading.
    fn comm_budget(&self) -> T {
        self.rho * self.p_t * self.g_com() * self.g_pc * self.lambda * self.lambda / four_pi_sq::<T>()
    }

    fn effective_noise(&self) -> T {
        self.p_n * self.f_n
    }
}

fn four_pi_sq<T: Scalar>() -> T {
    let fp = T::lit(4.0) * T::PI();
    fp * fp
}

fn check_distance<T: Scalar>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("distance must be positive and finite, got {x}")))
    }
}

/// Mean received communication power at distance `x` (fading factor 1).
pub fn received_comm_power<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    check_distance(x)?;
    Ok(p.comm_budget() / x.powf(p.alpha))
}

/// Average received SNR at distance `x`.
pub fn mean_snr<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    Ok(received_comm_power(p, x)? / p.effective_noise())
}

/// Second Marcum argument of the outage expression at distance `x`.
fn outage_threshold_arg<T: Scalar>(p: &RadioParams<T>, x: T) -> T {
    let two = T::lit(2.0);
    let num = two * four_pi_sq::<T>() * p.xi_th * (T::one() + p.k_factor) * x.powf(p.alpha)
        * p.effective_noise();
    let den = p.rho * p.p_t * p.g_com() * p.g_pc * p.lambda * p.lambda;
    (num / den).sqrt()
}


/// Probability that the instantaneous SNR at distance `x` falls below
/// `xi_th`. With no communication power (`rho = 0`) the link is always in
/// outage.
pub fn outage_probability<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    check_distance(x)?;
    if p.rho == T::zero() {
        return Ok(T::one());
    }
    let a = (T::lit(2.0) * p.k_factor).sqrt();
    let b = outage_threshold_arg(p, x);
    Ok(T::one() - marcum_q(a, b))
}

/// Probability of successful reception at distance `x`.
pub fn success_probability<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    check_distance(x)?;
    if p.rho == T::zero() {
        return Ok(T::zero());
    }
    let a = (T::lit(2.0) * p.k_factor).sqrt();
    Ok(marcum_q(a, outage_threshold_arg(p, x)))
}

/// Outage capacity `B * log2(1 + xi_th) * P_success(x)`, bits/s.
pub fn outage_capacity<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    Ok(capacity_ceiling(p) * success_probability(p, x)?)
}

/// Limit of the outage capacity as the distance goes to zero.
pub fn capacity_ceiling<T: Scalar>(p: &RadioParams<T>) -> T {
    p.bandwidth * (T::one() + p.xi_th).log2()
}

/// Distance at which the outage probability equals `epsilon`.
pub fn max_comm_range<T: Scalar>(p: &RadioParams<T>) -> Result<T> {
    if !(p.rho > T::zero() && p.rho <= T::one()) {
        return Err(Error::domain(format!(
            "communication range needs 0 < rho <= 1, got {}",
            p.rho
        )));
    }
    Ok(comm_range_at(p, p.rho)?)
}

fn comm_range_at<T: Scalar>(p: &RadioParams<T>, rho: T) -> Result<T> {
    if rho <= T::zero() {
        return Ok(T::zero());
    }
    let a = (T::lit(2.0) * p.k_factor).sqrt();
    let b = inv_marcum_q(a, T::one() - p.epsilon)?;
    let num = b * b * rho * p.p_t * p.g_com() * p.g_pc * p.lambda * p.lambda;
    let den = T::lit(2.0) * four_pi_sq::<T>() * p.xi_th * (T::one() + p.k_factor) * p.effective_noise();
    Ok((num / den).powf(T::one() / p.alpha))
}

fn sensing_numerator<T: Scalar>(p: &RadioParams<T>, rho: T) -> T {
    (T::one() - rho) * p.p_t * p.g_t * p.g_rs * p.g_ps * p.sigma_rcs * p.lambda * p.lambda
}

fn sensing_denominator<T: Scalar>(p: &RadioParams<T>) -> T {
    let fp = T::lit(4.0) * T::PI();
    fp * fp * fp * (p.effective_noise() + p.p_i)
}

fn sense_range_at<T: Scalar>(p: &RadioParams<T>, rho: T) -> T {
    if rho >= T::one() {
        return T::zero();
    }
    (sensing_numerator(p, rho) / (sensing_denominator(p) * p.gamma_min)).powf(T::lit(0.25))
}

/// Radar-equation range at which the echo SINR drops to `gamma_min`.
pub fn max_sensing_range<T: Scalar>(p: &RadioParams<T>) -> Result<T> {
    if !(p.rho >= T::zero() && p.rho < T::one()) {
        return Err(Error::domain(format!(
            "sensing range needs 0 <= rho < 1, got {}",
            p.rho
        )));
    }
    Ok(sense_range_at(p, p.rho))
}

/// Echo SINR of the point target at range `x`.
pub fn sensing_sinr<T: Scalar>(p: &RadioParams<T>, x: T) -> Result<T> {
    check_distance(x)?;
    Ok(sensing_numerator(p, p.rho) / (sensing_denominator(p) * x.powi(4)))
}

/// Power split where communication and sensing reach the same range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover<T> {
    pub rho: T,
    pub range: T,
}

/// Bisects `rho` in (0, 1) for equal communication and sensing range.
///
/// Returns `None` when the two range curves do not cross inside the open
/// interval.
pub fn range_crossover<T: Scalar>(p: &RadioParams<T>) -> Result<Option<Crossover<T>>> {
    let gap = |rho: T| -> Result<T> { Ok(comm_range_at(p, rho)? - sense_range_at(p, rho)) };
    let mut lo = T::zero();
    let mut hi = T::one();
    // comm range is 0 at rho = 0, sensing range is 0 at rho = 1.
    let g_lo = gap(lo)?;
    let g_hi = gap(hi)?;
    if !(g_lo < T::zero() && g_hi > T::zero()) {
        return Ok(None);
    }
    let tol = T::lit(1e-12);
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if gap(mid)? < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tol {
            break;
        }
    }
    let rho = T::lit(0.5) * (lo + hi);
    Ok(Some(Crossover { rho, range: comm_range_at(p, rho)? }))
}

/// Rician density of the received SNR at distance `x`, evaluated at `w`.
pub fn rician_snr_pdf<T: Scalar>(p: &RadioParams<T>, x: T, w: T) -> Result<T> {
    if w < T::zero() {
        return Err(Error::domain(format!("SNR value must be >= 0, got {w}")));
    }
    let mean = mean_snr(p, x)?;
    Ok(rician_pdf(p.k_factor, mean, w))
}

/// Rician SNR density with factor `k` and mean `mean`.
pub fn rician_pdf<T: Scalar>(k: T, mean: T, w: T) -> T {
    if w < T::zero() {
        return T::zero();
    }
    let kp1 = k + T::one();
    let z = T::lit(2.0) * (k * kp1 * w / mean).sqrt();
    // I0(z) = exp(z) * scaled(z), folded into the exponent.
    let expo = -kp1 * w / mean - k + z;
    kp1 / mean * expo.exp() * bessel_i0_scaled(z)
}
