//! Closed-form bin-decision probabilities and RMSE.
//!
//! With a unit-modulus ramp, a wrong bin outscores the true one with
//! probability `exp(-4π²γ)`, independently across the `L - 1` competitors.

use crate::Scalar;

fn exponent<T: Scalar>(gamma: T) -> T {
    T::lit(4.0) * T::PI() * T::PI() * gamma
}

/// `exp(-4π²γ)`
pub fn p_wrong_bin<T: Scalar>(gamma: T) -> T {
    (-exponent(gamma)).exp()
}

/// `(1 - exp(-4π²γ))^(L-1)`
pub fn p_correct_bin<T: Scalar>(gamma: T, len: usize) -> T {
    pow_complement(gamma, T::from_usize_lossy(len.saturating_sub(1)))
}

/// `(1 - exp(-4π²γ))^power`, computed through `ln(1 + x)`.
fn pow_complement<T: Scalar>(gamma: T, power: T) -> T {
    let w = p_wrong_bin(gamma);
    if w >= T::one() {
        return if power == T::zero() { T::one() } else { T::zero() };
    }
    (power * (-w).ln_1p()).exp()
}

/// `V_r sqrt(1 - (1 - exp(-4π²γ))^(2(M-1)))`
pub fn rmse_velocity_theory<T: Scalar>(v_r: T, gamma: T, m: usize) -> T {
    let p2 = pow_complement(gamma, T::lit(2.0) * T::from_usize_lossy(m.saturating_sub(1)));
    v_r.abs() * (T::one() - p2).max(T::zero()).sqrt()
}

/// Range counterpart of [`rmse_velocity_theory`] over `N` subcarriers.
pub fn rmse_range_theory<T: Scalar>(r_r: T, gamma: T, n: usize) -> T {
    rmse_velocity_theory(r_r, gamma, n)
}
