//! Physical constants and unit conversions.

use crate::Scalar;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn speed_of_light<T: Scalar>() -> T {
    T::lit(SPEED_OF_LIGHT)
}

/// Power ratio in dB to linear.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// dBm to watts.
pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    T::lit(10.0).powf((dbm - T::lit(30.0)) / T::lit(10.0))
}

pub fn watts_to_dbm<T: Scalar>(w: T) -> T {
    T::lit(10.0) * w.log10() + T::lit(30.0)
}

/// Free-space wavelength for a carrier frequency in Hz.
pub fn wavelength<T: Scalar>(carrier_hz: T) -> T {
    speed_of_light::<T>() / carrier_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert!((dbm_to_watts(20.0_f64) - 0.1).abs() < 1e-15);
        assert!((dbm_to_watts(-94.0_f64) - 3.981_071_705_534_97e-13).abs() < 1e-25);
        assert!((db_to_linear(6.0_f64) - 3.981_071_705_534_973).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(54.2_f64)) - 54.2).abs() < 1e-12);
        assert!((watts_to_dbm(dbm_to_watts(-110.0_f64)) + 110.0).abs() < 1e-12);
        assert!((wavelength(24e9_f64) - 0.012_491_352_416_666_667).abs() < 1e-15);
    }
}
