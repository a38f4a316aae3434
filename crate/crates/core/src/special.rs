//! Special functions needed by the fading models.

use crate::Scalar;

const SERIES_LIMIT: f64 = 20.0;

/// Exponentially scaled modified Bessel function of the first kind, order
/// zero: `exp(-|x|) * I0(x)`.
///
/// Power series below `|x| = 20`, Hankel asymptotic expansion above it.
pub fn bessel_i0_scaled<T: Scalar>(x: T) -> T {
    let x = x.abs();
    if x.to_f64_lossy() <= SERIES_LIMIT {
        let q = x * x / T::lit(4.0);
        let mut term = T::one();
        let mut sum = T::one();
        let mut k = 1usize;
        loop {
            let kf = T::from_usize_lossy(k);
            term = term * q / (kf * kf);
            sum = sum + term;
            if term <= sum * T::epsilon() || k > 500 {
                break;
            }
            k += 1;
        }
        sum * (-x).exp()
    } else {
        let eight_x = T::lit(8.0) * x;
        let mut term = T::one();
        let mut sum = T::one();
        for k in 1..60usize {
            let odd = T::from_usize_lossy(2 * k - 1);
            let next = term * odd * odd / (eight_x * T::from_usize_lossy(k));
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum = sum + term;
            if term <= sum * T::epsilon() {
                break;
            }
        }
        sum / (T::lit(2.0) * T::PI() * x).sqrt()
    }
}

/// Modified Bessel function `I0(x)`. Overflows to infinity for large `x`;
/// prefer [`bessel_i0_scaled`] inside products.
pub fn bessel_i0<T: Scalar>(x: T) -> T {
    bessel_i0_scaled(x) * x.abs().exp()
}
