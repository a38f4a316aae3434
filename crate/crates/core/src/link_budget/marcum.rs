//! First-order Marcum Q-function and its inverse in the second argument.
//!
//! `Q1(a, b) = P(X > b^2)` for `X` noncentral chi-square with two degrees of
//! freedom and noncentrality `a^2`. Writing `X` as a Poisson mixture of
//! central chi-squares gives a series with nonnegative terms only:
//!
//! ```text
//! Q1(a, b) = sum_k Pois(k; a^2/2) * P(Pois(b^2/2) <= k)
//! ```
//!
//! The terms are accumulated in log space so that large arguments do not
//! underflow the leading Poisson weights.

use crate::{Error, Result, Scalar};

/// Upper bound on the discarded tail mass of the mixing distribution.
const TAIL_BOUND: f64 = 1e-17;
const MAX_TERMS: usize = 1_000_000;

/// First-order Marcum Q-function `Q1(a, b)` for `a, b >= 0`.
///
/// Negative arguments are folded to their absolute value (the function
/// depends on `a^2` and `b^2` only).
pub fn marcum_q<T: Scalar>(a: T, b: T) -> T {
    let a = a.abs();
    let b = b.abs();
    if b == T::zero() {
        return T::one();
    }
    let half = T::lit(0.5);
    let lam_b = half * b * b;
    let ln_lam_b = lam_b.ln();
    if a == T::zero() {
        return (-lam_b).exp();
    }
    let lam_a = half * a * a;
    let ln_lam_a = lam_a.ln();

    let tail_bound = T::lit(TAIL_BOUND);
    // k = 0 terms
    let mut ln_p = -lam_a;
    let mut ln_q = -lam_b;
    let mut cdf_b = ln_q.exp();
    let mut sum = ln_p.exp() * cdf_b;
    let mut k = 0usize;
    while k < MAX_TERMS {
        k += 1;
        let kf = T::from_usize_lossy(k);
        let ln_k = kf.ln();
        ln_p = ln_p + ln_lam_a - ln_k;
        ln_q = ln_q + ln_lam_b - ln_k;
        if cdf_b < T::one() {
            cdf_b = (cdf_b + ln_q.exp()).min(T::one());
        }
        sum = sum + ln_p.exp() * cdf_b;
        // Poisson tail past k is dominated by a geometric series once the
        // ratio lam_a / (k + 2) drops below one.
        let ratio = lam_a / (kf + T::lit(2.0));
        if ratio < T::one() {
            let ln_next = ln_p + ln_lam_a - (kf + T::one()).ln();
            let bound = ln_next.exp() / (T::one() - ratio);
            if bound < tail_bound {
                break;
            }
        }
    }
    sum.min(T::one()).max(T::zero())
}

/// Inverse of `b -> Q1(a, b)`: the `b >= 0` with `Q1(a, b) = q`.
///
/// Bisection on the monotone-decreasing map, starting from the bracket
/// `[0, a + 40]` and widening the upper end if `q` is extremely small.
pub fn inv_marcum_q<T: Scalar>(a: T, q: T) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::domain(format!(
            "inverse Marcum Q needs a probability in (0, 1), got {q}"
        )));
    }
    let a = a.abs();
    let mut lo = T::zero();
    let mut hi = a + T::lit(40.0);
    let mut widen = 0;
    while marcum_q(a, hi) > q {
        lo = hi;
        hi = hi + hi;
        widen += 1;
        if widen > 60 {
            return Err(Error::IterationCap {
                cap: 60,
                context: "bracketing inverse Marcum Q".into(),
            });
        }
    }
    for _ in 0..400 {
        let mid = T::lit(0.5) * (lo + hi);
        if marcum_q(a, mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::lit(4.0) * T::epsilon() * (T::one() + hi) {
            break;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}
