//! Symbol-domain OFDM radar: echo synthesis, element-wise division, and
//! range/velocity read-out from the peaks of zero-padded transforms.
//!
//! Matrices are indexed `(m, n)` with `m` the OFDM symbol (slow time) and
//! `n` the subcarrier. The echo of a point target at range `R` and radial
//! velocity `V` carries the phase ramps `exp(-j2π nΔf 2R/c)` across
//! subcarriers and `exp(-j4π mT V f_c/c)` across symbols. Both axes are
//! transformed with the `exp(+j…)` kernel so that a target exactly on bin `k`
//! peaks at index `k`.

mod monte_carlo;
mod theory;

pub use monte_carlo::{binomial_band, run_monte_carlo, trial_seed, McRow, MonteCarloConfig};
pub use theory::{p_correct_bin, p_wrong_bin, rmse_range_theory, rmse_velocity_theory};

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::units::speed_of_light;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig<T> {
    m: usize,
    n: usize,
    delta_f: T,
    f_c: T,
    t_guard: T,
    m_d: usize,
    n_idft: usize,
}

impl<T: Scalar> OfdmConfig<T> {
    pub fn new(m: usize, n: usize, delta_f: T, f_c: T, t_guard: T, m_d: usize, n_idft: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::domain(format!("need at least 2 symbols and 2 subcarriers, got M={m}, N={n}")));
        }
        if m_d < m || n_idft < n {
            return Err(Error::domain(format!(
                "transform lengths must not be shorter than the data: M_D={m_d} < M={m} or N_IDFT={n_idft} < N={n}"
            )));
        }
        if !(delta_f > T::zero() && delta_f.is_finite()) {
            return Err(Error::domain(format!("subcarrier spacing must be positive, got {delta_f}")));
        }
        if !(f_c > T::zero() && f_c.is_finite()) {
            return Err(Error::domain(format!("carrier frequency must be positive, got {f_c}")));
        }
        if !(t_guard >= T::zero() && t_guard.is_finite()) {
            return Err(Error::domain(format!("guard interval must be >= 0, got {t_guard}")));
        }
        Ok(Self { m, n, delta_f, f_c, t_guard, m_d, n_idft })
    }

    /// 24 GHz reference numerology with a guard of `T_os / 8`.
    pub fn ism_24ghz() -> Self {
        let delta_f = T::lit(90_909.0);
        Self {
            m: 256,
            n: 1024,
            delta_f,
            f_c: T::lit(24e9),
            t_guard: T::one() / delta_f / T::lit(8.0),
            m_d: 2560,
            n_idft: 10240,
        }
    }

    /// Same numerology with transform lengths equal to `M` and `N`.
    pub fn unpadded(mut self) -> Self {
        self.m_d = self.m;
        self.n_idft = self.n;
        self
    }

    pub fn with_lengths(self, m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, self.delta_f, self.f_c, self.t_guard, self.m_d.max(m), self.n_idft.max(n))
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m_d(&self) -> usize {
        self.m_d
    }
    pub fn n_idft(&self) -> usize {
        self.n_idft
    }
    pub fn delta_f(&self) -> T {
        self.delta_f
    }
    pub fn f_c(&self) -> T {
        self.f_c
    }
    pub fn t_guard(&self) -> T {
        self.t_guard
    }
    pub fn t_os(&self) -> T {
        T::one() / self.delta_f
    }
    /// Total symbol duration including the guard.
    pub fn t(&self) -> T {
        self.t_os() + self.t_guard
    }
    pub fn bandwidth(&self) -> T {
        T::from_usize_lossy(self.n) * self.delta_f
    }

    /// Width of one velocity bin of the `M_D`-point transform, m/s.
    pub fn velocity_bin(&self) -> T {
        speed_of_light::<T>() / (T::lit(2.0) * self.f_c * self.t() * T::from_usize_lossy(self.m_d))
    }

    /// Width of one range bin of the `N_IDFT`-point transform, m.
    pub fn range_bin(&self) -> T {
        speed_of_light::<T>() / (T::lit(2.0) * self.bandwidth()) * T::from_usize_lossy(self.n)
            / T::from_usize_lossy(self.n_idft)
    }

    /// Nearest multiple of the velocity bin width.
    pub fn snap_velocity(&self, v: T) -> T {
        (v / self.velocity_bin()).round() * self.velocity_bin()
    }

    pub fn snap_range(&self, r: T) -> T {
        (r / self.range_bin()).round() * self.range_bin()
    }
}

/// Square QAM constellation normalized to unit mean power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qam {
    order: usize,
}

impl Qam {
    pub const QAM4: Qam = Qam { order: 4 };

    pub fn new(order: usize) -> Result<Self> {
        let mut o = order;
        while o > 1 && o % 4 == 0 {
            o /= 4;
        }
        if order < 4 || o != 1 {
            return Err(Error::domain(format!("QAM order must be a power of 4, got {order}")));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Only 4-QAM has equal power on every symbol.
    pub fn is_constant_modulus(&self) -> bool {
        self.order == 4
    }

    pub fn points<T: Scalar>(&self) -> Vec<Complex<T>> {
        let side = (self.order as f64).sqrt().round() as usize;
        // levels ±1, ±3, ...; mean power 2(side²-1)/3
        let scale = T::one() / T::lit((2.0 * ((side * side) as f64 - 1.0) / 3.0).sqrt());
        let level = |i: usize| T::lit(2.0 * i as f64 + 1.0 - side as f64) * scale;
        let mut out = Vec::with_capacity(self.order);
        for i in 0..side {
            for q in 0..side {
                out.push(Complex::new(level(i), level(q)));
            }
        }
        out
    }
}

impl Default for Qam {
    fn default() -> Self {
        Self::QAM4
    }
}

/// Dense `M x N` complex matrix, row-major in the symbol index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix<T> {
    m: usize,
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> SymbolMatrix<T> {
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for mi in 0..m {
            for ni in 0..n {
                data.push(f(mi, ni));
            }
        }
        Self { m, n, data }
    }

    pub fn rows(&self) -> usize {
        self.m
    }
    pub fn cols(&self) -> usize {
        self.n
    }
    pub fn get(&self, m: usize, n: usize) -> Complex<T> {
        self.data[m * self.n + n]
    }
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }
    /// Symbols across subcarriers for OFDM symbol `m`.
    pub fn symbol(&self, m: usize) -> &[Complex<T>] {
        &self.data[m * self.n..(m + 1) * self.n]
    }
    /// Slow-time samples of subcarrier `n`.
    pub fn subcarrier(&self, n: usize) -> Vec<Complex<T>> {
        (0..self.m).map(|m| self.get(m, n)).collect()
    }
}

/// Point target echo with additive noise and clutter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoModel<T> {
    pub a_s: T,
    pub r_r: T,
    pub v_r: T,
    /// Per-quadrature standard deviations.
    pub sigma_n: T,
    pub sigma_i: T,
}

impl<T: Scalar> EchoModel<T> {
    pub fn new(a_s: T, r_r: T, v_r: T, sigma_n: T, sigma_i: T) -> Result<Self> {
        if !(a_s >= T::zero() && a_s.is_finite()) {
            return Err(Error::domain(format!("echo amplitude must be >= 0, got {a_s}")));
        }
        if !(sigma_n >= T::zero() && sigma_i >= T::zero() && sigma_n.is_finite() && sigma_i.is_finite()) {
            return Err(Error::domain("noise and clutter deviations must be finite and >= 0"));
        }
        if !(r_r.is_finite() && v_r.is_finite()) {
            return Err(Error::domain("target range and velocity must be finite"));
        }
        Ok(Self { a_s, r_r, v_r, sigma_n, sigma_i })
    }

    /// Unit amplitude with the interference split evenly between noise and
    /// clutter so that the SINR equals `gamma` (linear).
    pub fn from_sinr(gamma: T, r_r: T, v_r: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::domain(format!("SINR must be positive and finite, got {gamma}")));
        }
        let sigma = (T::one() / (T::lit(4.0) * gamma)).sqrt();
        Self::new(T::one(), r_r, v_r, sigma, sigma)
    }

    /// Total interference power `2(σ_n² + σ_i²)`.
    pub fn interference_power(&self) -> T {
        T::lit(2.0) * (self.sigma_n * self.sigma_n + self.sigma_i * self.sigma_i)
    }

    pub fn sinr(&self) -> T {
        self.a_s * self.a_s / self.interference_power()
    }
}

pub fn generate_symbols<T: Scalar>(cfg: &OfdmConfig<T>, modulation: Qam, seed: u64) -> SymbolMatrix<T> {
    let points = modulation.points::<T>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SymbolMatrix::from_fn(cfg.m, cfg.n, |_, _| points[rng.random_range(0..points.len())])
}

/// Range and velocity phase ramps of the target.
fn ramps<T: Scalar>(cfg: &OfdmConfig<T>, r_r: T, v_r: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let c = speed_of_light::<T>();
    let two_pi = T::TAU();
    let k_r = (0..cfg.n)
        .map(|n| {
            let f_n = T::from_usize_lossy(n) * cfg.delta_f;
            Complex::from_polar(T::one(), -two_pi * f_n * T::lit(2.0) * r_r / c)
        })
        .collect();
    let k_v = (0..cfg.m)
        .map(|m| {
            let t = T::from_usize_lossy(m) * cfg.t();
            Complex::from_polar(T::one(), -T::lit(2.0) * two_pi * t * v_r * cfg.f_c / c)
        })
        .collect();
    (k_r, k_v)
}

pub fn synthesize_echo<T: Scalar>(
    cfg: &OfdmConfig<T>,
    tx: &SymbolMatrix<T>,
    echo: &EchoModel<T>,
    seed: u64,
) -> Result<SymbolMatrix<T>> {
    check_dims(cfg, tx)?;
    let (k_r, k_v) = ramps(cfg, echo.r_r, echo.v_r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = echo.sigma_n > T::zero() || echo.sigma_i > T::zero();
    Ok(SymbolMatrix::from_fn(cfg.m, cfg.n, |m, n| {
        let mut s = tx.get(m, n) * k_r[n] * k_v[m] * echo.a_s;
        if noisy {
            s = s + gaussian(&mut rng, echo.sigma_n) + gaussian(&mut rng, echo.sigma_i);
        }
        s
    }))
}

fn gaussian<T: Scalar, R: Rng>(rng: &mut R, sigma: T) -> Complex<T> {
    Complex::new(T::standard_normal(rng) * sigma, T::standard_normal(rng) * sigma)
}

fn check_dims<T: Scalar>(cfg: &OfdmConfig<T>, s: &SymbolMatrix<T>) -> Result<()> {
    if s.m != cfg.m || s.n != cfg.n {
        return Err(Error::domain(format!(
            "matrix is {}x{}, configuration expects {}x{}",
            s.m, s.n, cfg.m, cfg.n
        )));
    }
    Ok(())
}

/// Element-wise quotient `rx / tx`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionGrid<T> {
    pub values: SymbolMatrix<T>,
}

pub fn divide<T: Scalar>(tx: &SymbolMatrix<T>, rx: &SymbolMatrix<T>) -> Result<DivisionGrid<T>> {
    if tx.m != rx.m || tx.n != rx.n {
        return Err(Error::domain(format!("tx is {}x{} but rx is {}x{}", tx.m, tx.n, rx.m, rx.n)));
    }
    if let Some(i) = tx.data.iter().position(|z| z.norm_sqr() == T::zero()) {
        return Err(Error::domain(format!("zero transmit symbol at ({}, {})", i / tx.n, i % tx.n)));
    }
    let data = tx.data.iter().zip(&rx.data).map(|(t, r)| r / t).collect();
    Ok(DivisionGrid { values: SymbolMatrix { m: tx.m, n: tx.n, data } })
}

/// Zero-padded transform with `exp(+j2π kl/L)` kernel and `1/sqrt(L)`
/// scaling. Reusable across calls of the same length.
#[derive(Clone)]
pub struct PaddedTransform<T: Scalar> {
    fft: Arc<dyn Fft<T>>,
    len: usize,
    scale: T,
}

impl<T: Scalar> PaddedTransform<T> {
    pub fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft(len, FftDirection::Inverse);
        Self { fft, len, scale: T::one() / T::from_usize_lossy(len).sqrt() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes the transform of `input` (zero-padded) into `buf`.
    pub fn apply(&self, input: &[Complex<T>], buf: &mut Vec<Complex<T>>) {
        buf.clear();
        buf.extend_from_slice(&input[..input.len().min(self.len)]);
        buf.resize(self.len, Complex::new(T::zero(), T::zero()));
        self.fft.process(buf);
        for z in buf.iter_mut() {
            *z = *z * self.scale;
        }
    }

    /// Index of the largest magnitude output, lowest index on ties.
    pub fn peak(&self, input: &[Complex<T>], buf: &mut Vec<Complex<T>>) -> usize {
        self.apply(input, buf);
        let mut best = 0;
        let mut best_val = T::neg_infinity();
        for (i, z) in buf.iter().enumerate() {
            let v = z.norm_sqr();
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        best
    }
}

/// Per-line peak bins on one axis and the combined read-out.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisEstimate<T> {
    /// Peak index of each line.
    pub bins: Vec<usize>,
    /// Most frequent peak index, lowest on ties.
    pub bin: usize,
    /// Lower edge of the interval of `bin`.
    pub value: T,
    /// Average of the per-line lower edges.
    pub mean: T,
    pub bin_width: T,
}

impl<T: Scalar> AxisEstimate<T> {
    fn from_bins(bins: Vec<usize>, bin_width: T, len: usize) -> Self {
        let mut counts = vec![0usize; len];
        for &b in &bins {
            counts[b] += 1;
        }
        let bin = counts.iter().enumerate().fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
        let sum = bins.iter().fold(T::zero(), |acc, &b| acc + T::from_usize_lossy(b));
        let mean = sum / T::from_usize_lossy(bins.len()) * bin_width;
        Self { bins, bin, value: T::from_usize_lossy(bin) * bin_width, mean, bin_width }
    }

    /// Interval `[lower, upper)` of a bin.
    pub fn interval(&self, bin: usize) -> (T, T) {
        let lo = T::from_usize_lossy(bin) * self.bin_width;
        (lo, lo + self.bin_width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<T> {
    pub v_hat: T,
    pub r_hat: T,
    pub v_bin: usize,
    pub r_bin: usize,
    pub velocity: AxisEstimate<T>,
    pub range: AxisEstimate<T>,
}

/// Transform plans for one configuration.
#[derive(Clone)]
pub struct Estimator<T: Scalar> {
    cfg: OfdmConfig<T>,
    slow: PaddedTransform<T>,
    fast: PaddedTransform<T>,
}

impl<T: Scalar> Estimator<T> {
    pub fn new(cfg: &OfdmConfig<T>) -> Self {
        Self { cfg: *cfg, slow: PaddedTransform::new(cfg.m_d), fast: PaddedTransform::new(cfg.n_idft) }
    }

    /// One velocity read-out per subcarrier.
    pub fn velocity(&self, grid: &DivisionGrid<T>) -> Result<AxisEstimate<T>> {
        check_dims(&self.cfg, &grid.values)?;
        let mut buf = Vec::with_capacity(self.cfg.m_d);
        let mut line = Vec::with_capacity(self.cfg.m);
        let bins = (0..self.cfg.n)
            .map(|n| {
                line.clear();
                line.extend((0..self.cfg.m).map(|m| grid.values.get(m, n)));
                self.slow.peak(&line, &mut buf)
            })
            .collect();
        Ok(AxisEstimate::from_bins(bins, self.cfg.velocity_bin(), self.cfg.m_d))
    }

    /// One range read-out per OFDM symbol.
    pub fn range(&self, grid: &DivisionGrid<T>) -> Result<AxisEstimate<T>> {
        check_dims(&self.cfg, &grid.values)?;
        let mut buf = Vec::with_capacity(self.cfg.n_idft);
        let bins = (0..self.cfg.m).map(|m| self.fast.peak(grid.values.symbol(m), &mut buf)).collect();
        Ok(AxisEstimate::from_bins(bins, self.cfg.range_bin(), self.cfg.n_idft))
    }

    pub fn estimate(&self, grid: &DivisionGrid<T>) -> Result<Estimate<T>> {
        let velocity = self.velocity(grid)?;
        let range = self.range(grid)?;
        Ok(Estimate {
            v_hat: velocity.value,
            r_hat: range.value,
            v_bin: velocity.bin,
            r_bin: range.bin,
            velocity,
            range,
        })
    }
}

pub fn estimate_velocity<T: Scalar>(grid: &DivisionGrid<T>, cfg: &OfdmConfig<T>) -> Result<AxisEstimate<T>> {
    Estimator::new(cfg).velocity(grid)
}

pub fn estimate_range<T: Scalar>(grid: &DivisionGrid<T>, cfg: &OfdmConfig<T>) -> Result<AxisEstimate<T>> {
    Estimator::new(cfg).range(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(m: usize, n: usize) -> OfdmConfig<f64> {
        OfdmConfig::<f64>::ism_24ghz().with_lengths(m, n).unwrap().unpadded()
    }

    #[test]
    fn config_validation_and_derived_quantities() {
        let c = OfdmConfig::<f64>::ism_24ghz();
        assert!((c.t_os() - 1.0 / 90_909.0).abs() < 1e-18);
        assert!((c.t() - 1.125 / 90_909.0).abs() < 1e-18);
        assert!((c.bandwidth() - 1024.0 * 90_909.0).abs() < 1e-6);
        // c / (2 f_c T M_D)
        let dv = 299_792_458.0 / (2.0 * 24e9 * (1.125 / 90_909.0) * 2560.0);
        assert!((c.velocity_bin() - dv).abs() < 1e-12);
        let dr = 299_792_458.0 / (2.0 * 1024.0 * 90_909.0) / 10.0;
        assert!((c.range_bin() - dr).abs() < 1e-12);
        assert!(OfdmConfig::new(1, 8, 1.0, 1.0, 0.0, 1, 8).is_err());
        assert!(OfdmConfig::new(8, 8, 1.0, 1.0, 0.0, 4, 8).is_err());
        assert!(OfdmConfig::new(8, 8, 0.0, 1.0, 0.0, 8, 8).is_err());
        assert!(OfdmConfig::new(8, 8, 1.0, 1.0, -1.0, 8, 8).is_err());
    }

    #[test]
    fn qam_orders() {
        assert!(Qam::new(2).is_err());
        assert!(Qam::new(8).is_err());
        assert!(Qam::new(16).is_ok());
        let p4 = Qam::QAM4.points::<f64>();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for z in &p4 {
            assert!((z.re.abs() - h).abs() < 1e-15 && (z.im.abs() - h).abs() < 1e-15);
        }
        for order in [4, 16, 64, 256] {
            let pts = Qam::new(order).unwrap().points::<f64>();
            assert_eq!(pts.len(), order);
            let power = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / order as f64;
            assert!((power - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symbols_constant_modulus_and_reproducible() {
        let c = small(16, 32);
        let a = generate_symbols(&c, Qam::QAM4, 7);
        assert!(a.as_slice().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert_eq!(a, generate_symbols(&c, Qam::QAM4, 7));
        assert_ne!(a, generate_symbols(&c, Qam::QAM4, 8));
    }

    #[test]
    fn symbol_frequencies_uniform() {
        let c = small(1000, 1000);
        let s = generate_symbols(&c, Qam::QAM4, 2024);
        let pts = Qam::QAM4.points::<f64>();
        let mut counts = [0usize; 4];
        for z in s.as_slice() {
            counts[pts.iter().position(|p| p == z).unwrap()] += 1;
        }
        let n = 1e6_f64;
        let expect = n / 4.0;
        let sigma = (n * 0.25 * 0.75).sqrt();
        let mut chi2 = 0.0;
        for &k in &counts {
            assert!((k as f64 - expect).abs() <= 3.0 * sigma, "{counts:?}");
            chi2 += (k as f64 - expect).powi(2) / expect;
        }
        // chi-square with 3 degrees of freedom: 99.9th percentile is 16.27
        assert!(chi2 < 16.27, "chi2={chi2}");
    }

    #[test]
    fn noiseless_echo_identity_and_modulus() {
        let c = small(8, 16);
        let tx = generate_symbols(&c, Qam::QAM4, 1);
        let e = EchoModel::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(synthesize_echo(&c, &tx, &e, 5).unwrap(), tx);
        let e = EchoModel::new(0.7, 123.0, -31.0, 0.0, 0.0).unwrap();
        let rx = synthesize_echo(&c, &tx, &e, 5).unwrap();
        for (r, t) in rx.as_slice().iter().zip(tx.as_slice()) {
            assert!((r.norm() - 0.7 * t.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn interference_power_matches_model() {
        let c = small(1000, 1000);
        let tx = SymbolMatrix::from_fn(1000, 1000, |_, _| Complex::new(1.0, 0.0));
        let e = EchoModel::new(0.0, 0.0, 0.0, 0.3, 0.4).unwrap();
        let rx = synthesize_echo(&c, &tx, &e, 99).unwrap();
        let power = rx.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e6;
        let want = 2.0 * (0.09 + 0.16);
        assert!((power - want).abs() <= 0.02 * want, "{power}");
        assert!((e.interference_power() - want).abs() < 1e-15);
    }

    #[test]
    fn sinr_split() {
        let e = EchoModel::<f64>::from_sinr(0.25, 0.0, 0.0).unwrap();
        assert!((e.sinr() - 0.25).abs() < 1e-15);
        assert_eq!(e.sigma_n, e.sigma_i);
        assert!(EchoModel::from_sinr(0.0, 0.0, 0.0).is_err());
        assert!(EchoModel::new(-1.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn division_cases() {
        let c = small(8, 16);
        let tx = generate_symbols(&c, Qam::QAM4, 3);
        let ones = divide(&tx, &tx).unwrap();
        assert!(ones.values.as_slice().iter().all(|z| (*z - Complex::new(1.0, 0.0)).norm() < 1e-15));

        let (a_s, r, v) = (0.8, 57.3, 12.9);
        let rx = synthesize_echo(&c, &tx, &EchoModel::new(a_s, r, v, 0.0, 0.0).unwrap(), 0).unwrap();
        let g = divide(&tx, &rx).unwrap();
        let cl = 299_792_458.0;
        for m in 0..8 {
            for n in 0..16 {
                let f_n = n as f64 * c.delta_f();
                let k_r = Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * f_n * 2.0 * r / cl);
                let k_v = Complex::from_polar(1.0, -4.0 * std::f64::consts::PI * m as f64 * c.t() * v * c.f_c() / cl);
                assert!((g.values.get(m, n) - k_r * k_v * a_s).norm() < 1e-12);
                assert!((g.values.get(m, n) * tx.get(m, n) - rx.get(m, n)).norm() < 1e-15);
            }
        }
        let mut bad = tx.clone();
        bad.data[5] = Complex::new(0.0, 0.0);
        assert!(divide(&bad, &rx).is_err());
    }

    #[test]
    fn parseval() {
        let t = PaddedTransform::<f64>::new(64);
        let x: Vec<_> = (0..64).map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64).cos())).collect();
        let mut buf = Vec::new();
        t.apply(&x, &mut buf);
        let e_in: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let e_out: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        assert!((e_in - e_out).abs() <= 1e-9 * e_in);
        // zero padding keeps the energy too
        let t = PaddedTransform::<f64>::new(640);
        t.apply(&x, &mut buf);
        let e_out: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        assert!((e_in - e_out).abs() <= 1e-9 * e_in);
    }

    fn noiseless_grid(c: &OfdmConfig<f64>, r: f64, v: f64) -> DivisionGrid<f64> {
        let tx = generate_symbols(c, Qam::QAM4, 11);
        let rx = synthesize_echo(c, &tx, &EchoModel::new(1.0, r, v, 0.0, 0.0).unwrap(), 0).unwrap();
        divide(&tx, &rx).unwrap()
    }

    #[test]
    fn zero_target_peaks_at_zero() {
        let c = small(16, 32);
        let g = noiseless_grid(&c, 0.0, 0.0);
        assert!(estimate_velocity(&g, &c).unwrap().bins.iter().all(|b| *b == 0));
        assert!(estimate_range(&g, &c).unwrap().bins.iter().all(|b| *b == 0));
    }

    #[test]
    fn on_grid_velocity_lands_on_its_bin() {
        // V_r = k c / (2 f_c T M)
        let c = small(64, 16);
        for k in [1usize, 5, 17, 40] {
            let v = k as f64 * 299_792_458.0 / (2.0 * c.f_c() * c.t() * 64.0);
            let est = estimate_velocity(&noiseless_grid(&c, 0.0, v), &c).unwrap();
            assert!(est.bins.iter().all(|b| *b == k), "k={k}");
            assert_eq!(est.bin, k);
            let (lo, hi) = est.interval(est.bin);
            assert!(lo <= v * (1.0 + 1e-12) && v < hi);
        }
    }

    #[test]
    fn on_grid_range_lands_on_its_bin() {
        let c = small(4, 128);
        for k in [1usize, 9, 100] {
            let r = k as f64 * 299_792_458.0 / (2.0 * c.bandwidth());
            let est = estimate_range(&noiseless_grid(&c, r, 0.0), &c).unwrap();
            assert!(est.bins.iter().all(|b| *b == k), "k={k}");
            assert!((est.value - r).abs() < 1e-9 * r);
        }
    }

    #[test]
    fn padded_transform_refines_readout() {
        let c = OfdmConfig::<f64>::ism_24ghz().with_lengths(32, 64).unwrap();
        let c = OfdmConfig::new(32, 64, c.delta_f(), c.f_c(), c.t_guard(), 320, 640).unwrap();
        let v = c.velocity_bin() * 37.0;
        let r = c.range_bin() * 213.0;
        let est = Estimator::new(&c).estimate(&noiseless_grid(&c, r, v)).unwrap();
        assert_eq!((est.v_bin, est.r_bin), (37, 213));
    }

    #[test]
    fn reference_scene_within_one_range_bin() {
        let c = OfdmConfig::<f64>::ism_24ghz();
        let r = c.snap_range(200.0);
        let v = c.snap_velocity(50.0);
        let tx = generate_symbols(&c, Qam::QAM4, 5);
        let rx = synthesize_echo(&c, &tx, &EchoModel::from_sinr(1.0, r, v).unwrap(), 6).unwrap();
        let est = Estimator::new(&c).estimate(&divide(&tx, &rx).unwrap()).unwrap();
        assert!((est.r_hat - r).abs() <= c.range_bin() * (1.0 + 1e-9), "{} vs {r}", est.r_hat);
        assert!((est.v_hat - v).abs() <= c.velocity_bin() * (1.0 + 1e-9), "{} vs {v}", est.v_hat);
    }

    #[test]
    fn majority_vote_and_mean() {
        let a = AxisEstimate::<f64>::from_bins(vec![3, 3, 5, 2, 5], 0.5, 8);
        assert_eq!(a.bin, 3);
        assert_eq!(a.value, 1.5);
        assert!((a.mean - 0.5 * 18.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn f32_pipeline() {
        let c = OfdmConfig::<f32>::ism_24ghz().with_lengths(16, 32).unwrap().unpadded();
        let v = c.velocity_bin() * 3.0;
        let tx = generate_symbols(&c, Qam::QAM4, 1);
        let rx = synthesize_echo(&c, &tx, &EchoModel::new(1.0f32, 0.0, v, 0.0, 0.0).unwrap(), 0).unwrap();
        let est = estimate_velocity(&divide(&tx, &rx).unwrap(), &c).unwrap();
        assert_eq!(est.bin, 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn on_grid_recovery(kv in 0usize..32, kr in 0usize..64, seed in any::<u64>()) {
            let c = small(32, 64);
            let tx = generate_symbols(&c, Qam::QAM4, seed);
            let e = EchoModel::new(1.0, kr as f64 * c.range_bin(), kv as f64 * c.velocity_bin(), 0.0, 0.0).unwrap();
            let rx = synthesize_echo(&c, &tx, &e, seed).unwrap();
            let est = Estimator::new(&c).estimate(&divide(&tx, &rx).unwrap()).unwrap();
            prop_assert!(est.velocity.bins.iter().all(|b| *b == kv));
            prop_assert!(est.range.bins.iter().all(|b| *b == kr));
        }
    }
}
