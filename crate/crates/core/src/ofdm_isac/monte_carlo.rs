//! Monte Carlo comparison of the estimator with the closed-form theory.
//!
//! Trial `t` at sweep point `g` draws its symbols and noise from
//! [`trial_seed`]`(master, g, t)`, so every trial is reproducible on its own
//! and the reduction, done in trial order after a parallel map, gives the
//! same bits for any thread count.

use rayon::prelude::*;

use super::{divide, generate_symbols, synthesize_echo, EchoModel, Estimator, OfdmConfig, Qam};
use super::{p_correct_bin, rmse_range_theory, rmse_velocity_theory};
use crate::units::db_to_linear;
use crate::{Error, Result, Scalar};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(master ^ g·φ) ^ t)`, with φ the 64-bit golden
/// ratio constant. The echo noise uses `splitmix64` of this value.
pub fn trial_seed(master: u64, gamma_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(master ^ (gamma_index as u64).wrapping_mul(GOLDEN)) ^ trial as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig<T> {
    pub ofdm: OfdmConfig<T>,
    pub modulation: Qam,
    pub trials: usize,
    pub gammas_db: Vec<T>,
    /// Truth, snapped to the nearest bin before use.
    pub range_m: T,
    pub velocity_mps: T,
    pub seed: u64,
}

/// One sweep point. Correct-bin rates and RMSE are taken over every
/// per-line read-out: `trials × N` for velocity, `trials × M` for range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRow<T> {
    pub gamma_db: T,
    pub rmse_range_mc: T,
    pub rmse_range_theory: T,
    pub rmse_vel_mc: T,
    pub rmse_vel_theory: T,
    /// Velocity axis.
    pub p_correct_mc: T,
    pub p_correct_theory: T,
    pub p_correct_range_mc: T,
    pub p_correct_range_theory: T,
    pub velocity_lines: usize,
    pub range_lines: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialRecord {
    vel_hits: usize,
    vel_sq: f64,
    range_hits: usize,
    range_sq: f64,
}

pub fn run_monte_carlo<T: Scalar>(cfg: &MonteCarloConfig<T>) -> Result<Vec<McRow<T>>> {
    if cfg.trials == 0 {
        return Err(Error::domain("trial count must be positive"));
    }
    if cfg.gammas_db.iter().any(|g| !g.is_finite()) {
        return Err(Error::domain("SINR sweep values must be finite"));
    }
    let o = &cfg.ofdm;
    let v_true = o.snap_velocity(cfg.velocity_mps);
    let r_true = o.snap_range(cfg.range_m);
    let k_v = (v_true / o.velocity_bin()).round().to_usize();
    let k_r = (r_true / o.range_bin()).round().to_usize();
    let (Some(k_v), Some(k_r)) = (k_v, k_r) else {
        return Err(Error::domain("target range and velocity must be >= 0"));
    };
    if k_v >= o.m_d() || k_r >= o.n_idft() {
        return Err(Error::domain(format!(
            "target outside the unambiguous window: velocity bin {k_v} of {}, range bin {k_r} of {}",
            o.m_d(),
            o.n_idft()
        )));
    }
    let estimator = Estimator::new(o);
    let dv = o.velocity_bin().to_f64_lossy();
    let dr = o.range_bin().to_f64_lossy();

    cfg.gammas_db
        .iter()
        .enumerate()
        .map(|(gi, &gamma_db)| {
            let gamma = db_to_linear(gamma_db);
            let echo = EchoModel::from_sinr(gamma, r_true, v_true)?;
            let records = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(cfg.seed, gi, t);
                    let tx = generate_symbols(o, cfg.modulation, seed);
                    let rx = synthesize_echo(o, &tx, &echo, splitmix64(seed))?;
                    let est = estimator.estimate(&divide(&tx, &rx)?)?;
                    let mut rec = TrialRecord::default();
                    for &b in &est.velocity.bins {
                        rec.vel_hits += usize::from(b == k_v);
                        let e = (b as f64 - k_v as f64) * dv;
                        rec.vel_sq += e * e;
                    }
                    for &b in &est.range.bins {
                        rec.range_hits += usize::from(b == k_r);
                        let e = (b as f64 - k_r as f64) * dr;
                        rec.range_sq += e * e;
                    }
                    Ok(rec)
                })
                .collect::<Result<Vec<_>>>()?;
            let total = records.iter().fold(TrialRecord::default(), |a, r| TrialRecord {
                vel_hits: a.vel_hits + r.vel_hits,
                vel_sq: a.vel_sq + r.vel_sq,
                range_hits: a.range_hits + r.range_hits,
                range_sq: a.range_sq + r.range_sq,
            });
            let vel_lines = cfg.trials * o.n();
            let range_lines = cfg.trials * o.m();
            Ok(McRow {
                gamma_db,
                rmse_range_mc: T::lit((total.range_sq / range_lines as f64).sqrt()),
                rmse_range_theory: rmse_range_theory(r_true, gamma, o.n()),
                rmse_vel_mc: T::lit((total.vel_sq / vel_lines as f64).sqrt()),
                rmse_vel_theory: rmse_velocity_theory(v_true, gamma, o.m()),
                p_correct_mc: T::lit(total.vel_hits as f64 / vel_lines as f64),
                p_correct_theory: p_correct_bin(gamma, o.m()),
                p_correct_range_mc: T::lit(total.range_hits as f64 / range_lines as f64),
                p_correct_range_theory: p_correct_bin(gamma, o.n()),
                velocity_lines: vel_lines,
                range_lines,
            })
        })
        .collect()
}

/// Normal-approximation band `p ± z sqrt(p(1-p)/n)`, clamped to `[0, 1]`.
pub fn binomial_band(p: f64, n: usize, z: f64) -> (f64, f64) {
    let half = z * (p * (1.0 - p) / n as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(trials: usize, seed: u64) -> MonteCarloConfig<f64> {
        MonteCarloConfig {
            ofdm: OfdmConfig::ism_24ghz().with_lengths(16, 32).unwrap().unpadded(),
            modulation: Qam::QAM4,
            trials,
            gammas_db: vec![-20.0, -5.0, 10.0],
            range_m: 200.0,
            velocity_mps: 50.0,
            seed,
        }
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for g in 0..4 {
            for t in 0..1000 {
                assert!(seen.insert(trial_seed(42, g, t)));
            }
        }
        assert_ne!(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
    }

    #[test]
    fn identical_across_thread_counts() {
        let c = cfg(40, 9);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_monte_carlo(&c)).unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run_monte_carlo(&c)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn high_sinr_is_error_free() {
        let rows = run_monte_carlo(&cfg(10, 1)).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.p_correct_mc, 1.0);
        assert_eq!(last.p_correct_range_mc, 1.0);
        assert_eq!(last.rmse_vel_mc, 0.0);
        assert_eq!(last.rmse_range_mc, 0.0);
        // errors grow as the SINR drops
        assert!(rows[0].rmse_vel_mc > rows[2].rmse_vel_mc);
        assert!(rows[0].p_correct_mc < rows[2].p_correct_mc);
        assert_eq!(last.velocity_lines, 10 * 32);
        assert_eq!(last.range_lines, 10 * 16);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(run_monte_carlo(&cfg(0, 1)).is_err());
        let mut c = cfg(1, 1);
        c.velocity_mps = -50.0;
        assert!(run_monte_carlo(&c).is_err());
        let mut c = cfg(1, 1);
        c.range_m = 1e9;
        assert!(run_monte_carlo(&c).is_err());
    }

    #[test]
    fn band() {
        let (lo, hi) = binomial_band(0.5, 10_000, 2.0);
        assert!((lo - 0.49).abs() < 1e-12 && (hi - 0.51).abs() < 1e-12);
        assert_eq!(binomial_band(0.0, 10, 3.0), (0.0, 0.0));
    }
}
