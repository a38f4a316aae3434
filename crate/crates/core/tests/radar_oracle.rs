//! Monte Carlo correct-bin rates against the exact periodogram law.
//!
//! For one line of `L` samples with unit tone and complex noise of power
//! `1/γ`, the true bin's normalized power is noncentral chi-square with two
//! degrees of freedom and noncentrality `2Lγ`, and each of the `L - 1`
//! other bins is an independent exponential. The reference values below
//! are `E[(1 - exp(-Y/2))^(L-1)]` by adaptive quadrature in SciPy.

use sbs_core::ofdm_isac::{binomial_band, run_monte_carlo, MonteCarloConfig, OfdmConfig, Qam};

const Z99: f64 = 2.5758293035489004;

// (gamma_db, velocity with L = 64, range with L = 256)
const ORACLE: [(f64, f64, f64); 3] = [
    (-14.0, 0.29202794866385456, 0.8628685803786008),
    (-12.0, 0.4901892548694906, 0.9846339782715311),
    (-10.0, 0.7379134939007327, 0.999749251166687),
];

#[test]
fn correct_bin_rate_matches_periodogram_law() {
    let cfg = MonteCarloConfig {
        ofdm: OfdmConfig::<f64>::ism_24ghz().with_lengths(64, 256).unwrap().unpadded(),
        modulation: Qam::QAM4,
        trials: 400,
        gammas_db: ORACLE.iter().map(|o| o.0).collect(),
        range_m: 200.0,
        velocity_mps: 50.0,
        seed: 7,
    };
    let rows = run_monte_carlo(&cfg).unwrap();
    for (row, &(g, p_vel, p_range)) in rows.iter().zip(&ORACLE) {
        assert_eq!(row.gamma_db, g);
        let (lo, hi) = binomial_band(p_vel, row.velocity_lines, Z99);
        assert!((lo..=hi).contains(&row.p_correct_mc), "{g} dB velocity {} vs {p_vel}", row.p_correct_mc);
        let (lo, hi) = binomial_band(p_range, row.range_lines, Z99);
        assert!(
            (lo..=hi).contains(&row.p_correct_range_mc),
            "{g} dB range {} vs {p_range}",
            row.p_correct_range_mc
        );
    }
}
