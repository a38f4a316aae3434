//! `section.key = value` configuration files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := section '.' name ws* '=' ws* value [comment]
//! ```
//!
//! Every key in [`KEYS`] is required, unknown or repeated keys are errors.
//! Keys ending in `_db` / `_dbm` are logarithmic and converted to linear
//! units once, when the radio parameters are built at load time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sbs_core::link_budget::RadioParams;
use sbs_core::units::{db_to_linear, dbm_to_watts, wavelength};
use sbs_core::{array_geometry, beamforming, ofdm_isac, Direction};

use crate::CliError;

/// Every recognized key with its unit, in dump order.
pub const KEYS: &[(&str, &str)] = &[
    ("array.p", "layer count including the centre element"),
    ("array.b", "ring size exponent, 2^b elements per ring"),
    ("array.d_m", "m"),
    ("beam.beta", "linear"),
    ("beam.fdb", "phi:theta deg"),
    ("beam.dcbs", "list of phi:theta deg"),
    ("beam.grid", "cut | full"),
    ("beam.step_deg", "deg"),
    ("beam.pattern_step_deg", "deg"),
    ("radio.f_c_hz", "Hz"),
    ("radio.p_t_dbm", "dBm"),
    ("radio.rho", "fraction in [0, 1]"),
    ("radio.g_t_db", "dB"),
    ("radio.g_rc_db", "dB"),
    ("radio.g_rs_db", "dB"),
    ("radio.g_pc_db", "dB"),
    ("radio.g_ps_db", "dB"),
    ("radio.alpha", "path-loss exponent"),
    ("radio.k_factor", "linear"),
    ("radio.p_n_dbm", "dBm"),
    ("radio.f_n_db", "dB"),
    ("radio.xi_th_db", "dB"),
    ("radio.epsilon", "probability in (0, 1)"),
    ("radio.rcs_m2", "m^2"),
    ("radio.p_i_dbm", "dBm"),
    ("radio.gamma_min_db", "dB"),
    ("radio.bandwidth_hz", "Hz"),
    ("radio.x_start_m", "m"),
    ("radio.x_stop_m", "m"),
    ("radio.x_step_m", "m"),
    ("ofdm.m", "symbols"),
    ("ofdm.n", "subcarriers"),
    ("ofdm.m_d", "points"),
    ("ofdm.n_idft", "points"),
    ("ofdm.delta_f_hz", "Hz"),
    ("ofdm.guard_fraction", "fraction of the useful symbol"),
    ("ofdm.qam_order", "power of 4"),
    ("ofdm.target_range_m", "m"),
    ("ofdm.target_velocity_mps", "m/s"),
    ("scene.h_m", "m"),
    ("scene.w_r_m", "m"),
    ("scene.tau_s", "s"),
    ("scene.widths_deg", "list of delta_theta:delta_phi deg"),
    ("scene.rho_step", "fraction"),
    ("frame.t_d_ms", "ms"),
    ("frame.t_g_ms", "ms"),
    ("frame.t_u_ms", "ms"),
    ("frame.subframes", "count"),
    ("mc.seed", "u64"),
    ("mc.trials", "count"),
    ("mc.gamma_start_db", "dB"),
    ("mc.gamma_stop_db", "dB"),
    ("mc.gamma_step_db", "dB"),
];

/// The shipped configuration.
pub const DEFAULT_CFG: &str = include_str!("../default.cfg");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair(pub f64, pub f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Cut,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArraySection {
    pub p: usize,
    pub b: u32,
    pub d_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSection {
    pub beta: f64,
    /// (phi, theta)
    pub fdb: AnglePair,
    pub dcbs: Vec<AnglePair>,
    pub grid: GridKind,
    /// Desired-response grid step.
    pub step_deg: f64,
    /// Step of the reported pattern.
    pub pattern_step_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioSection {
    pub f_c_hz: f64,
    pub p_t_dbm: f64,
    pub rho: f64,
    pub g_t_db: f64,
    pub g_rc_db: f64,
    pub g_rs_db: f64,
    pub g_pc_db: f64,
    pub g_ps_db: f64,
    pub alpha: f64,
    pub k_factor: f64,
    pub p_n_dbm: f64,
    pub f_n_db: f64,
    pub xi_th_db: f64,
    pub epsilon: f64,
    pub rcs_m2: f64,
    pub p_i_dbm: f64,
    pub gamma_min_db: f64,
    pub bandwidth_hz: f64,
    pub x_start_m: f64,
    pub x_stop_m: f64,
    pub x_step_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmSection {
    pub m: usize,
    pub n: usize,
    pub m_d: usize,
    pub n_idft: usize,
    pub delta_f_hz: f64,
    pub guard_fraction: f64,
    pub qam_order: usize,
    pub target_range_m: f64,
    pub target_velocity_mps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSection {
    pub h_m: f64,
    pub w_r_m: f64,
    pub tau_s: f64,
    /// (delta_theta, delta_phi)
    pub widths_deg: Vec<AnglePair>,
    pub rho_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSection {
    pub t_d_ms: f64,
    pub t_g_ms: f64,
    pub t_u_ms: f64,
    pub subframes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSection {
    pub seed: u64,
    pub trials: usize,
    pub gamma_start_db: f64,
    pub gamma_stop_db: f64,
    pub gamma_step_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolkitConfig {
    pub array: ArraySection,
    pub beam: BeamSection,
    pub radio: RadioSection,
    pub ofdm: OfdmSection,
    pub scene: SceneSection,
    pub frame: FrameSection,
    pub mc: McSection,
    /// Linear-unit radio parameters derived from `radio`.
    pub params: RadioParams<f64>,
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    let mut problems = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            problems.push(format!("line {}: expected `section.key = value`", no + 1));
            continue;
        };
        let key = key.trim();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            problems.push(format!("line {}: unknown key `{key}`", no + 1));
            continue;
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            problems.push(format!("line {}: `{key}` set twice", no + 1));
        }
    }
    if problems.is_empty() {
        Ok(map)
    } else {
        Err(CliError::Config(problems.join("\n")))
    }
}

/// Typed lookups that collect every problem before failing.
struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
    problems: Vec<String>,
}

impl Reader<'_> {
    fn unit(key: &str) -> &'static str {
        KEYS.iter().find(|(k, _)| *k == key).map(|(_, u)| *u).unwrap_or("")
    }

    fn raw(&mut self, key: &str) -> Option<&str> {
        match self.map.get(key) {
            Some(v) => Some(v.as_str()),
            None => {
                self.problems.push(format!("missing key `{key}` ({})", Self::unit(key)));
                None
            }
        }
    }

    fn parsed<V: std::str::FromStr>(&mut self, key: &str, default: V) -> V {
        let Some(raw) = self.raw(key) else { return default };
        match raw.parse() {
            Ok(v) => v,
            Err(_) => {
                let msg = format!("`{key}` = `{raw}` is not a valid value ({})", Self::unit(key));
                self.problems.push(msg);
                default
            }
        }
    }

    fn f64(&mut self, key: &str) -> f64 {
        let v = self.parsed(key, f64::NAN);
        if !v.is_nan() && !v.is_finite() {
            self.problems.push(format!("`{key}` must be finite ({})", Self::unit(key)));
        }
        v
    }

    fn pairs(&mut self, key: &str) -> Vec<AnglePair> {
        let Some(raw) = self.raw(key).map(str::to_string) else { return Vec::new() };
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match parse_pair(item) {
                Some(p) => out.push(p),
                None => self.problems.push(format!("`{key}` entry `{item}` is not `a:b` ({})", Self::unit(key))),
            }
        }
        out
    }

    fn pair(&mut self, key: &str) -> AnglePair {
        let v = self.pairs(key);
        if v.len() != 1 && self.map.contains_key(key) {
            self.problems.push(format!("`{key}` needs exactly one pair ({})", Self::unit(key)));
        }
        v.first().copied().unwrap_or(AnglePair(f64::NAN, f64::NAN))
    }

    fn check(&mut self, key: &str, ok: bool, rule: &str) {
        if !ok {
            let value = self.map.get(key).cloned().unwrap_or_default();
            self.problems.push(format!("`{key}` = {value} is out of range: {rule}"));
        }
    }
}

fn parse_pair(s: &str) -> Option<AnglePair> {
    let (a, b) = s.split_once(':')?;
    let a: f64 = a.trim().parse().ok()?;
    let b: f64 = b.trim().parse().ok()?;
    (a.is_finite() && b.is_finite()).then_some(AnglePair(a, b))
}

impl ToolkitConfig {
    pub fn defaults() -> Self {
        Self::parse(DEFAULT_CFG).expect("shipped configuration is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let map = parse_entries(text)?;
        let mut r = Reader { map: &map, problems: Vec::new() };

        let array = ArraySection { p: r.parsed("array.p", 0), b: r.parsed("array.b", 0), d_m: r.f64("array.d_m") };
        let grid = match r.raw("beam.grid") {
            Some("cut") | None => GridKind::Cut,
            Some("full") => GridKind::Full,
            Some(other) => {
                let msg = format!("`beam.grid` = `{other}` must be `cut` or `full`");
                r.problems.push(msg);
                GridKind::Cut
            }
        };
        let beam = BeamSection {
            beta: r.f64("beam.beta"),
            fdb: r.pair("beam.fdb"),
            dcbs: r.pairs("beam.dcbs"),
            grid,
            step_deg: r.f64("beam.step_deg"),
            pattern_step_deg: r.f64("beam.pattern_step_deg"),
        };
        let radio = RadioSection {
            f_c_hz: r.f64("radio.f_c_hz"),
            p_t_dbm: r.f64("radio.p_t_dbm"),
            rho: r.f64("radio.rho"),
            g_t_db: r.f64("radio.g_t_db"),
            g_rc_db: r.f64("radio.g_rc_db"),
            g_rs_db: r.f64("radio.g_rs_db"),
            g_pc_db: r.f64("radio.g_pc_db"),
            g_ps_db: r.f64("radio.g_ps_db"),
            alpha: r.f64("radio.alpha"),
            k_factor: r.f64("radio.k_factor"),
            p_n_dbm: r.f64("radio.p_n_dbm"),
            f_n_db: r.f64("radio.f_n_db"),
            xi_th_db: r.f64("radio.xi_th_db"),
            epsilon: r.f64("radio.epsilon"),
            rcs_m2: r.f64("radio.rcs_m2"),
            p_i_dbm: r.f64("radio.p_i_dbm"),
            gamma_min_db: r.f64("radio.gamma_min_db"),
            bandwidth_hz: r.f64("radio.bandwidth_hz"),
            x_start_m: r.f64("radio.x_start_m"),
            x_stop_m: r.f64("radio.x_stop_m"),
            x_step_m: r.f64("radio.x_step_m"),
        };
        let ofdm = OfdmSection {
            m: r.parsed("ofdm.m", 0),
            n: r.parsed("ofdm.n", 0),
            m_d: r.parsed("ofdm.m_d", 0),
            n_idft: r.parsed("ofdm.n_idft", 0),
            delta_f_hz: r.f64("ofdm.delta_f_hz"),
            guard_fraction: r.f64("ofdm.guard_fraction"),
            qam_order: r.parsed("ofdm.qam_order", 0),
            target_range_m: r.f64("ofdm.target_range_m"),
            target_velocity_mps: r.f64("ofdm.target_velocity_mps"),
        };
        let scene = SceneSection {
            h_m: r.f64("scene.h_m"),
            w_r_m: r.f64("scene.w_r_m"),
            tau_s: r.f64("scene.tau_s"),
            widths_deg: r.pairs("scene.widths_deg"),
            rho_step: r.f64("scene.rho_step"),
        };
        let frame = FrameSection {
            t_d_ms: r.f64("frame.t_d_ms"),
            t_g_ms: r.f64("frame.t_g_ms"),
            t_u_ms: r.f64("frame.t_u_ms"),
            subframes: r.parsed("frame.subframes", 0),
        };
        let mc = McSection {
            seed: r.parsed("mc.seed", 0),
            trials: r.parsed("mc.trials", 0),
            gamma_start_db: r.f64("mc.gamma_start_db"),
            gamma_stop_db: r.f64("mc.gamma_stop_db"),
            gamma_step_db: r.f64("mc.gamma_step_db"),
        };
        if !r.problems.is_empty() {
            return Err(CliError::Config(r.problems.join("\n")));
        }

        r.check("radio.rho", (0.0..=1.0).contains(&radio.rho), "must lie in [0, 1]");
        r.check("radio.epsilon", radio.epsilon > 0.0 && radio.epsilon < 1.0, "must lie in (0, 1)");
        r.check("radio.k_factor", radio.k_factor >= 0.0, "must be >= 0");
        for (key, v) in [
            ("radio.f_c_hz", radio.f_c_hz),
            ("radio.alpha", radio.alpha),
            ("radio.rcs_m2", radio.rcs_m2),
            ("radio.bandwidth_hz", radio.bandwidth_hz),
            ("radio.x_start_m", radio.x_start_m),
            ("radio.x_step_m", radio.x_step_m),
            ("beam.step_deg", beam.step_deg),
            ("beam.pattern_step_deg", beam.pattern_step_deg),
            ("ofdm.delta_f_hz", ofdm.delta_f_hz),
            ("scene.h_m", scene.h_m),
            ("scene.w_r_m", scene.w_r_m),
            ("scene.tau_s", scene.tau_s),
            ("scene.rho_step", scene.rho_step),
            ("mc.gamma_step_db", mc.gamma_step_db),
        ] {
            r.check(key, v > 0.0, "must be > 0");
        }
        r.check("radio.x_stop_m", radio.x_stop_m >= radio.x_start_m, "must be >= radio.x_start_m");
        r.check("mc.gamma_stop_db", mc.gamma_stop_db >= mc.gamma_start_db, "must be >= mc.gamma_start_db");
        r.check("beam.beta", beam.beta >= 0.0, "must be >= 0");
        r.check("ofdm.guard_fraction", ofdm.guard_fraction >= 0.0, "must be >= 0");
        r.check("mc.trials", mc.trials > 0, "must be > 0");
        r.check("frame.subframes", frame.subframes > 0, "must be > 0");
        r.check("scene.widths_deg", !scene.widths_deg.is_empty(), "needs at least one pair");
        for w in &scene.widths_deg {
            r.check("scene.widths_deg", w.0 > 0.0 && w.1 > 0.0, "widths must be > 0");
        }
        if !r.problems.is_empty() {
            return Err(CliError::Config(r.problems.join("\n")));
        }

        let cfg = Self { params: radio_params(&radio), array, beam, radio, ofdm, scene, frame, mc };
        // Build every core type once so model-level rules surface as config errors.
        cfg.array_config()?;
        cfg.beam_spec()?;
        cfg.ofdm_config()?;
        cfg.qam()?;
        cfg.frame_config()?;
        cfg.params.validate().map_err(|e| CliError::Config(format!("radio section: {e}")))?;
        Ok(cfg)
    }

    pub fn array_config(&self) -> Result<array_geometry::ArrayConfig<f64>, CliError> {
        array_geometry::ArrayConfig::new(self.array.p, self.array.b, self.array.d_m, wavelength(self.radio.f_c_hz))
            .map_err(|e| CliError::Config(format!("array section: {e}")))
    }

    pub fn direction(pair: AnglePair) -> Result<Direction, CliError> {
        Direction::new(pair.0, pair.1).map_err(|e| CliError::Config(format!("direction {}:{}: {e}", pair.0, pair.1)))
    }

    pub fn dcb_directions(&self) -> Result<Vec<Direction>, CliError> {
        self.beam.dcbs.iter().map(|p| Self::direction(*p)).collect()
    }

    pub fn beam_spec(&self) -> Result<beamforming::BeamSpec<f64>, CliError> {
        beamforming::BeamSpec::new(Self::direction(self.beam.fdb)?, self.dcb_directions()?, self.beam.beta)
            .map_err(|e| CliError::Config(format!("beam section: {e}")))
    }

    pub fn ofdm_config(&self) -> Result<ofdm_isac::OfdmConfig<f64>, CliError> {
        let o = &self.ofdm;
        ofdm_isac::OfdmConfig::new(
            o.m,
            o.n,
            o.delta_f_hz,
            self.radio.f_c_hz,
            o.guard_fraction / o.delta_f_hz,
            o.m_d,
            o.n_idft,
        )
        .map_err(|e| CliError::Config(format!("ofdm section: {e}")))
    }

    pub fn qam(&self) -> Result<ofdm_isac::Qam, CliError> {
        ofdm_isac::Qam::new(self.ofdm.qam_order).map_err(|e| CliError::Config(format!("ofdm section: {e}")))
    }

    pub fn frame_config(&self) -> Result<sbs_core::frame_scheduler::FrameConfig, CliError> {
        let f = &self.frame;
        sbs_core::frame_scheduler::FrameConfig::from_ms(f.t_d_ms, f.t_g_ms, f.t_u_ms)
            .map_err(|e| CliError::Config(format!("frame section: {e}")))
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn dump(&self) -> String {
        let pairs = |v: &[AnglePair]| v.iter().map(|p| format!("{}:{}", p.0, p.1)).collect::<Vec<_>>().join(", ");
        let (a, b, r, o, s, f, m) = (&self.array, &self.beam, &self.radio, &self.ofdm, &self.scene, &self.frame, &self.mc);
        let values: Vec<String> = vec![
            a.p.to_string(),
            a.b.to_string(),
            a.d_m.to_string(),
            b.beta.to_string(),
            pairs(&[b.fdb]),
            pairs(&b.dcbs),
            match b.grid {
                GridKind::Cut => "cut".into(),
                GridKind::Full => "full".into(),
            },
            b.step_deg.to_string(),
            b.pattern_step_deg.to_string(),
            r.f_c_hz.to_string(),
            r.p_t_dbm.to_string(),
            r.rho.to_string(),
            r.g_t_db.to_string(),
            r.g_rc_db.to_string(),
            r.g_rs_db.to_string(),
            r.g_pc_db.to_string(),
            r.g_ps_db.to_string(),
            r.alpha.to_string(),
            r.k_factor.to_string(),
            r.p_n_dbm.to_string(),
            r.f_n_db.to_string(),
            r.xi_th_db.to_string(),
            r.epsilon.to_string(),
            r.rcs_m2.to_string(),
            r.p_i_dbm.to_string(),
            r.gamma_min_db.to_string(),
            r.bandwidth_hz.to_string(),
            r.x_start_m.to_string(),
            r.x_stop_m.to_string(),
            r.x_step_m.to_string(),
            o.m.to_string(),
            o.n.to_string(),
            o.m_d.to_string(),
            o.n_idft.to_string(),
            o.delta_f_hz.to_string(),
            o.guard_fraction.to_string(),
            o.qam_order.to_string(),
            o.target_range_m.to_string(),
            o.target_velocity_mps.to_string(),
            s.h_m.to_string(),
            s.w_r_m.to_string(),
            s.tau_s.to_string(),
            pairs(&s.widths_deg),
            s.rho_step.to_string(),
            f.t_d_ms.to_string(),
            f.t_g_ms.to_string(),
            f.t_u_ms.to_string(),
            f.subframes.to_string(),
            m.seed.to_string(),
            m.trials.to_string(),
            m.gamma_start_db.to_string(),
            m.gamma_stop_db.to_string(),
            m.gamma_step_db.to_string(),
        ];
        debug_assert_eq!(values.len(), KEYS.len());
        let mut out = String::new();
        for ((key, unit), value) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{key} = {value}  # {unit}");
        }
        out
    }
}

fn radio_params(r: &RadioSection) -> RadioParams<f64> {
    RadioParams {
        p_t: dbm_to_watts(r.p_t_dbm),
        rho: r.rho,
        g_t: db_to_linear(r.g_t_db),
        g_rc: db_to_linear(r.g_rc_db),
        g_rs: db_to_linear(r.g_rs_db),
        g_pc: db_to_linear(r.g_pc_db),
        g_ps: db_to_linear(r.g_ps_db),
        lambda: wavelength(r.f_c_hz),
        alpha: r.alpha,
        k_factor: r.k_factor,
        p_n: dbm_to_watts(r.p_n_dbm),
        f_n: db_to_linear(r.f_n_db),
        xi_th: db_to_linear(r.xi_th_db),
        epsilon: r.epsilon,
        sigma_rcs: r.rcs_m2,
        p_i: dbm_to_watts(r.p_i_dbm),
        gamma_min: db_to_linear(r.gamma_min_db),
        bandwidth: r.bandwidth_hz,
    }
}

/// `start, start + step, ...` up to `stop` inclusive, without accumulating
/// rounding error.
pub fn sweep(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_matches_tables() {
        let c = ToolkitConfig::defaults();
        assert!((c.params.p_t - 0.1).abs() < 1e-15);
        assert_eq!(c.radio.f_c_hz, 24e9);
        assert_eq!((c.ofdm.m, c.ofdm.n), (256, 1024));
        assert_eq!(c.array_config().unwrap().element_count(), 257);
        assert_eq!(c.beam.dcbs.len(), 4);
        let ism = RadioParams::<f64>::ism_24ghz(0.25);
        assert_eq!(c.params, ism);
    }

    #[test]
    fn empty_file_lists_every_key() {
        let CliError::Config(msg) = ToolkitConfig::parse("").unwrap_err() else { panic!() };
        for (key, unit) in KEYS {
            assert!(msg.contains(&format!("`{key}` ({unit})")), "{key}");
        }
    }

    #[test]
    fn out_of_range_rho() {
        let text = DEFAULT_CFG.replace("radio.rho = 0.25", "radio.rho = 1.5");
        let CliError::Config(msg) = ToolkitConfig::parse(&text).unwrap_err() else { panic!() };
        assert!(msg.contains("radio.rho") && msg.contains("[0, 1]"), "{msg}");
    }

    #[test]
    fn syntax_problems() {
        assert!(ToolkitConfig::parse(&format!("{DEFAULT_CFG}\nradio.rho = 0.3\n")).is_err());
        assert!(ToolkitConfig::parse(&format!("{DEFAULT_CFG}\nradio.power = 3\n")).is_err());
        assert!(ToolkitConfig::parse(&format!("{DEFAULT_CFG}\njust words\n")).is_err());
        let bad = DEFAULT_CFG.replace("ofdm.m = 256", "ofdm.m = lots");
        let CliError::Config(msg) = ToolkitConfig::parse(&bad).unwrap_err() else { panic!() };
        assert!(msg.contains("ofdm.m") && msg.contains("symbols"));
        let bad = DEFAULT_CFG.replace("ofdm.qam_order = 4", "ofdm.qam_order = 8");
        assert!(ToolkitConfig::parse(&bad).is_err());
        let bad = DEFAULT_CFG.replace("beam.fdb = 0:45", "beam.fdb = 0:95");
        assert!(ToolkitConfig::parse(&bad).is_err());
    }

    #[test]
    fn dump_round_trips() {
        let c = ToolkitConfig::defaults();
        let again = ToolkitConfig::parse(&c.dump()).unwrap();
        assert_eq!(c, again);
        let odd = DEFAULT_CFG.replace("radio.rho = 0.25", "radio.rho = 0.123456789012345678");
        let c = ToolkitConfig::parse(&odd).unwrap();
        let again = ToolkitConfig::parse(&c.dump()).unwrap();
        assert!((c.radio.rho - again.radio.rho).abs() <= 1e-12 * c.radio.rho);
        assert_eq!(c.dump(), again.dump());
    }

    #[test]
    fn sweep_points() {
        let s = sweep(0.0, 1.0, 0.1);
        assert_eq!(s.len(), 11);
        assert!((s[10] - 1.0).abs() < 1e-12);
        assert_eq!(sweep(-15.0, 0.0, 1.0).len(), 16);
        assert_eq!(sweep(2.0, 2.0, 1.0), vec![2.0]);
    }
}
