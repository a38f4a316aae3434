//! The five experiments and their CSV outputs.
//!
//! Every CSV starts with `#` metadata lines (tool version, experiment,
//! SHA-256 of the canonical config dump, master seed), then a header row.
//! Floats use Rust's shortest round-trip formatting, so identical inputs
//! give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sbs_core::beamforming::{self, beam_pattern, cross_cut, full_grid, gain_db, measure_beamwidth};
use sbs_core::frame_scheduler::{allocate, build_frame, check_interference_free, BeamId, ResourceGrid, UserRequest};
use sbs_core::link_budget::{
    capacity_ceiling, max_comm_range, max_sensing_range, outage_capacity, outage_probability, range_crossover,
};
use sbs_core::ofdm_isac::{run_monte_carlo, MonteCarloConfig};
use sbs_core::scanning::{scanning_period, BeamWidths, SceneGeometry};

use crate::config::{sweep, AnglePair, GridKind, ToolkitConfig};
use crate::{BeamformArgs, CliError, Command, FramePlanArgs, GridArg, RadarMcArgs};

/// Half span and step of the cuts used to measure beamwidths, degrees.
const WIDTH_CUT_SPAN: f64 = 10.0;
const WIDTH_CUT_STEP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChecksum {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
    pub files: Vec<FileChecksum>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn config_hash(cfg: &ToolkitConfig) -> String {
    sha256_hex(cfg.dump().as_bytes())
}

/// Rounds away binary noise from swept values such as `3 * 0.1`.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Quotes a free-text CSV field when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct Table {
    name: &'static str,
    meta: Vec<String>,
    header: &'static str,
    rows: Vec<String>,
}

impl Table {
    fn new(name: &'static str, header: &'static str) -> Self {
        Self { name, meta: Vec::new(), header, rows: Vec::new() }
    }

    fn render(self, cfg: &ToolkitConfig, experiment: &str) -> Output {
        let mut s = String::new();
        let _ = writeln!(s, "# sbs {} {experiment}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# config_sha256 = {}", config_hash(cfg));
        let _ = writeln!(s, "# seed = {}", cfg.mc.seed);
        for m in &self.meta {
            let _ = writeln!(s, "# {m}");
        }
        let _ = writeln!(s, "{}", self.header);
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        Output { name: self.name.to_string(), contents: s }
    }
}

pub fn run_experiment(cfg: &ToolkitConfig, command: &Command) -> Result<Vec<Output>, CliError> {
    let tables = match command {
        Command::Beamform(a) => beamform(cfg, a)?,
        Command::Linkbudget => linkbudget(cfg)?,
        Command::RadarMc(a) => radar_mc(cfg, a)?,
        Command::ScanPeriod => scan_period(cfg)?,
        Command::FramePlan(a) => frame_plan(cfg, a)?,
    };
    Ok(tables.into_iter().map(|t| t.render(cfg, command.name())).collect())
}

/// Writes the outputs and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &ToolkitConfig, experiment: &str, outputs: &[Output]) -> Result<Manifest, CliError> {
    let io = |path: PathBuf| move |source| CliError::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
    let mut files = Vec::new();
    for o in outputs {
        let path = dir.join(&o.name);
        std::fs::write(&path, &o.contents).map_err(io(path.clone()))?;
        files.push(FileChecksum { name: o.name.clone(), sha256: sha256_hex(o.contents.as_bytes()) });
    }
    let manifest = Manifest {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: experiment.to_string(),
        config_sha256: config_hash(cfg),
        seed: cfg.mc.seed,
        files,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, json + "\n").map_err(io(path))?;
    Ok(manifest)
}

fn beamform(cfg: &ToolkitConfig, args: &BeamformArgs) -> Result<Vec<Table>, CliError> {
    let array = cfg.array_config()?;
    let spec = cfg.beam_spec()?;
    let step = args.step.unwrap_or(cfg.beam.step_deg);
    let pattern_step = args.pattern_step.unwrap_or(cfg.beam.pattern_step_deg);
    let kind = match args.grid {
        Some(GridArg::Cut) => GridKind::Cut,
        Some(GridArg::Full) => GridKind::Full,
        None => cfg.beam.grid,
    };
    let make_grid = |step: f64| {
        match kind {
            GridKind::Cut => beamforming::default_grid(&spec, step),
            GridKind::Full => full_grid(step),
        }
        .map_err(|e| CliError::Config(format!("beam grid: {e}")))
    };
    let grid = make_grid(step)?;
    let fine = make_grid(pattern_step)?;
    let design = beamforming::design(&array, &spec, &grid).map_err(CliError::numerical("joint combiner"))?;
    let pattern = beam_pattern(&array, &design.joint.w_opt, &fine).map_err(CliError::numerical("beam pattern"))?;

    let mut pat = Table::new("pattern.csv", "phi_deg,theta_deg,gain_db");
    pat.meta.push(format!(
        "{kind:?} grid: desired response every {step} deg ({} points), pattern every {pattern_step} deg",
        grid.len()
    ));
    for (d, g) in pattern.grid.iter().zip(&pattern.gain_db) {
        pat.rows.push(format!("{},{},{}", tidy(d.phi_deg()), tidy(d.theta_deg()), g));
    }

    let mut sum = Table::new(
        "summary.csv",
        "beam,phi_deg,theta_deg,gain_joint_db,gain_superposition_db,improvement_db,delta_theta_deg,delta_phi_deg",
    );
    sum.meta.push(format!("objective_joint = {}", design.joint.objective));
    sum.meta.push(format!("objective_superposition = {}", design.baseline_objective));
    sum.meta.push(format!("gradient_norm = {}", design.joint.gradient_norm));
    sum.meta.push(format!("condition_estimate = {}", design.joint.condition));
    for (i, d) in spec.directions().iter().enumerate() {
        let label = if i == 0 { "fdb".to_string() } else { format!("dcb{i}") };
        let joint = gain_db(&array, &design.joint.w_opt, d);
        let base = gain_db(&array, &design.baseline, d);
        let cut = cross_cut(d, WIDTH_CUT_SPAN, WIDTH_CUT_STEP).map_err(CliError::numerical("width cut"))?;
        let local = beam_pattern(&array, &design.joint.w_opt, &cut).map_err(CliError::numerical("width cut"))?;
        // An unmeasurable width (no interior peak) is left blank.
        let (dt, dp) = match measure_beamwidth(&local, d) {
            Ok(w) => (w.delta_theta.to_string(), w.delta_phi.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        sum.rows.push(format!(
            "{label},{},{},{joint},{base},{},{dt},{dp}",
            d.phi_deg(),
            d.theta_deg(),
            joint - base
        ));
    }
    Ok(vec![pat, sum])
}

fn linkbudget(cfg: &ToolkitConfig) -> Result<Vec<Table>, CliError> {
    let p = &cfg.params;
    let mut ranges = Table::new("ranges.csv", "rho,r_max_comm_m,r_max_sense_m");
    ranges.meta.push("r_max_comm_m is 0 at rho = 0 and r_max_sense_m is 0 at rho = 1".into());
    if let Some(c) = range_crossover(p).map_err(CliError::numerical("range crossover"))? {
        ranges.meta.push(format!("crossover rho = {}, range = {} m", c.rho, c.range));
    }
    for i in 0..=100 {
        let rho = i as f64 / 100.0;
        let q = p.with_rho(rho);
        let comm = if rho > 0.0 { max_comm_range(&q).map_err(CliError::numerical("communication range"))? } else { 0.0 };
        let sense = if rho < 1.0 { max_sensing_range(&q).map_err(CliError::numerical("sensing range"))? } else { 0.0 };
        ranges.rows.push(format!("{rho},{comm},{sense}"));
    }

    let mut cap = Table::new("capacity.csv", "x_m,outage_prob,capacity_bps");
    cap.meta.push(format!("rho = {}, ceiling = {} bit/s", p.rho, capacity_ceiling(p)));
    for x in sweep(cfg.radio.x_start_m, cfg.radio.x_stop_m, cfg.radio.x_step_m) {
        let x = tidy(x);
        let out = outage_probability(p, x).map_err(CliError::numerical("outage probability"))?;
        let c = outage_capacity(p, x).map_err(CliError::numerical("outage capacity"))?;
        cap.rows.push(format!("{x},{out},{c}"));
    }
    Ok(vec![ranges, cap])
}

fn radar_mc(cfg: &ToolkitConfig, args: &RadarMcArgs) -> Result<Vec<Table>, CliError> {
    let mut ofdm = cfg.ofdm_config()?;
    if args.m.is_some() || args.n.is_some() {
        ofdm = ofdm
            .with_lengths(args.m.unwrap_or(ofdm.m()), args.n.unwrap_or(ofdm.n()))
            .map_err(|e| CliError::Config(format!("radar-mc lengths: {e}")))?;
    }
    if args.unpadded {
        ofdm = ofdm.unpadded();
    }
    let start = args.gamma_start.unwrap_or(cfg.mc.gamma_start_db);
    let stop = args.gamma_stop.unwrap_or(cfg.mc.gamma_stop_db);
    let step = args.gamma_step.unwrap_or(cfg.mc.gamma_step_db);
    if !(step > 0.0 && stop >= start) {
        return Err(CliError::Config(format!("SINR sweep {start}..{stop} step {step} is empty")));
    }
    let trials = args.trials.unwrap_or(cfg.mc.trials);
    let mc = MonteCarloConfig {
        ofdm,
        modulation: cfg.qam()?,
        trials,
        gammas_db: sweep(start, stop, step).into_iter().map(tidy).collect(),
        range_m: cfg.ofdm.target_range_m,
        velocity_mps: cfg.ofdm.target_velocity_mps,
        seed: cfg.mc.seed,
    };
    let rows = run_monte_carlo(&mc).map_err(CliError::numerical("radar Monte Carlo"))?;

    let mut t = Table::new(
        "rmse.csv",
        "gamma_db,rmse_range_mc,rmse_range_theory,rmse_vel_mc,rmse_vel_theory,p_correct_mc,p_correct_theory",
    );
    t.meta.push(format!(
        "M = {}, N = {}, M_D = {}, N_IDFT = {}, trials = {trials}, qam = {}",
        ofdm.m(),
        ofdm.n(),
        ofdm.m_d(),
        ofdm.n_idft(),
        mc.modulation.order()
    ));
    t.meta.push(format!(
        "truth range = {} m, velocity = {} m/s (snapped to the bin grid)",
        ofdm.snap_range(mc.range_m),
        ofdm.snap_velocity(mc.velocity_mps)
    ));
    t.meta.push("p_correct columns refer to the velocity axis; range axis in rmse_detail.csv".into());
    let mut d = Table::new(
        "rmse_detail.csv",
        "gamma_db,p_correct_range_mc,p_correct_range_theory,velocity_lines,range_lines",
    );
    for r in &rows {
        t.rows.push(format!(
            "{},{},{},{},{},{},{}",
            r.gamma_db,
            r.rmse_range_mc,
            r.rmse_range_theory,
            r.rmse_vel_mc,
            r.rmse_vel_theory,
            r.p_correct_mc,
            r.p_correct_theory
        ));
        d.rows.push(format!(
            "{},{},{},{},{}",
            r.gamma_db, r.p_correct_range_mc, r.p_correct_range_theory, r.velocity_lines, r.range_lines
        ));
    }
    Ok(vec![t, d])
}

fn widths(pair: AnglePair) -> Result<BeamWidths<f64>, CliError> {
    BeamWidths::new(pair.0, pair.1).map_err(|e| CliError::Config(format!("scene.widths_deg: {e}")))
}

/// Sensing range for a power split; zero when no power is left for sensing.
fn sensing_range(cfg: &ToolkitConfig, rho: f64) -> Result<f64, CliError> {
    if rho >= 1.0 {
        return Ok(0.0);
    }
    max_sensing_range(&cfg.params.with_rho(rho)).map_err(CliError::numerical("sensing range"))
}

fn scene(cfg: &ToolkitConfig, r_max: f64) -> Result<SceneGeometry<f64>, CliError> {
    let s = &cfg.scene;
    SceneGeometry::new(s.h_m, s.w_r_m, r_max, s.tau_s).map_err(|e| CliError::Config(format!("scene section: {e}")))
}

fn scan_period(cfg: &ToolkitConfig) -> Result<Vec<Table>, CliError> {
    let dcbs = cfg.dcb_directions()?;
    let mut t = Table::new("scan.csv", "rho,delta_theta_deg,delta_phi_deg,T_sc_s,cells_visited");
    t.meta.push(format!("{} DCBs avoided; cells_visited counts every scanned direction", dcbs.len()));
    for pair in &cfg.scene.widths_deg {
        let w = widths(*pair)?;
        for rho in sweep(0.0, 1.0, cfg.scene.rho_step) {
            let rho = tidy(rho);
            let r = sensing_range(cfg, rho)?;
            let (t_sc, cells) = if r > 0.0 {
                let res = scanning_period(&scene(cfg, r)?, &w, &dcbs).map_err(CliError::numerical("scan period"))?;
                (res.t_sc, res.cells.len())
            } else {
                (0.0, 0)
            };
            t.rows.push(format!("{rho},{},{},{},{cells}", pair.0, pair.1, tidy(t_sc)));
        }
    }
    Ok(vec![t])
}

#[derive(Debug, Deserialize)]
struct RequestRow {
    user_id: u32,
    beam_id: usize,
    demand: usize,
}

pub fn read_requests(path: &Path) -> Result<Vec<UserRequest>, CliError> {
    let bad = |e: csv::Error| CliError::Config(format!("requests {}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path).map_err(bad)?;
    reader
        .deserialize::<RequestRow>()
        .map(|row| {
            let r = row.map_err(bad)?;
            Ok(UserRequest { user: r.user_id, beam: BeamId(r.beam_id), demand: r.demand })
        })
        .collect()
}

fn frame_plan(cfg: &ToolkitConfig, args: &FramePlanArgs) -> Result<Vec<Table>, CliError> {
    let frame = cfg.frame_config()?;
    let dcbs = cfg.dcb_directions()?;
    let requests = read_requests(&args.requests)?;
    let r_max = sensing_range(cfg, cfg.radio.rho)?;

    let mut timeline = Table::new("frame.csv", "interval,start_ns,end_ns,sbsa1,sbsa2");
    timeline.meta.push(format!(
        "guard {} ns covers the {r_max} m round trip: {}",
        frame.t_g_ns(),
        frame.guard_covers(r_max)
    ));
    for iv in build_frame(&frame) {
        timeline.rows.push(format!("{},{},{},{},{}", iv.kind, iv.start_ns, iv.end_ns, iv.sbsa1, iv.sbsa2));
    }

    let mut grid = ResourceGrid::for_subcarriers(dcbs.len(), cfg.frame.subframes, cfg.ofdm.n)
        .map_err(|e| CliError::Config(format!("resource grid: {e}")))?;
    let report = allocate(&mut grid, &requests);
    let w = widths(cfg.scene.widths_deg[0])?;
    let dwells = if r_max > 0.0 {
        scanning_period(&scene(cfg, r_max)?, &w, &dcbs)
            .map_err(CliError::numerical("scan period"))?
            .dwells()
            .map_err(CliError::numerical("scan dwells"))?
    } else {
        Vec::new()
    };
    let violations = check_interference_free(&grid, &dwells, &dcbs, &w);

    let mut alloc = Table::new("allocation.csv", "user_id,beam_id,subframe,block");
    alloc.meta.push(format!(
        "{} subframes x {} blocks per beam, beam 0 is the FDB",
        grid.subframes(),
        grid.blocks()
    ));
    for a in grid.assignments() {
        alloc.rows.push(format!("{},{},{},{}", a.user, a.beam.0, a.subframe, a.block));
    }

    let mut viol = Table::new("violations.csv", "kind,user_id,beam_id,detail");
    viol.meta.push(format!("interference free: {}", violations.is_empty()));
    viol.meta.push(format!("{} FDB dwells checked against {} DCBs", dwells.len(), dcbs.len()));
    for v in &violations {
        viol.rows.push(format!("interference,,,{}", field(&v.to_string())));
    }
    for s in &report.shortfalls {
        viol.rows.push(format!(
            "shortfall,{},{},granted {} of {} cells",
            s.user, s.beam.0, s.granted, s.demand
        ));
    }
    for r in &report.rejected {
        viol.rows.push(format!("rejected,{},{},{}", r.user, r.beam.0, field(&r.reason)));
    }
    Ok(vec![timeline, alloc, viol])
}
