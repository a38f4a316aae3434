//! Joint beamforming of one free-detection beam (FDB) and several
//! directional communication beams (DCBs).
//!
//! Each beam gets a matched-filter weight vector `a(dir) / N_t`. The final
//! weights are `w_opt = W f_w`, where `W` stacks the per-beam vectors and the
//! combining coefficients `f_w` minimize
//!
//! ```text
//! || w_opt^H D_d - r_ad ||^2 + beta || w_opt ||^2
//! ```
//!
//! over a grid `D_d` of candidate directions with a 0/1 target response
//! `r_ad`. Substituting `w_opt = W f_w` leaves a regularized linear least
//! squares problem in `f_w`, solved through its Hermitian normal equations
//! `(G G^H + beta W^H W) f_w = G r_ad` with `G = W^H D_d`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::array_geometry::{steering_vector, wrap_degrees, ArrayConfig, Direction, SteeringMatrix, SteeringVector};
use crate::{Error, Result, Scalar};

/// Floor applied to pattern gains where the response vanishes.
pub const GAIN_FLOOR_DB: f64 = -120.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec<T> {
    fdb_dir: Direction<T>,
    dcb_dirs: Vec<Direction<T>>,
    beta: T,
}

impl<T: Scalar> BeamSpec<T> {
    pub fn new(fdb_dir: Direction<T>, dcb_dirs: Vec<Direction<T>>, beta: T) -> Result<Self> {
        if !(beta >= T::zero() && beta.is_finite()) {
            return Err(Error::domain(format!("regularization factor must be >= 0, got {beta}")));
        }
        let all: Vec<_> = std::iter::once(&fdb_dir).chain(dcb_dirs.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a == b {
                    return Err(Error::domain(format!("beam direction {a} specified twice")));
                }
            }
        }
        Ok(Self { fdb_dir, dcb_dirs, beta })
    }

    pub fn fdb_dir(&self) -> &Direction<T> {
        &self.fdb_dir
    }

    pub fn dcb_dirs(&self) -> &[Direction<T>] {
        &self.dcb_dirs
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn dcb_count(&self) -> usize {
        self.dcb_dirs.len()
    }

    /// FDB first, then the DCBs in order.
    pub fn directions(&self) -> Vec<Direction<T>> {
        std::iter::once(self.fdb_dir).chain(self.dcb_dirs.iter().copied()).collect()
    }
}

/// Complex antenna weights, one per element.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<Complex<T>>);

impl<T: Scalar> WeightVector<T> {
    pub fn new(entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("weight vector entries must be finite"));
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Array output `w^H a` for a steering vector.
    pub fn response(&self, a: &SteeringVector<T>) -> Complex<T> {
        inner(&self.0, a.as_slice())
    }
}

/// `x^H y`
fn inner<T: Scalar>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

/// Per-beam weight vectors as columns: FDB first, then DCBs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    columns: Vec<WeightVector<T>>,
}

impl<T: Scalar> WeightMatrix<T> {
    pub fn from_columns(columns: Vec<WeightVector<T>>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::domain("weight matrix needs at least one column"));
        };
        if columns.iter().any(|c| c.len() != first.len()) {
            return Err(Error::domain("weight matrix columns differ in length"));
        }
        Ok(Self { columns })
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &WeightVector<T> {
        &self.columns[i]
    }

    /// `W f`
    pub fn combine(&self, f: &[Complex<T>]) -> WeightVector<T> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rows()];
        for (col, &c) in self.columns.iter().zip(f) {
            for (o, w) in out.iter_mut().zip(col.as_slice()) {
                *o = *o + *w * c;
            }
        }
        WeightVector(out)
    }
}

/// Target amplitude response over a direction grid: 1 on the specified beam
/// directions, 0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredResponse<T> {
    pub grid: Vec<Direction<T>>,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern<T> {
    pub grid: Vec<Direction<T>>,
    /// `20 log10 |w^H a|`, floored at [`GAIN_FLOOR_DB`].
    pub gain_db: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinerSolution<T> {
    pub f_w: Vec<Complex<T>>,
    pub w_opt: WeightVector<T>,
    /// Objective evaluated on `w_opt` directly.
    pub objective: T,
    /// Norm of the objective gradient with respect to `f_w` at the solution.
    pub gradient_norm: T,
    /// Squared ratio of the largest to smallest Cholesky pivot.
    pub condition: T,
}

/// Matched-filter weights `a(dir) / N_t`, so that `w^H a(dir) = 1`.
pub fn single_beam_weights<T: Scalar>(cfg: &ArrayConfig<T>, dir: &Direction<T>) -> WeightVector<T> {
    let a = steering_vector(cfg, dir);
    let scale = T::one() / T::from_usize_lossy(a.len());
    WeightVector(a.as_slice().iter().map(|z| *z * scale).collect())
}

pub fn build_weight_matrix<T: Scalar>(cfg: &ArrayConfig<T>, spec: &BeamSpec<T>) -> WeightMatrix<T> {
    WeightMatrix { columns: spec.directions().iter().map(|d| single_beam_weights(cfg, d)).collect() }
}

/// Azimuth sweep `[-180, 180)` at fixed pitch.
pub fn azimuth_cut<T: Scalar>(theta_deg: T, step_deg: T) -> Result<Vec<Direction<T>>> {
    check_step(step_deg)?;
    let n = (T::lit(360.0) / step_deg).round().to_usize().unwrap_or(0);
    (0..n)
        .map(|i| Direction::new(T::lit(-180.0) + T::from_usize_lossy(i) * step_deg, theta_deg))
        .collect()
}

/// Pitch sweep `[lo, hi]` at fixed azimuth.
pub fn pitch_cut<T: Scalar>(phi_deg: T, lo_deg: T, hi_deg: T, step_deg: T) -> Result<Vec<Direction<T>>> {
    check_step(step_deg)?;
    let n = ((hi_deg - lo_deg) / step_deg).round().to_usize().unwrap_or(0);
    (0..=n)
        .map(|i| Direction::new(phi_deg, lo_deg + T::from_usize_lossy(i) * step_deg))
        .collect()
}

/// Every pitch in `[0, 90]` times every azimuth in `[-180, 180)`.
pub fn full_grid<T: Scalar>(step_deg: T) -> Result<Vec<Direction<T>>> {
    let mut out = Vec::new();
    for theta in pitch_cut(T::zero(), T::zero(), T::lit(90.0), step_deg)? {
        out.extend(azimuth_cut(theta.theta_deg(), step_deg)?);
    }
    Ok(out)
}

/// Pitch and azimuth cuts through `center`, each spanning `+-half_span`.
pub fn cross_cut<T: Scalar>(center: &Direction<T>, half_span_deg: T, step_deg: T) -> Result<Vec<Direction<T>>> {
    check_step(step_deg)?;
    let lo = (center.theta_deg() - half_span_deg).max(T::zero());
    let hi = (center.theta_deg() + half_span_deg).min(T::lit(90.0));
    let mut out = pitch_cut(center.phi_deg(), lo, hi, step_deg)?;
    let n = (T::lit(2.0) * half_span_deg / step_deg).round().to_usize().unwrap_or(0);
    for i in 0..=n {
        let phi = center.phi_deg() - half_span_deg + T::from_usize_lossy(i) * step_deg;
        out.push(Direction::new(phi, center.theta_deg())?);
    }
    Ok(out)
}

/// Azimuth cut when every beam shares one pitch, full grid otherwise.
pub fn default_grid<T: Scalar>(spec: &BeamSpec<T>, step_deg: T) -> Result<Vec<Direction<T>>> {
    let theta = spec.fdb_dir().theta_deg();
    if spec.dcb_dirs().iter().all(|d| d.theta_deg() == theta) {
        azimuth_cut(theta, step_deg)
    } else {
        full_grid(step_deg)
    }
}

fn check_step<T: Scalar>(step: T) -> Result<()> {
    if step > T::zero() && step.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("grid step must be positive, got {step}")))
    }
}

/// Index of the grid point nearest `target`, provided it lies within half
/// the local grid spacing.
fn snap<T: Scalar>(grid: &[Direction<T>], target: &Direction<T>) -> Result<usize> {
    let (idx, dist) = grid
        .iter()
        .enumerate()
        .map(|(i, g)| (i, g.angle_to(target)))
        .fold((usize::MAX, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best });
    if idx == usize::MAX {
        return Err(Error::domain("direction grid is empty"));
    }
    let tiny = T::lit(1e-9);
    let spacing = grid
        .iter()
        .map(|g| g.angle_to(&grid[idx]))
        .filter(|d| *d > tiny)
        .fold(T::infinity(), T::min);
    if dist > tiny && !(dist <= T::lit(0.5) * spacing) {
        return Err(Error::domain(format!(
            "beam direction {target} is {dist}° from the nearest grid point, beyond half the grid spacing"
        )));
    }
    Ok(idx)
}

pub fn desired_response<T: Scalar>(spec: &BeamSpec<T>, grid: &[Direction<T>]) -> Result<DesiredResponse<T>> {
    let mut values = vec![T::zero(); grid.len()];
    for d in spec.directions() {
        let i = snap(grid, &d)?;
        if values[i] == T::one() {
            return Err(Error::domain(format!(
                "beam direction {d} shares grid point {} with another beam",
                grid[i]
            )));
        }
        values[i] = T::one();
    }
    Ok(DesiredResponse { grid: grid.to_vec(), values })
}

/// Reduced least-squares problem in the combining coefficients.
#[derive(Debug, Clone)]
pub struct CombinerProblem<T> {
    /// `G = W^H D_d`, stored row-major as `k x N_d`.
    g: Vec<Vec<Complex<T>>>,
    /// `W^H W`
    gram: Vec<Vec<Complex<T>>>,
    target: Vec<T>,
}

impl<T: Scalar> CombinerProblem<T> {
    pub fn new(w: &WeightMatrix<T>, d: &SteeringMatrix<T>, r_ad: &DesiredResponse<T>) -> Result<Self> {
        if d.rows() != w.rows() {
            return Err(Error::domain(format!(
                "steering matrix has {} rows but weights have {}",
                d.rows(),
                w.rows()
            )));
        }
        if d.cols() != r_ad.values.len() {
            return Err(Error::domain(format!(
                "steering matrix has {} directions but the response has {}",
                d.cols(),
                r_ad.values.len()
            )));
        }
        let k = w.cols();
        let g = (0..k)
            .map(|i| d.columns().iter().map(|a| w.column(i).response(a)).collect())
            .collect();
        let gram = (0..k)
            .map(|i| (0..k).map(|j| inner(w.column(i).as_slice(), w.column(j).as_slice())).collect())
            .collect();
        Ok(Self { g, gram, target: r_ad.values.clone() })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// Normal matrix `G G^H + beta W^H W` and right-hand side `G r`.
    fn normal_equations(&self, beta: T) -> (Vec<Vec<Complex<T>>>, Vec<Complex<T>>) {
        let k = self.dim();
        let mut a = vec![vec![Complex::new(T::zero(), T::zero()); k]; k];
        for i in 0..k {
            for j in 0..k {
                let gg = self.g[i].iter().zip(&self.g[j]).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
                    acc + *x * y.conj()
                });
                a[i][j] = gg + self.gram[i][j] * beta;
            }
        }
        let rhs = self
            .g
            .iter()
            .map(|row| row.iter().zip(&self.target).fold(Complex::new(T::zero(), T::zero()), |acc, (x, r)| acc + *x * *r))
            .collect();
        (a, rhs)
    }

    /// Objective through the reduced variables.
    pub fn objective(&self, f: &[Complex<T>], beta: T) -> T {
        let n_d = self.target.len();
        let mut fit = T::zero();
        for j in 0..n_d {
            let y = self.g.iter().zip(f).fold(Complex::new(T::zero(), T::zero()), |acc, (row, fi)| {
                acc + fi.conj() * row[j]
            });
            fit = fit + (y - Complex::new(self.target[j], T::zero())).norm_sqr();
        }
        let mut reg = Complex::new(T::zero(), T::zero());
        for (i, fi) in f.iter().enumerate() {
            for (j, fj) in f.iter().enumerate() {
                reg = reg + fi.conj() * self.gram[i][j] * fj;
            }
        }
        fit + beta * reg.re
    }

    /// Gradient with respect to the real and imaginary parts of `f`, packed
    /// as `dJ/dRe f_i + j dJ/dIm f_i = 2 (A f - b)_i`.
    pub fn gradient(&self, f: &[Complex<T>], beta: T) -> Vec<Complex<T>> {
        let (a, b) = self.normal_equations(beta);
        a.iter()
            .zip(&b)
            .map(|(row, bi)| {
                let af = row.iter().zip(f).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + *x * *y);
                (af - *bi) * T::lit(2.0)
            })
            .collect()
    }

    /// Minimizer of the reduced objective.
    pub fn solve(&self, beta: T) -> Result<(Vec<Complex<T>>, T)> {
        let (a, b) = self.normal_equations(beta);
        cholesky_solve(a, b)
    }
}

/// Solves a Hermitian positive-definite system; returns the solution and a
/// condition estimate from the pivots.
fn cholesky_solve<T: Scalar>(mut a: Vec<Vec<Complex<T>>>, b: Vec<Complex<T>>) -> Result<(Vec<Complex<T>>, T)> {
    let k = b.len();
    let max_diag = (0..k).map(|i| a[i][i].re).fold(T::zero(), T::max);
    let tol = T::from_usize_lossy(k.max(1)) * T::epsilon() * max_diag;
    let mut pivots = Vec::with_capacity(k);
    for j in 0..k {
        let mut d = a[j][j].re;
        for p in 0..j {
            d = d - a[j][p].norm_sqr();
        }
        if !(d > tol) {
            let cond = if d > T::zero() { (max_diag / d).to_f64_lossy() } else { f64::INFINITY };
            return Err(Error::Singular { condition: cond });
        }
        let l = d.sqrt();
        pivots.push(l);
        a[j][j] = Complex::new(l, T::zero());
        for i in j + 1..k {
            let mut s = a[i][j];
            for p in 0..j {
                s = s - a[i][p] * a[j][p].conj();
            }
            a[i][j] = s / l;
        }
    }
    // L y = b
    let mut y = b;
    for i in 0..k {
        let mut s = y[i];
        for p in 0..i {
            s = s - a[i][p] * y[p];
        }
        y[i] = s / a[i][i].re;
    }
    // L^H x = y
    for i in (0..k).rev() {
        let mut s = y[i];
        for p in i + 1..k {
            s = s - a[p][i].conj() * y[p];
        }
        y[i] = s / a[i][i].re;
    }
    let hi = pivots.iter().copied().fold(T::zero(), T::max);
    let lo = pivots.iter().copied().fold(T::infinity(), T::min);
    let ratio = hi / lo;
    Ok((y, ratio * ratio))
}

/// Objective evaluated directly on a full weight vector.
pub fn objective_of_weights<T: Scalar>(
    w: &WeightVector<T>,
    d: &SteeringMatrix<T>,
    r_ad: &DesiredResponse<T>,
    beta: T,
) -> T {
    let fit = d
        .columns()
        .iter()
        .zip(&r_ad.values)
        .fold(T::zero(), |acc, (a, r)| acc + (w.response(a) - Complex::new(*r, T::zero())).norm_sqr());
    let n = w.norm();
    fit + beta * n * n
}

pub fn solve_joint_combiner<T: Scalar>(
    w: &WeightMatrix<T>,
    d: &SteeringMatrix<T>,
    r_ad: &DesiredResponse<T>,
    beta: T,
) -> Result<CombinerSolution<T>> {
    if !(beta >= T::zero()) {
        return Err(Error::domain(format!("regularization factor must be >= 0, got {beta}")));
    }
    let problem = CombinerProblem::new(w, d, r_ad)?;
    let (f_w, condition) = problem.solve(beta)?;
    let gradient_norm = problem
        .gradient(&f_w, beta)
        .iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt();
    let w_opt = w.combine(&f_w);
    let objective = objective_of_weights(&w_opt, d, r_ad, beta);
    Ok(CombinerSolution { f_w, w_opt, objective, gradient_norm, condition })
}

/// Gain of `w` toward one direction, dB relative to `|w^H a| = 1`.
pub fn gain_db<T: Scalar>(cfg: &ArrayConfig<T>, w: &WeightVector<T>, dir: &Direction<T>) -> T {
    to_db(w.response(&steering_vector(cfg, dir)).norm())
}

fn to_db<T: Scalar>(amplitude: T) -> T {
    let floor = T::lit(GAIN_FLOOR_DB);
    if amplitude > T::zero() {
        (T::lit(20.0) * amplitude.log10()).max(floor)
    } else {
        floor
    }
}

pub fn beam_pattern<T: Scalar>(cfg: &ArrayConfig<T>, w: &WeightVector<T>, grid: &[Direction<T>]) -> Result<BeamPattern<T>> {
    if grid.is_empty() {
        return Err(Error::domain("pattern grid is empty"));
    }
    if w.len() != cfg.element_count() {
        return Err(Error::domain(format!(
            "weight vector has {} entries, array has {} elements",
            w.len(),
            cfg.element_count()
        )));
    }
    let gain_db = grid.par_iter().map(|d| gain_db(cfg, w, d)).collect();
    Ok(BeamPattern { grid: grid.to_vec(), gain_db })
}

/// Half-power widths of a beam along its pitch and azimuth cuts, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beamwidth<T> {
    pub delta_theta: T,
    pub delta_phi: T,
}

pub fn measure_beamwidth<T: Scalar>(pattern: &BeamPattern<T>, peak_dir: &Direction<T>) -> Result<Beamwidth<T>> {
    let tol = T::lit(1e-9);
    let mut theta_cut: Vec<(T, T)> = Vec::new();
    let mut phi_cut: Vec<(T, T)> = Vec::new();
    for (d, g) in pattern.grid.iter().zip(&pattern.gain_db) {
        if wrap_degrees(d.phi_deg() - peak_dir.phi_deg()).abs() < tol {
            theta_cut.push((d.theta_deg(), *g));
        }
        if (d.theta_deg() - peak_dir.theta_deg()).abs() < tol {
            phi_cut.push((wrap_degrees(d.phi_deg() - peak_dir.phi_deg()), *g));
        }
    }
    let delta_theta = half_power_width(theta_cut, peak_dir.theta_deg(), "pitch")?;
    let delta_phi = half_power_width(phi_cut, T::zero(), "azimuth")?;
    Ok(Beamwidth { delta_theta, delta_phi })
}

/// Width of the -3 dB region around the local maximum nearest `center`.
fn half_power_width<T: Scalar>(mut cut: Vec<(T, T)>, center: T, axis: &str) -> Result<T> {
    cut.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    cut.dedup_by(|a, b| a.0 == b.0);
    if cut.len() < 3 {
        return Err(Error::domain(format!("{axis} cut through the peak has fewer than 3 points")));
    }
    let mut i = cut
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 .0 - center).abs().partial_cmp(&(b.1 .0 - center).abs()).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    loop {
        if i > 0 && cut[i - 1].1 > cut[i].1 {
            i -= 1;
        } else if i + 1 < cut.len() && cut[i + 1].1 > cut[i].1 {
            i += 1;
        } else {
            break;
        }
    }
    if i == 0 || i + 1 == cut.len() {
        return Err(Error::domain(format!("{axis} peak lies on the edge of the grid")));
    }
    let level = cut[i].1 - T::lit(3.0);
    let crossing = |a: (T, T), b: (T, T)| a.0 + (b.0 - a.0) * (a.1 - level) / (a.1 - b.1);
    let mut l = i;
    while cut[l].1 >= level {
        if l == 0 {
            return Err(Error::domain(format!("{axis} half-power point below the grid")));
        }
        l -= 1;
    }
    let mut r = i;
    while cut[r].1 >= level {
        if r + 1 == cut.len() {
            return Err(Error::domain(format!("{axis} half-power point above the grid")));
        }
        r += 1;
    }
    let left = crossing(cut[l + 1], cut[l]);
    let right = crossing(cut[r - 1], cut[r]);
    Ok(right - left)
}

/// Everything produced by one joint design run.
#[derive(Debug, Clone)]
pub struct BeamDesign<T> {
    pub spec: BeamSpec<T>,
    pub weights: WeightMatrix<T>,
    pub steering: SteeringMatrix<T>,
    pub response: DesiredResponse<T>,
    pub joint: CombinerSolution<T>,
    /// Linear superposition `W 1`.
    pub baseline: WeightVector<T>,
    pub baseline_objective: T,
}

pub fn design<T: Scalar>(cfg: &ArrayConfig<T>, spec: &BeamSpec<T>, grid: &[Direction<T>]) -> Result<BeamDesign<T>> {
    let weights = build_weight_matrix(cfg, spec);
    let response = desired_response(spec, grid)?;
    let steering = crate::array_geometry::steering_matrix(cfg, grid)?;
    let joint = solve_joint_combiner(&weights, &steering, &response, spec.beta())?;
    let ones = vec![Complex::new(T::one(), T::zero()); weights.cols()];
    let baseline = weights.combine(&ones);
    let baseline_objective = objective_of_weights(&baseline, &steering, &response, spec.beta());
    Ok(BeamDesign { spec: spec.clone(), weights, steering, response, joint, baseline, baseline_objective })
}

/// Azimuths of the local maxima of a closed azimuth cut.
pub fn local_maxima_azimuth<T: Scalar>(pattern: &BeamPattern<T>) -> Vec<T> {
    let n = pattern.gain_db.len();
    let g = &pattern.gain_db;
    (0..n)
        .filter(|&i| {
            let prev = g[(i + n - 1) % n];
            let next = g[(i + 1) % n];
            g[i] > prev && g[i] >= next
        })
        .map(|i| pattern.grid[i].phi_deg())
        .collect()
}
