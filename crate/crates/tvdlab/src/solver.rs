//! Periodic finite volume solver: the semi-discrete operator, explicit time
//! integrators, CFL handling and the TV / max-principle / Harten monitors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flux::NumericalFlux;
use crate::limiter::{bound_m, Limiter};
use crate::reconstruction::{total_variation, InterfaceValues, Reconstruction};

pub const MIN_CELLS: usize = 5;

/// Cell values on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    u: Vec<f64>,
    h: f64,
    t: f64,
}

impl GridState {
    pub fn new(u: Vec<f64>, h: f64, t: f64) -> Result<Self> {
        if u.len() < MIN_CELLS {
            return Err(Error::GridTooSmall {
                min: MIN_CELLS,
                got: u.len(),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("mesh width must be positive, got {h}")));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("cell values must be finite".into()));
        }
        Ok(Self { u, h, t })
    }

    /// `n` cells on [0, 1) sampled at the nodes x_i = i/n.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 1.0 / n as f64;
        Self::new((0..n).map(|i| f(i as f64 * h)).collect(), h, 0.0)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn tv(&self) -> f64 {
        total_variation(&self.u)
    }

    pub fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// h Σ u_j.
    pub fn mass(&self) -> f64 {
        self.h * self.u.iter().sum::<f64>()
    }

    fn advanced(&self, u: Vec<f64>, dt: f64) -> Self {
        Self {
            u,
            h: self.h,
            t: self.t + dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeScheme {
    Euler,
    Heun,
    PredictorCorrector,
    ModifiedPcExplicit,
    FivePoint,
}

impl TimeScheme {
    pub fn name(&self) -> &'static str {
        match self {
            TimeScheme::Euler => "euler",
            TimeScheme::Heun => "heun",
            TimeScheme::PredictorCorrector => "predictor_corrector",
            TimeScheme::ModifiedPcExplicit => "modified_pc_explicit",
            TimeScheme::FivePoint => "five_point",
        }
    }

    /// Whether h Σ u is preserved exactly by the update.
    pub fn is_conservative(&self) -> bool {
        !matches!(self, TimeScheme::ModifiedPcExplicit)
    }
}

impl FromStr for TimeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "euler" => TimeScheme::Euler,
            "heun" => TimeScheme::Heun,
            "predictor_corrector" | "pc" => TimeScheme::PredictorCorrector,
            "modified_pc_explicit" | "modified_pc" => TimeScheme::ModifiedPcExplicit,
            "five_point" | "five_point_advection" => TimeScheme::FivePoint,
            _ => return Err(Error::InvalidParameter(format!("unknown scheme `{s}`"))),
        })
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Monitors {
    pub tv: bool,
    pub maxprin: bool,
    pub harten: bool,
}

impl Monitors {
    pub fn all() -> Self {
        Self {
            tv: true,
            maxprin: true,
            harten: true,
        }
    }
}

/// What to do when the CFL estimate exceeds the TVD bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CflPolicy {
    Strict,
    #[default]
    Warn,
}

impl FromStr for CflPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CflPolicy::Strict),
            "warn" => Ok(CflPolicy::Warn),
            _ => Err(Error::InvalidParameter(format!("unknown cfl policy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scheme: TimeScheme,
    pub reconstruction: Reconstruction,
    pub nflux: NumericalFlux,
    pub sigma: f64,
    pub monitors: Monitors,
    pub cfl_policy: CflPolicy,
}

impl SchemeConfig {
    pub fn new(
        scheme: TimeScheme,
        reconstruction: impl Into<Reconstruction>,
        nflux: NumericalFlux,
        sigma: f64,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must lie in (0, 1], got {sigma}"
            )));
        }
        if scheme == TimeScheme::FivePoint {
            match nflux.flux().advection_speed() {
                Some(a) if a > 0.0 => {}
                _ => {
                    return Err(Error::IncompatibleFlux {
                        flux: nflux.flux().name().into(),
                        kind: scheme.name().into(),
                        reason: "the five-point scheme needs advection with positive speed".into(),
                    })
                }
            }
        }
        Ok(Self {
            scheme,
            reconstruction: reconstruction.into(),
            nflux,
            sigma,
            monitors: Monitors::default(),
            cfl_policy: CflPolicy::Warn,
        })
    }

    pub fn with_monitors(mut self, m: Monitors) -> Self {
        self.monitors = m;
        self
    }

    pub fn with_cfl_policy(mut self, p: CflPolicy) -> Self {
        self.cfl_policy = p;
        self
    }
}

/// Diagnostics for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub tv_before: f64,
    pub tv_after: f64,
    pub min_before: f64,
    pub max_before: f64,
    pub min_after: f64,
    pub max_after: f64,
    pub mass_before: f64,
    pub mass_after: f64,
    /// λ max(|α| + |β|), computed under the strict policy or the Harten monitor.
    pub cfl_estimate: Option<f64>,
    pub harten_ok: Option<bool>,
}

impl StepReport {
    /// TV grew beyond the 1e-12 (1 + TV) slack.
    pub fn tv_increased(&self) -> bool {
        self.tv_after > self.tv_before + 1e-12 * (1.0 + self.tv_before)
    }

    pub fn mass_drift(&self) -> f64 {
        self.mass_after - self.mass_before
    }
}

/// Largest Courant number covered by the TVD bound: 1 / (1 + M/2).
pub fn max_stable_sigma(l: &Limiter) -> f64 {
    1.0 / (1.0 + bound_m(l) / 2.0)
}

fn max_wave_speed(u: &[f64], nf: &NumericalFlux) -> f64 {
    u.iter().map(|&v| nf.flux().df(v).abs()).fold(0.0, f64::max)
}

/// Δt = σ h / max|f'(u_j)|. A state with no wave speed uses unit speed.
pub fn stable_dt(state: &GridState, config: &SchemeConfig) -> f64 {
    let s = max_wave_speed(state.u(), &config.nflux);
    let s = if s > 0.0 { s } else { 1.0 };
    config.sigma * state.h() / s
}

fn interface_fluxes(iv: &InterfaceValues, nf: &NumericalFlux) -> Vec<f64> {
    iv.minus
        .iter()
        .zip(&iv.plus)
        .map(|(&m, &p)| nf.eval(m, p))
        .collect()
}

/// du_j/dt = -(F_{j+½} - F_{j-½}) / h with F = Φ(u⁻, u⁺).
pub fn semi_discrete_rhs(
    u: &[f64],
    h: f64,
    rec: &Reconstruction,
    nf: &NumericalFlux,
) -> Result<Vec<f64>> {
    let iv = rec.interface_values(u)?;
    let f = interface_fluxes(&iv, nf);
    let n = u.len();
    Ok((0..n).map(|j| -(f[j] - f[(j + n - 1) % n]) / h).collect())
}

fn axpy(u: &[f64], a: f64, r: &[f64]) -> Vec<f64> {
    u.iter().zip(r).map(|(&x, &y)| x + a * y).collect()
}

/// Incremental coefficients of the one-step update written as
/// u_j + C_{j+½}Δ_{j+½} - D_{j-½}Δ_{j-½}. Index j of both vectors refers to cell j,
/// so `c[j]` is C_{j+½} and `d[j]` is D_{j-½}. Zero increments give zero coefficients.
pub fn incremental_coefficients(
    u: &[f64],
    rec: &Reconstruction,
    nf: &NumericalFlux,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let iv = rec.interface_values(u)?;
    let n = u.len();
    let (m, p) = (&iv.minus, &iv.plus);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for j in 0..n {
        let jm = (j + n - 1) % n;
        let dr = u[(j + 1) % n] - u[j];
        let dl = u[j] - u[jm];
        let mid = nf.eval(m[j], p[jm]);
        if dr != 0.0 {
            c[j] = -lambda * (nf.eval(m[j], p[j]) - mid) / dr;
        }
        if dl != 0.0 {
            d[j] = lambda * (mid - nf.eval(m[jm], p[jm])) / dl;
        }
    }
    Ok((c, d))
}

/// Mean-value slopes α_{i+½} of Φ in its first argument and β_{i+½} in its second,
/// both indexed by interface. Degenerate intervals fall back to derivatives.
pub fn mean_flux_slopes(
    iv: &InterfaceValues,
    nf: &NumericalFlux,
) -> (Vec<f64>, Vec<f64>) {
    let n = iv.minus.len();
    let (m, p) = (&iv.minus, &iv.plus);
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for j in 0..n {
        let jm = (j + n - 1) % n;
        // α_{j-½}: vary the left state along [m_{j-½}, m_{j+½}] with p_{j-½} fixed
        let dm = m[j] - m[jm];
        alpha[jm] = if dm != 0.0 {
            (nf.eval(m[j], p[jm]) - nf.eval(m[jm], p[jm])) / dm
        } else {
            nf.d_u(m[jm], p[jm], 1e-7 * m[jm].abs().max(1.0))
        };
        // β_{j+½}: vary the right state along [p_{j-½}, p_{j+½}] with m_{j+½} fixed
        let dp = p[j] - p[jm];
        beta[j] = if dp != 0.0 {
            (nf.eval(m[j], p[j]) - nf.eval(m[j], p[jm])) / dp
        } else {
            nf.d_v(m[j], p[j], 1e-7 * p[j].abs().max(1.0))
        };
    }
    (alpha, beta)
}

/// λ max_i (|α_{i+½}| + |β_{i+½}|).
pub fn cfl_estimate(u: &[f64], rec: &Reconstruction, nf: &NumericalFlux, lambda: f64) -> Result<f64> {
    let iv = rec.interface_values(u)?;
    let (a, b) = mean_flux_slopes(&iv, nf);
    Ok(lambda
        * a.iter()
            .zip(&b)
            .map(|(x, y)| x.abs() + y.abs())
            .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HartenReport {
    pub passed: bool,
    /// Interfaces i where C_{i+½} ≥ 0, D_{i+½} ≥ 0 or C_{i+½} + D_{i+½} ≤ 1 fails.
    pub violations: Vec<usize>,
    /// C_{i+½} by interface.
    pub c: Vec<f64>,
    /// D_{i+½} by interface.
    pub d: Vec<f64>,
}

/// Harten's sufficient TVD conditions for one forward Euler step with
/// λ = σ / max|f'(u_j)|.
pub fn check_harten_conditions(
    u: &[f64],
    rec: &Reconstruction,
    nf: &NumericalFlux,
    sigma: f64,
) -> Result<HartenReport> {
    let s = max_wave_speed(u, nf);
    let lambda = sigma / if s > 0.0 { s } else { 1.0 };
    harten_with_lambda(u, rec, nf, lambda)
}

fn harten_with_lambda(
    u: &[f64],
    rec: &Reconstruction,
    nf: &NumericalFlux,
    lambda: f64,
) -> Result<HartenReport> {
    let (c, dcell) = incremental_coefficients(u, rec, nf, lambda)?;
    let n = u.len();
    // D_{i+½} is computed at cell i+1
    let d: Vec<f64> = (0..n).map(|i| dcell[(i + 1) % n]).collect();
    let tol = 1e-12;
    let violations: Vec<usize> = (0..n)
        .filter(|&i| c[i] < -tol || d[i] < -tol || c[i] + d[i] > 1.0 + tol)
        .collect();
    Ok(HartenReport {
        passed: violations.is_empty(),
        violations,
        c,
        d,
    })
}

fn euler_update(state: &GridState, cfg: &SchemeConfig, dt: f64) -> Result<Vec<f64>> {
    let r = semi_discrete_rhs(state.u(), state.h(), &cfg.reconstruction, &cfg.nflux)?;
    Ok(axpy(state.u(), dt, &r))
}

fn heun_update(state: &GridState, cfg: &SchemeConfig, dt: f64) -> Result<Vec<f64>> {
    let (rec, nf, h) = (&cfg.reconstruction, &cfg.nflux, state.h());
    let r0 = semi_discrete_rhs(state.u(), h, rec, nf)?;
    let pred = axpy(state.u(), dt, &r0);
    let r1 = semi_discrete_rhs(&pred, h, rec, nf)?;
    Ok(state
        .u()
        .iter()
        .zip(r0.iter().zip(&r1))
        .map(|(&u, (&a, &b))| u + 0.5 * dt * (a + b))
        .collect())
}

fn pc_update(state: &GridState, cfg: &SchemeConfig, dt: f64) -> Result<Vec<f64>> {
    let (rec, nf, h) = (&cfg.reconstruction, &cfg.nflux, state.h());
    let r0 = semi_discrete_rhs(state.u(), h, rec, nf)?;
    let half = axpy(state.u(), 0.5 * dt, &r0);
    let r1 = semi_discrete_rhs(&half, h, rec, nf)?;
    Ok(axpy(state.u(), dt, &r1))
}

fn modified_pc_update(state: &GridState, cfg: &SchemeConfig, dt: f64) -> Result<Vec<f64>> {
    let u = state.u();
    let n = u.len();
    let (c, d) = incremental_coefficients(u, &cfg.reconstruction, &cfg.nflux, dt / state.h())?;
    let with = |v: &[f64], w: f64| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let dr = v[(j + 1) % n] - v[j];
                let dl = v[j] - v[(j + n - 1) % n];
                u[j] + w * (c[j] * dr - d[j] * dl)
            })
            .collect()
    };
    let half = with(u, 0.5);
    Ok(with(&half, 1.0))
}

fn five_point_update(state: &GridState, cfg: &SchemeConfig, dt: f64) -> Result<Vec<f64>> {
    let a = cfg.nflux.flux().advection_speed().unwrap_or(0.0);
    if a <= 0.0 {
        return Err(Error::IncompatibleFlux {
            flux: cfg.nflux.flux().name().into(),
            kind: "five_point".into(),
            reason: "the five-point scheme needs advection with positive speed".into(),
        });
    }
    let s = a * dt / state.h();
    let u = state.u();
    let n = u.len();
    let m = cfg.reconstruction.interface_values(u)?.minus;
    Ok((0..n)
        .map(|j| {
            let jm = (j + n - 1) % n;
            u[j] - s * (s * (u[j] - u[jm]) + (1.0 - s) * (m[j] - m[jm]))
        })
        .collect())
}

/// One step of `config.scheme` with the given Δt.
pub fn step_with_dt(
    state: &GridState,
    config: &SchemeConfig,
    dt: f64,
) -> Result<(GridState, StepReport)> {
    let (u, h) = (state.u(), state.h());
    let lambda = dt / h;
    let need_cfl = config.cfl_policy == CflPolicy::Strict || config.monitors.harten;
    let cfl = if need_cfl {
        Some(cfl_estimate(u, &config.reconstruction, &config.nflux, lambda)?)
    } else {
        None
    };
    if config.cfl_policy == CflPolicy::Strict {
        if let (Some(est), Some(l)) = (cfl, config.reconstruction.limiter()) {
            let bound = max_stable_sigma(l);
            if est > bound * (1.0 + 1e-12) {
                return Err(Error::CflRefusal {
                    estimate: est,
                    bound,
                });
            }
        }
    }
    let harten_ok = if config.monitors.harten {
        Some(harten_with_lambda(u, &config.reconstruction, &config.nflux, lambda)?.passed)
    } else {
        None
    };
    let next = match config.scheme {
        TimeScheme::Euler => euler_update(state, config, dt)?,
        TimeScheme::Heun => heun_update(state, config, dt)?,
        TimeScheme::PredictorCorrector => pc_update(state, config, dt)?,
        TimeScheme::ModifiedPcExplicit => modified_pc_update(state, config, dt)?,
        TimeScheme::FivePoint => five_point_update(state, config, dt)?,
    };
    let next = state.advanced(next, dt);
    let report = StepReport {
        dt,
        tv_before: state.tv(),
        tv_after: next.tv(),
        min_before: state.min(),
        max_before: state.max(),
        min_after: next.min(),
        max_after: next.max(),
        mass_before: state.mass(),
        mass_after: next.mass(),
        cfl_estimate: cfl,
        harten_ok,
    };
    Ok((next, report))
}

/// One step of `config.scheme` with Δt taken from σ.
pub fn step(state: &GridState, config: &SchemeConfig) -> Result<(GridState, StepReport)> {
    step_with_dt(state, config, stable_dt(state, config))
}

fn step_as(
    scheme: TimeScheme,
    state: &GridState,
    config: &SchemeConfig,
) -> Result<(GridState, StepReport)> {
    let cfg = SchemeConfig {
        scheme,
        ..config.clone()
    };
    step(state, &cfg)
}

pub fn step_euler(state: &GridState, config: &SchemeConfig) -> Result<(GridState, StepReport)> {
    step_as(TimeScheme::Euler, state, config)
}

/// Trapezoidal two-stage update u + Δt/2 (L(u) + L(u + Δt L(u))).
pub fn step_heun(state: &GridState, config: &SchemeConfig) -> Result<(GridState, StepReport)> {
    step_as(TimeScheme::Heun, state, config)
}

/// Half-step predictor then a full step with fluxes from the half-step values.
pub fn step_predictor_corrector(
    state: &GridState,
    config: &SchemeConfig,
) -> Result<(GridState, StepReport)> {
    step_as(TimeScheme::PredictorCorrector, state, config)
}

/// Predictor-corrector with incremental coefficients frozen at time n.
/// Not conservative; see [`StepReport::mass_drift`].
pub fn step_modified_pc_explicit(
    state: &GridState,
    config: &SchemeConfig,
) -> Result<(GridState, StepReport)> {
    step_as(TimeScheme::ModifiedPcExplicit, state, config)
}

/// u_j - σ[σ(u_j - u_{j-1}) + (1-σ)(u⁻_{j+½} - u⁻_{j-½})] for advection at speed `a`.
pub fn step_five_point_advection(
    state: &GridState,
    config: &SchemeConfig,
    a: f64,
) -> Result<(GridState, StepReport)> {
    match config.nflux.flux().advection_speed() {
        Some(s) if s == a => step_as(TimeScheme::FivePoint, state, config),
        _ => Err(Error::IncompatibleFlux {
            flux: config.nflux.flux().name().into(),
            kind: "five_point".into(),
            reason: format!("configured flux is not advection at speed {a}"),
        }),
    }
}

/// Number of steps and the uniform Δt ≤ `dt_max` that lands exactly on `t_final`.
pub fn fit_time_step(t_final: f64, dt_max: f64) -> (usize, f64) {
    if t_final <= 0.0 {
        return (0, 0.0);
    }
    let steps = ((t_final / dt_max) - 1e-12).ceil().max(1.0) as usize;
    (steps, t_final / steps as f64)
}

/// One row of the trajectory dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t: f64,
    pub tv: f64,
    pub min: f64,
    pub max: f64,
    pub mass: f64,
}

impl TrajectoryRow {
    pub const CSV_HEADER: &'static str = "step,t,tv,min,max,mass";

    fn of(step: usize, s: &GridState) -> Self {
        Self {
            step,
            t: s.t(),
            tv: s.tv(),
            min: s.min(),
            max: s.max(),
            mass: s.mass(),
        }
    }

    pub fn csv_row(&self) -> String {
        use crate::fmt_real as r;
        format!(
            "{},{},{},{},{},{}",
            self.step,
            r(self.t),
            r(self.tv),
            r(self.min),
            r(self.max),
            r(self.mass)
        )
    }
}

/// Result of [`simulate`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: GridState,
    pub dt: f64,
    pub trajectory: Vec<TrajectoryRow>,
    pub snapshots: Vec<GridState>,
    pub tv_increases: usize,
    pub maxprin_violations: usize,
    pub harten_failures: usize,
    pub max_mass_drift: f64,
}

/// Advances to `t_final` with a fixed Δt fitted from the initial state.
/// `snapshot_every` keeps every k-th state, plus the first and last.
pub fn simulate(
    initial: GridState,
    config: &SchemeConfig,
    t_final: f64,
    snapshot_every: Option<usize>,
) -> Result<RunOutcome> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad final time {t_final}")));
    }
    let (steps, dt) = fit_time_step(t_final, stable_dt(&initial, config));
    let (lo, hi) = (initial.min(), initial.max());
    let eps = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let mass0 = initial.mass();
    let mut out = RunOutcome {
        dt,
        trajectory: vec![TrajectoryRow::of(0, &initial)],
        snapshots: Vec::new(),
        tv_increases: 0,
        maxprin_violations: 0,
        harten_failures: 0,
        max_mass_drift: 0.0,
        state: initial,
    };
    if snapshot_every.is_some() {
        out.snapshots.push(out.state.clone());
    }
    for k in 1..=steps {
        let (next, rep) = step_with_dt(&out.state, config, dt)?;
        if config.monitors.tv && rep.tv_increased() {
            out.tv_increases += 1;
        }
        if config.monitors.maxprin && (rep.min_after < lo - eps || rep.max_after > hi + eps) {
            out.maxprin_violations += 1;
        }
        if rep.harten_ok == Some(false) {
            out.harten_failures += 1;
        }
        out.max_mass_drift = out.max_mass_drift.max((next.mass() - mass0).abs());
        out.trajectory.push(TrajectoryRow::of(k, &next));
        out.state = next;
        if let Some(every) = snapshot_every {
            if k % every.max(1) == 0 || k == steps {
                out.snapshots.push(out.state.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{FluxKind, FluxSpec};

    fn cfg(scheme: TimeScheme, lim: &str, sigma: f64) -> SchemeConfig {
        let nf = NumericalFlux::new(FluxSpec::advection(1.0), FluxKind::UpwindAdvection, None).unwrap();
        let rec: Reconstruction = lim.parse().unwrap();
        SchemeConfig::new(scheme, rec, nf, sigma).unwrap()
    }

    fn bumpy(n: usize) -> GridState {
        GridState::sample(n, |x| (6.0 * x).sin() + if x > 0.5 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridState::new(vec![0.0; 4], 0.25, 0.0).is_err());
        assert!(GridState::new(vec![0.0; 5], 0.0, 0.0).is_err());
        assert!(GridState::new(vec![0.0; 5], 0.2, 0.0).is_ok());
    }

    #[test]
    fn sigma_validation() {
        let nf = NumericalFlux::new(FluxSpec::burgers(), FluxKind::Godunov, None).unwrap();
        assert!(SchemeConfig::new(TimeScheme::Euler, Limiter::from_catalog("minmod", None).unwrap(), nf.clone(), 1.2).is_err());
        assert!(SchemeConfig::new(TimeScheme::FivePoint, Reconstruction::Uno2, nf, 0.5).is_err());
    }

    #[test]
    fn constant_state_is_fixed() {
        let s = GridState::new(vec![0.7; 9], 1.0 / 9.0, 0.0).unwrap();
        for sch in [
            TimeScheme::Euler,
            TimeScheme::Heun,
            TimeScheme::PredictorCorrector,
            TimeScheme::ModifiedPcExplicit,
            TimeScheme::FivePoint,
        ] {
            let (next, _) = step(&s, &cfg(sch, "muscl", 0.4)).unwrap();
            assert_eq!(next.u(), s.u());
        }
    }

    #[test]
    fn upwind_rhs_and_unit_shift() {
        let mut u = vec![0.0; 8];
        u[3] = 0.125;
        let s = GridState::new(u.clone(), 0.125, 0.0).unwrap();
        let c = cfg(TimeScheme::Euler, "upwind", 1.0);
        let r = semi_discrete_rhs(s.u(), s.h(), &c.reconstruction, &c.nflux).unwrap();
        for j in 0..8 {
            assert_eq!(r[j], -(u[j] - u[(j + 7) % 8]) / 0.125);
        }
        let (next, _) = step(&s, &c).unwrap();
        for j in 0..8 {
            assert_eq!(next.u()[j], u[(j + 7) % 8]);
        }
    }

    #[test]
    fn modified_pc_reduces_to_pc_for_upwind() {
        let s = bumpy(32);
        let (a, _) = step(&s, &cfg(TimeScheme::ModifiedPcExplicit, "upwind", 0.5)).unwrap();
        let (b, _) = step(&s, &cfg(TimeScheme::PredictorCorrector, "upwind", 0.5)).unwrap();
        for (x, y) in a.u().iter().zip(b.u()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pc_upwind_is_two_half_shifts() {
        // upwind PC at σ: u - σΔ_{j-½}(u^{½}) with u^{½} = u - σ/2 Δ_{j-½}
        let s = bumpy(16);
        let u = s.u();
        let n = u.len();
        let half: Vec<f64> = (0..n).map(|j| u[j] - 0.25 * (u[j] - u[(j + n - 1) % n])).collect();
        let want: Vec<f64> = (0..n)
            .map(|j| u[j] - 0.5 * (half[j] - half[(j + n - 1) % n]))
            .collect();
        let (got, _) = step(&s, &cfg(TimeScheme::PredictorCorrector, "upwind", 0.5)).unwrap();
        for (x, y) in got.u().iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn stable_sigma_values() {
        let l = |n| Limiter::from_catalog(n, None).unwrap();
        assert!((max_stable_sigma(&l("lagrange")) - 4.0 / 9.0).abs() < 1e-12);
        assert!((max_stable_sigma(&l("minmod")) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(max_stable_sigma(&l("upwind")), 1.0);
    }

    #[test]
    fn strict_policy_refuses() {
        let s = bumpy(32);
        let c = cfg(TimeScheme::Euler, "lagrange", 0.6).with_cfl_policy(CflPolicy::Strict);
        match step(&s, &c) {
            Err(Error::CflRefusal { estimate, bound }) => {
                assert!((bound - 4.0 / 9.0).abs() < 1e-12);
                assert!((estimate - 0.6).abs() < 1e-12);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        let c = cfg(TimeScheme::Euler, "lagrange", 0.4).with_cfl_policy(CflPolicy::Strict);
        assert!(step(&s, &c).is_ok());
    }

    #[test]
    fn harten_minmod_passes() {
        let s = bumpy(40);
        let c = cfg(TimeScheme::Euler, "minmod", 0.4);
        let rep = check_harten_conditions(s.u(), &c.reconstruction, &c.nflux, 0.4).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
    }

    #[test]
    fn harten_lagrange_can_fail_above_bound() {
        // r_j = 0.2 at cell 3 (φ/r = 5/2) behind a cell whose ratio gives φ = 0
        let u = vec![0.0, 0.0, 0.0, 1.0, 6.0, 6.0, 6.0, 6.0];
        let c = cfg(TimeScheme::Euler, "lagrange", 0.6);
        let rep = check_harten_conditions(&u, &c.reconstruction, &c.nflux, 0.6).unwrap();
        assert!(!rep.passed);
        let rep = check_harten_conditions(&u, &c.reconstruction, &c.nflux, 0.4).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn fitted_steps_land_on_t_final() {
        let (n, dt) = fit_time_step(1.0, 0.3);
        assert_eq!(n, 4);
        assert_eq!(dt, 0.25);
        let (n, dt) = fit_time_step(1.0, 1.0 / 128.0);
        assert_eq!((n, dt), (128, 1.0 / 128.0));
    }

    #[test]
    fn modified_pc_reports_drift_field() {
        let s = bumpy(32);
        let (_, rep) = step(&s, &cfg(TimeScheme::ModifiedPcExplicit, "minmod", 0.4)).unwrap();
        assert!(rep.mass_drift().is_finite());
        assert!(!TimeScheme::ModifiedPcExplicit.is_conservative());
    }
}
