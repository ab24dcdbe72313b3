//! Grid-refinement study for periodic linear advection of a C² profile with a
//! nondegenerate maximum at x = ½.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::OnceLock;

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flux::{FluxKind, FluxSpec, NumericalFlux};
use crate::reconstruction::Reconstruction;
use crate::solver::{simulate, step_with_dt, GridState, SchemeConfig, TimeScheme};

/// Reconstructions compared in the study, in table order.
pub const STUDY_RECONSTRUCTIONS: [&str; 8] = [
    "upwind",
    "lax_wendroff",
    "muscl",
    "minmod",
    "superbee",
    "lagrange",
    "minmod_abs",
    "uno2",
];

/// Mesh levels supported by the study: N = 2^k.
pub const K_RANGE: RangeInclusive<u32> = 3..=10;

/// Levels used for order fitting unless asked otherwise.
pub const FIT_RANGE: RangeInclusive<u32> = 5..=9;

/// Middle cubic 1 - s² + s³ (s = x - ½) and its first two derivatives.
fn cubic(x: f64) -> [f64; 3] {
    let s = x - 0.5;
    [1.0 - s * s + s * s * s, -2.0 * s + 3.0 * s * s, -2.0 + 6.0 * s]
}

/// The periodic initial profile: a cubic on [¼, ¾] joined with C² quintics that
/// vanish to second order at 0 and 1.
#[derive(Debug, Clone)]
pub struct ProfileU0 {
    /// Monomial coefficients in s = x on [0, ¼].
    left: [f64; 6],
    /// Monomial coefficients in s = x - ¾ on [¾, 1].
    right: [f64; 6],
}

/// Value, slope and curvature of the monomials s^0..s^5 at `s`.
fn monomial_rows(s: f64) -> [[f64; 6]; 3] {
    let mut rows = [[0.0; 6]; 3];
    for i in 0..6 {
        let fi = i as f64;
        rows[0][i] = s.powi(i as i32);
        if i >= 1 {
            rows[1][i] = fi * s.powi(i as i32 - 1);
        }
        if i >= 2 {
            rows[2][i] = fi * (fi - 1.0) * s.powi(i as i32 - 2);
        }
    }
    rows
}

/// Quintic on [0, w] with prescribed (value, slope, curvature) at both ends.
fn hermite_quintic(at0: [f64; 3], at_w: [f64; 3], w: f64) -> [f64; 6] {
    let mut a = SMatrix::<f64, 6, 6>::zeros();
    let mut b = SVector::<f64, 6>::zeros();
    for (k, (s, vals)) in [(0.0, at0), (w, at_w)].into_iter().enumerate() {
        let rows = monomial_rows(s);
        for d in 0..3 {
            for i in 0..6 {
                a[(3 * k + d, i)] = rows[d][i];
            }
            b[3 * k + d] = vals[d];
        }
    }
    let c = a.lu().solve(&b).expect("Hermite system is nonsingular");
    let mut out = [0.0; 6];
    out.copy_from_slice(c.as_slice());
    out
}

fn poly(c: &[f64; 6], s: f64, order: usize) -> f64 {
    monomial_rows(s)[order]
        .iter()
        .zip(c)
        .map(|(m, c)| m * c)
        .sum()
}

impl ProfileU0 {
    pub fn new() -> Self {
        Self {
            left: hermite_quintic([0.0; 3], cubic(0.25), 0.25),
            right: hermite_quintic(cubic(0.75), [0.0; 3], 0.25),
        }
    }

    /// Derivative of order 0, 1 or 2 at x in [0, 1]. The middle piece wins at the
    /// junctions; use [`ProfileU0::one_sided`] to read the quintics there.
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParameter(format!("x = {x} outside [0, 1]")));
        }
        if order > 2 {
            return Err(Error::InvalidParameter("only derivatives up to 2".into()));
        }
        Ok(if x < 0.25 {
            poly(&self.left, x, order)
        } else if x <= 0.75 {
            cubic(x)[order]
        } else {
            poly(&self.right, x - 0.75, order)
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.derivative(x, 0)
    }

    /// The outer quintic's derivative at a junction (x = ¼ or ¾).
    pub fn one_sided(&self, junction: f64, order: usize) -> f64 {
        if junction < 0.5 {
            poly(&self.left, junction, order)
        } else {
            poly(&self.right, junction - 0.75, order)
        }
    }

    /// Largest mismatch of value, slope and curvature across the two junctions.
    pub fn junction_residual(&self) -> f64 {
        [0.25, 0.75]
            .iter()
            .flat_map(|&x| (0..3).map(move |d| (x, d)))
            .map(|(x, d)| (self.one_sided(x, d) - cubic(x)[d]).abs())
            .fold(0.0, f64::max)
    }

    pub fn left_coefficients(&self) -> &[f64; 6] {
        &self.left
    }

    pub fn right_coefficients(&self) -> &[f64; 6] {
        &self.right
    }
}

impl Default for ProfileU0 {
    fn default() -> Self {
        Self::new()
    }
}

pub fn profile() -> &'static ProfileU0 {
    static P: OnceLock<ProfileU0> = OnceLock::new();
    P.get_or_init(ProfileU0::new)
}

pub fn eval_profile(x: f64) -> Result<f64> {
    profile().eval(x)
}

/// Profile transported at speed `a` on the unit circle.
pub fn exact_advection(x: f64, t: f64, a: f64) -> f64 {
    let y = (x - a * t).rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0
    profile().eval(y.min(1.0)).unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Discrete l1, l2 and max norms of the nodal error against `exact`.
pub fn error_norms_against(numeric: &GridState, exact: impl Fn(f64) -> f64) -> ErrorNorms {
    let h = numeric.h();
    let (mut s1, mut s2, mut m) = (0.0, 0.0, 0.0f64);
    for (i, &u) in numeric.u().iter().enumerate() {
        let e = (u - exact(numeric.x(i))).abs();
        s1 += e;
        s2 += e * e;
        m = m.max(e);
    }
    ErrorNorms {
        l1: h * s1,
        l2: (h * s2).sqrt(),
        linf: m,
    }
}

/// Error norms against the unit-speed exact solution at time `t`.
pub fn error_norms(numeric: &GridState, t: f64) -> ErrorNorms {
    error_norms_against(numeric, |x| exact_advection(x, t, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    /// Negative least-squares slope of log2(error) against k.
    pub order: f64,
    /// log2(e_k / e_{k+1}) for consecutive supplied levels.
    pub pairwise: Vec<f64>,
    /// Some error was nonpositive and was replaced by machine epsilon.
    pub floored: bool,
}

/// Fits error ≈ C h^p with h = 2^-k over the supplied levels.
pub fn fit_order(errors: &BTreeMap<u32, f64>) -> Result<OrderFit> {
    if errors.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 mesh levels, got {}",
            errors.len()
        )));
    }
    let mut floored = false;
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .map(|(&k, &e)| {
            let e = if e > 0.0 {
                e
            } else {
                floored = true;
                f64::EPSILON
            };
            (k as f64, e.log2())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let pairwise = pts
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0))
        .collect();
    Ok(OrderFit {
        order: -sxy / sxx,
        pairwise,
        floored,
    })
}

fn unit_advection() -> NumericalFlux {
    NumericalFlux::new(FluxSpec::advection(1.0), FluxKind::UpwindAdvection, None)
        .expect("linear flux is always valid")
}

fn mesh_cells(h: f64) -> Result<usize> {
    let n = (1.0 / h).round();
    if !(n >= 5.0) || ((n * h) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "h = {h} does not divide the unit interval into at least 5 cells"
        )));
    }
    Ok(n as usize)
}

/// |ρ| at node `x0` for an arbitrary smooth periodic `profile` at unit speed:
/// (exact(x0, Δt) - S(v)(x0)) / Δt, where S is one step of the scheme applied
/// to the exact nodal values v and Δt = σh.
pub fn truncation_residual_for(
    profile: impl Fn(f64) -> f64,
    scheme: TimeScheme,
    rec: &Reconstruction,
    sigma: f64,
    h: f64,
    x0: f64,
) -> Result<f64> {
    let n = mesh_cells(h)?;
    let j = x0 / h;
    if (j - j.round()).abs() > 1e-9 || j.round() < 0.0 || j.round() as usize >= n {
        return Err(Error::InvalidParameter(format!("x0 = {x0} is not a mesh node")));
    }
    let j = j.round() as usize;
    let h = 1.0 / n as f64;
    let state = GridState::new((0..n).map(|i| profile(i as f64 * h)).collect(), h, 0.0)?;
    let cfg = SchemeConfig::new(scheme, rec.clone(), unit_advection(), sigma)?;
    let dt = sigma * h;
    let (next, _) = step_with_dt(&state, &cfg, dt)?;
    let exact = profile((x0 - dt).rem_euclid(1.0));
    Ok(((exact - next.u()[j]) / dt).abs())
}

/// [`truncation_residual_for`] on the study profile.
pub fn truncation_residual(
    scheme: TimeScheme,
    rec: &Reconstruction,
    sigma: f64,
    h: f64,
    x0: f64,
) -> Result<f64> {
    truncation_residual_for(|x| exact_advection(x, 0.0, 1.0), scheme, rec, sigma, h, x0)
}

/// One (scheme, reconstruction, σ) combination of the study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub scheme: TimeScheme,
    pub reconstruction: Reconstruction,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub scheme: TimeScheme,
    pub limiter: String,
    pub sigma: f64,
    pub k: u32,
    pub h: f64,
    pub norms: ErrorNorms,
    pub trunc_at_half: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Norm {
    L1,
    L2,
    Linf,
    Trunc,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::L1, Norm::L2, Norm::Linf, Norm::Trunc];

    pub fn name(&self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
            Norm::Trunc => "trunc_at_half",
        }
    }

    fn of(&self, r: &ErrorRow) -> f64 {
        match self {
            Norm::L1 => r.norms.l1,
            Norm::L2 => r.norms.l2,
            Norm::Linf => r.norms.linf,
            Norm::Trunc => r.trunc_at_half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub scheme: TimeScheme,
    pub limiter: String,
    pub sigma: f64,
    pub norm: Norm,
    pub fit: OrderFit,
}

/// Results of a convergence study, sorted by (scheme, limiter, σ, k).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub const CSV_HEADER: &'static str = "scheme,limiter,sigma,k,h,l1,l2,linf,trunc_at_half";
    pub const ORDERS_HEADER: &'static str = "scheme,limiter,sigma,norm,fitted_order";

    pub fn to_csv(&self) -> String {
        use crate::fmt_real as r;
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.scheme,
                row.limiter,
                r(row.sigma),
                row.k,
                r(row.h),
                r(row.norms.l1),
                r(row.norms.l2),
                r(row.norms.linf),
                r(row.trunc_at_half)
            ));
        }
        s
    }

    /// All levels of one combination, keyed by k.
    pub fn series(&self, scheme: TimeScheme, limiter: &str, sigma: f64, norm: Norm) -> BTreeMap<u32, f64> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme && r.limiter == limiter && r.sigma == sigma)
            .map(|r| (r.k, norm.of(r)))
            .collect()
    }

    /// Fitted orders for every combination and norm over `levels`.
    /// Combinations with fewer than 3 levels in range are skipped.
    pub fn fitted_orders(&self, levels: RangeInclusive<u32>) -> Vec<OrderRow> {
        let mut keys: Vec<(TimeScheme, String, f64)> = Vec::new();
        for r in &self.rows {
            if !keys
                .iter()
                .any(|k| k.0 == r.scheme && k.1 == r.limiter && k.2 == r.sigma)
            {
                keys.push((r.scheme, r.limiter.clone(), r.sigma));
            }
        }
        let mut out = Vec::new();
        for (scheme, limiter, sigma) in keys {
            for norm in Norm::ALL {
                let mut s = self.series(scheme, &limiter, sigma, norm);
                s.retain(|k, _| levels.contains(k));
                if let Ok(fit) = fit_order(&s) {
                    out.push(OrderRow {
                        scheme,
                        limiter: limiter.clone(),
                        sigma,
                        norm,
                        fit,
                    });
                }
            }
        }
        out
    }

    pub fn orders_csv(&self, levels: RangeInclusive<u32>) -> String {
        let mut s = String::from(Self::ORDERS_HEADER);
        s.push('\n');
        for o in self.fitted_orders(levels) {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                o.scheme,
                o.limiter,
                crate::fmt_real(o.sigma),
                o.norm.name(),
                crate::fmt_real(o.fit.order)
            ));
        }
        s
    }
}

fn run_cell(c: &StudyConfig, k: u32) -> Result<ErrorRow> {
    let n = 1usize << k;
    let state = GridState::sample(n, |x| exact_advection(x, 0.0, 1.0))?;
    let h = state.h();
    let cfg = SchemeConfig::new(c.scheme, c.reconstruction.clone(), unit_advection(), c.sigma)?;
    let out = simulate(state, &cfg, 1.0, None)?;
    Ok(ErrorRow {
        scheme: c.scheme,
        limiter: c.reconstruction.name().to_string(),
        sigma: c.sigma,
        k,
        h,
        norms: error_norms(&out.state, 1.0),
        trunc_at_half: truncation_residual(c.scheme, &c.reconstruction, c.sigma, h, 0.5)?,
    })
}

/// Runs every configuration over t ∈ [0, 1] on meshes N = 2^k. Cells run in
/// parallel; the result order does not depend on scheduling.
pub fn convergence_study(configs: &[StudyConfig], ks: RangeInclusive<u32>) -> Result<ErrorTable> {
    if ks.is_empty() || *ks.start() < *K_RANGE.start() || *ks.end() > *K_RANGE.end() {
        return Err(Error::InvalidParameter(format!(
            "mesh levels must be a nonempty range within 3..=10, got {}..={}",
            ks.start(),
            ks.end()
        )));
    }
    let cells: Vec<(&StudyConfig, u32)> = configs
        .iter()
        .flat_map(|c| ks.clone().map(move |k| (c, k)))
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|(c, k)| run_cell(c, *k))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (a.scheme, &a.limiter)
            .cmp(&(b.scheme, &b.limiter))
            .then(a.sigma.total_cmp(&b.sigma))
            .then(a.k.cmp(&b.k))
    });
    rows.dedup_by(|a, b| a.scheme == b.scheme && a.limiter == b.limiter && a.sigma == b.sigma && a.k == b.k);
    Ok(ErrorTable { rows })
}
