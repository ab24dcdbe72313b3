//! Slope-ratio limiters and the admissibility predicates used to classify them.
//!
//! A limiter is stored in φ-form: the function of the ratio
//! r_j = (u_j - u_{j-1}) / (u_{j+1} - u_j) that scales the interface correction.
//! The ψ-form is recovered through ψ(λ) = λ φ(1/λ).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Slack allowed on every sampled inequality and identity.
pub const CHECK_TOL: f64 = 1e-10;

/// Ratios φ(r)/r above this are treated as unbounded by [`bound_m`].
pub const BOUND_CAP: f64 = 1e6;

/// One linear piece of a user supplied limiter, valid from `start` up to the next piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LimiterKind {
    Upwind,
    LaxWendroff,
    Minmod,
    Superbee,
    Muscl,
    Kappa(f64),
    VanAlbada,
    Lagrange,
    MinmodAbs,
    PiecewiseLinear(Vec<Segment>),
}

/// An immutable limiter. Cheap to clone and safe to share between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Limiter {
    name: String,
    kind: LimiterKind,
}

/// Names accepted by [`Limiter::from_catalog`].
pub const CATALOG: [&str; 9] = [
    "upwind",
    "lax_wendroff",
    "minmod",
    "superbee",
    "muscl",
    "kappa",
    "van_albada",
    "lagrange",
    "minmod_abs",
];

fn minmod_phi(r: f64) -> f64 {
    r.clamp(0.0, 1.0)
}

impl Limiter {
    /// Look up a catalog limiter. `kappa` is required for the κ-family and ignored otherwise.
    pub fn from_catalog(name: &str, kappa: Option<f64>) -> Result<Self> {
        let kind = match name {
            "upwind" => LimiterKind::Upwind,
            "lax_wendroff" => LimiterKind::LaxWendroff,
            "minmod" => LimiterKind::Minmod,
            "superbee" => LimiterKind::Superbee,
            "muscl" => LimiterKind::Muscl,
            "van_albada" => LimiterKind::VanAlbada,
            "lagrange" => LimiterKind::Lagrange,
            "minmod_abs" => LimiterKind::MinmodAbs,
            "kappa" => {
                let k = kappa.ok_or_else(|| {
                    Error::InvalidParameter("kappa limiter needs a kappa value".into())
                })?;
                if !(-1.0..=1.0).contains(&k) {
                    return Err(Error::InvalidParameter(format!(
                        "kappa must lie in [-1, 1], got {k}"
                    )));
                }
                LimiterKind::Kappa(k)
            }
            other => return Err(Error::UnknownLimiter(other.to_string())),
        };
        let name = match kind {
            LimiterKind::Kappa(k) => format!("kappa({k})"),
            _ => name.to_string(),
        };
        Ok(Self { name, kind })
    }

    /// Build a piecewise-linear limiter. Pieces are sorted by start; the first piece
    /// also covers everything to its left.
    pub fn piecewise_linear(name: &str, mut segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter(
                "piecewise limiter needs at least one segment".into(),
            ));
        }
        if segments
            .iter()
            .any(|s| !(s.start.is_finite() && s.slope.is_finite() && s.intercept.is_finite()))
        {
            return Err(Error::InvalidParameter("segment values must be finite".into()));
        }
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        if segments.windows(2).any(|w| w[0].start == w[1].start) {
            return Err(Error::InvalidParameter("duplicate breakpoint".into()));
        }
        Ok(Self {
            name: name.to_string(),
            kind: LimiterKind::PiecewiseLinear(segments),
        })
    }

    /// Parse a description made of `r_break slope intercept` lines. Blank lines and
    /// `#` comments are skipped.
    pub fn parse_description(name: &str, text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("`{f}`: {e}"),
                })?;
            }
            segments.push(Segment {
                start: vals[0],
                slope: vals[1],
                intercept: vals[2],
            });
        }
        if segments.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no segments found".into(),
            });
        }
        Self::piecewise_linear(name, segments).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &LimiterKind {
        &self.kind
    }

    /// Cells read on each side of an interface.
    pub fn stencil_width(&self) -> usize {
        3
    }

    /// φ(r). Total on the reals; infinite arguments return the limit where it exists.
    pub fn phi(&self, r: f64) -> f64 {
        match &self.kind {
            LimiterKind::Upwind => 0.0,
            LimiterKind::LaxWendroff => 1.0,
            LimiterKind::Minmod => minmod_phi(r),
            LimiterKind::MinmodAbs => minmod_phi(r.abs()),
            LimiterKind::Superbee => {
                if r <= 0.0 {
                    0.0
                } else if r <= 0.5 {
                    2.0 * r
                } else if r <= 1.0 {
                    1.0
                } else if r <= 2.0 {
                    r
                } else {
                    2.0
                }
            }
            LimiterKind::Muscl => {
                if r <= 0.0 {
                    0.0
                } else if r <= 1.0 / 3.0 {
                    2.0 * r
                } else if r <= 3.0 {
                    0.5 * (1.0 + r)
                } else {
                    2.0
                }
            }
            LimiterKind::Kappa(k) => {
                if r <= 0.0 {
                    0.0
                } else if *k == 1.0 {
                    1.0
                } else {
                    // r ψκ(1/r) written out; the family is self-dual
                    let b = (3.0 - k) / (1.0 - k);
                    0.5 * ((1.0 - k) * r.min(b) + (1.0 + k) * (b * r).min(1.0))
                }
            }
            LimiterKind::VanAlbada => {
                if r.is_infinite() {
                    1.0
                } else {
                    r * (1.0 + r) / (1.0 + r * r)
                }
            }
            LimiterKind::Lagrange => {
                if r <= -3.0 {
                    0.0
                } else if r <= -1.0 {
                    0.25 * (r + 3.0)
                } else if r <= 0.0 {
                    -0.5 * r
                } else if r <= 1.0 / 3.0 {
                    2.5 * r
                } else if r <= 3.0 {
                    0.25 * (r + 3.0)
                } else {
                    1.5
                }
            }
            LimiterKind::PiecewiseLinear(segs) => {
                let idx = segs.partition_point(|s| s.start <= r).saturating_sub(1);
                let s = &segs[idx];
                s.slope * r + s.intercept
            }
        }
    }

    /// ψ(λ) = λ φ(1/λ), with ψ(0) = 0.
    pub fn psi(&self, lambda: f64) -> f64 {
        psi_from_phi(|r| self.phi(r), lambda)
    }
}

impl fmt::Display for Limiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for Limiter {
    type Err = Error;

    /// Accepts catalog names, plus `kappa:<value>` for the κ-family.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("kappa", v)) => {
                let k = v
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad kappa value `{v}`")))?;
                Self::from_catalog("kappa", Some(k))
            }
            _ => Self::from_catalog(s, None),
        }
    }
}

/// ψ(λ) = λ φ(1/λ), defined as 0 at λ = 0.
pub fn psi_from_phi(phi: impl Fn(f64) -> f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        lambda * phi(1.0 / lambda)
    }
}

/// φ(r) = r ψ(1/r), defined as 0 at r = 0.
pub fn phi_from_psi(psi: impl Fn(f64) -> f64, r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r * psi(1.0 / r)
    }
}

/// Sample points shared by every predicate: the breakpoints of the catalog plus
/// 512 log-spaced magnitudes in [1e-6, 64] of each sign. Sorted ascending.
pub fn sampling_grid() -> Vec<f64> {
    let mut g = vec![-3.0, -1.0, -0.5, 1e-12, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];
    let n = 512;
    let (lo, hi) = (1e-6f64.ln(), 64f64.ln());
    for i in 0..n {
        let m = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
        g.push(m);
        g.push(-m);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Monotonicity,
    Convexity,
    TvdRegion,
    SecondOrderExtremum,
    ExtremumIdentity,
}

impl Predicate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Predicate::Monotonicity => "monotonicity",
            Predicate::Convexity => "convexity",
            Predicate::TvdRegion => "tvd_region",
            Predicate::SecondOrderExtremum => "second_order_extremum",
            Predicate::ExtremumIdentity => "extremum_identity",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sample where an inequality `lhs <= rhs` or identity `lhs == rhs` failed.
/// For monotonicity `arg` is λ; for the extremum identity it is σ (or k for the
/// discrete relations); otherwise it is r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub arg: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Verdict of one predicate on one limiter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub limiter: String,
    pub predicate: Predicate,
    pub param: Option<f64>,
    pub passed: bool,
    pub witness: Option<Witness>,
    /// Only for the TVD region: whether φ(r) ≤ 2r also holds on [0, 1].
    pub sweby_bound: Option<bool>,
}

impl AdmissibilityReport {
    fn new(l: &Limiter, predicate: Predicate, param: Option<f64>, witness: Option<Witness>) -> Self {
        Self {
            limiter: l.name().to_string(),
            predicate,
            param,
            passed: witness.is_none(),
            witness,
            sweby_bound: None,
        }
    }

    pub const CSV_HEADER: &'static str = "limiter,predicate,param,verdict,witness_r,lhs,rhs";

    pub fn csv_row(&self) -> String {
        let param = self.param.map(crate::fmt_real).unwrap_or_default();
        let verdict = if self.passed { "pass" } else { "fail" };
        let (w, l, r) = match self.witness {
            Some(w) => (
                crate::fmt_real(w.arg),
                crate::fmt_real(w.lhs),
                crate::fmt_real(w.rhs),
            ),
            None => Default::default(),
        };
        format!(
            "{},{},{},{},{},{},{}",
            self.limiter, self.predicate, param, verdict, w, l, r
        )
    }
}

fn le(arg: f64, lhs: f64, rhs: f64) -> Option<Witness> {
    if lhs <= rhs + CHECK_TOL {
        None
    } else {
        Some(Witness { arg, lhs, rhs })
    }
}

fn eq(arg: f64, lhs: f64, rhs: f64) -> Option<Witness> {
    if (lhs - rhs).abs() <= CHECK_TOL {
        None
    } else {
        Some(Witness { arg, lhs, rhs })
    }
}

/// 0 ≤ ψ(λ)/λ ≤ 2 for every nonzero λ on the grid.
pub fn check_monotonicity(l: &Limiter) -> AdmissibilityReport {
    let w = sampling_grid().into_iter().find_map(|lam| {
        let q = l.psi(lam) / lam;
        le(lam, 0.0, q).map(|_| Witness { arg: lam, lhs: q, rhs: 0.0 })
            .or_else(|| le(lam, q, 2.0))
    });
    AdmissibilityReport::new(l, Predicate::Monotonicity, None, w)
}

/// The φ-side bands equivalent to monotone and convexity preserving reconstruction.
pub fn check_convexity(l: &Limiter) -> AdmissibilityReport {
    let w = sampling_grid().into_iter().find_map(|r| {
        let p = l.phi(r);
        let mut w = None;
        if r <= 1.0 {
            w = w.or_else(|| le(r, r.max(0.0), p)).or_else(|| le(r, p, 1.0));
        }
        if (1.0..=2.0).contains(&r) {
            w = w.or_else(|| le(r, 1.0, p)).or_else(|| le(r, p, r));
        }
        if r >= 2.0 {
            w = w.or_else(|| le(r, 1.0, p)).or_else(|| le(r, p, r.min(2.0)));
        }
        if r >= 1.0 {
            w = w.or_else(|| le(r, p, r * l.phi(1.0 / r)));
        }
        w
    });
    AdmissibilityReport::new(l, Predicate::Convexity, None, w)
}

/// φ(r) ≤ (α-2) r for r ≤ 0 and φ(r) ≤ α for r > 0, for a fixed α in [1, 2].
pub fn check_tvd_region(l: &Limiter, alpha: f64) -> Result<AdmissibilityReport> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [1, 2], got {alpha}"
        )));
    }
    let grid = sampling_grid();
    let w = grid.iter().find_map(|&r| {
        let p = l.phi(r);
        if r <= 0.0 {
            le(r, p, (alpha - 2.0) * r)
        } else {
            le(r, p, alpha)
        }
    });
    let sweby = grid
        .iter()
        .filter(|&&r| (0.0..=1.0).contains(&r))
        .all(|&r| le(r, l.phi(r), 2.0 * r).is_none());
    let mut rep = AdmissibilityReport::new(l, Predicate::TvdRegion, Some(alpha), w);
    rep.sweby_bound = Some(sweby);
    Ok(rep)
}

/// φ(1) = 1, φ has one-sided derivatives at 1, and φ(-1) + φ(3) = 2.
pub fn check_second_order_extremum(l: &Limiter) -> AdmissibilityReport {
    let p1 = l.phi(1.0);
    let mut w = eq(1.0, p1, 1.0);
    if w.is_none() {
        for side in [1.0, -1.0] {
            let d = |s: f64| (l.phi(1.0 + side * s) - p1) / (side * s);
            let (d1, d2) = (d(1e-4), d(5e-5));
            let ok = d1.is_finite()
                && d2.is_finite()
                && (d1 - d2).abs() <= 1e-3 * d1.abs().max(d2.abs()).max(1.0);
            if !ok {
                w = Some(Witness { arg: 1.0, lhs: d1, rhs: d2 });
                break;
            }
        }
    }
    let w = w.or_else(|| eq(-1.0, l.phi(-1.0) + l.phi(3.0), 2.0));
    AdmissibilityReport::new(l, Predicate::SecondOrderExtremum, None, w)
}

/// The extremum identity (1-σ)φ((1+σ)/(σ-1)) + (1+σ)φ((3+σ)/(1+σ)) = 2 on [0, δ],
/// together with the five discrete relations
/// (k+½)φ((k-½)/(k+½)) - (k-½)φ((k-3/2)/(k-½)) = 1 for k = -2..2.
pub fn check_extremum_identity(l: &Limiter, delta: f64) -> Result<AdmissibilityReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let n = 64;
    let mut w = (0..=n).find_map(|i| {
        let s = delta * i as f64 / n as f64;
        let left = if s == 1.0 {
            0.0
        } else {
            (1.0 - s) * l.phi((1.0 + s) / (s - 1.0))
        };
        let v = left + (1.0 + s) * l.phi((3.0 + s) / (1.0 + s));
        eq(s, v, 2.0)
    });
    if w.is_none() {
        w = (-2..=2).find_map(|k| {
            let k = k as f64;
            let v = (k + 0.5) * l.phi((k - 0.5) / (k + 0.5))
                - (k - 0.5) * l.phi((k - 1.5) / (k - 0.5));
            eq(k, v, 1.0)
        });
    }
    Ok(AdmissibilityReport::new(l, Predicate::ExtremumIdentity, Some(delta), w))
}

/// Supremum of φ(r)/r over the positive grid, or infinity past [`BOUND_CAP`].
pub fn bound_m(l: &Limiter) -> f64 {
    let m = sampling_grid()
        .into_iter()
        .filter(|&r| r > 0.0)
        .map(|r| l.phi(r) / r)
        .fold(0.0f64, f64::max);
    if m > BOUND_CAP {
        f64::INFINITY
    } else {
        m
    }
}

/// Largest secant slope between neighbouring grid points. A diagnostic only.
pub fn estimate_lipschitz(l: &Limiter) -> f64 {
    let g = sampling_grid();
    g.windows(2)
        .map(|w| ((l.phi(w[1]) - l.phi(w[0])) / (w[1] - w[0])).abs())
        .fold(0.0, f64::max)
}
