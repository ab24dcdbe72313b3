//! Physical fluxes and two-point monotone numerical fluxes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed interval of states, used to validate fluxes and to probe them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "degenerate interval [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` equally spaced points including both ends.
    pub fn samples(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        (0..n).map(move |i| self.lo + self.width() * i as f64 / (n - 1) as f64)
    }
}

/// A convex physical flux f with its derivative.
#[derive(Clone)]
pub struct FluxSpec {
    name: String,
    f: ScalarFn,
    df: ScalarFn,
    sonic_point: Option<f64>,
    speed: Option<f64>,
}

impl fmt::Debug for FluxSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("FluxSpec")
            .field("name", &self.name)
            .field("sonic_point", &self.sonic_point)
            .field("speed", &self.speed)
            .finish()
    }
}

impl FluxSpec {
    /// Linear advection f(u) = a u.
    pub fn advection(a: f64) -> Self {
        Self {
            name: "advection".into(),
            f: Arc::new(move |u| a * u),
            df: Arc::new(move |_| a),
            sonic_point: None,
            speed: Some(a),
        }
    }

    /// Burgers flux f(u) = u²/2, sonic at 0.
    pub fn burgers() -> Self {
        Self {
            name: "burgers".into(),
            f: Arc::new(|u| 0.5 * u * u),
            df: Arc::new(|u| u),
            sonic_point: Some(0.0),
            speed: None,
        }
    }

    /// Any convex flux. `sonic_point` is where f' vanishes, if it does.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sonic_point: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            sonic_point,
            speed: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn df(&self, u: f64) -> f64 {
        (self.df)(u)
    }

    pub fn sonic_point(&self) -> Option<f64> {
        self.sonic_point
    }

    /// The constant speed when f is linear.
    pub fn advection_speed(&self) -> Option<f64> {
        self.speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxKind {
    UpwindAdvection,
    Godunov,
    EngquistOsher,
    LaxWendroffType { mu: f64 },
}

impl FluxKind {
    pub fn name(&self) -> &'static str {
        match self {
            FluxKind::UpwindAdvection => "upwind_advection",
            FluxKind::Godunov => "godunov",
            FluxKind::EngquistOsher => "engquist_osher",
            FluxKind::LaxWendroffType { .. } => "lax_wendroff_type",
        }
    }
}

impl FromStr for FluxKind {
    type Err = Error;

    /// `upwind`, `godunov`, `engquist_osher`, or `lax_wendroff:<mu>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upwind" | "upwind_advection" => Ok(FluxKind::UpwindAdvection),
            "godunov" => Ok(FluxKind::Godunov),
            "engquist_osher" | "eo" => Ok(FluxKind::EngquistOsher),
            _ => match s.split_once(':') {
                Some(("lax_wendroff" | "lax_wendroff_type", mu)) => mu
                    .parse()
                    .map(|mu| FluxKind::LaxWendroffType { mu })
                    .map_err(|_| Error::InvalidParameter(format!("bad mu `{mu}`"))),
                _ => Err(Error::InvalidParameter(format!("unknown flux `{s}`"))),
            },
        }
    }
}

/// A two-point numerical flux Φ(u, v) tied to a physical flux.
#[derive(Debug, Clone)]
pub struct NumericalFlux {
    flux: FluxSpec,
    kind: FluxKind,
}

const VALIDATION_SAMPLES: usize = 256;

impl NumericalFlux {
    /// Builds Φ. When a working `range` is given the flux is validated on it:
    /// convexity, a sonic point wherever f' changes sign, and μ ≥ sup|f'|.
    pub fn new(flux: FluxSpec, kind: FluxKind, range: Option<Interval>) -> Result<Self> {
        let bad = |reason: String| Error::IncompatibleFlux {
            flux: flux.name().into(),
            kind: kind.name().into(),
            reason,
        };
        if let Some(r) = range {
            let d: Vec<f64> = r.samples(VALIDATION_SAMPLES).map(|u| flux.df(u)).collect();
            if d.windows(2).any(|w| w[1] < w[0] - 1e-12 * (1.0 + w[0].abs())) {
                return Err(bad("flux is not convex on the working range".into()));
            }
            let changes_sign = d.iter().any(|&x| x < 0.0) && d.iter().any(|&x| x > 0.0);
            if changes_sign
                && flux.sonic_point().is_none()
                && matches!(kind, FluxKind::Godunov | FluxKind::EngquistOsher)
            {
                return Err(bad("missing sonic point".into()));
            }
            if let FluxKind::LaxWendroffType { mu } = kind {
                let sup = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if mu < sup {
                    return Err(bad(format!("mu = {mu} is below sup|f'| = {sup}")));
                }
            }
        }
        match kind {
            FluxKind::UpwindAdvection if flux.advection_speed().is_none() => {
                return Err(bad("needs a linear flux".into()))
            }
            FluxKind::LaxWendroffType { mu } if !(mu >= 0.0 && mu.is_finite()) => {
                return Err(bad(format!("mu must be a nonnegative number, got {mu}")))
            }
            _ => {}
        }
        Ok(Self { flux, kind })
    }

    pub fn flux(&self) -> &FluxSpec {
        &self.flux
    }

    pub fn kind(&self) -> FluxKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Φ(u, v): u is the state left of the interface, v the state right of it.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let f = &self.flux;
        match self.kind {
            FluxKind::UpwindAdvection => {
                let a = f.advection_speed().unwrap_or(0.0);
                if a >= 0.0 {
                    a * u
                } else {
                    a * v
                }
            }
            FluxKind::Godunov => {
                if u <= v {
                    let mut m = f.f(u).min(f.f(v));
                    if let Some(s) = f.sonic_point() {
                        if u <= s && s <= v {
                            m = m.min(f.f(s));
                        }
                    }
                    m
                } else {
                    f.f(u).max(f.f(v))
                }
            }
            FluxKind::EngquistOsher => match f.sonic_point() {
                Some(s) => f.f(u.max(s)) + f.f(v.min(s)) - f.f(s),
                None => {
                    if f.df(u) + f.df(v) >= 0.0 {
                        f.f(u)
                    } else {
                        f.f(v)
                    }
                }
            },
            FluxKind::LaxWendroffType { mu } => 0.5 * (f.f(u) + mu * u) + 0.5 * (f.f(v) - mu * v),
        }
    }

    /// ∂Φ/∂u by central differences.
    pub fn d_u(&self, u: f64, v: f64, eps: f64) -> f64 {
        (self.eval(u + eps, v) - self.eval(u - eps, v)) / (2.0 * eps)
    }

    /// ∂Φ/∂v by central differences.
    pub fn d_v(&self, u: f64, v: f64, eps: f64) -> f64 {
        (self.eval(u, v + eps) - self.eval(u, v - eps)) / (2.0 * eps)
    }
}

/// Outcome of a sampled flux diagnostic; `witness` is the first failing (u, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxVerdict {
    pub passed: bool,
    pub witness: Option<(f64, f64)>,
}

impl FluxVerdict {
    fn from_witness(witness: Option<(f64, f64)>) -> Self {
        Self {
            passed: witness.is_none(),
            witness,
        }
    }
}

/// Φ_u ≥ 0 and Φ_v ≤ 0 on a 64×64 grid over the range, up to 1e-10.
pub fn check_monotone(nf: &NumericalFlux, range: Interval) -> FluxVerdict {
    let eps = 1e-4 * range.width();
    let pts: Vec<f64> = range.samples(64).collect();
    let w = pts.iter().find_map(|&u| {
        pts.iter().find_map(|&v| {
            let bad = nf.d_u(u, v, eps) < -1e-10 || nf.d_v(u, v, eps) > 1e-10;
            bad.then_some((u, v))
        })
    });
    FluxVerdict::from_witness(w)
}

/// f'(w) > 0 forces Φ_v(w, w) = 0 and f'(w) < 0 forces Φ_u(w, w) = 0, up to 1e-8.
pub fn check_upwind_compliance(nf: &NumericalFlux, range: Interval) -> FluxVerdict {
    let f = nf.flux();
    let w = range.samples(64).find_map(|w| {
        let eps = 1e-6 * w.abs().max(1.0);
        if let Some(s) = f.sonic_point() {
            if (w - s).abs() <= eps {
                return None;
            }
        }
        let d = f.df(w);
        let bad = (d > 0.0 && nf.d_v(w, w, eps).abs() > 1e-8)
            || (d < 0.0 && nf.d_u(w, w, eps).abs() > 1e-8);
        bad.then_some((w, w))
    });
    FluxVerdict::from_witness(w)
}
