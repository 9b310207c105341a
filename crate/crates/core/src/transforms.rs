//! Numerical Laplace and Mellin transforms plus the Riemann-Liouville
//! fractional integral, together with executable checks of the two transform
//! identities tying a solution to its fractional extension:
//!
//! * Lemma 1: `u~_a(p) = p^(a-1) u~(p^a)`   (Laplace domain)
//! * Lemma 2: `u^_a(s) = (1/a) G(1-s/a)/G(1-s) u^(s/a)`   (Mellin domain)

use alloc::boxed::Box;
use alloc::string::String;
use libm::{exp, fabs, log, pow};

use crate::math::gamma;
use crate::quadrature::{self, QuadratureError, QuadratureSpec};

/// A known solution t -> u(t) at fixed spatial argument, the input to every
/// transform and to subordination.
pub struct TimeFunction {
    eval: Box<dyn Fn(f64) -> f64>,
    pub label: String,
    pub t_max: f64,
}

impl TimeFunction {
    pub fn new(label: impl Into<String>, t_max: f64, f: impl Fn(f64) -> f64 + 'static) -> Self {
        assert!(t_max > 0.0);
        Self {
            eval: Box::new(f),
            label: label.into(),
            t_max,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformError {
    Quadrature(QuadratureError),
    /// The Mellin integral's partial sums grow monotonically past the guard
    /// bound: s is outside the function's convergence strip.
    DivergentStrip,
}

impl From<QuadratureError> for TransformError {
    fn from(e: QuadratureError) -> Self {
        TransformError::Quadrature(e)
    }
}

impl core::fmt::Display for TransformError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransformError::Quadrature(e) => write!(f, "{e}"),
            TransformError::DivergentStrip => write!(f, "mellin transform divergent at this s"),
        }
    }
}

/// Truncated Laplace transform integral_0^T e^-pt f(t) dt with
/// T = min(40/p, t_max, tail_cutoff). On the Gauss-Legendre path the
/// integral is taken on a logarithmic grid (t = e^u): fractional solutions
/// carry t^alpha cusps at t = 0 that fixed panels in t cannot resolve, but
/// that become smooth exponentials in u.
pub fn laplace(f: &TimeFunction, p: f64, spec: &QuadratureSpec) -> Result<f64, TransformError> {
    assert!(p > 0.0, "laplace requires p > 0");
    let cutoff = (40.0 / p).min(f.t_max).min(spec.tail_cutoff);
    if spec.scheme == quadrature::Scheme::AdaptiveSimpson {
        return Ok(quadrature::integrate_interval(
            |t| exp(-p * t) * f.eval(t),
            0.0,
            cutoff,
            spec,
        )?);
    }
    spec.validate().map_err(TransformError::Quadrature)?;
    let u_max = log(cutoff);
    // below u_min the slice of the integral is < ~abs_tol relative
    let u_min = (log(spec.abs_tol) - 4.0 + u_max).min(u_max - 1e-9);
    let range = u_max - u_min;
    let panels = spec.panels.max((2.0 * range) as usize + 1);
    Ok(quadrature::gauss_panels(
        &|u: f64| {
            let t = exp(u);
            t * exp(-p * t) * f.eval(t)
        },
        u_min,
        u_max,
        panels,
        spec.nodes_per_panel,
    ))
}

/// Truncated Mellin transform integral_0^T t^(s-1) f(t) dt for s in (0, 1),
/// computed on a logarithmic grid (t = e^u). The log grid handles both the
/// t -> 0 endpoint (exponential decay at rate s in u) and slowly decaying
/// integrands such as Mittag-Leffler tails, which are far outside the reach
/// of fixed panels in t.
pub fn mellin(f: &TimeFunction, s: f64, spec: &QuadratureSpec) -> Result<f64, TransformError> {
    assert!(s > 0.0 && s < 1.0, "mellin supports the strip 0 < s < 1");
    spec.validate().map_err(TransformError::Quadrature)?;
    let u_max = log(f.t_max.min(spec.tail_cutoff));
    // below u_min the integrand contributes less than ~abs_tol
    let u_min = ((log(spec.abs_tol * s) - 4.0) / s).max(-700.0).min(u_max - 1e-9);
    let range = u_max - u_min;
    let max_panels = 1_000_000 / spec.nodes_per_panel.max(1);
    let panels = (spec.panels.max((2.0 * range) as usize + 1)).min(max_panels);
    let (xs, ws) = quadrature::gauss_legendre_nodes(spec.nodes_per_panel);
    let h = range / panels as f64;
    let mut contributions = alloc::vec::Vec::with_capacity(panels);
    let mut total = 0.0;
    for p in 0..panels {
        let mid = u_min + h * (p as f64 + 0.5);
        let mut c = 0.0;
        for (x, w) in xs.iter().zip(ws.iter()) {
            let u = mid + 0.5 * h * x;
            let t = exp(u);
            c += w * exp(s * u) * f.eval(t);
        }
        c *= 0.5 * h;
        contributions.push(c);
        total += c;
    }
    // divergence heuristic: the sum is dominated by an endpoint panel and
    // has grown past any plausible transform value
    if panels >= 4 && fabs(total) > 1e8 {
        let left_growing =
            fabs(contributions[0]) > fabs(contributions[1]) && fabs(contributions[1]) > fabs(contributions[2]);
        let n = panels - 1;
        let right_growing =
            fabs(contributions[n]) > fabs(contributions[n - 1]) && fabs(contributions[n - 1]) > fabs(contributions[n - 2]);
        if left_growing || right_growing {
            return Err(TransformError::DivergentStrip);
        }
    }
    Ok(total)
}

/// Riemann-Liouville fractional integral
/// (I^a f)(t) = 1/Gamma(a) integral_0^t (t-tau)^(a-1) f(tau) dtau,
/// with the endpoint singularity removed exactly by tau = t - w^(1/a):
/// (I^a f)(t) = 1/(a Gamma(a)) integral_0^(t^a) f(t - w^(1/a)) dw.
pub fn riemann_liouville(
    f: &TimeFunction,
    alpha: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64, TransformError> {
    assert!(alpha > 0.0 && alpha <= 1.0);
    assert!(t > 0.0);
    let inv_alpha = 1.0 / alpha;
    let upper = pow(t, alpha);
    let v = quadrature::integrate_interval(
        |w| f.eval((t - pow(w, inv_alpha)).max(0.0)),
        0.0,
        upper,
        spec,
    )?;
    Ok(v / (alpha * gamma(alpha)))
}

/// Max deviation over p_grid of |u~_a(p) - p^(a-1) u~(p^a)| (Lemma 1).
pub fn check_lemma1(
    u: &TimeFunction,
    u_alpha: &TimeFunction,
    alpha: f64,
    p_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, TransformError> {
    assert!(alpha > 0.0 && alpha <= 1.0);
    let mut worst = 0.0_f64;
    for &p in p_grid {
        let lhs = laplace(u_alpha, p, spec)?;
        let rhs = pow(p, alpha - 1.0) * laplace(u, pow(p, alpha), spec)?;
        worst = worst.max(fabs(lhs - rhs));
    }
    Ok(worst)
}

/// Default Mellin check grid {a/4, a/2, 3a/4}: inside (0,1) and with
/// s/a < 1 for every point.
pub fn default_s_grid(alpha: f64) -> [f64; 3] {
    [0.25 * alpha, 0.5 * alpha, 0.75 * alpha]
}

/// Max deviation over s_grid of
/// |u^_a(s) - (1/a) Gamma(1-s/a)/Gamma(1-s) u^(s/a)| (Lemma 2).
pub fn check_lemma2(
    u: &TimeFunction,
    u_alpha: &TimeFunction,
    alpha: f64,
    s_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, TransformError> {
    assert!(alpha > 0.0 && alpha <= 1.0);
    let mut worst = 0.0_f64;
    for &s in s_grid {
        if !(s > 0.0 && s < alpha && s < 1.0) {
            return Err(TransformError::DivergentStrip);
        }
        // the u_a side can decay as slowly as t^(s-a-1) in the integrand;
        // push the cutoff far enough out that the discarded tail is ~1e-9
        let cutoff = exp((30.0 / (alpha - s)).min(600.0)).min(u_alpha.t_max);
        let lhs = mellin(u_alpha, s, &spec.with_cutoff(cutoff))?;
        let rhs = gamma(1.0 - s / alpha) / gamma(1.0 - s) / alpha * mellin(u, s / alpha, spec)?;
        worst = worst.max(fabs(lhs - rhs));
    }
    Ok(worst)
}
