//! Integration of real functions over [0, cutoff] and [a, b], serving every
//! integral in the crate: Laplace/Mellin transforms, the subordination
//! integral, and the normalization diagnostics.

use alloc::vec::Vec;
use libm::{cos, fabs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    AdaptiveSimpson,
    GaussLegendrePanels,
}

/// Node budget, tail cutoff and scheme selection for half-line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub tail_cutoff: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::GaussLegendrePanels,
            panels: 64,
            nodes_per_panel: 16,
            tail_cutoff: 40.0,
            abs_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        let ok = self.panels > 0
            && self.nodes_per_panel > 0
            && self.panels * self.nodes_per_panel <= 1_000_000
            && self.tail_cutoff > 0.0
            && self.abs_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(QuadratureError::InvalidSpec)
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.tail_cutoff = cutoff;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureError {
    InvalidSpec,
    /// Adaptive refinement ran out of its node budget before reaching abs_tol.
    ToleranceNotMet { achieved: f64 },
}

impl core::fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QuadratureError::InvalidSpec => write!(f, "invalid quadrature spec"),
            QuadratureError::ToleranceNotMet { achieved } => {
                write!(f, "adaptive quadrature node budget exhausted (error ~{achieved:e})")
            }
        }
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P'_n(x) via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / pp;
            x -= dx;
            if fabs(dx) < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integral of f over [0, spec.tail_cutoff]. The caller chooses the cutoff
/// so that the discarded tail is below abs_tol.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate()?;
    integrate_on(&f, 0.0, spec.tail_cutoff, spec)
}

/// Integral of f over [a, b].
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    spec.validate()?;
    if !(a < b) {
        return Err(QuadratureError::InvalidSpec);
    }
    integrate_on(&f, a, b, spec)
}

fn integrate_on<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    match spec.scheme {
        Scheme::GaussLegendrePanels => Ok(gauss_panels(
            f,
            a,
            b,
            spec.panels,
            spec.nodes_per_panel,
        )),
        Scheme::AdaptiveSimpson => adaptive_simpson(f, a, b, spec),
    }
}

/// Fixed-panel Gauss-Legendre; deterministic left-to-right summation.
pub fn gauss_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, nodes: usize) -> f64 {
    let (xs, ws) = gauss_legendre_nodes(nodes);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let mut s = 0.0;
        for (x, w) in xs.iter().zip(ws.iter()) {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let mut budget = (spec.panels * spec.nodes_per_panel) as isize;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    budget -= 3;
    let whole = simpson(a, b, fa, fm, fb);
    let (value, err) = simpson_recurse(f, a, b, fa, fm, fb, whole, spec.abs_tol, &mut budget, 48);
    if err <= spec.abs_tol {
        Ok(value)
    } else {
        Err(QuadratureError::ToleranceNotMet { achieved: err })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: &mut isize,
    depth: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *budget -= 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = fabs(left + right - whole) / 15.0;
    if err <= tol || depth == 0 || *budget <= 0 {
        return (left + right + (left + right - whole) / 15.0, err);
    }
    let (lv, le) = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, budget, depth - 1);
    let (rv, re) = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, budget, depth - 1);
    (lv + rv, le + re)
}
