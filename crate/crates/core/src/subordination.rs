//! The subordination operator: produce the fractional-order solution
//! `u_a(t)` from a known classical solution `u(t)` by integrating against
//! the Mittag-Leffler density:
//!
//! ```text
//! u_a(t) = integral_0^inf f_a(z) u(t^a z) dz                     (form A)
//!        = t^-a integral_0^inf f_a(t^-a z) u(z) dz               (form B)
//! ```
//!
//! Form A samples the density on a grid independent of t, so the density
//! table is built once per (alpha, quad) and reused across a whole time
//! grid; form B is retained for the equivalence check.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{fabs, pow};

use crate::quadrature::{gauss_legendre_nodes, QuadratureError, QuadratureSpec};
use crate::specialfn::{density_cutoff, ml_density, SeriesConfig};
use crate::transforms::TimeFunction;

/// Which of the two equivalent integral forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    ScaledSolution, // form A: density grid fixed, solution argument scaled
    ScaledDensity, // form B: solution grid fixed, density argument scaled
}

pub struct SubordinationRequest<'a> {
    pub solution: &'a TimeFunction,
    pub alpha: f64,
    pub t: f64,
    pub quad: QuadratureSpec,
    pub form: Form,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubordinationResult {
    pub value: f64,
    /// Integral of f_a over the truncated z-range, from the same node set;
    /// the cheapest online diagnostic of quadrature health.
    pub density_mass_used: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubordinationError {
    /// alpha outside (0, 1].
    InvalidAlpha,
    /// The integral needs the solution beyond its declared domain.
    RangeExceeded { needed: f64, t_max: f64 },
    Quadrature(QuadratureError),
}

impl From<QuadratureError> for SubordinationError {
    fn from(e: QuadratureError) -> Self {
        SubordinationError::Quadrature(e)
    }
}

impl core::fmt::Display for SubordinationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SubordinationError::InvalidAlpha => write!(f, "alpha must lie in (0, 1]"),
            SubordinationError::RangeExceeded { needed, t_max } => write!(
                f,
                "subordination needs the solution up to t = {needed:e}, beyond its domain t_max = {t_max:e}"
            ),
            SubordinationError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

/// Reusable subordination operator at fixed (alpha, quad): holds the density
/// sampled at the quadrature nodes so that a whole time grid or a kernel
/// slice costs one table build.
pub struct Subordinator {
    alpha: f64,
    /// z nodes on [0, z_cut] (empty in the alpha = 1 Dirac branch).
    z_nodes: Vec<f64>,
    /// Quadrature weight times density value at each node.
    wf: Vec<f64>,
    z_cut: f64,
    mass: f64,
    warnings: Vec<String>,
}

impl Subordinator {
    pub fn new(alpha: f64, quad: &QuadratureSpec) -> Result<Self, SubordinationError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(SubordinationError::InvalidAlpha);
        }
        quad.validate()?;
        if alpha == 1.0 {
            // f_1 = delta(z - 1): no quadrature at all
            return Ok(Self {
                alpha,
                z_nodes: Vec::new(),
                wf: Vec::new(),
                z_cut: 1.0,
                mass: 1.0,
                warnings: Vec::new(),
            });
        }
        let mut warnings = Vec::new();
        let mut panels = quad.panels;
        if alpha > 0.95 {
            // the density concentrates near z = 1 as alpha -> 1; refine
            panels *= 2;
            warnings.push(String::from(
                "alpha > 0.95: density nearly singular at z = 1; panel count doubled",
            ));
        }
        let z_cut = density_cutoff(alpha);
        let cfg = SeriesConfig::default();
        let (xs, ws) = gauss_legendre_nodes(quad.nodes_per_panel);
        // integrate in y = sqrt(z): clusters nodes near z = 0, where Green's
        // function kernels carry integrable z^(-1/2)-type singularities that
        // plain panels in z would resolve poorly
        let y_cut = libm::sqrt(z_cut);
        let h = y_cut / panels as f64;
        let n = panels * quad.nodes_per_panel;
        let mut z_nodes = Vec::with_capacity(n);
        let mut wf = Vec::with_capacity(n);
        let mut mass = 0.0;
        for p in 0..panels {
            let mid = h * (p as f64 + 0.5);
            for (x, w) in xs.iter().zip(ws.iter()) {
                let y = mid + 0.5 * h * x;
                let z = y * y;
                let f = ml_density(alpha, z, &cfg).value;
                let wfv = 0.5 * h * w * 2.0 * y * f;
                z_nodes.push(z);
                wf.push(wfv);
                mass += wfv;
            }
        }
        if fabs(mass - 1.0) > 1e-3 {
            warnings.push(String::from(
                "density mass over the truncated range deviates from 1 by more than 1e-3",
            ));
        }
        Ok(Self {
            alpha,
            z_nodes,
            wf,
            z_cut,
            mass,
            warnings,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn density_mass(&self) -> f64 {
        self.mass
    }

    /// u_a(t) for a solution given as a plain closure with declared domain
    /// (0, t_max].
    pub fn apply<F: Fn(f64) -> f64>(
        &self,
        u: F,
        t_max: f64,
        t: f64,
    ) -> Result<SubordinationResult, SubordinationError> {
        assert!(t >= 0.0);
        if t == 0.0 {
            // continuity: u_a(0) = u(0) since f_a has unit mass
            return Ok(SubordinationResult {
                value: u(0.0),
                density_mass_used: 1.0,
                warnings: self.warnings.clone(),
            });
        }
        if self.alpha == 1.0 {
            if t > t_max {
                return Err(SubordinationError::RangeExceeded { needed: t, t_max });
            }
            return Ok(SubordinationResult {
                value: u(t),
                density_mass_used: 1.0,
                warnings: Vec::new(),
            });
        }
        let ta = pow(t, self.alpha);
        let needed = ta * self.z_cut;
        if needed > t_max {
            return Err(SubordinationError::RangeExceeded { needed, t_max });
        }
        let mut value = 0.0;
        for (z, wf) in self.z_nodes.iter().zip(self.wf.iter()) {
            value += wf * u(ta * z);
        }
        Ok(SubordinationResult {
            value,
            density_mass_used: self.mass,
            warnings: self.warnings.clone(),
        })
    }

    /// Form B: t^-a integral f_a(t^-a z) u(z) dz over z in [0, t^a z_cut].
    /// Evaluates the density afresh at every node; only used for the
    /// form-equivalence check.
    fn apply_scaled_density<F: Fn(f64) -> f64>(
        &self,
        u: F,
        t_max: f64,
        t: f64,
        quad: &QuadratureSpec,
    ) -> Result<SubordinationResult, SubordinationError> {
        assert!(t > 0.0);
        let ta = pow(t, self.alpha);
        let needed = ta * self.z_cut;
        if needed > t_max {
            return Err(SubordinationError::RangeExceeded { needed, t_max });
        }
        let cfg = SeriesConfig::default();
        let (xs, ws) = gauss_legendre_nodes(quad.nodes_per_panel);
        let mut panels = quad.panels;
        if self.alpha > 0.95 {
            panels *= 2;
        }
        let h = needed / panels as f64;
        let mut value = 0.0;
        let mut mass = 0.0;
        for p in 0..panels {
            let mid = h * (p as f64 + 0.5);
            for (x, w) in xs.iter().zip(ws.iter()) {
                let z = mid + 0.5 * h * x;
                let f = ml_density(self.alpha, z / ta, &cfg).value / ta;
                value += 0.5 * h * w * f * u(z);
                mass += 0.5 * h * w * f;
            }
        }
        let mut warnings = self.warnings.clone();
        if fabs(mass - 1.0) > 1e-3 && warnings.is_empty() {
            warnings.push(String::from(
                "density mass over the truncated range deviates from 1 by more than 1e-3",
            ));
        }
        Ok(SubordinationResult {
            value,
            density_mass_used: mass,
            warnings,
        })
    }
}

/// Theorem 1 at a single time point.
pub fn subordinate(req: &SubordinationRequest) -> Result<SubordinationResult, SubordinationError> {
    let sub = Subordinator::new(req.alpha, &req.quad)?;
    let u = req.solution;
    match req.form {
        Form::ScaledSolution => sub.apply(|t| u.eval(t), u.t_max, req.t),
        Form::ScaledDensity => {
            if req.alpha == 1.0 || req.t == 0.0 {
                sub.apply(|t| u.eval(t), u.t_max, req.t)
            } else {
                sub.apply_scaled_density(|t| u.eval(t), u.t_max, req.t, &req.quad)
            }
        }
    }
}

/// Batch form over a time grid; the density table is built once. Errors are
/// collected per element, not fail-fast.
pub fn subordinate_grid(
    solution: &TimeFunction,
    alpha: f64,
    t_grid: &[f64],
    quad: &QuadratureSpec,
) -> Vec<Result<SubordinationResult, SubordinationError>> {
    let sub = match Subordinator::new(alpha, quad) {
        Ok(s) => s,
        Err(e) => return t_grid.iter().map(|_| Err(e)).collect(),
    };
    t_grid
        .iter()
        .map(|&t| sub.apply(|x| solution.eval(x), solution.t_max, t))
        .collect()
}

/// Green's-function mode: G_a(y; t) = t^-a integral f_a(t^-a z) G(y; z) dz,
/// returned as a function of y. Each evaluation is a subordinate call with
/// the time-curried kernel; the density table is shared across all y.
pub fn subordinate_kernel<K>(
    kernel: K,
    alpha: f64,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<impl Fn(f64) -> Result<SubordinationResult, SubordinationError>, SubordinationError>
where
    K: Fn(f64, f64) -> f64,
{
    if !(t > 0.0) {
        return Err(SubordinationError::RangeExceeded {
            needed: 0.0,
            t_max: 0.0,
        });
    }
    let sub = Subordinator::new(alpha, quad)?;
    Ok(move |y: f64| sub.apply(|z| kernel(y, z), f64::INFINITY, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::ml_standard;
    use libm::exp;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn req(u: &TimeFunction, alpha: f64, t: f64) -> SubordinationRequest<'_> {
        SubordinationRequest {
            solution: u,
            alpha,
            t,
            quad: quad(),
            form: Form::default(),
        }
    }

    fn exp_decay(lambda: f64) -> TimeFunction {
        TimeFunction::new("exp(-lambda t)", f64::MAX, move |t| exp(-lambda * t))
    }

    #[test]
    fn dirac_branch_is_exact() {
        let u = exp_decay(1.0);
        let r = subordinate(&req(&u, 1.0, 3.0)).unwrap();
        assert_eq!(r.value, exp(-3.0));
        assert_eq!(r.density_mass_used, 1.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn constant_solution_normalization() {
        let u = TimeFunction::new("1", f64::MAX, |_| 1.0);
        let r = subordinate(&req(&u, 0.5, 2.0)).unwrap();
        assert!(fabs(r.value - 1.0) < 1e-8, "{}", r.value);
        assert!(fabs(r.density_mass_used - 1.0) < 1e-8);
    }

    #[test]
    fn scalar_evolution_oracle() {
        // subordinate(e^-lambda t) = E_a(-lambda t^a)
        let cfg = SeriesConfig::default();
        for &lambda in &[0.5, 1.0, 2.0] {
            for &alpha in &[0.3, 0.5, 0.7, 0.9] {
                let sub = Subordinator::new(alpha, &quad()).unwrap();
                for &t in &[0.25, 1.0, 4.0] {
                    let got = sub
                        .apply(|x| exp(-lambda * x), f64::MAX, t)
                        .unwrap()
                        .value;
                    let want = ml_standard(alpha, lambda * pow(t, alpha), &cfg).value;
                    assert!(
                        fabs(got - want) < 1e-7,
                        "lambda={lambda} alpha={alpha} t={t}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn half_alpha_known_value() {
        let u = exp_decay(1.0);
        let r = subordinate(&req(&u, 0.5, 1.0)).unwrap();
        assert!(fabs(r.value - 0.42758357615580700) < 1e-8, "{}", r.value);
    }

    #[test]
    fn form_equivalence() {
        let u = exp_decay(1.0);
        for &alpha in &[0.3, 0.5, 0.8] {
            for &t in &[0.5, 1.0, 2.0] {
                let mut ra = req(&u, alpha, t);
                ra.form = Form::ScaledSolution;
                let mut rb = req(&u, alpha, t);
                rb.form = Form::ScaledDensity;
                let a = subordinate(&ra).unwrap().value;
                let b = subordinate(&rb).unwrap().value;
                assert!(fabs(a - b) < 2e-10, "alpha={alpha} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let u = exp_decay(1.0);
        let grid = [0.5, 1.0, 2.0];
        let rs = subordinate_grid(&u, 0.7, &grid, &quad());
        for (t, r) in grid.iter().zip(rs.iter()) {
            let single = subordinate(&req(&u, 0.7, *t)).unwrap();
            assert_eq!(r.as_ref().unwrap().value, single.value);
        }
        let rs1 = subordinate_grid(&u, 1.0, &[1.0, 2.0], &quad());
        assert_eq!(rs1[0].as_ref().unwrap().value, exp(-1.0));
        assert_eq!(rs1[1].as_ref().unwrap().value, exp(-2.0));
    }

    #[test]
    fn linearity_and_boundedness() {
        let sub = Subordinator::new(0.5, &quad()).unwrap();
        let t = 1.5;
        let a = sub.apply(|x| exp(-x), f64::MAX, t).unwrap().value;
        let b = sub.apply(|x| 1.0 / (1.0 + x), f64::MAX, t).unwrap().value;
        let combo = sub
            .apply(|x| 2.0 * exp(-x) + 3.0 / (1.0 + x), f64::MAX, t)
            .unwrap();
        assert!(fabs(combo.value - (2.0 * a + 3.0 * b)) < 2e-10);
        // 0 <= u <= 1 everywhere
        assert!(b >= 0.0 && b <= combo.density_mass_used + 1e-10);
    }

    #[test]
    fn t_zero_by_continuity() {
        let u = exp_decay(2.0);
        let r = subordinate(&req(&u, 0.5, 0.0)).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn range_exceeded() {
        let u = TimeFunction::new("short", 1.0, |_| 1.0);
        let e = subordinate(&req(&u, 0.5, 4.0)).unwrap_err();
        assert!(matches!(e, SubordinationError::RangeExceeded { .. }));
    }

    #[test]
    fn alpha_near_one_warns() {
        let sub = Subordinator::new(0.97, &quad()).unwrap();
        let r = sub.apply(|x| exp(-x), f64::MAX, 1.0).unwrap();
        assert!(!r.warnings.is_empty());
        // still accurate against the ML oracle
        let want = ml_standard(0.97, 1.0, &SeriesConfig::default()).value;
        assert!(fabs(r.value - want) < 1e-6, "{} vs {want}", r.value);
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(matches!(
            Subordinator::new(0.0, &quad()),
            Err(SubordinationError::InvalidAlpha)
        ));
        assert!(matches!(
            Subordinator::new(1.2, &quad()),
            Err(SubordinationError::InvalidAlpha)
        ));
    }

    #[test]
    fn kernel_mode_constant_and_dirac() {
        let g = subordinate_kernel(|_y: f64, _t: f64| 2.5, 0.5, 1.0, &quad()).unwrap();
        let r = g(0.3).unwrap();
        assert!(fabs(r.value - 2.5) < 1e-7);
        let heat = |y: f64, t: f64| exp(-y * y / (4.0 * t)) / libm::sqrt(4.0 * core::f64::consts::PI * t);
        let g1 = subordinate_kernel(heat, 1.0, 0.7, &quad()).unwrap();
        assert_eq!(g1(1.2).unwrap().value, heat(1.2, 0.7));
    }

    #[test]
    fn fractional_integral_equation_residual() {
        // u_a(t) - u(0) + lambda I^a[u_a](t) = 0 with u_a(t) = E_a(-lambda t^a)
        use crate::transforms::riemann_liouville;
        let lambda = 1.0;
        let alpha = 0.5;
        let cfg = SeriesConfig::default();
        let ua = TimeFunction::new("E_a(-t^a)", f64::MAX, move |t| {
            ml_standard(alpha, lambda * pow(t, alpha), &cfg).value
        });
        for &t in &[0.5, 1.0] {
            let ia = riemann_liouville(&ua, alpha, t, &quad()).unwrap();
            let resid = ua.eval(t) - 1.0 + lambda * ia;
            assert!(fabs(resid) < 1e-5, "t={t}: {resid}");
        }
    }
}
