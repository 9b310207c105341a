//! Acceptance suite: one test (and one printed pass/fail line) per release
//! criterion. Tolerances are pinned here, not read from configuration, so a
//! green run of this target is the release gate. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use fracevo_core::blackscholes::{
    bs_price, frac_bs_price, frac_bs_residual, payoff, to_transformed, OptionSpec,
    TransformedCoords,
};
use fracevo_core::diffusion::{
    frac_heat_kernel, frac_kernel_mellin_closed, frac_kernel_mellin_numeric, heat_kernel,
    mass_check, KernelQuery,
};
use fracevo_core::math::{erfc, norm_cdf, SQRT_PI};
use fracevo_core::quadrature::integrate_interval;
use fracevo_core::specialfn::{density_cutoff, ml_density, ml_standard};
use fracevo_core::subordination::{subordinate, Form, SubordinationRequest};
use fracevo_core::transforms::{check_lemma1, check_lemma2, default_s_grid, TimeFunction};
use fracevo_core::{QuadratureSpec, SeriesConfig};

const TOL_NORMALIZATION: f64 = 1e-8;
const TOL_LAPLACE: f64 = 1e-8;
const TOL_HALF_DENSITY: f64 = 1e-10;
const TOL_HALF_ML: f64 = 1e-9;
const TOL_ORACLE: f64 = 1e-7;
const TOL_LEMMA1: f64 = 1e-6;
const TOL_LEMMA2: f64 = 1e-5;
const TOL_MELLIN_REL: f64 = 1e-4;
const TOL_MASS: f64 = 1e-6;
const TOL_BS_PARAM: f64 = 1e-10;
const TOL_BS_RESIDUAL_FRAC: f64 = 1e-3;
const TOL_BS_RESIDUAL_CLASSICAL: f64 = 1e-5;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn cfg() -> SeriesConfig {
    SeriesConfig::default()
}

/// Prints the criterion line and fails the test when the observed deviation
/// exceeds the pinned tolerance.
fn report(criterion: &str, observed: f64, tol: f64) {
    let ok = observed <= tol;
    println!(
        "criterion {criterion}: {} (max deviation {observed:.3e}, tolerance {tol:.1e})",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion}: {observed:.6e} > {tol:.1e}");
}

/// Criterion 1: Density normalization: int_0^Zmax f_a = 1 within 1e-8.
#[test]
fn criterion_01_density_normalization() {
    let mut worst = 0.0_f64;
    for &alpha in &[0.3, 0.5, 0.7, 0.9] {
        let z_max = density_cutoff(alpha);
        let mass = integrate_interval(
            |z| ml_density(alpha, z, &cfg()).value,
            0.0,
            z_max,
            &quad(),
        )
        .unwrap();
        worst = worst.max((mass - 1.0).abs());
    }
    report("01 density normalization", worst, TOL_NORMALIZATION);
}

/// Criterion 2: Laplace property: int e^{-pz} f_a(z) dz = E_a(-p) within 1e-8 on the
/// 12-point (alpha, p) grid.
#[test]
fn criterion_02_laplace_property() {
    let mut worst = 0.0_f64;
    for &alpha in &[0.3, 0.5, 0.7] {
        let z_max = density_cutoff(alpha);
        for &p in &[0.5, 1.0, 2.0, 5.0] {
            let lhs = integrate_interval(
                |z| (-p * z).exp() * ml_density(alpha, z, &cfg()).value,
                0.0,
                z_max,
                &quad(),
            )
            .unwrap();
            let rhs = ml_standard(alpha, p, &cfg()).value;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    report("02 Laplace property", worst, TOL_LAPLACE);
}

/// Criterion 3: Half-order closed forms against an independent erfc oracle.
#[test]
fn criterion_03_half_order_closed_forms() {
    let mut worst_density = 0.0_f64;
    for i in 0..=60 {
        let z = 0.1 * i as f64;
        let want = (-z * z / 4.0).exp() / SQRT_PI;
        worst_density = worst_density.max((ml_density(0.5, z, &cfg()).value - want).abs());
    }
    report(
        "03a f_(1/2) closed form",
        worst_density,
        TOL_HALF_DENSITY,
    );
    let mut worst_ml = 0.0_f64;
    for i in 0..=40 {
        let z = 0.1 * i as f64;
        let want = (z * z).exp() * erfc(z);
        worst_ml = worst_ml.max((ml_standard(0.5, z, &cfg()).value - want).abs());
    }
    report("03b E_(1/2) closed form", worst_ml, TOL_HALF_ML);
}

/// Criterion 4: Theorem 1 end to end: subordinating e^{-lambda t} must reproduce
/// E_a(-lambda t^a) on the 36-point (lambda, alpha, t) grid.
#[test]
fn criterion_04_scalar_evolution_oracle() {
    let mut worst = 0.0_f64;
    for &lambda in &[0.5, 1.0, 2.0] {
        let u = TimeFunction::new("exp decay", f64::MAX, move |t| (-lambda * t).exp());
        for &alpha in &[0.3, 0.5, 0.7, 0.9] {
            for &t in &[0.25, 1.0, 4.0] {
                let got = subordinate(&SubordinationRequest {
                    solution: &u,
                    alpha,
                    t,
                    quad: quad(),
                    form: Form::ScaledSolution,
                })
                .unwrap()
                .value;
                let want = ml_standard(alpha, lambda * t.powf(alpha), &cfg()).value;
                worst = worst.max((got - want).abs());
            }
        }
    }
    report("04 scalar evolution oracle", worst, TOL_ORACLE);
}

fn scalar_pair(alpha: f64) -> (TimeFunction, TimeFunction) {
    let u = TimeFunction::new("exp decay", f64::MAX, |t| (-t).exp());
    let u_alpha = TimeFunction::new("ML decay", f64::MAX, move |t| {
        ml_standard(alpha, t.powf(alpha), &SeriesConfig::default()).value
    });
    (u, u_alpha)
}

/// Criterion 5: Lemma 1: u~_a(p) = p^(a-1) u~(p^a) for the scalar pair.
#[test]
fn criterion_05_lemma1() {
    let mut worst = 0.0_f64;
    for &alpha in &[0.5, 0.7] {
        let (u, u_alpha) = scalar_pair(alpha);
        worst = worst.max(check_lemma1(&u, &u_alpha, alpha, &[1.0, 2.0], &quad()).unwrap());
    }
    report("05 Lemma 1 (Laplace)", worst, TOL_LEMMA1);
}

/// Criterion 6: Lemma 2: u^_a(s) = (1/a) Gamma(1-s/a)/Gamma(1-s) u^(s/a) on the
/// default s-grid.
#[test]
fn criterion_06_lemma2() {
    let mut worst = 0.0_f64;
    for &alpha in &[0.5, 0.7] {
        let (u, u_alpha) = scalar_pair(alpha);
        let s_grid = default_s_grid(alpha);
        worst = worst.max(check_lemma2(&u, &u_alpha, alpha, &s_grid, &quad()).unwrap());
    }
    report("06 Lemma 2 (Mellin)", worst, TOL_LEMMA2);
}

/// Criterion 7: Fractional diffusion: numerical Mellin transform of the subordinated
/// 1-D kernel vs the closed form, 1e-4 relative, over the in-strip part of
/// the (alpha, r, s) grid.
#[test]
fn criterion_07_diffusion_mellin_cross_check() {
    let mut worst = 0.0_f64;
    for &alpha in &[0.5, 0.7] {
        for &r in &[0.5, 1.0, 2.0] {
            for &s in &[0.1, 0.2, 0.3] {
                if s >= 0.5 * alpha {
                    continue; // outside the convergence strip for n = 1
                }
                let closed = frac_kernel_mellin_closed(r, s, 1, alpha).unwrap();
                let numeric = frac_kernel_mellin_numeric(r, s, 1, alpha, &quad()).unwrap();
                worst = worst.max((numeric / closed - 1.0).abs());
            }
        }
    }
    report("07 Mellin cross-check (relative)", worst, TOL_MELLIN_REL);
}

/// Criterion 8: Mass conservation of the 1-D fractional kernel.
#[test]
fn criterion_08_mass_conservation() {
    let mut worst = 0.0_f64;
    for &t in &[1.0, 2.0] {
        for &alpha in &[0.5, 0.7] {
            let mass = mass_check(t, 1, alpha, &quad()).unwrap();
            worst = worst.max((mass - 1.0).abs());
        }
    }
    report("08 mass conservation", worst, TOL_MASS);
}

/// Textbook Black-Scholes call in (S, E, r, sigma, T - t), the independent
/// oracle for the parameterization check.
fn bs_reference(s: f64, e: f64, r: f64, sigma: f64, ttm: f64) -> f64 {
    let sv = sigma * ttm.sqrt();
    let d1 = ((s / e).ln() + (r + 0.5 * sigma * sigma) * ttm) / sv;
    let d2 = d1 - sv;
    s * norm_cdf(d1) - e * (-r * ttm).exp() * norm_cdf(d2)
}

/// Criterion 9: Parameterization consistency on the 27-point (sigma, r, T - t) grid.
#[test]
fn criterion_09_bs_parameterization() {
    let mut worst = 0.0_f64;
    for &sigma in &[0.1, 0.2, 0.4] {
        for &r in &[0.0, 0.02, 0.08] {
            for &ttm in &[0.25, 1.0, 2.0] {
                let o = OptionSpec {
                    spot: 105.0,
                    strike: 100.0,
                    rate: r,
                    sigma,
                    expiry: ttm,
                };
                let c = to_transformed(&o, 0.0);
                let got = bs_price(105.0, 100.0, &c);
                worst = worst.max((got - bs_reference(105.0, 100.0, r, sigma, ttm)).abs());
            }
        }
    }
    report("09 BS parameterization", worst, TOL_BS_PARAM);
}

/// Criterion 10: Fractional BS integral-equation residual: fractional case at
/// alpha = 0.5 and the classical-PDE degenerate case at alpha = 1.
#[test]
fn criterion_10_bs_residual() {
    let taus = [0.05, 0.1];
    let frac = frac_bs_residual(120.0, 100.0, 0.5, &taus, 1.0, &quad()).unwrap();
    report(
        "10a fractional BS residual",
        frac.max_residual,
        TOL_BS_RESIDUAL_FRAC,
    );
    let classical = frac_bs_residual(120.0, 100.0, 1.0, &taus, 1.0, &quad()).unwrap();
    report(
        "10b classical BS residual",
        classical.max_residual,
        TOL_BS_RESIDUAL_CLASSICAL,
    );
}

/// Criterion 11: Dirac branch: alpha = 1 subordination is bit-exact across modules.
#[test]
fn criterion_11_dirac_branch() {
    let u = TimeFunction::new("exp decay", f64::MAX, |t| (-t).exp());
    let mut exact = true;
    for &t in &[0.25, 1.0, 2.0] {
        let got = subordinate(&SubordinationRequest {
            solution: &u,
            alpha: 1.0,
            t,
            quad: quad(),
            form: Form::ScaledSolution,
        })
        .unwrap()
        .value;
        exact &= got == (-t).exp();
    }
    for &(r, t) in &[(0.5, 1.0), (1.0, 2.0)] {
        let q = KernelQuery {
            r,
            t,
            n: 1,
            alpha: 1.0,
        };
        exact &= frac_heat_kernel(&q, &quad()).unwrap().value == heat_kernel(&q);
    }
    let coords = TransformedCoords {
        tau: 0.02,
        lambda0: 1.0,
    };
    exact &= frac_bs_price(100.0, 90.0, 1.0, 0.02, 1.0, &quad()).unwrap().value
        == bs_price(100.0, 90.0, &coords);
    // payoff consistency sanity: the tau = 0 classical price is the payoff
    exact &= bs_price(100.0, 90.0, &TransformedCoords { tau: 0.0, lambda0: 1.0 })
        == payoff(100.0, 90.0);
    let observed = if exact { 0.0 } else { 1.0 };
    report("11 Dirac branch bit-exact", observed, 0.0);
}
