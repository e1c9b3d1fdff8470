//! Reference values computed independently of the library: a plain-loop
//! reimplementation of the discrete energy, radial quadratures of the
//! continuum functionals, and Airy values frozen from mpmath at 30 digits.

#![allow(clippy::excessive_precision)]

use std::f64::consts::{PI, SQRT_2};

use lcwall::energy::energy_slice;
use lcwall::model::RadialTable;
use lcwall::painleve::{airy_ai_with_derivative, PainleveProblem};
use lcwall::thresholds::{beta_functions, threshold_slices};
use lcwall::verify::brute_force_thresholds;
use lcwall::{
    energy_total, hastings_mcleod, painleve_energy, thomas_fermi_ansatz, threshold_report, Field, GridSpec,
    ModelConfig, ThresholdMesh,
};

fn mu_gauss(r2: f64) -> f64 {
    -0.5 + (-r2).exp()
}

fn rho_gauss() -> f64 {
    2f64.ln().sqrt()
}

/// Composite Simpson with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn trap(n: usize, i: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Edge-difference gradient plus trapezoidal node sums, Gaussian `mu` and `f_1`.
fn discrete_energy(u: &Field, eps: f64, a: f64) -> f64 {
    let g = u.grid;
    let (hx, hy) = (g.hx(), g.hy());
    let mut grad_x = 0.0;
    let mut grad_y = 0.0;
    let mut nodes = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let v = u.get(i, j);
            if i + 1 < g.nx {
                grad_x += trap(g.ny, j) * (u.get(i + 1, j) - v).powi(2);
            }
            if j + 1 < g.ny {
                grad_y += trap(g.nx, i) * (u.get(i, j + 1) - v).powi(2);
            }
            let (x1, x2) = (g.x1(i), g.x2(j));
            let r2 = x1 * x1 + x2 * x2;
            let f1 = (-r2).exp() * x1;
            let dens = -mu_gauss(r2) * v * v / (2.0 * eps) + v.powi(4) / (4.0 * eps) - a * f1 * v;
            nodes += trap(g.nx, i) * trap(g.ny, j) * dens;
        }
    }
    0.5 * eps * (grad_x * hy / hx + grad_y * hx / hy) + nodes * hx * hy
}

/// Radial Thomas-Fermi energy `2 pi int r (eps/2 psi'^2 - mu psi^2/(2 eps) + psi^4/(4 eps)) dr`
/// for `a = 0`, with the linear collar on `[rho - eps^(2/3), rho]`.
fn thomas_fermi_continuum(eps: f64) -> f64 {
    let rho = rho_gauss();
    let start = rho - eps.powf(2.0 / 3.0);
    let slope = mu_gauss(start * start).sqrt() / (rho - start);
    let inner = |r: f64| {
        let m = mu_gauss(r * r);
        let dm = -2.0 * r * (-r * r).exp();
        let dpsi2 = dm * dm / (4.0 * m);
        r * (0.5 * eps * dpsi2 - m * m / (4.0 * eps))
    };
    let collar = |r: f64| {
        let m = mu_gauss(r * r);
        let p = slope * (rho - r);
        r * (0.5 * eps * slope * slope - m * p * p / (2.0 * eps) + p.powi(4) / (4.0 * eps))
    };
    2.0 * PI * (simpson(inner, 0.0, start, 20_000) + simpson(collar, start, rho, 20_000))
}

#[test]
fn thomas_fermi_energy_matches_discrete_reimplementation() {
    for (eps, a) in [(0.05, 0.0), (0.05, 1.3), (0.1, 0.7)] {
        let c = ModelConfig::gaussian(eps, a);
        let u = thomas_fermi_ansatz(&c, 1.0).unwrap();
        let lib = energy_total(&u, &c).unwrap().total;
        let oracle = discrete_energy(&u, eps, a);
        assert!(((lib - oracle) / oracle).abs() < 1e-11, "eps={eps} a={a}: {lib} vs {oracle}");
        if a == 0.0 {
            assert!(lib < 0.0);
        }
    }
}

#[test]
fn thomas_fermi_energy_converges_to_radial_integral() {
    let continuum = thomas_fermi_continuum(0.05);
    assert!((continuum - (-0.632049573909)).abs() < 1e-9, "{continuum}");
    let mut errors = Vec::new();
    for n in [251, 501, 1001] {
        let c = ModelConfig::gaussian(0.05, 0.0).with_grid(GridSpec::square(2.5, n).unwrap());
        let u = thomas_fermi_ansatz(&c, 1.0).unwrap();
        let e = energy_total(&u, &c).unwrap().total;
        errors.push(((e - continuum) / continuum).abs());
    }
    // the collar kinks limit the node rule to first order
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 2e-3, "{errors:?}");
    assert!(errors[0] / errors[2] > 3.0, "{errors:?}");
}

#[test]
fn slice_energy_matches_one_dimensional_formula() {
    let c = ModelConfig::gaussian(0.05, 0.9);
    let u = thomas_fermi_ansatz(&c, 1.0).unwrap();
    let g = c.grid;
    for j in [g.ny / 2, g.ny / 2 + 40, 10] {
        let x2 = g.x2(j);
        let h = g.hx();
        let mut grad = 0.0;
        let mut nodes = 0.0;
        for i in 0..g.nx {
            let v = u.get(i, j);
            if i + 1 < g.nx {
                grad += (u.get(i + 1, j) - v).powi(2);
            }
            let x1 = g.x1(i);
            let r2 = x1 * x1 + x2 * x2;
            let dens = -mu_gauss(r2) * v * v / (2.0 * c.epsilon) + v.powi(4) / (4.0 * c.epsilon)
                - c.a * (-r2).exp() * x1 * v;
            nodes += trap(g.nx, i) * dens;
        }
        let oracle = 0.5 * c.epsilon * grad / h + nodes * h;
        let lib = energy_slice(&u, j, &c).unwrap();
        assert!((lib - oracle).abs() < 1e-8 * oracle.abs().max(1.0), "row {j}: {lib} vs {oracle}");
    }
}

#[test]
fn renormalized_energy_of_zero_field_is_disc_integral() {
    let eps = 0.1;
    let rho2 = 2f64.ln();
    // int_0^rho (-1/2 + e^{-r^2})^2 r dr in closed form
    let radial = 0.125 * rho2 + 0.5 * ((-rho2).exp() - 1.0) - 0.25 * ((-2.0 * rho2).exp() - 1.0);
    let oracle = 2.0 * PI * radial / (4.0 * eps);
    let c = ModelConfig::gaussian(eps, 0.5);
    let e = energy_total(&Field::zeros(c.grid), &c).unwrap();
    assert_eq!(e.total, 0.0);
    assert!(((e.renormalized - oracle) / oracle).abs() < 1e-4, "{} vs {oracle}", e.renormalized);
}

#[test]
fn painleve_energy_matches_simpson_on_fine_solution() {
    let window = (-1.0, 1.0);
    let coarse = hastings_mcleod(PainleveProblem::DEFAULT_DOMAIN, PainleveProblem::DEFAULT_NODES).unwrap();
    let fine = hastings_mcleod(PainleveProblem::DEFAULT_DOMAIN, 4 * PainleveProblem::DEFAULT_NODES - 3).unwrap();
    let dy = fine.derivative_values.as_ref().expect("solver returns derivatives");
    let lo = fine.values.len() - 1;
    let h = fine.spacing();
    let index = |s: f64| ((s - fine.s_min) / h).round() as usize;
    let (k0, k1) = (index(window.0), index(window.1));
    assert!((fine.s(k0) - window.0).abs() < 1e-9 && (fine.s(k1) - window.1).abs() < 1e-9 && k1 <= lo);
    let dens = |k: usize| {
        let (s, y) = (fine.s(k), fine.values[k]);
        0.5 * dy[k] * dy[k] + 0.5 * s * y * y + 0.5 * y.powi(4)
    };
    let n = k1 - k0;
    assert_eq!(n % 2, 0);
    let mut sum = dens(k0) + dens(k1);
    for m in 1..n {
        sum += if m % 2 == 1 { 4.0 } else { 2.0 } * dens(k0 + m);
    }
    let oracle = sum * h / 3.0;
    let lib = painleve_energy(&coarse, 0.0, window).unwrap();
    assert!(lib > 0.0 && (lib - oracle).abs() < 1e-6, "{lib} vs {oracle}");
}

fn quadratic_example(forcing_scale: f64) -> ModelConfig {
    let mut c = ModelConfig::custom(
        RadialTable::from_fn(1.2, 1201, |r| 1.0 - r * r, false).unwrap(),
        RadialTable::from_fn(1.2, 1201, |r| r, true).unwrap(),
        0.05,
        0.0,
        GridSpec::square(1.1, 45).unwrap(),
    );
    c.forcing_scale = forcing_scale;
    c
}

#[test]
fn quadratic_well_thresholds_are_sqrt2() {
    let c = quadratic_example(1.0);
    let report = threshold_report(&c, &ThresholdMesh::default()).unwrap();
    assert!((report.a_star - SQRT_2).abs() < 1e-6, "{report:?}");
    assert!((report.a_star_sup - SQRT_2).abs() < 1e-6, "{report:?}");
    let (lower, upper) = brute_force_thresholds(&c, 1000, 10_000).unwrap();
    assert!(((report.a_star - lower) / lower).abs() < 1e-4, "{lower}");
    assert!(((report.a_star_sup - upper) / upper).abs() < 1e-4, "{upper}");
}

#[test]
fn doubling_the_forcing_halves_the_thresholds() {
    let mesh = ThresholdMesh::default();
    let one = threshold_report(&quadratic_example(1.0), &mesh).unwrap();
    let two = threshold_report(&quadratic_example(2.0), &mesh).unwrap();
    assert!((two.a_star - 0.5 * one.a_star).abs() < 1e-9 * one.a_star);
    assert!((two.a_star_sup - 0.5 * one.a_star_sup).abs() < 1e-9 * one.a_star_sup);
}

#[test]
fn gaussian_chords_are_symmetric_and_sqrt2() {
    let c = ModelConfig::gaussian(0.05, 0.0);
    let x2 = 0.5 * rho_gauss();
    let s = threshold_slices(&c, &[x2, -x2], &ThresholdMesh::default()).unwrap();
    for t in &s {
        assert!((t.a_lower - SQRT_2).abs() < 1e-6 && (t.a_upper - SQRT_2).abs() < 1e-6, "{t:?}");
    }
    assert!((s[0].a_lower - s[1].a_lower).abs() < 1e-12);
    assert!((s[0].a_upper - s[1].a_upper).abs() < 1e-12);
}

#[test]
fn beta_functions_vanish_at_sqrt2_for_gaussian() {
    let c = ModelConfig::gaussian(0.05, 0.0);
    let rho = rho_gauss();
    let n = 50;
    for p in 0..n {
        for q in 0..n {
            let x1 = -rho * (p as f64 + 0.5) / n as f64;
            let x2 = rho * (2.0 * (q as f64 + 0.5) / n as f64 - 1.0);
            if x1.hypot(x2) >= rho {
                continue;
            }
            let (lower, upper) = beta_functions(&c, SQRT_2, [x1, x2]).unwrap();
            assert!(lower.abs() < 1e-8 && upper.abs() < 1e-8, "({x1}, {x2}): {lower} {upper}");
            let (weak, _) = beta_functions(&c, 1.0, [x1, x2]).unwrap();
            let (strong, _) = beta_functions(&c, 2.0, [x1, x2]).unwrap();
            assert!(weak > 0.0 && strong < 0.0, "({x1}, {x2}): {weak} {strong}");
        }
    }
}

/// `(s, Ai(s), Ai'(s))` from mpmath with 30 significant digits.
const AIRY: [(f64, f64, f64); 15] = [
    (-20.0, -0.17640612707798468959, 0.8928628567364712384),
    (-12.0, -0.066555175054373129474, 1.0231104533679707299),
    (-8.0, -0.052705050356386202622, 0.93556093819830655103),
    (-5.0, 0.35076100902411431979, 0.32719281855444313679),
    (-2.0, 0.22740742820168557599, 0.61825902074169104141),
    (-1.0, 0.5355608832923521188, -0.010160567116645209395),
    (0.0, 0.35502805388781723926, -0.25881940379280679841),
    (0.5, 0.23169360648083348977, -0.22491053266468389314),
    (1.0, 0.13529241631288141552, -0.15914744129679321279),
    (2.0, 0.034924130423274379135, -0.053090384433653631704),
    (3.5, 0.0025840987869896349633, -0.005004413967952582832),
    (5.0, 0.00010834442813607441735, -0.000247413890868462476),
    (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
    (12.0, 1.393184688875360839e-13, -4.854736554985308463e-13),
    (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
];

#[test]
fn airy_matches_mpmath() {
    for (s, ai, dai) in AIRY {
        let (v, d) = airy_ai_with_derivative(s).unwrap();
        let scale = if s < 0.0 { 1.0 } else { ai.abs() };
        let dscale = if s < 0.0 { 1.0 } else { dai.abs() };
        assert!((v - ai).abs() < 1e-10 * scale, "Ai({s}) = {v}, want {ai}");
        assert!((d - dai).abs() < 1e-10 * dscale, "Ai'({s}) = {d}, want {dai}");
    }
}
