//! Gradient-flow and multistart behaviour at `eps = 0.05` on the default box,
//! plus the small-`eps` trends of the two ansatz fields.

use lcwall::energy::energy_identity_residual_unforced;
use lcwall::solver::MultistartOptions;
use lcwall::verify::{grid_for, wall_integrals};
use lcwall::walls::{angular_variation, extract_zero_set_with, ZeroSetOptions};
use lcwall::{
    energy_identity_residual, energy_renormalized, gradient_flow_run, minimize_multistart,
    thomas_fermi_ansatz, wall_ansatz, ModelConfig,
};

fn rho() -> f64 {
    2f64.ln().sqrt()
}

fn config(eps: f64, a: f64) -> ModelConfig {
    ModelConfig::gaussian(eps, a).with_grid(grid_for(eps, 2.5).unwrap())
}

fn candidate_energy(result: &lcwall::SolveResult, label: &str) -> f64 {
    result
        .candidates
        .iter()
        .find(|c| c.label == label)
        .unwrap_or_else(|| panic!("no candidate {label}"))
        .energy
}

#[test]
fn positive_branch_is_radial() {
    let c = config(0.05, 0.0);
    let run = gradient_flow_run(&thomas_fermi_ansatz(&c, 1.0).unwrap(), &c).unwrap();
    assert!(run.converged, "residual {}", run.residual);
    assert!(run.field.values.iter().all(|&v| v >= 0.0));
    assert!(run.field.get(c.grid.nx / 2, c.grid.ny / 2) > 0.5);
    let spread = angular_variation(&run.field, &[0.2, 0.4, 0.6, 0.8]).unwrap();
    assert!(spread < 1e-3, "{spread}");
}

#[test]
fn wall_branch_keeps_its_wall_on_the_axis() {
    let c = config(0.05, 2.0);
    let run = gradient_flow_run(&wall_ansatz(&c).unwrap(), &c).unwrap();
    assert!(run.converged, "residual {}", run.residual);
    let z = extract_zero_set_with(&run.field, &ZeroSetOptions::SOLVER_OUTPUT);
    assert!(!z.is_empty());
    let worst = z.vertices().map(|p| p[0].abs()).fold(0.0, f64::max);
    assert!(worst < 5.0 * c.epsilon, "{worst}");
}

#[test]
fn unforced_minimizer_is_a_signed_pair() {
    let c = config(0.05, 0.0);
    let best = minimize_multistart(&c).unwrap();
    assert!(best.converged);
    assert!(best.initializer_label.ends_with("TF"), "{}", best.initializer_label);
    let (plus, minus) = (candidate_energy(&best, "+TF"), candidate_energy(&best, "-TF"));
    assert!((plus - minus).abs() < 1e-10, "{plus} vs {minus}");
    assert!(extract_zero_set_with(&best.field, &ZeroSetOptions::SOLVER_OUTPUT).is_empty());

    let identity = energy_identity_residual(&best.field, &c).unwrap();
    assert!(identity < 1e-3, "{identity}");
    assert_eq!(identity, energy_identity_residual_unforced(&best.field, &c).unwrap());
    let ansatz = energy_identity_residual(&thomas_fermi_ansatz(&c, 1.0).unwrap(), &c).unwrap();
    assert!(ansatz > 1e-2, "{ansatz}");
}

#[test]
fn strong_forcing_prefers_the_wall() {
    let c = config(0.05, 2.0);
    let best = minimize_multistart(&c).unwrap();
    assert!(best.converged);
    // the positive start does not survive: it flows into the same wall state
    let plus = candidate_energy(&best, "+TF");
    assert!((plus - best.energy.total).abs() < 1e-10, "{:#?}", best.candidates);
    let positive = lcwall::energy_total(&thomas_fermi_ansatz(&c, 1.0).unwrap(), &c).unwrap().total;
    assert!(best.energy.total < positive, "{} vs {positive}", best.energy.total);
    let z = extract_zero_set_with(&best.field, &ZeroSetOptions::SOLVER_OUTPUT);
    let worst = z.vertices().map(|p| p[0].abs()).fold(0.0, f64::max);
    assert!(!z.is_empty() && worst < 5.0 * c.epsilon, "{worst}");
    let identity = energy_identity_residual(&best.field, &c).unwrap();
    assert!(identity < 1e-3, "{identity}");
}

#[test]
fn weak_forcing_keeps_zeros_off_the_inner_disc() {
    let c = config(0.05, 0.5);
    let best = minimize_multistart(&c).unwrap();
    assert!(best.converged);
    let inner = 0.8 * rho();
    let z = extract_zero_set_with(&best.field, &ZeroSetOptions::SOLVER_OUTPUT);
    for p in z.vertices() {
        assert!(p[0].hypot(p[1]) >= inner, "zero at {p:?}");
    }
}

#[test]
fn multistart_is_reproducible() {
    let c = config(0.1, 1.0);
    let options = MultistartOptions {
        parallel: false,
        ..MultistartOptions::default()
    };
    let one = lcwall::solver::minimize_multistart_with(&c, &options).unwrap();
    let two = minimize_multistart(&c).unwrap();
    assert_eq!(one.field.values, two.field.values);
    assert_eq!(one.candidates, two.candidates);
}

#[test]
fn thomas_fermi_renormalized_energy_decreases_with_eps() {
    let values: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| {
            let c = config(eps, 0.0);
            energy_renormalized(&thomas_fermi_ansatz(&c, 1.0).unwrap(), &c).unwrap()
        })
        .collect();
    assert!(values.iter().all(|&v| v > 0.0), "{values:?}");
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
    // leading order pi |mu_1| rho / 6 |eps ln eps| with mu_1 = -rho
    for (&v, eps) in values.iter().zip([0.1f64, 0.05, 0.025]) {
        let lead = std::f64::consts::PI * rho() * rho() / 6.0 * (eps * eps.ln()).abs();
        assert!(v < 3.0 * lead, "eps={eps}: {v} vs {lead}");
    }
}

/// `(2 sqrt2 / 3) int_{-rho}^{rho} mu(0, x2)^(3/2) dx2` by composite Simpson.
fn wall_line_tension() -> f64 {
    let rho = rho();
    let n = 20_000;
    let h = 2.0 * rho / n as f64;
    let g = |x2: f64| (-0.5 + (-x2 * x2).exp()).max(0.0).powf(1.5);
    let mut s = g(-rho) + g(rho);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(-rho + k as f64 * h);
    }
    2.0 * std::f64::consts::SQRT_2 / 3.0 * s * h / 3.0
}

#[test]
fn wall_ansatz_energy_approaches_line_tension() {
    let limit = wall_line_tension();
    let (from_library, _) = wall_integrals(&config(0.05, 0.0)).unwrap();
    assert!((from_library - limit).abs() < 1e-8, "{from_library} vs {limit}");
    let gaps: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| {
            let c = config(eps, 0.0);
            (energy_renormalized(&wall_ansatz(&c).unwrap(), &c).unwrap() - limit).abs()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}
