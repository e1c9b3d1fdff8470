//! Acceptance checks shared by the command-line `verify` command and the
//! integration tests.
//!
//! Minimizers are computed on demand and cached per `(eps, a)`, so checks
//! that look at the same parameters reuse one multistart run.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{allen_cahn_energy, energy_total, painleve_energy, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Profile1D};
use crate::model::{geometry, validate_hypotheses, ModelConfig, RadialTable};
use crate::painleve::{
    airy_ai, boundary_layer_compare, hastings_mcleod, layer_alpha, painleve_residual, rescale_boundary_layer,
    PainleveProblem,
};
use crate::quad::integrate_sqrt_right;
use crate::solver::{gradient_flow_run, minimize_multistart_with, thomas_fermi_ansatz, wall_ansatz, MultistartOptions, SolveResult};
use crate::thresholds::{threshold_report, ThresholdMesh, ThresholdReport};
use crate::walls::{
    angular_variation, apriori_bound_check, cross_section_tanh_fit, extract_zero_set_with, outer_limit_check,
    thomas_fermi_error, wall_deviation, Regime, TfComparison, ZeroSetOptions,
};

/// Which parameter ladder the 2D checks use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Everything at `eps = 0.05`; the `eps` ladder stops there.
    Quick,
    /// The `eps` ladder down to `0.025`.
    Full,
}

impl Suite {
    pub fn target_epsilon(self) -> f64 {
        match self {
            Suite::Quick => 0.05,
            Suite::Full => 0.025,
        }
    }

    pub fn epsilon_ladder(self) -> &'static [f64] {
        match self {
            Suite::Quick => &[0.1, 0.05],
            Suite::Full => &[0.1, 0.05, 0.025],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(Error::InvalidConfig(format!("unknown suite '{other}', expected quick or full"))),
        }
    }
}

/// Amplitudes used by the regime checks.
pub const AMPLITUDES: [f64; 4] = [0.0, 0.7, 1.0, 2.1];
/// Amplitudes of the a-priori bound sweep.
pub const SWEEP_AMPLITUDES: [f64; 3] = [0.0, 0.7, 2.1];
/// Grid points are capped at this count per side.
pub const MAX_GRID: usize = 512;

/// Odd node count giving spacing at most `0.4 eps` on `[-L, L]`, capped at [`MAX_GRID`].
pub fn grid_for(epsilon: f64, half_extent: f64) -> Result<GridSpec> {
    let mut n = (2.0 * half_extent / (0.4 * epsilon)).ceil() as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    while n > MAX_GRID {
        n -= 2;
    }
    GridSpec::square(half_extent, n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Names of the checks, indexed from 1.
pub const CHECK_NAMES: [&str; 13] = [
    "threshold exactness",
    "sandwich bound",
    "energy identity",
    "renormalized energy bound",
    "regime classification",
    "Thomas-Fermi convergence",
    "outer regime",
    "tanh cross-section",
    "Hastings-McLeod",
    "boundary layer",
    "a-priori bound",
    "symmetry",
    "threshold oracle",
];

type Cached = std::result::Result<Arc<SolveResult>, String>;

fn key(epsilon: f64, a: f64) -> (u64, u64) {
    (epsilon.to_bits(), a.to_bits())
}

/// Runs acceptance checks for one base configuration. The physical
/// parameters, box size and solver tolerances come from `base`; `eps`, `a`
/// and the grid are set per check.
pub struct Verifier {
    base: ModelConfig,
    suite: Suite,
    seed: u64,
    cache: Mutex<BTreeMap<(u64, u64), Cached>>,
    custom_reports: OnceLock<std::result::Result<Vec<(String, ModelConfig, ThresholdReport)>, String>>,
    /// Receives a line whenever a minimizer finishes.
    log: Option<Box<dyn Fn(&str) + Send + Sync>>,
}

impl Verifier {
    pub fn new(base: ModelConfig, suite: Suite, seed: u64) -> Self {
        Self {
            base,
            suite,
            seed,
            cache: Mutex::new(BTreeMap::new()),
            custom_reports: OnceLock::new(),
            log: None,
        }
    }

    pub fn with_log(mut self, log: impl Fn(&str) + Send + Sync + 'static) -> Self {
        self.log = Some(Box::new(log));
        self
    }

    pub fn suite(&self) -> Suite {
        self.suite
    }

    pub fn config_for(&self, epsilon: f64, a: f64) -> Result<ModelConfig> {
        let grid = grid_for(epsilon, self.base.grid.half_extent)?;
        let config = self.base.clone().with_epsilon(epsilon).with_a(a).with_grid(grid);
        config.validate()?;
        Ok(config)
    }

    /// Multistart minimizer for `(eps, a)`, computed once.
    pub fn minimizer(&self, epsilon: f64, a: f64) -> Result<Arc<SolveResult>> {
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key(epsilon, a)) {
            return hit.clone().map_err(Error::InvalidConfig);
        }
        let config = self.config_for(epsilon, a)?;
        let options = MultistartOptions {
            seed: self.seed,
            ..MultistartOptions::default()
        };
        let start = Instant::now();
        let outcome: Cached = minimize_multistart_with(&config, &options)
            .map(Arc::new)
            .map_err(|e| format!("eps={epsilon} a={a}: {e}"));
        if let Some(log) = &self.log {
            match &outcome {
                Ok(r) => log(&format!(
                    "minimizer eps={epsilon} a={a} grid={}: {} E={:.10} steps={} ({:.1} s)",
                    config.grid.nx,
                    r.initializer_label,
                    r.energy.total,
                    r.steps_taken,
                    start.elapsed().as_secs_f64()
                )),
                Err(e) => log(&format!("minimizer failed: {e}")),
            }
        }
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key(epsilon, a), outcome.clone());
        outcome.map_err(Error::InvalidConfig)
    }

    /// Every `(eps, a)` pair the suite minimizes.
    pub fn parameter_points(&self) -> Vec<(f64, f64)> {
        let target = self.suite.target_epsilon();
        let mut points: Vec<(f64, f64)> = AMPLITUDES.iter().map(|&a| (target, a)).collect();
        for &eps in self.suite.epsilon_ladder() {
            for &a in &SWEEP_AMPLITUDES {
                if !points.contains(&(eps, a)) {
                    points.push((eps, a));
                }
            }
        }
        points
    }

    pub fn run_check(&self, id: usize) -> CheckOutcome {
        let start = Instant::now();
        let result = match id {
            1 => self.check_threshold_exactness(),
            2 => self.check_sandwich(),
            3 => self.check_energy_identity(),
            4 => self.check_renormalized_bound(),
            5 => self.check_regimes(),
            6 => self.check_thomas_fermi(),
            7 => self.check_outer(),
            8 => self.check_tanh(),
            9 => check_hastings_mcleod(self.seed),
            10 => self.check_boundary_layer(),
            11 => self.check_apriori(),
            12 => self.check_symmetry(),
            13 => self.check_threshold_oracle(),
            _ => Err(Error::InvalidConfig(format!("no check {id}"))),
        };
        let (passed, detail) = match result {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckOutcome {
            id,
            name: CHECK_NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown").to_string(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    pub fn run_all(&self) -> Vec<CheckOutcome> {
        (1..=CHECK_NAMES.len()).map(|id| self.run_check(id)).collect()
    }

    /// Threshold reports of [`custom_profiles`], computed once.
    fn custom_reports(&self) -> Result<&[(String, ModelConfig, ThresholdReport)]> {
        let cached = self.custom_reports.get_or_init(|| {
            let build = || -> Result<Vec<_>> {
                let mut out = Vec::new();
                for (name, config) in custom_profiles()? {
                    let hyp = validate_hypotheses(&config);
                    if !hyp.passed() {
                        return Err(Error::InvalidConfig(format!("{name}: {}", hyp.failures.join("; "))));
                    }
                    let report = threshold_report(&config, &ThresholdMesh::default())?;
                    out.push((name, config, report));
                }
                Ok(out)
            };
            build().map_err(|e| e.to_string())
        });
        cached.as_deref().map_err(|e| Error::InvalidConfig(e.clone()))
    }

    fn gaussian_report(&self) -> Result<ThresholdReport> {
        threshold_report(&self.base, &ThresholdMesh::default())
    }

    fn check_threshold_oracle(&self) -> Result<(bool, String)> {
        oracle_comparison(self.custom_reports()?)
    }

    fn check_threshold_exactness(&self) -> Result<(bool, String)> {
        let start = Instant::now();
        let report = self.gaussian_report()?;
        let seconds = start.elapsed().as_secs_f64();
        let sqrt2 = std::f64::consts::SQRT_2;
        let (lo, hi) = ((report.a_star - sqrt2).abs(), (report.a_star_sup - sqrt2).abs());
        Ok((
            lo < 1e-6 && hi < 1e-6 && seconds < 10.0,
            format!(
                "a_* = {:.12}, a^* = {:.12}, |a_* - sqrt2| = {lo:.2e}, |a^* - sqrt2| = {hi:.2e}, {seconds:.2} s",
                report.a_star, report.a_star_sup
            ),
        ))
    }

    fn check_sandwich(&self) -> Result<(bool, String)> {
        let mut reports = vec![("gaussian".to_string(), self.gaussian_report()?)];
        reports.extend(self.custom_reports()?.iter().map(|(name, _, r)| (name.clone(), r.clone())));
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, r) in reports {
            let (low, high) = (r.middle_bound - r.a_star, r.a_star_sup - r.middle_bound);
            ok &= low >= 0.0 && high >= 0.0;
            parts.push(format!(
                "{name}: {:.9} <= {:.9} <= {:.9} (slack {low:.2e}, {high:.2e})",
                r.a_star, r.middle_bound, r.a_star_sup
            ));
        }
        Ok((ok, parts.join("; ")))
    }

    fn check_energy_identity(&self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for (eps, a) in self.parameter_points() {
            let m = self.minimizer(eps, a)?;
            let e = &m.energy;
            let stated = (e.total + e.quartic_term).abs() / e.total.abs().max(1.0);
            let with_forcing = (e.total + e.quartic_term - 0.5 * e.forcing_term).abs() / e.total.abs().max(1.0);
            ok &= stated < 1e-3;
            parts.push(format!("eps={eps} a={a}: {stated:.2e} (with forcing term {with_forcing:.2e})"));
        }
        Ok((ok, parts.join("; ")))
    }

    fn check_renormalized_bound(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let (line, area) = wall_integrals(&self.base)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for a in SWEEP_AMPLITUDES {
            let m = self.minimizer(eps, a)?;
            let bound = (line - a * area).min(0.0) + 0.05;
            ok &= m.energy.renormalized <= bound;
            parts.push(format!("a={a}: {:.6} <= {bound:.6}", m.energy.renormalized));
        }
        Ok((ok, parts.join("; ")))
    }

    fn check_regimes(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let report = self.gaussian_report()?;
        let rho = geometry(&self.base)?.rho;
        let mut ok = true;
        let mut parts = Vec::new();
        for (a, expected) in [(0.7, Regime::ShadowWall), (2.1, Regime::StandardWall)] {
            let m = self.minimizer(eps, a)?;
            let config = self.config_for(eps, a)?;
            let z = extract_zero_set_with(&m.field, &ZeroSetOptions::SOLVER_OUTPUT);
            let v = wall_deviation(&z, &config, a, &report)?;
            let good = v.regime == expected && v.observed_regime == expected && v.deviation_to_predicted <= 5.0 * eps;
            ok &= good;
            parts.push(format!(
                "a={a}: {} (observed {}), deviation {:.4} vs 5eps = {:.4}",
                v.regime.as_str(),
                v.observed_regime.as_str(),
                v.deviation_to_predicted,
                5.0 * eps
            ));
        }
        let m = self.minimizer(eps, 0.0)?;
        let z = extract_zero_set_with(&m.field, &ZeroSetOptions::SOLVER_OUTPUT);
        let spread = angular_variation(&m.field, &[0.25 * rho, 0.5 * rho, 0.75 * rho])?;
        ok &= z.is_empty() && spread < 1e-3;
        parts.push(format!(
            "a=0: {} polylines, angular variation {spread:.2e}",
            z.polylines.len()
        ));
        Ok((ok, parts.join("; ")))
    }

    fn check_thomas_fermi(&self) -> Result<(bool, String)> {
        let mut errors = Vec::new();
        for &eps in self.suite.epsilon_ladder() {
            let m = self.minimizer(eps, 0.0)?;
            let config = self.config_for(eps, 0.0)?;
            errors.push((eps, thomas_fermi_error(&m.field, &config, 0.8, TfComparison::Unsigned)?));
        }
        let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
        let last = errors.last().map_or(f64::INFINITY, |e| e.1);
        let text = errors
            .iter()
            .map(|(eps, e)| format!("eps={eps}: {e:.5}"))
            .collect::<Vec<_>>()
            .join(", ");
        Ok((decreasing && last < 0.05, text))
    }

    fn check_outer(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let m = self.minimizer(eps, 1.0)?;
        let config = self.config_for(eps, 1.0)?;
        let rho = geometry(&config)?.rho;
        let value = outer_limit_check(&m.field, &config, (1.2 * rho, 1.5 * rho))?;
        Ok((
            value < 0.05,
            format!("max |v/eps + a f_1/mu| on [1.2 rho, 1.5 rho] = {value:.4}"),
        ))
    }

    fn check_tanh(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let m = self.minimizer(eps, 2.1)?;
        let config = self.config_for(eps, 2.1)?;
        let rho = geometry(&config)?.rho;
        let mut ok = true;
        let mut parts = Vec::new();
        for x2 in [0.0, 0.4 * rho, -0.4 * rho] {
            let fit = cross_section_tanh_fit(&m.field, &config, x2)?;
            let limit = 0.05 * config.mu(0.0, x2)?.sqrt();
            ok &= fit.profile_error < limit;
            parts.push(format!("x2={x2:.4}: {:.5} < {limit:.5}", fit.profile_error));
        }
        let aniso = m.energy.anisotropy_x2;
        ok &= aniso < 0.05;
        parts.push(format!("anisotropy {aniso:.5}"));
        Ok((ok, parts.join("; ")))
    }

    fn check_boundary_layer(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let m = self.minimizer(eps, 0.0)?;
        let config = self.config_for(eps, 0.0)?;
        let mut worst: f64 = 0.0;
        for k in 0..4 {
            let theta = 0.5 * std::f64::consts::PI * k as f64;
            let profile = rescale_boundary_layer(&m.field, &config, theta)?;
            worst = worst.max(boundary_layer_compare(&profile, layer_alpha(&config, theta)?)?);
        }
        Ok((worst < 0.1, format!("L_inf distance to +-h over 4 directions = {worst:.4}")))
    }

    fn check_apriori(&self) -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for &eps in self.suite.epsilon_ladder() {
            for a in SWEEP_AMPLITUDES {
                let m = self.minimizer(eps, a)?;
                let k = apriori_bound_check(&m.field, &self.config_for(eps, a)?)?;
                worst = worst.max(k);
                parts.push(format!("({eps}, {a}): {k:.3}"));
            }
        }
        Ok((worst <= 3.0, format!("K = {worst:.4}; {}", parts.join(", "))))
    }

    fn check_symmetry(&self) -> Result<(bool, String)> {
        let eps = self.suite.target_epsilon();
        let mut ok = true;
        let mut parts = Vec::new();
        let runs = [(0.7, "+TF"), (2.1, "wall")];
        for (a, label) in runs {
            let config = self.config_for(eps, a)?;
            let init = if label == "wall" {
                wall_ansatz(&config)?
            } else {
                thomas_fermi_ansatz(&config, 1.0)?
            };
            let run = gradient_flow_run(&init, &config)?;
            let mirror = reflection_defect(&run.field);
            let e = energy_total(&run.field, &config)?;
            let flipped = energy_total(&odd_reflection(&run.field), &config)?;
            let invariance = relative_gap(&e, &flipped);
            ok &= run.converged && mirror < 1e-12 && invariance < 1e-12;
            parts.push(format!(
                "a={a} from {label}: |v(x1,-x2) - v(x1,x2)| = {mirror:.1e}, energy change under u -> -u(-x1,x2) = {invariance:.1e}"
            ));
        }
        Ok((ok, parts.join("; ")))
    }
}

fn relative_gap(a: &EnergyBreakdown, b: &EnergyBreakdown) -> f64 {
    (a.total - b.total).abs() / a.total.abs().max(1.0)
}

/// `max |u(x1, -x2) - u(x1, x2)|`.
pub fn reflection_defect(u: &Field) -> f64 {
    let g = &u.grid;
    let mut worst: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            worst = worst.max((u.get(i, j) - u.get(i, g.ny - 1 - j)).abs());
        }
    }
    worst
}

/// `-u(-x1, x2)`.
pub fn odd_reflection(u: &Field) -> Field {
    let g = u.grid;
    let mut out = Field::zeros(g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            out.set(i, j, -u.get(g.nx - 1 - i, j));
        }
    }
    out
}

/// `((2 sqrt(2)/3) int_{-rho}^{rho} mu_rad^(3/2), int_{D(0, rho)} |f_1| sqrt(mu))`:
/// the line cost of a straight wall through the disc and the forcing gain of
/// the odd state.
pub fn wall_integrals(config: &ModelConfig) -> Result<(f64, f64)> {
    let rho = geometry(config)?.rho;
    let mu = |r: f64| config.mu_rad(r).map(|m| m.max(0.0)).unwrap_or(0.0);
    let line = 2.0 * integrate_sqrt_right(&|r| mu(r).powf(1.5), 0.0, rho, 1e-12);
    let area = 4.0 * integrate_sqrt_right(&|r| config.f_rad(r) * mu(r).sqrt() * r, 0.0, rho, 1e-12);
    Ok((2.0 * std::f64::consts::SQRT_2 / 3.0 * line, area))
}

/// Two profiles satisfying the hypotheses whose forcing is not a gradient
/// of `mu`.
pub fn custom_profiles() -> Result<Vec<(String, ModelConfig)>> {
    let grid = GridSpec::square(3.0, 101)?;
    // the box corners sit at r = 3 sqrt(2)
    let r_max = 4.5;
    let n = 4501;
    let stretched = ModelConfig::custom(
        RadialTable::from_fn(r_max, n, |r| 0.9 * (-r * r / 1.2).exp() - 0.45, false)?,
        RadialTable::from_fn(r_max, n, |r| 0.8 * r * (-r * r / 2.0).exp(), true)?,
        0.05,
        1.0,
        grid,
    );
    let rational = ModelConfig::custom(
        RadialTable::from_fn(r_max, n, |r| 0.5 - 0.6 * r * r / (1.0 + 0.2 * r * r), false)?,
        RadialTable::from_fn(r_max, n, |r| r / (1.0 + r * r).powf(1.5), true)?,
        0.05,
        1.0,
        grid,
    );
    Ok(vec![
        ("stretched gaussian".to_string(), stretched),
        ("rational".to_string(), rational),
    ])
}

/// Thresholds by exhaustive evaluation: `slices` chords at
/// `x2 = -rho cos(pi (k + 1/2) / slices)`, which crowd toward `|x2| = rho`
/// where an extremum may sit in the limit, and cumulative Simpson sums with `points` intervals per chord after the
/// substitution `x1 = -c + c tau^2`, which removes the square-root endpoint.
/// Shares nothing with the adaptive scheme except point evaluation of `mu`
/// and `f`. The lower ratio skips `tau < 0.01`: next to the rim `mu` is so
/// small that interpolation error in tabulated profiles dominates it. The
/// upper ratio skips `|x1| < 1e-4`, where `mu(0, x2) - mu(x1, x2)` is below
/// the rounding of `|x|`.
pub fn brute_force_thresholds(config: &ModelConfig, slices: usize, points: usize) -> Result<(f64, f64)> {
    let rho = geometry(config)?.rho;
    let points = points + points % 2;
    let sqrt2 = std::f64::consts::SQRT_2;
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..slices {
        let x2 = -rho * (std::f64::consts::PI * (k as f64 + 0.5) / slices as f64).cos();
        let c = (rho * rho - x2 * x2).sqrt();
        let dtau = 1.0 / points as f64;
        let x1_at = |m: usize| {
            let tau = m as f64 * dtau;
            -c + c * tau * tau
        };
        let mu_at = |x1: f64| -> Result<f64> { Ok(config.mu(x1, x2)?.max(0.0)) };
        let mut integrand = Vec::with_capacity(points + 1);
        for m in 0..=points {
            let tau = m as f64 * dtau;
            let x1 = x1_at(m);
            integrand.push(config.f1(x1, x2).abs() * mu_at(x1)?.sqrt() * 2.0 * c * tau);
        }
        // cumulative Simpson at even nodes
        let mut g = vec![0.0; points / 2 + 1];
        for p in 1..=points / 2 {
            let m = 2 * p;
            g[p] = g[p - 1] + dtau / 3.0 * (integrand[m - 2] + 4.0 * integrand[m - 1] + integrand[m]);
        }
        let total = g[points / 2];
        let mu_centre = mu_at(0.0)?;
        for (p, &gp) in g.iter().enumerate().skip(1) {
            let x1 = x1_at(2 * p);
            let mu = mu_at(x1)?;
            if 2 * p * 100 >= points && gp > 0.0 {
                lower = lower.min(sqrt2 * mu.powf(1.5) / (3.0 * gp));
            }
            let rest = total - gp;
            if x1 < -1e-4 && rest > 0.0 {
                upper = upper.max(sqrt2 * (mu_centre.powf(1.5) - mu.powf(1.5)) / (3.0 * rest));
            }
        }
    }
    Ok((lower, upper))
}

fn oracle_comparison(reports: &[(String, ModelConfig, ThresholdReport)]) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, config, r) in reports {
        let (lo, hi) = brute_force_thresholds(config, 1000, 10_000)?;
        let (dl, dh) = ((r.a_star - lo).abs() / lo.abs(), (r.a_star_sup - hi).abs() / hi.abs());
        ok &= dl < 1e-4 && dh < 1e-4;
        parts.push(format!(
            "{name}: a_* {:.8} vs {lo:.8} ({dl:.1e}), a^* {:.8} vs {hi:.8} ({dh:.1e})",
            r.a_star, r.a_star_sup
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// Perturbs `h` by `count` random bumps `amp (1 - ((s - centre)/width)^2)^2`
/// and compares the Painleve energy over each bump's support.
pub fn minimality_bump_test(h: &Profile1D, count: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..count {
        let centre: f64 = rng.gen_range(-6.0..5.0);
        let width: f64 = rng.gen_range(0.5..3.0);
        let amp = rng.gen_range(0.05..=0.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let lo = (centre - width).max(h.s_min);
        let hi = (centre + width).min(h.s_max);
        let bumped: Vec<f64> = h
            .nodes()
            .map(|(s, y)| {
                let t = (s - centre) / width;
                if t.abs() < 1.0 {
                    y + amp * (1.0 - t * t).powi(2)
                } else {
                    y
                }
            })
            .collect();
        let bumped = Profile1D::new(h.s_min, h.s_max, bumped)?;
        if painleve_energy(&bumped, 0.0, (lo, hi))? >= painleve_energy(h, 0.0, (lo, hi))? {
            passed += 1;
        }
    }
    Ok(passed)
}

fn check_hastings_mcleod(seed: u64) -> Result<(bool, String)> {
    let h = hastings_mcleod(PainleveProblem::DEFAULT_DOMAIN, PainleveProblem::DEFAULT_NODES)?;
    let residual = painleve_residual(&h, 0.0);
    let at = |s: f64| h.eval(s).ok_or(Error::AiryRange { s });
    let right = at(5.0)? / airy_ai(5.0)?;
    let left = at(-8.0)? / 2.0;
    let decreasing = h.values.windows(2).all(|w| w[1] < w[0]);
    let bumps = minimality_bump_test(&h, 20, seed)?;
    // heteroclinic line tension as a check of the 1D energy quadrature
    let eta = Profile1D::from_fn(-10.0, 10.0, 20_001, |x| (x / std::f64::consts::SQRT_2).tanh())?;
    let tension = allen_cahn_energy(&eta, (-10.0, 10.0))?;
    let ok = residual < 1e-8
        && (0.999..=1.001).contains(&right)
        && (0.99..=1.01).contains(&left)
        && decreasing
        && bumps == 20;
    Ok((
        ok,
        format!(
            "residual {residual:.1e}, h(5)/Ai(5) = {right:.6}, h(-8)/2 = {left:.6}, decreasing {decreasing}, bumps {bumps}/20, eta tension {tension:.8}"
        ),
    ))
}
