//! Zero level sets of fields and their comparison with the limiting wall sets.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::{geometry, ModelConfig};
use crate::thresholds::ThresholdReport;

/// Offset applied to exact zeros before sign tests.
const ZERO_NUDGE: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// Piecewise-linear zero set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub polylines: Vec<Polyline>,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.polylines.iter().all(|p| p.points.is_empty())
    }

    pub fn vertices(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.polylines.iter().flat_map(|p| p.points.iter().copied())
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }
}

/// Controls which cells take part in contouring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSetOptions {
    /// Cells whose four corners are all below `noise_floor * max|u|` in
    /// magnitude are skipped.
    pub noise_floor: f64,
    /// Ignore the outermost ring of nodes (the Dirichlet boundary).
    pub skip_boundary_ring: bool,
}

impl ZeroSetOptions {
    /// Plain contouring of every cell.
    pub const ALL_CELLS: Self = Self {
        noise_floor: 0.0,
        skip_boundary_ring: false,
    };

    /// Settings for gradient-flow output: the imposed boundary zeros and the
    /// round-off level far from the disc do not produce crossings.
    pub const SOLVER_OUTPUT: Self = Self {
        noise_floor: 1e-10,
        skip_boundary_ring: true,
    };
}

/// Marching-squares zero set of `u` over every cell.
pub fn extract_zero_set(u: &Field) -> ZeroSet {
    extract_zero_set_with(u, &ZeroSetOptions::ALL_CELLS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Between nodes (i, j) and (i + 1, j).
    H(usize, usize),
    /// Between nodes (i, j) and (i, j + 1).
    V(usize, usize),
}

pub fn extract_zero_set_with(u: &Field, options: &ZeroSetOptions) -> ZeroSet {
    let g = u.grid;
    let val = |i: usize, j: usize| {
        let v = u.get(i, j);
        if v == 0.0 {
            ZERO_NUDGE
        } else {
            v
        }
    };
    let floor = options.noise_floor * u.max_abs();
    let lo = usize::from(options.skip_boundary_ring);
    let (hi_i, hi_j) = (g.nx - 1 - lo, g.ny - 1 - lo);

    let mut vertex_of: HashMap<EdgeKey, usize> = HashMap::new();
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut vertex = |key: EdgeKey, vertices: &mut Vec<[f64; 2]>| -> usize {
        *vertex_of.entry(key).or_insert_with(|| {
            let ((i0, j0), (i1, j1)) = match key {
                EdgeKey::H(i, j) => ((i, j), (i + 1, j)),
                EdgeKey::V(i, j) => ((i, j), (i, j + 1)),
            };
            let (a, b) = (val(i0, j0), val(i1, j1));
            let t = a / (a - b);
            let (xa, ya) = (g.x1(i0), g.x2(j0));
            let (xb, yb) = (g.x1(i1), g.x2(j1));
            vertices.push([xa + t * (xb - xa), ya + t * (yb - ya)]);
            vertices.len() - 1
        })
    };

    for j in lo..hi_j {
        for i in lo..hi_i {
            let c = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            if floor > 0.0 && c.iter().all(|v| v.abs() <= floor) {
                continue;
            }
            let s = c.map(|v| v > 0.0);
            // edges: bottom, right, top, left
            let edges = [EdgeKey::H(i, j), EdgeKey::V(i + 1, j), EdgeKey::H(i, j + 1), EdgeKey::V(i, j)];
            let cut = [s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]];
            let n_cut = cut.iter().filter(|&&b| b).count();
            if n_cut == 2 {
                let mut it = (0..4).filter(|&e| cut[e]);
                let (e0, e1) = (it.next().unwrap(), it.next().unwrap());
                let a = vertex(edges[e0], &mut vertices);
                let b = vertex(edges[e1], &mut vertices);
                segments.push((a, b));
            } else if n_cut == 4 {
                let centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
                let pairs = if (centre > 0.0) == s[0] {
                    // corners 0 and 2 connect through the centre
                    [(0, 1), (2, 3)]
                } else {
                    [(0, 3), (1, 2)]
                };
                for (e0, e1) in pairs {
                    let a = vertex(edges[e0], &mut vertices);
                    let b = vertex(edges[e1], &mut vertices);
                    segments.push((a, b));
                }
            }
        }
    }
    ZeroSet {
        polylines: stitch(&vertices, &segments),
    }
}

/// Joins segments sharing vertices into polylines.
fn stitch(vertices: &[[f64; 2]], segments: &[(usize, usize)]) -> Vec<Polyline> {
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (s, &(a, b)) in segments.iter().enumerate() {
        adjacent[a].push(s);
        adjacent[b].push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> Option<Polyline> {
        let mut points = vec![vertices[start]];
        let mut current = start;
        loop {
            let next_seg = adjacent[current].iter().copied().find(|&s| !used[s]);
            let Some(s) = next_seg else { break };
            used[s] = true;
            let (a, b) = segments[s];
            current = if a == current { b } else { a };
            if current == start {
                return Some(Polyline { points, closed: true });
            }
            points.push(vertices[current]);
        }
        (points.len() > 1).then_some(Polyline { points, closed: false })
    };
    // open chains start at vertices of degree one
    for v in 0..vertices.len() {
        if adjacent[v].len() == 1 && !used[adjacent[v][0]] {
            if let Some(p) = walk(v, &mut used) {
                lines.push(p);
            }
        }
    }
    for v in 0..vertices.len() {
        if adjacent[v].iter().any(|&s| !used[s]) {
            if let Some(p) = walk(v, &mut used) {
                lines.push(p);
            }
        }
    }
    lines
}

/// Wall regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Wall on the left half of the rim `|x| = rho`.
    ShadowWall,
    /// Wall along `x1 = 0`.
    StandardWall,
    /// Amplitude between the two thresholds.
    Indeterminate,
    NoWall,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ShadowWall => "shadow_wall",
            Regime::StandardWall => "standard_wall",
            Regime::Indeterminate => "indeterminate",
            Regime::NoWall => "no_wall",
        }
    }

    /// Regime expected from the amplitude alone.
    pub fn predicted(a: f64, report: &ThresholdReport) -> Self {
        if a == 0.0 {
            Regime::NoWall
        } else if a < report.a_star {
            Regime::ShadowWall
        } else if a > report.a_star_sup {
            Regime::StandardWall
        } else {
            Regime::Indeterminate
        }
    }
}

/// Distance evaluator for a limiting wall set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PredictedSet {
    /// Inner set `{x1 <= 0, |x| = rho} u {x1 = 0, |x2| >= rho}` and the outer
    /// superset where the whole circle replaces the left half.
    Shadow { rho: f64 },
    /// The line `{x1 = 0}`.
    Standard,
}

fn distance_to_rays(p: [f64; 2], rho: f64) -> f64 {
    if p[1].abs() >= rho {
        p[0].abs()
    } else {
        p[0].hypot(p[1].abs() - rho)
    }
}

impl PredictedSet {
    /// Distance to the outer set (shadow) or the line (standard).
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            PredictedSet::Shadow { rho } => {
                let circle = (p[0].hypot(p[1]) - rho).abs();
                circle.min(distance_to_rays(p, rho))
            }
            PredictedSet::Standard => p[0].abs(),
        }
    }

    /// Distance to the inner shadow set; equals [`Self::distance`] for the line.
    pub fn inner_distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            PredictedSet::Shadow { rho } => {
                let arc = if p[0] <= 0.0 {
                    (p[0].hypot(p[1]) - rho).abs()
                } else {
                    p[0].hypot(p[1].abs() - rho)
                };
                arc.min(distance_to_rays(p, rho))
            }
            PredictedSet::Standard => p[0].abs(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PredictedSet::Shadow { rho } => format!(
                "{{|x| = {rho:.6}}} u {{x1 = 0, |x2| >= {rho:.6}}} (left half of the circle required)"
            ),
            PredictedSet::Standard => "{x1 = 0}".to_string(),
        }
    }
}

pub fn predicted_wall_set(config: &ModelConfig, regime: Regime) -> Result<PredictedSet> {
    match regime {
        Regime::ShadowWall => Ok(PredictedSet::Shadow {
            rho: geometry(config)?.rho,
        }),
        Regime::StandardWall => Ok(PredictedSet::Standard),
        Regime::Indeterminate => Err(Error::NoPrediction),
        Regime::NoWall => Err(Error::NotApplicable("no wall is predicted without forcing".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    /// `no_wall` for an empty zero set, otherwise the regime predicted by the
    /// amplitude.
    pub regime: Regime,
    /// Regime whose limiting set lies closer to the zero set.
    pub observed_regime: Regime,
    /// Largest distance from a zero-set vertex to the predicted set.
    pub deviation_to_predicted: f64,
    /// The same in units of the grid spacing.
    pub deviation_grid_units: f64,
    pub distance_to_shadow: f64,
    pub distance_to_standard: f64,
    pub tolerance: f64,
    pub deviates: bool,
    pub predicted_set_descriptor: String,
}

/// Compares the zero set with the set predicted for amplitude `a`.
/// Tolerance is `5 eps`.
pub fn wall_deviation(z: &ZeroSet, config: &ModelConfig, a: f64, report: &ThresholdReport) -> Result<RegimeVerdict> {
    let rho = geometry(config)?.rho;
    let h = config.grid.h();
    let tolerance = 5.0 * config.epsilon;
    let shadow = PredictedSet::Shadow { rho };
    let sup = |set: &PredictedSet| z.vertices().map(|p| set.distance(p)).fold(0.0, f64::max);
    let d_shadow = sup(&shadow);
    let d_standard = sup(&PredictedSet::Standard);
    let predicted = Regime::predicted(a, report);
    if z.is_empty() {
        let deviates = predicted != Regime::NoWall && predicted != Regime::Indeterminate;
        return Ok(RegimeVerdict {
            regime: Regime::NoWall,
            observed_regime: Regime::NoWall,
            deviation_to_predicted: 0.0,
            deviation_grid_units: 0.0,
            distance_to_shadow: 0.0,
            distance_to_standard: 0.0,
            tolerance,
            deviates,
            predicted_set_descriptor: "empty set".into(),
        });
    }
    let observed = if d_shadow <= d_standard {
        Regime::ShadowWall
    } else {
        Regime::StandardWall
    };
    let (deviation, descriptor) = match predicted {
        Regime::ShadowWall => (d_shadow, shadow.describe()),
        Regime::StandardWall => (d_standard, PredictedSet::Standard.describe()),
        Regime::Indeterminate => (d_shadow.min(d_standard), "no prediction between the thresholds".to_string()),
        // a zero set where none is expected: measure against nothing
        Regime::NoWall => (f64::INFINITY, "empty set".to_string()),
    };
    let deviates = match predicted {
        Regime::Indeterminate => false,
        _ => deviation > tolerance,
    };
    Ok(RegimeVerdict {
        regime: predicted,
        observed_regime: observed,
        deviation_to_predicted: deviation,
        deviation_grid_units: deviation / h,
        distance_to_shadow: d_shadow,
        distance_to_standard: d_standard,
        tolerance,
        deviates,
        predicted_set_descriptor: descriptor,
    })
}

/// How the interior limit `sqrt(mu+)` is compared with a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfComparison {
    /// `||u| - sqrt(mu+)|` on the disc.
    Unsigned,
    /// `|u - sign(x1) sqrt(mu+)|`, excluding a `10 eps` strip around `x1 = 0`.
    HalfPlane,
}

/// Sup of the distance to `sqrt(mu+)` over `|x| <= min(shrink rho, rho - eps^(2/3))`.
pub fn thomas_fermi_error(u: &Field, config: &ModelConfig, shrink: f64, mode: TfComparison) -> Result<f64> {
    u.check_grid(&config.grid)?;
    let rho = geometry(config)?.rho;
    let radius = (shrink * rho).min(rho - config.epsilon.powf(2.0 / 3.0));
    let strip = 10.0 * config.epsilon;
    let g = &u.grid;
    let mut worst: Option<f64> = None;
    for j in 0..g.ny {
        let x2 = g.x2(j);
        for i in 0..g.nx {
            let x1 = g.x1(i);
            if x1.hypot(x2) > radius {
                continue;
            }
            let target = config.mu(x1, x2)?.max(0.0).sqrt();
            let v = u.get(i, j);
            let err = match mode {
                TfComparison::Unsigned => (v.abs() - target).abs(),
                TfComparison::HalfPlane => {
                    if x1.abs() < strip {
                        continue;
                    }
                    (v - x1.signum() * target).abs()
                }
            };
            worst = Some(worst.map_or(err, |w: f64| w.max(err)));
        }
    }
    worst.ok_or_else(|| Error::EmptySet(format!("no grid node within radius {radius}")))
}

/// Sup over the annulus `r_in <= |x| <= r_out` of `|u / eps + a f_1 / mu|`.
pub fn outer_limit_check(u: &Field, config: &ModelConfig, annulus: (f64, f64)) -> Result<f64> {
    u.check_grid(&config.grid)?;
    let rho = geometry(config)?.rho;
    let (r_in, r_out) = annulus;
    if !(r_in > rho && r_out > r_in && r_out < config.grid.half_extent) {
        return Err(Error::InvalidConfig(format!(
            "annulus [{r_in}, {r_out}] must satisfy rho = {rho} < r_in < r_out < L = {}",
            config.grid.half_extent
        )));
    }
    let g = &u.grid;
    let mut worst: f64 = 0.0;
    let mut any = false;
    for j in 0..g.ny {
        let x2 = g.x2(j);
        for i in 0..g.nx {
            let x1 = g.x1(i);
            let r = x1.hypot(x2);
            if r < r_in || r > r_out {
                continue;
            }
            any = true;
            let v = u.get(i, j) / config.epsilon + config.a * config.f1(x1, x2) / config.mu(x1, x2)?;
            worst = worst.max(v.abs());
        }
    }
    if !any {
        return Err(Error::EmptySet("annulus contains no grid node".into()));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TanhFit {
    /// Abscissa of the zero crossing.
    pub crossing: f64,
    /// Half jump across `t +- 5 eps` minus the same quantity for the model profile.
    pub amplitude_error: f64,
    /// Sup over `s in [-5, 5]` of `|u(t + eps s) - sqrt(mu0) tanh(s sqrt(mu0/2))|`.
    pub profile_error: f64,
}

/// Compares the cross-section of `u` at height `x2` with the rescaled
/// heteroclinic `sqrt(mu(0, x2)) tanh(s sqrt(mu(0, x2)/2))`.
pub fn cross_section_tanh_fit(u: &Field, config: &ModelConfig, x2: f64) -> Result<TanhFit> {
    u.check_grid(&config.grid)?;
    let rho = geometry(config)?.rho;
    if x2.abs() >= rho {
        return Err(Error::OutsideRegion {
            x1: 0.0,
            x2,
            reason: format!("cross-sections are taken for |x2| < rho = {rho}"),
        });
    }
    let g = &u.grid;
    let sample = |x1: f64| {
        u.sample_bicubic(x1, x2)
            .ok_or(Error::SampleOutsideGrid { x1, x2 })
    };
    // stay clear of the boundary ring so the bicubic stencil fits
    let xs: Vec<f64> = (2..g.nx - 2).map(|i| g.x1(i)).collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = sample(x)?;
        vals.push(if v == 0.0 { ZERO_NUDGE } else { v });
    }
    let crossings: Vec<usize> = (0..vals.len() - 1)
        .filter(|&k| (vals[k] > 0.0) != (vals[k + 1] > 0.0))
        .collect();
    if crossings.len() != 1 {
        return Err(Error::NotApplicable(format!(
            "row x2 = {x2} has {} sign changes, expected exactly one",
            crossings.len()
        )));
    }
    let k = crossings[0];
    let t = vals[k] / (vals[k] - vals[k + 1]);
    let crossing = xs[k] + t * (xs[k + 1] - xs[k]);
    let mu0 = config.mu(0.0, x2)?.max(0.0);
    let amp = mu0.sqrt();
    let eps = config.epsilon;
    let mut profile_error: f64 = 0.0;
    let n = 200;
    for m in 0..=n {
        let s = -5.0 + 10.0 * m as f64 / n as f64;
        let v = sample(crossing + eps * s)?;
        let model = amp * (s * (0.5 * mu0).sqrt()).tanh();
        profile_error = profile_error.max((v - model).abs());
    }
    let half_jump = 0.5 * (sample(crossing + 5.0 * eps)? - sample(crossing - 5.0 * eps)?);
    Ok(TanhFit {
        crossing,
        amplitude_error: (half_jump - amp * (5.0 * (0.5 * mu0).sqrt()).tanh()).abs(),
        profile_error,
    })
}

/// `max |u| / (sqrt(mu+) + eps^(1/3))` over the grid.
pub fn apriori_bound_check(u: &Field, config: &ModelConfig) -> Result<f64> {
    u.check_grid(&config.grid)?;
    let g = &u.grid;
    let floor = config.epsilon.powf(1.0 / 3.0);
    let mut worst: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let m = config.mu(g.x1(i), g.x2(j))?.max(0.0);
            worst = worst.max(u.get(i, j).abs() / (m.sqrt() + floor));
        }
    }
    Ok(worst)
}

/// Largest `max - min` of `u` over circles of the given radii (720 angles each).
pub fn angular_variation(u: &Field, radii: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in radii {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..720 {
            let th = 2.0 * PI * k as f64 / 720.0;
            let (x1, x2) = (r * th.cos(), r * th.sin());
            let v = u
                .sample_bicubic(x1, x2)
                .ok_or(Error::SampleOutsideGrid { x1, x2 })?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}
