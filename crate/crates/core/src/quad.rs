//! One-dimensional quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Most panels [`adaptive_integral`] will hold before it stops refining.
pub const MAX_PANELS: usize = 20_000;

/// Simpson panel sampled at its ends, quarter points and midpoint.
struct Panel {
    a: f64,
    b: f64,
    /// `f` at `a`, `a + h/4`, `a + h/2`, `a + 3h/4`, `b`.
    samples: [f64; 5],
    value: f64,
    error: f64,
}

impl Panel {
    fn new(a: f64, b: f64, samples: [f64; 5]) -> Self {
        let [fa, fl, fm, fr, fb] = samples;
        let h = b - a;
        let coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        let fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let delta = fine - coarse;
        Self {
            a,
            b,
            samples,
            value: fine + delta / 15.0,
            error: delta.abs() / 15.0,
        }
    }

    fn split(&self, f: &impl Fn(f64) -> f64) -> (Panel, Panel) {
        let [fa, fl, fm, fr, fb] = self.samples;
        let m = 0.5 * (self.a + self.b);
        let q = 0.25 * (self.b - self.a);
        let left = Panel::new(self.a, m, [fa, f(self.a + 0.5 * q), fl, f(self.a + 1.5 * q), fm]);
        let right = Panel::new(m, self.b, [fm, f(m + 0.5 * q), fr, f(m + 1.5 * q), fb]);
        (left, right)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Splits the panel with the largest Richardson error estimate until the
/// summed estimate is below `max(rel_tol * |value|, abs_tol)`. Refinement also
/// stops once the worst panel is at rounding level or [`MAX_PANELS`] is
/// reached, so a noisy integrand returns its best estimate instead of
/// running away.
pub fn adaptive_integral(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // several panels up front: a single coarse estimate can be lucky
    let n0 = 16;
    let step = (b - a) / n0 as f64;
    let nodes: Vec<f64> = (0..=4 * n0)
        .map(|k| if k == 4 * n0 { f(b) } else { f(a + 0.25 * step * k as f64) })
        .collect();
    let mut heap: BinaryHeap<Panel> = (0..n0)
        .map(|k| {
            let lo = a + step * k as f64;
            let hi = if k + 1 == n0 { b } else { lo + step };
            let s = &nodes[4 * k..4 * k + 5];
            Panel::new(lo, hi, [s[0], s[1], s[2], s[3], s[4]])
        })
        .collect();
    let totals = |heap: &BinaryHeap<Panel>| -> (f64, f64) {
        heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    loop {
        if error <= (rel_tol * value.abs()).max(abs_tol) {
            // running sums drift; confirm before accepting
            (value, error) = totals(&heap);
            if error <= (rel_tol * value.abs()).max(abs_tol) {
                return value;
            }
        }
        if heap.len() >= MAX_PANELS {
            return totals(&heap).0;
        }
        let worst = heap.pop().expect("heap is never empty");
        let noise = 64.0 * f64::EPSILON * value.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (worst.a + worst.b);
        if worst.error <= noise / heap.len().max(1) as f64 || m <= worst.a || m >= worst.b {
            heap.push(worst);
            return totals(&heap).0;
        }
        let (left, right) = worst.split(f);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Integral of `f` on `[a, b]` when `f` behaves like `sqrt(t - a)` near `a`.
///
/// Substitutes `t = a + tau^2`, which turns the square-root endpoint into a
/// smooth one, then applies [`adaptive_integral`].
pub fn integrate_sqrt_left(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let top = (b - a).sqrt();
    let g = |tau: f64| 2.0 * tau * f(a + tau * tau);
    adaptive_integral(&g, 0.0, top, rel_tol, 1e-300)
}

/// Same as [`integrate_sqrt_left`] for a square-root endpoint at `b`.
pub fn integrate_sqrt_right(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let top = (b - a).sqrt();
    let g = |tau: f64| 2.0 * tau * f(b - tau * tau);
    adaptive_integral(&g, 0.0, top, rel_tol, 1e-300)
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
