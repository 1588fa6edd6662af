//! Dense BFGS with a strong-Wolfe line search (bracketing + zoom with cubic
//! interpolation).

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when ‖∇f‖ falls below this.
    pub grad_tol: f64,
    /// Stop once f drops below this value.
    pub f_target: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iter: 2000, grad_tol: 1e-10, f_target: None, c1: 1e-4, c2: 0.9, max_line_search: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    GradientTolerance,
    TargetReached,
    MaxIterations,
    LineSearchFailed,
    Stalled,
    NonFinite,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub reason: StopReason,
}

impl BfgsResult {
    pub fn converged(&self) -> bool {
        matches!(self.reason, StopReason::GradientTolerance | StopReason::TargetReached)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Objective<'a, F> {
    f: &'a mut F,
    evals: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> Objective<'_, F> {
    fn eval(&mut self, x: &[f64], g: &mut [f64]) -> f64 {
        self.evals += 1;
        (self.f)(x, g)
    }
}

struct LinePoint {
    alpha: f64,
    f: f64,
    d: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

/// Minimizes `f`, which returns the value and writes the gradient into its
/// second argument.
pub fn minimize<F>(f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    minimize_traced(f, x0, opts, |_, _| {})
}

/// [`minimize`] that reports `(iteration, f)` at the start of every iteration.
pub fn minimize_traced<F, C>(mut f: F, x0: &[f64], opts: &BfgsOptions, mut on_iter: C) -> BfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
    C: FnMut(usize, f64),
{
    let n = x0.len();
    let mut obj = Objective { f: &mut f, evals: 0 };
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = obj.eval(&x, &mut g);
    let done = |reason, x: Vec<f64>, f, g: &[f64], it, ev| BfgsResult {
        x,
        f,
        grad_norm: norm(g),
        iterations: it,
        evaluations: ev,
        reason,
    };
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return done(StopReason::NonFinite, x, fx, &g, 0, obj.evals);
    }
    if n == 0 {
        return done(StopReason::GradientTolerance, x, fx, &g, 0, obj.evals);
    }
    // Inverse Hessian approximation, row-major.
    let mut h = identity(n);
    let mut fresh = true;
    let mut stall = 0;
    let mut ls_failures = 0;

    for it in 0..opts.max_iter {
        on_iter(it, fx);
        if opts.f_target.is_some_and(|t| fx < t) {
            return done(StopReason::TargetReached, x, fx, &g, it, obj.evals);
        }
        let gn = norm(&g);
        if gn < opts.grad_tol {
            return done(StopReason::GradientTolerance, x, fx, &g, it, obj.evals);
        }
        let mut p = matvec(&h, &g, n);
        p.iter_mut().for_each(|v| *v = -*v);
        let mut d0 = dot(&p, &g);
        if d0 >= 0.0 {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            d0 = -gn * gn;
        }
        let alpha0 = if fresh { (1.0 / gn).min(1.0) } else { 1.0 };
        let Some(pt) = line_search(&mut obj, &x, fx, d0, &p, alpha0, opts) else {
            ls_failures += 1;
            if ls_failures >= 2 || fresh {
                return done(StopReason::LineSearchFailed, x, fx, &g, it, obj.evals);
            }
            h = identity(n);
            fresh = true;
            continue;
        };
        ls_failures = 0;
        let s: Vec<f64> = p.iter().map(|v| v * pt.alpha).collect();
        let y: Vec<f64> = pt.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let decrease = fx - pt.f;
        x = pt.x;
        g = pt.g;
        fx = pt.f;
        if !fx.is_finite() {
            return done(StopReason::NonFinite, x, fx, &g, it + 1, obj.evals);
        }
        if decrease <= 1e-15 * fx.abs() {
            stall += 1;
            if stall >= 8 {
                return done(StopReason::Stalled, x, fx, &g, it + 1, obj.evals);
            }
        } else {
            stall = 0;
        }

        let sy = dot(&s, &y);
        if sy > 1e-300 && sy > 1e-12 * norm(&s) * norm(&y) {
            if fresh {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
                fresh = false;
            }
            bfgs_update(&mut h, &s, &y, sy, n);
        }
    }
    let it = opts.max_iter;
    if opts.f_target.is_some_and(|t| fx < t) {
        return done(StopReason::TargetReached, x, fx, &g, it, obj.evals);
    }
    done(StopReason::MaxIterations, x, fx, &g, it, obj.evals)
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn matvec(h: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], v)).collect()
}

/// H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ, expanded as
/// H − ρ(s (Hy)ᵀ + (Hy) sᵀ) + (ρ² yᵀHy + ρ) s sᵀ.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy = matvec(h, y, n);
    let yhy = dot(y, &hy);
    let k = rho * rho * yhy + rho;
    for i in 0..n {
        let row = &mut h[i * n..(i + 1) * n];
        for j in 0..n {
            row[j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + k * s[i] * s[j];
        }
    }
}

fn line_search<F>(
    obj: &mut Objective<'_, F>,
    x: &[f64],
    f0: f64,
    d0: f64,
    p: &[f64],
    alpha0: f64,
    opts: &BfgsOptions,
) -> Option<LinePoint>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut probe = |obj: &mut Objective<'_, F>, alpha: f64| {
        let xn: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + alpha * b).collect();
        let mut gn = vec![0.0; x.len()];
        let fv = obj.eval(&xn, &mut gn);
        let d = dot(&gn, p);
        LinePoint { alpha, f: fv, d, x: xn, g: gn }
    };
    let mut prev = LinePoint { alpha: 0.0, f: f0, d: d0, x: x.to_vec(), g: Vec::new() };
    let mut alpha = alpha0;
    for i in 0..opts.max_line_search {
        let cur = probe(obj, alpha);
        if !cur.f.is_finite() {
            // Step into overflow: shrink and retry.
            alpha = 0.5 * (prev.alpha + alpha);
            continue;
        }
        if cur.f > f0 + opts.c1 * alpha * d0 || (i > 0 && cur.f >= prev.f) {
            return zoom(obj, &mut probe, prev, cur, f0, d0, opts);
        }
        if cur.d.abs() <= -opts.c2 * d0 {
            return Some(cur);
        }
        if cur.d >= 0.0 {
            return zoom(obj, &mut probe, cur, prev, f0, d0, opts);
        }
        prev = cur;
        alpha *= 2.0;
    }
    None
}

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db), if inside the interval.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if disc < 0.0 {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    t.is_finite().then_some(t)
}

fn zoom<F, P>(
    obj: &mut Objective<'_, F>,
    probe: &mut P,
    mut lo: LinePoint,
    mut hi: LinePoint,
    f0: f64,
    d0: f64,
    opts: &BfgsOptions,
) -> Option<LinePoint>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
    P: FnMut(&mut Objective<'_, F>, f64) -> LinePoint,
{
    for _ in 0..opts.max_line_search {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= 1e-16 * b.max(1e-300) {
            break;
        }
        let mut alpha = cubic_min(lo.alpha, lo.f, lo.d, hi.alpha, hi.f, hi.d).unwrap_or(0.5 * (a + b));
        // keep the trial point away from the interval ends
        if alpha < a + 0.1 * width || alpha > b - 0.1 * width {
            alpha = 0.5 * (a + b);
        }
        let cur = probe(obj, alpha);
        if !cur.f.is_finite() || cur.f > f0 + opts.c1 * alpha * d0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.d.abs() <= -opts.c2 * d0 {
                return Some(cur);
            }
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = std::mem::replace(&mut lo, cur);
            } else {
                lo = cur;
            }
        }
    }
    // Accept the best sufficient-decrease point found, if any.
    (lo.alpha > 0.0 && lo.f < f0 && !lo.g.is_empty()).then_some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let n = x.len();
        let mut f = 0.0;
        g.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n - 1 {
            let a = x[i + 1] - x[i] * x[i];
            let b = 1.0 - x[i];
            f += 100.0 * a * a + b * b;
            g[i] += -400.0 * x[i] * a - 2.0 * b;
            g[i + 1] += 200.0 * a;
        }
        f
    }

    #[test]
    fn rosenbrock_converges() {
        let r = minimize(rosenbrock, &[-1.2, 1.0, -0.5, 0.8], &BfgsOptions { max_iter: 5000, ..Default::default() });
        assert!(r.f < 1e-18, "{r:?}");
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-8));
    }

    #[test]
    fn quadratic_exact_in_few_steps() {
        let diag = [1.0, 10.0, 100.0];
        let r = minimize(
            |x: &[f64], g: &mut [f64]| {
                let mut f = 0.0;
                for i in 0..3 {
                    f += 0.5 * diag[i] * (x[i] - 1.0).powi(2);
                    g[i] = diag[i] * (x[i] - 1.0);
                }
                f
            },
            &[0.0; 3],
            &BfgsOptions::default(),
        );
        assert!(r.converged());
        assert!(r.iterations < 30);
    }

    #[test]
    fn target_stops_early() {
        let r = minimize(
            |x: &[f64], g: &mut [f64]| {
                g[0] = 2.0 * x[0];
                x[0] * x[0]
            },
            &[3.0],
            &BfgsOptions { f_target: Some(10.0), ..Default::default() },
        );
        assert_eq!(r.reason, StopReason::TargetReached);
        assert_eq!(r.iterations, 0);
    }
}
