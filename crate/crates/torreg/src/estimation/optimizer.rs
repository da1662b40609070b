//! Bounded quasi-Newton minimizer for the six-dimensional loss surface:
//! limited-memory BFGS curvature updates with box projection and a
//! backtracking Armijo line search, falling back to a Nelder–Mead simplex for
//! the remainder of a start after the line search fails twice.

use std::collections::VecDeque;

const MEMORY: usize = 8;
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const CURVATURE_EPS: f64 = 1e-12;

pub(crate) type Point = [f64; 6];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimized {
    pub x: Point,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &Point, alpha: f64, d: &Point) -> Point {
    let mut out = *x;
    for i in 0..6 {
        out[i] += alpha * d[i];
    }
    out
}

pub(crate) fn central_gradient<F: Fn(&Point) -> f64>(f: &F, x: &Point, h: f64) -> Point {
    let mut g = [0.0; 6];
    for i in 0..6 {
        let mut xp = *x;
        xp[i] += h;
        let mut xm = *x;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}

fn two_loop(memory: &VecDeque<(Point, Point, f64)>, g: &Point) -> Point {
    let mut q = *g;
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let alpha = rho * dot(s, &q);
        for i in 0..6 {
            q[i] -= alpha * y[i];
        }
        alphas.push(alpha);
    }
    // initial Hessian scaling from the newest pair
    if let Some((s, y, _)) = memory.back() {
        let yy = dot(y, y);
        if yy > 0.0 {
            let gamma = dot(s, y) / yy;
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
    }
    for ((s, y, rho), alpha) in memory.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for i in 0..6 {
            q[i] += (alpha - beta) * s[i];
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimizes `objective` from `x0`. `sanitize` projects a candidate point
/// back into the feasible region (box clamp plus the unit-modulus guard band)
/// and is applied to every iterate before evaluation. Convergence is declared
/// when an accepted step improves the objective by less than `tol`.
pub(crate) fn minimize<F, S>(
    objective: &F,
    sanitize: &S,
    x0: Point,
    grad_step: f64,
    tol: f64,
    max_iters: usize,
) -> Minimized
where
    F: Fn(&Point) -> f64,
    S: Fn(&mut Point),
{
    let mut x = x0;
    sanitize(&mut x);
    let mut f = objective(&x);
    if !f.is_finite() {
        return Minimized {
            x,
            value: f,
            iterations: 0,
            converged: false,
        };
    }
    let mut g = central_gradient(objective, &x, grad_step);
    let mut memory: VecDeque<(Point, Point, f64)> = VecDeque::with_capacity(MEMORY);
    let mut failures = 0usize;
    let mut iterations = 0usize;

    while iterations < max_iters {
        iterations += 1;
        let mut d = two_loop(&memory, &g);
        let mut slope = dot(&d, &g);
        if !(slope < 0.0) {
            d = g.map(|gi| -gi);
            slope = dot(&d, &g);
            if !(slope < 0.0) {
                // flat gradient: nothing visible to first order
                return Minimized {
                    x,
                    value: f,
                    iterations,
                    converged: true,
                };
            }
        }

        let mut alpha = 1.0;
        let mut accepted: Option<(Point, f64)> = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut candidate = axpy(&x, alpha, &d);
            sanitize(&mut candidate);
            let fc = objective(&candidate);
            if fc.is_finite() && fc <= f + ARMIJO_C * alpha * slope {
                accepted = Some((candidate, fc));
                break;
            }
            alpha *= 0.5;
        }

        match accepted {
            None => {
                failures += 1;
                if failures >= 2 {
                    let budget = (max_iters - iterations).max(20) * 4;
                    let nm = nelder_mead(objective, sanitize, x, f, tol, budget);
                    return Minimized {
                        x: nm.x,
                        value: nm.value,
                        iterations: iterations + nm.iterations,
                        converged: nm.converged,
                    };
                }
                memory.clear();
            }
            Some((xn, fn_)) => {
                let gn = central_gradient(objective, &xn, grad_step);
                let mut s = [0.0; 6];
                let mut y = [0.0; 6];
                for i in 0..6 {
                    s[i] = xn[i] - x[i];
                    y[i] = gn[i] - g[i];
                }
                let sy = dot(&s, &y);
                if sy > CURVATURE_EPS * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    if memory.len() == MEMORY {
                        memory.pop_front();
                    }
                    memory.push_back((s, y, 1.0 / sy));
                }
                let improvement = f - fn_;
                x = xn;
                f = fn_;
                g = gn;
                if improvement < tol {
                    return Minimized {
                        x,
                        value: f,
                        iterations,
                        converged: true,
                    };
                }
            }
        }
    }

    Minimized {
        x,
        value: f,
        iterations,
        converged: false,
    }
}

/// Derivative-free fallback: standard Nelder–Mead with sanitized vertices.
/// The budget is counted in function evaluations.
fn nelder_mead<F, S>(
    objective: &F,
    sanitize: &S,
    x0: Point,
    f0: f64,
    tol: f64,
    max_evals: usize,
) -> Minimized
where
    F: Fn(&Point) -> f64,
    S: Fn(&mut Point),
{
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &mut Point| {
        sanitize(x);
        evals.set(evals.get() + 1);
        objective(x)
    };

    let mut simplex: Vec<(Point, f64)> = Vec::with_capacity(7);
    simplex.push((x0, f0));
    for i in 0..6 {
        let mut v = x0;
        let step = if v[i].abs() > 1.0 { 0.25 * v[i].abs() } else { 0.25 };
        v[i] += step;
        let mut v = v;
        let fv = eval(&mut v);
        // a clamped vertex can collapse onto x0; try the other side
        if v == x0 {
            v[i] -= 2.0 * step;
            let fv2 = eval(&mut v);
            simplex.push((v, fv2));
        } else {
            simplex.push((v, fv));
        }
    }

    while evals.get() < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[6].1;
        if (worst - best).abs() < tol {
            return Minimized {
                x: simplex[0].0,
                value: simplex[0].1,
                iterations: evals.get(),
                converged: true,
            };
        }

        let mut centroid = [0.0; 6];
        for (v, _) in simplex.iter().take(6) {
            for i in 0..6 {
                centroid[i] += v[i] / 6.0;
            }
        }
        let xw = simplex[6].0;
        let reflect = |c: f64| {
            let mut p = [0.0; 6];
            for i in 0..6 {
                p[i] = centroid[i] + c * (centroid[i] - xw[i]);
            }
            p
        };

        let mut xr = reflect(1.0);
        let fr = eval(&mut xr);
        if fr < simplex[0].1 {
            let mut xe = reflect(2.0);
            let fe = eval(&mut xe);
            simplex[6] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[5].1 {
            simplex[6] = (xr, fr);
        } else {
            let mut xc = reflect(-0.5);
            let fc = eval(&mut xc);
            if fc < simplex[6].1 {
                simplex[6] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let xb = simplex[0].0;
                for item in simplex.iter_mut().skip(1) {
                    let mut v = [0.0; 6];
                    for i in 0..6 {
                        v[i] = xb[i] + 0.5 * (item.0[i] - xb[i]);
                    }
                    let fv = eval(&mut v);
                    *item = (v, fv);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    Minimized {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations: evals.get(),
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clamp_box(lo: f64, hi: f64) -> impl Fn(&mut Point) {
        move |x: &mut Point| {
            for xi in x.iter_mut() {
                *xi = xi.clamp(lo, hi);
            }
        }
    }

    #[test]
    fn minimizes_a_quadratic() {
        let f = |x: &Point| x.iter().map(|v| v * v).sum::<f64>();
        let m = minimize(&f, &clamp_box(-50.0, 50.0), [3.0, -4.0, 1.0, 0.5, -2.0, 9.0], 1e-6, 1e-12, 200);
        assert!(m.value < 1e-10, "value {}", m.value);
        assert!(m.converged);
    }

    #[test]
    fn respects_box_constraints() {
        // unconstrained minimum at (-3, ..., -3), box keeps it at -1
        let f = |x: &Point| x.iter().map(|v| (v + 3.0) * (v + 3.0)).sum::<f64>();
        let m = minimize(&f, &clamp_box(-1.0, 1.0), [0.9; 6], 1e-6, 1e-12, 300);
        for v in m.x {
            assert!((v + 1.0).abs() < 1e-6, "coordinate {v}");
        }
    }

    #[test]
    fn handles_a_rosenbrock_style_valley() {
        let f = |x: &Point| {
            let mut v = 0.0;
            for i in 0..5 {
                v += 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2);
            }
            v
        };
        let m = minimize(&f, &clamp_box(-10.0, 10.0), [-1.2, 1.0, -1.2, 1.0, -1.2, 1.0], 1e-7, 1e-14, 3000);
        assert!(m.value < 1e-5, "value {}", m.value);
    }
}
