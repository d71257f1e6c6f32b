//! Derivative-free simplex minimisation followed by a damped Newton polish
//! on finite-difference derivatives.

/// Outcome of a minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex search with the standard coefficients.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Tolerance on the spread of function values, relative to `1 + |f_best|`.
    pub f_tol: f64,
    /// Tolerance on the simplex diameter (max-norm).
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iter: 5000, f_tol: 1e-12, x_tol: 1e-8 }
    }
}

impl NelderMead {
    /// Minimises `f` from `x0`, building the initial simplex with one
    /// coordinate step per dimension. Infeasible points should return `+inf`.
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64], step: &[f64]) -> Minimum {
        let dim = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        for i in 0..dim {
            let mut v = x0.to_vec();
            v[i] += step[i];
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            // Stable sort keeps ties in insertion order, so the path is deterministic.
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let best = values[0];
            let worst = values[dim];
            let diameter = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if best.is_finite()
                && (worst - best).abs() <= self.f_tol * (1.0 + best.abs())
                && diameter <= self.x_tol
            {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[dim])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = along(1.0);
            let fr = f(&reflected);
            if fr < values[0] {
                let expanded = along(2.0);
                let fe = f(&expanded);
                if fe < fr {
                    simplex[dim] = expanded;
                    values[dim] = fe;
                } else {
                    simplex[dim] = reflected;
                    values[dim] = fr;
                }
                continue;
            }
            if fr < values[dim - 1] {
                simplex[dim] = reflected;
                values[dim] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[dim] {
                let c = along(0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = along(-0.5);
                let fc = f(&c);
                (c, fc)
            };
            if fc < values[dim].min(fr) {
                simplex[dim] = contracted;
                values[dim] = fc;
                continue;
            }
            // shrink towards the best vertex
            for i in 1..=dim {
                let shrunk: Vec<f64> = simplex[i]
                    .iter()
                    .zip(&simplex[0])
                    .map(|(v, b)| b + 0.5 * (v - b))
                    .collect();
                values[i] = f(&shrunk);
                simplex[i] = shrunk;
            }
        }

        let best = (0..=dim)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap_or(0);
        Minimum { x: simplex[best].clone(), value: values[best], iterations, converged }
    }
}

/// Central-difference gradient and Hessian of `f` at `x` with step `h`.
fn derivatives<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = x.len();
    let f0 = f(x);
    let mut grad = vec![0.0; dim];
    let mut hess = vec![vec![0.0; dim]; dim];
    let at = |di: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in di {
            y[i] += d;
        }
        f(&y)
    };
    for i in 0..dim {
        let fp = at(&[(i, h)]);
        let fm = at(&[(i, -h)]);
        grad[i] = (fp - fm) / (2.0 * h);
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = at(&[(i, h), (j, h)]);
            let fpm = at(&[(i, h), (j, -h)]);
            let fmp = at(&[(i, -h), (j, h)]);
            let fmm = at(&[(i, -h), (j, -h)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    (grad, hess)
}

/// Solves `a x = b` for a small symmetric positive definite `a` by Cholesky.
/// Returns `None` when `a` is not positive definite.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) || !d.is_finite() {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}

/// Damped Newton refinement from `start`. Only steps that do not increase `f`
/// are accepted, so the result is never worse than the start. `converged` is
/// set when a full step shorter than `x_tol` (max-norm) is taken.
pub fn newton_polish<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &Minimum,
    h: f64,
    x_tol: f64,
    max_iter: usize,
) -> Minimum {
    let mut x = start.x.clone();
    let mut fx = start.value;
    let mut converged = false;
    let mut iterations = 0;
    if !fx.is_finite() {
        return start.clone();
    }
    while iterations < max_iter {
        iterations += 1;
        let (grad, mut hess) = derivatives(&f, &x, h);
        if grad.iter().any(|g| !g.is_finite()) || hess.iter().flatten().any(|v| !v.is_finite()) {
            break;
        }
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut damping = 0.0;
        let scale = (0..x.len()).map(|i| hess[i][i].abs()).fold(1e-12, f64::max);
        let step = loop {
            if let Some(s) = cholesky_solve(&hess, &neg) {
                break Some(s);
            }
            damping = if damping == 0.0 { 1e-8 * scale } else { damping * 10.0 };
            if damping > 1e8 * scale {
                break None;
            }
            for (i, row) in hess.iter_mut().enumerate() {
                row[i] += damping;
            }
        };
        let Some(step) = step else { break };
        let step_norm = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let fc = f(&cand);
            if fc <= fx {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no descent possible along the Newton direction at this resolution
            converged = step_norm <= x_tol.sqrt();
            break;
        }
        if t == 1.0 && damping == 0.0 && step_norm <= x_tol {
            converged = true;
            break;
        }
    }
    Minimum { x, value: fx, iterations: start.iterations + iterations, converged }
}
