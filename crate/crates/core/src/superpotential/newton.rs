use num_complex::Complex64;

/// Damped Newton iteration: steps are capped at `max_step` in the max norm,
/// then halved until the merit `|F|²` decreases.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Convergence when `max |F_k| ≤ tol`.
    pub tol: f64,
    pub max_halvings: usize,
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            tol: 1e-12,
            max_halvings: 60,
            max_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn merit(f: &[Complex64]) -> f64 {
    f.iter().map(|v| v.norm_sqr()).sum()
}

fn max_abs(f: &[Complex64]) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Solves `J x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut j: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| j[x][k].norm().total_cmp(&j[y][k].norm()))?;
        if j[p][k].norm() == 0.0 || !j[p][k].is_finite() {
            return None;
        }
        j.swap(p, k);
        b.swap(p, k);
        for i in k + 1..n {
            let f = j[i][k] / j[k][k];
            if f.norm() == 0.0 {
                continue;
            }
            for c in k..n {
                let v = j[k][c];
                j[i][c] -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|c| j[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / j[k][k];
    }
    Some(x)
}

pub fn newton_solve(
    f: impl Fn(&[Complex64]) -> Vec<Complex64>,
    jac: impl Fn(&[Complex64]) -> Vec<Vec<Complex64>>,
    x0: Vec<Complex64>,
    opts: &NewtonOptions,
) -> NewtonResult {
    let mut x = x0;
    let mut fx = f(&x);
    for it in 0..opts.max_iter {
        if max_abs(&fx) <= opts.tol {
            return NewtonResult {
                residual: max_abs(&fx),
                x,
                iterations: it,
                converged: true,
            };
        }
        let rhs: Vec<Complex64> = fx.iter().map(|v| -v).collect();
        let Some(step) = solve_linear(jac(&x), rhs) else {
            break;
        };
        let m0 = merit(&fx);
        let len = max_abs(&step);
        let mut t = if len > opts.max_step { opts.max_step / len } else { 1.0 };
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex64> = x.iter().zip(&step).map(|(a, d)| a + d * t).collect();
            let ft = f(&trial);
            let mt = merit(&ft);
            if mt.is_finite() && mt < m0 {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nx, nf)) => {
                x = nx;
                fx = nf;
            }
            None => break,
        }
    }
    let residual = max_abs(&fx);
    NewtonResult {
        converged: residual <= opts.tol,
        residual,
        iterations: opts.max_iter,
        x,
    }
}
