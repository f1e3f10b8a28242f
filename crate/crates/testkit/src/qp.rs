//! Reference epsilon-SVR solver: accelerated projected gradient on the dual.
//!
//! Variables `a = [alpha; alpha*]`, objective
//! `1/2 beta^T K beta + eps * sum(a) - y^T beta` with `beta = alpha - alpha*`,
//! subject to `0 <= a <= C` and `sum(beta) = 0`. The projection onto that set
//! is found by bisection on the multiplier of the equality constraint. The
//! bias comes from the primal KKT conditions.

use ndarray::{Array2, ArrayView1};

#[derive(Debug, Clone, Copy)]
pub enum OracleKernel {
    Linear,
    Rbf(f64),
}

impl OracleKernel {
    pub fn eval(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match *self {
            OracleKernel::Linear => a.iter().zip(b.iter()).map(|(x, y)| x * y).sum(),
            OracleKernel::Rbf(g) => {
                let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
                (-g * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleSvr {
    pub kernel: OracleKernel,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub xs: Array2<f64>,
    pub beta: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub steps: usize,
}

fn standardize(x: &Array2<f64>, mean: &[f64], std: &[f64]) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if std[j] > 0.0 { (*v - mean[j]) / std[j] } else { 0.0 };
        }
    }
    out
}

/// `argmin ||a - v||` over the box intersected with `sum(a[..l]) = sum(a[l..])`.
///
/// With multiplier `lam`, `a_t = clamp(v_t - lam s_t, 0, C)`; the balance
/// `sum(a[..l]) - sum(a[l..])` is piecewise linear and non-increasing in
/// `lam`, so the root is found exactly between two sorted breakpoints.
fn project(v: &[f64], c: f64) -> Vec<f64> {
    let l = v.len() / 2;
    let balance = |lam: f64| -> f64 {
        let up: f64 = v[..l].iter().map(|x| (x - lam).clamp(0.0, c)).sum();
        let down: f64 = v[l..].iter().map(|x| (x + lam).clamp(0.0, c)).sum();
        up - down
    };
    let mut knots: Vec<f64> = v[..l]
        .iter()
        .flat_map(|&x| [x - c, x])
        .chain(v[l..].iter().flat_map(|&x| [-x, c - x]))
        .collect();
    knots.sort_by(f64::total_cmp);
    // balance(knots[0]) >= 0 >= balance(knots[last])
    let (mut lo, mut hi) = (0, knots.len() - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if balance(knots[mid]) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x0, x1) = (knots[lo], knots[hi]);
    let (b0, b1) = (balance(x0), balance(x1));
    let lam = if b0 <= 0.0 {
        x0
    } else if b0 == b1 {
        x1
    } else {
        x0 + (x1 - x0) * b0 / (b0 - b1)
    };
    (0..2 * l)
        .map(|t| if t < l { (v[t] - lam).clamp(0.0, c) } else { (v[t] + lam).clamp(0.0, c) })
        .collect()
}

pub fn solve_svr(
    x: &Array2<f64>,
    y: &[f64],
    kernel: OracleKernel,
    c: f64,
    eps: f64,
    max_steps: usize,
) -> OracleSvr {
    let (n, d) = x.dim();
    let mean: Vec<f64> = (0..d).map(|j| x.column(j).sum() / n as f64).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let ss: f64 = x.column(j).iter().map(|v| (v - mean[j]).powi(2)).sum();
            if n > 1 {
                (ss / (n - 1) as f64).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let xs = standardize(x, &mean, &std);
    let k = Array2::from_shape_fn((n, n), |(i, j)| kernel.eval(xs.row(i), xs.row(j)));

    let kbeta = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| k[[i, j]] * (a[j] - a[j + n])).sum())
            .collect()
    };
    let grad = |a: &[f64]| -> Vec<f64> {
        let kb = kbeta(a);
        (0..2 * n)
            .map(|t| if t < n { kb[t] + eps - y[t] } else { -kb[t - n] + eps + y[t - n] })
            .collect()
    };
    let objective = |a: &[f64]| -> f64 {
        let kb = kbeta(a);
        let quad: f64 = (0..n).map(|i| (a[i] - a[i + n]) * kb[i]).sum();
        let lin: f64 = (0..n).map(|i| eps * (a[i] + a[i + n]) - y[i] * (a[i] - a[i + n])).sum();
        0.5 * quad + lin
    };
    // Gershgorin bound on the largest eigenvalue of [[K, -K], [-K, K]]
    let lips = 2.0 * (0..n).map(|i| k.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lips.max(1e-12);

    let mut a = vec![0.0; 2 * n];
    let mut prev = a.clone();
    let mut f_prev = objective(&a);
    let mut momentum = 1.0f64;
    let mut steps = 0;
    let mut accepted = 0usize;
    while steps < max_steps {
        steps += 1;
        let next_m = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let w = (momentum - 1.0) / next_m;
        let z: Vec<f64> = a.iter().zip(&prev).map(|(x, p)| x + w * (x - p)).collect();
        let g = grad(&z);
        let cand = project(&z.iter().zip(&g).map(|(v, g)| v - step * g).collect::<Vec<_>>(), c);
        let f_cand = objective(&cand);
        if w > 0.0 && f_cand > f_prev {
            // adaptive restart; a plain step (w = 0) is monotone up to rounding
            momentum = 1.0;
            prev = a.clone();
            continue;
        }
        prev = std::mem::replace(&mut a, cand);
        f_prev = f_cand;
        momentum = next_m;
        accepted += 1;
        if accepted % 16 == 0 {
            // gradient mapping: zero exactly at a minimizer
            let g = grad(&a);
            let moved = project(&a.iter().zip(&g).map(|(v, g)| v - step * g).collect::<Vec<_>>(), c);
            let residual = moved.iter().zip(&a).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / step;
            if residual <= 1e-11 {
                break;
            }
        }
    }

    let beta: Vec<f64> = (0..n).map(|i| a[i] - a[i + n]).collect();
    let kb = kbeta(&a);
    let tol = 1e-9 * c.max(1.0);
    let mut free = Vec::new();
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        let up = y[i] - eps - kb[i];
        let down = y[i] + eps - kb[i];
        let (al, st) = (a[i], a[i + n]);
        if al > tol && al < c - tol {
            free.push(up);
        } else if al <= tol {
            lower = lower.max(up);
        } else {
            upper = upper.min(up);
        }
        if st > tol && st < c - tol {
            free.push(down);
        } else if st <= tol {
            upper = upper.min(down);
        } else {
            lower = lower.max(down);
        }
    }
    let bias = if free.is_empty() {
        0.5 * (lower + upper)
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    OracleSvr {
        kernel,
        mean,
        std,
        xs,
        beta,
        bias,
        objective: f_prev,
        steps,
    }
}

impl OracleSvr {
    pub fn predict(&self, x: &Array2<f64>) -> Vec<f64> {
        let xs = standardize(x, &self.mean, &self.std);
        xs.rows()
            .into_iter()
            .map(|r| {
                self.beta
                    .iter()
                    .zip(self.xs.rows())
                    .map(|(b, sv)| b * self.kernel.eval(sv, r))
                    .sum::<f64>()
                    + self.bias
            })
            .collect()
    }

    /// `w = sum beta_i x_i` in standardized space.
    pub fn linear_weights(&self) -> Vec<f64> {
        let d = self.xs.ncols();
        (0..d)
            .map(|j| self.beta.iter().zip(self.xs.rows()).map(|(b, r)| b * r[j]).sum())
            .collect()
    }
}
