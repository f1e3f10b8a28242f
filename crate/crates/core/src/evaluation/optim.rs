//! Derivative-free minimization (Nelder-Mead simplex).

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the simplex's function values agree to this absolute spread.
    pub f_tol: f64,
    /// ...and its vertices agree to this per-coordinate spread.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            f_tol: 1e-24,
            x_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` from `x0`, with initial simplex edges `steps`.
    pub fn minimize<F>(&self, f: F, x0: &[f64], steps: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = x0.len();
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for k in 0..n {
            let mut x = x0.to_vec();
            x[k] += steps[k];
            let v = eval(&x);
            simplex.push((x, v));
        }
        let mut evals = n + 1;
        let mut converged = false;

        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_spread = simplex[n].1 - simplex[0].1;
            let x_spread = (0..n)
                .map(|k| {
                    simplex
                        .iter()
                        .map(|(x, _)| (x[k] - simplex[0].0[k]).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if f_spread <= self.f_tol || x_spread <= self.x_tol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };

            let xr = along(-1.0);
            let fr = eval(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + 0.5 * (v - b))
                    .collect();
                let v = eval(&x);
                *vertex = (x, v);
            }
            evals += n;
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, f) = simplex.swap_remove(0);
        Minimum {
            x,
            f,
            evals,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(f, &[-1.2, 1.0], &[0.5, 0.5]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }
}
