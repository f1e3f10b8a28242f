//! Sequential minimal optimization for the epsilon-SVR dual.
//!
//! The dual is written over `2l` variables `a = [alpha; alpha*]` with signs
//! `s = [+1; -1]`:
//!
//! ```text
//! min  1/2 a^T Q a + p^T a   s.t.  s^T a = 0,  0 <= a_t <= C
//! Q_tu = s_t s_u K(t mod l, u mod l)
//! p    = [eps - y; eps + y]
//! ```
//!
//! Each step optimizes one pair analytically. The stopping rule is the
//! maximal KKT violation `max_{I_up} -s G - min_{I_low} -s G <= tol`.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::SvrError;

const TAU: f64 = 1e-12;

/// Working-set selection rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkingSet {
    /// First-order rule: the most violating pair.
    #[default]
    MaximalViolatingPair,
    /// Most violating `i`, then the `j` with the largest second-order
    /// decrease of the objective.
    SecondOrder,
}

#[derive(Debug, Clone)]
pub(crate) struct SolverSettings {
    pub c: f64,
    pub epsilon: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub working_set: WorkingSet,
}

#[derive(Debug, Clone)]
pub(crate) struct SolverOutput {
    /// `alpha_i - alpha*_i` per training point.
    pub beta: Vec<f64>,
    pub bias: f64,
    pub violation: f64,
    pub iterations: usize,
    pub objective: f64,
}

struct State<'a> {
    /// Row-major `l x l` kernel matrix.
    k: &'a [f64],
    l: usize,
    c: f64,
    a: Vec<f64>,
    g: Vec<f64>,
}

impl State<'_> {
    fn sign(&self, t: usize) -> f64 {
        if t < self.l {
            1.0
        } else {
            -1.0
        }
    }

    fn kernel_row(&self, t: usize) -> &[f64] {
        let r = t % self.l;
        &self.k[r * self.l..(r + 1) * self.l]
    }

    fn q(&self, t: usize, u: usize) -> f64 {
        self.sign(t) * self.sign(u) * self.kernel_row(t)[u % self.l]
    }

    fn kdiag(&self, t: usize) -> f64 {
        let r = t % self.l;
        self.k[r * self.l + r]
    }

    fn in_low(&self, t: usize) -> bool {
        if t < self.l {
            self.a[t] > 0.0
        } else {
            self.a[t] < self.c
        }
    }

    /// Returns `(i, j, violation)`; `None` when a side of the working set is empty.
    fn select(&self, rule: WorkingSet) -> Option<(usize, usize, f64)> {
        let (l, c) = (self.l, self.c);
        let mut i = None;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = None;
        let mut gmin = f64::INFINITY;
        // -s_t G_t over alpha (s = +1) then alpha* (s = -1)
        for t in 0..l {
            let (a, v) = (self.a[t], -self.g[t]);
            if a < c && v > gmax {
                gmax = v;
                i = Some(t);
            }
            if a > 0.0 && v < gmin {
                gmin = v;
                j = Some(t);
            }
        }
        for t in l..2 * l {
            let (a, v) = (self.a[t], self.g[t]);
            if a > 0.0 && v > gmax {
                gmax = v;
                i = Some(t);
            }
            if a < c && v < gmin {
                gmin = v;
                j = Some(t);
            }
        }
        let (i, j_first) = (i?, j?);
        let violation = gmax - gmin;
        let j = match rule {
            WorkingSet::MaximalViolatingPair => j_first,
            WorkingSet::SecondOrder => {
                let kii = self.kdiag(i);
                let ki = self.kernel_row(i);
                let mut best = j_first;
                let mut best_gain = f64::NEG_INFINITY;
                for t in 0..2 * l {
                    let v = -self.sign(t) * self.g[t];
                    if !self.in_low(t) || v >= gmax {
                        continue;
                    }
                    let b = gmax - v;
                    let r = t % l;
                    let mut quad = kii + self.k[r * l + r] - 2.0 * ki[r];
                    if quad <= 0.0 {
                        quad = TAU;
                    }
                    let gain = b * b / quad;
                    if gain > best_gain {
                        best_gain = gain;
                        best = t;
                    }
                }
                best
            }
        };
        Some((i, j, violation))
    }

    fn update_pair(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (old_i, old_j) = (self.a[i], self.a[j]);
        let qii = self.kdiag(i);
        let qjj = self.kdiag(j);
        let qij = self.q(i, j);
        let (ai, aj) = if self.sign(i) != self.sign(j) {
            let mut quad = qii + qjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-self.g[i] - self.g[j]) / quad;
            let diff = old_i - old_j;
            let (mut ai, mut aj) = (old_i + delta, old_j + delta);
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
            (ai, aj)
        } else {
            let mut quad = qii + qjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (self.g[i] - self.g[j]) / quad;
            let sum = old_i + old_j;
            let (mut ai, mut aj) = (old_i - delta, old_j + delta);
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
            (ai, aj)
        };
        self.a[i] = ai;
        self.a[j] = aj;
        // G_t += s_t (s_i di K_i + s_j dj K_j), identical rows for both halves
        let wi = self.sign(i) * (ai - old_i);
        let wj = self.sign(j) * (aj - old_j);
        let l = self.l;
        let k = self.k;
        let (ri, rj) = (i % l, j % l);
        let (ki, kj) = (&k[ri * l..(ri + 1) * l], &k[rj * l..(rj + 1) * l]);
        let (lower, upper) = self.g.split_at_mut(l);
        for (((gu, gd), &x), &z) in lower.iter_mut().zip(upper.iter_mut()).zip(ki).zip(kj) {
            let d = wi * x + wj * z;
            *gu += d;
            *gd -= d;
        }
    }

    /// Offset `rho` with `f(x) = sum beta K - rho`: the mean of `s_t G_t`
    /// over free variables, or the midpoint of the feasible interval.
    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum_free) = (0usize, 0.0);
        for t in 0..2 * self.l {
            let s = self.sign(t);
            let yg = s * self.g[t];
            if self.a[t] >= self.c {
                if s < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.a[t] <= 0.0 {
                if s > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free += yg;
            }
        }
        if free > 0 {
            sum_free / free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

pub(crate) fn solve(
    gram: ArrayView2<'_, f64>,
    y: &[f64],
    settings: &SolverSettings,
) -> Result<SolverOutput, SvrError> {
    let l = y.len();
    let eps = settings.epsilon;
    let p: Vec<f64> = y.iter().map(|v| eps - v).chain(y.iter().map(|v| eps + v)).collect();
    let gram = gram.as_standard_layout();
    let mut state = State {
        k: gram.as_slice().expect("standard layout is contiguous"),
        l,
        c: settings.c,
        a: vec![0.0; 2 * l],
        g: p.clone(),
    };

    let mut iterations = 0;
    let mut violation;
    loop {
        let Some((i, j, v)) = state.select(settings.working_set) else {
            violation = 0.0;
            break;
        };
        violation = v;
        if violation <= settings.tolerance {
            break;
        }
        if iterations >= settings.max_iter {
            return Err(SvrError::Convergence {
                iterations,
                violation,
            });
        }
        state.update_pair(i, j);
        iterations += 1;
    }

    let objective = 0.5
        * state
            .a
            .iter()
            .zip(state.g.iter().zip(p.iter()))
            .map(|(a, (g, p))| a * (g + p))
            .sum::<f64>();
    let beta = (0..l).map(|k| state.a[k] - state.a[k + l]).collect();
    Ok(SolverOutput {
        beta,
        bias: -state.rho(),
        violation: violation.max(0.0),
        iterations,
        objective,
    })
}
