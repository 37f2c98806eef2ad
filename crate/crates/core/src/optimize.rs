//! Convex regularized risk minimization.
//!
//! [`bmrm_solve`] minimizes `F(theta) = C/2 |theta|^2 + R(theta)` for a convex
//! risk `R` given only values and subgradients. Each step adds the cutting
//! plane `R(theta) >= <a_i, theta> + b_i` and minimizes the regularized
//! piecewise-linear model through its dual, a concave quadratic program over
//! the probability simplex:
//!
//! ```text
//! max_{alpha in simplex}  <b, alpha> - |A alpha|^2 / (2C),   theta = -A alpha / C
//! ```
//!
//! Any feasible `alpha` gives a lower bound on `min F`, the best iterate an
//! upper bound; the loop stops once their relative gap is below tolerance.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{dot, norm_sq};

/// Value and subgradient access to a convex empirical risk.
pub trait RiskOracle {
    fn dim(&self) -> usize;

    /// Returns `R(theta)` and writes a subgradient into `grad`.
    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64;
}

impl<F> RiskOracle for (usize, F)
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        (self.1)(theta, grad)
    }
}

/// Regularization constant used in place of `C = 0`, for which the
/// cutting-plane model is unbounded.
pub const MIN_REG_CONST: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmrmOptions {
    pub reg_const: f64,
    pub gap_tol: f64,
    pub max_iters: usize,
    pub max_cuts: usize,
    /// Coordinate-ascent budget of the inner QP, in pair updates per cut.
    pub qp_sweeps: usize,
    pub qp_tol: f64,
}

impl BmrmOptions {
    pub fn new(reg_const: f64) -> Self {
        Self {
            reg_const,
            gap_tol: 1e-3,
            max_iters: 2000,
            max_cuts: 200,
            qp_sweeps: 10,
            qp_tol: 1e-10,
        }
    }

    pub fn gap_tol(mut self, tol: f64) -> Self {
        self.gap_tol = tol;
        self
    }

    pub fn max_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }

    pub fn max_cuts(mut self, cuts: usize) -> Self {
        self.max_cuts = cuts;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub theta: Vec<f64>,
    /// Best objective value seen.
    pub primal: f64,
    pub dual_lower_bound: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    /// False when `max_iters` ran out before the gap target.
    pub converged: bool,
    /// Regularization constant actually used.
    pub reg_const: f64,
    pub trace: Vec<TraceRecord>,
}

impl SolveReport {
    /// Writes the trace as `iteration primal gap` lines.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.trace {
            writeln!(out, "{} {} {}", t.iteration, t.primal, t.relative_gap)?;
        }
        Ok(())
    }
}

fn relative_gap(primal: f64, dual: f64) -> f64 {
    ((primal - dual) / primal.abs().max(1e-12)).max(0.0)
}

/// Bundle of cutting planes and the dual QP state.
struct Bundle {
    slopes: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    /// Gram matrix of slopes, row `i` holds `<a_i, a_j>`.
    gram: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    age: Vec<usize>,
}

impl Bundle {
    fn new() -> Self {
        Self {
            slopes: Vec::new(),
            offsets: Vec::new(),
            gram: Vec::new(),
            alpha: Vec::new(),
            age: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.offsets.len()
    }

    fn push(&mut self, slope: Vec<f64>, offset: f64, iteration: usize) {
        let row: Vec<f64> = self.slopes.iter().map(|s| dot(s, &slope)).collect();
        let self_dot = norm_sq(&slope);
        for (g, &v) in self.gram.iter_mut().zip(&row) {
            g.push(v);
        }
        let mut row = row;
        row.push(self_dot);
        self.gram.push(row);
        self.slopes.push(slope);
        self.offsets.push(offset);
        self.age.push(iteration);
        self.alpha.push(if self.alpha.is_empty() { 1.0 } else { 0.0 });
    }

    /// Drops the oldest cut carrying no dual weight; if all carry weight the
    /// lightest one goes and its weight is spread over the rest.
    fn evict(&mut self) {
        let victim = (0..self.len())
            .filter(|&i| self.alpha[i] == 0.0)
            .min_by_key(|&i| self.age[i])
            .unwrap_or_else(|| {
                (0..self.len())
                    .min_by(|&a, &b| self.alpha[a].total_cmp(&self.alpha[b]))
                    .expect("bundle is nonempty")
            });
        let freed = self.alpha[victim];
        self.slopes.remove(victim);
        self.offsets.remove(victim);
        self.alpha.remove(victim);
        self.age.remove(victim);
        self.gram.remove(victim);
        for g in &mut self.gram {
            g.remove(victim);
        }
        if freed > 0.0 {
            let rest: f64 = self.alpha.iter().sum();
            if rest > 0.0 {
                self.alpha.iter_mut().for_each(|a| *a /= rest);
            } else {
                let k = self.alpha.len() as f64;
                self.alpha.iter_mut().for_each(|a| *a = 1.0 / k);
            }
        }
    }

    /// Pairwise coordinate ascent on `<b, alpha> - alpha' G alpha / (2C)`.
    fn solve_dual(&mut self, reg: f64, sweeps: usize, tol: f64) {
        let k = self.len();
        if k == 1 {
            self.alpha[0] = 1.0;
            return;
        }
        // grad_i = b_i - (G alpha)_i / C
        let mut grad: Vec<f64> = (0..k)
            .map(|i| self.offsets[i] - dot(&self.gram[i], &self.alpha) / reg)
            .collect();
        let scale = self
            .offsets
            .iter()
            .fold(1.0f64, |m, b| m.max(b.abs()));
        for _ in 0..sweeps * k {
            let mut up = 0;
            let mut down = usize::MAX;
            for i in 0..k {
                if grad[i] > grad[up] {
                    up = i;
                }
                if self.alpha[i] > 0.0 && (down == usize::MAX || grad[i] < grad[down]) {
                    down = i;
                }
            }
            if down == usize::MAX || up == down || grad[up] - grad[down] <= tol * scale {
                break;
            }
            let curvature =
                (self.gram[up][up] + self.gram[down][down] - 2.0 * self.gram[up][down]) / reg;
            let step = if curvature > 0.0 {
                ((grad[up] - grad[down]) / curvature).min(self.alpha[down])
            } else {
                self.alpha[down]
            };
            if step <= 0.0 {
                break;
            }
            self.alpha[up] += step;
            self.alpha[down] -= step;
            if self.alpha[down] < 1e-300 {
                self.alpha[down] = 0.0;
            }
            for i in 0..k {
                grad[i] -= step * (self.gram[i][up] - self.gram[i][down]) / reg;
            }
        }
    }

    /// Dual objective and the primal point `-A alpha / C`.
    fn dual_point(&self, reg: f64, dim: usize) -> (f64, Vec<f64>) {
        let mut combo = vec![0.0; dim];
        for (a, s) in self.alpha.iter().zip(&self.slopes) {
            if *a != 0.0 {
                for (c, v) in combo.iter_mut().zip(s) {
                    *c += a * v;
                }
            }
        }
        let linear = dot(&self.offsets, &self.alpha);
        let dual = linear - norm_sq(&combo) / (2.0 * reg);
        combo.iter_mut().for_each(|c| *c /= -reg);
        (dual, combo)
    }
}

/// Bundle method for regularized risk minimization, started at `theta = 0`.
pub fn bmrm_solve(oracle: &dyn RiskOracle, options: &BmrmOptions) -> Result<SolveReport> {
    bmrm_solve_from(oracle, options, None)
}

pub fn bmrm_solve_from(
    oracle: &dyn RiskOracle,
    options: &BmrmOptions,
    start: Option<&[f64]>,
) -> Result<SolveReport> {
    if !(options.reg_const >= 0.0 && options.reg_const.is_finite()) {
        return Err(Error::Domain(format!(
            "regularization constant must be finite and nonnegative, got {}",
            options.reg_const
        )));
    }
    if options.gap_tol.is_nan() || options.gap_tol <= 0.0 {
        return Err(Error::Domain("gap tolerance must be positive".into()));
    }
    let reg = options.reg_const.max(MIN_REG_CONST);
    let dim = oracle.dim();
    let mut theta = match start {
        Some(s) if s.len() == dim => s.to_vec(),
        Some(s) => {
            return Err(Error::Shape(format!(
                "start point has {} entries, oracle dimension is {dim}",
                s.len()
            )))
        }
        None => vec![0.0; dim],
    };
    let mut grad = vec![0.0; dim];
    let mut bundle = Bundle::new();
    let mut best_theta = theta.clone();
    let mut best_primal = f64::INFINITY;
    let mut best_dual = f64::NEG_INFINITY;
    let mut trace = Vec::new();
    let max_cuts = options.max_cuts.max(2);

    for iteration in 1..=options.max_iters.max(1) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let risk = oracle.eval(&theta, &mut grad);
        if !risk.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!(
                "risk oracle returned non-finite output at iteration {iteration}"
            )));
        }
        let primal = 0.5 * reg * norm_sq(&theta) + risk;
        if primal < best_primal {
            best_primal = primal;
            best_theta.clone_from(&theta);
        }
        let offset = risk - dot(&grad, &theta);
        if bundle.len() >= max_cuts {
            bundle.evict();
        }
        bundle.push(grad.clone(), offset, iteration);
        bundle.solve_dual(reg, options.qp_sweeps, options.qp_tol);
        let (dual, next) = bundle.dual_point(reg, dim);
        best_dual = best_dual.max(dual);
        let gap = relative_gap(best_primal, best_dual);
        trace.push(TraceRecord {
            iteration,
            primal: best_primal,
            dual: best_dual,
            relative_gap: gap,
        });
        if gap <= options.gap_tol {
            return Ok(SolveReport {
                theta: best_theta,
                primal: best_primal,
                dual_lower_bound: best_dual.min(best_primal),
                relative_gap: gap,
                iterations: iteration,
                converged: true,
                reg_const: reg,
                trace,
            });
        }
        theta = next;
    }
    Ok(SolveReport {
        theta: best_theta,
        primal: best_primal,
        dual_lower_bound: best_dual.min(best_primal),
        relative_gap: relative_gap(best_primal, best_dual),
        iterations: options.max_iters.max(1),
        converged: false,
        reg_const: reg,
        trace,
    })
}

/// Minimizes `C/2 |theta|^2 + (1/n) sum_i (t_i - <theta, phi_i>)^2`.
///
/// `design` is row-major `n x m`. With `C = 0` and a rank-deficient design the
/// minimum-norm solution is returned.
pub fn ridge_solve(design: &[f64], cols: usize, targets: &[f64], reg_const: f64) -> Result<Vec<f64>> {
    let n = targets.len();
    let weights = vec![1.0 / n.max(1) as f64; n];
    ridge_solve_weighted(design, cols, targets, &weights, reg_const)
}

/// Weighted variant: `C/2 |theta|^2 + sum_i w_i (t_i - <theta, phi_i>)^2`.
///
/// Solved through the SVD of `W^{1/2} Phi`:
/// `theta = V diag(s / (s^2 + C/2)) U' W^{1/2} t`, dropping singular values
/// below a relative cutoff when `C = 0`.
pub fn ridge_solve_weighted(
    design: &[f64],
    cols: usize,
    targets: &[f64],
    weights: &[f64],
    reg_const: f64,
) -> Result<Vec<f64>> {
    let n = targets.len();
    if n == 0 || cols == 0 {
        return Err(Error::Size("ridge regression needs n >= 1 and m >= 1".into()));
    }
    if design.len() != n * cols || weights.len() != n {
        return Err(Error::Shape(format!(
            "design has {} entries, expected {n} x {cols}",
            design.len()
        )));
    }
    if !(reg_const >= 0.0 && reg_const.is_finite()) {
        return Err(Error::Domain("regularization constant must be nonnegative".into()));
    }
    if design.iter().chain(targets).chain(weights).any(|v| !v.is_finite())
        || weights.iter().any(|&w| w < 0.0)
    {
        return Err(Error::Numeric("non-finite or negative input to ridge regression".into()));
    }
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(n, cols, |i, j| sqrt_w[i] * design[i * cols + j]);
    let u_rhs = DVector::from_fn(n, |i, _| sqrt_w[i] * targets[i]);
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V'");
    let s_max = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let cutoff = s_max * (n.max(cols) as f64) * f64::EPSILON;
    let projected = u.transpose() * &u_rhs;
    let half_c = 0.5 * reg_const;
    let mut theta = DVector::zeros(cols);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let factor = if reg_const > 0.0 {
            s / (s * s + half_c)
        } else if s > cutoff {
            1.0 / s
        } else {
            0.0
        };
        if factor != 0.0 {
            theta += v_t.row(k).transpose() * (factor * projected[k]);
        }
    }
    let theta: Vec<f64> = theta.iter().copied().collect();
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("ridge solution is not finite".into()));
    }
    Ok(theta)
}

/// Relative residual of the weighted normal system
/// `(2 Phi' W Phi + C I) theta = 2 Phi' W t`.
pub fn ridge_normal_residual(
    design: &[f64],
    cols: usize,
    targets: &[f64],
    weights: &[f64],
    reg_const: f64,
    theta: &[f64],
) -> f64 {
    let n = targets.len();
    let mut lhs = vec![0.0; cols];
    let mut rhs = vec![0.0; cols];
    for i in 0..n {
        let row = &design[i * cols..(i + 1) * cols];
        let pred = dot(row, theta);
        for j in 0..cols {
            lhs[j] += 2.0 * weights[i] * row[j] * pred;
            rhs[j] += 2.0 * weights[i] * row[j] * targets[i];
        }
    }
    for j in 0..cols {
        lhs[j] += reg_const * theta[j];
    }
    let diff: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    diff / norm_sq(&rhs).sqrt().max(1e-300)
}
