//! Risk-coverage curves and the SELE family of ranking losses.
//!
//! Convention: a higher score means a more uncertain prediction, so samples
//! are accepted in ascending score order.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log1p_exp, sigmoid, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RcPoint {
    pub coverage: f64,
    pub selective_risk: f64,
    /// Score of the last accepted sample.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskCoverageCurve {
    points: Vec<RcPoint>,
}

impl RiskCoverageCurve {
    pub fn points(&self) -> &[RcPoint] {
        &self.points
    }

    /// Mean of the selective risks, i.e. the area under the curve.
    pub fn area(&self) -> f64 {
        let s: CompensatedSum = self.points.iter().map(|p| p.selective_risk).collect();
        s.value() / self.points.len() as f64
    }

    /// Writes `coverage,selective_risk,threshold` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "coverage,selective_risk,threshold")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.coverage, p.selective_risk, p.threshold)?;
        }
        Ok(())
    }
}

fn check_pair(scores: &[f64], losses: &[f64], min_len: usize) -> Result<()> {
    if scores.len() != losses.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} losses",
            scores.len(),
            losses.len()
        )));
    }
    if scores.len() < min_len {
        return Err(if min_len <= 1 {
            Error::Shape("empty sample".into())
        } else {
            Error::Size(format!("need at least {min_len} samples, got {}", scores.len()))
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("scores must not be NaN".into()));
    }
    Ok(())
}

/// Ascending score order, ties broken by sample index.
pub fn acceptance_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    order
}

pub fn rc_curve(scores: &[f64], losses: &[f64]) -> Result<RiskCoverageCurve> {
    check_pair(scores, losses, 1)?;
    let n = scores.len();
    let mut acc = CompensatedSum::new();
    let points = acceptance_order(scores)
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            acc.add(losses[k]);
            let taken = (i + 1) as f64;
            RcPoint {
                coverage: taken / n as f64,
                selective_risk: acc.value() / taken,
                threshold: scores[k],
            }
        })
        .collect();
    Ok(RiskCoverageCurve { points })
}

/// Area under the risk-coverage curve.
pub fn aurc(scores: &[f64], losses: &[f64]) -> Result<f64> {
    Ok(rc_curve(scores, losses)?.area())
}

/// Selective risk at the first curve point whose coverage reaches `target`.
pub fn risk_at_coverage(curve: &RiskCoverageCurve, target: f64) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::Domain(format!(
            "target coverage must lie in (0, 1], got {target}"
        )));
    }
    curve
        .points
        .iter()
        .find(|p| p.coverage >= target - 1e-12)
        .or(curve.points.last())
        .map(|p| p.selective_risk)
        .ok_or_else(|| Error::Shape("empty curve".into()))
}

/// `(1/n^2) sum_i sum_j loss_i [s_i <= s_j]`, in O(n log n).
pub fn sele_loss(scores: &[f64], losses: &[f64]) -> Result<f64> {
    check_pair(scores, losses, 2)?;
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = scores.len();
    let total: CompensatedSum = scores
        .iter()
        .zip(losses)
        .map(|(&s, &l)| {
            let not_above = sorted.partition_point(|&v| v < s);
            l * (n - not_above) as f64
        })
        .collect();
    Ok(total.value() / (n * n) as f64)
}

/// Logistic relaxation `(1/n^2) sum_i sum_j loss_i log(1 + exp(s_j - s_i))`.
pub fn sele_proxy(scores: &[f64], losses: &[f64]) -> Result<f64> {
    check_pair(scores, losses, 2)?;
    Ok(sele_proxy_eval(scores, losses, None))
}

/// Gradient of [`sele_proxy`] with respect to the scores.
pub fn sele_proxy_gradient(scores: &[f64], losses: &[f64]) -> Result<Vec<f64>> {
    check_pair(scores, losses, 2)?;
    let mut grad = vec![0.0; scores.len()];
    sele_proxy_eval(scores, losses, Some(&mut grad));
    Ok(grad)
}

/// Value of the proxy; adds its gradient into `grad` when given.
///
/// Only samples with nonzero loss act as the outer index, so the cost is
/// O(n * #errors). Summation order is fixed.
pub(crate) fn sele_proxy_eval(scores: &[f64], losses: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
    let n = scores.len();
    let norm = 1.0 / (n * n) as f64;
    let mut value = 0.0;
    for (i, (&si, &li)) in scores.iter().zip(losses).enumerate() {
        if li == 0.0 {
            continue;
        }
        let mut row = 0.0;
        let mut pull = 0.0;
        for (j, &sj) in scores.iter().enumerate() {
            let t = sj - si;
            row += log1p_exp(t);
            if let Some(g) = grad.as_deref_mut() {
                if j != i {
                    let w = li * norm * sigmoid(t);
                    g[j] += w;
                    pull += w;
                }
            }
        }
        value += li * row;
        if let Some(g) = grad.as_deref_mut() {
            g[i] -= pull;
        }
    }
    value * norm
}

/// `H_n = sum_{k=1..n} 1/k`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).collect::<CompensatedSum>().value()
}
