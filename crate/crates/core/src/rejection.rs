//! Optimal reject-option strategies on discrete conditional-risk distributions.
//!
//! A [`DiscreteRiskDistribution`] lists the values the conditional risk
//! `r(x)` takes together with their probability mass. All three rejection
//! models (cost-based, bounded-improvement, bounded-coverage) are solved by a
//! randomized threshold rule: accept below the threshold, reject above it and
//! accept with a fixed probability exactly at it.
//!
//! The suprema/infima that define the thresholds are evaluated over the atom
//! values plus `+inf`, where the defining step functions change value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

const MASS_TOL: f64 = 1e-12;

/// Atoms above this count are refused by [`brute_force_selector`].
pub const BRUTE_FORCE_MAX_ATOMS: usize = 30;
/// Exhaustive subset enumeration is only done up to this many atoms.
pub const BRUTE_FORCE_MAX_SUBSET_ATOMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Conditional risk value.
    pub risk: f64,
    /// Probability mass.
    pub mass: f64,
}

/// Sorted, merged `(risk, mass)` atoms with masses summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRiskDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteRiskDistribution {
    /// Validates, sorts by risk and merges equal risk values.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<Atom> = atoms
            .into_iter()
            .map(|(risk, mass)| Atom { risk, mass })
            .collect();
        if raw.is_empty() {
            return Err(Error::Size("distribution needs at least one atom".into()));
        }
        for a in &raw {
            if !a.risk.is_finite() || a.risk < 0.0 {
                return Err(Error::Domain(format!(
                    "risk values must be finite and nonnegative, got {}",
                    a.risk
                )));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::Domain(format!(
                    "atom masses must be positive, got {}",
                    a.mass
                )));
            }
        }
        let total: f64 = raw.iter().map(|a| a.mass).collect::<CompensatedSum>().value();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain(format!("masses sum to {total}, expected 1")));
        }
        raw.sort_by(|a, b| a.risk.total_cmp(&b.risk));
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for a in raw {
            match atoms.last_mut() {
                Some(last) if last.risk == a.risk => last.mass += a.mass,
                _ => atoms.push(a),
            }
        }
        Ok(Self { atoms })
    }

    /// Like [`new`](Self::new) but rescales positive weights to unit mass.
    pub fn from_weights(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        let total: f64 = atoms.iter().map(|a| a.1).collect::<CompensatedSum>().value();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Domain("weights must have positive finite sum".into()));
        }
        Self::new(atoms.into_iter().map(|(r, w)| (r, w / total)))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Expected risk `E[r]` under full acceptance.
    pub fn mean_risk(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * a.risk)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Accept when `r < threshold`, accept with `accept_prob` when `r == threshold`,
/// reject otherwise. `threshold = +inf` accepts everything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizedSelector {
    pub threshold: f64,
    pub accept_prob: f64,
}

impl RandomizedSelector {
    pub fn accept_all() -> Self {
        Self {
            threshold: f64::INFINITY,
            accept_prob: 1.0,
        }
    }

    pub fn reject_all() -> Self {
        Self {
            threshold: f64::NEG_INFINITY,
            accept_prob: 0.0,
        }
    }

    /// Acceptance probability for an input with conditional risk `risk`.
    #[inline]
    pub fn acceptance(&self, risk: f64) -> f64 {
        if risk < self.threshold {
            1.0
        } else if risk == self.threshold {
            self.accept_prob
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectorEvaluation {
    pub coverage: f64,
    /// `None` at zero coverage.
    pub selective_risk: Option<f64>,
    /// Present when a reject cost was supplied.
    pub expected_cost: Option<f64>,
}

impl SelectorEvaluation {
    pub fn selective_risk(&self) -> Result<f64> {
        self.selective_risk.ok_or(Error::UndefinedRisk)
    }
}

fn evaluate_acceptance(
    dist: &DiscreteRiskDistribution,
    accept: impl Fn(usize, &Atom) -> f64,
    reject_cost: Option<f64>,
) -> SelectorEvaluation {
    let mut cov = CompensatedSum::new();
    let mut risk = CompensatedSum::new();
    let mut cost = CompensatedSum::new();
    for (k, a) in dist.atoms.iter().enumerate() {
        let c = accept(k, a);
        cov.add(a.mass * c);
        risk.add(a.mass * c * a.risk);
        if let Some(eps) = reject_cost {
            cost.add(a.mass * c * a.risk);
            cost.add(a.mass * (1.0 - c) * eps);
        }
    }
    let coverage = cov.value().clamp(0.0, 1.0);
    let selective_risk = (coverage > 0.0).then(|| (risk.value() / cov.value()).max(0.0));
    SelectorEvaluation {
        coverage,
        selective_risk,
        expected_cost: reject_cost.map(|_| cost.value()),
    }
}

/// Coverage, selective risk and (optionally) expected cost of a selector.
pub fn evaluate_selector(
    dist: &DiscreteRiskDistribution,
    sel: &RandomizedSelector,
    reject_cost: Option<f64>,
) -> SelectorEvaluation {
    evaluate_acceptance(dist, |_, a| sel.acceptance(a.risk), reject_cost)
}

/// Cost-based model: reject whenever the risk exceeds the reject cost.
///
/// Atoms exactly at the cost are accepted; every acceptance probability is
/// optimal there.
pub fn solve_cost_based(
    _dist: &DiscreteRiskDistribution,
    reject_cost: f64,
) -> Result<RandomizedSelector> {
    if !(reject_cost.is_finite() && reject_cost >= 0.0) {
        return Err(Error::Domain(format!(
            "reject cost must be finite and nonnegative, got {reject_cost}"
        )));
    }
    Ok(RandomizedSelector {
        threshold: reject_cost,
        accept_prob: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementSolution {
    pub selector: RandomizedSelector,
    /// Set when every selector with nonzero coverage exceeds the target risk;
    /// the selector then rejects everything.
    pub infeasible: bool,
}

/// Bounded-improvement model: largest coverage with selective risk at most `target_risk`.
pub fn solve_bounded_improvement(
    dist: &DiscreteRiskDistribution,
    target_risk: f64,
) -> Result<ImprovementSolution> {
    if !(target_risk.is_finite() && target_risk > 0.0) {
        return Err(Error::Domain(format!(
            "target risk must be positive, got {target_risk}"
        )));
    }
    // rho_k = sum_{j <= k} p_j (r_j - lambda); b is the left end of the
    // trailing run of strictly positive rho_k, or +inf if rho_K <= 0.
    let atoms = &dist.atoms;
    let mut prefix = Vec::with_capacity(atoms.len());
    let mut acc = CompensatedSum::new();
    for a in atoms {
        acc.add(a.mass * a.risk);
        acc.add(-a.mass * target_risk);
        prefix.push(acc.value());
    }
    let Some(k_star) = (0..atoms.len()).rev().take_while(|&k| prefix[k] > 0.0).last() else {
        return Ok(ImprovementSolution {
            selector: RandomizedSelector::accept_all(),
            infeasible: false,
        });
    };
    let below = if k_star == 0 { 0.0 } else { prefix[k_star - 1] };
    let boundary = atoms[k_star].mass * (atoms[k_star].risk - target_risk);
    let accept_prob = if boundary == 0.0 {
        1.0
    } else {
        (-below / boundary).clamp(0.0, 1.0)
    };
    let infeasible = k_star == 0;
    let selector = if infeasible {
        RandomizedSelector::reject_all()
    } else {
        RandomizedSelector {
            threshold: atoms[k_star].risk,
            accept_prob,
        }
    };
    Ok(ImprovementSolution {
        selector,
        infeasible,
    })
}

/// Bounded-coverage model: smallest selective risk at coverage `target_coverage`.
pub fn solve_bounded_coverage(
    dist: &DiscreteRiskDistribution,
    target_coverage: f64,
) -> Result<RandomizedSelector> {
    if !(target_coverage > 0.0 && target_coverage <= 1.0) {
        return Err(Error::Domain(format!(
            "target coverage must lie in (0, 1], got {target_coverage}"
        )));
    }
    // beta = first atom whose inclusive mass exceeds omega; exact ties move on
    // to the next atom with kappa = 0.
    let mut below = CompensatedSum::new();
    for a in &dist.atoms {
        let mass_below = below.value();
        below.add(a.mass);
        if below.value() > target_coverage + MASS_TOL {
            let kappa = ((target_coverage - mass_below) / a.mass).clamp(0.0, 1.0);
            return Ok(RandomizedSelector {
                threshold: a.risk,
                accept_prob: kappa,
            });
        }
    }
    Ok(RandomizedSelector::accept_all())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RejectionModel {
    CostBased { reject_cost: f64 },
    BoundedImprovement { target_risk: f64 },
    BoundedCoverage { target_coverage: f64 },
}

/// Exhaustive search for the best selector under `model`.
///
/// Candidates are threshold rules (every atom value and `+-inf` as threshold,
/// boundary fraction on a 0.01 grid plus the fraction that makes the model's
/// constraint tight) and, for up to [`BRUTE_FORCE_MAX_SUBSET_ATOMS`] atoms,
/// every subset of fully accepted atoms with at most one partially accepted
/// atom. One fractional atom suffices because each model is a linear program
/// with at most one constraint besides the box.
pub fn brute_force_selector(
    dist: &DiscreteRiskDistribution,
    model: RejectionModel,
) -> Result<SelectorEvaluation> {
    let k = dist.len();
    if k > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::Size(format!(
            "brute force supports at most {BRUTE_FORCE_MAX_ATOMS} atoms, got {k}"
        )));
    }
    let atoms = dist.atoms();
    let reject_cost = match model {
        RejectionModel::CostBased { reject_cost } => Some(reject_cost),
        _ => None,
    };
    let mut best: Option<SelectorEvaluation> = None;
    let mut consider = |accept: &[f64]| {
        let eval = evaluate_acceptance(dist, |i, _| accept[i], reject_cost);
        if better(model, &eval, best.as_ref()) {
            best = Some(eval);
        }
    };

    // Constraint-tight fraction for atom `j` given the mass/risk already accepted.
    let tight_fraction = |j: usize, cov: f64, excess: f64| -> Option<f64> {
        let a = atoms[j];
        let q = match model {
            RejectionModel::CostBased { .. } => return None,
            RejectionModel::BoundedCoverage { target_coverage } => (target_coverage - cov) / a.mass,
            RejectionModel::BoundedImprovement { target_risk } => {
                let per = a.mass * (a.risk - target_risk);
                if per == 0.0 {
                    return None;
                }
                -excess / per
            }
        };
        (q > 0.0 && q < 1.0).then_some(q)
    };
    let excess_of = |accept: &[f64]| -> f64 {
        match model {
            RejectionModel::BoundedImprovement { target_risk } => atoms
                .iter()
                .zip(accept)
                .map(|(a, c)| a.mass * c * (a.risk - target_risk))
                .collect::<CompensatedSum>()
                .value(),
            _ => 0.0,
        }
    };
    let coverage_of = |accept: &[f64]| -> f64 {
        atoms
            .iter()
            .zip(accept)
            .map(|(a, c)| a.mass * c)
            .collect::<CompensatedSum>()
            .value()
    };

    // Threshold family.
    let mut accept = vec![0.0; k];
    consider(&accept);
    accept.iter_mut().for_each(|c| *c = 1.0);
    consider(&accept);
    for t in 0..k {
        for (i, c) in accept.iter_mut().enumerate() {
            *c = if i < t { 1.0 } else { 0.0 };
        }
        let base_cov = coverage_of(&accept);
        let base_excess = excess_of(&accept);
        for step in 0..=100 {
            accept[t] = step as f64 / 100.0;
            consider(&accept);
        }
        if let Some(q) = tight_fraction(t, base_cov, base_excess) {
            accept[t] = q;
            consider(&accept);
        }
    }

    // Subsets with at most one fractional atom.
    if k <= BRUTE_FORCE_MAX_SUBSET_ATOMS {
        for mask in 0u32..(1u32 << k) {
            for (i, c) in accept.iter_mut().enumerate() {
                *c = if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
            }
            consider(&accept);
            if matches!(model, RejectionModel::CostBased { .. }) {
                continue;
            }
            let cov = coverage_of(&accept);
            let excess = excess_of(&accept);
            for j in 0..k {
                if mask >> j & 1 == 1 {
                    continue;
                }
                if let Some(q) = tight_fraction(j, cov, excess) {
                    accept[j] = q;
                    consider(&accept);
                    accept[j] = 0.0;
                }
            }
        }
    }
    Ok(best.expect("reject-all candidate is always considered"))
}

const RISK_TOL: f64 = 1e-12;

fn better(model: RejectionModel, cand: &SelectorEvaluation, best: Option<&SelectorEvaluation>) -> bool {
    match model {
        RejectionModel::CostBased { .. } => {
            let c = cand.expected_cost.unwrap_or(f64::INFINITY);
            best.is_none_or(|b| c < b.expected_cost.unwrap_or(f64::INFINITY))
        }
        RejectionModel::BoundedImprovement { target_risk } => {
            let feasible = |e: &SelectorEvaluation| match e.selective_risk {
                Some(r) => r <= target_risk + RISK_TOL,
                None => true,
            };
            if !feasible(cand) {
                return false;
            }
            let Some(b) = best else { return true };
            let (cr, br) = (
                cand.selective_risk.unwrap_or(0.0),
                b.selective_risk.unwrap_or(0.0),
            );
            cand.coverage > b.coverage + 1e-15 || (cand.coverage >= b.coverage - 1e-15 && cr < br)
        }
        RejectionModel::BoundedCoverage { target_coverage } => {
            if cand.coverage < target_coverage - RISK_TOL {
                return false;
            }
            let Some(b) = best else { return true };
            let cr = cand.selective_risk.unwrap_or(f64::INFINITY);
            let br = b.selective_risk.unwrap_or(f64::INFINITY);
            cr < br - 1e-15 || (cr <= br + 1e-15 && cand.coverage < b.coverage)
        }
    }
}

/// Plug-in distribution from a sample: one atom per distinct score value with
/// mass `count / n` and risk equal to the mean loss of that group. Atoms that
/// end up with equal risk are merged.
pub fn empirical_risk_distribution(
    scores: &[f64],
    losses: &[f64],
) -> Result<DiscreteRiskDistribution> {
    if scores.is_empty() {
        return Err(Error::Shape("empty sample".into()));
    }
    if scores.len() != losses.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} losses",
            scores.len(),
            losses.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain("scores must be finite".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let n = scores.len() as f64;
    let mut atoms = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let s = scores[order[start]];
        let mut end = start;
        let mut loss = CompensatedSum::new();
        while end < order.len() && scores[order[end]] == s {
            loss.add(losses[order[end]]);
            end += 1;
        }
        let count = (end - start) as f64;
        atoms.push((loss.value() / count, count / n));
        start = end;
    }
    DiscreteRiskDistribution::from_weights(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(atoms: &[(f64, f64)]) -> DiscreteRiskDistribution {
        DiscreteRiskDistribution::new(atoms.iter().copied()).unwrap()
    }

    #[test]
    fn distribution_sorts_and_merges() {
        let d = dist(&[(0.3, 0.25), (0.1, 0.5), (0.3, 0.25)]);
        assert_eq!(
            d.atoms(),
            &[Atom { risk: 0.1, mass: 0.5 }, Atom { risk: 0.3, mass: 0.5 }]
        );
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteRiskDistribution::new([(0.1, 0.5)]).is_err());
        assert!(DiscreteRiskDistribution::new([(-0.1, 1.0)]).is_err());
        assert!(DiscreteRiskDistribution::new([(0.1, 0.0), (0.2, 1.0)]).is_err());
        assert!(DiscreteRiskDistribution::new(Vec::<(f64, f64)>::new()).is_err());
    }

    #[test]
    fn evaluate_partial_boundary() {
        let d = dist(&[(0.1, 0.5), (0.3, 0.5)]);
        let e = evaluate_selector(
            &d,
            &RandomizedSelector {
                threshold: 0.3,
                accept_prob: 0.5,
            },
            None,
        );
        assert_abs_diff_eq!(e.coverage, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(e.selective_risk().unwrap(), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_accept_all_is_mean_risk() {
        let d = dist(&[(0.1, 0.2), (0.4, 0.3), (0.9, 0.5)]);
        let e = evaluate_selector(&d, &RandomizedSelector::accept_all(), None);
        assert_eq!(e.coverage, 1.0);
        assert_abs_diff_eq!(e.selective_risk().unwrap(), d.mean_risk(), epsilon = 1e-15);
    }

    #[test]
    fn evaluate_reject_all_pays_cost() {
        let d = dist(&[(0.2, 1.0)]);
        let e = evaluate_selector(
            &d,
            &RandomizedSelector {
                threshold: 0.2,
                accept_prob: 0.0,
            },
            Some(0.5),
        );
        assert_eq!(e.coverage, 0.0);
        assert_eq!(e.expected_cost, Some(0.5));
        assert!(matches!(e.selective_risk(), Err(Error::UndefinedRisk)));
    }

    #[test]
    fn cost_based_examples() {
        let d = dist(&[(0.1, 0.5), (0.4, 0.5)]);
        let sel = solve_cost_based(&d, 0.25).unwrap();
        assert_eq!(sel, RandomizedSelector { threshold: 0.25, accept_prob: 1.0 });
        let e = evaluate_selector(&d, &sel, Some(0.25));
        assert_abs_diff_eq!(e.expected_cost.unwrap(), 0.175, epsilon = 1e-15);

        let d = dist(&[(0.0, 0.3), (0.2, 0.3), (0.5, 0.4)]);
        let sel = solve_cost_based(&d, 0.0).unwrap();
        for a in d.atoms() {
            assert_eq!(sel.acceptance(a.risk), if a.risk > 0.0 { 0.0 } else { 1.0 });
        }

        let d = dist(&[(0.3, 1.0)]);
        for nu in [0.0, 0.4, 1.0] {
            let e = evaluate_selector(
                &d,
                &RandomizedSelector { threshold: 0.3, accept_prob: nu },
                Some(0.3),
            );
            assert_abs_diff_eq!(e.expected_cost.unwrap(), 0.3, epsilon = 1e-15);
        }
    }

    #[test]
    fn bounded_improvement_examples() {
        let d = dist(&[(0.0, 0.5), (0.6, 0.5)]);
        let s = solve_bounded_improvement(&d, 0.2).unwrap();
        assert!(!s.infeasible);
        assert_eq!(s.selector.threshold, 0.6);
        assert_abs_diff_eq!(s.selector.accept_prob, 0.5, epsilon = 1e-15);
        let e = evaluate_selector(&d, &s.selector, None);
        assert_abs_diff_eq!(e.coverage, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(e.selective_risk.unwrap(), 0.2, epsilon = 1e-15);

        let d = dist(&[(0.0, 0.5), (0.4, 0.5)]);
        let s = solve_bounded_improvement(&d, 0.2).unwrap();
        assert_eq!(s.selector.threshold, f64::INFINITY);
        let e = evaluate_selector(&d, &s.selector, None);
        assert_eq!(e.coverage, 1.0);
        assert_abs_diff_eq!(e.selective_risk.unwrap(), 0.2, epsilon = 1e-15);

        let d = dist(&[(0.5, 1.0)]);
        let s = solve_bounded_improvement(&d, 1.0).unwrap();
        let e = evaluate_selector(&d, &s.selector, None);
        assert_eq!(e.coverage, 1.0);
        assert_eq!(e.selective_risk, Some(0.5));
    }

    #[test]
    fn bounded_improvement_infeasible_flags() {
        let d = dist(&[(0.3, 0.5), (0.6, 0.5)]);
        let s = solve_bounded_improvement(&d, 0.1).unwrap();
        assert!(s.infeasible);
        assert_eq!(evaluate_selector(&d, &s.selector, None).coverage, 0.0);
        assert!(solve_bounded_improvement(&d, 0.0).is_err());
    }

    #[test]
    fn bounded_coverage_examples() {
        let d = dist(&[(0.1, 0.5), (0.3, 0.5)]);
        let s = solve_bounded_coverage(&d, 0.75).unwrap();
        assert_eq!(s.threshold, 0.3);
        assert_abs_diff_eq!(s.accept_prob, 0.5, epsilon = 1e-15);
        let e = evaluate_selector(&d, &s, None);
        assert_abs_diff_eq!(e.coverage, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(e.selective_risk.unwrap(), 1.0 / 6.0, epsilon = 1e-15);

        let s = solve_bounded_coverage(&d, 1.0).unwrap();
        assert_eq!(s.threshold, f64::INFINITY);
        assert_eq!(evaluate_selector(&d, &s, None).coverage, 1.0);

        let d = dist(&[(0.2, 0.4), (0.5, 0.6)]);
        let s = solve_bounded_coverage(&d, 0.4).unwrap();
        assert_eq!(s, RandomizedSelector { threshold: 0.5, accept_prob: 0.0 });
        let e = evaluate_selector(&d, &s, None);
        assert_abs_diff_eq!(e.coverage, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(e.selective_risk.unwrap(), 0.2, epsilon = 1e-15);

        assert!(solve_bounded_coverage(&d, 0.0).is_err());
        assert!(solve_bounded_coverage(&d, 1.5).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let d = dist(&[(0.1, 0.5), (0.3, 0.5)]);
        let e = brute_force_selector(&d, RejectionModel::BoundedCoverage { target_coverage: 0.75 })
            .unwrap();
        assert_abs_diff_eq!(e.coverage, 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(e.selective_risk.unwrap(), 1.0 / 6.0, epsilon = 1e-9);

        let d = dist(&[(0.0, 0.5), (0.6, 0.5)]);
        let e = brute_force_selector(&d, RejectionModel::BoundedImprovement { target_risk: 0.2 })
            .unwrap();
        assert_abs_diff_eq!(e.coverage, 0.75, epsilon = 1e-9);

        let d = dist(&[(0.1, 1.0)]);
        let e = brute_force_selector(&d, RejectionModel::CostBased { reject_cost: 0.05 }).unwrap();
        assert_eq!(e.coverage, 0.0);
        assert_abs_diff_eq!(e.expected_cost.unwrap(), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn brute_force_size_cap() {
        let atoms: Vec<(f64, f64)> = (0..31).map(|i| (i as f64, 1.0)).collect();
        let d = DiscreteRiskDistribution::from_weights(atoms).unwrap();
        assert!(matches!(
            brute_force_selector(&d, RejectionModel::CostBased { reject_cost: 1.0 }),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn empirical_distribution_examples() {
        let d = empirical_risk_distribution(&[0.1, 0.1, 0.9], &[0.0, 100.0, 100.0]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atoms()[0].risk, 50.0);
        assert_abs_diff_eq!(d.atoms()[0].mass, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(d.atoms()[1].risk, 100.0);
        assert_abs_diff_eq!(d.atoms()[1].mass, 1.0 / 3.0, epsilon = 1e-15);

        let d = empirical_risk_distribution(&[1.0], &[0.0]).unwrap();
        assert_eq!(d.atoms(), &[Atom { risk: 0.0, mass: 1.0 }]);

        // Two score groups with equal mean loss merge into one atom.
        let d = empirical_risk_distribution(&[1.0, 2.0], &[5.0, 5.0]).unwrap();
        assert_eq!(d.atoms(), &[Atom { risk: 5.0, mass: 1.0 }]);

        assert!(matches!(
            empirical_risk_distribution(&[], &[]),
            Err(Error::Shape(_))
        ));
    }
}
