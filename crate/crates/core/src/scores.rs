//! Uncertainty scores learned on top of a trained classifier.
//!
//! All learned scores share the block parametrization
//! `s(x) = <w_{h(x)}, x> + b_{h(x)}` where `h` is the base classifier, i.e. a
//! linear function of the feature map that places `(x, 1)` in block `h(x)`
//! of a `Y (d + 1)` dimensional vector. SELE minimizes the chunked logistic
//! selection proxy with [`bmrm_solve`]; REG regresses the loss of `h`; TCP
//! regresses the base posterior of the true class.
//!
//! Because each sample touches a single block, the REG and TCP least-squares
//! problems split into one independent ridge regression per class.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Row};
use crate::error::{Error, Result};
use crate::loss::{loss_vector, LossSpec};
use crate::metrics::sele_proxy_eval;
use crate::models::{LinearScorer, ModelKind, ParamRecord, TrainedClassifier};
use crate::optimize::{bmrm_solve, ridge_solve_weighted, BmrmOptions, RiskOracle};
use crate::rng::Rng;
use crate::dataio::Normalizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Baseline,
    Sele,
    Reg,
    Tcp,
}

impl ScoreKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScoreKind::Baseline => "baseline",
            ScoreKind::Sele => "sele",
            ScoreKind::Reg => "reg",
            ScoreKind::Tcp => "tcp",
        }
    }

    /// Whether the score can be learned on top of the given base model.
    pub fn applicable_to(&self, base: ModelKind) -> bool {
        !matches!(self, ScoreKind::Tcp) || base == ModelKind::Lr
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(ScoreKind::Baseline),
            "sele" => Ok(ScoreKind::Sele),
            "reg" => Ok(ScoreKind::Reg),
            "tcp" => Ok(ScoreKind::Tcp),
            other => Err(Error::Config(format!("unknown score method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyScore {
    pub kind: ScoreKind,
    pub base_kind: ModelKind,
    /// `None` for the baseline, which delegates to the base model.
    pub scorer: Option<LinearScorer>,
    pub reg_const: f64,
    pub relative_gap: f64,
}

impl UncertaintyScore {
    pub fn baseline(base: &TrainedClassifier) -> Self {
        Self {
            kind: ScoreKind::Baseline,
            base_kind: base.kind,
            scorer: None,
            reg_const: 0.0,
            relative_gap: 0.0,
        }
    }

    /// Raw score `s(x)` given the prediction `h(x)`; TCP is not negated here.
    pub fn raw_value(&self, predicted: usize, x: Row<'_>) -> Option<f64> {
        self.scorer.as_ref().map(|s| s.activation(predicted - 1, x))
    }

    /// Uncertainty of a sample with prediction `predicted`; higher means
    /// more uncertain.
    fn uncertainty_unchecked(&self, base: &TrainedClassifier, predicted: usize, x: Row<'_>) -> f64 {
        match (self.kind, &self.scorer) {
            (ScoreKind::Tcp, Some(s)) => -s.activation(predicted - 1, x),
            (_, Some(s)) => s.activation(predicted - 1, x),
            (_, None) => base.baseline_unchecked(x),
        }
    }

    pub fn fold_normalizer(&self, norm: &Normalizer) -> Result<Self> {
        Ok(Self {
            scorer: self.scorer.as_ref().map(|s| s.fold_normalizer(norm)).transpose()?,
            ..self.clone()
        })
    }
}

/// The prediction `h(x)` and the sparse feature map `psi(x)` over the
/// `Y (d + 1)` block parameter space.
pub fn feature_map(base: &TrainedClassifier, x: Row<'_>) -> Result<(usize, Vec<(usize, f64)>)> {
    let h = base.predict(x)?;
    let d = base.dim;
    let offset = (h - 1) * (d + 1);
    let mut psi: Vec<(usize, f64)> = match x {
        Row::Dense(v) => v.iter().enumerate().map(|(j, &v)| (offset + j, v)).collect(),
        Row::Sparse(v) => v.iter().map(|&(j, v)| (offset + j as usize, v)).collect(),
    };
    psi.push((offset + d, 1.0));
    Ok((h, psi))
}

/// Random partition of `0..n` into `P = max(1, round(n / 500))` chunks whose
/// sizes differ by at most one. Rounding is half-to-even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    pub chunks: Vec<Vec<usize>>,
}

pub const CHUNK_SIZE: f64 = 500.0;

impl ChunkPlan {
    pub fn chunk_count(n: usize) -> usize {
        ((n as f64 / CHUNK_SIZE).round_ties_even() as usize).max(1)
    }

    pub fn new(n: usize, rng: &mut Rng) -> Self {
        let p = Self::chunk_count(n);
        let perm = rng.permutation(n);
        let (base, extra) = (n / p, n % p);
        let mut chunks = Vec::with_capacity(p);
        let mut start = 0;
        for k in 0..p {
            let len = base + usize::from(k < extra);
            chunks.push(perm[start..start + len].to_vec());
            start += len;
        }
        Self { chunks }
    }
}

/// Averaged chunk proxy composed with the block feature map.
pub struct SeleRisk<'a> {
    pub predictions: &'a [usize],
    pub features: &'a Dataset,
    pub losses: &'a [f64],
    pub num_classes: usize,
    pub plan: &'a ChunkPlan,
}

impl RiskOracle for SeleRisk<'_> {
    fn dim(&self) -> usize {
        self.num_classes * (self.features.dim() + 1)
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.features.dim();
        let p = self.plan.chunks.len() as f64;
        let mut total = 0.0;
        let mut scores = Vec::new();
        let mut losses = Vec::new();
        let mut g = Vec::new();
        for chunk in &self.plan.chunks {
            if chunk.len() < 2 {
                continue;
            }
            scores.clear();
            losses.clear();
            for &i in chunk {
                let k = self.predictions[i] - 1;
                let block = &theta[k * (d + 1)..(k + 1) * (d + 1)];
                scores.push(self.features.row(i).dot(&block[..d]) + block[d]);
                losses.push(self.losses[i]);
            }
            g.clear();
            g.resize(chunk.len(), 0.0);
            total += sele_proxy_eval(&scores, &losses, Some(&mut g));
            for (&i, &gi) in chunk.iter().zip(&g) {
                if gi == 0.0 {
                    continue;
                }
                let k = self.predictions[i] - 1;
                let block = &mut grad[k * (d + 1)..(k + 1) * (d + 1)];
                self.features.row(i).axpy(gi / p, &mut block[..d]);
                block[d] += gi / p;
            }
        }
        total / p
    }
}

/// Solver settings for SELE. The iteration budget matters mostly for
/// `C = 0`, where the cutting-plane gap does not close.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub gap_tol: f64,
    pub max_iters: usize,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self {
            gap_tol: 0.01,
            max_iters: 300,
        }
    }
}

fn check_inputs(predictions: &[usize], features: &Dataset, targets: &[f64], num_classes: usize) -> Result<()> {
    if predictions.len() != features.len() || targets.len() != features.len() {
        return Err(Error::Shape(format!(
            "{} predictions and {} targets for {} samples",
            predictions.len(),
            targets.len(),
            features.len()
        )));
    }
    if let Some(bad) = predictions.iter().find(|&&h| h == 0 || h > num_classes) {
        return Err(Error::Domain(format!("prediction {bad} outside 1..={num_classes}")));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::Numeric("score targets must be finite".into()));
    }
    Ok(())
}

/// Least-squares fit of `targets` by the block score; one ridge problem per
/// predicted class.
pub fn fit_block_regression(
    predictions: &[usize],
    features: &Dataset,
    targets: &[f64],
    num_classes: usize,
    reg_const: f64,
) -> Result<LinearScorer> {
    check_inputs(predictions, features, targets, num_classes)?;
    let d = features.dim();
    let n = features.len();
    let mut theta = vec![0.0; num_classes * (d + 1)];
    for k in 1..=num_classes {
        let members: Vec<usize> = (0..n).filter(|&i| predictions[i] == k).collect();
        if members.is_empty() {
            continue;
        }
        let mut design = Vec::with_capacity(members.len() * (d + 1));
        for &i in &members {
            design.extend(features.row(i).to_dense(d));
            design.push(1.0);
        }
        let t: Vec<f64> = members.iter().map(|&i| targets[i]).collect();
        let w = vec![1.0 / n as f64; members.len()];
        let block = ridge_solve_weighted(&design, d + 1, &t, &w, reg_const)?;
        theta[(k - 1) * (d + 1)..k * (d + 1)].copy_from_slice(&block);
    }
    LinearScorer::from_blocks(&theta, num_classes, d)
}

/// SELE fit from precomputed predictions and losses. Returns the scorer and
/// the solver's final relative gap.
pub fn fit_sele(
    predictions: &[usize],
    features: &Dataset,
    losses: &[f64],
    num_classes: usize,
    reg_const: f64,
    rng: &mut Rng,
    opts: &ScoreOptions,
) -> Result<(LinearScorer, f64)> {
    if features.len() < 2 {
        return Err(Error::Size("SELE needs at least two samples".into()));
    }
    check_inputs(predictions, features, losses, num_classes)?;
    if losses.iter().any(|&l| l < 0.0) {
        return Err(Error::Domain("losses must be nonnegative".into()));
    }
    let plan = ChunkPlan::new(features.len(), rng);
    let oracle = SeleRisk {
        predictions,
        features,
        losses,
        num_classes,
        plan: &plan,
    };
    let report = bmrm_solve(
        &oracle,
        &BmrmOptions::new(reg_const)
            .gap_tol(opts.gap_tol)
            .max_iters(opts.max_iters),
    )?;
    let scorer = LinearScorer::from_blocks(&report.theta, num_classes, features.dim())?;
    Ok((scorer, report.relative_gap))
}

/// Posterior of the true class under a logistic regression base.
pub fn true_class_posteriors(base: &TrainedClassifier, data: &Dataset) -> Result<Vec<f64>> {
    if base.kind != ModelKind::Lr {
        return Err(Error::Contract(format!(
            "TCP needs a logistic regression base, got {}",
            base.kind.name()
        )));
    }
    (0..data.len())
        .map(|i| Ok(base.posterior(data.row(i))?[data.labels()[i] - 1]))
        .collect()
}

fn learned(kind: ScoreKind, base: &TrainedClassifier, scorer: LinearScorer, c: f64, gap: f64) -> UncertaintyScore {
    UncertaintyScore {
        kind,
        base_kind: base.kind,
        scorer: Some(scorer),
        reg_const: c,
        relative_gap: gap,
    }
}

pub fn train_reg_score(base: &TrainedClassifier, data: &Dataset, loss: LossSpec, c: f64) -> Result<UncertaintyScore> {
    let preds = base.predict_dataset(data)?;
    let losses = loss_vector(loss, data, &preds)?;
    let scorer = fit_block_regression(&preds, data, &losses, base.num_classes, c)?;
    Ok(learned(ScoreKind::Reg, base, scorer, c, 0.0))
}

pub fn train_sele_score(
    base: &TrainedClassifier,
    data: &Dataset,
    loss: LossSpec,
    c: f64,
    rng: &mut Rng,
) -> Result<UncertaintyScore> {
    train_sele_score_with(base, data, loss, c, rng, &ScoreOptions::default())
}

pub fn train_sele_score_with(
    base: &TrainedClassifier,
    data: &Dataset,
    loss: LossSpec,
    c: f64,
    rng: &mut Rng,
    opts: &ScoreOptions,
) -> Result<UncertaintyScore> {
    if data.len() < 2 {
        return Err(Error::Size("SELE needs at least two samples".into()));
    }
    let preds = base.predict_dataset(data)?;
    let losses = loss_vector(loss, data, &preds)?;
    let (scorer, gap) = fit_sele(&preds, data, &losses, base.num_classes, c, rng, opts)?;
    Ok(learned(ScoreKind::Sele, base, scorer, c, gap))
}

pub fn train_tcp_score(base: &TrainedClassifier, data: &Dataset, c: f64) -> Result<UncertaintyScore> {
    let targets = true_class_posteriors(base, data)?;
    let preds = base.predict_dataset(data)?;
    let scorer = fit_block_regression(&preds, data, &targets, base.num_classes, c)?;
    Ok(learned(ScoreKind::Tcp, base, scorer, c, 0.0))
}

/// Per-sample uncertainty, higher meaning more uncertain.
pub fn score_dataset(score: &UncertaintyScore, base: &TrainedClassifier, data: &Dataset) -> Result<Vec<f64>> {
    if score.base_kind != base.kind {
        return Err(Error::Contract(format!(
            "score was trained for a {} base, got {}",
            score.base_kind.name(),
            base.kind.name()
        )));
    }
    if let Some(s) = &score.scorer {
        if s.dim() != base.dim || s.rows() != base.num_classes {
            return Err(Error::Shape("score and base model dimensions differ".into()));
        }
    }
    let preds = base.predict_dataset(data)?;
    Ok(preds
        .iter()
        .enumerate()
        .map(|(i, &h)| score.uncertainty_unchecked(base, h, data.row(i)))
        .collect())
}

const SCORE_FIELDS: &[&str] = &["kind", "base_kind", "classes", "dim", "reg_const", "relative_gap"];

impl UncertaintyScore {
    pub fn to_text(&self, base: &TrainedClassifier) -> String {
        let (rows, biases) = match &self.scorer {
            Some(s) => (
                (0..s.rows()).map(|k| s.row_weights(k).to_vec()).collect(),
                s.biases().to_vec(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        ParamRecord {
            fields: vec![
                ("kind".into(), format!("score_{}", self.kind.name())),
                ("base_kind".into(), self.base_kind.name().into()),
                ("classes".into(), base.num_classes.to_string()),
                ("dim".into(), base.dim.to_string()),
                ("reg_const".into(), format!("{}", self.reg_const)),
                ("relative_gap".into(), format!("{}", self.relative_gap)),
            ],
            rows,
            biases,
        }
        .to_text()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rec = ParamRecord::parse(text, SCORE_FIELDS)?;
        let kind: ScoreKind = rec
            .field("kind")?
            .strip_prefix("score_")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| Error::parse(0, "record is not a score"))?;
        let base_kind: ModelKind = rec
            .field("base_kind")?
            .parse()
            .map_err(|_| Error::parse(0, "unknown base kind"))?;
        let classes: usize = rec.parsed("classes")?;
        let dim: usize = rec.parsed("dim")?;
        let scorer = if kind == ScoreKind::Baseline {
            if !rec.rows.is_empty() || !rec.biases.is_empty() {
                return Err(Error::parse(0, "baseline score carries no parameters"));
            }
            None
        } else {
            if rec.rows.len() != classes
                || rec.biases.len() != classes
                || rec.rows.iter().any(|r| r.len() != dim)
            {
                return Err(Error::parse(0, "score parameters do not match classes x dim"));
            }
            Some(LinearScorer::new(rec.rows.concat(), rec.biases.clone(), dim)?)
        };
        Ok(Self {
            kind,
            base_kind,
            scorer,
            reg_const: rec.parsed("reg_const")?,
            relative_gap: rec.parsed("relative_gap")?,
        })
    }
}
