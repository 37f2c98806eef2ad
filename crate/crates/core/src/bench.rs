//! Experimental protocol and rank statistics.
//!
//! Each replicate splits the data into Trn1/Val1/Trn2/Val2/Tst, standardizes
//! features with moments of Trn1 and Trn2, selects the classifier constant by
//! Val1 risk, selects each score's constant by Val2 AuRC and reports test
//! AuRC, R@90 and R@100. Independent (replicate, constant) jobs run on a
//! rayon pool; results are collected in job order, so output does not depend
//! on the thread count.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataio::{
    apply_normalizer, fit_normalizer, make_splits, DatasetManifest, Normalizer, SplitPlan,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::loss::{loss_vector, LossSpec};
use crate::metrics::{aurc, rc_curve, risk_at_coverage, RiskCoverageCurve};
use crate::models::{train_with_report, ModelKind, TrainOptions, TrainedClassifier};
use crate::optimize::SolveReport;
use crate::rng::Rng;
use crate::scores::{
    fit_block_regression, fit_sele, score_dataset, true_class_posteriors, ScoreKind, ScoreOptions,
    UncertaintyScore,
};

pub const CLASSIFIER_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
pub const SCORE_GRID: [f64; 5] = [0.0, 1.0, 10.0, 100.0, 1000.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub base_kind: ModelKind,
    pub methods: Vec<ScoreKind>,
    pub classifier_grid: Vec<f64>,
    pub score_grid: Vec<f64>,
    pub replicates: u64,
    pub train: TrainOptions,
    pub score: ScoreOptions,
    pub threads: usize,
}

impl ProtocolConfig {
    pub fn new(base_kind: ModelKind, methods: Vec<ScoreKind>) -> Self {
        Self {
            base_kind,
            methods,
            classifier_grid: CLASSIFIER_GRID.to_vec(),
            score_grid: SCORE_GRID.to_vec(),
            replicates: 5,
            train: TrainOptions::default(),
            score: ScoreOptions::default(),
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no score methods given".into()));
        }
        if let Some(m) = self.methods.iter().find(|m| !m.applicable_to(self.base_kind)) {
            return Err(Error::Config(format!(
                "method {} is not applicable to base {}",
                m.name(),
                self.base_kind.name()
            )));
        }
        for (name, grid) in [("classifier", &self.classifier_grid), ("score", &self.score_grid)] {
            if grid.is_empty() || grid.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
                return Err(Error::Config(format!("{name} grid must be nonempty and nonnegative")));
            }
        }
        if self.replicates == 0 || self.threads == 0 {
            return Err(Error::Config("replicates and threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// A dataset with its loss and split protocol.
#[derive(Debug, Clone)]
pub struct BenchDataset {
    pub name: String,
    pub data: Dataset,
    pub loss: LossSpec,
    pub ratios: [f64; 5],
    pub seed: u64,
}

impl BenchDataset {
    pub fn from_manifest(m: &DatasetManifest) -> Result<Self> {
        let (data, _) = m.load_dataset()?;
        Ok(Self {
            name: m.name.clone(),
            data,
            loss: m.loss,
            ratios: m.ratios,
            seed: m.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub dataset: String,
    pub method: String,
    pub replicate: u64,
    pub c_classifier: f64,
    /// `None` for the baseline, which has no constant.
    pub c_score: Option<f64>,
    pub aurc: f64,
    pub r_at_90: f64,
    pub r_at_100: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and standard deviation with divisor equal to the sample count.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub method: String,
    pub aurc: MeanStd,
    pub r_at_90: MeanStd,
    pub r_at_100: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Method label as used in reports, e.g. `svm+sele`.
pub fn method_label(base: ModelKind, method: ScoreKind) -> String {
    format!("{}+{}", base.name(), method.name())
}

/// Raw splits of one replicate. The classifier stage is normalized with
/// Trn1 statistics and the score stage with Trn2 statistics.
#[derive(Debug, Clone)]
pub struct ReplicateSplits {
    pub raw: [Dataset; 5],
    pub classifier_norm: Normalizer,
    pub score_norm: Normalizer,
}

impl ReplicateSplits {
    /// Trn1 and Val1 in classifier space.
    pub fn classifier_stage(&self) -> Result<[Dataset; 2]> {
        Ok([
            apply_normalizer(&self.classifier_norm, &self.raw[0])?,
            apply_normalizer(&self.classifier_norm, &self.raw[1])?,
        ])
    }

    /// Trn2, Val2 and Tst in score space.
    pub fn score_stage(&self) -> Result<[Dataset; 3]> {
        Ok([
            apply_normalizer(&self.score_norm, &self.raw[2])?,
            apply_normalizer(&self.score_norm, &self.raw[3])?,
            apply_normalizer(&self.score_norm, &self.raw[4])?,
        ])
    }

    /// Re-expresses a classifier trained in classifier space for score-space inputs.
    pub fn base_for_score_stage(&self, base: &TrainedClassifier) -> Result<TrainedClassifier> {
        base.fold_normalizer(&self.classifier_norm)?
            .fold_normalizer(&self.score_norm.inverse())
    }
}

/// Replicate `r` uses seed `seed + r` and stream `r`.
pub fn split_replicate(data: &Dataset, ratios: [f64; 5], seed: u64, replicate: u64) -> Result<ReplicateSplits> {
    let plan = SplitPlan::new(ratios, seed.wrapping_add(replicate), replicate)?;
    let idx = make_splits(data.len(), &plan, &mut plan.rng())?;
    let classifier_norm = fit_normalizer(data, &idx[0])?;
    let score_norm = fit_normalizer(data, &idx[2])?;
    let raw = idx.map(|rows| data.subset(&rows));
    Ok(ReplicateSplits { raw, classifier_norm, score_norm })
}

fn mean_loss(model: &TrainedClassifier, data: &Dataset, loss: LossSpec) -> Result<f64> {
    let preds = model.predict_dataset(data)?;
    let l = loss_vector(loss, data, &preds)?;
    Ok(l.iter().sum::<f64>() / l.len() as f64)
}

/// First index of the minimum; earlier grid values win ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// A model chosen from a constant grid by a validation criterion.
#[derive(Debug, Clone)]
pub struct Selection<T> {
    pub chosen: T,
    pub index: usize,
    /// Validation criterion per grid value.
    pub validation: Vec<f64>,
}

/// Trains on `trn` for every constant and keeps the lowest `val` risk.
pub fn select_classifier(
    kind: ModelKind,
    trn: &Dataset,
    val: &Dataset,
    loss: LossSpec,
    grid: &[f64],
    opts: &TrainOptions,
) -> Result<Selection<(TrainedClassifier, SolveReport)>> {
    let mut candidates = grid
        .par_iter()
        .map(|&c| train_with_report(kind, trn, c, opts))
        .collect::<Result<Vec<_>>>()?;
    let validation = candidates
        .iter()
        .map(|(m, _)| mean_loss(m, val, loss))
        .collect::<Result<Vec<_>>>()?;
    let index = argmin(&validation);
    Ok(Selection {
        chosen: candidates.swap_remove(index),
        index,
        validation,
    })
}

/// Fits one score with constant `c`.
pub fn fit_score(
    method: ScoreKind,
    base: &TrainedClassifier,
    trn: &Dataset,
    loss: LossSpec,
    c: f64,
    rng: &mut Rng,
    opts: &ScoreOptions,
) -> Result<UncertaintyScore> {
    let preds = base.predict_dataset(trn)?;
    let (scorer, gap) = match method {
        ScoreKind::Baseline => return Ok(UncertaintyScore::baseline(base)),
        ScoreKind::Sele => {
            let losses = loss_vector(loss, trn, &preds)?;
            fit_sele(&preds, trn, &losses, base.num_classes, c, rng, opts)?
        }
        ScoreKind::Reg => {
            let losses = loss_vector(loss, trn, &preds)?;
            (fit_block_regression(&preds, trn, &losses, base.num_classes, c)?, 0.0)
        }
        ScoreKind::Tcp => {
            let targets = true_class_posteriors(base, trn)?;
            (fit_block_regression(&preds, trn, &targets, base.num_classes, c)?, 0.0)
        }
    };
    Ok(UncertaintyScore {
        kind: method,
        base_kind: base.kind,
        scorer: Some(scorer),
        reg_const: c,
        relative_gap: gap,
    })
}

/// Fits a score for every constant on `trn` and keeps the lowest `val`
/// AuRC. Grid entry `i` draws from stream `stream_base + i` of `seed`. The
/// baseline ignores the grid.
#[allow(clippy::too_many_arguments)]
pub fn select_score(
    method: ScoreKind,
    base: &TrainedClassifier,
    trn: &Dataset,
    val: &Dataset,
    loss: LossSpec,
    grid: &[f64],
    seed: u64,
    stream_base: u64,
    opts: &ScoreOptions,
) -> Result<Selection<UncertaintyScore>> {
    if !method.applicable_to(base.kind) {
        return Err(Error::Config(format!(
            "method {} is not applicable to base {}",
            method.name(),
            base.kind.name()
        )));
    }
    let grid: Vec<f64> = if method == ScoreKind::Baseline { vec![0.0] } else { grid.to_vec() };
    let val_preds = base.predict_dataset(val)?;
    let val_losses = loss_vector(loss, val, &val_preds)?;
    let mut fitted = grid
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut rng = Rng::with_stream(seed, stream_base + i as u64);
            let score = fit_score(method, base, trn, loss, c, &mut rng, opts)?;
            let s = score_dataset(&score, base, val)?;
            Ok((score, aurc(&s, &val_losses)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let validation: Vec<f64> = fitted.iter().map(|f| f.1).collect();
    let index = argmin(&validation);
    Ok(Selection {
        chosen: fitted.swap_remove(index).0,
        index,
        validation,
    })
}

/// Test AuRC, R@90 and R@100 of a score.
pub fn evaluate_score(
    score: &UncertaintyScore,
    base: &TrainedClassifier,
    data: &Dataset,
    loss: LossSpec,
) -> Result<(RiskCoverageCurve, f64, f64, f64)> {
    let s = score_dataset(score, base, data)?;
    let preds = base.predict_dataset(data)?;
    let l = loss_vector(loss, data, &preds)?;
    let curve = rc_curve(&s, &l)?;
    let (a, r90, r100) = (
        curve.area(),
        risk_at_coverage(&curve, 0.9)?,
        risk_at_coverage(&curve, 1.0)?,
    );
    Ok((curve, a, r90, r100))
}

fn run_replicate(ds: &BenchDataset, cfg: &ProtocolConfig, replicate: u64) -> Result<Vec<RunRecord>> {
    let splits = split_replicate(&ds.data, ds.ratios, ds.seed, replicate)?;
    let [trn1, val1] = &splits.classifier_stage()?;
    let trained = select_classifier(cfg.base_kind, trn1, val1, ds.loss, &cfg.classifier_grid, &cfg.train)?
        .chosen
        .0;
    let base = splits.base_for_score_stage(&trained)?;
    let [trn2, val2, tst] = &splits.score_stage()?;
    let mut records = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let stream_base = 1 + (mi * cfg.score_grid.len()) as u64;
        let best = select_score(
            method,
            &base,
            trn2,
            val2,
            ds.loss,
            &cfg.score_grid,
            ds.seed.wrapping_add(replicate),
            stream_base,
            &cfg.score,
        )?
        .chosen;
        let (_, a, r90, r100) = evaluate_score(&best, &base, tst, ds.loss)?;
        records.push(RunRecord {
            dataset: ds.name.clone(),
            method: method_label(cfg.base_kind, method),
            replicate,
            c_classifier: base.reg_const,
            c_score: (method != ScoreKind::Baseline).then_some(best.reg_const),
            aurc: a,
            r_at_90: r90,
            r_at_100: r100,
        });
    }
    Ok(records)
}

/// Runs the protocol on one dataset.
pub fn run_protocol(ds: &BenchDataset, cfg: &ProtocolConfig) -> Result<ExperimentResult> {
    run_protocol_many(std::slice::from_ref(ds), cfg)
}

/// Runs the protocol on several datasets with a shared configuration.
pub fn run_protocol_many(datasets: &[BenchDataset], cfg: &ProtocolConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let jobs: Vec<(usize, u64)> = (0..datasets.len())
        .flat_map(|d| (0..cfg.replicates).map(move |r| (d, r)))
        .collect();
    let per_job = pool.install(|| {
        jobs.par_iter()
            .map(|&(d, r)| run_replicate(&datasets[d], cfg, r))
            .collect::<Result<Vec<_>>>()
    })?;
    let records: Vec<RunRecord> = per_job.into_iter().flatten().collect();
    let summary = summarize(&records);
    Ok(ExperimentResult { records, summary })
}

/// Mean and standard deviation per (dataset, method), in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in records {
        let k = (r.dataset.as_str(), r.method.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(d, m)| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.dataset == d && r.method == m).collect();
            let col = |f: fn(&RunRecord) -> f64| MeanStd::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                dataset: d.to_string(),
                method: m.to_string(),
                aurc: col(|r| r.aurc),
                r_at_90: col(|r| r.r_at_90),
                r_at_100: col(|r| r.r_at_100),
            }
        })
        .collect()
}

impl ExperimentResult {
    pub fn datasets(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.summary {
            if !out.contains(&r.dataset) {
                out.push(r.dataset.clone());
            }
        }
        out
    }

    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.summary {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }

    /// Mean test AuRC grid, datasets by methods; `None` marks a missing cell.
    pub fn aurc_grid(&self) -> Vec<Vec<Option<f64>>> {
        let methods = self.methods();
        self.datasets()
            .iter()
            .map(|d| {
                methods
                    .iter()
                    .map(|m| {
                        self.summary
                            .iter()
                            .find(|r| &r.dataset == d && &r.method == m)
                            .map(|r| r.aurc.mean)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "dataset,method,replicate,C_classifier,C_score,aurc,r_at_90,r_at_100")?;
        for r in &self.records {
            let cs = r.c_score.map_or(String::new(), |c| c.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.dataset, r.method, r.replicate, r.c_classifier, cs, r.aurc, r.r_at_90, r.r_at_100
            )?;
        }
        Ok(())
    }

    /// Plain-text mean/std table followed by ranks and test verdicts when
    /// the grid has at least two datasets and two methods.
    pub fn text_report(&self, alpha: f64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<16} {:<16} {:>18} {:>18} {:>18}", "dataset", "method", "AuRC", "R@90", "R@100");
        for r in &self.summary {
            let f = |m: MeanStd| format!("{:.3} ± {:.3}", m.mean, m.std);
            let _ = writeln!(
                s,
                "{:<16} {:<16} {:>18} {:>18} {:>18}",
                r.dataset,
                r.method,
                f(r.aurc),
                f(r.r_at_90),
                f(r.r_at_100)
            );
        }
        if let Ok(stats) = self.rank_statistics(alpha) {
            let _ = writeln!(s);
            for (m, r) in self.methods().iter().zip(&stats.ranks.average) {
                let _ = writeln!(s, "average rank {m:<16} {r:.3}");
            }
            let _ = writeln!(
                s,
                "friedman statistic {:.4}, critical {:.4} at alpha {alpha}: {}",
                stats.friedman.statistic,
                stats.friedman.critical_value,
                if stats.friedman.reject { "rejected" } else { "not rejected" }
            );
            if let Some(cd) = stats.nemenyi_cd {
                let _ = writeln!(s, "nemenyi critical difference {cd:.4}");
            }
        }
        s
    }

    pub fn json_report(&self, alpha: f64) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            summary: &'a [SummaryRow],
            methods: Vec<String>,
            statistics: Option<RankStatistics>,
        }
        serde_json::to_string_pretty(&Report {
            summary: &self.summary,
            methods: self.methods(),
            statistics: self.rank_statistics(alpha).ok(),
        })
        .expect("report serializes")
    }

    pub fn rank_statistics(&self, alpha: f64) -> Result<RankStatistics> {
        let ranks = rank_methods(&self.aurc_grid())?;
        let friedman = friedman_test(&ranks.per_dataset, alpha)?;
        let nemenyi_cd = nemenyi_cd(ranks.average.len(), ranks.per_dataset.len(), alpha).ok();
        Ok(RankStatistics {
            ranks,
            friedman,
            nemenyi_cd,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankStatistics {
    pub ranks: RankTable,
    pub friedman: FriedmanResult,
    pub nemenyi_cd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankTable {
    /// Ranks per dataset; the smallest AuRC has rank 1 and ties share the mean rank.
    pub per_dataset: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

/// Ranks one row, ties receiving the mean of the ranks they span.
pub fn rank_row(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

pub fn rank_methods(grid: &[Vec<Option<f64>>]) -> Result<RankTable> {
    let k = grid.first().map_or(0, Vec::len);
    if grid.is_empty() || k == 0 {
        return Err(Error::IncompleteGrid("empty result grid".into()));
    }
    let mut per_dataset = Vec::with_capacity(grid.len());
    for (d, row) in grid.iter().enumerate() {
        if row.len() != k {
            return Err(Error::IncompleteGrid(format!("dataset {d} has {} of {k} methods", row.len())));
        }
        let values: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(m, v)| v.ok_or_else(|| Error::IncompleteGrid(format!("dataset {d}, method {m}"))))
            .collect::<Result<_>>()?;
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Numeric(format!("NaN result on dataset {d}")));
        }
        per_dataset.push(rank_row(&values));
    }
    let n = grid.len() as f64;
    let average = (0..k)
        .map(|m| per_dataset.iter().map(|r| r[m]).sum::<f64>() / n)
        .collect();
    Ok(RankTable {
        per_dataset,
        average,
    })
}

const CHI2_05: [f64; 9] = [3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507, 16.919];
const CHI2_10: [f64; 9] = [2.706, 4.605, 6.251, 7.779, 9.236, 10.645, 12.017, 13.362, 14.684];
/// Studentized range statistic divided by sqrt(2), K = 2..10.
const Q_05: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
const Q_10: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

fn table_value(table05: &[f64; 9], table10: &[f64; 9], k: usize, alpha: f64) -> Result<f64> {
    let table = if alpha == 0.05 {
        table05
    } else if alpha == 0.10 {
        table10
    } else {
        return Err(Error::Domain(format!("alpha must be 0.05 or 0.10, got {alpha}")));
    };
    k.checked_sub(2)
        .and_then(|i| table.get(i))
        .copied()
        .ok_or_else(|| Error::Domain(format!("no table entry for {k} methods")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
}

/// `chi2_F = 12 D / (K (K + 1)) [sum_j R_j^2 - K (K + 1)^2 / 4]` against the
/// chi-square quantile with `K - 1` degrees of freedom.
pub fn friedman_test(ranks: &[Vec<f64>], alpha: f64) -> Result<FriedmanResult> {
    let d = ranks.len();
    let k = ranks.first().map_or(0, Vec::len);
    if d < 2 || k < 2 || ranks.iter().any(|r| r.len() != k) {
        return Err(Error::Shape(format!("need at least 2 x 2 ranks, got {d} x {k}")));
    }
    let critical_value = table_value(&CHI2_05, &CHI2_10, k, alpha)?;
    let (df, kf) = (d as f64, k as f64);
    let sum_sq: f64 = (0..k)
        .map(|j| {
            let r = ranks.iter().map(|row| row[j]).sum::<f64>() / df;
            r * r
        })
        .sum();
    let statistic = (12.0 * df / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    Ok(FriedmanResult {
        statistic,
        critical_value,
        reject: statistic > critical_value,
    })
}

/// Nemenyi critical difference `q_alpha(K) sqrt(K (K + 1) / (6 N))`.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Size("need at least one dataset".into()));
    }
    let q = table_value(&Q_05, &Q_10, k, alpha)?;
    let kf = k as f64;
    Ok(q * (kf * (kf + 1.0) / (6.0 * n as f64)).sqrt())
}

/// `100 (baseline - method) / baseline`.
pub fn relative_improvement(baseline: f64, method: f64) -> Result<f64> {
    if baseline.is_nan() || baseline <= 0.0 {
        return Err(Error::Domain(format!("baseline AuRC must be positive, got {baseline}")));
    }
    Ok(100.0 * (baseline - method) / baseline)
}

/// Synthetic datasets with known uncertainty structure.
pub mod synthetic {
    use crate::dataset::Dataset;
    use crate::error::Result;
    use crate::rng::Rng;

    /// Two Gaussian features decide the class by angle sector; a third,
    /// uniform feature sets the label-flip probability `max_flip * x3`.
    /// A margin score cannot see `x3`, a learned score can.
    pub fn noise_by_feature(n: usize, classes: usize, max_flip: f64, seed: u64) -> Result<Dataset> {
        let mut rng = Rng::new(seed);
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = (rng.normal(), rng.normal());
            let noise = rng.uniform();
            let angle = b.atan2(a) + std::f64::consts::PI;
            let sector = ((angle / std::f64::consts::TAU * classes as f64) as usize).min(classes - 1);
            let mut y = sector + 1;
            if rng.uniform() < max_flip * noise {
                y = (sector + 1 + rng.below(classes - 1)) % classes + 1;
            }
            rows.push(vec![a, b, noise]);
            labels.push(y);
        }
        Dataset::from_rows(&rows, labels, classes)
    }

    /// Linearly separable two-class data with a wide gap.
    pub fn separable(n: usize, seed: u64) -> Result<Dataset> {
        let mut rng = Rng::new(seed);
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let y = i % 2 + 1;
            let sign = if y == 2 { 1.0 } else { -1.0 };
            rows.push(vec![sign * (3.0 + rng.uniform()), rng.normal()]);
            labels.push(y);
        }
        Dataset::from_rows(&rows, labels, 2)
    }
}
