//! Linear base classifiers: multiclass logistic regression, multiclass and
//! binary hinge-loss SVMs and support vector ordinal regression with
//! implicit constraints. Each is trained by [`bmrm_solve`] on its empirical
//! risk; the risks are exposed as [`RiskOracle`]s.
//!
//! Parameter vectors are laid out per class block `(w_y, b_y)` of length
//! `d + 1`; the ordinal model uses `(w, b_1, ..., b_{Y-1})`. Biases are part
//! of the regularized vector.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataio::Normalizer;
use crate::dataset::{Dataset, Row};
use crate::error::{Error, Result};
use crate::numeric::{argmax, softmax_in_place};
use crate::optimize::{bmrm_solve, BmrmOptions, RiskOracle, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lr,
    MulticlassSvm,
    BinarySvm,
    Svor,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::MulticlassSvm => "svm",
            ModelKind::BinarySvm => "binary_svm",
            ModelKind::Svor => "svor",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lr" => Ok(ModelKind::Lr),
            "svm" => Ok(ModelKind::MulticlassSvm),
            "binary_svm" => Ok(ModelKind::BinarySvm),
            "svor" => Ok(ModelKind::Svor),
            other => Err(Error::Config(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Per-class weight rows `w_y` and biases `b_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearScorer {
    weights: Vec<f64>,
    biases: Vec<f64>,
    dim: usize,
}

impl LinearScorer {
    pub fn new(weights: Vec<f64>, biases: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || weights.len() != biases.len() * dim || biases.is_empty() {
            return Err(Error::Shape(format!(
                "{} weights and {} biases do not form rows of dimension {dim}",
                weights.len(),
                biases.len()
            )));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("scorer parameters must be finite".into()));
        }
        Ok(Self {
            weights,
            biases,
            dim,
        })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            weights: vec![0.0; rows * dim],
            biases: vec![0.0; rows],
            dim,
        }
    }

    /// Unpacks a block parameter vector `((w_y, b_y))_y`.
    pub fn from_blocks(theta: &[f64], rows: usize, dim: usize) -> Result<Self> {
        if theta.len() != rows * (dim + 1) {
            return Err(Error::Shape(format!(
                "parameter vector of length {} does not hold {rows} blocks of {}",
                theta.len(),
                dim + 1
            )));
        }
        let mut weights = Vec::with_capacity(rows * dim);
        let mut biases = Vec::with_capacity(rows);
        for block in theta.chunks(dim + 1) {
            weights.extend_from_slice(&block[..dim]);
            biases.push(block[dim]);
        }
        Self::new(weights, biases, dim)
    }

    pub fn to_blocks(&self) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.rows() * (self.dim + 1));
        for (w, b) in self.weights.chunks(self.dim).zip(&self.biases) {
            theta.extend_from_slice(w);
            theta.push(*b);
        }
        theta
    }

    pub fn rows(&self) -> usize {
        self.biases.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn row_weights(&self, k: usize) -> &[f64] {
        &self.weights[k * self.dim..(k + 1) * self.dim]
    }

    #[inline]
    pub fn activation(&self, k: usize, x: Row<'_>) -> f64 {
        x.dot(self.row_weights(k)) + self.biases[k]
    }

    pub fn activations_into(&self, x: Row<'_>, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.activation(k, x);
        }
    }

    pub fn activations(&self, x: Row<'_>) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.activations_into(x, &mut out);
        out
    }

    /// Re-expresses parameters learned on normalized inputs in raw input space.
    pub fn fold_normalizer(&self, norm: &Normalizer) -> Result<Self> {
        check_norm_dim(norm, self.dim)?;
        let mut weights = self.weights.clone();
        let mut biases = self.biases.clone();
        for (w, b) in weights.chunks_mut(self.dim).zip(&mut biases) {
            for (j, wj) in w.iter_mut().enumerate() {
                let scale = norm.scale(j);
                *b -= *wj * norm.mean(j) / scale;
                *wj /= scale;
            }
        }
        Self::new(weights, biases, self.dim)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            weights: self.weights.iter().map(|w| w * factor).collect(),
            biases: self.biases.iter().map(|b| b * factor).collect(),
            dim: self.dim,
        }
    }
}

fn check_norm_dim(norm: &Normalizer, dim: usize) -> Result<()> {
    if norm.dim() != dim {
        return Err(Error::Shape(format!(
            "normalizer has {} columns, model has {dim}",
            norm.dim()
        )));
    }
    Ok(())
}

/// Parameters of a trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierParams {
    /// One row per class; the binary SVM stores `(-w, -b)` and `(w, b)`.
    Linear(LinearScorer),
    /// Projection `w` and `Y - 1` thresholds.
    Ordinal { weights: Vec<f64>, thresholds: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    pub kind: ModelKind,
    pub num_classes: usize,
    pub dim: usize,
    pub params: ClassifierParams,
    pub reg_const: f64,
    pub relative_gap: f64,
}

impl TrainedClassifier {
    pub fn linear(&self) -> Option<&LinearScorer> {
        match &self.params {
            ClassifierParams::Linear(s) => Some(s),
            ClassifierParams::Ordinal { .. } => None,
        }
    }

    fn check_row(&self, x: Row<'_>) -> Result<()> {
        match x {
            Row::Dense(v) if v.len() != self.dim => Err(Error::Shape(format!(
                "row has {} features, model expects {}",
                v.len(),
                self.dim
            ))),
            Row::Sparse(v) if v.last().is_some_and(|&(j, _)| j as usize >= self.dim) => {
                Err(Error::Shape(format!("sparse row index beyond dimension {}", self.dim)))
            }
            _ => Ok(()),
        }
    }

    fn check_dataset(&self, data: &Dataset) -> Result<()> {
        if data.dim() != self.dim {
            return Err(Error::Shape(format!(
                "dataset has {} features, model expects {}",
                data.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Ordinal projection `<x, w>`.
    fn projection(&self, x: Row<'_>) -> Option<(f64, &[f64])> {
        match &self.params {
            ClassifierParams::Ordinal {
                weights,
                thresholds,
            } => Some((x.dot(weights), thresholds)),
            ClassifierParams::Linear(_) => None,
        }
    }

    pub(crate) fn predict_unchecked(&self, x: Row<'_>) -> usize {
        match &self.params {
            ClassifierParams::Linear(s) => argmax(&s.activations(x)) + 1,
            ClassifierParams::Ordinal {
                weights,
                thresholds,
            } => {
                let p = x.dot(weights);
                1 + thresholds.iter().filter(|&&b| p > b).count()
            }
        }
    }

    /// Predicted 1-based label.
    pub fn predict(&self, x: Row<'_>) -> Result<usize> {
        self.check_row(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        self.check_dataset(data)?;
        Ok((0..data.len()).map(|i| self.predict_unchecked(data.row(i))).collect())
    }

    /// Softmax posterior of a logistic regression model.
    pub fn posterior(&self, x: Row<'_>) -> Result<Vec<f64>> {
        self.check_row(x)?;
        match (&self.kind, &self.params) {
            (ModelKind::Lr, ClassifierParams::Linear(s)) => {
                let mut p = s.activations(x);
                softmax_in_place(&mut p);
                Ok(p)
            }
            _ => Err(Error::Contract(format!(
                "posterior requires a logistic regression model, got {}",
                self.kind.name()
            ))),
        }
    }

    pub(crate) fn baseline_unchecked(&self, x: Row<'_>) -> f64 {
        match (&self.kind, &self.params) {
            (ModelKind::Lr, ClassifierParams::Linear(s)) => {
                let mut p = s.activations(x);
                softmax_in_place(&mut p);
                1.0 - p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
            (_, ClassifierParams::Linear(s)) => {
                -s.activations(x).into_iter().fold(f64::NEG_INFINITY, f64::max)
            }
            (_, ClassifierParams::Ordinal { .. }) => {
                let (p, thresholds) = self.projection(x).expect("ordinal params");
                -thresholds
                    .iter()
                    .map(|b| (p - b).abs())
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Model-derived uncertainty; higher means more uncertain.
    ///
    /// Logistic regression uses `1 - max_y p(y|x)`; the SVMs use the negated
    /// largest class activation (for the binary model `-|<w,x> + b|`); the
    /// ordinal model uses the negated distance to the closest threshold.
    pub fn baseline_uncertainty(&self, x: Row<'_>) -> Result<f64> {
        self.check_row(x)?;
        Ok(self.baseline_unchecked(x))
    }

    /// Expresses the model in raw feature space given the normalizer it was
    /// trained behind.
    pub fn fold_normalizer(&self, norm: &Normalizer) -> Result<Self> {
        let params = match &self.params {
            ClassifierParams::Linear(s) => ClassifierParams::Linear(s.fold_normalizer(norm)?),
            ClassifierParams::Ordinal {
                weights,
                thresholds,
            } => {
                check_norm_dim(norm, weights.len())?;
                let shift: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * norm.mean(j) / norm.scale(j))
                    .sum();
                ClassifierParams::Ordinal {
                    weights: weights
                        .iter()
                        .enumerate()
                        .map(|(j, w)| w / norm.scale(j))
                        .collect(),
                    thresholds: thresholds.iter().map(|b| b + shift).collect(),
                }
            }
        };
        Ok(Self {
            params,
            ..self.clone()
        })
    }
}

fn check_trainable(data: &Dataset) -> Result<()> {
    if data.num_classes() < 2 {
        return Err(Error::DegenerateData("need at least two classes".into()));
    }
    if data.classes_present() < 2 {
        return Err(Error::DegenerateData(
            "training data contains a single class".into(),
        ));
    }
    Ok(())
}

/// Mean negative log-likelihood of the softmax model.
pub struct SoftmaxRisk<'a> {
    pub data: &'a Dataset,
}

impl RiskOracle for SoftmaxRisk<'_> {
    fn dim(&self) -> usize {
        self.data.num_classes() * (self.data.dim() + 1)
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let (y_count, d) = (self.data.num_classes(), self.data.dim());
        let m = self.data.len() as f64;
        let mut act = vec![0.0; y_count];
        let mut total = 0.0;
        for i in 0..self.data.len() {
            let x = self.data.row(i);
            let yi = self.data.labels()[i] - 1;
            for (k, a) in act.iter_mut().enumerate() {
                let block = &theta[k * (d + 1)..(k + 1) * (d + 1)];
                *a = x.dot(&block[..d]) + block[d];
            }
            let target = act[yi];
            let log_z = softmax_in_place(&mut act);
            total += log_z - target;
            for (k, p) in act.iter().enumerate() {
                let coef = (p - if k == yi { 1.0 } else { 0.0 }) / m;
                let block = &mut grad[k * (d + 1)..(k + 1) * (d + 1)];
                x.axpy(coef, &mut block[..d]);
                block[d] += coef;
            }
        }
        total / m
    }
}

/// Crammer-Singer multiclass hinge risk
/// `mean_i max_y ([y != y_i] + a_y(x_i) - a_{y_i}(x_i))`.
pub struct MulticlassHingeRisk<'a> {
    pub data: &'a Dataset,
}

impl RiskOracle for MulticlassHingeRisk<'_> {
    fn dim(&self) -> usize {
        self.data.num_classes() * (self.data.dim() + 1)
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let (y_count, d) = (self.data.num_classes(), self.data.dim());
        let m = self.data.len() as f64;
        let mut act = vec![0.0; y_count];
        let mut total = 0.0;
        for i in 0..self.data.len() {
            let x = self.data.row(i);
            let yi = self.data.labels()[i] - 1;
            for (k, a) in act.iter_mut().enumerate() {
                let block = &theta[k * (d + 1)..(k + 1) * (d + 1)];
                *a = x.dot(&block[..d]) + block[d];
            }
            let base = act[yi];
            for (k, a) in act.iter_mut().enumerate() {
                *a += if k == yi { 0.0 } else { 1.0 } - base;
            }
            let worst = argmax(&act);
            total += act[worst];
            if worst != yi {
                for (k, coef) in [(worst, 1.0 / m), (yi, -1.0 / m)] {
                    let block = &mut grad[k * (d + 1)..(k + 1) * (d + 1)];
                    x.axpy(coef, &mut block[..d]);
                    block[d] += coef;
                }
            }
        }
        total / m
    }
}

/// Binary hinge risk `mean_i max(0, 1 - y_i (<w, x_i> + b))` with label 1
/// mapped to -1 and label 2 to +1.
pub struct BinaryHingeRisk<'a> {
    pub data: &'a Dataset,
}

impl RiskOracle for BinaryHingeRisk<'_> {
    fn dim(&self) -> usize {
        self.data.dim() + 1
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.data.dim();
        let m = self.data.len() as f64;
        let mut total = 0.0;
        for i in 0..self.data.len() {
            let x = self.data.row(i);
            let y = if self.data.labels()[i] == 2 { 1.0 } else { -1.0 };
            let margin = 1.0 - y * (x.dot(&theta[..d]) + theta[d]);
            if margin > 0.0 {
                total += margin;
                x.axpy(-y / m, &mut grad[..d]);
                grad[d] -= y / m;
            }
        }
        total / m
    }
}

/// Ordinal hinge risk with implicit constraints:
/// `mean_i ( sum_{y < y_i} max(0, 1 - <w,x_i> + b_y) + sum_{y >= y_i} max(0, 1 + <w,x_i> - b_y) )`.
pub struct OrdinalHingeRisk<'a> {
    pub data: &'a Dataset,
}

impl RiskOracle for OrdinalHingeRisk<'_> {
    fn dim(&self) -> usize {
        self.data.dim() + self.data.num_classes() - 1
    }

    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.data.dim();
        let thresholds = self.data.num_classes() - 1;
        let m = self.data.len() as f64;
        let mut total = 0.0;
        for i in 0..self.data.len() {
            let x = self.data.row(i);
            let yi = self.data.labels()[i];
            let p = x.dot(&theta[..d]);
            let mut w_coef = 0.0;
            for t in 0..thresholds {
                let b = theta[d + t];
                // thresholds 1..y_i-1 lie below the true label
                let (slack, sign) = if t + 1 < yi {
                    (1.0 - p + b, -1.0)
                } else {
                    (1.0 + p - b, 1.0)
                };
                if slack > 0.0 {
                    total += slack;
                    w_coef += sign;
                    grad[d + t] -= sign / m;
                }
            }
            if w_coef != 0.0 {
                x.axpy(w_coef / m, &mut grad[..d]);
            }
        }
        total / m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub gap_tol: f64,
    pub max_iters: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-3,
            max_iters: 2000,
        }
    }
}

fn solve(oracle: &dyn RiskOracle, c: f64, opts: &TrainOptions) -> Result<SolveReport> {
    bmrm_solve(
        oracle,
        &BmrmOptions::new(c)
            .gap_tol(opts.gap_tol)
            .max_iters(opts.max_iters),
    )
}

/// Trains a base classifier of the given kind. `MulticlassSvm` on two-class
/// data trains the binary SVM.
pub fn train(kind: ModelKind, data: &Dataset, c: f64, opts: &TrainOptions) -> Result<TrainedClassifier> {
    train_with_report(kind, data, c, opts).map(|(m, _)| m)
}

/// [`train`] returning the solver report as well.
pub fn train_with_report(
    kind: ModelKind,
    data: &Dataset,
    c: f64,
    opts: &TrainOptions,
) -> Result<(TrainedClassifier, SolveReport)> {
    check_trainable(data)?;
    let (y_count, d) = (data.num_classes(), data.dim());
    let (kind, report, params) = match kind {
        ModelKind::Lr => {
            let r = solve(&SoftmaxRisk { data }, c, opts)?;
            let s = LinearScorer::from_blocks(&r.theta, y_count, d)?;
            (ModelKind::Lr, r, ClassifierParams::Linear(s))
        }
        ModelKind::MulticlassSvm | ModelKind::BinarySvm if y_count == 2 => {
            let r = solve(&BinaryHingeRisk { data }, c, opts)?;
            let (w, b) = (&r.theta[..d], r.theta[d]);
            let weights = w.iter().map(|v| -v).chain(w.iter().copied()).collect();
            let s = LinearScorer::new(weights, vec![-b, b], d)?;
            (ModelKind::BinarySvm, r, ClassifierParams::Linear(s))
        }
        ModelKind::BinarySvm => {
            return Err(Error::Contract(format!(
                "binary SVM needs two classes, data has {y_count}"
            )))
        }
        ModelKind::MulticlassSvm => {
            let r = solve(&MulticlassHingeRisk { data }, c, opts)?;
            let s = LinearScorer::from_blocks(&r.theta, y_count, d)?;
            (ModelKind::MulticlassSvm, r, ClassifierParams::Linear(s))
        }
        ModelKind::Svor => {
            let r = solve(&OrdinalHingeRisk { data }, c, opts)?;
            let params = ClassifierParams::Ordinal {
                weights: r.theta[..d].to_vec(),
                thresholds: r.theta[d..].to_vec(),
            };
            (ModelKind::Svor, r, params)
        }
    };
    let model = TrainedClassifier {
        kind,
        num_classes: y_count,
        dim: d,
        params,
        reg_const: c,
        relative_gap: report.relative_gap,
    };
    Ok((model, report))
}

pub fn lr_train(data: &Dataset, c: f64) -> Result<TrainedClassifier> {
    train(ModelKind::Lr, data, c, &TrainOptions::default())
}

pub fn svm_train(data: &Dataset, c: f64) -> Result<TrainedClassifier> {
    train(ModelKind::MulticlassSvm, data, c, &TrainOptions::default())
}

pub fn svor_train(data: &Dataset, c: f64) -> Result<TrainedClassifier> {
    train(ModelKind::Svor, data, c, &TrainOptions::default())
}

/// Versioned line-oriented text record shared by classifiers and scores.
///
/// ```text
/// selcls-model 1
/// kind svm
/// classes 3
/// dim 2
/// reg_const 10
/// relative_gap 0.0008
/// w 0.5 -1.25
/// w ...
/// b 0.1 0.2 0.3
/// end
/// ```
///
/// Numbers use Rust's shortest round-trip formatting, so reading a record
/// back reproduces every parameter bit for bit. Lines starting with `#` are
/// comments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamRecord {
    pub fields: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

pub const RECORD_MAGIC: &str = "selcls-model";
pub const RECORD_VERSION: u32 = 1;

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v}").expect("write to string");
    }
    s
}

impl ParamRecord {
    pub fn field(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::parse(0, format!("missing field '{key}'")))
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.field(key)?;
        raw.parse()
            .map_err(|_| Error::parse(0, format!("invalid value '{raw}' for '{key}'")))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{RECORD_MAGIC} {RECORD_VERSION}\n");
        for (k, v) in &self.fields {
            out.push_str(&format!("{k} {v}\n"));
        }
        for r in &self.rows {
            out.push_str(&format!("w {}\n", join(r)));
        }
        out.push_str(&format!("b {}\n", join(&self.biases)));
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str, allowed_fields: &[&str]) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty record"))?;
        let version = header
            .strip_prefix(RECORD_MAGIC)
            .map(str::trim)
            .ok_or_else(|| Error::parse(ln, "missing record header"))?;
        if version != RECORD_VERSION.to_string() {
            return Err(Error::parse(ln, format!("unsupported record version '{version}'")));
        }
        let mut rec = ParamRecord::default();
        let mut saw_bias = false;
        let mut ended = false;
        for (ln, line) in lines {
            if ended {
                return Err(Error::parse(ln, "content after 'end'"));
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let numbers = || -> Result<Vec<f64>> {
                rest.split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::parse(ln, format!("bad number '{t}'")))
                    })
                    .collect()
            };
            match key {
                "w" => rec.rows.push(numbers()?),
                "b" => {
                    rec.biases = numbers()?;
                    saw_bias = true;
                }
                "end" => ended = true,
                k if allowed_fields.contains(&k) => {
                    rec.fields.push((k.to_string(), rest.trim().to_string()))
                }
                k => return Err(Error::parse(ln, format!("unknown field '{k}'"))),
            }
        }
        if !ended || !saw_bias {
            return Err(Error::parse(0, "truncated record"));
        }
        Ok(rec)
    }
}

const MODEL_FIELDS: &[&str] = &["kind", "classes", "dim", "reg_const", "relative_gap", "labels"];

impl TrainedClassifier {
    pub fn to_record(&self, label_values: Option<&[f64]>) -> ParamRecord {
        let mut fields = vec![
            ("kind".into(), self.kind.name().into()),
            ("classes".into(), self.num_classes.to_string()),
            ("dim".into(), self.dim.to_string()),
            ("reg_const".into(), format!("{}", self.reg_const)),
            ("relative_gap".into(), format!("{}", self.relative_gap)),
        ];
        if let Some(l) = label_values {
            fields.push(("labels".into(), join(l)));
        }
        let (rows, biases) = match &self.params {
            ClassifierParams::Linear(s) => (
                (0..s.rows()).map(|k| s.row_weights(k).to_vec()).collect(),
                s.biases().to_vec(),
            ),
            ClassifierParams::Ordinal {
                weights,
                thresholds,
            } => (vec![weights.clone()], thresholds.clone()),
        };
        ParamRecord {
            fields,
            rows,
            biases,
        }
    }

    pub fn to_text(&self, label_values: Option<&[f64]>) -> String {
        self.to_record(label_values).to_text()
    }

    /// Parses a classifier record; returns the model and its label table if stored.
    pub fn from_text(text: &str) -> Result<(Self, Option<Vec<f64>>)> {
        let rec = ParamRecord::parse(text, MODEL_FIELDS)?;
        let kind: ModelKind = rec
            .field("kind")?
            .parse()
            .map_err(|_| Error::parse(0, "unknown model kind"))?;
        let num_classes: usize = rec.parsed("classes")?;
        let dim: usize = rec.parsed("dim")?;
        let reg_const: f64 = rec.parsed("reg_const")?;
        let relative_gap: f64 = rec.parsed("relative_gap")?;
        let labels = match rec.field("labels") {
            Ok(raw) => Some(
                raw.split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|_| Error::parse(0, "bad label value")))
                    .collect::<Result<Vec<f64>>>()?,
            ),
            Err(_) => None,
        };
        if rec.rows.iter().any(|r| r.len() != dim) {
            return Err(Error::parse(0, "weight row length does not match dim"));
        }
        let params = match kind {
            ModelKind::Svor => {
                if rec.rows.len() != 1 || rec.biases.len() + 1 != num_classes {
                    return Err(Error::parse(0, "ordinal record needs one row and Y-1 thresholds"));
                }
                ClassifierParams::Ordinal {
                    weights: rec.rows[0].clone(),
                    thresholds: rec.biases.clone(),
                }
            }
            _ => {
                if rec.rows.len() != num_classes || rec.biases.len() != num_classes {
                    return Err(Error::parse(0, "record needs one row and bias per class"));
                }
                ClassifierParams::Linear(LinearScorer::new(
                    rec.rows.concat(),
                    rec.biases.clone(),
                    dim,
                )?)
            }
        };
        Ok((
            Self {
                kind,
                num_classes,
                dim,
                params,
                reg_const,
                relative_gap,
            },
            labels,
        ))
    }
}
