//! Dataset input: LibSVM and numeric CSV parsers, the five-way split
//! protocol, feature standardization, ordinal binning of regression targets
//! and JSON dataset manifests.

use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Features, Row};
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::rng::Rng;

/// Remaps raw label values to `1..=Y` by their sorted order.
pub fn remap_labels(raw: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut values: Vec<f64> = raw.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let labels = raw
        .iter()
        .map(|v| values.partition_point(|u| u < v) + 1)
        .collect();
    (labels, values)
}

fn parse_number(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("invalid {what} '{tok}'")))
}

/// Parses `<label> <index>:<value> ...` lines with 1-based, strictly
/// increasing indices. Blank lines and `#` comments are skipped; the feature
/// dimension is the largest index seen.
pub fn parse_libsvm<R: Read>(reader: R) -> Result<Dataset> {
    let mut raw_labels = Vec::new();
    let mut rows = Vec::new();
    let mut dim = 0usize;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let ln = i + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let label = parse_number(toks.next().expect("nonempty line"), ln, "label")?;
        let mut row: Vec<(u32, f64)> = Vec::new();
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(ln, format!("malformed token '{tok}'")))?;
            let idx: u32 = idx
                .parse()
                .ok()
                .filter(|&j| j >= 1)
                .ok_or_else(|| Error::parse(ln, format!("invalid index '{idx}'")))?;
            let val = parse_number(val, ln, "value")?;
            if row.last().is_some_and(|&(prev, _)| prev >= idx - 1) {
                return Err(Error::parse(ln, format!("index {idx} is not increasing")));
            }
            row.push((idx - 1, val));
            dim = dim.max(idx as usize);
        }
        raw_labels.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(0, "empty LibSVM file"));
    }
    let (labels, values) = remap_labels(&raw_labels);
    Dataset::with_label_values(
        Features::Sparse {
            rows,
            dim: dim.max(1),
        },
        labels,
        values.len(),
        values,
    )
}

/// Writes the dataset in LibSVM form with raw label values; zero entries of
/// dense rows are omitted.
pub fn serialize_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    let raw = data.raw_targets();
    for (i, label) in raw.iter().enumerate() {
        out.push_str(&label.to_string());
        let mut push = |j: usize, v: f64| out.push_str(&format!(" {}:{}", j + 1, v));
        match data.row(i) {
            Row::Dense(x) => x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .for_each(|(j, &v)| push(j, v)),
            Row::Sparse(x) => x.iter().for_each(|&(j, v)| push(j as usize, v)),
        }
        out.push('\n');
    }
    out
}

/// Parses a rectangular numeric CSV. A first line with any non-numeric cell
/// is treated as a header. `label_column` is 0-based; `None` selects the last
/// column.
pub fn parse_csv<R: Read>(reader: R, label_column: Option<usize>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut width = None;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        let ln = rec.position().map_or(i + 1, |p| p.line() as usize);
        let cells: Vec<Option<f64>> = rec
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        if i == 0 && cells.iter().any(Option::is_none) {
            continue;
        }
        let w = *width.get_or_insert(cells.len());
        if cells.len() != w {
            return Err(Error::parse(ln, format!("row has {} cells, expected {w}", cells.len())));
        }
        if w < 2 {
            return Err(Error::parse(ln, "need at least one feature and a label column"));
        }
        let lc = label_column.unwrap_or(w - 1);
        if lc >= w {
            return Err(Error::Config(format!("label column {lc} beyond {w} columns")));
        }
        for (j, c) in cells.iter().enumerate() {
            let v = c.ok_or_else(|| {
                Error::parse(ln, format!("non-numeric cell in column {}", j + 1))
            })?;
            if j == lc {
                raw_labels.push(v);
            } else {
                values.push(v);
            }
        }
    }
    let Some(w) = width else {
        return Err(Error::parse(0, "empty CSV file"));
    };
    let (labels, label_values) = remap_labels(&raw_labels);
    Dataset::with_label_values(
        Features::Dense { values, dim: w - 1 },
        labels,
        label_values.len(),
        label_values,
    )
}

/// Trn1/Val1/Trn2/Val2/Tst ratios and the seed of one split replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub ratios: [f64; 5],
    pub seed: u64,
    pub replicate: u64,
}

pub const DEFAULT_RATIOS: [f64; 5] = [30.0, 10.0, 30.0, 10.0, 20.0];

pub const SPLIT_NAMES: [&str; 5] = ["trn1", "val1", "trn2", "val2", "tst"];

impl SplitPlan {
    pub fn new(ratios: [f64; 5], seed: u64, replicate: u64) -> Result<Self> {
        let total: f64 = ratios.iter().sum();
        if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || (total - 100.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split ratios {ratios:?} must be nonnegative and sum to 100"
            )));
        }
        Ok(Self {
            ratios,
            seed,
            replicate,
        })
    }

    /// The generator that shuffles this replicate.
    pub fn rng(&self) -> Rng {
        Rng::with_stream(self.seed, self.replicate)
    }
}

/// Split sizes by largest-remainder rounding of `n * ratio / 100`; ties in
/// the remainder go to the earlier split.
pub fn split_sizes(n: usize, ratios: &[f64; 5]) -> [usize; 5] {
    let total: f64 = ratios.iter().sum();
    let quotas: Vec<f64> = ratios.iter().map(|r| n as f64 * r / total).collect();
    let mut sizes = [0usize; 5];
    for (s, q) in sizes.iter_mut().zip(&quotas) {
        *s = q.floor() as usize;
    }
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())));
    let left = n - sizes.iter().sum::<usize>();
    for &k in order.iter().take(left) {
        sizes[k] += 1;
    }
    sizes
}

/// Shuffles `0..n` and cuts it into the five splits.
pub fn make_splits(n: usize, plan: &SplitPlan, rng: &mut Rng) -> Result<[Vec<usize>; 5]> {
    let sizes = split_sizes(n, &plan.ratios);
    if n < 5 || sizes.iter().zip(&plan.ratios).any(|(&s, &r)| r > 0.0 && s == 0) {
        return Err(Error::Size(format!(
            "{n} samples cannot fill splits with ratios {:?}",
            plan.ratios
        )));
    }
    let perm = rng.permutation(n);
    let mut out: [Vec<usize>; 5] = Default::default();
    let mut start = 0;
    for (k, &s) in sizes.iter().enumerate() {
        out[k] = perm[start..start + s].to_vec();
        start += s;
    }
    Ok(out)
}

pub const STD_FLOOR: f64 = 1e-12;

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Normalizer {
    pub fn new(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != std.len() || mean.is_empty() {
            return Err(Error::Shape("mean and std must have equal nonzero length".into()));
        }
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self, j: usize) -> f64 {
        self.mean[j]
    }

    pub fn std(&self, j: usize) -> f64 {
        self.std[j]
    }

    /// Divisor actually used for column `j`.
    pub fn scale(&self, j: usize) -> f64 {
        self.std[j].max(STD_FLOOR)
    }

    /// Normalizer undoing this one. Folding raw-space parameters with it
    /// gives the equivalent normalized-space parameters.
    pub fn inverse(&self) -> Normalizer {
        let (mean, std) = (0..self.dim())
            .map(|j| (-self.mean[j] / self.scale(j), 1.0 / self.scale(j)))
            .unzip();
        Normalizer { mean, std }
    }

    pub fn transform_row(&self, x: Row<'_>) -> Vec<f64> {
        let mut v = x.to_dense(self.dim());
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = (*vj - self.mean[j]) / self.scale(j);
        }
        v
    }
}

/// Estimates per-column moments on the given rows.
pub fn fit_normalizer(data: &Dataset, indices: &[usize]) -> Result<Normalizer> {
    if indices.is_empty() {
        return Err(Error::Size("cannot fit a normalizer on zero rows".into()));
    }
    let d = data.dim();
    let n = indices.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in indices {
        data.row(i).axpy(1.0 / n, &mut mean);
    }
    let mut var = vec![0.0; d];
    for &i in indices {
        let x = data.row(i).to_dense(d);
        for j in 0..d {
            let c = x[j] - mean[j];
            var[j] += c * c / n;
        }
    }
    Normalizer::new(mean, var.into_iter().map(f64::sqrt).collect())
}

/// Standardized dense copy of `data`.
pub fn apply_normalizer(norm: &Normalizer, data: &Dataset) -> Result<Dataset> {
    if norm.dim() != data.dim() {
        return Err(Error::Shape(format!(
            "normalizer has {} columns, data has {}",
            norm.dim(),
            data.dim()
        )));
    }
    let mut values = Vec::with_capacity(data.len() * data.dim());
    for i in 0..data.len() {
        values.extend(norm.transform_row(data.row(i)));
    }
    data.with_features(Features::Dense {
        values,
        dim: data.dim(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    /// Bin labels in `1..=Y`.
    pub labels: Vec<usize>,
    /// Upper edges of bins `1..Y-1`; a value equal to an edge falls in the lower bin.
    pub edges: Vec<f64>,
    /// Set when fewer than `Y` distinct values exist, so some bins may be empty.
    pub warning: bool,
}

/// Quantile binning of real targets into `y` ordinal classes.
///
/// Edge `k` is the `ceil(k n / y)`-th order statistic. When at least `y`
/// distinct values exist the edges are moved to distinct values so that no
/// bin is empty.
pub fn ordinal_binning(values: &[f64], y: usize) -> Result<Binning> {
    let n = values.len();
    if y < 2 || n < y {
        return Err(Error::Size(format!("cannot bin {n} values into {y} classes")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("binning needs finite values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    let m = distinct.len();
    let mut idx: Vec<usize> = (1..y)
        .map(|k| {
            let e = sorted[(k * n).div_ceil(y) - 1];
            distinct.partition_point(|u| *u < e)
        })
        .collect();
    let warning = m < y;
    if !warning {
        for k in 1..idx.len() {
            idx[k] = idx[k].max(idx[k - 1] + 1);
        }
        for (k, i) in idx.iter_mut().enumerate() {
            *i = (*i).min(m - y + k);
        }
    }
    let edges: Vec<f64> = idx.iter().map(|&i| distinct[i]).collect();
    let labels = values
        .iter()
        .map(|v| 1 + edges.partition_point(|e| e < v))
        .collect();
    Ok(Binning {
        labels,
        edges,
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Libsvm,
    Csv,
}

fn default_ratios() -> [f64; 5] {
    DEFAULT_RATIOS
}

fn default_replicates() -> u64 {
    5
}

/// JSON description of a dataset and its split protocol.
///
/// ```json
/// {"name": "toy", "path": "toy.libsvm", "format": "libsvm",
///  "ratios": [30, 10, 30, 10, 20], "seed": 1, "loss": "zero_one_times100"}
/// ```
///
/// Relative paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub path: PathBuf,
    pub format: DataFormat,
    /// 0-based CSV label column; the last column when absent.
    #[serde(default)]
    pub label_column: Option<usize>,
    #[serde(default = "default_ratios")]
    pub ratios: [f64; 5],
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    pub loss: LossSpec,
    /// Discretize regression targets into this many ordinal classes.
    #[serde(default)]
    pub ordinal_bins: Option<usize>,
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        SplitPlan::new(m.ratios, m.seed, 0)?;
        if m.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut m = Self::from_json(&std::fs::read_to_string(path)?)?;
        if m.path.is_relative() {
            if let Some(dir) = path.parent() {
                m.path = dir.join(&m.path);
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn split_plan(&self, replicate: u64) -> SplitPlan {
        SplitPlan {
            ratios: self.ratios,
            seed: self.seed,
            replicate,
        }
    }

    /// Reads the data file, applying ordinal binning when configured.
    pub fn load_dataset(&self) -> Result<(Dataset, Option<Binning>)> {
        let file = std::fs::File::open(&self.path)?;
        let data = match self.format {
            DataFormat::Libsvm => parse_libsvm(file)?,
            DataFormat::Csv => parse_csv(file, self.label_column)?,
        };
        match self.ordinal_bins {
            None => Ok((data, None)),
            Some(y) => {
                let b = ordinal_binning(&data.raw_targets(), y)?;
                let binned = data.relabel(b.labels.clone(), y)?;
                Ok((binned, Some(b)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn libsvm_basic() {
        let d = parse_libsvm("1 1:0.5 3:2.0\n".as_bytes()).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.dim() >= 3);
        assert_eq!(d.labels(), &[1]);
        assert_eq!(d.row(0).to_dense(3), vec![0.5, 0.0, 2.0]);
    }

    #[test]
    fn libsvm_label_remap() {
        let d = parse_libsvm("+1 1:1\n-1 2:1\n".as_bytes()).unwrap();
        assert_eq!(d.labels(), &[2, 1]);
        assert_eq!(d.label_values(), &[-1.0, 1.0]);
    }

    #[test]
    fn libsvm_errors_carry_line() {
        let e = parse_libsvm("1 1:1\n1 3:1 2:1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(matches!(parse_libsvm("".as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(parse_libsvm("1 0:1\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("a 1:1\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("1 1:x\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_libsvm("1 1:1 1:2\n".as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn libsvm_round_trip() {
        let text = "-1 1:0.5 4:-2\n2 2:1e-7\n0.5 1:3\n";
        let d = parse_libsvm(text.as_bytes()).unwrap();
        let back = serialize_libsvm(&d);
        assert_eq!(back, "-1 1:0.5 4:-2\n2 2:0.0000001\n0.5 1:3\n");
        assert_eq!(parse_libsvm(back.as_bytes()).unwrap(), d);
    }

    #[test]
    fn csv_basic_and_header() {
        let d = parse_csv("1,2,0\n3,4,1\n".as_bytes(), None).unwrap();
        assert_eq!((d.len(), d.dim()), (2, 2));
        assert_eq!(d.labels(), &[1, 2]);
        let h = parse_csv("a,b,y\n1,2,0\n3,4,1\n".as_bytes(), None).unwrap();
        assert_eq!(h, d);
        let first = parse_csv("7,1,2\n5,3,4\n".as_bytes(), Some(0)).unwrap();
        assert_eq!(first.label_values(), &[5.0, 7.0]);
        assert_eq!(first.row(0).to_dense(2), vec![1.0, 2.0]);
    }

    #[test]
    fn csv_errors() {
        let e = parse_csv("1,2,0\n3,4\n".as_bytes(), None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_csv("1,2,0\n3,x,1\n".as_bytes(), None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(parse_csv("".as_bytes(), None).is_err());
    }

    #[test]
    fn split_size_examples() {
        assert_eq!(split_sizes(100, &DEFAULT_RATIOS), [30, 10, 30, 10, 20]);
        assert_eq!(split_sizes(100, &[25.0, 5.0, 20.0, 20.0, 30.0]), [25, 5, 20, 20, 30]);
        assert_eq!(split_sizes(10, &DEFAULT_RATIOS), [3, 1, 3, 1, 2]);
    }

    #[test]
    fn largest_remainder_by_hand() {
        // quotas 2.1 0.7 2.1 0.7 1.4: floors 2 0 2 0 1 leave 2 for the 0.7s
        assert_eq!(split_sizes(7, &DEFAULT_RATIOS), [2, 1, 2, 1, 1]);
    }

    #[test]
    fn split_too_small() {
        let plan = SplitPlan::new(DEFAULT_RATIOS, 0, 0).unwrap();
        assert!(matches!(make_splits(4, &plan, &mut plan.rng()), Err(Error::Size(_))));
        assert!(SplitPlan::new([50.0, 10.0, 30.0, 10.0, 20.0], 0, 0).is_err());
    }

    #[test]
    fn normalizer_examples() {
        let d = Dataset::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0]], vec![1, 2], 2).unwrap();
        let norm = fit_normalizer(&d, &[0, 1]).unwrap();
        assert_eq!((norm.mean(0), norm.std(0)), (2.0, 1.0));
        let t = apply_normalizer(&norm, &d).unwrap();
        assert_eq!(t.row(0).to_dense(2), vec![-1.0, 0.0]);
        assert_eq!(t.row(1).to_dense(2), vec![1.0, 0.0]);
    }

    #[test]
    fn normalizer_on_other_split_is_not_centered() {
        let d = Dataset::from_rows(&[vec![1.0], vec![3.0], vec![10.0]], vec![1, 2, 1], 2).unwrap();
        let norm = fit_normalizer(&d, &[0, 1]).unwrap();
        let t = apply_normalizer(&norm, &d.subset(&[2])).unwrap();
        assert_eq!(t.row(0).to_dense(1), vec![8.0]);
    }

    #[test]
    fn inverse_undoes_transform() {
        let norm = Normalizer::new(vec![2.0, -1.0], vec![4.0, 0.5]).unwrap();
        let inv = norm.inverse();
        let x = [3.0, 7.0];
        let t = norm.transform_row(Row::Dense(&x));
        let back = inv.transform_row(Row::Dense(&t));
        assert!((back[0] - 3.0).abs() < 1e-12 && (back[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn binning_examples() {
        assert_eq!(ordinal_binning(&[1.0, 2.0, 3.0, 4.0], 2).unwrap().labels, vec![1, 1, 2, 2]);
        assert_eq!(ordinal_binning(&[10.0, 20.0, 30.0], 3).unwrap().labels, vec![1, 2, 3]);
        let b = ordinal_binning(&[1.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(b.labels, vec![1, 1, 1, 2]);
        assert!(!b.warning);
        let w = ordinal_binning(&[1.0, 1.0, 2.0, 2.0], 3).unwrap();
        assert!(w.warning);
    }

    #[test]
    fn binning_fills_every_bin_under_heavy_ties() {
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0];
        let b = ordinal_binning(&v, 3).unwrap();
        for k in 1..=3 {
            assert!(b.labels.contains(&k), "{:?}", b.labels);
        }
    }

    #[test]
    fn manifest_parse_and_reject_unknown() {
        let m = DatasetManifest::from_json(
            r#"{"name":"t","path":"t.csv","format":"csv","loss":"mae","ordinal_bins":5}"#,
        )
        .unwrap();
        assert_eq!(m.ratios, DEFAULT_RATIOS);
        assert_eq!(m.replicates, 5);
        assert_eq!(DatasetManifest::from_json(&m.to_json()).unwrap(), m);
        assert!(DatasetManifest::from_json(
            r#"{"name":"t","path":"t","format":"csv","loss":"mae","bogus":1}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn splits_partition(n in 10usize..400, seed in any::<u64>(), rep in 0u64..5) {
            let plan = SplitPlan::new(DEFAULT_RATIOS, seed, rep).unwrap();
            let s = make_splits(n, &plan, &mut plan.rng()).unwrap();
            let again = make_splits(n, &plan, &mut plan.rng()).unwrap();
            prop_assert_eq!(&s, &again);
            let mut all: Vec<usize> = s.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn normalized_moments(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)) {
            let n = rows.len();
            let d = Dataset::from_rows(&rows, vec![1; n], 1).unwrap();
            let idx: Vec<usize> = (0..n).collect();
            let norm = fit_normalizer(&d, &idx).unwrap();
            let t = apply_normalizer(&norm, &d).unwrap();
            for j in 0..3 {
                if norm.std(j) < 1e-6 { continue; }
                let col: Vec<f64> = (0..n).map(|i| t.row(i).to_dense(3)[j]).collect();
                let mean = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
                prop_assert!(mean.abs() <= 1e-10);
                prop_assert!((var.sqrt() - 1.0).abs() <= 1e-10);
            }
        }

        #[test]
        fn binning_is_monotone(values in prop::collection::vec(-50i32..50, 2..80), y in 2usize..6) {
            prop_assume!(values.len() >= y);
            let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
            let b = ordinal_binning(&v, y).unwrap();
            for i in 0..v.len() {
                for j in 0..v.len() {
                    if v[i] <= v[j] {
                        prop_assert!(b.labels[i] <= b.labels[j]);
                    }
                }
            }
            if !b.warning {
                for k in 1..=y {
                    prop_assert!(b.labels.contains(&k));
                }
            }
        }

        #[test]
        fn libsvm_canonical_round_trip(
            rows in prop::collection::vec(prop::collection::btree_map(1u32..30, -1e6f64..1e6, 0..6), 1..20),
            labels in prop::collection::vec(-3i32..4, 20),
        ) {
            let mut text = String::new();
            for (r, l) in rows.iter().zip(&labels) {
                text.push_str(&l.to_string());
                for (j, v) in r {
                    if *v != 0.0 {
                        text.push_str(&format!(" {j}:{v}"));
                    }
                }
                text.push('\n');
            }
            let d = parse_libsvm(text.as_bytes()).unwrap();
            prop_assert_eq!(serialize_libsvm(&d), text);
        }
    }

    #[test]
    fn fold_matches_transform() {
        let d = Dataset::from_rows(&[vec![1.0, 4.0], vec![3.0, 8.0], vec![2.0, 0.0]], vec![1, 2, 1], 2).unwrap();
        let norm = fit_normalizer(&d, &[0, 1, 2]).unwrap();
        let s = crate::models::LinearScorer::new(vec![0.5, -1.0, 2.0, 0.25], vec![0.1, -0.3], 2).unwrap();
        let folded = s.fold_normalizer(&norm).unwrap();
        for i in 0..3 {
            let z = norm.transform_row(d.row(i));
            for k in 0..2 {
                assert_abs_diff_eq!(
                    folded.activation(k, d.row(i)),
                    s.activation(k, Row::Dense(&z)),
                    epsilon = 1e-12
                );
            }
        }
    }
}
