//! Key-value configuration for `selcls bench`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use selcls::bench::{CLASSIFIER_GRID, SCORE_GRID};
use selcls::models::ModelKind;
use selcls::scores::ScoreKind;

use crate::error::{CliError, CliResult};

pub const GRAMMAR: &str = "\
Bench configuration grammar: one `key = value` per line. Blank lines and
lines starting with `#` are ignored. Lists are comma separated. Unknown or
repeated keys are rejected. Relative paths resolve against the config file.

  datasets          manifest paths (required)
  model             lr | svm | binary_svm | svor (required)
  methods           baseline, sele, reg, tcp (required; tcp needs lr)
  classifier_grid   default 1,10,100,1000
  score_grid        default 0,1,10,100,1000
  replicates        default 5
  seed              overrides every manifest seed
  threads           default 1
  output_dir        default bench-out
  alpha             0.05 | 0.1, default 0.05
  gap_tol           classifier solver tolerance, default 0.001
  max_iters         classifier solver iterations, default 2000
  score_gap_tol     score solver tolerance, default 0.01
  score_max_iters   score solver iterations, default 300";

const KEYS: &[&str] = &[
    "datasets",
    "model",
    "methods",
    "classifier_grid",
    "score_grid",
    "replicates",
    "seed",
    "threads",
    "output_dir",
    "alpha",
    "gap_tol",
    "max_iters",
    "score_gap_tol",
    "score_max_iters",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub datasets: Vec<PathBuf>,
    pub model: ModelKind,
    pub methods: Vec<ScoreKind>,
    pub classifier_grid: Vec<f64>,
    pub score_grid: Vec<f64>,
    pub replicates: u64,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
    pub alpha: f64,
    pub gap_tol: f64,
    pub max_iters: usize,
    pub score_gap_tol: f64,
    pub score_max_iters: usize,
}

/// Comma-separated nonnegative constants.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let grid = s
        .split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(c) if c.is_finite() && c >= 0.0 => Ok(c),
            _ => Err(CliError::Config(format!("invalid constant `{}` in grid `{s}`", t.trim()))),
        })
        .collect::<CliResult<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    Ok(grid)
}

pub fn parse_methods(s: &str) -> CliResult<Vec<ScoreKind>> {
    s.split(',')
        .map(|t| t.trim().parse::<ScoreKind>().map_err(CliError::from))
        .collect()
}

pub fn parse_model(s: &str) -> CliResult<ModelKind> {
    s.trim().parse().map_err(CliError::from)
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::Config(format!("invalid value `{v}` for {key}")))
}

fn positive(key: &str, v: &str) -> CliResult<f64> {
    match number::<f64>(key, v)? {
        x if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(CliError::Config(format!("{key} must be positive"))),
    }
}

impl BenchConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: "expected `key = value`".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("unknown key `{k}` on line {}", i + 1)));
            }
            if kv.insert(k, v).is_some() {
                return Err(CliError::Config(format!("key `{k}` given twice")));
            }
        }
        let required = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| CliError::Config(format!("missing required key `{k}`")))
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let datasets: Vec<PathBuf> = required("datasets")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|p| base.join(p))
            .collect();
        if datasets.is_empty() {
            return Err(CliError::Config("no datasets given".into()));
        }
        let model = parse_model(required("model")?)?;
        let methods = parse_methods(required("methods")?)?;
        let grid = |k: &str, default: &[f64]| kv.get(k).map_or(Ok(default.to_vec()), |v| parse_grid(v));
        let alpha = kv.get("alpha").map_or(Ok(0.05), |v| number::<f64>("alpha", v))?;
        if alpha != 0.05 && alpha != 0.1 {
            return Err(CliError::Config(format!("alpha must be 0.05 or 0.1, got {alpha}")));
        }
        let cfg = Self {
            datasets,
            model,
            methods,
            classifier_grid: grid("classifier_grid", &CLASSIFIER_GRID)?,
            score_grid: grid("score_grid", &SCORE_GRID)?,
            replicates: kv.get("replicates").map_or(Ok(5), |v| number("replicates", v))?,
            seed: kv.get("seed").map(|v| number("seed", v)).transpose()?,
            threads: kv.get("threads").map(|v| number("threads", v)).transpose()?,
            output_dir: base.join(kv.get("output_dir").copied().unwrap_or("bench-out")),
            alpha,
            gap_tol: kv.get("gap_tol").map_or(Ok(1e-3), |v| positive("gap_tol", v))?,
            max_iters: kv.get("max_iters").map_or(Ok(2000), |v| number("max_iters", v))?,
            score_gap_tol: kv.get("score_gap_tol").map_or(Ok(0.01), |v| positive("score_gap_tol", v))?,
            score_max_iters: kv.get("score_max_iters").map_or(Ok(300), |v| number("score_max_iters", v))?,
        };
        if cfg.replicates == 0 || cfg.threads == Some(0) || cfg.max_iters == 0 || cfg.score_max_iters == 0 {
            return Err(CliError::Config(
                "replicates, threads and iteration limits must be at least 1".into(),
            ));
        }
        Ok(cfg)
    }
}
