use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use selcls::bench::{
    evaluate_score, run_protocol_many, select_classifier, select_score, split_replicate, BenchDataset,
    ProtocolConfig,
};
use selcls::dataio::{DatasetManifest, Normalizer, SPLIT_NAMES};
use selcls::loss::loss_vector;
use selcls::models::{TrainOptions, TrainedClassifier};
use selcls::rejection::{
    empirical_risk_distribution, evaluate_selector, solve_bounded_coverage, solve_bounded_improvement,
    solve_cost_based, DiscreteRiskDistribution,
};
use selcls::scores::{score_dataset, ScoreKind, ScoreOptions, UncertaintyScore};
use selcls::Dataset;

use crate::benchcfg::{parse_grid, parse_model, BenchConfig};
use crate::error::{in_file, read_file, write_file, CliError, CliResult};
use crate::header::Header;
use crate::{BenchArgs, DataArgs, EvalArgs, InspectArgs, RejectArgs, ScoreArgs, TrainArgs};

/// A manifest's data with the splits of one replicate.
struct Prepared {
    manifest: DatasetManifest,
    seed: u64,
    data: Dataset,
    splits: [Dataset; 5],
    classifier_norm: Normalizer,
    score_norm: Normalizer,
}

impl Prepared {
    fn load(args: &DataArgs) -> CliResult<Self> {
        let manifest = in_file(&args.manifest, DatasetManifest::load(&args.manifest))?;
        let (data, _) = in_file(&manifest.path, manifest.load_dataset())?;
        let seed = args.seed.unwrap_or(manifest.seed);
        let s = split_replicate(&data, manifest.ratios, seed, args.replicate)?;
        Ok(Self {
            manifest,
            seed,
            data,
            splits: s.raw,
            classifier_norm: s.classifier_norm,
            score_norm: s.score_norm,
        })
    }

    fn split(&self, name: &str) -> CliResult<&Dataset> {
        if name == "all" {
            return Ok(&self.data);
        }
        let i = SPLIT_NAMES
            .iter()
            .position(|s| *s == name)
            .ok_or_else(|| CliError::Config(format!("unknown split `{name}`; expected one of {SPLIT_NAMES:?} or all")))?;
        let d = &self.splits[i];
        if d.is_empty() {
            return Err(CliError::Config(format!("split `{name}` is empty")));
        }
        Ok(d)
    }

    fn normalized(&self, norm: &Normalizer, i: usize) -> CliResult<Dataset> {
        Ok(selcls::dataio::apply_normalizer(norm, &self.splits[i])?)
    }
}

fn load_model(path: &Path) -> CliResult<(TrainedClassifier, Option<Vec<f64>>)> {
    in_file(path, TrainedClassifier::from_text(&read_file(path)?))
}

fn load_score(path: &Path) -> CliResult<UncertaintyScore> {
    in_file(path, UncertaintyScore::from_text(&read_file(path)?))
}

fn check_dims(model: &TrainedClassifier, data: &Dataset) -> CliResult<()> {
    if model.dim != data.dim() || model.num_classes != data.num_classes() {
        return Err(CliError::Config(format!(
            "model expects {} features and {} classes, data has {} and {}",
            model.dim,
            model.num_classes,
            data.dim(),
            data.num_classes()
        )));
    }
    Ok(())
}

fn emit(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} {value}");
}

fn as_comments(report: &str) -> String {
    report.lines().map(|l| format!("# {l}\n")).collect()
}

pub fn train(args: &TrainArgs, config: &str) -> CliResult<String> {
    let kind = parse_model(&args.kind)?;
    let grid = parse_grid(&args.c_grid)?;
    let opts = TrainOptions {
        gap_tol: args.gap_tol,
        max_iters: args.max_iters,
    };
    if opts.gap_tol.is_nan() || opts.gap_tol <= 0.0 || opts.max_iters == 0 {
        return Err(CliError::Config("gap tolerance and iteration limit must be positive".into()));
    }
    let p = Prepared::load(&args.data)?;
    let norm = &p.classifier_norm;
    let (trn, val) = (p.normalized(norm, 0)?, p.normalized(norm, 1)?);
    let sel = select_classifier(kind, &trn, &val, p.manifest.loss, &grid, &opts)?;
    let (model, solve) = sel.chosen;
    let model = model.fold_normalizer(norm)?;

    let mut report = String::new();
    emit(&mut report, "chosen_c", grid[sel.index]);
    emit(&mut report, "objective", solve.primal);
    emit(&mut report, "dual_bound", solve.dual_lower_bound);
    emit(&mut report, "relative_gap", solve.relative_gap);
    emit(&mut report, "iterations", solve.iterations);
    emit(&mut report, "converged", solve.converged);
    for (c, r) in grid.iter().zip(&sel.validation) {
        let _ = writeln!(report, "validation_risk {c} {r}");
    }
    let header = Header::new(Some(p.seed), config);
    let body = format!(
        "{}{}{}",
        header.comment(),
        as_comments(&report),
        model.to_text(Some(p.data.label_values()))
    );
    write_file(&args.out, &body)?;
    Ok(report)
}

pub fn score(args: &ScoreArgs, config: &str) -> CliResult<String> {
    let method: ScoreKind = args.method.trim().parse()?;
    let grid = parse_grid(&args.c_grid)?;
    let opts = ScoreOptions {
        gap_tol: args.gap_tol,
        max_iters: args.max_iters,
    };
    if opts.gap_tol.is_nan() || opts.gap_tol <= 0.0 || opts.max_iters == 0 {
        return Err(CliError::Config("gap tolerance and iteration limit must be positive".into()));
    }
    let (raw_base, _) = load_model(&args.model)?;
    let p = Prepared::load(&args.data)?;
    check_dims(&raw_base, &p.data)?;
    let norm = &p.score_norm;
    let base = raw_base.fold_normalizer(&norm.inverse())?;
    let (trn, val) = (p.normalized(norm, 2)?, p.normalized(norm, 3)?);
    let sel = select_score(
        method,
        &base,
        &trn,
        &val,
        p.manifest.loss,
        &grid,
        p.seed.wrapping_add(args.data.replicate),
        1,
        &opts,
    )?;
    let score = sel.chosen.fold_normalizer(norm)?;

    let mut report = String::new();
    if method == ScoreKind::Baseline {
        emit(&mut report, "chosen_c", "none");
    } else {
        emit(&mut report, "chosen_c", score.reg_const);
        emit(&mut report, "relative_gap", score.relative_gap);
        for (c, a) in grid.iter().zip(&sel.validation) {
            let _ = writeln!(report, "validation_aurc {c} {a}");
        }
    }
    let header = Header::new(Some(p.seed), config);
    let body = format!("{}{}{}", header.comment(), as_comments(&report), score.to_text(&raw_base));
    write_file(&args.out, &body)?;
    Ok(report)
}

fn base_and_score(model: &Path, score: Option<&PathBuf>) -> CliResult<(TrainedClassifier, UncertaintyScore)> {
    let (base, _) = load_model(model)?;
    let score = match score {
        Some(path) => load_score(path)?,
        None => UncertaintyScore::baseline(&base),
    };
    Ok((base, score))
}

pub fn eval(args: &EvalArgs, config: &str) -> CliResult<String> {
    let (base, score) = base_and_score(&args.model, args.score.as_ref())?;
    let p = Prepared::load(&args.data)?;
    let data = p.split(&args.split)?;
    check_dims(&base, data)?;
    let (curve, aurc, r90, r100) = evaluate_score(&score, &base, data, p.manifest.loss)?;
    let mut report = String::new();
    emit(&mut report, "samples", data.len());
    emit(&mut report, "aurc", aurc);
    emit(&mut report, "r_at_90", r90);
    emit(&mut report, "r_at_100", r100);
    if let Some(path) = &args.curve {
        let mut csv = Vec::new();
        curve.write_csv(&mut csv).expect("writing to memory");
        let header = Header::new(Some(p.seed), config);
        write_file(path, &format!("{}{}", header.comment(), String::from_utf8_lossy(&csv)))?;
    }
    Ok(report)
}

/// `risk mass` pairs, one per line; masses are normalized to sum to one.
pub fn parse_atoms(text: &str, path: &Path) -> CliResult<DiscreteRiskDistribution> {
    let mut atoms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Vec<f64> = fields.iter().filter_map(|f| f.parse().ok()).collect();
        if fields.len() != 2 || parsed.len() != 2 {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "expected `risk mass`".into(),
            });
        }
        atoms.push((parsed[0], parsed[1]));
    }
    in_file(path, DiscreteRiskDistribution::from_weights(atoms))
}

fn rejection_distribution(args: &RejectArgs) -> CliResult<(DiscreteRiskDistribution, Option<u64>)> {
    if let Some(path) = &args.atoms {
        return Ok((parse_atoms(&read_file(path)?, path)?, None));
    }
    let (Some(manifest), Some(model)) = (&args.manifest, &args.model) else {
        return Err(CliError::Config("give either --atoms or --manifest with --model".into()));
    };
    let (base, score) = base_and_score(model, args.score.as_ref())?;
    let p = Prepared::load(&DataArgs {
        manifest: manifest.clone(),
        seed: args.seed,
        replicate: args.replicate,
    })?;
    let data = p.split(&args.split)?;
    check_dims(&base, data)?;
    let s = score_dataset(&score, &base, data)?;
    let preds = base.predict_dataset(data)?;
    let losses = loss_vector(p.manifest.loss, data, &preds)?;
    Ok((empirical_risk_distribution(&s, &losses)?, Some(p.seed)))
}

pub fn reject(args: &RejectArgs, config: &str) -> CliResult<String> {
    let param = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Config(format!("rejection model `{}` needs --{name}", args.rejection)))
    };
    enum Model {
        Cost(f64),
        Improvement(f64),
        Coverage(f64),
    }
    let model = match args.rejection.as_str() {
        "cost" => Model::Cost(param("epsilon", args.epsilon)?),
        "improvement" => Model::Improvement(param("lambda", args.lambda)?),
        "coverage" => Model::Coverage(param("omega", args.omega)?),
        other => {
            return Err(CliError::Config(format!(
                "unknown rejection model `{other}`; expected cost, improvement or coverage"
            )))
        }
    };
    match model {
        Model::Cost(e) if !(e.is_finite() && e >= 0.0) => {
            return Err(CliError::Config(format!("epsilon must be nonnegative, got {e}")))
        }
        Model::Improvement(l) if !(l.is_finite() && l > 0.0) => {
            return Err(CliError::Config(format!("lambda must be positive, got {l}")))
        }
        Model::Coverage(w) if !(w > 0.0 && w <= 1.0) => {
            return Err(CliError::Config(format!("omega must lie in (0, 1], got {w}")))
        }
        _ => {}
    }
    let (dist, seed) = rejection_distribution(args)?;
    let mut report = String::new();
    let (selector, cost) = match model {
        Model::Cost(e) => (solve_cost_based(&dist, e)?, Some(e)),
        Model::Improvement(l) => {
            let sol = solve_bounded_improvement(&dist, l)?;
            emit(&mut report, "infeasible", sol.infeasible);
            (sol.selector, None)
        }
        Model::Coverage(w) => (solve_bounded_coverage(&dist, w)?, None),
    };
    let ev = evaluate_selector(&dist, &selector, cost);
    let mut out = String::new();
    emit(&mut out, "threshold", selector.threshold);
    emit(&mut out, "accept_prob", selector.accept_prob);
    emit(&mut out, "coverage", ev.coverage);
    match ev.selective_risk {
        Some(r) => emit(&mut out, "selective_risk", r),
        None => emit(&mut out, "selective_risk", "undefined"),
    }
    if let Some(c) = ev.expected_cost {
        emit(&mut out, "expected_cost", c);
    }
    out.push_str(&report);
    if let Some(path) = &args.out {
        write_file(path, &format!("{}{}", Header::new(seed, config).comment(), out))?;
    }
    Ok(out)
}

pub fn bench(args: &BenchArgs, threads: Option<usize>) -> CliResult<String> {
    let text = read_file(&args.config)?;
    let cfg = BenchConfig::parse(&text, &args.config)?;
    let mut datasets = Vec::new();
    for path in &cfg.datasets {
        let m = in_file(path, DatasetManifest::load(path))?;
        let mut ds = in_file(&m.path, BenchDataset::from_manifest(&m))?;
        if let Some(s) = cfg.seed {
            ds.seed = s;
        }
        datasets.push(ds);
    }
    let mut names: Vec<&str> = datasets.iter().map(|d| d.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("dataset names must be unique".into()));
    }
    let protocol = ProtocolConfig {
        base_kind: cfg.model,
        methods: cfg.methods.clone(),
        classifier_grid: cfg.classifier_grid.clone(),
        score_grid: cfg.score_grid.clone(),
        replicates: cfg.replicates,
        train: TrainOptions {
            gap_tol: cfg.gap_tol,
            max_iters: cfg.max_iters,
        },
        score: ScoreOptions {
            gap_tol: cfg.score_gap_tol,
            max_iters: cfg.score_max_iters,
        },
        threads: threads.or(cfg.threads).unwrap_or(1),
    };
    let result = run_protocol_many(&datasets, &protocol)?;

    let mut canonical = format!("{:?}", BenchConfig { output_dir: PathBuf::new(), ..cfg.clone() });
    for d in &datasets {
        let _ = write!(canonical, "|{}:{}", d.name, d.seed);
    }
    let seed = match cfg.seed {
        Some(s) => Some(s),
        None if datasets.iter().all(|d| d.seed == datasets[0].seed) => Some(datasets[0].seed),
        None => None,
    };
    let header = Header::new(seed, &canonical);
    let mut csv = Vec::new();
    result.write_csv(&mut csv).expect("writing to memory");
    let dir = &args.out_dir.clone().unwrap_or(cfg.output_dir.clone());
    write_file(&dir.join("results.csv"), &format!("{}{}", header.comment(), String::from_utf8_lossy(&csv)))?;
    let text_report = result.text_report(cfg.alpha);
    write_file(&dir.join("summary.txt"), &format!("{}{}", header.comment(), text_report))?;
    write_file(&dir.join("summary.json"), &header.wrap_json(&result.json_report(cfg.alpha)))?;
    Ok(text_report)
}

fn describe_model(out: &mut String, m: &TrainedClassifier, labels: Option<&[f64]>) {
    emit(out, "kind", m.kind.name());
    emit(out, "classes", m.num_classes);
    emit(out, "features", m.dim);
    emit(out, "reg_const", m.reg_const);
    emit(out, "relative_gap", m.relative_gap);
    if let Some(l) = labels {
        emit(out, "labels", format!("{l:?}"));
    }
}

pub fn inspect(args: &InspectArgs) -> CliResult<String> {
    let mut out = String::new();
    if let Some(manifest) = &args.manifest {
        let p = Prepared::load(&DataArgs {
            manifest: manifest.clone(),
            seed: args.seed,
            replicate: args.replicate,
        })?;
        emit(&mut out, "name", &p.manifest.name);
        emit(&mut out, "path", p.manifest.path.display());
        emit(&mut out, "loss", p.manifest.loss.name());
        emit(&mut out, "samples", p.data.len());
        emit(&mut out, "features", p.data.dim());
        emit(&mut out, "classes", p.data.num_classes());
        emit(&mut out, "labels", format!("{:?}", p.data.label_values()));
        let mut counts = vec![0usize; p.data.num_classes()];
        for &y in p.data.labels() {
            counts[y - 1] += 1;
        }
        emit(&mut out, "class_counts", format!("{counts:?}"));
        emit(&mut out, "seed", p.seed);
        emit(&mut out, "replicate", args.replicate);
        for (name, s) in SPLIT_NAMES.iter().zip(&p.splits) {
            emit(&mut out, &format!("split_{name}"), s.len());
        }
    }
    if let Some(path) = &args.model {
        let (m, labels) = load_model(path)?;
        describe_model(&mut out, &m, labels.as_deref());
    }
    if let Some(path) = &args.score {
        let s = load_score(path)?;
        emit(&mut out, "score", s.kind.name());
        emit(&mut out, "base", s.base_kind.name());
        if s.kind != ScoreKind::Baseline {
            emit(&mut out, "score_reg_const", s.reg_const);
            emit(&mut out, "score_relative_gap", s.relative_gap);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("nothing to inspect; give --manifest, --model or --score".into()));
    }
    Ok(out)
}
