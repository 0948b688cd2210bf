//! Experiment stages and the end-to-end runner.
//!
//! Every stage writes its artifacts under the configured output directory
//! and has a loader for them, so the CLI can run stages one at a time:
//!
//! ```text
//! config.txt                          normalized configuration
//! data/split.json                     train / test indices
//! data/preprocess.json                fitted PCA and scaler
//! data/summary.json                   dataset counts and timing
//! data/train.csv, data/test.csv       scaled features with labels
//! kernels/<name>_{train,test}.csv     plus <stem>.meta.json
//! kernels/timing.json
//! models/<name>.json, models/timing.json
//! predictions/<name>.csv, predictions/timing.json
//! report.json, report.csv, report.md
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qkdefect_core::circuit::to_text;
use qkdefect_core::linalg::Matrix;
use qkdefect_core::pipeline::{
    generate_synthetic_corpus, select_rows, split, ImageSample, Preprocessor, TARGET_SIDE,
};
use qkdefect_core::qkernel::{psd_project, KernelMatrix};
use qkdefect_core::rng::derive_seed;
use qkdefect_core::statevec::MAX_QUBITS;
use qkdefect_core::svm::{
    evaluate, gamma_scale, predict_rows, train_smo, ClassicalKernel, ClassicalKind, KernelSource,
    Label, SvmModel,
};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, DatasetSource, ExperimentConfig, GridPoint};
use crate::error::{Error, Result};
use crate::io::{self, ManifestEntry, Prediction};
use crate::parallel::{feature_matrix_par, kernel_matrix_par, thread_pool};
use crate::report::{
    emit_report, DatasetSummary, ExperimentReport, Family, Provenance, ReportFormat, ResultRow,
    Seeds, Timing,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seeds for every random stage, all derived from the master seed unless
/// the split seed is pinned. Train and test kernels use one seed each for
/// every grid point.
pub fn seeds(config: &ExperimentConfig) -> Seeds {
    let m = config.seed;
    Seeds {
        master: m,
        data: derive_seed(m, 0),
        split: config.split_seed.unwrap_or_else(|| derive_seed(m, 1)),
        kernel_train: derive_seed(m, 2),
        kernel_test: derive_seed(m, 3),
    }
}

fn config_error(key: &str, msg: impl Into<String>) -> Error {
    ConfigError {
        line: None,
        key: Some(key.into()),
        msg: msg.into(),
    }
    .into()
}

/// Checks everything that can be checked without touching data.
pub fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.n_qubits > MAX_QUBITS {
        return Err(qkdefect_core::Error::Capacity {
            n_qubits: config.n_qubits,
            max: MAX_QUBITS,
        }
        .into());
    }
    for point in config.grid() {
        config
            .kernel_config(&point, 0)
            .validate()
            .map_err(|e| config_error("encoding", e.to_string()))?;
    }
    config
        .svm
        .validate()
        .map_err(|e| config_error("svm", e.to_string()))?;
    for &kind in &config.baselines {
        config
            .classical_kernel(kind, config.gamma.unwrap_or(1.0))
            .validate()
            .map_err(|e| config_error("baselines", e.to_string()))?;
    }
    if let DatasetSource::Synthetic { n, .. } = config.dataset {
        check_sizes(config, n)?;
    }
    Ok(())
}

fn check_sizes(config: &ExperimentConfig, n: usize) -> Result<()> {
    let n_train = (n as f64 * config.train_frac).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(config_error(
            "split.train_frac",
            format!(
                "train_frac {} leaves an empty side for {n} samples",
                config.train_frac
            ),
        ));
    }
    let max_k = (n_train - 1).min(TARGET_SIDE * TARGET_SIDE);
    if config.n_qubits > max_k {
        return Err(config_error(
            "n_qubits",
            format!(
                "{} PCA components need more than {n_train} training images (at most {max_k})",
                config.n_qubits
            ),
        ));
    }
    Ok(())
}

/// What a report row is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Quantum(GridPoint),
    Classical(ClassicalKind),
}

/// One configuration to evaluate: the quantum grid first, then baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSpec {
    pub name: String,
    pub target: Target,
}

impl RowSpec {
    pub fn family(&self) -> Family {
        match self.target {
            Target::Quantum(_) => Family::Quantum,
            Target::Classical(_) => Family::Classical,
        }
    }
}

pub fn row_specs(config: &ExperimentConfig) -> Vec<RowSpec> {
    let quantum = config.grid().into_iter().map(|p| RowSpec {
        name: p.name(),
        target: Target::Quantum(p),
    });
    let classical = config.baselines.iter().map(|&k| RowSpec {
        name: format!("classical-{k}"),
        target: Target::Classical(k),
    });
    quantum.chain(classical).collect()
}

fn load_images(config: &ExperimentConfig, seeds: &Seeds) -> Result<(Vec<ImageSample>, String)> {
    match &config.dataset {
        DatasetSource::Synthetic { n, defect_rate } => Ok((
            generate_synthetic_corpus(*n, *defect_rate, seeds.data)?,
            format!("synthetic(n={n}, defect_rate={defect_rate})"),
        )),
        DatasetSource::Manifest(path) => {
            let entries = io::read_manifest(path)?;
            check_sizes(config, entries.len())?;
            let images = entries
                .iter()
                .map(|e| io::load_image(&e.path, e.label))
                .collect::<Result<Vec<_>>>()?;
            Ok((images, format!("manifest({})", path.display())))
        }
    }
}

/// Writes the configured synthetic corpus as PNGs plus `manifest.csv`
/// under `dir`, returning the manifest path.
pub fn generate_corpus(config: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let DatasetSource::Synthetic { n, defect_rate } = config.dataset else {
        return Err(config_error(
            "dataset.source",
            "generate needs a synthetic dataset",
        ));
    };
    let images = generate_synthetic_corpus(n, defect_rate, seeds(config).data)?;
    let mut entries = Vec::with_capacity(images.len());
    for img in &images {
        let path = dir.join("images").join(format!("{}.png", img.source));
        io::save_png(img, &path)?;
        entries.push(ManifestEntry {
            path,
            label: img.label,
        });
    }
    let manifest = dir.join("manifest.csv");
    io::write_manifest(&manifest, &entries)?;
    Ok(manifest)
}

/// Scaled features and labels for both sides of the split.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub x_train: Matrix,
    pub x_test: Matrix,
    pub y_train: Vec<Label>,
    pub y_test: Vec<Label>,
    pub summary: DatasetSummary,
    pub preprocess_seconds: f64,
}

#[derive(Serialize, Deserialize)]
struct SummaryFile {
    dataset: DatasetSummary,
    preprocess_seconds: f64,
}

impl Prepared {
    fn train_rows(&self) -> Vec<Vec<f64>> {
        self.x_train.row_iter().map(<[f64]>::to_vec).collect()
    }

    fn test_rows(&self) -> Vec<Vec<f64>> {
        self.x_test.row_iter().map(<[f64]>::to_vec).collect()
    }
}

/// Load, featurize, split and fit the PCA + scaler on the training rows.
pub fn preprocess(config: &ExperimentConfig) -> Result<Prepared> {
    let start = Instant::now();
    let out = config.output_dir.as_path();
    io::write_text(out.join("config.txt"), &config.to_text())?;
    let (images, source) = load_images(config, &seeds(config))?;
    let labels: Vec<Label> = images.iter().map(|s| s.label).collect();
    let raw = feature_matrix_par(&images)?;
    let parts = split(
        images.len(),
        config.train_frac,
        seeds(config).split,
        config.stratify.then_some(labels.as_slice()),
    )?;
    let pick = |idx: &[usize]| -> Vec<Label> { idx.iter().map(|&i| labels[i]).collect() };
    let (y_train, y_test) = (pick(&parts.train), pick(&parts.test));
    let raw_train = select_rows(&raw, &parts.train)?;
    let pre = Preprocessor::fit(&raw_train, config.n_qubits)?;
    let x_train = pre.transform(&raw_train)?;
    let x_test = pre.transform(&select_rows(&raw, &parts.test)?)?;

    let count_defect = |y: &[Label]| y.iter().filter(|&&l| l == Label::Defect).count();
    let summary = DatasetSummary {
        source,
        n_samples: images.len(),
        n_train: y_train.len(),
        n_test: y_test.len(),
        n_defect_train: count_defect(&y_train),
        n_defect_test: count_defect(&y_test),
        n_components: config.n_qubits,
    };
    let data = out.join("data");
    io::write_json(data.join("split.json"), &parts)?;
    io::write_json(data.join("preprocess.json"), &pre)?;
    io::write_features(data.join("train.csv"), &x_train, &y_train)?;
    io::write_features(data.join("test.csv"), &x_test, &y_test)?;
    let preprocess_seconds = start.elapsed().as_secs_f64();
    io::write_json(
        data.join("summary.json"),
        &SummaryFile {
            dataset: summary.clone(),
            preprocess_seconds,
        },
    )?;
    Ok(Prepared {
        x_train,
        x_test,
        y_train,
        y_test,
        summary,
        preprocess_seconds,
    })
}

pub fn load_prepared(out: &Path) -> Result<Prepared> {
    let data = out.join("data");
    let (x_train, y_train) = io::read_features(data.join("train.csv"))?;
    let (x_test, y_test) = io::read_features(data.join("test.csv"))?;
    let s: SummaryFile = io::read_json(data.join("summary.json"))?;
    Ok(Prepared {
        x_train,
        x_test,
        y_train,
        y_test,
        summary: s.dataset,
        preprocess_seconds: s.preprocess_seconds,
    })
}

/// Train Gram matrix and test-vs-train matrix for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPair {
    pub spec: RowSpec,
    pub train: Matrix,
    pub test: Matrix,
    pub source: KernelSource,
}

impl KernelPair {
    pub fn psd_projected(&self) -> bool {
        matches!(&self.source, KernelSource::Quantum(m) if m.psd_projected)
    }
}

fn kernel_paths(out: &Path, name: &str) -> (PathBuf, PathBuf) {
    let dir = out.join("kernels");
    (
        dir.join(format!("{name}_train.csv")),
        dir.join(format!("{name}_test.csv")),
    )
}

fn timing_path(out: &Path, stage: &str) -> PathBuf {
    out.join(stage).join("timing.json")
}

fn read_timing(out: &Path, stage: &str) -> Result<BTreeMap<String, f64>> {
    io::read_json(timing_path(out, stage))
}

/// Every kernel matrix of the experiment, written to `kernels/`.
///
/// When `dump_circuits` is set, the overlap circuit of every training
/// Gram entry is also written there as `<name>/k_<i>_<j>.txt`.
pub fn compute_kernels(
    config: &ExperimentConfig,
    data: &Prepared,
    dump_circuits: Option<&Path>,
) -> Result<Vec<KernelPair>> {
    let out = config.output_dir.as_path();
    let seeds = seeds(config);
    let (train_rows, test_rows) = (data.train_rows(), data.test_rows());
    let gamma = config.gamma.unwrap_or_else(|| gamma_scale(&train_rows));
    let mut timing = BTreeMap::new();
    let mut pairs = Vec::new();
    for spec in row_specs(config) {
        let start = Instant::now();
        let (train_path, test_path) = kernel_paths(out, &spec.name);
        let pair = match spec.target {
            Target::Quantum(point) => {
                let train_cfg = config.kernel_config(&point, seeds.kernel_train);
                let mut k_train = kernel_matrix_par(&train_rows, None, &train_cfg)?;
                if config.psd.applies_to(train_cfg.estimation) {
                    k_train = psd_project(&k_train)?;
                }
                let test_cfg = config.kernel_config(&point, seeds.kernel_test);
                let k_test = kernel_matrix_par(&train_rows, Some(&test_rows), &test_cfg)?;
                io::write_kernel(&train_path, &k_train)?;
                io::write_kernel(&test_path, &k_test)?;
                if let Some(dir) = dump_circuits {
                    for i in 0..train_rows.len() {
                        for j in i..train_rows.len() {
                            let c = train_cfg.circuit(&train_rows[i], &train_rows[j])?;
                            let path = dir.join(&spec.name).join(format!("k_{i}_{j}.txt"));
                            io::write_text(path, &to_text(&c))?;
                        }
                    }
                }
                KernelPair {
                    train: k_train.entries,
                    test: k_test.entries,
                    source: KernelSource::Quantum(k_train.meta),
                    spec,
                }
            }
            Target::Classical(kind) => {
                let kernel = config.classical_kernel(kind, gamma);
                let train = kernel.matrix(&train_rows, None)?;
                let test = kernel.matrix(&train_rows, Some(&test_rows))?;
                io::write_matrix_with_meta(&train_path, &train, &kernel)?;
                io::write_matrix_with_meta(&test_path, &test, &kernel)?;
                KernelPair {
                    train,
                    test,
                    source: KernelSource::Classical(kernel),
                    spec,
                }
            }
        };
        timing.insert(pair.spec.name.clone(), start.elapsed().as_secs_f64());
        pairs.push(pair);
    }
    io::write_json(timing_path(out, "kernels"), &timing)?;
    Ok(pairs)
}

pub fn load_kernels(config: &ExperimentConfig) -> Result<Vec<KernelPair>> {
    let out = config.output_dir.as_path();
    row_specs(config)
        .into_iter()
        .map(|spec| {
            let (train_path, test_path) = kernel_paths(out, &spec.name);
            Ok(match spec.target {
                Target::Quantum(_) => {
                    let train: KernelMatrix = io::read_kernel(&train_path)?;
                    let test = io::read_kernel(&test_path)?;
                    KernelPair {
                        train: train.entries,
                        test: test.entries,
                        source: KernelSource::Quantum(train.meta),
                        spec,
                    }
                }
                Target::Classical(_) => {
                    let (train, kernel) =
                        io::read_matrix_with_meta::<ClassicalKernel>(&train_path)?;
                    let test = io::read_matrix(&test_path)?;
                    KernelPair {
                        train,
                        test,
                        source: KernelSource::Classical(kernel),
                        spec,
                    }
                }
            })
        })
        .collect()
}

fn model_path(out: &Path, name: &str) -> PathBuf {
    out.join("models").join(format!("{name}.json"))
}

fn predictions_path(out: &Path, name: &str) -> PathBuf {
    out.join("predictions").join(format!("{name}.csv"))
}

/// One SVM per kernel, written to `models/`.
pub fn train_models(
    config: &ExperimentConfig,
    data: &Prepared,
    kernels: &[KernelPair],
) -> Result<Vec<SvmModel>> {
    let out = config.output_dir.as_path();
    let train_ref = Path::new("data").join("train.csv").display().to_string();
    let mut timing = BTreeMap::new();
    let mut models = Vec::new();
    for k in kernels {
        let start = Instant::now();
        let mut model = train_smo(&k.train, &data.y_train, &config.svm)?;
        timing.insert(k.spec.name.clone(), start.elapsed().as_secs_f64());
        model.kernel = Some(k.source.clone());
        model.train_ref = Some(train_ref.clone());
        io::write_json(model_path(out, &k.spec.name), &model)?;
        models.push(model);
    }
    io::write_json(timing_path(out, "models"), &timing)?;
    Ok(models)
}

pub fn load_models(config: &ExperimentConfig) -> Result<Vec<SvmModel>> {
    row_specs(config)
        .iter()
        .map(|s| io::read_json(model_path(&config.output_dir, &s.name)))
        .collect()
}

/// Labels and decision values for the test rows, written to `predictions/`.
pub fn predict_all(
    config: &ExperimentConfig,
    kernels: &[KernelPair],
    models: &[SvmModel],
) -> Result<Vec<Vec<Prediction>>> {
    let out = config.output_dir.as_path();
    let mut timing = BTreeMap::new();
    let mut all = Vec::new();
    for (k, model) in kernels.iter().zip(models) {
        let start = Instant::now();
        let preds: Vec<Prediction> = predict_rows(model, &k.test)?
            .into_iter()
            .enumerate()
            .map(|(index, (label, decision))| Prediction {
                index,
                label,
                decision,
            })
            .collect();
        timing.insert(k.spec.name.clone(), start.elapsed().as_secs_f64());
        io::write_predictions(predictions_path(out, &k.spec.name), &preds)?;
        all.push(preds);
    }
    io::write_json(timing_path(out, "predictions"), &timing)?;
    Ok(all)
}

pub fn load_predictions(config: &ExperimentConfig) -> Result<Vec<Vec<Prediction>>> {
    row_specs(config)
        .iter()
        .map(|s| io::read_predictions(predictions_path(&config.output_dir, &s.name)))
        .collect()
}

/// Scores every configuration and assembles the report from the persisted
/// stage timings. Writes `report.json`.
pub fn evaluate_all(
    config: &ExperimentConfig,
    data: &Prepared,
    kernels: &[KernelPair],
    models: &[SvmModel],
    predictions: &[Vec<Prediction>],
) -> Result<ExperimentReport> {
    let out = config.output_dir.as_path();
    let (kt, mt, pt) = (
        read_timing(out, "kernels")?,
        read_timing(out, "models")?,
        read_timing(out, "predictions")?,
    );
    let secs = |t: &BTreeMap<String, f64>, name: &str| t.get(name).copied().unwrap_or(0.0);
    let mut rows = Vec::new();
    let mut baselines = Vec::new();
    for ((k, model), preds) in kernels.iter().zip(models).zip(predictions) {
        let name = &k.spec.name;
        let labels: Vec<Label> = preds.iter().map(|p| p.label).collect();
        let metrics = evaluate(&labels, &data.y_test)
            .map_err(|e| Error::format(predictions_path(out, name), e))?;
        let (kernel, estimation, dd) = match k.spec.target {
            Target::Quantum(p) => (
                p.encoding.to_string(),
                config.estimation(p.mode).to_string(),
                p.dd.map_or("none", |d| d.name()).to_owned(),
            ),
            Target::Classical(kind) => (kind.to_string(), "-".into(), "-".into()),
        };
        let row = ResultRow {
            name: name.clone(),
            family: k.spec.family(),
            kernel,
            estimation,
            dd,
            psd_projected: k.psd_projected(),
            n_support: model.support_indices.len(),
            converged: model.converged,
            metrics,
            kernel_seconds: secs(&kt, name),
            svm_seconds: secs(&mt, name) + secs(&pt, name),
        };
        match row.family {
            Family::Quantum => rows.push(row),
            Family::Classical => baselines.push(row),
        }
    }
    let stage_total: f64 = [&kt, &mt, &pt].iter().flat_map(|t| t.values()).sum();
    let report = ExperimentReport {
        provenance: Provenance {
            toolkit_version: VERSION.into(),
            config_hash: config.hash(),
            seeds: seeds(config),
        },
        dataset: data.summary.clone(),
        n_qubits: config.n_qubits,
        rows,
        baselines,
        timing: Timing {
            preprocess_seconds: data.preprocess_seconds,
            total_seconds: data.preprocess_seconds + stage_total,
        },
    };
    io::write_json(out.join("report.json"), &report)?;
    Ok(report)
}

/// Writes `report.csv` and `report.md` next to `report.json`.
pub fn write_reports(report: &ExperimentReport, out: &Path) -> Result<()> {
    emit_report(report, ReportFormat::Csv, out.join("report.csv"))?;
    emit_report(report, ReportFormat::Markdown, out.join("report.md"))
}

/// Runs every stage and writes all artifacts under `config.output_dir`.
/// `threads` sizes the worker pool (all cores when `None`); results do not
/// depend on it.
pub fn run_experiment(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ExperimentReport> {
    validate(config)?;
    thread_pool(threads).install(|| {
        let data = preprocess(config)?;
        let kernels = compute_kernels(config, &data, None)?;
        let models = train_models(config, &data, &kernels)?;
        let predictions = predict_all(config, &kernels, &models)?;
        let report = evaluate_all(config, &data, &kernels, &models, &predictions)?;
        write_reports(&report, &config.output_dir)?;
        Ok(report)
    })
}
