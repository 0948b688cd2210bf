//! Experiment configuration.
//!
//! The file format is line oriented: `key = value`, dotted keys for
//! sections, `#` starts a comment, lists are comma separated. Every key has a
//! default; unknown keys are rejected. [`ExperimentConfig::to_text`] writes
//! every key, and parsing that text gives back an equal config.
//!
//! ```text
//! dataset.source = synthetic
//! dataset.n = 60
//! n_qubits = 8
//! encoding.kinds = angle, iqp
//! dd.sequences = none, xyxy
//! kernel.modes = exact, shots
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use qkdefect_core::circuit::{DdSequence, NoiseModel};
use qkdefect_core::encode::{EncodingKind, EncodingSpec, PairPattern, ZzGate};
use qkdefect_core::qkernel::{Estimation, KernelConfig, PsdPolicy, DEFAULT_SHOTS};
use qkdefect_core::svm::{ClassicalKernel, ClassicalKind, SvmParams};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub msg: String,
}

impl Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ", key `{key}`")?;
        }
        write!(f, ": {}", self.msg)
    }
}

impl ConfigError {
    fn new(line: Option<usize>, key: Option<&str>, msg: impl Into<String>) -> Self {
        Self {
            line,
            key: key.map(str::to_owned),
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Synthetic {
        n: usize,
        defect_rate: f64,
    },
    /// CSV with header `path,label`.
    Manifest(PathBuf),
}

/// How kernel entries are estimated; the shot count lives in
/// [`ExperimentConfig::shots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Shots,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "shots" => Ok(Mode::Shots),
            _ => Err(format!(
                "unknown kernel mode '{s}' (expected exact or shots)"
            )),
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Shots => "shots",
        })
    }
}

/// `none` or a decoupling sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct DdChoice(Option<DdSequence>);

impl FromStr for DdChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(DdChoice(None));
        }
        s.parse()
            .map(|d| DdChoice(Some(d)))
            .map_err(|e: qkdefect_core::Error| e.to_string())
    }
}

fn dd_name(d: Option<DdSequence>) -> &'static str {
    d.map_or("none", DdSequence::name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub n_qubits: usize,
    pub encodings: Vec<EncodingKind>,
    pub iqp_depth: usize,
    pub iqp_pairs: PairPattern,
    pub zz_gate: ZzGate,
    pub modes: Vec<Mode>,
    pub shots: u64,
    pub psd: PsdPolicy,
    pub noise: NoiseModel,
    pub dd: Vec<Option<DdSequence>>,
    pub svm: SvmParams,
    pub baselines: Vec<ClassicalKind>,
    /// `None` selects `1 / (n_features * var)` from the training features.
    pub gamma: Option<f64>,
    pub degree: u32,
    pub coef0: f64,
    pub train_frac: f64,
    pub stratify: bool,
    /// Defaults to a seed derived from `seed`.
    pub split_seed: Option<u64>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Synthetic {
                n: 60,
                defect_rate: 0.5,
            },
            n_qubits: 20,
            encodings: vec![EncodingKind::Angle],
            iqp_depth: 2,
            iqp_pairs: PairPattern::Linear,
            zz_gate: ZzGate::Cnot,
            modes: vec![Mode::Exact],
            shots: DEFAULT_SHOTS,
            psd: PsdPolicy::Auto,
            noise: NoiseModel::default(),
            dd: vec![None],
            svm: SvmParams::default(),
            baselines: ClassicalKind::ALL.to_vec(),
            gamma: None,
            degree: 3,
            coef0: 0.0,
            train_frac: 0.7,
            stratify: true,
            split_seed: None,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// One quantum configuration of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub encoding: EncodingKind,
    pub dd: Option<DdSequence>,
    pub mode: Mode,
}

impl GridPoint {
    /// Stable identifier, e.g. `iqp-shots-xyxy`.
    pub fn name(&self) -> String {
        format!(
            "{}-{}-{}",
            self.encoding,
            self.mode,
            dd_name(self.dd).to_ascii_lowercase()
        )
    }
}

impl ExperimentConfig {
    /// Encodings x decoupling choices x modes, in that nesting order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &encoding in &self.encodings {
            for &dd in &self.dd {
                for &mode in &self.modes {
                    out.push(GridPoint { encoding, dd, mode });
                }
            }
        }
        out
    }

    pub fn encoding_spec(&self, kind: EncodingKind) -> EncodingSpec {
        EncodingSpec {
            kind,
            n_qubits: self.n_qubits,
            iqp_depth: self.iqp_depth,
            iqp_pairs: self.iqp_pairs,
            zz_gate: self.zz_gate,
        }
    }

    pub fn estimation(&self, mode: Mode) -> Estimation {
        match mode {
            Mode::Exact => Estimation::Exact,
            Mode::Shots => Estimation::Shots { shots: self.shots },
        }
    }

    pub fn kernel_config(&self, point: &GridPoint, master_seed: u64) -> KernelConfig {
        KernelConfig {
            encoding: self.encoding_spec(point.encoding),
            estimation: self.estimation(point.mode),
            noise: (self.noise != NoiseModel::default()).then_some(self.noise),
            dd: point.dd,
            master_seed,
        }
    }

    pub fn classical_kernel(&self, kind: ClassicalKind, gamma: f64) -> ClassicalKernel {
        ClassicalKernel {
            kind,
            gamma,
            degree: self.degree,
            coef0: self.coef0,
        }
    }

    /// Canonical text form listing every key.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.dataset {
            DatasetSource::Synthetic { n, defect_rate } => {
                kv("dataset.source", &"synthetic");
                kv("dataset.n", n);
                kv("dataset.defect_rate", &Real(*defect_rate));
            }
            DatasetSource::Manifest(path) => {
                kv("dataset.source", &"manifest");
                kv("dataset.manifest", &path.display());
            }
        }
        kv("n_qubits", &self.n_qubits);
        kv("encoding.kinds", &join(&self.encodings));
        kv("encoding.iqp_depth", &self.iqp_depth);
        kv("encoding.iqp_pairs", &self.iqp_pairs);
        kv("encoding.zz_gate", &self.zz_gate);
        kv("kernel.modes", &join(&self.modes));
        kv("kernel.shots", &self.shots);
        kv("kernel.psd", &psd_name(self.psd));
        kv("noise.coherent_idle_z", &Real(self.noise.coherent_idle_z));
        kv("noise.depol_1q", &Real(self.noise.depol_1q));
        kv("noise.depol_2q", &Real(self.noise.depol_2q));
        kv("noise.noisy_pulses", &self.noise.noisy_pulses);
        kv(
            "dd.sequences",
            &self
                .dd
                .iter()
                .map(|d| dd_name(*d))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("svm.c", &Real(self.svm.c));
        kv("svm.tol", &Real(self.svm.tol));
        kv("svm.max_passes", &self.svm.max_passes);
        kv(
            "baselines.kinds",
            &if self.baselines.is_empty() {
                "none".to_owned()
            } else {
                join(&self.baselines)
            },
        );
        match self.gamma {
            Some(g) => kv("baselines.gamma", &Real(g)),
            None => kv("baselines.gamma", &"scale"),
        }
        kv("baselines.degree", &self.degree);
        kv("baselines.coef0", &Real(self.coef0));
        kv("split.train_frac", &Real(self.train_frac));
        kv("split.stratify", &self.stratify);
        if let Some(seed) = self.split_seed {
            kv("split.seed", &seed);
        }
        kv("seed", &self.seed);
        kv("output.dir", &self.output_dir.display());
        s
    }

    /// Hex SHA-256 of [`to_text`](Self::to_text) without the output
    /// directory, so the same experiment hashes alike wherever it is written.
    pub fn hash(&self) -> String {
        let text = ExperimentConfig {
            output_dir: PathBuf::new(),
            ..self.clone()
        }
        .to_text();
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Debug formatting of `f64` is the shortest text that parses back exactly.
struct Real(f64);

impl Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn join<T: Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn psd_name(p: PsdPolicy) -> &'static str {
    match p {
        PsdPolicy::Auto => "auto",
        PsdPolicy::On => "on",
        PsdPolicy::Off => "off",
    }
}

/// Raw `key -> (value, line)` pairs, consumed key by key.
struct Entries(BTreeMap<String, (String, usize)>);

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                ConfigError::new(
                    Some(line),
                    None,
                    format!("expected `key = value`, got `{content}`"),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::new(Some(line), None, "missing key"));
            }
            if value.is_empty() {
                return Err(ConfigError::new(Some(line), Some(key), "missing value"));
            }
            if let Some((_, first)) = map.insert(key.to_owned(), (value.to_owned(), line)) {
                return Err(ConfigError::new(
                    Some(line),
                    Some(key),
                    format!("duplicate key (first set on line {first})"),
                ));
            }
        }
        Ok(Self(map))
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.0.remove(key)
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<(T, usize)>, ConfigError>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .to_ascii_lowercase()
                .parse::<T>()
                .map(|t| Some((t, line)))
                .map_err(|e| {
                    ConfigError::new(Some(line), Some(key), format!("invalid value `{v}`: {e}"))
                }),
        }
    }

    /// Parses `key` and checks it with `ok`, or falls back to `default`.
    fn value<T: FromStr + Display + Copy>(
        &mut self,
        key: &str,
        default: T,
        ok: impl Fn(T) -> bool,
        range: &str,
    ) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        match self.get::<T>(key)? {
            None => Ok(default),
            Some((v, _)) if ok(v) => Ok(v),
            Some((v, line)) => Err(ConfigError::new(
                Some(line),
                Some(key),
                format!("value {v} out of range, expected {range}"),
            )),
        }
    }

    fn list<T: FromStr + PartialEq>(&mut self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|(v, line)| parse_list(key, &v, line))
            .transpose()
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.0.into_iter().min_by_key(|(_, (_, line))| *line) {
            None => Ok(()),
            Some((key, (_, line))) => Err(ConfigError::new(Some(line), Some(&key), "unknown key")),
        }
    }
}

fn parse_list<T: FromStr + PartialEq>(
    key: &str,
    v: &str,
    line: usize,
) -> Result<Vec<T>, ConfigError>
where
    T::Err: Display,
{
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim) {
        let parsed = item.to_ascii_lowercase().parse::<T>().map_err(|e| {
            ConfigError::new(Some(line), Some(key), format!("invalid item `{item}`: {e}"))
        })?;
        if out.contains(&parsed) {
            return Err(ConfigError::new(
                Some(line),
                Some(key),
                format!("`{item}` listed twice"),
            ));
        }
        out.push(parsed);
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut e = Entries::parse(text)?;
    let d = ExperimentConfig::default();
    let finite = |v: f64| v.is_finite();
    let positive = |v: f64| v.is_finite() && v > 0.0;
    let prob = |v: f64| (0.0..=1.0).contains(&v);

    let source = e.get::<String>("dataset.source")?;
    let n = e.get::<usize>("dataset.n")?;
    let rate = e.get::<f64>("dataset.defect_rate")?;
    let manifest = e.raw("dataset.manifest");
    let dataset = match source.as_ref().map(|(s, line)| (s.as_str(), *line)) {
        None | Some(("synthetic", _)) => {
            if let Some((_, line)) = manifest {
                return Err(ConfigError::new(
                    Some(line),
                    Some("dataset.manifest"),
                    "a synthetic dataset takes no manifest; set dataset.source = manifest",
                ));
            }
            let n = match n {
                None => 60,
                Some((v, _)) if v >= 2 => v,
                Some((v, line)) => {
                    return Err(ConfigError::new(
                        Some(line),
                        Some("dataset.n"),
                        format!("value {v} out of range, expected >= 2"),
                    ))
                }
            };
            let defect_rate = match rate {
                None => 0.5,
                Some((v, _)) if prob(v) => v,
                Some((v, line)) => {
                    return Err(ConfigError::new(
                        Some(line),
                        Some("dataset.defect_rate"),
                        format!("value {v} out of range, expected [0, 1]"),
                    ))
                }
            };
            DatasetSource::Synthetic { n, defect_rate }
        }
        Some(("manifest", line)) => {
            for (key, found) in [
                ("dataset.n", n.map(|x| x.1)),
                ("dataset.defect_rate", rate.map(|x| x.1)),
            ] {
                if let Some(l) = found {
                    return Err(ConfigError::new(
                        Some(l),
                        Some(key),
                        "only synthetic datasets take this key",
                    ));
                }
            }
            let (path, _) = manifest.ok_or_else(|| {
                ConfigError::new(
                    Some(line),
                    Some("dataset.manifest"),
                    "required when dataset.source = manifest",
                )
            })?;
            DatasetSource::Manifest(PathBuf::from(path))
        }
        Some((other, line)) => {
            return Err(ConfigError::new(
                Some(line),
                Some("dataset.source"),
                format!("unknown source `{other}` (expected synthetic or manifest)"),
            ))
        }
    };

    let non_empty = |key: &str, line: Option<usize>, len: usize| {
        if len == 0 {
            Err(ConfigError::new(line, Some(key), "list is empty"))
        } else {
            Ok(())
        }
    };

    let n_qubits = e.value("n_qubits", d.n_qubits, |v| v >= 1, ">= 1")?;
    let encodings = e
        .list::<EncodingKind>("encoding.kinds")?
        .unwrap_or(d.encodings);
    non_empty("encoding.kinds", None, encodings.len())?;
    let iqp_depth = e.value("encoding.iqp_depth", d.iqp_depth, |v| v >= 1, ">= 1")?;
    let iqp_pairs = e
        .get::<PairPattern>("encoding.iqp_pairs")?
        .map_or(d.iqp_pairs, |x| x.0);
    let zz_gate = e
        .get::<ZzGate>("encoding.zz_gate")?
        .map_or(d.zz_gate, |x| x.0);
    let modes = e.list::<Mode>("kernel.modes")?.unwrap_or(d.modes);
    let shots = e.value("kernel.shots", d.shots, |v| v >= 1, ">= 1")?;
    let psd = e.get::<PsdPolicy>("kernel.psd")?.map_or(d.psd, |x| x.0);
    let noise = NoiseModel {
        coherent_idle_z: e.value("noise.coherent_idle_z", 0.0, finite, "a finite number")?,
        depol_1q: e.value("noise.depol_1q", 0.0, prob, "[0, 1]")?,
        depol_2q: e.value("noise.depol_2q", 0.0, prob, "[0, 1]")?,
        noisy_pulses: e.get::<bool>("noise.noisy_pulses")?.is_some_and(|x| x.0),
    };
    let dd = e
        .list::<DdChoice>("dd.sequences")?
        .map_or(d.dd, |v| v.into_iter().map(|c| c.0).collect());
    let svm = SvmParams {
        c: e.value("svm.c", d.svm.c, positive, "> 0")?,
        tol: e.value("svm.tol", d.svm.tol, positive, "> 0")?,
        max_passes: e.value("svm.max_passes", d.svm.max_passes, |v| v >= 1, ">= 1")?,
    };
    let baselines = match e.raw("baselines.kinds") {
        None => d.baselines,
        Some((v, _)) if v.trim().eq_ignore_ascii_case("none") => Vec::new(),
        Some((v, line)) => parse_list::<ClassicalKind>("baselines.kinds", &v, line)?,
    };
    let gamma = match e.raw("baselines.gamma") {
        None => None,
        Some((v, _)) if v.eq_ignore_ascii_case("scale") => None,
        Some((v, line)) => match v.parse::<f64>() {
            Ok(g) if positive(g) => Some(g),
            _ => {
                return Err(ConfigError::new(
                    Some(line),
                    Some("baselines.gamma"),
                    format!("invalid value `{v}`, expected `scale` or a number > 0"),
                ))
            }
        },
    };
    let degree = e.value("baselines.degree", d.degree, |v| v >= 1, ">= 1")?;
    let coef0 = e.value("baselines.coef0", d.coef0, finite, "a finite number")?;
    let train_frac = e.value(
        "split.train_frac",
        d.train_frac,
        |v: f64| v > 0.0 && v < 1.0,
        "(0, 1)",
    )?;
    let stratify = e.get::<bool>("split.stratify")?.map_or(d.stratify, |x| x.0);
    let split_seed = e.get::<u64>("split.seed")?.map(|x| x.0);
    let seed = e.value("seed", d.seed, |_| true, "")?;
    let output_dir = e
        .raw("output.dir")
        .map_or(d.output_dir, |(v, _)| PathBuf::from(v));
    e.finish()?;

    Ok(ExperimentConfig {
        dataset,
        n_qubits,
        encodings,
        iqp_depth,
        iqp_pairs,
        zz_gate,
        modes,
        shots,
        psd,
        noise,
        dd,
        svm,
        baselines,
        gamma,
        degree,
        coef0,
        train_frac,
        stratify,
        split_seed,
        seed,
        output_dir,
    })
}
