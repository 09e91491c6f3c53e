//! Scenario files: one TOML document per experiment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use equilib::classical::{InvertibleMap, Partition};
use equilib::quantum::SpectrumFamily;
use equilib::{SamplingScheme, SyntheticSpec};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Matrices larger than this must live in a separate file.
pub const MAX_INLINE_DIM: usize = 32;

pub type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Quantum,
    ClassicalPure,
    ClassicalEnsemble,
    SyntheticProbe,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Quantum => "quantum",
            ScenarioKind::ClassicalPure => "classical-pure",
            ScenarioKind::ClassicalEnsemble => "classical-ensemble",
            ScenarioKind::SyntheticProbe => "synthetic-probe",
        }
    }

    fn is_classical(self) -> bool {
        matches!(
            self,
            ScenarioKind::ClassicalPure | ScenarioKind::ClassicalEnsemble
        )
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Time-average settings. Unset fields take defaults that depend on the
/// kind of system being run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageSpec {
    pub horizon: Option<f64>,
    pub samples: Option<usize>,
    pub scheme: Option<SamplingScheme>,
    #[serde(default)]
    pub seed: u64,
}

/// A dense matrix given inline or as a JSON file of rows of `[re, im]`
/// pairs, relative to the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Inline(Rows),
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSource {
    Diagonal(Vec<f64>),
    Matrix(MatrixSource),
    Random { dim: usize, family: SpectrumFamily },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSource {
    /// Amplitudes, normalized on load.
    Pure(Vec<[f64; 2]>),
    Density(MatrixSource),
    RandomPure {},
    /// Ginibre state of the given rank (full rank by default).
    RandomMixed {
        #[serde(default)]
        rank: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasurementSource {
    /// Vectors of an orthogonal basis, one outcome each.
    Projective(Rows),
    Elements(Vec<MatrixSource>),
    RandomPovm {
        outcomes: usize,
    },
    RandomProjective {
        outcomes: usize,
    },
    NearIdentity {
        outcomes: usize,
        strength: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    pub hamiltonian: HamiltonianSource,
    pub state: StateSource,
    pub measurement: MeasurementSource,
    pub gap_tol: Option<f64>,
    pub degeneracy_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PartitionSource {
    Grid(Partition),
    Random { cells: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub points: usize,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_periodic_bits")]
    pub periodic_bits: u32,
}

fn default_periodic_bits() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSpec {
    pub map: InvertibleMap,
    pub partition: PartitionSource,
    /// Initial point of a pure run; random when absent.
    pub start: Option<Vec<f64>>,
    pub ensemble: Option<EnsembleSpec>,
    /// Chaotic pairs sampled for the decorrelation audit of an ensemble.
    #[serde(default)]
    pub audit_pairs: usize,
}

/// One value in a sweep list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Int(v) => write!(f, "{v}"),
            SweepValue::Float(v) => write!(f, "{v}"),
            SweepValue::Text(v) => f.write_str(v),
        }
    }
}

/// Keys accepted in `[sweep]`.
pub const SWEEP_KEYS: &[&str] = &[
    "bias",
    "cells",
    "delta",
    "dim",
    "epsilon",
    "family",
    "horizon",
    "kind",
    "measurement",
    "outcomes",
    "points",
    "samples",
    "seed",
    "state",
    "strength",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub epsilon: f64,
    #[serde(default)]
    pub average: AverageSpec,
    pub quantum: Option<QuantumSpec>,
    pub classical: Option<ClassicalSpec>,
    pub synthetic: Option<SyntheticSpec>,
    /// Parameter grid; the run set is the Cartesian product of the lists.
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<SweepValue>>,
    /// Directory that relative matrix files resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Resolved parameters of one sweep point, by key.
pub type Params = BTreeMap<String, SweepValue>;

impl Scenario {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let de =
            toml::Deserializer::parse(text).map_err(|e| BenchError::config("", e.to_string()))?;
        let mut s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            BenchError::config(
                if path == "." { "" } else { &path },
                e.into_inner().to_string(),
            )
        })?;
        s.base_dir = base_dir.into();
        s.validate()?;
        Ok(s)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
    }

    /// Structural checks that need no numerics: matching sections, sizes
    /// and sweep keys. Dimension agreement of loaded matrices is checked
    /// when the system is built.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(BenchError::config("epsilon", "must lie in [0, 1)"));
        }
        if let Some(h) = self.average.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(BenchError::config(
                    "average.horizon",
                    "must be finite and positive",
                ));
            }
        }
        if let Some(m) = self.average.samples {
            if m < 2 {
                return Err(BenchError::config("average.samples", "must be at least 2"));
            }
        }
        let required = match self.kind {
            ScenarioKind::Quantum => "quantum",
            ScenarioKind::ClassicalPure | ScenarioKind::ClassicalEnsemble => "classical",
            ScenarioKind::SyntheticProbe => "synthetic",
        };
        for (section, present) in [
            ("quantum", self.quantum.is_some()),
            ("classical", self.classical.is_some()),
            ("synthetic", self.synthetic.is_some()),
        ] {
            if present != (section == required) {
                let msg = if present {
                    format!("section not used by kind {}", self.kind)
                } else {
                    format!("section required by kind {}", self.kind)
                };
                return Err(BenchError::config(section, msg));
            }
        }
        if let Some(q) = &self.quantum {
            validate_quantum(q)?;
        }
        if let Some(c) = &self.classical {
            validate_classical(c, self.kind)?;
        }
        if let Some(s) = &self.synthetic {
            if s.outcomes == 0 {
                return Err(BenchError::config("synthetic.outcomes", "must be positive"));
            }
        }
        for (key, values) in &self.sweep {
            let path = format!("sweep.{key}");
            if !SWEEP_KEYS.contains(&key.as_str()) {
                return Err(BenchError::config(&path, "unknown sweep parameter"));
            }
            // every value must apply to this kind before any run starts
            for v in values {
                let mut probe = self.clone();
                probe.sweep.clear();
                probe.apply(key, v)?;
            }
        }
        Ok(())
    }

    /// Every sweep point, in lexicographic key order with the last key
    /// varying fastest. Without a `[sweep]` table there is one point with
    /// no overrides; a key with an empty list yields no points.
    pub fn grid(&self) -> Vec<Params> {
        let mut points = vec![Params::new()];
        for (key, values) in &self.sweep {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for v in values {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }

    /// Copy of the scenario with the overrides of one sweep point applied.
    pub fn resolve(&self, params: &Params) -> Result<Scenario> {
        let mut s = self.clone();
        s.sweep.clear();
        for (k, v) in params {
            s.apply(k, v)?;
        }
        s.validate()?;
        Ok(s)
    }

    /// Seed of the run: the `average.seed` after overrides.
    pub fn seed(&self) -> u64 {
        self.average.seed
    }

    fn apply(&mut self, key: &str, value: &SweepValue) -> Result<()> {
        let path = format!("sweep.{key}");
        let bad_kind =
            || BenchError::config(&path, format!("does not apply to kind {}", self.kind));
        match key {
            "seed" => {
                let seed = as_u64(value, &path)?;
                self.average.seed = seed;
                if let Some(s) = &mut self.synthetic {
                    s.seed = seed;
                }
            }
            "epsilon" => self.epsilon = as_f64(value, &path)?,
            "samples" => self.average.samples = Some(as_usize(value, &path)?),
            "horizon" => self.average.horizon = Some(as_f64(value, &path)?),
            "dim" => match self.quantum.as_mut().map(|q| &mut q.hamiltonian) {
                Some(HamiltonianSource::Random { dim, .. }) => *dim = as_usize(value, &path)?,
                _ => return Err(BenchError::config(&path, "needs a random Hamiltonian")),
            },
            "family" => match self.quantum.as_mut().map(|q| &mut q.hamiltonian) {
                Some(HamiltonianSource::Random { family, .. }) => {
                    *family = match as_text(value, &path)? {
                        "uniform" => SpectrumFamily::Uniform,
                        "equally-spaced" => SpectrumFamily::EquallySpaced,
                        other => {
                            return Err(BenchError::config(
                                &path,
                                format!("unknown family {other:?}"),
                            ))
                        }
                    }
                }
                _ => return Err(BenchError::config(&path, "needs a random Hamiltonian")),
            },
            "state" => {
                let q = self.quantum.as_mut().ok_or_else(bad_kind)?;
                q.state = match as_text(value, &path)? {
                    "pure" => StateSource::RandomPure {},
                    "mixed" => StateSource::RandomMixed { rank: None },
                    other => {
                        return Err(BenchError::config(
                            &path,
                            format!("unknown state {other:?}"),
                        ))
                    }
                };
            }
            "measurement" => {
                let q = self.quantum.as_mut().ok_or_else(bad_kind)?;
                let outcomes = random_outcomes(&q.measurement)
                    .ok_or_else(|| BenchError::config(&path, "needs a random measurement"))?;
                q.measurement = match as_text(value, &path)? {
                    "povm" => MeasurementSource::RandomPovm { outcomes },
                    "projective" => MeasurementSource::RandomProjective { outcomes },
                    other => {
                        return Err(BenchError::config(
                            &path,
                            format!("unknown measurement {other:?}"),
                        ))
                    }
                };
            }
            "strength" => match self.quantum.as_mut().map(|q| &mut q.measurement) {
                Some(MeasurementSource::NearIdentity { strength, .. }) => {
                    *strength = as_f64(value, &path)?
                }
                _ => {
                    return Err(BenchError::config(
                        &path,
                        "needs a near-identity measurement",
                    ))
                }
            },
            "outcomes" | "cells" => {
                let n = as_usize(value, &path)?;
                match self.kind {
                    ScenarioKind::Quantum if key == "outcomes" => {
                        let q = self.quantum.as_mut().ok_or_else(bad_kind)?;
                        match &mut q.measurement {
                            MeasurementSource::RandomPovm { outcomes }
                            | MeasurementSource::RandomProjective { outcomes }
                            | MeasurementSource::NearIdentity { outcomes, .. } => *outcomes = n,
                            _ => {
                                return Err(BenchError::config(&path, "needs a random measurement"))
                            }
                        }
                    }
                    k if k.is_classical() => {
                        let c = self.classical.as_mut().ok_or_else(bad_kind)?;
                        c.partition = PartitionSource::Random { cells: n };
                    }
                    ScenarioKind::SyntheticProbe if key == "outcomes" => {
                        self.synthetic.as_mut().ok_or_else(bad_kind)?.outcomes = n;
                    }
                    _ => return Err(bad_kind()),
                }
            }
            "bias" => self.synthetic.as_mut().ok_or_else(bad_kind)?.bias = as_f64(value, &path)?,
            "kind" => {
                let s = self.synthetic.as_mut().ok_or_else(bad_kind)?;
                s.kind = match as_text(value, &path)? {
                    "trigonometric" => equilib::SyntheticKind::Trigonometric,
                    "telegraph" => equilib::SyntheticKind::Telegraph,
                    other => {
                        return Err(BenchError::config(
                            &path,
                            format!("unknown probe kind {other:?}"),
                        ))
                    }
                };
            }
            "delta" | "points" => {
                let e = self
                    .classical
                    .as_mut()
                    .and_then(|c| c.ensemble.as_mut())
                    .ok_or_else(|| BenchError::config(&path, "needs classical.ensemble"))?;
                if key == "delta" {
                    e.delta = as_f64(value, &path)?;
                } else {
                    e.points = as_usize(value, &path)?;
                }
            }
            _ => return Err(BenchError::config(&path, "unknown sweep parameter")),
        }
        Ok(())
    }
}

fn random_outcomes(m: &MeasurementSource) -> Option<usize> {
    match m {
        MeasurementSource::RandomPovm { outcomes }
        | MeasurementSource::RandomProjective { outcomes } => Some(*outcomes),
        _ => None,
    }
}

fn validate_matrix(m: &MatrixSource, path: &str) -> Result<()> {
    if let MatrixSource::Inline(rows) = m {
        if rows.len() > MAX_INLINE_DIM {
            return Err(BenchError::config(
                path,
                format!(
                    "inline matrices are limited to {MAX_INLINE_DIM}×{MAX_INLINE_DIM}; use {{ file = \"...\" }}"
                ),
            ));
        }
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err(BenchError::config(
                path,
                "matrix must be square and nonempty",
            ));
        }
    }
    Ok(())
}

fn validate_quantum(q: &QuantumSpec) -> Result<()> {
    match &q.hamiltonian {
        HamiltonianSource::Diagonal(e) if e.is_empty() => {
            return Err(BenchError::config(
                "quantum.hamiltonian.diagonal",
                "no energies",
            ))
        }
        HamiltonianSource::Matrix(m) => validate_matrix(m, "quantum.hamiltonian.matrix")?,
        HamiltonianSource::Random { dim: 0, .. } => {
            return Err(BenchError::config(
                "quantum.hamiltonian.random.dim",
                "must be positive",
            ))
        }
        _ => {}
    }
    match &q.state {
        StateSource::Pure(v) if v.len() > MAX_INLINE_DIM => {
            return Err(BenchError::config(
                "quantum.state.pure",
                "inline vectors are limited to 32 entries",
            ))
        }
        StateSource::Density(m) => validate_matrix(m, "quantum.state.density")?,
        StateSource::RandomMixed { rank: Some(0) } => {
            return Err(BenchError::config(
                "quantum.state.random-mixed.rank",
                "must be positive",
            ))
        }
        _ => {}
    }
    match &q.measurement {
        MeasurementSource::Projective(v) if v.is_empty() => {
            return Err(BenchError::config(
                "quantum.measurement.projective",
                "no vectors",
            ))
        }
        MeasurementSource::Elements(ms) => {
            if ms.is_empty() {
                return Err(BenchError::config(
                    "quantum.measurement.elements",
                    "no elements",
                ));
            }
            for (i, m) in ms.iter().enumerate() {
                validate_matrix(m, &format!("quantum.measurement.elements[{i}]"))?;
            }
        }
        MeasurementSource::RandomPovm { outcomes: 0 }
        | MeasurementSource::RandomProjective { outcomes: 0 }
        | MeasurementSource::NearIdentity { outcomes: 0, .. } => {
            return Err(BenchError::config(
                "quantum.measurement",
                "outcome count must be positive",
            ))
        }
        MeasurementSource::NearIdentity { strength, .. } if !(0.0..=1.0).contains(strength) => {
            return Err(BenchError::config(
                "quantum.measurement.near-identity.strength",
                "must lie in [0, 1]",
            ))
        }
        _ => {}
    }
    for (name, tol) in [
        ("quantum.gap_tol", q.gap_tol),
        ("quantum.degeneracy_tol", q.degeneracy_tol),
    ] {
        if let Some(t) = tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(BenchError::config(name, "must be finite and positive"));
            }
        }
    }
    Ok(())
}

fn validate_classical(c: &ClassicalSpec, kind: ScenarioKind) -> Result<()> {
    let dim = c
        .map
        .dim()
        .map_err(|e| BenchError::config("classical.map", e.to_string()))?;
    match &c.partition {
        PartitionSource::Grid(p) if p.dim() != dim => {
            return Err(BenchError::config(
                "classical.partition.grid.cuts",
                format!(
                    "partition has dimension {} but the map acts on {dim}",
                    p.dim()
                ),
            ))
        }
        PartitionSource::Random { cells: 0 } => {
            return Err(BenchError::config(
                "classical.partition.random.cells",
                "must be positive",
            ))
        }
        _ => {}
    }
    if let Some(start) = &c.start {
        if start.len() != dim {
            return Err(BenchError::config(
                "classical.start",
                format!("expected {dim} coordinates, found {}", start.len()),
            ));
        }
        if kind == ScenarioKind::ClassicalEnsemble {
            return Err(BenchError::config(
                "classical.start",
                "ensembles take no start point",
            ));
        }
    }
    match (kind, &c.ensemble) {
        (ScenarioKind::ClassicalEnsemble, None) => {
            return Err(BenchError::config(
                "classical.ensemble",
                "required by kind classical-ensemble",
            ))
        }
        (ScenarioKind::ClassicalPure, Some(_)) => {
            return Err(BenchError::config(
                "classical.ensemble",
                "not used by kind classical-pure",
            ))
        }
        (_, Some(e)) => {
            if e.points == 0 {
                return Err(BenchError::config(
                    "classical.ensemble.points",
                    "must be positive",
                ));
            }
            if !(0.0..=1.0).contains(&e.delta) {
                return Err(BenchError::config(
                    "classical.ensemble.delta",
                    "must lie in [0, 1]",
                ));
            }
            if dim != 2 {
                return Err(BenchError::config(
                    "classical.map",
                    "ensembles live on the 2-torus",
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

fn as_f64(v: &SweepValue, path: &str) -> Result<f64> {
    match v {
        SweepValue::Int(i) => Ok(*i as f64),
        SweepValue::Float(f) => Ok(*f),
        SweepValue::Text(_) => Err(BenchError::config(path, "expected a number")),
    }
}

fn as_u64(v: &SweepValue, path: &str) -> Result<u64> {
    match v {
        SweepValue::Int(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(BenchError::config(path, "expected a nonnegative integer")),
    }
}

fn as_usize(v: &SweepValue, path: &str) -> Result<usize> {
    as_u64(v, path).map(|x| x as usize)
}

fn as_text<'a>(v: &'a SweepValue, path: &str) -> Result<&'a str> {
    match v {
        SweepValue::Text(s) => Ok(s),
        _ => Err(BenchError::config(path, "expected a string")),
    }
}
