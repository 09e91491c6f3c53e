//! Executes scenarios and checks every applicable bound.

use std::path::Path;
use std::time::Instant;

use equilib::classical::{
    assess_ensemble, assess_pure, audit_chaotic_pairs, check_necessity,
    contaminated_torus_ensemble, mixed_equilibration_bound,
    pure_average_distinguishability_closed_form, InvertibleMap, PairAudit, Partition, PhasePoint,
};
use equilib::quantum::linalg::{from_rows, vector_from_pairs};
use equilib::quantum::{
    default_gap_tolerance, effective_dimension, equilibrium_distribution,
    gap_degeneracy_sensitivity, max_outcomes_for_equilibration, near_identity_povm, quantum_bound,
    quantum_probe, random_hamiltonian, random_mixed_state, random_povm, random_projective,
    random_pure_state, CMatrix, DensityMatrix, GapTable, HamiltonianSpectrum, Povm,
};
use equilib::{
    assess, average_distinguishability, check_sufficiency, synthetic_probe, EquilibrationReport,
    SamplingScheme, TimeAverageConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::scenario::{
    HamiltonianSource, MatrixSource, MeasurementSource, Params, PartitionSource, Scenario,
    ScenarioKind, StateSource,
};

/// Standard errors a measured value may exceed a bound by before the bound
/// counts as violated.
pub const BOUND_SIGMAS: f64 = 3.0;

pub const DEFAULT_QUANTUM_SAMPLES: usize = 10_000;
pub const DEFAULT_CLASSICAL_STEPS: usize = 10_000;
pub const DEFAULT_SYNTHETIC_SAMPLES: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    NotApplicable,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Satisfied => "satisfied",
            BoundStatus::Violated => "violated",
            BoundStatus::NotApplicable => "NA",
        }
    }
}

/// A threshold or bound value and whether the run respected it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: Option<f64>,
    pub status: BoundStatus,
}

impl BoundCheck {
    pub const NA: BoundCheck = BoundCheck {
        value: None,
        status: BoundStatus::NotApplicable,
    };

    fn new(value: f64, status: BoundStatus) -> Self {
        BoundCheck {
            value: Some(value),
            status,
        }
    }

    /// Upper bound on the mean, violated only beyond [`BOUND_SIGMAS`].
    fn upper(value: f64, report: &EquilibrationReport) -> Self {
        let excess = report.mean_distinguishability - BOUND_SIGMAS * report.standard_error;
        let status = if excess > value {
            BoundStatus::Violated
        } else {
            BoundStatus::Satisfied
        };
        Self::new(value, status)
    }
}

/// Every bound the runner knows, each checked or marked not applicable.
///
/// * `thm1`: sufficiency. Value `1 − ε/2`; applies when `max ω` reaches it,
///   and then requires `⟨D⟩ ≤ ε` within error.
/// * `thm2`: necessity for classical pure states. Value `1 − ε`; applies
///   when the run equilibrates beyond error, and then requires `max ω`
///   to reach it.
/// * `thm3`: `√(Nδ/2)` for classical ensembles with `δ ≤ ½`.
/// * `thm5`: `½√(D_G(N − 1)/d_eff)` for quantum runs.
/// * `corollary`: largest `N` for which the quantum bound forces
///   `ε`-equilibration; applies when the run's `N` is within it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundChecks {
    pub thm1: BoundCheck,
    pub thm2: BoundCheck,
    pub thm3: BoundCheck,
    pub thm5: BoundCheck,
    pub corollary: BoundCheck,
}

impl BoundChecks {
    pub const NA: BoundChecks = BoundChecks {
        thm1: BoundCheck::NA,
        thm2: BoundCheck::NA,
        thm3: BoundCheck::NA,
        thm5: BoundCheck::NA,
        corollary: BoundCheck::NA,
    };

    pub fn all(&self) -> [(&'static str, BoundCheck); 5] {
        [
            ("thm1", self.thm1),
            ("thm2", self.thm2),
            ("thm3", self.thm3),
            ("thm5", self.thm5),
            ("corollary", self.corollary),
        ]
    }

    pub fn any_violated(&self) -> bool {
        self.all()
            .iter()
            .any(|(_, b)| b.status == BoundStatus::Violated)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    /// Position in the sweep grid.
    pub point: usize,
    pub kind: ScenarioKind,
    pub params: Params,
    pub seed: u64,
    pub epsilon: f64,
    pub outcomes: Option<usize>,
    pub d_eff: Option<f64>,
    pub gap_degeneracy: Option<usize>,
    /// `D_G` at 0.1×, 1× and 10× the gap tolerance.
    pub gap_sensitivity: Vec<(f64, usize)>,
    /// `1 − Σ ω_j²` for classical pure runs.
    pub closed_form: Option<f64>,
    pub non_chaotic_weight: Option<f64>,
    pub pair_audit: Option<PairAudit>,
    pub report: Option<EquilibrationReport>,
    pub bounds: BoundChecks,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

impl RunRecord {
    fn empty(s: &Scenario, point: usize, params: &Params) -> Self {
        RunRecord {
            scenario: s.name.clone(),
            point,
            kind: s.kind,
            params: params.clone(),
            seed: s.seed(),
            epsilon: s.epsilon,
            outcomes: None,
            d_eff: None,
            gap_degeneracy: None,
            gap_sensitivity: Vec::new(),
            closed_form: None,
            non_chaotic_weight: None,
            pair_audit: None,
            report: None,
            bounds: BoundChecks::NA,
            notes: Vec::new(),
            wall_time_s: 0.0,
            error: None,
        }
    }
}

/// Command-line overrides applied before the sweep grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub horizon: Option<f64>,
    pub samples: Option<usize>,
    pub gap_tol: Option<f64>,
}

impl RunOptions {
    pub fn apply(&self, s: &Scenario) -> Result<Scenario> {
        let mut s = s.clone();
        if let Some(seed) = self.seed {
            s.average.seed = seed;
            if let Some(p) = &mut s.synthetic {
                p.seed = seed;
            }
        }
        if let Some(h) = self.horizon {
            s.average.horizon = Some(h);
        }
        if let Some(m) = self.samples {
            s.average.samples = Some(m);
        }
        if let Some(t) = self.gap_tol {
            match &mut s.quantum {
                Some(q) => q.gap_tol = Some(t),
                None => {
                    return Err(BenchError::config(
                        "gap_tol",
                        "applies only to quantum scenarios",
                    ))
                }
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// Runs every point of the sweep grid in parallel and returns the records
/// in grid order. Failures of individual runs are recorded, not returned.
pub fn run_scenario(s: &Scenario) -> Result<Vec<RunRecord>> {
    s.validate()?;
    preload_files(s)?;
    let grid = s.grid();
    Ok(grid
        .par_iter()
        .enumerate()
        .map(|(i, params)| run_point(s, i, params))
        .collect())
}

/// Runs the scenario as written, ignoring its sweep table.
pub fn run_single(s: &Scenario) -> Result<RunRecord> {
    s.validate()?;
    preload_files(s)?;
    let mut base = s.clone();
    base.sweep.clear();
    Ok(run_point(&base, 0, &Params::new()))
}

fn run_point(s: &Scenario, point: usize, params: &Params) -> RunRecord {
    let start = Instant::now();
    let mut record = RunRecord::empty(s, point, params);
    let outcome = s.resolve(params).and_then(|r| {
        record.seed = r.seed();
        record.epsilon = r.epsilon;
        execute(&r, &mut record)
    });
    if let Err(e) = outcome {
        record.report = None;
        record.bounds = BoundChecks::NA;
        record.error = Some(e.to_string());
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    record
}

fn execute(s: &Scenario, record: &mut RunRecord) -> Result<()> {
    match s.kind {
        ScenarioKind::Quantum => run_quantum(s, record),
        ScenarioKind::ClassicalPure => run_classical_pure(s, record),
        ScenarioKind::ClassicalEnsemble => run_classical_ensemble(s, record),
        ScenarioKind::SyntheticProbe => run_synthetic(s, record),
    }
}

/// Process exit status for a batch of records: 2 if any bound is violated,
/// 1 if any run failed, 0 otherwise.
pub fn exit_status(records: &[RunRecord]) -> u8 {
    if records.iter().any(|r| r.bounds.any_violated()) {
        2
    } else if records.iter().any(|r| r.error.is_some()) {
        1
    } else {
        0
    }
}

fn average_config(
    s: &Scenario,
    default_horizon: f64,
    default_samples: usize,
    scheme: SamplingScheme,
) -> Result<TimeAverageConfig> {
    let samples = s.average.samples.unwrap_or(default_samples);
    let horizon = s.average.horizon.unwrap_or(default_horizon);
    Ok(TimeAverageConfig::new(
        horizon,
        samples,
        s.average.scheme.unwrap_or(scheme),
        s.average.seed,
    )?)
}

fn sufficiency_check(report: &EquilibrationReport) -> Result<BoundCheck> {
    let eps = report.epsilon;
    let threshold = 1.0 - eps / 2.0;
    if !check_sufficiency(&report.equilibrium_distribution, eps)? {
        return Ok(BoundCheck {
            value: Some(threshold),
            status: BoundStatus::NotApplicable,
        });
    }
    let ok = report.mean_distinguishability <= eps + BOUND_SIGMAS * report.standard_error;
    Ok(BoundCheck::new(
        threshold,
        if ok {
            BoundStatus::Satisfied
        } else {
            BoundStatus::Violated
        },
    ))
}

// ---- quantum ----

/// A fully built quantum system.
pub struct QuantumSystem {
    pub hamiltonian: HamiltonianSpectrum,
    pub state: DensityMatrix,
    pub povm: Povm,
    pub gap_tol: f64,
}

fn load_matrix(src: &MatrixSource, base: &Path, path: &str) -> Result<CMatrix> {
    let rows = match src {
        MatrixSource::Inline(rows) => rows.clone(),
        MatrixSource::File { file } => {
            let full = base.join(file);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| BenchError::config(path, format!("{}: {e}", full.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| BenchError::config(path, format!("{}: {e}", full.display())))?
        }
    };
    from_rows(&rows).map_err(|e| BenchError::config(path, e.to_string()))
}

fn preload_files(s: &Scenario) -> Result<()> {
    let Some(q) = &s.quantum else { return Ok(()) };
    if let HamiltonianSource::Matrix(m) = &q.hamiltonian {
        load_matrix(m, &s.base_dir, "quantum.hamiltonian.matrix")?;
    }
    if let StateSource::Density(m) = &q.state {
        load_matrix(m, &s.base_dir, "quantum.state.density")?;
    }
    if let MeasurementSource::Elements(ms) = &q.measurement {
        for (i, m) in ms.iter().enumerate() {
            load_matrix(
                m,
                &s.base_dir,
                &format!("quantum.measurement.elements[{i}]"),
            )?;
        }
    }
    Ok(())
}

/// Builds the Hamiltonian, state and measurement of a resolved quantum
/// scenario. Random parts are drawn from the scenario seed.
pub fn build_quantum(s: &Scenario) -> Result<QuantumSystem> {
    let q = s
        .quantum
        .as_ref()
        .ok_or_else(|| BenchError::config("quantum", "section missing"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed());
    let h = match &q.hamiltonian {
        HamiltonianSource::Diagonal(e) => HamiltonianSpectrum::from_eigen(
            e.clone(),
            CMatrix::identity(e.len(), e.len()),
            q.degeneracy_tol,
        )?,
        HamiltonianSource::Matrix(m) => HamiltonianSpectrum::from_hermitian(
            &load_matrix(m, &s.base_dir, "quantum.hamiltonian.matrix")?,
            q.degeneracy_tol,
        )?,
        HamiltonianSource::Random { dim, family } => {
            let h = random_hamiltonian(*dim, *family, &mut rng)?;
            match q.degeneracy_tol {
                Some(tol) => HamiltonianSpectrum::from_eigen(
                    h.eigenvalues().to_vec(),
                    h.eigenvectors().clone(),
                    Some(tol),
                )?,
                None => h,
            }
        }
    };
    let d = h.dim();
    let dim_error = |path: &str, found: usize| {
        BenchError::config(
            path,
            format!("dimension {found} does not match the Hamiltonian's {d}"),
        )
    };
    let state = match &q.state {
        StateSource::Pure(amps) => {
            if amps.len() != d {
                return Err(dim_error("quantum.state.pure", amps.len()));
            }
            DensityMatrix::pure(&vector_from_pairs(amps))?
        }
        StateSource::Density(m) => {
            let m = load_matrix(m, &s.base_dir, "quantum.state.density")?;
            if m.nrows() != d {
                return Err(dim_error("quantum.state.density", m.nrows()));
            }
            DensityMatrix::new(m)?
        }
        StateSource::RandomPure {} => random_pure_state(d, &mut rng)?,
        StateSource::RandomMixed { rank } => random_mixed_state(d, rank.unwrap_or(d), &mut rng)?,
    };
    let povm = match &q.measurement {
        MeasurementSource::Projective(vectors) => {
            if let Some(v) = vectors.iter().find(|v| v.len() != d) {
                return Err(dim_error("quantum.measurement.projective", v.len()));
            }
            Povm::projective(
                &vectors
                    .iter()
                    .map(|v| vector_from_pairs(v))
                    .collect::<Vec<_>>(),
            )?
        }
        MeasurementSource::Elements(ms) => {
            let mut elements = Vec::with_capacity(ms.len());
            for (i, m) in ms.iter().enumerate() {
                let path = format!("quantum.measurement.elements[{i}]");
                let m = load_matrix(m, &s.base_dir, &path)?;
                if m.nrows() != d {
                    return Err(dim_error(&path, m.nrows()));
                }
                elements.push(m);
            }
            Povm::new(elements)?
        }
        MeasurementSource::RandomPovm { outcomes } => random_povm(d, *outcomes, &mut rng)?,
        MeasurementSource::RandomProjective { outcomes } => {
            if *outcomes > d {
                return Err(BenchError::config(
                    "quantum.measurement.random-projective.outcomes",
                    format!("{outcomes} outcomes exceed the dimension {d}"),
                ));
            }
            random_projective(d, *outcomes, &mut rng)?
        }
        MeasurementSource::NearIdentity { outcomes, strength } => {
            near_identity_povm(d, *outcomes, *strength, &mut rng)?
        }
    };
    let gap_tol = q.gap_tol.unwrap_or_else(|| default_gap_tolerance(&h));
    Ok(QuantumSystem {
        hamiltonian: h,
        state,
        povm,
        gap_tol,
    })
}

fn run_quantum(s: &Scenario, record: &mut RunRecord) -> Result<()> {
    let sys = build_quantum(s)?;
    let h = &sys.hamiltonian;
    let n = sys.povm.outcome_count();
    let d_eff = effective_dimension(&sys.state, h)?;
    let table = GapTable::build(h, sys.gap_tol)?;
    let dg = table.max_degeneracy();
    if h.eigenspace_count() == 1 {
        record
            .notes
            .push("single eigenspace: no gaps, D_G taken as 1 and the bound is vacuous".into());
    }
    let cfg = average_config(
        s,
        h.default_horizon(),
        DEFAULT_QUANTUM_SAMPLES,
        SamplingScheme::StratifiedRandom,
    )?;
    let omega = equilibrium_distribution(&sys.state, h, &sys.povm)?;
    let probe = quantum_probe(&sys.state, h, &sys.povm)?;
    let estimate = average_distinguishability(&probe, &omega, &cfg)?;
    let bound = quantum_bound(n, dg, d_eff)?;
    let n_max = max_outcomes_for_equilibration(s.epsilon, d_eff, dg)?;
    let report = EquilibrationReport::new(estimate, omega, s.epsilon)?
        .with_bound("thm5", bound)
        .with_bound("corollary_max_outcomes", n_max as f64);

    record.outcomes = Some(n);
    record.d_eff = Some(d_eff);
    record.gap_degeneracy = Some(dg);
    record.gap_sensitivity = gap_degeneracy_sensitivity(h, sys.gap_tol)?.to_vec();
    record.bounds.thm1 = sufficiency_check(&report)?;
    record.bounds.thm5 = BoundCheck::upper(bound, &report);
    record.bounds.corollary = if n <= n_max {
        let ok = report.mean_distinguishability <= s.epsilon + BOUND_SIGMAS * report.standard_error;
        BoundCheck::new(
            n_max as f64,
            if ok {
                BoundStatus::Satisfied
            } else {
                BoundStatus::Violated
            },
        )
    } else {
        BoundCheck {
            value: Some(n_max as f64),
            status: BoundStatus::NotApplicable,
        }
    };
    record.report = Some(report);
    Ok(())
}

// ---- classical ----

fn classical_parts(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<(InvertibleMap, Partition)> {
    let c = s
        .classical
        .as_ref()
        .ok_or_else(|| BenchError::config("classical", "section missing"))?;
    let dim = c.map.dim()?;
    let partition = match &c.partition {
        PartitionSource::Grid(p) => p.clone(),
        PartitionSource::Random { cells } => Partition::random(dim, *cells, rng)?,
    };
    Ok((c.map.clone(), partition))
}

/// Start point, map and partition of a resolved classical-pure scenario.
pub fn build_classical_pure(s: &Scenario) -> Result<(PhasePoint, InvertibleMap, Partition)> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed());
    let (map, partition) = classical_parts(s, &mut rng)?;
    let start = match s.classical.as_ref().and_then(|c| c.start.clone()) {
        Some(x) => PhasePoint::new(x)?,
        None => PhasePoint::new((0..map.dim()?).map(|_| rng.random()).collect())?,
    };
    Ok((start, map, partition))
}

fn classical_config(s: &Scenario) -> Result<TimeAverageConfig> {
    let steps = s.average.samples.unwrap_or(DEFAULT_CLASSICAL_STEPS);
    average_config(s, steps as f64, steps, SamplingScheme::UniformGrid)
}

fn run_classical_pure(s: &Scenario, record: &mut RunRecord) -> Result<()> {
    let (x, map, partition) = build_classical_pure(s)?;
    let cfg = classical_config(s)?;
    let report = assess_pure(&x, &map, &partition, &cfg, s.epsilon)?;
    let closed = pure_average_distinguishability_closed_form(&report.equilibrium_distribution);
    let eps = s.epsilon;
    record.outcomes = Some(partition.cell_count());
    record.closed_form = Some(closed);
    record.bounds.thm1 = sufficiency_check(&report)?;
    record.bounds.thm2 =
        if report.mean_distinguishability <= eps - BOUND_SIGMAS * report.standard_error {
            let ok = check_necessity(&report.equilibrium_distribution, eps)?;
            BoundCheck::new(
                1.0 - eps,
                if ok {
                    BoundStatus::Satisfied
                } else {
                    BoundStatus::Violated
                },
            )
        } else {
            BoundCheck {
                value: Some(1.0 - eps),
                status: BoundStatus::NotApplicable,
            }
        };
    record.report = Some(report.with_bound("closed_form", closed));
    Ok(())
}

fn run_classical_ensemble(s: &Scenario, record: &mut RunRecord) -> Result<()> {
    let c = s
        .classical
        .as_ref()
        .ok_or_else(|| BenchError::config("classical", "section missing"))?;
    let spec = c
        .ensemble
        .as_ref()
        .ok_or_else(|| BenchError::config("classical.ensemble", "section missing"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed());
    let (map, partition) = classical_parts(s, &mut rng)?;
    let ensemble =
        contaminated_torus_ensemble(spec.points, spec.delta, spec.periodic_bits, &mut rng)?;
    let cfg = classical_config(s)?;
    let mut report = assess_ensemble(&ensemble, &map, &partition, &cfg, s.epsilon)?;
    let n = partition.cell_count();
    let delta = ensemble.non_chaotic_weight();
    record.outcomes = Some(n);
    record.non_chaotic_weight = Some(delta);
    record.bounds.thm1 = sufficiency_check(&report)?;
    if delta <= 0.5 {
        let bound = mixed_equilibration_bound(n, delta)?;
        record.bounds.thm3 = BoundCheck::upper(bound, &report);
        report = report.with_bound("thm3", bound);
    } else {
        record
            .notes
            .push(format!("non-chaotic weight {delta} exceeds 1/2"));
    }
    if c.audit_pairs > 0 {
        let audit =
            audit_chaotic_pairs(&ensemble, &map, &partition, &cfg, c.audit_pairs, s.seed())?;
        record.pair_audit = Some(audit);
    }
    record.report = Some(report);
    Ok(())
}

// ---- synthetic ----

fn run_synthetic(s: &Scenario, record: &mut RunRecord) -> Result<()> {
    let spec = s
        .synthetic
        .as_ref()
        .ok_or_else(|| BenchError::config("synthetic", "section missing"))?;
    let probe = synthetic_probe(spec)?;
    let samples = s.average.samples.unwrap_or(DEFAULT_SYNTHETIC_SAMPLES);
    let cfg = average_config(s, samples as f64, samples, SamplingScheme::StratifiedRandom)?;
    let report = assess(&probe, None, &cfg, s.epsilon)?;
    record.outcomes = Some(spec.outcomes);
    record.bounds.thm1 = sufficiency_check(&report)?;
    record.report = Some(report);
    Ok(())
}
