//! Classical dynamics: invertible maps of the torus measured through
//! partitions, for which every pure state has a deterministic outcome at
//! every time.
//!
//! Time is discrete. A probe sampled at real time `t` reports the state
//! after `⌊t⌋` steps, so a [`TimeAverageConfig`] with `horizon == samples`
//! on the uniform grid is exactly the Birkhoff sum over the first
//! `samples` steps.

mod ensemble;
mod map;
mod partition;

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

pub use ensemble::{contaminated_torus_ensemble, ClassicalEnsemble};
pub use map::{circle_distance, evolve, wrap, InvertibleMap, PhasePoint, DEFAULT_BAKER_BITS};
pub use partition::Partition;

use crate::average::{Estimate, TimeAverageConfig};
use crate::distribution::OutcomeDistribution;
use crate::error::{ensure_dim, Error, Result};
use crate::probe::TrajectoryProbe;
use crate::report::{assess, check_epsilon, EquilibrationReport};

/// Longest orbit iterated in double precision for maps that amplify
/// rounding error; lattice maps are exact and have no cap.
pub const MAX_FLOAT_CHAOTIC_STEPS: u64 = 1_000_000;

fn amplifies_rounding(map: &InvertibleMap) -> bool {
    match map {
        InvertibleMap::CatMap { lattice_bits } => lattice_bits.is_none(),
        InvertibleMap::Composed { maps } => maps.iter().any(amplifies_rounding),
        _ => false,
    }
}

fn step_index(map: &InvertibleMap, t: f64) -> Result<u64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!(
            "time {t} must be finite and non-negative"
        )));
    }
    let k = t.floor() as u64;
    if k > MAX_FLOAT_CHAOTIC_STEPS && amplifies_rounding(map) {
        return Err(Error::domain(format!(
            "step {k} exceeds the double-precision horizon cap of {MAX_FLOAT_CHAOTIC_STEPS}; \
             use lattice arithmetic for longer orbits"
        )));
    }
    Ok(k)
}

fn check_system(dim: usize, map: &InvertibleMap, partition: &Partition) -> Result<()> {
    ensure_dim(map.dim()?, dim)?;
    ensure_dim(partition.dim(), dim)?;
    if partition.cell_count() == 0 {
        return Err(Error::InvalidSystem("partition has no cells".into()));
    }
    Ok(())
}

/// Step indices for `times`, or `None` when they are not non-decreasing.
fn monotone_steps(map: &InvertibleMap, times: &[f64]) -> Result<Option<Vec<u64>>> {
    let steps = times
        .iter()
        .map(|&t| step_index(map, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(steps.windows(2).all(|w| w[0] <= w[1]).then_some(steps))
}

/// Cells visited by the orbit of `start` at the given non-decreasing steps.
fn orbit_cells(
    start: &PhasePoint,
    map: &InvertibleMap,
    partition: &Partition,
    steps: &[u64],
) -> Vec<usize> {
    let mut x = start.clone();
    let mut at = 0u64;
    steps
        .iter()
        .map(|&k| {
            while at < k {
                x = map.step(&x, true);
                at += 1;
            }
            partition.cell_unchecked(&x)
        })
        .collect()
}

/// Pure classical state: a single phase point.
#[derive(Debug, Clone)]
pub struct ClassicalProbe {
    start: PhasePoint,
    map: InvertibleMap,
    partition: Partition,
}

impl ClassicalProbe {
    pub fn new(start: PhasePoint, map: InvertibleMap, partition: Partition) -> Result<Self> {
        check_system(start.dim(), &map, &partition)?;
        Ok(ClassicalProbe {
            start,
            map,
            partition,
        })
    }

    /// Cells visited at each step in `0..steps`.
    pub fn cell_sequence(&self, steps: usize) -> Result<Vec<usize>> {
        if steps > 0 {
            step_index(&self.map, (steps - 1) as f64)?;
        }
        let idx: Vec<u64> = (0..steps as u64).collect();
        Ok(orbit_cells(&self.start, &self.map, &self.partition, &idx))
    }
}

/// Probe whose distribution at time `t` is the indicator of the cell
/// holding the orbit point after `⌊t⌋` steps.
pub fn classical_probe(
    x: &PhasePoint,
    map: &InvertibleMap,
    partition: &Partition,
) -> Result<ClassicalProbe> {
    ClassicalProbe::new(x.clone(), map.clone(), partition.clone())
}

impl TrajectoryProbe for ClassicalProbe {
    fn outcome_count(&self) -> usize {
        self.partition.cell_count()
    }

    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        let k = step_index(&self.map, t)?;
        let cell = orbit_cells(&self.start, &self.map, &self.partition, &[k])[0];
        OutcomeDistribution::indicator(cell, self.outcome_count())
    }

    fn sample_many(&self, times: &[f64]) -> Result<Vec<OutcomeDistribution>> {
        match monotone_steps(&self.map, times)? {
            Some(steps) => orbit_cells(&self.start, &self.map, &self.partition, &steps)
                .into_iter()
                .map(|c| OutcomeDistribution::indicator(c, self.outcome_count()))
                .collect(),
            None => times.iter().map(|&t| self.sample(t)).collect(),
        }
    }
}

/// Mixed classical state: a weighted cloud of phase points.
#[derive(Debug, Clone)]
pub struct EnsembleProbe {
    ensemble: ClassicalEnsemble,
    map: InvertibleMap,
    partition: Partition,
}

/// Probe whose distribution at time `t` is `Σ_i w_i e_{ξ(x_i(t))}`.
pub fn ensemble_probe(
    e: &ClassicalEnsemble,
    map: &InvertibleMap,
    partition: &Partition,
) -> Result<EnsembleProbe> {
    check_system(e.dim(), map, partition)?;
    Ok(EnsembleProbe {
        ensemble: e.clone(),
        map: map.clone(),
        partition: partition.clone(),
    })
}

impl EnsembleProbe {
    pub fn ensemble(&self) -> &ClassicalEnsemble {
        &self.ensemble
    }

    fn mix(&self, points: &[PhasePoint]) -> Result<OutcomeDistribution> {
        let mut probs = vec![0.0; self.partition.cell_count()];
        for (p, w) in points.iter().zip(self.ensemble.weights()) {
            probs[self.partition.cell_unchecked(p)] += w;
        }
        OutcomeDistribution::new(probs)
    }
}

impl TrajectoryProbe for EnsembleProbe {
    fn outcome_count(&self) -> usize {
        self.partition.cell_count()
    }

    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        self.sample_many(&[t]).map(|mut v| v.remove(0))
    }

    fn sample_many(&self, times: &[f64]) -> Result<Vec<OutcomeDistribution>> {
        let Some(steps) = monotone_steps(&self.map, times)? else {
            return times.iter().map(|&t| self.sample(t)).collect();
        };
        let mut points = self.ensemble.points().to_vec();
        let mut at = 0u64;
        let mut out = Vec::with_capacity(steps.len());
        for k in steps {
            while at < k {
                for p in points.iter_mut() {
                    *p = self.map.step(p, true);
                }
                at += 1;
            }
            out.push(self.mix(&points)?);
        }
        Ok(out)
    }
}

/// Exact infinite-time `⟨D⟩` of any classical pure state whose equilibrium
/// distribution is `omega`: `1 − Σ_j ω_j²`.
///
/// The identity also holds for finite averages when `omega` is the
/// empirical occupation over the same steps.
pub fn pure_average_distinguishability_closed_form(omega: &OutcomeDistribution) -> f64 {
    1.0 - omega.collision_probability()
}

/// Necessary condition for a classical pure state to equilibrate up to
/// `epsilon`: `max_j ω_j ≥ 1 − ε`. A `false` result rules equilibration out.
pub fn check_necessity(omega: &OutcomeDistribution, epsilon: f64) -> Result<bool> {
    check_epsilon(epsilon)?;
    Ok(omega.max_prob() >= 1.0 - epsilon)
}

/// Guaranteed bound `√(Nδ/2)` on `⟨D⟩` for a mixed state with weight at
/// most `delta` outside a chaotic subspace.
pub fn mixed_equilibration_bound(outcomes: usize, delta: f64) -> Result<f64> {
    if outcomes == 0 {
        return Err(Error::domain("at least one outcome is required"));
    }
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::domain(format!("delta {delta} outside [0, 1/2]")));
    }
    Ok((outcomes as f64 * delta / 2.0).sqrt())
}

/// Contamination level `2ε²/N` under which the mixed-state bound gives
/// `ε`-equilibration.
pub fn contamination_budget(outcomes: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if outcomes == 0 {
        return Err(Error::domain("at least one outcome is required"));
    }
    Ok(2.0 * epsilon * epsilon / outcomes as f64)
}

/// Per-outcome time correlation between two orbits:
/// `⟨p_j(x_t)p_j(y_t)⟩ − ⟨p_j(x_t)⟩⟨p_j(y_t)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDefect {
    pub defect: Vec<f64>,
    /// Standard error of each component if the two orbits were independent,
    /// `√(p_x(1 − p_x)p_y(1 − p_y)/M)`. A sample variance would collapse to
    /// zero for small cells that the two orbits never share.
    pub standard_error: Vec<f64>,
    /// Two-sided p-value of each component's shared-visit count against a
    /// binomial with success probability `p_x p_y`. Shared visits to small
    /// cells are rare enough that the normal tail is far too thin.
    pub p_value: Vec<f64>,
}

impl CorrelationDefect {
    /// Whether every component is within `sigmas` standard errors of zero.
    pub fn is_null(&self, sigmas: f64) -> bool {
        self.defect
            .iter()
            .zip(&self.standard_error)
            .all(|(d, se)| d.abs() <= sigmas * se + 1e-12)
    }

    /// Exact test over all components at the joint false-alarm rate of one
    /// two-sided `sigmas` normal test (Bonferroni over components).
    pub fn is_null_familywise(&self, sigmas: f64) -> bool {
        let level = 2.0 * (1.0 - Normal::standard().cdf(sigmas)) / self.p_value.len().max(1) as f64;
        self.p_value.iter().all(|p| *p >= level)
    }
}

/// Two-sided binomial p-value of `k` successes in `m` trials.
fn binomial_p_value(k: u64, m: u64, p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 1.0;
    }
    let b = Binomial::new(p, m).expect("probability checked above");
    let lower = b.cdf(k);
    let upper = if k == 0 { 1.0 } else { b.sf(k - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

pub fn correlation_defect(
    x: &PhasePoint,
    y: &PhasePoint,
    map: &InvertibleMap,
    partition: &Partition,
    cfg: &TimeAverageConfig,
) -> Result<CorrelationDefect> {
    check_system(x.dim(), map, partition)?;
    ensure_dim(x.dim(), y.dim())?;
    let Some(steps) = monotone_steps(map, &cfg.sample_times()?)? else {
        unreachable!("sample times are increasing");
    };
    let cx = orbit_cells(x, map, partition, &steps);
    let cy = orbit_cells(y, map, partition, &steps);
    let n = partition.cell_count();
    let m = steps.len() as f64;
    let mut defect = Vec::with_capacity(n);
    let mut standard_error = Vec::with_capacity(n);
    let mut p_value = Vec::with_capacity(n);
    for j in 0..n {
        let px = cx.iter().filter(|c| **c == j).count() as f64 / m;
        let py = cy.iter().filter(|c| **c == j).count() as f64 / m;
        let shared = cx
            .iter()
            .zip(&cy)
            .filter(|(a, b)| **a == j && **b == j)
            .count();
        defect.push(shared as f64 / m - px * py);
        standard_error.push((px * (1.0 - px) * py * (1.0 - py) / m).sqrt());
        p_value.push(binomial_p_value(shared as u64, steps.len() as u64, px * py));
    }
    Ok(CorrelationDefect {
        defect,
        standard_error,
        p_value,
    })
}

/// Outcome of testing sampled pairs of chaotic ensemble points for
/// decorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAudit {
    pub sampled: usize,
    pub passed: usize,
}

impl PairAudit {
    pub fn pass_fraction(&self) -> f64 {
        if self.sampled == 0 {
            1.0
        } else {
            self.passed as f64 / self.sampled as f64
        }
    }
}

/// Fraction of pairs that must decorrelate for an ensemble's chaotic
/// flags to be accepted.
pub const PAIR_AUDIT_THRESHOLD: f64 = 0.99;

/// Draws up to `pairs` random pairs of distinct chaotic points and counts
/// those whose correlation defect is null at the family-wise 3σ level.
pub fn audit_chaotic_pairs(
    e: &ClassicalEnsemble,
    map: &InvertibleMap,
    partition: &Partition,
    cfg: &TimeAverageConfig,
    pairs: usize,
    seed: u64,
) -> Result<PairAudit> {
    let chaotic: Vec<usize> = (0..e.len()).filter(|&i| e.chaotic_flags()[i]).collect();
    if chaotic.len() < 2 {
        return Ok(PairAudit {
            sampled: 0,
            passed: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    for _ in 0..pairs {
        let pick = sample(&mut rng, chaotic.len(), 2);
        let (a, b) = (chaotic[pick.index(0)], chaotic[pick.index(1)]);
        let d = correlation_defect(&e.points()[a], &e.points()[b], map, partition, cfg)?;
        if d.is_null_familywise(3.0) {
            passed += 1;
        }
    }
    Ok(PairAudit {
        sampled: pairs,
        passed,
    })
}

/// Standard error of a distinguishability computed from a finite point
/// cloud instead of the smooth density it samples:
/// `½ Σ_j √(ω_j(1 − ω_j)/n_eff)`.
pub fn quadrature_standard_error(e: &ClassicalEnsemble, omega: &OutcomeDistribution) -> f64 {
    let n_eff = e.effective_size();
    0.5 * omega
        .probs()
        .iter()
        .map(|p| (p * (1.0 - p) / n_eff).sqrt())
        .sum::<f64>()
}

/// Report for a pure phase point, with the empirical occupation as `ω`.
pub fn assess_pure(
    x: &PhasePoint,
    map: &InvertibleMap,
    partition: &Partition,
    cfg: &TimeAverageConfig,
    epsilon: f64,
) -> Result<EquilibrationReport> {
    let probe = classical_probe(x, map, partition)?;
    assess(&probe, None, cfg, epsilon)
}

/// Report for an ensemble. The standard error combines time sampling with
/// [`quadrature_standard_error`].
pub fn assess_ensemble(
    e: &ClassicalEnsemble,
    map: &InvertibleMap,
    partition: &Partition,
    cfg: &TimeAverageConfig,
    epsilon: f64,
) -> Result<EquilibrationReport> {
    let probe = ensemble_probe(e, map, partition)?;
    let report = assess(&probe, None, cfg, epsilon)?;
    let quad = quadrature_standard_error(e, &report.equilibrium_distribution);
    let estimate = Estimate {
        mean: report.mean_distinguishability,
        standard_error: report.standard_error.hypot(quad),
    };
    EquilibrationReport::new(estimate, report.equilibrium_distribution, epsilon)
}

/// Writes the first `steps` orbit points as CSV with columns
/// `step, x0, x1, …, cell`.
pub fn write_orbit_csv<W: Write>(
    writer: W,
    start: &PhasePoint,
    map: &InvertibleMap,
    partition: &Partition,
    steps: usize,
) -> Result<()> {
    check_system(start.dim(), map, partition)?;
    if steps > 0 {
        step_index(map, (steps - 1) as f64)?;
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["step".to_string()];
    header.extend((0..start.dim()).map(|i| format!("x{i}")));
    header.push("cell".into());
    w.write_record(&header)?;
    let mut x = start.clone();
    for k in 0..steps {
        let mut row = vec![k.to_string()];
        row.extend(x.coords().iter().map(|c| c.to_string()));
        row.push(partition.cell_unchecked(&x).to_string());
        w.write_record(&row)?;
        x = map.step(&x, true);
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::average::{average_distinguishability, time_average_distribution, SamplingScheme};
    use approx::assert_abs_diff_eq;

    fn pt(c: &[f64]) -> PhasePoint {
        PhasePoint::new(c.to_vec()).unwrap()
    }

    fn dist(p: &[f64]) -> OutcomeDistribution {
        OutcomeDistribution::new(p.to_vec()).unwrap()
    }

    fn halves() -> Partition {
        Partition::grid(vec![vec![0.5]]).unwrap()
    }

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn probe_at_zero_is_initial_cell() {
        let p = Partition::grid(vec![vec![0.3], vec![0.6]]).unwrap();
        let x = pt(&[0.5, 0.2]);
        let probe = classical_probe(&x, &InvertibleMap::cat(), &p).unwrap();
        assert_eq!(
            probe.sample(0.0).unwrap(),
            OutcomeDistribution::indicator(2, 4).unwrap()
        );
        assert!(probe.sample(-1.0).is_err());
    }

    #[test]
    fn sample_many_agrees_with_sample() {
        let probe = classical_probe(
            &pt(&[0.2, 0.9]),
            &InvertibleMap::cat(),
            &Partition::grid(vec![vec![0.5], vec![0.5]]).unwrap(),
        )
        .unwrap();
        let times = [0.0, 1.5, 2.0, 7.9, 30.0];
        let many = probe.sample_many(&times).unwrap();
        let shuffled = probe.sample_many(&[30.0, 0.0]).unwrap();
        for (t, d) in times.iter().zip(&many) {
            assert_eq!(&probe.sample(*t).unwrap(), d);
        }
        assert_eq!(shuffled[0], many[4]);
    }

    #[test]
    fn irrational_rotation_equidistributes() {
        let probe = classical_probe(
            &pt(&[0.1]),
            &InvertibleMap::rotation(vec![GOLDEN]),
            &halves(),
        )
        .unwrap();
        let omega =
            time_average_distribution(&probe, &TimeAverageConfig::steps(100_000).unwrap()).unwrap();
        assert_abs_diff_eq!(omega.probs()[0], 0.5, epsilon = 5e-3);
    }

    #[test]
    fn rational_orbit_inside_one_cell() {
        // orbit {0.1, 0.6} never leaves [0, 0.7]
        let m = InvertibleMap::rotation(vec![0.5]);
        let probe =
            classical_probe(&pt(&[0.1]), &m, &Partition::grid(vec![vec![0.7]]).unwrap()).unwrap();
        let omega =
            time_average_distribution(&probe, &TimeAverageConfig::steps(1000).unwrap()).unwrap();
        assert_eq!(omega.probs(), &[1.0, 0.0]);
        let cfg = TimeAverageConfig::steps(1000).unwrap();
        assert_eq!(
            average_distinguishability(&probe, &omega, &cfg)
                .unwrap()
                .mean,
            0.0
        );
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            pure_average_distinguishability_closed_form(&dist(&[1.0, 0.0, 0.0])),
            0.0
        );
        assert_eq!(
            pure_average_distinguishability_closed_form(&dist(&[0.5, 0.5])),
            0.5
        );
        assert_eq!(
            pure_average_distinguishability_closed_form(&OutcomeDistribution::uniform(4).unwrap()),
            0.75
        );
    }

    #[test]
    fn necessity_examples() {
        assert!(!check_necessity(&dist(&[0.5, 0.5]), 0.3).unwrap());
        assert!(check_necessity(&dist(&[0.95, 0.05]), 0.05).unwrap());
        assert!(check_necessity(&dist(&[1.0, 0.0]), 0.0).unwrap());
        assert!(check_necessity(&dist(&[1.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn mixed_bound_examples() {
        assert_eq!(mixed_equilibration_bound(5, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mixed_equilibration_bound(2, 0.01).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        assert_eq!(mixed_equilibration_bound(8, 0.25).unwrap(), 1.0);
        assert!(mixed_equilibration_bound(2, 0.6).is_err());
        assert!(mixed_equilibration_bound(0, 0.1).is_err());
        let delta = contamination_budget(4, 0.3).unwrap();
        assert_abs_diff_eq!(
            mixed_equilibration_bound(4, delta).unwrap(),
            0.3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn two_cell_indicator_mean_distinguishability() {
        // the rotation by 1/4 from 0.1 is below the cut once every 4 steps:
        // occupation p = 1/4 and ⟨D⟩ = 2p(1-p)
        let m = InvertibleMap::rotation(vec![0.25]);
        let probe =
            classical_probe(&pt(&[0.1]), &m, &Partition::grid(vec![vec![0.2]]).unwrap()).unwrap();
        let cfg = TimeAverageConfig::steps(4000).unwrap();
        let omega = time_average_distribution(&probe, &cfg).unwrap();
        assert_eq!(omega.probs(), &[0.25, 0.75]);
        let est = average_distinguishability(&probe, &omega, &cfg).unwrap();
        assert_abs_diff_eq!(est.mean, 2.0 * 0.25 * 0.75, epsilon = 1e-12);
    }

    #[test]
    fn stratified_and_grid_steps_agree() {
        let probe = classical_probe(
            &pt(&[0.3, 0.4]),
            &InvertibleMap::cat(),
            &Partition::grid(vec![vec![0.5], vec![]]).unwrap(),
        )
        .unwrap();
        let grid = TimeAverageConfig::steps(500).unwrap();
        let strat =
            TimeAverageConfig::new(500.0, 500, SamplingScheme::StratifiedRandom, 4).unwrap();
        assert_eq!(
            time_average_distribution(&probe, &grid).unwrap(),
            time_average_distribution(&probe, &strat).unwrap()
        );
    }

    #[test]
    fn float_cat_horizon_cap() {
        let probe = classical_probe(
            &pt(&[0.3, 0.4]),
            &InvertibleMap::cat(),
            &Partition::single_cell(2).unwrap(),
        )
        .unwrap();
        assert!(probe.sample(2e6).is_err());
        let exact = classical_probe(
            &pt(&[0.3, 0.4]),
            &InvertibleMap::cat_lattice(30),
            &Partition::single_cell(2).unwrap(),
        )
        .unwrap();
        assert!(exact.sample_many(&[0.0, 1.5e6]).is_ok());
    }

    #[test]
    fn ensemble_reductions() {
        let part = halves();
        let m = InvertibleMap::rotation(vec![GOLDEN]);
        let x = pt(&[0.1]);
        let single = ClassicalEnsemble::uniform(vec![x.clone()], vec![true]).unwrap();
        let ep = ensemble_probe(&single, &m, &part).unwrap();
        let cp = classical_probe(&x, &m, &part).unwrap();
        let times = [0.0, 1.0, 2.0, 3.0, 10.0];
        assert_eq!(
            ep.sample_many(&times).unwrap(),
            cp.sample_many(&times).unwrap()
        );

        let two =
            ClassicalEnsemble::uniform(vec![pt(&[0.1]), pt(&[0.7])], vec![true, true]).unwrap();
        let ep = ensemble_probe(&two, &InvertibleMap::rotation(vec![0.0]), &part).unwrap();
        assert_eq!(ep.sample(5.0).unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn defect_of_orbit_with_itself() {
        let m = InvertibleMap::rotation(vec![GOLDEN]);
        let part = Partition::grid(vec![vec![0.3]]).unwrap();
        let x = pt(&[0.2]);
        let cfg = TimeAverageConfig::steps(20_000).unwrap();
        let d = correlation_defect(&x, &x, &m, &part, &cfg).unwrap();
        let omega =
            time_average_distribution(&classical_probe(&x, &m, &part).unwrap(), &cfg).unwrap();
        for (dj, pj) in d.defect.iter().zip(omega.probs()) {
            assert_abs_diff_eq!(*dj, pj * (1.0 - pj), epsilon = 1e-12);
        }
        assert!(!d.is_null(3.0));
    }

    #[test]
    fn defect_vanishes_for_deterministic_occupation() {
        let m = InvertibleMap::rotation(vec![0.5]);
        let part = Partition::grid(vec![vec![0.9]]).unwrap();
        let d = correlation_defect(
            &pt(&[0.1]),
            &pt(&[0.3]),
            &m,
            &part,
            &TimeAverageConfig::steps(100).unwrap(),
        )
        .unwrap();
        assert_eq!(d.defect, vec![0.0, 0.0]);
    }

    #[test]
    fn independent_cat_points_decorrelate() {
        let part = Partition::grid(vec![vec![0.5], vec![0.5]]).unwrap();
        let cfg = TimeAverageConfig::steps(20_000).unwrap();
        let d = correlation_defect(
            &pt(&[0.1234, 0.8765]),
            &pt(&[0.5551, 0.2718]),
            &InvertibleMap::cat(),
            &part,
            &cfg,
        )
        .unwrap();
        assert!(d.is_null(3.0), "{d:?}");
    }

    #[test]
    fn binomial_p_values() {
        // 0 successes in 10 at p = 0.1: 0.9^10 = 0.3487
        assert_abs_diff_eq!(
            binomial_p_value(0, 10, 0.1),
            2.0 * 0.9f64.powi(10),
            epsilon = 1e-12
        );
        assert_eq!(binomial_p_value(3, 10, 0.0), 1.0);
        assert_eq!(binomial_p_value(5, 10, 0.5), 1.0);
        assert!(binomial_p_value(10, 1000, 0.001) < 1e-6);
    }

    #[test]
    fn orbit_csv_layout() {
        let mut buf = Vec::new();
        write_orbit_csv(
            &mut buf,
            &pt(&[0.1]),
            &InvertibleMap::rotation(vec![0.25]),
            &halves(),
            3,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "step,x0,cell\n0,0.1,0\n1,0.35,0\n2,0.6,1\n");
    }
}
