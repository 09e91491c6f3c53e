//! Partition measurements: every phase-space point lies in exactly one cell.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::PhasePoint;
use crate::error::{ensure_dim, Error, Result};

/// Axis-aligned grid partition of the unit torus.
///
/// Axis `i` is cut at the strictly increasing interior points `cuts[i]`;
/// the resulting boxes are numbered row-major (last axis fastest) and
/// `labels[box]` names the measurement outcome of each box, so several boxes
/// may share one outcome. A point on a cut belongs to the lower interval.
/// Outcomes are numbered from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    cuts: Vec<Vec<f64>>,
    labels: Vec<usize>,
    cell_count: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    cuts: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        match r.labels {
            Some(labels) => Partition::with_labels(r.cuts, labels),
            None => Partition::grid(r.cuts),
        }
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            cuts: p.cuts,
            labels: Some(p.labels),
        }
    }
}

impl Partition {
    /// One outcome per grid box.
    pub fn grid(cuts: Vec<Vec<f64>>) -> Result<Self> {
        let boxes = box_count(&cuts)?;
        Self::with_labels(cuts, (0..boxes).collect())
    }

    pub fn with_labels(cuts: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let boxes = box_count(&cuts)?;
        for (axis, c) in cuts.iter().enumerate() {
            let inside = c.iter().all(|x| x.is_finite() && *x > 0.0 && *x < 1.0);
            let increasing = c.windows(2).all(|w| w[0] < w[1]);
            if !inside || !increasing {
                return Err(Error::InvalidSystem(format!(
                    "cuts on axis {axis} must be strictly increasing inside (0, 1)"
                )));
            }
        }
        ensure_dim(boxes, labels.len())?;
        let cell_count = labels.iter().max().map_or(0, |m| m + 1);
        Ok(Partition {
            cuts,
            labels,
            cell_count,
        })
    }

    /// The whole space as a single cell.
    pub fn single_cell(dim: usize) -> Result<Self> {
        Self::grid(vec![Vec::new(); dim])
    }

    /// Random grid partition of `[0,1)^dim` with exactly `cells` outcomes.
    ///
    /// Cuts are uniform draws; each outcome gets at least one box and the
    /// remaining boxes get uniformly random outcomes.
    pub fn random<R: Rng + ?Sized>(dim: usize, cells: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 || cells == 0 {
            return Err(Error::InvalidSystem(
                "random partition needs dim ≥ 1 and cells ≥ 1".into(),
            ));
        }
        // spread the boxes over the axes until there are at least `cells`
        let mut intervals = vec![1usize; dim];
        let mut axis = rng.random_range(0..dim);
        while intervals.iter().product::<usize>() < cells {
            intervals[axis] += 1;
            axis = (axis + 1) % dim;
        }
        let cuts: Vec<Vec<f64>> = intervals
            .iter()
            .map(|&k| {
                let mut c: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.05..0.95)).collect();
                c.sort_by(f64::total_cmp);
                c.dedup();
                c
            })
            .collect();
        let boxes = box_count(&cuts)?;
        if boxes < cells {
            // duplicate cut draws; astronomically unlikely
            return Self::random(dim, cells, rng);
        }
        let mut labels: Vec<usize> = (0..cells)
            .chain((cells..boxes).map(|_| rng.random_range(0..cells)))
            .collect();
        labels.shuffle(rng);
        Self::with_labels(cuts, labels)
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn dim(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self) -> &[Vec<f64>] {
        &self.cuts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Outcome index of the cell containing `x`.
    pub fn cell_of(&self, x: &PhasePoint) -> Result<usize> {
        ensure_dim(self.dim(), x.dim())?;
        Ok(self.cell_unchecked(x))
    }

    pub(crate) fn cell_unchecked(&self, x: &PhasePoint) -> usize {
        let mut index = 0;
        for (cuts, c) in self.cuts.iter().zip(x.coords()) {
            let interval = cuts.partition_point(|cut| cut < c);
            index = index * (cuts.len() + 1) + interval;
        }
        self.labels[index]
    }

    /// Lebesgue measure of every outcome's region.
    pub fn cell_measures(&self) -> Vec<f64> {
        let mut measures = vec![0.0; self.cell_count];
        let widths: Vec<Vec<f64>> = self
            .cuts
            .iter()
            .map(|c| {
                let mut edges = vec![0.0];
                edges.extend(c);
                edges.push(1.0);
                edges.windows(2).map(|w| w[1] - w[0]).collect()
            })
            .collect();
        for (b, label) in self.labels.iter().enumerate() {
            let mut rem = b;
            let mut vol = 1.0;
            for w in widths.iter().rev() {
                vol *= w[rem % w.len()];
                rem /= w.len();
            }
            measures[*label] += vol;
        }
        measures
    }
}

fn box_count(cuts: &[Vec<f64>]) -> Result<usize> {
    if cuts.is_empty() {
        return Err(Error::InvalidSystem(
            "partition needs at least one axis".into(),
        ));
    }
    Ok(cuts.iter().map(|c| c.len() + 1).product())
}
