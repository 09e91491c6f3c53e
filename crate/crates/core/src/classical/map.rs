//! Phase-space points on the unit torus and the catalogue of invertible maps.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};

/// Point of the unit torus `[0, 1)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhasePoint {
    coords: Vec<f64>,
}

/// Reduces `x` modulo 1 into `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance between `a` and `b` on the circle of circumference 1.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

impl PhasePoint {
    /// Wraps every coordinate into `[0, 1)`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSystem("phase point needs coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSystem("non-finite coordinate".into()));
        }
        Ok(PhasePoint {
            coords: coords.into_iter().map(wrap).collect(),
        })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Largest per-coordinate distance on the torus.
    pub fn torus_distance(&self, other: &PhasePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| circle_distance(*a, *b))
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for PhasePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PhasePoint::new(v)
    }
}

impl From<PhasePoint> for Vec<f64> {
    fn from(p: PhasePoint) -> Self {
        p.coords
    }
}

pub const DEFAULT_BAKER_BITS: u32 = 52;
const MAX_LATTICE_BITS: u32 = 52;

/// Invertible maps of the unit torus.
///
/// Cat and baker maps may run on the lattice `(2^-bits ℤ / ℤ)²`, where they
/// are exact bijections. Points off the lattice are first rounded to it. In
/// double precision the cat map is invertible only up to rounding, which it
/// amplifies by its stretching factor ≈ 2.618 per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InvertibleMap {
    /// `x_i ↦ x_i + α_i (mod 1)`; integrable control with no mixing.
    Rotation { alpha: Vec<f64> },
    /// Arnold's cat map `(x, y) ↦ (2x + y, x + y) (mod 1)`.
    CatMap {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lattice_bits: Option<u32>,
    },
    /// Baker's map `(x, y) ↦ (2x mod 1, (y + ⌊2x⌋)/2)`.
    ///
    /// Always runs on a lattice: the bit shifted out of `y` is fed back into
    /// the lowest bit of `x`, which makes the map a bijection and every orbit
    /// periodic with period dividing `2·bits`. (Plain floating point would
    /// drive every orbit to the fixed point after ~53 steps.)
    BakerMap {
        #[serde(default = "default_baker_bits")]
        lattice_bits: u32,
    },
    /// Applies the listed maps in order.
    Composed { maps: Vec<InvertibleMap> },
}

fn default_baker_bits() -> u32 {
    DEFAULT_BAKER_BITS
}

impl InvertibleMap {
    pub fn rotation(alpha: Vec<f64>) -> Self {
        InvertibleMap::Rotation { alpha }
    }

    pub fn cat() -> Self {
        InvertibleMap::CatMap { lattice_bits: None }
    }

    pub fn cat_lattice(bits: u32) -> Self {
        InvertibleMap::CatMap {
            lattice_bits: Some(bits),
        }
    }

    pub fn baker() -> Self {
        InvertibleMap::BakerMap {
            lattice_bits: DEFAULT_BAKER_BITS,
        }
    }

    pub fn name(&self) -> String {
        match self {
            InvertibleMap::Rotation { alpha } => format!("rotation({alpha:?})"),
            InvertibleMap::CatMap { .. } => "cat-map".into(),
            InvertibleMap::BakerMap { .. } => "baker-map".into(),
            InvertibleMap::Composed { maps } => {
                let names: Vec<_> = maps.iter().map(|m| m.name()).collect();
                format!("composed[{}]", names.join(", "))
            }
        }
    }

    /// Phase-space dimension the map acts on.
    pub fn dim(&self) -> Result<usize> {
        match self {
            InvertibleMap::Rotation { alpha } => {
                if alpha.is_empty() || alpha.iter().any(|a| !a.is_finite()) {
                    Err(Error::InvalidSystem("rotation needs finite angles".into()))
                } else {
                    Ok(alpha.len())
                }
            }
            InvertibleMap::CatMap { lattice_bits } => {
                if let Some(b) = lattice_bits {
                    check_bits(*b)?;
                }
                Ok(2)
            }
            InvertibleMap::BakerMap { lattice_bits } => {
                check_bits(*lattice_bits)?;
                Ok(2)
            }
            InvertibleMap::Composed { maps } => {
                let first = maps
                    .first()
                    .ok_or_else(|| Error::InvalidSystem("empty composition".into()))?
                    .dim()?;
                for m in &maps[1..] {
                    ensure_dim(first, m.dim()?)?;
                }
                Ok(first)
            }
        }
    }

    pub fn forward(&self, x: &PhasePoint) -> Result<PhasePoint> {
        ensure_dim(self.dim()?, x.dim())?;
        Ok(self.step(x, true))
    }

    pub fn backward(&self, x: &PhasePoint) -> Result<PhasePoint> {
        ensure_dim(self.dim()?, x.dim())?;
        Ok(self.step(x, false))
    }

    /// One step, with dimensions already checked.
    pub(crate) fn step(&self, x: &PhasePoint, forward: bool) -> PhasePoint {
        let c = &x.coords;
        let coords = match self {
            InvertibleMap::Rotation { alpha } => {
                let sign = if forward { 1.0 } else { -1.0 };
                c.iter()
                    .zip(alpha)
                    .map(|(x, a)| wrap(x + sign * a))
                    .collect()
            }
            InvertibleMap::CatMap { lattice_bits: None } => {
                let (x, y) = (c[0], c[1]);
                if forward {
                    vec![wrap(2.0 * x + y), wrap(x + y)]
                } else {
                    vec![wrap(x - y), wrap(2.0 * y - x)]
                }
            }
            InvertibleMap::CatMap {
                lattice_bits: Some(bits),
            } => {
                let (a, b) = (to_lattice(c[0], *bits), to_lattice(c[1], *bits));
                let mask = lattice_mask(*bits);
                let (a, b) = if forward {
                    ((2 * a + b) & mask, (a + b) & mask)
                } else {
                    (a.wrapping_sub(b) & mask, (2 * b).wrapping_sub(a) & mask)
                };
                vec![from_lattice(a, *bits), from_lattice(b, *bits)]
            }
            InvertibleMap::BakerMap { lattice_bits } => {
                let bits = *lattice_bits;
                let (a, b) = (to_lattice(c[0], bits), to_lattice(c[1], bits));
                let mask = lattice_mask(bits);
                let top = bits - 1;
                let (a, b) = if forward {
                    let s = a >> top;
                    (((a << 1) & mask) | (b & 1), (b >> 1) | (s << top))
                } else {
                    let s = b >> top;
                    ((a >> 1) | (s << top), ((b << 1) & mask) | (a & 1))
                };
                vec![from_lattice(a, bits), from_lattice(b, bits)]
            }
            InvertibleMap::Composed { maps } => {
                let mut p = x.clone();
                if forward {
                    for m in maps {
                        p = m.step(&p, true);
                    }
                } else {
                    for m in maps.iter().rev() {
                        p = m.step(&p, false);
                    }
                }
                return p;
            }
        };
        PhasePoint { coords }
    }
}

fn check_bits(bits: u32) -> Result<()> {
    if (1..=MAX_LATTICE_BITS).contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidSystem(format!(
            "lattice bits must be in 1..={MAX_LATTICE_BITS}, got {bits}"
        )))
    }
}

fn lattice_mask(bits: u32) -> u64 {
    (1u64 << bits) - 1
}

fn to_lattice(x: f64, bits: u32) -> u64 {
    let scale = (1u64 << bits) as f64;
    ((x * scale).round() as u64) & lattice_mask(bits)
}

fn from_lattice(a: u64, bits: u32) -> f64 {
    a as f64 / (1u64 << bits) as f64
}

/// Applies `map` `|steps|` times, forward for positive `steps` and backward
/// for negative.
pub fn evolve(x: &PhasePoint, map: &InvertibleMap, steps: i64) -> Result<PhasePoint> {
    ensure_dim(map.dim()?, x.dim())?;
    let forward = steps >= 0;
    let mut p = x.clone();
    for _ in 0..steps.unsigned_abs() {
        p = map.step(&p, forward);
    }
    Ok(p)
}
