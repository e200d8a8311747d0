//! Measurable flows on the discretized spaces and their Koopman action
//! `f -> f ∘ T_t`.
//!
//! Three flow kinds are provided:
//!
//! * [`RotationFlow`] — the rigid rotation `x -> x + t` on a circle grid;
//! * [`SpecialFlow`] — unit-speed vertical motion on a suspension space:
//!   points climb their cell column and, on crossing the roof, re-enter at
//!   the bottom of the column shifted by the base rotation;
//! * [`FiniteMapFlow`] — iterates of a permutation of a finite space, with
//!   `T_t` read as the nearest integer power.
//!
//! All three are invertible and measure preserving, so every pushforward
//! density here is identically one; the densities are still computed
//! honestly so the invariants can be checked rather than assumed.

use serde::{Deserialize, Serialize};

use crate::error::{KoopError, Result};
use crate::space::{
    CellFunction, CircleFunction, CircleSpace, FiniteFunction, FiniteSpace, SpecialFlowSpace, TAU,
};

// ---------------------------------------------------------------------------
// pushforward densities
// ---------------------------------------------------------------------------

/// The density `d(T_t)_* mu / d mu` evaluated on the points of a space,
/// together with the point masses needed to integrate it.
#[derive(Clone, Debug)]
pub struct PushforwardDensity {
    pub t: f64,
    values: Vec<f64>,
    masses: Vec<f64>,
}

impl PushforwardDensity {
    fn new(t: f64, values: Vec<f64>, masses: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), masses.len());
        PushforwardDensity { t, values, masses }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest density value; nonnegativity is a structural requirement.
    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Total mass of the pushforward, which must be one.
    pub fn total_mass(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.masses)
            .map(|(d, w)| d * w)
            .sum()
    }

    /// Largest deviation of the density from the constant one; zero exactly
    /// for measure-preserving flows.
    pub fn max_deviation_from_one(&self) -> f64 {
        self.values
            .iter()
            .map(|d| (d - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// rotation flow
// ---------------------------------------------------------------------------

/// The rotation flow `T_t x = x + t` on a circle grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationFlow {
    space: CircleSpace,
}

impl RotationFlow {
    pub fn new(space: CircleSpace) -> Self {
        RotationFlow { space }
    }

    pub fn space(&self) -> CircleSpace {
        self.space
    }

    /// If `t` is within `1e-9` grid steps of `2*pi*m/N`, the exact step
    /// count `m`.
    pub fn commensurate_steps(&self, t: f64) -> Option<i64> {
        let steps = t * self.space.len() as f64 / TAU;
        let m = steps.round();
        ((steps - m).abs() <= 1e-9).then_some(m as i64)
    }

    /// Koopman action `f -> f ∘ T_t` (exact permutation on commensurate
    /// times, spectral phase shift otherwise).
    pub fn koopman(&self, t: f64, f: &CircleFunction) -> Result<CircleFunction> {
        if f.space() != self.space {
            return Err(KoopError::SpaceMismatch);
        }
        Ok(f.rotated(t))
    }

    /// Where the flow sends the angle `x`.
    pub fn point_map(&self, t: f64, x: f64) -> f64 {
        (x + t).rem_euclid(TAU)
    }

    /// Rotations preserve the normalized counting measure exactly.
    pub fn pushforward_density(&self, t: f64) -> PushforwardDensity {
        let n = self.space.len();
        PushforwardDensity::new(t, vec![1.0; n], vec![self.space.weight(); n])
    }
}

// ---------------------------------------------------------------------------
// suspension flow
// ---------------------------------------------------------------------------

/// Unit-speed vertical flow on a [`SpecialFlowSpace`], with base rotation by
/// the fraction `rotation` of the full circle on roof crossings.
///
/// Time is resolved in cell steps of `1/L`. The base rotation is realized as
/// the commensurate shift by `round(rotation * m)` columns, so transport is
/// an exact permutation of cells for every grid-aligned time.
#[derive(Clone, Debug)]
pub struct SpecialFlow {
    space: SpecialFlowSpace,
    rotation: f64,
    base_steps: usize,
}

impl SpecialFlow {
    pub fn new(space: SpecialFlowSpace, rotation: f64) -> Result<Self> {
        if !rotation.is_finite() {
            return Err(KoopError::InvalidParameter("rotation must be finite".into()));
        }
        let m = space.base_size() as f64;
        let base_steps = (rotation.rem_euclid(1.0) * m).round() as usize % space.base_size();
        Ok(SpecialFlow {
            space,
            rotation,
            base_steps,
        })
    }

    pub fn space(&self) -> &SpecialFlowSpace {
        &self.space
    }

    /// The requested base rotation (fraction of the circle).
    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    /// The realized, commensurate column shift per roof crossing.
    pub fn base_steps(&self) -> usize {
        self.base_steps
    }

    /// Number of vertical cell steps representing time `t`, and whether the
    /// representation is exact (`t` an integer multiple of `1/L` within
    /// `1e-9` steps). Inexact times are snapped to the nearest cell.
    pub fn steps_for(&self, t: f64) -> (i64, bool) {
        let raw = t * self.space.level_count() as f64;
        let k = raw.round();
        (k as i64, (raw - k).abs() <= 1e-9)
    }

    /// Exact cell transport by `steps` vertical cell steps (either sign).
    pub fn transport(&self, flat: usize, steps: i64) -> usize {
        let m = self.space.base_size();
        let levels = self.space.levels();
        let (mut col, lvl) = self.space.split_index(flat);
        let mut lvl = lvl as i64 + steps;
        while lvl >= levels[col] as i64 {
            lvl -= levels[col] as i64;
            col = (col + self.base_steps) % m;
        }
        while lvl < 0 {
            col = (col + m - self.base_steps) % m;
            lvl += levels[col] as i64;
        }
        self.space.cell_index(col, lvl as usize)
    }

    /// Koopman action `f -> f ∘ T_t` on cell functions. Times that are not
    /// grid aligned are snapped to the nearest cell (see [`steps_for`]).
    ///
    /// [`steps_for`]: Self::steps_for
    pub fn koopman(&self, t: f64, f: &CellFunction) -> Result<CellFunction> {
        if f.space() != &self.space {
            return Err(KoopError::SpaceMismatch);
        }
        let (steps, _) = self.steps_for(t);
        let values = (0..self.space.cell_count())
            .map(|c| f.values()[self.transport(c, steps)])
            .collect();
        CellFunction::new(self.space.clone(), values)
    }

    /// Transport is a permutation of equal-mass cells, so the density is
    /// exactly one; it is computed by counting preimages rather than by
    /// fiat.
    pub fn pushforward_density(&self, t: f64) -> PushforwardDensity {
        let (steps, _) = self.steps_for(t);
        let total = self.space.cell_count();
        let mut hits = vec![0usize; total];
        for c in 0..total {
            hits[self.transport(c, steps)] += 1;
        }
        let values = hits.into_iter().map(|h| h as f64).collect();
        PushforwardDensity::new(t, values, vec![self.space.weight(); total])
    }
}

/// Measure of the symmetric difference between the horizontal strip
/// `a <= height < b` and its image under the suspension flow at time `t`.
#[derive(Clone, Copy, Debug)]
pub struct StripDifference {
    /// Measure of `H symmetric-difference T_t H`.
    pub measure: f64,
    /// Number of differing cells.
    pub cells: usize,
    /// Vertical cell steps actually used for `t`.
    pub steps: i64,
    /// Whether `t` had to be snapped to the cell grid.
    pub snapped: bool,
}

/// Computes the measure of `H △ T_t H` for the strip `H = {a <= height < b}`
/// by honest counting: build the indicator, transport it, compare cells.
///
/// Requires `0 < a < b <= floor` and `|t| < min(a, floor - b, b - a)` so the
/// moved strip neither crosses the roof nor wraps onto itself.
pub fn strip_symmetric_difference(
    flow: &SpecialFlow,
    a: f64,
    b: f64,
    t: f64,
) -> Result<StripDifference> {
    let floor = flow.space().floor();
    let margin = a.min(floor - b).min(b - a);
    if !(t.abs() < margin) {
        return Err(KoopError::InvalidParameter(format!(
            "time {t} too large for strip [{a}, {b}) with floor {floor}: need |t| < {margin}"
        )));
    }
    let h = CellFunction::indicator_strip(flow.space().clone(), a, b)?;
    let (steps, exact) = flow.steps_for(t);
    // 1_{T_t H}(c) = 1_H(T_{-t} c)
    let moved = flow.koopman(-t, &h)?;
    let cells = h
        .values()
        .iter()
        .zip(moved.values())
        .filter(|(x, y)| (x.re - y.re).abs() > 0.5)
        .count();
    Ok(StripDifference {
        measure: cells as f64 * flow.space().weight(),
        cells,
        steps,
        snapped: !exact,
    })
}

// ---------------------------------------------------------------------------
// finite map flow
// ---------------------------------------------------------------------------

/// Iterates of a permutation `sigma` of a finite space; `T_t` is read as
/// `sigma^k` with `k = round(t)` (exact at integer times).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMapFlow {
    space: FiniteSpace,
    map: Vec<usize>,
}

impl FiniteMapFlow {
    pub fn new(space: FiniteSpace, map: Vec<usize>) -> Result<Self> {
        if map.len() != space.len() {
            return Err(KoopError::InvalidParameter(format!(
                "map has {} entries for a space of {} points",
                map.len(),
                space.len()
            )));
        }
        let mut seen = vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || seen[i] {
                return Err(KoopError::InvalidParameter(
                    "map must be a permutation".into(),
                ));
            }
            seen[i] = true;
        }
        Ok(FiniteMapFlow { space, map })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn steps_for(&self, t: f64) -> i64 {
        t.round() as i64
    }

    fn apply_map(&self, i: usize, steps: i64) -> usize {
        let mut j = i;
        if steps >= 0 {
            for _ in 0..steps {
                j = self.map[j];
            }
        } else {
            // inverse permutation, applied |steps| times
            let mut inv = vec![0usize; self.map.len()];
            for (a, &b) in self.map.iter().enumerate() {
                inv[b] = a;
            }
            for _ in 0..(-steps) {
                j = inv[j];
            }
        }
        j
    }

    pub fn koopman(&self, t: f64, f: &FiniteFunction) -> Result<FiniteFunction> {
        if f.space() != &self.space {
            return Err(KoopError::SpaceMismatch);
        }
        let steps = self.steps_for(t);
        let values = (0..self.space.len())
            .map(|i| f.values()[self.apply_map(i, steps)])
            .collect();
        FiniteFunction::new(self.space.clone(), values)
    }

    /// Density of the pushforward: `d(i) = w(T^{-1} i) / w(i)`; identically
    /// one exactly when the weights are invariant under the map.
    pub fn pushforward_density(&self, t: f64) -> PushforwardDensity {
        let steps = self.steps_for(t);
        let w = self.space.weights();
        let values = (0..self.space.len())
            .map(|i| w[self.apply_map(i, -steps)] / w[i])
            .collect();
        PushforwardDensity::new(t, values, w.to_vec())
    }
}

// ---------------------------------------------------------------------------
// flow envelope for serialization
// ---------------------------------------------------------------------------

/// A flow of any kind, with a tagged JSON form
/// `{"kind": "...", "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Flow {
    Rotation(RotationFlow),
    SpecialFlow(SpecialFlowRepr),
    FiniteMap(FiniteMapFlow),
}

/// Serializable description of a suspension flow (the cell layout is
/// rebuilt from these parameters on load).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialFlowRepr {
    pub base_size: usize,
    pub rotation: f64,
    pub level_count: usize,
    pub roof: Vec<f64>,
    pub floor: f64,
}

impl Flow {
    pub fn from_rotation(flow: RotationFlow) -> Self {
        Flow::Rotation(flow)
    }

    pub fn from_special(flow: &SpecialFlow) -> Self {
        Flow::SpecialFlow(SpecialFlowRepr {
            base_size: flow.space().base_size(),
            rotation: flow.rotation(),
            level_count: flow.space().level_count(),
            roof: (0..flow.space().base_size())
                .map(|i| flow.space().levels()[i] as f64 / flow.space().level_count() as f64)
                .collect(),
            floor: flow.space().floor(),
        })
    }

    pub fn from_finite(flow: FiniteMapFlow) -> Self {
        Flow::FiniteMap(flow)
    }

    /// Rebuilds the runnable flow described by this value.
    pub fn build_special(&self) -> Result<SpecialFlow> {
        match self {
            Flow::SpecialFlow(repr) => {
                let space = SpecialFlowSpace::with_roof(
                    repr.base_size,
                    repr.roof.clone(),
                    repr.level_count,
                    repr.floor,
                )?;
                SpecialFlow::new(space, repr.rotation)
            }
            _ => Err(KoopError::InvalidParameter(
                "not a suspension flow description".into(),
            )),
        }
    }
}
