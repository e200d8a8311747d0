//! Run configuration for the scenario gallery.
//!
//! Every scenario draws its structural parameters from one [`RunConfig`]:
//! the circle grid, the suspension space and its strip probe, the seeds and
//! sizes of the randomized suites, the truncation-study bands, and the
//! tolerances of the tunable probes. The defaults reproduce the reference
//! gallery; a JSON file with the same shape overrides them field by field,
//! and unknown keys are rejected so typos cannot silently fall back to a
//! default.

use anyhow::Context;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Circle grid used by the rotation scenarios: `n` points, band limit `k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceParams {
    /// Grid points on the circle.
    pub n: usize,
    /// Certified band limit of the grid; needs `2k + 1 <= n`.
    pub k: usize,
}

impl Default for SpaceParams {
    fn default() -> Self {
        SpaceParams { n: 64, k: 16 }
    }
}

/// Suspension space under a unit roof, and the height strip probed on it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuspensionParams {
    /// Columns over the base circle.
    pub base_size: usize,
    /// Vertical cells per column; one cell is `1 / level_count` high.
    pub level_count: usize,
    /// Base rotation, as a fraction of the full circle.
    pub rotation: f64,
    /// Heights below this stay vertical for a whole unit of time.
    pub floor: f64,
    /// Height strip `[a, b)` whose indicator drives the scaling probes.
    pub strip: (f64, f64),
}

impl Default for SuspensionParams {
    fn default() -> Self {
        SuspensionParams {
            base_size: 512,
            level_count: 1000,
            rotation: 0.618_033_988_749_894_9,
            floor: 0.99,
            strip: (0.3, 0.5),
        }
    }
}

/// Seeds of the randomized suites; identical seeds give bitwise identical
/// draws, which keeps every report byte-reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    /// Leibniz suite over the composition group.
    pub derivation: u64,
    /// Detector suites on the multiplier counterexample.
    pub detector: u64,
    /// Planted transfer-function family.
    pub transfer: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            derivation: 2026,
            detector: 7,
            transfer: 11,
        }
    }
}

/// Sizes of the randomized suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Suites {
    /// Random pairs in the Leibniz suite.
    pub derivation_pairs: usize,
    /// Random pairs in each detector run.
    pub detector_pairs: usize,
    /// Cases in the planted transfer family (alternating solvable and
    /// obstructed).
    pub transfer_cases: usize,
}

impl Default for Suites {
    fn default() -> Self {
        Suites {
            derivation_pairs: 100,
            detector_pairs: 50,
            transfer_cases: 20,
        }
    }
}

/// Probe grids shared across scenarios.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Probes {
    /// Times for multiplicativity and group-law spot checks.
    pub times: Vec<f64>,
    /// Factor counts for the product-formula convergence study.
    pub trotter_ns: Vec<usize>,
    /// Step for finite-difference generator estimates.
    pub diff_step: f64,
    /// Times for orbit-continuity scaling fits; every entry must be a
    /// multiple of the suspension cell height so strip transport is exact.
    pub holder_times: Vec<f64>,
}

impl Default for Probes {
    fn default() -> Self {
        Probes {
            times: vec![0.3, 1.0, -2.0],
            trotter_ns: vec![8, 16, 32, 64, 128, 256, 512, 1024],
            diff_step: 1e-3,
            holder_times: vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1],
        }
    }
}

/// Parameters of the unbounded-derivative truncation study.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnboundedParams {
    /// Truncation bands, strictly increasing.
    pub bands: Vec<usize>,
    /// Orbit times at which the first-order remainder is measured.
    pub times: Vec<f64>,
    /// Single linear constant the remainders must obey across all bands.
    pub remainder_constant: f64,
}

impl Default for UnboundedParams {
    fn default() -> Self {
        UnboundedParams {
            bands: vec![16, 64, 256],
            times: vec![1e-2, 1e-3],
            remainder_constant: 60.0,
        }
    }
}

/// Tolerances of the tunable randomized suites. Thresholds that certify
/// closed-form identities are fixed inside the scenarios and are not
/// configurable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Worst Leibniz residual allowed for a true derivation.
    pub derivation: f64,
    /// Multiplicativity residual allowed for a composition group.
    pub multiplicativity: f64,
    /// Detector cutoff separating derivations from defective generators.
    pub detector: f64,
    /// Distance from the mean to `i * integers` below which the transfer
    /// equation is declared solvable.
    pub transfer: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            derivation: 1e-9,
            multiplicativity: 1e-10,
            detector: 1e-6,
            transfer: 1e-9,
        }
    }
}

/// Top-level configuration consumed by every scenario.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceParams,
    pub suspension: SuspensionParams,
    pub seeds: Seeds,
    pub suites: Suites,
    pub probes: Probes,
    pub unbounded: UnboundedParams,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Loads a configuration from a JSON file and validates it.
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pretty JSON rendering, used by `print-defaults` and accepted back
    /// verbatim by `--config`.
    pub fn to_pretty_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    /// Rejects parameter combinations the scenarios cannot probe honestly.
    pub fn validate(&self) -> anyhow::Result<()> {
        let s = &self.space;
        anyhow::ensure!(
            s.n >= 16 && s.n <= 256,
            "space.n must lie in 16..=256 so dense operator matrices stay tractable (got {})",
            s.n
        );
        anyhow::ensure!(
            s.k >= 8 && 2 * s.k + 1 <= s.n,
            "space.k must satisfy 8 <= k and 2k+1 <= n (got k = {}, n = {})",
            s.k,
            s.n
        );

        let u = &self.suspension;
        anyhow::ensure!(
            u.base_size >= 16,
            "suspension.base_size must be at least 16 (got {})",
            u.base_size
        );
        anyhow::ensure!(
            u.level_count >= 100,
            "suspension.level_count must be at least 100 (got {})",
            u.level_count
        );
        anyhow::ensure!(
            u.rotation > 0.0 && u.rotation < 1.0,
            "suspension.rotation must lie strictly between 0 and 1 (got {})",
            u.rotation
        );
        anyhow::ensure!(
            u.floor > 0.0 && u.floor <= 1.0,
            "suspension.floor must lie in (0, 1] (got {})",
            u.floor
        );
        let (a, b) = u.strip;
        anyhow::ensure!(
            0.0 < a && a < b && b < u.floor,
            "suspension.strip must satisfy 0 < a < b < floor (got [{a}, {b}), floor {})",
            u.floor
        );
        let margin = a.min(u.floor - b).min(b - a);
        let longest = self
            .probes
            .holder_times
            .iter()
            .fold(0.0f64, |m, &t| m.max(t.abs()));
        anyhow::ensure!(
            longest < margin,
            "probes.holder_times reach {longest} but the strip only admits |t| < {margin}"
        );

        let p = &self.probes;
        anyhow::ensure!(
            !p.times.is_empty() && p.times.iter().all(|t| t.is_finite() && *t != 0.0),
            "probes.times must be nonzero finite times"
        );
        anyhow::ensure!(
            p.trotter_ns.len() >= 2 && p.trotter_ns.windows(2).all(|w| w[0] < w[1]),
            "probes.trotter_ns must be strictly increasing with at least two entries"
        );
        anyhow::ensure!(
            p.diff_step > 0.0 && p.diff_step.is_finite(),
            "probes.diff_step must be a positive finite step (got {})",
            p.diff_step
        );
        anyhow::ensure!(
            p.holder_times.len() >= 3 && p.holder_times.iter().all(|t| *t > 0.0),
            "probes.holder_times must hold at least three positive times"
        );
        let h = 1.0 / u.level_count as f64;
        for &t in &p.holder_times {
            let cells = t / h;
            anyhow::ensure!(
                (cells - cells.round()).abs() < 1e-9,
                "holder time {t} is not a multiple of the cell height {h}"
            );
        }

        anyhow::ensure!(
            self.suites.derivation_pairs >= 1 && self.suites.detector_pairs >= 1,
            "suite sizes must be at least 1"
        );
        anyhow::ensure!(
            self.suites.transfer_cases >= 2,
            "suites.transfer_cases must be at least 2 (got {})",
            self.suites.transfer_cases
        );

        let ub = &self.unbounded;
        anyhow::ensure!(
            ub.bands.len() >= 2 && ub.bands.windows(2).all(|w| w[0] < w[1]),
            "unbounded.bands must be strictly increasing with at least two entries"
        );
        anyhow::ensure!(
            *ub.bands.first().unwrap() >= 1 && *ub.bands.last().unwrap() <= 400,
            "unbounded.bands must lie within 1..=400 for the study grid"
        );
        anyhow::ensure!(
            !ub.times.is_empty() && ub.times.iter().all(|t| *t > 0.0 && t.is_finite()),
            "unbounded.times must be positive finite times"
        );
        anyhow::ensure!(
            ub.remainder_constant > 0.0,
            "unbounded.remainder_constant must be positive (got {})",
            ub.remainder_constant
        );

        let tol = &self.tolerances;
        anyhow::ensure!(
            tol.derivation > 0.0
                && tol.multiplicativity > 0.0
                && tol.detector > 0.0
                && tol.transfer > 0.0,
            "tolerances must all be positive"
        );
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
