//! Discretized probability spaces and the function types that live on them.
//!
//! Three substrates back everything else in the crate:
//!
//! * [`CircleSpace`] / [`CircleFunction`] — the unit circle sampled at `N`
//!   equispaced points with normalized counting measure (each point has mass
//!   `1/N`), together with a declared band limit `K` so that trigonometric
//!   polynomials of degree at most `K` are represented exactly;
//! * [`FiniteSpace`] / [`FiniteFunction`] — small weighted point sets used as
//!   brute-force cross-check substrates;
//! * [`SpecialFlowSpace`] / [`CellFunction`] — unit-speed suspension spaces:
//!   a discrete base circle of `m` columns, each carrying a stack of equal
//!   measure cells up to a (discretized) roof function.
//!
//! Grid samples are the canonical representation throughout; spectral data
//! is a derived view obtained by the discrete Fourier transform.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KoopError, Result};
use crate::spectral;

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

// ---------------------------------------------------------------------------
// circle space
// ---------------------------------------------------------------------------

/// The unit circle discretized at `N` equispaced points `x_j = 2*pi*j/N`,
/// carrying normalized counting measure and a declared band limit `K`.
///
/// The invariant `2K + 1 <= N` guarantees that all modes `|k| <= K` are
/// distinguishable on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleSpace {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
}

impl CircleSpace {
    /// Builds a circle grid with `n` points and band limit `k`.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 8 {
            return Err(KoopError::GridTooSmall { n });
        }
        if 2 * k + 1 > n {
            return Err(KoopError::BandExceedsNyquist { k, n });
        }
        Ok(CircleSpace { n, k })
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Declared band limit `K`.
    pub fn band_limit(&self) -> usize {
        self.k
    }

    /// Measure of a single grid point.
    pub fn weight(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// The angle of grid point `j`.
    pub fn point(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// Largest band `b` such that a product with certified band `b` is
    /// alias-free on this grid (`2b + 1 <= N`).
    pub fn alias_free_cap(&self) -> usize {
        (self.n - 1) / 2
    }

    /// The rotation time `2*pi*m/N` after which the grid maps onto itself.
    pub fn commensurate_time(&self, m: i64) -> f64 {
        TAU * m as f64 / self.n as f64
    }
}

// ---------------------------------------------------------------------------
// band hints
// ---------------------------------------------------------------------------

/// Certified knowledge about the spectral support of a [`CircleFunction`].
///
/// `Limited(b)` certifies that all Fourier coefficients with `|k| > b`
/// vanish (up to rounding). `Unknown` makes no claim. `Aliased` marks the
/// result of a product whose certified bands overflow the grid, so its
/// samples no longer pin down the function it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandHint {
    Limited(usize),
    Unknown,
    Aliased,
}

impl BandHint {
    /// Hint for a pointwise product (bands add; overflow marks aliasing).
    fn product(self, other: BandHint, cap: usize) -> BandHint {
        match (self, other) {
            (BandHint::Aliased, _) | (_, BandHint::Aliased) => BandHint::Aliased,
            (BandHint::Limited(a), BandHint::Limited(b)) => {
                if a + b <= cap {
                    BandHint::Limited(a + b)
                } else {
                    BandHint::Aliased
                }
            }
            _ => BandHint::Unknown,
        }
    }

    /// Hint for a linear combination (bands take the maximum).
    fn linear(self, other: BandHint) -> BandHint {
        match (self, other) {
            (BandHint::Aliased, _) | (_, BandHint::Aliased) => BandHint::Aliased,
            (BandHint::Limited(a), BandHint::Limited(b)) => BandHint::Limited(a.max(b)),
            _ => BandHint::Unknown,
        }
    }

    /// The certified band, if any.
    pub fn limit(&self) -> Option<usize> {
        match self {
            BandHint::Limited(b) => Some(*b),
            _ => None,
        }
    }
}

/// The three norms reported for a function on a probability space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub sup: f64,
}

// ---------------------------------------------------------------------------
// circle functions
// ---------------------------------------------------------------------------

/// A complex-valued function on a [`CircleSpace`], stored by its grid
/// samples together with a [`BandHint`].
#[derive(Clone, Debug)]
pub struct CircleFunction {
    space: CircleSpace,
    samples: Vec<Complex64>,
    hint: BandHint,
}

impl CircleFunction {
    /// Wraps explicit samples. All entries must be finite and the length
    /// must match the grid.
    pub fn from_samples(
        space: CircleSpace,
        samples: Vec<Complex64>,
        hint: BandHint,
    ) -> Result<Self> {
        if samples.len() != space.len() {
            return Err(KoopError::InvalidParameter(format!(
                "expected {} samples, got {}",
                space.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KoopError::NonFiniteSample);
        }
        Ok(CircleFunction {
            space,
            samples,
            hint,
        })
    }

    /// Builds the trigonometric polynomial `sum c_k e^{ikx}` from a sparse
    /// list of `(mode, coefficient)` pairs with `|mode| <= K`.
    pub fn from_modes(space: CircleSpace, modes: &[(i64, Complex64)]) -> Result<Self> {
        let n = space.len();
        let mut bins = vec![Complex64::new(0.0, 0.0); n];
        let mut band = 0usize;
        for &(k, c) in modes {
            if k.unsigned_abs() as usize > space.band_limit() {
                return Err(KoopError::BandExceedsNyquist {
                    k: k.unsigned_abs() as usize,
                    n,
                });
            }
            band = band.max(k.unsigned_abs() as usize);
            bins[spectral::bin_of_mode(k, n)] += c;
        }
        let samples = spectral::inverse(&bins);
        CircleFunction::from_samples(space, samples, BandHint::Limited(band))
    }

    /// Samples an arbitrary rule on the grid (no band certificate).
    pub fn from_fn(space: CircleSpace, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = (0..space.len()).map(|j| f(space.point(j))).collect();
        CircleFunction::from_samples(space, samples, BandHint::Unknown)
    }

    /// The constant function with value `z`.
    pub fn constant(space: CircleSpace, z: Complex64) -> Self {
        CircleFunction {
            space,
            samples: vec![z; space.len()],
            hint: BandHint::Limited(0),
        }
    }

    /// The constant function `1`.
    pub fn one(space: CircleSpace) -> Self {
        CircleFunction::constant(space, Complex64::new(1.0, 0.0))
    }

    /// The character `e_k(x) = e^{ikx}`.
    pub fn character(space: CircleSpace, k: i64) -> Result<Self> {
        CircleFunction::from_modes(space, &[(k, Complex64::new(1.0, 0.0))])
    }

    /// `cos x = (e_1 + e_{-1}) / 2`, the workhorse weight derivative.
    pub fn cosine(space: CircleSpace) -> Self {
        let half = Complex64::new(0.5, 0.0);
        CircleFunction::from_modes(space, &[(1, half), (-1, half)])
            .expect("band 1 always fits")
    }

    /// Indicator of the set where `pred` holds (checked pointwise on grid
    /// angles). No band certificate: indicators have slowly decaying tails.
    pub fn indicator(space: CircleSpace, pred: impl Fn(f64) -> bool) -> Self {
        let samples = (0..space.len())
            .map(|j| {
                if pred(space.point(j)) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        CircleFunction {
            space,
            samples,
            hint: BandHint::Unknown,
        }
    }

    /// Seeded random trigonometric polynomial with modes up to `max_mode`.
    ///
    /// Coefficients are independent Gaussians damped by `0.4 / (1 + |k|)`,
    /// which keeps sup norms of order one so that exponentials of these
    /// functions stay well conditioned. `real_valued` enforces the conjugate
    /// symmetry `c_{-k} = conj(c_k)`, `mean_zero` clears the zero mode.
    /// Identical arguments produce bitwise identical samples.
    pub fn random_bandlimited(
        space: CircleSpace,
        seed: u64,
        max_mode: usize,
        real_valued: bool,
        mean_zero: bool,
    ) -> Result<Self> {
        if max_mode > space.band_limit() {
            return Err(KoopError::BandExceedsNyquist {
                k: max_mode,
                n: space.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Box-Muller keeps us independent of distribution crates and pins
        // the draw order (one variate per call, sine branch unused).
        let mut normal = move || -> f64 {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            (-2.0 * (1.0 - u).ln()).sqrt() * (TAU * v).cos()
        };
        let damp = |k: usize| 0.4 / (1.0 + k as f64);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut modes: Vec<(i64, Complex64)> = Vec::new();
        let c0 = Complex64::new(normal(), normal());
        if !mean_zero {
            if real_valued {
                modes.push((0, Complex64::new(c0.re * damp(0), 0.0)));
            } else {
                modes.push((0, c0 * damp(0) * inv_sqrt2));
            }
        }
        for k in 1..=max_mode {
            let c = Complex64::new(normal(), normal()) * (damp(k) * inv_sqrt2);
            modes.push((k as i64, c));
            if real_valued {
                modes.push((-(k as i64), c.conj()));
            } else {
                let d = Complex64::new(normal(), normal()) * (damp(k) * inv_sqrt2);
                modes.push((-(k as i64), d));
            }
        }
        CircleFunction::from_modes(space, &modes)
            .map(|f| f.with_hint(BandHint::Limited(max_mode)))
    }

    pub fn space(&self) -> CircleSpace {
        self.space
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn hint(&self) -> BandHint {
        self.hint
    }

    /// Replaces the band hint (caller certifies).
    pub fn with_hint(mut self, hint: BandHint) -> Self {
        self.hint = hint;
        self
    }

    fn check_space(&self, other: &CircleFunction) -> Result<()> {
        if self.space != other.space {
            return Err(KoopError::SpaceMismatch);
        }
        Ok(())
    }

    /// Hermitian inner product `(f, g) = (1/N) sum_j f(x_j) conj(g(x_j))`,
    /// linear in the first slot.
    pub fn inner(&self, other: &CircleFunction) -> Result<Complex64> {
        self.check_space(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.samples.iter().zip(&other.samples) {
            acc += a * b.conj();
        }
        Ok(acc * self.space.weight())
    }

    /// L1, L2 and sup norm with respect to the normalized counting measure.
    pub fn norms(&self) -> Norms {
        let w = self.space.weight();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut sup = 0.0f64;
        for z in &self.samples {
            let a = z.norm();
            l1 += a;
            l2 += a * a;
            sup = sup.max(a);
        }
        Norms {
            l1: l1 * w,
            l2: (l2 * w).sqrt(),
            sup,
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norms().l2
    }

    pub fn norm_sup(&self) -> f64 {
        self.norms().sup
    }

    /// Pointwise product. The result's hint follows the band arithmetic of
    /// [`BandHint::product`]: certified bands add, and overflow past the
    /// grid's alias-free capacity marks the result [`BandHint::Aliased`].
    pub fn multiply(&self, other: &CircleFunction) -> Result<CircleFunction> {
        self.check_space(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Ok(CircleFunction {
            space: self.space,
            samples,
            hint: self.hint.product(other.hint, self.space.alias_free_cap()),
        })
    }

    pub fn add(&self, other: &CircleFunction) -> Result<CircleFunction> {
        self.check_space(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CircleFunction {
            space: self.space,
            samples,
            hint: self.hint.linear(other.hint),
        })
    }

    pub fn sub(&self, other: &CircleFunction) -> Result<CircleFunction> {
        self.check_space(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CircleFunction {
            space: self.space,
            samples,
            hint: self.hint.linear(other.hint),
        })
    }

    pub fn scale(&self, z: Complex64) -> CircleFunction {
        CircleFunction {
            space: self.space,
            samples: self.samples.iter().map(|a| a * z).collect(),
            hint: self.hint,
        }
    }

    /// Pointwise complex conjugate. Conjugation mirrors the spectrum, so any
    /// band certificate survives.
    pub fn conjugate(&self) -> CircleFunction {
        CircleFunction {
            space: self.space,
            samples: self.samples.iter().map(|a| a.conj()).collect(),
            hint: self.hint,
        }
    }

    /// Pointwise exponential. Exact as samples of `e^f`; the result carries
    /// no band certificate because the exponential spreads the spectrum.
    pub fn exp(&self) -> CircleFunction {
        CircleFunction {
            space: self.space,
            samples: self.samples.iter().map(|z| z.exp()).collect(),
            hint: BandHint::Unknown,
        }
    }

    /// Pointwise division. Errors when the denominator gets within `1e-12`
    /// of zero anywhere.
    pub fn divide(&self, other: &CircleFunction) -> Result<CircleFunction> {
        self.check_space(other)?;
        let min_abs = other
            .samples
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if min_abs < 1e-12 {
            return Err(KoopError::VanishingValue { min_abs });
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a / b)
            .collect();
        Ok(CircleFunction {
            space: self.space,
            samples,
            hint: BandHint::Unknown,
        })
    }

    /// Composition with the rotation by `t`: returns samples of `f(x + t)`.
    ///
    /// For commensurate `t = 2*pi*m/N` (within `1e-9` of an integer `m`)
    /// this is the exact index permutation `j -> j + m`; otherwise the
    /// coefficients of the trigonometric interpolant are phase shifted,
    /// which is exact precisely for band-limited functions.
    pub fn rotated(&self, t: f64) -> CircleFunction {
        let n = self.space.len();
        let steps = t * n as f64 / TAU;
        let m = steps.round();
        if (steps - m).abs() <= 1e-9 {
            let m = (m as i64).rem_euclid(n as i64) as usize;
            let samples = (0..n).map(|j| self.samples[(j + m) % n]).collect();
            return CircleFunction {
                space: self.space,
                samples,
                hint: self.hint,
            };
        }
        let mut coeffs = spectral::forward(&self.samples);
        spectral::phase_shift(&mut coeffs, t);
        CircleFunction {
            space: self.space,
            samples: spectral::inverse(&coeffs),
            hint: self.hint,
        }
    }

    /// Spectral derivative `f'` (exact for certified band-limited input,
    /// the interpolant's derivative otherwise).
    pub fn derivative(&self) -> CircleFunction {
        let mut coeffs = spectral::forward(&self.samples);
        spectral::differentiate(&mut coeffs);
        CircleFunction {
            space: self.space,
            samples: spectral::inverse(&coeffs),
            hint: self.hint,
        }
    }

    /// Mean value `(1/N) sum_j f(x_j)`, i.e. the zero mode.
    pub fn mean(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for z in &self.samples {
            acc += z;
        }
        acc * self.space.weight()
    }

    /// Fourier coefficient of mode `k` of the trigonometric interpolant.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let coeffs = spectral::forward(&self.samples);
        coeffs[spectral::bin_of_mode(k, self.space.len())]
    }

    /// All coefficients in FFT bin order (see the `spectral` conventions).
    pub fn spectrum(&self) -> Vec<Complex64> {
        spectral::forward(&self.samples)
    }

    /// Largest imaginary part in absolute value; small for honest
    /// real-valued data.
    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Serializes to the interchange schema
    /// `{"space":{"N":..,"K":..},"samples":[[re,im],..]}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CircleFunctionRepr::from(self))?)
    }

    /// Reads the interchange schema back; the band hint is not part of the
    /// schema, so the result carries [`BandHint::Unknown`].
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: CircleFunctionRepr = serde_json::from_str(text)?;
        let space = CircleSpace::new(repr.space.n, repr.space.k)?;
        let samples = repr
            .samples
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        CircleFunction::from_samples(space, samples, BandHint::Unknown)
    }
}

#[derive(Serialize, Deserialize)]
struct CircleFunctionRepr {
    space: CircleSpace,
    samples: Vec<(f64, f64)>,
}

impl From<&CircleFunction> for CircleFunctionRepr {
    fn from(f: &CircleFunction) -> Self {
        CircleFunctionRepr {
            space: f.space,
            samples: f.samples.iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// finite spaces
// ---------------------------------------------------------------------------

/// A finite probability space: points `0..n` with positive weights that sum
/// to one. Serves as the brute-force oracle substrate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpace {
    weights: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(KoopError::InvalidParameter("empty weight list".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(KoopError::InvalidParameter(
                "weights must be positive and finite".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(KoopError::InvalidParameter(format!(
                "weights must sum to one, got {total}"
            )));
        }
        Ok(FiniteSpace { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        FiniteSpace::new(vec![1.0 / n as f64; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// A complex function on a [`FiniteSpace`].
#[derive(Clone, Debug)]
pub struct FiniteFunction {
    space: FiniteSpace,
    values: Vec<Complex64>,
}

impl FiniteFunction {
    pub fn new(space: FiniteSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(KoopError::InvalidParameter(format!(
                "expected {} values, got {}",
                space.len(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KoopError::NonFiniteSample);
        }
        Ok(FiniteFunction { space, values })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn inner(&self, other: &FiniteFunction) -> Result<Complex64> {
        if self.space != other.space {
            return Err(KoopError::SpaceMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), w) in self.values.iter().zip(&other.values).zip(self.space.weights()) {
            acc += a * b.conj() * w;
        }
        Ok(acc)
    }

    pub fn norms(&self) -> Norms {
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut sup = 0.0f64;
        for (z, w) in self.values.iter().zip(self.space.weights()) {
            let a = z.norm();
            l1 += a * w;
            l2 += a * a * w;
            sup = sup.max(a);
        }
        Norms {
            l1,
            l2: l2.sqrt(),
            sup,
        }
    }
}

// ---------------------------------------------------------------------------
// suspension (special flow) spaces
// ---------------------------------------------------------------------------

/// A unit-speed suspension space over a discrete circle base.
///
/// The base has `m` columns; column `i` carries `n_i = round(F_i * L)` cells
/// of height `1/L`, where `F` is the roof function and `L` the vertical
/// resolution. All cells have equal geometric size, so the normalized cell
/// measure is uniform: each cell weighs `1 / total`.
///
/// A declared floor `c` with `0 < c` and `F > c` everywhere certifies room
/// for vertical transport below the roof.
#[derive(Clone, Debug)]
pub struct SpecialFlowSpace {
    inner: Arc<SpecialFlowData>,
}

#[derive(Debug, PartialEq)]
struct SpecialFlowData {
    base_size: usize,
    level_count: usize,
    floor: f64,
    roof: Vec<f64>,
    levels: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl PartialEq for SpecialFlowSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl SpecialFlowSpace {
    /// Suspension under a constant roof.
    pub fn constant_roof(
        base_size: usize,
        roof: f64,
        level_count: usize,
        floor: f64,
    ) -> Result<Self> {
        SpecialFlowSpace::with_roof(base_size, vec![roof; base_size], level_count, floor)
    }

    /// Suspension under a sampled roof (one value per base column).
    pub fn with_roof(
        base_size: usize,
        roof: Vec<f64>,
        level_count: usize,
        floor: f64,
    ) -> Result<Self> {
        if base_size == 0 || level_count == 0 {
            return Err(KoopError::InvalidParameter(
                "base size and level count must be positive".into(),
            ));
        }
        if roof.len() != base_size {
            return Err(KoopError::InvalidParameter(format!(
                "roof has {} samples for base size {}",
                roof.len(),
                base_size
            )));
        }
        let min_roof = roof.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(floor > 0.0) || !(min_roof > floor) {
            return Err(KoopError::RoofBelowFloor { min_roof, floor });
        }
        let levels: Vec<usize> = roof
            .iter()
            .map(|f| ((f * level_count as f64).round() as usize).max(1))
            .collect();
        let mut offsets = Vec::with_capacity(base_size);
        let mut total = 0usize;
        for &n_i in &levels {
            offsets.push(total);
            total += n_i;
        }
        Ok(SpecialFlowSpace {
            inner: Arc::new(SpecialFlowData {
                base_size,
                level_count,
                floor,
                roof,
                levels,
                offsets,
                total,
            }),
        })
    }

    pub fn base_size(&self) -> usize {
        self.inner.base_size
    }

    /// Cells per unit of roof height.
    pub fn level_count(&self) -> usize {
        self.inner.level_count
    }

    pub fn floor(&self) -> f64 {
        self.inner.floor
    }

    pub fn cell_count(&self) -> usize {
        self.inner.total
    }

    /// Measure of a single cell.
    pub fn weight(&self) -> f64 {
        1.0 / self.inner.total as f64
    }

    /// Number of cells stacked over base column `i`.
    pub fn levels(&self) -> &[usize] {
        &self.inner.levels
    }

    /// Flat index of the cell in column `col` at level `lvl`.
    pub fn cell_index(&self, col: usize, lvl: usize) -> usize {
        debug_assert!(lvl < self.inner.levels[col]);
        self.inner.offsets[col] + lvl
    }

    /// Inverse of [`cell_index`](Self::cell_index).
    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        // offsets is sorted; partition_point finds the column.
        let col = self.inner.offsets.partition_point(|&o| o <= flat) - 1;
        (col, flat - self.inner.offsets[col])
    }

    /// Total measure consistency check: cell weights sum to one.
    pub fn total_mass(&self) -> f64 {
        self.weight() * self.cell_count() as f64
    }
}

/// A complex function on the cells of a [`SpecialFlowSpace`].
#[derive(Clone, Debug)]
pub struct CellFunction {
    space: SpecialFlowSpace,
    values: Vec<Complex64>,
}

impl CellFunction {
    pub fn new(space: SpecialFlowSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.cell_count() {
            return Err(KoopError::InvalidParameter(format!(
                "expected {} cell values, got {}",
                space.cell_count(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KoopError::NonFiniteSample);
        }
        Ok(CellFunction { space, values })
    }

    pub fn one(space: SpecialFlowSpace) -> Self {
        let values = vec![Complex64::new(1.0, 0.0); space.cell_count()];
        CellFunction { space, values }
    }

    /// Indicator of the horizontal strip `a <= height < b` (over every base
    /// column). Requires `0 < a < b <= floor` so the strip sits below the
    /// roof everywhere.
    pub fn indicator_strip(space: SpecialFlowSpace, a: f64, b: f64) -> Result<Self> {
        if !(0.0 < a && a < b && b <= space.floor()) {
            return Err(KoopError::InvalidParameter(format!(
                "strip [{a}, {b}) must satisfy 0 < a < b <= floor = {}",
                space.floor()
            )));
        }
        let l = space.level_count() as f64;
        let lo = (a * l).round() as usize;
        let hi = (b * l).round() as usize;
        if lo >= hi {
            return Err(KoopError::DegenerateProbe {
                reason: format!("strip [{a}, {b}) is empty at resolution {l}"),
            });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); space.cell_count()];
        for col in 0..space.base_size() {
            let top = space.levels()[col].min(hi);
            for lvl in lo..top {
                values[space.cell_index(col, lvl)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(CellFunction { space, values })
    }

    pub fn space(&self) -> &SpecialFlowSpace {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn check_space(&self, other: &CellFunction) -> Result<()> {
        if self.space != other.space {
            return Err(KoopError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn inner(&self, other: &CellFunction) -> Result<Complex64> {
        self.check_space(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * self.space.weight())
    }

    pub fn norms(&self) -> Norms {
        let w = self.space.weight();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut sup = 0.0f64;
        for z in &self.values {
            let a = z.norm();
            l1 += a;
            l2 += a * a;
            sup = sup.max(a);
        }
        Norms {
            l1: l1 * w,
            l2: (l2 * w).sqrt(),
            sup,
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.norms().l2
    }

    pub fn multiply(&self, other: &CellFunction) -> Result<CellFunction> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(CellFunction {
            space: self.space.clone(),
            values,
        })
    }

    pub fn add(&self, other: &CellFunction) -> Result<CellFunction> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CellFunction {
            space: self.space.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &CellFunction) -> Result<CellFunction> {
        self.check_space(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CellFunction {
            space: self.space.clone(),
            values,
        })
    }

    pub fn scale(&self, z: Complex64) -> CellFunction {
        CellFunction {
            space: self.space.clone(),
            values: self.values.iter().map(|a| a * z).collect(),
        }
    }

    /// Pointwise division; errors when the denominator gets within `1e-12`
    /// of zero.
    pub fn divide(&self, other: &CellFunction) -> Result<CellFunction> {
        self.check_space(other)?;
        let min_abs = other
            .values
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if min_abs < 1e-12 {
            return Err(KoopError::VanishingValue { min_abs });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a / b)
            .collect();
        Ok(CellFunction {
            space: self.space.clone(),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // ---- circle space construction ----

    #[test]
    fn rejects_tiny_grids_and_fat_bands() {
        assert!(matches!(
            CircleSpace::new(4, 1),
            Err(KoopError::GridTooSmall { n: 4 })
        ));
        assert!(matches!(
            CircleSpace::new(8, 4),
            Err(KoopError::BandExceedsNyquist { k: 4, n: 8 })
        ));
        let space = CircleSpace::new(16, 4).unwrap();
        assert_eq!(space.len(), 16);
        assert_eq!(space.band_limit(), 4);
        assert!((space.weight() - 1.0 / 16.0).abs() < 1e-16);
    }

    // ---- inner products and norms ----

    #[test]
    fn inner_product_of_characters() {
        // (2 e_1 + 3 e_2, e_2) = 3: characters are orthonormal.
        let space = CircleSpace::new(16, 4).unwrap();
        let f = CircleFunction::from_modes(space, &[(1, c(2.0, 0.0)), (2, c(3.0, 0.0))]).unwrap();
        let g = CircleFunction::character(space, 2).unwrap();
        let ip = f.inner(&g).unwrap();
        assert!((ip - c(3.0, 0.0)).norm() < 1e-12, "got {ip}");
        // conjugate symmetry
        let back = g.inner(&f).unwrap();
        assert!((back - ip.conj()).norm() < 1e-12);
    }

    #[test]
    fn norms_of_simple_combination() {
        // f = 2 e_1 + 1: sup attained at x = 0 with value 3, L2 = sqrt(5).
        let space = CircleSpace::new(64, 16).unwrap();
        let f = CircleFunction::from_modes(space, &[(1, c(2.0, 0.0)), (0, c(1.0, 0.0))]).unwrap();
        let norms = f.norms();
        assert!((norms.sup - 3.0).abs() < 1e-12);
        assert!((norms.l2 - 5.0f64.sqrt()).abs() < 1e-12);
        assert!(norms.l1 <= norms.l2 + 1e-12 && norms.l2 <= norms.sup + 1e-12);
    }

    // ---- multiplication and band hints ----

    #[test]
    fn product_of_opposite_characters() {
        // (1 + e_1)(1 + e_{-1}) = 2 + e_1 + e_{-1}
        let space = CircleSpace::new(16, 4).unwrap();
        let one = CircleFunction::one(space);
        let f = one.add(&CircleFunction::character(space, 1).unwrap()).unwrap();
        let g = one.add(&CircleFunction::character(space, -1).unwrap()).unwrap();
        let prod = f.multiply(&g).unwrap();
        let expect = CircleFunction::from_modes(
            space,
            &[(0, c(2.0, 0.0)), (1, c(1.0, 0.0)), (-1, c(1.0, 0.0))],
        )
        .unwrap();
        assert!(prod.sub(&expect).unwrap().norm_sup() < 1e-12);
        assert_eq!(prod.hint(), BandHint::Limited(2));
    }

    #[test]
    fn band_overflow_marks_aliased() {
        let space = CircleSpace::new(16, 7).unwrap();
        let f = CircleFunction::character(space, 7).unwrap();
        let prod = f.multiply(&f).unwrap();
        assert_eq!(prod.hint(), BandHint::Aliased, "7 + 7 > (16-1)/2");
    }

    #[test]
    fn space_mismatch_is_rejected() {
        let a = CircleSpace::new(16, 4).unwrap();
        let b = CircleSpace::new(32, 4).unwrap();
        let fa = CircleFunction::one(a);
        let fb = CircleFunction::one(b);
        assert!(matches!(fa.multiply(&fb), Err(KoopError::SpaceMismatch)));
    }

    // ---- seeded randomness ----

    #[test]
    fn random_bandlimited_is_deterministic_and_zero_at_zero_modes() {
        let space = CircleSpace::new(64, 16).unwrap();
        let f = CircleFunction::random_bandlimited(space, 1, 5, false, false).unwrap();
        let g = CircleFunction::random_bandlimited(space, 1, 5, false, false).unwrap();
        assert_eq!(f.samples().len(), g.samples().len());
        for (a, b) in f.samples().iter().zip(g.samples()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // max_mode = 0 with mean_zero leaves only the cleared zero mode
        let z = CircleFunction::random_bandlimited(space, 1, 0, false, true).unwrap();
        assert_eq!(z.norm_sup(), 0.0);
    }

    #[test]
    fn random_real_valued_has_tiny_imaginary_part() {
        let space = CircleSpace::new(64, 16).unwrap();
        let f = CircleFunction::random_bandlimited(space, 42, 10, true, true).unwrap();
        assert!(f.max_imag() <= 1e-12, "imag {}", f.max_imag());
        assert!((f.mean()).norm() <= 1e-14);
    }

    // ---- rotation primitive ----

    #[test]
    fn commensurate_rotation_is_permutation() {
        let space = CircleSpace::new(16, 4).unwrap();
        let f = CircleFunction::random_bandlimited(space, 3, 4, false, false).unwrap();
        let t = space.commensurate_time(5);
        let rotated = f.rotated(t);
        for j in 0..16 {
            let expect = f.samples()[(j + 5) % 16];
            assert_eq!(rotated.samples()[j].re.to_bits(), expect.re.to_bits());
        }
    }

    #[test]
    fn spectral_rotation_matches_character_phases() {
        let space = CircleSpace::new(16, 4).unwrap();
        let f = CircleFunction::character(space, 3).unwrap();
        let t = 0.37;
        let rotated = f.rotated(t);
        let expect = f.scale(Complex64::from_polar(1.0, 3.0 * t));
        assert!(rotated.sub(&expect).unwrap().norm_sup() < 1e-12);
    }

    // ---- serialization ----

    #[test]
    fn json_round_trip_is_bit_exact() {
        let space = CircleSpace::new(16, 4).unwrap();
        let f = CircleFunction::random_bandlimited(space, 9, 4, false, false).unwrap();
        let text = f.to_json().unwrap();
        assert!(text.starts_with("{\"space\":{\"N\":16,\"K\":4},\"samples\":[["));
        let back = CircleFunction::from_json(&text).unwrap();
        for (a, b) in f.samples().iter().zip(back.samples()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    // ---- finite spaces ----

    #[test]
    fn finite_space_validates_weights() {
        assert!(FiniteSpace::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteSpace::new(vec![0.5, -0.5, 1.0]).is_err());
        let sp = FiniteSpace::uniform(4).unwrap();
        let f = FiniteFunction::new(sp.clone(), vec![c(1.0, 0.0); 4]).unwrap();
        assert!((f.norms().l2 - 1.0).abs() < 1e-14);
        assert!((f.inner(&f).unwrap().re - 1.0).abs() < 1e-14);
    }

    // ---- suspension spaces ----

    #[test]
    fn constant_roof_layout() {
        let space = SpecialFlowSpace::constant_roof(8, 1.0, 10, 0.95).unwrap();
        assert_eq!(space.cell_count(), 80);
        assert_eq!(space.levels(), &[10; 8]);
        assert!((space.total_mass() - 1.0).abs() < 1e-10);
        let (col, lvl) = space.split_index(space.cell_index(3, 7));
        assert_eq!((col, lvl), (3, 7));
    }

    #[test]
    fn roof_below_floor_is_rejected() {
        assert!(matches!(
            SpecialFlowSpace::constant_roof(8, 0.9, 10, 0.95),
            Err(KoopError::RoofBelowFloor { .. })
        ));
    }

    #[test]
    fn strip_indicator_measure() {
        let space = SpecialFlowSpace::constant_roof(8, 1.0, 100, 0.99).unwrap();
        let h = CellFunction::indicator_strip(space, 0.3, 0.5).unwrap();
        // measure = L2 norm squared for an indicator
        let mass = h.inner(&h).unwrap().re;
        assert!((mass - 0.2).abs() < 1e-12, "strip mass {mass}");
    }

    #[test]
    fn varying_roof_cells_follow_rounding() {
        let space = SpecialFlowSpace::with_roof(4, vec![1.0, 1.25, 1.5, 2.0], 4, 0.9).unwrap();
        assert_eq!(space.levels(), &[4, 5, 6, 8]);
        assert_eq!(space.cell_count(), 23);
    }
}
