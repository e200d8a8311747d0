//! Checkable verdicts: residuals for algebraic identities, growth and
//! power-law fits, norm identities, and the bounded-versus-unbounded weight
//! study.
//!
//! Every check reduces to a nonnegative residual compared against an explicit
//! threshold, packaged as a [`Verdict`] whose `pass` field is forced to agree
//! with `residual <= threshold`. Checks that multiply grid functions insist
//! on certified band limits so that a failed identity can never be blamed on
//! spectral aliasing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cocycles::Cocycle;
use crate::error::{KoopError, Result};
use crate::flows::RotationFlow;
use crate::groups::{estimate_generator, operator_matrix, DiffMethod, Group};
use crate::space::{CircleFunction, CircleSpace};
use crate::spectral;

// ---------------------------------------------------------------------------
// verdicts
// ---------------------------------------------------------------------------

/// One named check: a residual, the threshold it was held to, and arbitrary
/// JSON context. `pass` always equals `residual <= threshold` (non-finite
/// residuals fail).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub threshold: f64,
    pub context: Value,
}

impl Verdict {
    /// Builds a verdict; the pass flag is derived, never supplied.
    pub fn check(name: impl Into<String>, residual: f64, threshold: f64, context: Value) -> Self {
        Verdict {
            name: name.into(),
            pass: residual.is_finite() && residual <= threshold,
            residual,
            threshold,
            context,
        }
    }

    /// Serializes as a single JSON line (fields in declaration order).
    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

fn require_product_band(f: &CircleFunction, g: &CircleFunction) -> Result<()> {
    let space = f.space();
    let cap = space.alias_free_cap();
    match (f.hint().limit(), g.hint().limit()) {
        (Some(a), Some(b)) if a + b <= cap => Ok(()),
        (Some(a), Some(b)) => Err(KoopError::AliasedProduct {
            sum: a + b,
            cap,
            n: space.len(),
        }),
        _ => Err(KoopError::AliasedProduct {
            sum: cap + 1,
            cap,
            n: space.len(),
        }),
    }
}

// ---------------------------------------------------------------------------
// derivation residuals
// ---------------------------------------------------------------------------

/// L2 residual of the Leibniz rule `A(fg) = (Af) g + f (Ag)` for a candidate
/// generator action `a`. Both probes must carry certified band limits whose
/// sum stays below the alias-free cap.
pub fn derivation_residual<F>(a: F, f: &CircleFunction, g: &CircleFunction) -> Result<f64>
where
    F: Fn(&CircleFunction) -> Result<CircleFunction>,
{
    require_product_band(f, g)?;
    let fg = f.multiply(g)?;
    let lhs = a(&fg)?;
    let rhs = a(f)?.multiply(g)?.add(&f.multiply(&a(g)?)?)?;
    Ok(lhs.sub(&rhs)?.norm_l2())
}

/// L2 residual of the perturbed Leibniz rule
/// `A(fg) = (Af) g + f (Ag) - (A1) fg`, the identity that characterizes
/// generators of weighted groups.
pub fn perturbed_derivation_residual<F>(
    a: F,
    f: &CircleFunction,
    g: &CircleFunction,
) -> Result<f64>
where
    F: Fn(&CircleFunction) -> Result<CircleFunction>,
{
    require_product_band(f, g)?;
    let one = CircleFunction::one(f.space());
    let a_one = a(&one)?;
    let fg = f.multiply(g)?;
    let correction = a_one.multiply(&fg)?;
    let rhs = a(f)?
        .multiply(g)?
        .add(&f.multiply(&a(g)?)?)?
        .sub(&correction)?;
    Ok(a(&fg)?.sub(&rhs)?.norm_l2())
}

/// Randomized Leibniz probe over seeded band-limited pairs; reports the
/// worst residual and whether every pair stayed within tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct DerivationProbe {
    pub pairs: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub is_derivation: bool,
}

/// Probes whether the exact generator of `group` is a derivation by drawing
/// `pairs` seeded random band-limited pairs.
pub fn derivation_probe(
    group: &Group,
    seed: u64,
    pairs: usize,
    tolerance: f64,
) -> Result<DerivationProbe> {
    let space = group.space();
    let max_mode = space.band_limit().min(space.alias_free_cap() / 2);
    let mut max_residual: f64 = 0.0;
    for i in 0..pairs {
        let f = CircleFunction::random_bandlimited(
            space,
            seed.wrapping_add(2 * i as u64),
            max_mode,
            false,
            false,
        )?;
        let g = CircleFunction::random_bandlimited(
            space,
            seed.wrapping_add(2 * i as u64 + 1),
            max_mode,
            false,
            false,
        )?;
        let r = derivation_residual(|p| group.generator_exact(p), &f, &g)?;
        max_residual = max_residual.max(r);
    }
    Ok(DerivationProbe {
        pairs,
        max_residual,
        tolerance,
        is_derivation: max_residual <= tolerance,
    })
}

/// L2 residual of multiplicativity `U_t(fg) = (U_t f)(U_t g)`; holds for
/// composition operators, fails for anything else.
pub fn multiplicativity_residual(
    group: &Group,
    t: f64,
    f: &CircleFunction,
    g: &CircleFunction,
) -> Result<f64> {
    require_product_band(f, g)?;
    let lhs = group.apply(t, &f.multiply(g)?)?;
    let rhs = group.apply(t, f)?.multiply(&group.apply(t, g)?)?;
    Ok(lhs.sub(&rhs)?.norm_l2())
}

/// Residual of the weighted-generator relation `A f - f (A 1) = f'` using
/// the exact generator.
pub fn generator_relation_residual(group: &Group, f: &CircleFunction) -> Result<f64> {
    let one = CircleFunction::one(group.space());
    let a_one = group.generator_exact(&one)?;
    let lhs = group.generator_exact(f)?.sub(&f.multiply(&a_one)?)?;
    Ok(lhs.sub(&f.derivative())?.norm_l2())
}

/// Residual of the weighted-generator relation with a finite-difference
/// estimate of the generator in place of the exact one.
pub fn estimated_relation_residual(
    group: &Group,
    f: &CircleFunction,
    h: f64,
    method: DiffMethod,
) -> Result<f64> {
    let one = CircleFunction::one(group.space());
    let a_f = estimate_generator(group, f, h, method)?.value;
    let a_one = estimate_generator(group, &one, h, method)?.value;
    let lhs = a_f.sub(&f.multiply(&a_one)?)?;
    Ok(lhs.sub(&f.derivative())?.norm_l2())
}

// ---------------------------------------------------------------------------
// weights and norms
// ---------------------------------------------------------------------------

/// Minimum modulus of the orbit weight `U_t 1` over a set of times, with the
/// minimizing point and the fraction of grid points falling below `delta`
/// at the worst time.
#[derive(Clone, Debug, Serialize)]
pub struct NonsingularReport {
    pub min_weight_abs: f64,
    pub delta: f64,
    pub worst_time: f64,
    pub worst_point: f64,
    pub vanishing_fraction: f64,
    pub nonsingular: bool,
}

/// Default modulus floor for [`nonsingular_weight_check`].
pub const NONSINGULAR_DELTA: f64 = 1e-8;

/// Checks that the weight `U_t 1` stays bounded away from zero (modulus at
/// least `delta`) at every listed time.
pub fn nonsingular_weight_check(group: &Group, times: &[f64], delta: f64) -> Result<NonsingularReport> {
    let space = group.space();
    let mut min_abs = f64::INFINITY;
    let mut worst_time = 0.0;
    let mut worst_point = 0.0;
    let mut vanishing_fraction = 0.0;
    for &t in times {
        let w = group.weight(t)?;
        let (argmin, m) = w
            .samples()
            .iter()
            .map(|z| z.norm())
            .enumerate()
            .fold((0usize, f64::INFINITY), |(bi, bm), (i, v)| {
                if v < bm {
                    (i, v)
                } else {
                    (bi, bm)
                }
            });
        if m < min_abs {
            min_abs = m;
            worst_time = t;
            worst_point = space.point(argmin);
            let below = w.samples().iter().filter(|z| z.norm() < delta).count();
            vanishing_fraction = below as f64 / w.samples().len() as f64;
        }
    }
    Ok(NonsingularReport {
        min_weight_abs: min_abs,
        delta,
        worst_time,
        worst_point,
        vanishing_fraction,
        nonsingular: min_abs >= delta,
    })
}

/// Sup-norm residual of `| U_t 1 | = 1`, the unimodularity that marks a
/// unitary weighted group.
pub fn unitary_modulus_residual(group: &Group, t: f64) -> Result<f64> {
    let w = group.weight(t)?;
    Ok(w.samples()
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Both sides of the weight-versus-norm bound
/// `|| |psi_t|^2 * (transported density) ||_inf <= ||U_t||_{2->2}^2`:
/// the left side from the weight and density, the right side from a dense
/// SVD. For multiplication-type weights over a measure-preserving flow the
/// bound is an equality, which `equality_residual` measures.
#[derive(Clone, Debug, Serialize)]
pub struct NormBoundCheck {
    pub weight_sup: f64,
    pub density_max: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive part of `lhs - rhs (1 + 1e-8)`; zero when the bound holds.
    pub bound_excess: f64,
    /// `|lhs - rhs|`, small when the bound is saturated.
    pub equality_residual: f64,
}

/// Evaluates the norm bound for a group carrying a point flow.
pub fn weighted_norm_bound(group: &Group, t: f64) -> Result<NormBoundCheck> {
    let flow = group.rotation_flow().ok_or_else(|| {
        KoopError::InvalidParameter("norm bound needs a group with a point flow".into())
    })?;
    let weight_sup = group.weight(t)?.norm_sup();
    let density_max = flow
        .pushforward_density(t)
        .values()
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    let lhs = weight_sup * weight_sup * density_max;
    let rhs_norm = operator_matrix(group, t)?.two_norm();
    let rhs = rhs_norm * rhs_norm;
    Ok(NormBoundCheck {
        weight_sup,
        density_max,
        lhs,
        rhs,
        bound_excess: (lhs - rhs * (1.0 + 1e-8)).max(0.0),
        equality_residual: (lhs - rhs).abs(),
    })
}

// ---------------------------------------------------------------------------
// growth and power-law fits
// ---------------------------------------------------------------------------

/// An exponential envelope `n_t <= M e^{omega |t|}` fitted to norm samples.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub m_bound: f64,
    pub omega: f64,
    /// ln-scale RMS deviation about the least-squares line.
    pub fit_rms: f64,
    pub samples: Vec<(f64, f64)>,
}

impl GrowthFit {
    /// Least-squares fit of `ln n_t` against `|t|` with the rate clamped to
    /// be nonnegative, then the prefactor raised until every sample sits
    /// under the envelope.
    pub fn fit(samples: &[(f64, f64)]) -> Result<GrowthFit> {
        if samples.len() < 2 {
            return Err(KoopError::InvalidParameter(
                "growth fit needs at least two samples".into(),
            ));
        }
        if samples.iter().any(|&(_, n)| !(n > 0.0) || !n.is_finite()) {
            return Err(KoopError::InvalidParameter(
                "growth fit needs positive finite norms".into(),
            ));
        }
        let xs: Vec<f64> = samples.iter().map(|&(t, _)| t.abs()).collect();
        let ys: Vec<f64> = samples.iter().map(|&(_, n)| n.ln()).collect();
        let m = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() < 1e-14 {
            return Err(KoopError::InvalidParameter(
                "growth fit needs at least two distinct |t|".into(),
            ));
        }
        let slope = (m * sxy - sx * sy) / denom;
        let omega = slope.max(0.0);
        let intercept = (sy - slope * sx) / m;
        let fit_rms = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let d = y - (intercept + slope * x);
                d * d
            })
            .sum::<f64>()
            / m)
            .sqrt();
        let mut m_bound = intercept.exp();
        for (&x, &(_, n)) in xs.iter().zip(samples) {
            m_bound = m_bound.max(n * (-omega * x).exp());
        }
        Ok(GrowthFit {
            m_bound,
            omega,
            fit_rms,
            samples: samples.to_vec(),
        })
    }

    /// Whether every sample satisfies `n_t <= M e^{omega |t|}` (up to a
    /// relative rounding allowance).
    pub fn certifies(&self) -> bool {
        self.samples
            .iter()
            .all(|&(t, n)| n <= self.m_bound * (self.omega * t.abs()).exp() * (1.0 + 1e-12))
    }
}

/// Samples the dense sup-to-sup operator norm of `U_t` over `times` and
/// fits an exponential growth envelope; commensurate times keep the dense
/// matrices exact.
pub fn linf_growth_fit(group: &Group, times: &[f64]) -> Result<GrowthFit> {
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let norm = operator_matrix(group, t)?.sup_norm();
        samples.push((t, norm));
    }
    GrowthFit::fit(&samples)
}

/// A power law `y = C x^alpha` fitted in log-log coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub constant: f64,
    pub fit_rms: f64,
}

/// Least-squares power-law fit of positive pairs `(x, y)`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 2 {
        return Err(KoopError::InvalidParameter(
            "power-law fit needs at least two pairs".into(),
        ));
    }
    if pairs
        .iter()
        .any(|&(x, y)| !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite())
    {
        return Err(KoopError::InvalidParameter(
            "power-law fit needs strictly positive finite pairs".into(),
        ));
    }
    let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(_, y)| y.ln()).collect();
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(KoopError::InvalidParameter(
            "power-law fit needs at least two distinct abscissae".into(),
        ));
    }
    let exponent = (m * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / m;
    let fit_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let d = y - (intercept + exponent * x);
            d * d
        })
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(PowerLawFit {
        exponent,
        constant: intercept.exp(),
        fit_rms,
    })
}

/// Orbit continuity samples `(|t|, ||U_t f - f||_2)` for power-law fitting.
pub fn orbit_continuity(
    group: &Group,
    f: &CircleFunction,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let moved = group.apply(t, f)?;
        out.push((t.abs(), moved.sub(f)?.norm_l2()));
    }
    Ok(out)
}

/// Fits the scaling exponent of modulus-of-continuity data
/// `(|t|, ||g - g ∘ T_t||_2)`. An exponent near one half certifies the
/// square-root mechanism that keeps indicators outside the generator's
/// domain; an exponent near one certifies differentiable scaling. Errors
/// with a degenerate-probe report when every norm is numerically zero
/// (flow-invariant probe).
pub fn holder_scaling_probe(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.iter().all(|&(_, y)| y < 1e-14) {
        return Err(KoopError::DegenerateProbe {
            reason: "every modulus sample is numerically zero (invariant probe)".into(),
        });
    }
    fit_power_law(pairs)
}

// ---------------------------------------------------------------------------
// averaging
// ---------------------------------------------------------------------------

/// The sliding average `(1/t) ∫_0^t f ∘ T_s ds` of the rotation, in closed
/// form mode by mode: mode `k != 0` picks up `(e^{ikt} - 1)/(ikt)`, the
/// (enforced-zero) mean is left untouched. Only mean-zero inputs are
/// accepted; the operator is then an L2 contraction.
pub fn sliding_average(flow: RotationFlow, f: &CircleFunction, t: f64) -> Result<CircleFunction> {
    if f.space() != flow.space() {
        return Err(KoopError::SpaceMismatch);
    }
    if t == 0.0 || !t.is_finite() {
        return Err(KoopError::InvalidParameter(format!(
            "sliding average needs a nonzero finite time, got {t}"
        )));
    }
    if f.mean().norm() > 1e-12 {
        return Err(KoopError::InvalidParameter(format!(
            "sliding average expects a mean-zero input, mean modulus {}",
            f.mean().norm()
        )));
    }
    let n = f.space().len();
    let mut bins = f.spectrum();
    for (bin, c) in bins.iter_mut().enumerate() {
        let k = spectral::mode_of_bin(bin, n);
        if k != 0 {
            let ikt = Complex64::new(0.0, k as f64 * t);
            *c *= (ikt.exp() - Complex64::new(1.0, 0.0)) / ikt;
        }
    }
    CircleFunction::from_samples(f.space(), spectral::inverse(&bins), f.hint())
}

/// The averaging bound `||S_t f||_2 <= 2 pi ||f||_2` together with the
/// observed (much sharper, at most one) contraction ratio.
#[derive(Clone, Debug, Serialize)]
pub struct AveragingBound {
    pub input_norm: f64,
    pub output_norm: f64,
    pub observed_ratio: f64,
    pub stated_constant: f64,
    pub within_stated_bound: bool,
}

/// Certifies the stated averaging bound for a mean-zero probe.
pub fn averaging_bound(flow: RotationFlow, f: &CircleFunction, t: f64) -> Result<AveragingBound> {
    let input_norm = f.norm_l2();
    if input_norm < 1e-14 {
        return Err(KoopError::DegenerateProbe {
            reason: "averaging bound needs a nonzero probe".into(),
        });
    }
    let output_norm = sliding_average(flow, f, t)?.norm_l2();
    let observed_ratio = output_norm / input_norm;
    let stated_constant = 2.0 * std::f64::consts::PI;
    Ok(AveragingBound {
        input_norm,
        output_norm,
        observed_ratio,
        stated_constant,
        within_stated_bound: observed_ratio <= stated_constant,
    })
}

// ---------------------------------------------------------------------------
// bounded L2 weights with unbounded sup norms
// ---------------------------------------------------------------------------

/// One band in the unbounded-weight study.
#[derive(Clone, Debug, Serialize)]
pub struct UnboundedWeightRow {
    pub band: usize,
    /// Sup norm of the weight derivative, which diverges with the band.
    pub sup_norm: f64,
    /// L2 norm of the weight derivative, which stays bounded.
    pub l2_norm: f64,
    /// Pairs `(t, r)` with `r = || (psi_t - 1)/t - zeta ||_2`, the
    /// first-order remainder of the weight orbit.
    pub remainders: Vec<(f64, f64)>,
}

/// Outcome of the study: truncations of a weight derivative with slowly
/// decaying modes keep the first-order remainder `r(t) <= C t` with one
/// constant across every band, even though the sup norms of the
/// truncations blow up.
#[derive(Clone, Debug, Serialize)]
pub struct UnboundedWeightStudy {
    pub rows: Vec<UnboundedWeightRow>,
    /// Ratio of the last sup norm to the first.
    pub sup_growth: f64,
    /// Largest `r / t` over all bands and times.
    pub max_ratio: f64,
}

/// Grid used by [`unbounded_weight_study`]; wide enough to hold a band of
/// 256 modes alias-free in the exponent.
pub fn unbounded_weight_space() -> CircleSpace {
    CircleSpace::new(1024, 400).expect("study grid is valid")
}

/// Runs the truncation study for the derivative with modes `|k|^{-0.7}`.
pub fn unbounded_weight_study(bands: &[usize], times: &[f64]) -> Result<UnboundedWeightStudy> {
    let space = unbounded_weight_space();
    let flow = RotationFlow::new(space);
    let mut rows = Vec::with_capacity(bands.len());
    let mut max_ratio: f64 = 0.0;
    for &band in bands {
        if band == 0 || band > space.band_limit() {
            return Err(KoopError::InvalidParameter(format!(
                "band {band} outside the study grid"
            )));
        }
        let mut modes = Vec::with_capacity(2 * band);
        for k in 1..=band as i64 {
            let c = Complex64::new((k as f64).powf(-0.7), 0.0);
            modes.push((k, c));
            modes.push((-k, c));
        }
        let zeta = CircleFunction::from_modes(space, &modes)?;
        let sup_norm = zeta.norm_sup();
        let l2_norm = zeta.norm_l2();
        let cocycle = Cocycle::from_derivative(flow, zeta)?;
        let mut remainders = Vec::with_capacity(times.len());
        for &t in times {
            let r = cocycle.derivative_residual(t)?;
            remainders.push((t, r));
            max_ratio = max_ratio.max(r / t.abs());
        }
        rows.push(UnboundedWeightRow {
            band,
            sup_norm,
            l2_norm,
            remainders,
        });
    }
    let sup_growth = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if a.sup_norm > 0.0 => b.sup_norm / a.sup_norm,
        _ => 1.0,
    };
    Ok(UnboundedWeightStudy {
        rows,
        sup_growth,
        max_ratio,
    })
}
