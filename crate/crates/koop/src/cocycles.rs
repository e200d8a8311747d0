//! Multiplicative cocycles over flows: families `psi_t` satisfying
//! `psi_{t+s} = psi_t * (psi_s ∘ T_t)`, used as weights for non-singular
//! Koopman-type groups.
//!
//! Over the circle rotation a cocycle can be given three ways:
//!
//! * by its derivative `zeta` at `t = 0`, in which case
//!   `psi_t = exp( integral_0^t zeta ∘ T_r dr )`. For band-limited `zeta`
//!   the integral has a closed form mode by mode, so `psi_t` (and — this is
//!   the point — any composition `psi_t ∘ T_s`) is evaluated by shifting
//!   the band-limited *exponent* spectrally and exponentiating pointwise.
//!   Shifting sampled exponentials through the discrete Fourier transform
//!   would alias; shifting the exponent does not.
//! * as the coboundary `psi_t = (theta ∘ T_t) / theta` of a nonvanishing
//!   transfer function `theta`;
//! * by an explicit rule `t -> psi_t` (no structure assumed; compositions
//!   then fall back to trigonometric interpolation).
//!
//! An independent quadrature route (composite Gauss-Legendre in time)
//! evaluates the same exponential integral without the closed form, which
//! gives the uniqueness cross-check a genuinely different code path.
//!
//! [`CellCoboundary`] carries the same coboundary calculus on suspension
//! spaces, where transport is an exact cell permutation.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{KoopError, Result};
use crate::flows::{RotationFlow, SpecialFlow};
use crate::space::{BandHint, CellFunction, CircleFunction, CircleSpace};
use crate::spectral;

// ---------------------------------------------------------------------------
// circle cocycles
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum Form {
    /// Closed-form exponential of the integral of a band-limited derivative.
    Derivative { zeta: CircleFunction },
    /// Same cocycle, evaluated by composite Gauss-Legendre quadrature.
    Quadrature { zeta: CircleFunction },
    /// `psi_t = (theta ∘ T_t) / theta`.
    Coboundary { theta: CircleFunction },
    /// Arbitrary rule `t -> psi_t`.
    Explicit {
        rule: Arc<dyn Fn(f64) -> CircleFunction + Send + Sync>,
    },
}

/// A multiplicative cocycle over a circle rotation.
#[derive(Clone)]
pub struct Cocycle {
    flow: RotationFlow,
    form: Form,
}

impl std::fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.form {
            Form::Derivative { .. } => "derivative",
            Form::Quadrature { .. } => "quadrature",
            Form::Coboundary { .. } => "coboundary",
            Form::Explicit { .. } => "explicit",
        };
        write!(f, "Cocycle({kind} over N={})", self.flow.space().len())
    }
}

impl Cocycle {
    /// Cocycle generated by a certified band-limited derivative `zeta`.
    pub fn from_derivative(flow: RotationFlow, zeta: CircleFunction) -> Result<Self> {
        Cocycle::check_derivative(&flow, &zeta)?;
        Ok(Cocycle {
            flow,
            form: Form::Derivative { zeta },
        })
    }

    /// Same data, evaluated through time quadrature instead of the closed
    /// form (independent route for cross-checks).
    pub fn from_derivative_quadrature(flow: RotationFlow, zeta: CircleFunction) -> Result<Self> {
        Cocycle::check_derivative(&flow, &zeta)?;
        Ok(Cocycle {
            flow,
            form: Form::Quadrature { zeta },
        })
    }

    fn check_derivative(flow: &RotationFlow, zeta: &CircleFunction) -> Result<()> {
        if zeta.space() != flow.space() {
            return Err(KoopError::SpaceMismatch);
        }
        if zeta.hint().limit().is_none() {
            return Err(KoopError::InvalidParameter(
                "weight derivative must be certified band-limited".into(),
            ));
        }
        Ok(())
    }

    /// Coboundary of a nonvanishing transfer function.
    pub fn coboundary(flow: RotationFlow, theta: CircleFunction) -> Result<Self> {
        if theta.space() != flow.space() {
            return Err(KoopError::SpaceMismatch);
        }
        let min_abs = theta
            .samples()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if min_abs < 1e-9 {
            return Err(KoopError::VanishingValue { min_abs });
        }
        Ok(Cocycle {
            flow,
            form: Form::Coboundary { theta },
        })
    }

    /// Cocycle given by an explicit rule. No structure is assumed, so
    /// compositions use trigonometric interpolation of the values.
    pub fn explicit(
        flow: RotationFlow,
        rule: impl Fn(f64) -> CircleFunction + Send + Sync + 'static,
    ) -> Self {
        Cocycle {
            flow,
            form: Form::Explicit {
                rule: Arc::new(rule),
            },
        }
    }

    pub fn flow(&self) -> RotationFlow {
        self.flow
    }

    pub fn space(&self) -> CircleSpace {
        self.flow.space()
    }

    /// The weight `psi_t`.
    pub fn psi(&self, t: f64) -> CircleFunction {
        self.psi_composed(t, 0.0)
    }

    /// The composed weight `psi_t ∘ T_shift`, evaluated without aliasing
    /// wherever the form allows it.
    pub fn psi_composed(&self, t: f64, shift: f64) -> CircleFunction {
        match &self.form {
            Form::Derivative { zeta } => {
                let exponent = closed_form_exponent(zeta, t, shift);
                exponent.exp()
            }
            Form::Quadrature { zeta } => {
                let exponent = quadrature_exponent(zeta, t, shift);
                exponent.exp()
            }
            Form::Coboundary { theta } => {
                let num = theta.rotated(t + shift);
                let den = theta.rotated(shift);
                num.divide(&den).expect("theta certified nonvanishing")
            }
            Form::Explicit { rule } => {
                let psi = rule(t);
                if shift == 0.0 {
                    psi
                } else {
                    psi.rotated(shift)
                }
            }
        }
    }

    /// The derivative of `t -> psi_t` at zero, when the form knows it:
    /// `zeta` itself, or `theta' / theta` for coboundaries.
    pub fn weight_derivative(&self) -> Result<CircleFunction> {
        match &self.form {
            Form::Derivative { zeta } | Form::Quadrature { zeta } => Ok(zeta.clone()),
            Form::Coboundary { theta } => theta.derivative().divide(theta),
            Form::Explicit { .. } => Err(KoopError::ExactGeneratorUnavailable {
                reason: "explicit cocycle rule carries no derivative data".into(),
            }),
        }
    }

    /// `|| psi_{t+s} - psi_t * (psi_s ∘ T_t) ||_2`.
    pub fn identity_residual(&self, t: f64, s: f64) -> f64 {
        let lhs = self.psi(t + s);
        let rhs = self
            .psi(t)
            .multiply(&self.psi_composed(s, t))
            .expect("same space");
        lhs.sub(&rhs).expect("same space").norm_l2()
    }

    /// `|| 1/psi_t - psi_{-t} ∘ T_t ||_2`; errors if `psi_t` is anywhere
    /// within `1e-12` of zero.
    pub fn inverse_residual(&self, t: f64) -> Result<f64> {
        let psi_t = self.psi(t);
        let reciprocal = CircleFunction::one(self.space()).divide(&psi_t)?;
        let other = self.psi_composed(-t, t);
        Ok(reciprocal.sub(&other)?.norm_l2())
    }

    /// `sup_x | |psi_t(x)| - 1 |`; zero exactly for unitary weights.
    pub fn unimodular_residual(&self, t: f64) -> f64 {
        self.psi(t)
            .samples()
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `|| (psi_t - 1)/t - zeta ||_2`, the defect of the difference
    /// quotient at the known derivative.
    pub fn derivative_residual(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(KoopError::DegenerateProbe {
                reason: "derivative residual needs t != 0".into(),
            });
        }
        let zeta = self.weight_derivative()?;
        let one = CircleFunction::one(self.space());
        let quotient = self.psi(t).sub(&one)?.scale(Complex64::new(1.0 / t, 0.0));
        Ok(quotient.sub(&zeta)?.norm_l2())
    }

    /// Table of `(t, || psi_t - 1 ||_2)`: the strong-continuity decay.
    pub fn c0_decay(&self, times: &[f64]) -> Vec<(f64, f64)> {
        let one = CircleFunction::one(self.space());
        times
            .iter()
            .map(|&t| (t, self.psi(t).sub(&one).expect("same space").norm_l2()))
            .collect()
    }
}

/// Exponent of the closed-form cocycle composed with `T_shift`: mode `k`
/// of the band-limited derivative contributes
/// `zeta_k * (e^{ikt} - 1)/(ik) * e^{ik*shift}` (and `zeta_0 * t` at `k=0`).
fn closed_form_exponent(zeta: &CircleFunction, t: f64, shift: f64) -> CircleFunction {
    let n = zeta.space().len();
    let bins = zeta.spectrum();
    let mut exponent = vec![Complex64::new(0.0, 0.0); n];
    for (bin, &c) in bins.iter().enumerate() {
        let k = spectral::mode_of_bin(bin, n);
        exponent[bin] = if k == 0 {
            c * t
        } else {
            let ik = Complex64::new(0.0, k as f64);
            let phase = Complex64::from_polar(1.0, k as f64 * shift);
            c * (Complex64::from_polar(1.0, k as f64 * t) - 1.0) / ik * phase
        };
    }
    let samples = spectral::inverse(&exponent);
    CircleFunction::from_samples(zeta.space(), samples, BandHint::Unknown)
        .expect("exponent stays finite")
}

/// Same exponent through composite Gauss-Legendre quadrature in time:
/// panels of unit length, nodes doubled from 32 until the exponent moves
/// by less than `1e-9` (capped at 1024 nodes per panel).
fn quadrature_exponent(zeta: &CircleFunction, t: f64, shift: f64) -> CircleFunction {
    let mut nodes = 32usize;
    let mut current = quadrature_pass(zeta, t, shift, nodes);
    while nodes < 1024 {
        let refined = quadrature_pass(zeta, t, shift, nodes * 2);
        let diff = refined
            .sub(&current)
            .expect("same space")
            .norm_l2();
        current = refined;
        nodes *= 2;
        if diff < 1e-9 {
            break;
        }
    }
    current
}

fn quadrature_pass(zeta: &CircleFunction, t: f64, shift: f64, nodes: usize) -> CircleFunction {
    let n = zeta.space().len();
    let mut acc_bins = vec![Complex64::new(0.0, 0.0); n];
    if t != 0.0 {
        let bins = zeta.spectrum();
        let panels = t.abs().ceil().max(1.0) as usize;
        let (gl_nodes, gl_weights) = gauss_legendre(nodes);
        let width = t / panels as f64;
        for panel in 0..panels {
            let left = panel as f64 * width;
            for (&x, &w) in gl_nodes.iter().zip(&gl_weights) {
                // map [-1, 1] to [left, left + width]
                let s = left + 0.5 * width * (x + 1.0);
                let scale = 0.5 * width * w;
                for (bin, &c) in bins.iter().enumerate() {
                    let k = spectral::mode_of_bin(bin, n) as f64;
                    acc_bins[bin] += c * Complex64::from_polar(1.0, k * (s + shift)) * scale;
                }
            }
        }
    }
    let samples = spectral::inverse(&acc_bins);
    CircleFunction::from_samples(zeta.space(), samples, BandHint::Unknown)
        .expect("finite quadrature sums")
}

/// Nodes and weights of `n`-point Gauss-Legendre quadrature on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_{n-1} by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Maximal discrepancy `|| psi_closed(t) - psi_quadrature(t) ||_2` over the
/// probe times: two independent realizations of the same cocycle.
pub fn uniqueness_crosscheck(
    flow: RotationFlow,
    zeta: &CircleFunction,
    times: &[f64],
) -> Result<f64> {
    let closed = Cocycle::from_derivative(flow, zeta.clone())?;
    let quad = Cocycle::from_derivative_quadrature(flow, zeta.clone())?;
    let mut worst = 0.0f64;
    for &t in times {
        let d = closed.psi(t).sub(&quad.psi(t))?.norm_l2();
        worst = worst.max(d);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// transfer functions
// ---------------------------------------------------------------------------

/// Result of trying to write a derivative cocycle as a coboundary.
#[derive(Clone, Debug)]
pub enum TransferOutcome {
    /// A transfer function exists: `psi_t = (theta ∘ T_t) / theta`.
    Coboundary(TransferSolution),
    /// The mean of `zeta` stays away from `i * integers`, which obstructs
    /// any measurable transfer function.
    Obstructed(ObstructionReport),
}

/// A solved transfer function `theta = e^{Theta} * e_w`, where `Theta` is
/// the rotational antiderivative of the mean-free part of `zeta` and `w`
/// the integer winding absorbed from the mean.
#[derive(Clone, Debug)]
pub struct TransferSolution {
    pub theta: CircleFunction,
    pub winding: i64,
}

/// Why no transfer function exists: the mean of the derivative misses the
/// lattice `i * Z` by `distance`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ObstructionReport {
    /// Mean of `zeta` as `[re, im]`.
    pub mean_zeta: (f64, f64),
    /// The integer `m` minimizing `|mean - i m|`.
    pub nearest_integer_multiple: i64,
    /// That minimal distance.
    pub distance: f64,
}

impl ObstructionReport {
    pub fn for_mean(mean: Complex64) -> Self {
        let m = mean.im.round() as i64;
        let distance = (mean - Complex64::new(0.0, m as f64)).norm();
        ObstructionReport {
            mean_zeta: (mean.re, mean.im),
            nearest_integer_multiple: m,
            distance,
        }
    }
}

/// Solves `B theta / theta = zeta` over the rotation flow, where `B` is
/// differentiation along the flow.
///
/// Writing `zeta = mean + zeta_0` with `zeta_0` mean-free, a solution
/// exists in the discretized setting iff `mean` lies on `i * Z` (within
/// `tolerance`); then `theta = e^{Theta} e_m` with `Theta` the termwise
/// antiderivative of `zeta_0` and `m = mean / i`. Otherwise the mean is
/// reported as the obstruction.
pub fn solve_transfer_function(
    flow: RotationFlow,
    zeta: &CircleFunction,
    tolerance: f64,
) -> Result<TransferOutcome> {
    if zeta.space() != flow.space() {
        return Err(KoopError::SpaceMismatch);
    }
    if zeta.hint().limit().is_none() {
        return Err(KoopError::InvalidParameter(
            "transfer solve needs a certified band-limited derivative".into(),
        ));
    }
    let n = flow.space().len();
    let bins = zeta.spectrum();
    let report = ObstructionReport::for_mean(bins[0]);
    if report.distance > tolerance {
        return Ok(TransferOutcome::Obstructed(report));
    }
    let winding = report.nearest_integer_multiple;
    // Theta: antiderivative of the mean-free part, mode by mode.
    let mut theta_bins = vec![Complex64::new(0.0, 0.0); n];
    for (bin, &c) in bins.iter().enumerate() {
        let k = spectral::mode_of_bin(bin, n);
        if k != 0 {
            theta_bins[bin] = c / Complex64::new(0.0, k as f64);
        }
    }
    let cap = spectral::inverse(&theta_bins);
    let cap_fn = CircleFunction::from_samples(flow.space(), cap, BandHint::Unknown)?;
    let character = CircleFunction::character(flow.space(), winding)?;
    let theta = cap_fn.exp().multiply(&character)?;
    Ok(TransferOutcome::Coboundary(TransferSolution {
        theta,
        winding,
    }))
}

/// Largest reconstruction defect `|| (theta ∘ T_t)/theta - psi_t ||_2` over
/// the probe times, for a solved transfer function.
pub fn reconstruction_residual(
    flow: RotationFlow,
    zeta: &CircleFunction,
    solution: &TransferSolution,
    times: &[f64],
) -> Result<f64> {
    let from_theta = Cocycle::coboundary(flow, solution.theta.clone())?;
    let from_zeta = Cocycle::from_derivative(flow, zeta.clone())?;
    let mut worst = 0.0f64;
    for &t in times {
        let d = from_theta.psi(t).sub(&from_zeta.psi(t))?.norm_l2();
        worst = worst.max(d);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// coboundaries on suspension spaces
// ---------------------------------------------------------------------------

/// The coboundary cocycle `psi_t = (theta ∘ T_t) / theta` over a suspension
/// flow, where transport is an exact cell permutation.
#[derive(Clone, Debug)]
pub struct CellCoboundary {
    flow: SpecialFlow,
    theta: CellFunction,
}

impl CellCoboundary {
    pub fn new(flow: SpecialFlow, theta: CellFunction) -> Result<Self> {
        if theta.space() != flow.space() {
            return Err(KoopError::SpaceMismatch);
        }
        let min_abs = theta
            .values()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if min_abs < 1e-9 {
            return Err(KoopError::VanishingValue { min_abs });
        }
        Ok(CellCoboundary { flow, theta })
    }

    pub fn flow(&self) -> &SpecialFlow {
        &self.flow
    }

    pub fn psi(&self, t: f64) -> Result<CellFunction> {
        let moved = self.flow.koopman(t, &self.theta)?;
        moved.divide(&self.theta)
    }

    /// `|| psi_{t+s} - psi_t * (psi_s ∘ T_t) ||_2` on cells.
    pub fn identity_residual(&self, t: f64, s: f64) -> Result<f64> {
        let lhs = self.psi(t + s)?;
        let composed = self.flow.koopman(t, &self.psi(s)?)?;
        let rhs = self.psi(t)?.multiply(&composed)?;
        Ok(lhs.sub(&rhs)?.norm_l2())
    }

    /// `|| 1/psi_t - psi_{-t} ∘ T_t ||_2` on cells.
    pub fn inverse_residual(&self, t: f64) -> Result<f64> {
        let psi_t = self.psi(t)?;
        let reciprocal = CellFunction::one(self.flow.space().clone()).divide(&psi_t)?;
        let other = self.flow.koopman(t, &self.psi(-t)?)?;
        Ok(reciprocal.sub(&other)?.norm_l2())
    }

    /// `sup | |psi_t| - 1 |`; exactly zero for unimodular transfer data.
    pub fn unimodular_residual(&self, t: f64) -> Result<f64> {
        Ok(self
            .psi(t)?
            .values()
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max))
    }

    /// Weighted Koopman action `f -> psi_t * (f ∘ T_t)` on cells.
    pub fn weighted_apply(&self, t: f64, f: &CellFunction) -> Result<CellFunction> {
        let moved = self.flow.koopman(t, f)?;
        self.psi(t)?.multiply(&moved)
    }

    /// Table of `(t, || psi_t - 1 ||_2)`.
    pub fn c0_decay(&self, times: &[f64]) -> Result<Vec<(f64, f64)>> {
        let one = CellFunction::one(self.flow.space().clone());
        times
            .iter()
            .map(|&t| Ok((t, self.psi(t)?.sub(&one)?.norm_l2())))
            .collect()
    }
}
