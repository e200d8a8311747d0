//! One-parameter operator groups on the circle grid and the numerics that
//! probe them: generator estimation, product-formula studies, and dense
//! operator norms.
//!
//! Four group kinds cover the laboratory:
//!
//! * [`Group::koopman`] — composition with the rotation, `U_t f = f ∘ T_t`;
//! * [`Group::weighted`] — weighted composition `U_t f = psi_t (f ∘ T_t)`
//!   for a multiplicative cocycle `psi`;
//! * [`Group::multiplier`] — a Fourier multiplier `U_t e_k = e^{t a_k} e_k`,
//!   the standard source of groups whose generator is *not* a derivation;
//! * [`Group::affine_rank_one`] — `U_t = I + t A` for the nilpotent rank-one
//!   `A f = (f, phi) eta` with `(eta, phi) = 0`, a group that is not weighted
//!   Koopman yet maps the constant one onto an indicator at a finite time.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cocycles::Cocycle;
use crate::error::{KoopError, Result};
use crate::flows::RotationFlow;
use crate::space::{BandHint, CircleFunction, CircleSpace};
use crate::spectral;

/// Largest grid for which dense operator matrices are allowed.
pub const DENSE_GUARD: usize = 256;

// ---------------------------------------------------------------------------
// group kinds
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Kind {
    Koopman {
        flow: RotationFlow,
    },
    Weighted {
        cocycle: Cocycle,
    },
    Multiplier {
        space: CircleSpace,
        /// `symbol[k + K]` is the exponent coefficient `a_k`; modes outside
        /// the band are left untouched (coefficient zero).
        symbol: Vec<Complex64>,
    },
    AffineRankOne {
        phi: CircleFunction,
        eta: CircleFunction,
    },
}

/// A one-parameter operator group acting on [`CircleFunction`]s.
#[derive(Clone, Debug)]
pub struct Group {
    kind: Kind,
    unitary: bool,
    measure_preserving: bool,
}

impl Group {
    /// The Koopman group of the rotation flow.
    pub fn koopman(flow: RotationFlow) -> Self {
        Group {
            kind: Kind::Koopman { flow },
            unitary: true,
            measure_preserving: true,
        }
    }

    /// The weighted Koopman group `U_t f = psi_t * (f ∘ T_t)`.
    pub fn weighted(cocycle: Cocycle) -> Self {
        // Unitarity holds iff the weight is unimodular; probe a couple of
        // incommensurate times rather than trusting the construction.
        let unitary = [0.37, -1.13]
            .iter()
            .all(|&t| cocycle.unimodular_residual(t) <= 1e-12);
        Group {
            kind: Kind::Weighted { cocycle },
            unitary,
            measure_preserving: true,
        }
    }

    /// The Fourier multiplier group with exponent symbol `a_k`.
    pub fn multiplier(space: CircleSpace, symbol: impl Fn(i64) -> Complex64) -> Self {
        let k = space.band_limit() as i64;
        let symbol: Vec<Complex64> = (-k..=k).map(symbol).collect();
        let unitary = symbol.iter().all(|a| a.re.abs() <= 1e-14);
        Group {
            kind: Kind::Multiplier { space, symbol },
            unitary,
            measure_preserving: true,
        }
    }

    /// `U_t = I + t A` for the nilpotent `A f = (f, phi) eta`; requires
    /// `(eta, phi) = 0` so that `A^2 = 0`.
    pub fn affine_rank_one(phi: CircleFunction, eta: CircleFunction) -> Result<Self> {
        let overlap = eta.inner(&phi)?;
        if overlap.norm() > 1e-12 {
            return Err(KoopError::InvalidParameter(format!(
                "(eta, phi) = {overlap} must vanish for a nilpotent rank-one generator"
            )));
        }
        Ok(Group {
            kind: Kind::AffineRankOne { phi, eta },
            unitary: false,
            measure_preserving: false,
        })
    }

    pub fn space(&self) -> CircleSpace {
        match &self.kind {
            Kind::Koopman { flow } => flow.space(),
            Kind::Weighted { cocycle } => cocycle.space(),
            Kind::Multiplier { space, .. } => *space,
            Kind::AffineRankOne { phi, .. } => phi.space(),
        }
    }

    /// Whether `U_t` preserves the L2 norm (probed at construction).
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Whether the underlying point motion preserves the measure.
    pub fn is_measure_preserving(&self) -> bool {
        self.measure_preserving
    }

    /// Applies `U_t`.
    pub fn apply(&self, t: f64, f: &CircleFunction) -> Result<CircleFunction> {
        match &self.kind {
            Kind::Koopman { flow } => flow.koopman(t, f),
            Kind::Weighted { cocycle } => {
                let moved = cocycle.flow().koopman(t, f)?;
                cocycle.psi(t).multiply(&moved)
            }
            Kind::Multiplier { space, symbol } => {
                if f.space() != *space {
                    return Err(KoopError::SpaceMismatch);
                }
                let n = space.len();
                let band = space.band_limit() as i64;
                let mut bins = f.spectrum();
                for (bin, c) in bins.iter_mut().enumerate() {
                    let k = spectral::mode_of_bin(bin, n);
                    if k.abs() <= band {
                        *c *= (symbol[(k + band) as usize] * t).exp();
                    }
                }
                CircleFunction::from_samples(*space, spectral::inverse(&bins), f.hint())
            }
            Kind::AffineRankOne { phi, eta } => {
                let coeff = f.inner(phi)? * t;
                f.add(&eta.scale(coeff))
            }
        }
    }

    /// The orbit of the constant one, `U_t 1`; for weighted groups this is
    /// the weight `psi_t` itself.
    pub fn weight(&self, t: f64) -> Result<CircleFunction> {
        self.apply(t, &CircleFunction::one(self.space()))
    }

    /// The cocycle of a weighted group.
    pub fn cocycle(&self) -> Option<&Cocycle> {
        match &self.kind {
            Kind::Weighted { cocycle } => Some(cocycle),
            _ => None,
        }
    }

    /// The point flow the group rides on, when it has one.
    pub fn rotation_flow(&self) -> Option<RotationFlow> {
        match &self.kind {
            Kind::Koopman { flow } => Some(*flow),
            Kind::Weighted { cocycle } => Some(cocycle.flow()),
            _ => None,
        }
    }

    /// Exact generator action, available for every kind whose derivative at
    /// zero is known in closed form:
    ///
    /// * Koopman rotation: `A f = f'` (spectral derivative);
    /// * weighted: `A f = f' + zeta f` where `zeta` is the weight derivative;
    /// * multiplier: `A e_k = a_k e_k`;
    /// * affine rank-one: `A f = (f, phi) eta`.
    pub fn generator_exact(&self, f: &CircleFunction) -> Result<CircleFunction> {
        match &self.kind {
            Kind::Koopman { .. } => Ok(f.derivative()),
            Kind::Weighted { cocycle } => {
                let zeta = cocycle.weight_derivative()?;
                f.derivative().add(&zeta.multiply(f)?)
            }
            Kind::Multiplier { space, symbol } => {
                if f.space() != *space {
                    return Err(KoopError::SpaceMismatch);
                }
                let n = space.len();
                let band = space.band_limit() as i64;
                let mut bins = f.spectrum();
                for (bin, c) in bins.iter_mut().enumerate() {
                    let k = spectral::mode_of_bin(bin, n);
                    if k.abs() <= band {
                        *c *= symbol[(k + band) as usize];
                    } else {
                        *c = Complex64::new(0.0, 0.0);
                    }
                }
                CircleFunction::from_samples(*space, spectral::inverse(&bins), f.hint())
            }
            Kind::AffineRankOne { phi, eta } => {
                let coeff = f.inner(phi)?;
                Ok(eta.scale(coeff))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// generator estimation
// ---------------------------------------------------------------------------

/// Difference scheme for estimating the generator from group orbits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMethod {
    /// `(U_h f - f)/h`, first order.
    Forward,
    /// `(U_h f - U_{-h} f)/(2h)`, second order.
    Central,
    /// Richardson extrapolation of two central quotients, fourth order.
    Richardson4,
}

/// A finite-difference estimate of `A f`.
#[derive(Clone, Debug)]
pub struct GeneratorEstimate {
    pub value: CircleFunction,
    pub h: f64,
    pub method: DiffMethod,
    /// A posteriori error gauge `|| D_h - D_{h/2} ||_2`.
    pub error_estimate: f64,
}

/// Estimates the generator at `f` by the given difference scheme.
pub fn estimate_generator(
    group: &Group,
    f: &CircleFunction,
    h: f64,
    method: DiffMethod,
) -> Result<GeneratorEstimate> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(KoopError::InvalidParameter(format!(
            "difference step must be positive and finite, got {h}"
        )));
    }
    let value = difference_quotient(group, f, h, method)?;
    let halved = difference_quotient(group, f, h / 2.0, method)?;
    let error_estimate = value.sub(&halved)?.norm_l2();
    Ok(GeneratorEstimate {
        value,
        h,
        method,
        error_estimate,
    })
}

fn difference_quotient(
    group: &Group,
    f: &CircleFunction,
    h: f64,
    method: DiffMethod,
) -> Result<CircleFunction> {
    match method {
        DiffMethod::Forward => {
            let up = group.apply(h, f)?;
            Ok(up.sub(f)?.scale(Complex64::new(1.0 / h, 0.0)))
        }
        DiffMethod::Central => {
            let up = group.apply(h, f)?;
            let down = group.apply(-h, f)?;
            Ok(up.sub(&down)?.scale(Complex64::new(0.5 / h, 0.0)))
        }
        DiffMethod::Richardson4 => {
            let coarse = difference_quotient(group, f, h, DiffMethod::Central)?;
            let fine = difference_quotient(group, f, h / 2.0, DiffMethod::Central)?;
            // (4 D_{h/2} - D_h) / 3 cancels the h^2 term
            Ok(fine
                .scale(Complex64::new(4.0 / 3.0, 0.0))
                .sub(&coarse.scale(Complex64::new(1.0 / 3.0, 0.0)))?)
        }
    }
}

// ---------------------------------------------------------------------------
// convergence tables
// ---------------------------------------------------------------------------

/// One row of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
    /// Observed rate against the previous row,
    /// `ln(e_prev / e_n) / ln(n / n_prev)`; for doubled `n` this is the
    /// dyadic order `log2(e_prev / e_n)`. Undefined on the first row and
    /// whenever an error vanishes.
    pub order: Option<f64>,
}

/// A convergence study `(n, error)` with observed orders, serializable as
/// CSV with header `n,error,order`.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Builds the table and fills in observed orders.
    pub fn from_errors(pairs: &[(usize, f64)]) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(pairs.len());
        for (i, &(n, error)) in pairs.iter().enumerate() {
            let order = if i == 0 {
                None
            } else {
                let (pn, pe) = pairs[i - 1];
                if pe > 0.0 && error > 0.0 && n != pn {
                    Some((pe / error).ln() / (n as f64 / pn as f64).ln())
                } else {
                    None
                }
            };
            rows.push(ConvergenceRow { n, error, order });
        }
        ConvergenceTable { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,error,order\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.n,
                row.error,
                row.order.map(|o| o.to_string()).unwrap_or_default()
            ));
        }
        out
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map(|r| r.error).unwrap_or(0.0)
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    /// All defined observed orders.
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

// ---------------------------------------------------------------------------
// product formula
// ---------------------------------------------------------------------------

/// One product-formula approximant: `(V_{t/n} e^{(t/n) zeta I})^n f`, the
/// alternation of `n` short multiplications and `n` short rotations.
pub fn trotter_product_apply(
    flow: RotationFlow,
    zeta: &CircleFunction,
    t: f64,
    n: usize,
    f: &CircleFunction,
) -> Result<CircleFunction> {
    if n == 0 {
        return Err(KoopError::InvalidParameter("need n >= 1 factors".into()));
    }
    if zeta.space() != flow.space() || f.space() != flow.space() {
        return Err(KoopError::SpaceMismatch);
    }
    let h = t / n as f64;
    let step_weight = zeta.scale(Complex64::new(h, 0.0)).exp();
    let mut g = f.clone();
    for _ in 0..n {
        g = step_weight.multiply(&g)?;
        g = flow.koopman(h, &g)?;
    }
    Ok(g)
}

/// Residual of the exact finite-`n` product identity
/// `(V_{t/n} e^{(t/n) zeta I})^n f = e^{(t/n) sum_{j=1}^n zeta ∘ T_{jt/n}} (f ∘ T_t)`:
/// the left side is iterated, the right side assembled in closed form, and
/// the L2 difference returned.
pub fn riemann_identity_residual(
    flow: RotationFlow,
    zeta: &CircleFunction,
    t: f64,
    n: usize,
    f: &CircleFunction,
) -> Result<f64> {
    let lhs = trotter_product_apply(flow, zeta, t, n, f)?;
    let h = t / n as f64;
    // Right Riemann exponent: bins of zeta summed over the n phase shifts.
    let space = flow.space();
    let len = space.len();
    let bins = zeta.spectrum();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for j in 1..=n {
        let s = j as f64 * h;
        for (bin, &c) in bins.iter().enumerate() {
            let k = spectral::mode_of_bin(bin, len) as f64;
            acc[bin] += c * Complex64::from_polar(1.0, k * s);
        }
    }
    for c in &mut acc {
        *c *= h;
    }
    let exponent =
        CircleFunction::from_samples(space, spectral::inverse(&acc), BandHint::Unknown)?;
    let rhs = exponent.exp().multiply(&flow.koopman(t, f)?)?;
    Ok(lhs.sub(&rhs)?.norm_l2())
}

/// Convergence of the product formula to the weighted group: errors
/// `|| (V_{t/n} e^{(t/n) zeta I})^n f - psi_t (f ∘ T_t) ||_2` over `n_list`,
/// with observed orders (first order: the right Riemann sum in the exponent
/// converges at rate `1/n`).
pub fn trotter_limit_study(
    flow: RotationFlow,
    zeta: &CircleFunction,
    t: f64,
    n_list: &[usize],
    f: &CircleFunction,
) -> Result<ConvergenceTable> {
    let cocycle = Cocycle::from_derivative(flow, zeta.clone())?;
    let limit = cocycle.psi(t).multiply(&flow.koopman(t, f)?)?;
    let mut pairs = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let approx = trotter_product_apply(flow, zeta, t, n, f)?;
        pairs.push((n, approx.sub(&limit)?.norm_l2()));
    }
    Ok(ConvergenceTable::from_errors(&pairs))
}

// ---------------------------------------------------------------------------
// dense operator matrices
// ---------------------------------------------------------------------------

/// A dense matrix realization of `U_t` on the grid coordinates (column `j`
/// is `U_t` applied to the `j`-th coordinate basis function).
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    n: usize,
    entries: Vec<Complex64>, // row-major
}

/// Materializes `U_t` as a dense matrix; guarded to grids of at most
/// [`DENSE_GUARD`] points.
pub fn operator_matrix(group: &Group, t: f64) -> Result<OperatorMatrix> {
    let n = group.space().len();
    if n > DENSE_GUARD {
        return Err(KoopError::SizeGuard {
            size: n,
            limit: DENSE_GUARD,
        });
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        samples[j] = Complex64::new(1.0, 0.0);
        let basis = CircleFunction::from_samples(group.space(), samples, BandHint::Unknown)?;
        let image = group.apply(t, &basis)?;
        for i in 0..n {
            entries[i * n + j] = image.samples()[i];
        }
    }
    Ok(OperatorMatrix { n, entries })
}

impl OperatorMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    /// Operator norm on sup-norm functions: the maximal absolute row sum.
    pub fn sup_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.entry(i, j).norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Operator norm on L2: the largest singular value, computed on the
    /// real `2n x 2n` embedding `[[Re, -Im], [Im, Re]]` (the uniform point
    /// masses cancel between domain and codomain).
    pub fn two_norm(&self) -> f64 {
        let n = self.n;
        let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entry(i, j);
                real[(i, j)] = z.re;
                real[(i, j + n)] = -z.im;
                real[(i + n, j)] = z.im;
                real[(i + n, j + n)] = z.re;
            }
        }
        real.svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space64() -> CircleSpace {
        CircleSpace::new(64, 16).unwrap()
    }

    // ---- group actions ----

    #[test]
    fn koopman_apply_is_composition() {
        let space = space64();
        let group = Group::koopman(RotationFlow::new(space));
        assert!(group.is_unitary() && group.is_measure_preserving());
        let f = CircleFunction::character(space, 2).unwrap();
        let g = group.apply(0.4, &f).unwrap();
        let expect = f.scale(Complex64::from_polar(1.0, 0.8));
        assert!(g.sub(&expect).unwrap().norm_sup() < 1e-12);
    }

    #[test]
    fn group_identity_at_time_zero() {
        let space = space64();
        let zeta = CircleFunction::cosine(space);
        let flow = RotationFlow::new(space);
        let groups = [
            Group::koopman(flow),
            Group::weighted(Cocycle::from_derivative(flow, zeta).unwrap()),
            Group::multiplier(space, |k| Complex64::new(0.0, (k * k) as f64)),
        ];
        let f = CircleFunction::random_bandlimited(space, 8, 10, false, false).unwrap();
        for group in &groups {
            let g = group.apply(0.0, &f).unwrap();
            assert!(g.sub(&f).unwrap().norm_sup() < 1e-15);
        }
    }

    #[test]
    fn weighted_weight_is_psi() {
        let space = space64();
        let flow = RotationFlow::new(space);
        let cocycle = Cocycle::from_derivative(flow, CircleFunction::cosine(space)).unwrap();
        let group = Group::weighted(cocycle.clone());
        assert!(!group.is_unitary(), "real derivative inflates the weight");
        let w = group.weight(0.8).unwrap();
        let psi = cocycle.psi(0.8);
        for (a, b) in w.samples().iter().zip(psi.samples()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn multiplier_moves_single_modes() {
        let space = space64();
        let group = Group::multiplier(space, |k| Complex64::new(0.0, (k * k) as f64));
        assert!(group.is_unitary());
        let e3 = CircleFunction::character(space, 3).unwrap();
        let moved = group.apply(0.5, &e3).unwrap();
        let expect = e3.scale(Complex64::from_polar(1.0, 4.5));
        assert!(moved.sub(&expect).unwrap().norm_sup() < 1e-12);
    }

    #[test]
    fn affine_rank_one_requires_orthogonality() {
        let space = space64();
        let ind = CircleFunction::indicator(space, |x| x < std::f64::consts::PI);
        assert!(Group::affine_rank_one(ind.clone(), ind.clone()).is_err());
        let complement = CircleFunction::one(space).sub(&ind).unwrap();
        assert!(Group::affine_rank_one(ind, complement).is_ok());
    }

    // ---- generators ----

    #[test]
    fn koopman_generator_is_spectral_derivative() {
        let space = space64();
        let group = Group::koopman(RotationFlow::new(space));
        let f = CircleFunction::character(space, 5).unwrap();
        let af = group.generator_exact(&f).unwrap();
        let expect = f.scale(Complex64::new(0.0, 5.0));
        assert!(af.sub(&expect).unwrap().norm_sup() < 1e-12);
    }

    #[test]
    fn central_difference_converges_quadratically() {
        let space = space64();
        let group = Group::koopman(RotationFlow::new(space));
        let f = CircleFunction::character(space, 1).unwrap();
        let exact = group.generator_exact(&f).unwrap();
        let mut errors = Vec::new();
        for &h in &[1e-1, 1e-2] {
            let est = estimate_generator(&group, &f, h, DiffMethod::Central).unwrap();
            errors.push(est.value.sub(&exact).unwrap().norm_l2());
            assert!(est.error_estimate.is_finite());
        }
        let order = (errors[0] / errors[1]).log10();
        assert!((order - 2.0).abs() < 0.05, "central order {order}");
    }

    #[test]
    fn richardson_beats_central() {
        let space = space64();
        let group = Group::koopman(RotationFlow::new(space));
        let f = CircleFunction::character(space, 1).unwrap();
        let exact = group.generator_exact(&f).unwrap();
        let central = difference_quotient(&group, &f, 0.1, DiffMethod::Central).unwrap();
        let rich = difference_quotient(&group, &f, 0.1, DiffMethod::Richardson4).unwrap();
        let ec = central.sub(&exact).unwrap().norm_l2();
        let er = rich.sub(&exact).unwrap().norm_l2();
        assert!(er < ec / 100.0, "richardson {er} vs central {ec}");
    }

    // ---- convergence table ----

    #[test]
    fn convergence_table_orders_and_csv() {
        let table =
            ConvergenceTable::from_errors(&[(8, 1.0e-1), (16, 5.0e-2), (32, 2.5e-2)]);
        let orders = table.orders();
        assert_eq!(orders.len(), 2);
        for o in orders {
            assert!((o - 1.0).abs() < 1e-12);
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("n,error,order\n8,0.1,\n16,0.05,"));
    }

    #[test]
    fn zero_errors_leave_orders_undefined() {
        let table = ConvergenceTable::from_errors(&[(8, 0.0), (16, 0.0)]);
        assert!(table.orders().is_empty());
        assert_eq!(table.to_csv(), "n,error,order\n8,0,\n16,0,\n");
    }

    // ---- product formula ----

    #[test]
    fn single_factor_product_is_one_step() {
        let space = space64();
        let flow = RotationFlow::new(space);
        let zeta = CircleFunction::cosine(space);
        let f = CircleFunction::character(space, 1).unwrap();
        let lhs = trotter_product_apply(flow, &zeta, 0.7, 1, &f).unwrap();
        let manual = zeta
            .scale(Complex64::new(0.7, 0.0))
            .exp()
            .multiply(&f)
            .unwrap()
            .rotated(0.7);
        assert!(lhs.sub(&manual).unwrap().norm_sup() < 1e-15);
    }

    #[test]
    fn riemann_identity_holds_at_machine_precision() {
        let space = space64();
        let flow = RotationFlow::new(space);
        let zeta = CircleFunction::cosine(space);
        let f = CircleFunction::character(space, 1).unwrap();
        for &n in &[1usize, 16, 128] {
            let r = riemann_identity_residual(flow, &zeta, 1.0, n, &f).unwrap();
            assert!(r < 1e-12, "n={n}: residual {r}");
        }
    }

    #[test]
    fn vanishing_derivative_gives_zero_errors() {
        let space = space64();
        let flow = RotationFlow::new(space);
        let zeta = CircleFunction::constant(space, Complex64::new(0.0, 0.0));
        let one = CircleFunction::one(space);
        let table = trotter_limit_study(flow, &zeta, 1.0, &[8, 16, 32], &one).unwrap();
        assert_eq!(table.max_error(), 0.0);
        assert!(table.orders().is_empty());
    }

    // ---- dense matrices ----

    #[test]
    fn permutation_matrix_norms_are_one() {
        let space = CircleSpace::new(16, 4).unwrap();
        let group = Group::koopman(RotationFlow::new(space));
        let t = space.commensurate_time(3);
        let m = operator_matrix(&group, t).unwrap();
        assert!((m.sup_norm() - 1.0).abs() < 1e-14);
        assert!((m.two_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_matrix_norms_follow_the_weight() {
        let space = CircleSpace::new(16, 4).unwrap();
        let flow = RotationFlow::new(space);
        let cocycle = Cocycle::from_derivative(flow, CircleFunction::cosine(space)).unwrap();
        let group = Group::weighted(cocycle.clone());
        let t = space.commensurate_time(2);
        let m = operator_matrix(&group, t).unwrap();
        let max_weight = cocycle.psi(t).norm_sup();
        assert!((m.sup_norm() - max_weight).abs() < 1e-12);
        assert!((m.two_norm() - max_weight).abs() < 1e-9);
    }

    #[test]
    fn dense_guard_trips() {
        let space = CircleSpace::new(512, 16).unwrap();
        let group = Group::koopman(RotationFlow::new(space));
        assert!(matches!(
            operator_matrix(&group, 0.1),
            Err(KoopError::SizeGuard { .. })
        ));
    }
}
