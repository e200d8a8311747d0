//! Property tests for the structural invariants: spectral arithmetic,
//! norm inequalities, group laws, cocycle identities, and fit envelopes.

use num_complex::Complex64;
use proptest::prelude::*;

use koop::cocycles::Cocycle;
use koop::flows::{strip_symmetric_difference, RotationFlow, SpecialFlow};
use koop::groups::Group;
use koop::space::{CircleFunction, CircleSpace, SpecialFlowSpace};
use koop::verify::{sliding_average, GrowthFit, Verdict};

fn space64() -> CircleSpace {
    CircleSpace::new(64, 16).unwrap()
}

fn coeff() -> impl Strategy<Value = Complex64> {
    ((-1.0..1.0f64), (-1.0..1.0f64)).prop_map(|(a, b)| Complex64::new(a, b))
}

/// A band-limited function with modes in `[-max_mode, max_mode]`.
fn bandlimited(max_mode: i64) -> impl Strategy<Value = CircleFunction> {
    prop::collection::vec(coeff(), (2 * max_mode + 1) as usize).prop_map(move |cs| {
        let modes: Vec<(i64, Complex64)> = cs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - max_mode, c))
            .collect();
        CircleFunction::from_modes(space64(), &modes).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ---- spectral arithmetic ----

    #[test]
    fn parseval_identity(f in bandlimited(10)) {
        let spectral: f64 = (-16..=16i64)
            .map(|k| f.coefficient(k).norm_sqr())
            .sum();
        let direct = f.norm_l2().powi(2);
        prop_assert!((spectral - direct).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn norms_are_ordered(f in bandlimited(12)) {
        let n = f.norms();
        prop_assert!(n.l1 <= n.l2 + 1e-12);
        prop_assert!(n.l2 <= n.sup + 1e-12);
    }

    #[test]
    fn character_products_add_modes(a in -7i64..=7, b in -7i64..=7, t in -2.0..2.0f64) {
        let space = space64();
        let ea = CircleFunction::character(space, a).unwrap();
        let eb = CircleFunction::character(space, b).unwrap();
        let product = ea.multiply(&eb).unwrap();
        let expect = CircleFunction::character(space, a + b).unwrap();
        prop_assert!(product.sub(&expect).unwrap().norm_sup() < 1e-12);
        // rotation acts on the product by the combined phase
        let moved = product.rotated(t);
        let phase = Complex64::from_polar(1.0, (a + b) as f64 * t);
        prop_assert!(moved.sub(&expect.scale(phase)).unwrap().norm_sup() < 1e-10);
    }

    #[test]
    fn pointwise_multiplication_commutes_bitwise(f in bandlimited(8), g in bandlimited(7)) {
        let fg = f.multiply(&g).unwrap();
        let gf = g.multiply(&f).unwrap();
        for (a, b) in fg.samples().iter().zip(gf.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rotation_round_trip_recovers(f in bandlimited(10), t in -10.0..10.0f64) {
        let back = f.rotated(t).rotated(-t);
        prop_assert!(back.sub(&f).unwrap().norm_sup() <= 1e-9 * (1.0 + f.norm_sup()));
    }

    #[test]
    fn commensurate_rotations_compose_exactly(
        f in bandlimited(10),
        m1 in -100i64..=100,
        m2 in -100i64..=100,
    ) {
        let space = space64();
        let two_steps = f
            .rotated(space.commensurate_time(m1))
            .rotated(space.commensurate_time(m2));
        let one_step = f.rotated(space.commensurate_time(m1 + m2));
        for (a, b) in two_steps.samples().iter().zip(one_step.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact(f in bandlimited(6)) {
        let text = f.to_json().unwrap();
        let back = CircleFunction::from_json(&text).unwrap();
        for (a, b) in f.samples().iter().zip(back.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    // ---- cocycles ----

    #[test]
    fn cocycle_identity_and_inverse(
        zeta in bandlimited(5),
        t in -3.0..3.0f64,
        s in -3.0..3.0f64,
    ) {
        let flow = RotationFlow::new(space64());
        let cocycle = Cocycle::from_derivative(flow, zeta.scale(Complex64::new(0.5, 0.0))).unwrap();
        prop_assert!(cocycle.identity_residual(t, s) <= 1e-9);
        prop_assert!(cocycle.inverse_residual(t).unwrap() <= 1e-9);
    }

    #[test]
    fn imaginary_derivatives_give_unimodular_weights(
        zeta in bandlimited(5),
        t in -3.0..3.0f64,
    ) {
        // keep only the skew part: i * Re spectrum gives conjugate-symmetric i*real function
        let skew = zeta
            .add(&zeta.conjugate())
            .unwrap()
            .scale(Complex64::new(0.0, 0.5));
        let cocycle = Cocycle::from_derivative(RotationFlow::new(space64()), skew).unwrap();
        prop_assert!(cocycle.unimodular_residual(t) <= 1e-10);
    }

    // ---- groups ----

    #[test]
    fn weighted_group_law_at_commensurate_times(
        zeta in bandlimited(5),
        m1 in -32i64..=32,
        m2 in -32i64..=32,
    ) {
        let space = space64();
        let flow = RotationFlow::new(space);
        let group = Group::weighted(
            Cocycle::from_derivative(flow, zeta.scale(Complex64::new(0.5, 0.0))).unwrap(),
        );
        let f = CircleFunction::character(space, 3).unwrap();
        let t1 = space.commensurate_time(m1);
        let t2 = space.commensurate_time(m2);
        let chained = group.apply(t1, &group.apply(t2, &f).unwrap()).unwrap();
        let direct = group.apply(t1 + t2, &f).unwrap();
        let scale = 1.0 + direct.norm_sup();
        prop_assert!(chained.sub(&direct).unwrap().norm_sup() <= 1e-9 * scale);
    }

    // ---- averaging ----

    #[test]
    fn sliding_average_is_an_l2_contraction(f in bandlimited(10), t in 0.1..50.0f64) {
        let space = space64();
        let centered = f
            .sub(&CircleFunction::constant(space, f.mean()))
            .unwrap();
        let avg = sliding_average(RotationFlow::new(space), &centered, t).unwrap();
        prop_assert!(avg.norm_l2() <= centered.norm_l2() * (1.0 + 1e-12));
    }

    // ---- verdicts and fits ----

    #[test]
    fn verdict_pass_is_derived(residual in prop::num::f64::ANY, threshold in -1.0..1.0f64) {
        let v = Verdict::check("p", residual, threshold, serde_json::json!({}));
        prop_assert_eq!(v.pass, residual.is_finite() && residual <= threshold);
    }

    #[test]
    fn growth_fit_always_certifies(norms in prop::collection::vec(0.1..10.0f64, 2..8)) {
        let samples: Vec<(f64, f64)> = norms
            .iter()
            .enumerate()
            .map(|(i, &n)| (0.2 * (i + 1) as f64, n))
            .collect();
        let fit = GrowthFit::fit(&samples).unwrap();
        prop_assert!(fit.certifies());
        prop_assert!(fit.omega >= 0.0);
    }

    // ---- suspension transport ----

    #[test]
    fn suspension_transport_is_a_bijection(
        bumps in prop::collection::vec(0.8..1.2f64, 8..24),
        steps in -2000i64..=2000,
    ) {
        let m = bumps.len();
        let space = SpecialFlowSpace::with_roof(m, bumps, 50, 0.5).unwrap();
        let flow = SpecialFlow::new(space.clone(), 0.38).unwrap();
        let mut image: Vec<usize> = (0..space.cell_count())
            .map(|c| flow.transport(c, steps))
            .collect();
        image.sort_unstable();
        for (i, v) in image.iter().enumerate() {
            prop_assert_eq!(i, *v);
        }
    }

    #[test]
    fn strip_difference_measures_twice_the_time(steps in 1usize..=40) {
        let space = SpecialFlowSpace::constant_roof(32, 1.0, 400, 0.95).unwrap();
        let flow = SpecialFlow::new(space, 0.6180339887498949).unwrap();
        let t = steps as f64 / 400.0;
        let diff = strip_symmetric_difference(&flow, 0.3, 0.55, t).unwrap();
        prop_assert!((diff.measure - 2.0 * t).abs() < 1e-12);
    }
}
