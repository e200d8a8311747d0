//! Cross-implementation checks: every constant in this file was computed
//! independently (closed forms where available, otherwise a separate
//! double-precision reference implementation) and frozen. The library has
//! to reproduce them, not merely be self-consistent.

use num_complex::Complex64;

use koop::cocycles::{
    solve_transfer_function, uniqueness_crosscheck, Cocycle, TransferOutcome,
};
use koop::flows::{strip_symmetric_difference, RotationFlow, SpecialFlow};
use koop::groups::{
    estimate_generator, operator_matrix, trotter_limit_study, DiffMethod, Group,
};
use koop::space::{CircleFunction, CircleSpace, SpecialFlowSpace};
use koop::verify::{
    derivation_residual, fit_power_law, linf_growth_fit, sliding_average,
    unbounded_weight_study, weighted_norm_bound,
};

fn space64() -> CircleSpace {
    CircleSpace::new(64, 16).unwrap()
}

fn rel_close(actual: f64, frozen: f64, rel: f64) -> bool {
    (actual - frozen).abs() <= rel * frozen.abs().max(1e-300)
}

// ---- product formula ----

#[test]
fn trotter_errors_halve_with_n() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let zeta = CircleFunction::cosine(space);
    let f = CircleFunction::character(space, 1).unwrap();
    let table = trotter_limit_study(
        flow,
        &zeta,
        1.0,
        &[8, 16, 32, 64, 128, 256, 512, 1024],
        &f,
    )
    .unwrap();
    // Frozen first/last errors of the first-order product formula at t = 1.
    assert!(
        rel_close(table.rows[0].error, 5.253028e-2, 1e-6),
        "first error {}",
        table.rows[0].error
    );
    assert!(
        rel_close(table.final_error(), 4.102724e-4, 1e-6),
        "final error {}",
        table.final_error()
    );
    for order in table.orders() {
        assert!((order - 1.0).abs() < 5e-3, "order {order}");
    }
}

// ---- derivative of the cocycle ----

#[test]
fn cocycle_derivative_residual_is_first_order() {
    let space = space64();
    let cocycle =
        Cocycle::from_derivative(RotationFlow::new(space), CircleFunction::cosine(space)).unwrap();
    let frozen = [
        (1e-1, 4.678089e-2),
        (1e-2, 4.677082e-3),
        (1e-3, 4.677072e-4),
    ];
    for (t, expect) in frozen {
        let r = cocycle.derivative_residual(t).unwrap();
        assert!(rel_close(r, expect, 1e-6), "t={t}: residual {r}");
    }
}

#[test]
fn cocycle_strong_continuity_final_value() {
    let space = space64();
    let cocycle =
        Cocycle::from_derivative(RotationFlow::new(space), CircleFunction::cosine(space)).unwrap();
    let decay = cocycle.c0_decay(&[1e-5]);
    // || psi_t - 1 ||_2 -> t * ||cos||_2 = t / sqrt(2)
    assert!(
        rel_close(decay[0].1, 7.071067811983017e-6, 1e-9),
        "final c0 value {}",
        decay[0].1
    );
}

// ---- closed-form weight values ----

#[test]
fn weight_at_origin_matches_closed_form() {
    let space = space64();
    let cocycle =
        Cocycle::from_derivative(RotationFlow::new(space), CircleFunction::cosine(space)).unwrap();
    // exponent at x = 0, t = pi/2 is sin(pi/2) - sin(0) = 1, so psi = e.
    let psi = cocycle.psi(std::f64::consts::FRAC_PI_2);
    let v = psi.samples()[0];
    assert!((v.re - std::f64::consts::E).abs() < 1e-12, "psi(0) = {v}");
    assert!(v.im.abs() < 1e-12);
}

#[test]
fn weight_modulus_peak_matches_closed_form() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let group = Group::weighted(
        Cocycle::from_derivative(flow, CircleFunction::cosine(space)).unwrap(),
    );
    // max | |psi_t| - 1 | = e^{2 sin(t/2)} - 1 = e^{sqrt 2} - 1 at t = pi/2.
    let r = koop::verify::unitary_modulus_residual(&group, std::f64::consts::FRAC_PI_2).unwrap();
    assert!(
        rel_close(r, 3.1132503787829267, 1e-12),
        "modulus residual {r}"
    );
}

// ---- uniqueness of the cocycle for a given derivative ----

#[test]
fn quadrature_route_agrees_with_closed_form() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let zeta = CircleFunction::cosine(space);
    let worst = uniqueness_crosscheck(flow, &zeta, &[0.3, 1.0, 2.7, -1.4]).unwrap();
    assert!(worst < 1e-12, "crosscheck {worst}");
}

// ---- difference quotients ----

#[test]
fn difference_scheme_orders_are_exact() {
    let space = space64();
    let group = Group::koopman(RotationFlow::new(space));
    let f = CircleFunction::character(space, 1).unwrap();
    let exact = group.generator_exact(&f).unwrap();
    // central at h = 0.1 on e_1: error = |sin(h)/h - 1| = 1.665834e-3
    let central = estimate_generator(&group, &f, 1e-1, DiffMethod::Central).unwrap();
    let ec = central.value.sub(&exact).unwrap().norm_l2();
    assert!(rel_close(ec, 1.6658335317184525e-3, 1e-9), "central {ec}");
    // richardson at h = 0.1: error = |(8 sin(h/2) - sin(h))/(3h) - 1| = 2.0827e-7
    let rich = estimate_generator(&group, &f, 1e-1, DiffMethod::Richardson4).unwrap();
    let er = rich.value.sub(&exact).unwrap().norm_l2();
    assert!(rel_close(er, 2.0827133850875867e-7, 1e-6), "richardson {er}");
}

// ---- rank-one affine group ----

#[test]
fn affine_two_norm_matches_rank_one_formula() {
    let space = space64();
    let half = CircleFunction::indicator(space, |x| x < std::f64::consts::PI);
    let complement = CircleFunction::one(space).sub(&half).unwrap();
    let group = Group::affine_rank_one(half, complement).unwrap();
    // For U_t = I + t u v^H with u ⊥ v and s = ||u|| ||v|| = 1/2 at mu = 1/2:
    // sigma_max = (sqrt(t^2 s^2 + 4) + |t| s) / 2 = 1.2807764064044151 at t = 1.
    let m = operator_matrix(&group, 1.0).unwrap();
    let sv = m.two_norm();
    assert!(rel_close(sv, 1.2807764064044151, 1e-12), "sigma {sv}");
}

// ---- multiplier counterexample ----

#[test]
fn multiplier_leibniz_defect_is_exactly_two() {
    let space = space64();
    let group = Group::multiplier(space, |k| Complex64::new(0.0, (k * k) as f64));
    let e1 = CircleFunction::character(space, 1).unwrap();
    let r = derivation_residual(|f| group.generator_exact(f), &e1, &e1).unwrap();
    // A(e_1^2) = 4i e_2 against 2 * e_1 * (i e_1) = 2i e_2: defect |4i - 2i| = 2.
    assert!(rel_close(r, 2.0, 1e-12), "defect {r}");
}

// ---- coboundaries and the transfer equation ----

#[test]
fn coboundary_value_and_derivative_residuals() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let theta = CircleFunction::constant(space, Complex64::new(2.0, 0.0))
        .add(&CircleFunction::character(space, 1).unwrap())
        .unwrap();
    let cocycle = Cocycle::coboundary(flow, theta).unwrap();
    // psi_pi(0) = theta(pi)/theta(0) = (2 - 1)/(2 + 1) = 1/3.
    let v = cocycle.psi(std::f64::consts::PI).samples()[0];
    assert!((v.re - 1.0 / 3.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    let frozen = [
        (1e-1, 2.885949559667654e-2),
        (1e-2, 2.8867433272044183e-3),
        (1e-3, 2.886751265819048e-4),
    ];
    for (t, expect) in frozen {
        let r = cocycle.derivative_residual(t).unwrap();
        assert!(rel_close(r, expect, 1e-6), "t={t}: residual {r}");
    }
}

#[test]
fn transfer_solution_for_cosine_derivative() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let zeta = CircleFunction::cosine(space);
    match solve_transfer_function(flow, &zeta, 1e-9).unwrap() {
        TransferOutcome::Coboundary(sol) => {
            assert_eq!(sol.winding, 0);
            // Theta = sin, so theta = e^{sin}; check against samples.
            let expect = CircleFunction::from_fn(space, |x| {
                Complex64::new(x.sin().exp(), 0.0)
            })
            .unwrap();
            assert!(sol.theta.sub(&expect).unwrap().norm_sup() < 1e-12);
        }
        TransferOutcome::Obstructed(rep) => panic!("unexpected obstruction {rep:?}"),
    }
}

// ---- ergodic averaging ----

#[test]
fn sliding_average_of_first_character() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let e1 = CircleFunction::character(space, 1).unwrap();
    let avg = sliding_average(flow, &e1, std::f64::consts::PI).unwrap();
    // |(e^{i pi} - 1)/(i pi)| = 2/pi everywhere.
    let expect = 2.0 / std::f64::consts::PI;
    assert!(
        rel_close(avg.norm_sup(), expect, 1e-12),
        "sup {}",
        avg.norm_sup()
    );
    assert!(rel_close(avg.norm_l2(), expect, 1e-12));
}

// ---- norm bound ----

#[test]
fn norm_bound_closed_form_value() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let group = Group::weighted(
        Cocycle::from_derivative(flow, CircleFunction::cosine(space)).unwrap(),
    );
    let t = space.commensurate_time(4);
    let check = weighted_norm_bound(&group, t).unwrap();
    // lhs = max psi^2 = e^{4 sin(t/2)} at the even commensurate time 2 pi / 16.
    assert!(
        rel_close(check.lhs, 2.1822605477807073, 1e-11),
        "lhs {}",
        check.lhs
    );
    assert_eq!(check.bound_excess, 0.0);
    assert!(
        check.equality_residual <= 1e-8 * check.rhs,
        "equality residual {}",
        check.equality_residual
    );
}

// ---- growth envelopes ----

#[test]
fn growth_rates_for_three_derivatives() {
    let space = space64();
    let flow = RotationFlow::new(space);
    let even_times: Vec<f64> = [2i64, 4, 8, 12, 16, 24, 32]
        .iter()
        .map(|&m| space.commensurate_time(m))
        .collect();

    // zeta = 1: ||U_t||_{inf->inf} = e^t exactly, so (M, omega) = (1, 1).
    let constant = Group::weighted(
        Cocycle::from_derivative(flow, CircleFunction::one(space)).unwrap(),
    );
    let fit = linf_growth_fit(&constant, &even_times).unwrap();
    assert!((fit.omega - 1.0).abs() < 1e-3, "omega {}", fit.omega);
    assert!((fit.m_bound - 1.0).abs() < 1e-3, "M {}", fit.m_bound);
    assert!(fit.certifies());

    // zeta = cos: ||U_t||_{inf->inf} = e^{2 |sin(t/2)|} on the even grid.
    let cosine = Group::weighted(
        Cocycle::from_derivative(flow, CircleFunction::cosine(space)).unwrap(),
    );
    for &t in &even_times {
        let n = operator_matrix(&cosine, t).unwrap().sup_norm();
        let closed = (2.0 * (t / 2.0).sin().abs()).exp();
        assert!(rel_close(n, closed, 1e-9), "norm {n} vs {closed}");
    }
    let fit = linf_growth_fit(&cosine, &even_times).unwrap();
    assert!(fit.certifies());
    assert!(fit.omega <= 1.0 + 1e-9, "omega {}", fit.omega);

    // koopman permutations: every norm is 1, so (M, omega) = (1, 0).
    let koopman = Group::koopman(flow);
    let fit = linf_growth_fit(&koopman, &even_times).unwrap();
    assert!(fit.omega < 1e-6 && (fit.m_bound - 1.0).abs() < 1e-6);
}

// ---- unbounded derivative study ----

#[test]
fn truncation_sup_norms_match_partial_sums() {
    let study = unbounded_weight_study(&[16, 64, 256], &[1e-2, 1e-3]).unwrap();
    let frozen_sups = [
        9.901741791572334,
        17.712215025026815,
        29.65070864470989,
    ];
    for (row, expect) in study.rows.iter().zip(frozen_sups) {
        assert!(
            rel_close(row.sup_norm, expect, 1e-9),
            "band {}: sup {}",
            row.band,
            row.sup_norm
        );
    }
    assert!(
        rel_close(study.sup_growth, 2.994494228272695, 1e-6),
        "growth {}",
        study.sup_growth
    );

    let frozen_remainders = [
        (16usize, [9.828539206644124e-2, 9.604651424323988e-3]),
        (64, [2.171155279955346e-1, 2.0982122611622946e-2]),
        (256, [5.113914718064437e-1, 5.186456332120882e-2]),
    ];
    for (row, (band, expects)) in study.rows.iter().zip(frozen_remainders) {
        assert_eq!(row.band, band);
        for ((t, r), expect) in row.remainders.iter().zip(expects) {
            assert!(rel_close(*r, expect, 1e-9), "band {band}: r {r}");
            // the remainder bound r <= C t with the single constant C = 60
            assert!(*r <= 60.0 * t, "band {band}: r {r} at t {t}");
        }
    }
    assert!(study.max_ratio < 60.0, "ratio {}", study.max_ratio);
    assert!(study.sup_growth >= 2.0);
}

// ---- suspension flow ----

#[test]
fn suspension_strip_and_holder_scaling() {
    let space = SpecialFlowSpace::constant_roof(512, 1.0, 1000, 0.99).unwrap();
    let flow = SpecialFlow::new(space, 0.6180339887498949).unwrap();
    assert_eq!(flow.base_steps(), 316);
    let times = [0.005, 0.01, 0.025, 0.05, 0.1];
    let mut pairs = Vec::new();
    for &t in &times {
        let diff = strip_symmetric_difference(&flow, 0.3, 0.5, t).unwrap();
        assert!(
            (diff.measure - 2.0 * t).abs() < 1e-12,
            "t={t}: measure {}",
            diff.measure
        );
        pairs.push((t, diff.measure.sqrt()));
    }
    let fit = fit_power_law(&pairs).unwrap();
    assert!((fit.exponent - 0.5).abs() < 1e-9, "alpha {}", fit.exponent);
    assert!(
        rel_close(fit.constant, std::f64::consts::SQRT_2, 1e-9),
        "constant {}",
        fit.constant
    );
}

// ---- rotation continuity exponent ----

#[test]
fn rotation_modulus_power_law() {
    let space = space64();
    let group = Group::koopman(RotationFlow::new(space));
    let f = CircleFunction::character(space, 1).unwrap();
    let pairs = koop::verify::orbit_continuity(&group, &f, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
    let fit = fit_power_law(&pairs).unwrap();
    assert!(
        rel_close(fit.exponent, 0.9999455295728051, 1e-9),
        "alpha {}",
        fit.exponent
    );
}
