use super::*;
use alloc::vec;
use proptest::prelude::*;

fn solve(p: &FrequencyProtocol) -> ScalingSolution {
    solve_ermakov(p, &SolverSettings::default()).unwrap()
}

#[test]
fn constant_protocol_is_a_fixed_point() {
    let p = FrequencyProtocol::constant(1.3, 7.0).unwrap();
    let s = solve(&p);
    assert!(s.b().iter().all(|&b| b == 1.0));
    assert!(s.bdot().iter().all(|&v| v == 0.0));
    assert_eq!(s.q_star_final().unwrap(), 1.0);
    assert_eq!(s.ermakov_residual(), 0.0);
}

#[test]
fn sudden_quench_matches_closed_form() {
    let (w0, w1) = (1.0, 2.5);
    let p = FrequencyProtocol::sudden_quench(w0, w1, 6.0).unwrap();
    let s = solve(&p);
    let expected_q = (w1 * w1 + w0 * w0) / (2.0 * w0 * w1);
    for k in 1..=1000 {
        let t = 6.0 * k as f64 / 1000.0;
        let pt = s.at(t).unwrap();
        let (sn, cs) = (libm::sin(w1 * t), libm::cos(w1 * t));
        let b2 = cs * cs + (w0 / w1) * (w0 / w1) * sn * sn;
        assert!((pt.b * pt.b - b2).abs() < 1e-10, "t={t}");
        // the candidate satisfies the Ermakov equation: check b̈ + ω₁² b − ω₀²/b³ via its
        // closed-form second derivative
        let b = b2.sqrt();
        let db2 = 2.0 * w1 * sn * cs * ((w0 / w1) * (w0 / w1) - 1.0);
        let ddb2 = 2.0 * w1 * w1 * (cs * cs - sn * sn) * ((w0 / w1) * (w0 / w1) - 1.0);
        let bd = db2 / (2.0 * b);
        let bdd = (ddb2 - 2.0 * bd * bd) / (2.0 * b);
        assert!((bdd + w1 * w1 * b - w0 * w0 / (b * b * b)).abs() < 1e-12);
        assert!((s.q_star(t).unwrap() - expected_q).abs() < 1e-10);
    }
    assert_eq!(s.q_star(0.0).unwrap(), 1.0);
}

#[test]
fn q_star_is_one_at_start() {
    for p in [
        FrequencyProtocol::linear_ramp(1.0, 3.0, 0.5).unwrap(),
        FrequencyProtocol::smooth_ramp(2.0, 0.7, 4.0).unwrap(),
        FrequencyProtocol::sudden_quench(2.0, 0.7, 4.0).unwrap(),
    ] {
        assert_eq!(solve(&p).q_star(0.0).unwrap(), 1.0);
    }
}

#[test]
fn slow_ramp_is_adiabatic() {
    let p = FrequencyProtocol::smooth_ramp(1.0, 0.5, 400.0).unwrap();
    let s = solve_ermakov(&p, &SolverSettings::with_steps(40_000)).unwrap();
    let q = s.q_star_final().unwrap();
    assert!(q >= 1.0 - 1e-12 && q - 1.0 < 1e-6, "Q* = {q}");
    let (b_ad, _) = adiabatic_reference(&p, 400.0).unwrap();
    assert!((s.b()[s.len() - 1] - b_ad).abs() < 1e-3);
}

#[test]
fn sudden_factor_examples() {
    assert_eq!(q_star_sudden(1.7, 1.7).unwrap(), 1.0);
    assert_eq!(q_star_sudden(1.0, 2.0).unwrap(), 1.25);
    assert_eq!(q_star_sudden(2.0, 1.0).unwrap(), 1.25);
    assert!(q_star_sudden(0.0, 1.0).is_err());
    assert!(q_star_sudden(1.0, -2.0).is_err());
}

#[test]
fn adiabatic_reference_examples() {
    let down = FrequencyProtocol::linear_ramp(4.0, 1.0, 1.0).unwrap();
    assert_eq!(adiabatic_reference(&down, 0.0).unwrap(), (1.0, 1.0));
    assert_eq!(adiabatic_reference(&down, 1.0).unwrap(), (2.0, 0.25));
    let up = FrequencyProtocol::linear_ramp(1.0, 4.0, 1.0).unwrap();
    assert_eq!(adiabatic_reference(&up, 1.0).unwrap(), (0.5, 4.0));
}

#[test]
fn inverted_trap_has_undefined_q_star() {
    let p = FrequencyProtocol::sampled(2.0, vec![1.0, -0.5, -0.5, 1.0]).unwrap();
    let s = solve(&p);
    match s.q_star(1.0) {
        Err(ErmakovError::UndefinedQStar { omega_sq, .. }) => assert!(omega_sq < 0.0),
        other => panic!("expected undefined Q*, got {other:?}"),
    }
    assert!(adiabatic_reference(&p, 1.0).is_err());
    assert!(s.q_star_final().is_ok());
}

#[test]
fn divergence_is_reported_with_time() {
    let p = FrequencyProtocol::sampled(10.0, vec![1.0, -100.0, -100.0, -100.0, 1.0]).unwrap();
    match solve_ermakov(&p, &SolverSettings::default()) {
        Err(ErmakovError::Diverged { t, b }) => {
            assert!(t > 0.0 && t < 10.0);
            assert!(b > 1e6);
        }
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn bad_settings_are_rejected() {
    let p = FrequencyProtocol::constant(1.0, 1.0).unwrap();
    for control in [
        StepControl::Steps(0),
        StepControl::Step(-1.0),
        StepControl::Tolerance(0.0),
        StepControl::Tolerance(2.0),
    ] {
        let settings = SolverSettings {
            control,
            ..SolverSettings::default()
        };
        assert!(matches!(
            solve_ermakov(&p, &settings),
            Err(ErmakovError::InvalidSettings(_))
        ));
    }
    assert!(s_out_of_range());
}

fn s_out_of_range() -> bool {
    let p = FrequencyProtocol::constant(1.0, 1.0).unwrap();
    let s = solve(&p);
    matches!(s.at(1.5), Err(ErmakovError::OutOfRange { .. }))
        && matches!(s.at(-0.1), Err(ErmakovError::OutOfRange { .. }))
}

#[test]
fn tolerance_control_converges() {
    let p = FrequencyProtocol::linear_ramp(1.0, 2.0, 3.0).unwrap();
    let settings = SolverSettings {
        control: StepControl::Tolerance(1e-10),
        ..SolverSettings::default()
    };
    let s = solve_ermakov(&p, &settings).unwrap();
    let reference = solve_ermakov(&p, &SolverSettings::with_steps(100_000)).unwrap();
    let last = s.len() - 1;
    assert!((s.b()[last] - reference.b()[reference.len() - 1]).abs() < 1e-9);
    let step = solve_ermakov(
        &p,
        &SolverSettings {
            control: StepControl::Step(0.07),
            ..SolverSettings::default()
        },
    )
    .unwrap();
    assert_eq!(step.len(), 44);
    assert_eq!(step.time(43), 3.0);
}

#[test]
fn residual_converges_at_fourth_order() {
    let p = FrequencyProtocol::linear_ramp(1.0, 0.5, 4.0).unwrap();
    let coarse = solve_ermakov(&p, &SolverSettings::with_steps(200)).unwrap();
    let fine = solve_ermakov(&p, &SolverSettings::with_steps(400)).unwrap();
    let ratio = coarse.ermakov_residual() / fine.ermakov_residual();
    assert!(ratio > 12.0 && ratio < 20.0, "ratio = {ratio}");
    assert!(solve(&p).ermakov_residual() < 1e-10);
}

#[test]
fn interpolation_between_grid_points_is_accurate() {
    let p = FrequencyProtocol::linear_ramp(1.0, 3.0, 2.0).unwrap();
    let coarse = solve_ermakov(&p, &SolverSettings::with_steps(2000)).unwrap();
    let fine = solve_ermakov(&p, &SolverSettings::with_steps(2000 * 16)).unwrap();
    for k in 0..97 {
        let t = 2.0 * (k as f64 + 0.37) / 97.0;
        let a = coarse.at(t).unwrap();
        let b = fine.at(t).unwrap();
        assert!(
            (a.b - b.b).abs() < 1e-9,
            "{} {}",
            a.b - b.b,
            a.bdot - b.bdot
        );
        assert!((a.bdot - b.bdot).abs() < 1e-8);
    }
}

// Moments X = ⟨x²⟩, Y = ⟨{x,p}⟩, Z = ⟨p²⟩ of a single oscillator evolve
// linearly; integrate them directly as an independent oracle for ⟨H(t)⟩.
fn gaussian_energy_oracle(p: &FrequencyProtocol, m: f64, x0: [f64; 3], t_end: f64) -> f64 {
    let n = 20_000;
    let h = t_end / n as f64;
    let f = |t: f64, s: [f64; 3]| {
        let w2 = p.omega_sq_right(t);
        [
            s[1] / m,
            2.0 * s[2] / m - 2.0 * m * w2 * s[0],
            -m * w2 * s[1],
        ]
    };
    let mut s = x0;
    for k in 0..n {
        let t = k as f64 * h;
        let add =
            |a: [f64; 3], b: [f64; 3], c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
        let k1 = f(t, s);
        let k2 = f(t + 0.5 * h, add(s, k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, add(s, k2, 0.5 * h));
        let k4 = f(t + h, add(s, k3, h));
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    s[2] / (2.0 * m) + 0.5 * m * p.omega_sq(t_end) * s[0]
}

#[test]
fn thermal_energy_matches_gaussian_oracle() {
    let (m, w0, e0) = (1.3, 1.1, 2.4);
    let p = FrequencyProtocol::linear_ramp(w0, 2.3, 1.7).unwrap();
    let s = solve(&p);
    let moments = InitialMoments::thermal(e0, w0, m, 1.0);
    // thermal: kinetic = potential, so Z = m E₀ and X = E₀/(mω₀²)
    let x0 = [e0 / (m * w0 * w0), 0.0, m * e0];
    for &t in &[0.3, 0.9, 1.7] {
        let oracle = gaussian_energy_oracle(&p, m, x0, t);
        let formula = nonadiabatic_energy(&s, t, &moments).unwrap();
        assert!(
            (oracle - formula).abs() < 1e-9 * oracle,
            "t={t}: {oracle} vs {formula}"
        );
    }
}

#[test]
fn thermal_energy_equals_q_star_times_adiabatic() {
    let p = FrequencyProtocol::smooth_ramp(1.0, 0.4, 2.0).unwrap();
    let s = solve(&p);
    let moments = InitialMoments::thermal(3.0, 1.0, 1.0, 1.0);
    for k in 0..=40 {
        let t = 2.0 * k as f64 / 40.0;
        let (_, ratio) = adiabatic_reference(&p, t).unwrap();
        let lhs = nonadiabatic_energy(&s, t, &moments).unwrap();
        let rhs = s.q_star(t).unwrap() * ratio * 3.0;
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }
}

#[test]
fn constant_protocol_conserves_energy_even_when_squeezed() {
    let p = FrequencyProtocol::constant(1.0, 2.0).unwrap();
    let s = solve(&p);
    let m = 1.0;
    let moments = InitialMoments {
        energy: 1.5,
        position_sq: 1.2,
        squeezing: 0.8,
        mass: m,
        hbar: 1.0,
    };
    // Z from E = Z/2m + mω²X/2
    let x0 = [1.2, 0.8, 2.0 * m * (1.5 - 0.5 * m * 1.2)];
    for &t in &[0.0, 0.01, 1.0, 2.0] {
        let e = nonadiabatic_energy(&s, t, &moments).unwrap();
        assert_eq!(e, 1.5);
        if t > 0.0 {
            assert!((gaussian_energy_oracle(&p, m, x0, t) - 1.5).abs() < 1e-10);
        }
    }
}

#[test]
fn squeezing_term_sets_initial_slope_after_quench() {
    let (w0, w1) = (1.0, 1.5);
    let p = FrequencyProtocol::sudden_quench(w0, w1, 1.0).unwrap();
    let s = solve_ermakov(&p, &SolverSettings::with_steps(100_000)).unwrap();
    let squeezing = 0.6;
    let with = InitialMoments {
        energy: 1.0,
        position_sq: 0.9,
        squeezing,
        mass: 1.0,
        hbar: 1.0,
    };
    let without = InitialMoments {
        squeezing: 0.0,
        ..with
    };
    let (t1, t2) = (1e-4, 2e-4);
    let slope = |m: &InitialMoments| {
        (nonadiabatic_energy(&s, t2, m).unwrap() - nonadiabatic_energy(&s, t1, m).unwrap())
            / (t2 - t1)
    };
    let extra = slope(&with) - slope(&without);
    let expected = 0.5 * (w0 * w0 - w1 * w1) * squeezing;
    assert!(
        (extra - expected).abs() < 1e-3 * expected.abs(),
        "{extra} vs {expected}"
    );
}

#[test]
fn monotone_ramps_between_sudden_and_adiabatic_limits() {
    let (w0, wf) = (1.0, 2.0);
    let q_sq = q_star_sudden(w0, wf).unwrap();
    let fast = solve(&FrequencyProtocol::linear_ramp(w0, wf, 1e-3).unwrap());
    assert!((fast.q_star_final().unwrap() - q_sq).abs() < 1e-5);
    let slow = solve_ermakov(
        &FrequencyProtocol::smooth_ramp(w0, wf, 300.0).unwrap(),
        &SolverSettings::with_steps(30_000),
    )
    .unwrap();
    assert!((slow.q_star_final().unwrap() - 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn q_star_bounded_by_one_and_sudden_value(
        w0 in 0.3f64..3.0,
        ratio in 0.2f64..5.0,
        tau in 0.01f64..20.0,
        smooth in any::<bool>(),
    ) {
        let wf = w0 * ratio;
        let p = if smooth {
            FrequencyProtocol::smooth_ramp(w0, wf, tau).unwrap()
        } else {
            FrequencyProtocol::linear_ramp(w0, wf, tau).unwrap()
        };
        let s = solve_ermakov(&p, &SolverSettings::with_steps(4000)).unwrap();
        let q_sq = q_star_sudden(w0, wf).unwrap();
        for k in (0..s.len()).step_by(97) {
            let q = s.q_star_at(k).unwrap();
            prop_assert!(q >= 1.0 - 1e-9);
        }
        prop_assert!(s.q_star_final().unwrap() <= q_sq + 1e-9);
    }

    #[test]
    fn constant_segment_keeps_q_star(w0 in 0.3f64..3.0, w1 in 0.3f64..3.0, tau in 0.5f64..10.0) {
        let s = solve(&FrequencyProtocol::sudden_quench(w0, w1, tau).unwrap());
        let q_sq = q_star_sudden(w0, w1).unwrap();
        for k in (1..s.len()).step_by(211) {
            prop_assert!((s.q_star_at(k).unwrap() - q_sq).abs() < 1e-8);
        }
    }
}
