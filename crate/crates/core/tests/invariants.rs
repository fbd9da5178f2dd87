//! Cross-module invariants: sampled identities of the built-in problems,
//! the inner/outer convergence inequalities, and property tests for the
//! scaling behavior of the stationarity measure and vector arithmetic.

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plgda::diagnostics::danskin_gap;
use plgda::gradcheck::{check_gradients, stationarity_norms, DEFAULT_FD_STEP};
use plgda::problem::ProblemSpec;
use plgda::problems::{make_problem, BuiltinProblem};
use plgda::solver::{
    compute_inner_budget, compute_outer_smoothness, inner_ascent, run_oracle_gd, Perturbation,
    PerturbationMode, SafetyFactors,
};
use plgda::Vector;

fn v(entries: &[f64]) -> Vector {
    Vector::new(entries.to_vec()).unwrap()
}

fn sample(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    Vector::new((0..dim).map(|_| rng.random_range(-radius..=radius)).collect()).unwrap()
}

#[test]
fn gradients_match_finite_differences_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        for _ in 0..100 {
            let theta = sample(&mut rng, p.dim_theta, 8.0);
            let alpha = sample(&mut rng, p.dim_alpha, 8.0);
            let r = check_gradients(&p, &theta, &alpha, DEFAULT_FD_STEP).unwrap();
            assert!(
                r.max() <= 1e-5,
                "{which}: finite-difference mismatch {r:?} at ({theta}, {alpha})"
            );
        }
    }
}

#[test]
fn oracle_value_dominates_f_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        let oracle = p.oracle().unwrap();
        for _ in 0..100 {
            let theta = sample(&mut rng, p.dim_theta, 10.0);
            let g = (oracle.g_value)(&theta);
            for _ in 0..100 {
                let alpha = sample(&mut rng, p.dim_alpha, 10.0);
                let f = p.value(&theta, &alpha);
                assert!(
                    g >= f - 1e-10,
                    "{which}: max property violated, g({theta}) = {g} < f = {f} at {alpha}"
                );
            }
        }
    }
}

#[test]
fn argmax_points_are_inner_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        let oracle = p.oracle().unwrap();
        for _ in 0..100 {
            let theta = sample(&mut rng, p.dim_theta, 10.0);
            let astar = (oracle.argmax_point)(&theta);
            assert!(p.alpha_grad(&theta, &astar).norm() <= 1e-10, "{which} at {theta}");
        }
    }
}

#[test]
fn degenerate_theta_gradient_constant_on_argmax_line() {
    let p = make_problem(BuiltinProblem::QuadDegenerate);
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..50 {
        let theta = sample(&mut rng, 1, 5.0);
        let s = 1.0 + theta[0];
        // two points on the argmax line alpha_0 + alpha_1 = 1 + theta
        let split: f64 = rng.random_range(-4.0..=4.0);
        let a1 = v(&[split, s - split]);
        let a2 = v(&[s - split, split]);
        let g1 = p.theta_grad(&theta, &a1);
        let g2 = p.theta_grad(&theta, &a2);
        assert!((g1[0] - g2[0]).abs() <= 1e-12, "{theta}: {} vs {}", g1[0], g2[0]);
    }
}

#[test]
fn pl_sin_inner_objective_is_non_concave() {
    // second difference of x ↦ f(θ, θ + x): concave at 0, convex at π/2
    let p = make_problem(BuiltinProblem::PlSin);
    let theta = v(&[0.7]);
    let phi = |x: f64| p.value(&theta, &v(&[theta[0] + x]));
    let second = |x: f64| {
        let h = 1e-4;
        (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h)
    };
    let at_zero = second(0.0);
    let at_half_pi = second(std::f64::consts::FRAC_PI_2);
    assert!(at_zero < -7.0, "{at_zero}");
    assert!(at_half_pi > 3.0, "{at_half_pi}");
}

/// Linear-rate contraction checked pointwise: gradient ascent at step
/// 1/L22 shrinks the inner optimality gap by at least 1 - mu/L22 per step.
#[test]
fn inner_gap_contracts_at_declared_rate_pointwise() {
    for which in [BuiltinProblem::Quad2d, BuiltinProblem::PlSin] {
        let p = make_problem(which);
        let c = &p.constants;
        let oracle = p.oracle().unwrap();
        let rho = c.rho();
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for _ in 0..5 {
            let theta = sample(&mut rng, p.dim_theta, 3.0);
            let alpha0 = sample(&mut rng, p.dim_alpha, 3.0);
            let k = 400;
            let (_, values) = inner_ascent(&p, &theta, &alpha0, k, 1.0 / c.l22).unwrap();
            let g = (oracle.g_value)(&theta);
            let gap0 = g - values[0];
            for (step, f_k) in values.iter().enumerate() {
                let gap = g - f_k;
                let bound = rho.powi(step as i32) * gap0;
                assert!(
                    gap <= bound + 1e-9 * bound.abs().max(1.0),
                    "{which}: gap {gap} > {bound} at step {step} (theta {theta})"
                );
            }
        }
    }
}

/// The inner budget formula with default safety factors delivers both
/// inner-accuracy bounds across seeded (θ, ε, α0) combinations.
#[test]
fn inner_budget_meets_danskin_tolerance() {
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        let c = &p.constants;
        let oracle = p.oracle().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x_da05 + which.name().len() as u64);
        for _ in 0..20 {
            let theta = sample(&mut rng, p.dim_theta, 3.0);
            let alpha0 = sample(&mut rng, p.dim_alpha, 3.0);
            let epsilon = 10.0_f64.powf(rng.random_range(-3.0..=-0.5));
            let gap0 = (oracle.g_value)(&theta) - p.value(&theta, &alpha0);
            let delta = 4.0 * gap0.max(0.0);
            let k = compute_inner_budget(epsilon, c, delta, SafetyFactors::default()).unwrap();
            let (alpha_k, _) = inner_ascent(&p, &theta, &alpha0, k, 1.0 / c.l22).unwrap();
            let gap = danskin_gap(&p, &theta, &alpha_k).unwrap();
            let alpha_norm = p.alpha_grad(&theta, &alpha_k).norm();
            assert!(
                gap <= epsilon / 4.0,
                "{which}: danskin gap {gap} > eps/4 = {} (K = {k})",
                epsilon / 4.0
            );
            assert!(
                alpha_norm <= epsilon,
                "{which}: inner gradient norm {alpha_norm} > eps = {epsilon} (K = {k})"
            );
        }
    }
}

/// Per-step descent-with-error inequality of perturbed descent on g:
/// g(θ_{t+1}) ≤ g(θ_t) - ‖∇g(θ_t)‖²/(2L) + δ²/(2L).
#[test]
fn perturbed_descent_inequality_every_step() {
    let delta = 0.01;
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        let l_outer = compute_outer_smoothness(&p.constants);
        let run = run_oracle_gd(
            &p,
            1.0 / l_outer,
            500,
            v(&[1.5]),
            Some(Perturbation {
                magnitude: delta,
                mode: PerturbationMode::RandomSphere,
                seed: 11,
            }),
        )
        .unwrap();
        let check = |g_now: f64, grad_now: f64, g_next: f64| {
            let bound = g_now - grad_now * grad_now / (2.0 * l_outer)
                + delta * delta / (2.0 * l_outer);
            assert!(
                g_next <= bound + 1e-9 * g_now.abs().max(1.0),
                "{which}: descent violated, {g_next} > {bound}"
            );
        };
        for pair in run.trace.windows(2) {
            check(pair[0].g_value, pair[0].grad_g_norm, pair[1].g_value);
        }
        let last = run.trace.last().unwrap();
        check(last.g_value, last.grad_g_norm, run.final_g_value);
    }
}

/// Declared constants are honest bounds on every built-in problem: the PL
/// estimate never falls below the declared mu, measured smoothness of g
/// never exceeds l11 + l12²/mu, and the stability ratio never exceeds
/// l12/mu.
#[test]
fn declared_constants_bound_measurements_on_all_builtins() {
    use plgda::diagnostics::{run_diagnostics, DiagnosticsConfig};
    for which in BuiltinProblem::all() {
        let p = make_problem(which);
        let report = run_diagnostics(&p, &DiagnosticsConfig { n_samples: 2000, seed: 1 }).unwrap();
        assert!(report.must_hold_pass, "{which}: {:#?}", report.claims);
        let c = &p.constants;
        assert!(report.mu_hat.unwrap() >= c.mu - 1e-6, "{which}: {report:?}");
        assert!(
            report.g_smoothness_hat.unwrap() <= compute_outer_smoothness(c) + 1e-6,
            "{which}: {report:?}"
        );
        assert!(
            report.stability_ratio_max.unwrap() <= c.l12 / c.mu + 1e-6,
            "{which}: {report:?}"
        );
        for (hat, declared) in [
            (report.l11_hat, c.l11),
            (report.l22_hat, c.l22),
            (report.l12_hat, c.l12),
        ] {
            assert!(hat <= declared + 1e-6, "{which}: {hat} > declared {declared}");
        }
    }
}

#[test]
fn evaluators_are_shareable_across_threads() {
    let p = Arc::new(make_problem(BuiltinProblem::PlSin));
    let theta = v(&[1.0]);
    let alpha = v(&[0.3]);
    let expected = p.value(&theta, &alpha);
    let results: Vec<f64> = std::thread::scope(|scope| {
        (0..4)
            .map(|_| {
                let p = Arc::clone(&p);
                let theta = theta.clone();
                let alpha = alpha.clone();
                scope.spawn(move || {
                    let mut last = 0.0;
                    for _ in 0..1000 {
                        last = p.value(&theta, &alpha);
                    }
                    last
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap())
            .collect()
    });
    assert!(results.iter().all(|&r| r == expected));
}

/// Positively scaling f scales both stationarity norms by the same factor.
fn scaled_quad2d(c: f64) -> ProblemSpec {
    let mut p = make_problem(BuiltinProblem::Quad2d);
    let f = p.eval_f.clone();
    let gt = p.grad_theta.clone();
    let ga = p.grad_alpha.clone();
    p.name = format!("quad-2d-x{c}");
    p.eval_f = Arc::new(move |t: &Vector, a: &Vector| c * f(t, a));
    p.grad_theta = Arc::new(move |t: &Vector, a: &Vector| gt(t, a).scale(c));
    p.grad_alpha = Arc::new(move |t: &Vector, a: &Vector| ga(t, a).scale(c));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stationarity_norms_are_positively_homogeneous(
        c in 0.1f64..10.0,
        theta in -5.0f64..5.0,
        a0 in -5.0f64..5.0,
        a1 in -5.0f64..5.0,
    ) {
        let base = make_problem(BuiltinProblem::Quad2d);
        let scaled = scaled_quad2d(c);
        let t = v(&[theta]);
        let a = v(&[a0, a1]);
        let (nt, na) = stationarity_norms(&base, &t, &a).unwrap();
        let (st, sa) = stationarity_norms(&scaled, &t, &a).unwrap();
        let tol = 1e-12;
        prop_assert!((st - c * nt).abs() <= tol * (c * nt).abs().max(1e-300));
        prop_assert!((sa - c * na).abs() <= tol * (c * na).abs().max(1e-300));
    }

    // exactness on representable values: integer entries keep vector sums
    // exact, so associativity holds bitwise
    #[test]
    fn vector_addition_associative_on_integers(
        a in proptest::collection::vec(-1_048_576i32..1_048_576, 1..6),
        b_seed in 0u64..u64::MAX,
    ) {
        let dim = a.len();
        let mut rng = ChaCha8Rng::seed_from_u64(b_seed);
        let to_vec = |ints: &[i32]| Vector::new(ints.iter().map(|&x| x as f64).collect()).unwrap();
        let va = to_vec(&a);
        let vb = Vector::new((0..dim).map(|_| rng.random_range(-1_048_576..1_048_576) as f64).collect()).unwrap();
        let vc = Vector::new((0..dim).map(|_| rng.random_range(-1_048_576..1_048_576) as f64).collect()).unwrap();
        prop_assert_eq!(va.add(&vb).add(&vc), va.add(&vb.add(&vc)));
        prop_assert_eq!(va.add(&vb), vb.add(&va));
    }

    // power-of-two scaling commutes with rounding, so homogeneity of the
    // norm is exact
    #[test]
    fn vector_norm_exactly_homogeneous_under_pow2_scaling(
        entries in proptest::collection::vec(-1e6f64..1e6, 1..6),
        k in -8i32..8,
    ) {
        let c = 2.0f64.powi(k);
        let vec = Vector::new(entries).unwrap();
        prop_assert_eq!(vec.scale(c).norm(), c * vec.norm());
        prop_assert_eq!(vec.scale(c).scale(1.0 / c), vec);
    }
}
