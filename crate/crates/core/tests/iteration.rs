//! Engine behaviour on the real problem families and on synthetic problems
//! with a prescribed iteration-matrix spectrum.

use petviashvili::diagnostics::{top_eigenvalues, IterationMatrix};
use petviashvili::iterate::{classical_step, newton_solve, residual, solve, stabilized_step, DivergenceReason};
use petviashvili::problems::{
    gaussian_seed, perturbed_seed, CubicSign, DenseQuadratic, NlsGroundState, NlsSoliton, Potential,
    SolitonParameters,
};
use petviashvili::{
    optimal_gamma, Field, Grid1D, IterationConfig, ProblemModel, ScalarKind, StabilizingFactor, StopRule,
    Termination,
};

fn line() -> Grid1D {
    Grid1D::new(50.0, 512).unwrap()
}

fn ground_state() -> NlsGroundState {
    NlsGroundState::new(&Potential::sech_squared(), 1.3, line(), CubicSign::Minus).unwrap()
}

fn soliton() -> NlsSoliton {
    NlsSoliton::new(SolitonParameters::new(1.0, 1.0, 1.0), line()).unwrap()
}

fn optimal(problem: &dyn ProblemModel) -> StabilizingFactor {
    StabilizingFactor::petviashvili(optimal_gamma(problem.degree()).unwrap(), problem).unwrap()
}

fn unit(n: usize, k: usize, grid: Grid1D) -> Field {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    Field::real(grid, e).unwrap()
}

#[test]
fn ground_state_residual_decays_monotonically() {
    let p = ground_state();
    let seed = gaussian_seed(line(), 1.0, 1.0, false, ScalarKind::Real).unwrap();
    let r = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default()).unwrap();
    assert!(r.converged());
    assert!(r.iterations() <= 40, "{} iterations", r.iterations());
    assert!(r.trace.tail_is_monotone(10));
    assert!(r.final_factor_discrepancy().unwrap() <= 1e-12);
}

#[test]
fn soliton_gauge_perturbation_converges_with_small_discrepancy() {
    let m = soliton();
    let seed = perturbed_seed(&m.exact_solution(), 0.2, 0.0);
    // The rounding floor of the residual here is about eps |L| |u| ~ 2e-13.
    let cfg = IterationConfig {
        residual_tolerance: 1e-12,
        stop_rule: StopRule::ResidualAndFactor,
        ..IterationConfig::default()
    };
    let r = solve(&m, Some(&optimal(&m)), &seed, &cfg).unwrap();
    assert!(r.converged());
    assert!(r.final_residual() < 1e-12);
    assert!(r.final_factor_discrepancy().unwrap() <= cfg.factor_tolerance);
}

#[test]
fn contraction_ratio_matches_subdominant_eigenvalue() {
    // Rate law: with q = -p the asymptotic ratio RE_{n+1}/RE_n is the
    // largest eigenvalue of S below p. Its eigenvector is odd, so the seed
    // must not be even.
    let p = ground_state();
    let x = line().nodes();
    let seed = Field::real(line(), x.iter().map(|x| (-(x - 0.3) * (x - 0.3)).exp()).collect()).unwrap();
    let r = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default()).unwrap();
    let res = r.trace.residuals();
    let n = res.len();
    let ratio = (res[n - 6] / res[n - 10]).powf(0.25);
    let s = IterationMatrix::new(&p, &r.solution).unwrap();
    let spec = top_eigenvalues(&s, 2).unwrap();
    let lambda2 = spec.moduli[1];
    assert!((ratio - lambda2).abs() <= 0.02, "ratio {ratio} vs {lambda2}");
}

#[test]
fn one_step_scaling_on_the_soliton() {
    let m = soliton();
    let u = m.exact_solution();
    let f = optimal(&m);
    for t in [0.5, 2.0] {
        let (next, s) = stabilized_step(&m, &f, &u.scaled(t)).unwrap();
        assert!((s - t.powf(f.q())).abs() <= 1e-9 * s);
        assert!(next.sub(&u).norm() <= 1e-8 * u.norm());
        let classical = classical_step(&m, &u.scaled(t));
        assert!(classical.sub(&u.scaled(t.powi(3))).norm() <= 1e-8 * t.powi(3) * u.norm());
    }
}

#[test]
fn classical_iteration_grows_like_t_to_the_p_to_the_n() {
    let m = soliton();
    let u = m.exact_solution().scaled(1.01);
    let r = solve(&m, None, &u, &IterationConfig::default().with_max_iterations(50)).unwrap();
    assert!(matches!(r.trace.termination, Termination::Diverged(_)));
    let norms: Vec<f64> = r.trace.records.iter().map(|r| r.norm).collect();
    let base = m.exact_solution().norm();
    for (n, w) in norms.iter().enumerate().take(4) {
        let predicted = 1.01f64.powf(3f64.powi(n as i32));
        assert!((w / base / predicted - 1.0).abs() <= 1e-6, "n = {n}");
    }
}

#[test]
fn scaled_soliton_trips_the_guard_within_twenty_steps() {
    let m = soliton();
    let r = solve(&m, None, &m.exact_solution().scaled(1.1), &IterationConfig::default()).unwrap();
    assert!(matches!(
        r.trace.termination,
        Termination::Diverged(DivergenceReason::ResidualBlowup | DivergenceReason::NormBlowup | DivergenceReason::NonFinite)
    ));
    assert!(r.iterations() <= 20);
}

#[test]
fn harmful_direction_leaves_a_persistent_error() {
    // S has an eigenvalue 1 whose eigenvector is not a symmetry generator:
    // an error component along it is not damped (the iteration only
    // contracts it at second order), while one along a contracting
    // eigendirection is removed.
    let sol: Vec<f64> = (0..8).map(|j| 1.0 + 0.1 * j as f64).collect();
    let q = DenseQuadratic::new(sol, &[1.0, 0.5, -0.3, 0.2, 0.1, -0.05, 0.02]).unwrap();
    let u = q.solution();
    let grid = *u.domain().as_line().unwrap();
    let f = optimal(&q);
    let cfg = IterationConfig::default().with_max_iterations(200);
    let delta = 1e-3;

    let mut harmful = u.clone();
    harmful.axpy(delta, &unit(8, 1, grid));
    let r = solve(&q, Some(&f), &harmful, &cfg).unwrap();
    let err = r.solution.sub(&u).norm();
    assert!(err > 0.05 * delta && err < 10.0 * delta, "harmful error {err:e}");

    let mut benign = u.clone();
    benign.axpy(delta, &unit(8, 2, grid));
    let r = solve(&q, Some(&f), &benign, &cfg).unwrap();
    assert!(r.converged());
    assert!(r.solution.sub(&u).norm() <= 1e-10);
}

#[test]
fn newton_from_a_converged_iterate_finishes_immediately() {
    let p = ground_state();
    let seed = gaussian_seed(line(), 1.0, 1.0, false, ScalarKind::Real).unwrap();
    let petvi = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default().with_tolerance(1e-10)).unwrap();
    let cfg = IterationConfig::default().with_tolerance(1e-13);
    let newton = newton_solve(&p, &petvi.solution, &cfg).unwrap();
    assert!(newton.converged());
    assert!(newton.iterations() <= 2, "{} steps", newton.iterations());
}

#[test]
fn newton_recovers_a_soliton_orbit_element() {
    let m = soliton();
    let exact = m.exact_solution();
    let seed = perturbed_seed(&exact, 0.05, 0.05);
    let newton = newton_solve(&m, &seed, &IterationConfig::default().with_tolerance(1e-12)).unwrap();
    assert!(newton.converged(), "{:?}", newton.trace.termination);
    // The translation part of the seed moves the modulus, so compare with
    // the matched orbit element rather than the centered profile.
    let fit = petviashvili::diagnostics::orbit_match(&newton.solution, m.params()).unwrap();
    assert!(fit.modulus_sup_distance.unwrap() <= 1e-8);
    assert!(fit.sup_distance.unwrap() <= 1e-6);
}

#[test]
fn newton_converges_quadratically() {
    let p = ground_state();
    let seed = gaussian_seed(line(), 1.0, 1.0, false, ScalarKind::Real).unwrap();
    let mut start = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default().with_max_iterations(6))
        .unwrap()
        .solution;
    start.scale(1.02);
    let newton = newton_solve(&p, &start, &IterationConfig::default().with_tolerance(1e-13)).unwrap();
    assert!(newton.converged());
    let order = newton.observed_order.expect("order estimate");
    assert!(order >= 1.7, "observed order {order}");
}

#[test]
fn newton_finds_the_double_well_antisymmetric_state() {
    let grid = line();
    let p = NlsGroundState::new(&Potential::double_well(6.0, 1.0), 1.43, grid, CubicSign::Plus).unwrap();
    let seed = gaussian_seed(grid, 2.0, 2.0, true, ScalarKind::Real).unwrap();
    let newton = newton_solve(&p, &seed, &IterationConfig::default().with_tolerance(1e-11)).unwrap();
    assert!(newton.converged());
    let v = newton.solution.as_real().unwrap();
    for j in 1..grid.points() {
        assert!((v[j] + v[grid.mirror(j)]).abs() <= 1e-8);
    }
    // Two bumps of opposite sign, one in each well.
    let x = grid.nodes();
    let (jmax, _) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!(x[jmax] > 0.0 && x[jmax] < 2.0);
    assert!(residual(&p, &newton.solution) <= 1e-11);

    // Petviashvili from the odd Gaussian does not reach it.
    let run = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default()).unwrap();
    assert!(!run.converged() || run.solution.sub(&newton.solution).sup_norm() > 1e-2);
}

#[test]
fn literal_sign_ground_state_has_no_positive_factor() {
    let p = NlsGroundState::new(&Potential::sech_squared(), 1.3, line(), CubicSign::Plus).unwrap();
    let seed = gaussian_seed(line(), 1.0, 1.0, false, ScalarKind::Real).unwrap();
    let r = solve(&p, Some(&optimal(&p)), &seed, &IterationConfig::default()).unwrap();
    assert!(matches!(r.trace.termination, Termination::Diverged(DivergenceReason::FactorBreakdown(_))));
}

#[test]
fn history_is_kept_on_request() {
    let m = soliton();
    let cfg = IterationConfig {
        keep_history: true,
        ..IterationConfig::default().with_tolerance(1e-10)
    };
    let r = solve(&m, Some(&optimal(&m)), &perturbed_seed(&m.exact_solution(), 0.1, 0.0), &cfg).unwrap();
    let history = r.trace.history.as_ref().unwrap();
    assert_eq!(history.len(), r.trace.records.len());
    assert_eq!(history.last().unwrap(), &r.solution);
}
