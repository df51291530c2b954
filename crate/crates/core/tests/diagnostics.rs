//! Spectra, hypothesis reports, error decomposition and orbit identification
//! on converged states.

use std::f64::consts::PI;

use petviashvili::diagnostics::{
    decompose_error, fit_phase_line, full_spectrum, hypothesis_report, jacobian_f_action, orbit_match,
    symmetry_generators, top_eigenvalues, IterationJacobian, IterationMatrix,
};
use petviashvili::iterate::{newton_solve, solve};
use petviashvili::linalg::{krylov_eigenpairs, IdentityOperator, KrylovOptions};
use petviashvili::problems::{
    exact_soliton_profile, gaussian_seed, perturbed_seed, BenjaminLump, CubicSign, NlsGroundState, NlsSoliton,
    Potential, SolitonParameters,
};
use petviashvili::{optimal_gamma, Complex64, Grid1D, Grid2D, IterationConfig, ProblemModel, ScalarKind, StabilizingFactor};

fn soliton(m: usize) -> NlsSoliton {
    NlsSoliton::new(SolitonParameters::new(1.0, 1.0, 1.0), Grid1D::new(50.0, m).unwrap()).unwrap()
}

fn optimal(problem: &dyn ProblemModel) -> StabilizingFactor {
    StabilizingFactor::petviashvili(optimal_gamma(problem.degree()).unwrap(), problem).unwrap()
}

#[test]
fn soliton_has_a_semisimple_double_unit_eigenvalue() {
    let m = soliton(512);
    let u = m.exact_solution();
    let s = IterationMatrix::new(&m, &u).unwrap();
    let spec = top_eigenvalues(&s, 6).unwrap();
    let report = hypothesis_report(&spec, 3.0, None);
    assert!(report.dominant_is_p && report.dominant_simple);
    assert!(report.rest_bounded, "{:?}", report.violating);
    assert_eq!(report.eigenvalue_one_multiplicity, 2);
    assert_eq!(report.unit_eigenvector_rank, 2);
}

#[test]
fn double_well_violates_the_modulus_bound() {
    let grid = Grid1D::new(50.0, 512).unwrap();
    let p = NlsGroundState::new(&Potential::double_well(6.0, 1.0), 1.43, grid, CubicSign::Plus).unwrap();
    let seed = gaussian_seed(grid, 2.0, 2.0, true, ScalarKind::Real).unwrap();
    let state = newton_solve(&p, &seed, &IterationConfig::default().with_tolerance(1e-11)).unwrap();
    assert!(state.converged());
    let s = IterationMatrix::new(&p, &state.solution).unwrap();
    let report = hypothesis_report(&top_eigenvalues(&s, 4).unwrap(), 3.0, None);
    assert!(!report.rest_bounded);
    assert!(report.verdicts.iter().any(|v| v.contains("hypothesis (ii) violated")));
}

#[test]
fn identity_spectrum_is_a_unit_cluster() {
    let spec = full_spectrum(&IdentityOperator(12)).unwrap();
    assert!(spec.is_complete());
    assert!(spec.eigenvalues.iter().all(|z| (z - 1.0).norm() <= 1e-12));
    let report = hypothesis_report(&spec, 3.0, None);
    assert_eq!(report.unit_modulus.len(), 12);
    assert_eq!(report.eigenvalue_one_multiplicity, 12);
}

#[test]
fn decomposition_separates_scaling_and_symmetry() {
    let m = soliton(256);
    let u = m.exact_solution();
    let gens = symmetry_generators(&m, &u);

    let d = decompose_error(&u.scaled(0.3), &u, &gens).unwrap();
    assert!((d.alpha - 0.3).abs() <= 1e-12);
    assert!(d.beta.iter().all(|b| b.abs() <= 1e-12));

    let d = decompose_error(&gens[0], &u, &gens).unwrap();
    assert!(d.alpha.abs() <= 1e-12);
    assert!((d.beta[0] - 1.0).abs() <= 1e-12 && d.beta[1].abs() <= 1e-12);
    assert!(d.remainder.unwrap().norm() <= 1e-12);
}

#[test]
fn symmetry_components_freeze_in_the_tail() {
    let m = soliton(512);
    let exact = m.exact_solution();
    let gens = symmetry_generators(&m, &exact);
    let cfg = IterationConfig {
        keep_history: true,
        ..IterationConfig::default().with_tolerance(1e-11)
    };
    let run = solve(&m, Some(&optimal(&m)), &perturbed_seed(&exact, 0.2, 0.2), &cfg).unwrap();
    assert!(run.converged());
    let history = run.trace.history.as_ref().unwrap();
    let betas: Vec<Vec<f64>> = history[history.len() - 10..]
        .iter()
        .map(|u| decompose_error(&u.sub(&exact), &exact, &gens).unwrap().beta)
        .collect();
    for k in 0..2 {
        let (lo, hi) = betas
            .iter()
            .map(|b| b[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| (lo.min(b), hi.max(b)));
        assert!(hi - lo <= 1e-3, "beta_{k} drifts by {:e}", hi - lo);
    }
}

#[test]
fn factor_gradient_annihilates_generators() {
    let m = soliton(256);
    let u = m.exact_solution();
    for f in [
        optimal(&m),
        StabilizingFactor::from_descriptor("norm:2:1.5", &m).unwrap(),
        StabilizingFactor::from_descriptor("inner:f=square:1.5", &m).unwrap(),
    ] {
        let g = f.gradient(&m, &u).unwrap();
        for v in symmetry_generators(&m, &u) {
            assert!(g.dot(&v).abs() <= 1e-6 * g.norm() * v.norm(), "{}", f.descriptor());
        }
    }
}

#[test]
fn lump_translations_are_unit_eigenvectors() {
    // S v = v holds up to the aliasing error of the discrete product, which
    // is still ~0.1 at 256^2 on this box and drops spectrally beyond.
    let grid = Grid2D::square(32.0 * PI, 512).unwrap();
    let lump = BenjaminLump::new(0.3, 1.0, grid).unwrap();
    let seed = gaussian_seed(grid, 2.0, 2.0, false, ScalarKind::Real).unwrap();
    let cfg = IterationConfig::default().with_tolerance(1e-10).with_max_iterations(500);
    let run = solve(&lump, Some(&optimal(&lump)), &seed, &cfg).unwrap();
    assert!(run.converged(), "{:?}", run.trace.termination);
    let s = IterationMatrix::new(&lump, &run.solution).unwrap();
    for v in symmetry_generators(&lump, &run.solution) {
        let rel = s.apply_field(&v).sub(&v).norm() / v.norm();
        assert!(rel <= 1e-3, "{rel:e}");
    }
}

#[test]
fn jacobian_maps_the_solution_to_p_plus_q() {
    let m = soliton(256);
    let u = m.exact_solution();
    let f = StabilizingFactor::petviashvili(1.2, &m).unwrap();
    let fu = jacobian_f_action(&m, &f, &u, &u).unwrap();
    let target = u.scaled(m.degree() + f.q());
    assert!(fu.sub(&target).norm() <= 1e-6 * u.norm());
    let g = IterationJacobian::new(&m, &f, &u).unwrap();
    assert!((g.gradient().dot(&u) - f.q()).abs() <= 1e-8);
}

#[test]
fn orbit_fit_recovers_known_elements() {
    let params = SolitonParameters::new(1.0, 1.0, 1.0);
    let grid = Grid1D::new(50.0, 512).unwrap();

    let centered = exact_soliton_profile(&params, &grid).unwrap();
    let fit = fit_phase_line(&centered, None).unwrap();
    assert!((fit.slope - 0.5 * params.lambda2).abs() <= 1e-8);
    assert!(fit.intercept.abs() <= 1e-8);

    let shifted = exact_soliton_profile(&params.with_orbit(0.4, 0.9), &grid).unwrap();
    let fit = orbit_match(&shifted, &params).unwrap();
    assert!((fit.x0.unwrap() - 0.4).abs() <= 1e-6);
    assert!((fit.theta0.unwrap() - 0.9).abs() <= 1e-6);
    assert!(fit.sup_distance.unwrap() <= 1e-8);
}

#[test]
fn krylov_agrees_with_dense_eigensolver() {
    let m = soliton(128);
    let u = m.exact_solution();
    let s = IterationMatrix::new(&m, &u).unwrap();
    let dense = top_eigenvalues(&s, 4).unwrap();
    let (pairs, converged) = krylov_eigenpairs(&s, 4, KrylovOptions::default());
    assert!(converged);
    let mut krylov: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
    krylov.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    for (a, b) in dense.moduli.iter().zip(&krylov) {
        assert!((a - b.norm()).abs() <= 1e-8, "{:?} vs {krylov:?}", dense.eigenvalues);
    }
}
