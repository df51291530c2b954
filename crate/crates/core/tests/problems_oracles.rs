//! Problem models against closed-form oracles: exact solutions, Jacobian
//! consistency and the `S u* = p u*` eigenrelation.

use petviashvili::diagnostics::iteration_matrix_action;
use petviashvili::iterate::residual;
use petviashvili::problems::{
    exact_soliton_profile, gaussian_seed, BenjaminLump, CubicSign, DenseQuadratic, NlsGroundState,
    NlsSoliton, Potential, SolitonParameters,
};
use petviashvili::spectral;
use petviashvili::{Field, Grid1D, Grid2D, ProblemModel, ScalarKind};

fn line() -> Grid1D {
    Grid1D::new(50.0, 512).unwrap()
}

/// Errors of `(N(u + e v) - N(u - e v)) / 2e` against `N'(u) v` at
/// `e = 1e-3, 1e-4`, relative to `|N'(u) v|`.
fn jacobian_errors(problem: &dyn ProblemModel, u: &Field, v: &Field) -> (f64, f64) {
    let exact = problem.jac_n_action(u, v).unwrap();
    let err = |eps: f64| {
        let mut plus = u.clone();
        plus.axpy(eps, v);
        let mut minus = u.clone();
        minus.axpy(-eps, v);
        let fd = problem.apply_n(&plus).sub(&problem.apply_n(&minus)).scaled(0.5 / eps);
        fd.sub(&exact).norm() / exact.norm()
    };
    (err(1e-3), err(1e-4))
}

fn jacobian_order(problem: &dyn ProblemModel, u: &Field, v: &Field) -> f64 {
    let (e1, e2) = jacobian_errors(problem, u, v);
    (e1 / e2).log10()
}

#[test]
fn sampled_soliton_solves_the_discrete_system() {
    // For sigma = 2 the profile behaves like sech^(1/2), whose branch points
    // sit about 0.9 off the real axis; at h = 0.2 that limits spectral
    // accuracy to ~1e-5.
    for (sigma, floor) in [(1.0, 1e-8), (2.0, 1e-4)] {
        let m = NlsSoliton::new(SolitonParameters::new(sigma, 1.0, 1.0), line()).unwrap();
        let u = m.exact_solution();
        let r = residual(&m, &u);
        assert!(r <= floor, "sigma = {sigma}: residual {r:e}");
    }
}

#[test]
fn soliton_orbit_elements_are_solutions() {
    let params = SolitonParameters::new(1.0, 1.0, 1.0);
    let m = NlsSoliton::new(params, line()).unwrap();
    let u = exact_soliton_profile(&params.with_orbit(0.7, -1.1), &line()).unwrap();
    assert!(residual(&m, &u) <= 1e-8);
}

#[test]
fn soliton_requires_positive_a() {
    assert!(NlsSoliton::new(SolitonParameters::new(1.0, 0.25, 1.0), line()).is_err());
    assert!(NlsSoliton::new(SolitonParameters::new(1.0, 0.2, 1.0), line()).is_err());
}

#[test]
fn jacobians_are_second_order_consistent() {
    let grid = line();
    let x = grid.nodes();
    let bump = Field::real(grid, x.iter().map(|x| (-(x - 0.5) * (x - 0.5)).exp()).collect()).unwrap();

    let ground = NlsGroundState::new(&Potential::sech_squared(), 1.3, grid, CubicSign::Minus).unwrap();
    let u = gaussian_seed(grid, 1.0, 1.0, false, ScalarKind::Real).unwrap();
    assert!(jacobian_order(&ground, &u, &bump) >= 1.9);

    for sigma in [1.0, 1.5, 2.0] {
        let m = NlsSoliton::new(SolitonParameters::new(sigma, 1.0, 1.0), grid).unwrap();
        let u = m.exact_solution();
        let v = bump.to_complex_vec();
        let v: Vec<_> = v.iter().zip(&x).map(|(z, x)| z * petviashvili::Complex64::new(1.0, 0.3 * x.sin())).collect();
        let v = Field::complex(grid, v).unwrap();
        let order = jacobian_order(&m, &u, &v);
        assert!(order >= 1.9, "sigma = {sigma}: order {order}");
    }

    let plane = Grid2D::square(32.0 * std::f64::consts::PI, 32).unwrap();
    let lump = BenjaminLump::new(0.4, 1.0, plane).unwrap();
    let eta = gaussian_seed(plane, 2.0, 2.0, false, ScalarKind::Real).unwrap();
    let v = gaussian_seed(plane, 1.0, 5.0, false, ScalarKind::Real).unwrap();
    // N is quadratic: the central difference is exact up to rounding.
    let (e1, e2) = jacobian_errors(&lump, &eta, &v);
    assert!(e1.max(e2) <= 1e-10, "{e1:e} {e2:e}");
}

#[test]
fn jacobian_adjoint_matches_transpose() {
    let plane = Grid2D::square(20.0, 16).unwrap();
    let lump = BenjaminLump::new(0.5, 1.0, plane).unwrap();
    let eta = gaussian_seed(plane, 2.0, 2.0, false, ScalarKind::Real).unwrap();
    let v = gaussian_seed(plane, 1.0, 3.0, false, ScalarKind::Real).unwrap().map_real(|x| x * x - 0.1);
    let w = gaussian_seed(plane, 1.0, 4.0, false, ScalarKind::Real).unwrap().map_real(|x| x.sqrt());
    let lhs = lump.jac_n_action(&eta, &v).unwrap().dot(&w);
    let rhs = v.dot(&lump.jac_n_adjoint_action(&eta, &w).unwrap());
    assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
}

#[test]
fn zero_potential_has_trivial_solution() {
    let p = NlsGroundState::new(&Potential::Zero, 1.0, line(), CubicSign::Plus).unwrap();
    assert_eq!(residual(&p, &p.zero_field()), 0.0);
}

#[test]
fn singular_operator_is_reported() {
    // mu = 0 makes D^2 singular on the constants.
    let err = NlsGroundState::new(&Potential::Zero, 0.0, line(), CubicSign::Plus);
    assert!(err.is_err());
}

#[test]
fn lump_symbol_and_zero_mass() {
    let plane = Grid2D::square(32.0 * std::f64::consts::PI, 64).unwrap();
    let lump = BenjaminLump::new(0.5, 1.0, plane).unwrap();
    assert_eq!(lump.pinned_modes(), &[0]);
    assert_eq!(petviashvili::problems::lump_symbol(2.0, 3.0, 0.5, 1.0), 4.0 * (1.0 + 2.0 + 4.0) + 9.0);
    let eta = gaussian_seed(plane, 2.0, 2.0, false, ScalarKind::Real).unwrap();
    for out in [lump.apply_n(&eta), lump.solve_l(&lump.apply_n(&eta))] {
        assert!(spectral::forward(&out)[0].norm() <= 1e-14 * out.norm());
    }
}

#[test]
fn eigenrelation_holds_at_exact_soliton() {
    for sigma in [1.0, 2.0] {
        let m = NlsSoliton::new(SolitonParameters::new(sigma, 1.0, 1.0), line()).unwrap();
        let u = m.exact_solution();
        let su = iteration_matrix_action(&m, &u, &u).unwrap();
        let rel = su.sub(&u.scaled(m.degree())).norm() / u.norm();
        assert!(rel <= 1e-6, "sigma = {sigma}: {rel:e}");
    }
}

#[test]
fn synthetic_problem_has_prescribed_iteration_matrix() {
    let spectrum = [0.7, -0.5, 0.25, 0.1, -0.05];
    let sol = vec![1.0, 0.8, 1.2, 0.9, 1.1, 1.3];
    let q = DenseQuadratic::new(sol.clone(), &spectrum).unwrap();
    assert!(residual(&q, &q.solution()) <= 1e-12);
    let n = sol.len();
    let s = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let grid = *q.solution().domain();
        let v = Field::real(grid, e).unwrap();
        iteration_matrix_action(&q, &q.solution(), &v).unwrap().as_real().unwrap()[i]
    });
    let mut eig: Vec<f64> = s.complex_eigenvalues().iter().map(|z| z.re).collect();
    eig.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = spectrum.iter().copied().chain([2.0]).collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in eig.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12, "{eig:?} vs {expected:?}");
    }
}

#[test]
fn odd_seed_is_antisymmetric() {
    let grid = line();
    let u = gaussian_seed(grid, 2.0, 2.0, true, ScalarKind::Real).unwrap();
    let v = u.as_real().unwrap();
    for j in 1..grid.points() {
        assert!((v[j] + v[grid.mirror(j)]).abs() <= 1e-15);
    }
}
