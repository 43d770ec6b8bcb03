use std::f64::consts::PI;

use sel_core::pde::{
    fit_exponent, fit_exponent_default, solve_bvp, BoundarySpec, FieldSolution, InnerBoundary, OuterBoundary,
    PolarGrid, SolverOptions, Terms,
};
use sel_core::profiles::ProfileKind;
use sel_core::{Error, ProblemParams};

fn params() -> ProblemParams<f64> {
    ProblemParams::new(2, 4.0, 1.25, 1.0).unwrap()
}

fn solve(n_r: usize, n_theta: usize, terms: Terms, inner: InnerBoundary<f64>) -> FieldSolution<f64> {
    let grid = PolarGrid::new(0.01, 1.0, n_r, n_theta).unwrap();
    let spec = BoundarySpec::new(inner, OuterBoundary::Separable);
    solve_bvp(grid, params(), terms, spec, &SolverOptions::default()).unwrap()
}

fn dirac(mass: f64) -> InnerBoundary<f64> {
    InnerBoundary::MollifiedDirac { mass, width: 1e-4 }
}

#[test]
fn exact_power_field_gives_exact_slope() {
    let grid = PolarGrid::new(0.01, 1.0, 64, 32).unwrap();
    let spec = BoundarySpec::new(dirac(1.0), OuterBoundary::Zero);
    let sol = FieldSolution::from_fn(grid, params(), Terms::HARMONIC, spec, |r, t| r.powi(-2) * (1.0 + t.sin()));
    let fit = fit_exponent_default(&sol).unwrap();
    assert!((fit.slope + 2.0).abs() <= 1e-12, "{}", fit.slope);
    assert!((fit.r2 - 1.0).abs() <= 1e-12);
    let off_ray = fit_exponent(&sol, 1.0, (0.02, 0.5)).unwrap();
    assert!((off_ray.slope + 2.0).abs() <= 1e-12);
}

#[test]
fn fit_rejects_bad_windows_and_zero_values() {
    let grid = PolarGrid::new(0.01, 1.0, 32, 16).unwrap();
    let spec = BoundarySpec::new(dirac(1.0), OuterBoundary::Zero);
    let sol = FieldSolution::from_fn(grid, params(), Terms::HARMONIC, spec, |r, _| 1.0 / r);
    assert!(fit_exponent(&sol, PI / 2.0, (0.001, 0.5)).unwrap_err().is_domain());
    assert!(fit_exponent(&sol, 0.0, (0.02, 0.5)).unwrap_err().is_domain());
    let zero = FieldSolution::from_fn(grid, params(), Terms::HARMONIC, spec, |_, _| 0.0);
    assert!(matches!(fit_exponent_default(&zero), Err(Error::Fit(_))));
}

#[test]
fn planar_only() {
    let grid = PolarGrid::new(0.01, 1.0, 32, 16).unwrap();
    let pp = ProblemParams::new(3, 4.0, 1.25, 1.0).unwrap();
    let spec = BoundarySpec::new(dirac(1.0), OuterBoundary::Zero);
    assert!(solve_bvp(grid, pp, Terms::HARMONIC, spec, &SolverOptions::default()).unwrap_err().is_domain());
    assert!(PolarGrid::new(0.01, 1.0, 8, 32).unwrap_err().is_domain());
    assert!(PolarGrid::new(1.0, 0.5, 32, 32).unwrap_err().is_domain());
}

fn boundary_max(sol: &FieldSolution<f64>) -> (f64, f64) {
    let g = sol.grid;
    let mut edge = 0.0f64;
    let mut inside = 0.0f64;
    for i in 0..g.n_r {
        for j in 0..g.n_theta {
            let v = sol.at(i, j);
            if i == 0 || i == g.n_r - 1 || j == 0 || j == g.n_theta - 1 {
                edge = edge.max(v);
            } else {
                inside = inside.max(v);
            }
        }
    }
    (edge, inside)
}

#[test]
fn gradient_only_runs_obey_the_maximum_principle() {
    for inner in [dirac(1.0), InnerBoundary::SeparableProfile { kind: ProfileKind::Chi }] {
        let sol = solve(64, 32, Terms::GRADIENT_ONLY, inner);
        let (edge, inside) = boundary_max(&sol);
        assert!(inside <= edge, "{inside} > {edge}");
        assert!(sol.u.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn smaller_data_gives_smaller_solution() {
    let big = solve(48, 24, Terms::FULL, dirac(0.1));
    let small = solve(48, 24, Terms::FULL, dirac(0.01));
    for (a, b) in small.u.iter().zip(&big.u) {
        assert!(a <= b, "{a} > {b}");
    }
}

#[test]
fn residual_certificate_matches_tolerance() {
    let opts = SolverOptions::<f64>::default();
    for (terms, inner) in [
        (Terms::HARMONIC, dirac(1.0)),
        (Terms::GRADIENT_ONLY, InnerBoundary::SeparableProfile { kind: ProfileKind::Chi }),
        (Terms::FULL, dirac(0.1)),
    ] {
        let sol = solve(48, 24, terms, inner);
        assert!(sol.final_residual <= opts.tol);
        assert!(sol.residual_certificate() <= 10.0 * opts.tol, "{}", sol.residual_certificate());
        assert!(sol.high_order_residual().is_finite());
        assert!(!sol.residual_history.is_empty());
    }
}

#[test]
fn harmonic_slope_converges_at_least_first_order() {
    let coarse = fit_exponent_default(&solve(64, 32, Terms::HARMONIC, dirac(1.0))).unwrap().slope;
    let fine = fit_exponent_default(&solve(128, 64, Terms::HARMONIC, dirac(1.0))).unwrap().slope;
    let (d0, d1) = ((coarse + 1.0).abs(), (fine + 1.0).abs());
    assert!(d1 < 0.5 * d0, "{d0} -> {d1}");
}

#[test]
fn flat_rows_vanish() {
    let sol = solve(32, 16, Terms::FULL, dirac(0.1));
    let g = sol.grid;
    for i in 0..g.n_r {
        assert_eq!(sol.at(i, 0), 0.0);
        assert_eq!(sol.at(i, g.n_theta - 1), 0.0);
    }
}
