use std::f64::consts::FRAC_PI_2;

use approx::assert_relative_eq;
use proptest::prelude::*;

use sel_core::classify::{
    classify, classify_boundary_singularity, dirac_admissibility, measure_conditions, removability, ConditionTag,
    ExistenceVerdict, MeasureDescriptor, Removability, SingularityType, TraceType,
};
use sel_core::constants::{constant_report, m_star, phi_eval, phi_root_structure, RootStructure};
use sel_core::io::{emit_report, Format};
use sel_core::profiles::{
    ode_residual, profile_scaling_check, shoot, solve_profile_with, ProfileKind, ProfileOptions,
};
use sel_core::ProblemParams;

fn params() -> impl Strategy<Value = ProblemParams<f64>> {
    (2u32..=6, 1.001f64..8.0, 1.001f64..1.999, 0.0f64..5.0)
        .prop_map(|(n, p, q, m)| ProblemParams::new(n, p, q, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn classify_is_total(pp in params(), mass in 1e-6f64..1e3) {
        for measure in [MeasureDescriptor::GeneralNonnegative, MeasureDescriptor::DiracPoint { mass }] {
            let r = classify(&pp, measure);
            let covered = r.singularity_type != SingularityType::NotCovered
                || r.removability != Removability::NotCovered
                || r.trace_type != TraceType::NotCovered;
            prop_assert!(!covered || !r.citations.is_empty());
            prop_assert!(emit_report(&r, Format::Json).is_ok());
        }
    }

    #[test]
    fn dirac_and_removability_are_consistent(pp in params()) {
        let d = dirac_admissibility(pp.n(), pp.p(), pp.q());
        if d.verdict == ExistenceVerdict::SolvableSmallMass {
            prop_assert!(measure_conditions(pp.n(), pp.p(), pp.q()).contains(ConditionTag::Unconditional));
            prop_assert!(removability(&pp) != Removability::RemovableIsolated);
        }
        let conds = measure_conditions(pp.n(), pp.p(), pp.q()).tags();
        prop_assert_eq!(conds.last(), Some(&ConditionTag::BothMin));
    }

    #[test]
    fn constants_are_total(pp in params()) {
        let r = constant_report(&pp);
        prop_assert!(emit_report(&r, Format::Json).is_ok());
        for &x in &r.phi_roots {
            prop_assert!(x > 0.0);
        }
    }

    #[test]
    fn phi_roots_are_roots(n in 3u32..=6, p in 1.01f64..6.0, f in 0.05f64..4.0) {
        let ms = m_star::<f64>(n, p).unwrap_or(1.0);
        let pp = ProblemParams::new(n, p, 1.5, f * ms).unwrap();
        let r = phi_root_structure(&pp).unwrap();
        for &x in &r.roots {
            let scale = x.powf(p).max(1.0);
            prop_assert!(phi_eval(x, &pp).unwrap().abs() <= 1e-9 * scale, "x = {}", x);
        }
        let expected = match r.structure {
            RootStructure::Empty => 0,
            RootStructure::Single | RootStructure::Tangential => 1,
            RootStructure::Pair => 2,
        };
        prop_assert_eq!(r.roots.len(), expected);
    }

    #[test]
    fn singularity_edges(n in 2u32..=6, eps in 1e-9f64..1e-3) {
        let nf = n as f64;
        let p_c = (nf + 1.0) / (nf - 1.0);
        prop_assert_eq!(classify_boundary_singularity(n, p_c - eps), SingularityType::WeakPoisson);
        prop_assert_eq!(classify_boundary_singularity(n, p_c), SingularityType::LogCritical);
        prop_assert_eq!(classify_boundary_singularity(n, p_c + eps), SingularityType::StrongAlpha);
        if n > 2 {
            let ps = (nf + 2.0) / (nf - 2.0);
            prop_assert_eq!(classify_boundary_singularity(n, ps + eps), SingularityType::NotCovered);
            if ps - eps > p_c + 1e-6 {
                prop_assert_eq!(classify_boundary_singularity(n, ps - eps), SingularityType::StrongAlpha);
            }
        }
    }

    #[test]
    fn unconditional_region_is_the_open_rectangle(n in 2u32..=6, p in 1.001f64..8.0, q in 1.001f64..1.999) {
        let nf = n as f64;
        let inside = p < (nf + 1.0) / (nf - 1.0) && q < (nf + 1.0) / nf;
        prop_assert_eq!(measure_conditions(n, p, q).contains(ConditionTag::Unconditional), inside);
    }

    #[test]
    fn ode_residual_is_total(theta in 1e-6f64..FRAC_PI_2, w in 0.0f64..1e3, w1 in -1e3f64..1e3, w2 in -1e3f64..1e3) {
        let pp = ProblemParams::new(3, 1.5, 1.2, 1.0).unwrap();
        for kind in ProfileKind::ALL {
            prop_assert!(ode_residual(kind, &pp, theta, w, w1, w2).unwrap().is_finite());
        }
    }
}

#[test]
fn critical_boundaries_classify_supercritical() {
    // p = p_c and q = q_c are treated with the capacity branch.
    for n in 2u32..=5 {
        let nf = n as f64;
        let (p_c, q_c) = ((nf + 1.0) / (nf - 1.0), (nf + 1.0) / nf);
        assert_eq!(dirac_admissibility(n, p_c, 1.01).verdict, ExistenceVerdict::NecessaryConditionViolated);
        assert_eq!(dirac_admissibility(n, 1.01, q_c).verdict, ExistenceVerdict::NecessaryConditionViolated);
        assert!(!measure_conditions(n, p_c, 1.01).contains(ConditionTag::Unconditional));
    }
}

#[test]
fn scaling_identity_is_exact() {
    let chi = ProblemParams::new(3, 2.0, 1.2, 1.7).unwrap();
    assert_eq!(profile_scaling_check(ProfileKind::Chi, &chi, 1.7, 1e-8).unwrap(), 0.0);
    let eta = ProblemParams::new(3, 1.5, 1.2, 0.3).unwrap();
    assert_eq!(profile_scaling_check(ProfileKind::Eta, &eta, 0.3, 1e-8).unwrap(), 0.0);
    assert!(profile_scaling_check(ProfileKind::Psi, &eta, 2.0, 1e-8).unwrap_err().is_domain());
}

#[test]
fn halving_the_step_cuts_the_residual() {
    let cases = [
        (ProfileKind::Chi, ProblemParams::new(3, 2.0, 1.2, 1.0).unwrap()),
        (ProfileKind::Psi, ProblemParams::new(3, 3.0, 1.2, 1.0).unwrap()),
        (ProfileKind::Eta, ProblemParams::new(3, 1.5, 1.2, 1.0).unwrap()),
        (ProfileKind::Omega, ProblemParams::new(3, 1.5, 1.2, 3.0).unwrap()),
    ];
    for (kind, pp) in cases {
        let solve = |n: usize| {
            let opts = ProfileOptions { n_steps: n, tol_residual: 1.0, refine_retry: false, ..ProfileOptions::default() };
            solve_profile_with(kind, &pp, &opts).unwrap().first().cloned().expect("profile exists")
        };
        let (a, b) = (solve(256), solve(512));
        assert_relative_eq!(a.pole_value, b.pole_value, max_relative = 1e-6);
        let ratio = a.residual_sup / b.residual_sup;
        assert!(ratio >= 3.0, "{kind}: residual ratio {ratio}");
    }
}

#[test]
fn shooting_brackets_psi() {
    let pp = ProblemParams::new(3, 3.0, 1.2, 1.0).unwrap();
    let small = shoot(ProfileKind::Psi, &pp, 1e-3, 512).unwrap();
    assert!(small.endpoint > 0.0 && !small.hit_zero_early);
    let large = shoot(ProfileKind::Psi, &pp, 50.0, 512).unwrap();
    assert!(large.hit_zero_early);
}

#[test]
fn omega_constant_root_is_a_fixed_point() {
    let pp = ProblemParams::new(3, 2.0, 1.2, 2.0).unwrap();
    for x in phi_root_structure(&pp).unwrap().roots {
        let out = shoot(ProfileKind::Omega, &pp, x, 256).unwrap();
        assert_relative_eq!(out.endpoint, x, max_relative = 1e-10);
    }
}
