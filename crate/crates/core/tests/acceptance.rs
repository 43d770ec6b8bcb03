//! One PASS/FAIL line per acceptance criterion.
//!
//! Oracle digits below were computed once at 50 significant digits and frozen.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use sel_core::classify::{
    classify, classify_boundary_singularity, dirac_admissibility, measure_conditions, removability,
    trace_existence_with_flags, removability_with_flags, tags, ConditionTag, ExistenceVerdict, MeasureDescriptor,
    NullCapacity, Removability, SingularityType, TraceType,
};
use sel_core::constants::{
    constant_report, m_one, m_star, mp_bound_decreasing, mp_bound_increasing, m_p_threshold, phi_eval,
    phi_root_structure, TANGENCY_BAND,
};
use sel_core::io::{emit_report, field_csv, profile_csv, Format};
use sel_core::pde::{
    estimate_m_threshold, fit_exponent_default, solve_bvp, BoundarySpec, InitialIterate, InnerBoundary,
    OuterBoundary, PolarGrid, SeparableField, SolverOptions, Terms,
};
use sel_core::profiles::{
    eta_sup_bound, omega_max_phi, profile_scaling_check, solve_profile_with, ProfileKind, ProfileOptions,
    ProfileOutcome,
};
use sel_core::{ProblemParams, Result};

// 3 (1/4)^{2/3}
#[allow(clippy::excessive_precision)]
const M_STAR_3_2: f64 = 1.1905507889761496060637792294542311952936199959249;
// (1/4)^{2/3}
#[allow(clippy::excessive_precision)]
const M_ONE_2_2: f64 = 0.39685026299204986868792640981807706509787333197496;

struct Ledger {
    failures: usize,
}

impl Ledger {
    fn record(&mut self, n: u32, ok: bool, took: Duration, limit: Duration, detail: String) {
        let in_time = took <= limit;
        let pass = ok && in_time;
        println!(
            "{} criterion {n}: {detail} [{:.2} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            self.failures += 1;
        }
    }
}

fn pp(n: u32, p: f64, q: f64, m: f64) -> ProblemParams<f64> {
    ProblemParams::new(n, p, q, m).expect("valid parameters")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn criterion_1() -> (bool, String) {
    let ms = m_star::<f64>(3, 2.0).unwrap();
    let m1 = m_one::<f64>(2.0, 2.0).unwrap();
    let (e1, e2) = ((ms - M_STAR_3_2).abs(), (m1 - M_ONE_2_2).abs());
    (e1 <= 1e-12 && e2 <= 1e-12, format!("m_star(3,2) err {e1:.1e}, m_one(2,2) err {e2:.1e} (tol 1e-12)"))
}

fn criterion_2() -> (bool, String) {
    let ms = m_star::<f64>(3, 2.0).unwrap();
    let mut ms_grid: Vec<f64> = (1..=200).map(|k| 3.0 * k as f64 / 200.0).collect();
    ms_grid.push(ms);
    ms_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ok = true;
    let mut counts = [0usize; 3];
    let mut worst = 0.0f64;
    for &m in &ms_grid {
        let params = pp(3, 2.0, 1.2, m);
        let roots = phi_root_structure(&params).unwrap().roots;
        let expected = if (m - ms).abs() <= TANGENCY_BAND {
            1
        } else if m < ms {
            0
        } else {
            2
        };
        ok &= roots.len() == expected;
        counts[expected] += 1;
        for &x in &roots {
            worst = worst.max(phi_eval(x, &params).unwrap().abs());
        }
    }
    let mut single = true;
    for &m in &ms_grid {
        let params = pp(3, 4.0, 1.2, m);
        let roots = phi_root_structure(&params).unwrap().roots;
        single &= roots.len() == 1;
        for &x in &roots {
            worst = worst.max(phi_eval(x, &params).unwrap().abs());
        }
    }
    ok &= single && worst <= 1e-10;
    (
        ok,
        format!(
            "p=2: {} points with 0/1/2 roots = {}/{}/{}; p=4 single root everywhere: {single}; max |Phi| {worst:.1e}",
            ms_grid.len(),
            counts[0],
            counts[1],
            counts[2]
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let t = m_p_threshold::<f64>(3, 1.5).unwrap();
    let f1 = mp_bound_increasing(3, 1.5, t.theta_star).unwrap();
    let f2 = mp_bound_decreasing(3, 1.5, t.theta_star).unwrap();
    let cross = rel(f1, f2);
    let (a, b) = t.m_p_literal_pair;
    let ratio = a.max(b) / a.min(b);
    let ok = t.b_p == 6.0 && cross <= 1e-10 && ratio > 1e3 && !t.consistent;
    (
        ok,
        format!(
            "b_p = {}, theta* = {:.15}, |f1-f2|/f2 = {cross:.1e}, literal pair ratio {ratio:.3e}, consistent = {}",
            t.b_p, t.theta_star, t.consistent
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let opts = ProfileOptions::<f64>::default();
    let mut ok = true;
    let mut found = Vec::new();
    for p in [2.2, 3.0, 4.0] {
        match solve_profile_with(ProfileKind::Psi, &pp(3, p, 1.2, 1.0), &opts) {
            Ok(ProfileOutcome::Found(sols)) => {
                let s = &sols[0];
                let positive = s.values[1..s.values.len() - 1].iter().all(|&v| v > 0.0);
                ok &= s.endpoint_value.abs() <= 1e-8 && positive;
                found.push(format!("p={p}: a0={:.6}", s.pole_value));
            }
            _ => {
                ok = false;
                found.push(format!("p={p}: none"));
            }
        }
    }
    let mut none = Vec::new();
    for p in [1.5, 1.8, 2.0] {
        let r = solve_profile_with(ProfileKind::Psi, &pp(3, p, 1.2, 1.0), &opts);
        let empty = matches!(r, Ok(ProfileOutcome::NoSolution { .. }));
        ok &= empty;
        none.push(format!("p={p}: {}", if empty { "NoSolution" } else { "found" }));
    }
    (ok, format!("PSI N=3 {}; {}", found.join(", "), none.join(", ")))
}

fn criterion_5() -> (bool, String) {
    let chi = profile_scaling_check(ProfileKind::Chi, &pp(3, 2.0, 1.2, 1.0), 16.0, 1e-8);
    let eta = profile_scaling_check(ProfileKind::Eta, &pp(3, 1.5, 1.2, 1.0), 4.0, 1e-8);
    let opts = ProfileOptions::<f64>::default();
    let mut bound_ok = true;
    let mut bounds = Vec::new();
    for m in [1.0, 4.0] {
        let params = pp(3, 1.5, 1.2, m);
        let bound = eta_sup_bound(&params).expect("alpha + 2 - N > 0 here");
        let out = solve_profile_with(ProfileKind::Eta, &params, &opts).unwrap();
        bound_ok &= out.is_found();
        for s in out.solutions() {
            bound_ok &= s.max_value() <= bound;
            bounds.push(format!("m={m}: max {:.6e} <= {:.6e}", s.max_value(), bound));
        }
    }
    match (chi, eta) {
        (Ok(c), Ok(e)) => (
            c <= 1e-6 && e <= 1e-6 && bound_ok,
            format!("CHI m=1 vs 16 sup err {c:.1e}, ETA m=1 vs 4 sup err {e:.1e} (tol 1e-6); ETA bound {}", bounds.join(", ")),
        ),
        (c, e) => (false, format!("scaling check failed: CHI {c:?}, ETA {e:?}")),
    }
}

fn criterion_6() -> (bool, String) {
    let opts = ProfileOptions::<f64>::default();
    let mut sample = Vec::new();
    for p in [1.5, 1.8] {
        for f in [1.0, 1.5, 2.0, 4.0] {
            sample.push((p, f));
        }
    }
    sample.push((1.2, 2.0));
    sample.push((1.2, 4.0));
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut n_profiles = 0;
    let mut empty = Vec::new();
    for (p, f) in sample {
        let ms = m_star::<f64>(3, p).unwrap();
        let params = pp(3, p, 1.2, f * ms);
        match solve_profile_with(ProfileKind::Omega, &params, &opts) {
            Ok(out) => {
                if !out.is_found() {
                    empty.push(format!("(p={p}, m={f}m*)"));
                    ok = false;
                }
                for s in out.solutions() {
                    let phi = omega_max_phi(s).unwrap();
                    worst = worst.min(phi);
                    ok &= phi >= -1e-8;
                    n_profiles += 1;
                }
            }
            Err(e) => {
                ok = false;
                empty.push(format!("(p={p}, m={f}m*): {e}"));
            }
        }
    }
    let miss = if empty.is_empty() { String::new() } else { format!("; no profile at {}", empty.join(", ")) };
    (ok, format!("10 (p, m) points, {n_profiles} OMEGA profiles, min Phi(max) = {worst:.4e} (tol -1e-8){miss}"))
}

#[derive(Clone, Copy)]
enum Expect {
    Singularity(SingularityType),
    Removable(Removability, Option<&'static str>),
    Dirac(ExistenceVerdict, &'static [NullCapacity]),
    Conditions(&'static [ConditionTag]),
    Trace(TraceType, Option<&'static str>),
    Existence(ExistenceVerdict),
}

fn truth_row(n: u32, p: f64, q: f64, m: f64, e: Expect) -> bool {
    let params = pp(n, p, q, m);
    match e {
        Expect::Singularity(s) => classify(&params, MeasureDescriptor::GeneralNonnegative).singularity_type == s,
        Expect::Removable(r, flag) => removability_with_flags(&params) == (r, flag),
        Expect::Dirac(v, caps) => {
            let d = dirac_admissibility(n, p, q);
            d.verdict == v && d.null_capacities == caps
        }
        Expect::Conditions(tags) => measure_conditions(n, p, q).tags() == tags,
        Expect::Trace(t, flag) => trace_existence_with_flags(&params) == (t, flag),
        Expect::Existence(v) => classify(&params, MeasureDescriptor::GeneralNonnegative).existence_verdict == v,
    }
}

fn criterion_7() -> (bool, String) {
    use ConditionTag::*;
    use ExistenceVerdict::*;
    use NullCapacity::*;
    let rows: [(u32, f64, f64, f64, Expect); 20] = [
        (3, 1.5, 1.1, 1.0, Expect::Singularity(SingularityType::WeakPoisson)),
        (3, 2.0, 1.2, 1.0, Expect::Singularity(SingularityType::LogCritical)),
        (3, 3.0, 1.2, 1.0, Expect::Singularity(SingularityType::StrongAlpha)),
        (3, 5.0, 1.2, 1.0, Expect::Singularity(SingularityType::NotCovered)),
        (2, 3.0, 1.2, 1.0, Expect::Singularity(SingularityType::LogCritical)),
        (3, 2.5, 1.3, 1.0, Expect::Removable(Removability::RemovableIsolated, None)),
        (3, 1.5, 1.2, 1.0, Expect::Removable(Removability::NotCovered, None)),
        (3, 2.5, 10.0 / 7.0, 5.0, Expect::Removable(Removability::RemovableIsolated, Some(tags::FLAG_SMALL_M_CRITICAL))),
        (3, 1.5, 1.2, 1.0, Expect::Dirac(SolvableSmallMass, &[])),
        (3, 2.5, 1.2, 1.0, Expect::Dirac(NecessaryConditionViolated, &[Source])),
        (3, 1.5, 1.5, 1.0, Expect::Dirac(NecessaryConditionViolated, &[Gradient])),
        (3, 2.0, 1.2, 1.0, Expect::Dirac(NecessaryConditionViolated, &[Source])),
        (3, 1.5, 4.0 / 3.0, 1.0, Expect::Dirac(NecessaryConditionViolated, &[Gradient])),
        (3, 1.5, 1.2, 1.0, Expect::Conditions(&[Unconditional, BothMin])),
        (3, 3.0, 1.45, 1.0, Expect::Conditions(&[CapPOnly, BothMin])),
        (3, 3.0, 1.6, 1.0, Expect::Conditions(&[CapQOnly, BothMin])),
        (3, 3.0, 1.5, 1.0, Expect::Conditions(&[CapQOnly, BothMin])),
        (3, 2.0, 1.2, 1.0, Expect::Trace(TraceType::RadonMeasureTrace, None)),
        (3, 2.0, 4.0 / 3.0, 0.1, Expect::Trace(TraceType::RadonMeasureTrace, Some(tags::FLAG_M_ONE))),
        (3, 2.0, 1.45, 1.0, Expect::Trace(TraceType::BorelTracePossible, Some(tags::FLAG_BOREL_INFORMATIONAL))),
    ];
    let bad: Vec<usize> =
        rows.iter().enumerate().filter(|(_, r)| !truth_row(r.0, r.1, r.2, r.3, r.4)).map(|(k, _)| k + 1).collect();
    let m_zero = truth_row(3, 1.5, 1.2, 0.0, Expect::Existence(OutsideProvenRegimes));

    let mut violations = 0usize;
    let mut evaluated = 0usize;
    for n in [2u32, 3, 4] {
        let nf = n as f64;
        let (p_c, q_c) = ((nf + 1.0) / (nf - 1.0), (nf + 1.0) / nf);
        for a in 0..50 {
            let p = 1.0 + 5.0 * (a as f64 + 0.5) / 50.0;
            for b in 0..50 {
                let q = 1.0 + (b as f64 + 0.5) / 50.0;
                for c in 0..50 {
                    let m = 3.0 * c as f64 / 49.0;
                    let params = pp(n, p, q, m);
                    let d = dirac_admissibility(n, p, q);
                    let conds = measure_conditions(n, p, q);
                    let rep = classify(&params, MeasureDescriptor::DiracPoint { mass: 1.0 });
                    evaluated += 1;
                    if d.verdict == SolvableSmallMass && !conds.contains(Unconditional) {
                        violations += 1;
                    }
                    if removability(&params) == Removability::RemovableIsolated && d.verdict == SolvableSmallMass {
                        violations += 1;
                    }
                    if conds.contains(Unconditional) != (p < p_c && q < q_c) {
                        violations += 1;
                    }
                    let covered = rep.singularity_type != SingularityType::NotCovered
                        || rep.removability != Removability::NotCovered
                        || rep.trace_type != TraceType::NotCovered
                        || rep.existence_verdict != OutsideProvenRegimes;
                    if covered && rep.citations.is_empty() {
                        violations += 1;
                    }
                }
            }
        }
        // Window edges at p_c and p_sobolev.
        let below = classify_boundary_singularity(n, p_c - 1e-9);
        let above = classify_boundary_singularity(n, p_c + 1e-9);
        if below != SingularityType::WeakPoisson || above != SingularityType::StrongAlpha {
            violations += 1;
        }
        if n > 2 {
            let ps = (nf + 2.0) / (nf - 2.0);
            if classify_boundary_singularity(n, ps - 1e-9) != SingularityType::StrongAlpha
                || classify_boundary_singularity(n, ps + 1e-9) != SingularityType::NotCovered
            {
                violations += 1;
            }
        }
    }
    let ok = bad.is_empty() && m_zero && violations == 0;
    (
        ok,
        format!(
            "truth table {}/20 rows{}; m=0 outside proven regimes: {m_zero}; {evaluated} sweep points, {violations} invariant violations",
            20 - bad.len(),
            if bad.is_empty() { String::new() } else { format!(" (mismatch at rows {bad:?})") }
        ),
    )
}

struct SlopeRun {
    name: &'static str,
    theory: f64,
    slopes: [f64; 2],
}

fn run_field(
    grid: PolarGrid<f64>,
    terms: Terms,
    inner: InnerBoundary<f64>,
    initial: InitialIterate<f64>,
) -> Result<sel_core::pde::FieldSolution<f64>> {
    let params = pp(2, 4.0, 1.25, 1.0);
    let opts = SolverOptions { initial, ..SolverOptions::default() };
    solve_bvp(grid, params, terms, BoundarySpec::new(inner, OuterBoundary::Separable), &opts)
}

fn criterion_8() -> (bool, String) {
    let coarse = PolarGrid::new(0.01, 1.0, 128, 64).unwrap();
    let fine = coarse.refined();
    let dirac = InnerBoundary::MollifiedDirac { mass: 1.0, width: 0.01 / 100.0 };
    let chi = InnerBoundary::SeparableProfile { kind: ProfileKind::Chi };
    let psi = InnerBoundary::SeparableProfile { kind: ProfileKind::Psi };
    let setups = [
        ("harmonic", -1.0, Terms::HARMONIC, dirac, InitialIterate::Continuation),
        ("CHI gradient-only", -3.0, Terms::GRADIENT_ONLY, chi, InitialIterate::Continuation),
        ("PSI source-only", -2.0 / 3.0, Terms::SOURCE_ONLY, psi, InitialIterate::LogInterpolated),
    ];
    let mut runs = Vec::new();
    let mut chi_err = f64::NAN;
    for (name, theory, terms, inner, init) in setups {
        let mut slopes = [f64::NAN; 2];
        for (k, g) in [coarse, fine].into_iter().enumerate() {
            match run_field(g, terms, inner, init.clone()).and_then(|s| {
                let fit = fit_exponent_default(&s)?;
                if name.starts_with("CHI") && k == 1 {
                    chi_err = separable_mismatch(&s);
                }
                Ok(fit.slope)
            }) {
                Ok(s) => slopes[k] = s,
                Err(e) => println!("  {name} on {}x{}: {e}", g.n_r, g.n_theta),
            }
        }
        runs.push(SlopeRun { name, theory, slopes });
    }
    let mut ok = chi_err <= 0.05;
    let parts: Vec<String> = runs
        .iter()
        .map(|r| {
            let d0 = (r.slopes[0] - r.theory).abs();
            let d1 = (r.slopes[1] - r.theory).abs();
            let within = d1 <= 0.05 * r.theory.abs();
            let toward = d1 < d0;
            ok &= within && toward;
            format!(
                "{} slope {:.5} -> {:.5} (theory {:.5}, rel dev {:.1e})",
                r.name,
                r.slopes[0],
                r.slopes[1],
                r.theory,
                d1 / r.theory.abs()
            )
        })
        .collect();
    (ok, format!("{}; CHI field vs r^-beta chi on inner half {chi_err:.1e}", parts.join("; ")))
}

/// `sup |u - r^{-β}χ| / sup r^{-β}χ` over the inner half of the radial nodes.
fn separable_mismatch(sol: &sel_core::pde::FieldSolution<f64>) -> f64 {
    let exact = SeparableField::new(ProfileKind::Chi, &sol.params).unwrap();
    let g = sol.grid;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 0..g.n_r / 2 {
        for j in 1..g.n_theta - 1 {
            let v = exact.value(g.r(i), g.theta(j));
            num = num.max((sol.at(i, j) - v).abs());
            den = den.max(v.abs());
        }
    }
    num / den
}

fn criterion_9() -> (bool, String) {
    let params = pp(2, 1.5, 1.25, 1.0);
    let (p, q, beta) = (params.p(), params.q(), params.beta());
    let grid = PolarGrid::new(0.01, 1.0, 256, 128).unwrap();
    let exact = SeparableField::new(ProfileKind::Chi, &params).unwrap();
    let spec = BoundarySpec::new(InnerBoundary::SeparableProfile { kind: ProfileKind::Chi }, OuterBoundary::Separable);
    let field = sel_core::pde::FieldSolution::from_fn(grid, params, Terms::GRADIENT_ONLY, spec, |r, t| exact.value(r, t));
    let est = match estimate_m_threshold(&field, &params, 0.0) {
        Ok(e) => e,
        Err(e) => return (false, format!("estimator failed: {e}")),
    };
    let mut oracle = f64::INFINITY;
    for i in 1..grid.n_r - 1 {
        for j in 1..grid.n_theta - 1 {
            let r = grid.r(i);
            let c = (grid.theta(j) - FRAC_PI_2).abs();
            let (w, w1) = (exact.profile.eval(c), exact.profile.eval_derivative(c));
            let v = r.powf(beta * p - (beta + 1.0) * q) * (beta * beta * w * w + w1 * w1).powf(q / 2.0) / w.powf(p);
            oracle = oracle.min(v);
        }
    }
    let err = rel(est.m_est, oracle);
    let x0 = ((p - q) / ((q - 1.0) * est.m_est)).powf((q - 1.0) / (p - 1.0));
    let cross = rel(est.m_threshold_check, est.m_threshold);
    let ok = err <= 0.02 && cross <= 1e-10 && rel(est.x0, x0) <= 1e-12;
    (
        ok,
        format!(
            "M_est {:.6} vs grid oracle {oracle:.6} (rel {err:.1e}, tol 2e-2); X0 {:.6}; m_threshold {:.10} cross-check rel {cross:.1e} (tol 1e-10)",
            est.m_est, est.x0, est.m_threshold
        ),
    )
}

fn criterion_10() -> (bool, String) {
    let mut same = Vec::new();
    let params = pp(3, 2.0, 1.2, 1.5);
    same.push((
        "constants",
        emit_report(&constant_report(&params), Format::Json).unwrap()
            == emit_report(&constant_report(&params), Format::Json).unwrap(),
    ));
    let rep = || emit_report(&classify(&params, MeasureDescriptor::DiracPoint { mass: 2.0 }), Format::Json).unwrap();
    same.push(("classify", rep() == rep()));
    let prof = || {
        let out = solve_profile_with(ProfileKind::Omega, &pp(3, 1.5, 1.2, 3.0), &ProfileOptions::default()).unwrap();
        out.solutions().iter().flat_map(profile_csv).collect::<Vec<u8>>()
    };
    let (a, b) = (prof(), prof());
    same.push(("omega profile csv", !a.is_empty() && a == b));
    let field = || {
        let g = PolarGrid::new(0.01, 1.0, 48, 24).unwrap();
        let dirac = InnerBoundary::MollifiedDirac { mass: 0.1, width: 1e-4 };
        let s = run_field(g, Terms::FULL, dirac, InitialIterate::Continuation).unwrap();
        (field_csv(&s), emit_report(&s, Format::Json).unwrap())
    };
    let (f1, f2) = (field(), field());
    same.push(("full-equation field csv+json", f1 == f2));
    let ok = same.iter().all(|s| s.1);
    let names: Vec<String> = same.iter().map(|(n, s)| format!("{n}: {}", if *s { "identical" } else { "DIFFERENT" })).collect();
    (ok, names.join(", "))
}

fn main() {
    let mut ledger = Ledger { failures: 0 };
    type Check = fn() -> (bool, String);
    let criteria: [(u32, Check, u64); 10] = [
        (1, criterion_1, 1),
        (2, criterion_2, 1),
        (3, criterion_3, 1),
        (4, criterion_4, 10),
        (5, criterion_5, 5),
        (6, criterion_6, 10),
        (7, criterion_7, 5),
        (8, criterion_8, 120),
        (9, criterion_9, 10),
        (10, criterion_10, 60),
    ];
    for (n, f, limit) in criteria {
        let t = Instant::now();
        let (ok, detail) = f();
        ledger.record(n, ok, t.elapsed(), Duration::from_secs(limit), detail);
    }
    if ledger.failures > 0 {
        println!("{} of 10 criteria failed", ledger.failures);
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
