use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use sel_core::classify::{classify, MeasureDescriptor, RegimeReport};
use sel_core::constants::{constant_report, m_star, phi_eval, phi_root_structure, ConstantReport, RootStructure};
use sel_core::io::{emit_report, json_envelope, profile_csv, field_csv, Format};
use sel_core::pde::{
    estimate_m_threshold, fit_exponent_default, solve_bvp, BoundarySpec, ExponentFit, InitialIterate,
    InnerBoundary, OuterBoundary, PolarGrid, SolverOptions, Terms, ThresholdEstimate,
};
use sel_core::profiles::{eta_sup_bound, omega_max_phi, solve_profile_with, ProfileKind, ProfileOptions, ProfileOutcome};
use sel_core::{Error, ProblemParams};

use crate::args::{Command, OutputArgs, ParamArgs};
use crate::{write_to, Failure};

pub const NO_SOLUTION: &str = "no solution found (consistent with nonexistence)";

type Out<'a> = &'a mut dyn Write;

pub fn dispatch(cmd: Command, stdout: Out, stderr: Out) -> Result<(), Failure> {
    match cmd {
        Command::Constants { params, output } => {
            let pp = params.build()?;
            emit(&constant_report(&pp), &output, stdout)
        }
        Command::PhiRoots { params, output } => {
            let pp = params.build()?;
            let summary = phi_summary(&pp)?;
            let bytes = match output.format()? {
                Format::Json => json_envelope("phi-roots", &summary)?,
                Format::Csv => return Err(Error::Format("no CSV form for 'phi-roots' output".into()).into()),
            };
            write_to(output.out.as_deref(), &bytes, stdout)
        }
        Command::Profile { params, kind, n_steps, tol, tol_residual, out, summary } => {
            let pp = params.build()?;
            let kind: ProfileKind = kind.parse()?;
            let mut opts = ProfileOptions::<f64> { n_steps, ..ProfileOptions::default() };
            if let Some(t) = tol {
                opts.tol = t;
            }
            if let Some(t) = tol_residual {
                opts.tol_residual = t;
            }
            profile(kind, &pp, &opts, out.as_deref(), summary.as_deref(), stdout, stderr)
        }
        Command::Classify { params, measure, output } => {
            let pp = params.build()?;
            let m = parse_measure(&measure)?;
            emit(&classify(&pp, m), &output, stdout)
        }
        Command::Pde2d { params, nr, ntheta, r_min, r_max, terms, inner, outer, initial, tol, exclusion, out, meta } => {
            let pp = params.build()?;
            let grid = PolarGrid::new(r_min, r_max, nr, ntheta)?;
            let terms = parse_terms(&terms)?;
            let boundary = BoundarySpec::new(parse_inner(&inner, r_min)?, parse_outer(&outer)?);
            let mut opts = SolverOptions::<f64>::default();
            if let Some(t) = tol {
                opts.tol = t;
            }
            opts.initial = match initial.as_str() {
                "continuation" => InitialIterate::Continuation,
                "log" => InitialIterate::LogInterpolated,
                other => return Err(Error::Format(format!("unknown initial iterate '{other}' (continuation, log)")).into()),
            };
            pde2d(grid, pp, terms, boundary, &opts, exclusion, out.as_deref(), meta.as_deref(), stdout)
        }
        Command::Sweep { params, axis, what, measure, jobs, output } => {
            let axes = axis.iter().map(|a| Axis::parse(a)).collect::<Result<Vec<_>, _>>()?;
            let what = What::parse(&what)?;
            let measure = parse_measure(&measure)?;
            if output.format()? != Format::Json {
                return Err(Error::Format("sweeps are written as JSON only".into()).into());
            }
            let report = sweep(&params, axes, what, measure, jobs.unwrap_or(0))?;
            let bytes = json_envelope("sweep", &report)?;
            write_to(output.out.as_deref(), &bytes, stdout)
        }
    }
}

impl ParamArgs {
    fn build(&self) -> Result<ProblemParams<f64>, Error> {
        ProblemParams::new(self.n, self.p, self.q, self.m)
    }
}

impl OutputArgs {
    fn format(&self) -> Result<Format, Error> {
        self.format.parse()
    }
}

fn emit<R: sel_core::Report>(report: &R, output: &OutputArgs, stdout: Out) -> Result<(), Failure> {
    let bytes = emit_report(report, output.format()?)?;
    write_to(output.out.as_deref(), &bytes, stdout)
}

fn parse_measure(s: &str) -> Result<MeasureDescriptor<f64>, Error> {
    if s == "general" {
        return Ok(MeasureDescriptor::GeneralNonnegative);
    }
    if let Some(mass) = s.strip_prefix("dirac:") {
        let mass: f64 = mass.parse().map_err(|_| Error::Format(format!("bad Dirac mass '{mass}'")))?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("Dirac mass must be positive, got {mass}")));
        }
        return Ok(MeasureDescriptor::DiracPoint { mass });
    }
    Err(Error::Format(format!("unknown measure '{s}' (general, dirac:MASS)")))
}

fn parse_terms(s: &str) -> Result<Terms, Error> {
    match s {
        "harmonic" => Ok(Terms::HARMONIC),
        "gradient" => Ok(Terms::GRADIENT_ONLY),
        "source" => Ok(Terms::SOURCE_ONLY),
        "full" => Ok(Terms::FULL),
        other => Err(Error::Format(format!("unknown terms '{other}' (harmonic, gradient, source, full)"))),
    }
}

fn parse_inner(s: &str, r_min: f64) -> Result<InnerBoundary<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Format(format!("bad number '{t}' in '{s}'")));
    match parts.as_slice() {
        ["dirac", mass] => Ok(InnerBoundary::MollifiedDirac { mass: num(mass)?, width: r_min / 100.0 }),
        ["dirac", mass, width] => Ok(InnerBoundary::MollifiedDirac { mass: num(mass)?, width: num(width)? }),
        ["profile", kind] => Ok(InnerBoundary::SeparableProfile { kind: kind.parse()? }),
        _ => Err(Error::Format(format!("unknown inner boundary '{s}' (dirac:MASS[:WIDTH], profile:KIND)"))),
    }
}

fn parse_outer(s: &str) -> Result<OuterBoundary, Error> {
    match s {
        "zero" => Ok(OuterBoundary::Zero),
        "separable" => Ok(OuterBoundary::Separable),
        other => Err(Error::Format(format!("unknown outer boundary '{other}' (zero, separable)"))),
    }
}

#[derive(Debug, Serialize)]
struct PhiSummary {
    params: ProblemParams<f64>,
    m_star: Option<f64>,
    structure: RootStructure,
    y0: f64,
    roots: Vec<f64>,
    /// Φ at each root.
    residuals: Vec<f64>,
}

fn phi_summary(pp: &ProblemParams<f64>) -> Result<PhiSummary, Error> {
    let r = phi_root_structure(pp)?;
    let residuals = r.roots.iter().map(|&x| phi_eval(x, pp)).collect::<Result<Vec<_>, _>>()?;
    Ok(PhiSummary {
        params: *pp,
        m_star: m_star(pp.n(), pp.p()).ok(),
        structure: r.structure,
        y0: r.y0,
        roots: r.roots,
        residuals,
    })
}

#[derive(Debug, Serialize)]
struct ProfileEntry {
    pole_value: f64,
    endpoint_value: f64,
    residual_sup: f64,
    max_value: f64,
    n_steps: usize,
    /// Φ at the maximum (OMEGA only).
    phi_at_max: Option<f64>,
    csv: Option<String>,
}

#[derive(Debug, Serialize)]
struct ProfileSummary {
    kind: ProfileKind,
    params: ProblemParams<f64>,
    options: ProfileOptions<f64>,
    status: &'static str,
    message: Option<&'static str>,
    /// Grid sizes searched without success.
    resolutions: Vec<usize>,
    /// Upper bound on the maximum (ETA only, when it applies).
    eta_bound: Option<f64>,
    solutions: Vec<ProfileEntry>,
}

fn numbered(path: &Path, k: usize) -> PathBuf {
    if k == 0 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{k}"),
    };
    path.with_file_name(name)
}

fn profile(
    kind: ProfileKind,
    pp: &ProblemParams<f64>,
    opts: &ProfileOptions<f64>,
    out: Option<&Path>,
    summary_path: Option<&Path>,
    stdout: Out,
    stderr: Out,
) -> Result<(), Failure> {
    let outcome = solve_profile_with(kind, pp, opts)?;
    let eta_bound = if kind == ProfileKind::Eta { eta_sup_bound(pp) } else { None };
    let mut summary = ProfileSummary {
        kind,
        params: *pp,
        options: opts.clone(),
        status: "found",
        message: None,
        resolutions: Vec::new(),
        eta_bound,
        solutions: Vec::new(),
    };
    match &outcome {
        ProfileOutcome::Found(sols) => {
            for (k, sol) in sols.iter().enumerate() {
                let csv = match out {
                    Some(base) => {
                        let path = numbered(base, k);
                        write_to(Some(&path), &profile_csv(sol), stdout)?;
                        Some(path.display().to_string())
                    }
                    None => None,
                };
                let phi_at_max = if kind == ProfileKind::Omega { Some(omega_max_phi(sol)?) } else { None };
                summary.solutions.push(ProfileEntry {
                    pole_value: sol.pole_value,
                    endpoint_value: sol.endpoint_value,
                    residual_sup: sol.residual_sup,
                    max_value: sol.max_value(),
                    n_steps: sol.n_steps(),
                    phi_at_max,
                    csv,
                });
            }
        }
        ProfileOutcome::NoSolution { resolutions } => {
            summary.status = "no_solution";
            summary.message = Some(NO_SOLUTION);
            summary.resolutions = resolutions.clone();
        }
    }
    let bytes = json_envelope("profile", &summary)?;
    write_to(summary_path, &bytes, stdout)?;
    if !outcome.is_found() {
        let _ = writeln!(stderr, "{NO_SOLUTION} for {kind} at N = {}, p = {}, q = {}, m = {}", pp.n(), pp.p(), pp.q(), pp.m());
        return Err(Failure::NoResult(format!(
            "shooting sweep found no bracket at resolutions {:?}",
            summary.resolutions
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FieldMeta {
    params: ProblemParams<f64>,
    grid: PolarGrid<f64>,
    terms: Terms,
    boundary: BoundarySpec<f64>,
    solver: SolverOptions<f64>,
    newton_iters: usize,
    final_residual: f64,
    residual_certificate: f64,
    high_order_residual: f64,
    residual_history: Vec<f64>,
    continuation: Vec<f64>,
    fit: Option<ExponentFit<f64>>,
    fit_error: Option<String>,
    threshold: Option<ThresholdEstimate<f64>>,
    threshold_skipped: Option<String>,
    csv: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn pde2d(
    grid: PolarGrid<f64>,
    pp: ProblemParams<f64>,
    terms: Terms,
    boundary: BoundarySpec<f64>,
    opts: &SolverOptions<f64>,
    exclusion: f64,
    out: Option<&Path>,
    meta_path: Option<&Path>,
    stdout: Out,
) -> Result<(), Failure> {
    let sol = solve_bvp(grid, pp, terms, boundary, opts)?;
    let (fit, fit_error) = match fit_exponent_default(&sol) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (threshold, threshold_skipped) = match estimate_m_threshold(&sol, &pp, exclusion) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(path) = out {
        write_to(Some(path), &field_csv(&sol), stdout)?;
    }
    let meta = FieldMeta {
        params: pp,
        grid,
        terms,
        boundary,
        solver: opts.clone(),
        newton_iters: sol.newton_iters,
        final_residual: sol.final_residual,
        residual_certificate: sol.residual_certificate(),
        high_order_residual: sol.high_order_residual(),
        residual_history: sol.residual_history.clone(),
        continuation: sol.continuation.clone(),
        fit,
        fit_error,
        threshold,
        threshold_skipped,
        csv: out.map(|p| p.display().to_string()),
    };
    let bytes = json_envelope("pde2d", &meta)?;
    write_to(meta_path, &bytes, stdout)
}

#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Axis, Error> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, n] = parts.as_slice() else {
            return Err(Error::Format(format!("axis '{s}' must be name:lo:hi:n")));
        };
        if !["N", "p", "q", "m"].contains(name) {
            return Err(Error::Format(format!("axis '{name}' is not a parameter (N, p, q, m)")));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Format(format!("bad number '{t}' in axis '{s}'")));
        let n: usize = n.parse().map_err(|_| Error::Format(format!("bad count '{n}' in axis '{s}'")))?;
        if n == 0 {
            return Err(Error::Format(format!("axis '{s}' needs at least one point")));
        }
        Ok(Axis { name: name.to_string(), lo: num(lo)?, hi: num(hi)?, n })
    }

    pub fn value(&self, k: usize) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum What {
    Classify,
    Constants,
    PhiRoots,
}

impl What {
    fn parse(s: &str) -> Result<What, Error> {
        match s {
            "classify" => Ok(What::Classify),
            "constants" => Ok(What::Constants),
            "phi-roots" => Ok(What::PhiRoots),
            other => Err(Error::Format(format!("unknown sweep target '{other}' (classify, constants, phi-roots)"))),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum PointResult {
    Classify(RegimeReport<f64>),
    Constants(ConstantReport<f64>),
    PhiRoots(PhiSummary),
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    index: usize,
    #[serde(rename = "N")]
    n: u32,
    p: f64,
    q: f64,
    m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<PointResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    what: What,
    axes: Vec<Axis>,
    n_points: usize,
    n_errors: usize,
    points: Vec<SweepPoint>,
}

fn sweep(
    base: &ParamArgs,
    axes: Vec<Axis>,
    what: What,
    measure: MeasureDescriptor<f64>,
    jobs: usize,
) -> Result<SweepReport, Failure> {
    for a in &axes {
        if a.name == "N" && (0..a.n).any(|k| a.value(k).fract() != 0.0 || a.value(k) < 0.0) {
            return Err(Error::Format(format!("axis N must take whole values, got {}:{}:{}", a.lo, a.hi, a.n)).into());
        }
    }
    let total: usize = axes.iter().map(|a| a.n).product();
    let point = |index: usize| -> SweepPoint {
        let mut rest = index;
        let mut args = base.clone();
        // The first axis varies slowest.
        for a in axes.iter().rev() {
            let v = a.value(rest % a.n);
            rest /= a.n;
            match a.name.as_str() {
                "N" => args.n = v as u32,
                "p" => args.p = v,
                "q" => args.q = v,
                _ => args.m = v,
            }
        }
        let res = args.build().and_then(|pp| match what {
            What::Classify => Ok(PointResult::Classify(classify(&pp, measure))),
            What::Constants => Ok(PointResult::Constants(constant_report(&pp))),
            What::PhiRoots => phi_summary(&pp).map(PointResult::PhiRoots),
        });
        let (result, error) = match res {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        SweepPoint { index, n: args.n, p: args.p, q: args.q, m: args.m, result, error }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let points: Vec<SweepPoint> = pool.install(|| (0..total).into_par_iter().map(point).collect());
    let n_errors = points.iter().filter(|p| p.error.is_some()).count();
    log::info!("sweep finished: {total} points, {n_errors} rejected");
    Ok(SweepReport { what, axes, n_points: total, n_errors, points })
}
