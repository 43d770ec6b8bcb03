//! Total decision functions over `(N, p, q, m)` returning cited verdicts.
//!
//! Tags in `citations` are short descriptive labels of the result a verdict
//! rests on. Constants that are only known to exist (smallness thresholds)
//! show up as entries in `flags`, never as numbers.

use serde::Serialize;

use crate::constants::m_one_supremum;
use crate::params::ProblemParams;
use crate::scalar::{near, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SingularityType {
    WeakPoisson,
    LogCritical,
    StrongAlpha,
    NotCovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Removability {
    RemovableIsolated,
    NotCovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExistenceVerdict {
    SolvableSmallMass,
    SolvableUnderCapacityCondition,
    NecessaryConditionViolated,
    OutsideProvenRegimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TraceType {
    RadonMeasureTrace,
    BorelTracePossible,
    NotCovered,
}

/// Boundary capacity that vanishes on a point in the supercritical ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NullCapacity {
    /// `Cap_{2/p, p'}`, null on points iff `p ≥ (N+1)/(N-1)`.
    #[serde(rename = "Cap_{2/p,p'}")]
    Source,
    /// `Cap_{(2-q)/q, q'}`, null on points iff `q ≥ (N+1)/N`.
    #[serde(rename = "Cap_{(2-q)/q,q'}")]
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiracVerdict {
    pub verdict: ExistenceVerdict,
    /// Capacities for which a single point is null; empty when solvable.
    pub null_capacities: Vec<NullCapacity>,
    pub citations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionTag {
    Unconditional,
    CapPOnly,
    CapQOnly,
    BothMin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureCondition {
    pub tag: ConditionTag,
    /// Which parameter range produced the tag.
    pub route: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureConditions {
    pub applicable: Vec<MeasureCondition>,
}

impl MeasureConditions {
    pub fn contains(&self, tag: ConditionTag) -> bool {
        self.applicable.iter().any(|c| c.tag == tag)
    }

    pub fn tags(&self) -> Vec<ConditionTag> {
        self.applicable.iter().map(|c| c.tag).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeasureDescriptor<T> {
    DiracPoint { mass: T },
    GeneralNonnegative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport<T> {
    pub params: ProblemParams<T>,
    pub measure: MeasureDescriptor<T>,
    #[serde(rename = "existence")]
    pub existence_verdict: ExistenceVerdict,
    pub removability: Removability,
    #[serde(rename = "singularity")]
    pub singularity_type: SingularityType,
    #[serde(rename = "trace")]
    pub trace_type: TraceType,
    pub conditions: Vec<ConditionTag>,
    pub null_capacities: Vec<NullCapacity>,
    pub citations: Vec<String>,
    pub flags: Vec<String>,
}

pub mod tags {
    pub const WEAK_SINGULARITY: &str = "isolated-singularity/poisson-kernel-behaviour";
    pub const LOG_SINGULARITY: &str = "isolated-singularity/log-corrected-critical-behaviour";
    pub const STRONG_SINGULARITY: &str = "isolated-singularity/separable-r^-alpha-behaviour";
    pub const REMOVABLE: &str = "removability/isolated-boundary-point";
    pub const SMALL_MASS: &str = "measure-data/subcritical-small-measures";
    pub const CAP_P: &str = "measure-data/source-capacity-sufficient";
    pub const CAP_Q: &str = "measure-data/gradient-capacity-sufficient";
    pub const CAP_P_MIXED: &str = "measure-data/source-capacity-via-capacity-comparison";
    pub const CAP_Q_MIXED: &str = "measure-data/gradient-capacity-via-capacity-comparison";
    pub const BOTH_MIN: &str = "measure-data/minimum-of-both-capacities";
    pub const NECESSARY_P: &str = "measure-data/necessary-source-capacity-absolute-continuity";
    pub const NECESSARY_Q: &str = "measure-data/necessary-gradient-capacity-absolute-continuity";
    pub const POINT_NULLITY: &str = "capacity/point-null-iff-ab<=N-1";
    pub const RADON_TRACE: &str = "trace/radon-measure-existence";
    pub const BOREL_TRACE: &str = "trace/borel-dichotomy";
    pub const BOREL_EXAMPLES: &str = "trace/explicit-r^-beta-examples";

    pub const FLAG_SMALL_M_CRITICAL: &str = "requires 0<m<ε*";
    pub const FLAG_SMALL_MASS: &str = "requires total mass below an unquantified ε";
    pub const FLAG_M_ONE: &str = "requires 0<m<=m_1(p,b) for some b>1";
    pub const FLAG_BOREL_INFORMATIONAL: &str = "informational: no constructive recipe for the Borel part";
    pub const FLAG_M_ZERO: &str = "m = 0: gradient term absent, outside the proven regimes";
}

fn p_below_sobolev<T: Real>(n: u32, p: T) -> bool {
    if n <= 2 {
        return true;
    }
    let nn = T::from_u32(n).expect("small integer");
    let ps = (nn + T::lit(2.0)) / (nn - T::lit(2.0));
    p < ps && !near(p, ps)
}

/// Boundary behaviour near an isolated singularity from `(N, p)` alone.
pub fn classify_boundary_singularity<T: Real>(n: u32, p: T) -> SingularityType {
    if n < 2 || !(p > T::one()) {
        return SingularityType::NotCovered;
    }
    let nn = T::from_u32(n).expect("small integer");
    let p_c = (nn + T::one()) / (nn - T::one());
    if near(p, p_c) {
        SingularityType::LogCritical
    } else if p < p_c {
        SingularityType::WeakPoisson
    } else if p_below_sobolev(n, p) {
        SingularityType::StrongAlpha
    } else {
        SingularityType::NotCovered
    }
}

/// Same as [`classify_boundary_singularity`], also enforcing `q < 2p/(p+1)` and `m > 0`.
pub fn singularity_for_params<T: Real>(params: &ProblemParams<T>) -> SingularityType {
    let covered = params.m() > T::zero() && params.q_below_critical();
    if !covered {
        return SingularityType::NotCovered;
    }
    classify_boundary_singularity(params.n(), params.p())
}

/// Returns the verdict plus the qualitative flag for the critical-`q` case.
pub fn removability_with_flags<T: Real>(params: &ProblemParams<T>) -> (Removability, Option<&'static str>) {
    let p = params.p();
    let p_c = params.p_c();
    let strong = p > p_c && !near(p, p_c) && p_below_sobolev(params.n(), p);
    if !strong || !(params.m() > T::zero()) {
        return (Removability::NotCovered, None);
    }
    if params.q_is_critical() {
        (Removability::RemovableIsolated, Some(tags::FLAG_SMALL_M_CRITICAL))
    } else if params.q_below_critical() {
        (Removability::RemovableIsolated, None)
    } else {
        (Removability::NotCovered, None)
    }
}

pub fn removability<T: Real>(params: &ProblemParams<T>) -> Removability {
    removability_with_flags(params).0
}

fn supercritical<T: Real>(x: T, crit: T) -> bool {
    x > crit || near(x, crit)
}

/// Whether `kδ₀` is admissible boundary data for small `k`.
pub fn dirac_admissibility<T: Real>(n: u32, p: T, q: T) -> DiracVerdict {
    let nn = T::from_u32(n.max(2)).expect("small integer");
    let p_c = (nn + T::one()) / (nn - T::one());
    let q_c = (nn + T::one()) / nn;
    let mut null = Vec::new();
    let mut citations = Vec::new();
    if supercritical(q, q_c) {
        null.push(NullCapacity::Gradient);
        citations.push(tags::NECESSARY_Q.to_string());
    }
    if supercritical(p, p_c) {
        null.push(NullCapacity::Source);
        citations.push(tags::NECESSARY_P.to_string());
    }
    if null.is_empty() {
        DiracVerdict {
            verdict: ExistenceVerdict::SolvableSmallMass,
            null_capacities: null,
            citations: vec![tags::SMALL_MASS.to_string()],
        }
    } else {
        citations.push(tags::POINT_NULLITY.to_string());
        DiracVerdict { verdict: ExistenceVerdict::NecessaryConditionViolated, null_capacities: null, citations }
    }
}

/// Sufficient conditions on a general nonnegative boundary measure.
pub fn measure_conditions<T: Real>(n: u32, p: T, q: T) -> MeasureConditions {
    let nn = T::from_u32(n.max(2)).expect("small integer");
    let p_c = (nn + T::one()) / (nn - T::one());
    let q_c = (nn + T::one()) / nn;
    let q_star = T::lit(2.0) * p / (p + T::one());
    let p_sup = supercritical(p, p_c);
    let q_sup = supercritical(q, q_c);
    let q_star_sup = supercritical(q, q_star);
    let mut out = Vec::new();
    if !p_sup && !q_sup {
        out.push(MeasureCondition { tag: ConditionTag::Unconditional, route: "p<p_c, q<q_c" });
    }
    if p_sup && !q_sup {
        out.push(MeasureCondition { tag: ConditionTag::CapPOnly, route: "p>=p_c, q<q_c" });
    }
    if q_sup && !q_star_sup {
        out.push(MeasureCondition { tag: ConditionTag::CapPOnly, route: "q_c<=q<2p/(p+1)" });
    }
    if !p_sup && q_sup {
        out.push(MeasureCondition { tag: ConditionTag::CapQOnly, route: "p<p_c, q>=q_c" });
    }
    if p_sup && q_star_sup {
        out.push(MeasureCondition { tag: ConditionTag::CapQOnly, route: "p>=p_c, q>=2p/(p+1)" });
    }
    out.push(MeasureCondition { tag: ConditionTag::BothMin, route: "always" });
    MeasureConditions { applicable: out }
}

fn condition_citation(c: &MeasureCondition) -> &'static str {
    match (c.tag, c.route) {
        (ConditionTag::Unconditional, _) => tags::SMALL_MASS,
        (ConditionTag::CapPOnly, "p>=p_c, q<q_c") => tags::CAP_P,
        (ConditionTag::CapPOnly, _) => tags::CAP_P_MIXED,
        (ConditionTag::CapQOnly, "p<p_c, q>=q_c") => tags::CAP_Q,
        (ConditionTag::CapQOnly, _) => tags::CAP_Q_MIXED,
        (ConditionTag::BothMin, _) => tags::BOTH_MIN,
    }
}

pub fn trace_existence_with_flags<T: Real>(params: &ProblemParams<T>) -> (TraceType, Option<&'static str>) {
    let m = params.m();
    if !(m > T::zero()) {
        return (TraceType::NotCovered, None);
    }
    if params.q_is_critical() {
        if m <= m_one_supremum(params.p()) {
            (TraceType::RadonMeasureTrace, Some(tags::FLAG_M_ONE))
        } else {
            (TraceType::NotCovered, None)
        }
    } else if params.q_below_critical() {
        (TraceType::RadonMeasureTrace, None)
    } else if params.q() < params.p() {
        (TraceType::BorelTracePossible, Some(tags::FLAG_BOREL_INFORMATIONAL))
    } else {
        (TraceType::NotCovered, None)
    }
}

pub fn trace_existence<T: Real>(params: &ProblemParams<T>) -> TraceType {
    trace_existence_with_flags(params).0
}

/// Runs every decision function and gathers citations.
pub fn classify<T: Real>(params: &ProblemParams<T>, measure: MeasureDescriptor<T>) -> RegimeReport<T> {
    let mut citations: Vec<String> = Vec::new();
    let mut flags: Vec<String> = Vec::new();
    let push = |v: &mut Vec<String>, s: &str| {
        if !v.iter().any(|x| x == s) {
            v.push(s.to_string());
        }
    };

    let singularity_type = singularity_for_params(params);
    match singularity_type {
        SingularityType::WeakPoisson => push(&mut citations, tags::WEAK_SINGULARITY),
        SingularityType::LogCritical => push(&mut citations, tags::LOG_SINGULARITY),
        SingularityType::StrongAlpha => push(&mut citations, tags::STRONG_SINGULARITY),
        SingularityType::NotCovered => {}
    }

    let (removability, rflag) = removability_with_flags(params);
    if removability == Removability::RemovableIsolated {
        push(&mut citations, tags::REMOVABLE);
    }
    if let Some(f) = rflag {
        push(&mut flags, f);
    }

    let conditions = measure_conditions(params.n(), params.p(), params.q());
    let dirac = dirac_admissibility(params.n(), params.p(), params.q());
    let (existence_verdict, null_capacities) = if !(params.m() > T::zero()) {
        push(&mut flags, tags::FLAG_M_ZERO);
        (ExistenceVerdict::OutsideProvenRegimes, Vec::new())
    } else {
        match measure {
            MeasureDescriptor::DiracPoint { .. } => {
                for c in &dirac.citations {
                    push(&mut citations, c);
                }
                if dirac.verdict == ExistenceVerdict::SolvableSmallMass {
                    push(&mut flags, tags::FLAG_SMALL_MASS);
                }
                (dirac.verdict, dirac.null_capacities.clone())
            }
            MeasureDescriptor::GeneralNonnegative => {
                for c in &conditions.applicable {
                    push(&mut citations, condition_citation(c));
                }
                if conditions.contains(ConditionTag::Unconditional) {
                    push(&mut flags, tags::FLAG_SMALL_MASS);
                    (ExistenceVerdict::SolvableSmallMass, Vec::new())
                } else {
                    (ExistenceVerdict::SolvableUnderCapacityCondition, Vec::new())
                }
            }
        }
    };

    let (trace_type, tflag) = trace_existence_with_flags(params);
    match trace_type {
        TraceType::RadonMeasureTrace => push(&mut citations, tags::RADON_TRACE),
        TraceType::BorelTracePossible => {
            push(&mut citations, tags::BOREL_TRACE);
            push(&mut citations, tags::BOREL_EXAMPLES);
        }
        TraceType::NotCovered => {}
    }
    if let Some(f) = tflag {
        push(&mut flags, f);
    }

    RegimeReport {
        params: *params,
        measure,
        existence_verdict,
        removability,
        singularity_type,
        trace_type,
        conditions: conditions.tags(),
        null_capacities,
        citations,
        flags,
    }
}
