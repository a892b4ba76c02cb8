//! End-to-end certification that Q_B of PSU₃(q) on the unital is very
//! simple over GF(2).
//!
//! Every step is recorded as a check with status `computed` (derived here
//! from scratch), `cited` (taken from the facts file), `refuted` or
//! `inconclusive`. The first refuted check stops the pipeline.
//!
//! The two hypotheses verified for the dimension N = q³ are:
//! 1. no proper subgroup has index dividing N;
//! 2. for every factorization N = ab with a, b > 1, no absolutely simple
//!    GF(2)-module of dimension a (or of dimension b) exists.
//!
//! Together with absolute simplicity they imply very simplicity.

use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hermitian::enumerate_unital;
use crate::matgroup::{trace_census, GeneratorSet, TraceCensus};
use crate::meataxe::{
    is_absolutely_irreducible, is_irreducible, qb_module, AbsoluteOutcome,
    Verdict as MeatAxeVerdict,
};
use crate::perm::{
    is_transitive, orbits, pair_orbit_count, stabilizer_index, stabilizer_orbit_sizes, UnitalAction,
};
use crate::traces::{escape_witness, Escape};

pub const CERTIFIABLE_Q: [u32; 2] = [4, 8];
const FACTS_VERSION: u32 = 1;

const EMBEDDED_FACTS_Q4: &str = include_str!("../data/facts_q4.json");
const EMBEDDED_FACTS_Q8: &str = include_str!("../data/facts_q8.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcedValue {
    pub value: u64,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcedList {
    pub values: Vec<u64>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Citation {
    pub source: String,
}

/// Classification results used without proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CitedFacts {
    pub version: u32,
    pub q: u32,
    /// Least index of a proper subgroup of PSU₃(q).
    pub min_subgroup_index: SourcedValue,
    /// Dimensions of absolutely irreducible modules realizable over GF(2);
    /// only meaningful for q = 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brauer_f2_dimensions: Option<SourcedList>,
    pub dichotomy: Citation,
    /// Identification of the 2-torsion of the Jacobian with Q_B.
    pub bridge: Citation,
}

impl CitedFacts {
    /// Parses and validates the structure. Values are compared with
    /// computed data by the checks, not here, so a wrong value shows up as
    /// a refutation rather than an input error.
    pub fn parse(text: &str, q: u32) -> Result<Self> {
        let facts: Self =
            serde_json::from_str(text).map_err(|e| Error::Facts(format!("malformed JSON: {e}")))?;
        if facts.version != FACTS_VERSION {
            return Err(Error::Facts(format!(
                "unsupported version {} (expected {FACTS_VERSION})",
                facts.version
            )));
        }
        if facts.q != q {
            return Err(Error::Facts(format!(
                "file is for q = {}, requested q = {q}",
                facts.q
            )));
        }
        let sources = [
            &facts.min_subgroup_index.source,
            &facts.dichotomy.source,
            &facts.bridge.source,
        ];
        if sources.iter().any(|s| s.trim().is_empty()) {
            return Err(Error::Facts("every cited fact needs a source".into()));
        }
        if let Some(list) = &facts.brauer_f2_dimensions {
            if q != 4 {
                return Err(Error::Facts(
                    "brauer_f2_dimensions is only used for q = 4".into(),
                ));
            }
            if list.source.trim().is_empty() || list.values.contains(&0) {
                return Err(Error::Facts(
                    "brauer_f2_dimensions needs a source and positive values".into(),
                ));
            }
        }
        Ok(facts)
    }

    pub fn load(path: &Path, q: u32) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, q)
    }

    /// The facts shipped with the crate.
    pub fn embedded(q: u32) -> Result<Self> {
        match q {
            4 => Self::parse(EMBEDDED_FACTS_Q4, q),
            8 => Self::parse(EMBEDDED_FACTS_Q8, q),
            _ => Err(Error::UnsupportedQ(u64::from(q))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Computed,
    Cited,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub data: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub citations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckRecord {
    fn new(name: &str, status: Status, data: Value) -> Self {
        Self {
            name: name.into(),
            status,
            data,
            citations: Vec::new(),
            seed: None,
        }
    }

    fn computed(name: &str, ok: bool, data: Value) -> Self {
        Self::new(
            name,
            if ok {
                Status::Computed
            } else {
                Status::Refuted
            },
            data,
        )
    }

    fn cite(mut self, source: &str) -> Self {
        self.citations.push(source.into());
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Computed | Status::Cited)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertVerdict {
    VerySimpleCertified,
    Refuted,
    Inconclusive,
}

impl CertVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::VerySimpleCertified => 0,
            Self::Refuted => 1,
            Self::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub q: u32,
    pub seed: u64,
    pub degree: u64,
    pub verdict: CertVerdict,
    pub verdict_text: String,
    /// Sources for the cited steps in `verdict_text`.
    pub citations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_check: Option<String>,
    pub checks: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn v2(x: &BigUint) -> u64 {
    x.trailing_zeros().unwrap_or(0)
}

/// Passes iff n − 1 is a power of 2 equal to the 2-part of the group order.
/// For a doubly transitive group this makes Q_B absolutely simple.
pub fn check_brauer_nesbitt(group_order: &BigUint, n: u64) -> Result<CheckRecord> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::Precondition(format!(
            "degree {n} must be odd and at least 3"
        )));
    }
    let m = n - 1;
    let power_of_two = m.is_power_of_two();
    let two_part = v2(group_order);
    let log = u64::from(m.trailing_zeros());
    let odd_part = group_order >> two_part;
    let ok = power_of_two && two_part == log && *group_order > BigUint::ZERO;
    Ok(CheckRecord::computed(
        "check_brauer_nesbitt",
        ok,
        json!({
            "group_order": group_order.to_string(),
            "n": n,
            "v2_group_order": two_part,
            "odd_part": odd_part.to_string(),
            "n_minus_1_is_power_of_2": power_of_two,
            "log2_n_minus_1": if power_of_two { Some(log) } else { None },
        }),
    ))
}

/// Index hypothesis: every proper subgroup has index > N, so none has index
/// dividing N. The cited bound must also not exceed the index of a point
/// stabilizer, which is a proper subgroup we computed.
pub fn check_very3_hyp1(facts: &CitedFacts, dim: u64, point_stabilizer_index: u128) -> CheckRecord {
    let bound = facts.min_subgroup_index.value;
    let above = bound > dim;
    let consistent = u128::from(bound) <= point_stabilizer_index;
    let status = if above && consistent {
        Status::Cited
    } else {
        Status::Refuted
    };
    CheckRecord::new(
        "check_very3_hyp1",
        status,
        json!({
            "N": dim,
            "min_subgroup_index": bound,
            "exceeds_N": above,
            "point_stabilizer_index": point_stabilizer_index.to_string(),
            "consistent_with_point_stabilizer": consistent,
        }),
    )
    .cite(&facts.min_subgroup_index.source)
}

/// Proper factorizations N = a·b with a, b > 1; for N a power of 2 these
/// are (2^i, 2^(k−i)).
fn factorizations(dim: u64) -> Vec<(u64, u64)> {
    (2..dim)
        .filter(|&a| dim.is_multiple_of(a))
        .map(|a| (a, dim / a))
        .collect()
}

/// Factorization hypothesis. For q = 4 it reads the cited list of
/// GF(2)-realizable dimensions. For larger q it combines computed escape
/// witnesses (no proper tensor product of twists of the adjoint module is
/// realizable over GF(2)) with the cited dichotomy (every other absolutely
/// irreducible module has dimension divisible by 3, so not a power of 2).
pub fn check_very3_hyp2(q: u32, census: &TraceCensus, facts: &CitedFacts) -> Result<CheckRecord> {
    if !CERTIFIABLE_Q.contains(&q) || census.q != q {
        return Err(Error::Precondition(format!(
            "hypothesis 2 is checked for q in {CERTIFIABLE_Q:?}"
        )));
    }
    let dim = u64::from(q).pow(3);
    let facs = factorizations(dim);
    if q == 4 {
        let Some(list) = &facts.brauer_f2_dimensions else {
            return Ok(CheckRecord::new(
                "check_very3_hyp2",
                Status::Inconclusive,
                json!({
                    "N": dim,
                    "reason": "no GF(2) dimension data, and the trace route is unavailable",
                    "census_r": census.r,
                    "census_threshold_holds": census.threshold_holds,
                }),
            ));
        };
        let nontrivial: Vec<u64> = list
            .values
            .iter()
            .copied()
            .filter(|&d| d > 1 && d.is_power_of_two())
            .collect();
        let blocked: Vec<u64> = facs
            .iter()
            .map(|&(a, _)| a)
            .filter(|a| list.values.contains(a))
            .collect();
        let ok = nontrivial == [dim] && blocked.is_empty();
        let status = if ok { Status::Cited } else { Status::Refuted };
        return Ok(CheckRecord::new(
            "check_very3_hyp2",
            status,
            json!({
                "N": dim,
                "route": "gf2-dimension-table",
                "gf2_dimensions": list.values,
                "nontrivial_power_of_2_dimensions": nontrivial,
                "factorizations": facs,
                "realizable_factors": blocked,
            }),
        )
        .cite(&list.source));
    }
    let escapes: Vec<Escape> = (1..=u64::from(q) - 2)
        .map(|m| escape_witness(m, q))
        .collect::<Result<_>>()?;
    let all = escapes.iter().all(Escape::is_witness);
    Ok(CheckRecord::computed(
        "check_very3_hyp2",
        all,
        json!({
            "N": dim,
            "route": "trace-escape",
            "census": census,
            "escapes": escapes,
            "factorizations": facs,
            "argument": "A factor a of N with 1 < a < N is a power of 2, so it is not divisible by 3. By the dichotomy an absolutely irreducible module of that dimension is a tensor product of twists indexed by a proper subset S, whose torus trace t^M escapes GF(2) for the recorded witness, so it is not realizable over GF(2).",
        }),
    )
    .cite(&facts.dichotomy.source))
}

/// Inputs beyond (q, seed); the generator override exists to exercise the
/// refutation path.
#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub facts: Option<CitedFacts>,
    pub generators: Option<GeneratorSet>,
}

pub fn certify_very_simple(q: u32, seed: u64) -> Result<Certificate> {
    certify_with(q, seed, CertifyOptions::default())
}

pub fn certify_with(q: u32, seed: u64, options: CertifyOptions) -> Result<Certificate> {
    if !CERTIFIABLE_Q.contains(&q) {
        return Err(Error::UnsupportedQ(u64::from(q)));
    }
    let facts = match options.facts {
        Some(f) if f.q != q => {
            return Err(Error::Facts(format!(
                "facts are for q = {}, requested q = {q}",
                f.q
            )))
        }
        Some(f) => f,
        None => CitedFacts::embedded(q)?,
    };
    let mut run = Pipeline { checks: Vec::new() };
    let dim = u64::from(q).pow(3);
    let n = dim + 1;

    let unital = enumerate_unital(q)?;
    let points = unital.n() as u64;
    if run.push(CheckRecord::computed(
        "unital_count",
        points == n,
        json!({ "q": q, "n": points, "expected": n }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    let generators = match options.generators {
        Some(g) => g,
        None => crate::matgroup::su3_generators(q)?,
    };
    let action = UnitalAction::from_generators(unital, generators)?;
    let report = action.order_report();
    let order = action.group.order();
    if run.push(CheckRecord::computed(
        "group_order",
        report.computed_order == report.expected_psu3_order,
        json!({
            "su3_order": report.su3_order.to_string(),
            "center_order": report.center,
            "expected": report.expected_psu3_order.to_string(),
            "computed": order.to_string(),
            "base": report.base,
            "basic_orbit_lengths": report.orbit_lengths,
        }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    let orbit_sizes: Vec<usize> = orbits(action.group.degree(), action.group.generators())
        .iter()
        .map(Vec::len)
        .collect();
    if run.push(CheckRecord::computed(
        "transitivity",
        is_transitive(&action.group),
        json!({ "orbit_sizes": orbit_sizes }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    let stab_orbits = stabilizer_orbit_sizes(&action.group, 0)?;
    let pair_orbits = pair_orbit_count(action.group.degree(), &action.essential_perms());
    if run.push(CheckRecord::computed(
        "double_transitivity",
        stab_orbits == [1, dim as usize] && pair_orbits == 1,
        json!({
            "point": 0,
            "stabilizer_orbit_sizes": stab_orbits,
            "ordered_pair_orbits": pair_orbits,
        }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    let index = stabilizer_index(&action.group, 0)?;
    if run.push(CheckRecord::computed(
        "stabilizer_index",
        index == u128::from(n),
        json!({ "point": 0, "index": index.to_string(), "expected": n }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    let perms = action.essential_perms();
    let qb = qb_module(&perms)?;
    if run.push(CheckRecord::computed(
        "qb_dimension",
        qb.module.dim() as u64 == dim && qb.splits,
        json!({
            "dimension": qb.module.dim(),
            "expected": dim,
            "constant_vector_splits_off": qb.splits,
            "module_generators": action.group.essential_generators(),
        }),
    )) {
        return Ok(run.finish(q, seed, &facts));
    }

    if run.push(check_brauer_nesbitt(&order, n)?) {
        return Ok(run.finish(q, seed, &facts));
    }

    let cert = is_irreducible(&qb.module, seed);
    let mut record = match cert.verdict {
        MeatAxeVerdict::Reducible => CheckRecord::new(
            "meataxe_absolute_irreducibility",
            Status::Refuted,
            json!({ "irreducibility": cert }),
        ),
        MeatAxeVerdict::BudgetExhausted => CheckRecord::new(
            "meataxe_absolute_irreducibility",
            Status::Inconclusive,
            json!({ "irreducibility": cert }),
        ),
        MeatAxeVerdict::Irreducible => {
            let abs = is_absolutely_irreducible(&qb.module, seed)?;
            let status = match abs.is_absolutely_irreducible() {
                Some(true) => Status::Computed,
                Some(false) => Status::Refuted,
                None => Status::Inconclusive,
            };
            let endomorphisms = match &abs {
                AbsoluteOutcome::Determined(r) => serde_json::to_value(r)?,
                AbsoluteOutcome::Inconclusive { .. } => serde_json::to_value(&abs)?,
            };
            CheckRecord::new(
                "meataxe_absolute_irreducibility",
                status,
                json!({ "irreducibility": cert, "endomorphisms": endomorphisms }),
            )
        }
    };
    record.seed = Some(seed);
    if run.push(record) {
        return Ok(run.finish(q, seed, &facts));
    }

    if run.push(check_very3_hyp1(&facts, dim, index)) {
        return Ok(run.finish(q, seed, &facts));
    }

    let census = trace_census(q)?;
    run.push(check_very3_hyp2(q, &census, &facts)?);
    Ok(run.finish(q, seed, &facts))
}

struct Pipeline {
    checks: Vec<CheckRecord>,
}

impl Pipeline {
    /// Records a check; true if it refutes and the pipeline must stop.
    fn push(&mut self, record: CheckRecord) -> bool {
        let refuted = record.status == Status::Refuted;
        log::debug!("{}: {:?}", record.name, record.status);
        self.checks.push(record);
        refuted
    }

    fn finish(self, q: u32, seed: u64, facts: &CitedFacts) -> Certificate {
        let failed = self
            .checks
            .iter()
            .find(|c| c.status == Status::Refuted)
            .map(|c| c.name.clone());
        let verdict = if failed.is_some() {
            CertVerdict::Refuted
        } else if self.checks.len() == 10 && self.checks.iter().all(CheckRecord::passed) {
            CertVerdict::VerySimpleCertified
        } else {
            CertVerdict::Inconclusive
        };
        let degree = u64::from(q).pow(3) + 1;
        Certificate {
            q,
            seed,
            degree,
            verdict,
            verdict_text: verdict_text(verdict, q, degree),
            citations: vec![facts.bridge.source.clone()],
            failed_check: failed,
            checks: self.checks,
            notes: notes(q),
        }
    }
}

fn verdict_text(verdict: CertVerdict, q: u32, n: u64) -> String {
    match verdict {
        CertVerdict::VerySimpleCertified => format!(
            "The GF(2)-module Q_B of PSU3({q}) acting on the {n} points of the Hermitian unital \
             is very simple, and so is Q_B for any group of permutations of those points that \
             contains PSU3({q}). Consequence (cited, not computed): if f is a polynomial of \
             degree {n} over a field K of characteristic other than 2 whose Galois group acts on \
             the roots as such a group, then the Galois module of 2-torsion points of the \
             Jacobian J(C_f) of y^2 = f(x) is isomorphic to Q_B, hence either \
             End(J(C_f)) = Z, or char(K) > 0 and J(C_f) is a supersingular abelian variety."
        ),
        CertVerdict::Refuted => format!(
            "A required check failed for q = {q}; no conclusion about very simplicity is drawn."
        ),
        CertVerdict::Inconclusive => format!(
            "Every check that ran for q = {q} passed, but at least one was inconclusive; very \
             simplicity is not certified."
        ),
    }
}

fn notes(q: u32) -> Vec<String> {
    let m = q.trailing_zeros();
    vec![
        format!(
            "Degree reading: n = q^3 + 1 = 2^{} + 1 = {}, the number of unital points. The \
             alternative reading n = 2^(3m+1) + 1 = {} matches no set acted on here and is not used.",
            3 * m,
            u64::from(q).pow(3) + 1,
            (1u64 << (3 * m + 1)) + 1
        ),
        "Overgroups: if Q_B is very simple for a subgroup it is very simple for every group \
         containing it, so the verdict covers all permutation groups of the unital containing PSU3(q)."
            .into(),
        "A very simple module is absolutely simple; the MeatAxe check verifies this necessary \
         condition independently of the 2-part criterion."
            .into(),
        "A module of dimension 1 is trivially very simple; the dimension here is q^3 > 1.".into(),
        "A very simple module of dimension > 1 is neither induced from a proper subgroup nor a \
         tensor product of smaller modules. Over GF(2) for a perfect group these conditions \
         together with absolute simplicity characterize very simplicity; the index and \
         factorization hypotheses exclude the two decompositions."
            .into(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brauer_nesbitt_examples() {
        let ok = |o: u64, n| check_brauer_nesbitt(&BigUint::from(o), n).unwrap().status;
        assert_eq!(ok(62400, 65), Status::Computed);
        assert_eq!(ok(5_515_776, 513), Status::Computed);
        assert_eq!(ok(120, 5), Status::Refuted);
        assert_eq!(ok(60, 7), Status::Refuted);
        assert!(check_brauer_nesbitt(&BigUint::from(8u32), 4).is_err());
    }

    #[test]
    fn embedded_facts_load() {
        let f4 = CitedFacts::embedded(4).unwrap();
        assert_eq!(f4.min_subgroup_index.value, 65);
        assert_eq!(f4.brauer_f2_dimensions.as_ref().unwrap().values, [1, 64]);
        let f8 = CitedFacts::embedded(8).unwrap();
        assert_eq!(f8.min_subgroup_index.value, 513);
        assert!(f8.brauer_f2_dimensions.is_none());
        assert!(CitedFacts::embedded(16).is_err());
        assert!(matches!(
            CitedFacts::parse(EMBEDDED_FACTS_Q4, 8),
            Err(Error::Facts(_))
        ));
        assert!(matches!(CitedFacts::parse("{", 4), Err(Error::Facts(_))));
    }

    #[test]
    fn hyp1_cases() {
        let mut f = CitedFacts::embedded(4).unwrap();
        assert_eq!(check_very3_hyp1(&f, 64, 65).status, Status::Cited);
        f.min_subgroup_index.value = 64;
        assert_eq!(check_very3_hyp1(&f, 64, 65).status, Status::Refuted);
        f.min_subgroup_index.value = 66;
        assert_eq!(check_very3_hyp1(&f, 64, 65).status, Status::Refuted);
    }

    #[test]
    fn hyp2_cases() {
        let c4 = trace_census(4).unwrap();
        let mut f4 = CitedFacts::embedded(4).unwrap();
        assert_eq!(check_very3_hyp2(4, &c4, &f4).unwrap().status, Status::Cited);
        f4.brauer_f2_dimensions.as_mut().unwrap().values = vec![1, 8, 64];
        assert_eq!(
            check_very3_hyp2(4, &c4, &f4).unwrap().status,
            Status::Refuted
        );
        f4.brauer_f2_dimensions = None;
        assert_eq!(
            check_very3_hyp2(4, &c4, &f4).unwrap().status,
            Status::Inconclusive
        );

        let c8 = trace_census(8).unwrap();
        let f8 = CitedFacts::embedded(8).unwrap();
        let r = check_very3_hyp2(8, &c8, &f8).unwrap();
        assert_eq!(r.status, Status::Computed);
        assert_eq!(r.data["escapes"].as_array().unwrap().len(), 6);
        assert_eq!(r.citations.len(), 1);
        assert!(check_very3_hyp2(16, &trace_census(16).unwrap(), &f8).is_err());
    }

    #[test]
    fn factorizations_of_64() {
        assert_eq!(
            factorizations(64),
            vec![(2, 32), (4, 16), (8, 8), (16, 4), (32, 2)]
        );
    }
}
