//! Traces of Frobenius-twisted tensor products.
//!
//! Twisting a representation by x ↦ x^(2^i) raises its trace to the 2^i-th
//! power, so the tensor product of the twists indexed by S has trace t^M
//! with M = Σ_{i∈S} 2^i. If some torus trace t satisfies t^M ∉ GF(2), that
//! tensor product cannot be realized over GF(2).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec, Tower};
use crate::linalg::Matrix;
use crate::matgroup::{trace_census, TraceCensus};

/// Σ_{i∈S} 2^i for a set of distinct twist indices below m.
pub fn exponent_sum(m: u32, s: &[u32]) -> Result<u64> {
    let mut mask = 0u64;
    for &i in s {
        if i >= m {
            return Err(Error::Domain(format!(
                "twist index {i} is not below m = {m}"
            )));
        }
        if mask >> i & 1 == 1 {
            return Err(Error::Domain(format!("twist index {i} repeated")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

/// Trace of the tensor product of the twists indexed by `s`, given the
/// untwisted trace `t0` (in either field of the tower).
pub fn tensor_trace(tower: &Tower, t0: FieldElem, s: &[u32]) -> Result<FieldElem> {
    let e = exponent_sum(tower.m(), s)?;
    let field = if t0.degree() == tower.sub().degree() {
        tower.sub()
    } else {
        tower.ext()
    };
    let raw = field.check(t0)?;
    field.elem(field.pow(raw, e))
}

/// Trace of the literal Kronecker product of the twists of `a` indexed by
/// `s`. Exponential in |s|; meant for cross-checking [`tensor_trace`].
pub fn kronecker_twist_trace(field: &FieldSpec, a: &Matrix<FieldSpec>, s: &[u32]) -> u16 {
    let twist = |i: u32| a.map(|x| field.frobenius_power(x, i));
    let mut iter = s.iter();
    let Some(&first) = iter.next() else {
        return 1;
    };
    iter.fold(twist(first), |acc, &i| acc.kronecker(&twist(i)))
        .trace()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Escape {
    /// t^M lies outside GF(2).
    Witness { exponent: u64, t: u16, value: u16 },
    /// Every census value stays inside GF(2) under t ↦ t^M.
    ExhaustiveFailure { exponent: u64, checked: Vec<u16> },
}

impl Escape {
    pub fn is_witness(&self) -> bool {
        matches!(self, Self::Witness { .. })
    }
}

/// Searches the census for a torus trace whose M-th power is not in GF(2).
/// The exponent sums of proper nonempty subsets of {0..m−1} are exactly
/// 1..=q−2.
pub fn escape_witness(exponent: u64, q: u32) -> Result<Escape> {
    if exponent == 0 || exponent > u64::from(q).saturating_sub(2) {
        return Err(Error::Precondition(format!(
            "exponent {exponent} outside 1..={}",
            q.saturating_sub(2)
        )));
    }
    let census = trace_census(q)?;
    escape_in_census(&census, exponent)
}

fn escape_in_census(census: &TraceCensus, exponent: u64) -> Result<Escape> {
    let tower = Tower::new(census.q)?;
    let f = tower.sub();
    for &t in &census.values {
        let value = f.pow(t, exponent);
        if value > 1 {
            return Ok(Escape::Witness { exponent, t, value });
        }
    }
    Ok(Escape::ExhaustiveFailure {
        exponent,
        checked: census.values.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TracesReport {
    pub census: TraceCensus,
    pub escapes: Vec<Escape>,
}

impl TracesReport {
    pub fn all_escape(&self) -> bool {
        self.escapes.iter().all(Escape::is_witness)
    }
}

/// The census together with an escape search for every exponent 1..=q−2.
pub fn traces_report(q: u32) -> Result<TracesReport> {
    let census = trace_census(q)?;
    let escapes = (1..=u64::from(q) - 2)
        .map(|e| escape_in_census(&census, e))
        .collect::<Result<_>>()?;
    Ok(TracesReport { census, escapes })
}
