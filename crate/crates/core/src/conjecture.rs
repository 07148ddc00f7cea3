//! Enumeration harness for the maps `F_{m,n} = [C_n, x1+x2+x3, id]` and
//! `G_{m,n} = [C_n, 1+x1+x2+x3, id]` over `Z/mZ`.
//!
//! Nothing here proves anything. Each check produces a report of cells,
//! written as JSON lines, with a verdict per cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::phase::{PhaseError, PhaseGraph};
use crate::system::{format_code, Rule, RuleVector, SdsError, SdsSpec, UpdateOrder};

/// Default enumeration cap for `m^n`.
pub const DEFAULT_CONJECTURE_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConjectureError {
    #[error("modulus {0} is not a power of 2")]
    NotPowerOfTwo(u32),
    #[error(transparent)]
    System(#[from] SdsError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("cannot serialize report: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `F_{m,n}`: every vertex uses `x1 + x2 + x3`.
    F,
    /// `G_{m,n}`: every vertex uses `1 + x1 + x2 + x3`.
    G,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::F, Family::G];

    pub fn plus_one(self) -> bool {
        self == Family::G
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::F => "F",
            Family::G => "G",
        })
    }
}

/// `F_{m,n}` (or `G_{m,n}` when `plus_one`) with the identity order.
pub fn build_fmn(m: u32, n: usize, plus_one: bool) -> Result<SdsSpec, ConjectureError> {
    let rule = if plus_one { Rule::ParityPlusOne } else { Rule::Parity };
    let rules = RuleVector::uniform(n, rule)?;
    Ok(SdsSpec::new(rules, UpdateOrder::identity(n), m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
    Skipped,
}

/// One line of a report. Fields that do not apply to a conjecture are
/// omitted from the JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureCell {
    pub conj: u8,
    pub family: Family,
    pub m: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divides: Option<bool>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConjectureCell {
    fn new(conj: u8, family: Family, m: u32, n: usize, verdict: Verdict) -> Self {
        ConjectureCell {
            conj,
            family,
            m,
            n,
            r: None,
            count: None,
            period: None,
            divides: None,
            verdict,
            witness: None,
            note: None,
        }
    }

    fn skipped(conj: u8, family: Family, m: u32, n: usize, note: String) -> Self {
        ConjectureCell {
            note: Some(note),
            ..ConjectureCell::new(conj, family, m, n, Verdict::Skipped)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConjectureReport {
    pub cells: Vec<ConjectureCell>,
}

impl ConjectureReport {
    pub fn extend(&mut self, other: ConjectureReport) {
        self.cells.extend(other.cells);
    }

    pub fn violations(&self) -> impl Iterator<Item = &ConjectureCell> {
        self.cells.iter().filter(|c| c.verdict == Verdict::Violated)
    }

    pub fn skipped(&self) -> impl Iterator<Item = &ConjectureCell> {
        self.cells.iter().filter(|c| c.verdict == Verdict::Skipped)
    }

    pub fn is_consistent(&self) -> bool {
        self.violations().next().is_none()
    }

    /// One JSON object per line, in cell order.
    pub fn to_json_lines(&self) -> Result<String, ConjectureError> {
        let mut out = String::new();
        for cell in &self.cells {
            let line = serde_json::to_string(cell).map_err(|e| ConjectureError::Json(e.to_string()))?;
            out.push_str(&line);
            out.push('\n');
        }
        Ok(out)
    }
}

fn graph_for(m: u32, n: usize, family: Family, cap: u64) -> Result<Result<PhaseGraph, String>, ConjectureError> {
    let spec = build_fmn(m, n, family.plus_one())?;
    match PhaseGraph::build(&spec, cap) {
        Ok(g) => Ok(Ok(g)),
        Err(PhaseError::TooLarge { states, cap }) => {
            Ok(Err(format!("{m}^{n} = {states} states exceeds cap {cap}")))
        }
        Err(e) => Err(e.into()),
    }
}

/// Every prime factor of `|Per_1(X^r)|` should divide `m`, for `X` in
/// `{F_{m,n}, G_{m,n}}` and `r = 1..=r_max`. A count of 0 is reported as
/// consistent: the claim is vacuous there.
pub fn check_conjecture2(m: u32, n: usize, r_max: u64, cap: u64) -> Result<ConjectureReport, ConjectureError> {
    let mut cells = Vec::new();
    for family in Family::BOTH {
        let graph = match graph_for(m, n, family, cap)? {
            Ok(g) => g,
            Err(note) => {
                cells.push(ConjectureCell::skipped(2, family, m, n, note));
                continue;
            }
        };
        for r in 1..=r_max {
            let count = graph.fixed_count_of_power(r);
            let bad_prime = factorize(count as u128)
                .into_iter()
                .map(|(p, _)| p)
                .find(|&p| m as u128 % p != 0);
            let mut cell = ConjectureCell::new(
                2,
                family,
                m,
                n,
                if bad_prime.is_some() {
                    Verdict::Violated
                } else {
                    Verdict::Consistent
                },
            );
            cell.r = Some(r);
            cell.count = Some(count);
            cell.witness = bad_prime.map(|p| format!("prime {p} divides {count} but not {m}"));
            cells.push(cell);
        }
    }
    Ok(ConjectureReport { cells })
}

/// One state on a cycle of each occurring length, for a bijection.
fn cycle_representatives(graph: &PhaseGraph) -> BTreeMap<u64, u64> {
    let succ = graph.successors();
    let mut seen = vec![false; succ.len()];
    let mut reps = BTreeMap::new();
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = succ[x] as usize;
            len += 1;
        }
        if x == start {
            reps.entry(len).or_insert(start as u64);
        }
    }
    reps
}

/// For `m` a power of 2, every period of `F_{m,n}` and `G_{m,n}` should
/// divide `m(n-1)`. Emits one cell per occurring period, with a state on
/// that cycle as witness.
pub fn check_conjecture3(m: u32, n: usize, cap: u64) -> Result<ConjectureReport, ConjectureError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(ConjectureError::NotPowerOfTwo(m));
    }
    let bound = m as u64 * (n as u64 - 1);
    let mut cells = Vec::new();
    for family in Family::BOTH {
        let graph = match graph_for(m, n, family, cap)? {
            Ok(g) => g,
            Err(note) => {
                cells.push(ConjectureCell::skipped(3, family, m, n, note));
                continue;
            }
        };
        if !graph.is_bijection() {
            // Cannot happen for these maps; surface it rather than guess.
            let mut cell = ConjectureCell::new(3, family, m, n, Verdict::Violated);
            cell.note = Some("map is not a bijection".into());
            cells.push(cell);
            continue;
        }
        for (period, state) in cycle_representatives(&graph) {
            let divides = bound % period == 0;
            let mut cell = ConjectureCell::new(
                3,
                family,
                m,
                n,
                if divides {
                    Verdict::Consistent
                } else {
                    Verdict::Violated
                },
            );
            cell.period = Some(period);
            cell.divides = Some(divides);
            cell.witness = Some(format_code(state, n, m));
            cells.push(cell);
        }
    }
    Ok(ConjectureReport { cells })
}

/// `|Per_r|` observed over a family of maps, one per `n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrbitSample {
    /// `None` where the state space exceeded the cap.
    pub per_n: BTreeMap<usize, Option<u64>>,
    pub observed: BTreeSet<u64>,
}

/// Collects `R_r = {|Per_r(X_n)|}` over `n` in `n_range` for `X` in
/// `family`. Informational only: finitely many samples say nothing about
/// whether the full set is finite.
pub fn orbit_restriction_sample(
    m: u32,
    family: Family,
    n_range: std::ops::RangeInclusive<usize>,
    r: u64,
    cap: u64,
) -> Result<OrbitSample, ConjectureError> {
    let mut sample = OrbitSample::default();
    for n in n_range {
        let count = match graph_for(m, n, family, cap)? {
            Ok(g) => Some(g.orbit_decomposition().count(r)),
            Err(_) => None,
        };
        if let Some(c) = count {
            sample.observed.insert(c);
        }
        sample.per_n.insert(n, count);
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_specs() {
        let s = build_fmn(4, 5, false).unwrap();
        assert_eq!(s.state_count(), 1024);
        let g = build_fmn(3, 4, true).unwrap();
        assert_eq!(g.apply_code(0) % 3, 1);
        let two = build_fmn(2, 6, false).unwrap();
        let parity = SdsSpec::parity(6).unwrap();
        assert!((0..64).all(|c| two.apply_code(c) == parity.apply_code(c)));
    }

    #[test]
    fn conjecture2_small_cases() {
        let rep = check_conjecture2(3, 3, 10, DEFAULT_CONJECTURE_CAP).unwrap();
        assert_eq!(rep.cells.len(), 20);
        assert!(rep.is_consistent());
        let rep = check_conjecture2(2, 6, 10, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(rep.is_consistent());
    }

    #[test]
    fn conjecture3_rejects_non_powers_of_two() {
        assert_eq!(
            check_conjecture3(6, 3, DEFAULT_CONJECTURE_CAP),
            Err(ConjectureError::NotPowerOfTwo(6))
        );
    }

    #[test]
    fn conjecture3_witnesses_have_their_period() {
        let rep = check_conjecture3(4, 4, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(rep.is_consistent());
        for cell in &rep.cells {
            let spec = build_fmn(4, 4, cell.family.plus_one()).unwrap();
            let code = crate::system::State::parse(cell.witness.as_deref().unwrap(), 4)
                .unwrap()
                .code();
            let p = cell.period.unwrap();
            assert_eq!(spec.iterate_code(code, p), code);
            assert!((1..p).all(|k| spec.iterate_code(code, k) != code));
        }
    }

    #[test]
    fn skipped_cells_are_reported() {
        let rep = check_conjecture3(8, 9, 1 << 10).unwrap();
        assert_eq!(rep.skipped().count(), 2);
    }

    #[test]
    fn json_lines_shape() {
        let rep = check_conjecture3(2, 3, DEFAULT_CONJECTURE_CAP).unwrap();
        let text = rep.to_json_lines().unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["conj"], 3);
        assert_eq!(first["m"], 2);
        assert!(first["divides"].as_bool().unwrap());
        assert!(first.get("r").is_none());
    }

    #[test]
    fn parity_family_counts_stay_in_the_predicted_set() {
        let sample = orbit_restriction_sample(2, Family::F, 3..=10, 2, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(sample.observed.is_subset(&BTreeSet::from([0, 2, 4])));
    }
}
