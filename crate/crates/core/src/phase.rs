//! Brute-force dynamics: the functional graph of a map on `m^n` states, its
//! periodic points, and Möbius inversion between `|Per_1(f^r)|` and `|Per_r(f)|`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, mobius};
use crate::system::{format_code, SdsError, SdsSpec, UpdateOrder};

/// Default limit on the number of states a phase graph may hold.
pub const DEFAULT_STATE_CAP: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "SDS_STATE_CAP";

/// Largest graph [`PhaseGraph::to_dot`] will render.
pub const DOT_NODE_LIMIT: usize = 1 << 16;

/// Default work budget (orders times states) for [`survey_update_orders`]:
/// every order of an 8-cycle over F2.
pub const DEFAULT_SURVEY_BUDGET: u128 = 40_320 * 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhaseError {
    #[error("state space too large: {states} states exceeds cap {cap}")]
    TooLarge { states: u128, cap: u64 },
    #[error("missing |Per_1(f^{0})| needed for Möbius inversion")]
    MissingDivisor(u64),
    #[error("Möbius inversion produced a negative count ({0}); inputs are inconsistent")]
    NegativeCount(i128),
    #[error("survey needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error(transparent)]
    System(#[from] SdsError),
}

/// Reads the state cap from `SDS_STATE_CAP`, falling back to the default.
pub fn state_cap_from_env() -> u64 {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// Counts of periodic points by exact period: `r -> |Per_r|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PeriodTable {
    pub entries: BTreeMap<u64, u64>,
    pub total_states: u64,
}

impl PeriodTable {
    /// `|Per_r|`, zero for periods that do not occur.
    pub fn count(&self, r: u64) -> u64 {
        self.entries.get(&r).copied().unwrap_or(0)
    }

    pub fn periods(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    /// Number of periodic states; equals `total_states` for a bijection.
    pub fn periodic_total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Combines counts from disjoint shards of a state space.
    pub fn merge(&mut self, other: &PeriodTable) {
        for (&r, &c) in &other.entries {
            *self.entries.entry(r).or_default() += c;
        }
        self.total_states += other.total_states;
    }

    /// Canonical `r:count` list, used to group cyclically equivalent maps.
    pub fn canonical_key(&self) -> String {
        self.entries
            .iter()
            .map(|(r, c)| format!("{r}:{c}"))
            .join(",")
    }

    /// `{"n":..,"rules":..,"order":..,"periods":{"1":4,"3":12}}`.
    pub fn to_json(&self, spec: &SdsSpec) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            n: usize,
            rules: String,
            order: String,
            m: u32,
            periods: &'a BTreeMap<u64, u64>,
        }
        serde_json::to_string(&Out {
            n: spec.n(),
            rules: spec.rules().to_string(),
            order: spec.order().to_string(),
            m: spec.modulus(),
            periods: &self.entries,
        })
        .expect("plain data serializes")
    }

    /// CSV rows `n,r,count`, header first.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("n,r,count\n");
        for (r, c) in &self.entries {
            let _ = writeln!(out, "{n},{r},{c}");
        }
        out
    }
}

/// Successor table of a map on encoded states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseGraph {
    n: usize,
    modulus: u32,
    successor: Vec<u32>,
}

impl PhaseGraph {
    /// Tabulates the SDS map on every state.
    pub fn build(spec: &SdsSpec, cap: u64) -> Result<Self, PhaseError> {
        PhaseGraph::from_fn(spec.n(), spec.modulus(), spec.state_count(), cap, |c| {
            spec.apply_code(c)
        })
    }

    /// Tabulates an arbitrary map on `total` codes. `n` and `modulus` only
    /// affect labels.
    pub fn from_fn<F>(n: usize, modulus: u32, total: u128, cap: u64, f: F) -> Result<Self, PhaseError>
    where
        F: Fn(u64) -> u64 + Sync,
    {
        if total > cap as u128 || total > u32::MAX as u128 + 1 {
            return Err(PhaseError::TooLarge { states: total, cap });
        }
        let mut successor = vec![0u32; total as usize];
        successor
            .par_chunks_mut(1 << 14)
            .enumerate()
            .for_each(|(chunk, out)| {
                let base = (chunk as u64) << 14;
                for (k, slot) in out.iter_mut().enumerate() {
                    let image = f(base + k as u64);
                    debug_assert!((image as u128) < total);
                    *slot = image as u32;
                }
            });
        Ok(PhaseGraph {
            n,
            modulus,
            successor,
        })
    }

    pub fn len(&self) -> usize {
        self.successor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successor.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn successor(&self, code: u64) -> u64 {
        self.successor[code as usize] as u64
    }

    pub fn successors(&self) -> &[u32] {
        &self.successor
    }

    pub fn is_bijection(&self) -> bool {
        let mut hit = vec![false; self.successor.len()];
        for &s in &self.successor {
            if std::mem::replace(&mut hit[s as usize], true) {
                return false;
            }
        }
        true
    }

    /// Exact `|Per_r|` for every occurring period.
    ///
    /// Forward traversal with three colours: a walk that runs into a state
    /// still on its own path has closed a cycle, whose length is read off the
    /// recorded path positions. Transient states of non-bijections are never
    /// counted.
    pub fn orbit_decomposition(&self) -> PeriodTable {
        const UNVISITED: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let len = self.successor.len();
        let mut color = vec![UNVISITED; len];
        let mut position = vec![0u32; len];
        let mut path: Vec<u32> = Vec::new();
        let mut entries = BTreeMap::new();
        for start in 0..len {
            if color[start] != UNVISITED {
                continue;
            }
            path.clear();
            let mut cur = start;
            while color[cur] == UNVISITED {
                color[cur] = ON_PATH;
                position[cur] = path.len() as u32;
                path.push(cur as u32);
                cur = self.successor[cur] as usize;
            }
            if color[cur] == ON_PATH {
                let period = (path.len() - position[cur] as usize) as u64;
                *entries.entry(period).or_insert(0) += period;
            }
            for &p in &path {
                color[p as usize] = DONE;
            }
        }
        PeriodTable {
            entries,
            total_states: len as u64,
        }
    }

    /// Number of states with `f^r(s) = s`, by direct iteration.
    pub fn fixed_count_of_power(&self, r: u64) -> u64 {
        assert!(r >= 1, "r must be positive");
        (0..self.successor.len())
            .into_par_iter()
            .filter(|&s| {
                let mut c = s;
                for _ in 0..r {
                    c = self.successor[c] as usize;
                }
                c == s
            })
            .count() as u64
    }

    /// Graphviz digraph, one edge per state, nodes labelled by their digit
    /// strings and listed in code order.
    pub fn to_dot(&self) -> Result<String, PhaseError> {
        if self.successor.len() > DOT_NODE_LIMIT {
            return Err(PhaseError::TooLarge {
                states: self.successor.len() as u128,
                cap: DOT_NODE_LIMIT as u64,
            });
        }
        let label = |c: u64| format_code(c, self.n, self.modulus);
        let mut out = String::from("digraph phase_space {\n");
        for (s, &t) in self.successor.iter().enumerate() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", label(s as u64), label(t as u64));
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// `|Per_r(f)| = sum_{d | r} mu(r/d) |Per_1(f^d)|`.
pub fn mobius_invert(fixed_counts: &BTreeMap<u64, u128>, r: u64) -> Result<u128, PhaseError> {
    let mut acc: i128 = 0;
    for d in divisors(r) {
        let f = *fixed_counts.get(&d).ok_or(PhaseError::MissingDivisor(d))?;
        acc += mobius(r / d) as i128 * f as i128;
    }
    u128::try_from(acc).map_err(|_| PhaseError::NegativeCount(acc))
}

/// Outcome of [`survey_update_orders`].
#[derive(Debug, Clone)]
pub struct OrderSurvey {
    /// One entry per cyclic-equivalence class: the shared period table and
    /// the orders realising it.
    pub classes: Vec<(PeriodTable, Vec<UpdateOrder>)>,
    pub orders_examined: usize,
}

impl OrderSurvey {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Groups all `n!` update orders of `spec`'s rules by period table.
pub fn survey_update_orders(spec: &SdsSpec, budget: u128) -> Result<OrderSurvey, PhaseError> {
    let n = spec.n();
    let factorial: u128 = (1..=n as u128).product();
    let needed = factorial * spec.state_count();
    if needed > budget {
        return Err(PhaseError::BudgetExceeded { needed, budget });
    }
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let tables: Vec<(UpdateOrder, PeriodTable)> = orders
        .into_par_iter()
        .map(|o| {
            let order = UpdateOrder::from_zero_based(o)?;
            let s = spec.with_order(order.clone())?;
            let g = PhaseGraph::build(&s, u64::MAX)?;
            Ok((order, g.orbit_decomposition()))
        })
        .collect::<Result<_, PhaseError>>()?;
    let orders_examined = tables.len();
    let mut groups: HashMap<String, usize> = HashMap::new();
    let mut classes: Vec<(PeriodTable, Vec<UpdateOrder>)> = Vec::new();
    for (order, table) in tables {
        let idx = *groups.entry(table.canonical_key()).or_insert_with(|| {
            classes.push((table.clone(), Vec::new()));
            classes.len() - 1
        });
        classes[idx].1.push(order);
    }
    Ok(OrderSurvey {
        classes,
        orders_examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SdsSpec;

    fn table(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn c4_parity_periods() {
        let g = PhaseGraph::build(&SdsSpec::parity(4).unwrap(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(g.successor(0b1101), 0b0110); // 1011 -> 0110
        assert_eq!(g.orbit_decomposition().entries, table(&[(1, 4), (3, 12)]));
        assert_eq!(g.fixed_count_of_power(3), 16);
    }

    #[test]
    fn c3_plus_one_periods() {
        let g = PhaseGraph::build(&SdsSpec::parity_plus_one(3).unwrap(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(g.orbit_decomposition().entries, table(&[(4, 8)]));
    }

    #[test]
    fn c6_parity_periods() {
        let g = PhaseGraph::build(&SdsSpec::parity(6).unwrap(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(g.orbit_decomposition().entries, table(&[(1, 4), (5, 60)]));
        assert_eq!(g.fixed_count_of_power(5), 64);
    }

    #[test]
    fn identity_map_is_all_self_loops() {
        let g = PhaseGraph::from_fn(3, 2, 8, 8, |c| c).unwrap();
        assert_eq!(g.orbit_decomposition().entries, table(&[(1, 8)]));
    }

    #[test]
    fn non_bijection_counts_only_cycles() {
        // 0 -> 1 -> 2 -> 1, 3 -> 3
        let g = PhaseGraph::from_fn(2, 2, 4, 4, |c| [1, 2, 1, 3][c as usize]).unwrap();
        assert!(!g.is_bijection());
        assert_eq!(g.orbit_decomposition().entries, table(&[(1, 1), (2, 2)]));
    }

    #[test]
    fn cap_is_an_error_not_truncation() {
        let spec = SdsSpec::parity(10).unwrap();
        assert!(matches!(
            PhaseGraph::build(&spec, 1000),
            Err(PhaseError::TooLarge { .. })
        ));
    }

    #[test]
    fn mobius_inversion_examples() {
        let f: BTreeMap<u64, u128> = [(1, 4), (3, 16)].into_iter().collect();
        assert_eq!(mobius_invert(&f, 3).unwrap(), 12);
        assert_eq!(mobius_invert(&f, 1).unwrap(), 4);
        assert_eq!(mobius_invert(&f, 9), Err(PhaseError::MissingDivisor(9)));
        let bad: BTreeMap<u64, u128> = [(1, 10), (2, 1)].into_iter().collect();
        assert!(matches!(mobius_invert(&bad, 2), Err(PhaseError::NegativeCount(_))));
    }

    #[test]
    fn dot_export_is_deterministic() {
        let g = PhaseGraph::build(&SdsSpec::parity(3).unwrap(), DEFAULT_STATE_CAP).unwrap();
        let a = g.to_dot().unwrap();
        assert_eq!(a, g.to_dot().unwrap());
        assert_eq!(a.matches("->").count(), 8);
        // Local updates in order: 101 -> 001 -> 011 -> 010.
        assert!(a.contains("\"101\" -> \"010\";"), "{a}");
    }

    #[test]
    fn small_surveys() {
        let s3 = survey_update_orders(&SdsSpec::parity(3).unwrap(), DEFAULT_SURVEY_BUDGET).unwrap();
        assert_eq!(s3.orders_examined, 6);
        assert_eq!(s3.class_count(), 1);
        let too_big = SdsSpec::parity(9).unwrap();
        assert!(matches!(
            survey_update_orders(&too_big, DEFAULT_SURVEY_BUDGET),
            Err(PhaseError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn json_and_csv_forms() {
        let spec = SdsSpec::parity(4).unwrap();
        let t = PhaseGraph::build(&spec, DEFAULT_STATE_CAP)
            .unwrap()
            .orbit_decomposition();
        assert_eq!(
            t.to_json(&spec),
            r#"{"n":4,"rules":"PPPP","order":"id","m":2,"periods":{"1":4,"3":12}}"#
        );
        assert_eq!(t.to_csv(4), "n,r,count\n4,1,4\n4,3,12\n");
        assert_eq!(t.canonical_key(), "1:4,3:12");
    }
}
