use std::collections::BTreeMap;

use proptest::prelude::*;

use sds_core::affine::all_plus_one_offset;
use sds_core::phase::{mobius_invert, survey_update_orders, DEFAULT_STATE_CAP, DEFAULT_SURVEY_BUDGET};
use sds_core::system::affine_decomposition;
use sds_core::{F2Vec, PhaseGraph, Rule, RuleVector, SdsSpec, State, UpdateOrder};

fn spec(n: usize, mask: u64) -> SdsSpec {
    SdsSpec::with_identity_order(RuleVector::new(n, mask).unwrap())
}

fn order_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

#[test]
fn local_updates_are_involutions() {
    for n in 3..=8usize {
        for mask in 0..1u64 << n {
            let s = spec(n, mask);
            for i in 0..n {
                assert!((0..1u64 << n).all(|c| s.local_update_code(s.local_update_code(c, i), i) == c));
            }
        }
    }
    // n = 9, 10 on a spread of rule vectors.
    for n in 9..=10usize {
        for mask in [0, 1, 0b1010_1010, (1 << n) - 1, 0x155 & ((1 << n) - 1)] {
            let s = spec(n, mask);
            for i in 0..n {
                assert!((0..1u64 << n).all(|c| s.local_update_code(s.local_update_code(c, i), i) == c));
            }
        }
    }
}

#[test]
fn rules_are_symmetric_in_their_inputs() {
    for rule in [Rule::Parity, Rule::ParityPlusOne] {
        for m in [2u32, 3, 4] {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        let v = rule.eval(a, b, c, m);
                        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                            assert_eq!(rule.eval(x, y, z, m), v);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn maps_are_bijections_and_periods_cover_the_space() {
    for n in 3..=10usize {
        let masks: Vec<u64> = if n <= 7 {
            (0..1u64 << n).collect()
        } else {
            vec![0, (1 << n) - 1, 0b101, 0b110_0110]
        };
        for mask in masks {
            let g = PhaseGraph::build(&spec(n, mask), DEFAULT_STATE_CAP).unwrap();
            assert!(g.is_bijection(), "n={n} mask={mask}");
            let t = g.orbit_decomposition();
            assert_eq!(t.periodic_total(), 1 << n);
            for (r, c) in &t.entries {
                assert_eq!(c % r, 0, "n={n} mask={mask} r={r}");
            }
        }
    }
}

#[test]
fn affine_form_reproduces_the_map() {
    for n in 3..=10usize {
        for mask in [0, 1, (1 << n) - 1, 0b1001, (1 << n) / 3] {
            let s = spec(n, mask);
            let form = affine_decomposition(&s).unwrap();
            assert!((0..1u64 << n).all(|c| form.apply_code(c) == s.apply_code(c)), "n={n}");
        }
    }
}

#[test]
fn all_plus_one_offset_pattern() {
    for n in 3..=16usize {
        let form = affine_decomposition(&SdsSpec::parity_plus_one(n).unwrap()).unwrap();
        assert_eq!(form.offset, all_plus_one_offset(n), "n={n}");
    }
}

#[test]
fn mobius_round_trip() {
    for n in 3..=10usize {
        for mask in [0u64, (1 << n) - 1, 0b11] {
            let g = PhaseGraph::build(&spec(n, mask), DEFAULT_STATE_CAP).unwrap();
            let table = g.orbit_decomposition();
            for &r in table.entries.keys() {
                let fixed: BTreeMap<u64, u128> = sds_core::arith::divisors(r)
                    .into_iter()
                    .map(|d| (d, g.fixed_count_of_power(d) as u128))
                    .collect();
                assert_eq!(mobius_invert(&fixed, r).unwrap(), table.count(r) as u128);
            }
        }
    }
}

#[test]
fn parity_periods_divide_2n_minus_2() {
    for n in 3..=12usize {
        let g = PhaseGraph::build(&SdsSpec::parity(n).unwrap(), DEFAULT_STATE_CAP).unwrap();
        for r in g.orbit_decomposition().periods() {
            assert_eq!((2 * n as u64 - 2) % r, 0, "n={n} r={r}");
            if n % 2 == 0 {
                assert_eq!((n as u64 - 1) % r, 0, "n={n} r={r}");
            }
        }
    }
}

#[test]
fn update_order_class_bound() {
    for n in 3..=7usize {
        for rule in [Rule::Parity, Rule::ParityPlusOne] {
            let s = SdsSpec::with_identity_order(RuleVector::uniform(n, rule).unwrap());
            let survey = survey_update_orders(&s, DEFAULT_SURVEY_BUDGET).unwrap();
            assert!(survey.class_count() <= n / 2, "n={n} {rule:?}: {}", survey.class_count());
            assert_eq!(survey.orders_examined, (1..=n).product::<usize>());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn state_text_round_trip(n in 3usize..=12, code in any::<u64>(), m in 2u32..=5) {
        let total = (m as u64).pow(n as u32);
        let s = State::from_code(code % total, n, m).unwrap();
        prop_assert_eq!(State::parse(&s.to_string(), m).unwrap(), s);
        prop_assert_eq!(State::from_entries(&s.entries(), m).unwrap(), s);
    }

    #[test]
    fn code_path_matches_state_path(n in 3usize..=10, mask in any::<u64>(), perm in order_strategy(10), code in any::<u64>(), m in 2u32..=4) {
        let order: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        let rules = RuleVector::new(n, mask & ((1 << n) - 1)).unwrap();
        let s = SdsSpec::new(rules, UpdateOrder::from_zero_based(order.clone()).unwrap(), m).unwrap();
        let state = State::from_code(code % (m as u64).pow(n as u32), n, m).unwrap();
        let mut step = state;
        for &v in &order {
            step = s.local_update(&step, v + 1).unwrap();
        }
        prop_assert_eq!(s.apply(&state).unwrap(), step);
    }

    #[test]
    fn affine_form_under_random_orders(n in 3usize..=12, mask in any::<u64>(), perm in order_strategy(12)) {
        let order: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        let rules = RuleVector::new(n, mask & ((1 << n) - 1)).unwrap();
        let s = SdsSpec::new(rules, UpdateOrder::from_zero_based(order).unwrap(), 2).unwrap();
        let form = affine_decomposition(&s).unwrap();
        for c in 0..1u64 << n.min(9) {
            let v = F2Vec::from_code(c, n);
            prop_assert_eq!(form.apply(&v).unwrap().to_code().unwrap(), s.apply_code(c));
        }
    }
}
