use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use sds_core::affine::{closed_form_fixed_of_power, ClosedFormInput};
use sds_core::conjecture::{
    build_fmn, check_conjecture2, check_conjecture3, orbit_restriction_sample, Family, Verdict,
    DEFAULT_CONJECTURE_CAP,
};
use sds_core::embedding::{in_hat_space, iota, period_via_rotation, sigma_shift, window_vector};
use sds_core::phase::DEFAULT_STATE_CAP;
use sds_core::system::ln_matrix;
use sds_core::toggle::{
    coxeter_element, generalized_toggle, is_flexible_toggle, sds_toggles, GroundSet,
};
use sds_core::{F2Vec, MatF2, PhaseGraph, RuleVector, SdsSpec, State, UpdateOrder};

// Embedding

#[test]
fn iota_conjugates_ln_to_the_rotation() {
    for n in 3..=14usize {
        let l = ln_matrix(n).unwrap();
        for c in 0..1u64 << n {
            let v = F2Vec::from_code(c, n);
            let lv = F2Vec::from_code(l.mul_code(c), n);
            assert_eq!(iota(n, &lv).unwrap(), sigma_shift(&iota(n, &v).unwrap()), "n={n} v={v}");
        }
    }
}

#[test]
fn iota_is_injective_onto_the_hat_space() {
    for n in 3..=10usize {
        let image: HashSet<String> = (0..1u64 << n)
            .map(|c| {
                let w = iota(n, &F2Vec::from_code(c, n)).unwrap();
                assert!(w.is_member());
                assert!(sigma_shift(&w).is_member());
                assert_eq!(w.project(), F2Vec::from_code(c, n));
                w.to_string()
            })
            .collect();
        assert_eq!(image.len(), 1 << n);
        // Exactly 2^n of the 2^(2n-2) vectors are members.
        let members = (0..1u64 << (2 * n - 2))
            .filter(|&c| in_hat_space(n, &F2Vec::from_code(c, 2 * n - 2)).unwrap())
            .count();
        assert_eq!(members, 1 << n);
    }
}

#[test]
fn rotation_periods_match_the_phase_space() {
    for n in 3..=12usize {
        let spec = SdsSpec::parity(n).unwrap();
        for c in 0..1u64 << n {
            let p = period_via_rotation(n, &F2Vec::from_code(c, n)).unwrap();
            let mut k = 1;
            let mut x = spec.apply_code(c);
            while x != c {
                x = spec.apply_code(x);
                k += 1;
            }
            assert_eq!(p, k, "n={n} c={c}");
            assert_eq!((2 * n as u64 - 2) % p, 0);
            if n % 2 == 0 {
                assert_eq!((n as u64 - 1) % p, 0);
            }
        }
    }
}

#[test]
fn window_vectors_form_a_basis_of_the_hat_space() {
    for n in (3..=13usize).step_by(2) {
        let windows: Vec<_> = (0..n).map(|j| window_vector(n, j)).collect();
        let mut orbit = Vec::new();
        let mut cur = windows[0].clone();
        loop {
            orbit.push(cur.clone());
            cur = sigma_shift(&cur);
            if cur == windows[0] {
                break;
            }
        }
        for w in &windows {
            assert!(orbit.contains(w), "n={n}");
            assert!(w.is_member(), "n={n}");
        }
        let rows: Vec<F2Vec> = windows.iter().map(|w| w.bits().clone()).collect();
        assert_eq!(MatF2::from_rows(rows).unwrap().rank(), n, "n={n}");
    }
}

proptest! {
    #[test]
    fn iota_is_linear(n in 3usize..=30, a in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (u, v) = (F2Vec::from_code(a & mask, n), F2Vec::from_code(b & mask, n));
        let lhs = iota(n, &u.xor(&v)).unwrap();
        let rhs = iota(n, &u).unwrap().bits().xor(iota(n, &v).unwrap().bits());
        prop_assert_eq!(lhs.bits(), &rhs);
    }
}

// Toggles

#[test]
fn local_updates_are_flexible_toggles() {
    for n in 3..=10usize {
        let masks: Vec<u64> = if n <= 7 {
            (0..1u64 << n).collect()
        } else {
            vec![0, (1 << n) - 1, 0b1011, 0b1_0010_0101]
        };
        let ground = GroundSet::new(n).unwrap();
        for mask in masks {
            let spec = SdsSpec::with_identity_order(RuleVector::new(n, mask).unwrap());
            for v in 1..=n {
                assert!(
                    is_flexible_toggle(|x| spec.local_update_code(x, v - 1), v, ground),
                    "n={n} mask={mask} v={v}"
                );
            }
        }
    }
}

#[test]
fn coxeter_elements_are_sds_maps_for_every_order() {
    use itertools::Itertools;
    for n in 3..=6usize {
        for mask in [0u64, (1 << n) - 1, 0b101] {
            let spec = SdsSpec::with_identity_order(RuleVector::new(n, mask).unwrap());
            let toggles = sds_toggles(&spec).unwrap();
            for word in (1..=n).permutations(n) {
                let c = coxeter_element(&toggles, &word).unwrap();
                let s = spec.with_order(UpdateOrder::from_one_based(&word).unwrap()).unwrap();
                assert!((0..1u64 << n).all(|x| c.apply(x) == s.apply_code(x)), "n={n} word={word:?}");
                assert!(c.is_bijection());
            }
        }
    }
}

#[test]
fn parity_coxeter_element_order() {
    let toggles = sds_toggles(&SdsSpec::parity(4).unwrap()).unwrap();
    let c = coxeter_element(&toggles, &[1, 2, 3, 4]).unwrap();
    let x = State::parse("1011", 2).unwrap().code();
    assert_eq!(State::from_code(c.apply(x), 4, 2).unwrap().to_string(), "0110");
    assert_eq!(c.order(), Some(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coxeter_elements_match_random_orders(n in 7usize..=8, mask in any::<u64>(), word in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle()) {
        let word: Vec<usize> = word.into_iter().filter(|&e| e <= n).collect();
        let spec = SdsSpec::new(
            RuleVector::new(n, mask & ((1 << n) - 1)).unwrap(),
            UpdateOrder::from_one_based(&word).unwrap(),
            2,
        ).unwrap();
        let c = coxeter_element(&sds_toggles(&spec).unwrap(), &word).unwrap();
        prop_assert!((0..1u64 << n).all(|x| c.apply(x) == spec.apply_code(x)));
    }

    #[test]
    fn generalized_toggles_are_flexible(size in 1usize..=12, seed in any::<u64>(), density in 1u64..=7, e_pick in any::<usize>()) {
        let ground = GroundSet::new(size).unwrap();
        let family: Vec<u64> = (0..ground.subset_count())
            .filter(|x| (x.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed) % 8 < density)
            .collect();
        let e = 1 + e_pick % size;
        let t = generalized_toggle(ground, &family, e).unwrap();
        prop_assert!(is_flexible_toggle(|x| t.apply(x), e, ground));
        let members: BTreeSet<u64> = family.iter().copied().collect();
        for x in 0..ground.subset_count() {
            if !members.contains(&x) {
                prop_assert_eq!(t.apply(x), x);
            }
        }
    }
}

// Conjecture harness

#[test]
fn binary_reports_agree_with_the_f2_pipeline() {
    for n in 3..=10usize {
        let rep2 = check_conjecture2(2, n, 2 * n as u64 - 2, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(rep2.is_consistent());
        for cell in &rep2.cells {
            let fp = cell.family == Family::F || n % 4 == 0;
            let expected = closed_form_fixed_of_power(&ClosedFormInput::new(n as u64, fp, cell.r.unwrap()).unwrap());
            assert_eq!(cell.count.unwrap() as u128, expected, "n={n} {cell:?}");
        }
        let rep3 = check_conjecture3(2, n, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(rep3.is_consistent());
        for family in Family::BOTH {
            let spec = if family.plus_one() {
                SdsSpec::parity_plus_one(n).unwrap()
            } else {
                SdsSpec::parity(n).unwrap()
            };
            let expected: Vec<u64> = PhaseGraph::build(&spec, DEFAULT_STATE_CAP)
                .unwrap()
                .orbit_decomposition()
                .periods()
                .collect();
            let got: Vec<u64> = rep3
                .cells
                .iter()
                .filter(|c| c.family == family)
                .map(|c| c.period.unwrap())
                .collect();
            assert_eq!(got, expected, "n={n} {family}");
        }
    }
}

#[test]
fn prime_moduli_are_consistent_for_small_cycles() {
    for m in [2u32, 3, 5, 7] {
        for n in 3..=5usize {
            let rep = check_conjecture2(m, n, 12, DEFAULT_CONJECTURE_CAP).unwrap();
            assert!(rep.is_consistent(), "m={m} n={n}: {:?}", rep.violations().next());
        }
    }
}

#[test]
fn conjecture3_witnesses_reverify() {
    for (m, n_max) in [(4u32, 5usize), (8, 4)] {
        for n in 3..=n_max {
            let rep = check_conjecture3(m, n, DEFAULT_CONJECTURE_CAP).unwrap();
            for cell in &rep.cells {
                assert_ne!(cell.verdict, Verdict::Skipped);
                let spec = build_fmn(m, n, cell.family.plus_one()).unwrap();
                let x = State::parse(cell.witness.as_deref().unwrap(), m).unwrap().code();
                let p = cell.period.unwrap();
                assert_eq!(spec.iterate_code(x, p), x);
                assert!((1..p).all(|k| spec.iterate_code(x, k) != x));
            }
        }
    }
}

#[test]
fn binary_orbit_samples_stay_in_the_predicted_sets() {
    use sds_core::affine::kappa_lambda_rho_theta;
    for r in 1..=12u64 {
        let k = kappa_lambda_rho_theta(r);
        let g = orbit_restriction_sample(2, Family::G, 3..=12, r, DEFAULT_CONJECTURE_CAP).unwrap();
        assert!(g.observed.iter().all(|&c| c == 0 || c as u128 == k.theta), "r={r}");
        let f = orbit_restriction_sample(2, Family::F, 3..=12, r, DEFAULT_CONJECTURE_CAP).unwrap();
        let allowed = [Some(0), Some(k.kappa), Some(k.lambda), k.rho];
        assert!(f.observed.iter().all(|&c| allowed.contains(&Some(c as u128))), "r={r}");
    }
}
