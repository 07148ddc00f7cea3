use proptest::prelude::*;

use sds_core::arith::{gcd, odd_divides};
use sds_core::gf2::{char_poly, min_poly, F2Vec, MatF2, Poly2, PolyMat};
use sds_core::system::ln_matrix;

fn poly(mask: u64) -> Poly2 {
    Poly2::from_mask(mask)
}

fn x1() -> Poly2 {
    Poly2::x_pow_plus_one(1)
}

fn random_matrix(n: usize, bits: &[u64]) -> MatF2 {
    let rows = (0..n).map(|i| F2Vec::from_code(bits[i] & ((1 << n) - 1), n)).collect();
    MatF2::from_rows(rows).unwrap()
}

/// All divisors of `p` by trial over every polynomial of lower degree.
fn brute_divisors(p: &Poly2) -> Vec<Poly2> {
    let d = p.degree_or_zero();
    (1..1u64 << (d + 1))
        .map(poly)
        .filter(|q| q.divides(p))
        .collect()
}

/// Degree of the minimal polynomial from first principles: the least `k`
/// with `M^k` in the span of `I, M, ..., M^(k-1)`.
fn min_poly_degree_by_rank(m: &MatF2) -> usize {
    let n = m.n_rows();
    let flatten = |a: &MatF2| F2Vec::from_bits((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j)));
    let mut powers = vec![flatten(&MatF2::identity(n).unwrap())];
    let mut cur = MatF2::identity(n).unwrap();
    loop {
        cur = cur.mul(m).unwrap();
        powers.push(flatten(&cur));
        let rank = MatF2::from_rows(powers.clone()).unwrap().rank();
        if rank < powers.len() {
            return powers.len() - 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gcd_matches_divisor_enumeration(a in 1u64..1 << 10, b in 1u64..1 << 10) {
        let (pa, pb) = (poly(a), poly(b));
        let g = pa.gcd(&pb).unwrap();
        prop_assert!(g.divides(&pa) && g.divides(&pb));
        let common: Vec<Poly2> = brute_divisors(&pa).into_iter().filter(|q| q.divides(&pb)).collect();
        for q in &common {
            prop_assert!(q.divides(&g));
        }
        let top = common.iter().map(|q| q.degree_or_zero()).max().unwrap();
        prop_assert_eq!(g.degree_or_zero(), top);
    }

    #[test]
    fn gcd_of_degree_twelve_pairs(a in 1u64..1 << 13, b in 1u64..1 << 13) {
        let (pa, pb) = (poly(a), poly(b));
        let g = pa.gcd(&pb).unwrap();
        let (qa, ra) = pa.div_rem(&g).unwrap();
        let (qb, rb) = pb.div_rem(&g).unwrap();
        prop_assert!(ra.is_zero() && rb.is_zero());
        prop_assert!(qa.gcd(&qb).unwrap().is_one());
    }

    #[test]
    fn smith_product_is_char_poly(n in 1usize..=10, bits in prop::collection::vec(any::<u64>(), 10)) {
        let m = random_matrix(n, &bits);
        let f = m.invariant_factors().unwrap();
        prop_assert!(f.is_divisibility_chain());
        prop_assert_eq!(f.total_count(), n);
        prop_assert_eq!(f.product(), char_poly(&m).unwrap());
        prop_assert_eq!(f.product(), PolyMat::characteristic(&m).unwrap().determinant().unwrap());
    }

    #[test]
    fn min_poly_annihilates_and_is_minimal(n in 1usize..=8, bits in prop::collection::vec(any::<u64>(), 8)) {
        let m = random_matrix(n, &bits);
        let mp = min_poly(&m).unwrap();
        prop_assert!(mp.eval_matrix(&m).unwrap().is_zero());
        prop_assert_eq!(mp.degree_or_zero(), min_poly_degree_by_rank(&m));
        for q in brute_divisors(&mp) {
            if q != mp {
                prop_assert!(!q.eval_matrix(&m).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn subspace_dimension_matches_kernel(n in 1usize..=8, bits in prop::collection::vec(any::<u64>(), 8), r in 1u64..=12) {
        let m = random_matrix(n, &bits);
        let f = m.invariant_factors().unwrap();
        let kernel = m.pow(r).unwrap().add_identity().unwrap().kernel_dim();
        prop_assert_eq!(f.subspace_dim_per(r), kernel);
    }

    #[test]
    fn hex_and_text_round_trip(mask in any::<u64>()) {
        let p = poly(mask);
        prop_assert_eq!(Poly2::from_hex(&p.to_hex()).unwrap(), p.clone());
        prop_assert_eq!(p.to_string().parse::<Poly2>().unwrap(), p);
    }
}

#[test]
fn gcd_exponent_identity() {
    for a in 1..=64usize {
        for b in 1..=64usize {
            let g = Poly2::x_pow_plus_one(a).gcd(&Poly2::x_pow_plus_one(b)).unwrap();
            assert_eq!(g, Poly2::x_pow_plus_one(gcd(a as u64, b as u64) as usize), "a={a} b={b}");
        }
    }
}

#[test]
fn char_poly_of_ln_up_to_32() {
    for n in 3..=32 {
        let expected = &x1() * &Poly2::x_pow_plus_one(n - 1);
        assert_eq!(char_poly(&ln_matrix(n).unwrap()).unwrap(), expected, "n={n}");
    }
}

#[test]
fn ln_invariant_factor_chain() {
    for n in 3..=16 {
        let f = ln_matrix(n).unwrap().invariant_factors().unwrap();
        let top = Poly2::x_pow_plus_one(n - 1);
        let expected = if n % 2 == 0 {
            vec![x1(), top]
        } else {
            vec![&x1() * &top]
        };
        assert_eq!(f.factors(), &expected[..], "n={n}");
    }
}

#[test]
fn gcd_identities_for_odd_divisors() {
    let xr = |k: u64| Poly2::x_pow_plus_one(k as usize);
    for n in 3..=20u64 {
        for r in 1..=2 * n - 2 {
            if !odd_divides(r, 2 * n - 2) {
                continue;
            }
            let half = xr(r / 2);
            if n % 2 == 0 {
                assert_eq!(xr(r).gcd(&xr(n - 1)).unwrap(), half, "n={n} r={r}");
            }
            let middle = &x1() * &xr(n - 1);
            assert_eq!(xr(r).gcd(&middle).unwrap(), &x1() * &half, "n={n} r={r}");
            if n % 2 == 1 {
                let sq = &x1() * &middle;
                assert_eq!(xr(r).gcd(&sq).unwrap(), &(&x1() * &x1()) * &half, "n={n} r={r}");
            }
        }
    }
}

#[test]
fn periodic_subspace_dimension_matches_enumeration() {
    for n in 3..=12usize {
        let l = ln_matrix(n).unwrap();
        let f = l.invariant_factors().unwrap();
        for r in 1..=(2 * n - 2) as u64 {
            let lr = l.pow(r).unwrap();
            let count = (0..1u64 << n).filter(|&v| lr.mul_code(v) == v).count() as u64;
            assert_eq!(1u64 << f.subspace_dim_per(r), count, "n={n} r={r}");
        }
    }
}
