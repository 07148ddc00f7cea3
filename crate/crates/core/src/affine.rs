//! Affine maps `T(v) = L_n(v) + b` on F2^n: lifts to a linear map on
//! F2^(n+1), fixed-point solving, and closed-form periodic-point counts for
//! `[C_n, {parity_3, (1+parity)_3}, id]`.
//!
//! Every count here depends on `n` only through divisibility of `r` against
//! `n - 1` and `2n - 2`, plus whether `T` has a fixed point.

use crate::arith::{divisors, gcd, mobius, odd_cofactor_divisors, odd_divides};
use crate::gf2::{F2Vec, Gf2Error, InvariantFactors, MatF2, Poly2};
use crate::system::{affine_decomposition, ln_matrix, RuleVector, SdsError, SdsSpec, MAX_N};

/// Closed forms are evaluated in `u128`; every power of two they need stays
/// below `2^(n+1)` for `n <= 64`.
pub const MAX_CLOSED_FORM_N: u64 = MAX_N as u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DynamicsError {
    #[error("offset has length {found}, matrix is {expected}x{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("closed forms need 3 <= n <= {MAX_CLOSED_FORM_N} and r >= 1 (got n={n}, r={r})")]
    InvalidInput { n: u64, r: u64 },
    #[error("xi_{m}({k}): k is odd and does not divide m-1")]
    XiDomain { m: u64, k: u64 },
    #[error("bound not applicable: (n={n}, fixed_point={fixed_point}, r={r}) is not a nice triple")]
    NotNice { n: u64, fixed_point: bool, r: u64 },
    #[error("no rule vector on C_{0} lacks a fixed point")]
    NoRepresentative(usize),
    #[error(transparent)]
    System(#[from] SdsError),
    #[error(transparent)]
    Algebra(#[from] Gf2Error),
}

/// The `(n+1) x (n+1)` matrix with top row `(1, 0, ..., 0)`, first column
/// `(1, b_1, ..., b_n)` and `M` in the lower-right block. It restricts to
/// `L` on `{z_0 = 0}` and to `T` on `{z_0 = 1}`.
pub fn tilde_matrix(m: &MatF2, b: &F2Vec) -> Result<MatF2, DynamicsError> {
    let n = m.n_rows();
    if !m.is_square() || b.len() != n {
        return Err(DynamicsError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut t = MatF2::zeros(n + 1, n + 1)?;
    t.set(0, 0, true);
    for i in 0..n {
        t.set(i + 1, 0, b.get(i));
        for j in 0..n {
            t.set(i + 1, j + 1, m.get(i, j));
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointReport {
    pub exists: bool,
    pub witness: Option<F2Vec>,
}

/// Solves `(M + I) a = b`. `T(a) = a` iff `a` solves it. The witness has every
/// free variable set to 0.
pub fn has_fixed_point(m: &MatF2, b: &F2Vec) -> Result<FixedPointReport, DynamicsError> {
    if !m.is_square() || b.len() != m.n_rows() {
        return Err(DynamicsError::DimensionMismatch {
            expected: m.n_rows(),
            found: b.len(),
        });
    }
    let witness = m.add_identity()?.solve(b)?;
    Ok(FixedPointReport {
        exists: witness.is_some(),
        witness,
    })
}

/// Fixed-point status of a binary spec via its affine form.
pub fn spec_fixed_point(spec: &SdsSpec) -> Result<FixedPointReport, DynamicsError> {
    let form = affine_decomposition(spec)?;
    has_fixed_point(&form.matrix, &form.offset)
}

/// Case data for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClosedFormInput {
    n: u64,
    has_fixed_point: bool,
    r: u64,
}

impl ClosedFormInput {
    pub fn new(n: u64, has_fixed_point: bool, r: u64) -> Result<Self, DynamicsError> {
        if !(3..=MAX_CLOSED_FORM_N).contains(&n) || r == 0 {
            return Err(DynamicsError::InvalidInput { n, r });
        }
        Ok(ClosedFormInput {
            n,
            has_fixed_point,
            r,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn has_fixed_point(&self) -> bool {
        self.has_fixed_point
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    fn with_r(&self, r: u64) -> Self {
        ClosedFormInput { r, ..*self }
    }
}

fn pow2(e: u64) -> u128 {
    1u128 << e
}

/// `|Per_1(T^r)|`. `r` is first replaced by `gcd(r, 2n - 2)`, since
/// `T^(2n-2)` is the identity.
pub fn closed_form_fixed_of_power(inp: &ClosedFormInput) -> u128 {
    let n = inp.n;
    let r = gcd(inp.r, 2 * n - 2);
    let divides_n1 = (n - 1) % r == 0;
    match (inp.has_fixed_point, divides_n1) {
        (true, true) if n % 2 == 0 => pow2(r + 1),
        (true, true) => pow2(r),
        (false, true) => 0,
        // r | 2n-2 but not n-1, so r is even.
        (_, false) => pow2(r / 2 + 1),
    }
}

/// `xi_m(k)`: `2^k` if `k | m - 1`, else `2^(k/2 + 1)`. The second branch is
/// only reachable with even `k` from valid inputs; odd `k` there is an error.
pub fn xi(m: u64, k: u64) -> Result<u128, DynamicsError> {
    assert!(k >= 1, "k must be positive");
    let m1 = m.saturating_sub(1);
    if m1 % k == 0 {
        Ok(pow2(k))
    } else if k % 2 == 1 {
        Err(DynamicsError::XiDomain { m, k })
    } else {
        Ok(pow2(k / 2 + 1))
    }
}

fn mobius_sum<I, F>(r: u64, ds: I, term: F) -> u128
where
    I: IntoIterator<Item = u64>,
    F: Fn(u64) -> u128,
{
    let s: i128 = ds
        .into_iter()
        .map(|d| mobius(r / d) as i128 * term(d) as i128)
        .sum();
    u128::try_from(s).expect("periodic-point counts are non-negative")
}

fn xi_valid(m: u64, k: u64) -> u128 {
    xi(m, k).expect("divisors reached from valid inputs never hit the odd branch")
}

/// `|Per_r(T)|` in closed form.
///
/// With a fixed point: `sum_{d|r} mu(r/d) 2^(d+1)` when `n` is even and
/// `r | n-1`; `sum_{d|r} mu(r/d) xi_n(d)` when `n` is odd and `r | 2n-2`;
/// otherwise 0. Without: `sum_{d |_o r} mu(r/d) 2^(d/2+1)` when
/// `r |_o 2n-2`, otherwise 0.
pub fn closed_form_per(inp: &ClosedFormInput) -> u128 {
    let (n, r) = (inp.n, inp.r);
    if inp.has_fixed_point {
        if n % 2 == 0 && (n - 1) % r == 0 {
            mobius_sum(r, divisors(r), |d| pow2(d + 1))
        } else if n % 2 == 1 && (2 * n - 2) % r == 0 {
            mobius_sum(r, divisors(r), |d| xi_valid(n, d))
        } else {
            0
        }
    } else if odd_divides(r, 2 * n - 2) {
        mobius_sum(r, odd_cofactor_divisors(r), |d| pow2(d / 2 + 1))
    } else {
        0
    }
}

/// `|Per_r(T)|` for `r = 1..=r_max`: one row of a period table.
pub fn closed_form_row(n: u64, has_fixed_point: bool, r_max: u64) -> Result<Vec<u128>, DynamicsError> {
    (1..=r_max)
        .map(|r| ClosedFormInput::new(n, has_fixed_point, r).map(|inp| closed_form_per(&inp)))
        .collect()
}

/// `|Per_r(T)|` by Möbius inversion of [`closed_form_fixed_of_power`]; a
/// second route to the same numbers as [`closed_form_per`].
pub fn closed_form_per_via_inversion(inp: &ClosedFormInput) -> u128 {
    let r = inp.r;
    mobius_sum(r, divisors(r), |d| closed_form_fixed_of_power(&inp.with_r(d)))
}

/// The values `|Per_r(T)|` can take as `T` and `n` vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodConstants {
    pub kappa: u128,
    pub lambda: u128,
    /// Only defined for even `r`.
    pub rho: Option<u128>,
    pub theta: u128,
}

/// `kappa_r = sum_{d|r} mu(r/d) 2^d`; `lambda_r` is
/// `sum_{d|r} mu(r/d) xi_{r/2+1}(d)` for even `r` and `2 kappa_r` for odd `r`;
/// `rho_r = sum_{d |_o r} mu(r/d) 2^(d/2+1)` (even `r` only); `theta_r` is
/// `rho_r` for even `r` and `sum_{d|r} mu(r/d) 2^(d+1)` for odd `r`.
pub fn kappa_lambda_rho_theta(r: u64) -> PeriodConstants {
    assert!(r >= 1, "r must be positive");
    let kappa = mobius_sum(r, divisors(r), pow2);
    let even = r % 2 == 0;
    let lambda = if even {
        mobius_sum(r, divisors(r), |d| xi_valid(r / 2 + 1, d))
    } else {
        2 * kappa
    };
    let rho = even.then(|| mobius_sum(r, odd_cofactor_divisors(r), |d| pow2(d / 2 + 1)));
    let theta = match rho {
        Some(v) => v,
        None => mobius_sum(r, divisors(r), |d| pow2(d + 1)),
    };
    PeriodConstants {
        kappa,
        lambda,
        rho,
        theta,
    }
}

/// A triple is nice when `Per_r(T)` can be nonempty: with a fixed point,
/// `r | (2n-2)/gcd(2,n)`; without, `r |_o 2n-2`.
pub fn is_nice(inp: &ClosedFormInput) -> bool {
    let (n, r) = (inp.n, inp.r);
    if inp.has_fixed_point {
        ((2 * n - 2) / gcd(2, n)) % r == 0
    } else {
        odd_divides(r, 2 * n - 2)
    }
}

/// Guaranteed minimum of `|Per_r(T)|` for a nice triple: 2 with a fixed
/// point, 4 without.
pub fn corollary3_lower_bound(inp: &ClosedFormInput) -> Result<u128, DynamicsError> {
    if !is_nice(inp) {
        return Err(DynamicsError::NotNice {
            n: inp.n,
            fixed_point: inp.has_fixed_point,
            r: inp.r,
        });
    }
    Ok(if inp.has_fixed_point { 2 } else { 4 })
}

/// `u_n = (g_1, ..., g_(n-1), g_(n-1))` with `g_i = i mod 2`: the offset of
/// `[C_n, (1+parity)_3, id]`.
pub fn all_plus_one_offset(n: usize) -> F2Vec {
    let gamma = |i: usize| i % 2 == 1;
    F2Vec::from_bits((1..n).map(gamma).chain(std::iter::once(gamma(n - 1))))
}

/// `a_n`: entry `i` is 0 iff `i = 1, 2 (mod 4)`.
pub fn all_plus_one_witness(n: usize) -> F2Vec {
    F2Vec::from_bits((1..=n).map(|i| !matches!(i % 4, 1 | 2)))
}

/// `[C_n, (1+parity)_3, id]` has a fixed point iff `4 | n`; when it does,
/// `a_n` is one.
pub fn theorem4_predicate(n: usize) -> (bool, Option<F2Vec>) {
    if n % 4 == 0 {
        (true, Some(all_plus_one_witness(n)))
    } else {
        (false, None)
    }
}

/// A fixed spec for each `(n, fixed point?)` class: all-parity when a fixed
/// point is wanted, otherwise the rule vector with the smallest mask whose
/// map has none.
pub fn representative_spec(n: usize, fixed_point: bool) -> Result<SdsSpec, DynamicsError> {
    if fixed_point {
        return Ok(SdsSpec::parity(n)?);
    }
    let shifted = ln_matrix(n)?.add_identity()?;
    let limit: u64 = if n >= 20 { 1 << 20 } else { 1 << n };
    for mask in 1..limit {
        let spec = SdsSpec::with_identity_order(RuleVector::new(n, mask)?);
        let b = F2Vec::from_code(spec.apply_code(0), n);
        if shifted.solve(&b)?.is_none() {
            return Ok(spec);
        }
    }
    Err(DynamicsError::NoRepresentative(n))
}

/// Number of `v` in F2^dim with `M^r v = v`, by enumeration. `dim <= 30`.
pub fn count_fixed_by_power(m: &MatF2, r: u64) -> u64 {
    let dim = m.n_rows();
    assert!(dim <= 30 && m.is_square(), "enumeration limited to 30 dimensions");
    let mr = m.pow(r).expect("square");
    (0..1u64 << dim).filter(|&v| mr.mul_code(v) == v).count() as u64
}

/// How the invariant factors of the lift relate to those of the linear part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftRelation {
    /// `beta = (x+1, alpha_1, ..., alpha_t)`: the fixed-point case.
    PrependedUnitRoot,
    /// Same length, equal except at `index`, where `beta_j = (x+1) alpha_j`.
    MultipliedAt { index: usize },
    Neither,
}

/// Classifies `beta` (lift) against `alpha` (linear part). Both lists are
/// compared after padding `alpha` with one leading unit, so a unit factor
/// that gains `x+1` is detected too. Every position is searched.
pub fn lift_relation(alpha: &InvariantFactors, beta: &InvariantFactors) -> LiftRelation {
    let x1 = Poly2::x_pow_plus_one(1);
    let mut a: Vec<Poly2> = alpha.factors().to_vec();
    let b = beta.factors();
    if b.len() == a.len() + 1 && b[0] == x1 && b[1..] == a[..] {
        return LiftRelation::PrependedUnitRoot;
    }
    if b.len() == a.len() + 1 {
        a.insert(0, Poly2::one());
    }
    if a.len() != b.len() {
        return LiftRelation::Neither;
    }
    let diffs: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    match diffs.as_slice() {
        [j] if b[*j] == &x1 * &a[*j] => LiftRelation::MultipliedAt { index: *j },
        _ => LiftRelation::Neither,
    }
}
