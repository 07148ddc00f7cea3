//! Small integer helpers: divisors, the Möbius function, odd divisibility.
//!
//! Arguments stay at desk scale (periods are bounded by `2n - 2` or by the
//! size of an enumerated state space), so everything here is trial division.

/// Greatest common divisor of two non-negative integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple; `lcm(0, x) = 0`.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
/// `factorize(0)` and `factorize(1)` are empty.
pub fn factorize(mut k: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if k < 2 {
        return out;
    }
    let mut p: u128 = 2;
    while p * p <= k {
        if k % p == 0 {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

/// The number-theoretic Möbius function. `mobius(0)` is defined as 0.
pub fn mobius(k: u64) -> i64 {
    if k == 0 {
        return 0;
    }
    let factors = factorize(k as u128);
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Positive divisors of `k` in increasing order. Empty for `k = 0`.
pub fn divisors(k: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= k {
        if k % d == 0 {
            small.push(d);
            if d * d != k {
                large.push(k / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `d |_o m`: `m / d` is an odd integer. Only meaningful for positive inputs.
pub fn odd_divides(d: u64, m: u64) -> bool {
    d != 0 && m != 0 && m % d == 0 && (m / d) % 2 == 1
}

/// Divisors `d` of `k` with `d |_o k`, in increasing order.
pub fn odd_cofactor_divisors(k: u64) -> Vec<u64> {
    divisors(k)
        .into_iter()
        .filter(|&d| odd_divides(d, k))
        .collect()
}
