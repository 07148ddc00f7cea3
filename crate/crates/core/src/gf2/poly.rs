use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use super::Gf2Error;

/// Degree of a polynomial. The zero polynomial has degree `NegInfinity`,
/// which compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInfinity, Degree::NegInfinity) => Ordering::Equal,
            (Degree::NegInfinity, Degree::Finite(_)) => Ordering::Less,
            (Degree::Finite(_), Degree::NegInfinity) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial over F2, bit-packed little-endian: bit `i` of the word
/// sequence is the coefficient of `x^i`.
///
/// The representation is canonical (no trailing zero words), so derived
/// equality and hashing are polynomial equality. The zero polynomial owns no
/// words at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    words: Vec<u64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { words: Vec::new() }
    }

    pub fn one() -> Self {
        Poly2 { words: vec![1] }
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly2::monomial(1)
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut words = vec![0u64; k / 64 + 1];
        words[k / 64] = 1 << (k % 64);
        Poly2 { words }
    }

    /// `x^k + 1` (which is `x^k - 1` over F2). For `k = 0` this is zero.
    pub fn x_pow_plus_one(k: usize) -> Self {
        &Poly2::monomial(k) + &Poly2::one()
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    /// Repeated exponents cancel in pairs.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Poly2::zero();
        for &e in exps {
            p.flip_coeff(e);
        }
        p
    }

    /// Builds a polynomial from a little-endian coefficient mask.
    pub fn from_mask(mask: u64) -> Self {
        let mut p = Poly2 { words: vec![mask] };
        p.normalize();
        p
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let mut p = Poly2 { words };
        p.normalize();
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 coefficients as a mask; `None` if the degree is 64 or more.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn degree(&self) -> Degree {
        match self.words.last() {
            None => Degree::NegInfinity,
            Some(&top) => {
                let hi = 63 - top.leading_zeros() as usize;
                Degree::Finite((self.words.len() - 1) * 64 + hi)
            }
        }
    }

    /// Degree as a plain integer, treating zero as degree 0. Handy where the
    /// caller only sums degrees of nonzero gcds.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().finite().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    fn flip_coeff(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        self.normalize();
    }

    /// Exponents of nonzero terms, highest first.
    pub fn exponents(&self) -> Vec<usize> {
        let Some(d) = self.degree().finite() else {
            return Vec::new();
        };
        (0..=d).rev().filter(|&i| self.coeff(i)).collect()
    }

    /// `self * x^k`.
    pub fn shl(&self, k: usize) -> Poly2 {
        if self.is_zero() {
            return Poly2::zero();
        }
        let word_shift = k / 64;
        let bit_shift = k % 64;
        let mut words = vec![0u64; self.words.len() + word_shift + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        Poly2::from_words(words)
    }

    fn xor_shifted(&mut self, other: &Poly2, k: usize) {
        if other.is_zero() {
            return;
        }
        let word_shift = k / 64;
        let bit_shift = k % 64;
        let need = other.words.len() + word_shift + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                self.words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        self.normalize();
    }

    /// Quotient and remainder: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly2) -> Result<(Poly2, Poly2), Gf2Error> {
        let Degree::Finite(db) = divisor.degree() else {
            return Err(Gf2Error::DivisionByZero);
        };
        let mut r = self.clone();
        let mut q = Poly2::zero();
        while let Degree::Finite(dr) = r.degree() {
            if dr < db {
                break;
            }
            let shift = dr - db;
            r.xor_shifted(divisor, shift);
            q.flip_coeff(shift);
        }
        Ok((q, r))
    }

    pub fn rem(&self, divisor: &Poly2) -> Result<Poly2, Gf2Error> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// True iff `self` divides `other`. Zero divides only zero.
    pub fn divides(&self, other: &Poly2) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        self.rem_unchecked(other).is_zero()
    }

    fn rem_unchecked(&self, other: &Poly2) -> Poly2 {
        other.div_rem(self).expect("nonzero divisor").1
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Poly2) -> Result<Poly2, Gf2Error> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly2::one().rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = (&acc * &base).rem(modulus)?;
            }
            base = (&base * &base).rem(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    pub fn pow(&self, exp: u32) -> Poly2 {
        let mut acc = Poly2::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Monic greatest common divisor by the Euclidean algorithm. Over F2
    /// every nonzero polynomial is already monic.
    pub fn gcd(&self, other: &Poly2) -> Result<Poly2, Gf2Error> {
        if self.is_zero() && other.is_zero() {
            return Err(Gf2Error::GcdOfZeros);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Hex form of the coefficient mask, most significant digit first, e.g.
    /// `x^4+x^3+x+1` is `0x1b`.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0".to_string();
        }
        let mut s = String::from("0x");
        let top = self.words.len() - 1;
        s.push_str(&format!("{:x}", self.words[top]));
        for w in self.words[..top].iter().rev() {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(text: &str) -> Result<Poly2, Gf2Error> {
        let t = text.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if digits.is_empty() {
            return Err(Gf2Error::Parse(format!("empty hex polynomial {text:?}")));
        }
        let mut words = Vec::new();
        let bytes = digits.as_bytes();
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = &digits[start..end];
            let w = u64::from_str_radix(chunk, 16)
                .map_err(|_| Gf2Error::Parse(format!("bad hex polynomial {text:?}")))?;
            words.push(w);
            end = start;
        }
        Ok(Poly2::from_words(words))
    }
}

impl Add for &Poly2 {
    type Output = Poly2;

    fn add(self, rhs: &Poly2) -> Poly2 {
        let (long, short) = if self.words.len() >= rhs.words.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        Poly2::from_words(words)
    }
}

impl Add for Poly2 {
    type Output = Poly2;

    fn add(self, rhs: Poly2) -> Poly2 {
        &self + &rhs
    }
}

impl AddAssign<&Poly2> for Poly2 {
    fn add_assign(&mut self, rhs: &Poly2) {
        self.xor_shifted(rhs, 0);
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;

    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut acc = Poly2::zero();
        if self.is_zero() || rhs.is_zero() {
            return acc;
        }
        // Iterate over the sparser operand.
        let (a, b) = if self.words.iter().map(|w| w.count_ones()).sum::<u32>()
            <= rhs.words.iter().map(|w| w.count_ones()).sum::<u32>()
        {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (wi, &w) in a.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b0 = bits.trailing_zeros() as usize;
                acc.xor_shifted(b, wi * 64 + b0);
                bits &= bits - 1;
            }
        }
        acc
    }
}

impl Mul for Poly2 {
    type Output = Poly2;

    fn mul(self, rhs: Poly2) -> Poly2 {
        &self * &rhs
    }
}

impl fmt::Display for Poly2 {
    /// ASCII form with terms in decreasing degree, e.g. `x^4+x^3+x+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}

impl FromStr for Poly2 {
    type Err = Gf2Error;

    /// Parses sums of `1`, `x`, `x^k` (spaces allowed). Repeated terms cancel.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Gf2Error::Parse("empty polynomial".into()));
        }
        if cleaned == "0" {
            return Ok(Poly2::zero());
        }
        let mut exps = Vec::new();
        for term in cleaned.split('+') {
            let e = match term {
                "1" => 0,
                "x" => 1,
                t => t
                    .strip_prefix("x^")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Gf2Error::Parse(format!("bad term {t:?} in {s:?}")))?,
            };
            exps.push(e);
        }
        Ok(Poly2::from_exponents(&exps))
    }
}
