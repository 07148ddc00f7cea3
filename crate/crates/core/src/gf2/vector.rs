use std::fmt;
use std::str::FromStr;

use super::Gf2Error;

/// A bit-packed vector over F2. Coordinate `i` (0-based) lives in bit
/// `i % 64` of word `i / 64`; bits beyond `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Unit vector `e_i` (0-based).
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = F2Vec::zeros(len);
        v.set(i, true);
        v
    }

    /// Vector whose coordinate `i` is bit `i` of `code`. Requires `len <= 64`.
    pub fn from_code(code: u64, len: usize) -> Self {
        assert!(len <= 64, "from_code needs len <= 64");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        let mut v = F2Vec::zeros(len);
        if len > 0 {
            v.words[0] = code & mask;
        }
        v
    }

    /// Integer code (coordinate `i` in bit `i`) when `len <= 64`.
    pub fn to_code(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = F2Vec::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &F2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &F2Vec) -> F2Vec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &F2Vec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Lowest set coordinate at or after `from`.
    pub fn first_one_from(&self, from: usize) -> Option<usize> {
        (from..self.len).find(|&i| self.get(i))
    }
}

impl fmt::Display for F2Vec {
    /// Binary string with coordinate 0 leftmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vec({self})")
    }
}

impl FromStr for F2Vec {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Gf2Error::Parse(format!("bad bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(F2Vec::from_bits(bits))
    }
}
