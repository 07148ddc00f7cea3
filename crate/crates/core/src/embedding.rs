//! The embedding `iota_n: F2^n -> F2^(2n-2)` that conjugates `L_n` to a
//! coordinate rotation on its image.

use std::fmt;

use crate::gf2::F2Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("expected a vector of length {expected}, got {found}")]
    Length { expected: usize, found: usize },
    #[error("cycle size must be at least 3, got {0}")]
    InvalidSize(usize),
}

/// A vector of length `2n - 2` tagged with its `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HatVector {
    n: usize,
    bits: F2Vec,
}

impl HatVector {
    pub fn new(n: usize, bits: F2Vec) -> Result<Self, EmbeddingError> {
        if n < 3 {
            return Err(EmbeddingError::InvalidSize(n));
        }
        if bits.len() != 2 * n - 2 {
            return Err(EmbeddingError::Length {
                expected: 2 * n - 2,
                found: bits.len(),
            });
        }
        Ok(HatVector { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &F2Vec {
        &self.bits
    }

    /// Membership in `iota_n(F2^n)`; see [`in_hat_space`].
    pub fn is_member(&self) -> bool {
        relations_hold(self.n, &self.bits)
    }

    /// The first `n` coordinates: the preimage under `iota_n` for members.
    pub fn project(&self) -> F2Vec {
        F2Vec::from_bits(self.bits.iter().take(self.n))
    }
}

impl fmt::Display for HatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// `iota_n(a) = (a_1, ..., a_n, a_1+a_2+a_n, ..., a_1+a_(n-1)+a_n)`.
pub fn iota(n: usize, v: &F2Vec) -> Result<HatVector, EmbeddingError> {
    if n < 3 {
        return Err(EmbeddingError::InvalidSize(n));
    }
    if v.len() != n {
        return Err(EmbeddingError::Length {
            expected: n,
            found: v.len(),
        });
    }
    let ends = v.get(0) ^ v.get(n - 1);
    let tail = (1..n - 1).map(|j| ends ^ v.get(j));
    HatVector::new(n, F2Vec::from_bits(v.iter().chain(tail)))
}

/// `sigma(a_1, ..., a_(2n-2)) = (a_(n+1), ..., a_(2n-2), a_1, ..., a_n)`,
/// a rotation by `n` places.
pub fn sigma_shift(w: &HatVector) -> HatVector {
    let len = 2 * w.n - 2;
    let bits = F2Vec::from_bits((0..len).map(|k| w.bits.get((k + w.n) % len)));
    HatVector { n: w.n, bits }
}

fn relations_hold(n: usize, w: &F2Vec) -> bool {
    let ends = w.get(0) ^ w.get(n - 1);
    (1..=n - 2).all(|j| w.get(n - 1 + j) == (ends ^ w.get(j)))
}

/// True iff `entry_(n-1+j) = entry_1 + entry_(j+1) + entry_n` for
/// `j = 1..n-2` (1-based), i.e. `w` lies in the image of `iota_n`.
pub fn in_hat_space(n: usize, w: &F2Vec) -> Result<bool, EmbeddingError> {
    if n < 3 {
        return Err(EmbeddingError::InvalidSize(n));
    }
    if w.len() != 2 * n - 2 {
        return Err(EmbeddingError::Length {
            expected: 2 * n - 2,
            found: w.len(),
        });
    }
    Ok(relations_hold(n, w))
}

/// Length of the orbit of `v` under `L_n`, measured through the rotation:
/// the least `k` with `sigma^k(iota(v)) = iota(v)`.
pub fn period_via_rotation(n: usize, v: &F2Vec) -> Result<u64, EmbeddingError> {
    let start = iota(n, v)?;
    let mut cur = sigma_shift(&start);
    let mut k = 1;
    while cur != start {
        cur = sigma_shift(&cur);
        k += 1;
    }
    Ok(k)
}

/// `w_j` for `j = 0..n-1`: ones exactly at 1-based positions `j+1 ..= j+n-1`.
pub fn window_vector(n: usize, j: usize) -> HatVector {
    let bits = F2Vec::from_bits((1..=2 * n - 2).map(|i| i > j && i < j + n));
    HatVector { n, bits }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> F2Vec {
        s.parse().unwrap()
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota(4, &v("1011")).unwrap().to_string(), "101101");
        assert!(iota(4, &F2Vec::zeros(4)).unwrap().bits().is_zero());
        assert_eq!(iota(5, &v("11110")).unwrap(), window_vector(5, 0));
        assert!(iota(4, &v("101")).is_err());
    }

    #[test]
    fn membership() {
        assert!(!in_hat_space(4, &v("100000")).unwrap());
        assert!(in_hat_space(4, &F2Vec::zeros(6)).unwrap());
        assert!(in_hat_space(4, &v("101101")).unwrap());
        assert!(in_hat_space(4, &v("10110")).is_err());
    }

    #[test]
    fn rotation_has_order_dividing_2n_minus_2() {
        let w = iota(5, &v("10110")).unwrap();
        let mut cur = w.clone();
        for _ in 0..8 {
            cur = sigma_shift(&cur);
        }
        assert_eq!(cur, w);
        let z = HatVector::new(4, F2Vec::zeros(6)).unwrap();
        assert_eq!(sigma_shift(&z), z);
    }
}
