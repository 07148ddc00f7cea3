use std::fmt;
use std::str::FromStr;

use super::{F2Vec, Gf2Error, MAX_DIM};

/// A dense matrix over F2 stored as bit-packed rows. Rows with at most 64
/// columns occupy a single word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<F2Vec>,
}

/// Result of Gaussian elimination: the row-reduced matrix and its pivot columns.
struct Echelon {
    rows: Vec<F2Vec>,
    pivots: Vec<usize>,
}

impl MatF2 {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self, Gf2Error> {
        if n_rows > MAX_DIM || n_cols > MAX_DIM {
            return Err(Gf2Error::TooLarge {
                rows: n_rows,
                cols: n_cols,
            });
        }
        Ok(MatF2 {
            n_rows,
            n_cols,
            rows: vec![F2Vec::zeros(n_cols); n_rows],
        })
    }

    pub fn identity(n: usize) -> Result<Self, Gf2Error> {
        let mut m = MatF2::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: Vec<F2Vec>) -> Result<Self, Gf2Error> {
        let n_cols = rows.first().map_or(0, F2Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Gf2Error::Parse("ragged matrix rows".into()));
        }
        let mut m = MatF2::zeros(rows.len(), n_cols)?;
        m.rows = rows;
        Ok(m)
    }

    /// Builds an `n_rows x n_cols` matrix whose column `j` is `columns[j]`.
    pub fn from_columns(n_rows: usize, columns: &[F2Vec]) -> Result<Self, Gf2Error> {
        let mut m = MatF2::zeros(n_rows, columns.len())?;
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Gf2Error::DimensionMismatch {
                    expected: n_rows,
                    found: c.len(),
                });
            }
            for i in 0..n_rows {
                if c.get(i) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row(&self, i: usize) -> &F2Vec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[F2Vec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(F2Vec::is_zero)
    }

    pub fn transpose(&self) -> MatF2 {
        let mut t = MatF2::zeros(self.n_cols, self.n_rows).expect("same dimensions");
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn add(&self, other: &MatF2) -> Result<MatF2, Gf2Error> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_rows,
                found: other.n_rows,
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.xor(b))
            .collect();
        Ok(MatF2 { rows, ..*self })
    }

    /// `self + I`; requires a square matrix.
    pub fn add_identity(&self) -> Result<MatF2, Gf2Error> {
        self.add(&MatF2::identity(self.require_square()?)?)
    }

    pub fn mul(&self, other: &MatF2) -> Result<MatF2, Gf2Error> {
        if self.n_cols != other.n_rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_cols,
                found: other.n_rows,
            });
        }
        // Row i of the product is the xor of rows of `other` selected by row i of `self`.
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = F2Vec::zeros(other.n_cols);
                for k in 0..self.n_cols {
                    if r.get(k) {
                        acc.xor_assign(&other.rows[k]);
                    }
                }
                acc
            })
            .collect();
        Ok(MatF2 {
            n_rows: self.n_rows,
            n_cols: other.n_cols,
            rows,
        })
    }

    pub fn pow(&self, mut exp: u64) -> Result<MatF2, Gf2Error> {
        let n = self.require_square()?;
        let mut acc = MatF2::identity(n)?;
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    pub fn mul_vec(&self, v: &F2Vec) -> Result<F2Vec, Gf2Error> {
        if v.len() != self.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        Ok(F2Vec::from_bits(self.rows.iter().map(|r| r.dot(v))))
    }

    /// Matrix-vector product on integer codes, for enumeration loops.
    /// Requires at most 64 columns and rows.
    pub fn mul_code(&self, code: u64) -> u64 {
        debug_assert!(self.n_cols <= 64 && self.n_rows <= 64);
        let mut out = 0u64;
        for (i, r) in self.rows.iter().enumerate() {
            let w = r.words().first().copied().unwrap_or(0);
            out |= (((w & code).count_ones() & 1) as u64) << i;
        }
        out
    }

    pub(crate) fn require_square(&self) -> Result<usize, Gf2Error> {
        if self.is_square() {
            Ok(self.n_rows)
        } else {
            Err(Gf2Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            })
        }
    }

    fn echelon(&self, augment: Option<&F2Vec>) -> Echelon {
        let width = self.n_cols + usize::from(augment.is_some());
        let mut rows: Vec<F2Vec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut wide = F2Vec::zeros(width);
                for j in 0..self.n_cols {
                    if r.get(j) {
                        wide.set(j, true);
                    }
                }
                if let Some(b) = augment {
                    wide.set(self.n_cols, b.get(i));
                }
                wide
            })
            .collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.n_cols {
            let Some(p) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon(None).pivots.len()
    }

    /// Dimension of the null space `{v : Mv = 0}`.
    pub fn kernel_dim(&self) -> usize {
        self.n_cols - self.rank()
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<F2Vec> {
        let ech = self.echelon(None);
        let free: Vec<usize> = (0..self.n_cols)
            .filter(|c| !ech.pivots.contains(c))
            .collect();
        free.into_iter()
            .map(|f| {
                let mut v = F2Vec::unit(self.n_cols, f);
                for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(f) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect()
    }

    /// One solution of `Mx = b` with every free variable set to 0, or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &F2Vec) -> Result<Option<F2Vec>, Gf2Error> {
        if b.len() != self.n_rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_rows,
                found: b.len(),
            });
        }
        let ech = self.echelon(Some(b));
        let rhs = self.n_cols;
        if ech.rows[ech.pivots.len()..].iter().any(|r| r.get(rhs)) {
            return Ok(None);
        }
        let mut x = F2Vec::zeros(self.n_cols);
        for (row, &pc) in ech.rows.iter().zip(&ech.pivots) {
            x.set(pc, row.get(rhs));
        }
        Ok(Some(x))
    }
}

impl fmt::Display for MatF2 {
    /// One row per line as `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatF2 {}x{} [", self.n_rows, self.n_cols)?;
        for r in &self.rows {
            write!(f, " {r}")?;
        }
        f.write_str(" ]")
    }
}

impl FromStr for MatF2 {
    type Err = Gf2Error;

    /// Rows of `0`/`1` characters separated by newlines, commas or spaces.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .split(|c: char| c == '\n' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse::<F2Vec>)
            .collect::<Result<Vec<_>, _>>()?;
        MatF2::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> MatF2 {
        s.parse().unwrap()
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let i4 = MatF2::identity(4).unwrap();
        assert_eq!(i4.add(&i4).unwrap().kernel_dim(), 4);
    }

    #[test]
    fn solve_picks_zero_free_variables() {
        let a = m("110 011");
        let b: F2Vec = "10".parse().unwrap();
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), b);
        assert!(!x.get(2), "free variable must be 0");
        let inconsistent = m("11 11");
        assert_eq!(inconsistent.solve(&"10".parse().unwrap()).unwrap(), None);
        assert!(a.solve(&"1".parse().unwrap()).is_err());
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let a = m("1101 1011 1000 0100").add_identity().unwrap();
        let basis = a.kernel_basis();
        assert_eq!(basis.len(), a.kernel_dim());
        for v in &basis {
            assert!(a.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn pow_and_mul_code_agree() {
        let a = m("1101 1011 1000 0100");
        let a3 = a.pow(3).unwrap();
        for code in 0..16u64 {
            let direct = a.mul_code(a.mul_code(a.mul_code(code)));
            assert_eq!(a3.mul_code(code), direct);
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        assert!(MatF2::zeros(513, 2).is_err());
        assert!(MatF2::identity(512).is_ok());
    }
}
