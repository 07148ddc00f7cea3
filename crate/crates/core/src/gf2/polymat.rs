use std::fmt;

use super::{Gf2Error, MatF2, Poly2, MAX_DIM};

/// A dense matrix over F2[x].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMat {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Vec<Poly2>>,
}

/// The nonunit invariant factors of a square polynomial matrix, in
/// divisibility order (`factors[i]` divides `factors[i + 1]`).
///
/// Unit factors are dropped from `factors`; `total_count` still records how
/// many diagonal entries the Smith form had, so the number of stripped units
/// is `total_count - factors.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantFactors {
    factors: Vec<Poly2>,
    total_count: usize,
}

impl InvariantFactors {
    /// Builds from a full Smith diagonal (units included).
    pub fn from_diagonal(diagonal: Vec<Poly2>) -> Self {
        let total_count = diagonal.len();
        let factors = diagonal.into_iter().filter(|p| !p.is_one()).collect();
        InvariantFactors {
            factors,
            total_count,
        }
    }

    pub fn factors(&self) -> &[Poly2] {
        &self.factors
    }

    pub fn total_count(&self) -> usize {
        self.total_count
    }

    pub fn unit_count(&self) -> usize {
        self.total_count - self.factors.len()
    }

    pub fn product(&self) -> Poly2 {
        self.factors
            .iter()
            .fold(Poly2::one(), |acc, f| &acc * f)
    }

    /// The last factor (the minimal polynomial for `xI - M`); `1` if every
    /// factor is a unit.
    pub fn largest(&self) -> Poly2 {
        self.factors.last().cloned().unwrap_or_else(Poly2::one)
    }

    pub fn is_divisibility_chain(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].divides(&w[1]))
    }

    /// `sum_i deg gcd(x^r - 1, alpha_i)`: the dimension of the space of
    /// vectors fixed by `L^r` when these are the invariant factors of `L`.
    pub fn subspace_dim_per(&self, r: u64) -> usize {
        assert!(r >= 1, "r must be positive");
        let xr = Poly2::x_pow_plus_one(r as usize);
        self.factors
            .iter()
            .map(|a| xr.gcd(a).expect("x^r+1 is nonzero").degree_or_zero())
            .sum()
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(Poly2::to_string).collect();
        f.write_str(&parts.join(", "))
    }
}

impl PolyMat {
    pub fn from_entries(entries: Vec<Vec<Poly2>>) -> Result<Self, Gf2Error> {
        let n_rows = entries.len();
        let n_cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != n_cols) {
            return Err(Gf2Error::Parse("ragged polynomial matrix".into()));
        }
        if n_rows > MAX_DIM || n_cols > MAX_DIM {
            return Err(Gf2Error::TooLarge {
                rows: n_rows,
                cols: n_cols,
            });
        }
        Ok(PolyMat {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// The characteristic matrix `xI - M` (equal to `xI + M` over F2).
    pub fn characteristic(m: &MatF2) -> Result<Self, Gf2Error> {
        let n = m.require_square()?;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut p = if m.get(i, j) { Poly2::one() } else { Poly2::zero() };
                        if i == j {
                            p += &Poly2::x();
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        PolyMat::from_entries(entries)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly2 {
        &self.entries[i][j]
    }

    fn require_square(&self) -> Result<usize, Gf2Error> {
        if self.n_rows == self.n_cols {
            Ok(self.n_rows)
        } else {
            Err(Gf2Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            })
        }
    }

    /// Diagonal of the Smith normal form over F2[x].
    ///
    /// Pivot: the nonzero entry of least degree in the active block, ties to
    /// the lexicographically smallest (row, col). Row and column elimination
    /// repeat until the pivot row and column are clear, then any entry the
    /// pivot fails to divide is folded into the pivot row and the step restarts.
    pub fn smith_invariant_factors(&self) -> Result<InvariantFactors, Gf2Error> {
        let n = self.require_square()?;
        let mut a = self.entries.clone();
        let mut diagonal = Vec::with_capacity(n);
        'outer: for t in 0..n {
            loop {
                let mut best: Option<(usize, usize, usize)> = None;
                for (i, row) in a.iter().enumerate().skip(t) {
                    for (j, e) in row.iter().enumerate().skip(t) {
                        if let Some(d) = e.degree().finite() {
                            if best.is_none_or(|(bd, _, _)| d < bd) {
                                best = Some((d, i, j));
                            }
                        }
                    }
                }
                let Some((_, pi, pj)) = best else {
                    diagonal.extend(std::iter::repeat_n(Poly2::zero(), n - t));
                    break 'outer;
                };
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }

                let mut clean = true;
                for i in t + 1..n {
                    if a[i][t].is_zero() {
                        continue;
                    }
                    let (q, r) = a[i][t].div_rem(&a[t][t])?;
                    for j in t..n {
                        let delta = &q * &a[t][j];
                        a[i][j] += &delta;
                    }
                    clean &= r.is_zero();
                }
                for j in t + 1..n {
                    if a[t][j].is_zero() {
                        continue;
                    }
                    let (q, r) = a[t][j].div_rem(&a[t][t])?;
                    for row in a.iter_mut().skip(t) {
                        let delta = &q * &row[t];
                        row[j] += &delta;
                    }
                    clean &= r.is_zero();
                }
                if !clean {
                    continue;
                }

                let pivot = a[t][t].clone();
                let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| !pivot.divides(&a[i][j])));
                match offender {
                    Some(i) => {
                        for j in t + 1..n {
                            let v = a[i][j].clone();
                            a[t][j] += &v;
                        }
                    }
                    None => break,
                }
            }
            diagonal.push(a[t][t].clone());
        }
        Ok(InvariantFactors::from_diagonal(diagonal))
    }

    /// Determinant by fraction-free (Bareiss) elimination. Signs vanish in
    /// characteristic 2 and every division is exact.
    pub fn determinant(&self) -> Result<Poly2, Gf2Error> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(Poly2::one());
        }
        let mut a = self.entries.clone();
        let mut prev = Poly2::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(p) => a.swap(k, p),
                    None => return Ok(Poly2::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) + &(&a[i][k] * &a[k][j]);
                    let (q, r) = num.div_rem(&prev)?;
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a[i][j] = q;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(a[n - 1][n - 1].clone())
    }
}

impl MatF2 {
    /// Invariant factors of the linear map with this matrix, i.e. the Smith
    /// form of `xI - M`.
    pub fn invariant_factors(&self) -> Result<InvariantFactors, Gf2Error> {
        PolyMat::characteristic(self)?.smith_invariant_factors()
    }

    /// `det(xI - M)`, computed by fraction-free elimination.
    pub fn char_poly(&self) -> Result<Poly2, Gf2Error> {
        PolyMat::characteristic(self)?.determinant()
    }

    /// The largest invariant factor of `xI - M`.
    pub fn min_poly(&self) -> Result<Poly2, Gf2Error> {
        Ok(self.invariant_factors()?.largest())
    }
}

impl Poly2 {
    /// `p(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &MatF2) -> Result<MatF2, Gf2Error> {
        let n = m.require_square()?;
        let mut acc = MatF2::zeros(n, n)?;
        let Some(d) = self.degree().finite() else {
            return Ok(acc);
        };
        let id = MatF2::identity(n)?;
        for i in (0..=d).rev() {
            acc = acc.mul(m)?;
            if self.coeff(i) {
                acc = acc.add(&id)?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly2 {
        s.parse().unwrap()
    }

    fn b4() -> MatF2 {
        "1101 1011 1000 0100".parse().unwrap()
    }

    #[test]
    fn identity_invariant_factors() {
        let f = MatF2::identity(2).unwrap().invariant_factors().unwrap();
        assert_eq!(f.factors(), &[p("x+1"), p("x+1")]);
        assert_eq!(f.total_count(), 2);
        let i3 = MatF2::identity(3).unwrap();
        assert_eq!(i3.char_poly().unwrap(), p("x+1").pow(3));
        assert_eq!(i3.min_poly().unwrap(), p("x+1"));
    }

    #[test]
    fn cycle_matrix_n4() {
        let f = b4().invariant_factors().unwrap();
        assert_eq!(f.factors(), &[p("x+1"), p("x^3+1")]);
        assert_eq!(f.unit_count(), 2);
        assert_eq!(b4().char_poly().unwrap(), p("x^4+x^3+x+1"));
        assert_eq!(b4().min_poly().unwrap(), p("x^3+1"));
    }

    #[test]
    fn subspace_dims_for_n4() {
        let f = b4().invariant_factors().unwrap();
        assert_eq!(f.subspace_dim_per(3), 4);
        assert_eq!(f.subspace_dim_per(1), 2);
        assert_eq!(f.subspace_dim_per(6), 4);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = PolyMat::from_entries(vec![vec![Poly2::one(), Poly2::zero()]]).unwrap();
        assert!(m.smith_invariant_factors().is_err());
        assert!(m.determinant().is_err());
        let r: MatF2 = "10".parse().unwrap();
        assert!(r.char_poly().is_err());
    }

    #[test]
    fn eval_matrix_annihilates() {
        assert!(p("x^3+1").eval_matrix(&b4()).unwrap().is_zero());
        assert!(!p("x+1").eval_matrix(&b4()).unwrap().is_zero());
    }

    #[test]
    fn singular_polynomial_matrix_keeps_zero_factors() {
        let m = PolyMat::from_entries(vec![
            vec![p("x"), p("x")],
            vec![p("x"), p("x")],
        ])
        .unwrap();
        let f = m.smith_invariant_factors().unwrap();
        assert_eq!(f.factors(), &[p("x"), Poly2::zero()]);
        assert!(m.determinant().unwrap().is_zero());
    }
}
