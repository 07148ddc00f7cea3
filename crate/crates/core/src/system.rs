//! SDS maps over the cycle graph `C_n` with parity-type vertex functions.
//!
//! Vertices are 1-based in every public signature that takes a vertex index
//! and in all text forms; storage is 0-based. A state over `Z/mZ` is kept as
//! its canonical integer code `sum_i q_i m^(i-1)` with vertex 1 least
//! significant, so for `m = 2` the code is a bitmask with vertex 1 in bit 0.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2::{F2Vec, Gf2Error, MatF2};

/// Longest cycle a spec may have; keeps rule vectors in one word.
pub const MAX_N: usize = 64;

/// States are verified exhaustively up to this size in
/// [`affine_decomposition`]; beyond it a fixed random probe is used.
const EXHAUSTIVE_VERIFY_N: usize = 12;
const PROBE_STATES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SdsError {
    #[error("cycle size must satisfy 3 <= n <= {MAX_N}, got {0}")]
    InvalidSize(usize),
    #[error("state modulus must be at least 2, got {0}")]
    InvalidModulus(u32),
    #[error("state space {modulus}^{n} does not fit in a 64-bit code")]
    StateSpaceTooLarge { n: usize, modulus: u32 },
    #[error("update order is not a permutation of 1..{0}")]
    InvalidOrder(usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("rule vector has length {found}, expected {expected}")]
    RuleLength { expected: usize, found: usize },
    #[error("state does not match spec: {0}")]
    StateMismatch(String),
    #[error("map is not affine: {0}")]
    NotAffine(String),
    #[error("affine decomposition over F2 needs modulus 2, got {0}")]
    NotBinary(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] Gf2Error),
}

/// The two bijective symmetric rules on three inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `x + y + z` (ECA rule 150).
    Parity,
    /// `1 + x + y + z` (ECA rule 105).
    ParityPlusOne,
}

impl Rule {
    /// Evaluates the rule over `Z/mZ`.
    pub fn eval(self, a: u32, b: u32, c: u32, modulus: u32) -> u32 {
        let m = modulus as u64;
        let s = a as u64 + b as u64 + c as u64 + u64::from(self == Rule::ParityPlusOne);
        (s % m) as u32
    }

    pub fn symbol(self) -> char {
        match self {
            Rule::Parity => 'P',
            Rule::ParityPlusOne => 'Q',
        }
    }

    pub fn from_symbol(c: char) -> Option<Rule> {
        match c {
            'P' | 'p' => Some(Rule::Parity),
            'Q' | 'q' => Some(Rule::ParityPlusOne),
            _ => None,
        }
    }
}

/// One rule per vertex, packed as a bitmask: bit `i` set means vertex `i+1`
/// uses [`Rule::ParityPlusOne`]. Text form is one letter per vertex, `P` or
/// `Q`, vertex 1 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleVector {
    n: usize,
    mask: u64,
}

impl RuleVector {
    pub fn new(n: usize, mask: u64) -> Result<Self, SdsError> {
        if !(3..=MAX_N).contains(&n) {
            return Err(SdsError::InvalidSize(n));
        }
        let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(RuleVector { n, mask: mask & keep })
    }

    pub fn uniform(n: usize, rule: Rule) -> Result<Self, SdsError> {
        RuleVector::new(n, if rule == Rule::Parity { 0 } else { u64::MAX })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Rule at a 0-based vertex.
    pub fn rule(&self, i: usize) -> Rule {
        if (self.mask >> i) & 1 == 1 {
            Rule::ParityPlusOne
        } else {
            Rule::Parity
        }
    }

    pub fn is_uniform(&self, rule: Rule) -> bool {
        (0..self.n).all(|i| self.rule(i) == rule)
    }
}

impl fmt::Display for RuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.rule(i).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for RuleVector {
    type Err = SdsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut mask = 0u64;
        let mut n = 0;
        for (i, c) in s.trim().chars().enumerate() {
            let rule = Rule::from_symbol(c)
                .ok_or_else(|| SdsError::Parse(format!("bad rule symbol {c:?} in {s:?}")))?;
            if i >= MAX_N {
                return Err(SdsError::InvalidSize(i + 1));
            }
            if rule == Rule::ParityPlusOne {
                mask |= 1 << i;
            }
            n = i + 1;
        }
        RuleVector::new(n, mask)
    }
}

/// An update order `pi_1 ... pi_n`, applied left to right (`pi_1` first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateOrder(Vec<usize>);

impl UpdateOrder {
    pub fn identity(n: usize) -> Self {
        UpdateOrder((0..n).collect())
    }

    /// From 1-based vertex labels.
    pub fn from_one_based(labels: &[usize]) -> Result<Self, SdsError> {
        let n = labels.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &v in labels {
            if v == 0 || v > n || seen[v - 1] {
                return Err(SdsError::InvalidOrder(n));
            }
            seen[v - 1] = true;
            out.push(v - 1);
        }
        Ok(UpdateOrder(out))
    }

    /// From 0-based vertex indices.
    pub fn from_zero_based(order: Vec<usize>) -> Result<Self, SdsError> {
        let labels: Vec<usize> = order.iter().map(|v| v + 1).collect();
        UpdateOrder::from_one_based(&labels)
    }

    /// 0-based vertex indices in application order.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Parses `id` (needs `n`), a digit word like `2143` (n <= 9), or a
    /// comma-separated list like `2,1,4,3`.
    pub fn parse(text: &str, n: usize) -> Result<Self, SdsError> {
        let t = text.trim();
        if t == "id" {
            return Ok(UpdateOrder::identity(n));
        }
        let labels: Vec<usize> = if t.contains(',') {
            t.split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| SdsError::Parse(format!("bad update order {text:?}")))?
        } else {
            t.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| SdsError::Parse(format!("bad update order {text:?}")))?
        };
        if labels.len() != n {
            return Err(SdsError::InvalidOrder(n));
        }
        UpdateOrder::from_one_based(&labels)
    }
}

impl fmt::Display for UpdateOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let labels: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        if self.0.len() <= 9 {
            f.write_str(&labels.concat())
        } else {
            f.write_str(&labels.join(","))
        }
    }
}

/// A system state over `Z/mZ`, stored as its canonical integer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct State {
    n: usize,
    modulus: u32,
    code: u64,
}

impl State {
    pub fn from_code(code: u64, n: usize, modulus: u32) -> Result<Self, SdsError> {
        let count = state_count(n, modulus)?;
        if code as u128 >= count {
            return Err(SdsError::StateMismatch(format!(
                "code {code} out of range for {modulus}^{n}"
            )));
        }
        Ok(State { n, modulus, code })
    }

    pub fn zero(n: usize, modulus: u32) -> Result<Self, SdsError> {
        State::from_code(0, n, modulus)
    }

    /// From vertex values `q_1, ..., q_n`.
    pub fn from_entries(entries: &[u32], modulus: u32) -> Result<Self, SdsError> {
        let n = entries.len();
        state_count(n, modulus)?;
        let mut code = 0u64;
        for &q in entries.iter().rev() {
            if q >= modulus {
                return Err(SdsError::StateMismatch(format!(
                    "entry {q} not below modulus {modulus}"
                )));
            }
            code = code * modulus as u64 + q as u64;
        }
        Ok(State { n, modulus, code })
    }

    pub fn from_f2vec(v: &F2Vec) -> Result<Self, SdsError> {
        let code = v
            .to_code()
            .ok_or_else(|| SdsError::StateMismatch("vector longer than 64".into()))?;
        State::from_code(code, v.len(), 2)
    }

    pub fn to_f2vec(&self) -> Result<F2Vec, SdsError> {
        if self.modulus != 2 {
            return Err(SdsError::NotBinary(self.modulus));
        }
        Ok(F2Vec::from_code(self.code, self.n))
    }

    /// Parses a digit string, vertex 1 leftmost (`"1011"` is `(1,0,1,1)`).
    /// Moduli above 10 use comma-separated values.
    pub fn parse(text: &str, modulus: u32) -> Result<Self, SdsError> {
        let t = text.trim();
        let entries: Vec<u32> = if t.contains(',') {
            t.split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| SdsError::Parse(format!("bad state {text:?}")))?
        } else {
            t.chars()
                .map(|c| c.to_digit(10))
                .collect::<Option<_>>()
                .ok_or_else(|| SdsError::Parse(format!("bad state {text:?}")))?
        };
        if !(3..=MAX_N).contains(&entries.len()) {
            return Err(SdsError::InvalidSize(entries.len()));
        }
        State::from_entries(&entries, modulus)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Value at a 0-based vertex.
    pub fn get(&self, i: usize) -> u32 {
        let m = self.modulus as u64;
        if m == 2 {
            return ((self.code >> i) & 1) as u32;
        }
        ((self.code / m.pow(i as u32)) % m) as u32
    }

    pub fn entries(&self) -> Vec<u32> {
        decode(self.code, self.n, self.modulus)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_code(self.code, self.n, self.modulus))
    }
}

/// Number of states `m^n`, or an error if codes would not fit in `u64`.
pub fn state_count(n: usize, modulus: u32) -> Result<u128, SdsError> {
    if modulus < 2 {
        return Err(SdsError::InvalidModulus(modulus));
    }
    let count = (modulus as u128)
        .checked_pow(n as u32)
        .filter(|&c| c <= 1u128 << 64)
        .ok_or(SdsError::StateSpaceTooLarge { n, modulus })?;
    Ok(count)
}

fn decode(code: u64, n: usize, modulus: u32) -> Vec<u32> {
    let m = modulus as u64;
    let mut c = code;
    (0..n)
        .map(|_| {
            let q = (c % m) as u32;
            c /= m;
            q
        })
        .collect()
}

/// Text form of a state code: digits with vertex 1 leftmost, or
/// comma-separated values for moduli above 10.
pub fn format_code(code: u64, n: usize, modulus: u32) -> String {
    let entries = decode(code, n, modulus);
    if modulus <= 10 {
        entries
            .iter()
            .map(|q| char::from_digit(*q, 10).expect("digit"))
            .collect()
    } else {
        entries
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A sequential dynamical system `[C_n, rules, order]` over `Z/mZ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SdsSpec {
    n: usize,
    rules: RuleVector,
    order: UpdateOrder,
    modulus: u32,
}

impl SdsSpec {
    pub fn new(rules: RuleVector, order: UpdateOrder, modulus: u32) -> Result<Self, SdsError> {
        let n = rules.n();
        if order.len() != n {
            return Err(SdsError::InvalidOrder(n));
        }
        state_count(n, modulus)?;
        Ok(SdsSpec {
            n,
            rules,
            order,
            modulus,
        })
    }

    /// `[C_n, rules, id]` over F2.
    pub fn with_identity_order(rules: RuleVector) -> Self {
        let n = rules.n();
        SdsSpec::new(rules, UpdateOrder::identity(n), 2).expect("valid binary spec")
    }

    /// `L_n = [C_n, parity_3, id]`.
    pub fn parity(n: usize) -> Result<Self, SdsError> {
        Ok(SdsSpec::with_identity_order(RuleVector::uniform(n, Rule::Parity)?))
    }

    /// `[C_n, (1+parity)_3, id]`.
    pub fn parity_plus_one(n: usize) -> Result<Self, SdsError> {
        Ok(SdsSpec::with_identity_order(RuleVector::uniform(
            n,
            Rule::ParityPlusOne,
        )?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &RuleVector {
        &self.rules
    }

    pub fn order(&self) -> &UpdateOrder {
        &self.order
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn with_order(&self, order: UpdateOrder) -> Result<Self, SdsError> {
        SdsSpec::new(self.rules, order, self.modulus)
    }

    pub fn state_count(&self) -> u128 {
        state_count(self.n, self.modulus).expect("validated at construction")
    }

    fn check_state(&self, s: &State) -> Result<(), SdsError> {
        if s.n != self.n || s.modulus != self.modulus {
            return Err(SdsError::StateMismatch(format!(
                "state over {}^{} applied to spec over {}^{}",
                s.modulus, s.n, self.modulus, self.n
            )));
        }
        Ok(())
    }

    /// `F_{v_i}`: recompute vertex `vertex` (1-based) from itself and its two
    /// cycle neighbours; every other coordinate is unchanged.
    pub fn local_update(&self, s: &State, vertex: usize) -> Result<State, SdsError> {
        self.check_state(s)?;
        if vertex == 0 || vertex > self.n {
            return Err(SdsError::VertexOutOfRange { vertex, n: self.n });
        }
        let code = self.local_update_code(s.code, vertex - 1);
        Ok(State { code, ..*s })
    }

    /// Local update on a state code at a 0-based vertex.
    pub fn local_update_code(&self, code: u64, i: usize) -> u64 {
        let n = self.n;
        let left = (i + n - 1) % n;
        let right = (i + 1) % n;
        if self.modulus == 2 {
            let plus = (self.rules.mask >> i) & 1;
            let bit = ((code >> left) ^ (code >> i) ^ (code >> right) ^ plus) & 1;
            (code & !(1 << i)) | (bit << i)
        } else {
            let m = self.modulus as u64;
            let place = m.pow(i as u32);
            let digit = |j: usize| ((code / m.pow(j as u32)) % m) as u32;
            let old = digit(i);
            let new = self.rules.rule(i).eval(digit(left), old, digit(right), self.modulus);
            code - old as u64 * place + new as u64 * place
        }
    }

    /// The SDS map `F = F_{pi_n} o ... o F_{pi_1}`.
    pub fn apply(&self, s: &State) -> Result<State, SdsError> {
        self.check_state(s)?;
        Ok(State {
            code: self.apply_code(s.code),
            ..*s
        })
    }

    /// The SDS map on state codes; the hot loop of every enumeration.
    pub fn apply_code(&self, code: u64) -> u64 {
        let n = self.n;
        if self.modulus == 2 {
            let mut c = code;
            for &i in &self.order.0 {
                let left = (i + n - 1) % n;
                let right = (i + 1) % n;
                let plus = (self.rules.mask >> i) & 1;
                let bit = ((c >> left) ^ (c >> i) ^ (c >> right) ^ plus) & 1;
                c = (c & !(1 << i)) | (bit << i);
            }
            return c;
        }
        let m = self.modulus as u64;
        let mut digits = [0u32; MAX_N];
        let mut c = code;
        for d in digits.iter_mut().take(n) {
            *d = (c % m) as u32;
            c /= m;
        }
        for &i in &self.order.0 {
            digits[i] = self.rules.rule(i).eval(
                digits[(i + n - 1) % n],
                digits[i],
                digits[(i + 1) % n],
                self.modulus,
            );
        }
        digits[..n]
            .iter()
            .rev()
            .fold(0u64, |acc, &q| acc * m + q as u64)
    }

    /// `F^k` on a state code.
    pub fn iterate_code(&self, code: u64, k: u64) -> u64 {
        (0..k).fold(code, |c, _| self.apply_code(c))
    }
}

impl fmt::Display for SdsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} rules={} order={} m={}",
            self.n, self.rules, self.order, self.modulus
        )
    }
}

impl FromStr for SdsSpec {
    type Err = SdsError;

    /// Parses `n=4 rules=PPPP order=id m=2`. `order` defaults to `id`, `m`
    /// to 2, and `rules` to all-parity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut n = None;
        let mut rules = None;
        let mut order = None;
        let mut modulus = 2u32;
        for tok in s.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| SdsError::Parse(format!("expected key=value, got {tok:?}")))?;
            match key {
                "n" => {
                    n = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| SdsError::Parse(format!("bad n {value:?}")))?,
                    )
                }
                "rules" => rules = Some(value.parse::<RuleVector>()?),
                "order" => order = Some(value.to_string()),
                "m" => {
                    modulus = value
                        .parse()
                        .map_err(|_| SdsError::Parse(format!("bad modulus {value:?}")))?
                }
                other => return Err(SdsError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let rules = match (n, rules) {
            (Some(n), Some(r)) if r.n() != n => {
                return Err(SdsError::RuleLength {
                    expected: n,
                    found: r.n(),
                })
            }
            (_, Some(r)) => r,
            (Some(n), None) => RuleVector::uniform(n, Rule::Parity)?,
            (None, None) => return Err(SdsError::Parse("missing n".into())),
        };
        let n = rules.n();
        let order = match order {
            Some(text) => UpdateOrder::parse(&text, n)?,
            None => UpdateOrder::identity(n),
        };
        SdsSpec::new(rules, order, modulus)
    }
}

/// The matrix `B_n` of `L_n` in the standard basis: rows
/// `y_1 + y_{i+1} + y_n` for `i <= n-2`, then `y_1`, then `y_2`.
pub fn ln_matrix(n: usize) -> Result<MatF2, SdsError> {
    if n < 3 {
        return Err(SdsError::InvalidSize(n));
    }
    let mut m = MatF2::zeros(n, n)?;
    for i in 0..n - 2 {
        m.set(i, 0, true);
        m.set(i, i + 1, true);
        m.set(i, n - 1, true);
    }
    m.set(n - 2, 0, true);
    m.set(n - 1, 1, true);
    Ok(m)
}

/// `T(v) = M v + b` over F2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub matrix: MatF2,
    pub offset: F2Vec,
}

impl AffineForm {
    pub fn apply(&self, v: &F2Vec) -> Result<F2Vec, Gf2Error> {
        Ok(self.matrix.mul_vec(v)?.xor(&self.offset))
    }

    pub fn apply_code(&self, code: u64) -> u64 {
        self.matrix.mul_code(code) ^ self.offset.to_code().expect("n <= 64")
    }
}

/// Recovers `(M, b)` with `F(s) = M s + b` from a binary parity-type spec:
/// `b = F(0)`, column `i` of `M` is `F(e_i) + F(0)`. The result is checked
/// on every state for `n <= 12`, on a fixed pseudo-random probe beyond.
pub fn affine_decomposition(spec: &SdsSpec) -> Result<AffineForm, SdsError> {
    if spec.modulus != 2 {
        return Err(SdsError::NotBinary(spec.modulus));
    }
    let n = spec.n;
    let b = spec.apply_code(0);
    let columns: Vec<F2Vec> = (0..n)
        .map(|i| F2Vec::from_code(spec.apply_code(1 << i) ^ b, n))
        .collect();
    let form = AffineForm {
        matrix: MatF2::from_columns(n, &columns)?,
        offset: F2Vec::from_code(b, n),
    };
    let check = |code: u64| -> Result<(), SdsError> {
        if form.apply_code(code) != spec.apply_code(code) {
            return Err(SdsError::NotAffine(format!(
                "mismatch at state {}",
                format_code(code, n, 2)
            )));
        }
        Ok(())
    };
    if n <= EXHAUSTIVE_VERIFY_N {
        (0..1u64 << n).try_for_each(check)?;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (0..PROBE_STATES).try_for_each(|_| check(rng.gen::<u64>() & mask))?;
    }
    Ok(form)
}

/// `T(v) = M v + b` over `Z/mZ`, entries reduced mod `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModAffineForm {
    pub modulus: u32,
    pub matrix: Vec<Vec<u32>>,
    pub offset: Vec<u32>,
}

impl ModAffineForm {
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let m = self.modulus as u64;
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, &b)| {
                let s: u64 = row.iter().zip(v).map(|(&a, &x)| a as u64 * x as u64).sum();
                ((s + b as u64) % m) as u32
            })
            .collect()
    }
}

/// Affine form of a spec over any `Z/mZ`, verified the same way as
/// [`affine_decomposition`].
pub fn affine_decomposition_mod(spec: &SdsSpec) -> Result<ModAffineForm, SdsError> {
    let n = spec.n;
    let m = spec.modulus;
    let b = decode(spec.apply_code(0), n, m);
    let mut matrix = vec![vec![0u32; n]; n];
    for j in 0..n {
        let unit = (m as u64).pow(j as u32);
        let col = decode(spec.apply_code(unit), n, m);
        for i in 0..n {
            matrix[i][j] = (col[i] + m - b[i]) % m;
        }
    }
    let form = ModAffineForm {
        modulus: m,
        matrix,
        offset: b,
    };
    let total = spec.state_count();
    let check = |code: u64| -> Result<(), SdsError> {
        let got = form.apply(&decode(code, n, m));
        if got != decode(spec.apply_code(code), n, m) {
            return Err(SdsError::NotAffine(format!(
                "mismatch at state {}",
                format_code(code, n, m)
            )));
        }
        Ok(())
    };
    if total <= 1 << 16 {
        (0..total as u64).try_for_each(check)?;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5);
        (0..PROBE_STATES).try_for_each(|_| check(rng.gen_range(0..total) as u64))?;
    }
    Ok(form)
}
