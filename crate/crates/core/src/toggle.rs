//! Flexible toggles: involutions on the subsets of a finite set `E` that can
//! change membership of one designated element only.
//!
//! Subsets of `E = {1, ..., size}` are bitmasks with element `e` at bit
//! `e - 1`. For a binary SDS on `C_n` the ground set is the vertex set, and a
//! state code is the subset of vertices in state 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::lcm;
use crate::system::{SdsError, SdsSpec};

/// Largest ground set whose toggles are stored as full lookup tables.
pub const MAX_MATERIALIZED: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToggleError {
    #[error("ground set size must be in 1..={MAX_MATERIALIZED}, got {0}")]
    GroundSetSize(usize),
    #[error("element {element} is not in 1..={size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("subset mask {mask:#x} lies outside a ground set of size {size}")]
    SubsetOutOfRange { mask: u64, size: usize },
    #[error("map is not a flexible toggle at {0}")]
    NotAToggle(usize),
    #[error("word is not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("toggle list must hold exactly one toggle per element (element {0})")]
    ToggleCoverage(usize),
    #[error("toggles need a binary system, got modulus {0}")]
    NotBinary(u32),
    #[error(transparent)]
    System(#[from] SdsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self, ToggleError> {
        if size == 0 || size > MAX_MATERIALIZED {
            return Err(ToggleError::GroundSetSize(size));
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn subset_count(&self) -> u64 {
        1 << self.size
    }

    pub fn full(&self) -> u64 {
        self.subset_count() - 1
    }

    fn check_element(&self, element: usize) -> Result<(), ToggleError> {
        if element == 0 || element > self.size {
            return Err(ToggleError::ElementOutOfRange {
                element,
                size: self.size,
            });
        }
        Ok(())
    }

    fn bit(element: usize) -> u64 {
        1 << (element - 1)
    }
}

fn toggle_conditions_hold(x: u64, fx: u64, ffx: u64, bit: u64) -> bool {
    ffx == x && (x ^ fx) & !bit == 0
}

/// Checks both conditions on every subset: `f(f(X)) = X` and
/// `X Δ f(X) ⊆ {e}`.
pub fn is_flexible_toggle<F>(f: F, element: usize, ground: GroundSet) -> bool
where
    F: Fn(u64) -> u64,
{
    if ground.check_element(element).is_err() {
        return false;
    }
    let bit = GroundSet::bit(element);
    (0..ground.subset_count()).all(|x| {
        let fx = f(x);
        fx <= ground.full() && toggle_conditions_hold(x, fx, f(fx), bit)
    })
}

/// The same check on `samples` random subsets of a ground set of `size <= 63`
/// elements, for sets too large to enumerate. A `true` result is evidence,
/// not proof.
pub fn is_flexible_toggle_sampled<F>(f: F, element: usize, size: usize, samples: usize, seed: u64) -> bool
where
    F: Fn(u64) -> u64,
{
    if size == 0 || size > 63 || element == 0 || element > size {
        return false;
    }
    let full = (1u64 << size) - 1;
    let bit = GroundSet::bit(element);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let x = rng.gen::<u64>() & full;
        let fx = f(x);
        fx <= full && toggle_conditions_hold(x, fx, f(fx), bit)
    })
}

/// A flexible toggle stored as its action on all `2^|E|` subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Toggle {
    element: usize,
    ground: GroundSet,
    table: Vec<u32>,
}

impl Toggle {
    /// Tabulates `f` and rejects it unless it is a flexible toggle at
    /// `element`.
    pub fn from_fn<F>(ground: GroundSet, element: usize, f: F) -> Result<Self, ToggleError>
    where
        F: Fn(u64) -> u64,
    {
        ground.check_element(element)?;
        let table: Vec<u32> = (0..ground.subset_count()).map(|x| f(x) as u32).collect();
        let lookup = |x: u64| table.get(x as usize).map_or(u64::MAX, |&y| y as u64);
        if !is_flexible_toggle(lookup, element, ground) {
            return Err(ToggleError::NotAToggle(element));
        }
        Ok(Toggle {
            element,
            ground,
            table,
        })
    }

    pub fn element(&self) -> usize {
        self.element
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn apply(&self, subset: u64) -> u64 {
        self.table[subset as usize] as u64
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }
}

/// The extension `t̂_e` of the toggle `t_e` on the family `L`: inside `L`,
/// flip membership of `e` when the result is still in `L`; everywhere else,
/// do nothing.
pub fn generalized_toggle(ground: GroundSet, family: &[u64], element: usize) -> Result<Toggle, ToggleError> {
    ground.check_element(element)?;
    let mut member = vec![false; ground.subset_count() as usize];
    for &x in family {
        if x > ground.full() {
            return Err(ToggleError::SubsetOutOfRange {
                mask: x,
                size: ground.size,
            });
        }
        member[x as usize] = true;
    }
    let bit = GroundSet::bit(element);
    Toggle::from_fn(ground, element, |x| {
        let y = x ^ bit;
        if member[x as usize] && member[y as usize] {
            y
        } else {
            x
        }
    })
}

/// The local updates `F_{v_1}, ..., F_{v_n}` of a binary SDS, each a flexible
/// toggle of the vertex set at its vertex.
pub fn sds_toggles(spec: &SdsSpec) -> Result<Vec<Toggle>, ToggleError> {
    if spec.modulus() != 2 {
        return Err(ToggleError::NotBinary(spec.modulus()));
    }
    let ground = GroundSet::new(spec.n())?;
    (1..=spec.n())
        .map(|v| Toggle::from_fn(ground, v, |x| spec.local_update_code(x, v - 1)))
        .collect()
}

/// A self-map of `2^E` as a lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMap {
    table: Vec<u32>,
}

impl SubsetMap {
    pub fn apply(&self, subset: u64) -> u64 {
        self.table[subset as usize] as u64
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }

    /// Least `k >= 1` with `f^k = id`: the lcm of the cycle lengths. `None`
    /// when the map is not a bijection.
    pub fn order(&self) -> Option<u64> {
        if !self.is_bijection() {
            return None;
        }
        let mut visited = vec![false; self.table.len()];
        let mut order = 1;
        for start in 0..self.table.len() {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                x = self.table[x] as usize;
                len += 1;
            }
            order = lcm(order, len);
        }
        Some(order)
    }
}

/// The product of the toggles along `word` (1-based elements), with
/// `word[0]` applied first. `toggles` must hold one toggle per element of a
/// common ground set, in any order.
pub fn coxeter_element(toggles: &[Toggle], word: &[usize]) -> Result<SubsetMap, ToggleError> {
    let ground = toggles
        .first()
        .map(Toggle::ground)
        .ok_or(ToggleError::ToggleCoverage(1))?;
    let size = ground.size;
    let mut by_element: Vec<Option<&Toggle>> = vec![None; size + 1];
    for t in toggles {
        if t.ground != ground || by_element[t.element].replace(t).is_some() {
            return Err(ToggleError::ToggleCoverage(t.element));
        }
    }
    if let Some(e) = (1..=size).find(|&e| by_element[e].is_none()) {
        return Err(ToggleError::ToggleCoverage(e));
    }
    let mut seen = vec![false; size + 1];
    if word.len() != size
        || word
            .iter()
            .any(|&e| e == 0 || e > size || std::mem::replace(&mut seen[e], true))
    {
        return Err(ToggleError::NotAPermutation(size));
    }
    let steps: Vec<&Toggle> = word.iter().map(|&e| by_element[e].expect("checked")).collect();
    let table = (0..ground.subset_count())
        .map(|x| steps.iter().fold(x, |acc, t| t.apply(acc)) as u32)
        .collect();
    Ok(SubsetMap { table })
}
