//! Conley indices as formal wedges of pointed spheres.

use crate::equilibria::{EqClass, Equilibrium};
use serde::{Serialize, Serializer};
use std::fmt;

/// Wedge of spheres, stored as a multiset of dimensions sorted from the
/// highest down. The empty wedge is the trivial index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ConleyIndex {
    dims: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConleyError {
    #[error("equilibrium at {0:?} is not hyperbolic")]
    NonHyperbolic([f64; 2]),
    #[error("cycle multiplier {0} has modulus one")]
    NonHyperbolicCycle(f64),
    #[error("branch count must be nonnegative, got {0}")]
    NegativeCount(i64),
}

impl ConleyIndex {
    pub fn trivial() -> Self {
        ConleyIndex::default()
    }

    pub fn sphere(k: u32) -> Self {
        ConleyIndex { dims: vec![k] }
    }

    pub fn from_dims(dims: impl IntoIterator<Item = u32>) -> Self {
        let mut dims: Vec<u32> = dims.into_iter().collect();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        ConleyIndex { dims }
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn is_trivial(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn wedge(&self, other: &ConleyIndex) -> ConleyIndex {
        ConleyIndex::from_dims(self.dims.iter().chain(&other.dims).copied())
    }

    /// `n` copies of `self` wedged together.
    pub fn times(&self, n: usize) -> ConleyIndex {
        ConleyIndex::from_dims(std::iter::repeat_n(self.dims.iter().copied(), n).flatten())
    }

    /// ASCII form such as `S2vS1`, or `0` for the trivial index.
    pub fn ascii(&self) -> String {
        if self.dims.is_empty() {
            return "0".into();
        }
        self.dims
            .iter()
            .map(|d| format!("S{d}"))
            .collect::<Vec<_>>()
            .join("v")
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for ConleyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return write!(f, "0\u{0304}");
        }
        let parts: Vec<String> = self
            .dims
            .iter()
            .map(|d| format!("Σ{}", superscript(*d)))
            .collect();
        write!(f, "{}", parts.join("∨"))
    }
}

impl Serialize for ConleyIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn wedge(a: &ConleyIndex, b: &ConleyIndex) -> ConleyIndex {
    a.wedge(b)
}

/// `Σ^u` with `u` the unstable dimension.
pub fn index_of_equilibrium(eq: &Equilibrium) -> Result<ConleyIndex, ConleyError> {
    if eq.class == EqClass::NonHyperbolic {
        return Err(ConleyError::NonHyperbolic(eq.point));
    }
    Ok(ConleyIndex::sphere(eq.unstable_dim as u32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleStability {
    Stable,
    Unstable,
}

/// Index of a hyperbolic planar periodic orbit with return-map multiplier
/// `m`.
pub fn index_of_planar_cycle(multiplier: f64) -> Result<ConleyIndex, ConleyError> {
    match cycle_stability(multiplier)? {
        CycleStability::Stable => Ok(ConleyIndex::from_dims([1, 0])),
        CycleStability::Unstable => Ok(ConleyIndex::from_dims([2, 1])),
    }
}

pub fn cycle_stability(multiplier: f64) -> Result<CycleStability, ConleyError> {
    let m = multiplier.abs();
    if !m.is_finite() || (m - 1.0).abs() < 1e-9 {
        return Err(ConleyError::NonHyperbolicCycle(multiplier));
    }
    Ok(if m < 1.0 {
        CycleStability::Stable
    } else {
        CycleStability::Unstable
    })
}

/// Planar index pairs `(N, L)` that appear in the bistability arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexPairTemplate {
    DiskNoExit,
    DiskFullExit,
    AnnulusBothExit,
    AnnulusInnerExit,
    AnnulusNoExit,
    DiskMinusTwoDisksInnerExit,
}

impl IndexPairTemplate {
    pub const ALL: [IndexPairTemplate; 6] = [
        IndexPairTemplate::DiskNoExit,
        IndexPairTemplate::DiskFullExit,
        IndexPairTemplate::AnnulusBothExit,
        IndexPairTemplate::AnnulusInnerExit,
        IndexPairTemplate::AnnulusNoExit,
        IndexPairTemplate::DiskMinusTwoDisksInnerExit,
    ];
}

pub fn index_of_template(t: IndexPairTemplate) -> ConleyIndex {
    use IndexPairTemplate::*;
    match t {
        DiskNoExit => ConleyIndex::sphere(0),
        DiskFullExit => ConleyIndex::sphere(2),
        AnnulusBothExit => ConleyIndex::from_dims([2, 1]),
        AnnulusInnerExit => ConleyIndex::trivial(),
        AnnulusNoExit => ConleyIndex::from_dims([1, 0]),
        DiskMinusTwoDisksInnerExit => ConleyIndex::sphere(1),
    }
}

/// Index of a loop-free component of saddles, repellers and connections
/// entered from outside by `n` stable branches.
pub fn component_index_from_entries(n: i64) -> Result<ConleyIndex, ConleyError> {
    match n {
        n if n < 0 => Err(ConleyError::NegativeCount(n)),
        0 => Ok(ConleyIndex::sphere(2)),
        n => Ok(ConleyIndex::sphere(1).times(n as usize - 1)),
    }
}

/// Same count for a component that carries one loop (an unstable cycle or
/// a closed chain of connections).
pub fn component_index_with_loop(n: i64) -> Result<ConleyIndex, ConleyError> {
    match n {
        n if n < 0 => Err(ConleyError::NegativeCount(n)),
        0 => Ok(ConleyIndex::from_dims([2, 1])),
        n => Ok(ConleyIndex::sphere(1).times(n as usize)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(ConleyIndex::from_dims([1, 2]).to_string(), "Σ²∨Σ¹");
        assert_eq!(ConleyIndex::sphere(0).to_string(), "Σ⁰");
        assert_eq!(ConleyIndex::trivial().to_string(), "0̄");
        assert_eq!(ConleyIndex::from_dims([1, 2]).ascii(), "S2vS1");
        assert_eq!(ConleyIndex::trivial().ascii(), "0");
        assert_eq!(ConleyIndex::sphere(12).to_string(), "Σ¹²");
    }

    #[test]
    fn wedge_examples() {
        let s1 = ConleyIndex::sphere(1);
        assert_eq!(wedge(&s1, &ConleyIndex::trivial()), s1);
        assert_eq!(wedge(&ConleyIndex::sphere(2), &s1).dims(), &[2, 1]);
        assert_eq!(wedge(&s1, &ConleyIndex::sphere(0)).dims(), &[1, 0]);
    }

    #[test]
    fn entry_counts() {
        assert_eq!(component_index_from_entries(2).unwrap(), ConleyIndex::sphere(1));
        assert!(component_index_from_entries(1).unwrap().is_trivial());
        assert_eq!(component_index_from_entries(0).unwrap(), ConleyIndex::sphere(2));
        assert_eq!(component_index_from_entries(4).unwrap().dims(), &[1, 1, 1]);
        assert!(component_index_from_entries(-1).is_err());
        assert_eq!(component_index_with_loop(1).unwrap(), ConleyIndex::sphere(1));
    }

    #[test]
    fn cycles() {
        assert_eq!(index_of_planar_cycle(0.3).unwrap().dims(), &[1, 0]);
        assert_eq!(index_of_planar_cycle(2.5).unwrap().dims(), &[2, 1]);
        assert!(index_of_planar_cycle(1.0).is_err());
    }
}
