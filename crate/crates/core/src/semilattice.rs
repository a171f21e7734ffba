//! Finite meet-semilattices of idempotents: validation, the derived
//! order, atoms, filters and ultrafilters, covers, and tight characters.
//!
//! In a finite semilattice every filter (non-empty, upward-closed,
//! downward directed subset) has a minimum and is therefore principal,
//! and the ultrafilters are the principal filters at atoms. The finite
//! tight spectrum is the set of ultrafilter characters. When the
//! semilattice has a zero, the degenerate character that is 1
//! everywhere (support = all of E) is excluded: characters are required
//! to vanish at 0.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSemilattice {
    n: usize,
    meet: Vec<usize>,
    zero: Option<usize>,
    labels: Vec<String>,
}

/// A principal filter ↑min in a finite semilattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    pub carrier: Vec<usize>,
    pub min: usize,
    pub ultra: bool,
}

/// A multiplicative {0,1}-character, stored by its support filter.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    values: Vec<bool>,
    pub filter: Filter,
}

impl Character {
    pub fn value(&self, e: usize) -> bool {
        self.values[e]
    }
}

pub const DEFAULT_FILTER_BOUND: usize = 20;

impl FiniteSemilattice {
    /// Validate a meet table: associativity, commutativity, idempotency,
    /// and absorption by the declared zero if present.
    pub fn validate(table: Vec<Vec<usize>>, zero: Option<usize>) -> Result<Self> {
        let n = table.len();
        if table.iter().any(|row| row.len() != n) {
            return Err(Error::Domain("meet table is not square".into()));
        }
        if table
            .iter()
            .any(|row| row.iter().any(|&v| v >= n))
        {
            return Err(Error::Domain("meet table entry out of range".into()));
        }
        let meet: Vec<usize> = table.into_iter().flatten().collect();
        let m = |a: usize, b: usize| meet[a * n + b];
        for e in 0..n {
            if m(e, e) != e {
                return Err(Error::Axiom(format!("idempotency fails at element {}", e)));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if m(a, b) != m(b, a) {
                    return Err(Error::Axiom(format!(
                        "commutativity fails at pair ({}, {})",
                        a, b
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::Axiom(format!(
                            "associativity fails at triple ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        if let Some(z) = zero {
            if z >= n {
                return Err(Error::Domain("zero index out of range".into()));
            }
            for e in 0..n {
                if m(z, e) != z {
                    return Err(Error::Axiom(format!(
                        "declared zero does not absorb element {}",
                        e
                    )));
                }
            }
        }
        let labels = (0..n).map(|i| format!("e{}", i)).collect();
        Ok(FiniteSemilattice {
            n,
            meet,
            zero,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    /// e ≤ f iff e ∧ f = e.
    pub fn leq(&self, e: usize, f: usize) -> bool {
        self.meet(e, f) == e
    }

    pub fn is_zero(&self, e: usize) -> bool {
        self.zero == Some(e)
    }

    /// Minimal nonzero elements.
    pub fn atoms(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&a| {
                !self.is_zero(a)
                    && (0..self.n)
                        .all(|z| self.is_zero(z) || !(self.leq(z, a) && z != a))
            })
            .collect()
    }

    /// Atoms below e.
    pub fn atoms_below(&self, e: usize) -> Vec<usize> {
        self.atoms().into_iter().filter(|&a| self.leq(a, e)).collect()
    }

    fn principal_filter(&self, z: usize) -> Filter {
        let carrier: Vec<usize> = (0..self.n).filter(|&e| self.leq(z, e)).collect();
        let ultra = self.atoms().contains(&z);
        Filter {
            carrier,
            min: z,
            ultra,
        }
    }

    /// All proper filters, with ultrafilter flags; one per nonzero element.
    pub fn enumerate_filters(&self) -> Result<Vec<Filter>> {
        self.enumerate_filters_bounded(DEFAULT_FILTER_BOUND)
    }

    pub fn enumerate_filters_bounded(&self, bound: usize) -> Result<Vec<Filter>> {
        if self.n > bound {
            return Err(Error::BoundExceeded(format!(
                "semilattice has {} elements, bound is {}",
                self.n, bound
            )));
        }
        Ok((0..self.n)
            .filter(|&z| !self.is_zero(z))
            .map(|z| self.principal_filter(z))
            .collect())
    }

    pub fn character_of(&self, filter: &Filter) -> Character {
        let mut values = vec![false; self.n];
        for &e in &filter.carrier {
            values[e] = true;
        }
        Character {
            values,
            filter: filter.clone(),
        }
    }

    /// Characters supported on filters; bijective with proper filters.
    pub fn characters(&self) -> Result<Vec<Character>> {
        self.characters_bounded(DEFAULT_FILTER_BOUND)
    }

    pub fn characters_bounded(&self, bound: usize) -> Result<Vec<Character>> {
        Ok(self
            .enumerate_filters_bounded(bound)?
            .iter()
            .map(|f| self.character_of(f))
            .collect())
    }

    /// Tight characters: finite case, the ultrafilter characters.
    pub fn tight_characters(&self) -> Result<Vec<Character>> {
        self.tight_characters_bounded(DEFAULT_FILTER_BOUND)
    }

    pub fn tight_characters_bounded(&self, bound: usize) -> Result<Vec<Character>> {
        Ok(self
            .enumerate_filters_bounded(bound)?
            .into_iter()
            .filter(|f| f.ultra)
            .map(|f| self.character_of(&f))
            .collect())
    }

    /// Cover test by atom reduction: F ⊆ eE covers e iff every atom
    /// a ≤ e meets some f ∈ F.
    pub fn is_cover(&self, e: usize, family: &[usize]) -> Result<bool> {
        for &f in family {
            if !self.leq(f, e) {
                return Err(Error::Domain(format!(
                    "{} is not below {}",
                    self.label(f),
                    self.label(e)
                )));
            }
        }
        Ok(self.atoms_below(e).iter().all(|&a| {
            family
                .iter()
                .any(|&f| !self.is_zero_elem(self.meet(a, f)))
        }))
    }

    /// Literal cover definition quantifying over all nonzero z ≤ e; the
    /// oracle that the atom reduction is checked against.
    pub fn is_cover_literal(&self, e: usize, family: &[usize]) -> Result<bool> {
        for &f in family {
            if !self.leq(f, e) {
                return Err(Error::Domain(format!(
                    "{} is not below {}",
                    self.label(f),
                    self.label(e)
                )));
            }
        }
        Ok((0..self.n)
            .filter(|&z| !self.is_zero_elem(z) && self.leq(z, e))
            .all(|z| {
                family
                    .iter()
                    .any(|&f| !self.is_zero_elem(self.meet(z, f)))
            }))
    }

    fn is_zero_elem(&self, e: usize) -> bool {
        self.zero == Some(e)
    }

    /// A character is tight when it is cover-to-join: φ(e) = 1 and F a
    /// cover of e imply φ(f) = 1 for some f ∈ F. Checked exhaustively
    /// over all covers (exponential; small E only).
    pub fn character_is_tight(&self, ch: &Character) -> Result<bool> {
        if let Some(z) = self.zero {
            if ch.value(z) {
                return Ok(false);
            }
        }
        for e in 0..self.n {
            if !ch.value(e) {
                continue;
            }
            let below: Vec<usize> = (0..self.n)
                .filter(|&f| self.leq(f, e) && !self.is_zero_elem(f))
                .collect();
            for mask in 0u32..(1 << below.len()) {
                let family: Vec<usize> = below
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &f)| f)
                    .collect();
                if self.is_cover(e, &family)? && !family.iter().any(|&f| ch.value(f)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Convenience constructors used across the fixtures.
pub mod examples {
    use super::*;

    /// Chain 0 < e < f (indices 0, 1, 2).
    pub fn chain3() -> FiniteSemilattice {
        let table = vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]];
        FiniteSemilattice::validate(table, Some(0)).unwrap()
    }

    /// Diamond {0, a, b, 1} with a ∧ b = 0 (indices 0, 1, 2, 3).
    pub fn diamond() -> FiniteSemilattice {
        let table = vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 0, 1],
            vec![0, 0, 2, 2],
            vec![0, 1, 2, 3],
        ];
        FiniteSemilattice::validate(table, Some(0)).unwrap()
    }
}
