//! Monoids with exact canonical forms.
//!
//! Finite monoids are given by a full multiplication table; countable monoids
//! (naturals, integers, free monoids, free groups) are represented by their
//! canonical element forms and enumerated up to an explicit bound. Every
//! supported kind has a decidable normal form, so handle equality decides
//! element equality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest generator count for word-based kinds; generators print as `a`..`z`.
pub const MAX_GENERATORS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("element {0} does not belong to this monoid")]
    ElementNotInMonoid(String),
    #[error("multiplication table must be square with entries below its size")]
    InvalidTable,
    #[error("identity index {0} is out of range")]
    InvalidIdentity(usize),
    #[error("cyclic monoid modulus must be at least 1")]
    InvalidModulus,
    #[error("word-based monoids support at most {MAX_GENERATORS} generators, got {0}")]
    TooManyGenerators(usize),
    #[error("enumeration bounds must be positive")]
    InvalidBound,
    #[error("cannot parse {0:?} as an element of this monoid")]
    UnparsableElement(String),
}

/// Canonical element handle. Two handles are equal iff the elements are
/// equal in the monoid; word handles are always freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MonoidElement {
    /// Index into a finite table, or a residue of `CyclicZn`.
    Index(usize),
    /// Natural number under addition.
    Nat(u64),
    /// Integer under addition.
    Int(i64),
    /// Word over signed generator letters: `k > 0` is generator `k`,
    /// `-k` its inverse (free groups only). Empty word is the identity.
    Word(Vec<i32>),
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidElement::Index(i) => write!(f, "{i}"),
            MonoidElement::Nat(n) => write!(f, "{n}"),
            MonoidElement::Int(k) => write!(f, "{k}"),
            MonoidElement::Word(w) if w.is_empty() => write!(f, "e"),
            MonoidElement::Word(w) => {
                for &letter in w {
                    let gen = letter.unsigned_abs() as u8 - 1;
                    let ch = if letter > 0 { b'a' + gen } else { b'A' + gen };
                    write!(f, "{}", ch as char)?;
                }
                Ok(())
            }
        }
    }
}

/// Enumeration truncation for countable monoids and carriers.
///
/// Enumerations under a bound are deterministic, duplicate-free, start with
/// the identity, and are prefixes of enumerations under any larger bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBound {
    pub max_elements: usize,
    pub max_word_length: usize,
}

impl EnumerationBound {
    pub fn new(max_elements: usize, max_word_length: usize) -> Result<Self, MonoidError> {
        if max_elements == 0 || max_word_length == 0 {
            return Err(MonoidError::InvalidBound);
        }
        Ok(EnumerationBound { max_elements, max_word_length })
    }

    /// Bound with `max_elements = n` and a word length that never truncates
    /// below it for the single-generator kinds.
    pub fn elements(n: usize) -> Result<Self, MonoidError> {
        EnumerationBound::new(n, n.max(1))
    }
}

impl Default for EnumerationBound {
    fn default() -> Self {
        EnumerationBound { max_elements: 64, max_word_length: 4 }
    }
}

/// A finite or length-truncated countable monoid.
///
/// The JSON form is tagged by `kind`, e.g.
/// `{"kind": "finite_table", "size": 2, "table": [[0,1],[1,0]], "identity": 0}`
/// or `{"kind": "free_group", "generators": 1}`. Deserialized values must be
/// passed through [`Monoid::validate`] before use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Monoid {
    FiniteTable { size: usize, table: Vec<Vec<usize>>, identity: usize },
    NatAdditive,
    IntAdditive,
    CyclicZn { n: u64 },
    FreeMonoid { generators: usize },
    FreeGroup { generators: usize },
}

impl Monoid {
    pub fn finite_table(table: Vec<Vec<usize>>, identity: usize) -> Result<Self, MonoidError> {
        let m = Monoid::FiniteTable { size: table.len(), table, identity };
        m.validate()?;
        Ok(m)
    }

    pub fn cyclic(n: u64) -> Result<Self, MonoidError> {
        let m = Monoid::CyclicZn { n };
        m.validate()?;
        Ok(m)
    }

    pub fn free_monoid(generators: usize) -> Result<Self, MonoidError> {
        let m = Monoid::FreeMonoid { generators };
        m.validate()?;
        Ok(m)
    }

    pub fn free_group(generators: usize) -> Result<Self, MonoidError> {
        let m = Monoid::FreeGroup { generators };
        m.validate()?;
        Ok(m)
    }

    /// The one-element monoid.
    pub fn trivial() -> Self {
        Monoid::CyclicZn { n: 1 }
    }

    /// Structural validation (table shape, identity range, generator caps).
    /// Law violations in a user-supplied table are not errors here; they are
    /// surfaced by [`Monoid::check_axioms`].
    pub fn validate(&self) -> Result<(), MonoidError> {
        match self {
            Monoid::FiniteTable { size, table, identity } => {
                if *size == 0 || table.len() != *size {
                    return Err(MonoidError::InvalidTable);
                }
                for row in table {
                    if row.len() != *size || row.iter().any(|&e| e >= *size) {
                        return Err(MonoidError::InvalidTable);
                    }
                }
                if *identity >= *size {
                    return Err(MonoidError::InvalidIdentity(*identity));
                }
                Ok(())
            }
            Monoid::CyclicZn { n } => {
                if *n == 0 {
                    return Err(MonoidError::InvalidModulus);
                }
                Ok(())
            }
            Monoid::FreeMonoid { generators } | Monoid::FreeGroup { generators } => {
                if *generators > MAX_GENERATORS {
                    return Err(MonoidError::TooManyGenerators(*generators));
                }
                Ok(())
            }
            Monoid::NatAdditive | Monoid::IntAdditive => Ok(()),
        }
    }

    pub fn identity(&self) -> MonoidElement {
        match self {
            Monoid::FiniteTable { identity, .. } => MonoidElement::Index(*identity),
            Monoid::NatAdditive => MonoidElement::Nat(0),
            Monoid::IntAdditive => MonoidElement::Int(0),
            Monoid::CyclicZn { .. } => MonoidElement::Index(0),
            Monoid::FreeMonoid { .. } | Monoid::FreeGroup { .. } => MonoidElement::Word(vec![]),
        }
    }

    /// Whether a handle is a canonical element of this monoid.
    pub fn contains(&self, e: &MonoidElement) -> bool {
        match (self, e) {
            (Monoid::FiniteTable { size, .. }, MonoidElement::Index(i)) => i < size,
            (Monoid::CyclicZn { n }, MonoidElement::Index(i)) => (*i as u64) < *n,
            (Monoid::NatAdditive, MonoidElement::Nat(_)) => true,
            (Monoid::IntAdditive, MonoidElement::Int(_)) => true,
            (Monoid::FreeMonoid { generators }, MonoidElement::Word(w)) => {
                w.iter().all(|&l| l > 0 && (l as usize) <= *generators)
            }
            (Monoid::FreeGroup { generators }, MonoidElement::Word(w)) => {
                w.iter().all(|&l| l != 0 && (l.unsigned_abs() as usize) <= *generators)
                    && is_reduced(w)
            }
            _ => false,
        }
    }

    fn check_member(&self, e: &MonoidElement) -> Result<(), MonoidError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(MonoidError::ElementNotInMonoid(e.to_string()))
        }
    }

    /// Build a word element, reducing eagerly for free groups.
    pub fn word(&self, letters: &[i32]) -> Result<MonoidElement, MonoidError> {
        let e = match self {
            Monoid::FreeMonoid { .. } => MonoidElement::Word(letters.to_vec()),
            Monoid::FreeGroup { .. } => MonoidElement::Word(reduce_word(letters)),
            _ => return Err(MonoidError::UnparsableElement(format!("{letters:?}"))),
        };
        self.check_member(&e)?;
        Ok(e)
    }

    /// Canonical product `a · b`.
    pub fn multiply(
        &self,
        a: &MonoidElement,
        b: &MonoidElement,
    ) -> Result<MonoidElement, MonoidError> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(match (self, a, b) {
            (Monoid::FiniteTable { table, .. }, MonoidElement::Index(i), MonoidElement::Index(j)) => {
                MonoidElement::Index(table[*i][*j])
            }
            (Monoid::CyclicZn { n }, MonoidElement::Index(i), MonoidElement::Index(j)) => {
                MonoidElement::Index((((*i as u64) + (*j as u64)) % *n) as usize)
            }
            (Monoid::NatAdditive, MonoidElement::Nat(x), MonoidElement::Nat(y)) => {
                MonoidElement::Nat(x + y)
            }
            (Monoid::IntAdditive, MonoidElement::Int(x), MonoidElement::Int(y)) => {
                MonoidElement::Int(x + y)
            }
            (Monoid::FreeMonoid { .. }, MonoidElement::Word(u), MonoidElement::Word(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                MonoidElement::Word(w)
            }
            (Monoid::FreeGroup { .. }, MonoidElement::Word(u), MonoidElement::Word(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                MonoidElement::Word(reduce_word(&w))
            }
            _ => unreachable!("membership already checked"),
        })
    }

    /// Deterministic duplicate-free enumeration starting with the identity.
    ///
    /// Finite tables enumerate their full carrier regardless of the bound.
    /// Word-based kinds list all reduced words of length `<= max_word_length`
    /// in length-then-lexicographic order, truncated to `max_elements`.
    pub fn enumerate(&self, bound: &EnumerationBound) -> Vec<MonoidElement> {
        match self {
            Monoid::FiniteTable { size, identity, .. } => {
                let mut out = vec![MonoidElement::Index(*identity)];
                out.extend((0..*size).filter(|i| i != identity).map(MonoidElement::Index));
                out
            }
            Monoid::CyclicZn { n } => (0..*n)
                .take(bound.max_elements)
                .map(|i| MonoidElement::Index(i as usize))
                .collect(),
            Monoid::NatAdditive => {
                (0..bound.max_elements as u64).map(MonoidElement::Nat).collect()
            }
            Monoid::IntAdditive => {
                // 0, 1, -1, 2, -2, ... mirrors reduced-word order on one generator.
                let mut out = vec![MonoidElement::Int(0)];
                let mut k = 1i64;
                while out.len() < bound.max_elements {
                    out.push(MonoidElement::Int(k));
                    if out.len() < bound.max_elements {
                        out.push(MonoidElement::Int(-k));
                    }
                    k += 1;
                }
                out.truncate(bound.max_elements);
                out
            }
            Monoid::FreeMonoid { generators } => {
                enumerate_words(*generators, false, bound)
            }
            Monoid::FreeGroup { generators } => {
                enumerate_words(*generators, true, bound)
            }
        }
    }

    /// Parse the display form of an element in the context of this monoid.
    pub fn parse_element(&self, s: &str) -> Result<MonoidElement, MonoidError> {
        let bad = || MonoidError::UnparsableElement(s.to_string());
        let e = match self {
            Monoid::FiniteTable { .. } | Monoid::CyclicZn { .. } => {
                MonoidElement::Index(s.parse().map_err(|_| bad())?)
            }
            Monoid::NatAdditive => MonoidElement::Nat(s.parse().map_err(|_| bad())?),
            Monoid::IntAdditive => MonoidElement::Int(s.parse().map_err(|_| bad())?),
            Monoid::FreeMonoid { .. } | Monoid::FreeGroup { .. } => {
                if s == "e" {
                    MonoidElement::Word(vec![])
                } else {
                    let mut letters = Vec::with_capacity(s.len());
                    for ch in s.chars() {
                        let l = match ch {
                            'a'..='z' => (ch as u8 - b'a') as i32 + 1,
                            'A'..='Z' => -((ch as u8 - b'A') as i32 + 1),
                            _ => return Err(bad()),
                        };
                        letters.push(l);
                    }
                    MonoidElement::Word(letters)
                }
            }
        };
        self.check_member(&e)?;
        Ok(e)
    }

    /// Check associativity and the two-sided identity law over all enumerated
    /// triples and elements. Failures are report entries, not errors.
    pub fn check_axioms(&self, bound: &EnumerationBound) -> AxiomReport {
        let elems = self.enumerate(bound);
        let one = self.identity();
        let mut report = AxiomReport {
            complete: self.enumeration_is_complete(&elems),
            elements_checked: elems.len(),
            associativity_failures: Vec::new(),
            identity_failures: Vec::new(),
        };
        for a in &elems {
            let la = self.multiply(&one, a).expect("enumerated element");
            let ra = self.multiply(a, &one).expect("enumerated element");
            if la != *a || ra != *a {
                report.identity_failures.push(a.clone());
            }
        }
        for a in &elems {
            for b in &elems {
                let ab = self.multiply(a, b).expect("enumerated element");
                for c in &elems {
                    let bc = self.multiply(b, c).expect("enumerated element");
                    let left = self.multiply(&ab, c).expect("product is canonical");
                    let right = self.multiply(a, &bc).expect("product is canonical");
                    if left != right {
                        report
                            .associativity_failures
                            .push((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        report
    }

    fn enumeration_is_complete(&self, elems: &[MonoidElement]) -> bool {
        match self {
            Monoid::FiniteTable { .. } => true,
            Monoid::CyclicZn { n } => elems.len() as u64 == *n,
            _ => false,
        }
    }

    /// Total element count, when finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            Monoid::FiniteTable { size, .. } => Some(*size as u64),
            Monoid::CyclicZn { n } => Some(*n),
            Monoid::FreeMonoid { generators } | Monoid::FreeGroup { generators }
                if *generators == 0 =>
            {
                Some(1)
            }
            _ => None,
        }
    }
}

/// Axiom check outcome. `complete` marks an exhaustive check (finite kinds);
/// otherwise the check covers the enumerated truncation only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub complete: bool,
    pub elements_checked: usize,
    pub associativity_failures: Vec<(MonoidElement, MonoidElement, MonoidElement)>,
    pub identity_failures: Vec<MonoidElement>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.associativity_failures.is_empty() && self.identity_failures.is_empty()
    }
}

/// Free reduction: cancel adjacent inverse pairs until none remain.
pub fn reduce_word(letters: &[i32]) -> Vec<i32> {
    let mut stack: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if stack.last().is_some_and(|&top| top == -l) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    stack
}

fn is_reduced(w: &[i32]) -> bool {
    w.windows(2).all(|p| p[0] != -p[1])
}

/// Alphabet rank used for lexicographic word order: a < A < b < B < ...
fn letter_rank(l: i32) -> usize {
    let g = (l.unsigned_abs() as usize - 1) * 2;
    if l > 0 {
        g
    } else {
        g + 1
    }
}

fn enumerate_words(generators: usize, group: bool, bound: &EnumerationBound) -> Vec<MonoidElement> {
    let mut alphabet: Vec<i32> = Vec::new();
    for g in 1..=generators as i32 {
        alphabet.push(g);
        if group {
            alphabet.push(-g);
        }
    }
    alphabet.sort_by_key(|&l| letter_rank(l));
    let mut out = vec![MonoidElement::Word(vec![])];
    let mut layer: Vec<Vec<i32>> = vec![vec![]];
    'outer: for _ in 0..bound.max_word_length {
        let mut next_layer = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if group && w.last().is_some_and(|&top| top == -l) {
                    continue; // extension would cancel, not a reduced word
                }
                let mut nw = w.clone();
                nw.push(l);
                out.push(MonoidElement::Word(nw.clone()));
                next_layer.push(nw);
                if out.len() >= bound.max_elements {
                    out.truncate(bound.max_elements);
                    break 'outer;
                }
            }
        }
        if next_layer.is_empty() {
            break;
        }
        layer = next_layer;
    }
    out.truncate(bound.max_elements);
    out
}
