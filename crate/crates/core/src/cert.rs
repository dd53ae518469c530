//! Machine-checkable commutation certificates.
//!
//! A certificate is a list of evaluated squares. Each square records the two
//! routes around a commuting diagram at one input: for a candidate
//! homomorphism `p` and monoid element `m` acting on `x`, the stored pair is
//! `lhs = p(m·x)` and `rhs = m·p(x)`. Squares whose evaluation leaves the
//! verification bound are skipped and counted, never silently dropped.
//!
//! Certificates serialize as arrays of quadruples `[m, x, lhs, rhs]`, so a
//! third party can re-verify by comparing the last two entries of every
//! quadruple.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// One evaluated square `[m, x, lhs, rhs]`; passes iff `lhs == rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertSquare {
    pub label: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl CertSquare {
    pub fn new(
        label: impl Into<String>,
        input: impl Into<String>,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
    ) -> Self {
        CertSquare {
            label: label.into(),
            input: input.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }

    pub fn passes(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl Serialize for CertSquare {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&self.label)?;
        seq.serialize_element(&self.input)?;
        seq.serialize_element(&self.lhs)?;
        seq.serialize_element(&self.rhs)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CertSquare {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct QuadVisitor;
        impl<'de> Visitor<'de> for QuadVisitor {
            type Value = CertSquare;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a quadruple [m, x, lhs, rhs] of strings")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<CertSquare, A::Error> {
                let label = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let input = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let lhs = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(2, &self))?;
                let rhs = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(3, &self))?;
                if seq.next_element::<String>()?.is_some() {
                    return Err(de::Error::invalid_length(5, &self));
                }
                Ok(CertSquare { label, input, lhs, rhs })
            }
        }
        deserializer.deserialize_seq(QuadVisitor)
    }
}

/// An evaluated commutation certificate together with its verification bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Human-readable description of the bound the squares were evaluated at.
    pub bound: String,
    pub squares: Vec<CertSquare>,
    /// Squares that could not be evaluated within the bound.
    pub skipped: usize,
}

impl Certificate {
    pub fn new(bound: impl Into<String>) -> Self {
        Certificate { bound: bound.into(), squares: Vec::new(), skipped: 0 }
    }

    pub fn push(&mut self, square: CertSquare) {
        self.squares.push(square);
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn all_pass(&self) -> bool {
        self.squares.iter().all(CertSquare::passes)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertSquare> {
        self.squares.iter().filter(|s| !s.passes())
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }
}
