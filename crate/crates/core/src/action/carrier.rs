//! Set carriers: the nonempty sets that monoid actions live on.
//!
//! Carriers are finite label sets, the naturals, or pair carriers `M x S`.
//! Enumeration under a bound is deterministic; growing `max_elements` only
//! ever extends the enumeration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::monoid::{EnumerationBound, Monoid, MonoidElement};

use super::ActionError;

/// A point of a carrier. Pair points `<a, s>` carry a monoid element in the
/// first coordinate; indexed points `s@n` are the column points of free
/// monounary algebras.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Label(String),
    Nat(u64),
    Pair(MonoidElement, Box<Point>),
    Indexed(Box<Point>, u64),
}

impl Point {
    pub fn label(s: impl Into<String>) -> Self {
        Point::Label(s.into())
    }

    pub fn pair(a: MonoidElement, s: Point) -> Self {
        Point::Pair(a, Box::new(s))
    }

    pub fn indexed(s: Point, n: u64) -> Self {
        Point::Indexed(Box::new(s), n)
    }

    /// Parse the display form back into a point. Pair coordinates need the
    /// acting monoid to disambiguate element syntax.
    pub fn parse_in(monoid: &Monoid, s: &str) -> Result<Point, ActionError> {
        let bad = || ActionError::UnparsablePoint(s.to_string());
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            // split at the top-level comma
            let mut depth = 0usize;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        let a = monoid
                            .parse_element(inner[..i].trim())
                            .map_err(|_| bad())?;
                        let p = Point::parse_in(monoid, inner[i + 1..].trim())?;
                        return Ok(Point::pair(a, p));
                    }
                    _ => {}
                }
            }
            return Err(bad());
        }
        if let Some((base, idx)) = s.rsplit_once('@') {
            let n: u64 = idx.parse().map_err(|_| bad())?;
            return Ok(Point::indexed(Point::parse_in(monoid, base)?, n));
        }
        if s.is_empty() || s.contains(['(', ')', ',']) {
            return Err(bad());
        }
        if s.chars().all(|c| c.is_ascii_digit()) {
            return Ok(Point::Nat(s.parse().map_err(|_| bad())?));
        }
        Ok(Point::Label(s.to_string()))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Label(s) => write!(f, "{s}"),
            Point::Nat(n) => write!(f, "{n}"),
            Point::Pair(a, s) => write!(f, "({a},{s})"),
            Point::Indexed(s, n) => write!(f, "{s}@{n}"),
        }
    }
}

/// A nonempty set carrier, enumerable up to a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetCarrier {
    Finite { labels: Vec<String> },
    NatIndexed,
    PairIndexed { monoid: Monoid, base: Box<SetCarrier> },
}

impl SetCarrier {
    pub fn finite(labels: impl IntoIterator<Item = impl Into<String>>) -> Result<Self, ActionError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let c = SetCarrier::Finite { labels };
        c.validate()?;
        Ok(c)
    }

    pub fn pair(monoid: Monoid, base: SetCarrier) -> Self {
        SetCarrier::PairIndexed { monoid, base: Box::new(base) }
    }

    pub fn validate(&self) -> Result<(), ActionError> {
        match self {
            SetCarrier::Finite { labels } => {
                if labels.is_empty() {
                    return Err(ActionError::EmptyCarrier);
                }
                let mut seen = std::collections::BTreeSet::new();
                for l in labels {
                    if !seen.insert(l) {
                        return Err(ActionError::DuplicateLabel(l.clone()));
                    }
                }
                Ok(())
            }
            SetCarrier::NatIndexed => Ok(()),
            SetCarrier::PairIndexed { monoid, base } => {
                monoid.validate().map_err(ActionError::Monoid)?;
                base.validate()
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SetCarrier::Finite { .. } => true,
            SetCarrier::NatIndexed => false,
            SetCarrier::PairIndexed { monoid, base } => {
                monoid.order().is_some() && base.is_finite()
            }
        }
    }

    /// Deterministic enumeration. Finite carriers list every label; the
    /// naturals list an initial segment; pair carriers interleave the two
    /// coordinate enumerations diagonally and stay prefix-monotone when only
    /// `max_elements` grows.
    pub fn enumerate(&self, bound: &EnumerationBound) -> Vec<Point> {
        match self {
            SetCarrier::Finite { labels } => {
                labels.iter().map(|l| Point::label(l.clone())).collect()
            }
            SetCarrier::NatIndexed => {
                (0..bound.max_elements as u64).map(Point::Nat).collect()
            }
            SetCarrier::PairIndexed { monoid, base } => {
                let ms = monoid.enumerate(bound);
                let ss = base.enumerate(bound);
                let mut out = Vec::new();
                // Cantor-style diagonal: by i + j, then i.
                for diag in 0..ms.len() + ss.len() {
                    for (i, m) in ms.iter().enumerate().take(diag + 1) {
                        let j = diag - i;
                        if j < ss.len() {
                            out.push(Point::pair(m.clone(), ss[j].clone()));
                            if out.len() >= bound.max_elements {
                                return out;
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        match (self, p) {
            (SetCarrier::Finite { labels }, Point::Label(l)) => labels.contains(l),
            (SetCarrier::NatIndexed, Point::Nat(_)) => true,
            (SetCarrier::PairIndexed { monoid, base }, Point::Pair(a, s)) => {
                monoid.contains(a) && base.contains_point(s)
            }
            _ => false,
        }
    }
}

/// A function between carriers, stored pointwise on an enumerated domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SetFun {
    map: BTreeMap<Point, Point>,
}

impl SetFun {
    pub fn new() -> Self {
        SetFun { map: BTreeMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, Point)>) -> Self {
        SetFun { map: pairs.into_iter().collect() }
    }

    pub fn tabulate(domain: &[Point], f: impl Fn(&Point) -> Point) -> Self {
        SetFun {
            map: domain.iter().map(|p| (p.clone(), f(p))).collect(),
        }
    }

    pub fn identity(domain: &[Point]) -> Self {
        Self::tabulate(domain, Clone::clone)
    }

    pub fn insert(&mut self, from: Point, to: Point) {
        self.map.insert(from, to);
    }

    pub fn apply(&self, p: &Point) -> Result<&Point, ActionError> {
        self.map
            .get(p)
            .ok_or_else(|| ActionError::PointNotInCarrier(p.to_string()))
    }

    pub fn get(&self, p: &Point) -> Option<&Point> {
        self.map.get(p)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Point> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `self` after `other`: `(self . other)(x) = self(other(x))`, defined
    /// where both lookups succeed.
    pub fn compose(&self, other: &SetFun) -> SetFun {
        let mut out = SetFun::new();
        for (x, y) in &other.map {
            if let Some(z) = self.map.get(y) {
                out.insert(x.clone(), z.clone());
            }
        }
        out
    }

    pub fn is_surjective_onto(&self, codomain: &[Point]) -> bool {
        let image: std::collections::BTreeSet<&Point> = self.map.values().collect();
        codomain.iter().all(|p| image.contains(p))
    }
}
