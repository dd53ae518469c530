//! Monounary algebras: a set with one unary operation.
//!
//! The free algebra over `S` is `S x N` with the successor in the second
//! coordinate, truncated here at a fixed depth; its operation is partial at
//! the truncation boundary and every law is checked where both sides are
//! defined. Morphisms commute with the operation wherever the domain
//! operation is defined.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::Point;

use super::{ConcreteCategory, FreecatError};

/// The instance, carrying the truncation depth of free algebras.
#[derive(Debug, Clone, Copy)]
pub struct MonounaryCat {
    pub depth: u64,
}

impl Default for MonounaryCat {
    fn default() -> Self {
        MonounaryCat { depth: 4 }
    }
}

/// A monounary algebra on an enumerated carrier; `op[i] = None` marks the
/// truncation boundary of an infinite algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoAlgebra {
    pub carrier: Vec<Point>,
    pub op: Vec<Option<usize>>,
}

impl MonoAlgebra {
    pub fn new(carrier: Vec<Point>, op: Vec<Option<usize>>) -> Result<Self, FreecatError> {
        if carrier.is_empty() {
            return Err(FreecatError::EmptyCarrier);
        }
        if carrier.len() != op.len() {
            return Err(FreecatError::PreconditionViolated(
                "carrier and op must have the same length".into(),
            ));
        }
        if op.iter().flatten().any(|&i| i >= carrier.len()) {
            return Err(FreecatError::PreconditionViolated("op index out of range".into()));
        }
        let distinct: BTreeSet<&Point> = carrier.iter().collect();
        if distinct.len() != carrier.len() {
            return Err(FreecatError::PreconditionViolated("duplicate carrier point".into()));
        }
        Ok(MonoAlgebra { carrier, op })
    }

    /// Total algebra from an index map.
    pub fn total(carrier: Vec<Point>, op: Vec<usize>) -> Result<Self, FreecatError> {
        MonoAlgebra::new(carrier, op.into_iter().map(Some).collect())
    }

    /// The truncated successor algebra on `0..depth`.
    pub fn truncated_naturals(depth: u64) -> Self {
        let carrier: Vec<Point> = (0..depth).map(Point::Nat).collect();
        let op = (0..depth)
            .map(|n| (n + 1 < depth).then_some((n + 1) as usize))
            .collect();
        MonoAlgebra { carrier, op }
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.carrier.iter().position(|p| p == x)
    }

    /// `op^n(start)`, while defined.
    fn iterate(&self, start: usize, n: u64) -> Option<usize> {
        let mut cur = start;
        for _ in 0..n {
            cur = self.op[cur]?;
        }
        Some(cur)
    }
}

/// A homomorphism: `h(op x) = op(h x)` wherever the domain operation is
/// defined (which forces the codomain operation to be defined there too).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoMorphism {
    pub dom: MonoAlgebra,
    pub cod: MonoAlgebra,
    pub map: Vec<usize>,
}

impl MonoMorphism {
    pub fn new(
        dom: MonoAlgebra,
        cod: MonoAlgebra,
        map: Vec<usize>,
    ) -> Result<Self, FreecatError> {
        if map.len() != dom.carrier.len() || map.iter().any(|&i| i >= cod.carrier.len()) {
            return Err(FreecatError::PreconditionViolated("map shape mismatch".into()));
        }
        for (i, slot) in dom.op.iter().enumerate() {
            if let Some(j) = slot {
                match cod.op[map[i]] {
                    Some(k) if k == map[*j] => {}
                    _ => {
                        return Err(FreecatError::PreconditionViolated(format!(
                            "map does not commute with the operation at {}",
                            dom.carrier[i]
                        )))
                    }
                }
            }
        }
        Ok(MonoMorphism { dom, cod, map })
    }
}

impl ConcreteCategory for MonounaryCat {
    type Object = MonoAlgebra;
    type Morphism = MonoMorphism;
    type Elem = Point;

    fn name(&self) -> &'static str {
        "monounary"
    }

    fn universe(&self, a: &Self::Object) -> Vec<Point> {
        a.carrier.clone()
    }

    fn apply(&self, f: &Self::Morphism, x: &Point) -> Result<Point, FreecatError> {
        let i = f
            .dom
            .index_of(x)
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
        Ok(f.cod.carrier[f.map[i]].clone())
    }

    fn dom(&self, f: &Self::Morphism) -> Self::Object {
        f.dom.clone()
    }

    fn cod(&self, f: &Self::Morphism) -> Self::Object {
        f.cod.clone()
    }

    fn identity(&self, a: &Self::Object) -> Self::Morphism {
        MonoMorphism {
            dom: a.clone(),
            cod: a.clone(),
            map: (0..a.carrier.len()).collect(),
        }
    }

    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, FreecatError> {
        if f.cod != g.dom {
            return Err(FreecatError::NotComposable("cod != dom".into()));
        }
        let map = f.map.iter().map(|&i| g.map[i]).collect();
        Ok(MonoMorphism { dom: f.dom.clone(), cod: g.cod.clone(), map })
    }

    fn free(&self, basis: &[Point]) -> Result<Self::Object, FreecatError> {
        if basis.is_empty() {
            return Err(FreecatError::EmptyCarrier);
        }
        // carrier <s, n> column by column; op is the successor in n
        let mut carrier = Vec::with_capacity(basis.len() * self.depth as usize);
        let mut op = Vec::with_capacity(carrier.capacity());
        for (b, s) in basis.iter().enumerate() {
            for n in 0..self.depth {
                carrier.push(Point::indexed(s.clone(), n));
                op.push(
                    (n + 1 < self.depth)
                        .then(|| b * self.depth as usize + (n as usize) + 1),
                );
            }
        }
        MonoAlgebra::new(carrier, op)
    }

    fn unit(&self, _basis: &[Point], x: &Point) -> Result<Point, FreecatError> {
        Ok(Point::indexed(x.clone(), 0))
    }

    fn extend(
        &self,
        basis: &[Point],
        a: &Self::Object,
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError> {
        let dom = self.free(basis)?;
        let mut map = Vec::with_capacity(dom.carrier.len());
        for p in &dom.carrier {
            let Point::Indexed(s, n) = p else { unreachable!("free carrier") };
            let fs = f
                .get(s)
                .ok_or_else(|| FreecatError::MapUndefined(s.to_string()))?;
            let start = a
                .index_of(fs)
                .ok_or_else(|| FreecatError::ValueNotInUniverse(fs.to_string()))?;
            let target = a.iterate(start, *n).ok_or_else(|| {
                FreecatError::BoundExceeded(format!(
                    "iterate {fs} {n} times leaves the truncated algebra"
                ))
            })?;
            map.push(target);
        }
        MonoMorphism::new(dom, a.clone(), map)
    }

    fn free_map(
        &self,
        dom_basis: &[Point],
        cod_basis: &[Point],
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError> {
        let dom = self.free(dom_basis)?;
        let cod = self.free(cod_basis)?;
        let mut map = Vec::with_capacity(dom.carrier.len());
        for p in &dom.carrier {
            let Point::Indexed(s, n) = p else { unreachable!() };
            let fs = f
                .get(s)
                .ok_or_else(|| FreecatError::MapUndefined(s.to_string()))?;
            let b = cod_basis
                .iter()
                .position(|c| c == fs)
                .ok_or_else(|| FreecatError::ValueNotInUniverse(fs.to_string()))?;
            map.push(b * self.depth as usize + *n as usize);
        }
        MonoMorphism::new(dom, cod, map)
    }

    fn small_objects(&self, size_bound: usize) -> Vec<Self::Object> {
        let mut out = Vec::new();
        // exhaustive total operations on carriers of size <= 3
        for n in 1..=size_bound.min(3) {
            let carrier: Vec<Point> = (0..n).map(|i| Point::label(format!("p{i}"))).collect();
            for idx in 0..n.pow(n as u32) {
                let mut rem = idx;
                let mut op = Vec::with_capacity(n);
                for _ in 0..n {
                    op.push(rem % n);
                    rem /= n;
                }
                out.push(MonoAlgebra::total(carrier.clone(), op).expect("valid op"));
            }
        }
        // a curated spread of size-4 algebras
        if size_bound >= 4 {
            let carrier: Vec<Point> = (0..4).map(|i| Point::label(format!("p{i}"))).collect();
            for op in [
                vec![1, 2, 3, 0], // 4-cycle
                vec![1, 2, 3, 3], // chain into a loop
                vec![1, 0, 3, 2], // two 2-cycles
                vec![0, 1, 2, 3], // identity
                vec![0, 0, 0, 0], // constant
                vec![1, 2, 2, 2], // broom
            ] {
                out.push(MonoAlgebra::total(carrier.clone(), op).expect("valid op"));
            }
        }
        out
    }

    fn morphisms(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        budget: usize,
    ) -> Vec<Self::Morphism> {
        let n = b.carrier.len();
        let k = a.carrier.len();
        let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
        let mut out = Vec::new();
        // scan the full assignment space (small here), keep the commuting ones
        for idx in 0..total.min(1 << 20) {
            if out.len() == budget {
                break;
            }
            let mut rem = idx;
            let mut map = Vec::with_capacity(k);
            for _ in 0..k {
                map.push(rem % n);
                rem /= n;
            }
            if let Ok(m) = MonoMorphism::new(a.clone(), b.clone(), map) {
                out.push(m);
            }
        }
        out
    }

    fn is_surjective(&self, f: &Self::Morphism) -> bool {
        let image: BTreeSet<usize> = f.map.iter().copied().collect();
        image.len() == f.cod.carrier.len()
    }

    fn right_inverse(&self, f: &Self::Morphism, budget: usize) -> Option<Self::Morphism> {
        if !self.is_surjective(f) {
            return None;
        }
        let id = self.identity(&f.cod);
        self.morphisms(&f.cod, &f.dom, budget)
            .into_iter()
            .find(|s| self.compose(f, s).map(|c| c == id).unwrap_or(false))
    }
}
