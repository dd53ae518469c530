//! The category of nonempty finite sets with arbitrary mappings.
//!
//! The free functor is the identity, the unit is the identity, and nice
//! epimorphisms default to surjections (which coincide with the
//! right-invertible maps here).

use std::collections::{BTreeMap, BTreeSet};

use crate::action::Point;

use super::{ConcreteCategory, FreecatError};

#[derive(Debug, Clone, Copy, Default)]
pub struct EnsCat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsObject {
    pub points: Vec<Point>,
}

impl EnsObject {
    pub fn new(points: Vec<Point>) -> Result<Self, FreecatError> {
        if points.is_empty() {
            return Err(FreecatError::EmptyCarrier);
        }
        let distinct: BTreeSet<&Point> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(FreecatError::PreconditionViolated("duplicate points".into()));
        }
        Ok(EnsObject { points })
    }

    fn index_of(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsMorphism {
    pub dom: EnsObject,
    pub cod: EnsObject,
    pub map: BTreeMap<Point, Point>,
}

impl ConcreteCategory for EnsCat {
    type Object = EnsObject;
    type Morphism = EnsMorphism;
    type Elem = Point;

    fn name(&self) -> &'static str {
        "ens"
    }

    fn universe(&self, a: &Self::Object) -> Vec<Point> {
        a.points.clone()
    }

    fn apply(&self, f: &Self::Morphism, x: &Point) -> Result<Point, FreecatError> {
        f.map
            .get(x)
            .cloned()
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))
    }

    fn dom(&self, f: &Self::Morphism) -> Self::Object {
        f.dom.clone()
    }

    fn cod(&self, f: &Self::Morphism) -> Self::Object {
        f.cod.clone()
    }

    fn identity(&self, a: &Self::Object) -> Self::Morphism {
        EnsMorphism {
            dom: a.clone(),
            cod: a.clone(),
            map: a.points.iter().map(|p| (p.clone(), p.clone())).collect(),
        }
    }

    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, FreecatError> {
        if f.cod != g.dom {
            return Err(FreecatError::NotComposable(format!(
                "cod {:?} != dom {:?}",
                f.cod, g.dom
            )));
        }
        let mut map = BTreeMap::new();
        for (x, y) in &f.map {
            map.insert(x.clone(), self.apply(g, y)?);
        }
        Ok(EnsMorphism { dom: f.dom.clone(), cod: g.cod.clone(), map })
    }

    fn free(&self, basis: &[Point]) -> Result<Self::Object, FreecatError> {
        EnsObject::new(basis.to_vec())
    }

    fn unit(&self, _basis: &[Point], x: &Point) -> Result<Point, FreecatError> {
        Ok(x.clone())
    }

    fn extend(
        &self,
        basis: &[Point],
        a: &Self::Object,
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError> {
        let dom = EnsObject::new(basis.to_vec())?;
        let mut map = BTreeMap::new();
        for x in basis {
            let v = f
                .get(x)
                .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
            if a.index_of(v).is_none() {
                return Err(FreecatError::ValueNotInUniverse(v.to_string()));
            }
            map.insert(x.clone(), v.clone());
        }
        Ok(EnsMorphism { dom, cod: a.clone(), map })
    }

    fn free_map(
        &self,
        dom_basis: &[Point],
        cod_basis: &[Point],
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError> {
        self.extend(dom_basis, &EnsObject::new(cod_basis.to_vec())?, f)
    }

    fn small_objects(&self, size_bound: usize) -> Vec<Self::Object> {
        (1..=size_bound)
            .map(|n| {
                EnsObject::new((0..n).map(|i| Point::label(format!("p{i}"))).collect())
                    .expect("nonempty distinct labels")
            })
            .collect()
    }

    fn morphisms(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        budget: usize,
    ) -> Vec<Self::Morphism> {
        let n = b.points.len();
        let k = a.points.len();
        let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
        let mut out = Vec::new();
        for idx in 0..total.min(budget) {
            let mut rem = idx;
            let mut map = BTreeMap::new();
            for x in &a.points {
                map.insert(x.clone(), b.points[rem % n].clone());
                rem /= n;
            }
            out.push(EnsMorphism { dom: a.clone(), cod: b.clone(), map });
        }
        out
    }

    fn is_surjective(&self, f: &Self::Morphism) -> bool {
        let image: BTreeSet<&Point> = f.map.values().collect();
        f.cod.points.iter().all(|p| image.contains(p))
    }

    fn right_inverse(&self, f: &Self::Morphism, _budget: usize) -> Option<Self::Morphism> {
        // surjections of sets split: pick the least preimage per point
        if !self.is_surjective(f) {
            return None;
        }
        let mut map = BTreeMap::new();
        for y in &f.cod.points {
            let x = f
                .map
                .iter()
                .filter(|(_, v)| *v == y)
                .map(|(k, _)| k)
                .min()?;
            map.insert(y.clone(), x.clone());
        }
        Some(EnsMorphism { dom: f.cod.clone(), cod: f.dom.clone(), map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::{extend_map, law_compose_left, law_compose_right};

    fn obj(labels: &[&str]) -> EnsObject {
        EnsObject::new(labels.iter().map(|l| Point::label(*l)).collect()).unwrap()
    }

    #[test]
    fn extension_is_the_map_itself() {
        let cat = EnsCat;
        let a = obj(&["u", "v"]);
        let basis = vec![Point::label("x")];
        let f: BTreeMap<Point, Point> = [(Point::label("x"), Point::label("v"))].into();
        let ext = extend_map(&cat, &basis, &a, &f).unwrap();
        assert!(ext.unit_certificate.all_pass());
        assert_eq!(ext.morphism.map, f);
    }

    #[test]
    fn compose_laws_hold_for_sample() {
        let cat = EnsCat;
        let a = obj(&["u", "v"]);
        let x_basis = vec![Point::label("x0"), Point::label("x1")];
        let y_basis = vec![Point::label("y0")];
        let f: BTreeMap<Point, Point> = x_basis
            .iter()
            .map(|x| (x.clone(), Point::label("y0")))
            .collect();
        let g: BTreeMap<Point, Point> = [(Point::label("y0"), Point::label("u"))].into();
        assert!(law_compose_right(&cat, &x_basis, &y_basis, &f, &a, &g).unwrap());

        let f2: BTreeMap<Point, Point> = x_basis
            .iter()
            .map(|x| (x.clone(), Point::label("u")))
            .collect();
        let swap = EnsMorphism {
            dom: a.clone(),
            cod: a.clone(),
            map: [
                (Point::label("u"), Point::label("v")),
                (Point::label("v"), Point::label("u")),
            ]
            .into(),
        };
        assert!(law_compose_left(&cat, &x_basis, &a, &f2, &swap).unwrap());
    }

    #[test]
    fn surjections_are_right_invertible() {
        let cat = EnsCat;
        let a = obj(&["u", "v"]);
        let b = obj(&["w"]);
        let collapse = EnsMorphism {
            dom: a.clone(),
            cod: b.clone(),
            map: [
                (Point::label("u"), Point::label("w")),
                (Point::label("v"), Point::label("w")),
            ]
            .into(),
        };
        let s = cat.right_inverse(&collapse, 8).unwrap();
        let id = cat.compose(&collapse, &s).unwrap();
        assert_eq!(id, cat.identity(&b));
    }
}
