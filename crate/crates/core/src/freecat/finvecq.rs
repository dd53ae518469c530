//! Rational l1 spaces with nonexpansive linear maps.
//!
//! Objects are `Q^n` under the exact l1 norm; the forgetful functor views an
//! object through its rational unit ball (sampled here by a fixed finite
//! family). The free object over `X` is `Q^X`, the unit picks out the basis
//! vectors, and extension is the linear span of the prescribed values. Nice
//! epimorphisms default to surjective operators, decided by exact rank.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::action::Point;
use crate::linalg::{dense_norm1, Matrix};
use crate::{rat, Rat};

use super::{ConcreteCategory, FreecatError};

#[derive(Debug, Clone, Copy, Default)]
pub struct FinVecQCat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecSpace {
    pub dim: usize,
}

/// A dense rational vector, ordered and printable for certificates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VecElem(pub Vec<Rat>);

impl fmt::Display for VecElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A nonexpansive linear map, stored as its matrix (rows = codomain dim).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinMap {
    pub matrix: Matrix<Rat>,
}

impl LinMap {
    pub fn new(matrix: Matrix<Rat>) -> Result<Self, FreecatError> {
        if matrix.op_norm1() > Rat::one() {
            return Err(FreecatError::PreconditionViolated(format!(
                "operator norm {} exceeds 1",
                matrix.op_norm1()
            )));
        }
        Ok(LinMap { matrix })
    }
}

impl FinVecQCat {
    fn basis_vector(dim: usize, i: usize) -> VecElem {
        let mut v = vec![Rat::zero(); dim];
        v[i] = Rat::one();
        VecElem(v)
    }
}

impl ConcreteCategory for FinVecQCat {
    type Object = VecSpace;
    type Morphism = LinMap;
    type Elem = VecElem;

    fn name(&self) -> &'static str {
        "finvecq"
    }

    /// A deterministic sample of the rational unit ball: zero, signed basis
    /// vectors, their halves, and averaged pairs.
    fn universe(&self, a: &Self::Object) -> Vec<VecElem> {
        let d = a.dim;
        let mut out = vec![VecElem(vec![Rat::zero(); d])];
        for i in 0..d {
            for sign in [1i64, -1] {
                let mut v = vec![Rat::zero(); d];
                v[i] = rat(sign, 1);
                out.push(VecElem(v));
                let mut h = vec![Rat::zero(); d];
                h[i] = rat(sign, 2);
                out.push(VecElem(h));
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for sign in [1i64, -1] {
                    let mut v = vec![Rat::zero(); d];
                    v[i] = rat(1, 2);
                    v[j] = rat(sign, 2);
                    out.push(VecElem(v));
                }
            }
        }
        out
    }

    fn apply(&self, f: &Self::Morphism, x: &VecElem) -> Result<VecElem, FreecatError> {
        if x.0.len() != f.matrix.cols() {
            return Err(FreecatError::ValueNotInUniverse(x.to_string()));
        }
        Ok(VecElem(f.matrix.mul_vec(&x.0)))
    }

    fn dom(&self, f: &Self::Morphism) -> Self::Object {
        VecSpace { dim: f.matrix.cols() }
    }

    fn cod(&self, f: &Self::Morphism) -> Self::Object {
        VecSpace { dim: f.matrix.rows() }
    }

    fn identity(&self, a: &Self::Object) -> Self::Morphism {
        LinMap { matrix: Matrix::identity(a.dim) }
    }

    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, FreecatError> {
        if f.matrix.rows() != g.matrix.cols() {
            return Err(FreecatError::NotComposable("dimension mismatch".into()));
        }
        Ok(LinMap { matrix: g.matrix.mul(&f.matrix) })
    }

    fn free(&self, basis: &[Point]) -> Result<Self::Object, FreecatError> {
        if basis.is_empty() {
            return Err(FreecatError::EmptyCarrier);
        }
        Ok(VecSpace { dim: basis.len() })
    }

    fn unit(&self, basis: &[Point], x: &Point) -> Result<VecElem, FreecatError> {
        let i = basis
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
        Ok(Self::basis_vector(basis.len(), i))
    }

    fn extend(
        &self,
        basis: &[Point],
        a: &Self::Object,
        f: &BTreeMap<Point, VecElem>,
    ) -> Result<Self::Morphism, FreecatError> {
        let mut matrix = Matrix::zeros(a.dim, basis.len());
        for (j, x) in basis.iter().enumerate() {
            let v = f
                .get(x)
                .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
            if v.0.len() != a.dim {
                return Err(FreecatError::ValueNotInUniverse(v.to_string()));
            }
            if dense_norm1(&v.0) > Rat::one() {
                return Err(FreecatError::ValueNotInUniverse(format!(
                    "{v} is outside the unit ball"
                )));
            }
            for (i, c) in v.0.iter().enumerate() {
                matrix.set(i, j, c.clone());
            }
        }
        // columns in the unit ball force a nonexpansive extension
        LinMap::new(matrix)
    }

    fn free_map(
        &self,
        dom_basis: &[Point],
        cod_basis: &[Point],
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError> {
        let mut matrix = Matrix::zeros(cod_basis.len(), dom_basis.len());
        for (j, x) in dom_basis.iter().enumerate() {
            let fx = f
                .get(x)
                .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
            let i = cod_basis
                .iter()
                .position(|p| p == fx)
                .ok_or_else(|| FreecatError::ValueNotInUniverse(fx.to_string()))?;
            matrix.set(i, j, Rat::one());
        }
        LinMap::new(matrix)
    }

    fn small_objects(&self, size_bound: usize) -> Vec<Self::Object> {
        (1..=size_bound.min(3)).map(|dim| VecSpace { dim }).collect()
    }

    /// A curated, deterministic family of nonexpansive maps: structural
    /// maps (identity, permutations, projections, shifts, averages, scaled
    /// diagonals) followed by a grid scan for very small shapes.
    fn morphisms(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        budget: usize,
    ) -> Vec<Self::Morphism> {
        let (cols, rows) = (a.dim, b.dim);
        let mut out: Vec<LinMap> = Vec::new();
        let push = |m: Matrix<Rat>, out: &mut Vec<LinMap>| {
            if out.len() < budget && m.op_norm1() <= Rat::one() {
                let lm = LinMap { matrix: m };
                if !out.contains(&lm) {
                    out.push(lm);
                }
            }
        };
        push(Matrix::zeros(rows, cols), &mut out);
        // coordinate maps e_j -> +/- e_i or 0, enumerated in a fixed order
        if cols * rows <= 4 {
            let choices = 2 * rows + 1; // 0, +e_i, -e_i
            let total = choices.pow(cols as u32);
            for idx in 0..total {
                let mut rem = idx;
                let mut m = Matrix::zeros(rows, cols);
                for j in 0..cols {
                    let c = rem % choices;
                    rem /= choices;
                    if c > 0 {
                        let i = (c - 1) / 2;
                        let sign = if c % 2 == 1 { 1 } else { -1 };
                        m.set(i, j, rat(sign, 1));
                    }
                }
                push(m, &mut out);
            }
        } else {
            // permutation-like maps and sign flips
            for shift in 0..rows {
                for sign in [1i64, -1] {
                    let mut m = Matrix::zeros(rows, cols);
                    for j in 0..cols {
                        m.set((j + shift) % rows, j, rat(sign, 1));
                    }
                    push(m, &mut out);
                }
            }
            // projections: keep a prefix of coordinates
            for keep in 0..=cols.min(rows) {
                let mut m = Matrix::zeros(rows, cols);
                for j in 0..keep {
                    m.set(j, j, Rat::one());
                }
                push(m, &mut out);
            }
        }
        // halved variants of everything found so far
        let halves: Vec<Matrix<Rat>> = out
            .iter()
            .map(|lm| {
                let mut m = lm.matrix.clone();
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let v = m.get(i, j).clone() * rat(1, 2);
                        m.set(i, j, v);
                    }
                }
                m
            })
            .collect();
        for m in halves {
            push(m, &mut out);
        }
        // averaging map when it fits
        if rows >= 1 {
            let mut m = Matrix::zeros(rows, cols);
            for j in 0..cols {
                m.set(0, j, rat(1, cols as i64));
            }
            push(m, &mut out);
        }
        out.truncate(budget);
        out
    }

    fn is_surjective(&self, f: &Self::Morphism) -> bool {
        f.matrix.rank() == f.matrix.rows()
    }

    /// A right inverse found by exact solving; checked for nonexpansiveness.
    /// `None` means "not found at this bound": the particular solution may
    /// be expansive even when some nonexpansive section exists.
    fn right_inverse(&self, f: &Self::Morphism, _budget: usize) -> Option<Self::Morphism> {
        let identity = Matrix::identity(f.matrix.rows());
        let x = f.matrix.solve(&identity)?;
        if x.op_norm1() <= Rat::one() {
            return Some(LinMap { matrix: x });
        }
        None
    }
}
