//! Exact l1 vectors, basic operators, and the operator lifting pipeline.
//!
//! Everything here is finitely supported and exact: vectors carry rational
//! (or any exact signed) coefficients over a countable basis, basic operators
//! send `e_s` to `e_{phi(s)}`, and targets are nonexpansive rational matrices
//! under the l1 norm, the one finite-dimensional setting where the operator
//! norm is exactly decidable as the maximum column norm. No floating point
//! anywhere.

use std::collections::BTreeMap;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::cert::{CertSquare, Certificate};
use crate::funcgraph::{self, TargetMap};
use crate::linalg::{dense_norm1, Matrix, Scalar, SparseVec};
use crate::rng::SplitMix64;
use crate::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElloneError {
    #[error("basis index {0} is outside the operator domain")]
    IndexOutOfDomain(String),
    #[error("seed vector {0} lies outside the unit ball")]
    NotInUnitBall(String),
    #[error("operator is not non-expansive: column norm {0} exceeds 1")]
    NotNonExpansive(String),
    #[error("target operator matrix must be square")]
    NotSquare,
    #[error("the square does not commute at the set level at {0}")]
    SquareDoesNotCommuteAtSetLevel(String),
    #[error("p is not surjective: {0} has no preimage")]
    NotSurjective(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Graph(#[from] funcgraph::GraphError),
}

/// A self-map of a basis index set, used to induce a basic operator.
pub trait BasisMap<I> {
    fn image(&self, i: &I) -> Result<I, ElloneError>;
}

/// Basis map given by a finite table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap<I: Ord>(pub BTreeMap<I, I>);

impl<I: Ord + Clone + std::fmt::Debug> BasisMap<I> for TableMap<I> {
    fn image(&self, i: &I) -> Result<I, ElloneError> {
        self.0
            .get(i)
            .cloned()
            .ok_or_else(|| ElloneError::IndexOutOfDomain(format!("{i:?}")))
    }
}

/// The fixed pairing of `<m, n>` with a single natural index, for contexts
/// that demand scalar basis indices. All truncations in this module are
/// rectangles `m < d1, n < d2`, stored column by column; this function is
/// the documented bridge between the two views.
pub fn cantor_pair(m: u64, n: u64) -> u64 {
    (m + n) * (m + n + 1) / 2 + n
}

/// The shift `<m,n> -> <m+1,n>` on pairs of naturals; total, so the induced
/// basic operator needs no truncation to act on finitely supported vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NuShift;

impl BasisMap<(u64, u64)> for NuShift {
    fn image(&self, &(m, n): &(u64, u64)) -> Result<(u64, u64), ElloneError> {
        Ok(funcgraph::nu_step(m, n))
    }
}

/// Apply the basic operator `l1(phi)` to a finitely supported vector: the
/// coefficient at `t` is the exact sum over the fiber `phi(s) = t`.
pub fn apply_basic<I, T, M>(phi: &M, v: &SparseVec<I, T>) -> Result<SparseVec<I, T>, ElloneError>
where
    I: Ord + Clone,
    T: Scalar,
    M: BasisMap<I>,
{
    let mut images = Vec::with_capacity(v.support_len());
    for (i, c) in v.iter() {
        images.push((phi.image(i)?, c.clone()));
    }
    Ok(SparseVec::from_entries(images))
}

/// A nonexpansive operator on an l1 space of fixed finite dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetOperator<T: Scalar> {
    pub dim: usize,
    pub matrix: Matrix<T>,
}

/// The concrete rational instantiation used throughout the toolkit.
pub type RationalTarget = TargetOperator<Rat>;

impl<T: Scalar> TargetOperator<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self, ElloneError> {
        if matrix.rows() != matrix.cols() {
            return Err(ElloneError::NotSquare);
        }
        let norm = matrix.op_norm1();
        if norm > T::one() {
            return Err(ElloneError::NotNonExpansive(norm.to_string()));
        }
        Ok(TargetOperator { dim: matrix.rows(), matrix })
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.matrix.mul_vec(v)
    }
}

fn vec_str<T: Scalar>(v: &[T]) -> String {
    let mut s = String::from("(");
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&c.to_string());
    }
    s.push(')');
    s
}

/// The lifting of a target operator from an l1 space over its own invariant
/// vectors: `q(e_s) = s` and `T e_s = e_{f(s)}` on the closure of the seeds.
#[derive(Debug, Clone)]
pub struct TargetLifting<T: Scalar> {
    /// The closed invariant set `S'`, in deterministic discovery order.
    pub basis: Vec<Vec<T>>,
    /// `T e_i = e_{op[i]}`; `None` at the truncation boundary.
    pub operator_on_basis: Vec<Option<usize>>,
    /// `q` as a matrix: columns are the basis vectors.
    pub q_matrix: Matrix<T>,
    pub certificate: Certificate,
    /// Exact rank surjectivity of `q` onto the target space.
    pub surjective: bool,
    /// Every column of `q` has l1 norm at most one.
    pub nonexpansive: bool,
    /// Whether the closure was cut off by the depth bound.
    pub truncated: bool,
}

impl<T: Scalar> TargetLifting<T> {
    /// The set-level self-map on basis indices, for the downstream pipeline.
    pub fn as_target_map(&self) -> TargetMap {
        TargetMap {
            points: self.basis.iter().map(|v| vec_str(v)).collect(),
            image: self.operator_on_basis.clone(),
        }
    }
}

/// Close the seeds under the operator (exactly, up to `depth` applications),
/// then lift: `T e_s = e_{f(s)}`, `q(e_s) = s`, with the commutation
/// `f(q(e_s)) = q(T e_s)` certified on every interior basis vector.
pub fn lift_target_operator<T: Scalar>(
    target: &TargetOperator<T>,
    seeds: &[Vec<T>],
    depth: u64,
) -> Result<TargetLifting<T>, ElloneError> {
    if seeds.is_empty() {
        return Err(ElloneError::Shape("at least one seed point is required".into()));
    }
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut seen: BTreeMap<Vec<T>, usize> = BTreeMap::new();
    let mut generation: Vec<u64> = Vec::new();
    for s in seeds {
        if s.len() != target.dim {
            return Err(ElloneError::Shape(format!(
                "seed has dimension {}, target needs {}",
                s.len(),
                target.dim
            )));
        }
        if dense_norm1(s) > T::one() {
            return Err(ElloneError::NotInUnitBall(vec_str(s)));
        }
        if !seen.contains_key(s) {
            seen.insert(s.clone(), basis.len());
            basis.push(s.clone());
            generation.push(0);
        }
    }
    let mut op: Vec<Option<usize>> = Vec::new();
    let mut truncated = false;
    let mut i = 0;
    while i < basis.len() {
        let image = target.apply(&basis[i]);
        match seen.get(&image) {
            Some(&j) => op.push(Some(j)),
            None if generation[i] < depth => {
                let j = basis.len();
                seen.insert(image.clone(), j);
                generation.push(generation[i] + 1);
                basis.push(image);
                op.push(Some(j));
            }
            None => {
                op.push(None);
                truncated = true;
            }
        }
        i += 1;
    }
    let mut cert = Certificate::new(format!("seeds={}, depth={depth}", seeds.len()));
    for (i, slot) in op.iter().enumerate() {
        match slot {
            Some(j) => {
                // f(q(e_i)) vs q(T e_i) = basis[j]
                let lhs = target.apply(&basis[i]);
                cert.push(CertSquare::new(
                    "f",
                    format!("e[{}]", vec_str(&basis[i])),
                    vec_str(&lhs),
                    vec_str(&basis[*j]),
                ));
            }
            None => cert.skip(),
        }
    }
    let q_matrix = {
        let mut m = Matrix::zeros(target.dim, basis.len());
        for (j, v) in basis.iter().enumerate() {
            for (r, c) in v.iter().enumerate() {
                m.set(r, j, c.clone());
            }
        }
        m
    };
    let surjective = q_matrix.rank() == target.dim;
    let nonexpansive = basis.iter().all(|v| dense_norm1(v) <= T::one());
    Ok(TargetLifting {
        basis,
        operator_on_basis: op,
        q_matrix,
        certificate: cert,
        surjective,
        nonexpansive,
        truncated,
    })
}

/// Certified functorial square: from a set-level surjection `p` with
/// `p . g = f . p`, the induced `l1(p)` intertwines `l1(g)` and `l1(f)` and
/// is a norm-one projection (right-invertible via any section of `p`).
#[derive(Debug, Clone)]
pub struct SquareCertificate {
    pub certificate: Certificate,
    /// Sampled rational combinations checked for commutation and the norm
    /// inequality (with equality on the nonnegative part).
    pub samples_checked: usize,
    pub norm_one: bool,
    /// A section of `p` (minimal preimage per point), giving right
    /// invertibility of `l1(p)`.
    pub section: Vec<usize>,
}

/// Verify `p . g = f . p` at the set level (erroring otherwise), then
/// certify the induced l1 square on basis vectors and sampled combinations.
///
/// `g` and `p` may be partial at a truncation boundary; squares that cannot
/// be evaluated are skipped and counted.
pub fn functor_square(
    t_labels: &[String],
    s_labels: &[String],
    p: &[Option<usize>],
    g: &[Option<usize>],
    f: &[Option<usize>],
    sample_seed: u64,
) -> Result<SquareCertificate, ElloneError> {
    if p.len() != t_labels.len() || g.len() != t_labels.len() || f.len() != s_labels.len() {
        return Err(ElloneError::Shape("table lengths must match the label sets".into()));
    }
    // p must be surjective on the enumerated sets
    let mut section = vec![usize::MAX; s_labels.len()];
    for (t, pt) in p.iter().enumerate() {
        if let Some(pt) = *pt {
            if pt >= s_labels.len() {
                return Err(ElloneError::Shape(format!("p({t}) out of range")));
            }
            if section[pt] == usize::MAX {
                section[pt] = t;
            }
        }
    }
    if let Some(missing) = section.iter().position(|&t| t == usize::MAX) {
        return Err(ElloneError::NotSurjective(s_labels[missing].clone()));
    }
    // set-level commutation where both routes are defined
    for t in 0..t_labels.len() {
        let via_g = g[t].and_then(|gt| p.get(gt).copied().flatten());
        let via_p = p[t].and_then(|pt| f.get(pt).copied().flatten());
        if let (Some(a), Some(b)) = (via_g, via_p) {
            if a != b {
                return Err(ElloneError::SquareDoesNotCommuteAtSetLevel(
                    t_labels[t].clone(),
                ));
            }
        }
    }
    let mut cert = Certificate::new(format!("basis={}, samples=8", t_labels.len()));
    for t in 0..t_labels.len() {
        let via_g = g[t].and_then(|gt| p.get(gt).copied().flatten());
        let via_p = p[t].and_then(|pt| f.get(pt).copied().flatten());
        match (via_g, via_p) {
            (Some(a), Some(b)) => cert.push(CertSquare::new(
                "l1",
                format!("e[{}]", t_labels[t]),
                format!("e[{}]", s_labels[a]),
                format!("e[{}]", s_labels[b]),
            )),
            _ => cert.skip(),
        }
    }
    // sampled combinations: exact rational vectors pushed around both ways
    let mut rng = SplitMix64::new(sample_seed);
    let mut norm_one = true;
    let mut samples_checked = 0;
    let interior: Vec<usize> = (0..t_labels.len())
        .filter(|&t| {
            p[t].is_some()
                && g[t].and_then(|gt| p.get(gt).copied().flatten()).is_some()
        })
        .collect();
    for _ in 0..8 {
        if interior.is_empty() {
            break;
        }
        let mut entries: Vec<(usize, Rat)> = Vec::new();
        for _ in 0..interior.len().min(4) {
            let idx = interior[rng.below(interior.len() as u64) as usize];
            let num = rng.small_int(9);
            let den = 1 + rng.below(9) as i64;
            entries.push((idx, crate::rat(num, den)));
        }
        let v: SparseVec<usize, Rat> = SparseVec::from_entries(entries);
        if v.is_zero() {
            continue;
        }
        let push = |table: &[Option<usize>], v: &SparseVec<usize, Rat>| {
            v.push_forward(|i| table[*i].expect("interior support"))
        };
        let lhs = push(p, &push(g, &v));
        let rhs = push(f, &push(p, &v));
        if lhs != rhs {
            return Err(ElloneError::SquareDoesNotCommuteAtSetLevel(format!(
                "sampled combination {v}"
            )));
        }
        // l1(p) is norm one: contractive in general, isometric on the
        // nonnegative cone
        let pv = push(p, &v);
        if pv.norm1() > v.norm1() {
            norm_one = false;
        }
        let abs: SparseVec<usize, Rat> =
            SparseVec::from_entries(v.iter().map(|(i, c)| (*i, c.abs())));
        if push(p, &abs).norm1() != abs.norm1() {
            norm_one = false;
        }
        samples_checked += 1;
    }
    Ok(SquareCertificate { certificate: cert, samples_checked, norm_one, section })
}

/// The universal basic operator `l1(nu)` on the truncated pair basis,
/// packaged with the lifting pipeline onto rational targets.
#[derive(Debug, Clone, Copy)]
pub struct NuOperator {
    /// Rows of the evaluated rectangle: pairs `<m, n>` with `m < depth`.
    pub depth: u64,
}

/// The complete pipeline output: a certified surjective nonexpansive
/// lifting of a rational target operator to `l1(nu)`.
#[derive(Debug, Clone)]
pub struct NuPipelineLifting {
    pub target_lifting: TargetLifting<Rat>,
    pub set_lifting: funcgraph::NuLifting,
    pub square: SquareCertificate,
    /// Commutation of the composite `q = q1 . l1(q2)` with `l1(nu)` and the
    /// target, evaluated on the rectangle basis.
    pub composite_certificate: Certificate,
    pub surjective: bool,
    pub nonexpansive: bool,
}

impl NuPipelineLifting {
    pub fn certified(&self) -> bool {
        self.target_lifting.certificate.all_pass()
            && self.set_lifting.certificate.all_pass()
            && self.square.certificate.all_pass()
            && self.square.norm_one
            && self.composite_certificate.all_pass()
            && self.surjective
            && self.nonexpansive
    }
}

impl NuOperator {
    pub fn new(depth: u64) -> Self {
        NuOperator { depth }
    }

    /// The evaluated rectangle `m < depth, n < columns`, column by column.
    pub fn basis(&self, columns: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for n in 0..columns {
            for m in 0..self.depth {
                out.push((m, n));
            }
        }
        out
    }

    pub fn apply<T: Scalar>(&self, v: &SparseVec<(u64, u64), T>) -> SparseVec<(u64, u64), T> {
        apply_basic(&NuShift, v).expect("nu is total")
    }

    /// Lift a rational target through `l1(nu)`: close the seeds under the
    /// target to get `q1`, lift the closed set-level map to `nu` to get
    /// `q2`, certify the functorial square for `l1(q2)`, and certify the
    /// composite `q = q1 . l1(q2)` directly on the rectangle.
    pub fn lift(
        &self,
        target: &RationalTarget,
        seeds: &[Vec<Rat>],
        closure_depth: u64,
        sample_seed: u64,
    ) -> Result<NuPipelineLifting, ElloneError> {
        let target_lifting = lift_target_operator(target, seeds, closure_depth)?;
        let set_map = target_lifting.as_target_map();
        let set_lifting = funcgraph::lift_finite_map_to_nu(&set_map, self.depth)?;

        // the set-level surjection q2: rectangle -> S' and the two self-maps
        let rect = self.basis(set_map.points.len() as u64);
        let rect_index: BTreeMap<(u64, u64), usize> =
            rect.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let t_labels: Vec<String> = rect.iter().map(|(m, n)| format!("({m},{n})")).collect();
        let p_table: Vec<Option<usize>> =
            rect.iter().map(|&(m, n)| set_lifting.eval(m, n)).collect();
        let g_table: Vec<Option<usize>> = rect
            .iter()
            .map(|&(m, n)| rect_index.get(&funcgraph::nu_step(m, n)).copied())
            .collect();
        let square = functor_square(
            &t_labels,
            &set_map.points,
            &p_table,
            &g_table,
            &set_map.image,
            sample_seed,
        )?;

        // composite certificate: f(q e_(m,n)) = q(e_(m+1,n)) exactly
        let q_of = |m: u64, n: u64| -> Option<Vec<Rat>> {
            set_lifting.eval(m, n).map(|j| target_lifting.basis[j].clone())
        };
        let mut cert = Certificate::new(format!(
            "rectangle {} x {}",
            self.depth,
            set_map.points.len()
        ));
        let mut columns: Vec<Vec<Rat>> = Vec::new();
        for &(m, n) in &rect {
            let Some(qv) = q_of(m, n) else {
                cert.skip();
                continue;
            };
            columns.push(qv.clone());
            match q_of(m + 1, n) {
                Some(qnext) => {
                    let lhs = target.apply(&qv);
                    cert.push(CertSquare::new(
                        "nu",
                        format!("e[({m},{n})]"),
                        vec_str(&lhs),
                        vec_str(&qnext),
                    ));
                }
                None => cert.skip(),
            }
        }
        let col_matrix = {
            let mut mtx = Matrix::zeros(target.dim, columns.len());
            for (j, v) in columns.iter().enumerate() {
                for (r, c) in v.iter().enumerate() {
                    mtx.set(r, j, c.clone());
                }
            }
            mtx
        };
        let surjective = col_matrix.rank() == target.dim;
        let nonexpansive = columns.iter().all(|v| dense_norm1(v) <= Rat::one());
        Ok(NuPipelineLifting {
            target_lifting,
            set_lifting,
            square,
            composite_certificate: cert,
            surjective,
            nonexpansive,
        })
    }
}
