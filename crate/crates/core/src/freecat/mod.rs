//! Concrete categories with free functors, nice epimorphisms, and the free
//! monoid-action functor built on top of them.
//!
//! An instance supplies objects, morphisms, a faithful forgetful view into
//! elements, a free-object builder with its unit, and the extension operator
//! that makes the free object free. The generic layer provides the extension
//! laws, the generation predicate, the nice-epimorphism axioms (N0)-(N2)
//! with explicit search budgets, the free action on `F(M x S)`, and the
//! lifting pipeline that sends any action on a generated object onto it.
//!
//! Three instances are built in: nonempty finite sets ([`ens::EnsCat`]),
//! truncated monounary algebras ([`monounary::MonounaryCat`]), and rational
//! l1 spaces with nonexpansive linear maps ([`finvecq::FinVecQCat`]).

pub mod ens;
pub mod finvecq;
pub mod monounary;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::action::{self, ActionError, Point, SetCarrier, ZetaAction};
use crate::cert::{CertSquare, Certificate};
use crate::monoid::{EnumerationBound, Monoid, MonoidElement, MonoidError};

pub use ens::EnsCat;
pub use finvecq::FinVecQCat;
pub use monounary::MonounaryCat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreecatError {
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("map is not defined at {0}")]
    MapUndefined(String),
    #[error("objects do not compose: {0}")]
    NotComposable(String),
    #[error("value {0} is not in the object universe")]
    ValueNotInUniverse(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("the set does not generate the object: {0}")]
    DoesNotGenerate(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A concrete category with a distinguished forgetful functor and a left
/// adjoint free functor, enumerable enough for exhaustive small-instance
/// law checking.
pub trait ConcreteCategory {
    type Object: Clone + fmt::Debug + PartialEq;
    type Morphism: Clone + fmt::Debug + PartialEq;
    /// Elements of object universes `U[A]`.
    type Elem: Clone + Ord + fmt::Debug + fmt::Display;

    fn name(&self) -> &'static str;

    /// The enumerated universe of an object (for the normed instance, a
    /// documented finite sample of the rational unit ball).
    fn universe(&self, a: &Self::Object) -> Vec<Self::Elem>;

    /// The set map `U[f]` applied to one element.
    fn apply(&self, f: &Self::Morphism, x: &Self::Elem) -> Result<Self::Elem, FreecatError>;

    fn dom(&self, f: &Self::Morphism) -> Self::Object;
    fn cod(&self, f: &Self::Morphism) -> Self::Object;
    fn identity(&self, a: &Self::Object) -> Self::Morphism;

    /// `g . f` (apply `f` first).
    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, FreecatError>;

    /// The free object over a finite basis.
    fn free(&self, basis: &[Point]) -> Result<Self::Object, FreecatError>;

    /// The unit `eta_X` at one basis point.
    fn unit(&self, basis: &[Point], x: &Point) -> Result<Self::Elem, FreecatError>;

    /// The unique extension of `f: X -> U[A]` to `F X -> A`.
    fn extend(
        &self,
        basis: &[Point],
        a: &Self::Object,
        f: &BTreeMap<Point, Self::Elem>,
    ) -> Result<Self::Morphism, FreecatError>;

    /// The free functor on a set map between bases: `F f: F X -> F Y`.
    fn free_map(
        &self,
        dom_basis: &[Point],
        cod_basis: &[Point],
        f: &BTreeMap<Point, Point>,
    ) -> Result<Self::Morphism, FreecatError>;

    /// Deterministic list of small objects for law suites.
    fn small_objects(&self, size_bound: usize) -> Vec<Self::Object>;

    /// Deterministic enumeration of `hom(a, b)`, truncated at `budget`.
    fn morphisms(&self, a: &Self::Object, b: &Self::Object, budget: usize)
        -> Vec<Self::Morphism>;

    /// Surjectivity on the enumerated universe (exact rank for the normed
    /// instance).
    fn is_surjective(&self, f: &Self::Morphism) -> bool;

    /// Search for a right inverse within a budget. `None` means "not found
    /// at this bound", not a proof of absence.
    fn right_inverse(&self, f: &Self::Morphism, budget: usize) -> Option<Self::Morphism>;
}

/// Which arrows count as nice epimorphisms. `Surjective` is the default for
/// every built-in instance; `RightInvertible` is the minimal possibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NiceEpiMode {
    #[default]
    Surjective,
    RightInvertible,
}

/// Budget for right-inverse searches in the `RightInvertible` mode.
pub const RIGHT_INVERSE_BUDGET: usize = 4096;

pub fn is_nice<C: ConcreteCategory>(cat: &C, mode: NiceEpiMode, f: &C::Morphism) -> bool {
    match mode {
        NiceEpiMode::Surjective => cat.is_surjective(f),
        NiceEpiMode::RightInvertible => cat.right_inverse(f, RIGHT_INVERSE_BUDGET).is_some(),
    }
}

/// An extension together with its unit-law certificate.
#[derive(Debug, Clone)]
pub struct CertifiedExtension<C: ConcreteCategory> {
    pub morphism: C::Morphism,
    pub unit_certificate: Certificate,
}

/// Extend `f: X -> U[A]` and certify `U[ext] . eta_X = f` pointwise.
pub fn extend_map<C: ConcreteCategory>(
    cat: &C,
    basis: &[Point],
    a: &C::Object,
    f: &BTreeMap<Point, C::Elem>,
) -> Result<CertifiedExtension<C>, FreecatError> {
    if basis.is_empty() {
        return Err(FreecatError::EmptyCarrier);
    }
    let morphism = cat.extend(basis, a, f)?;
    let mut cert = Certificate::new(format!("basis={}", basis.len()));
    for x in basis {
        let unit_x = cat.unit(basis, x)?;
        let lhs = cat.apply(&morphism, &unit_x)?;
        let rhs = f
            .get(x)
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
        cert.push(CertSquare::new(
            "unit",
            x.to_string(),
            lhs.to_string(),
            rhs.to_string(),
        ));
    }
    Ok(CertifiedExtension { morphism, unit_certificate: cert })
}

/// `(g . f)~ = g~ . F f` pointwise on the free object over `X`; `false`
/// signals an instance bug.
pub fn law_compose_right<C: ConcreteCategory>(
    cat: &C,
    x_basis: &[Point],
    y_basis: &[Point],
    f: &BTreeMap<Point, Point>,
    a: &C::Object,
    g: &BTreeMap<Point, C::Elem>,
) -> Result<bool, FreecatError> {
    let mut gf = BTreeMap::new();
    for x in x_basis {
        let fx = f
            .get(x)
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
        let gfx = g
            .get(fx)
            .ok_or_else(|| FreecatError::MapUndefined(fx.to_string()))?;
        gf.insert(x.clone(), gfx.clone());
    }
    let lhs = cat.extend(x_basis, a, &gf)?;
    let ff = cat.free_map(x_basis, y_basis, f)?;
    let gbar = cat.extend(y_basis, a, g)?;
    let rhs = cat.compose(&gbar, &ff)?;
    Ok(lhs == rhs)
}

/// `(U[g] . f)~ = g . f~`; `false` signals an instance bug.
pub fn law_compose_left<C: ConcreteCategory>(
    cat: &C,
    x_basis: &[Point],
    a: &C::Object,
    f: &BTreeMap<Point, C::Elem>,
    g: &C::Morphism,
) -> Result<bool, FreecatError> {
    let mut uf = BTreeMap::new();
    for x in x_basis {
        let fx = f
            .get(x)
            .ok_or_else(|| FreecatError::MapUndefined(x.to_string()))?;
        uf.insert(x.clone(), cat.apply(g, fx)?);
    }
    let lhs = cat.extend(x_basis, &cat.cod(g), &uf)?;
    let fbar = cat.extend(x_basis, a, f)?;
    let rhs = cat.compose(g, &fbar)?;
    Ok(lhs == rhs)
}

/// `f: X -> U[A]` generates `A` iff its extension is a nice epi.
pub fn generates<C: ConcreteCategory>(
    cat: &C,
    mode: NiceEpiMode,
    basis: &[Point],
    a: &C::Object,
    f: &BTreeMap<Point, C::Elem>,
) -> Result<bool, FreecatError> {
    let ext = cat.extend(basis, a, f)?;
    Ok(is_nice(cat, mode, &ext))
}

/// Any superset of the image of a generating map still generates, via the
/// factorization of the extension through the inclusion and axiom (N2).
/// Returns the niceness of the inclusion's extension; `true` is forced.
pub fn enlarge_generating_set<C: ConcreteCategory>(
    cat: &C,
    mode: NiceEpiMode,
    basis: &[Point],
    a: &C::Object,
    f: &BTreeMap<Point, C::Elem>,
    superset: &[C::Elem],
) -> Result<bool, FreecatError> {
    if !generates(cat, mode, basis, a, f)? {
        return Err(FreecatError::PreconditionViolated(
            "f does not generate A".into(),
        ));
    }
    let present: BTreeSet<&C::Elem> = superset.iter().collect();
    for v in f.values() {
        if !present.contains(v) {
            return Err(FreecatError::PreconditionViolated(format!(
                "superset misses the image value {v}"
            )));
        }
    }
    // basis for the superset, and the inclusion e: S -> U[A]
    let s_basis: Vec<Point> = (0..superset.len())
        .map(|i| Point::label(format!("s{i}")))
        .collect();
    let inclusion: BTreeMap<Point, C::Elem> = s_basis
        .iter()
        .cloned()
        .zip(superset.iter().cloned())
        .collect();
    // factorization f = e . f_S at the basis level
    let mut f_s = BTreeMap::new();
    for (x, v) in f {
        let idx = superset.iter().position(|w| w == v).expect("checked above");
        f_s.insert(x.clone(), s_basis[idx].clone());
    }
    let ebar = cat.extend(&s_basis, a, &inclusion)?;
    let ff_s = cat.free_map(basis, &s_basis, &f_s)?;
    let fbar = cat.extend(basis, a, f)?;
    if cat.compose(&ebar, &ff_s)? != fbar {
        return Err(FreecatError::PreconditionViolated(
            "extension does not factor through the inclusion".into(),
        ));
    }
    Ok(is_nice(cat, mode, &ebar))
}

/// An action of a monoid on a category object: a table of endomorphisms for
/// the enumerated monoid elements. For infinite monoids the table holds the
/// elements whose endomorphism is constructible within the bound.
#[derive(Debug, Clone)]
pub struct ObjectAction<C: ConcreteCategory> {
    pub monoid: Monoid,
    pub bound: EnumerationBound,
    pub object: C::Object,
    pub table: BTreeMap<MonoidElement, C::Morphism>,
}

#[derive(Debug, Clone, Default)]
pub struct ObjectActionLaws {
    pub identity_ok: bool,
    pub composition_checked: usize,
    pub composition_failures: Vec<(MonoidElement, MonoidElement)>,
    pub skipped: usize,
}

impl ObjectActionLaws {
    pub fn passed(&self) -> bool {
        self.identity_ok && self.composition_failures.is_empty()
    }
}

impl<C: ConcreteCategory> ObjectAction<C> {
    pub fn tabulate(
        monoid: Monoid,
        bound: EnumerationBound,
        object: C::Object,
        mut rule: impl FnMut(&MonoidElement) -> Option<C::Morphism>,
    ) -> Self {
        let mut table = BTreeMap::new();
        for m in monoid.enumerate(&bound) {
            if let Some(morphism) = rule(&m) {
                table.insert(m, morphism);
            }
        }
        ObjectAction { monoid, bound, object, table }
    }

    pub fn act(&self, m: &MonoidElement) -> Option<&C::Morphism> {
        self.table.get(m)
    }

    /// `1^phi = id` and `(m0 m1)^phi = m0^phi . m1^phi` on the table.
    pub fn check_laws(&self, cat: &C) -> ObjectActionLaws {
        let identity_ok = self
            .table
            .get(&self.monoid.identity())
            .map(|f| *f == cat.identity(&self.object))
            .unwrap_or(false);
        let mut report = ObjectActionLaws { identity_ok, ..Default::default() };
        let elems: Vec<&MonoidElement> = self.table.keys().collect();
        for &m0 in &elems {
            for &m1 in &elems {
                let Ok(prod) = self.monoid.multiply(m0, m1) else {
                    report.skipped += 1;
                    continue;
                };
                let (Some(fp), Some(f0), Some(f1)) =
                    (self.table.get(&prod), self.table.get(m0), self.table.get(m1))
                else {
                    report.skipped += 1;
                    continue;
                };
                match cat.compose(f0, f1) {
                    Ok(comp) if comp == *fp => report.composition_checked += 1,
                    _ => report.composition_failures.push((m0.clone(), m1.clone())),
                }
            }
        }
        report
    }
}

/// The free monoid action on `F(M x S)`: the set-level free action `zeta_S`
/// together with its image under the free functor, tabulated for the monoid
/// elements whose shift stays within the enumerated basis.
#[derive(Debug, Clone)]
pub struct FreeMAction<C: ConcreteCategory> {
    pub zeta: ZetaAction,
    pub basis: Vec<Point>,
    pub object: C::Object,
    pub action: ObjectAction<C>,
    /// Monoid elements whose shift left the enumerated basis.
    pub skipped_elements: usize,
}

/// Build the universal action `F zeta_S` of a monoid on the free object over
/// `M x S`.
pub fn universal_action_on_free<C: ConcreteCategory>(
    cat: &C,
    monoid: &Monoid,
    index: &SetCarrier,
    bound: &EnumerationBound,
) -> Result<FreeMAction<C>, FreecatError> {
    let zeta = action::zeta_of_set(monoid, index, bound)?;
    let basis: Vec<Point> = zeta.pairs().to_vec();
    let basis_set: BTreeSet<&Point> = basis.iter().collect();
    let object = cat.free(&basis)?;
    let mut skipped = 0usize;
    let mut table = BTreeMap::new();
    for m in zeta.elements() {
        let mut shift = BTreeMap::new();
        let mut total = true;
        for p in &basis {
            let image = zeta.act(m, p)?;
            if basis_set.contains(&image) {
                shift.insert(p.clone(), image);
            } else {
                total = false;
                break;
            }
        }
        if !total {
            skipped += 1;
            continue;
        }
        table.insert(m.clone(), cat.free_map(&basis, &basis, &shift)?);
    }
    let action = ObjectAction {
        monoid: monoid.clone(),
        bound: *bound,
        object: object.clone(),
        table,
    };
    Ok(FreeMAction { zeta, basis, object, action, skipped_elements: skipped })
}

/// A certified extension out of the free monoid action.
#[derive(Debug, Clone)]
pub struct MActionExtension<C: ConcreteCategory> {
    pub morphism: C::Morphism,
    /// Unit triangle `U[ext](eta(1, s)) = f(s)`.
    pub triangle: Certificate,
    /// Homomorphism squares `ext . m^{F zeta} = m^phi . ext` at the
    /// morphism level.
    pub squares: Certificate,
    /// Whether every budget-enumerated competing homomorphism with the same
    /// unit restriction equals the extension.
    pub unique_at_budget: bool,
}

impl<C: ConcreteCategory> MActionExtension<C> {
    pub fn certified(&self) -> bool {
        self.triangle.all_pass() && self.squares.all_pass() && self.unique_at_budget
    }
}

/// The free monoid-action functor: `F(M x S)` with the action `F zeta_S`,
/// and the extension operator for maps `S -> U[A]` against any action on a
/// category object.
pub struct FreeMActionFunctor<'c, C: ConcreteCategory> {
    pub cat: &'c C,
    pub free: FreeMAction<C>,
    pub base_points: Vec<Point>,
}

pub fn free_maction_functor<'c, C: ConcreteCategory>(
    cat: &'c C,
    monoid: &Monoid,
    base: &SetCarrier,
    bound: &EnumerationBound,
) -> Result<FreeMActionFunctor<'c, C>, FreecatError> {
    let free = universal_action_on_free(cat, monoid, base, bound)?;
    let base_points = free.zeta.base_points().to_vec();
    Ok(FreeMActionFunctor { cat, free, base_points })
}

impl<'c, C: ConcreteCategory> FreeMActionFunctor<'c, C> {
    /// Extend `f: S -> U[A]` to an action homomorphism `F(M x S) -> A` via
    /// `f~<x, s> = x^phi . f(s)`, with certificates.
    pub fn extend_against(
        &self,
        phi: &ObjectAction<C>,
        f: &BTreeMap<Point, C::Elem>,
        uniqueness_budget: usize,
    ) -> Result<MActionExtension<C>, FreecatError> {
        let cat = self.cat;
        let mut f_tilde: BTreeMap<Point, C::Elem> = BTreeMap::new();
        for pair in &self.free.basis {
            let Point::Pair(x, s) = pair else { unreachable!("zeta basis holds pairs") };
            let morphism = phi.act(x).ok_or_else(|| {
                FreecatError::BoundExceeded(format!("{x} has no tabulated endomorphism"))
            })?;
            let fs = f
                .get(s)
                .ok_or_else(|| FreecatError::MapUndefined(s.to_string()))?;
            f_tilde.insert(pair.clone(), cat.apply(morphism, fs)?);
        }
        let ext = cat.extend(&self.free.basis, &phi.object, &f_tilde)?;

        // triangle: U[ext](eta_S(s)) = f(s), where eta_S(s) = <1, s>
        let mut triangle = Certificate::new(format!("base={}", self.base_points.len()));
        for s in &self.base_points {
            let unit_pair = self.free.zeta.unit(s);
            let unit_elem = cat.unit(&self.free.basis, &unit_pair)?;
            let lhs = cat.apply(&ext, &unit_elem)?;
            let rhs = f
                .get(s)
                .ok_or_else(|| FreecatError::MapUndefined(s.to_string()))?;
            triangle.push(CertSquare::new(
                "eta",
                s.to_string(),
                lhs.to_string(),
                rhs.to_string(),
            ));
        }

        // homomorphism squares at the morphism level
        let mut squares = Certificate::new(format!(
            "elements={}, skipped_shifts={}",
            self.free.action.table.len(),
            self.free.skipped_elements
        ));
        for (m, zeta_m) in &self.free.action.table {
            let Some(phi_m) = phi.act(m) else {
                squares.skip();
                continue;
            };
            let lhs = cat.compose(&ext, zeta_m)?;
            let rhs = cat.compose(phi_m, &ext)?;
            squares.push(CertSquare::new(
                m.to_string(),
                "morphism",
                format!("{lhs:?}"),
                format!("{rhs:?}"),
            ));
        }

        // uniqueness at budget: competing homomorphisms with the same unit
        // restriction must coincide with the extension
        let mut unique = true;
        for candidate in cat.morphisms(&self.free.object, &phi.object, uniqueness_budget) {
            if candidate == ext {
                continue;
            }
            let mut same_unit = true;
            for pair in &self.free.basis {
                let unit_elem = cat.unit(&self.free.basis, pair)?;
                if cat.apply(&candidate, &unit_elem)? != f_tilde[pair] {
                    same_unit = false;
                    break;
                }
            }
            if same_unit {
                unique = false;
                break;
            }
        }
        Ok(MActionExtension {
            morphism: ext,
            triangle,
            squares,
            unique_at_budget: unique,
        })
    }
}

/// Output of the object-action lifting pipeline.
#[derive(Debug, Clone)]
pub struct ObjectLifting<C: ConcreteCategory> {
    /// The universal action the target was lifted to.
    pub universal: FreeMAction<C>,
    /// The orbit closure of the generating seeds, in canonical order.
    pub closure: Vec<C::Elem>,
    /// The composite nice epimorphism `F(M x S') -> A`.
    pub map: C::Morphism,
    pub certificate: Certificate,
    pub nice: bool,
}

/// Lift an action on a generated object to the universal action on the free
/// object: close the seeds under the monoid orbits, restrict the action to
/// the closure, extend the inclusion, and precompose with the free image of
/// the set-level surjection from the free action.
pub fn lift_object_action<C: ConcreteCategory>(
    cat: &C,
    mode: NiceEpiMode,
    phi: &ObjectAction<C>,
    seeds: &[C::Elem],
    bound: &EnumerationBound,
) -> Result<ObjectLifting<C>, FreecatError> {
    if seeds.is_empty() {
        return Err(FreecatError::EmptyCarrier);
    }
    // the restricted action must be total on the enumeration the pipeline
    // runs at; a partial table would fabricate squares
    for m in phi.monoid.enumerate(bound) {
        if !phi.table.contains_key(&m) {
            return Err(FreecatError::BoundExceeded(format!(
                "{m} has no tabulated endomorphism; lower the bound or extend the action"
            )));
        }
    }
    // orbit closure of the seeds under the tabulated endomorphisms
    let mut closure: BTreeSet<C::Elem> = seeds.iter().cloned().collect();
    let mut work: Vec<C::Elem> = closure.iter().cloned().collect();
    while let Some(x) = work.pop() {
        for morphism in phi.table.values() {
            let y = cat.apply(morphism, &x)?;
            if closure.insert(y.clone()) {
                if closure.len() > bound.max_elements {
                    return Err(FreecatError::BoundExceeded(format!(
                        "orbit closure exceeds {} elements",
                        bound.max_elements
                    )));
                }
                work.push(y);
            }
        }
    }
    let closure: Vec<C::Elem> = closure.into_iter().collect();
    let elem_index: BTreeMap<&C::Elem, usize> =
        closure.iter().enumerate().map(|(i, e)| (e, i)).collect();

    // the restricted set-level action psi on labeled closure points
    let labels: Vec<String> = (0..closure.len()).map(|i| format!("v{i}")).collect();
    let carrier = SetCarrier::finite(labels.clone())?;
    let psi = action::SetMAction::from_rule(
        phi.monoid.clone(),
        carrier,
        *bound,
        |m, p| {
            let Point::Label(l) = p else { unreachable!() };
            let i: usize = l[1..].parse().expect("vN label");
            let morphism = phi.table.get(m).expect("table totality checked above");
            let y = cat.apply(morphism, &closure[i]).expect("closure is invariant");
            Point::label(format!("v{}", elem_index[&y]))
        },
    )?;

    // inclusion extension: F S' -> A, an action homomorphism
    let s_basis: Vec<Point> = labels.iter().map(|l| Point::label(l.clone())).collect();
    let inclusion: BTreeMap<Point, C::Elem> = s_basis
        .iter()
        .cloned()
        .zip(closure.iter().cloned())
        .collect();
    let iota = cat.extend(&s_basis, &phi.object, &inclusion)?;
    if !is_nice(cat, mode, &iota) {
        return Err(FreecatError::DoesNotGenerate(format!(
            "the closed set of {} elements does not generate",
            closure.len()
        )));
    }

    // set-level surjection q from the free action, then its free image
    let (_, set_lifting) = action::lift_action_to_zeta(&psi)?;
    let universal = universal_action_on_free(
        cat,
        &phi.monoid,
        &SetCarrier::finite(labels.clone())?,
        bound,
    )?;
    let q_map: BTreeMap<Point, Point> = set_lifting
        .map
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let fq = cat.free_map(&universal.basis, &s_basis, &q_map)?;
    let composite = cat.compose(&iota, &fq)?;

    // certificate: composite . m^{F zeta} = m^phi . composite
    let mut cert = Certificate::new(format!(
        "elements={}, closure={}",
        universal.action.table.len(),
        closure.len()
    ));
    for (m, zeta_m) in &universal.action.table {
        let Some(phi_m) = phi.act(m) else {
            cert.skip();
            continue;
        };
        let lhs = cat.compose(&composite, zeta_m)?;
        let rhs = cat.compose(phi_m, &composite)?;
        cert.push(CertSquare::new(
            m.to_string(),
            "morphism",
            format!("{lhs:?}"),
            format!("{rhs:?}"),
        ));
    }
    let nice = is_nice(cat, mode, &composite);
    Ok(ObjectLifting { universal, closure, map: composite, certificate: cert, nice })
}

/// One checked law with its failure witnesses.
#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn note(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(witness());
        }
    }
}

/// Results of the full extension-law and nice-epi-axiom suite.
#[derive(Debug, Clone, Default)]
pub struct LawSuiteReport {
    pub instance: String,
    pub unit_law: LawReport,
    pub uniqueness: LawReport,
    pub compose_right: LawReport,
    pub compose_left: LawReport,
    pub n0_epis: LawReport,
    pub n1_right_invertible: LawReport,
    pub n2_composition: LawReport,
}

impl LawSuiteReport {
    pub fn passed(&self) -> bool {
        self.unit_law.passed()
            && self.uniqueness.passed()
            && self.compose_right.passed()
            && self.compose_left.passed()
            && self.n0_epis.passed()
            && self.n1_right_invertible.passed()
            && self.n2_composition.passed()
    }

    pub fn laws(&self) -> Vec<(&'static str, &LawReport)> {
        vec![
            ("unit_law", &self.unit_law),
            ("uniqueness", &self.uniqueness),
            ("compose_right", &self.compose_right),
            ("compose_left", &self.compose_left),
            ("n0_epis", &self.n0_epis),
            ("n1_right_invertible", &self.n1_right_invertible),
            ("n2_composition", &self.n2_composition),
        ]
    }
}

/// Deterministic enumeration caps for the law suite. The nice-epi axioms
/// use test-pair search over enumerated hom-sets; exhausting the budget
/// without a separating pair counts as pass-at-bound.
#[derive(Debug, Clone, Copy)]
pub struct LawSuiteConfig {
    pub size_bound: usize,
    /// Per-pair hom-set enumeration cap.
    pub hom_budget: usize,
    /// Cap on enumerated maps out of a basis.
    pub map_budget: usize,
    /// How many objects (evenly spread over the size range) feed the
    /// (N0)-(N2) axiom checks.
    pub axiom_objects: usize,
    /// Nice arrows tested for (N0) per hom-set.
    pub n0_arrow_cap: usize,
    pub nice_mode: NiceEpiMode,
}

impl Default for LawSuiteConfig {
    fn default() -> Self {
        LawSuiteConfig {
            size_bound: 3,
            hom_budget: 48,
            map_budget: 32,
            axiom_objects: 8,
            n0_arrow_cap: 8,
            nice_mode: NiceEpiMode::Surjective,
        }
    }
}

/// Evenly spread `cap` indices over `0..n`, covering both ends.
fn spread_indices(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    (0..cap).map(|i| i * (n - 1) / (cap - 1).max(1)).collect()
}

fn value_maps<C: ConcreteCategory>(
    basis: &[Point],
    values: &[C::Elem],
    budget: usize,
) -> Vec<BTreeMap<Point, C::Elem>> {
    let mut out = Vec::new();
    let k = basis.len();
    let n = values.len();
    if n == 0 {
        return out;
    }
    let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
    for idx in 0..total.min(budget) {
        let mut rem = idx;
        let mut map = BTreeMap::new();
        for x in basis {
            map.insert(x.clone(), values[rem % n].clone());
            rem /= n;
        }
        out.push(map);
    }
    out
}

fn point_maps(dom: &[Point], cod: &[Point], budget: usize) -> Vec<BTreeMap<Point, Point>> {
    let mut out = Vec::new();
    let n = cod.len();
    let total = n.checked_pow(dom.len() as u32).unwrap_or(usize::MAX);
    for idx in 0..total.min(budget) {
        let mut rem = idx;
        let mut map = BTreeMap::new();
        for x in dom {
            map.insert(x.clone(), cod[rem % n].clone());
            rem /= n;
        }
        out.push(map);
    }
    out
}

fn label_basis(prefix: &str, n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::label(format!("{prefix}{i}"))).collect()
}

/// Run the unit, uniqueness, extension-composition, and (N0)-(N2) checks on
/// one instance over its small objects.
pub fn run_law_suite<C: ConcreteCategory>(cat: &C, config: &LawSuiteConfig) -> LawSuiteReport {
    let mut report = LawSuiteReport { instance: cat.name().to_string(), ..Default::default() };
    let objects = cat.small_objects(config.size_bound);

    // unit law over one- and two-point bases
    for a in &objects {
        let values = cat.universe(a);
        for basis_size in 1..=2usize {
            let basis = label_basis("x", basis_size);
            for f in value_maps::<C>(&basis, &values, config.map_budget) {
                let Ok(ext) = extend_map(cat, &basis, a, &f) else {
                    continue;
                };
                report.unit_law.note(ext.unit_certificate.all_pass(), || {
                    format!("unit law fails on {a:?} with f={f:?}")
                });
            }
        }
    }

    // uniqueness against every enumerated competing morphism (singleton
    // basis keeps the competing hom-sets enumerable)
    for a in &objects {
        let values = cat.universe(a);
        let basis = label_basis("x", 1);
        let Ok(free_x) = cat.free(&basis) else { continue };
        let candidates = cat.morphisms(&free_x, a, config.hom_budget);
        for f in value_maps::<C>(&basis, &values, config.map_budget.min(8)) {
            let Ok(ext) = extend_map(cat, &basis, a, &f) else { continue };
            let mut unique = true;
            for candidate in &candidates {
                if *candidate == ext.morphism {
                    continue;
                }
                let mut same_unit = true;
                for x in &basis {
                    let Ok(unit_x) = cat.unit(&basis, x) else {
                        same_unit = false;
                        break;
                    };
                    match cat.apply(candidate, &unit_x) {
                        Ok(v) if v == f[x] => {}
                        _ => {
                            same_unit = false;
                            break;
                        }
                    }
                }
                if same_unit {
                    unique = false;
                    break;
                }
            }
            report
                .uniqueness
                .note(unique, || format!("extension not unique on {a:?} with f={f:?}"));
        }
    }

    // composition laws
    let co_objects: Vec<&C::Object> = spread_indices(objects.len(), config.axiom_objects + 4)
        .into_iter()
        .map(|i| &objects[i])
        .collect();
    for &a in &co_objects {
        let values = cat.universe(a);
        for (xs, ys) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let x_basis = label_basis("x", xs);
            let y_basis = label_basis("y", ys);
            for f in point_maps(&x_basis, &y_basis, config.map_budget) {
                for g in value_maps::<C>(&y_basis, &values, config.map_budget) {
                    if let Ok(ok) = law_compose_right(cat, &x_basis, &y_basis, &f, a, &g) {
                        report.compose_right.note(ok, || {
                            format!("compose_right fails on {a:?}, f={f:?}, g={g:?}")
                        });
                    }
                }
            }
        }
        for &b in &co_objects {
            let x_basis = label_basis("x", 2);
            for f in value_maps::<C>(&x_basis, &values, config.map_budget.min(9)) {
                for g in cat.morphisms(a, b, config.hom_budget.min(16)) {
                    if let Ok(ok) = law_compose_left(cat, &x_basis, a, &f, &g) {
                        report.compose_left.note(ok, || {
                            format!("compose_left fails on {a:?} -> {b:?}, f={f:?}")
                        });
                    }
                }
            }
        }
    }

    // nice-epi axioms over a spread of objects with memoized hom-sets
    let ax_objects: Vec<&C::Object> = spread_indices(objects.len(), config.axiom_objects)
        .into_iter()
        .map(|i| &objects[i])
        .collect();
    let n = ax_objects.len();
    let mut homs: Vec<Vec<Vec<C::Morphism>>> = Vec::with_capacity(n);
    for a in &ax_objects {
        let mut row = Vec::with_capacity(n);
        for b in &ax_objects {
            row.push(cat.morphisms(a, b, config.hom_budget));
        }
        homs.push(row);
    }
    for ai in 0..n {
        for bi in 0..n {
            let mut nice_seen = 0usize;
            for f in &homs[ai][bi] {
                let f_nice = is_nice(cat, config.nice_mode, f);
                if f_nice && nice_seen < config.n0_arrow_cap {
                    nice_seen += 1;
                    // (N0): nice arrows are epimorphisms at the bound
                    let mut violation = None;
                    'n0: for test in &homs[bi] {
                        for (i, g0) in test.iter().enumerate() {
                            for g1 in &test[i + 1..] {
                                let (Ok(c0), Ok(c1)) =
                                    (cat.compose(g0, f), cat.compose(g1, f))
                                else {
                                    continue;
                                };
                                if c0 == c1 {
                                    violation = Some(format!(
                                        "nice arrow is not epi: {f:?} with {g0:?}, {g1:?}"
                                    ));
                                    break 'n0;
                                }
                            }
                        }
                    }
                    let ok = violation.is_none();
                    report.n0_epis.note(ok, || violation.unwrap());
                }
                // (N1): right-invertible arrows are nice; sections come from
                // the memoized opposite hom-set
                let id_b = cat.identity(ax_objects[bi]);
                let section = homs[bi][ai]
                    .iter()
                    .find(|s| cat.compose(f, s).map(|c| c == id_b).unwrap_or(false));
                if section.is_some() {
                    report.n1_right_invertible.note(f_nice, || {
                        format!("right-invertible arrow not nice: {f:?}")
                    });
                }
            }
        }
    }
    // (N2): if g . h is nice then g is nice
    let n2_cap = config.hom_budget.min(12);
    for h_row in &homs {
        for (bi, h_list) in h_row.iter().enumerate() {
            for h in h_list.iter().take(n2_cap) {
                for row in &homs[bi] {
                    for g in row.iter().take(n2_cap) {
                        let Ok(gh) = cat.compose(g, h) else { continue };
                        if is_nice(cat, config.nice_mode, &gh) {
                            report.n2_composition.note(
                                is_nice(cat, config.nice_mode, g),
                                || format!("(N2) fails: g={g:?}, h={h:?}"),
                            );
                        }
                    }
                }
            }
        }
    }
    report
}

/// Pointwise coherence of the forget/free square: the basis of the free
/// action is exactly the carrier of the set-level free action, and the
/// tabulated free shifts agree with the set-level shifts under the unit
/// embedding.
pub fn diagram_coherence<C: ConcreteCategory>(
    cat: &C,
    free: &FreeMAction<C>,
) -> Result<bool, FreecatError> {
    if free.basis != free.zeta.pairs() {
        return Ok(false);
    }
    for (m, morphism) in &free.action.table {
        for pair in &free.basis {
            let set_image = free.zeta.act(m, pair)?;
            let unit_pair = cat.unit(&free.basis, pair)?;
            let lhs = cat.apply(morphism, &unit_pair)?;
            let rhs = cat.unit(&free.basis, &set_image)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rat;

    fn z2() -> Monoid {
        Monoid::cyclic(2).unwrap()
    }

    fn bound(n: usize) -> EnumerationBound {
        EnumerationBound::new(n, n).unwrap()
    }

    #[test]
    fn universal_action_trivial_monoid_is_identity() {
        let cat = EnsCat;
        let index = SetCarrier::finite(["s", "t"]).unwrap();
        let free =
            universal_action_on_free(&cat, &Monoid::trivial(), &index, &bound(8)).unwrap();
        assert_eq!(free.basis.len(), 2);
        let one = Monoid::trivial().identity();
        assert_eq!(free.action.table[&one], cat.identity(&free.object));
        assert!(free.action.check_laws(&cat).passed());
        assert!(diagram_coherence(&cat, &free).unwrap());
    }

    #[test]
    fn universal_action_finvecq_z2_is_coordinate_swap() {
        let cat = FinVecQCat;
        let index = SetCarrier::finite(["s"]).unwrap();
        let free = universal_action_on_free(&cat, &z2(), &index, &bound(8)).unwrap();
        assert_eq!(free.basis.len(), 2);
        let g = MonoidElement::Index(1);
        let swap = Matrix::from_rows(vec![
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ])
        .unwrap();
        assert_eq!(free.action.table[&g].matrix, swap);
        assert!(free.action.check_laws(&cat).passed());
        assert!(diagram_coherence(&cat, &free).unwrap());
    }

    #[test]
    fn universal_action_nat_keeps_the_set_level_shift() {
        // the free-level table only holds shifts that stay inside the basis,
        // but the set-level zeta action stays total and symbolic
        let cat = EnsCat;
        let index = SetCarrier::NatIndexed;
        let free =
            universal_action_on_free(&cat, &Monoid::NatAdditive, &index, &bound(4)).unwrap();
        assert!(free.skipped_elements > 0);
        let one = MonoidElement::Nat(1);
        for pair in free.zeta.pairs() {
            let Point::Pair(MonoidElement::Nat(m), s) = pair else { unreachable!() };
            let Point::Nat(n) = **s else { unreachable!() };
            let moved = free.zeta.act(&one, pair).unwrap();
            // the generator shift is exactly nu under the pair identification
            let (m2, n2) = crate::funcgraph::nu_step(*m, n);
            assert_eq!(moved, Point::pair(MonoidElement::Nat(m2), Point::Nat(n2)));
        }
    }

    #[test]
    fn free_maction_monounary_z2_swaps_columns() {
        let cat = MonounaryCat { depth: 3 };
        let base = SetCarrier::finite(["s"]).unwrap();
        let free = universal_action_on_free(&cat, &z2(), &base, &bound(8)).unwrap();
        // the free monounary algebra on the two pair points, with the swap
        // acting column-wise
        assert_eq!(free.object.carrier.len(), 6);
        let g = MonoidElement::Index(1);
        let morphism = &free.action.table[&g];
        for (pos, p) in free.object.carrier.iter().enumerate() {
            let Point::Indexed(pair, n) = p else { unreachable!() };
            let Point::Pair(a, s) = &**pair else { unreachable!() };
            let flipped = Point::pair(
                if *a == g { MonoidElement::Index(0) } else { g.clone() },
                (**s).clone(),
            );
            assert_eq!(
                cat.apply(morphism, &free.object.carrier[pos]).unwrap(),
                Point::indexed(flipped, *n)
            );
        }
        assert!(free.action.check_laws(&cat).passed());
    }

    #[test]
    fn free_maction_functor_on_ens_matches_zeta() {
        let cat = EnsCat;
        let base = SetCarrier::finite(["x", "y"]).unwrap();
        let functor = free_maction_functor(&cat, &z2(), &base, &bound(8)).unwrap();
        let zeta = action::zeta_of_set(&z2(), &base, &bound(8)).unwrap();
        assert_eq!(functor.free.basis, zeta.pairs());
        for m in zeta.elements() {
            let morphism = &functor.free.action.table[m];
            for pair in zeta.pairs() {
                assert_eq!(
                    cat.apply(morphism, pair).unwrap(),
                    zeta.act(m, pair).unwrap()
                );
            }
        }
    }

    #[test]
    fn maction_extension_against_swap() {
        // phi = swap action of Z2 on Q^2; extension of f(s) = e_1 sends
        // e_<1,s> to e_1 and e_<g,s> to the swapped vector
        let cat = FinVecQCat;
        let base = SetCarrier::finite(["s"]).unwrap();
        let functor = free_maction_functor(&cat, &z2(), &base, &bound(8)).unwrap();
        let swap = finvecq::LinMap::new(
            Matrix::from_rows(vec![
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(1, 1), rat(0, 1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let phi = ObjectAction::<FinVecQCat>::tabulate(
            z2(),
            bound(8),
            finvecq::VecSpace { dim: 2 },
            |m| {
                if *m == MonoidElement::Index(1) {
                    Some(swap.clone())
                } else {
                    Some(cat.identity(&finvecq::VecSpace { dim: 2 }))
                }
            },
        );
        assert!(phi.check_laws(&cat).passed());
        let f: BTreeMap<Point, finvecq::VecElem> = [(
            Point::label("s"),
            finvecq::VecElem(vec![rat(1, 1), rat(0, 1)]),
        )]
        .into();
        let ext = functor.extend_against(&phi, &f, 64).unwrap();
        assert!(ext.certified(), "triangle/squares/uniqueness must pass");
        // e_<g,s> maps to swap . (1,0) = (0,1)
        let g_pair = Point::pair(MonoidElement::Index(1), Point::label("s"));
        let unit = cat.unit(&functor.free.basis, &g_pair).unwrap();
        assert_eq!(
            cat.apply(&ext.morphism, &unit).unwrap(),
            finvecq::VecElem(vec![rat(0, 1), rat(1, 1)])
        );
    }

    #[test]
    fn lift_object_action_ens_swap() {
        let cat = EnsCat;
        let object = ens::EnsObject::new(vec![Point::label("a"), Point::label("b")]).unwrap();
        let swap = ens::EnsMorphism {
            dom: object.clone(),
            cod: object.clone(),
            map: [
                (Point::label("a"), Point::label("b")),
                (Point::label("b"), Point::label("a")),
            ]
            .into(),
        };
        let phi = ObjectAction::<EnsCat>::tabulate(z2(), bound(8), object, |m| {
            if *m == MonoidElement::Index(1) {
                Some(swap.clone())
            } else {
                Some(cat.identity(&swap.dom))
            }
        });
        assert!(phi.check_laws(&cat).passed());
        let seeds = vec![Point::label("a")];
        let lifting =
            lift_object_action(&cat, NiceEpiMode::Surjective, &phi, &seeds, &bound(16)).unwrap();
        assert_eq!(lifting.closure.len(), 2, "orbit closure adds b");
        assert!(lifting.nice);
        assert!(lifting.certificate.all_pass());
        assert!(!lifting.certificate.is_empty());
    }

    #[test]
    fn lift_object_action_finvecq_swap() {
        let cat = FinVecQCat;
        let swap = finvecq::LinMap::new(
            Matrix::from_rows(vec![
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(1, 1), rat(0, 1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let space = finvecq::VecSpace { dim: 2 };
        let phi = ObjectAction::<FinVecQCat>::tabulate(z2(), bound(8), space, |m| {
            if *m == MonoidElement::Index(1) {
                Some(swap.clone())
            } else {
                Some(cat.identity(&finvecq::VecSpace { dim: 2 }))
            }
        });
        let seeds = vec![
            finvecq::VecElem(vec![rat(1, 1), rat(0, 1)]),
            finvecq::VecElem(vec![rat(0, 1), rat(1, 1)]),
        ];
        let lifting =
            lift_object_action(&cat, NiceEpiMode::Surjective, &phi, &seeds, &bound(16)).unwrap();
        assert!(lifting.nice, "composite must be surjective");
        assert!(lifting.certificate.all_pass());
        // composite is a 2 x (2 * closure) rational matrix commuting with
        // the actions; rank was already checked by is_nice
        assert_eq!(lifting.map.matrix.rows(), 2);
    }

    #[test]
    fn lift_object_action_rejects_nongenerating_seed() {
        let cat = FinVecQCat;
        let space = finvecq::VecSpace { dim: 2 };
        let phi = ObjectAction::<FinVecQCat>::tabulate(
            Monoid::trivial(),
            bound(8),
            space,
            |_| Some(cat.identity(&finvecq::VecSpace { dim: 2 })),
        );
        let seeds = vec![finvecq::VecElem(vec![rat(1, 1), rat(0, 1)])];
        let err = lift_object_action(&cat, NiceEpiMode::Surjective, &phi, &seeds, &bound(16));
        assert!(matches!(err, Err(FreecatError::DoesNotGenerate(_))));
    }

    #[test]
    fn enlarge_generating_set_keeps_generating() {
        let cat = FinVecQCat;
        let a = finvecq::VecSpace { dim: 2 };
        let basis = vec![Point::label("a"), Point::label("b")];
        let e0 = finvecq::VecElem(vec![rat(1, 1), rat(0, 1)]);
        let e1 = finvecq::VecElem(vec![rat(0, 1), rat(1, 1)]);
        let f: BTreeMap<Point, finvecq::VecElem> =
            [(Point::label("a"), e0.clone()), (Point::label("b"), e1.clone())].into();
        let half = finvecq::VecElem(vec![rat(1, 2), rat(0, 1)]);
        let superset = vec![e0, e1, half];
        assert!(enlarge_generating_set(
            &cat,
            NiceEpiMode::Surjective,
            &basis,
            &a,
            &f,
            &superset
        )
        .unwrap());
    }

    #[test]
    fn enlarge_generating_set_rejects_nongenerating_f() {
        let cat = FinVecQCat;
        let a = finvecq::VecSpace { dim: 2 };
        let basis = vec![Point::label("a")];
        let e0 = finvecq::VecElem(vec![rat(1, 1), rat(0, 1)]);
        let f: BTreeMap<Point, finvecq::VecElem> = [(Point::label("a"), e0.clone())].into();
        let err = enlarge_generating_set(
            &cat,
            NiceEpiMode::Surjective,
            &basis,
            &a,
            &f,
            &[e0],
        );
        assert!(matches!(err, Err(FreecatError::PreconditionViolated(_))));
    }

    #[test]
    fn law_suite_passes_on_all_instances() {
        let config = LawSuiteConfig::default();
        let ens_report = run_law_suite(&EnsCat, &config);
        assert!(ens_report.passed(), "{:?}", ens_report.laws());
        let mono_report = run_law_suite(&MonounaryCat::default(), &config);
        assert!(mono_report.passed(), "{:?}", mono_report.laws());
        let vec_report = run_law_suite(&FinVecQCat, &config);
        assert!(vec_report.passed(), "{:?}", vec_report.laws());
    }
}
