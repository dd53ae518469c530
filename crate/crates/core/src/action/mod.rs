//! Monoid actions on set carriers and their liftings.
//!
//! An action is stored as an evaluation table over the enumeration bound, so
//! law checks and certificates have total visibility of what was verified.
//! The free action `zeta` on `M x S` (rule `m.<a,s> = <m.a, s>`) is kept
//! symbolic: its rule is total because monoid multiplication is, and its
//! carrier grows past the bound as needed, up to a hard cap.

mod carrier;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cert::{CertSquare, Certificate};
use crate::monoid::{EnumerationBound, Monoid, MonoidElement, MonoidError};

pub use carrier::{Point, SetCarrier, SetFun};

/// Hard cap on materialized zeta carriers; guards closure loops over
/// genuinely infinite carriers.
pub const DEFAULT_HARD_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("duplicate carrier label {0:?}")]
    DuplicateLabel(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("point {0} is not in the enumerated carrier")]
    PointNotInCarrier(String),
    #[error("element {0} is not among the enumerated monoid elements")]
    ElementNotEnumerated(String),
    #[error("cannot parse {0:?} as a carrier point")]
    UnparsablePoint(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

fn bound_desc(bound: &EnumerationBound) -> String {
    format!(
        "max_elements={}, max_word_length={}",
        bound.max_elements, bound.max_word_length
    )
}

/// An action of a monoid on a set carrier, tabulated over the bound.
///
/// The table maps every enumerated monoid element and every enumerated
/// carrier point to an image point. Images may lie beyond the enumerated
/// part of an infinite carrier; squares that would need to evaluate such
/// points are skipped and counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMAction {
    pub monoid: Monoid,
    pub carrier: SetCarrier,
    pub bound: EnumerationBound,
    elements: Vec<MonoidElement>,
    points: Vec<Point>,
    table: BTreeMap<MonoidElement, BTreeMap<Point, Point>>,
}

impl SetMAction {
    /// Tabulate an action from its evaluation rule.
    pub fn from_rule(
        monoid: Monoid,
        carrier: SetCarrier,
        bound: EnumerationBound,
        rule: impl Fn(&MonoidElement, &Point) -> Point,
    ) -> Result<Self, ActionError> {
        carrier.validate()?;
        let elements = monoid.enumerate(&bound);
        let points = carrier.enumerate(&bound);
        if points.is_empty() {
            return Err(ActionError::EmptyCarrier);
        }
        let mut table = BTreeMap::new();
        for m in &elements {
            let mut row = BTreeMap::new();
            for x in &points {
                row.insert(x.clone(), rule(m, x));
            }
            table.insert(m.clone(), row);
        }
        Ok(SetMAction { monoid, carrier, bound, elements, points, table })
    }

    /// Build from an explicit table (external JSON form).
    pub fn from_table(
        monoid: Monoid,
        carrier: SetCarrier,
        bound: EnumerationBound,
        table: BTreeMap<MonoidElement, BTreeMap<Point, Point>>,
    ) -> Result<Self, ActionError> {
        carrier.validate()?;
        let elements = monoid.enumerate(&bound);
        let points = carrier.enumerate(&bound);
        if points.is_empty() {
            return Err(ActionError::EmptyCarrier);
        }
        for m in &elements {
            let row = table
                .get(m)
                .ok_or_else(|| ActionError::ElementNotEnumerated(m.to_string()))?;
            for x in &points {
                if !row.contains_key(x) {
                    return Err(ActionError::PointNotInCarrier(x.to_string()));
                }
            }
        }
        Ok(SetMAction { monoid, carrier, bound, elements, points, table })
    }

    pub fn elements(&self) -> &[MonoidElement] {
        &self.elements
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Evaluate `m^psi . x` from the table.
    pub fn act(&self, m: &MonoidElement, x: &Point) -> Result<&Point, ActionError> {
        let row = self
            .table
            .get(m)
            .ok_or_else(|| ActionError::ElementNotEnumerated(m.to_string()))?;
        row.get(x)
            .ok_or_else(|| ActionError::PointNotInCarrier(x.to_string()))
    }

    /// Identity and composition laws over the bound. Squares that would need
    /// products or images beyond the bound are skipped.
    pub fn check_action_laws(&self) -> ActionLawReport {
        let mut report = ActionLawReport::default();
        let one = self.monoid.identity();
        for x in &self.points {
            match self.act(&one, x) {
                Ok(y) if y == x => report.identity_checked += 1,
                Ok(_) => report.identity_failures.push(x.clone()),
                Err(_) => report.skipped += 1,
            }
        }
        for m0 in &self.elements {
            for m1 in &self.elements {
                let Ok(prod) = self.monoid.multiply(m0, m1) else {
                    report.skipped += 1;
                    continue;
                };
                if !self.table.contains_key(&prod) {
                    report.skipped += self.points.len();
                    continue;
                }
                for x in &self.points {
                    let lhs = self.act(&prod, x);
                    let rhs = self.act(m1, x).and_then(|y| self.act(m0, y));
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) => {
                            if l == r {
                                report.composition_checked += 1;
                            } else {
                                report.composition_failures.push((
                                    m0.clone(),
                                    m1.clone(),
                                    x.clone(),
                                ));
                            }
                        }
                        _ => report.skipped += 1,
                    }
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionLawReport {
    pub identity_checked: usize,
    pub composition_checked: usize,
    pub skipped: usize,
    pub identity_failures: Vec<Point>,
    pub composition_failures: Vec<(MonoidElement, MonoidElement, Point)>,
}

impl ActionLawReport {
    pub fn passed(&self) -> bool {
        self.identity_failures.is_empty() && self.composition_failures.is_empty()
    }
}

/// The free action `zeta_S` of a monoid on `M x S`.
///
/// Kept symbolic: `act` never consults a table, so products past the
/// enumeration bound are admitted as canonical pair points.
#[derive(Debug, Clone)]
pub struct ZetaAction {
    pub monoid: Monoid,
    pub base: SetCarrier,
    pub bound: EnumerationBound,
    pairs: Vec<Point>,
    base_points: Vec<Point>,
    elements: Vec<MonoidElement>,
}

impl ZetaAction {
    pub fn new(
        monoid: Monoid,
        base: SetCarrier,
        bound: EnumerationBound,
    ) -> Result<Self, ActionError> {
        Self::with_cap(monoid, base, bound, DEFAULT_HARD_CAP)
    }

    pub fn with_cap(
        monoid: Monoid,
        base: SetCarrier,
        bound: EnumerationBound,
        hard_cap: usize,
    ) -> Result<Self, ActionError> {
        base.validate()?;
        let base_points = base.enumerate(&bound);
        if base_points.is_empty() {
            return Err(ActionError::EmptyCarrier);
        }
        let elements = monoid.enumerate(&bound);
        let n_pairs = elements.len().saturating_mul(base_points.len());
        // carrier plus one-step images is what certificates touch
        if n_pairs.saturating_mul(1 + elements.len()) > hard_cap {
            return Err(ActionError::BoundExceeded(format!(
                "zeta carrier would need more than {hard_cap} points"
            )));
        }
        let mut pairs = Vec::with_capacity(n_pairs);
        for a in &elements {
            for s in &base_points {
                pairs.push(Point::pair(a.clone(), s.clone()));
            }
        }
        Ok(ZetaAction { monoid, base, bound, pairs, base_points, elements })
    }

    /// Enumerated carrier pairs `<a, s>`.
    pub fn pairs(&self) -> &[Point] {
        &self.pairs
    }

    pub fn base_points(&self) -> &[Point] {
        &self.base_points
    }

    pub fn elements(&self) -> &[MonoidElement] {
        &self.elements
    }

    /// `m^zeta <a, s> = <m.a, s>`.
    pub fn act(&self, m: &MonoidElement, p: &Point) -> Result<Point, ActionError> {
        let Point::Pair(a, s) = p else {
            return Err(ActionError::PointNotInCarrier(p.to_string()));
        };
        let prod = self.monoid.multiply(m, a)?;
        Ok(Point::pair(prod, (**s).clone()))
    }

    /// The unit `eta_S(s) = <1, s>`.
    pub fn unit(&self, s: &Point) -> Point {
        Point::pair(self.monoid.identity(), s.clone())
    }

}

/// A certified morphism of actions: the map, the checked squares, and
/// whether every enumerated target point has an enumerated preimage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifting {
    pub map: SetFun,
    pub certificate: Certificate,
    pub surjective_on_bound: bool,
}

/// The free action on `M x S` (the object part of the functor `zeta`).
pub fn zeta_of_set(
    monoid: &Monoid,
    base: &SetCarrier,
    bound: &EnumerationBound,
) -> Result<ZetaAction, ActionError> {
    ZetaAction::new(monoid.clone(), base.clone(), *bound)
}

/// The morphism part of `zeta`: `zeta f <a, s> = <a, f(s)>`, certified to
/// commute with the two free actions on the bound.
pub fn zeta_of_map(
    monoid: &Monoid,
    source: &ZetaAction,
    target: &ZetaAction,
    f: &SetFun,
) -> Result<Lifting, ActionError> {
    if source.monoid != *monoid || target.monoid != *monoid {
        return Err(ActionError::ElementNotEnumerated(
            "zeta actions must share the acting monoid".into(),
        ));
    }
    let mut map = SetFun::new();
    for p in source.pairs() {
        let Point::Pair(a, s) = p else { unreachable!("zeta carrier holds pairs") };
        let fs = f.apply(s)?;
        map.insert(p.clone(), Point::pair(a.clone(), fs.clone()));
    }
    let mut cert = Certificate::new(bound_desc(&source.bound));
    for m in source.elements() {
        for p in source.pairs() {
            // zeta f (m^zeta_S p) vs m^zeta_T (zeta f p): both symbolic.
            let moved = source.act(m, p)?;
            let Point::Pair(ma, s) = &moved else { unreachable!() };
            let lhs = Point::pair(ma.clone(), f.apply(s)?.clone());
            let rhs = target.act(m, map.apply(p)?)?;
            cert.push(CertSquare::new(
                m.to_string(),
                p.to_string(),
                lhs.to_string(),
                rhs.to_string(),
            ));
        }
    }
    let surjective = {
        let image: BTreeSet<&Point> = map.iter().map(|(_, v)| v).collect();
        target.pairs().iter().all(|p| image.contains(p))
    };
    Ok(Lifting { map, certificate: cert, surjective_on_bound: surjective })
}

/// Lift an action `psi` on `S` to the free action `zeta_S` via the
/// surjection `q<a, s> = a^psi . s`.
pub fn lift_action_to_zeta(psi: &SetMAction) -> Result<(ZetaAction, Lifting), ActionError> {
    let zeta = ZetaAction::new(psi.monoid.clone(), psi.carrier.clone(), psi.bound)?;
    let mut map = SetFun::new();
    for p in zeta.pairs() {
        let Point::Pair(a, s) = p else { unreachable!() };
        let image = psi.act(a, s)?;
        map.insert(p.clone(), image.clone());
    }
    let mut cert = Certificate::new(bound_desc(&psi.bound));
    for m in zeta.elements() {
        for p in zeta.pairs() {
            // q(m^zeta <a,s>) = (m.a)^psi s  vs  m^psi (q<a,s>) = m^psi (a^psi s)
            let moved = zeta.act(m, p)?;
            let Point::Pair(ma, s) = &moved else { unreachable!() };
            let lhs = match psi.act(ma, s) {
                Ok(v) => v.clone(),
                Err(_) => {
                    cert.skip();
                    continue;
                }
            };
            let qx = map.apply(p)?;
            let rhs = match psi.act(m, qx) {
                Ok(v) => v.clone(),
                Err(_) => {
                    cert.skip();
                    continue;
                }
            };
            cert.push(CertSquare::new(
                m.to_string(),
                p.to_string(),
                lhs.to_string(),
                rhs.to_string(),
            ));
        }
    }
    // q<1, s> = s, so q hits every enumerated point.
    let surjective = {
        let image: BTreeSet<&Point> = map.iter().map(|(_, v)| v).collect();
        psi.points().iter().all(|p| image.contains(p))
    };
    Ok((zeta, Lifting { map, certificate: cert, surjective_on_bound: surjective }))
}

/// A certified extension produced by [`counit_extension`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub map: SetFun,
    pub certificate: Certificate,
    /// Whether `ext . eta_S = f` held pointwise on the enumerated base.
    pub triangle_holds: bool,
}

/// Extend `f: S -> X` to the homomorphism `zeta_S -> (X, phi)` given by
/// `ext<a, s> = a^phi . f(s)`, and verify the unit triangle.
pub fn counit_extension(
    phi: &SetMAction,
    base: &SetCarrier,
    f: &SetFun,
) -> Result<Extension, ActionError> {
    base.validate()?;
    let zeta = ZetaAction::new(phi.monoid.clone(), base.clone(), phi.bound)?;
    let mut map = SetFun::new();
    for p in zeta.pairs() {
        let Point::Pair(a, s) = p else { unreachable!() };
        let fs = f.apply(s)?;
        let image = phi.act(a, fs)?;
        map.insert(p.clone(), image.clone());
    }
    let mut cert = Certificate::new(bound_desc(&phi.bound));
    for m in zeta.elements() {
        for p in zeta.pairs() {
            let moved = zeta.act(m, p)?;
            let Point::Pair(ma, s) = &moved else { unreachable!() };
            let lhs = match f.apply(s).and_then(|fs| phi.act(ma, fs)) {
                Ok(v) => v.clone(),
                Err(_) => {
                    cert.skip();
                    continue;
                }
            };
            let rhs = match phi.act(m, map.apply(p)?) {
                Ok(v) => v.clone(),
                Err(_) => {
                    cert.skip();
                    continue;
                }
            };
            cert.push(CertSquare::new(
                m.to_string(),
                p.to_string(),
                lhs.to_string(),
                rhs.to_string(),
            ));
        }
    }
    let triangle_holds = zeta.base_points().iter().all(|s| {
        let unit = zeta.unit(s);
        match (map.get(&unit), f.get(s)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    });
    Ok(Extension { map, certificate: cert, triangle_holds })
}

/// Check a candidate homomorphism against the canonical extension: by
/// uniqueness it must agree on every enumerated pair, so `false` indicates a
/// broken candidate.
pub fn verify_extension_uniqueness(
    phi: &SetMAction,
    base: &SetCarrier,
    f: &SetFun,
    candidate: &SetFun,
) -> Result<bool, ActionError> {
    let canonical = counit_extension(phi, base, f)?;
    for (p, v) in canonical.map.iter() {
        match candidate.get(p) {
            Some(w) if w == v => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Result of closing a seed set under all enumerated monoid elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClosure {
    pub points: BTreeSet<Point>,
    /// True when an orbit left the enumerated carrier before stabilizing.
    pub truncated: bool,
}

/// Smallest enumerated-invariant superset of `seed`, with a truncation flag
/// when the closure escapes the enumerated carrier.
pub fn orbit_closure(
    phi: &SetMAction,
    seed: &BTreeSet<Point>,
) -> Result<OrbitClosure, ActionError> {
    if seed.is_empty() {
        return Err(ActionError::EmptyCarrier);
    }
    for p in seed {
        if !phi.points().contains(p) {
            return Err(ActionError::PointNotInCarrier(p.to_string()));
        }
    }
    let mut points = seed.clone();
    let mut truncated = false;
    let mut work: Vec<Point> = seed.iter().cloned().collect();
    while let Some(x) = work.pop() {
        for m in phi.elements() {
            match phi.act(m, &x) {
                Ok(y) => {
                    if phi.points().contains(y) {
                        if points.insert(y.clone()) {
                            work.push(y.clone());
                        }
                    } else {
                        truncated = true;
                    }
                }
                Err(_) => truncated = true,
            }
        }
    }
    Ok(OrbitClosure { points, truncated })
}

/// Strict orbit closure: errors with `BoundExceeded` instead of truncating.
pub fn orbit_closure_strict(
    phi: &SetMAction,
    seed: &BTreeSet<Point>,
) -> Result<BTreeSet<Point>, ActionError> {
    let closure = orbit_closure(phi, seed)?;
    if closure.truncated {
        return Err(ActionError::BoundExceeded(
            "orbit closure does not stabilize within the carrier bound".into(),
        ));
    }
    Ok(closure.points)
}

/// External JSON form of an action:
/// `{"action": {"monoid": ..., "carrier": ..., "table": {"m": {"x": "y"}}}}`.
pub mod json {
    use super::*;
    use serde_json::{json, Map, Value};

    pub fn to_json(action: &SetMAction) -> Value {
        let mut table = Map::new();
        for m in action.elements() {
            let mut row = Map::new();
            for x in action.points() {
                let y = action.act(m, x).expect("tabulated");
                row.insert(x.to_string(), Value::String(y.to_string()));
            }
            table.insert(m.to_string(), Value::Object(row));
        }
        json!({
            "action": {
                "monoid": serde_json::to_value(&action.monoid).expect("monoid serializes"),
                "carrier": serde_json::to_value(&action.carrier).expect("carrier serializes"),
                "bound": serde_json::to_value(action.bound).expect("bound serializes"),
                "table": Value::Object(table),
            }
        })
    }

    pub fn from_json(v: &Value) -> Result<SetMAction, ActionError> {
        let obj = v
            .get("action")
            .ok_or_else(|| ActionError::UnparsablePoint("missing \"action\" key".into()))?;
        let monoid: Monoid = serde_json::from_value(
            obj.get("monoid")
                .cloned()
                .ok_or_else(|| ActionError::UnparsablePoint("missing monoid".into()))?,
        )
        .map_err(|e| ActionError::UnparsablePoint(e.to_string()))?;
        monoid.validate()?;
        let carrier: SetCarrier = serde_json::from_value(
            obj.get("carrier")
                .cloned()
                .ok_or_else(|| ActionError::UnparsablePoint("missing carrier".into()))?,
        )
        .map_err(|e| ActionError::UnparsablePoint(e.to_string()))?;
        let bound: EnumerationBound = match obj.get("bound") {
            Some(b) => serde_json::from_value(b.clone())
                .map_err(|e| ActionError::UnparsablePoint(e.to_string()))?,
            None => EnumerationBound::default(),
        };
        let table_val = obj
            .get("table")
            .and_then(Value::as_object)
            .ok_or_else(|| ActionError::UnparsablePoint("missing table".into()))?;
        let mut table = BTreeMap::new();
        for (m_str, row_val) in table_val {
            let m = monoid.parse_element(m_str)?;
            let row_obj = row_val
                .as_object()
                .ok_or_else(|| ActionError::UnparsablePoint(m_str.clone()))?;
            let mut row = BTreeMap::new();
            for (x_str, y_val) in row_obj {
                let x = Point::parse_in(&monoid, x_str)?;
                let y_str = y_val
                    .as_str()
                    .ok_or_else(|| ActionError::UnparsablePoint(x_str.clone()))?;
                row.insert(x, Point::parse_in(&monoid, y_str)?);
            }
            table.insert(m, row);
        }
        SetMAction::from_table(monoid, carrier, bound, table)
    }
}
