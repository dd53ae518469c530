//! Functional-digraph analysis of described self-maps.
//!
//! The canonical universal map `nu<m,n> = <m+1,n>` lives here, together with
//! the lifting `q<m,n> = f^m(s_n)` of any finite target onto it, the decision
//! procedure for surjective universality (infinitely many components, all of
//! them natural), the fixed-point lifting for maps with infinitely many
//! natural components, and an independent backtracking oracle used to
//! cross-check verdicts on small instances.

mod template;

use std::collections::BTreeSet;

pub use template::{
    ComponentSlot, ComponentTemplate, ComponentVertex, EventuallyPeriodic, Family, GraphError,
    Multiplicity, SelfMapDescription, TreeSpec, Truncation,
};

use crate::cert::{CertSquare, Certificate};

/// The shift on pairs of naturals: injective, every orbit infinite.
pub fn nu_step(m: u64, n: u64) -> (u64, u64) {
    (m + 1, n)
}

/// A finite (or truncated) self-map target: labeled points and an image
/// table, with `None` marking images outside the truncation.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TargetMap {
    pub points: Vec<String>,
    #[serde(rename = "map")]
    pub image: Vec<Option<usize>>,
}

impl TargetMap {
    pub fn total(points: Vec<String>, image: Vec<usize>) -> Result<Self, GraphError> {
        let t = TargetMap { points, image: image.into_iter().map(Some).collect() };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.points.is_empty() {
            return Err(GraphError::EmptyCarrier);
        }
        if self.points.len() != self.image.len() {
            return Err(GraphError::InvalidTarget(
                "points and map must have the same length".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for p in &self.points {
            if !seen.insert(p) {
                return Err(GraphError::InvalidTarget(format!("duplicate point {p:?}")));
            }
        }
        if self.image.iter().flatten().any(|&i| i >= self.points.len()) {
            return Err(GraphError::InvalidTarget("image index out of range".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_total(&self) -> bool {
        self.image.iter().all(Option::is_some)
    }

    pub fn apply(&self, i: usize) -> Option<usize> {
        self.image.get(i).copied().flatten()
    }

    /// `f^m(i)`, while the iterates stay inside the truncation.
    pub fn iterate(&self, i: usize, m: u64) -> Option<usize> {
        let mut cur = i;
        for _ in 0..m {
            cur = self.apply(cur)?;
        }
        Some(cur)
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.points.len()).filter(|&i| self.apply(i) == Some(i))
    }

    /// Number of weak components of the graph of a total map.
    pub fn component_count(&self) -> Option<usize> {
        if !self.is_total() {
            return None;
        }
        let n = self.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..n {
            let j = self.apply(i).expect("total");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
        let roots: BTreeSet<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Some(roots.len())
    }
}

/// The lifting of a finite target onto `nu`: `q<m,n> = f^m(s_n)`.
#[derive(Debug, Clone)]
pub struct NuLifting {
    pub depth: u64,
    /// `columns[n][m] = q<m,n>` as an index into the target points.
    pub columns: Vec<Vec<Option<usize>>>,
    pub certificate: Certificate,
    pub surjective_on_bound: bool,
}

impl NuLifting {
    pub fn eval(&self, m: u64, n: u64) -> Option<usize> {
        self.columns.get(n as usize)?.get(m as usize).copied().flatten()
    }
}

/// Lift a finite or bound-enumerated self-map to `nu`, certified on the
/// evaluated rectangle `m < depth, n < |S|`. Surjective because row zero
/// enumerates the carrier.
pub fn lift_finite_map_to_nu(target: &TargetMap, depth: u64) -> Result<NuLifting, GraphError> {
    target.validate()?;
    let mut columns = Vec::with_capacity(target.len());
    for n in 0..target.len() {
        let mut col = Vec::with_capacity(depth as usize);
        let mut cur = Some(n);
        for _ in 0..depth {
            col.push(cur);
            cur = cur.and_then(|i| target.apply(i));
        }
        columns.push(col);
    }
    let mut cert = Certificate::new(format!("depth={depth}, columns={}", target.len()));
    for (n, col) in columns.iter().enumerate() {
        for m in 0..depth.saturating_sub(1) {
            // q(nu<m,n>) = q<m+1,n>  vs  f(q<m,n>)
            let lhs = col[(m + 1) as usize];
            let rhs = col[m as usize].and_then(|i| target.apply(i));
            match (lhs, rhs) {
                (Some(l), Some(r)) => cert.push(CertSquare::new(
                    "nu",
                    format!("({m},{n})"),
                    target.points[l].clone(),
                    target.points[r].clone(),
                )),
                _ => cert.skip(),
            }
        }
    }
    let at_zero: BTreeSet<usize> = columns.iter().filter_map(|c| c[0]).collect();
    let surjective = at_zero.len() == target.len();
    Ok(NuLifting { depth, columns, certificate: cert, surjective_on_bound: surjective })
}

/// Classification of one component, per the grading argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentClass {
    Natural,
    HasCycle,
    UnboundedBelow,
}

impl std::fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentClass::Natural => write!(f, "natural"),
            ComponentClass::HasCycle => write!(f, "has_cycle"),
            ComponentClass::UnboundedBelow => write!(f, "unbounded_below"),
        }
    }
}

/// The level grading of a natural component, shifted so its minimum is zero;
/// on an infinite-depth component its image is all of the naturals.
#[derive(Debug, Clone)]
pub struct NaturalWitness {
    template: ComponentTemplate,
}

impl NaturalWitness {
    pub fn eval(&self, v: &ComponentVertex) -> Option<u64> {
        self.template.grading(v).map(|g| g as u64)
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: ComponentClass,
    /// For `HasCycle`: the vertices of the (unique) cycle.
    pub cycle: Option<Vec<usize>>,
    /// For `Natural`: the grading witness onto the naturals.
    pub witness: Option<NaturalWitness>,
}

/// Classify a component template, emitting the witness data used by the
/// universality argument in either direction.
pub fn classify_component(template: &ComponentTemplate) -> Result<Classification, GraphError> {
    template.validate()?;
    Ok(match template {
        ComponentTemplate::FiniteCore { edges } => Classification {
            class: ComponentClass::HasCycle,
            cycle: Some(find_cycle(edges)),
            witness: None,
        },
        ComponentTemplate::ZChain { .. } => Classification {
            class: ComponentClass::UnboundedBelow,
            cycle: None,
            witness: None,
        },
        ComponentTemplate::Natural { .. } => Classification {
            class: ComponentClass::Natural,
            cycle: None,
            witness: Some(NaturalWitness { template: template.clone() }),
        },
    })
}

/// The unique cycle of a connected finite functional graph.
fn find_cycle(edges: &[usize]) -> Vec<usize> {
    let mut seen_at = vec![usize::MAX; edges.len()];
    let mut walk = Vec::new();
    let mut cur = 0usize;
    loop {
        if seen_at[cur] != usize::MAX {
            return walk[seen_at[cur]..].to_vec();
        }
        seen_at[cur] = walk.len();
        walk.push(cur);
        cur = edges[cur];
    }
}

/// Whether a finite functional graph admits a grading `r(f x) = r(x) + 1`.
/// Decided exactly by offset union-find; a cycle of length `c` forces the
/// contradiction `r(x) = r(x) + c`.
pub fn grading_exists(edges: &[usize]) -> bool {
    let n = edges.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut offset: Vec<i64> = vec![0; n]; // r(x) - r(parent(x))
    fn find(parent: &mut [usize], offset: &mut [i64], x: usize) -> (usize, i64) {
        if parent[x] == x {
            return (x, 0);
        }
        let (root, off) = find(parent, offset, parent[x]);
        parent[x] = root;
        offset[x] += off;
        (root, offset[x])
    }
    for (x, &y) in edges.iter().enumerate() {
        let (rx, ox) = find(&mut parent, &mut offset, x);
        let (ry, oy) = find(&mut parent, &mut offset, y);
        if rx == ry {
            if oy != ox + 1 {
                return false;
            }
        } else {
            // r(y) = r(x) + 1
            parent[ry] = rx;
            offset[ry] = ox + 1 - oy;
        }
    }
    true
}

/// How many components a description has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentCount {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for ComponentCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentCount::Finite(n) => write!(f, "{n} components"),
            ComponentCount::Infinite => write!(f, "omega components"),
        }
    }
}

/// Identifies a template within a description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentId {
    Single(usize),
    Family(usize),
}

impl std::fmt::Display for ComponentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentId::Single(i) => write!(f, "component {i}"),
            ComponentId::Family(i) => write!(f, "family {i}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Counterexample {
    CyclicComponent { id: ComponentId, cycle_len: usize },
    ZChainComponent { id: ComponentId },
    FiniteComponentCount(u64),
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Counterexample::CyclicComponent { id, cycle_len } => {
                write!(f, "{id} has_cycle (length {cycle_len})")
            }
            Counterexample::ZChainComponent { id } => write!(f, "{id} unbounded_below"),
            Counterexample::FiniteComponentCount(n) => {
                write!(f, "only {n} components")
            }
        }
    }
}

/// Verdict of the universality decision: universal iff the component count
/// is infinite and every component is natural.
#[derive(Debug, Clone)]
pub struct UniversalityVerdict {
    pub is_universal: bool,
    pub condition_i: bool,
    pub component_count: ComponentCount,
    pub condition_w: Vec<(ComponentId, ComponentClass)>,
    pub witness: Option<UniversalWitness>,
    pub counterexample: Option<Counterexample>,
}

/// Decide surjective universality of a described self-map.
pub fn decide_universality(
    description: &SelfMapDescription,
) -> Result<UniversalityVerdict, GraphError> {
    description.validate()?;
    let component_count = match description.component_count() {
        Some(n) => ComponentCount::Finite(n),
        None => ComponentCount::Infinite,
    };
    let condition_i = matches!(component_count, ComponentCount::Infinite);

    let mut condition_w = Vec::new();
    let mut counterexample = None;
    {
        let mut realized = |id: ComponentId, template: &ComponentTemplate, live: bool| {
            let class = classify_component(template)?;
            if live && counterexample.is_none() {
                match class.class {
                    ComponentClass::HasCycle => {
                        counterexample = Some(Counterexample::CyclicComponent {
                            id,
                            cycle_len: class.cycle.as_ref().map_or(0, Vec::len),
                        });
                    }
                    ComponentClass::UnboundedBelow => {
                        counterexample = Some(Counterexample::ZChainComponent { id });
                    }
                    ComponentClass::Natural => {}
                }
            }
            condition_w.push((id, class.class));
            Ok::<(), GraphError>(())
        };
        for (i, c) in description.components.iter().enumerate() {
            realized(ComponentId::Single(i), c, true)?;
        }
        for (i, f) in description.families.iter().enumerate() {
            let live = !matches!(f.multiplicity, Multiplicity::Finite(0));
            realized(ComponentId::Family(i), &f.template, live)?;
        }
    }
    if counterexample.is_none() && !condition_i {
        let ComponentCount::Finite(n) = component_count else { unreachable!() };
        counterexample = Some(Counterexample::FiniteComponentCount(n));
    }
    let is_universal = condition_i && counterexample.is_none();
    Ok(UniversalityVerdict {
        is_universal,
        condition_i,
        component_count,
        condition_w,
        witness: is_universal
            .then(|| UniversalWitness { description: description.clone() }),
        counterexample,
    })
}

/// A lifting evaluated on a truncation of a described self-map.
#[derive(Debug, Clone)]
pub struct DescribedLifting {
    pub truncation: Truncation,
    /// Target point index per truncated vertex.
    pub assignment: Vec<usize>,
    pub certificate: Certificate,
    pub surjective_on_bound: bool,
}

fn certify_assignment(
    truncation: &Truncation,
    target: &TargetMap,
    assignment: &[usize],
    bound: String,
) -> Certificate {
    let mut cert = Certificate::new(bound);
    for (v, img) in truncation.image.iter().enumerate() {
        let Some(u) = img else {
            cert.skip();
            continue;
        };
        let lhs = assignment[*u];
        match target.apply(assignment[v]) {
            Some(rhs) => cert.push(CertSquare::new(
                "w",
                truncation.vertex_name(v),
                target.points[lhs].clone(),
                target.points[rhs].clone(),
            )),
            None => cert.skip(),
        }
    }
    cert
}

/// The constructive surjection recipe carried by a universal verdict: the
/// projection `p(x) = <level(x), n>` onto pairs of naturals, composed with
/// `q<m,n> = f^m(s_n)` onto any queried target.
#[derive(Debug, Clone)]
pub struct UniversalWitness {
    description: SelfMapDescription,
}

impl UniversalWitness {
    /// Project a truncated vertex to `<level, component index>`; the
    /// component index is the vertex's slot position in the deterministic
    /// component enumeration.
    pub fn project(&self, truncation: &Truncation, vertex: usize) -> Option<(u64, u64)> {
        let (slot_idx, v) = &truncation.vertices[vertex];
        let template = self.description.template_of(&truncation.slots[*slot_idx]);
        let level = template.grading(v)?;
        Some((level as u64, *slot_idx as u64))
    }

    /// Lift a finite total target through this universal map: vertex `x` in
    /// component `n` goes to `f^{level(x)}(s_{n mod |S|})`.
    pub fn onto(
        &self,
        target: &TargetMap,
        depth: u64,
        max_components: usize,
    ) -> Result<DescribedLifting, GraphError> {
        target.validate()?;
        if !target.is_total() {
            return Err(GraphError::InvalidTarget(
                "universality lifting needs a total target".into(),
            ));
        }
        let truncation = Truncation::new(&self.description, depth, max_components)?;
        if truncation.is_empty() {
            return Err(GraphError::EmptyCarrier);
        }
        let mut assignment = Vec::with_capacity(truncation.len());
        for v in 0..truncation.len() {
            let (level, n) = self
                .project(&truncation, v)
                .expect("universal components are graded");
            let seed = (n as usize) % target.len();
            let value = target
                .iterate(seed, level)
                .expect("total targets iterate everywhere");
            assignment.push(value);
        }
        let cert = certify_assignment(
            &truncation,
            target,
            &assignment,
            format!("depth={depth}, components={}", truncation.slots.len()),
        );
        let hit: BTreeSet<usize> = assignment.iter().copied().collect();
        Ok(DescribedLifting {
            surjective_on_bound: hit.len() == target.len(),
            truncation,
            assignment,
            certificate: cert,
        })
    }
}

/// Lift a finite self-map with a fixed point through a described map with
/// infinitely many natural components: the natural part (minus one reserved
/// component when everything is natural) lifts the target seeded by the
/// non-fixed points, and the remainder collapses onto the fixed point.
pub fn lift_with_fixed_point(
    description: &SelfMapDescription,
    target: &TargetMap,
    designated: Option<usize>,
    depth: u64,
    max_components: usize,
) -> Result<DescribedLifting, GraphError> {
    description.validate()?;
    target.validate()?;
    if !target.is_total() {
        return Err(GraphError::InvalidTarget(
            "fixed-point lifting needs a total target".into(),
        ));
    }
    let s0 = match designated {
        Some(i) => {
            if target.apply(i) != Some(i) {
                return Err(GraphError::NoFixedPoint);
            }
            i
        }
        None => target.fixed_points().next().ok_or(GraphError::NoFixedPoint)?,
    };
    let has_omega_natural = description.families.iter().any(|f| {
        matches!(f.multiplicity, Multiplicity::Omega)
            && matches!(f.template, ComponentTemplate::Natural { .. })
    });
    if !has_omega_natural {
        return Err(GraphError::NotEnoughNaturalComponents);
    }

    let truncation = Truncation::new(description, depth, max_components)?;
    let natural_slot = |slot: &ComponentSlot| {
        matches!(description.template_of(slot), ComponentTemplate::Natural { .. })
    };
    let all_natural = description
        .components
        .iter()
        .all(|c| matches!(c, ComponentTemplate::Natural { .. }))
        && description.families.iter().all(|f| {
            matches!(f.template, ComponentTemplate::Natural { .. })
                || matches!(f.multiplicity, Multiplicity::Finite(0))
        });
    // when the natural part is everything, leave out one natural component
    // and send it to the fixed point
    let reserved: Option<usize> = if all_natural {
        truncation.slots.iter().position(natural_slot)
    } else {
        None
    };

    // participating natural components take column indices in slot order
    let mut column_of_slot: Vec<Option<usize>> = vec![None; truncation.slots.len()];
    let mut next_column = 0usize;
    for (i, slot) in truncation.slots.iter().enumerate() {
        if Some(i) == reserved || !natural_slot(slot) {
            continue;
        }
        column_of_slot[i] = Some(next_column);
        next_column += 1;
    }

    // the carrier minus the fixed point, cyclically re-enumerated
    let others: Vec<usize> = (0..target.len()).filter(|&i| i != s0).collect();

    let mut assignment = Vec::with_capacity(truncation.len());
    for (slot_idx, v) in &truncation.vertices {
        let value = match column_of_slot[*slot_idx] {
            Some(col) if !others.is_empty() => {
                let template = description.template_of(&truncation.slots[*slot_idx]);
                let level = template.grading(v).expect("natural components are graded") as u64;
                let seed = others[col % others.len()];
                target.iterate(seed, level).expect("total target")
            }
            _ => s0,
        };
        assignment.push(value);
    }
    let cert = certify_assignment(
        &truncation,
        target,
        &assignment,
        format!("depth={depth}, components={}", truncation.slots.len()),
    );
    let hit: BTreeSet<usize> = assignment.iter().copied().collect();
    Ok(DescribedLifting {
        surjective_on_bound: hit.len() == target.len(),
        truncation,
        assignment,
        certificate: cert,
    })
}

/// Outcome of the independent search oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Yes { assignment: Vec<usize> },
    No { reason: String },
    Inconclusive,
}

impl OracleOutcome {
    pub fn is_no(&self) -> bool {
        matches!(self, OracleOutcome::No { .. })
    }
}

/// Default node budget for the backtracking search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

/// Exhaustive/backtracking search for a surjection `q` with `q . w = f . q`
/// on a truncation of `w`.
///
/// `Yes` carries a witness assignment whose interior squares all commute.
/// `No` is only returned when it is sound globally: either no equivariant
/// assignment exists at all on the truncation (any global lifting would
/// restrict to one), or the truncation is complete, or the description has
/// fewer components than the target (an equivariant image of a component
/// stays inside one target component). Anything blocked by the truncation
/// boundary is `Inconclusive`.
pub fn brute_force_lifting_exists(
    description: &SelfMapDescription,
    target: &TargetMap,
    depth: u64,
    max_components: usize,
) -> Result<OracleOutcome, GraphError> {
    brute_force_with_budget(description, target, depth, max_components, DEFAULT_SEARCH_BUDGET)
}

pub fn brute_force_with_budget(
    description: &SelfMapDescription,
    target: &TargetMap,
    depth: u64,
    max_components: usize,
    budget: u64,
) -> Result<OracleOutcome, GraphError> {
    description.validate()?;
    target.validate()?;
    if !target.is_total() {
        return Err(GraphError::InvalidTarget("oracle needs a total target".into()));
    }
    if description.is_empty_carrier() {
        return Ok(OracleOutcome::No { reason: "empty source carrier".into() });
    }
    if let Some(k) = description.component_count() {
        let l = target.component_count().expect("total target") as u64;
        if k < l {
            return Ok(OracleOutcome::No {
                reason: format!(
                    "source has {k} components but the target graph has {l}; \
                     an equivariant image of a component stays in one target component"
                ),
            });
        }
    }
    let truncation = Truncation::new(description, depth, max_components)?;
    let mut search = Search::new(&truncation, target, budget);
    if let Some(assignment) = search.run(true) {
        return Ok(OracleOutcome::Yes { assignment });
    }
    if search.exhausted {
        return Ok(OracleOutcome::Inconclusive);
    }
    let consistent = search.run(false).is_some();
    if search.exhausted {
        return Ok(OracleOutcome::Inconclusive);
    }
    if !consistent {
        return Ok(OracleOutcome::No {
            reason: "no equivariant assignment exists on the truncation".into(),
        });
    }
    if truncation.complete {
        return Ok(OracleOutcome::No {
            reason: "equivariant maps exist but none is surjective, and the truncation \
                     is the whole carrier"
                .into(),
        });
    }
    Ok(OracleOutcome::Inconclusive)
}

/// Backtracking with forward propagation along `q(w x) = f(q x)`.
struct Search<'a> {
    truncation: &'a Truncation,
    target: &'a TargetMap,
    order: Vec<usize>,
    assignment: Vec<Option<usize>>,
    usage: Vec<usize>,
    unused_values: usize,
    assigned: usize,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(truncation: &'a Truncation, target: &'a TargetMap, budget: u64) -> Self {
        // Process boundary-near vertices first (descending level), so each
        // later choice is immediately checked against its assigned image.
        let mut order: Vec<usize> = (0..truncation.len()).collect();
        let rank = |i: usize| -> (usize, i64, i64) {
            let (slot, v) = &truncation.vertices[i];
            match v {
                ComponentVertex::Core(j) => (*slot, 0, *j as i64),
                ComponentVertex::Level { level, index } => {
                    (*slot, -(*level as i64), *index as i64)
                }
                ComponentVertex::Spine(z) => (*slot, -z, 0),
                ComponentVertex::TreeNode { level, node } => {
                    // after the spine vertex of this level, shallow nodes first
                    (*slot, -level, 1 + *node as i64)
                }
            }
        };
        order.sort_by_key(|&i| rank(i));
        Search {
            truncation,
            target,
            order,
            assignment: vec![None; truncation.len()],
            usage: vec![0; target.len()],
            unused_values: target.len(),
            assigned: 0,
            budget,
            exhausted: false,
        }
    }

    fn run(&mut self, require_surjective: bool) -> Option<Vec<usize>> {
        self.assignment.fill(None);
        self.usage.fill(0);
        self.unused_values = self.target.len();
        self.assigned = 0;
        if self.search(0, require_surjective) {
            Some(self.assignment.iter().map(|a| a.expect("complete")).collect())
        } else {
            None
        }
    }

    fn set(&mut self, v: usize, t: usize, trail: &mut Vec<usize>) {
        self.assignment[v] = Some(t);
        if self.usage[t] == 0 {
            self.unused_values -= 1;
        }
        self.usage[t] += 1;
        self.assigned += 1;
        trail.push(v);
    }

    fn undo(&mut self, trail: &[usize]) {
        for &v in trail {
            let t = self.assignment[v].take().expect("was set");
            self.usage[t] -= 1;
            if self.usage[t] == 0 {
                self.unused_values += 1;
            }
            self.assigned -= 1;
        }
    }

    /// Assign `q(v) = t` and propagate forward along the image chain.
    fn try_assign(&mut self, v: usize, t: usize, trail: &mut Vec<usize>) -> bool {
        self.set(v, t, trail);
        let mut cur = v;
        loop {
            let Some(next) = self.truncation.image[cur] else { return true };
            let want = self
                .target
                .apply(self.assignment[cur].expect("assigned"))
                .expect("total target");
            match self.assignment[next] {
                Some(have) => return have == want,
                None => {
                    self.set(next, want, trail);
                    cur = next;
                }
            }
        }
    }

    fn search(&mut self, mut pos: usize, require_surjective: bool) -> bool {
        if self.budget == 0 {
            self.exhausted = true;
            return false;
        }
        while pos < self.order.len() && self.assignment[self.order[pos]].is_some() {
            pos += 1;
        }
        if pos == self.order.len() {
            return !require_surjective || self.unused_values == 0;
        }
        if require_surjective {
            let remaining = self.truncation.len() - self.assigned;
            if self.unused_values > remaining {
                return false;
            }
        }
        let v = self.order[pos];
        // prefer values that are not yet in the image
        let mut candidates: Vec<usize> = (0..self.target.len()).collect();
        candidates.sort_by_key(|&t| (self.usage[t], t));
        for t in candidates {
            self.budget = self.budget.saturating_sub(1);
            let mut trail = Vec::new();
            if self.try_assign(v, t, &mut trail) && self.search(pos + 1, require_surjective) {
                return true;
            }
            self.undo(&trail);
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_target() -> TargetMap {
        TargetMap::total(vec!["a".into(), "b".into()], vec![1, 0]).unwrap()
    }

    #[test]
    fn nu_is_injective_on_evaluated_domain() {
        let mut seen = BTreeSet::new();
        for m in 0..20u64 {
            for n in 0..20u64 {
                assert!(seen.insert(nu_step(m, n)));
            }
        }
    }

    #[test]
    fn nu_lifting_identity_on_singleton() {
        let t = TargetMap::total(vec!["x".into()], vec![0]).unwrap();
        let l = lift_finite_map_to_nu(&t, 6).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.surjective_on_bound);
        for m in 0..6 {
            assert_eq!(l.eval(m, 0), Some(0));
        }
    }

    #[test]
    fn nu_lifting_of_swap_alternates() {
        let l = lift_finite_map_to_nu(&swap_target(), 6).unwrap();
        assert!(l.certificate.all_pass());
        for m in 0..6u64 {
            assert_eq!(l.eval(m, 0), Some((m % 2) as usize));
            assert_eq!(l.eval(m, 1), Some(((m + 1) % 2) as usize));
        }
    }

    #[test]
    fn nu_lifting_of_truncated_successor() {
        // successor on an initial segment of the naturals: q<m,n> = n + m
        let t = TargetMap {
            points: (0..4).map(|i| i.to_string()).collect(),
            image: vec![Some(1), Some(2), Some(3), None],
        };
        t.validate().unwrap();
        let l = lift_finite_map_to_nu(&t, 5).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.certificate.skipped > 0);
        for n in 0..4u64 {
            for m in 0..5u64 {
                let expect = (n + m < 4).then_some((n + m) as usize);
                assert_eq!(l.eval(m, n), expect, "q<{m},{n}>");
            }
        }
    }

    #[test]
    fn classify_loop_natural_and_zchain() {
        let loop1 = classify_component(&ComponentTemplate::loop_of(1)).unwrap();
        assert_eq!(loop1.class, ComponentClass::HasCycle);
        assert_eq!(loop1.cycle, Some(vec![0]));

        let nat = classify_component(&ComponentTemplate::natural_trivial()).unwrap();
        assert_eq!(nat.class, ComponentClass::Natural);
        let w = nat.witness.unwrap();
        assert_eq!(w.eval(&ComponentVertex::Level { level: 0, index: 0 }), Some(0));
        assert_eq!(w.eval(&ComponentVertex::Level { level: 5, index: 0 }), Some(5));

        let z = classify_component(&ComponentTemplate::z_chain()).unwrap();
        assert_eq!(z.class, ComponentClass::UnboundedBelow);
    }

    #[test]
    fn natural_witness_hits_initial_segments() {
        // shift normalization: minimum value 0, image an initial segment
        let template = ComponentTemplate::Natural {
            levels: EventuallyPeriodic { preperiod: vec![1, 1], period: vec![2] },
            edges: None,
        };
        let c = classify_component(&template).unwrap();
        let witness = c.witness.unwrap();
        let d = SelfMapDescription { components: vec![template], families: vec![] };
        let tr = Truncation::new(&d, 6, 4).unwrap();
        let mut values = BTreeSet::new();
        for (_, v) in &tr.vertices {
            values.insert(witness.eval(v).unwrap());
        }
        assert_eq!(values, (0..6).collect());
    }

    #[test]
    fn cycles_admit_no_grading() {
        assert!(!grading_exists(&[0]));
        assert!(!grading_exists(&[1, 0]));
        assert!(!grading_exists(&[1, 2, 0, 0]));
        assert!(!grading_exists(&[1, 2, 2]));
    }

    #[test]
    fn no_connected_finite_functional_graph_is_graded() {
        // exhaustive over all functional graphs on up to 4 vertices: every
        // connected one contains a cycle, so no grading can exist
        for n in 1..=4usize {
            for idx in 0..n.pow(n as u32) {
                let mut rem = idx;
                let mut edges = Vec::with_capacity(n);
                for _ in 0..n {
                    edges.push(rem % n);
                    rem /= n;
                }
                let template = ComponentTemplate::FiniteCore { edges: edges.clone() };
                if let Ok(c) = classify_component(&template) {
                    assert_eq!(c.class, ComponentClass::HasCycle);
                    assert!(!grading_exists(&edges), "graded cycle on {edges:?}");
                    let cycle = c.cycle.unwrap();
                    // walking the cycle returns to its start
                    let mut cur = cycle[0];
                    for _ in 0..cycle.len() {
                        cur = edges[cur];
                    }
                    assert_eq!(cur, cycle[0]);
                }
            }
        }
    }

    #[test]
    fn nu_is_universal() {
        let v = decide_universality(&SelfMapDescription::nu()).unwrap();
        assert!(v.is_universal);
        assert!(v.condition_i);
        assert!(v.witness.is_some());
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn single_natural_component_fails_condition_i() {
        let d = SelfMapDescription {
            components: vec![ComponentTemplate::natural_trivial()],
            families: vec![],
        };
        let v = decide_universality(&d).unwrap();
        assert!(!v.is_universal);
        assert!(!v.condition_i);
        assert!(matches!(
            v.counterexample,
            Some(Counterexample::FiniteComponentCount(1))
        ));
    }

    #[test]
    fn omega_loops_fail_condition_w() {
        let d = SelfMapDescription {
            components: vec![],
            families: vec![Family {
                template: ComponentTemplate::loop_of(1),
                multiplicity: Multiplicity::Omega,
            }],
        };
        let v = decide_universality(&d).unwrap();
        assert!(!v.is_universal);
        assert!(v.condition_i);
        assert!(matches!(
            v.counterexample,
            Some(Counterexample::CyclicComponent { cycle_len: 1, .. })
        ));
    }

    #[test]
    fn universal_witness_projects_homomorphically_to_nu() {
        // p(x) = <level(x), n> satisfies nu . p = p . w on every interior edge
        let fixtures = [
            SelfMapDescription::nu(),
            SelfMapDescription {
                components: vec![],
                families: vec![Family {
                    template: ComponentTemplate::Natural {
                        levels: EventuallyPeriodic { preperiod: vec![1], period: vec![2] },
                        edges: None,
                    },
                    multiplicity: Multiplicity::Omega,
                }],
            },
        ];
        for d in fixtures {
            let verdict = decide_universality(&d).unwrap();
            let witness = verdict.witness.expect("universal fixtures");
            let tr = Truncation::new(&d, 5, 4).unwrap();
            let mut hit_columns = BTreeSet::new();
            for v in 0..tr.len() {
                let (level, col) = witness.project(&tr, v).unwrap();
                hit_columns.insert(col);
                if let Some(u) = tr.image[v] {
                    assert_eq!(witness.project(&tr, u).unwrap(), nu_step(level, col));
                }
            }
            // p is onto the truncated rectangle of columns
            assert_eq!(hit_columns.len(), tr.slots.len());
        }
    }

    #[test]
    fn universal_witness_lifts_swap() {
        let v = decide_universality(&SelfMapDescription::nu()).unwrap();
        let w = v.witness.unwrap();
        let l = w.onto(&swap_target(), 6, 4).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.surjective_on_bound);
        assert!(!l.certificate.is_empty());
    }

    #[test]
    fn oracle_yes_on_nu_vs_two_cycle() {
        let out =
            brute_force_lifting_exists(&SelfMapDescription::nu(), &swap_target(), 4, 3).unwrap();
        assert!(matches!(out, OracleOutcome::Yes { .. }));
    }

    #[test]
    fn oracle_no_on_chain_into_loop_vs_swap() {
        // a 5-vertex path falling into a loop; the swap has no fixed point,
        // so no equivariant map exists at all
        let d = SelfMapDescription {
            components: vec![ComponentTemplate::FiniteCore {
                edges: vec![1, 2, 3, 4, 4],
            }],
            families: vec![],
        };
        let out = brute_force_lifting_exists(&d, &swap_target(), 6, 3).unwrap();
        assert!(out.is_no(), "{out:?}");
    }

    #[test]
    fn oracle_yes_constant_onto_one_point() {
        let t = TargetMap::total(vec!["x".into()], vec![0]).unwrap();
        let d = SelfMapDescription {
            components: vec![ComponentTemplate::loop_of(3)],
            families: vec![],
        };
        let out = brute_force_lifting_exists(&d, &t, 6, 3).unwrap();
        assert!(matches!(out, OracleOutcome::Yes { .. }));
    }

    #[test]
    fn oracle_counts_components_for_sound_no() {
        // a single natural component cannot surject onto two fixed points
        let d = SelfMapDescription {
            components: vec![ComponentTemplate::natural_trivial()],
            families: vec![],
        };
        let id2 = TargetMap::total(vec!["a".into(), "b".into()], vec![0, 1]).unwrap();
        let out = brute_force_lifting_exists(&d, &id2, 6, 3).unwrap();
        assert!(out.is_no(), "{out:?}");
    }

    #[test]
    fn oracle_sound_no_via_component_count_three_targets() {
        let d = SelfMapDescription {
            components: vec![
                ComponentTemplate::natural_trivial(),
                ComponentTemplate::natural_trivial(),
            ],
            families: vec![],
        };
        let id3 =
            TargetMap::total(vec!["a".into(), "b".into(), "c".into()], vec![0, 1, 2]).unwrap();
        let out = brute_force_lifting_exists(&d, &id3, 5, 4).unwrap();
        assert!(out.is_no(), "component counting gives a sound no: {out:?}");
    }

    #[test]
    fn fixed_point_lift_constant_target() {
        let t = TargetMap::total(vec!["x".into()], vec![0]).unwrap();
        let l = lift_with_fixed_point(&SelfMapDescription::nu(), &t, None, 5, 4).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.surjective_on_bound);
        assert!(l.assignment.iter().all(|&v| v == 0));
    }

    #[test]
    fn fixed_point_lift_with_zchain_remainder() {
        let mut d = SelfMapDescription::nu();
        d.components.push(ComponentTemplate::z_chain());
        let t = TargetMap::total(vec!["x".into()], vec![0]).unwrap();
        let l = lift_with_fixed_point(&d, &t, None, 4, 5).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.surjective_on_bound);
    }

    #[test]
    fn fixed_point_lift_two_point_tail() {
        // f(x) = x, f(y) = x: the reserved column collapses to x, the next
        // column realizes the two-step tail y -> x -> x ...
        let t = TargetMap::total(vec!["x".into(), "y".into()], vec![0, 0]).unwrap();
        let l = lift_with_fixed_point(&SelfMapDescription::nu(), &t, Some(0), 5, 4).unwrap();
        assert!(l.certificate.all_pass());
        assert!(l.surjective_on_bound);
        // reserved component is the first slot: all x
        let first_slot_values: BTreeSet<usize> = l
            .truncation
            .vertices
            .iter()
            .zip(&l.assignment)
            .filter(|((slot, _), _)| *slot == 0)
            .map(|(_, &a)| a)
            .collect();
        assert_eq!(first_slot_values, [0].into());
        // the next column realizes y at level 0 and x afterwards
        for (i, (slot, v)) in l.truncation.vertices.iter().enumerate() {
            if *slot == 1 {
                if let ComponentVertex::Level { level, .. } = v {
                    let expect = if *level == 0 { 1 } else { 0 };
                    assert_eq!(l.assignment[i], expect);
                }
            }
        }
    }

    #[test]
    fn fixed_point_errors() {
        let swap = swap_target();
        // no designated fixed point and none exists
        let mut d = SelfMapDescription::nu();
        d.components.push(ComponentTemplate::z_chain());
        assert!(matches!(
            lift_with_fixed_point(&d, &swap, None, 4, 4),
            Err(GraphError::NoFixedPoint)
        ));
        // designated point is not fixed
        let t = TargetMap::total(vec!["x".into(), "y".into()], vec![0, 0]).unwrap();
        assert!(matches!(
            lift_with_fixed_point(&SelfMapDescription::nu(), &t, Some(1), 4, 4),
            Err(GraphError::NoFixedPoint)
        ));
        // no omega natural family
        let loops = SelfMapDescription {
            components: vec![],
            families: vec![Family {
                template: ComponentTemplate::loop_of(1),
                multiplicity: Multiplicity::Omega,
            }],
        };
        let id1 = TargetMap::total(vec!["x".into()], vec![0]).unwrap();
        assert!(matches!(
            lift_with_fixed_point(&loops, &id1, None, 4, 4),
            Err(GraphError::NotEnoughNaturalComponents)
        ));
    }
}
