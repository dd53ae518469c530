//! The finite description language for countable functional digraphs.
//!
//! A connected functional digraph either contains a cycle, or carries a
//! grading `r(f x) = r(x) + 1` that is bounded below (a natural component,
//! after shifting the minimum to zero) or unbounded below (a Z-chain). The
//! three template kinds are exactly this classification, with eventually
//! periodic patterns bounding all infinite data.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed template: {0}")]
    MalformedTemplate(String),
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("target map is malformed: {0}")]
    InvalidTarget(String),
    #[error("no designated fixed point is available")]
    NoFixedPoint,
    #[error("the description has no natural family of multiplicity omega")]
    NotEnoughNaturalComponents,
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
}

/// An eventually periodic sequence: explicit preperiod, then a repeating
/// period. The period must be nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventuallyPeriodic<T> {
    #[serde(default = "Vec::new")]
    pub preperiod: Vec<T>,
    pub period: Vec<T>,
}

impl<T> EventuallyPeriodic<T> {
    pub fn periodic(period: Vec<T>) -> Self {
        EventuallyPeriodic { preperiod: Vec::new(), period }
    }

    pub fn get(&self, k: usize) -> &T {
        if k < self.preperiod.len() {
            &self.preperiod[k]
        } else {
            &self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Two-sided lookup used by Z-chains: negative indices cycle through the
    /// period, indices `>= 0` read the usual one-sided pattern.
    pub fn get_z(&self, z: i64) -> &T {
        if z >= 0 {
            self.get(z as usize)
        } else {
            let p = self.period.len() as i64;
            &self.period[(((z % p) + p) % p) as usize]
        }
    }

    /// Phase key that identifies the pattern state from position `k` on.
    pub fn phase(&self, k: usize) -> usize {
        if k < self.preperiod.len() {
            k
        } else {
            self.preperiod.len() + (k - self.preperiod.len()) % self.period.len()
        }
    }

    pub fn validate_nonempty(&self) -> Result<(), GraphError> {
        if self.period.is_empty() {
            return Err(GraphError::MalformedTemplate("period must be nonempty".into()));
        }
        Ok(())
    }
}

/// A finite tree hanging off a Z-chain spine vertex. `parent[i]` is the
/// vertex that node `i` maps to; `None` means the spine vertex itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct TreeSpec {
    pub parent: Vec<Option<usize>>,
}

impl TreeSpec {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Steps from node `i` to the spine, if the walk terminates.
    pub fn depth(&self, i: usize) -> Option<u64> {
        let mut cur = i;
        let mut steps = 1u64;
        for _ in 0..=self.parent.len() {
            match self.parent.get(cur)? {
                None => return Some(steps),
                Some(next) => {
                    cur = *next;
                    steps += 1;
                }
            }
        }
        None // cycle among tree nodes
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        for i in 0..self.parent.len() {
            if let Some(j) = self.parent[i] {
                if j >= self.parent.len() {
                    return Err(GraphError::MalformedTemplate(format!(
                        "tree parent index {j} out of range"
                    )));
                }
            }
            if self.depth(i).is_none() {
                return Err(GraphError::MalformedTemplate(
                    "tree nodes must reach the spine".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One connected component of a described self-map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentTemplate {
    /// A finite functional graph: out-degree one everywhere, hence exactly
    /// one cycle once connected.
    FiniteCore { edges: Vec<usize> },
    /// A bi-infinite orbit with optional finite trees attached at integer
    /// levels; the grading exists but is unbounded below.
    ZChain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trees: Option<EventuallyPeriodic<TreeSpec>>,
    },
    /// A graded component with minimum level zero: `levels` gives the size
    /// of each level, `edges` maps each level-k vertex to its level-(k+1)
    /// image (default: everything to index 0).
    Natural {
        levels: EventuallyPeriodic<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<EventuallyPeriodic<Vec<usize>>>,
    },
}

impl ComponentTemplate {
    pub fn natural_trivial() -> Self {
        ComponentTemplate::Natural {
            levels: EventuallyPeriodic::periodic(vec![1]),
            edges: None,
        }
    }

    pub fn loop_of(len: usize) -> Self {
        assert!(len >= 1);
        ComponentTemplate::FiniteCore {
            edges: (0..len).map(|i| (i + 1) % len).collect(),
        }
    }

    pub fn z_chain() -> Self {
        ComponentTemplate::ZChain { trees: None }
    }

    fn level_size(levels: &EventuallyPeriodic<usize>, k: u64) -> usize {
        *levels.get(k as usize)
    }

    fn edge_target(edges: &Option<EventuallyPeriodic<Vec<usize>>>, k: u64, i: usize) -> usize {
        match edges {
            None => 0,
            Some(e) => e.get(k as usize)[i],
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        match self {
            ComponentTemplate::FiniteCore { edges } => {
                if edges.is_empty() {
                    return Err(GraphError::MalformedTemplate(
                        "finite core must have at least one vertex".into(),
                    ));
                }
                if edges.iter().any(|&e| e >= edges.len()) {
                    return Err(GraphError::MalformedTemplate(
                        "finite core edge out of range".into(),
                    ));
                }
                if !finite_core_connected(edges) {
                    return Err(GraphError::MalformedTemplate(
                        "finite core must be one weak component".into(),
                    ));
                }
                Ok(())
            }
            ComponentTemplate::ZChain { trees } => {
                if let Some(trees) = trees {
                    trees.validate_nonempty()?;
                    for t in trees.preperiod.iter().chain(&trees.period) {
                        t.validate()?;
                    }
                }
                Ok(())
            }
            ComponentTemplate::Natural { levels, edges } => {
                levels.validate_nonempty()?;
                if levels.preperiod.iter().chain(&levels.period).any(|&s| s == 0) {
                    return Err(GraphError::MalformedTemplate(
                        "natural level sizes must be positive".into(),
                    ));
                }
                if let Some(e) = edges {
                    e.validate_nonempty()?;
                    if e.preperiod.len() != levels.preperiod.len()
                        || e.period.len() != levels.period.len()
                    {
                        return Err(GraphError::MalformedTemplate(
                            "edge pattern shape must match the level pattern".into(),
                        ));
                    }
                    let horizon = levels.preperiod.len() + levels.period.len();
                    for k in 0..horizon {
                        let here = *levels.get(k);
                        let next = *levels.get(k + 1);
                        let row = e.get(k);
                        if row.len() != here {
                            return Err(GraphError::MalformedTemplate(format!(
                                "edge row at level {k} has length {} but the level has {here} vertices",
                                row.len()
                            )));
                        }
                        if row.iter().any(|&t| t >= next) {
                            return Err(GraphError::MalformedTemplate(format!(
                                "edge at level {k} points past the next level"
                            )));
                        }
                    }
                }
                if !natural_connected(levels, edges) {
                    return Err(GraphError::MalformedTemplate(
                        "natural component is not weakly connected".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The self-map restricted to this component.
    pub fn step(&self, v: &ComponentVertex) -> ComponentVertex {
        match (self, v) {
            (ComponentTemplate::FiniteCore { edges }, ComponentVertex::Core(i)) => {
                ComponentVertex::Core(edges[*i])
            }
            (ComponentTemplate::Natural { edges, .. }, ComponentVertex::Level { level, index }) => {
                ComponentVertex::Level {
                    level: level + 1,
                    index: Self::edge_target(edges, *level, *index),
                }
            }
            (ComponentTemplate::ZChain { .. }, ComponentVertex::Spine(z)) => {
                ComponentVertex::Spine(z + 1)
            }
            (ComponentTemplate::ZChain { trees }, ComponentVertex::TreeNode { level, node }) => {
                let tree = trees
                    .as_ref()
                    .expect("tree vertex only exists when trees are present")
                    .get_z(*level);
                match tree.parent[*node] {
                    Some(j) => ComponentVertex::TreeNode { level: *level, node: j },
                    None => ComponentVertex::Spine(*level),
                }
            }
            _ => panic!("vertex does not belong to this template"),
        }
    }

    /// The grading level of a vertex, when the component is graded.
    pub fn grading(&self, v: &ComponentVertex) -> Option<i64> {
        match (self, v) {
            (ComponentTemplate::Natural { .. }, ComponentVertex::Level { level, .. }) => {
                Some(*level as i64)
            }
            (ComponentTemplate::ZChain { .. }, ComponentVertex::Spine(z)) => Some(*z),
            (ComponentTemplate::ZChain { trees }, ComponentVertex::TreeNode { level, node }) => {
                let tree = trees.as_ref()?.get_z(*level);
                Some(level - tree.depth(*node)? as i64)
            }
            _ => None,
        }
    }
}

/// Weak connectivity of a finite functional graph via union-find.
fn finite_core_connected(edges: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, &j) in edges.iter().enumerate() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (0..edges.len()).all(|i| find(&mut parent, i) == root)
}

/// Weak connectivity of a described natural component.
///
/// In a functional digraph two vertices are weakly connected iff their
/// forward orbits meet, so the component is connected iff for every level the
/// vertices of that level merge into a single forward thread. Because the
/// pattern is eventually periodic the image-vector process visits finitely
/// many states and the merging question is decided exactly.
fn natural_connected(
    levels: &EventuallyPeriodic<usize>,
    edges: &Option<EventuallyPeriodic<Vec<usize>>>,
) -> bool {
    let horizon = levels.preperiod.len() + levels.period.len();
    'levels: for k in 0..horizon as u64 {
        let size = ComponentTemplate::level_size(levels, k);
        if size == 1 {
            continue;
        }
        let mut images: Vec<usize> = (0..size).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut depth = k;
        loop {
            if images.iter().all(|&i| i == images[0]) {
                continue 'levels;
            }
            if !seen.insert((levels.phase(depth as usize), images.clone())) {
                return false; // state repeated without full merge
            }
            images = images
                .iter()
                .map(|&i| ComponentTemplate::edge_target(edges, depth, i))
                .collect();
            depth += 1;
        }
    }
    true
}

/// Multiplicity of a repeated family: a finite count or omega.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(u64),
    Omega,
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(n) => serializer.serialize_u64(*n),
            Multiplicity::Omega => serializer.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match &v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(Multiplicity::Finite)
                .ok_or_else(|| de::Error::custom("multiplicity must be a nonnegative integer")),
            serde_json::Value::String(s) if s == "omega" || s == "w" => Ok(Multiplicity::Omega),
            _ => Err(de::Error::custom("multiplicity must be a number or \"omega\"")),
        }
    }
}

/// A repeated family of identical components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub template: ComponentTemplate,
    pub multiplicity: Multiplicity,
}

/// A finite description of a countable self-map: a list of one-off
/// components plus repeated families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SelfMapDescription {
    #[serde(default)]
    pub components: Vec<ComponentTemplate>,
    #[serde(default)]
    pub families: Vec<Family>,
}

impl SelfMapDescription {
    /// The canonical universal map: omega copies of the one-column natural
    /// component, i.e. the shift `<m, n> -> <m+1, n>` on pairs of naturals.
    pub fn nu() -> Self {
        SelfMapDescription {
            components: Vec::new(),
            families: vec![Family {
                template: ComponentTemplate::natural_trivial(),
                multiplicity: Multiplicity::Omega,
            }],
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        for c in &self.components {
            c.validate()?;
        }
        for f in &self.families {
            f.template.validate()?;
        }
        Ok(())
    }

    pub fn is_empty_carrier(&self) -> bool {
        self.components.is_empty()
            && self
                .families
                .iter()
                .all(|f| matches!(f.multiplicity, Multiplicity::Finite(0)))
    }

    /// Total number of components, when finite.
    pub fn component_count(&self) -> Option<u64> {
        let mut count = self.components.len() as u64;
        for f in &self.families {
            match f.multiplicity {
                Multiplicity::Finite(n) => count += n,
                Multiplicity::Omega => return None,
            }
        }
        Some(count)
    }

    /// The template realized by a slot.
    pub fn template_of(&self, slot: &ComponentSlot) -> &ComponentTemplate {
        match slot {
            ComponentSlot::Single(i) => &self.components[*i],
            ComponentSlot::FamilyCopy { family, .. } => &self.families[*family].template,
        }
    }

    /// Deterministic component enumeration: one-off components first, then
    /// finite families copy by copy, then copies of all omega families
    /// interleaved round-robin. Returns the first `max` slots and whether
    /// that exhausted the description.
    pub fn enumerate_components(&self, max: usize) -> (Vec<ComponentSlot>, bool) {
        let mut slots = Vec::new();
        for i in 0..self.components.len() {
            if slots.len() == max {
                return (slots, false);
            }
            slots.push(ComponentSlot::Single(i));
        }
        for (i, f) in self.families.iter().enumerate() {
            if let Multiplicity::Finite(n) = f.multiplicity {
                for copy in 0..n {
                    if slots.len() == max {
                        return (slots, false);
                    }
                    slots.push(ComponentSlot::FamilyCopy { family: i, copy });
                }
            }
        }
        let omega: Vec<usize> = self
            .families
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f.multiplicity, Multiplicity::Omega))
            .map(|(i, _)| i)
            .collect();
        if omega.is_empty() {
            return (slots, true);
        }
        let mut copy = 0u64;
        loop {
            for &family in &omega {
                if slots.len() == max {
                    return (slots, false);
                }
                slots.push(ComponentSlot::FamilyCopy { family, copy });
            }
            copy += 1;
        }
    }
}

/// Which component of a description a vertex lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentSlot {
    Single(usize),
    FamilyCopy { family: usize, copy: u64 },
}

impl fmt::Display for ComponentSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentSlot::Single(i) => write!(f, "c{i}"),
            ComponentSlot::FamilyCopy { family, copy } => write!(f, "f{family}.{copy}"),
        }
    }
}

/// A vertex within one component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentVertex {
    Core(usize),
    Level { level: u64, index: usize },
    Spine(i64),
    TreeNode { level: i64, node: usize },
}

impl fmt::Display for ComponentVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentVertex::Core(i) => write!(f, "v{i}"),
            ComponentVertex::Level { level, index } => write!(f, "l{level}.{index}"),
            ComponentVertex::Spine(z) => write!(f, "s{z}"),
            ComponentVertex::TreeNode { level, node } => write!(f, "t{level}.{node}"),
        }
    }
}

/// A finite truncation of a described self-map, ready for search and
/// certificate evaluation.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub slots: Vec<ComponentSlot>,
    pub vertices: Vec<(usize, ComponentVertex)>,
    index: BTreeMap<(usize, ComponentVertex), usize>,
    /// Image of each vertex inside the truncation; `None` leaves it.
    pub image: Vec<Option<usize>>,
    /// Whether the truncation is the entire described carrier.
    pub complete: bool,
}

impl Truncation {
    /// Truncate to `max_components` components, each natural component to
    /// levels `< depth` and each Z-chain spine to `|z| <= depth`.
    pub fn new(
        description: &SelfMapDescription,
        depth: u64,
        max_components: usize,
    ) -> Result<Truncation, GraphError> {
        description.validate()?;
        let (slots, all_components) = description.enumerate_components(max_components);
        let mut vertices: Vec<(usize, ComponentVertex)> = Vec::new();
        let mut complete = all_components;
        for (slot_idx, slot) in slots.iter().enumerate() {
            match description.template_of(slot) {
                ComponentTemplate::FiniteCore { edges } => {
                    for i in 0..edges.len() {
                        vertices.push((slot_idx, ComponentVertex::Core(i)));
                    }
                }
                ComponentTemplate::Natural { levels, .. } => {
                    complete = false;
                    for level in 0..depth {
                        for index in 0..ComponentTemplate::level_size(levels, level) {
                            vertices.push((slot_idx, ComponentVertex::Level { level, index }));
                        }
                    }
                }
                ComponentTemplate::ZChain { trees } => {
                    complete = false;
                    let d = depth as i64;
                    for z in -d..=d {
                        vertices.push((slot_idx, ComponentVertex::Spine(z)));
                        if let Some(trees) = trees {
                            let tree = trees.get_z(z);
                            for node in 0..tree.len() {
                                vertices.push((slot_idx, ComponentVertex::TreeNode {
                                    level: z,
                                    node,
                                }));
                            }
                        }
                    }
                }
            }
        }
        let index: BTreeMap<(usize, ComponentVertex), usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut image = Vec::with_capacity(vertices.len());
        for (slot_idx, v) in &vertices {
            let template = description.template_of(&slots[*slot_idx]);
            let w = template.step(v);
            image.push(index.get(&(*slot_idx, w)).copied());
        }
        Ok(Truncation { slots, vertices, index, image, complete })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_name(&self, i: usize) -> String {
        let (slot_idx, v) = &self.vertices[i];
        format!("{}/{}", self.slots[*slot_idx], v)
    }

    pub fn position(&self, slot_idx: usize, v: &ComponentVertex) -> Option<usize> {
        self.index.get(&(slot_idx, v.clone())).copied()
    }
}
