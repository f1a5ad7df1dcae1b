use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{closure, is_internally_filled};
use crate::events::{buffers, frame, FrameSpec};
use crate::lattice::{distance, Config, Site};
use crate::numerics::{side_allowance, Constants};

use super::{trunk, Hierarchy};

/// The conditions a good hierarchy must meet, `(a)`–`(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// The root is labelled with the hierarchy's rectangle.
    A,
    /// Out-degree at most two.
    B,
    /// Children are nested in their parents.
    C,
    /// The closure of the union of a split's two children is their parent.
    D,
    /// Leaves are exactly the vertices with `short ≤ q^{-1/2}`.
    E,
    /// A single child is within `2f(R_u)` of its parent.
    F,
    /// Split children, and single children that themselves have one child,
    /// are at distance at least `f(R_u)`.
    G,
    /// Labels of growth chains: `x ≤ 1_Z` and either `‖x‖ = z` or
    /// `‖x‖ = z − 1` with `f ≤ d < f + 2`.
    H,
    /// Every other edge has label zero.
    I,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::A,
        Condition::B,
        Condition::C,
        Condition::D,
        Condition::E,
        Condition::F,
        Condition::G,
        Condition::H,
        Condition::I,
    ];

    pub fn letter(self) -> char {
        b"abcdefghi"[self as usize] as char
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub vertex: usize,
    /// The child end of the offending edge, if the condition is about an edge.
    pub child: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub violations: Vec<Violation>,
}

impl GoodnessReport {
    pub fn is_good(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }

    /// Pass/fail per condition, in order.
    pub fn summary(&self) -> Vec<(Condition, bool)> {
        Condition::ALL.iter().map(|&c| (c, !self.violates(c))).collect()
    }
}

/// Evaluates every condition of a good hierarchy, collecting all violations.
pub fn check_good(h: &Hierarchy, k: &Constants) -> GoodnessReport {
    let leaf_short = k.q().powf(-0.5);
    let mut violations = Vec::new();
    let mut fail =
        |condition, vertex, child, detail: String| violations.push(Violation { condition, vertex, child, detail });
    if h.rect(h.root()) != h.root_rect() {
        fail(Condition::A, h.root(), None, format!("root labelled {} instead of {}", h.rect(h.root()), h.root_rect()));
    }
    for u in 0..h.len() {
        let ru = h.rect(u);
        let kids = h.children(u);
        if kids.len() > 2 {
            fail(Condition::B, u, None, format!("{} children", kids.len()));
        }
        let short_leaf = ru.short() as f64 <= leaf_short;
        if kids.is_empty() != short_leaf {
            fail(
                Condition::E,
                u,
                None,
                format!(
                    "{} with short side {} but {}",
                    ru,
                    ru.short(),
                    if kids.is_empty() { "no children" } else { "children" }
                ),
            );
        }
        if let [e1, e2] = kids {
            let (r1, r2) = (h.rect(e1.to), h.rect(e2.to));
            if ru.contains_rect(&r1) && ru.contains_rect(&r2) {
                // the closure never leaves the bounding box, so computing it
                // inside R_u is exact
                let mut union = Config::empty(ru);
                union.fill_rect(&r1);
                union.fill_rect(&r2);
                if !closure(&union).is_full() {
                    fail(Condition::D, u, None, format!("[{r1} ∪ {r2}] is not {ru}"));
                }
            }
        }
        let f = side_allowance(&ru, k);
        for e in kids {
            let v = e.to;
            let rv = h.rect(v);
            if !ru.contains_rect(&rv) {
                fail(Condition::C, u, Some(v), format!("{rv} not inside {ru}"));
                continue;
            }
            let d = distance(&rv, &ru) as f64;
            let single = kids.len() == 1;
            let chain = single && h.children(v).len() == 1;
            if single && d > 2.0 * f {
                fail(Condition::F, u, Some(v), format!("d = {d} > 2f = {:.4}", 2.0 * f));
            }
            if (kids.len() == 2 || h.children(v).len() == 1) && d < f {
                fail(Condition::G, u, Some(v), format!("d = {d} < f = {f:.4}"));
            }
            if chain {
                let spec = FrameSpec::nested(rv, ru, e.x).expect("nesting checked");
                let z = buffers(&spec).indicator();
                let norm = z.and(&e.x).count();
                if !e.x.le(&z) {
                    fail(Condition::H, u, Some(v), format!("label {} selects an empty buffer (Z = {z})", e.x));
                } else if norm != z.count() && !(norm + 1 == z.count() && d >= f && d < f + 2.0) {
                    fail(Condition::H, u, Some(v), format!("|x| = {norm}, z = {}, d = {d}, f = {f:.4}", z.count()));
                }
            } else if !e.x.is_zero() {
                fail(Condition::I, u, Some(v), format!("label {} on an edge outside a growth chain", e.x));
            }
        }
    }
    violations.sort_by_key(|v| (v.condition, v.vertex, v.child));
    GoodnessReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// `(j)`: a seed is internally filled.
    Filled,
    /// `(k)`: `D₁ˣ(R_v, R_u)` off the trunk.
    D1,
    /// `(l)`: `D₂ˣ(R_v, R_u)` on the trunk.
    D2,
}

/// One event of the satisfaction requirement with its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventWitness {
    pub kind: EventKind,
    pub vertex: usize,
    pub child: Option<usize>,
    /// Whether the event holds for the full configuration.
    pub holds: bool,
    /// Infected sites certifying the increasing part.
    pub infected: Vec<Site>,
    /// Uninfected frame sites certifying the decreasing part of `D₂`.
    pub empty: Vec<Site>,
    /// Whether the witness alone forces the event, re-checked from scratch.
    pub witnessed: bool,
}

/// A site claimed by two events' witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub site: Site,
    pub events: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionCertificate {
    pub events: Vec<EventWitness>,
    pub trunk: Vec<(usize, usize)>,
    pub collisions: Vec<Collision>,
    pub passed: bool,
}

impl SatisfactionCertificate {
    /// Events whose witness fails, as readable lines.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .events
            .iter()
            .filter(|e| !e.witnessed)
            .map(|e| match e.child {
                Some(c) => format!("{:?} on edge {} -> {c} (holds: {})", e.kind, e.vertex, e.holds),
                None => format!("{:?} at vertex {} (holds: {})", e.kind, e.vertex, e.holds),
            })
            .collect();
        out.extend(
            self.collisions
                .iter()
                .map(|c| format!("site {:?} shared by events {} and {}", c.site, c.events.0, c.events.1)),
        );
        out
    }

    pub fn fails(&self, kind: EventKind) -> bool {
        self.events.iter().any(|e| e.kind == kind && !e.witnessed)
    }
}

/// Derives witnesses for every event of the satisfaction requirement and
/// verifies them.
///
/// Sites are handed down the tree: a vertex passes its available sites
/// inside `R_v` to a single child `v` and keeps the rest for the growth
/// event; at a split the preferred child takes the sites inside its
/// rectangle and the other child those inside its own but outside the
/// first. Frame cells of trunk events are witnessed by being uninfected.
pub fn check_satisfied(h: &Hierarchy, a: &Config) -> SatisfactionCertificate {
    let tr = trunk(h);
    let root_rect = h.root_rect();
    let mut events = Vec::new();
    let mut stack = vec![(h.root(), a.restrict(&h.rect(h.root())))];
    while let Some((u, avail)) = stack.pop() {
        let ru = h.rect(u);
        let kids = h.ordered_children(u);
        match kids.as_slice() {
            [] => {
                let infected = avail.sites();
                events.push(EventWitness {
                    kind: EventKind::Filled,
                    vertex: u,
                    child: None,
                    holds: is_internally_filled(a, &ru),
                    witnessed: closure(&avail).is_full(),
                    infected,
                    empty: Vec::new(),
                });
            }
            [e] => {
                let on_trunk = tr.contains(&(u, e.to));
                let kind = if on_trunk { EventKind::D2 } else { EventKind::D1 };
                let rv = h.rect(e.to);
                match FrameSpec::nested(rv, ru, e.x) {
                    Ok(spec) => {
                        let fr = frame(&spec);
                        let increasing = avail.difference(&fr.blacksquare);
                        let empty = if on_trunk { fr.square.sites() } else { Vec::new() };
                        let frame_clear = !a.restrict(&ru).intersects(&fr.square);
                        let grows = fr.d1(&increasing);
                        events.push(EventWitness {
                            kind,
                            vertex: u,
                            child: Some(e.to),
                            holds: if on_trunk { fr.d2(a) } else { fr.d1(a) },
                            witnessed: grows && (!on_trunk || frame_clear),
                            infected: increasing.sites(),
                            empty,
                        });
                        stack.push((e.to, avail.restrict(&rv)));
                    }
                    Err(_) => {
                        events.push(EventWitness {
                            kind,
                            vertex: u,
                            child: Some(e.to),
                            holds: false,
                            witnessed: false,
                            infected: Vec::new(),
                            empty: Vec::new(),
                        });
                        stack.push((e.to, avail.restrict(&rv.intersection(&ru).unwrap_or(rv))));
                    }
                }
            }
            many => {
                let mut taken: Vec<crate::lattice::Rect> = Vec::new();
                for e in many {
                    let rv = h.rect(e.to);
                    let mut share = avail.restrict(&rv);
                    for t in &taken {
                        if let Some(common) = t.intersection(&rv) {
                            for site in common.sites() {
                                share.remove(site);
                            }
                        }
                    }
                    taken.push(rv);
                    stack.push((e.to, share));
                }
            }
        }
    }
    events.sort_by_key(|e| (e.vertex, e.child));

    let mut owner: HashMap<Site, usize> = HashMap::new();
    let mut collisions = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        for &site in ev.infected.iter().chain(&ev.empty) {
            if let Some(&j) = owner.get(&site) {
                if j != i {
                    collisions.push(Collision { site, events: (j, i) });
                }
            } else {
                owner.insert(site, i);
            }
        }
    }
    let passed = collisions.is_empty() && events.iter().all(|e| e.witnessed) && root_rect == h.rect(h.root());
    SatisfactionCertificate { events, trunk: tr, collisions, passed }
}
