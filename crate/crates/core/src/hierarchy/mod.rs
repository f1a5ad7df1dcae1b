//! Hierarchies: rooted trees of nested rectangles recording how an
//! internally filled droplet grows from its seeds.

mod build;
mod check;
mod pods;
mod structure;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{buffers, FrameSpec, Selection};
use crate::lattice::Rect;
use crate::numerics::{side_allowance, Constants};

pub use build::build_hierarchy;
pub use check::{
    check_good, check_satisfied, Condition, EventKind, EventWitness, GoodnessReport, SatisfactionCertificate, Violation,
};
pub use pods::{find_pods, find_pods_with, verify_pod_inequality, PodWitness, UCache, POD_AXIS_LIMIT};
pub use structure::{structure_checks, StructureReport};

/// An edge to the child `to`, labelled by `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub to: usize,
    #[serde(default)]
    pub x: Selection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub rect: Rect,
    #[serde(default)]
    pub children: Vec<Edge>,
}

/// A rooted out-tree on vertices `0..len()`, rooted at `0`.
///
/// Construction only enforces the tree shape; the conditions on labels and
/// rectangles are left to [`check_good`] so that invalid hierarchies can be
/// represented and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    root_rect: Rect,
    vertices: Vec<Vertex>,
    parent: Vec<Option<usize>>,
}

impl Hierarchy {
    /// Rejects vertex lists that are not a tree rooted at `0`.
    pub fn new(root_rect: Rect, vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Malformed("hierarchy without vertices".into()));
        }
        let n = vertices.len();
        let mut parent = vec![None; n];
        for (u, vx) in vertices.iter().enumerate() {
            for e in &vx.children {
                if e.to >= n {
                    return Err(Error::Malformed(format!("edge {u} -> {} leaves the vertex list", e.to)));
                }
                if e.to == 0 || parent[e.to].is_some() {
                    return Err(Error::Malformed(format!("vertex {} has more than one parent", e.to)));
                }
                parent[e.to] = Some(u);
            }
        }
        // every vertex must reach the root; a cycle would never get there
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        while let Some(u) = stack.pop() {
            seen[u] = true;
            stack.extend(vertices[u].children.iter().map(|e| e.to));
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::Malformed(format!("vertex {u} is not reachable from the root")));
        }
        Ok(Hierarchy { root_rect, vertices, parent })
    }

    /// The one-vertex hierarchy for `r`.
    pub fn single(r: Rect) -> Self {
        Hierarchy::new(r, vec![Vertex { rect: r, children: Vec::new() }]).expect("a single vertex is a tree")
    }

    pub fn root_rect(&self) -> Rect {
        self.root_rect
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn rect(&self, u: usize) -> Rect {
        self.vertices[u].rect
    }

    pub fn children(&self, u: usize) -> &[Edge] {
        &self.vertices[u].children
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        self.vertices[u].children.is_empty()
    }

    /// Leaves in vertex order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.is_leaf(u)).collect()
    }

    /// Edges `(u, v, x)` with `v` the only child of `u`.
    pub fn single_child_edges(&self) -> Vec<(usize, usize, Selection)> {
        (0..self.len())
            .filter_map(|u| match self.children(u) {
                [e] => Some((u, e.to, e.x)),
                _ => None,
            })
            .collect()
    }

    /// All edges `(u, v, x)`.
    pub fn edges(&self) -> Vec<(usize, usize, Selection)> {
        (0..self.len()).flat_map(|u| self.children(u).iter().map(move |e| (u, e.to, e.x))).collect()
    }

    /// Children of `u` with the trunk's preferred child first: larger short
    /// side, then lexicographically smaller lower-left corner, then the
    /// smaller rectangle, then the lower index.
    pub fn ordered_children(&self, u: usize) -> Vec<Edge> {
        let mut out = self.children(u).to_vec();
        out.sort_by_key(|e| trunk_key(&self.rect(e.to), e.to));
        out
    }

    /// Vertices on the path from the root to `u`, root first.
    pub fn path_to(&self, u: usize) -> Vec<usize> {
        let mut path = vec![u];
        let mut cur = u;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The hierarchy below `u`, renumbered with `u` as the root.
    pub fn subtree(&self, u: usize) -> Hierarchy {
        let mut order = vec![u];
        let mut i = 0;
        while i < order.len() {
            let w = order[i];
            order.extend(self.children(w).iter().map(|e| e.to));
            i += 1;
        }
        let mut new_index = vec![usize::MAX; self.len()];
        for (k, &w) in order.iter().enumerate() {
            new_index[w] = k;
        }
        let vertices = order
            .iter()
            .map(|&w| Vertex {
                rect: self.rect(w),
                children: self.children(w).iter().map(|e| Edge { to: new_index[e.to], x: e.x }).collect(),
            })
            .collect();
        Hierarchy::new(self.rect(u), vertices).expect("a subtree of a tree is a tree")
    }

    /// A copy with the label of edge `u -> v` replaced.
    pub fn with_label(&self, u: usize, v: usize, x: Selection) -> Result<Hierarchy> {
        let mut out = self.clone();
        let e = out
            .vertices
            .get_mut(u)
            .and_then(|vx| vx.children.iter_mut().find(|e| e.to == v))
            .ok_or_else(|| Error::InvalidArgument(format!("no edge {u} -> {v}")))?;
        e.x = x;
        Ok(out)
    }

    /// `‖x(uv)‖`: the number of selected directions with a non-empty buffer
    /// of `R_v` in `R_u`. Zero when `R_v ⊄ R_u`.
    pub fn label_norm(&self, u: usize, v: usize, x: Selection) -> usize {
        match FrameSpec::nested(self.rect(v), self.rect(u), x) {
            Ok(spec) => buffers(&spec).indicator().and(&x).count(),
            Err(_) => 0,
        }
    }

    /// JSON dump with trunk flags on the edges.
    pub fn dump(&self) -> HierarchyDump {
        let trunk = trunk(self);
        HierarchyDump {
            root_rect: self.root_rect,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, vx)| DumpVertex { id, rect: vx.rect, leaf: vx.children.is_empty() })
                .collect(),
            edges: self
                .edges()
                .into_iter()
                .map(|(from, to, x)| DumpEdge { from, to, x, trunk: trunk.contains(&(from, to)) })
                .collect(),
        }
    }

    pub fn from_dump(dump: &HierarchyDump) -> Result<Hierarchy> {
        let n = dump.vertices.len();
        let mut vertices: Vec<Option<Vertex>> = vec![None; n];
        for dv in &dump.vertices {
            if dv.id >= n || vertices[dv.id].is_some() {
                return Err(Error::Malformed(format!("vertex ids must be 0..{n} without repeats")));
            }
            vertices[dv.id] = Some(Vertex { rect: dv.rect, children: Vec::new() });
        }
        let mut vertices: Vec<Vertex> = vertices.into_iter().map(|v| v.expect("all ids present")).collect();
        for e in &dump.edges {
            if e.from >= n {
                return Err(Error::Malformed(format!("edge from unknown vertex {}", e.from)));
            }
            vertices[e.from].children.push(Edge { to: e.to, x: e.x });
        }
        Hierarchy::new(dump.root_rect, vertices)
    }
}

pub(crate) fn trunk_key(r: &Rect, index: usize) -> (std::cmp::Reverse<i64>, (i64, i64), Rect, usize) {
    (std::cmp::Reverse(r.short()), r.lower_left(), *r, index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpVertex {
    pub id: usize,
    pub rect: Rect,
    #[serde(default)]
    pub leaf: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpEdge {
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub x: Selection,
    #[serde(default)]
    pub trunk: bool,
}

/// Serialized form of a hierarchy. The `leaf` and `trunk` flags are
/// informational and recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyDump {
    pub root_rect: Rect,
    pub vertices: Vec<DumpVertex>,
    pub edges: Vec<DumpEdge>,
}

impl Serialize for Hierarchy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.dump().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Hierarchy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dump = HierarchyDump::deserialize(deserializer)?;
        Hierarchy::from_dump(&dump).map_err(serde::de::Error::custom)
    }
}

/// Edges of the root-to-leaf path that takes the preferred child at every
/// split (see [`Hierarchy::ordered_children`]).
pub fn trunk(h: &Hierarchy) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut u = h.root();
    while let Some(first) = h.ordered_children(u).first() {
        edges.push((u, first.to));
        u = first.to;
    }
    edges
}

/// Vertices on the trunk, root first.
pub fn trunk_vertices(h: &Hierarchy) -> Vec<usize> {
    let mut out = vec![h.root()];
    out.extend(trunk(h).into_iter().map(|(_, v)| v));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyStats {
    /// Number of vertices.
    pub v: usize,
    /// Number of seeds (leaves).
    pub s: usize,
    /// Seeds with `long ≥ 1/(3√q)`.
    pub m: usize,
    /// Vertices on a longest root-to-leaf path.
    pub h: usize,
    /// Sum of the seeds' semi-perimeters.
    #[serde(rename = "X")]
    pub x: i64,
    /// Sum of `φ` over trunk vertices with `short ≥ B/q`.
    pub up_phi_sum: i64,
    /// `Π (1/f(R_u))^{‖x(uv)‖}` over single-child edges.
    pub weight: f64,
    pub split_vertices: usize,
}

pub fn stats(h: &Hierarchy, k: &Constants) -> HierarchyStats {
    let q = k.q();
    let leaves = h.leaves();
    let large = 1.0 / (3.0 * q.sqrt());
    let m = leaves.iter().filter(|&&u| h.rect(u).long() as f64 >= large).count();
    let x = leaves.iter().map(|&u| h.rect(u).phi()).sum();
    let up_phi_sum =
        trunk_vertices(h).into_iter().filter(|&u| h.rect(u).short() as f64 >= k.b / q).map(|u| h.rect(u).phi()).sum();
    let weight = h
        .single_child_edges()
        .into_iter()
        .map(|(u, v, xl)| side_allowance(&h.rect(u), k).powi(-(h.label_norm(u, v, xl) as i32)))
        .product();
    HierarchyStats {
        v: h.len(),
        s: leaves.len(),
        m,
        h: height(h),
        x,
        up_phi_sum,
        weight,
        split_vertices: (0..h.len()).filter(|&u| h.children(u).len() == 2).count(),
    }
}

/// Number of vertices on a longest root-to-leaf path.
pub fn height(h: &Hierarchy) -> usize {
    let mut best = 0;
    let mut stack = vec![(h.root(), 1usize)];
    while let Some((u, depth)) = stack.pop() {
        best = best.max(depth);
        stack.extend(h.children(u).iter().map(|e| (e.to, depth + 1)));
    }
    best
}

/// `exp(16(N + M log φ(R)))`, the bound on the total weight of good
/// hierarchies for `R` with `N` vertices and `M` seeds.
pub fn weighted_count_bound(n: u64, m: u64, r: &Rect) -> Result<f64> {
    if m < 1 || n < m {
        return Err(Error::InvalidArgument(format!("weighted count needs N >= M >= 1, got N = {n}, M = {m}")));
    }
    Ok((16.0 * (n as f64 + m as f64 * (r.phi() as f64).ln())).exp())
}
