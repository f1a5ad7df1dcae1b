use serde::{Deserialize, Serialize};

use crate::numerics::Constants;

use super::{stats, Hierarchy};

/// Structural properties every good hierarchy for a droplet-sized `R` has.
/// `None` marks a property whose hypotheses on `R` fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Every vertex has `φ ≥ δq^{-1/4}`.
    pub small_seeds: Option<bool>,
    /// `v ≤ 2·h·m`.
    pub height_large_seeds: Option<bool>,
    /// `h ≤ L₂/√q`, or some vertex is long and thin (below or above `B/q`).
    pub height_or_vertex: Option<bool>,
    /// When neither the height bound nor a thin vertex above `B/q` applies,
    /// some thin vertex below `B/q` has `h ≤ L₁q^{1/4}·long`.
    pub thin_vertex_height: Option<bool>,
    /// `Σ_{up} φ ≤ L₂/q^{3/2}`, or some vertex above `B/q` is long and thin.
    pub upper_trunk: Option<bool>,
}

impl StructureReport {
    /// No applicable property fails.
    pub fn holds(&self) -> bool {
        [self.small_seeds, self.height_large_seeds, self.height_or_vertex, self.thin_vertex_height, self.upper_trunk]
            .iter()
            .all(|p| p.unwrap_or(true))
    }
}

/// Evaluates the structural properties of `h` under the constants `k`.
pub fn structure_checks(h: &Hierarchy, k: &Constants) -> StructureReport {
    let q = k.q();
    let r = h.root_rect();
    let st = stats(h, k);
    let droplet = r.long() as f64 <= (1.0 / q).ln() / (2.0 * q);
    let wide = r.short() as f64 >= q.powf(-0.5);
    let rects: Vec<_> = (0..h.len()).map(|u| h.rect(u)).collect();

    let min_phi = rects.iter().map(|r| r.phi()).min().expect("non-empty");
    let small_seeds = (droplet && wide).then(|| min_phi as f64 >= k.delta * q.powf(-0.25));
    let height_large_seeds = wide.then_some(st.v <= 2 * st.h * st.m);

    let big = k.b / q;
    let lower = |r: &crate::lattice::Rect| r.short() as f64 <= big && r.long() as f64 >= 2.0 * k.l1 * r.short() as f64;
    let upper = |r: &crate::lattice::Rect| r.short() as f64 >= big && r.long() >= 4 * r.short();
    let normal_height = st.h as f64 <= k.l2 / q.sqrt();
    let any_lower = rects.iter().any(lower);
    let any_upper = rects.iter().any(upper);
    let height_or_vertex = droplet.then_some(normal_height || any_lower || any_upper);
    let thin_vertex_height = (droplet && !normal_height && !any_upper)
        .then(|| rects.iter().filter(|r| lower(r)).any(|r| st.h as f64 <= k.l1 * q.powf(0.25) * r.long() as f64));
    let upper_trunk = droplet.then_some(st.up_phi_sum as f64 <= k.l2 / q.powf(1.5) || any_upper);
    StructureReport { small_seeds, height_large_seeds, height_or_vertex, thin_vertex_height, upper_trunk }
}
