use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{g, u_cost_dims};

use super::Hierarchy;

/// Largest number of candidate lengths per axis the exhaustive pod search
/// accepts.
pub const POD_AXIS_LIMIT: i64 = 64;

/// Relative slack absorbed when comparing sums of quadrature values.
const COMPARE_RTOL: f64 = 1e-9;

/// Dimensions of the pods found and the two sides of the inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PodWitness {
    pub s1_dims: (i64, i64),
    /// `dim R` for the one-pod form.
    pub s2_dims: (i64, i64),
    /// `Σ U(R_v, R_u)` over single-child edges.
    pub lhs: f64,
    /// `U(S₁, R_u) + U(S₂, R) − 2(s − 1)q·g(√q)`.
    pub rhs: f64,
}

/// `(dim S, dim R)`.
type DimsPair = ((i64, i64), (i64, i64));

/// Memo of `U` by dimensions at a fixed `q`, reusable across searches.
#[derive(Debug, Clone)]
pub struct UCache {
    q: f64,
    values: HashMap<DimsPair, f64>,
}

impl UCache {
    pub fn new(q: f64) -> Result<UCache> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        Ok(UCache { q, values: HashMap::new() })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn get(&mut self, s: (i64, i64), r: (i64, i64)) -> Result<f64> {
        if let Some(&v) = self.values.get(&(s, r)) {
            return Ok(v);
        }
        let v = u_cost_dims(s, r, self.q)?;
        self.values.insert((s, r), v);
        Ok(v)
    }
}

fn axis_range(lo: i64, hi: i64, what: &str) -> Result<std::ops::RangeInclusive<i64>> {
    if hi - lo + 1 > POD_AXIS_LIMIT {
        return Err(Error::SearchTooLarge(format!(
            "{what}: {} candidate lengths on one axis (limit {POD_AXIS_LIMIT})",
            hi - lo + 1
        )));
    }
    Ok(lo..=hi)
}

/// Searches integer dimensions for pods.
///
/// With `u = None`: some `S` with `dim S ≤ Σ_seeds dim R_w` (and inside
/// `R`) such that `Σ U(R_v, R_u) ≥ U(S, R) − 2(s − 1)q·g(√q)`. With a
/// vertex `u`: some `S₁ ⊆ R_u ⊆ S₂ ⊆ R` with
/// `dim S₁ + dim S₂ − dim R_u ≤ Σ_seeds dim R_w` and
/// `Σ U(R_v, R_u) ≥ U(S₁, R_u) + U(S₂, R) − 2(s − 1)q·g(√q)`.
///
/// The left side sums over single-child edges. Returns the pods of
/// smallest right side, or `None` when none satisfies the inequality.
pub fn find_pods(h: &Hierarchy, q: f64, u: Option<usize>) -> Result<Option<PodWitness>> {
    find_pods_with(h, u, &mut UCache::new(q)?)
}

/// [`find_pods`] drawing `U` values from a shared cache.
pub fn find_pods_with(h: &Hierarchy, u: Option<usize>, cache: &mut UCache) -> Result<Option<PodWitness>> {
    let q = cache.q;
    if let Some(u) = u {
        if u >= h.len() {
            return Err(Error::InvalidArgument(format!("vertex {u} not in a hierarchy of {} vertices", h.len())));
        }
    }
    let r = h.rect(h.root()).dims();
    let leaves = h.leaves();
    let sum_dims = leaves.iter().fold((0, 0), |acc, &w| {
        let d = h.rect(w).dims();
        (acc.0 + d.0, acc.1 + d.1)
    });
    let mut lhs = 0.0;
    for (a, b, _) in h.single_child_edges() {
        if !h.rect(a).contains_rect(&h.rect(b)) {
            return Err(Error::NotNested { inner: h.rect(b), outer: h.rect(a) });
        }
        lhs += cache.get(h.rect(b).dims(), h.rect(a).dims())?;
    }
    let slack = 2.0 * (leaves.len() as f64 - 1.0) * q * g(q.sqrt());
    let ru = u.map_or(r, |u| h.rect(u).dims());

    // S₂ ranges over dim R_u ≤ dim S₂ ≤ dim R; S₁ over 1 ≤ dim S₁ ≤ dim R_u,
    // both cut down by the seed budget (taking the other pod at least 1x1)
    let s2_w = axis_range(ru.0, r.0.min(sum_dims.0 + ru.0 - 1), "outer pod width")?;
    let s2_h = axis_range(ru.1, r.1.min(sum_dims.1 + ru.1 - 1), "outer pod height")?;
    let mut outer = Vec::new();
    for a2 in s2_w {
        for b2 in s2_h.clone() {
            outer.push(((a2, b2), cache.get((a2, b2), r)?));
        }
    }
    let s1_w = axis_range(1, ru.0.min(sum_dims.0), "inner pod width")?;
    let s1_h = axis_range(1, ru.1.min(sum_dims.1), "inner pod height")?;
    let mut best: Option<PodWitness> = None;
    for a1 in s1_w {
        for b1 in s1_h.clone() {
            let inner = cache.get((a1, b1), ru)?;
            for &((a2, b2), u2) in &outer {
                if a1 + a2 - ru.0 > sum_dims.0 || b1 + b2 - ru.1 > sum_dims.1 {
                    continue;
                }
                let rhs = inner + u2 - slack;
                if best.as_ref().is_none_or(|w| rhs < w.rhs) {
                    best = Some(PodWitness { s1_dims: (a1, b1), s2_dims: (a2, b2), lhs, rhs });
                }
            }
        }
    }
    Ok(best.filter(|w| w.lhs >= w.rhs - COMPARE_RTOL * (1.0 + w.rhs.abs())))
}

/// Whether the one-pod (`u = None`) or two-pod inequality admits a
/// witness found by exhaustive search over integer dimensions.
pub fn verify_pod_inequality(h: &Hierarchy, q: f64, u: Option<usize>) -> Result<bool> {
    Ok(find_pods(h, q, u)?.is_some())
}
