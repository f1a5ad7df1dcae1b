use crate::dynamics::{disjoint_span_split, is_internally_filled};
use crate::error::{Error, Result};
use crate::events::{buffers, FrameSpec, Selection};
use crate::lattice::{distance, side_distances, Config, Direction, Rect};
use crate::numerics::{side_allowance, Constants};

use super::{trunk_key, Edge, Hierarchy, Vertex};

/// Builds a good hierarchy for `r` satisfied by `a`.
///
/// Each vertex with `short > q^{-1/2}` descends through disjoint spanning
/// splits `R = T₀ ⊋ T₁ ⊋ …` (keeping the part closer to `R`) until
/// `d(T_m, R) ≥ f(R)`, then either grows `T_m` to a locally maximal filled
/// rectangle (when `d(T_m, R) ≤ 2f(R)`) or splits at `T₀` or `T_{m−1}`.
/// The sub-hierarchy of a split's second child is built from the sites of
/// `a` outside the first child, so the increasing events below the two
/// children are witnessed by disjoint sets.
pub fn build_hierarchy(a: &Config, r: &Rect, k: &Constants) -> Result<Hierarchy> {
    k.validate()?;
    let q = k.q();
    let limit = (1.0 / q).ln() / (2.0 * q);
    if r.long() as f64 > limit {
        return Err(Error::Oversize { rect: *r, limit });
    }
    if !is_internally_filled(a, r) {
        return Err(Error::NotFilled(*r));
    }
    let mut builder = Builder { k, leaf_short: q.powf(-0.5), vertices: Vec::new() };
    builder.build(&a.restrict(r), *r)?;
    Hierarchy::new(*r, builder.vertices)
}

struct Builder<'a> {
    k: &'a Constants,
    leaf_short: f64,
    vertices: Vec<Vertex>,
}

impl Builder<'_> {
    fn push(&mut self, rect: Rect) -> usize {
        self.vertices.push(Vertex { rect, children: Vec::new() });
        self.vertices.len() - 1
    }

    fn edge(&mut self, u: usize, to: usize, x: Selection) {
        self.vertices[u].children.push(Edge { to, x });
    }

    fn is_leaf_rect(&self, r: &Rect) -> bool {
        r.short() as f64 <= self.leaf_short
    }

    /// `a` has domain `r` and fills it.
    fn build(&mut self, a: &Config, r: Rect) -> Result<usize> {
        let u = self.push(r);
        if self.is_leaf_rect(&r) {
            return Ok(u);
        }
        let f = side_allowance(&r, self.k);
        // chain[i] = T_i; others[i] = T'_i
        let mut chain = vec![r];
        let mut others = Vec::new();
        while (distance(chain.last().expect("non-empty"), &r) as f64) < f {
            let t = *chain.last().expect("non-empty");
            if t.long() < 2 {
                return Err(Error::Construction(format!(
                    "splits of {r} reached a single cell before leaving distance f = {f:.3}"
                )));
            }
            let split = disjoint_span_split(&a.restrict(&t), &t)?;
            let (near, far) = if distance(&split.s1, &r) <= distance(&split.s2, &r) {
                (split.s1, split.s2)
            } else {
                (split.s2, split.s1)
            };
            chain.push(near);
            others.push(far);
        }
        let m = chain.len() - 1;
        let tm = chain[m];
        if distance(&tm, &r) as f64 <= 2.0 * f {
            let s = grow_maximal(a, tm, &r, f);
            let v = self.build(&a.restrict(&s), s)?;
            let x = if self.vertices[v].children.len() == 1 { growth_label(a, &s, &r) } else { Selection::NONE };
            self.edge(u, v, x);
        } else if m == 1 {
            self.attach_split(u, a, chain[1], others[0])?;
        } else {
            let s = chain[m - 1];
            if self.is_leaf_rect(&s) {
                // T_{m-1} is too thin to be split under the leaf rule; it is
                // internally filled, so it ends the branch as a seed
                let v = self.push(s);
                self.edge(u, v, Selection::NONE);
            } else {
                let v = self.push(s);
                self.edge(u, v, Selection::NONE);
                self.attach_split(v, &a.restrict(&s), chain[m], others[m - 1])?;
            }
        }
        Ok(u)
    }

    /// Adds the children `s1`, `s2` (which span `R_u`) below `u`. The
    /// preferred child gets `a ∩ R_{v₁}`, the other `a ∩ (R_{v₂} \ R_{v₁})`.
    fn attach_split(&mut self, u: usize, a: &Config, s1: Rect, s2: Rect) -> Result<()> {
        let (first, second) = if trunk_key(&s1, 0) <= trunk_key(&s2, 1) { (s1, s2) } else { (s2, s1) };
        let v1 = self.build(&a.restrict(&first), first)?;
        let mut rest = a.restrict(&second);
        if let Some(common) = first.intersection(&second) {
            for site in common.sites() {
                rest.remove(site);
            }
        }
        let v2 = self.build(&rest, second)?;
        self.edge(u, v1, Selection::NONE);
        self.edge(u, v2, Selection::NONE);
        Ok(())
    }
}

/// Grows `t` one infected site at a time while the span stays at distance
/// at least `f` from `r`, taking the lexicographically first candidate.
/// The result `S` is locally maximal: every site of `a` interacting with
/// `S` would bring it closer than `f` to `r`.
fn grow_maximal(a: &Config, t: Rect, r: &Rect, f: f64) -> Rect {
    let mut s = t;
    loop {
        let band = band_around(&s, r);
        let next = a
            .restrict(&band)
            .iter()
            .filter(|&site| !s.contains(site) && s.interacts(&Rect::cell(site.0, site.1)))
            .map(|site| s.bounding(&Rect::cell(site.0, site.1)))
            .find(|grown| distance(grown, r) as f64 >= f);
        match next {
            Some(grown) => s = grown,
            None => return s,
        }
    }
}

/// `s` widened by two on every side, clipped to `r`.
fn band_around(s: &Rect, r: &Rect) -> Rect {
    Rect::new(
        (s.x_lo() - 2).max(r.x_lo()),
        (s.x_hi() + 2).min(r.x_hi()),
        (s.y_lo() - 2).max(r.y_lo()),
        (s.y_hi() + 2).min(r.y_hi()),
    )
    .expect("band contains s")
}

/// Label of a growth edge `R → S` for a locally maximal `S`: every
/// non-empty buffer when no site of `a` interacts with `S`, otherwise all
/// but the side of largest distance (first in direction order).
fn growth_label(a: &Config, s: &Rect, r: &Rect) -> Selection {
    let spec = FrameSpec::nested(*s, *r, Selection::NONE).expect("S inside R");
    let z = buffers(&spec).indicator();
    let band = band_around(s, r);
    let isolated = !a.restrict(&band).iter().any(|site| !s.contains(site) && s.interacts(&Rect::cell(site.0, site.1)));
    if isolated {
        return z;
    }
    let sd = side_distances(s, r).expect("S inside R");
    let far =
        Direction::ALL.into_iter().max_by_key(|&d| (sd.get(d), std::cmp::Reverse(d.index()))).expect("four directions");
    z.with(far, false)
}
