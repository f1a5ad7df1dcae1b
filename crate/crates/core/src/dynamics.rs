//! The two-neighbour automaton, closure, crossing predicates and the
//! rectangles process.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Config, Direction, Rect, Site};

/// Orientation of a double gap: `Vertical` means two adjacent empty columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Vertical,
    Horizontal,
}

#[inline]
fn for_each_neighbour(i: usize, w: usize, h: usize, mut f: impl FnMut(usize)) {
    let col = i / h;
    let row = i % h;
    if col > 0 {
        f(i - h);
    }
    if col + 1 < w {
        f(i + h);
    }
    if row > 0 {
        f(i - 1);
    }
    if row + 1 < h {
        f(i + 1);
    }
}

/// One synchronous update: adds every site with at least two infected
/// neighbours inside the domain.
pub fn step(c: &Config) -> Config {
    let (w, h) = c.domain().dims();
    let (w, h) = (w as usize, h as usize);
    let mut out = c.clone();
    for i in 0..w * h {
        if c.get_index(i) {
            continue;
        }
        let mut n = 0;
        for_each_neighbour(i, w, h, |j| n += c.get_index(j) as u8);
        if n >= 2 {
            out.set_index(i);
        }
    }
    out
}

/// The set of eventually infected sites, computed within the domain of `c`.
pub fn closure(c: &Config) -> Config {
    let (w, h) = c.domain().dims();
    let (w, h) = (w as usize, h as usize);
    let mut out = c.clone();
    let mut count = vec![0u8; w * h];
    let mut stack: Vec<usize> = Vec::with_capacity(c.len());
    for (wi, &word) in c.bits_words().iter().enumerate() {
        let mut word = word;
        while word != 0 {
            stack.push(wi * 64 + word.trailing_zeros() as usize);
            word &= word - 1;
        }
    }
    while let Some(i) = stack.pop() {
        for_each_neighbour(i, w, h, |j| {
            if !out.get_index(j) {
                count[j] += 1;
                if count[j] == 2 {
                    out.set_index(j);
                    stack.push(j);
                }
            }
        });
    }
    out
}

/// `[A ∩ r]` computed inside `r`.
pub fn closure_within(a: &Config, r: &Rect) -> Config {
    closure(&a.restrict(r))
}

/// Whether `[A] ` is the whole domain of `A`.
pub fn percolates(a: &Config) -> bool {
    closure(a).is_full()
}

/// `[A ∩ R] = R`.
pub fn is_internally_filled(a: &Config, r: &Rect) -> bool {
    closure_within(a, r).is_full()
}

fn line_occupied(a: &Config, r: &Rect, axis: Axis, at: i64) -> bool {
    let line = match axis {
        Axis::Vertical => Rect::new(at, at, r.y_lo(), r.y_hi()),
        Axis::Horizontal => Rect::new(r.x_lo(), r.x_hi(), at, at),
    }
    .expect("line inside a non-empty rectangle");
    a.count_in(&line) > 0
}

/// First `j` such that lines `j` and `j + 1` of `R` (columns for
/// `Vertical`, rows for `Horizontal`) contain no site of `A`. Rectangles of
/// width (height) 1 have no adjacent pair and give `None`.
pub fn double_gap(a: &Config, r: &Rect, axis: Axis) -> Option<i64> {
    let (lo, hi) = match axis {
        Axis::Vertical => (r.x_lo(), r.x_hi()),
        Axis::Horizontal => (r.y_lo(), r.y_hi()),
    };
    let mut prev_empty = false;
    for j in lo..=hi {
        let empty = !line_occupied(a, r, axis, j);
        if empty && prev_empty {
            return Some(j - 1);
        }
        prev_empty = empty;
    }
    None
}

/// Whether `R` is crossed starting from the side `from`: no double gap
/// across the direction of travel and the far line meets `A`. `NegX` is
/// left-to-right, `NegY` bottom-to-top.
pub fn crossed(a: &Config, r: &Rect, from: Direction) -> bool {
    let axis = if from.is_horizontal() { Axis::Vertical } else { Axis::Horizontal };
    double_gap(a, r, axis).is_none() && line_occupied(a, r, axis, r.side(from.opposite()))
}

/// A subset `A' ⊆ A ∩ R` with `[A'] = R` from which no site can be removed.
///
/// One pass in lexicographic order suffices: closure is monotone, so a site
/// kept once stays necessary after later removals.
pub fn minimal_percolating_subset(a: &Config, r: &Rect) -> Result<Config> {
    let mut cur = a.restrict(r);
    if !closure(&cur).is_full() {
        return Err(Error::NotFilled(*r));
    }
    for s in cur.sites() {
        cur.remove(s);
        if !closure(&cur).is_full() {
            cur.insert(s).expect("site lies in the domain");
        }
    }
    Ok(cur)
}

/// One node of the rectangles-process merge history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeNode {
    pub rect: Rect,
    /// `(older, newer)` for merged nodes, `None` for single sites.
    pub children: Option<(usize, usize)>,
}

/// Merge history of the rectangles process. Every node rectangle is
/// internally filled by the sites at its leaves, and the leaf sets of the
/// two children of a node are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeForest {
    pub nodes: Vec<MergeNode>,
    /// Final pairwise non-interacting rectangles, sorted by lower-left corner.
    pub roots: Vec<usize>,
}

impl MergeForest {
    pub fn rect(&self, i: usize) -> Rect {
        self.nodes[i].rect
    }

    /// The infected sites at the leaves below node `i`.
    pub fn leaves(&self, i: usize) -> Vec<Site> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(n) = stack.pop() {
            match self.nodes[n].children {
                Some((a, b)) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => out.push(self.nodes[n].rect.lower_left()),
            }
        }
        out.sort_unstable();
        out
    }
}

/// Runs the rectangles process on the sites of `a`.
///
/// Sites enter in lexicographic order. The entering rectangle is merged
/// repeatedly with the interacting active rectangle of smallest lower-left
/// corner, replacing both by the bounding rectangle, until it interacts
/// with none; active rectangles stay pairwise non-interacting, so at the end
/// their union is `[A]`.
pub fn rectangles_process(a: &Config) -> MergeForest {
    let mut nodes: Vec<MergeNode> = Vec::with_capacity(2 * a.len());
    let mut active: Vec<usize> = Vec::new();
    for (x, y) in a.iter() {
        nodes.push(MergeNode { rect: Rect::cell(x, y), children: None });
        let mut cur = nodes.len() - 1;
        loop {
            let rect = nodes[cur].rect;
            let partner = active
                .iter()
                .enumerate()
                .filter(|(_, &n)| nodes[n].rect.interacts(&rect))
                .min_by_key(|(_, &n)| (nodes[n].rect.lower_left(), nodes[n].rect))
                .map(|(k, _)| k);
            let Some(k) = partner else { break };
            let other = active.swap_remove(k);
            nodes.push(MergeNode { rect: nodes[other].rect.bounding(&rect), children: Some((other, cur)) });
            cur = nodes.len() - 1;
        }
        active.push(cur);
    }
    active.sort_by_key(|&n| (nodes[n].rect.lower_left(), nodes[n].rect));
    MergeForest { nodes, roots: active }
}

/// Two rectangles disjointly internally filled by `A` whose span is `R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanSplit {
    pub s1: Rect,
    pub s2: Rect,
    pub witness1: Vec<Site>,
    pub witness2: Vec<Site>,
}

/// Splits an internally filled `R` into two disjointly internally filled
/// rectangles spanning `R`: the final merge of the rectangles process run
/// on a minimal percolating subset of `A ∩ R`.
pub fn disjoint_span_split(a: &Config, r: &Rect) -> Result<SpanSplit> {
    if r.long() < 2 {
        return Err(Error::SingleCell(*r));
    }
    let minimal = minimal_percolating_subset(a, r)?;
    let forest = rectangles_process(&minimal);
    let [root] = forest.roots[..] else {
        return Err(Error::Construction(format!(
            "rectangles process on a filling set of {r} left {} rectangles",
            forest.roots.len()
        )));
    };
    let (c1, c2) =
        forest.nodes[root].children.ok_or_else(|| Error::Construction(format!("{r} spanned by a single site")))?;
    Ok(SpanSplit { s1: forest.rect(c1), s2: forest.rect(c2), witness1: forest.leaves(c1), witness2: forest.leaves(c2) })
}

/// An internally filled rectangle `R ⊆ domain` with `k ≤ long(R) ≤ 2k`,
/// found by descending the merge history from the domain towards the child
/// of larger long side.
pub fn al_witness(a: &Config, k: i64) -> Result<Rect> {
    let domain = a.domain();
    if k < 1 || k > domain.long() {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {}]", domain.long())));
    }
    let forest = rectangles_process(a);
    let root = match forest.roots[..] {
        [root] if forest.rect(root) == domain => root,
        _ => return Err(Error::NotPercolating(domain)),
    };
    let mut node = root;
    while forest.rect(node).long() > 2 * k {
        let (c1, c2) = forest.nodes[node].children.expect("a rectangle longer than 2 is a merge");
        // long(node) <= long(c1) + long(c2) + 1, so the longer child has long >= k
        node = if forest.rect(c1).long() >= forest.rect(c2).long() { c1 } else { c2 };
    }
    Ok(forest.rect(node))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(n: i64) -> Config {
        Config::from_sites(Rect::square(n).unwrap(), (0..n).map(|i| (i, i))).unwrap()
    }

    #[test]
    fn step_examples() {
        let d = Rect::square(2).unwrap();
        assert!(step(&Config::empty(d)).is_empty());
        let c = Config::from_sites(d, [(0, 0), (1, 1)]).unwrap();
        assert!(step(&c).is_full());
        let d = Rect::square(5).unwrap();
        let row = Config::from_sites(d, (0..5).map(|x| (x, 2))).unwrap();
        assert_eq!(step(&row), row);
    }

    #[test]
    fn diagonal_fills_square() {
        for n in 1..=8 {
            assert!(closure(&diag(n)).is_full(), "n = {n}");
        }
        assert!(closure(&Config::empty(Rect::square(4).unwrap())).is_empty());
    }

    #[test]
    fn double_gap_examples() {
        let r = Rect::new(0, 2, 0, 1).unwrap();
        let empty = Config::empty(r);
        assert_eq!(double_gap(&empty, &r, Axis::Vertical), Some(0));
        let c = Config::from_sites(r, [(2, 0)]).unwrap();
        assert_eq!(double_gap(&c, &r, Axis::Vertical), Some(0));
        let c = Config::from_sites(r, [(0, 0), (1, 1), (2, 0)]).unwrap();
        assert_eq!(double_gap(&c, &r, Axis::Vertical), None);
        let thin = Rect::new(0, 0, 0, 5).unwrap();
        assert_eq!(double_gap(&Config::empty(thin), &thin, Axis::Vertical), None);
    }

    #[test]
    fn crossing_examples() {
        let r = Rect::new(0, 6, 0, 3).unwrap();
        let full = Config::full(r);
        for d in Direction::ALL {
            assert!(crossed(&full, &r, d));
            assert!(!crossed(&Config::empty(r), &r, d));
        }
        let alt = Config::from_sites(r, [(0, 0), (2, 1), (4, 0), (6, 3)]).unwrap();
        assert!(crossed(&alt, &r, Direction::NegX));
        assert!(crossed(&alt, &r, Direction::PosX));
        let no_last = Config::from_sites(r, [(0, 0), (2, 1), (4, 0), (5, 3)]).unwrap();
        assert!(!crossed(&no_last, &r, Direction::NegX));
    }

    #[test]
    fn minimal_subset_of_diagonal_is_diagonal() {
        for n in 1..=6 {
            let d = diag(n);
            let m = minimal_percolating_subset(&d, &d.domain()).unwrap();
            assert_eq!(m, d);
        }
        let r = Rect::square(3).unwrap();
        assert!(minimal_percolating_subset(&Config::empty(r), &r).is_err());
    }

    #[test]
    fn split_of_domino() {
        let r = Rect::new(0, 0, 0, 1).unwrap();
        let sp = disjoint_span_split(&Config::full(r), &r).unwrap();
        let mut cells = [sp.s1, sp.s2];
        cells.sort();
        assert_eq!(cells, [Rect::cell(0, 0), Rect::cell(0, 1)]);
        assert!(disjoint_span_split(&Config::full(Rect::cell(0, 0)), &Rect::cell(0, 0)).is_err());
    }

    #[test]
    fn split_of_three_diagonal() {
        let d = diag(3);
        let sp = disjoint_span_split(&d, &d.domain()).unwrap();
        // sites enter in order (0,0), (1,1), (2,2); the last merge joins the
        // 2x2 droplet with the far corner
        assert_eq!(sp.s1, Rect::square(2).unwrap());
        assert_eq!(sp.s2, Rect::cell(2, 2));
        assert_eq!(sp.witness1, vec![(0, 0), (1, 1)]);
        assert_eq!(sp.witness2, vec![(2, 2)]);
    }

    #[test]
    fn al_witness_on_diagonal() {
        let d = diag(16);
        for k in 1..=16 {
            let w = al_witness(&d, k).unwrap();
            assert!(k <= w.long() && w.long() <= 2 * k, "k = {k}, got {w}");
            assert!(is_internally_filled(&d, &w));
        }
        assert_eq!(al_witness(&d, 16).unwrap(), d.domain());
        assert!(al_witness(&d, 0).is_err());
        let mut broken = d.clone();
        broken.remove((5, 5));
        assert!(al_witness(&broken, 3).is_err());
    }

    fn arb_config(max: i64) -> impl Strategy<Value = Config> {
        (1..=max, 1..=max).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<bool>(), (w * h) as usize)
                .prop_map(move |mask| Config::from_row_major(Rect::with_dims(w, h).unwrap(), &mask))
        })
    }

    proptest! {
        #[test]
        fn closure_is_monotone(a in arb_config(8), extra in proptest::collection::vec((0i64..8, 0i64..8), 0..10)) {
            let mut b = a.clone();
            for s in extra {
                if b.domain().contains(s) {
                    b.insert(s).unwrap();
                }
            }
            prop_assert!(closure(&a).is_subset_of(&closure(&b)));
        }

        #[test]
        fn closure_is_idempotent_and_extensive(a in arb_config(8)) {
            let c = closure(&a);
            prop_assert!(a.is_subset_of(&c));
            prop_assert_eq!(closure(&c), c.clone());
            prop_assert_eq!(step(&c), c);
        }

        #[test]
        fn process_roots_cover_closure(a in arb_config(8)) {
            let forest = rectangles_process(&a);
            let mut union = Config::empty(a.domain());
            for &r in &forest.roots {
                union.fill_rect(&forest.rect(r));
            }
            prop_assert_eq!(union, closure(&a));
            for &r in &forest.roots {
                let leaves = Config::from_sites(a.domain(), forest.leaves(r)).unwrap();
                prop_assert!(is_internally_filled(&leaves, &forest.rect(r)));
            }
        }

        #[test]
        fn crossing_from_filled_column_infects_rectangle(a in arb_config(8)) {
            let dom = a.domain();
            if dom.width() >= 2 {
                let r = Rect::new(dom.x_lo() + 1, dom.x_hi(), dom.y_lo(), dom.y_hi()).unwrap();
                if crossed(&a, &r, Direction::NegX) {
                    let mut b = a.clone();
                    b.fill_rect(&Rect::new(dom.x_lo(), dom.x_lo(), dom.y_lo(), dom.y_hi()).unwrap());
                    prop_assert!(closure(&b).covers(&r));
                }
            }
        }
    }
}
