//! The acceptance suite: fourteen criteria, each checked against an oracle
//! that lives here rather than in the library, with one PASS/FAIL line per
//! criterion. Runs without the test harness so the lines are always shown;
//! pass a substring such as `AC-09` to run a subset.

use std::collections::{HashMap, HashSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use bperc_core::hierarchy::{find_pods_with, EventKind, UCache, Vertex};
use bperc_core::montecarlo::{estimate_filled_conditioned, estimate_pc, sample_config, validate_inequality, Verdict};
use bperc_core::numerics::{g, lambda, u_cost_dims, LAMBDA_EXACT};
use bperc_core::{
    al_witness, build_hierarchy, check_good, check_satisfied, closure, disjoint_span_split, event_d1, event_d2,
    percolates, rectangles_process, stats, weighted_count_bound, Config, Constants, Direction, FrameSpec, Hierarchy,
    Rect, Selection, Site, TrialStream,
};

/// Digits of π²/18 as printed in the literature.
const LAMBDA_PRINTED: f64 = 0.548311355616;

/// Identifier, name and check.
type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(limit: Duration, t: Instant) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.1} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

// ---------------------------------------------------------------- oracles

/// `g(z) = −log β(1 − e^{−z})`, straight from the definition.
fn g_ref(z: f64) -> f64 {
    let u = 1.0 - (-z).exp();
    -(0.5 * (u + (u * (4.0 - 3.0 * u)).sqrt())).ln()
}

/// `∫_x^y g` by composite Simpson in `t = log z`, where the integrand
/// `g(e^t)e^t` is smooth.
fn integral_ref(x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    let (a, b) = (x.ln(), y.ln());
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |t: f64| g_ref(t.exp()) * t.exp();
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `U/q` for `long(S) ≤ short(R)`: straight to the diagonal, along it, then
/// out along the long side.
fn diagonal_ref(s: (i64, i64), r: (i64, i64), q: f64) -> f64 {
    let (c, d) = (s.0.min(s.1) as f64, s.0.max(s.1) as f64);
    let (a, b) = (r.0.min(r.1) as f64, r.0.max(r.1) as f64);
    (d - c) * g_ref(d * q) + 2.0 / q * integral_ref(d * q, a * q) + (b - a) * g_ref(a * q)
}

/// `Q(S,R) = s·g((b − t)q) + t·g((a − s)q)` with `dim R = (a,b)`,
/// `dim S = (a − s, b − t)`.
fn q_ref(s: (i64, i64), r: (i64, i64), q: f64) -> f64 {
    let (sx, ty) = (r.0 - s.0, r.1 - s.1);
    let mut v = 0.0;
    if sx > 0 {
        v += sx as f64 * g_ref((r.1 - ty) as f64 * q);
    }
    if ty > 0 {
        v += ty as f64 * g_ref((r.0 - sx) as f64 * q);
    }
    v
}

/// Closure by repeated sweeps: add every site with two infected neighbours
/// until nothing changes. Row-major `w × h` grid.
fn naive_closure(w: usize, h: usize, cells: &[bool]) -> Vec<bool> {
    let mut cur = cells.to_vec();
    loop {
        let mut next = cur.clone();
        for y in 0..h {
            for x in 0..w {
                if cur[y * w + x] {
                    continue;
                }
                let mut n = 0;
                if x > 0 && cur[y * w + x - 1] {
                    n += 1;
                }
                if x + 1 < w && cur[y * w + x + 1] {
                    n += 1;
                }
                if y > 0 && cur[(y - 1) * w + x] {
                    n += 1;
                }
                if y + 1 < h && cur[(y + 1) * w + x] {
                    n += 1;
                }
                if n >= 2 {
                    next[y * w + x] = true;
                }
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn grid_of(sites: impl Fn(Site) -> bool, r: &Rect) -> (usize, usize, Vec<bool>) {
    let (w, h) = (r.width() as usize, r.height() as usize);
    let mut cells = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            cells[y * w + x] = sites((r.x_lo() + x as i64, r.y_lo() + y as i64));
        }
    }
    (w, h, cells)
}

/// `[A ∩ R] = R`, by the sweeping oracle.
fn naive_filled(sites: impl Fn(Site) -> bool, r: &Rect) -> bool {
    let (w, h, cells) = grid_of(|s| r.contains(s) && sites(s), r);
    naive_closure(w, h, &cells).into_iter().all(|b| b)
}

fn side_gaps(s: &Rect, r: &Rect) -> [i64; 4] {
    [r.x_hi() - s.x_hi(), r.y_hi() - s.y_hi(), s.x_lo() - r.x_lo(), s.y_lo() - r.y_lo()]
}

fn dist(s: &Rect, r: &Rect) -> i64 {
    side_gaps(s, r).into_iter().max().expect("four sides")
}

fn nested(s: &Rect, r: &Rect) -> bool {
    side_gaps(s, r).iter().all(|&d| d >= 0)
}

/// `f(R) = δ√short(R)` in the regime `short(R) ≤ B/q` used here.
fn f_ref(r: &Rect, delta: f64) -> f64 {
    delta * (r.short() as f64).sqrt()
}

/// Directions whose buffer `{v ∈ R \ S : v − 2d ∈ S}` has a site.
fn nonempty_buffers(s: &Rect, r: &Rect) -> Vec<Direction> {
    Direction::ALL
        .into_iter()
        .filter(|d| {
            let (dx, dy) = d.vector();
            r.sites().any(|v| !s.contains(v) && s.contains((v.0 - 2 * dx, v.1 - 2 * dy)))
        })
        .collect()
}

fn subrects(r: &Rect) -> Vec<Rect> {
    let mut out = Vec::new();
    for x0 in r.x_lo()..=r.x_hi() {
        for x1 in x0..=r.x_hi() {
            for y0 in r.y_lo()..=r.y_hi() {
                for y1 in y0..=r.y_hi() {
                    out.push(Rect::new(x0, x1, y0, y1).expect("ordered"));
                }
            }
        }
    }
    out
}

// --------------------------------------------- enumeration of hierarchies

#[derive(Debug, Clone)]
struct Node {
    rect: Rect,
    kids: Vec<(Selection, Node)>,
}

impl Node {
    fn vertices(&self) -> usize {
        1 + self.kids.iter().map(|(_, k)| k.vertices()).sum::<usize>()
    }

    fn seeds(&self) -> usize {
        if self.kids.is_empty() {
            1
        } else {
            self.kids.iter().map(|(_, k)| k.seeds()).sum()
        }
    }

    fn to_hierarchy(&self) -> Hierarchy {
        fn walk(n: &Node, out: &mut Vec<Vertex>) -> usize {
            let id = out.len();
            out.push(Vertex { rect: n.rect, children: Vec::new() });
            for (x, k) in &n.kids {
                let to = walk(k, out);
                out[id].children.push(bperc_core::hierarchy::Edge { to, x: *x });
            }
            id
        }
        let mut vertices = Vec::new();
        walk(self, &mut vertices);
        Hierarchy::new(self.rect, vertices).expect("a tree by construction")
    }

    /// Dimensions throughout, without positions or labels.
    fn dims_shape(&self) -> String {
        let kids: Vec<String> = self.kids.iter().map(|(_, k)| k.dims_shape()).collect();
        format!("{}x{}({})", self.rect.width(), self.rect.height(), kids.join(","))
    }
}

/// Every hierarchy on a rectangle, within vertex and seed budgets, that is
/// not excluded by one of these necessary conditions: nesting, leaves
/// exactly the rectangles with `short ≤ q^{-1/2}`, splits spanning their
/// parent with zero labels, single-child gaps at most `2f`, and gaps at
/// least `f` above a vertex with one child. Labels on single-child edges
/// run over all sixteen values, or with `all_labels` off take only the
/// indicator of the nonempty buffers. The library checker then decides
/// goodness.
///
/// With `prune` set, every subtree kept is itself good and subtrees with
/// the same dimensions throughout are kept once. Goodness is a conjunction
/// of conditions on a vertex and its children, so a tree is good exactly
/// when its root conditions hold and its subtrees are good; pruning loses
/// nothing that depends only on dimensions.
struct Enumerator {
    q: f64,
    delta: f64,
    all_labels: bool,
    prune: Option<Constants>,
    memo: HashMap<(Rect, Option<usize>, usize, bool), Vec<Node>>,
}

impl Enumerator {
    fn new(q: f64, delta: f64, all_labels: bool) -> Self {
        Enumerator { q, delta, all_labels, prune: None, memo: HashMap::new() }
    }

    fn is_leaf_size(&self, r: &Rect) -> bool {
        r.short() as f64 <= self.q.powf(-0.5)
    }

    fn trees(&mut self, r: Rect, vmax: Option<usize>, smax: usize) -> Vec<Node> {
        self.collect(r, vmax, smax, false)
    }

    fn splits(&mut self, r: Rect, vmax: Option<usize>, smax: usize) -> Vec<Node> {
        self.collect(r, vmax, smax, true)
    }

    fn collect(&mut self, r: Rect, vmax: Option<usize>, smax: usize, splits_only: bool) -> Vec<Node> {
        if vmax == Some(0) || smax == 0 {
            return Vec::new();
        }
        let key = (r, vmax, smax, splits_only);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let prune = self.prune;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut offer = |out: &mut Vec<Node>, n: Node| match &prune {
            Some(k) => {
                if !seen.contains(&n.dims_shape()) && check_good(&n.to_hierarchy(), k).is_good() {
                    seen.insert(n.dims_shape());
                    out.push(n);
                }
            }
            None => out.push(n),
        };
        if self.is_leaf_size(&r) {
            if !splits_only {
                out.push(Node { rect: r, kids: vec![] });
            }
        } else {
            let below = vmax.map(|v| v - 1);
            let subs = subrects(&r);
            if !splits_only {
                let f = f_ref(&r, self.delta);
                for v in &subs {
                    let d = dist(v, &r) as f64;
                    if d > 2.0 * f {
                        continue;
                    }
                    let children = if *v == r { self.splits(r, below, smax) } else { self.trees(*v, below, smax) };
                    for child in children {
                        if child.kids.len() == 1 && d < f {
                            continue;
                        }
                        let labels: Vec<Selection> = if self.all_labels {
                            Selection::all_labels().collect()
                        } else if child.kids.len() == 1 {
                            vec![Selection::only(&nonempty_buffers(&child.rect, &r))]
                        } else {
                            vec![Selection::NONE]
                        };
                        for x in labels {
                            offer(&mut out, Node { rect: r, kids: vec![(x, child.clone())] });
                        }
                    }
                }
            }
            if smax >= 2 && vmax.is_none_or(|v| v >= 3) {
                for (i, v) in subs.iter().enumerate() {
                    for w in &subs[i..] {
                        if v.bounding(w) != r {
                            continue;
                        }
                        let left = self.trees(*v, vmax.map(|m| m - 2), smax - 1);
                        let right = self.trees(*w, vmax.map(|m| m - 2), smax - 1);
                        for a in &left {
                            for b in &right {
                                if a.seeds() + b.seeds() > smax
                                    || vmax.is_some_and(|m| 1 + a.vertices() + b.vertices() > m)
                                {
                                    continue;
                                }
                                offer(
                                    &mut out,
                                    Node {
                                        rect: r,
                                        kids: vec![(Selection::NONE, a.clone()), (Selection::NONE, b.clone())],
                                    },
                                );
                            }
                        }
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}

/// `Π (1/f(R_u))^{‖x ∧ 1_Z‖}` over single-child edges, from first principles.
fn weight_ref(n: &Node, delta: f64) -> f64 {
    let mut w = 1.0;
    if let [(x, child)] = &n.kids[..] {
        let z = nonempty_buffers(&child.rect, &n.rect);
        let norm = z.iter().filter(|d| x.get(**d)).count() as i32;
        w *= f_ref(&n.rect, delta).powi(-norm);
    }
    for (_, k) in &n.kids {
        w *= weight_ref(k, delta);
    }
    w
}

// -------------------------------------------------------------- criteria

fn ac01() -> Outcome {
    let t = Instant::now();
    let v = lambda();
    let exact = std::f64::consts::PI.powi(2) / 18.0;
    let err = (v - exact).abs();
    let printed = (v - LAMBDA_PRINTED).abs() < 5e-13;
    let (fast, time) = within(Duration::from_secs(1), t);
    outcome(
        err < 1e-9 && printed && fast,
        format!("lambda() = {v:.15}, |lambda() - pi^2/18| = {err:.2e}, printed digits match: {printed}, {time}"),
    )
}

fn ac02() -> Outcome {
    let t = Instant::now();
    let mut rng = TrialStream::new(2).rng(0, 0);
    let mut sandwich_fail = 0;
    let mut ref_dev: f64 = 0.0;
    for _ in 0..1000 {
        let z: f64 = 0.05 * (1.0 - rng.random::<f64>());
        let gz = g(z);
        if !(-0.5 * z.ln() - z.sqrt() <= gz && gz <= -0.5 * z.ln() + z) {
            sandwich_fail += 1;
        }
        ref_dev = ref_dev.max(((gz - g_ref(z)) / gz).abs());
    }
    let grid: Vec<f64> = (0..10_000).map(|i| 1e-4 * (1e5f64).powf(i as f64 / 9_999.0)).collect();
    let vals: Vec<f64> = grid.iter().map(|&z| g(z)).collect();
    let positive = vals.iter().all(|&v| v > 0.0);
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    // second divided differences on the non-uniform grid
    let convex_fail = (1..grid.len() - 1)
        .filter(|&i| {
            let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
            let s1 = (vals[i] - vals[i - 1]) / (x1 - x0);
            let s2 = (vals[i + 1] - vals[i]) / (x2 - x1);
            s2 < s1 - 1e-9 * s1.abs()
        })
        .count();
    let (fast, time) = within(Duration::from_secs(1), t);
    outcome(
        sandwich_fail == 0 && ref_dev < 1e-12 && positive && decreasing && convex_fail == 0 && fast,
        format!(
            "sandwich misses {sandwich_fail}/1000, max rel. dev. from definition {ref_dev:.1e}, \
             positive {positive}, decreasing {decreasing}, convexity misses {convex_fail}, {time}"
        ),
    )
}

fn ac03() -> Outcome {
    let t = Instant::now();
    let mut rng = TrialStream::new(3).rng(0, 0);
    let qs = [0.01, 0.02, 0.05, 0.1, 0.2];
    let mut cases = Vec::new();
    while cases.len() < 50 {
        let q = qs[cases.len() % qs.len()];
        let amax = ((3.0 / q) as i64).min(60);
        let a = rng.random_range(2..=amax);
        let b = rng.random_range(a..=a + 40);
        let d = rng.random_range(1..=a);
        let c = rng.random_range(1..=d);
        let s = if rng.random::<bool>() { (c, d) } else { (d, c) };
        let r = if rng.random::<bool>() { (a, b) } else { (b, a) };
        if s.0 <= r.0 && s.1 <= r.1 {
            cases.push((s, r, q));
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(s, r, q)| {
            let opt = u_cost_dims(s, r, q).expect("nested") / q;
            let closed = diagonal_ref(s, r, q);
            ((opt - closed) / closed).abs()
        })
        .reduce(|| 0.0, f64::max);
    let (fast, time) = within(Duration::from_secs(30), t);
    outcome(
        worst < 1e-6 && fast,
        format!("50 nested pairs, max rel. error of path optimizer vs closed form {worst:.2e}, {time}"),
    )
}

fn ac04() -> Outcome {
    let mut rng = TrialStream::new(4).rng(0, 0);
    let cases: Vec<_> = (0..100)
        .map(|_| {
            let r = (rng.random_range(1..=40i64), rng.random_range(1..=40i64));
            let s = (rng.random_range(1..=r.0), rng.random_range(1..=r.1));
            let q = rng.random_range(0.02..0.3);
            (s, r, q)
        })
        .collect();
    let results: Vec<(f64, f64)> =
        cases.par_iter().map(|&(s, r, q)| (u_cost_dims(s, r, q).expect("nested"), q * q_ref(s, r, q))).collect();
    let violations = results.iter().filter(|(u, qq)| *u > qq * (1.0 + 1e-9) + 1e-12).count();
    let tight = results.iter().map(|(u, qq)| if *qq > 0.0 { u / qq } else { 1.0 }).fold(0.0, f64::max);
    outcome(violations == 0, format!("100 nested pairs, {violations} violations of U <= qQ, max U/(qQ) = {tight:.9}"))
}

fn ac05() -> Outcome {
    let t = Instant::now();
    let square = Rect::square(4).expect("non-empty");
    let exhaustive = (0u32..1 << 16)
        .into_par_iter()
        .filter(|&mask| {
            let cells: Vec<bool> = (0..16).map(|i| mask >> i & 1 == 1).collect();
            let c = Config::from_sites(square, (0..16).filter(|&i| cells[i]).map(|i| ((i % 4) as i64, (i / 4) as i64)))
                .expect("inside");
            let fast = closure(&c);
            let slow = naive_closure(4, 4, &cells);
            (0..16).any(|i| fast.contains(((i % 4) as i64, (i / 4) as i64)) != slow[i])
        })
        .count();
    let eight = Rect::square(8).expect("non-empty");
    let stream = TrialStream::new(5);
    let sampled = (0u64..10_000)
        .into_par_iter()
        .filter(|&i| {
            let p = 0.05 + 0.45 * (i % 100) as f64 / 100.0;
            let c = sample_config(p, &eight, &stream, 0, i).expect("p in range");
            let (w, h, cells) = grid_of(|s| c.contains(s), &eight);
            let slow = naive_closure(w, h, &cells);
            let fast = closure(&c);
            let (_, _, fast_cells) = grid_of(|s| fast.contains(s), &eight);
            fast_cells != slow
        })
        .count();
    let (fast, time) = within(Duration::from_secs(60), t);
    outcome(
        exhaustive == 0 && sampled == 0 && fast,
        format!("mismatches: {exhaustive}/65536 on 4x4, {sampled}/10000 on 8x8, {time}"),
    )
}

/// Percolating samples of `[n]²` at density `p`, by rejection.
fn percolating(n: i64, p: f64, wanted: usize, seed: u64) -> Vec<Config> {
    let r = Rect::square(n).expect("non-empty");
    let stream = TrialStream::new(seed);
    let mut out = Vec::new();
    let mut next = 0u64;
    while out.len() < wanted {
        let batch: Vec<Config> = (next..next + 4096)
            .into_par_iter()
            .map(|i| sample_config(p, &r, &stream, 0, i).expect("p in range"))
            .filter(percolates)
            .collect();
        next += 4096;
        out.extend(batch);
        assert!(next < 100_000_000, "percolation too rare at p = {p}");
    }
    out.truncate(wanted);
    out
}

fn ac06() -> Outcome {
    let samples = percolating(16, 0.13, 10_000, 6);
    let (checked, not_filled, violations) = samples
        .par_iter()
        .map(|a| {
            let forest = rectangles_process(a);
            let rects: HashSet<Rect> = forest.nodes.iter().map(|n| n.rect).collect();
            let mut out = (0usize, 0usize, 0usize);
            for r in rects {
                out.0 += 1;
                if !naive_filled(|s| a.contains(s), &r) {
                    out.1 += 1;
                } else if 2 * a.count_in(&r) < r.phi() as usize {
                    out.2 += 1;
                }
            }
            out
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    outcome(
        not_filled == 0 && violations == 0,
        format!(
            "{checked} internally filled rectangles in 10^4 percolating [16]^2 samples, \
             {violations} with |A cap R| < phi(R)/2, {not_filled} not filled"
        ),
    )
}

fn ac07() -> Outcome {
    let samples = percolating(32, 0.1, 1_000, 7);
    let failures = samples
        .par_iter()
        .map(|a| {
            let mut seen: HashMap<Rect, bool> = HashMap::new();
            let mut bad = 0;
            for k in 1..=32 {
                match al_witness(a, k) {
                    Ok(r) => {
                        let filled = *seen.entry(r).or_insert_with(|| naive_filled(|s| a.contains(s), &r));
                        if !(filled && k <= r.long() && r.long() <= 2 * k && a.domain().contains_rect(&r)) {
                            bad += 1;
                        }
                    }
                    Err(_) => bad += 1,
                }
            }
            bad
        })
        .sum::<usize>();
    outcome(failures == 0, format!("{failures} failures over 1000 samples of [32]^2 and k = 1..32"))
}

/// Internally filled droplets of several shapes, `per_shape` each.
fn filled_droplets(shapes: &[((i64, i64), f64)], per_shape: usize, seed: u64) -> Vec<(Rect, Config)> {
    let mut out = Vec::new();
    for (i, &((w, h), p)) in shapes.iter().enumerate() {
        let r = Rect::with_dims(w, h).expect("positive");
        let s = estimate_filled_conditioned(&r, p, per_shape, 50_000_000, seed + i as u64).expect("p in range");
        assert!(!s.partial, "{w}x{h} at p = {p}: only {} droplets", s.configs.len());
        out.extend(s.configs.into_iter().map(|a| (r, a)));
    }
    out
}

fn ac08() -> Outcome {
    let droplets = filled_droplets(
        &[((8, 8), 0.15), ((10, 12), 0.12), ((12, 12), 0.12), ((6, 14), 0.15), ((16, 16), 0.1)],
        200,
        80,
    );
    let failures: Vec<String> = droplets
        .par_iter()
        .filter_map(|(r, a)| {
            let sp = match disjoint_span_split(a, r) {
                Ok(sp) => sp,
                Err(e) => return Some(format!("{r}: {e}")),
            };
            let w1: HashSet<Site> = sp.witness1.iter().copied().collect();
            let w2: HashSet<Site> = sp.witness2.iter().copied().collect();
            let proper = sp.s1 != *r && sp.s2 != *r && nested(&sp.s1, r) && nested(&sp.s2, r);
            let spans = sp.s1.bounding(&sp.s2) == *r && naive_filled(|s| sp.s1.contains(s) || sp.s2.contains(s), r);
            let disjoint = w1.is_disjoint(&w2);
            let inside = w1.iter().all(|&s| a.contains(s) && sp.s1.contains(s))
                && w2.iter().all(|&s| a.contains(s) && sp.s2.contains(s));
            let fills = naive_filled(|s| w1.contains(&s), &sp.s1) && naive_filled(|s| w2.contains(&s), &sp.s2);
            let stronger = naive_filled(|s| a.contains(s) && !sp.s2.contains(s), &sp.s1)
                && naive_filled(|s| a.contains(s) && !sp.s1.contains(s), &sp.s2);
            (!(proper && spans && disjoint && inside && fills && stronger)).then(|| {
                format!("{r}: proper {proper} spans {spans} disjoint {disjoint} inside {inside} fills {fills} stronger {stronger}")
            })
        })
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{} filled droplets, {} failures{}",
            droplets.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

/// Re-checks a satisfaction certificate from its witnesses: the witness
/// sets are pairwise disjoint and lie in `A`, each seed is filled by its
/// witness, and each growth event holds on its witness alone, with the
/// frame sites of a trunk event empty in `A`.
fn recheck_certificate(h: &Hierarchy, a: &Config) -> Result<usize, String> {
    let cert = check_satisfied(h, a);
    let mut used: HashSet<Site> = HashSet::new();
    for (i, ev) in cert.events.iter().enumerate() {
        for &s in &ev.infected {
            if !a.contains(s) {
                return Err(format!("event {i}: witness site {s:?} not in A"));
            }
            if !used.insert(s) {
                return Err(format!("event {i}: site {s:?} reused"));
            }
        }
        let ok = match (ev.kind, ev.child) {
            (EventKind::Filled, _) => {
                let set: HashSet<Site> = ev.infected.iter().copied().collect();
                naive_filled(|s| set.contains(&s), &h.rect(ev.vertex))
            }
            (kind, Some(child)) => {
                let (ru, rv) = (h.rect(ev.vertex), h.rect(child));
                let x = h.children(ev.vertex).iter().find(|e| e.to == child).expect("edge").x;
                let spec = FrameSpec::nested(rv, ru, x).map_err(|e| e.to_string())?;
                let w = Config::from_sites(ru, ev.infected.iter().copied()).map_err(|e| e.to_string())?;
                match kind {
                    EventKind::D1 => event_d1(&w, &spec),
                    _ => event_d2(&w, &spec) && ev.empty.iter().all(|&s| !a.contains(s)),
                }
            }
            (_, None) => false,
        };
        if !ok {
            return Err(format!("event {i} ({:?} at {}) not certified by its witness", ev.kind, ev.vertex));
        }
    }
    Ok(cert.events.len())
}

fn ac09() -> Outcome {
    let t = Instant::now();
    let p = |q: f64| -(-q).exp_m1();
    let mut failures = Vec::new();
    let mut total = 0;
    let mut events = 0;
    for (q, shapes) in
        [(0.2, vec![((4, 4), 250), ((3, 4), 150), ((4, 3), 150), ((3, 3), 150)]), (0.3, vec![((2, 2), 300)])]
    {
        let k = Constants::with_q(q).expect("valid");
        for (i, (dims, n)) in shapes.into_iter().enumerate() {
            let droplets = filled_droplets(&[(dims, p(q))], n, 900 + 10 * i as u64 + (q * 100.0) as u64);
            total += droplets.len();
            for (r, a) in droplets {
                let h = match build_hierarchy(&a, &r, &k) {
                    Ok(h) => h,
                    Err(e) => {
                        failures.push(format!("q = {q}, {r}: {e}"));
                        continue;
                    }
                };
                let good = check_good(&h, &k);
                if !good.is_good() {
                    failures.push(format!("q = {q}, {r}: not good: {:?}", good.summary()));
                }
                if !check_satisfied(&h, &a).passed {
                    failures.push(format!("q = {q}, {r}: certificate rejected"));
                }
                match recheck_certificate(&h, &a) {
                    Ok(n) => events += n,
                    Err(e) => failures.push(format!("q = {q}, {r}: {e}")),
                }
            }
        }
    }
    let (fast, time) = within(Duration::from_secs(300), t);
    outcome(
        failures.is_empty() && total >= 1000 && fast,
        format!(
            "{total} droplets at q in {{0.2, 0.3}}, {events} witnessed events, {} failures{}, {time}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn ac10() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut labelled = 0;
    for (dims, q, delta) in [((4, 4), 0.2, 0.05), ((4, 4), 0.2, 1.0), ((5, 5), 0.2, 1.0), ((6, 6), 0.2, 0.5)] {
        let r = Rect::with_dims(dims.0, dims.1).expect("positive");
        let k = Constants { delta, ..Constants::with_q(q).expect("valid") };
        let mut en = Enumerator::new(q, delta, true);
        let mut totals: HashMap<(usize, usize), (usize, f64)> = HashMap::new();
        let mut weight_mismatch = 0;
        let mut light = 0;
        for n in en.trees(r, Some(3), 3) {
            let h = n.to_hierarchy();
            if !check_good(&h, &k).is_good() {
                continue;
            }
            let w = weight_ref(&n, delta);
            if (stats(&h, &k).weight - w).abs() > 1e-12 * w {
                weight_mismatch += 1;
            }
            if w < 1.0 {
                light += 1;
            }
            let e = totals.entry((n.vertices(), n.seeds())).or_default();
            e.0 += 1;
            e.1 += w;
        }
        let mut keys: Vec<_> = totals.keys().copied().collect();
        keys.sort();
        let mut parts = Vec::new();
        for (nv, m) in keys {
            let (count, sum) = totals[&(nv, m)];
            let bound = weighted_count_bound(nv as u64, m as u64, &r).expect("N >= M >= 1");
            pass &= sum <= bound;
            parts.push(format!("(N={nv},M={m}): {count} good, sum w = {sum:.4} <= {bound:.3e}"));
        }
        pass &= weight_mismatch == 0 && !parts.is_empty();
        labelled += light;
        lines.push(format!(
            "{}x{} q={q} delta={delta}: {} [weight < 1: {light}, weight mismatches {weight_mismatch}]",
            dims.0,
            dims.1,
            parts.join("; ")
        ));
    }
    // a growth chain with a nonzero label must occur somewhere
    outcome(pass && labelled > 0, lines.join(" | "))
}

fn ac11() -> Outcome {
    let q = 0.2;
    let mut pass = true;
    let mut lines = Vec::new();
    for (dims, delta, vmax) in [((5, 5), 0.5, Some(5)), ((4, 4), 0.05, None), ((4, 4), 1.0, None), ((3, 4), 1.0, None)]
    {
        let r = Rect::with_dims(dims.0, dims.1).expect("positive");
        let k = Constants { delta, ..Constants::with_q(q).expect("valid") };
        let mut en = Enumerator::new(q, delta, false);
        en.prune = Some(k);
        let mut shapes: HashMap<String, Hierarchy> = HashMap::new();
        for n in en.trees(r, vmax, 3) {
            shapes.entry(n.dims_shape()).or_insert_with(|| n.to_hierarchy());
        }
        let mut shapes: Vec<(String, Hierarchy)> = shapes.into_iter().collect();
        shapes.sort_by(|a, b| a.0.cmp(&b.0));
        let results: Vec<Result<usize, String>> = shapes
            .par_iter()
            .map_init(
                || (UCache::new(q).expect("q > 0"), HashMap::new()),
                |(cache, memo), (shape, h)| {
                    let mut u_ref = |s: (i64, i64), r: (i64, i64)| -> f64 {
                        *memo.entry((s, r)).or_insert_with(|| u_cost_dims(s, r, q).expect("nested"))
                    };
                    let seeds = h.leaves();
                    let sum = seeds.iter().fold((0, 0), |acc, &w| {
                        let d = h.rect(w).dims();
                        (acc.0 + d.0, acc.1 + d.1)
                    });
                    let lhs: f64 =
                        h.single_child_edges().iter().map(|&(u, v, _)| u_ref(h.rect(v).dims(), h.rect(u).dims())).sum();
                    let slack = 2.0 * (seeds.len() as f64 - 1.0) * q * g(q.sqrt());
                    let mut checked = 0;
                    for u in std::iter::once(None).chain((0..h.len()).map(Some)) {
                        let w = find_pods_with(h, u, cache)
                            .map_err(|e| format!("{shape}: {e}"))?
                            .ok_or_else(|| format!("{shape}: no pods for u = {u:?}"))?;
                        // recompute the witness from scratch
                        let ru = u.map_or(r.dims(), |u| h.rect(u).dims());
                        let rhs = if u.is_none() {
                            u_ref(w.s1_dims, r.dims())
                        } else {
                            u_ref(w.s1_dims, ru) + u_ref(w.s2_dims, r.dims())
                        } - slack;
                        let dims_ok = if u.is_none() {
                            w.s1_dims.0 <= sum.0 && w.s1_dims.1 <= sum.1
                        } else {
                            w.s1_dims.0 + w.s2_dims.0 - ru.0 <= sum.0
                                && w.s1_dims.1 + w.s2_dims.1 - ru.1 <= sum.1
                                && w.s2_dims.0 >= ru.0
                                && w.s2_dims.1 >= ru.1
                        };
                        if !(dims_ok && lhs >= rhs - 1e-9 * (1.0 + rhs.abs())) {
                            return Err(format!("{shape}: witness for u = {u:?} does not check out"));
                        }
                        checked += 1;
                    }
                    Ok(checked)
                },
            )
            .collect();
        let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
        let checks: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
        pass &= errors.is_empty() && !shapes.is_empty();
        lines.push(format!(
            "{}x{} delta={delta}: {} good hierarchies (up to positions and labels), {checks} pod checks, {} failures{}",
            dims.0,
            dims.1,
            shapes.len(),
            errors.len(),
            errors.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ));
    }
    outcome(pass, lines.join(" | "))
}

fn ac12() -> Outcome {
    let t = Instant::now();
    let reports = match validate_inequality("all", 100_000, 12) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let fails: Vec<String> =
        reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| format!("{}: {}", r.suite, r.case)).collect();
    let passes = |suite: &str| reports.iter().filter(|r| r.suite == suite && r.verdict == Verdict::Pass).count();
    let (gap, seeds, frame) = (passes("double-gap"), passes("seeds"), passes("frame-event"));
    let unknown = reports.iter().filter(|r| r.verdict == Verdict::Unknown).count();
    let (fast, time) = within(Duration::from_secs(600), t);
    outcome(
        fails.is_empty() && gap > 0 && seeds > 0 && frame > 0 && fast,
        format!(
            "{} cases at 10^5 trials: PASS double-gap {gap}, seeds {seeds}, frame-event {frame}; \
             {unknown} UNKNOWN (vacuous or precondition false); FAIL {:?}; {time}",
            reports.len(),
            fails
        ),
    )
}

fn ac13() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [128u64, 256, 512, 1024] {
        let e = match estimate_pc(n, 200, 1e-3, 13) {
            Ok(e) => e,
            Err(err) => return outcome(false, err.to_string()),
        };
        let log_n = (n as f64).ln();
        let (mid, hi) = (e.p_hat * log_n, e.ci_hi * log_n);
        pass &= mid > 0.0 && mid < LAMBDA_EXACT && hi < LAMBDA_EXACT;
        parts.push(format!("n={n}: p_c log n = {mid:.4} (bracket top {hi:.4})"));
    }
    let (fast, time) = within(Duration::from_secs(1800), t);
    outcome(pass && fast, format!("{}; pi^2/18 = {LAMBDA_EXACT:.4}; {time}", parts.join(", ")))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bperc")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn ac14() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("a.json");
    std::fs::write(&config, r#"{"domain": [0, 5, 0, 5], "infected": [[0,0],[1,1],[2,2],[3,3],[4,4],[5,5]]}"#)
        .expect("write");
    let hier = dir.path().join("h.json");
    let (code, _) = run_cli(&[
        "hier",
        "build",
        "--dims",
        "4x4",
        "--q",
        "0.2",
        "--count",
        "20",
        "--out",
        hier.to_str().expect("utf-8"),
    ]);
    if code != 0 {
        return outcome(false, format!("hier build exited {code}"));
    }
    let config = config.to_str().expect("utf-8");
    let hier = hier.to_str().expect("utf-8");
    let runs: Vec<Vec<&str>> = vec![
        vec!["sim", "--input", config],
        vec!["sim", "--dims", "40x40", "--p", "0.08", "--seed", "3"],
        vec!["pc", "--n", "64,128", "--trials", "200", "--seed", "7"],
        vec![
            "event-prob",
            "--event",
            "d2",
            "--dims",
            "12x12",
            "--s",
            "2,9,2,9",
            "--x",
            "+x,-y",
            "--p",
            "0.1",
            "--trials",
            "5000",
        ],
        vec!["event-prob", "--event", "filled", "--dims", "6x6", "--p", "0.2", "--format", "json"],
        vec!["bound", "--kind", "droplet", "--dims", "3x500"],
        vec!["bound", "--kind", "cor-key", "--dims", "20x20", "--s", "2,17,2,17", "--x", "+x", "--format", "csv"],
        vec!["g-table", "--points", "200"],
        vec!["hier", "build", "--dims", "12x12", "--sample-p", "0.1", "--q", "0.05", "--count", "5", "--pods"],
        vec!["hier", "check", "--input", hier, "--q", "0.2", "--pods"],
        vec!["validate", "--suite", "all", "--trials", "2000", "--workers", "2"],
    ];
    let mut bad = Vec::new();
    for args in &runs {
        let (c1, o1) = run_cli(args);
        let (c2, o2) = run_cli(args);
        if c1 != c2 || o1 != o2 || o1.is_empty() || c1 == 2 {
            bad.push(format!("{} (exit {c1}/{c2})", args[..2].join(" ")));
        }
    }
    // a replay writes to the recorded path and must reproduce the file
    let mut replayed = 0;
    for (name, args) in [
        ("pc.csv", vec!["pc", "--n", "64", "--trials", "100", "--seed", "9"]),
        ("bound.json", vec!["bound", "--kind", "seeds", "--dims", "30x40"]),
        ("hier.json", vec!["hier", "build", "--dims", "4x4", "--q", "0.2", "--count", "3"]),
    ] {
        let path = dir.path().join(name);
        let path = path.to_str().expect("utf-8");
        let mut first = args.clone();
        first.extend(["--out", path]);
        let (c1, _) = run_cli(&first);
        let original = std::fs::read(path).expect("written");
        let (c2, _) = run_cli(&["rerun", path]);
        let again = std::fs::read(path).expect("rewritten");
        if c1 != c2 || original != again {
            bad.push(format!("rerun of {} (exit {c1}/{c2})", args[0]));
        }
        replayed += 1;
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} invocations over all subcommands run twice, {replayed} replays, {} differ: {bad:?}",
            runs.len(),
            bad.len()
        ),
    )
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 14] = [
        ("AC-01", "lambda = pi^2/18", ac01),
        ("AC-02", "g sandwich, monotone, convex", ac02),
        ("AC-03", "W optimizer vs diagonal closed form", ac03),
        ("AC-04", "U <= qQ", ac04),
        ("AC-05", "closure vs naive fixed point", ac05),
        ("AC-06", "filled rectangles hold phi/2 sites", ac06),
        ("AC-07", "Aizenman-Lebowitz witnesses", ac07),
        ("AC-08", "disjoint span split", ac08),
        ("AC-09", "hierarchy round trip", ac09),
        ("AC-10", "weighted counting", ac10),
        ("AC-11", "pod inequalities", ac11),
        ("AC-12", "probability-inequality suite", ac12),
        ("AC-13", "threshold sanity", ac13),
        ("AC-14", "CLI determinism", ac14),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {id} {name}: {} ({:.1} s)",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
