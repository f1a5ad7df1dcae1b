//! Empirical checks of probability inequalities against their bounds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{crossed, double_gap, is_internally_filled, Axis};
use crate::error::{Error, Result};
use crate::events::{frame, FrameSpec, Selection};
use crate::lattice::{Config, Direction, Rect};
use crate::numerics::{cor_key_bound, crossing_bounds, seeds_bound, BoundReport, Constants};

use super::{sample_config, Estimate, TrialStream};

/// Suite names accepted by [`validate_inequality`], besides `all`.
pub const SUITES: [&str; 5] = ["double-gap", "crossing", "seeds", "frame-event", "vbk"];

/// Slack, in standard errors, allowed above the bound.
const SLACK_SE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The bound is at least 1 or a precondition failed, so nothing is claimed.
    Unknown,
}

/// One empirical frequency compared with one bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: String,
    pub case: String,
    pub empirical: Estimate,
    pub bound: f64,
    /// Allowed excess over the bound: three standard errors.
    pub slack: f64,
    pub preconditions: BTreeMap<String, bool>,
    pub verdict: Verdict,
}

fn verdict(p_hat: f64, bound: f64, slack: f64, preconditions_hold: bool) -> Verdict {
    if !preconditions_hold || bound.is_nan() || bound >= 1.0 {
        Verdict::Unknown
    } else if p_hat <= bound + slack {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn against_bound(suite: &str, case: String, est: Estimate, bound: &BoundReport) -> ValidationReport {
    let slack = SLACK_SE * est.std_error();
    ValidationReport {
        suite: suite.to_string(),
        verdict: verdict(est.p_hat, bound.value, slack, bound.valid),
        case,
        bound: bound.value,
        slack,
        preconditions: bound.flags.clone(),
        empirical: est,
    }
}

/// Counts, over trials on one lane, how often each of several predicates
/// holds on the same samples.
fn count_joint<const K: usize, F>(p: f64, r: &Rect, trials: u64, stream: &TrialStream, lane: u64, events: F) -> [u64; K]
where
    F: Fn(&Config) -> [bool; K] + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let a = sample_config(p, r, stream, lane, i).expect("p in [0, 1]");
            events(&a).map(|b| b as u64)
        })
        .reduce(
            || [0; K],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        )
}

struct Ctx {
    trials: u64,
    seed: u64,
    stream: TrialStream,
}

impl Ctx {
    fn estimate<F: Fn(&Config) -> bool + Sync>(&self, name: &str, p: f64, r: &Rect, lane: u64, event: F) -> Estimate {
        let [k] = count_joint(p, r, self.trials, &self.stream, lane, |a| [event(a)]);
        Estimate::from_counts(name, p, k, self.trials, self.seed)
    }
}

fn double_gap_suite(ctx: &Ctx) -> Vec<ValidationReport> {
    let r = Rect::with_dims(20, 10).expect("non-empty");
    let k = Constants::with_p(0.1).expect("valid p");
    let (bound, _) = crossing_bounds(&r, &k);
    let est = ctx.estimate("no-vertical-double-gap", k.p, &r, 10, |a| double_gap(a, &r, Axis::Vertical).is_none());
    vec![against_bound("double-gap", format!("R = 20x10, p = {}", k.p), est, &bound)]
}

fn crossing_suite(ctx: &Ctx) -> Vec<ValidationReport> {
    let r = Rect::with_dims(20, 10).expect("non-empty");
    let k = Constants::with_p(0.1).expect("valid p");
    let (_, bound) = crossing_bounds(&r, &k);
    let est = ctx.estimate("crossed-left-to-right", k.p, &r, 20, |a| crossed(a, &r, Direction::NegX));
    vec![against_bound("crossing", format!("R = 20x10, p = {}", k.p), est, &bound)]
}

/// `(width, height, p)`. The last case breaks `short · p ≤ δ` at the
/// default `δ` and its bound exceeds 1; it is kept to exercise the
/// vacuity rule.
const SEED_CASES: [(i64, i64, f64); 3] = [(2, 2, 0.02), (4, 4, 0.01), (4, 4, 0.05)];

fn seeds_suite(ctx: &Ctx) -> Vec<ValidationReport> {
    SEED_CASES
        .iter()
        .enumerate()
        .map(|(i, &(w, h, p))| {
            let r = Rect::with_dims(w, h).expect("non-empty");
            let k = Constants::with_p(p).expect("valid p");
            let bound = seeds_bound(&r, &k);
            let est = ctx.estimate("internally-filled", p, &r, 30 + i as u64, |a| is_internally_filled(a, &r));
            against_bound("seeds", format!("R = {w}x{h}, p = {p}"), est, &bound)
        })
        .collect()
}

/// Small constants under which modest rectangles are 1- or 2-critical.
pub fn frame_event_constants(q: f64) -> Constants {
    Constants {
        b: 1.2,
        c: 1.2,
        delta: 0.9,
        l1: 4.0,
        l2: 10.0,
        l3: 10.0,
        l4: 10.0,
        l5: 10.0,
        l6: 10.0,
        ..Constants::with_q(q).expect("valid q")
    }
}

struct FrameCase {
    q: f64,
    r: (i64, i64),
    s: (i64, i64, i64, i64),
    x: &'static [Direction],
    j: u8,
}

const FRAME_CASES: [FrameCase; 5] = [
    FrameCase { q: 0.01, r: (16, 16), s: (1, 13, 1, 13), x: &[], j: 1 },
    FrameCase { q: 0.01, r: (16, 16), s: (1, 13, 1, 13), x: &[Direction::PosX], j: 1 },
    FrameCase { q: 0.01, r: (16, 16), s: (2, 13, 2, 13), x: &[Direction::PosX, Direction::PosY], j: 1 },
    FrameCase { q: 0.02, r: (14, 14), s: (2, 11, 2, 11), x: &[Direction::NegY], j: 1 },
    FrameCase { q: 0.05, r: (26, 28), s: (8, 15, 9, 18), x: &[], j: 2 },
];

fn frame_event_suite(ctx: &Ctx) -> Result<Vec<ValidationReport>> {
    FRAME_CASES
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = frame_event_constants(c.q);
            let r = Rect::with_dims(c.r.0, c.r.1)?;
            let s = Rect::new(c.s.0, c.s.1, c.s.2, c.s.3)?;
            let spec = FrameSpec::new(s, r, Selection::only(c.x))?;
            let bound = cor_key_bound(&spec, c.j, &k)?;
            let fr = frame(&spec);
            let name = if c.j == 1 { "D1" } else { "D2" };
            let est = ctx.estimate(name, k.p, &r, 40 + i as u64, |a| if c.j == 1 { fr.d1(a) } else { fr.d2(a) });
            Ok(against_bound(
                "frame-event",
                format!("{name}, S = {s} in R = {r}, x = {}, q = {}", spec.x, c.q),
                est,
                &bound,
            ))
        })
        .collect()
}

/// Whether increasing events `E`, `F`, each depending only on the sites of
/// its own rectangle, occur with disjoint witnesses: some split of the
/// shared infected sites serves both.
pub fn occur_disjointly<E, F>(a: &Config, region_e: &Rect, e: E, region_f: &Rect, f: F) -> Result<bool>
where
    E: Fn(&Config) -> bool,
    F: Fn(&Config) -> bool,
{
    let shared: Vec<_> = match region_e.intersection(region_f) {
        Some(o) => a.restrict(&o).sites(),
        None => Vec::new(),
    };
    if shared.len() > 20 {
        return Err(Error::SearchTooLarge(format!("{} shared sites", shared.len())));
    }
    let mut base_e = a.restrict(region_e);
    let mut base_f = a.restrict(region_f);
    for &v in &shared {
        base_e.remove(v);
        base_f.remove(v);
    }
    for mask in 0u32..(1 << shared.len()) {
        let mut ke = base_e.clone();
        let mut kf = base_f.clone();
        for (i, &v) in shared.iter().enumerate() {
            if mask >> i & 1 == 1 {
                ke.insert(v)?;
            } else {
                kf.insert(v)?;
            }
        }
        if e(&ke) && f(&kf) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn vbk_suite(ctx: &Ctx) -> Vec<ValidationReport> {
    let dom = Rect::square(5).expect("non-empty");
    let re = Rect::new(0, 2, 0, 2).expect("non-empty");
    let rf = Rect::new(1, 3, 1, 3).expect("non-empty");
    [0.3, 0.45]
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let [ke, kf, kef] = count_joint(p, &dom, ctx.trials, &ctx.stream, 60 + i as u64, |a| {
                let e = is_internally_filled(a, &re);
                let f = is_internally_filled(a, &rf);
                let both = e
                    && f
                    && occur_disjointly(
                        a,
                        &re,
                        |c| is_internally_filled(c, &re),
                        &rf,
                        |c| is_internally_filled(c, &rf),
                    )
                    .expect("four shared sites at most");
                [e, f, both]
            });
            let n = ctx.trials;
            let est_e = Estimate::from_counts("E", p, ke, n, ctx.seed);
            let est_f = Estimate::from_counts("F", p, kf, n, ctx.seed);
            let est = Estimate::from_counts("E o F", p, kef, n, ctx.seed);
            let bound = est_e.p_hat * est_f.p_hat;
            // the product is itself estimated; propagate its error
            let se = (est.std_error().powi(2)
                + (est_f.p_hat * est_e.std_error()).powi(2)
                + (est_e.p_hat * est_f.std_error()).powi(2))
            .sqrt();
            let slack = SLACK_SE * se;
            let mut pre = BTreeMap::new();
            pre.insert("E and F increasing".to_string(), true);
            ValidationReport {
                suite: "vbk".to_string(),
                case: format!("E = I({re}), F = I({rf}) on {dom}, p = {p}"),
                verdict: verdict(est.p_hat, bound, slack, true),
                bound,
                slack,
                preconditions: pre,
                empirical: est,
            }
        })
        .collect()
}

/// Runs the named suite (or `all`) with `trials` samples per case.
pub fn validate_inequality(suite: &str, trials: u64, seed: u64) -> Result<Vec<ValidationReport>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let ctx = Ctx { trials, seed, stream: TrialStream::new(seed) };
    match suite {
        "double-gap" => Ok(double_gap_suite(&ctx)),
        "crossing" => Ok(crossing_suite(&ctx)),
        "seeds" => Ok(seeds_suite(&ctx)),
        "frame-event" => frame_event_suite(&ctx),
        "vbk" => Ok(vbk_suite(&ctx)),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(validate_inequality(s, trials, seed)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}; expected one of {SUITES:?} or \"all\""))),
    }
}
