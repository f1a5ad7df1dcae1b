//! Bound evaluators. Each returns a [`BoundReport`] recording the branch
//! taken and which preconditions held.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::events::{frame, is_one_critical, is_two_critical, FrameSpec};
use crate::lattice::Rect;

use super::special::{g, integral_g, lambda};
use super::variational::{j_cost, q_cost};
use super::Constants;

/// Result of a bound evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: String,
    /// The bound itself (a probability bound unless stated otherwise).
    pub value: f64,
    /// `log(value)` computed directly, finite even when `value` underflows.
    pub log_value: f64,
    pub branch: Option<String>,
    pub inputs: BTreeMap<String, f64>,
    /// Precondition name → whether it held.
    pub flags: BTreeMap<String, bool>,
    /// All preconditions held.
    pub valid: bool,
    /// The bound says nothing (`value ≥ 1` for a probability, or not finite).
    pub vacuous: bool,
}

impl BoundReport {
    fn probability(formula: &str, log_value: f64) -> Self {
        let value = log_value.exp();
        BoundReport {
            formula: formula.to_string(),
            value,
            log_value,
            branch: None,
            inputs: BTreeMap::new(),
            flags: BTreeMap::new(),
            valid: true,
            vacuous: log_value.is_nan() || log_value >= 0.0,
        }
    }

    fn input(mut self, name: &str, v: f64) -> Self {
        self.inputs.insert(name.to_string(), v);
        self
    }

    fn flag(mut self, name: &str, held: bool) -> Self {
        self.flags.insert(name.to_string(), held);
        self.valid &= held;
        self
    }

    fn rect_inputs(self, prefix: &str, r: &Rect) -> Self {
        let (w, h) = r.dims();
        self.input(&format!("{prefix}_width"), w as f64).input(&format!("{prefix}_height"), h as f64)
    }
}

/// `f(R)`: `δ√short(R)` when `short(R) ≤ B/q`, else `(δ/√q)e^{q·short(R)}`.
pub fn side_allowance(r: &Rect, k: &Constants) -> f64 {
    let q = k.q();
    let short = r.short() as f64;
    if short <= k.b / q {
        k.delta * short.sqrt()
    } else {
        k.delta / q.sqrt() * (short * q).exp()
    }
}

/// `2λ/q − 4e⁴/√q`, the floor of `J(R)` once `long(R) ≥ (1/4q)log(1/q)`.
pub fn j_floor(q: f64) -> f64 {
    2.0 * lambda() / q - 4.0 * 4f64.exp() / q.sqrt()
}

/// `exp(−min{2λ/q + q^{−3/4}, J(R) − L₆/√q})` for `3e^{2B}/q ≤ long(R) ≤
/// (1/2q)log(1/q)`.
pub fn droplet_bound(r: &Rect, k: &Constants) -> Result<BoundReport> {
    let q = k.q();
    let (a, b) = (r.short(), r.long());
    let lambda_branch = 2.0 * lambda() / q + q.powf(-0.75);
    let j = j_cost(a, b, q)?;
    let j_branch = j - k.l6 / q.sqrt();
    let (exponent, branch) = if lambda_branch <= j_branch { (lambda_branch, "lambda") } else { (j_branch, "J") };
    let lower = 3.0 * (2.0 * k.b).exp() / q;
    let upper = (1.0 / q).ln() / (2.0 * q);
    let mut rep = BoundReport::probability("droplet", -exponent)
        .rect_inputs("R", r)
        .input("q", q)
        .input("J", j)
        .input("lambda_branch", lambda_branch)
        .input("J_branch", j_branch)
        .flag("long >= 3e^(2B)/q", b as f64 >= lower)
        .flag("long <= log(1/q)/(2q)", b as f64 <= upper);
    rep.branch = Some(branch.to_string());
    Ok(rep)
}

/// `3^{φ(R)} exp(−φ(R) g(aq))` with `a = short(R)`, valid when `ap ≤ δ`.
pub fn seeds_bound(r: &Rect, k: &Constants) -> BoundReport {
    let q = k.q();
    let a = r.short() as f64;
    let phi = r.phi() as f64;
    BoundReport::probability("seeds", phi * 3f64.ln() - phi * g(a * q))
        .rect_inputs("R", r)
        .input("q", q)
        .flag("short * p <= delta", a * k.p <= k.delta)
}

/// `(P(no vertical double gap) ≤ e^{−(a−1)g(bq)}, P(crossed left to right)
/// ≤ e^{−a g(bq)})` with `dim R = (a, b)`.
pub fn crossing_bounds(r: &Rect, k: &Constants) -> (BoundReport, BoundReport) {
    let q = k.q();
    let (a, b) = r.dims();
    let gb = g(b as f64 * q);
    let no_gap =
        BoundReport::probability("no-vertical-double-gap", -((a - 1) as f64) * gb).rect_inputs("R", r).input("q", q);
    let crossed = BoundReport::probability("crossed-left-to-right", -(a as f64) * gb).rect_inputs("R", r).input("q", q);
    (no_gap, crossed)
}

/// `C⁹ (δ/f(R))^{‖x‖} exp(−Q(S, R) + 4φ(R)q)` for a `j`-critical `R` with
/// `s, t ≤ 4f(R)`.
pub fn cor_key_bound(spec: &FrameSpec, j: u8, k: &Constants) -> Result<BoundReport> {
    let q = k.q();
    let r = &spec.r;
    let f = side_allowance(r, k);
    let norm = frame(spec).norm() as f64;
    let qv = q_cost(&spec.s, r, q)?;
    let log_value = 9.0 * k.c.ln() + norm * (k.delta / f).ln() - qv + 4.0 * r.phi() as f64 * q;
    let (s, t) = spec.shrink();
    let critical = match j {
        1 => is_one_critical(r, k),
        2 => is_two_critical(r, k),
        _ => false,
    };
    let mut rep = BoundReport::probability("cor-key", log_value)
        .rect_inputs("R", r)
        .rect_inputs("S", &spec.s)
        .input("q", q)
        .input("f", f)
        .input("Q", qv)
        .input("norm_x", norm)
        .flag("j in {1, 2}", j == 1 || j == 2)
        .flag("R is j-critical", critical)
        .flag("s <= 4f", s as f64 <= 4.0 * f)
        .flag("t <= 4f", t as f64 <= 4.0 * f);
    rep.branch = Some(format!("D{j}"));
    Ok(rep)
}

/// Checks `(2/q)∫_{aq}^{bq} g ≤ (b − a)(g(aq) + g(bq)) − 4Cb` under
/// `L₁a ≤ b ≤ B/q`. The report value is the slack `rhs − lhs`, and the
/// flag `inequality holds` carries the verdict.
pub fn leaving_diagonal_check(a: i64, b: i64, k: &Constants) -> Result<BoundReport> {
    let q = k.q();
    let (af, bf) = (a as f64, b as f64);
    let lhs = 2.0 / q * integral_g(af * q, bf * q)?;
    let rhs = (bf - af) * (g(af * q) + g(bf * q)) - 4.0 * k.c * bf;
    let slack = rhs - lhs;
    let pre_lo = k.l1 * af <= bf;
    let pre_hi = bf <= k.b / q;
    let mut rep = BoundReport {
        formula: "leaving-diagonal".to_string(),
        value: slack,
        log_value: f64::NAN,
        branch: None,
        inputs: BTreeMap::new(),
        flags: BTreeMap::new(),
        valid: true,
        vacuous: false,
    }
    .input("a", af)
    .input("b", bf)
    .input("q", q)
    .input("lhs", lhs)
    .input("rhs", rhs)
    .flag("L1 * a <= b", pre_lo)
    .flag("b <= B/q", pre_hi);
    rep.flags.insert("inequality holds".to_string(), slack >= 0.0);
    Ok(rep)
}

/// The lower bound on the critical probability assembled from the droplet
/// bound, the Aizenman–Lebowitz lemma and a union bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcLowerBound {
    pub n: u64,
    /// `λ/log n − (4e⁴ + L₆)/(log n)^{3/2}`.
    pub q_star: f64,
    /// `1 − e^{−q*}`.
    pub p_star: f64,
    /// `q* ≤ 0`.
    pub vacuous: bool,
    /// Union-bound count `n²(log n)³`.
    pub union_count: f64,
    /// `−2λ/q* + (4e⁴ + L₆)/√q*`, absent when vacuous.
    pub exponent: Option<f64>,
    /// `((4e⁴ + L₆)/λ)²`: `q* > 0` exactly when `log n` exceeds it.
    pub crossover_log_n: f64,
}

pub fn pc_lower_bound(n: u64, k: &Constants) -> Result<PcLowerBound> {
    if n < 2 {
        return Err(crate::error::Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let lam = lambda();
    let ln = (n as f64).ln();
    let c = 4.0 * 4f64.exp() + k.l6;
    let q_star = lam / ln - c / ln.powf(1.5);
    let vacuous = q_star <= 0.0;
    Ok(PcLowerBound {
        n,
        q_star,
        p_star: -(-q_star).exp_m1(),
        vacuous,
        union_count: (n as f64).powi(2) * ln.powi(3),
        exponent: (!vacuous).then(|| -2.0 * lam / q_star + c / q_star.sqrt()),
        crossover_log_n: (c / lam).powi(2),
    })
}

/// `long(R)⁴ exp(−3e^{2B}g(B)/q)`, the union bound over internally filled
/// long thin rectangles inside `R`, with a flag for whether it is at most
/// `½e^{−2/q}`.
pub fn long_thin_bound(r: &Rect, k: &Constants) -> BoundReport {
    let q = k.q();
    let long = r.long() as f64;
    let log_value = 4.0 * long.ln() - 3.0 * (2.0 * k.b).exp() * g(k.b) / q;
    let target = 0.5f64.ln() - 2.0 / q;
    BoundReport::probability("long-thin", log_value)
        .rect_inputs("R", r)
        .input("q", q)
        .flag("bound <= exp(-2/q)/2", log_value <= target)
}

/// `long(R)⁸ e^{−2/q}`, the union bound over pairs of disjointly internally
/// filled rectangles with short side at least `B/q`.
pub fn two_big_bound(r: &Rect, k: &Constants) -> BoundReport {
    let q = k.q();
    let long = r.long() as f64;
    BoundReport::probability("two-big", 8.0 * long.ln() - 2.0 / q).rect_inputs("R", r).input("q", q)
}
