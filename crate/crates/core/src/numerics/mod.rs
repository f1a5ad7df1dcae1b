//! Closed-form functions and bound evaluators.

mod bounds;
mod quad;
mod special;
mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{
    cor_key_bound, crossing_bounds, droplet_bound, j_floor, leaving_diagonal_check, long_thin_bound, pc_lower_bound,
    seeds_bound, side_allowance, two_big_bound, BoundReport, PcLowerBound,
};
pub use quad::adaptive_simpson;
pub use special::{beta, checked_g, g, g_prime, integral_g, lambda, lambda_truncated};
pub use variational::{
    j_cost, q_cost, q_cost_dims, u_cost, u_cost_dims, u_over_q_lower_bound, u_over_q_near_diagonal,
    u_over_q_off_diagonal_bound, w_cost,
};

/// `π²/18`.
pub const LAMBDA_EXACT: f64 = std::f64::consts::PI * std::f64::consts::PI / 18.0;

/// The model parameter `p` and the free constants `B, C, δ, L₁ … L₆`.
///
/// The defaults are placeholders for "sufficiently large/small"; every
/// evaluator reports which of its preconditions held under them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub p: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "L3")]
    pub l3: f64,
    #[serde(rename = "L4")]
    pub l4: f64,
    #[serde(rename = "L5")]
    pub l5: f64,
    #[serde(rename = "L6")]
    pub l6: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { p: 0.01, b: 5.0, c: 50.0, delta: 0.05, l1: 1e3, l2: 1e4, l3: 1e5, l4: 1e6, l5: 1e7, l6: 1e8 }
    }
}

impl Constants {
    pub fn with_p(p: f64) -> Result<Self> {
        let k = Constants { p, ..Constants::default() };
        k.validate()?;
        Ok(k)
    }

    /// Defaults with `p = 1 − e^{−q}`.
    pub fn with_q(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        Constants::with_p(-(-q).exp_m1())
    }

    /// `q = −log(1 − p)`.
    pub fn q(&self) -> f64 {
        -(-self.p).ln_1p()
    }

    /// Rejects `p ∉ (0, 1)` and non-positive or non-finite constants.
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidArgument(format!("p must lie in (0, 1), got {}", self.p)));
        }
        for (name, v) in self.named() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("B", self.b),
            ("C", self.c),
            ("delta", self.delta),
            ("L1", self.l1),
            ("L2", self.l2),
            ("L3", self.l3),
            ("L4", self.l4),
            ("L5", self.l5),
            ("L6", self.l6),
        ]
    }

    /// Which links of `δ < 1 < B ≤ C ≤ L₁ ≤ … ≤ L₆` fail.
    pub fn ordering_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.delta >= 1.0 {
            out.push(format!("delta = {} >= 1", self.delta));
        }
        if self.b <= 1.0 {
            out.push(format!("B = {} <= 1", self.b));
        }
        let chain = &self.named()[..];
        let chain: Vec<_> =
            std::iter::once(chain[0]).chain(std::iter::once(chain[1])).chain(chain[3..].iter().copied()).collect();
        for w in chain.windows(2) {
            if w[0].1 > w[1].1 {
                out.push(format!("{} = {} > {} = {}", w[0].0, w[0].1, w[1].0, w[1].1));
            }
        }
        out
    }

    /// Sets one constant by name; `q` sets `p = 1 − e^{−q}`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "p" => self.p = value,
            "q" => self.p = -(-value).exp_m1(),
            "B" => self.b = value,
            "C" => self.c = value,
            "delta" => self.delta = value,
            "L1" => self.l1 = value,
            "L2" => self.l2 = value,
            "L3" => self.l3 = value,
            "L4" => self.l4 = value,
            "L5" => self.l5 = value,
            "L6" => self.l6 = value,
            _ => return Err(Error::InvalidArgument(format!("unknown constant {name:?}"))),
        }
        self.validate()
    }
}
