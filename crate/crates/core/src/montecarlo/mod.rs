//! Seeded sampling of p-random sets, event-probability estimates and
//! critical-probability bisection.

mod validate;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{is_internally_filled, percolates};
use crate::error::{Error, Result};
use crate::lattice::{Config, Rect};

pub use validate::{validate_inequality, ValidationReport, Verdict, SUITES};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

/// Master seed from which every trial draws an independent substream.
///
/// The substream for `(lane, index)` is a ChaCha8 generator keyed by
/// `(seed, lane)` and positioned on stream `index`, so a sample depends only
/// on those three numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStream {
    pub seed: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl TrialStream {
    pub fn new(seed: u64) -> Self {
        TrialStream { seed }
    }

    pub fn rng(&self, lane: u64, index: u64) -> ChaCha8Rng {
        let mut state = self.seed ^ lane.wrapping_mul(0xd6e8_feb8_6659_fd93);
        let mut key = [0u8; 32];
        for chunk in key.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

/// A p-random subset of `r`: each site independently with probability `p`.
pub fn sample_config(p: f64, r: &Rect, stream: &TrialStream, lane: u64, index: u64) -> Result<Config> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(Config::empty(*r));
    }
    if p == 1.0 {
        return Ok(Config::full(*r));
    }
    // infected iff a uniform 64-bit word falls below p·2^64
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    let mut rng = stream.rng(lane, index);
    let mut c = Config::empty(*r);
    for i in 0..r.area() {
        if rng.next_u64() < threshold {
            c.set_index(i);
        }
    }
    Ok(c)
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// A Monte Carlo frequency with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub event: String,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(event: &str, p: f64, successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_lo, ci_hi) = wilson(successes, trials);
        Estimate {
            event: event.to_string(),
            p,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
            seed,
        }
    }

    /// Standard error implied by the Wilson interval.
    pub fn std_error(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / (2.0 * Z95)
    }
}

/// Counts trials `0..trials` on `lane` for which `event` holds.
pub fn count_event<F>(event: F, p: f64, r: &Rect, trials: u64, stream: &TrialStream, lane: u64) -> Result<u64>
where
    F: Fn(&Config) -> bool + Sync,
{
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
    }
    Ok((0..trials)
        .into_par_iter()
        .filter(|&i| {
            let a = sample_config(p, r, stream, lane, i).expect("p checked");
            event(&a)
        })
        .count() as u64)
}

/// Frequency of `event` over `trials` p-random subsets of `r`.
pub fn estimate_event<F>(name: &str, event: F, p: f64, r: &Rect, trials: u64, seed: u64) -> Result<Estimate>
where
    F: Fn(&Config) -> bool + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let k = count_event(event, p, r, trials, &TrialStream::new(seed), 0)?;
    Ok(Estimate::from_counts(name, p, k, trials, seed))
}

/// One bisection probe of the percolation probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub p: f64,
    pub estimate: Estimate,
}

/// Bisection estimate of the critical probability of `[n]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub n: u64,
    pub trials_per_step: u64,
    pub tol: f64,
    pub seed: u64,
    /// Midpoint of the final bracket.
    pub p_hat: f64,
    /// Largest probed `p` whose interval lies below ½ (else 0).
    pub ci_lo: f64,
    /// Smallest probed `p` whose interval lies above ½ (else 1).
    pub ci_hi: f64,
    pub probes: Vec<Probe>,
}

impl PcEstimate {
    pub fn as_estimate(&self) -> Estimate {
        Estimate {
            event: format!("pc[{}]", self.n),
            p: self.p_hat,
            trials: self.trials_per_step * self.probes.len() as u64,
            successes: self.probes.iter().map(|pr| pr.estimate.successes).sum(),
            p_hat: self.p_hat,
            ci_lo: self.ci_lo.min(self.p_hat),
            ci_hi: self.ci_hi.max(self.p_hat),
            seed: self.seed,
        }
    }
}

/// Bisects `p` on `[0, 1]` against `P_p([A] = [n]²) = ½` until the bracket
/// is narrower than `tol`. Probe `k` uses lane `k + 1`, so probes never
/// share random draws.
pub fn estimate_pc(n: u64, trials_per_step: u64, tol: f64, seed: u64) -> Result<PcEstimate> {
    if n < 2 || trials_per_step == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "estimate_pc needs n >= 2, trials >= 1, tol > 0 (got {n}, {trials_per_step}, {tol})"
        )));
    }
    let r = Rect::square(n as i64)?;
    let stream = TrialStream::new(seed);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = Vec::new();
    let (mut ci_lo, mut ci_hi) = (0.0f64, 1.0f64);
    let mut lane = 1;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let k = count_event(percolates, mid, &r, trials_per_step, &stream, lane)?;
        let est = Estimate::from_counts("percolation", mid, k, trials_per_step, seed);
        if est.ci_hi < 0.5 {
            ci_lo = ci_lo.max(mid);
        }
        if est.ci_lo > 0.5 {
            ci_hi = ci_hi.min(mid);
        }
        if est.p_hat >= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
        probes.push(Probe { p: mid, estimate: est });
        lane += 1;
    }
    Ok(PcEstimate { n, trials_per_step, tol, seed, p_hat: 0.5 * (lo + hi), ci_lo, ci_hi, probes })
}

/// Internally filled samples collected by rejection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilledSample {
    /// Acceptance frequency over all attempts made.
    pub acceptance: Estimate,
    pub configs: Vec<Config>,
    /// The attempt budget ran out before `wanted` samples were found.
    pub partial: bool,
}

const REJECTION_BATCH: u64 = 1024;

/// Draws p-random subsets of `r` until `wanted` of them internally fill
/// `r`, or `budget` attempts have been made. Attempts run in fixed-size
/// batches and accepted samples are kept in attempt order, so the result
/// does not depend on scheduling.
pub fn estimate_filled_conditioned(r: &Rect, p: f64, wanted: usize, budget: u64, seed: u64) -> Result<FilledSample> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
    }
    let stream = TrialStream::new(seed);
    let mut configs = Vec::new();
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    while configs.len() < wanted && attempts < budget {
        let end = (attempts + REJECTION_BATCH).min(budget);
        let batch: Vec<Config> = (attempts..end)
            .into_par_iter()
            .filter_map(|i| {
                let a = sample_config(p, r, &stream, 0, i).expect("p checked");
                is_internally_filled(&a, r).then_some(a)
            })
            .collect();
        accepted += batch.len() as u64;
        attempts = end;
        configs.extend(batch);
    }
    configs.truncate(wanted);
    let partial = configs.len() < wanted;
    let trials = attempts.max(1);
    Ok(FilledSample {
        acceptance: Estimate::from_counts("internally-filled", p, accepted, trials, seed),
        configs,
        partial,
    })
}
