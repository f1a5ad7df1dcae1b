//! Fixed inputs shared by the benchmarks, drawn once from fixed seeds.

use bperc_core::montecarlo::{estimate_filled_conditioned, sample_config};
use bperc_core::{Config, Rect, TrialStream};

/// A p-random subset of the `n × n` square.
pub fn random_square(n: i64, p: f64, seed: u64) -> Config {
    let r = Rect::square(n).expect("n >= 1");
    sample_config(p, &r, &TrialStream::new(seed), 0, 0).expect("p in [0, 1]")
}

/// An internally filled droplet of the given dimensions.
pub fn filled_droplet(w: i64, h: i64, p: f64, seed: u64) -> (Rect, Config) {
    let r = Rect::with_dims(w, h).expect("positive dims");
    let mut s = estimate_filled_conditioned(&r, p, 1, 50_000_000, seed).expect("p in range");
    let a = s.configs.pop().expect("droplet within budget");
    (r, a)
}
