//! The path functional `W`, the growth cost `U` and its bounds.

use crate::error::{Error, Result};
use crate::lattice::Rect;

use super::special::{g, integral_g};

/// Stop refining once two Richardson-extrapolated values agree to this
/// relative precision.
const W_RTOL: f64 = 1e-10;
/// Hard cap on DP cells per refinement level.
const MAX_CELLS: usize = 40_000_000;

fn nodes_between(lo: f64, hi: f64, pieces: usize, out: &mut Vec<f64>) {
    let (l0, l1) = (lo.ln(), hi.ln());
    // exact at the breakpoint: the endpoint filters compare against it
    out.push(lo);
    for k in 1..pieces {
        out.push((l0 + (l1 - l0) * k as f64 / pieces as f64).exp());
    }
}

/// Minimum over monotone staircases on the grid `xs × ys` of
/// `∫ g(y) dx + g(x) dy`, from `(xs[0], ys[0])` to the last corner.
fn staircase_min(xs: &[f64], ys: &[f64]) -> f64 {
    let gx: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let gy: Vec<f64> = ys.iter().map(|&y| g(y)).collect();
    let mut row = vec![0.0; ys.len()];
    for j in 1..ys.len() {
        row[j] = row[j - 1] + gx[0] * (ys[j] - ys[j - 1]);
    }
    for i in 1..xs.len() {
        let dx = xs[i] - xs[i - 1];
        row[0] += gy[0] * dx;
        for j in 1..ys.len() {
            let horizontal = row[j] + gy[j] * dx;
            let vertical = row[j - 1] + gx[i] * (ys[j] - ys[j - 1]);
            row[j] = horizontal.min(vertical);
        }
    }
    row[ys.len() - 1]
}

/// Grid on the common axis at refinement `level`: the breakpoints, with
/// each gap split into log-uniform pieces.
fn axis_grid(breaks: &[f64], level: u32) -> Vec<f64> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let base = (4.0 * (w[1] / w[0]).ln()).ceil().max(1.0) as usize;
        nodes_between(w[0], w[1], base << level, &mut out);
    }
    out.push(*breaks.last().expect("at least one breakpoint"));
    out
}

/// `W(a, b)`: infimum of `∫_γ g(y) dx + g(x) dy` over increasing paths
/// from `a` to `b`.
///
/// Computed by dynamic programming over staircase paths on a shared
/// log-spaced grid containing all four coordinates, so that diagonal steps
/// reduce to the trapezoid rule. Each level halves the spacing; successive
/// levels are Richardson-extrapolated until they agree.
pub fn w_cost(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    if !(a.0 > 0.0 && a.1 > 0.0) {
        return Err(Error::InvalidArgument(format!("W needs positive start point, got {a:?}")));
    }
    if !(a.0 <= b.0 && a.1 <= b.1) {
        return Err(Error::InvalidArgument(format!("W needs a <= b componentwise, got {a:?} and {b:?}")));
    }
    if a == b {
        return Ok(0.0);
    }
    if a.0 == b.0 {
        return Ok(g(a.0) * (b.1 - a.1));
    }
    if a.1 == b.1 {
        return Ok(g(a.1) * (b.0 - a.0));
    }
    let mut breaks = vec![a.0, a.1, b.0, b.1];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut prev_raw: Option<f64> = None;
    let mut prev_extrap: Option<f64> = None;
    for level in 0.. {
        let grid = axis_grid(&breaks, level);
        let xs: Vec<f64> = grid.iter().copied().filter(|&z| a.0 <= z && z <= b.0).collect();
        let ys: Vec<f64> = grid.iter().copied().filter(|&z| a.1 <= z && z <= b.1).collect();
        let raw = staircase_min(&xs, &ys);
        let extrap = prev_raw.map(|p| (4.0 * raw - p) / 3.0);
        if let (Some(e), Some(pe)) = (extrap, prev_extrap) {
            if (e - pe).abs() <= W_RTOL * e.abs() {
                return Ok(e);
            }
        }
        let next_cells = 4 * xs.len() * ys.len();
        if next_cells > MAX_CELLS {
            return Ok(extrap.unwrap_or(raw));
        }
        prev_raw = Some(raw);
        prev_extrap = extrap;
    }
    unreachable!("refinement loop returns")
}

fn dims_f(d: (i64, i64), q: f64) -> (f64, f64) {
    (d.0 as f64 * q, d.1 as f64 * q)
}

/// `U` from dimensions: `W(q·dim S, q·dim R)`.
pub fn u_cost_dims(s: (i64, i64), r: (i64, i64), q: f64) -> Result<f64> {
    if s.0 < 1 || s.1 < 1 || s.0 > r.0 || s.1 > r.1 {
        return Err(Error::InvalidArgument(format!("U needs 1 <= dim S <= dim R, got {s:?} and {r:?}")));
    }
    w_cost(dims_f(s, q), dims_f(r, q))
}

/// `U(S, R) = W(q·dim S, q·dim R)` for `S ⊆ R`.
pub fn u_cost(s: &Rect, r: &Rect, q: f64) -> Result<f64> {
    if !r.contains_rect(s) {
        return Err(Error::NotNested { inner: *s, outer: *r });
    }
    u_cost_dims(s.dims(), r.dims(), q)
}

/// `Q` from dimensions: with `dim R = (a, b)` and `dim S = (a − s, b − t)`,
/// `Q = s·g((b − t)q) + t·g((a − s)q)`.
pub fn q_cost_dims(s_dims: (i64, i64), r_dims: (i64, i64), q: f64) -> f64 {
    let (a, b) = r_dims;
    let s = a - s_dims.0;
    let t = b - s_dims.1;
    let mut total = 0.0;
    if s != 0 {
        total += s as f64 * g((b - t) as f64 * q);
    }
    if t != 0 {
        total += t as f64 * g((a - s) as f64 * q);
    }
    total
}

/// `Q(S, R)` for `S ⊆ R`.
pub fn q_cost(s: &Rect, r: &Rect, q: f64) -> Result<f64> {
    if !r.contains_rect(s) {
        return Err(Error::NotNested { inner: *s, outer: *r });
    }
    Ok(q_cost_dims(s.dims(), r.dims(), q))
}

fn short_long(d: (i64, i64)) -> (i64, i64) {
    (d.0.min(d.1), d.0.max(d.1))
}

/// Closed form of `U/q` when `long(S) ≤ short(R)`: the cheapest path runs
/// to the diagonal, along it, then straight out:
/// `(d − c)g(dq) + (2/q)∫_{dq}^{aq} g + (b − a)g(aq)`.
pub fn u_over_q_near_diagonal(s_dims: (i64, i64), r_dims: (i64, i64), q: f64) -> Result<f64> {
    let (c, d) = short_long(s_dims);
    let (a, b) = short_long(r_dims);
    if d > a || c < 1 {
        return Err(Error::InvalidArgument(format!(
            "closed form needs long(S) <= short(R), got {s_dims:?} and {r_dims:?}"
        )));
    }
    let (af, bf, cf, df) = (a as f64, b as f64, c as f64, d as f64);
    let mut v = 0.0;
    if d > c {
        v += (df - cf) * g(df * q);
    }
    v += 2.0 / q * integral_g(df * q, af * q)?;
    if b > a {
        v += (bf - af) * g(af * q);
    }
    Ok(v)
}

/// Lower bound `(b − d)g(aq)` on `U/q`, valid when `long(S) ≥ short(R)`.
pub fn u_over_q_off_diagonal_bound(s_dims: (i64, i64), r_dims: (i64, i64), q: f64) -> f64 {
    let (_, d) = short_long(s_dims);
    let (a, b) = short_long(r_dims);
    (b - d) as f64 * g(a as f64 * q)
}

/// `J(R) = (2/q)∫_0^{aq} g + (b − a)g(aq)` from `short = a`, `long = b`.
pub fn j_cost(short: i64, long: i64, q: f64) -> Result<f64> {
    let (a, b) = (short as f64, long as f64);
    let mut v = 2.0 / q * integral_g(0.0, a * q)?;
    if long > short {
        v += (b - a) * g(a * q);
    }
    Ok(v)
}

/// Lower bound on `U/q` for `long(S) ≤ short(R)`:
/// `J(R) − (φ(S)/2)·log(1 + 1/(φ(S)q)) − K·φ(S)`, with the absolute
/// constant `K` supplied by the caller.
pub fn u_over_q_lower_bound(s_dims: (i64, i64), r_dims: (i64, i64), q: f64, k: f64) -> Result<f64> {
    let (a, b) = short_long(r_dims);
    let phi_s = (s_dims.0 + s_dims.1) as f64;
    Ok(j_cost(a, b, q)? - 0.5 * phi_s * (1.0 / (phi_s * q)).ln_1p() - k * phi_s)
}
