//! `β`, `g` and integrals of `g`.

use crate::error::{Error, Result};

use super::quad::adaptive_simpson;

/// `β(u) = (u + √(u(4 − 3u))) / 2` on `[0, 1]`.
pub fn beta(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("beta needs u in [0, 1], got {u}")));
    }
    Ok(0.5 * (u + (u * (4.0 - 3.0 * u)).sqrt()))
}

/// `g(z) = −log β(1 − e^{−z})`, accurate to relative precision for large
/// `z` where `g(z) ≈ e^{−2z}`. Returns `+∞` for `z ≤ 0`.
pub fn g(z: f64) -> f64 {
    if z <= 0.0 || z.is_nan() {
        return f64::INFINITY;
    }
    let eps = (-z).exp();
    let u = -(-z).exp_m1();
    let s = (u * (4.0 - 3.0 * u)).sqrt();
    let beta = 0.5 * (u + s);
    if beta < 0.5 {
        -beta.ln()
    } else {
        // 1 − β = 2ε² / (1 + ε + s) since (1 + ε)² − s² = 4ε²
        let one_minus_beta = 2.0 * eps * eps / (1.0 + eps + s);
        -(-one_minus_beta).ln_1p()
    }
}

/// `g` with the domain enforced.
pub fn checked_g(z: f64) -> Result<f64> {
    if z > 0.0 {
        Ok(g(z))
    } else {
        Err(Error::InvalidArgument(format!("g needs z > 0, got {z}")))
    }
}

/// Central-difference approximation of `g'(z)`.
pub fn g_prime(z: f64) -> f64 {
    let h = 1e-5 * z.min(1.0);
    (g(z + h) - g(z - h)) / (2.0 * h)
}

/// Below this point `g(z) = −½ log z + O(√z)` is integrated in closed form.
const HEAD: f64 = 1e-14;
/// Beyond this point the tail `≈ e^{−2T}/2` is added analytically.
const TAIL: f64 = 40.0;

fn head_integral(a: f64, b: f64) -> f64 {
    // antiderivative of −½ log z is z(1 − log z)/2, vanishing at 0
    let prim = |z: f64| if z == 0.0 { 0.0 } else { 0.5 * z * (1.0 - z.ln()) };
    prim(b) - prim(a)
}

/// `∫_a^b g(z) dz` for `0 ≤ a ≤ b ≤ ∞`, via adaptive Simpson in `t = log z`.
pub fn integral_g(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= a) {
        return Err(Error::InvalidArgument(format!("integral of g needs 0 <= a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let lo = a.max(HEAD);
    if a < HEAD {
        total += head_integral(a, b.min(HEAD));
    }
    let hi = b.min(TAIL);
    if hi > lo {
        let h = |t: f64| {
            let z = t.exp();
            g(z) * z
        };
        let (tl, th) = (lo.ln(), hi.ln());
        // tolerance relative to a coarse estimate, so tiny tails stay accurate
        let coarse = (th - tl) / 6.0 * (h(tl) + 4.0 * h(0.5 * (tl + th)) + h(th));
        let tol = (1e-14 * coarse.abs()).max(f64::MIN_POSITIVE);
        total += adaptive_simpson(h, tl, th, tol, 30);
    }
    if b > TAIL {
        let from = a.max(TAIL);
        let to_term = if b.is_finite() { (-2.0 * b).exp() } else { 0.0 };
        total += 0.5 * ((-2.0 * from).exp() - to_term);
    }
    Ok(total)
}

/// `∫_0^t g` together with the tail bound `∫_t^∞ 2e^{−2z} dz = e^{−2t}`.
pub fn lambda_truncated(t: f64) -> Result<(f64, f64)> {
    Ok((integral_g(0.0, t)?, (-2.0 * t).exp()))
}

/// `λ = ∫_0^∞ g`, computed by quadrature (equal to `π²/18`).
pub fn lambda() -> f64 {
    integral_g(0.0, f64::INFINITY).expect("valid range")
}
