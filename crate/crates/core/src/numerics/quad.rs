//! Adaptive Simpson quadrature.

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// `∫_a^b f` to absolute tolerance `tol`, with Richardson correction on
/// accepted panels. Recursion stops at `max_depth` halvings.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let root = Panel { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb) };
    let mut total = 0.0;
    let mut stack = vec![(root, tol, 0u32)];
    while let Some((p, eps, depth)) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        // rounding floor: below it further halving cannot improve the estimate
        let floor = 4.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth >= max_depth || delta.abs() <= (15.0 * eps).max(floor) {
            total += left + right + delta / 15.0;
        } else {
            stack.push((Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * eps, depth + 1));
            stack.push((Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * eps, depth + 1));
        }
    }
    total
}
