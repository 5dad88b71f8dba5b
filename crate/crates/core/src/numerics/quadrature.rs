/// Composite trapezoid rule on `n_points` equally spaced nodes (n ≥ 2).
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n_points: usize) -> f64 {
    assert!(n_points >= 2, "trapezoid needs at least two nodes");
    if a == b {
        return 0.0;
    }
    let intervals = n_points - 1;
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals).map(|k| f(a + h * k as f64)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Refinement tolerance used by [`integrate`].
pub const REFINE_REL_TOL: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 12;

/// Trapezoid integral, refined by doubling the number of intervals until two
/// successive values agree to [`REFINE_REL_TOL`] (relative).
///
/// Returns the last value even if the refinement cap is reached.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n_points: usize) -> f64 {
    let mut n = n_points.max(2);
    let mut prev = trapezoid(&f, a, b, n);
    for _ in 0..MAX_REFINEMENTS {
        n = 2 * n - 1;
        let next = trapezoid(&f, a, b, n);
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= REFINE_REL_TOL * scale {
            return next;
        }
        prev = next;
    }
    prev
}
