//! Real roots of polynomials up to degree three.
//!
//! Closed form (trigonometric for three real roots, Cardano otherwise)
//! followed by Newton polishing, which recovers digits lost to cancellation
//! in the closed form.

use std::f64::consts::TAU;

use super::NumericsError;

/// `c3·x³ + c2·x² + c1·x + c0`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c2, c1, c0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }

    /// Largest single term magnitude at `x`; the scale residuals are judged against.
    pub fn term_scale(&self, x: f64) -> f64 {
        let x2 = x * x;
        (self.c3 * x2 * x)
            .abs()
            .max((self.c2 * x2).abs())
            .max((self.c1 * x).abs())
            .max(self.c0.abs())
    }

    /// Residual `|p(x)|` relative to [`Cubic::term_scale`].
    pub fn relative_residual(&self, x: f64) -> f64 {
        let scale = self.term_scale(x);
        if scale == 0.0 {
            0.0
        } else {
            self.eval(x).abs() / scale
        }
    }

    pub fn degree(&self) -> usize {
        if self.c3 != 0.0 {
            3
        } else if self.c2 != 0.0 {
            2
        } else if self.c1 != 0.0 {
            1
        } else {
            0
        }
    }
}

fn polish(c: &Cubic, mut x: f64) -> f64 {
    let mut best = c.eval(x).abs();
    for _ in 0..4 {
        let d = c.derivative(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - c.eval(x) / d;
        let r = c.eval(next).abs();
        if !(r < best) {
            break;
        }
        best = r;
        x = next;
        if r == 0.0 {
            break;
        }
    }
    x
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // A discriminant that is negative only through rounding still marks a
        // double root.
        if disc.abs() <= 8.0 * f64::EPSILON * b * b {
            let r = -b / (2.0 * a);
            return vec![r, r];
        }
        return Vec::new();
    }
    // Stable form avoiding cancellation between -b and sqrt(disc).
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    let mut r = vec![q / a, c / q];
    r.sort_by(f64::total_cmp);
    r
}

fn cubic_closed_form(c: &Cubic) -> Vec<f64> {
    let a = c.c2 / c.c3;
    let b = c.c1 / c.c3;
    let d = c.c0 / c.c3;
    // x = t - a/3 gives t³ + p t + q = 0
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    // Scale for deciding whether the discriminant is zero up to rounding.
    let disc_scale = (half_q * half_q).max(third_p.abs().powi(3));

    if disc > 64.0 * f64::EPSILON * disc_scale {
        // one real root
        let sq = disc.sqrt();
        let u = (-half_q + if half_q <= 0.0 { sq } else { -sq }).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - third_p / u };
        vec![t - shift]
    } else if p == 0.0 && q == 0.0 {
        vec![-shift; 3]
    } else {
        // three real roots (possibly repeated)
        let m = (-third_p).max(0.0).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (-half_q / (m * m * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| 2.0 * m * (theta - TAU * k as f64 / 3.0).cos() - shift)
            .collect();
        roots.sort_by(f64::total_cmp);
        roots
    }
}

/// All real roots in ascending order, repeated roots listed with multiplicity.
pub fn real_roots(c: &Cubic) -> Result<Vec<f64>, NumericsError> {
    let mut roots = match c.degree() {
        3 => cubic_closed_form(c),
        2 => quadratic_roots(c.c2, c.c1, c.c0),
        1 => vec![-c.c0 / c.c1],
        _ => {
            if c.c0 == 0.0 {
                return Err(NumericsError::DegenerateAllZero);
            }
            Vec::new()
        }
    };
    for r in roots.iter_mut() {
        *r = polish(c, *r);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}
