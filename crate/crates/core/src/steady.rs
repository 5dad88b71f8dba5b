//! Steady-state transmission: the direction-dependent cubic in `T`, its
//! inverse `s_in(T)`, and reconstruction of every mean field for a root.

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::RATE_UNIT;
use crate::numerics::{real_roots, Cubic};
use crate::params::{effective_params, Direction, SystemParams};
use crate::stability::Stability;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error("the effective Kerr coefficient is zero; s_in(T) is undefined")]
    NonPositiveNonlinearity,
    #[error("T = {t:e} is not a steady state at s_in = {s_in:e} (|A|²/(T·s_in) − 1 = {mismatch:e})")]
    InconsistentRoot { t: f64, s_in: f64, mismatch: f64 },
    #[error("with J = 0 and g > 0 the cavity-1 field is not determined by the transmission")]
    Underdetermined,
}

/// Sign choice in `s_in = [2TΔ ± √(Tλ − T²κ²)]/(2T²U)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InverseBranch {
    Plus,
    Minus,
}

impl InverseBranch {
    pub fn sign(self) -> f64 {
        match self {
            InverseBranch::Plus => 1.0,
            InverseBranch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InverseBranch::Plus => "plus",
            InverseBranch::Minus => "minus",
        }
    }
}

/// One steady state: a root of the transmission cubic plus the fields it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBranch {
    pub direction: Direction,
    /// Input photon flux (1/s).
    pub s_in: f64,
    /// Transmission coefficient.
    pub t: f64,
    /// Output amplitude at the far port, √(1/s); input phase fixed to zero.
    pub out_amp: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// Mechanical displacement q̄ = −g|α₁|²/ω_m (p̄ = 0).
    pub q_bar: f64,
    /// `None` until classified.
    pub stable: Option<Stability>,
}

/// The transmission cubic `4U²s²T³ − 8ΔUsT² + (κ² + 4Δ²)T − λ`, divided
/// through by the square of [`RATE_UNIT`].
pub fn transmission_cubic(p: &SystemParams, d: Direction, s_in: f64) -> Cubic {
    let e = effective_params(p, d);
    let k = e.kappa / RATE_UNIT;
    let dl = e.delta / RATE_UNIT;
    let x = e.nonlinearity * s_in / RATE_UNIT;
    let lam = e.lambda / (RATE_UNIT * RATE_UNIT);
    Cubic::new(4.0 * x * x, -8.0 * dl * x, k * k + 4.0 * dl * dl, -lam)
}

/// All positive real transmission roots at input flux `s_in`, ascending.
///
/// In the linear limit (`s_in = 0` or `g = 0`) this is the single root
/// `λ/(κ² + 4Δ²)`; when `λ = 0` (no hopping) it is `[0]`.
pub fn transmission_roots(p: &SystemParams, d: Direction, s_in: f64) -> Vec<f64> {
    let e = effective_params(p, d);
    if e.lambda == 0.0 {
        return vec![0.0];
    }
    if s_in == 0.0 || e.nonlinearity == 0.0 {
        return vec![e.linear_transmission()];
    }
    let cubic = transmission_cubic(p, d, s_in);
    // κ² + 4Δ² > 0 keeps the cubic non-degenerate
    let roots = real_roots(&cubic).unwrap_or_default();
    let k = e.kappa / RATE_UNIT;
    let dl = e.delta / RATE_UNIT;
    let x = e.nonlinearity * s_in / RATE_UNIT;
    let lam = e.lambda / (RATE_UNIT * RATE_UNIT);
    roots
        .into_iter()
        .filter(|&t| t > 0.0)
        .map(|t| polish_factored(t, k, dl, x, lam))
        .collect()
}

/// Newton steps on `T(κ²/4 + (Δ − xT)²) − λ/4`. The expanded cubic cancels
/// terms of size Δ²T against λ; this form keeps the detuning difference
/// explicit and so pins |A|² = T·s_in far more tightly when Δ ≫ κ.
fn polish_factored(t0: f64, k: f64, dl: f64, x: f64, lam: f64) -> f64 {
    let f = |t: f64| {
        let det = dl - x * t;
        t * (0.25 * k * k + det * det) - 0.25 * lam
    };
    let mut t = t0;
    let mut ft = f(t);
    for _ in 0..4 {
        let det = dl - x * t;
        let slope = 0.25 * k * k + det * det - 2.0 * x * t * det;
        if slope == 0.0 || ft == 0.0 {
            break;
        }
        let next = t - ft / slope;
        // near a fold the slope vanishes; never let a step leave the root's neighbourhood
        if !(next > 0.0) || (next - t0).abs() > 1e-6 * t0 {
            break;
        }
        let fn_ = f(next);
        if fn_.abs() >= ft.abs() {
            break;
        }
        t = next;
        ft = fn_;
    }
    t
}

/// Input flux that produces transmission `t` on the chosen branch of the
/// inverse map; `None` when `t` exceeds λ/κ² or the flux would not be positive.
pub fn s_in_of_t(
    p: &SystemParams,
    d: Direction,
    t: f64,
    branch: InverseBranch,
) -> Result<Option<f64>, SteadyStateError> {
    let e = effective_params(p, d);
    if e.nonlinearity == 0.0 {
        return Err(SteadyStateError::NonPositiveNonlinearity);
    }
    if !(t > 0.0) {
        return Ok(None);
    }
    let lead = t * e.lambda;
    let mut disc = lead - t * t * e.kappa * e.kappa;
    if disc < 0.0 {
        if disc.abs() <= 1e-12 * lead {
            disc = 0.0;
        } else {
            return Ok(None);
        }
    }
    let s = (2.0 * t * e.delta + branch.sign() * disc.sqrt())
        / (2.0 * t * t * e.nonlinearity);
    Ok((s > 0.0).then_some(s))
}

/// Reconstructs the steady state belonging to root `t` at flux `s_in`.
pub fn reconstruct(
    p: &SystemParams,
    d: Direction,
    s_in: f64,
    t: f64,
) -> Result<SteadyBranch, SteadyStateError> {
    let e = effective_params(p, d);
    let a_in = s_in.sqrt();
    let flux_out = t * s_in;
    let kerr = if flux_out == 0.0 { 0.0 } else { e.nonlinearity * flux_out };
    let den = Complex64::new(e.kappa / 2.0, e.delta - kerr);
    let out_amp = e.eps * a_in / den;
    if s_in > 0.0 && e.lambda > 0.0 {
        let mismatch = out_amp.norm_sqr() / (t * s_in) - 1.0;
        if !(mismatch.abs() <= 1e-8) {
            return Err(SteadyStateError::InconsistentRoot { t, s_in, mismatch });
        }
    }
    let i = Complex64::i();
    let (alpha1, alpha2) = match d {
        Direction::Forward => {
            let alpha2 = out_amp / p.kappa2_e.sqrt();
            let alpha1 = if p.j != 0.0 {
                // from 0 = −(iΔ₂ + κ₂/2)α₂ − iJα₁
                -Complex64::new(p.kappa2() / 2.0, p.delta2) * alpha2 / (i * p.j)
            } else if p.g == 0.0 {
                p.kappa1_e.sqrt() * a_in / Complex64::new(p.kappa_eff() / 2.0, p.delta1)
            } else {
                return Err(SteadyStateError::Underdetermined);
            };
            (alpha1, alpha2)
        }
        Direction::Backward => {
            let alpha1 = out_amp / p.kappa1_e.sqrt();
            // from 0 = −(iΔ₂ + κ₂/2)α₂ − iJα₁ + √κ₂,e·a_in
            let alpha2 = (p.kappa2_e.sqrt() * a_in - i * p.j * alpha1)
                / Complex64::new(p.kappa2() / 2.0, p.delta2);
            (alpha1, alpha2)
        }
    };
    let q_bar = -p.g * alpha1.norm_sqr() / p.omega_m;
    Ok(SteadyBranch {
        direction: d,
        s_in,
        t,
        out_amp,
        alpha1,
        alpha2,
        q_bar,
        stable: None,
    })
}

/// Residuals of the two cavity mean-field equations for `b`, divided by the
/// magnitude of the drive term (or 1 when undriven).
pub fn relative_residuals(p: &SystemParams, b: &SteadyBranch) -> [f64; 2] {
    let i = Complex64::i();
    let a_in = b.s_in.sqrt();
    let (in1, in2) = match b.direction {
        Direction::Forward => (a_in, 0.0),
        Direction::Backward => (0.0, a_in),
    };
    let r1 = -Complex64::new(p.kappa_eff() / 2.0, p.delta1) * b.alpha1
        - i * p.g * b.q_bar * b.alpha1
        - i * p.j * b.alpha2
        + p.kappa1_e.sqrt() * in1;
    let r2 = -Complex64::new(p.kappa2() / 2.0, p.delta2) * b.alpha2 - i * p.j * b.alpha1
        + p.kappa2_e.sqrt() * in2;
    let drive = match b.direction {
        Direction::Forward => p.kappa1_e.sqrt() * a_in,
        Direction::Backward => p.kappa2_e.sqrt() * a_in,
    };
    let scale = if drive > 0.0 { drive } else { 1.0 };
    [r1.norm() / scale, r2.norm() / scale]
}

/// Every root at `s_in`, reconstructed. Roots that fail reconstruction are skipped.
pub fn steady_states(p: &SystemParams, d: Direction, s_in: f64) -> Vec<SteadyBranch> {
    transmission_roots(p, d, s_in)
        .into_iter()
        .filter_map(|t| reconstruct(p, d, s_in, t).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn fig2(j_factor: f64) -> SystemParams {
        presets::fig2_params(j_factor).resolve().unwrap()
    }

    #[test]
    fn linear_limit_root() {
        let mut p = fig2(1.0);
        p.g = 0.0;
        for d in Direction::BOTH {
            let r = transmission_roots(&p, d, 1e13);
            assert_eq!(r.len(), 1);
            assert!((r[0] - 0.00802).abs() < 5e-6, "{r:?}");
        }
        assert_eq!(
            transmission_roots(&p, Direction::Forward, 1e13),
            transmission_roots(&p, Direction::Backward, 1e13)
        );
    }

    #[test]
    fn zero_flux_root() {
        let p = fig2(1.0);
        let e = effective_params(&p, Direction::Forward);
        assert_eq!(
            transmission_roots(&p, Direction::Forward, 0.0),
            vec![e.lambda / (e.kappa * e.kappa + 4.0 * e.delta * e.delta)]
        );
    }

    #[test]
    fn inverse_at_t_max_is_double() {
        let p = fig2(1.0);
        let e = effective_params(&p, Direction::Forward);
        let t_max = e.lambda / (e.kappa * e.kappa);
        let plus = s_in_of_t(&p, Direction::Forward, t_max, InverseBranch::Plus).unwrap().unwrap();
        let minus = s_in_of_t(&p, Direction::Forward, t_max, InverseBranch::Minus).unwrap().unwrap();
        let expect = e.delta / (e.nonlinearity * t_max);
        assert!((plus / expect - 1.0).abs() < 1e-6);
        assert!((minus / expect - 1.0).abs() < 1e-6);
        assert_eq!(
            s_in_of_t(&p, Direction::Forward, 1.01 * t_max, InverseBranch::Plus).unwrap(),
            None
        );
    }

    #[test]
    fn inverse_needs_nonlinearity() {
        let mut p = fig2(1.0);
        p.g = 0.0;
        assert_eq!(
            s_in_of_t(&p, Direction::Forward, 1.0, InverseBranch::Plus),
            Err(SteadyStateError::NonPositiveNonlinearity)
        );
    }

    #[test]
    fn round_trip_recovers_t() {
        let p = fig2(1.0);
        for d in Direction::BOTH {
            for t in [0.5, 2.0, 10.0, 100.0, 400.0] {
                for b in [InverseBranch::Plus, InverseBranch::Minus] {
                    let Some(s) = s_in_of_t(&p, d, t, b).unwrap() else { continue };
                    let roots = transmission_roots(&p, d, s);
                    let best = roots
                        .iter()
                        .map(|r| (r / t - 1.0).abs())
                        .fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-8, "{d} T={t} {b:?}: {roots:?}");
                }
            }
        }
    }

    #[test]
    fn decoupled_linear_fields() {
        let mut p = fig2(1.0);
        p.g = 0.0;
        p.j = 0.0;
        let s = 4e13;
        let b = reconstruct(&p, Direction::Forward, s, 0.0).unwrap();
        assert_eq!(b.out_amp.norm(), 0.0);
        assert_eq!(b.alpha2.norm(), 0.0);
        let want = p.kappa1_e.sqrt() * s.sqrt() / Complex64::new(p.kappa_eff() / 2.0, p.delta1);
        assert!((b.alpha1 - want).norm() < 1e-12 * want.norm());
        assert_eq!(b.q_bar, 0.0);
    }

    #[test]
    fn reconstruct_rejects_non_roots() {
        let p = fig2(1.0);
        let r = reconstruct(&p, Direction::Forward, 4e13, 3.0);
        assert!(matches!(r, Err(SteadyStateError::InconsistentRoot { .. })));
    }

    #[test]
    fn plug_back_and_invariants() {
        let p = fig2(0.5);
        for d in Direction::BOTH {
            for s in [1e12, 1.5e13, 1e14, 1e15, 5e15, 3e16] {
                for b in steady_states(&p, d, s) {
                    let [r1, r2] = relative_residuals(&p, &b);
                    assert!(r1 < 1e-8 && r2 < 1e-8, "{d} s={s} T={}: {r1:e} {r2:e}", b.t);
                    assert!((b.out_amp.norm_sqr() / (b.t * s) - 1.0).abs() < 1e-10);
                    assert!(b.q_bar <= 0.0);
                    assert!(b.t > 0.0);
                }
            }
        }
    }
}
