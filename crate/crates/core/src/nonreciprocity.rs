//! Power sweeps in both directions, isolation ratio, working-region
//! detection and the closed-form transmission optima.

use thiserror::Error;

use crate::exec::Execution;
use crate::numerics::NumericsError;
use crate::params::{effective_params, photon_flux, power_of_flux, Direction, SystemParams};
use crate::stability::{classify, Stability};
use crate::steady::{reconstruct, s_in_of_t, transmission_roots, InverseBranch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("effective detuning Δ = {delta:e} rad/s is not positive; the transmission bound does not apply")]
    RegimeViolation { delta: f64 },
    #[error("forward transmission never exceeds 1 (maximum {t_max:e})")]
    NoAmplification { t_max: f64 },
    #[error("amplification bound κ* = {bound:e} rad/s is not positive")]
    NoAmplificationPossible { bound: f64 },
    #[error("forward transmission does not fall back to 1 inside the sweep")]
    UpperBoundOutsideSweep,
    #[error("sweep is empty")]
    EmptySweep,
    #[error("input power must be non-negative and finite")]
    InvalidPower,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// One root of the cubic with its stability verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub t: f64,
    pub verdict: Stability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p_in: f64,
    pub s_in: f64,
    /// Ascending in T.
    pub forward: Vec<BranchPoint>,
    pub backward: Vec<BranchPoint>,
    /// 10·log₁₀(T/T̃) on the largest stable root of each direction.
    pub isolation_db: Option<f64>,
}

impl SweepRow {
    pub fn branches(&self, d: Direction) -> &[BranchPoint] {
        match d {
            Direction::Forward => &self.forward,
            Direction::Backward => &self.backward,
        }
    }

    pub fn selected(&self, d: Direction) -> Option<f64> {
        selected_transmission(self.branches(d))
    }
}

/// Largest stable root, if any.
pub fn selected_transmission(branches: &[BranchPoint]) -> Option<f64> {
    branches
        .iter()
        .rev()
        .find(|b| b.verdict.is_stable())
        .map(|b| b.t)
}

/// Smallest stable root, if any.
pub fn lowest_stable_transmission(branches: &[BranchPoint]) -> Option<f64> {
    branches.iter().find(|b| b.verdict.is_stable()).map(|b| b.t)
}

pub fn isolation_db(t_forward: f64, t_backward: f64) -> f64 {
    10.0 * (t_forward / t_backward).log10()
}

/// `n` log-spaced powers from `p_min` to `p_max`, both included.
pub fn log_grid(p_min: f64, p_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![p_min],
        _ => {
            let (a, b) = (p_min.ln(), p_max.ln());
            (0..n)
                .map(|k| match k {
                    0 => p_min,
                    k if k == n - 1 => p_max,
                    k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// `n` evenly spaced powers from `p_min` to `p_max`, both included.
pub fn lin_grid(p_min: f64, p_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![p_min],
        _ => (0..n)
            .map(|k| p_min + (p_max - p_min) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn classified_roots(p: &SystemParams, d: Direction, s_in: f64) -> Result<Vec<BranchPoint>, AnalysisError> {
    let mut out = Vec::new();
    for t in transmission_roots(p, d, s_in) {
        // roots that cannot be reconstructed are spurious polish artefacts
        let Ok(b) = reconstruct(p, d, s_in, t) else { continue };
        let verdict = classify(p, &b)?.verdict;
        out.push(BranchPoint { t, verdict });
    }
    Ok(out)
}

/// Every root in both directions at one input power.
pub fn analyze_power(p: &SystemParams, power: f64) -> Result<SweepRow, AnalysisError> {
    let s_in = photon_flux(power, p.omega_d).map_err(|_| AnalysisError::InvalidPower)?;
    if !s_in.is_finite() {
        return Err(AnalysisError::InvalidPower);
    }
    let forward = classified_roots(p, Direction::Forward, s_in)?;
    let backward = classified_roots(p, Direction::Backward, s_in)?;
    let isolation_db = match (selected_transmission(&forward), selected_transmission(&backward)) {
        (Some(t), Some(tb)) if t > 0.0 && tb > 0.0 => Some(isolation_db(t, tb)),
        _ => None,
    };
    Ok(SweepRow {
        p_in: power,
        s_in,
        forward,
        backward,
        isolation_db,
    })
}

/// Independent evaluation of every grid power.
pub fn sweep(p: &SystemParams, powers: &[f64], exec: Execution) -> Result<Vec<SweepRow>, AnalysisError> {
    exec.map(powers, |&pw| analyze_power(p, pw))
        .into_iter()
        .collect()
}

/// Largest stable forward root at flux `s`, or 0 if none.
fn upper_forward(p: &SystemParams, s: f64) -> Result<f64, AnalysisError> {
    let roots = classified_roots(p, Direction::Forward, s)?;
    Ok(selected_transmission(&roots).unwrap_or(0.0))
}

const GOLDEN_ITERS: usize = 200;
const LOG_TOL: f64 = 1e-12;

/// Maximises the upper forward branch over ln s in [lo, hi].
fn golden_max(p: &SystemParams, s_lo: f64, s_hi: f64) -> Result<(f64, f64), AnalysisError> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (s_lo.ln(), s_hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = upper_forward(p, c.exp())?;
    let mut fd = upper_forward(p, d.exp())?;
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() <= LOG_TOL {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = upper_forward(p, c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = upper_forward(p, d.exp())?;
        }
    }
    Ok(if fc >= fd { (c.exp(), fc) } else { (d.exp(), fd) })
}

/// Numerical maximum of the upper forward branch: grid argmax refined by a
/// golden-section search on its two neighbouring intervals. Returns (s_in, T).
pub fn numerical_t_max(rows: &[SweepRow], p: &SystemParams) -> Result<(f64, f64), AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::EmptySweep);
    }
    let upper: Vec<f64> = rows
        .iter()
        .map(|r| r.selected(Direction::Forward).unwrap_or(0.0))
        .collect();
    let k = upper
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let lo = rows[k.saturating_sub(1)].s_in;
    let hi = rows[(k + 1).min(rows.len() - 1)].s_in;
    if !(lo > 0.0 && hi > lo) {
        return Ok((rows[k].s_in, upper[k]));
    }
    let (s, t) = golden_max(p, lo, hi)?;
    Ok(if t >= upper[k] { (s, t) } else { (rows[k].s_in, upper[k]) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkingRegion {
    /// Power where the upper forward branch reaches its maximum, W.
    pub p_lower: f64,
    /// Power where the upper forward branch falls back to T = 1, W.
    pub p_upper: f64,
    /// Numerically located maximum of the upper forward branch.
    pub t_max_num: f64,
    pub criterion_notes: String,
}

const BISECT_REL_TOL: f64 = 1e-10;

/// Locates [p_lower, p_upper] from a sweep.
///
/// p_lower is the analytic peak position Δ/(U·T_max) when Δ > 0, otherwise the
/// numerical argmax. p_upper is bisected (in ln s) on upper-branch T = 1 to
/// 1e-10 relative, starting from the first grid interval past the maximum
/// where the branch drops below 1.
pub fn working_region(rows: &[SweepRow], p: &SystemParams) -> Result<WorkingRegion, AnalysisError> {
    let (s_peak, t_max_num) = numerical_t_max(rows, p)?;
    if t_max_num <= 1.0 {
        return Err(AnalysisError::NoAmplification { t_max: t_max_num });
    }
    let e = effective_params(p, Direction::Forward);
    let mut notes = Vec::new();
    let s_lower = if e.delta > 0.0 && e.nonlinearity > 0.0 {
        let t_theor = e.lambda / (e.kappa * e.kappa);
        match s_in_of_t(p, Direction::Forward, t_theor, InverseBranch::Plus) {
            Ok(Some(s)) => {
                notes.push("p_lower at the analytic peak Δ/(U·T_max,theor)".to_string());
                s
            }
            _ => {
                notes.push("p_lower at the numerical argmax".to_string());
                s_peak
            }
        }
    } else {
        notes.push("Δ ≤ 0: p_lower at the numerical argmax".to_string());
        s_peak
    };

    let start = rows.partition_point(|r| r.s_in <= s_peak.max(s_lower));
    let mut s_upper = None;
    let mut prev = (s_peak.max(s_lower), t_max_num);
    for r in &rows[start..] {
        let t = r.selected(Direction::Forward).unwrap_or(0.0);
        if t < 1.0 {
            s_upper = Some(bisect_unit_crossing(p, prev.0, r.s_in)?);
            break;
        }
        prev = (r.s_in, t);
    }
    let Some(s_upper) = s_upper else {
        return Err(AnalysisError::UpperBoundOutsideSweep);
    };
    notes.push("p_upper by bisection on upper-branch T = 1".to_string());
    Ok(WorkingRegion {
        p_lower: power_of_flux(s_lower, p.omega_d),
        p_upper: power_of_flux(s_upper, p.omega_d),
        t_max_num,
        criterion_notes: notes.join("; "),
    })
}

fn bisect_unit_crossing(p: &SystemParams, s_above: f64, s_below: f64) -> Result<f64, AnalysisError> {
    let (mut a, mut b) = (s_above.ln(), s_below.ln());
    while (b - a).abs() > BISECT_REL_TOL {
        let m = 0.5 * (a + b);
        if upper_forward(p, m.exp())? >= 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Isolation (dB) on the selected branches at `n` log-spaced powers across
/// the region, endpoints included. Returns (min, max, at p_lower, at p_upper).
pub fn isolation_over_region(
    p: &SystemParams,
    region: &WorkingRegion,
    n: usize,
    exec: Execution,
) -> Result<IsolationSpan, AnalysisError> {
    let powers = log_grid(region.p_lower, region.p_upper, n.max(2));
    let rows = sweep(p, &powers, exec)?;
    let values: Vec<f64> = rows.iter().filter_map(|r| r.isolation_db).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(IsolationSpan {
        min,
        max,
        at_lower: rows.first().and_then(|r| r.isolation_db),
        at_upper: rows.last().and_then(|r| r.isolation_db),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationSpan {
    pub min: f64,
    pub max: f64,
    pub at_lower: Option<f64>,
    pub at_upper: Option<f64>,
}

/// λ/κ², the largest transmission the forward cubic allows when Δ > 0.
pub fn t_max_theor(p: &SystemParams) -> Result<f64, AnalysisError> {
    let e = effective_params(p, Direction::Forward);
    if e.delta <= 0.0 {
        return Err(AnalysisError::RegimeViolation { delta: e.delta });
    }
    Ok(e.lambda / (e.kappa * e.kappa))
}

/// Hopping that maximises λ/κ².
pub fn j_opt(p: &SystemParams) -> f64 {
    (p.kappa_eff() * p.cavity2_denominator() / (4.0 * p.kappa2())).sqrt()
}

/// λ/κ² at J = j_opt.
pub fn t_max_opt(p: &SystemParams) -> f64 {
    (p.kappa1_e / p.kappa_eff()) * (p.kappa2_e / p.kappa2())
}

/// κ_eff at which λ/κ² = 1; amplification needs 0 < κ_eff < κ*.
pub fn keff_amplification_bound(p: &SystemParams) -> Result<f64, AnalysisError> {
    let den = p.cavity2_denominator();
    let bound = 4.0 * p.j * (p.kappa1_e * p.kappa2_e / den).sqrt()
        - 4.0 * p.j * p.j * p.kappa2() / den;
    if bound <= 0.0 {
        return Err(AnalysisError::NoAmplificationPossible { bound });
    }
    Ok(bound)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationEstimate {
    /// |E₀| in dB at the optimal coupling.
    pub e0_db: f64,
    /// 10·log₁₀(Δ₁²/κ_eff²).
    pub simplified_db: f64,
    /// Whether κ₂ ≫ κ_eff and Δ₁ ~ Δ₂ ≫ κ_eff hold (ratios ≥ 10, Δ₁/Δ₂ within 10×).
    pub simplified_valid: bool,
}

pub fn isolation_opt(p: &SystemParams) -> IsolationEstimate {
    let k2 = p.kappa2();
    let keff = p.kappa_eff();
    let x = (k2 * p.delta1 - keff * p.delta2) / (k2 * keff);
    let big = |v: f64| v >= 10.0 * keff;
    let ratio = p.delta1 / p.delta2;
    IsolationEstimate {
        e0_db: 10.0 * (1.0 + x * x).log10(),
        simplified_db: 10.0 * (p.delta1 * p.delta1 / (keff * keff)).log10(),
        simplified_valid: big(k2) && big(p.delta1) && big(p.delta2) && (0.1..=10.0).contains(&ratio),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{angular_to_hz, hz_to_angular};
    use crate::presets;

    fn fig2(j: f64) -> SystemParams {
        presets::fig2_params(j).resolve().unwrap()
    }

    #[test]
    fn grids() {
        let g = log_grid(1e-9, 1e-5, 5);
        assert_eq!(g.first(), Some(&1e-9));
        assert_eq!(g.last(), Some(&1e-5));
        assert!((g[2] / 1e-7 - 1.0).abs() < 1e-12);
        assert_eq!(lin_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn optimal_coupling_value_and_stationarity() {
        let p = fig2(1.0);
        let j = j_opt(&p);
        assert!((angular_to_hz(j) / 2.41e6 - 1.0).abs() < 5e-3);
        let t = |factor: f64| {
            let mut q = p;
            q.j = j * factor;
            t_max_theor(&q).unwrap()
        };
        let h = 1e-4;
        assert!(t(1.0 + h) <= t(1.0) && t(1.0 - h) <= t(1.0));
        let second = t(1.0 + h) - 2.0 * t(1.0) + t(1.0 - h);
        assert!(second < 0.0);
        let mut q = p;
        q.delta2 = 0.0;
        assert!((j_opt(&q) - (q.kappa_eff() * q.kappa2()).sqrt() / 2.0).abs() < 1e-9 * j);
    }

    #[test]
    fn analytic_optima() {
        let p = fig2(1.0);
        assert!((t_max_opt(&p) - 500.0).abs() < 1e-9);
        let mut q = p;
        q.j = j_opt(&p);
        assert!((t_max_theor(&q).unwrap() / t_max_opt(&q) - 1.0).abs() < 1e-12);
        let f4 = presets::fig4_params(50e6, 20e6).resolve().unwrap();
        assert!((t_max_opt(&f4) - 250.0).abs() < 1e-9);
        let iso = isolation_opt(&p);
        assert!((iso.e0_db - 47.95).abs() < 0.01, "{}", iso.e0_db);
        assert!(iso.simplified_valid);
    }

    #[test]
    fn isolation_formula_limits() {
        let mut p = fig2(1.0);
        p.delta2 = p.kappa2() * p.delta1 / p.kappa_eff();
        assert!(isolation_opt(&p).e0_db.abs() < 1e-9);
        let keff = p.kappa_eff();
        p.kappa2_o = 0.0;
        p.kappa2_e = 500.0 * keff;
        p.delta1 = 250.0 * keff;
        p.delta2 = 250.0 * keff;
        let iso = isolation_opt(&p);
        assert!((iso.e0_db - iso.simplified_db).abs() < 0.1);
    }

    #[test]
    fn amplification_bound() {
        let p = fig2(1.0);
        let k = keff_amplification_bound(&p).unwrap();
        assert!((angular_to_hz(k) / 1e6 - 8.75).abs() < 0.01, "{}", angular_to_hz(k));
        let mut q = p;
        q.gain = q.kappa1() - k;
        assert!((t_max_theor(&q).unwrap() - 1.0).abs() < 1e-10);
        let mut z = p;
        z.j = hz_to_angular(1.0);
        let small = keff_amplification_bound(&z).unwrap();
        assert!(small > 0.0 && small < 1e-5 * k);
        z.j = 0.0;
        assert!(matches!(
            keff_amplification_bound(&z),
            Err(AnalysisError::NoAmplificationPossible { .. })
        ));
    }

    #[test]
    fn regime_violation() {
        let mut p = fig2(1.0);
        p.delta1 = -p.delta1;
        assert!(matches!(t_max_theor(&p), Err(AnalysisError::RegimeViolation { .. })));
    }

    #[test]
    fn fig5_lift_is_monotone() {
        let t: Vec<f64> = presets::FIG5_KAPPA1_E_HZ
            .iter()
            .map(|&k| t_max_theor(&presets::fig5_params(k).resolve().unwrap()).unwrap())
            .collect();
        assert!(t[0] < t[1] && t[1] < t[2], "{t:?}");
    }

    #[test]
    fn linear_sweep_has_no_isolation() {
        let mut p = fig2(1.0);
        p.g = 0.0;
        let rows = sweep(&p, &log_grid(1e-9, 1e-3, 25), Execution::Sequential).unwrap();
        for r in rows {
            assert_eq!(r.isolation_db, Some(0.0));
        }
    }

    #[test]
    fn weak_coupling_has_no_amplification() {
        let mut p = fig2(1.0);
        p.j = hz_to_angular(0.05e6);
        let rows = sweep(&p, &log_grid(1e-8, 1e-1, 200), Execution::Sequential).unwrap();
        assert!(matches!(
            working_region(&rows, &p),
            Err(AnalysisError::NoAmplification { .. })
        ));
    }

    #[test]
    fn region_endpoints_are_consistent() {
        let p = fig2(1.0);
        let grid = log_grid(presets::SWEEP_P_MIN_W, presets::SWEEP_P_MAX_W, 601);
        let rows = sweep(&p, &grid, Execution::Parallel).unwrap();
        let region = working_region(&rows, &p).unwrap();
        assert!(region.p_lower < region.p_upper);
        let theor = t_max_theor(&p).unwrap();
        assert!((region.t_max_num / theor - 1.0).abs() < 1e-6);
        let s_u = photon_flux(region.p_upper, p.omega_d).unwrap();
        let analytic = s_in_of_t(&p, Direction::Forward, 1.0, InverseBranch::Plus).unwrap().unwrap();
        assert!((s_u / analytic - 1.0).abs() < 1e-8);
    }
}
