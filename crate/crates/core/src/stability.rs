//! Linearised dynamics around a steady state, `μ̇ = −Mμ + noise`, and the
//! eigenvalue stability test (stable iff every eigenvalue of M has Re > 0).

use num_complex::Complex64;

use crate::constants::RATE_UNIT;
use crate::numerics::{eigenvalues, ComplexMatrix, NumericsError};
use crate::params::SystemParams;
use crate::steady::SteadyBranch;

/// Basis of the fluctuation vector.
pub const STATE_ORDER: [&str; 6] = ["da1", "da1_dag", "da2", "da2_dag", "dq", "dp"];

/// Relative tolerance separating Stable/Unstable from Marginal.
pub const MARGINAL_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }

    pub fn is_stable(self) -> bool {
        self == Stability::Stable
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The 6×6 drift matrix M in the basis [`STATE_ORDER`], rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub m: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub min_real_part: f64,
    pub verdict: Stability,
}

/// M depends on the steady state only through α₁ and q̄.
pub fn drift_for(p: &SystemParams, alpha1: Complex64, q_bar: f64) -> DriftMatrix {
    let i = Complex64::i();
    let c = |x: f64| Complex64::new(x, 0.0);
    let detuning = p.delta1 + p.g * q_bar;
    let mut m = ComplexMatrix::zeros(6);

    m[(0, 0)] = Complex64::new(p.kappa_eff() / 2.0, detuning);
    m[(0, 2)] = i * p.j;
    m[(0, 4)] = i * p.g * alpha1;

    m[(1, 1)] = Complex64::new(p.kappa_eff() / 2.0, -detuning);
    m[(1, 3)] = -i * p.j;
    m[(1, 4)] = -i * p.g * alpha1.conj();

    m[(2, 0)] = i * p.j;
    m[(2, 2)] = Complex64::new(p.kappa2() / 2.0, p.delta2);

    m[(3, 1)] = -i * p.j;
    m[(3, 3)] = Complex64::new(p.kappa2() / 2.0, -p.delta2);

    // δq̇ = ω_m δp
    m[(4, 5)] = c(-p.omega_m);
    // δṗ = −ω_m δq − γ_m δp − g(α₁*δa₁ + α₁δa₁†)
    m[(5, 0)] = p.g * alpha1.conj();
    m[(5, 1)] = p.g * alpha1;
    m[(5, 4)] = c(p.omega_m);
    m[(5, 5)] = c(p.gamma_m);

    DriftMatrix { m }
}

pub fn build_drift(p: &SystemParams, branch: &SteadyBranch) -> DriftMatrix {
    drift_for(p, branch.alpha1, branch.q_bar)
}

/// Verdict from a set of eigenvalues of M.
pub fn verdict_of(eig: &[Complex64]) -> (f64, Stability) {
    let min_re = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = MARGINAL_REL_TOL * scale;
    let verdict = if min_re > tol {
        Stability::Stable
    } else if min_re < -tol {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    (min_re, verdict)
}

pub fn classify_matrix(drift: &DriftMatrix) -> Result<StabilityReport, NumericsError> {
    let scaled = drift.m.scale(1.0 / RATE_UNIT);
    let eigenvalues: Vec<Complex64> = eigenvalues(&scaled)?
        .into_iter()
        .map(|z| z * RATE_UNIT)
        .collect();
    let (min_real_part, verdict) = verdict_of(&eigenvalues);
    Ok(StabilityReport {
        eigenvalues,
        min_real_part,
        verdict,
    })
}

pub fn classify(p: &SystemParams, branch: &SteadyBranch) -> Result<StabilityReport, NumericsError> {
    classify_matrix(&build_drift(p, branch))
}

/// Classifies and records the verdict on the branch.
pub fn classify_branch(
    p: &SystemParams,
    branch: &mut SteadyBranch,
) -> Result<StabilityReport, NumericsError> {
    let report = classify(p, branch)?;
    branch.stable = Some(report.verdict);
    Ok(report)
}
