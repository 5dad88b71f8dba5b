#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use unidir_core::constants::{hz_to_angular, RATE_UNIT};
use unidir_core::noise::{build_input_matrix, scattering, scattering_with};
use unidir_core::numerics::{eigenvalues, ComplexMatrix};
use unidir_core::params::{photon_flux, Direction, SystemParams};
use unidir_core::stability::drift_for;
use unidir_core::steady::{
    relative_residuals, s_in_of_t, steady_states, transmission_cubic, transmission_roots,
    InverseBranch,
};

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random valid parameter set (angular units); J is left as drawn.
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let kappa1_e = hz_to_angular(log_uniform(rng, 5e6, 300e6));
    let kappa1_o = hz_to_angular(rng.random_range(0.0..50e6));
    let kappa_eff = hz_to_angular(log_uniform(rng, 0.05e6, 20e6));
    let p = SystemParams {
        omega_d: hz_to_angular(200e12),
        omega_m: hz_to_angular(log_uniform(rng, 10e6, 500e6)),
        gamma_m: hz_to_angular(log_uniform(rng, 1e3, 100e3)),
        g: hz_to_angular(log_uniform(rng, 0.1e3, 5e3)),
        j: hz_to_angular(log_uniform(rng, 0.1e6, 20e6)),
        delta1: hz_to_angular(rng.random_range(-100e6..100e6)),
        delta2: hz_to_angular(rng.random_range(-100e6..100e6)),
        kappa1_e,
        kappa1_o,
        kappa2_e: hz_to_angular(log_uniform(rng, 5e6, 300e6)),
        kappa2_o: hz_to_angular(rng.random_range(0.0..50e6)),
        gain: (kappa1_e + kappa1_o - kappa_eff).max(0.0),
    };
    p.validated().expect("generator produces valid parameters")
}

/// Moves J onto the manifold where forward and backward Kerr coefficients match.
pub fn onto_reciprocity_manifold(mut p: SystemParams) -> SystemParams {
    p.j = (p.kappa1_e * p.cavity2_denominator() / (4.0 * p.kappa2_e)).sqrt();
    p
}

pub fn random_power<R: Rng>(rng: &mut R) -> f64 {
    log_uniform(rng, 1e-9, 1e-2)
}

/// Largest relative residual of the cubic and of the cavity equations over
/// every root at this power.
pub fn plug_back_residual(p: &SystemParams, d: Direction, power: f64) -> f64 {
    let s = photon_flux(power, p.omega_d).unwrap();
    let cubic = transmission_cubic(p, d, s);
    let mut worst: f64 = 0.0;
    for t in transmission_roots(p, d, s) {
        worst = worst.max(cubic.relative_residual(t));
    }
    for b in steady_states(p, d, s) {
        let [r1, r2] = relative_residuals(p, &b);
        worst = worst.max(r1).max(r2);
    }
    worst
}

/// Relative distance from `t` to the nearest root at s_in_of_t(t), if defined.
pub fn round_trip_error(p: &SystemParams, d: Direction, t: f64, branch: InverseBranch) -> Option<f64> {
    let s = s_in_of_t(p, d, t, branch).ok()??;
    transmission_roots(p, d, s)
        .iter()
        .map(|r| (r / t - 1.0).abs())
        .reduce(f64::min)
}

pub fn lu_det(m: &ComplexMatrix) -> Complex64 {
    let n = m.dim();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
            .unwrap();
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        let d = a[k][k];
        det *= d;
        if d.norm() == 0.0 {
            return det;
        }
        for r in k + 1..n {
            let f = a[r][k] / d;
            for c in k..n {
                let v = a[k][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// (relative trace error, relative determinant error) of the eigenvalues of
/// the scaled drift matrix at every forward root.
pub fn eigen_identity_errors(p: &SystemParams, power: f64) -> (f64, f64) {
    let s = photon_flux(power, p.omega_d).unwrap();
    let mut worst = (0.0f64, 0.0f64);
    for d in Direction::BOTH {
        for b in steady_states(p, d, s) {
            let m = drift_for(p, b.alpha1, b.q_bar).m.scale(1.0 / RATE_UNIT);
            let eig = eigenvalues(&m).unwrap();
            let tr: Complex64 = eig.iter().sum();
            let prod: Complex64 = eig.iter().product();
            let det = lu_det(&m);
            let tr_err = (tr - m.trace()).norm() / m.max_abs();
            let det_err = (prod - det).norm() / det.norm();
            worst = (worst.0.max(tr_err), worst.1.max(det_err));
        }
    }
    worst
}

/// max |𝒯 + I| far above every rate, over all roots at this power.
pub fn asymptote_error(p: &SystemParams, power: f64) -> f64 {
    let s = photon_flux(power, p.omega_d).unwrap();
    let big = 1e6 * [p.omega_m, p.kappa1(), p.kappa2(), p.delta1.abs(), p.delta2.abs(), p.j]
        .into_iter()
        .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for d in Direction::BOTH {
        for b in steady_states(p, d, s) {
            for w in [big, -big] {
                let t = scattering(p, &b, w).unwrap();
                for i in 0..12 {
                    for j in 0..12 {
                        let id = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((t.t[i][j] + id).norm());
                    }
                }
            }
        }
    }
    worst
}

/// |Σ_c |𝒯_{r,c}|² − 1| over annihilation rows/columns, for the passive
/// linear system built from `p` (g = 0, no gain).
pub fn passive_flux_error(p: &SystemParams, omega: f64) -> f64 {
    let mut q = *p;
    q.g = 0.0;
    q.gain = 0.0;
    let m = drift_for(&q, Complex64::new(0.0, 0.0), 0.0).m;
    let t = scattering_with(&m, &build_input_matrix(&q), omega).unwrap();
    let mut worst: f64 = 0.0;
    for row in [0, 2, 4, 6] {
        let sum: f64 = [0, 2, 4, 6].iter().map(|&c| t.t[row][c].norm_sqr()).sum();
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}

/// Largest relative difference between forward and backward root sets, or
/// infinity if their counts differ.
pub fn direction_root_mismatch(p: &SystemParams, power: f64) -> f64 {
    let s = photon_flux(power, p.omega_d).unwrap();
    let f = transmission_roots(p, Direction::Forward, s);
    let b = transmission_roots(p, Direction::Backward, s);
    if f.len() != b.len() {
        return f64::INFINITY;
    }
    f.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs() / x.abs())
        .fold(0.0, f64::max)
}
