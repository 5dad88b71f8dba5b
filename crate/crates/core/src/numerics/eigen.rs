//! Eigenvalues of small dense complex matrices: Householder reduction to
//! upper Hessenberg form, then single-shift complex QR with Wilkinson shifts.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumericsError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Subdiagonal entries below this fraction of the matrix norm are deflated.
pub const DEFLATION_TOL: f64 = 1e-12;

fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in 0..n {
            v[i] = if i > k { a[(i, k)] } else { ZERO };
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A ← (I − 2vv*) A
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * a[(i, j)]).sum();
            for i in k + 1..n {
                a[(i, j)] -= 2.0 * v[i] * dot;
            }
        }
        // A ← A (I − 2vv*)
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            for j in k + 1..n {
                a[(i, j)] -= 2.0 * dot * v[j].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Unitary rotation `[[c, s], [−s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

/// All `n` eigenvalues (with multiplicity), in the order they deflate.
///
/// Fails with [`NumericsError::NoConvergence`] after `100·n²` QR sweeps.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, NumericsError> {
    let n = m.dim();
    if !m.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let norm = h.frobenius();
    let abs_tol = DEFLATION_TOL * norm;
    let cap = 100 * n * n;

    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= abs_tol || sub <= f64::EPSILON * local {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > cap {
            return Err(NumericsError::NoConvergence { iterations: cap });
        }

        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), h[(hi, hi - 1)].norm() * 0.75)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal() {
        let d = [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0), c(7.0, -1.0), c(2.0, 2.0), c(1.0, -2.0)];
        let m = ComplexMatrix::from_fn(6, |i, j| if i == j { d[i] } else { ZERO });
        let got = sorted(eigenvalues(&m).unwrap());
        let want = sorted(d.to_vec());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-14);
        }
    }

    #[test]
    fn mechanical_block() {
        let wm = 200.0;
        let gm = 0.05;
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-wm, 0.0)], vec![c(wm, 0.0), c(gm, 0.0)]])
            .unwrap();
        let got = sorted(eigenvalues(&m).unwrap());
        let root = (4.0 * wm * wm - gm * gm).sqrt();
        let want = sorted(vec![c(gm / 2.0, -root / 2.0), c(gm / 2.0, root / 2.0)]);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-12 * wm, "{g} vs {w}");
        }
    }

    #[test]
    fn defective_jordan_block() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        for e in eigenvalues(&m).unwrap() {
            assert!((e - c(2.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn companion_matrix() {
        // roots 1, 2, 3 of x³ − 6x² + 11x − 6
        let m = ComplexMatrix::from_rows(&[
            vec![c(6.0, 0.0), c(-11.0, 0.0), c(6.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let got = sorted(eigenvalues(&m).unwrap());
        for (g, w) in got.iter().zip([1.0, 2.0, 3.0]) {
            assert!((g - c(w, 0.0)).norm() < 1e-10);
        }
    }
}
