//! Small dense symmetric eigen-solvers on row-major `n × n` buffers.

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius tolerance for the Jacobi sweeps.
pub const JACOBI_TOL: f64 = 1e-12;

fn check_square(a: &[f64], n: usize) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::Shape(format!(
            "expected {n}x{n} matrix, buffer has {} entries",
            a.len()
        )));
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `JACOBI_TOL · ‖A‖_F`. Only the upper triangle is trusted to be symmetric
/// with the lower one; the input is symmetrized first.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    check_square(a, n)?;
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a[i * n + j] + a[j * n + i]);
        }
    }
    let total: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&m) <= JACOBI_TOL * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// `y = A x` for a row-major `n × n` matrix.
pub fn matvec(a: &[f64], n: usize, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate().take(n) {
        *yi = a[i * n..(i + 1) * n].iter().zip(x).map(|(u, v)| u * v).sum();
    }
}

/// Largest eigenvalue of a symmetric positive semi-definite matrix by power
/// iteration from the all-ones start vector.
pub fn largest_eigenvalue(a: &[f64], n: usize) -> Result<f64> {
    check_square(a, n)?;
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        matvec(a, n, &v, &mut w);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / norm);
        if (next - lambda).abs() <= 1e-13 * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}
