//! Eigenvalues of small real symmetric matrices by cyclic Jacobi rotation.
#![allow(clippy::needless_range_loop)]

use crate::psychometrics::PsychError;

pub const MAX_SWEEPS: usize = 50;
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-10;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// All eigenvalues of `m`, sorted descending.
///
/// Each sweep rotates every (p, q) pair above the diagonal in row order. Iteration
/// stops when the largest off-diagonal magnitude is below `1e-10` (scaled by the
/// Frobenius norm when that exceeds one).
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>, PsychError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(PsychError::Ragged);
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(PsychError::NotSymmetric);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1f64.max(m[i][j].abs()).max(m[j][i].abs());
            if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(PsychError::NotSymmetric);
            }
        }
    }

    let mut a: Vec<Vec<f64>> = m.to_vec();
    // average the two triangles so rounding noise does not bias the rotations
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let norm = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let tol = OFF_DIAGONAL_TOLERANCE * norm.max(1.0);

    let max_off = |a: &[Vec<f64>]| {
        let mut off = 0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i][j].abs());
            }
        }
        off
    };

    let mut converged = max_off(&a) < tol;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let (arp, arq) = (a[r][p], a[r][q]);
                    let new_rp = c * arp - s * arq;
                    let new_rq = c * arq + s * arp;
                    a[r][p] = new_rp;
                    a[p][r] = new_rp;
                    a[r][q] = new_rq;
                    a[q][r] = new_rq;
                }
            }
        }
        converged = max_off(&a) < tol;
    }
    if !converged {
        return Err(PsychError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}
