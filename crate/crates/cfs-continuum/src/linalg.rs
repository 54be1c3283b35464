//! Dense complex 4x4 eigenvalue solver: Householder reduction to Hessenberg
//! form followed by shifted QR iteration with Givens rotations.
//!
//! This is the independent oracle for the closed-form chain eigenvalues; it
//! never looks at the algebraic structure of its input.

use num_complex::Complex64;

use crate::clifford::SpinMatrix;

const N: usize = 4;
type Mat = [[Complex64; N]; N];

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Reduce to upper Hessenberg form by complex Householder reflections.
fn hessenberg(a: &mut Mat) {
    for k in 0..N - 2 {
        // Column k, rows k+1..N
        let mut norm2 = 0.0f64;
        for r in k + 1..N {
            norm2 += a[r][k].norm_sqr();
        }
        if norm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let x0 = a[k + 1][k];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-(norm2.sqrt()), 0.0)
        } else {
            -x0 / x0.norm() * norm2.sqrt()
        };
        // v = x - alpha e1
        let mut v = [zero(); N];
        for r in k + 1..N {
            v[r] = a[r][k];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A <- (I - beta v v*) A
        for c in 0..N {
            let mut dot = zero();
            for r in k + 1..N {
                dot += v[r].conj() * a[r][c];
            }
            dot = dot.scale(beta);
            for r in k + 1..N {
                a[r][c] -= v[r] * dot;
            }
        }
        // A <- A (I - beta v v*)
        for r in 0..N {
            let mut dot = zero();
            for c in k + 1..N {
                dot += a[r][c] * v[c];
            }
            dot = dot.scale(beta);
            for c in k + 1..N {
                a[r][c] -= dot * v[c].conj();
            }
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closest to the bottom-right entry
/// (Wilkinson shift).
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR sweep on the active window [0, m) of a Hessenberg
/// matrix, implemented with Givens rotations.
fn qr_step(h: &mut Mat, m: usize, shift: Complex64) {
    let mut cs = [zero(); N];
    let mut sn = [zero(); N];
    for i in 0..m {
        h[i][i] -= shift;
    }
    // QR factorization: eliminate the subdiagonal.
    for i in 0..m - 1 {
        let a = h[i][i];
        let b = h[i + 1][i];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r <= f64::MIN_POSITIVE {
            (Complex64::new(1.0, 0.0), zero())
        } else {
            (a.conj().scale(1.0 / r), b.conj().scale(1.0 / r))
        };
        cs[i] = c;
        sn[i] = s;
        for col in i..m {
            let x = h[i][col];
            let y = h[i + 1][col];
            h[i][col] = c * x + s * y;
            h[i + 1][col] = -s.conj() * x + c.conj() * y;
        }
    }
    // RQ: apply the adjoint rotations on the right.
    for i in 0..m - 1 {
        let c = cs[i];
        let s = sn[i];
        for row in 0..(i + 2).min(m) {
            let x = h[row][i];
            let y = h[row][i + 1];
            h[row][i] = x * c.conj() + y * s.conj();
            h[row][i + 1] = -x * s + y * c;
        }
    }
    for i in 0..m {
        h[i][i] += shift;
    }
}

/// Eigenvalues of a complex 4x4 matrix, unordered, with algebraic
/// multiplicity.
pub fn eigenvalues4(m: &SpinMatrix) -> [Complex64; 4] {
    let mut a = m.entries;
    // Work on a normalized copy for scale-independent deflation thresholds.
    let scale = m.max_abs();
    if scale == 0.0 {
        return [zero(); 4];
    }
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v = v.scale(1.0 / scale);
        }
    }
    hessenberg(&mut a);

    let mut eigs = [zero(); 4];
    let mut mdim = N;
    let mut iter_guard = 0usize;
    while mdim > 0 {
        if mdim == 1 {
            eigs[0] = a[0][0];
            break;
        }
        // Deflate a negligible bottom subdiagonal entry.
        let sub = a[mdim - 1][mdim - 2].norm();
        let diag = a[mdim - 2][mdim - 2].norm() + a[mdim - 1][mdim - 1].norm();
        if sub <= 1e-15 * diag.max(1e-300) {
            eigs[mdim - 1] = a[mdim - 1][mdim - 1];
            mdim -= 1;
            continue;
        }
        if mdim == 2 {
            let (p, q, r, s) = (a[0][0], a[0][1], a[1][0], a[1][1]);
            let tr = p + s;
            let disc = ((p - s) * (p - s) * 0.25 + q * r).sqrt();
            eigs[0] = tr * 0.5 + disc;
            eigs[1] = tr * 0.5 - disc;
            break;
        }
        iter_guard += 1;
        if iter_guard > 200 {
            // Exceptional shift to break stalls.
            let shift = a[mdim - 1][mdim - 2] + a[mdim - 1][mdim - 1];
            qr_step(&mut a, mdim, shift);
            iter_guard = 0;
            continue;
        }
        let shift = wilkinson(
            a[mdim - 2][mdim - 2],
            a[mdim - 2][mdim - 1],
            a[mdim - 1][mdim - 2],
            a[mdim - 1][mdim - 1],
        );
        qr_step(&mut a, mdim, shift);
    }

    for e in &mut eigs {
        *e = e.scale(scale);
    }
    eigs
}

/// Solve a real 4x4 linear system by Gaussian elimination with partial
/// pivoting; None when the matrix is numerically singular.
pub fn solve4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..4 {
        let (pivot_row, pivot) = (col..4)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot <= 1e-300 {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 4];
    for r in (0..4).rev() {
        let mut acc = rhs[r];
        for c in r + 1..4 {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

/// Greedy nearest-neighbor matching of two eigenvalue multisets; returns the
/// largest pairing distance.
pub fn pair_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, &y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best {
                    best = d;
                    best_j = j;
                }
            }
        }
        if best_j != usize::MAX {
            used[best_j] = true;
            worst = worst.max(best);
        }
    }
    worst
}
