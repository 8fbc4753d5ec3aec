//! Minimal dense solves for the inverse-problem Newton steps.

/// Solve `A x = b` (row-major `n x n`) by LU with partial pivoting.
/// Returns `None` when a pivot falls below `1e-12` times the matrix scale.
pub(crate) fn solve(n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut lu = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if lu[row * n + col].abs() > lu[piv * n + col].abs() {
                piv = row;
            }
        }
        if lu[piv * n + col].abs() < 1e-12 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                lu.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = lu[col * n + col];
        for row in col + 1..n {
            let f = lu[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                lu[row * n + j] -= f * lu[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        for j in row + 1..n {
            let xj = x[j];
            x[row] -= lu[row * n + j] * xj;
        }
        x[row] /= lu[row * n + row];
    }
    Some(x)
}

/// Least-squares solve of an `m x n` system (`m >= n`) via the normal
/// equations; adequate for the small well-conditioned Jacobians here.
pub(crate) fn lstsq(m: usize, n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), m * n);
    assert_eq!(b.len(), m);
    if m == n {
        return solve(n, a, b);
    }
    let mut ata = vec![0.0; n * n];
    let mut atb = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for r in 0..m {
                acc += a[r * n + i] * a[r * n + j];
            }
            ata[i * n + j] = acc;
        }
        atb[i] = (0..m).map(|r| a[r * n + i] * b[r]).sum();
    }
    solve(n, &ata, &atb)
}
