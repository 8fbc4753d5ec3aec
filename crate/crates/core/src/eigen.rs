//! Self-contained symmetric eigensolvers.
//!
//! Everything spectral in this crate funnels through Sturm-sequence
//! bisection on symmetric tridiagonal matrices: it is unconditionally
//! convergent and indifferent to the exactly-zero off-diagonals that the
//! fibers produce at `t = pi`, `b = 0` (where the matrix decouples into a
//! singleton and 2x2 blocks). Dense symmetric input (the finite-section
//! oracle) is first reduced to tridiagonal form by Householder reflections.

use crate::fiber::{gauge_reduce, ComplexFiberMatrix, FiberMatrix};

/// Eigenvalues (ascending) and optional orthonormal eigenvectors.
///
/// Index `i` in `values` corresponds to band label `k = i - N` when the
/// matrix is a `p = 2N + 1` fiber.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

fn inf_norm(diag: &[f64], offdiag: &[f64]) -> f64 {
    let n = diag.len();
    let mut best = 0.0f64;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        best = best.max(diag[i].abs() + left + right);
    }
    best
}

fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// Number of eigenvalues strictly below `x` (LDL^T inertia count).
///
/// Zero pivots are replaced by a tiny negative value scaled to the matrix
/// norm, the standard Sturm-sequence safeguard.
pub fn sturm_count_raw(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let pivmin = f64::EPSILON * f64::EPSILON * inf_norm(diag, offdiag).max(1.0);
    let mut count = 0usize;
    let mut d = diag[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        d = (diag[i] - x) - offdiag[i - 1] * offdiag[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Characteristic polynomial and its derivative at `x`, with common
/// rescaling to dodge overflow; only the ratio `p/p'` is meaningful.
fn charpoly_ratio(diag: &[f64], offdiag: &[f64], x: f64) -> Option<f64> {
    let n = diag.len();
    let mut p_prev = 1.0f64;
    let mut p = diag[0] - x;
    let mut dp_prev = 0.0f64;
    let mut dp = -1.0f64;
    for i in 1..n {
        let e2 = offdiag[i - 1] * offdiag[i - 1];
        let a = diag[i] - x;
        let p_next = a * p - e2 * p_prev;
        let dp_next = -p + a * dp - e2 * dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        let m = p.abs().max(p_prev.abs()).max(dp.abs()).max(dp_prev.abs());
        if m > 1e150 {
            let s = 1.0 / m;
            p *= s;
            p_prev *= s;
            dp *= s;
            dp_prev *= s;
        }
    }
    if dp == 0.0 || !dp.is_finite() || !p.is_finite() {
        None
    } else {
        Some(p / dp)
    }
}

/// All eigenvalues by bisection, each polished by one Newton step on the
/// characteristic recurrence; eigenvectors (optional) by inverse iteration
/// with reorthogonalization inside clusters.
pub fn eig_tridiag_raw(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> SpectrumResult {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    if n == 0 {
        return SpectrumResult {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        };
    }
    let scale = inf_norm(diag, offdiag).max(1.0);
    let tol = 1e-13 * scale;
    let (glo, ghi) = gershgorin(diag, offdiag);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let mut lo = glo - tol;
        let mut hi = ghi + tol;
        for _ in 0..160 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if sturm_count_raw(diag, offdiag, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut lam = 0.5 * (lo + hi);
        if let Some(step) = charpoly_ratio(diag, offdiag, lam) {
            let refined = lam - step;
            if refined >= lo - tol && refined <= hi + tol {
                lam = refined;
            }
        }
        values.push(lam);
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let vectors = want_vectors.then(|| eigenvectors(diag, offdiag, &values, scale));
    SpectrumResult { values, vectors }
}

/// Solve `(T - shift I) x = rhs` by tridiagonal LU with partial pivoting.
fn solve_shifted(diag: &[f64], offdiag: &[f64], shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let d = diag[0] - shift;
        let d = if d.abs() < 1e-300 { 1e-300 } else { d };
        rhs[0] /= d;
        return;
    }
    let tiny = f64::EPSILON * f64::EPSILON * inf_norm(diag, offdiag).max(1.0);
    // u0: main, u1: first super, u2: second super (fill-in from pivoting).
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    for i in 0..n {
        u0[i] = diag[i] - shift;
        if i + 1 < n {
            u1[i] = offdiag[i];
        }
    }
    for i in 0..n - 1 {
        let sub = offdiag[i];
        if sub.abs() > u0[i].abs() {
            // swap rows i and i+1
            let (r0, r1, r2) = (u0[i], u1[i], u2[i]);
            u0[i] = sub;
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            u0[i + 1] = r1;
            u1[i + 1] = r2;
            rhs.swap(i, i + 1);
            let l = r0 / u0[i];
            u0[i + 1] -= l * u1[i];
            u1[i + 1] -= l * u2[i];
            rhs[i + 1] -= l * rhs[i];
            // row i+1 lost its original sub entry by the swap; nothing else.
        } else {
            // No swap; u2[i] stays zero. Guard a vanishing pivot.
            if u0[i].abs() < tiny {
                u0[i] = if u0[i] < 0.0 { -tiny } else { tiny };
            }
            let l = sub / u0[i];
            u0[i + 1] -= l * u1[i];
            rhs[i + 1] -= l * rhs[i];
        }
    }
    if u0[n - 1].abs() < tiny {
        u0[n - 1] = if u0[n - 1] < 0.0 { -tiny } else { tiny };
    }
    rhs[n - 1] /= u0[n - 1];
    rhs[n - 2] = (rhs[n - 2] - u1[n - 2] * rhs[n - 1]) / u0[n - 2];
    for i in (0..n - 2).rev() {
        rhs[i] = (rhs[i] - u1[i] * rhs[i + 1] - u2[i] * rhs[i + 2]) / u0[i];
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

/// Fixed unit-norm start vector; deterministic so repeated solves are
/// byte-identical.
fn start_vector(n: usize) -> Vec<f64> {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        x.push((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
    }
    normalize(&mut x);
    x
}

fn eigenvectors(diag: &[f64], offdiag: &[f64], values: &[f64], scale: f64) -> Vec<Vec<f64>> {
    let n = diag.len();
    let cluster_gap = 1e-8 * scale;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cluster_start = 0usize;
    for (idx, &lam) in values.iter().enumerate() {
        if idx > 0 && lam - values[idx - 1] > cluster_gap {
            cluster_start = idx;
        }
        // Tiny shift inside the cluster separates identical eigenvalues for
        // the shifted solve.
        let shift = lam + (idx - cluster_start) as f64 * f64::EPSILON * scale;
        let mut x = start_vector(n);
        for _ in 0..4 {
            solve_shifted(diag, offdiag, shift, &mut x);
            for prev in &vectors[cluster_start..idx] {
                let dot: f64 = prev.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                for (xi, pi) in x.iter_mut().zip(prev.iter()) {
                    *xi -= dot * pi;
                }
            }
            normalize(&mut x);
            let residual = residual_norm(diag, offdiag, lam, &x);
            if residual <= 1e-12 * scale {
                break;
            }
        }
        vectors.push(x);
    }
    vectors
}

fn residual_norm(diag: &[f64], offdiag: &[f64], lam: f64, x: &[f64]) -> f64 {
    let n = diag.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - lam) * x[i];
        if i > 0 {
            r += offdiag[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            r += offdiag[i] * x[i + 1];
        }
        acc += r * r;
    }
    acc.sqrt()
}

/// Number of fiber eigenvalues strictly below `x`.
pub fn sturm_count(m: &FiberMatrix, x: f64) -> usize {
    sturm_count_raw(&m.diag, &m.offdiag, x)
}

/// Full spectrum of a real fiber.
pub fn eig_tridiag(m: &FiberMatrix, want_vectors: bool) -> SpectrumResult {
    eig_tridiag_raw(&m.diag, &m.offdiag, want_vectors)
}

/// Full spectrum of a complex Hermitian fiber: gauge-reduce to the real
/// form, then solve that.
pub fn eig_hermitian_tridiag(m: &ComplexFiberMatrix) -> SpectrumResult {
    let (real, _) = gauge_reduce(m);
    eig_tridiag(&real, false)
}

/// Eigenvalues of a dense symmetric matrix (row-major, `n x n`), via
/// Householder tridiagonalization followed by bisection.
///
/// Only the lower triangle is read. The matrix is consumed as workspace.
pub fn dense_sym_eigenvalues(n: usize, a: &mut [f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[0]];
    }
    let mut e = vec![0.0; n];
    // Householder reduction of the leading principal submatrices
    // (EISPACK tred1 layout, no eigenvector accumulation).
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        let mut scale = 0.0f64;
        if l > 0 {
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
        }
        if scale == 0.0 || l == 0 {
            e[i] = a[i * n + l];
        } else {
            for k in 0..=l {
                a[i * n + k] /= scale;
                h += a[i * n + k] * a[i * n + k];
            }
            let f = a[i * n + l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[i * n + l] = f - g;
            let mut fsum = 0.0f64;
            for j in 0..=l {
                let mut g = 0.0f64;
                for k in 0..=j {
                    g += a[j * n + k] * a[i * n + k];
                }
                for k in j + 1..=l {
                    g += a[k * n + j] * a[i * n + k];
                }
                e[j] = g / h;
                fsum += e[j] * a[i * n + j];
            }
            let hh = fsum / (h + h);
            for j in 0..=l {
                let f = a[i * n + j];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[j * n + k] -= f * e[k] + g * a[i * n + k];
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let offdiag: Vec<f64> = (1..n).map(|i| e[i]).collect();
    eig_tridiag_raw(&diag, &offdiag, false).values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::build_fiber;
    use crate::lattice::RibbonSpec;
    use std::f64::consts::PI;

    fn fiber(n: usize, t: f64, b: f64, v: Vec<f64>) -> FiberMatrix {
        build_fiber(&RibbonSpec::with_raw_b(n, b, v).unwrap(), t)
    }

    fn rng_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn sturm_count_bounds() {
        let m = fiber(2, 1.2, 0.3, vec![0.1, -0.4, 0.2, 0.0, 0.3]);
        let hi = m.inf_norm() + 1.0;
        assert_eq!(sturm_count(&m, -hi), 0);
        assert_eq!(sturm_count(&m, hi), 5);
    }

    #[test]
    fn sturm_count_n1_closed_form() {
        // eigenvalues -sqrt(5), 0, sqrt(5)
        let m = fiber(1, 0.0, 0.0, vec![0.0; 3]);
        assert_eq!(sturm_count(&m, 1.0), 2);
        assert_eq!(sturm_count(&m, -1.0), 1);
        assert_eq!(sturm_count(&m, 3.0), 3);
    }

    #[test]
    fn sturm_count_monotone_in_x() {
        let m = fiber(3, 2.0, 0.7, vec![0.3, -0.2, 0.5, 0.0, -0.8, 0.1, 0.4]);
        let mut last = 0;
        let mut x = -6.0;
        while x <= 6.0 {
            let c = sturm_count(&m, x);
            assert!(c >= last);
            last = c;
            x += 0.173;
        }
    }

    #[test]
    fn eig_n1_closed_form_values() {
        let got = eig_tridiag(&fiber(1, 0.0, 0.0, vec![0.0; 3]), false).values;
        let want = [-(5.0f64).sqrt(), 0.0, (5.0f64).sqrt()];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        let got = eig_tridiag(&fiber(1, PI, 0.0, vec![0.0; 3]), false).values;
        for (g, w) in got.iter().zip([-1.0, 0.0, 1.0].iter()) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_matches_exact_rational_oracle() {
        // Independent high-precision check: exact-arithmetic Sturm bisection
        // on the same matrices down to width 1e-12.
        let mut next = rng_stream(7);
        for trial in 0..12 {
            let n = 1 + trial % 4;
            let p = 2 * n + 1;
            let v: Vec<f64> = (0..p).map(|_| 2.0 * next() - 1.0).collect();
            let m = fiber(n, next() * 2.0 * PI, next() * 2.0 * PI, v);
            let got = eig_tridiag(&m, false).values;
            let want = crate::exact_oracle::eigenvalues(&m.diag, &m.offdiag, 1e-12);
            for (g, w) in got.iter().zip(want.iter()) {
                assert!((g - w).abs() < 1e-10, "trial {trial}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn trace_and_frobenius_identities() {
        let mut next = rng_stream(99);
        for _ in 0..20 {
            let n = 1 + (next() * 5.0) as usize;
            let p = 2 * n + 1;
            let v: Vec<f64> = (0..p).map(|_| 2.0 * next() - 1.0).collect();
            let m = fiber(n, next() * 2.0 * PI, next() * 2.0 * PI, v);
            let vals = eig_tridiag(&m, false).values;
            let trace: f64 = vals.iter().sum();
            let want_trace: f64 = m.diag.iter().sum();
            assert!((trace - want_trace).abs() < 1e-10);
            let frob: f64 = vals.iter().map(|x| x * x).sum();
            let want_frob: f64 = m.diag.iter().map(|x| x * x).sum::<f64>()
                + 2.0 * m.offdiag.iter().map(|x| x * x).sum::<f64>();
            assert!((frob - want_frob).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvectors_residual_and_orthogonality() {
        let mut next = rng_stream(3);
        for _ in 0..15 {
            let n = 1 + (next() * 6.0) as usize;
            let p = 2 * n + 1;
            let v: Vec<f64> = (0..p).map(|_| 2.0 * next() - 1.0).collect();
            let m = fiber(n, next() * 2.0 * PI, next() * 2.0 * PI, v);
            let res = eig_tridiag(&m, true);
            let vecs = res.vectors.as_ref().unwrap();
            for (i, lam) in res.values.iter().enumerate() {
                let r = residual_norm(&m.diag, &m.offdiag, *lam, &vecs[i]);
                assert!(r <= 1e-10 * (1.0 + lam.abs()), "residual {r}");
                for j in 0..i {
                    let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                    assert!(dot.abs() <= 1e-8, "orthogonality {dot}");
                }
            }
        }
    }

    #[test]
    fn eigenvectors_at_decoupled_point() {
        // t = pi, b = 0: odd off-diagonals vanish, eigenvalues +-1 are
        // N-fold degenerate at v = 0.
        let m = fiber(3, PI, 0.0, vec![0.0; 7]);
        let res = eig_tridiag(&m, true);
        let vecs = res.vectors.as_ref().unwrap();
        for i in 0..7 {
            let r = residual_norm(&m.diag, &m.offdiag, res.values[i], &vecs[i]);
            assert!(r <= 1e-10, "residual {r}");
            for j in 0..i {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                assert!(dot.abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn eigenvalues_lipschitz_in_t() {
        // entry derivatives are bounded by 1, so |d lambda / dt| <= p
        let mut next = rng_stream(55);
        for _ in 0..20 {
            let n = 1 + (next() * 5.0) as usize;
            let p = (2 * n + 1) as f64;
            let v: Vec<f64> = (0..2 * n + 1).map(|_| 2.0 * next() - 1.0).collect();
            let s = RibbonSpec::with_raw_b(n, next() * 2.0 * PI, v).unwrap();
            let t = next() * 2.0 * PI;
            let delta = 1e-3;
            let a = eig_tridiag(&crate::fiber::build_fiber(&s, t), false).values;
            let b = eig_tridiag(&crate::fiber::build_fiber(&s, t + delta), false).values;
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= p * delta + 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_path_matches_real_at_b0() {
        let s = RibbonSpec::new(2, 0.0, vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let real = eig_tridiag(&crate::fiber::build_fiber(&s, 1.1), false).values;
        let complexed = eig_hermitian_tridiag(&crate::fiber::build_complex_fiber(&s, 1.1)).values;
        for (a, b) in real.iter().zip(&complexed) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_spectrum_symmetric_at_v0() {
        let s = RibbonSpec::new(2, 0.7, vec![0.0; 5]).unwrap();
        let vals = eig_hermitian_tridiag(&crate::fiber::build_complex_fiber(&s, 2.1)).values;
        for i in 0..vals.len() {
            let mirrored = -vals[vals.len() - 1 - i];
            assert!((vals[i] - mirrored).abs() < 1e-11);
        }
    }

    #[test]
    fn dense_path_matches_tridiagonal_solver() {
        let mut next = rng_stream(42);
        for _ in 0..8 {
            let n = 3 + (next() * 10.0) as usize;
            // random symmetric
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let x = 2.0 * next() - 1.0;
                    a[i * n + j] = x;
                    a[j * n + i] = x;
                }
            }
            let dense = dense_sym_eigenvalues(n, &mut a.clone());
            // oracle: same matrix is tridiagonalized by construction when we
            // zero out the far entries; instead cross-check trace/frobenius.
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            let got_trace: f64 = dense.iter().sum();
            assert!((trace - got_trace).abs() < 1e-9 * (1.0 + trace.abs()));
            let frob: f64 = a.iter().map(|x| x * x).sum();
            let got_frob: f64 = dense.iter().map(|x| x * x).sum();
            assert!((frob - got_frob).abs() < 1e-8 * (1.0 + frob));
        }
    }

    #[test]
    fn dense_path_on_known_tridiagonal() {
        // Chain with zero diagonal and unit hopping: eigenvalues
        // 2 cos(k pi / (n+1)).
        let n = 12;
        let mut a = vec![0.0; n * n];
        for i in 0..n - 1 {
            a[i * n + i + 1] = 1.0;
            a[(i + 1) * n + i] = 1.0;
        }
        let got = dense_sym_eigenvalues(n, &mut a);
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-11, "{g} vs {w}");
        }
    }
}
