//! Bloch fiber matrices of the ribbon Hamiltonian.
//!
//! For quasimomentum `t` the fiber is the `p x p` real symmetric tridiagonal
//! matrix `J_t(b, v)` with diagonal `v` and off-diagonals
//!
//! ```text
//! a_n(t, b) = 1                                  (even n)
//! a_n(t, b) = 2 |cos(t/2 - (3n - 2) b / 2)|      (odd n)
//! ```
//!
//! A complex Hermitian variant with the same spectrum arises before the
//! final diagonal gauge transform; it is kept as a verification target
//! ([`build_complex_fiber`] / [`gauge_reduce`]), while all computation runs
//! on the real form.

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::RibbonSpec;
use crate::{Error, Result};

/// Real symmetric tridiagonal fiber `J_t(b, v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberMatrix {
    /// Main diagonal `v_1 .. v_p`.
    pub diag: Vec<f64>,
    /// Off-diagonal `a_1 .. a_{p-1}`; even-index entries are exactly 1.
    pub offdiag: Vec<f64>,
    pub t: f64,
    pub b: f64,
}

impl FiberMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Row-sum (infinity) norm.
    pub fn inf_norm(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            best = best.max(self.diag[i].abs() + left + right);
        }
        best
    }

    /// Matrix-vector product `J x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }
}

/// Complex Hermitian tridiagonal fiber (pre-gauge form).
///
/// `offdiag[n-1]` holds the entry at position `(n, n+1)` (1-based); the
/// `(n+1, n)` entry is its conjugate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexFiberMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<Complex64>,
    pub t: f64,
    pub b: f64,
}

impl ComplexFiberMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

#[inline]
fn offdiag_value(n: usize, t: f64, b: f64) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        2.0 * (0.5 * t - 0.5 * (3 * n - 2) as f64 * b).cos().abs()
    }
}

/// Off-diagonal entry `a_n(t, b)` (1-based `n`).
pub fn offdiag_entry(n: usize, t: f64, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::IndexOutOfRange(
            "off-diagonal index n starts at 1".into(),
        ));
    }
    Ok(offdiag_value(n, t, b))
}

/// Signed off-diagonal `2 cos(t/2 - (3n-2) b/2)` for odd `n` (1 for even).
///
/// The transfer-matrix recursion uses this form; spectra only ever see its
/// square, so signed and unsigned variants agree on all spectral quantities.
pub fn offdiag_entry_signed(n: usize, t: f64, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::IndexOutOfRange(
            "off-diagonal index n starts at 1".into(),
        ));
    }
    if n.is_multiple_of(2) {
        Ok(1.0)
    } else {
        Ok(2.0 * (0.5 * t - 0.5 * (3 * n - 2) as f64 * b).cos())
    }
}

/// Build the real fiber `J_t(b, v)` for a ribbon.
pub fn build_fiber(spec: &RibbonSpec, t: f64) -> FiberMatrix {
    let p = spec.p();
    let b = spec.b();
    let offdiag = (1..p).map(|n| offdiag_value(n, t, b)).collect();
    FiberMatrix {
        diag: spec.v().to_vec(),
        offdiag,
        t,
        b,
    }
}

/// Build the complex Hermitian fiber (pre-gauge form).
///
/// Entry pattern: even couplings `(2k, 2k+1)` are `e^{ikb}`; odd couplings
/// `(2k+1, 2k+2)` are `e^{-ikb} + e^{i((5k+1)b - t)}`, whose modulus equals
/// the real off-diagonal `a_{2k+1}(t, b)`.
pub fn build_complex_fiber(spec: &RibbonSpec, t: f64) -> ComplexFiberMatrix {
    let p = spec.p();
    let b = spec.b();
    let mut offdiag = Vec::with_capacity(p - 1);
    for n in 1..p {
        if n % 2 == 0 {
            let k = (n / 2) as f64;
            offdiag.push(Complex64::from_polar(1.0, k * b));
        } else {
            let k = ((n - 1) / 2) as f64;
            let gauge = Complex64::from_polar(1.0, -k * b);
            let hop = Complex64::from_polar(1.0, (5.0 * k + 1.0) * b - t);
            offdiag.push(gauge + hop);
        }
    }
    ComplexFiberMatrix {
        diag: spec.v().to_vec(),
        offdiag,
        t,
        b,
    }
}

/// Diagonal gauge transform making every off-diagonal real nonnegative.
///
/// Returns the real fiber together with phases `theta_1 .. theta_p`
/// (`theta_1 = 0`) such that conjugation by `diag(e^{i theta_j})` maps the
/// complex fiber to the real one. Across an exactly zero off-diagonal the
/// phase chain is undetermined and resets to 0.
pub fn gauge_reduce(m: &ComplexFiberMatrix) -> (FiberMatrix, Vec<f64>) {
    let p = m.dim();
    let mut phases = vec![0.0; p];
    let mut offdiag = Vec::with_capacity(p.saturating_sub(1));
    for j in 0..p.saturating_sub(1) {
        let c = m.offdiag[j];
        let r = c.norm();
        offdiag.push(r);
        if r == 0.0 {
            phases[j + 1] = 0.0;
        } else {
            phases[j + 1] = phases[j] + c.arg();
        }
    }
    (
        FiberMatrix {
            diag: m.diag.clone(),
            offdiag,
            t: m.t,
            b: m.b,
        },
        phases,
    )
}
