//! Zigzag ribbon graph, magnetic edge phases, and the direct-space
//! finite-section oracle.
//!
//! Vertices are addressed as `(n, k)` with `n` the longitudinal cell and
//! `k in {1..p}` the transverse site; rows `k = 0` and `k = p + 1` are
//! virtual and always zero (Dirichlet). Magnetic phases on directed edges
//! are exact linear forms `coeff * b` with integer `coeff`; the complex
//! exponential is only formed at application time.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use crate::{eigen, Error, Result};

/// Problem parameters: width `N`, magnetic parameter `b = B sqrt(3)/2`,
/// transverse potential `v` of length `p = 2N + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RibbonSpec {
    n_chains: usize,
    b: f64,
    v: Vec<f64>,
}

impl RibbonSpec {
    /// Build a spec with `b` reduced modulo `2 pi` (the operator satisfies
    /// `H_{b + 2 pi} = H_b`).
    pub fn new(n_chains: usize, b: f64, v: Vec<f64>) -> Result<Self> {
        Self::with_raw_b(n_chains, b.rem_euclid(TAU), v)
    }

    /// Build a spec keeping `b` exactly as given. Derivative sweeps in `b`
    /// need this: reduction is mathematically invisible but numerically
    /// reshuffles the cosine arguments.
    pub fn with_raw_b(n_chains: usize, b: f64, v: Vec<f64>) -> Result<Self> {
        if n_chains < 1 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        let p = 2 * n_chains + 1;
        if v.len() != p {
            return Err(Error::InvalidSpec(format!(
                "potential has {} entries, expected p = 2N + 1 = {}",
                v.len(),
                p
            )));
        }
        if !b.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("parameters must be finite".into()));
        }
        Ok(Self { n_chains, b, v })
    }

    /// Number of zigzag chains `N`.
    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    /// Transverse dimension `p = 2N + 1`.
    pub fn p(&self) -> usize {
        2 * self.n_chains + 1
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Same ribbon with the potential replaced.
    pub fn with_potential(&self, v: Vec<f64>) -> Result<Self> {
        Self::with_raw_b(self.n_chains, self.b, v)
    }
}

/// A vertex of the ribbon graph with its planar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vertex {
    pub n: i64,
    pub k: i64,
    pub x: f64,
    pub y: f64,
}

/// A directed edge `from -> to` with its class (1, 2, 3) and the integer
/// coefficient of the magnetic phase `coeff * b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphEdge {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub class: u8,
    pub phase_coeff: i64,
}

/// Finite window of the ribbon graph.
#[derive(Debug, Clone, Serialize)]
pub struct RibbonGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<GraphEdge>,
}

impl RibbonGraph {
    /// Degree of a vertex within the window.
    pub fn degree(&self, v: (i64, i64)) -> usize {
        self.edges
            .iter()
            .filter(|e| e.from == v || e.to == v)
            .count()
    }
}

/// Planar coordinates of vertex `(n, k)` with `k` the 1-based transverse
/// index: odd rows sit at `(sqrt(3)(2n + m), 3m)` for `k = 2m + 1`, even
/// rows at `(sqrt(3)(2n + m), 3m - 2)` for `k = 2m`.
pub fn vertex_position(n: i64, k: i64) -> (f64, f64) {
    let s3 = 3.0f64.sqrt();
    if k % 2 == 1 {
        let m = (k - 1) / 2;
        (s3 * (2 * n + m) as f64, (3 * m) as f64)
    } else {
        let m = k / 2;
        (s3 * (2 * n + m) as f64, (3 * m - 2) as f64)
    }
}

/// Integer coefficient of the magnetic phase on the directed edge
/// `from -> to`; the phase itself is `coeff * b`.
///
/// The six oriented cases are table lookups in `(n, k)`; no coordinate
/// geometry is involved. Reversing an edge negates the coefficient.
pub fn magnetic_phase_coeff(from: (i64, i64), to: (i64, i64)) -> Result<i64> {
    let (n, j) = from;
    let (tn, tj) = to;
    if j < 1 || tj < 1 {
        return Err(Error::UnknownEdgeClass(format!(
            "vertex rows must be >= 1, got {from:?} -> {to:?}"
        )));
    }
    if j % 2 == 1 {
        // odd-row source (n, 2m+1)
        let m = (j - 1) / 2;
        if (tn, tj) == (n, j + 1) {
            return Ok(n - m);
        }
        if (tn, tj) == (n - 1, j + 1) {
            return Ok(n + 2 * m);
        }
        if (tn, tj) == (n, j - 1) {
            return Ok(-(2 * n + m));
        }
    } else {
        // even-row source (n, 2m)
        let m = j / 2;
        if (tn, tj) == (n, j - 1) {
            return Ok(-(n - m + 1));
        }
        if (tn, tj) == (n + 1, j - 1) {
            return Ok(-(n + 2 * m - 1));
        }
        if (tn, tj) == (n, j + 1) {
            return Ok(2 * n + m);
        }
    }
    Err(Error::UnknownEdgeClass(format!(
        "{from:?} -> {to:?} is not a ribbon edge"
    )))
}

/// Magnetic phase (radians) on the directed edge `from -> to`.
pub fn magnetic_phase(from: (i64, i64), to: (i64, i64), b: f64) -> Result<f64> {
    Ok(magnetic_phase_coeff(from, to)? as f64 * b)
}

/// Evaluated magnetic phase on a directed edge; antisymmetric under
/// edge reversal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticPhase {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub value: f64,
}

impl MagneticPhase {
    pub fn on_edge(from: (i64, i64), to: (i64, i64), b: f64) -> Result<Self> {
        Ok(MagneticPhase {
            from,
            to,
            value: magnetic_phase(from, to, b)?,
        })
    }

    pub fn reversed(&self) -> Self {
        MagneticPhase {
            from: self.to,
            to: self.from,
            value: -self.value,
        }
    }
}

/// Build the ribbon graph over `n in window`, `k in {1..2N+1}`.
///
/// Edges are exactly the three classes `E_{n,m,1..3}` restricted to the
/// window; each undirected edge is stored once, directed from its even-row
/// endpoint as in the class definition.
pub fn build_ribbon(n_chains: usize, window: RangeInclusive<i64>) -> Result<RibbonGraph> {
    if n_chains < 1 {
        return Err(Error::InvalidSpec("N must be at least 1".into()));
    }
    if window.is_empty() {
        return Err(Error::InvalidSpec("window must be nonempty".into()));
    }
    let p = (2 * n_chains + 1) as i64;
    let mut vertices = Vec::new();
    for n in window.clone() {
        for k in 1..=p {
            let (x, y) = vertex_position(n, k);
            vertices.push(Vertex { n, k, x, y });
        }
    }
    let in_window = |n: i64, k: i64| window.contains(&n) && (1..=p).contains(&k);
    let mut edges = Vec::new();
    for n in window.clone() {
        for m in 1..=n_chains as i64 {
            let from = (n, 2 * m);
            // class 1: [v_{n,2m}, v_{n,2m+1}]
            // class 2: [v_{n,2m}, v_{n,2m-1}]
            // class 3: [v_{n,2m}, v_{n+1,2m-1}]
            let targets = [(n, 2 * m + 1, 1u8), (n, 2 * m - 1, 2u8), (n + 1, 2 * m - 1, 3u8)];
            for (tn, tk, class) in targets {
                if in_window(tn, tk) {
                    edges.push(GraphEdge {
                        from,
                        to: (tn, tk),
                        class,
                        phase_coeff: magnetic_phase_coeff(from, (tn, tk))?,
                    });
                }
            }
        }
    }
    Ok(RibbonGraph { vertices, edges })
}

/// Complex field on a window of cells, zero outside (Dirichlet truncation
/// in both directions).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub n_start: i64,
    pub cells: usize,
    pub p: usize,
    pub data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(n_start: i64, cells: usize, p: usize) -> Self {
        Field {
            n_start,
            cells,
            p,
            data: vec![Complex64::new(0.0, 0.0); cells * p],
        }
    }

    pub fn get(&self, n: i64, k: i64) -> Complex64 {
        if k < 1 || k > self.p as i64 {
            return Complex64::new(0.0, 0.0);
        }
        let off = n - self.n_start;
        if off < 0 || off >= self.cells as i64 {
            return Complex64::new(0.0, 0.0);
        }
        self.data[off as usize * self.p + (k as usize - 1)]
    }

    pub fn set(&mut self, n: i64, k: i64, value: Complex64) {
        let off = n - self.n_start;
        assert!(off >= 0 && (off as usize) < self.cells && k >= 1 && k <= self.p as i64);
        self.data[off as usize * self.p + (k as usize - 1)] = value;
    }

    pub fn inner(&self, other: &Field) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Directed neighbors of `(n, k)` in the infinite ribbon, with phase
/// coefficients. Targets outside `1..=p` are filtered by the caller's
/// zero-extension.
fn neighbors(n: i64, k: i64) -> [(i64, i64); 3] {
    if k % 2 == 1 {
        [(n, k - 1), (n - 1, k + 1), (n, k + 1)]
    } else {
        [(n, k - 1), (n + 1, k - 1), (n, k + 1)]
    }
}

/// Apply `H_b = Delta_b + V` to a field on a window, Dirichlet outside.
pub fn apply_hamiltonian(f: &Field, spec: &RibbonSpec) -> Result<Field> {
    if f.p != spec.p() {
        return Err(Error::DimensionMismatch(format!(
            "field has p = {}, spec has p = {}",
            f.p,
            spec.p()
        )));
    }
    let b = spec.b();
    let mut out = Field::zeros(f.n_start, f.cells, f.p);
    for off in 0..f.cells as i64 {
        let n = f.n_start + off;
        for k in 1..=f.p as i64 {
            let mut acc = spec.v()[(k - 1) as usize] * f.get(n, k);
            for (tn, tk) in neighbors(n, k) {
                if tk < 1 || tk > f.p as i64 {
                    continue;
                }
                let val = f.get(tn, tk);
                if val != Complex64::new(0.0, 0.0) {
                    let coeff = magnetic_phase_coeff((n, k), (tn, tk))?;
                    acc += Complex64::from_polar(1.0, coeff as f64 * b) * val;
                }
            }
            out.set(n, k, acc);
        }
    }
    Ok(out)
}

/// Eigenvalues of the `L p x L p` finite section of `H_b` (cells
/// `n = 0 .. L-1`, Dirichlet on both ends).
///
/// The Hermitian section is realified to a symmetric matrix of twice the
/// size (each eigenvalue doubled) unless `b` contributes no imaginary
/// part, and solved by the dense path of [`eigen`].
pub fn truncated_spectrum(spec: &RibbonSpec, cells: usize) -> Result<Vec<f64>> {
    if cells < 2 {
        return Err(Error::InvalidSpec("need at least L = 2 cells".into()));
    }
    let p = spec.p();
    let m = cells * p;
    let b = spec.b();
    let idx = |n: usize, k: usize| n * p + (k - 1);

    let mut re = vec![0.0f64; m * m];
    let mut im = vec![0.0f64; m * m];
    let mut any_im = false;
    for n in 0..cells {
        for k in 1..=p {
            let row = idx(n, k);
            re[row * m + row] = spec.v()[k - 1];
            for (tn, tk) in neighbors(n as i64, k as i64) {
                if tk < 1 || tk > p as i64 || tn < 0 || tn >= cells as i64 {
                    continue;
                }
                let col = idx(tn as usize, tk as usize);
                let coeff = magnetic_phase_coeff((n as i64, k as i64), (tn, tk))?;
                let phase = coeff as f64 * b;
                re[row * m + col] = phase.cos();
                let s = phase.sin();
                im[row * m + col] = s;
                if s != 0.0 {
                    any_im = true;
                }
            }
        }
    }

    if !any_im {
        return Ok(eigen::dense_sym_eigenvalues(m, &mut re));
    }

    // Realification [[A, -B], [B, A]]: symmetric since A^T = A, B^T = -B;
    // every eigenvalue of the Hermitian section appears exactly twice.
    let n2 = 2 * m;
    let mut big = vec![0.0f64; n2 * n2];
    for i in 0..m {
        for j in 0..m {
            big[i * n2 + j] = re[i * m + j];
            big[(i + m) * n2 + (j + m)] = re[i * m + j];
            big[i * n2 + (j + m)] = -im[i * m + j];
            big[(i + m) * n2 + j] = im[i * m + j];
        }
    }
    let doubled = eigen::dense_sym_eigenvalues(n2, &mut big);
    let mut out = Vec::with_capacity(m);
    for pair in doubled.chunks_exact(2) {
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}
