//! The two inverse spectral problems.
//!
//! Odd potentials: the flat band of the unperturbed operator splits under
//! an odd potential into a narrow middle band; sampling that band's curve
//! at `N + 1` nodes locally determines the potential. Recovery is a damped
//! Newton iteration seeded by the analytic linearization (the flat-band
//! weight matrix).
//!
//! Monotone potentials: at `t = pi`, `b = 0` the fiber decouples into the
//! singleton `{v_1}` and 2x2 blocks, so the antiperiodic eigenvalues are
//! explicit quadratic roots. Inside the unit-bounded monotone classes this
//! map is injective and inverts in closed form; beyond the unit bound it
//! provably is not, and the counterexample construction below exhibits the
//! collision.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::asymptotics::flatband_weights;
use crate::bands::middle_eigenvalue;
use crate::lattice::RibbonSpec;
use crate::linalg;
use crate::{Error, Result};

/// Odd potential: values on the odd transverse sites `v_1, v_3, .., v_p`;
/// even sites are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddPotential {
    pub odd: Vec<f64>,
}

impl OddPotential {
    pub fn new(odd: Vec<f64>) -> Self {
        OddPotential { odd }
    }

    pub fn zeros(n: usize) -> Self {
        OddPotential {
            odd: vec![0.0; n + 1],
        }
    }

    pub fn n_chains(&self) -> usize {
        self.odd.len() - 1
    }

    /// Expand to the full length-`p` potential with zero even entries.
    pub fn expand(&self) -> Vec<f64> {
        let p = 2 * self.odd.len() - 1;
        let mut v = vec![0.0; p];
        for (k, &w) in self.odd.iter().enumerate() {
            v[2 * k] = w;
        }
        v
    }

    pub fn norm(&self) -> f64 {
        self.odd.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Quasimomentum nodes for the odd inverse problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    pub nodes: Vec<f64>,
}

impl NodeSet {
    /// The `2(N+1)`-periodic eigenvalue nodes `t_k = k pi / (N+1)`,
    /// `k = 0..N` — the square problem's default.
    pub fn default_nodes(n: usize) -> Self {
        let step = PI / (n as f64 + 1.0);
        NodeSet {
            nodes: (0..=n).map(|k| k as f64 * step).collect(),
        }
    }

    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let mut sorted = nodes.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("node values must be distinct".into()));
        }
        Ok(NodeSet { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Recovered potential plus convergence diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InverseResult {
    pub recovered: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Forward map of the odd problem: the middle sorted eigenvalue of
/// `J_{t_j}(b, v)` at every node.
pub fn forward_odd(w: &OddPotential, b: f64, nodes: &NodeSet) -> Vec<f64> {
    let spec = RibbonSpec::with_raw_b(w.n_chains(), b, w.expand()).unwrap();
    nodes
        .nodes
        .iter()
        .map(|&t| middle_eigenvalue(&spec, t))
        .collect()
}

/// Damped Newton recovery of an odd potential from flat-band samples.
///
/// The square problem uses `N + 1` nodes; the overdetermined uniqueness
/// variant feeds `p = 2N + 1` nodes into the same solver (least squares
/// in place of the direct solve). The ribbon width cannot be inferred
/// from the node count alone, so it is explicit.
///
/// The initial guess solves the analytic linearization `D_0 = (eta_m(t_n))`
/// directly; Newton steps use a central finite-difference Jacobian
/// (step 1e-6) and halve the step up to 8 times on residual increase.
pub fn recover_odd(
    n_chains: usize,
    targets: &[f64],
    b: f64,
    nodes: &NodeSet,
) -> Result<InverseResult> {
    let m = nodes.len();
    if m == 0 || targets.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for {} nodes",
            targets.len(),
            m
        )));
    }
    let n = n_chains;
    let unknowns = n + 1;
    if m < unknowns {
        return Err(Error::Domain(format!(
            "{m} nodes cannot determine {unknowns} odd potential values"
        )));
    }

    // analytic linearization
    let mut d0 = vec![0.0; m * unknowns];
    for (row, &t) in nodes.nodes.iter().enumerate() {
        let eta = flatband_weights(n, t, b);
        d0[row * unknowns..(row + 1) * unknowns].copy_from_slice(&eta);
    }
    let mut w = linalg::lstsq(m, unknowns, &d0, targets).ok_or(Error::DegenerateLinearization)?;

    let eval = |odd: &[f64]| -> Vec<f64> {
        forward_odd(&OddPotential::new(odd.to_vec()), b, nodes)
    };
    let residual_vec = |odd: &[f64]| -> Vec<f64> {
        eval(odd)
            .iter()
            .zip(targets)
            .map(|(f, t)| f - t)
            .collect()
    };
    let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target_scale = 1.0 + norm(targets);
    let tol = 1e-10 * target_scale;

    let mut res = residual_vec(&w);
    let mut res_norm = norm(&res);
    let mut iterations = 0usize;
    while res_norm > tol && iterations < 50 {
        // finite-difference Jacobian, column by column
        let h = 1e-6;
        let mut jac = vec![0.0; m * unknowns];
        for col in 0..unknowns {
            let mut wp = w.clone();
            wp[col] += h;
            let fp = eval(&wp);
            wp[col] -= 2.0 * h;
            let fm = eval(&wp);
            for row in 0..m {
                jac[row * unknowns + col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let step =
            linalg::lstsq(m, unknowns, &jac, &res).ok_or(Error::DegenerateLinearization)?;
        let mut alpha = 1.0f64;
        let mut accepted = false;
        for _ in 0..=8 {
            let trial: Vec<f64> = w
                .iter()
                .zip(&step)
                .map(|(wi, si)| wi - alpha * si)
                .collect();
            let trial_res = residual_vec(&trial);
            let trial_norm = norm(&trial_res);
            if trial_norm < res_norm {
                w = trial;
                res = trial_res;
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    Ok(InverseResult {
        recovered: w,
        residual: res_norm,
        iterations,
        converged: res_norm <= tol,
    })
}

/// The non-injectivity seed potential: `v_1 = -1`, `v_{2n+1} = n`,
/// even entries zero.
pub fn nonuniqueness_seed(n: usize) -> OddPotential {
    let mut odd = Vec::with_capacity(n + 1);
    odd.push(-1.0);
    for j in 1..=n {
        odd.push(j as f64);
    }
    OddPotential::new(odd)
}

/// Antiperiodic eigenvalues (fiber at `t = pi`, `b = 0`): the singleton
/// `v_1` plus the root pairs of `(x - v_{2k})(x - v_{2k+1}) = 1`,
/// sorted ascending.
pub fn antiperiodic_eigs(v: &[f64]) -> Result<Vec<f64>> {
    if v.len().is_multiple_of(2) || v.is_empty() {
        return Err(Error::DimensionMismatch(
            "potential length must be odd (p = 2N + 1)".into(),
        ));
    }
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0]);
    for pair in v[1..].chunks_exact(2) {
        let (x, y) = (pair[0], pair[1]);
        let half_sum = 0.5 * (x + y);
        let disc = (0.25 * (x - y) * (x - y) + 1.0).sqrt();
        out.push(half_sum - disc);
        out.push(half_sum + disc);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Which monotone class to land in when inverting antiperiodic data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increasing" => Ok(Direction::Increasing),
            "decreasing" => Ok(Direction::Decreasing),
            other => Err(Error::Domain(format!(
                "direction must be increasing or decreasing, got {other}"
            ))),
        }
    }
}

/// Closed-form recovery of a monotone potential from its antiperiodic
/// eigenvalues.
///
/// `psi` must interlace as `lambda_{-N} < .. < lambda_{-1} < 0 <=
/// lambda_0 <= 1 < lambda_1 < .. < lambda_N` (the image of the
/// unit-bounded monotone classes). `v_1 = lambda_0`; each block pair is
/// recovered from one negative and one positive eigenvalue via sum and
/// product. For the increasing class pair `k` couples
/// `(lambda_{-N-1+k}, lambda_k)`; for the decreasing class the coupling
/// reverses to `(lambda_{-k}, lambda_{N+1-k})` (block order flips along
/// the ribbon), and each block is emitted descending.
pub fn recover_monotone(psi: &[f64], direction: Direction) -> Result<InverseResult> {
    let p = psi.len();
    if p.is_multiple_of(2) || p < 3 {
        return Err(Error::DimensionMismatch(
            "need an odd number (2N + 1) of antiperiodic eigenvalues".into(),
        ));
    }
    let n = (p - 1) / 2;
    // Inside the unit-bounded monotone classes all antiperiodic
    // eigenvalues are distinct and the singleton v_1 lies in [0, 1];
    // repeated values or a displaced middle mean the data cannot come
    // from such a potential.
    if !psi.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::OutsideInjectivityDomain(
            "antiperiodic eigenvalues must be strictly increasing".into(),
        ));
    }
    let negatives = &psi[..n];
    let middle = psi[n];
    let positives = &psi[n + 1..];
    if !(0.0..=1.0).contains(&middle) {
        return Err(Error::OutsideInjectivityDomain(format!(
            "middle eigenvalue {middle} must lie in [0, 1]"
        )));
    }

    let mut v = vec![0.0; p];
    v[0] = middle;
    for k in 1..=n {
        let (neg, pos) = match direction {
            Direction::Increasing => (negatives[k - 1], positives[k - 1]),
            Direction::Decreasing => (negatives[n - k], positives[n - k]),
        };
        let sum = neg + pos;
        let prod = neg * pos + 1.0;
        let disc = sum * sum - 4.0 * prod;
        if disc < -1e-12 {
            return Err(Error::InconsistentSpectralData(format!(
                "pair ({neg}, {pos}) has negative discriminant {disc}"
            )));
        }
        let root = disc.max(0.0).sqrt();
        let (lo, hi) = (0.5 * (sum - root), 0.5 * (sum + root));
        match direction {
            Direction::Increasing => {
                v[2 * k - 1] = lo;
                v[2 * k] = hi;
            }
            Direction::Decreasing => {
                v[2 * k - 1] = hi;
                v[2 * k] = lo;
            }
        }
    }
    let check = antiperiodic_eigs(&v)?;
    let residual = check
        .iter()
        .zip(psi)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale = 1.0 + psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(InverseResult {
        recovered: v,
        residual,
        iterations: 0,
        converged: residual <= 1e-11 * scale,
    })
}

/// Two distinct strictly increasing potentials in the `alpha`-bounded
/// class (`alpha > 1`) with identical antiperiodic eigenvalues.
///
/// Construction: first entries `2 eps` vs `4 eps`; shared middles inside
/// `(1/4, 3/4)`; top blocks built so both last pairs have roots
/// `{4 eps, 2 + 6 eps}` and `{2 eps, 2 + 6 eps}` respectively, swapping
/// the roles of the singleton and the block root.
pub fn counterexample_pair(alpha: f64, epsilon: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 {
        return Err(Error::InvalidSpec("N must be at least 1".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let p = 2 * n + 1;
    let bound = alpha.min(1.25);
    let mut v = vec![0.0; p];
    let mut w = vec![0.0; p];
    v[0] = 2.0 * epsilon;
    w[0] = 4.0 * epsilon;
    // shared strictly increasing middles in (1/4, 3/4)
    for j in 1..=(p - 3) {
        let x = 0.25 + 0.5 * j as f64 / (p - 2) as f64;
        v[j] = x;
        w[j] = x;
    }
    let sv = (2.0 * epsilon + epsilon * epsilon).sqrt();
    v[p - 2] = 1.0 + 5.0 * epsilon - sv;
    v[p - 1] = 1.0 + 5.0 * epsilon + sv;
    let sw = (epsilon + epsilon * epsilon).sqrt();
    w[p - 2] = 1.0 + 4.0 * epsilon - 2.0 * sw;
    w[p - 1] = 1.0 + 4.0 * epsilon + 2.0 * sw;

    for (name, u) in [("v", &v), ("w", &w)] {
        if !u.windows(2).all(|pair| pair[0] < pair[1]) {
            return Err(Error::Infeasible(format!(
                "{name} is not strictly increasing for epsilon = {epsilon}"
            )));
        }
        if u[0] >= 0.25 || u[p - 2] <= 0.75 {
            return Err(Error::Infeasible(format!(
                "{name} violates the 1/4 / 3/4 separation for epsilon = {epsilon}"
            )));
        }
        if u[p - 1] >= bound {
            return Err(Error::Infeasible(format!(
                "{name} top entry {} exceeds min(alpha, 5/4) = {bound}; \
                 the construction needs alpha > 1 and small epsilon",
                u[p - 1]
            )));
        }
    }
    Ok((v, w))
}
