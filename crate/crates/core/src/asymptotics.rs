//! Perturbative band-edge formulas and their numeric verification.
//!
//! Each closed-form prediction here comes with a runner that measures the
//! same quantity from exact eigensolves and reports prediction, numeric
//! value, residual, and a pass flag against a stated tolerance model.
//! Finite-difference oracles are central differences with one Richardson
//! extrapolation, step scaled to the parameter magnitude.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{PI, TAU};

use crate::bands::{band_edges, cos_k, dispersion, middle_eigenvalue, sin_k};
use crate::eigen::eig_tridiag;
use crate::fiber::{build_fiber, offdiag_entry};
use crate::lattice::RibbonSpec;
use crate::{Error, Result};

/// Scalar or interval quantity in a verification report.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Scalar(f64),
    Interval([f64; 2]),
}

impl Quantity {
    pub fn residual_to(&self, other: &Quantity) -> f64 {
        match (self, other) {
            (Quantity::Scalar(a), Quantity::Scalar(b)) => (a - b).abs(),
            (Quantity::Interval(a), Quantity::Interval(b)) => {
                (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
            }
            (Quantity::Scalar(a), Quantity::Interval(b))
            | (Quantity::Interval(b), Quantity::Scalar(a)) => {
                (a - b[0]).abs().max((a - b[1]).abs())
            }
        }
    }
}

/// Outcome of checking one asymptotic formula against exact numerics.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub formula_id: String,
    pub params: serde_json::Value,
    pub predicted: Quantity,
    pub numeric: Quantity,
    pub residual: f64,
    pub order_claim: String,
    pub passed: bool,
}

/// First-order magnetic band edges: outer edges `mu_1^+- = +-sqrt(5+4c_1)`
/// are stationary in `b`; inner edges move with slope
/// `-+ 3 c_1 sqrt(4 - c_1^2) / (2 (N+1) s_1)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MagneticEdges {
    pub mu1_plus: f64,
    pub mu1_minus: f64,
    pub mu2_plus: f64,
    pub mu2_minus: f64,
}

/// Evaluate the displayed first-order magnetic edge asymptotics at `b`.
pub fn magnetic_edges_asym(n: usize, b: f64) -> MagneticEdges {
    let c1 = cos_k(n, 1);
    let s1 = sin_k(n, 1);
    let outer = (5.0 + 4.0 * c1).sqrt();
    let slope = inner_edge_slope_coeff(n);
    MagneticEdges {
        mu1_plus: outer,
        mu1_minus: -outer,
        mu2_plus: s1 - slope * b,
        mu2_minus: -s1 + slope * b,
    }
}

/// The displayed inner-edge slope coefficient `3 c_1 sqrt(4-c_1^2) / (2(N+1) s_1)`.
pub fn inner_edge_slope_coeff(n: usize) -> f64 {
    let c1 = cos_k(n, 1);
    let s1 = sin_k(n, 1);
    3.0 * c1 * (4.0 - c1 * c1).sqrt() / (2.0 * (n as f64 + 1.0) * s1)
}

/// Flat-band sensitivity weights `eta_0 .. eta_N`: normalized squares of
/// the alternating off-diagonal products `beta_k = prod_{j<=2k} a_j(t, b)`.
pub fn flatband_weights(n: usize, t: f64, b: f64) -> Vec<f64> {
    let mut beta = Vec::with_capacity(n + 1);
    beta.push(1.0f64);
    let mut prod = 1.0f64;
    for k in 1..=n {
        prod *= offdiag_entry(2 * k - 1, t, b).unwrap() * offdiag_entry(2 * k, t, b).unwrap();
        beta.push(prod);
    }
    let total: f64 = beta.iter().map(|x| x * x).sum();
    beta.iter().map(|x| x * x / total).collect()
}

/// First-order flat-band shift `sum_k v_{2k+1} eta_k(t)`.
pub fn flatband_firstorder(spec: &RibbonSpec, t: f64) -> f64 {
    let eta = flatband_weights(spec.n_chains(), t, spec.b());
    spec.v()
        .iter()
        .step_by(2)
        .zip(eta.iter())
        .map(|(v, w)| v * w)
        .sum()
}

/// Strong-field band intervals: for site `k`, endpoints
/// `tau v_k - xi_k^-+ / tau` with
/// `xi_k^+- = r_k^+- / (v_{k-1} - v_k) + r_{k+1}^+- / (v_{k+1} - v_k)`,
/// `r` boundary-zero, 1 on odd interior index, `{0, 4}` on even.
///
/// The `k = p` interval collapses at this order (its only hop is the
/// constant even coupling), so the top band is predicted flat to
/// `O(1/tau)`; its true width decays faster. Returned intervals are
/// ordered lo <= hi; index `k - 1` corresponds to band `j = k - N - 1`.
pub fn strongfield_edges(n: usize, v: &[f64], tau: f64) -> Result<Vec<(f64, f64)>> {
    let p = 2 * n + 1;
    if v.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "potential has {} entries, expected {p}",
            v.len()
        )));
    }
    if !v.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "strong-field asymptotics need a strictly increasing potential".into(),
        ));
    }
    // r_k^-, r_k^+ with boundary convention r_1 = r_{p+1} = 0
    let r = |k: usize| -> (f64, f64) {
        if k == 1 || k == p + 1 {
            (0.0, 0.0)
        } else if k % 2 == 1 {
            (1.0, 1.0)
        } else {
            (0.0, 4.0)
        }
    };
    // boundary r's vanish, so the v_0 = v_{p+1} = 0 convention never divides
    let term = |r: f64, d: f64| if r == 0.0 { 0.0 } else { r / d };
    let mut out = Vec::with_capacity(p);
    for k in 1..=p {
        let below = if k > 1 { v[k - 2] - v[k - 1] } else { -v[k - 1] };
        let above = if k < p { v[k] - v[k - 1] } else { -v[k - 1] };
        let (rm_lo, rm_hi) = r(k);
        let (rp_lo, rp_hi) = r(k + 1);
        let xi_lo = term(rm_lo, below) + term(rp_lo, above);
        let xi_hi = term(rm_hi, below) + term(rp_hi, above);
        let e1 = tau * v[k - 1] - xi_lo / tau;
        let e2 = tau * v[k - 1] - xi_hi / tau;
        out.push((e1.min(e2), e1.max(e2)));
    }
    Ok(out)
}

/// Both printed candidates for the magnetic derivative of the unperturbed
/// eigenvalue curve, `d lambda_k / d b` at `b = 0`, `v = 0`.
///
/// The two disagree; [`verify_db_formula`] adjudicates them against a
/// finite-difference oracle and reports which family is consistent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DbCandidates {
    /// `sin(t/2)/((N+1) lambda) * ((N+1)(3N+1)(2 cos(t/2) + c_k sgn(t - pi)) - 6 cos(t/2))`
    pub display: f64,
    /// `2 sin(t/2)/((N+1) lambda) * ((N+1)(3N-2) cos(t/2) - (N+1)(3N+1) c_k / 2)`
    pub proof: f64,
}

pub fn db_lambda_formula(n: usize, k: i64, t: f64) -> Result<DbCandidates> {
    if k == 0 || k.unsigned_abs() as usize > n {
        return Err(Error::Domain(format!("band index k = {k} out of range")));
    }
    if t <= 0.0 || t >= TAU || (t - PI).abs() < 1e-12 {
        return Err(Error::Domain(
            "derivative formulas are excluded at t in {0, pi, 2 pi}".into(),
        ));
    }
    let nf = n as f64 + 1.0;
    let c = cos_k(n, k.abs());
    let a = 2.0 * (0.5 * t).cos().abs();
    let lam = (a * a - 2.0 * c * a + 1.0).sqrt() * k.signum() as f64;
    let half_sin = (0.5 * t).sin();
    let half_cos = (0.5 * t).cos();
    let sgn = if t > PI { 1.0 } else { -1.0 };
    let display = half_sin / (nf * lam)
        * (nf * (3.0 * n as f64 + 1.0) * (2.0 * half_cos + c * sgn) - 6.0 * half_cos);
    let proof = 2.0 * half_sin / (nf * lam)
        * (nf * (3.0 * n as f64 - 2.0) * half_cos - nf * (3.0 * n as f64 + 1.0) * c / 2.0);
    Ok(DbCandidates { display, proof })
}

/// Sorted eigenvalue `lambda_k` of the zero-potential fiber at raw `b`.
fn lambda_at(n: usize, k: i64, t: f64, b: f64) -> f64 {
    let spec = RibbonSpec::with_raw_b(n, b, vec![0.0; 2 * n + 1]).unwrap();
    let vals = eig_tridiag(&build_fiber(&spec, t), false).values;
    vals[(k + n as i64) as usize]
}

/// Central finite difference with one Richardson extrapolation.
fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    let d1 = d(h);
    let d2 = d(0.5 * h);
    (4.0 * d2 - d1) / 3.0
}

/// Finite-difference `d lambda_k / d b` at `b = 0`.
pub fn fd_db_lambda(n: usize, k: i64, t: f64) -> f64 {
    richardson(|b| lambda_at(n, k, t, b), 0.0, 1e-4)
}

/// Adjudicate the two derivative candidates on `samples` points
/// `t in (0, pi)` (the domain where the closed-form eigenvectors are
/// single-branch). Passes when the comparison is internally consistent:
/// exactly one candidate family matches the oracle at every sample.
pub fn verify_db_formula(samples: usize, seed: u64) -> AsymptoticReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-5;
    let mut rows = Vec::with_capacity(samples);
    let mut display_hits = 0usize;
    let mut proof_hits = 0usize;
    for _ in 0..samples {
        let n = rng.gen_range(1..=4usize);
        let mut k = rng.gen_range(-(n as i64)..=n as i64);
        if k == 0 {
            k = 1;
        }
        let t = rng.gen_range(0.1..PI - 0.1);
        let cand = db_lambda_formula(n, k, t).unwrap();
        let fd = fd_db_lambda(n, k, t);
        let display_ok = (cand.display - fd).abs() <= tol;
        let proof_ok = (cand.proof - fd).abs() <= tol;
        display_hits += display_ok as usize;
        proof_hits += proof_ok as usize;
        rows.push(json!({
            "N": n, "k": k, "t": t,
            "fd": fd, "display": cand.display, "proof": cand.proof,
            "display_ok": display_ok, "proof_ok": proof_ok,
        }));
    }
    let winner = if proof_hits == samples && display_hits < samples {
        "proof"
    } else if display_hits == samples && proof_hits < samples {
        "display"
    } else if display_hits == samples && proof_hits == samples {
        "both"
    } else {
        "neither"
    };
    let consistent = winner == "proof" || winner == "display";
    let mean_fd = rows
        .iter()
        .map(|r| r["fd"].as_f64().unwrap())
        .sum::<f64>()
        / samples as f64;
    AsymptoticReport {
        formula_id: "I2".into(),
        params: json!({
            "samples": samples, "seed": seed, "tolerance": tol,
            "winner": winner,
            "display_matches": display_hits, "proof_matches": proof_hits,
            "rows": rows,
        }),
        predicted: Quantity::Scalar(mean_fd),
        numeric: Quantity::Scalar(mean_fd),
        residual: 0.0,
        order_claim: "pointwise derivative match to 1e-5".into(),
        passed: consistent,
    }
}

/// Inner band edge `mu_2^+(b) = min_t lambda_1(t, b, 0)` from refined
/// numeric band edges.
pub fn inner_edge_numeric(n: usize, b: f64, samples: usize) -> f64 {
    let spec = RibbonSpec::with_raw_b(n, b, vec![0.0; 2 * n + 1]).unwrap();
    let d = dispersion(&spec, samples).unwrap();
    band_edges(&d, true).band(1).unwrap().lo
}

/// Check the displayed inner-edge slope against the finite-difference
/// slope of the numeric band edge at `b = 0`.
///
/// Reports the central slope; the one-sided slopes land in `params`
/// (the numeric edge is an even function of `b`, so they differ in sign).
pub fn verify_edge_slope(n: usize, b_step: f64) -> AsymptoticReport {
    let predicted = -inner_edge_slope_coeff(n);
    let samples = 1024;
    let f0 = inner_edge_numeric(n, 0.0, samples);
    let fp = inner_edge_numeric(n, b_step, samples);
    let fm = inner_edge_numeric(n, -b_step, samples);
    let central = (fp - fm) / (2.0 * b_step);
    let right = (fp - f0) / b_step;
    let left = (f0 - fm) / b_step;
    let residual = (central - predicted).abs();
    AsymptoticReport {
        formula_id: "T3-2".into(),
        params: json!({
            "N": n, "b_step": b_step,
            "edge_at_0": f0, "edge_at_plus": fp, "edge_at_minus": fm,
            "one_sided_right": right, "one_sided_left": left,
        }),
        predicted: Quantity::Scalar(predicted),
        numeric: Quantity::Scalar(central),
        residual,
        order_claim: "O(b^2)".into(),
        passed: residual <= 5e-3,
    }
}

/// Ratio test for the first-order flat-band splitting: the defect
/// `lambda_0(t, b, eps v) - eps sum v_{2k+1} eta_k(t)` must shrink by
/// about 4 per halving of `eps`.
pub fn verify_flatband_order(trials: usize, seed: u64) -> AsymptoticReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let epsilons = [0.1, 0.05, 0.025];
    let mut ratios = Vec::new();
    let mut all_pass = true;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4usize);
        let p = 2 * n + 1;
        let t = rng.gen_range(0.0..TAU);
        // keep the perturbed middle curve well inside the gap: the inner
        // band edge shrinks with b, and eps * ||v|| must stay below it
        let b = rng.gen_range(0.0..0.1);
        let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.6..0.6)).collect();
        let defect = |eps: f64| -> f64 {
            let scaled: Vec<f64> = v.iter().map(|x| eps * x).collect();
            let spec = RibbonSpec::with_raw_b(n, b, scaled).unwrap();
            let exact = middle_eigenvalue(&spec, t);
            (exact - flatband_firstorder(&spec, t)).abs()
        };
        let d: Vec<f64> = epsilons.iter().map(|&e| defect(e)).collect();
        for w in d.windows(2) {
            // degenerate cases where the quadratic term vanishes pass trivially
            if w[1] < 1e-12 {
                ratios.push(f64::NAN);
                continue;
            }
            let r = w[0] / w[1];
            ratios.push(r);
            if !(2.0..=6.0).contains(&r) {
                all_pass = false;
            }
        }
    }
    let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
    let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    AsymptoticReport {
        formula_id: "T4-1".into(),
        params: json!({ "trials": trials, "seed": seed, "epsilons": epsilons, "ratios": ratios }),
        predicted: Quantity::Scalar(4.0),
        numeric: Quantity::Scalar(mean),
        residual: (mean - 4.0).abs(),
        order_claim: "O(||v||^2)".into(),
        passed: all_pass,
    }
}

/// Numeric band intervals at strong coupling, refined.
pub fn strongfield_numeric(
    n: usize,
    v: &[f64],
    tau: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let scaled: Vec<f64> = v.iter().map(|x| tau * x).collect();
    let spec = RibbonSpec::new(n, 0.0, scaled)?;
    let d = dispersion(&spec, samples)?;
    let bs = band_edges(&d, true);
    Ok(bs.bands.iter().map(|b| (b.lo, b.hi)).collect())
}

/// Compare predicted strong-field band widths (all bands except the
/// collapsed top one) with refined numerics, at 10% relative tolerance.
pub fn verify_strongfield_widths(n: usize, v: &[f64], tau: f64) -> Result<AsymptoticReport> {
    let p = 2 * n + 1;
    let predicted = strongfield_edges(n, v, tau)?;
    let numeric = strongfield_numeric(n, v, tau, 1024)?;
    let mut worst_rel = 0.0f64;
    let mut rows = Vec::new();
    for k in 0..p - 1 {
        let pw = predicted[k].1 - predicted[k].0;
        let nw = numeric[k].1 - numeric[k].0;
        let rel = (nw - pw).abs() / pw;
        worst_rel = worst_rel.max(rel);
        rows.push(json!({ "k": k + 1, "predicted_width": pw, "numeric_width": nw, "rel_err": rel }));
    }
    let last_pred = predicted[p - 1];
    let last_num = numeric[p - 1];
    Ok(AsymptoticReport {
        formula_id: "T5-1".into(),
        params: json!({
            "N": n, "tau": tau, "v": v, "bands": rows,
            "top_band_predicted": [last_pred.0, last_pred.1],
            "top_band_numeric": [last_num.0, last_num.1],
        }),
        predicted: Quantity::Scalar(0.0),
        numeric: Quantity::Scalar(worst_rel),
        residual: worst_rel,
        order_claim: "4/(tau |v_{k-(-1)^k} - v_k|) + O(tau^-2)".into(),
        passed: worst_rel <= 0.10,
    })
}

/// Width-decay ratio of the band whose first-order width collapses
/// (`j = N`, site `p`): `width(2 tau) / width(tau)`.
pub fn strongfield_top_decay(n: usize, v: &[f64], tau: f64) -> Result<f64> {
    let p = 2 * n + 1;
    let w1 = {
        let bands = strongfield_numeric(n, v, tau, 1024)?;
        bands[p - 1].1 - bands[p - 1].0
    };
    let w2 = {
        let bands = strongfield_numeric(n, v, 2.0 * tau, 1024)?;
        bands[p - 1].1 - bands[p - 1].0
    };
    Ok(w2 / w1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnetic_edges_zeroth_order() {
        for n in 1..=5usize {
            let edges = magnetic_edges_asym(n, 0.0);
            let bs = crate::bands::unperturbed_spectrum(n);
            let top = bs.band(n as i64).unwrap();
            let inner = bs.band(1).unwrap();
            assert!((edges.mu1_plus - top.hi).abs() < 1e-14);
            assert!((edges.mu2_plus - inner.lo).abs() < 1e-14);
            assert!((edges.mu1_minus + top.hi).abs() < 1e-14);
            assert!((edges.mu2_minus + inner.lo).abs() < 1e-14);
        }
    }

    #[test]
    fn magnetic_edge_slope_vanishes_at_n1() {
        // c_1 = 0 for N = 1
        assert!(inner_edge_slope_coeff(1).abs() < 1e-15);
        let e = magnetic_edges_asym(1, 0.05);
        assert!((e.mu2_plus - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slope_coefficient_value_n2() {
        // 3 c_1 sqrt(4 - c_1^2) / (2 (N+1) s_1) at N = 2 reduces to sqrt(5)/4
        assert!((inner_edge_slope_coeff(2) - 5f64.sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn weights_examples() {
        // t = pi, b = 0: odd couplings vanish, all weight on the first site
        let eta = flatband_weights(3, PI, 0.0);
        assert!((eta[0] - 1.0).abs() < 1e-30);
        for &w in &eta[1..] {
            assert!(w.abs() < 1e-30);
        }
        // N = 1, t = 0, b = 0: beta = (1, 2) -> (1/5, 4/5)
        let eta = flatband_weights(1, 0.0, 0.0);
        assert!((eta[0] - 0.2).abs() < 1e-14);
        assert!((eta[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn weights_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.gen_range(1..=10usize);
            let eta = flatband_weights(n, rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
            let total: f64 = eta.iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
            assert!(eta.iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn weights_match_fd_gradient_of_middle_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..16 {
            let n = rng.gen_range(1..=6usize);
            let p = 2 * n + 1;
            let t = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..TAU);
            let eta = flatband_weights(n, t, b);
            let h = 1e-6;
            for m in 0..=n {
                let mut vp = vec![0.0; p];
                vp[2 * m] = h;
                let plus =
                    middle_eigenvalue(&RibbonSpec::with_raw_b(n, b, vp.clone()).unwrap(), t);
                let vm: Vec<f64> = vp.iter().map(|x| -x).collect();
                let minus = middle_eigenvalue(&RibbonSpec::with_raw_b(n, b, vm).unwrap(), t);
                let grad = (plus - minus) / (2.0 * h);
                assert!((grad - eta[m]).abs() < 1e-6, "N={n} m={m}");
            }
        }
    }

    #[test]
    fn middle_eigenvalue_is_odd_in_the_potential() {
        // diag(-v) - offdiag = -(parity * (diag(v) + offdiag) * parity),
        // so the sorted middle eigenvalue flips sign with v.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = rng.gen_range(1..=4usize);
            let p = 2 * n + 1;
            let t = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..TAU);
            let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let plus = middle_eigenvalue(&RibbonSpec::with_raw_b(n, b, v).unwrap(), t);
            let minus = middle_eigenvalue(&RibbonSpec::with_raw_b(n, b, neg).unwrap(), t);
            assert!((plus + minus).abs() < 1e-11);
        }
    }

    #[test]
    fn flatband_defect_is_third_order() {
        // Consequence of the parity oddness: the first-order defect has no
        // quadratic term, so halving eps divides it by ~8.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..6 {
            let n = rng.gen_range(1..=4usize);
            let p = 2 * n + 1;
            let t = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..0.1);
            let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.6..0.6)).collect();
            let defect = |eps: f64| {
                let scaled: Vec<f64> = v.iter().map(|x| eps * x).collect();
                let spec = RibbonSpec::with_raw_b(n, b, scaled).unwrap();
                (middle_eigenvalue(&spec, t) - flatband_firstorder(&spec, t)).abs()
            };
            let d1 = defect(0.1);
            let d2 = defect(0.05);
            if d2 < 1e-13 {
                continue;
            }
            let ratio = d1 / d2;
            assert!((6.0..10.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn firstorder_constant_potential_is_exact() {
        let spec = RibbonSpec::new(2, 0.9, vec![0.3, 1.0, 0.3, -2.0, 0.3]).unwrap();
        for &t in &[0.3, 2.0, 4.4] {
            assert!((flatband_firstorder(&spec, t) - 0.3).abs() < 1e-13);
            assert!((middle_eigenvalue(&spec, t) - 0.3).abs() < 1e-11);
        }
    }

    #[test]
    fn firstorder_zero_potential() {
        let spec = RibbonSpec::new(1, 0.3, vec![0.0; 3]).unwrap();
        assert_eq!(flatband_firstorder(&spec, 1.0), 0.0);
    }

    #[test]
    fn strongfield_interval_shapes() {
        let v = [0.2, 0.4, 0.6, 0.8, 1.0];
        let tau = 50.0;
        let got = strongfield_edges(2, &v, tau).unwrap();
        // k = 1: xi^- = 0, xi^+ = 4/(v2 - v1)
        let w1 = got[0].1 - got[0].0;
        assert!((w1 - 4.0 / (tau * 0.2)).abs() < 1e-12);
        // top interval collapses at this order
        let w5 = got[4].1 - got[4].0;
        assert!(w5.abs() < 1e-12);
        assert!(strongfield_edges(2, &[1.0, 0.5, 0.6, 0.8, 0.9], tau).is_err());
    }

    #[test]
    fn strongfield_edge_accuracy() {
        // reference potential (1..5)/5; deviations are O(tau^-2), so the
        // 5e-3 check needs tau = 100 (at tau = 50 they reach ~1.6e-2)
        let v = [0.2, 0.4, 0.6, 0.8, 1.0];
        let predicted = strongfield_edges(2, &v, 100.0).unwrap();
        let numeric = strongfield_numeric(2, &v, 100.0, 2048).unwrap();
        for (p, n) in predicted.iter().zip(&numeric) {
            assert!((p.0 - n.0).abs() < 5e-3, "{} vs {}", p.0, n.0);
            assert!((p.1 - n.1).abs() < 5e-3, "{} vs {}", p.1, n.1);
        }
        let coarse_pred = strongfield_edges(2, &v, 50.0).unwrap();
        let coarse_num = strongfield_numeric(2, &v, 50.0, 2048).unwrap();
        for (p, n) in coarse_pred.iter().zip(&coarse_num) {
            assert!((p.0 - n.0).abs() < 2e-2);
            assert!((p.1 - n.1).abs() < 2e-2);
        }
    }

    #[test]
    fn db_candidates_antisymmetric_in_k() {
        for &(n, k, t) in &[(2usize, 1i64, 0.9f64), (3, 2, 2.2), (4, 3, 4.0)] {
            let plus = db_lambda_formula(n, k, t).unwrap();
            let minus = db_lambda_formula(n, -k, t).unwrap();
            assert!((plus.display + minus.display).abs() < 1e-12);
            assert!((plus.proof + minus.proof).abs() < 1e-12);
        }
    }

    #[test]
    fn db_rejects_excluded_points() {
        assert!(db_lambda_formula(2, 1, 0.0).is_err());
        assert!(db_lambda_formula(2, 1, PI).is_err());
        assert!(db_lambda_formula(2, 0, 1.0).is_err());
    }

    #[test]
    fn db_proof_candidate_matches_fd_on_first_branch() {
        // N = 1, k = 1, t = pi/2 plus a few more samples
        for &(n, k, t) in &[(1usize, 1i64, PI / 2.0), (2, 1, 0.8), (3, -2, 2.5)] {
            let cand = db_lambda_formula(n, k, t).unwrap();
            let fd = fd_db_lambda(n, k, t);
            assert!(
                (cand.proof - fd).abs() < 1e-5,
                "N={n} k={k} t={t}: proof {} vs fd {fd}",
                cand.proof
            );
        }
    }

    #[test]
    fn db_sign_structure_across_pi() {
        // One-sided slopes around t = pi: the c_k-proportional part of the
        // true derivative flips sign across pi while the rest vanishes,
        // so fd(pi + d) ~ -fd(pi - d).
        let n = 3;
        let k = 1i64;
        let d = 0.02;
        let left = fd_db_lambda(n, k, PI - d);
        let right = fd_db_lambda(n, k, PI + d);
        assert!(
            (left + right).abs() < 0.05 * left.abs().max(right.abs()).max(1e-6),
            "left {left}, right {right}"
        );
        // and the magnitude approaches (3N+1) c_k near pi (lambda -> 1)
        let c = cos_k(n, 1);
        let want = (3.0 * n as f64 + 1.0) * c;
        assert!((left.abs() - want).abs() < 0.2 * want.abs());
    }

    #[test]
    fn db_adjudication_is_consistent() {
        let report = verify_db_formula(8, 42);
        assert!(report.passed);
        assert_eq!(report.params["winner"], "proof");
    }

    #[test]
    fn quantity_residuals() {
        let a = Quantity::Interval([0.0, 1.0]);
        let b = Quantity::Interval([0.1, 0.8]);
        assert!((a.residual_to(&b) - 0.2).abs() < 1e-15);
        let s = Quantity::Scalar(0.5);
        assert!((s.residual_to(&Quantity::Scalar(0.75)) - 0.25).abs() < 1e-15);
    }
}
