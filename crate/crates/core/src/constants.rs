//! Constructive values for every constant the analysis invokes: the discrete
//! embedding constants c_m, the coercivity pair (C1, C2), the norm-relation
//! coefficients and the λ-thresholds. Derivations are in `docs/constants.md`.

use crate::grid::{ExponentField, GridFunction, WeightField};
use crate::nonlinearity::GrowthData;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Provable embedding constant c_m = Σ_{k=1}^{T} k^{m-1}, valid for m >= 1:
///
///   Σ_{k=1}^{T} |x(k)|^m  <=  c_m · Σ_{k=1}^{T+1} |Δx(k-1)|^m.
///
/// From |x(k)| <= Σ_{j<=k} |Δx(j-1)| and Hölder with exponent m, each
/// |x(k)|^m <= k^{m-1} Σ |Δx|^m; summing over k gives the constant.
pub fn embedding_constant(m: f64, t: usize) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::Invalid(format!("embedding constant needs m >= 1, got {m}")));
    }
    if t == 0 {
        return Err(Error::Invalid("T must be positive".into()));
    }
    Ok((1..=t).map(|k| (k as f64).powf(m - 1.0)).sum())
}

/// Numerically sharpened embedding constant: the largest observed value of
/// Σ|x(k)|^m / Σ|Δx(k-1)|^m over nonzero x, found by multistart projected
/// gradient ascent on the ratio. Always <= `embedding_constant(m, t)`.
///
/// For m = 2 the exact value is 1 / (4 sin²(π / (2(T+1)))), the reciprocal of
/// the smallest Dirichlet eigenvalue of the discrete Laplacian; the test
/// suite uses that formula as an independent oracle.
pub fn sharp_embedding_constant(m: f64, t: usize) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::Invalid(format!("sharp embedding constant needs m >= 1, got {m}")));
    }
    if t == 0 || t > 200 {
        return Err(Error::Precondition(format!(
            "sharp_embedding_constant is optimization-based and limited to 1 <= T <= 200, got {t}"
        )));
    }
    let ratio = |x: &[f64]| -> (f64, f64, f64) {
        // returns (N, D, ratio)
        let n: f64 = x.iter().map(|v| v.abs().powf(m)).sum();
        let mut d = 0.0;
        let mut prev = 0.0;
        for &v in x {
            d += (v - prev).abs().powf(m);
            prev = v;
        }
        d += prev.abs().powf(m);
        (n, d, n / d)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let n_starts = 12;
    let max_iter = 20_000;
    let mut best = 0.0_f64;

    for _ in 0..n_starts {
        let mut x: Vec<f64> = (0..t).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if sup == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= sup);

        let mut step = 1.0;
        let (_, _, mut r) = ratio(&x);
        for _ in 0..max_iter {
            // gradient of N/D
            let (n_val, d_val, _) = ratio(&x);
            let mut grad = vec![0.0; t];
            let mut diffs = Vec::with_capacity(t + 1);
            let mut prev = 0.0;
            for &v in &x {
                diffs.push(v - prev);
                prev = v;
            }
            diffs.push(-prev);
            for i in 0..t {
                let gn = m * crate::nonlinearity::powq(x[i], m - 1.0);
                let gd = m * (crate::nonlinearity::powq(diffs[i], m - 1.0)
                    - crate::nonlinearity::powq(diffs[i + 1], m - 1.0));
                grad[i] = (gn - (n_val / d_val) * gd) / d_val;
            }
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2.sqrt() < 1e-14 * (1.0 + r) {
                break;
            }
            // backtracking ascent
            let mut t_step = step * 2.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v + t_step * g).collect();
                let (_, _, rc) = ratio(&cand);
                if rc.is_finite() && rc > r + 1e-4 * t_step * gnorm2 {
                    let sup = cand.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                    x = cand.iter().map(|v| v / sup).collect();
                    r = rc;
                    step = t_step;
                    accepted = true;
                    break;
                }
                t_step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        best = best.max(r);
    }

    Ok(best)
}

/// Constructive coercivity pair (C1, C2) for
///
///   Σ |Δx(k-1)|^{p(k-1)}  >=  C1·||x||^{p⁻} - C2   whenever ||x|| >= 1.
///
/// For p⁻ >= 2: split off the indices with |Δx| < 1 (losing at most T+1) and
/// apply the left norm relation with m = p⁻, giving C1 = (T+1)^{(2-p⁻)/2}.
/// For 1 < p⁻ < 2: the ℓ^{p⁻} norm dominates the ℓ² norm, giving C1 = 1.
/// C2 = T+1 in both branches.
pub fn coercivity_constants(p: &ExponentField) -> (f64, f64) {
    let t = p.t();
    let p_minus = p.p_minus();
    let c2 = (t + 1) as f64;
    let c1 = if p_minus >= 2.0 {
        ((t + 1) as f64).powf((2.0 - p_minus) / 2.0)
    } else {
        1.0
    };
    (c1, c2)
}

/// The double norm relation for m >= 2:
///
///   (T+1)^{(2-m)/(2m)} ||x||  <=  (Σ|Δx|^m)^{1/m}  <=  (T+1)^{1/m} ||x||.
///
/// Returns (lhs, mid, rhs).
pub fn norm_relation_check(m: f64, x: &GridFunction) -> Result<(f64, f64, f64)> {
    if !(m >= 2.0) {
        return Err(Error::Invalid(format!("norm relation needs m >= 2, got {m}")));
    }
    let t1 = (x.interior_nodes() + 1) as f64;
    let norm = x.h_norm();
    let mid = x
        .forward_difference()
        .iter()
        .map(|d| d.abs().powf(m))
        .sum::<f64>()
        .powf(1.0 / m);
    let lhs = t1.powf((2.0 - m) / (2.0 * m)) * norm;
    let rhs = t1.powf(1.0 / m) * norm;
    Ok((lhs, mid, rhs))
}

/// λ-threshold of the borderline regime,
/// λ* = C1·h⁻·(q⁻+1) / (p⁺·a⁺·c_{q⁺+1}), and its dual counterpart
/// (T+1)^{(1-p⁻)/(2p⁻)}·h⁻·(q⁻+1) / (p⁺·a⁺·c_{q⁺+1}).
///
/// Uses the provable (larger) c_{q⁺+1}, so the threshold stays on the safe
/// side. Returns +∞ for both when a⁺ = 0: no superlinear growth, no
/// constraint.
pub fn lambda_threshold(
    p: &ExponentField,
    h: &WeightField,
    g: &GrowthData,
) -> Result<(f64, f64)> {
    let a_plus = g.a_plus();
    if a_plus == 0.0 {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let t = p.t();
    let (c1, _) = coercivity_constants(p);
    let c_emb = embedding_constant(g.q_plus() + 1.0, t)?;
    let common = h.h_minus() * (g.q_minus() + 1.0) / (p.p_plus() * a_plus * c_emb);
    let primal = c1 * common;
    let t1 = (t + 1) as f64;
    let p_minus = p.p_minus();
    let dual = t1.powf((1.0 - p_minus) / (2.0 * p_minus)) * common;
    Ok((primal, dual))
}

/// All constants for one instance, with a provenance note per value.
#[derive(Debug, Clone)]
pub struct ConstantsBundle {
    pub t: usize,
    /// Coercivity pair of the lower bound Σ|Δx|^{p(k-1)} >= C1||x||^{p⁻} - C2.
    pub c1: f64,
    pub c2: f64,
    /// Provable c_1 = T (used by the linear term of the energy bound).
    pub c_emb_1: f64,
    /// Provable c_{q⁺+1}.
    pub c_emb_growth: f64,
    /// Numerically sharpened c_{q⁺+1}, when requested.
    pub c_emb_growth_sharp: Option<f64>,
    /// Borderline threshold λ*; +∞ when a⁺ = 0.
    pub lambda_star: f64,
    /// Dual-side threshold.
    pub dual_lambda_star: f64,
    pub notes: Vec<String>,
}

impl ConstantsBundle {
    pub fn compute(p: &ExponentField, h: &WeightField, g: &GrowthData) -> Result<Self> {
        let t = p.t();
        if h.t() != t || g.t() != t {
            return Err(Error::Shape(
                "constants bundle needs p, h, growth data on the same grid".into(),
            ));
        }
        let (c1, c2) = coercivity_constants(p);
        let c_emb_1 = embedding_constant(1.0, t)?;
        let c_emb_growth = embedding_constant(g.q_plus() + 1.0, t)?;
        let (lambda_star, dual_lambda_star) = lambda_threshold(p, h, g)?;
        let notes = vec![
            format!(
                "C1 = {c1:.6e}, C2 = {c2:.6e}: constructive coercivity pair ({} branch)",
                if p.p_minus() >= 2.0 { "p- >= 2" } else { "1 < p- < 2" }
            ),
            format!("c_1 = {c_emb_1} (= T), c_(q+ + 1) = {c_emb_growth:.6e} (sum of k^(m-1))"),
            format!("lambda* = {lambda_star:.6e} using the provable c_(q+ + 1)"),
            format!("dual threshold = {dual_lambda_star:.6e}"),
        ];
        Ok(ConstantsBundle {
            t,
            c1,
            c2,
            c_emb_1,
            c_emb_growth,
            c_emb_growth_sharp: None,
            lambda_star,
            dual_lambda_star,
            notes,
        })
    }

    /// Like `compute`, but also runs the numerical sharpening of c_{q⁺+1}
    /// (does not change λ*, which stays on the provable constant).
    pub fn compute_with_sharp(
        p: &ExponentField,
        h: &WeightField,
        g: &GrowthData,
    ) -> Result<Self> {
        let mut bundle = Self::compute(p, h, g)?;
        bundle.c_emb_growth_sharp = Some(sharp_embedding_constant(g.q_plus() + 1.0, p.t())?);
        Ok(bundle)
    }

    /// λ* recomputed with the sharpened (smaller) embedding constant: a less
    /// conservative threshold. Falls back to the provable value when no
    /// sharpened constant is stored.
    pub fn lambda_star_sharp(&self) -> f64 {
        match self.c_emb_growth_sharp {
            Some(sharp) if sharp > 0.0 => self.lambda_star * self.c_emb_growth / sharp,
            _ => self.lambda_star,
        }
    }
}
