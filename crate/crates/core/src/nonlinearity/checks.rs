//! Sampling-based verification of the hypotheses on f (growth bound,
//! monotonicity in x, nontriviality at x = 0) and classification of the
//! exponent regime relative to the coercivity thresholds.

use super::{GrowthData, Nonlinearity};
use crate::constants::ConstantsBundle;
use crate::grid::ExponentField;
use crate::Result;

/// Dense sampling plan for the hypothesis checkers.
///
/// f is user-supplied and opaque, so the checks sample rather than reason
/// symbolically; results are reported as such.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub u_min: f64,
    pub u_max: f64,
    pub u_count: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            x_min: -10.0,
            x_max: 10.0,
            x_count: 201,
            u_min: -5.0,
            u_max: 5.0,
            u_count: 11,
        }
    }
}

impl SamplingPlan {
    fn x_samples(&self) -> Vec<f64> {
        grid_1d(self.x_min, self.x_max, self.x_count)
    }

    fn u_samples(&self) -> Vec<f64> {
        grid_1d(self.u_min, self.u_max, self.u_count)
    }
}

fn grid_1d(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// A sampled point where |f| exceeds the declared growth bound.
#[derive(Debug, Clone)]
pub struct GrowthViolation {
    pub k: usize,
    pub x: f64,
    pub u: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks |f(k,x,u)| <= a(k)|x|^{q(k)} + b(k) on the sampling plan.
pub fn check_h1(
    n: &Nonlinearity,
    g: &GrowthData,
    plan: &SamplingPlan,
) -> Result<Vec<GrowthViolation>> {
    let mut violations = Vec::new();
    let xs = plan.x_samples();
    let us = plan.u_samples();
    for k in 1..=g.t() {
        for &u in &us {
            for &x in &xs {
                let lhs = n.eval_f(k, x, u)?.abs();
                let rhs = g.a(k) * x.abs().powf(g.q(k)) + g.b(k);
                if lhs > rhs + 1e-12 * (1.0 + rhs.abs()) {
                    violations.push(GrowthViolation { k, x, u, lhs, rhs });
                }
            }
        }
    }
    Ok(violations)
}

/// An adjacent sample pair where f increases in x.
#[derive(Debug, Clone)]
pub struct MonotonicityViolation {
    pub k: usize,
    pub u: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Checks that x -> f(k,x,u) is nonincreasing on the sampled grid
/// (1e-12 slack for roundoff). This is both H2 and the dual-side H4.
pub fn check_h2(
    n: &Nonlinearity,
    t: usize,
    plan: &SamplingPlan,
) -> Result<Vec<MonotonicityViolation>> {
    let mut violations = Vec::new();
    let xs = plan.x_samples();
    let us = plan.u_samples();
    for k in 1..=t {
        for &u in &us {
            let mut prev: Option<(f64, f64)> = None;
            for &x in &xs {
                let fx = n.eval_f(k, x, u)?;
                if let Some((x_lo, f_lo)) = prev {
                    let scale = 1.0 + f_lo.abs().max(fx.abs());
                    if fx > f_lo + 1e-12 * scale {
                        violations.push(MonotonicityViolation {
                            k,
                            u,
                            x_lo,
                            x_hi: x,
                            f_lo,
                            f_hi: fx,
                        });
                    }
                }
                prev = Some((x, fx));
            }
        }
    }
    Ok(violations)
}

/// Outcome of the nontriviality check: some node k must have f(k,0,u) != 0
/// for every sampled u.
#[derive(Debug, Clone)]
pub struct H3Report {
    pub holds: bool,
    /// Smallest witnessing node when the check passes.
    pub witness_k: Option<usize>,
    /// A (k, u) pair with f(k,0,u) = 0 for the first examined node, when it fails.
    pub failure: Option<(usize, f64)>,
}

pub fn check_h3(n: &Nonlinearity, t: usize, u_samples: &[f64]) -> Result<H3Report> {
    assert!(!u_samples.is_empty(), "H3 needs at least one u sample");
    let mut first_failure = None;
    for k in 1..=t {
        let mut ok = true;
        for &u in u_samples {
            if n.eval_f(k, 0.0, u)? == 0.0 {
                if first_failure.is_none() {
                    first_failure = Some((k, u));
                }
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(H3Report {
                holds: true,
                witness_k: Some(k),
                failure: None,
            });
        }
    }
    Ok(H3Report {
        holds: false,
        witness_k: None,
        failure: first_failure,
    })
}

/// Primal regime of the coercivity dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalRegime {
    /// p⁻ > q⁺ + 1: coercive for every λ > 0.
    StrictlyCoercive,
    /// p⁻ = q⁺ + 1 with λ below the threshold λ*.
    BorderlineAdmissible,
    /// p⁻ = q⁺ + 1 with λ at or above λ*.
    BorderlineInadmissible,
    /// p⁻ < q⁺ + 1: outside the primal theory.
    NotCovered,
}

/// Dual regime (concave side), driven by q⁻ + 1 against p⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualRegime {
    /// q⁻ + 1 > p⁺: anti-coercive for every λ > 0.
    StrictlyAntiCoercive,
    /// q⁻ + 1 = p⁺ with λ above the dual threshold.
    BorderlineAdmissible,
    /// q⁻ + 1 = p⁺ with λ at or below the dual threshold.
    BorderlineInadmissible,
    NotCovered,
}

impl std::fmt::Display for PrimalRegime {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PrimalRegime::StrictlyCoercive => "strictly-coercive",
            PrimalRegime::BorderlineAdmissible => "borderline-admissible",
            PrimalRegime::BorderlineInadmissible => "borderline-inadmissible",
            PrimalRegime::NotCovered => "not-covered",
        };
        w.write_str(s)
    }
}

impl std::fmt::Display for DualRegime {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DualRegime::StrictlyAntiCoercive => "dual-strict",
            DualRegime::BorderlineAdmissible => "dual-borderline-admissible",
            DualRegime::BorderlineInadmissible => "dual-borderline-inadmissible",
            DualRegime::NotCovered => "dual-not-covered",
        };
        w.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeReport {
    pub primal: PrimalRegime,
    pub dual: DualRegime,
}

impl RegimeReport {
    /// Whether the primal minimization theory covers the instance.
    pub fn primal_covered(&self) -> bool {
        matches!(
            self.primal,
            PrimalRegime::StrictlyCoercive | PrimalRegime::BorderlineAdmissible
        )
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Classifies the exponent regime of an instance against the thresholds in
/// the constants bundle (which must have been computed for the same data).
pub fn classify_regime(
    p: &ExponentField,
    g: &GrowthData,
    lambda: f64,
    bundle: &ConstantsBundle,
) -> RegimeReport {
    let p_minus = p.p_minus();
    let p_plus = p.p_plus();
    let q_plus_1 = g.q_plus() + 1.0;
    let q_minus_1 = g.q_minus() + 1.0;

    let primal = if nearly_equal(p_minus, q_plus_1) {
        if lambda < bundle.lambda_star {
            PrimalRegime::BorderlineAdmissible
        } else {
            PrimalRegime::BorderlineInadmissible
        }
    } else if p_minus > q_plus_1 {
        PrimalRegime::StrictlyCoercive
    } else {
        PrimalRegime::NotCovered
    };

    let dual = if nearly_equal(q_minus_1, p_plus) {
        if lambda > bundle.dual_lambda_star {
            DualRegime::BorderlineAdmissible
        } else {
            DualRegime::BorderlineInadmissible
        }
    } else if q_minus_1 > p_plus {
        DualRegime::StrictlyAntiCoercive
    } else {
        DualRegime::NotCovered
    };

    RegimeReport { primal, dual }
}
