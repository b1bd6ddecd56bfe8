//! Minimization of the strictly convex, coercive energy: gradient descent
//! with Barzilai-Borwein step proposals and Armijo backtracking, multistart
//! uniqueness evidence, an exact tridiagonal oracle for the linear case, and
//! a coercivity probe along rays.

use crate::energy::{max_norm, ProblemInstance};
use crate::grid::{h_dist, GridFunction};
use crate::lab::BoundCurve;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Iteration controls. The defaults are tuned for desk-scale T: tight
/// gradient tolerance, generous iteration budget.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Absolute tolerance on the max-norm of the gradient.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    /// Backtracking factor in (0, 1).
    pub backtrack: f64,
    /// Armijo constant in (0, 0.5).
    pub armijo: f64,
    pub seed: u64,
    /// Number of random multistart points (in addition to the zero start).
    pub n_starts: usize,
    /// h_norm radius of the multistart sampling ball.
    pub radius: f64,
    /// Retain the per-iteration (energy, gradient norm) trace.
    pub keep_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 100_000,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            seed: 0,
            n_starts: 10,
            radius: 10.0,
            keep_trace: false,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance {} must be positive", self.tol)));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Invalid(format!(
                "backtracking factor {} must lie in (0, 1)",
                self.backtrack
            )));
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(Error::Invalid(format!(
                "Armijo constant {} must lie in (0, 0.5)",
                self.armijo
            )));
        }
        Ok(())
    }
}

const BB_STEP_MIN: f64 = 1e-12;
const BB_STEP_MAX: f64 = 1e12;
/// Energy below this is treated as divergence, not slow convergence.
const DIVERGENCE_FLOOR: f64 = -1e12;
/// Iterate norm above this is treated as divergence.
const ITERATE_CEILING: f64 = 1e8;

/// Result of a single minimization run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub minimizer: GridFunction,
    pub final_energy: f64,
    pub final_gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Last accepted step length; near convergence the BB step is a crude
    /// inverse-curvature estimate, used by the uniqueness verdict radius.
    pub final_step: f64,
    /// Per-iteration (energy, gradient max-norm), when retained.
    pub trace: Option<Vec<(f64, f64)>>,
}

/// Minimizes J_u from `x0` by BB gradient descent with Armijo backtracking.
///
/// On convergence the minimizer's strong-form residual is below `opts.tol`
/// at every node (the gradient IS the residual). Energy is nonincreasing
/// along the trace. Unbounded descent is detected and reported as an
/// anti-coercivity error rather than looping.
pub fn minimize(
    inst: &ProblemInstance,
    x0: &GridFunction,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let mut x = x0.clone();
    let mut energy = inst.energy(&x)?.total;
    let mut grad = inst.gradient(&x)?;
    let mut trace = opts.keep_trace.then(Vec::new);
    let mut prev_sy: Option<(Vec<f64>, Vec<f64>)> = None; // (s, y)
    let mut final_step = opts.initial_step;

    for iter in 0..=opts.max_iter {
        let gnorm = max_norm(&grad);
        if let Some(tr) = trace.as_mut() {
            tr.push((energy, gnorm));
        }
        if gnorm <= opts.tol {
            return Ok(SolveReport {
                minimizer: x,
                final_energy: energy,
                final_gradient_norm: gnorm,
                iterations: iter,
                converged: true,
                final_step,
                trace,
            });
        }
        if iter == opts.max_iter {
            break;
        }

        // BB1 step from the previous pair, clamped.
        let mut step = match &prev_sy {
            Some((s, y)) => {
                let ss: f64 = s.iter().map(|v| v * v).sum();
                let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
                if sy > 0.0 {
                    (ss / sy).clamp(BB_STEP_MIN, BB_STEP_MAX)
                } else {
                    opts.initial_step / gnorm.max(1.0)
                }
            }
            None => opts.initial_step / gnorm.max(1.0),
        };

        // Armijo backtracking along -grad. The roundoff slack keeps the
        // acceptance test meaningful once the required decrease falls below
        // the ulp of the energy value.
        let g2: f64 = grad.iter().map(|v| v * v).sum();
        let slack = 4.0 * f64::EPSILON * (1.0 + energy.abs());
        let mut accepted = None;
        while step >= BB_STEP_MIN {
            let cand_int: Vec<f64> = x
                .interior()
                .iter()
                .zip(&grad)
                .map(|(v, g)| v - step * g)
                .collect();
            let cand = GridFunction::from_interior(&cand_int);
            let e_cand = inst.energy(&cand)?.total;
            if e_cand <= energy - opts.armijo * step * g2 + slack {
                accepted = Some((cand, e_cand));
                break;
            }
            step *= opts.backtrack;
        }
        let Some((x_new, e_new)) = accepted else {
            // line search stalled below the minimum step: report best iterate
            return Ok(SolveReport {
                minimizer: x,
                final_energy: energy,
                final_gradient_norm: gnorm,
                iterations: iter,
                converged: false,
                final_step,
                trace,
            });
        };

        if e_new < DIVERGENCE_FLOOR {
            return Err(Error::AntiCoercive(format!(
                "energy fell to {e_new:.3e} below the divergence floor {DIVERGENCE_FLOOR:.0e} \
                 after {iter} iterations; the instance is not coercive"
            )));
        }
        if x_new.h_norm() > ITERATE_CEILING {
            return Err(Error::AntiCoercive(format!(
                "iterate norm exceeded {ITERATE_CEILING:.0e} after {iter} iterations; \
                 the instance is not coercive"
            )));
        }

        let grad_new = inst.gradient(&x_new)?;
        let s: Vec<f64> = x_new
            .interior()
            .iter()
            .zip(x.interior())
            .map(|(a, b)| a - b)
            .collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        prev_sy = Some((s, y));
        final_step = step;
        x = x_new;
        energy = e_new;
        grad = grad_new;
    }

    let gnorm = max_norm(&grad);
    Ok(SolveReport {
        minimizer: x,
        final_energy: energy,
        final_gradient_norm: gnorm,
        iterations: opts.max_iter,
        converged: false,
        final_step,
        trace,
    })
}

/// Maximizes the dual functional J¹_u = -J_u: identical iteration machinery,
/// the report's energy field carries the dual value at the critical point.
pub fn maximize_dual(
    inst: &ProblemInstance,
    x0: &GridFunction,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let mut report = minimize(inst, x0, opts)?;
    report.final_energy = inst.dual_energy(&report.minimizer)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    /// All runs converged to one point, up to the tolerance-induced radius.
    UniqueConsistent,
    /// All runs converged but the minimizers are further apart than the radius.
    Inconsistent,
    /// Some member run failed to converge or detected divergence.
    Degraded,
}

impl std::fmt::Display for UniquenessVerdict {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            UniquenessVerdict::UniqueConsistent => "unique-consistent",
            UniquenessVerdict::Inconsistent => "inconsistent",
            UniquenessVerdict::Degraded => "degraded",
        };
        w.write_str(s)
    }
}

/// Multistart evidence for uniqueness of the minimizer.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub runs: Vec<SolveReport>,
    /// Error strings from runs that failed outright (anti-coercive, ...).
    pub failures: Vec<String>,
    pub max_pairwise_distance: f64,
    /// Verdict radius: 10 × tol × (inverse-curvature estimate).
    pub distance_threshold: f64,
    pub verdict: UniquenessVerdict,
}

/// Runs `minimize` from zero plus `opts.n_starts` random starts sampled in
/// the h_norm ball of radius `opts.radius`, and compares the minimizers.
///
/// Member failures degrade the verdict instead of propagating as errors.
pub fn multistart(inst: &ProblemInstance, opts: &SolverOptions) -> Result<UniquenessReport> {
    opts.validate()?;
    let t = inst.t();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![GridFunction::zeros(t)];
    for _ in 0..opts.n_starts {
        let raw: Vec<f64> = (0..t).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = GridFunction::from_interior(&raw);
        let norm = g.h_norm();
        let target = opts.radius * rng.gen::<f64>();
        if norm > 0.0 {
            starts.push(g.scale(target / norm));
        } else {
            starts.push(g);
        }
    }

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for s in &starts {
        match minimize(inst, s, opts) {
            Ok(r) => {
                if !r.converged {
                    failures.push(format!(
                        "run did not converge within {} iterations (gradient {:.3e})",
                        r.iterations, r.final_gradient_norm
                    ));
                }
                runs.push(r);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }

    let converged: Vec<&SolveReport> = runs.iter().filter(|r| r.converged).collect();
    let mut max_pairwise = 0.0_f64;
    for i in 0..converged.len() {
        for j in i + 1..converged.len() {
            max_pairwise =
                max_pairwise.max(h_dist(&converged[i].minimizer, &converged[j].minimizer)?);
        }
    }
    let step_max = converged
        .iter()
        .map(|r| r.final_step)
        .fold(0.0_f64, f64::max);
    let distance_threshold = (10.0 * opts.tol * step_max).max(10.0 * opts.tol);

    let verdict = if !failures.is_empty() {
        UniquenessVerdict::Degraded
    } else if max_pairwise <= distance_threshold {
        UniquenessVerdict::UniqueConsistent
    } else {
        UniquenessVerdict::Inconsistent
    };

    Ok(UniquenessReport {
        runs,
        failures,
        max_pairwise_distance: max_pairwise,
        distance_threshold,
        verdict,
    })
}

/// Exact solver for the linear case p ≡ 2 with x-independent f: Thomas
/// elimination of the tridiagonal system
///
///   (h(k-1)+h(k))·x(k) - h(k-1)·x(k-1) - h(k)·x(k+1) = λ·f(k, ·, u(k)).
pub fn tridiagonal_oracle(inst: &ProblemInstance) -> Result<GridFunction> {
    let t = inst.t();
    for k in 0..=t {
        if inst.p().get(k) != 2.0 {
            return Err(Error::Precondition(format!(
                "tridiagonal oracle needs p ≡ 2 on the consumed range, found p({k}) = {}",
                inst.p().get(k)
            )));
        }
    }
    if !inst.f().is_x_independent() {
        return Err(Error::Precondition(
            "tridiagonal oracle needs an x-independent nonlinearity (canonical family with a ≡ 0)"
                .into(),
        ));
    }

    let h = inst.h();
    let mut diag: Vec<f64> = (1..=t).map(|k| h.get(k - 1) + h.get(k)).collect();
    let mut rhs: Vec<f64> = (1..=t)
        .map(|k| Ok(inst.lambda() * inst.f().eval_f(k, 0.0, inst.u().get(k))?))
        .collect::<Result<_>>()?;

    // forward elimination, lower(k) = -h(k-1), upper(k) = -h(k)
    for k in 1..t {
        let lower = -h.get(k); // row k+1, couples to x(k)
        let upper = -h.get(k); // row k, couples to x(k+1)
        let m = lower / diag[k - 1];
        diag[k] -= m * upper;
        rhs[k] -= m * rhs[k - 1];
    }
    let mut x = vec![0.0; t];
    x[t - 1] = rhs[t - 1] / diag[t - 1];
    for k in (0..t - 1).rev() {
        let upper = -h.get(k + 1);
        x[k] = (rhs[k] - upper * x[k + 1]) / diag[k];
    }
    Ok(GridFunction::from_interior(&x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayTrend {
    Upward,
    Downward,
    Flat,
}

#[derive(Debug, Clone, Copy)]
pub struct RaySample {
    pub t: f64,
    /// h_norm of t·direction.
    pub r: f64,
    pub energy: f64,
    pub bound: f64,
}

/// Energy along a ray t·direction against the coercivity lower bound.
#[derive(Debug, Clone)]
pub struct RayProbe {
    pub samples: Vec<RaySample>,
    /// Whether the energy dominates the bound at every sample inside the
    /// bound's premises (h_norm >= 1 and sup_norm >= 1).
    pub dominates_bound: bool,
    pub trend: RayTrend,
}

/// Evaluates the energy along `t·direction` for t on a log grid up to
/// `t_max` and compares it with the lower-bound curve.
pub fn coercivity_ray_probe(
    inst: &ProblemInstance,
    bound: &BoundCurve,
    direction: &GridFunction,
    t_max: f64,
) -> Result<RayProbe> {
    if direction.h_norm() == 0.0 {
        return Err(Error::Precondition("ray direction must be nonzero".into()));
    }
    if !(t_max > 0.0) {
        return Err(Error::Invalid("t_max must be positive".into()));
    }
    let n = 41;
    let t_min = t_max * 1e-4;
    let mut samples = Vec::with_capacity(n);
    let mut dominates = true;
    for i in 0..n {
        let frac = i as f64 / (n - 1) as f64;
        let t = t_min * (t_max / t_min).powf(frac);
        let x = direction.scale(t);
        let r = x.h_norm();
        let energy = inst.energy(&x)?.total;
        let b = bound.eval(r);
        if r >= 1.0 && x.sup_norm() >= 1.0 && energy < b - 1e-9 * (1.0 + b.abs()) {
            dominates = false;
        }
        samples.push(RaySample { t, r, energy, bound: b });
    }
    let tail = &samples[samples.len() - 5..];
    let increasing = tail.windows(2).all(|w| w[1].energy >= w[0].energy);
    let decreasing = tail.windows(2).all(|w| w[1].energy <= w[0].energy);
    let trend = match (increasing, decreasing) {
        (true, false) => RayTrend::Upward,
        (false, true) => RayTrend::Downward,
        _ => RayTrend::Flat,
    };
    Ok(RayProbe {
        samples,
        dominates_bound: dominates,
        trend,
    })
}
