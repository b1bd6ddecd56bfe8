//! The variational core: the energy functional
//!
//!   J_u(x) = Σ_{k=1}^{T+1} h(k-1)/p(k-1) · |Δx(k-1)|^{p(k-1)}
//!            - λ Σ_{k=1}^{T} F(k, x(k), u(k)),
//!
//! its gradient (assembled directly in strong form, so that the gradient
//! entry at node k IS the residual of the difference equation there), and
//! the sign-flipped dual functional.
//!
//! The weight index is h(k-1) throughout, matching the difference equation.

use crate::grid::{ExponentField, GridFunction, ParameterFunction, WeightField};
use crate::nonlinearity::{powq, Nonlinearity};
use crate::{Error, Result};

/// Full problem data: grid size, exponents, weights, λ, nonlinearity and the
/// parameter function.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    t: usize,
    p: ExponentField,
    h: WeightField,
    lambda: f64,
    f: Nonlinearity,
    u: ParameterFunction,
}

impl ProblemInstance {
    pub fn new(
        p: ExponentField,
        h: WeightField,
        lambda: f64,
        f: Nonlinearity,
        u: ParameterFunction,
    ) -> Result<Self> {
        let t = p.t();
        if h.t() != t || u.t() != t {
            return Err(Error::Shape(format!(
                "instance components disagree on T: p has {t}, h has {}, u has {}",
                h.t(),
                u.t()
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Invalid(format!("lambda = {lambda} must be positive")));
        }
        Ok(ProblemInstance { t, p, h, lambda, f, u })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> &ExponentField {
        &self.p
    }

    pub fn h(&self) -> &WeightField {
        &self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn f(&self) -> &Nonlinearity {
        &self.f
    }

    pub fn u(&self) -> &ParameterFunction {
        &self.u
    }

    /// Same instance with a different parameter function.
    pub fn with_parameter(&self, u: ParameterFunction) -> Result<Self> {
        Self::new(self.p.clone(), self.h.clone(), self.lambda, self.f.clone(), u)
    }

    /// Same instance with a different λ.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.p.clone(), self.h.clone(), lambda, self.f.clone(), self.u.clone())
    }

    fn check_dims(&self, x: &GridFunction) -> Result<()> {
        if x.interior_nodes() != self.t {
            return Err(Error::Shape(format!(
                "grid function has T = {}, instance has T = {}",
                x.interior_nodes(),
                self.t
            )));
        }
        Ok(())
    }

    /// J_u(x), split into its diffusion and potential parts.
    pub fn energy(&self, x: &GridFunction) -> Result<EnergyBreakdown> {
        self.check_dims(x)?;
        let dx = x.forward_difference();
        let mut diffusion = 0.0;
        for k in 1..=self.t + 1 {
            let pk = self.p.get(k - 1);
            diffusion += self.h.get(k - 1) / pk * dx[k - 1].abs().powf(pk);
        }
        let mut potential = 0.0;
        for k in 1..=self.t {
            potential += self.f.eval_big_f(k, x.values()[k], self.u.get(k))?;
        }
        Ok(EnergyBreakdown {
            diffusion,
            potential,
            total: diffusion - self.lambda * potential,
        })
    }

    /// ∂J_u/∂x(k) for k = 1..=T, assembled in strong form:
    ///
    ///   h(k-1)·powq(Δx(k-1), p(k-1)-1) - h(k)·powq(Δx(k), p(k)-1)
    ///   - λ·f(k, x(k), u(k)).
    ///
    /// This is simultaneously the residual of the difference equation at
    /// node k, so a vanishing gradient certifies a strong solution.
    pub fn gradient(&self, x: &GridFunction) -> Result<Vec<f64>> {
        self.check_dims(x)?;
        let v = x.values();
        let mut g = Vec::with_capacity(self.t);
        for k in 1..=self.t {
            let d_prev = v[k] - v[k - 1];
            let d_next = v[k + 1] - v[k];
            let entry = self.h.get(k - 1) * powq(d_prev, self.p.get(k - 1) - 1.0)
                - self.h.get(k) * powq(d_next, self.p.get(k) - 1.0)
                - self.lambda * self.f.eval_f(k, v[k], self.u.get(k))?;
            g.push(entry);
        }
        Ok(g)
    }

    /// Strong-form residual of the difference equation; identical to
    /// `gradient` by construction.
    pub fn strong_residual(&self, x: &GridFunction) -> Result<Vec<f64>> {
        self.gradient(x)
    }

    /// The dual functional J¹_u(x) = λ ΣF - Σ h(k-1)/p(k-1)|Δx(k-1)|^{p(k-1)},
    /// i.e. exactly -J_u(x) once the weight index is normalized to k-1.
    pub fn dual_energy(&self, x: &GridFunction) -> Result<f64> {
        let e = self.energy(x)?;
        Ok(self.lambda * e.potential - e.diffusion)
    }
}

/// J_u(x) split into parts: total = diffusion - λ·potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// Σ h(k-1)/p(k-1)·|Δx(k-1)|^{p(k-1)} >= 0.
    pub diffusion: f64,
    /// Σ F(k, x(k), u(k)).
    pub potential: f64,
    pub total: f64,
}

/// Max-norm of a residual/gradient vector.
pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
