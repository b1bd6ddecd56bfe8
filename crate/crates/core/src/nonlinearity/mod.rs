//! Nonlinear terms f(k, x, u) with primitives F(k, x, u) = ∫_0^x f(k, t, u) dt,
//! a canonical family satisfying the growth and monotonicity hypotheses by
//! construction, and an expression-based variant for user-supplied f.

mod checks;
pub mod expr;

pub use checks::{
    check_h1, check_h2, check_h3, classify_regime, DualRegime, GrowthViolation, H3Report,
    MonotonicityViolation, PrimalRegime, RegimeReport, SamplingPlan,
};
pub use expr::{parse_expression, Expr};

use crate::{Error, Result};

/// Signed power powq(t, q) = |t|^{q-1}·t with powq(0, q) = 0.
///
/// Odd in t; for q = p-1 this is the derivative kernel |t|^{p-2}t of the
/// p-Laplacian.
pub fn powq(t: f64, q: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(q - 1.0) * t
    }
}

/// Growth data (a, b, q) for the bound |f(k,x,u)| <= a(k)|x|^{q(k)} + b(k).
///
/// Sequences are indexed k = 1..=T. Exponents q(k) >= 1 are accepted: the
/// embedding constants extend to m >= 1 and the borderline examples (q = 1
/// against p = 2) need the endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthData {
    a: Vec<f64>,
    b: Vec<f64>,
    q: Vec<f64>,
}

impl GrowthData {
    pub fn new(a: Vec<f64>, b: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let t = a.len();
        if t == 0 || b.len() != t || q.len() != t {
            return Err(Error::Shape(format!(
                "growth sequences must share length T >= 1, got a: {}, b: {}, q: {}",
                a.len(),
                b.len(),
                q.len()
            )));
        }
        for (k, v) in a.iter().enumerate() {
            if !(*v >= 0.0) {
                return Err(Error::Invalid(format!("a({}) = {v} must be >= 0", k + 1)));
            }
        }
        for (k, v) in q.iter().enumerate() {
            if !(*v >= 1.0) {
                return Err(Error::Invalid(format!("q({}) = {v} must be >= 1", k + 1)));
            }
        }
        Ok(GrowthData { a, b, q })
    }

    pub fn uniform(t: usize, a: f64, b: f64, q: f64) -> Result<Self> {
        Self::new(vec![a; t], vec![b; t], vec![q; t])
    }

    pub fn t(&self) -> usize {
        self.a.len()
    }

    /// a(k), k in 1..=T.
    pub fn a(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    pub fn b(&self, k: usize) -> f64 {
        self.b[k - 1]
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q[k - 1]
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q
    }

    /// a⁺ = max a(k).
    pub fn a_plus(&self) -> f64 {
        self.a.iter().cloned().fold(0.0, f64::max)
    }

    /// b⁺ = max |b(k)|.
    pub fn b_plus(&self) -> f64 {
        self.b.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn q_minus(&self) -> f64 {
        self.q.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn q_plus(&self) -> f64 {
        self.q.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// f(k,x,u) = -a(k)·powq(x, q(k)) + b(k)·(1 + ρ·sin u), ρ in [0, 1).
///
/// Satisfies the growth bound with (a, |b|(1+ρ), q), is nonincreasing in x
/// (a >= 0), and vanishes nowhere at x = 0 as long as some b(k) != 0, since
/// 1 + ρ·sin u > 0. The primitive is closed-form.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFamily {
    growth: GrowthData,
    rho: f64,
}

impl CanonicalFamily {
    pub fn new(growth: GrowthData, rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Invalid(format!("rho = {rho} must lie in [0, 1)")));
        }
        Ok(CanonicalFamily { growth, rho })
    }

    pub fn growth(&self) -> &GrowthData {
        &self.growth
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Growth data under which the bound provably holds: b replaced by
    /// |b|·(1+ρ).
    pub fn effective_growth(&self) -> GrowthData {
        let g = &self.growth;
        GrowthData::new(
            g.a.clone(),
            g.b.iter().map(|b| b.abs() * (1.0 + self.rho)).collect(),
            g.q.clone(),
        )
        .expect("derived growth data is valid")
    }

    pub fn f(&self, k: usize, x: f64, u: f64) -> f64 {
        let g = &self.growth;
        -g.a(k) * powq(x, g.q(k)) + g.b(k) * (1.0 + self.rho * u.sin())
    }

    pub fn big_f(&self, k: usize, x: f64, u: f64) -> f64 {
        let g = &self.growth;
        let q1 = g.q(k) + 1.0;
        -g.a(k) * x.abs().powf(q1) / q1 + g.b(k) * (1.0 + self.rho * u.sin()) * x
    }

    /// Whether f is independent of x (pure forcing term).
    pub fn is_linear_forcing(&self) -> bool {
        self.growth.a.iter().all(|&a| a == 0.0)
    }
}

/// A nonlinearity defined by expression source text, with optional explicit
/// primitive and optional declared growth data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionNonlinearity {
    f_src: String,
    f_expr: Expr,
    big_f_src: Option<String>,
    big_f_expr: Option<Expr>,
    growth: Option<GrowthData>,
}

/// Absolute tolerance for the adaptive Simpson primitive.
pub const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_MAX_DEPTH: u32 = 40;

impl ExpressionNonlinearity {
    pub fn new(f_src: &str, big_f_src: Option<&str>, growth: Option<GrowthData>) -> Result<Self> {
        let f_expr = parse_expression(f_src)?;
        let big_f_expr = big_f_src.map(parse_expression).transpose()?;
        Ok(ExpressionNonlinearity {
            f_src: f_src.to_string(),
            f_expr,
            big_f_src: big_f_src.map(str::to_string),
            big_f_expr,
            growth,
        })
    }

    pub fn f_source(&self) -> &str {
        &self.f_src
    }

    pub fn big_f_source(&self) -> Option<&str> {
        self.big_f_src.as_deref()
    }

    pub fn growth(&self) -> Option<&GrowthData> {
        self.growth.as_ref()
    }

    pub fn f(&self, k: usize, x: f64, u: f64) -> Result<f64> {
        self.f_expr.eval(k as f64, x, u)
    }

    /// F(k, x, u), anchored so that F(k, 0, u) = 0. Uses the explicit
    /// primitive when one was supplied (shifted by its value at 0),
    /// otherwise adaptive Simpson quadrature of f over [0, x].
    pub fn big_f(&self, k: usize, x: f64, u: f64) -> Result<f64> {
        if let Some(expr) = &self.big_f_expr {
            let at_x = expr.eval(k as f64, x, u)?;
            let at_0 = expr.eval(k as f64, 0.0, u)?;
            return Ok(at_x - at_0);
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64| self.f_expr.eval(k as f64, t, u);
        adaptive_simpson(&f, 0.0, x, QUADRATURE_TOL, QUADRATURE_MAX_DEPTH)
    }
}

/// Adaptive Simpson quadrature of `f` over [a, b] (either orientation).
fn adaptive_simpson(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || (b - a).abs() < 1e-14 {
            return Ok(left + right + err);
        }
        if depth == 0 {
            return Err(Error::Quadrature {
                tol,
                err: err.abs(),
            });
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a)?;
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// An evaluable nonlinearity: f(k, x, u) together with its primitive.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    Canonical(CanonicalFamily),
    Expression(ExpressionNonlinearity),
}

impl Nonlinearity {
    /// Constant forcing f = c (canonical family with a = 0, b = c, ρ = 0).
    pub fn constant(t: usize, c: f64) -> Self {
        let growth = GrowthData::uniform(t, 0.0, c, 1.0).expect("valid growth");
        Nonlinearity::Canonical(CanonicalFamily::new(growth, 0.0).expect("valid family"))
    }

    pub fn eval_f(&self, k: usize, x: f64, u: f64) -> Result<f64> {
        match self {
            Nonlinearity::Canonical(c) => Ok(c.f(k, x, u)),
            Nonlinearity::Expression(e) => e.f(k, x, u),
        }
    }

    /// F(k, x, u) = ∫_0^x f(k, t, u) dt.
    pub fn eval_big_f(&self, k: usize, x: f64, u: f64) -> Result<f64> {
        match self {
            Nonlinearity::Canonical(c) => Ok(c.big_f(k, x, u)),
            Nonlinearity::Expression(e) => e.big_f(k, x, u),
        }
    }

    /// Declared growth data, if any.
    pub fn growth(&self) -> Option<GrowthData> {
        match self {
            Nonlinearity::Canonical(c) => Some(c.effective_growth()),
            Nonlinearity::Expression(e) => e.growth().cloned(),
        }
    }

    /// True when f provably does not depend on x (canonical family with
    /// a = 0); the tridiagonal oracle requires this.
    pub fn is_x_independent(&self) -> bool {
        match self {
            Nonlinearity::Canonical(c) => c.is_linear_forcing(),
            Nonlinearity::Expression(_) => false,
        }
    }
}
