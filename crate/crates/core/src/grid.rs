//! Grid functions on the discrete interval Z[0,T+1] with zero Dirichlet
//! boundary, forward differences, the two norms used throughout, and the
//! summation-by-parts identity that turns weak solutions into strong ones.

use crate::{Error, Result};

/// A real-valued function on Z[0,T+1] with x(0) = x(T+1) = 0.
///
/// Stores the full range 0..=T+1; the two boundary entries are exactly zero
/// and every constructor enforces this.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// The zero function with `t` interior nodes.
    pub fn zeros(t: usize) -> Self {
        assert!(t >= 1, "grid needs at least one interior node");
        GridFunction {
            values: vec![0.0; t + 2],
        }
    }

    /// Builds from the full value range 0..=T+1, rejecting nonzero boundary.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Shape(format!(
                "grid function needs at least 3 values (T >= 1), got {}",
                values.len()
            )));
        }
        let last = values.len() - 1;
        if values[0] != 0.0 || values[last] != 0.0 {
            return Err(Error::Invalid(format!(
                "Dirichlet condition violated: values[0] = {}, values[T+1] = {}",
                values[0], values[last]
            )));
        }
        Ok(GridFunction { values })
    }

    /// Builds from interior values x(1..=T); boundary entries are set to zero.
    pub fn from_interior(interior: &[f64]) -> Self {
        assert!(!interior.is_empty());
        let mut values = Vec::with_capacity(interior.len() + 2);
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        GridFunction { values }
    }

    /// Number of interior nodes T.
    pub fn interior_nodes(&self) -> usize {
        self.values.len() - 2
    }

    /// Full value range, indices 0..=T+1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interior values x(1..=T).
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    /// Forward differences Δx(k-1) = x(k) - x(k-1) for k = 1..=T+1.
    pub fn forward_difference(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The norm ||x|| = (Σ_{k=1}^{T+1} |Δx(k-1)|²)^{1/2} of the space H.
    pub fn h_norm(&self) -> f64 {
        self.forward_difference()
            .iter()
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
    }

    /// ||x||_C = max_{k in Z[1,T]} |x(k)|.
    pub fn sup_norm(&self) -> f64 {
        self.interior().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// x + s·y, elementwise; boundary stays zero.
    pub fn axpy(&self, s: f64, y: &GridFunction) -> Result<GridFunction> {
        if self.values.len() != y.values.len() {
            return Err(Error::Shape(format!(
                "grid size mismatch: {} vs {}",
                self.interior_nodes(),
                y.interior_nodes()
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&y.values)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(GridFunction { values })
    }

    /// s·x.
    pub fn scale(&self, s: f64) -> GridFunction {
        GridFunction {
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }
}

/// ||x - y|| in the h_norm.
pub fn h_dist(x: &GridFunction, y: &GridFunction) -> Result<f64> {
    Ok(x.axpy(-1.0, y)?.h_norm())
}

/// Σ_{k=1}^{T+1} a(k-1)Δy(k-1) + Σ_{k=1}^{T} (a(k)-a(k-1)) y(k).
///
/// Identically zero (up to roundoff) for every `a` of length T+1 and every
/// `y` with zero boundary; this is the identity behind the weak=strong
/// equivalence of the discrete problem.
pub fn summation_by_parts_defect(a: &[f64], y: &GridFunction) -> Result<f64> {
    let t = y.interior_nodes();
    if a.len() != t + 1 {
        return Err(Error::Shape(format!(
            "summation-by-parts coefficient length {} != T+1 = {}",
            a.len(),
            t + 1
        )));
    }
    let dy = y.forward_difference();
    let lhs: f64 = (0..=t).map(|i| a[i] * dy[i]).sum();
    let corr: f64 = (1..=t).map(|k| (a[k] - a[k - 1]) * y.values()[k]).sum();
    Ok(lhs + corr)
}

fn validated_field(t: usize, raw: Vec<f64>, name: &str, check: impl Fn(f64) -> bool, cond: &str) -> Result<Vec<f64>> {
    if raw.len() != t + 2 {
        return Err(Error::Shape(format!(
            "{name} must have length T+2 = {}, got {}",
            t + 2,
            raw.len()
        )));
    }
    for (k, v) in raw.iter().enumerate() {
        if !check(*v) || !v.is_finite() {
            return Err(Error::Invalid(format!("{name}({k}) = {v} violates {cond}")));
        }
    }
    Ok(raw)
}

/// The variable exponent p: Z[0,T+1] → (1, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    t: usize,
    p: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentField {
    pub fn new(t: usize, p: Vec<f64>) -> Result<Self> {
        let p = validated_field(t, p, "p", |v| v > 1.0, "p > 1")?;
        let p_minus = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let p_plus = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(ExponentField { t, p, p_minus, p_plus })
    }

    /// Constant exponent field.
    pub fn uniform(t: usize, p: f64) -> Result<Self> {
        Self::new(t, vec![p; t + 2])
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// p(k), k in 0..=T+1.
    pub fn get(&self, k: usize) -> f64 {
        self.p[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }
}

/// The weight h: Z[0,T+1] → (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    t: usize,
    h: Vec<f64>,
    h_minus: f64,
    h_plus: f64,
}

impl WeightField {
    pub fn new(t: usize, h: Vec<f64>) -> Result<Self> {
        let h = validated_field(t, h, "h", |v| v > 0.0, "h > 0")?;
        let h_minus = h.iter().cloned().fold(f64::INFINITY, f64::min);
        let h_plus = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(WeightField { t, h, h_minus, h_plus })
    }

    pub fn uniform(t: usize, h: f64) -> Result<Self> {
        Self::new(t, vec![h; t + 2])
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// h(k), k in 0..=T+1.
    pub fn get(&self, k: usize) -> f64 {
        self.h[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub fn h_minus(&self) -> f64 {
        self.h_minus
    }

    pub fn h_plus(&self) -> f64 {
        self.h_plus
    }
}

/// The parameter function u: Z[1,T] → R.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterFunction {
    u: Vec<f64>,
}

impl ParameterFunction {
    pub fn new(t: usize, u: Vec<f64>) -> Result<Self> {
        if u.len() != t {
            return Err(Error::Shape(format!(
                "u must have length T = {t}, got {}",
                u.len()
            )));
        }
        Ok(ParameterFunction { u })
    }

    pub fn uniform(t: usize, u: f64) -> Self {
        ParameterFunction { u: vec![u; t] }
    }

    pub fn t(&self) -> usize {
        self.u.len()
    }

    /// u(k), k in 1..=T.
    pub fn get(&self, k: usize) -> f64 {
        self.u[k - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    /// u + s·v, elementwise.
    pub fn axpy(&self, s: f64, v: &ParameterFunction) -> Result<ParameterFunction> {
        if self.u.len() != v.u.len() {
            return Err(Error::Shape("parameter length mismatch".into()));
        }
        Ok(ParameterFunction {
            u: self.u.iter().zip(&v.u).map(|(a, b)| a + s * b).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_difference_direct() {
        let x = GridFunction::from_values(vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(x.forward_difference(), vec![1.0, 1.0, -1.0, -1.0]);
        let z = GridFunction::zeros(3);
        assert_eq!(z.forward_difference(), vec![0.0; 4]);
    }

    #[test]
    fn forward_difference_telescopes() {
        let x = GridFunction::from_interior(&[3.5, -1.0, 0.25, 7.0]);
        let s: f64 = x.forward_difference().iter().sum();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn h_norm_examples() {
        assert_eq!(GridFunction::zeros(3).h_norm(), 0.0);
        let x = GridFunction::from_values(vec![0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((x.h_norm() - 2.0_f64.sqrt()).abs() < 1e-15);
        let y = GridFunction::from_values(vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert!((y.h_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(GridFunction::zeros(3).sup_norm(), 0.0);
        let x = GridFunction::from_values(vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(x.sup_norm(), 2.0);
        let y = GridFunction::from_values(vec![0.0, -3.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(y.sup_norm(), 3.0);
    }

    #[test]
    fn boundary_enforced() {
        assert!(GridFunction::from_values(vec![0.1, 0.0, 0.0]).is_err());
        assert!(GridFunction::from_values(vec![0.0, 1.0, 0.5]).is_err());
        let x = GridFunction::from_interior(&[1.0, 2.0]);
        assert_eq!(x.values()[0], 0.0);
        assert_eq!(x.values()[3], 0.0);
    }

    #[test]
    fn sbp_defect_worked_example() {
        // T=3, a=(1,2,3,4), y=(0,1,2,1,0): LHS sum -4, correction +4.
        let y = GridFunction::from_values(vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let d = summation_by_parts_defect(&[1.0, 2.0, 3.0, 4.0], &y).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn sbp_constant_coefficients() {
        let y = GridFunction::from_interior(&[2.0, -1.0, 0.5]);
        let d = summation_by_parts_defect(&[7.0; 4], &y).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn sbp_shape_error() {
        let y = GridFunction::zeros(3);
        assert!(summation_by_parts_defect(&[1.0, 2.0], &y).is_err());
    }

    #[test]
    fn field_validation() {
        assert!(ExponentField::uniform(3, 1.0).is_err());
        assert!(ExponentField::uniform(3, 2.0).is_ok());
        assert!(WeightField::uniform(3, 0.0).is_err());
        assert!(ExponentField::new(3, vec![2.0; 4]).is_err()); // wrong length
        let p = ExponentField::new(2, vec![1.5, 2.0, 3.0, 2.5]).unwrap();
        assert_eq!(p.p_minus(), 1.5);
        assert_eq!(p.p_plus(), 3.0);
    }
}
