//! Config document: a JSON file describing one problem instance plus optional
//! solver and experiment blocks. Scalars broadcast to arrays; validation
//! collects every violation with a path-qualified message.

use plapk::{
    CanonicalFamily, ExponentField, ExpressionNonlinearity, GrowthData, Nonlinearity,
    ParameterFunction, ProblemInstance, SolverOptions, WeightField,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    /// Expands to a vector of length `n`; a stored vector must already have
    /// that length.
    pub fn broadcast(&self, n: usize, path: &str, errors: &mut Vec<String>) -> Vec<f64> {
        match self {
            ScalarOrVec::Scalar(s) => vec![*s; n],
            ScalarOrVec::Vec(v) => {
                if v.len() != n {
                    errors.push(format!("{path}: expected length {n}, got {}", v.len()));
                    vec![f64::NAN; n]
                } else {
                    v.clone()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthBlock {
    pub a: ScalarOrVec,
    pub b: ScalarOrVec,
    pub q: ScalarOrVec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FBlock {
    Canonical {
        a: ScalarOrVec,
        b: ScalarOrVec,
        q: ScalarOrVec,
        rho: f64,
    },
    Expression {
        f: String,
        #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
        big_f: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        growth: Option<GrowthBlock>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    /// Explicit schedule, nonincreasing toward 0.
    List(Vec<f64>),
    /// delta_n = scale / n for n = 1..=n.
    Rule { rule: String, n: usize, scale: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependenceBlock {
    pub v: ScalarOrVec,
    pub deltas: DeltaSpec,
    pub distance_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub t: usize,
    pub p: ScalarOrVec,
    pub h: ScalarOrVec,
    pub lambda: f64,
    pub f: FBlock,
    pub u: ScalarOrVec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependence: Option<DependenceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

/// The validated instance plus everything derived from the config.
pub struct LoadedConfig {
    pub instance: ProblemInstance,
    pub options: SolverOptions,
    pub dependence: Option<DependenceBlock>,
    pub sweep: Option<SweepBlock>,
    /// Echo with all scalars expanded to arrays; re-feeding it reproduces the
    /// run.
    pub echo: ConfigDocument,
}

fn growth_from_parts(
    a: Vec<f64>,
    b: Vec<f64>,
    q: Vec<f64>,
    path: &str,
    errors: &mut Vec<String>,
) -> Option<GrowthData> {
    for (i, v) in a.iter().enumerate() {
        if !(*v >= 0.0) {
            errors.push(format!("{path}.a[{i}]: a must be nonnegative, got {v}"));
        }
    }
    for (i, v) in q.iter().enumerate() {
        if !(*v >= 1.0) {
            errors.push(format!("{path}.q[{i}]: q must be at least 1, got {v}"));
        }
    }
    if errors.is_empty() {
        match GrowthData::new(a, b, q) {
            Ok(g) => Some(g),
            Err(e) => {
                errors.push(format!("{path}: {e}"));
                None
            }
        }
    } else {
        None
    }
}

impl ConfigDocument {
    pub fn parse(src: &str) -> Result<ConfigDocument, String> {
        serde_json::from_str(src).map_err(|e| format!("config: {e}"))
    }

    /// Full validation; on failure returns every violated invariant.
    pub fn load(&self) -> Result<LoadedConfig, Vec<String>> {
        let mut errors = Vec::new();
        let t = self.t;
        if t == 0 {
            errors.push("t: must be at least 1".into());
            return Err(errors);
        }

        let p_vals = self.p.broadcast(t + 2, "p", &mut errors);
        for (i, v) in p_vals.iter().enumerate() {
            if !(*v > 1.0) {
                errors.push(format!("p[{i}]: p must exceed 1, got {v}"));
            }
        }
        let h_vals = self.h.broadcast(t + 2, "h", &mut errors);
        for (i, v) in h_vals.iter().enumerate() {
            if !(*v > 0.0) {
                errors.push(format!("h[{i}]: h must be positive, got {v}"));
            }
        }
        if !(self.lambda > 0.0) {
            errors.push(format!("lambda: must be positive, got {}", self.lambda));
        }
        let u_vals = self.u.broadcast(t, "u", &mut errors);
        for (i, v) in u_vals.iter().enumerate() {
            if !v.is_finite() {
                errors.push(format!("u[{i}]: must be finite, got {v}"));
            }
        }

        let f = match &self.f {
            FBlock::Canonical { a, b, q, rho } => {
                let a = a.broadcast(t, "f.a", &mut errors);
                let b = b.broadcast(t, "f.b", &mut errors);
                let q = q.broadcast(t, "f.q", &mut errors);
                if !(0.0..1.0).contains(rho) {
                    errors.push(format!("f.rho: must lie in [0, 1), got {rho}"));
                }
                growth_from_parts(a, b, q, "f", &mut errors)
                    .and_then(|g| match CanonicalFamily::new(g, *rho) {
                        Ok(fam) => Some(Nonlinearity::Canonical(fam)),
                        Err(e) => {
                            errors.push(format!("f: {e}"));
                            None
                        }
                    })
            }
            FBlock::Expression { f, big_f, growth } => {
                let g = growth.as_ref().and_then(|gb| {
                    let a = gb.a.broadcast(t, "f.growth.a", &mut errors);
                    let b = gb.b.broadcast(t, "f.growth.b", &mut errors);
                    let q = gb.q.broadcast(t, "f.growth.q", &mut errors);
                    growth_from_parts(a, b, q, "f.growth", &mut errors)
                });
                match ExpressionNonlinearity::new(f, big_f.as_deref(), g) {
                    Ok(e) => Some(Nonlinearity::Expression(e)),
                    Err(e) => {
                        errors.push(format!("f.f: {e}"));
                        None
                    }
                }
            }
        };

        let mut options = SolverOptions::default();
        if let Some(s) = &self.solver {
            if let Some(tol) = s.tol {
                if !(tol > 0.0) {
                    errors.push(format!("solver.tol: must be positive, got {tol}"));
                }
                options.tol = tol;
            }
            if let Some(mi) = s.max_iter {
                if mi == 0 {
                    errors.push("solver.max_iter: must be at least 1".into());
                }
                options.max_iter = mi;
            }
            if let Some(n) = s.starts {
                options.n_starts = n;
            }
            if let Some(seed) = s.seed {
                options.seed = seed;
            }
            if let Some(rad) = s.radius {
                if !(rad > 0.0) {
                    errors.push(format!("solver.radius: must be positive, got {rad}"));
                }
                options.radius = rad;
            }
        }

        let mut dep_echo = None;
        if let Some(d) = &self.dependence {
            let v = d.v.broadcast(t, "dependence.v", &mut errors);
            let deltas = match &d.deltas {
                DeltaSpec::List(list) => list.clone(),
                DeltaSpec::Rule { rule, n, scale } => {
                    if rule != "inverse_n" {
                        errors.push(format!(
                            "dependence.deltas.rule: unknown rule `{rule}` (expected `inverse_n`)"
                        ));
                    }
                    (1..=*n).map(|k| scale / k as f64).collect()
                }
            };
            if deltas.len() < 3 {
                errors.push(format!(
                    "dependence.deltas: need at least 3 entries, got {}",
                    deltas.len()
                ));
            }
            for w in deltas.windows(2) {
                if w[1] > w[0] {
                    errors.push(format!(
                        "dependence.deltas: schedule must be nonincreasing, found {} -> {}",
                        w[0], w[1]
                    ));
                    break;
                }
            }
            if !(d.distance_tol > 0.0) {
                errors.push(format!(
                    "dependence.distance_tol: must be positive, got {}",
                    d.distance_tol
                ));
            }
            dep_echo = Some(DependenceBlock {
                v: ScalarOrVec::Vec(v),
                deltas: DeltaSpec::List(deltas),
                distance_tol: d.distance_tol,
            });
        }

        if let Some(s) = &self.sweep {
            if s.lambdas.is_empty() {
                errors.push("sweep.lambdas: grid must be nonempty".into());
            }
            for (i, l) in s.lambdas.iter().enumerate() {
                if !(*l > 0.0) {
                    errors.push(format!("sweep.lambdas[{i}]: must be positive, got {l}"));
                }
            }
        }

        if !errors.is_empty() {
            return Err(errors);
        }

        let p = ExponentField::new(t, p_vals.clone()).map_err(|e| vec![format!("p: {e}")])?;
        let h = WeightField::new(t, h_vals.clone()).map_err(|e| vec![format!("h: {e}")])?;
        let u = ParameterFunction::new(t, u_vals.clone()).map_err(|e| vec![format!("u: {e}")])?;
        let instance = ProblemInstance::new(p, h, self.lambda, f.expect("validated"), u)
            .map_err(|e| vec![format!("instance: {e}")])?;

        let echo = ConfigDocument {
            t,
            p: ScalarOrVec::Vec(p_vals),
            h: ScalarOrVec::Vec(h_vals),
            lambda: self.lambda,
            f: match &self.f {
                FBlock::Canonical { a, b, q, rho } => {
                    let mut scratch = Vec::new();
                    FBlock::Canonical {
                        a: ScalarOrVec::Vec(a.broadcast(t, "f.a", &mut scratch)),
                        b: ScalarOrVec::Vec(b.broadcast(t, "f.b", &mut scratch)),
                        q: ScalarOrVec::Vec(q.broadcast(t, "f.q", &mut scratch)),
                        rho: *rho,
                    }
                }
                other => other.clone(),
            },
            u: ScalarOrVec::Vec(u_vals),
            solver: Some(SolverBlock {
                tol: Some(options.tol),
                max_iter: Some(options.max_iter),
                starts: Some(options.n_starts),
                seed: Some(options.seed),
                radius: Some(options.radius),
            }),
            dependence: dep_echo.clone(),
            sweep: self.sweep.clone(),
        };

        Ok(LoadedConfig {
            instance,
            options,
            dependence: dep_echo,
            sweep: self.sweep.clone(),
            echo,
        })
    }
}
