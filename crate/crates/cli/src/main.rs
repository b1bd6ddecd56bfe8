// `!(v > 0.0)` is used throughout validation so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigDocument, LoadedConfig};
use plapk::constants::{
    coercivity_constants, embedding_constant, sharp_embedding_constant,
};
use plapk::lab::{run_dependence, regime_sweep, DependencePlan};
use plapk::nonlinearity::{check_h1, check_h2, check_h3, RegimeReport, SamplingPlan};
use plapk::{
    classify_regime, minimize, multistart, ConstantsBundle, GridFunction, ParameterFunction,
    ProblemInstance,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plapk", version, about = "Discrete anisotropic p(k)-Laplacian BVP solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize the energy and report the solution.
    Solve(RunArgs),
    /// Check hypotheses H1-H3 and classify the regime.
    Check(RunArgs),
    /// Print embedding and coercivity constants for a grid.
    Constants(ConstantsArgs),
    /// Run the continuous-dependence experiment from the config.
    Depend(RunArgs),
    /// Run the lambda sweep from the config.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON config document.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override: gradient tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override: iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Override: number of random multistart points.
    #[arg(long)]
    starts: Option<usize>,
    /// Override: RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Solve report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Number of interior nodes.
    #[arg(long)]
    t: usize,
    /// Embedding exponents m (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    m: Vec<f64>,
    /// Uniform exponent p for the coercivity pair.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Solve(a) => with_config(&a, cmd_solve),
        Cmd::Check(a) => with_config(&a, cmd_check),
        Cmd::Constants(a) => cmd_constants(&a),
        Cmd::Depend(a) => with_config(&a, cmd_depend),
        Cmd::Sweep(a) => with_config(&a, cmd_sweep),
    };
    match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn with_config(
    args: &RunArgs,
    run: impl FnOnce(&RunArgs, LoadedConfig) -> Result<ExitCode>,
) -> Result<ExitCode> {
    let src = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let doc = match ConfigDocument::parse(&src) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(1));
        }
    };
    let mut loaded = match doc.load() {
        Ok(l) => l,
        Err(errors) => {
            eprintln!("invalid config ({} problems):", errors.len());
            for e in &errors {
                eprintln!("  {e}");
            }
            return Ok(ExitCode::from(1));
        }
    };
    if let Some(tol) = args.tol {
        loaded.options.tol = tol;
    }
    if let Some(mi) = args.max_iter {
        loaded.options.max_iter = mi;
    }
    if let Some(n) = args.starts {
        loaded.options.n_starts = n;
    }
    if let Some(seed) = args.seed {
        loaded.options.seed = seed;
    }
    run(args, loaded)
}

#[derive(Serialize)]
struct RegimeJson {
    primal: String,
    dual: String,
    lambda_star: f64,
    dual_lambda_star: f64,
}

#[derive(Serialize)]
struct EnergyJson {
    diffusion: f64,
    potential: f64,
    total: f64,
}

#[derive(Serialize)]
struct UniquenessJson {
    verdict: String,
    max_pairwise_distance: f64,
    distance_threshold: f64,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct SolveJson {
    instance: ConfigDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<RegimeJson>,
    h3_holds: bool,
    converged: bool,
    iterations: usize,
    minimizer: Vec<f64>,
    energy: EnergyJson,
    residual_max_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniqueness: Option<UniquenessJson>,
}

fn regime_of(inst: &ProblemInstance) -> Result<Option<(RegimeReport, RegimeJson)>> {
    let Some(growth) = inst.f().growth() else {
        return Ok(None);
    };
    let bundle = ConstantsBundle::compute(inst.p(), inst.h(), &growth)?;
    let report = classify_regime(inst.p(), &growth, inst.lambda(), &bundle);
    let json = RegimeJson {
        primal: report.primal.to_string(),
        dual: report.dual.to_string(),
        lambda_star: bundle.lambda_star,
        dual_lambda_star: bundle.dual_lambda_star,
    };
    Ok(Some((report, json)))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn instance_h3(inst: &ProblemInstance) -> Result<bool> {
    let t = inst.t();
    let us: Vec<f64> = (1..=t).map(|k| inst.u().get(k)).collect();
    Ok(check_h3(inst.f(), t, &us)?.holds)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn cmd_solve(args: &RunArgs, loaded: LoadedConfig) -> Result<ExitCode> {
    let inst = &loaded.instance;
    let t = inst.t();
    let regime = regime_of(inst)?;
    let h3 = instance_h3(inst)?;

    let (report, uniqueness) = if loaded.options.n_starts > 1 {
        match multistart(inst, &loaded.options) {
            Ok(u) => {
                let best = u.runs[0].clone();
                let json = UniquenessJson {
                    verdict: u.verdict.to_string(),
                    max_pairwise_distance: u.max_pairwise_distance,
                    distance_threshold: u.distance_threshold,
                    failures: u.failures.clone(),
                };
                (best, Some(json))
            }
            Err(e) => {
                eprintln!("solve failed: {e}");
                return Ok(ExitCode::from(2));
            }
        }
    } else {
        match minimize(inst, &GridFunction::zeros(t), &loaded.options) {
            Ok(r) => (r, None),
            Err(e) => {
                eprintln!("solve failed: {e}");
                return Ok(ExitCode::from(2));
            }
        }
    };

    let energy = inst.energy(&report.minimizer)?;
    let residual = inst.strong_residual(&report.minimizer)?;
    let doc = SolveJson {
        instance: loaded.echo,
        regime: regime.map(|(_, j)| j),
        h3_holds: h3,
        converged: report.converged,
        iterations: report.iterations,
        minimizer: report.minimizer.values().to_vec(),
        energy: EnergyJson {
            diffusion: energy.diffusion,
            potential: energy.potential,
            total: energy.total,
        },
        residual_max_norm: max_abs(&residual),
        uniqueness,
    };

    let path = match args.format {
        Format::Json => {
            let body = serde_json::to_string_pretty(&doc)?;
            write_file(&args.out, "solve_report.json", &(body + "\n"))?
        }
        Format::Csv => {
            let mut body = String::from("k,x,residual\n");
            for k in 0..=t + 1 {
                let r = if k >= 1 && k <= t { residual[k - 1] } else { 0.0 };
                writeln!(body, "{k},{:.16e},{r:.16e}", doc.minimizer[k])?;
            }
            write_file(&args.out, "solve_report.csv", &body)?
        }
    };
    println!("wrote {}", path.display());
    if !h3 {
        println!("note: f(k, 0, u(k)) = 0 for all k; the trivial solution is expected");
    }
    if doc.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: solver did not converge within the iteration cap");
        Ok(ExitCode::from(2))
    }
}

fn cmd_check(_args: &RunArgs, loaded: LoadedConfig) -> Result<ExitCode> {
    let inst = &loaded.instance;
    let t = inst.t();
    let plan = SamplingPlan::default();
    let mut all_pass = true;

    match inst.f().growth() {
        Some(growth) => {
            let v = check_h1(inst.f(), &growth, &plan)?;
            if v.is_empty() {
                println!("H1 (growth bound): pass");
            } else {
                all_pass = false;
                println!("H1 (growth bound): FAIL ({} violations)", v.len());
            }
        }
        None => println!("H1 (growth bound): skipped (no growth data declared)"),
    }

    let v = check_h2(inst.f(), t, &plan)?;
    if v.is_empty() {
        println!("H2 (monotonicity): pass");
    } else {
        all_pass = false;
        println!("H2 (monotonicity): FAIL ({} violations)", v.len());
        for w in v.iter().take(3) {
            println!(
                "  witness: k={}, u={}, x {} -> {}, f {} -> {}",
                w.k, w.u, w.x_lo, w.x_hi, w.f_lo, w.f_hi
            );
        }
    }

    let h3 = instance_h3(inst)?;
    if h3 {
        println!("H3 (nontrivial forcing): pass");
    } else {
        all_pass = false;
        println!("H3 (nontrivial forcing): FAIL (f(k, 0, u(k)) = 0 for every k)");
    }

    match regime_of(inst)? {
        Some((_, j)) => {
            println!("regime: primal {}, dual {}", j.primal, j.dual);
            println!("lambda* = {:.16e}", j.lambda_star);
            println!("dual lambda* = {:.16e}", j.dual_lambda_star);
        }
        None => println!("regime: unknown (no growth data declared)"),
    }

    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_constants(args: &ConstantsArgs) -> Result<ExitCode> {
    if args.t == 0 {
        eprintln!("t: must be at least 1");
        return Ok(ExitCode::from(1));
    }
    if !(args.p > 1.0) {
        eprintln!("p: p must exceed 1, got {}", args.p);
        return Ok(ExitCode::from(1));
    }
    for &m in &args.m {
        if !(m >= 1.0) {
            eprintln!("m: must be at least 1, got {m}");
            return Ok(ExitCode::from(1));
        }
    }
    let t = args.t;
    println!("T = {t}");
    for &m in &args.m {
        let provable = embedding_constant(m, t)?;
        print!("c_{m} provable = {provable:.16e} (sum k^(m-1))");
        match sharp_embedding_constant(m, t) {
            Ok(sharp) => println!(", sharp = {sharp:.16e} (multistart ratio ascent)"),
            Err(e) => println!(", sharp unavailable: {e}"),
        }
    }
    let p = plapk::ExponentField::uniform(t, args.p).map_err(|e| anyhow::anyhow!("{e}"))?;
    let (c1, c2) = coercivity_constants(&p);
    println!("p = {}: C1 = {c1:.16e}, C2 = {c2:.16e}", args.p);
    for &m in &args.m {
        if m >= 2.0 {
            let t1 = (t + 1) as f64;
            println!(
                "norm relation m = {m}: lower coeff {:.16e}, upper coeff {:.16e}",
                t1.powf((2.0 - m) / (2.0 * m)),
                t1.powf(1.0 / m)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_depend(args: &RunArgs, loaded: LoadedConfig) -> Result<ExitCode> {
    let Some(block) = loaded.dependence else {
        eprintln!("config has no dependence block");
        return Ok(ExitCode::from(1));
    };
    let t = loaded.instance.t();
    let mut scratch = Vec::new();
    let v = block.v.broadcast(t, "dependence.v", &mut scratch);
    let deltas = match block.deltas {
        config::DeltaSpec::List(l) => l,
        config::DeltaSpec::Rule { n, scale, .. } => DependencePlan::inverse_n_schedule(n, scale),
    };
    let direction = ParameterFunction::new(t, v)?;
    let plan = DependencePlan::new(loaded.instance, direction, deltas, block.distance_tol)?;
    let report = run_dependence(&plan, &loaded.options)?;

    let mut body = String::from("n,delta_n,norm_xn,dist_to_limit,converged\n");
    for rec in &report.records {
        writeln!(
            body,
            "{},{:.16e},{:.16e},{:.16e},{}",
            rec.n, rec.delta, rec.norm_xn, rec.dist_to_limit, rec.converged
        )?;
    }
    writeln!(body, "# gamma = {:.16e}", report.gamma)?;
    writeln!(body, "# limit_residual = {:.16e}", report.limit_residual)?;
    writeln!(body, "# verdict = {}", report.verdict)?;
    let path = write_file(&args.out, "dependence.csv", &body)?;
    println!("wrote {}", path.display());
    println!("gamma = {:.16e}, verdict = {}", report.gamma, report.verdict);

    Ok(match report.verdict {
        plapk::lab::DependenceVerdict::Incomplete => {
            if let Some(n) = report.failed_at {
                eprintln!("warning: member solve failed at n = {n}");
            }
            ExitCode::from(2)
        }
        _ => ExitCode::SUCCESS,
    })
}

fn cmd_sweep(args: &RunArgs, loaded: LoadedConfig) -> Result<ExitCode> {
    let Some(block) = loaded.sweep else {
        eprintln!("config has no sweep block");
        return Ok(ExitCode::from(1));
    };
    let base = loaded.instance;
    let rows = regime_sweep(
        |lambda| base.with_lambda(lambda),
        &block.lambdas,
        &loaded.options,
    );

    let mut body = String::from("lambda,regime,converged,unique_consistent,final_energy,residual\n");
    for row in &rows {
        writeln!(
            body,
            "{:.16e},{},{},{},{:.16e},{:.16e}",
            row.lambda, row.regime, row.converged, row.unique_consistent, row.final_energy,
            row.residual
        )?;
    }
    let path = write_file(&args.out, "sweep.csv", &body)?;
    println!("wrote {}", path.display());

    if rows.iter().all(|r| r.error.is_some() || !r.converged) {
        eprintln!("warning: every sweep row failed");
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
