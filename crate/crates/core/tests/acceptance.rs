//! Acceptance suite: one test per criterion, each printing a single PASS line
//! with its pinned tolerance and staying inside its runtime budget.

mod common;

use common::*;
use plapk::constants::{
    coercivity_constants, embedding_constant, lambda_threshold, norm_relation_check,
    sharp_embedding_constant,
};
use plapk::lab::{probe_energy_bound, run_dependence, regime_sweep, DependencePlan};
use plapk::nonlinearity::check_h3;
use plapk::{
    minimize, multistart, maximize_dual, tridiagonal_oracle, CanonicalFamily, ConstantsBundle,
    ExponentField, GridFunction, GrowthData, Nonlinearity, ParameterFunction, ProblemInstance,
    SolverOptions, UniquenessVerdict, WeightField,
};
use rand::Rng;
use std::time::Instant;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn perturbed(x: &GridFunction, k: usize, dh: f64) -> GridFunction {
    let mut interior = x.interior().to_vec();
    interior[k] += dh;
    GridFunction::from_interior(&interior)
}

#[test]
fn criterion_01_gradient_correctness() {
    let clock = Instant::now();
    let mut r = rng(201);
    for _ in 0..200 {
        let t = r.gen_range(2..=50);
        let inst = random_instance(&mut r, t);
        let x = random_grid_function(&mut r, t, 3.0);
        let grad = inst.gradient(&x).unwrap();
        let scale = max_abs(&grad).max(1.0);
        for (k, g) in grad.iter().enumerate() {
            let dh = 1e-6;
            let ep = inst.energy(&perturbed(&x, k, dh)).unwrap().total;
            let em = inst.energy(&perturbed(&x, k, -dh)).unwrap().total;
            let fd = (ep - em) / (2.0 * dh);
            assert!(
                (fd - g).abs() <= 1e-6 * scale,
                "T={t}, k={k}: fd {fd} vs analytic {g}"
            );
        }
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 30.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 1 PASS: analytic gradient vs centered differences, 200 instances, tol 1e-6 rel ({dt:.1}s)");
}

#[test]
fn criterion_02_weak_equals_strong() {
    let clock = Instant::now();
    let mut r = rng(202);
    let opts = SolverOptions::default();
    for i in 0..20 {
        let t = r.gen_range(2..=8);
        let inst = if i % 2 == 0 {
            random_strictly_coercive(&mut r, t)
        } else {
            random_borderline_admissible(&mut r, t)
        };
        let report = minimize(&inst, &GridFunction::zeros(t), &opts).unwrap();
        assert!(report.converged);
        let grad = inst.gradient(&report.minimizer).unwrap();
        let residual = inst.strong_residual(&report.minimizer).unwrap();
        for (g, s) in grad.iter().zip(&residual) {
            assert_eq!(g.to_bits(), s.to_bits(), "residual is not the gradient bit-for-bit");
        }
        assert!(max_abs(&residual) <= 1e-10, "residual {:e}", max_abs(&residual));
    }
    for _ in 0..1000 {
        let t = r.gen_range(1..40);
        let y = random_grid_function(&mut r, t, 10.0);
        let a: Vec<f64> = (0..t + 1).map(|_| r.gen_range(-10.0..10.0)).collect();
        let scale = 1.0 + max_abs(&a) * y.sup_norm() * t as f64;
        let d = plapk::summation_by_parts_defect(&a, &y).unwrap();
        assert!(d.abs() <= 1e-12 * scale);
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 10.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 2 PASS: strong residual = gradient bitwise, max-norm <= 1e-10; 1000 summation-by-parts probes ({dt:.1}s)");
}

#[test]
fn criterion_03_inequality_probes() {
    let clock = Instant::now();
    let mut r = rng(203);
    // coercivity lower bound with the constructive pair (C1, C2)
    for _ in 0..1000 {
        let t = r.gen_range(1..20);
        let p = random_exponents(&mut r, t, 1.5, 4.0);
        let (c1, c2) = coercivity_constants(&p);
        let mut x = random_grid_function(&mut r, t, 3.0);
        if x.h_norm() < 1.0 {
            x = x.scale(r.gen_range(1.0..10.0) / x.h_norm().max(1e-300));
        }
        let lhs: f64 = x
            .forward_difference()
            .iter()
            .enumerate()
            .map(|(i, d)| d.abs().powf(p.get(i)))
            .sum();
        let rhs = c1 * x.h_norm().powf(p.p_minus()) - c2;
        assert!(lhs >= rhs - 1e-9 * (1.0 + rhs.abs()), "{lhs} < {rhs}");
    }
    // embedding inequality for each m with the provable constant
    for m in [1.0, 2.0, 2.5, 3.0, 5.0] {
        for _ in 0..1000 {
            let t = r.gen_range(1..20);
            let x = random_grid_function(&mut r, t, 5.0);
            let c = embedding_constant(m, t).unwrap();
            let num: f64 = x.interior().iter().map(|v| v.abs().powf(m)).sum();
            let den: f64 = x.forward_difference().iter().map(|d| d.abs().powf(m)).sum();
            assert!(num <= c * den * (1.0 + 1e-12));
        }
    }
    // the double norm relation
    for m in [2.0, 3.0, 4.0, 10.0] {
        for _ in 0..1000 {
            let t = r.gen_range(1..20);
            let x = random_grid_function(&mut r, t, 5.0);
            let (lhs, mid, rhs) = norm_relation_check(m, &x).unwrap();
            let eps = 1e-12 * (1.0 + rhs);
            assert!(lhs <= mid + eps && mid <= rhs + eps, "{lhs} {mid} {rhs}");
        }
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 10.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 3 PASS: coercivity, embedding (m in {{1,2,2.5,3,5}}) and norm-relation probes, 10^3 each, zero violations ({dt:.1}s)");
}

#[test]
fn criterion_04_sharp_constant_oracle() {
    let clock = Instant::now();
    for t in [1_usize, 2, 3, 5, 10, 25] {
        let sharp = sharp_embedding_constant(2.0, t).unwrap();
        let exact = 1.0 / (4.0 * (std::f64::consts::PI / (2.0 * (t as f64 + 1.0))).sin().powi(2));
        assert!(
            (sharp - exact).abs() <= 1e-6 * exact,
            "T={t}: sharp {sharp} vs eigenvalue value {exact}"
        );
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 30.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 4 PASS: sharp c_2 matches 1/(4sin^2(pi/(2(T+1)))) within 1e-6 rel for T in {{1,2,3,5,10,25}} ({dt:.1}s)");
}

#[test]
fn criterion_05_existence_uniqueness() {
    let clock = Instant::now();
    let mut r = rng(205);
    let opts = SolverOptions::default();
    for i in 0..70 {
        let t = r.gen_range(2..=6);
        let inst = if i < 50 {
            random_strictly_coercive(&mut r, t)
        } else {
            random_borderline_admissible(&mut r, t)
        };
        let report = multistart(&inst, &opts).unwrap();
        assert_eq!(
            report.verdict,
            UniquenessVerdict::UniqueConsistent,
            "instance {i}: verdict {:?}, failures {:?}",
            report.verdict,
            report.failures
        );
        assert!(
            report.max_pairwise_distance <= 1e-7,
            "instance {i}: spread {:e}",
            report.max_pairwise_distance
        );
        let us: Vec<f64> = (1..=t).map(|k| inst.u().get(k)).collect();
        let h3 = check_h3(inst.f(), t, &us).unwrap();
        let best = &report.runs[0];
        assert!(best.final_energy <= 1e-12, "positive minimum {}", best.final_energy);
        if h3.holds {
            assert!(
                best.minimizer.h_norm() > 1e-9,
                "instance {i}: trivial minimizer despite nonvanishing forcing at zero"
            );
        }
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 120.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 5 PASS: 50 strictly-coercive + 20 borderline-admissible multistarts unique-consistent, spread <= 1e-7, nontrivial under H3, min energy <= 0 ({dt:.1}s)");
}

#[test]
fn criterion_06_oracle_equivalence() {
    let clock = Instant::now();
    let mut r = rng(206);
    let opts = SolverOptions::default();
    for _ in 0..50 {
        let t = r.gen_range(2..=12);
        let inst = random_linear(&mut r, t);
        let exact = tridiagonal_oracle(&inst).unwrap();
        let solved = minimize(&inst, &GridFunction::zeros(t), &opts).unwrap();
        assert!(solved.converged);
        let d = plapk::h_dist(&solved.minimizer, &exact).unwrap();
        assert!(d <= 1e-8, "T={t}: distance to oracle {d:e}");
    }
    let inst = reference_linear_instance();
    let solved = minimize(&inst, &GridFunction::zeros(3), &SolverOptions::default()).unwrap();
    let expect = [0.0, 1.5, 2.0, 1.5, 0.0];
    for (v, e) in solved.minimizer.values().iter().zip(expect) {
        assert!((v - e).abs() <= 1e-10, "minimizer {v} vs {e}");
    }
    let breakdown = inst.energy(&solved.minimizer).unwrap();
    assert!((breakdown.total + 2.5).abs() <= 1e-12, "energy {}", breakdown.total);
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 10.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 6 PASS: 50 linear instances match the tridiagonal oracle within 1e-8; T=3 reference minimizer and energy exact to 1e-10 / 1e-12 ({dt:.1}s)");
}

#[test]
fn criterion_07_lambda_threshold() {
    let clock = Instant::now();
    let t = 3;
    let p = ExponentField::uniform(t, 2.0).unwrap();
    let h = WeightField::uniform(t, 1.0).unwrap();
    let g = GrowthData::new(vec![1.0; t], vec![1.0; t], vec![1.0; t]).unwrap();
    let (lambda_star, _) = lambda_threshold(&p, &h, &g).unwrap();
    assert!(
        (lambda_star - 1.0 / 6.0).abs() <= 1e-15,
        "lambda* = {lambda_star}"
    );
    let make = |lambda: f64| {
        let fam = CanonicalFamily::new(
            GrowthData::new(vec![1.0; t], vec![1.0; t], vec![1.0; t]).unwrap(),
            0.0,
        )
        .unwrap();
        ProblemInstance::new(
            ExponentField::uniform(t, 2.0).unwrap(),
            WeightField::uniform(t, 1.0).unwrap(),
            lambda,
            Nonlinearity::Canonical(fam),
            ParameterFunction::uniform(t, 0.0),
        )
    };
    let lambdas = [0.02, 0.05, 0.08, 0.11, 0.14];
    let rows = regime_sweep(make, &lambdas, &SolverOptions::default());
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert!(row.lambda < lambda_star);
        assert!(row.error.is_none(), "λ={}: {:?}", row.lambda, row.error);
        assert!(row.converged && row.unique_consistent, "λ={}", row.lambda);
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 10.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 7 PASS: lambda* = 1/6 within 1e-15; 5-point sweep below the threshold fully converged ({dt:.1}s)");
}

#[test]
fn criterion_08_continuous_dependence() {
    let clock = Instant::now();
    let t = 3;
    let fam = CanonicalFamily::new(
        GrowthData::new(vec![0.0; t], vec![1.0; t], vec![1.0; t]).unwrap(),
        0.5,
    )
    .unwrap();
    let base = ProblemInstance::new(
        ExponentField::uniform(t, 2.0).unwrap(),
        WeightField::uniform(t, 1.0).unwrap(),
        1.0,
        Nonlinearity::Canonical(fam),
        ParameterFunction::uniform(t, 0.0),
    )
    .unwrap();
    let plan = DependencePlan::new(
        base,
        ParameterFunction::uniform(t, 1.0),
        DependencePlan::inverse_n_schedule(50, 1.0),
        0.05,
    )
    .unwrap();
    let report = run_dependence(&plan, &SolverOptions::default()).unwrap();
    let norm_limit = report.limit.h_norm();
    assert!((norm_limit - 5.0_f64.sqrt()).abs() <= 1e-9, "||x̄|| = {norm_limit}");
    for rec in &report.records {
        let expect = 0.5 * (1.0 / rec.n as f64).sin() * norm_limit;
        assert!(
            (rec.dist_to_limit - expect).abs() <= 1e-8,
            "n={}: dist {} vs {}",
            rec.n,
            rec.dist_to_limit,
            expect
        );
    }
    assert!(report.gamma.is_finite());
    assert_eq!(report.verdict.to_string(), "convergent");
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 30.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 8 PASS: dependence distances match 0.5 sin(1/n)||x̄|| within 1e-8 for n <= 50, gamma finite, verdict convergent ({dt:.1}s)");
}

#[test]
fn criterion_09_energy_bound() {
    let clock = Instant::now();
    let mut r = rng(209);
    for i in 0..20 {
        let t = r.gen_range(2..=8);
        let inst = if i % 2 == 0 {
            random_strictly_coercive(&mut r, t)
        } else {
            random_borderline_admissible(&mut r, t)
        };
        let growth = inst.f().growth().unwrap();
        let bundle = ConstantsBundle::compute(inst.p(), inst.h(), &growth).unwrap();
        let violations = probe_energy_bound(&inst, &bundle, 1000, 209 + i).unwrap();
        assert!(
            violations.is_empty(),
            "instance {i}: {} violations, first {:?}",
            violations.len(),
            violations.first()
        );
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 30.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 9 PASS: energy lower-bound probes, 10^3 samples on each of 20 covered instances, zero violations ({dt:.1}s)");
}

#[test]
fn criterion_10_dual_consistency() {
    let clock = Instant::now();
    let mut r = rng(210);
    let opts = SolverOptions::default();
    for _ in 0..20 {
        let t = r.gen_range(2..=6);
        let inst = random_strictly_coercive(&mut r, t);
        let a = minimize(&inst, &GridFunction::zeros(t), &opts).unwrap();
        let b = maximize_dual(&inst, &GridFunction::zeros(t), &opts).unwrap();
        assert!(a.converged && b.converged);
        let d = plapk::h_dist(&a.minimizer, &b.minimizer).unwrap();
        assert!(d <= 1e-8, "critical points differ by {d:e}");
    }
    for _ in 0..500 {
        let t = r.gen_range(2..=8);
        let inst = random_instance(&mut r, t);
        let x = random_grid_function(&mut r, t, 5.0);
        let e = inst.energy(&x).unwrap().total;
        let dual = inst.dual_energy(&x).unwrap();
        assert!(
            (e + dual).abs() <= 1e-12 * (1.0 + e.abs()),
            "energy {e} + dual {dual} != 0"
        );
    }
    let dt = clock.elapsed().as_secs_f64();
    assert!(dt < 30.0, "runtime budget exceeded: {dt:.1}s");
    println!("criterion 10 PASS: dual maximizer = primal minimizer within 1e-8 on 20 instances; dual identity to 1e-12 rel on 500 evaluations ({dt:.1}s)");
}
