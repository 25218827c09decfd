//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvsample::bandlimit::{random_coefficients, random_sbl_support, random_support, DEFAULT_SUPPORT_EPS};
use tvsample::bench::{self, BenchCase};
use tvsample::graph::random_connected_graph;
use tvsample::oracle::{check_monotonicity, exhaustive_check};
use tvsample::reference;
use tvsample::sampling::product_rows;
use tvsample::spectral::eig_sym_matrix;
use tvsample::{
    cartesian_laplacian, cycle_graph, detect_support, eig_sym, jft, laplacian, max_lin_indep_rows,
    reconstruct, sample, separate_sampling, EigenBasis, Execution, JointSignal, ReducedBases,
    SpectralSupport,
};

const SEED: u64 = 0x5eed_2024;

/// Outcome of one criterion: a verdict and a short line of evidence.
struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn published() -> ReducedBases {
    ReducedBases::from_restricted(
        reference::restricted_time_basis(),
        reference::restricted_graph_basis(),
        &reference::support(),
    )
    .expect("published bases fit the support")
}

/// Cycle of `t` slots times a random connected graph on `n` vertices, with a
/// random SBL support.
fn random_instance(rng: &mut ChaCha8Rng, t: usize, n: usize) -> ReducedBases {
    let bt = eig_sym(&laplacian(&cycle_graph(t).unwrap())).unwrap();
    let bg = eig_sym(&laplacian(&random_connected_graph(n, 0.5, rng).unwrap())).unwrap();
    let s = random_sbl_support(t, n, rng).unwrap();
    ReducedBases::from_full(bt.vectors(), bg.vectors(), &s).unwrap()
}

fn chain_holds(s: &SpectralSupport) -> bool {
    s.k_t().max(s.k_g()) <= s.k() && s.k() <= s.k_t() * s.k_g()
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

fn worked_replay() -> Outcome {
    let start = Instant::now();
    let rb = published();
    let s_t = max_lin_indep_rows(rb.time(), 1e-9);
    let s_g = max_lin_indep_rows(rb.graph(), 1e-9);
    let (prod, rows) = product_rows(rb.time(), rb.graph(), rb.joint());
    let (plan, report) = rb.critical_plan().unwrap();
    let elapsed = start.elapsed();
    let dev = max_abs_diff(&rows, &reference_product_rows());
    let pass = s_t == [0, 1]
        && s_g == [0, 2]
        && prod == [(0, 0), (0, 2), (1, 0), (1, 2)]
        && plan.samples() == REFERENCE_SAMPLES
        && report.critical
        && dev < 1e-3
        && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "S_T={s_t:?} S_G={s_g:?} S'={prod:?} S={:?} max|dev|={dev:.1e} in {elapsed:?}",
            plan.samples()
        ),
    )
}

fn worked_reconstruction() -> Outcome {
    let rb = published();
    let (plan, _) = rb.critical_plan().unwrap();
    let x = reference::signal().unwrap();
    let y = sample(&x, &plan).unwrap();
    let rec = reconstruct(&y, &plan, rb.joint(), rb.support()).unwrap();
    let printed = max_abs_diff(rec.signal.matrix(), x.matrix());

    let exact = rb.synthesize(&reference::coefficients()).unwrap();
    let rec = reconstruct(&sample(&exact, &plan).unwrap(), &plan, rb.joint(), rb.support()).unwrap();
    let synth = max_abs_diff(rec.signal.matrix(), exact.matrix());
    outcome(
        y == REFERENCE_VALUES && printed < 1e-3 && synth < 1e-9,
        format!("values={y:?} printed X err={printed:.1e} synthesized X err={synth:.1e}"),
    )
}

fn bandwidth_accounting() -> Outcome {
    let bt = EigenBasis::from_parts(reference::full_time_basis(), vec![0.0, 2.0, 2.0, 4.0]).unwrap();
    let bg = EigenBasis::from_parts(reference::full_graph_basis(), vec![0.0, 1.0, 1.0, 4.0]).unwrap();
    let xf = jft(&bt, &bg, &reference::signal().unwrap()).unwrap();
    let dev = max_abs_diff(&xf, &reference_spectrum());
    let s = detect_support(&reference_spectrum(), DEFAULT_SUPPORT_EPS).unwrap();
    let counts = (s.k(), s.k_t(), s.k_g());
    outcome(
        counts == (3, 2, 2) && dev < 1e-3,
        format!("(K, K_T, K_G)={counts:?} JFT max|dev|={dev:.1e}"),
    )
}

fn exhaustive_bounds() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut instances = vec![published()];
    while instances.len() < 51 {
        let t = rng.random_range(3..=4);
        let n = rng.random_range(2..=4);
        instances.push(random_instance(&mut rng, t, n));
    }
    let mut violating = 0;
    let mut wrong_min = 0;
    let mut example = None;
    for rb in &instances {
        let s = rb.support();
        let rep = exhaustive_check(rb.joint(), s, s.k() + 1, Execution::Parallel).unwrap();
        if rep.min_qualified_size != Some(s.k()) {
            wrong_min += 1;
        }
        if !rep.bound_violations.is_empty() {
            violating += 1;
            example.get_or_insert_with(|| {
                let v = &rep.bound_violations[0];
                format!("; e.g. pairs {:?}: qualified {:?} breaks {}", s.pairs(), v.samples, v.bound)
            });
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violating == 0 && wrong_min == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} instances: {violating} with bound violations, {wrong_min} with min size != K, {elapsed:?}{}",
            instances.len(),
            example.unwrap_or_default()
        ),
    )
}

fn constructive_critical_sets(supports: &mut Vec<SpectralSupport>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let total = 500;
    let (mut rank_bad, mut size_bad, mut proj_bad, mut recon_bad) = (0, 0, 0, 0);
    let mut worst = 0.0f64;
    for _ in 0..total {
        let t = rng.random_range(3..=8);
        let n = rng.random_range(2..=8);
        let rb = random_instance(&mut rng, t, n);
        let s = rb.support().clone();
        let (plan, report) = rb.critical_plan().unwrap();
        rank_bad += (report.rank != s.k()) as usize;
        size_bad += (plan.len() != s.k()) as usize;
        proj_bad += (plan.proj_t().len() != s.k_t() || plan.proj_g().len() != s.k_g()) as usize;
        let x = rb.synthesize(&random_coefficients(&s, &mut rng)).unwrap();
        let rec = reconstruct(&sample(&x, &plan).unwrap(), &plan, rb.joint(), &s).unwrap();
        let err = rel_err(rec.signal.matrix(), x.matrix());
        worst = worst.max(err);
        recon_bad += (err >= 1e-8) as usize;
        supports.push(s);
    }
    outcome(
        rank_bad + size_bad + proj_bad + recon_bad == 0,
        format!(
            "{total} instances: rank!=K {rank_bad}, |S|!=K {size_bad}, \
             |S_T|!=K_T or |S_G|!=K_G {proj_bad}, recon err>=1e-8 {recon_bad} (worst {worst:.1e})"
        ),
    )
}

fn bandwidth_chain(generated: &[SpectralSupport]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut all = generated.to_vec();
    for _ in 0..1000 {
        let t = rng.random_range(2..=10);
        let n = rng.random_range(2..=10);
        all.push(random_sbl_support(t, n, &mut rng).unwrap());
        let k_t = rng.random_range(1..=t);
        let k_g = rng.random_range(1..=n);
        let k = rng.random_range(k_t.max(k_g)..=k_t * k_g);
        all.push(random_support(t, n, k_t, k_g, k, &mut rng).unwrap());
    }
    all.push(SpectralSupport::full(5, 6).unwrap());
    let broken = all.iter().filter(|s| !chain_holds(s)).count();

    let row = SpectralSupport::new(4, 5, [(1, 0), (1, 2), (1, 4)]).unwrap();
    let rect = SpectralSupport::new(4, 5, [(0, 1), (0, 3), (2, 1), (2, 3), (3, 1), (3, 3)]).unwrap();
    let lower = row.k() == row.k_t().max(row.k_g());
    let upper = rect.k() == rect.k_t() * rect.k_g() && rect.is_rectangle();
    outcome(
        broken == 0 && lower && upper,
        format!("{} supports, {broken} broken; lower witness {lower}, upper witness {upper}", all.len()),
    )
}

fn rank_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let per = 50;
    let mut trials = 0;
    let mut ok = check_monotonicity(published().joint(), per, SEED).unwrap();
    trials += per;
    while trials < 1000 {
        let t = rng.random_range(3..=5);
        let n = rng.random_range(2..=4);
        let rb = random_instance(&mut rng, t, n);
        ok &= check_monotonicity(rb.joint(), per, rng.random()).unwrap();
        trials += per;
    }
    outcome(ok, format!("{trials} nested pairs, monotone={ok}"))
}

fn separate_comparison(generated: &[SpectralSupport]) -> Outcome {
    let rb = published();
    let (plan, _) = rb.critical_plan().unwrap();
    let sep = separate_sampling(rb.time(), rb.graph()).unwrap();
    let worked = plan.len() == 3 && sep.len() == 4;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let (mut checked, mut bad) = (0, 0);
    for _ in 0..300 {
        let t = rng.random_range(3..=8);
        let n = rng.random_range(2..=8);
        let rb = random_instance(&mut rng, t, n);
        let s = rb.support();
        if s.is_rectangle() {
            continue;
        }
        checked += 1;
        let (plan, _) = rb.critical_plan().unwrap();
        let sep = separate_sampling(rb.time(), rb.graph()).unwrap();
        bad += !(plan.len() == s.k() && s.k() < s.k_t() * s.k_g() && sep.len() == s.k_t() * s.k_g()) as usize;
    }
    let strict = generated.iter().filter(|s| !s.is_rectangle()).all(|s| s.k() < s.k_t() * s.k_g());
    outcome(
        worked && bad == 0 && strict,
        format!(
            "worked instance {} vs {}; {checked} non-rectangular supports, {bad} without K < K_T*K_G",
            plan.len(),
            sep.len()
        ),
    )
}

fn complexity_ratio() -> Outcome {
    let cases: Vec<_> = [32, 48, 64].into_iter().map(BenchCase::square).collect();
    let rows = bench::run(&cases, 10, SEED, Execution::Parallel).unwrap();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let pass = ratios[0] < 1.0 && ratios.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = rows.iter().map(|r| format!("{}: {:.3}", r.label, r.ratio)).collect();
    outcome(pass, format!("factored/naive time ratio {}", shown.join(", ")))
}

fn spectral_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let (mut resid, mut ortho, mut additive, mut parseval) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..60 {
        let n = rng.random_range(2..=30);
        let l = laplacian(&random_connected_graph(n, rng.random_range(0.1..0.9), &mut rng).unwrap());
        let b = eig_sym(&l).unwrap();
        let u = b.vectors();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(b.values()));
        resid = resid.max((l.matrix() * u - u * lam).abs().max());
        ortho = ortho.max((u.transpose() * u - DMatrix::identity(n, n)).abs().max());
    }
    for _ in 0..30 {
        let t = rng.random_range(3..=6);
        let n = rng.random_range(2..=5);
        let lt = laplacian(&cycle_graph(t).unwrap());
        let lg = laplacian(&random_connected_graph(n, 0.5, &mut rng).unwrap());
        let (bt, bg) = (eig_sym(&lt).unwrap(), eig_sym(&lg).unwrap());
        let joint = eig_sym_matrix(cartesian_laplacian(&lt, &lg).matrix()).unwrap();
        let mut sums: Vec<f64> = bt
            .values()
            .iter()
            .flat_map(|a| bg.values().iter().map(move |b| a + b))
            .collect();
        sums.sort_by(f64::total_cmp);
        for (a, b) in sums.iter().zip(joint.values()) {
            additive = additive.max((a - b).abs());
        }
        let x = JointSignal::new(DMatrix::from_fn(n, t, |_, _| rng.random_range(-1.0..1.0))).unwrap();
        let xf = jft(&bt, &bg, &x).unwrap();
        let e = x.matrix().norm_squared();
        parseval = parseval.max((e - xf.norm_squared()).abs() / e);
    }
    outcome(
        resid < 1e-8 && ortho < 1e-9 && additive < 1e-8 && parseval < 1e-10,
        format!(
            "residual {resid:.1e}, orthonormality {ortho:.1e}, additivity {additive:.1e}, Parseval {parseval:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let mut supports = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnMut() -> Outcome + '_>)> = vec![
        ("worked instance pipeline replay", Box::new(worked_replay)),
        ("worked instance reconstruction", Box::new(worked_reconstruction)),
        ("bandwidth accounting", Box::new(bandwidth_accounting)),
        ("exhaustive lower bounds", Box::new(exhaustive_bounds)),
        ("constructive critical sets", Box::new(|| constructive_critical_sets(&mut supports))),
    ];
    let mut failed = 0;
    let mut report = |idx: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let out = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|_| outcome(false, "panicked"));
        failed += !out.pass as usize;
        println!("{} {idx:>2} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    };
    for (i, (name, mut f)) in criteria.into_iter().enumerate() {
        report(i + 1, name, &mut *f);
    }
    let rest: Vec<(&str, Box<dyn FnMut() -> Outcome + '_>)> = vec![
        ("bandwidth chain", Box::new(|| bandwidth_chain(&supports))),
        ("rank monotonicity", Box::new(rank_monotonicity)),
        ("separate sampling comparison", Box::new(|| separate_comparison(&supports))),
        ("complexity ratio", Box::new(complexity_ratio)),
        ("spectral invariants", Box::new(spectral_invariants)),
    ];
    for (i, (name, mut f)) in rest.into_iter().enumerate() {
        report(i + 6, name, &mut *f);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
