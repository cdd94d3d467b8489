//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dgmspace::diagram::{Order, PersistenceDiagram};
use dgmspace::distance::{bottleneck, brute_force_distance, wasserstein};
use dgmspace::embeddings::{
    bottleneck_space, build_knn, build_union_space, kuratowski_embed, verify_annulus,
    verify_union_conditions, Scale,
};
use dgmspace::homology::roundtrip_check;
use dgmspace::negtype::{
    default_t_grid, gaussian_scan, knn_threshold, neg_type_holds, neg_type_supremum, snowflake,
    DEFAULT_Q_MAX, DEFAULT_TOLERANCE,
};
use dgmspace::space::{line, three_point};
use dgmspace::FiniteMetricSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Shortest-path closure of random edge weights in `[lo, 1]`: a metric whose
/// distances lie in `(0, 1]`.
fn random_metric(rng: &mut impl Rng, n: usize, lo: f64) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            // (0, 1]: 1 - [0, 1) rescaled above lo
            let w = 1.0 - (1.0 - lo) * rng.gen::<f64>();
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::from_rows(&d).expect("closure is a semi-metric")
}

fn random_diagram(rng: &mut impl Rng, max_points: usize) -> PersistenceDiagram {
    let n = rng.gen_range(0..=max_points);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x: f64 = rng.gen_range(0.0..10.0);
            (x, x + rng.gen_range(0.01..5.0))
        })
        .collect();
    PersistenceDiagram::from_pairs(pairs).unwrap()
}

fn criterion_1() -> Outcome {
    let r = kuratowski_embed(&three_point(), Scale::Fixed(1.0)).map_err(|e| e.to_string())?;
    let expected = [
        [(0.0, 2.0), (2.0, 4.3), (4.0, 6.8)],
        [(0.0, 2.3), (2.0, 4.0), (4.0, 6.5)],
        [(0.0, 2.8), (2.0, 4.5), (4.0, 6.0)],
    ];
    for (img, exp) in r.images().iter().zip(expected) {
        let got: Vec<(f64, f64)> = img.points().iter().map(|p| (p.birth(), p.death())).collect();
        ensure(got == exp, || format!("image {got:?} != {exp:?}"))?;
    }
    let residual = r.residuals().amax();
    ensure(residual <= 1e-12, || format!("max residual {residual:e}"))?;
    Ok(format!("nine points reproduced, max residual {residual:e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=20);
        let space = random_metric(&mut rng, n, 0.0);
        let r = kuratowski_embed(&space, Scale::Auto).map_err(|e| e.to_string())?;
        worst = worst.max(r.residuals().amax());
        let annulus = verify_annulus(&r);
        ensure(annulus.pass(), || format!("trial {trial}: annulus failed {annulus:?}"))?;
    }
    ensure(worst <= 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!("100 spaces, max residual {worst:e}, all norms in [c, 3c/2)"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let a = random_diagram(&mut rng, 4);
        let b = random_diagram(&mut rng, 4);
        for order in [Order::Finite(1.0), Order::Finite(2.0), Order::Infinity] {
            let oracle = brute_force_distance(&a, &b, order).map_err(|e| e.to_string())?;
            let exact = match order {
                Order::Infinity => bottleneck(&a, &b),
                Order::Finite(p) => wasserstein(&a, &b, p).map_err(|e| e.to_string())?,
            };
            let err = (exact - oracle).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, || format!("trial {trial}, p = {order}: {exact} vs {oracle}"))?;
        }
    }
    Ok(format!("200 pairs x p in {{1, 2, inf}}, max deviation {worst:e}"))
}

fn criterion_4() -> Outcome {
    let mut prev = f64::INFINITY;
    let mut worst: f64 = 0.0;
    let mut last = 0.0;
    for n in 2..=10 {
        let space = build_knn(n).map_err(|e| e.to_string())?;
        let sup = neg_type_supremum(&space, DEFAULT_Q_MAX, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
        let closed = knn_threshold(n).map_err(|e| e.to_string())?;
        ensure(!sup.at_least, || format!("n = {n}: supremum not bracketed"))?;
        let err = (sup.value - closed).abs();
        worst = worst.max(err);
        ensure(err <= 1e-6, || format!("n = {n}: {} vs {closed}", sup.value))?;
        ensure(sup.value < prev, || format!("n = {n}: not strictly decreasing"))?;
        prev = sup.value;
        last = sup.value;
    }
    ensure(last < 0.17, || format!("n = 10 value {last}"))?;
    Ok(format!("n = 2..10, max |sup - log2(1 + 1/(n-1))| = {worst:e}, n = 10 -> {last:.7}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut held = 0;
    let mut checks = 0;
    for s in 0..50 {
        let n = rng.gen_range(2..=8);
        let space = random_metric(&mut rng, n, 0.05);
        for _ in 0..20 {
            let a: f64 = rng.gen_range(0.0..4.0);
            let b: f64 = rng.gen_range(0.0..4.0);
            let (q_low, q_high) = (a.min(b), a.max(b));
            let high = neg_type_holds(&space, q_high, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
            checks += 1;
            if high.holds() {
                held += 1;
                let low = neg_type_holds(&space, q_low, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
                ensure(low.holds(), || format!("space {s}: holds at {q_high} but fails at {q_low}"))?;
            }
        }
    }
    Ok(format!("{checks} (q', q) pairs on 50 spaces, {held} with holds(q), no violation"))
}

fn criterion_6() -> Outcome {
    let probe = |space: &FiniteMetricSpace| {
        let r = kuratowski_embed(space, Scale::Auto).map_err(|e| e.to_string())?;
        let diagrams = bottleneck_space(space.labels().to_vec(), r.images()).map_err(|e| e.to_string())?;
        gaussian_scan(&diagrams, &default_t_grid(), 1e-8).map_err(|e| e.to_string())
    };
    let k33 = probe(&build_knn(3).map_err(|e| e.to_string())?)?;
    ensure(k33.witness_found && k33.min_eigenvalue < -1e-8, || format!("K33: {k33:?}"))?;
    let collinear = probe(&line(3))?;
    ensure(!collinear.witness_found, || format!("line: {collinear:?}"))?;
    Ok(format!(
        "K33 witness at t = {:.6}, min eigenvalue {:e}; collinear min eigenvalue {:e}",
        k33.t, k33.min_eigenvalue, collinear.min_eigenvalue
    ))
}

fn criterion_7() -> Outcome {
    let pairs = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)];
    let u = build_union_space(&pairs).map_err(|e| e.to_string())?;
    let constants = u.constants();
    ensure(constants == [1.0, 12.0, 48.0, 192.0, 768.0, 3072.0], || format!("constants {constants:?}"))?;
    let report = verify_union_conditions(&u);
    ensure(report.max_isometry_residual == 0.0, || format!("isometry residual {}", report.max_isometry_residual))?;
    ensure(report.separation_pass, || format!("separation margin {:?}", report.min_separation_margin))?;
    Ok(format!(
        "constants {constants:?}, isometry exact, min separation margin {}",
        report.min_separation_margin.unwrap_or(f64::NAN)
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total_points = 0;
    for trial in 0..50 {
        let n = rng.gen_range(0..=12);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(0.0..10.0);
                let b: f64 = rng.gen_range(0.0..10.0);
                (a.min(b), a.max(b))
            })
            .filter(|(a, b)| a < b)
            .collect();
        let d = PersistenceDiagram::from_pairs(pairs).unwrap();
        total_points += d.len();
        ensure(roundtrip_check(&d), || format!("trial {trial}: round trip failed for {d:?}"))?;
    }
    Ok(format!("50 diagrams ({total_points} points) recovered exactly in degree 1"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut holds, mut fails) = (0, 0);
    for s in 0..30 {
        let n = rng.gen_range(3..=8);
        let space = random_metric(&mut rng, n, 0.05);
        for q in [0.5, 1.0, 1.5] {
            let direct = neg_type_holds(&space, q, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
            let flake = snowflake(&space, q).map_err(|e| e.to_string())?;
            let via = neg_type_holds(&flake, 2.0, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
            ensure(direct.verdict == via.verdict, || format!("space {s}, q = {q}: disagreement"))?;
            if direct.holds() {
                holds += 1;
            } else {
                fails += 1;
            }
        }
    }
    Ok(format!("90 cases agree ({holds} hold, {fails} fail)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("three-point embedding reproduction", criterion_1, Duration::from_secs(1)),
        ("isometry suite", criterion_2, Duration::from_secs(30)),
        ("oracle equivalence", criterion_3, Duration::from_secs(30)),
        ("roundness thresholds of K_{n,n}", criterion_4, Duration::from_secs(10)),
        ("downward closure", criterion_5, Duration::from_secs(60)),
        ("Schoenberg witness", criterion_6, Duration::from_secs(10)),
        ("union construction", criterion_7, Duration::from_secs(60)),
        ("realization round trip", criterion_8, Duration::from_secs(10)),
        ("snowflake consistency", criterion_9, Duration::from_secs(30)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed < *budget {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  {}. {name} ({elapsed:.2?}): {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL  {}. {name} ({elapsed:.2?}): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
