//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashMap;
use std::time::Instant;

use bellrep_core::ensemble::{
    aep_tail_bound, check_satprob_lemma, entropy, entropy_identity_gap, exact_tail, gamma1_single, gamma_upper_bound,
    is_separable, top_k_sum, TailParams,
};
use bellrep_core::quantum::optimal_success_quantum;
use bellrep_core::rng::{self, StreamRng};
use bellrep_core::symplectic::{containment_ratio, count_containing, count_self_dual, enumerate_all};
use bellrep_core::{
    chi_report, eta_exact, failure_bound, game_simulate, BitString, GameOptions, ProbVec4, SearchBudget, SelfDualCode,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Uniform draw from the probability simplex.
fn random_p(r: &mut StreamRng) -> ProbVec4 {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - r.random::<f64>()).ln());
    let s: f64 = w.iter().sum();
    let mut v = w.map(|x| x / s);
    v[3] = (1.0 - v[0] - v[1] - v[2]).max(0.0);
    ProbVec4::new(v).unwrap()
}

fn all_probs(p: &ProbVec4, n: usize) -> Vec<f64> {
    (0u64..1 << (2 * n))
        .map(|w| bellrep_core::ensemble::product_prob(p, &BitString::from_word(w, 2 * n)).unwrap())
        .collect()
}

fn quantum_classical_equivalence() -> Check {
    let mut r = rng::stream(101, 0, 0);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for _ in 0..20 {
            let code = SelfDualCode::sample_uniform(n, &mut r).unwrap();
            let p = random_p(&mut r);
            let diff = (optimal_success_quantum(&code, &p).unwrap() - eta_exact(&code, &p).unwrap().eta).abs();
            worst = worst.max(diff);
        }
    }
    ensure(worst <= 1e-9, || format!("max |quantum - classical| = {worst:e}"))?;
    Ok(format!("80 pairs, max deviation {worst:.1e}"))
}

fn counting() -> Check {
    for (n, expected) in [(1, 3u32), (2, 15), (3, 135)] {
        let listed = enumerate_all(n).unwrap();
        let count = count_self_dual(n);
        ensure(count == BigUint::from(expected) && listed.len() == expected as usize, || {
            format!("N = {n}: formula {count}, enumerated {}", listed.len())
        })?;
        for c in 1u64..1 << (2 * n) {
            let c = BitString::from_word(c, 2 * n);
            let containing = listed.iter().filter(|code| code.contains(&c).unwrap()).count();
            ensure(BigUint::from(containing) == count_containing(n), || {
                format!("N = {n}: {containing} codes contain {c}, formula {}", count_containing(n))
            })?;
        }
    }
    for n in 1..=16 {
        let expected = BigRational::new(1.into(), ((1u64 << n) + 1).into());
        ensure(containment_ratio(n) == expected, || format!("N = {n}: ratio {}", containment_ratio(n)))?;
    }
    Ok("3, 15, 135 codes; ratio 1/(2^N+1) exact for N <= 16".into())
}

fn uniform_sampling() -> Check {
    let codes = enumerate_all(3).unwrap();
    let index: HashMap<&SelfDualCode, usize> = codes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let c = BitString::unit(6, 0);
    let samples = 100_000u64;
    let mut hits = vec![0u64; codes.len()];
    let mut containing = 0u64;
    let mut r = rng::stream(103, 0, 0);
    for _ in 0..samples {
        let code = SelfDualCode::sample_uniform(3, &mut r).unwrap();
        hits[index[&code]] += 1;
        containing += code.contains(&c).unwrap() as u64;
    }
    let n = samples as f64;
    let p = 1.0 / 135.0;
    let sigma = (p * (1.0 - p) / n).sqrt();
    let worst = hits.iter().map(|&h| (h as f64 / n - p).abs() / sigma).fold(0.0, f64::max);
    ensure(worst <= 5.0, || format!("code frequency off by {worst:.2} sigma"))?;
    let pm = 1.0 / 9.0;
    let z = (containing as f64 / n - pm).abs() / (pm * (1.0 - pm) / n).sqrt();
    ensure(z <= 4.0, || format!("membership frequency off by {z:.2} sigma"))?;
    Ok(format!("max code deviation {worst:.2} sigma, membership {z:.2} sigma"))
}

fn bound_correctness() -> Check {
    let mut r = rng::stream(104, 0, 0);
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for trial in 0..3 {
            let p = if trial == 0 { ProbVec4::new([0.7, 0.1, 0.1, 0.1]).unwrap() } else { random_p(&mut r) };
            let mut probs = all_probs(&p, n);
            probs.sort_by(|a, b| b.total_cmp(a));
            let total = probs.len() as u64;
            let ks = [1, 2, 1 << n, r.random_range(1..=total), total / 3, total];
            for k in ks {
                let brute: f64 = probs[..k as usize].iter().sum();
                let fast = top_k_sum(&p, n, &BigUint::from(k)).unwrap();
                worst = worst.max((brute - fast).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("top-K deviation {worst:e}"))?;
    for n in 1..=20 {
        let g = gamma_upper_bound(&ProbVec4::uniform(), n).unwrap();
        let expected = (-(n as f64)).exp2();
        ensure((g - expected).abs() <= 1e-12 * expected, || format!("uniform N = {n}: {g} vs {expected}"))?;
    }
    Ok(format!("top-K vs brute force max deviation {worst:.1e}; uniform gives 2^-N"))
}

fn entropy_bound_desk_scale() -> Check {
    let p = ProbVec4::new([0.4, 0.3, 0.2, 0.1]).unwrap();
    ensure((entropy(&p) - 1.846).abs() < 1e-3, || format!("H = {}", entropy(&p)))?;
    let gammas: Vec<f64> = (1..=20).map(|n| gamma_upper_bound(&p, n).unwrap()).collect();
    ensure(gammas.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {gammas:?}"))?;
    let last = gammas[19];
    ensure(last < 0.05, || format!("gamma upper bound at N = 20 is {last}"))?;
    let mut r = rng::stream(105, 0, 0);
    let mut ps = vec![p, ProbVec4::new([0.9, 0.05, 0.05, 0.0]).unwrap(), ProbVec4::new([0.5, 0.5, 0.0, 0.0]).unwrap()];
    ps.extend((0..3).map(|_| random_p(&mut r)));
    let mut checked = 0;
    for q in &ps {
        for n in (1..=20).step_by(1) {
            for eps in [0.05, 0.1, 0.2, 0.3, 0.5, 1.0] {
                let tail = exact_tail(q, n, eps).unwrap();
                let bound = aep_tail_bound(&TailParams::new(q, eps).unwrap(), n);
                ensure(tail <= bound + 1e-12, || format!("p = {q:?}, N = {n}, eps = {eps}: {tail} > {bound}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("bound decreasing, {last:.5} at N = 20; {checked} tail checks"))
}

fn counterexample() -> Check {
    let p = ProbVec4::new([0.9, 0.05, 0.05, 0.0]).unwrap();
    let n = 24;
    let budget = SearchBudget { trials: 200, screen_samples: 500, final_samples: 20_000 };
    let report = chi_report(&p, n, budget, 106).unwrap();
    let (lo, hi) = report.eta_ci95;
    let point = format!("eta_best = {:.4}, 95% CI [{lo:.4}, {hi:.4}]", report.eta_best);
    ensure((report.gamma1 - 0.95).abs() < 1e-12, || format!("gamma1 = {}", report.gamma1))?;

    let mean_failure = 1.0 - report.eta_mean;
    let sigma = report.eta_mean_stderr;
    for eps in [0.05, 0.1, 0.2, 0.3, 0.5] {
        let bound = failure_bound(&p, n, eps).unwrap();
        ensure(mean_failure <= bound + 4.0 * sigma, || {
            format!("eps = {eps}: mean failure {mean_failure} above bound {bound}")
        })?;
    }
    ensure(lo > 0.95 && report.counterexample_flag, || format!("{point}, flag {}", report.counterexample_flag))?;
    Ok(format!("N = {n}, {point}; mean 1 - eta = {mean_failure:.4} within failure bound"))
}

fn tightness_single_copy() -> Check {
    let codes = enumerate_all(1).unwrap();
    let mut r = rng::stream(107, 0, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_p(&mut r);
        let best = codes.iter().map(|c| eta_exact(c, &p).unwrap().eta).fold(0.0, f64::max);
        worst = worst.max((best - gamma1_single(&p)).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 random p, max deviation {worst:.1e}"))
}

fn entropy_and_weighting_identities() -> Check {
    let mut r = rng::stream(108, 0, 0);
    let mut separable = 0;
    for i in 0..10_000 {
        let p = random_p(&mut r);
        let gap = entropy_identity_gap(&p);
        ensure(gap <= 1e-12, || format!("identity gap {gap:e} at {p:?}"))?;
        if is_separable(&p) {
            separable += 1;
            ensure(entropy(&p) >= 1.0 - 1e-9, || format!("separable {p:?} with H = {}", entropy(&p)))?;
        }

        let k = r.random_range(1..=12usize);
        let lambda_raw: Vec<f64> = (0..k).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
        let total: f64 = lambda_raw.iter().sum();
        let lambda: Vec<f64> = lambda_raw.iter().map(|x| x / total).collect();
        let k_tilde = r.random_range(0..=k);
        let mut a: Vec<f64> = (0..k).map(|_| r.random::<f64>()).collect();
        let sum: f64 = a.iter().sum();
        if sum > k_tilde as f64 {
            a.iter_mut().for_each(|x| *x *= k_tilde as f64 / sum * (1.0 - 1e-15));
        }
        let ok = check_satprob_lemma(&a, &lambda, k_tilde).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(ok, || format!("inequality fails on instance {i}"))?;
    }
    Ok(format!("10^4 draws each; {separable} separable p checked"))
}

fn game_consistency() -> Check {
    let mut r = rng::stream(109, 0, 0);
    let mut worst: f64 = 0.0;
    for (n, p) in [
        (1, [0.7, 0.1, 0.1, 0.1]),
        (4, [0.6, 0.2, 0.1, 0.1]),
        (7, [0.8, 0.1, 0.05, 0.05]),
        (10, [0.9, 0.05, 0.05, 0.0]),
    ] {
        let p = ProbVec4::new(p).unwrap();
        let code = SelfDualCode::sample_uniform(n, &mut r).unwrap();
        let exact = eta_exact(&code, &p).unwrap().eta;
        let game = game_simulate(&p, &code, 100_000, 7 + n as u64, GameOptions::default()).unwrap();
        let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
        let z = (game.win_rate - exact).abs() / sigma;
        ensure(z <= 4.0, || format!("N = {n}: win rate {} vs exact {exact} ({z:.2} sigma)", game.win_rate))?;
        worst = worst.max(z);
    }
    let p = ProbVec4::new([0.8, 0.1, 0.05, 0.05]).unwrap();
    let code = SelfDualCode::sample_uniform(6, &mut r).unwrap();
    let opts = GameOptions { sample_alice_outcome: true };
    let a = serde_json::to_string(&game_simulate(&p, &code, 50_000, 3, opts).unwrap()).unwrap();
    let b = serde_json::to_string(&game_simulate(&p, &code, 50_000, 3, opts).unwrap()).unwrap();
    ensure(a == b, || "game reports differ under a fixed seed".into())?;
    let budget = SearchBudget { trials: 20, screen_samples: 200, final_samples: 2000 };
    let a = serde_json::to_string(&chi_report(&p, 14, budget, 5).unwrap()).unwrap();
    let b = serde_json::to_string(&chi_report(&p, 14, budget, 5).unwrap()).unwrap();
    ensure(a == b, || "chi reports differ under a fixed seed".into())?;
    Ok(format!("max deviation {worst:.2} sigma; reports byte-identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("quantum-classical equivalence", quantum_classical_equivalence),
        ("counting", counting),
        ("uniform sampling", uniform_sampling),
        ("bound correctness", bound_correctness),
        ("entropy bound at desk scale", entropy_bound_desk_scale),
        ("repetition counterexample", counterexample),
        ("single-copy tightness", tightness_single_copy),
        ("entropy and weighting identities", entropy_and_weighting_identities),
        ("game harness consistency", game_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
