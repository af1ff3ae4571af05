//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed; the process
//! fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Signed};

use roughvar::analytic::contour::{contour_i_residue, ic_exact, perron_expected, perron_single, ContourSpec};
use roughvar::friable::dickman::{default_table, dickman_rho};
use roughvar::friable::saddle::{psi_ht_estimate, saddle_alpha};
use roughvar::friable::psi::psi;
use roughvar::main_term::{hausman_shapiro_vq, main_term_corr_with, main_term_direct_with, predict};
use roughvar::rational::{rat, rat_int, to_f64};
use roughvar::report::{default_regime_grids, RangeCheck};
use roughvar::sieve::{mertens_product_of, primes_up_to};
use roughvar::variance::{correlation_sum, singular_product, variance_exact, variance_exact_threads, variance_mod_q};
use roughvar::{ExactRational, EULER_GAMMA};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn primorial_identity() -> Outcome {
    let mut checked = 0;
    for y in [3u64, 5, 7, 11, 13] {
        let table = primes_up_to(y);
        let q: u64 = table.primes().iter().product();
        for h in 1..=q.min(2000) {
            let v = variance_mod_q(q, h).map_err(|e| e.to_string())?;
            let hs = hausman_shapiro_vq(q, h).map_err(|e| e.to_string())?;
            let d = main_term_direct_with(h, &table).map_err(|e| e.to_string())?;
            let c = main_term_corr_with(h, &table);
            ensure(v == hs && hs == d && d == c, || format!("mismatch at y = {y}, H = {h}: {v} {hs} {d} {c}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (y, H) pairs agree exactly"))
}

fn hand_anchor() -> Outcome {
    let v = variance_exact(6, 3, 3).map_err(|e| e.to_string())?.variance;
    let m = main_term_corr_with(3, &primes_up_to(3));
    ensure(v == rat(1, 3) && m == rat(1, 3), || format!("V = {v}, M = {m}"))?;
    Ok("V(6,3,3) = M(3,3) = 1/3".into())
}

fn bernoulli_anchor() -> Outcome {
    let all = primes_up_to(10_000);
    let mut ys: Vec<u64> = all.primes().to_vec();
    ys.extend([2u64, 4, 100, 1000, 9999, 10_000]);
    for &y in &ys {
        let table = primes_up_to(y);
        let pi = mertens_product_of(&table).exact;
        let m = main_term_corr_with(1, &table);
        ensure(m == &pi * (ExactRational::one() - &pi), || format!("H = 1 mismatch at y = {y}"))?;
    }
    Ok(format!("M(1, y) = Pi_y (1 - Pi_y) at {} values of y <= 10^4", ys.len()))
}

fn perron_identities() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for c in [3.0, 0.75] {
        let spec = ContourSpec::new(c, 1e-6);
        for x in [0.5, 1.0, 2.5, 7.3] {
            let got = perron_single(x, c, &spec).map_err(|e| e.to_string())?.value;
            let want = perron_expected(x, c).map_err(|e| e.to_string())?;
            let err = (got - want).abs();
            worst = worst.max(err);
            ensure(err <= 1e-6, || format!("x = {x}, c = {c}: {got} vs {want}"))?;
        }
    }
    let mut worst_ic = 0.0f64;
    for (x, y) in [(3u64, 3u64), (10, 5), (25, 7)] {
        let got = contour_i_residue(x as f64, y, &ContourSpec::new(0.75, 1e-3)).map_err(|e| e.to_string())?.value;
        let want = to_f64(&ic_exact(&rat_int(x), y).map_err(|e| e.to_string())?);
        let err = (got - want).abs();
        worst_ic = worst_ic.max(err);
        ensure(err <= 1e-3, || format!("I_c({x}, {y}): {got} vs {want}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("Perron worst error {worst:.2e}, I_c worst error {worst_ic:.2e}, {secs:.1} s"))
}

fn desk_convergence() -> Outcome {
    let mut parts = Vec::new();
    for (h, y) in [(32u64, 7u64), (100, 13)] {
        let m = main_term_corr_with(h, &primes_up_to(y));
        let mut dev = Vec::new();
        for x in [1_000_000u64, 100_000_000] {
            let check = RangeCheck::new(x, h, y, 0.1, 0.1).map_err(|e| e.to_string())?;
            ensure(check.ok(), || check.explain())?;
            let v = variance_exact(x, h, y).map_err(|e| e.to_string())?.variance;
            let ratio = v / &m;
            dev.push((to_f64(&ratio), (ratio - ExactRational::one()).abs()));
        }
        let (r8, d8) = &dev[1];
        ensure((0.9..=1.1).contains(r8), || format!("(H, y) = ({h}, {y}): ratio {r8} at X = 10^8"))?;
        ensure(*d8 < dev[0].1, || format!("(H, y) = ({h}, {y}): |ratio - 1| did not shrink ({} -> {})", dev[0].0, r8))?;
        parts.push(format!("({h}, {y}): {:.6} -> {:.6}", dev[0].0, r8));
    }
    Ok(parts.join("; "))
}

fn regime_tables() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (name, grid) in default_regime_grids() {
        let mut ratios = Vec::new();
        for &(h, y) in &grid {
            let p = predict(h, y).map_err(|e| e.to_string())?;
            let m = to_f64(&main_term_corr_with(h, &primes_up_to(y)));
            ratios.push(m / p.predicted);
        }
        let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
        parts.push(format!("{name} [{}]", shown.join(", ")));
        if grid.len() < 3 {
            failures.push(format!("{name} has fewer than 3 points"));
        }
        if let Some(r) = ratios.iter().find(|r| !(0.5..=2.0).contains(*r)) {
            failures.push(format!("{name} ratio {r:.4} outside [0.5, 2]"));
        }
        if ratios.windows(2).any(|w| (w[1] - 1.0).abs() >= (w[0] - 1.0).abs()) {
            failures.push(format!("{name} does not move toward 1"));
        }
    }
    let summary = parts.join("; ");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join(", ")))
    }
}

fn friable_stack() -> Outcome {
    let t = default_table();
    let mass = t.integral(0.0, t.u_max());
    ensure((mass - EULER_GAMMA.exp()).abs() <= 1e-6, || format!("integral of rho = {mass}"))?;
    let r2 = dickman_rho(2.0).map_err(|e| e.to_string())?;
    ensure((r2 - (1.0 - 2f64.ln())).abs() <= 1e-9, || format!("rho(2) = {r2}"))?;
    let mut parts = vec![format!("mass error {:.1e}", (mass - EULER_GAMMA.exp()).abs())];
    for (x, y, tol) in [(1_000_000u64, 100u64, 0.10), (100_000_000, 1000, 0.05)] {
        let exact = psi(x, y).map_err(|e| e.to_string())? as f64;
        let est = psi_ht_estimate(x as f64, y).map_err(|e| e.to_string())?;
        let rel = est / exact - 1.0;
        ensure(rel.abs() <= tol, || format!("saddle estimate at ({x}, {y}) off by {rel:.4}"))?;
        parts.push(format!("({x}, {y}) rel {rel:+.4}"));
    }
    Ok(parts.join(", "))
}

fn saddle_consistency() -> Outcome {
    let s = saddle_alpha(1e12f64.ln(), 1000).map_err(|e| e.to_string())?;
    let gap = (1.0 - s.alpha) * 1000f64.ln() - s.xi;
    ensure(gap.abs() <= 0.2, || format!("gap {gap}"))?;
    Ok(format!("alpha = {:.6}, xi = {:.6}, gap = {gap:+.4}", s.alpha, s.xi))
}

fn sieve_correlations() -> Outcome {
    let x = 10_000_000u64;
    let offsets: [&[u64]; 6] = [&[0], &[0, 2], &[0, 6], &[0, 2, 6], &[0, 4, 6], &[0, 30, 60]];
    let mut worst = 0.0f64;
    let mut tested = 0;
    for y in [2u64, 3, 5, 7, 11, 13] {
        for h in offsets {
            let sp = singular_product(h, y).map_err(|e| e.to_string())?;
            if to_f64(&sp) == 0.0 {
                continue;
            }
            let count = correlation_sum(0, x, h, y).map_err(|e| e.to_string())?;
            let dev = (count as f64 / (x as f64 * to_f64(&sp)) - 1.0).abs();
            worst = worst.max(dev);
            tested += 1;
            ensure(dev <= 0.05, || format!("y = {y}, h = {h:?}: deviation {dev}"))?;
        }
    }
    Ok(format!("{tested} offset tuples, worst deviation {worst:.2e}"))
}

fn performance() -> Outcome {
    let (x, h, y) = (100_000_000u64, 100u64, 13u64);
    let t1 = Instant::now();
    let one = variance_exact_threads(x, h, y, 1).map_err(|e| e.to_string())?;
    let serial = t1.elapsed().as_secs_f64();
    let t8 = Instant::now();
    let eight = variance_exact_threads(x, h, y, 8).map_err(|e| e.to_string())?;
    let parallel = t8.elapsed().as_secs_f64();
    let speedup = serial / parallel;
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let detail = format!("1 worker {serial:.2} s, 8 workers {parallel:.2} s, speedup {speedup:.2}x on {cores} core(s)");
    ensure(one == eight, || format!("outputs differ; {detail}"))?;
    ensure(serial <= 60.0, || format!("too slow; {detail}"))?;
    ensure(speedup >= 4.0, || format!("speedup below 4x; {detail}"))?;
    Ok(detail)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("primorial identity", primorial_identity),
        ("hand-checkable anchor", hand_anchor),
        ("Bernoulli anchor", bernoulli_anchor),
        ("Perron identities", perron_identities),
        ("desk-scale convergence", desk_convergence),
        ("regime tables", regime_tables),
        ("friable stack", friable_stack),
        ("saddle consistency", saddle_consistency),
        ("sieve correlations", sieve_correlations),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
