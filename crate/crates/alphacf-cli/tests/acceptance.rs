//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured quantities. Tolerances are pinned here; the
//! invariance check computes only its *null* baseline at run time.
//!
//! Run with `cargo test -p alphacf-cli --test acceptance -- --nocapture`
//! to see every line.

use std::process::Command;
use std::time::Instant;

use alphacf::density::{
    closed_form_density, l1_distance, rohlin_entropy, series_density_one_over_r, ulam_density,
};
use alphacf::entropy::{ensemble_entropy, entropy_scan, exact_entropy, stddev_scan};
use alphacf::maps::AlphaContext;
use alphacf::natext::{
    build_exclusion_sets, check_forward_invariance, check_injectivity, check_invariance,
    complementarity_check, NatExtDomain, DEFAULT_MERGE_TOL, DEFAULT_PRUNE,
};
use alphacf::rng::SplitMix64;
use alphacf::symbolic::{
    cylinder_interval, distortion_check, eval_by_excess, is_admissible, reflect, ByExcessSeq,
    ByExcessToken, CylinderInterval, SeqClass,
};

const SEED: u64 = 0xA1FA;
const H_HALF: f64 = 3.418315971;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("{} criterion {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion}: {detail}");
}

fn runtime(criterion: &str, t0: Instant, cap_secs: f64) {
    let dt = t0.elapsed().as_secs_f64();
    report(
        &format!("{criterion} (runtime)"),
        dt < cap_secs,
        &format!("{dt:.1}s against the {cap_secs:.0}s cap"),
    );
}

#[test]
fn c01_exact_entropy_reproduction() {
    let t0 = Instant::now();
    let h = exact_entropy(0.5).unwrap();
    let printed = format!("{h:.9}");
    report("1a", printed == "3.418315971", &format!("exact_entropy(0.5) prints {printed}"));
    let mut worst: f64 = 0.0;
    for &alpha in &[0.45, 0.5, 0.55, 0.65, 0.8, 1.0] {
        let d = closed_form_density(alpha).unwrap();
        let got = rohlin_entropy(&d).unwrap();
        let want = exact_entropy(alpha).unwrap();
        worst = worst.max((got - want).abs());
    }
    report("1b", worst < 1e-6, &format!("max |quadrature - exact| = {worst:.2e} < 1e-6"));
    runtime("1", t0, 10.0);
}

#[test]
fn c02_birkhoff_reproduction_at_desk_scale() {
    let t0 = Instant::now();
    for &alpha in &[0.5, 0.42, 0.60] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let est = ensemble_entropy(&ctx, 10_000, 10_000, SEED).unwrap();
        let err = (est.mean - H_HALF).abs();
        report(
            "2",
            err < 0.01,
            &format!("ensemble mean at alpha={alpha} is {:.6}, off by {err:.2e} < 0.01", est.mean),
        );
    }
    runtime("2", t0, 120.0);
}

#[test]
fn c03_stddev_decay_slope() {
    let t0 = Instant::now();
    let ctx = AlphaContext::new(0.5).unwrap();
    let scan = stddev_scan(&ctx, &[500, 2000, 8000, 32000], 100, SEED).unwrap();
    report(
        "3",
        (-0.6..=-0.4).contains(&scan.slope),
        &format!("log sigma vs log n slope = {:.3} in [-0.6, -0.4]", scan.slope),
    );
    runtime("3", t0, 120.0);
}

#[test]
fn c04_entropy_vanishing_trend() {
    let t0 = Instant::now();
    let mut means = Vec::new();
    for &alpha in &[0.01, 0.05, 0.2] {
        let ctx = AlphaContext::new(alpha).unwrap();
        means.push(ensemble_entropy(&ctx, 10_000, 10_000, SEED).unwrap().mean);
    }
    report(
        "4",
        means[0] < means[1] && means[1] < means[2],
        &format!("h(0.01)={:.4} < h(0.05)={:.4} < h(0.2)={:.4}", means[0], means[1], means[2]),
    );
    runtime("4", t0, 180.0);
}

#[test]
fn c05_non_monotone_window() {
    let t0 = Instant::now();
    let rows = entropy_scan(0.29, 0.30, 50, 10_000, 10_000, SEED).unwrap();
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let max = means.iter().cloned().fold(f64::MIN, f64::max);
    let min = means.iter().cloned().fold(f64::MAX, f64::min);
    let mut errs: Vec<f64> = rows.iter().map(|r| r.stderr).collect();
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_stderr = errs[errs.len() / 2];
    let spread_ok = max - min > 3.0 * median_stderr;
    let increasing = means.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = means.windows(2).all(|w| w[1] <= w[0]);
    report(
        "5",
        spread_ok && !increasing && !decreasing,
        &format!(
            "spread {:.2e} > 3 x median stderr {:.2e}; monotone up/down: {}/{}",
            max - min,
            median_stderr,
            increasing,
            decreasing
        ),
    );
    runtime("5", t0, 300.0);
}

#[test]
fn c06_density_cross_validation() {
    let t0 = Instant::now();
    for &alpha in &[0.45, 0.7, 1.0] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let u = ulam_density(&ctx, 4096, 10_000, 1e-10).unwrap();
        assert!(u.converged, "Ulam iteration converged at alpha={alpha}");
        let d = closed_form_density(alpha).unwrap();
        let dist = l1_distance(&u.density, &d, 4 * 4096);
        report(
            "6",
            dist < 0.02,
            &format!("L1(ulam, closed) = {dist:.4} < 0.02 at alpha={alpha}"),
        );
    }
    let ctx = AlphaContext::new(0.2).unwrap();
    let u = ulam_density(&ctx, 4096, 10_000, 1e-10).unwrap();
    let s = series_density_one_over_r(5, 8);
    let dist = l1_distance(&u.density, &s, 2048);
    report("6", dist < 0.03, &format!("L1(ulam, series r=5 depth 8) = {dist:.4} < 0.03"));
    runtime("6", t0, 60.0);
}

#[test]
fn c07_reflection_property_suite() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(SEED);
    let mut worst: f64 = 0.0;
    for caseno in 0..500 {
        let r = 3 + (rng.next_u64() % 6) as u32;
        let class = if caseno % 2 == 0 { SeqClass::Minus } else { SeqClass::Plus };
        let seq = random_admissible(&mut rng, r, class, 10);
        let v = eval_by_excess(&seq).unwrap();
        let refl = reflect(&seq).unwrap();
        let w = eval_by_excess(&refl).unwrap();
        worst = worst.max((w - (1.0 - v)).abs());
        let swapped = if caseno % 2 == 0 { SeqClass::Plus } else { SeqClass::Minus };
        assert!(
            is_admissible(&refl.tokens, swapped, r),
            "case {caseno}: {seq} reflected to {refl}, not admissible for the swapped class"
        );
    }
    report("7a", worst < 1e-11, &format!("max |eval(reflect) - (1-eval)| = {worst:.2e} < 1e-11"));
    // the run-of-twos identity, exact to 1e-12
    let mut worst: f64 = 0.0;
    for n in 1..=10u32 {
        for &y in &[2.5, 3.0, 7.25] {
            let lhs = 1.0 - 1.0 / (n as f64 + 1.0 / (y - 1.0));
            let tokens = if n == 1 { vec![] } else { vec![ByExcessToken::Run2(n - 1)] };
            let rhs = eval_by_excess(&ByExcessSeq::new(tokens, Some(y))).unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    report("7b", worst < 1e-12, &format!("identity error {worst:.2e} < 1e-12 for n <= 10"));
    runtime("7", t0, 60.0);
}

fn random_admissible(
    rng: &mut SplitMix64,
    r: u32,
    class: SeqClass,
    max_tokens: u32,
) -> ByExcessSeq {
    let n = 1 + rng.next_u64() % max_tokens as u64;
    let mut tokens: Vec<ByExcessToken> = Vec::new();
    for i in 0..n {
        let (run_max, big_max) = match (i, class) {
            (0, SeqClass::Plus) => (r - 1, r),
            (0, SeqClass::Minus) => (r - 2, r + 1),
            (0, SeqClass::Inner(k)) => (r - 1 - k, r + 1),
            _ => (r - 2, r + 1),
        };
        let prev_run = matches!(tokens.last(), Some(ByExcessToken::Run2(_)));
        if !prev_run && run_max >= 1 && rng.next_u64() % 3 == 0 {
            tokens.push(ByExcessToken::Run2(1 + (rng.next_u64() % run_max as u64) as u32));
        } else {
            tokens.push(ByExcessToken::Big(3 + (rng.next_u64() % (big_max as u64 - 2)) as u32));
        }
    }
    let y = rng.uniform(2.0 + 1e-6, 10.0);
    ByExcessSeq::new(tokens, Some(y))
}

#[test]
fn c08_orbit_identities_at_unit_fractions() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for r in 3..=8u64 {
        let alpha = 1.0 / r as f64;
        let ctx = AlphaContext::new(alpha).unwrap();
        // T^i(alpha - 1) = -(r-i-1)/(r-i) for i = 0..r-2
        let mut x = ctx.interval().0;
        for i in 0..=(r - 2) {
            let want = -((r - i - 1) as f64) / (r - i) as f64;
            worst = worst.max((x - want).abs());
            if i < r - 2 {
                x = ctx.apply(x).unwrap();
            }
        }
        // T(alpha) = 0
        worst = worst.max(ctx.apply(alpha).unwrap().abs());
        // window index
        assert_eq!(ctx.r_digits(), Some(r - 1), "r_digits(1/{r}) = {r}-1");
        // c_j closed form against the iterated inverse branch
        let pts = ctx.c_points();
        let mut v = -1.0 / (2.0 + alpha);
        for j in 1..pts.len() - 1 {
            worst = worst.max((pts[j] - v).abs());
            v = -1.0 / (v + 2.0);
        }
    }
    report("8", worst < 1e-12, &format!("max identity error {worst:.2e} < 1e-12 over r = 3..8"));
    runtime("8", t0, 30.0);
}

#[test]
fn c09_natural_extension_suite() {
    let t0 = Instant::now();
    for r in [3u32, 4, 5] {
        let ctx = AlphaContext::new(1.0 / r as f64).unwrap();
        let sets = build_exclusion_sets(r, 12, DEFAULT_PRUNE);
        let domain = NatExtDomain::from_sets(&sets, DEFAULT_MERGE_TOL);

        let collisions = check_injectivity(&domain, &ctx, 100_000, SEED).unwrap();
        report("9", collisions == 0, &format!("r={r}: injectivity collisions = {collisions}"));

        let failures = check_forward_invariance(&domain, &ctx, 100_000, SEED).unwrap();
        report("9", failures == 0, &format!("r={r}: membership failures = {failures} of 100000"));

        let inv = check_invariance(&domain, &ctx, 100_000, 32, SEED).unwrap();
        report(
            "9",
            inv.ok,
            &format!(
                "r={r}: pushed histogram distance {:.4} against null {:.4}",
                inv.pushed_distance, inv.null_distance
            ),
        );

        let comp = complementarity_check(&sets);
        report(
            "9",
            comp.overlap_measure < 1e-6,
            &format!("r={r}: complementarity overlap {:.2e} < 1e-6", comp.overlap_measure),
        );
        report(
            "9",
            comp.covered_measure >= 0.95 * comp.target,
            &format!(
                "r={r}: covered {:.4} >= 95% of target {:.4}",
                comp.covered_measure, comp.target
            ),
        );
    }
    runtime("9", t0, 180.0);
}

#[test]
fn c10_bounded_distortion() {
    let t0 = Instant::now();
    for &alpha in &[0.3, 0.4] {
        let ctx = AlphaContext::new(alpha).unwrap();
        let mut rng = SplitMix64::new(SEED ^ alpha.to_bits());
        let mut checked = 0;
        let mut worst_margin = f64::INFINITY;
        while checked < 200 {
            let x = rng.uniform(ctx.interval().0, ctx.interval().1);
            let rank = 1 + (rng.next_u64() % 8) as usize;
            let Ok(rec) = ctx.orbit(x, rank) else { continue };
            if rec.escaped_zero || rec.digits.len() < rank {
                continue;
            }
            if cylinder_interval(&ctx, &rec.digits) == CylinderInterval::Empty {
                continue;
            }
            let chk = distortion_check(&ctx, &rec.digits, 100).unwrap();
            assert!(
                chk.ok,
                "alpha={alpha}: cylinder {:?} ratio {} exceeds bound {}",
                rec.digits, chk.ratio_sup, chk.bound
            );
            worst_margin = worst_margin.min(chk.bound / chk.ratio_sup);
            checked += 1;
        }
        report(
            "10",
            true,
            &format!("alpha={alpha}: 200 cylinders within bound (worst margin {worst_margin:.2}x)"),
        );
    }
    runtime("10", t0, 60.0);
}

#[test]
fn c11_cli_determinism_across_thread_counts() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_alphacf");
    let dir = std::env::temp_dir().join("alphacf_acceptance_c11");
    std::fs::create_dir_all(&dir).unwrap();

    // criterion 2's point estimate through the CLI
    let mut entropy_outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.join(format!("entropy_t{threads}.csv"));
        let status = Command::new(bin)
            .args([
                "--threads", threads,
                "entropy-point",
                "--alpha", "0.5",
                "--n", "10000",
                "--ensemble", "10000",
                "--seed", "41466",
                "--out", out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        entropy_outputs.push(std::fs::read(&out).unwrap());
    }
    report(
        "11",
        entropy_outputs[0] == entropy_outputs[1],
        "entropy-point CSV identical for --threads 1 and 8",
    );

    // criterion 9's domains through the CLI
    for r in ["3", "4", "5"] {
        let mut bundles = Vec::new();
        for threads in ["1", "8"] {
            let prefix = dir.join(format!("ne_r{r}_t{threads}"));
            let prefix = prefix.to_str().unwrap().to_string();
            let output = Command::new(bin)
                .args([
                    "--threads", threads,
                    "natext",
                    "--r", r,
                    "--depth", "12",
                    "--samples", "100000",
                    "--seed", "41466",
                    "--out", &prefix,
                ])
                .output()
                .unwrap();
            assert!(
                output.status.success(),
                "natext r={r} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            let mut bundle = Vec::new();
            for suffix in ["_points.csv", "_summary.json", "_checks.json"] {
                bundle.extend(std::fs::read(format!("{prefix}{suffix}")).unwrap());
            }
            bundles.push(bundle);
        }
        report(
            "11",
            bundles[0] == bundles[1],
            &format!("natext r={r} outputs identical for --threads 1 and 8"),
        );
    }
    let _ = std::fs::remove_dir_all(&dir);
    runtime("11", t0, 480.0);
}
