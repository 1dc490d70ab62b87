//! Cross-module consistency properties: the three entropy routes agree
//! where they coexist, per-orbit estimates distribute normally, the
//! planar pushforward preserves rectangle masses, and the endpoint
//! expansions follow their periodic patterns.

use alphacf::density::{closed_form_density, rohlin_entropy};
use alphacf::entropy::{ensemble_entropy, exact_entropy};
use alphacf::maps::AlphaContext;
use alphacf::natext::{beta_xi, extension_step, sample_invariant, NatExtDomain};
use alphacf::rng::SplitMix64;
use alphacf::symbolic::{expand_by_excess, ByExcessToken};

#[test]
fn entropy_routes_agree_where_defined() {
    for &alpha in &[0.45, 0.5, 0.7, 0.9] {
        let exact = exact_entropy(alpha).unwrap();
        let ctx = AlphaContext::new(alpha).unwrap();
        let est = ensemble_entropy(&ctx, 10_000, 10_000, 0xA1FA).unwrap();
        assert!(
            (est.mean - exact).abs() < 4.0 * est.stderr,
            "alpha={alpha}: ensemble {} vs exact {} (stderr {})",
            est.mean,
            exact,
            est.stderr
        );
        let d = closed_form_density(alpha).unwrap();
        let h = rohlin_entropy(&d).unwrap();
        assert!((h - exact).abs() < 1e-6, "alpha={alpha}: quadrature {h} vs exact {exact}");
    }
}

#[test]
fn per_orbit_values_look_normal() {
    // skewness and excess kurtosis of the per-orbit estimates stay small
    let ctx = AlphaContext::new(0.5).unwrap();
    let n = 1000;
    let big_n = 10_000u64;
    let (lo, hi) = ctx.interval();
    let mut values = Vec::with_capacity(big_n as usize);
    for k in 0..big_n {
        let mut rng = SplitMix64::stream(17, k);
        loop {
            let x0 = rng.uniform(lo, hi);
            if x0 == 0.0 {
                continue;
            }
            match alphacf::entropy::birkhoff_entropy(&ctx, n, x0) {
                Ok(v) => {
                    values.push(v);
                    break;
                }
                Err(_) => continue,
            }
        }
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let central = |p: i32| {
        values.iter().map(|v| (v - m).powi(p)).sum::<f64>() / values.len() as f64
    };
    let sd = central(2).sqrt();
    let skew = central(3) / sd.powi(3);
    let kurt = central(4) / sd.powi(4) - 3.0;
    assert!(values.iter().all(|v| *v > 0.0), "every estimate positive");
    assert!(skew.abs() < 0.2, "skewness {skew}");
    assert!(kurt.abs() < 0.5, "excess kurtosis {kurt}");
}

#[test]
fn pushforward_preserves_rectangle_mass() {
    // fraction of a pushed invariant sample inside a rectangle matches
    // the rectangle's invariant mass within 3 binomial standard errors
    let r = 3;
    let domain = NatExtDomain::build(r, 10);
    let ctx = AlphaContext::new(1.0 / r as f64).unwrap();
    let count = 50_000;
    let pts = sample_invariant(&domain, count, 29, 0).unwrap();
    let pushed: Vec<(f64, f64)> = pts
        .iter()
        .filter_map(|&(x, y)| extension_step(&ctx, x, y).ok())
        .collect();
    let mut rng = SplitMix64::new(31);
    let mut tested = 0;
    while tested < 12 {
        let x1 = rng.uniform(-2.0 / 3.0, 1.0 / 3.0);
        let x2 = rng.uniform(-2.0 / 3.0, 1.0 / 3.0);
        let y1 = rng.uniform(0.0, 0.75);
        let y2 = rng.uniform(0.0, 0.75);
        let (x1, x2) = (x1.min(x2), x1.max(x2));
        let (y1, y2) = (y1.min(y2), y1.max(y2));
        let mass = domain.mass_in_rect(x1, x2, y1, y2);
        if mass < 0.02 {
            continue;
        }
        let inside = pushed
            .iter()
            .filter(|p| p.0 >= x1 && p.0 <= x2 && p.1 >= y1 && p.1 <= y2)
            .count() as f64
            / pushed.len() as f64;
        let se = (mass * (1.0 - mass) / pushed.len() as f64).sqrt();
        assert!(
            (inside - mass).abs() < 3.0 * se + 2e-3,
            "rect ({x1},{x2})x({y1},{y2}): sampled {inside} vs mass {mass} (se {se})"
        );
        tested += 1;
    }
}

#[test]
fn one_minus_beta_expansion_pattern() {
    // 1 - beta opens with a run of r-1 twos then 3, followed by the
    // periodic block (r-2 twos, 3)
    for r in [3u32, 4, 5] {
        let (beta, _) = beta_xi(r);
        let seq = expand_by_excess(1.0 - beta, 20).unwrap();
        let toks = &seq.tokens;
        assert_eq!(toks[0], ByExcessToken::Run2(r - 1), "r={r}: leading run");
        assert_eq!(toks[1], ByExcessToken::Big(3), "r={r}: first 3");
        // periodic continuation
        for (i, t) in toks[2..toks.len() - 1].iter().enumerate() {
            if r == 3 {
                // alternating 2, 3
                if i % 2 == 0 {
                    assert_eq!(*t, ByExcessToken::Run2(1), "r=3 tok {i}");
                } else {
                    assert_eq!(*t, ByExcessToken::Big(3), "r=3 tok {i}");
                }
            } else if i % 2 == 0 {
                assert_eq!(*t, ByExcessToken::Run2(r - 2), "r={r} tok {i}");
            } else {
                assert_eq!(*t, ByExcessToken::Big(3), "r={r} tok {i}");
            }
        }
    }
}

#[test]
fn one_minus_xi_expansion_pattern() {
    // 1 - xi is purely periodic: (r-2 twos, 3) repeating
    for r in [3u32, 4, 5] {
        let (_, xi) = beta_xi(r);
        let seq = expand_by_excess(1.0 - xi, 18).unwrap();
        for (i, t) in seq.tokens[..seq.tokens.len() - 1].iter().enumerate() {
            if i % 2 == 0 {
                assert_eq!(*t, ByExcessToken::Run2(r - 2), "r={r} tok {i}");
            } else {
                assert_eq!(*t, ByExcessToken::Big(3), "r={r} tok {i}");
            }
        }
    }
}
