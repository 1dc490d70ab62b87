//! Metric entropy: the exact closed form where it exists, Birkhoff
//! estimators elsewhere, and the scanning drivers used to map the
//! entropy as a function of the parameter.
//!
//! The single-orbit estimator is
//!
//! ```text
//! h(alpha, n, x) = -(2/n) * sum_{j<n} log |T_alpha^j(x)|
//! ```
//!
//! whose ensemble average over uniform initial points converges to the
//! entropy for almost every draw. All sampling is deterministic given
//! the seed and independent of thread count: orbit `k` draws from the
//! stream `(seed, k)` and the reduction runs in index order.

use crate::error::{Error, Result};
use crate::maps::{golden_big, golden_small, sqrt2_minus_1, AlphaContext};
use crate::rng::SplitMix64;
use rayon::prelude::*;

/// Exact entropy where the invariant density is known in closed form:
/// `pi^2 / (6 log(1+alpha))` above the golden mean, the constant
/// `pi^2 / (6 log G)` on `[sqrt(2)-1, g]`, and unknown below.
pub fn exact_entropy(alpha: f64) -> Option<f64> {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    if alpha > golden_small() {
        Some(pi2 / (6.0 * (1.0 + alpha).ln()))
    } else if alpha >= sqrt2_minus_1() - 1e-12 {
        Some(pi2 / (6.0 * golden_big().ln()))
    } else {
        None
    }
}

#[inline]
fn step_raw(alpha: f64, x: f64) -> f64 {
    let u = (1.0 / x).abs();
    u - (u + 1.0 - alpha).floor()
}

/// Single-orbit Birkhoff estimate over `n` iterates starting at `x0`.
pub fn birkhoff_entropy(ctx: &AlphaContext, n: usize, x0: f64) -> Result<f64> {
    assert!(n >= 1);
    let alpha = ctx.alpha();
    if alpha <= 0.0 {
        return Err(Error::UnsupportedAlpha { alpha });
    }
    let (lo, hi) = ctx.interval();
    if x0 <= lo || x0 >= hi || x0 == 0.0 {
        return Err(Error::OutOfDomain { value: x0, lo, hi });
    }
    let mut x = x0;
    let mut sum = 0.0;
    for step in 0..n {
        if x == 0.0 {
            return Err(Error::OrbitHitZero { steps: step });
        }
        sum += x.abs().ln();
        x = step_raw(alpha, x);
    }
    Ok(-2.0 * sum / n as f64)
}

/// Ensemble Birkhoff estimate.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EntropyEstimate {
    pub alpha: f64,
    pub n: usize,
    pub ensemble: usize,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
    pub seed: u64,
    pub discarded: u64,
}

fn one_orbit(alpha: f64, lo: f64, hi: f64, n: usize, seed: u64, k: u64) -> (f64, u64) {
    let mut rng = SplitMix64::stream(seed, k);
    let mut discarded = 0u64;
    'resample: loop {
        let x0 = rng.uniform(lo, hi);
        if x0 == 0.0 || x0 <= lo || x0 >= hi {
            discarded += 1;
            continue;
        }
        let mut x = x0;
        let mut sum = 0.0;
        for _ in 0..n {
            if x == 0.0 {
                discarded += 1;
                continue 'resample;
            }
            sum += x.abs().ln();
            x = step_raw(alpha, x);
        }
        return (-2.0 * sum / n as f64, discarded);
    }
}

/// Average of `ensemble` single-orbit estimates from seeded uniform
/// initial conditions. Orbits that land exactly on 0 are resampled from
/// the same per-orbit stream and counted in `discarded`.
pub fn ensemble_entropy(
    ctx: &AlphaContext,
    n: usize,
    ensemble: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    assert!(n >= 1 && ensemble >= 2);
    let alpha = ctx.alpha();
    if alpha <= 0.0 {
        return Err(Error::UnsupportedAlpha { alpha });
    }
    let (lo, hi) = ctx.interval();
    let values: Vec<(f64, u64)> = (0..ensemble as u64)
        .into_par_iter()
        .map(|k| one_orbit(alpha, lo, hi, n, seed, k))
        .collect();
    // reduce sequentially in index order so results do not depend on
    // the parallel schedule
    let mut sum = 0.0;
    let mut discarded = 0u64;
    for &(v, d) in &values {
        sum += v;
        discarded += d;
    }
    let mean = sum / ensemble as f64;
    let mut ss = 0.0;
    for &(v, _) in &values {
        ss += (v - mean) * (v - mean);
    }
    let stddev = (ss / (ensemble as f64 - 1.0)).sqrt();
    Ok(EntropyEstimate {
        alpha,
        n,
        ensemble,
        mean,
        stddev,
        stderr: stddev / (ensemble as f64).sqrt(),
        seed,
        discarded,
    })
}

/// Per-orbit standard deviations across a list of orbit lengths, with
/// the least-squares slope of `log sigma` against `log n`.
#[derive(Clone, Debug)]
pub struct StdDevScan {
    pub rows: Vec<(usize, f64)>,
    pub slope: f64,
}

pub fn stddev_scan(
    ctx: &AlphaContext,
    n_values: &[usize],
    ensemble: usize,
    seed: u64,
) -> Result<StdDevScan> {
    assert!(n_values.len() >= 3, "need at least three orbit lengths to fit");
    assert!(n_values.windows(2).all(|w| w[0] < w[1]), "orbit lengths must ascend");
    let mut rows = Vec::with_capacity(n_values.len());
    for (i, &n) in n_values.iter().enumerate() {
        let est = ensemble_entropy(ctx, n, ensemble, seed.wrapping_add(i as u64))?;
        rows.push((n, est.stddev));
    }
    // least squares on (log n, log sigma)
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|&(n, s)| ((n as f64).ln(), s.ln())).collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok(StdDevScan { rows, slope })
}

/// One row of an entropy scan over the parameter.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub n: usize,
    pub ensemble: usize,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
    pub exact: Option<f64>,
    pub seed: u64,
    pub discarded: u64,
}

/// Ensemble estimates at `steps` uniformly spaced parameter values.
/// Each row draws from a seed derived from `(seed, row index)`, so a
/// scan can be reproduced row by row.
pub fn entropy_scan(
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    n: usize,
    ensemble: usize,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    assert!(steps >= 1);
    if !(0.0 < alpha_lo && alpha_lo <= alpha_hi && alpha_hi <= 1.0) {
        return Err(Error::OutOfDomain { value: alpha_lo, lo: 0.0, hi: 1.0 });
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let alpha = if steps == 1 {
            alpha_lo
        } else {
            alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (steps - 1) as f64
        };
        let row_seed = SplitMix64::stream(seed, i as u64).next_u64();
        let ctx = AlphaContext::new(alpha)?;
        let est = ensemble_entropy(&ctx, n, ensemble, row_seed)?;
        rows.push(ScanRow {
            alpha,
            n,
            ensemble,
            mean: est.mean,
            stddev: est.stddev,
            stderr: est.stderr,
            exact: exact_entropy(alpha),
            seed: row_seed,
            discarded: est.discarded,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        // the printed nine-digit value at the nearest-integer map
        let h = exact_entropy(0.5).unwrap();
        assert_eq!(format!("{h:.9}"), "3.418315971");
        let h8 = exact_entropy(0.8).unwrap();
        assert!((h8 - 2.798522).abs() < 1e-6);
        let h1 = exact_entropy(1.0).unwrap();
        assert!((h1 - 2.3731382).abs() < 1e-7);
        assert!(exact_entropy(0.3).is_none());
        // constant on the middle window
        assert_eq!(exact_entropy(0.42), exact_entropy(0.6));
    }

    #[test]
    fn birkhoff_at_fixed_points() {
        // golden fixed point of the Gauss map: T(g) = 1/g - 1 = g
        let ctx = AlphaContext::new(1.0).unwrap();
        let g = golden_small();
        let h = birkhoff_entropy(&ctx, 10, g).unwrap();
        assert!((h - 2.0 * golden_big().ln()).abs() < 1e-9);
        // fixed point of the digit-2 branch: [0; 2,2,...] = sqrt(2)-1
        let s = std::f64::consts::SQRT_2 - 1.0;
        let h = birkhoff_entropy(&ctx, 10, s).unwrap();
        assert!((h + 2.0 * s.ln()).abs() < 1e-7);
    }

    #[test]
    fn birkhoff_positive_and_near_exact() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let mut rng = SplitMix64::new(2);
        for _ in 0..5 {
            let x0 = rng.uniform(-0.5, 0.5);
            let h = birkhoff_entropy(&ctx, 20_000, x0).unwrap();
            assert!(h > 0.0);
            assert!((h - 3.4183).abs() < 0.2, "h = {h}");
        }
    }

    #[test]
    fn ensemble_smoke_case() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let est = ensemble_entropy(&ctx, 1, 2, 1).unwrap();
        assert!(est.mean.is_finite());
        assert_eq!(est.ensemble, 2);
    }

    #[test]
    fn ensemble_close_to_exact_at_half() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let est = ensemble_entropy(&ctx, 2000, 2000, 0xA1FA).unwrap();
        assert!((est.mean - 3.418315971).abs() < 0.05, "mean {}", est.mean);
        assert!(est.stddev > 0.0);
        assert!(est.discarded < 2);
    }

    #[test]
    fn ensemble_is_deterministic() {
        let ctx = AlphaContext::new(0.33).unwrap();
        let a = ensemble_entropy(&ctx, 500, 500, 7).unwrap();
        let b = ensemble_entropy(&ctx, 500, 500, 7).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stddev.to_bits(), b.stddev.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let c = pool.install(|| ensemble_entropy(&ctx, 500, 500, 7).unwrap());
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn entropy_rejects_alpha_zero() {
        let ctx = AlphaContext::new(0.0).unwrap();
        assert!(ensemble_entropy(&ctx, 10, 10, 1).is_err());
        assert!(birkhoff_entropy(&ctx, 10, -0.5).is_err());
    }

    #[test]
    fn stddev_roughly_inverse_sqrt() {
        let ctx = AlphaContext::new(0.5).unwrap();
        let scan = stddev_scan(&ctx, &[500, 2000, 8000], 60, 3).unwrap();
        assert!(
            (-0.75..=-0.25).contains(&scan.slope),
            "slope {} out of the loose bracket",
            scan.slope
        );
        // doubling the ensemble leaves per-orbit spread unchanged within noise
        let a = ensemble_entropy(&ctx, 1000, 400, 5).unwrap();
        let b = ensemble_entropy(&ctx, 1000, 800, 5).unwrap();
        assert!((a.stddev - b.stddev).abs() < 0.3 * a.stddev);
    }

    #[test]
    fn scan_carries_exact_where_defined() {
        let rows = entropy_scan(0.42, 0.62, 5, 200, 50, 9).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            let e = r.exact.expect("exact defined on [sqrt2-1, 1]");
            assert!((e - exact_entropy(0.5).unwrap()).abs() < 1e-9 || r.alpha > golden_small());
        }
        let rows = entropy_scan(0.2, 0.3, 3, 100, 20, 1).unwrap();
        assert!(rows.iter().all(|r| r.exact.is_none()));
    }

    #[test]
    fn single_step_scan_equals_point_estimate() {
        let rows = entropy_scan(0.5, 0.9, 1, 300, 40, 11).unwrap();
        assert_eq!(rows.len(), 1);
        let ctx = AlphaContext::new(0.5).unwrap();
        let row_seed = SplitMix64::stream(11, 0).next_u64();
        let est = ensemble_entropy(&ctx, 300, 40, row_seed).unwrap();
        assert_eq!(rows[0].mean.to_bits(), est.mean.to_bits());
    }
}
