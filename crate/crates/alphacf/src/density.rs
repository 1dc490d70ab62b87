//! Invariant densities three ways: Ulam discretisation of the transfer
//! operator, the closed forms available for `alpha >= sqrt(2) - 1`, and
//! the series form at `alpha = 1/r` coming from the planar extension.

use crate::error::{Error, Result};
use crate::maps::{golden_big, sqrt2_minus_1, AlphaContext, Digit, Sign};
use crate::natext;
use crate::quad::integrate_with_breakpoints;

/// Common interface over the density representations.
pub trait Density {
    /// Interval the density lives on.
    fn support(&self) -> (f64, f64);
    /// Pointwise value.
    fn eval(&self, x: f64) -> f64;
    /// Interior discontinuities and kinks, for quadrature splitting.
    fn breakpoints(&self) -> Vec<f64>;

    fn total_mass(&self) -> f64 {
        let (lo, hi) = self.support();
        integrate_with_breakpoints(|x| self.eval(x), lo, hi, &self.breakpoints(), 1e-10)
            .unwrap_or(f64::NAN)
    }
}

// ---------------------------------------------------------------------
// Piecewise-constant (Ulam) densities
// ---------------------------------------------------------------------

/// Histogram density on uniform bins over `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct PiecewiseConstantDensity {
    pub lo: f64,
    pub hi: f64,
    pub weights: Vec<f64>,
}

impl PiecewiseConstantDensity {
    pub fn bin_count(&self) -> usize {
        self.weights.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.weights.len() as f64
    }
}

impl Density for PiecewiseConstantDensity {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let n = self.weights.len();
        let i = (((x - self.lo) / (self.hi - self.lo)) * n as f64) as usize;
        self.weights[i.min(n - 1)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        let n = self.weights.len();
        (1..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }
}

/// Row-stochastic Ulam matrix: entry `(i, t)` is the fraction of bin `i`
/// carried into bin `t` by one step of the map, assembled from the
/// monotone-branch preimages rather than by trajectory sampling.
pub struct UlamMatrix {
    bins: usize,
    lo: f64,
    rows: Vec<f64>, // bins x bins, row-major
}

impl UlamMatrix {
    pub fn new(ctx: &AlphaContext, bins: usize) -> Result<UlamMatrix> {
        assert!(bins >= 16, "Ulam discretisation needs at least 16 bins");
        let alpha = ctx.alpha();
        if alpha <= 0.0 {
            return Err(Error::UnsupportedAlpha { alpha });
        }
        let (lo, hi) = ctx.interval();
        let w = (hi - lo) / bins as f64;
        let mut rows = vec![0.0f64; bins * bins];
        // enumerate branches exactly up to j_cut; the leftover cylinders
        // hug 0 and are spread uniformly (they map onto the full
        // interval with nearly flat image density)
        let j_cut = (2 * bins).max(1024) as u64;
        let bin_of = |x: f64| -> usize {
            (((x - lo) / (hi - lo) * bins as f64) as isize).clamp(0, bins as isize - 1) as usize
        };
        for sign in [Sign::Plus, Sign::Minus] {
            let j_start = match sign {
                Sign::Plus => match ctx.j_min() {
                    Some(j) => j,
                    None => continue,
                },
                Sign::Minus => {
                    if alpha >= 1.0 {
                        continue; // no negative side at the Gauss map
                    }
                    // smallest digit with a nonempty negative cylinder
                    let t = 1.0 / (1.0 - alpha) - alpha;
                    (t.floor() as u64 + 1).max(2)
                }
            };
            for j in j_start..=j_cut.max(j_start) {
                let d = Digit { j, sign };
                let Some((clo, chi)) = ctx.cylinder_rank1(d) else {
                    continue;
                };
                let ya = ctx.branch_apply(d, clo);
                let yb = ctx.branch_apply(d, chi);
                let (ylo, yhi) = (ya.min(yb).max(lo), ya.max(yb).min(hi));
                if yhi <= ylo {
                    continue;
                }
                let t0 = bin_of(ylo + 1e-15);
                let t1 = bin_of(yhi - 1e-15);
                let jf = j as f64;
                for t in t0..=t1 {
                    let e0 = (lo + t as f64 * w).max(ylo);
                    let e1 = (lo + (t + 1) as f64 * w).min(yhi);
                    if e1 <= e0 {
                        continue;
                    }
                    // preimage of [e0, e1] under this branch
                    let p0 = 1.0 / (jf + e0);
                    let p1 = 1.0 / (jf + e1);
                    let (mut plo, mut phi) = match sign {
                        Sign::Plus => (p1, p0),
                        Sign::Minus => (-p0, -p1),
                    };
                    plo = plo.max(clo);
                    phi = phi.min(chi);
                    if phi <= plo {
                        continue;
                    }
                    let s0 = bin_of(plo + 1e-300);
                    let s1 = bin_of(phi - 1e-300);
                    for s in s0..=s1 {
                        let b0 = (lo + s as f64 * w).max(plo);
                        let b1 = (lo + (s + 1) as f64 * w).min(phi);
                        if b1 > b0 {
                            rows[s * bins + t] += (b1 - b0) / w;
                        }
                    }
                }
            }
            // tail: branches beyond j_cut live in (0, 1/(j_cut + alpha))
            let tail_hi = 1.0 / (j_cut as f64 + alpha);
            let (tlo, thi) = match sign {
                Sign::Plus => (0.0f64.max(lo), tail_hi.min(hi)),
                Sign::Minus => ((-tail_hi).max(lo), 0.0f64.min(hi)),
            };
            if thi > tlo {
                let s0 = bin_of(tlo + 1e-300);
                let s1 = bin_of(thi - 1e-300);
                for s in s0..=s1 {
                    let b0 = (lo + s as f64 * w).max(tlo);
                    let b1 = (lo + (s + 1) as f64 * w).min(thi);
                    if b1 > b0 {
                        let mass = (b1 - b0) / w; // spread uniformly over targets
                        let share = mass / bins as f64;
                        for t in 0..bins {
                            rows[s * bins + t] += share;
                        }
                    }
                }
            }
        }
        // row-normalise; zero rows (possible only through rounding) get
        // the uniform distribution
        for i in 0..bins {
            let row = &mut rows[i * bins..(i + 1) * bins];
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                for v in row.iter_mut() {
                    *v /= sum;
                }
            } else {
                for v in row.iter_mut() {
                    *v = 1.0 / bins as f64;
                }
            }
        }
        Ok(UlamMatrix { bins, lo, rows })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Push a mass vector through one step of the discretised operator.
    pub fn push(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.bins);
        let mut out = vec![0.0f64; self.bins];
        for i in 0..self.bins {
            let m = mu[i];
            if m == 0.0 {
                continue;
            }
            let row = &self.rows[i * self.bins..(i + 1) * self.bins];
            for (o, r) in out.iter_mut().zip(row) {
                *o += m * r;
            }
        }
        out
    }

    fn lo(&self) -> f64 {
        self.lo
    }
}

/// Outcome of the Ulam fixed-point iteration.
#[derive(Clone, Debug)]
pub struct UlamResult {
    pub density: PiecewiseConstantDensity,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Invariant density by power iteration of the Ulam matrix from the
/// uniform vector, stopping when the L1 change drops below `tol`.
/// A failure to converge is reported in the flags, not as an error.
pub fn ulam_density(
    ctx: &AlphaContext,
    bins: usize,
    max_iters: usize,
    tol: f64,
) -> Result<UlamResult> {
    let matrix = UlamMatrix::new(ctx, bins)?;
    let mut mu = vec![1.0 / bins as f64; bins];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters {
        let nu = matrix.push(&mu);
        residual = mu.iter().zip(&nu).map(|(a, b)| (a - b).abs()).sum();
        mu = nu;
        iterations += 1;
        if residual < tol {
            break;
        }
    }
    let total: f64 = mu.iter().sum();
    let w = 1.0 / bins as f64;
    let weights = mu.iter().map(|m| m / total / w).collect();
    Ok(UlamResult {
        density: PiecewiseConstantDensity { lo: matrix.lo(), hi: matrix.lo() + 1.0, weights },
        iterations,
        residual,
        converged: residual < tol,
    })
}

// ---------------------------------------------------------------------
// Piecewise fractional densities
// ---------------------------------------------------------------------

/// One `sign/(x + shift)` term.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct FractionalTerm {
    pub sign: f64,
    pub shift: f64,
}

/// A segment of the support carrying a sum of fractional terms.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DensitySegment {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<FractionalTerm>,
}

/// Density of the form `sum_k sign_k / (x + d_k)` per segment, divided
/// by a normalisation constant.
#[derive(Clone, Debug)]
pub struct PiecewiseFractionalDensity {
    pub segments: Vec<DensitySegment>,
    pub norm_constant: f64,
}

impl PiecewiseFractionalDensity {
    /// Analytic mass of one segment before normalisation.
    fn segment_mass(seg: &DensitySegment) -> f64 {
        seg.terms
            .iter()
            .map(|t| t.sign * ((seg.hi + t.shift) / (seg.lo + t.shift)).ln())
            .sum()
    }

    /// Analytic total mass before normalisation.
    pub fn raw_mass(&self) -> f64 {
        self.segments.iter().map(Self::segment_mass).sum()
    }

    /// Rescale so the density integrates to exactly 1.
    pub fn normalise(&mut self) {
        self.norm_constant = self.raw_mass();
    }

    pub fn term_count(&self) -> usize {
        self.segments.iter().map(|s| s.terms.len()).sum()
    }

    /// Normalised mass of `[a, b]`, in closed form.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let mut m = 0.0;
        for seg in &self.segments {
            let (lo, hi) = (seg.lo.max(a), seg.hi.min(b));
            if hi <= lo {
                continue;
            }
            m += seg
                .terms
                .iter()
                .map(|t| t.sign * ((hi + t.shift) / (lo + t.shift)).ln())
                .sum::<f64>();
        }
        m / self.norm_constant
    }
}

impl Density for PiecewiseFractionalDensity {
    fn support(&self) -> (f64, f64) {
        (
            self.segments.first().map_or(0.0, |s| s.lo),
            self.segments.last().map_or(0.0, |s| s.hi),
        )
    }

    fn eval(&self, x: f64) -> f64 {
        let seg = self
            .segments
            .iter()
            .find(|s| x >= s.lo && x <= s.hi)
            .or_else(|| self.segments.last());
        let Some(seg) = seg else { return 0.0 };
        let sum: f64 = seg.terms.iter().map(|t| t.sign / (x + t.shift)).sum();
        sum / self.norm_constant
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.lo).collect()
    }
}

/// Exact invariant density for `alpha` in `[sqrt(2)-1, 1]`. The three
/// parameter windows have two- or three-piece forms with shifts built
/// from the golden ratio.
pub fn closed_form_density(alpha: f64) -> Result<PiecewiseFractionalDensity> {
    let g = golden_big() - 1.0;
    let gg = golden_big();
    if alpha < sqrt2_minus_1() - 1e-12 || alpha > 1.0 {
        return Err(Error::UnsupportedAlpha { alpha });
    }
    let lo = alpha - 1.0;
    let term = |sign: f64, shift: f64| FractionalTerm { sign, shift };
    let mut segments: Vec<DensitySegment> = Vec::new();
    let mut push = |slo: f64, shi: f64, terms: Vec<FractionalTerm>| {
        if shi - slo > 1e-15 {
            segments.push(DensitySegment { lo: slo, hi: shi, terms });
        }
    };
    let norm;
    if alpha > g {
        // two pieces, break at (1-alpha)/alpha
        let b = (1.0 - alpha) / alpha;
        push(lo, b, vec![term(1.0, 2.0)]);
        push(b, alpha, vec![term(1.0, 1.0)]);
        norm = (1.0 + alpha).ln();
    } else if alpha > 0.5 {
        // three pieces, breaks at (1-2a)/a < 0 < (2a-1)/(1-a)
        let b1 = (1.0 - 2.0 * alpha) / alpha;
        let b2 = (2.0 * alpha - 1.0) / (1.0 - alpha);
        push(lo, b1, vec![term(1.0, gg + 1.0)]);
        push(b1, b2, vec![term(1.0, 2.0)]);
        push(b2, alpha, vec![term(1.0, gg)]);
        norm = gg.ln();
    } else {
        // sqrt(2)-1 <= alpha <= 1/2: breaks at (2a-1)/(1-a) <= 0 <= (1-2a)/a
        let b1 = (2.0 * alpha - 1.0) / (1.0 - alpha);
        let b2 = (1.0 - 2.0 * alpha) / alpha;
        push(lo, b1, vec![term(1.0, gg + 1.0)]);
        push(b1, b2, vec![term(1.0, gg + 1.0), term(1.0, gg), term(-1.0, 2.0)]);
        push(b2, alpha, vec![term(1.0, gg)]);
        norm = gg.ln();
    }
    Ok(PiecewiseFractionalDensity { segments, norm_constant: norm })
}

/// Series density at `alpha = 1/r` from the planar extension: each
/// strip carries a leading term for its fibre height minus one term
/// pair per excluded interval. Truncation error shrinks with `depth`.
pub fn series_density_one_over_r(r: u32, depth: u32) -> PiecewiseFractionalDensity {
    series_density_with_prune(r, depth, 1e-10)
}

/// As [`series_density_one_over_r`] with an explicit width floor below
/// which excluded intervals are dropped from the term list.
pub fn series_density_with_prune(r: u32, depth: u32, prune: f64) -> PiecewiseFractionalDensity {
    assert!(r >= 3);
    let sets = natext::build_b_sets(r, depth, prune);
    let tops = natext::strip_tops(r);
    let mut segments = Vec::new();
    let mut add_strip = |xlo: f64, xhi: f64, top: f64, excl: &natext::IntervalSet| {
        let mut terms = vec![FractionalTerm { sign: 1.0, shift: 1.0 / top }];
        for &(a, b) in excl.intervals() {
            let (a, b) = (a.max(0.0), b.min(top));
            if b - a < prune {
                continue;
            }
            terms.push(FractionalTerm { sign: -1.0, shift: 1.0 / b });
            terms.push(FractionalTerm { sign: 1.0, shift: 1.0 / a });
        }
        segments.push(DensitySegment { lo: xlo, hi: xhi, terms });
    };
    // strips left to right: i = r-1 down to 1, then the positive strip
    for i in (1..r).rev() {
        let xlo = -(i as f64) / (i as f64 + 1.0);
        let xhi = -(i as f64 - 1.0) / i as f64;
        let excl = if i == 1 { &sets.minus } else { &sets.inner[(i - 2) as usize] };
        add_strip(xlo, xhi, tops[(i - 1) as usize], excl);
    }
    let (beta, _) = natext::beta_xi(r);
    add_strip(0.0, 1.0 / r as f64, 1.0 - beta, &sets.plus);
    let mut d = PiecewiseFractionalDensity { segments, norm_constant: 1.0 };
    d.normalise();
    d
}

// ---------------------------------------------------------------------
// Comparison and entropy functionals
// ---------------------------------------------------------------------

/// L1 distance by midpoint sampling on `quad_points` subintervals of
/// the common support.
pub fn l1_distance<A: Density + ?Sized, B: Density + ?Sized>(
    d1: &A,
    d2: &B,
    quad_points: usize,
) -> f64 {
    let (lo1, hi1) = d1.support();
    let (lo2, hi2) = d2.support();
    debug_assert!((lo1 - lo2).abs() < 1e-9 && (hi1 - hi2).abs() < 1e-9);
    let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
    let n = quad_points.max(2);
    let w = (hi - lo) / n as f64;
    let mut total = 0.0;
    for k in 0..n {
        let x = lo + (k as f64 + 0.5) * w;
        total += (d1.eval(x) - d2.eval(x)).abs();
    }
    total * w
}

/// Metric entropy via the log-derivative average
/// `2 * integral of |log|x||` against the density. The integrand has an
/// integrable singularity at 0 which the splitting isolates.
pub fn rohlin_entropy<D: Density + ?Sized>(d: &D) -> Result<f64> {
    let (lo, hi) = d.support();
    let mut cuts = d.breakpoints();
    cuts.push(0.0);
    let v = integrate_with_breakpoints(
        |x| -2.0 * x.abs().ln() * d.eval(x),
        lo,
        hi,
        &cuts,
        1e-9,
    )?;
    Ok(v)
}
