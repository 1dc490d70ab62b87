//! Planar natural extension at `alpha = 1/r`: the two-dimensional map
//!
//! ```text
//! (x, y) -> (T(x), 1/(k(x) + sign(x) y))
//! ```
//!
//! preserves `(1 + xy)^-2 / C` on a region built from vertical strips
//! whose fibres are intervals minus a union of excluded subintervals.
//! The excluded unions are images of a base interval under admissible
//! compositions of the by-excess inverse branches; they are truncated
//! at finite depth here, with the dropped width reported.

use crate::error::{Error, Result};
use crate::maps::{m_zero, AlphaContext};
use crate::rng::SplitMix64;
use crate::symbolic::SeqClass;

/// Default truncation width for the exclusion-set enumeration.
pub const DEFAULT_PRUNE: f64 = 1e-9;
/// Default boundary tolerance for membership answers.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------
// Interval sets
// ---------------------------------------------------------------------

/// Classification of a point against an interval set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetPosition {
    Inside,
    Outside,
    /// Within the merge tolerance of an interval endpoint.
    Boundary,
}

/// Sorted, pairwise-disjoint intervals with a boundary tolerance.
#[derive(Clone, Debug, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
    merge_tol: f64,
}

impl IntervalSet {
    /// Sort, drop empty intervals, and merge overlapping or touching
    /// ones. `merge_tol` is kept for membership queries; merging itself
    /// only fuses intervals that genuinely meet.
    pub fn from_unsorted(mut v: Vec<(f64, f64)>, merge_tol: f64) -> Self {
        v.retain(|(a, b)| b > a);
        v.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            if let Some(last) = intervals.last_mut() {
                if a <= last.1 + 1e-15 {
                    if b > last.1 {
                        last.1 = b;
                    }
                    continue;
                }
            }
            intervals.push((a, b));
        }
        IntervalSet { intervals, merge_tol }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Locate `y` relative to the set, reporting `Boundary` within
    /// `merge_tol` of any endpoint.
    pub fn locate(&self, y: f64) -> SetPosition {
        let tol = self.merge_tol;
        let idx = self.intervals.partition_point(|&(_, b)| b < y);
        for k in idx.saturating_sub(1)..(idx + 1).min(self.intervals.len()) {
            let (a, b) = self.intervals[k];
            if (y - a).abs() <= tol || (y - b).abs() <= tol {
                return SetPosition::Boundary;
            }
            if y > a && y < b {
                return SetPosition::Inside;
            }
        }
        SetPosition::Outside
    }

    /// Complement of the set within `[lo, hi]`.
    pub fn complement_within(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for &(a, b) in &self.intervals {
            if b <= lo {
                continue;
            }
            if a >= hi {
                break;
            }
            let a = a.max(lo);
            let b = b.min(hi);
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        out
    }

    /// Intersection with `[lo, hi]` as a new set.
    pub fn clipped(&self, lo: f64, hi: f64) -> IntervalSet {
        let intervals = self
            .intervals
            .iter()
            .filter_map(|&(a, b)| {
                let (a, b) = (a.max(lo), b.min(hi));
                (b > a).then_some((a, b))
            })
            .collect();
        IntervalSet { intervals, merge_tol: self.merge_tol }
    }

    /// The set `{c - y : y in self}`.
    pub fn reflected(&self, c: f64) -> IntervalSet {
        let mut intervals: Vec<(f64, f64)> =
            self.intervals.iter().rev().map(|&(a, b)| (c - b, c - a)).collect();
        intervals.retain(|(a, b)| b > a);
        IntervalSet { intervals, merge_tol: self.merge_tol }
    }

    /// Lebesgue measure of the intersection with another set.
    pub fn intersection_measure(&self, other: &IntervalSet) -> f64 {
        let (x, y) = (&self.intervals, &other.intervals);
        let (mut i, mut j, mut m) = (0usize, 0usize, 0.0);
        while i < x.len() && j < y.len() {
            let lo = x[i].0.max(y[j].0);
            let hi = x[i].1.min(y[j].1);
            if hi > lo {
                m += hi - lo;
            }
            if x[i].1 < y[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        m
    }
}

// ---------------------------------------------------------------------
// Quadratic constants and exclusion sets
// ---------------------------------------------------------------------

/// The period-(r+1) fixed point `beta` of the by-excess map and
/// `xi = 1/(r - beta)`, in cancellation-free form.
pub fn beta_xi(r: u32) -> (f64, f64) {
    assert!(r >= 3);
    let rf = r as f64;
    let disc = ((rf + 1.0) * (rf + 1.0) - 4.0).sqrt();
    let beta = 2.0 / (rf + 1.0 + disc);
    let xi = 2.0 / (rf - 1.0 + disc);
    (beta, xi)
}

/// Fibre heights of the negative strips: entry `i-1` is the `(i-1)`-th
/// by-excess image of `1 - xi`, for strips `i = 1 .. r-1`.
pub fn strip_tops(r: u32) -> Vec<f64> {
    let (_, xi) = beta_xi(r);
    let mut tops = Vec::with_capacity((r - 1) as usize);
    let mut t = 1.0 - xi;
    tops.push(t);
    for _ in 2..r {
        t = m_zero(t).expect("strip top iteration stays in (0,1)").0;
        tops.push(t);
    }
    tops
}

/// The excluded-tail unions, one per admissibility class, truncated at
/// finite depth.
#[derive(Clone, Debug)]
pub struct ExclusionSets {
    pub r: u32,
    pub depth: u32,
    pub prune: f64,
    pub plus: IntervalSet,
    pub minus: IntervalSet,
    /// `inner[i-2]` is the set for strip `i`, `i = 2 .. r-1`.
    pub inner: Vec<IntervalSet>,
    /// Interval images recorded but narrower than `prune`.
    pub dropped_count: u64,
    /// Total width of the dropped recorded images (per-sequence, before
    /// class fan-out), an upper view of the truncation bias.
    pub dropped_measure: f64,
    /// Subtrees abandoned because every descendant image fits below the
    /// prune width.
    pub pruned_subtrees: u64,
}

#[derive(Clone, Copy)]
struct Mobius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Mobius {
    const IDENTITY: Mobius = Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    /// `self` followed inside by the branch `y -> 1/(h - y)`.
    #[inline]
    fn compose_big(&self, h: f64) -> Mobius {
        Mobius { a: -self.b, b: self.a + self.b * h, c: -self.d, d: self.c + self.d * h }
    }

    /// `self` followed inside by `s` branch-2 steps (closed form).
    #[inline]
    fn compose_run(&self, s: f64) -> Mobius {
        Mobius {
            a: -self.a * (s - 1.0) - self.b * s,
            b: self.a * s + self.b * (s + 1.0),
            c: -self.c * (s - 1.0) - self.d * s,
            d: self.c * s + self.d * (s + 1.0),
        }
    }
}

struct Enumeration {
    r: u32,
    depth: u32,
    prune: f64,
    base_lo: f64,
    // per-class collection: flags index [plus, minus, inner...]
    buckets: Vec<Vec<(f64, f64)>>,
    dropped_count: u64,
    dropped_measure: f64,
    pruned_subtrees: u64,
}

impl Enumeration {
    fn dfs(&mut self, m: Mobius, depth: u32, lastrun: bool, classes: &[bool]) {
        if m.apply(1.0) - m.apply(0.0) < self.prune {
            self.pruned_subtrees += 1;
            return;
        }
        if !lastrun {
            let a = m.apply(self.base_lo);
            let b = m.apply(1.0);
            if b - a >= self.prune {
                for (k, &flag) in classes.iter().enumerate() {
                    if flag {
                        self.buckets[k].push((a, b));
                    }
                }
            } else {
                self.dropped_count += 1;
                self.dropped_measure += b - a;
            }
        }
        if depth == self.depth {
            return;
        }
        if !lastrun {
            for s in 1..=(self.r - 2) {
                self.dfs(m.compose_run(s as f64), depth + 1, true, classes);
            }
        }
        for h in 3..=(self.r + 1) {
            self.dfs(m.compose_big(h as f64), depth + 1, false, classes);
        }
    }
}

/// Enumerate the admissible branch compositions up to `depth` tokens
/// (last token a digit above 2) and collect the images of the base
/// interval `(1 - xi, 1)` into one union per class. Images narrower
/// than `prune` are dropped and reported.
pub fn build_exclusion_sets(r: u32, depth: u32, prune: f64) -> ExclusionSets {
    assert!(r >= 3 && depth >= 1);
    let (_, xi) = beta_xi(r);
    let n_classes = 2 + (r - 2) as usize;
    let mut en = Enumeration {
        r,
        depth,
        prune,
        base_lo: 1.0 - xi,
        buckets: vec![Vec::new(); n_classes],
        dropped_count: 0,
        dropped_measure: 0.0,
        pruned_subtrees: 0,
    };
    let first_flags = |is_run: bool, v: u32| -> Vec<bool> {
        let mut flags = Vec::with_capacity(n_classes);
        for class in 0..n_classes {
            let sc = match class {
                0 => SeqClass::Plus,
                1 => SeqClass::Minus,
                k => SeqClass::Inner(k as u32),
            };
            let (run_max, big_max) = match sc {
                SeqClass::Plus => (r - 1, r),
                SeqClass::Minus => (r - 2, r + 1),
                SeqClass::Inner(i) => (r - 1 - i, r + 1),
            };
            flags.push(if is_run { v <= run_max } else { v <= big_max });
        }
        flags
    };
    for s in 1..=(r - 1) {
        let flags = first_flags(true, s);
        en.dfs(Mobius::IDENTITY.compose_run(s as f64), 1, true, &flags);
    }
    for h in 3..=(r + 1) {
        let flags = first_flags(false, h);
        en.dfs(Mobius::IDENTITY.compose_big(h as f64), 1, false, &flags);
    }
    let mut buckets = en.buckets.into_iter();
    let plus = IntervalSet::from_unsorted(buckets.next().unwrap(), DEFAULT_MERGE_TOL);
    let minus = IntervalSet::from_unsorted(buckets.next().unwrap(), DEFAULT_MERGE_TOL);
    let inner =
        buckets.map(|b| IntervalSet::from_unsorted(b, DEFAULT_MERGE_TOL)).collect();
    ExclusionSets {
        r,
        depth,
        prune,
        plus,
        minus,
        inner,
        dropped_count: en.dropped_count,
        dropped_measure: en.dropped_measure,
        pruned_subtrees: en.pruned_subtrees,
    }
}

/// Alias kept for callers who know these unions by their classic name.
pub fn build_b_sets(r: u32, depth: u32, prune: f64) -> ExclusionSets {
    build_exclusion_sets(r, depth, prune)
}

// ---------------------------------------------------------------------
// The planar domain
// ---------------------------------------------------------------------

/// Mass of `(1 + xy)^-2` over an axis-aligned rectangle, in closed form.
pub fn rect_mass(x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    ((1.0 + y2 * x2) * (1.0 + y1 * x1) / ((1.0 + y1 * x2) * (1.0 + y2 * x1))).ln()
}

/// Binary-search membership of `y` in a sorted disjoint interval list,
/// counting points within `tol` of an interval as inside.
#[inline]
fn fibre_contains(kept: &[(f64, f64)], y: f64, tol: f64) -> bool {
    let idx = kept.partition_point(|&(_, b)| b < y - tol);
    idx < kept.len() && y >= kept[idx].0 - tol && y <= kept[idx].1 + tol
}

/// One vertical strip of the domain: the fibre over `[x_lo, x_hi]` is
/// the union of `kept`, the complement of the excluded set in
/// `[0, y_top]`.
#[derive(Clone, Debug)]
pub struct Strip {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_top: f64,
    pub kept: Vec<(f64, f64)>,
    pub excluded_measure: f64,
}

/// Truncated natural-extension domain for `alpha = 1/r`.
#[derive(Clone, Debug)]
pub struct NatExtDomain {
    pub r: u32,
    pub depth: u32,
    pub prune: f64,
    pub beta: f64,
    pub xi: f64,
    pub strips: Vec<Strip>,
    pub c_alpha: f64,
    pub merge_tol: f64,
    pub dropped_measure: f64,
    pub pruned_subtrees: u64,
}

impl NatExtDomain {
    pub fn build(r: u32, depth: u32) -> NatExtDomain {
        Self::build_with(r, depth, DEFAULT_PRUNE, DEFAULT_MERGE_TOL)
    }

    pub fn build_with(r: u32, depth: u32, prune: f64, merge_tol: f64) -> NatExtDomain {
        let sets = build_exclusion_sets(r, depth, prune);
        Self::from_sets(&sets, merge_tol)
    }

    /// Assemble strips from prebuilt exclusion sets.
    pub fn from_sets(sets: &ExclusionSets, merge_tol: f64) -> NatExtDomain {
        let r = sets.r;
        let (beta, xi) = beta_xi(r);
        let tops = strip_tops(r);
        let mut strips = Vec::with_capacity(r as usize);
        // negative strips, leftmost first: i = r-1 down to 1
        for i in (1..r).rev() {
            let x_lo = -(i as f64) / (i as f64 + 1.0);
            let x_hi = -(i as f64 - 1.0) / i as f64;
            let top = tops[(i - 1) as usize];
            let excl = if i == 1 { &sets.minus } else { &sets.inner[(i - 2) as usize] };
            let kept = excl.complement_within(0.0, top);
            let kept_measure: f64 = kept.iter().map(|(a, b)| b - a).sum();
            strips.push(Strip {
                x_lo,
                x_hi,
                y_top: top,
                kept,
                excluded_measure: top - kept_measure,
            });
        }
        // positive strip [0, 1/r] x [0, 1 - beta]
        let top = 1.0 - beta;
        let kept = sets.plus.complement_within(0.0, top);
        let kept_measure: f64 = kept.iter().map(|(a, b)| b - a).sum();
        strips.push(Strip {
            x_lo: 0.0,
            x_hi: 1.0 / r as f64,
            y_top: top,
            kept,
            excluded_measure: top - kept_measure,
        });
        let c_alpha = strips
            .iter()
            .map(|s| {
                s.kept
                    .iter()
                    .map(|&(a, b)| rect_mass(s.x_lo, s.x_hi, a, b))
                    .sum::<f64>()
            })
            .sum();
        NatExtDomain {
            r,
            depth: sets.depth,
            prune: sets.prune,
            beta,
            xi,
            strips,
            c_alpha,
            merge_tol,
            dropped_measure: sets.dropped_measure,
            pruned_subtrees: sets.pruned_subtrees,
        }
    }

    /// Uncut area of the enclosing strips (before exclusions).
    pub fn envelope_area(&self) -> f64 {
        self.strips.iter().map(|s| (s.x_hi - s.x_lo) * s.y_top).sum()
    }

    /// Membership with `Boundary counts as inside` semantics: a point
    /// within `merge_tol` of any fibre edge passes.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let tol = self.merge_tol;
        if y < -tol {
            return false;
        }
        for s in &self.strips {
            if x < s.x_lo - tol || x > s.x_hi + tol {
                continue;
            }
            if y > s.y_top + tol {
                continue;
            }
            if fibre_contains(&s.kept, y, tol) {
                return true;
            }
        }
        false
    }

    /// Invariant mass carried by each strip (they sum to 1).
    pub fn strip_masses(&self) -> Vec<f64> {
        self.strips
            .iter()
            .map(|s| {
                s.kept
                    .iter()
                    .map(|&(a, b)| rect_mass(s.x_lo, s.x_hi, a, b))
                    .sum::<f64>()
                    / self.c_alpha
            })
            .collect()
    }

    /// Normalised invariant weight at a point of the domain.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let w = 1.0 + x * y;
        1.0 / (w * w * self.c_alpha)
    }

    /// Mass of an axis-aligned rectangle under the invariant density,
    /// clipped to the domain.
    pub fn mass_in_rect(&self, x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
        let mut m = 0.0;
        for s in &self.strips {
            let (a, b) = (s.x_lo.max(x1), s.x_hi.min(x2));
            if b <= a {
                continue;
            }
            let start = s.kept.partition_point(|&(_, d)| d < y1);
            for &(c, d) in &s.kept[start..] {
                if c > y2 {
                    break;
                }
                let (c, d) = (c.max(y1), d.min(y2));
                if d > c {
                    m += rect_mass(a, b, c, d);
                }
            }
        }
        m / self.c_alpha
    }
}

/// One step of the planar extension. The second coordinate folds the
/// digit of `x` into the backward expansion: `y' = 1/(k + sign(x) y)`.
pub fn extension_step(ctx: &AlphaContext, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(-1e-12..=1.0 + 1e-12).contains(&y) {
        return Err(Error::OutOfDomain { value: y, lo: 0.0, hi: 1.0 });
    }
    let (tx, digit) = ctx.step(x)?;
    let k = digit.j as f64;
    let ty = match digit.sign {
        crate::maps::Sign::Plus => 1.0 / (k + y),
        crate::maps::Sign::Minus => 1.0 / (k - y),
    };
    Ok((tx, ty))
}

// ---------------------------------------------------------------------
// Sampling and statistical checks
// ---------------------------------------------------------------------

/// Rejection-sample `count` points of the domain under the invariant
/// density. Streams are indexed by `offset + k`, so disjoint offsets
/// give independent batches reproducibly.
pub fn sample_invariant(
    domain: &NatExtDomain,
    count: usize,
    seed: u64,
    offset: u64,
) -> Result<Vec<(f64, f64)>> {
    // envelope: uniform over the strip rectangles, thinned by the
    // density ratio against its supremum over the rectangles
    let areas: Vec<f64> =
        domain.strips.iter().map(|s| (s.x_hi - s.x_lo) * s.y_top).collect();
    let total_area: f64 = areas.iter().sum();
    let mut cumulative = Vec::with_capacity(areas.len());
    let mut acc = 0.0;
    for a in &areas {
        acc += a / total_area;
        cumulative.push(acc);
    }
    let sup_weight: f64 = domain
        .strips
        .iter()
        .map(|s| {
            // the weight peaks where xy is most negative: the top-left corner
            let w = 1.0 + s.x_lo * s.y_top;
            (1.0 / (w * w)).max(1.0)
        })
        .fold(0.0, f64::max);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0u64;
    for k in 0..count as u64 {
        let mut rng = SplitMix64::stream(seed, offset + k);
        loop {
            attempts += 1;
            if attempts > 400 * (count as u64 + 16)
                && (out.len() as f64) < 0.01 * attempts as f64
            {
                return Err(Error::RejectionStarvation {
                    ratio: out.len() as f64 / attempts as f64,
                });
            }
            let u = rng.next_f64();
            let si = cumulative.partition_point(|&c| c < u).min(domain.strips.len() - 1);
            let s = &domain.strips[si];
            let x = rng.uniform(s.x_lo, s.x_hi);
            let y = rng.uniform(0.0, s.y_top);
            let w = 1.0 + x * y;
            let ratio = 1.0 / (w * w * sup_weight);
            if rng.next_f64() >= ratio {
                continue;
            }
            // fibre membership, boundary-tolerant
            if fibre_contains(&s.kept, y, domain.merge_tol) {
                out.push((x, y));
                break;
            }
        }
    }
    Ok(out)
}

fn histogram_l1(
    alpha: f64,
    bins: usize,
    a: &[(f64, f64)],
    b: &[(f64, f64)],
) -> f64 {
    let mut ha = vec![0.0f64; bins * bins];
    let mut hb = vec![0.0f64; bins * bins];
    let lo = alpha - 1.0;
    let cell = |x: f64, y: f64| -> usize {
        let i = (((x - lo) * bins as f64) as isize).clamp(0, bins as isize - 1) as usize;
        let j = ((y * bins as f64) as isize).clamp(0, bins as isize - 1) as usize;
        i * bins + j
    };
    for &(x, y) in a {
        ha[cell(x, y)] += 1.0 / a.len() as f64;
    }
    for &(x, y) in b {
        hb[cell(x, y)] += 1.0 / b.len() as f64;
    }
    ha.iter().zip(&hb).map(|(p, q)| (p - q).abs()).sum()
}

/// Invariance check by comparing the pushforward of one sample with a
/// fresh sample, against the distance between two fresh samples.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct InvarianceReport {
    pub pushed_distance: f64,
    pub null_distance: f64,
    /// `pushed <= factor * null + slack` is the acceptance reading.
    pub ok: bool,
    pub escaped: u64,
}

pub const INVARIANCE_FACTOR: f64 = 1.5;
pub const INVARIANCE_SLACK: f64 = 0.02;

pub fn check_invariance(
    domain: &NatExtDomain,
    ctx: &AlphaContext,
    count: usize,
    bins: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let n = count as u64;
    let a = sample_invariant(domain, count, seed, 0)?;
    let b = sample_invariant(domain, count, seed, n)?;
    let c = sample_invariant(domain, count, seed, 2 * n)?;
    let d = sample_invariant(domain, count, seed, 3 * n)?;
    let mut pushed = Vec::with_capacity(count);
    let mut escaped = 0u64;
    for &(x, y) in &a {
        match extension_step(ctx, x, y) {
            Ok(p) => pushed.push(p),
            Err(_) => escaped += 1,
        }
    }
    let alpha = ctx.alpha();
    let pushed_distance = histogram_l1(alpha, bins, &pushed, &b);
    let null_distance = histogram_l1(alpha, bins, &c, &d);
    Ok(InvarianceReport {
        pushed_distance,
        null_distance,
        ok: pushed_distance <= INVARIANCE_FACTOR * null_distance + INVARIANCE_SLACK,
        escaped,
    })
}

/// Count image collisions: pairs mapping within `1e-9` of each other
/// whose sources are at least `1e-6` apart.
pub fn check_injectivity(
    domain: &NatExtDomain,
    ctx: &AlphaContext,
    count: usize,
    seed: u64,
) -> Result<u64> {
    let pts = sample_invariant(domain, count, seed, 0)?;
    let mut images: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(pts.len());
    for &(x, y) in &pts {
        if let Ok((tx, ty)) = extension_step(ctx, x, y) {
            images.push((tx, ty, x, y));
        }
    }
    images.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut collisions = 0u64;
    for i in 0..images.len() {
        for j in (i + 1)..images.len() {
            if images[j].0 - images[i].0 > 1e-9 {
                break;
            }
            if (images[j].1 - images[i].1).abs() <= 1e-9 {
                let dx = images[j].2 - images[i].2;
                let dy = images[j].3 - images[i].3;
                if dx.abs().max(dy.abs()) > 1e-6 {
                    collisions += 1;
                }
            }
        }
    }
    Ok(collisions)
}

/// Membership of all pushed sample points, boundary-tolerant.
pub fn check_forward_invariance(
    domain: &NatExtDomain,
    ctx: &AlphaContext,
    count: usize,
    seed: u64,
) -> Result<u64> {
    let pts = sample_invariant(domain, count, seed, 0)?;
    let mut failures = 0u64;
    for &(x, y) in &pts {
        match extension_step(ctx, x, y) {
            Ok((tx, ty)) => {
                if !domain.contains(tx, ty) {
                    failures += 1;
                }
            }
            Err(_) => {}
        }
    }
    Ok(failures)
}

/// Disjointness and coverage of the plus set against the reflected
/// minus set inside `[xi, 1 - beta]`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ComplementarityReport {
    pub overlap_measure: f64,
    pub covered_measure: f64,
    pub target: f64,
    pub plus_measure: f64,
    pub minus_measure: f64,
}

pub fn complementarity_check(sets: &ExclusionSets) -> ComplementarityReport {
    let (beta, xi) = beta_xi(sets.r);
    let plus = sets.plus.clipped(xi, 1.0 - beta);
    let minus = sets.minus.clipped(beta, 1.0 - xi);
    let reflected = minus.reflected(1.0);
    let overlap = plus.intersection_measure(&reflected);
    let covered = plus.measure() + reflected.measure() - overlap;
    ComplementarityReport {
        overlap_measure: overlap,
        covered_measure: covered,
        target: 1.0 - beta - xi,
        plus_measure: plus.measure(),
        minus_measure: minus.measure(),
    }
}

// ---------------------------------------------------------------------
// The simpler mid-range domain (three blocks)
// ---------------------------------------------------------------------

/// Natural-extension domain for `sqrt(2)-1 <= alpha <= 1/2`: three
/// x-blocks with explicit fibres built from the golden mean.
#[derive(Clone, Debug)]
pub struct MidRangeDomain {
    pub alpha: f64,
    pub blocks: Vec<Strip>,
    pub c_alpha: f64,
    pub merge_tol: f64,
}

impl MidRangeDomain {
    pub fn build(alpha: f64) -> Result<MidRangeDomain> {
        if !(crate::maps::sqrt2_minus_1() - 1e-12..=0.5 + 1e-12).contains(&alpha) {
            return Err(Error::UnsupportedAlpha { alpha });
        }
        let g = crate::maps::golden_small();
        let b1 = (2.0 * alpha - 1.0) / (1.0 - alpha);
        let b2 = (1.0 - 2.0 * alpha) / alpha;
        let blocks = vec![
            Strip {
                x_lo: alpha - 1.0,
                x_hi: b1,
                y_top: 1.0 - g,
                kept: vec![(0.0, 1.0 - g)],
                excluded_measure: 0.0,
            },
            Strip {
                x_lo: b1,
                x_hi: b2,
                y_top: g,
                kept: vec![(0.0, 1.0 - g), (0.5, g)],
                excluded_measure: g - (1.0 - g) - (g - 0.5),
            },
            Strip {
                x_lo: b2,
                x_hi: alpha,
                y_top: g,
                kept: vec![(0.0, g)],
                excluded_measure: 0.0,
            },
        ];
        let c_alpha = blocks
            .iter()
            .map(|s| {
                s.kept
                    .iter()
                    .map(|&(a, b)| rect_mass(s.x_lo, s.x_hi, a, b))
                    .sum::<f64>()
            })
            .sum();
        Ok(MidRangeDomain { alpha, blocks, c_alpha, merge_tol: DEFAULT_MERGE_TOL })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let tol = self.merge_tol;
        if y < -tol {
            return false;
        }
        for s in &self.blocks {
            if x < s.x_lo - tol || x > s.x_hi + tol {
                continue;
            }
            if fibre_contains(&s.kept, y, tol) {
                return true;
            }
        }
        false
    }

    pub fn sample(&self, count: usize, seed: u64, offset: u64) -> Vec<(f64, f64)> {
        let areas: Vec<f64> =
            self.blocks.iter().map(|s| (s.x_hi - s.x_lo) * s.y_top).collect();
        let total: f64 = areas.iter().sum();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for a in &areas {
            acc += a / total;
            cumulative.push(acc);
        }
        let sup: f64 = self
            .blocks
            .iter()
            .map(|s| {
                let w = 1.0 + s.x_lo * s.y_top;
                (1.0 / (w * w)).max(1.0)
            })
            .fold(0.0, f64::max);
        let mut out = Vec::with_capacity(count);
        for k in 0..count as u64 {
            let mut rng = SplitMix64::stream(seed, offset + k);
            loop {
                let u = rng.next_f64();
                let si = cumulative.partition_point(|&c| c < u).min(self.blocks.len() - 1);
                let s = &self.blocks[si];
                let x = rng.uniform(s.x_lo, s.x_hi);
                let y = rng.uniform(0.0, s.y_top);
                let w = 1.0 + x * y;
                if rng.next_f64() >= 1.0 / (w * w * sup) {
                    continue;
                }
                if fibre_contains(&s.kept, y, 0.0) {
                    out.push((x, y));
                    break;
                }
            }
        }
        out
    }

    /// Pushforward-vs-fresh histogram distance with a null baseline,
    /// as for the unit-fraction domain.
    pub fn check_invariance(
        &self,
        ctx: &AlphaContext,
        count: usize,
        bins: usize,
        seed: u64,
    ) -> Result<InvarianceReport> {
        let n = count as u64;
        let a = self.sample(count, seed, 0);
        let b = self.sample(count, seed, n);
        let c = self.sample(count, seed, 2 * n);
        let d = self.sample(count, seed, 3 * n);
        let mut pushed = Vec::with_capacity(count);
        let mut escaped = 0u64;
        for &(x, y) in &a {
            match extension_step(ctx, x, y) {
                Ok(p) => pushed.push(p),
                Err(_) => escaped += 1,
            }
        }
        let pushed_distance = histogram_l1(self.alpha, bins, &pushed, &b);
        let null_distance = histogram_l1(self.alpha, bins, &c, &d);
        Ok(InvarianceReport {
            pushed_distance,
            null_distance,
            ok: pushed_distance <= INVARIANCE_FACTOR * null_distance + INVARIANCE_SLACK,
            escaped,
        })
    }

    pub fn check_membership(&self, ctx: &AlphaContext, count: usize, seed: u64) -> Result<u64> {
        let pts = self.sample(count, seed, 0);
        let mut failures = 0u64;
        for &(x, y) in &pts {
            if let Ok((tx, ty)) = extension_step(ctx, x, y) {
                if !self.contains(tx, ty) {
                    failures += 1;
                }
            }
        }
        Ok(failures)
    }
}
