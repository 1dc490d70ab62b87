//! The one-parameter family of continued-fraction maps and their
//! derived constants.
//!
//! For `alpha` in `[0, 1]` the interval map
//!
//! ```text
//! T_alpha(x) = |1/x| - floor(|1/x| + 1 - alpha)
//! ```
//!
//! acts on `I_alpha = [alpha - 1, alpha]`. It specialises to the Gauss
//! map at `alpha = 1`, the nearest-integer map at `alpha = 1/2`, and the
//! by-excess map at `alpha = 0`. Each branch is labelled by a digit
//! `(j, sign(x))`, and the branch inverses are the Möbius maps
//! `y -> sign/(j + y)`.

use crate::error::{Error, Result};

/// Tolerance used for domain checks on map arguments.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Golden ratio `(1 + sqrt 5)/2`.
pub fn golden_big() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Golden mean `(sqrt 5 - 1)/2 = 1/G`.
pub fn golden_small() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `sqrt(2) - 1`, the lower edge of the parameter range where the
/// invariant density has a closed form.
pub fn sqrt2_minus_1() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// Threshold sequence `v_r = -1/2 + sqrt(1 + 4/r)/2` separating the
/// parameter windows with exactly `r` consecutive `(2,-)` digits along
/// the orbit of the left endpoint.
pub fn v_sequence(r: u64) -> f64 {
    assert!(r >= 1, "v_sequence needs r >= 1");
    -0.5 + 0.5 * (1.0 + 4.0 / r as f64).sqrt()
}

/// Sign of the branch a point falls in: the digit `(j, +)` covers
/// positive arguments, `(j, -)` negative ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Branch label `(j, epsilon)` of a rank-1 cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Digit {
    pub j: u64,
    pub sign: Sign,
}

impl Digit {
    pub fn plus(j: u64) -> Digit {
        Digit { j, sign: Sign::Plus }
    }

    pub fn minus(j: u64) -> Digit {
        Digit { j, sign: Sign::Minus }
    }
}

impl std::fmt::Display for Digit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.j, self.sign.as_char())
    }
}

/// A digit string identifying a rank-`n` cylinder.
pub type DigitSeq = Vec<Digit>;

/// Recorded forward orbit: the iterates, the digits visited, and
/// whether the orbit escaped through the discontinuity at 0.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub points: Vec<f64>,
    pub digits: DigitSeq,
    pub escaped_zero: bool,
}

/// Parameter value together with the constants every map operation
/// needs: the interval of definition, the least positive digit, and the
/// index `r` of the threshold window `v_{r+1} <= alpha < v_r`.
#[derive(Clone, Debug)]
pub struct AlphaContext {
    alpha: f64,
    lo: f64,
    hi: f64,
    j_min: Option<u64>,
    r_digits: Option<u64>,
    one_over_r: Option<u32>,
}

impl AlphaContext {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfDomain { value: alpha, lo: 0.0, hi: 1.0 });
        }
        let lo = alpha - 1.0;
        let hi = alpha;
        debug_assert_eq!(hi - lo, 1.0);
        let j_min = if alpha > 0.0 {
            let j = (1.0 / alpha + 1.0 - alpha).floor() as u64;
            if alpha <= sqrt2_minus_1() {
                assert!(j >= 3, "j_min = {j} < 3 at alpha = {alpha}");
            }
            Some(j)
        } else {
            None
        };
        let r_digits = if alpha > 0.0 {
            // v_r decreases in r with v_r = alpha at r = 1/(alpha^2+alpha);
            // start from that value and adjust by at most a step or two
            let mut r = (1.0 / (alpha * alpha + alpha)).floor().max(0.0) as u64;
            while r > 0 && alpha >= v_sequence(r) {
                r -= 1;
            }
            while alpha < v_sequence(r + 1) {
                r += 1;
            }
            Some(r)
        } else {
            None
        };
        let one_over_r = if alpha > 0.0 {
            let r = (1.0 / alpha).round();
            if r >= 1.0 && (alpha - 1.0 / r).abs() <= DOMAIN_TOL {
                Some(r as u32)
            } else {
                None
            }
        } else {
            None
        };
        Ok(AlphaContext { alpha, lo, hi, j_min, r_digits, one_over_r })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The interval of definition `[alpha - 1, alpha]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Least digit on the positive side, `floor(1/alpha + 1 - alpha)`.
    /// `None` at `alpha = 0` where the positive side is empty.
    pub fn j_min(&self) -> Option<u64> {
        self.j_min
    }

    /// The window index `r` with `v_{r+1} <= alpha < v_r`: the orbit of
    /// `alpha - 1` spends exactly `r` steps in the `(2,-)` cylinder.
    pub fn r_digits(&self) -> Option<u64> {
        self.r_digits
    }

    /// `Some(r)` when `alpha` equals `1/r` to within the domain
    /// tolerance. Note this `r` exceeds `r_digits` by one.
    pub fn is_one_over_r(&self) -> Option<u32> {
        self.one_over_r
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x < self.lo - DOMAIN_TOL || x > self.hi + DOMAIN_TOL {
            return Err(Error::OutOfDomain { value: x, lo: self.lo, hi: self.hi });
        }
        Ok(())
    }

    /// One step of the map together with the digit of the branch used.
    pub fn step(&self, x: f64) -> Result<(f64, Digit)> {
        self.check_domain(x)?;
        if x == 0.0 {
            return Err(Error::ZeroArgument);
        }
        let u = (1.0 / x).abs();
        let j = (u + 1.0 - self.alpha).floor();
        Ok((u - j, Digit { j: j as u64, sign: Sign::of(x) }))
    }

    /// Map value without the digit; same domain rules as [`step`](Self::step).
    pub fn apply(&self, x: f64) -> Result<f64> {
        Ok(self.step(x)?.0)
    }

    /// `n` forward steps recording iterates and digits. Stops early with
    /// `escaped_zero` set if an iterate lands exactly on 0.
    pub fn orbit(&self, x0: f64, n: usize) -> Result<OrbitRecord> {
        self.check_domain(x0)?;
        let mut points = Vec::with_capacity(n + 1);
        let mut digits = Vec::with_capacity(n);
        let mut x = x0;
        points.push(x);
        for _ in 0..n {
            if x == 0.0 {
                return Ok(OrbitRecord { points, digits, escaped_zero: true });
            }
            let u = (1.0 / x).abs();
            let j = (u + 1.0 - self.alpha).floor();
            let d = Digit { j: j as u64, sign: Sign::of(x) };
            x = u - j;
            points.push(x);
            digits.push(d);
        }
        Ok(OrbitRecord { points, digits, escaped_zero: false })
    }

    /// Rank-1 cylinder of a digit: the closure of the set of points
    /// carrying that digit, clipped to the interval of definition.
    /// Returns `None` when the cylinder is empty for this `alpha`.
    pub fn cylinder_rank1(&self, d: Digit) -> Option<(f64, f64)> {
        let a = self.alpha;
        match d.sign {
            Sign::Plus => {
                let j_min = self.j_min?;
                if d.j < j_min {
                    return None;
                }
                let j = d.j as f64;
                let lo = 1.0 / (j + a);
                let hi = if d.j == j_min { a } else { 1.0 / (j - 1.0 + a) };
                let hi = hi.min(a);
                if hi - lo > 0.0 {
                    Some((lo, hi))
                } else {
                    None
                }
            }
            Sign::Minus => {
                if d.j < 2 || self.alpha >= 1.0 {
                    return None;
                }
                let j = d.j as f64;
                let hi = -1.0 / (j + a);
                let lo = if d.j == 2 { self.lo } else { -1.0 / (j - 1.0 + a) };
                let lo = lo.max(self.lo);
                if hi - lo > 0.0 {
                    Some((lo, hi))
                } else {
                    None
                }
            }
        }
    }

    /// Inverse branch of the digit `(j, eps)`: the unique preimage
    /// `eps/(j + y)` of `y` inside that cylinder.
    pub fn inverse_step(&self, d: Digit, y: f64) -> Result<f64> {
        if self.cylinder_rank1(d).is_none() {
            return Err(Error::EmptyCylinder {
                j: d.j,
                sign: d.sign.as_char(),
                alpha: self.alpha,
            });
        }
        self.check_domain(y)?;
        let j = d.j as f64;
        Ok(match d.sign {
            Sign::Plus => 1.0 / (j + y),
            Sign::Minus => -1.0 / (j + y),
        })
    }

    /// Forward branch formula for a known digit, without re-deriving the
    /// digit from the point. Used to push cylinder endpoints.
    pub fn branch_apply(&self, d: Digit, x: f64) -> f64 {
        let j = d.j as f64;
        match d.sign {
            Sign::Plus => 1.0 / x - j,
            Sign::Minus => -1.0 / x - j,
        }
    }

    /// Breakpoints `c_0 = alpha, c_j = -1 + 1/(j + 1/(1 + alpha)),
    /// c_{r+1} = alpha - 1` of the return-time partition for the jump
    /// transformation.
    pub fn c_points(&self) -> Vec<f64> {
        let r = self.r_digits.unwrap_or(0) as usize;
        let mut c = Vec::with_capacity(r + 2);
        c.push(self.alpha);
        for j in 1..=r {
            c.push(-1.0 + 1.0 / (j as f64 + 1.0 / (1.0 + self.alpha)));
        }
        c.push(self.lo);
        c
    }

    /// Return time of the jump transformation: `tau = j + 1` on the
    /// block `L_j = [c_{j+1}, c_j)`.
    pub fn jump_time(&self, x: f64) -> Result<u32> {
        if self.alpha <= 0.0 || self.alpha > sqrt2_minus_1() + DOMAIN_TOL {
            return Err(Error::OutOfDomain {
                value: self.alpha,
                lo: 0.0,
                hi: sqrt2_minus_1(),
            });
        }
        self.check_domain(x)?;
        let c = self.c_points();
        for (idx, &cj) in c.iter().enumerate().skip(1) {
            if idx + 1 < c.len() && (x - cj).abs() < DOMAIN_TOL {
                return Err(Error::Breakpoint { value: x, index: idx });
            }
        }
        // c is decreasing: c[0] = alpha, ..., c[r+1] = alpha - 1.
        let mut j = 0usize;
        while j + 1 < c.len() && x < c[j + 1] {
            j += 1;
        }
        Ok(j as u32 + 1)
    }

    /// Jump transformation accelerated over the `(2,-)` cylinder:
    /// returns `(T^tau(x), tau)`. Errors with `ZeroArgument` on the
    /// null set of points whose accelerated orbit lands exactly on 0.
    pub fn jump(&self, x: f64) -> Result<(f64, u32)> {
        let tau = self.jump_time(x)?;
        let mut y = x;
        for _ in 0..tau {
            y = self.apply(y)?;
        }
        Ok((y, tau))
    }

    /// The translated map `A`: this context's map conjugated by the
    /// translation moving its interval onto that of `alpha`. `self`
    /// holds the reference parameter; `alpha` is the map being moved.
    pub fn translated_step(&self, alpha: f64, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let inner = AlphaContext::new(alpha)?;
        let shift = self.alpha - alpha;
        let y = x - shift;
        if y == 0.0 {
            return Err(Error::ZeroArgument);
        }
        Ok(inner.apply(y)? + shift)
    }
}

/// Folded map `M_alpha(x) = |1/x - floor(1/x + 1 - alpha)|` on
/// `[0, max(alpha, 1-alpha)]`; the factor of `T_alpha` under the
/// absolute value.
pub fn m_alpha(alpha: f64, x: f64) -> Result<f64> {
    let hi = alpha.max(1.0 - alpha);
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    if x < -DOMAIN_TOL || x > hi + DOMAIN_TOL {
        return Err(Error::OutOfDomain { value: x, lo: 0.0, hi });
    }
    let u = 1.0 / x;
    Ok((u - (u + 1.0 - alpha).floor()).abs())
}

/// By-excess map `M_0(x) = -1/x + floor(1/x + 1)` on `(0, 1]` together
/// with its digit `floor(1/x + 1) >= 2`.
///
/// A reciprocal within a few ulps of an integer counts as that integer,
/// so the orbit of a rational lands exactly on 1 (where the expansion
/// continues with 2s) instead of drifting across the branch boundary.
pub fn m_zero(x: f64) -> Result<(f64, u32)> {
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    if x < -DOMAIN_TOL || x > 1.0 + DOMAIN_TOL {
        return Err(Error::OutOfDomain { value: x, lo: 0.0, hi: 1.0 });
    }
    let u = 1.0 / x;
    let near = u.round();
    if near >= 1.0 && (u - near).abs() <= 1e-12 * u.max(1.0) {
        return Ok((1.0, near as u32 + 1));
    }
    let a = (u + 1.0).floor();
    Ok((a - u, a as u32))
}

/// Inverse branch `V_a(y) = 1/(a - y)` of the by-excess map.
pub fn inverse_branch_m0(a: u32, y: f64) -> f64 {
    debug_assert!(a >= 2);
    1.0 / (a as f64 - y)
}

/// `1/|T'(x)| = x^2` never exceeds 1 on the interval; this returns the
/// expansion factor `|T'(x)| = 1/x^2`.
pub fn derivative_abs(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(1.0 / (x * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(alpha: f64) -> AlphaContext {
        AlphaContext::new(alpha).unwrap()
    }

    #[test]
    fn gauss_map_step() {
        let (y, d) = ctx(1.0).step(2.0 / 3.0).unwrap();
        assert!((y - 0.5).abs() < 1e-12);
        assert_eq!(d, Digit::plus(1));
    }

    #[test]
    fn endpoint_orbit_digit_at_one_third() {
        // alpha - 1 = -2/3 sits in the (2,-) cylinder and maps to -1/2.
        let (y, d) = ctx(1.0 / 3.0).step(-2.0 / 3.0).unwrap();
        assert!((y + 0.5).abs() < 1e-12);
        assert_eq!(d, Digit::minus(2));
    }

    #[test]
    fn right_endpoint_maps_to_zero_at_one_fifth() {
        let (y, d) = ctx(0.2).step(0.2).unwrap();
        assert!(y.abs() < 1e-12);
        assert_eq!(d, Digit::plus(5));
    }

    #[test]
    fn step_rejects_zero_and_outside() {
        assert_eq!(ctx(0.4).step(0.0), Err(Error::ZeroArgument));
        assert!(matches!(ctx(0.4).step(0.7), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn m_zero_examples() {
        let (y, a) = m_zero(0.3).unwrap();
        assert_eq!(a, 4);
        assert!((y - (4.0 - 1.0 / 0.3)).abs() < 1e-12);
        // Fixed point of the branch 4 at r = 3.
        let beta = 2.0 - 3f64.sqrt();
        let (y, a) = m_zero(beta).unwrap();
        assert_eq!(a, 4);
        assert!((y - beta).abs() < 1e-12);
    }

    #[test]
    fn m_alpha_example() {
        let v = m_alpha(0.5, 0.4).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn semiconjugacy_on_positive_side() {
        // |T(x)| = M(x) for x > 0 in both domains.
        for &alpha in &[0.3, 0.45, 0.7, 1.0] {
            let c = ctx(alpha);
            for k in 1..200 {
                let x = alpha * k as f64 / 200.0;
                if x <= 0.0 {
                    continue;
                }
                let t = c.apply(x).unwrap().abs();
                let m = m_alpha(alpha, x).unwrap();
                assert!((t - m).abs() < 1e-12, "alpha={alpha} x={x}");
            }
        }
    }

    #[test]
    fn j_min_values() {
        assert_eq!(ctx(1.0).j_min(), Some(1));
        assert_eq!(ctx(1.0 / 3.0).j_min(), Some(3));
        assert_eq!(ctx(0.2).j_min(), Some(5));
        assert_eq!(ctx(0.0).j_min(), None);
    }

    #[test]
    fn r_digits_windows() {
        assert_eq!(ctx(0.7).r_digits(), Some(0));
        assert_eq!(ctx(0.5).r_digits(), Some(1));
        assert_eq!(ctx(1.0 / 3.0).r_digits(), Some(2));
        for r in 3..=8u64 {
            let c = ctx(1.0 / r as f64);
            assert_eq!(c.r_digits(), Some(r - 1), "alpha = 1/{r}");
            assert_eq!(c.is_one_over_r(), Some(r as u32));
        }
    }

    #[test]
    fn v_sequence_values() {
        assert!((v_sequence(1) - golden_small()).abs() < 1e-15);
        assert!((v_sequence(2) - (3f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn c_points_at_one_third() {
        let c = ctx(1.0 / 3.0).c_points();
        assert_eq!(c.len(), 4); // c_0 .. c_3 with r_digits = 2
        assert!((c[1] + 3.0 / 7.0).abs() < 1e-12);
        assert!((c[2] + 7.0 / 11.0).abs() < 1e-12);
        assert!((c[3] + 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn c_points_match_iterated_inverse_branch() {
        // c_j = V_{(2,-)}^{j-1}(-1/(2+alpha))
        for &alpha in &[0.1, 0.2, 1.0 / 3.0, 0.4] {
            let c = ctx(alpha);
            let pts = c.c_points();
            let mut v = -1.0 / (2.0 + alpha);
            for j in 1..pts.len() - 1 {
                assert!((pts[j] - v).abs() < 1e-12, "alpha={alpha} j={j}");
                v = -1.0 / (v + 2.0);
            }
        }
    }

    #[test]
    fn jump_examples_at_one_third() {
        let c = ctx(1.0 / 3.0);
        let (_, tau) = c.jump(0.1).unwrap();
        assert_eq!(tau, 1);
        // -1/2 is in [c_2, c_1) but its accelerated image is exactly
        // the singular point, so only the return time is observable
        assert_eq!(c.jump_time(-0.5).unwrap(), 2);
        assert_eq!(c.jump(-0.5), Err(Error::ZeroArgument));
        let (_, tau) = c.jump(-0.51).unwrap();
        assert_eq!(tau, 2);
        let (_, tau) = c.jump(-0.65).unwrap();
        assert_eq!(tau, 3);
    }

    #[test]
    fn jump_matches_iteration() {
        let c = ctx(0.25);
        let mut rng = crate::rng::SplitMix64::new(11);
        let mut checked = 0;
        while checked < 10_000 {
            let x = rng.uniform(c.interval().0, c.interval().1);
            let Ok((jy, tau)) = c.jump(x) else { continue };
            let mut y = x;
            for _ in 0..tau {
                y = c.apply(y).unwrap();
            }
            assert!((y - jy).abs() < 1e-12);
            assert!(u64::from(tau) <= c.r_digits().unwrap() + 1);
            checked += 1;
        }
    }

    #[test]
    fn jump_detects_breakpoints() {
        let c = ctx(1.0 / 3.0);
        let c1 = -3.0 / 7.0;
        assert!(matches!(c.jump(c1), Err(Error::Breakpoint { .. })));
    }

    #[test]
    fn inverse_branch_round_trip() {
        let c = ctx(1.0 / 3.0);
        let x = c.inverse_step(Digit::minus(2), 0.0).unwrap();
        assert!((x + 0.5).abs() < 1e-12);
        let (y, d) = c.step(x).unwrap();
        assert!(y.abs() < 1e-12);
        assert_eq!(d, Digit::minus(2));
    }

    #[test]
    fn inverse_branch_empty_cylinder() {
        let c = ctx(1.0 / 3.0);
        // digit (2,+) needs j >= j_min = 3 on the plus side
        assert!(matches!(
            c.inverse_step(Digit::plus(2), 0.0),
            Err(Error::EmptyCylinder { .. })
        ));
        // negative digits are gone entirely at alpha = 1
        assert!(matches!(
            ctx(1.0).inverse_step(Digit::minus(2), 0.0),
            Err(Error::EmptyCylinder { .. })
        ));
    }

    #[test]
    fn all_twos_inverse_branch_tail_fixes_one() {
        // the branch-2 inverse is parabolic at 1: n steps leave a gap
        // of exactly 1/(n + 1/(1-y0))
        let mut y: f64 = 0.3;
        let n = 200;
        for _ in 0..n {
            y = inverse_branch_m0(2, y);
        }
        assert!(y < 1.0);
        let want_gap = 1.0 / (n as f64 + 1.0 / 0.7);
        assert!(((1.0 - y) - want_gap).abs() < 1e-12);
        assert!((inverse_branch_m0(2, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_values() {
        assert!((derivative_abs(0.5).unwrap() - 4.0).abs() < 1e-12);
        assert!((derivative_abs(-1.0 / 3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((derivative_abs(-0.75).unwrap() - 1.0 / 0.5625).abs() < 1e-12);
    }

    #[test]
    fn translated_map_agrees_with_composition() {
        // reference alpha-bar = 0.3, inner map alpha = 0.28
        let cbar = ctx(0.3);
        let inner = ctx(0.28);
        let got = cbar.translated_step(0.28, 0.1).unwrap();
        let want = inner.apply(0.08).unwrap() + 0.02;
        assert!((got - want).abs() < 1e-12);

        let czero = ctx(0.0);
        let inner = ctx(0.1);
        let got = czero.translated_step(0.1, -0.9).unwrap();
        let want = inner.apply(-0.8).unwrap() - 0.1;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn translated_map_with_zero_shift_is_the_map() {
        let c = ctx(0.4);
        for k in 1..50 {
            let x = -0.6 + k as f64 / 60.0;
            if x == 0.0 {
                continue;
            }
            assert!((c.translated_step(0.4, x).unwrap() - c.apply(x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn orbit_stays_in_range_randomised() {
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..100_000 {
            let alpha = rng.uniform(0.01, 1.0);
            let c = ctx(alpha);
            let x = rng.uniform(c.interval().0, c.interval().1);
            if x == 0.0 {
                continue;
            }
            let y = c.apply(x).unwrap();
            assert!(
                y >= c.interval().0 - 1e-12 && y <= c.interval().1 + 1e-12,
                "alpha={alpha} x={x} y={y}"
            );
        }
    }

    #[test]
    fn endpoint_orbit_identity_for_unit_fractions() {
        // T^i(alpha - 1) = -(r-i-1)/(r-i) for alpha = 1/r
        for r in 3..=8u32 {
            let c = ctx(1.0 / r as f64);
            let mut x = c.interval().0;
            for i in 0..=(r - 2) {
                let want = -((r - i - 1) as f64) / (r - i) as f64;
                assert!((x - want).abs() < 1e-12, "r={r} i={i} x={x} want={want}");
                if i < r - 2 {
                    x = c.apply(x).unwrap();
                }
            }
        }
    }

    #[test]
    fn r_digit_window_matches_orbit_membership() {
        // r from the thresholds equals the number of leading (2,-) digits
        // of the orbit of alpha - 1.
        let mut rng = crate::rng::SplitMix64::new(3);
        for _ in 0..1000 {
            let alpha = rng.uniform(1e-3, sqrt2_minus_1());
            let c = ctx(alpha);
            let r = c.r_digits().unwrap();
            let rec = c.orbit(c.interval().0, r as usize + 1).unwrap();
            let leading = rec
                .digits
                .iter()
                .take_while(|d| **d == Digit::minus(2))
                .count() as u64;
            // skip parameters too close to a threshold for float digits
            let near = (v_sequence(r + 1) - alpha).abs() < 1e-9
                || (r >= 1 && (v_sequence(r) - alpha).abs() < 1e-9);
            if !near {
                assert_eq!(leading, r, "alpha={alpha}");
            }
        }
    }
}
