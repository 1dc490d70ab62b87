//! By-excess expansions, the reflection algorithm for `x -> 1 - x`,
//! admissible token alphabets, and rank-`n` cylinder machinery.
//!
//! A by-excess expansion writes `x` in `(0, 1)` as
//!
//! ```text
//! x = 1/(a1 - 1/(a2 - 1/(a3 - ...)))        a_k >= 2
//! ```
//!
//! Runs of consecutive digits 2 behave as a single unit under the
//! reflection rules, so the canonical in-memory form tokenises maximal
//! runs: `<2^3,5;y=2.75>` denotes digits `2,2,2,5` followed by a real
//! remainder `2.75 > 1` in place of the tail.

use crate::error::{Error, Result};
use crate::maps::{m_zero, AlphaContext, Digit, DigitSeq};

/// One token of a by-excess expansion: a maximal run of 2s or a single
/// digit `>= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ByExcessToken {
    /// `Run2(s)`: `s` consecutive digits 2, never adjacent to another run.
    Run2(u32),
    /// `Big(a)`: a single digit `a >= 3`.
    Big(u32),
}

use ByExcessToken::{Big, Run2};

impl ByExcessToken {
    fn digit_len(self) -> u32 {
        match self {
            Run2(s) => s,
            Big(_) => 1,
        }
    }
}

/// Tokenised by-excess expansion, optionally closed by a real remainder
/// `y > 1` standing for the rest of the fraction (`None` means the
/// expansion continues with the all-2 tail, whose value is 1).
#[derive(Clone, Debug, PartialEq)]
pub struct ByExcessSeq {
    pub tokens: Vec<ByExcessToken>,
    pub remainder: Option<f64>,
}

impl ByExcessSeq {
    pub fn new(tokens: Vec<ByExcessToken>, remainder: Option<f64>) -> Self {
        debug_assert!(tokens_canonical(&tokens), "non-canonical token list");
        ByExcessSeq { tokens, remainder }
    }

    /// Build from raw digits, compressing runs of 2s.
    pub fn from_digits(digits: &[u32], remainder: Option<f64>) -> Self {
        let mut tokens = Vec::new();
        for &a in digits {
            debug_assert!(a >= 2);
            if a == 2 {
                if let Some(Run2(s)) = tokens.last_mut() {
                    *s += 1;
                    continue;
                }
                tokens.push(Run2(1));
            } else {
                tokens.push(Big(a));
            }
        }
        ByExcessSeq { tokens, remainder }
    }

    /// Expand tokens back to raw digits.
    pub fn digits(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for t in &self.tokens {
            match *t {
                Run2(s) => out.extend(std::iter::repeat(2).take(s as usize)),
                Big(a) => out.push(a),
            }
        }
        out
    }

    pub fn digit_len(&self) -> u32 {
        self.tokens.iter().map(|t| t.digit_len()).sum()
    }
}

fn tokens_canonical(tokens: &[ByExcessToken]) -> bool {
    tokens.windows(2).all(|w| !matches!(w, [Run2(_), Run2(_)]))
        && tokens.iter().all(|t| match *t {
            Run2(s) => s >= 1,
            Big(a) => a >= 3,
        })
}

impl std::fmt::Display for ByExcessSeq {
    /// Plain-text form `<2^3,5,2^1;y=2.75>`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<")?;
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match *t {
                Run2(s) => write!(f, "2^{s}")?,
                Big(a) => write!(f, "{a}")?,
            }
        }
        if let Some(y) = self.remainder {
            write!(f, ";y={y}")?;
        }
        write!(f, ">")
    }
}

impl std::str::FromStr for ByExcessSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::Parse { position: pos, message: msg.into() };
        let inner = s
            .strip_prefix('<')
            .ok_or_else(|| err(0, "expected '<'"))?
            .strip_suffix('>')
            .ok_or_else(|| err(s.len().saturating_sub(1), "expected '>'"))?;
        let (token_part, rem_part) = match inner.find(';') {
            Some(i) => (&inner[..i], Some(&inner[i + 1..])),
            None => (inner, None),
        };
        let mut tokens = Vec::new();
        let mut offset = 1usize;
        if !token_part.trim().is_empty() {
            for piece in token_part.split(',') {
                let p = piece.trim();
                let tok = if let Some(exp) = p.strip_prefix("2^") {
                    let s: u32 =
                        exp.parse().map_err(|_| err(offset, "bad run length after 2^"))?;
                    if s == 0 {
                        return Err(err(offset, "run length must be >= 1"));
                    }
                    Run2(s)
                } else {
                    let a: u32 = p.parse().map_err(|_| err(offset, "expected digit"))?;
                    match a {
                        0 | 1 => return Err(err(offset, "digits start at 2")),
                        2 => Run2(1),
                        _ => Big(a),
                    }
                };
                if let (Some(Run2(sl)), Run2(sn)) = (tokens.last_mut(), tok) {
                    *sl += sn;
                } else {
                    tokens.push(tok);
                }
                offset += piece.len() + 1;
            }
        }
        let remainder = match rem_part {
            None => None,
            Some(r) => {
                let r = r.trim();
                let v = r.strip_prefix("y=").unwrap_or(r);
                let y: f64 = v.parse().map_err(|_| err(offset, "bad remainder value"))?;
                if y <= 1.0 {
                    return Err(err(offset, "remainder must exceed 1"));
                }
                Some(y)
            }
        };
        Ok(ByExcessSeq { tokens, remainder })
    }
}

/// `V_2^s` in closed form: conjugate to a translation at the parabolic
/// fixed point 1, so runs evaluate in O(1).
fn apply_run2(s: u32, w: f64) -> f64 {
    let s = s as f64;
    (-(s - 1.0) * w + s) / (-s * w + s + 1.0)
}

/// Evaluate a by-excess sequence right to left. A remainder `y` stands
/// for a trailing `1/y`; with no remainder the implicit all-2 tail
/// contributes its fixed-point value 1.
pub fn eval_by_excess(seq: &ByExcessSeq) -> Result<f64> {
    let mut w = match seq.remainder {
        Some(y) => {
            if y <= 1.0 {
                return Err(Error::DivergentRemainder { denom: y });
            }
            1.0 / y
        }
        None => 1.0,
    };
    for t in seq.tokens.iter().rev() {
        match *t {
            Big(a) => {
                let denom = a as f64 - w;
                if denom <= 0.0 {
                    return Err(Error::DivergentRemainder { denom });
                }
                w = 1.0 / denom;
            }
            Run2(s) => {
                let denom = -(s as f64) * w + s as f64 + 1.0;
                if denom <= 0.0 {
                    return Err(Error::DivergentRemainder { denom });
                }
                w = apply_run2(s, w);
            }
        }
    }
    Ok(w)
}

/// By-excess digits of `x` to the given depth, with the final iterate
/// folded into the remainder so the truncation is exact.
pub fn expand_by_excess(x: f64, depth: u32) -> Result<ByExcessSeq> {
    if !(0.0..1.0).contains(&x) || x == 0.0 {
        return Err(Error::OutOfDomain { value: x, lo: 0.0, hi: 1.0 });
    }
    let mut digits = Vec::with_capacity(depth as usize);
    let mut w = x;
    for _ in 0..depth {
        let (next, a) = m_zero(w)?;
        digits.push(a);
        w = next;
        if w == 0.0 {
            break;
        }
    }
    let remainder = if (1.0 - w).abs() < 1e-15 || w == 0.0 {
        None // all-2 tail from here on
    } else {
        Some(1.0 / w)
    };
    Ok(ByExcessSeq::from_digits(&digits, remainder))
}

/// Admissibility classes of token strings for a fixed `r >= 3`. The
/// bounds restrict the first token and all later tokens separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqClass {
    /// First token: run length `<= r-1` or digit `<= r`.
    Plus,
    /// Every token: run length `<= r-2`, digit `<= r+1`.
    Minus,
    /// `Inner(i)`, `2 <= i <= r-1`: first run `<= r-1-i`, first digit
    /// `<= r+1`, later tokens as in `Minus`.
    Inner(u32),
}

/// Class parameters: admissible bounds for the first token.
fn first_token_bounds(class: SeqClass, r: u32) -> (u32, u32) {
    match class {
        SeqClass::Plus => (r - 1, r),
        SeqClass::Minus => (r - 2, r + 1),
        SeqClass::Inner(i) => {
            debug_assert!((2..=r - 1).contains(&i));
            (r - 1 - i, r + 1)
        }
    }
}

/// Whether a token string satisfies the class bounds: first-token
/// limits, later-token limits, and no run followed by another run.
pub fn is_admissible(tokens: &[ByExcessToken], class: SeqClass, r: u32) -> bool {
    assert!(r >= 3, "admissibility classes need r >= 3");
    if !tokens_canonical(tokens) {
        return false;
    }
    let (first_run, first_big) = first_token_bounds(class, r);
    for (i, t) in tokens.iter().enumerate() {
        let (run_max, big_max) = if i == 0 { (first_run, first_big) } else { (r - 2, r + 1) };
        match *t {
            Run2(s) if s > run_max => return false,
            Big(a) if a > big_max => return false,
            _ => {}
        }
    }
    true
}

// ---------------------------------------------------------------------
// Reflection: the expansion of 1 - x from the expansion of x.
// ---------------------------------------------------------------------

/// Decrement the leading digit of a token list (the digit that rule
/// application hands to the next step), merging a produced 2 into a
/// following run.
fn decrement_leading(tokens: &[ByExcessToken]) -> Vec<ByExcessToken> {
    let mut out = Vec::with_capacity(tokens.len());
    match tokens[0] {
        Big(a) if a >= 4 => {
            out.push(Big(a - 1));
            out.extend_from_slice(&tokens[1..]);
        }
        Big(_) => {
            // 3 - 1 = 2 joins a following run of 2s
            if let Some(Run2(s)) = tokens.get(1) {
                out.push(Run2(s + 1));
                out.extend_from_slice(&tokens[2..]);
            } else {
                out.push(Run2(1));
                out.extend_from_slice(&tokens[1..]);
            }
        }
        Run2(_) => unreachable!("rules only decrement digits >= 3"),
    }
    out
}

fn push_run(out: &mut Vec<ByExcessToken>, s: u32) {
    if s == 0 {
        return;
    }
    if let Some(Run2(last)) = out.last_mut() {
        *last += s;
    } else {
        out.push(Run2(s));
    }
}

/// Reflection of a semicolon-form sequence: returns the by-excess
/// expansion of `1 - eval(seq)`.
///
/// Each step rewrites the leading token pattern (digit-digit,
/// digit-run-digit, or run-digit) into reflected output tokens and a
/// smaller subproblem with the next digit decremented. When only the
/// real remainder is left it plays the role of the next digit, which is
/// legitimate for any remainder above 2; remainders at or below 2 are
/// first absorbed into the preceding tokens.
pub fn reflect(seq: &ByExcessSeq) -> Result<ByExcessSeq> {
    let Some(y0) = seq.remainder else {
        return Err(Error::PatternExhausted);
    };
    if y0 <= 1.0 {
        return Err(Error::DivergentRemainder { denom: y0 });
    }
    // Normalise: absorb trailing tokens until the remainder exceeds 2.
    let mut tokens = seq.tokens.clone();
    let mut y = y0;
    while y <= 2.0 {
        match tokens.pop() {
            Some(Big(a)) => y = a as f64 - 1.0 / y,
            Some(Run2(s)) => {
                y = 2.0 - 1.0 / y;
                if s > 1 {
                    tokens.push(Run2(s - 1));
                }
            }
            None => break,
        }
        if y <= 1.0 {
            return Err(Error::DivergentRemainder { denom: y });
        }
    }

    let mut out: Vec<ByExcessToken> = Vec::new();
    let mut cur = tokens;
    loop {
        if cur.is_empty() {
            // 1 - 1/y
            return Ok(ByExcessSeq::new(out, Some(y / (y - 1.0))));
        }
        match cur[0] {
            Big(h1) => {
                let terminal = match cur.get(1) {
                    None => true,                                  // rule 1, remainder as digit
                    Some(Run2(_)) if cur.get(2).is_none() => true, // rule 2, remainder as digit
                    _ => false,
                };
                push_run(&mut out, h1 - 2);
                match (cur.get(1), terminal) {
                    (None, _) => {
                        out.push(Big(3));
                        return Ok(ByExcessSeq::new(out, Some((y - 1.0) / (y - 2.0))));
                    }
                    (Some(&Run2(n)), true) => {
                        out.push(Big(n + 3));
                        return Ok(ByExcessSeq::new(out, Some((y - 1.0) / (y - 2.0))));
                    }
                    (Some(&Big(_)), _) => {
                        out.push(Big(3));
                        cur = decrement_leading(&cur[1..]);
                    }
                    (Some(&Run2(n)), false) => {
                        out.push(Big(n + 3));
                        cur = decrement_leading(&cur[2..]);
                    }
                }
            }
            Run2(n) => match cur.get(1) {
                None => {
                    // 1 - <2^n; y> = 1/(n + 1 + 1/(y-1))
                    return Ok(ByExcessSeq::new(out, Some(n as f64 + 1.0 + 1.0 / (y - 1.0))));
                }
                Some(&Big(_)) => {
                    out.push(Big(n + 2));
                    cur = decrement_leading(&cur[1..]);
                }
                Some(&Run2(_)) => unreachable!("canonical form has no adjacent runs"),
            },
        }
    }
}

// ---------------------------------------------------------------------
// Cylinders of rank n for the interval maps.
// ---------------------------------------------------------------------

/// Interval of a rank-`n` cylinder, or `Empty` when the digit string is
/// not realised for this parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CylinderInterval {
    Empty,
    Interval { lo: f64, hi: f64 },
}

/// Width below which a pulled-back cylinder counts as empty.
pub const CYLINDER_EMPTY_TOL: f64 = 1e-14;

/// Pull the full interval back through the inverse branches, recording
/// whether any step clipped against a rank-1 cylinder boundary.
fn pull_back(ctx: &AlphaContext, digits: &[Digit]) -> Option<(f64, f64, bool)> {
    assert!(!digits.is_empty(), "cylinder needs at least one digit");
    let (mut lo, mut hi) = ctx.interval();
    let mut clipped = false;
    for d in digits.iter().rev() {
        let (c_lo, c_hi) = ctx.cylinder_rank1(*d)?;
        let j = d.j as f64;
        // inverse branch endpoints, sorted (the plus branch reverses order)
        let (a, b) = match d.sign {
            crate::maps::Sign::Plus => (1.0 / (j + hi), 1.0 / (j + lo)),
            crate::maps::Sign::Minus => (-1.0 / (j + lo), -1.0 / (j + hi)),
        };
        let tol = 1e-15f64.max(1e-9 * (b - a));
        clipped |= c_lo > a + tol || c_hi < b - tol;
        lo = a.max(c_lo);
        hi = b.min(c_hi);
        if hi - lo < CYLINDER_EMPTY_TOL {
            return None;
        }
    }
    Some((lo, hi, clipped))
}

/// The set of points whose first `n` digits match `digits`, computed by
/// pulling the full interval back through the inverse branches and
/// intersecting with each rank-1 cylinder along the way.
pub fn cylinder_interval(ctx: &AlphaContext, digits: &[Digit]) -> CylinderInterval {
    match pull_back(ctx, digits) {
        None => CylinderInterval::Empty,
        Some((lo, hi, _)) => CylinderInterval::Interval { lo, hi },
    }
}

/// Whether the cylinder maps onto the whole interval after `n` steps.
/// Equivalent to no pull-back step having clipped: the forward image is
/// the full interval exactly when every inverse-branch image of the
/// suffix set fits inside its rank-1 cylinder. (Pushing the endpoints
/// forward instead would amplify their rounding by the full derivative
/// of the composition.)
pub fn is_full_cylinder(ctx: &AlphaContext, digits: &[Digit]) -> bool {
    matches!(pull_back(ctx, digits), Some((_, _, false)))
}

/// Result of sampling derivative ratios over a cylinder against the
/// distortion bound `exp(4 / (1 - (1-alpha)^2))`.
#[derive(Clone, Copy, Debug)]
pub struct DistortionCheck {
    pub ratio_sup: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Analytic distortion constant for the parameter.
pub fn distortion_bound(alpha: f64) -> f64 {
    let lam = (1.0 - alpha) * (1.0 - alpha);
    (4.0 / (1.0 - lam)).exp()
}

/// Sample at least `samples` points across the cylinder and compare the
/// largest ratio of `|(T^n)'|` values with the analytic bound.
pub fn distortion_check(
    ctx: &AlphaContext,
    digits: &[Digit],
    samples: usize,
) -> Result<DistortionCheck> {
    let CylinderInterval::Interval { lo, hi } = cylinder_interval(ctx, digits) else {
        return Err(Error::EmptyCylinder {
            j: digits[0].j,
            sign: digits[0].sign.as_char(),
            alpha: ctx.alpha(),
        });
    };
    let m = samples.max(100);
    let mut log_min = f64::INFINITY;
    let mut log_max = f64::NEG_INFINITY;
    // shrink slightly inside the cylinder to dodge endpoint rounding
    let pad = (hi - lo) * 1e-9;
    for k in 0..=m {
        let x = (lo + pad) + (hi - lo - 2.0 * pad) * k as f64 / m as f64;
        let mut y = x;
        let mut log_deriv = 0.0;
        for d in digits {
            log_deriv += -2.0 * y.abs().ln(); // log |T'(y)| = -2 log |y|
            y = ctx.branch_apply(*d, y);
        }
        log_min = log_min.min(log_deriv);
        log_max = log_max.max(log_deriv);
    }
    let bound = distortion_bound(ctx.alpha());
    let ratio_sup = (log_max - log_min).exp();
    Ok(DistortionCheck { ratio_sup, bound, ok: ratio_sup <= bound })
}

/// Validate the digit-wise constraints of a digit string against a
/// context: plus digits need `j >= j_min`, minus digits `j >= 2`.
pub fn digits_valid(ctx: &AlphaContext, digits: &DigitSeq) -> bool {
    digits.iter().all(|d| match d.sign {
        crate::maps::Sign::Plus => ctx.j_min().is_some_and(|jm| d.j >= jm),
        crate::maps::Sign::Minus => d.j >= 2,
    })
}
