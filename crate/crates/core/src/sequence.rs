//! The δ_j → ξ_j → j → θ pipeline and the calculus of δ-sequences.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::Prime;

/// A non-increasing, eventually constant integer sequence δ_0, δ_1, …
///
/// Stored as a finite prefix followed by the stable value. Trailing prefix
/// entries equal to the stable value are dropped, so two sequences are equal
/// exactly when they agree at every index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct DeltaSequence {
    values: Vec<i64>,
    stable: i64,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    values: Vec<i64>,
    stable: i64,
}

impl DeltaSequence {
    pub fn new(mut values: Vec<i64>, stable: i64) -> Result<Self> {
        if let Some(w) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidSequence(format!(
                "entry {} ({}) exceeds entry {} ({})",
                w + 1,
                values[w + 1],
                w,
                values[w]
            )));
        }
        if let Some(&last) = values.last() {
            if last < stable {
                return Err(Error::InvalidSequence(format!(
                    "last listed entry {last} is below the stable value {stable}"
                )));
            }
        }
        while values.last() == Some(&stable) {
            values.pop();
        }
        Ok(Self { values, stable })
    }

    pub fn constant(c: i64) -> Self {
        Self {
            values: Vec::new(),
            stable: c,
        }
    }

    pub fn get(&self, j: usize) -> i64 {
        self.values.get(j).copied().unwrap_or(self.stable)
    }

    /// The listed prefix, without trailing stable entries.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn stable(&self) -> i64 {
        self.stable
    }

    /// Index from which the sequence is constant.
    pub fn settle_index(&self) -> usize {
        self.values.len()
    }

    pub fn prefix(&self, n: usize) -> Vec<i64> {
        (0..n).map(|j| self.get(j)).collect()
    }

    /// Pointwise comparison: every entry of `self` is at most the matching
    /// entry of `other`.
    pub fn le(&self, other: &Self) -> bool {
        let n = self.settle_index().max(other.settle_index()) + 1;
        (0..n).all(|j| self.get(j) <= other.get(j))
    }

    fn min_plus(&self, other: &Self) -> Self {
        let n = self.settle_index() + other.settle_index();
        let values = (0..n)
            .map(|k| (0..=k).map(|i| self.get(i) + other.get(k - i)).min().unwrap())
            .collect();
        Self::new(values, self.stable + other.stable).expect("min-plus keeps the shape")
    }
}

impl TryFrom<RawSequence> for DeltaSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        Self::new(raw.values, raw.stable)
    }
}

impl From<DeltaSequence> for RawSequence {
    fn from(d: DeltaSequence) -> Self {
        RawSequence {
            values: d.values,
            stable: d.stable,
        }
    }
}

impl fmt::Display for DeltaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for v in &self.values {
            write!(f, "{v}, ")?;
        }
        write!(f, "{}, ...)", self.stable)
    }
}

/// A pointwise upper bound on the δ-sequence of a connected sum. Not an
/// exact sequence, so it never feeds an exact θ computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpperDeltaSequence(DeltaSequence);

impl UpperDeltaSequence {
    pub fn bound(&self, j: usize) -> i64 {
        self.0.get(j)
    }

    pub fn shape(&self) -> &DeltaSequence {
        &self.0
    }

    /// Min-plus convolution of two upper bounds.
    pub fn convolve(&self, other: &Self) -> Self {
        Self(self.0.min_plus(&other.0))
    }
}

impl From<DeltaSequence> for UpperDeltaSequence {
    fn from(d: DeltaSequence) -> Self {
        Self(d)
    }
}

impl fmt::Display for UpperDeltaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "≤ {}", self.0)
    }
}

/// Upper bound out[k] = min_{i+j=k} d1[i] + d2[j] on the δ-sequence of
/// K₁ + K₂.
pub fn sum_delta_upper(d1: &DeltaSequence, d2: &DeltaSequence) -> UpperDeltaSequence {
    UpperDeltaSequence(d1.min_plus(d2))
}

/// ξ_j = δ_j/4 + σ^(q)/8: non-negative, non-increasing, eventually 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XiSequence(DeltaSequence);

impl XiSequence {
    pub fn get(&self, j: usize) -> i64 {
        self.0.get(j)
    }

    pub fn values(&self) -> &[i64] {
        self.0.values()
    }

    pub fn stable(&self) -> i64 {
        self.0.stable()
    }

    pub fn prefix(&self, n: usize) -> Vec<i64> {
        self.0.prefix(n)
    }

    /// ρ_j = ξ_{j − σ/2}, with ξ_i = ξ_0 for negative i.
    pub fn rho(&self, sigma: i64, j: i64) -> i64 {
        let i = j - sigma / 2;
        self.get(i.max(0) as usize)
    }

    /// Smallest j ≥ 0 with ρ_j = 0.
    pub fn rho_zero(&self, sigma: i64) -> Result<u64> {
        let first = j_value(self)? as i64;
        if first == 0 {
            return Ok(0);
        }
        Ok((first + sigma / 2).max(0) as u64)
    }
}

impl fmt::Display for XiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn xi_sequence(delta: &DeltaSequence, sigq: i64) -> Result<XiSequence> {
    let xi = |d: i64| -> Result<i64> {
        let num = 2 * d + sigq;
        if num % 8 != 0 {
            return Err(Error::InconsistentDelta(format!(
                "δ/4 + σ/8 = {d}/4 + {sigq}/8 is not an integer"
            )));
        }
        let x = num / 8;
        if x < 0 {
            return Err(Error::InconsistentDelta(format!(
                "δ = {d} lies below -σ/2 = {}",
                -sigq / 2
            )));
        }
        Ok(x)
    };
    let values = delta
        .values()
        .iter()
        .map(|&d| xi(d))
        .collect::<Result<Vec<_>>>()?;
    let stable = xi(delta.stable())?;
    Ok(XiSequence(DeltaSequence::new(values, stable)?))
}

/// First index where ξ vanishes.
pub fn j_value(xi: &XiSequence) -> Result<u64> {
    if xi.stable() != 0 {
        return Err(Error::NeverVanishes(xi.stable()));
    }
    Ok(xi.values().len() as u64)
}

/// Least j with δ_j ≤ m − σ/2.
pub fn j_value_m(delta: &DeltaSequence, sigq: i64, m: u64) -> Result<u64> {
    if 2 * delta.stable() < -sigq {
        return Err(Error::InconsistentDelta(format!(
            "stable value {} lies below -σ/2",
            delta.stable()
        )));
    }
    let m = m as i64;
    let within = |d: i64| 2 * d <= 2 * m - sigq;
    if !within(delta.stable()) {
        return Err(Error::ThresholdUnreachable {
            stable: delta.stable(),
            threshold: (2 * m - sigq).div_euclid(2),
        });
    }
    let first = (0..delta.settle_index())
        .find(|&j| within(delta.get(j)))
        .unwrap_or(delta.settle_index());
    Ok(first as u64)
}

/// A value of θ^(q), a non-negative multiple of 1/(q − 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThetaValue {
    numerator: u64,
    q: Prime,
}

impl ThetaValue {
    pub fn numerator(self) -> u64 {
        self.numerator
    }

    pub fn denominator(self) -> u64 {
        u64::from(self.q.get() - 1)
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(self.numerator as i64, self.denominator() as i64)
    }
}

impl fmt::Display for ThetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// θ^(q)(K) from j^(q)(−K) and σ^(q)(K).
///
/// For q = 2 this is max{0, j − σ/2}; for odd q it is
/// max{0, (2j − σ/2)/(q − 1)}.
pub fn theta(q: Prime, j_mirror: u64, sigq: i64) -> ThetaValue {
    let j = j_mirror as i64;
    let num = if q.is_odd() {
        2 * j - sigq / 2
    } else {
        j - sigq / 2
    };
    ThetaValue {
        numerator: num.max(0) as u64,
        q,
    }
}

/// θ^(q)(K, m) from j^(q)(−K, m) and σ^(q)(K); same shape as [`theta`].
pub fn theta_m(q: Prime, j_m_mirror: u64, sigq: i64) -> ThetaValue {
    theta(q, j_m_mirror, sigq)
}

/// The two torus knot families with closed-form δ-sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusFamily {
    /// T(3, 6n − 1)
    Minus,
    /// T(3, 6n + 1)
    Plus,
}

impl TorusFamily {
    pub fn second_index(self, n: u64) -> u64 {
        match self {
            Self::Minus => 6 * n - 1,
            Self::Plus => 6 * n + 1,
        }
    }

    /// σ(T(3, 6n ± 1)) = −8n.
    pub fn signature(self, n: u64) -> i64 {
        -8 * n as i64
    }
}

/// δ-sequence of T(3, 6n ± 1) or its mirror. Positive torus knots have the
/// constant sequence −σ/2.
pub fn torus_delta_sequence(family: TorusFamily, n: u64, mirrored: bool) -> DeltaSequence {
    assert!(n >= 1, "torus family index starts at 1");
    let n = n as i64;
    if !mirrored {
        return DeltaSequence::constant(4 * n);
    }
    let values = match family {
        TorusFamily::Minus => (0..(2 * n - 2).max(0)).map(|j| -4 * (j / 2 + 1)).collect(),
        TorusFamily::Plus => (0..2 * n).map(|j| -4 * (j / 2)).collect(),
    };
    DeltaSequence::new(values, -4 * n).expect("closed form is non-increasing")
}

/// Interval of rationals with an optional upper end, plus the reasons for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundInterval {
    pub lower: Rational64,
    pub upper: Option<Rational64>,
    pub justification: Vec<String>,
}

impl BoundInterval {
    pub fn new(lower: Rational64, upper: Option<Rational64>) -> Self {
        Self {
            lower,
            upper,
            justification: Vec::new(),
        }
    }

    pub fn exact(v: Rational64) -> Self {
        Self::new(v, Some(v))
    }

    pub fn integers(lower: i64, upper: Option<i64>) -> Self {
        Self::new(lower.into(), upper.map(Rational64::from))
    }

    pub fn unbounded() -> Self {
        Self::new(Rational64::zero(), None)
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.justification.push(reason.into());
        self
    }

    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    pub fn contains(&self, x: Rational64) -> bool {
        self.lower <= x && self.upper.map_or(true, |u| x <= u)
    }

    /// `self` lies inside `other`.
    pub fn within(&self, other: &Self) -> bool {
        self.lower >= other.lower
            && match (self.upper, other.upper) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a <= b,
            }
    }
}

impl fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) if u == self.lower => write!(f, "{u}"),
            Some(u) => write!(f, "[{}, {u}]", self.lower),
            None => write!(f, "[{}, ∞)", self.lower),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    /// Bound j(K₊) from a bound on j(K₋).
    PlusFromMinus,
    /// Bound j(K₋) from a bound on j(K₊).
    MinusFromPlus,
}

/// Shifts (α, β) with j(K₊) − β ≤ j(K₋) ≤ j(K₊) + α for a change of a
/// positive crossing of K₊ into a negative one.
pub fn crossing_shifts(q: Prime, sigq_plus: i64, sigq_minus: i64) -> Result<(i64, i64)> {
    let jump = sigq_plus - sigq_minus;
    let bad = || {
        Error::RelationInconsistent(format!(
            "σ(K+) − σ(K−) = {jump} is not an admissible jump for q = {q}"
        ))
    };
    if q.is_odd() {
        let qm = q.as_i64() - 1;
        if jump > 0 || jump < -qm || jump % 4 != 0 {
            return Err(bad());
        }
        Ok((qm / 2 + jump / 4, -jump / 4))
    } else {
        if jump != 0 && jump != -2 {
            return Err(bad());
        }
        Ok((1 + jump / 2, -jump / 2))
    }
}

pub fn crossing_change_j_bounds(
    q: Prime,
    known: &BoundInterval,
    sigq_plus: i64,
    sigq_minus: i64,
    direction: CrossingDirection,
) -> Result<BoundInterval> {
    let (alpha, beta) = crossing_shifts(q, sigq_plus, sigq_minus)?;
    let (down, up) = match direction {
        CrossingDirection::MinusFromPlus => (beta, alpha),
        CrossingDirection::PlusFromMinus => (alpha, beta),
    };
    let lower = (known.lower - down).max(Rational64::zero());
    let upper = known.upper.map(|u| u + up);
    Ok(BoundInterval::new(lower, upper)
        .with_reason(format!("crossing change shifts α = {alpha}, β = {beta}")))
}

/// Lower bound ℓ(−K)/(q−1) − m/(2(q−1)) − 3σ^(q)(K)/(4(q−1)) on θ^(q)(K, m).
pub fn ell_lower_bound(q: Prime, ell_mirror: i64, sigq: i64, m: u64) -> Rational64 {
    let d = q.as_i64() - 1;
    Rational64::new(ell_mirror, d) - Rational64::new(m as i64, 2 * d)
        - Rational64::new(3 * sigq, 4 * d)
}

/// Rounds up to the next multiple of 1/(q − 1).
pub fn snap_up(x: Rational64, q: Prime) -> Rational64 {
    let d = q.as_i64() - 1;
    Rational64::new((x * d).ceil().to_integer(), d)
}

/// Rounds down to the previous multiple of 1/(q − 1).
pub fn snap_down(x: Rational64, q: Prime) -> Rational64 {
    let d = q.as_i64() - 1;
    Rational64::new((x * d).floor().to_integer(), d)
}

pub(crate) fn nonneg(x: Rational64) -> Rational64 {
    if x.is_negative() {
        Rational64::zero()
    } else {
        x
    }
}
