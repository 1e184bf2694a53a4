//! Exact arithmetic in the cyclotomic field Q(ζ_q) for a prime q.
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{q-2}, which has
//! length φ(q) = q − 1. Products are formed modulo x^q − 1 and then reduced
//! with ζ^{q-1} = −(1 + ζ + … + ζ^{q-2}). For q = 2 the field is Q and ζ = −1.
//!
//! Signs of real elements are decided in the embedding ζ ↦ e^{2πi/q} using
//! dyadic interval enclosures of cos(2πk/q), refined until the enclosure
//! excludes zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// An element of Q(ζ_q), stored as integer numerators over one positive
/// common denominator, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicElement {
    q: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CyclotomicElement {
    pub fn zero(q: u32) -> Self {
        assert!(q >= 2, "cyclotomic order must be at least 2");
        Self {
            q,
            num: vec![BigInt::zero(); (q - 1) as usize],
            den: BigInt::one(),
        }
    }

    pub fn one(q: u32) -> Self {
        Self::from_integer(q, 1)
    }

    pub fn from_integer(q: u32, n: i64) -> Self {
        let mut e = Self::zero(q);
        e.num[0] = BigInt::from(n);
        e
    }

    pub fn from_rational(q: u32, r: BigRational) -> Self {
        let mut e = Self::zero(q);
        e.num[0] = r.numer().clone();
        e.den = r.denom().clone();
        e.reduce()
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(q: u32, k: i64) -> Self {
        let mut full = vec![BigInt::zero(); q as usize];
        full[k.rem_euclid(q as i64) as usize] = BigInt::one();
        Self::from_full(q, full, BigInt::one())
    }

    /// Builds an element from power-basis coefficients (length q − 1).
    pub fn from_coefficients(q: u32, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), (q - 1) as usize);
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self { q, num, den }.reduce()
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True when every coefficient other than the constant term vanishes.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    fn reduce(mut self) -> Self {
        if self.den.is_negative() {
            self.den = -self.den;
            self.num.iter_mut().for_each(|n| *n = -&*n);
        }
        let g = self.num.iter().fold(self.den.clone(), |g, n| g.gcd(n));
        if !g.is_one() {
            self.num.iter_mut().for_each(|n| *n /= &g);
            self.den /= &g;
        }
        self
    }

    fn from_full(q: u32, mut full: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(full.len(), q as usize);
        let top = full.pop().expect("q >= 2");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        Self { q, num: full, den }.reduce()
    }

    /// Applies the Galois automorphism ζ ↦ ζ^a (a coprime to q).
    pub fn galois(&self, a: i64) -> Self {
        let q = self.q as i64;
        debug_assert!(a.rem_euclid(q) != 0);
        let mut full = vec![BigInt::zero(); self.q as usize];
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                full[(a * k as i64).rem_euclid(q) as usize] = c.clone();
            }
        }
        Self::from_full(self.q, full, self.den.clone())
    }

    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            q: self.q,
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
        }
        .reduce()
    }

    /// Field norm down to Q: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for a in 2..self.q as i64 {
            acc = &acc * &self.galois(a);
        }
        debug_assert!(acc.is_rational());
        BigRational::new(acc.num[0].clone(), acc.den)
    }

    /// Multiplicative inverse via x^{-1} = (∏_{a≠1} σ_a(x)) / N(x).
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut cofactor = Self::one(self.q);
        for a in 2..self.q as i64 {
            cofactor = &cofactor * &self.galois(a);
        }
        let prod = &cofactor * self;
        let norm = BigRational::new(prod.num[0].clone(), prod.den);
        Some(cofactor.scale(&norm.recip()))
    }

    /// Sign of a real element under ζ ↦ e^{2πi/q}.
    ///
    /// Panics if the element is not fixed by conjugation.
    pub fn real_sign(&self, embedding: &mut RealEmbedding) -> Ordering {
        assert!(self.is_real(), "sign requested for a non-real element");
        assert_eq!(embedding.q, self.q);
        if self.is_rational() {
            return self.num[0].cmp(&BigInt::zero());
        }
        let mut bits = embedding.bits;
        loop {
            let (lo, hi) = embedding.enclose(self, bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
            assert!(bits <= 1 << 20, "sign refinement did not terminate");
        }
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})ζ{}", c, self.q)?,
                _ => write!(f, "({})ζ{}^{}", c, self.q, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn combine(
    a: &CyclotomicElement,
    b: &CyclotomicElement,
    op: impl Fn(BigInt, BigInt) -> BigInt,
) -> CyclotomicElement {
    assert_eq!(a.q, b.q);
    if a.den == b.den {
        let num = a.num.iter().zip(&b.num).map(|(x, y)| op(x.clone(), y.clone())).collect();
        return CyclotomicElement { q: a.q, num, den: a.den.clone() }.reduce();
    }
    let den = a.den.lcm(&b.den);
    let (fa, fb) = (&den / &a.den, &den / &b.den);
    let num = a
        .num
        .iter()
        .zip(&b.num)
        .map(|(x, y)| op(x * &fa, y * &fb))
        .collect();
    CyclotomicElement { q: a.q, num, den }.reduce()
}

impl<'a> Add<&'a CyclotomicElement> for &'a CyclotomicElement {
    type Output = CyclotomicElement;

    fn add(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        combine(self, rhs, |x, y| x + y)
    }
}

impl<'a> Sub<&'a CyclotomicElement> for &'a CyclotomicElement {
    type Output = CyclotomicElement;

    fn sub(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        combine(self, rhs, |x, y| x - y)
    }
}

impl Neg for &CyclotomicElement {
    type Output = CyclotomicElement;

    fn neg(self) -> CyclotomicElement {
        CyclotomicElement {
            q: self.q,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a CyclotomicElement> for &'a CyclotomicElement {
    type Output = CyclotomicElement;

    fn mul(self, rhs: &CyclotomicElement) -> CyclotomicElement {
        assert_eq!(self.q, rhs.q);
        let q = self.q as usize;
        let mut out = vec![BigInt::zero(); q];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % q] += a * b;
            }
        }
        CyclotomicElement::from_full(self.q, out, &self.den * &rhs.den)
    }
}

/// Dyadic enclosures of cos(2πk/q), k = 0..q−1, stored as integers scaled by
/// 2^bits.
#[derive(Debug, Clone)]
pub struct RealEmbedding {
    q: u32,
    bits: u32,
    cos: Vec<(BigInt, BigInt)>,
}

impl RealEmbedding {
    pub fn new(q: u32) -> Self {
        let bits = 64;
        Self {
            q,
            bits,
            cos: cos_table(q, bits),
        }
    }

    /// Enclosure of x·den·2^bits, whose sign is the sign of x.
    fn enclose(&mut self, x: &CyclotomicElement, bits: u32) -> (BigInt, BigInt) {
        if bits > self.bits {
            self.bits = bits;
            self.cos = cos_table(self.q, bits);
        }
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (c, (clo, chi)) in x.num.iter().zip(&self.cos) {
            if c.is_zero() {
                continue;
            }
            if c.is_positive() {
                lo += c * clo;
                hi += c * chi;
            } else {
                lo += c * chi;
                hi += c * clo;
            }
        }
        (lo, hi)
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Rounds `x` down to a multiple of 2^-bits.
fn round_down(x: &BigRational, bits: u32) -> BigRational {
    BigRational::new(scaled_floor(x, bits), pow2(bits))
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    BigRational::new(scaled_ceil(x, bits), pow2(bits))
}

fn scaled_floor(x: &BigRational, bits: u32) -> BigInt {
    (x * BigRational::from_integer(pow2(bits))).floor().to_integer()
}

fn scaled_ceil(x: &BigRational, bits: u32) -> BigInt {
    (x * BigRational::from_integer(pow2(bits))).ceil().to_integer()
}

/// Enclosure of arctan(1/n) for an integer n ≥ 2, by alternating series.
fn arctan_inv(n: i64, eps: &BigRational) -> (BigRational, BigRational) {
    let x = BigRational::new(BigInt::one(), BigInt::from(n));
    let x2 = &x * &x;
    let mut power = x.clone();
    let mut sum = BigRational::zero();
    let mut k: i64 = 0;
    loop {
        let term = &power / BigRational::from_integer(BigInt::from(2 * k + 1));
        if &term < eps && k > 0 {
            // The partial sum and the partial sum plus the next signed term
            // bracket the limit.
            let next = if k % 2 == 0 { &sum + &term } else { &sum - &term };
            return if sum < next { (sum, next) } else { (next, sum) };
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        power = &power * &x2;
        k += 1;
    }
}

/// Enclosure of π via Machin's formula π = 16 arctan(1/5) − 4 arctan(1/239).
fn pi_enclosure(bits: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), pow2(bits + 8));
    let (a_lo, a_hi) = arctan_inv(5, &eps);
    let (b_lo, b_hi) = arctan_inv(239, &eps);
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    let lo = &sixteen * &a_lo - &four * &b_hi;
    let hi = &sixteen * &a_hi - &four * &b_lo;
    (round_down(&lo, bits + 4), round_up(&hi, bits + 4))
}

/// Enclosure of cos(t) for rational 0 ≤ t ≤ 4 by the alternating Taylor series.
fn cos_at(t: &BigRational, eps: &BigRational) -> (BigRational, BigRational) {
    let t2 = t * t;
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut n: i64 = 0;
    loop {
        // Terms t^{2n}/(2n)! decrease monotonically once n ≥ 2 for t ≤ 4.
        if n >= 3 && &term < eps {
            let next = if n % 2 == 0 { &sum + &term } else { &sum - &term };
            return if sum < next { (sum, next) } else { (next, sum) };
        }
        if n % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        let denom = BigRational::from_integer(BigInt::from((2 * n + 1) * (2 * n + 2)));
        term = &term * &t2 / denom;
        n += 1;
    }
}

fn cos_table(q: u32, bits: u32) -> Vec<(BigInt, BigInt)> {
    let (pi_lo, pi_hi) = pi_enclosure(bits);
    let eps = BigRational::new(BigInt::one(), pow2(bits + 8));
    (0..q)
        .map(|k| {
            let k = k.min(q - k);
            if k == 0 {
                return (pow2(bits), pow2(bits));
            }
            if 2 * k == q {
                return (-pow2(bits), -pow2(bits));
            }
            // θ = 2πk/q lies strictly inside (0, π), where cos is decreasing.
            let scale = BigRational::new(BigInt::from(2 * k), BigInt::from(q));
            let t_lo = round_down(&(&pi_lo * &scale), bits + 4);
            let t_hi = round_up(&(&pi_hi * &scale), bits + 4);
            let (lo, _) = cos_at(&t_hi, &eps);
            let (_, hi) = cos_at(&t_lo, &eps);
            (scaled_floor(&lo, bits), scaled_ceil(&hi, bits))
        })
        .collect()
}
