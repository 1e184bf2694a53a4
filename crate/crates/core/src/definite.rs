//! Lower bounds on the genus of surfaces bounding a knot in a negative
//! definite 4-manifold X with ∂X = S³ and H₁(X) = 0.
//!
//! The intersection form of X is taken to be diag(−1, …, −1) in a basis
//! e_1, …, e_r. For a positive definite X, apply the bounds to the mirror
//! knot in the reversed manifold.

use std::fmt;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infer::{infer_theta_m, Inference};
use crate::knot::{KnotExpression, Ledger};
use crate::prime::Prime;

/// The form diag(−1, …, −1) of rank r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DefiniteForm {
    pub rank: usize,
}

impl DefiniteForm {
    pub fn new(rank: usize) -> Self {
        Self { rank }
    }

    pub fn class(&self, coords: Vec<i64>) -> Result<HomologyClass> {
        if coords.len() != self.rank {
            return Err(Error::Hypotheses(format!(
                "class has {} coordinates but the form has rank {}",
                coords.len(),
                self.rank
            )));
        }
        Ok(HomologyClass { coords })
    }
}

/// A class a = Σ aᵢ eᵢ in H₂(X).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomologyClass {
    coords: Vec<i64>,
}

impl HomologyClass {
    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// a² = −Σ aᵢ².
    pub fn square(&self) -> i64 {
        -self.coords.iter().map(|a| a * a).sum::<i64>()
    }

    pub fn l1_norm(&self) -> i64 {
        self.coords.iter().map(|a| a.abs()).sum()
    }

    pub fn is_divisible_by(&self, q: i64) -> bool {
        self.coords.iter().all(|a| a % q == 0)
    }

    pub fn divide(&self, q: i64) -> Option<Self> {
        self.is_divisible_by(q)
            .then(|| Self::new(self.coords.iter().map(|a| a / q).collect()))
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// η(x) = min over characteristic c of −(x+c)² − b₂(X), which is minus the
/// number of odd coordinates of x.
pub fn eta(x: &HomologyClass) -> i64 {
    -(x.coords.iter().filter(|a| *a % 2 != 0).count() as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusBound {
    pub bound: Rational64,
    /// a² of the class.
    pub a_sq: i64,
    /// The m at which θ(K, m) is evaluated.
    pub m: u64,
    /// Bounds on θ(K, m); the genus bound uses the lower end.
    pub theta: Inference,
}

impl GenusBound {
    /// Whether θ(K, m) was known exactly rather than only bounded below.
    pub fn uses_exact_theta(&self) -> bool {
        self.theta.is_exact()
    }
}

/// g(Σ) ≥ θ^(q)(K, m) + ((q+1)/(6q))·a² with m = −((q²−1)/(6q))·a², for a
/// surface in the class a, q an odd prime dividing a.
pub fn genus_bound_odd_q(
    ledger: &Ledger,
    expr: &KnotExpression,
    q: Prime,
    a: &HomologyClass,
) -> Result<GenusBound> {
    if !q.is_odd() {
        return Err(Error::Hypotheses(
            "the odd-prime bound needs q odd; use the q = 2 bound".to_string(),
        ));
    }
    let qi = q.as_i64();
    if !a.is_divisible_by(qi) {
        return Err(Error::Hypotheses(format!("class {a} is not divisible by q = {qi}")));
    }
    let a_sq = a.square();
    let m = Rational64::new(-(qi * qi - 1) * a_sq, 6 * qi);
    if !m.is_integer() {
        return Err(Error::Hypotheses(format!("m = {m} is not an integer")));
    }
    let m = m.to_integer() as u64;
    let theta = infer_theta_m(ledger, expr, q, m)?;
    let bound = theta.bounds.lower + Rational64::new((qi + 1) * a_sq, 6 * qi);
    Ok(GenusBound {
        bound,
        a_sq,
        m,
        theta,
    })
}

/// g(Σ) ≥ θ(K, m) + a²/4 with m = −a²/4 + η(a/2), for a surface in an even
/// class a.
pub fn genus_bound_q2(ledger: &Ledger, expr: &KnotExpression, a: &HomologyClass) -> Result<GenusBound> {
    let x = a
        .divide(2)
        .ok_or_else(|| Error::Hypotheses(format!("class {a} is not divisible by 2")))?;
    let a_sq = a.square();
    let m = -a_sq / 4 + eta(&x);
    let theta = infer_theta_m(ledger, expr, Prime::TWO, m as u64)?;
    let bound = theta.bounds.lower + Rational64::new(a_sq, 4);
    Ok(GenusBound {
        bound,
        a_sq,
        m: m as u64,
        theta,
    })
}

/// Four lower bounds on the genus of a surface bounding T(3, 6n+1) in the
/// class a = 2x of a rank r negative definite manifold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundComparison {
    /// max{4n + x², 6n + 3x²/2 − η(x)/2}
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational64,
    /// 6n + 2x² + ‖x‖, the τ bound.
    pub tau: i64,
    /// 4n − Σxᵢ², from the signature with the standard orientation.
    pub sig1: i64,
    /// −4n − r + Σxᵢ², from the signature with the reversed orientation.
    pub sig2: i64,
}

fn ser_rational<S: serde::Serializer>(v: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn compare_bounds(n: u64, x: &HomologyClass, r: usize) -> Result<BoundComparison> {
    if x.rank() > r {
        return Err(Error::Hypotheses(format!(
            "class {x} has more coordinates than the rank {r}"
        )));
    }
    let n = n as i64;
    let x_sq = x.square();
    let sum_sq = -x_sq;
    let first = Rational64::from(4 * n + x_sq);
    let second = Rational64::from(6 * n) + Rational64::new(3 * x_sq, 2) - Rational64::new(eta(x), 2);
    Ok(BoundComparison {
        theta: first.max(second),
        tau: 6 * n + 2 * x_sq + x.l1_norm(),
        sig1: 4 * n - sum_sq,
        sig2: -4 * n - r as i64 + sum_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(v: &[i64]) -> HomologyClass {
        HomologyClass::new(v.to_vec())
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&class(&[0, 0, 0])), 0);
        assert_eq!(eta(&class(&[1, 2, 3])), -2);
        assert_eq!(eta(&class(&[1, 1, 1, 1])), -4);
        assert_eq!(eta(&class(&[-3, 4])), -1);
    }

    #[test]
    fn q2_bounds_on_seed() {
        let l = Ledger::seed();
        let k: KnotExpression = "T(3,7)".parse().unwrap();
        let b = genus_bound_q2(&l, &k, &class(&[0, 0, 0])).unwrap();
        assert_eq!(b.bound, 6.into());
        let b = genus_bound_q2(&l, &k, &class(&[2, 0, 0])).unwrap();
        assert_eq!((b.m, b.bound), (0, 5.into()));
        assert!(b.uses_exact_theta());
        let u: KnotExpression = "unknot".parse().unwrap();
        assert_eq!(genus_bound_q2(&l, &u, &class(&[])).unwrap().bound, 0.into());
        assert!(matches!(
            genus_bound_q2(&l, &k, &class(&[1, 0])),
            Err(Error::Hypotheses(_))
        ));
    }

    #[test]
    fn odd_q_bounds_on_seed() {
        let l = Ledger::seed();
        let k: KnotExpression = "T(2,7)".parse().unwrap();
        let b = genus_bound_odd_q(&l, &k, Prime::THREE, &class(&[0])).unwrap();
        assert_eq!(b.bound, 3.into());
        let b = genus_bound_odd_q(&l, &k, Prime::THREE, &class(&[3])).unwrap();
        assert_eq!(b.m, 4);
        assert_eq!(b.bound, b.theta.bounds.lower - 2);
        assert!(matches!(
            genus_bound_odd_q(&l, &k, Prime::THREE, &class(&[2])),
            Err(Error::Hypotheses(_))
        ));
    }

    #[test]
    fn comparison_examples() {
        let c = compare_bounds(1, &class(&[0, 0, 0]), 3).unwrap();
        assert_eq!((c.theta, c.tau, c.sig1, c.sig2), (6.into(), 6, 4, -7));
        let c = compare_bounds(1, &class(&[1, 0, 0]), 3).unwrap();
        assert_eq!((c.theta, c.tau, c.sig1, c.sig2), (5.into(), 5, 3, -6));
        let c = compare_bounds(1, &class(&[3, 3, 3]), 3).unwrap();
        assert_eq!((c.theta, c.sig2), ((-23).into(), 20));
    }
}
