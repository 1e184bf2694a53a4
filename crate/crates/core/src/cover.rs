//! Betti numbers and signature of a cyclic branched cover W → X of a
//! 4-manifold X, branched over a surface Σ bounding a knot.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::Prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverInput {
    pub q: Prime,
    /// b₂(X)
    pub b2x: u64,
    /// σ(X)
    pub sigma_x: i64,
    /// Genus of Σ.
    pub genus: u64,
    /// [Σ]²
    pub self_int: i64,
    /// σ^(q) of the outgoing boundary knot.
    pub sigq_out: i64,
    /// σ^(q) of the incoming boundary knot, when ∂X has two components.
    pub sigq_in: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTopology {
    pub b2: u64,
    pub sigma: i64,
    pub b_plus: u64,
    pub b_minus: u64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn to_int(x: &BigRational, what: &str, err: impl Fn(String) -> Error) -> Result<i64> {
    if !x.is_integer() {
        return Err(err(format!("{what} = {x} is not an integer")));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| err(format!("{what} = {x} overflows")))
}

pub fn cover_topology(input: &CoverInput) -> Result<CoverTopology> {
    if input.sigma_x.unsigned_abs() > input.b2x {
        return Err(Error::InconsistentCover(format!(
            "|σ(X)| = {} exceeds b₂(X) = {}",
            input.sigma_x.abs(),
            input.b2x
        )));
    }
    let q = input.q.as_i64();
    let b2 = q * input.b2x as i64 + 2 * (q - 1) * input.genus as i64;
    let sigma = rat(q * input.sigma_x) - rat(q * q - 1) / rat(3 * q) * rat(input.self_int)
        + rat(input.sigq_out)
        - rat(input.sigq_in.unwrap_or(0));
    let sigma = to_int(&sigma, "σ(W)", Error::InconsistentCover)?;
    let half = |x: i64, what: &str| -> Result<u64> {
        let h = to_int(&(rat(x) / rat(2)), what, Error::InconsistentCover)?;
        u64::try_from(h).map_err(|_| Error::InconsistentCover(format!("{what} = {h} is negative")))
    };
    Ok(CoverTopology {
        b2: b2 as u64,
        sigma,
        b_plus: half(b2 + sigma, "b₊(W)")?,
        b_minus: half(b2 - sigma, "b₋(W)")?,
    })
}

/// b₊(W) = (q−1)g − ((q²−1)/(6q))·a² + σ^(q)(K)/2 for a cover of a negative
/// definite X branched over a genus g surface in the class a.
pub fn cover_b_plus_for_genus_bound(q: Prime, g: u64, a_sq: i64, sigq: i64) -> Result<u64> {
    let qi = q.as_i64();
    let v = rat((qi - 1) * g as i64) - rat(qi * qi - 1) / rat(6 * qi) * rat(a_sq)
        + rat(sigq) / rat(2);
    let v = to_int(&v, "b₊(W)", Error::InconsistentData)?;
    if v.is_negative() {
        return Err(Error::NoSuchSurface(format!("b₊(W) = {v} would be negative")));
    }
    Ok(v as u64)
}
