//! Exact Levine–Tristram signatures at prime-order roots of unity.
//!
//! The Hermitian form (1 − ω)V + (1 − ω̄)Vᵀ is diagonalised by congruence
//! over Q(ζ_q). Every pivot is real, and its sign is settled by interval
//! evaluation in the standard complex embedding.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclotomicElement, RealEmbedding};
use crate::error::{Error, Result};
use crate::knot::SeifertMatrix;
use crate::prime::Prime;

thread_local! {
    static EMBEDDINGS: RefCell<HashMap<u32, RealEmbedding>> = RefCell::new(HashMap::new());
}

/// Signature of a Hermitian form built from a Seifert matrix. Always even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignatureValue(i64);

impl SignatureValue {
    pub fn get(self) -> i64 {
        self.0
    }
}

impl fmt::Display for SignatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// σ_K(ω) at ω = e^{2πij/q}.
pub fn lt_signature(v: &SeifertMatrix, q: Prime, j: u32) -> Result<SignatureValue> {
    let qq = q.get();
    if j == 0 || j >= qq {
        return Err(Error::RootIndex {
            q: qq,
            j,
            max: qq - 1,
        });
    }
    let h = hermitian_form(v, qq, j);
    EMBEDDINGS
        .with(|cache| {
            let mut cache = cache.borrow_mut();
            let embedding = cache.entry(qq).or_insert_with(|| RealEmbedding::new(qq));
            hermitian_signature(h, embedding)
        })
        .ok_or(Error::DegenerateForm { q: qq, j })
}

/// The classical signature σ(K) = σ_K(−1).
pub fn signature(v: &SeifertMatrix) -> Result<SignatureValue> {
    lt_signature(v, Prime::TWO, 1)
}

/// σ_K(e^{2πij/q}) for j = 1, …, q − 1.
pub fn lt_signatures(v: &SeifertMatrix, q: Prime) -> Result<Vec<SignatureValue>> {
    (1..q.get()).map(|j| lt_signature(v, q, j)).collect()
}

/// σ^(q)(K), the sum of σ_K over the nontrivial q-th roots of unity.
pub fn sigma_q(v: &SeifertMatrix, q: Prime) -> Result<i64> {
    Ok(lt_signatures(v, q)?.iter().map(|s| s.get()).sum())
}

fn hermitian_form(v: &SeifertMatrix, q: u32, j: u32) -> Vec<Vec<CyclotomicElement>> {
    let one = CyclotomicElement::one(q);
    let omega = CyclotomicElement::zeta_pow(q, i64::from(j));
    let a = &one - &omega;
    let b = a.conj();
    let n = v.dim();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let x = a.scale(&int(v.entry(r, c)));
                    let y = b.scale(&int(v.entry(c, r)));
                    &x + &y
                })
                .collect()
        })
        .collect()
}

fn int(n: i64) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(n.into())
}

/// n₊ − n₋ of a Hermitian matrix, or `None` if it is singular.
fn hermitian_signature(
    mut h: Vec<Vec<CyclotomicElement>>,
    embedding: &mut RealEmbedding,
) -> Option<SignatureValue> {
    let mut sig = 0i64;
    while !h.is_empty() {
        let n = h.len();
        let k = match (0..n).find(|&i| !h[i][i].is_zero()) {
            Some(k) => k,
            None => {
                let (i, k) = (0..n)
                    .flat_map(|i| (0..n).map(move |k| (i, k)))
                    .find(|&(i, k)| !h[i][k].is_zero())?;
                // row_i += c row_k, col_i += c̄ col_k with c = h_ik, giving
                // h_ii = 2|h_ik|² > 0.
                let c = h[i][k].clone();
                let cb = c.conj();
                for col in 0..n {
                    let add = &c * &h[k][col];
                    h[i][col] = &h[i][col] + &add;
                }
                for row in 0..n {
                    let add = &h[row][k] * &cb;
                    h[row][i] = &h[row][i] + &add;
                }
                i
            }
        };
        let pivot = h[k][k].clone();
        sig += match pivot.real_sign(embedding) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => unreachable!("nonzero pivot"),
        };
        let inv = pivot.inverse().expect("nonzero pivot");
        let rest: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let factors: Vec<CyclotomicElement> = rest.iter().map(|&a| &h[a][k] * &inv).collect();
        h = rest
            .iter()
            .zip(&factors)
            .map(|(&a, f)| {
                rest.iter()
                    .map(|&b| {
                        if h[k][b].is_zero() {
                            h[a][b].clone()
                        } else {
                            &h[a][b] - &(f * &h[k][b])
                        }
                    })
                    .collect()
            })
            .collect();
    }
    Some(SignatureValue(sig))
}
