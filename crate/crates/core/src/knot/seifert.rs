use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer Seifert matrix V of a knot, of size 2g × 2g.
///
/// Construction checks that the matrix is square and that
/// det(V − Vᵀ) = ±1, which rules out links and malformed input.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct SeifertMatrix {
    rows: Vec<Vec<i64>>,
}

impl SeifertMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidSeifert(format!(
                "row {i} has length {} but the matrix has {n} rows",
                row.len()
            )));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidSeifert(format!(
                "dimension {n} is odd; a knot has an even-dimensional Seifert form"
            )));
        }
        let m = Self { rows };
        let det = m.intersection_determinant();
        if det.abs() != BigInt::one() {
            return Err(Error::InvalidSeifert(format!(
                "det(V - V^T) = {det}, expected ±1"
            )));
        }
        Ok(m)
    }

    /// The 0 × 0 matrix presenting the unknot.
    pub fn unknot() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn genus(&self) -> usize {
        self.dim() / 2
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// −Vᵀ, a Seifert matrix for the mirror image.
    pub fn mirror(&self) -> Self {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| -self.rows[j][i]).collect())
            .collect();
        Self { rows }
    }

    /// Block sum V₁ ⊕ V₂, a Seifert matrix for the connected sum.
    pub fn block_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut rows = vec![vec![0; a + b]; a + b];
        for i in 0..a {
            rows[i][..a].copy_from_slice(&self.rows[i]);
        }
        for i in 0..b {
            rows[a + i][a..].copy_from_slice(&other.rows[i]);
        }
        Self { rows }
    }

    /// Seifert matrix of the positive torus knot T(p,q), as −(A_p ⊗ A_q)
    /// where A_n is the (n−1)×(n−1) matrix with 1 on the diagonal and −1 on
    /// the superdiagonal.
    pub fn torus(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < 2 || p.gcd(&q) != 1 {
            return Err(Error::InvalidSeifert(format!(
                "T({p},{q}) is not a knot: need coprime p, q ≥ 2"
            )));
        }
        let a = |i: usize, j: usize| -> i64 {
            if i == j {
                1
            } else if j == i + 1 {
                -1
            } else {
                0
            }
        };
        let (m, n) = (p - 1, q - 1);
        let mut rows = vec![vec![0; m * n]; m * n];
        for i1 in 0..m {
            for j1 in 0..m {
                let x = a(i1, j1);
                if x == 0 {
                    continue;
                }
                for i2 in 0..n {
                    for j2 in 0..n {
                        rows[i1 * n + i2][j1 * n + j2] = -x * a(i2, j2);
                    }
                }
            }
        }
        Self::new(rows)
    }

    /// det(V − Vᵀ) by fraction-free Bareiss elimination.
    pub fn intersection_determinant(&self) -> BigInt {
        let n = self.dim();
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigInt::from(self.rows[i][j] - self.rows[j][i]))
                    .collect()
            })
            .collect();
        bareiss_determinant(&mut m)
    }
}

fn bareiss_determinant(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl TryFrom<Vec<Vec<i64>>> for SeifertMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<SeifertMatrix> for Vec<Vec<i64>> {
    fn from(m: SeifertMatrix) -> Self {
        m.rows
    }
}

impl fmt::Debug for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeifertMatrix({:?})", self.rows)
    }
}

impl fmt::Display for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
