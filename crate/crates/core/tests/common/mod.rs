//! Generators and floating-point oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use concordance_core::{HomologyClass, SeifertMatrix};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

/// Eigenvalues closer to zero than this make the float oracle inconclusive.
pub const EIGEN_MARGIN: f64 = 1e-6;

/// A random Seifert matrix of genus `g`: a symmetric matrix plus the
/// standard symplectic part, conjugated by a random unimodular matrix.
pub fn random_seifert(rng: &mut impl Rng, g: usize) -> SeifertMatrix {
    let n = 2 * g;
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-2..=2);
            v[i][j] = x;
            v[j][i] = x;
        }
    }
    for k in 0..g {
        v[2 * k][2 * k + 1] += 1;
    }
    // Congruence by elementary matrices: row_a += c·row_b, col_a += c·col_b.
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let c = rng.gen_range(-1..=1);
        for j in 0..n {
            v[a][j] += c * v[b][j];
        }
        for i in 0..n {
            v[i][a] += c * v[i][b];
        }
    }
    SeifertMatrix::new(v).expect("congruent to a unimodular skew part")
}

/// Signature of (1−ω)V + (1−ω̄)Vᵀ from floating-point eigenvalues, or `None`
/// when some eigenvalue is too close to zero to call.
pub fn float_signature(v: &SeifertMatrix, q: u32, j: u32) -> Option<i64> {
    let n = v.dim();
    if n == 0 {
        return Some(0);
    }
    let w = Complex64::from_polar(1.0, 2.0 * PI * f64::from(j) / f64::from(q));
    let one = Complex64::new(1.0, 0.0);
    let h = DMatrix::from_fn(n, n, |a, b| {
        (one - w) * v.entry(a, b) as f64 + (one - w.conj()) * v.entry(b, a) as f64
    });
    let eig = SymmetricEigen::new(h).eigenvalues;
    if eig.iter().any(|x| x.abs() < EIGEN_MARGIN) {
        return None;
    }
    Some(eig.iter().map(|x| if *x > 0.0 { 1 } else { -1 }).sum())
}

/// η(x) by enumerating every characteristic vector c (all entries odd) with
/// |cᵢ| ≤ |xᵢ| + 3 jointly, minimising −(x+c)² − r.
pub fn eta_joint(x: &[i64]) -> i64 {
    let ranges: Vec<Vec<i64>> = x.iter().map(|&xi| odd_range(xi)).collect();
    let mut best = i64::MAX;
    let mut idx = vec![0usize; x.len()];
    loop {
        let val: i64 = x
            .iter()
            .zip(&idx)
            .zip(&ranges)
            .map(|((xi, &k), r)| (xi + r[k]).pow(2))
            .sum::<i64>()
            - x.len() as i64;
        best = best.min(val);
        let mut pos = 0;
        loop {
            if pos == x.len() {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < ranges[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// η(x) by exact minimisation over the same box, one coordinate at a time.
/// The form is diagonal, so the minimum of the sum is the sum of the minima.
pub fn eta_coordinatewise(x: &[i64]) -> i64 {
    x.iter()
        .map(|&xi| {
            let b = xi.abs() + 3;
            (-b..=b)
                .filter(|c| c % 2 != 0)
                .map(|c| (xi + c).pow(2) - 1)
                .min()
                .unwrap()
        })
        .sum()
}

fn odd_range(xi: i64) -> Vec<i64> {
    let b = xi.abs() + 3;
    (-b..=b).filter(|c| c % 2 != 0).collect()
}

/// Every integer vector of length `r` with entries in [−b, b].
pub fn grid(r: usize, b: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * b + 1) as usize;
    let total = side.pow(r as u32);
    (0..total).map(move |mut k| {
        (0..r)
            .map(|_| {
                let d = (k % side) as i64 - b;
                k /= side;
                d
            })
            .collect()
    })
}

pub fn class(v: &[i64]) -> HomologyClass {
    HomologyClass::new(v.to_vec())
}
