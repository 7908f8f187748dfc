//! Real coordinates of Hermitian matrices.
//!
//! The basis of the `k²`-dimensional real space of `k×k` Hermitian matrices
//! is orthonormal under `⟨A, B⟩ = Tr(A B)` and ordered as
//!
//! 1. the diagonal units `E_jj`, `j = 0..k`;
//! 2. `(E_jk + E_kj)/√2` for `j < k`, pairs in lexicographic order;
//! 3. `i(E_jk − E_kj)/√2` for `j < k`, same order.
//!
//! Coordinate `b` of `M` is `Tr(B_b M)`, so the trace functional has
//! coordinates `(1, …, 1, 0, …, 0)` with `k` ones.

use nalgebra::{Complex, DMatrix};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |j| (j + 1..k).map(move |l| (j, l)))
}

pub fn vectorize(m: &HermitianMatrix) -> Vec<f64> {
    let k = m.dim();
    let mut v = Vec::with_capacity(k * k);
    v.extend((0..k).map(|j| m.entry(j, j).re));
    v.extend(pairs(k).map(|(j, l)| SQRT_2 * m.entry(j, l).re));
    v.extend(pairs(k).map(|(j, l)| SQRT_2 * m.entry(j, l).im));
    v
}

pub fn devectorize(v: &[f64], k: usize) -> Result<HermitianMatrix> {
    if v.len() != k * k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            found: v.len(),
        });
    }
    let mut m = DMatrix::from_element(k, k, Complex::new(0.0, 0.0));
    for j in 0..k {
        m[(j, j)] = Complex::new(v[j], 0.0);
    }
    let n_pairs = k * k.saturating_sub(1) / 2;
    for (p, (j, l)) in pairs(k).enumerate() {
        let s = v[k + p];
        let a = v[k + n_pairs + p];
        m[(j, l)] = Complex::new(s, a) / SQRT_2;
        m[(l, j)] = Complex::new(s, -a) / SQRT_2;
    }
    Ok(HermitianMatrix::symmetrized(m))
}

/// Coordinates of the trace functional.
pub fn trace_coordinates(k: usize) -> Vec<f64> {
    (0..k * k).map(|b| if b < k { 1.0 } else { 0.0 }).collect()
}

/// The basis matrices in coordinate order.
pub fn basis(k: usize) -> Vec<HermitianMatrix> {
    (0..k * k)
        .map(|b| {
            let mut e = vec![0.0; k * k];
            e[b] = 1.0;
            devectorize(&e, k).expect("length is k²")
        })
        .collect()
}
