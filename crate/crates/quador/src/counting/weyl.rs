//! Squaring the exponential sum of a quadratic reduces it to linear sums
//! over difference directions. On the cube the differences must not leave
//! `{0,1}^n`, so a direction is a vector `h` in `{-1,0,1}^n` and the inner
//! sum runs over the subcube where `x + h` stays boolean.
//!
//! For a direction with support `S`, the difference of `f` is linear with
//! gradient `Q·h` (`Q` the off-diagonal coefficient matrix), and the inner
//! sum over the free coordinates factors into cosines. Directions are
//! enumerated support by support, signs inside a support by Gray code with
//! the gradient updated incrementally.

use super::residue_histogram;
use crate::error::{Error, Result};
use crate::quadratic::QuadPoly;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylReport {
    /// `|E e_m(f)|^2`, exact from the histogram.
    pub lhs_sq: f64,
    /// The averaged absolute inner sums; always at least `lhs_sq` up to
    /// floating-point noise.
    pub rhs: f64,
}

/// Both sides of the squared-sum bound. Cost grows as `3^n`, hence the cap.
pub fn weyl_difference_bound(f: &QuadPoly, max_vars: usize) -> Result<WeylReport> {
    let n = f.n();
    if n > max_vars.min(20) {
        return Err(Error::budget(format!(
            "weyl_difference_bound: n = {n} over budget {}",
            max_vars.min(20)
        )));
    }
    let m = f.modulus().value();
    let lhs = residue_histogram(f, max_vars)?.exp_sum(1).magnitude();
    let lhs_sq = lhs * lhs;

    // |cos(pi r / m)| per residue, the magnitude of a one-variable factor.
    let cos_table: Vec<f64> = (0..m).map(|r| (PI * r as f64 / m as f64).cos().abs()).collect();
    // Symmetric coefficient rows and their doubles: h = +1 on coordinate i
    // contributes Q[:, i] to the gradient Q·h, and flipping that sign moves
    // it by 2·Q[:, i].
    let mut rows = vec![0u64; n * n];
    for (&(i, j), &v) in f.quad_coeffs() {
        rows[i * n + j] = v;
        rows[j * n + i] = v;
    }
    let double_rows: Vec<u64> = rows.iter().map(|&q| 2 * q % m).collect();

    let mut total = 0.0f64;
    for support in 0u64..1 << n {
        let k = support.count_ones() as usize;
        let members: Vec<usize> = (0..n).filter(|i| support >> i & 1 == 1).collect();
        // Gradient of the difference for h = +1 on the whole support.
        let mut grad = vec![0u64; n];
        for &i in &members {
            for (g, &q) in grad.iter_mut().zip(&rows[i * n..(i + 1) * n]) {
                *g = (*g + q) % m;
            }
        }
        let weight = (1u64 << (n - k)) as f64;
        let product = |grad: &[u64]| -> f64 {
            let mut p = 1.0;
            for j in 0..n {
                if support >> j & 1 == 0 {
                    p *= cos_table[grad[j] as usize];
                }
            }
            p
        };
        total += weight * product(&grad);
        let mut signs = 0u64;
        for step in 1u64..1 << k {
            let bit = step.trailing_zeros() as usize;
            let i = members[bit];
            let flipping_to_minus = signs >> bit & 1 == 0;
            signs ^= 1 << bit;
            let row = &double_rows[i * n..(i + 1) * n];
            for (g, &q) in grad.iter_mut().zip(row) {
                let delta = if flipping_to_minus { m - q } else { q };
                *g = (*g + delta) % m;
            }
            total += weight * product(&grad);
        }
    }
    let rhs = total / (1u64 << n) as f64 / (1u64 << n) as f64;
    Ok(WeylReport { lhs_sq, rhs })
}
