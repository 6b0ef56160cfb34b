//! Exact residue histograms over the boolean cube.
//!
//! The enumeration walks the cube in Gray-code order, so each step flips one
//! bit. The running value changes by the cached gradient entry of that bit,
//! and the gradient itself moves by one row of the quadratic coefficient
//! matrix. All arithmetic stays in `u32` residues below `m` with
//! compare-subtract reduction; nothing here touches floating point.

use super::ResidueHistogram;
use crate::error::{Error, Result};
use crate::quadratic::QuadPoly;
use rayon::prelude::*;

/// Largest cube dimension enumerated by default (2^30 points).
pub const DEFAULT_ENUM_BUDGET: usize = 30;

struct DenseQuad {
    n: usize,
    m: u32,
    c: u32,
    linear: Vec<u32>,
    /// Symmetric n x n coefficient matrix, zero diagonal, row-major.
    rows: Vec<u32>,
    /// The same rows negated mod m, for bit-clearing steps.
    neg_rows: Vec<u32>,
}

impl DenseQuad {
    fn new(f: &QuadPoly) -> DenseQuad {
        let n = f.n();
        let m = f.modulus().value() as u32;
        let mut rows = vec![0u32; n * n];
        for (&(i, j), &v) in f.quad_coeffs() {
            rows[i * n + j] = v as u32;
            rows[j * n + i] = v as u32;
        }
        let neg_rows = rows.iter().map(|&v| (m - v) % m).collect();
        DenseQuad {
            n,
            m,
            c: f.constant_term() as u32,
            linear: f.linear_coeffs().iter().map(|&v| v as u32).collect(),
            rows,
            neg_rows,
        }
    }

    fn value_at(&self, mask: u64) -> u32 {
        let mut acc = self.c as u64;
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                acc += self.linear[i] as u64;
                for j in i + 1..self.n {
                    if mask >> j & 1 == 1 {
                        acc += self.rows[i * self.n + j] as u64;
                    }
                }
            }
        }
        (acc % self.m as u64) as u32
    }

    fn gradient_at(&self, mask: u64) -> Vec<u32> {
        let mut g = self.linear.clone();
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                for (slot, &q) in g.iter_mut().zip(&self.rows[i * self.n..(i + 1) * self.n]) {
                    let s = *slot + q;
                    *slot = if s >= self.m { s - self.m } else { s };
                }
            }
        }
        g
    }

    /// Histogram of a subcube: the low `low_bits` coordinates sweep, the
    /// rest are fixed to `base`.
    fn subcube_counts(&self, base: u64, low_bits: usize) -> Vec<u64> {
        let m = self.m;
        let mut counts = vec![0u64; m as usize];
        let mut g = self.gradient_at(base);
        let mut f = self.value_at(base);
        counts[f as usize] += 1;
        let mut mask = base;
        for step in 1u64..1u64 << low_bits {
            let i = step.trailing_zeros() as usize;
            let turning_on = mask >> i & 1 == 0;
            mask ^= 1 << i;
            let delta = if turning_on { g[i] } else { m - g[i] };
            f += delta;
            if f >= m {
                f -= m;
            }
            let row = if turning_on {
                &self.rows[i * self.n..(i + 1) * self.n]
            } else {
                &self.neg_rows[i * self.n..(i + 1) * self.n]
            };
            for (slot, &q) in g.iter_mut().zip(row) {
                let s = *slot + q;
                *slot = if s >= m { s - m } else { s };
            }
            counts[f as usize] += 1;
        }
        counts
    }
}

/// Exact counts of cube points per residue class of `f`, by Gray-code
/// enumeration of all `2^n` points. For larger `n` the cube splits into
/// subcubes on the top bits, which are enumerated in parallel and merged by
/// addition, so results are identical for every worker count.
pub fn residue_histogram(f: &QuadPoly, max_vars: usize) -> Result<ResidueHistogram> {
    let n = f.n();
    if n > max_vars {
        return Err(Error::budget(format!(
            "residue_histogram: n = {n} exceeds the enumeration budget {max_vars}"
        )));
    }
    let dense = DenseQuad::new(f);
    let m = f.modulus().value() as usize;
    let counts = if n <= 14 {
        dense.subcube_counts(0, n)
    } else {
        let split = 6usize;
        let low = n - split;
        (0u64..1 << split)
            .into_par_iter()
            .map(|top| dense.subcube_counts(top << low, low))
            .reduce(
                || vec![0u64; m],
                |mut acc, part| {
                    for (a, b) in acc.iter_mut().zip(&part) {
                        *a += b;
                    }
                    acc
                },
            )
    };
    Ok(ResidueHistogram {
        modulus: f.modulus().clone(),
        n,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::Modulus;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_polynomial_all_in_zero_class() {
        let f = QuadPoly::zero(Modulus::new(5).unwrap(), 3);
        let h = residue_histogram(&f, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(h.counts, vec![8, 0, 0, 0, 0]);
    }

    #[test]
    fn parity_of_two_variables() {
        let f = QuadPoly::linear_form(Modulus::new(2).unwrap(), &[1, 1]);
        let h = residue_histogram(&f, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
    }

    #[test]
    fn budget_is_enforced() {
        let f = QuadPoly::zero(Modulus::new(2).unwrap(), 12);
        assert!(residue_histogram(&f, 10).is_err());
    }

    /// The Gray-code engine against plain per-point evaluation.
    #[test]
    fn matches_naive_evaluation() {
        let mut rng = StdRng::seed_from_u64(0x6ec0);
        for _ in 0..200 {
            let m = rng.gen_range(2..=12u64);
            let n = rng.gen_range(1..=12usize);
            let modulus = Modulus::new(m).unwrap();
            let linear: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            let mut quad = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    quad.push((i, j, rng.gen_range(0..m)));
                }
            }
            let c = rng.gen_range(0..m);
            let f = QuadPoly::from_terms(modulus, n, c, &linear, &quad).unwrap();
            let h = residue_histogram(&f, DEFAULT_ENUM_BUDGET).unwrap();
            let mut naive = vec![0u64; m as usize];
            for mask in 0..1u64 << n {
                naive[f.evaluate_mask(mask) as usize] += 1;
            }
            assert_eq!(h.counts, naive);
        }
    }

    /// The parallel split path must agree with the sequential path.
    #[test]
    fn split_agrees_with_sequential() {
        let mut rng = StdRng::seed_from_u64(0x5b11);
        let n = 16usize;
        let m = 6u64;
        let linear: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                quad.push((i, j, rng.gen_range(0..m)));
            }
        }
        let f = QuadPoly::from_terms(Modulus::new(m).unwrap(), n, 1, &linear, &quad).unwrap();
        let h = residue_histogram(&f, DEFAULT_ENUM_BUDGET).unwrap();
        let dense = DenseQuad::new(&f);
        assert_eq!(h.counts, dense.subcube_counts(0, n));
        assert_eq!(h.counts.iter().sum::<u64>(), 1 << n);
    }
}
