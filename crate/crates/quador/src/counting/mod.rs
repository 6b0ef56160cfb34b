//! Exact cube enumeration and the exponential-sum identities built on it.
//!
//! Everything of substance is an integer histogram first: exponential sums
//! are assembled from `m` exact counts and `m` precomputed roots of unity,
//! never accumulated across `2^n` floating-point terms, so the only error is
//! a handful of double-precision multiplications.

mod histogram;
mod search;
mod weyl;

pub use histogram::{residue_histogram, DEFAULT_ENUM_BUDGET};
pub use search::{search_or_quadratics, SearchMode, SearchOutcome, SearchRestrict};
pub use weyl::{weyl_difference_bound, WeylReport};

use crate::error::{Error, Result};
use crate::quadratic::QuadPoly;
use crate::zmod::Modulus;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Exact counts of cube points per residue class of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueHistogram {
    pub modulus: Modulus,
    pub n: usize,
    pub counts: Vec<u64>,
}

impl ResidueHistogram {
    pub fn total(&self) -> u64 {
        1u64 << self.n
    }

    pub fn zero_count(&self) -> u64 {
        self.counts[0]
    }

    pub fn zero_fraction(&self) -> f64 {
        self.zero_count() as f64 / self.total() as f64
    }

    /// `E_{x in B^n} e_m(j f(x))`, assembled from the histogram.
    pub fn exp_sum(&self, j: u64) -> ExpSumValue {
        let m = self.modulus.value();
        let j = j % m;
        let scale = 1.0 / self.total() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (y, &count) in self.counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let angle = 2.0 * PI * (j as u128 * y as u128 % m as u128) as f64 / m as f64;
            re += count as f64 * angle.cos();
            im += count as f64 * angle.sin();
        }
        ExpSumValue {
            j,
            re: re * scale,
            im: im * scale,
            derived_from_histogram: true,
        }
    }
}

/// One normalized exponential sum `E e_m(j f)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpSumValue {
    pub j: u64,
    pub re: f64,
    pub im: f64,
    pub derived_from_histogram: bool,
}

impl ExpSumValue {
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Whether `f` weakly represents OR: `f(0) = 0` and `f(x) != 0` everywhere
/// else on the cube, i.e. the zero class holds exactly the origin.
pub fn check_weak_or(f: &QuadPoly, max_vars: usize) -> Result<bool> {
    let h = residue_histogram(f, max_vars)?;
    Ok(f.constant_term() == 0 && h.zero_count() == 1)
}

/// `E e_m(j f)` for one `j`.
pub fn exp_sum(f: &QuadPoly, j: u64, max_vars: usize) -> Result<ExpSumValue> {
    Ok(residue_histogram(f, max_vars)?.exp_sum(j))
}

/// Floating-point residuals of the two counting identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub ct: f64,
    pub split: f64,
}

/// Checks the orthogonality counting identity and its split form for the
/// factorization `m = m1 * m2`.
///
/// The zero fraction must equal `1/m + (1/m) Σ_{j≠0} E e_m(jf)`, and with
/// the terms `j ≡ 0 (mod m1)` folded into a zero count mod `m2`:
/// `(1/m) Σ_{j ̸≡ 0 (m1)} E e_m(jf) + (1/m1) · |{f ≡ 0 mod m2}| / 2^n`.
/// Both identities are exact; the residuals only measure the roots-of-unity
/// rounding.
pub fn verify_counting_identities(
    f: &QuadPoly,
    m1: u64,
    m2: u64,
    max_vars: usize,
) -> Result<IdentityResiduals> {
    let m = f.modulus().value();
    if m1 * m2 != m {
        return Err(Error::precondition(format!(
            "factor mismatch: {m1} * {m2} != {m}"
        )));
    }
    let h = residue_histogram(f, max_vars)?;
    let lhs = h.zero_fraction();

    let mut re = 1.0;
    let mut im = 0.0;
    for j in 1..m {
        let e = h.exp_sum(j);
        re += e.re;
        im += e.im;
    }
    let ct = ((re / m as f64) - lhs).hypot(im / m as f64);

    let zero2_fraction = if m2 == 1 {
        // Everything is 0 mod 1.
        1.0
    } else {
        residue_histogram(&f.reduce_mod(m2)?, max_vars)?.zero_fraction()
    };
    let mut sre = 0.0;
    let mut sim = 0.0;
    for j in 0..m {
        if j % m1 == 0 {
            continue;
        }
        let e = h.exp_sum(j);
        sre += e.re;
        sim += e.im;
    }
    let split_re = sre / m as f64 + zero2_fraction / m1 as f64;
    let split = (split_re - lhs).hypot(sim / m as f64);

    Ok(IdentityResiduals { ct, split })
}

/// Exact magnitude of a linear exponential sum next to its uniform bound:
/// `|E e_m(Σ a_j x_j)| = Π |cos(π a_j / m)| <= (1 - 1/m²)^t` with `t` the
/// number of nonzero coefficients.
pub fn linear_exp_sum(coeffs: &[u64], m: u64) -> (f64, f64) {
    let mut exact = 1.0f64;
    let mut t = 0u32;
    for &a in coeffs {
        let a = a % m;
        if a == 0 {
            continue;
        }
        t += 1;
        // a = m/2 is the exact zero of the cosine factor.
        exact *= if 2 * a == m {
            0.0
        } else {
            (PI * a as f64 / m as f64).cos().abs()
        };
    }
    let bound = (1.0 - 1.0 / (m as f64 * m as f64)).powi(t as i32);
    (exact, bound)
}

/// Whether `f` weakly represents an arbitrary `g` (truth table indexed by
/// cube mask): some partition of `Z_m` must separate the residues `f` takes
/// on `g = 0` points from those on `g = 1` points. Returns the indicator of
/// the `g = 0` side when one exists.
pub fn weak_representation_partition(
    f: &QuadPoly,
    g: &[bool],
    max_vars: usize,
) -> Result<Option<Vec<bool>>> {
    let n = f.n();
    if g.len() != 1usize << n {
        return Err(Error::usage(
            "truth table length must be 2^n for the polynomial's n",
        ));
    }
    if n > max_vars {
        return Err(Error::budget("weak representation check over budget"));
    }
    let m = f.modulus().value() as usize;
    let mut on_zero = vec![false; m];
    let mut on_one = vec![false; m];
    for (mask, &gv) in g.iter().enumerate() {
        let r = f.evaluate_mask(mask as u64) as usize;
        if gv {
            on_one[r] = true;
        } else {
            on_zero[r] = true;
        }
    }
    if on_zero.iter().zip(&on_one).any(|(&a, &b)| a && b) {
        return Ok(None);
    }
    Ok(Some(on_zero))
}
