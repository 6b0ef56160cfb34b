//! Exhaustive search for quadratic OR representations.
//!
//! A candidate must vanish at the origin and nowhere else on the cube, so
//! the constant term is pinned to zero and every linear coefficient to a
//! nonzero residue before enumeration starts; only points with at least two
//! ones are left to check, with early exit on the first zero.

use crate::error::{Error, Result};
use crate::quadratic::QuadPoly;
use crate::zmod::Modulus;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchRestrict {
    /// All quadratic polynomials with the necessary pruning applied.
    All,
    /// Symmetric polynomials `a·e1 + b·e2 + c` in the elementary symmetric
    /// functions; candidates are the `m^3` coefficient triples.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Stop at the lexicographically first representation.
    First,
    /// Count all representations.
    Count,
    /// Collect every representation.
    All,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub count: u64,
    pub witnesses: Vec<QuadPoly>,
    /// Candidates actually examined.
    pub searched: u64,
}

/// Search the quadratic polynomials over `Z_m` in `n` variables that weakly
/// represent OR. `budget` caps the candidate count before enumeration
/// starts. With `dedupe`, witnesses (and counts, in `Count` mode) are taken
/// up to variable permutation.
pub fn search_or_quadratics(
    n: usize,
    m: u64,
    restrict: SearchRestrict,
    mode: SearchMode,
    budget: u64,
    dedupe: bool,
) -> Result<SearchOutcome> {
    if n == 0 || n > 16 {
        return Err(Error::usage("search supports 1 <= n <= 16"));
    }
    let modulus = Modulus::new(m)?;
    match restrict {
        SearchRestrict::Symmetric => search_symmetric(n, modulus, mode),
        SearchRestrict::All => search_all(n, modulus, mode, budget, dedupe),
    }
}

fn search_symmetric(n: usize, modulus: Modulus, mode: SearchMode) -> Result<SearchOutcome> {
    let m = modulus.value();
    let mut outcome = SearchOutcome {
        count: 0,
        witnesses: Vec::new(),
        searched: 0,
    };
    'cand: for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                outcome.searched += 1;
                if c != 0 {
                    continue;
                }
                let ok = (1..=n as u64).all(|k| (a * k + b * (k * (k - 1) / 2) + c) % m != 0);
                if !ok {
                    continue;
                }
                outcome.count += 1;
                if !matches!(mode, SearchMode::Count) {
                    let mut quad = Vec::new();
                    for i in 0..n {
                        for j in i + 1..n {
                            quad.push((i, j, b));
                        }
                    }
                    let f =
                        QuadPoly::from_terms(modulus.clone(), n, c, &vec![a; n], &quad)?;
                    outcome.witnesses.push(f);
                }
                if matches!(mode, SearchMode::First) {
                    break 'cand;
                }
            }
        }
    }
    Ok(outcome)
}

/// Coefficient encoding used for permutation canonicalization: linear
/// coefficients in index order, then upper-triangular quadratics row by row.
fn encode(f: &QuadPoly) -> Vec<u64> {
    let n = f.n();
    let mut v: Vec<u64> = f.linear_coeffs().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            v.push(f.quad_coeffs().get(&(i, j)).copied().unwrap_or(0));
        }
    }
    v
}

fn permute(f: &QuadPoly, perm: &[usize]) -> QuadPoly {
    let n = f.n();
    let linear: Vec<u64> = (0..n).map(|i| f.linear_coeffs()[perm[i]]).collect();
    let mut quad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (perm[i], perm[j]);
            if let Some(&v) = f.quad_coeffs().get(&(a.min(b), a.max(b))) {
                quad.push((i, j, v));
            }
        }
    }
    QuadPoly::from_terms(f.modulus().clone(), n, f.constant_term(), &linear, &quad)
        .expect("permutation keeps shape")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

fn canonical_encoding(f: &QuadPoly, perms: &[Vec<usize>]) -> Vec<u64> {
    perms.iter().map(|p| encode(&permute(f, p))).min().expect("nonempty perms")
}

fn search_all(
    n: usize,
    modulus: Modulus,
    mode: SearchMode,
    budget: u64,
    dedupe: bool,
) -> Result<SearchOutcome> {
    let m = modulus.value();
    let pairs = n * (n - 1) / 2;
    // (m-1)^n choices of nonzero linear coefficients, m^pairs quadratics.
    let candidates = {
        let mut acc = 1u128;
        for _ in 0..n {
            acc *= (m - 1).max(1) as u128;
        }
        for _ in 0..pairs {
            acc *= m as u128;
        }
        acc
    };
    if candidates > budget as u128 {
        return Err(Error::budget(format!(
            "search space {candidates} exceeds budget {budget}"
        )));
    }
    if dedupe && n > 8 {
        return Err(Error::budget("permutation dedupe supported for n <= 8"));
    }
    let perms = if dedupe { permutations(n) } else { Vec::new() };
    let mut canon_seen = std::collections::BTreeSet::new();

    let mut outcome = SearchOutcome {
        count: 0,
        witnesses: Vec::new(),
        searched: 0,
    };
    let mut linear = vec![1u64; n];
    'outer: loop {
        let mut quad_coeffs = vec![0u64; pairs];
        loop {
            outcome.searched += 1;
            if accepts(n, m, &linear, &quad_coeffs) {
                let mut quad = Vec::new();
                let mut idx = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        quad.push((i, j, quad_coeffs[idx]));
                        idx += 1;
                    }
                }
                let f = QuadPoly::from_terms(modulus.clone(), n, 0, &linear, &quad)?;
                let fresh = if dedupe {
                    canon_seen.insert(canonical_encoding(&f, &perms))
                } else {
                    true
                };
                if fresh {
                    outcome.count += 1;
                    if !matches!(mode, SearchMode::Count) {
                        outcome.witnesses.push(f);
                    }
                    if matches!(mode, SearchMode::First) {
                        break 'outer;
                    }
                }
            }
            // odometer over quadratic coefficients, last index fastest
            let mut pos = pairs;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                quad_coeffs[pos] += 1;
                if quad_coeffs[pos] < m {
                    break;
                }
                quad_coeffs[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pairs == 0 || pos == usize::MAX {
                break;
            }
        }
        // odometer over linear coefficients in [1, m), last index fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            linear[pos] += 1;
            if linear[pos] < m {
                break;
            }
            linear[pos] = 1;
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }
    Ok(outcome)
}

/// Zero-free on every cube point with at least two ones. Points with fewer
/// ones pass by construction: `f(0) = 0` and `f(e_i)` is the nonzero linear
/// coefficient.
fn accepts(n: usize, m: u64, linear: &[u64], quad_coeffs: &[u64]) -> bool {
    for mask in 1u64..1 << n {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut acc = 0u64;
        for i in 0..n {
            if mask >> i & 1 == 0 {
                continue;
            }
            acc += linear[i];
        }
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                    acc += quad_coeffs[idx];
                }
                idx += 1;
            }
        }
        if acc % m == 0 {
            return false;
        }
    }
    true
}
