//! Quadratic polynomials over `Z_m` in boolean variables.
//!
//! The canonical form keeps a constant, a linear coefficient per variable,
//! and strictly upper-triangular quadratic coefficients: on `B^n` a square
//! `x_i^2` is `x_i`, so construction folds every diagonal term into the
//! linear part. All semantics in this crate are on the cube, so a single
//! normal form keeps equality, hashing and serialization unambiguous.

mod parse;

pub use parse::parse_poly;

use crate::error::{Error, Result};
use crate::rigidity::{min_diag_rank, RigidityBudget};
use crate::zmod::{group_shape, Modulus, Side, ZmMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    m: u64,
    n: usize,
    c: u64,
    linear: Vec<u64>,
    quad: Vec<(usize, usize, u64)>,
}

/// A quadratic polynomial `c + Σ a_i x_i + Σ_{i<j} b_ij x_i x_j` over `Z_m`,
/// read as a function on `B^n`. Stored coefficients are nonzero residues
/// with strictly upper-triangular quadratic keys (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct QuadPoly {
    modulus: Modulus,
    n: usize,
    c: u64,
    linear: Vec<u64>,
    quad: BTreeMap<(usize, usize), u64>,
}

impl TryFrom<PolyRepr> for QuadPoly {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<QuadPoly> {
        let modulus = Modulus::new(r.m)?;
        if r.linear.len() != r.n {
            return Err(Error::usage("polynomial JSON: linear length must equal n"));
        }
        QuadPoly::from_terms(
            modulus,
            r.n,
            r.c,
            &r.linear,
            &r.quad.iter().map(|&(i, j, v)| (i, j, v)).collect::<Vec<_>>(),
        )
    }
}

impl From<QuadPoly> for PolyRepr {
    fn from(f: QuadPoly) -> PolyRepr {
        PolyRepr {
            m: f.modulus.value(),
            n: f.n,
            c: f.c,
            linear: f.linear,
            quad: f.quad.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
        }
    }
}

impl QuadPoly {
    pub fn zero(modulus: Modulus, n: usize) -> QuadPoly {
        QuadPoly {
            modulus,
            n,
            c: 0,
            linear: vec![0; n],
            quad: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: Modulus, n: usize, c: u64) -> QuadPoly {
        let c = c % modulus.value();
        QuadPoly {
            c,
            ..QuadPoly::zero(modulus, n)
        }
    }

    /// Canonical polynomial from raw terms. Quadratic terms may come in any
    /// index order and may include squares `(i, i)`; squares fold into the
    /// linear part (`x_i^2 = x_i` on the cube), mirrored pairs merge, and
    /// zero coefficients drop out.
    pub fn from_terms(
        modulus: Modulus,
        n: usize,
        c: u64,
        linear: &[u64],
        quad_terms: &[(usize, usize, u64)],
    ) -> Result<QuadPoly> {
        if linear.len() != n {
            return Err(Error::usage("linear coefficient count must equal n"));
        }
        let m = modulus.value();
        let mut f = QuadPoly::zero(modulus, n);
        f.c = c % m;
        for (i, &a) in linear.iter().enumerate() {
            f.linear[i] = a % m;
        }
        for &(i, j, v) in quad_terms {
            if i >= n || j >= n {
                return Err(Error::usage(format!(
                    "quadratic term ({i},{j}) out of range for n={n}"
                )));
            }
            if i == j {
                f.linear[i] = (f.linear[i] + v) % m;
            } else {
                let key = (i.min(j), i.max(j));
                let slot = f.quad.entry(key).or_insert(0);
                *slot = (*slot + v) % m;
            }
        }
        f.quad.retain(|_, &mut v| v != 0);
        Ok(f)
    }

    /// The linear form `coeffs · x` as a polynomial.
    pub fn linear_form(modulus: Modulus, coeffs: &[u64]) -> QuadPoly {
        let m = modulus.value();
        let mut f = QuadPoly::zero(modulus, coeffs.len());
        for (i, &a) in coeffs.iter().enumerate() {
            f.linear[i] = a % m;
        }
        f
    }

    /// `(coeffs · x)^2` expanded and folded: `Σ v_i^2 x_i + 2 Σ_{i<j} v_i v_j x_i x_j`.
    pub fn square_of_linear(modulus: Modulus, coeffs: &[u64]) -> QuadPoly {
        let m = modulus.value();
        let n = coeffs.len();
        let mut f = QuadPoly::zero(modulus, n);
        for i in 0..n {
            let vi = coeffs[i] % m;
            f.linear[i] = (vi as u128 * vi as u128 % m as u128) as u64;
            for j in i + 1..n {
                let prod = (2u128 * vi as u128 % m as u128) * (coeffs[j] % m) as u128 % m as u128;
                if prod != 0 {
                    f.quad.insert((i, j), prod as u64);
                }
            }
        }
        f
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant_term(&self) -> u64 {
        self.c
    }

    pub fn linear_coeffs(&self) -> &[u64] {
        &self.linear
    }

    pub fn quad_coeffs(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.quad
    }

    pub fn is_constant(&self) -> bool {
        self.linear.iter().all(|&a| a == 0) && self.quad.is_empty()
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<u64> {
        if x.len() != self.n {
            return Err(Error::precondition(format!(
                "evaluate: point has {} coordinates, polynomial has {}",
                x.len(),
                self.n
            )));
        }
        let mut mask = 0u64;
        for (i, &b) in x.iter().enumerate() {
            if b {
                mask |= 1 << i;
            }
        }
        Ok(self.evaluate_mask(mask))
    }

    /// Evaluation at the cube point whose set bits are the 1-coordinates.
    pub fn evaluate_mask(&self, mask: u64) -> u64 {
        let m = self.modulus.value();
        let mut acc = self.c;
        for (i, &a) in self.linear.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = (acc + a) % m;
            }
        }
        for (&(i, j), &v) in &self.quad {
            if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                acc = (acc + v) % m;
            }
        }
        acc
    }

    pub fn add(&self, other: &QuadPoly) -> Result<QuadPoly> {
        if self.modulus != other.modulus || self.n != other.n {
            return Err(Error::usage("polynomial sum needs matching modulus and n"));
        }
        let m = self.modulus.value();
        let mut out = self.clone();
        out.c = (out.c + other.c) % m;
        for i in 0..self.n {
            out.linear[i] = (out.linear[i] + other.linear[i]) % m;
        }
        for (&k, &v) in &other.quad {
            let slot = out.quad.entry(k).or_insert(0);
            *slot = (*slot + v) % m;
        }
        out.quad.retain(|_, &mut v| v != 0);
        Ok(out)
    }

    pub fn scale(&self, k: u64) -> QuadPoly {
        let m = self.modulus.value();
        let k = k % m;
        let mul = |a: u64| (a as u128 * k as u128 % m as u128) as u64;
        let mut out = self.clone();
        out.c = mul(out.c);
        for a in out.linear.iter_mut() {
            *a = mul(*a);
        }
        for v in out.quad.values_mut() {
            *v = mul(*v);
        }
        out.quad.retain(|_, &mut v| v != 0);
        out
    }

    /// `2f` read over `Z_{2m}`: same point values doubled, same boolean rank
    /// and exponential-sum magnitudes. This is the standard dodge for even
    /// moduli where the associated matrix of `f` itself is not well defined.
    pub fn double(&self) -> QuadPoly {
        let m2 = Modulus::new(self.modulus.value() * 2).expect("2m >= 4");
        let mut out = QuadPoly::zero(m2, self.n);
        out.c = self.c * 2;
        for i in 0..self.n {
            out.linear[i] = self.linear[i] * 2;
        }
        for (&k, &v) in &self.quad {
            out.quad.insert(k, v * 2);
        }
        out
    }

    /// Coefficientwise reduction modulo a divisor `m'` of `m`.
    pub fn reduce_mod(&self, m_new: u64) -> Result<QuadPoly> {
        let m = self.modulus.value();
        if m_new < 2 || m % m_new != 0 {
            return Err(Error::precondition(format!(
                "reduce_mod: {m_new} does not divide {m} (or is < 2)"
            )));
        }
        let modulus = Modulus::new(m_new)?;
        let mut out = QuadPoly::zero(modulus, self.n);
        out.c = self.c % m_new;
        for i in 0..self.n {
            out.linear[i] = self.linear[i] % m_new;
        }
        for (&k, &v) in &self.quad {
            if v % m_new != 0 {
                out.quad.insert(k, v % m_new);
            }
        }
        Ok(out)
    }
}

/// The symmetric matrix of the quadratic form agreeing with `f - f(0)` on
/// the cube: `x^T A x = f(x) - f(0)` (or `2(f(x) - f(0))` over `Z_{2m}` when
/// the doubling dodge was needed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssocMatrix {
    pub matrix: ZmMatrix,
    pub doubled: bool,
}

impl AssocMatrix {
    pub fn effective_modulus(&self) -> &Modulus {
        self.matrix.modulus()
    }
}

/// `A_f`: diagonal holds the linear coefficients (squares are linear on the
/// cube), off-diagonal entries are half the quadratic coefficients. When
/// `m` is even and some quadratic coefficient is odd the halves do not
/// exist, so the matrix of `2f` over `Z_{2m}` is returned with `doubled`
/// set.
pub fn assoc_matrix(f: &QuadPoly) -> AssocMatrix {
    let m = f.modulus().value();
    let n = f.n();
    if m % 2 == 1 {
        let inv2 = (m + 1) / 2;
        let mut a = ZmMatrix::zero(f.modulus().clone(), n, n);
        for i in 0..n {
            a.set(i, i, f.linear[i]);
        }
        for (&(i, j), &v) in &f.quad {
            let half = (v as u128 * inv2 as u128 % m as u128) as u64;
            a.set(i, j, half);
            a.set(j, i, half);
        }
        return AssocMatrix {
            matrix: a,
            doubled: false,
        };
    }
    if f.quad.values().all(|&v| v % 2 == 0) {
        let mut a = ZmMatrix::zero(f.modulus().clone(), n, n);
        for i in 0..n {
            a.set(i, i, f.linear[i]);
        }
        for (&(i, j), &v) in &f.quad {
            a.set(i, j, v / 2);
            a.set(j, i, v / 2);
        }
        return AssocMatrix {
            matrix: a,
            doubled: false,
        };
    }
    let doubled = f.double();
    let m2 = doubled.modulus().clone();
    let mut a = ZmMatrix::zero(m2, n, n);
    for i in 0..n {
        a.set(i, i, doubled.linear[i]);
    }
    for (&(i, j), &v) in &doubled.quad {
        a.set(i, j, v / 2);
        a.set(j, i, v / 2);
    }
    AssocMatrix {
        matrix: a,
        doubled: true,
    }
}

/// Rank of `f` as a quadratic form on all of `Z_m^n`, which equals the
/// group-shape rank of `A_f`. Requires a prime-power modulus, and even
/// coefficients when `2 | m` so that `A_f` is well defined.
pub fn form_rank(f: &QuadPoly) -> Result<usize> {
    if !f.modulus().is_prime_power() {
        return Err(Error::precondition(
            "form_rank needs a prime-power modulus",
        ));
    }
    if f.modulus().value() % 2 == 0 {
        let all_even =
            f.linear.iter().all(|&a| a % 2 == 0) && f.quad.values().all(|&v| v % 2 == 0);
        if !all_even {
            return Err(Error::precondition(
                "form_rank over an even prime power needs all coefficients divisible by 2",
            ));
        }
    }
    let a = assoc_matrix(f);
    debug_assert!(!a.doubled);
    Ok(group_shape(&a.matrix, Side::Row).rank())
}

/// Bounds on the boolean rank of `f`: the number of linear forms through
/// which `f` factors on `B^n` alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BooleanRankBound {
    pub lower: usize,
    pub upper: usize,
    pub witness_diagonal: Vec<u64>,
    /// Whether the diagonal minimization underlying `upper` was exhaustive.
    pub exact: bool,
}

/// `brank(f) <= 1 + min_D rank(A_f + D)`: minimize the rank of the
/// associated matrix over diagonal perturbations (exhaustively within
/// `budget` rank computations, heuristically beyond) and report the bound.
/// The lower bound is the trivial one: 0 for constants, 1 otherwise.
pub fn brank_upper(f: &QuadPoly, budget: u64) -> Result<BooleanRankBound> {
    let a = assoc_matrix(f);
    if !a.matrix.modulus().is_prime_power() {
        return Err(Error::precondition(
            "brank_upper needs a prime-power modulus (after doubling if required)",
        ));
    }
    let rig = min_diag_rank(
        &a.matrix,
        &RigidityBudget {
            exact_diagonals: budget,
            ..RigidityBudget::default()
        },
    )?;
    Ok(BooleanRankBound {
        lower: if f.is_constant() { 0 } else { 1 },
        upper: 1 + rig.min_rank,
        witness_diagonal: rig.witness_diagonal,
        exact: rig.exact,
    })
}

/// Exact boolean rank with the defining witnesses, for tiny instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TinyBrank {
    pub rank: usize,
    pub witnesses: Vec<Vec<u64>>,
}

/// Exact boolean rank by exhausting tuples of linear forms: the least `r`
/// such that the map `x -> (v_1·x, ..., v_r·x)` separates the fibers of `f`
/// on `B^n`. Vectors inducing the same partition of the cube are collapsed
/// before the search, which is what makes `m^(n·r)` tractable here.
pub fn brank_exact_tiny(f: &QuadPoly) -> Result<TinyBrank> {
    let n = f.n();
    let m = f.modulus().value();
    if n > 4 || m > 4 {
        return Err(Error::budget(
            "brank_exact_tiny size budget exceeded (needs n <= 4 and m <= 4)",
        ));
    }
    let points = 1usize << n;
    let fvals: Vec<u64> = (0..points).map(|mask| f.evaluate_mask(mask as u64)).collect();
    let f_sig = canonical_partition(&fvals);
    let refines = |sig: &[u8]| -> bool {
        // sig refines the f-partition iff f is constant on each sig class.
        let mut class_val: Vec<Option<u64>> = vec![None; points];
        for (p, &cls) in sig.iter().enumerate() {
            match class_val[cls as usize] {
                None => class_val[cls as usize] = Some(fvals[p]),
                Some(v) if v == fvals[p] => {}
                Some(_) => return false,
            }
        }
        true
    };
    if f_sig.iter().all(|&c| c == 0) || refines(&vec![0; points]) {
        return Ok(TinyBrank {
            rank: 0,
            witnesses: Vec::new(),
        });
    }

    // Distinct cube partitions induced by single linear forms, with the
    // lexicographically first inducing vector kept as the witness.
    let mut partitions: Vec<(Vec<u8>, Vec<u64>)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let total = (m as u128).pow(n as u32) as u64;
    for code in 0..total {
        let v: Vec<u64> = (0..n).map(|i| code / m.pow(i as u32) % m).collect();
        let vals: Vec<u64> = (0..points)
            .map(|mask| {
                (0..n)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| v[i])
                    .sum::<u64>()
                    % m
            })
            .collect();
        let sig = canonical_partition(&vals);
        if seen.insert(sig.clone()) {
            partitions.push((sig, v));
        }
    }

    for r in 1..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(r);
        if let Some(found) = search_join(&partitions, &refines, &mut chosen, 0, r, points) {
            let witnesses = found.iter().map(|&i| partitions[i].1.clone()).collect();
            return Ok(TinyBrank { rank: r, witnesses });
        }
    }
    // The coordinate forms always work, so the rank is at most n.
    let witnesses = (0..n)
        .map(|i| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            e
        })
        .collect();
    Ok(TinyBrank {
        rank: n,
        witnesses,
    })
}

fn canonical_partition(vals: &[u64]) -> Vec<u8> {
    let mut ids: BTreeMap<u64, u8> = BTreeMap::new();
    let mut next = 0u8;
    vals.iter()
        .map(|&v| {
            *ids.entry(v).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

fn join_partitions(a: &[u8], b: &[u8]) -> Vec<u8> {
    let pairs: Vec<u64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as u64) << 8 | y as u64)
        .collect();
    canonical_partition(&pairs)
}

fn search_join(
    partitions: &[(Vec<u8>, Vec<u64>)],
    refines: &dyn Fn(&[u8]) -> bool,
    chosen: &mut Vec<usize>,
    start: usize,
    r: usize,
    points: usize,
) -> Option<Vec<usize>> {
    if chosen.len() == r {
        let mut sig: Vec<u8> = vec![0; points];
        for &idx in chosen.iter() {
            sig = join_partitions(&sig, &partitions[idx].0);
        }
        if refines(&sig) {
            return Some(chosen.clone());
        }
        return None;
    }
    for i in start..partitions.len() {
        chosen.push(i);
        if let Some(found) = search_join(partitions, refines, chosen, i + 1, r, points) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// The ten-variable witness polynomial
/// `x1+...+x10 + 5(x1 x10 + x2 x9 + x3 x8 + x4 x7 + x5 x6) mod 6`.
pub fn ten_variable_witness() -> QuadPoly {
    let modulus = Modulus::new(6).expect("modulus 6");
    QuadPoly::from_terms(
        modulus,
        10,
        0,
        &[1; 10],
        &[(0, 9, 5), (1, 8, 5), (2, 7, 5), (3, 6, 5), (4, 5, 5)],
    )
    .expect("witness polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_poly(rng: &mut StdRng, m: u64, n: usize, with_constant: bool) -> QuadPoly {
        let modulus = Modulus::new(m).unwrap();
        let c = if with_constant { rng.gen_range(0..m) } else { 0 };
        let linear: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                quad.push((i, j, rng.gen_range(0..m)));
            }
        }
        QuadPoly::from_terms(modulus, n, c, &linear, &quad).unwrap()
    }

    #[test]
    fn f10_evaluations() {
        let f = ten_variable_witness();
        assert_eq!(f.evaluate(&[false; 10]).unwrap(), 0);
        // all ones: 10 + 5*5 = 35 = 5 mod 6
        assert_eq!(f.evaluate(&[true; 10]).unwrap(), 5);
        let mut e1 = [false; 10];
        e1[0] = true;
        assert_eq!(f.evaluate(&e1).unwrap(), 1);
        assert!(f.evaluate(&[true; 9]).is_err());
    }

    #[test]
    fn squares_fold_to_linear() {
        // x1^2 + x1 mod 3 = 2 x1
        let f = QuadPoly::from_terms(Modulus::new(3).unwrap(), 1, 0, &[1], &[(0, 0, 1)]).unwrap();
        assert_eq!(f.linear_coeffs(), &[2]);
        assert!(f.quad_coeffs().is_empty());
    }

    #[test]
    fn square_of_sum_expands() {
        // (x1+x2+x3)^2 mod 5 = Σ x_i + 2 Σ_{i<j} x_i x_j
        let f = QuadPoly::square_of_linear(Modulus::new(5).unwrap(), &[1, 1, 1]);
        assert_eq!(f.linear_coeffs(), &[1, 1, 1]);
        for (_, &v) in f.quad_coeffs() {
            assert_eq!(v, 2);
        }
        assert_eq!(f.quad_coeffs().len(), 3);
        // Cross-check by evaluation.
        let l = QuadPoly::linear_form(Modulus::new(5).unwrap(), &[1, 1, 1]);
        for mask in 0..8u64 {
            let lv = l.evaluate_mask(mask);
            assert_eq!(f.evaluate_mask(mask), lv * lv % 5);
        }
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let mut rng = StdRng::seed_from_u64(0xf01d);
        for _ in 0..20 {
            let f = random_poly(&mut rng, 6, 5, true);
            let again = QuadPoly::from_terms(
                f.modulus().clone(),
                f.n(),
                f.constant_term(),
                f.linear_coeffs(),
                &f.quad_coeffs()
                    .iter()
                    .map(|(&(i, j), &v)| (i, j, v))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            assert_eq!(f, again);
        }
    }

    #[test]
    fn assoc_matrix_odd_modulus() {
        let f =
            QuadPoly::from_terms(Modulus::new(5).unwrap(), 2, 0, &[0, 0], &[(0, 1, 2)]).unwrap();
        let a = assoc_matrix(&f);
        assert!(!a.doubled);
        assert_eq!(a.matrix.entries(), &[0, 1, 1, 0]);
    }

    #[test]
    fn assoc_matrix_doubles_odd_coefficient_mod4() {
        let f =
            QuadPoly::from_terms(Modulus::new(4).unwrap(), 2, 0, &[0, 0], &[(0, 1, 1)]).unwrap();
        let a = assoc_matrix(&f);
        assert!(a.doubled);
        assert_eq!(a.effective_modulus().value(), 8);
        assert_eq!(a.matrix.entries(), &[0, 1, 1, 0]);
    }

    #[test]
    fn assoc_matrix_matches_evaluation() {
        let mut rng = StdRng::seed_from_u64(0xa55);
        for &m in &[2u64, 3, 4, 5, 6, 8, 9] {
            for _ in 0..30 {
                let n = rng.gen_range(1..=6);
                let f = random_poly(&mut rng, m, n, false);
                let a = assoc_matrix(&f);
                let scale = if a.doubled { 2 } else { 1 };
                let em = a.effective_modulus().value();
                for mask in 0..1u64 << n {
                    let x: Vec<u64> = (0..n).map(|i| mask >> i & 1).collect();
                    let ax = a.matrix.right_apply(&x).unwrap();
                    let xtax: u64 = x
                        .iter()
                        .zip(&ax)
                        .map(|(&xi, &yi)| xi * yi % em)
                        .sum::<u64>()
                        % em;
                    assert_eq!(xtax, scale * f.evaluate_mask(mask) % em);
                }
            }
        }
    }

    #[test]
    fn form_rank_diagonal_cases() {
        // x1^2 + x2^2 mod 3 folds to x1 + x2; the form has rank 2.
        let f = QuadPoly::from_terms(
            Modulus::new(3).unwrap(),
            2,
            0,
            &[0, 0],
            &[(0, 0, 1), (1, 1, 1)],
        )
        .unwrap();
        assert_eq!(form_rank(&f).unwrap(), 2);
        // A_f = diag(4, 2) over Z_8.
        let g = QuadPoly::from_terms(Modulus::new(8).unwrap(), 2, 0, &[4, 2], &[]).unwrap();
        assert_eq!(form_rank(&g).unwrap(), 2);
    }

    #[test]
    fn form_rank_hypothesis_checks() {
        let f = QuadPoly::from_terms(Modulus::new(6).unwrap(), 1, 0, &[1], &[]).unwrap();
        assert!(form_rank(&f).is_err());
        let g = QuadPoly::from_terms(Modulus::new(4).unwrap(), 1, 0, &[1], &[]).unwrap();
        assert!(form_rank(&g).is_err());
    }

    /// Def-rank oracle on all of Z_m^n: least r such that some r linear keys
    /// make the form's value a function of the keys.
    fn def_rank_oracle(a: &ZmMatrix) -> usize {
        let m = a.modulus().value();
        let n = a.rows();
        let points: Vec<Vec<u64>> = (0..m.pow(n as u32))
            .map(|code| (0..n).map(|i| code / m.pow(i as u32) % m).collect())
            .collect();
        let form = |x: &[u64]| -> u64 {
            let ax = a.right_apply(x).unwrap();
            x.iter().zip(&ax).map(|(&xi, &yi)| xi * yi % m).sum::<u64>() % m
        };
        let values: Vec<u64> = points.iter().map(|x| form(x)).collect();
        'r: for r in 0..=n {
            let tuples = m.pow((n * r) as u32);
            for code in 0..tuples {
                let vs: Vec<Vec<u64>> = (0..r)
                    .map(|k| {
                        (0..n)
                            .map(|i| code / m.pow((k * n + i) as u32) % m)
                            .collect()
                    })
                    .collect();
                let mut table: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
                let mut ok = true;
                for (x, &fx) in points.iter().zip(&values) {
                    let key: Vec<u64> = vs
                        .iter()
                        .map(|v| {
                            v.iter().zip(x).map(|(&vi, &xi)| vi * xi % m).sum::<u64>() % m
                        })
                        .collect();
                    match table.get(&key) {
                        None => {
                            table.insert(key, fx);
                        }
                        Some(&prev) if prev == fx => {}
                        Some(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return r;
                }
                if r == 0 {
                    continue 'r;
                }
            }
        }
        n
    }

    #[test]
    fn form_rank_matches_def_rank_oracle() {
        // All forms mod 3 with n = 2 (diagonal pair + off-diagonal term).
        for c11 in 0..3u64 {
            for c22 in 0..3u64 {
                for c12 in 0..3u64 {
                    let f = QuadPoly::from_terms(
                        Modulus::new(3).unwrap(),
                        2,
                        0,
                        &[c11, c22],
                        &[(0, 1, c12)],
                    )
                    .unwrap();
                    let a = assoc_matrix(&f);
                    assert_eq!(form_rank(&f).unwrap(), def_rank_oracle(&a.matrix));
                }
            }
        }
        // Over even prime powers an arbitrary reassembly function can undercut
        // the matrix rank: 2x1^2 + 2x2^2 over Z_4 equals F(x1 + x2) with
        // F(k) = 2(k mod 2), yet A_f = diag(2,2) has rank 2. So only the
        // direction def-rank <= rank(A_f) is checked for m = 4 and for
        // doubled mod-2 forms; equality is an odd-prime-power fact.
        for c11 in [0u64, 2] {
            for c22 in [0u64, 2] {
                for c12 in [0u64, 2] {
                    let f = QuadPoly::from_terms(
                        Modulus::new(4).unwrap(),
                        2,
                        0,
                        &[c11, c22],
                        &[(0, 1, c12)],
                    )
                    .unwrap();
                    let a = assoc_matrix(&f);
                    assert!(def_rank_oracle(&a.matrix) <= form_rank(&f).unwrap());
                }
            }
        }
        for c11 in 0..2u64 {
            for c22 in 0..2u64 {
                for c12 in 0..2u64 {
                    let f = QuadPoly::from_terms(
                        Modulus::new(2).unwrap(),
                        2,
                        0,
                        &[c11, c22],
                        &[(0, 1, c12)],
                    )
                    .unwrap()
                    .double();
                    let a = assoc_matrix(&f);
                    assert!(def_rank_oracle(&a.matrix) <= form_rank(&f).unwrap());
                }
            }
        }
        let undercut = QuadPoly::from_terms(
            Modulus::new(4).unwrap(),
            2,
            0,
            &[2, 2],
            &[],
        )
        .unwrap();
        let a = assoc_matrix(&undercut);
        assert_eq!(form_rank(&undercut).unwrap(), 2);
        assert_eq!(def_rank_oracle(&a.matrix), 1);
    }

    #[test]
    fn form_rank_matches_oracle_mod9_sample() {
        let mut rng = StdRng::seed_from_u64(0x99);
        for _ in 0..12 {
            let f = random_poly(&mut rng, 9, 2, false);
            let a = assoc_matrix(&f);
            assert_eq!(form_rank(&f).unwrap(), def_rank_oracle(&a.matrix));
        }
    }

    #[test]
    fn reduce_mod_f10() {
        let f = ten_variable_witness();
        let f2 = f.reduce_mod(2).unwrap();
        assert_eq!(f2.linear_coeffs(), &[1; 10]);
        assert_eq!(f2.quad_coeffs().len(), 5);
        assert!(f2.quad_coeffs().values().all(|&v| v == 1));
        assert_eq!(f.reduce_mod(6).unwrap(), f);
        assert!(f.reduce_mod(4).is_err());
        let mut rng = StdRng::seed_from_u64(0x6d);
        for _ in 0..20 {
            let g = random_poly(&mut rng, 12, 6, true);
            for m2 in [2u64, 3, 4, 6] {
                let r = g.reduce_mod(m2).unwrap();
                for mask in 0..64u64 {
                    assert_eq!(r.evaluate_mask(mask), g.evaluate_mask(mask) % m2);
                }
            }
        }
    }

    #[test]
    fn brank_upper_square_of_sum() {
        let f = QuadPoly::square_of_linear(Modulus::new(3).unwrap(), &[1, 1, 1, 1]);
        let b = brank_upper(&f, 20_000_000).unwrap();
        assert_eq!(b.upper, 2);
        assert!(b.exact);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn brank_upper_linear_is_one() {
        let f = QuadPoly::linear_form(Modulus::new(3).unwrap(), &[1, 2, 1]);
        let b = brank_upper(&f, 20_000_000).unwrap();
        assert_eq!(b.upper, 1);
    }

    #[test]
    fn brank_upper_matches_independent_diagonal_search() {
        let mut rng = StdRng::seed_from_u64(0xb0);
        for _ in 0..10 {
            let f = random_poly(&mut rng, 2, 5, false);
            let a = assoc_matrix(&f);
            let em = a.effective_modulus().value();
            let n = f.n();
            // Test-local brute force over all diagonals of the effective modulus.
            let mut best = usize::MAX;
            for code in 0..em.pow(n as u32) {
                let d: Vec<u64> = (0..n).map(|i| code / em.pow(i as u32) % em).collect();
                best = best.min(crate::zmod::rank(&a.matrix.add_diagonal(&d).unwrap()));
            }
            let b = brank_upper(&f, 20_000_000).unwrap();
            assert!(b.exact);
            assert_eq!(b.upper, 1 + best);
        }
    }

    #[test]
    fn brank_tiny_examples() {
        let f = QuadPoly::square_of_linear(Modulus::new(3).unwrap(), &[1, 1, 1, 1]);
        let t = brank_exact_tiny(&f).unwrap();
        assert_eq!(t.rank, 1);
        let c = QuadPoly::constant(Modulus::new(4).unwrap(), 3, 2);
        assert_eq!(brank_exact_tiny(&c).unwrap().rank, 0);
        // x1 x2 mod 3: the single form x1 + x2 separates the fibers.
        let g =
            QuadPoly::from_terms(Modulus::new(3).unwrap(), 2, 0, &[0, 0], &[(0, 1, 1)]).unwrap();
        assert_eq!(brank_exact_tiny(&g).unwrap().rank, 1);
        let too_big = QuadPoly::zero(Modulus::new(5).unwrap(), 2);
        assert!(brank_exact_tiny(&too_big).is_err());
    }

    #[test]
    fn tiny_witnesses_separate_fibers() {
        let mut rng = StdRng::seed_from_u64(0x71);
        for &m in &[2u64, 3, 4] {
            for _ in 0..15 {
                let n = rng.gen_range(1..=4);
                let f = random_poly(&mut rng, m, n, true);
                let t = brank_exact_tiny(&f).unwrap();
                assert_eq!(t.witnesses.len(), t.rank);
                let mut table: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
                for mask in 0..1u64 << n {
                    let key: Vec<u64> = t
                        .witnesses
                        .iter()
                        .map(|v| {
                            (0..n)
                                .filter(|&i| mask >> i & 1 == 1)
                                .map(|i| v[i])
                                .sum::<u64>()
                                % m
                        })
                        .collect();
                    let fx = f.evaluate_mask(mask);
                    match table.get(&key) {
                        None => {
                            table.insert(key, fx);
                        }
                        Some(&prev) => assert_eq!(prev, fx, "witnesses fail to determine f"),
                    }
                }
            }
        }
    }

    /// The diagonal bound caps the boolean rank of the polynomial the
    /// associated matrix actually describes. For odd moduli that is f; for
    /// mod 2 it is 2f over Z_4, whose boolean rank can be strictly smaller
    /// (Z_4 keys on the cube separate more than Z_2 keys), so the doubled
    /// polynomial is what gets sandwiched there.
    #[test]
    fn sandwich_tiny_below_upper() {
        let mut rng = StdRng::seed_from_u64(0x5d);
        for _ in 0..10 {
            let n = rng.gen_range(1..=4);
            let f = random_poly(&mut rng, 3, n, false);
            let tiny = brank_exact_tiny(&f).unwrap();
            let upper = brank_upper(&f, 20_000_000).unwrap();
            assert!(
                tiny.rank <= upper.upper,
                "tiny {} vs upper {} for {f:?}",
                tiny.rank,
                upper.upper
            );
        }
        for _ in 0..10 {
            let n = rng.gen_range(1..=4);
            let f = random_poly(&mut rng, 2, n, false);
            let doubled_tiny = brank_exact_tiny(&f.double()).unwrap();
            let plain_tiny = brank_exact_tiny(&f).unwrap();
            let upper = brank_upper(&f, 20_000_000).unwrap();
            assert!(doubled_tiny.rank <= plain_tiny.rank);
            assert!(
                doubled_tiny.rank <= upper.upper,
                "doubled tiny {} vs upper {} for {f:?}",
                doubled_tiny.rank,
                upper.upper
            );
        }
        // Doubling can strictly lower the boolean rank.
        let f = QuadPoly::from_terms(
            Modulus::new(2).unwrap(),
            3,
            0,
            &[1, 1, 1],
            &[(1, 2, 1)],
        )
        .unwrap();
        assert_eq!(brank_exact_tiny(&f).unwrap().rank, 3);
        // 2x1 + x2 + x3 mod 4 alone determines 2f on the cube.
        assert_eq!(brank_exact_tiny(&f.double()).unwrap().rank, 1);
    }

    #[test]
    fn poly_json_round_trip() {
        let f = ten_variable_witness();
        let s = serde_json::to_string(&f).unwrap();
        let g: QuadPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
