//! Exact linear algebra over `Z_m` for composite `m`.
//!
//! Matrices carry their modulus. Rank is the number of invariant factors of
//! the subgroup of `Z_m^k` generated by the rows (equivalently columns), which
//! for composite moduli is finer than counting pivots. Everything here is
//! exact integer arithmetic; there is no floating point in this module.

mod smith;
mod solve;

pub use smith::{group_shape, rank, smith_normal_form, Side, SmithDecomposition};
pub use solve::{
    det_mod, full_rank_submatrix, left_nullspace, lex_least_left_solution, row_space_contains,
    solve_left, spanning_rows,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on signed 128-bit integers: returns `(g, s, t)` with
/// `s*a + t*b = g` and `g = gcd(|a|, |b|)`.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            return (-a, -1, 0);
        }
        return (a, 1, 0);
    }
    let (g, s, t) = egcd(b, a % b);
    (g, t, s - (a / b) * t)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (g, s, _) = egcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some((s.rem_euclid(m as i128)) as u64)
}

pub fn is_unit(a: u64, m: u64) -> bool {
    gcd(a % m, m) == 1
}

/// A modulus `m >= 2` together with its prime factorization.
///
/// The factorization is recovered by trial division on construction, so the
/// invariants (ascending primes, exponents >= 1, product = m) hold by
/// construction. Serializes as the bare integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u64,
    factors: Vec<(u64, u32)>,
}

impl Serialize for Modulus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.m)
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = u64::deserialize(d)?;
        Modulus::new(m).map_err(serde::de::Error::custom)
    }
}

impl Modulus {
    pub fn new(m: u64) -> Result<Modulus> {
        if m < 2 {
            return Err(Error::usage(format!("modulus must be >= 2, got {m}")));
        }
        let mut factors = Vec::new();
        let mut rest = m;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0u32;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += 1;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(Modulus { m, factors })
    }

    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// The prime powers `q` with `q || m` (`q` fully divides `m`).
    pub fn full_prime_power_divisors(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    /// All divisors of `m` in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            let mut pk = 1u64;
            for _ in 0..=e {
                for &d in &out {
                    next.push(d * pk);
                }
                pk *= p;
            }
            out = next;
        }
        out.sort_unstable();
        out
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.m
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    m: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

/// A dense row-major matrix over `Z_m`. Every entry is a residue in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ZmMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl TryFrom<MatrixRepr> for ZmMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<ZmMatrix> {
        ZmMatrix::from_entries(Modulus::new(r.m)?, r.rows, r.cols, r.entries)
    }
}

impl From<ZmMatrix> for MatrixRepr {
    fn from(a: ZmMatrix) -> MatrixRepr {
        MatrixRepr {
            m: a.modulus.value(),
            rows: a.rows,
            cols: a.cols,
            entries: a.entries,
        }
    }
}

impl ZmMatrix {
    pub fn zero(modulus: Modulus, rows: usize, cols: usize) -> ZmMatrix {
        ZmMatrix {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, n: usize) -> ZmMatrix {
        let mut a = ZmMatrix::zero(modulus, n, n);
        for i in 0..n {
            a.entries[i * n + i] = 1;
        }
        a
    }

    pub fn from_entries(
        modulus: Modulus,
        rows: usize,
        cols: usize,
        entries: Vec<u64>,
    ) -> Result<ZmMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::usage(format!(
                "matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = modulus.value();
        let entries = entries.into_iter().map(|e| e % m).collect();
        Ok(ZmMatrix {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from nested rows (used heavily in tests).
    pub fn from_rows(modulus: Modulus, rows: &[Vec<u64>]) -> Result<ZmMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::usage("ragged rows in matrix literal"));
        }
        ZmMatrix::from_entries(modulus, r, c, rows.concat())
    }

    pub fn diagonal(modulus: Modulus, diag: &[u64]) -> ZmMatrix {
        let n = diag.len();
        let mut a = ZmMatrix::zero(modulus, n, n);
        for (i, &d) in diag.iter().enumerate() {
            let m = a.modulus.value();
            a.entries[i * n + i] = d % m;
        }
        a
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.modulus.value();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn transpose(&self) -> ZmMatrix {
        let mut t = ZmMatrix::zero(self.modulus.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &ZmMatrix) -> Result<ZmMatrix> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return Err(Error::usage("matrix product shape/modulus mismatch"));
        }
        let m = self.modulus.value() as u128;
        let mut out = ZmMatrix::zero(self.modulus.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u128 * other.get(k, j) as u128;
                    if acc >= u128::MAX / 2 {
                        acc %= m;
                    }
                }
                out.entries[i * other.cols + j] = (acc % m) as u64;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ZmMatrix) -> Result<ZmMatrix> {
        if self.rows != other.rows || self.cols != other.cols || self.modulus != other.modulus {
            return Err(Error::usage("matrix sum shape/modulus mismatch"));
        }
        let m = self.modulus.value();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + b) % m)
            .collect();
        Ok(ZmMatrix {
            modulus: self.modulus.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// `self + diag(d)` for square matrices.
    pub fn add_diagonal(&self, d: &[u64]) -> Result<ZmMatrix> {
        if self.rows != self.cols || d.len() != self.rows {
            return Err(Error::usage("add_diagonal needs a square matrix and a matching diagonal"));
        }
        let mut out = self.clone();
        let m = out.modulus.value();
        for (i, &v) in d.iter().enumerate() {
            let cur = out.get(i, i);
            out.entries[i * out.cols + i] = (cur + v % m) % m;
        }
        Ok(out)
    }

    /// Additive inverse of every entry.
    pub fn neg(&self) -> ZmMatrix {
        let m = self.modulus.value();
        let entries = self.entries.iter().map(|&a| (m - a) % m).collect();
        ZmMatrix {
            modulus: self.modulus.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ZmMatrix {
        let mut out = ZmMatrix::zero(self.modulus.clone(), rows.len(), cols.len());
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                out.entries[ri * cols.len() + ci] = self.get(i, j);
            }
        }
        out
    }

    /// Row vector times matrix: `v^T A` over `Z_m`.
    pub fn left_apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::usage("vector length does not match row count"));
        }
        let m = self.modulus.value() as u128;
        let mut out = vec![0u64; self.cols];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for (i, &vi) in v.iter().enumerate() {
                acc += vi as u128 * self.get(i, j) as u128;
            }
            *slot = (acc % m) as u64;
        }
        Ok(out)
    }

    /// Matrix times column vector: `A x` over `Z_m`.
    pub fn right_apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::usage("vector length does not match column count"));
        }
        let m = self.modulus.value() as u128;
        let mut out = vec![0u64; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for (j, &xj) in x.iter().enumerate() {
                acc += self.get(i, j) as u128 * xj as u128;
            }
            *slot = (acc % m) as u64;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

/// The invariant-factor shape of a subgroup of `Z_m^k`: an ascending
/// divisibility chain `d_1 | d_2 | ... | d_r` with every `d_i >= 2` and
/// `d_i | m`. The empty shape is the trivial group (rank 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupShape {
    pub factors: Vec<u64>,
}

impl GroupShape {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    /// Number of elements `g` of the group with `d * g = 0`; together with
    /// the group order this pins down the isomorphism type, which is what the
    /// enumeration oracles in the tests compare against.
    pub fn torsion_count(&self, d: u64) -> u128 {
        self.factors.iter().map(|&f| gcd(f, d) as u128).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_factorization() {
        let m = Modulus::new(12).unwrap();
        assert_eq!(m.factors(), &[(2, 2), (3, 1)]);
        assert!(!m.is_prime_power());
        assert_eq!(m.full_prime_power_divisors(), vec![4, 3]);
        assert_eq!(m.divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert!(Modulus::new(8).unwrap().is_prime_power());
        assert!(Modulus::new(1).is_err());
    }

    #[test]
    fn egcd_bezout() {
        for a in 0..40i128 {
            for b in 0..40i128 {
                let (g, s, t) = egcd(a, b);
                assert_eq!(s * a + t * b, g);
                assert_eq!(g, gcd(a as u64, b as u64) as i128);
            }
        }
    }

    #[test]
    fn mod_inv_small() {
        for m in 2..30u64 {
            for a in 1..m {
                match mod_inv(a, m) {
                    Some(inv) => assert_eq!(a * inv % m, 1),
                    None => assert_ne!(gcd(a, m), 1),
                }
            }
        }
    }

    #[test]
    fn matrix_roundtrip_json() {
        let m = Modulus::new(6).unwrap();
        let a = ZmMatrix::from_rows(m, &[vec![1, 2], vec![3, 4]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":6,"rows":2,"cols":2,"entries":[1,2,3,4]}"#);
        let b: ZmMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn entries_reduced_on_construction() {
        let m = Modulus::new(5).unwrap();
        let a = ZmMatrix::from_entries(m, 1, 3, vec![5, 6, 12]).unwrap();
        assert_eq!(a.entries(), &[0, 1, 2]);
    }
}
