//! Smith normal form over `Z_m` and the group-shape rank derived from it.
//!
//! `Z_m` is not a domain, but it is a quotient of `Z`, so the integer Smith
//! algorithm applies verbatim to lifted entries as long as every elementary
//! transformation is unimodular over `Z`; reducing mod `m` after each step
//! keeps the numbers small and leaves `P·A·Q = D` exact over `Z_m`.

use super::{egcd, gcd, GroupShape, ZmMatrix};
use serde::{Deserialize, Serialize};

/// Which generating family of a matrix to read a subgroup from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Row,
    Column,
}

/// Invertible `P` (rows x rows) and `Q` (cols x cols) with `P·A·Q = D`
/// diagonal, where the nonzero diagonal entries, read as `gcd(entry, m)`,
/// form a divisibility chain. Diagonal entries are normalized to divisors of
/// `m` (zero stands for the divisor `m` itself).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub p: ZmMatrix,
    pub q: ZmMatrix,
    pub d: ZmMatrix,
}

impl SmithDecomposition {
    /// The diagonal read as divisors of `m`: `gcd(entry, m)` per diagonal
    /// position, so a zero entry reads as `m`.
    pub fn diagonal_gcds(&self) -> Vec<u64> {
        let m = self.d.modulus().value();
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| {
                let e = self.d.get(i, i);
                if e == 0 {
                    m
                } else {
                    gcd(e, m)
                }
            })
            .collect()
    }

    /// Exact reconstruction check `P·A·Q = D`.
    pub fn verify(&self, a: &ZmMatrix) -> bool {
        match self.p.mul(a).and_then(|pa| pa.mul(&self.q)) {
            Ok(paq) => paq == self.d,
            Err(_) => false,
        }
    }
}

struct Worker {
    m: u64,
    rows: usize,
    cols: usize,
    d: Vec<u64>,
    p: Vec<u64>,
    q: Vec<u64>,
}

impl Worker {
    fn at(&self, i: usize, j: usize) -> u64 {
        self.d[i * self.cols + j]
    }

    /// Row op `(r_a, r_b) <- (s·r_a + t·r_b, u·r_a + v·r_b)` applied to `d`
    /// and mirrored on `p`; the caller guarantees `s·v - t·u = ±1` over `Z`.
    fn row_transform(&mut self, a: usize, b: usize, s: i128, t: i128, u: i128, v: i128) {
        let m = self.m as i128;
        for j in 0..self.cols {
            let (x, y) = (self.d[a * self.cols + j] as i128, self.d[b * self.cols + j] as i128);
            self.d[a * self.cols + j] = ((s * x + t * y).rem_euclid(m)) as u64;
            self.d[b * self.cols + j] = ((u * x + v * y).rem_euclid(m)) as u64;
        }
        for j in 0..self.rows {
            let (x, y) = (self.p[a * self.rows + j] as i128, self.p[b * self.rows + j] as i128);
            self.p[a * self.rows + j] = ((s * x + t * y).rem_euclid(m)) as u64;
            self.p[b * self.rows + j] = ((u * x + v * y).rem_euclid(m)) as u64;
        }
    }

    fn col_transform(&mut self, a: usize, b: usize, s: i128, t: i128, u: i128, v: i128) {
        let m = self.m as i128;
        for i in 0..self.rows {
            let (x, y) = (self.d[i * self.cols + a] as i128, self.d[i * self.cols + b] as i128);
            self.d[i * self.cols + a] = ((s * x + t * y).rem_euclid(m)) as u64;
            self.d[i * self.cols + b] = ((u * x + v * y).rem_euclid(m)) as u64;
        }
        for i in 0..self.cols {
            let (x, y) = (self.q[i * self.cols + a] as i128, self.q[i * self.cols + b] as i128);
            self.q[i * self.cols + a] = ((s * x + t * y).rem_euclid(m)) as u64;
            self.q[i * self.cols + b] = ((u * x + v * y).rem_euclid(m)) as u64;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.d.swap(a * self.cols + j, b * self.cols + j);
        }
        for j in 0..self.rows {
            self.p.swap(a * self.rows + j, b * self.rows + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.d.swap(i * self.cols + a, i * self.cols + b);
        }
        for i in 0..self.cols {
            self.q.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Clear row and column `t` against the pivot `(t, t)`. When the pivot
    /// divides the target, a plain elimination leaves the pivot row or
    /// column untouched; otherwise a Bezout combination strictly shrinks the
    /// lifted pivot value, so the alternation terminates.
    fn clear_pivot(&mut self, t: usize) {
        loop {
            let mut dirty = false;
            for i in t + 1..self.rows {
                let b = self.at(i, t);
                if b == 0 {
                    continue;
                }
                let a = self.at(t, t);
                if b % a == 0 {
                    self.row_transform(t, i, 1, 0, -((b / a) as i128), 1);
                } else {
                    let (g, s, u) = egcd(a as i128, b as i128);
                    self.row_transform(t, i, s, u, -(b as i128 / g), a as i128 / g);
                }
                dirty = true;
            }
            for j in t + 1..self.cols {
                let b = self.at(t, j);
                if b == 0 {
                    continue;
                }
                let a = self.at(t, t);
                if b % a == 0 {
                    self.col_transform(t, j, 1, 0, -((b / a) as i128), 1);
                } else {
                    let (g, s, u) = egcd(a as i128, b as i128);
                    self.col_transform(t, j, s, u, -(b as i128 / g), a as i128 / g);
                }
                dirty = true;
            }
            if !dirty {
                return;
            }
        }
    }

    /// Find the nonzero entry in the trailing submatrix whose gcd with `m`
    /// is minimal and move it to `(t, t)`. Returns false when the trailing
    /// submatrix is all zero.
    fn place_pivot(&mut self, t: usize) -> bool {
        let mut best: Option<(u64, usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let e = self.at(i, j);
                if e == 0 {
                    continue;
                }
                let key = gcd(e, self.m);
                if best.map_or(true, |(bk, _, _)| key < bk) {
                    best = Some((key, i, j));
                }
            }
        }
        match best {
            None => false,
            Some((_, i, j)) => {
                self.swap_rows(t, i);
                self.swap_cols(t, j);
                true
            }
        }
    }
}

/// Smith normal form of `A` over `Z_m`: `P·A·Q = D` with `P`, `Q` invertible
/// (their determinants are units mod `m`) and the diagonal of `D` a
/// divisibility chain of divisors of `m`. Total on every input.
pub fn smith_normal_form(a: &ZmMatrix) -> SmithDecomposition {
    let modulus = a.modulus().clone();
    let m = modulus.value();
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = Worker {
        m,
        rows,
        cols,
        d: a.entries().to_vec(),
        p: ZmMatrix::identity(modulus.clone(), rows).entries().to_vec(),
        q: ZmMatrix::identity(modulus.clone(), cols).entries().to_vec(),
    };

    let k = rows.min(cols);
    for t in 0..k {
        if !w.place_pivot(t) {
            break;
        }
        w.clear_pivot(t);
    }

    // Enforce the divisibility chain on gcds with m: bubble passes with the
    // standard column-injection fixup on offending adjacent pairs.
    loop {
        let mut changed = false;
        for t in 0..k.saturating_sub(1) {
            let a0 = w.at(t, t);
            let b0 = w.at(t + 1, t + 1);
            let ga = if a0 == 0 { m } else { gcd(a0, m) };
            let gb = if b0 == 0 { m } else { gcd(b0, m) };
            if gb % ga == 0 {
                continue;
            }
            // col t += col t+1 puts b0 at (t+1, t); re-clearing the pivot
            // replaces the pair (a0, b0) with (gcd, lcm) up to units.
            w.col_transform(t, t + 1, 1, 1, 0, 1);
            w.clear_pivot(t);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    // Normalize each diagonal entry to gcd(entry, m) by a unit row scaling.
    for t in 0..k {
        let e = w.at(t, t);
        if e == 0 {
            continue;
        }
        let g = gcd(e, m);
        if e == g {
            continue;
        }
        let u = unit_scaling_to_gcd(e, m);
        let m128 = m as u128;
        for j in 0..cols {
            w.d[t * cols + j] = ((w.d[t * cols + j] as u128 * u as u128) % m128) as u64;
        }
        for j in 0..rows {
            w.p[t * rows + j] = ((w.p[t * rows + j] as u128 * u as u128) % m128) as u64;
        }
    }

    SmithDecomposition {
        p: ZmMatrix::from_entries(modulus.clone(), rows, rows, w.p).expect("p shape"),
        q: ZmMatrix::from_entries(modulus.clone(), cols, cols, w.q).expect("q shape"),
        d: ZmMatrix::from_entries(modulus, rows, cols, w.d).expect("d shape"),
    }
}

/// A unit `u` mod `m` with `u·e = gcd(e, m) mod m` (`e` nonzero). Every
/// residue is a unit multiple of its gcd with the modulus.
fn unit_scaling_to_gcd(e: u64, m: u64) -> u64 {
    let g = gcd(e, m);
    let m1 = m / g;
    // e/g is invertible mod m/g; lift that inverse to a unit mod m. Some
    // lift base + k*(m/g) is a unit because units mod m surject onto units
    // mod m/g.
    let base = if m1 == 1 {
        0
    } else {
        super::mod_inv((e / g) % m1, m1).expect("e/g invertible mod m/g")
    };
    let mut u = 1;
    for k in 0..g.max(1) {
        let cand = (base + k * m1) % m;
        if cand != 0 && gcd(cand, m) == 1 {
            u = cand;
            break;
        }
    }
    debug_assert_eq!(e as u128 * u as u128 % m as u128, g as u128);
    u
}

/// Invariant factors of the subgroup of `Z_m^k` generated by the rows or the
/// columns of `A` (the two agree for every matrix). Rank is the length.
pub fn group_shape(a: &ZmMatrix, side: Side) -> GroupShape {
    let work = match side {
        Side::Row => a.clone(),
        Side::Column => a.transpose(),
    };
    let snf = smith_normal_form(&work);
    let m = a.modulus().value();
    let mut factors: Vec<u64> = snf
        .diagonal_gcds()
        .into_iter()
        .filter(|&g| g != m)
        .map(|g| m / g)
        .collect();
    factors.sort_unstable();
    debug_assert!(factors.windows(2).all(|w| w[1] % w[0] == 0));
    GroupShape { factors }
}

/// Rank of `A` over `Z_m`: the rank of the group generated by its rows.
pub fn rank(a: &ZmMatrix) -> usize {
    group_shape(a, Side::Row).rank()
}
