//! Zero-sum additive combinatorics: Davenport constants of small abelian
//! groups by exhaustive search, and exact boolean solution counts for
//! modular linear systems.
//!
//! The Davenport convention here: `d(G)` is the largest length of a
//! zero-sum-free sequence, so every sequence of length `> d(G)` has a
//! nonempty boolean zero-sum. (The classical constant is this plus one.)

mod systems;

pub use systems::{
    count_boolean_solutions, solution_bounds_check, LinearSystem, SolutionBoundsReport,
    SystemConstraint,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// An abelian group as a product of cyclic factors `Z_{d_1} x ... x Z_{d_r}`
/// (no divisibility normalization is imposed on the input).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianShape {
    pub factors: Vec<u64>,
}

impl AbelianShape {
    pub fn new(factors: Vec<u64>) -> Result<AbelianShape> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::usage("cyclic factors must be >= 2"));
        }
        Ok(AbelianShape { factors })
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &d| acc / crate::zmod::gcd(acc, d) * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    fn element_tuple(&self, index: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut rest = index as u64;
        for &d in &self.factors {
            out.push(rest % d);
            rest /= d;
        }
        out
    }
}

/// Addition table of a group of order at most 64, with elements indexed in
/// mixed radix so the identity is index 0.
struct GroupTable {
    order: usize,
    add: Vec<u8>,
}

impl GroupTable {
    fn new(shape: &AbelianShape) -> Result<GroupTable> {
        let order = shape.order();
        if order > 64 {
            return Err(Error::budget(format!(
                "exhaustive Davenport search supports |G| <= 64, got {order}"
            )));
        }
        let order = order as usize;
        let mut add = vec![0u8; order * order];
        for a in 0..order {
            for b in 0..order {
                let mut sum = 0u64;
                let mut stride = 1u64;
                let (mut ra, mut rb) = (a as u64, b as u64);
                for &d in &shape.factors {
                    let s = (ra % d + rb % d) % d;
                    sum += s * stride;
                    stride *= d;
                    ra /= d;
                    rb /= d;
                }
                add[a * order + b] = sum as u8;
            }
        }
        Ok(GroupTable { order, add })
    }

    #[inline]
    fn shift(&self, set: u64, g: usize) -> u64 {
        let mut out = 0u64;
        let mut rest = set;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1u64 << self.add[s * self.order + g];
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DavenportResult {
    /// Largest length of a zero-sum-free sequence over the group.
    pub value: u64,
    /// A witness sequence of that length, as element tuples.
    pub witness: Vec<Vec<u64>>,
    /// Search nodes visited.
    pub nodes: u64,
}

const NO_EXTENSION: u8 = u8::MAX;

struct DavenportSearch<'a> {
    table: &'a GroupTable,
    budget: u64,
    nodes: u64,
    best: u64,
    best_path: Vec<usize>,
    path: Vec<usize>,
    /// (achievable-sum set, minimal next element) -> exact max extension and
    /// the first element of one optimal extension; recorded only for
    /// subtrees explored without a best-bound cutoff.
    memo: HashMap<(u64, u8), (u8, u8)>,
}

impl DavenportSearch<'_> {
    /// Returns (max extension from this state, whether it is exact).
    fn explore(&mut self, sums: u64, min_elem: usize, len: u64) -> Result<(u64, bool)> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget(format!(
                "Davenport search exceeded {} nodes",
                self.budget
            )));
        }
        if let Some(&(ext, _)) = self.memo.get(&(sums, min_elem as u8)) {
            if len + ext as u64 > self.best {
                self.best = len + ext as u64;
                let mut tail = self.path.clone();
                let (mut s, mut me) = (sums, min_elem);
                while let Some(&(e, fg)) = self.memo.get(&(s, me as u8)) {
                    if e == 0 || fg == NO_EXTENSION {
                        break;
                    }
                    let g = fg as usize;
                    tail.push(g);
                    s = s | self.table.shift(s, g) | (1u64 << g);
                    me = g;
                }
                self.best_path = tail;
            }
            return Ok((ext as u64, true));
        }
        // A zero-sum-free extension adds at least one fresh sum per element,
        // and 0 is never achievable, so capacity bounds the extension.
        let capacity = (self.table.order as u64 - 1) - sums.count_ones() as u64;
        if len + capacity <= self.best {
            return Ok((capacity, false));
        }
        let mut ext = 0u64;
        let mut first = NO_EXTENSION;
        let mut exact = true;
        for g in min_elem..self.table.order {
            let next = sums | self.table.shift(sums, g) | (1u64 << g);
            if next & 1 != 0 {
                continue;
            }
            if len + 1 > self.best {
                self.best = len + 1;
                self.path.push(g);
                self.best_path = self.path.clone();
                self.path.pop();
            }
            self.path.push(g);
            let (sub, sub_exact) = self.explore(next, g, len + 1)?;
            self.path.pop();
            if 1 + sub > ext {
                ext = 1 + sub;
                first = g as u8;
            }
            exact &= sub_exact;
        }
        if exact {
            self.memo.insert((sums, min_elem as u8), (ext as u8, first));
        }
        Ok((ext, exact))
    }
}

/// The paper-convention Davenport constant of `G` by depth-first search over
/// zero-sum-free multisets (non-decreasing element order), with achievable
/// subset sums kept as a 64-bit mask and memoization on (sum set, minimum
/// next element).
pub fn davenport_exact(shape: &AbelianShape, node_budget: u64) -> Result<DavenportResult> {
    if shape.is_trivial() || shape.order() == 1 {
        return Err(Error::precondition("Davenport constant needs a nontrivial group"));
    }
    let table = GroupTable::new(shape)?;
    let mut search = DavenportSearch {
        table: &table,
        budget: node_budget,
        nodes: 0,
        best: 0,
        best_path: Vec::new(),
        path: Vec::new(),
        memo: HashMap::new(),
    };
    search.explore(0, 1, 0)?;
    let witness = search
        .best_path
        .iter()
        .map(|&g| shape.element_tuple(g))
        .collect();
    Ok(DavenportResult {
        value: search.best,
        witness,
        nodes: search.nodes,
    })
}

/// The exponent-based upper bound `(e - 1) + e·log2(|G|/e)` on the paper's
/// Davenport constant, `e` the exponent of `G`.
pub fn davenport_bound(shape: &AbelianShape) -> Result<f64> {
    if shape.is_trivial() || shape.order() == 1 {
        return Err(Error::precondition("Davenport bound needs a nontrivial group"));
    }
    let e = shape.exponent() as f64;
    let order = shape.order() as f64;
    Ok((e - 1.0) + e * (order / e).log2())
}
