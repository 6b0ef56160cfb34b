//! Diagonal rigidity: how far a symmetric matrix over `Z_q` stays from low
//! rank under arbitrary diagonal perturbations.
//!
//! The constructive half mirrors the pen-and-paper argument: find the
//! best off-diagonal block, extract spanning rows, express every remaining
//! row of the half as a combination of them, and fix the diagonal entries so
//! the combinations extend through the diagonal. The result is a diagonal
//! `D` with `rank(A + D) <= 4s`, `s` the maximal off-diagonal block rank.

use crate::error::{Error, Result};
use crate::zmod::{
    group_shape, lex_least_left_solution, rank, row_space_contains, spanning_rows, Side, ZmMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Knobs for the diagonal-rank searches. `exact_diagonals` is the largest
/// number of diagonals that will be enumerated exhaustively; beyond that the
/// search falls back to seeded sampling plus the constructive procedure.
#[derive(Debug, Clone)]
pub struct RigidityBudget {
    pub exact_diagonals: u64,
    pub random_samples: u64,
    pub offdiag_restarts: u64,
    pub seed: u64,
}

impl Default for RigidityBudget {
    fn default() -> Self {
        RigidityBudget {
            exact_diagonals: 20_000_000,
            random_samples: 200,
            offdiag_restarts: 128,
            seed: 0xd1a6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub min_rank: usize,
    pub witness_diagonal: Vec<u64>,
    /// True when every diagonal was enumerated; otherwise `min_rank` is only
    /// an upper bound on the true minimum.
    pub exact: bool,
    pub offdiag_rank: usize,
    pub offdiag_blocks: (Vec<usize>, Vec<usize>),
}

fn require_symmetric(a: &ZmMatrix) -> Result<()> {
    if !a.is_symmetric() {
        return Err(Error::precondition("rigidity operations need a symmetric matrix"));
    }
    Ok(())
}

fn block_key(a: &ZmMatrix, i1: &[usize], i2: &[usize]) -> (usize, u128, Vec<u64>) {
    let shape = group_shape(&a.submatrix(i1, i2), Side::Row);
    (shape.rank(), shape.order(), shape.factors)
}

fn mask_to_sets(mask: u64, n: usize) -> (Vec<usize>, Vec<usize>) {
    let i1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    let i2: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
    (i1, i2)
}

/// Disjoint index sets maximizing the rank of the block `A[I1 x I2]`,
/// breaking ties toward the block whose rows generate the largest subgroup
/// (then lexicographically by shape and by index mask).
///
/// Every disjoint pair is dominated by the bipartition that completes it, so
/// only complementary pairs are searched: exhaustively for `n <= 12`, by
/// seeded random restarts beyond that.
pub fn max_offdiag_rank(
    a: &ZmMatrix,
    budget: &RigidityBudget,
) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    require_symmetric(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok((0, Vec::new(), Vec::new()));
    }
    if n > 32 {
        return Err(Error::budget("off-diagonal block search supports n <= 32"));
    }
    let mut best: Option<((usize, u128, Vec<u64>), u64)> = None;
    let consider = |mask: u64, best: &mut Option<((usize, u128, Vec<u64>), u64)>| {
        let (i1, i2) = mask_to_sets(mask, n);
        let key = block_key(a, &i1, &i2);
        match best {
            Some((bk, _)) if *bk >= key => {}
            _ => *best = Some((key, mask)),
        }
    };
    if n <= 12 {
        for mask in 0..1u64 << n {
            consider(mask, &mut best);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        consider(0, &mut best);
        consider((1u64 << (n / 2)) - 1, &mut best);
        for _ in 0..budget.offdiag_restarts {
            let mask = rng.gen_range(0..1u64 << n);
            consider(mask, &mut best);
        }
    }
    let ((rank, _, _), mask) = best.expect("at least one bipartition considered");
    let (i1, i2) = mask_to_sets(mask, n);
    Ok((rank, i1, i2))
}

/// Diagonal entries for the rows handled by one half of the construction:
/// every row `t` of `half` outside the spanning set must be a combination of
/// the spanning rows over all columns off `R ∪ {t}`; the diagonal entry is
/// then chosen so the combination extends through column `t`.
fn fill_half(a: &ZmMatrix, half: &[usize], block_cols: &[usize], s: usize, d: &mut [u64]) -> Result<()> {
    let n = a.rows();
    let m = a.modulus().value();
    let block = a.submatrix(half, block_cols);
    if group_shape(&block, Side::Row).rank() != s {
        return Err(Error::precondition(
            "construct_low_rank_diagonal: block rank does not match s",
        ));
    }
    let local = spanning_rows(&block)?;
    let spanning: Vec<usize> = local.iter().map(|&i| half[i]).collect();
    for &t in half {
        if spanning.contains(&t) {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|c| !spanning.contains(c) && *c != t).collect();
        let mat = a.submatrix(&spanning, &cols);
        let target: Vec<u64> = cols.iter().map(|&c| a.get(t, c)).collect();
        let coeffs = lex_least_left_solution(&mat, &target)?.ok_or_else(|| {
            Error::precondition(
                "construct_low_rank_diagonal: infeasible combination, block was not maximal",
            )
        })?;
        let mut acc: u128 = 0;
        for (&r, &c) in spanning.iter().zip(&coeffs) {
            acc += c as u128 * a.get(r, t) as u128;
        }
        let want = (acc % m as u128) as u64;
        d[t] = (want + m - a.get(t, t)) % m;
    }
    Ok(())
}

/// The constructive low-rank diagonal: given a maximal off-diagonal block
/// `(I1, I2)` of rank `s >= 1` (a bipartition, as produced by
/// [`max_offdiag_rank`]), returns `D` with `rank(A + D) <= 4s`. Errors with
/// an infeasible-combination message when `(I1, I2, s)` was not maximal,
/// which a caller may treat as a signal to re-search.
pub fn construct_low_rank_diagonal(
    a: &ZmMatrix,
    i1: &[usize],
    i2: &[usize],
    s: usize,
) -> Result<Vec<u64>> {
    require_symmetric(a)?;
    if !a.modulus().is_prime_power() {
        return Err(Error::precondition(
            "prime-power required: the low-rank diagonal construction works over Z_{p^k}",
        ));
    }
    if s == 0 {
        return Err(Error::precondition("construction needs s >= 1"));
    }
    let n = a.rows();
    let mut sorted: Vec<usize> = i1.iter().chain(i2).copied().collect();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::precondition(
            "construction expects a bipartition I1 ⊔ I2 = [n]",
        ));
    }
    let mut d = vec![0u64; n];
    fill_half(a, i1, i2, s, &mut d)?;
    fill_half(a, i2, i1, s, &mut d)?;
    Ok(d)
}

/// Minimum of `rank(A + D)` over diagonal matrices `D`: exhaustive when
/// `m^n` fits the budget, otherwise the best of a few canonical diagonals,
/// seeded random sampling, and the constructive procedure (`exact: false`,
/// in which case the result is an upper bound on the true minimum).
pub fn min_diag_rank(a: &ZmMatrix, budget: &RigidityBudget) -> Result<RigidityReport> {
    require_symmetric(a)?;
    if !a.modulus().is_prime_power() {
        return Err(Error::precondition(
            "prime-power required: rank minimization is defined over Z_{p^k}",
        ));
    }
    let n = a.rows();
    let m = a.modulus().value();
    let (s, i1, i2) = max_offdiag_rank(a, budget)?;

    let space: Option<u64> = {
        let mut acc: u64 = 1;
        let mut ok = true;
        for _ in 0..n {
            match acc.checked_mul(m) {
                Some(v) if v <= budget.exact_diagonals => acc = v,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        ok.then_some(acc)
    };

    let mut best_rank = usize::MAX;
    let mut witness = vec![0u64; n];
    let try_diag = |diag: &[u64], best_rank: &mut usize, witness: &mut Vec<u64>| {
        let r = rank(&a.add_diagonal(diag).expect("square"));
        if r < *best_rank {
            *best_rank = r;
            *witness = diag.to_vec();
        }
    };

    let exact = if let Some(total) = space {
        let mut diag = vec![0u64; n];
        try_diag(&diag, &mut best_rank, &mut witness);
        for _ in 1..total {
            let mut i = 0;
            loop {
                diag[i] += 1;
                if diag[i] < m {
                    break;
                }
                diag[i] = 0;
                i += 1;
            }
            try_diag(&diag, &mut best_rank, &mut witness);
            if best_rank == 0 {
                break;
            }
        }
        true
    } else {
        let zero = vec![0u64; n];
        try_diag(&zero, &mut best_rank, &mut witness);
        let neg: Vec<u64> = (0..n).map(|i| (m - a.get(i, i)) % m).collect();
        try_diag(&neg, &mut best_rank, &mut witness);
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x5eed);
        let mut diag = vec![0u64; n];
        for _ in 0..budget.random_samples {
            for slot in diag.iter_mut() {
                *slot = rng.gen_range(0..m);
            }
            try_diag(&diag, &mut best_rank, &mut witness);
        }
        if s >= 1 {
            let mut attempt = budget.clone();
            for retry in 0..3 {
                let (s2, j1, j2) = if retry == 0 {
                    (s, i1.clone(), i2.clone())
                } else {
                    attempt.offdiag_restarts *= 4;
                    attempt.seed ^= 0x9e37_79b9 * retry as u64;
                    max_offdiag_rank(a, &attempt)?
                };
                match construct_low_rank_diagonal(a, &j1, &j2, s2) {
                    Ok(d) => {
                        try_diag(&d, &mut best_rank, &mut witness);
                        break;
                    }
                    Err(Error::Precondition(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        false
    };

    Ok(RigidityReport {
        min_rank: best_rank,
        witness_diagonal: witness,
        exact,
        offdiag_rank: s,
        offdiag_blocks: (i1, i2),
    })
}

/// How the weight-tail probability is estimated.
#[derive(Debug, Clone, Copy)]
pub enum TailMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightTail {
    pub empirical: f64,
    pub bound: f64,
    /// Integer weight threshold `floor(t * rank)` actually tested.
    pub threshold: u64,
    pub rank: usize,
}

fn binary_entropy(t: f64) -> f64 {
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    xlx(t) + xlx(1.0 - t)
}

/// Probability that `v + A w` has at most `t·rank(A)` nonzero coordinates
/// for uniform `w` in `B^k`, next to the entropy bound
/// `2^{(t + H(t) - 1)·rank}`.
pub fn weight_tail_experiment(
    a: &ZmMatrix,
    v: &[u64],
    t: f64,
    mode: TailMode,
) -> Result<WeightTail> {
    if v.len() != a.rows() {
        return Err(Error::precondition(
            "weight_tail_experiment needs dim(v) = rows(A)",
        ));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::usage("t must lie in [0, 1]"));
    }
    let r = rank(a);
    let threshold = (t * r as f64 + 1e-9).floor() as u64;
    let m = a.modulus().value();
    let k = a.cols();
    let rows = a.rows();

    let count_low = |w_mask: u64| -> bool {
        let mut nz = 0u64;
        for i in 0..rows {
            let mut acc = v[i] as u128;
            for j in 0..k {
                if w_mask >> j & 1 == 1 {
                    acc += a.get(i, j) as u128;
                }
            }
            if acc % m as u128 != 0 {
                nz += 1;
            }
        }
        nz <= threshold
    };

    let empirical = match mode {
        TailMode::Exhaustive => {
            if k > 24 {
                return Err(Error::budget("exhaustive tail mode requires k <= 24"));
            }
            // Gray-code walk keeping v + Aw and its nonzero count current.
            let mut u: Vec<u64> = v.iter().map(|&x| x % m).collect();
            let mut nz = u.iter().filter(|&&x| x != 0).count() as u64;
            let mut hits = 0u64;
            if nz <= threshold {
                hits += 1;
            }
            let mut w_mask = 0u64;
            for step in 1u64..1 << k {
                let j = step.trailing_zeros() as usize;
                let flip_on = w_mask >> j & 1 == 0;
                w_mask ^= 1 << j;
                for i in 0..rows {
                    let aij = a.get(i, j);
                    if aij == 0 {
                        continue;
                    }
                    let old = u[i];
                    let new = if flip_on { (old + aij) % m } else { (old + m - aij) % m };
                    u[i] = new;
                    if old == 0 && new != 0 {
                        nz += 1;
                    } else if old != 0 && new == 0 {
                        nz -= 1;
                    }
                }
                if nz <= threshold {
                    hits += 1;
                }
            }
            hits as f64 / (1u64 << k) as f64
        }
        TailMode::MonteCarlo { samples, seed } => {
            let mask = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0u64;
            for _ in 0..samples {
                if count_low(rng.gen::<u64>() & mask) {
                    hits += 1;
                }
            }
            hits as f64 / samples as f64
        }
    };

    let bound = ((t + binary_entropy(t) - 1.0) * r as f64).exp2();
    Ok(WeightTail {
        empirical,
        bound,
        threshold,
        rank: r,
    })
}

/// Number of `w` in `B^k` with `v + A·w` inside the column space of `h`
/// (`h` given by generating columns). Used by the hyperplane-counting check.
pub fn hyperplane_solution_count(a: &ZmMatrix, v: &[u64], h: &ZmMatrix) -> Result<u64> {
    if v.len() != a.rows() || h.rows() != a.rows() {
        return Err(Error::usage("hyperplane count: dimension mismatch"));
    }
    let k = a.cols();
    if k > 24 {
        return Err(Error::budget("hyperplane count requires k <= 24"));
    }
    let m = a.modulus().value();
    let ht = h.transpose();
    let mut count = 0u64;
    for w_mask in 0..1u64 << k {
        let mut u: Vec<u64> = v.to_vec();
        for j in 0..k {
            if w_mask >> j & 1 == 1 {
                for (i, slot) in u.iter_mut().enumerate() {
                    *slot = (*slot + a.get(i, j)) % m;
                }
            }
        }
        if row_space_contains(&ht, &u)? {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::Modulus;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mat(m: u64, rows: &[Vec<u64>]) -> ZmMatrix {
        ZmMatrix::from_rows(Modulus::new(m).unwrap(), rows).unwrap()
    }

    fn random_symmetric(rng: &mut StdRng, m: u64, n: usize) -> ZmMatrix {
        let mut a = ZmMatrix::zero(Modulus::new(m).unwrap(), n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(0..m);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        a
    }

    #[test]
    fn diagonal_matrix_has_min_rank_zero() {
        let a = ZmMatrix::diagonal(Modulus::new(9).unwrap(), &[3, 1, 7]);
        let rep = min_diag_rank(&a, &RigidityBudget::default()).unwrap();
        assert_eq!(rep.min_rank, 0);
        assert!(rep.exact);
        let perturbed = a.add_diagonal(&rep.witness_diagonal).unwrap();
        assert!(perturbed.is_zero());
        assert_eq!(rep.offdiag_rank, 0);
    }

    #[test]
    fn all_ones_over_z2() {
        let a = mat(2, &vec![vec![1; 4]; 4]);
        let rep = min_diag_rank(&a, &RigidityBudget::default()).unwrap();
        assert_eq!(rep.min_rank, 1);
        assert!(rep.exact);
        let (s, _, _) = max_offdiag_rank(&a, &RigidityBudget::default()).unwrap();
        assert_eq!(s, 1);
    }

    #[test]
    fn offdiag_rank_of_spec_example_over_z4() {
        let a = mat(4, &[vec![0, 1, 0], vec![1, 0, 2], vec![0, 2, 0]]);
        let (s, i1, i2) = max_offdiag_rank(&a, &RigidityBudget::default()).unwrap();
        assert_eq!(s, 1);
        let block = a.submatrix(&i1, &i2);
        assert_eq!(group_shape(&block, Side::Row).rank(), 1);
    }

    #[test]
    fn exhaustive_matches_budgeted_exact_3x3_z3() {
        let mut rng = StdRng::seed_from_u64(0x33);
        for _ in 0..25 {
            let a = random_symmetric(&mut rng, 3, 3);
            // Independent brute force over all 27 diagonals.
            let mut brute = usize::MAX;
            for code in 0..27u64 {
                let d: Vec<u64> = (0..3).map(|i| code / 3u64.pow(i) % 3).collect();
                brute = brute.min(rank(&a.add_diagonal(&d).unwrap()));
            }
            let rep = min_diag_rank(&a, &RigidityBudget::default()).unwrap();
            assert!(rep.exact);
            assert_eq!(rep.min_rank, brute);
            assert_eq!(
                rank(&a.add_diagonal(&rep.witness_diagonal).unwrap()),
                rep.min_rank
            );
        }
    }

    #[test]
    fn construction_contract_small_sweep() {
        let mut rng = StdRng::seed_from_u64(0x45);
        for &m in &[2u64, 3, 4, 5, 8, 9] {
            for _ in 0..20 {
                let n = rng.gen_range(2..=8);
                let a = random_symmetric(&mut rng, m, n);
                let (s, i1, i2) = max_offdiag_rank(&a, &RigidityBudget::default()).unwrap();
                if s == 0 {
                    continue;
                }
                let d = construct_low_rank_diagonal(&a, &i1, &i2, s).unwrap();
                let r = rank(&a.add_diagonal(&d).unwrap());
                assert!(r <= 4 * s, "rank {r} > 4s with s={s} for {a:?}");
            }
        }
    }

    #[test]
    fn min_diag_bounded_by_construction() {
        let mut rng = StdRng::seed_from_u64(0x46);
        for _ in 0..10 {
            let a = random_symmetric(&mut rng, 3, 5);
            let rep = min_diag_rank(&a, &RigidityBudget::default()).unwrap();
            let (s, i1, i2) = max_offdiag_rank(&a, &RigidityBudget::default()).unwrap();
            if s == 0 {
                continue;
            }
            let d = construct_low_rank_diagonal(&a, &i1, &i2, s).unwrap();
            assert!(rep.min_rank <= rank(&a.add_diagonal(&d).unwrap()));
        }
    }

    #[test]
    fn inexact_path_reports_upper_bound() {
        let mut rng = StdRng::seed_from_u64(0x47);
        let a = random_symmetric(&mut rng, 3, 6);
        let tiny = RigidityBudget {
            exact_diagonals: 10,
            ..RigidityBudget::default()
        };
        let rep = min_diag_rank(&a, &tiny).unwrap();
        assert!(!rep.exact);
        let exact = min_diag_rank(&a, &RigidityBudget::default()).unwrap();
        assert!(exact.exact);
        assert!(rep.min_rank >= exact.min_rank);
        assert_eq!(
            rank(&a.add_diagonal(&rep.witness_diagonal).unwrap()),
            rep.min_rank
        );
    }

    #[test]
    fn tail_identity_z2_exact_case() {
        for r in [4usize, 8] {
            let a = ZmMatrix::identity(Modulus::new(2).unwrap(), r);
            let tail =
                weight_tail_experiment(&a, &vec![0; r], 0.0, TailMode::Exhaustive).unwrap();
            let expect = 0.5f64.powi(r as i32);
            assert_eq!(tail.empirical, expect);
            assert!((tail.bound - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_t_one_everything_qualifies() {
        let a = ZmMatrix::identity(Modulus::new(3).unwrap(), 5);
        let tail = weight_tail_experiment(&a, &vec![0; 5], 1.0, TailMode::Exhaustive).unwrap();
        assert_eq!(tail.empirical, 1.0);
        assert!(tail.bound >= 1.0);
    }

    #[test]
    fn tail_monte_carlo_close_to_exhaustive() {
        let mut rng = StdRng::seed_from_u64(0x7a11);
        let a = random_symmetric(&mut rng, 3, 6);
        let v: Vec<u64> = (0..6).map(|_| rng.gen_range(0..3)).collect();
        let ex = weight_tail_experiment(&a, &v, 0.5, TailMode::Exhaustive).unwrap();
        let mc = weight_tail_experiment(
            &a,
            &v,
            0.5,
            TailMode::MonteCarlo {
                samples: 40_000,
                seed: 9,
            },
        )
        .unwrap();
        assert!((ex.empirical - mc.empirical).abs() < 0.02);
    }

    /// The hyperplane-counting step: for square full-rank A over a prime
    /// power, at most 2^d boolean w satisfy v + Aw ∈ H for a d-generated H.
    #[test]
    fn hyperplane_count_bound() {
        let mut rng = StdRng::seed_from_u64(0x4b);
        for &m in &[2u64, 3, 4, 8, 9] {
            let mut done = 0;
            while done < 12 {
                let r = rng.gen_range(1..=4usize);
                let a = {
                    let entries = (0..r * r).map(|_| rng.gen_range(0..m)).collect();
                    ZmMatrix::from_entries(Modulus::new(m).unwrap(), r, r, entries).unwrap()
                };
                if rank(&a) != r {
                    continue;
                }
                done += 1;
                let d = rng.gen_range(0..=3usize.min(r));
                let h = {
                    let entries = (0..r * d).map(|_| rng.gen_range(0..m)).collect();
                    ZmMatrix::from_entries(Modulus::new(m).unwrap(), r, d, entries).unwrap()
                };
                let v: Vec<u64> = (0..r).map(|_| rng.gen_range(0..m)).collect();
                let count = hyperplane_solution_count(&a, &v, &h).unwrap();
                assert!(
                    count <= 1 << d,
                    "count {count} > 2^{d} for m={m} A={a:?} H={h:?}"
                );
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = mat(3, &[vec![0, 1], vec![2, 0]]);
        assert!(min_diag_rank(&a, &RigidityBudget::default()).is_err());
    }
}
