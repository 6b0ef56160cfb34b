//! Left nullspaces, linear solving, and full-rank submatrix extraction over
//! `Z_m`, all built on the Smith decomposition.

use super::smith::{group_shape, smith_normal_form, Side, SmithDecomposition};
use super::{gcd, mod_inv, ZmMatrix};
use crate::error::{Error, Result};

/// Generators of `{v : v^T A = 0}` as the rows of a matrix with `A.rows()`
/// columns. The zero group comes back as a matrix with no rows.
pub fn left_nullspace(a: &ZmMatrix) -> ZmMatrix {
    let snf = smith_normal_form(a);
    let m = a.modulus().value();
    let k = a.rows().min(a.cols());
    let mut gens: Vec<Vec<u64>> = Vec::new();
    for i in 0..a.rows() {
        let g = if i < k {
            let e = snf.d.get(i, i);
            if e == 0 {
                m
            } else {
                gcd(e, m)
            }
        } else {
            // Rows beyond the diagonal are unconstrained.
            m
        };
        let coef = m / g;
        if coef % m == 0 {
            continue;
        }
        let row: Vec<u64> = snf
            .p
            .row(i)
            .iter()
            .map(|&x| (x as u128 * coef as u128 % m as u128) as u64)
            .collect();
        gens.push(row);
    }
    let rows = gens.len();
    ZmMatrix::from_entries(a.modulus().clone(), rows, a.rows(), gens.concat())
        .expect("nullspace shape")
}

/// Conditions for `b·D = c` with `D` the Smith diagonal: per coordinate the
/// gcd of the diagonal entry with `m` must divide the target.
fn diagonal_solve(snf: &SmithDecomposition, c: &[u64]) -> Option<Vec<u64>> {
    let m = snf.d.modulus().value();
    let rows = snf.d.rows();
    let k = rows.min(snf.d.cols());
    let mut b = vec![0u64; rows];
    for (j, &cj) in c.iter().enumerate() {
        if j >= k {
            if cj != 0 {
                return None;
            }
            continue;
        }
        let d = snf.d.get(j, j);
        let g = if d == 0 { m } else { gcd(d, m) };
        if cj % g != 0 {
            return None;
        }
        if d == 0 {
            continue;
        }
        let m1 = m / g;
        if m1 == 1 {
            continue;
        }
        let inv = mod_inv((d / g) % m1, m1).expect("d/g unit mod m/g");
        b[j] = (cj / g) % m1 * inv % m1;
    }
    Some(b)
}

/// Some `a` with `a·M = target` over `Z_m`, if one exists.
pub fn solve_left(mat: &ZmMatrix, target: &[u64]) -> Result<Option<Vec<u64>>> {
    if target.len() != mat.cols() {
        return Err(Error::usage("solve_left target length mismatch"));
    }
    let snf = smith_normal_form(mat);
    let c = snf.q.left_apply(target)?;
    Ok(diagonal_solve(&snf, &c).map(|b| {
        snf.p
            .transpose()
            .right_apply(&b)
            .expect("b·P shape")
    }))
}

/// Whether `target` lies in the subgroup generated by the rows of `mat`.
pub fn row_space_contains(mat: &ZmMatrix, target: &[u64]) -> Result<bool> {
    Ok(solve_left(mat, target)?.is_some())
}

/// The lexicographically least `a` (coordinates compared as residues in
/// `[0, m)`, leftmost first) with `a·M = target`. Fixes coordinates one at a
/// time, keeping the smallest value for which the remaining suffix system
/// stays solvable.
pub fn lex_least_left_solution(mat: &ZmMatrix, target: &[u64]) -> Result<Option<Vec<u64>>> {
    if target.len() != mat.cols() {
        return Err(Error::usage("lex_least_left_solution target length mismatch"));
    }
    if !row_space_contains(mat, target)? {
        return Ok(None);
    }
    let m = mat.modulus().value();
    let rows = mat.rows();
    // Smith forms of the row-suffix matrices, reused across candidate values.
    let suffixes: Vec<ZmMatrix> = (1..=rows)
        .map(|i| {
            let idx: Vec<usize> = (i..rows).collect();
            let all: Vec<usize> = (0..mat.cols()).collect();
            mat.submatrix(&idx, &all)
        })
        .collect();
    let suffix_snf: Vec<SmithDecomposition> = suffixes.iter().map(smith_normal_form).collect();

    let mut residual: Vec<u64> = target.to_vec();
    let mut out = vec![0u64; rows];
    for i in 0..rows {
        let row = mat.row(i);
        let mut found = false;
        for v in 0..m {
            let rem: Vec<u64> = residual
                .iter()
                .zip(row)
                .map(|(&t, &r)| (t + (m - v * r % m)) % m)
                .collect();
            let solvable = if i + 1 == rows {
                rem.iter().all(|&x| x == 0)
            } else {
                let c = suffix_snf[i].q.left_apply(&rem)?;
                diagonal_solve(&suffix_snf[i], &c).is_some()
            };
            if solvable {
                out[i] = v;
                residual = rem;
                found = true;
                break;
            }
        }
        debug_assert!(found, "prefix solvability lost");
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rows of `mat` restricted to `idx`, against all columns.
fn row_block(mat: &ZmMatrix, idx: &[usize]) -> ZmMatrix {
    let all: Vec<usize> = (0..mat.cols()).collect();
    mat.submatrix(idx, &all)
}

/// Indices of `r = rank(mat)` rows whose rows generate the full row space
/// (prime-power moduli only), chosen as the lexicographically first subset
/// among those maximizing (rank, generated-subgroup order).
pub fn spanning_rows(mat: &ZmMatrix) -> Result<Vec<usize>> {
    if !mat.modulus().is_prime_power() {
        return Err(Error::precondition(
            "prime-power required: spanning row extraction needs a prime-power modulus",
        ));
    }
    let full = group_shape(mat, Side::Row);
    let r = full.rank();
    let target = full.order();
    for subset in subsets_of_size(mat.rows(), r) {
        let shape = group_shape(&row_block(mat, &subset), Side::Row);
        if shape.rank() == r && shape.order() == target {
            return Ok(subset);
        }
    }
    // Unreachable for prime powers: a spanning subset of size rank exists.
    Err(Error::precondition(
        "no spanning row subset found; is the modulus a prime power?",
    ))
}

/// Row and column index sets of size `rank(A)` such that the corresponding
/// square submatrix has the same group shape as `A`. Errors on composite
/// non-prime-power moduli, where the underlying fact can fail.
pub fn full_rank_submatrix(a: &ZmMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    if !a.modulus().is_prime_power() {
        return Err(Error::precondition(
            "prime-power required: full_rank_submatrix is only valid over prime-power moduli",
        ));
    }
    let rows = spanning_rows(a)?;
    let block = row_block(a, &rows);
    let cols = spanning_rows(&block.transpose())?;
    Ok((rows, cols))
}

/// Determinant of a square matrix over `Z_m`, by fraction-free (Bareiss)
/// elimination on the lifted integer entries. Intermediate values are minors
/// of the lifted matrix, so i128 is ample for desk-scale sizes.
pub fn det_mod(a: &ZmMatrix) -> Result<u64> {
    if a.rows() != a.cols() {
        return Err(Error::usage("determinant needs a square matrix"));
    }
    let n = a.rows();
    let m = a.modulus().value() as i128;
    if n == 0 {
        return Ok(1 % m as u64);
    }
    let mut w: Vec<i128> = a.entries().iter().map(|&e| e as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for t in 0..n - 1 {
        if w[t * n + t] == 0 {
            match (t + 1..n).find(|&i| w[i * n + t] != 0) {
                Some(i) => {
                    for j in 0..n {
                        w.swap(t * n + j, i * n + j);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in t + 1..n {
            for j in t + 1..n {
                w[i * n + j] = (w[t * n + t] * w[i * n + j] - w[i * n + t] * w[t * n + j]) / prev;
            }
            w[i * n + t] = 0;
        }
        prev = w[t * n + t];
    }
    let det = sign * w[(n - 1) * n + (n - 1)];
    Ok(det.rem_euclid(m) as u64)
}
