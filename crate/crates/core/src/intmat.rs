//! Exact integer matrix routines: Hermite and Smith normal forms, and the
//! isomorphism types of kernels and images of maps between finite abelian
//! groups, computed through integer lattices.
//!
//! A group with cyclic factors `q_1, ..., q_k` is `Z^k / L0` where
//! `L0 = diag(q) Z^k`. A subgroup generated by coordinate vectors `g_1, ...`
//! is `L / L0` with `L = span(g_i) + L0`, and its invariant factors fall out
//! of a Smith normal form: writing `diag(q) = C * B` for a basis `B` of `L`,
//! the quotient is `Z^k / rowspan(C)`.
//!
//! Entries are `i128`. The lattices here come from groups of modest order
//! (factors are small prime powers), so intermediate growth during the
//! Euclidean reductions stays far below the overflow line.

use crate::abelian::{factorize, AbelianGroupType};

pub type Mat = Vec<Vec<i128>>;

/// Row-style Hermite normal form. Returns `(h, u)` with `u * a = h`, `u`
/// unimodular, `h` in row echelon form with positive pivots and entries
/// above each pivot reduced to `[0, pivot)`. Zero rows sink to the bottom.
pub fn hnf_with_transform(a: &Mat) -> (Mat, Mat) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h = a.clone();
    let mut u: Mat = (0..m)
        .map(|i| (0..m).map(|j| i128::from(i == j)).collect())
        .collect();

    let mut r = 0; // next pivot row
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclidean elimination below row r in column c.
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[i][c] != 0 && best.is_none_or(|b| h[i][c].abs() < h[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap(r, b);
            u.swap(r, b);
            let mut dirty = false;
            for i in r + 1..m {
                if h[i][c] != 0 {
                    let q = h[i][c].div_euclid(h[r][c]);
                    row_sub(&mut h, i, r, q);
                    row_sub(&mut u, i, r, q);
                    dirty |= h[i][c] != 0;
                }
            }
            if !dirty {
                break;
            }
        }
        if h[r][c] == 0 {
            continue; // no pivot in this column
        }
        if h[r][c] < 0 {
            row_neg(&mut h, r);
            row_neg(&mut u, r);
        }
        for i in 0..r {
            let q = h[i][c].div_euclid(h[r][c]);
            if q != 0 {
                row_sub(&mut h, i, r, q);
                row_sub(&mut u, i, r, q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Basis of the left kernel `{ v : v * a = 0 }`, one generator per row.
pub fn left_kernel(a: &Mat) -> Mat {
    let (h, u) = hnf_with_transform(a);
    h.iter()
        .zip(u)
        .filter(|(hr, _)| hr.iter().all(|&x| x == 0))
        .map(|(_, ur)| ur)
        .collect()
}

fn row_sub(m: &mut Mat, i: usize, j: usize, q: i128) {
    if q == 0 {
        return;
    }
    for c in 0..m[i].len() {
        m[i][c] -= q * m[j][c];
    }
}

fn row_neg(m: &mut Mat, i: usize) {
    for x in &mut m[i] {
        *x = -*x;
    }
}

/// Diagonal of the Smith normal form of `a`, padded with the zero entries
/// implied by rank deficiency, each `d_i` dividing `d_{i+1}`.
pub fn snf_diagonal(a: &Mat) -> Vec<i128> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut w = a.clone();
    let dim = m.min(n);
    let mut diag = vec![0i128; dim];

    for t in 0..dim {
        'restart: loop {
            // Move a pivot of minimal absolute value to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if w[i][j] != 0
                        && best.is_none_or(|(bi, bj)| w[i][j].abs() < w[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_diag(diag, t);
            };
            w.swap(t, bi);
            col_swap(&mut w, t, bj);

            // Clear column t then row t; a nonzero remainder restarts.
            for i in t + 1..m {
                if w[i][t] != 0 {
                    let q = w[i][t].div_euclid(w[t][t]);
                    row_sub(&mut w, i, t, q);
                    if w[i][t] != 0 {
                        continue 'restart;
                    }
                }
            }
            for j in t + 1..n {
                if w[t][j] != 0 {
                    let q = w[t][j].div_euclid(w[t][t]);
                    col_sub(&mut w, j, t, q);
                    if w[t][j] != 0 {
                        continue 'restart;
                    }
                }
            }
            // Divisibility sweep: d_t must divide everything below-right.
            for i in t + 1..m {
                for j in t + 1..n {
                    if w[i][j] % w[t][t] != 0 {
                        let row = w[i].clone();
                        for (c, v) in row.into_iter().enumerate() {
                            w[t][c] += v;
                        }
                        continue 'restart;
                    }
                }
            }
            diag[t] = w[t][t].abs();
            break;
        }
    }
    diag
}

fn finish_diag(mut diag: Vec<i128>, from: usize) -> Vec<i128> {
    for d in diag.iter_mut().skip(from) {
        *d = 0;
    }
    diag
}

fn col_swap(m: &mut Mat, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn col_sub(m: &mut Mat, j: usize, c: usize, q: i128) {
    if q == 0 {
        return;
    }
    for row in m.iter_mut() {
        let v = row[c];
        row[j] -= q * v;
    }
}

/// Isomorphism type of the subgroup of `group` generated by the given
/// coordinate vectors.
pub fn subgroup_type(group: &AbelianGroupType, generators: &[Vec<u64>]) -> AbelianGroupType {
    let k = group.rank();
    if k == 0 {
        return AbelianGroupType::trivial();
    }
    // L = span(generators) + diag(q) Z^k, as rows.
    let mut stacked: Mat = generators
        .iter()
        .map(|g| g.iter().map(|&x| x as i128).collect())
        .collect();
    for (i, &q) in group.factors().iter().enumerate() {
        let mut row = vec![0i128; k];
        row[i] = q as i128;
        stacked.push(row);
    }
    let (h, _) = hnf_with_transform(&stacked);
    let basis: Mat = h.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    debug_assert_eq!(basis.len(), k, "lattice contains diag(q), so it has full rank");

    // Solve diag(q) = C * basis; `basis` is upper triangular from the HNF.
    let mut c_mat: Mat = Vec::with_capacity(k);
    for (i, &q) in group.factors().iter().enumerate() {
        let mut target = vec![0i128; k];
        target[i] = q as i128;
        c_mat.push(solve_upper_triangular(&basis, &target));
    }
    let diag = snf_diagonal(&c_mat);
    type_from_invariant_factors(&diag)
}

/// Isomorphism type of `{ x in group : x * m = 0 }` for a homomorphism
/// matrix `m` (row `i` holds the images of the `i`-th generator; the map is
/// `x -> x * m` on coordinate rows).
pub fn kernel_type(group: &AbelianGroupType, m: &[Vec<u64>]) -> AbelianGroupType {
    let k = group.rank();
    if k == 0 {
        return AbelianGroupType::trivial();
    }
    // x * m = 0 in the group  <=>  [x | y] * [m ; diag(q)] = 0 over Z.
    let mut stacked: Mat = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    for (i, &q) in group.factors().iter().enumerate() {
        let mut row = vec![0i128; k];
        row[i] = q as i128;
        stacked.push(row);
    }
    let kernel = left_kernel(&stacked);
    let gens: Vec<Vec<u64>> = kernel
        .iter()
        .map(|v| {
            v[..k]
                .iter()
                .zip(group.factors())
                .map(|(&x, &q)| x.rem_euclid(q as i128) as u64)
                .collect()
        })
        .collect();
    subgroup_type(group, &gens)
}

/// Isomorphism type of the image of `x -> x * m`.
pub fn image_type(group: &AbelianGroupType, m: &[Vec<u64>]) -> AbelianGroupType {
    let gens: Vec<Vec<u64>> = m.to_vec();
    subgroup_type(group, &gens)
}

/// Solves `x * b = target` for upper triangular `b` with nonzero diagonal,
/// by forward substitution. Panics if the division is inexact — callers
/// only pass targets known to lie in the row span.
fn solve_upper_triangular(b: &Mat, target: &[i128]) -> Vec<i128> {
    let k = b.len();
    let mut x = vec![0i128; k];
    for j in 0..k {
        let mut acc = target[j];
        for i in 0..j {
            acc -= x[i] * b[i][j];
        }
        assert_eq!(acc % b[j][j], 0, "target not in the lattice");
        x[j] = acc / b[j][j];
    }
    x
}

fn type_from_invariant_factors(diag: &[i128]) -> AbelianGroupType {
    let mut factors = Vec::new();
    for &d in diag {
        debug_assert!(d > 0, "quotient of full-rank lattices is finite");
        for (p, a) in factorize(d as u64) {
            factors.push(p.pow(a));
        }
    }
    AbelianGroupType::new(&factors).expect("invariant factors are valid cyclic orders")
}
