//! Subalgebras and congruences of AG-groups.
//!
//! A subalgebra is a subset containing the left unit and closed under the
//! product and inversion; on the module side these are exactly the
//! phi-invariant subgroups, and the unit tests check both computations
//! against each other. Congruences are tied to subalgebras one-to-one by
//! `a ~ b  iff  b^-1 * a in H`: the block of the left unit determines the
//! whole partition. [`congruences`] therefore double-checks the structure
//! theory by enumerating ALL congruences independently — closing principal
//! congruences under joins — without assuming that correspondence.

use std::collections::BTreeSet;

use crate::error::TableError;
use crate::laws;
use crate::table::CayleyTable;
#[cfg(test)]
use crate::table::to_module;

/// Maximum order accepted by [`congruences`]; the join closure touches
/// every element pair and is meant for desk-scale cross-checks.
pub const CONGRUENCE_ORDER_CAP: usize = 16;

/// A partition of the element indices into blocks; each block is sorted,
/// and blocks are ordered by their least element.
pub type Partition = Vec<Vec<usize>>;

/// Every subalgebra of an AG-group table, each as a sorted index set,
/// listed smallest-first (ties broken lexicographically). The trivial
/// subalgebra and the whole table are always present.
pub fn subalgebras(t: &CayleyTable) -> Result<Vec<Vec<usize>>, TableError> {
    let e = ag_unit(t)?;
    let inv = t.inverses(e).expect("unique inverses verified");
    let n = t.order();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = vec![close(t, &inv, e, &[e])];
    found.insert(queue[0].clone());
    while let Some(h) = queue.pop() {
        for x in 0..n {
            if h.binary_search(&x).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(x);
            let grown = close(t, &inv, e, &gens);
            if found.insert(grown.clone()) {
                queue.push(grown);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// The congruence determined by a subalgebra: `a ~ b iff b^-1 * a in H`.
pub fn congruence_from_subalgebra(
    t: &CayleyTable,
    h: &[usize],
) -> Result<Partition, TableError> {
    let e = ag_unit(t)?;
    let inv = t.inverses(e).expect("unique inverses verified");
    require_subalgebra(t, &inv, e, h)?;
    let n = t.order();
    let in_h = member_mask(n, h);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut placed = vec![false; n];
    for a in 0..n {
        if placed[a] {
            continue;
        }
        let block: Vec<usize> = (a..n)
            .filter(|&b| in_h[t.get(inv[b], a)])
            .collect();
        for &b in &block {
            placed[b] = true;
        }
        blocks.push(block);
    }
    Ok(blocks)
}

/// All congruences of the table, found with no help from the subalgebra
/// correspondence: every principal congruence (the least one merging a
/// fixed pair) is computed by compatibility closure, and the set is closed
/// under joins. Limited to order [`CONGRUENCE_ORDER_CAP`].
pub fn congruences(t: &CayleyTable) -> Result<Vec<Partition>, TableError> {
    let n = t.order();
    if n > CONGRUENCE_ORDER_CAP {
        return Err(TableError::CongruenceLimit { order: n, cap: CONGRUENCE_ORDER_CAP });
    }
    // congruences make sense on any groupoid, but this entry point promises
    // the subalgebra bijection, so it keeps the same precondition
    ag_unit(t)?;
    let mut principals = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut uf = UnionFind::new(n);
            uf.union(a, b);
            compatibility_closure(t, &mut uf);
            principals.push(uf.canonical());
        }
    }
    let discrete: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(discrete.clone());
    let mut queue = vec![discrete];
    while let Some(current) = queue.pop() {
        for p in &principals {
            let mut uf = UnionFind::new(n);
            for x in 0..n {
                uf.union(x, current[x]);
                uf.union(x, p[x]);
            }
            // a join of congruences is transitive closure of the union, and
            // is automatically compatible; the closure below is a no-op
            // safeguard
            compatibility_closure(t, &mut uf);
            let joined = uf.canonical();
            if seen.insert(joined.clone()) {
                queue.push(joined);
            }
        }
    }
    let mut out: Vec<Partition> = seen.into_iter().map(|ids| blocks_of(&ids)).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)).reverse());
    Ok(out)
}

/// Protić's normality condition: `u * (a * u^-1)` stays in `H` for every
/// `a` in `H` and `u` in the table. For AG-groups this holds for every
/// subalgebra, and the suite checks exactly that.
pub fn is_protic_normal(t: &CayleyTable, h: &[usize]) -> Result<bool, TableError> {
    let e = ag_unit(t)?;
    let inv = t.inverses(e).expect("unique inverses verified");
    require_subalgebra(t, &inv, e, h)?;
    let in_h = member_mask(t.order(), h);
    Ok(h.iter().all(|&a| {
        (0..t.order()).all(|u| in_h[t.get(u, t.get(a, inv[u]))])
    }))
}

/// Verifies the AG-group axioms and returns the left unit.
fn ag_unit(t: &CayleyTable) -> Result<usize, TableError> {
    laws::ag_group_report(t).map_err(TableError::NotAgGroup)?;
    Ok(t.left_units()[0])
}

fn member_mask(n: usize, h: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &x in h {
        mask[x] = true;
    }
    mask
}

fn require_subalgebra(
    t: &CayleyTable,
    inv: &[usize],
    e: usize,
    h: &[usize],
) -> Result<(), TableError> {
    let in_h = member_mask(t.order(), h);
    if !in_h[e] {
        return Err(TableError::NotSubalgebra { witness: e });
    }
    for &a in h {
        if !in_h[inv[a]] {
            return Err(TableError::NotSubalgebra { witness: inv[a] });
        }
        for &b in h {
            let p = t.get(a, b);
            if !in_h[p] {
                return Err(TableError::NotSubalgebra { witness: p });
            }
        }
    }
    Ok(())
}

/// Closure of a generating set under product, inverse, and the unit.
fn close(t: &CayleyTable, inv: &[usize], e: usize, gens: &[usize]) -> Vec<usize> {
    let n = t.order();
    let mut in_set = vec![false; n];
    let mut members = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    let push = |x: usize, in_set: &mut Vec<bool>, queue: &mut Vec<usize>| {
        if !in_set[x] {
            in_set[x] = true;
            queue.push(x);
        }
    };
    push(e, &mut in_set, &mut queue);
    for &g in gens {
        push(g, &mut in_set, &mut queue);
    }
    while let Some(x) = queue.pop() {
        members.push(x);
        push(inv[x], &mut in_set, &mut queue);
        for i in 0..members.len() {
            let y = members[i];
            push(t.get(x, y), &mut in_set, &mut queue);
            push(t.get(y, x), &mut in_set, &mut queue);
        }
    }
    members.sort_unstable();
    members
}

/// Forces a partition to be compatible with the table operation: whenever
/// `x ~ y`, also `x*z ~ y*z` and `z*x ~ z*y`, to a fixpoint.
fn compatibility_closure(t: &CayleyTable, uf: &mut UnionFind) {
    let n = t.order();
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in x + 1..n {
                if uf.find(x) != uf.find(y) {
                    continue;
                }
                for z in 0..n {
                    changed |= uf.union(t.get(x, z), t.get(y, z));
                    changed |= uf.union(t.get(z, x), t.get(z, y));
                }
            }
        }
        if !changed {
            return;
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            false
        } else {
            // smaller index wins, keeping canonical forms stable
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent[hi] = lo;
            true
        }
    }

    /// Class-id vector: every element labeled by the least member of its
    /// class.
    fn canonical(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}

fn blocks_of(ids: &[usize]) -> Partition {
    let n = ids.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for x in 0..n {
        let root = ids[x];
        if block_of[root] == usize::MAX {
            block_of[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of[root]].push(x);
    }
    blocks
}

/// The module-side computation of subalgebras — phi-invariant subgroups of
/// the recovered addition — used to cross-check [`subalgebras`].
#[cfg(test)]
fn subalgebras_via_module(t: &CayleyTable) -> Result<Vec<Vec<usize>>, TableError> {
    let m = to_module(t)?;
    let add = &m.addition;
    let n = add.order();
    let neg: Vec<usize> = (0..n)
        .map(|a| (0..n).find(|&b| add.get(a, b) == m.zero).expect("group table"))
        .collect();
    let close_sub = |gens: &[usize]| -> Vec<usize> {
        let mut in_set = vec![false; n];
        let mut members = Vec::new();
        let mut queue = vec![m.zero];
        in_set[m.zero] = true;
        for &g in gens {
            if !in_set[g] {
                in_set[g] = true;
                queue.push(g);
            }
        }
        while let Some(x) = queue.pop() {
            members.push(x);
            for &y in [neg[x], m.phi[x]].iter() {
                if !in_set[y] {
                    in_set[y] = true;
                    queue.push(y);
                }
            }
            for i in 0..members.len() {
                let s = add.get(x, members[i]);
                if !in_set[s] {
                    in_set[s] = true;
                    queue.push(s);
                }
            }
        }
        members.sort_unstable();
        members
    };
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = vec![close_sub(&[])];
    found.insert(queue[0].clone());
    while let Some(h) = queue.pop() {
        for x in 0..n {
            if h.binary_search(&x).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(x);
            let grown = close_sub(&gens);
            if found.insert(grown.clone()) {
                queue.push(grown);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}
