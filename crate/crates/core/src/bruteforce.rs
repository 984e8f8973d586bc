//! Independent oracle: exhaustive Cayley-table search for AG-groups.
//!
//! Nothing here uses the linear representation. The search fills table
//! cells directly, fixing element 0 as the left unit (every AG-group has
//! one, and relabeling is absorbed by the isomorphism pass afterwards),
//! propagating the AG identity eagerly in both directions, and — by
//! default — pruning with latin-square masks and two-sided inverse
//! forcing. Those last two prunings are justified by theorems the crate
//! elsewhere *proves about* AG-groups (they are quasigroups with unique
//! two-sided inverses), so a `latin_pruning: false` mode exists to rerun
//! small orders with nothing assumed beyond the axioms and confirm no
//! model is lost. Complete tables are only accepted after the actual
//! axiom checkers pass, so soundness never depends on the propagation
//! logic — only completeness does.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SearchError;
use crate::involutions::Budget;
use crate::iso::isomorphic_generic;
use crate::laws::{check, Law};
use crate::table::{construct, CayleyTable};

/// Largest order searched without opting in.
pub const DEFAULT_CAP: usize = 6;
/// Largest order searched at all.
pub const EXTENDED_CAP: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Raise the order cap from 6 to 8. No runtime is promised there.
    pub extended: bool,
    /// Prune with latin-square masks and inverse forcing. Off, the search
    /// assumes nothing but the axioms; intended for orders at most 4.
    pub latin_pruning: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { extended: false, latin_pruning: true }
    }
}

impl SearchOptions {
    fn cap(&self) -> usize {
        if self.extended {
            EXTENDED_CAP
        } else {
            DEFAULT_CAP
        }
    }
}

/// What one search did. `wall` is measured but stays out of the
/// serialized form so emitted stats are identical across runs.
#[derive(Clone, Debug, Serialize)]
pub struct SearchStats {
    pub order: usize,
    pub nodes: u64,
    pub labeled_models: u64,
    pub classes: u64,
    #[serde(skip)]
    pub wall: Duration,
}

/// All AG-groups of order `n` up to isomorphism, one representative per
/// class, found by raw table search. Deterministic: identical tables and
/// stats at any rayon worker count.
pub fn find_all(
    n: usize,
    opts: &SearchOptions,
) -> Result<(Vec<CayleyTable>, SearchStats), SearchError> {
    assert!(n >= 1, "order must be positive");
    let cap = opts.cap();
    if n > cap {
        return Err(SearchError::OrderAboveCap { order: n, cap });
    }
    let start = Instant::now();

    let mut root = Search::new(n, opts.latin_pruning);
    for b in 0..n {
        let ok = root.assign(b, b); // row 0: the left unit
        debug_assert!(ok);
    }
    assert!(root.propagate(), "identity row is always consistent");

    // Branch to completion of row 1, then hand each prefix to a worker.
    let mut prefixes = Vec::new();
    let mut prefix_nodes = 0u64;
    collect_row1_prefixes(&mut root, &mut prefixes, &mut prefix_nodes);

    let run_prefix = |mut search: Search| {
        let mut models = Vec::new();
        let mut nodes = 0u64;
        search.run(&mut models, &mut nodes);
        (models, nodes)
    };
    // ordered collect either way, so worker count cannot reorder results
    #[cfg(feature = "parallel")]
    let per_prefix: Vec<(Vec<CayleyTable>, u64)> =
        prefixes.into_par_iter().map(run_prefix).collect();
    #[cfg(not(feature = "parallel"))]
    let per_prefix: Vec<(Vec<CayleyTable>, u64)> =
        prefixes.into_iter().map(run_prefix).collect();

    let mut nodes = prefix_nodes;
    let mut models = Vec::new();
    for (found, subtree_nodes) in per_prefix {
        nodes += subtree_nodes;
        models.extend(found);
    }

    let labeled_models = models.len() as u64;
    let mut representatives = dedup_by_isomorphism(models);
    representatives.sort_by(|a, b| a.rows().cmp(&b.rows()));
    let stats = SearchStats {
        order: n,
        nodes,
        labeled_models,
        classes: representatives.len() as u64,
        wall: start.elapsed(),
    };
    Ok((representatives, stats))
}

/// True iff the raw search and the representation-based enumeration agree
/// at order `n`: same class count, and the classes match one-to-one under
/// the generic isomorphism search.
pub fn verify_representation(n: usize, opts: &SearchOptions) -> Result<bool, SearchError> {
    let (found, _) = find_all(n, opts)?;
    let enumerated = crate::enumeration::count(n as u64, &Budget::default(), true)?;
    let reps = enumerated.representatives.expect("representatives were requested");
    if found.len() as u64 != enumerated.count {
        return Ok(false);
    }
    let constructed: Vec<CayleyTable> = reps
        .iter()
        .map(|r| construct(r).expect("representation orders fit in a table"))
        .collect();
    let mut matched = vec![false; constructed.len()];
    for t in &found {
        let hit = constructed
            .iter()
            .enumerate()
            .find(|(i, c)| !matched[*i] && isomorphic_generic(t, c).is_some());
        match hit {
            Some((i, _)) => matched[i] = true,
            None => return Ok(false),
        }
    }
    Ok(matched.iter().all(|&m| m))
}

const EMPTY: u8 = u8::MAX;

#[derive(Clone)]
struct Search {
    n: usize,
    latin: bool,
    cells: Vec<u8>,
    row_mask: Vec<u16>,
    col_mask: Vec<u16>,
    trail: Vec<usize>,
}

impl Search {
    fn new(n: usize, latin: bool) -> Self {
        Search {
            n,
            latin,
            cells: vec![EMPTY; n * n],
            row_mask: vec![0; n],
            col_mask: vec![0; n],
            trail: Vec::new(),
        }
    }

    /// Sets one cell, applying latin masks and — when a product hits the
    /// unit — the two-sided inverse constraint. False means conflict.
    fn assign(&mut self, cell: usize, v: usize) -> bool {
        let old = self.cells[cell];
        if old != EMPTY {
            return old as usize == v;
        }
        let (r, c) = (cell / self.n, cell % self.n);
        if self.latin {
            let bit = 1u16 << v;
            if self.row_mask[r] & bit != 0 || self.col_mask[c] & bit != 0 {
                return false;
            }
            self.row_mask[r] |= bit;
            self.col_mask[c] |= bit;
        }
        self.cells[cell] = v as u8;
        self.trail.push(cell);
        // In a quasigroup with unique inverses, a*b = e forces b*a = e.
        if self.latin && v == 0 && !self.assign(c * self.n + r, 0) {
            return false;
        }
        true
    }

    /// Enforces (a*b)*c = (c*b)*a on every triple whose two inner products
    /// are known: check when both outer cells are set, force the missing
    /// one otherwise. Runs to fixpoint. False means conflict.
    fn propagate(&mut self) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    let x = self.cells[a * n + b];
                    if x == EMPTY {
                        continue;
                    }
                    for c in 0..n {
                        let u = self.cells[c * n + b];
                        if u == EMPTY {
                            continue;
                        }
                        let lhs_cell = x as usize * n + c;
                        let rhs_cell = u as usize * n + a;
                        match (self.cells[lhs_cell], self.cells[rhs_cell]) {
                            (EMPTY, EMPTY) => {}
                            (y, EMPTY) => {
                                if !self.assign(rhs_cell, y as usize) {
                                    return false;
                                }
                                changed = true;
                            }
                            (EMPTY, v) => {
                                if !self.assign(lhs_cell, v as usize) {
                                    return false;
                                }
                                changed = true;
                            }
                            (y, v) => {
                                if y != v {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let cell = self.trail.pop().unwrap();
            let v = self.cells[cell];
            self.cells[cell] = EMPTY;
            if self.latin {
                let bit = !(1u16 << v);
                self.row_mask[cell / self.n] &= bit;
                self.col_mask[cell % self.n] &= bit;
            }
        }
    }

    fn first_empty(&self) -> Option<usize> {
        self.cells.iter().position(|&v| v == EMPTY)
    }

    /// Exhausts the subtree below the current state, collecting every
    /// complete table that passes the axiom checkers.
    fn run(&mut self, models: &mut Vec<CayleyTable>, nodes: &mut u64) {
        let cell = match self.first_empty() {
            Some(cell) => cell,
            None => {
                if let Some(t) = self.accept() {
                    models.push(t);
                }
                return;
            }
        };
        for v in 0..self.n {
            *nodes += 1;
            let mark = self.trail.len();
            if self.assign(cell, v) && self.propagate() {
                self.run(models, nodes);
            }
            self.undo_to(mark);
        }
    }

    /// The soundness gate: a complete assignment only counts as a model if
    /// the real checkers say so. With latin pruning this always passes;
    /// without it, this is what filters the leaves.
    fn accept(&self) -> Option<CayleyTable> {
        let n = self.n;
        let t = CayleyTable::from_fn(n, |a, b| self.cells[a * n + b] as usize);
        let is_model = [Law::Ag, Law::LeftUnit, Law::UniqueInverses]
            .iter()
            .all(|&law| check(&t, law).expect("small order").holds);
        is_model.then_some(t)
    }
}

/// Depth-first over the cells of row 1 only; every state in which row 1
/// is complete becomes one independent work unit.
fn collect_row1_prefixes(search: &mut Search, out: &mut Vec<Search>, nodes: &mut u64) {
    let n = search.n;
    if n == 1 {
        out.push(search.clone());
        return;
    }
    let cell = match (n..2 * n).find(|&cell| search.cells[cell] == EMPTY) {
        Some(cell) => cell,
        None => {
            out.push(search.clone());
            return;
        }
    };
    for v in 0..n {
        *nodes += 1;
        let mark = search.trail.len();
        if search.assign(cell, v) && search.propagate() {
            collect_row1_prefixes(search, out, nodes);
        }
        search.undo_to(mark);
    }
}

/// Isomorphism reduction, independent of everything representation-based:
/// bucket by cheap invariants, then settle ties with the exhaustive
/// bijection search. First-found representative wins, so the outcome is
/// deterministic.
fn dedup_by_isomorphism(models: Vec<CayleyTable>) -> Vec<CayleyTable> {
    let mut buckets: BTreeMap<Vec<(u64, u32, bool)>, Vec<usize>> = BTreeMap::new();
    let mut reps: Vec<CayleyTable> = Vec::new();
    for model in models {
        let bucket = buckets.entry(model_fingerprint(&model)).or_default();
        let known = bucket
            .iter()
            .any(|&i| isomorphic_generic(&reps[i], &model).is_some());
        if !known {
            bucket.push(reps.len());
            reps.push(model);
        }
    }
    reps
}

/// Per-element invariants of left multiplication, sorted into a multiset:
/// the permutation order of x -> a*x (0 when it is not a permutation),
/// its fixed-point count, and whether a is idempotent.
fn model_fingerprint(t: &CayleyTable) -> Vec<(u64, u32, bool)> {
    let n = t.order();
    let mut fp: Vec<(u64, u32, bool)> = (0..n)
        .map(|a| {
            let mut seen = vec![false; n];
            let mut fixed = 0u32;
            for x in 0..n {
                seen[t.get(a, x)] = true;
                if t.get(a, x) == x {
                    fixed += 1;
                }
            }
            let order = if seen.iter().all(|&s| s) {
                permutation_order(|x| t.get(a, x), n)
            } else {
                0
            };
            (order, fixed, t.get(a, a) == a)
        })
        .collect();
    fp.sort_unstable();
    fp
}

fn permutation_order(f: impl Fn(usize) -> usize, n: usize) -> u64 {
    let mut visited = vec![false; n];
    let mut order = 1u64;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !visited[x] {
            visited[x] = true;
            x = f(x);
            len += 1;
        }
        order = order / gcd_u64(order, len) * len;
    }
    order
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}
