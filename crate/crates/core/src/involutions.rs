//! Involutory automorphisms: enumeration, conjugacy classification, and
//! conjugator search.
//!
//! Everything here works prime by prime: an endomorphism of a finite abelian
//! group is block-diagonal across the primary components, so involutions and
//! their conjugacy classes on a mixed-order group are exactly the products of
//! those on its primary parts.
//!
//! On a primary group, involutions are found by DFS over generator images.
//! A matrix with `M * M = I` is automatically invertible, so the constraints
//! are just the Hom divisibility conditions plus `M * M = I` itself; the
//! search propagates that identity eagerly (rows with a single unknown term
//! whose coefficient is a unit are forced outright) and prunes any partial
//! assignment whose rows are linearly dependent mod p (an endomorphism of a
//! p-group is invertible iff its reduction mod p is).
//!
//! Conjugacy classes are built by bucketing on a cheap invariant — the
//! isomorphism types of `Ker(f - id)`, `Ker(f + id)`, `Im(f - id)`,
//! `Im(f + id)`, all preserved by conjugation — and the buckets are trusted
//! as classes only where the test suite has validated that against explicit
//! conjugator search (odd primes; elementary abelian 2-groups). For every
//! other 2-group each bucket member is checked against the bucket's class
//! representatives by a conjugator DFS solving `P*F = F*S`, so completeness
//! of the invariant is never assumed.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::abelian::{factorize, gcd, mod_inv, AbelianGroupType};
use crate::endo::{rank_mod_p, Endomorphism};
use crate::error::SearchError;
use crate::intmat::{image_type, kernel_type};

/// What the enumeration and classification entry points are willing to
/// attempt. Orders above `max_order` are refused, and a few orders whose
/// involution searches are known to be expensive (128, 243, 256) are gated
/// behind `stretch` regardless of `max_order`. `max_nodes` bounds the DFS
/// node count; `None` means unbounded.
///
/// The gate applies per primary component: a group of order 384 with a
/// 2-part of order 128 needs `stretch` even if `max_order` allows 384.
#[derive(Clone, Debug, Serialize)]
pub struct Budget {
    pub max_order: u64,
    pub stretch: bool,
    pub max_nodes: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_order: 128, stretch: false, max_nodes: None }
    }
}

impl Budget {
    /// Orders attempted only in stretch mode.
    pub const STRETCH_ORDERS: [u64; 3] = [128, 243, 256];

    pub fn allows(&self, order: u64) -> bool {
        if Self::STRETCH_ORDERS.contains(&order) {
            self.stretch
        } else {
            order <= self.max_order
        }
    }

    pub fn check(&self, order: u64) -> Result<(), SearchError> {
        if self.allows(order) {
            Ok(())
        } else if Self::STRETCH_ORDERS.contains(&order) {
            Err(SearchError::OrderNeedsStretch { order })
        } else {
            Err(SearchError::OrderOutsideBudget { order, max_order: self.max_order })
        }
    }

    fn check_group(&self, t: &AbelianGroupType) -> Result<(), SearchError> {
        for comp in t.primary_components() {
            self.check(comp.order())?;
        }
        Ok(())
    }
}

/// Conjugacy invariant of an involutory automorphism `f`: the isomorphism
/// types of the fixed subgroup `Ker(f - id)`, the negated subgroup
/// `Ker(f + id)`, and the two images `Im(f - id)`, `Im(f + id)`. A
/// conjugating automorphism maps each of these subgroups for `f` onto the
/// corresponding subgroup for the conjugate, so conjugate involutions always
/// share a fingerprint; the converse is established case by case.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConjugacyFingerprint {
    pub fixed_kernel: AbelianGroupType,
    pub negated_kernel: AbelianGroupType,
    pub minus_image: AbelianGroupType,
    pub plus_image: AbelianGroupType,
}

/// Computes the conjugacy fingerprint of an involutory automorphism.
///
/// On an elementary abelian 2-group all four components are determined by
/// the single number rank(f + id) over F_2, which is much cheaper than the
/// lattice computations of the general case.
pub fn fingerprint(f: &Endomorphism) -> ConjugacyFingerprint {
    let g = f.group();
    let q = g.factors();
    let k = q.len();
    if !q.is_empty() && q.iter().all(|&x| x == 2) {
        let mut m: Vec<Vec<u64>> = (0..k)
            .map(|i| (0..k).map(|j| (f.matrix()[i][j] + u64::from(i == j)) % 2).collect())
            .collect();
        let r = rank_mod_p(&mut m, 2);
        return elementary_fingerprint(k, r);
    }
    let minus: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (f.matrix()[i][j] + q[j] - u64::from(i == j)) % q[j])
                .collect()
        })
        .collect();
    let plus: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..k).map(|j| (f.matrix()[i][j] + u64::from(i == j)) % q[j]).collect())
        .collect();
    ConjugacyFingerprint {
        fixed_kernel: kernel_type(g, &minus),
        negated_kernel: kernel_type(g, &plus),
        minus_image: image_type(g, &minus),
        plus_image: image_type(g, &plus),
    }
}

fn elementary_fingerprint(k: usize, r: usize) -> ConjugacyFingerprint {
    let ker = AbelianGroupType::new(&vec![2; k - r]).expect("valid elementary type");
    let im = AbelianGroupType::new(&vec![2; r]).expect("valid elementary type");
    ConjugacyFingerprint {
        fixed_kernel: ker.clone(),
        negated_kernel: ker,
        minus_image: im.clone(),
        plus_image: im,
    }
}

// ---------------------------------------------------------------------------
// DFS machinery shared by involution enumeration and conjugator search.
// ---------------------------------------------------------------------------

/// Precomputed per-primary-group search data: candidate generator images for
/// each row (elements of the exact right order satisfying the divisibility
/// constraints), reusable across many searches on the same group.
struct SearchContext {
    group: AbelianGroupType,
    p: u64,
    q: Vec<u64>,
    exps: Vec<u32>,
    cands: Vec<Vec<Vec<u64>>>,
}

impl SearchContext {
    fn new(group: &AbelianGroupType) -> Self {
        let q = group.factors().to_vec();
        let p = if q.is_empty() { 2 } else { factorize(q[0])[0].0 };
        let exps: Vec<u32> = q.iter().map(|&f| factorize(f)[0].1).collect();
        let k = q.len();
        let cands = (0..k)
            .map(|r| {
                group
                    .elements()
                    .map(|e| e.coords().to_vec())
                    .filter(|v| row_is_admissible(&q, &exps, p, r, v))
                    .collect()
            })
            .collect();
        SearchContext { group: group.clone(), p, q, exps, cands }
    }
}

/// Row `r` of an automorphism matrix must have coordinate `j` divisible by
/// `p^(exps[j] - exps[r])` (Hom constraint) and order exactly `q[r]` (an
/// automorphism preserves element orders).
fn row_is_admissible(q: &[u64], exps: &[u32], p: u64, r: usize, v: &[u64]) -> bool {
    let mut order = 1u64;
    for j in 0..q.len() {
        let step = p.pow(exps[j].saturating_sub(exps[r]));
        if v[j] % step != 0 {
            return false;
        }
        order = order.max(q[j] / gcd(q[j], v[j]));
    }
    order == q[r]
}

/// Mutable DFS state: assigned rows, an undo trail, and an incremental
/// row-echelon basis of the assignment mod p for the invertibility prune.
struct Core<'a> {
    ctx: &'a SearchContext,
    k: usize,
    rows: Vec<Option<Vec<u64>>>,
    trail: Vec<usize>,
    basis: Vec<(Vec<u64>, usize)>,
    nodes: u64,
    max_nodes: u64,
}

impl<'a> Core<'a> {
    fn new(ctx: &'a SearchContext, max_nodes: Option<u64>) -> Self {
        let k = ctx.q.len();
        Core {
            ctx,
            k,
            rows: vec![None; k],
            trail: Vec::with_capacity(k),
            basis: Vec::with_capacity(k),
            nodes: 0,
            max_nodes: max_nodes.unwrap_or(u64::MAX),
        }
    }

    fn bump(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            Err(SearchError::NodeBudgetExceeded { nodes: self.max_nodes })
        } else {
            Ok(())
        }
    }

    fn first_unassigned(&self) -> Option<usize> {
        (0..self.k).find(|&r| self.rows[r].is_none())
    }

    /// Reduces `v` mod p against the basis; `None` means linearly dependent.
    /// The returned row is normalized to pivot 1 and never modified later,
    /// which keeps undo a plain pop.
    fn reduce(&self, v: &[u64]) -> Option<(Vec<u64>, usize)> {
        let p = self.ctx.p;
        let mut w: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for (b, piv) in &self.basis {
            let c = w[*piv];
            if c != 0 {
                for j in 0..self.k {
                    w[j] = (w[j] + (p - c) * b[j]) % p;
                }
            }
        }
        let piv = w.iter().position(|&x| x != 0)?;
        let inv = crate::endo::mod_inverse(w[piv], p);
        for x in &mut w {
            *x = *x * inv % p;
        }
        Some((w, piv))
    }

    /// Assigns row `r` if it keeps the matrix invertible mod p.
    fn try_assign(&mut self, r: usize, v: Vec<u64>) -> bool {
        let Some(entry) = self.reduce(&v) else { return false };
        self.basis.push(entry);
        self.rows[r] = Some(v);
        self.trail.push(r);
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let r = self.trail.pop().expect("trail length checked");
            self.rows[r] = None;
            self.basis.pop();
        }
    }

    fn row_ok(&self, r: usize, v: &[u64]) -> bool {
        row_is_admissible(&self.ctx.q, &self.ctx.exps, self.ctx.p, r, v)
    }

    fn matrix(&self) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|o| o.clone().expect("all rows assigned"))
            .collect()
    }
}

/// Propagates `M * M = I` over the current partial assignment. For each
/// assigned row `i` the constraint `sum_l M[i][l] * row_l = e_i` is either
/// fully checkable, or pins a single unknown row: if its coefficient is a
/// unit the row is forced (and validated); otherwise per-coordinate gcd
/// solvability is screened. Returns false on contradiction.
fn propagate_involution(core: &mut Core) -> bool {
    let k = core.k;
    loop {
        let mut changed = false;
        for i in 0..k {
            let Some(vi) = core.rows[i].clone() else { continue };
            let q = &core.ctx.q;
            let mut known = vec![0u64; k];
            let mut unknown: Option<(usize, u64)> = None;
            let mut several = false;
            for l in 0..k {
                let c = vi[l];
                if c == 0 {
                    continue;
                }
                match &core.rows[l] {
                    Some(vl) => {
                        for j in 0..k {
                            known[j] = (known[j] + c % q[j] * vl[j]) % q[j];
                        }
                    }
                    None if unknown.is_some() => several = true,
                    None => unknown = Some((l, c)),
                }
            }
            let target: Vec<u64> =
                (0..k).map(|j| (u64::from(i == j) + q[j] - known[j]) % q[j]).collect();
            match unknown {
                None => {
                    if target.iter().any(|&x| x != 0) {
                        return false;
                    }
                }
                Some((u, c)) if !several => {
                    if c % core.ctx.p != 0 {
                        let forced: Vec<u64> = (0..k)
                            .map(|j| {
                                let inv = mod_inv(c % q[j], q[j]).expect("unit coefficient");
                                inv * target[j] % q[j]
                            })
                            .collect();
                        if !core.row_ok(u, &forced) || !core.try_assign(u, forced) {
                            return false;
                        }
                        changed = true;
                    } else {
                        for j in 0..k {
                            if target[j] % gcd(c, q[j]) != 0 {
                                return false;
                            }
                        }
                    }
                }
                Some(_) => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn dfs_involutions(
    core: &mut Core,
    visit: &mut dyn FnMut(&Endomorphism) -> Result<(), SearchError>,
) -> Result<(), SearchError> {
    let Some(r) = core.first_unassigned() else {
        let f = Endomorphism::from_valid(core.ctx.group.clone(), core.matrix());
        debug_assert!(f.is_involution());
        return visit(&f);
    };
    for idx in 0..core.ctx.cands[r].len() {
        core.bump()?;
        let v = core.ctx.cands[r][idx].clone();
        let mark = core.trail.len();
        if core.try_assign(r, v) && propagate_involution(core) {
            dfs_involutions(core, visit)?;
        }
        core.undo_to(mark);
    }
    Ok(())
}

/// Streams every involutory automorphism of a primary group in a fixed
/// deterministic order. Returns the number visited.
fn stream_primary(
    ctx: &SearchContext,
    max_nodes: Option<u64>,
    visit: &mut dyn FnMut(&Endomorphism) -> Result<(), SearchError>,
) -> Result<u64, SearchError> {
    let mut count = 0u64;
    let mut counting = |f: &Endomorphism| {
        count += 1;
        visit(f)
    };
    let mut core = Core::new(ctx, max_nodes);
    dfs_involutions(&mut core, &mut counting)?;
    Ok(count)
}

/// Propagates `P * F = F * S` (conjugation constraint, `S` an involution).
/// Same style as the involution propagation, with one extra trick: when the
/// left side of a row constraint is fully known and row `i` of `F` is not,
/// `F[i] = L * S` is forced because `S` is its own inverse.
fn propagate_conjugator(core: &mut Core, pm: &[Vec<u64>], sm: &[Vec<u64>]) -> bool {
    let k = core.k;
    loop {
        let mut changed = false;
        for i in 0..k {
            let q = &core.ctx.q;
            let mut lhs = vec![0u64; k];
            let mut unknown: Option<(usize, u64)> = None;
            let mut several = false;
            for l in 0..k {
                let c = pm[i][l];
                if c == 0 {
                    continue;
                }
                match &core.rows[l] {
                    Some(fl) => {
                        for j in 0..k {
                            lhs[j] = (lhs[j] + c % q[j] * fl[j]) % q[j];
                        }
                    }
                    None if unknown.is_some() => several = true,
                    None => unknown = Some((l, c)),
                }
            }
            let rhs: Option<Vec<u64>> = core.rows[i].as_ref().map(|fi| {
                (0..k)
                    .map(|j| {
                        let mut acc = 0u64;
                        for l in 0..k {
                            acc = (acc + fi[l] % q[j] * sm[l][j]) % q[j];
                        }
                        acc
                    })
                    .collect()
            });
            match (rhs, unknown, several) {
                (Some(r), None, _) => {
                    if lhs != r {
                        return false;
                    }
                }
                (Some(r), Some((u, c)), false) => {
                    let target: Vec<u64> =
                        (0..k).map(|j| (r[j] + q[j] - lhs[j]) % q[j]).collect();
                    if c % core.ctx.p != 0 {
                        let forced: Vec<u64> = (0..k)
                            .map(|j| {
                                let inv = mod_inv(c % q[j], q[j]).expect("unit coefficient");
                                inv * target[j] % q[j]
                            })
                            .collect();
                        if !core.row_ok(u, &forced) || !core.try_assign(u, forced) {
                            return false;
                        }
                        changed = true;
                    } else {
                        for j in 0..k {
                            if target[j] % gcd(c, q[j]) != 0 {
                                return false;
                            }
                        }
                    }
                }
                (None, None, false) => {
                    let forced: Vec<u64> = (0..k)
                        .map(|j| {
                            let mut acc = 0u64;
                            for l in 0..k {
                                acc = (acc + lhs[l] % q[j] * sm[l][j]) % q[j];
                            }
                            acc
                        })
                        .collect();
                    if !core.row_ok(i, &forced) || !core.try_assign(i, forced) {
                        return false;
                    }
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn dfs_conjugator(core: &mut Core, pm: &[Vec<u64>], sm: &[Vec<u64>]) -> Result<bool, SearchError> {
    let Some(r) = core.first_unassigned() else { return Ok(true) };
    for idx in 0..core.ctx.cands[r].len() {
        core.bump()?;
        let v = core.ctx.cands[r][idx].clone();
        let mark = core.trail.len();
        if core.try_assign(r, v) && propagate_conjugator(core, pm, sm) && dfs_conjugator(core, pm, sm)? {
            return Ok(true);
        }
        core.undo_to(mark);
    }
    Ok(false)
}

/// Conjugator search on a primary group: finds `f` with `psi = f phi f^-1`,
/// i.e. a homomorphism matrix `F` with `P*F = F*S`, invertible mod p.
fn conjugate_in_context(
    ctx: &SearchContext,
    phi: &Endomorphism,
    psi: &Endomorphism,
    max_nodes: Option<u64>,
) -> Result<Option<Endomorphism>, SearchError> {
    if phi == psi {
        return Ok(Some(Endomorphism::identity(ctx.group.clone())));
    }
    let mut core = Core::new(ctx, max_nodes);
    if dfs_conjugator(&mut core, phi.matrix(), psi.matrix())? {
        let f = Endomorphism::from_valid(ctx.group.clone(), core.matrix());
        debug_assert!(f.is_automorphism());
        debug_assert_eq!(psi.compose(&f), f.compose(phi));
        Ok(Some(f))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Public enumeration and classification API.
// ---------------------------------------------------------------------------

/// Calls `visit` once for every involutory automorphism of `t`, in a fixed
/// deterministic order, and returns how many there are. On a mixed-order
/// group the involutions are the block-diagonal products over the primary
/// components, visited with the first (smallest-prime) component varying
/// slowest.
pub fn for_each_involutory_automorphism<F: FnMut(&Endomorphism)>(
    t: &AbelianGroupType,
    budget: &Budget,
    mut visit: F,
) -> Result<u64, SearchError> {
    budget.check_group(t)?;
    let mut adapter = |f: &Endomorphism| {
        visit(f);
        Ok(())
    };
    stream_group(t, budget.max_nodes, &mut adapter)
}

fn stream_group(
    t: &AbelianGroupType,
    max_nodes: Option<u64>,
    visit: &mut dyn FnMut(&Endomorphism) -> Result<(), SearchError>,
) -> Result<u64, SearchError> {
    let comps = t.primary_components();
    match comps.len() {
        0 => {
            visit(&Endomorphism::identity(t.clone()))?;
            Ok(1)
        }
        1 => stream_primary(&SearchContext::new(t), max_nodes, visit),
        _ => {
            let mut parts: Vec<Vec<Endomorphism>> = Vec::with_capacity(comps.len());
            for comp in &comps {
                let ctx = SearchContext::new(comp);
                let mut collected = Vec::new();
                stream_primary(&ctx, max_nodes, &mut |f| {
                    collected.push(f.clone());
                    Ok(())
                })?;
                parts.push(collected);
            }
            let mut count = 0u64;
            let mut idx = vec![0usize; parts.len()];
            loop {
                let chosen: Vec<&Endomorphism> =
                    idx.iter().zip(&parts).map(|(&i, list)| &list[i]).collect();
                visit(&block_diagonal(t, &chosen))?;
                count += 1;
                // odometer: last component varies fastest
                let mut pos = parts.len();
                loop {
                    if pos == 0 {
                        return Ok(count);
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < parts[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
    }
}

/// All involutory automorphisms of `t`. Always contains the identity.
pub fn involutory_automorphisms(
    t: &AbelianGroupType,
    budget: &Budget,
) -> Result<Vec<Endomorphism>, SearchError> {
    let mut out = Vec::new();
    for_each_involutory_automorphism(t, budget, |f| out.push(f.clone()))?;
    Ok(out)
}

/// Assembles one endomorphism per primary component into the block-diagonal
/// endomorphism of the whole group.
fn block_diagonal(t: &AbelianGroupType, parts: &[&Endomorphism]) -> Endomorphism {
    let k = t.rank();
    let mut matrix = vec![vec![0u64; k]; k];
    let mut offset = 0;
    for part in parts {
        let kk = part.group().rank();
        for i in 0..kk {
            for j in 0..kk {
                matrix[offset + i][offset + j] = part.matrix()[i][j];
            }
        }
        offset += kk;
    }
    Endomorphism::from_valid(t.clone(), matrix)
}

/// Splits an endomorphism of a mixed-order group into its primary blocks
/// (the off-block entries are forced to zero by the Hom constraints).
fn primary_parts(f: &Endomorphism) -> Vec<Endomorphism> {
    let comps = f.group().primary_components();
    let mut out = Vec::with_capacity(comps.len());
    let mut offset = 0;
    for comp in comps {
        let kk = comp.rank();
        let matrix: Vec<Vec<u64>> = (0..kk)
            .map(|i| (0..kk).map(|j| f.matrix()[offset + i][offset + j]).collect())
            .collect();
        out.push(Endomorphism::from_valid(comp, matrix));
        offset += kk;
    }
    out
}

/// Searches for an automorphism `f` with `psi = f . phi . f^-1`. Returns
/// `None` when the two involutions are not conjugate. Both must live on the
/// same group.
pub fn conjugating_automorphism(
    phi: &Endomorphism,
    psi: &Endomorphism,
    max_nodes: Option<u64>,
) -> Result<Option<Endomorphism>, SearchError> {
    assert_eq!(phi.group(), psi.group(), "conjugacy is only defined on a shared group");
    if fingerprint(phi) != fingerprint(psi) {
        return Ok(None);
    }
    let phi_parts = primary_parts(phi);
    let psi_parts = primary_parts(psi);
    let mut found = Vec::with_capacity(phi_parts.len());
    for (p_part, s_part) in phi_parts.iter().zip(&psi_parts) {
        let ctx = SearchContext::new(p_part.group());
        match conjugate_in_context(&ctx, p_part, s_part, max_nodes)? {
            Some(f) => found.push(f),
            None => return Ok(None),
        }
    }
    let refs: Vec<&Endomorphism> = found.iter().collect();
    Ok(Some(block_diagonal(phi.group(), &refs)))
}

/// How a classification was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationMethod {
    /// Fingerprint buckets taken as classes (validated complete for odd
    /// primes and elementary abelian 2-groups).
    FingerprintBuckets,
    /// Fingerprint buckets refined by per-member conjugator search.
    VerifiedBuckets,
    /// Closed-form rank classification on large elementary abelian 2-groups;
    /// no enumeration.
    RankFormula,
    /// Product of independently classified primary components.
    Product,
}

/// One conjugacy class: a representative, the exact number of involutions in
/// the class when known, and the shared fingerprint.
#[derive(Clone, Debug, Serialize)]
pub struct InvolutionClass {
    pub representative: Endomorphism,
    pub size: Option<u64>,
    pub fingerprint: ConjugacyFingerprint,
}

/// Conjugacy classification of the involutory automorphisms of a group.
#[derive(Clone, Debug, Serialize)]
pub struct InvolutionClassification {
    group: AbelianGroupType,
    method: ClassificationMethod,
    total_involutions: u64,
    classes: Vec<InvolutionClass>,
    #[serde(skip)]
    components: Vec<InvolutionClassification>,
}

/// Knobs for [`classify_involutions_with`].
#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    pub budget: Budget,
    /// Force conjugator-search verification inside every fingerprint bucket,
    /// even where buckets are normally trusted. Used by the validation suite
    /// and available from the CLI for independent re-checks.
    pub verify_buckets: bool,
}

/// Classifies the involutory automorphisms of `t` up to conjugacy in the
/// full automorphism group, under the default budget semantics.
pub fn classify_involutions(
    t: &AbelianGroupType,
    budget: &Budget,
) -> Result<InvolutionClassification, SearchError> {
    classify_involutions_with(t, &ClassifyOptions { budget: budget.clone(), verify_buckets: false })
}

pub fn classify_involutions_with(
    t: &AbelianGroupType,
    opts: &ClassifyOptions,
) -> Result<InvolutionClassification, SearchError> {
    opts.budget.check_group(t)?;
    let comps = t.primary_components();
    match comps.len() {
        0 => {
            let id = Endomorphism::identity(t.clone());
            let fp = fingerprint(&id);
            Ok(InvolutionClassification {
                group: t.clone(),
                method: ClassificationMethod::FingerprintBuckets,
                total_involutions: 1,
                classes: vec![InvolutionClass {
                    representative: id,
                    size: Some(1),
                    fingerprint: fp,
                }],
                components: Vec::new(),
            })
        }
        1 => classify_primary(t, opts),
        _ => {
            let parts: Vec<InvolutionClassification> = comps
                .iter()
                .map(|comp| classify_primary(comp, opts))
                .collect::<Result<_, _>>()?;
            product_classification(t, parts)
        }
    }
}

fn classify_primary(
    comp: &AbelianGroupType,
    opts: &ClassifyOptions,
) -> Result<InvolutionClassification, SearchError> {
    let ctx = SearchContext::new(comp);
    let elementary = ctx.exps.iter().all(|&a| a == 1);
    if ctx.p == 2 && elementary && ctx.q.len() >= 7 && !opts.verify_buckets {
        return rank_formula_classification(comp);
    }
    // Buckets are trusted as classes for odd p and for elementary abelian
    // 2-groups; every other 2-group gets explicit per-member verification.
    let verify = opts.verify_buckets || (ctx.p == 2 && !elementary);

    struct Accum {
        rep: Endomorphism,
        size: u64,
    }
    let mut buckets: BTreeMap<ConjugacyFingerprint, Vec<Accum>> = BTreeMap::new();
    let max_nodes = opts.budget.max_nodes;
    let total = {
        let mut visit = |f: &Endomorphism| {
            let fp = fingerprint(f);
            let bucket = buckets.entry(fp).or_default();
            if verify {
                for acc in bucket.iter_mut() {
                    if conjugate_in_context(&ctx, f, &acc.rep, max_nodes)?.is_some() {
                        acc.size += 1;
                        return Ok(());
                    }
                }
                bucket.push(Accum { rep: f.clone(), size: 1 });
            } else if let Some(acc) = bucket.first_mut() {
                acc.size += 1;
            } else {
                bucket.push(Accum { rep: f.clone(), size: 1 });
            }
            Ok(())
        };
        stream_primary(&ctx, max_nodes, &mut visit)?
    };
    let classes: Vec<InvolutionClass> = buckets
        .into_iter()
        .flat_map(|(fp, accs)| {
            accs.into_iter().map(move |acc| InvolutionClass {
                representative: acc.rep,
                size: Some(acc.size),
                fingerprint: fp.clone(),
            })
        })
        .collect();
    debug_assert_eq!(classes.iter().map(|c| c.size.unwrap()).sum::<u64>(), total);
    Ok(InvolutionClassification {
        group: comp.clone(),
        method: if verify {
            ClassificationMethod::VerifiedBuckets
        } else {
            ClassificationMethod::FingerprintBuckets
        },
        total_involutions: total,
        classes,
        components: Vec::new(),
    })
}

/// Closed-form classification for elementary abelian 2-groups: the class of
/// an involution is determined by r = rank(f + id), with 0 <= r <= k/2, the
/// representative is the identity with r Jordan blocks, and the class size
/// counts the rank-r square-zero matrices N (each f = id + N) by choice of
/// kernel, image inside it, and induced isomorphism.
fn rank_formula_classification(
    g: &AbelianGroupType,
) -> Result<InvolutionClassification, SearchError> {
    let k = g.rank();
    let mut classes = Vec::new();
    let mut total = 0u64;
    for r in 0..=k / 2 {
        let size =
            elementary_involution_count(k as u32, r as u32).ok_or(SearchError::CountOverflow)?;
        total = total.checked_add(size).ok_or(SearchError::CountOverflow)?;
        classes.push(InvolutionClass {
            representative: jordan_involution(g, r),
            size: Some(size),
            fingerprint: elementary_fingerprint(k, r),
        });
    }
    classes.sort_by(|a, b| a.fingerprint.cmp(&b.fingerprint));
    Ok(InvolutionClassification {
        group: g.clone(),
        method: ClassificationMethod::RankFormula,
        total_involutions: total,
        classes,
        components: Vec::new(),
    })
}

/// The canonical involution of (Z2)^k with r Jordan blocks: identity except
/// that generator 2b also picks up generator 2b+1, for b < r.
fn jordan_involution(g: &AbelianGroupType, r: usize) -> Endomorphism {
    let k = g.rank();
    let mut matrix: Vec<Vec<u64>> =
        (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    for b in 0..r {
        matrix[2 * b][2 * b + 1] = 1;
    }
    Endomorphism::from_valid(g.clone(), matrix)
}

/// Number of involutions of (Z2)^k with rank(f + id) = r: the count of
/// square-zero matrices over F_2 of rank r. `None` on 64-bit overflow.
pub fn elementary_involution_count(k: u32, r: u32) -> Option<u64> {
    let a = gaussian_binomial_2(k, k - r)?;
    let b = gaussian_binomial_2(k - r, r)?;
    let c = general_linear_order_2(r)?;
    a.checked_mul(b)?.checked_mul(c)
}

/// Gaussian binomial [n choose k]_2: the number of k-dimensional subspaces
/// of F_2^n.
pub fn gaussian_binomial_2(n: u32, k: u32) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    if n >= 120 {
        return None;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.checked_mul((1u128 << (n - i)) - 1)?;
        den = den.checked_mul((1u128 << (i + 1)) - 1)?;
    }
    u64::try_from(num / den).ok()
}

/// |GL(r, 2)|.
pub fn general_linear_order_2(r: u32) -> Option<u64> {
    if r >= 60 {
        return None;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((1u128 << r) - (1u128 << i))?;
    }
    u64::try_from(acc).ok()
}

fn product_classification(
    t: &AbelianGroupType,
    parts: Vec<InvolutionClassification>,
) -> Result<InvolutionClassification, SearchError> {
    let mut total = 1u64;
    for part in &parts {
        total = total
            .checked_mul(part.total_involutions)
            .ok_or(SearchError::CountOverflow)?;
    }
    let mut classes = Vec::new();
    let mut idx = vec![0usize; parts.len()];
    'outer: loop {
        let chosen: Vec<&Endomorphism> = idx
            .iter()
            .zip(&parts)
            .map(|(&i, part)| &part.classes[i].representative)
            .collect();
        let rep = block_diagonal(t, &chosen);
        let size = idx
            .iter()
            .zip(&parts)
            .try_fold(1u64, |acc, (&i, part)| {
                part.classes[i].size.and_then(|s| acc.checked_mul(s))
            });
        let fp = fingerprint(&rep);
        classes.push(InvolutionClass { representative: rep, size, fingerprint: fp });
        let mut pos = parts.len();
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < parts[pos].classes.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(InvolutionClassification {
        group: t.clone(),
        method: ClassificationMethod::Product,
        total_involutions: total,
        classes,
        components: parts,
    })
}

impl InvolutionClassification {
    pub fn group(&self) -> &AbelianGroupType {
        &self.group
    }

    pub fn classes(&self) -> &[InvolutionClass] {
        &self.classes
    }

    pub fn total_involutions(&self) -> u64 {
        self.total_involutions
    }

    pub fn method(&self) -> ClassificationMethod {
        self.method
    }

    /// Index of the class containing `f`, or `None` if `f` is not an
    /// involutory automorphism of this classification's group.
    pub fn class_of(&self, f: &Endomorphism) -> Option<usize> {
        if f.group() != &self.group || f.require_involutory_automorphism().is_err() {
            return None;
        }
        if !self.components.is_empty() {
            let parts = primary_parts(f);
            let mut index = 0;
            for (part, cls) in parts.iter().zip(&self.components) {
                index = index * cls.classes.len() + cls.class_of(part)?;
            }
            return Some(index);
        }
        let fp = fingerprint(f);
        let candidates: Vec<usize> = self
            .classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.fingerprint == fp)
            .map(|(i, _)| i)
            .collect();
        match candidates.as_slice() {
            [] => None,
            [only] => Some(*only),
            several => {
                let ctx = SearchContext::new(&self.group);
                several
                    .iter()
                    .copied()
                    .find(|&i| {
                        matches!(
                            conjugate_in_context(&ctx, f, &self.classes[i].representative, None),
                            Ok(Some(_))
                        )
                    })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> AbelianGroupType {
        s.parse().unwrap()
    }

    fn unlimited() -> Budget {
        Budget { max_order: 1 << 14, stretch: true, max_nodes: None }
    }

    /// Independent oracle: every candidate matrix by raw entry enumeration,
    /// kept when it is a bijective map squaring to the identity.
    fn oracle_involutions(g: &AbelianGroupType) -> Vec<Endomorphism> {
        let q = g.factors();
        let k = q.len();
        let mut out = Vec::new();
        let total: u64 = (0..k * k).map(|e| q[e % k]).product();
        'matrices: for mut code in 0..total {
            let mut matrix = vec![vec![0u64; k]; k];
            for i in 0..k {
                for j in 0..k {
                    matrix[i][j] = code % q[j];
                    code /= q[j];
                }
            }
            let Ok(f) = Endomorphism::new(g.clone(), matrix) else { continue 'matrices };
            let mut seen = vec![false; g.order() as usize];
            for x in g.elements() {
                let i = g.index_of(&f.apply(&x)) as usize;
                if seen[i] {
                    continue 'matrices;
                }
                seen[i] = true;
            }
            if g.elements().all(|x| f.apply(&f.apply(&x)) == x) {
                out.push(f);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_raw_matrix_oracle() {
        for s in ["Z2^2", "Z4", "Z5", "Z4xZ2", "Z3^2", "Z9", "Z8", "Z2^3", "Z2xZ3", "Z4xZ3"] {
            let g = t(s);
            let mut got = involutory_automorphisms(&g, &unlimited()).unwrap();
            let mut want = oracle_involutions(&g);
            got.sort_by(|a, b| a.matrix().cmp(b.matrix()));
            want.sort_by(|a, b| a.matrix().cmp(b.matrix()));
            assert_eq!(got, want, "{s}");
        }
    }

    #[test]
    fn frozen_small_counts() {
        // cyclic 2-power: units with c^2 = 1
        for (s, n) in [("Z2", 1), ("Z4", 2), ("Z8", 4), ("Z5", 2), ("Z2^2", 4), ("Z4xZ2", 6)] {
            let g = t(s);
            let invs = involutory_automorphisms(&g, &unlimited()).unwrap();
            assert_eq!(invs.len(), n, "{s}");
            assert!(invs.contains(&Endomorphism::identity(g)));
        }
        let z5: Vec<u64> = involutory_automorphisms(&t("Z5"), &unlimited())
            .unwrap()
            .iter()
            .map(|f| f.matrix()[0][0])
            .collect();
        assert_eq!(z5, vec![1, 4]);
    }

    #[test]
    fn classification_frozen_class_counts() {
        for (s, classes) in [
            ("Z3^2", 3),
            ("Z5^2", 3),
            ("Z2^2", 2),
            ("Z9", 2),
            ("Z25", 2),
            ("Z4", 2),
            ("Z8", 4),
            ("Z4xZ2", 4),
            ("Z2^3", 2),
            ("Z1", 1),
        ] {
            let c = classify_involutions(&t(s), &unlimited()).unwrap();
            assert_eq!(c.classes().len(), classes, "{s}");
            let sum: u64 = c.classes().iter().map(|cl| cl.size.unwrap()).sum();
            assert_eq!(sum, c.total_involutions(), "{s}");
        }
    }

    #[test]
    fn cyclic_odd_classes_are_singletons() {
        // Aut(Z_{p^d}) is abelian, so conjugation is trivial.
        for s in ["Z3", "Z9", "Z27", "Z5", "Z25", "Z7", "Z49"] {
            let c = classify_involutions(&t(s), &unlimited()).unwrap();
            assert_eq!(c.classes().len(), 2, "{s}");
            assert!(c.classes().iter().all(|cl| cl.size == Some(1)), "{s}");
        }
    }

    /// The mandated oracle run: trusted fingerprint buckets must agree with
    /// full conjugator-search verification on every odd-prime-power group of
    /// order <= 81.
    #[test]
    fn odd_bucket_trust_validated_up_to_81() {
        let budget = unlimited();
        let mut orders: Vec<u64> = Vec::new();
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79]
        {
            let mut pw = p;
            while pw <= 81 {
                orders.push(pw);
                pw *= p;
            }
        }
        for n in orders {
            for g in crate::abelian::groups_of_order(n).unwrap() {
                let trusted = classify_involutions(&g, &budget).unwrap();
                let verified = classify_involutions_with(
                    &g,
                    &ClassifyOptions { budget: budget.clone(), verify_buckets: true },
                )
                .unwrap();
                assert_eq!(trusted.classes().len(), verified.classes().len(), "{g}");
                for (a, b) in trusted.classes().iter().zip(verified.classes()) {
                    assert_eq!(a.representative, b.representative, "{g}");
                    assert_eq!(a.size, b.size, "{g}");
                }
                assert_eq!(trusted.total_involutions(), verified.total_involutions());
            }
        }
    }

    /// Same validation for elementary abelian 2-groups at small rank, plus
    /// the floor(k/2)+1 class-count law through rank 6.
    #[test]
    fn elementary_two_bucket_trust_validated() {
        let budget = unlimited();
        for k in 1..=4usize {
            let g = AbelianGroupType::new(&vec![2; k]).unwrap();
            let trusted = classify_involutions(&g, &budget).unwrap();
            let verified = classify_involutions_with(
                &g,
                &ClassifyOptions { budget: budget.clone(), verify_buckets: true },
            )
            .unwrap();
            assert_eq!(trusted.classes().len(), k / 2 + 1);
            assert_eq!(verified.classes().len(), k / 2 + 1);
            for (a, b) in trusted.classes().iter().zip(verified.classes()) {
                assert_eq!(a.representative, b.representative);
                assert_eq!(a.size, b.size);
            }
        }
        for k in 5..=6usize {
            let g = AbelianGroupType::new(&vec![2; k]).unwrap();
            let c = classify_involutions(&g, &budget).unwrap();
            assert_eq!(c.classes().len(), k / 2 + 1, "rank {k}");
        }
    }

    /// The closed-form path must reproduce the streamed classification where
    /// both are computable (it is only switched on above rank 6).
    #[test]
    fn rank_formula_matches_streamed_classification() {
        let budget = unlimited();
        for k in 1..=6usize {
            let g = AbelianGroupType::new(&vec![2; k]).unwrap();
            let streamed = classify_involutions(&g, &budget).unwrap();
            let formula = rank_formula_classification(&g).unwrap();
            assert_eq!(formula.total_involutions(), streamed.total_involutions(), "rank {k}");
            assert_eq!(formula.classes().len(), streamed.classes().len());
            for (a, b) in formula.classes().iter().zip(streamed.classes()) {
                assert_eq!(a.fingerprint, b.fingerprint, "rank {k}");
                assert_eq!(a.size, b.size, "rank {k}");
                // representatives differ (canonical vs first-found) but must
                // be conjugate
                assert!(conjugating_automorphism(&a.representative, &b.representative, None)
                    .unwrap()
                    .is_some());
            }
        }
    }

    #[test]
    fn gaussian_binomials_and_gl_orders() {
        assert_eq!(gaussian_binomial_2(4, 2), Some(35));
        assert_eq!(gaussian_binomial_2(6, 3), Some(1395));
        assert_eq!(gaussian_binomial_2(5, 0), Some(1));
        assert_eq!(gaussian_binomial_2(3, 5), Some(0));
        assert_eq!(general_linear_order_2(1), Some(1));
        assert_eq!(general_linear_order_2(2), Some(6));
        assert_eq!(general_linear_order_2(3), Some(168));
        assert_eq!(general_linear_order_2(4), Some(20160));
        // involution totals for small elementary groups
        let total = |k: u32| -> u64 {
            (0..=k / 2).map(|r| elementary_involution_count(k, r).unwrap()).sum()
        };
        assert_eq!(total(2), 4);
        assert_eq!(total(4), 316);
        assert_eq!(total(6), 373_024);
    }

    #[test]
    fn fingerprint_elementary_fast_path_agrees_with_lattice_path() {
        for k in 1..=4usize {
            let g = AbelianGroupType::new(&vec![2; k]).unwrap();
            for f in involutory_automorphisms(&g, &unlimited()).unwrap() {
                let fast = fingerprint(&f);
                let q = g.factors();
                let minus: Vec<Vec<u64>> = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| (f.matrix()[i][j] + q[j] - u64::from(i == j)) % q[j])
                            .collect()
                    })
                    .collect();
                let slow = ConjugacyFingerprint {
                    fixed_kernel: kernel_type(&g, &minus),
                    negated_kernel: kernel_type(&g, &minus),
                    minus_image: image_type(&g, &minus),
                    plus_image: image_type(&g, &minus),
                };
                assert_eq!(fast, slow);
            }
        }
    }

    #[test]
    fn fingerprint_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in ["Z4xZ2", "Z3^2", "Z9xZ3", "Z8xZ2", "Z2^3", "Z4xZ9"] {
            let g = t(s);
            for f in involutory_automorphisms(&g, &unlimited()).unwrap() {
                let a = Endomorphism::random_automorphism(&g, &mut rng);
                let conj = f.conjugate_by(&a).unwrap();
                assert_eq!(fingerprint(&f), fingerprint(&conj), "{s}");
            }
        }
    }

    #[test]
    fn conjugator_search_finds_witnesses_and_rejects_distinct_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in ["Z4xZ2", "Z3^2", "Z8", "Z2^3", "Z9xZ3"] {
            let g = t(s);
            let c = classify_involutions(&g, &unlimited()).unwrap();
            for cl in c.classes() {
                let a = Endomorphism::random_automorphism(&g, &mut rng);
                let conj = cl.representative.conjugate_by(&a).unwrap();
                let f = conjugating_automorphism(&cl.representative, &conj, None)
                    .unwrap()
                    .expect("must find a conjugator");
                assert_eq!(conj.compose(&f), f.compose(&cl.representative));
            }
            for (i, a) in c.classes().iter().enumerate() {
                for b in &c.classes()[i + 1..] {
                    assert!(
                        conjugating_automorphism(&a.representative, &b.representative, None)
                            .unwrap()
                            .is_none(),
                        "distinct classes of {s} must not be conjugate"
                    );
                }
            }
        }
    }

    #[test]
    fn class_of_respects_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for s in ["Z4xZ2", "Z3^2", "Z2^3", "Z4xZ9", "Z4xZ3"] {
            let g = t(s);
            let c = classify_involutions(&g, &unlimited()).unwrap();
            for (i, cl) in c.classes().iter().enumerate() {
                assert_eq!(c.class_of(&cl.representative), Some(i), "{s}");
                for _ in 0..5 {
                    let a = Endomorphism::random_automorphism(&g, &mut rng);
                    let conj = cl.representative.conjugate_by(&a).unwrap();
                    assert_eq!(c.class_of(&conj), Some(i), "{s}");
                }
            }
            // non-involutions are rejected
            if g.order() > 2 {
                let neg = Endomorphism::zero(g.clone());
                assert_eq!(c.class_of(&neg), None);
            }
        }
    }

    #[test]
    fn composite_groups_classify_as_products() {
        let budget = unlimited();
        let c12 = classify_involutions(&t("Z4xZ3"), &budget).unwrap();
        assert_eq!(c12.method(), ClassificationMethod::Product);
        assert_eq!(c12.classes().len(), 4); // 2 classes for Z4 times 2 for Z3
        assert_eq!(c12.total_involutions(), 4);
        let c36 = classify_involutions(&t("Z2^2xZ3^2"), &budget).unwrap();
        assert_eq!(c36.classes().len(), 2 * 3);
        for cl in c36.classes() {
            cl.representative.require_involutory_automorphism().unwrap();
        }
    }

    #[test]
    fn budget_gating() {
        let default_budget = Budget::default();
        let g128 = AbelianGroupType::new(&vec![2; 7]).unwrap();
        assert!(matches!(
            classify_involutions(&g128, &default_budget),
            Err(SearchError::OrderNeedsStretch { order: 128 })
        ));
        let g131 = t("Z131");
        assert!(matches!(
            involutory_automorphisms(&g131, &default_budget),
            Err(SearchError::OrderOutsideBudget { order: 131, .. })
        ));
        let raised = Budget { max_order: 131, ..Budget::default() };
        assert_eq!(involutory_automorphisms(&g131, &raised).unwrap().len(), 2);
        // the primary-component gate catches big parts of allowed totals
        let mixed = t("Z128xZ3");
        let permissive = Budget { max_order: 500, stretch: false, max_nodes: None };
        assert!(matches!(
            classify_involutions(&mixed, &permissive),
            Err(SearchError::OrderNeedsStretch { order: 128 })
        ));
    }

    #[test]
    fn node_budget_is_enforced() {
        let tight = Budget { max_order: 128, stretch: false, max_nodes: Some(3) };
        let g = t("Z2^4");
        assert!(matches!(
            involutory_automorphisms(&g, &tight),
            Err(SearchError::NodeBudgetExceeded { nodes: 3 })
        ));
    }

    #[test]
    fn streaming_matches_collection_and_is_deterministic() {
        let g = t("Z4xZ2^2");
        let collected = involutory_automorphisms(&g, &unlimited()).unwrap();
        let mut streamed = Vec::new();
        let n = for_each_involutory_automorphism(&g, &unlimited(), |f| streamed.push(f.clone()))
            .unwrap();
        assert_eq!(n as usize, collected.len());
        assert_eq!(streamed, collected);
    }
}
