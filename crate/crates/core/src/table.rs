//! Cayley tables and the two directions of the term equivalence.
//!
//! A [`CayleyTable`] is a bare n-by-n multiplication table over element
//! indices `0..n`; no law is assumed by the type, the checkers in [`laws`]
//! establish them. An [`AgRepresentation`] is the linear side of the
//! correspondence — an abelian group together with an involutory
//! automorphism — and [`construct`] materializes its table via
//! `a * b = phi(a) + b`.
//!
//! [`to_module`] walks the other way: given a table passing the AG-group
//! axioms it recovers the addition `a + b = (a*e)*b`, the automorphism
//! `phi(a) = a*e`, and the zero `e`, using the left unit `e = a/a`.
//! [`from_module`] rebuilds the table from such data after validating it,
//! so the two are mutually inverse on their images.
//!
//! [`laws`]: crate::laws

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroupType;
use crate::endo::Endomorphism;
use crate::error::{EndoError, TableError};
use crate::laws::{self, Law};

/// Largest supported table order: keeps a dense table under a megabyte and
/// comfortably covers every order this crate enumerates.
pub const MAX_TABLE_ORDER: usize = 512;

/// A finite groupoid as a dense multiplication table: `table[a][b]` is the
/// index of `a * b`. Entries fit in `u16` because orders are capped at
/// [`MAX_TABLE_ORDER`].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TableWire", into = "TableWire")]
pub struct CayleyTable {
    n: usize,
    cells: Vec<u16>,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<TableWire> for CayleyTable {
    type Error = TableError;

    fn try_from(w: TableWire) -> Result<Self, TableError> {
        let t = CayleyTable::new(w.table)?;
        if t.n != w.order {
            return Err(TableError::NotSquare { rows: w.order, cols: t.n });
        }
        Ok(t)
    }
}

impl From<CayleyTable> for TableWire {
    fn from(t: CayleyTable) -> TableWire {
        TableWire { order: t.n, table: t.rows() }
    }
}

impl CayleyTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, TableError> {
        let n = rows.len();
        if n == 0 {
            return Err(TableError::Empty);
        }
        if n > MAX_TABLE_ORDER {
            return Err(TableError::OrderTooLarge(n, MAX_TABLE_ORDER));
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(TableError::RaggedRow { row: i, expected: n, got: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(TableError::EntryRange { row: i, col: j, value: v, order: n });
                }
                cells.push(v as u16);
            }
        }
        Ok(CayleyTable { n, cells })
    }

    /// Builds a table from a closure over index pairs; entries are trusted
    /// to be `< n` by construction.
    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let mut cells = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let v = f(a, b);
                debug_assert!(v < n);
                cells.push(v as u16);
            }
        }
        CayleyTable { n, cells }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// The product `a * b`.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b] as usize
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.get(a, b)).collect()).collect()
    }

    /// All indices `e` with `e * a = a` for every `a`.
    pub fn left_units(&self) -> Vec<usize> {
        (0..self.n).filter(|&e| (0..self.n).all(|a| self.get(e, a) == a)).collect()
    }

    /// The inverse map relative to a two-sided-unit candidate `e`: returns
    /// `None` unless every element has exactly one `x` with
    /// `a * x = x * a = e`.
    pub fn inverses(&self, e: usize) -> Option<Vec<usize>> {
        (0..self.n)
            .map(|a| {
                let mut found = None;
                for x in 0..self.n {
                    if self.get(a, x) == e && self.get(x, a) == e {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(x);
                    }
                }
                found
            })
            .collect()
    }

    /// Canonical plain-text form: one line per row, entries separated by
    /// single spaces, every line newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if b > 0 {
                    out.push(' ');
                }
                out.push_str(itoa(self.get(a, b)).as_str());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text form; tolerant of blank lines and extra
    /// whitespace, so `from_text(to_text(t)) == t` and any accepted input
    /// re-emits canonically.
    pub fn from_text(s: &str) -> Result<Self, TableError> {
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            match row {
                Ok(r) => rows.push(r),
                Err(e) => {
                    return Err(TableError::ParseText {
                        line: lineno + 1,
                        detail: e.to_string(),
                    })
                }
            }
        }
        CayleyTable::new(rows)
    }
}

fn itoa(v: usize) -> String {
    v.to_string()
}

impl fmt::Debug for CayleyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CayleyTable(order {})", self.n)?;
        for row in self.rows() {
            write!(f, "\n  {row:?}")?;
        }
        Ok(())
    }
}

impl FromStr for CayleyTable {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, TableError> {
        CayleyTable::from_text(s)
    }
}

/// An abelian group paired with an involutory automorphism — the data that
/// determines an AG-group via `a * b = phi(a) + b`. Wraps a validated
/// [`Endomorphism`] (same JSON wire form), rejecting anything that is not
/// a self-inverse automorphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Endomorphism", into = "Endomorphism")]
pub struct AgRepresentation {
    involution: Endomorphism,
}

impl TryFrom<Endomorphism> for AgRepresentation {
    type Error = EndoError;

    fn try_from(involution: Endomorphism) -> Result<Self, EndoError> {
        AgRepresentation::new(involution)
    }
}

impl From<AgRepresentation> for Endomorphism {
    fn from(rep: AgRepresentation) -> Endomorphism {
        rep.involution
    }
}

impl AgRepresentation {
    pub fn new(involution: Endomorphism) -> Result<Self, EndoError> {
        involution.require_involutory_automorphism()?;
        Ok(AgRepresentation { involution })
    }

    /// The group table itself: `phi` = identity.
    pub fn identity_on(group: AbelianGroupType) -> Self {
        AgRepresentation { involution: Endomorphism::identity(group) }
    }

    /// The `a * b = b - a` table: `phi` = negation.
    pub fn negation_on(group: AbelianGroupType) -> Self {
        AgRepresentation { involution: Endomorphism::negation(group) }
    }

    pub fn group(&self) -> &AbelianGroupType {
        self.involution.group()
    }

    pub fn involution(&self) -> &Endomorphism {
        &self.involution
    }
}

impl fmt::Display for AgRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AG({}, {:?})", self.group(), self.involution.matrix())
    }
}

/// Materializes the Cayley table of `a * b = phi(a) + b` over the element
/// indexing of the underlying group. Index 0 — the zero element — is a left
/// unit of the result.
pub fn construct(rep: &AgRepresentation) -> Result<CayleyTable, TableError> {
    let g = rep.group();
    let order = g.order();
    if order as usize > MAX_TABLE_ORDER {
        return Err(TableError::OrderTooLarge(order as usize, MAX_TABLE_ORDER));
    }
    let n = order as usize;
    let phi_of: Vec<u64> = g
        .elements()
        .map(|x| g.index_of(&rep.involution.apply(&x)))
        .collect();
    let mut cells = Vec::with_capacity(n * n);
    for a in 0..n {
        let pa = g.element_at(phi_of[a]);
        for b in 0..n {
            let s = g.add(&pa, &g.element_at(b as u64));
            cells.push(g.index_of(&s) as u16);
        }
    }
    Ok(CayleyTable { n, cells })
}

/// Both division tables of a quasigroup: `right[b][a]` is the unique `x`
/// with `x * a = b`, and `left[a][b]` is the unique `x` with `a * x = b`.
pub fn divisions(t: &CayleyTable) -> Result<(CayleyTable, CayleyTable), TableError> {
    let report = laws::check(t, Law::Quasigroup)?;
    if !report.holds {
        return Err(TableError::NotQuasigroup(Box::new(report)));
    }
    let n = t.order();
    let mut right = vec![0u16; n * n];
    let mut left = vec![0u16; n * n];
    for x in 0..n {
        for a in 0..n {
            right[t.get(x, a) * n + a] = x as u16;
            left[x * n + t.get(x, a)] = a as u16;
        }
    }
    Ok((CayleyTable { n, cells: right }, CayleyTable { n, cells: left }))
}

/// The module side of an AG-group table: its derived abelian addition,
/// the recovered automorphism as a permutation of indices, and the zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleData {
    pub addition: CayleyTable,
    pub phi: Vec<usize>,
    pub zero: usize,
}

/// Recovers the abelian-group data underlying an AG-group table:
/// `e = a/a`, `phi(a) = a*e`, `a + b = (a*e)*b`, `0 = e`.
///
/// The table must pass the AG-group axioms (left invertive law, left unit,
/// unique inverses); the first failing law is returned otherwise. The
/// quasigroup property follows from those axioms, but is checked too — it
/// is cheap and the division below depends on it.
pub fn to_module(t: &CayleyTable) -> Result<ModuleData, TableError> {
    for law in [Law::Ag, Law::LeftUnit, Law::UniqueInverses, Law::Quasigroup] {
        let report = laws::check(t, law)?;
        if !report.holds {
            return Err(TableError::NotAgGroup(Box::new(report)));
        }
    }
    let n = t.order();
    // e = 0/0: the unique solution of x * 0 = 0 (constant in the dividend).
    let e = (0..n).find(|&x| t.get(x, 0) == 0).expect("quasigroup column is onto");
    debug_assert!((0..n).all(|a| t.get(e, a) == a), "a/a must be the left unit");
    let phi: Vec<usize> = (0..n).map(|a| t.get(a, e)).collect();
    let addition = CayleyTable::from_fn(n, |a, b| t.get(phi[a], b));
    Ok(ModuleData { addition, phi, zero: e })
}

/// Rebuilds the AG-group table `a * b = phi(a) + b` from module data after
/// validating it: the addition must be an abelian group table with identity
/// `zero`, and `phi` an involutory automorphism of it.
pub fn from_module(m: &ModuleData) -> Result<CayleyTable, TableError> {
    let add = &m.addition;
    let n = add.order();
    let bad = |detail: String| TableError::BadModule { detail };
    if m.phi.len() != n {
        return Err(bad(format!("phi has {} entries for order {n}", m.phi.len())));
    }
    if m.zero >= n {
        return Err(bad(format!("zero index {} out of range for order {n}", m.zero)));
    }
    let quasi = laws::check(add, Law::Quasigroup)?;
    if !quasi.holds {
        return Err(bad(format!("addition is not cancellative: {quasi}")));
    }
    for a in 0..n {
        if add.get(m.zero, a) != a {
            return Err(bad(format!(
                "zero is not an identity: {} + {a} = {}",
                m.zero,
                add.get(m.zero, a)
            )));
        }
        for b in 0..n {
            if add.get(a, b) != add.get(b, a) {
                return Err(bad(format!(
                    "addition is not commutative at ({a}, {b}): {} vs {}",
                    add.get(a, b),
                    add.get(b, a)
                )));
            }
            for c in 0..n {
                if add.get(add.get(a, b), c) != add.get(a, add.get(b, c)) {
                    return Err(bad(format!(
                        "addition is not associative at ({a}, {b}, {c})"
                    )));
                }
            }
        }
    }
    let mut seen = vec![false; n];
    for &img in &m.phi {
        if img >= n {
            return Err(bad(format!("phi image {img} out of range for order {n}")));
        }
        seen[img] = true;
    }
    if seen.iter().any(|&s| !s) {
        return Err(bad("phi is not a bijection".into()));
    }
    for a in 0..n {
        if m.phi[m.phi[a]] != a {
            return Err(bad(format!("phi is not self-inverse at {a}")));
        }
        for b in 0..n {
            if m.phi[add.get(a, b)] != add.get(m.phi[a], m.phi[b]) {
                return Err(bad(format!("phi is not additive at ({a}, {b})")));
            }
        }
    }
    Ok(CayleyTable::from_fn(n, |a, b| add.get(m.phi[a], b)))
}

/// Identifies an abelian group table up to isomorphism: returns its type
/// and an explicit isomorphism `map[abstract index] -> table index`
/// following the type's element indexing. The caller guarantees `add` is
/// an abelian group table with identity `zero` (as established by
/// [`from_module`]-style validation).
///
/// Works prime by prime: within the p-part a basis is extracted greedily by
/// always lifting an element of maximal order in the quotient by the span
/// so far, correcting the lift so its order matches its quotient order.
pub(crate) fn recognize_abelian(add: &CayleyTable, zero: usize) -> (AbelianGroupType, Vec<usize>) {
    let n = add.order();
    let multiple = |x: usize, k: u64| -> usize {
        let mut acc = zero;
        for _ in 0..k {
            acc = add.get(acc, x);
        }
        acc
    };
    let order_of = |x: usize| -> u64 {
        let mut acc = x;
        let mut m = 1u64;
        while acc != zero {
            acc = add.get(acc, x);
            m += 1;
        }
        m
    };
    let neg_of = |x: usize| -> usize {
        (0..n).find(|&y| add.get(x, y) == zero).expect("group table has inverses")
    };

    let mut factors: Vec<u64> = Vec::new();
    let mut basis: Vec<usize> = Vec::new();
    for (p, _) in crate::abelian::factorize(n as u64) {
        // span of the p-basis found so far
        let mut in_span = vec![false; n];
        in_span[zero] = true;
        let mut span = vec![zero];
        let p_elements: Vec<usize> = (0..n)
            .filter(|&x| {
                let o = order_of(x);
                o > 1 && crate::abelian::factorize(o).len() == 1 && o % p == 0
            })
            .collect();
        loop {
            // order of x in the quotient by the current span
            let quotient_order = |x: usize| -> u64 {
                let mut acc = x;
                let mut q = 1u64;
                while !in_span[acc] {
                    acc = multiple(acc, p);
                    q *= p;
                }
                q
            };
            let Some((&x, q)) = p_elements
                .iter()
                .map(|x| (x, quotient_order(*x)))
                .max_by_key(|&(x, q)| (q, std::cmp::Reverse(*x)))
                .filter(|&(_, q)| q > 1)
            else {
                break;
            };
            // correct the lift: find c in the span with q*c = q*x, so that
            // x - c has order exactly q and meets the span trivially
            let overshoot = multiple(x, q);
            let x = if overshoot == zero {
                x
            } else {
                let c = span
                    .iter()
                    .copied()
                    .find(|&c| multiple(c, q) == overshoot && order_of(add.get(x, neg_of(c))) == q)
                    .expect("maximal quotient order guarantees a correction");
                add.get(x, neg_of(c))
            };
            factors.push(q);
            basis.push(x);
            let mut grown = Vec::with_capacity(span.len() * q as usize);
            for k in 0..q {
                let kx = multiple(x, k);
                for &h in &span {
                    let s = add.get(h, kx);
                    debug_assert!(k == 0 || !in_span[s], "basis vector meets span");
                    in_span[s] = true;
                    grown.push(s);
                }
            }
            span = grown;
        }
    }

    let ty = AbelianGroupType::new(&factors).expect("orders are prime powers");
    // the constructor sorts factors canonically; reorder the basis to match
    let mut remaining: Vec<(u64, usize)> = factors.into_iter().zip(basis).collect();
    let ordered: Vec<usize> = ty
        .factors()
        .iter()
        .map(|&f| {
            let at = remaining.iter().position(|&(q, _)| q == f).expect("factor present");
            remaining.swap_remove(at).1
        })
        .collect();

    let mut map = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let coords = ty.element_at(i);
        let mut acc = zero;
        for (j, &c) in coords.coords().iter().enumerate() {
            acc = add.get(acc, multiple(ordered[j], c));
        }
        map.push(acc);
    }
    debug_assert_eq!(
        { let mut s = map.clone(); s.sort_unstable(); s },
        (0..n).collect::<Vec<_>>(),
        "coordinate map must be a bijection"
    );
    (ty, map)
}
