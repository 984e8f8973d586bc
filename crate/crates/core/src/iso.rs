//! Isomorphism of Cayley tables, two ways.
//!
//! The fast path applies the structure theory: two AG-group tables are
//! isomorphic exactly when their underlying abelian groups are isomorphic
//! and the recovered involutions are conjugate in the automorphism group,
//! so the search reduces to module recognition plus a conjugator DFS. The
//! reference path is a plain backtracking search over bijections with
//! partial-homomorphism propagation and no algebra behind it. They must
//! agree everywhere; the test suites compare them, and [`isomorphic`]
//! re-verifies any bijection it returns before handing it out.

use crate::endo::Endomorphism;
use crate::table::{recognize_abelian, to_module, CayleyTable, ModuleData};

/// Finds an isomorphism `f` (as `f[index in t1] = index in t2`) or decides
/// there is none. AG-group inputs go through the module reduction; anything
/// else falls back to [`isomorphic_generic`]. A table satisfying the
/// AG-group axioms is never isomorphic to one that does not, so mixed
/// inputs short-circuit.
pub fn isomorphic(t1: &CayleyTable, t2: &CayleyTable) -> Option<Vec<usize>> {
    if t1.order() != t2.order() {
        return None;
    }
    let map = match (to_module(t1), to_module(t2)) {
        (Ok(m1), Ok(m2)) => representation_path(&m1, &m2)?,
        (Ok(_), Err(_)) | (Err(_), Ok(_)) => return None,
        (Err(_), Err(_)) => isomorphic_generic(t1, t2)?,
    };
    assert!(
        is_isomorphism(t1, t2, &map),
        "internal error: candidate bijection failed re-verification"
    );
    Some(map)
}

/// Exhaustive re-check that `map` carries `t1` onto `t2`.
pub fn is_isomorphism(t1: &CayleyTable, t2: &CayleyTable, map: &[usize]) -> bool {
    let n = t1.order();
    if t2.order() != n || map.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in map {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|a| (0..n).all(|b| map[t1.get(a, b)] == t2.get(map[a], map[b])))
}

fn representation_path(m1: &ModuleData, m2: &ModuleData) -> Option<Vec<usize>> {
    let (ty1, map1) = recognize_abelian(&m1.addition, m1.zero);
    let (ty2, map2) = recognize_abelian(&m2.addition, m2.zero);
    if ty1 != ty2 {
        return None;
    }
    let phi1 = transport(&ty1, &map1, &m1.phi);
    let phi2 = transport(&ty2, &map2, &m2.phi);
    let f = crate::involutions::conjugating_automorphism(&phi1, &phi2, None)
        .expect("unbounded conjugator search cannot exhaust a budget")?;
    // t1-index -> abstract -> f -> abstract -> t2-index
    let n = map1.len();
    let mut inv1 = vec![0u64; n];
    for (abstract_idx, &table_idx) in map1.iter().enumerate() {
        inv1[table_idx] = abstract_idx as u64;
    }
    Some(
        (0..n)
            .map(|x| {
                let image = f.apply(&ty1.element_at(inv1[x]));
                map2[ty1.index_of(&image) as usize]
            })
            .collect(),
    )
}

/// Pulls the permutation `phi` on table indices back to a matrix on the
/// recognized abstract group: row r is the coordinate vector of
/// `phi(basis_r)`.
fn transport(ty: &crate::abelian::AbelianGroupType, map: &[usize], phi: &[usize]) -> Endomorphism {
    let k = ty.rank();
    let n = map.len();
    let mut inv = vec![0u64; n];
    for (abstract_idx, &table_idx) in map.iter().enumerate() {
        inv[table_idx] = abstract_idx as u64;
    }
    let matrix: Vec<Vec<u64>> = (0..k)
        .map(|r| {
            let basis_index = ty.index_of(&basis_element(ty, r));
            let image_table = phi[map[basis_index as usize]];
            ty.element_at(inv[image_table]).coords().to_vec()
        })
        .collect();
    Endomorphism::new(ty.clone(), matrix)
        .expect("a transported automorphism satisfies the Hom constraints")
}

fn basis_element(ty: &crate::abelian::AbelianGroupType, r: usize) -> crate::abelian::GroupElement {
    let mut coords = vec![0u64; ty.rank()];
    coords[r] = 1;
    ty.element(coords).expect("unit coordinate vector")
}

/// Backtracking isomorphism search that assumes nothing about the tables:
/// images are assigned element by element, and every fully-mapped product
/// constraint `f(a*b) = f(a)*f(b)` is propagated immediately, forcing
/// images and pruning dead branches.
pub fn isomorphic_generic(t1: &CayleyTable, t2: &CayleyTable) -> Option<Vec<usize>> {
    if t1.order() != t2.order() {
        return None;
    }
    let n = t1.order();
    let mut state = GenericSearch {
        t1,
        t2,
        f: vec![usize::MAX; n],
        used: vec![false; n],
        assigned: Vec::with_capacity(n),
    };
    if state.dfs() {
        Some(state.f)
    } else {
        None
    }
}

struct GenericSearch<'a> {
    t1: &'a CayleyTable,
    t2: &'a CayleyTable,
    f: Vec<usize>,
    used: Vec<bool>,
    assigned: Vec<usize>,
}

impl GenericSearch<'_> {
    fn dfs(&mut self) -> bool {
        let n = self.t1.order();
        let Some(a) = (0..n).find(|&a| self.f[a] == usize::MAX) else {
            return true;
        };
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let mark = self.assigned.len();
            if self.assign(a, v) && self.propagate(mark) && self.dfs() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    fn assign(&mut self, a: usize, v: usize) -> bool {
        if self.f[a] != usize::MAX {
            return self.f[a] == v;
        }
        if self.used[v] {
            return false;
        }
        self.f[a] = v;
        self.used[v] = true;
        self.assigned.push(a);
        true
    }

    /// Processes assignments from `from` onward, deriving images of
    /// products against every assigned element (queue entries may grow as
    /// forcing cascades).
    fn propagate(&mut self, from: usize) -> bool {
        let mut next = from;
        while next < self.assigned.len() {
            let x = self.assigned[next];
            next += 1;
            for i in 0..self.assigned.len() {
                let y = self.assigned[i];
                for (p, q) in [(x, y), (y, x)] {
                    let c = self.t1.get(p, q);
                    let image = self.t2.get(self.f[p], self.f[q]);
                    if !self.assign(c, image) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.assigned.len() > mark {
            let a = self.assigned.pop().expect("assigned nonempty");
            self.used[self.f[a]] = false;
            self.f[a] = usize::MAX;
        }
    }
}
