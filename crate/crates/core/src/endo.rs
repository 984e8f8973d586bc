//! Endomorphisms of finite abelian groups as integer matrices.
//!
//! A map is stored as a `k x k` matrix over the generators: row `i` holds
//! the coordinates of the image of the `i`-th generator, so application is
//! the row-vector product `x -> x * M` with column `j` reduced modulo the
//! `j`-th cyclic order. A matrix defines a homomorphism exactly when entry
//! `(i, j)` is divisible by `q_j / gcd(q_i, q_j)` — the image of an element
//! of order `q_i` must have order dividing `q_i`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{gcd, AbelianGroupType, GroupElement};
use crate::error::EndoError;

/// A homomorphism from a finite abelian group to itself, validated on
/// construction.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "EndoWire", into = "EndoWire")]
pub struct Endomorphism {
    group: AbelianGroupType,
    matrix: Vec<Vec<u64>>,
}

/// Wire shape: `{"group": "Z4xZ2", "matrix": [[2,0],[0,1]]}`.
#[derive(Serialize, Deserialize)]
struct EndoWire {
    group: String,
    matrix: Vec<Vec<u64>>,
}

impl TryFrom<EndoWire> for Endomorphism {
    type Error = String;
    fn try_from(w: EndoWire) -> Result<Self, Self::Error> {
        let group: AbelianGroupType = w.group.parse().map_err(|e| format!("{e}"))?;
        Endomorphism::new(group, w.matrix).map_err(|e| format!("{e}"))
    }
}

impl From<Endomorphism> for EndoWire {
    fn from(e: Endomorphism) -> Self {
        EndoWire { group: e.group.to_string(), matrix: e.matrix }
    }
}

impl Endomorphism {
    /// Validates shape, entry ranges and the divisibility conditions that
    /// make the matrix a homomorphism.
    pub fn new(group: AbelianGroupType, matrix: Vec<Vec<u64>>) -> Result<Self, EndoError> {
        let k = group.rank();
        let q = group.factors();
        if matrix.len() != k {
            return Err(EndoError::RowCountMismatch { expected: k, got: matrix.len() });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != k {
                return Err(EndoError::RowLengthMismatch {
                    row: i,
                    expected: k,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= q[j] {
                    return Err(EndoError::EntryRange { row: i, col: j, value: v, modulus: q[j] });
                }
                let required = q[j] / gcd(q[i], q[j]);
                if v % required != 0 {
                    return Err(EndoError::NotHomomorphism {
                        row: i,
                        col: j,
                        value: v,
                        required,
                        from: q[i],
                        to: q[j],
                    });
                }
            }
        }
        Ok(Self { group, matrix })
    }

    /// Constructor for matrices produced internally, where validity is a
    /// structural consequence (e.g. products of valid matrices).
    pub(crate) fn from_valid(group: AbelianGroupType, matrix: Vec<Vec<u64>>) -> Self {
        debug_assert!(Self::new(group.clone(), matrix.clone()).is_ok());
        Self { group, matrix }
    }

    pub fn identity(group: AbelianGroupType) -> Self {
        let k = group.rank();
        let matrix = (0..k)
            .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
            .collect();
        Self { group, matrix }
    }

    pub fn zero(group: AbelianGroupType) -> Self {
        let k = group.rank();
        Self { group, matrix: vec![vec![0; k]; k] }
    }

    /// Negation map `x -> -x`; entry `(i, i)` is `q_i - 1`.
    pub fn negation(group: AbelianGroupType) -> Self {
        let k = group.rank();
        let matrix = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { group.factors()[i] - 1 } else { 0 })
                    .collect()
            })
            .collect();
        Self { group, matrix }
    }

    pub fn group(&self) -> &AbelianGroupType {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let q = self.group.factors();
        let k = q.len();
        assert_eq!(x.coords().len(), k, "element does not belong to {}", self.group);
        let coords = (0..k)
            .map(|j| {
                let mut acc = 0u64;
                for i in 0..k {
                    acc = (acc + x.coords()[i] % q[j] * self.matrix[i][j]) % q[j];
                }
                acc
            })
            .collect();
        GroupElement::from_coords_unchecked(coords)
    }

    /// `self` after `other`: the map `x -> self(other(x))`. In matrix terms
    /// (row convention) the product `other.matrix * self.matrix`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        assert_eq!(self.group, other.group, "cannot compose maps on different groups");
        let q = self.group.factors();
        let k = q.len();
        let matrix: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let mut acc = 0u64;
                        for l in 0..k {
                            acc = (acc + other.matrix[i][l] % q[j] * self.matrix[l][j]) % q[j];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Endomorphism::from_valid(self.group.clone(), matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == u64::from(i == j)))
    }

    /// True when the map is bijective. An endomorphism of a finite abelian
    /// group is an automorphism iff its reduction modulo each prime dividing
    /// the order is invertible, which is a per-prime-block rank computation.
    pub fn is_automorphism(&self) -> bool {
        let q = self.group.factors();
        for p in self.group.primes() {
            let idx: Vec<usize> = (0..q.len()).filter(|&i| q[i] % p == 0).collect();
            let mut block: Vec<Vec<u64>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.matrix[i][j] % p).collect())
                .collect();
            if rank_mod_p(&mut block, p) < idx.len() {
                return false;
            }
        }
        true
    }

    /// True when applying the map twice fixes every generator.
    pub fn is_involution(&self) -> bool {
        self.compose(self).is_identity()
    }

    /// Validated involutory automorphism check, with a witness generator on
    /// failure.
    pub fn require_involutory_automorphism(&self) -> Result<(), EndoError> {
        if !self.is_automorphism() {
            return Err(EndoError::NotAutomorphism);
        }
        let twice = self.compose(self);
        let k = self.group.rank();
        for i in 0..k {
            if (0..k).any(|j| twice.matrix[i][j] != u64::from(i == j)) {
                return Err(EndoError::NotInvolution { witness: i as u64 });
            }
        }
        Ok(())
    }

    /// Inverse of an automorphism, by power iteration: some power of the map
    /// is the identity, and the one before it is the inverse.
    pub fn inverse(&self) -> Option<Endomorphism> {
        if !self.is_automorphism() {
            return None;
        }
        let mut prev = self.clone();
        let mut cur = self.compose(self);
        while !cur.is_identity() {
            prev = cur.clone();
            cur = self.compose(&cur);
        }
        Some(prev)
    }

    /// `f . self . f^-1` for an automorphism `f`.
    pub fn conjugate_by(&self, f: &Endomorphism) -> Option<Endomorphism> {
        let f_inv = f.inverse()?;
        Some(f.compose(self).compose(&f_inv))
    }

    /// Uniform-ish random automorphism by rejection sampling over valid
    /// homomorphism matrices. The acceptance rate is bounded below by a
    /// constant for each group, so this terminates quickly.
    pub fn random_automorphism<R: Rng>(group: &AbelianGroupType, rng: &mut R) -> Endomorphism {
        let q = group.factors();
        let k = q.len();
        loop {
            let matrix: Vec<Vec<u64>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            let step = q[j] / gcd(q[i], q[j]);
                            let choices = q[j] / step;
                            rng.gen_range(0..choices) * step
                        })
                        .collect()
                })
                .collect();
            let endo = Endomorphism { group: group.clone(), matrix };
            if endo.is_automorphism() {
                return endo;
            }
        }
    }
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.group, self.matrix)
    }
}

/// Row rank of a matrix over F_p, destroying the input.
pub(crate) fn rank_mod_p(m: &mut [Vec<u64>], p: u64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&i| m[i][c] % p != 0) else { continue };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][c] % p, p);
        for j in c..cols {
            m[rank][j] = m[rank][j] % p * inv % p;
        }
        for i in 0..rows {
            if i != rank && m[i][c] % p != 0 {
                let f = m[i][c] % p;
                for j in c..cols {
                    m[i][j] = (m[i][j] + (p - f) * m[rank][j]) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Multiplicative inverse mod a prime, by Fermat.
pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}
