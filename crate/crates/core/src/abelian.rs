//! Finite abelian groups in primary decomposition.
//!
//! A group type is a multiset of prime-power cyclic orders, kept in a fixed
//! canonical shape (primes ascending, exponents descending within a prime),
//! so equal types compare equal as values. Elements are coordinate tuples,
//! one residue per cyclic factor, and element index 0 is always the zero
//! element (coordinates are ordered lexicographically).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AbelianError;

/// Largest group order the library will materialize. Enumeration targets are
/// far below this; the bound is checked, not assumed.
pub const MAX_ORDER: u64 = 1 << 20;

/// Isomorphism type of a finite abelian group: a list of prime-power cyclic
/// factors, grouped by prime (ascending), exponents descending within each
/// prime. `Z1` is the empty list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AbelianGroupType {
    factors: Vec<u64>,
}

impl AbelianGroupType {
    /// Builds a type from cyclic factor sizes, canonicalizing the order.
    /// Factors equal to 1 are dropped; every remaining factor must be a
    /// prime power.
    pub fn new(factors: &[u64]) -> Result<Self, AbelianError> {
        let mut parts: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for &f in factors {
            if f == 0 {
                return Err(AbelianError::InvalidFactor(f));
            }
            if f == 1 {
                continue;
            }
            let (p, a) = prime_power_split(f).ok_or(AbelianError::InvalidFactor(f))?;
            parts.push((p, a));
        }
        // primes ascending, exponents descending within a prime
        parts.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        let factors: Vec<u64> = parts.iter().map(|&(p, a)| p.pow(a)).collect();
        let mut order: u64 = 1;
        for &f in &factors {
            order = order
                .checked_mul(f)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or(AbelianError::OrderTooLarge)?;
        }
        Ok(Self { factors })
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        Self { factors: Vec::new() }
    }

    /// Cyclic group of order `n` (must be a prime power or 1 here; composite
    /// cyclic groups are spelled out by their primary parts via [`Self::new`]).
    pub fn cyclic(n: u64) -> Result<Self, AbelianError> {
        if n == 1 {
            return Ok(Self::trivial());
        }
        Self::new(&[n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// The primes dividing the order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|&f| smallest_prime_factor(f)).collect();
        ps.dedup();
        ps
    }

    /// Splits into primary components, one type per prime, primes ascending.
    pub fn primary_components(&self) -> Vec<AbelianGroupType> {
        let mut out: Vec<AbelianGroupType> = Vec::new();
        for &f in &self.factors {
            let p = smallest_prime_factor(f);
            match out.last_mut() {
                Some(last) if smallest_prime_factor(last.factors[0]) == p => {
                    last.factors.push(f)
                }
                _ => out.push(AbelianGroupType { factors: vec![f] }),
            }
        }
        out
    }

    /// Direct sum, re-canonicalized.
    pub fn direct_sum(&self, other: &AbelianGroupType) -> AbelianGroupType {
        let mut fs = self.factors.clone();
        fs.extend_from_slice(&other.factors);
        AbelianGroupType::new(&fs).expect("sum of valid types is valid")
    }

    /// True if every factor is a power of the same single prime.
    pub fn is_primary(&self) -> bool {
        self.primes().len() <= 1
    }

    /// Invariant-factor form (d_1 | d_2 | ... | d_k, largest last), for
    /// display only; the primary form stays canonical.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let comps = self.primary_components();
        let depth = comps.iter().map(|c| c.factors.len()).max().unwrap_or(0);
        let mut inv = vec![1u64; depth];
        for c in &comps {
            for (i, &f) in c.factors.iter().enumerate() {
                inv[i] *= f;
            }
        }
        inv.reverse();
        inv
    }

    /// Zero element.
    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.factors.len()] }
    }

    /// Componentwise sum mod each factor. Panics on a coordinate-length
    /// mismatch: elements must belong to this type.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.check_element(a);
        self.check_element(b);
        let coords = self
            .factors
            .iter()
            .zip(a.coords.iter().zip(&b.coords))
            .map(|(&q, (&x, &y))| (x + y) % q)
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.check_element(a);
        let coords = self
            .factors
            .iter()
            .zip(&a.coords)
            .map(|(&q, &x)| if x == 0 { 0 } else { q - x })
            .collect();
        GroupElement { coords }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// Integer multiple `m * a`.
    pub fn scale(&self, m: u64, a: &GroupElement) -> GroupElement {
        self.check_element(a);
        let coords = self
            .factors
            .iter()
            .zip(&a.coords)
            .map(|(&q, &x)| (x % q * (m % q)) % q)
            .collect();
        GroupElement { coords }
    }

    /// Order of `a` as a group element.
    pub fn element_order(&self, a: &GroupElement) -> u64 {
        self.check_element(a);
        self.factors
            .iter()
            .zip(&a.coords)
            .map(|(&q, &x)| q / gcd(q, x))
            .fold(1, lcm)
    }

    /// Element at lexicographic index `i` (coords[0] most significant).
    pub fn element_at(&self, i: u64) -> GroupElement {
        debug_assert!(i < self.order());
        let mut coords = vec![0u64; self.factors.len()];
        let mut rest = i;
        for j in (0..self.factors.len()).rev() {
            coords[j] = rest % self.factors[j];
            rest /= self.factors[j];
        }
        GroupElement { coords }
    }

    /// Lexicographic index of `a`; the zero element has index 0.
    pub fn index_of(&self, a: &GroupElement) -> u64 {
        self.check_element(a);
        let mut i = 0u64;
        for (j, &q) in self.factors.iter().enumerate() {
            i = i * q + a.coords[j];
        }
        i
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    /// Validates externally supplied coordinates.
    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement, AbelianError> {
        if coords.len() != self.factors.len() {
            return Err(AbelianError::CoordinateMismatch {
                expected: self.factors.len(),
                got: coords.len(),
            });
        }
        for (j, (&c, &q)) in coords.iter().zip(&self.factors).enumerate() {
            if c >= q {
                return Err(AbelianError::CoordinateRange { index: j, value: c, modulus: q });
            }
        }
        Ok(GroupElement { coords })
    }

    fn check_element(&self, a: &GroupElement) {
        assert_eq!(
            a.coords.len(),
            self.factors.len(),
            "element has {} coordinates, type {} needs {}",
            a.coords.len(),
            self,
            self.factors.len()
        );
    }
}

impl fmt::Display for AbelianGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.factors.len() {
            let v = self.factors[i];
            let mut run = 1;
            while i + run < self.factors.len() && self.factors[i + run] == v {
                run += 1;
            }
            if !first {
                write!(f, "x")?;
            }
            first = false;
            if run == 1 {
                write!(f, "Z{v}")?;
            } else {
                write!(f, "Z{v}^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl fmt::Debug for AbelianGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for AbelianGroupType {
    type Err = AbelianError;

    /// Parses the `Z4xZ2^3` grammar: factors joined by `x`, `^` for repeated
    /// factors. Case-insensitive and whitespace-tolerant.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(AbelianError::Parse { input: s.to_string(), detail: "empty".into() });
        }
        let mut factors = Vec::new();
        for token in compact.split(['x', 'X']) {
            let token = token.strip_prefix(['z', 'Z']).ok_or_else(|| AbelianError::Parse {
                input: s.to_string(),
                detail: format!("factor `{token}` does not start with Z"),
            })?;
            let (base, reps) = match token.split_once('^') {
                Some((b, r)) => {
                    let reps: u32 = r.parse().map_err(|_| AbelianError::Parse {
                        input: s.to_string(),
                        detail: format!("bad repeat count `{r}`"),
                    })?;
                    (b, reps)
                }
                None => (token, 1),
            };
            let base: u64 = base.parse().map_err(|_| AbelianError::Parse {
                input: s.to_string(),
                detail: format!("bad factor size `Z{base}`"),
            })?;
            if reps == 0 {
                return Err(AbelianError::Parse {
                    input: s.to_string(),
                    detail: "repeat count 0".into(),
                });
            }
            for _ in 0..reps {
                factors.push(base);
            }
        }
        AbelianGroupType::new(&factors).map_err(|e| AbelianError::Parse {
            input: s.to_string(),
            detail: e.to_string(),
        })
    }
}

impl TryFrom<String> for AbelianGroupType {
    type Error = AbelianError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AbelianGroupType> for String {
    fn from(t: AbelianGroupType) -> String {
        t.to_string()
    }
}

/// Element of a finite abelian group: one residue per cyclic factor of its
/// owning type. Ops live on [`AbelianGroupType`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub(crate) fn from_coords_unchecked(coords: Vec<u64>) -> Self {
        Self { coords }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// One representative per isomorphism type of abelian group of order `n`,
/// in a deterministic canonical order (for each prime ascending, partitions
/// of its exponent in descending lexicographic order, later primes varying
/// fastest).
pub fn groups_of_order(n: u64) -> Result<Vec<AbelianGroupType>, AbelianError> {
    if n == 0 {
        return Err(AbelianError::InvalidOrder);
    }
    if n > MAX_ORDER {
        return Err(AbelianError::OrderTooLarge);
    }
    let mut result = vec![Vec::<u64>::new()];
    for (p, d) in factorize(n) {
        let parts = partitions(d);
        let mut next = Vec::with_capacity(result.len() * parts.len());
        for prefix in &result {
            for part in &parts {
                let mut fs = prefix.clone();
                fs.extend(part.iter().map(|&a| p.pow(a)));
                next.push(fs);
            }
        }
        result = next;
    }
    result
        .into_iter()
        .map(|fs| AbelianGroupType::new(&fs))
        .collect()
}

/// Integer partitions of `d` in descending lexicographic order, each
/// partition's parts descending: 3 -> [3], [2,1], [1,1,1].
pub fn partitions(d: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Number of integer partitions of `d`.
pub fn partition_count(d: u32) -> u64 {
    // Euler's pentagonal recurrence
    let n = d as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for i in 1..=n {
        let mut sum: i128 = 0;
        let mut k: i64 = 1;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > i {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            sum += sign * p[i - g1] as i128;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= i {
                sum += sign * p[i - g2] as i128;
            }
            k += 1;
        }
        p[i] = sum as u64;
    }
    p[n]
}

/// Prime factorization of `n` as (prime, exponent) pairs, primes ascending.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Returns (p, a) if `n` = p^a for a prime p and a >= 1.
pub fn prime_power_split(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let fs = factorize(n);
    if fs.len() == 1 {
        Some(fs[0])
    } else {
        None
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    factorize(n)[0].0
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Multiplicative inverse of `a` modulo `m`, when gcd(a, m) = 1.
pub(crate) fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}
