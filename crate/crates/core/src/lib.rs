//! Abel-Grassmann groups via linear representations.
//!
//! An AG-group is a groupoid satisfying the left invertive law
//! `(a*b)*c = (c*b)*a`, possessing a left identity and two-sided inverses.
//! Every AG-group arises from a finite abelian group `(G, +)` together with
//! an automorphism `phi` satisfying `phi(phi(x)) = x`, via `a*b = phi(a) + b`,
//! and two such pairs give isomorphic AG-groups exactly when the
//! automorphisms are conjugate in `Aut(G)`.
//!
//! The crate builds both sides of that correspondence:
//!
//! * [`abelian`], [`endo`]: finite abelian groups in primary decomposition
//!   and their endomorphism matrices;
//! * [`involutions`]: search and conjugacy classification of involutory
//!   automorphisms;
//! * [`table`], [`laws`]: Cayley tables, the identity checkers (left
//!   invertive, medial, paramedial, quasigroup, ...), and the groupoid <->
//!   module conversions in both directions;
//! * [`iso`], [`subcong`]: isomorphism testing, subalgebras, congruences;
//! * [`enumeration`]: counting AG-groups of each order up to isomorphism;
//! * [`bruteforce`]: independent search over raw Cayley tables, used to
//!   cross-check the representation-based enumeration.

pub mod abelian;
pub mod bruteforce;
pub mod endo;
pub mod enumeration;
pub mod error;
pub mod intmat;
pub mod involutions;
pub mod iso;
pub mod laws;
pub mod subcong;
pub mod table;

pub use abelian::{groups_of_order, AbelianGroupType, GroupElement};
pub use bruteforce::{find_all, verify_representation, SearchOptions, SearchStats};
pub use endo::Endomorphism;
pub use enumeration::{
    count, count_prime_power, odd_p_fastpath, reference_regression, EnumerationResult,
    GroupCount, RegressionMethod, RegressionRow,
};
pub use error::{AbelianError, EndoError, SearchError, TableError};
pub use involutions::{
    classify_involutions, classify_involutions_with, conjugating_automorphism,
    for_each_involutory_automorphism, involutory_automorphisms, Budget, ClassificationMethod,
    ClassifyOptions, ConjugacyFingerprint, InvolutionClass, InvolutionClassification,
};
pub use iso::{is_isomorphism, isomorphic, isomorphic_generic};
pub use laws::{check, check_all, check_all_with, check_with, CheckLimits, CheckReport, Law, Witness};
pub use subcong::{congruence_from_subalgebra, congruences, is_protic_normal, subalgebras};
pub use table::{
    construct, divisions, from_module, to_module, AgRepresentation, CayleyTable, ModuleData,
};
