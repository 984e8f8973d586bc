//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AbelianError {
    #[error("cyclic factor {0} is not a prime power")]
    InvalidFactor(u64),
    #[error("group order must be positive")]
    InvalidOrder,
    #[error("group order exceeds the supported limit")]
    OrderTooLarge,
    #[error("element has {got} coordinates, expected {expected}")]
    CoordinateMismatch { expected: usize, got: usize },
    #[error("coordinate {index} is {value}, must be below {modulus}")]
    CoordinateRange { index: usize, value: u64, modulus: u64 },
    #[error("cannot parse `{input}` as a group type: {detail}")]
    Parse { input: String, detail: String },
}

#[derive(Debug, Error)]
pub enum EndoError {
    #[error("matrix has {got} rows, group has {expected} factors")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("matrix row {row} has {got} entries, group has {expected} factors")]
    RowLengthMismatch { row: usize, expected: usize, got: usize },
    #[error(
        "entry ({row},{col}) = {value} does not define a homomorphism: \
         it must be divisible by {required} (mapping a factor of order {from} \
         into one of order {to})"
    )]
    NotHomomorphism { row: usize, col: usize, value: u64, required: u64, from: u64, to: u64 },
    #[error("entry ({row},{col}) = {value} is not reduced modulo {modulus}")]
    EntryRange { row: usize, col: usize, value: u64, modulus: u64 },
    #[error("map is not an automorphism")]
    NotAutomorphism,
    #[error("map is not an involution: composed with itself it moves element {witness}")]
    NotInvolution { witness: u64 },
    #[error("group mismatch: map on {map_group} applied in {context_group}")]
    GroupMismatch { map_group: String, context_group: String },
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table is empty")]
    Empty,
    #[error("table is {rows}x{cols}, must be square")]
    NotSquare { rows: usize, cols: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("entry ({row},{col}) = {value} is out of range for order {order}")]
    EntryRange { row: usize, col: usize, value: usize, order: usize },
    #[error("order {0} exceeds the supported limit {1}")]
    OrderTooLarge(usize, usize),
    #[error("cannot parse table text at line {line}: {detail}")]
    ParseText { line: usize, detail: String },
    #[error("table is not an AG-group: {0}")]
    NotAgGroup(Box<crate::laws::CheckReport>),
    #[error("table is not a quasigroup: {0}")]
    NotQuasigroup(Box<crate::laws::CheckReport>),
    #[error(
        "order {order} exceeds the limit {limit} for O(n^4) law checks; \
         raise the limit to force the scan"
    )]
    QuarticLimit { order: usize, limit: usize },
    #[error("invalid module data: {detail}")]
    BadModule { detail: String },
    #[error("the given subset is not a subalgebra (element {witness} escapes it)")]
    NotSubalgebra { witness: usize },
    #[error("congruence enumeration is limited to order {cap}; this table has order {order}")]
    CongruenceLimit { order: usize, cap: usize },
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(
        "order {order} is too large for direct enumeration (limit {max_order}; \
         raise the order limit to proceed)"
    )]
    OrderOutsideBudget { order: u64, max_order: u64 },
    #[error("order {order} is attempted only in stretch mode; enable it to proceed")]
    OrderNeedsStretch { order: u64 },
    #[error("search exceeded its node budget of {nodes}")]
    NodeBudgetExceeded { nodes: u64 },
    #[error("order {order} exceeds the brute-force cap of {cap}")]
    OrderAboveCap { order: usize, cap: usize },
    #[error("involution counts at this order exceed the 64-bit range")]
    CountOverflow,
}
