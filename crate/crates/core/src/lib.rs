//! Self-dual CSS codes, compatible symplectic bases and transversal
//! Clifford layers.
//!
//! Qubit and logical indices are zero-based throughout the API. Bit `i` of a
//! vector is the qubit labelled `i + 1` in one-based notation.

pub mod gf2;
pub mod pauli;
pub mod basis;
pub mod code;
pub mod phase;
pub mod concat;
pub mod ftqc;
pub mod formats;
