//! Toolkit for codes over adversarial wiretap channels.
//!
//! The pipeline composes three layers: an algebraic manipulation detection
//! code ([`amd`]), a subspace-evasive set ([`evasive`]), and a folded
//! Reed-Solomon code with linear-algebraic list decoding ([`frs`]).  The
//! [`awtp`] module wires them together into an encoder/decoder pair that
//! keeps a message private from an adversary reading a bounded fraction of
//! codeword components while correcting a bounded fraction of additive
//! corruptions.  [`channel`] simulates such an adversary and audits secrecy
//! exactly; [`smt`] wraps the code as a one-round secure message
//! transmission protocol over N wires.

pub mod amd;
pub mod awtp;
pub mod channel;
pub mod evasive;
pub mod fields;
pub mod frs;
pub mod linalg;
pub mod report;
pub mod smt;
