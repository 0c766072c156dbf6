//! Square-free primitive root toolkit.
//!
//! Everything revolves around g□(p), the least square-free primitive root of a
//! prime p. The crate provides:
//!
//! * exact integer machinery: deterministic primality, budgeted factorization,
//!   square-free/square-full predicates and sieves ([`nt`]);
//! * Dirichlet character tables mod p and the character-sum indicators for
//!   "primitive root" and "e-free" ([`charsum`]);
//! * exact counts and least-element searches ([`counting`]);
//! * certified evaluation of the explicit existence bounds with directed
//!   rounding, worst-case sieve configurations, and threshold solving
//!   ([`bounds`], [`rfloat`]);
//! * the case-analysis driver that assembles scans, bound certificates and the
//!   window enumeration into a machine-checkable report that g□(p) < p^alpha
//!   for every prime p ([`proof`]);
//! * resumable, deterministic range scans ([`scan`]) and the report
//!   serialization they share ([`report`]).
//!
//! With the default `parallel` feature the scans and the window enumeration
//! fan out over rayon; results are merged in chunk order, so reports are
//! byte-identical for any `jobs` setting. Building with
//! `--no-default-features` gives a dependency-light sequential core with the
//! same outputs.

pub mod bounds;
pub mod charsum;
pub mod counting;
pub mod nt;
pub mod proof;
pub mod report;
pub mod rfloat;
pub mod scan;

pub use nt::{FactoredInt, NtError, PrimeContext};
pub use rfloat::{Bracket, Rf, Round};
