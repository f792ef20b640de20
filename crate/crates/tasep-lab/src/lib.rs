//! Exact laboratory for a totally asymmetric exclusion process with open
//! boundaries and for its two-row companion chains.
//!
//! The crate enumerates the configuration spaces, implements the wall-indexed
//! transition maps and their inverses, evaluates the stationary weights,
//! builds exact transition matrices and solves them in rational arithmetic,
//! simulates the chains with a reproducible RNG, decomposes configurations
//! into excursion/walk pairs, and bundles all structural checks into a
//! verification suite with a command line front end.
//!
//! Conventions used throughout:
//!
//! - a configuration of size `n` has cells `1..=n`; open boundaries have
//!   walls `0..=n` with wall `i` sitting between cells `i` and `i+1`
//!   (wall `0` is the left border, wall `n` the right border);
//! - periodic configurations have walls `0..n`, wall `0` between cells `n`
//!   and `1`;
//! - serialized form is `TOP/BOTTOM` with `B`, `W`, `X` cells, suffixed with
//!   `@open3` or `@periodic` for the extended boundaries.

pub mod chain;
pub mod config;
pub mod enumerate;
pub mod excursion;
pub mod kernel;
pub mod verify;
pub mod weight;
