//! Decision procedure for the semilinear home-space problem of Petri nets.
//!
//! A set `H` is a home-space for `X` when every configuration reachable from
//! `X` can still reach `H`. The pipeline decides this by building, for each
//! linear component `H_i` of `H`, a semilinear set `W_i` of configurations
//! that cannot reach `H_i` and from which every "stuck" configuration is
//! reachable, and then asking a single reachability question on a product
//! net that freezes a chain `x ->* x_1 ->* ... ->* x_m` with `x_i` in `W_i`.
//!
//! Reachability itself is answered by a three-valued oracle ([`reach`]):
//! every definite answer is sound, and budget exhaustion is reported as
//! `Unknown` instead of guessed.

pub mod format;
pub mod homespace;
pub mod net;
pub mod reach;
pub mod semilinear;
pub mod vj;
pub mod witness;

pub use format::{format_net, format_semilinear, parse_net, parse_semilinear, ParseError};
pub use net::{Action, Configuration, FireError, NetError, PetriNet, Trace};
pub use reach::{Budget, ReachQuery, ReachVerdict};
pub use semilinear::{LinearSet, MinBasis, PartialVector, SemilinearSet, SetError, Slot};
pub use homespace::{check, CheckReport, HomeSpaceQuery, HomeSpaceVerdict};
pub use witness::{witness_linear, witness_singleton, WitnessError, WitnessResult};
