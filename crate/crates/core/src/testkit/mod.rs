//! Reference implementations and adversary simulations used to check the
//! main code paths at desk scale.
//!
//! [`oracle_bulletin`] recomputes a bulletin straight from the definition of
//! `S_ij` with its own bit packing and XOR, sharing only the hash primitive
//! with the dealer, so a bug has to be made twice in the same way to go
//! unnoticed.

mod fuzz;
mod instance;
mod oracle;
mod scan;

pub use fuzz::{honest_pseudo_shares, tamper_fuzz, Corruption, TamperReport};
pub use instance::{random_instance, Instance, InstanceShape};
pub use oracle::{expected_dealer_hashes, oracle_bulletin, oracle_encode};
pub use scan::{
    exhaustive_forbidden_scan, Counterexample, ForbiddenScanReport, MAX_SCAN_PARTICIPANTS,
};
