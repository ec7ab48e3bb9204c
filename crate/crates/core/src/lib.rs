//! Renewable, multi-use multi-secret sharing for general access structures.
//!
//! Each participant holds one random `q`-bit share `x`. For every secret `s_i`
//! and each of its qualified sets `A_ij`, the dealer publishes
//!
//! ```text
//! S_ij = s_i XOR (XOR over members a of H(x_a || i || j))
//! ```
//!
//! together with `H(s_i)` and `H(H(x_a || i || j))` for every member. To
//! recover `s_i`, the members of `A_ij` hand their pseudo-shares
//! `H(x_a || i || j)` to a combiner, which checks each one against the
//! published double hash and XORs them into `S_ij`. Because the pseudo-share
//! is bound to `(i, j)`, a submission for one row is useless for any other.
//!
//! ```
//! use msss_core::*;
//! use rand::SeedableRng;
//!
//! let params = SchemeParams::new(128, 3, 2, 2, DEFAULT_HASH_ID)?;
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
//! let shares = issue_shares(&params, &mut rng)?;
//! let dealer = Hasher::new(&params, Role::Dealer)?;
//!
//! let secret = Secret::new(&params, 1, Block::from_bytes(*b"sixteen byte key"))?;
//! let structure = AccessStructure::new(1, vec![vec![1, 2], vec![2, 3]]);
//! let roster = Participant::default_roster(3);
//! let bulletin = build_bulletin(&dealer, &params, &roster, &[secret.clone()], &[structure], &shares)?;
//!
//! let participant = dealer.for_role(Role::Participant);
//! let combiner = dealer.for_role(Role::Combiner);
//! let mut session = ReconstructionSession::open(&bulletin, 1, 2)?;
//! for share in &shares[1..] {
//!     let pseudo = derive_pseudo_share(&participant, share, 1, 2, &bulletin)?;
//!     session.submit(pseudo.participant, pseudo.value)?;
//! }
//! let recovered = reconstruct(&combiner, &bulletin, &mut session)?;
//! assert_eq!(recovered, secret.value);
//! assert!(verify_secret(&participant, recovered.as_bytes(), bulletin.commitment(1).unwrap()).is_accept());
//! # Ok::<(), msss_core::Error>(())
//! ```

pub mod block;
pub mod bulletin;
pub mod cli;

pub mod combiner;
pub mod dealer;
pub mod error;
pub mod hashing;
pub mod model;
pub mod participant;
pub mod store;
pub mod testkit;

pub use block::{Block, Digest};
pub use bulletin::{
    Bulletin, BulletinDiff, InvariantReport, InvariantViolation, PublicShareValue,
    SecretCommitment, VerificationEntry,
};
pub use combiner::{
    reconstruct, reconstruct_unchecked, verify_pseudo_share, FailureReport, ParticipantOutcome,
    ReconstructionSession, SessionOutcome,
};
pub use dealer::{
    add_secret, build_bulletin, compute_public_share, import_share, issue_shares,
    replace_access_structure, secret_rows, DealerState, SecretRows,
};
pub use error::{Error, Result};
pub use hashing::{HashAlgorithm, HashCounter, HashTally, Hasher, PseudoShare, Role};
pub use model::{
    validate_access_structure, AccessStructure, Participant, QualifiedSet, SchemeParams, Secret,
    Share, StructureViolations, Violation, DEFAULT_HASH_ID,
};
pub use participant::{derive_pseudo_share, verify_secret, Rejection, Verdict};
