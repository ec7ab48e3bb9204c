//! Participant-side operations.

use std::fmt;

use crate::bulletin::{Bulletin, SecretCommitment};
use crate::error::{Error, Result};
use crate::hashing::{Hasher, PseudoShare};
use crate::model::Share;

/// Outcome of a hash check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// The hash of the value does not match the published digest.
    Mismatch,
    WrongLength {
        expected_bits: usize,
        actual_bits: usize,
    },
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Reject(Rejection::Mismatch) => f.write_str("reject: hash mismatch"),
            Verdict::Reject(Rejection::WrongLength {
                expected_bits,
                actual_bits,
            }) => write!(
                f,
                "reject: length {actual_bits} bits, expected {expected_bits}"
            ),
        }
    }
}

/// Computes `H(x || i || j)` for a row the share's owner belongs to.
///
/// Refuses rows the participant is not a member of, even though the value
/// could be computed.
pub fn derive_pseudo_share(
    hasher: &Hasher,
    share: &Share,
    secret_index: u32,
    set_position: u32,
    bulletin: &Bulletin,
) -> Result<PseudoShare> {
    let qset = bulletin
        .qualified_set(secret_index, set_position)
        .ok_or(Error::UnknownRow {
            secret_index,
            set_position,
        })?;
    if !qset.contains(share.participant) {
        return Err(Error::NotAuthorized {
            participant: share.participant,
            secret_index,
            set_position,
        });
    }
    hasher.pseudo_share(share, secret_index, set_position)
}

/// Checks a returned secret against the published `H(s_i)`.
pub fn verify_secret(hasher: &Hasher, candidate: &[u8], commitment: &SecretCommitment) -> Verdict {
    let expected_bits = hasher.q_bits();
    if candidate.len() * 8 != expected_bits {
        return Verdict::Reject(Rejection::WrongLength {
            expected_bits,
            actual_bits: candidate.len() * 8,
        });
    }
    if hasher.hash(candidate) == commitment.digest {
        Verdict::Accept
    } else {
        Verdict::Reject(Rejection::Mismatch)
    }
}
