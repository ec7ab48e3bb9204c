//! Combiner: checks pseudo-shares against the `H²` table and recovers secrets.
//!
//! No operation here accepts a [`Share`](crate::Share); the combiner only ever
//! sees pseudo-shares and public values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::block::Block;
use crate::bulletin::Bulletin;
use crate::error::{Error, Result};
use crate::hashing::Hasher;
use crate::participant::{Rejection, Verdict};

/// Checks `submitted` against the published `H²` for `(participant, i, j)`.
pub fn verify_pseudo_share(
    hasher: &Hasher,
    bulletin: &Bulletin,
    participant: u32,
    secret_index: u32,
    set_position: u32,
    submitted: &[u8],
) -> Result<Verdict> {
    let entry = bulletin
        .verification_entry(participant, secret_index, set_position)
        .ok_or(Error::NoSuchEntry {
            participant,
            secret_index,
            set_position,
        })?;
    let expected_bits = hasher.q_bits();
    if submitted.len() * 8 != expected_bits {
        return Ok(Verdict::Reject(Rejection::WrongLength {
            expected_bits,
            actual_bits: submitted.len() * 8,
        }));
    }
    if hasher.hash(submitted) == entry.digest {
        Ok(Verdict::Accept)
    } else {
        Ok(Verdict::Reject(Rejection::Mismatch))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParticipantOutcome {
    Accepted,
    Rejected(Rejection),
    Missing,
}

impl fmt::Display for ParticipantOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticipantOutcome::Accepted => f.write_str("accept"),
            ParticipantOutcome::Rejected(r) => write!(f, "{}", Verdict::Reject(*r)),
            ParticipantOutcome::Missing => f.write_str("missing"),
        }
    }
}

/// Who kept a session from completing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailureReport {
    pub missing: BTreeSet<u32>,
    pub rejected: BTreeSet<u32>,
}

impl fmt::Display for FailureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |set: &BTreeSet<u32>| {
            set.iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "missing {{{}}}, rejected {{{}}}",
            list(&self.missing),
            list(&self.rejected)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionOutcome {
    pub verdicts: BTreeMap<u32, ParticipantOutcome>,
    pub secret: Option<Block>,
}

/// One reconstruction attempt for row `(i, j)`.
#[derive(Clone, Debug)]
pub struct ReconstructionSession {
    secret_index: u32,
    set_position: u32,
    members: Vec<u32>,
    submissions: BTreeMap<u32, Block>,
    outcome: Option<SessionOutcome>,
}

impl ReconstructionSession {
    pub fn open(bulletin: &Bulletin, secret_index: u32, set_position: u32) -> Result<Self> {
        let qset = bulletin
            .qualified_set(secret_index, set_position)
            .ok_or(Error::UnknownRow {
                secret_index,
                set_position,
            })?;
        Ok(ReconstructionSession {
            secret_index,
            set_position,
            members: qset.members.clone(),
            submissions: BTreeMap::new(),
            outcome: None,
        })
    }

    pub fn secret_index(&self) -> u32 {
        self.secret_index
    }

    pub fn set_position(&self) -> u32 {
        self.set_position
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    /// Records a member's pseudo-share. Non-members and repeat submissions are refused.
    pub fn submit(&mut self, participant: u32, value: Block) -> Result<()> {
        if self.members.binary_search(&participant).is_err() {
            return Err(Error::NotAuthorized {
                participant,
                secret_index: self.secret_index,
                set_position: self.set_position,
            });
        }
        if self.submissions.contains_key(&participant) {
            return Err(Error::Duplicate {
                what: "submission for participant",
                index: participant,
            });
        }
        self.submissions.insert(participant, value);
        self.outcome = None;
        Ok(())
    }

    pub fn submissions(&self) -> &BTreeMap<u32, Block> {
        &self.submissions
    }

    /// Populated by [`reconstruct`].
    pub fn outcome(&self) -> Option<&SessionOutcome> {
        self.outcome.as_ref()
    }
}

/// Verifies every submission and, only if all members submitted and all
/// verified, returns `S_ij XOR (XOR of the pseudo-shares)`.
pub fn reconstruct(
    hasher: &Hasher,
    bulletin: &Bulletin,
    session: &mut ReconstructionSession,
) -> Result<Block> {
    let (i, j) = (session.secret_index, session.set_position);
    let row = bulletin.public_share(i, j).ok_or(Error::UnknownRow {
        secret_index: i,
        set_position: j,
    })?;

    let mut verdicts = BTreeMap::new();
    let mut report = FailureReport::default();
    for &member in &session.members {
        let outcome = match session.submissions.get(&member) {
            None => {
                report.missing.insert(member);
                ParticipantOutcome::Missing
            }
            Some(value) => {
                match verify_pseudo_share(hasher, bulletin, member, i, j, value.as_bytes())? {
                    Verdict::Accept => ParticipantOutcome::Accepted,
                    Verdict::Reject(why) => {
                        report.rejected.insert(member);
                        ParticipantOutcome::Rejected(why)
                    }
                }
            }
        };
        verdicts.insert(member, outcome);
    }

    if !report.missing.is_empty() || !report.rejected.is_empty() {
        session.outcome = Some(SessionOutcome {
            verdicts,
            secret: None,
        });
        return Err(Error::ReconstructionFailed(report));
    }

    let mut secret = row.value.clone();
    for value in session.submissions.values() {
        secret.xor_assign(value)?;
    }
    session.outcome = Some(SessionOutcome {
        verdicts,
        secret: Some(secret.clone()),
    });
    Ok(secret)
}

/// `S_ij` XOR-folded with `values`, with no verification at all.
///
/// Used to simulate coalitions that submit whatever they have.
pub fn reconstruct_unchecked(
    bulletin: &Bulletin,
    secret_index: u32,
    set_position: u32,
    values: &[Block],
) -> Result<Block> {
    let row = bulletin
        .public_share(secret_index, set_position)
        .ok_or(Error::UnknownRow {
            secret_index,
            set_position,
        })?;
    let mut out = row.value.clone();
    for value in values {
        out.xor_assign(value)?;
    }
    Ok(out)
}
