//! The public bulletin: `S_ij` values, secret commitments `H(s_i)` and the
//! verification table `H²(x || i || j)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::block::{Block, Digest};
use crate::error::{Error, Result};
use crate::model::{
    check_roster, validate_access_structure, AccessStructure, Participant, QualifiedSet,
    SchemeParams, StructureViolations,
};

/// `S_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicShareValue {
    pub secret_index: u32,
    pub set_position: u32,
    pub value: Block,
}

/// `H(s_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecretCommitment {
    pub secret_index: u32,
    pub digest: Digest,
}

/// `H²(x_α || i || j)` for one member `α` of `A_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationEntry {
    pub participant: u32,
    pub secret_index: u32,
    pub set_position: u32,
    pub digest: Digest,
}

impl VerificationEntry {
    fn key(&self) -> (u32, u32, u32) {
        (self.secret_index, self.set_position, self.participant)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bulletin {
    pub params: SchemeParams,
    pub participants: Vec<Participant>,
    pub structures: Vec<AccessStructure>,
    pub public_shares: Vec<PublicShareValue>,
    pub commitments: Vec<SecretCommitment>,
    pub verification_table: Vec<VerificationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantViolation {
    Params(String),
    Structure {
        secret_index: u32,
        violations: StructureViolations,
    },
    StructureOrder,
    SecretCountExceeded {
        k: usize,
        k_max: u32,
    },
    Length {
        what: &'static str,
        secret_index: u32,
        expected: usize,
        actual: usize,
    },
    DuplicateRow {
        secret_index: u32,
        set_position: u32,
    },
    MissingRow {
        secret_index: u32,
        set_position: u32,
    },
    UnexpectedRow {
        secret_index: u32,
        set_position: u32,
    },
    DuplicateCommitment {
        secret_index: u32,
    },
    MissingCommitment {
        secret_index: u32,
    },
    UnexpectedCommitment {
        secret_index: u32,
    },
    DuplicateEntry {
        participant: u32,
        secret_index: u32,
        set_position: u32,
    },
    MissingEntry {
        participant: u32,
        secret_index: u32,
        set_position: u32,
    },
    UnexpectedEntry {
        participant: u32,
        secret_index: u32,
        set_position: u32,
    },
    OutOfOrder {
        table: &'static str,
    },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InvariantViolation::*;
        match self {
            Params(reason) => write!(f, "params: {reason}"),
            Structure {
                secret_index,
                violations,
            } => write!(f, "structure of secret {secret_index}: {violations}"),
            StructureOrder => write!(f, "structures must cover secrets 1..=k in order"),
            SecretCountExceeded { k, k_max } => {
                write!(f, "{k} secrets exceed capacity {k_max}")
            }
            Length {
                what,
                secret_index,
                expected,
                actual,
            } => write!(
                f,
                "length: {what} for secret {secret_index} has {actual} bits, expected {expected}"
            ),
            DuplicateRow {
                secret_index,
                set_position,
            } => write!(f, "duplicate row ({secret_index}, {set_position})"),
            MissingRow {
                secret_index,
                set_position,
            } => write!(f, "missing row ({secret_index}, {set_position})"),
            UnexpectedRow {
                secret_index,
                set_position,
            } => write!(f, "unexpected row ({secret_index}, {set_position})"),
            DuplicateCommitment { secret_index } => {
                write!(f, "duplicate commitment for secret {secret_index}")
            }
            MissingCommitment { secret_index } => {
                write!(f, "missing commitment for secret {secret_index}")
            }
            UnexpectedCommitment { secret_index } => {
                write!(f, "unexpected commitment for secret {secret_index}")
            }
            DuplicateEntry {
                participant,
                secret_index,
                set_position,
            } => write!(
                f,
                "duplicate verification entry ({participant}, {secret_index}, {set_position})"
            ),
            MissingEntry {
                participant,
                secret_index,
                set_position,
            } => write!(
                f,
                "missing verification entry ({participant}, {secret_index}, {set_position})"
            ),
            UnexpectedEntry {
                participant,
                secret_index,
                set_position,
            } => write!(
                f,
                "unexpected verification entry ({participant}, {secret_index}, {set_position})"
            ),
            OutOfOrder { table } => write!(f, "{table} not in canonical (i, j, participant) order"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InvariantReport(pub Vec<InvariantViolation>);

impl InvariantReport {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &InvariantViolation> {
        self.0.iter()
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, v) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Row-level comparison between two bulletin versions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BulletinDiff {
    pub added: Vec<(u32, u32)>,
    pub removed: Vec<(u32, u32)>,
    pub changed: Vec<(u32, u32)>,
    pub unchanged: Vec<(u32, u32)>,
    /// Verification entries `(participant, i, j)` no longer published.
    pub retired_entries: Vec<(u32, u32, u32)>,
}

impl Bulletin {
    pub fn version(&self) -> u64 {
        self.params.version()
    }

    /// Current number of secrets `k`.
    pub fn secret_count(&self) -> u32 {
        self.structures.len() as u32
    }

    pub fn structure(&self, secret_index: u32) -> Option<&AccessStructure> {
        let idx = secret_index.checked_sub(1)? as usize;
        self.structures
            .get(idx)
            .filter(|s| s.secret_index == secret_index)
    }

    pub fn qualified_set(&self, secret_index: u32, set_position: u32) -> Option<&QualifiedSet> {
        self.structure(secret_index)?.set(set_position)
    }

    pub fn public_share(&self, secret_index: u32, set_position: u32) -> Option<&PublicShareValue> {
        self.public_shares
            .binary_search_by_key(&(secret_index, set_position), |r| {
                (r.secret_index, r.set_position)
            })
            .ok()
            .map(|idx| &self.public_shares[idx])
    }

    pub fn commitment(&self, secret_index: u32) -> Option<&SecretCommitment> {
        self.commitments
            .binary_search_by_key(&secret_index, |c| c.secret_index)
            .ok()
            .map(|idx| &self.commitments[idx])
    }

    pub fn verification_entry(
        &self,
        participant: u32,
        secret_index: u32,
        set_position: u32,
    ) -> Option<&VerificationEntry> {
        self.verification_table
            .binary_search_by_key(
                &(secret_index, set_position, participant),
                VerificationEntry::key,
            )
            .ok()
            .map(|idx| &self.verification_table[idx])
    }

    /// Fails with the full list of violations if the bulletin is inconsistent.
    pub fn validate(&self) -> Result<()> {
        let report = self.check_invariants();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvariantViolation(report))
        }
    }

    pub fn check_invariants(&self) -> InvariantReport {
        use InvariantViolation::*;
        let mut found = Vec::new();
        let params = &self.params;
        let q = params.q() as usize;

        if let Err(err) = check_roster(params, &self.participants) {
            found.push(Params(err.to_string()));
        }
        if self.structures.len() > params.k_max() as usize {
            found.push(SecretCountExceeded {
                k: self.structures.len(),
                k_max: params.k_max(),
            });
        }
        if self
            .structures
            .iter()
            .enumerate()
            .any(|(pos, s)| s.secret_index != pos as u32 + 1)
        {
            found.push(StructureOrder);
        }
        for structure in &self.structures {
            if let Err(violations) = validate_access_structure(params, structure) {
                found.push(Structure {
                    secret_index: structure.secret_index,
                    violations,
                });
            }
        }

        // Keys every row should have, derived from the structures.
        let secrets: BTreeSet<u32> = self.structures.iter().map(|s| s.secret_index).collect();
        let mut rows = BTreeSet::new();
        let mut entries = BTreeSet::new();
        for structure in &self.structures {
            for set in &structure.qualified_sets {
                rows.insert((structure.secret_index, set.position));
                for &member in &set.members {
                    entries.insert((structure.secret_index, set.position, member));
                }
            }
        }

        if !is_strictly_sorted(
            self.public_shares
                .iter()
                .map(|r| (r.secret_index, r.set_position)),
        ) {
            found.push(OutOfOrder {
                table: "public_shares",
            });
        }
        let mut seen_rows = BTreeSet::new();
        for row in &self.public_shares {
            let key = (row.secret_index, row.set_position);
            if row.value.bit_len() != q {
                found.push(Length {
                    what: "S value",
                    secret_index: row.secret_index,
                    expected: q,
                    actual: row.value.bit_len(),
                });
            }
            if !seen_rows.insert(key) {
                found.push(DuplicateRow {
                    secret_index: key.0,
                    set_position: key.1,
                });
            } else if !rows.contains(&key) {
                found.push(UnexpectedRow {
                    secret_index: key.0,
                    set_position: key.1,
                });
            }
        }
        for &(i, j) in rows.difference(&seen_rows) {
            found.push(MissingRow {
                secret_index: i,
                set_position: j,
            });
        }

        if !is_strictly_sorted(self.commitments.iter().map(|c| c.secret_index)) {
            found.push(OutOfOrder {
                table: "commitments",
            });
        }
        let mut seen_commitments = BTreeSet::new();
        for c in &self.commitments {
            if c.digest.bit_len() != q {
                found.push(Length {
                    what: "commitment",
                    secret_index: c.secret_index,
                    expected: q,
                    actual: c.digest.bit_len(),
                });
            }
            if !seen_commitments.insert(c.secret_index) {
                found.push(DuplicateCommitment {
                    secret_index: c.secret_index,
                });
            } else if !secrets.contains(&c.secret_index) {
                found.push(UnexpectedCommitment {
                    secret_index: c.secret_index,
                });
            }
        }
        for &i in secrets.difference(&seen_commitments) {
            found.push(MissingCommitment { secret_index: i });
        }

        if !is_strictly_sorted(self.verification_table.iter().map(VerificationEntry::key)) {
            found.push(OutOfOrder {
                table: "verification_table",
            });
        }
        let mut seen_entries = BTreeSet::new();
        for e in &self.verification_table {
            let key = e.key();
            if e.digest.bit_len() != q {
                found.push(Length {
                    what: "verification digest",
                    secret_index: e.secret_index,
                    expected: q,
                    actual: e.digest.bit_len(),
                });
            }
            if !seen_entries.insert(key) {
                found.push(DuplicateEntry {
                    participant: key.2,
                    secret_index: key.0,
                    set_position: key.1,
                });
            } else if !entries.contains(&key) {
                found.push(UnexpectedEntry {
                    participant: key.2,
                    secret_index: key.0,
                    set_position: key.1,
                });
            }
        }
        for &(i, j, a) in entries.difference(&seen_entries) {
            found.push(MissingEntry {
                participant: a,
                secret_index: i,
                set_position: j,
            });
        }

        InvariantReport(found)
    }

    /// Compares the `S` rows and verification table of `self` (old) against `newer`.
    pub fn diff(&self, newer: &Bulletin) -> BulletinDiff {
        let mut diff = BulletinDiff::default();
        for row in &self.public_shares {
            let key = (row.secret_index, row.set_position);
            match newer.public_share(key.0, key.1) {
                None => diff.removed.push(key),
                Some(other) if other.value == row.value => diff.unchanged.push(key),
                Some(_) => diff.changed.push(key),
            }
        }
        for row in &newer.public_shares {
            if self
                .public_share(row.secret_index, row.set_position)
                .is_none()
            {
                diff.added.push((row.secret_index, row.set_position));
            }
        }
        for e in &self.verification_table {
            let still = newer
                .verification_entry(e.participant, e.secret_index, e.set_position)
                .is_some_and(|n| n.digest == e.digest);
            if !still {
                diff.retired_entries
                    .push((e.participant, e.secret_index, e.set_position));
            }
        }
        diff
    }
}

fn is_strictly_sorted<K: Ord>(mut keys: impl Iterator<Item = K>) -> bool {
    let Some(mut prev) = keys.next() else {
        return true;
    };
    for key in keys {
        if key <= prev {
            return false;
        }
        prev = key;
    }
    true
}
