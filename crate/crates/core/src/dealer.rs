//! Trusted-dealer operations. The dealer issues shares, then computes and renews the bulletin.
//!
//! All functions take a [`Hasher`] and charge their hash invocations to it;
//! callers normally pass one configured with [`Role::Dealer`](crate::Role::Dealer).
//! For one secret the dealer spends `2 * sum_j |A_ij| + 1` invocations: one
//! pseudo-share and one `H²` per membership, plus `H(s_i)`.

use rand::{CryptoRng, RngCore};

use crate::block::Block;
use crate::bulletin::{Bulletin, PublicShareValue, SecretCommitment, VerificationEntry};
use crate::error::{Error, Result};
use crate::hashing::Hasher;
use crate::model::{
    check_roster, validate_access_structure, AccessStructure, Participant, QualifiedSet,
    SchemeParams, Secret, Share,
};

/// Draws `n` independent random `q`-bit shares.
pub fn issue_shares<R: RngCore + CryptoRng>(
    params: &SchemeParams,
    rng: &mut R,
) -> Result<Vec<Share>> {
    (1..=params.n())
        .map(|participant| {
            let mut x = vec![0u8; params.q_bytes()];
            rng.try_fill_bytes(&mut x)
                .map_err(|err| Error::EntropyFailure(err.to_string()))?;
            Ok(Share {
                participant,
                x: Block::from_bytes(x),
            })
        })
        .collect()
}

/// Accepts a share chosen by the participant instead of the dealer.
pub fn import_share(params: &SchemeParams, participant: u32, x: Block) -> Result<Share> {
    Share::new(params, participant, x)
}

fn find_share(shares: &[Share], participant: u32) -> Result<&Share> {
    shares
        .iter()
        .find(|s| s.participant == participant)
        .ok_or(Error::MissingShare(participant))
}

/// `S_ij = s_i XOR (XOR over members of H(x || i || j))`.
pub fn compute_public_share(
    hasher: &Hasher,
    secret: &Secret,
    qset: &QualifiedSet,
    shares: &[Share],
) -> Result<PublicShareValue> {
    check_row_target(secret, qset)?;
    let mut value = secret.value.clone();
    for &member in &qset.members {
        let share = find_share(shares, member)?;
        let pseudo = hasher.pseudo_share_value(&share.x, secret.index, qset.position)?;
        value.xor_assign(&pseudo)?;
    }
    Ok(PublicShareValue {
        secret_index: secret.index,
        set_position: qset.position,
        value,
    })
}

fn check_row_target(secret: &Secret, qset: &QualifiedSet) -> Result<()> {
    if secret.index != qset.secret_index {
        return Err(Error::InvalidParams {
            field: "secret_index",
            reason: format!(
                "secret {} does not own qualified set of secret {}",
                secret.index, qset.secret_index
            ),
        });
    }
    Ok(())
}

/// Everything published for one secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretRows {
    pub public_shares: Vec<PublicShareValue>,
    pub commitment: SecretCommitment,
    pub entries: Vec<VerificationEntry>,
}

/// All published rows for one secret. Each pseudo-share is computed once and
/// reused for both `S_ij` and its `H²` entry, so the cost is
/// `2 * total_membership + 1` hashes.
///
/// The structure is not validated here; [`build_bulletin`] and the renewal
/// functions do that before calling in.
pub fn secret_rows(
    hasher: &Hasher,
    secret: &Secret,
    structure: &AccessStructure,
    shares: &[Share],
) -> Result<SecretRows> {
    let mut public_shares = Vec::with_capacity(structure.qualified_sets.len());
    let mut entries = Vec::with_capacity(structure.total_membership());
    for qset in &structure.qualified_sets {
        check_row_target(secret, qset)?;
        let mut value = secret.value.clone();
        for &member in &qset.members {
            let share = find_share(shares, member)?;
            let pseudo = hasher.pseudo_share_value(&share.x, secret.index, qset.position)?;
            value.xor_assign(&pseudo)?;
            entries.push(VerificationEntry {
                participant: member,
                secret_index: secret.index,
                set_position: qset.position,
                digest: hasher.double_hash(&pseudo)?,
            });
        }
        public_shares.push(PublicShareValue {
            secret_index: secret.index,
            set_position: qset.position,
            value,
        });
    }
    let commitment = SecretCommitment {
        secret_index: secret.index,
        digest: hasher.hash(secret.value.as_bytes()),
    };
    Ok(SecretRows {
        public_shares,
        commitment,
        entries,
    })
}

fn check_structure(params: &SchemeParams, structure: &AccessStructure) -> Result<()> {
    validate_access_structure(params, structure).map_err(|violations| {
        let capacity = violations
            .iter()
            .any(|v| matches!(v, crate::model::Violation::CapacityExceeded { .. }));
        if capacity {
            Error::CapacityExceeded(format!("secret {}: {violations}", structure.secret_index))
        } else {
            Error::InvalidStructure {
                secret_index: structure.secret_index,
                violations,
            }
        }
    })
}

fn check_shares(params: &SchemeParams, shares: &[Share]) -> Result<()> {
    for participant in 1..=params.n() {
        let share = find_share(shares, participant)?;
        share.x.expect_bits("share", params.q() as usize)?;
    }
    Ok(())
}

/// Computes the complete public bulletin for secrets `1..=k`.
pub fn build_bulletin(
    hasher: &Hasher,
    params: &SchemeParams,
    participants: &[Participant],
    secrets: &[Secret],
    structures: &[AccessStructure],
    shares: &[Share],
) -> Result<Bulletin> {
    check_roster(params, participants)?;
    check_shares(params, shares)?;
    if secrets.len() > params.k_max() as usize {
        return Err(Error::CapacityExceeded(format!(
            "{} secrets exceed k_max = {}",
            secrets.len(),
            params.k_max()
        )));
    }
    if secrets.len() != structures.len() {
        return Err(Error::InvalidParams {
            field: "structures",
            reason: format!(
                "{} secrets but {} access structures",
                secrets.len(),
                structures.len()
            ),
        });
    }

    let mut secrets: Vec<&Secret> = secrets.iter().collect();
    secrets.sort_by_key(|s| s.index);
    for pair in secrets.windows(2) {
        if pair[0].index == pair[1].index {
            return Err(Error::Duplicate {
                what: "secret",
                index: pair[0].index,
            });
        }
    }

    let mut bulletin = Bulletin {
        params: params.clone(),
        participants: participants.to_vec(),
        structures: Vec::with_capacity(secrets.len()),
        public_shares: Vec::new(),
        commitments: Vec::new(),
        verification_table: Vec::new(),
    };
    for (pos, secret) in secrets.into_iter().enumerate() {
        let expected = pos as u32 + 1;
        if secret.index != expected {
            return Err(Error::InvalidParams {
                field: "secrets",
                reason: format!("secret indices must be 1..=k; missing {expected}"),
            });
        }
        Secret::new(params, secret.index, secret.value.clone())?;
        let structure = structures
            .iter()
            .find(|s| s.secret_index == secret.index)
            .ok_or(Error::UnknownSecret(secret.index))?;
        check_structure(params, structure)?;
        append_secret(hasher, &mut bulletin, secret, structure, shares)?;
    }
    bulletin.validate()?;
    Ok(bulletin)
}

fn append_secret(
    hasher: &Hasher,
    bulletin: &mut Bulletin,
    secret: &Secret,
    structure: &AccessStructure,
    shares: &[Share],
) -> Result<()> {
    let rows = secret_rows(hasher, secret, structure, shares)?;
    bulletin.structures.push(structure.clone());
    bulletin.public_shares.extend(rows.public_shares);
    bulletin.commitments.push(rows.commitment);
    bulletin.verification_table.extend(rows.entries);
    Ok(())
}

/// Publishes secret `k + 1` without touching any existing row or share.
pub fn add_secret(
    hasher: &Hasher,
    bulletin: &Bulletin,
    shares: &[Share],
    new_secret: &Secret,
    structure: &AccessStructure,
) -> Result<Bulletin> {
    let params = &bulletin.params;
    let next = bulletin.secret_count() + 1;
    if next > params.k_max() {
        return Err(Error::CapacityExceeded(format!(
            "bulletin already holds k_max = {} secrets",
            params.k_max()
        )));
    }
    if new_secret.index != next || structure.secret_index != next {
        return Err(Error::InvalidParams {
            field: "secret_index",
            reason: format!("the next secret must have index {next}"),
        });
    }
    Secret::new(params, new_secret.index, new_secret.value.clone())?;
    check_structure(params, structure)?;
    check_shares(params, shares)?;

    let mut next_bulletin = bulletin.clone();
    next_bulletin.params = params.bumped();
    append_secret(hasher, &mut next_bulletin, new_secret, structure, shares)?;
    next_bulletin.validate()?;
    Ok(next_bulletin)
}

/// Republishes every row of `secret` under `new_structure`. Rows of other
/// secrets are carried over unchanged.
pub fn replace_access_structure(
    hasher: &Hasher,
    bulletin: &Bulletin,
    shares: &[Share],
    secret: &Secret,
    new_structure: &AccessStructure,
) -> Result<Bulletin> {
    let params = &bulletin.params;
    let i = secret.index;
    if bulletin.structure(i).is_none() {
        return Err(Error::UnknownSecret(i));
    }
    if new_structure.secret_index != i {
        return Err(Error::InvalidParams {
            field: "secret_index",
            reason: format!(
                "structure for secret {} given for secret {i}",
                new_structure.secret_index
            ),
        });
    }
    Secret::new(params, i, secret.value.clone())?;
    check_structure(params, new_structure)?;
    check_shares(params, shares)?;

    let rows = secret_rows(hasher, secret, new_structure, shares)?;
    let mut next = bulletin.clone();
    next.params = params.bumped();
    next.structures[(i - 1) as usize] = new_structure.clone();

    next.public_shares.retain(|r| r.secret_index != i);
    next.public_shares.extend(rows.public_shares);
    next.public_shares
        .sort_by_key(|r| (r.secret_index, r.set_position));

    for c in next.commitments.iter_mut().filter(|c| c.secret_index == i) {
        *c = rows.commitment.clone();
    }

    next.verification_table.retain(|e| e.secret_index != i);
    next.verification_table.extend(rows.entries);
    next.verification_table
        .sort_by_key(|e| (e.secret_index, e.set_position, e.participant));

    next.validate()?;
    Ok(next)
}

/// The dealer's private record: everything needed to recompute or renew the bulletin.
#[derive(Clone, PartialEq, Eq)]
pub struct DealerState {
    pub params: SchemeParams,
    pub participants: Vec<Participant>,
    pub shares: Vec<Share>,
    pub secrets: Vec<Secret>,
}

impl std::fmt::Debug for DealerState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DealerState")
            .field("params", &self.params)
            .field("participants", &self.participants)
            .field("shares", &self.shares.len())
            .field("secrets", &self.secrets.len())
            .finish()
    }
}

impl DealerState {
    /// Sets up a fresh instance with dealer-chosen random shares.
    pub fn setup<R: RngCore + CryptoRng>(
        params: SchemeParams,
        participants: Vec<Participant>,
        rng: &mut R,
    ) -> Result<Self> {
        check_roster(&params, &participants)?;
        let shares = issue_shares(&params, rng)?;
        Ok(DealerState {
            params,
            participants,
            shares,
            secrets: Vec::new(),
        })
    }

    pub fn secret(&self, index: u32) -> Option<&Secret> {
        self.secrets.iter().find(|s| s.index == index)
    }

    /// Checks that the state is internally consistent.
    pub fn validate(&self) -> Result<()> {
        check_roster(&self.params, &self.participants)?;
        if self.shares.len() != self.params.n() as usize {
            return Err(Error::InvalidParams {
                field: "shares",
                reason: format!(
                    "expected {} shares, found {}",
                    self.params.n(),
                    self.shares.len()
                ),
            });
        }
        for (pos, share) in self.shares.iter().enumerate() {
            if share.participant != pos as u32 + 1 {
                return Err(Error::InvalidParams {
                    field: "shares",
                    reason: "shares must be listed for participants 1..=n in order".into(),
                });
            }
            Share::new(&self.params, share.participant, share.x.clone())?;
        }
        for (pos, secret) in self.secrets.iter().enumerate() {
            if secret.index != pos as u32 + 1 {
                return Err(Error::InvalidParams {
                    field: "secrets",
                    reason: "secrets must be listed as 1..=k in order".into(),
                });
            }
            Secret::new(&self.params, secret.index, secret.value.clone())?;
        }
        Ok(())
    }
}
