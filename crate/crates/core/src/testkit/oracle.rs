use crate::block::Block;
use crate::bulletin::{Bulletin, PublicShareValue, SecretCommitment, VerificationEntry};
use crate::error::{Error, Result};
use crate::hashing::Hasher;
use crate::model::{AccessStructure, Participant, SchemeParams, Secret, Share};

/// `x || i || j` built as an explicit list of bits, then packed.
pub fn oracle_encode(x: &[u8], i: u32, l: u32, j: u32, m: u32) -> Vec<u8> {
    let mut bits: Vec<bool> = Vec::new();
    for byte in x {
        for k in 0..8 {
            bits.push(byte & (1 << (7 - k)) != 0);
        }
    }
    for k in (0..l).rev() {
        bits.push((i >> k) & 1 == 1);
    }
    for k in (0..m).rev() {
        bits.push((j >> k) & 1 == 1);
    }
    while !bits.len().is_multiple_of(8) {
        bits.push(false);
    }
    bits.chunks(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect()
}

/// Dealer hash invocations for a set of structures: one pseudo-share and one
/// double hash per membership, plus one commitment per secret.
pub fn expected_dealer_hashes(structures: &[AccessStructure]) -> u64 {
    let mut count = 0u64;
    for structure in structures {
        let mut memberships = 0u64;
        for set in &structure.qualified_sets {
            memberships += set.members.len() as u64;
        }
        count += 2 * memberships + 1;
    }
    count
}

/// Recomputes a bulletin from the definition, row by row.
pub fn oracle_bulletin(
    hasher: &Hasher,
    params: &SchemeParams,
    participants: &[Participant],
    secrets: &[Secret],
    structures: &[AccessStructure],
    shares: &[Share],
) -> Result<Bulletin> {
    let (l, m) = (params.l(), params.m());
    let mut public_shares = Vec::new();
    let mut commitments = Vec::new();
    let mut table = Vec::new();
    let mut ordered_structures = Vec::new();

    for i in 1..=secrets.len() as u32 {
        let secret = secrets
            .iter()
            .find(|s| s.index == i)
            .ok_or(Error::UnknownSecret(i))?;
        let structure = structures
            .iter()
            .find(|s| s.secret_index == i)
            .ok_or(Error::UnknownSecret(i))?;
        ordered_structures.push(structure.clone());

        for (pos, set) in structure.qualified_sets.iter().enumerate() {
            let j = pos as u32 + 1;
            let mut s_ij = secret.value.as_bytes().to_vec();
            let mut members = set.members.clone();
            members.sort_unstable();
            for alpha in members {
                let share = shares
                    .iter()
                    .find(|s| s.participant == alpha)
                    .ok_or(Error::MissingShare(alpha))?;
                let input = oracle_encode(share.x.as_bytes(), i, l, j, m);
                let pseudo = hasher.hash(&input);
                for (byte, p) in s_ij.iter_mut().zip(pseudo.as_bytes()) {
                    *byte ^= p;
                }
                table.push(VerificationEntry {
                    participant: alpha,
                    secret_index: i,
                    set_position: j,
                    digest: hasher.hash(pseudo.as_bytes()),
                });
            }
            public_shares.push(PublicShareValue {
                secret_index: i,
                set_position: j,
                value: Block::from_bytes(s_ij),
            });
        }
        commitments.push(SecretCommitment {
            secret_index: i,
            digest: hasher.hash(secret.value.as_bytes()),
        });
    }

    Ok(Bulletin {
        params: params.clone(),
        participants: participants.to_vec(),
        structures: ordered_structures,
        public_shares,
        commitments,
        verification_table: table,
    })
}
