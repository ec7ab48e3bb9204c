use rand::seq::SliceRandom;
use rand::Rng;

use crate::block::Block;
use crate::bulletin::Bulletin;
use crate::combiner::verify_pseudo_share;
use crate::error::{Error, Result};
use crate::hashing::{Hasher, PseudoShare, Role};
use crate::model::Share;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corruption {
    SingleBit,
    MultiBit,
    Zeroed,
    Random,
}

const KINDS: [Corruption; 4] = [
    Corruption::SingleBit,
    Corruption::MultiBit,
    Corruption::Zeroed,
    Corruption::Random,
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TamperReport {
    pub trials: u64,
    pub rejected: u64,
    /// Per corruption kind: `(trials, rejected)`.
    pub by_kind: Vec<(Corruption, u64, u64)>,
    /// Corrupted submissions the combiner accepted.
    pub accepted: Vec<PseudoShare>,
}

impl TamperReport {
    pub fn all_rejected(&self) -> bool {
        self.trials == self.rejected && self.accepted.is_empty()
    }
}

/// Honest pseudo-shares for every entry of the verification table.
pub fn honest_pseudo_shares(
    hasher: &Hasher,
    bulletin: &Bulletin,
    shares: &[Share],
) -> Result<Vec<PseudoShare>> {
    let hasher = hasher.for_role(Role::Participant);
    bulletin
        .verification_table
        .iter()
        .map(|e| {
            let share = shares
                .iter()
                .find(|s| s.participant == e.participant)
                .ok_or(Error::MissingShare(e.participant))?;
            hasher.pseudo_share(share, e.secret_index, e.set_position)
        })
        .collect()
}

fn corrupt<R: Rng>(rng: &mut R, kind: Corruption, value: &Block) -> Block {
    let bits = value.bit_len();
    let mut out = value.clone();
    match kind {
        Corruption::SingleBit => out.flip_bit(rng.gen_range(0..bits)),
        Corruption::MultiBit => {
            let count = rng.gen_range(2..=bits.max(2));
            let mut positions: Vec<usize> = (0..bits).collect();
            positions.shuffle(rng);
            for &pos in positions.iter().take(count) {
                out.flip_bit(pos);
            }
        }
        Corruption::Zeroed => out = Block::zeroed(value.byte_len()),
        Corruption::Random => {
            let mut bytes = vec![0u8; value.byte_len()];
            rng.fill(bytes.as_mut_slice());
            out = Block::from_bytes(bytes);
        }
    }
    if out == *value {
        out.flip_bit(0);
    }
    out
}

/// Submits `trials` corrupted copies of honest pseudo-shares to the
/// combiner's `H²` check, cycling through the corruption kinds.
pub fn tamper_fuzz<R: Rng>(
    hasher: &Hasher,
    bulletin: &Bulletin,
    honest: &[PseudoShare],
    trials: u64,
    rng: &mut R,
) -> Result<TamperReport> {
    if honest.is_empty() {
        return Err(Error::InvalidParams {
            field: "honest",
            reason: "no pseudo-shares to corrupt".into(),
        });
    }
    let combiner = hasher.for_role(Role::Combiner);
    let mut report = TamperReport {
        by_kind: KINDS.iter().map(|&k| (k, 0, 0)).collect(),
        ..TamperReport::default()
    };
    for trial in 0..trials {
        let kind_idx = (trial % KINDS.len() as u64) as usize;
        let kind = KINDS[kind_idx];
        let target = honest.choose(rng).expect("non-empty");
        let forged = corrupt(rng, kind, &target.value);
        let verdict = verify_pseudo_share(
            &combiner,
            bulletin,
            target.participant,
            target.secret_index,
            target.set_position,
            forged.as_bytes(),
        )?;
        report.trials += 1;
        report.by_kind[kind_idx].1 += 1;
        if verdict.is_accept() {
            report.accepted.push(PseudoShare {
                value: forged,
                ..target.clone()
            });
        } else {
            report.rejected += 1;
            report.by_kind[kind_idx].2 += 1;
        }
    }
    Ok(report)
}
