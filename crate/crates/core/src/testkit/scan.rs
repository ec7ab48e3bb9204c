use std::collections::BTreeMap;

use crate::block::Block;
use crate::bulletin::Bulletin;
use crate::combiner::reconstruct_unchecked;
use crate::error::{Error, Result};
use crate::hashing::{Hasher, Role};
use crate::model::Share;
use crate::participant::verify_secret;

/// Coalitions are enumerated exhaustively, so `n` is capped.
pub const MAX_SCAN_PARTICIPANTS: u32 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub secret_index: u32,
    pub set_position: u32,
    pub coalition: Vec<u32>,
    pub authorized: bool,
    pub recovered: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForbiddenScanReport {
    /// `(row, coalition)` pairs examined.
    pub checked: u64,
    /// Of those, how many coalitions covered the row's qualified set.
    pub authorized: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl ForbiddenScanReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// For every row `(i, j)` and every coalition `B` of participants, XORs the
/// true pseudo-shares of `A_ij ∩ B` into `S_ij` without verification and
/// checks the result against `H(s_i)`. The check must pass exactly when
/// `A_ij ⊆ B`.
///
/// `hasher` is used for the honest pseudo-shares and the final secret check;
/// both are charged to [`Role::Participant`].
pub fn exhaustive_forbidden_scan(
    hasher: &Hasher,
    bulletin: &Bulletin,
    shares: &[Share],
) -> Result<ForbiddenScanReport> {
    let n = bulletin.params.n();
    if n > MAX_SCAN_PARTICIPANTS {
        return Err(Error::InvalidParams {
            field: "n",
            reason: format!(
                "exhaustive scan supports at most {MAX_SCAN_PARTICIPANTS} participants"
            ),
        });
    }
    let hasher = hasher.for_role(Role::Participant);
    let mut report = ForbiddenScanReport::default();

    for structure in &bulletin.structures {
        let i = structure.secret_index;
        let commitment = bulletin.commitment(i).ok_or(Error::UnknownSecret(i))?;
        for set in &structure.qualified_sets {
            let j = set.position;
            let mut pseudo: BTreeMap<u32, Block> = BTreeMap::new();
            for &member in &set.members {
                let share = shares
                    .iter()
                    .find(|s| s.participant == member)
                    .ok_or(Error::MissingShare(member))?;
                pseudo.insert(member, hasher.pseudo_share_value(&share.x, i, j)?);
            }

            for mask in 0u32..(1 << n) {
                let coalition: Vec<u32> = (1..=n).filter(|a| mask & (1 << (a - 1)) != 0).collect();
                let authorized = set.members.iter().all(|m| coalition.contains(m));
                let values: Vec<Block> = pseudo
                    .iter()
                    .filter(|(a, _)| coalition.contains(a))
                    .map(|(_, v)| v.clone())
                    .collect();
                let candidate = reconstruct_unchecked(bulletin, i, j, &values)?;
                let recovered =
                    verify_secret(&hasher, candidate.as_bytes(), commitment).is_accept();

                report.checked += 1;
                report.authorized += authorized as u64;
                if recovered != authorized {
                    report.counterexamples.push(Counterexample {
                        secret_index: i,
                        set_position: j,
                        coalition,
                        authorized,
                        recovered,
                    });
                }
            }
        }
    }
    Ok(report)
}
