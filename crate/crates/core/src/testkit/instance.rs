use rand::seq::SliceRandom;
use rand::{CryptoRng, Rng, RngCore};

use crate::block::Block;
use crate::dealer::issue_shares;
use crate::error::Result;
use crate::model::{AccessStructure, Participant, SchemeParams, Secret, Share, DEFAULT_HASH_ID};

/// Bounds for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct InstanceShape {
    pub q: u32,
    pub max_participants: u32,
    pub k_max: u32,
    pub t_max: u32,
    /// Fill every instance to `k = k_max` and `t_i = t_max` where possible.
    pub at_capacity: bool,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            q: 64,
            max_participants: 6,
            k_max: 4,
            t_max: 4,
            at_capacity: false,
        }
    }
}

/// Everything the dealer knows about one instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub params: SchemeParams,
    pub participants: Vec<Participant>,
    pub secrets: Vec<Secret>,
    pub structures: Vec<AccessStructure>,
    pub shares: Vec<Share>,
}

/// Draws a random valid instance within `shape`. Qualified sets within one
/// structure are distinct and non-empty.
pub fn random_instance<R: RngCore + CryptoRng>(
    rng: &mut R,
    shape: InstanceShape,
) -> Result<Instance> {
    let n = rng.gen_range(1..=shape.max_participants);
    let mut params = if shape.q < crate::model::MIN_SECURE_Q {
        SchemeParams::new_insecure(shape.q, n, shape.k_max, shape.t_max, DEFAULT_HASH_ID)?
    } else {
        SchemeParams::new(shape.q, n, shape.k_max, shape.t_max, DEFAULT_HASH_ID)?
    };
    let mut id = [0u8; crate::model::INSTANCE_ID_LEN];
    rng.fill_bytes(&mut id);
    params = params.with_instance_id(Block::from_bytes(id.to_vec()))?;

    let shares = issue_shares(&params, rng)?;
    let k = if shape.at_capacity {
        shape.k_max
    } else {
        rng.gen_range(1..=shape.k_max)
    };
    // Non-empty subsets of 1..=n as bitmasks.
    let subsets: Vec<u32> = (1u32..(1 << n)).collect();
    let mut secrets = Vec::new();
    let mut structures = Vec::new();
    for i in 1..=k {
        let mut value = vec![0u8; params.q_bytes()];
        rng.fill_bytes(&mut value);
        secrets.push(Secret::new(&params, i, Block::from_bytes(value))?);

        let most = shape.t_max.min(subsets.len() as u32);
        let t = if shape.at_capacity {
            most
        } else {
            rng.gen_range(1..=most)
        };
        let chosen: Vec<Vec<u32>> = subsets
            .choose_multiple(rng, t as usize)
            .map(|&mask| (1..=n).filter(|a| mask & (1 << (a - 1)) != 0).collect())
            .collect();
        structures.push(AccessStructure::new(i, chosen));
    }
    Ok(Instance {
        participants: Participant::default_roster(n),
        params,
        secrets,
        structures,
        shares,
    })
}
