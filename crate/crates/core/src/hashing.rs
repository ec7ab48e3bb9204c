//! The hash primitive `H`, its input encoding and invocation accounting.
//!
//! `H` is a registered digest truncated to the leftmost `q` bits. The input
//! for a pseudo-share is `x || i || j`: the `q` bits of the share, then the
//! secret index in exactly `l` bits and the set position in exactly `m` bits,
//! both big-endian. The bit string is packed MSB-first and zero-padded on the
//! right to a byte boundary. With `l` and `m` fixed the padding never makes two
//! inputs collide.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use sha2::{Digest as _, Sha256, Sha512};

use crate::block::{Block, Digest};
use crate::error::{Error, Result};
use crate::model::{SchemeParams, Share};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashAlgorithm {
    Sha256,
    Sha512,
}

impl HashAlgorithm {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "sha-256" => Ok(HashAlgorithm::Sha256),
            "sha-512" => Ok(HashAlgorithm::Sha512),
            other => Err(Error::UnsupportedHash(other.to_string())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            HashAlgorithm::Sha256 => "sha-256",
            HashAlgorithm::Sha512 => "sha-512",
        }
    }

    pub fn output_bits(self) -> u32 {
        match self {
            HashAlgorithm::Sha256 => 256,
            HashAlgorithm::Sha512 => 512,
        }
    }

    /// Full, untruncated digest.
    pub fn digest(self, input: &[u8]) -> Vec<u8> {
        match self {
            HashAlgorithm::Sha256 => Sha256::digest(input).to_vec(),
            HashAlgorithm::Sha512 => Sha512::digest(input).to_vec(),
        }
    }
}

/// Who performed a hash invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Dealer,
    Participant,
    Combiner,
}

/// Per-role hash invocation counts. Shared between hashers through an `Arc`.
#[derive(Debug, Default)]
pub struct HashCounter {
    dealer: AtomicU64,
    participant: AtomicU64,
    combiner: AtomicU64,
}

/// A point-in-time copy of a [`HashCounter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HashTally {
    pub dealer: u64,
    pub participant: u64,
    pub combiner: u64,
}

impl HashTally {
    pub fn total(&self) -> u64 {
        self.dealer + self.participant + self.combiner
    }

    pub fn get(&self, role: Role) -> u64 {
        match role {
            Role::Dealer => self.dealer,
            Role::Participant => self.participant,
            Role::Combiner => self.combiner,
        }
    }

    /// Counts accumulated since `earlier`.
    pub fn since(&self, earlier: &HashTally) -> HashTally {
        HashTally {
            dealer: self.dealer - earlier.dealer,
            participant: self.participant - earlier.participant,
            combiner: self.combiner - earlier.combiner,
        }
    }
}

impl HashCounter {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    fn slot(&self, role: Role) -> &AtomicU64 {
        match role {
            Role::Dealer => &self.dealer,
            Role::Participant => &self.participant,
            Role::Combiner => &self.combiner,
        }
    }

    pub fn record(&self, role: Role) {
        self.slot(role).fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self, role: Role) -> u64 {
        self.slot(role).load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> HashTally {
        HashTally {
            dealer: self.get(Role::Dealer),
            participant: self.get(Role::Participant),
            combiner: self.get(Role::Combiner),
        }
    }

    pub fn reset(&self) {
        for role in [Role::Dealer, Role::Participant, Role::Combiner] {
            self.slot(role).store(0, Ordering::Relaxed);
        }
    }
}

/// A participant's `H(x || i || j)` bound to the row it was derived for.
#[derive(Clone, PartialEq, Eq)]
pub struct PseudoShare {
    pub participant: u32,
    pub secret_index: u32,
    pub set_position: u32,
    pub value: Digest,
}

impl std::fmt::Debug for PseudoShare {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PseudoShare")
            .field("participant", &self.participant)
            .field("secret_index", &self.secret_index)
            .field("set_position", &self.set_position)
            .finish_non_exhaustive()
    }
}

/// `H` configured for one scheme instance, charging every call to `role`.
#[derive(Clone, Debug)]
pub struct Hasher {
    algorithm: HashAlgorithm,
    q_bytes: usize,
    l: u32,
    m: u32,
    k_max: u32,
    t_max: u32,
    role: Role,
    counter: Arc<HashCounter>,
}

impl Hasher {
    /// A hasher with its own fresh counter.
    pub fn new(params: &SchemeParams, role: Role) -> Result<Self> {
        Self::with_counter(params, role, HashCounter::new())
    }

    pub fn with_counter(
        params: &SchemeParams,
        role: Role,
        counter: Arc<HashCounter>,
    ) -> Result<Self> {
        Ok(Hasher {
            algorithm: HashAlgorithm::from_id(params.hash_id())?,
            q_bytes: params.q_bytes(),
            l: params.l(),
            m: params.m(),
            k_max: params.k_max(),
            t_max: params.t_max(),
            role,
            counter,
        })
    }

    /// Another hasher on the same counter, charging `role`.
    pub fn for_role(&self, role: Role) -> Hasher {
        Hasher {
            role,
            ..self.clone()
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn counter(&self) -> &Arc<HashCounter> {
        &self.counter
    }

    pub fn q_bits(&self) -> usize {
        self.q_bytes * 8
    }

    /// `H(input)`: the leftmost `q` bits of the registered digest.
    pub fn hash(&self, input: &[u8]) -> Digest {
        self.counter.record(self.role);
        let mut full = self.algorithm.digest(input);
        full.truncate(self.q_bytes);
        Block::from_bytes(full)
    }

    /// Bit-exact encoding of `x || i_l || j_m`, `ceil((q + l + m) / 8)` bytes long.
    pub fn encode_input(&self, x: &Block, secret_index: u32, set_position: u32) -> Result<Vec<u8>> {
        x.expect_bits("share", self.q_bits())?;
        check_range("secret", secret_index, self.k_max)?;
        check_range("qualified set", set_position, self.t_max)?;

        Ok(pack_input(
            x.as_bytes(),
            secret_index,
            self.l,
            set_position,
            self.m,
        ))
    }

    /// `H(x || i_l || j_m)` as a bare value.
    pub fn pseudo_share_value(
        &self,
        x: &Block,
        secret_index: u32,
        set_position: u32,
    ) -> Result<Digest> {
        let input = self.encode_input(x, secret_index, set_position)?;
        Ok(self.hash(&input))
    }

    pub fn pseudo_share(
        &self,
        share: &Share,
        secret_index: u32,
        set_position: u32,
    ) -> Result<PseudoShare> {
        Ok(PseudoShare {
            participant: share.participant,
            secret_index,
            set_position,
            value: self.pseudo_share_value(&share.x, secret_index, set_position)?,
        })
    }

    /// `H` applied to the raw bytes of a `q`-bit value (used for `H²`).
    pub fn double_hash(&self, value: &Block) -> Result<Digest> {
        value.expect_bits("pseudo-share", self.q_bits())?;
        Ok(self.hash(value.as_bytes()))
    }
}

/// Packs `x || i || j` with `i` in `l` bits and `j` in `m` bits, MSB-first,
/// zero-padded to a whole byte. Range checks are the caller's job; `i` must
/// fit in `l` bits and `j` in `m` bits.
pub fn pack_input(x: &[u8], i: u32, l: u32, j: u32, m: u32) -> Vec<u8> {
    assert!((i as u64) < 1u64 << l, "index {i} does not fit in {l} bits");
    assert!((j as u64) < 1u64 << m, "index {j} does not fit in {m} bits");
    let total_bits = x.len() * 8 + (l + m) as usize;
    let mut writer = BitWriter::with_capacity(total_bits.div_ceil(8));
    for &byte in x {
        writer.push(byte as u64, 8);
    }
    writer.push(i as u64, l);
    writer.push(j as u64, m);
    writer.finish()
}

fn check_range(what: &'static str, index: u32, max: u32) -> Result<()> {
    if index < 1 || index > max {
        return Err(Error::IndexOutOfRange { what, index, max });
    }
    Ok(())
}

/// MSB-first bit packer.
struct BitWriter {
    bytes: Vec<u8>,
    bits: usize,
}

impl BitWriter {
    fn with_capacity(bytes: usize) -> Self {
        BitWriter {
            bytes: Vec::with_capacity(bytes),
            bits: 0,
        }
    }

    /// Appends the low `width` bits of `value`, most significant first.
    fn push(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value >> width == 0);
        for shift in (0..width).rev() {
            if self.bits.is_multiple_of(8) {
                self.bytes.push(0);
            }
            let bit = ((value >> shift) & 1) as u8;
            let last = self.bytes.last_mut().expect("byte pushed above");
            *last |= bit << (7 - self.bits % 8);
            self.bits += 1;
        }
    }

    fn finish(self) -> Vec<u8> {
        self.bytes
    }
}
