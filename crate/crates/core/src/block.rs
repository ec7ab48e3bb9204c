//! Fixed-length bit strings.
//!
//! Every value the scheme manipulates (secrets, shares, pseudo-shares,
//! published `S` values and digests) is a string of exactly `q` bits. Since
//! `q` is a multiple of eight, a block is stored as `q / 8` bytes.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Block(Vec<u8>);

/// A hash output truncated to `q` bits.
pub type Digest = Block;

impl Block {
    pub fn from_bytes(bytes: impl Into<Vec<u8>>) -> Self {
        Block(bytes.into())
    }

    pub fn zeroed(byte_len: usize) -> Self {
        Block(vec![0; byte_len])
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        Ok(Block(hex::decode(text.trim())?))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn byte_len(&self) -> usize {
        self.0.len()
    }

    pub fn bit_len(&self) -> usize {
        self.0.len() * 8
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// XORs `other` into `self`. Both blocks must have the same length.
    pub fn xor_assign(&mut self, other: &Block) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::Length {
                what: "xor operand",
                expected: self.bit_len(),
                actual: other.bit_len(),
            });
        }
        self.0
            .iter_mut()
            .zip(other.0.iter())
            .for_each(|(a, b)| *a ^= b);
        Ok(())
    }

    pub fn xor(&self, other: &Block) -> Result<Block> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Flips bit `index`, counting MSB-first from the start of the block.
    pub fn flip_bit(&mut self, index: usize) {
        self.0[index / 8] ^= 0x80 >> (index % 8);
    }

    pub(crate) fn expect_bits(&self, what: &'static str, bits: usize) -> Result<()> {
        if self.bit_len() != bits {
            return Err(Error::Length {
                what,
                expected: bits,
                actual: self.bit_len(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block({})", self.to_hex())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl AsRef<[u8]> for Block {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        if text.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(serde::de::Error::custom("hex must be lowercase"));
        }
        hex::decode(&text)
            .map(Block)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_self_inverse() {
        let a = Block::from_bytes(vec![0xab, 0x01]);
        let b = Block::from_bytes(vec![0x0f, 0xf0]);
        let c = a.xor(&b).unwrap();
        assert_eq!(c.as_bytes(), &[0xa4, 0xf1]);
        assert_eq!(c.xor(&b).unwrap(), a);
        assert!(a.xor(&a).unwrap().is_zero());
    }

    #[test]
    fn xor_rejects_length_mismatch() {
        let a = Block::zeroed(2);
        let b = Block::zeroed(3);
        assert!(matches!(a.xor(&b), Err(Error::Length { .. })));
    }

    #[test]
    fn flip_bit_is_msb_first() {
        let mut b = Block::zeroed(2);
        b.flip_bit(0);
        b.flip_bit(15);
        assert_eq!(b.as_bytes(), &[0x80, 0x01]);
    }

    #[test]
    fn serde_uses_lowercase_hex() {
        let b = Block::from_bytes(vec![0xde, 0xad]);
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"dead\"");
        let back: Block = serde_json::from_str("\"dead\"").unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<Block>("\"DEAD\"").is_err());
        assert!(serde_json::from_str::<Block>("\"dea\"").is_err());
    }
}
