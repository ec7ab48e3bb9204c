//! The scheme's value types and their validation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::block::Block;
use crate::error::{Error, Result};
use crate::hashing::HashAlgorithm;

/// Smallest `q` accepted outside of test mode.
pub const MIN_SECURE_Q: u32 = 64;

/// Smallest `q` accepted at all (one byte).
pub const MIN_TEST_Q: u32 = 8;

pub const DEFAULT_HASH_ID: &str = "sha-256";

/// Length in bytes of the random instance identifier mixed into the scheme fingerprint.
pub const INSTANCE_ID_LEN: usize = 16;

/// Number of bits needed to write every index in `1..=capacity`, plus one
/// bit of headroom: `ceil(log2(capacity)) + 1`.
pub fn index_width(capacity: u32) -> u32 {
    debug_assert!(capacity >= 1);
    let ceil_log2 = if capacity <= 1 {
        0
    } else {
        u32::BITS - (capacity - 1).leading_zeros()
    };
    ceil_log2 + 1
}

/// Global constants of one scheme instance.
///
/// The index widths `l` and `m` are derived from the declared capacities
/// `k_max` and `t_max`, so adding secrets later never changes the encoding of
/// an already published row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SchemeParams {
    q: u32,
    n: u32,
    k_max: u32,
    t_max: u32,
    l: u32,
    m: u32,
    hash_id: String,
    version: u64,
    instance_id: Block,
    insecure_test_mode: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    q: u32,
    n: u32,
    k_max: u32,
    t_max: u32,
    l: u32,
    m: u32,
    hash_id: String,
    version: u64,
    instance_id: Block,
    insecure_test_mode: bool,
}

impl TryFrom<RawParams> for SchemeParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let mut params = SchemeParams::build(
            raw.q,
            raw.n,
            raw.k_max,
            raw.t_max,
            &raw.hash_id,
            raw.insecure_test_mode,
        )?;
        if raw.l != params.l {
            return Err(invalid(
                "l",
                format!("expected {}, found {}", params.l, raw.l),
            ));
        }
        if raw.m != params.m {
            return Err(invalid(
                "m",
                format!("expected {}, found {}", params.m, raw.m),
            ));
        }
        if raw.version < 1 {
            return Err(invalid("version", "must be at least 1".into()));
        }
        params.version = raw.version;
        params = params.with_instance_id(raw.instance_id)?;
        Ok(params)
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidParams { field, reason }
}

impl SchemeParams {
    /// Creates parameters for a production instance (`q >= 64`).
    pub fn new(q: u32, n: u32, k_max: u32, t_max: u32, hash_id: &str) -> Result<Self> {
        Self::build(q, n, k_max, t_max, hash_id, false)
    }

    /// Like [`SchemeParams::new`] but accepts `q` down to 8 bits. Such
    /// instances are marked and the mark is carried into every file.
    pub fn new_insecure(q: u32, n: u32, k_max: u32, t_max: u32, hash_id: &str) -> Result<Self> {
        Self::build(q, n, k_max, t_max, hash_id, true)
    }

    fn build(
        q: u32,
        n: u32,
        k_max: u32,
        t_max: u32,
        hash_id: &str,
        insecure_test_mode: bool,
    ) -> Result<Self> {
        let algorithm = HashAlgorithm::from_id(hash_id)?;
        if !q.is_multiple_of(8) {
            return Err(invalid("q", "q must be a multiple of 8".into()));
        }
        let min_q = if insecure_test_mode {
            MIN_TEST_Q
        } else {
            MIN_SECURE_Q
        };
        if q < min_q {
            let hint = if insecure_test_mode {
                ""
            } else {
                " (smaller values need test mode)"
            };
            return Err(invalid("q", format!("q must be at least {min_q}{hint}")));
        }
        if q > algorithm.output_bits() {
            return Err(invalid(
                "q",
                format!("{hash_id} produces only {} bits", algorithm.output_bits()),
            ));
        }
        for (field, value) in [("n", n), ("k_max", k_max), ("t_max", t_max)] {
            if value < 1 {
                return Err(invalid(field, "must be at least 1".into()));
            }
        }
        Ok(SchemeParams {
            q,
            n,
            k_max,
            t_max,
            l: index_width(k_max),
            m: index_width(t_max),
            hash_id: algorithm.id().to_string(),
            version: 1,
            instance_id: Block::zeroed(INSTANCE_ID_LEN),
            insecure_test_mode,
        })
    }

    /// Sets the random identifier that distinguishes this instance from
    /// others with identical numeric parameters.
    pub fn with_instance_id(mut self, id: Block) -> Result<Self> {
        if id.byte_len() != INSTANCE_ID_LEN {
            return Err(invalid(
                "instance_id",
                format!("must be {INSTANCE_ID_LEN} bytes"),
            ));
        }
        self.instance_id = id;
        Ok(self)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `q / 8`.
    pub fn q_bytes(&self) -> usize {
        (self.q / 8) as usize
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    /// Bit width of secret indices.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Bit width of qualified-set indices.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn hash_id(&self) -> &str {
        &self.hash_id
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn instance_id(&self) -> &Block {
        &self.instance_id
    }

    pub fn is_insecure_test_mode(&self) -> bool {
        self.insecure_test_mode
    }

    pub(crate) fn bumped(&self) -> Self {
        let mut next = self.clone();
        next.version += 1;
        next
    }

    /// True when both describe the same instance, ignoring the bulletin version.
    pub fn same_instance(&self, other: &SchemeParams) -> bool {
        let mut a = self.clone();
        a.version = other.version;
        a == *other
    }

    pub(crate) fn check_secret_index(&self, index: u32) -> Result<()> {
        if index < 1 || index > self.k_max {
            return Err(Error::IndexOutOfRange {
                what: "secret",
                index,
                max: self.k_max,
            });
        }
        Ok(())
    }

    pub(crate) fn check_participant(&self, index: u32) -> Result<()> {
        if index < 1 || index > self.n {
            return Err(Error::IndexOutOfRange {
                what: "participant",
                index,
                max: self.n,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Participant {
    pub index: u32,
    pub label: String,
}

impl Participant {
    /// Builds the roster `1..=labels.len()`.
    pub fn roster<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Vec<Participant> {
        labels
            .into_iter()
            .enumerate()
            .map(|(pos, label)| Participant {
                index: pos as u32 + 1,
                label: label.into(),
            })
            .collect()
    }

    /// Roster with labels `P1..Pn`.
    pub fn default_roster(n: u32) -> Vec<Participant> {
        Self::roster((1..=n).map(|i| format!("P{i}")))
    }
}

/// Checks that `roster` is exactly participants `1..=n` in order.
pub fn check_roster(params: &SchemeParams, roster: &[Participant]) -> Result<()> {
    if roster.len() != params.n() as usize {
        return Err(invalid(
            "participants",
            format!(
                "expected {} participants, found {}",
                params.n(),
                roster.len()
            ),
        ));
    }
    for (pos, participant) in roster.iter().enumerate() {
        if participant.index != pos as u32 + 1 {
            return Err(invalid(
                "participants",
                format!(
                    "indices must be contiguous from 1; position {} holds {}",
                    pos + 1,
                    participant.index
                ),
            ));
        }
    }
    Ok(())
}

/// One of the `k` secrets, a `q`-bit string.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Secret {
    pub index: u32,
    pub value: Block,
}

impl Secret {
    pub fn new(params: &SchemeParams, index: u32, value: Block) -> Result<Self> {
        params.check_secret_index(index)?;
        value.expect_bits("secret", params.q() as usize)?;
        Ok(Secret { index, value })
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Secret")
            .field("index", &self.index)
            .field("value", &"<redacted>")
            .finish()
    }
}

/// A participant's long-term private `q`-bit share `x`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Share {
    pub participant: u32,
    pub x: Block,
}

impl Share {
    pub fn new(params: &SchemeParams, participant: u32, x: Block) -> Result<Self> {
        params.check_participant(participant)?;
        x.expect_bits("share", params.q() as usize)?;
        Ok(Share { participant, x })
    }
}

impl fmt::Debug for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Share")
            .field("participant", &self.participant)
            .field("x", &"<redacted>")
            .finish()
    }
}

/// The `position`-th qualified set of secret `secret_index`.
///
/// Members are kept sorted; duplicates are preserved so that validation can
/// report them instead of silently collapsing them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualifiedSet {
    pub secret_index: u32,
    pub position: u32,
    pub members: Vec<u32>,
}

impl QualifiedSet {
    pub fn new(secret_index: u32, position: u32, mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        QualifiedSet {
            secret_index,
            position,
            members,
        }
    }

    pub fn contains(&self, participant: u32) -> bool {
        self.members.binary_search(&participant).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The ordered list of qualified sets for one secret. Supersets of a listed
/// set are not implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StructureRepr", into = "StructureRepr")]
pub struct AccessStructure {
    pub secret_index: u32,
    pub qualified_sets: Vec<QualifiedSet>,
}

/// Wire form: positions are implied by list order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureRepr {
    pub secret_index: u32,
    pub qualified_sets: Vec<Vec<u32>>,
}

impl From<StructureRepr> for AccessStructure {
    fn from(repr: StructureRepr) -> Self {
        AccessStructure::new(repr.secret_index, repr.qualified_sets)
    }
}

impl From<AccessStructure> for StructureRepr {
    fn from(structure: AccessStructure) -> Self {
        StructureRepr {
            secret_index: structure.secret_index,
            qualified_sets: structure
                .qualified_sets
                .into_iter()
                .map(|set| set.members)
                .collect(),
        }
    }
}

impl AccessStructure {
    /// Builds a structure, numbering the sets `1..` in the given order.
    pub fn new(secret_index: u32, sets: Vec<Vec<u32>>) -> Self {
        let qualified_sets = sets
            .into_iter()
            .enumerate()
            .map(|(pos, members)| QualifiedSet::new(secret_index, pos as u32 + 1, members))
            .collect();
        AccessStructure {
            secret_index,
            qualified_sets,
        }
    }

    /// Number of qualified sets, `t_i`.
    pub fn t(&self) -> u32 {
        self.qualified_sets.len() as u32
    }

    pub fn set(&self, position: u32) -> Option<&QualifiedSet> {
        let idx = position.checked_sub(1)? as usize;
        self.qualified_sets.get(idx)
    }

    /// `sum_j |A_ij|`.
    pub fn total_membership(&self) -> usize {
        self.qualified_sets.iter().map(QualifiedSet::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoQualifiedSets,
    CapacityExceeded { t: u32, t_max: u32 },
    SecretIndexOutOfRange { index: u32, k_max: u32 },
    SecretIndexMismatch { position: u32, found: u32 },
    PositionMismatch { expected: u32, found: u32 },
    EmptySet { position: u32 },
    DuplicateMember { position: u32, participant: u32 },
    UnknownParticipant { position: u32, participant: u32 },
    DuplicateSet { position: u32, same_as: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoQualifiedSets => write!(f, "no qualified sets"),
            Violation::CapacityExceeded { t, t_max } => {
                write!(
                    f,
                    "capacity exceeded: {t} qualified sets, at most {t_max} allowed"
                )
            }
            Violation::SecretIndexOutOfRange { index, k_max } => {
                write!(f, "secret index {index} outside 1..={k_max}")
            }
            Violation::SecretIndexMismatch { position, found } => {
                write!(f, "qualified set {position} belongs to secret {found}")
            }
            Violation::PositionMismatch { expected, found } => {
                write!(
                    f,
                    "qualified set at position {expected} is numbered {found}"
                )
            }
            Violation::EmptySet { position } => {
                write!(f, "qualified set {position}: empty qualified set")
            }
            Violation::DuplicateMember {
                position,
                participant,
            } => write!(
                f,
                "qualified set {position}: duplicate member {participant}"
            ),
            Violation::UnknownParticipant {
                position,
                participant,
            } => write!(
                f,
                "qualified set {position}: unknown participant {participant}"
            ),
            Violation::DuplicateSet { position, same_as } => write!(
                f,
                "qualified set {position}: duplicate of qualified set {same_as}"
            ),
        }
    }
}

/// Every violation found in one access structure.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StructureViolations(pub Vec<Violation>);

impl StructureViolations {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }
}

impl fmt::Display for StructureViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, violation) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{violation}")?;
        }
        Ok(())
    }
}

/// Checks every structural rule and reports all violations at once.
pub fn validate_access_structure(
    params: &SchemeParams,
    structure: &AccessStructure,
) -> Result<(), StructureViolations> {
    let mut found = Vec::new();
    let i = structure.secret_index;
    if i < 1 || i > params.k_max() {
        found.push(Violation::SecretIndexOutOfRange {
            index: i,
            k_max: params.k_max(),
        });
    }
    if structure.qualified_sets.is_empty() {
        found.push(Violation::NoQualifiedSets);
    }
    if structure.t() > params.t_max() {
        found.push(Violation::CapacityExceeded {
            t: structure.t(),
            t_max: params.t_max(),
        });
    }

    let mut seen: Vec<(BTreeSet<u32>, u32)> = Vec::new();
    for (pos, set) in structure.qualified_sets.iter().enumerate() {
        let expected = pos as u32 + 1;
        if set.position != expected {
            found.push(Violation::PositionMismatch {
                expected,
                found: set.position,
            });
        }
        if set.secret_index != i {
            found.push(Violation::SecretIndexMismatch {
                position: expected,
                found: set.secret_index,
            });
        }
        if set.members.is_empty() {
            found.push(Violation::EmptySet { position: expected });
        }
        let mut distinct = BTreeSet::new();
        for &member in &set.members {
            if member < 1 || member > params.n() {
                found.push(Violation::UnknownParticipant {
                    position: expected,
                    participant: member,
                });
            }
            if !distinct.insert(member) {
                found.push(Violation::DuplicateMember {
                    position: expected,
                    participant: member,
                });
            }
        }
        if distinct.is_empty() {
            continue;
        }
        match seen.iter().find(|(members, _)| *members == distinct) {
            Some(&(_, same_as)) => found.push(Violation::DuplicateSet {
                position: expected,
                same_as,
            }),
            None => seen.push((distinct, expected)),
        }
    }

    if found.is_empty() {
        Ok(())
    } else {
        Err(StructureViolations(found))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_width(capacity: u32) -> u32 {
        let mut e = 0u32;
        while (1u64 << e) < capacity as u64 {
            e += 1;
        }
        e + 1
    }

    #[test]
    fn widths_from_capacities() {
        let p = SchemeParams::new(256, 5, 4, 4, "sha-256").unwrap();
        assert_eq!((p.l(), p.m()), (3, 3));
        let p = SchemeParams::new(256, 1, 1, 1, "sha-256").unwrap();
        assert_eq!((p.l(), p.m()), (1, 1));
        let p = SchemeParams::new(64, 10, 1000, 20, "sha-256").unwrap();
        assert_eq!((p.l(), p.m()), (11, 6));
        assert_eq!(p.version(), 1);
    }

    #[test]
    fn index_width_matches_brute_force() {
        for cap in (1..=5000).chain([u32::MAX / 2, u32::MAX - 1, u32::MAX]) {
            assert_eq!(index_width(cap), brute_width(cap), "capacity {cap}");
            let w = index_width(cap);
            assert!(1u64 << (w - 1) >= cap as u64);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let err = SchemeParams::new(250, 3, 4, 4, "sha-256").unwrap_err();
        assert!(err.to_string().contains("q must be a multiple of 8"));
        assert!(matches!(
            SchemeParams::new(32, 3, 4, 4, "sha-256"),
            Err(Error::InvalidParams { field: "q", .. })
        ));
        assert!(SchemeParams::new_insecure(32, 3, 4, 4, "sha-256").is_ok());
        assert!(matches!(
            SchemeParams::new(264, 3, 4, 4, "sha-256"),
            Err(Error::InvalidParams { field: "q", .. })
        ));
        assert!(matches!(
            SchemeParams::new(64, 0, 4, 4, "sha-256"),
            Err(Error::InvalidParams { field: "n", .. })
        ));
        assert!(matches!(
            SchemeParams::new(64, 1, 0, 4, "sha-256"),
            Err(Error::InvalidParams { field: "k_max", .. })
        ));
        assert!(matches!(
            SchemeParams::new(64, 1, 1, 0, "sha-256"),
            Err(Error::InvalidParams { field: "t_max", .. })
        ));
        assert!(matches!(
            SchemeParams::new(64, 1, 1, 1, "md5"),
            Err(Error::UnsupportedHash(_))
        ));
    }

    #[test]
    fn params_serde_revalidates() {
        let p = SchemeParams::new(64, 3, 4, 4, "sha-256").unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: SchemeParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let tampered = text.replace("\"l\":3", "\"l\":4");
        assert!(serde_json::from_str::<SchemeParams>(&tampered).is_err());
        let extra = text.replacen('{', "{\"extra\":1,", 1);
        assert!(serde_json::from_str::<SchemeParams>(&extra).is_err());
    }

    fn params() -> SchemeParams {
        SchemeParams::new(64, 3, 4, 2, "sha-256").unwrap()
    }

    #[test]
    fn valid_structure() {
        let s = AccessStructure::new(1, vec![vec![1, 2]]);
        assert_eq!(validate_access_structure(&params(), &s), Ok(()));
    }

    #[test]
    fn empty_set_is_reported() {
        let s = AccessStructure::new(1, vec![vec![1], vec![]]);
        let report = validate_access_structure(&params(), &s).unwrap_err();
        assert_eq!(report.0, vec![Violation::EmptySet { position: 2 }]);
        assert!(report.to_string().contains("empty qualified set"));
    }

    #[test]
    fn capacity_is_reported() {
        let s = AccessStructure::new(1, vec![vec![1], vec![2], vec![3]]);
        let report = validate_access_structure(&params(), &s).unwrap_err();
        assert!(report.to_string().contains("capacity exceeded"));
    }

    #[test]
    fn reports_every_violation() {
        let s = AccessStructure::new(9, vec![vec![1, 1], vec![4], vec![1]]);
        let report = validate_access_structure(&params(), &s).unwrap_err();
        assert_eq!(
            report.0,
            vec![
                Violation::SecretIndexOutOfRange { index: 9, k_max: 4 },
                Violation::CapacityExceeded { t: 3, t_max: 2 },
                Violation::DuplicateMember {
                    position: 1,
                    participant: 1
                },
                Violation::UnknownParticipant {
                    position: 2,
                    participant: 4
                },
                Violation::DuplicateSet {
                    position: 3,
                    same_as: 1
                },
            ]
        );
    }

    #[test]
    fn duplicate_membership_is_reported() {
        let s = AccessStructure::new(1, vec![vec![2, 1], vec![1, 2]]);
        let report = validate_access_structure(&params(), &s).unwrap_err();
        assert_eq!(
            report.0,
            vec![Violation::DuplicateSet {
                position: 2,
                same_as: 1
            }]
        );
    }

    #[test]
    fn validation_is_pure() {
        let s = AccessStructure::new(1, vec![vec![], vec![5, 5]]);
        let a = validate_access_structure(&params(), &s);
        let b = validate_access_structure(&params(), &s);
        assert_eq!(a, b);
    }

    #[test]
    fn secret_and_share_lengths_match_q() {
        let p = params();
        assert!(Secret::new(&p, 1, Block::zeroed(8)).is_ok());
        assert!(Secret::new(&p, 1, Block::zeroed(7)).is_err());
        assert!(Secret::new(&p, 5, Block::zeroed(8)).is_err());
        assert!(Share::new(&p, 3, Block::zeroed(8)).is_ok());
        assert!(Share::new(&p, 4, Block::zeroed(8)).is_err());
    }

    #[test]
    fn debug_redacts_private_values() {
        let p = params();
        let share = Share::new(&p, 1, Block::from_bytes(vec![0xab; 8])).unwrap();
        assert!(!format!("{share:?}").contains("abab"));
        let secret = Secret::new(&p, 1, Block::from_bytes(vec![0xcd; 8])).unwrap();
        assert!(!format!("{secret:?}").contains("cdcd"));
    }

    #[test]
    fn structure_wire_form() {
        let s = AccessStructure::new(2, vec![vec![3, 1], vec![2]]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"secret_index":2,"qualified_sets":[[1,3],[2]]}"#);
        let back: AccessStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.set(2).unwrap().position, 2);
        assert!(back.set(0).is_none());
    }
}
