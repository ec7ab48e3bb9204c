//! Canonical file formats.
//!
//! Every file is a JSON object carrying a `format` tag and `format_version`.
//! Output is canonical: object keys sorted, binary values as lowercase hex,
//! table rows ordered by `(i, j, participant)`, two-space indentation and a
//! trailing newline. Equal values always serialize to identical bytes.
//!
//! Files are written to a temporary file in the destination directory and
//! renamed into place, so readers never observe a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest as _, Sha256};

use crate::block::Block;
use crate::bulletin::{Bulletin, PublicShareValue, SecretCommitment, VerificationEntry};
use crate::combiner::{ParticipantOutcome, ReconstructionSession};
use crate::dealer::DealerState;
use crate::error::{Error, Result};
use crate::hashing::PseudoShare;
use crate::model::{AccessStructure, Participant, SchemeParams, Secret, Share};
use crate::participant::Rejection;

pub const FORMAT_VERSION: u64 = 1;

pub const BULLETIN_FORMAT: &str = "msss-bulletin";
pub const SHARE_FORMAT: &str = "msss-share";
pub const DEALER_STATE_FORMAT: &str = "msss-dealer-state";
pub const PSEUDO_SHARE_FORMAT: &str = "msss-pseudo-share";
pub const SESSION_REPORT_FORMAT: &str = "msss-session-report";

pub const BULLETIN_FILE: &str = "bulletin.json";
pub const DEALER_STATE_FILE: &str = "dealer-state.json";
pub const SESSION_REPORT_FILE: &str = "session-report.json";

pub fn share_file_name(participant: u32) -> String {
    format!("share-{participant}.json")
}

pub fn pseudo_share_file_name(participant: u32, secret_index: u32, set_position: u32) -> String {
    format!("pseudoshare-{participant}-{secret_index}-{set_position}.json")
}

/// Serializes `value` in canonical form.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let tree = sort_keys(serde_json::to_value(value)?);
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text)
}

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sort_keys(v)))
                    .collect(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Identifies a scheme instance: SHA-256 over the canonical params block with
/// the bulletin version removed, as lowercase hex. Renewals keep it stable.
pub fn scheme_fingerprint(params: &SchemeParams) -> String {
    let mut tree = serde_json::to_value(params).expect("params always serialize");
    if let Value::Object(map) = &mut tree {
        map.remove("version");
    }
    let canonical = serde_json::to_string(&sort_keys(tree)).expect("value always serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Checks the `format` tag and version before the typed parse.
fn decode_tagged<T: DeserializeOwned>(text: &str, format: &str) -> Result<T> {
    let tree: Value = serde_json::from_str(text)?;
    let found = tree
        .get("format")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("missing `format` tag"))?;
    if found != format {
        return Err(Error::parse(format!(
            "expected a {format} file, found {found}"
        )));
    }
    let version = tree
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse("missing `format_version`"))?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionUnsupported {
            format: format.to_string(),
            version,
        });
    }
    Ok(serde_json::from_str(text)?)
}

fn check_fingerprint(expected: &str, found: &str) -> Result<()> {
    if expected != found {
        return Err(Error::FingerprintMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------- bulletin

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BulletinFile {
    format: String,
    format_version: u64,
    fingerprint: String,
    params: SchemeParams,
    participants: Vec<Participant>,
    structures: Vec<AccessStructure>,
    public_shares: Vec<PublicShareValue>,
    commitments: Vec<SecretCommitment>,
    verification_table: Vec<VerificationEntry>,
}

/// Canonical text of a bulletin. Inconsistent bulletins are refused.
pub fn encode_bulletin(bulletin: &Bulletin) -> Result<String> {
    bulletin.validate()?;
    to_canonical_json(&BulletinFile {
        format: BULLETIN_FORMAT.into(),
        format_version: FORMAT_VERSION,
        fingerprint: scheme_fingerprint(&bulletin.params),
        params: bulletin.params.clone(),
        participants: bulletin.participants.clone(),
        structures: bulletin.structures.clone(),
        public_shares: bulletin.public_shares.clone(),
        commitments: bulletin.commitments.clone(),
        verification_table: bulletin.verification_table.clone(),
    })
}

/// Parses and fully revalidates a bulletin.
pub fn decode_bulletin(text: &str) -> Result<Bulletin> {
    let file: BulletinFile = decode_tagged(text, BULLETIN_FORMAT)?;
    check_fingerprint(&scheme_fingerprint(&file.params), &file.fingerprint)?;
    let bulletin = Bulletin {
        params: file.params,
        participants: file.participants,
        structures: file.structures,
        public_shares: file.public_shares,
        commitments: file.commitments,
        verification_table: file.verification_table,
    };
    bulletin.validate()?;
    Ok(bulletin)
}

pub fn save_bulletin(bulletin: &Bulletin, path: &Path) -> Result<()> {
    write_atomic(path, encode_bulletin(bulletin)?.as_bytes())
}

pub fn load_bulletin(path: &Path) -> Result<Bulletin> {
    decode_bulletin(&read_text(path)?)
}

// ---------------------------------------------------------------- shares

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShareFile {
    format: String,
    format_version: u64,
    fingerprint: String,
    participant: u32,
    q: u32,
    x: Block,
}

/// A share as stored on disk, before it is matched against an instance.
#[derive(Clone, PartialEq, Eq)]
pub struct ShareRecord {
    pub fingerprint: String,
    pub share: Share,
}

impl std::fmt::Debug for ShareRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShareRecord")
            .field("fingerprint", &self.fingerprint)
            .field("share", &self.share)
            .finish()
    }
}

impl ShareRecord {
    /// Returns the share after checking that it belongs to `params`.
    pub fn bind(self, params: &SchemeParams) -> Result<Share> {
        check_fingerprint(&scheme_fingerprint(params), &self.fingerprint)?;
        Share::new(params, self.share.participant, self.share.x)
    }
}

pub fn encode_share(params: &SchemeParams, share: &Share) -> Result<String> {
    let share = Share::new(params, share.participant, share.x.clone())?;
    to_canonical_json(&ShareFile {
        format: SHARE_FORMAT.into(),
        format_version: FORMAT_VERSION,
        fingerprint: scheme_fingerprint(params),
        participant: share.participant,
        q: params.q(),
        x: share.x,
    })
}

pub fn decode_share(text: &str) -> Result<ShareRecord> {
    let file: ShareFile = decode_tagged(text, SHARE_FORMAT)?;
    file.x.expect_bits("share", file.q as usize)?;
    Ok(ShareRecord {
        fingerprint: file.fingerprint,
        share: Share {
            participant: file.participant,
            x: file.x,
        },
    })
}

pub fn save_share(params: &SchemeParams, share: &Share, path: &Path) -> Result<()> {
    write_atomic(path, encode_share(params, share)?.as_bytes())
}

pub fn load_share(path: &Path) -> Result<ShareRecord> {
    decode_share(&read_text(path)?)
}

/// Loads a share and checks it against the instance described by `params`.
pub fn load_share_for(path: &Path, params: &SchemeParams) -> Result<Share> {
    load_share(path)?.bind(params)
}

// ---------------------------------------------------------------- dealer state

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DealerStateFile {
    format: String,
    format_version: u64,
    fingerprint: String,
    params: SchemeParams,
    participants: Vec<Participant>,
    shares: Vec<Share>,
    secrets: Vec<Secret>,
}

pub fn encode_dealer_state(state: &DealerState) -> Result<String> {
    state.validate()?;
    to_canonical_json(&DealerStateFile {
        format: DEALER_STATE_FORMAT.into(),
        format_version: FORMAT_VERSION,
        fingerprint: scheme_fingerprint(&state.params),
        params: state.params.clone(),
        participants: state.participants.clone(),
        shares: state.shares.clone(),
        secrets: state.secrets.clone(),
    })
}

pub fn decode_dealer_state(text: &str) -> Result<DealerState> {
    let file: DealerStateFile = decode_tagged(text, DEALER_STATE_FORMAT)?;
    check_fingerprint(&scheme_fingerprint(&file.params), &file.fingerprint)?;
    let state = DealerState {
        params: file.params,
        participants: file.participants,
        shares: file.shares,
        secrets: file.secrets,
    };
    state.validate()?;
    Ok(state)
}

pub fn save_dealer_state(state: &DealerState, path: &Path) -> Result<()> {
    write_atomic(path, encode_dealer_state(state)?.as_bytes())
}

pub fn load_dealer_state(path: &Path) -> Result<DealerState> {
    decode_dealer_state(&read_text(path)?)
}

// ---------------------------------------------------------------- pseudo-share records

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PseudoShareFile {
    format: String,
    format_version: u64,
    fingerprint: String,
    participant: u32,
    secret_index: u32,
    set_position: u32,
    value: Block,
}

/// A submission bound to `(participant, i, j)` and to one scheme instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoShareRecord {
    pub fingerprint: String,
    pub pseudo_share: PseudoShare,
}

pub fn encode_pseudo_share(params: &SchemeParams, pseudo: &PseudoShare) -> Result<String> {
    to_canonical_json(&PseudoShareFile {
        format: PSEUDO_SHARE_FORMAT.into(),
        format_version: FORMAT_VERSION,
        fingerprint: scheme_fingerprint(params),
        participant: pseudo.participant,
        secret_index: pseudo.secret_index,
        set_position: pseudo.set_position,
        value: pseudo.value.clone(),
    })
}

pub fn decode_pseudo_share(text: &str) -> Result<PseudoShareRecord> {
    let file: PseudoShareFile = decode_tagged(text, PSEUDO_SHARE_FORMAT)?;
    Ok(PseudoShareRecord {
        fingerprint: file.fingerprint,
        pseudo_share: PseudoShare {
            participant: file.participant,
            secret_index: file.secret_index,
            set_position: file.set_position,
            value: file.value,
        },
    })
}

pub fn save_pseudo_share(params: &SchemeParams, pseudo: &PseudoShare, path: &Path) -> Result<()> {
    write_atomic(path, encode_pseudo_share(params, pseudo)?.as_bytes())
}

pub fn load_pseudo_share(path: &Path) -> Result<PseudoShareRecord> {
    decode_pseudo_share(&read_text(path)?)
}

// ---------------------------------------------------------------- session report

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictLine {
    pub participant: u32,
    /// `accept`, `reject` or `missing`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// The combiner's account of one session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionReport {
    pub format: String,
    pub format_version: u64,
    pub fingerprint: String,
    pub secret_index: u32,
    pub set_position: u32,
    pub success: bool,
    pub secret: Option<Block>,
    pub verdicts: Vec<VerdictLine>,
    pub combiner_hashes: u64,
}

impl SessionReport {
    /// Summarizes a session after [`reconstruct`](crate::reconstruct) has run.
    pub fn from_session(
        params: &SchemeParams,
        session: &ReconstructionSession,
        combiner_hashes: u64,
    ) -> Self {
        let outcome = session.outcome();
        let verdicts = session
            .members()
            .iter()
            .map(|&participant| {
                let verdict = outcome.and_then(|o| o.verdicts.get(&participant)).copied();
                let (outcome, reason) = match verdict {
                    Some(ParticipantOutcome::Accepted) => ("accept", None),
                    Some(ParticipantOutcome::Rejected(Rejection::Mismatch)) => {
                        ("reject", Some("hash mismatch".to_string()))
                    }
                    Some(ParticipantOutcome::Rejected(Rejection::WrongLength {
                        expected_bits,
                        actual_bits,
                    })) => (
                        "reject",
                        Some(format!(
                            "length {actual_bits} bits, expected {expected_bits}"
                        )),
                    ),
                    Some(ParticipantOutcome::Missing) | None => ("missing", None),
                };
                VerdictLine {
                    participant,
                    outcome: outcome.to_string(),
                    reason,
                }
            })
            .collect();
        let secret = outcome.and_then(|o| o.secret.clone());
        SessionReport {
            format: SESSION_REPORT_FORMAT.into(),
            format_version: FORMAT_VERSION,
            fingerprint: scheme_fingerprint(params),
            secret_index: session.secret_index(),
            set_position: session.set_position(),
            success: secret.is_some(),
            secret,
            verdicts,
            combiner_hashes,
        }
    }

    /// Marks `participant` rejected for a reason found before hashing.
    pub fn reject(&mut self, participant: u32, reason: impl Into<String>) {
        if let Some(line) = self
            .verdicts
            .iter_mut()
            .find(|l| l.participant == participant)
        {
            line.outcome = "reject".into();
            line.reason = Some(reason.into());
        }
    }
}

pub fn encode_session_report(report: &SessionReport) -> Result<String> {
    to_canonical_json(report)
}

pub fn decode_session_report(text: &str) -> Result<SessionReport> {
    decode_tagged(text, SESSION_REPORT_FORMAT)
}

pub fn save_session_report(report: &SessionReport, path: &Path) -> Result<()> {
    write_atomic(path, encode_session_report(report)?.as_bytes())
}
