use std::fs;

use msss_core::store::{self, scheme_fingerprint};
use msss_core::testkit::{random_instance, InstanceShape};
use msss_core::{build_bulletin, Bulletin, Error, Hasher, Role};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

mod common;

fn golden_text() -> String {
    fs::read_to_string(common::golden_dir().join("bulletin.json")).unwrap()
}

fn edit(text: &str, f: impl FnOnce(&mut Value)) -> String {
    let mut tree: Value = serde_json::from_str(text).unwrap();
    f(&mut tree);
    serde_json::to_string_pretty(&tree).unwrap()
}

fn sample_bulletin(seed: u64) -> (msss_core::testkit::Instance, Bulletin) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let inst = random_instance(&mut rng, InstanceShape::default()).unwrap();
    let hasher = Hasher::new(&inst.params, Role::Dealer).unwrap();
    let b = build_bulletin(
        &hasher,
        &inst.params,
        &inst.participants,
        &inst.secrets,
        &inst.structures,
        &inst.shares,
    )
    .unwrap();
    (inst, b)
}

#[test]
fn golden_bulletin_loads_and_reencodes_identically() {
    let text = golden_text();
    let b = store::decode_bulletin(&text).unwrap();
    assert_eq!(b.secret_count(), 2);
    assert_eq!(b.public_shares.len(), 3);
    assert_eq!(b.verification_table.len(), 7);
    assert_eq!(b.participants[1].label, "bob");
    assert_eq!(store::encode_bulletin(&b).unwrap(), text);
}

#[test]
fn save_load_save_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (_, b) = sample_bulletin(7);
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    store::save_bulletin(&b, &first).unwrap();
    let loaded = store::load_bulletin(&first).unwrap();
    assert_eq!(loaded, b);
    store::save_bulletin(&loaded, &second).unwrap();
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn wrong_length_public_share_is_an_invariant_violation() {
    let text = edit(&golden_text(), |t| {
        t["public_shares"][0]["value"] = Value::from("00112233");
    });
    match store::decode_bulletin(&text) {
        Err(e @ Error::InvariantViolation(_)) => assert!(e.to_string().contains("length"), "{e}"),
        other => panic!("expected invariant violation, got {other:?}"),
    }
}

#[test]
fn duplicated_row_is_an_invariant_violation() {
    let text = edit(&golden_text(), |t| {
        let rows = t["public_shares"].as_array_mut().unwrap();
        let first = rows[0].clone();
        rows.insert(1, first);
    });
    match store::decode_bulletin(&text) {
        Err(e @ Error::InvariantViolation(_)) => {
            assert!(e.to_string().contains("duplicate row"), "{e}")
        }
        other => panic!("expected invariant violation, got {other:?}"),
    }
}

#[test]
fn missing_verification_entry_is_refused_on_save() {
    let dir = tempfile::tempdir().unwrap();
    let (_, mut b) = sample_bulletin(8);
    b.verification_table.pop();
    let path = dir.path().join("bulletin.json");
    assert!(matches!(
        store::save_bulletin(&b, &path),
        Err(Error::InvariantViolation(_))
    ));
    assert!(!path.exists());
}

#[test]
fn unknown_fields_are_rejected() {
    let text = edit(&golden_text(), |t| {
        t["extra"] = Value::from(1);
    });
    assert!(matches!(
        store::decode_bulletin(&text),
        Err(Error::Parse { .. })
    ));

    let text = edit(&golden_text(), |t| {
        t["commitments"][0]["note"] = Value::from("x");
    });
    assert!(matches!(
        store::decode_bulletin(&text),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn unsupported_format_version_is_reported() {
    let text = edit(&golden_text(), |t| {
        t["format_version"] = Value::from(2);
    });
    assert!(matches!(
        store::decode_bulletin(&text),
        Err(Error::VersionUnsupported { version: 2, .. })
    ));
}

#[test]
fn wrong_format_tag_is_a_parse_error() {
    let share = fs::read_to_string(common::golden_dir().join("share-1.json")).unwrap();
    assert!(matches!(
        store::decode_bulletin(&share),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn malformed_json_reports_a_location() {
    let text = golden_text().replacen("\"commitments\"", "\"commitments\" oops", 1);
    match store::decode_bulletin(&text) {
        Err(Error::Parse { line, column, .. }) => {
            assert!(line > 0);
            assert!(column > 0);
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn edited_params_break_the_fingerprint() {
    let text = edit(&golden_text(), |t| {
        t["params"]["t_max"] = Value::from(3);
    });
    assert!(matches!(
        store::decode_bulletin(&text),
        Err(Error::FingerprintMismatch { .. })
    ));
}

#[test]
fn share_round_trip_preserves_x() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, _) = sample_bulletin(9);
    for share in &inst.shares {
        let path = dir.path().join(store::share_file_name(share.participant));
        store::save_share(&inst.params, share, &path).unwrap();
        let loaded = store::load_share_for(&path, &inst.params).unwrap();
        assert_eq!(&loaded, share);
    }
}

#[test]
fn share_from_another_instance_is_a_fingerprint_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = sample_bulletin(10);
    let (_, b) = sample_bulletin(11);
    assert_ne!(scheme_fingerprint(&a.params), scheme_fingerprint(&b.params));
    let path = dir.path().join("share-1.json");
    store::save_share(&a.params, &a.shares[0], &path).unwrap();
    assert!(matches!(
        store::load_share_for(&path, &b.params),
        Err(Error::FingerprintMismatch { .. })
    ));
}

#[test]
fn identical_params_still_differ_by_instance_id() {
    let mut r1 = ChaCha20Rng::seed_from_u64(1);
    let mut r2 = ChaCha20Rng::seed_from_u64(2);
    let shape = InstanceShape {
        max_participants: 1,
        k_max: 1,
        t_max: 1,
        ..InstanceShape::default()
    };
    let a = random_instance(&mut r1, shape).unwrap();
    let b = random_instance(&mut r2, shape).unwrap();
    assert_ne!(scheme_fingerprint(&a.params), scheme_fingerprint(&b.params));
}

#[test]
fn tampered_share_hex_is_caught() {
    let golden = common::golden_dir();
    let params = store::load_bulletin(&golden.join("bulletin.json"))
        .unwrap()
        .params;
    let text = fs::read_to_string(golden.join("share-1.json")).unwrap();
    let record = store::decode_share(&text).unwrap();
    let x_hex = record.share.x.to_hex();

    // A dropped digit changes the length; a non-hex digit fails to parse.
    let short = text.replace(&x_hex, &x_hex[1..]);
    assert!(store::decode_share(&short)
        .and_then(|r| r.bind(&params))
        .is_err());
    let bad = text.replace(&x_hex, &format!("g{}", &x_hex[1..]));
    assert!(store::decode_share(&bad).is_err());
    let upper = text.replace(&x_hex, &x_hex.to_uppercase());
    if upper != text {
        assert!(store::decode_share(&upper).is_err());
    }

    // A substituted digit parses but yields a pseudo-share the combiner rejects.
    let flipped_digit = if x_hex.starts_with('0') { "1" } else { "0" };
    let altered = text.replace(&x_hex, &format!("{flipped_digit}{}", &x_hex[1..]));
    let share = store::decode_share(&altered)
        .unwrap()
        .bind(&params)
        .unwrap();
    let bulletin = store::load_bulletin(&golden.join("bulletin.json")).unwrap();
    let hasher = Hasher::new(&params, Role::Participant).unwrap();
    let pseudo = msss_core::derive_pseudo_share(&hasher, &share, 1, 1, &bulletin).unwrap();
    let combiner = hasher.for_role(Role::Combiner);
    let verdict =
        msss_core::verify_pseudo_share(&combiner, &bulletin, 1, 1, 1, pseudo.value.as_bytes())
            .unwrap();
    assert!(!verdict.is_accept());
}

#[test]
fn share_length_must_match_q() {
    let golden = common::golden_dir();
    let text = fs::read_to_string(golden.join("share-1.json")).unwrap();
    let edited = edit(&text, |t| {
        t["x"] = Value::from("0011223344556677aa");
    });
    let params = store::load_bulletin(&golden.join("bulletin.json"))
        .unwrap()
        .params;
    assert!(store::decode_share(&edited)
        .and_then(|r| r.bind(&params))
        .is_err());
}

#[test]
fn dealer_state_and_records_round_trip() {
    let golden = common::golden_dir();
    for (name, kind) in [
        ("dealer-state.json", 0),
        ("pseudoshare-2-1-2.json", 1),
        ("session-report.json", 2),
    ] {
        let text = fs::read_to_string(golden.join(name)).unwrap();
        let again = match kind {
            0 => store::encode_dealer_state(&store::decode_dealer_state(&text).unwrap()).unwrap(),
            1 => {
                let r = store::decode_pseudo_share(&text).unwrap();
                let params = store::load_dealer_state(&golden.join("dealer-state.json"))
                    .unwrap()
                    .params;
                store::encode_pseudo_share(&params, &r.pseudo_share).unwrap()
            }
            _ => {
                store::encode_session_report(&store::decode_session_report(&text).unwrap()).unwrap()
            }
        };
        assert_eq!(again, text, "{name}");
    }
}

#[test]
fn writes_are_atomic_replacements() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    store::write_atomic(&path, b"one").unwrap();
    store::write_atomic(&path, b"two").unwrap();
    assert_eq!(fs::read(&path).unwrap(), b"two");
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}
