use std::fs;

use msss_core::store;
use msss_core::testkit::oracle_bulletin;
use msss_core::{Hasher, Role};

mod common;

#[test]
fn regeneration_reproduces_every_fixture() {
    let dir = tempfile::tempdir().unwrap();
    common::regenerate_golden(dir.path());
    for name in common::GOLDEN_FILES {
        let fresh = fs::read(dir.path().join(name)).unwrap();
        let pinned = fs::read(common::golden_dir().join(name)).unwrap();
        assert!(fresh == pinned, "{name} differs from the pinned fixture");
    }
}

#[test]
fn pinned_bulletin_matches_the_oracle() {
    let golden = common::golden_dir();
    let state = store::load_dealer_state(&golden.join("dealer-state.json")).unwrap();
    let text = fs::read_to_string(golden.join("bulletin.json")).unwrap();
    let bulletin = store::decode_bulletin(&text).unwrap();
    let hasher = Hasher::new(&state.params, Role::Dealer).unwrap();
    let oracle = oracle_bulletin(
        &hasher,
        &state.params,
        &state.participants,
        &state.secrets,
        &bulletin.structures,
        &state.shares,
    )
    .unwrap();
    assert_eq!(store::encode_bulletin(&oracle).unwrap(), text);
}

#[test]
fn pinned_values() {
    let golden = common::golden_dir();
    let bulletin = store::load_bulletin(&golden.join("bulletin.json")).unwrap();
    assert_eq!(
        bulletin.public_share(1, 1).unwrap().value.to_hex(),
        "3c17389d62f78daa"
    );
    assert_eq!(
        bulletin.public_share(1, 2).unwrap().value.to_hex(),
        "78a92aff8d9bead3"
    );
    assert_eq!(
        bulletin.public_share(2, 1).unwrap().value.to_hex(),
        "74b708e75c47daf9"
    );
    assert_eq!(
        bulletin
            .verification_entry(1, 1, 1)
            .unwrap()
            .digest
            .to_hex(),
        "c8e4707bc5d7aced"
    );
    let share = store::load_share(&golden.join("share-1.json")).unwrap();
    assert_eq!(share.share.x.to_hex(), "3128bd4371079f5a");
}
