use std::collections::HashMap;

use msss_core::hashing::pack_input;
use msss_core::model::index_width;
use msss_core::store;
use msss_core::testkit::{
    expected_dealer_hashes, oracle_bulletin, random_instance, Instance, InstanceShape,
};
use msss_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn instance(seed: u64) -> Instance {
    random_instance(
        &mut ChaCha20Rng::seed_from_u64(seed),
        InstanceShape::default(),
    )
    .unwrap()
}

fn deal(inst: &Instance) -> (Hasher, Bulletin) {
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
    (hasher, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn index_widths_leave_headroom(k_max in 1u32..100_000, t_max in 1u32..100_000) {
        let params = SchemeParams::new(64, 1, k_max, t_max, DEFAULT_HASH_ID).unwrap();
        let (l, m) = (params.l(), params.m());
        prop_assert!(1u64 << (l - 1) >= k_max as u64);
        prop_assert!(1u64 << (m - 1) >= t_max as u64);
        if k_max > 1 {
            prop_assert!((1u64 << (l - 2)) < k_max as u64);
        }
        prop_assert_eq!(index_width(k_max), l);
    }

    #[test]
    fn structure_validation_is_pure(
        sets in prop::collection::vec(prop::collection::vec(0u32..7, 0..5), 0..6)
    ) {
        let params = SchemeParams::new(64, 5, 4, 4, DEFAULT_HASH_ID).unwrap();
        let s = AccessStructure::new(1, sets);
        prop_assert_eq!(
            validate_access_structure(&params, &s),
            validate_access_structure(&params, &s)
        );
    }

    #[test]
    fn digests_are_exactly_q_bits(q_bytes in 8u32..=32, input in prop::collection::vec(any::<u8>(), 0..100)) {
        let params = SchemeParams::new(q_bytes * 8, 1, 1, 1, DEFAULT_HASH_ID).unwrap();
        let hasher = Hasher::new(&params, Role::Dealer).unwrap();
        let d = hasher.hash(&input);
        prop_assert_eq!(d.bit_len(), (q_bytes * 8) as usize);
        prop_assert_eq!(hasher.counter().snapshot().total(), 1);
    }

    #[test]
    fn encoding_is_injective(
        k_max in 1u32..64, t_max in 1u32..64,
        x1 in any::<[u8; 8]>(), x2 in any::<[u8; 8]>(),
        i1 in 1u32..64, i2 in 1u32..64, j1 in 1u32..64, j2 in 1u32..64,
    ) {
        let (i1, i2) = (1 + (i1 - 1) % k_max, 1 + (i2 - 1) % k_max);
        let (j1, j2) = (1 + (j1 - 1) % t_max, 1 + (j2 - 1) % t_max);
        let (l, m) = (index_width(k_max), index_width(t_max));
        let a = pack_input(&x1, i1, l, j1, m);
        let b = pack_input(&x2, i2, l, j2, m);
        prop_assert_eq!(a == b, (x1, i1, j1) == (x2, i2, j2));
    }

    #[test]
    fn width_arithmetic_matches_float_log(cap in 1u32..1_000_000) {
        prop_assert_eq!(index_width(cap), (cap as f64).log2().ceil() as u32 + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn secrets_and_shares_share_a_length(seed in any::<u64>()) {
        let inst = instance(seed);
        let q = inst.params.q() as usize;
        prop_assert!(inst.shares.iter().all(|s| s.x.bit_len() == q));
        prop_assert!(inst.secrets.iter().all(|s| s.value.bit_len() == q));
    }

    #[test]
    fn every_row_reconstructs_its_secret(seed in any::<u64>()) {
        let inst = instance(seed);
        let (hasher, b) = deal(&inst);
        let participant = hasher.for_role(Role::Participant);
        let combiner = hasher.for_role(Role::Combiner);
        for s in &b.structures {
            for set in &s.qualified_sets {
                let mut session = ReconstructionSession::open(&b, s.secret_index, set.position).unwrap();
                for &a in &set.members {
                    let p = derive_pseudo_share(&participant, &inst.shares[a as usize - 1], s.secret_index, set.position, &b).unwrap();
                    session.submit(a, p.value).unwrap();
                }
                let got = reconstruct(&combiner, &b, &mut session).unwrap();
                prop_assert_eq!(&got, &inst.secrets[s.secret_index as usize - 1].value);
            }
        }
    }

    #[test]
    fn verification_entries_are_double_hashes(seed in any::<u64>()) {
        let inst = instance(seed);
        let (hasher, b) = deal(&inst);
        for e in &b.verification_table {
            let x = &inst.shares[e.participant as usize - 1].x;
            let p = hasher.pseudo_share_value(x, e.secret_index, e.set_position).unwrap();
            prop_assert_eq!(&hasher.double_hash(&p).unwrap(), &e.digest);
        }
    }

    #[test]
    fn dealer_cost_is_twice_membership_plus_one(seed in any::<u64>()) {
        let inst = instance(seed);
        let (hasher, b) = deal(&inst);
        let tally = hasher.counter().snapshot();
        prop_assert_eq!(tally.dealer, expected_dealer_hashes(&b.structures));
        prop_assert_eq!(tally.total(), tally.dealer + tally.participant + tally.combiner);
        prop_assert_eq!(tally.participant + tally.combiner, 0);
    }

    #[test]
    fn oracle_agrees_with_dealer(seed in any::<u64>()) {
        let inst = instance(seed);
        let (hasher, b) = deal(&inst);
        let oracle = oracle_bulletin(&hasher, &inst.params, &inst.participants, &inst.secrets, &inst.structures, &inst.shares).unwrap();
        prop_assert_eq!(store::encode_bulletin(&oracle).unwrap(), store::encode_bulletin(&b).unwrap());
    }

    #[test]
    fn load_of_save_is_identity(seed in any::<u64>()) {
        let inst = instance(seed);
        let (_, b) = deal(&inst);
        let text = store::encode_bulletin(&b).unwrap();
        let back = store::decode_bulletin(&text).unwrap();
        prop_assert_eq!(&back, &b);
        prop_assert_eq!(store::encode_bulletin(&back).unwrap(), text);
    }

    #[test]
    fn equal_bulletins_iff_equal_bytes(seed in any::<u64>(), row in any::<prop::sample::Index>(), bit in 0usize..64) {
        let inst = instance(seed);
        let (_, b) = deal(&inst);
        let mut other = b.clone();
        let r = row.index(other.public_shares.len());
        other.public_shares[r].value.flip_bit(bit);
        prop_assert_ne!(&other, &b);
        prop_assert_ne!(store::encode_bulletin(&other).unwrap(), store::encode_bulletin(&b).unwrap());
        let same = b.clone();
        prop_assert_eq!(store::encode_bulletin(&same).unwrap(), store::encode_bulletin(&b).unwrap());
    }

    #[test]
    fn bulletins_hold_no_private_hex(seed in any::<u64>()) {
        let inst = instance(seed);
        let (_, b) = deal(&inst);
        let text = store::encode_bulletin(&b).unwrap();
        for s in &inst.secrets {
            prop_assert!(!text.contains(&s.value.to_hex()));
        }
        for s in &inst.shares {
            prop_assert!(!text.contains(&s.x.to_hex()));
        }
    }

    #[test]
    fn pseudo_shares_do_not_transfer_between_rows(seed in any::<u64>()) {
        let inst = instance(seed);
        let (hasher, b) = deal(&inst);
        let combiner = hasher.for_role(Role::Combiner);
        let mut by_participant: HashMap<u32, Vec<(u32, u32, Block)>> = HashMap::new();
        for e in &b.verification_table {
            let x = &inst.shares[e.participant as usize - 1].x;
            let v = hasher.pseudo_share_value(x, e.secret_index, e.set_position).unwrap();
            by_participant.entry(e.participant).or_default().push((e.secret_index, e.set_position, v));
        }
        for (a, rows) in &by_participant {
            for (i, j, v) in rows {
                for (i2, j2, v2) in rows {
                    if (i, j) == (i2, j2) {
                        continue;
                    }
                    prop_assert_ne!(v, v2);
                    let verdict = verify_pseudo_share(&combiner, &b, *a, *i2, *j2, v.as_bytes()).unwrap();
                    prop_assert!(!verdict.is_accept());
                }
            }
        }
    }

    #[test]
    fn renewal_keeps_rows_and_shares(seed in any::<u64>()) {
        let mut inst = instance(seed);
        if inst.secrets.len() as u32 == inst.params.k_max() {
            inst.secrets.pop();
            inst.structures.pop();
        }
        let (hasher, b) = deal(&inst);
        let shares_before = inst.shares.clone();
        let old_text = store::encode_bulletin(&b).unwrap();
        let index = b.secret_count() + 1;
        let secret = Secret::new(&inst.params, index, Block::from_bytes(vec![0x5a; 8])).unwrap();
        let structure = AccessStructure::new(index, vec![vec![1]]);
        let next = add_secret(&hasher, &b, &inst.shares, &secret, &structure).unwrap();
        prop_assert_eq!(&inst.shares, &shares_before);
        prop_assert_eq!(next.version(), b.version() + 1);
        let diff = b.diff(&next);
        prop_assert_eq!(diff.unchanged.len(), b.public_shares.len());
        prop_assert!(diff.changed.is_empty() && diff.removed.is_empty());
        for row in &b.public_shares {
            prop_assert_eq!(Some(row), next.public_share(row.secret_index, row.set_position));
        }
        for e in &b.verification_table {
            prop_assert_eq!(Some(e), next.verification_entry(e.participant, e.secret_index, e.set_position));
        }
        // The next bulletin still loads, and the old text is untouched.
        prop_assert!(store::decode_bulletin(&store::encode_bulletin(&next).unwrap()).is_ok());
        prop_assert_eq!(store::encode_bulletin(&b).unwrap(), old_text);
    }
}
