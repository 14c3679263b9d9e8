mod common;

use proptest::prelude::*;
use uea_lab::families::{abelian, bott_samelson_shadow, random_nilpotent};
use uea_lab::{builtin_family, lie_homology, validate, FamilyParams};

use common::{corpus, ctx};

#[test]
fn corpus_presentations_are_valid() {
    for (name, l) in corpus() {
        let report = validate(&l);
        assert!(report.is_valid(), "{name}: {report}");
    }
    for p in [3, 5, 7] {
        assert!(validate(&bott_samelson_shadow(ctx(p), 16).unwrap()).is_valid());
    }
}

#[test]
fn homology_free_part_is_a_lie_algebra() {
    for (name, l) in corpus() {
        let h = lie_homology(&l, 10).unwrap();
        assert!(h.well_defined, "{name}");
        let report = validate(&h.free_part);
        assert!(report.is_valid(), "{name}: {report}");
        for (n, d) in h.homology.degrees.iter().enumerate() {
            let gens = h.free_part.generators().iter().filter(|g| g.degree as usize == n).count();
            assert_eq!(gens, d.free_rank, "{name} degree {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_families_validate(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7]), gens in 1usize..=6) {
        let l = random_nilpotent(ctx(p), seed, gens).unwrap();
        prop_assert!(validate(&l).is_valid());
        let params = FamilyParams { prime: Some(p), seed, gens: Some(gens), ..FamilyParams::default() };
        prop_assert_eq!(builtin_family("random_nilpotent", &params).unwrap(), l);
    }

    #[test]
    fn abelian_families_validate(degrees in prop::collection::vec(1u32..12, 1..6), p in prop::sample::select(vec![3u64, 5])) {
        prop_assert!(validate(&abelian(ctx(p), &degrees).unwrap()).is_valid());
    }
}
