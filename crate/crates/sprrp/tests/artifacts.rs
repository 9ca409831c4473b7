use std::path::PathBuf;

use proptest::prelude::*;
use sprrp::format::parse_instance;
use sprrp::{serialize_instance, write_lp};
use sprrp_core::mip::linearize;
use sprrp_core::random::{random_instance, RandomSpec};

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(manifest(rel)).unwrap()
}

#[test]
fn fixture_is_canonical() {
    let text = read("fixtures/two_poi.json");
    let inst = parse_instance(&text).unwrap();
    assert!(inst.validate().is_empty());
    assert_eq!(serialize_instance(&inst), text);
}

#[test]
fn fixture_lp_matches_golden() {
    let inst = parse_instance(&read("fixtures/two_poi.json")).unwrap();
    let lp = write_lp(&linearize(&inst).unwrap()).unwrap();
    assert_eq!(lp, read("tests/golden/two_poi.lp"));
}

#[test]
fn fixture_census_matches_golden() {
    let inst = parse_instance(&read("fixtures/two_poi.json")).unwrap();
    let c = linearize(&inst).unwrap().census();
    let golden: Vec<(String, usize)> = read("tests/golden/two_poi.census")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (k, v) = l.split_once(' ').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect();
    let got = vec![
        ("binaries".to_string(), c.binaries),
        ("continuous".to_string(), c.continuous),
        ("constraints".to_string(), c.constraints),
    ];
    assert_eq!(got, golden);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn instances_round_trip(seed in any::<u64>(), pois in 0usize..6) {
        let spec = RandomSpec { min_pois: pois, max_pois: pois, max_vehicles: 3, ..RandomSpec::default() };
        let mut inst = random_instance(seed, &spec);
        if seed % 2 == 0 {
            inst.description = Some(format!("instance {seed}"));
        }
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn lp_names_are_well_formed(seed in any::<u64>()) {
        let inst = random_instance(seed, &RandomSpec { max_span: 3.0, ..RandomSpec::default() });
        let lp = write_lp(&linearize(&inst).unwrap()).unwrap();
        prop_assert!(lp.lines().all(|l| l.len() <= 255));
        prop_assert!(lp.ends_with("End\n"));
    }
}
