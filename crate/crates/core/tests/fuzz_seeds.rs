//! Replays the checked-in fuzz corpus through the fuzz target bodies.

use std::path::PathBuf;

use radkit::emitter::{read_back_stats, Format};
use radkit::formulation::FormulationKind;
use radkit::harness::Manifest;
use radkit::netmodel::{parse_branch_list, parse_network, serialize_network, BranchListOptions};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn texts(target: &str) -> Vec<(String, String)> {
    seeds(target)
        .into_iter()
        .filter_map(|(name, bytes)| String::from_utf8(bytes).ok().map(|t| (name, t)))
        .collect()
}

#[test]
fn parse_network_seeds() {
    let mut parsed = 0;
    for (name, text) in texts("parse_network") {
        if let Ok(net) = parse_network(&text) {
            let again = parse_network(&serialize_network(&net)).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(again.n_buses(), net.n_buses());
            assert_eq!(again.n_branches(), net.n_branches());
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn parse_branch_list_seeds() {
    let opts = BranchListOptions {
        base_kv: 12.66,
        base_mva: 10.0,
        substation: 1,
    };
    let ok = texts("parse_branch_list")
        .iter()
        .filter(|(_, t)| parse_branch_list(t, &opts).is_ok())
        .count();
    assert!(ok >= 1);
}

#[test]
fn read_back_seeds() {
    for (target, format) in [("read_back_lp", Format::Lp), ("read_back_mps", Format::Mps)] {
        let ok = texts(target)
            .iter()
            .filter(|(_, t)| read_back_stats(t, format).is_ok())
            .count();
        assert!(ok >= 2, "{target}");
    }
}

#[test]
fn formulation_kind_seeds() {
    for (_, text) in texts("formulation_kind") {
        if let Ok(kind) = text.parse::<FormulationKind>() {
            assert_eq!(kind.as_str().parse::<FormulationKind>().unwrap(), kind);
        }
    }
}

#[test]
fn manifest_seeds() {
    let results: Vec<bool> = texts("manifest")
        .iter()
        .map(|(_, t)| Manifest::parse(t).is_ok())
        .collect();
    assert!(results.contains(&true) && results.contains(&false));
}
