//! The oracle and the projected units agree on every corpus program.

use std::path::PathBuf;
use std::time::Duration;

use choral_core::interp::{differential_run, Comparison, Manifest, Status};
use choral_core::prelude::{load, Frontend};
use choral_core::runtime::View;

fn positive(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/positive").join(name)
}

fn frontend(name: &str) -> Frontend {
    let path = positive(&format!("{name}.chor"));
    let text = std::fs::read_to_string(&path).unwrap();
    let f = load(&[(path.display().to_string(), text)]);
    assert!(!f.has_errors(), "{}", f.render_diags());
    f
}

fn manifest(name: &str) -> Manifest {
    Manifest::load(&positive(&format!("{name}.manifest.json"))).unwrap()
}

fn run(name: &str, m: &Manifest) -> Comparison {
    let c = differential_run(&frontend(name), m, Duration::from_secs(10)).expect("projects");
    assert!(c.agrees(), "{name}: {:#?}", c.diffs);
    c
}

fn ints(xs: &[i32]) -> View {
    View::List(xs.iter().map(|x| View::Int(*x)).collect())
}

#[test]
fn hello_roles_prints_at_both_roles() {
    let c = run("HelloRoles", &manifest("HelloRoles"));
    assert_eq!(c.distributed.transcripts["A"], ["Hello from A"]);
    assert_eq!(c.distributed.transcripts["B"], ["Hello from B"]);
}

#[test]
fn mergesort_sorts_at_a() {
    let c = run("Mergesort", &manifest("Mergesort"));
    assert_eq!(c.distributed.returns["A"], ints(&[3, 14, 15]));
    assert_eq!(c.global.returns["A"], ints(&[3, 14, 15]));
}

#[test]
fn mergesort_handles_edge_inputs() {
    let m = manifest("Mergesort");
    for (input, sorted) in
        [(vec![], vec![]), (vec![7], vec![7]), (vec![5, 5, 1, 9, 0, -3, 5], vec![-3, 0, 1, 5, 5, 5, 9])]
    {
        let c = run("Mergesort", &m.with_args("A", vec![serde_json::json!(input)]));
        assert_eq!(c.distributed.returns["A"], ints(&sorted));
    }
}

#[test]
fn karatsuba_multiplies() {
    let c = run("Karatsuba", &manifest("Karatsuba"));
    assert_eq!(c.distributed.returns["A"], View::Long(7_006_652));
}

#[test]
fn consume_items_prints_every_item_at_b() {
    let c = run("ConsumeItems", &manifest("ConsumeItems"));
    assert_eq!(c.distributed.transcripts["B"], ["got 1", "got 2", "got 3"]);
    assert!(c.distributed.transcripts["A"].is_empty());
}

fn token_presence(v: &View) -> Option<bool> {
    let View::Object { fields, .. } = v else { return None };
    fields.values().find_map(|f| match f {
        View::Optional(o) => Some(o.is_some()),
        _ => None,
    })
}

#[test]
fn dist_auth_tokens_are_both_or_neither() {
    let m = manifest("DistAuth");
    let good = run("DistAuth", &m);
    assert_eq!(token_presence(&good.distributed.returns["Client"]), Some(true));
    assert_eq!(token_presence(&good.distributed.returns["Service"]), Some(true));
    let bad = run("DistAuth", &m.with_args("Client", vec!["mallory".into(), "guess".into()]));
    assert_eq!(token_presence(&bad.distributed.returns["Client"]), Some(false));
    assert_eq!(token_presence(&bad.distributed.returns["Service"]), Some(false));
}

#[test]
fn vitals_drop_forged_readings_and_pseudonymise() {
    let c = run("VitalsStreaming", &manifest("VitalsStreaming"));
    let t = &c.distributed.transcripts["Gatherer"];
    assert_eq!(t.len(), 3, "{t:?}");
    assert!(t.iter().all(|l| l.starts_with("anonymous bpm=")), "{t:?}");
}

#[test]
fn remaining_programs_agree() {
    for name in ["BuyerSellerShipper", "DistAuth5", "DistAuth10"] {
        let c = run(name, &manifest(name));
        assert_eq!(c.distributed.status, Status::Ok);
    }
}
