//! Algebraic properties of merging and unit normalisation, on branch
//! projections harvested from the corpus and on generated statements.

use std::path::PathBuf;

use proptest::prelude::*;

use choral_core::prelude::load;
use choral_core::project::{harvest_branches, merge, normalise_stm};
use choral_core::syntax::*;

fn harvested() -> Vec<Vec<LocalStm>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/positive");
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("chor") {
            continue;
        }
        let f = load(&[(path.display().to_string(), std::fs::read_to_string(&path).unwrap())]);
        assert!(!f.has_errors(), "{}", f.render_diags());
        out.extend(harvest_branches(&f.program, &f.checked));
    }
    out
}

fn pairs(sets: &[Vec<LocalStm>]) -> Vec<(LocalStm, LocalStm)> {
    let mut out = Vec::new();
    for set in sets {
        for a in set {
            for b in set {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn check_pair(a: &LocalStm, b: &LocalStm) -> Result<(), String> {
    if normalise_stm(a) != *a {
        return Err(format!("harvested branch is not normal: {a:?}"));
    }
    if merge(a, a).as_ref() != Ok(a) {
        return Err(format!("merge is not idempotent on {a:?}"));
    }
    let ab = merge(a, b).map(|s| s.sorted_cases());
    let ba = merge(b, a).map(|s| s.sorted_cases());
    if ab.is_ok() != ba.is_ok() || (ab.is_ok() && ab != ba) {
        return Err(format!("merge is not symmetric on {a:?} and {b:?}"));
    }
    Ok(())
}

#[test]
fn harvested_branches_satisfy_merge_laws() {
    let sets = harvested();
    let pairs = pairs(&sets);
    assert!(pairs.len() >= 100, "only {} harvested pairs", pairs.len());
    for (a, b) in &pairs {
        check_pair(a, b).unwrap();
    }
}

#[test]
fn unit_residue_normalises_and_merges_to_blank() {
    let residue = LocalStm::seq(LocalExp::UnitCall(vec![LocalExp::Unit]), LocalStm::Nil);
    let n = normalise_stm(&residue);
    assert_eq!(n, LocalStm::Nil);
    assert_eq!(merge(&n, &normalise_stm(&LocalStm::Nil)), Ok(LocalStm::Nil));
}

fn leaf() -> impl Strategy<Value = LocalExp> {
    prop_oneof![
        Just(LocalExp::Unit),
        Just(LocalExp::Name("x".into())),
        Just(LocalExp::Name("y".into())),
        (0i32..3).prop_map(|i| LocalExp::Lit(Literal::Int(i))),
    ]
}

fn exp() -> impl Strategy<Value = LocalExp> {
    leaf().prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(LocalExp::UnitCall),
            (prop_oneof![Just("com"), Just("print")], inner.clone()).prop_map(|(m, a)| LocalExp::call(
                Some(LocalExp::Name("ch".into())),
                m,
                vec![a]
            )),
            (inner.clone(), inner).prop_map(|(l, r)| LocalExp::Binary(BinOp::Add, Box::new(l), Box::new(r))),
        ]
    })
}

fn stm() -> impl Strategy<Value = LocalStm> {
    let base = prop_oneof![Just(LocalStm::Nil), prop::option::of(exp()).prop_map(LocalStm::Return),];
    base.prop_recursive(3, 24, 3, |inner| {
        let b = |s: LocalStm| Box::new(s);
        prop_oneof![
            (exp(), inner.clone()).prop_map(move |(e, c)| LocalStm::Exp(e, b(c))),
            (exp(), inner.clone()).prop_map(move |(e, c)| {
                LocalStm::VarDecl(LocalTE::Named("Integer".into(), vec![]), "v".into(), Some(e), b(c))
            }),
            (exp(), inner.clone(), inner.clone(), inner.clone()).prop_map(move |(g, t, e, c)| LocalStm::If(
                g,
                b(t),
                b(e),
                b(c)
            )),
            (inner.clone(), inner.clone()).prop_map(move |(x, c)| LocalStm::Block(b(x), b(c))),
            (prop::sample::subsequence(vec!["L", "R", "S"], 1..=3), prop::collection::vec(inner.clone(), 3), inner)
                .prop_map(move |(labels, bodies, c)| LocalStm::Switch {
                    guard: LocalExp::call(Some(LocalExp::Name("ch".into())), "select", vec![LocalExp::Unit]),
                    cases: labels.into_iter().zip(bodies).map(|(l, s)| (LocalSwArg::Case(l.into()), s)).collect(),
                    default: Some(LocalDefault::Throw("unexpected".into())),
                    cont: b(c),
                }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn normalising_is_idempotent(s in stm()) {
        let n = normalise_stm(&s);
        prop_assert_eq!(normalise_stm(&n), n);
    }

    #[test]
    fn merge_is_idempotent(s in stm()) {
        let n = normalise_stm(&s);
        prop_assert_eq!(merge(&n, &n), Ok(n.clone()));
    }

    #[test]
    fn merge_is_symmetric_up_to_case_order(a in stm(), b in stm()) {
        let (a, b) = (normalise_stm(&a), normalise_stm(&b));
        let ab = merge(&a, &b).map(|s| s.sorted_cases());
        let ba = merge(&b, &a).map(|s| s.sorted_cases());
        prop_assert_eq!(ab.is_ok(), ba.is_ok());
        if ab.is_ok() {
            prop_assert_eq!(ab, ba);
        }
    }

    #[test]
    fn switch_pairs_merge_by_case_union(a in stm(), b in stm()) {
        let sel = |label: &str, body: LocalStm| LocalStm::Switch {
            guard: LocalExp::call(Some(LocalExp::Name("ch".into())), "select", vec![LocalExp::Unit]),
            cases: vec![(LocalSwArg::Case(label.into()), normalise_stm(&body))],
            default: Some(LocalDefault::Throw("unexpected".into())),
            cont: Box::new(LocalStm::Nil),
        };
        let m = merge(&sel("L", a), &sel("R", b)).unwrap();
        let LocalStm::Switch { cases, .. } = m else { panic!("not a switch") };
        prop_assert_eq!(cases.len(), 2);
    }
}
