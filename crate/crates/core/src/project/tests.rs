use super::rules::SELECTION_FAILURE;
use super::*;
use crate::prelude::load_str;

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn project(name: &str) -> Projection {
    let f = load_str(name, &corpus(name));
    assert!(!f.has_errors(), "{}", f.render_diags());
    let p = project_frontend(&f);
    assert!(!p.has_errors(), "{:?}", p.diags);
    p
}

const POSITIVE: [&str; 9] = [
    "HelloRoles",
    "ConsumeItems",
    "DistAuth",
    "Mergesort",
    "VitalsStreaming",
    "Karatsuba",
    "DistAuth5",
    "DistAuth10",
    "BuyerSellerShipper",
];

fn unit<'p>(p: &'p Projection, name: &str) -> &'p LocalDecl {
    p.units.iter().find(|u| u.name == name).unwrap_or_else(|| panic!("no unit {name}"))
}

fn method<'d>(d: &'d LocalDecl, name: &str) -> &'d LocalStm {
    d.methods.iter().find(|m| m.name == name).and_then(|m| m.body.as_ref()).expect("method with a body")
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn plain(u: &LocalDecl) -> String {
    let mut u = u.clone();
    u.meta = None;
    print_unit(&u, PrintOptions::default())
}

/// First switch reachable from `s`, looking through nested statements.
fn find_switch(s: &LocalStm) -> Option<&LocalStm> {
    match s {
        LocalStm::Switch { .. } => Some(s),
        LocalStm::Nil | LocalStm::Return(_) => None,
        LocalStm::Exp(_, c) | LocalStm::VarDecl(_, _, _, c) | LocalStm::Assign(_, _, _, c) => find_switch(c),
        LocalStm::If(_, a, b, c) => find_switch(a).or_else(|| find_switch(b)).or_else(|| find_switch(c)),
        LocalStm::Block(b, c) | LocalStm::Try(b, _, c) => find_switch(b).or_else(|| find_switch(c)),
    }
}

fn labels(s: &LocalStm) -> (Vec<String>, Option<&LocalDefault>) {
    let LocalStm::Switch { cases, default, .. } = s else { panic!("not a switch") };
    (cases.iter().map(|(l, _)| l.sort_key()).collect(), default.as_ref())
}

#[test]
fn hello_roles_matches_the_expected_units() {
    let p = project("positive/HelloRoles.chor");
    let a =
        "class HelloRoles_A { public static void sayHello() { String a = \"Hello from A\"; System.out.println( a ); }}";
    let b =
        "class HelloRoles_B { public static void sayHello() { String b = \"Hello from B\"; System.out.println( b ); }}";
    assert_eq!(squash(&plain(unit(&p, "HelloRoles_A"))), squash(a));
    assert_eq!(squash(&plain(unit(&p, "HelloRoles_B"))), squash(b));
}

#[test]
fn dist_auth_client_learns_the_outcome_by_switch() {
    let p = project("positive/DistAuth.chor");
    let client = unit(&p, "DistAuth_Client");
    let sw = find_switch(method(client, "authenticate")).expect("switch at Client");
    let (cases, default) = labels(sw);
    assert_eq!(cases, ["OK", "KO"]);
    assert_eq!(default, Some(&LocalDefault::Throw(SELECTION_FAILURE.to_string())));
    let text = squash(&plain(client));
    assert!(
        text.contains(&squash("return new AuthResult_A(ch_Client_IP.<AuthToken>com(Unit.id), Unit.id);")),
        "{text}"
    );
}

#[test]
fn consume_items_receiver_switches_on_go_and_stop() {
    let p = project("positive/ConsumeItems.chor");
    let b = unit(&p, "ConsumeItems_B");
    let (cases, default) = labels(find_switch(method(b, "consumeItems")).expect("switch at B"));
    assert_eq!(cases, ["GO", "STOP"]);
    assert!(matches!(default, Some(LocalDefault::Throw(_))));
}

#[test]
fn consume_items_without_selections_fails_at_b() {
    let f = load_str("ConsumeItemsWrong.chor", &corpus("negative/ConsumeItemsWrong.chor"));
    assert!(!f.has_errors(), "{}", f.render_diags());
    let p = project_frontend(&f);
    let errors: Vec<_> = p.diags.iter().filter(|d| d.is_error()).collect();
    assert_eq!(errors.len(), 1, "{:?}", p.diags);
    assert_eq!(errors[0].code, Code::MergeFailure);
    assert_eq!(errors[0].line(&f.sources), 4);
    assert!(errors[0].message.contains("'B'"), "{}", errors[0].message);
}

#[test]
fn unit_count_equals_role_count() {
    for name in POSITIVE {
        let f = load_str(name, &corpus(&format!("positive/{name}.chor")));
        let p = project_frontend(&f);
        for d in user_decls(&f.program, &f.checked) {
            let n = p.units.iter().filter(|u| u.meta.as_ref().is_some_and(|m| m.source == d.name.name)).count();
            assert_eq!(n, d.roles.len(), "{name}: {}", d.name.name);
        }
    }
}

#[test]
fn projected_text_is_role_free_and_reparses() {
    for name in POSITIVE {
        let p = project(&format!("positive/{name}.chor"));
        for u in &p.units {
            let text = print_unit(u, PrintOptions::default());
            assert!(!text.contains('@') || text.contains("@Projection"), "{text}");
            let back = parse_units(&u.name, &text).unwrap_or_else(|e| panic!("{text}\n{e:?}"));
            assert_eq!(back.len(), 1);
            assert_eq!(print_unit(&back[0], PrintOptions::default()), text, "{name}");
        }
    }
}

#[test]
fn single_role_classes_keep_their_name() {
    let p = project("positive/DistAuth.chor");
    assert!(p.units.iter().any(|u| u.name == "Credentials"));
    assert!(p.units.iter().any(|u| u.name == "DistAuth_IP"));
}

#[test]
fn courtesy_wrappers_fill_unit_arguments() {
    let p = project("positive/VitalsStreaming.chor");
    let device = unit(&p, "VitalsStreaming_Device");
    let text = squash(&print_unit(device, PrintOptions { courtesy: true }));
    assert!(text.contains(&squash("public void gather() { this.gather(Unit.id); }")), "{text}");
    assert!(!squash(&print_unit(device, PrintOptions::default())).contains("publicvoidgather()"));
}

#[test]
fn annotations_record_provenance() {
    let p = project("positive/Mergesort.chor");
    let text = print_unit(unit(&p, "Mergesort_B"), PrintOptions::default());
    assert!(text.starts_with("@Projection(choreography = \"Mergesort\", role = \"B\")"), "{text}");
    assert!(!plain(unit(&p, "Mergesort_B")).contains("@Projection"));
}

#[test]
fn calls_are_kept_where_the_callee_acts() {
    let p = project("positive/VitalsStreaming.chor");
    let device = plain(unit(&p, "VitalsStreaming_Device"));
    assert!(!device.contains("pseudonymise(Unit.id)"), "{device}");
    assert!(device.contains("gather(Unit.id)"), "{device}");
}
