use crate::check::table::Scope;
use crate::prelude::{load_str, Frontend};
use crate::syntax::*;

fn errors(src: &str) -> Vec<(Code, usize, String)> {
    let f = load_str("t.chor", src);
    f.diags.iter().filter(|d| d.is_error()).map(|d| (d.code, d.line(&f.sources), d.message.clone())).collect()
}

fn accepts(src: &str) -> Frontend {
    let f = load_str("t.chor", src);
    assert!(!f.has_errors(), "{}", f.render_diags());
    f
}

fn single(src: &str) -> (Code, usize, String) {
    let es = errors(src);
    assert_eq!(es.len(), 1, "{es:?}");
    es.into_iter().next().unwrap()
}

/// Holds `lhs <: rhs` for type expressions written as fields of a probe
/// class over roles (A, B) and a type parameter T.
fn subtype(lhs: &str, rhs: &str) -> bool {
    let src = format!("class Probe@(A, B)<T@X> {{ {lhs} l; {rhs} r; }}");
    let f = load_str("t.chor", &src);
    assert!(!f.has_errors(), "{}", f.render_diags());
    let c = f.checked.table.get("Probe").unwrap();
    let scope = Scope::for_class(c);
    f.checked.table.is_subtype(&scope, &c.fields[0].ty, &c.fields[1].ty)
}

#[test]
fn prelude_checks_cleanly() {
    let f = load_str("t.chor", "");
    assert!(f.diags.is_empty(), "{}", f.render_diags());
}

#[test]
fn sym_channel_hierarchy() {
    let sym = "SymChannel@(A, B)<T>";
    for sup in [
        "DiDataChannel@(A, B)<T>",
        "DiDataChannel@(B, A)<T>",
        "DiSelectChannel@(A, B)",
        "DiSelectChannel@(B, A)",
        "DiChannel@(A, B)<T>",
        "BiChannel@(A, B)<T, T>",
    ] {
        assert!(subtype(sym, sup), "{sym} <: {sup}");
    }
    assert!(!subtype("SymChannel@(B, A)<T>", sym));
    assert!(!subtype(sym, "SymChannel@(B, A)<T>"));
}

#[test]
fn channel_hierarchy_examples() {
    assert!(subtype("BiDataChannel@(A, B)<T, String>", "DiDataChannel@(B, A)<String>"));
    assert!(!subtype("BiDataChannel@(A, B)<T, String>", "DiDataChannel@(A, B)<String>"));
    assert!(subtype("DiChannel@(A, B)<T>", "DiSelectChannel@(A, B)"));
    assert!(subtype("SymDataChannel@(A, B)<T>", "BiDataChannel@(A, B)<T, T>"));
    assert!(subtype("T@A", "T@A"));
    assert!(subtype("Integer@A", "Number@A"));
    assert!(subtype("Integer@A", "Object@A"));
    assert!(!subtype("Integer@A", "Object@B"));
    assert!(!subtype("List@A<Integer>", "List@A<Number>"));
    assert!(subtype("ArrayList@A<Integer>", "List@A<Integer>"));
}

#[test]
fn kind_of_integer_at_role() {
    let f = accepts("class K@(A, B) { Integer@B x; }");
    let c = f.checked.table.get("K").unwrap();
    let scope = Scope::for_class(c);
    let k = f.checked.table.kind_of(&scope, &c.fields[0].ty).unwrap();
    let expected = Kind::Star(Box::new(Type::app(Type::sym("Number"), Type::var("B"))));
    assert_eq!(k, expected);
    assert_eq!(f.checked.table.kind_of(&scope, &Type::var("A")).unwrap(), Kind::Role);
}

#[test]
fn incompatible_types() {
    let (code, line, msg) = single("class C@A {\n  void m() {\n    Integer@A x = \"foo\"@A;\n  }\n}");
    assert_eq!(code, Code::TypeMismatch);
    assert_eq!(line, 3);
    assert_eq!(msg, "Incompatible types: expecting 'Integer@A' found 'String@A'.");
}

#[test]
fn role_mismatch_on_channel_assignment() {
    let src = "class C@(A, B) {\n  void m(SymChannel@(A, B)<String> c) {\n    SymChannel@(B, A)<String> d = c;\n  }\n}";
    let (code, line, msg) = single(src);
    assert_eq!((code, line), (Code::TypeMismatch, 3));
    assert!(msg.contains("SymChannel@(B,A)<String>") || msg.contains("SymChannel@(B, A)<String>"), "{msg}");
}

#[test]
fn role_aliasing() {
    let (code, line, msg) =
        single("class C@(A, B) {\n  void m(DiChannel@(A, A)<String> c) { }\n  void n(Integer@B y) { }\n}");
    assert_eq!((code, line), (Code::RoleAliasing, 2));
    assert_eq!(msg, "Illegal type instantiation: role 'A' must play exactly one role in 'DiChannel'.");
}

#[test]
fn cyclic_inheritance() {
    let (code, line, msg) = single("interface SymChannel@(A, B)<T@X>\n  extends SymChannel@(B, A)<T> { }");
    assert_eq!((code, line), (Code::CyclicInheritance, 2));
    assert_eq!(msg, "Cyclic inheritance: 'SymChannel' cannot extend 'SymChannel'.");
}

#[test]
fn illegal_overload() {
    let src = "class Foo@(A, B) {\n  void m(Char@B x) { }\n  void m(Char@A x) { }\n  void m(Long@A x) { }\n}";
    let (code, line, msg) = single(src);
    assert_eq!((code, line), (Code::IllegalOverload, 4));
    assert_eq!(msg, "Illegal overload: 'm(Long@A x)' and 'm(Char@A x)' have the same signature for role 'B'.");
    accepts("class C@(A, B) {\n  void m(Char@B x) { }\n  void m(Char@A x) { }\n}");
}

#[test]
fn role_set_mismatch() {
    let (code, _, _) = single("interface I@(A, B) { }\ninterface J@(A, B, C) extends I@(A, B) { }");
    assert_eq!(code, Code::RoleSetMismatch);
}

#[test]
fn selection_annotations() {
    let bad = "class C@(A, B) {\n  @SelectionMethod\n  String@B com(String@A m) { return null@B; }\n}";
    assert_eq!(single(bad).0, Code::BadSelectionAnnotation);
    let zero = "enum E@A { X }\nclass C@(A, B) {\n  @SelectionMethod\n  E@B sel() { return null@B; }\n}";
    assert_eq!(single(zero).0, Code::BadSelectionAnnotation);
    accepts("enum E@A { X }\nclass C@(A, B) {\n  @SelectionMethod\n  E@B sel(E@A m) { return null@B; }\n}");
}

#[test]
fn com_returns_subtype_at_receiver() {
    let f = accepts(
        "class C@(A, B) {\n  String@B m(DiDataChannel@(A, B)<Object> ch) {\n    return ch.<String>com(\"x\"@A);\n  }\n}",
    );
    let call = f.checked.ann.calls.values().next().unwrap();
    assert_eq!(call.ret, Type::app(Type::sym("String"), Type::var("B")));
    accepts("class C@(A, B) {\n  String@B m(DiDataChannel@(A, B)<Object> ch) {\n    return ch.com(\"x\"@A);\n  }\n}");
}

#[test]
fn select_infers_enum() {
    accepts(
        "enum Choice@A { GO, STOP }\nclass C@(A, B) {\n  void m(DiChannel@(A, B)<Object> ch) {\n    Choice@B c = ch.<Choice>select(Choice@A.GO);\n    ch.select(Choice@A.STOP);\n  }\n}",
    );
}

#[test]
fn selection_label_must_be_enum_case() {
    let src = "enum Choice@A { GO, STOP }\nclass C@(A, B) {\n  void m(DiChannel@(A, B)<Object> ch, Choice@A c) {\n    ch.<Choice>select(c);\n  }\n}";
    assert_eq!(single(src).0, Code::BadSelectionLabel);
}

#[test]
fn binary_operands_share_a_role() {
    let (code, _, _) = single("class C@(A, B) {\n  void m() {\n    Integer@A x = 1@A + 1@B;\n  }\n}");
    assert_eq!(code, Code::TypeMismatch);
    accepts("class C@(A, B) {\n  Long@A m(Long@A n) {\n    return n * 2L@A + 1@A;\n  }\n}");
}

#[test]
fn guard_must_be_single_role_boolean() {
    let (code, line, _) = single("class C@A {\n  void m(Integer@A x) {\n    if (x) { }\n  }\n}");
    assert_eq!((code, line), (Code::BadGuard, 3));
    accepts(
        "class C@(A, B) {\n  Integer@A m(Integer@A x) {\n    if (x < 3@A) { return x; } else { return 0@A; }\n  }\n}",
    );
}

#[test]
fn return_at_wrong_role() {
    let (code, _, _) = single("class C@(A, B) {\n  String@A m(String@B s) {\n    return s;\n  }\n}");
    assert_eq!(code, Code::TypeMismatch);
}

#[test]
fn ambiguous_overload() {
    let src = "class C@A {\n  void m(String@A s) { }\n  void m(Integer@A i) { }\n  void k() { m(null@A); }\n}";
    assert_eq!(single(src).0, Code::AmbiguousMethod);
    accepts("class C@A {\n  void m(Object@A s) { }\n  void m(String@A i) { }\n  void k() { m(null@A); m(\"s\"@A); m(1@A); }\n}");
}

#[test]
fn nil_body_checks_against_any_type() {
    accepts("class C@A { Integer@A m() { } void n() { } }");
}

#[test]
fn missing_implementation() {
    let src = "interface I@A { void run(); }\nclass C@A implements I@A { }";
    assert_eq!(single(src).0, Code::MissingImplementation);
    accepts("interface I@A { void run(); }\nclass C@A implements I@A { public void run() { } }");
}

#[test]
fn unknown_names() {
    assert_eq!(single("class C@A { void m() { x = 1@A; } }").0, Code::UnknownName);
    assert_eq!(single("class C@A { void m(Foo@A f) { } }").0, Code::UnknownName);
    assert_eq!(single("class C@A { void m(Integer@B f) { } }").0, Code::UnknownName);
}

#[test]
fn literals_need_a_role() {
    assert_eq!(single("class C@A { void m() { Integer@A x = 1; } }").0, Code::MissingRole);
}

#[test]
fn unused_role_is_a_warning() {
    let f = load_str("t.chor", "class C@(A, B) { void m(Integer@A x) { } }");
    assert!(!f.has_errors());
    assert_eq!(f.diags.len(), 1);
    assert_eq!(f.diags[0].code, Code::UnusedRole);
}

#[test]
fn every_expression_is_annotated() {
    let f = accepts(
        "class C@(A, B) {\n  String@B m(SymChannel@(A, B)<Object> ch, String@A s) {\n    String@A t = s + \"!\"@A;\n    return ch.<String>com(t.concat(s));\n  }\n}",
    );
    let mut ids = Vec::new();
    struct Ids<'a>(&'a mut Vec<NodeId>);
    impl crate::syntax::visit::VisitMut for Ids<'_> {
        fn visit_exp(&mut self, e: &mut Exp) {
            self.0.push(e.id);
            crate::syntax::visit::walk_exp(self, e);
        }
    }
    let mut d = f.program.decls.iter().find(|d| d.name.name == "C").unwrap().clone();
    crate::syntax::visit::walk_decl(&mut Ids(&mut ids), &mut d);
    assert!(!ids.is_empty());
    for id in ids {
        assert!(f.checked.ann.types.contains_key(&id), "missing type for {id}");
    }
}

#[test]
fn diagnostics_are_deterministic() {
    let src =
        "class C@(A, B) {\n  void m(Long@A x) { }\n  void m(Char@A x) { }\n  void k() { Integer@A y = \"s\"@A; }\n}";
    assert_eq!(errors(src), errors(src));
}
