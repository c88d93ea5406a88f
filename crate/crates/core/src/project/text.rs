//! Concrete syntax of the local language.
//!
//! Units are printed through the surface printer after conversion to a
//! role-free surface declaration, and read back with the local dialect of the
//! parser.

use crate::parse::{parse_file, print_decl, print_stm, Dialect, IdGen};
use crate::syntax::*;

/// Annotation carrying [`UnitMeta`] in printed units.
pub const META_ANNOTATION: &str = "Projection";

#[derive(Debug, Clone, Copy, Default)]
pub struct PrintOptions {
    /// Adds zero-parameter wrappers for methods whose parameters all
    /// project to `Unit`.
    pub courtesy: bool,
}

pub fn print_unit(d: &LocalDecl, opts: PrintOptions) -> String {
    if opts.courtesy {
        print_decl(&to_surface(&with_courtesy(d)))
    } else {
        print_decl(&to_surface(d))
    }
}

pub fn print_local_stm(s: &LocalStm) -> String {
    print_stm(&stm(s))
}

pub fn print_local_exp(e: &LocalExp) -> String {
    crate::parse::print_exp(&exp(e))
}

/// First statement of `s` on one line; used in diagnostics.
pub fn print_stm_head(s: &LocalStm) -> String {
    let head = match s {
        LocalStm::Nil => return "(nothing)".into(),
        LocalStm::Exp(e, _) => LocalStm::seq(e.clone(), LocalStm::Nil),
        LocalStm::VarDecl(t, n, i, _) => LocalStm::VarDecl(t.clone(), n.clone(), i.clone(), Box::new(LocalStm::Nil)),
        LocalStm::Assign(l, o, r, _) => LocalStm::Assign(l.clone(), *o, r.clone(), Box::new(LocalStm::Nil)),
        LocalStm::If(g, a, b, _) => LocalStm::If(g.clone(), a.clone(), b.clone(), Box::new(LocalStm::Nil)),
        LocalStm::Block(b, _) => LocalStm::Block(b.clone(), Box::new(LocalStm::Nil)),
        LocalStm::Switch { guard, cases, default, .. } => LocalStm::Switch {
            guard: guard.clone(),
            cases: cases.clone(),
            default: default.clone(),
            cont: Box::new(LocalStm::Nil),
        },
        LocalStm::Try(b, k, _) => LocalStm::Try(b.clone(), k.clone(), Box::new(LocalStm::Nil)),
        LocalStm::Return(_) => s.clone(),
    };
    let text = print_local_stm(&head);
    text.lines().map(str::trim).collect::<Vec<_>>().join(" ")
}

/// Adds the zero-parameter courtesy wrappers.
pub fn with_courtesy(d: &LocalDecl) -> LocalDecl {
    let mut out = d.clone();
    for m in &d.methods {
        if m.params.is_empty() || !m.params.iter().all(|p| p.te.is_unit()) {
            continue;
        }
        if d.methods.iter().any(|o| o.name == m.name && o.params.is_empty()) {
            continue;
        }
        let recv = (!m.is_static()).then_some(LocalExp::This);
        let call = LocalExp::Call {
            recv: recv.map(Box::new),
            type_args: Vec::new(),
            name: m.name.clone(),
            args: vec![LocalExp::Unit; m.params.len()],
        };
        let body =
            if m.ret == LocalTE::Void { LocalStm::seq(call, LocalStm::Nil) } else { LocalStm::Return(Some(call)) };
        let mut modifiers: Vec<Modifier> = m.modifiers.iter().copied().filter(|x| *x != Modifier::Abstract).collect();
        if d.kind == DeclKind::Interface && !m.is_static() && !modifiers.contains(&Modifier::Default) {
            modifiers.push(Modifier::Default);
        }
        out.methods.push(LocalMethod {
            annotations: Vec::new(),
            modifiers,
            type_params: m.type_params.clone(),
            ret: m.ret.clone(),
            name: m.name.clone(),
            params: Vec::new(),
            body: Some(body),
        });
    }
    out
}

fn sp() -> Span {
    Span::dummy()
}

fn ident(s: &str) -> Ident {
    Ident::new(s, sp())
}

fn named(t: &LocalTE) -> NamedType {
    match t {
        LocalTE::Named(n, args) => {
            NamedType { name: ident(n), roles: Vec::new(), args: args.iter().map(te).collect(), span: sp() }
        }
        LocalTE::Void => NamedType { name: ident("void"), roles: Vec::new(), args: Vec::new(), span: sp() },
    }
}

fn te(t: &LocalTE) -> TypeExpr {
    match t {
        LocalTE::Void => TypeExpr::Void(sp()),
        _ => TypeExpr::Named(named(t)),
    }
}

fn type_params(tps: &[LocalTypeParam]) -> Vec<TypeParam> {
    tps.iter()
        .map(|tp| TypeParam {
            name: ident(&tp.name),
            roles: Vec::new(),
            bounds: tp.bounds.iter().map(te).collect(),
            span: sp(),
        })
        .collect()
}

fn params(ps: &[LocalParam]) -> Vec<Param> {
    ps.iter().map(|p| Param { id: 0, te: te(&p.te), name: ident(&p.name), span: sp() }).collect()
}

fn annotation(a: &LocalAnnotation) -> Annotation {
    Annotation { name: ident(&a.name), args: a.args.iter().map(|(k, v)| (ident(k), v.clone())).collect(), span: sp() }
}

fn mk(kind: ExpKind) -> Exp {
    Exp { id: 0, span: sp(), kind }
}

fn name_exp(n: &str) -> Exp {
    mk(ExpKind::Name(ident(n)))
}

fn exp(e: &LocalExp) -> Exp {
    match e {
        LocalExp::Unit => mk(ExpKind::Field { recv: Box::new(name_exp("Unit")), name: ident("id") }),
        LocalExp::UnitCall(args) => mk(ExpKind::Call {
            recv: Some(Box::new(name_exp("Unit"))),
            type_args: Vec::new(),
            name: ident("id"),
            args: args.iter().map(exp).collect(),
        }),
        LocalExp::Lit(l) => mk(ExpKind::Lit { value: l.clone(), roles: Vec::new(), list: false }),
        LocalExp::Name(n) => name_exp(n),
        LocalExp::This => mk(ExpKind::This),
        LocalExp::Field(r, f) => mk(ExpKind::Field { recv: Box::new(exp(r)), name: ident(f) }),
        LocalExp::Binary(op, l, r) => mk(ExpKind::Binary { op: *op, lhs: Box::new(exp(l)), rhs: Box::new(exp(r)) }),
        LocalExp::Call { recv, type_args, name, args } => mk(ExpKind::Call {
            recv: recv.as_ref().map(|r| Box::new(exp(r))),
            type_args: type_args.iter().map(te).collect(),
            name: ident(name),
            args: args.iter().map(exp).collect(),
        }),
        LocalExp::New { type_args, te: t, args } => mk(ExpKind::New {
            type_args: type_args.iter().map(te).collect(),
            ty: named(t),
            args: args.iter().map(exp).collect(),
        }),
    }
}

fn throw(msg: &str) -> Stm {
    let ex = mk(ExpKind::New {
        type_args: Vec::new(),
        ty: named(&LocalTE::Named("RuntimeException".into(), Vec::new())),
        args: vec![mk(ExpKind::Lit { value: Literal::Str(msg.into()), roles: Vec::new(), list: false })],
    });
    Stm::Throw { exp: ex, span: sp() }
}

fn stm(s: &LocalStm) -> Stm {
    let b = |x: &LocalStm| Box::new(stm(x));
    match s {
        LocalStm::Nil => Stm::Nil,
        LocalStm::Return(e) => Stm::Return { exp: e.as_ref().map(exp), span: sp() },
        LocalStm::Exp(e, c) => Stm::Exp { exp: exp(e), cont: b(c) },
        LocalStm::VarDecl(t, n, i, c) => {
            Stm::VarDecl { id: 0, te: te(t), name: ident(n), init: i.as_ref().map(exp), cont: b(c), span: sp() }
        }
        LocalStm::Assign(l, op, r, c) => Stm::Assign { lhs: exp(l), op: *op, rhs: exp(r), cont: b(c), span: sp() },
        LocalStm::If(g, t, e, c) => Stm::If { cond: exp(g), then: b(t), els: b(e), cont: b(c), span: sp() },
        LocalStm::Block(body, c) => Stm::Block { body: b(body), cont: b(c), span: sp() },
        LocalStm::Switch { guard, cases, default, cont } => Stm::Switch {
            guard: exp(guard),
            cases: cases
                .iter()
                .map(|(l, body)| Case {
                    label: match l {
                        LocalSwArg::Case(c) => SwArg::Case(ident(c)),
                        LocalSwArg::Lit(v) => SwArg::Lit(v.clone()),
                    },
                    body: stm(body),
                    span: sp(),
                })
                .collect(),
            default: default.as_ref().map(|d| match d {
                LocalDefault::Body(x) => b(x),
                LocalDefault::Throw(m) => Box::new(throw(m)),
            }),
            cont: b(cont),
            span: sp(),
        },
        LocalStm::Try(body, catches, c) => Stm::Try {
            body: b(body),
            catches: catches
                .iter()
                .map(|k| Catch { id: 0, te: te(&k.te), name: ident(&k.name), body: stm(&k.body), span: sp() })
                .collect(),
            cont: b(c),
            span: sp(),
        },
    }
}

/// Converts a unit to a role-free surface declaration.
pub fn to_surface(d: &LocalDecl) -> Decl {
    let mut annotations: Vec<Annotation> = Vec::new();
    if let Some(m) = &d.meta {
        annotations.push(Annotation {
            name: ident(META_ANNOTATION),
            args: vec![
                (ident("choreography"), Literal::Str(m.source.clone())),
                (ident("role"), Literal::Str(m.role.clone())),
            ],
            span: sp(),
        });
    }
    annotations.extend(d.annotations.iter().map(annotation));
    Decl {
        kind: d.kind,
        annotations,
        modifiers: d.modifiers.clone(),
        name: ident(&d.name),
        roles: Vec::new(),
        type_params: type_params(&d.type_params),
        extends: d.extends.iter().map(te).collect(),
        implements: d.implements.iter().map(te).collect(),
        fields: d
            .fields
            .iter()
            .map(|f| Field {
                annotations: Vec::new(),
                modifiers: f.modifiers.clone(),
                te: te(&f.te),
                name: ident(&f.name),
                span: sp(),
            })
            .collect(),
        ctors: d
            .ctors
            .iter()
            .map(|c| Ctor {
                annotations: Vec::new(),
                modifiers: c.modifiers.clone(),
                type_params: type_params(&c.type_params),
                name: ident(&d.name),
                params: params(&c.params),
                body: stm(&c.body),
                span: sp(),
            })
            .collect(),
        methods: d
            .methods
            .iter()
            .map(|m| Method {
                annotations: m.annotations.iter().map(annotation).collect(),
                modifiers: m.modifiers.clone(),
                type_params: type_params(&m.type_params),
                ret: te(&m.ret),
                name: ident(&m.name),
                params: params(&m.params),
                body: m.body.as_ref().map(stm),
                span: sp(),
            })
            .collect(),
        cases: d.cases.iter().map(|c| ident(c)).collect(),
        span: sp(),
        prelude: false,
    }
}

fn local_te(t: &TypeExpr) -> LocalTE {
    match t {
        TypeExpr::Void(_) => LocalTE::Void,
        TypeExpr::Named(n) if n.name.name == "void" => LocalTE::Void,
        TypeExpr::Named(n) => LocalTE::Named(n.name.name.clone(), n.args.iter().map(local_te).collect()),
    }
}

fn local_tps(tps: &[TypeParam]) -> Vec<LocalTypeParam> {
    tps.iter()
        .map(|tp| LocalTypeParam { name: tp.name.name.clone(), bounds: tp.bounds.iter().map(local_te).collect() })
        .collect()
}

fn local_params(ps: &[Param]) -> Vec<LocalParam> {
    ps.iter().map(|p| LocalParam { te: local_te(&p.te), name: p.name.name.clone() }).collect()
}

fn local_ann(a: &Annotation) -> LocalAnnotation {
    LocalAnnotation {
        name: a.name.name.clone(),
        args: a.args.iter().map(|(k, v)| (k.name.clone(), v.clone())).collect(),
    }
}

fn is_unit_name(e: &Exp) -> bool {
    matches!(&e.kind, ExpKind::Name(n) if n.name == "Unit")
}

fn local_exp(e: &Exp) -> LocalExp {
    match &e.kind {
        ExpKind::Field { recv, name } if name.name == "id" && is_unit_name(recv) => LocalExp::Unit,
        ExpKind::Call { recv: Some(r), name, args, .. } if name.name == "id" && is_unit_name(r) => {
            LocalExp::UnitCall(args.iter().map(local_exp).collect())
        }
        ExpKind::Lit { value, .. } => LocalExp::Lit(value.clone()),
        ExpKind::Name(n) => LocalExp::Name(n.name.clone()),
        ExpKind::This => LocalExp::This,
        ExpKind::TypeRef { name, .. } => LocalExp::Name(name.name.clone()),
        ExpKind::Field { recv, name } => LocalExp::Field(Box::new(local_exp(recv)), name.name.clone()),
        ExpKind::Binary { op, lhs, rhs } => LocalExp::Binary(*op, Box::new(local_exp(lhs)), Box::new(local_exp(rhs))),
        ExpKind::Call { recv, type_args, name, args } => LocalExp::Call {
            recv: recv.as_ref().map(|r| Box::new(local_exp(r))),
            type_args: type_args.iter().map(local_te).collect(),
            name: name.name.clone(),
            args: args.iter().map(local_exp).collect(),
        },
        ExpKind::New { type_args, ty, args } => LocalExp::New {
            type_args: type_args.iter().map(local_te).collect(),
            te: local_te(&TypeExpr::Named(ty.clone())),
            args: args.iter().map(local_exp).collect(),
        },
        ExpKind::Chain { .. } => LocalExp::Unit,
    }
}

/// Message of a default branch that only throws.
fn throw_message(s: &Stm) -> Option<String> {
    let Stm::Throw { exp, .. } = s else { return None };
    let ExpKind::New { args, .. } = &exp.kind else { return None };
    match args.as_slice() {
        [Exp { kind: ExpKind::Lit { value: Literal::Str(m), .. }, .. }] => Some(m.clone()),
        _ => None,
    }
}

fn local_stm(s: &Stm) -> LocalStm {
    let b = |x: &Stm| Box::new(local_stm(x));
    match s {
        Stm::Nil => LocalStm::Nil,
        Stm::Return { exp, .. } => LocalStm::Return(exp.as_ref().map(local_exp)),
        Stm::Throw { .. } => LocalStm::Nil,
        Stm::Exp { exp, cont } => LocalStm::Exp(local_exp(exp), b(cont)),
        Stm::VarDecl { te, name, init, cont, .. } => {
            LocalStm::VarDecl(local_te(te), name.name.clone(), init.as_ref().map(local_exp), b(cont))
        }
        Stm::Assign { lhs, op, rhs, cont, .. } => LocalStm::Assign(local_exp(lhs), *op, local_exp(rhs), b(cont)),
        Stm::If { cond, then, els, cont, .. } => LocalStm::If(local_exp(cond), b(then), b(els), b(cont)),
        Stm::Block { body, cont, .. } => LocalStm::Block(b(body), b(cont)),
        Stm::Switch { guard, cases, default, cont, .. } => LocalStm::Switch {
            guard: local_exp(guard),
            cases: cases
                .iter()
                .map(|c| {
                    let l = match &c.label {
                        SwArg::Case(i) => LocalSwArg::Case(i.name.clone()),
                        SwArg::Lit(v) => LocalSwArg::Lit(v.clone()),
                    };
                    (l, local_stm(&c.body))
                })
                .collect(),
            default: default.as_ref().map(|d| match throw_message(d) {
                Some(m) => LocalDefault::Throw(m),
                None => LocalDefault::Body(b(d)),
            }),
            cont: b(cont),
        },
        Stm::Try { body, catches, cont, .. } => LocalStm::Try(
            b(body),
            catches
                .iter()
                .map(|k| LocalCatch { te: local_te(&k.te), name: k.name.name.clone(), body: local_stm(&k.body) })
                .collect(),
            b(cont),
        ),
    }
}

/// Converts a declaration parsed in the local dialect.
pub fn from_surface(d: &Decl) -> LocalDecl {
    let mut meta = None;
    let mut annotations = Vec::new();
    for a in &d.annotations {
        if a.name.name == META_ANNOTATION {
            let get = |k: &str| {
                a.args.iter().find(|(n, _)| n.name == k).and_then(|(_, v)| match v {
                    Literal::Str(s) => Some(s.clone()),
                    _ => None,
                })
            };
            if let (Some(source), Some(role)) = (get("choreography"), get("role")) {
                meta = Some(UnitMeta { source, role });
                continue;
            }
        }
        annotations.push(local_ann(a));
    }
    LocalDecl {
        meta,
        kind: d.kind,
        annotations,
        modifiers: d.modifiers.clone(),
        name: d.name.name.clone(),
        type_params: local_tps(&d.type_params),
        extends: d.extends.iter().map(local_te).collect(),
        implements: d.implements.iter().map(local_te).collect(),
        fields: d
            .fields
            .iter()
            .map(|f| LocalField { modifiers: f.modifiers.clone(), te: local_te(&f.te), name: f.name.name.clone() })
            .collect(),
        ctors: d
            .ctors
            .iter()
            .map(|c| LocalCtor {
                modifiers: c.modifiers.clone(),
                type_params: local_tps(&c.type_params),
                params: local_params(&c.params),
                body: local_stm(&c.body),
            })
            .collect(),
        methods: d
            .methods
            .iter()
            .map(|m| LocalMethod {
                annotations: m.annotations.iter().map(local_ann).collect(),
                modifiers: m.modifiers.clone(),
                type_params: local_tps(&m.type_params),
                ret: local_te(&m.ret),
                name: m.name.name.clone(),
                params: local_params(&m.params),
                body: m.body.as_ref().map(local_stm),
            })
            .collect(),
        cases: d.cases.iter().map(|c| c.name.clone()).collect(),
    }
}

/// Parses local-language text into units.
pub fn parse_units(name: &str, text: &str) -> Result<Vec<LocalDecl>, Vec<Diagnostic>> {
    let mut sources = SourceMap::new();
    let file = sources.add(name, text);
    let mut ids = IdGen::new();
    let (decls, diags) = parse_file(file, text, &mut ids, Dialect::Local, false);
    if diag::has_errors(&diags) {
        return Err(diags);
    }
    Ok(decls.iter().map(from_surface).collect())
}
