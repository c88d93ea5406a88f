//! Mutable traversal over the surface AST.
//!
//! Implementors override the hooks they care about and call the matching
//! `walk_*` function to keep descending.

use super::ast::*;
use super::span::Span;

pub trait VisitMut {
    fn visit_exp(&mut self, e: &mut Exp) {
        walk_exp(self, e)
    }
    fn visit_stm(&mut self, s: &mut Stm) {
        walk_stm(self, s)
    }
    fn visit_te(&mut self, t: &mut TypeExpr) {
        walk_te(self, t)
    }
    fn visit_span(&mut self, _s: &mut Span) {}
    fn visit_id(&mut self, _id: &mut NodeId) {}
    fn visit_role(&mut self, _r: &mut RoleRef) {}
}

fn ident<V: VisitMut + ?Sized>(v: &mut V, i: &mut Ident) {
    v.visit_span(&mut i.span);
}

fn roles<V: VisitMut + ?Sized>(v: &mut V, rs: &mut [RoleRef]) {
    for r in rs {
        v.visit_role(r);
        v.visit_span(&mut r.span);
    }
}

fn annotations<V: VisitMut + ?Sized>(v: &mut V, anns: &mut [Annotation]) {
    for a in anns {
        ident(v, &mut a.name);
        for (k, _) in &mut a.args {
            ident(v, k);
        }
        v.visit_span(&mut a.span);
    }
}

fn type_params<V: VisitMut + ?Sized>(v: &mut V, tps: &mut [TypeParam]) {
    for tp in tps {
        ident(v, &mut tp.name);
        roles(v, &mut tp.roles);
        for b in &mut tp.bounds {
            v.visit_te(b);
        }
        v.visit_span(&mut tp.span);
    }
}

fn params<V: VisitMut + ?Sized>(v: &mut V, ps: &mut [Param]) {
    for p in ps {
        v.visit_id(&mut p.id);
        v.visit_te(&mut p.te);
        ident(v, &mut p.name);
        v.visit_span(&mut p.span);
    }
}

pub fn walk_named<V: VisitMut + ?Sized>(v: &mut V, n: &mut NamedType) {
    ident(v, &mut n.name);
    roles(v, &mut n.roles);
    for a in &mut n.args {
        v.visit_te(a);
    }
    v.visit_span(&mut n.span);
}

pub fn walk_te<V: VisitMut + ?Sized>(v: &mut V, t: &mut TypeExpr) {
    match t {
        TypeExpr::Void(s) => v.visit_span(s),
        TypeExpr::Named(n) => walk_named(v, n),
    }
}

pub fn walk_decl<V: VisitMut + ?Sized>(v: &mut V, d: &mut Decl) {
    annotations(v, &mut d.annotations);
    ident(v, &mut d.name);
    roles(v, &mut d.roles);
    type_params(v, &mut d.type_params);
    for t in d.extends.iter_mut().chain(d.implements.iter_mut()) {
        v.visit_te(t);
    }
    for f in &mut d.fields {
        annotations(v, &mut f.annotations);
        v.visit_te(&mut f.te);
        ident(v, &mut f.name);
        v.visit_span(&mut f.span);
    }
    for c in &mut d.ctors {
        annotations(v, &mut c.annotations);
        type_params(v, &mut c.type_params);
        ident(v, &mut c.name);
        params(v, &mut c.params);
        v.visit_stm(&mut c.body);
        v.visit_span(&mut c.span);
    }
    for m in &mut d.methods {
        annotations(v, &mut m.annotations);
        type_params(v, &mut m.type_params);
        v.visit_te(&mut m.ret);
        ident(v, &mut m.name);
        params(v, &mut m.params);
        if let Some(b) = &mut m.body {
            v.visit_stm(b);
        }
        v.visit_span(&mut m.span);
    }
    for c in &mut d.cases {
        ident(v, c);
    }
    v.visit_span(&mut d.span);
}

pub fn walk_stm<V: VisitMut + ?Sized>(v: &mut V, s: &mut Stm) {
    match s {
        Stm::Nil => {}
        Stm::Return { exp, span } => {
            if let Some(e) = exp {
                v.visit_exp(e);
            }
            v.visit_span(span);
        }
        Stm::Exp { exp, cont } => {
            v.visit_exp(exp);
            v.visit_stm(cont);
        }
        Stm::VarDecl { id, te, name, init, cont, span } => {
            v.visit_id(id);
            v.visit_te(te);
            ident(v, name);
            if let Some(e) = init {
                v.visit_exp(e);
            }
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::Assign { lhs, rhs, cont, span, .. } => {
            v.visit_exp(lhs);
            v.visit_exp(rhs);
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::If { cond, then, els, cont, span } => {
            v.visit_exp(cond);
            v.visit_stm(then);
            v.visit_stm(els);
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::Block { body, cont, span } => {
            v.visit_stm(body);
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::Switch { guard, cases, default, cont, span } => {
            v.visit_exp(guard);
            for c in cases {
                if let SwArg::Case(i) = &mut c.label {
                    ident(v, i);
                }
                v.visit_stm(&mut c.body);
                v.visit_span(&mut c.span);
            }
            if let Some(d) = default {
                v.visit_stm(d);
            }
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::Try { body, catches, cont, span } => {
            v.visit_stm(body);
            for c in catches {
                v.visit_id(&mut c.id);
                v.visit_te(&mut c.te);
                ident(v, &mut c.name);
                v.visit_stm(&mut c.body);
                v.visit_span(&mut c.span);
            }
            v.visit_span(span);
            v.visit_stm(cont);
        }
        Stm::Throw { exp, span } => {
            v.visit_exp(exp);
            v.visit_span(span);
        }
    }
}

pub fn walk_exp<V: VisitMut + ?Sized>(v: &mut V, e: &mut Exp) {
    v.visit_id(&mut e.id);
    v.visit_span(&mut e.span);
    match &mut e.kind {
        ExpKind::Lit { roles: rs, .. } => roles(v, rs),
        ExpKind::Name(i) => ident(v, i),
        ExpKind::This => {}
        ExpKind::TypeRef { name, roles: rs, args } => {
            ident(v, name);
            roles(v, rs);
            for a in args {
                v.visit_te(a);
            }
        }
        ExpKind::Field { recv, name } => {
            v.visit_exp(recv);
            ident(v, name);
        }
        ExpKind::Binary { lhs, rhs, .. } => {
            v.visit_exp(lhs);
            v.visit_exp(rhs);
        }
        ExpKind::Call { recv, type_args, name, args } => {
            if let Some(r) = recv {
                v.visit_exp(r);
            }
            for t in type_args {
                v.visit_te(t);
            }
            ident(v, name);
            for a in args {
                v.visit_exp(a);
            }
        }
        ExpKind::New { type_args, ty, args } => {
            for t in type_args {
                v.visit_te(t);
            }
            walk_named(v, ty);
            for a in args {
                v.visit_exp(a);
            }
        }
        ExpKind::Chain { head, links } => {
            v.visit_exp(head);
            for l in links {
                v.visit_span(&mut l.span);
                match &mut l.target {
                    ChainTarget::Method { recv, type_args, name } => {
                        v.visit_exp(recv);
                        for t in type_args {
                            v.visit_te(t);
                        }
                        ident(v, name);
                    }
                    ChainTarget::Ctor { type_args, ty } => {
                        for t in type_args {
                            v.visit_te(t);
                        }
                        walk_named(v, ty);
                    }
                }
            }
        }
    }
}

/// Erases spans and node ids so ASTs can be compared structurally.
pub fn strip_program(p: &mut Program) {
    struct Strip;
    impl VisitMut for Strip {
        fn visit_span(&mut self, s: &mut Span) {
            *s = Span::dummy();
        }
        fn visit_id(&mut self, id: &mut NodeId) {
            *id = 0;
        }
    }
    for d in &mut p.decls {
        walk_decl(&mut Strip, d);
    }
}
