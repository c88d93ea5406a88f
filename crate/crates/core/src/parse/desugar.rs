//! Removal of surface sugar: forward chains and literal role lists.

use super::parser::IdGen;
use crate::syntax::visit::{walk_decl, walk_exp, VisitMut};
use crate::syntax::*;

/// Rewrites every forward chain `e >> obj::<TAs>m` into `obj.<TAs>m(e)`.
pub fn desugar_chain(exp: &mut Exp, ids: &mut IdGen) {
    Chains { ids }.visit_exp(exp);
}

/// Replaces every `lit@[R1,..,Rn]` argument by `lit@R1, .., lit@Rn`.
pub fn expand_literal_lists(program: &mut Program, ids: &mut IdGen) -> Vec<Diagnostic> {
    let mut v = LitLists { ids, diags: Vec::new() };
    for d in &mut program.decls {
        walk_decl(&mut v, d);
    }
    v.diags
}

/// Applies both desugarings to a whole program.
pub fn desugar_program(program: &mut Program, ids: &mut IdGen) -> Vec<Diagnostic> {
    let diags = expand_literal_lists(program, ids);
    let mut v = Chains { ids };
    for d in &mut program.decls {
        walk_decl(&mut v, d);
    }
    diags
}

struct Chains<'a> {
    ids: &'a mut IdGen,
}

impl VisitMut for Chains<'_> {
    fn visit_exp(&mut self, e: &mut Exp) {
        walk_exp(self, e);
        let ExpKind::Chain { head, links } = &mut e.kind else { return };
        let mut acc = std::mem::replace(head.as_mut(), placeholder());
        for link in std::mem::take(links) {
            let span = acc.span.to(link.span);
            let kind = match link.target {
                ChainTarget::Method { recv, type_args, name } => {
                    ExpKind::Call { recv: Some(recv), type_args, name, args: vec![acc] }
                }
                ChainTarget::Ctor { type_args, ty } => ExpKind::New { type_args, ty, args: vec![acc] },
            };
            acc = Exp { id: self.ids.fresh(), span, kind };
        }
        *e = acc;
    }
}

fn placeholder() -> Exp {
    Exp { id: 0, span: Span::dummy(), kind: ExpKind::This }
}

struct LitLists<'a> {
    ids: &'a mut IdGen,
    diags: Vec<Diagnostic>,
}

impl LitLists<'_> {
    fn expand(&mut self, args: &mut Vec<Exp>) {
        if !args.iter().any(is_list) {
            return;
        }
        let mut out = Vec::with_capacity(args.len());
        for a in std::mem::take(args) {
            match a.kind {
                ExpKind::Lit { value, roles, list: true } => {
                    for r in roles {
                        out.push(Exp {
                            id: self.ids.fresh(),
                            span: a.span,
                            kind: ExpKind::Lit { value: value.clone(), roles: vec![r], list: false },
                        });
                    }
                }
                _ => out.push(a),
            }
        }
        *args = out;
    }
}

fn is_list(e: &Exp) -> bool {
    matches!(e.kind, ExpKind::Lit { list: true, .. })
}

impl VisitMut for LitLists<'_> {
    fn visit_exp(&mut self, e: &mut Exp) {
        match &mut e.kind {
            ExpKind::Call { args, .. } | ExpKind::New { args, .. } => self.expand(args),
            ExpKind::Lit { list: true, .. } => {
                self.diags.push(Diagnostic::error(
                    Code::SyntaxError,
                    e.span,
                    "Syntax error: a literal role list is only allowed as a call argument.",
                ));
            }
            _ => {}
        }
        walk_exp(self, e);
    }
}
