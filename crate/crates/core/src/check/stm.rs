//! Checking of statements and member bodies.

use super::expr::{literal_class, Body};
use super::subtype::{error_type, is_error};
use super::table::Scope;
use super::{CallKind, Checker, NameRef};
use crate::syntax::*;

impl Checker<'_> {
    /// Checks the bodies of user declarations that passed the role
    /// constraints.
    pub(crate) fn check_bodies(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            if c.prelude || self.bad.contains(name) {
                continue;
            }
            let d = &self.program.decls[c.decl];
            for (m, info) in d.methods.iter().zip(&c.methods) {
                let Some(body) = &m.body else { continue };
                let scope = self.method_scope(&c, info);
                let this_ty = (!info.is_static).then(|| c.self_type());
                let params =
                    m.params.iter().zip(&info.params).map(|(p, (n, t))| (n.clone(), t.clone(), p.id)).collect();
                let mut cx = Body { class: name.clone(), scope, this_ty, locals: vec![params], in_ctor: false };
                self.check_stm(&mut cx, body, &info.ret);
            }
            for (k, info) in d.ctors.iter().zip(&c.ctors) {
                let mut scope = Scope::for_class(&c);
                scope.tvars.extend(info.tparams.iter().cloned());
                let params =
                    k.params.iter().zip(&info.params).map(|(p, (n, t))| (n.clone(), t.clone(), p.id)).collect();
                let mut cx = Body {
                    class: name.clone(),
                    scope,
                    this_ty: Some(c.self_type()),
                    locals: vec![params],
                    in_ctor: true,
                };
                self.check_stm(&mut cx, &k.body, &Type::Void);
            }
        }
    }

    fn declare(&mut self, cx: &mut Body, name: &Ident, ty: Type, id: NodeId) {
        if cx.lookup(&name.name).is_some() {
            self.report(Diagnostic::error(
                Code::DuplicateDecl,
                name.span,
                format!("Variable '{}' is already defined.", name.name),
            ));
        }
        self.ann.decls.insert(id, ty.clone());
        cx.locals.last_mut().expect("scope frame").push((name.name.clone(), ty, id));
    }

    fn scoped(&mut self, cx: &mut Body, s: &Stm, expected: &Type) {
        cx.locals.push(Vec::new());
        self.check_stm(cx, s, expected);
        cx.locals.pop();
    }

    pub(crate) fn check_stm(&mut self, cx: &mut Body, s: &Stm, expected: &Type) {
        let mut cur = s;
        let depth = cx.locals.len();
        cx.locals.push(Vec::new());
        loop {
            match cur {
                Stm::Nil => break,
                Stm::Return { exp, span } => {
                    match (exp, expected) {
                        (None, Type::Void) => {}
                        (None, _) => {
                            let shown = self.render(&cx.scope, expected);
                            self.report(Diagnostic::error(
                                Code::TypeMismatch,
                                *span,
                                format!("Missing return value of type '{shown}'."),
                            ));
                        }
                        (Some(e), Type::Void) => {
                            self.synth(cx, e);
                            self.report(Diagnostic::error(
                                Code::TypeMismatch,
                                e.span,
                                "Cannot return a value from a method with result type 'void'.",
                            ));
                        }
                        (Some(e), t) => self.check_exp(cx, e, t),
                    }
                    break;
                }
                Stm::Throw { exp, .. } => {
                    self.synth(cx, exp);
                    break;
                }
                Stm::Exp { exp, cont } => {
                    self.synth(cx, exp);
                    self.check_selection_label(exp);
                    cur = cont;
                }
                Stm::VarDecl { id, te, name, init, cont, .. } => {
                    let ty = self.denote(&cx.scope, te).unwrap_or_else(error_type);
                    self.check_bounds(&cx.scope, te);
                    if ty == Type::Void {
                        self.report(Diagnostic::error(
                            Code::TypeMismatch,
                            te.span(),
                            "A variable cannot have type 'void'.",
                        ));
                    }
                    if let Some(e) = init {
                        self.check_exp(cx, e, &ty);
                    }
                    self.declare(cx, name, ty, *id);
                    cur = cont;
                }
                Stm::Assign { lhs, op, rhs, cont, span } => {
                    self.check_assign(cx, lhs, *op, rhs, *span);
                    cur = cont;
                }
                Stm::If { cond, then, els, cont, .. } => {
                    if let Some(t) = self.synth(cx, cond) {
                        if !is_error(&t) && self.boolean_role(&cx.scope, &t).is_none() {
                            let shown = self.render(&cx.scope, &t);
                            self.report(Diagnostic::error(
                                Code::BadGuard,
                                cond.span,
                                format!("Guard must be a Boolean located at exactly one role, found '{shown}'."),
                            ));
                        }
                    }
                    self.scoped(cx, then, expected);
                    self.scoped(cx, els, expected);
                    cur = cont;
                }
                Stm::Block { body, cont, .. } => {
                    self.scoped(cx, body, expected);
                    cur = cont;
                }
                Stm::Switch { guard, cases, default, cont, .. } => {
                    self.check_switch(cx, guard, cases, expected);
                    if let Some(d) = default {
                        self.scoped(cx, d, expected);
                    }
                    cur = cont;
                }
                Stm::Try { body, catches, cont, .. } => {
                    self.scoped(cx, body, expected);
                    for c in catches {
                        cx.locals.push(Vec::new());
                        let ty = self.denote(&cx.scope, &c.te).unwrap_or_else(error_type);
                        self.declare(cx, &c.name, ty, c.id);
                        self.check_stm(cx, &c.body, expected);
                        cx.locals.pop();
                    }
                    cur = cont;
                }
            }
        }
        cx.locals.truncate(depth);
    }

    fn check_assign(&mut self, cx: &mut Body, lhs: &Exp, op: AsgOp, rhs: &Exp, span: Span) {
        let assignable = matches!(&lhs.kind, ExpKind::Name(_) | ExpKind::Field { .. });
        if !assignable {
            self.synth(cx, lhs);
            self.synth(cx, rhs);
            self.report(Diagnostic::error(
                Code::TypeMismatch,
                lhs.span,
                "Left side of an assignment must be a variable or field.",
            ));
            return;
        }
        let Some(lt) = self.synth(cx, lhs) else {
            self.synth(cx, rhs);
            return;
        };
        match op.binop() {
            None => self.check_exp(cx, rhs, &lt),
            Some(b) => {
                let Some(rt) = self.synth(cx, rhs) else { return };
                let Some(res) = self.binary_type(&cx.scope, b, &lt, &rt, span) else { return };
                if !self.table.is_subtype(&cx.scope, &res, &lt) {
                    let d = Diagnostic::mismatch(rhs.span, self.render(&cx.scope, &lt), self.render(&cx.scope, &res));
                    self.report(d);
                }
            }
        }
    }

    fn check_switch(&mut self, cx: &mut Body, guard: &Exp, cases: &[Case], expected: &Type) {
        let gt = self.synth(cx, guard);
        let kind = gt.as_ref().and_then(|t| {
            if is_error(t) {
                return Some(None);
            }
            let (h, rs) = self.head_roles(&cx.scope, t)?;
            if rs.len() != 1 {
                return None;
            }
            if self.table.get(&h).is_some_and(|c| c.is_enum()) {
                return Some(Some(h));
            }
            matches!(h.as_str(), "Integer" | "String").then(|| Some(h))
        });
        match (&gt, &kind) {
            (Some(t), None) => {
                let shown = self.render(&cx.scope, t);
                self.report(Diagnostic::error(
                    Code::BadGuard,
                    guard.span,
                    format!(
                        "Switch guard must be an enum, Integer or String located at exactly one role, found '{shown}'."
                    ),
                ));
            }
            (_, Some(Some(h))) => {
                let mut seen: Vec<String> = Vec::new();
                for c in cases {
                    let label = match &c.label {
                        SwArg::Case(id) => id.name.clone(),
                        SwArg::Lit(l) => l.to_string(),
                    };
                    let ok = match (&c.label, self.table.get(h)) {
                        (SwArg::Case(id), Some(ci)) if ci.is_enum() => ci.cases.contains(&id.name),
                        (SwArg::Lit(l), _) => literal_class(l) == h,
                        _ => false,
                    };
                    if !ok {
                        self.report(Diagnostic::error(
                            Code::TypeMismatch,
                            c.span,
                            format!("'{label}' is not a valid case label for '{h}'."),
                        ));
                    } else if seen.contains(&label) {
                        self.report(Diagnostic::error(
                            Code::DuplicateDecl,
                            c.span,
                            format!("Duplicate case label '{label}'."),
                        ));
                    }
                    seen.push(label);
                }
            }
            _ => {}
        }
        for c in cases {
            self.scoped(cx, &c.body, expected);
        }
    }

    /// A selection used as a statement must carry a literal enum case.
    fn check_selection_label(&mut self, e: &Exp) {
        let Some(info) = self.ann.calls.get(&e.id) else { return };
        if info.kind != CallKind::Method || !info.selection {
            return;
        }
        let ExpKind::Call { args, .. } = &e.kind else { return };
        let Some(a) = args.first() else { return };
        if !matches!(self.ann.names.get(&a.id), Some(NameRef::EnumCase { .. })) {
            self.report(Diagnostic::error(
                Code::BadSelectionLabel,
                a.span,
                "The argument of a selection must be an enum case.",
            ));
        }
    }
}
