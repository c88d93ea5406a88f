//! Projection of type expressions, expressions and statements at one role.

use std::collections::BTreeSet;

use crate::check::{canonical, roles_of_te, CallKind, Checked, NameRef, TParamInfo};
use crate::syntax::*;

use super::merge::{merge, Conflict};
use super::normalise::normalise_stm;
use super::text::print_stm_head;

pub(crate) const SELECTION_FAILURE: &str = "Unexpected label received by a selection.";

/// Projection state for one member body at one role.
pub(crate) struct Rules<'a> {
    pub checked: &'a Checked,
    pub role: &'a str,
    /// Type parameters in scope: class, then member.
    pub tvars: Vec<TParamInfo>,
    pub diags: Vec<Diagnostic>,
    /// Normalised branch projections of every conditional, when recording.
    pub branches: Option<Vec<Vec<LocalStm>>>,
}

impl<'a> Rules<'a> {
    pub fn new(checked: &'a Checked, role: &'a str, tvars: Vec<TParamInfo>) -> Self {
        Rules { checked, role, tvars, diags: Vec::new(), branches: None }
    }

    fn tvar(&self, name: &str) -> Option<&TParamInfo> {
        self.tvars.iter().rev().find(|t| t.name == name)
    }

    /// Formal role parameters of a class or type variable.
    fn formal_roles(&self, name: &str) -> Vec<String> {
        if let Some(tp) = self.tvar(name) {
            return tp.roles.clone();
        }
        self.checked.table.get(canonical(name)).map(|c| c.roles.clone()).unwrap_or_default()
    }

    /// Number of roles of the `j`-th type parameter of class `head`.
    fn param_arity(&self, head: &str, j: usize) -> usize {
        if self.tvar(head).is_some() {
            return 1;
        }
        self.checked.table.get(canonical(head)).and_then(|c| c.tparams.get(j)).map(|tp| tp.roles.len()).unwrap_or(1)
    }

    pub fn te(&self, te: &TypeExpr) -> LocalTE {
        self.te_at(te, self.role)
    }

    pub fn te_at(&self, te: &TypeExpr, role: &str) -> LocalTE {
        match te {
            TypeExpr::Void(_) => LocalTE::Void,
            TypeExpr::Named(n) => self.named_at(&n.name.name, &n.roles, &n.args, role),
        }
    }

    fn named_at(&self, name: &str, roles: &[RoleRef], args: &[TypeExpr], role: &str) -> LocalTE {
        let name = canonical(name);
        if roles.is_empty() {
            return LocalTE::Named(name.to_string(), self.type_args(name, args, role));
        }
        let Some(i) = roles.iter().position(|r| r.name == role) else {
            return LocalTE::unit();
        };
        let args = self.type_args(name, args, role);
        if roles.len() == 1 {
            return LocalTE::Named(name.to_string(), args);
        }
        let formal = self.formal_roles(name);
        let suffix = formal.get(i).cloned().unwrap_or_else(|| role.to_string());
        LocalTE::Named(format!("{name}_{suffix}"), args)
    }

    fn type_args(&self, head: &str, args: &[TypeExpr], role: &str) -> Vec<LocalTE> {
        let mut out = Vec::new();
        for (j, a) in args.iter().enumerate() {
            out.extend(self.type_arg(a, self.param_arity(head, j), role));
        }
        out
    }

    /// A type argument; bare constructors for multi-role parameters expand
    /// into one argument per role.
    fn type_arg(&self, a: &TypeExpr, arity: usize, role: &str) -> Vec<LocalTE> {
        match a {
            TypeExpr::Void(_) => vec![LocalTE::Void],
            TypeExpr::Named(n) if !n.roles.is_empty() => vec![self.named_at(&n.name.name, &n.roles, &n.args, role)],
            TypeExpr::Named(n) => {
                let name = canonical(&n.name.name);
                let args = self.type_args(name, &n.args, role);
                if arity <= 1 {
                    return vec![LocalTE::Named(name.to_string(), args)];
                }
                self.formal_roles(name)
                    .into_iter()
                    .map(|r| LocalTE::Named(format!("{name}_{r}"), args.clone()))
                    .collect()
            }
        }
    }

    fn call_type_args(&self, tps: &[TParamInfo], args: &[TypeExpr]) -> Vec<LocalTE> {
        let mut out = Vec::new();
        for (j, a) in args.iter().enumerate() {
            let arity = tps.get(j).map(|t| t.roles.len()).unwrap_or(1);
            out.extend(self.type_arg(a, arity, self.role));
        }
        out
    }

    pub fn type_params(&self, tps: &[TypeParam]) -> Vec<LocalTypeParam> {
        let mut out = Vec::new();
        for tp in tps {
            match tp.roles.as_slice() {
                [] => out.push(LocalTypeParam {
                    name: tp.name.name.clone(),
                    bounds: tp.bounds.iter().map(|b| self.te(b)).collect(),
                }),
                [r] => out.push(LocalTypeParam {
                    name: tp.name.name.clone(),
                    bounds: tp.bounds.iter().map(|b| self.te_at(b, &r.name)).collect(),
                }),
                rs => {
                    for r in rs {
                        out.push(LocalTypeParam {
                            name: format!("{}_{}", tp.name.name, r.name),
                            bounds: tp.bounds.iter().map(|b| self.te_at(b, &r.name)).collect(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn params(&self, ps: &[Param]) -> Vec<LocalParam> {
        ps.iter().map(|p| LocalParam { te: self.te(&p.te), name: p.name.name.clone() }).collect()
    }

    fn roles_of(&self, t: &Type) -> BTreeSet<String> {
        self.checked.roles_of_type(&self.tvars, t)
    }

    /// Whether the type recorded for `e` mentions the target role.
    fn located(&self, e: &Exp) -> bool {
        match self.checked.ann.types.get(&e.id) {
            Some(t) => self.roles_of(t).contains(self.role),
            None => match &e.kind {
                ExpKind::Lit { roles, .. } => roles.iter().any(|r| r.name == self.role),
                _ => false,
            },
        }
    }

    /// Whether `e` has any effect at the target role: a subterm typed at
    /// the role, or a call whose footprint includes it.
    fn involves(&self, e: &Exp) -> bool {
        self.checked.roles_of_exp(&self.tvars, e).contains(self.role) || self.calls_role(e)
    }

    fn calls_role(&self, e: &Exp) -> bool {
        match &e.kind {
            ExpKind::Call { recv, args, .. } => {
                let here = self
                    .checked
                    .call(e)
                    .is_some_and(|i| i.kind == CallKind::Method && self.checked.call_roles(i).contains(&self.role));
                here || recv.as_deref().is_some_and(|r| self.calls_role(r)) || args.iter().any(|a| self.calls_role(a))
            }
            ExpKind::New { args, .. } => args.iter().any(|a| self.calls_role(a)),
            ExpKind::Field { recv, .. } => self.calls_role(recv),
            ExpKind::Binary { lhs, rhs, .. } => self.calls_role(lhs) || self.calls_role(rhs),
            ExpKind::Chain { head, .. } => self.calls_role(head),
            ExpKind::Lit { .. } | ExpKind::Name(_) | ExpKind::This | ExpKind::TypeRef { .. } => false,
        }
    }

    pub fn exp(&self, e: &Exp) -> LocalExp {
        match &e.kind {
            ExpKind::Lit { value, .. } => {
                if self.located(e) {
                    LocalExp::Lit(value.clone())
                } else {
                    LocalExp::Unit
                }
            }
            ExpKind::Name(id) => {
                if self.located(e) {
                    LocalExp::Name(id.name.clone())
                } else {
                    LocalExp::Unit
                }
            }
            ExpKind::This => LocalExp::This,
            ExpKind::TypeRef { .. } => self.receiver(e).unwrap_or(LocalExp::Unit),
            ExpKind::Field { recv, name } => {
                if !self.located(e) {
                    return LocalExp::Unit;
                }
                match self.receiver(recv) {
                    Some(r) => LocalExp::Field(Box::new(r), name.name.clone()),
                    None => LocalExp::Unit,
                }
            }
            ExpKind::Binary { op, lhs, rhs } => {
                let (l, r) = (self.exp(lhs), self.exp(rhs));
                if self.located(e) {
                    LocalExp::Binary(*op, Box::new(l), Box::new(r))
                } else {
                    LocalExp::UnitCall(vec![l, r])
                }
            }
            ExpKind::Call { recv, type_args, name, args } => self.call(e, recv.as_deref(), type_args, name, args),
            ExpKind::New { type_args, ty, args } => {
                let pargs: Vec<LocalExp> = args.iter().map(|a| self.exp(a)).collect();
                if !ty.roles.iter().any(|r| r.name == self.role) {
                    return LocalExp::UnitCall(pargs);
                }
                let tps = self
                    .checked
                    .call(e)
                    .and_then(|info| {
                        let c = self.checked.table.get(&info.owner)?;
                        c.ctors.iter().find(|k| k.index == info.index).map(|k| k.tparams.clone())
                    })
                    .unwrap_or_default();
                LocalExp::New {
                    type_args: self.call_type_args(&tps, type_args),
                    te: self.named_at(&ty.name.name, &ty.roles, &ty.args, self.role),
                    args: pargs,
                }
            }
            ExpKind::Chain { .. } => LocalExp::Unit,
        }
    }

    /// Projection of a receiver; static type references become the name of
    /// their projected class, `None` when the role is absent.
    fn receiver(&self, r: &Exp) -> Option<LocalExp> {
        match &r.kind {
            ExpKind::TypeRef { name, roles, args } => {
                if !roles.iter().any(|x| x.name == self.role) {
                    return None;
                }
                let te = self.named_at(&name.name, roles, args, self.role);
                Some(LocalExp::Name(te.name().to_string()))
            }
            _ => Some(self.exp(r)),
        }
    }

    fn call(&self, e: &Exp, recv: Option<&Exp>, type_args: &[TypeExpr], name: &Ident, args: &[Exp]) -> LocalExp {
        let pargs: Vec<LocalExp> = args.iter().map(|a| self.exp(a)).collect();
        let Some(info) = self.checked.call(e) else {
            return LocalExp::UnitCall(pargs);
        };
        if info.kind == CallKind::Super {
            return LocalExp::call(None, "super", pargs);
        }
        let is_type_ref = matches!(recv.map(|r| &r.kind), Some(ExpKind::TypeRef { .. }));
        let kept = match info.kind {
            CallKind::Method => self.checked.call_roles(info).contains(&self.role),
            _ => info.roles.iter().any(|r| r == self.role),
        };
        if !kept {
            let mut parts = Vec::new();
            if let Some(r) = recv.filter(|_| !is_type_ref) {
                parts.push(self.exp(r));
            }
            parts.extend(pargs);
            return LocalExp::UnitCall(parts);
        }
        let tps = self
            .checked
            .table
            .get(&info.owner)
            .and_then(|c| info.index.and_then(|i| c.methods.iter().find(|m| m.index == i)))
            .map(|m| m.tparams.clone())
            .unwrap_or_default();
        LocalExp::Call {
            recv: recv.and_then(|r| self.receiver(r)).map(Box::new),
            type_args: self.call_type_args(&tps, type_args),
            name: name.name.clone(),
            args: pargs,
        }
    }

    /// Label of a selection whose result is delivered to the target role.
    fn selection_label(&self, e: &Exp) -> Option<String> {
        let ExpKind::Call { args, .. } = &e.kind else { return None };
        let info = self.checked.call(e)?;
        if !info.selection || args.len() != 1 {
            return None;
        }
        let t = self.checked.ann.types.get(&e.id)?;
        let roles = self.roles_of(t);
        if roles.len() != 1 || !roles.contains(self.role) {
            return None;
        }
        if !self.checked.table.is_enum_class(t.head_name()?) {
            return None;
        }
        match (&args[0].kind, self.checked.ann.names.get(&args[0].id)) {
            (ExpKind::Field { name, .. }, Some(NameRef::EnumCase { .. })) => Some(name.name.clone()),
            (ExpKind::Name(id), Some(NameRef::EnumCase { .. })) => Some(id.name.clone()),
            _ => None,
        }
    }

    pub fn stm(&mut self, s: &Stm) -> LocalStm {
        match s {
            Stm::Nil | Stm::Throw { .. } => LocalStm::Nil,
            Stm::Return { exp, .. } => LocalStm::Return(exp.as_ref().map(|e| self.exp(e))),
            Stm::Exp { exp, cont } => {
                if let Some(label) = self.selection_label(exp) {
                    let body = self.stm(cont);
                    return LocalStm::Switch {
                        guard: self.exp(exp),
                        cases: vec![(LocalSwArg::Case(label), body)],
                        default: Some(LocalDefault::Throw(SELECTION_FAILURE.into())),
                        cont: Box::new(LocalStm::Nil),
                    };
                }
                let keep = self.involves(exp);
                let c = self.stm(cont);
                if keep {
                    LocalStm::seq(self.exp(exp), c)
                } else {
                    c
                }
            }
            Stm::VarDecl { te, name, init, cont, .. } => {
                let c = self.stm(cont);
                if roles_of_te(te).contains(self.role) {
                    LocalStm::VarDecl(self.te(te), name.name.clone(), init.as_ref().map(|e| self.exp(e)), Box::new(c))
                } else {
                    match init {
                        Some(e) if self.involves(e) => LocalStm::seq(self.exp(e), c),
                        _ => c,
                    }
                }
            }
            Stm::Assign { lhs, op, rhs, cont, .. } => {
                let c = self.stm(cont);
                if self.located(lhs) {
                    LocalStm::Assign(self.exp(lhs), *op, self.exp(rhs), Box::new(c))
                } else if self.involves(lhs) || self.involves(rhs) {
                    LocalStm::seq(LocalExp::UnitCall(vec![self.exp(lhs), self.exp(rhs)]), c)
                } else {
                    c
                }
            }
            Stm::If { cond, then, els, cont, span } => {
                if self.located(cond) {
                    let (t, e) = (self.stm(then), self.stm(els));
                    self.record(&[t.clone(), e.clone()]);
                    return LocalStm::If(self.exp(cond), Box::new(t), Box::new(e), Box::new(self.stm(cont)));
                }
                let branches = [self.stm(then), self.stm(els)];
                let merged = self.merge_all(&branches, *span);
                let c = self.stm(cont);
                LocalStm::seq(self.exp(cond), wrap_block(merged, c))
            }
            Stm::Block { body, cont, .. } => LocalStm::Block(Box::new(self.stm(body)), Box::new(self.stm(cont))),
            Stm::Switch { guard, cases, default, cont, span } => {
                if self.located(guard) {
                    let cases: Vec<(LocalSwArg, LocalStm)> = cases
                        .iter()
                        .map(|c| {
                            let label = match &c.label {
                                SwArg::Case(i) => LocalSwArg::Case(i.name.clone()),
                                SwArg::Lit(l) => LocalSwArg::Lit(l.clone()),
                            };
                            (label, self.stm(&c.body))
                        })
                        .collect();
                    let default = default.as_ref().map(|d| LocalDefault::Body(Box::new(self.stm(d))));
                    let bodies: Vec<LocalStm> = cases.iter().map(|(_, b)| b.clone()).collect();
                    self.record(&bodies);
                    return LocalStm::Switch { guard: self.exp(guard), cases, default, cont: Box::new(self.stm(cont)) };
                }
                let mut branches: Vec<LocalStm> = cases.iter().map(|c| self.stm(&c.body)).collect();
                if let Some(d) = default {
                    branches.push(self.stm(d));
                }
                let merged = self.merge_all(&branches, *span);
                let c = self.stm(cont);
                LocalStm::seq(self.exp(guard), wrap_block(merged, c))
            }
            Stm::Try { body, catches, cont, .. } => {
                let body = self.stm(body);
                let catches = catches
                    .iter()
                    .filter(|k| roles_of_te(&k.te).contains(self.role))
                    .map(|k| LocalCatch { te: self.te(&k.te), name: k.name.name.clone(), body: self.stm(&k.body) })
                    .collect();
                LocalStm::Try(Box::new(body), catches, Box::new(self.stm(cont)))
            }
        }
    }

    fn record(&mut self, branches: &[LocalStm]) {
        if let Some(out) = &mut self.branches {
            out.push(branches.iter().map(normalise_stm).collect());
        }
    }

    /// Merges normalised branch projections, reporting a knowledge-of-choice
    /// failure at `span`.
    fn merge_all(&mut self, branches: &[LocalStm], span: Span) -> LocalStm {
        self.record(branches);
        let mut acc: Option<LocalStm> = None;
        for b in branches {
            let b = normalise_stm(b);
            acc = Some(match acc {
                None => b,
                Some(a) => match merge(&a, &b) {
                    Ok(m) => m,
                    Err(Conflict { left, right }) => {
                        self.diags.push(merge_failure(span, self.role, &left, &right));
                        return LocalStm::Nil;
                    }
                },
            });
        }
        acc.unwrap_or(LocalStm::Nil)
    }
}

/// Sequences merged branch behaviour before `cont`; a block is kept only
/// when it scopes variable declarations.
fn wrap_block(merged: LocalStm, cont: LocalStm) -> LocalStm {
    fn declares(s: &LocalStm) -> bool {
        match s {
            LocalStm::VarDecl(..) => true,
            LocalStm::Exp(_, c)
            | LocalStm::Assign(_, _, _, c)
            | LocalStm::If(_, _, _, c)
            | LocalStm::Block(_, c)
            | LocalStm::Try(_, _, c) => declares(c),
            LocalStm::Switch { cont, .. } => declares(cont),
            LocalStm::Nil | LocalStm::Return(_) => false,
        }
    }
    if merged.is_nil() {
        cont
    } else if declares(&merged) {
        LocalStm::Block(Box::new(merged), Box::new(cont))
    } else {
        merged.append(cont)
    }
}

fn merge_failure(span: Span, role: &str, left: &LocalStm, right: &LocalStm) -> Diagnostic {
    Diagnostic::error(
        Code::MergeFailure,
        span,
        format!(
            "Role '{role}' cannot tell which branch was taken: its projections '{}' and '{}' cannot be merged.",
            print_stm_head(left),
            print_stm_head(right)
        ),
    )
    .with_note(format!("Add a selection that informs '{role}' of the choice in every branch."))
}
