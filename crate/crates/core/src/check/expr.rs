//! Expression synthesis and method resolution.

use std::collections::HashMap;

use super::subtype::{abstract_roles, error_type, is_error};
use super::table::{Scope, TParamInfo};
use super::{canonical, CallInfo, CallKind, Checker, NameRef};
use crate::syntax::types::{fresh_name, NULL_SYMBOL};
use crate::syntax::*;

/// Typing context of one member body.
pub(crate) struct Body {
    pub class: String,
    pub scope: Scope,
    pub this_ty: Option<Type>,
    pub locals: Vec<Vec<(String, Type, NodeId)>>,
    pub in_ctor: bool,
}

impl Body {
    pub fn lookup(&self, name: &str) -> Option<(Type, NodeId)> {
        self.locals
            .iter()
            .rev()
            .flat_map(|f| f.iter().rev())
            .find(|(n, _, _)| n == name)
            .map(|(_, t, id)| (t.clone(), *id))
    }
}

/// A method or constructor considered for a call.
#[derive(Debug, Clone)]
pub(crate) struct Cand {
    pub owner: String,
    pub index: Option<usize>,
    pub map: HashMap<String, Type>,
    pub tparams: Vec<TParamInfo>,
    pub params: Vec<Type>,
    pub ret: Type,
    pub is_static: bool,
    pub selection: bool,
}

struct Applied {
    cand: Cand,
    params: Vec<Type>,
    ret: Type,
    targs: Vec<Type>,
}

enum Failure {
    Unknown,
    Mismatch(usize, Type),
    Other,
}

pub(crate) fn literal_class(l: &Literal) -> &'static str {
    match l {
        Literal::Int(_) => "Integer",
        Literal::Long(_) => "Long",
        Literal::Double(_) => "Double",
        Literal::Bool(_) => "Boolean",
        Literal::Str(_) => "String",
        Literal::Null => NULL_SYMBOL,
    }
}

fn numeric_rank(name: &str) -> Option<u8> {
    match name {
        "Integer" => Some(0),
        "Long" => Some(1),
        "Double" => Some(2),
        _ => None,
    }
}

fn role_names(ts: &[&Type]) -> Option<Vec<String>> {
    ts.iter()
        .map(|t| match t {
            Type::Var(v) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

impl Checker<'_> {
    /// Head name and top-level role arguments of a nominal type.
    pub(crate) fn head_roles(&self, scope: &Scope, t: &Type) -> Option<(String, Vec<String>)> {
        let (h, args) = t.spine();
        let name = h.head_name()?.to_string();
        let arity = scope.tvar(&name).map(|tp| tp.roles.len()).unwrap_or_else(|| self.table.role_arity(&name));
        let roles = role_names(&args[..arity.min(args.len())])?;
        Some((name, roles))
    }

    /// `Boolean@R` with exactly one role.
    pub(crate) fn boolean_role(&self, scope: &Scope, t: &Type) -> Option<String> {
        match self.head_roles(scope, t) {
            Some((h, rs)) if h == "Boolean" && rs.len() == 1 && t.spine().1.len() == 1 => Some(rs[0].clone()),
            _ => None,
        }
    }

    pub(crate) fn synth(&mut self, cx: &mut Body, e: &Exp) -> Option<Type> {
        let t = self.synth_inner(cx, e)?;
        self.ann.types.insert(e.id, t.clone());
        Some(t)
    }

    /// Checking mode: synthesises and requires a subtype of `expected`.
    pub(crate) fn check_exp(&mut self, cx: &mut Body, e: &Exp, expected: &Type) {
        if let ExpKind::Lit { value: Literal::Null, roles, .. } = &e.kind {
            if roles.is_empty() {
                let rs = self.head_roles(&cx.scope, expected).map(|(_, r)| r).unwrap_or_default();
                let t = Type::apps(Type::sym(NULL_SYMBOL), rs.iter().map(Type::var));
                self.ann.types.insert(e.id, t);
                return;
            }
        }
        let Some(t) = self.synth(cx, e) else { return };
        if !self.table.is_subtype(&cx.scope, &t, expected) {
            let d = Diagnostic::mismatch(e.span, self.render(&cx.scope, expected), self.render(&cx.scope, &t));
            self.report(d);
        }
    }

    fn synth_inner(&mut self, cx: &mut Body, e: &Exp) -> Option<Type> {
        match &e.kind {
            ExpKind::Lit { value, roles, .. } => {
                let mut ok = true;
                for r in roles {
                    if !cx.scope.has_role(&r.name) {
                        self.report(Diagnostic::error(
                            Code::UnknownName,
                            r.span,
                            format!("Unknown role '{}'.", r.name),
                        ));
                        ok = false;
                    }
                }
                if roles.is_empty() {
                    self.report(Diagnostic::error(
                        Code::MissingRole,
                        e.span,
                        format!("Literal '{value}' must be located at a role."),
                    ));
                    return None;
                }
                if !ok {
                    return None;
                }
                let rs = roles.iter().map(|r| Type::var(&r.name));
                if *value != Literal::Null && roles.len() != 1 {
                    self.report(Diagnostic::error(
                        Code::KindMismatch,
                        e.span,
                        format!("Literal '{value}' must be located at exactly one role."),
                    ));
                    return None;
                }
                Some(Type::apps(Type::sym(literal_class(value)), rs))
            }
            ExpKind::Name(id) => {
                if let Some((t, decl)) = cx.lookup(&id.name) {
                    self.ann.names.insert(e.id, NameRef::Local(decl));
                    return Some(t);
                }
                let self_ty = self.table.get(&cx.class)?.self_type();
                if let Some((owner, ty, is_static)) = self.find_field(&cx.scope, &self_ty, &id.name, false) {
                    if !is_static && cx.this_ty.is_none() {
                        self.report(Diagnostic::error(
                            Code::UnknownName,
                            id.span,
                            format!("Non-static field '{}' cannot be referenced from a static context.", id.name),
                        ));
                        return None;
                    }
                    self.ann.names.insert(e.id, NameRef::Field { owner, is_static });
                    return Some(ty);
                }
                self.report(Diagnostic::error(
                    Code::UnknownName,
                    id.span,
                    format!("Cannot find symbol '{}'.", id.name),
                ));
                None
            }
            ExpKind::This => {
                if cx.this_ty.is_none() {
                    self.report(Diagnostic::error(Code::UnknownName, e.span, "Cannot use 'this' in a static context."));
                }
                cx.this_ty.clone()
            }
            ExpKind::TypeRef { name, .. } => {
                self.report(Diagnostic::error(
                    Code::TypeMismatch,
                    e.span,
                    format!("Type '{}' cannot be used as a value.", name.name),
                ));
                None
            }
            ExpKind::Field { recv, name } => self.synth_field(cx, e, recv, name),
            ExpKind::Binary { op, lhs, rhs } => {
                let lt = self.synth(cx, lhs);
                let rt = self.synth(cx, rhs);
                let (lt, rt) = (lt?, rt?);
                self.binary_type(&cx.scope, *op, &lt, &rt, e.span)
            }
            ExpKind::Call { .. } => self.synth_call(cx, e),
            ExpKind::New { .. } => self.synth_new(cx, e),
            ExpKind::Chain { .. } => {
                self.report(Diagnostic::error(Code::SyntaxError, e.span, "Unexpected forward chain."));
                None
            }
        }
    }

    /// Resolves `cn@(roles)<args>` used as a static receiver.
    fn static_receiver(&mut self, scope: &Scope, recv: &Exp) -> Option<(String, Type)> {
        let ExpKind::TypeRef { name, roles, args } = &recv.kind else { return None };
        let cname = canonical(&name.name).to_string();
        let Some(c) = self.table.get(&cname).cloned() else {
            self.report(Diagnostic::error(Code::UnknownName, name.span, format!("Cannot find symbol '{cname}'.")));
            return None;
        };
        let n = NamedType { name: name.clone(), roles: roles.clone(), args: args.clone(), span: recv.span };
        if args.is_empty() && !c.tparams.is_empty() {
            // Static members do not depend on the type arguments.
            let mut n2 = n.clone();
            n2.args.clear();
            let mut sc = scope.clone();
            let mut t = None;
            if roles.len() == c.roles.len() {
                for r in roles {
                    if !sc.has_role(&r.name) {
                        self.report(Diagnostic::error(
                            Code::UnknownName,
                            r.span,
                            format!("Unknown role '{}'.", r.name),
                        ));
                        return None;
                    }
                }
                let mut n3 = n.clone();
                n3.args.clear();
                let mut aliasing = false;
                for (i, r) in roles.iter().enumerate() {
                    if roles[..i].iter().any(|x| x.name == r.name) {
                        aliasing = true;
                    }
                }
                if aliasing {
                    self.denote_named(&sc, &n3);
                    return None;
                }
                let base = Type::apps(Type::sym(&cname), roles.iter().map(|r| Type::var(&r.name)));
                let tvs: Vec<Type> = c.tparams.iter().map(|tp| Type::var(&tp.name)).collect();
                sc.tvars.extend(c.tparams.iter().cloned());
                t = Some(Type::apps(base, tvs));
            } else {
                self.denote_named(&sc, &n2);
            }
            return t.map(|t| (cname, t));
        }
        let t = self.denote_named(scope, &n)?;
        Some((cname, t))
    }

    fn synth_field(&mut self, cx: &mut Body, e: &Exp, recv: &Exp, name: &Ident) -> Option<Type> {
        if let ExpKind::TypeRef { .. } = &recv.kind {
            let (cname, t) = self.static_receiver(&cx.scope, recv)?;
            let c = self.table.get(&cname)?.clone();
            if c.is_enum() && c.cases.contains(&name.name) {
                self.ann.names.insert(e.id, NameRef::EnumCase { enum_name: cname });
                let (h, args) = t.spine();
                return Some(Type::apps(h.clone(), args.into_iter().take(c.roles.len()).cloned()));
            }
            if let Some((owner, ty, is_static)) = self.find_field(&cx.scope, &t, &name.name, true) {
                self.ann.names.insert(e.id, NameRef::Field { owner, is_static });
                return Some(ty);
            }
            self.report(Diagnostic::error(
                Code::UnknownName,
                name.span,
                format!("Cannot find static member '{}' in '{}'.", name.name, cname),
            ));
            return None;
        }
        let rt = self.synth(cx, recv)?;
        if is_error(&rt) {
            return Some(rt);
        }
        if let Some((owner, ty, is_static)) = self.find_field(&cx.scope, &rt, &name.name, false) {
            self.ann.names.insert(e.id, NameRef::Field { owner, is_static });
            return Some(ty);
        }
        let shown = self.render(&cx.scope, &rt);
        self.report(Diagnostic::error(
            Code::UnknownName,
            name.span,
            format!("Cannot find field '{}' in '{}'.", name.name, shown),
        ));
        None
    }

    /// Field lookup through the supertype closure of `t`.
    pub(crate) fn find_field(
        &self,
        scope: &Scope,
        t: &Type,
        name: &str,
        only_static: bool,
    ) -> Option<(String, Type, bool)> {
        for (cname, map) in self.table.closure(scope, t) {
            let c = self.table.get(&cname)?;
            if let Some(f) = c.fields.iter().find(|f| f.name == name && (!only_static || f.is_static)) {
                return Some((cname.clone(), f.ty.subst(&map).reduce(), f.is_static));
            }
        }
        None
    }

    pub(crate) fn binary_type(&mut self, scope: &Scope, op: BinOp, lt: &Type, rt: &Type, span: Span) -> Option<Type> {
        if is_error(lt) || is_error(rt) {
            return Some(error_type());
        }
        let l = self.head_roles(scope, lt);
        let r = self.head_roles(scope, rt);
        let (Some((ln, lr)), Some((rn, rr))) = (l, r) else {
            return self.bad_operands(scope, op, lt, rt, span);
        };
        if lr.len() != 1 || lr != rr {
            let d = Diagnostic::error(
                Code::TypeMismatch,
                span,
                format!(
                    "Operands of '{}' must be located at the same role, found '{}' and '{}'.",
                    op.symbol(),
                    self.render(scope, lt),
                    self.render(scope, rt)
                ),
            );
            self.report(d);
            return None;
        }
        let role = Type::var(&lr[0]);
        let at = |n: &str| Some(Type::app(Type::sym(n), role.clone()));
        let (lk, rk) = (numeric_rank(&ln), numeric_rank(&rn));
        let promote = |a: u8, b: u8| ["Integer", "Long", "Double"][a.max(b) as usize];
        match op {
            BinOp::And | BinOp::Or if ln == "Boolean" && rn == "Boolean" => at("Boolean"),
            BinOp::BitAnd | BinOp::BitOr if ln == "Boolean" && rn == "Boolean" => at("Boolean"),
            BinOp::BitAnd | BinOp::BitOr => match (lk, rk) {
                (Some(a), Some(b)) if a < 2 && b < 2 => at(promote(a, b)),
                _ => self.bad_operands(scope, op, lt, rt, span),
            },
            BinOp::Eq | BinOp::Ne => at("Boolean"),
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => match (lk, rk) {
                (Some(_), Some(_)) => at("Boolean"),
                _ => self.bad_operands(scope, op, lt, rt, span),
            },
            BinOp::Add if ln == "String" || rn == "String" => at("String"),
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => match (lk, rk) {
                (Some(a), Some(b)) => at(promote(a, b)),
                _ => self.bad_operands(scope, op, lt, rt, span),
            },
            _ => self.bad_operands(scope, op, lt, rt, span),
        }
    }

    fn bad_operands(&mut self, scope: &Scope, op: BinOp, lt: &Type, rt: &Type, span: Span) -> Option<Type> {
        let d = Diagnostic::error(
            Code::TypeMismatch,
            span,
            format!(
                "Operator '{}' cannot be applied to '{}' and '{}'.",
                op.symbol(),
                self.render(scope, lt),
                self.render(scope, rt)
            ),
        );
        self.report(d);
        None
    }

    fn method_cands(&self, scope: &Scope, t: &Type, name: &str) -> Vec<Cand> {
        let mut out = Vec::new();
        for (cname, map) in self.table.closure(scope, t) {
            let Some(c) = self.table.get(&cname) else { continue };
            for m in c.methods.iter().filter(|m| m.name == name) {
                out.push(Cand {
                    owner: cname.clone(),
                    index: Some(m.index),
                    map: map.clone(),
                    tparams: m.tparams.clone(),
                    params: m.params.iter().map(|(_, t)| t.clone()).collect(),
                    ret: m.ret.clone(),
                    is_static: m.is_static,
                    selection: m.selection,
                });
            }
        }
        out
    }

    fn synth_call(&mut self, cx: &mut Body, e: &Exp) -> Option<Type> {
        let ExpKind::Call { recv, type_args, name, args } = &e.kind else { unreachable!() };
        if recv.is_none() && name.name == "super" {
            return self.synth_super(cx, e, args);
        }
        let (cands, recv_ty, static_only) = match recv {
            None => {
                let c = self.table.get(&cx.class)?;
                let self_ty = c.self_type();
                let mut cands = self.method_cands(&cx.scope, &self_ty, &name.name);
                let static_ctx = cx.this_ty.is_none();
                if static_ctx && cands.iter().any(|c| c.is_static) {
                    cands.retain(|c| c.is_static);
                }
                (cands, Some(self_ty), static_ctx)
            }
            Some(r) if matches!(r.kind, ExpKind::TypeRef { .. }) => {
                let (_, t) = self.static_receiver(&cx.scope, r)?;
                let mut cands = self.method_cands(&cx.scope, &t, &name.name);
                cands.retain(|c| c.is_static);
                (cands, None, true)
            }
            Some(r) => {
                let t = self.synth(cx, r)?;
                if is_error(&t) {
                    for a in args {
                        self.synth(cx, a);
                    }
                    return Some(t);
                }
                (self.method_cands(&cx.scope, &t, &name.name), Some(t), false)
            }
        };
        let arg_tys: Vec<Option<Type>> = args.iter().map(|a| self.synth(cx, a)).collect();
        let arg_tys: Vec<Type> = arg_tys.into_iter().collect::<Option<_>>()?;
        if cands.is_empty() {
            let shown = match &recv_ty {
                Some(t) => self.render(&cx.scope, t),
                None => recv.as_ref().map(|r| crate::parse::print_exp(r)).unwrap_or_default(),
            };
            self.report(Diagnostic::error(
                Code::UnknownName,
                name.span,
                format!("Cannot find method '{}' in '{}'.", name.name, shown),
            ));
            return None;
        }
        let applied = self.resolve(&cx.scope, cands, type_args, &arg_tys, &name.name, args, e.span)?;
        if static_only && !applied.cand.is_static {
            self.report(Diagnostic::error(
                Code::NoApplicableMethod,
                name.span,
                format!("Non-static method '{}' cannot be referenced from a static context.", name.name),
            ));
            return None;
        }
        let owner_roles = self.owner_roles(&applied.cand);
        let info = CallInfo {
            kind: CallKind::Method,
            owner: applied.cand.owner.clone(),
            index: applied.cand.index,
            is_static: applied.cand.is_static,
            selection: applied.cand.selection,
            params: applied.params,
            ret: applied.ret.clone(),
            recv: if applied.cand.is_static && recv.as_ref().is_none_or(|r| matches!(r.kind, ExpKind::TypeRef { .. })) {
                None
            } else {
                recv_ty
            },
            roles: owner_roles,
            type_args: applied.targs,
        };
        self.ann.calls.insert(e.id, info);
        Some(applied.ret)
    }

    fn owner_roles(&self, cand: &Cand) -> Vec<String> {
        let Some(c) = self.table.get(&cand.owner) else { return Vec::new() };
        c.roles
            .iter()
            .map(|r| match cand.map.get(r) {
                Some(Type::Var(v)) => v.clone(),
                _ => r.clone(),
            })
            .collect()
    }

    fn synth_super(&mut self, cx: &mut Body, e: &Exp, args: &[Exp]) -> Option<Type> {
        let arg_tys: Vec<Option<Type>> = args.iter().map(|a| self.synth(cx, a)).collect();
        if !cx.in_ctor {
            self.report(Diagnostic::error(Code::UnknownName, e.span, "'super' can only be called in a constructor."));
            return None;
        }
        let arg_tys: Vec<Type> = arg_tys.into_iter().collect::<Option<_>>()?;
        let c = self.table.get(&cx.class)?.clone();
        let sup = c
            .supers
            .iter()
            .find(|s| s.head_name().and_then(|h| self.table.get(h)).is_some_and(|sc| sc.kind == DeclKind::Class))?;
        let sname = sup.head_name()?.to_string();
        let sc = self.table.get(&sname)?.clone();
        let map = sc.inst_map(sup);
        let cands = sc
            .ctors
            .iter()
            .map(|k| Cand {
                owner: sname.clone(),
                index: k.index,
                map: map.clone(),
                tparams: k.tparams.clone(),
                params: k.params.iter().map(|(_, t)| t.clone()).collect(),
                ret: Type::Void,
                is_static: false,
                selection: false,
            })
            .collect();
        let applied = self.resolve(&cx.scope, cands, &[], &arg_tys, "super", args, e.span)?;
        let roles = self.owner_roles(&applied.cand);
        self.ann.calls.insert(
            e.id,
            CallInfo {
                kind: CallKind::Super,
                owner: sname,
                index: applied.cand.index,
                is_static: false,
                selection: false,
                params: applied.params,
                ret: Type::Void,
                recv: cx.this_ty.clone(),
                roles,
                type_args: applied.targs,
            },
        );
        Some(Type::Void)
    }

    fn synth_new(&mut self, cx: &mut Body, e: &Exp) -> Option<Type> {
        let ExpKind::New { type_args, ty, args } = &e.kind else { unreachable!() };
        let arg_tys: Vec<Option<Type>> = args.iter().map(|a| self.synth(cx, a)).collect();
        let t = self.denote_named(&cx.scope, ty)?;
        self.check_bounds(&cx.scope, &TypeExpr::Named(ty.clone()));
        let cname = t.head_name()?.to_string();
        let Some(c) = self.table.get(&cname).cloned() else {
            self.report(Diagnostic::error(
                Code::TypeMismatch,
                ty.span,
                format!("Type parameter '{cname}' cannot be instantiated."),
            ));
            return None;
        };
        if c.is_abstract || c.is_enum() {
            self.report(Diagnostic::error(
                Code::TypeMismatch,
                ty.span,
                format!("'{cname}' is abstract; cannot be instantiated."),
            ));
            return None;
        }
        let arg_tys: Vec<Type> = arg_tys.into_iter().collect::<Option<_>>()?;
        let map = c.inst_map(&t);
        let cands = c
            .ctors
            .iter()
            .map(|k| Cand {
                owner: cname.clone(),
                index: k.index,
                map: map.clone(),
                tparams: k.tparams.clone(),
                params: k.params.iter().map(|(_, t)| t.clone()).collect(),
                ret: t.clone(),
                is_static: false,
                selection: false,
            })
            .collect();
        let applied = self.resolve(&cx.scope, cands, type_args, &arg_tys, &cname, args, e.span)?;
        self.ann.calls.insert(
            e.id,
            CallInfo {
                kind: CallKind::Ctor,
                owner: cname,
                index: applied.cand.index,
                is_static: false,
                selection: false,
                params: applied.params,
                ret: t.clone(),
                recv: None,
                roles: ty.roles.iter().map(|r| r.name.clone()).collect(),
                type_args: applied.targs,
            },
        );
        Some(t)
    }

    #[allow(clippy::too_many_arguments)]
    fn resolve(
        &mut self,
        scope: &Scope,
        cands: Vec<Cand>,
        explicit: &[TypeExpr],
        arg_tys: &[Type],
        name: &str,
        args: &[Exp],
        span: Span,
    ) -> Option<Applied> {
        let arity_matches = cands.iter().filter(|c| c.params.len() == arg_tys.len()).count();
        let mut applicable: Vec<Applied> = Vec::new();
        let mut failures = Vec::new();
        for cand in cands {
            if cand.params.len() != arg_tys.len() {
                continue;
            }
            match self.instantiate(scope, cand, explicit, arg_tys) {
                Ok(a) => applicable.push(a),
                Err(f) => failures.push(f),
            }
        }
        let mut unique: Vec<Applied> = Vec::new();
        for a in applicable {
            let dup = unique.iter().any(|u| {
                u.params.len() == a.params.len() && u.params.iter().zip(&a.params).all(|(x, y)| x.alpha_eq(y))
            });
            if !dup {
                unique.push(a);
            }
        }
        if unique.is_empty() {
            if arity_matches == 1 {
                if let Some(Failure::Mismatch(i, pt)) = failures.pop() {
                    let d =
                        Diagnostic::mismatch(args[i].span, self.render(scope, &pt), self.render(scope, &arg_tys[i]));
                    self.report(d);
                    return None;
                }
            }
            let shown: Vec<String> = arg_tys.iter().map(|t| self.render(scope, t)).collect();
            let _ = Failure::Unknown;
            let _ = Failure::Other;
            self.report(Diagnostic::error(
                Code::NoApplicableMethod,
                span,
                format!("No applicable method '{}' for argument types ({}).", name, shown.join(", ")),
            ));
            return None;
        }
        let n = unique.len();
        let best: Vec<usize> = (0..n)
            .filter(|&i| {
                (0..n).all(|j| {
                    unique[i].params.iter().zip(&unique[j].params).all(|(a, b)| self.table.is_subtype(scope, a, b))
                })
            })
            .collect();
        if best.is_empty() {
            let sigs: Vec<String> = unique
                .iter()
                .map(|a| {
                    let ps: Vec<String> = a.params.iter().map(|t| self.render(scope, t)).collect();
                    format!("{}({})", name, ps.join(", "))
                })
                .collect();
            self.report(Diagnostic::error(
                Code::AmbiguousMethod,
                span,
                format!("Ambiguous call to '{}': candidates {}.", name, sigs.join(" and ")),
            ));
            return None;
        }
        Some(unique.swap_remove(best[0]))
    }

    fn instantiate(
        &mut self,
        scope: &Scope,
        cand: Cand,
        explicit: &[TypeExpr],
        args: &[Type],
    ) -> Result<Applied, Failure> {
        let fresh: Vec<String> = cand.tparams.iter().map(|tp| fresh_name(&tp.name)).collect();
        let mut m = cand.map.clone();
        for (tp, f) in cand.tparams.iter().zip(&fresh) {
            m.insert(tp.name.clone(), Type::var(f));
        }
        let params: Vec<Type> = cand.params.iter().map(|p| p.subst(&m)).collect();
        let targs: Vec<Type> = if !explicit.is_empty() {
            if explicit.len() != cand.tparams.len() {
                return Err(Failure::Other);
            }
            let mut out = Vec::new();
            for (te, tp) in explicit.iter().zip(&cand.tparams) {
                let t = self.quietly(|s| s.denote_arg(scope, te, tp.roles.len(), &[]));
                match t {
                    Some(t) => out.push(t),
                    None => return Err(Failure::Other),
                }
            }
            out
        } else {
            let unknowns: Vec<(String, usize)> =
                fresh.iter().zip(&cand.tparams).map(|(f, tp)| (f.clone(), tp.roles.len())).collect();
            let mut sol = HashMap::new();
            for (p, a) in params.iter().zip(args) {
                self.unify(&p.reduce(), a, &unknowns, &mut sol, 0);
            }
            let mut out = Vec::new();
            for (f, _) in &unknowns {
                match sol.get(f) {
                    Some(t) => out.push(t),
                    None => return Err(Failure::Other),
                }
            }
            out.into_iter().cloned().collect()
        };
        let mut bm = cand.map.clone();
        let mut tm = HashMap::new();
        for ((tp, f), ta) in cand.tparams.iter().zip(&fresh).zip(&targs) {
            bm.insert(tp.name.clone(), ta.clone());
            tm.insert(f.clone(), ta.clone());
        }
        for (tp, ta) in cand.tparams.iter().zip(&targs) {
            if !self.within_bounds(scope, ta, tp, &bm) {
                return Err(Failure::Other);
            }
        }
        let params: Vec<Type> = params.iter().map(|p| p.subst(&tm).reduce()).collect();
        let ret = cand.ret.subst(&m).subst(&tm).reduce();
        for (i, (a, p)) in args.iter().zip(&params).enumerate() {
            if !self.table.is_subtype(scope, a, p) {
                return Err(Failure::Mismatch(i, p.clone()));
            }
        }
        Ok(Applied { cand, params, ret, targs })
    }

    fn unify(&self, p: &Type, a: &Type, unknowns: &[(String, usize)], sol: &mut HashMap<String, Type>, depth: usize) {
        if depth > 32 {
            return;
        }
        let (hp, pargs) = p.spine();
        if let Type::Var(v) = hp {
            if let Some((_, k)) = unknowns.iter().find(|(u, _)| u == v) {
                if sol.contains_key(v) {
                    return;
                }
                if pargs.is_empty() {
                    sol.insert(v.clone(), a.clone());
                } else if pargs.len() == *k {
                    let Some(rs) = role_names(&pargs) else { return };
                    let zs = self.fresh_roles(*k);
                    let mut m = HashMap::new();
                    for (r, z) in rs.iter().zip(&zs) {
                        m.insert(r.clone(), Type::var(z));
                    }
                    sol.insert(v.clone(), abstract_roles(&zs, a.subst(&m)).reduce());
                }
                return;
            }
        }
        let (ha, aargs) = a.spine();
        if ha.head_name().is_some() && ha.head_name() == hp.head_name() && pargs.len() == aargs.len() {
            for (x, y) in pargs.iter().zip(&aargs) {
                self.unify(x, y, unknowns, sol, depth + 1);
            }
            return;
        }
        if let (Type::Abs(x, _, pb), Type::Abs(y, _, ab)) = (p, a) {
            let ab2 = ab.subst1(y, &Type::var(x));
            self.unify(pb, &ab2, unknowns, sol, depth + 1);
            return;
        }
        if let Type::Symbol(c) = ha {
            if let Some(ci) = self.table.get(c) {
                let m = ci.inst_map(a);
                for s in &ci.supers {
                    let s2 = s.subst(&m).reduce();
                    self.unify(p, &s2, unknowns, sol, depth + 1);
                }
            }
        }
    }
}
