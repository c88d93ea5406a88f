//! Denotation of type expressions and kinding of type arguments.

use std::collections::HashMap;

use super::subtype::abstract_roles;
use super::table::{Scope, TParamInfo};
use super::{canonical, Checker};
use crate::syntax::*;

impl Checker<'_> {
    pub(crate) fn denote(&mut self, scope: &Scope, te: &TypeExpr) -> Option<Type> {
        match te {
            TypeExpr::Void(_) => Some(Type::Void),
            TypeExpr::Named(n) => self.denote_named(scope, n),
        }
    }

    fn check_aliasing(&mut self, n: &NamedType, target: &str) -> bool {
        for (i, r) in n.roles.iter().enumerate() {
            if n.roles[..i].iter().any(|x| x.name == r.name) {
                self.report(Diagnostic::error(
                    Code::RoleAliasing,
                    r.span,
                    format!(
                        "Illegal type instantiation: role '{}' must play exactly one role in '{}'.",
                        r.name, target
                    ),
                ));
                return false;
            }
        }
        true
    }

    pub(crate) fn denote_named(&mut self, scope: &Scope, n: &NamedType) -> Option<Type> {
        let name = canonical(&n.name.name).to_string();
        let mut ok = true;
        for r in &n.roles {
            if !scope.has_role(&r.name) {
                self.report(Diagnostic::error(Code::UnknownName, r.span, format!("Unknown role '{}'.", r.name)));
                ok = false;
            }
        }
        let role_tys = || n.roles.iter().map(|r| Type::var(&r.name));
        if let Some(tp) = scope.tvar(&name).cloned() {
            if n.roles.len() != tp.roles.len() {
                self.role_count_error(n, &name, tp.roles.len());
                return None;
            }
            if !n.args.is_empty() {
                self.report(Diagnostic::error(
                    Code::KindMismatch,
                    n.span,
                    format!("Type parameter '{name}' does not take type arguments."),
                ));
                return None;
            }
            if !self.check_aliasing(n, &name) {
                return None;
            }
            return ok.then(|| Type::apps(Type::var(&name), role_tys()));
        }
        let Some(c) = self.table.get(&name) else {
            self.report(Diagnostic::error(Code::UnknownName, n.name.span, format!("Cannot find symbol '{name}'.")));
            return None;
        };
        let arity = c.roles.len();
        let tparams = c.tparams.clone();
        if n.roles.len() != arity {
            self.role_count_error(n, &name, arity);
            return None;
        }
        if !self.check_aliasing(n, &name) {
            return None;
        }
        if n.args.len() != tparams.len() {
            self.report(Diagnostic::error(
                Code::KindMismatch,
                n.span,
                format!("Type '{name}' expects {} type argument(s), found {}.", tparams.len(), n.args.len()),
            ));
            return None;
        }
        let outer: Vec<String> = n.roles.iter().map(|r| r.name.clone()).collect();
        let mut args = Vec::new();
        for (a, tp) in n.args.iter().zip(&tparams) {
            match self.denote_arg(scope, a, tp.roles.len(), &outer) {
                Some(t) => args.push(t),
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        Some(Type::apps(Type::apps(Type::sym(&name), role_tys()), args))
    }

    fn role_count_error(&mut self, n: &NamedType, name: &str, arity: usize) {
        if n.roles.is_empty() {
            self.report(Diagnostic::error(
                Code::MissingRole,
                n.span,
                format!("Type '{name}' must be located at {arity} role(s)."),
            ));
        } else {
            self.report(Diagnostic::error(
                Code::KindMismatch,
                n.span,
                format!("Type '{name}' expects {arity} role argument(s), found {}.", n.roles.len()),
            ));
        }
    }

    /// Denotes a type argument for a parameter with `arity` roles as a type
    /// constructor of that many role parameters.
    pub(crate) fn denote_arg(&mut self, scope: &Scope, te: &TypeExpr, arity: usize, outer: &[String]) -> Option<Type> {
        let n = match te {
            TypeExpr::Void(s) => {
                self.report(Diagnostic::error(Code::KindMismatch, *s, "'void' is not a valid type argument."));
                return None;
            }
            TypeExpr::Named(n) => n,
        };
        if arity == 0 {
            return self.denote_named(scope, n);
        }
        if n.roles.is_empty() {
            let name = canonical(&n.name.name);
            let have = scope.tvar(name).map(|t| t.roles.len()).or_else(|| self.table.get(name).map(|c| c.roles.len()));
            match have {
                None => {
                    self.report(Diagnostic::error(
                        Code::UnknownName,
                        n.name.span,
                        format!("Cannot find symbol '{name}'."),
                    ));
                    return None;
                }
                Some(k) if k != arity => {
                    self.report(Diagnostic::error(
                        Code::KindMismatch,
                        n.span,
                        format!("Type argument '{name}' takes {k} role(s), expecting {arity}."),
                    ));
                    return None;
                }
                _ => {}
            }
            let zs = self.fresh_roles(arity);
            let inner = scope.with_roles(&zs);
            let mut n2 = n.clone();
            n2.roles = zs.iter().map(|z| RoleRef { name: z.clone(), span: n.span }).collect();
            let body = self.denote_named(&inner, &n2)?;
            return Some(abstract_roles(&zs, body).reduce());
        }
        let names: Vec<String> = n.roles.iter().map(|r| r.name.clone()).collect();
        let mut unbound: Vec<String> = Vec::new();
        for r in &names {
            if !scope.has_role(r) && !unbound.contains(r) {
                unbound.push(r.clone());
            }
        }
        if !unbound.is_empty() {
            if unbound.len() != arity {
                self.report(Diagnostic::error(
                    Code::KindMismatch,
                    n.span,
                    format!("Type argument binds {} role(s), expecting {arity}.", unbound.len()),
                ));
                return None;
            }
            let inner = scope.with_roles(&unbound);
            let body = self.denote_named(&inner, n)?;
            return Some(abstract_roles(&unbound, body).reduce());
        }
        let body = self.denote_named(scope, n)?;
        if names.len() == arity && names == outer {
            Some(abstract_roles(&names, body).reduce())
        } else {
            let zs = self.fresh_roles(arity);
            Some(abstract_roles(&zs, body))
        }
    }

    /// Whether type argument `targ` satisfies the bounds of `tp`, where `map`
    /// instantiates the variables the bounds may mention.
    pub(crate) fn within_bounds(
        &self,
        scope: &Scope,
        targ: &Type,
        tp: &TParamInfo,
        map: &HashMap<String, Type>,
    ) -> bool {
        if tp.bounds.is_empty() {
            return true;
        }
        let zs = self.fresh_roles(tp.roles.len());
        let inner = scope.with_roles(&zs);
        let lhs = Type::apps(targ.clone(), zs.iter().map(Type::var)).reduce();
        let mut m = map.clone();
        for (x, z) in tp.roles.iter().zip(&zs) {
            m.insert(x.clone(), Type::var(z));
        }
        tp.bounds.iter().all(|b| {
            let rhs = b.subst(&m).reduce();
            self.table.is_subtype(&inner, &lhs, &rhs)
        })
    }

    /// Reports type arguments of `te` (and nested ones) that violate bounds.
    pub(crate) fn check_bounds(&mut self, scope: &Scope, te: &TypeExpr) {
        let TypeExpr::Named(n) = te else { return };
        for a in &n.args {
            if let TypeExpr::Named(an) = a {
                let unbound: Vec<String> =
                    an.roles.iter().map(|r| r.name.clone()).filter(|r| !scope.has_role(r)).collect();
                let inner = scope.with_roles(&unbound);
                if !an.roles.is_empty() {
                    self.check_bounds(&inner, a);
                }
            }
        }
        let name = canonical(&n.name.name);
        if scope.tvar(name).is_some() {
            return;
        }
        let Some(c) = self.table.get(name).cloned() else { return };
        if c.tparams.iter().all(|tp| tp.bounds.is_empty()) {
            return;
        }
        let Some(t) = self.quietly(|s| s.denote_named(scope, n)) else { return };
        let map = c.inst_map(&t);
        let (_, args) = t.spine();
        for (i, tp) in c.tparams.iter().enumerate() {
            let Some(targ) = args.get(c.roles.len() + i) else { continue };
            if !self.within_bounds(scope, targ, tp, &map) {
                self.report(Diagnostic::error(
                    Code::KindMismatch,
                    n.args[i].span(),
                    format!(
                        "Type argument '{}' is not within the bounds of type parameter '{}' of '{}'.",
                        crate::parse::print_te(&n.args[i]),
                        tp.name,
                        c.name
                    ),
                ));
            }
        }
    }
}
