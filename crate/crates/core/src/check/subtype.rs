//! Nominal subtyping with role and type argument substitution.

use std::collections::HashMap;

use super::table::{Scope, Table};
use crate::syntax::types::NULL_SYMBOL;
use crate::syntax::{Kind, Type};

/// Placeholder for types that failed to denote; compatible with everything
/// so one error does not cascade.
pub const ERROR_SYMBOL: &str = "?error";

const MAX_DEPTH: usize = 64;

pub fn error_type() -> Type {
    Type::sym(ERROR_SYMBOL)
}

pub fn is_error(t: &Type) -> bool {
    matches!(t.spine().0, Type::Symbol(s) if s == ERROR_SYMBOL)
}

/// `[Z1]=>..[Zn]=> body`.
pub fn abstract_roles(zs: &[String], body: Type) -> Type {
    zs.iter().rev().fold(body, |b, z| Type::abs(z.clone(), Kind::Role, b))
}

impl Table {
    pub fn is_subtype(&self, scope: &Scope, a: &Type, b: &Type) -> bool {
        self.sub(scope, a, b, 0)
    }

    fn sub(&self, scope: &Scope, a: &Type, b: &Type, depth: usize) -> bool {
        if depth > MAX_DEPTH {
            return false;
        }
        if is_error(a) || is_error(b) || a.alpha_eq(b) {
            return true;
        }
        match b {
            Type::Top => return true,
            Type::Intersection(ts) => return ts.iter().all(|t| self.sub(scope, a, t, depth + 1)),
            _ => {}
        }
        if let Type::Intersection(ts) = a {
            return ts.iter().any(|t| self.sub(scope, t, b, depth + 1));
        }
        let (head, args) = a.spine();
        match head {
            Type::Symbol(s) if s == NULL_SYMBOL => {
                let (hb, bargs) = b.spine();
                let Some(name) = hb.head_name() else { return false };
                if name == NULL_SYMBOL {
                    return false;
                }
                let arity = scope.tvar(name).map(|t| t.roles.len()).unwrap_or_else(|| self.role_arity(name));
                arity == args.len() && bargs.len() >= arity && bargs.iter().zip(&args).all(|(x, y)| x.alpha_eq(y))
            }
            Type::Var(v) => {
                let Some(tp) = scope.tvar(v) else { return false };
                let mut m = HashMap::new();
                for (r, a) in tp.roles.iter().zip(&args) {
                    m.insert(r.clone(), (*a).clone());
                }
                if tp.bounds.is_empty() {
                    if tp.roles.len() == 1 && self.get("Object").is_some() {
                        let obj = Type::app(Type::sym("Object"), args[0].clone());
                        return self.sub(scope, &obj, b, depth + 1);
                    }
                    return false;
                }
                tp.bounds.iter().any(|bd| self.sub(scope, &bd.subst(&m).reduce(), b, depth + 1))
            }
            Type::Symbol(c) => {
                let Some(ci) = self.get(c) else { return false };
                let m = ci.inst_map(a);
                ci.supers.iter().any(|s| self.sub(scope, &s.subst(&m).reduce(), b, depth + 1))
            }
            _ => false,
        }
    }

    /// Supertype closure of `t` as `(class, substitution)` pairs, most derived
    /// first, without duplicates.
    pub fn closure(&self, scope: &Scope, t: &Type) -> Vec<(String, HashMap<String, Type>)> {
        let mut out: Vec<(String, HashMap<String, Type>, Type)> = Vec::new();
        let mut queue = vec![(t.clone(), 0usize)];
        let mut i = 0;
        while i < queue.len() {
            let (ty, depth) = queue[i].clone();
            i += 1;
            if depth > MAX_DEPTH {
                continue;
            }
            let (head, args) = ty.spine();
            match head {
                Type::Var(v) => {
                    if let Some(tp) = scope.tvar(v) {
                        let mut m = HashMap::new();
                        for (r, a) in tp.roles.iter().zip(&args) {
                            m.insert(r.clone(), (*a).clone());
                        }
                        if tp.bounds.is_empty() && tp.roles.len() == 1 && self.get("Object").is_some() {
                            queue.push((Type::app(Type::sym("Object"), args[0].clone()), depth + 1));
                        }
                        for b in &tp.bounds {
                            queue.push((b.subst(&m).reduce(), depth + 1));
                        }
                    }
                }
                Type::Symbol(c) => {
                    let Some(ci) = self.get(c) else { continue };
                    if out.iter().any(|(n, _, t)| n == c && t.alpha_eq(&ty)) {
                        continue;
                    }
                    let m = ci.inst_map(&ty);
                    for s in &ci.supers {
                        queue.push((s.subst(&m).reduce(), depth + 1));
                    }
                    out.push((c.clone(), m, ty.clone()));
                }
                _ => {}
            }
        }
        out.into_iter().map(|(n, m, _)| (n, m)).collect()
    }
}
