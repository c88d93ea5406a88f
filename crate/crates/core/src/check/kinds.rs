//! Kinding of semantic types.

use std::collections::HashMap;

use super::table::{Scope, TParamInfo, Table};
use crate::syntax::{Kind, Type};

fn upper_bound(bounds: &[Type]) -> Type {
    match bounds.len() {
        0 => Type::Top,
        1 => bounds[0].clone(),
        _ => Type::Intersection(bounds.to_vec()),
    }
}

/// Kind of a type parameter: a constructor over its roles with the bound
/// as result.
pub fn tparam_kind(tp: &TParamInfo) -> Kind {
    tp.roles
        .iter()
        .rev()
        .fold(Kind::Star(Box::new(upper_bound(&tp.bounds))), |k, r| Kind::ctor(r.clone(), Kind::Role, k))
}

impl Table {
    /// Declared kind of a class symbol: roles first, then type parameters,
    /// with the supertypes as the bound of the fully applied type.
    pub fn symbol_kind(&self, name: &str) -> Option<Kind> {
        let c = self.get(name)?;
        let mut k = Kind::Star(Box::new(upper_bound(&c.supers)));
        for tp in c.tparams.iter().rev() {
            k = Kind::ctor(tp.name.clone(), tparam_kind(tp), k);
        }
        for r in c.roles.iter().rev() {
            k = Kind::ctor(r.clone(), Kind::Role, k);
        }
        Some(k)
    }

    /// Kinding of `t` under the variables of `scope`; `Err` names the
    /// offending application.
    pub fn kind_of(&self, scope: &Scope, t: &Type) -> Result<Kind, String> {
        match t {
            Type::Var(x) => {
                if let Some(tp) = scope.tvar(x) {
                    Ok(tparam_kind(tp))
                } else if scope.has_role(x) {
                    Ok(Kind::Role)
                } else {
                    Err(format!("unbound variable '{x}'"))
                }
            }
            Type::Symbol(s) => self.symbol_kind(s).ok_or_else(|| format!("unknown symbol '{s}'")),
            Type::Abs(x, k, b) => {
                let mut inner = scope.clone();
                match &**k {
                    Kind::Role => inner.roles.push(x.clone()),
                    other => inner.tvars.push(TParamInfo {
                        name: x.clone(),
                        roles: (0..other.role_arity()).map(|i| format!("'r{i}")).collect(),
                        bounds: Vec::new(),
                    }),
                }
                Ok(Kind::ctor(x.clone(), (**k).clone(), self.kind_of(&inner, b)?))
            }
            Type::App(f, a) => {
                let kf = self.kind_of(scope, f)?;
                let Kind::Ctor(x, pk, rk) = kf else {
                    return Err("application of a type of kind *".into());
                };
                let ka = self.kind_of(scope, a)?;
                if !self.kind_accepts(scope, &pk, a, &ka) {
                    return Err("argument kind does not match parameter kind".into());
                }
                let mut m = HashMap::new();
                m.insert(x, (**a).clone());
                Ok(rk.subst(&m))
            }
            Type::Intersection(ts) => {
                for t in ts {
                    if !self.kind_of(scope, t)?.is_star() {
                        return Err("intersection of a non-star type".into());
                    }
                }
                Ok(Kind::Star(Box::new(t.clone())))
            }
            Type::Fun(..) | Type::Void | Type::Top => Ok(Kind::Star(Box::new(Type::Top))),
        }
    }

    fn kind_accepts(&self, scope: &Scope, param: &Kind, arg: &Type, arg_kind: &Kind) -> bool {
        match (param, arg_kind) {
            (Kind::Role, Kind::Role) => true,
            (Kind::Star(bound), Kind::Star(_)) => self.is_subtype(scope, arg, bound),
            (Kind::Ctor(..), Kind::Ctor(..)) => {
                let n = param.role_arity();
                if n != arg_kind.role_arity() {
                    return false;
                }
                let zs: Vec<String> = (0..n).map(|_| crate::syntax::types::fresh_name("Z")).collect();
                let inner = scope.with_roles(&zs);
                let applied = Type::apps(arg.clone(), zs.iter().map(Type::var)).reduce();
                let mut pk = param.clone();
                for z in &zs {
                    if let Kind::Ctor(x, _, r) = pk {
                        let mut m = HashMap::new();
                        m.insert(x, Type::var(z));
                        pk = r.subst(&m);
                    }
                }
                match pk {
                    Kind::Star(b) => self.is_subtype(&inner, &applied, &b.reduce()),
                    _ => true,
                }
            }
            _ => false,
        }
    }
}
