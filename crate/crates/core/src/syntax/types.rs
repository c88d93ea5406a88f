//! Kinds and types: the semantic counterpart of type expressions.
//!
//! Nominal types are curried applications: `C@(A,B)<T>` is
//! `App(App(App(Symbol C, A), B), T)`, role arguments first. Type arguments
//! of role-parametric type parameters are type constructors, so `Integer`
//! inside `List@A<Integer>` is the bare symbol.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Role,
    /// Fully constructed type with an upper bound.
    Star(Box<Type>),
    /// `[X::K] => K'`.
    Ctor(String, Box<Kind>, Box<Kind>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Type {
    Var(String),
    Symbol(String),
    Abs(String, Box<Kind>, Box<Type>),
    App(Box<Type>, Box<Type>),
    Intersection(Vec<Type>),
    Fun(Vec<Type>, Box<Type>),
    Void,
    /// Bound of declarations without supertypes.
    Top,
}

/// Symbol used for the type of `null@(R..)`.
pub const NULL_SYMBOL: &str = "null";

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A variable name that cannot clash with source identifiers.
pub fn fresh_name(base: &str) -> String {
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    let base = base.trim_start_matches('\'');
    let base = base.split('#').next().unwrap_or(base);
    format!("'{base}#{n}")
}

impl Kind {
    pub fn ctor(param: impl Into<String>, pk: Kind, result: Kind) -> Kind {
        Kind::Ctor(param.into(), Box::new(pk), Box::new(result))
    }

    pub fn subst(&self, map: &HashMap<String, Type>) -> Kind {
        match self {
            Kind::Role => Kind::Role,
            Kind::Star(b) => Kind::Star(Box::new(b.subst(map))),
            Kind::Ctor(x, k, r) => {
                let k2 = k.subst(map);
                if map.contains_key(x) {
                    let mut m = map.clone();
                    m.remove(x);
                    Kind::Ctor(x.clone(), Box::new(k2), Box::new(r.subst(&m)))
                } else if map.values().any(|t| t.free_vars().contains(x)) {
                    let y = fresh_name(x);
                    let mut m = map.clone();
                    m.insert(x.clone(), Type::Var(y.clone()));
                    Kind::Ctor(y, Box::new(k2), Box::new(r.subst(&m)))
                } else {
                    Kind::Ctor(x.clone(), Box::new(k2), Box::new(r.subst(map)))
                }
            }
        }
    }

    /// Number of leading role parameters of a constructor kind.
    pub fn role_arity(&self) -> usize {
        match self {
            Kind::Ctor(_, k, r) if **k == Kind::Role => 1 + r.role_arity(),
            _ => 0,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Kind::Star(_))
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Kind::Role => {}
            Kind::Star(b) => b.collect_free(bound, out),
            Kind::Ctor(x, k, r) => {
                k.collect_free(bound, out);
                bound.push(x.clone());
                r.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

impl Type {
    pub fn var(s: impl Into<String>) -> Type {
        Type::Var(s.into())
    }

    pub fn sym(s: impl Into<String>) -> Type {
        Type::Symbol(s.into())
    }

    pub fn app(f: Type, a: Type) -> Type {
        Type::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Type, args: impl IntoIterator<Item = Type>) -> Type {
        args.into_iter().fold(f, Type::app)
    }

    pub fn abs(x: impl Into<String>, k: Kind, body: Type) -> Type {
        Type::Abs(x.into(), Box::new(k), Box::new(body))
    }

    /// Nominal type `name@(roles)<args>`.
    pub fn nominal(name: &str, roles: &[&str], args: Vec<Type>) -> Type {
        let t = Type::apps(Type::sym(name), roles.iter().map(|r| Type::var(*r)));
        Type::apps(t, args)
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Type, Vec<&Type>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head_name(&self) -> Option<&str> {
        match self.spine().0 {
            Type::Symbol(s) | Type::Var(s) => Some(s),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Type::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Type::Symbol(_) | Type::Void | Type::Top => {}
            Type::Abs(x, k, b) => {
                k.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Type::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Type::Intersection(ts) => ts.iter().for_each(|t| t.collect_free(bound, out)),
            Type::Fun(ps, r) => {
                ps.iter().for_each(|t| t.collect_free(bound, out));
                r.collect_free(bound, out);
            }
        }
    }

    /// Simultaneous capture-avoiding substitution of variables.
    pub fn subst(&self, map: &HashMap<String, Type>) -> Type {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Type::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Type::Symbol(_) | Type::Void | Type::Top => self.clone(),
            Type::Abs(x, k, b) => {
                let k2 = k.subst(map);
                let mut m = map.clone();
                m.remove(x);
                let fv_b = b.free_vars();
                let captures = m.iter().filter(|(v, _)| fv_b.contains(*v)).any(|(_, t)| t.free_vars().contains(x));
                if captures {
                    let y = fresh_name(x);
                    m.insert(x.clone(), Type::Var(y.clone()));
                    Type::Abs(y, Box::new(k2), Box::new(b.subst(&m)))
                } else {
                    Type::Abs(x.clone(), Box::new(k2), Box::new(b.subst(&m)))
                }
            }
            Type::App(f, a) => Type::app(f.subst(map), a.subst(map)),
            Type::Intersection(ts) => Type::Intersection(ts.iter().map(|t| t.subst(map)).collect()),
            Type::Fun(ps, r) => Type::Fun(ps.iter().map(|t| t.subst(map)).collect(), Box::new(r.subst(map))),
        }
    }

    pub fn subst1(&self, x: &str, t: &Type) -> Type {
        let mut m = HashMap::new();
        m.insert(x.to_string(), t.clone());
        self.subst(&m)
    }

    /// Normal form under beta reduction, with eta contraction of
    /// abstractions `[X] => F X` to `F`.
    pub fn reduce(&self) -> Type {
        match self {
            Type::App(f, a) => {
                let f2 = f.reduce();
                let a2 = a.reduce();
                match f2 {
                    Type::Abs(x, _, body) => body.subst1(&x, &a2).reduce(),
                    f2 => Type::app(f2, a2),
                }
            }
            Type::Abs(x, k, b) => {
                let b2 = b.reduce();
                if let Type::App(g, arg) = &b2 {
                    if matches!(&**arg, Type::Var(v) if v == x) && !g.free_vars().contains(x) {
                        return (**g).clone();
                    }
                }
                Type::Abs(x.clone(), k.clone(), Box::new(b2))
            }
            Type::Intersection(ts) => {
                let mut flat = Vec::new();
                for t in ts {
                    match t.reduce() {
                        Type::Intersection(inner) => flat.extend(inner),
                        t => flat.push(t),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    Type::Intersection(flat)
                }
            }
            Type::Fun(ps, r) => Type::Fun(ps.iter().map(Type::reduce).collect(), Box::new(r.reduce())),
            _ => self.clone(),
        }
    }

    /// Structural equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Type) -> bool {
        fn go(a: &Type, b: &Type, env: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (Type::Var(x), Type::Var(y)) => {
                    for (l, r) in env.iter().rev() {
                        if l == x || r == y {
                            return l == x && r == y;
                        }
                    }
                    x == y
                }
                (Type::Symbol(x), Type::Symbol(y)) => x == y,
                (Type::Void, Type::Void) | (Type::Top, Type::Top) => true,
                (Type::Abs(x, k1, b1), Type::Abs(y, k2, b2)) => {
                    if !kind_eq(k1, k2, env) {
                        return false;
                    }
                    env.push((x.clone(), y.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    r
                }
                (Type::App(f1, a1), Type::App(f2, a2)) => go(f1, f2, env) && go(a1, a2, env),
                (Type::Intersection(t1), Type::Intersection(t2)) => {
                    t1.len() == t2.len() && t1.iter().zip(t2).all(|(a, b)| go(a, b, env))
                }
                (Type::Fun(p1, r1), Type::Fun(p2, r2)) => {
                    p1.len() == p2.len() && p1.iter().zip(p2).all(|(a, b)| go(a, b, env)) && go(r1, r2, env)
                }
                _ => false,
            }
        }
        fn kind_eq(a: &Kind, b: &Kind, env: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (Kind::Role, Kind::Role) => true,
                (Kind::Star(x), Kind::Star(y)) => go(x, y, env),
                (Kind::Ctor(x, k1, r1), Kind::Ctor(y, k2, r2)) => {
                    if !kind_eq(k1, k2, env) {
                        return false;
                    }
                    env.push((x.clone(), y.clone()));
                    let r = kind_eq(r1, r2, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Roles occurring in the type; `arity` gives the number of role
    /// arguments a head symbol or variable takes.
    pub fn roles(&self, arity: &dyn Fn(&str) -> usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_roles(arity, &mut Vec::new(), &mut out);
        out
    }

    fn collect_roles(&self, arity: &dyn Fn(&str) -> usize, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Type::Abs(x, _, b) => {
                bound.push(x.clone());
                b.collect_roles(arity, bound, out);
                bound.pop();
            }
            Type::Intersection(ts) => ts.iter().for_each(|t| t.collect_roles(arity, bound, out)),
            Type::Fun(ps, r) => {
                ps.iter().for_each(|t| t.collect_roles(arity, bound, out));
                r.collect_roles(arity, bound, out);
            }
            Type::App(..) | Type::Var(_) | Type::Symbol(_) => {
                let (head, args) = self.spine();
                let n = head_name(head).map(arity).unwrap_or(0);
                for (i, a) in args.iter().enumerate() {
                    if i < n {
                        if let Type::Var(r) = a {
                            if !bound.contains(r) {
                                out.insert(r.clone());
                            }
                        }
                    } else {
                        a.collect_roles(arity, bound, out);
                    }
                }
            }
            Type::Void | Type::Top => {}
        }
    }

    /// Top-level role arguments of a nominal type, in order.
    pub fn role_args(&self, arity: &dyn Fn(&str) -> usize) -> Vec<String> {
        let (head, args) = self.spine();
        let n = head_name(head).map(arity).unwrap_or(0);
        args.iter()
            .take(n)
            .filter_map(|a| match a {
                Type::Var(r) | Type::Symbol(r) => Some(r.clone()),
                _ => None,
            })
            .collect()
    }

    /// Surface rendering such as `SymChannel@(A,B)<T>`.
    pub fn render(&self, arity: &dyn Fn(&str) -> usize) -> String {
        match self {
            Type::Void => "void".into(),
            Type::Top => "Top".into(),
            Type::Intersection(ts) => ts.iter().map(|t| t.render(arity)).collect::<Vec<_>>().join(" & "),
            Type::Fun(ps, r) => format!(
                "({}) -> {}",
                ps.iter().map(|t| t.render(arity)).collect::<Vec<_>>().join(", "),
                r.render(arity)
            ),
            Type::Abs(x, k, b) => {
                if !b.free_vars().contains(x) && **k == Kind::Role {
                    let mut inner = &**b;
                    while let Type::Abs(_, _, b2) = inner {
                        inner = b2;
                    }
                    inner.render(arity)
                } else {
                    let mut binders = vec![display_var(x)];
                    let mut inner = &**b;
                    while let Type::Abs(y, _, b2) = inner {
                        binders.push(display_var(y));
                        inner = b2;
                    }
                    format!("[{}]=>{}", binders.join(","), inner.render(arity))
                }
            }
            Type::App(..) | Type::Var(_) | Type::Symbol(_) => {
                let (head, args) = self.spine();
                let name = match head {
                    Type::Var(x) | Type::Symbol(x) => display_var(x),
                    other => format!("({})", other.render(arity)),
                };
                let n = head_name(head).map(arity).unwrap_or(0).min(args.len());
                let mut s = name;
                let roles: Vec<String> = args[..n].iter().map(|a| a.render(arity)).collect();
                if roles.len() == 1 {
                    s.push('@');
                    s.push_str(&roles[0]);
                } else if roles.len() > 1 {
                    s.push_str(&format!("@({})", roles.join(",")));
                }
                if args.len() > n {
                    let targs: Vec<String> = args[n..].iter().map(|a| a.render(arity)).collect();
                    s.push_str(&format!("<{}>", targs.join(",")));
                }
                s
            }
        }
    }
}

fn head_name(t: &Type) -> Option<&str> {
    match t {
        Type::Var(x) | Type::Symbol(x) => Some(x),
        _ => None,
    }
}

fn display_var(x: &str) -> String {
    match x.strip_prefix('\'') {
        Some(rest) => rest.split('#').next().unwrap_or(rest).to_string(),
        None => x.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_reduces_identity_abstraction() {
        let t = Type::app(Type::abs("X", Kind::Role, Type::var("X")), Type::sym("A"));
        assert_eq!(t.reduce(), Type::sym("A"));
    }

    #[test]
    fn reduce_is_idempotent() {
        let inner = Type::abs("Z", Kind::Role, Type::nominal("List", &["Z"], vec![Type::sym("Integer")]));
        let t = Type::app(Type::abs("T", Kind::Role, Type::app(Type::var("T"), Type::var("B"))), inner);
        let once = t.reduce();
        assert_eq!(once, once.reduce());
        assert_eq!(once, Type::nominal("List", &["B"], vec![Type::sym("Integer")]));
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = Type::abs("X", Kind::Role, Type::app(Type::var("F"), Type::var("Y")));
        let s = t.subst1("Y", &Type::var("X"));
        match s {
            Type::Abs(x, _, b) => {
                assert_ne!(x, "X");
                assert_eq!(*b, Type::app(Type::var("F"), Type::var("X")));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn eta_contracts_constructor_wrappers() {
        let t = Type::abs("Z", Kind::Role, Type::app(Type::sym("Integer"), Type::var("Z")));
        assert_eq!(t.reduce(), Type::sym("Integer"));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Type::abs("X", Kind::Role, Type::nominal("Opt", &["A"], vec![]));
        let b = Type::abs("Y", Kind::Role, Type::nominal("Opt", &["A"], vec![]));
        assert!(a.alpha_eq(&b));
        let c = Type::abs("X", Kind::Role, Type::app(Type::sym("Opt"), Type::var("X")));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn render_uses_role_arity() {
        let ar = |h: &str| match h {
            "SymChannel" => 2,
            "String" => 1,
            _ => 0,
        };
        let t = Type::nominal("SymChannel", &["A", "B"], vec![Type::var("T")]);
        assert_eq!(t.render(&ar), "SymChannel@(A,B)<T>");
        assert_eq!(Type::nominal("String", &["A"], vec![]).render(&ar), "String@A");
        let r = t.roles(&ar);
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec!["A".to_string(), "B".to_string()]);
    }
}
