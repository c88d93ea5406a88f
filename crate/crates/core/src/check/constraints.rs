//! Declaration-level role constraints: inheritance cycles, role sets of
//! supertypes, overload clashes after projection, selection annotations,
//! abstract method implementation and unused roles.

use std::collections::{HashMap, HashSet};

use super::table::{ClassInfo, MethodInfo, Scope, TParamInfo};
use super::{canonical, Checker};
use crate::parse::print_te;
use crate::syntax::visit::{walk_decl, VisitMut};
use crate::syntax::*;

/// Name of type `t` as seen by role `r` once projected.
fn erase(t: &Type, r: &str, arity: &dyn Fn(&str) -> usize, role_names: &dyn Fn(&str, usize) -> String) -> String {
    let t = t.reduce();
    let (h, args) = t.spine();
    let Some(name) = h.head_name() else {
        return match &t {
            Type::Abs(..) => "?".into(),
            Type::Void => "void".into(),
            _ => "Unit".into(),
        };
    };
    let k = arity(name).min(args.len());
    let roles: Vec<&str> = args[..k]
        .iter()
        .map(|a| match a {
            Type::Var(v) => v.as_str(),
            _ => "",
        })
        .collect();
    let Some(pos) = roles.iter().position(|x| *x == r) else { return "Unit".into() };
    let mut out = if roles.len() == 1 { name.to_string() } else { format!("{}_{}", name, role_names(name, pos)) };
    let targs: Vec<String> = args[k..].iter().map(|a| erase_arg(a)).collect();
    if !targs.is_empty() {
        out.push('<');
        out.push_str(&targs.join(","));
        out.push('>');
    }
    out
}

fn erase_arg(t: &Type) -> String {
    let mut cur = t;
    while let Type::Abs(_, _, b) = cur {
        cur = b;
    }
    let (h, args) = cur.spine();
    let name = h.head_name().unwrap_or("?").to_string();
    let inner: Vec<String> = args.iter().filter(|a| !matches!(a, Type::Var(_))).map(|a| erase_arg(a)).collect();
    if inner.is_empty() {
        name
    } else {
        format!("{}<{}>", name, inner.join(","))
    }
}

/// Positional renaming of method type parameters so signatures compare
/// up to their names.
fn normalised_params(m: &MethodInfo, map: &HashMap<String, Type>) -> Vec<Type> {
    let mut m2 = map.clone();
    for (i, tp) in m.tparams.iter().enumerate() {
        m2.insert(tp.name.clone(), Type::var(format!("'P{i}")));
    }
    m.params.iter().map(|(_, t)| t.subst(&m2).reduce()).collect()
}

fn same_params(a: &[Type], b: &[Type]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.alpha_eq(y))
}

struct RoleUse(HashSet<String>);

impl VisitMut for RoleUse {
    fn visit_role(&mut self, r: &mut RoleRef) {
        self.0.insert(r.name.clone());
    }
    fn visit_exp(&mut self, e: &mut Exp) {
        crate::syntax::visit::walk_exp(self, e)
    }
}

impl Checker<'_> {
    fn decl_of(&self, c: &ClassInfo) -> &Decl {
        &self.program.decls[c.decl]
    }

    /// Drops super clauses that close an inheritance cycle, reporting each.
    pub(crate) fn detect_cycles(&mut self) -> HashSet<(String, usize)> {
        let mut edges: HashMap<String, Vec<String>> = HashMap::new();
        let mut dropped = HashSet::new();
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            let d = self.decl_of(&c).clone();
            for (k, te) in d.supertypes().enumerate() {
                let Some(n) = te.named() else { continue };
                let head = canonical(&n.name.name).to_string();
                if self.table.get(&head).is_none() {
                    continue;
                }
                if reaches(&edges, &head, name) {
                    self.report(Diagnostic::error(
                        Code::CyclicInheritance,
                        te.span(),
                        format!("Cyclic inheritance: '{}' cannot extend '{}'.", name, head),
                    ));
                    dropped.insert((name.clone(), k));
                    self.bad.insert(name.clone());
                } else {
                    edges.entry(name.clone()).or_default().push(head);
                }
            }
        }
        dropped
    }

    pub(crate) fn check_role_sets(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            if c.prelude {
                continue;
            }
            let d = self.decl_of(&c).clone();
            let own: HashSet<&str> = c.roles.iter().map(String::as_str).collect();
            for te in d.supertypes() {
                let Some(n) = te.named() else { continue };
                let theirs: HashSet<&str> = n.roles.iter().map(|r| r.name.as_str()).collect();
                if theirs != own {
                    let mut rs: Vec<&str> = c.roles.iter().map(String::as_str).collect();
                    rs.dedup();
                    self.report(Diagnostic::error(
                        Code::RoleSetMismatch,
                        te.span(),
                        format!(
                            "Supertype '{}' must be located at exactly the roles of '{}' ({}).",
                            print_te(te),
                            name,
                            rs.join(", ")
                        ),
                    ));
                    self.bad.insert(name.clone());
                }
            }
        }
    }

    fn method_sig_text(&self, owner: &ClassInfo, m: &MethodInfo) -> String {
        let d = self.decl_of(owner);
        let ps: Vec<String> =
            d.methods[m.index].params.iter().map(|p| format!("{} {}", print_te(&p.te), p.name.name)).collect();
        format!("{}({})", m.name, ps.join(", "))
    }

    pub(crate) fn check_overloads(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            if c.prelude {
                continue;
            }
            let scope = Scope::for_class(&c);
            let mut inherited: Vec<(ClassInfo, MethodInfo, HashMap<String, Type>)> = Vec::new();
            for (cn, map) in self.table.closure(&scope, &c.self_type()).into_iter().skip(1) {
                let Some(sc) = self.table.get(&cn) else { continue };
                for m in &sc.methods {
                    let ps = normalised_params(m, &map);
                    let overridden = c
                        .methods
                        .iter()
                        .any(|o| o.name == m.name && same_params(&normalised_params(o, &HashMap::new()), &ps));
                    let seen = inherited
                        .iter()
                        .any(|(_, o, om)| o.name == m.name && same_params(&normalised_params(o, om), &ps));
                    if !overridden && !seen {
                        inherited.push((sc.clone(), m.clone(), map.clone()));
                    }
                }
            }
            let table = &self.table;
            let role_name = |cls: &str, i: usize| -> String {
                table.get(cls).and_then(|x| x.roles.get(i).cloned()).unwrap_or_else(|| i.to_string())
            };
            let mut found = Vec::new();
            for (i, m) in c.methods.iter().enumerate() {
                let tv: Vec<TParamInfo> = c.tparams.iter().chain(&m.tparams).cloned().collect();
                let arity = self.table.arity_with(&tv);
                let mine = normalised_params(m, &HashMap::new());
                let earlier = c.methods[..i].iter().map(|o| (&c, o, HashMap::new()));
                let inh = inherited.iter().map(|(oc, o, om)| (oc, o, om.clone()));
                'other: for (oc, o, om) in earlier.chain(inh) {
                    if o.name != m.name || o.params.len() != m.params.len() {
                        continue;
                    }
                    let theirs = normalised_params(o, &om);
                    let otv: Vec<TParamInfo> = oc.tparams.iter().chain(&o.tparams).cloned().collect();
                    let oarity = self.table.arity_with(&otv);
                    for r in &c.roles {
                        let a: Vec<String> = mine.iter().map(|t| erase(t, r, &arity, &role_name)).collect();
                        let b: Vec<String> = theirs.iter().map(|t| erase(t, r, &oarity, &role_name)).collect();
                        if a == b {
                            found.push((
                                m.span,
                                format!(
                                    "Illegal overload: '{}' and '{}' have the same signature for role '{}'.",
                                    self.method_sig_text(&c, m),
                                    self.method_sig_text(oc, o),
                                    r
                                ),
                            ));
                            break 'other;
                        }
                    }
                }
            }
            if !found.is_empty() {
                self.bad.insert(name.clone());
            }
            for (span, msg) in found {
                self.report(Diagnostic::error(Code::IllegalOverload, span, msg));
            }
        }
    }

    pub(crate) fn check_kinding(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            if c.prelude {
                continue;
            }
            let d = self.decl_of(&c).clone();
            let scope = Scope::for_class(&c);
            for (tp, info) in d.type_params.iter().zip(&c.tparams) {
                let inner = scope.with_roles(&info.roles);
                for b in &tp.bounds {
                    self.check_bounds(&inner, b);
                }
            }
            for te in d.supertypes() {
                self.check_bounds(&scope, te);
            }
            for f in &d.fields {
                self.check_bounds(&scope, &f.te);
            }
            for (m, info) in d.methods.iter().zip(&c.methods) {
                let s = self.method_scope(&c, info);
                for (tp, ti) in m.type_params.iter().zip(&info.tparams) {
                    let inner = s.with_roles(&ti.roles);
                    for b in &tp.bounds {
                        self.check_bounds(&inner, b);
                    }
                }
                self.check_bounds(&s, &m.ret);
                for p in &m.params {
                    self.check_bounds(&s, &p.te);
                }
            }
            for (k, info) in d.ctors.iter().zip(&c.ctors) {
                let mut s = scope.clone();
                s.tvars.extend(info.tparams.iter().cloned());
                for p in &k.params {
                    self.check_bounds(&s, &p.te);
                }
            }
        }
    }

    pub(crate) fn check_selection_methods(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            for m in c.methods.iter().filter(|m| m.selection) {
                if !self.valid_selection(&c, m) {
                    self.report(Diagnostic::error(
                        Code::BadSelectionAnnotation,
                        m.span,
                        format!(
                            "Selection method '{}' must take one enum value located at one role and return the same enum at another role.",
                            m.name
                        ),
                    ));
                }
            }
        }
    }

    fn valid_selection(&self, c: &ClassInfo, m: &MethodInfo) -> bool {
        if m.params.len() != 1 {
            return false;
        }
        let scope = self.method_scope(c, m);
        let (Some((hp, rp)), Some((hr, rr))) =
            (self.head_roles(&scope, &m.params[0].1), self.head_roles(&scope, &m.ret))
        else {
            return false;
        };
        if hp != hr || rp.len() != 1 || rr.len() != 1 || rp == rr {
            return false;
        }
        if let Some(tp) = m.tparams.iter().find(|tp| tp.name == hp) {
            return tp.bounds.iter().any(|b| b.head_name() == Some("Enum"));
        }
        scope.tvar(&hp).is_none() && self.table.get(&hp).is_some_and(|x| x.is_enum())
    }

    pub(crate) fn check_implementations(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            if c.prelude {
                continue;
            }
            let scope = Scope::for_class(&c);
            let closure = self.table.closure(&scope, &c.self_type());
            let concrete = c.kind == DeclKind::Class && !c.is_abstract;
            if concrete {
                for m in c.methods.iter().filter(|m| !m.has_body) {
                    self.report(Diagnostic::error(
                        Code::MissingImplementation,
                        m.span,
                        format!("Method '{}' in non-abstract class '{}' must have a body.", m.name, name),
                    ));
                }
            }
            for (cn, map) in closure.iter().skip(1) {
                let Some(sc) = self.table.get(cn).cloned() else { continue };
                for m in &sc.methods {
                    if m.is_static {
                        continue;
                    }
                    let ps = normalised_params(m, map);
                    let is_abstract = !m.has_body && (sc.kind == DeclKind::Interface || !sc.prelude);
                    if let Some(own) = c.methods.iter().find(|o| {
                        o.name == m.name && !o.is_static && same_params(&normalised_params(o, &HashMap::new()), &ps)
                    }) {
                        let mut m2 = map.clone();
                        for (tp, otp) in m.tparams.iter().zip(&own.tparams) {
                            m2.insert(tp.name.clone(), Type::var(&otp.name));
                        }
                        let sup_ret = m.ret.subst(&m2).reduce();
                        let s = self.method_scope(&c, own);
                        if !self.table.is_subtype(&s, &own.ret, &sup_ret) {
                            self.report(Diagnostic::error(
                                Code::TypeMismatch,
                                own.span,
                                format!(
                                    "Return type '{}' of '{}' is incompatible with '{}' in '{}'.",
                                    self.render(&s, &own.ret),
                                    own.name,
                                    self.render(&s, &sup_ret),
                                    cn
                                ),
                            ));
                        }
                        continue;
                    }
                    if !concrete || !is_abstract {
                        continue;
                    }
                    let implemented = closure.iter().skip(1).any(|(on, om)| {
                        let Some(oc) = self.table.get(on) else { return false };
                        oc.methods.iter().any(|o| {
                            o.name == m.name
                                && (o.has_body || (oc.prelude && oc.kind == DeclKind::Class))
                                && same_params(&normalised_params(o, om), &ps)
                        })
                    });
                    if !implemented {
                        let sig = self.method_sig_text(&sc, m);
                        self.report(Diagnostic::error(
                            Code::MissingImplementation,
                            c.span,
                            format!("Class '{}' must implement method '{}' of '{}'.", name, sig, cn),
                        ));
                    }
                }
            }
        }
    }

    pub(crate) fn check_unused_roles(&mut self) {
        let names = self.table.order.clone();
        for name in &names {
            let c = self.table.classes[name].clone();
            // A single role is always used by the implicit supertype.
            if c.prelude || c.roles.len() < 2 || self.bad.contains(name) {
                continue;
            }
            let mut d = self.decl_of(&c).clone();
            let declared = std::mem::take(&mut d.roles);
            let mut used = RoleUse(HashSet::new());
            walk_decl(&mut used, &mut d);
            for r in declared {
                if !used.0.contains(&r.name) {
                    self.report(Diagnostic::warning(
                        Code::UnusedRole,
                        r.span,
                        format!("Role '{}' of '{}' is never used.", r.name, name),
                    ));
                }
            }
        }
    }
}

fn reaches(edges: &HashMap<String, Vec<String>>, from: &str, to: &str) -> bool {
    let mut stack = vec![from.to_string()];
    let mut seen = HashSet::new();
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if !seen.insert(n.clone()) {
            continue;
        }
        if let Some(next) = edges.get(&n) {
            stack.extend(next.iter().cloned());
        }
    }
    false
}
