//! Roles each method takes part in, as positions of its class's role
//! parameters.
//!
//! A method involves a role when the role occurs in its signature, in the
//! type of any expression or declaration in its body, or in the footprint of
//! a method it calls (mapped through the call's role arguments). Bodiless
//! methods involve every role of their class, since an override may.

use std::collections::{BTreeSet, HashMap};

use crate::syntax::*;

use super::{roles_of_te, CallKind, Checked};

pub type Footprints = HashMap<(String, usize), BTreeSet<usize>>;

struct Local<'a> {
    checked: &'a Checked,
    roles: BTreeSet<String>,
    /// Callee key with the caller-side role name of each callee role.
    calls: Vec<((String, usize), Vec<String>)>,
}

impl Local<'_> {
    fn te(&mut self, te: &TypeExpr) {
        self.roles.extend(roles_of_te(te));
    }

    fn stm(&mut self, s: &Stm) {
        match s {
            Stm::Nil => {}
            Stm::Return { exp, .. } => {
                if let Some(e) = exp {
                    self.exp(e);
                }
            }
            Stm::Exp { exp, cont } => {
                self.exp(exp);
                self.stm(cont);
            }
            Stm::VarDecl { te, init, cont, .. } => {
                self.te(te);
                if let Some(e) = init {
                    self.exp(e);
                }
                self.stm(cont);
            }
            Stm::Assign { lhs, rhs, cont, .. } => {
                self.exp(lhs);
                self.exp(rhs);
                self.stm(cont);
            }
            Stm::If { cond, then, els, cont, .. } => {
                self.exp(cond);
                self.stm(then);
                self.stm(els);
                self.stm(cont);
            }
            Stm::Block { body, cont, .. } => {
                self.stm(body);
                self.stm(cont);
            }
            Stm::Switch { guard, cases, default, cont, .. } => {
                self.exp(guard);
                cases.iter().for_each(|c| self.stm(&c.body));
                if let Some(d) = default {
                    self.stm(d);
                }
                self.stm(cont);
            }
            Stm::Try { body, catches, cont, .. } => {
                self.stm(body);
                for k in catches {
                    self.te(&k.te);
                    self.stm(&k.body);
                }
                self.stm(cont);
            }
            Stm::Throw { exp, .. } => self.exp(exp),
        }
    }

    fn exp(&mut self, e: &Exp) {
        // Type-based roles of `e` and its subterms; type variables count by
        // their syntactic role names only.
        self.roles.extend(self.checked.roles_of_exp(&[], e));
        self.calls_in(e);
    }

    fn calls_in(&mut self, e: &Exp) {
        match &e.kind {
            ExpKind::Call { recv, args, .. } => {
                if let Some(info) = self.checked.call(e) {
                    if info.kind == CallKind::Method {
                        if let Some(i) = info.index {
                            self.calls.push(((info.owner.clone(), i), info.roles.clone()));
                        }
                    }
                }
                if let Some(r) = recv {
                    self.calls_in(r);
                }
                args.iter().for_each(|a| self.calls_in(a));
            }
            ExpKind::New { ty, args, .. } => {
                self.roles.extend(ty.roles.iter().map(|r| r.name.clone()));
                args.iter().for_each(|a| self.calls_in(a));
            }
            ExpKind::Field { recv, .. } => self.calls_in(recv),
            ExpKind::Binary { lhs, rhs, .. } => {
                self.calls_in(lhs);
                self.calls_in(rhs);
            }
            ExpKind::Chain { head, .. } => self.calls_in(head),
            ExpKind::Lit { .. } | ExpKind::Name(_) | ExpKind::This | ExpKind::TypeRef { .. } => {}
        }
    }
}

/// Footprints of every method of the user declarations in `program`.
pub fn footprints(program: &Program, checked: &Checked) -> Footprints {
    let mut out = Footprints::new();
    let mut edges = Vec::new();
    for d in program.decls.iter().filter(|d| !d.prelude) {
        let formals: Vec<String> = d.roles.iter().map(|r| r.name.clone()).collect();
        let index_of = |names: &BTreeSet<String>| -> BTreeSet<usize> {
            names.iter().filter_map(|n| formals.iter().position(|f| f == n)).collect()
        };
        for (i, m) in d.methods.iter().enumerate() {
            let key = (d.name.name.clone(), i);
            let Some(body) = &m.body else {
                out.insert(key, (0..formals.len()).collect());
                continue;
            };
            let mut l = Local { checked, roles: BTreeSet::new(), calls: Vec::new() };
            l.te(&m.ret);
            m.params.iter().for_each(|p| l.te(&p.te));
            l.stm(body);
            out.insert(key.clone(), index_of(&l.roles));
            for (callee, site) in l.calls {
                let positions: Vec<Option<usize>> = site.iter().map(|r| formals.iter().position(|f| f == r)).collect();
                edges.push((key.clone(), callee, positions));
            }
        }
    }
    loop {
        let mut changed = false;
        for (caller, callee, positions) in &edges {
            let Some(fp) = out.get(callee) else { continue };
            let add: Vec<usize> = fp.iter().filter_map(|&j| positions.get(j).copied().flatten()).collect();
            let set = out.get_mut(caller).expect("caller has a footprint");
            for j in add {
                changed |= set.insert(j);
            }
        }
        if !changed {
            return out;
        }
    }
}
