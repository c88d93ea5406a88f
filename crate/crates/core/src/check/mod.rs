//! Kinding, type denotation, subtyping, bidirectional checking of member
//! bodies and the role constraints on declarations.
//!
//! The result annotates every expression with its type and every call with
//! its resolved target; projection and both evaluators read these
//! annotations instead of re-deriving them.

mod constraints;
mod denote;
mod expr;
mod footprint;
pub mod kinds;
mod stm;
pub mod subtype;
pub mod table;

use std::collections::{BTreeSet, HashMap, HashSet};

pub use footprint::Footprints;
pub use subtype::{abstract_roles, error_type, is_error};
pub use table::{ClassInfo, CtorInfo, FieldInfo, MethodInfo, Scope, TParamInfo, Table};

use crate::syntax::types::fresh_name;
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq)]
pub enum NameRef {
    Local(NodeId),
    Field { owner: String, is_static: bool },
    EnumCase { enum_name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallKind {
    Method,
    Ctor,
    Super,
}

/// Resolved target of a call or instance creation.
#[derive(Debug, Clone)]
pub struct CallInfo {
    pub kind: CallKind,
    /// Class declaring the member.
    pub owner: String,
    /// Method or constructor position in the owner's declaration; `None` for
    /// an implicit constructor.
    pub index: Option<usize>,
    pub is_static: bool,
    pub selection: bool,
    /// Parameter types after instantiation.
    pub params: Vec<Type>,
    pub ret: Type,
    /// Receiver type of an instance call, including an implicit `this`.
    pub recv: Option<Type>,
    /// Role arguments of the owner class at this call site.
    pub roles: Vec<String>,
    pub type_args: Vec<Type>,
}

#[derive(Debug, Clone, Default)]
pub struct Annotations {
    pub types: HashMap<NodeId, Type>,
    pub calls: HashMap<NodeId, CallInfo>,
    pub names: HashMap<NodeId, NameRef>,
    /// Declared types of variables, parameters and catch bindings.
    pub decls: HashMap<NodeId, Type>,
}

/// Output of checking a whole program.
#[derive(Debug, Clone)]
pub struct Checked {
    pub table: Table,
    pub ann: Annotations,
    /// Role positions each user method involves; see [`footprint`].
    pub footprints: Footprints,
    pub diags: Vec<Diagnostic>,
}

impl Checked {
    pub fn empty() -> Self {
        Checked {
            table: Table::default(),
            ann: Annotations::default(),
            footprints: Footprints::new(),
            diags: Vec::new(),
        }
    }

    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diags)
    }

    /// Recorded type of an expression.
    ///
    /// # Panics
    /// If the expression was never annotated, which only happens for
    /// programs that failed checking.
    pub fn type_of(&self, e: &Exp) -> &Type {
        self.ann.types.get(&e.id).unwrap_or_else(|| panic!("expression {} has no type annotation", e.id))
    }

    /// Call-site roles a call takes part in: all of the owner's role
    /// arguments unless the callee's footprint is known.
    pub fn call_roles<'c>(&self, info: &'c CallInfo) -> Vec<&'c str> {
        let fp = info.index.and_then(|i| self.footprints.get(&(info.owner.clone(), i)));
        info.roles
            .iter()
            .enumerate()
            .filter(|(j, _)| fp.is_none_or(|f| f.contains(j)))
            .map(|(_, r)| r.as_str())
            .collect()
    }

    pub fn call(&self, e: &Exp) -> Option<&CallInfo> {
        self.ann.calls.get(&e.id)
    }

    /// Roles of a type, with role arities taken from `tvars` and the table.
    pub fn roles_of_type(&self, tvars: &[TParamInfo], t: &Type) -> BTreeSet<String> {
        t.roles(&self.table.arity_with(tvars))
    }

    /// Roles in the type of `e` and of all its subterms.
    pub fn roles_of_exp(&self, tvars: &[TParamInfo], e: &Exp) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_exp_roles(tvars, e, &mut out);
        out
    }

    fn collect_exp_roles(&self, tvars: &[TParamInfo], e: &Exp, out: &mut BTreeSet<String>) {
        if let Some(t) = self.ann.types.get(&e.id) {
            out.extend(self.roles_of_type(tvars, t));
        }
        match &e.kind {
            ExpKind::Lit { roles, .. } | ExpKind::TypeRef { roles, .. } => {
                out.extend(roles.iter().map(|r| r.name.clone()))
            }
            ExpKind::Field { recv, .. } => self.collect_exp_roles(tvars, recv, out),
            ExpKind::Binary { lhs, rhs, .. } => {
                self.collect_exp_roles(tvars, lhs, out);
                self.collect_exp_roles(tvars, rhs, out);
            }
            ExpKind::Call { recv, args, .. } => {
                if let Some(r) = recv {
                    self.collect_exp_roles(tvars, r, out);
                }
                args.iter().for_each(|a| self.collect_exp_roles(tvars, a, out));
            }
            ExpKind::New { ty, args, .. } => {
                out.extend(ty.roles.iter().map(|r| r.name.clone()));
                args.iter().for_each(|a| self.collect_exp_roles(tvars, a, out));
            }
            ExpKind::Chain { head, .. } => self.collect_exp_roles(tvars, head, out),
            ExpKind::Name(_) | ExpKind::This => {}
        }
    }

    /// Class scope plus the type parameters of method `index` of `class`.
    pub fn method_tvars(&self, class: &str, index: usize) -> Vec<TParamInfo> {
        let Some(c) = self.table.get(class) else { return Vec::new() };
        let mut tv = c.tparams.clone();
        if let Some(m) = c.methods.iter().find(|m| m.index == index) {
            tv.extend(m.tparams.iter().cloned());
        }
        tv
    }
}

/// Roles of a type expression, syntactically.
pub fn roles_of_te(te: &TypeExpr) -> BTreeSet<String> {
    fn go(te: &TypeExpr, out: &mut BTreeSet<String>) {
        if let TypeExpr::Named(n) = te {
            out.extend(n.roles.iter().map(|r| r.name.clone()));
            n.args.iter().for_each(|a| go(a, out));
        }
    }
    let mut out = BTreeSet::new();
    go(te, &mut out);
    out
}

/// Checks a parsed program (prelude declarations included).
pub fn check_program(program: &Program) -> Checked {
    let mut c = Checker::new(program);
    c.run();
    let mut diags = c.diags;
    diags.sort_by_key(|d| (d.span.file, d.span.start));
    diags.dedup();
    let mut checked = Checked { table: c.table, ann: c.ann, footprints: Footprints::new(), diags };
    if !checked.has_errors() {
        checked.footprints = footprint::footprints(program, &checked);
    }
    checked
}

/// Host spellings of the lifted primitive types.
pub fn canonical(name: &str) -> &str {
    match name {
        "int" => "Integer",
        "long" => "Long",
        "double" => "Double",
        "boolean" => "Boolean",
        "char" => "Char",
        other => other,
    }
}

pub(crate) struct Checker<'p> {
    pub program: &'p Program,
    pub table: Table,
    pub ann: Annotations,
    pub diags: Vec<Diagnostic>,
    quiet: u32,
    /// Declarations whose constraint errors suppress body checking.
    bad: HashSet<String>,
}

impl<'p> Checker<'p> {
    fn new(program: &'p Program) -> Self {
        Checker {
            program,
            table: Table::default(),
            ann: Annotations::default(),
            diags: Vec::new(),
            quiet: 0,
            bad: HashSet::new(),
        }
    }

    pub(crate) fn report(&mut self, d: Diagnostic) {
        if self.quiet == 0 {
            self.diags.push(d);
        }
    }

    /// Runs `f` with diagnostics suppressed.
    pub(crate) fn quietly<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        self.quiet += 1;
        let r = f(self);
        self.quiet -= 1;
        r
    }

    fn run(&mut self) {
        let dropped = self.build_skeletons();
        self.fill_members(&dropped);
        self.check_role_sets();
        self.check_overloads();
        self.check_kinding();
        self.check_bodies();
        self.check_selection_methods();
        self.check_implementations();
        self.check_unused_roles();
    }

    fn decl(&self, c: &ClassInfo) -> &'p Decl {
        &self.program.decls[c.decl]
    }

    /// Registers every declaration name; returns the super clauses dropped
    /// because they close an inheritance cycle.
    fn build_skeletons(&mut self) -> HashSet<(String, usize)> {
        let mut chosen: HashMap<String, usize> = HashMap::new();
        let mut order: Vec<String> = Vec::new();
        for (i, d) in self.program.decls.iter().enumerate() {
            let name = d.name.name.clone();
            match chosen.get(&name) {
                None => {
                    chosen.insert(name.clone(), i);
                    order.push(name);
                }
                Some(&j) => {
                    let prev = &self.program.decls[j];
                    if prev.prelude && !d.prelude {
                        chosen.insert(name, i);
                    } else if !d.prelude {
                        self.report(Diagnostic::error(
                            Code::DuplicateDecl,
                            d.name.span,
                            format!("Duplicate declaration of '{}'.", d.name.name),
                        ));
                    }
                }
            }
        }
        for name in &order {
            let i = chosen[name];
            let d = &self.program.decls[i];
            let roles = d.role_names();
            for (k, r) in d.roles.iter().enumerate() {
                if roles[..k].contains(&r.name) {
                    self.report(Diagnostic::error(
                        Code::DuplicateDecl,
                        r.span,
                        format!("Duplicate role parameter '{}' in '{}'.", r.name, d.name.name),
                    ));
                }
            }
            let tparams = d
                .type_params
                .iter()
                .map(|tp| TParamInfo {
                    name: tp.name.name.clone(),
                    roles: tp.roles.iter().map(|r| r.name.clone()).collect(),
                    bounds: Vec::new(),
                })
                .collect();
            let info = ClassInfo {
                name: name.clone(),
                decl: i,
                kind: d.kind,
                roles,
                tparams,
                supers: Vec::new(),
                fields: Vec::new(),
                methods: Vec::new(),
                ctors: Vec::new(),
                cases: d.cases.iter().map(|c| c.name.clone()).collect(),
                prelude: d.prelude,
                is_abstract: d.is_abstract(),
                span: d.name.span,
            };
            self.table.classes.insert(name.clone(), info);
        }
        self.table.order = order;
        self.detect_cycles()
    }

    fn fill_members(&mut self, dropped: &HashSet<(String, usize)>) {
        let names = self.table.order.clone();
        for name in &names {
            let info = self.table.classes[name].clone();
            let d = self.decl(&info);
            let mut scope = Scope { roles: info.roles.clone(), tvars: info.tparams.clone() };

            let mut tparams = info.tparams.clone();
            for (k, tp) in d.type_params.iter().enumerate() {
                let inner = scope.with_roles(&tparams[k].roles);
                let bounds: Vec<Type> =
                    tp.bounds.iter().map(|b| self.denote(&inner, b).unwrap_or_else(error_type)).collect();
                tparams[k].bounds = bounds;
            }
            scope.tvars = tparams.clone();

            let mut supers = Vec::new();
            for (k, te) in d.supertypes().enumerate() {
                if dropped.contains(&(name.clone(), k)) {
                    continue;
                }
                if let Some(t) = self.denote(&scope, te) {
                    match t.head_name() {
                        Some(h) if self.table.get(h).is_some() => supers.push(t),
                        _ => self.report(Diagnostic::error(
                            Code::TypeMismatch,
                            te.span(),
                            "Only classes and interfaces can be extended.",
                        )),
                    }
                }
            }
            if d.kind == DeclKind::Enum && info.roles.len() == 1 && self.table.get("Enum").is_some() {
                supers.push(Type::apps(Type::sym("Enum"), [Type::var(&info.roles[0]), Type::sym(name)]));
            }
            if supers.is_empty() && info.roles.len() == 1 && name != "Object" && self.table.get("Object").is_some() {
                supers.push(Type::app(Type::sym("Object"), Type::var(&info.roles[0])));
            }

            let mut fields = Vec::new();
            for f in &d.fields {
                let ty = self.denote(&scope, &f.te).unwrap_or_else(error_type);
                if ty == Type::Void {
                    self.report(Diagnostic::error(Code::TypeMismatch, f.te.span(), "A field cannot have type 'void'."));
                }
                fields.push(FieldInfo { name: f.name.name.clone(), ty, is_static: f.is_static(), span: f.span });
            }

            let mut methods = Vec::new();
            for (idx, m) in d.methods.iter().enumerate() {
                let (tps, mscope) = self.member_tparams(&scope, &m.type_params);
                let params = self.denote_params(&mscope, &m.params);
                let ret = self.denote(&mscope, &m.ret).unwrap_or_else(error_type);
                methods.push(MethodInfo {
                    name: m.name.name.clone(),
                    index: idx,
                    tparams: tps,
                    params,
                    ret,
                    is_static: m.is_static(),
                    has_body: m.body.is_some(),
                    selection: m.has_annotation("SelectionMethod"),
                    span: m.name.span,
                });
            }

            let mut ctors = Vec::new();
            for (idx, c) in d.ctors.iter().enumerate() {
                let (tps, cscope) = self.member_tparams(&scope, &c.type_params);
                let params = self.denote_params(&cscope, &c.params);
                ctors.push(CtorInfo { index: Some(idx), tparams: tps, params, span: c.name.span });
            }
            if ctors.is_empty() && d.kind == DeclKind::Class {
                ctors.push(CtorInfo { index: None, tparams: Vec::new(), params: Vec::new(), span: d.name.span });
            }

            let c = self.table.classes.get_mut(name).unwrap();
            c.tparams = tparams;
            c.supers = supers;
            c.fields = fields;
            c.methods = methods;
            c.ctors = ctors;
        }
    }

    fn member_tparams(&mut self, scope: &Scope, tps: &[TypeParam]) -> (Vec<TParamInfo>, Scope) {
        let mut infos: Vec<TParamInfo> = tps
            .iter()
            .map(|tp| TParamInfo {
                name: tp.name.name.clone(),
                roles: tp.roles.iter().map(|r| r.name.clone()).collect(),
                bounds: Vec::new(),
            })
            .collect();
        let mut s = scope.clone();
        s.tvars.extend(infos.iter().cloned());
        for (k, tp) in tps.iter().enumerate() {
            let inner = s.with_roles(&infos[k].roles);
            infos[k].bounds = tp.bounds.iter().map(|b| self.denote(&inner, b).unwrap_or_else(error_type)).collect();
        }
        let mut s = scope.clone();
        s.tvars.extend(infos.iter().cloned());
        (infos, s)
    }

    fn denote_params(&mut self, scope: &Scope, ps: &[Param]) -> Vec<(String, Type)> {
        let mut out = Vec::new();
        for p in ps {
            let ty = self.denote(scope, &p.te).unwrap_or_else(error_type);
            if ty == Type::Void {
                self.report(Diagnostic::error(Code::TypeMismatch, p.te.span(), "A parameter cannot have type 'void'."));
            }
            self.ann.decls.insert(p.id, ty.clone());
            out.push((p.name.name.clone(), ty));
        }
        out
    }

    /// Scope for the body of method `idx` of class `c`.
    pub(crate) fn method_scope(&self, c: &ClassInfo, m: &MethodInfo) -> Scope {
        let mut s = Scope::for_class(c);
        s.tvars.extend(m.tparams.iter().cloned());
        s
    }

    pub(crate) fn render(&self, scope: &Scope, t: &Type) -> String {
        self.table.render(&scope.tvars, t)
    }

    pub(crate) fn fresh_roles(&self, n: usize) -> Vec<String> {
        (0..n).map(|_| fresh_name("Z")).collect()
    }
}

#[cfg(test)]
mod tests;
