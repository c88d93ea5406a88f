//! Role-free local language produced by projection.
//!
//! The node types have no place to store a role, so role erasure is total by
//! construction; `Unit.id` and the selection switch's throwing default are
//! explicit forms.

use serde::Serialize;

use super::ast::{AsgOp, BinOp, DeclKind, Literal, Modifier};

/// Provenance of a generated unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UnitMeta {
    pub source: String,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalAnnotation {
    pub name: String,
    pub args: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LocalTE {
    Void,
    Named(String, Vec<LocalTE>),
}

impl LocalTE {
    pub fn unit() -> LocalTE {
        LocalTE::Named("Unit".into(), Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, LocalTE::Named(n, a) if n == "Unit" && a.is_empty())
    }

    pub fn name(&self) -> &str {
        match self {
            LocalTE::Void => "void",
            LocalTE::Named(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalTypeParam {
    pub name: String,
    pub bounds: Vec<LocalTE>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalField {
    pub modifiers: Vec<Modifier>,
    pub te: LocalTE,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalParam {
    pub te: LocalTE,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalCtor {
    pub modifiers: Vec<Modifier>,
    pub type_params: Vec<LocalTypeParam>,
    pub params: Vec<LocalParam>,
    pub body: LocalStm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMethod {
    pub annotations: Vec<LocalAnnotation>,
    pub modifiers: Vec<Modifier>,
    pub type_params: Vec<LocalTypeParam>,
    pub ret: LocalTE,
    pub name: String,
    pub params: Vec<LocalParam>,
    pub body: Option<LocalStm>,
}

impl LocalMethod {
    pub fn is_static(&self) -> bool {
        self.modifiers.contains(&Modifier::Static)
    }

    pub fn has_annotation(&self, name: &str) -> bool {
        self.annotations.iter().any(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecl {
    pub meta: Option<UnitMeta>,
    pub kind: DeclKind,
    pub annotations: Vec<LocalAnnotation>,
    pub modifiers: Vec<Modifier>,
    pub name: String,
    pub type_params: Vec<LocalTypeParam>,
    pub extends: Vec<LocalTE>,
    pub implements: Vec<LocalTE>,
    pub fields: Vec<LocalField>,
    pub ctors: Vec<LocalCtor>,
    pub methods: Vec<LocalMethod>,
    pub cases: Vec<String>,
}

impl LocalDecl {
    pub fn method(&self, name: &str) -> impl Iterator<Item = &LocalMethod> {
        let name = name.to_string();
        self.methods.iter().filter(move |m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LocalProgram {
    pub units: Vec<LocalDecl>,
}

impl LocalProgram {
    pub fn unit(&self, name: &str) -> Option<&LocalDecl> {
        self.units.iter().find(|u| u.name == name)
    }

    pub fn unit_for(&self, source: &str, role: &str) -> Option<&LocalDecl> {
        self.units.iter().find(|u| u.meta.as_ref().is_some_and(|m| m.source == source && m.role == role))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalSwArg {
    Case(String),
    Lit(Literal),
}

impl LocalSwArg {
    pub fn sort_key(&self) -> String {
        match self {
            LocalSwArg::Case(c) => c.clone(),
            LocalSwArg::Lit(l) => l.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalDefault {
    Body(Box<LocalStm>),
    /// Raised when a received label has no case.
    Throw(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalCatch {
    pub te: LocalTE,
    pub name: String,
    pub body: LocalStm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalStm {
    Nil,
    Return(Option<LocalExp>),
    Exp(LocalExp, Box<LocalStm>),
    VarDecl(LocalTE, String, Option<LocalExp>, Box<LocalStm>),
    Assign(LocalExp, AsgOp, LocalExp, Box<LocalStm>),
    If(LocalExp, Box<LocalStm>, Box<LocalStm>, Box<LocalStm>),
    Block(Box<LocalStm>, Box<LocalStm>),
    Switch { guard: LocalExp, cases: Vec<(LocalSwArg, LocalStm)>, default: Option<LocalDefault>, cont: Box<LocalStm> },
    Try(Box<LocalStm>, Vec<LocalCatch>, Box<LocalStm>),
}

impl LocalStm {
    pub fn is_nil(&self) -> bool {
        matches!(self, LocalStm::Nil)
    }

    pub fn seq(exp: LocalExp, cont: LocalStm) -> LocalStm {
        LocalStm::Exp(exp, Box::new(cont))
    }

    /// Appends `tail` after the last statement of the chain.
    pub fn append(self, tail: LocalStm) -> LocalStm {
        if tail.is_nil() {
            return self;
        }
        match self {
            LocalStm::Nil => tail,
            LocalStm::Return(_) => self,
            LocalStm::Exp(e, c) => LocalStm::Exp(e, Box::new(c.append(tail))),
            LocalStm::VarDecl(t, n, i, c) => LocalStm::VarDecl(t, n, i, Box::new(c.append(tail))),
            LocalStm::Assign(l, o, r, c) => LocalStm::Assign(l, o, r, Box::new(c.append(tail))),
            LocalStm::If(g, a, b, c) => LocalStm::If(g, a, b, Box::new(c.append(tail))),
            LocalStm::Block(b, c) => LocalStm::Block(b, Box::new(c.append(tail))),
            LocalStm::Switch { guard, cases, default, cont } => {
                LocalStm::Switch { guard, cases, default, cont: Box::new(cont.append(tail)) }
            }
            LocalStm::Try(b, cs, c) => LocalStm::Try(b, cs, Box::new(c.append(tail))),
        }
    }

    /// Sorts switch cases by label everywhere; used to compare merges up to
    /// case order.
    pub fn sorted_cases(&self) -> LocalStm {
        let s = |x: &LocalStm| Box::new(x.sorted_cases());
        match self {
            LocalStm::Nil | LocalStm::Return(_) => self.clone(),
            LocalStm::Exp(e, c) => LocalStm::Exp(e.clone(), s(c)),
            LocalStm::VarDecl(t, n, i, c) => LocalStm::VarDecl(t.clone(), n.clone(), i.clone(), s(c)),
            LocalStm::Assign(l, o, r, c) => LocalStm::Assign(l.clone(), *o, r.clone(), s(c)),
            LocalStm::If(g, a, b, c) => LocalStm::If(g.clone(), s(a), s(b), s(c)),
            LocalStm::Block(b, c) => LocalStm::Block(s(b), s(c)),
            LocalStm::Switch { guard, cases, default, cont } => {
                let mut cases: Vec<_> = cases.iter().map(|(l, b)| (l.clone(), b.sorted_cases())).collect();
                cases.sort_by_key(|(l, _)| l.sort_key());
                let default = default.as_ref().map(|d| match d {
                    LocalDefault::Body(b) => LocalDefault::Body(s(b)),
                    LocalDefault::Throw(m) => LocalDefault::Throw(m.clone()),
                });
                LocalStm::Switch { guard: guard.clone(), cases, default, cont: s(cont) }
            }
            LocalStm::Try(b, cs, c) => LocalStm::Try(
                s(b),
                cs.iter()
                    .map(|k| LocalCatch { te: k.te.clone(), name: k.name.clone(), body: k.body.sorted_cases() })
                    .collect(),
                s(c),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalExp {
    /// `Unit.id`
    Unit,
    /// `Unit.id(e..)`
    UnitCall(Vec<LocalExp>),
    Lit(Literal),
    Name(String),
    This,
    Field(Box<LocalExp>, String),
    Binary(BinOp, Box<LocalExp>, Box<LocalExp>),
    Call {
        recv: Option<Box<LocalExp>>,
        type_args: Vec<LocalTE>,
        name: String,
        args: Vec<LocalExp>,
    },
    New {
        type_args: Vec<LocalTE>,
        te: LocalTE,
        args: Vec<LocalExp>,
    },
}

impl LocalExp {
    pub fn call(recv: Option<LocalExp>, name: impl Into<String>, args: Vec<LocalExp>) -> LocalExp {
        LocalExp::Call { recv: recv.map(Box::new), type_args: Vec::new(), name: name.into(), args }
    }
}
