//! Surface AST of role-annotated choreographies.
//!
//! Statements are continuation-structured: every statement form other than
//! `Nil` and `Return` carries the statement that follows it.

use std::fmt;

use super::span::Span;

/// Role identifiers live in their own namespace.
pub type RoleName = String;

/// Identity of an expression, variable declaration or parameter; the checker
/// keys its annotations by it.
pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident { name: name.into(), span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoleRef {
    pub name: RoleName,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeclKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modifier {
    Public,
    Protected,
    Private,
    Abstract,
    Final,
    Static,
    Default,
}

impl Modifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Modifier::Public => "public",
            Modifier::Protected => "protected",
            Modifier::Private => "private",
            Modifier::Abstract => "abstract",
            Modifier::Final => "final",
            Modifier::Static => "static",
            Modifier::Default => "default",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Modifier> {
        Some(match s {
            "public" => Modifier::Public,
            "protected" => Modifier::Protected,
            "private" => Modifier::Private,
            "abstract" => Modifier::Abstract,
            "final" => Modifier::Final,
            "static" => Modifier::Static,
            "default" => Modifier::Default,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub name: Ident,
    pub args: Vec<(Ident, Literal)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Null,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Long(i) => write!(f, "{i}L"),
            Literal::Double(d) => {
                if d.fract() == 0.0 && d.is_finite() {
                    write!(f, "{d:.1}")
                } else {
                    write!(f, "{d}")
                }
            }
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Literal::Null => f.write_str("null"),
        }
    }
}

/// Formal type parameter `T@(X..) extends B1 & B2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeParam {
    pub name: Ident,
    pub roles: Vec<RoleRef>,
    pub bounds: Vec<TypeExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedType {
    pub name: Ident,
    pub roles: Vec<RoleRef>,
    pub args: Vec<TypeExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExpr {
    Void(Span),
    Named(NamedType),
}

impl TypeExpr {
    pub fn span(&self) -> Span {
        match self {
            TypeExpr::Void(s) => *s,
            TypeExpr::Named(n) => n.span,
        }
    }

    pub fn named(&self) -> Option<&NamedType> {
        match self {
            TypeExpr::Named(n) => Some(n),
            TypeExpr::Void(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub kind: DeclKind,
    pub annotations: Vec<Annotation>,
    pub modifiers: Vec<Modifier>,
    pub name: Ident,
    pub roles: Vec<RoleRef>,
    pub type_params: Vec<TypeParam>,
    pub extends: Vec<TypeExpr>,
    pub implements: Vec<TypeExpr>,
    pub fields: Vec<Field>,
    pub ctors: Vec<Ctor>,
    pub methods: Vec<Method>,
    pub cases: Vec<Ident>,
    pub span: Span,
    /// Declarations of the prelude have host-provided method bodies.
    pub prelude: bool,
}

impl Decl {
    pub fn role_names(&self) -> Vec<RoleName> {
        self.roles.iter().map(|r| r.name.clone()).collect()
    }

    pub fn supertypes(&self) -> impl Iterator<Item = &TypeExpr> {
        self.extends.iter().chain(self.implements.iter())
    }

    pub fn is_abstract(&self) -> bool {
        self.kind == DeclKind::Interface || self.modifiers.contains(&Modifier::Abstract)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub annotations: Vec<Annotation>,
    pub modifiers: Vec<Modifier>,
    pub te: TypeExpr,
    pub name: Ident,
    pub span: Span,
}

impl Field {
    pub fn is_static(&self) -> bool {
        self.modifiers.contains(&Modifier::Static)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub id: NodeId,
    pub te: TypeExpr,
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ctor {
    pub annotations: Vec<Annotation>,
    pub modifiers: Vec<Modifier>,
    pub type_params: Vec<TypeParam>,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Stm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub annotations: Vec<Annotation>,
    pub modifiers: Vec<Modifier>,
    pub type_params: Vec<TypeParam>,
    pub ret: TypeExpr,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Option<Stm>,
    pub span: Span,
}

impl Method {
    pub fn is_static(&self) -> bool {
        self.modifiers.contains(&Modifier::Static)
    }

    pub fn has_annotation(&self, name: &str) -> bool {
        self.annotations.iter().any(|a| a.name.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsgOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    And,
    Or,
    Rem,
}

impl AsgOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AsgOp::Assign => "=",
            AsgOp::Add => "+=",
            AsgOp::Sub => "-=",
            AsgOp::Mul => "*=",
            AsgOp::Div => "/=",
            AsgOp::And => "&=",
            AsgOp::Or => "|=",
            AsgOp::Rem => "%=",
        }
    }

    /// Binary operator applied by a compound assignment.
    pub fn binop(self) -> Option<BinOp> {
        Some(match self {
            AsgOp::Assign => return None,
            AsgOp::Add => BinOp::Add,
            AsgOp::Sub => BinOp::Sub,
            AsgOp::Mul => BinOp::Mul,
            AsgOp::Div => BinOp::Div,
            AsgOp::And => BinOp::BitAnd,
            AsgOp::Or => BinOp::BitOr,
            AsgOp::Rem => BinOp::Rem,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    BitOr,
    BitAnd,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::BitOr => "|",
            BinOp::BitAnd => "&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::BitOr => 3,
            BinOp::BitAnd => 4,
            BinOp::Eq | BinOp::Ne => 5,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 6,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 8,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge)
    }

    pub fn is_equality(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::Or | BinOp::And)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SwArg {
    Case(Ident),
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub label: SwArg,
    pub body: Stm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catch {
    pub id: NodeId,
    pub te: TypeExpr,
    pub name: Ident,
    pub body: Stm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stm {
    Nil,
    Return {
        exp: Option<Exp>,
        span: Span,
    },
    Exp {
        exp: Exp,
        cont: Box<Stm>,
    },
    VarDecl {
        id: NodeId,
        te: TypeExpr,
        name: Ident,
        init: Option<Exp>,
        cont: Box<Stm>,
        span: Span,
    },
    Assign {
        lhs: Exp,
        op: AsgOp,
        rhs: Exp,
        cont: Box<Stm>,
        span: Span,
    },
    If {
        cond: Exp,
        then: Box<Stm>,
        els: Box<Stm>,
        cont: Box<Stm>,
        span: Span,
    },
    Block {
        body: Box<Stm>,
        cont: Box<Stm>,
        span: Span,
    },
    Switch {
        guard: Exp,
        cases: Vec<Case>,
        default: Option<Box<Stm>>,
        cont: Box<Stm>,
        span: Span,
    },
    Try {
        body: Box<Stm>,
        catches: Vec<Catch>,
        cont: Box<Stm>,
        span: Span,
    },
    /// Only produced when parsing the local language.
    Throw {
        exp: Exp,
        span: Span,
    },
}

impl Stm {
    pub fn is_nil(&self) -> bool {
        matches!(self, Stm::Nil)
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            Stm::Nil => None,
            Stm::Exp { exp, .. } => Some(exp.span),
            Stm::Return { span, .. }
            | Stm::VarDecl { span, .. }
            | Stm::Assign { span, .. }
            | Stm::If { span, .. }
            | Stm::Block { span, .. }
            | Stm::Switch { span, .. }
            | Stm::Try { span, .. }
            | Stm::Throw { span, .. } => Some(*span),
        }
    }

    /// Appends `tail` at the end of this statement's continuation chain.
    pub fn append(self, tail: Stm) -> Stm {
        if tail.is_nil() {
            return self;
        }
        match self {
            Stm::Nil => tail,
            Stm::Return { .. } | Stm::Throw { .. } => self,
            Stm::Exp { exp, cont } => Stm::Exp { exp, cont: Box::new(cont.append(tail)) },
            Stm::VarDecl { id, te, name, init, cont, span } => {
                Stm::VarDecl { id, te, name, init, cont: Box::new(cont.append(tail)), span }
            }
            Stm::Assign { lhs, op, rhs, cont, span } => {
                Stm::Assign { lhs, op, rhs, cont: Box::new(cont.append(tail)), span }
            }
            Stm::If { cond, then, els, cont, span } => {
                Stm::If { cond, then, els, cont: Box::new(cont.append(tail)), span }
            }
            Stm::Block { body, cont, span } => Stm::Block { body, cont: Box::new(cont.append(tail)), span },
            Stm::Switch { guard, cases, default, cont, span } => {
                Stm::Switch { guard, cases, default, cont: Box::new(cont.append(tail)), span }
            }
            Stm::Try { body, catches, cont, span } => {
                Stm::Try { body, catches, cont: Box::new(cont.append(tail)), span }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExpKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpKind {
    /// `lit@(R..)`; `list` marks the `lit@[R..]` argument sugar before expansion.
    Lit {
        value: Literal,
        roles: Vec<RoleRef>,
        list: bool,
    },
    Name(Ident),
    This,
    /// `id@(R..)<TE..>` used as the receiver of a static access.
    TypeRef {
        name: Ident,
        roles: Vec<RoleRef>,
        args: Vec<TypeExpr>,
    },
    Field {
        recv: Box<Exp>,
        name: Ident,
    },
    Binary {
        op: BinOp,
        lhs: Box<Exp>,
        rhs: Box<Exp>,
    },
    Call {
        recv: Option<Box<Exp>>,
        type_args: Vec<TypeExpr>,
        name: Ident,
        args: Vec<Exp>,
    },
    New {
        type_args: Vec<TypeExpr>,
        ty: NamedType,
        args: Vec<Exp>,
    },
    Chain {
        head: Box<Exp>,
        links: Vec<ChainLink>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub target: ChainTarget,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainTarget {
    /// `recv::<TAs>m`; `recv` is an expression or a static type reference.
    Method { recv: Box<Exp>, type_args: Vec<TypeExpr>, name: Ident },
    /// `id@(R..)<TAs>::new`.
    Ctor { type_args: Vec<TypeExpr>, ty: NamedType },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name.name == name)
    }

    pub fn user_decls(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter().filter(|d| !d.prelude)
    }
}
