//! Symbol table: declared classes with their members denoted to types.

use std::collections::HashMap;

use crate::syntax::{DeclKind, Span, Type};

#[derive(Debug, Clone, PartialEq)]
pub struct TParamInfo {
    pub name: String,
    pub roles: Vec<String>,
    /// Bounds are expressed over `roles`.
    pub bounds: Vec<Type>,
}

#[derive(Debug, Clone)]
pub struct FieldInfo {
    pub name: String,
    pub ty: Type,
    pub is_static: bool,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct MethodInfo {
    pub name: String,
    /// Position in the declaration's method list.
    pub index: usize,
    pub tparams: Vec<TParamInfo>,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub is_static: bool,
    pub has_body: bool,
    pub selection: bool,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct CtorInfo {
    /// `None` for the implicit constructor of a class without one.
    pub index: Option<usize>,
    pub tparams: Vec<TParamInfo>,
    pub params: Vec<(String, Type)>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub name: String,
    /// Position in [`crate::syntax::Program::decls`].
    pub decl: usize,
    pub kind: DeclKind,
    pub roles: Vec<String>,
    pub tparams: Vec<TParamInfo>,
    pub supers: Vec<Type>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub ctors: Vec<CtorInfo>,
    pub cases: Vec<String>,
    pub prelude: bool,
    pub is_abstract: bool,
    pub span: Span,
}

impl ClassInfo {
    /// `C@(roles)<tparams>` over the declaration's own variables.
    pub fn self_type(&self) -> Type {
        let t = Type::apps(Type::sym(&self.name), self.roles.iter().map(Type::var));
        Type::apps(t, self.tparams.iter().map(|tp| Type::var(&tp.name)))
    }

    /// Substitution of the declaration's variables by the arguments of an
    /// instance type of this class.
    pub fn inst_map(&self, ty: &Type) -> HashMap<String, Type> {
        let (_, args) = ty.spine();
        let mut m = HashMap::new();
        for (i, r) in self.roles.iter().enumerate() {
            if let Some(a) = args.get(i) {
                m.insert(r.clone(), (*a).clone());
            }
        }
        for (i, tp) in self.tparams.iter().enumerate() {
            if let Some(a) = args.get(self.roles.len() + i) {
                m.insert(tp.name.clone(), (*a).clone());
            }
        }
        m
    }

    pub fn is_enum(&self) -> bool {
        self.kind == DeclKind::Enum
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub classes: HashMap<String, ClassInfo>,
    /// Class names in declaration order.
    pub order: Vec<String>,
}

impl Table {
    pub fn get(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn role_arity(&self, name: &str) -> usize {
        self.classes.get(name).map(|c| c.roles.len()).unwrap_or(0)
    }

    /// Role arity of heads, consulting type parameters in scope first.
    pub fn arity_with<'a>(&'a self, tvars: &'a [TParamInfo]) -> impl Fn(&str) -> usize + 'a {
        move |h: &str| {
            if let Some(tp) = tvars.iter().rev().find(|t| t.name == h) {
                return tp.roles.len();
            }
            self.role_arity(h)
        }
    }

    pub fn render(&self, tvars: &[TParamInfo], t: &Type) -> String {
        t.render(&self.arity_with(tvars))
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.order.iter().filter_map(|n| self.classes.get(n))
    }

    /// Whether `name` is an enum or extends `Enum`.
    pub fn is_enum_class(&self, name: &str) -> bool {
        let mut seen = Vec::new();
        let mut stack = vec![name.to_string()];
        while let Some(n) = stack.pop() {
            if n == "Enum" {
                return true;
            }
            if seen.contains(&n) {
                continue;
            }
            seen.push(n.clone());
            if let Some(c) = self.classes.get(&n) {
                if c.is_enum() {
                    return true;
                }
                for s in &c.supers {
                    if let Some(h) = s.head_name() {
                        stack.push(h.to_string());
                    }
                }
            }
        }
        false
    }
}

/// Roles and type variables visible at a program point.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub roles: Vec<String>,
    pub tvars: Vec<TParamInfo>,
}

impl Scope {
    pub fn has_role(&self, r: &str) -> bool {
        self.roles.iter().any(|x| x == r)
    }

    pub fn tvar(&self, name: &str) -> Option<&TParamInfo> {
        self.tvars.iter().rev().find(|t| t.name == name)
    }

    pub fn with_roles(&self, extra: &[String]) -> Scope {
        let mut s = self.clone();
        s.roles.extend(extra.iter().cloned());
        s
    }

    pub fn for_class(c: &ClassInfo) -> Scope {
        Scope { roles: c.roles.clone(), tvars: c.tparams.clone() }
    }
}
