//! Pretty printer for the surface language; its output parses back to the
//! same AST.

use std::fmt::Write;

use crate::syntax::*;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&print_decl(d));
    }
    out
}

pub fn print_decl(d: &Decl) -> String {
    let mut p = Printer::default();
    p.decl(d);
    p.out
}

/// Statement chain, one statement per line.
pub fn print_stm(s: &Stm) -> String {
    let mut p = Printer::default();
    p.stm(s);
    p.out
}

pub fn print_exp(e: &Exp) -> String {
    let mut s = String::new();
    exp(&mut s, e);
    s
}

pub fn print_te(t: &TypeExpr) -> String {
    let mut s = String::new();
    te(&mut s, t);
    s
}

fn roles(s: &mut String, rs: &[RoleRef]) {
    match rs {
        [] => {}
        [r] => {
            let _ = write!(s, "@{}", r.name);
        }
        _ => {
            s.push_str("@(");
            for (i, r) in rs.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&r.name);
            }
            s.push(')');
        }
    }
}

fn type_args(s: &mut String, ts: &[TypeExpr]) {
    if ts.is_empty() {
        return;
    }
    s.push('<');
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        te(s, t);
    }
    s.push('>');
}

fn named(s: &mut String, n: &NamedType) {
    s.push_str(&n.name.name);
    roles(s, &n.roles);
    type_args(s, &n.args);
}

fn te(s: &mut String, t: &TypeExpr) {
    match t {
        TypeExpr::Void(_) => s.push_str("void"),
        TypeExpr::Named(n) => named(s, n),
    }
}

fn type_params(s: &mut String, tps: &[TypeParam]) {
    if tps.is_empty() {
        return;
    }
    s.push('<');
    for (i, tp) in tps.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&tp.name.name);
        roles(s, &tp.roles);
        for (j, b) in tp.bounds.iter().enumerate() {
            s.push_str(if j == 0 { " extends " } else { " & " });
            te(s, b);
        }
    }
    s.push('>');
}

fn annotations(s: &mut String, anns: &[Annotation], sep: &str) {
    for a in anns {
        let _ = write!(s, "@{}", a.name.name);
        if !a.args.is_empty() {
            s.push('(');
            for (i, (k, v)) in a.args.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{} = {}", k.name, v);
            }
            s.push(')');
        }
        s.push_str(sep);
    }
}

fn modifiers(s: &mut String, ms: &[Modifier]) {
    for m in ms {
        s.push_str(m.keyword());
        s.push(' ');
    }
}

fn args(s: &mut String, es: &[Exp]) {
    s.push('(');
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        exp(s, e);
    }
    s.push(')');
}

fn operand(s: &mut String, e: &Exp) {
    if matches!(e.kind, ExpKind::Binary { .. } | ExpKind::Chain { .. }) {
        s.push('(');
        exp(s, e);
        s.push(')');
    } else {
        exp(s, e);
    }
}

fn exp(s: &mut String, e: &Exp) {
    match &e.kind {
        ExpKind::Lit { value, roles: rs, list } => {
            let _ = write!(s, "{value}");
            if *list {
                s.push_str("@[");
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    s.push_str(&r.name);
                }
                s.push(']');
            } else {
                roles(s, rs);
            }
        }
        ExpKind::Name(i) => s.push_str(&i.name),
        ExpKind::This => s.push_str("this"),
        ExpKind::TypeRef { name, roles: rs, args } => {
            s.push_str(&name.name);
            roles(s, rs);
            type_args(s, args);
        }
        ExpKind::Field { recv, name } => {
            operand(s, recv);
            let _ = write!(s, ".{}", name.name);
        }
        ExpKind::Binary { op, lhs, rhs } => {
            operand(s, lhs);
            let _ = write!(s, " {} ", op.symbol());
            operand(s, rhs);
        }
        ExpKind::Call { recv, type_args: tas, name, args: es } => {
            if let Some(r) = recv {
                operand(s, r);
                s.push('.');
                type_args(s, tas);
            }
            s.push_str(&name.name);
            args(s, es);
        }
        ExpKind::New { type_args: tas, ty, args: es } => {
            s.push_str("new ");
            type_args(s, tas);
            named(s, ty);
            args(s, es);
        }
        ExpKind::Chain { head, links } => {
            operand(s, head);
            for l in links {
                s.push_str(" >> ");
                match &l.target {
                    ChainTarget::Method { recv, type_args: tas, name } => {
                        exp(s, recv);
                        s.push_str("::");
                        type_args(s, tas);
                        s.push_str(&name.name);
                    }
                    ChainTarget::Ctor { ty, .. } => {
                        named(s, ty);
                        s.push_str("::new");
                    }
                }
            }
        }
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn decl(&mut self, d: &Decl) {
        let mut h = String::new();
        annotations(&mut h, &d.annotations, " ");
        modifiers(&mut h, &d.modifiers);
        h.push_str(match d.kind {
            DeclKind::Class => "class ",
            DeclKind::Interface => "interface ",
            DeclKind::Enum => "enum ",
        });
        h.push_str(&d.name.name);
        roles(&mut h, &d.roles);
        type_params(&mut h, &d.type_params);
        for (kw, list) in [(" extends ", &d.extends), (" implements ", &d.implements)] {
            for (i, t) in list.iter().enumerate() {
                h.push_str(if i == 0 { kw } else { ", " });
                te(&mut h, t);
            }
        }
        h.push_str(" {");
        self.line(&h);
        self.indent += 1;
        if d.kind == DeclKind::Enum {
            let cases: Vec<&str> = d.cases.iter().map(|c| c.name.as_str()).collect();
            self.line(&format!("{};", cases.join(", ")));
        }
        for f in &d.fields {
            let mut s = String::new();
            annotations(&mut s, &f.annotations, " ");
            modifiers(&mut s, &f.modifiers);
            te(&mut s, &f.te);
            let _ = write!(s, " {};", f.name.name);
            self.line(&s);
        }
        for c in &d.ctors {
            let mut s = String::new();
            annotations(&mut s, &c.annotations, " ");
            modifiers(&mut s, &c.modifiers);
            if !c.type_params.is_empty() {
                type_params(&mut s, &c.type_params);
                s.push(' ');
            }
            s.push_str(&c.name.name);
            params(&mut s, &c.params);
            s.push_str(" {");
            self.line(&s);
            self.body(&c.body);
            self.line("}");
        }
        for m in &d.methods {
            let mut s = String::new();
            annotations(&mut s, &m.annotations, " ");
            modifiers(&mut s, &m.modifiers);
            if !m.type_params.is_empty() {
                type_params(&mut s, &m.type_params);
                s.push(' ');
            }
            te(&mut s, &m.ret);
            let _ = write!(s, " {}", m.name.name);
            params(&mut s, &m.params);
            match &m.body {
                None => {
                    s.push(';');
                    self.line(&s);
                }
                Some(b) => {
                    s.push_str(" {");
                    self.line(&s);
                    self.body(b);
                    self.line("}");
                }
            }
        }
        self.indent -= 1;
        self.line("}");
    }

    fn body(&mut self, s: &Stm) {
        self.indent += 1;
        self.stm(s);
        self.indent -= 1;
    }

    fn stm(&mut self, mut s: &Stm) {
        loop {
            s = match s {
                Stm::Nil => return,
                Stm::Return { exp: e, .. } => {
                    match e {
                        None => self.line("return;"),
                        Some(e) => self.line(&format!("return {};", print_exp(e))),
                    }
                    return;
                }
                Stm::Throw { exp: e, .. } => {
                    self.line(&format!("throw {};", print_exp(e)));
                    return;
                }
                Stm::Exp { exp: e, cont } => {
                    self.line(&format!("{};", print_exp(e)));
                    cont
                }
                Stm::VarDecl { te: t, name, init, cont, .. } => {
                    let mut l = print_te(t);
                    let _ = write!(l, " {}", name.name);
                    if let Some(e) = init {
                        let _ = write!(l, " = {}", print_exp(e));
                    }
                    l.push(';');
                    self.line(&l);
                    cont
                }
                Stm::Assign { lhs, op, rhs, cont, .. } => {
                    self.line(&format!("{} {} {};", print_exp(lhs), op.symbol(), print_exp(rhs)));
                    cont
                }
                Stm::If { cond, then, els, cont, .. } => {
                    self.line(&format!("if ({}) {{", print_exp(cond)));
                    self.body(then);
                    if els.is_nil() {
                        self.line("}");
                    } else {
                        self.line("} else {");
                        self.body(els);
                        self.line("}");
                    }
                    cont
                }
                Stm::Block { body, cont, .. } => {
                    self.line("{");
                    self.body(body);
                    self.line("}");
                    cont
                }
                Stm::Switch { guard, cases, default, cont, .. } => {
                    self.line(&format!("switch ({}) {{", print_exp(guard)));
                    self.indent += 1;
                    for c in cases {
                        let label = match &c.label {
                            SwArg::Case(i) => i.name.clone(),
                            SwArg::Lit(l) => l.to_string(),
                        };
                        self.line(&format!("case {label} -> {{"));
                        self.body(&c.body);
                        self.line("}");
                    }
                    if let Some(d) = default {
                        self.line("default -> {");
                        self.body(d);
                        self.line("}");
                    }
                    self.indent -= 1;
                    self.line("}");
                    cont
                }
                Stm::Try { body, catches, cont, .. } => {
                    self.line("try {");
                    self.body(body);
                    for c in catches {
                        self.line(&format!("}} catch ({} {}) {{", print_te(&c.te), c.name.name));
                        self.body(&c.body);
                    }
                    self.line("}");
                    cont
                }
            }
        }
    }
}

fn params(s: &mut String, ps: &[Param]) {
    s.push('(');
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        te(s, &p.te);
        let _ = write!(s, " {}", p.name.name);
    }
    s.push(')');
}
