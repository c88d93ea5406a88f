//! Recursive-descent parser producing the surface AST.

use super::lexer::{lex, Tok, Token};
use crate::syntax::*;

/// Which concrete syntax is being read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Choral,
    Local,
}

/// Source of fresh node identities, shared across all files of a program.
#[derive(Debug, Default)]
pub struct IdGen {
    next: NodeId,
}

impl IdGen {
    pub fn new() -> Self {
        IdGen { next: 1 }
    }

    pub fn fresh(&mut self) -> NodeId {
        let id = self.next;
        self.next += 1;
        id
    }
}

const KEYWORDS: &[&str] = &[
    "class",
    "interface",
    "enum",
    "extends",
    "implements",
    "new",
    "return",
    "if",
    "else",
    "switch",
    "case",
    "default",
    "try",
    "catch",
    "this",
    "null",
    "true",
    "false",
    "void",
    "super",
    "throw",
    "public",
    "protected",
    "private",
    "abstract",
    "final",
    "static",
];

/// A syntax error that has already been pushed to the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reported;

type PResult<T> = Result<T, Reported>;

pub struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    /// The current `>>` token has had its first `>` consumed.
    half: bool,
    pub diags: Vec<Diagnostic>,
    ids: &'a mut IdGen,
    dialect: Dialect,
    prelude: bool,
}

impl<'a> Parser<'a> {
    pub fn new(file: FileId, src: &str, ids: &'a mut IdGen, dialect: Dialect) -> Self {
        let (toks, diags) = lex(file, src);
        Parser { toks, pos: 0, half: false, diags, ids, dialect, prelude: false }
    }

    pub fn prelude(mut self, yes: bool) -> Self {
        self.prelude = yes;
        self
    }

    // ----- token helpers -------------------------------------------------

    fn tok(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        let s = self.toks[self.pos].span;
        if self.half {
            Span::new(s.file, s.start + 1, s.end)
        } else {
            s
        }
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            return self.toks[0].span;
        }
        self.toks[self.pos - 1].span
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn is_punct(&self, p: &str) -> bool {
        match self.tok() {
            Tok::Punct(q) if self.half => *q == ">>" && p == ">",
            Tok::Punct(q) => *q == p,
            _ => false,
        }
    }

    fn is_punct_at(&self, n: usize, p: &str) -> bool {
        matches!(self.peek_at(n), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.tok(), Tok::Ident(s) if s == k)
    }

    fn is_kw_at(&self, n: usize, k: &str) -> bool {
        matches!(self.peek_at(n), Tok::Ident(s) if s == k)
    }

    fn is_ident(&self) -> bool {
        matches!(self.tok(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    fn bump(&mut self) {
        self.half = false;
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.toks[self.pos].describe();
        let span = self.span();
        self.diags.push(Diagnostic::error(
            Code::SyntaxError,
            span,
            format!("Syntax error: expecting {expected} found {found}."),
        ));
        Err(Reported)
    }

    fn expect(&mut self, p: &str) -> PResult<Span> {
        let s = self.span();
        if self.eat(p) {
            Ok(s)
        } else {
            self.error(&format!("'{p}'"))
        }
    }

    /// Closes a type-argument list, splitting `>>` when needed.
    fn expect_close_angle(&mut self) -> PResult<()> {
        match self.tok() {
            Tok::Punct(">") if !self.half => {
                self.bump();
                Ok(())
            }
            Tok::Punct(">>") => {
                if self.half {
                    self.bump();
                } else {
                    self.half = true;
                }
                Ok(())
            }
            _ => self.error("'>'"),
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        if self.is_ident() {
            let Tok::Ident(s) = self.tok().clone() else { unreachable!() };
            let span = self.span();
            self.bump();
            Ok(Ident::new(s, span))
        } else {
            self.error("an identifier")
        }
    }

    fn fresh(&mut self) -> NodeId {
        self.ids.fresh()
    }

    fn mk(&mut self, span: Span, kind: ExpKind) -> Exp {
        Exp { id: self.fresh(), span, kind }
    }

    /// Runs `f`, rolling back position and diagnostics if it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let (pos, half, nd) = (self.pos, self.half, self.diags.len());
        match f(self) {
            Ok(v) => Some(v),
            Err(Reported) => {
                self.pos = pos;
                self.half = half;
                self.diags.truncate(nd);
                None
            }
        }
    }

    fn skip_balanced_to(&mut self, stops: &[&str]) {
        let mut depth = 0i32;
        loop {
            match self.tok() {
                Tok::Eof => return,
                Tok::Punct(p) => {
                    let p = *p;
                    if depth == 0 && stops.contains(&p) {
                        return;
                    }
                    if p == "{" || p == "(" {
                        depth += 1;
                    } else if p == "}" || p == ")" {
                        if depth == 0 {
                            return;
                        }
                        depth -= 1;
                    }
                }
                _ => {}
            }
            self.bump();
        }
    }

    // ----- declarations --------------------------------------------------

    pub fn program(&mut self) -> Vec<Decl> {
        let mut decls = Vec::new();
        while *self.tok() != Tok::Eof {
            // Tolerate package/import headers.
            if self.is_kw("import") || self.is_kw("package") {
                self.skip_balanced_to(&[";"]);
                self.bump();
                continue;
            }
            let before = self.pos;
            match self.decl() {
                Ok(d) => decls.push(d),
                Err(Reported) => {
                    self.skip_balanced_to(&["}"]);
                    self.bump();
                    if self.pos == before {
                        self.bump();
                    }
                }
            }
        }
        decls
    }

    fn annotations(&mut self) -> PResult<Vec<Annotation>> {
        let mut out = Vec::new();
        while self.is_punct("@") {
            let start = self.span();
            self.bump();
            let name = self.ident()?;
            let mut args = Vec::new();
            if self.eat("(") {
                if !self.is_punct(")") {
                    loop {
                        let key = self.ident()?;
                        self.expect("=")?;
                        let lit = self.literal_value()?;
                        args.push((key, lit));
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect(")")?;
            }
            out.push(Annotation { name, args, span: start.to(self.prev_span()) });
        }
        Ok(out)
    }

    fn modifiers(&mut self) -> Vec<Modifier> {
        let mut out = Vec::new();
        loop {
            let m = match self.tok() {
                Tok::Ident(s) => Modifier::from_keyword(s),
                _ => None,
            };
            match m {
                // `default` starts a switch arm in statement position, never here.
                Some(m) if !(m == Modifier::Default && self.dialect == Dialect::Choral) => {
                    out.push(m);
                    self.bump();
                }
                _ => return out,
            }
        }
    }

    fn role_list(&mut self) -> PResult<Vec<RoleRef>> {
        if self.eat("(") {
            let mut roles = Vec::new();
            loop {
                let id = self.ident()?;
                roles.push(RoleRef { name: id.name, span: id.span });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
            Ok(roles)
        } else {
            let id = self.ident()?;
            Ok(vec![RoleRef { name: id.name, span: id.span }])
        }
    }

    fn type_params(&mut self) -> PResult<Vec<TypeParam>> {
        self.expect("<")?;
        let mut out = Vec::new();
        loop {
            let start = self.span();
            let name = self.ident()?;
            let roles = if self.eat("@") { self.role_list()? } else { Vec::new() };
            let mut bounds = Vec::new();
            if self.eat_kw("extends") {
                bounds.push(self.type_expr()?);
                while self.eat("&") {
                    bounds.push(self.type_expr()?);
                }
            }
            out.push(TypeParam { name, roles, bounds, span: start.to(self.prev_span()) });
            if !self.eat(",") {
                break;
            }
        }
        self.expect_close_angle()?;
        Ok(out)
    }

    pub fn type_expr(&mut self) -> PResult<TypeExpr> {
        if self.is_kw("void") {
            let s = self.span();
            self.bump();
            return Ok(TypeExpr::Void(s));
        }
        Ok(TypeExpr::Named(self.named_type()?))
    }

    fn named_type(&mut self) -> PResult<NamedType> {
        let name = self.ident()?;
        let start = name.span;
        let roles = if self.eat("@") { self.role_list()? } else { Vec::new() };
        let args = if self.is_punct("<") { self.type_args()? } else { Vec::new() };
        Ok(NamedType { name, roles, args, span: start.to(self.prev_span()) })
    }

    fn type_args(&mut self) -> PResult<Vec<TypeExpr>> {
        self.expect("<")?;
        let mut out = Vec::new();
        if !self.is_punct(">") {
            loop {
                out.push(self.type_expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect_close_angle()?;
        Ok(out)
    }

    fn te_list(&mut self) -> PResult<Vec<TypeExpr>> {
        let mut out = vec![self.type_expr()?];
        while self.eat(",") {
            out.push(self.type_expr()?);
        }
        Ok(out)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let start = self.span();
        let annotations = self.annotations()?;
        let modifiers = self.modifiers();
        let kind = if self.eat_kw("class") {
            DeclKind::Class
        } else if self.eat_kw("interface") {
            DeclKind::Interface
        } else if self.eat_kw("enum") {
            DeclKind::Enum
        } else {
            return self.error("'class', 'interface' or 'enum'");
        };
        let name = self.ident()?;
        let roles = if self.eat("@") { self.role_list()? } else { Vec::new() };
        let type_params = if self.is_punct("<") { self.type_params()? } else { Vec::new() };
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_kw("extends") {
            extends = self.te_list()?;
        }
        if self.eat_kw("implements") {
            implements = self.te_list()?;
        }
        self.expect("{")?;
        let mut decl = Decl {
            kind,
            annotations,
            modifiers,
            name,
            roles,
            type_params,
            extends,
            implements,
            fields: Vec::new(),
            ctors: Vec::new(),
            methods: Vec::new(),
            cases: Vec::new(),
            span: start,
            prelude: self.prelude,
        };
        if kind == DeclKind::Enum {
            while self.is_ident() {
                decl.cases.push(self.ident()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.eat(";");
        }
        while !self.is_punct("}") && *self.tok() != Tok::Eof {
            let before = self.pos;
            if self.member(&mut decl).is_err() {
                self.skip_balanced_to(&[";", "}"]);
                if self.is_punct(";") {
                    self.bump();
                }
                if self.pos == before {
                    self.bump();
                }
            }
        }
        self.expect("}")?;
        decl.span = start.to(self.prev_span());
        Ok(decl)
    }

    fn member(&mut self, decl: &mut Decl) -> PResult<()> {
        let start = self.span();
        let annotations = self.annotations()?;
        let modifiers = self.modifiers();
        let type_params = if self.is_punct("<") { self.type_params()? } else { Vec::new() };
        if self.is_ident() && self.is_punct_at(1, "(") && matches!(self.tok(), Tok::Ident(s) if *s == decl.name.name) {
            let name = self.ident()?;
            let params = self.params()?;
            let body = self.block()?;
            decl.ctors.push(Ctor {
                annotations,
                modifiers,
                type_params,
                name,
                params,
                body,
                span: start.to(self.prev_span()),
            });
            return Ok(());
        }
        let te = self.type_expr()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            let params = self.params()?;
            let body = if self.eat(";") { None } else { Some(self.block()?) };
            decl.methods.push(Method {
                annotations,
                modifiers,
                type_params,
                ret: te,
                name,
                params,
                body,
                span: start.to(self.prev_span()),
            });
        } else {
            self.expect(";")?;
            decl.fields.push(Field { annotations, modifiers, te, name, span: start.to(self.prev_span()) });
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.is_punct(")") {
            loop {
                let te = self.type_expr()?;
                let name = self.ident()?;
                let span = te.span().to(name.span);
                let id = self.fresh();
                out.push(Param { id, te, name, span });
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    // ----- statements ----------------------------------------------------

    pub fn block(&mut self) -> PResult<Stm> {
        self.expect("{")?;
        let mut stms: Vec<Stm> = Vec::new();
        while !self.is_punct("}") && *self.tok() != Tok::Eof {
            let before = self.pos;
            match self.statement() {
                Ok(Some(s)) => stms.push(s),
                Ok(None) => {}
                Err(Reported) => {
                    self.skip_balanced_to(&[";", "}"]);
                    if self.is_punct(";") {
                        self.bump();
                    }
                    if self.pos == before {
                        self.bump();
                    }
                }
            }
        }
        self.expect("}")?;
        let mut acc = Stm::Nil;
        for s in stms.into_iter().rev() {
            if matches!(s, Stm::Return { .. } | Stm::Throw { .. }) && !acc.is_nil() {
                let span = acc.span().unwrap_or_else(|| s.span().unwrap());
                self.diags.push(Diagnostic::error(Code::SyntaxError, span, "Unreachable statement."));
            }
            acc = s.append(acc);
        }
        Ok(acc)
    }

    /// One statement with a `Nil` continuation; `None` for a stray `;`.
    fn statement(&mut self) -> PResult<Option<Stm>> {
        let start = self.span();
        if self.eat(";") {
            return Ok(None);
        }
        if self.is_punct("{") {
            let body = self.block()?;
            return Ok(Some(Stm::Block {
                body: Box::new(body),
                cont: Box::new(Stm::Nil),
                span: start.to(self.prev_span()),
            }));
        }
        if self.eat_kw("return") {
            let exp = if self.is_punct(";") { None } else { Some(self.expr()?) };
            self.expect(";")?;
            return Ok(Some(Stm::Return { exp, span: start.to(self.prev_span()) }));
        }
        if self.eat_kw("throw") {
            let exp = self.expr()?;
            self.expect(";")?;
            if self.dialect == Dialect::Choral {
                self.diags.push(Diagnostic::error(
                    Code::SyntaxError,
                    start,
                    "Syntax error: 'throw' is only available in the local language.",
                ));
            }
            return Ok(Some(Stm::Throw { exp, span: start.to(self.prev_span()) }));
        }
        if self.eat_kw("if") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let then = self.block()?;
            let els = if self.eat_kw("else") {
                if self.is_kw("if") {
                    return self.error("'{' (write 'else { if ... }')");
                }
                self.block()?
            } else {
                Stm::Nil
            };
            return Ok(Some(Stm::If {
                cond,
                then: Box::new(then),
                els: Box::new(els),
                cont: Box::new(Stm::Nil),
                span: start.to(self.prev_span()),
            }));
        }
        if self.eat_kw("switch") {
            self.expect("(")?;
            let guard = self.expr()?;
            self.expect(")")?;
            self.expect("{")?;
            let mut cases = Vec::new();
            let mut default = None;
            while !self.is_punct("}") {
                let cs = self.span();
                if self.eat_kw("case") {
                    let label =
                        if self.is_ident() { SwArg::Case(self.ident()?) } else { SwArg::Lit(self.literal_value()?) };
                    self.expect("->")?;
                    let body = self.block()?;
                    cases.push(Case { label, body, span: cs.to(self.prev_span()) });
                } else if self.eat_kw("default") {
                    self.expect("->")?;
                    if default.is_some() {
                        self.diags.push(Diagnostic::error(Code::SyntaxError, cs, "Duplicate default branch."));
                    }
                    default = Some(Box::new(self.block()?));
                } else {
                    return self.error("'case' or 'default'");
                }
            }
            self.expect("}")?;
            return Ok(Some(Stm::Switch {
                guard,
                cases,
                default,
                cont: Box::new(Stm::Nil),
                span: start.to(self.prev_span()),
            }));
        }
        if self.eat_kw("try") {
            let body = self.block()?;
            let mut catches = Vec::new();
            while self.is_kw("catch") {
                let cs = self.span();
                self.bump();
                self.expect("(")?;
                let te = self.type_expr()?;
                let name = self.ident()?;
                self.expect(")")?;
                let cbody = self.block()?;
                let id = self.fresh();
                catches.push(Catch { id, te, name, body: cbody, span: cs.to(self.prev_span()) });
            }
            return Ok(Some(Stm::Try {
                body: Box::new(body),
                catches,
                cont: Box::new(Stm::Nil),
                span: start.to(self.prev_span()),
            }));
        }
        // Variable declaration: TE id [= Exp];
        if self.is_ident() {
            let decl = self.attempt(|p| {
                let te = p.type_expr()?;
                let name = p.ident()?;
                if p.is_punct("=") || p.is_punct(";") {
                    Ok((te, name))
                } else {
                    Err(Reported)
                }
            });
            if let Some((te, name)) = decl {
                let init = if self.eat("=") { Some(self.expr()?) } else { None };
                self.expect(";")?;
                let id = self.fresh();
                return Ok(Some(Stm::VarDecl {
                    id,
                    te,
                    name,
                    init,
                    cont: Box::new(Stm::Nil),
                    span: start.to(self.prev_span()),
                }));
            }
        }
        let lhs = self.expr()?;
        let op = [
            ("=", AsgOp::Assign),
            ("+=", AsgOp::Add),
            ("-=", AsgOp::Sub),
            ("*=", AsgOp::Mul),
            ("/=", AsgOp::Div),
            ("&=", AsgOp::And),
            ("|=", AsgOp::Or),
            ("%=", AsgOp::Rem),
        ]
        .into_iter()
        .find(|(p, _)| self.is_punct(p))
        .map(|(_, o)| o);
        if let Some(op) = op {
            self.bump();
            let rhs = self.expr()?;
            self.expect(";")?;
            return Ok(Some(Stm::Assign { lhs, op, rhs, cont: Box::new(Stm::Nil), span: start.to(self.prev_span()) }));
        }
        self.expect(";")?;
        Ok(Some(Stm::Exp { exp: lhs, cont: Box::new(Stm::Nil) }))
    }

    // ----- expressions ---------------------------------------------------

    pub fn expr(&mut self) -> PResult<Exp> {
        let head = self.binary(0)?;
        if !self.is_punct(">>") || self.half {
            return Ok(head);
        }
        let mut links = Vec::new();
        while self.is_punct(">>") && !self.half {
            self.bump();
            links.push(self.chain_link()?);
        }
        let span = head.span.to(self.prev_span());
        Ok(self.mk(span, ExpKind::Chain { head: Box::new(head), links }))
    }

    fn chain_link(&mut self) -> PResult<ChainLink> {
        let start = self.span();
        let mut recv = if self.is_kw("this") {
            let s = self.span();
            self.bump();
            self.mk(s, ExpKind::This)
        } else {
            let name = self.ident()?;
            if self.eat("@") {
                let roles = self.role_list()?;
                let args = if self.is_punct("<") { self.type_args()? } else { Vec::new() };
                if self.is_punct("::") && self.is_kw_at(1, "new") {
                    self.bump();
                    self.bump();
                    let span = name.span.to(self.prev_span());
                    let ty = NamedType { name, roles, args, span };
                    return Ok(ChainLink {
                        target: ChainTarget::Ctor { type_args: Vec::new(), ty },
                        span: start.to(self.prev_span()),
                    });
                }
                let span = name.span.to(self.prev_span());
                self.mk(span, ExpKind::TypeRef { name, roles, args })
            } else {
                let span = name.span;
                self.mk(span, ExpKind::Name(name))
            }
        };
        while self.eat(".") {
            let name = self.ident()?;
            let span = recv.span.to(name.span);
            recv = self.mk(span, ExpKind::Field { recv: Box::new(recv), name });
        }
        if !self.is_punct("::") {
            return self.error("'::' in a forward chain");
        }
        self.bump();
        let type_args = if self.is_punct("<") { self.type_args()? } else { Vec::new() };
        if self.is_kw("new") {
            return self.error("a method name (constructor references need 'Type@(..)::new')");
        }
        let name = self.ident()?;
        Ok(ChainLink {
            target: ChainTarget::Method { recv: Box::new(recv), type_args, name },
            span: start.to(self.prev_span()),
        })
    }

    fn peek_binop(&self) -> Option<BinOp> {
        let Tok::Punct(p) = self.tok() else { return None };
        if self.half {
            return None;
        }
        Some(match *p {
            "||" => BinOp::Or,
            "&&" => BinOp::And,
            "|" => BinOp::BitOr,
            "&" => BinOp::BitAnd,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            ">" => BinOp::Gt,
            "<=" => BinOp::Le,
            ">=" => BinOp::Ge,
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Exp> {
        let mut lhs = self.postfix()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(span, ExpKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Exp> {
        let mut e = self.primary()?;
        while self.is_punct(".") {
            self.bump();
            let type_args = if self.is_punct("<") { self.type_args()? } else { Vec::new() };
            let name = self.ident()?;
            if self.is_punct("(") {
                let args = self.args()?;
                let span = e.span.to(self.prev_span());
                e = self.mk(span, ExpKind::Call { recv: Some(Box::new(e)), type_args, name, args });
            } else {
                if !type_args.is_empty() {
                    return self.error("'(' after explicit type arguments");
                }
                let span = e.span.to(name.span);
                e = self.mk(span, ExpKind::Field { recv: Box::new(e), name });
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Exp>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.is_punct(")") {
            loop {
                out.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    fn literal_value(&mut self) -> PResult<Literal> {
        let neg = self.is_punct("-") && matches!(self.peek_at(1), Tok::Int(_) | Tok::Long(_) | Tok::Double(_));
        if neg {
            self.bump();
        }
        let lit = match self.tok().clone() {
            Tok::Int(i) => {
                let v = if neg { -i } else { i };
                match i32::try_from(v) {
                    Ok(v) => Literal::Int(v),
                    Err(_) => {
                        let s = self.span();
                        self.diags.push(Diagnostic::error(Code::SyntaxError, s, "Integer literal out of range."));
                        Literal::Int(0)
                    }
                }
            }
            Tok::Long(i) => Literal::Long(if neg { -i } else { i }),
            Tok::Double(d) => Literal::Double(if neg { -d } else { d }),
            Tok::Str(s) => Literal::Str(s),
            Tok::Ident(s) if s == "true" => Literal::Bool(true),
            Tok::Ident(s) if s == "false" => Literal::Bool(false),
            Tok::Ident(s) if s == "null" => Literal::Null,
            _ => return self.error("a literal"),
        };
        self.bump();
        Ok(lit)
    }

    fn is_literal_start(&self) -> bool {
        match self.tok() {
            Tok::Int(_) | Tok::Long(_) | Tok::Double(_) | Tok::Str(_) => true,
            Tok::Ident(s) => s == "true" || s == "false" || s == "null",
            Tok::Punct("-") => matches!(self.peek_at(1), Tok::Int(_) | Tok::Long(_) | Tok::Double(_)),
            _ => false,
        }
    }

    fn primary(&mut self) -> PResult<Exp> {
        let start = self.span();
        if self.is_literal_start() {
            let value = self.literal_value()?;
            let mut roles = Vec::new();
            let mut list = false;
            if self.eat("@") {
                if self.eat("[") {
                    list = true;
                    loop {
                        let id = self.ident()?;
                        roles.push(RoleRef { name: id.name, span: id.span });
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("]")?;
                } else {
                    roles = self.role_list()?;
                }
            }
            let span = start.to(self.prev_span());
            return Ok(self.mk(span, ExpKind::Lit { value, roles, list }));
        }
        if self.eat_kw("this") {
            return Ok(self.mk(start, ExpKind::This));
        }
        if self.eat_kw("new") {
            let type_args = if self.is_punct("<") { self.type_args()? } else { Vec::new() };
            let ty = self.named_type()?;
            let args = self.args()?;
            let span = start.to(self.prev_span());
            return Ok(self.mk(span, ExpKind::New { type_args, ty, args }));
        }
        if self.is_kw("super") && self.is_punct_at(1, "(") {
            let name = Ident::new("super", start);
            self.bump();
            let args = self.args()?;
            let span = start.to(self.prev_span());
            return Ok(self.mk(span, ExpKind::Call { recv: None, type_args: Vec::new(), name, args }));
        }
        if self.eat("(") {
            let mut e = self.expr()?;
            self.expect(")")?;
            e.span = start.to(self.prev_span());
            return Ok(e);
        }
        if self.is_ident() {
            let name = self.ident()?;
            if self.is_punct("(") {
                let args = self.args()?;
                let span = start.to(self.prev_span());
                return Ok(self.mk(span, ExpKind::Call { recv: None, type_args: Vec::new(), name, args }));
            }
            if self.is_punct("@") {
                self.bump();
                let roles = self.role_list()?;
                let args = self
                    .attempt(|p| {
                        if !p.is_punct("<") {
                            return Err(Reported);
                        }
                        let a = p.type_args()?;
                        if p.is_punct(".") || p.is_punct("::") {
                            Ok(a)
                        } else {
                            Err(Reported)
                        }
                    })
                    .unwrap_or_default();
                let span = start.to(self.prev_span());
                return Ok(self.mk(span, ExpKind::TypeRef { name, roles, args }));
            }
            return Ok(self.mk(start, ExpKind::Name(name)));
        }
        self.error("an expression")
    }
}

/// Parses one file without desugaring.
pub fn parse_file(
    file: FileId,
    src: &str,
    ids: &mut IdGen,
    dialect: Dialect,
    prelude: bool,
) -> (Vec<Decl>, Vec<Diagnostic>) {
    let mut p = Parser::new(file, src, ids, dialect).prelude(prelude);
    let decls = p.program();
    (decls, p.diags)
}
