//! Reference evaluator running a choreography as one sequential program.
//!
//! Every variable lives in the stores of the roles its declared type
//! mentions; a communication returns a copy of its argument, which the
//! receiving declaration then places in the receiver's store. Objects record
//! which execution roles their class's role parameters are bound to, so
//! role-permuted instantiation re-binds roles at `new`.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use crate::check::{roles_of_te, CallKind, Checked, NameRef};
use crate::runtime::builtins::{self, thrown};
use crate::runtime::{plain_view, value_items, Deadline, Host, RtError, Value, View};
use crate::syntax::*;

use super::{from_json, ExecutionReport, Invocation, Manifest, Shape, Status, STACK};

/// Store of one block: values per role, and the roles each variable was
/// declared at. Variables whose type mentions no role use the `""` store.
#[derive(Default)]
struct Scope {
    stores: BTreeMap<String, HashMap<String, Value>>,
    located: HashMap<String, Vec<String>>,
}

struct Frame {
    /// Declaration formal role to execution role.
    roles: HashMap<String, String>,
    this: Option<Value>,
    scopes: Vec<Scope>,
}

impl Frame {
    fn new(formals: &[String], binding: &[String], this: Option<Value>) -> Frame {
        let roles = formals.iter().cloned().zip(binding.iter().cloned()).collect();
        Frame { roles, this, scopes: vec![Scope::default()] }
    }

    fn map(&self, roles: impl IntoIterator<Item = String>) -> Vec<String> {
        roles.into_iter().map(|r| self.roles.get(&r).cloned().unwrap_or(r)).collect()
    }

    fn declare(&mut self, name: &str, mut roles: Vec<String>, v: Value) {
        if roles.is_empty() {
            roles.push(String::new());
        }
        let scope = self.scopes.last_mut().expect("frame has a scope");
        for r in &roles {
            scope.stores.entry(r.clone()).or_default().insert(name.to_string(), v.clone());
        }
        scope.located.insert(name.to_string(), roles);
    }

    fn get(&self, name: &str) -> Option<Value> {
        self.scopes.iter().rev().find_map(|s| {
            let role = s.located.get(name)?.first()?;
            s.stores.get(role)?.get(name).cloned()
        })
    }

    fn set(&mut self, name: &str, v: Value) -> bool {
        for s in self.scopes.iter_mut().rev() {
            if let Some(roles) = s.located.get(name) {
                for r in roles {
                    s.stores.entry(r.clone()).or_default().insert(name.to_string(), v.clone());
                }
                return true;
            }
        }
        false
    }
}

enum Flow {
    Next,
    Return(Value),
}

pub struct GlobalEval<'a> {
    program: &'a Program,
    checked: &'a Checked,
    transcripts: BTreeMap<String, Vec<String>>,
    /// Role whose console receives the next builtin print.
    print_role: Option<String>,
    deadline: Deadline,
}

fn lit(l: &Literal) -> Value {
    match l {
        Literal::Int(i) => Value::Int(*i),
        Literal::Long(i) => Value::Long(*i),
        Literal::Double(d) => Value::Double(*d),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Str(s) => Value::str(s),
        Literal::Null => Value::Null,
    }
}

fn internal(msg: impl Into<String>) -> RtError {
    RtError::Type(msg.into())
}

impl<'a> GlobalEval<'a> {
    pub fn new(program: &'a Program, checked: &'a Checked, deadline: Deadline) -> Self {
        GlobalEval { program, checked, transcripts: BTreeMap::new(), print_role: None, deadline }
    }

    fn decl(&self, class: &str) -> Option<&'a Decl> {
        let info = self.checked.table.get(class)?;
        Some(&self.program.decls[info.decl])
    }

    fn is_user(&self, class: &str) -> bool {
        self.checked.table.get(class).is_some_and(|c| !c.prelude)
    }

    /// Execution roles of `target`'s role parameters for an instance of
    /// `class` bound to `binding`, following the declared supertypes.
    fn super_binding(&self, class: &str, binding: &[String], target: &str) -> Option<Vec<String>> {
        if class == target {
            return Some(binding.to_vec());
        }
        let info = self.checked.table.get(class)?;
        let arity = self.checked.table.arity_with(&info.tparams);
        let map: HashMap<&str, &str> =
            info.roles.iter().map(String::as_str).zip(binding.iter().map(String::as_str)).collect();
        for s in &info.supers {
            let Some(head) = s.head_name() else { continue };
            let args: Vec<String> = s
                .role_args(&arity)
                .into_iter()
                .map(|r| map.get(r.as_str()).map(|x| x.to_string()).unwrap_or(r))
                .collect();
            if let Some(b) = self.super_binding(head, &args, target) {
                return Some(b);
            }
        }
        None
    }

    /// Most derived user method named `name` with `n` parameters, searching
    /// from `class` through its supertypes.
    fn find_method(&self, class: &str, name: &str, n: usize) -> Option<(String, usize)> {
        let mut queue = vec![class.to_string()];
        let mut seen = Vec::new();
        while !queue.is_empty() {
            let c = queue.remove(0);
            if seen.contains(&c) {
                continue;
            }
            seen.push(c.clone());
            let Some(info) = self.checked.table.get(&c) else { continue };
            if info.prelude {
                continue;
            }
            let decl = &self.program.decls[info.decl];
            if let Some(i) =
                decl.methods.iter().position(|m| m.name.name == name && m.params.len() == n && m.body.is_some())
            {
                return Some((c, i));
            }
            queue.extend(info.supers.iter().filter_map(|s| s.head_name().map(str::to_string)));
        }
        None
    }

    /// Fields of `class` and its user supertypes with their declaring class.
    fn all_fields(&self, class: &str) -> Vec<(String, &'a Field)> {
        let mut out = Vec::new();
        let mut stack = vec![class.to_string()];
        let mut seen = Vec::new();
        while let Some(c) = stack.pop() {
            if seen.contains(&c) {
                continue;
            }
            seen.push(c.clone());
            let Some(info) = self.checked.table.get(&c) else { continue };
            if info.prelude {
                continue;
            }
            for f in &self.program.decls[info.decl].fields {
                out.push((c.clone(), f));
            }
            stack.extend(info.supers.iter().filter_map(|s| s.head_name().map(str::to_string)));
        }
        out
    }

    pub fn instantiate(
        &mut self,
        class: &str,
        binding: Vec<String>,
        ctor: Option<usize>,
        args: Vec<Value>,
    ) -> Result<Value, RtError> {
        let fields = self.all_fields(class).into_iter().map(|(_, f)| (f.name.name.clone(), Value::Null)).collect();
        let obj = Value::object(class, binding.clone(), fields);
        self.run_ctor(class, &binding, ctor, obj.clone(), args)?;
        Ok(obj)
    }

    fn run_ctor(
        &mut self,
        class: &str,
        binding: &[String],
        ctor: Option<usize>,
        this: Value,
        args: Vec<Value>,
    ) -> Result<(), RtError> {
        let Some(i) = ctor else { return Ok(()) };
        let decl = self.decl(class).ok_or_else(|| internal(format!("unknown class {class}")))?;
        let c = &decl.ctors[i];
        let mut f = Frame::new(&decl.role_names(), binding, Some(this));
        self.bind_params(&mut f, &c.params, args)?;
        self.exec(&mut f, &c.body)?;
        Ok(())
    }

    fn bind_params(&self, f: &mut Frame, params: &[Param], args: Vec<Value>) -> Result<(), RtError> {
        if params.len() != args.len() {
            return Err(internal(format!("expected {} arguments, got {}", params.len(), args.len())));
        }
        for (p, a) in params.iter().zip(args) {
            let roles = f.map(roles_of_te(&p.te));
            f.declare(&p.name.name, roles, a);
        }
        Ok(())
    }

    pub fn invoke(
        &mut self,
        class: &str,
        index: usize,
        binding: &[String],
        this: Option<Value>,
        args: Vec<Value>,
    ) -> Result<Value, RtError> {
        if self.deadline.passed() {
            return Err(RtError::Deadline(format!("calling {class}")));
        }
        let decl = self.decl(class).ok_or_else(|| internal(format!("unknown class {class}")))?;
        let m = &decl.methods[index];
        let body = m.body.as_ref().ok_or_else(|| internal(format!("{class}.{} has no body", m.name.name)))?;
        let mut f = Frame::new(&decl.role_names(), binding, this);
        self.bind_params(&mut f, &m.params, args)?;
        match self.exec(&mut f, body)? {
            Flow::Return(v) => Ok(v),
            Flow::Next => Ok(Value::Unit),
        }
    }

    fn scoped(&mut self, f: &mut Frame, s: &Stm) -> Result<Flow, RtError> {
        f.scopes.push(Scope::default());
        let r = self.exec(f, s);
        f.scopes.pop();
        r
    }

    fn exec(&mut self, f: &mut Frame, s: &Stm) -> Result<Flow, RtError> {
        let mut cur = s;
        loop {
            match cur {
                Stm::Nil => return Ok(Flow::Next),
                Stm::Return { exp, .. } => {
                    let v = match exp {
                        Some(e) => self.exp(f, e)?,
                        None => Value::Unit,
                    };
                    return Ok(Flow::Return(v));
                }
                Stm::Exp { exp, cont } => {
                    self.exp(f, exp)?;
                    cur = cont;
                }
                Stm::VarDecl { te, name, init, cont, .. } => {
                    let v = match init {
                        Some(e) => self.exp(f, e)?,
                        None => Value::Null,
                    };
                    let roles = f.map(roles_of_te(te));
                    f.declare(&name.name, roles, v);
                    cur = cont;
                }
                Stm::Assign { lhs, op, rhs, cont, .. } => {
                    self.assign(f, lhs, *op, rhs)?;
                    cur = cont;
                }
                Stm::If { cond, then, els, cont, .. } => {
                    let branch = match self.exp(f, cond)? {
                        Value::Bool(true) => then,
                        Value::Bool(false) => els,
                        v => return Err(internal(format!("condition evaluated to {}", v.type_name()))),
                    };
                    if let Flow::Return(v) = self.scoped(f, branch)? {
                        return Ok(Flow::Return(v));
                    }
                    cur = cont;
                }
                Stm::Block { body, cont, .. } => {
                    if let Flow::Return(v) = self.scoped(f, body)? {
                        return Ok(Flow::Return(v));
                    }
                    cur = cont;
                }
                Stm::Switch { guard, cases, default, cont, .. } => {
                    let g = self.exp(f, guard)?;
                    let hit = cases.iter().find(|c| match (&c.label, &g) {
                        (SwArg::Case(id), Value::Enum { case, .. }) => id.name == **case,
                        (SwArg::Lit(l), v) => lit(l) == *v,
                        _ => false,
                    });
                    let body = hit.map(|c| &c.body).or(default.as_deref());
                    if let Some(b) = body {
                        if let Flow::Return(v) = self.scoped(f, b)? {
                            return Ok(Flow::Return(v));
                        }
                    }
                    cur = cont;
                }
                Stm::Try { body, catches, cont, .. } => {
                    match self.scoped(f, body) {
                        Ok(Flow::Return(v)) => return Ok(Flow::Return(v)),
                        Ok(Flow::Next) => {}
                        Err(RtError::Thrown { class, message }) => {
                            let handler = catches.iter().find(|k| {
                                k.te.named().is_some_and(|n| builtins::exception_matches(&class, &n.name.name))
                            });
                            let Some(k) = handler else { return Err(RtError::Thrown { class, message }) };
                            f.scopes.push(Scope::default());
                            let roles = f.map(roles_of_te(&k.te));
                            let ex =
                                Value::Exception { class: class.as_str().into(), message: message.as_str().into() };
                            f.declare(&k.name.name, roles, ex);
                            let r = self.exec(f, &k.body);
                            f.scopes.pop();
                            if let Flow::Return(v) = r? {
                                return Ok(Flow::Return(v));
                            }
                        }
                        Err(e) => return Err(e),
                    }
                    cur = cont;
                }
                Stm::Throw { exp, .. } => {
                    return Err(match self.exp(f, exp)? {
                        Value::Exception { class, message } => thrown(&class, message.to_string()),
                        v => thrown("RuntimeException", v.type_name().to_string()),
                    });
                }
            }
        }
    }

    fn assign(&mut self, f: &mut Frame, lhs: &Exp, op: AsgOp, rhs: &Exp) -> Result<(), RtError> {
        let mut v = self.exp(f, rhs)?;
        if let Some(bop) = op.binop() {
            let old = self.exp(f, lhs)?;
            v = builtins::binary(self, bop, &old, &v)?;
        }
        match &lhs.kind {
            ExpKind::Name(id) => match self.checked.ann.names.get(&lhs.id) {
                Some(NameRef::Field { .. }) => self.set_field(f.this.as_ref(), &id.name, v),
                _ => {
                    if f.set(&id.name, v.clone()) {
                        Ok(())
                    } else {
                        self.set_field(f.this.as_ref(), &id.name, v)
                    }
                }
            },
            ExpKind::Field { recv, name } => {
                let r = self.exp(f, recv)?;
                self.set_field(Some(&r), &name.name, v)
            }
            _ => Err(internal("assignment to a non-variable")),
        }
    }

    fn set_field(&self, obj: Option<&Value>, name: &str, v: Value) -> Result<(), RtError> {
        match obj {
            Some(Value::Object(o)) => {
                o.fields().insert(name.to_string(), v);
                Ok(())
            }
            _ => Err(internal(format!("no object to assign field {name}"))),
        }
    }

    fn get_field(&self, obj: Option<&Value>, name: &str) -> Result<Value, RtError> {
        match obj {
            Some(Value::Object(o)) => {
                o.fields().get(name).cloned().ok_or_else(|| internal(format!("{} has no field {name}", o.class)))
            }
            Some(Value::Class(c)) => builtins::static_field(c, name),
            Some(Value::Null) => Err(thrown("NullPointerException", format!("reading field {name} of null"))),
            _ => Err(internal(format!("no object to read field {name}"))),
        }
    }

    fn exp(&mut self, f: &mut Frame, e: &Exp) -> Result<Value, RtError> {
        let checked = self.checked;
        match &e.kind {
            ExpKind::Lit { value, .. } => Ok(lit(value)),
            ExpKind::Name(id) => match checked.ann.names.get(&e.id) {
                Some(NameRef::Field { owner, is_static: true }) => builtins::static_field(owner, &id.name),
                Some(NameRef::Field { .. }) => self.get_field(f.this.as_ref(), &id.name),
                Some(NameRef::EnumCase { enum_name }) => Ok(Value::enum_case(enum_name, &id.name)),
                _ => match f.get(&id.name) {
                    Some(v) => Ok(v),
                    None => self.get_field(f.this.as_ref(), &id.name),
                },
            },
            ExpKind::This => f.this.clone().ok_or_else(|| internal("'this' in a static context")),
            ExpKind::TypeRef { name, .. } => Ok(Value::Class(name.name.as_str().into())),
            ExpKind::Field { recv, name } => {
                if let Some(NameRef::EnumCase { enum_name }) = checked.ann.names.get(&e.id) {
                    return Ok(Value::enum_case(enum_name, &name.name));
                }
                let r = self.exp(f, recv)?;
                self.get_field(Some(&r), &name.name)
            }
            ExpKind::Binary { op, lhs, rhs } => {
                let l = self.exp(f, lhs)?;
                if matches!(op, BinOp::And | BinOp::Or) {
                    if let Value::Bool(b) = l {
                        if b == (*op == BinOp::Or) {
                            return Ok(Value::Bool(b));
                        }
                    }
                }
                let r = self.exp(f, rhs)?;
                builtins::binary(self, *op, &l, &r)
            }
            ExpKind::Call { recv, name, args, .. } => {
                let info = checked.call(e).ok_or_else(|| internal(format!("unresolved call {}", name.name)))?;
                let recv_v = match recv.as_deref() {
                    Some(Exp { kind: ExpKind::TypeRef { name, .. }, .. }) => {
                        Some(Value::Class(name.name.as_str().into()))
                    }
                    Some(r) => Some(self.exp(f, r)?),
                    None if !info.is_static => f.this.clone(),
                    None => None,
                };
                let mut argv = Vec::with_capacity(args.len());
                for a in args {
                    argv.push(self.exp(f, a)?);
                }
                let binding = f.map(info.roles.iter().cloned());
                match info.kind {
                    CallKind::Super => {
                        let this = f.this.clone().ok_or_else(|| internal("super call without an object"))?;
                        if self.is_user(&info.owner) {
                            self.run_ctor(&info.owner, &binding, info.index, this, argv)?;
                        }
                        Ok(Value::Unit)
                    }
                    CallKind::Ctor => Err(internal("constructor used as a call")),
                    CallKind::Method if info.is_static => {
                        if self.is_user(&info.owner) {
                            let idx = info.index.ok_or_else(|| internal("static call without a target"))?;
                            self.invoke(&info.owner, idx, &binding, None, argv)
                        } else {
                            self.print_role = binding.first().cloned();
                            builtins::call_static(self, &info.owner, &name.name, &argv)
                        }
                    }
                    CallKind::Method => {
                        let r = recv_v.ok_or_else(|| internal("instance call without a receiver"))?;
                        if let Value::Object(o) = &r {
                            if let Some((class, idx)) = self.find_method(&o.class, &name.name, argv.len()) {
                                let b = self
                                    .super_binding(&o.class, &o.roles, &class)
                                    .ok_or_else(|| internal(format!("{} does not extend {class}", o.class)))?;
                                return self.invoke(&class, idx, &b, Some(r.clone()), argv);
                            }
                        }
                        if matches!(r, Value::GlobalChannel) && name.name == "com" && argv.len() == 1 {
                            let at = |t: &crate::syntax::Type| {
                                let rs: Vec<String> = checked.roles_of_type(&[], t).into_iter().collect();
                                f.map(rs)
                            };
                            if let (Some(p), [to]) = (info.params.first(), at(&info.ret).as_slice()) {
                                if let [from] = at(p).as_slice() {
                                    return Ok(relocate(&argv[0], from, to));
                                }
                            }
                        }
                        self.print_role = binding.first().cloned();
                        builtins::call_method(self, &r, &name.name, &argv)
                    }
                }
            }
            ExpKind::New { ty, args, .. } => {
                let info = checked.call(e).ok_or_else(|| internal(format!("unresolved new {}", ty.name.name)))?;
                let mut argv = Vec::with_capacity(args.len());
                for a in args {
                    argv.push(self.exp(f, a)?);
                }
                if self.is_user(&info.owner) {
                    let binding = f.map(info.roles.iter().cloned());
                    self.instantiate(&info.owner, binding, info.index, argv)
                } else {
                    builtins::construct(&info.owner, &argv)
                }
            }
            ExpKind::Chain { .. } => Err(internal("forward chain survived desugaring")),
        }
    }

    /// What role `role` observes of `v`: objects keep the fields located at
    /// that role.
    pub fn view_at(&self, v: &Value, role: &str) -> View {
        match v {
            Value::Object(o) if self.is_user(&o.class) => {
                let mut fields = BTreeMap::new();
                for (owner, fd) in self.all_fields(&o.class) {
                    let Some(b) = self.super_binding(&o.class, &o.roles, &owner) else { continue };
                    let formals = self.checked.table.get(&owner).map(|c| c.roles.clone()).unwrap_or_default();
                    let map: HashMap<&String, &String> = formals.iter().zip(b.iter()).collect();
                    let located = roles_of_te(&fd.te).iter().any(|r| map.get(r).map(|x| x.as_str()) == Some(role));
                    if located {
                        let fv = o.fields().get(&fd.name.name).cloned().unwrap_or(Value::Null);
                        fields.insert(fd.name.name.clone(), self.view_at(&fv, role));
                    }
                }
                View::Object { class: o.class.clone(), fields }
            }
            Value::List(l) => View::List(value_items(l).iter().map(|x| self.view_at(x, role)).collect()),
            Value::Optional(x) => View::Optional(x.as_ref().map(|x| Box::new(self.view_at(x, role)))),
            other => plain_view(other, &|c| c.to_string()),
        }
    }

    fn args_for(
        &self,
        params: &[Param],
        inv: &Invocation,
        cursor: &mut HashMap<String, usize>,
    ) -> Result<Vec<Value>, RtError> {
        let mut out = Vec::new();
        for p in params {
            let roles: Vec<String> = roles_of_te(&p.te).into_iter().collect();
            if let Some(_key) = inv.channels.get(&p.name.name) {
                out.push(Value::GlobalChannel);
            } else if roles.len() == 1 {
                let r = &roles[0];
                let i = cursor.entry(r.clone()).or_insert(0);
                let lit = inv
                    .args
                    .get(r)
                    .and_then(|a| a.get(*i))
                    .ok_or_else(|| internal(format!("manifest has no argument for '{}' at {r}", p.name.name)))?;
                *i += 1;
                out.push(from_json(lit, &Shape::of_te(&p.te)).map_err(internal)?);
            } else {
                return Err(internal(format!("manifest cannot supply parameter '{}'", p.name.name)));
            }
        }
        Ok(out)
    }

    /// Runs the manifest's entry and returns the result with the declared
    /// return type.
    fn run_entry(&mut self, m: &Manifest) -> Result<(Value, &'a TypeExpr), RtError> {
        let class = &m.entry.class;
        let decl = self.decl(class).ok_or_else(|| internal(format!("unknown entry class {class}")))?;
        let binding = decl.role_names();
        let this = match &m.constructor {
            Some(inv) => {
                let (idx, params) = match decl.ctors.first() {
                    Some(c) => (Some(0), c.params.as_slice()),
                    None => (None, &[][..]),
                };
                let args = self.args_for(params, inv, &mut HashMap::new())?;
                Some(self.instantiate(class, binding.clone(), idx, args)?)
            }
            None => None,
        };
        let (idx, method) = decl
            .methods
            .iter()
            .enumerate()
            .filter(|(_, x)| x.name.name == m.entry.method && x.body.is_some())
            .max_by_key(|(_, x)| x.params.len())
            .ok_or_else(|| internal(format!("{class} has no method {}", m.entry.method)))?;
        if !method.is_static() && this.is_none() {
            return Err(internal(format!("{class}.{} needs a constructor entry in the manifest", m.entry.method)));
        }
        let args = self.args_for(&method.params, &m.method, &mut HashMap::new())?;
        let this = if method.is_static() { None } else { this };
        let v = self.invoke(class, idx, &binding, this, args)?;
        Ok((v, &method.ret))
    }
}

impl Host for GlobalEval<'_> {
    fn user_method(&mut self, recv: &Value, name: &str, args: &[Value]) -> Option<Result<Value, RtError>> {
        let Value::Object(o) = recv else { return None };
        let (class, idx) = self.find_method(&o.class, name, args.len())?;
        let saved = self.print_role.clone();
        let r = match self.super_binding(&o.class, &o.roles, &class) {
            Some(b) => self.invoke(&class, idx, &b, Some(recv.clone()), args.to_vec()),
            None => Err(internal(format!("{} does not extend {class}", o.class))),
        };
        self.print_role = saved;
        Some(r)
    }

    fn print(&mut self, text: String) {
        let role = self.print_role.clone().unwrap_or_default();
        self.transcripts.entry(role).or_default().push(text);
    }

    fn local_channel(&mut self, _key: &str) -> Result<Value, RtError> {
        Ok(Value::GlobalChannel)
    }

    fn deadline(&self) -> Deadline {
        self.deadline
    }

    fn ordinal(&self, ty: &str, case: &str) -> Option<i32> {
        let c = self.checked.table.get(ty)?;
        c.cases.iter().position(|x| x == case).map(|i| i as i32)
    }
}

/// Copy of `v` moved from role `from` to role `to`: objects located at
/// `from` are rebound to `to`.
fn relocate(v: &Value, from: &str, to: &str) -> Value {
    match v {
        Value::Object(o) => {
            let roles = o.roles.iter().map(|r| if r == from { to.to_string() } else { r.clone() }).collect();
            let fields = o.fields().iter().map(|(k, x)| (k.clone(), relocate(x, from, to))).collect();
            Value::object(&o.class, roles, fields)
        }
        Value::List(l) => Value::list(value_items(l).iter().map(|x| relocate(x, from, to)).collect()),
        Value::Optional(o) => Value::Optional(o.as_ref().map(|x| Box::new(relocate(x, from, to)))),
        other => other.deep_copy(),
    }
}

/// Runs the entry of `manifest` on the choreography.
pub fn eval_global(program: &Program, checked: &Checked, manifest: &Manifest, deadline: Duration) -> ExecutionReport {
    let start = Instant::now();
    let outcome = std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("global".into())
            .stack_size(STACK)
            .spawn_scoped(s, || {
                let mut g = GlobalEval::new(program, checked, Deadline::after(deadline));
                let r = g.run_entry(manifest);
                let returns = match &r {
                    Ok((v, ret)) => manifest
                        .roles
                        .iter()
                        .map(|role| {
                            let here = roles_of_te(ret).contains(role);
                            let view = if here { g.view_at(v, role) } else { View::Unit };
                            (role.clone(), view)
                        })
                        .collect(),
                    Err(_) => BTreeMap::new(),
                };
                (r.map(|_| ()), returns, std::mem::take(&mut g.transcripts))
            })
            .expect("spawn evaluator thread")
            .join()
    });
    let duration_ms = start.elapsed().as_secs_f64() * 1e3;
    let (status, returns, mut transcripts) = match outcome {
        Ok((Ok(()), returns, t)) => (Status::Ok, returns, t),
        Ok((Err(RtError::Deadline(_)), _, t)) => {
            (Status::DeadlockTimeout { blocked: manifest.roles.clone() }, BTreeMap::new(), t)
        }
        Ok((Err(e), _, t)) => (Status::Error { role: None, message: e.to_string() }, BTreeMap::new(), t),
        Err(_) => {
            (Status::Error { role: None, message: "evaluator panicked".into() }, BTreeMap::new(), BTreeMap::new())
        }
    };
    for r in &manifest.roles {
        transcripts.entry(r.clone()).or_default();
    }
    ExecutionReport { returns, transcripts, duration_ms, status }
}
