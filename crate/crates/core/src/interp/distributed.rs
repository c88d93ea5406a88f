//! Evaluator for projected units: one worker thread per role, sharing only
//! the channel registry.
//!
//! Local calls are resolved at run time by name and arity; among overloads
//! of equal arity the one whose `Unit` parameters line up with `Unit`
//! arguments wins. Parameters and returns declared `Unit` are coerced to the
//! unit value, since normalisation may leave an effectful expression where
//! the projection expects `Unit`.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use crate::runtime::builtins::{self, is_builtin_class, thrown};
use crate::runtime::{plain_view, Deadline, Endpoint, Host, Registry, RtError, Value, View};
use crate::syntax::*;

use super::{from_json, ExecutionReport, Invocation, Manifest, Shape, Status, STACK};

enum Flow {
    Next,
    Return(Value),
}

struct Frame {
    this: Option<Value>,
    /// Unit whose code is running; unqualified static calls resolve here.
    class: String,
    scopes: Vec<HashMap<String, Value>>,
}

impl Frame {
    fn get(&self, name: &str) -> Option<Value> {
        self.scopes.iter().rev().find_map(|s| s.get(name).cloned())
    }

    fn set(&mut self, name: &str, v: Value) -> bool {
        for s in self.scopes.iter_mut().rev() {
            if let Some(slot) = s.get_mut(name) {
                *slot = v;
                return true;
            }
        }
        false
    }

    fn declare(&mut self, name: &str, v: Value) {
        self.scopes.last_mut().expect("frame has a scope").insert(name.to_string(), v);
    }
}

fn internal(msg: impl Into<String>) -> RtError {
    RtError::Type(msg.into())
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

/// How well `params` fit `args`: number of positions where a `Unit`
/// parameter meets a unit value or a non-`Unit` one meets data.
fn fit(params: &[LocalParam], args: &[Value]) -> usize {
    params.iter().zip(args).filter(|(p, a)| p.te.is_unit() == a.is_unit()).count()
}

/// Interpreter state of one role.
pub struct Worker<'a> {
    units: HashMap<&'a str, &'a LocalDecl>,
    role: String,
    registry: &'a Registry,
    deadline: Deadline,
    pub transcript: Vec<String>,
    claimed: Vec<Endpoint>,
}

impl<'a> Worker<'a> {
    pub fn new(program: &'a LocalProgram, role: &str, registry: &'a Registry, deadline: Deadline) -> Self {
        Worker {
            units: program.units.iter().map(|u| (u.name.as_str(), u)).collect(),
            role: role.to_string(),
            registry,
            deadline,
            transcript: Vec::new(),
            claimed: Vec::new(),
        }
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    fn unit(&self, name: &str) -> Option<&'a LocalDecl> {
        self.units.get(name).copied()
    }

    /// Closes every endpoint this worker obtained so peers stop waiting.
    pub fn finish(&mut self) {
        for ep in self.claimed.drain(..) {
            ep.close();
        }
    }

    pub fn endpoint(&mut self, key: &str) -> Result<Value, RtError> {
        let ep = self.registry.endpoint(key, &self.role)?;
        self.claimed.push(ep.clone());
        Ok(Value::Channel(ep))
    }

    /// Supertypes of a unit: the extended class first, then interfaces.
    fn supers(&self, u: &LocalDecl) -> Vec<&'a LocalDecl> {
        u.extends.iter().chain(&u.implements).filter_map(|t| self.unit(t.name())).collect()
    }

    fn find_method(&self, class: &str, name: &str, args: &[Value]) -> Option<(&'a LocalDecl, &'a LocalMethod)> {
        let mut queue: Vec<&'a LocalDecl> = self.unit(class).into_iter().collect();
        let mut seen: Vec<&str> = Vec::new();
        while !queue.is_empty() {
            let u = queue.remove(0);
            if seen.contains(&u.name.as_str()) {
                continue;
            }
            seen.push(&u.name);
            let best = u
                .methods
                .iter()
                .filter(|m| m.name == name && m.params.len() == args.len() && m.body.is_some())
                .max_by_key(|m| fit(&m.params, args));
            if let Some(m) = best {
                return Some((u, m));
            }
            queue.extend(self.supers(u));
        }
        None
    }

    fn all_fields(&self, class: &str) -> Vec<&'a LocalField> {
        let mut out = Vec::new();
        let mut cur = self.unit(class);
        let mut guard = 0;
        while let Some(u) = cur {
            out.extend(u.fields.iter());
            cur = u.extends.first().and_then(|t| self.unit(t.name()));
            guard += 1;
            if guard > 64 {
                break;
            }
        }
        out
    }

    pub fn invoke(
        &mut self,
        unit: &'a LocalDecl,
        m: &'a LocalMethod,
        this: Option<Value>,
        args: Vec<Value>,
    ) -> Result<Value, RtError> {
        if self.deadline.passed() {
            return Err(RtError::Deadline(format!("calling {}.{}", unit.name, m.name)));
        }
        let body = m.body.as_ref().ok_or_else(|| internal(format!("{}.{} has no body", unit.name, m.name)))?;
        let mut f = Frame {
            this: if m.is_static() { None } else { this },
            class: unit.name.clone(),
            scopes: vec![HashMap::new()],
        };
        bind(&mut f, &m.params, args)?;
        let v = match self.exec(&mut f, body)? {
            Flow::Return(v) => v,
            Flow::Next => Value::Unit,
        };
        Ok(if m.ret.is_unit() { Value::Unit } else { v })
    }

    pub fn instantiate(&mut self, class: &str, args: Vec<Value>) -> Result<Value, RtError> {
        let unit = self.unit(class).ok_or_else(|| internal(format!("unknown unit {class}")))?;
        let fields = self.all_fields(class).into_iter().map(|f| (f.name.clone(), Value::Null)).collect();
        let obj = Value::object(&unit.name, Vec::new(), fields);
        self.run_ctor(unit, obj.clone(), args)?;
        Ok(obj)
    }

    fn run_ctor(&mut self, unit: &'a LocalDecl, this: Value, args: Vec<Value>) -> Result<(), RtError> {
        let ctor = unit.ctors.iter().filter(|c| c.params.len() == args.len()).max_by_key(|c| fit(&c.params, &args));
        let Some(c) = ctor else {
            if args.is_empty() {
                return Ok(());
            }
            return Err(internal(format!("{} has no constructor taking {} arguments", unit.name, args.len())));
        };
        let mut f = Frame { this: Some(this), class: unit.name.clone(), scopes: vec![HashMap::new()] };
        bind(&mut f, &c.params, args)?;
        self.exec(&mut f, &c.body)?;
        Ok(())
    }

    fn scoped(&mut self, f: &mut Frame, s: &'a LocalStm) -> Result<Flow, RtError> {
        f.scopes.push(HashMap::new());
        let r = self.exec(f, s);
        f.scopes.pop();
        r
    }

    fn exec(&mut self, f: &mut Frame, s: &'a LocalStm) -> Result<Flow, RtError> {
        let mut cur = s;
        loop {
            match cur {
                LocalStm::Nil => return Ok(Flow::Next),
                LocalStm::Return(e) => {
                    let v = match e {
                        Some(e) => self.exp(f, e)?,
                        None => Value::Unit,
                    };
                    return Ok(Flow::Return(v));
                }
                LocalStm::Exp(e, c) => {
                    self.exp(f, e)?;
                    cur = c;
                }
                LocalStm::VarDecl(te, name, init, c) => {
                    let v = match init {
                        Some(e) => self.exp(f, e)?,
                        None => Value::Null,
                    };
                    f.declare(name, if te.is_unit() { Value::Unit } else { v });
                    cur = c;
                }
                LocalStm::Assign(lhs, op, rhs, c) => {
                    self.assign(f, lhs, *op, rhs)?;
                    cur = c;
                }
                LocalStm::If(g, t, e, c) => {
                    let branch = match self.exp(f, g)? {
                        Value::Bool(true) => t,
                        Value::Bool(false) => e,
                        v => return Err(internal(format!("condition evaluated to {}", v.type_name()))),
                    };
                    if let Flow::Return(v) = self.scoped(f, branch)? {
                        return Ok(Flow::Return(v));
                    }
                    cur = c;
                }
                LocalStm::Block(b, c) => {
                    if let Flow::Return(v) = self.scoped(f, b)? {
                        return Ok(Flow::Return(v));
                    }
                    cur = c;
                }
                LocalStm::Switch { guard, cases, default, cont } => {
                    let g = self.exp(f, guard)?;
                    let hit = cases.iter().find(|(l, _)| match (l, &g) {
                        (LocalSwArg::Case(c), Value::Enum { case, .. }) => c == &**case,
                        (LocalSwArg::Lit(l), v) => lit(l) == *v,
                        _ => false,
                    });
                    let flow = match (hit, default) {
                        (Some((_, body)), _) => self.scoped(f, body)?,
                        (None, Some(LocalDefault::Body(b))) => self.scoped(f, b)?,
                        (None, Some(LocalDefault::Throw(msg))) => return Err(thrown("RuntimeException", msg.clone())),
                        (None, None) => Flow::Next,
                    };
                    if let Flow::Return(v) = flow {
                        return Ok(Flow::Return(v));
                    }
                    cur = cont;
                }
                LocalStm::Try(body, catches, c) => {
                    match self.scoped(f, body) {
                        Ok(Flow::Return(v)) => return Ok(Flow::Return(v)),
                        Ok(Flow::Next) => {}
                        Err(RtError::Thrown { class, message }) => {
                            let Some(k) = catches.iter().find(|k| builtins::exception_matches(&class, k.te.name()))
                            else {
                                return Err(RtError::Thrown { class, message });
                            };
                            f.scopes.push(HashMap::new());
                            f.declare(
                                &k.name,
                                Value::Exception { class: class.as_str().into(), message: message.as_str().into() },
                            );
                            let r = self.exec(f, &k.body);
                            f.scopes.pop();
                            if let Flow::Return(v) = r? {
                                return Ok(Flow::Return(v));
                            }
                        }
                        Err(e) => return Err(e),
                    }
                    cur = c;
                }
            }
        }
    }

    fn assign(&mut self, f: &mut Frame, lhs: &'a LocalExp, op: AsgOp, rhs: &'a LocalExp) -> Result<(), RtError> {
        let mut v = self.exp(f, rhs)?;
        if let Some(bop) = op.binop() {
            let old = self.exp(f, lhs)?;
            v = builtins::binary(self, bop, &old, &v)?;
        }
        match lhs {
            LocalExp::Name(n) => {
                if f.set(n, v.clone()) {
                    return Ok(());
                }
                match &f.this {
                    Some(Value::Object(o)) if o.fields().contains_key(n) => {
                        o.fields().insert(n.clone(), v);
                        Ok(())
                    }
                    _ => Err(internal(format!("assignment to unknown name {n}"))),
                }
            }
            LocalExp::Field(recv, name) => match self.exp(f, recv)? {
                Value::Object(o) => {
                    o.fields().insert(name.clone(), v);
                    Ok(())
                }
                other => Err(internal(format!("cannot assign field {name} of {}", other.type_name()))),
            },
            _ => Err(internal("assignment to a non-variable")),
        }
    }

    fn is_class(&self, name: &str) -> bool {
        self.unit(name).is_some() || is_builtin_class(name)
    }

    /// Value of a bare name: a variable, a field of `this`, or a class.
    fn name(&self, f: &Frame, n: &str) -> Result<Value, RtError> {
        if let Some(v) = f.get(n) {
            return Ok(v);
        }
        if let Some(Value::Object(o)) = &f.this {
            if let Some(v) = o.fields().get(n) {
                return Ok(v.clone());
            }
        }
        if self.is_class(n) {
            return Ok(Value::Class(n.into()));
        }
        Err(internal(format!("unknown name {n}")))
    }

    /// A name that denotes a class rather than a variable or field.
    fn class_ref(&self, f: &Frame, e: &LocalExp) -> Option<String> {
        match e {
            LocalExp::Name(n) if f.get(n).is_none() && self.is_class(n) => {
                let is_field = matches!(&f.this, Some(Value::Object(o)) if o.fields().contains_key(n));
                (!is_field).then(|| n.clone())
            }
            _ => None,
        }
    }

    fn exp(&mut self, f: &mut Frame, e: &'a LocalExp) -> Result<Value, RtError> {
        match e {
            LocalExp::Unit => Ok(Value::Unit),
            LocalExp::UnitCall(args) => {
                for a in args {
                    self.exp(f, a)?;
                }
                Ok(Value::Unit)
            }
            LocalExp::Lit(l) => Ok(lit(l)),
            LocalExp::Name(n) => self.name(f, n),
            LocalExp::This => f.this.clone().ok_or_else(|| internal("'this' in a static context")),
            LocalExp::Field(recv, name) => {
                if let Some(c) = self.class_ref(f, recv) {
                    if let Some(u) = self.unit(&c) {
                        if u.cases.iter().any(|x| x == name) {
                            return Ok(Value::enum_case(&c, name));
                        }
                    }
                    return builtins::static_field(&c, name);
                }
                match self.exp(f, recv)? {
                    Value::Object(o) => o
                        .fields()
                        .get(name)
                        .cloned()
                        .ok_or_else(|| internal(format!("{} has no field {name}", o.class))),
                    Value::Class(c) => builtins::static_field(&c, name),
                    Value::Null => Err(thrown("NullPointerException", format!("reading field {name} of null"))),
                    other => Err(internal(format!("{} has no field {name}", other.type_name()))),
                }
            }
            LocalExp::Binary(op, l, r) => {
                let lv = self.exp(f, l)?;
                if matches!(op, BinOp::And | BinOp::Or) {
                    if let Value::Bool(b) = lv {
                        if b == (*op == BinOp::Or) {
                            return Ok(Value::Bool(b));
                        }
                    }
                }
                let rv = self.exp(f, r)?;
                builtins::binary(self, *op, &lv, &rv)
            }
            LocalExp::Call { recv, name, args, .. } => self.call(f, recv.as_deref(), name, args),
            LocalExp::New { te, args, .. } => {
                let mut argv = Vec::with_capacity(args.len());
                for a in args {
                    argv.push(self.exp(f, a)?);
                }
                if self.unit(te.name()).is_some() {
                    self.instantiate(te.name(), argv)
                } else {
                    builtins::construct(te.name(), &argv)
                }
            }
        }
    }

    fn call(
        &mut self,
        f: &mut Frame,
        recv: Option<&'a LocalExp>,
        name: &str,
        args: &'a [LocalExp],
    ) -> Result<Value, RtError> {
        let static_class = recv.and_then(|r| self.class_ref(f, r));
        let recv_v = match (recv, &static_class) {
            (Some(_), Some(c)) => Value::Class(c.as_str().into()),
            (Some(r), None) => self.exp(f, r)?,
            (None, _) => f.this.clone().unwrap_or(Value::Unit),
        };
        let mut argv = Vec::with_capacity(args.len());
        for a in args {
            argv.push(self.exp(f, a)?);
        }
        if recv.is_none() {
            if name == "super" {
                let this = f.this.clone().ok_or_else(|| internal("super call without an object"))?;
                let unit = self.unit(&f.class).ok_or_else(|| internal(format!("unknown unit {}", f.class)))?;
                return match unit.extends.first().and_then(|t| self.unit(t.name())) {
                    Some(parent) => self.run_ctor(parent, this, argv).map(|_| Value::Unit),
                    None => Ok(Value::Unit),
                };
            }
            let start = match &f.this {
                Some(Value::Object(o)) => o.class.clone(),
                _ => f.class.clone(),
            };
            let found = self.find_method(&start, name, &argv).or_else(|| self.find_method(&f.class, name, &argv));
            let (u, m) = found.ok_or_else(|| internal(format!("{} has no method {name}/{}", f.class, argv.len())))?;
            return self.invoke(u, m, f.this.clone(), argv);
        }
        match &recv_v {
            Value::Class(c) if self.unit(c).is_some() => {
                let (u, m) = self
                    .find_method(c, name, &argv)
                    .ok_or_else(|| internal(format!("{c} has no method {name}/{}", argv.len())))?;
                self.invoke(u, m, None, argv)
            }
            Value::Class(c) => builtins::call_static(self, c, name, &argv),
            _ => builtins::call_method(self, &recv_v, name, &argv),
        }
    }

    fn args_for(&mut self, params: &[LocalParam], inv: &Invocation) -> Result<Vec<Value>, RtError> {
        let mut out = Vec::new();
        let mut next = 0usize;
        for p in params {
            if p.te.is_unit() {
                out.push(Value::Unit);
            } else if let Some(key) = inv.channels.get(&p.name) {
                out.push(self.endpoint(key)?);
            } else {
                let lit =
                    inv.args.get(&self.role).and_then(|a| a.get(next)).ok_or_else(|| {
                        internal(format!("manifest has no argument for '{}' at {}", p.name, self.role))
                    })?;
                next += 1;
                out.push(from_json(lit, &Shape::of_local(&p.te)).map_err(internal)?);
            }
        }
        Ok(out)
    }

    /// Runs this role's part of the manifest's entry.
    pub fn run_manifest(&mut self, program: &'a LocalProgram, m: &Manifest) -> Result<Value, RtError> {
        let unit = program
            .unit_for(&m.entry.class, &self.role)
            .or_else(|| program.unit(&m.entry.class))
            .ok_or_else(|| internal(format!("no unit of {} for role {}", m.entry.class, self.role)))?;
        let this = match &m.constructor {
            Some(inv) => {
                let params = unit.ctors.first().map(|c| c.params.as_slice()).unwrap_or(&[]);
                let args = self.args_for(params, inv)?;
                Some(self.instantiate(&unit.name, args)?)
            }
            None => None,
        };
        let method = unit
            .methods
            .iter()
            .filter(|x| x.name == m.entry.method && x.body.is_some())
            .max_by_key(|x| x.params.len())
            .ok_or_else(|| internal(format!("{} has no method {}", unit.name, m.entry.method)))?;
        let args = self.args_for(&method.params, &m.method)?;
        self.invoke(unit, method, this, args)
    }

    /// Runs a static, parameterless method of `unit`.
    pub fn run_static(&mut self, unit: &'a LocalDecl, method: &str) -> Result<Value, RtError> {
        let m = unit
            .methods
            .iter()
            .find(|m| m.name == method && m.params.is_empty())
            .ok_or_else(|| internal(format!("{} has no method {method}()", unit.name)))?;
        self.invoke(unit, m, None, Vec::new())
    }
}

fn bind(f: &mut Frame, params: &[LocalParam], args: Vec<Value>) -> Result<(), RtError> {
    if params.len() != args.len() {
        return Err(internal(format!("expected {} arguments, got {}", params.len(), args.len())));
    }
    for (p, a) in params.iter().zip(args) {
        f.declare(&p.name, if p.te.is_unit() { Value::Unit } else { a });
    }
    Ok(())
}

impl Host for Worker<'_> {
    fn user_method(&mut self, recv: &Value, name: &str, args: &[Value]) -> Option<Result<Value, RtError>> {
        let Value::Object(o) = recv else { return None };
        let (u, m) = self.find_method(&o.class, name, args)?;
        Some(self.invoke(u, m, Some(recv.clone()), args.to_vec()))
    }

    fn print(&mut self, text: String) {
        self.transcript.push(text);
    }

    fn local_channel(&mut self, key: &str) -> Result<Value, RtError> {
        self.endpoint(key)
    }

    fn deadline(&self) -> Deadline {
        self.deadline
    }

    fn ordinal(&self, ty: &str, case: &str) -> Option<i32> {
        self.unit(ty)?.cases.iter().position(|c| c == case).map(|i| i as i32)
    }
}

/// Result of one role's worker.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub role: String,
    pub result: Result<View, RtError>,
    pub transcript: Vec<String>,
}

/// Source name of the declaration a unit was projected from.
pub fn source_name(program: &LocalProgram, unit: &str) -> String {
    program.unit(unit).and_then(|u| u.meta.as_ref()).map(|m| m.source.clone()).unwrap_or_else(|| unit.to_string())
}

/// Runs `job` for every role on its own thread and joins them all.
pub fn run_roles<F>(
    program: &LocalProgram,
    roles: &[String],
    registry: &Registry,
    deadline: Duration,
    job: F,
) -> Vec<Outcome>
where
    F: for<'w> Fn(&mut Worker<'w>, &'w LocalProgram) -> Result<Value, RtError> + Sync,
{
    let deadline = Deadline::after(deadline);
    let class_name = |c: &str| source_name(program, c);
    std::thread::scope(|s| {
        let handles: Vec<_> = roles
            .iter()
            .map(|role| {
                let job = &job;
                let class_name = &class_name;
                let h = std::thread::Builder::new()
                    .name(format!("role-{role}"))
                    .stack_size(STACK)
                    .spawn_scoped(s, move || {
                        let mut w = Worker::new(program, role, registry, deadline);
                        let r = job(&mut w, program);
                        w.finish();
                        let result = r.map(|v| plain_view(&v, class_name));
                        Outcome { role: role.clone(), result, transcript: std::mem::take(&mut w.transcript) }
                    })
                    .expect("spawn worker thread");
                (role.clone(), h)
            })
            .collect();
        handles
            .into_iter()
            .map(|(role, h)| {
                h.join().unwrap_or_else(|_| Outcome {
                    role,
                    result: Err(internal("worker panicked")),
                    transcript: Vec::new(),
                })
            })
            .collect()
    })
}

/// Overall status of a set of worker outcomes: a deadline anywhere is a
/// deadlock-timeout; otherwise the first failure that is not a consequence
/// of another worker's failure.
pub fn status_of(outcomes: &[Outcome]) -> Status {
    let blocked: Vec<String> =
        outcomes.iter().filter(|o| matches!(o.result, Err(RtError::Deadline(_)))).map(|o| o.role.clone()).collect();
    let failures: Vec<(&String, &RtError)> =
        outcomes.iter().filter_map(|o| o.result.as_ref().err().map(|e| (&o.role, e))).collect();
    let primary = failures.iter().find(|(_, e)| !e.is_secondary());
    match primary {
        Some((role, e)) => Status::Error { role: Some((*role).clone()), message: e.to_string() },
        None if !blocked.is_empty() => Status::DeadlockTimeout { blocked },
        None => match failures.first() {
            Some((role, e)) => Status::Error { role: Some((*role).clone()), message: e.to_string() },
            None => Status::Ok,
        },
    }
}

/// Runs the manifest's entry on the projected units, one worker per role.
pub fn eval_distributed(
    units: &LocalProgram,
    manifest: &Manifest,
    registry: &Registry,
    deadline: Duration,
) -> ExecutionReport {
    let start = Instant::now();
    let outcomes = run_roles(units, &manifest.roles, registry, deadline, |w, p| w.run_manifest(p, manifest));
    let duration_ms = start.elapsed().as_secs_f64() * 1e3;
    let status = status_of(&outcomes);
    let mut returns = BTreeMap::new();
    let mut transcripts = BTreeMap::new();
    for o in outcomes {
        if let Ok(v) = o.result {
            returns.insert(o.role.clone(), v);
        }
        transcripts.insert(o.role, o.transcript);
    }
    if status != Status::Ok {
        returns.clear();
    }
    ExecutionReport { returns, transcripts, duration_ms, status }
}
