//! Host implementations of the prelude's single-role types.
//!
//! Both evaluators route every member of a prelude class through here; calls
//! that land on user objects go back to the evaluator through [`Host`].

use std::sync::{Arc, Mutex};

use super::channel::Deadline;
use super::value::lock;
use super::{RtError, Value};
use crate::syntax::BinOp;

/// Services an evaluator offers to builtins.
pub trait Host {
    /// Runs `name` as declared by the user class of `recv`; `None` when the
    /// receiver is not a user object or its class has no such method.
    fn user_method(&mut self, recv: &Value, name: &str, args: &[Value]) -> Option<Result<Value, RtError>>;
    fn print(&mut self, text: String);
    /// Endpoint of the calling role on the shared channel `key`.
    fn local_channel(&mut self, key: &str) -> Result<Value, RtError>;
    fn deadline(&self) -> Deadline;
    /// Position of `case` among the cases of enum `ty`.
    fn ordinal(&self, ty: &str, case: &str) -> Option<i32>;
}

const CLASSES: &[&str] = &[
    "Unit",
    "Object",
    "Boolean",
    "Char",
    "Number",
    "Integer",
    "Long",
    "Double",
    "String",
    "Enum",
    "Exception",
    "RuntimeException",
    "Math",
    "PrintStream",
    "System",
    "Optional",
    "Iterator",
    "List",
    "ArrayList",
    "Consumer",
    "Function",
    "Supplier",
    "Assert",
    "TestUtils",
    "DiDataChannel",
    "DiSelectChannel",
    "BiDataChannel",
    "SymDataChannel",
    "SymSelectChannel",
    "DiChannel",
    "BiChannel",
    "SymChannel",
];

/// Strips a projection suffix such as `_A` from a prelude class name.
pub fn base_class(name: &str) -> &str {
    if CLASSES.contains(&name) {
        return name;
    }
    match name.rsplit_once('_') {
        Some((base, _)) if CLASSES.contains(&base) => base,
        _ => name,
    }
}

pub fn is_builtin_class(name: &str) -> bool {
    CLASSES.contains(&base_class(name))
}

pub fn thrown(class: &str, message: impl Into<String>) -> RtError {
    RtError::Thrown { class: class.to_string(), message: message.into() }
}

/// Whether an exception of class `class` is caught by a handler for `of`.
pub fn exception_matches(class: &str, of: &str) -> bool {
    class == of || of == "Object" || (of == "Exception" && class.ends_with("Exception"))
}

fn arity(name: &str, args: &[Value], n: usize) -> Result<(), RtError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(RtError::Type(format!("{name} expects {n} argument(s), got {}", args.len())))
    }
}

fn unknown(recv: &str, name: &str) -> RtError {
    RtError::Type(format!("unknown builtin member {recv}.{name}"))
}

#[derive(Debug, Clone, Copy)]
enum Num {
    I(i32),
    L(i64),
    D(f64),
}

fn num(v: &Value) -> Option<Num> {
    match v {
        Value::Int(i) => Some(Num::I(*i)),
        Value::Long(l) => Some(Num::L(*l)),
        Value::Double(d) => Some(Num::D(*d)),
        _ => None,
    }
}

fn expect_num(v: &Value, what: &str) -> Result<Num, RtError> {
    num(v).ok_or_else(|| RtError::Type(format!("{what} expects a number, found {}", v.type_name())))
}

fn as_f64(n: Num) -> f64 {
    match n {
        Num::I(i) => i as f64,
        Num::L(l) => l as f64,
        Num::D(d) => d,
    }
}

fn as_i64(n: Num) -> i64 {
    match n {
        Num::I(i) => i as i64,
        Num::L(l) => l,
        Num::D(d) => d as i64,
    }
}

fn as_int(v: &Value, what: &str) -> Result<i32, RtError> {
    match v {
        Value::Int(i) => Ok(*i),
        other => Err(RtError::Type(format!("{what} expects an Integer, found {}", other.type_name()))),
    }
}

fn as_bool(v: &Value, what: &str) -> Result<bool, RtError> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(RtError::Type(format!("{what} expects a Boolean, found {}", other.type_name()))),
    }
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str, RtError> {
    match v {
        Value::Str(s) => Ok(s),
        other => Err(RtError::Type(format!("{what} expects a String, found {}", other.type_name()))),
    }
}

/// Decimal rendering of a double in the host language's style: `1.0`,
/// `0.25`, `1.0E7`.
pub fn format_double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".into();
    }
    if d.is_infinite() {
        return if d > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    let a = d.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        if d.fract() == 0.0 {
            format!("{d:.1}")
        } else {
            format!("{d}")
        }
    } else {
        let s = format!("{d:e}");
        let (m, e) = s.split_once('e').unwrap_or((&s, "0"));
        let m = if m.contains('.') { m.to_string() } else { format!("{m}.0") };
        format!("{m}E{e}")
    }
}

/// 32-bit string hash with the usual `31 * h + c` recurrence over UTF-16
/// units.
pub fn string_hash(s: &str) -> i32 {
    s.encode_utf16().fold(0i32, |h, c| h.wrapping_mul(31).wrapping_add(c as i32))
}

pub fn to_text(host: &mut dyn Host, v: &Value) -> Result<String, RtError> {
    Ok(match v {
        Value::Unit => "Unit".into(),
        Value::Null => "null".into(),
        Value::Int(i) => i.to_string(),
        Value::Long(l) => l.to_string(),
        Value::Double(d) => format_double(*d),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.to_string(),
        Value::Enum { case, .. } => case.to_string(),
        Value::List(l) => {
            let items: Vec<Value> = lock(l).clone();
            let parts = items.iter().map(|x| to_text(host, x)).collect::<Result<Vec<_>, _>>()?;
            format!("[{}]", parts.join(", "))
        }
        Value::Optional(None) => "Optional.empty".into(),
        Value::Optional(Some(x)) => format!("Optional[{}]", to_text(host, x)?),
        Value::Object(o) => match host.user_method(v, "toString", &[]) {
            Some(r) => match r? {
                Value::Str(s) => s.to_string(),
                other => return Err(RtError::Type(format!("toString returned {}", other.type_name()))),
            },
            None => o.class.clone(),
        },
        Value::Exception { class, message } => format!("{class}: {message}"),
        other => other.type_name(),
    })
}

pub fn equals(host: &mut dyn Host, a: &Value, b: &Value) -> Result<bool, RtError> {
    if let Value::Object(_) = a {
        if let Some(r) = host.user_method(a, "equals", std::slice::from_ref(b)) {
            return as_bool(&r?, "equals");
        }
        return Ok(a == b);
    }
    match (num(a), num(b)) {
        (Some(x), Some(y)) if std::mem::discriminant(a) == std::mem::discriminant(b) => {
            Ok(as_f64(x) == as_f64(y) && as_i64(x) == as_i64(y))
        }
        _ => Ok(a == b),
    }
}

pub fn hash_code(host: &mut dyn Host, v: &Value) -> Result<i32, RtError> {
    Ok(match v {
        Value::Int(i) => *i,
        Value::Long(l) => (*l ^ ((*l as u64) >> 32) as i64) as i32,
        Value::Double(d) => {
            let b = d.to_bits();
            (b ^ (b >> 32)) as i32
        }
        Value::Bool(b) => {
            if *b {
                1231
            } else {
                1237
            }
        }
        Value::Str(s) => string_hash(s),
        Value::Enum { ty, case } => string_hash(ty).wrapping_mul(31).wrapping_add(string_hash(case)),
        Value::List(l) => {
            let items: Vec<Value> = lock(l).clone();
            let mut h = 1i32;
            for x in &items {
                h = h.wrapping_mul(31).wrapping_add(hash_code(host, x)?);
            }
            h
        }
        Value::Optional(Some(x)) => hash_code(host, x)?,
        Value::Optional(None) => 0,
        Value::Object(o) => match host.user_method(v, "hashCode", &[]) {
            Some(r) => as_int(&r?, "hashCode")?,
            None => string_hash(&o.class),
        },
        _ => 0,
    })
}

fn arith(op: BinOp, a: Num, b: Num) -> Result<Value, RtError> {
    use Num::*;
    let zero = || thrown("ArithmeticException", "/ by zero");
    Ok(match (a, b) {
        (D(_), _) | (_, D(_)) => {
            let (x, y) = (as_f64(a), as_f64(b));
            Value::Double(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Rem => x % y,
                _ => unreachable!(),
            })
        }
        (L(_), _) | (_, L(_)) => {
            let (x, y) = (as_i64(a), as_i64(b));
            Value::Long(match op {
                BinOp::Add => x.wrapping_add(y),
                BinOp::Sub => x.wrapping_sub(y),
                BinOp::Mul => x.wrapping_mul(y),
                BinOp::Div => x.checked_div(y).ok_or_else(zero)?,
                BinOp::Rem => x.checked_rem(y).ok_or_else(zero)?,
                _ => unreachable!(),
            })
        }
        (I(x), I(y)) => Value::Int(match op {
            BinOp::Add => x.wrapping_add(y),
            BinOp::Sub => x.wrapping_sub(y),
            BinOp::Mul => x.wrapping_mul(y),
            BinOp::Div => x.checked_div(y).ok_or_else(zero)?,
            BinOp::Rem => x.checked_rem(y).ok_or_else(zero)?,
            _ => unreachable!(),
        }),
    })
}

fn compare(op: BinOp, a: Num, b: Num) -> bool {
    let ord = match (a, b) {
        (Num::D(_), _) | (_, Num::D(_)) => as_f64(a).partial_cmp(&as_f64(b)),
        _ => Some(as_i64(a).cmp(&as_i64(b))),
    };
    let Some(ord) = ord else { return false };
    match op {
        BinOp::Lt => ord.is_lt(),
        BinOp::Le => ord.is_le(),
        BinOp::Gt => ord.is_gt(),
        BinOp::Ge => ord.is_ge(),
        _ => unreachable!(),
    }
}

/// Applies a binary operator to evaluated operands. `&&` and `||` are
/// evaluated strictly here; evaluators short-circuit before calling.
pub fn binary(host: &mut dyn Host, op: BinOp, l: &Value, r: &Value) -> Result<Value, RtError> {
    match op {
        BinOp::Add if matches!(l, Value::Str(_)) || matches!(r, Value::Str(_)) => {
            Ok(Value::Str(Arc::from(format!("{}{}", to_text(host, l)?, to_text(host, r)?))))
        }
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
            let sym = op.symbol();
            arith(op, expect_num(l, sym)?, expect_num(r, sym)?)
        }
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let sym = op.symbol();
            Ok(Value::Bool(compare(op, expect_num(l, sym)?, expect_num(r, sym)?)))
        }
        BinOp::Eq | BinOp::Ne => {
            let same = match (num(l), num(r)) {
                (Some(a), Some(b)) => match (a, b) {
                    (Num::D(_), _) | (_, Num::D(_)) => as_f64(a) == as_f64(b),
                    _ => as_i64(a) == as_i64(b),
                },
                _ => l == r,
            };
            Ok(Value::Bool(same == (op == BinOp::Eq)))
        }
        BinOp::And | BinOp::Or => {
            let (a, b) = (as_bool(l, op.symbol())?, as_bool(r, op.symbol())?);
            Ok(Value::Bool(if op == BinOp::And { a && b } else { a || b }))
        }
        BinOp::BitAnd | BinOp::BitOr => match (l, r) {
            (Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(if op == BinOp::BitAnd { *a & *b } else { *a | *b })),
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(if op == BinOp::BitAnd { a & b } else { a | b })),
            _ => {
                let (a, b) = (as_i64(expect_num(l, op.symbol())?), as_i64(expect_num(r, op.symbol())?));
                Ok(Value::Long(if op == BinOp::BitAnd { a & b } else { a | b }))
            }
        },
    }
}

/// Instance method on any value. User objects are offered to the host first;
/// the members of `Object` apply to every value.
pub fn call_method(host: &mut dyn Host, recv: &Value, name: &str, args: &[Value]) -> Result<Value, RtError> {
    if let Value::Object(_) = recv {
        if let Some(r) = host.user_method(recv, name, args) {
            return r;
        }
    }
    match (name, args.len()) {
        ("equals", 1) => return Ok(Value::Bool(equals(host, recv, &args[0])?)),
        ("hashCode", 0) => return Ok(Value::Int(hash_code(host, recv)?)),
        ("toString", 0) => return Ok(Value::Str(Arc::from(to_text(host, recv)?))),
        _ => {}
    }
    match recv {
        Value::Null => Err(thrown("NullPointerException", format!("cannot invoke {name} on null"))),
        Value::Int(_) | Value::Long(_) | Value::Double(_) => {
            let n = num(recv).expect("numeric receiver");
            arity(name, args, 0)?;
            match name {
                "intValue" => Ok(Value::Int(as_i64(n) as i32)),
                "longValue" => Ok(Value::Long(as_i64(n))),
                "doubleValue" => Ok(Value::Double(as_f64(n))),
                _ => Err(unknown(&recv.type_name(), name)),
            }
        }
        Value::Str(s) => string_method(s, name, args),
        Value::Enum { ty, case } => match name {
            "name" => Ok(Value::Str(case.clone())),
            "ordinal" => host
                .ordinal(ty, case)
                .map(Value::Int)
                .ok_or_else(|| RtError::Type(format!("{case} is not a case of {ty}"))),
            _ => Err(unknown(ty, name)),
        },
        Value::List(l) => list_method(l, name, args),
        Value::Iter(it) => {
            let mut g = lock(it);
            match name {
                "hasNext" => Ok(Value::Bool(g.1 < g.0.len())),
                "next" => {
                    let i = g.1;
                    let v =
                        g.0.get(i).cloned().ok_or_else(|| thrown("NoSuchElementException", "iterator exhausted"))?;
                    g.1 += 1;
                    Ok(v)
                }
                _ => Err(unknown("Iterator", name)),
            }
        }
        Value::Optional(o) => match name {
            "isPresent" => Ok(Value::Bool(o.is_some())),
            "isEmpty" => Ok(Value::Bool(o.is_none())),
            "get" => o.as_deref().cloned().ok_or_else(|| thrown("NoSuchElementException", "No value present")),
            "orElse" => {
                arity(name, args, 1)?;
                Ok(o.as_deref().cloned().unwrap_or_else(|| args[0].clone()))
            }
            "ifPresent" => {
                arity(name, args, 1)?;
                if let Some(v) = o.as_deref() {
                    call_method(host, &args[0], "accept", std::slice::from_ref(v))?;
                }
                Ok(Value::Unit)
            }
            _ => Err(unknown("Optional", name)),
        },
        Value::Stream => match name {
            "println" | "print" => {
                arity(name, args, 1)?;
                let text = to_text(host, &args[0])?;
                host.print(text);
                Ok(Value::Unit)
            }
            _ => Err(unknown("PrintStream", name)),
        },
        Value::Channel(ep) => {
            arity(name, args, 1)?;
            let d = host.deadline();
            match (name, args[0].is_unit()) {
                ("com", true) => ep.com_receive(d),
                ("com", false) => ep.com_send(args[0].clone(), d),
                ("select", true) => ep.select_receive(d),
                ("select", false) => ep.select_send(&args[0], d),
                _ => Err(unknown("Channel", name)),
            }
        }
        Value::GlobalChannel => {
            arity(name, args, 1)?;
            match name {
                "com" => Ok(args[0].deep_copy()),
                "select" => match &args[0] {
                    v @ Value::Enum { .. } => Ok(v.clone()),
                    v => Err(RtError::Type(format!("select expects an enum label, found {}", v.type_name()))),
                },
                _ => Err(unknown("Channel", name)),
            }
        }
        Value::Exception { message, .. } => match name {
            "getMessage" => Ok(Value::Str(message.clone())),
            _ => Err(unknown(&recv.type_name(), name)),
        },
        Value::Class(c) => call_static(host, c, name, args),
        _ => Err(unknown(&recv.type_name(), name)),
    }
}

fn string_method(s: &Arc<str>, name: &str, args: &[Value]) -> Result<Value, RtError> {
    let chars: Vec<char> = s.chars().collect();
    let idx = |v: &Value, what: &str| -> Result<usize, RtError> {
        let i = as_int(v, what)?;
        if i < 0 || i as usize > chars.len() {
            return Err(thrown("StringIndexOutOfBoundsException", format!("index {i}, length {}", chars.len())));
        }
        Ok(i as usize)
    };
    Ok(match name {
        "length" => Value::Int(chars.len() as i32),
        "isEmpty" => Value::Bool(s.is_empty()),
        "concat" => {
            arity(name, args, 1)?;
            Value::Str(Arc::from(format!("{s}{}", as_str(&args[0], name)?)))
        }
        "substring" => {
            arity(name, args, 2)?;
            let (a, b) = (idx(&args[0], name)?, idx(&args[1], name)?);
            if a > b {
                return Err(thrown("StringIndexOutOfBoundsException", format!("begin {a}, end {b}")));
            }
            Value::Str(Arc::from(chars[a..b].iter().collect::<String>()))
        }
        "startsWith" => {
            arity(name, args, 1)?;
            Value::Bool(s.starts_with(as_str(&args[0], name)?))
        }
        "contains" => {
            arity(name, args, 1)?;
            Value::Bool(s.contains(as_str(&args[0], name)?))
        }
        "charAt" => {
            arity(name, args, 1)?;
            let i = idx(&args[0], name)?;
            let c = chars.get(i).ok_or_else(|| thrown("StringIndexOutOfBoundsException", format!("index {i}")))?;
            Value::Str(Arc::from(c.to_string()))
        }
        _ => return Err(unknown("String", name)),
    })
}

fn list_method(l: &Arc<Mutex<Vec<Value>>>, name: &str, args: &[Value]) -> Result<Value, RtError> {
    let oob = |i: i32, n: usize| thrown("IndexOutOfBoundsException", format!("Index {i} out of bounds for length {n}"));
    match name {
        "size" => Ok(Value::Int(lock(l).len() as i32)),
        "isEmpty" => Ok(Value::Bool(lock(l).is_empty())),
        "get" => {
            arity(name, args, 1)?;
            let i = as_int(&args[0], name)?;
            let g = lock(l);
            usize::try_from(i).ok().and_then(|u| g.get(u).cloned()).ok_or_else(|| oob(i, g.len()))
        }
        "subList" => {
            arity(name, args, 2)?;
            let (a, b) = (as_int(&args[0], name)?, as_int(&args[1], name)?);
            let g = lock(l);
            if a < 0 || b < a || b as usize > g.len() {
                return Err(thrown(
                    "IndexOutOfBoundsException",
                    format!("fromIndex {a}, toIndex {b}, size {}", g.len()),
                ));
            }
            Ok(Value::list(g[a as usize..b as usize].to_vec()))
        }
        "add" => {
            arity(name, args, 1)?;
            lock(l).push(args[0].clone());
            Ok(Value::Bool(true))
        }
        "addAll" => {
            arity(name, args, 1)?;
            let Value::List(other) = &args[0] else {
                return Err(RtError::Type(format!("addAll expects a list, found {}", args[0].type_name())));
            };
            let items: Vec<Value> = lock(other).clone();
            let changed = !items.is_empty();
            lock(l).extend(items);
            Ok(Value::Bool(changed))
        }
        "iterator" => Ok(Value::Iter(Arc::new(Mutex::new((lock(l).clone(), 0))))),
        _ => Err(unknown("List", name)),
    }
}

/// Static member of a prelude class; `class` may carry a projection suffix.
pub fn call_static(host: &mut dyn Host, class: &str, name: &str, args: &[Value]) -> Result<Value, RtError> {
    let base = base_class(class);
    match (base, name) {
        ("Math", _) => math(name, args),
        ("String", "valueOf") => {
            arity(name, args, 1)?;
            Ok(Value::Str(Arc::from(to_text(host, &args[0])?)))
        }
        ("Integer", "valueOf") | ("Integer", "parseInt") => {
            arity(name, args, 1)?;
            match &args[0] {
                Value::Str(s) => s
                    .trim()
                    .parse::<i32>()
                    .map(Value::Int)
                    .map_err(|_| thrown("NumberFormatException", format!("For input string: \"{s}\""))),
                v => Ok(Value::Int(as_i64(expect_num(v, name)?) as i32)),
            }
        }
        ("Long", "valueOf") => {
            arity(name, args, 1)?;
            Ok(Value::Long(as_i64(expect_num(&args[0], name)?)))
        }
        ("Double", "valueOf") => {
            arity(name, args, 1)?;
            Ok(Value::Double(as_f64(expect_num(&args[0], name)?)))
        }
        ("Optional", "of") => {
            arity(name, args, 1)?;
            if matches!(args[0], Value::Null) {
                return Err(thrown("NullPointerException", "Optional.of(null)"));
            }
            Ok(Value::Optional(Some(Box::new(args[0].clone()))))
        }
        ("Optional", "empty") => Ok(Value::Optional(None)),
        ("Assert", "assertTrue") => {
            arity(name, args, 2)?;
            if as_bool(&args[1], name)? {
                Ok(Value::Unit)
            } else {
                Err(RtError::Assertion(to_text(host, &args[0])?))
            }
        }
        ("Assert", "assertEquals") => {
            arity(name, args, 3)?;
            if equals(host, &args[1], &args[2])? {
                Ok(Value::Unit)
            } else {
                let (e, a) = (to_text(host, &args[1])?, to_text(host, &args[2])?);
                Err(RtError::Assertion(format!("{}: expected {e} but was {a}", to_text(host, &args[0])?)))
            }
        }
        ("TestUtils", "newLocalChannel") => {
            let key = args.iter().find_map(|a| match a {
                Value::Str(s) => Some(s.to_string()),
                _ => None,
            });
            match key {
                Some(k) => host.local_channel(&k),
                None => Err(RtError::Channel("newLocalChannel needs a key".into())),
            }
        }
        _ => Err(unknown(class, name)),
    }
}

fn math(name: &str, args: &[Value]) -> Result<Value, RtError> {
    let f = |i: usize| -> Result<f64, RtError> { Ok(as_f64(expect_num(&args[i], name)?)) };
    match name {
        "floor" | "ceil" | "sqrt" | "log10" => {
            arity(name, args, 1)?;
            let x = f(0)?;
            Ok(Value::Double(match name {
                "floor" => x.floor(),
                "ceil" => x.ceil(),
                "sqrt" => x.sqrt(),
                _ => x.log10(),
            }))
        }
        "pow" => {
            arity(name, args, 2)?;
            Ok(Value::Double(f(0)?.powf(f(1)?)))
        }
        "max" | "min" => {
            arity(name, args, 2)?;
            let (a, b) = (expect_num(&args[0], name)?, expect_num(&args[1], name)?);
            let pick_a = if name == "max" { compare(BinOp::Ge, a, b) } else { compare(BinOp::Le, a, b) };
            let (x, y) = (&args[0], &args[1]);
            Ok(match (x, y) {
                (Value::Int(_), Value::Int(_)) => (if pick_a { x } else { y }).clone(),
                _ if matches!(a, Num::D(_)) || matches!(b, Num::D(_)) => {
                    Value::Double(if pick_a { as_f64(a) } else { as_f64(b) })
                }
                _ => Value::Long(if pick_a { as_i64(a) } else { as_i64(b) }),
            })
        }
        "abs" => {
            arity(name, args, 1)?;
            Ok(match &args[0] {
                Value::Int(i) => Value::Int(i.wrapping_abs()),
                Value::Long(l) => Value::Long(l.wrapping_abs()),
                v => Value::Double(as_f64(expect_num(v, name)?).abs()),
            })
        }
        _ => Err(unknown("Math", name)),
    }
}

/// Static field of a prelude class.
pub fn static_field(class: &str, name: &str) -> Result<Value, RtError> {
    match (base_class(class), name) {
        ("System", "out") => Ok(Value::Stream),
        _ => Err(unknown(class, name)),
    }
}

/// Instance creation for prelude classes.
pub fn construct(class: &str, args: &[Value]) -> Result<Value, RtError> {
    match base_class(class) {
        "ArrayList" => {
            arity("ArrayList", args, 0)?;
            Ok(Value::list(Vec::new()))
        }
        c @ ("Exception" | "RuntimeException") => {
            let message = match args.first() {
                Some(Value::Str(s)) => s.clone(),
                _ => Arc::from(""),
            };
            Ok(Value::Exception { class: Arc::from(c), message })
        }
        "Object" => Ok(Value::object("Object", Vec::new(), Default::default())),
        _ => Err(RtError::Type(format!("cannot instantiate builtin class {class}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::View;

    #[derive(Default)]
    struct Bare {
        out: Vec<String>,
    }

    impl Host for Bare {
        fn user_method(&mut self, _: &Value, _: &str, _: &[Value]) -> Option<Result<Value, RtError>> {
            None
        }
        fn print(&mut self, text: String) {
            self.out.push(text);
        }
        fn local_channel(&mut self, key: &str) -> Result<Value, RtError> {
            Err(RtError::Channel(key.into()))
        }
        fn deadline(&self) -> Deadline {
            Deadline::none()
        }
        fn ordinal(&self, _: &str, _: &str) -> Option<i32> {
            None
        }
    }

    fn view(v: &Value) -> View {
        crate::runtime::plain_view(v, &|s| s.to_string())
    }

    #[test]
    fn empty_optional_is_absent() {
        let h = &mut Bare::default();
        let e = call_static(h, "Optional", "empty", &[]).unwrap();
        assert_eq!(call_method(h, &e, "isPresent", &[]).unwrap(), Value::Bool(false));
    }

    #[test]
    fn sublist_takes_prefix() {
        let h = &mut Bare::default();
        let l = Value::list(vec![Value::Int(15), Value::Int(3)]);
        let s = call_method(h, &l, "subList", &[Value::Int(0), Value::Int(1)]).unwrap();
        assert_eq!(view(&s), View::List(vec![View::Int(15)]));
    }

    #[test]
    fn floor_of_integer_division() {
        let h = &mut Bare::default();
        let q = binary(h, BinOp::Div, &Value::Int(3), &Value::Int(2)).unwrap();
        assert_eq!(call_static(h, "Math", "floor", &[q]).unwrap(), Value::Double(1.0));
    }

    #[test]
    fn concatenation_and_promotion() {
        let h = &mut Bare::default();
        assert_eq!(binary(h, BinOp::Add, &Value::str("bpm="), &Value::Int(61)).unwrap(), Value::str("bpm=61"));
        assert_eq!(binary(h, BinOp::Mul, &Value::Long(3), &Value::Int(4)).unwrap(), Value::Long(12));
        assert_eq!(binary(h, BinOp::Add, &Value::str("x"), &Value::Double(1.0)).unwrap(), Value::str("x1.0"));
    }

    #[test]
    fn string_hash_matches_reference_values() {
        assert_eq!(string_hash(""), 0);
        assert_eq!(string_hash("a"), 97);
        assert_eq!(string_hash("hello"), 99162322);
    }

    #[test]
    fn assertion_carries_message() {
        let h = &mut Bare::default();
        let r = call_static(h, "Assert", "assertTrue", &[Value::str("bad pseudonymisation"), Value::Bool(false)]);
        assert!(matches!(r, Err(RtError::Assertion(m)) if m == "bad pseudonymisation"));
        assert!(call_static(h, "Assert", "assertTrue", &[Value::str("x"), Value::Bool(true)]).is_ok());
    }

    #[test]
    fn println_reaches_transcript() {
        let h = &mut Bare::default();
        call_method(h, &Value::Stream, "println", &[Value::str("Hello from A")]).unwrap();
        assert_eq!(h.out, ["Hello from A"]);
    }

    #[test]
    fn doubles_print_like_the_host() {
        assert_eq!(format_double(1.0), "1.0");
        assert_eq!(format_double(0.25), "0.25");
        assert_eq!(format_double(1e7), "1.0E7");
    }

    #[test]
    fn suffixed_prelude_names_resolve() {
        assert_eq!(base_class("SymChannel_A"), "SymChannel");
        assert_eq!(base_class("TestUtils_B"), "TestUtils");
        assert_eq!(base_class("Mergesort_A"), "Mergesort_A");
    }
}
