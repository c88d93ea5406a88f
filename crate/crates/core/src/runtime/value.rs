//! Runtime values shared by both evaluators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use serde::Serialize;

use super::channel::Endpoint;

/// Instance of a user class. `roles` binds the class's role parameters to
/// the roles of the execution; the distributed evaluator leaves it empty.
#[derive(Debug)]
pub struct Obj {
    pub class: String,
    pub roles: Vec<String>,
    fields: Mutex<BTreeMap<String, Value>>,
}

impl Obj {
    pub fn fields(&self) -> MutexGuard<'_, BTreeMap<String, Value>> {
        self.fields.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Unit,
    Null,
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Str(Arc<str>),
    Enum {
        ty: Arc<str>,
        case: Arc<str>,
    },
    List(Arc<Mutex<Vec<Value>>>),
    Iter(Arc<Mutex<(Vec<Value>, usize)>>),
    Optional(Option<Box<Value>>),
    Object(Arc<Obj>),
    /// A class used as the receiver of a static call.
    Class(Arc<str>),
    /// `System.out`.
    Stream,
    Channel(Endpoint),
    /// Channel value in the global evaluator, where communication is a
    /// relocation and needs no queue.
    GlobalChannel,
    Exception {
        class: Arc<str>,
        message: Arc<str>,
    },
}

impl PartialEq for Value {
    /// Structural for data, identity for objects and mutable containers'
    /// contents compared element-wise.
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (Unit, Unit) | (Null, Null) | (Stream, Stream) | (GlobalChannel, GlobalChannel) => true,
            (Int(a), Int(b)) => a == b,
            (Long(a), Long(b)) => a == b,
            (Double(a), Double(b)) => a == b,
            (Bool(a), Bool(b)) => a == b,
            (Str(a), Str(b)) => a == b,
            (Enum { ty: t1, case: c1 }, Enum { ty: t2, case: c2 }) => t1 == t2 && c1 == c2,
            (List(a), List(b)) => Arc::ptr_eq(a, b) || *lock(a) == *lock(b),
            (Iter(a), Iter(b)) => Arc::ptr_eq(a, b),
            (Optional(a), Optional(b)) => a == b,
            (Object(a), Object(b)) => Arc::ptr_eq(a, b),
            (Class(a), Class(b)) => a == b,
            (Channel(a), Channel(b)) => a == b,
            (Exception { class: c1, message: m1 }, Exception { class: c2, message: m2 }) => c1 == c2 && m1 == m2,
            _ => false,
        }
    }
}

/// Snapshot of a list's elements.
pub fn value_items(l: &Mutex<Vec<Value>>) -> Vec<Value> {
    lock(l).clone()
}

pub(crate) fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn enum_case(ty: &str, case: &str) -> Value {
        Value::Enum { ty: Arc::from(ty), case: Arc::from(case) }
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Arc::new(Mutex::new(items)))
    }

    pub fn object(class: &str, roles: Vec<String>, fields: BTreeMap<String, Value>) -> Value {
        Value::Object(Arc::new(Obj { class: class.to_string(), roles, fields: Mutex::new(fields) }))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Value::Unit)
    }

    pub fn type_name(&self) -> String {
        match self {
            Value::Unit => "Unit".into(),
            Value::Null => "null".into(),
            Value::Int(_) => "Integer".into(),
            Value::Long(_) => "Long".into(),
            Value::Double(_) => "Double".into(),
            Value::Bool(_) => "Boolean".into(),
            Value::Str(_) => "String".into(),
            Value::Enum { ty, .. } => ty.to_string(),
            Value::List(_) => "ArrayList".into(),
            Value::Iter(_) => "Iterator".into(),
            Value::Optional(_) => "Optional".into(),
            Value::Object(o) => o.class.clone(),
            Value::Class(c) => format!("class {c}"),
            Value::Stream => "PrintStream".into(),
            Value::Channel(_) | Value::GlobalChannel => "Channel".into(),
            Value::Exception { class, .. } => class.to_string(),
        }
    }

    /// Copy with no mutable state shared with `self`; what a receiver gets
    /// from a communication.
    pub fn deep_copy(&self) -> Value {
        match self {
            Value::List(l) => Value::list(lock(l).iter().map(Value::deep_copy).collect()),
            Value::Iter(i) => {
                let g = lock(i);
                Value::Iter(Arc::new(Mutex::new((g.0.iter().map(Value::deep_copy).collect(), g.1))))
            }
            Value::Optional(o) => Value::Optional(o.as_ref().map(|v| Box::new(v.deep_copy()))),
            Value::Object(o) => {
                let fields = o.fields().iter().map(|(k, v)| (k.clone(), v.deep_copy())).collect();
                Value::object(&o.class, o.roles.clone(), fields)
            }
            v => v.clone(),
        }
    }
}

/// Role-independent rendering of a value used to compare executions.
/// Objects show only the fields present in the view they were taken from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum View {
    Unit,
    Null,
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Enum(String, String),
    List(Vec<View>),
    Optional(Option<Box<View>>),
    Object { class: String, fields: BTreeMap<String, View> },
    Opaque(String),
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            View::Unit => f.write_str("()"),
            View::Null => f.write_str("null"),
            View::Int(i) => write!(f, "{i}"),
            View::Long(i) => write!(f, "{i}L"),
            View::Double(d) => write!(f, "{d:?}"),
            View::Bool(b) => write!(f, "{b}"),
            View::Str(s) => write!(f, "{s:?}"),
            View::Enum(t, c) => write!(f, "{t}.{c}"),
            View::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            View::Optional(None) => f.write_str("Optional.empty"),
            View::Optional(Some(v)) => write!(f, "Optional[{v}]"),
            View::Object { class, fields } => {
                write!(f, "{class}{{")?;
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
            View::Opaque(s) => f.write_str(s),
        }
    }
}

/// View of a value with every object field shown; `class_name` maps a
/// runtime class to the name reported in the view.
pub fn plain_view(v: &Value, class_name: &dyn Fn(&str) -> String) -> View {
    match v {
        Value::Unit => View::Unit,
        Value::Null => View::Null,
        Value::Int(i) => View::Int(*i),
        Value::Long(i) => View::Long(*i),
        Value::Double(d) => View::Double(*d),
        Value::Bool(b) => View::Bool(*b),
        Value::Str(s) => View::Str(s.to_string()),
        Value::Enum { ty, case } => View::Enum(ty.to_string(), case.to_string()),
        Value::List(l) => View::List(lock(l).iter().map(|x| plain_view(x, class_name)).collect()),
        Value::Optional(o) => View::Optional(o.as_ref().map(|x| Box::new(plain_view(x, class_name)))),
        Value::Object(o) => View::Object {
            class: class_name(&o.class),
            fields: o.fields().iter().map(|(k, x)| (k.clone(), plain_view(x, class_name))).collect(),
        },
        other => View::Opaque(other.type_name()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deep_copy_detaches_lists() {
        let l = Value::list(vec![Value::Int(1)]);
        let c = l.deep_copy();
        if let Value::List(inner) = &l {
            lock(inner).push(Value::Int(2));
        }
        assert_eq!(plain_view(&c, &|s| s.to_string()), View::List(vec![View::Int(1)]));
    }

    #[test]
    fn views_render_compactly() {
        let v = View::Object {
            class: "AuthResult".into(),
            fields: [("left".to_string(), View::Optional(Some(Box::new(View::Str("t".into())))))].into(),
        };
        assert_eq!(v.to_string(), "AuthResult{left: Optional[\"t\"]}");
    }
}
