use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::lang::Function;
use crate::perm::ObjPath;

/// Native functions provided by the runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    MathLog,
    MathAbs,
    MathFloor,
    MathMax,
    JsonParse,
    JsonStringify,
    ConsoleLog,
    FsRead,
    FsWrite,
    Spawn,
    /// `require` bound to one module (by index).
    Require(usize),
    /// `eval` bound to one module (by index).
    Eval(usize),
}

#[derive(Debug)]
pub enum ObjKind {
    Plain,
    Closure {
        func: Arc<Function>,
        env: Env,
        module: usize,
        file: Arc<str>,
    },
    Native(Builtin),
}

#[derive(Debug)]
pub struct Obj {
    pub props: RefCell<IndexMap<String, Value>>,
    pub kind: ObjKind,
}

impl Obj {
    pub fn is_callable(&self) -> bool {
        !matches!(self.kind, ObjKind::Plain)
    }
}

/// A monitored view of an object: every field access, write and call through
/// it is checked against the subject module's permissions at `path`.
#[derive(Debug)]
pub struct Wrapper {
    pub inner: Rc<Obj>,
    pub path: ObjPath,
    pub subject: usize,
    /// Remaining levels below this one that are still monitored.
    pub depth: usize,
}

#[derive(Debug, Clone, Default)]
pub enum Value {
    #[default]
    Undefined,
    Null,
    Bool(bool),
    Num(f64),
    Str(Rc<str>),
    Obj(Rc<Obj>),
    Wrapped(Rc<Wrapper>),
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Rc::from(s))
    }

    pub fn object(props: IndexMap<String, Value>) -> Value {
        Value::Obj(Rc::new(Obj {
            props: RefCell::new(props),
            kind: ObjKind::Plain,
        }))
    }

    pub fn empty_object() -> Value {
        Value::object(IndexMap::new())
    }

    pub fn native(b: Builtin) -> Value {
        Value::Obj(Rc::new(Obj {
            props: RefCell::new(IndexMap::new()),
            kind: ObjKind::Native(b),
        }))
    }

    /// The object behind a value, looking through a wrapper.
    pub fn raw_obj(&self) -> Option<&Rc<Obj>> {
        match self {
            Value::Obj(o) => Some(o),
            Value::Wrapped(w) => Some(&w.inner),
            _ => None,
        }
    }

    /// Strip a wrapper, if any.
    pub fn unwrapped(&self) -> Value {
        match self {
            Value::Wrapped(w) => Value::Obj(w.inner.clone()),
            v => v.clone(),
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Undefined | Value::Null => false,
            Value::Bool(b) => *b,
            Value::Num(n) => *n != 0.0 && !n.is_nan(),
            Value::Str(s) => !s.is_empty(),
            Value::Obj(_) | Value::Wrapped(_) => true,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Undefined => "undefined",
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Num(_) => "number",
            Value::Str(_) => "string",
            Value::Obj(o) if o.is_callable() => "function",
            Value::Wrapped(w) if w.inner.is_callable() => "function",
            Value::Obj(_) | Value::Wrapped(_) => "object",
        }
    }

    pub fn to_number(&self) -> f64 {
        match self {
            Value::Undefined => f64::NAN,
            Value::Null => 0.0,
            Value::Bool(b) => f64::from(u8::from(*b)),
            Value::Num(n) => *n,
            Value::Str(s) => {
                let t = s.trim();
                if t.is_empty() {
                    0.0
                } else {
                    t.parse().unwrap_or(f64::NAN)
                }
            }
            Value::Obj(_) | Value::Wrapped(_) => f64::NAN,
        }
    }

    /// Identity for objects (through wrappers), value equality otherwise.
    pub fn strict_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Undefined, Value::Undefined) | (Value::Null, Value::Null) => true,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Num(a), Value::Num(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            _ => match (self.raw_obj(), other.raw_obj()) {
                (Some(a), Some(b)) => Rc::ptr_eq(a, b),
                _ => false,
            },
        }
    }
}

pub fn format_number(n: f64) -> String {
    if n.is_nan() {
        "NaN".into()
    } else if n.is_infinite() {
        if n > 0.0 { "Infinity" } else { "-Infinity" }.into()
    } else if n == n.trunc() && n.abs() < 1e21 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// String conversion, as used by `+` and `console.log`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undefined => f.write_str("undefined"),
            Value::Null => f.write_str("null"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(n) => f.write_str(&format_number(*n)),
            Value::Str(s) => f.write_str(s),
            v if v.type_name() == "function" => f.write_str("[function]"),
            _ => f.write_str("[object Object]"),
        }
    }
}

/// A lexical scope.
#[derive(Debug)]
pub struct Scope {
    pub vars: RefCell<HashMap<String, Value>>,
    pub parent: Option<Env>,
    /// The per-module context scope holding default-available names.
    pub is_context: bool,
}

pub type Env = Rc<Scope>;

pub fn new_scope(parent: Option<Env>, is_context: bool) -> Env {
    Rc::new(Scope {
        vars: RefCell::new(HashMap::new()),
        parent,
        is_context,
    })
}

/// Find the scope that binds `name`.
pub fn lookup_scope(env: &Env, name: &str) -> Option<Env> {
    let mut cur = Some(env.clone());
    while let Some(s) = cur {
        if s.vars.borrow().contains_key(name) {
            return Some(s);
        }
        cur = s.parent.clone();
    }
    None
}
