use std::rc::Rc;

use indexmap::IndexMap;

use super::interp::{Interp, Res};
use super::value::{Builtin, Value};
use super::RuntimeConfig;
use crate::lang::SourceLocation;

/// Objects shared by every module of one run.
pub(super) struct SharedRoots {
    pub math: Value,
    pub json: Value,
    pub console: Value,
    pub process: Value,
    pub global: Value,
    pub fs: Value,
    pub child_process: Value,
    pub os: Value,
    /// Module cache, reachable as `require.cache`.
    pub cache: Value,
}

fn obj(fields: Vec<(&str, Value)>) -> Value {
    Value::object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

impl SharedRoots {
    pub fn new(cfg: &RuntimeConfig) -> Self {
        let env = cfg.env.iter().map(|(k, v)| (k.clone(), Value::str(v))).collect();
        let argv = cfg
            .argv
            .iter()
            .enumerate()
            .map(|(i, a)| (i.to_string(), Value::str(a)))
            .collect();
        SharedRoots {
            math: obj(vec![
                ("log", Value::native(Builtin::MathLog)),
                ("abs", Value::native(Builtin::MathAbs)),
                ("floor", Value::native(Builtin::MathFloor)),
                ("max", Value::native(Builtin::MathMax)),
            ]),
            json: obj(vec![
                ("parse", Value::native(Builtin::JsonParse)),
                ("stringify", Value::native(Builtin::JsonStringify)),
            ]),
            console: obj(vec![("log", Value::native(Builtin::ConsoleLog))]),
            process: obj(vec![("env", Value::object(env)), ("argv", Value::object(argv))]),
            global: Value::empty_object(),
            fs: obj(vec![
                ("read", Value::native(Builtin::FsRead)),
                ("write", Value::native(Builtin::FsWrite)),
            ]),
            child_process: obj(vec![("spawn", Value::native(Builtin::Spawn))]),
            os: obj(vec![("EOL", Value::str("\n"))]),
            cache: Value::empty_object(),
        }
    }

    /// The shared value behind a default-available name or builtin module.
    pub fn get(&self, name: &str) -> Value {
        match name {
            "Math" => self.math.clone(),
            "JSON" => self.json.clone(),
            "console" => self.console.clone(),
            "process" => self.process.clone(),
            "global" => self.global.clone(),
            "fs" => self.fs.clone(),
            "child_process" => self.child_process.clone(),
            "os" => self.os.clone(),
            _ => Value::empty_object(),
        }
    }
}

/// JSON view of a value without going through any monitor.
pub(super) fn raw_json(v: &Value) -> serde_json::Value {
    fn go(v: &Value, depth: usize) -> serde_json::Value {
        use serde_json::Value as J;
        match v {
            Value::Undefined | Value::Null => J::Null,
            Value::Bool(b) => J::Bool(*b),
            Value::Num(n) => serde_json::Number::from_f64(*n).map(J::Number).unwrap_or(J::Null),
            Value::Str(s) => J::String(s.to_string()),
            Value::Obj(_) | Value::Wrapped(_) => {
                let o = v.raw_obj().expect("object");
                if o.is_callable() {
                    return J::String("[function]".into());
                }
                if depth > 32 {
                    return J::String("[cycle]".into());
                }
                let props = o.props.borrow();
                J::Object(props.iter().map(|(k, x)| (k.clone(), go(x, depth + 1))).collect())
            }
        }
    }
    go(v, 0)
}

fn from_json(j: &serde_json::Value) -> Value {
    use serde_json::Value as J;
    match j {
        J::Null => Value::Null,
        J::Bool(b) => Value::Bool(*b),
        J::Number(n) => Value::Num(n.as_f64().unwrap_or(f64::NAN)),
        J::String(s) => Value::str(s),
        J::Array(items) => Value::object(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| (i.to_string(), from_json(x)))
                .collect::<IndexMap<_, _>>(),
        ),
        J::Object(m) => Value::object(m.iter().map(|(k, x)| (k.clone(), from_json(x))).collect()),
    }
}

fn arg(args: &[Value], i: usize) -> Value {
    args.get(i).cloned().unwrap_or_default()
}

impl Interp<'_> {
    /// Serialize through monitored reads, so a wrapped argument is checked
    /// field by field.
    fn stringify(&mut self, v: &Value, loc: &SourceLocation, depth: usize) -> Res<serde_json::Value> {
        use serde_json::Value as J;
        Ok(match v {
            Value::Obj(o) if o.is_callable() => J::Null,
            Value::Wrapped(w) if w.inner.is_callable() => J::Null,
            Value::Obj(_) | Value::Wrapped(_) => {
                if depth > 32 {
                    return Err(self.type_error(loc, "converting circular structure to JSON"));
                }
                let mut m = serde_json::Map::new();
                for k in self.keys(v, loc)? {
                    let x = self.get_field(v, &k, loc)?;
                    m.insert(k, self.stringify(&x, loc, depth + 1)?);
                }
                J::Object(m)
            }
            other => raw_json(other),
        })
    }

    pub(super) fn call_builtin(&mut self, b: Builtin, args: Vec<Value>, loc: &SourceLocation) -> Res<Value> {
        let num = |i: usize| arg(&args, i).to_number();
        Ok(match b {
            Builtin::MathLog => Value::Num(num(0).ln()),
            Builtin::MathAbs => Value::Num(num(0).abs()),
            Builtin::MathFloor => Value::Num(num(0).floor()),
            Builtin::MathMax => Value::Num(args.iter().map(Value::to_number).fold(f64::NEG_INFINITY, |a, b| {
                if a.is_nan() || b.is_nan() {
                    f64::NAN
                } else {
                    a.max(b)
                }
            })),
            Builtin::JsonParse => {
                let text = arg(&args, 0).to_string();
                match serde_json::from_str::<serde_json::Value>(&text) {
                    Ok(j) => from_json(&j),
                    Err(e) => return Err(self.type_error(loc, format!("JSON.parse: {e}"))),
                }
            }
            Builtin::JsonStringify => {
                let v = arg(&args, 0);
                if matches!(v, Value::Undefined) {
                    return Ok(Value::Undefined);
                }
                let j = self.stringify(&v, loc, 0)?;
                Value::str(&j.to_string())
            }
            Builtin::ConsoleLog => {
                let line: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                self.stdout.push_str(&line.join(" "));
                self.stdout.push('\n');
                Value::Undefined
            }
            Builtin::FsRead => {
                let path = arg(&args, 0).to_string();
                match self.vfs.get(&path) {
                    Some(s) => Value::Str(Rc::from(s.as_str())),
                    None => Value::Undefined,
                }
            }
            Builtin::FsWrite => {
                let path = arg(&args, 0).to_string();
                let data = arg(&args, 1).to_string();
                self.vfs.insert(path, data);
                Value::Undefined
            }
            Builtin::Spawn => {
                self.spawned.push(args.iter().map(|a| a.to_string()).collect());
                Value::Undefined
            }
            Builtin::Require(idx) => return self.do_require(idx, &arg(&args, 0), loc),
            Builtin::Eval(idx) => return self.do_eval(idx, arg(&args, 0), loc),
        })
    }
}
