//! Deterministic JSON output: sorted keys and 17-significant-digit floats.

use std::io;

use serde_json::ser::Formatter;
use serde_json::{Map, Value};
use tailmax::dist::fmt_g17;

/// Compact JSON formatter that writes floats with [`fmt_g17`].
struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_g17(value).as_bytes())
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(command: &str, inputs: Map<String, Value>, result: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            result,
            warnings: Vec::new(),
        }
    }

    pub fn warn(mut self, msg: impl Into<String>) -> Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("command".into(), Value::from(self.command.clone()));
        top.insert("inputs".into(), Value::Object(self.inputs.clone()));
        top.insert("result".into(), self.result.clone());
        top.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::from).collect()),
        );
        Value::Object(top)
    }

    /// Serialized form, one line, no trailing newline.
    pub fn render(&self) -> String {
        render_value(&self.to_value())
    }
}

pub fn render_value(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter);
    serde::Serialize::serialize(v, &mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_full_precision() {
        let mut inputs = Map::new();
        inputs.insert("t".into(), json!(0.9));
        inputs.insert("m".into(), json!(0.85));
        inputs.insert("n".into(), json!(2));
        let e = Envelope::new("solve", inputs, json!({"z": 1.0, "a": 0.1})).warn("careful");
        assert_eq!(
            e.render(),
            r#"{"command":"solve","inputs":{"m":0.84999999999999998,"n":2,"t":0.90000000000000002},"result":{"a":0.10000000000000001,"z":1},"warnings":["careful"]}"#
        );
    }
}
