//! Flat, ordered key/value records printed by the single-shot commands.

use mesd_core::advantage::format_sig9;
use serde_json::{Map, Value};

#[derive(Debug, Clone)]
enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Num(x) => format_sig9(*x),
            Field::Int(n) => n.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Field::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Field::Int(n) => Value::from(*n),
            Field::Bool(b) => Value::Bool(*b),
            Field::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Record {
    fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: &'static str, value: f64) -> &mut Self {
        self.fields.push((key, Field::Num(value)));
        self
    }

    pub fn int(&mut self, key: &'static str, value: u64) -> &mut Self {
        self.fields.push((key, Field::Int(value)));
        self
    }

    pub fn bool(&mut self, key: &'static str, value: bool) -> &mut Self {
        self.fields.push((key, Field::Bool(value)));
        self
    }

    pub fn text(&mut self, key: &'static str, value: &str) -> &mut Self {
        self.fields.push((key, Field::Text(value.to_string())));
        self
    }

    pub fn to_text(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", v.render()))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = self.fields.iter().map(|(_, v)| v.render()).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self
            .fields
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_json()))
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("record serialises");
        s.push('\n');
        s
    }
}
