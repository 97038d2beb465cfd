use serde_json::{json, Map, Value};

use crate::args::Format;

/// One command's output: echoed inputs and named results.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub results: Vec<Map<String, Value>>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Map::new(),
            results: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn push(
        &mut self,
        name: &str,
        value: f64,
        stderr: Option<f64>,
        provenance: &str,
    ) -> &mut Map<String, Value> {
        let mut rec = Map::new();
        rec.insert("name".into(), json!(name));
        rec.insert("value".into(), json!(value));
        if let Some(se) = stderr {
            rec.insert("stderr".into(), json!(se));
        }
        rec.insert("provenance".into(), json!(provenance));
        self.results.push(rec);
        self.results.last_mut().expect("just pushed")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs.clone()),
            "results": self.results.iter().cloned().map(Value::Object).collect::<Vec<_>>(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from("name,value,stderr,provenance\n");
                for r in &self.results {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        csv_field(&plain(r.get("name"))),
                        plain(r.get("value")),
                        plain(r.get("stderr")),
                        csv_field(&plain(r.get("provenance"))),
                    ));
                }
                s
            }
            Format::Text => {
                let mut s = format!("{}\n", self.command);
                for (k, v) in &self.inputs {
                    s.push_str(&format!("  {k} = {}\n", plain(Some(v))));
                }
                for r in &self.results {
                    if let Some(Value::Bool(passed)) = r.get("passed") {
                        let status = match (passed, r.get("informational")) {
                            (_, Some(Value::Bool(true))) => "INFO",
                            (true, _) => "PASS",
                            (false, _) => "FAIL",
                        };
                        s.push_str(&format!(
                            "{status} {} [{}]: {}\n",
                            plain(r.get("name")),
                            plain(r.get("provenance")),
                            plain(r.get("actual"))
                        ));
                        continue;
                    }
                    let mut line = format!("{}: {}", plain(r.get("name")), plain(r.get("value")));
                    if let Some(se) = r.get("stderr") {
                        line.push_str(&format!(" ± {}", plain(Some(se))));
                    }
                    line.push_str(&format!(" [{}]", plain(r.get("provenance"))));
                    for (k, v) in r {
                        if !matches!(k.as_str(), "name" | "value" | "stderr" | "provenance") {
                            line.push_str(&format!("\n    {k}: {}", plain(Some(v))));
                        }
                    }
                    s.push_str(&line);
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn plain(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted_and_stable() {
        let mut r = Report::new("pq")
            .input("region", "mpmg")
            .input("family", "werner");
        r.push("pq", 0.5, Some(0.1), "closed-form threshold");
        let a = r.render(Format::Json);
        assert_eq!(a, r.render(Format::Json));
        assert!(a.find("\"command\"").unwrap() < a.find("\"inputs\"").unwrap());
        assert!(a.find("\"family\"").unwrap() < a.find("\"region\"").unwrap());
        assert!(a.find("\"name\"").unwrap() < a.find("\"provenance\"").unwrap());
    }

    #[test]
    fn csv_quotes_commas() {
        let mut r = Report::new("x");
        r.push("a,b", 1.0, None, "p");
        assert_eq!(
            r.render(Format::Csv),
            "name,value,stderr,provenance\n\"a,b\",1.0,,p\n"
        );
    }
}
