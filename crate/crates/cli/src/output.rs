use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

macro_rules! csv_columns {
    ($($name:ident, $help:ident = $cols:literal;)*) => {
        $(
            pub const $name: &str = $cols;
            pub const $help: &str = concat!("CSV columns (--format csv): ", $cols);
        )*
    };
}

/// CSV column orders, shared by the writers and the `--help` texts.
pub mod columns {
    csv_columns! {
        CONSTANTS, CONSTANTS_HELP = "q,field,value,branch";
        REGION, REGION_HELP = "m,lambda0,lower,upper,empty,extrapolated";
        EXPONENTS, EXPONENTS_HELP = "m,p,lambda0,field,s,eta1,constant,admissible,extrapolated";
        TRANSFER, TRANSFER_HELP = "eta1,eta2,deficiency";
        CLASSICAL, CLASSICAL_HELP = "m,p,hl_high,hl_low";
        VERIFY, VERIFY_HELP = "trial,trial_seed,kind,lhs,norm_lower,norm_upper,norm_method,ratio_conservative,ratio_empirical,classification,retried";
        SEARCH, SEARCH_HELP = "m,n,p,lambda0,field,s,eta1,constant,best_ratio_conservative,evaluations,seed";
        SWEEP, SWEEP_HELP = "lambda0,s,eta1,constant,admissible,extrapolated,max_ratio_conservative";
        KHINCHIN, KHINCHIN_HELP = "q,field,a_q,l2,lhs,mid,ratio,noise,pass";
        CONTRACTION, CONTRACTION_HELP = "order,n,t,max_coeff,moment,ratio,pass";
        CHAIN, CHAIN_HELP = "index,name,kind,lhs,rhs,slack,noise,pass";
    }
}

/// What a command produced, before formatting.
pub struct Output {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub result: Value,
    /// Leading lines of the text format.
    pub summary: Vec<String>,
    /// Whether the text format lists every field of `result` after the
    /// summary.
    pub details: bool,
    pub columns: &'static str,
    /// Flat objects, one per CSV row.
    pub rows: Vec<Value>,
    /// Set when a checked inequality failed; the process exits with 2.
    pub violation: Option<String>,
}

impl Output {
    pub fn new(command: &'static str, result: &impl Serialize, columns: &'static str) -> Self {
        let result = serde_json::to_value(result).expect("results serialize");
        Output {
            command,
            seed: None,
            rows: vec![result.clone()],
            result,
            summary: Vec::new(),
            details: true,
            columns,
            violation: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn summary(mut self, line: impl Into<String>) -> Self {
        self.summary.push(line.into());
        self
    }

    pub fn rows(mut self, rows: Vec<Value>) -> Self {
        self.rows = rows;
        self
    }

    pub fn render(&self, format: Format, jobs: usize) -> String {
        match format {
            Format::Json => self.render_json(jobs),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(jobs),
        }
    }

    fn render_json(&self, jobs: usize) -> String {
        let envelope = json!({
            "command": self.command,
            "seed": self.seed,
            "jobs": jobs,
            "result": self.result,
        });
        let mut text = serde_json::to_string_pretty(&envelope).expect("json");
        text.push('\n');
        text
    }

    fn render_csv(&self) -> String {
        let header: Vec<&str> = self.columns.split(',').collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let record: Vec<String> = header.iter().map(|k| cell(row.get(*k))).collect();
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn render_text(&self, jobs: usize) -> String {
        let mut out = format!("# hlcert {}", self.command);
        if let Some(seed) = self.seed {
            out.push_str(&format!(" (seed {seed}, jobs {jobs})"));
        }
        out.push('\n');
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        if self.details {
            let mut lines = Vec::new();
            flatten("", &self.result, &mut lines);
            let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in lines {
                out.push_str(&format!("{k:<width$}  {v}\n"));
            }
        }
        out
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(items)) => items.iter().map(|x| cell(Some(x))).collect::<Vec<_>>().join(";"),
        Some(other) => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), cell(Some(other)))),
    }
}

/// Merges the fields of `extra` into the object `base`.
pub fn merged(base: &impl Serialize, extra: Value) -> Value {
    let mut obj: Map<String, Value> = match serde_json::to_value(base).expect("serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(e) = extra {
        obj.extend(e);
    }
    Value::Object(obj)
}
