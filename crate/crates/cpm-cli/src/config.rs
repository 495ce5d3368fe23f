// SPDX-License-Identifier: Apache-2.0

//! Workload configs, either line-oriented `key = value` text or a JSON
//! object with the same keys.
//!
//! In the text form a value that parses as JSON (numbers, arrays, `true`,
//! quoted strings) is taken as such; anything else is a bare string. Lines
//! starting with `#` are comments.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Workload {
    #[serde(rename = "substring")]
    Substring,
    #[serde(rename = "predicate")]
    Predicate,
    #[serde(rename = "histogram")]
    Histogram,
    #[serde(rename = "object_insert")]
    ObjectInsert,
    #[serde(rename = "sum_1d")]
    Sum1D,
    #[serde(rename = "sum_2d")]
    Sum2D,
    #[serde(rename = "global_limit")]
    GlobalLimit,
    #[serde(rename = "threshold")]
    Threshold,
    #[serde(rename = "template_1d")]
    Template1D,
    #[serde(rename = "template_2d")]
    Template2D,
    #[serde(rename = "sort")]
    Sort,
    #[serde(rename = "local_op")]
    LocalOp,
    #[serde(rename = "line_segment")]
    LineSegment,
    #[serde(rename = "lines")]
    Lines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryType {
    Movable,
    Searchable,
    Comparable,
    #[serde(rename = "computable_1d")]
    Computable1D,
    #[serde(rename = "computable_2d")]
    Computable2D,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Switch {
    #[default]
    On,
    Off,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Word,
    BitSerial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plan {
    Smooth3,
    Smooth5,
    #[serde(rename = "smooth3x3")]
    Smooth3x3,
}

/// Every key a workload may use. Unused keys are rejected at validation so
/// a typo never silently falls back to a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadConfig {
    pub workload: Workload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_type: Option<MemoryType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    /// Word width in bits for computable memory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mx: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub my: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cmp: Option<Cmp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Order>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Plan>,
    /// Record field width in bytes for comparable memory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_bytes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insert: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<u64>>,
    /// Whitespace or comma separated integers, or raw bytes for text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Random data is uniform on `0..=max_value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_value: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: Switch,
}

impl WorkloadConfig {
    pub fn parse(text: &str) -> Result<WorkloadConfig, CliError> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            key_values(text)?
        };
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<WorkloadConfig, CliError> {
        let cfg: WorkloadConfig =
            serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Copy with one numeric key replaced.
    pub fn with_param(&self, key: &str, value: u64) -> Result<WorkloadConfig, CliError> {
        let mut v = self.to_value();
        let obj = v.as_object_mut().expect("config is an object");
        if matches!(key, "workload" | "oracle" | "memory_type") {
            return Err(CliError::Config(format!("{key}: not a numeric parameter")));
        }
        obj.insert(key.to_string(), Value::from(value));
        Self::from_value(v)
    }

    pub fn native_memory(&self) -> MemoryType {
        use Workload::*;
        match self.workload {
            Substring => MemoryType::Searchable,
            Predicate | Histogram => MemoryType::Comparable,
            ObjectInsert => MemoryType::Movable,
            Sum1D | GlobalLimit | Threshold | Template1D | Sort => MemoryType::Computable1D,
            Sum2D | Template2D | LineSegment | Lines => MemoryType::Computable2D,
            LocalOp => match self.plan {
                Some(Plan::Smooth3x3) => MemoryType::Computable2D,
                _ => MemoryType::Computable1D,
            },
        }
    }

    fn used_keys(&self) -> &'static [&'static str] {
        use Workload::*;
        match self.workload {
            Substring => &["n", "m", "text", "pattern", "alphabet", "file"],
            Predicate => &[
                "n",
                "field_bytes",
                "cmp",
                "value",
                "values",
                "file",
                "max_value",
            ],
            Histogram => &["n", "field_bytes", "limits", "values", "file", "max_value"],
            ObjectInsert => &["n", "m", "offset", "insert", "values", "file", "max_value"],
            Sum1D => &["n", "m", "width", "mode", "values", "file", "max_value"],
            Sum2D => &[
                "nx",
                "ny",
                "mx",
                "my",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            GlobalLimit => &[
                "n",
                "m",
                "limit",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            Threshold => &[
                "n",
                "cmp",
                "value",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            Template1D => &[
                "n",
                "m",
                "template",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            Template2D => &[
                "nx",
                "ny",
                "mx",
                "my",
                "template",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            Sort => &[
                "n",
                "m",
                "order",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            LocalOp => &[
                "n",
                "nx",
                "ny",
                "plan",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            LineSegment => &[
                "nx",
                "ny",
                "mx",
                "my",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
            Lines => &[
                "nx",
                "ny",
                "d",
                "width",
                "mode",
                "values",
                "file",
                "max_value",
            ],
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: &str| Err(CliError::Config(format!("{key}: {msg}")));
        let native = self.native_memory();
        if let Some(t) = self.memory_type {
            if t != native {
                return bad(
                    "memory_type",
                    &format!("{} runs on {}", name_of(&self.workload), name_of(&native)),
                );
            }
        }
        let used = self.used_keys();
        let always = ["workload", "memory_type", "seed", "oracle"];
        if let Value::Object(map) = self.to_value() {
            for key in map.keys() {
                if !always.contains(&key.as_str()) && !used.contains(&key.as_str()) {
                    return bad(key, &format!("not used by {}", name_of(&self.workload)));
                }
            }
        }
        if self.values.is_some() && self.file.is_some() {
            return bad("file", "give either inline values or a file, not both");
        }
        if let Some(w) = self.width {
            if !(1..=64).contains(&w) {
                return bad("width", "word width must be in 1..=64");
            }
        }
        let section = "section size must be positive";
        match self.workload {
            Workload::Sum1D | Workload::GlobalLimit => match self.m {
                None => return bad("m", "required"),
                Some(0) => return bad("m", section),
                _ => {}
            },
            Workload::Sum2D => {
                for (k, v) in [("mx", self.mx), ("my", self.my)] {
                    match v {
                        None => return bad(k, "required"),
                        Some(v) if v <= 0 => return bad(k, section),
                        _ => {}
                    }
                }
            }
            Workload::Template1D if self.template.is_none() && self.m.is_none() => {
                return bad("m", "required without an inline template")
            }
            Workload::Template2D | Workload::LineSegment => {
                for (k, v) in [("mx", self.mx), ("my", self.my)] {
                    if v.is_none() {
                        return bad(k, "required");
                    }
                }
            }
            Workload::Lines if self.d.is_none() => return bad("d", "required"),
            Workload::Threshold | Workload::Predicate if self.value.is_none() => {
                return bad("value", "required")
            }
            Workload::Histogram if self.limits.is_none() => return bad("limits", "required"),
            _ => {}
        }
        if let Some(fb) = self.field_bytes {
            if !(1..=8).contains(&fb) {
                return bad("field_bytes", "must be in 1..=8");
            }
        }
        if let Some(a) = &self.alphabet {
            if a.is_empty() {
                return bad("alphabet", "must not be empty");
            }
        }
        Ok(())
    }
}

fn name_of<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

fn key_values(text: &str) -> Result<Value, CliError> {
    let mut map = Map::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        let parsed = match serde_json::from_str::<Value>(v) {
            Ok(Value::Object(_)) | Err(_) => Value::String(v.to_string()),
            Ok(j) => j,
        };
        if map.insert(k.to_string(), parsed).is_some() {
            return Err(CliError::Config(format!("{k}: given twice")));
        }
    }
    Ok(Value::Object(map))
}
