//! Observed-data bindings.
//!
//! A dataset is a flat map from names to numbers or arrays of numbers, read
//! from a JSON object. Integer-typed data must be written as JSON integers;
//! `1.0` does not bind to an `int` declaration.

use super::DensityError;
use std::collections::BTreeMap;

/// A number that remembers whether it was written as an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Int(i64),
    Real(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Real(r) => r,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Num::Int(i) => Some(i),
            Num::Real(_) => None,
        }
    }
}

/// One bound value.
#[derive(Debug, Clone, PartialEq)]
pub enum DataValue {
    Scalar(Num),
    Array(Vec<Num>),
}

/// Named observed data for one problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    bindings: BTreeMap<String, DataValue>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: DataValue) {
        self.bindings.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&DataValue> {
        self.bindings.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Integer scalar lookup, used to resolve array lengths.
    pub fn int_scalar(&self, name: &str) -> Option<i64> {
        match self.bindings.get(name)? {
            DataValue::Scalar(n) => n.as_int(),
            DataValue::Array(_) => None,
        }
    }

    /// Parse from a JSON object of numbers and arrays of numbers.
    pub fn from_json_str(text: &str) -> Result<Self, DensityError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| DensityError::InvalidDataset(format!("not valid JSON: {e}")))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, DensityError> {
        let obj = value
            .as_object()
            .ok_or_else(|| DensityError::InvalidDataset("dataset must be a JSON object".into()))?;
        let mut ds = Dataset::new();
        for (name, v) in obj {
            let parsed = match v {
                serde_json::Value::Number(n) => DataValue::Scalar(parse_num(name, n)?),
                serde_json::Value::Array(items) => {
                    let mut nums = Vec::with_capacity(items.len());
                    for item in items {
                        match item {
                            serde_json::Value::Number(n) => nums.push(parse_num(name, n)?),
                            other => {
                                return Err(DensityError::InvalidDataset(format!(
                                    "`{name}` contains a non-numeric element: {other}"
                                )))
                            }
                        }
                    }
                    DataValue::Array(nums)
                }
                other => {
                    return Err(DensityError::InvalidDataset(format!(
                        "`{name}` must be a number or array of numbers, got {other}"
                    )))
                }
            };
            ds.insert(name.clone(), parsed);
        }
        Ok(ds)
    }
}

fn parse_num(name: &str, n: &serde_json::Number) -> Result<Num, DensityError> {
    if let Some(i) = n.as_i64() {
        Ok(Num::Int(i))
    } else if let Some(f) = n.as_f64() {
        Ok(Num::Real(f))
    } else {
        Err(DensityError::InvalidDataset(format!(
            "`{name}` holds a number outside the supported range: {n}"
        )))
    }
}
