//! `key=value` parameter files. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::QuadrotorParams;

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("`{key}`: cannot parse `{value}`")]
    Value { key: String, value: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Parses `key=value` lines, rejecting duplicates.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ParamsError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ParamsError::Syntax { line: i + 1, message: format!("expected key=value, got `{line}`") })?;
        let key = k.trim().to_owned();
        if out.insert(key.clone(), v.trim().to_owned()).is_some() {
            return Err(ParamsError::Syntax { line: i + 1, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(out)
}

pub fn parse_value<V: std::str::FromStr>(key: &str, value: &str) -> Result<V, ParamsError> {
    value.parse().map_err(|_| ParamsError::Value { key: key.to_owned(), value: value.to_owned() })
}

impl QuadrotorParams {
    const KEYS: [&'static str; 8] = [
        "mass",
        "inertia_xx",
        "inertia_yy",
        "inertia_zz",
        "thrust_coefficient",
        "drag_coefficient",
        "arm_length",
        "gravity",
    ];

    fn field(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "mass" => &mut self.mass,
            "inertia_xx" => &mut self.inertia[0],
            "inertia_yy" => &mut self.inertia[1],
            "inertia_zz" => &mut self.inertia[2],
            "thrust_coefficient" => &mut self.thrust_coefficient,
            "drag_coefficient" => &mut self.drag_coefficient,
            "arm_length" => &mut self.arm_length,
            "gravity" => &mut self.gravity,
            _ => return None,
        })
    }

    /// Keys not present keep their default value.
    pub fn from_kv(text: &str) -> Result<QuadrotorParams, ParamsError> {
        let mut p = QuadrotorParams::default();
        for (key, value) in parse_pairs(text)? {
            let v = parse_value(&key, &value)?;
            *p.field(&key).ok_or(ParamsError::UnknownKey(key))? = v;
        }
        p.validate().map_err(|e| ParamsError::Invalid(e.to_string()))?;
        Ok(p)
    }

    pub fn to_kv(&self) -> String {
        let mut p = *self;
        Self::KEYS.iter().map(|k| format!("{k}={}\n", p.field(k).map(|v| *v).unwrap())).collect()
    }

    pub fn load(path: &Path) -> Result<QuadrotorParams, ParamsError> {
        Self::from_kv(&std::fs::read_to_string(path)?)
    }
}
