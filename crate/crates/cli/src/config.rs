//! TOML config files and flag overlay.
//!
//! A config file holds top-level `seed`/`output` keys and one table per
//! subcommand (`[greens.solve]`, `[cone.info]`, ...). Flags given on the
//! command line win over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    root: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let root = match serde_json::to_value(table)? {
            Value::Object(m) => m,
            _ => unreachable!("a TOML document is a table"),
        };
        let seed = match root.get("seed") {
            None => None,
            Some(v) => Some(v.as_u64().context("seed must be a non-negative integer")?),
        };
        let output = match root.get("output") {
            None => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => bail!("output must be a string"),
        };
        Ok(ConfigFile { seed, output, root })
    }

    fn table(&self, group: &str, action: &str) -> Result<Map<String, Value>> {
        let Some(g) = self.root.get(group) else {
            return Ok(Map::new());
        };
        match g.get(action) {
            None => Ok(Map::new()),
            Some(Value::Object(m)) => Ok(m.clone()),
            Some(_) => bail!("[{group}.{action}] must be a table"),
        }
    }

    /// Flags over file values; keys set to null by the flags fall through.
    pub fn overlay<P: Serialize + DeserializeOwned>(&self, group: &str, action: &str, flags: &P) -> Result<P> {
        let mut merged = self.table(group, action)?;
        let Value::Object(given) = serde_json::to_value(flags)? else {
            bail!("flag set did not serialize to an object");
        };
        if let Some(k) = merged.keys().find(|k| !given.contains_key(*k)) {
            bail!("unknown key '{k}' in [{group}.{action}]");
        }
        // absent flags serialize as null and absent switches as false
        for (k, v) in given {
            let unset = v.is_null() || v == Value::Bool(false);
            if !unset || !merged.contains_key(&k) {
                merged.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid [{group}.{action}] parameters"))
    }
}
