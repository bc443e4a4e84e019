//! Config-file loading and flag precedence.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

/// Reads a TOML config file.
pub fn load(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>().map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
}

/// Overlays `flags` on the config: top-level scalars, then the `[section]` table, then flags.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Table>, section: &str) -> CliResult<T> {
    let Some(file) = file else {
        return reserialize(flags);
    };
    let mut merged = Table::new();
    for (k, v) in file {
        if !v.is_table() {
            merged.insert(k.clone(), v.clone());
        }
    }
    if let Some(sec) = file.get(section) {
        let sec = sec.as_table().ok_or_else(|| CliError::Input(format!("config `{section}` must be a table")))?;
        for (k, v) in sec {
            merged.insert(k.clone(), v.clone());
        }
    }
    for (k, v) in flag_table(flags)? {
        merged.insert(k, v);
    }
    Value::Table(merged).try_into().map_err(|e| CliError::Input(format!("invalid config value: {e}")))
}

fn flag_table<T: Serialize>(flags: &T) -> CliResult<Table> {
    match Value::try_from(flags).map_err(|e| CliError::Input(format!("cannot encode flags: {e}")))? {
        Value::Table(t) => Ok(t),
        _ => Err(CliError::Input("flags did not encode as a table".into())),
    }
}

fn reserialize<T: Serialize + DeserializeOwned>(flags: &T) -> CliResult<T> {
    Value::Table(flag_table(flags)?).try_into().map_err(|e| CliError::Input(format!("invalid flags: {e}")))
}
