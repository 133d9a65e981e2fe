//! Config files are TOML with one table per subcommand plus an optional
//! `[global]` table. Each key becomes the matching `--key` flag; flags given
//! on the command line win over file values.

use std::collections::HashSet;
use std::path::Path;

use crate::CliError;

const SUBCOMMANDS: &[&str] = &[
    "vqe", "adapt", "fci", "noisy", "dynamics", "hubbard", "convert", "sweep",
];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn scalar(v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(CliError::Usage(format!("unsupported config value {other}"))),
    }
}

fn flags_from(table: &toml::Table, given: &HashSet<String>, out: &mut Vec<String>) -> Result<(), CliError> {
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        if given.contains(&flag) {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => out.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    out.push(flag.clone());
                    out.push(scalar(item)?);
                }
            }
            v => {
                out.push(flag);
                out.push(scalar(v)?);
            }
        }
    }
    Ok(())
}

/// Splices config-file values into the argument list right after the subcommand.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let given: HashSet<String> = args
        .iter()
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut extra = Vec::new();
    for section in ["global", args[pos].as_str()] {
        match table.get(section) {
            Some(toml::Value::Table(t)) => flags_from(t, &given, &mut extra)?,
            Some(_) => return Err(CliError::Usage(format!("config entry {section:?} must be a table"))),
            None => {}
        }
    }
    for key in table.keys() {
        if key != "global" && !SUBCOMMANDS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown config section {key:?}")));
        }
    }
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}
