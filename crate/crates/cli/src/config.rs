//! `--config <file>` support: a JSON object of flag values spliced into the
//! argument list directly after the subcommand, so explicit flags win.

use std::ffi::OsString;

use serde_json::Value;

use crate::commands::Failure;

/// Subcommands whose `--config` names a document of their own.
const OWN_CONFIG: &[&str] = &["game"];

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--threads" {
            i += 2;
            continue;
        }
        if a.starts_with('-') {
            i += 1;
            continue;
        }
        return Some(i);
    }
    None
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().map(|a| a.to_string_lossy().into_owned());
    let mut found = None;
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next();
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(v.to_string());
        }
    }
    found
}

/// Converts a config object into `--key=value` tokens.
pub fn config_tokens(doc: &Value) -> Result<Vec<OsString>, Failure> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Failure::input("config file must contain a JSON object"))?;
    let mut out = Vec::new();
    for (key, value) in obj {
        if key == "config" {
            continue;
        }
        let flag = key.replace('_', "-");
        let text = match value {
            Value::Null => continue,
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(Failure::input(format!("config key `{key}` must be a scalar"))),
        };
        out.push(OsString::from(format!("--{flag}={text}")));
    }
    Ok(out)
}

pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(pos) = subcommand_position(&args) else {
        return Ok(args);
    };
    if OWN_CONFIG.contains(&args[pos].to_string_lossy().as_ref()) {
        return Ok(args);
    }
    let Some(path) = config_path(&args[pos + 1..]) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::input(format!("cannot read config {path}: {e}")))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("malformed config {path}: {e}")))?;
    let tokens = config_tokens(&doc)?;
    let mut out = args[..=pos].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn finds_subcommand_after_threads() {
        assert_eq!(subcommand_position(&os(&["x", "--threads", "2", "bloch"])), Some(3));
        assert_eq!(subcommand_position(&os(&["x"])), None);
    }

    #[test]
    fn tokens_from_object() {
        let doc: Value = serde_json::from_str(r#"{"n": 3, "family": "tuples", "overlap": false, "x": null}"#).unwrap();
        let t = config_tokens(&doc).unwrap();
        assert_eq!(t, os(&["--family=tuples", "--n=3", "--overlap=false"]));
        assert!(config_tokens(&serde_json::json!([1])).is_err());
        assert!(config_tokens(&serde_json::json!({"a": [1]})).is_err());
    }
}
