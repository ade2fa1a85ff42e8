use crate::CliError;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::Path;

pub const SCHEMA: u32 = 1;

/// A config loaded from disk: either a bare JSON object or the echo block of an earlier output.
#[derive(Debug)]
pub struct Loaded {
    pub command: Option<String>,
    pub config: Map<String, Value>,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<Loaded, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| e.to_string())?;
        let Value::Object(mut obj) = v else { unreachable!() };
        // output documents of JSON commands wrap the config
        if let (Some(Value::Object(cfg)), Some(Value::String(cmd))) = (obj.get("config"), obj.get("command")) {
            return Ok(Loaded { command: Some(cmd.clone()), config: cfg.clone() });
        }
        let command = match obj.remove("command") {
            Some(Value::String(c)) => Some(c),
            Some(_) => return Err("key `command` must be a string".into()),
            None => None,
        };
        return Ok(Loaded { command, config: obj });
    }
    let mut command = None;
    let mut config = None;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some(c) = line.strip_prefix("# command ") {
            command = Some(c.trim().to_string());
        } else if let Some(c) = line.strip_prefix("# config ") {
            match serde_json::from_str(c).map_err(|e| e.to_string())? {
                Value::Object(o) => config = Some(o),
                _ => return Err("embedded config is not an object".into()),
            }
        }
    }
    config.map(|config| Loaded { command, config }).ok_or_else(|| "no JSON object or `# config` line found".into())
}

/// Overlay `over` on the serialized defaults; unknown keys and bad values are reported by name.
pub fn merge<T: Serialize + DeserializeOwned>(defaults: &T, over: &Map<String, Value>) -> Result<T, CliError> {
    let Value::Object(mut base) = serde_json::to_value(defaults).expect("args serialize") else {
        unreachable!("args serialize to an object")
    };
    for (k, v) in over {
        if !base.contains_key(k) {
            return Err(CliError::Invalid(format!("unknown config key `{k}`")));
        }
        base.insert(k.clone(), v.clone());
    }
    serde_path_to_error::deserialize(Value::Object(base))
        .map_err(|e| CliError::Invalid(format!("config key `{}`: {}", e.path(), e.inner())))
}

pub fn header<T: Serialize>(command: &str, args: &T) -> String {
    format!(
        "# cdtc-schema {SCHEMA}\n# command {command}\n# config {}\n",
        serde_json::to_string(args).expect("args serialize")
    )
}

pub fn json_document<T: Serialize>(command: &str, args: &T, result: Value) -> String {
    let doc = serde_json::json!({ "schema": SCHEMA, "command": command, "config": args, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, serde::Deserialize, PartialEq, Debug)]
    struct A {
        trials: usize,
        seed: Option<u64>,
    }

    #[test]
    fn echo_block_round_trips() {
        let a = A { trials: 10, seed: Some(4) };
        let text = header("capacity", &a) + "code,L\n";
        let l = parse(&text).unwrap();
        assert_eq!(l.command.as_deref(), Some("capacity"));
        assert_eq!(merge(&A { trials: 1, seed: None }, &l.config).unwrap(), a);
    }

    #[test]
    fn errors_name_the_key() {
        let base = A { trials: 1, seed: None };
        let bad = parse(r#"{"trails": 3}"#).unwrap();
        assert!(merge(&base, &bad.config).unwrap_err().to_string().contains("trails"));
        let bad = parse(r#"{"trials": "many"}"#).unwrap();
        assert!(merge(&base, &bad.config).unwrap_err().to_string().contains("trials"));
    }
}
