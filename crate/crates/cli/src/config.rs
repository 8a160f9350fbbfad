//! `--config <json>`: a flat object of flag values merged underneath the
//! flags given on the command line.

use std::ffi::OsString;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use clap::CommandFactory;
use serde_json::Value;

use crate::args::Cli;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Returns `args` with the config file's flags inserted right after the
/// subcommand, so anything given explicitly later on the line overrides them.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(sub_name) = args.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.to_string_lossy()))?;
    let Value::Object(map) = value else {
        bail!("config must be a JSON object of flag values");
    };

    let mut tokens: Vec<OsString> = Vec::new();
    for (key, v) in map {
        let long = key.replace('_', "-");
        if long == "config" {
            continue;
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| anyhow!("config key {key:?} is not a flag of `{sub_name}`"))?;
        let flag = format!("--{long}");
        let takes_value = arg.get_action().takes_values();
        let values: Vec<&Value> = match &v {
            Value::Array(items) => items.iter().collect(),
            other => vec![other],
        };
        for item in values {
            match item {
                Value::Bool(b) if !takes_value => {
                    if *b {
                        tokens.push(flag.clone().into());
                    }
                }
                Value::Null => {}
                Value::String(s) => tokens.push(format!("{flag}={s}").into()),
                Value::Number(_) | Value::Bool(_) => tokens.push(format!("{flag}={item}").into()),
                _ => bail!("config key {key:?} has an unsupported value"),
            }
        }
    }
    let mut out = args;
    out.splice(2..2, tokens);
    Ok(out)
}
