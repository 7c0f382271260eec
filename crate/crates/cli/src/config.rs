//! Merges a flat `key = value` config file into the argument list.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. A key is a long flag name without dashes. A key already given on
//! the command line is skipped, and the boundary keys (`alpha`, `beta`, `a`,
//! `b`, `u`, `v`) are skipped as a block when any of them is on the command
//! line. `true` enables a switch, `false` leaves it off.

use std::ffi::OsString;
use std::path::Path;

const BOUNDARY_KEYS: [&str; 6] = ["alpha", "beta", "a", "b", "u", "v"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.starts_with('-') || k == "config" {
            return Err(format!("line {}: invalid key {k:?}", i + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().filter_map(|a| a.to_str());
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(str::to_string);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn has_flag(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter()
        .filter_map(|a| a.to_str())
        .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

/// Returns `args` with config entries appended as flags.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("config {path}: {e}"))?;
    let entries = parse(&text)?;
    let boundary_on_cli = BOUNDARY_KEYS.iter().any(|k| has_flag(&args, k));
    let mut merged = args.clone();
    for (k, v) in entries {
        if has_flag(&args, &k) || (boundary_on_cli && BOUNDARY_KEYS.contains(&k.as_str())) {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(format!("--{k}").into()),
            "false" => {}
            _ => merged.push(format!("--{k}={v}").into()),
        }
    }
    Ok(merged)
}
