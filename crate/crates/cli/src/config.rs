//! Flat `key = value` experiment files merged under the command line.

use std::collections::HashSet;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value, got '{raw}'", idx + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", idx + 1));
        }
        entries.push(ConfigEntry { key, value: v.trim().to_string(), line: idx + 1 });
    }
    Ok(entries)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn subcommand_position(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if a == "--config" {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Splices config entries into `argv` right after the subcommand, skipping
/// keys the user already passed as flags.
pub fn merge(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let Some(pos) = subcommand_position(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("config file '{path}': {e}"))?;
    let entries = parse(&text)?;

    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(&argv[pos]) else {
        // Let clap report the unknown subcommand.
        return Ok(argv);
    };
    let known: HashSet<String> = sub.get_arguments().filter_map(|a| a.get_long()).map(str::to_string).collect();
    let given: HashSet<String> = argv[pos + 1..]
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut extra = Vec::new();
    for e in entries {
        if e.key == "config" || !known.contains(&e.key) {
            return Err(format!("config line {}: '{}' is not an option of '{}'", e.line, e.key, argv[pos]));
        }
        if given.contains(&e.key) {
            continue;
        }
        extra.push(format!("--{}={}", e.key, e.value));
    }
    let mut merged = argv[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[pos + 1..]);
    Ok(merged)
}
