//! `key = value` config files, applied by appending the equivalent flags for
//! every key not already given on the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::error::CliError;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Position of the subcommand name, skipping global options and their values.
fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--config" || s == "--threads" {
            i += 2;
        } else if s.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

fn given_flags(args: &[OsString]) -> Vec<String> {
    args.iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

/// Expands `--config FILE` into explicit flags.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let entries = parse_config(&text)?;
    let Some(sub_idx) = subcommand_index(&args) else { return Ok(args) };
    let mut root = Cli::command();
    root.build();
    let sub_name = args[sub_idx].to_string_lossy().to_string();
    let Some(sub) = root.find_subcommand(&sub_name) else { return Ok(args) };
    let given = given_flags(&args);
    let mut merged = args.clone();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::usage("config files cannot include other config files"));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| CliError::usage(format!("config key {key:?} is not an option of `{sub_name}`")))?;
        if given.contains(&key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "yes" | "1" => merged.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => return Err(CliError::usage(format!("config key {key:?} expects true or false"))),
            },
            _ => {
                merged.push(format!("--{key}").into());
                merged.push(value.into());
            }
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_and_normalizes_keys() {
        let e = parse_config("# c\n\nmin_visits = 5\n--horizon=10\n").unwrap();
        assert_eq!(e, vec![("min-visits".into(), "5".into()), ("horizon".into(), "10".into())]);
        assert!(parse_config("novalue\n").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "horizon = 10\nstrict = true\nthreads = 1\n").unwrap();
        let args = os(&["cybermob", "--config", path.to_str().unwrap(), "explore", "--horizon", "99"]);
        let merged = merge_config(args).unwrap();
        let merged: Vec<String> = merged.into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(merged.iter().filter(|a| *a == "--horizon").count(), 1);
        assert!(merged.contains(&"99".to_string()));
        assert!(merged.contains(&"--strict".to_string()));
        assert!(merged.contains(&"--threads".to_string()));
    }

    #[test]
    fn unknown_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "no-such-option = 1\n").unwrap();
        let err = merge_config(os(&["cybermob", "--config", path.to_str().unwrap(), "dist"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
