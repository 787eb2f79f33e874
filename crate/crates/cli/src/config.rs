//! Config-file defaults, merged into the argument list before parsing.
//!
//! The file is TOML. Top-level keys apply to every subcommand that has a
//! flag of that name; a table named after a subcommand (`[evaluate]`,
//! `[patch.split]`) applies to that subcommand only and wins over top-level
//! keys. Flags given on the command line always win.

use std::ffi::OsString;
use std::path::Path;

use clap::{Command, CommandFactory};
use toml::{Table, Value};

use crate::args::Cli;

/// Flags that exclude each other; a config value for one is dropped when the
/// command line sets another.
const EXCLUSIVE: &[&[&str]] = &[&["pred", "method"]];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Subcommand chain named on the command line and the index right after it.
fn locate_subcommand(root: &Command, argv: &[OsString]) -> Option<(Vec<String>, usize)> {
    let mut cmd = root;
    let mut chain = Vec::new();
    let mut end = None;
    let mut i = 1;
    while i < argv.len() {
        let s = argv[i].to_string_lossy();
        if s == "--config" {
            i += 2;
            continue;
        }
        if s.starts_with('-') {
            if end.is_some() {
                break;
            }
            i += 1;
            continue;
        }
        match cmd.find_subcommand(s.as_ref()) {
            Some(sub) => {
                chain.push(sub.get_name().to_string());
                cmd = sub;
                end = Some(i + 1);
                i += 1;
            }
            None => break,
        }
    }
    end.map(|e| (chain, e))
}

fn leaf<'a>(root: &'a Command, chain: &[String]) -> &'a Command {
    chain.iter().fold(root, |cmd, name| {
        cmd.find_subcommand(name).expect("chain was found on this command")
    })
}

fn given_on_command_line(argv: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

fn scalar(key: &str, v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        other => Err(format!("config key '{key}': unsupported value {other}")),
    }
}

fn known_anywhere(cmd: &Command, long: &str) -> bool {
    cmd.get_arguments().any(|a| a.get_long() == Some(long)) || cmd.get_subcommands().any(|c| known_anywhere(c, long))
}

fn section<'a>(table: &'a Table, chain: &[String]) -> Result<Option<&'a Table>, String> {
    let mut current = table;
    for name in chain {
        match current.get(name) {
            Some(Value::Table(t)) => current = t,
            Some(_) => return Err(format!("config key '{name}' must be a table")),
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

fn read_table(path: &Path) -> Result<Table, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.parse::<Table>().map_err(|e| format!("{}: {e}", path.display()))
}

/// Returns `argv` with config-file defaults inserted after the subcommand.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let table = read_table(Path::new(&path))?;
    let root = Cli::command();
    let Some((chain, insert_at)) = locate_subcommand(&root, &argv) else {
        return Ok(argv);
    };
    let cmd = leaf(&root, &chain);

    let mut entries: Vec<(String, Value, bool)> = Vec::new();
    for (k, v) in &table {
        if !matches!(v, Value::Table(_)) {
            entries.push((k.replace('_', "-"), v.clone(), false));
        }
    }
    if let Some(t) = section(&table, &chain)? {
        for (k, v) in t {
            if matches!(v, Value::Table(_)) {
                continue;
            }
            let key = k.replace('_', "-");
            entries.retain(|(e, _, _)| *e != key);
            entries.push((key, v.clone(), true));
        }
    }

    let mut extra: Vec<OsString> = Vec::new();
    for (key, value, scoped) in entries {
        if key == "config" {
            return Err("config files cannot name another config file".into());
        }
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            if scoped || !known_anywhere(&root, &key) {
                return Err(format!("config key '{key}' is not a flag of '{}'", chain.join(" ")));
            }
            continue;
        };
        if given_on_command_line(&argv, &key) {
            continue;
        }
        let excluded = EXCLUSIVE
            .iter()
            .filter(|group| group.contains(&key.as_str()))
            .flat_map(|group| group.iter())
            .any(|other| *other != key && given_on_command_line(&argv, other));
        if excluded {
            continue;
        }
        let flag = format!("--{key}");
        match &value {
            Value::Boolean(true) => extra.push(flag.into()),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                let items = items.iter().map(|v| scalar(&key, v)).collect::<Result<Vec<_>, _>>()?;
                if let Some(delim) = arg.get_value_delimiter() {
                    extra.push(format!("{flag}={}", items.join(&delim.to_string())).into());
                } else {
                    extra.push(flag.into());
                    extra.extend(items.into_iter().map(OsString::from));
                }
            }
            other => extra.push(format!("{flag}={}", scalar(&key, other)?).into()),
        }
    }

    let mut merged = argv;
    merged.splice(insert_at..insert_at, extra);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<OsString> {
        s.split_whitespace().map(OsString::from).collect()
    }

    fn with_config(body: &str, args: &str) -> Result<Vec<String>, String> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, body).unwrap();
        let line = format!("binaq --config {} {args}", path.display());
        merge_config(argv(&line)).map(|v| v.into_iter().skip(3).map(|s| s.into_string().unwrap()).collect())
    }

    #[test]
    fn flags_override_file() {
        let out = with_config("window = 31\nk = 0.3\n", "binarize --method sauvola --window 15").unwrap();
        assert_eq!(out[0], "binarize");
        assert!(out.contains(&"--k=0.3".to_string()));
        assert!(!out.contains(&"--window=31".to_string()));
    }

    #[test]
    fn sections_are_scoped() {
        let out = with_config("[patch.split]\nstride = 64\n", "patch split --patch-size 128").unwrap();
        assert_eq!(&out[..3], ["patch", "split", "--stride=64"]);
        assert!(with_config("[patch.split]\nbogus = 1\n", "patch split").is_err());
    }

    #[test]
    fn arrays_and_booleans() {
        let out = with_config("windows = [7, 15]\nthroughput = true\n", "evaluate --method mws").unwrap();
        assert!(out.contains(&"--throughput".to_string()));
        assert!(out.contains(&"--windows=7,15".to_string()));
        let out = with_config("reports = [\"a.json\", \"b.json\"]\n", "rank --out x.md").unwrap();
        assert_eq!(&out[1..4], ["--reports", "a.json", "b.json"]);
    }

    #[test]
    fn exclusive_flags_yield_to_command_line() {
        let out = with_config("method = \"otsu\"\n", "evaluate --pred p --gt g --out o").unwrap();
        assert!(!out.iter().any(|a| a.starts_with("--method")));
    }

    #[test]
    fn unknown_top_level_key_is_an_error() {
        assert!(with_config("colour = 3\n", "rank --reports a --out b").is_err());
    }
}
