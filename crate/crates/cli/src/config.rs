//! Config-file and environment handling around the clap parser.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::error::{invalid, CliResult};

/// Relative paths are resolved against this directory when set.
pub const ROOT_ENV: &str = "BIR_ROOT";

pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(ROOT_ENV) {
        Some(root) if path.is_relative() && !root.is_empty() => Path::new(&root).join(path),
        _ => path.to_path_buf(),
    }
}

/// Parses `key = value` lines into `--key value` arguments.
///
/// `#` starts a comment. Boolean flags take `true`/`false` like on the
/// command line.
pub fn config_args(text: &str, origin: &str) -> CliResult<Vec<OsString>> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("{origin}:{}: expected `key = value`", i + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(invalid(format!("{origin}:{}: invalid key `{key}`", i + 1)));
        }
        args.push(OsString::from(format!("--{key}={}", value.trim())));
    }
    Ok(args)
}

/// Splices config-file arguments in right after the subcommand name, so
/// flags given on the command line still win.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy().into_owned();
        if s == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| invalid("--config needs a path"))?;
            config = Some(PathBuf::from(path));
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(config) = config else {
        return Ok(rest);
    };
    let path = resolve(&config);
    let text =
        std::fs::read_to_string(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let extra = config_args(&text, &path.display().to_string())?;
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(sub..sub, extra);
    Ok(rest)
}
