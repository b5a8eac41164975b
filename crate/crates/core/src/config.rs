//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Precedence is
//! defaults, then file entries, then explicit overrides.

use std::path::Path;

use crate::engine::SelectParams;
use crate::{Error, Result};

/// Parses `key = value` lines in order.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i as u64 + 1,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse {
                line: i as u64 + 1,
                msg: "empty key".into(),
            });
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Splits one `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Input(format!("expected key=value, got `{s}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Applies entries to `params` in order, rejecting unknown keys.
pub fn apply(params: &mut SelectParams, entries: &[(String, String)]) -> Result<()> {
    for (k, v) in entries {
        params.set(k, v)?;
    }
    Ok(())
}

/// Defaults, overlaid with an optional config file, overlaid with overrides.
pub fn resolve_params(file: Option<&Path>, overrides: &[(String, String)]) -> Result<SelectParams> {
    let mut params = SelectParams::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)?;
        apply(&mut params, &parse_kv(&text)?)?;
    }
    apply(&mut params, overrides)?;
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let kv = parse_kv("# header\n\nwindow = 80\n  merge_correlation=0.9  \n").unwrap();
        assert_eq!(kv, vec![("window".into(), "80".into()), ("merge_correlation".into(), "0.9".into())]);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let err = parse_kv("window = 80\nnonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn overrides_beat_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "window = 80\nmerge_period = 300\n").unwrap();
        let p = resolve_params(Some(&path), &[parse_override("window=120").unwrap()]).unwrap();
        assert_eq!(p.window, 120);
        assert_eq!(p.merge_period, 300);
    }

    #[test]
    fn unknown_key_lists_valid_ones() {
        let err = resolve_params(None, &[("bogus".into(), "1".into())]).unwrap_err();
        match err {
            Error::UnknownParam { key, valid } => {
                assert_eq!(key, "bogus");
                assert!(valid.contains("merge_correlation"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
