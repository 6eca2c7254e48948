use std::fmt::Write as _;
use std::io::Write as _;

use coep::linalg::ComplexMatrix;
use coep::CoepError;
use serde::Serialize;

use crate::Common;

/// Writes `value` as pretty JSON, or `table()` with `--table`, to stdout or
/// the `--out` file.
pub fn emit<T: Serialize>(common: &Common, value: &T, table: impl FnOnce() -> String) -> Result<(), CoepError> {
    let text = if common.table {
        table()
    } else {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CoepError::Parse(e.to_string()))?;
        s.push('\n');
        s
    };
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn matrix_block(title: &str, m: &ComplexMatrix) -> String {
    let mut s = format!("{title}:\n");
    for line in m.to_string().lines() {
        let _ = writeln!(s, "  {line}");
    }
    s
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undefined",
    }
}
