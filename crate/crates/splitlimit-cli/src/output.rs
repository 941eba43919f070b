use serde_json::{json, Value};
use splitlimit::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Wraps a result with the tool version and the resolved configuration.
pub fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({
        "tool": "splitlimit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": result,
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Standard output or an atomically written file.
pub struct Emit(Option<PathBuf>);

impl Emit {
    pub fn new(out: Option<PathBuf>) -> Self {
        Emit(out)
    }

    pub fn text(&self, s: &str) -> Result<()> {
        match &self.0 {
            Some(p) => write_atomic(p, s),
            None => {
                print!("{s}");
                Ok(())
            }
        }
    }

    pub fn json(&self, v: &Value) -> Result<()> {
        self.text(&(serde_json::to_string_pretty(v).expect("serializable") + "\n"))
    }
}
