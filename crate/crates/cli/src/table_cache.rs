//! Optional on-disk cache for the arithmetic table, pointed at by the
//! LLAB_TABLE_CACHE environment variable. Cache problems are never fatal:
//! the table is rebuilt and the event reported on stderr.

use std::path::PathBuf;

use llab_core::ArithTable;

const ENV_VAR: &str = "LLAB_TABLE_CACHE";

/// Load the smallest sufficient cached table, or build one (and cache it
/// when a cache directory is configured).
pub fn acquire(required: u64) -> Result<ArithTable, String> {
    let dir = std::env::var_os(ENV_VAR).map(PathBuf::from);
    if let Some(dir) = &dir {
        if let Some(table) = try_load(dir, required) {
            return Ok(table);
        }
    }
    let table = ArithTable::build(required).map_err(|e| e.to_string())?;
    if let Some(dir) = &dir {
        let path = dir.join(format!("llab-table-{required}.bin"));
        if let Err(e) = table.write_cache(&path) {
            eprintln!("llab: could not write table cache {}: {e}", path.display());
        }
    }
    Ok(table)
}

fn try_load(dir: &PathBuf, required: u64) -> Option<ArithTable> {
    let entries = std::fs::read_dir(dir).ok()?;
    let mut best: Option<(u64, PathBuf)> = None;
    for entry in entries.flatten() {
        let name = entry.file_name();
        let name = name.to_string_lossy();
        let Some(size) = name
            .strip_prefix("llab-table-")
            .and_then(|s| s.strip_suffix(".bin"))
            .and_then(|s| s.parse::<u64>().ok())
        else {
            continue;
        };
        if size >= required && best.as_ref().is_none_or(|(b, _)| size < *b) {
            best = Some((size, entry.path()));
        }
    }
    let (_, path) = best?;
    match ArithTable::read_cache(&path) {
        Ok(table) if table.n_max() >= required => Some(table),
        Ok(_) => None,
        Err(e) => {
            eprintln!("llab: ignoring unreadable table cache {}: {e}", path.display());
            None
        }
    }
}
