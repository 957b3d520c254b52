//! Möbius table on demand: loaded from the cache file when it is large
//! enough, otherwise sieved and written back.

use std::env;
use std::fs;
use std::path::PathBuf;

use riesz_core::mobius::{sieve, DEFAULT_MAX_ENTRIES};
use riesz_core::{Error, MobiusTable};

use crate::CliError;

/// Directory holding `mobius.bin` when `--mobius-cache` is not given.
pub const CACHE_DIR_ENV: &str = "RIESZ_CACHE_DIR";
const CACHE_FILE: &str = "mobius.bin";
const INITIAL_ENTRIES: u64 = 1 << 20;

pub struct TableSource {
    path: Option<PathBuf>,
    explicit: bool,
    table: Option<MobiusTable>,
}

fn default_path() -> Option<PathBuf> {
    if let Some(dir) = env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir).join(CACHE_FILE));
    }
    let base = env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("riesz").join(CACHE_FILE))
}

impl TableSource {
    pub fn new(explicit: Option<PathBuf>) -> Self {
        let is_explicit = explicit.is_some();
        TableSource {
            path: explicit.or_else(default_path),
            explicit: is_explicit,
            table: None,
        }
    }

    fn load(&self) -> Result<Option<MobiusTable>, CliError> {
        let Some(path) = &self.path else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        match MobiusTable::load_cache(path) {
            Ok(t) => Ok(Some(t)),
            Err(e) if self.explicit => Err(e.into()),
            Err(e) => {
                eprintln!("warning: ignoring unreadable cache {}: {e}", path.display());
                Ok(None)
            }
        }
    }

    fn ensure(&mut self, n: u64) -> Result<&MobiusTable, CliError> {
        if self.table.as_ref().is_some_and(|t| t.n_max() >= n) {
            return Ok(self.table.as_ref().unwrap());
        }
        if self.table.is_none() {
            if let Some(t) = self.load()? {
                if t.n_max() >= n {
                    return Ok(self.table.insert(t));
                }
            }
        }
        let t = sieve(n)?;
        if let Some(path) = &self.path {
            let saved = path
                .parent()
                .map_or(Ok(()), fs::create_dir_all)
                .map_err(Error::from)
                .and_then(|_| t.save_cache(path));
            if let Err(e) = saved {
                eprintln!("warning: could not write cache {}: {e}", path.display());
            }
        }
        Ok(self.table.insert(t))
    }

    /// Run `f`, growing the table and retrying whenever it reports one that is too short.
    pub fn with<T>(
        &mut self,
        f: impl Fn(&MobiusTable) -> riesz_core::Result<T>,
    ) -> Result<T, CliError> {
        let mut want = INITIAL_ENTRIES;
        loop {
            let table = self.ensure(want)?;
            match f(table) {
                Err(Error::Resource { needed, available })
                    if needed > available && needed <= DEFAULT_MAX_ENTRIES =>
                {
                    want = needed
                        .max(available.saturating_mul(2))
                        .min(DEFAULT_MAX_ENTRIES);
                    eprintln!("note: growing the Möbius table to {want} entries");
                }
                r => return r.map_err(CliError::from),
            }
        }
    }
}
