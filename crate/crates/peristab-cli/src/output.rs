//! CSV and metadata writers. Every command writes `<name>.meta` echoing the
//! full parameter set (explicit and defaulted) plus the code version, so
//! reruns with an identical config reproduce identical outputs.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> io::Result<OutDir> {
        fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.into() })
    }

    #[allow(dead_code)]
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), contents)
    }

    pub fn write_meta(
        &self,
        command: &str,
        params_echo: &str,
        results: &[(String, String)],
    ) -> io::Result<()> {
        let mut meta = String::new();
        let _ = writeln!(meta, "command = {command}");
        let _ = writeln!(meta, "version = {}", env!("CARGO_PKG_VERSION"));
        meta.push_str(params_echo);
        for (k, v) in results {
            let _ = writeln!(meta, "{k} = {v}");
        }
        self.write(&format!("{}.meta", command.replace('-', "_")), &meta)
    }
}

/// CSV from a header and row-producing closure; full float precision.
pub fn csv<F>(header: &str, n_rows: usize, mut row: F) -> String
where
    F: FnMut(usize, &mut String),
{
    let mut out = String::with_capacity(64 * (n_rows + 1));
    out.push_str(header);
    out.push('\n');
    for i in 0..n_rows {
        row(i, &mut out);
        out.push('\n');
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}
