//! Output files are rendered in memory first and written together, so a
//! failing command leaves nothing behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Writes every file into `dir` through a temporary file and rename.
    /// Files already moved into place are removed if a later one fails.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        let result = self.files.iter().try_for_each(|(name, contents)| {
            let target = dir.join(name);
            let mut tmp = NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            tmp.write_all(contents)?;
            tmp.as_file().sync_all()?;
            tmp.persist(&target)
                .with_context(|| format!("writing {}", target.display()))?;
            written.push(target);
            Ok::<_, anyhow::Error>(())
        });
        if let Err(e) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        Ok(written)
    }
}
