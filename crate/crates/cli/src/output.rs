//! Output directory handling. Every file is written to a temporary sibling
//! and renamed into place, so readers never see a partial file.

use crate::csvio::{write_table, CsvMatrix};
use crate::error::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|source| CliError::File {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn atomic<E>(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut std::fs::File) -> Result<(), E>,
        wrap: impl FnOnce(PathBuf, E) -> CliError,
    ) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let io = |source| CliError::File {
            path: path.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(io)?;
        body(tmp.as_file_mut()).map_err(|e| wrap(path.clone(), e))?;
        tmp.as_file_mut().flush().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn matrix(&mut self, name: &str, m: &CsvMatrix) -> Result<PathBuf, CliError> {
        self.atomic(
            name,
            |f| m.write(f),
            |path, source| CliError::Csv { path, source },
        )
    }

    pub fn table(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        self.atomic(
            name,
            |f| write_table(f, header, rows),
            |path, source| CliError::Csv { path, source },
        )
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        self.atomic(
            name,
            |f| {
                serde_json::to_writer_pretty(&mut *f, value)?;
                f.write_all(b"\n").map_err(serde_json::Error::io)
            },
            |path, source| CliError::Json { path, source },
        )
    }
}
