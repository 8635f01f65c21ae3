use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmittedFile {
    pub name: String,
    pub format: String,
    /// Data rows, header excluded. JSON documents count as one row.
    pub rows: usize,
}

/// Record of one invocation. Written last; `args` replays the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub output_dir: String,
    pub emitted_files: Vec<EmittedFile>,
    /// Arguments after the program name, without `--out`.
    pub args: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Output directory that records everything written to it.
pub struct OutDir {
    root: PathBuf,
    files: Vec<EmittedFile>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes through `f`, which returns the number of data rows.
    pub fn write<F>(&mut self, name: &str, f: F) -> CliResult<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> CliResult<usize>,
    {
        let path = self.root.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        let rows = f(&mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        let format = Path::new(name)
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_string();
        self.files.push(EmittedFile {
            name: name.to_string(),
            format,
            rows,
        });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let path = self.root.join(name);
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::io(&path, e))?;
            writeln!(w).map_err(|e| CliError::io(&path, e))?;
            Ok(1)
        })
    }

    pub fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.root.join(name);
        self.write(name, |w| {
            w.write_all(body.as_bytes()).map_err(|e| CliError::io(&path, e))?;
            Ok(body.lines().count())
        })
    }

    /// Writes the manifest and returns it.
    pub fn finish(self, subcommand: &str, config: Option<&Path>, seed: u64, args: Vec<String>) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            config_path: config.map(|p| p.display().to_string()),
            seed,
            output_dir: self.root.display().to_string(),
            emitted_files: self.files,
            args,
        };
        let path = self.root.join(MANIFEST_NAME);
        let body = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(&path, e))?;
        std::fs::write(&path, body + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
