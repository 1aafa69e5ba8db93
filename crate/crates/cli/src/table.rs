//! CSV persistence. Every file starts with a `# manifest: <hash>` line; readers
//! skip `#` lines and look columns up by header name.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, manifest_hash: &str, header: &[&str]) -> CliResult<Self> {
        let path = dir.join(name);
        let mut file = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
        writeln!(file, "# manifest: {manifest_hash}").map_err(|e| CliError::io(&path, e))?;
        let mut out = Self { path, writer: csv::Writer::from_writer(file) };
        out.row(header.iter().copied())?;
        Ok(out)
    }

    pub fn row<I, T>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| CliError::Internal(format!("{}: {e}", self.path.display())))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

/// Fixed-precision float; empty for `None`.
pub fn fmt_opt(x: Option<f64>, decimals: usize) -> String {
    x.map(|v| fmt_f(v, decimals)).unwrap_or_default()
}

pub fn fmt_f(x: f64, decimals: usize) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.decimals$}")
    }
}

/// A fully read CSV file.
pub struct CsvIn {
    pub path: PathBuf,
    headers: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl CsvIn {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let headers = reader
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let rows = reader
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| csv_error(path, e))?;
        Ok(Self { path: path.to_path_buf(), headers, rows })
    }

    pub fn has(&self, column: &str) -> bool {
        self.headers.iter().any(|h| h == column)
    }

    pub fn column(&self, column: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| CliError::schema(&self.path, column, "missing column"))
    }

    pub fn str<'a>(&self, row: &'a csv::StringRecord, column: usize) -> &'a str {
        row.get(column).unwrap_or("")
    }

    pub fn f64(&self, row: &csv::StringRecord, column: usize) -> CliResult<f64> {
        let raw = self.str(row, column);
        raw.parse::<f64>().map_err(|_| {
            CliError::schema(&self.path, &self.headers[column], format!("`{raw}` is not a number"))
        })
    }

    pub fn u64(&self, row: &csv::StringRecord, column: usize) -> CliResult<u64> {
        let raw = self.str(row, column);
        raw.parse::<u64>().map_err(|_| {
            CliError::schema(&self.path, &self.headers[column], format!("`{raw}` is not a count"))
        })
    }

    pub fn parsed<T: std::str::FromStr>(&self, row: &csv::StringRecord, column: usize) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.str(row, column);
        raw.parse::<T>()
            .map_err(|e| CliError::schema(&self.path, &self.headers[column], e.to_string()))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        },
        _ => CliError::schema(path, "*", e.to_string()),
    }
}
