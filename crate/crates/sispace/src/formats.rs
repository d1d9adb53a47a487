//! Spectrum and periodic-function CSV files.
//!
//! Spectrum files have the header `i,k,re,im` and one row per stored
//! `(fiber, translate)`; absent rows are zero. Periodic functions use
//! `t,re,im` with `t = i/M`. Numbers are written with 17 significant digits
//! so a save/load round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use sispace_core::{Complex64, FiberedFunction, GridSpec, PeriodicFunction};

use crate::error::CliError;

pub const SPECTRUM_HEADER: [&str; 4] = ["i", "k", "re", "im"];
pub const PERIODIC_HEADER: [&str; 3] = ["t", "re", "im"];

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn spectrum_to_string(f: &FiberedFunction) -> String {
    let grid = f.grid();
    let mut out = String::from("i,k,re,im\n");
    for i in 0..grid.fibers() {
        for (slot, v) in f.fiber(i).iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", i, grid.translate(slot), fmt_f64(v.re), fmt_f64(v.im));
        }
    }
    out
}

pub fn periodic_to_string(p: &PeriodicFunction) -> String {
    let grid = p.grid();
    let mut out = String::from("t,re,im\n");
    for (i, v) in p.values().iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", fmt_f64(grid.fiber_point(i)), fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str, line: u64, origin: &str) -> Result<T, CliError> {
    field
        .trim()
        .parse()
        .map_err(|_| CliError::input(format!("{origin}:{line}: cannot parse {what} from '{field}'")))
}

/// Parses a spectrum CSV for `grid`. `origin` labels error messages.
pub fn parse_spectrum(text: &str, grid: &GridSpec, origin: &str) -> Result<FiberedFunction, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(format!("{origin}:1: {e}")))?
        .clone();
    if headers.iter().map(str::trim).ne(SPECTRUM_HEADER) {
        return Err(CliError::input(format!(
            "{origin}:1: expected header 'i,k,re,im', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let width = grid.translates();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.fibers() * width];
    let mut seen = vec![false; values.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(format!("{origin}:{line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(CliError::input(format!("{origin}:{line}: expected 4 fields, got {}", record.len())));
        }
        let i: usize = parse_field(&record[0], "fiber index", line, origin)?;
        let k: i64 = parse_field(&record[1], "translate", line, origin)?;
        let re: f64 = parse_field(&record[2], "real part", line, origin)?;
        let im: f64 = parse_field(&record[3], "imaginary part", line, origin)?;
        if i >= grid.fibers() {
            return Err(CliError::input(format!(
                "{origin}:{line}: fiber index {i} outside [0, {})",
                grid.fibers()
            )));
        }
        let slot = grid.slot(k).ok_or_else(|| {
            CliError::input(format!("{origin}:{line}: translate {k} outside |k| <= {}", grid.radius()))
        })?;
        if !re.is_finite() || !im.is_finite() {
            return Err(CliError::input(format!("{origin}:{line}: non-finite value")));
        }
        let idx = i * width + slot;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(CliError::input(format!("{origin}:{line}: duplicate row for (i={i}, k={k})")));
        }
        values[idx] = Complex64::new(re, im);
    }
    Ok(FiberedFunction::from_values(*grid, values)?)
}

pub fn load_spectrum(path: &Path, grid: &GridSpec) -> Result<FiberedFunction, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_spectrum(&text, grid, &path.display().to_string())
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn save_spectrum(path: &Path, f: &FiberedFunction) -> Result<(), CliError> {
    write_atomic(path, &spectrum_to_string(f))
}

pub fn save_periodic(path: &Path, p: &PeriodicFunction) -> Result<(), CliError> {
    write_atomic(path, &periodic_to_string(p))
}
