//! State-vector files.
//!
//! Binary layout, all little-endian:
//!
//! | offset | size  | content                                   |
//! |--------|-------|-------------------------------------------|
//! | 0      | 16    | `MAGICFWHT` followed by seven NUL bytes   |
//! | 16     | 4     | format version (`u32`, currently 1)       |
//! | 20     | 4     | number of qubits `N` (`u32`)              |
//! | 24     | 16·2ᴺ | amplitudes as interleaved `(re, im)` f64  |
//!
//! The JSON-lines form has a header object
//! `{"format":"sre-state","version":1,"n_qubits":N}` followed by one `[re, im]`
//! array per line. Files are told apart by their first byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sre_core::{StateVector, C64};

use crate::error::{CliError, CliResult};

pub const MAGIC: [u8; 16] = *b"MAGICFWHT\0\0\0\0\0\0\0";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;
/// Files claiming more qubits than this are rejected before allocation.
pub const MAX_FILE_QUBITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFormat {
    Binary,
    JsonLines,
}

impl StateFormat {
    /// `.jsonl` and `.json` select JSON lines; everything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => StateFormat::JsonLines,
            _ => StateFormat::Binary,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonHeader {
    format: String,
    version: u32,
    n_qubits: u32,
}

pub fn save_state(path: &Path, psi: &StateVector, format: StateFormat) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        StateFormat::Binary => write_binary(&mut w, psi),
        StateFormat::JsonLines => write_json_lines(&mut w, psi),
    };
    res.and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_binary<W: Write>(w: &mut W, psi: &StateVector) -> std::io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&psi.n_qubits().to_le_bytes())?;
    for z in psi.amplitudes() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_json_lines<W: Write>(w: &mut W, psi: &StateVector) -> std::io::Result<()> {
    let header = JsonHeader { format: "sre-state".into(), version: FORMAT_VERSION, n_qubits: psi.n_qubits() };
    serde_json::to_writer(&mut *w, &header)?;
    w.write_all(b"\n")?;
    for z in psi.amplitudes() {
        serde_json::to_writer(&mut *w, &[z.re, z.im])?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads either format. The norm policy of [`StateVector::new`] applies.
pub fn load_state(path: &Path) -> CliResult<StateVector> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let len = file.metadata().map_err(|e| CliError::io(path, e))?.len();
    let mut r = BufReader::new(file);
    let first = r.fill_buf().map_err(|e| CliError::io(path, e))?.first().copied();
    let amps = match first {
        Some(b'M') => read_binary(&mut r, len, path)?,
        Some(b'{') => read_json_lines(r, path)?,
        Some(_) => return Err(CliError::format(path, "not a state file (unrecognized leading byte)")),
        None => return Err(CliError::format(path, "empty file")),
    };
    StateVector::new(amps).map_err(|e| CliError::format(path, e.to_string()))
}

fn check_qubits(n: u32, path: &Path) -> CliResult<usize> {
    if n == 0 || n > MAX_FILE_QUBITS {
        return Err(CliError::format(path, format!("unsupported qubit count {n}")));
    }
    Ok(1usize << n)
}

fn read_binary<R: Read>(r: &mut R, file_len: u64, path: &Path) -> CliResult<Vec<C64>> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| CliError::format(path, "truncated header"))?;
    if header[..16] != MAGIC {
        return Err(CliError::format(path, "bad magic"));
    }
    let version = u32::from_le_bytes(header[16..20].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(CliError::format(path, format!("unsupported format version {version}")));
    }
    let n = u32::from_le_bytes(header[20..24].try_into().unwrap());
    let dim = check_qubits(n, path)?;
    let expected = HEADER_LEN as u64 + 16 * dim as u64;
    if file_len != expected {
        return Err(CliError::format(
            path,
            format!("expected {expected} bytes for {n} qubits, file has {file_len}"),
        ));
    }
    let mut amps = Vec::with_capacity(dim);
    let mut buf = [0u8; 16];
    for _ in 0..dim {
        r.read_exact(&mut buf).map_err(|e| CliError::io(path, e))?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        amps.push(C64::new(re, im));
    }
    Ok(amps)
}

fn read_json_lines<R: BufRead>(r: R, path: &Path) -> CliResult<Vec<C64>> {
    let mut lines = r.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
    let bad = |line: usize, msg: String| CliError::format(path, format!("line {}: {msg}", line + 1));
    let (_, first) = lines.next().ok_or_else(|| CliError::format(path, "empty file"))?;
    let first = first.map_err(|e| CliError::io(path, e))?;
    let header: JsonHeader = serde_json::from_str(&first).map_err(|e| bad(0, e.to_string()))?;
    if header.format != "sre-state" || header.version != FORMAT_VERSION {
        return Err(bad(0, format!("unsupported header {:?} v{}", header.format, header.version)));
    }
    let dim = check_qubits(header.n_qubits, path)?;
    let mut amps = Vec::with_capacity(dim);
    for (i, line) in lines {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let [re, im]: [f64; 2] = serde_json::from_str(&line).map_err(|e| bad(i, e.to_string()))?;
        amps.push(C64::new(re, im));
    }
    if amps.len() != dim {
        return Err(CliError::format(
            path,
            format!("header declares {dim} amplitudes, found {}", amps.len()),
        ));
    }
    Ok(amps)
}
