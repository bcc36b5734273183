//! Worker-count resolution and the memory guard.

use crate::error::{CliError, CliResult};

pub const WORKERS_ENV: &str = "SRE_WORKERS";

/// Fraction of physical memory a run may claim without `--force`.
pub const MEMORY_FRACTION: f64 = 0.75;

/// Flag, then `SRE_WORKERS`, then the detected core count.
pub fn resolve_workers(flag: Option<usize>) -> CliResult<usize> {
    if let Some(w) = flag {
        return positive(w, "--workers");
    }
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        let w = raw
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}={raw:?} is not a worker count")))?;
        return positive(w, WORKERS_ENV);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn positive(w: usize, name: &str) -> CliResult<usize> {
    if w == 0 {
        return Err(CliError::Usage(format!("{name} must be at least 1")));
    }
    Ok(w)
}

/// Bytes of one state-sized buffer.
pub fn buffer_bytes(n_qubits: u32) -> u128 {
    16u128 << n_qubits
}

/// Three state-sized buffers: input, one transform scratch, one spare.
pub fn required_bytes(n_qubits: u32) -> u128 {
    3 * buffer_bytes(n_qubits)
}

/// `MemTotal` from `/proc/meminfo`, if available.
pub fn detected_memory() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    parse_meminfo(&text)
}

fn parse_meminfo(text: &str) -> Option<u64> {
    let line = text.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    kib.checked_mul(1024)
}

/// Refuses sizes whose buffers would exceed the memory budget.
pub fn check_memory(n_qubits: u32, workers: usize, force: bool) -> CliResult<()> {
    check_memory_against(n_qubits, workers, force, detected_memory())
}

fn check_memory_against(n_qubits: u32, workers: usize, force: bool, total: Option<u64>) -> CliResult<()> {
    if force {
        return Ok(());
    }
    if n_qubits >= 64 {
        return Err(CliError::Resource(format!("{n_qubits} qubits cannot be addressed")));
    }
    let Some(total) = total else { return Ok(()) };
    let need = required_bytes(n_qubits);
    let budget = (total as f64 * MEMORY_FRACTION) as u128;
    if need > budget {
        return Err(CliError::Resource(format!(
            "N = {n_qubits} needs about {need} bytes (2^N*16 = {} bytes per buffer, one scratch \
             buffer per worker, {workers} workers requested) but the budget is {budget} bytes \
             ({:.0}% of {total}); pass --force to override",
            buffer_bytes(n_qubits),
            MEMORY_FRACTION * 100.0,
        )));
    }
    Ok(())
}
